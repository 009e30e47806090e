//! Voter-model opinion dynamics seeded by two campaigns' allocations.
//!
//! Node `v` starts with opinion `+1` if the first campaign outspends the
//! second there, `−1` if it is outspent, and a fair coin otherwise. Each
//! round every node copies the previous-round opinion of a uniformly chosen
//! neighbor (synchronous update).

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::blotto::Allocation;
use crate::error::{Error, Result};
use crate::graph::{matrix_power_column_weights, transition_matrix, SocialGraph};
use crate::rng::{CounterRng, Domain};

const CHUNK: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OpinionState {
    /// `+1` or `−1` per node.
    pub opinions: Vec<i8>,
    pub time: u64,
}

impl OpinionState {
    pub fn score(&self) -> i64 {
        self.opinions.iter().map(|&o| i64::from(o)).sum()
    }

    pub fn is_consensus(&self) -> bool {
        self.opinions.windows(2).all(|w| w[0] == w[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimulationConfig {
    pub tau: u64,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoreEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
}

/// Monte Carlo estimate next to the exact expected score.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub tau: u64,
    pub trials: u64,
    pub mean: f64,
    pub std_error: f64,
    pub exact_value: f64,
    /// `(mean − exact) / std_error`; `None` when the standard error is zero.
    pub z_score: Option<f64>,
}

fn check_lengths(n: usize, x: &Allocation, y: &Allocation) -> Result<()> {
    for got in [x.len(), y.len()] {
        if got != n {
            return Err(Error::LengthMismatch { expected: n, got });
        }
    }
    Ok(())
}

fn sign(a: f64, b: f64) -> i8 {
    match a.partial_cmp(&b) {
        Some(std::cmp::Ordering::Greater) => 1,
        Some(std::cmp::Ordering::Less) => -1,
        _ => 0,
    }
}

pub fn initial_opinions<R: Rng + ?Sized>(
    x: &Allocation,
    y: &Allocation,
    rng: &mut R,
) -> Result<OpinionState> {
    check_lengths(x.len(), x, y)?;
    let opinions = x
        .amounts()
        .iter()
        .zip(y.amounts())
        .map(|(&a, &b)| match sign(a, b) {
            0 => {
                if rng.gen::<bool>() {
                    1
                } else {
                    -1
                }
            }
            s => s,
        })
        .collect();
    Ok(OpinionState { opinions, time: 0 })
}

/// One synchronous round.
pub fn step<R: Rng + ?Sized>(state: &OpinionState, g: &SocialGraph, rng: &mut R) -> Result<OpinionState> {
    let mut next = OpinionState {
        opinions: vec![0; state.opinions.len()],
        time: 0,
    };
    step_into(state, g, rng, &mut next)?;
    Ok(next)
}

fn step_into<R: Rng + ?Sized>(
    state: &OpinionState,
    g: &SocialGraph,
    rng: &mut R,
    next: &mut OpinionState,
) -> Result<()> {
    let n = g.node_count();
    if state.opinions.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: state.opinions.len(),
        });
    }
    next.opinions.resize(n, 0);
    for (v, slot) in next.opinions.iter_mut().enumerate() {
        let nbrs = g.neighbors(v);
        *slot = match nbrs.len() {
            0 => state.opinions[v],
            1 => state.opinions[nbrs[0]],
            k => state.opinions[nbrs[rng.gen_range(0..k)]],
        };
    }
    next.time = state.time + 1;
    Ok(())
}

/// `Σ_u w_τ(u)·sgn(x_u − y_u)` with `w_τ` the column sums of `M^τ`.
///
/// Tied nodes contribute zero, which is also their expected contribution
/// under the coin flip.
pub fn expected_score_exact(g: &SocialGraph, x: &Allocation, y: &Allocation, tau: u64) -> Result<f64> {
    check_lengths(g.node_count(), x, y)?;
    let w = matrix_power_column_weights(&transition_matrix(g), tau)?;
    Ok(w.iter()
        .zip(x.amounts().iter().zip(y.amounts()))
        .map(|(wu, (&a, &b))| wu * f64::from(sign(a, b)))
        .sum())
}

/// Runs one trajectory to time `tau` and returns `Σ_v f_τ(v)`.
fn simulate_trial(g: &SocialGraph, x: &Allocation, y: &Allocation, tau: u64, streams: &CounterRng, trial: u64) -> i64 {
    let mut rng = streams.stream(trial);
    let mut state = initial_opinions(x, y, &mut rng).expect("lengths checked");
    let mut next = state.clone();
    for _ in 0..tau {
        if state.is_consensus() {
            break;
        }
        step_into(&state, g, &mut rng, &mut next).expect("lengths checked");
        std::mem::swap(&mut state, &mut next);
    }
    state.score()
}

/// Averages `Σ_v f_τ(v)` over independent trajectories. Trial `k` draws
/// from its own counter-based stream, and per-trial scores are integers
/// summed exactly, so the result does not depend on scheduling.
pub fn expected_score_mc(
    g: &SocialGraph,
    x: &Allocation,
    y: &Allocation,
    cfg: &SimulationConfig,
) -> Result<ScoreEstimate> {
    if cfg.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    check_lengths(g.node_count(), x, y)?;
    let streams = CounterRng::new(cfg.seed, Domain::Voter);
    let chunks = cfg.trials.div_ceil(CHUNK);
    let (sum, sum_sq) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            (c * CHUNK..((c + 1) * CHUNK).min(cfg.trials))
                .map(|k| simulate_trial(g, x, y, cfg.tau, &streams, k))
                .fold((0i128, 0i128), |(s, q), v| (s + v as i128, q + (v as i128) * (v as i128)))
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let t = cfg.trials as i128;
    let mean = sum as f64 / cfg.trials as f64;
    let std_error = if cfg.trials < 2 {
        0.0
    } else {
        // T·Σv² − (Σv)² is exact in integers
        let scaled = (t * sum_sq - sum * sum) as f64;
        (scaled / (t * t * (t - 1)) as f64).sqrt()
    };
    Ok(ScoreEstimate {
        mean,
        std_error,
        trials: cfg.trials,
    })
}

pub fn simulate(g: &SocialGraph, x: &Allocation, y: &Allocation, cfg: &SimulationConfig) -> Result<SimulationReport> {
    let est = expected_score_mc(g, x, y, cfg)?;
    let exact_value = expected_score_exact(g, x, y, cfg.tau)?;
    let z_score = (est.std_error > 0.0).then(|| (est.mean - exact_value) / est.std_error);
    Ok(SimulationReport {
        tau: cfg.tau,
        trials: cfg.trials,
        mean: est.mean,
        std_error: est.std_error,
        exact_value,
        z_score,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{dense_power, generators, TransitionMatrix};
    use proptest::prelude::*;

    fn alloc(v: &[f64]) -> Allocation {
        Allocation::from_amounts(v.to_vec()).unwrap()
    }

    fn rng() -> rand_chacha::ChaCha8Rng {
        CounterRng::new(0, Domain::Voter).stream(0)
    }

    #[test]
    fn initial_opinion_examples() {
        let s = initial_opinions(&alloc(&[0.6, 0.4]), &alloc(&[0.5, 0.5]), &mut rng()).unwrap();
        assert_eq!(s.opinions, [1, -1]);
        let s = initial_opinions(&alloc(&[1.0, 0.0, 0.0]), &alloc(&[0.0, 1.0, 0.0]), &mut rng()).unwrap();
        assert_eq!(&s.opinions[..2], [1, -1]);
        assert!(s.opinions[2] == 1 || s.opinions[2] == -1);
        assert!(initial_opinions(&alloc(&[1.0]), &alloc(&[0.5, 0.5]), &mut rng()).is_err());
    }

    #[test]
    fn ties_are_fair_coins() {
        let x = alloc(&[0.5, 0.5]);
        let streams = CounterRng::new(4, Domain::Voter);
        let trials = 100_000;
        let total: i64 = (0..trials)
            .map(|k| i64::from(initial_opinions(&x, &x, &mut streams.stream(k)).unwrap().opinions[0]))
            .sum();
        // each draw has variance 1
        let mean = total as f64 / trials as f64;
        assert!(mean.abs() < 3.0 / (trials as f64).sqrt(), "{mean}");
    }

    #[test]
    fn consensus_is_absorbing() {
        let g = generators::erdos_renyi(12, 0.3, 1);
        let mut state = OpinionState {
            opinions: vec![1; 12],
            time: 0,
        };
        let mut r = rng();
        for _ in 0..20 {
            state = step(&state, &g, &mut r).unwrap();
            assert!(state.opinions.iter().all(|&o| o == 1));
        }
        assert_eq!(state.time, 20);

        let g = generators::edgeless(1);
        let mut state = OpinionState { opinions: vec![-1], time: 0 };
        for _ in 0..5 {
            state = step(&state, &g, &mut r).unwrap();
        }
        assert_eq!(state.opinions, [-1]);
    }

    #[test]
    fn two_node_flip_probability() {
        // N(1) = {0, 1}, so node 1 adopts +1 with probability 1/2
        let g = generators::complete(2);
        let start = OpinionState { opinions: vec![1, -1], time: 0 };
        let streams = CounterRng::new(2, Domain::Voter);
        let trials = 100_000u64;
        let flips = (0..trials)
            .filter(|&k| step(&start, &g, &mut streams.stream(k)).unwrap().opinions[1] == 1)
            .count();
        let p = flips as f64 / trials as f64;
        assert!((p - 0.5).abs() < 3.0 * 0.5 / (trials as f64).sqrt(), "{p}");
    }

    #[test]
    fn two_node_one_step_mean_is_zero() {
        let g = generators::complete(2);
        let cfg = SimulationConfig { tau: 1, trials: 100_000, seed: 3 };
        let est = expected_score_mc(&g, &alloc(&[1.0, 0.0]), &alloc(&[0.0, 1.0]), &cfg).unwrap();
        assert!(est.mean.abs() < 3.5 * est.std_error, "{est:?}");
        let exact = expected_score_exact(&g, &alloc(&[1.0, 0.0]), &alloc(&[0.0, 1.0]), 1).unwrap();
        assert!(exact.abs() < 1e-15);
    }

    #[test]
    fn consensus_start_is_exact() {
        let g = generators::star(10);
        let x = Allocation::from_parts(vec![0.1; 10], 1.0);
        let y = Allocation::from_parts(vec![0.0; 10], 1.0);
        let cfg = SimulationConfig { tau: 5, trials: 1000, seed: 0 };
        let est = expected_score_mc(&g, &x, &y, &cfg).unwrap();
        assert_eq!(est.mean, 10.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn exact_score_at_zero_horizon_counts_heads() {
        let g = generators::cycle(5);
        let x = alloc(&[0.3, 0.3, 0.2, 0.1, 0.1]);
        let y = alloc(&[0.1, 0.1, 0.2, 0.3, 0.3]);
        assert_eq!(expected_score_exact(&g, &x, &y, 0).unwrap(), 0.0);
        let y = alloc(&[0.0, 0.1, 0.2, 0.4, 0.3]);
        assert_eq!(expected_score_exact(&g, &x, &y, 0).unwrap(), 0.0 + 1.0 + 1.0 - 1.0 - 1.0);
    }

    #[test]
    fn complete_graph_score_is_horizon_free() {
        let g = generators::complete(6);
        let x = alloc(&[0.5, 0.1, 0.1, 0.1, 0.1, 0.1]);
        let y = alloc(&[0.0, 0.2, 0.2, 0.2, 0.2, 0.2]);
        let base = expected_score_exact(&g, &x, &y, 0).unwrap();
        for tau in [1, 2, 7] {
            assert!((expected_score_exact(&g, &x, &y, tau).unwrap() - base).abs() < 1e-12);
        }
    }

    #[test]
    fn star_score_matches_dense_power() {
        let g = generators::star(10);
        let mut x = vec![0.0; 10];
        x[0] = 1.0;
        let x = alloc(&x);
        let y = alloc(&[0.1; 10]);
        let m = TransitionMatrix::dense(&g);
        let power = dense_power(&m, 5).unwrap();
        let oracle: f64 = (0..10)
            .map(|u| {
                let col: f64 = (0..10).map(|v| power[v * 10 + u]).sum();
                let s = f64::from(sign(x.amounts()[u], y.amounts()[u]));
                col * s
            })
            .sum();
        let exact = expected_score_exact(&g, &x, &y, 5).unwrap();
        assert!((exact - oracle).abs() < 1e-12, "{exact} vs {oracle}");
        let cfg = SimulationConfig { tau: 5, trials: 100_000, seed: 11 };
        let est = expected_score_mc(&g, &x, &y, &cfg).unwrap();
        assert!((est.mean - exact).abs() <= 3.5 * est.std_error, "{est:?} vs {exact}");
    }

    #[test]
    fn one_more_round_is_one_more_product() {
        let g = generators::erdos_renyi(15, 0.25, 8);
        let m = transition_matrix(&g);
        for tau in [0, 1, 4, 9] {
            let w = matrix_power_column_weights(&m, tau).unwrap();
            let mut next = vec![0.0; w.len()];
            m.left_multiply(&w, &mut next);
            let direct = matrix_power_column_weights(&m, tau + 1).unwrap();
            assert!(next.iter().zip(&direct).all(|(a, b)| (a - b).abs() < 1e-9));
        }
    }

    #[test]
    fn estimates_are_thread_independent() {
        let g = generators::erdos_renyi(10, 0.4, 2);
        let x = alloc(&[0.2, 0.0, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1]);
        let y = alloc(&[0.0, 0.2, 0.1, 0.1, 0.05, 0.15, 0.1, 0.1, 0.1, 0.1]);
        let cfg = SimulationConfig { tau: 4, trials: 20_000, seed: 5 };
        let a = expected_score_mc(&g, &x, &y, &cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| expected_score_mc(&g, &x, &y, &cfg).unwrap());
        assert_eq!(a, b);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn opinions_stay_binary(seed in any::<u64>(), steps in 0usize..15) {
            let g = generators::erdos_renyi(9, 0.3, seed);
            let streams = CounterRng::new(seed, Domain::Voter);
            let mut r = streams.stream(0);
            let x = alloc(&[0.2, 0.1, 0.0, 0.1, 0.1, 0.1, 0.2, 0.1, 0.1]);
            let y = alloc(&[0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.2, 0.1]);
            let mut state = initial_opinions(&x, &y, &mut r).unwrap();
            for _ in 0..steps {
                let was_consensus = state.is_consensus();
                let before = state.opinions.clone();
                state = step(&state, &g, &mut r).unwrap();
                prop_assert!(state.opinions.iter().all(|&o| o == 1 || o == -1));
                if was_consensus {
                    prop_assert_eq!(&state.opinions, &before);
                }
            }
        }
    }
}
