use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use voter_blotto::blotto::{
    adversarial_corpus, beat_pure, payoff_vs_pure_many, Allocation, EquilibriumSampler,
};
use voter_blotto::blotto::strategy::{random_simplex_points, simplex_vertices, uniform_split, CORPUS_RANDOM_POINTS};
use voter_blotto::metrics::{self, TVReport};
use voter_blotto::poc;
use voter_blotto::valuation::{Classification, ClosedFormComparison};
use voter_blotto::voter::{self, SimulationConfig};

use crate::input::{load_allocations, load_graph, load_single_allocation, resolve_profile};
use crate::report::{emit, Check, Report};
use crate::{Cli, Command, Format, GraphArgs};

/// Floor on `K(y)` for the approximate fallback sampler.
pub const APPROXIMATE_FLOOR: f64 = -0.02;

/// Largest accepted `|z|` between simulation and exact score.
pub const Z_LIMIT: f64 = 3.5;

pub fn run(cli: &Cli) -> Result<bool> {
    let format = |default| cli.global.format.unwrap_or(default);
    match &cli.command {
        Command::Graph(args) => cmd_graph(cli, args, format(Format::Json)),
        Command::Value(args) => cmd_value(cli, args, format(Format::Json)),
        Command::Sample { profile, count } => cmd_sample(cli, profile, *count, format(Format::Csv)),
        Command::Evaluate { profile, opponent, trials } => {
            cmd_evaluate(cli, profile, opponent, *trials, format(Format::Json))
        }
        Command::Simulate { graph, tau, x, y, trials } => {
            cmd_simulate(cli, graph, *tau, x, y, *trials, format(Format::Json))
        }
        Command::Distance {
            graph,
            budget,
            density_dir,
            points,
            empirical_draws,
            bins,
        } => cmd_distance(
            cli,
            graph,
            *budget,
            density_dir.as_deref(),
            *points,
            *empirical_draws,
            *bins,
            format(Format::Json),
        ),
        Command::Poc { budget, epsilon } => cmd_poc(cli, *budget, *epsilon, format(Format::Json)),
    }
}

fn finish<T: Serialize>(cli: &Cli, report: &Report<T>, format: Format, csv_body: impl FnOnce() -> String) -> Result<bool> {
    let text = match format {
        Format::Json => report.to_json()?,
        Format::Csv => report.csv_preamble() + &csv_body(),
    };
    emit(cli, &text)?;
    Ok(report.passed)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cmd_graph(cli: &Cli, args: &GraphArgs, format: Format) -> Result<bool> {
    let g = load_graph(&args.graph, args.no_auto_loops)?;
    let summary = g.summary();
    let report = Report::new(cli, "graph", vec![], vec![], &summary);
    finish(cli, &report, format, || {
        let mut s = String::from("degree,count\n");
        for (d, c) in &summary.degree_histogram {
            let _ = writeln!(s, "{d},{c}");
        }
        s
    })
}

#[derive(Debug, Serialize)]
struct NodeValue<'a> {
    node: &'a str,
    value: f64,
    support: [f64; 2],
}

#[derive(Debug, Serialize)]
struct ValueResult<'a> {
    horizon: String,
    budget: f64,
    classification: Classification,
    nodes: Vec<NodeValue<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form_comparison: Option<&'a ClosedFormComparison>,
}

fn cmd_value(cli: &Cli, args: &crate::ProfileArgs, format: Format) -> Result<bool> {
    let resolved = resolve_profile(args)?;
    let p = &resolved.profile;
    let nodes = resolved
        .labels
        .iter()
        .zip(p.values.iter().zip(p.supports(args.budget)))
        .map(|(label, (&value, hi))| NodeValue {
            node: label,
            value,
            support: [0.0, hi],
        })
        .collect();
    let total: f64 = p.values.iter().sum();
    let checks = vec![Check::new(
        "values_sum_to_one",
        (total - 1.0).abs() <= 1e-9,
        format!("sum {total}"),
    )];
    let result = ValueResult {
        horizon: p.horizon.to_string(),
        budget: args.budget,
        classification: p.classification,
        nodes,
        closed_form_comparison: p.closed_form_comparison.as_ref(),
    };
    let report = Report::new(cli, "value", vec![], checks, &result);
    finish(cli, &report, format, || {
        let mut s = String::from("node,value,support_lower,support_upper\n");
        for n in &result.nodes {
            let _ = writeln!(s, "{},{},{},{}", csv_field(n.node), n.value, n.support[0], n.support[1]);
        }
        s
    })
}

fn cmd_sample(cli: &Cli, args: &crate::ProfileArgs, count: u64, format: Format) -> Result<bool> {
    let resolved = resolve_profile(args)?;
    let sampler = EquilibriumSampler::new(resolved.profile.clone(), args.budget, cli.global.seed)?;
    let draws: Vec<Allocation> = (0..count).map(|k| sampler.draw(k)).collect();
    let worst = draws
        .iter()
        .map(|x| (x.amounts().iter().sum::<f64>() - args.budget).abs())
        .fold(0.0, f64::max);
    let checks = vec![Check::new(
        "budget_exact",
        worst <= 1e-12 * args.budget,
        format!("max |sum - B| = {worst:e}"),
    )];
    let construction = sampler.construction().as_str().to_string();
    let amounts: Vec<&[f64]> = draws.iter().map(Allocation::amounts).collect();
    let report = Report::new(cli, "sample", vec![construction], checks, &amounts);
    finish(cli, &report, format, || {
        let mut s = format!(
            "# budget: {}\n# horizon: {}\n# values: {}\nindex",
            args.budget,
            resolved.profile.horizon,
            join(&resolved.profile.values)
        );
        for label in &resolved.labels {
            s.push(',');
            s.push_str(&csv_field(label));
        }
        s.push('\n');
        for (k, x) in draws.iter().enumerate() {
            let _ = writeln!(s, "{k},{}", join(x.amounts()));
        }
        s
    })
}

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

fn opponents(keyword: &str, sampler: &EquilibriumSampler, seed: u64) -> Result<Vec<(String, Allocation)>> {
    let profile = sampler.profile();
    let (n, b) = (profile.len(), sampler.budget());
    let labelled = |prefix: &str, v: Vec<Allocation>| -> Vec<(String, Allocation)> {
        v.into_iter().enumerate().map(|(k, a)| (format!("{prefix}_{k}"), a)).collect()
    };
    Ok(match keyword {
        "uniform" => vec![("uniform".into(), uniform_split(n, b))],
        "vertices" => labelled("vertex", simplex_vertices(n, b)),
        "beat-pure" => {
            let mut base = labelled("vertex", simplex_vertices(n, b));
            base.push(("uniform".into(), uniform_split(n, b)));
            base.extend(labelled("random", random_simplex_points(n, b, CORPUS_RANDOM_POINTS, seed)));
            base.iter()
                .map(|(label, x)| Ok((format!("beat_pure({label})"), beat_pure(x, profile)?)))
                .collect::<Result<_>>()?
        }
        "corpus" => adversarial_corpus(profile, b, seed),
        path => {
            let allocs = load_allocations(Path::new(path))?;
            labelled("file", allocs)
        }
    })
}

#[derive(Debug, Serialize)]
struct OpponentResult {
    opponent: String,
    allocation: Vec<f64>,
    mean: f64,
    std_error: f64,
    floor: f64,
    passed: bool,
}

fn cmd_evaluate(cli: &Cli, args: &crate::ProfileArgs, keyword: &str, trials: u64, format: Format) -> Result<bool> {
    let resolved = resolve_profile(args)?;
    let sampler = EquilibriumSampler::new(resolved.profile, args.budget, cli.global.seed)?;
    let corpus = opponents(keyword, &sampler, cli.global.seed)?;
    for (label, y) in &corpus {
        if (y.budget() - args.budget).abs() > 1e-9 * args.budget {
            bail!("opponent {label} spends {} but the budget is {}", y.budget(), args.budget);
        }
    }
    let ys: Vec<Allocation> = corpus.iter().map(|(_, y)| y.clone()).collect();
    let estimates = payoff_vs_pure_many(&sampler, &ys, trials)?;
    let exact = sampler.construction().is_exact();
    let rows: Vec<OpponentResult> = corpus
        .into_iter()
        .zip(estimates)
        .map(|((label, y), est)| {
            let floor = if exact { 0.0 - 3.0 * est.std_error } else { APPROXIMATE_FLOOR };
            OpponentResult {
                opponent: label,
                allocation: y.into_amounts(),
                mean: est.mean,
                std_error: est.std_error,
                floor,
                passed: est.mean >= floor,
            }
        })
        .collect();
    let failures = rows.iter().filter(|r| !r.passed).count();
    let worst = rows.iter().map(|r| r.mean).fold(f64::INFINITY, f64::min);
    let rule = if exact { "K(y) >= -3 se" } else { "K(y) >= -0.02" };
    let checks = vec![Check::new(
        "equilibrium_floor",
        failures == 0,
        format!("{rule}; {failures} of {} opponents below; worst mean {worst}", rows.len()),
    )];
    let construction = sampler.construction().as_str().to_string();
    let report = Report::new(cli, "evaluate", vec![construction], checks, &rows);
    finish(cli, &report, format, || {
        let mut s = String::from("opponent,mean,std_error,floor,passed\n");
        for r in &rows {
            let _ = writeln!(s, "{},{},{},{},{}", csv_field(&r.opponent), r.mean, r.std_error, r.floor, r.passed);
        }
        s
    })
}

fn cmd_simulate(cli: &Cli, args: &GraphArgs, tau: u64, x: &Path, y: &Path, trials: u64, format: Format) -> Result<bool> {
    let g = load_graph(&args.graph, args.no_auto_loops)?;
    let x = load_single_allocation(x)?;
    let y = load_single_allocation(y)?;
    let cfg = SimulationConfig {
        tau,
        trials,
        seed: cli.global.seed,
    };
    let sim = voter::simulate(&g, &x, &y, &cfg)?;
    let check = match sim.z_score {
        Some(z) => Check::new("matches_exact", z.abs() <= Z_LIMIT, format!("|z| = {} (limit {Z_LIMIT})", z.abs())),
        None => {
            let gap = (sim.mean - sim.exact_value).abs();
            Check::new("matches_exact", gap <= 1e-9, format!("zero variance; |mean - exact| = {gap:e}"))
        }
    };
    let report = Report::new(cli, "simulate", vec![], vec![check], &sim);
    finish(cli, &report, format, || {
        let z = sim.z_score.map_or(String::new(), |z| z.to_string());
        format!(
            "tau,trials,mean,std_error,exact_value,z_score\n{},{},{},{},{},{z}\n",
            sim.tau, sim.trials, sim.mean, sim.std_error, sim.exact_value
        )
    })
}

#[derive(Debug, Serialize)]
struct DensitySummary {
    degree: u64,
    nodes: usize,
    mean: f64,
    variance: f64,
    integral: f64,
    case: metrics::DegreeCase,
    #[serde(skip_serializing_if = "Option::is_none")]
    file: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct DistanceResult {
    budget: f64,
    #[serde(flatten)]
    tv: TVReport,
    densities: Vec<DensitySummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    empirical_average_delta: Option<f64>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_distance(
    cli: &Cli,
    args: &GraphArgs,
    budget: f64,
    density_dir: Option<&Path>,
    points: usize,
    empirical_draws: u64,
    bins: usize,
    format: Format,
) -> Result<bool> {
    if !(budget > 0.0 && budget.is_finite()) {
        bail!("budget must be positive, got {budget}");
    }
    let g = load_graph(&args.graph, args.no_auto_loops)?;
    let tv = metrics::average_tv(&g)?;
    let n = g.node_count() as u64;
    let mut by_degree: BTreeMap<u64, usize> = BTreeMap::new();
    for node in &tv.per_node {
        *by_degree.entry(node.degree).or_default() += 1;
    }
    if let Some(dir) = density_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let mut densities = Vec::new();
    for (&d, &count) in &by_degree {
        let f = metrics::difference_density(n, d, tv.edges)?;
        let file = match density_dir {
            Some(dir) => {
                let path = dir.join(format!("density_degree_{d}.csv"));
                let mut s = format!(
                    "# {} {} distance density\n# nodes: {n}\n# degree: {d}\n# edges: {}\n# budget: {budget}\n# case: {}\nz,f_z\n",
                    crate::report::TOOL,
                    crate::report::VERSION,
                    tv.edges,
                    serde_json::to_value(f.case)?.as_str().unwrap_or_default(),
                );
                // Z scales with the budget, its density inversely
                for (z, fz) in f.table(points) {
                    let _ = writeln!(s, "{},{}", z * budget, fz / budget);
                }
                std::fs::write(&path, s).with_context(|| format!("cannot write {}", path.display()))?;
                Some(path)
            }
            None => None,
        };
        densities.push(DensitySummary {
            degree: d,
            nodes: count,
            mean: f.mean * budget,
            variance: f.variance * budget * budget,
            integral: f.integral(),
            case: f.case,
            file,
        });
    }
    let mut checks = vec![
        Check::new(
            "delta_in_unit_interval",
            tv.per_node.iter().all(|x| (0.0..=1.0).contains(&x.delta)),
            "0 <= delta_i <= 1",
        ),
        Check::new(
            "density_integrates_to_one",
            densities.iter().all(|d| (d.integral - 1.0).abs() <= 1e-9),
            "|integral - 1| <= 1e-9",
        ),
    ];
    let empirical_average_delta = if empirical_draws > 0 {
        let est = metrics::empirical_average_tv(&g, empirical_draws, bins, cli.global.seed)?;
        let gap = (est - tv.average_delta).abs();
        checks.push(Check::new(
            "empirical_matches_closed_form",
            gap < 0.01,
            format!("|empirical - closed form| = {gap}"),
        ));
        Some(est)
    } else {
        None
    };
    let result = DistanceResult {
        budget,
        tv,
        densities,
        empirical_average_delta,
    };
    let report = Report::new(cli, "distance", vec![], checks, &result);
    finish(cli, &report, format, || {
        let mut s = format!(
            "# degree convention: {}\n# average delta: {}\nnode,degree,delta,case\n",
            result.tv.degree_convention, result.tv.average_delta
        );
        for x in &result.tv.per_node {
            let case = serde_json::to_value(x.case).ok();
            let case = case.as_ref().and_then(|v| v.as_str()).unwrap_or_default();
            let _ = writeln!(s, "{},{},{},{case}", csv_field(&x.node), x.degree, x.delta);
        }
        s
    })
}

fn cmd_poc(cli: &Cli, budget: f64, epsilon: f64, format: Format) -> Result<bool> {
    let r = poc::poc_report(budget, epsilon)?;
    // B·10^k must come out exact when B is a whole number
    let exact_rows = if budget.fract() == 0.0 && budget < 2f64.powi(53) {
        r.schedule.iter().all(|row| {
            let expected = budget as u128 * 10u128.pow(row.exponent);
            row.ratio.fract() == 0.0 && row.ratio as u128 == expected
        })
    } else {
        r.schedule
            .iter()
            .all(|row| (row.ratio * row.epsilon - budget).abs() <= 1e-15 * budget)
    };
    let halved = poc::price_of_competition(budget, epsilon / 2.0)?;
    let checks = vec![
        Check::new("ratio_is_budget_over_epsilon", r.ratio == budget / epsilon, format!("ratio {}", r.ratio)),
        Check::new("schedule_exact", exact_rows, "ratio = B * 10^k at eps = 10^-k"),
        Check::new("schedule_monotone", r.monotone, "ratios strictly increase as eps shrinks"),
        Check::new("halving_doubles", halved == 2.0 * r.ratio, format!("ratio at eps/2 = {halved}")),
    ];
    let report = Report::new(cli, "poc", vec![], checks, &r);
    finish(cli, &report, format, || {
        let mut s = format!(
            "# budget: {budget}\n# epsilon: {epsilon}\n# ratio: {}\nepsilon,exponent,ratio\n",
            r.ratio
        );
        for row in &r.schedule {
            let _ = writeln!(s, "{:e},{},{}", row.epsilon, row.exponent, row.ratio);
        }
        s
    })
}
