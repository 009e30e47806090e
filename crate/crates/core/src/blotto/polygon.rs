//! Tangential polygons with side lengths proportional to battlefield values.
//!
//! A convex polygon circumscribing a circle of radius `r` is split by any
//! interior point `P` into triangles over its sides; triangle `i` has area
//! `side_i · h_i / 2`, where `h_i` is the distance from `P` to side `i`.
//! If `P` is the vertical projection of a uniform point on the hemisphere
//! over the incircle, every `h_i` is uniform on `(0, 2r)`, and the areas
//! always add up to the polygon's area `r·s`. Sides `a_i` therefore yield
//! allocations `x_i = B·a_i·h_i / (r·Σa)` with uniform marginals and an
//! exact total.
//!
//! With side `i` running from vertex `i` to vertex `i+1`, the tangent
//! lengths satisfy `t_i + t_{i+1} = side_i`. For an odd number of sides
//! the cyclic system has a unique solution; an even count gets a
//! zero-length dummy side. The dummy forces both of its tangent lengths to
//! zero, so the real sides must then satisfy Pitot's condition in the
//! chosen order. That choice sits at an edge of the solution family and
//! can leave fewer than three positive tangents (a square is the simplest
//! case), so even arrangements satisfying Pitot's condition are also
//! solved directly, taking the middle of the one-parameter family.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::{CounterRng, Domain};

/// Tangent lengths below `-FEASIBILITY_TOLERANCE` make an ordering infeasible.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-12;

/// Random orderings tried after the deterministic heuristics.
pub const RANDOM_ORDERINGS: usize = 10_000;

/// Largest `|Σ side_k · u_k|` (sides normalized to sum 1) accepted as closed.
const CLOSURE_TOLERANCE: f64 = 1e-13;

/// Solves `t_i + t_{i+1} = side_i` (indices mod `m`) for odd `m`.
///
/// Returns `Ok(None)` when some tangent length is negative beyond
/// [`FEASIBILITY_TOLERANCE`]; tiny negatives are clamped to zero.
pub fn solve_tangent_lengths(sides: &[f64]) -> Result<Option<Vec<f64>>> {
    let m = sides.len();
    if m % 2 == 0 {
        return Err(Error::EvenSideCount(m));
    }
    // t_i = ½ Σ_j (−1)^j side_{i+j} = ½ (−1)^i (A_m − 2 A_i),
    // where A_k is the alternating prefix sum Σ_{j<k} (−1)^j side_j.
    let mut prefix = Vec::with_capacity(m + 1);
    let mut acc = 0.0;
    prefix.push(acc);
    for (j, s) in sides.iter().enumerate() {
        acc += if j % 2 == 0 { *s } else { -*s };
        prefix.push(acc);
    }
    let total = prefix[m];
    let mut t = Vec::with_capacity(m);
    for (i, a) in prefix[..m].iter().enumerate() {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let ti = 0.5 * sign * (total - 2.0 * a);
        if ti < -FEASIBILITY_TOLERANCE {
            return Ok(None);
        }
        t.push(ti.max(0.0));
    }
    Ok(Some(t))
}

/// Solves `t_i + t_{i+1} = side_i` (indices mod `m`) for even `m`.
///
/// Solutions exist only when the alternating side sum vanishes (Pitot's
/// condition); they form the family `t_i = (−1)^i·t_0 + c_i`. Returns the
/// member with `t_0` in the middle of its feasible interval, or `None` if
/// the condition fails or no member is non-negative.
pub fn solve_even_tangent_lengths(sides: &[f64]) -> Result<Option<Vec<f64>>> {
    let m = sides.len();
    if m % 2 == 1 || m == 0 {
        return Err(Error::InvalidArgument(format!(
            "expected a positive even number of sides, got {m}"
        )));
    }
    let alternating: f64 = sides
        .iter()
        .enumerate()
        .map(|(j, s)| if j % 2 == 0 { *s } else { -*s })
        .sum();
    if alternating.abs() > FEASIBILITY_TOLERANCE {
        return Ok(None);
    }
    let mut c = Vec::with_capacity(m);
    c.push(0.0);
    for i in 0..m - 1 {
        c.push(sides[i] - c[i]);
    }
    // even i: t_0 ≥ −c_i; odd i: t_0 ≤ c_i
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    for (i, ci) in c.iter().enumerate() {
        if i % 2 == 0 {
            lo = lo.max(-ci);
        } else {
            hi = hi.min(*ci);
        }
    }
    if hi < lo - FEASIBILITY_TOLERANCE {
        return Ok(None);
    }
    let t0 = 0.5 * (lo + hi.max(lo));
    Ok(Some(
        c.iter()
            .enumerate()
            .map(|(i, ci)| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                (sign * t0 + ci).max(0.0)
            })
            .collect(),
    ))
}

/// A feasible cyclic arrangement of sides around the unit incircle.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentialPolygon {
    /// Node index for each side position, `None` for the dummy side.
    pub order: Vec<Option<usize>>,
    /// Side lengths in cyclic order (values normalized to sum 1).
    pub side_values: Vec<f64>,
    /// Tangent lengths at each vertex for the unscaled sides.
    pub tangent_lengths: Vec<f64>,
    /// Factor that makes the scaled polygon close around a unit circle.
    pub scale: f64,
    pub incircle_radius: f64,
    /// Unit outward normal of each side.
    pub normals: Vec<[f64; 2]>,
    /// `|Σ side_k · u_k|`, zero for an exactly closed polygon.
    pub closure_error: f64,
}

impl TangentialPolygon {
    /// Builds the polygon for the given cyclic arrangement, if feasible.
    ///
    /// `values` holds the battlefield values; `order` lists positions,
    /// with at most one `None` for the dummy side. Even-length orders
    /// without a dummy must satisfy Pitot's condition.
    pub fn from_order(values: &[f64], order: Vec<Option<usize>>) -> Option<Self> {
        let total: f64 = values.iter().sum();
        let sides: Vec<f64> = order
            .iter()
            .map(|slot| slot.map_or(0.0, |i| values[i] / total))
            .collect();
        let t = if sides.len() % 2 == 1 {
            solve_tangent_lengths(&sides).ok()??
        } else {
            solve_even_tangent_lengths(&sides).ok()??
        };
        if t.iter().filter(|&&x| x > 0.0).count() < 3 {
            return None;
        }
        let scale = solve_closure(&t);
        let m = sides.len();
        let mut normals = Vec::with_capacity(m);
        let mut phi = 0.0f64;
        for k in 0..m {
            if k > 0 {
                phi += 2.0 * (scale * t[k]).atan();
            }
            normals.push([phi.cos(), phi.sin()]);
        }
        let (mut cx, mut cy) = (0.0, 0.0);
        for (s, u) in sides.iter().zip(&normals) {
            cx += s * u[0];
            cy += s * u[1];
        }
        let closure_error = cx.hypot(cy);
        if closure_error > CLOSURE_TOLERANCE {
            return None;
        }
        Some(TangentialPolygon {
            order,
            side_values: sides,
            tangent_lengths: t,
            scale,
            incircle_radius: 1.0,
            normals,
            closure_error,
        })
    }

    /// Searches orderings of `values` for a feasible polygon.
    ///
    /// Tries the given order, descending order and a large/small
    /// interleaving first, then [`RANDOM_ORDERINGS`] seeded random
    /// permutations. Even counts try every dummy placement before falling
    /// back to the same orders without a dummy.
    pub fn search(values: &[f64]) -> Option<Self> {
        let n = values.len();
        if n < 3 {
            return None;
        }
        let natural: Vec<usize> = (0..n).collect();
        let mut by_value = natural.clone();
        by_value.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
        let mut interleaved = Vec::with_capacity(n);
        let (mut lo, mut hi) = (0usize, n);
        while lo < hi {
            interleaved.push(by_value[lo]);
            lo += 1;
            if lo < hi {
                hi -= 1;
                interleaved.push(by_value[hi]);
            }
        }
        let bases = [&natural, &by_value, &interleaved];
        let mut rng = CounterRng::new(0, Domain::Search).stream(n as u64);
        let mut perms = Vec::with_capacity(RANDOM_ORDERINGS);
        let mut perm = natural.clone();
        for _ in 0..RANDOM_ORDERINGS {
            perm.shuffle(&mut rng);
            perms.push(perm.clone());
        }
        let plain = |o: &[usize]| o.iter().map(|&i| Some(i)).collect::<Vec<_>>();
        if n % 2 == 1 {
            return bases
                .into_iter()
                .chain(perms.iter())
                .find_map(|o| Self::from_order(values, plain(o)));
        }
        let with_gaps = bases
            .iter()
            .flat_map(|o| (0..=n).map(move |gap| with_dummy(o, gap)));
        let random = perms.iter().map(|o| with_dummy(o, n));
        with_gaps
            .chain(random)
            .find_map(|order| Self::from_order(values, order))
            .or_else(|| {
                bases
                    .into_iter()
                    .chain(perms.iter())
                    .find_map(|o| Self::from_order(values, plain(o)))
            })
    }

    pub fn has_dummy(&self) -> bool {
        self.order.iter().any(Option::is_none)
    }

    /// Distances from the projected point `p` to each side line.
    pub fn side_distances(&self, p: [f64; 2]) -> impl Iterator<Item = f64> + '_ {
        self.normals
            .iter()
            .map(move |u| self.incircle_radius - (p[0] * u[0] + p[1] * u[1]))
    }
}

fn with_dummy(order: &[usize], gap: usize) -> Vec<Option<usize>> {
    let mut out: Vec<Option<usize>> = order.iter().map(|&i| Some(i)).collect();
    out.insert(gap, None);
    out
}

/// Finds `c > 0` with `Σ atan(c·t_k) = π`, i.e. the central angles
/// `2·atan(c·t_k)` of a unit incircle add up to a full turn.
fn solve_closure(t: &[f64]) -> f64 {
    let f = |c: f64| t.iter().map(|&x| (c * x).atan()).sum::<f64>() - std::f64::consts::PI;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while f(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut c = 0.5 * (lo + hi);
    for _ in 0..3 {
        let slope: f64 = t.iter().map(|&x| x / (1.0 + c * c * x * x)).sum();
        let next = c - f(c) / slope;
        if next.is_finite() && next > 0.0 {
            c = next;
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn tangent_lengths_examples() {
        let t = solve_tangent_lengths(&[1.0 / 3.0; 3]).unwrap().unwrap();
        assert!(close(&t, &[1.0 / 6.0; 3], 1e-15));

        let sides = [0.3, 0.3, 0.4];
        let t = solve_tangent_lengths(&sides).unwrap().unwrap();
        assert!(close(&t, &[0.2, 0.1, 0.2], 1e-15));
        for i in 0..3 {
            assert!((t[i] + t[(i + 1) % 3] - sides[i]).abs() < 1e-15);
        }

        let t = solve_tangent_lengths(&[0.45, 0.1, 0.45]).unwrap().unwrap();
        assert!(close(&t, &[0.4, 0.05, 0.05], 1e-15));
    }

    #[test]
    fn infeasible_and_even() {
        // a side longer than the rest combined
        assert_eq!(solve_tangent_lengths(&[0.6, 0.2, 0.2]).unwrap(), None);
        assert_eq!(
            solve_tangent_lengths(&[0.25; 4]).unwrap_err(),
            Error::EvenSideCount(4)
        );
    }

    #[test]
    fn even_tangent_lengths() {
        let t = solve_even_tangent_lengths(&[0.25; 4]).unwrap().unwrap();
        assert!(close(&t, &[0.125; 4], 1e-15));
        // 0.4 − 0.3 + 0.1 − 0.2 = 0; t_0 ranges over [0.1, 0.2]
        let sides = [0.4, 0.3, 0.1, 0.2];
        let t = solve_even_tangent_lengths(&sides).unwrap().unwrap();
        assert!(close(&t, &[0.15, 0.25, 0.05, 0.05], 1e-15));
        for i in 0..4 {
            assert!((t[i] + t[(i + 1) % 4] - sides[i]).abs() < 1e-15);
        }
        assert_eq!(solve_even_tangent_lengths(&[0.4, 0.3, 0.2, 0.1]).unwrap(), None);
        assert!(solve_even_tangent_lengths(&[0.5, 0.2, 0.3]).is_err());
    }

    #[test]
    fn regular_polygons_are_feasible() {
        for n in 3..12 {
            let values = vec![1.0 / n as f64; n];
            let p = TangentialPolygon::search(&values).unwrap();
            let real: Vec<f64> = p
                .order
                .iter()
                .zip(&p.tangent_lengths)
                .filter(|(o, _)| o.is_some())
                .map(|(_, t)| *t)
                .collect();
            assert!(p.closure_error < 1e-13);
            if n % 2 == 1 {
                assert!(real.iter().all(|t| (t - 0.5 / n as f64).abs() < 1e-14));
            }
        }
    }

    #[test]
    fn pitot_profile_finds_dummy_order() {
        let p = TangentialPolygon::search(&[0.4, 0.3, 0.2, 0.1]).unwrap();
        assert!(p.has_dummy());
        assert_eq!(p.order.len(), 5);
        assert!(p.tangent_lengths.iter().all(|&t| t >= 0.0));
        assert!(p.closure_error < 1e-13);
    }

    #[test]
    fn generic_even_profile_is_infeasible() {
        // no two values sum to 1/2, so no ordering satisfies Pitot
        assert!(TangentialPolygon::search(&[0.36, 0.3, 0.22, 0.12]).is_none());
    }

    #[test]
    fn side_distances_at_center() {
        let p = TangentialPolygon::search(&[0.2, 0.25, 0.3, 0.1, 0.15]).unwrap();
        assert!(p.side_distances([0.0, 0.0]).all(|h| (h - 1.0).abs() < 1e-15));
    }
}
