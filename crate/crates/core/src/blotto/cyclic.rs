//! Closed polygons inscribed in a circle, for profiles where no tangential
//! ordering exists.
//!
//! Let `P` be a uniform point on the unit hemisphere and `p` its projection
//! onto the disk. For any unit vector `u`, `⟨p, u⟩` is uniform on `[-1, 1]`,
//! so `x_i = a_i·(1 - ⟨p, u_i⟩)` is uniform on `[0, 2a_i]`. The total is
//! `Σa_i - ⟨p, Σa_i·u_i⟩`, which is exactly `Σa_i` whenever the vectors
//! `a_i·u_i` close up. Any polygon with sides `a_i` gives such directions;
//! one exists as soon as no side is at least half the perimeter, and the
//! inscribed one is found by a one-dimensional solve for its radius.

const CLOSURE_TOLERANCE: f64 = 1e-13;
const BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct CyclicPolygon {
    pub radius: f64,
    /// Unit direction of side `i`.
    pub directions: Vec<[f64; 2]>,
    /// Central angle of side `i`.
    pub angles: Vec<f64>,
    /// `|Σ a_i·u_i|`.
    pub closure_error: f64,
}

impl CyclicPolygon {
    /// Inscribed polygon with sides `values` in the given order, or `None`
    /// when fewer than three sides are positive or one side is at least
    /// half the total.
    pub fn new(values: &[f64]) -> Option<Self> {
        let total: f64 = values.iter().sum();
        if values.iter().filter(|&&a| a > 0.0).count() < 3 || !total.is_finite() {
            return None;
        }
        let s: Vec<f64> = values.iter().map(|a| a / total).collect();
        let (top, &m) = s.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
        if m >= 0.5 || s.iter().any(|&a| a < 0.0) {
            return None;
        }
        let half = |a: f64, r: f64| (a / (2.0 * r)).min(1.0).asin();
        let r0 = m / 2.0;
        let around: f64 = s.iter().map(|&a| half(a, r0)).sum();
        // Centre inside: half-angles add to π. Centre outside: the longest
        // chord's half-angle equals the sum of the others.
        let centre_inside = around >= std::f64::consts::PI;
        let gap = |r: f64| -> f64 {
            if centre_inside {
                s.iter().map(|&a| half(a, r)).sum::<f64>() - std::f64::consts::PI
            } else {
                half(m, r) - s.iter().enumerate().filter(|&(i, _)| i != top).map(|(_, &a)| half(a, r)).sum::<f64>()
            }
        };
        let mut hi = 1.0;
        while gap(hi) > 0.0 {
            hi *= 2.0;
            if hi > 1e12 {
                return None;
            }
        }
        let mut lo = r0;
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if gap(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let radius = 0.5 * (lo + hi);

        let angles: Vec<f64> = s
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let theta = 2.0 * half(a, radius);
                if i == top && !centre_inside {
                    std::f64::consts::TAU - theta
                } else {
                    theta
                }
            })
            .collect();
        let mut phi = 0.0;
        let directions: Vec<[f64; 2]> = angles
            .iter()
            .map(|theta| {
                let mid = phi + theta / 2.0;
                phi += theta;
                [-mid.sin(), mid.cos()]
            })
            .collect();
        let mut sum = [0.0, 0.0];
        for (u, a) in directions.iter().zip(&s) {
            sum[0] += a * u[0];
            sum[1] += a * u[1];
        }
        let closure_error = sum[0].hypot(sum[1]);
        if closure_error > CLOSURE_TOLERANCE {
            return None;
        }
        Some(CyclicPolygon {
            radius,
            directions,
            angles,
            closure_error,
        })
    }

    /// `1 - ⟨p, u_i⟩` for each side; uniform on `[0, 2]` when `p` comes
    /// from the hemisphere.
    pub fn side_weights(&self, p: [f64; 2]) -> impl Iterator<Item = f64> + '_ {
        self.directions.iter().map(move |u| 1.0 - p[0] * u[0] - p[1] * u[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chord(radius: f64, theta: f64) -> f64 {
        2.0 * radius * (theta / 2.0).sin()
    }

    #[test]
    fn square_is_inscribed_at_known_radius() {
        let c = CyclicPolygon::new(&[0.25; 4]).unwrap();
        assert!((c.radius - 0.25 / 2f64.sqrt()).abs() < 1e-15);
        for t in &c.angles {
            assert!((t - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        }
    }

    #[test]
    fn chords_match_sides_in_both_regimes() {
        // (0.36, ...) keeps the centre inside; (0.45, ...) pushes it out
        for values in [[0.36, 0.3, 0.22, 0.12], [0.45, 0.2, 0.2, 0.15]] {
            let c = CyclicPolygon::new(&values).unwrap();
            for (a, t) in values.iter().zip(&c.angles) {
                assert!((chord(c.radius, *t) - a).abs() < 1e-12, "{values:?}");
            }
            let turn: f64 = c.angles.iter().sum();
            assert!((turn - std::f64::consts::TAU).abs() < 1e-12);
            assert!(c.closure_error < 1e-14);
        }
    }

    #[test]
    fn rejects_dominant_and_short_profiles() {
        assert!(CyclicPolygon::new(&[0.5, 0.2, 0.2, 0.1]).is_none());
        assert!(CyclicPolygon::new(&[0.5, 0.5, 0.0]).is_none());
        assert!(CyclicPolygon::new(&[0.4, 0.3, 0.3]).is_some());
    }
}
