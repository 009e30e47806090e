//! Equilibrium samplers.
//!
//! A draw is a pure function of `(construction, seed, draw index)`: draw
//! `k` reads its own counter-based stream, so any subset of draws can be
//! reproduced or computed in parallel.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::cyclic::CyclicPolygon;
use super::polygon::TangentialPolygon;
use super::Allocation;
use crate::error::{Error, Result};
use crate::rng::{CounterRng, Domain};
use crate::valuation::ValuationProfile;

/// Alternating-projection rounds for the approximate fallback.
const PROJECTION_ROUNDS: usize = 50;
const PROJECTION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Triangle,
    Polygon,
    /// Inscribed polygon, used when no tangential ordering exists.
    Cyclic,
    AllIn,
    Approximate,
}

impl Construction {
    /// Exact constructions have uniform marginals and an exact total.
    pub fn is_exact(self) -> bool {
        !matches!(self, Construction::Approximate)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Construction::Triangle => "triangle",
            Construction::Polygon => "polygon",
            Construction::Cyclic => "cyclic",
            Construction::AllIn => "all_in",
            Construction::Approximate => "approximate",
        }
    }
}

/// Serialized sampler description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub values: Vec<f64>,
    pub budget: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<Construction>,
}

/// Triangle with side lengths `a_1, a_2, a_3` and its incircle.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleGeometry {
    pub vertices: [[f64; 2]; 3],
    pub incenter: [f64; 2],
    pub inradius: f64,
    pub area: f64,
}

impl TriangleGeometry {
    /// Side `i` joins vertex `i` to vertex `i+1` and has length `sides[i]`.
    pub fn new(sides: [f64; 3]) -> Result<Self> {
        let [a0, a1, a2] = sides;
        if sides.iter().any(|&s| s <= 0.0) || a0 >= a1 + a2 || a1 >= a0 + a2 || a2 >= a0 + a1 {
            return Err(Error::DegenerateProfile(format!(
                "sides {sides:?} do not form a non-degenerate triangle"
            )));
        }
        let v0 = [0.0, 0.0];
        let v1 = [a0, 0.0];
        let cx = (a0 * a0 + a2 * a2 - a1 * a1) / (2.0 * a0);
        let v2 = [cx, (a2 * a2 - cx * cx).sqrt()];
        let perimeter = a0 + a1 + a2;
        // each vertex is weighted by the length of the opposite side
        let incenter = [
            (a1 * v0[0] + a2 * v1[0] + a0 * v2[0]) / perimeter,
            (a1 * v0[1] + a2 * v1[1] + a0 * v2[1]) / perimeter,
        ];
        let area = 0.5 * a0 * v2[1];
        Ok(TriangleGeometry {
            vertices: [v0, v1, v2],
            incenter,
            inradius: 2.0 * area / perimeter,
            area,
        })
    }

    /// Projects the hemisphere point `(height, angle)` into the plane and
    /// writes the area shares of the three subtended triangles.
    pub fn area_shares(&self, height: f64, angle: f64, out: &mut [f64]) {
        let rho = (1.0 - height * height).sqrt() * self.inradius;
        let p = [
            self.incenter[0] + rho * angle.cos(),
            self.incenter[1] + rho * angle.sin(),
        ];
        let mut areas = [0.0; 3];
        for (i, area) in areas.iter_mut().enumerate() {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % 3];
            *area = 0.5 * ((b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])).abs();
        }
        let total: f64 = areas.iter().sum();
        for (o, a) in out.iter_mut().zip(areas) {
            *o = a / total;
        }
    }
}

/// Draws one allocation from the three-battlefield hemisphere construction.
pub fn sample_triangle<R: Rng + ?Sized>(
    profile: &ValuationProfile,
    budget: f64,
    rng: &mut R,
) -> Result<Allocation> {
    if profile.len() != 3 || !profile.classification.is_general() {
        return Err(Error::DegenerateProfile(format!(
            "triangle construction needs 3 values with 0 < a_i < 1/2, got {:?}",
            profile.values
        )));
    }
    let v = &profile.values;
    let tri = TriangleGeometry::new([v[0], v[1], v[2]])?;
    let (height, angle) = hemisphere_point(rng);
    let mut shares = [0.0; 3];
    tri.area_shares(height, angle, &mut shares);
    Ok(Allocation::from_parts(
        shares.iter().map(|s| budget * s).collect(),
        budget,
    ))
}

/// Uniform point on the unit upper hemisphere as (height, azimuth).
fn hemisphere_point<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let height: f64 = rng.gen();
    let angle = TAU * rng.gen::<f64>();
    (height, angle)
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Triangle(TriangleGeometry),
    Polygon(TangentialPolygon),
    Cyclic(CyclicPolygon),
    AllIn(usize),
    /// Upper ends `2·a_i` of the budget-1 supports.
    Approximate(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumSampler {
    profile: ValuationProfile,
    budget: f64,
    seed: u64,
    /// Nodes with non-null value, in the order the construction sees them.
    active: Vec<usize>,
    /// Values of the active nodes renormalized to sum 1.
    active_values: Vec<f64>,
    kind: Kind,
    streams: CounterRng,
}

impl EquilibriumSampler {
    /// Chooses the construction from the profile's classification.
    ///
    /// Null-value nodes always receive 0. Profiles with a dominant node
    /// (or only two live nodes) put the whole budget on the highest value,
    /// lowest index first. Three live nodes use the triangle, more use a
    /// tangential polygon, then an inscribed one when no tangential
    /// ordering is found. The approximate sampler is the last resort.
    pub fn new(profile: ValuationProfile, budget: f64, seed: u64) -> Result<Self> {
        check_budget(budget)?;
        let active = profile.active();
        let reduced = renormalized(&profile, &active);
        let dominant = reduced.iter().any(|&a| a >= 0.5);
        if active.len() <= 2 || dominant {
            let target = argmax(&profile.values);
            return Self::with_kind(profile, budget, seed, Kind::AllIn(target));
        }
        if active.len() == 3 {
            let tri = TriangleGeometry::new([reduced[0], reduced[1], reduced[2]])?;
            return Self::with_kind(profile, budget, seed, Kind::Triangle(tri));
        }
        let kind = polygon_or_fallback(&reduced);
        Self::with_kind(profile, budget, seed, kind)
    }

    /// Deterministic sampler that always plays `B` on `target`.
    pub fn all_in_on(profile: ValuationProfile, budget: f64, target: usize, seed: u64) -> Result<Self> {
        check_budget(budget)?;
        if target >= profile.len() {
            return Err(Error::InvalidArgument(format!(
                "object {target} out of range for {} battlefields",
                profile.len()
            )));
        }
        Self::with_kind(profile, budget, seed, Kind::AllIn(target))
    }

    /// Forces a particular construction, failing if the profile cannot
    /// support it.
    pub fn with_construction(
        profile: ValuationProfile,
        budget: f64,
        seed: u64,
        construction: Construction,
    ) -> Result<Self> {
        check_budget(budget)?;
        let active = profile.active();
        let reduced = renormalized(&profile, &active);
        let kind = match construction {
            Construction::AllIn => Kind::AllIn(argmax(&profile.values)),
            Construction::Triangle => {
                if reduced.len() != 3 {
                    return Err(Error::DegenerateProfile(format!(
                        "triangle construction needs 3 non-null values, got {}",
                        reduced.len()
                    )));
                }
                Kind::Triangle(TriangleGeometry::new([reduced[0], reduced[1], reduced[2]])?)
            }
            Construction::Polygon => {
                require_general(&reduced)?;
                Kind::Polygon(TangentialPolygon::search(&reduced).ok_or_else(|| {
                    Error::DegenerateProfile("no feasible tangential ordering found".into())
                })?)
            }
            Construction::Cyclic => {
                require_general(&reduced)?;
                Kind::Cyclic(CyclicPolygon::new(&reduced).ok_or_else(|| {
                    Error::DegenerateProfile("inscribed polygon does not close".into())
                })?)
            }
            Construction::Approximate => {
                require_general(&reduced)?;
                Kind::Approximate(reduced.iter().map(|a| 2.0 * a).collect())
            }
        };
        Self::with_kind(profile, budget, seed, kind)
    }

    pub fn from_spec(spec: &SamplerSpec) -> Result<Self> {
        let profile = ValuationProfile::from_values(&spec.values)?;
        match spec.construction {
            Some(c) => Self::with_construction(profile, spec.budget, spec.seed, c),
            None => Self::new(profile, spec.budget, spec.seed),
        }
    }

    fn with_kind(profile: ValuationProfile, budget: f64, seed: u64, kind: Kind) -> Result<Self> {
        let active = profile.active();
        let active_values = renormalized(&profile, &active);
        Ok(EquilibriumSampler {
            profile,
            budget,
            seed,
            active,
            active_values,
            kind,
            streams: CounterRng::new(seed, Domain::Sampler),
        })
    }

    pub fn profile(&self) -> &ValuationProfile {
        &self.profile
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn construction(&self) -> Construction {
        match self.kind {
            Kind::Triangle(_) => Construction::Triangle,
            Kind::Polygon(_) => Construction::Polygon,
            Kind::Cyclic(_) => Construction::Cyclic,
            Kind::AllIn(_) => Construction::AllIn,
            Kind::Approximate(_) => Construction::Approximate,
        }
    }

    pub fn polygon(&self) -> Option<&TangentialPolygon> {
        match &self.kind {
            Kind::Polygon(p) => Some(p),
            _ => None,
        }
    }

    pub fn spec(&self) -> SamplerSpec {
        SamplerSpec {
            values: self.profile.values.clone(),
            budget: self.budget,
            seed: self.seed,
            construction: Some(self.construction()),
        }
    }

    /// Same construction with a different seed.
    pub fn reseeded(&self, seed: u64) -> Self {
        EquilibriumSampler {
            seed,
            streams: CounterRng::new(seed, Domain::Sampler),
            ..self.clone()
        }
    }

    /// Draw number `index`.
    pub fn draw(&self, index: u64) -> Allocation {
        let mut out = vec![0.0; self.profile.len()];
        self.draw_into(index, &mut out);
        Allocation::from_parts(out, self.budget)
    }

    /// Writes draw number `index` (in budget units) into `out`.
    pub fn draw_into(&self, index: u64, out: &mut [f64]) {
        self.draw_unit_into(index, out);
        for x in out.iter_mut() {
            *x *= self.budget;
        }
    }

    /// Draw number `index` for a budget of 1.
    pub fn draw_unit_into(&self, index: u64, out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        match &self.kind {
            Kind::AllIn(target) => out[*target] = 1.0,
            Kind::Triangle(tri) => {
                let (height, angle) = hemisphere_point(&mut self.streams.stream(index));
                let mut shares = [0.0; 3];
                tri.area_shares(height, angle, &mut shares);
                for (&node, s) in self.active.iter().zip(shares) {
                    out[node] = s;
                }
            }
            Kind::Polygon(poly) => {
                let (height, angle) = hemisphere_point(&mut self.streams.stream(index));
                let rho = (1.0 - height * height).sqrt();
                let p = [rho * angle.cos(), rho * angle.sin()];
                for (slot, h) in poly.order.iter().zip(poly.side_distances(p)) {
                    if let Some(k) = *slot {
                        out[self.active[k]] = self.active_values[k] * h;
                    }
                }
            }
            Kind::Cyclic(poly) => {
                let (height, angle) = hemisphere_point(&mut self.streams.stream(index));
                let rho = (1.0 - height * height).sqrt();
                let p = [rho * angle.cos(), rho * angle.sin()];
                for (k, w) in poly.side_weights(p).enumerate() {
                    out[self.active[k]] = self.active_values[k] * w;
                }
            }
            Kind::Approximate(caps) => {
                let mut rng = self.streams.stream(index);
                let mut x: Vec<f64> = caps.iter().map(|c| c * rng.gen::<f64>()).collect();
                project_to_capped_simplex(&mut x, caps);
                for (&node, v) in self.active.iter().zip(x) {
                    out[node] = v;
                }
            }
        }
    }
}

/// Tangential polygon if an ordering works, then an inscribed polygon,
/// then the approximate fallback.
pub fn build_polygon_sampler(profile: ValuationProfile, budget: f64, seed: u64) -> Result<EquilibriumSampler> {
    check_budget(budget)?;
    let active = profile.active();
    let reduced = renormalized(&profile, &active);
    require_general(&reduced)?;
    let kind = polygon_or_fallback(&reduced);
    EquilibriumSampler::with_kind(profile, budget, seed, kind)
}

fn polygon_or_fallback(reduced: &[f64]) -> Kind {
    match TangentialPolygon::search(reduced) {
        Some(p) => Kind::Polygon(p),
        None => match CyclicPolygon::new(reduced) {
            Some(c) => Kind::Cyclic(c),
            None => Kind::Approximate(reduced.iter().map(|a| 2.0 * a).collect()),
        },
    }
}

fn require_general(reduced: &[f64]) -> Result<()> {
    if reduced.len() < 3 || reduced.iter().any(|&a| a >= 0.5) {
        return Err(Error::DegenerateProfile(format!(
            "mixed constructions need at least 3 non-null values below 1/2, got {reduced:?}"
        )));
    }
    Ok(())
}

fn check_budget(budget: f64) -> Result<()> {
    if !(budget.is_finite() && budget > 0.0) {
        return Err(Error::InvalidArgument(format!("budget must be positive, got {budget}")));
    }
    Ok(())
}

fn renormalized(profile: &ValuationProfile, active: &[usize]) -> Vec<f64> {
    let total: f64 = active.iter().map(|&i| profile.values[i]).sum();
    active.iter().map(|&i| profile.values[i] / total).collect()
}

/// Index of the largest value, lowest index on ties.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Alternating projections between the box `[0, caps]` and the hyperplane
/// `Σx = 1`, finished by an exact projection onto their intersection.
fn project_to_capped_simplex(x: &mut [f64], caps: &[f64]) {
    let n = x.len() as f64;
    for _ in 0..PROJECTION_ROUNDS {
        let shift = (1.0 - x.iter().sum::<f64>()) / n;
        for (v, c) in x.iter_mut().zip(caps) {
            *v = (*v + shift).clamp(0.0, *c);
        }
        if (x.iter().sum::<f64>() - 1.0).abs() < PROJECTION_TOLERANCE {
            return;
        }
    }
    // Σ clamp(x + λ) is monotone in λ; bisect for the exact total.
    let total = |lambda: f64, x: &[f64]| -> f64 {
        x.iter().zip(caps).map(|(v, c)| (v + lambda).clamp(0.0, *c)).sum()
    };
    let (mut lo, mut hi) = (-1.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid, x) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    for (v, c) in x.iter_mut().zip(caps) {
        *v = (*v + lambda).clamp(0.0, *c);
    }
}
