//! Parameter sets and Euclidean projections.
//!
//! The admissible parameter region is either a single closed convex set (box,
//! ball, or bounded polytope) or a finite union of such sets. Projection is
//! defined per convex member only; the union variant is a container and each
//! estimator owns exactly one convex member.

use nalgebra::DVector;
use rand::Rng;

use crate::error::CoreError;
use crate::Result;

/// Iteration cap for the alternating-projection (Dykstra) loop.
pub const DYKSTRA_MAX_ITERS: usize = 10_000;
/// Convergence tolerance for the Dykstra loop.
pub const DYKSTRA_TOL: f64 = 1e-10;

/// Half-space `{x : normal·x ≤ offset}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: DVector<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: DVector<f64>, offset: f64) -> Self {
        Halfspace { normal, offset }
    }

    fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        let nn = self.normal.dot(&self.normal);
        if nn <= 1e-300 {
            return x.clone();
        }
        let slack = self.normal.dot(x) - self.offset;
        if slack <= 0.0 {
            x.clone()
        } else {
            x - &self.normal * (slack / nn)
        }
    }

    fn violation(&self, x: &DVector<f64>) -> f64 {
        (self.normal.dot(x) - self.offset).max(0.0)
    }
}

/// A closed, bounded, convex parameter set with a well-defined projection.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexParamSet {
    /// Per-coordinate interval bounds.
    Box { lower: DVector<f64>, upper: DVector<f64> },
    /// Euclidean ball.
    Ball { center: DVector<f64>, radius: f64 },
    /// Bounded intersection of half-spaces. Certified nonempty and bounded
    /// at construction; carries the probe bounding box.
    Polytope {
        halfspaces: Vec<Halfspace>,
        bbox_lower: DVector<f64>,
        bbox_upper: DVector<f64>,
    },
}

impl ConvexParamSet {
    /// Box with `lower ≤ upper` per coordinate.
    pub fn box_set(lower: DVector<f64>, upper: DVector<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(CoreError::dim("box bounds of unequal length"));
        }
        if lower.is_empty() {
            return Err(CoreError::SetConstruction { message: "empty box bounds".into() });
        }
        for i in 0..lower.len() {
            if !(lower[i] <= upper[i]) {
                return Err(CoreError::SetConstruction {
                    message: format!("box bound lower[{i}]={} > upper[{i}]={}", lower[i], upper[i]),
                });
            }
        }
        Ok(ConvexParamSet::Box { lower, upper })
    }

    /// Ball with `radius ≥ 0`.
    pub fn ball(center: DVector<f64>, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(CoreError::SetConstruction {
                message: format!("ball radius must be finite and nonnegative, got {radius}"),
            });
        }
        Ok(ConvexParamSet::Ball { center, radius })
    }

    /// Bounded polytope from a half-space list.
    ///
    /// Nonemptiness and boundedness are certified by a probe: alternating
    /// projections locate a feasible point, then far points along every axis
    /// direction are projected back onto the set. If any projected probe
    /// escapes the probe radius scale the set is declared unbounded; the probe
    /// extents double as the stored bounding box.
    pub fn polytope(halfspaces: Vec<Halfspace>) -> Result<Self> {
        if halfspaces.is_empty() {
            return Err(CoreError::SetConstruction {
                message: "polytope needs at least one halfspace".into(),
            });
        }
        let dim = halfspaces[0].normal.len();
        if dim == 0 || halfspaces.iter().any(|h| h.normal.len() != dim) {
            return Err(CoreError::dim("halfspace normals of inconsistent length"));
        }

        // Feasibility probe: alternating projections from the origin converge
        // to a feasible point iff the intersection is nonempty.
        let feasible = alternating_feasible(&halfspaces, &DVector::zeros(dim))?;

        const PROBE_RADIUS: f64 = 1e8;
        const ESCAPE: f64 = 1e6;
        let mut bbox_lower = DVector::from_element(dim, f64::INFINITY);
        let mut bbox_upper = DVector::from_element(dim, f64::NEG_INFINITY);
        for i in 0..dim {
            for sign in [-1.0, 1.0] {
                let mut probe = feasible.clone();
                probe[i] += sign * PROBE_RADIUS;
                let landed = dykstra(&halfspaces, &probe)?;
                if landed.amax() > ESCAPE {
                    return Err(CoreError::SetConstruction {
                        message: format!(
                            "polytope unbounded: probe along axis {i} landed at norm {:.3e}",
                            landed.norm()
                        ),
                    });
                }
                for j in 0..dim {
                    bbox_lower[j] = bbox_lower[j].min(landed[j]);
                    bbox_upper[j] = bbox_upper[j].max(landed[j]);
                }
            }
        }
        Ok(ConvexParamSet::Polytope { halfspaces, bbox_lower, bbox_upper })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexParamSet::Box { lower, .. } => lower.len(),
            ConvexParamSet::Ball { center, .. } => center.len(),
            ConvexParamSet::Polytope { halfspaces, .. } => halfspaces[0].normal.len(),
        }
    }

    /// Euclidean projection onto the set.
    ///
    /// Boxes and balls use the closed form; polytopes run Dykstra's
    /// alternating projections to tolerance [`DYKSTRA_TOL`].
    pub fn project(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.dim() {
            return Err(CoreError::dim(format!(
                "projection input has length {}, set dimension is {}",
                x.len(),
                self.dim()
            )));
        }
        match self {
            ConvexParamSet::Box { lower, upper } => {
                let mut out = x.clone();
                for i in 0..out.len() {
                    out[i] = out[i].clamp(lower[i], upper[i]);
                }
                Ok(out)
            }
            ConvexParamSet::Ball { center, radius } => {
                let delta = x - center;
                let norm = delta.norm();
                if norm <= *radius {
                    Ok(x.clone())
                } else {
                    Ok(center + delta * (radius / norm))
                }
            }
            ConvexParamSet::Polytope { halfspaces, .. } => dykstra(halfspaces, x),
        }
    }

    /// Distance from `x` to the set.
    pub fn distance(&self, x: &DVector<f64>) -> Result<f64> {
        Ok((x - self.project(x)?).norm())
    }

    /// Membership within tolerance `tol`.
    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> Result<bool> {
        Ok(self.distance(x)? <= tol)
    }

    /// Upper bound on `sup {‖x‖ : x ∈ set}` (Frobenius norm on flattenings).
    ///
    /// Exact for boxes and balls; for polytopes it is the corner bound of the
    /// probe bounding box.
    pub fn norm_bound(&self) -> f64 {
        match self {
            ConvexParamSet::Box { lower, upper } => corner_norm(lower, upper),
            ConvexParamSet::Ball { center, radius } => center.norm() + radius,
            ConvexParamSet::Polytope { bbox_lower, bbox_upper, .. } => {
                corner_norm(bbox_lower, bbox_upper)
            }
        }
    }

    /// A point in the set usable as a default estimate.
    pub fn center_point(&self) -> Result<DVector<f64>> {
        match self {
            ConvexParamSet::Box { lower, upper } => Ok((lower + upper) * 0.5),
            ConvexParamSet::Ball { center, .. } => Ok(center.clone()),
            ConvexParamSet::Polytope { bbox_lower, bbox_upper, .. } => {
                self.project(&((bbox_lower + bbox_upper) * 0.5))
            }
        }
    }

    /// Draw a point of the set, uniformly for boxes, by rejection-free
    /// constructions otherwise.
    pub fn sample_point<R: Rng>(&self, rng: &mut R) -> Result<DVector<f64>> {
        match self {
            ConvexParamSet::Box { lower, upper } => {
                let mut out = lower.clone();
                for i in 0..out.len() {
                    out[i] = lower[i] + rng.random_range(0.0..=1.0) * (upper[i] - lower[i]);
                }
                Ok(out)
            }
            ConvexParamSet::Ball { center, radius } => {
                let dim = center.len();
                let mut dir = DVector::zeros(dim);
                loop {
                    for i in 0..dim {
                        dir[i] = rng.random_range(-1.0..=1.0);
                    }
                    let n = dir.norm();
                    if n > 1e-6 {
                        dir /= n;
                        break;
                    }
                }
                let u: f64 = rng.random_range(0.0..=1.0);
                let scale = radius * u.powf(1.0 / dim as f64);
                Ok(center + dir * scale)
            }
            ConvexParamSet::Polytope { bbox_lower, bbox_upper, .. } => {
                let mut raw = bbox_lower.clone();
                for i in 0..raw.len() {
                    raw[i] = bbox_lower[i]
                        + rng.random_range(0.0..=1.0) * (bbox_upper[i] - bbox_lower[i]);
                }
                self.project(&raw)
            }
        }
    }
}

fn corner_norm(lower: &DVector<f64>, upper: &DVector<f64>) -> f64 {
    let mut sq = 0.0;
    for i in 0..lower.len() {
        let extreme = lower[i].abs().max(upper[i].abs());
        sq += extreme * extreme;
    }
    sq.sqrt()
}

/// Dykstra's alternating projection onto an intersection of half-spaces.
fn dykstra(halfspaces: &[Halfspace], x0: &DVector<f64>) -> Result<DVector<f64>> {
    let mut x = x0.clone();
    let mut corrections = vec![DVector::zeros(x0.len()); halfspaces.len()];
    let mut worst = f64::INFINITY;
    for _ in 0..DYKSTRA_MAX_ITERS {
        let mut shift = 0.0f64;
        for (h, corr) in halfspaces.iter().zip(corrections.iter_mut()) {
            let y = &x + &*corr;
            let projected = h.project(&y);
            *corr = &y - &projected;
            shift = shift.max((&projected - &x).norm());
            x = projected;
        }
        worst = halfspaces.iter().map(|h| h.violation(&x)).fold(0.0f64, f64::max);
        if worst <= DYKSTRA_TOL && shift <= DYKSTRA_TOL {
            return Ok(x);
        }
    }
    Err(CoreError::NonConvergence { iterations: DYKSTRA_MAX_ITERS, residual: worst })
}

/// Plain alternating projections; converges to a feasible point when the
/// intersection is nonempty.
fn alternating_feasible(halfspaces: &[Halfspace], x0: &DVector<f64>) -> Result<DVector<f64>> {
    let mut x = x0.clone();
    for _ in 0..DYKSTRA_MAX_ITERS {
        for h in halfspaces {
            x = h.project(&x);
        }
        let worst = halfspaces.iter().map(|h| h.violation(&x)).fold(0.0f64, f64::max);
        if worst <= DYKSTRA_TOL {
            return Ok(x);
        }
    }
    let worst = halfspaces.iter().map(|h| h.violation(&x)).fold(0.0f64, f64::max);
    Err(CoreError::SetConstruction {
        message: format!("polytope appears empty: residual {worst:.3e} after feasibility probe"),
    })
}

/// Admissible parameter region: one convex set or a finite union of them.
#[derive(Debug, Clone, PartialEq)]
pub enum ParameterSet {
    Convex(ConvexParamSet),
    Union(Vec<ConvexParamSet>),
}

impl ParameterSet {
    pub fn dim(&self) -> usize {
        match self {
            ParameterSet::Convex(s) => s.dim(),
            ParameterSet::Union(members) => members.first().map_or(0, |m| m.dim()),
        }
    }

    /// Union must be nonempty and dimensionally consistent.
    pub fn union(members: Vec<ConvexParamSet>) -> Result<Self> {
        if members.is_empty() {
            return Err(CoreError::SetConstruction { message: "union of zero members".into() });
        }
        let dim = members[0].dim();
        if members.iter().any(|m| m.dim() != dim) {
            return Err(CoreError::dim("union members of inconsistent dimension"));
        }
        Ok(ParameterSet::Union(members))
    }

    /// Distance to the region (minimum over members for a union).
    pub fn distance(&self, x: &DVector<f64>) -> Result<f64> {
        match self {
            ParameterSet::Convex(s) => s.distance(x),
            ParameterSet::Union(members) => {
                let mut best = f64::INFINITY;
                for m in members {
                    best = best.min(m.distance(x)?);
                }
                Ok(best)
            }
        }
    }

    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> Result<bool> {
        Ok(self.distance(x)? <= tol)
    }

    /// Upper bound on the norm of any member point.
    pub fn norm_bound(&self) -> f64 {
        match self {
            ParameterSet::Convex(s) => s.norm_bound(),
            ParameterSet::Union(members) => {
                members.iter().map(|m| m.norm_bound()).fold(0.0f64, f64::max)
            }
        }
    }

    pub fn members(&self) -> Vec<&ConvexParamSet> {
        match self {
            ParameterSet::Convex(s) => vec![s],
            ParameterSet::Union(members) => members.iter().collect(),
        }
    }
}

/// Euclidean projection onto a convex member, as a free function.
pub fn project(x: &DVector<f64>, set: &ConvexParamSet) -> Result<DVector<f64>> {
    set.project(x)
}
