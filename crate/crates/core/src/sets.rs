//! Candidate invariant sets: axis-aligned rectangles and smooth inequality
//! sets `{z : phi_k(z) <= 0 for all k}`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Default population floor for population rectangles.
pub const DEFAULT_POPULATION_FLOOR: f64 = 1e-9;

/// Default absolute tolerance for deciding that a coordinate sits on a bound.
pub const ACTIVE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Lower => "lower",
            Side::Upper => "upper",
        })
    }
}

/// One face of a rectangle: coordinate `axis` pinned at its `side` bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Face {
    pub axis: usize,
    pub side: Side,
}

impl Face {
    /// Faces are numbered `2*axis` (lower) and `2*axis + 1` (upper).
    pub fn from_index(index: usize) -> Self {
        Face {
            axis: index / 2,
            side: if index % 2 == 0 { Side::Lower } else { Side::Upper },
        }
    }

    pub fn index(&self) -> usize {
        2 * self.axis + usize::from(self.side == Side::Upper)
    }

    /// Rate of the field across this face, positive when pointing outward.
    pub fn outward_rate(&self, dx: &[f64]) -> f64 {
        match self.side {
            Side::Upper => dx[self.axis],
            Side::Lower => -dx[self.axis],
        }
    }
}

/// Constraints satisfied with equality at a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActiveSet {
    /// Rectangle faces; `lower` and `upper` are disjoint.
    Faces { lower: Vec<usize>, upper: Vec<usize> },
    /// Indices of active smooth constraints.
    Constraints(Vec<usize>),
}

impl ActiveSet {
    pub fn is_empty(&self) -> bool {
        match self {
            ActiveSet::Faces { lower, upper } => lower.is_empty() && upper.is_empty(),
            ActiveSet::Constraints(k) => k.is_empty(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ActiveSet::Faces { lower, upper } => lower.len() + upper.len(),
            ActiveSet::Constraints(k) => k.len(),
        }
    }

    /// Active rectangle faces ordered by face index. Empty for smooth sets.
    pub fn faces(&self) -> Vec<Face> {
        match self {
            ActiveSet::Faces { lower, upper } => {
                let mut faces: Vec<Face> = lower
                    .iter()
                    .map(|&axis| Face { axis, side: Side::Lower })
                    .chain(upper.iter().map(|&axis| Face { axis, side: Side::Upper }))
                    .collect();
                faces.sort();
                faces
            }
            ActiveSet::Constraints(_) => Vec::new(),
        }
    }
}

/// Membership and active-constraint queries shared by both set kinds.
pub trait StateSet: Sync {
    fn dim(&self) -> usize;
    fn contains(&self, point: &[f64], tol: f64) -> Result<bool>;
    fn active_set(&self, point: &[f64], tol: f64) -> Result<ActiveSet>;
}

/// Closed box `lower_j <= z_j <= upper_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectangularSet {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl RectangularSet {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        if lower.is_empty() {
            return Err(Error::InvalidSet("rectangle needs at least one axis".into()));
        }
        for (j, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !l.is_finite() || !u.is_finite() || !(l < u) {
                return Err(Error::InvalidSet(format!(
                    "axis {}: lower bound {l} must be strictly below upper bound {u}",
                    j + 1
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// Same bounds `[nl, nu]` on every one of `n` axes.
    pub fn symmetric(n: usize, nl: f64, nu: f64) -> Result<Self> {
        Self::new(vec![nl; n], vec![nu; n])
    }

    /// A rectangle of strictly positive populations: every lower bound must
    /// be at least `floor`.
    pub fn population(lower: Vec<f64>, upper: Vec<f64>, floor: f64) -> Result<Self> {
        let rect = Self::new(lower, upper)?;
        rect.require_population(floor)?;
        Ok(rect)
    }

    pub fn require_population(&self, floor: f64) -> Result<()> {
        if let Some(j) = self.lower.iter().position(|&l| l < floor) {
            return Err(Error::InvalidSet(format!(
                "axis {}: lower bound {} is below the population floor eps2 = {floor}",
                j + 1,
                self.lower[j]
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn bound(&self, face: Face) -> f64 {
        match face.side {
            Side::Lower => self.lower[face.axis],
            Side::Upper => self.upper[face.axis],
        }
    }

    /// Largest signed distance outside the box over all coordinates,
    /// negative for interior points, with the coordinate and side attaining it.
    pub fn excursion(&self, point: &[f64]) -> (f64, Face) {
        let mut best = (f64::NEG_INFINITY, Face { axis: 0, side: Side::Lower });
        for j in 0..self.dim() {
            for (d, side) in [
                (self.lower[j] - point[j], Side::Lower),
                (point[j] - self.upper[j], Side::Upper),
            ] {
                if d > best.0 {
                    best = (d, Face { axis: j, side });
                }
            }
        }
        best
    }

    /// The `2^n` corners, lower before upper with the last axis varying fastest.
    pub fn vertex_set(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..1usize << n)
            .map(|mask| {
                (0..n)
                    .map(|j| {
                        if mask >> (n - 1 - j) & 1 == 1 {
                            self.upper[j]
                        } else {
                            self.lower[j]
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Lazily enumerates a uniform grid on every face.
    pub fn boundary_grid(&self, resolution: usize) -> Result<BoundaryGrid<'_>> {
        if resolution < 2 {
            return Err(Error::InvalidArgument(format!(
                "boundary grid resolution must be at least 2, got {resolution}"
            )));
        }
        Ok(BoundaryGrid {
            rect: self,
            resolution,
            face: 0,
            face_end: 2 * self.dim(),
            next: 0,
            per_face: resolution.pow(self.dim() as u32 - 1),
        })
    }

    /// Grid on one face only, for callers that split work across faces.
    pub fn face_grid(&self, face: Face, resolution: usize) -> Result<BoundaryGrid<'_>> {
        let mut grid = self.boundary_grid(resolution)?;
        if face.axis >= self.dim() {
            return Err(Error::InvalidArgument(format!("no face on axis {}", face.axis + 1)));
        }
        grid.face = face.index();
        grid.face_end = grid.face + 1;
        Ok(grid)
    }

    /// Grid coordinate `k` of `resolution` along `axis`; endpoints are exact.
    fn grid_coord(&self, axis: usize, k: usize, resolution: usize) -> f64 {
        if k == 0 {
            self.lower[axis]
        } else if k + 1 == resolution {
            self.upper[axis]
        } else {
            let t = k as f64 / (resolution - 1) as f64;
            self.lower[axis] + (self.upper[axis] - self.lower[axis]) * t
        }
    }

    /// The same box as `2n` affine constraints `l_j - z_j <= 0`, `z_j - u_j <= 0`,
    /// ordered by face index.
    pub fn to_smooth(&self) -> SmoothSet {
        let n = self.dim();
        let constraints = (0..2 * n)
            .map(|idx| {
                let face = Face::from_index(idx);
                let b = self.bound(face);
                let sign = if face.side == Side::Upper { 1.0 } else { -1.0 };
                SmoothConstraint::new(
                    move |z: &[f64]| sign * (z[face.axis] - b),
                    move |z: &[f64]| {
                        let mut g = vec![0.0; z.len()];
                        g[face.axis] = sign;
                        g
                    },
                )
            })
            .collect();
        SmoothSet { dim: n, constraints }
    }
}

impl StateSet for RectangularSet {
    fn dim(&self) -> usize {
        self.lower.len()
    }

    fn contains(&self, point: &[f64], tol: f64) -> Result<bool> {
        check_dim(self.dim(), point.len())?;
        Ok(point
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(x, (l, u))| l - tol <= *x && *x <= u + tol))
    }

    fn active_set(&self, point: &[f64], tol: f64) -> Result<ActiveSet> {
        if !self.contains(point, tol)? {
            return Err(Error::Precondition(format!(
                "point {point:?} lies outside the rectangle"
            )));
        }
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for (j, x) in point.iter().enumerate() {
            if (x - self.upper[j]).abs() <= tol {
                upper.push(j);
            } else if (x - self.lower[j]).abs() <= tol {
                lower.push(j);
            }
        }
        Ok(ActiveSet::Faces { lower, upper })
    }
}

/// Streamed boundary samples of a rectangle, face by face. Edge and corner
/// points are produced once per face they lie on, each time with the full
/// active set of the point.
#[derive(Debug, Clone)]
pub struct BoundaryGrid<'a> {
    rect: &'a RectangularSet,
    resolution: usize,
    face: usize,
    face_end: usize,
    next: usize,
    per_face: usize,
}

impl Iterator for BoundaryGrid<'_> {
    type Item = (Vec<f64>, ActiveSet);

    fn next(&mut self) -> Option<Self::Item> {
        if self.face >= self.face_end {
            return None;
        }
        let face = Face::from_index(self.face);
        let n = self.rect.dim();
        let mut point = vec![0.0; n];
        // Mixed-radix decode of `next`, last free axis fastest.
        let mut rem = self.next;
        for j in (0..n).rev() {
            if j == face.axis {
                point[j] = self.rect.bound(face);
            } else {
                let k = rem % self.resolution;
                rem /= self.resolution;
                point[j] = self.rect.grid_coord(j, k, self.resolution);
            }
        }
        self.next += 1;
        if self.next == self.per_face {
            self.next = 0;
            self.face += 1;
        }
        let active = self
            .rect
            .active_set(&point, 0.0)
            .expect("grid points lie in the rectangle");
        Some((point, active))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.face_end.saturating_sub(self.face)) * self.per_face - self.next.min(self.per_face);
        (left, Some(left))
    }
}

impl ExactSizeIterator for BoundaryGrid<'_> {}

type ScalarFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradientFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// A continuously differentiable constraint `phi(z) <= 0` with its gradient.
#[derive(Clone)]
pub struct SmoothConstraint {
    value: Arc<ScalarFn>,
    gradient: Arc<GradientFn>,
}

impl SmoothConstraint {
    pub fn new(
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            gradient: Arc::new(gradient),
        }
    }

    pub fn value(&self, z: &[f64]) -> f64 {
        (self.value)(z)
    }

    pub fn gradient(&self, z: &[f64]) -> Vec<f64> {
        (self.gradient)(z)
    }
}

impl fmt::Debug for SmoothConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SmoothConstraint { .. }")
    }
}

/// Relative error allowed between a supplied gradient and central differences.
pub const GRADIENT_CHECK_TOL: f64 = 1e-4;
const GRADIENT_CHECK_STEP: f64 = 1e-6;

/// Closed set `{z : phi_k(z) <= 0 for every k}`.
#[derive(Debug, Clone)]
pub struct SmoothSet {
    dim: usize,
    constraints: Vec<SmoothConstraint>,
}

impl SmoothSet {
    pub fn new(dim: usize, constraints: Vec<SmoothConstraint>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSet("smooth set needs a positive dimension".into()));
        }
        if constraints.is_empty() {
            return Err(Error::InvalidSet("smooth set needs at least one constraint".into()));
        }
        Ok(Self { dim, constraints })
    }

    /// Builds the set and checks every gradient against central differences
    /// at `samples` seeded random points of the box `[lo, hi]^dim`.
    pub fn checked(
        dim: usize,
        constraints: Vec<SmoothConstraint>,
        lo: f64,
        hi: f64,
        samples: usize,
        seed: u64,
    ) -> Result<Self> {
        let set = Self::new(dim, constraints)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let z: Vec<f64> = (0..dim).map(|_| rng.gen_range(lo..=hi)).collect();
            set.check_gradients_at(&z)?;
        }
        Ok(set)
    }

    pub fn check_gradients_at(&self, z: &[f64]) -> Result<()> {
        check_dim(self.dim, z.len())?;
        for (k, c) in self.constraints.iter().enumerate() {
            let g = c.gradient(z);
            check_dim(self.dim, g.len())?;
            let scale = g.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
            let mut probe = z.to_vec();
            for i in 0..self.dim {
                let h = GRADIENT_CHECK_STEP * z[i].abs().max(1.0);
                probe[i] = z[i] + h;
                let up = c.value(&probe);
                probe[i] = z[i] - h;
                let down = c.value(&probe);
                probe[i] = z[i];
                let fd = (up - down) / (2.0 * h);
                if (fd - g[i]).abs() > GRADIENT_CHECK_TOL * scale {
                    return Err(Error::InvalidSet(format!(
                        "constraint {}: gradient component {} is {} but central difference gives {fd}",
                        k + 1,
                        i + 1,
                        g[i]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constraints(&self) -> &[SmoothConstraint] {
        &self.constraints
    }
}

impl StateSet for SmoothSet {
    fn dim(&self) -> usize {
        self.dim
    }

    fn contains(&self, point: &[f64], tol: f64) -> Result<bool> {
        check_dim(self.dim, point.len())?;
        Ok(self.constraints.iter().all(|c| c.value(point) <= tol))
    }

    fn active_set(&self, point: &[f64], tol: f64) -> Result<ActiveSet> {
        if !self.contains(point, tol)? {
            return Err(Error::Precondition(format!(
                "point {point:?} lies outside the smooth set"
            )));
        }
        Ok(ActiveSet::Constraints(
            self.constraints
                .iter()
                .enumerate()
                .filter(|(_, c)| c.value(point).abs() <= tol)
                .map(|(k, _)| k)
                .collect(),
        ))
    }
}
