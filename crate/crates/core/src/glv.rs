//! The n-species Gause-Lotka-Volterra model
//!
//! ```text
//! dN_i/dt = r_i N_i (1 - sum_j alpha_ij N_j)
//! ```
//!
//! together with its sign-based index sets and the cyclic three-species
//! May-Leonard instance.

use crate::error::{check_dim, Error, Result};
use crate::field::VectorField;

/// Default positivity floor on the May-Leonard competition coefficients.
pub const DEFAULT_COEFF_FLOOR: f64 = 1e-9;

/// `|1 - alpha*beta|` below this makes the two-species equilibria undefined.
pub const SINGULARITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GlvParameters {
    r: Vec<f64>,
    /// Row-major `n x n`.
    alpha: Vec<f64>,
}

impl GlvParameters {
    /// Builds a model from growth rates and a competition matrix.
    ///
    /// Zero growth rates are accepted here; the decision procedures reject
    /// them with [`Error::ModelDegenerate`].
    pub fn new(r: Vec<f64>, alpha: Vec<Vec<f64>>) -> Result<Self> {
        let n = r.len();
        if n == 0 {
            return Err(Error::InvalidArgument("model needs at least one species".into()));
        }
        check_dim(n, alpha.len())?;
        let mut flat = Vec::with_capacity(n * n);
        for row in &alpha {
            check_dim(n, row.len())?;
            flat.extend_from_slice(row);
        }
        if r.iter().chain(flat.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("model entries must be finite".into()));
        }
        Ok(Self { r, alpha: flat })
    }

    pub fn n(&self) -> usize {
        self.r.len()
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn alpha(&self, i: usize, j: usize) -> f64 {
        self.alpha[i * self.n() + j]
    }

    pub fn alpha_row(&self, i: usize) -> &[f64] {
        let n = self.n();
        &self.alpha[i * n..(i + 1) * n]
    }

    pub fn alpha_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n()).map(|i| self.alpha_row(i).to_vec()).collect()
    }

    /// Copy of the model with the diagonal replaced by `diag`.
    pub fn with_diagonal(&self, diag: &[f64]) -> Result<Self> {
        check_dim(self.n(), diag.len())?;
        let mut out = self.clone();
        let n = self.n();
        for (i, d) in diag.iter().enumerate() {
            out.alpha[i * n + i] = *d;
        }
        Ok(out)
    }

    /// The bracket `1 - sum_j alpha_ij N_j`.
    pub fn bracket(&self, i: usize, state: &[f64]) -> f64 {
        1.0 - self
            .alpha_row(i)
            .iter()
            .zip(state)
            .map(|(a, x)| a * x)
            .sum::<f64>()
    }

    pub(crate) fn require_nonzero_rates(&self) -> Result<()> {
        match self.r.iter().position(|&r| r == 0.0) {
            Some(i) => Err(Error::ModelDegenerate(format!(
                "growth rate r_{} is zero",
                i + 1
            ))),
            None => Ok(()),
        }
    }
}

/// Evaluates the GLV right-hand side at `state`.
pub fn vector_field(params: &GlvParameters, state: &[f64]) -> Result<Vec<f64>> {
    check_dim(params.n(), state.len())?;
    if state.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("state entries must be finite".into()));
    }
    Ok(params.rate_vec(state))
}

impl VectorField for GlvParameters {
    fn dim(&self) -> usize {
        self.n()
    }

    fn rate(&self, x: &[f64], dx: &mut [f64]) {
        for i in 0..self.n() {
            dx[i] = self.r[i] * x[i] * self.bracket(i, x);
        }
    }
}

/// Sign-based index sets. Indices are zero-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSets {
    /// `a_plus[i]` holds every `j` with `alpha_ij > 0`.
    pub a_plus: Vec<Vec<usize>>,
    /// `a_minus[i]` holds every `j` with `alpha_ij < 0`.
    pub a_minus: Vec<Vec<usize>>,
    pub r_plus: Vec<usize>,
    pub r_minus: Vec<usize>,
}

pub fn build_index_sets(params: &GlvParameters) -> Result<IndexSets> {
    params.require_nonzero_rates()?;
    let n = params.n();
    let mut a_plus = vec![Vec::new(); n];
    let mut a_minus = vec![Vec::new(); n];
    for i in 0..n {
        for (j, &a) in params.alpha_row(i).iter().enumerate() {
            if a > 0.0 {
                a_plus[i].push(j);
            } else if a < 0.0 {
                a_minus[i].push(j);
            }
        }
    }
    let (r_plus, r_minus) = (0..n).partition(|&i| params.r[i] > 0.0);
    Ok(IndexSets {
        a_plus,
        a_minus,
        r_plus,
        r_minus,
    })
}

/// May-Leonard coefficient pair with its positivity floor already checked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MayLeonardParams {
    pub alpha: f64,
    pub beta: f64,
}

impl MayLeonardParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        Self::with_floor(alpha, beta, DEFAULT_COEFF_FLOOR)
    }

    pub fn with_floor(alpha: f64, beta: f64, floor: f64) -> Result<Self> {
        if !(floor > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "coefficient floor eps1 must be positive, got {floor}"
            )));
        }
        for (name, v) in [("alpha", alpha), ("beta", beta)] {
            if !v.is_finite() || v < floor {
                return Err(Error::InvalidArgument(format!(
                    "{name} = {v} is below the coefficient floor eps1 = {floor}"
                )));
            }
        }
        Ok(Self { alpha, beta })
    }

    pub fn sum(&self) -> f64 {
        self.alpha + self.beta
    }

    pub fn to_glv(&self) -> GlvParameters {
        let (a, b) = (self.alpha, self.beta);
        GlvParameters {
            r: vec![1.0; 3],
            alpha: vec![1.0, a, b, b, 1.0, a, a, b, 1.0],
        }
    }
}

/// The cyclic three-species model with unit growth and self-competition.
pub fn may_leonard(alpha: f64, beta: f64) -> Result<GlvParameters> {
    Ok(MayLeonardParams::new(alpha, beta)?.to_glv())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MayLeonardEquilibria {
    pub points: Vec<[f64; 3]>,
    /// Set when `alpha*beta = 1` and the two-species points were omitted.
    pub singular: bool,
}

/// Closed-form equilibria of the May-Leonard model, coexistence point last.
pub fn may_leonard_equilibria(alpha: f64, beta: f64) -> Result<MayLeonardEquilibria> {
    if !(alpha > 0.0 && beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "coefficients must be positive, got alpha = {alpha}, beta = {beta}"
        )));
    }
    let mut points = vec![
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
    ];
    let det = 1.0 - alpha * beta;
    let singular = det.abs() < SINGULARITY_TOL;
    if !singular {
        let p = (1.0 - alpha) / det;
        let q = (1.0 - beta) / det;
        points.push([p, q, 0.0]);
        points.push([0.0, p, q]);
        points.push([q, 0.0, p]);
    }
    let c = 1.0 / (1.0 + alpha + beta);
    points.push([c, c, c]);
    Ok(MayLeonardEquilibria { points, singular })
}

/// Local stability of the coexistence point: `alpha + beta < 2`, strict.
pub fn interior_equilibrium_stable(alpha: f64, beta: f64) -> bool {
    alpha + beta < 2.0
}
