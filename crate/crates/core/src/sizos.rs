//! Deciding whether bounded controls can make a set invariant
//! ("sustainizable over the set").

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::field::ControlledField;
use crate::glv::{GlvParameters, MayLeonardParams, DEFAULT_COEFF_FLOOR};
use crate::sets::{ActiveSet, Face, RectangularSet, SmoothSet, StateSet, DEFAULT_POPULATION_FLOOR};
use crate::sos::{
    check_population_bounds, face_conditions, lex_cmp, margin_id, Margin, Method, OutwardWitness, Verdict, WitnessFace,
    CLOSED_FORM_TOL, SAMPLE_TOL,
};

/// Admissible control values, one closed interval per control.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl ControlBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !l.is_finite() || !u.is_finite() || l > u {
                return Err(Error::InvalidArgument(format!(
                    "control {}: lower bound {l} must not exceed upper bound {u}",
                    i + 1
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval `[al, au]` for each of `p` controls.
    pub fn uniform(p: usize, al: f64, au: f64) -> Result<Self> {
        Self::new(vec![al; p], vec![au; p])
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Uniform grid of `resolution` values per axis; a degenerate axis
    /// contributes its single value.
    pub fn grid(&self, resolution: usize) -> Result<ControlGrid<'_>> {
        if resolution < 2 {
            return Err(Error::InvalidArgument(format!(
                "control resolution must be at least 2, got {resolution}"
            )));
        }
        let counts: Vec<usize> = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| if l == u { 1 } else { resolution })
            .collect();
        let total = counts.iter().product();
        Ok(ControlGrid {
            controls: self,
            counts,
            total,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ControlGrid<'a> {
    controls: &'a ControlBox,
    counts: Vec<usize>,
    total: usize,
}

impl ControlGrid<'_> {
    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Writes grid point `index` (last axis fastest) into `u`.
    pub fn point(&self, mut index: usize, u: &mut [f64]) {
        for j in (0..self.counts.len()).rev() {
            let c = self.counts[j];
            let k = index % c;
            index /= c;
            let (l, h) = (self.controls.lower[j], self.controls.upper[j]);
            u[j] = if c == 1 || k == 0 {
                l
            } else if k + 1 == c {
                h
            } else {
                l + (h - l) * (k as f64 / (c - 1) as f64)
            };
        }
    }
}

/// GLV model whose self-competition coefficients are controls.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcedGlv {
    base: GlvParameters,
    controls: ControlBox,
}

impl ForcedGlv {
    /// The diagonal of `base` is ignored; one control per species.
    pub fn new(base: GlvParameters, controls: ControlBox) -> Result<Self> {
        check_dim(base.n(), controls.len())?;
        if let Some(i) = controls.lower.iter().position(|&l| !(l > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "control {}: self-competition lower bound must be positive, got {}",
                i + 1,
                controls.lower[i]
            )));
        }
        Ok(Self { base, controls })
    }

    pub fn base(&self) -> &GlvParameters {
        &self.base
    }

    pub fn controls(&self) -> &ControlBox {
        &self.controls
    }

    pub(crate) fn rate_with(&self, x: &[f64], self_coeff: impl Fn(usize) -> f64, dx: &mut [f64]) {
        let n = self.base.n();
        for i in 0..n {
            let row = self.base.alpha_row(i);
            let sum: f64 = (0..n)
                .map(|j| if j == i { self_coeff(i) * x[i] } else { row[j] * x[j] })
                .sum();
            dx[i] = self.base.r()[i] * x[i] * (1.0 - sum);
        }
    }
}

impl ControlledField for ForcedGlv {
    fn dim(&self) -> usize {
        self.base.n()
    }

    fn controls(&self) -> usize {
        self.base.n()
    }

    fn rate(&self, x: &[f64], u: &[f64], dx: &mut [f64]) {
        self.rate_with(x, |i| u[i], dx)
    }
}

/// Closed-form decision: on every face the least favourable state is a face
/// vertex and the best admissible control is a box endpoint.
pub fn sizos_rect_glv(forced: &ForcedGlv, rect: &RectangularSet) -> Result<Verdict> {
    sizos_rect_glv_with_floor(forced, rect, DEFAULT_POPULATION_FLOOR)
}

pub fn sizos_rect_glv_with_floor(forced: &ForcedGlv, rect: &RectangularSet, floor: f64) -> Result<Verdict> {
    let params = &forced.base;
    check_dim(params.n(), rect.dim())?;
    rect.require_population(floor)?;
    params.require_nonzero_rates()?;
    let (lo, hi) = (&forced.controls.lower, &forced.controls.upper);
    let margins = face_conditions(params, rect, |i, sign| if sign > 0.0 { hi[i] } else { lo[i] })
        .into_iter()
        .map(|c| Margin {
            id: margin_id(c.face, params.r()[c.face.axis]),
            value: c.margin,
        })
        .collect();
    Ok(verdict(Method::ClosedForm, CLOSED_FORM_TOL, margins))
}

fn verdict(method: Method, tolerance: f64, margins: Vec<Margin>) -> Verdict {
    Verdict {
        decision: margins.iter().all(|m| m.value <= tolerance),
        method,
        tolerance,
        margins,
        witness: None,
        samples: None,
    }
}

/// Smallest sufficient upper control and largest sufficient lower control
/// for the May-Leonard model on `[nl, nu]^3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlThresholds {
    pub au_min: f64,
    pub al_max: f64,
}

pub fn may_leonard_sizos_condition(
    alpha: f64,
    beta: f64,
    nl: f64,
    nu: f64,
    al: f64,
    au: f64,
) -> Result<(Verdict, ControlThresholds)> {
    let ml = MayLeonardParams::with_floor(alpha, beta, DEFAULT_COEFF_FLOOR)?;
    check_population_bounds(nl, nu, DEFAULT_POPULATION_FLOOR)?;
    if !(al > 0.0 && al <= au && au.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "control bounds must satisfy 0 < al <= au, got al = {al}, au = {au}"
        )));
    }
    let s = ml.sum();
    let margins = vec![
        Margin { id: "upper_face".into(), value: 1.0 - au * nu - s * nl },
        Margin { id: "lower_face".into(), value: -(1.0 - al * nl - s * nu) },
    ];
    let thresholds = ControlThresholds {
        au_min: (1.0 - s * nl) / nu,
        al_max: (1.0 - s * nu) / nl,
    };
    Ok((verdict(Method::ClosedForm, CLOSED_FORM_TOL, margins), thresholds))
}

/// Value of the boundary game and where it is attained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimaxOutcome {
    /// `max over boundary states of min over controls of max over active
    /// constraints` of the outward rate.
    pub margin: f64,
    pub state: Vec<f64>,
    pub face: WitnessFace,
    /// Minimizing control at `state`.
    pub control: Vec<f64>,
    pub tolerance: f64,
}

impl MinimaxOutcome {
    pub fn decision(&self) -> bool {
        self.margin <= self.tolerance
    }

    pub fn to_verdict(&self) -> Verdict {
        let mut v = verdict(
            Method::Minimax,
            self.tolerance,
            vec![Margin {
                id: "minimax".into(),
                value: self.margin,
            }],
        );
        if !v.decision {
            v.witness = Some(OutwardWitness {
                point: self.state.clone(),
                face: self.face,
                outward_rate: self.margin,
            });
        }
        v
    }
}

struct Search<'a, F: ?Sized> {
    field: &'a F,
    grid: ControlGrid<'a>,
    best: Option<MinimaxOutcome>,
    /// Minimizing control index at the previous state, tried first.
    warm: usize,
    u: Vec<f64>,
    dx: Vec<f64>,
}

impl<'a, F: ControlledField + ?Sized> Search<'a, F> {
    fn new(field: &'a F, controls: &'a ControlBox, control_resolution: usize) -> Result<Self> {
        check_dim(field.controls(), controls.len())?;
        Ok(Self {
            field,
            grid: controls.grid(control_resolution)?,
            best: None,
            warm: 0,
            u: vec![0.0; controls.len()],
            dx: vec![0.0; field.dim()],
        })
    }

    /// Inner `min over controls of max over active constraints`, abandoned as
    /// soon as it can no longer beat the incumbent outer maximum. Ties go to
    /// the lexicographically smaller state. Neighbouring boundary states tend
    /// to share their best control, so the previous minimizer is tried first.
    fn visit(&mut self, state: &[f64], rate: impl Fn(&[f64]) -> (f64, WitnessFace)) {
        let incumbent = self
            .best
            .as_ref()
            .map(|b| (b.margin, lex_cmp(state, &b.state).is_lt()));
        let loses = |inner: f64| match incumbent {
            None => false,
            Some((bar, wins_tie)) => inner < bar || (inner == bar && !wins_tie),
        };
        let warm = self.warm;
        let mut inner = f64::INFINITY;
        let mut arg = None;
        for idx in std::iter::once(warm).chain((0..self.grid.len()).filter(|&i| i != warm)) {
            self.grid.point(idx, &mut self.u);
            self.field.rate(state, &self.u, &mut self.dx);
            let (val, face) = rate(&self.dx);
            if val < inner {
                inner = val;
                arg = Some((face, idx));
                if loses(inner) {
                    self.warm = idx;
                    return;
                }
            }
        }
        if let Some((face, idx)) = arg {
            self.warm = idx;
            let mut control = vec![0.0; self.u.len()];
            self.grid.point(idx, &mut control);
            self.best = Some(MinimaxOutcome {
                margin: inner,
                state: state.to_vec(),
                face,
                control,
                tolerance: SAMPLE_TOL,
            });
        }
    }
}

/// Nested-grid evaluation of the boundary game on a rectangle: boundary grid
/// of `state_resolution` points per free axis, control grid of
/// `control_resolution` values per control axis.
pub fn minimax_margin_rect<F: ControlledField + ?Sized>(
    field: &F,
    rect: &RectangularSet,
    controls: &ControlBox,
    state_resolution: usize,
    control_resolution: usize,
) -> Result<MinimaxOutcome> {
    check_dim(rect.dim(), field.dim())?;
    let mut search = Search::new(field, controls, control_resolution)?;
    for (point, active) in rect.boundary_grid(state_resolution)? {
        let faces = active.faces();
        search.visit(&point, |dx| max_face_rate(&faces, dx));
    }
    search
        .best
        .ok_or_else(|| Error::InsufficientSamples("empty boundary grid".into()))
}

fn max_face_rate(faces: &[Face], dx: &[f64]) -> (f64, WitnessFace) {
    let mut best = (f64::NEG_INFINITY, WitnessFace::Rect(faces[0]));
    for &f in faces {
        let r = f.outward_rate(dx);
        if r > best.0 {
            best = (r, WitnessFace::Rect(f));
        }
    }
    best
}

/// Nested-grid evaluation of the boundary game on a smooth set over
/// caller-supplied boundary points. Points with no active constraint at
/// `active_tol` are skipped.
pub fn minimax_margin_smooth<F, I>(
    field: &F,
    set: &SmoothSet,
    boundary_points: I,
    controls: &ControlBox,
    control_resolution: usize,
    active_tol: f64,
) -> Result<MinimaxOutcome>
where
    F: ControlledField + ?Sized,
    I: IntoIterator<Item = Vec<f64>>,
{
    check_dim(set.dim(), field.dim())?;
    let mut search = Search::new(field, controls, control_resolution)?;
    for point in boundary_points {
        let active = match set.active_set(&point, active_tol) {
            Ok(ActiveSet::Constraints(k)) if !k.is_empty() => k,
            _ => continue,
        };
        let grads: Vec<(usize, Vec<f64>)> = active
            .into_iter()
            .map(|k| (k, set.constraints()[k].gradient(&point)))
            .collect();
        search.visit(&point, |dx| {
            let mut best = (f64::NEG_INFINITY, WitnessFace::Constraint { constraint: grads[0].0 });
            for (k, g) in &grads {
                let r: f64 = g.iter().zip(dx).map(|(a, b)| a * b).sum();
                if r > best.0 {
                    best = (r, WitnessFace::Constraint { constraint: *k });
                }
            }
            best
        });
    }
    search
        .best
        .ok_or_else(|| Error::InsufficientSamples("no boundary point with an active constraint".into()))
}
