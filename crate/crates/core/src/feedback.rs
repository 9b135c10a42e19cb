//! Saturating ramp feedback on the self-competition coefficients and the
//! autonomous closed loop it produces.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::field::VectorField;
use crate::sets::RectangularSet;
use crate::sizos::{sizos_rect_glv, ForcedGlv};

/// Default ramp width, in population units.
pub const DEFAULT_BAND_WIDTH: f64 = 0.001;

/// Default value on the middle band: the unforced self-competition.
pub const DEFAULT_NOMINAL: f64 = 1.0;

/// Continuous piecewise-linear law of the controlled species' own population:
/// `low_value` up to `b0`, a ramp to `nominal` on `[b0, b1]`, `nominal` on
/// `[b1, b2]`, a ramp to `high_value` on `[b2, b3]`, then `high_value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RampFeedback {
    pub control_index: usize,
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub low_value: f64,
    pub nominal: f64,
    pub high_value: f64,
}

impl RampFeedback {
    pub fn new(
        control_index: usize,
        breakpoints: [f64; 4],
        low_value: f64,
        nominal: f64,
        high_value: f64,
    ) -> Result<Self> {
        let [b0, b1, b2, b3] = breakpoints;
        if !(b0 < b1 && b1 <= b2 && b2 < b3) {
            return Err(Error::InvalidArgument(format!(
                "breakpoints must satisfy b0 < b1 <= b2 < b3, got {breakpoints:?}"
            )));
        }
        if ![low_value, nominal, high_value].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument("feedback values must be finite".into()));
        }
        Ok(Self {
            control_index,
            b0,
            b1,
            b2,
            b3,
            low_value,
            nominal,
            high_value,
        })
    }

    /// A constant law.
    pub fn constant(control_index: usize, value: f64) -> Self {
        Self {
            control_index,
            b0: 0.0,
            b1: 1.0,
            b2: 1.0,
            b3: 2.0,
            low_value: value,
            nominal: value,
            high_value: value,
        }
    }

    pub fn lower_slope(&self) -> f64 {
        (self.nominal - self.low_value) / (self.b1 - self.b0)
    }

    pub fn upper_slope(&self) -> f64 {
        (self.high_value - self.nominal) / (self.b3 - self.b2)
    }

    fn range(&self) -> (f64, f64) {
        let vals = [self.low_value, self.nominal, self.high_value];
        (
            vals.iter().copied().fold(f64::INFINITY, f64::min),
            vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        )
    }

    /// Evaluates the law in max-difference form, clamped to the value range
    /// so rounding never leaves the admissible interval.
    pub fn eval(&self, population: f64) -> f64 {
        let ramp = |a: f64, b: f64| (population - a).max(0.0) - (population - b).max(0.0);
        let v = self.low_value + self.lower_slope() * ramp(self.b0, self.b1) + self.upper_slope() * ramp(self.b2, self.b3);
        let (lo, hi) = self.range();
        v.clamp(lo, hi)
    }
}

/// Builds one ramp per species that saturates at the favourable control
/// bound on each face of `rect`: the law is at the bound exactly on the face
/// and at `nominal` (clamped into the box) away from it.
///
/// Fails unless the closed-form controllability conditions hold for
/// `(forced, rect)` and `0 < 2 * band_width <= u_i - l_i` on every axis.
pub fn synthesize_ramp_feedback(
    forced: &ForcedGlv,
    rect: &RectangularSet,
    nominal: f64,
    band_width: f64,
) -> Result<Vec<RampFeedback>> {
    let n = forced.base().n();
    check_dim(n, rect.dim())?;
    if !(band_width > 0.0) || !nominal.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "band_width must be positive, got {band_width}"
        )));
    }
    let verdict = sizos_rect_glv(forced, rect)?;
    if !verdict.decision {
        let worst = verdict
            .margins
            .iter()
            .filter(|m| m.value > verdict.tolerance)
            .map(|m| format!("{} = {}", m.id, m.value))
            .collect::<Vec<_>>()
            .join(", ");
        return Err(Error::InvalidArgument(format!(
            "controllability conditions fail for this set and control box: {worst}"
        )));
    }
    let controls = forced.controls();
    (0..n)
        .map(|i| {
            let (l, u) = (rect.lower()[i], rect.upper()[i]);
            if 2.0 * band_width > u - l {
                return Err(Error::InvalidArgument(format!(
                    "band_width {band_width} is more than half the width of axis {}",
                    i + 1
                )));
            }
            let (al, au) = (controls.lower()[i], controls.upper()[i]);
            let nominal = nominal.clamp(al, au);
            // Growing species need the largest self-competition on the upper
            // face; declining species the reverse.
            let (low, high) = if forced.base().r()[i] > 0.0 { (al, au) } else { (au, al) };
            let (b1, b2) = (l + band_width, u - band_width);
            if b1 > b2 {
                return Err(Error::InvalidArgument(format!(
                    "ramps overlap on axis {}: {b1} > {b2}",
                    i + 1
                )));
            }
            RampFeedback::new(i, [l, b1, b2, u], low, nominal, high)
        })
        .collect()
}

/// The autonomous field obtained by substituting feedback laws for the
/// controlled self-competition coefficients.
#[derive(Debug, Clone)]
pub struct ClosedLoopGlv {
    forced: ForcedGlv,
    feedback: Vec<RampFeedback>,
}

pub fn close_loop(forced: &ForcedGlv, feedback: Vec<RampFeedback>) -> Result<ClosedLoopGlv> {
    let n = forced.base().n();
    if feedback.len() != n {
        return Err(Error::InvalidArgument(format!(
            "expected {n} feedback laws, one per control slot, got {}",
            feedback.len()
        )));
    }
    let mut feedback = feedback;
    feedback.sort_by_key(|f| f.control_index);
    if feedback.iter().enumerate().any(|(i, f)| f.control_index != i) {
        return Err(Error::InvalidArgument("feedback control indices must cover every slot once".into()));
    }
    Ok(ClosedLoopGlv {
        forced: forced.clone(),
        feedback,
    })
}

impl ClosedLoopGlv {
    pub fn feedback(&self) -> &[RampFeedback] {
        &self.feedback
    }
}

impl VectorField for ClosedLoopGlv {
    fn dim(&self) -> usize {
        self.forced.base().n()
    }

    fn rate(&self, x: &[f64], dx: &mut [f64]) {
        self.forced.rate_with(x, |i| self.feedback[i].eval(x[i]), dx)
    }
}
