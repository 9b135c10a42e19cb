//! Adaptive Dormand-Prince 5(4) integration and set-containment monitoring.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::field::VectorField;
use crate::sets::{RectangularSet, Side};

/// Half-width of the band separating integrator noise from genuine exits.
pub const CONTAINMENT_TOL: f64 = 1e-6;

/// Exit times are localized to within this many time units.
pub const EXIT_TIME_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Upper bound on the step size; `None` means `t_end`.
    pub max_step: Option<f64>,
    /// Number of uniformly spaced output samples, endpoints included.
    pub samples: usize,
    /// Also record every accepted step.
    pub record_steps: bool,
    /// Escape is declared once the sup-norm of the state exceeds this.
    pub blowup: f64,
    /// Take fixed steps of this size with no error control.
    pub fixed_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_step: None,
            samples: 1000,
            record_steps: false,
            blowup: 1e6,
            fixed_step: None,
            max_steps: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryStatus {
    Completed,
    Escaped,
    StepFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub status: TrajectoryStatus,
}

impl Trajectory {
    pub fn last_state(&self) -> &[f64] {
        self.states.last().expect("trajectory has at least the initial state")
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().expect("trajectory has at least the initial time")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

// Dormand-Prince tableau; the nodes c_i are not needed for autonomous fields.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Continuous extension of order 4.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// Step-size controller (PI form).
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

struct Stepper<'a, F: ?Sized> {
    field: &'a F,
    n: usize,
    k: [Vec<f64>; 7],
    y_stage: Vec<f64>,
    y_new: Vec<f64>,
    err: Vec<f64>,
}

impl<'a, F: VectorField + ?Sized> Stepper<'a, F> {
    fn new(field: &'a F) -> Self {
        let n = field.dim();
        Self {
            field,
            n,
            k: std::array::from_fn(|_| vec![0.0; n]),
            y_stage: vec![0.0; n],
            y_new: vec![0.0; n],
            err: vec![0.0; n],
        }
    }

    /// One trial step from `y` with `k[0] = f(y)` already set. Fills `y_new`,
    /// `err` and `k[6] = f(y_new)`.
    fn step(&mut self, y: &[f64], h: f64) {
        let n = self.n;
        macro_rules! stage {
            ($dst:expr, $($coef:expr => $src:expr),+) => {{
                for i in 0..n {
                    self.y_stage[i] = y[i] + h * (0.0 $(+ $coef * self.k[$src][i])+);
                }
                let (head, tail) = self.k.split_at_mut($dst);
                let _ = head;
                self.field.rate(&self.y_stage, &mut tail[0]);
            }};
        }
        stage!(1, A21 => 0);
        stage!(2, A31 => 0, A32 => 1);
        stage!(3, A41 => 0, A42 => 1, A43 => 2);
        stage!(4, A51 => 0, A52 => 1, A53 => 2, A54 => 3);
        stage!(5, A61 => 0, A62 => 1, A63 => 2, A64 => 3, A65 => 4);
        for i in 0..n {
            self.y_new[i] = y[i]
                + h * (A71 * self.k[0][i]
                    + A73 * self.k[2][i]
                    + A74 * self.k[3][i]
                    + A75 * self.k[4][i]
                    + A76 * self.k[5][i]);
        }
        let (head, tail) = self.k.split_at_mut(6);
        let _ = head;
        self.field.rate(&self.y_new, &mut tail[0]);
        for i in 0..n {
            self.err[i] = h
                * (E1 * self.k[0][i]
                    + E3 * self.k[2][i]
                    + E4 * self.k[3][i]
                    + E5 * self.k[4][i]
                    + E6 * self.k[5][i]
                    + E7 * self.k[6][i]);
        }
    }

    fn error_norm(&self, y: &[f64], opts: &SimOptions) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            let sk = opts.abs_tol + opts.rel_tol * y[i].abs().max(self.y_new[i].abs());
            let e = self.err[i] / sk;
            acc += e * e;
        }
        let norm = (acc / self.n as f64).sqrt();
        if norm.is_finite() {
            norm
        } else {
            f64::INFINITY
        }
    }

    /// Dense output at `theta` in `[0, 1]` of the step `y -> y_new` of size `h`.
    fn interpolate(&self, y: &[f64], h: f64, theta: f64, out: &mut [f64]) {
        let t1 = 1.0 - theta;
        for i in 0..self.n {
            let r2 = self.y_new[i] - y[i];
            let r3 = h * self.k[0][i] - r2;
            let r4 = r2 - h * self.k[6][i] - r3;
            let r5 = h
                * (D1 * self.k[0][i]
                    + D3 * self.k[2][i]
                    + D4 * self.k[3][i]
                    + D5 * self.k[4][i]
                    + D6 * self.k[5][i]
                    + D7 * self.k[6][i]);
            out[i] = y[i] + theta * (r2 + t1 * (r3 + theta * (r4 + t1 * r5)));
        }
    }
}

fn initial_step<F: VectorField + ?Sized>(field: &F, y0: &[f64], f0: &[f64], h_max: f64, opts: &SimOptions) -> f64 {
    let n = y0.len();
    let scale: Vec<f64> = y0.iter().map(|y| opts.abs_tol + opts.rel_tol * y.abs()).collect();
    let norm = |v: &[f64]| (v.iter().zip(&scale).map(|(a, s)| (a / s) * (a / s)).sum::<f64>() / n as f64).sqrt();
    let d0 = norm(y0);
    let d1 = norm(f0);
    let mut h0 = if d0 < 1e-10 || d1 < 1e-10 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(h_max);
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, f)| y + h0 * f).collect();
    let f1 = field.rate_vec(&y1);
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = norm(&diff) / h0;
    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dm).powf(1.0 / 5.0)
    };
    (100.0 * h0).min(h1).min(h_max)
}

/// Integrates `field` from `x0` over `[0, t_end]`.
///
/// Integration stops early with [`TrajectoryStatus::Escaped`] once the state
/// leaves the blowup ball, and with [`TrajectoryStatus::StepFailure`] when the
/// step size underflows `1e-14 * t_end`; the partial trajectory is returned in
/// both cases.
pub fn integrate<F: VectorField + ?Sized>(
    field: &F,
    x0: &[f64],
    t_end: f64,
    opts: &SimOptions,
) -> Result<Trajectory> {
    check_dim(field.dim(), x0.len())?;
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidArgument(format!("t_end must be positive, got {t_end}")));
    }
    if !(opts.abs_tol > 0.0 && opts.rel_tol > 0.0) {
        return Err(Error::InvalidArgument("tolerances must be positive".into()));
    }
    if opts.samples < 2 {
        return Err(Error::InvalidArgument("at least two output samples are required".into()));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("initial state must be finite".into()));
    }

    let n = x0.len();
    let h_max = opts.max_step.unwrap_or(t_end).min(t_end);
    let h_min = 1e-14 * t_end;
    let grid_dt = t_end / (opts.samples - 1) as f64;
    let grid_time = |k: usize| if k + 1 == opts.samples { t_end } else { k as f64 * grid_dt };

    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![x0.to_vec()],
        status: TrajectoryStatus::Completed,
    };
    let mut next_grid = 1;

    let mut st = Stepper::new(field);
    let mut t = 0.0;
    let mut y = x0.to_vec();
    field.rate(&y, &mut st.k[0]);
    let mut h = match opts.fixed_step {
        Some(h) if h > 0.0 => h,
        Some(h) => return Err(Error::InvalidArgument(format!("fixed step must be positive, got {h}"))),
        None => initial_step(field, &y, &st.k[0].clone(), h_max, opts),
    };
    let mut fac_old: f64 = 1e-4;
    let mut rejected = false;
    let mut dense = vec![0.0; n];
    let mut steps = 0usize;

    while t < t_end {
        if steps >= opts.max_steps {
            traj.status = TrajectoryStatus::StepFailure;
            break;
        }
        steps += 1;
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        if opts.fixed_step.is_none() && h < h_min {
            traj.status = TrajectoryStatus::StepFailure;
            break;
        }
        st.step(&y, h);

        if opts.fixed_step.is_none() {
            let err = st.error_norm(&y, opts);
            let fac11 = err.powf(0.2 - BETA * 0.75);
            if err > 1.0 {
                let shrink = (fac11 / SAFETY).min(1.0 / FAC_MIN);
                h /= if shrink.is_finite() { shrink } else { 1.0 / FAC_MIN };
                rejected = true;
                continue;
            }
            let mut fac = fac11 / fac_old.powf(BETA);
            fac = (fac / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = (h / fac).min(h_max);
            if rejected {
                h_new = h_new.min(h);
            }
            fac_old = err.max(1e-4);
            rejected = false;
            emit(&st, &y, t, h, last, t_end, &grid_time, &mut next_grid, opts, &mut dense, &mut traj);
            t = if last { t_end } else { t + h };
            h = h_new;
        } else {
            emit(&st, &y, t, h, last, t_end, &grid_time, &mut next_grid, opts, &mut dense, &mut traj);
            t = if last { t_end } else { t + h };
        }

        y.copy_from_slice(&st.y_new);
        let (first, rest) = st.k.split_at_mut(1);
        first[0].copy_from_slice(&rest[5]);

        let sup = y.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if !(sup <= opts.blowup) {
            if traj.last_time() < t {
                traj.times.push(t);
                traj.states.push(y.clone());
            }
            traj.status = TrajectoryStatus::Escaped;
            break;
        }
    }
    Ok(traj)
}

#[allow(clippy::too_many_arguments)]
fn emit<F: VectorField + ?Sized>(
    st: &Stepper<'_, F>,
    y: &[f64],
    t: f64,
    h: f64,
    last: bool,
    t_end: f64,
    grid_time: &dyn Fn(usize) -> f64,
    next_grid: &mut usize,
    opts: &SimOptions,
    dense: &mut [f64],
    traj: &mut Trajectory,
) {
    let t_next = if last { t_end } else { t + h };
    while *next_grid < opts.samples && grid_time(*next_grid) <= t_next {
        let tg = grid_time(*next_grid);
        if tg == t_next {
            traj.states.push(st.y_new.clone());
        } else {
            st.interpolate(y, h, (tg - t) / h, dense);
            traj.states.push(dense.to_vec());
        }
        traj.times.push(tg);
        *next_grid += 1;
    }
    if opts.record_steps && traj.last_time() < t_next {
        traj.times.push(t_next);
        traj.states.push(st.y_new.clone());
    }
}

/// Where and when a trajectory first left the containment band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExitEvent {
    pub time: f64,
    /// Zero-based coordinate index.
    pub axis: usize,
    pub side: Side,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContainmentReport {
    pub contained: bool,
    pub first_exit: Option<ExitEvent>,
    /// Largest signed distance outside the set over all samples.
    pub max_excursion: f64,
}

/// Scans the samples of `traj` against `rect` with a band of `tol`.
///
/// The exit time is linearly interpolated between the bracketing samples; use
/// [`monitor_containment_refined`] to localize it by re-integration.
pub fn monitor_containment(traj: &Trajectory, rect: &RectangularSet, tol: f64) -> Result<ContainmentReport> {
    let (report, bracket) = scan(traj, rect, tol)?;
    let Some((k, _)) = bracket else {
        return Ok(report);
    };
    let mut report = report;
    if k > 0 {
        let (e0, _) = rect.excursion(&traj.states[k - 1]);
        let (e1, face) = rect.excursion(&traj.states[k]);
        let s = ((tol - e0) / (e1 - e0)).clamp(0.0, 1.0);
        let (t0, t1) = (traj.times[k - 1], traj.times[k]);
        report.first_exit = Some(ExitEvent {
            time: t0 + s * (t1 - t0),
            axis: face.axis,
            side: face.side,
        });
    }
    Ok(report)
}

/// Like [`monitor_containment`], but bisects the first exit between the
/// bracketing samples by re-integrating `field` until the bracket is shorter
/// than [`EXIT_TIME_TOL`].
pub fn monitor_containment_refined<F: VectorField + ?Sized>(
    field: &F,
    traj: &Trajectory,
    rect: &RectangularSet,
    tol: f64,
    opts: &SimOptions,
) -> Result<ContainmentReport> {
    let (mut report, bracket) = scan(traj, rect, tol)?;
    let Some((k, _)) = bracket else {
        return Ok(report);
    };
    if k == 0 {
        return Ok(report);
    }
    let t_a = traj.times[k - 1];
    let x_a = &traj.states[k - 1];
    let mut lo = 0.0;
    let mut hi = traj.times[k] - t_a;
    let mut face = rect.excursion(&traj.states[k]).1;
    let probe = SimOptions {
        samples: 2,
        record_steps: false,
        max_step: None,
        ..opts.clone()
    };
    while hi - lo > EXIT_TIME_TOL {
        let mid = 0.5 * (lo + hi);
        let seg = integrate(field, x_a, mid, &probe)?;
        if seg.status != TrajectoryStatus::Completed {
            hi = mid;
            continue;
        }
        let (e, f) = rect.excursion(seg.last_state());
        if e > tol {
            hi = mid;
            face = f;
        } else {
            lo = mid;
        }
    }
    report.first_exit = Some(ExitEvent {
        time: t_a + hi,
        axis: face.axis,
        side: face.side,
    });
    Ok(report)
}

/// Shared sample scan. Returns the report with `first_exit` set at the
/// exiting sample's own time, plus that sample's index.
fn scan(traj: &Trajectory, rect: &RectangularSet, tol: f64) -> Result<(ContainmentReport, Option<(usize, f64)>)> {
    if traj.is_empty() {
        return Err(Error::InvalidArgument("trajectory is empty".into()));
    }
    check_dim(rect.dim(), traj.states[0].len())?;
    let mut max_excursion = f64::NEG_INFINITY;
    let mut first: Option<(usize, f64)> = None;
    let mut exit = None;
    for (k, x) in traj.states.iter().enumerate() {
        let (e, face) = rect.excursion(x);
        max_excursion = max_excursion.max(e);
        if first.is_none() && e > tol {
            first = Some((k, e));
            exit = Some(ExitEvent {
                time: traj.times[k],
                axis: face.axis,
                side: face.side,
            });
        }
    }
    Ok((
        ContainmentReport {
            contained: first.is_none() && max_excursion <= tol,
            first_exit: exit,
            max_excursion,
        },
        first,
    ))
}

#[derive(Debug, Clone)]
pub struct VertexRun {
    pub vertex: Vec<f64>,
    pub trajectory: Trajectory,
    pub report: ContainmentReport,
}

/// Simulates from every vertex of `rect` and monitors containment with a band
/// of `tol`. Accepted steps are recorded so that excursions between output
/// samples are not missed. Results are ordered like [`RectangularSet::vertex_set`].
pub fn vertex_suite<F: VectorField + ?Sized>(
    field: &F,
    rect: &RectangularSet,
    t_end: f64,
    opts: &SimOptions,
    tol: f64,
) -> Result<Vec<VertexRun>> {
    check_dim(rect.dim(), field.dim())?;
    let run_opts = SimOptions {
        record_steps: true,
        ..opts.clone()
    };
    rect.vertex_set()
        .into_par_iter()
        .map(|vertex| {
            let trajectory = integrate(field, &vertex, t_end, &run_opts)?;
            let report = monitor_containment_refined(field, &trajectory, rect, tol, opts)?;
            Ok(VertexRun {
                vertex,
                trajectory,
                report,
            })
        })
        .collect()
}

/// Keeps only the uniform output grid of a trajectory recorded with
/// `record_steps`, for plot-ready output.
pub fn resample_uniform(traj: &Trajectory, samples: usize) -> Trajectory {
    if traj.len() <= 1 || samples < 2 {
        return traj.clone();
    }
    let t_end = traj.last_time();
    let mut out = Trajectory {
        times: Vec::with_capacity(samples),
        states: Vec::with_capacity(samples),
        status: traj.status,
    };
    let mut j = 0;
    for k in 0..samples {
        let t = t_end * k as f64 / (samples - 1) as f64;
        while j + 1 < traj.len() && traj.times[j + 1] <= t {
            j += 1;
        }
        if j + 1 == traj.len() || traj.times[j] == t {
            out.times.push(traj.times[j]);
            out.states.push(traj.states[j].clone());
        } else {
            let (t0, t1) = (traj.times[j], traj.times[j + 1]);
            let s = (t - t0) / (t1 - t0);
            out.times.push(t);
            out.states.push(
                traj.states[j]
                    .iter()
                    .zip(&traj.states[j + 1])
                    .map(|(a, b)| a + s * (b - a))
                    .collect(),
            );
        }
    }
    out.times.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FnField;
    use crate::glv::{may_leonard, GlvParameters};

    fn logistic_exact(x0: f64, t: f64) -> f64 {
        x0 * t.exp() / (1.0 + x0 * (t.exp() - 1.0))
    }

    #[test]
    fn zero_field_is_constant() {
        let f = FnField::new(2, |_: &[f64], dx: &mut [f64]| dx.fill(0.0));
        let tr = integrate(&f, &[0.3, -1.0], 5.0, &SimOptions::default()).unwrap();
        assert_eq!(tr.status, TrajectoryStatus::Completed);
        assert!(tr.states.iter().all(|s| s == &vec![0.3, -1.0]));
        assert_eq!(tr.times.len(), 1000);
        assert_eq!(tr.last_time(), 5.0);
    }

    #[test]
    fn logistic_matches_closed_form() {
        let p = GlvParameters::new(vec![1.0], vec![vec![1.0]]).unwrap();
        let tr = integrate(&p, &[0.5], 20.0, &SimOptions::default()).unwrap();
        for (t, x) in tr.times.iter().zip(&tr.states) {
            assert!((x[0] - logistic_exact(0.5, *t)).abs() < 1e-7, "t = {t}");
        }
        assert!((tr.last_state()[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn times_strictly_increase_with_recorded_steps() {
        let p = may_leonard(0.8, 1.3).unwrap();
        let opts = SimOptions { record_steps: true, samples: 50, ..Default::default() };
        let tr = integrate(&p, &[0.25, 0.3, 0.38], 30.0, &opts).unwrap();
        assert!(tr.times.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(tr.times[0], 0.0);
        assert!(tr.len() > 50);
    }

    #[test]
    fn quadratic_blowup_is_detected() {
        let f = FnField::new(1, |x: &[f64], dx: &mut [f64]| dx[0] = x[0] * x[0]);
        let tr = integrate(&f, &[1.0], 2.0, &SimOptions::default()).unwrap();
        assert_eq!(tr.status, TrajectoryStatus::Escaped);
        assert!(tr.last_time() < 1.0 + 1e-3);
        assert!(tr.last_state()[0] > 1e6);
    }

    #[test]
    fn invalid_arguments() {
        let p = may_leonard(0.2, 0.05).unwrap();
        let o = SimOptions::default();
        assert!(integrate(&p, &[1.0, 1.0], 1.0, &o).is_err());
        assert!(integrate(&p, &[1.0; 3], 0.0, &o).is_err());
        let bad = SimOptions { abs_tol: 0.0, ..o };
        assert!(integrate(&p, &[1.0; 3], 1.0, &bad).is_err());
    }

    #[test]
    fn interior_constant_trajectory_is_contained() {
        let rect = RectangularSet::symmetric(2, 0.0, 1.0).unwrap();
        let tr = Trajectory {
            times: vec![0.0, 1.0],
            states: vec![vec![0.5, 0.5]; 2],
            status: TrajectoryStatus::Completed,
        };
        let r = monitor_containment(&tr, &rect, CONTAINMENT_TOL).unwrap();
        assert!(r.contained);
        assert!(r.first_exit.is_none());
        assert_eq!(r.max_excursion, -0.5);
    }

    #[test]
    fn linear_exit_is_localized() {
        // x(t) = 0.5 + t leaves [0, 1] at t = 0.5 + tol.
        let f = FnField::new(1, |_: &[f64], dx: &mut [f64]| dx[0] = 1.0);
        let rect = RectangularSet::new(vec![0.0], vec![1.0]).unwrap();
        let opts = SimOptions { samples: 11, ..Default::default() };
        let tr = integrate(&f, &[0.5], 2.0, &opts).unwrap();
        let r = monitor_containment_refined(&f, &tr, &rect, CONTAINMENT_TOL, &opts).unwrap();
        assert!(!r.contained);
        let e = r.first_exit.unwrap();
        assert_eq!((e.axis, e.side), (0, Side::Upper));
        assert!((e.time - (0.5 + CONTAINMENT_TOL)).abs() <= EXIT_TIME_TOL, "{}", e.time);
        assert!((r.max_excursion - 1.5).abs() < 1e-9);
        let coarse = monitor_containment(&tr, &rect, CONTAINMENT_TOL).unwrap();
        assert!((coarse.first_exit.unwrap().time - 0.5).abs() < 1e-5);
    }

    #[test]
    fn zero_field_vertex_suite_contained() {
        let f = FnField::new(3, |_: &[f64], dx: &mut [f64]| dx.fill(0.0));
        let rect = RectangularSet::symmetric(3, 0.25, 0.38).unwrap();
        let runs = vertex_suite(&f, &rect, 10.0, &SimOptions::default(), CONTAINMENT_TOL).unwrap();
        assert_eq!(runs.len(), 8);
        assert!(runs.iter().all(|r| r.report.contained));
        assert_eq!(runs[1].vertex, vec![0.25, 0.25, 0.38]);
    }

    #[test]
    fn resampling_keeps_grid() {
        let p = may_leonard(0.2, 0.05).unwrap();
        let opts = SimOptions { record_steps: true, samples: 21, ..Default::default() };
        let tr = integrate(&p, &[0.5, 0.5, 2.0], 10.0, &opts).unwrap();
        let u = resample_uniform(&tr, 21);
        assert_eq!(u.len(), 21);
        assert_eq!(u.times[20], 10.0);
        assert!((u.times[7] - 3.5).abs() < 1e-12);
    }
}
