//! Deciding whether a set is positively invariant ("sustainable over the
//! set"): closed-form GLV conditions on rectangles, the May-Leonard scalar
//! condition, and sampling oracles for arbitrary fields.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::field::VectorField;
use crate::glv::{GlvParameters, MayLeonardParams, DEFAULT_COEFF_FLOOR};
use crate::ode::{self, SimOptions, VertexRun};
use crate::sets::{Face, RectangularSet, Side, SmoothSet, StateSet, DEFAULT_POPULATION_FLOOR};

/// Tolerance on closed-form margins. Tangential boundary flow gives margins
/// that are zero up to rounding.
pub const CLOSED_FORM_TOL: f64 = 1e-12;

/// Tolerance on sampled face rates.
pub const SAMPLE_TOL: f64 = 1e-9;

/// Two witnesses whose rates differ by less than this count as tied.
pub const WITNESS_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    FaceSampled,
    SmoothSampled,
    Minimax,
}

/// One inequality of a decision, oriented so that `value <= 0` is satisfied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub id: String,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WitnessFace {
    Rect(Face),
    Constraint { constraint: usize },
}

/// A boundary point where the field points strictly out of the set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutwardWitness {
    pub point: Vec<f64>,
    pub face: WitnessFace,
    /// Outward normal rate: `f_i` on an upper face, `-f_i` on a lower face,
    /// or `grad(phi_k) . f` for a smooth constraint.
    pub outward_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub decision: bool,
    pub method: Method,
    pub tolerance: f64,
    pub margins: Vec<Margin>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<OutwardWitness>,
    /// Usable and skipped sample counts for the sampling oracles.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<SampleCounts>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleCounts {
    pub evaluated: usize,
    pub skipped: usize,
}

impl Verdict {
    fn from_margins(method: Method, tolerance: f64, margins: Vec<Margin>) -> Self {
        let decision = margins.iter().all(|m| m.value <= tolerance);
        Self {
            decision,
            method,
            tolerance,
            margins,
            witness: None,
            samples: None,
        }
    }

    pub fn margin(&self, id: &str) -> Option<f64> {
        self.margins.iter().find(|m| m.id == id).map(|m| m.value)
    }

    pub fn max_margin(&self) -> f64 {
        self.margins.iter().map(|m| m.value).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// The worst case of one face inequality over the rest of the face.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct FaceCondition {
    pub face: Face,
    /// `max over the face of sign * bracket`, `<= 0` when satisfied.
    pub margin: f64,
    /// Face vertex attaining the worst case.
    pub worst_point: Vec<f64>,
}

pub(crate) fn margin_id(face: Face, growth: f64) -> String {
    let class = if growth > 0.0 { "R+" } else { "R-" };
    format!("{}∈{}/{}", face.axis + 1, class, face.side)
}

/// On face `(i, side)` the outward rate is `s * |r_i| N_i * bracket_i` with
/// `s = sign(r_i)` on the upper face and `-sign(r_i)` on the lower one, so the
/// face is non-expanding iff `s * bracket_i <= 0` on the whole face. The
/// bracket is affine in every other `N_j`, so its worst case sits at the
/// vertex taking `N_j^l` when `s * alpha_ij > 0` and `N_j^u` otherwise.
///
/// `self_coeff(i, s)` supplies the self-competition coefficient used on the
/// face; it is `alpha_ii` for the unforced model and the least favourable
/// admissible control otherwise.
pub(crate) fn face_conditions(
    params: &GlvParameters,
    rect: &RectangularSet,
    self_coeff: impl Fn(usize, f64) -> f64,
) -> Vec<FaceCondition> {
    let n = params.n();
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        for side in [Side::Upper, Side::Lower] {
            let face = Face { axis: i, side };
            let sign = match side {
                Side::Upper => params.r()[i].signum(),
                Side::Lower => -params.r()[i].signum(),
            };
            let own = rect.bound(face);
            let mut worst_point = vec![0.0; n];
            let mut sum = self_coeff(i, sign) * own;
            worst_point[i] = own;
            for j in (0..n).filter(|&j| j != i) {
                let a = params.alpha(i, j);
                let nj = if sign * a > 0.0 { rect.lower()[j] } else { rect.upper()[j] };
                worst_point[j] = nj;
                sum += a * nj;
            }
            out.push(FaceCondition {
                face,
                margin: sign * (1.0 - sum),
                worst_point,
            });
        }
    }
    out
}

/// Decides invariance of a population rectangle under the GLV model in closed
/// form. Margins are reported per species and face, `<= 0` meaning satisfied.
pub fn sos_rect_glv(params: &GlvParameters, rect: &RectangularSet) -> Result<Verdict> {
    sos_rect_glv_with_floor(params, rect, DEFAULT_POPULATION_FLOOR)
}

pub fn sos_rect_glv_with_floor(params: &GlvParameters, rect: &RectangularSet, floor: f64) -> Result<Verdict> {
    check_dim(params.n(), rect.dim())?;
    rect.require_population(floor)?;
    params.require_nonzero_rates()?;
    let margins = face_conditions(params, rect, |i, _| params.alpha(i, i))
        .into_iter()
        .map(|c| Margin {
            id: margin_id(c.face, params.r()[c.face.axis]),
            value: c.margin,
        })
        .collect();
    Ok(Verdict::from_margins(Method::ClosedForm, CLOSED_FORM_TOL, margins))
}

#[derive(Debug, Clone)]
struct Candidate {
    rate: f64,
    face: WitnessFace,
    point: Vec<f64>,
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Larger rate wins; ties go to the smaller (face, point).
fn better(a: &Candidate, b: &Candidate) -> bool {
    match a.rate.total_cmp(&b.rate) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => match a.face.cmp(&b.face) {
            Ordering::Equal => lex_cmp(&a.point, &b.point).is_lt(),
            o => o.is_lt(),
        },
    }
}

fn pick(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if better(&b, &a) { b } else { a }),
        (a, None) => a,
        (None, b) => b,
    }
}

#[derive(Debug, Clone)]
struct FaceScan {
    /// Max outward rate seen per face index.
    max_rate: Vec<f64>,
    best: Option<Candidate>,
    evaluated: usize,
}

impl FaceScan {
    fn new(faces: usize) -> Self {
        Self {
            max_rate: vec![f64::NEG_INFINITY; faces],
            best: None,
            evaluated: 0,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.max_rate.iter_mut().zip(other.max_rate) {
            *a = a.max(b);
        }
        self.best = pick(self.best, other.best);
        self.evaluated += other.evaluated;
        self
    }
}

/// Sampling oracle for rectangles: checks the outward rate on every active
/// face of every boundary grid point. A `true` verdict only certifies the
/// sampled points.
pub fn sos_rect_sampled<F: VectorField + ?Sized>(
    field: &F,
    rect: &RectangularSet,
    resolution: usize,
) -> Result<Verdict> {
    check_dim(rect.dim(), field.dim())?;
    let n = rect.dim();
    rect.boundary_grid(resolution)?;
    let scan = (0..2 * n)
        .into_par_iter()
        .map(|f| {
            let mut scan = FaceScan::new(2 * n);
            let mut dx = vec![0.0; n];
            for (point, active) in rect.face_grid(Face::from_index(f), resolution).expect("valid face") {
                field.rate(&point, &mut dx);
                scan.evaluated += 1;
                for face in active.faces() {
                    let rate = face.outward_rate(&dx);
                    let idx = face.index();
                    scan.max_rate[idx] = scan.max_rate[idx].max(rate);
                    if rate > SAMPLE_TOL {
                        let cand = Candidate {
                            rate,
                            face: WitnessFace::Rect(face),
                            point: point.clone(),
                        };
                        scan.best = pick(scan.best.take(), Some(cand));
                    }
                }
            }
            scan
        })
        .reduce(|| FaceScan::new(2 * n), FaceScan::merge);

    let margins = scan
        .max_rate
        .iter()
        .enumerate()
        .map(|(idx, &value)| {
            let face = Face::from_index(idx);
            Margin {
                id: format!("{}/{}", face.axis + 1, face.side),
                value,
            }
        })
        .collect();
    let mut verdict = Verdict::from_margins(Method::FaceSampled, SAMPLE_TOL, margins);
    verdict.witness = scan.best.map(|c| OutwardWitness {
        point: c.point,
        face: c.face,
        outward_rate: c.rate,
    });
    verdict.samples = Some(SampleCounts {
        evaluated: scan.evaluated,
        skipped: 0,
    });
    Ok(verdict)
}

/// Sampling oracle for smooth sets. Points outside the set or with no active
/// constraint (at `active_tol`) are skipped and counted.
pub fn sos_smooth_sampled<F, I>(field: &F, set: &SmoothSet, boundary_points: I, active_tol: f64) -> Result<Verdict>
where
    F: VectorField + ?Sized,
    I: IntoIterator<Item = Vec<f64>>,
{
    check_dim(set.dim(), field.dim())?;
    let m = set.constraints().len();
    let mut max_rate = vec![f64::NEG_INFINITY; m];
    let mut best: Option<Candidate> = None;
    let mut evaluated = 0;
    let mut skipped = 0;
    let mut dx = vec![0.0; set.dim()];
    for point in boundary_points {
        check_dim(set.dim(), point.len())?;
        let active = match set.active_set(&point, active_tol) {
            Ok(crate::sets::ActiveSet::Constraints(k)) if !k.is_empty() => k,
            _ => {
                skipped += 1;
                continue;
            }
        };
        evaluated += 1;
        field.rate(&point, &mut dx);
        for k in active {
            let grad = set.constraints()[k].gradient(&point);
            let rate: f64 = grad.iter().zip(&dx).map(|(g, f)| g * f).sum();
            max_rate[k] = max_rate[k].max(rate);
            if rate > SAMPLE_TOL {
                let cand = Candidate {
                    rate,
                    face: WitnessFace::Constraint { constraint: k },
                    point: point.clone(),
                };
                best = pick(best, Some(cand));
            }
        }
    }
    if evaluated == 0 {
        return Err(Error::InsufficientSamples(format!(
            "no boundary point with an active constraint among {skipped} supplied"
        )));
    }
    let margins = max_rate
        .into_iter()
        .enumerate()
        .map(|(k, value)| Margin {
            id: format!("phi{}", k + 1),
            value,
        })
        .collect();
    let mut verdict = Verdict::from_margins(Method::SmoothSampled, SAMPLE_TOL, margins);
    verdict.witness = best.map(|c| OutwardWitness {
        point: c.point,
        face: c.face,
        outward_rate: c.rate,
    });
    verdict.samples = Some(SampleCounts { evaluated, skipped });
    Ok(verdict)
}

/// The May-Leonard condition on the symmetric cube `[nl, nu]^3`:
/// `(1 - nl)/nu >= alpha + beta >= (1 - nu)/nl`.
///
/// Margins are the three links of the equivalent chain
/// `0 >= (1 - nu - nl)/nu >= alpha + beta - 1 >= (1 - nu - nl)/nl`.
pub fn may_leonard_sos_condition(alpha: f64, beta: f64, nl: f64, nu: f64) -> Result<Verdict> {
    may_leonard_sos_condition_with_floors(alpha, beta, nl, nu, DEFAULT_COEFF_FLOOR, DEFAULT_POPULATION_FLOOR)
}

pub fn may_leonard_sos_condition_with_floors(
    alpha: f64,
    beta: f64,
    nl: f64,
    nu: f64,
    coeff_floor: f64,
    population_floor: f64,
) -> Result<Verdict> {
    let ml = MayLeonardParams::with_floor(alpha, beta, coeff_floor)?;
    check_population_bounds(nl, nu, population_floor)?;
    let s1 = ml.sum() - 1.0;
    let upper_link = (1.0 - nu - nl) / nu;
    let lower_link = (1.0 - nu - nl) / nl;
    let margins = vec![
        Margin { id: "nonpositive".into(), value: upper_link },
        Margin { id: "lower_face".into(), value: s1 - upper_link },
        Margin { id: "upper_face".into(), value: lower_link - s1 },
    ];
    Ok(Verdict::from_margins(Method::ClosedForm, CLOSED_FORM_TOL, margins))
}

pub(crate) fn check_population_bounds(nl: f64, nu: f64, floor: f64) -> Result<()> {
    if !(nl.is_finite() && nu.is_finite()) || nl < floor || !(nl < nu) {
        return Err(Error::InvalidArgument(format!(
            "population bounds must satisfy eps2 = {floor} <= nl < nu, got nl = {nl}, nu = {nu}"
        )));
    }
    Ok(())
}

/// The face-vertex witness of maximal outward rate, from either a boundary
/// scan at `resolution` or the closed-form face extrema; the closed form wins
/// ties within [`WITNESS_TIE_TOL`].
pub fn find_outward_witness(
    params: &GlvParameters,
    rect: &RectangularSet,
    resolution: usize,
) -> Result<Option<OutwardWitness>> {
    check_dim(params.n(), rect.dim())?;
    let sampled = sos_rect_sampled(params, rect, resolution)?.witness;

    let mut closed: Option<Candidate> = None;
    for c in face_conditions(params, rect, |i, _| params.alpha(i, i)) {
        let dx = params.rate_vec(&c.worst_point);
        let rate = c.face.outward_rate(&dx);
        if rate > SAMPLE_TOL {
            closed = pick(
                closed,
                Some(Candidate {
                    rate,
                    face: WitnessFace::Rect(c.face),
                    point: c.worst_point,
                }),
            );
        }
    }
    let chosen = match (closed, sampled) {
        (Some(c), Some(s)) => {
            if c.rate >= s.outward_rate - WITNESS_TIE_TOL {
                Some(OutwardWitness { point: c.point, face: c.face, outward_rate: c.rate })
            } else {
                Some(s)
            }
        }
        (Some(c), None) => Some(OutwardWitness { point: c.point, face: c.face, outward_rate: c.rate }),
        (None, s) => s,
    };
    Ok(chosen)
}

/// Outcome of simulating from every vertex of a rectangle.
#[derive(Debug, Clone)]
pub struct SimulationCheck {
    pub all_contained: bool,
    /// Largest excursion over all trajectories.
    pub max_excursion: f64,
    pub runs: Vec<VertexRun>,
}

/// Integrates from every vertex and reports containment. A consistency check,
/// not a decision procedure.
pub fn verify_sos_by_simulation<F: VectorField + ?Sized>(
    field: &F,
    rect: &RectangularSet,
    t_end: f64,
    opts: &SimOptions,
    band: f64,
) -> Result<SimulationCheck> {
    let runs = ode::vertex_suite(field, rect, t_end, opts, band)?;
    if let Some(r) = runs.iter().find(|r| r.trajectory.status == ode::TrajectoryStatus::StepFailure) {
        return Err(Error::Numerical(format!(
            "integration from vertex {:?} failed at t = {}",
            r.vertex,
            r.trajectory.last_time()
        )));
    }
    Ok(SimulationCheck {
        all_contained: runs.iter().all(|r| r.report.contained),
        max_excursion: runs.iter().map(|r| r.report.max_excursion).fold(f64::NEG_INFINITY, f64::max),
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FnField;
    use crate::glv::may_leonard;
    use crate::sets::SmoothConstraint;

    fn cube(l: f64, u: f64) -> RectangularSet {
        RectangularSet::symmetric(3, l, u).unwrap()
    }

    #[test]
    fn case_1a_closed_form() {
        let v = sos_rect_glv(&may_leonard(0.2, 0.05).unwrap(), &cube(0.5, 2.0)).unwrap();
        assert!(v.decision);
        for i in 1..=3 {
            assert!((v.margin(&format!("{i}∈R+/upper")).unwrap() + 1.125).abs() < 1e-12);
            assert!(v.margin(&format!("{i}∈R+/lower")).unwrap().abs() < 1e-12);
        }
        assert!(v.witness.is_none());
    }

    #[test]
    fn case_1b_and_2_closed_form() {
        let p = may_leonard(0.2, 0.05).unwrap();
        assert!(!sos_rect_glv(&p, &cube(0.75, 3.25)).unwrap().decision);
        let p = may_leonard(0.8, 1.3).unwrap();
        assert!(!sos_rect_glv(&p, &cube(0.25, 0.38)).unwrap().decision);
    }

    #[test]
    fn closed_form_rejects_bad_inputs() {
        let p = may_leonard(0.2, 0.05).unwrap();
        let r = RectangularSet::symmetric(3, 0.0, 1.0).unwrap();
        assert!(matches!(sos_rect_glv(&p, &r), Err(Error::InvalidSet(_))));
        let z = GlvParameters::new(vec![0.0], vec![vec![1.0]]).unwrap();
        let r1 = RectangularSet::new(vec![0.5], vec![2.0]).unwrap();
        assert!(matches!(sos_rect_glv(&z, &r1), Err(Error::ModelDegenerate(_))));
        assert!(sos_rect_glv(&p, &r1).is_err());
    }

    #[test]
    fn declining_species_conditions() {
        // r < 0: dN/dt = -N (1 - N). Upper face needs 1 - N^u >= 0, lower face
        // needs 1 - N^l <= 0, so [l, u] is invariant only when l >= 1 >= u,
        // which never holds; interval [0.5, 0.9] fails on the lower face only.
        let p = GlvParameters::new(vec![-1.0], vec![vec![1.0]]).unwrap();
        let r = RectangularSet::new(vec![0.5], vec![0.9]).unwrap();
        let v = sos_rect_glv(&p, &r).unwrap();
        assert!(!v.decision);
        assert!(v.margin("1∈R-/upper").unwrap() <= 0.0);
        assert!(v.margin("1∈R-/lower").unwrap() > 0.0);
        assert_eq!(v.decision, sos_rect_sampled(&p, &r, 2).unwrap().decision);
    }

    #[test]
    fn logistic_interval_sampled() {
        let p = GlvParameters::new(vec![1.0], vec![vec![1.0]]).unwrap();
        let r = RectangularSet::new(vec![0.5], vec![2.0]).unwrap();
        let v = sos_rect_sampled(&p, &r, 41).unwrap();
        assert!(v.decision);
        assert_eq!(v.samples.unwrap().evaluated, 2);
        assert_eq!(v.margin("1/upper"), Some(-2.0));
        assert_eq!(v.margin("1/lower"), Some(-0.25));
    }

    #[test]
    fn case_1a_and_1b_sampled() {
        let p = may_leonard(0.2, 0.05).unwrap();
        let v = sos_rect_sampled(&p, &cube(0.5, 2.0), 41).unwrap();
        assert!(v.decision && v.witness.is_none());
        let v = sos_rect_sampled(&p, &cube(0.75, 3.25), 41).unwrap();
        assert!(!v.decision);
        let w = v.witness.unwrap();
        let rate = match w.face {
            WitnessFace::Rect(face) => face.outward_rate(&p.rate_vec(&w.point)),
            _ => unreachable!(),
        };
        assert_eq!(rate, w.outward_rate);
    }

    #[test]
    fn constant_outward_field() {
        let f = FnField::new(2, |_: &[f64], dx: &mut [f64]| dx.fill(1.0));
        let r = RectangularSet::new(vec![0.0, 1.0], vec![1.0, 3.0]).unwrap();
        let v = sos_rect_sampled(&f, &r, 5).unwrap();
        assert!(!v.decision);
        let w = v.witness.unwrap();
        assert_eq!(w.face, WitnessFace::Rect(Face { axis: 0, side: Side::Upper }));
        assert_eq!(w.outward_rate, 1.0);
        assert_eq!(w.point, vec![1.0, 1.0]);
    }

    #[test]
    fn witness_case_1b() {
        let p = may_leonard(0.2, 0.05).unwrap();
        let w = find_outward_witness(&p, &cube(0.75, 3.25), 41).unwrap().unwrap();
        // Lower face of species 1 with the competitors at their upper bound:
        // -f_1 = -0.75 * (1 - 0.75 - 0.25 * 3.25) = 0.75 * 0.5625.
        assert_eq!(w.face, WitnessFace::Rect(Face { axis: 0, side: Side::Lower }));
        assert_eq!(w.point, vec![0.75, 3.25, 3.25]);
        assert!((w.outward_rate - 0.421875).abs() < 1e-12);
        assert!(find_outward_witness(&p, &cube(0.5, 2.0), 41).unwrap().is_none());
    }

    #[test]
    fn may_leonard_condition_cases() {
        let v = may_leonard_sos_condition(0.2, 0.05, 0.5, 2.0).unwrap();
        assert!(v.decision);
        assert!(v.margin("lower_face").unwrap().abs() < 1e-12);
        assert!(!may_leonard_sos_condition(0.2, 0.05, 0.75, 3.25).unwrap().decision);
        for (nl, nu) in [(0.01, 0.02), (0.25, 0.38), (0.3, 1.0), (0.9, 4.0)] {
            assert!(!may_leonard_sos_condition(0.8, 1.3, nl, nu).unwrap().decision);
        }
        assert!(may_leonard_sos_condition(0.2, 0.05, 2.0, 1.0).is_err());
        assert!(may_leonard_sos_condition(0.2, 0.05, 0.0, 1.0).is_err());
        assert!(may_leonard_sos_condition(0.0, 0.05, 0.5, 1.0).is_err());
    }

    #[test]
    fn smooth_equilibrium_on_boundary() {
        let p = GlvParameters::new(vec![1.0], vec![vec![1.0]]).unwrap();
        let set = SmoothSet::new(1, vec![SmoothConstraint::new(|z: &[f64]| z[0] - 1.0, |_: &[f64]| vec![1.0])]).unwrap();
        let v = sos_smooth_sampled(&p, &set, vec![vec![1.0]], 1e-12).unwrap();
        assert!(v.decision);
        assert_eq!(v.margin("phi1"), Some(0.0));
    }

    #[test]
    fn smooth_outward_constant_flow() {
        let f = FnField::new(1, |_: &[f64], dx: &mut [f64]| dx[0] = -1.0);
        let set = SmoothSet::new(1, vec![SmoothConstraint::new(|z: &[f64]| -z[0], |_: &[f64]| vec![-1.0])]).unwrap();
        let v = sos_smooth_sampled(&f, &set, vec![vec![0.0], vec![3.0], vec![-1.0]], 1e-12).unwrap();
        assert!(!v.decision);
        let w = v.witness.unwrap();
        assert_eq!(w.outward_rate, 1.0);
        assert_eq!(w.face, WitnessFace::Constraint { constraint: 0 });
        assert_eq!(v.samples.unwrap(), SampleCounts { evaluated: 1, skipped: 2 });
        assert!(matches!(
            sos_smooth_sampled(&f, &set, vec![vec![5.0]], 1e-12),
            Err(Error::InsufficientSamples(_))
        ));
    }

    #[test]
    fn rectangle_as_smooth_constraints_agrees() {
        let p = may_leonard(0.2, 0.05).unwrap();
        for (l, u) in [(0.5, 2.0), (0.75, 3.25)] {
            let r = cube(l, u);
            let pts = r.boundary_grid(11).unwrap().map(|(p, _)| p);
            let smooth = sos_smooth_sampled(&p, &r.to_smooth(), pts, 0.0).unwrap();
            let rect = sos_rect_sampled(&p, &r, 11).unwrap();
            assert_eq!(smooth.decision, rect.decision);
            for (a, b) in smooth.margins.iter().zip(&rect.margins) {
                assert_eq!(a.value, b.value);
            }
        }
    }
}
