//! Maximal May-Leonard invariance regions in the population-bound plane
//! `(nl, nu)` and the coefficient plane `(alpha, beta)`, analytically and by
//! grid classification.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glv::DEFAULT_COEFF_FLOOR;
use crate::sets::DEFAULT_POPULATION_FLOOR;
use crate::sos::may_leonard_sos_condition_with_floors;

pub const DEFAULT_SWEEP_RESOLUTION: usize = 201;

/// Corners of the `(nl, nu)` triangle for fixed coefficients, or `None` when
/// `alpha + beta > 1` leaves it empty. Order: `(0, 1)`, `(0, 1/(alpha+beta))`,
/// then the apex on the diagonal.
pub fn triangle_vertices(alpha: f64, beta: f64) -> Option<[(f64, f64); 3]> {
    let s = alpha + beta;
    if s > 1.0 {
        return None;
    }
    let apex = 1.0 / (1.0 + s);
    Some([(0.0, 1.0), (0.0, 1.0 / s), (apex, apex)])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub x: f64,
    pub y: f64,
    pub sos: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub id: usize,
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// Row-major: `y` varies fastest within a row of fixed `x`.
    pub cells: Vec<Cell>,
    pub segments: Vec<Segment>,
    /// No cell and no part of the analytic region is invariant.
    pub empty: bool,
    pub notes: Vec<String>,
}

impl SweepResult {
    pub fn true_count(&self) -> usize {
        self.cells.iter().filter(|c| c.sos).count()
    }
}

/// Range of upper bounds scanned for each lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpperRange {
    /// `nu` in `[min, max]` regardless of `nl`; cells with `nu <= nl` are dropped.
    Fixed { min: f64, max: f64 },
    /// `nu` in `(nl, max]`.
    AboveLower { max: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsWindow {
    pub nl_min: f64,
    pub nl_max: f64,
    pub nu: UpperRange,
    pub resolution: usize,
}

impl Default for BoundsWindow {
    fn default() -> Self {
        Self {
            nl_min: 0.01,
            nl_max: 2.0,
            nu: UpperRange::AboveLower { max: 4.0 },
            resolution: DEFAULT_SWEEP_RESOLUTION,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoeffWindow {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    pub resolution: usize,
}

impl Default for CoeffWindow {
    fn default() -> Self {
        Self {
            alpha_min: DEFAULT_COEFF_FLOOR,
            alpha_max: 1.0,
            beta_min: DEFAULT_COEFF_FLOOR,
            beta_max: 1.0,
            resolution: DEFAULT_SWEEP_RESOLUTION,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Floors {
    pub coeff: f64,
    pub population: f64,
}

impl Default for Floors {
    fn default() -> Self {
        Self {
            coeff: DEFAULT_COEFF_FLOOR,
            population: DEFAULT_POPULATION_FLOOR,
        }
    }
}

fn linspace(lo: f64, hi: f64, k: usize, count: usize) -> f64 {
    if count == 1 || k == 0 {
        lo
    } else if k + 1 == count {
        hi
    } else {
        lo + (hi - lo) * (k as f64 / (count - 1) as f64)
    }
}

/// Classifies a grid of `(nl, nu)` bounds for fixed coefficients.
pub fn sweep_population_bounds(alpha: f64, beta: f64, window: &BoundsWindow, floors: Floors) -> Result<SweepResult> {
    let res = window.resolution;
    if res < 2 {
        return Err(Error::InvalidArgument(format!("sweep resolution must be at least 2, got {res}")));
    }
    if !(window.nl_min >= floors.population && window.nl_min < window.nl_max) {
        return Err(Error::InvalidArgument(format!(
            "lower-bound window [{}, {}] must start at or above eps2 = {}",
            window.nl_min, window.nl_max, floors.population
        )));
    }
    // Validate the coefficients once.
    crate::glv::MayLeonardParams::with_floor(alpha, beta, floors.coeff)?;

    let rows: Vec<Vec<Cell>> = (0..res)
        .into_par_iter()
        .map(|a| {
            let nl = linspace(window.nl_min, window.nl_max, a, res);
            (0..res)
                .filter_map(|b| {
                    let nu = match window.nu {
                        UpperRange::Fixed { min, max } => linspace(min, max, b, res),
                        UpperRange::AboveLower { max } => nl + (max - nl) * ((b + 1) as f64 / res as f64),
                    };
                    if !(nu > nl) {
                        return None;
                    }
                    let v = may_leonard_sos_condition_with_floors(alpha, beta, nl, nu, floors.coeff, floors.population)
                        .ok()?;
                    Some(Cell { x: nl, y: nu, sos: v.decision })
                })
                .collect()
        })
        .collect();
    let cells: Vec<Cell> = rows.into_iter().flatten().collect();

    let mut segments = Vec::new();
    let mut notes = Vec::new();
    let tri = triangle_vertices(alpha, beta);
    if let Some([_, _, (apex, _)]) = tri {
        let s = alpha + beta;
        let e = floors.population;
        segments.push(Segment {
            id: 0,
            label: "(1-nl)/nu = alpha+beta".into(),
            points: vec![(e, (1.0 - e) / s), (apex, apex)],
        });
        segments.push(Segment {
            id: 1,
            label: "(1-nu)/nl = alpha+beta".into(),
            points: vec![(e, 1.0 - s * e), (apex, apex)],
        });
        segments.push(Segment {
            id: 2,
            label: "nl = eps2 (excluded edge)".into(),
            points: vec![(e, 1.0 - s * e), (e, (1.0 - e) / s)],
        });
        notes.push(format!(
            "the triangle edge nl = 0 is excluded; lower bounds are clamped to eps2 = {e:e}"
        ));
    } else {
        notes.push("alpha + beta > 1: no population bounds give an invariant cube".into());
    }
    let empty = tri.is_none() && cells.iter().all(|c| !c.sos);
    Ok(SweepResult { cells, segments, empty, notes })
}

/// Bounding sums of the `(alpha, beta)` trapezoid for fixed bounds:
/// `lower <= alpha + beta <= upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapezoidLines {
    pub upper: f64,
    pub lower: f64,
    pub empty: bool,
}

pub fn trapezoid_lines(nl: f64, nu: f64, coeff_floor: f64) -> TrapezoidLines {
    let upper = (1.0 - nl) / nu;
    let lower = (2.0 * coeff_floor).max((1.0 - nu) / nl);
    TrapezoidLines {
        upper,
        lower,
        empty: upper < lower,
    }
}

fn clip_sum_line(c: f64, w: &CoeffWindow) -> Option<Vec<(f64, f64)>> {
    let a0 = w.alpha_min.max(c - w.beta_max);
    let a1 = w.alpha_max.min(c - w.beta_min);
    (a0 <= a1).then(|| vec![(a0, c - a0), (a1, c - a1)])
}

/// Classifies a grid of coefficient pairs for fixed bounds `[nl, nu]`.
pub fn sweep_competition_coeffs(nl: f64, nu: f64, window: &CoeffWindow, floors: Floors) -> Result<SweepResult> {
    let res = window.resolution;
    if res < 2 {
        return Err(Error::InvalidArgument(format!("sweep resolution must be at least 2, got {res}")));
    }
    crate::sos::check_population_bounds(nl, nu, floors.population)?;
    if !(window.alpha_min >= floors.coeff && window.beta_min >= floors.coeff)
        || !(window.alpha_min < window.alpha_max && window.beta_min < window.beta_max)
    {
        return Err(Error::InvalidArgument(format!(
            "coefficient window must lie in [eps1, inf)^2 with eps1 = {}",
            floors.coeff
        )));
    }
    let cells: Vec<Cell> = (0..res)
        .into_par_iter()
        .map(|a| {
            let alpha = linspace(window.alpha_min, window.alpha_max, a, res);
            (0..res)
                .map(|b| {
                    let beta = linspace(window.beta_min, window.beta_max, b, res);
                    let sos = may_leonard_sos_condition_with_floors(alpha, beta, nl, nu, floors.coeff, floors.population)
                        .map(|v| v.decision)
                        .unwrap_or(false);
                    Cell { x: alpha, y: beta, sos }
                })
                .collect::<Vec<_>>()
        })
        .flatten()
        .collect();

    let lines = trapezoid_lines(nl, nu, floors.coeff);
    let mut segments = Vec::new();
    let mut notes = Vec::new();
    if !lines.empty {
        for (label, c) in [("alpha+beta = (1-nl)/nu", lines.upper), ("alpha+beta = max(2 eps1, (1-nu)/nl)", lines.lower)] {
            if let Some(points) = clip_sum_line(c, window) {
                segments.push(Segment {
                    id: segments.len(),
                    label: label.into(),
                    points,
                });
            }
        }
    } else {
        notes.push(format!(
            "(1-nl)/nu = {} is below the lower bounding sum {}: region is empty",
            lines.upper, lines.lower
        ));
    }
    let empty = lines.empty && cells.iter().all(|c| !c.sos);
    Ok(SweepResult { cells, segments, empty, notes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_corners() {
        let v = triangle_vertices(0.2, 0.05).unwrap();
        assert_eq!(v[0], (0.0, 1.0));
        assert!((v[1].1 - 4.0).abs() < 1e-12 && v[1].0 == 0.0);
        assert!((v[2].0 - 0.8).abs() < 1e-12 && (v[2].1 - 0.8).abs() < 1e-12);
        let v = triangle_vertices(0.5, 0.5).unwrap();
        assert_eq!(v, [(0.0, 1.0), (0.0, 1.0), (0.5, 0.5)]);
        assert!(triangle_vertices(0.8, 1.3).is_none());
    }

    fn find(res: &SweepResult, x: f64, y: f64) -> Cell {
        *res.cells
            .iter()
            .min_by(|a, b| {
                let da = (a.x - x).abs() + (a.y - y).abs();
                let db = (b.x - x).abs() + (b.y - y).abs();
                da.total_cmp(&db)
            })
            .unwrap()
    }

    #[test]
    fn bounds_sweep_case_points() {
        let w = BoundsWindow {
            nl_min: 0.25,
            nl_max: 1.25,
            nu: UpperRange::Fixed { min: 0.5, max: 3.5 },
            resolution: 5,
        };
        let res = sweep_population_bounds(0.2, 0.05, &w, Floors::default()).unwrap();
        let c = find(&res, 0.5, 2.0);
        assert!((c.x - 0.5).abs() < 1e-12 && (c.y - 2.0).abs() < 1e-12);
        assert!(c.sos);
        let w = BoundsWindow { nu: UpperRange::Fixed { min: 0.25, max: 3.25 }, ..w };
        let res = sweep_population_bounds(0.2, 0.05, &w, Floors::default()).unwrap();
        let c = find(&res, 0.75, 3.25);
        assert!((c.x - 0.75).abs() < 1e-12 && (c.y - 3.25).abs() < 1e-12);
        assert!(!c.sos);
        assert_eq!(res.segments.len(), 3);
        assert!(!res.empty);
    }

    #[test]
    fn bounds_sweep_empty_for_large_coefficients() {
        let res = sweep_population_bounds(0.8, 1.3, &BoundsWindow { resolution: 41, ..Default::default() }, Floors::default()).unwrap();
        assert_eq!(res.true_count(), 0);
        assert_eq!(res.cells.len(), 41 * 41);
        assert!(res.empty && res.segments.is_empty());
    }

    #[test]
    fn coeff_sweep() {
        let w = CoeffWindow { alpha_max: 0.5, beta_max: 0.5, resolution: 51, ..Default::default() };
        let res = sweep_competition_coeffs(0.5, 2.0, &w, Floors::default()).unwrap();
        let l = trapezoid_lines(0.5, 2.0, DEFAULT_COEFF_FLOOR);
        assert!((l.upper - 0.25).abs() < 1e-15);
        assert!(find(&res, 0.1, 0.05).sos);
        assert!(!find(&res, 0.3, 0.3).sos);
        for c in &res.cells {
            let mirrored = find(&res, c.y, c.x);
            assert_eq!(c.sos, mirrored.sos, "{c:?}");
        }
        let l = trapezoid_lines(0.75, 3.25, DEFAULT_COEFF_FLOOR);
        assert!((l.upper - 0.25 / 3.25).abs() < 1e-15);
        let res = sweep_competition_coeffs(1.2, 2.0, &w, Floors::default()).unwrap();
        assert!(res.empty && res.true_count() == 0);
        assert!(sweep_competition_coeffs(2.0, 1.0, &w, Floors::default()).is_err());
    }
}
