//! Time-series diagnostics, errors against reference solutions, decay-rate
//! fits, recurrence detection and convergence studies.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::legendre::gauss_rule;
use crate::problems::ProblemSpec;
use crate::projection::{DGField, GridSpec};
use crate::splitting::{initial_field, run};

/// One diagnostics sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub time: f64,
    pub electric_energy: f64,
    pub mass: f64,
    pub l2_norm: f64,
    pub lost_mass: f64,
}

impl Record {
    fn values(&self) -> [f64; 5] {
        [self.time, self.electric_energy, self.mass, self.l2_norm, self.lost_mass]
    }
}

pub const TIME_SERIES_HEADER: &str = "time,electric_energy,mass,l2_norm,lost_mass";

/// Records with strictly increasing times and finite entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeSeries {
    records: Vec<Record>,
}

impl TimeSeries {
    pub fn new() -> Self {
        TimeSeries::default()
    }

    pub fn push(&mut self, r: Record) -> Result<()> {
        if let Some(bad) = r.values().into_iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite { context: "diagnostics record", value: bad });
        }
        if let Some(last) = self.records.last() {
            if r.time <= last.time {
                return Err(Error::InvalidArgument(format!(
                    "record time {} does not increase past {}",
                    r.time, last.time
                )));
            }
        }
        self.records.push(r);
        Ok(())
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&Record> {
        self.records.last()
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.time).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.electric_energy).collect()
    }

    /// Builds a series from `(time, energy)` pairs, leaving the other
    /// columns zero.
    pub fn from_energy(times: &[f64], energy: &[f64]) -> Result<Self> {
        let mut s = TimeSeries::new();
        for (&time, &electric_energy) in times.iter().zip(energy) {
            s.push(Record { time, electric_energy, mass: 0.0, l2_norm: 0.0, lost_mass: 0.0 })?;
        }
        Ok(s)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut s = String::with_capacity(self.records.len() * 120 + 64);
        let _ = writeln!(s, "{TIME_SERIES_HEADER}");
        for r in &self.records {
            let v = r.values();
            let _ = writeln!(s, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", v[0], v[1], v[2], v[3], v[4]);
        }
        w.write_all(s.as_bytes())?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        if header.trim() != TIME_SERIES_HEADER {
            return Err(Error::Parse(format!("unexpected header `{header}`")));
        }
        let mut s = TimeSeries::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let v: Vec<f64> = line
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad value `{t}`"))))
                .collect::<Result<_>>()?;
            if v.len() != 5 {
                return Err(Error::Parse(format!("expected 5 columns, got {}", v.len())));
            }
            s.push(Record { time: v[0], electric_energy: v[1], mass: v[2], l2_norm: v[3], lost_mass: v[4] })?;
        }
        Ok(s)
    }
}

/// Merged, sorted cell edges of two uniform partitions of `[lo, hi]`.
fn union_edges(lo: f64, hi: f64, n1: usize, n2: usize) -> Vec<f64> {
    let h1 = (hi - lo) / n1 as f64;
    let h2 = (hi - lo) / n2 as f64;
    let mut e: Vec<f64> = (0..=n1)
        .map(|i| lo + i as f64 * h1)
        .chain((0..=n2).map(|i| lo + i as f64 * h2))
        .collect();
    e.sort_by(f64::total_cmp);
    let tol = 1e-12 * (hi - lo);
    e.dedup_by(|a, b| (*a - *b).abs() <= tol);
    e
}

fn reference_coord(t: f64, lo: f64, h: f64, n: usize) -> (usize, f64) {
    let c = (((t - lo) / h).floor().max(0.0) as usize).min(n - 1);
    (c, 2.0 * (t - lo - c as f64 * h) / h - 1.0)
}

/// L2 distance between `f` and `reference` on their common domain.
///
/// The integral runs over the union of both grids' cells with a Gauss rule
/// that is exact for the squared difference of the two piecewise polynomials.
pub fn l2_error_vs_reference(f: &DGField, reference: &DGField) -> Result<f64> {
    let (gf, gr) = (f.grid(), reference.grid());
    if !gf.same_domain(gr) {
        return Err(Error::IncompatibleGrids(format!(
            "domains differ: [0, {}]x[-{0}, {}] vs [0, {}]x[-{}, {}]",
            gf.length(),
            gf.v_max(),
            gr.length(),
            gr.v_max(),
            gr.v_max()
        )));
    }
    if gr.nx() < gf.nx() || gr.nv() < gf.nv() || gr.degree() < gf.degree() {
        return Err(Error::IncompatibleGrids(
            "reference must be at least as fine and of at least the same degree".into(),
        ));
    }
    let rule = gauss_rule(gf.degree().max(gr.degree()) + 2)?;
    let xs = union_edges(0.0, gf.length(), gf.nx(), gr.nx());
    let vs = union_edges(-gf.v_max(), gf.v_max(), gf.nv(), gr.nv());
    let per_strip: Vec<f64> = xs
        .par_windows(2)
        .map(|wx| {
            let (x0, x1) = (wx[0], wx[1]);
            let mut acc = 0.0;
            for wv in vs.windows(2) {
                let (v0, v1) = (wv[0], wv[1]);
                let mut cell = 0.0;
                for (a, wa) in rule.iter() {
                    let x = 0.5 * (x0 + x1) + 0.5 * (x1 - x0) * a;
                    let (fi, fxi) = reference_coord(x, 0.0, gf.hx(), gf.nx());
                    let (ri, rxi) = reference_coord(x, 0.0, gr.hx(), gr.nx());
                    for (c, wc) in rule.iter() {
                        let v = 0.5 * (v0 + v1) + 0.5 * (v1 - v0) * c;
                        let (fj, feta) = reference_coord(v, -gf.v_max(), gf.hv(), gf.nv());
                        let (rj, reta) = reference_coord(v, -gr.v_max(), gr.hv(), gr.nv());
                        let d = f.eval_reference(fi, fj, fxi, feta) - reference.eval_reference(ri, rj, rxi, reta);
                        cell += wa * wc * d * d;
                    }
                }
                acc += cell * 0.25 * (x1 - x0) * (v1 - v0);
            }
            acc
        })
        .collect();
    Ok(per_strip.iter().sum::<f64>().sqrt())
}

/// L2 distance between a field and a function, by Gauss quadrature with
/// `degree + 6` points per direction in every cell.
pub fn l2_error_vs_function<G>(f: &DGField, g: G) -> f64
where
    G: Fn(f64, f64) -> f64 + Sync,
{
    let grid = f.grid();
    let rule = gauss_rule(grid.degree() + 6).expect("positive node count");
    let per_column: Vec<f64> = (0..grid.nx())
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0;
            for j in 0..grid.nv() {
                for (a, wa) in rule.iter() {
                    let x = grid.x_left(i) + 0.5 * grid.hx() * (a + 1.0);
                    for (c, wc) in rule.iter() {
                        let v = grid.v_left(j) + 0.5 * grid.hv() * (c + 1.0);
                        let d = f.eval_reference(i, j, a, c) - g(x, v);
                        acc += wa * wc * d * d;
                    }
                }
            }
            acc
        })
        .collect();
    (per_column.iter().sum::<f64>() * 0.25 * grid.hx() * grid.hv()).sqrt()
}

/// Interior local maxima of `y` (non-strict), refined by a parabola through
/// `(t, ln y)` at the three neighbouring samples.
fn log_maxima(t: &[f64], y: &[f64], window: (f64, f64)) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for k in 1..y.len().saturating_sub(1) {
        if t[k] < window.0 || t[k] > window.1 {
            continue;
        }
        if !(y[k] >= y[k - 1] && y[k] >= y[k + 1]) {
            continue;
        }
        if y[k - 1] <= 0.0 || y[k] <= 0.0 || y[k + 1] <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "energy must be positive near t = {}",
                t[k]
            )));
        }
        let (l0, l1, l2) = (y[k - 1].ln(), y[k].ln(), y[k + 1].ln());
        let (t0, t1, t2) = (t[k - 1], t[k], t[k + 1]);
        // vertex of the interpolating parabola
        let d01 = (l1 - l0) / (t1 - t0);
        let d12 = (l2 - l1) / (t2 - t1);
        let curv = (d12 - d01) / (t2 - t0);
        let (tm, lm) = if curv < 0.0 {
            let tv = 0.5 * (t0 + t1) - d01 / (2.0 * curv);
            let tv = tv.clamp(t0, t2);
            let lv = l1 + d01 * (tv - t1) + curv * (tv - t0) * (tv - t1);
            (tv, lv)
        } else {
            (t1, l1)
        };
        out.push((tm, lm));
    }
    Ok(out)
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    // offsets from the first point keep an exactly flat series exactly flat
    let n = points.len() as f64;
    let y0 = points[0].1;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - y0)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Damping rate `gamma` of the energy envelope `exp(-2 gamma t)`, fitted by
/// least squares to the logarithm of the local maxima inside `window`.
pub fn fit_decay_rate(series: &TimeSeries, window: (f64, f64)) -> Result<f64> {
    let t = series.times();
    let y = series.energies();
    if t.is_empty() || window.0 < t[0] || window.1 > *t.last().unwrap() || window.0 >= window.1 {
        return Err(Error::InvalidArgument(format!(
            "window ({}, {}) is not inside the series",
            window.0, window.1
        )));
    }
    let maxima = log_maxima(&t, &y, window)?;
    if maxima.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} local maxima in the window, need at least 3",
            maxima.len()
        )));
    }
    Ok(-0.5 * least_squares_slope(&maxima))
}

/// Fraction of the initial energy a later peak must reach to count as a
/// recurrence.
pub const RECURRENCE_THRESHOLD: f64 = 0.1;

/// Time between the initial energy maximum and the first later local
/// maximum above [`RECURRENCE_THRESHOLD`] of it, once the energy has fallen
/// below that level.
pub fn detect_recurrence(series: &TimeSeries) -> Option<f64> {
    let t = series.times();
    let y = series.energies();
    if y.len() < 3 {
        return None;
    }
    // initial maximum: top of the first monotone rise (usually the first sample)
    let mut start = 0;
    while start + 1 < y.len() && y[start + 1] > y[start] {
        start += 1;
    }
    let level = RECURRENCE_THRESHOLD * y[start];
    let dropped = (start..y.len()).find(|&k| y[k] < level)?;
    for k in dropped.max(1)..y.len() - 1 {
        if y[k] > level && y[k] >= y[k - 1] && y[k] > y[k + 1] {
            let maxima = log_maxima(&t[k - 1..=k + 1], &y[k - 1..=k + 1], (t[k], t[k])).ok()?;
            let peak = maxima.first().map_or(t[k], |m| m.0);
            return Some(peak - t[start]);
        }
    }
    None
}

/// One row of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub resolution: usize,
    pub h: f64,
    pub error: f64,
}

/// Errors at a sequence of resolutions and the least-squares order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    rows: Vec<ConvergenceRow>,
    slope: f64,
}

impl ConvergenceReport {
    pub fn new(rows: Vec<ConvergenceRow>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::InsufficientData("need at least two resolutions".into()));
        }
        if let Some(r) = rows.iter().find(|r| !(r.error > 0.0 && r.error.is_finite() && r.h > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "errors and step sizes must be positive, got error {} at h {}",
                r.error, r.h
            )));
        }
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.h.ln(), r.error.ln())).collect();
        let slope = least_squares_slope(&pts);
        Ok(ConvergenceReport { rows, slope })
    }

    pub fn rows(&self) -> &[ConvergenceRow] {
        &self.rows
    }

    /// Least-squares slope of `ln(error)` against `ln(h)`.
    pub fn slope(&self) -> f64 {
        self.slope
    }

    /// Order between consecutive rows; `None` for the first.
    pub fn observed_orders(&self) -> Vec<Option<f64>> {
        std::iter::once(None)
            .chain(self.rows.windows(2).map(|w| {
                Some((w[0].error / w[1].error).ln() / (w[0].h / w[1].h).ln())
            }))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut s = String::new();
        let _ = writeln!(s, "resolution,h,error,observed_order");
        for (r, o) in self.rows.iter().zip(self.observed_orders()) {
            let order = o.map_or(String::new(), |o| format!("{o:.16e}"));
            let _ = writeln!(s, "{},{:.16e},{:.16e},{order}", r.resolution, r.h, r.error);
        }
        let _ = writeln!(s, "# fitted order {:.6}", self.slope);
        w.write_all(s.as_bytes())?;
        Ok(())
    }
}

/// Final state of a run on an `n x n` grid.
pub fn solve_at(problem: &ProblemSpec, n: usize, degree: usize, tau: f64, t_max: f64) -> Result<DGField> {
    let grid = problem.grid(n, n, degree)?;
    Ok(run(problem, &grid, tau, t_max, usize::MAX)?.state.field)
}

/// Spatial convergence: runs on `n x n` grids for every `n` in `resolutions`
/// and measures the L2 distance to `reference` at `t_max`.
pub fn convergence_study(
    problem: &ProblemSpec,
    degree: usize,
    resolutions: &[usize],
    tau: f64,
    t_max: f64,
    reference: &DGField,
) -> Result<ConvergenceReport> {
    check_resolutions(resolutions)?;
    let largest = *resolutions.last().unwrap();
    if reference.grid().nx() < 2 * largest || reference.grid().nv() < 2 * largest {
        return Err(Error::InvalidArgument(format!(
            "reference resolution must be at least twice the largest tested ({largest})"
        )));
    }
    let rows = resolutions
        .par_iter()
        .map(|&n| -> Result<ConvergenceRow> {
            let f = solve_at(problem, n, degree, tau, t_max)?;
            let error = l2_error_vs_reference(&f, reference)?;
            Ok(ConvergenceRow { resolution: n, h: f.grid().hx(), error })
        })
        .collect::<Result<Vec<_>>>()?;
    ConvergenceReport::new(rows)
}

/// Projection-only study: L2 distance between the projected initial
/// condition and the initial condition itself.
pub fn projection_study(problem: &ProblemSpec, degree: usize, resolutions: &[usize]) -> Result<ConvergenceReport> {
    check_resolutions(resolutions)?;
    let rows = resolutions
        .iter()
        .map(|&n| -> Result<ConvergenceRow> {
            let grid = problem.grid(n, n, degree)?;
            let f = initial_field(problem, &grid)?;
            let error = l2_error_vs_function(&f, problem.initial_condition());
            Ok(ConvergenceRow { resolution: n, h: grid.hx(), error })
        })
        .collect::<Result<Vec<_>>>()?;
    ConvergenceReport::new(rows)
}

/// Temporal self-convergence on a fixed grid: every step size in `taus` is
/// compared with a run at `reference_tau`. The resolution column holds the
/// number of steps.
pub fn time_convergence_study(
    problem: &ProblemSpec,
    grid: &GridSpec,
    taus: &[f64],
    reference_tau: f64,
    t_max: f64,
) -> Result<ConvergenceReport> {
    if taus.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("step sizes must be strictly decreasing".into()));
    }
    if taus.iter().any(|&t| t <= reference_tau) {
        return Err(Error::InvalidArgument("reference step must be smaller than every tested step".into()));
    }
    let reference = run(problem, grid, reference_tau, t_max, usize::MAX)?.state.field;
    let rows = taus
        .par_iter()
        .map(|&tau| -> Result<ConvergenceRow> {
            let out = run(problem, grid, tau, t_max, usize::MAX)?;
            let error = l2_error_vs_reference(&out.state.field, &reference)?;
            Ok(ConvergenceRow { resolution: out.state.step, h: tau, error })
        })
        .collect::<Result<Vec<_>>>()?;
    ConvergenceReport::new(rows)
}

fn check_resolutions(resolutions: &[usize]) -> Result<()> {
    if resolutions.len() < 2 || resolutions.windows(2).any(|w| w[1] <= w[0]) || resolutions[0] == 0 {
        return Err(Error::InvalidArgument(
            "resolutions must be at least two strictly increasing positive counts".into(),
        ));
    }
    Ok(())
}
