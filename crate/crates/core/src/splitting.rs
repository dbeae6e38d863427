//! Strang splitting: half step in `x`, field solve, full step in `v`, half
//! step in `x`. Each sub-step is an exact advection followed by projection.
//!
//! Within a sub-step the lines (rows for the `x` step, columns for the `v`
//! step) are independent and processed in parallel; their results are
//! combined in a fixed order so the output does not depend on the number of
//! worker threads.

use rayon::prelude::*;

use crate::diagnostics::{Record, TimeSeries};
use crate::error::{Error, Result};
use crate::field::{density, electric_energy, electric_field_with_outflow, PiecewisePoly1D};
use crate::poly::Poly;
use crate::problems::{Dynamics, ProblemSpec};
use crate::projection::{project, DGField, GridSpec, Norm};
use crate::shift::{Boundary, LineOperator, ShiftTable};

/// Distribution function plus bookkeeping after `step` steps.
#[derive(Debug, Clone)]
pub struct StepperState {
    pub field: DGField,
    pub time: f64,
    pub step: usize,
    /// Net mass that left through zero-inflow boundaries so far. It is
    /// signed: outflow of a slightly negative discrete tail reduces it, which
    /// keeps `mass + lost_mass` constant to rounding.
    pub lost_mass: f64,
}

impl StepperState {
    pub fn new(field: DGField) -> Self {
        StepperState { field, time: 0.0, step: 0, lost_mass: 0.0 }
    }
}

/// Output of [`run`].
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub series: TimeSeries,
    pub state: StepperState,
}

/// Split-step integrator for one grid degree and one kind of dynamics.
#[derive(Debug, Clone)]
pub struct Stepper {
    table: ShiftTable,
    dynamics: Dynamics,
}

impl Stepper {
    pub fn new(degree: usize, dynamics: Dynamics) -> Self {
        Stepper { table: ShiftTable::new(degree), dynamics }
    }

    pub fn dynamics(&self) -> Dynamics {
        self.dynamics
    }

    pub fn table(&self) -> &ShiftTable {
        &self.table
    }

    fn check_grid(&self, f: &DGField) -> Result<()> {
        if f.grid().degree() != self.table.degree() {
            return Err(Error::InvalidArgument(format!(
                "field has degree {}, stepper was built for {}",
                f.grid().degree(),
                self.table.degree()
            )));
        }
        Ok(())
    }

    /// Free streaming in `x` over `dt`: every velocity row is shifted by
    /// `g(v) dt` with `g(v) = v` (Vlasov) or `-omega v` (rotation).
    ///
    /// For degree 0 the row's cell-centre speed is used, which is the
    /// projection of `g` onto the constants.
    pub fn step_a(&self, f: &DGField, dt: f64) -> Result<(DGField, f64)> {
        self.check_grid(f)?;
        if !dt.is_finite() {
            return Err(Error::NonFinite { context: "time step", value: dt });
        }
        if dt == 0.0 {
            return Ok((f.clone(), 0.0));
        }
        let grid = *f.grid();
        let (slope, boundary) = match self.dynamics {
            Dynamics::SolidRotation { omega, .. } => (-omega, Boundary::ZeroInflow),
            _ => (1.0, Boundary::Periodic),
        };
        let bs = grid.block_len();
        let (nx, nv) = (grid.nx(), grid.nv());
        let scale = slope * dt / grid.hx();
        let rows: Vec<(Vec<f64>, f64)> = (0..nv)
            .into_par_iter()
            .map(|j| -> Result<(Vec<f64>, f64)> {
                let delta = transverse_affine(grid.v_center(j), grid.hv(), grid.degree()).scale(scale);
                let op = LineOperator::new(&delta, &self.table)?;
                let mut line = Vec::with_capacity(nx * bs);
                for i in 0..nx {
                    line.extend_from_slice(f.block(i, j));
                }
                let mut out = vec![0.0; line.len()];
                op.apply(&line, boundary, &mut out);
                let lost = line_mass(&line, bs) - line_mass(&out, bs);
                Ok((out, lost))
            })
            .collect::<Result<_>>()?;
        let mut g = DGField::zeros(grid);
        let mut lost = 0.0;
        for (j, (row, l)) in rows.iter().enumerate() {
            for i in 0..nx {
                g.block_mut(i, j).copy_from_slice(&row[i * bs..(i + 1) * bs]);
            }
            lost += l;
        }
        let lost = match boundary {
            Boundary::Periodic => 0.0,
            Boundary::ZeroInflow => lost * grid.hx() * grid.hv(),
        };
        Ok((g, lost))
    }

    /// Acceleration in `v` over `dt` by the per-column speed `speed(i)`, a
    /// polynomial in the reference coordinate of x-cell `i` in physical units.
    /// Zero inflow at `+-v_max`; the mass that leaves is returned.
    pub fn step_b_with<S>(&self, f: &DGField, speed: S, dt: f64) -> Result<(DGField, f64)>
    where
        S: Fn(usize) -> Poly + Sync,
    {
        self.check_grid(f)?;
        if !dt.is_finite() {
            return Err(Error::NonFinite { context: "time step", value: dt });
        }
        if dt == 0.0 {
            return Ok((f.clone(), 0.0));
        }
        let grid = *f.grid();
        let b = grid.basis_len();
        let bs = grid.block_len();
        let nv = grid.nv();
        let scale = dt / grid.hv();
        let mut out = vec![0.0; f.coeffs().len()];
        let lost: Vec<f64> = out
            .par_chunks_mut(nv * bs)
            .enumerate()
            .map(|(i, column_out)| -> Result<f64> {
                let delta = speed(i).scale(scale);
                let op = LineOperator::new(&delta, &self.table)?;
                // along the line is v (index m), transverse is x (index k)
                let mut line = vec![0.0; nv * bs];
                for j in 0..nv {
                    let src = f.block(i, j);
                    let dst = &mut line[j * bs..(j + 1) * bs];
                    for k in 0..b {
                        for m in 0..b {
                            dst[m * b + k] = src[k * b + m];
                        }
                    }
                }
                let mut shifted = vec![0.0; nv * bs];
                op.apply(&line, Boundary::ZeroInflow, &mut shifted);
                for j in 0..nv {
                    let src = &shifted[j * bs..(j + 1) * bs];
                    let dst = &mut column_out[j * bs..(j + 1) * bs];
                    for k in 0..b {
                        for m in 0..b {
                            dst[k * b + m] = src[m * b + k];
                        }
                    }
                }
                Ok(line_mass(&line, bs) - line_mass(&shifted, bs))
            })
            .collect::<Result<_>>()?;
        let lost = lost.iter().sum::<f64>() * grid.hx() * grid.hv();
        Ok((DGField::from_coeffs(grid, out)?, lost))
    }

    /// Velocity step driven by the electric field: `f(x, v - dt E(x))`.
    pub fn step_b(&self, f: &DGField, e: &PiecewisePoly1D, dt: f64) -> Result<(DGField, f64)> {
        if e.n_cells() != f.grid().nx() {
            return Err(Error::InvalidArgument(format!(
                "field has {} cells, grid has {}",
                e.n_cells(),
                f.grid().nx()
            )));
        }
        self.step_b_with(f, |i| Poly::from_legendre(e.cell(i)), dt)
    }

    /// One Strang step of length `tau`.
    ///
    /// The first half step doubles as the midpoint state from which the
    /// electric field is computed.
    pub fn strang_step(&self, state: &StepperState, tau: f64) -> Result<StepperState> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidArgument(format!("time step must be positive, got {tau}")));
        }
        let (half, lost_a1) = self.step_a(&state.field, 0.5 * tau)?;
        let (accelerated, lost_b) = match self.dynamics {
            Dynamics::VlasovPoisson => {
                let e = electric_field_with_outflow(&density(&half), state.lost_mass + lost_a1)?;
                self.step_b(&half, &e, tau)?
            }
            Dynamics::FreeStreaming => (half, 0.0),
            Dynamics::SolidRotation { omega, x_axis } => {
                let grid = *half.grid();
                self.step_b_with(
                    &half,
                    |i| transverse_affine(grid.x_center(i) - x_axis, grid.hx(), grid.degree()).scale(omega),
                    tau,
                )?
            }
        };
        let (field, lost_a2) = self.step_a(&accelerated, 0.5 * tau)?;
        if let Some(bad) = field.coeffs().iter().copied().find(|c| !c.is_finite()) {
            return Err(Error::NonFinite { context: "distribution function", value: bad });
        }
        Ok(StepperState {
            field,
            time: state.time + tau,
            step: state.step + 1,
            lost_mass: state.lost_mass + lost_a1 + lost_b + lost_a2,
        })
    }

    /// Diagnostics row for the current state.
    pub fn record(&self, state: &StepperState) -> Result<Record> {
        let energy = if self.dynamics.has_field() {
            electric_energy(&electric_field_with_outflow(&density(&state.field), state.lost_mass)?)
        } else {
            0.0
        };
        Ok(Record {
            time: state.time,
            electric_energy: energy,
            mass: state.field.mass(),
            l2_norm: state.field.norm(Norm::L2),
            lost_mass: state.lost_mass,
        })
    }
}

/// `c + (h/2) eta` as a polynomial in the reference coordinate, or just `c`
/// for degree 0.
fn transverse_affine(center: f64, width: f64, degree: usize) -> Poly {
    if degree == 0 {
        Poly::constant(center)
    } else {
        Poly::new(vec![center, 0.5 * width])
    }
}

fn line_mass(line: &[f64], bs: usize) -> f64 {
    line.chunks(bs).map(|c| c[0]).sum()
}

/// `x` free-streaming step with a fresh shift table.
pub fn step_a(f: &DGField, dt: f64) -> Result<DGField> {
    Stepper::new(f.grid().degree(), Dynamics::VlasovPoisson)
        .step_a(f, dt)
        .map(|(g, _)| g)
}

/// `v` step driven by `e`; returns the new field and the mass lost at `+-v_max`.
pub fn step_b(f: &DGField, e: &PiecewisePoly1D, dt: f64) -> Result<(DGField, f64)> {
    Stepper::new(f.grid().degree(), Dynamics::VlasovPoisson).step_b(f, e, dt)
}

/// Number of steps and the length of the last one for horizon `t_max`.
pub fn step_schedule(tau: f64, t_max: f64) -> (usize, f64) {
    if t_max <= 0.0 {
        return (0, 0.0);
    }
    let n = (t_max / tau - 1e-9).ceil().max(1.0) as usize;
    let last = t_max - (n - 1) as f64 * tau;
    let last = if (last - tau).abs() <= 1e-12 * tau { tau } else { last };
    (n, last)
}

/// Minimum Gauss nodes per direction when projecting initial data, enough to
/// keep the projected Maxwellian neutral on coarse velocity grids.
pub const INITIAL_NODES: usize = 12;

/// Projects the problem's initial condition onto `grid`.
pub fn initial_field(problem: &ProblemSpec, grid: &GridSpec) -> Result<DGField> {
    project(problem.initial_condition(), grid, (grid.degree() + 4).max(INITIAL_NODES))
}

/// Integrates `problem` on `grid` to time `t_max`, recording diagnostics
/// every `record_every` steps and at the end.
pub fn run(
    problem: &ProblemSpec,
    grid: &GridSpec,
    tau: f64,
    t_max: f64,
    record_every: usize,
) -> Result<RunOutput> {
    run_with(problem, grid, tau, t_max, record_every, |_| {})
}

/// [`run`] with a callback invoked after every step.
pub fn run_with<F>(
    problem: &ProblemSpec,
    grid: &GridSpec,
    tau: f64,
    t_max: f64,
    record_every: usize,
    mut on_step: F,
) -> Result<RunOutput>
where
    F: FnMut(&StepperState),
{
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {tau}")));
    }
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon must be non-negative, got {t_max}")));
    }
    let record_every = record_every.max(1);
    let stepper = Stepper::new(grid.degree(), problem.dynamics());
    let mut state = StepperState::new(initial_field(problem, grid)?);
    let mut series = TimeSeries::new();
    series.push(stepper.record(&state)?)?;
    let (n_steps, last) = step_schedule(tau, t_max);
    for k in 0..n_steps {
        let dt = if k + 1 == n_steps { last } else { tau };
        let mut next = stepper
            .strang_step(&state, dt)
            .map_err(|e| Error::Diverged { step: k + 1, source: Box::new(e) })?;
        next.time = if k + 1 == n_steps { t_max } else { (k + 1) as f64 * tau };
        state = next;
        on_step(&state);
        if (k + 1) % record_every == 0 || k + 1 == n_steps {
            let rec = stepper
                .record(&state)
                .map_err(|e| Error::Diverged { step: k + 1, source: Box::new(e) })?;
            series.push(rec)?;
        }
    }
    Ok(RunOutput { series, state })
}
