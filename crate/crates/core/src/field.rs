//! Charge density and the self-consistent electric field.
//!
//! `E' = rho - 1` on a periodic interval with `E` of zero mean. The field is
//! obtained by exact per-cell antidifferentiation of the Legendre series and
//! a sequential prefix pass that chains the cells together; this pass is the
//! one inherently serial part of a time step.

use crate::error::{Error, Result};
use crate::legendre::legendre_all;
use crate::projection::DGField;

/// Residual net charge tolerated by [`electric_field`], relative to the period.
pub const NEUTRALITY_TOLERANCE: f64 = 1e-8;

/// Piecewise polynomial on `N` uniform cells of a periodic interval `[0, N h]`,
/// stored as per-cell Legendre coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePoly1D {
    width: f64,
    degree: usize,
    coeffs: Vec<f64>,
    zero_mean: bool,
}

impl PiecewisePoly1D {
    pub fn new(width: f64, degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidArgument(format!("cell width must be positive, got {width}")));
        }
        if coeffs.is_empty() || !coeffs.len().is_multiple_of(degree + 1) {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients do not fill cells of degree {degree}",
                coeffs.len()
            )));
        }
        Ok(PiecewisePoly1D { width, degree, coeffs, zero_mean: false })
    }

    pub fn zeros(n_cells: usize, width: f64, degree: usize) -> Self {
        PiecewisePoly1D {
            width,
            degree,
            coeffs: vec![0.0; n_cells * (degree + 1)],
            zero_mean: true,
        }
    }

    pub fn n_cells(&self) -> usize {
        self.coeffs.len() / (self.degree + 1)
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn period(&self) -> f64 {
        self.width * self.n_cells() as f64
    }

    /// True when the polynomial was constructed to have zero mean.
    pub fn is_zero_mean(&self) -> bool {
        self.zero_mean
    }

    pub fn cell(&self, i: usize) -> &[f64] {
        let b = self.degree + 1;
        &self.coeffs[i * b..(i + 1) * b]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn integral(&self) -> f64 {
        let b = self.degree + 1;
        self.width * self.coeffs.chunks(b).map(|c| c[0]).sum::<f64>()
    }

    /// Value at reference coordinate `xi` in `[-1, 1]` of cell `i`.
    pub fn eval_reference(&self, i: usize, xi: f64) -> f64 {
        let mut p = [0.0; crate::legendre::MAX_DEGREE + 2];
        let b = self.degree + 1;
        legendre_all(xi, &mut p[..b]);
        self.cell(i).iter().zip(&p[..b]).map(|(c, p)| c * p).sum()
    }

    /// Point value; `x` is wrapped into the period. Interior edges belong to
    /// the cell on their right.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.n_cells();
        let period = self.period();
        let mut t = x.rem_euclid(period);
        if x == period {
            t = period;
        }
        let mut i = (t / self.width).floor() as usize;
        if i >= n {
            i = n - 1;
        }
        let xi = 2.0 * (t - i as f64 * self.width) / self.width - 1.0;
        self.eval_reference(i, xi)
    }
}

/// Charge density `rho(x) = int f dv`. Only the `m = 0` velocity modes have
/// non-zero integral, so cell `i` gets coefficients `h_v sum_j b[i][j][k][0]`.
pub fn density(f: &DGField) -> PiecewisePoly1D {
    let g = f.grid();
    let b = g.basis_len();
    let mut coeffs = vec![0.0; g.nx() * b];
    for i in 0..g.nx() {
        for j in 0..g.nv() {
            let block = f.block(i, j);
            for k in 0..b {
                coeffs[i * b + k] += block[k * b];
            }
        }
    }
    for c in coeffs.iter_mut() {
        *c *= g.hv();
    }
    PiecewisePoly1D { width: g.hx(), degree: g.degree(), coeffs, zero_mean: false }
}

/// Solves `E' = rho - 1` with zero mean on the period.
///
/// The net charge must vanish to [`NEUTRALITY_TOLERANCE`] times the period;
/// the admissible residual is removed uniformly before integrating so that
/// the field stays periodic.
pub fn electric_field(rho: &PiecewisePoly1D) -> Result<PiecewisePoly1D> {
    electric_field_with_outflow(rho, 0.0)
}

/// [`electric_field`] for a density from which `outflow` has already been
/// recorded as lost through open velocity boundaries. The neutrality check
/// applies to `int rho + outflow`; the whole residual is still removed so the
/// field stays periodic.
pub fn electric_field_with_outflow(rho: &PiecewisePoly1D, outflow: f64) -> Result<PiecewisePoly1D> {
    let n = rho.n_cells();
    let h = rho.width;
    let period = rho.period();
    let total = rho.integral();
    let residual = total + outflow - period;
    let tolerance = NEUTRALITY_TOLERANCE * period;
    if !residual.is_finite() || residual.abs() > tolerance {
        return Err(Error::NotNeutral { residual, tolerance });
    }
    let background = total / period;

    let be = rho.degree + 2;
    let mut out = vec![0.0; n * be];
    let mut left_value = 0.0;
    for i in 0..n {
        let src = rho.cell(i);
        let e = &mut out[i * be..(i + 1) * be];
        for (k, &c) in src.iter().enumerate() {
            let c = if k == 0 { c - background } else { c };
            if k == 0 {
                // int_{-1}^{xi} p_0 = p_0 + p_1
                e[0] += c;
                e[1] += c;
            } else {
                // int_{-1}^{xi} p_k = (p_{k+1} - p_{k-1}) / (2k + 1)
                let s = c / (2 * k + 1) as f64;
                e[k + 1] += s;
                e[k - 1] -= s;
            }
        }
        for v in e.iter_mut() {
            *v *= 0.5 * h;
        }
        e[0] += left_value;
        // value at xi = 1: only the constant mode of the source survives
        left_value += h * (src[0] - background);
    }
    let mean = out.chunks(be).map(|c| c[0]).sum::<f64>() / n as f64;
    for c in out.chunks_mut(be) {
        c[0] -= mean;
    }
    Ok(PiecewisePoly1D { width: h, degree: rho.degree + 1, coeffs: out, zero_mean: true })
}

/// `int_0^L E(x)^2 dx`, exact from the Legendre coefficients.
pub fn electric_energy(e: &PiecewisePoly1D) -> f64 {
    let b = e.degree + 1;
    let sum: f64 = e
        .coeffs
        .chunks(b)
        .map(|c| {
            c.iter()
                .enumerate()
                .map(|(k, a)| a * a / (2 * k + 1) as f64)
                .sum::<f64>()
        })
        .sum();
    sum * e.width
}
