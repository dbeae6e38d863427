//! Phase-space grid, the piecewise Legendre representation of the
//! distribution function, and the orthogonal projection onto it.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::legendre::{gauss_rule, legendre_all, MAX_DEGREE};

/// Uniform grid on `[0, L] x [-v_max, v_max]` with `degree`-`degree`
/// tensor Legendre polynomials in every cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    length: f64,
    v_max: f64,
    nx: usize,
    nv: usize,
    degree: usize,
}

impl GridSpec {
    pub fn new(length: f64, v_max: f64, nx: usize, nv: usize, degree: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidArgument(format!("domain length must be positive, got {length}")));
        }
        if !(v_max.is_finite() && v_max > 0.0) {
            return Err(Error::InvalidArgument(format!("v_max must be positive, got {v_max}")));
        }
        if nx == 0 || nv == 0 {
            return Err(Error::InvalidArgument("cell counts must be at least 1".into()));
        }
        if degree > MAX_DEGREE {
            return Err(Error::InvalidArgument(format!(
                "degree {degree} exceeds the supported maximum {MAX_DEGREE}"
            )));
        }
        Ok(GridSpec { length, v_max, nx, nv, degree })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn hx(&self) -> f64 {
        self.length / self.nx as f64
    }

    pub fn hv(&self) -> f64 {
        2.0 * self.v_max / self.nv as f64
    }

    /// `degree + 1`.
    pub fn basis_len(&self) -> usize {
        self.degree + 1
    }

    /// Coefficients per cell, `(degree + 1)^2`.
    pub fn block_len(&self) -> usize {
        self.basis_len() * self.basis_len()
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.nv
    }

    pub fn x_left(&self, i: usize) -> f64 {
        i as f64 * self.hx()
    }

    pub fn v_left(&self, j: usize) -> f64 {
        j as f64 * self.hv() - self.v_max
    }

    pub fn x_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.hx()
    }

    pub fn v_center(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.hv() - self.v_max
    }

    pub fn with_resolution(&self, nx: usize, nv: usize, degree: usize) -> Result<Self> {
        GridSpec::new(self.length, self.v_max, nx, nv, degree)
    }

    /// Cell containing `x`; cells are left-closed and right-open except the last.
    pub fn x_cell(&self, x: f64) -> Option<usize> {
        locate(x, 0.0, self.length, self.nx)
    }

    pub fn v_cell(&self, v: f64) -> Option<usize> {
        locate(v, -self.v_max, self.v_max, self.nv)
    }

    pub fn same_domain(&self, other: &GridSpec) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
        close(self.length, other.length) && close(self.v_max, other.v_max)
    }
}

fn locate(t: f64, lo: f64, hi: f64, n: usize) -> Option<usize> {
    if !(t >= lo && t <= hi) {
        return None;
    }
    let h = (hi - lo) / n as f64;
    let mut c = ((t - lo) / h).floor() as usize;
    // guard against rounding of (t - lo) / h near an edge
    if c >= n {
        c = n - 1;
    }
    if c + 1 < n && t >= lo + (c + 1) as f64 * h {
        c += 1;
    } else if c > 0 && t < lo + c as f64 * h {
        c -= 1;
    }
    Some(c)
}

/// L^p norm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    Linf,
}

/// Coefficients `b[i][j][k][m]` of the piecewise Legendre expansion
/// `sum_{k,m} b[i][j][k][m] P_k(x) P_m(v)` on every cell `(i, j)`.
///
/// Storage is cell-major: `(i, j)` outer, `(k, m)` inner.
#[derive(Debug, Clone, PartialEq)]
pub struct DGField {
    grid: GridSpec,
    coeffs: Vec<f64>,
}

impl DGField {
    pub fn zeros(grid: GridSpec) -> Self {
        DGField {
            coeffs: vec![0.0; grid.n_cells() * grid.block_len()],
            grid,
        }
    }

    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<f64>) -> Result<Self> {
        let expect = grid.n_cells() * grid.block_len();
        if coeffs.len() != expect {
            return Err(Error::InvalidArgument(format!(
                "coefficient vector has length {}, grid needs {expect}",
                coeffs.len()
            )));
        }
        Ok(DGField { grid, coeffs })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    fn offset(&self, i: usize, j: usize) -> usize {
        (i * self.grid.nv + j) * self.grid.block_len()
    }

    pub fn coeff(&self, i: usize, j: usize, k: usize, m: usize) -> f64 {
        self.coeffs[self.offset(i, j) + k * self.grid.basis_len() + m]
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, k: usize, m: usize, value: f64) {
        let idx = self.offset(i, j) + k * self.grid.basis_len() + m;
        self.coeffs[idx] = value;
    }

    /// The `(k, m)` block of cell `(i, j)`.
    pub fn block(&self, i: usize, j: usize) -> &[f64] {
        let o = self.offset(i, j);
        &self.coeffs[o..o + self.grid.block_len()]
    }

    pub fn block_mut(&mut self, i: usize, j: usize) -> &mut [f64] {
        let o = self.offset(i, j);
        let n = self.grid.block_len();
        &mut self.coeffs[o..o + n]
    }

    pub fn all_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// Value in cell `(i, j)` at reference coordinates `(xi, eta)` in `[-1, 1]^2`.
    pub fn eval_reference(&self, i: usize, j: usize, xi: f64, eta: f64) -> f64 {
        let b = self.grid.basis_len();
        let mut px = [0.0; MAX_DEGREE + 1];
        let mut pv = [0.0; MAX_DEGREE + 1];
        legendre_all(xi, &mut px[..b]);
        legendre_all(eta, &mut pv[..b]);
        let block = self.block(i, j);
        let mut s = 0.0;
        for k in 0..b {
            let row: f64 = (0..b).map(|m| block[k * b + m] * pv[m]).sum();
            s += px[k] * row;
        }
        s
    }

    /// Point value. Interior cell edges belong to the cell on their right;
    /// `x = L` and `v = v_max` belong to the last cell.
    pub fn evaluate(&self, x: f64, v: f64) -> Result<f64> {
        let (Some(i), Some(j)) = (self.grid.x_cell(x), self.grid.v_cell(v)) else {
            return Err(Error::OutOfDomain { x, v });
        };
        let xi = 2.0 * (x - self.grid.x_left(i)) / self.grid.hx() - 1.0;
        let eta = 2.0 * (v - self.grid.v_left(j)) / self.grid.hv() - 1.0;
        Ok(self.eval_reference(i, j, xi, eta))
    }

    /// Total integral over the phase-space domain.
    pub fn mass(&self) -> f64 {
        let bs = self.grid.block_len();
        let sum: f64 = self.coeffs.chunks(bs).map(|c| c[0]).sum();
        self.grid.hx() * self.grid.hv() * sum
    }

    /// L2 norm is exact via orthogonality; L1 and Linf are sampled.
    pub fn norm(&self, which: Norm) -> f64 {
        match which {
            Norm::L2 => self.l2_norm_squared().sqrt(),
            Norm::L1 => {
                let rule = gauss_rule(self.grid.degree + 2).expect("positive node count");
                let mut total = 0.0;
                for i in 0..self.grid.nx {
                    for j in 0..self.grid.nv {
                        for (xi, wx) in rule.iter() {
                            for (eta, wv) in rule.iter() {
                                total += wx * wv * self.eval_reference(i, j, xi, eta).abs();
                            }
                        }
                    }
                }
                total * 0.25 * self.grid.hx() * self.grid.hv()
            }
            Norm::Linf => {
                let n = self.grid.degree + 3;
                let pts: Vec<f64> = (0..n).map(|s| -1.0 + 2.0 * s as f64 / (n - 1) as f64).collect();
                let mut best: f64 = 0.0;
                for i in 0..self.grid.nx {
                    for j in 0..self.grid.nv {
                        for &xi in &pts {
                            for &eta in &pts {
                                best = best.max(self.eval_reference(i, j, xi, eta).abs());
                            }
                        }
                    }
                }
                best
            }
        }
    }

    fn l2_norm_squared(&self) -> f64 {
        let b = self.grid.basis_len();
        let weights: Vec<f64> = (0..b * b)
            .map(|km| 1.0 / (((2 * (km / b) + 1) * (2 * (km % b) + 1)) as f64))
            .collect();
        let sum: f64 = self
            .coeffs
            .chunks(b * b)
            .map(|c| c.iter().zip(&weights).map(|(a, w)| a * a * w).sum::<f64>())
            .sum();
        sum * self.grid.hx() * self.grid.hv()
    }

    /// Writes the plain-text dump: header lines, then one coefficient per
    /// line in storage order with 17 significant digits.
    pub fn write_dump<W: Write>(&self, mut w: W) -> Result<()> {
        let g = &self.grid;
        let mut s = String::with_capacity(self.coeffs.len() * 25 + 128);
        let _ = writeln!(s, "# sldg field dump; coefficients ordered i, j, k, m (m fastest)");
        let _ = writeln!(s, "L {:.16e}", g.length);
        let _ = writeln!(s, "v_max {:.16e}", g.v_max);
        let _ = writeln!(s, "N_x {}", g.nx);
        let _ = writeln!(s, "N_v {}", g.nv);
        let _ = writeln!(s, "degree {}", g.degree);
        for c in &self.coeffs {
            let _ = writeln!(s, "{c:.16e}");
        }
        w.write_all(s.as_bytes())?;
        Ok(())
    }

    pub fn read_dump<R: BufRead>(r: R) -> Result<Self> {
        let mut header: [Option<String>; 5] = Default::default();
        let keys = ["L", "v_max", "N_x", "N_v", "degree"];
        let mut coeffs = Vec::new();
        for line in r.lines() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            if let Some((key, value)) = t.split_once(char::is_whitespace) {
                let pos = keys
                    .iter()
                    .position(|k| *k == key)
                    .ok_or_else(|| Error::Parse(format!("unknown header key `{key}`")))?;
                header[pos] = Some(value.trim().to_string());
                continue;
            }
            let v: f64 = t
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient `{t}`")))?;
            coeffs.push(v);
        }
        let get = |idx: usize| {
            header[idx]
                .clone()
                .ok_or_else(|| Error::Parse(format!("missing header `{}`", keys[idx])))
        };
        let pf = |s: String| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{s}`")));
        let pu = |s: String| s.parse::<usize>().map_err(|_| Error::Parse(format!("bad count `{s}`")));
        let grid = GridSpec::new(pf(get(0)?)?, pf(get(1)?)?, pu(get(2)?)?, pu(get(3)?)?, pu(get(4)?)?)?;
        DGField::from_coeffs(grid, coeffs).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Orthogonal projection of `g` onto the grid's piecewise polynomial space,
/// using `quad_nodes_per_dim` Gauss points per direction in every cell.
pub fn project<G>(g: G, grid: &GridSpec, quad_nodes_per_dim: usize) -> Result<DGField>
where
    G: Fn(f64, f64) -> f64 + Sync,
{
    let b = grid.basis_len();
    if quad_nodes_per_dim < b {
        return Err(Error::InvalidArgument(format!(
            "projection needs at least {b} quadrature nodes per direction, got {quad_nodes_per_dim}"
        )));
    }
    let rule = gauss_rule(quad_nodes_per_dim)?;
    let nq = rule.len();
    // p_k at every node, row-major [q][k]
    let mut pvals = vec![0.0; nq * b];
    for (q, &x) in rule.nodes().iter().enumerate() {
        legendre_all(x, &mut pvals[q * b..(q + 1) * b]);
    }
    let (hx, hv) = (grid.hx(), grid.hv());
    let nv = grid.nv();
    let mut coeffs = vec![0.0; grid.n_cells() * b * b];
    coeffs
        .par_chunks_mut(b * b)
        .enumerate()
        .try_for_each(|(cell, block)| -> Result<()> {
            let (i, j) = (cell / nv, cell % nv);
            let (x0, v0) = (grid.x_left(i), grid.v_left(j));
            for (qx, (xn, wx)) in rule.iter().enumerate() {
                let x = x0 + 0.5 * hx * (xn + 1.0);
                for (qv, (vn, wv)) in rule.iter().enumerate() {
                    let v = v0 + 0.5 * hv * (vn + 1.0);
                    let val = g(x, v);
                    if !val.is_finite() {
                        return Err(Error::NonFinite { context: "projected function", value: val });
                    }
                    let w = wx * wv * val;
                    for k in 0..b {
                        let wk = w * pvals[qx * b + k];
                        for m in 0..b {
                            block[k * b + m] += wk * pvals[qv * b + m];
                        }
                    }
                }
            }
            for k in 0..b {
                for m in 0..b {
                    block[k * b + m] *= ((2 * k + 1) * (2 * m + 1)) as f64 * 0.25;
                }
            }
            Ok(())
        })?;
    DGField::from_coeffs(*grid, coeffs)
}
