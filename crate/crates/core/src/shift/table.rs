use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::rational::{Bivariate, RationalPoly};

/// Overlap integrals of a unit-cell Legendre basis function against a
/// translated one, as polynomials in the fractional shift `d` in `[0, 1)`.
///
/// With `P_l(x) = p_l(2x - 1)` on `[0, 1]`:
///
/// * `same[l][m](d)     = int_d^1 P_l(x) P_m(x - d) dx`
/// * `neighbor[l][m](d) = int_0^d P_l(x) P_m(x - d + 1) dx`
///
/// The first is the contribution of the cell's own previous content, the
/// second that of the upwind (left) neighbor. Both are independent of the
/// physical cell width.
#[derive(Debug, Clone)]
pub struct ShiftTable {
    degree: usize,
    same_exact: Vec<RationalPoly>,
    neighbor_exact: Vec<RationalPoly>,
    same: Vec<Vec<f64>>,
    neighbor: Vec<Vec<f64>>,
}

impl ShiftTable {
    /// Builds the table for polynomial degree `degree` by exact rational
    /// integration.
    pub fn new(degree: usize) -> Self {
        let n = degree + 1;
        let basis: Vec<RationalPoly> = (0..n).map(RationalPoly::unit_cell_legendre).collect();
        let one = BigRational::from_integer(BigInt::from(1));
        let zero = BigRational::from_integer(BigInt::from(0));
        let mut same_exact = Vec::with_capacity(n * n);
        let mut neighbor_exact = Vec::with_capacity(n * n);
        for pl in &basis {
            for pm in &basis {
                let same = Bivariate::translated(pm, 0).mul_x(pl).integrate_x();
                // int_d^1 = F(1) - F(d)
                let s = same.at_x(&one).add(&negate(&same.on_diagonal()));
                let nb = Bivariate::translated(pm, 1).mul_x(pl).integrate_x();
                // int_0^d = F(d) - F(0)
                let t = nb.on_diagonal().add(&negate(&nb.at_x(&zero)));
                same_exact.push(s);
                neighbor_exact.push(t);
            }
        }
        let same = same_exact.iter().map(RationalPoly::to_f64_coeffs).collect();
        let neighbor = neighbor_exact.iter().map(RationalPoly::to_f64_coeffs).collect();
        ShiftTable {
            degree,
            same_exact,
            neighbor_exact,
            same,
            neighbor,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of basis functions per direction, `degree + 1`.
    pub fn basis_len(&self) -> usize {
        self.degree + 1
    }

    pub fn same_exact(&self, l: usize, m: usize) -> &RationalPoly {
        &self.same_exact[l * self.basis_len() + m]
    }

    pub fn neighbor_exact(&self, l: usize, m: usize) -> &RationalPoly {
        &self.neighbor_exact[l * self.basis_len() + m]
    }

    /// Evaluates both tables at `d`, writing row-major `(l, m)` matrices.
    pub fn eval_into(&self, d: f64, same: &mut [f64], neighbor: &mut [f64]) {
        for (out, p) in same.iter_mut().zip(&self.same) {
            *out = horner(p, d);
        }
        for (out, p) in neighbor.iter_mut().zip(&self.neighbor) {
            *out = horner(p, d);
        }
    }

    pub fn same_at(&self, l: usize, m: usize, d: f64) -> f64 {
        horner(&self.same[l * self.basis_len() + m], d)
    }

    pub fn neighbor_at(&self, l: usize, m: usize, d: f64) -> f64 {
        horner(&self.neighbor[l * self.basis_len() + m], d)
    }

    /// Plain-text listing of every entry as an exact rational polynomial in `d`.
    pub fn to_text(&self) -> String {
        let n = self.basis_len();
        let mut s = String::new();
        let _ = writeln!(s, "# shift table, degree {}", self.degree);
        for l in 0..n {
            for m in 0..n {
                let _ = writeln!(s, "same[{l}][{m}](d) = {}", self.same_exact(l, m));
            }
        }
        for l in 0..n {
            for m in 0..n {
                let _ = writeln!(s, "neighbor[{l}][{m}](d) = {}", self.neighbor_exact(l, m));
            }
        }
        s
    }
}

fn negate(p: &RationalPoly) -> RationalPoly {
    RationalPoly::new(p.coeffs().iter().map(|c| -c.clone()).collect())
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
}
