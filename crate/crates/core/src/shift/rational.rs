//! Exact polynomial algebra over the rationals, used only while building
//! shift tables.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Univariate polynomial with exact rational coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn binomial(n: usize, k: usize) -> BigRational {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    BigRational::from_integer(acc)
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigRational::zero());
        }
        RationalPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * t + c)
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    pub fn add(&self, other: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = BigRational::zero();
        RationalPoly::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).unwrap_or(&zero) + other.coeffs.get(i).unwrap_or(&zero)
                })
                .collect(),
        )
    }

    /// Legendre polynomial `p_l` on `[-1, 1]`.
    pub fn legendre(l: usize) -> RationalPoly {
        let mut prev = vec![int(1)];
        if l == 0 {
            return RationalPoly::new(prev);
        }
        let mut cur = vec![int(0), int(1)];
        for n in 1..l {
            let mut next = vec![BigRational::zero(); n + 2];
            let a = int(2 * n as i64 + 1);
            let b = int(n as i64);
            for (i, c) in cur.iter().enumerate() {
                next[i + 1] += &a * c;
            }
            for (i, c) in prev.iter().enumerate() {
                next[i] -= &b * c;
            }
            let d = int(n as i64 + 1);
            for c in next.iter_mut() {
                *c /= &d;
            }
            prev = cur;
            cur = next;
        }
        RationalPoly::new(cur)
    }

    /// Legendre polynomial mapped to the unit cell, `p_l(2x - 1)`.
    #[allow(clippy::needless_range_loop)]
    pub fn unit_cell_legendre(l: usize) -> RationalPoly {
        let p = RationalPoly::legendre(l);
        // expand sum_k a_k (2x - 1)^k
        let mut out = vec![BigRational::zero(); p.coeffs.len()];
        for (k, a) in p.coeffs.iter().enumerate() {
            for i in 0..=k {
                let sign = if (k - i) % 2 == 0 { int(1) } else { int(-1) };
                let two_i = int(1i64 << i);
                out[i] += a * binomial(k, i) * two_i * sign;
            }
        }
        RationalPoly::new(out)
    }
}

impl fmt::Display for RationalPoly {
    /// Writes the polynomial in the variable `d`, e.g. `1 - d` or `1/2*d^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            let unit = mag.is_one();
            match (i, unit) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "d")?,
                (1, false) => write!(f, "{mag}*d")?,
                (_, true) => write!(f, "d^{i}")?,
                (_, false) => write!(f, "{mag}*d^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Bivariate polynomial `sum c[i][j] x^i d^j`.
#[derive(Debug, Clone)]
pub(crate) struct Bivariate {
    c: Vec<Vec<BigRational>>,
}

impl Bivariate {
    /// `q(x - d + s)` for a univariate `q` and an integer offset `s`.
    #[allow(clippy::needless_range_loop)]
    pub(crate) fn translated(q: &RationalPoly, s: i64) -> Bivariate {
        let n = q.coeffs.len();
        let mut c = vec![vec![BigRational::zero(); n]; n];
        let s = int(s);
        for (k, a) in q.coeffs.iter().enumerate() {
            // (x + (s - d))^k = sum_i C(k,i) x^i (s - d)^(k-i)
            for i in 0..=k {
                let r = k - i;
                for j in 0..=r {
                    // (s - d)^r = sum_j C(r,j) s^(r-j) (-d)^j
                    let mut term = a * binomial(k, i) * binomial(r, j);
                    let mut spow = BigRational::one();
                    for _ in 0..(r - j) {
                        spow *= &s;
                    }
                    term *= spow;
                    if j % 2 == 1 {
                        term = -term;
                    }
                    c[i][j] += term;
                }
            }
        }
        Bivariate { c }
    }

    /// Multiplies by a polynomial in `x` only.
    pub(crate) fn mul_x(&self, p: &RationalPoly) -> Bivariate {
        let nx = self.c.len() + p.coeffs.len() - 1;
        let nd = self.c.first().map_or(0, Vec::len);
        let mut c = vec![vec![BigRational::zero(); nd]; nx];
        for (i, row) in self.c.iter().enumerate() {
            for (k, a) in p.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in row.iter().enumerate() {
                    c[i + k][j] += a * b;
                }
            }
        }
        Bivariate { c }
    }

    /// Antiderivative in `x` vanishing at `x = 0`.
    pub(crate) fn integrate_x(&self) -> Bivariate {
        let nd = self.c.first().map_or(0, Vec::len);
        let mut c = vec![vec![BigRational::zero(); nd]; self.c.len() + 1];
        for (i, row) in self.c.iter().enumerate() {
            let div = int(i as i64 + 1);
            for (j, b) in row.iter().enumerate() {
                c[i + 1][j] = b / &div;
            }
        }
        Bivariate { c }
    }

    /// Substitutes a constant for `x`.
    pub(crate) fn at_x(&self, x: &BigRational) -> RationalPoly {
        let nd = self.c.first().map_or(0, Vec::len);
        let mut out = vec![BigRational::zero(); nd];
        let mut xp = BigRational::one();
        for row in &self.c {
            for (j, b) in row.iter().enumerate() {
                out[j] += b * &xp;
            }
            xp *= x;
        }
        RationalPoly::new(out)
    }

    /// Substitutes `x = d`.
    pub(crate) fn on_diagonal(&self) -> RationalPoly {
        let nd = self.c.first().map_or(0, Vec::len);
        let mut out = vec![BigRational::zero(); self.c.len() + nd];
        for (i, row) in self.c.iter().enumerate() {
            for (j, b) in row.iter().enumerate() {
                out[i + j] += b;
            }
        }
        RationalPoly::new(out)
    }
}

#[cfg(test)]
pub(crate) fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
