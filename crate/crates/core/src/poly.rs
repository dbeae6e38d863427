//! Small dense polynomials in monomial form, used for shift functions that
//! vary across a transverse cell.

use crate::legendre::legendre_monomial_coeffs;

/// Polynomial `c[0] + c[1] t + ... + c[n] t^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Poly { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Poly { coeffs: vec![c] }
    }

    /// Converts a Legendre series `sum_k a_k p_k(t)` into monomial form.
    pub fn from_legendre(series: &[f64]) -> Self {
        let mut out = vec![0.0; series.len().max(1)];
        for (k, &a) in series.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (i, c) in legendre_monomial_coeffs(k).into_iter().enumerate() {
                out[i] += a * c;
            }
        }
        Poly::new(out)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly::constant(0.0);
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| i as f64 * c)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn all_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// Sorted real roots of `self(t) = level` inside the open interval `(a, b)`.
    ///
    /// The interval is cut into monotone pieces at the roots of the derivative
    /// (found recursively), and every sign change is then bisected.
    pub fn roots_of_level(&self, level: f64, a: f64, b: f64) -> Vec<f64> {
        let shifted = {
            let mut c = self.coeffs.clone();
            c[0] -= level;
            Poly::new(c)
        };
        shifted.roots_in(a, b)
    }

    pub fn roots_in(&self, a: f64, b: f64) -> Vec<f64> {
        if self.is_constant() {
            return Vec::new();
        }
        if self.degree() == 1 {
            let r = -self.coeffs[0] / self.coeffs[1];
            return if r > a && r < b { vec![r] } else { Vec::new() };
        }
        let mut knots = vec![a];
        knots.extend(self.derivative().roots_in(a, b));
        knots.push(b);
        let mut roots = Vec::new();
        for w in knots.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let (flo, fhi) = (self.eval(lo), self.eval(hi));
            if flo == 0.0 {
                if lo > a {
                    roots.push(lo);
                }
                continue;
            }
            if flo.signum() == fhi.signum() || fhi == 0.0 {
                continue;
            }
            roots.push(bisect(|t| self.eval(t), lo, hi, flo));
        }
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|x, y| (*x - *y).abs() <= 1e-14);
        roots
    }

    /// Cut points of `(a, b)` where `floor(self(t))` changes value.
    pub fn integer_crossings(&self, a: f64, b: f64) -> Vec<f64> {
        if self.is_constant() {
            return Vec::new();
        }
        let mut knots = vec![a];
        knots.extend(self.derivative().roots_in(a, b));
        knots.push(b);
        let mut cuts = Vec::new();
        for w in knots.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let (flo, fhi) = (self.eval(lo), self.eval(hi));
            let (vmin, vmax) = if flo <= fhi { (flo, fhi) } else { (fhi, flo) };
            let first = vmin.floor() as i64 + 1;
            let last = vmax.ceil() as i64 - 1;
            for k in first..=last {
                let level = k as f64;
                let g = |t: f64| self.eval(t) - level;
                cuts.push(bisect(g, lo, hi, flo - level));
            }
            // an interior knot sitting exactly on an integer is itself a cut
            if hi < b && fhi == fhi.floor() {
                cuts.push(hi);
            }
        }
        cuts.retain(|&t| t > a && t < b);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14);
        cuts
    }
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, flo: f64) -> f64 {
    let slo = flo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-15 {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
