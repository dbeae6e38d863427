//! Independent oracles shared by the property and acceptance suites.
//!
//! None of these reuse the solver's shift tables or antidifferentiation:
//! they integrate sampled values with generous Gauss rules on pieces where
//! the integrand is a polynomial.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use sldg_core::field::PiecewisePoly1D;
use sldg_core::legendre::{gauss_rule, legendre_all, legendre_eval};
use sldg_core::poly::Poly;
use sldg_core::shift::{Boundary, RationalPoly};
use sldg_core::{DGField, GridSpec};

/// Value of a line of cells (unit width, layout `[cell][along][trans]`) at
/// along-coordinate `y` (cell `c` spans `[c, c + 1]`) and transverse `eta`.
fn line_value(input: &[f64], b: usize, y: f64, eta: f64, boundary: Boundary) -> f64 {
    let n = input.len() / (b * b);
    let c = y.floor();
    let idx = match boundary {
        Boundary::Periodic => (c as i64).rem_euclid(n as i64) as usize,
        Boundary::ZeroInflow => {
            if c < 0.0 || c >= n as f64 {
                return 0.0;
            }
            c as usize
        }
    };
    let xi = 2.0 * (y - c) - 1.0;
    let block = &input[idx * b * b..(idx + 1) * b * b];
    let mut s = 0.0;
    for m in 0..b {
        for k in 0..b {
            s += block[m * b + k] * legendre_eval(m, xi) * legendre_eval(k, eta);
        }
    }
    s
}

/// Points in `(-1, 1)` where `floor(delta(eta))` changes, by dense scanning
/// and bisection.
pub fn floor_crossings(delta: &Poly) -> Vec<f64> {
    let samples = 4000;
    let mut cuts = Vec::new();
    let at = |i: usize| -1.0 + 2.0 * i as f64 / samples as f64;
    for i in 0..samples {
        let (mut a, mut b) = (at(i), at(i + 1));
        let (fa, fb) = (delta.eval(a).floor(), delta.eval(b).floor());
        if fa == fb {
            continue;
        }
        for _ in 0..80 {
            let mid = 0.5 * (a + b);
            if delta.eval(mid).floor() == fa {
                a = mid;
            } else {
                b = mid;
            }
        }
        cuts.push(0.5 * (a + b));
    }
    cuts
}

/// Exact translate-then-project of a line by `delta(eta)` cell widths,
/// computed by sampling the shifted input on polynomial pieces.
pub fn shift_oracle(input: &[f64], degree: usize, delta: &Poly, boundary: Boundary) -> Vec<f64> {
    let b = degree + 1;
    let n = input.len() / (b * b);
    let rule = gauss_rule(24).unwrap();
    let mut edges = vec![-1.0];
    edges.extend(floor_crossings(delta));
    edges.push(1.0);
    let mut out = vec![0.0; input.len()];
    let mut pl = vec![0.0; b];
    let mut pj = vec![0.0; b];
    for i in 0..n {
        for w in edges.windows(2) {
            let (e0, e1) = (w[0], w[1]);
            for (t, wt) in rule.iter() {
                let eta = 0.5 * (e0 + e1) + 0.5 * (e1 - e0) * t;
                let weta = 0.5 * (e1 - e0) * wt;
                legendre_all(eta, &mut pj);
                let start = i as f64 - delta.eval(eta);
                // the source crosses a cell edge once inside the target cell
                let k = start.floor() + 1.0;
                let mut xs = vec![-1.0];
                let cut = 2.0 * (k - start) - 1.0;
                if cut > -1.0 && cut < 1.0 {
                    xs.push(cut);
                }
                xs.push(1.0);
                for wx in xs.windows(2) {
                    let (a0, a1) = (wx[0], wx[1]);
                    for (s, ws) in rule.iter() {
                        let xi = 0.5 * (a0 + a1) + 0.5 * (a1 - a0) * s;
                        let wxi = 0.5 * (a1 - a0) * ws;
                        let y = start + 0.5 * (xi + 1.0);
                        let u = line_value(input, b, y, eta, boundary);
                        legendre_all(xi, &mut pl);
                        for l in 0..b {
                            for j in 0..b {
                                out[(i * b + l) * b + j] += weta * wxi * pl[l] * pj[j] * u;
                            }
                        }
                    }
                }
            }
        }
        for l in 0..b {
            for j in 0..b {
                out[(i * b + l) * b + j] *= (2 * l + 1) as f64 * (2 * j + 1) as f64 / 4.0;
            }
        }
    }
    out
}

/// `E(x) = int_0^L K(x, y) (rho(y) - 1) dy` with the zero-mean periodic kernel
/// `K(x, y) = H(x - y) - 1 + y / L`.
pub fn kernel_field(rho: &PiecewisePoly1D, x: f64) -> f64 {
    let n = rho.n_cells();
    let h = rho.width();
    let period = rho.period();
    let rule = gauss_rule(16).unwrap();
    let mut total = 0.0;
    for i in 0..n {
        let (c0, c1) = (i as f64 * h, (i + 1) as f64 * h);
        let mut pieces = vec![c0];
        if x > c0 && x < c1 {
            pieces.push(x);
        }
        pieces.push(c1);
        for w in pieces.windows(2) {
            let (a, b) = (w[0], w[1]);
            for (t, wt) in rule.iter() {
                let y = 0.5 * (a + b) + 0.5 * (b - a) * t;
                let xi = 2.0 * (y - c0) / h - 1.0;
                let s = rho.eval_reference(i, xi) - 1.0;
                let k = if y < x { 1.0 } else { 0.0 } - 1.0 + y / period;
                total += 0.5 * (b - a) * wt * k * s;
            }
        }
    }
    total
}

fn rational_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact `int_{-1}^{1} p_a p_b p_c` as a rational number.
pub fn triple_product_exact(a: usize, b: usize, c: usize) -> f64 {
    let pa = RationalPoly::legendre(a);
    let pb = RationalPoly::legendre(b);
    let pc = RationalPoly::legendre(c);
    let prod = rational_mul(&rational_mul(pa.coeffs(), pb.coeffs()), pc.coeffs());
    let mut sum = BigRational::zero();
    for (k, q) in prod.iter().enumerate() {
        if k % 2 == 0 {
            sum += q * BigRational::new(BigInt::from(2), BigInt::from(k as i64 + 1));
        }
    }
    sum.to_f64().unwrap()
}

/// Largest pointwise difference between a field and a function over a
/// `(degree + 3)^2` uniform sample of every cell.
pub fn max_error<G: Fn(f64, f64) -> f64>(f: &DGField, g: G) -> f64 {
    let grid = f.grid();
    let s = grid.degree() + 3;
    let mut worst: f64 = 0.0;
    for i in 0..grid.nx() {
        for j in 0..grid.nv() {
            for a in 0..s {
                let xi = -1.0 + 2.0 * (a as f64 + 0.5) / s as f64;
                let x = grid.x_left(i) + 0.5 * grid.hx() * (xi + 1.0);
                for c in 0..s {
                    let eta = -1.0 + 2.0 * (c as f64 + 0.5) / s as f64;
                    let v = grid.v_left(j) + 0.5 * grid.hv() * (eta + 1.0);
                    worst = worst.max((f.eval_reference(i, j, xi, eta) - g(x, v)).abs());
                }
            }
        }
    }
    worst
}

/// Least-squares slope of `ln e` against `ln h`.
pub fn fitted_order(h: &[f64], e: &[f64]) -> f64 {
    let n = h.len() as f64;
    let lx: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Deterministic pseudo-random numbers in `[-0.5, 0.5)`.
pub fn filler(len: usize, seed: u64) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.random::<f64>() - 0.5).collect()
}

/// Random piecewise polynomial with unit mean on `[0, L]`.
pub fn neutral_density(n: usize, period: f64, degree: usize, seed: u64) -> PiecewisePoly1D {
    let b = degree + 1;
    let mut c = filler(n * b, seed);
    let mean = c.chunks(b).map(|x| x[0]).sum::<f64>() / n as f64;
    for cell in c.chunks_mut(b) {
        cell[0] += 1.0 - mean;
    }
    PiecewisePoly1D::new(period / n as f64, degree, c).unwrap()
}

/// Projection that splits the x-integral at a known discontinuity.
pub fn project_split<G: Fn(f64, f64) -> f64>(g: G, grid: &GridSpec, x0: f64) -> DGField {
    let b = grid.basis_len();
    let rule = gauss_rule(grid.degree() + 6).unwrap();
    let mut f = DGField::zeros(*grid);
    for i in 0..grid.nx() {
        let (a, c) = (grid.x_left(i), grid.x_left(i) + grid.hx());
        let mut pieces = vec![a];
        if x0 > a && x0 < c {
            pieces.push(x0);
        }
        pieces.push(c);
        for j in 0..grid.nv() {
            for w in pieces.windows(2) {
                for (s, ws) in rule.iter() {
                    let x = 0.5 * (w[0] + w[1]) + 0.5 * (w[1] - w[0]) * s;
                    let xi = 2.0 * (x - a) / grid.hx() - 1.0;
                    let wx = (w[1] - w[0]) / grid.hx() * ws;
                    for (t, wt) in rule.iter() {
                        let v = grid.v_left(j) + 0.5 * grid.hv() * (t + 1.0);
                        let val = g(x, v);
                        for k in 0..b {
                            for m in 0..b {
                                let scale = (2 * k + 1) as f64 * (2 * m + 1) as f64 / 4.0;
                                let add = scale
                                    * wx
                                    * wt
                                    * legendre_eval(k, xi)
                                    * legendre_eval(m, t)
                                    * val;
                                let old = f.coeff(i, j, k, m);
                                f.set_coeff(i, j, k, m, old + add);
                            }
                        }
                    }
                }
            }
        }
    }
    f
}
