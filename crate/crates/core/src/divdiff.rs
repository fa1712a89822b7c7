//! First and second divided differences of the scalar functions that generate
//! the tensor functions used in this crate (`½ log`, `exp(s·)` and integer
//! powers). Close arguments are handled by Taylor series about the mean, so
//! the values stay accurate through eigenvalue coalescence and reduce to the
//! derivative limits `f'`, `f''/2` exactly when arguments coincide.

use crate::tensor::tol_eig;

pub trait ScalarFunction {
    fn value(&self, x: f64) -> f64;

    /// `f[a, b]`, equal to `f'(a)` when `a == b`.
    fn d1(&self, a: f64, b: f64) -> f64;

    /// `f[a, b, c]`, equal to `f''(a)/2` when all arguments coincide.
    fn d2(&self, a: f64, b: f64, c: f64) -> f64;
}

/// Complete homogeneous symmetric polynomial of degree `k` in `xs`.
pub(crate) fn complete_homogeneous(k: i32, xs: &[f64]) -> f64 {
    if k < 0 {
        return 0.0;
    }
    let k = k as usize;
    match xs.len() {
        0 => {
            if k == 0 {
                1.0
            } else {
                0.0
            }
        }
        1 => xs[0].powi(k as i32),
        _ => {
            // h_k(x, rest) = Σ_j x^j h_{k-j}(rest)
            let (x, rest) = (xs[0], &xs[1..]);
            let mut s = 0.0;
            let mut p = 1.0;
            for j in 0..=k {
                s += p * complete_homogeneous((k - j) as i32, rest);
                p *= x;
            }
            s
        }
    }
}

/// Sum `Σ_{n≥order} c_n h_{n-order}(d)` for Taylor coefficients `c_n` about the mean.
fn taylor_divided(coeffs: &[f64], order: usize, dev: &[f64]) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .skip(order)
        .map(|(n, c)| c * complete_homogeneous((n - order) as i32, dev))
        .sum()
}

fn sort3(a: f64, b: f64, c: f64) -> (f64, f64, f64) {
    let mut v = [a, b, c];
    v.sort_by(|x, y| y.total_cmp(x));
    (v[0], v[1], v[2])
}

const SERIES_TERMS: usize = 16;

/// `f(λ) = ½ log λ`, the generator of `log U` from the eigenvalues of `C`.
#[derive(Debug, Clone, Copy)]
pub struct HalfLog;

impl HalfLog {
    fn taylor(m: f64) -> [f64; SERIES_TERMS] {
        // c_n = ½ (-1)^{n+1} / (n m^n)
        let mut c = [0.0; SERIES_TERMS];
        c[0] = 0.5 * m.ln();
        let mut mp = 1.0;
        for (n, cn) in c.iter_mut().enumerate().skip(1) {
            mp *= m;
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            *cn = 0.5 * sign / (n as f64 * mp);
        }
        c
    }
}

impl ScalarFunction for HalfLog {
    fn value(&self, x: f64) -> f64 {
        0.5 * x.ln()
    }

    fn d1(&self, a: f64, b: f64) -> f64 {
        let d = a - b;
        if d.abs() <= tol_eig(a.max(b)) {
            // coalesced: limit (2λ)⁻¹ evaluated at the midpoint
            return 1.0 / (a + b);
        }
        // ½ log(a/b) = atanh(r) with r = (a-b)/(a+b); no cancellation
        let r = d / (a + b);
        let ratio = if r.abs() < 1e-4 {
            let r2 = r * r;
            1.0 + r2 / 3.0 + r2 * r2 / 5.0 + r2 * r2 * r2 / 7.0
        } else {
            r.atanh() / r
        };
        ratio / (a + b)
    }

    fn d2(&self, a: f64, b: f64, c: f64) -> f64 {
        let (x, y, z) = sort3(a, b, c);
        let spread = x - z;
        if spread > 1e-2 * x {
            return (self.d1(x, y) - self.d1(y, z)) / spread;
        }
        let m = (x + y + z) / 3.0;
        taylor_divided(&Self::taylor(m), 2, &[x - m, y - m, z - m])
    }
}

/// `f(x) = exp(s x)`; with `s = 2i` it maps `log U` to `C^i`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledExp(pub f64);

impl ScaledExp {
    fn taylor(&self, m: f64) -> [f64; SERIES_TERMS] {
        let s = self.0;
        let mut c = [0.0; SERIES_TERMS];
        let mut t = (s * m).exp();
        for (n, cn) in c.iter_mut().enumerate() {
            *cn = t;
            t *= s / (n as f64 + 1.0);
        }
        c
    }
}

impl ScalarFunction for ScaledExp {
    fn value(&self, x: f64) -> f64 {
        (self.0 * x).exp()
    }

    fn d1(&self, a: f64, b: f64) -> f64 {
        let s = self.0;
        let d = a - b;
        let m = 0.5 * (a + b);
        let h = 0.5 * s * d;
        // e^{sm} · sinh(h)/h · s, sinh(h)/h by series when h is small
        let shc = if h.abs() < 1e-4 {
            1.0 + h * h / 6.0 + h.powi(4) / 120.0
        } else {
            h.sinh() / h
        };
        s * (s * m).exp() * shc
    }

    fn d2(&self, a: f64, b: f64, c: f64) -> f64 {
        let (x, y, z) = sort3(a, b, c);
        let spread = x - z;
        if (self.0 * spread).abs() > 1e-2 {
            return (self.d1(x, y) - self.d1(y, z)) / spread;
        }
        let m = (x + y + z) / 3.0;
        taylor_divided(&self.taylor(m), 2, &[x - m, y - m, z - m])
    }
}

/// `f(x) = x^i`; divided differences are exact polynomials.
#[derive(Debug, Clone, Copy)]
pub struct Power(pub u32);

impl ScalarFunction for Power {
    fn value(&self, x: f64) -> f64 {
        x.powi(self.0 as i32)
    }

    fn d1(&self, a: f64, b: f64) -> f64 {
        complete_homogeneous(self.0 as i32 - 1, &[a, b])
    }

    fn d2(&self, a: f64, b: f64, c: f64) -> f64 {
        complete_homogeneous(self.0 as i32 - 2, &[a, b, c])
    }
}
