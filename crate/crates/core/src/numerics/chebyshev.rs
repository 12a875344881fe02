//! Chebyshev interpolation on an interval: fitting at first-kind nodes,
//! Clenshaw evaluation, and antiderivative coefficients.

/// A Chebyshev expansion `c[0]/2 + Σ_{k>=1} c[k] T_k(x)` on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chebyshev {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: Vec<f64>,
}

impl Chebyshev {
    /// Fit a degree-`n` expansion (n+1 coefficients) to `f` sampled at the
    /// Chebyshev nodes of the first kind.
    pub fn fit<F: FnMut(f64) -> f64>(lo: f64, hi: f64, n: usize, mut f: F) -> Self {
        let len = n + 1;
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let values: Vec<f64> = (0..len)
            .map(|j| {
                let theta = std::f64::consts::PI * (j as f64 + 0.5) / len as f64;
                f(mid + half * theta.cos())
            })
            .collect();
        let mut coeffs = vec![0.0; len];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, v) in values.iter().enumerate() {
                let theta = std::f64::consts::PI * (j as f64 + 0.5) / len as f64;
                acc += v * (k as f64 * theta).cos();
            }
            *c = 2.0 * acc / len as f64;
        }
        Self { lo, hi, coeffs }
    }

    /// Clenshaw evaluation. Arguments slightly outside `[lo, hi]` are
    /// clamped; the proxies are only meaningful on their own piece.
    pub fn eval(&self, x: f64) -> f64 {
        let t = ((2.0 * x - self.lo - self.hi) / (self.hi - self.lo)).clamp(-1.0, 1.0);
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + 0.5 * self.coeffs[0]
    }

    /// Coefficients of the antiderivative, normalized so that it vanishes
    /// at `lo`.
    pub fn antiderivative(&self) -> Chebyshev {
        let n = self.coeffs.len();
        let half = 0.5 * (self.hi - self.lo);
        let mut out = vec![0.0; n + 1];
        let c = |k: usize| -> f64 {
            if k < n {
                self.coeffs[k]
            } else {
                0.0
            }
        };
        for k in 1..=n {
            let prev = if k == 1 { 2.0 * 0.5 * self.coeffs[0] } else { c(k - 1) };
            out[k] = half * (prev - c(k + 1)) / (2.0 * k as f64);
        }
        let mut anti = Chebyshev { lo: self.lo, hi: self.hi, coeffs: out };
        let at_lo = anti.eval(self.lo);
        anti.coeffs[0] -= 2.0 * at_lo;
        anti
    }

    /// Magnitude of the trailing coefficients, a cheap proxy for the
    /// truncation error of the fit.
    pub fn tail_estimate(&self) -> f64 {
        let n = self.coeffs.len();
        self.coeffs[n.saturating_sub(3)..].iter().fold(0.0f64, |a, c| a.max(c.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits_and_evaluates_exp() {
        let ch = Chebyshev::fit(-1.0, 2.0, 24, f64::exp);
        for &x in &[-1.0, -0.3, 0.0, 0.7, 1.9, 2.0] {
            assert!((ch.eval(x) - x.exp()).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn antiderivative_of_exp() {
        let ch = Chebyshev::fit(0.5, 3.0, 30, f64::exp);
        let anti = ch.antiderivative();
        for &x in &[0.5f64, 1.0, 2.2, 3.0] {
            let exact = x.exp() - 0.5f64.exp();
            assert!((anti.eval(x) - exact).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn exact_for_low_degree_polynomials() {
        let ch = Chebyshev::fit(-2.0, 5.0, 8, |x| 3.0 * x * x * x - x + 4.0);
        for &x in &[-2.0, -1.0, 0.0, 2.5, 5.0] {
            let exact = 3.0 * x * x * x - x + 4.0;
            assert!((ch.eval(x) - exact).abs() < 1e-11 * (1.0 + exact.abs()));
        }
    }
}
