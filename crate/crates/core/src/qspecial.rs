//! q-series special functions: q-Pochhammer symbols, the q-Gamma function,
//! the continuously extended ratio `Γ(γ+1)/Γ_m(γ+1)`, q-binomial
//! coefficients, and the Mittag-Leffler function.
//!
//! All moment formulas of the resetting construction reduce to these
//! primitives in the parameter `m = c^α`.

use crate::{Error, Result};

/// Relative tolerance for infinite-product truncation.
const PRODUCT_TOL: f64 = 1e-16;

/// A validated base `q ∈ (0, 1)` for the q-functions.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct QValue(f64);

impl QValue {
    pub fn new(q: f64) -> Result<Self> {
        if q > 0.0 && q < 1.0 {
            Ok(QValue(q))
        } else {
            Err(Error::domain(format!("q must lie in (0, 1), got {q}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Order of a q-Pochhammer product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Finite(usize),
    Infinite,
}

/// The real gamma function, delegated to a Lanczos-grade implementation
/// with reflection for negative arguments.
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// `(ln|Γ(x)|, sign)` for real non-pole `x`.
pub fn signed_ln_gamma(x: f64) -> (f64, f64) {
    if x > 0.0 {
        (statrs::function::gamma::ln_gamma(x), 1.0)
    } else {
        // Reflection: Γ(x)Γ(1-x) = π / sin(πx).
        let s = (std::f64::consts::PI * x).sin();
        if s == 0.0 {
            return (f64::INFINITY, 0.0);
        }
        let ln = (std::f64::consts::PI / s.abs()).ln() - statrs::function::gamma::ln_gamma(1.0 - x);
        (ln, s.signum())
    }
}

/// Reciprocal gamma `1/Γ(x)`, zero at the poles `x ∈ -ℕ₀`.
pub fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && (x - x.round()).abs() < 1e-300 {
        return 0.0;
    }
    let (ln, sign) = signed_ln_gamma(x);
    if ln > 700.0 {
        0.0
    } else {
        sign * (-ln).exp()
    }
}

/// q-Pochhammer symbol `(a; q)_n = ∏_{j=0}^{n-1} (1 - a q^j)`.
///
/// For `n = ∞` the product is truncated once the remaining tail is below
/// `1e-16` relative and closed with its first-order bound, which keeps the
/// result accurate to about `1e-15` relative. Arguments `a > 1` are
/// accepted; the leading factors are then negative but the product is still
/// well defined (it vanishes only when some factor is exactly zero).
pub fn q_pochhammer(a: f64, q: f64, n: Order) -> Result<f64> {
    let q = QValue::new(q)?.get();
    match n {
        Order::Finite(n) => {
            let mut prod = 1.0;
            let mut qj = 1.0;
            for _ in 0..n {
                prod *= 1.0 - a * qj;
                qj *= q;
            }
            Ok(prod)
        }
        Order::Infinite => {
            let mut prod = 1.0;
            let mut qj = 1.0;
            let tail_bound = PRODUCT_TOL * (1.0 - q);
            for _ in 0..100_000 {
                if (a * qj).abs() < tail_bound {
                    break;
                }
                prod *= 1.0 - a * qj;
                qj *= q;
            }
            // ∑_{j>=J} ln(1 - a q^j) ≈ -a q^J / (1 - q).
            let tail = -a * qj / (1.0 - q);
            Ok(prod * tail.exp())
        }
    }
}

/// `(q; q)_n` for finite n, computed directly.
pub fn qq_finite(q: f64, n: usize) -> f64 {
    let mut prod = 1.0;
    let mut qj = q;
    for _ in 0..n {
        prod *= 1.0 - qj;
        qj *= q;
    }
    prod
}

/// `(q; q)_∞`.
pub fn qq_infinite(q: f64) -> f64 {
    q_pochhammer(q, q, Order::Infinite).expect("q validated by caller")
}

/// q-Gamma function `Γ_q(x) = (1-q)^{1-x} (q;q)_∞ / (q^x;q)_∞`.
///
/// Poles at `x ∈ -ℕ₀` are reported as errors.
pub fn q_gamma(q: f64, x: f64) -> Result<f64> {
    let qv = QValue::new(q)?.get();
    if x <= 0.0 && (x - x.round()).abs() < 1e-12 {
        return Err(Error::pole(format!("Γ_q has a pole at x = {x}")));
    }
    let numer = qq_infinite(qv);
    let denom = q_pochhammer(qv.powf(x), qv, Order::Infinite)?;
    if denom == 0.0 {
        return Err(Error::pole(format!("Γ_q has a pole at x = {x}")));
    }
    Ok((1.0 - qv).powf(1.0 - x) * numer / denom)
}

/// The Pochhammer-product factor `(1 - m^x)/x`, continuously extended by
/// `log(1/m)` at `x = 0`. This is the building block of every moment
/// product and of the `Γ/Γ_m` extension.
pub fn pochhammer_factor(m: f64, x: f64) -> f64 {
    let l = m.ln(); // negative
    if x == 0.0 {
        return -l;
    }
    // 1 - m^x = -expm1(x ln m), accurate for all x including x -> 0.
    -(x * l).exp_m1() / x
}

/// The ratio `Γ(γ+1)/Γ_m(γ+1)`, continuously extended to all real `γ`.
///
/// For `γ ∈ -ℕ` the value is the limiting one, with the factor at
/// `k + γ = 0` replaced by `log(1/m)`; the same shifted product keeps the
/// evaluation stable near those points.
pub fn gamma_ratio(g: f64, m: f64) -> Result<f64> {
    let m = QValue::new(m)?.get();
    // Shift γ by N so that γ + N > 1/2, then evaluate the ratio directly.
    let shift = if g > 0.5 { 0 } else { (1.0 - g).ceil() as usize };
    let mut prefactor = (1.0 - m).powi(-(shift as i32));
    for k in 1..=shift {
        prefactor *= pochhammer_factor(m, g + k as f64);
    }
    let x = g + shift as f64 + 1.0;
    // Γ(x)/Γ_m(x) with x > 3/2: all pieces are regular.
    let gm = q_gamma(m, x)?;
    Ok(prefactor * gamma(x) / gm)
}

/// q-binomial coefficient `Γ_q(n+1) / (Γ_q(k+1) Γ_q(n-k+1))` for real
/// arguments; for integers `0 <= k <= n` it reduces to the Gaussian
/// binomial coefficient.
pub fn q_binomial(n: f64, k: f64, q: f64) -> Result<f64> {
    let top = q_gamma(q, n + 1.0)?;
    let left = q_gamma(q, k + 1.0)?;
    let right = q_gamma(q, n - k + 1.0)?;
    Ok(top / (left * right))
}

/// Mittag-Leffler function `E_{α,β}(t) = Σ_n t^n / Γ(αn + β)`, with the
/// series started at the first index where `αn + β > 0`.
pub fn mittag_leffler(alpha: f64, beta: f64, t: f64) -> Result<f64> {
    if alpha <= 0.0 {
        return Err(Error::domain("mittag_leffler needs alpha > 0"));
    }
    let n0 = if beta > 0.0 { 0 } else { ((-beta) / alpha).floor() as usize + 1 };
    let mut sum = 0.0f64;
    let mut n = n0;
    loop {
        let term = if t == 0.0 && n > 0 {
            0.0
        } else {
            let (ln_g, sign) = signed_ln_gamma(alpha * n as f64 + beta);
            if sign == 0.0 {
                0.0
            } else {
                let ln_t = if n == 0 { 0.0 } else { n as f64 * t.abs().ln() };
                let magnitude = (ln_t - ln_g).exp();
                let t_sign = if t < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
                sign * t_sign * magnitude
            }
        };
        sum += term;
        n += 1;
        if n > n0 + 4 && term.abs() < 1e-16 * sum.abs().max(1e-300) {
            break;
        }
        if n > 100_000 {
            return Err(Error::numeric("mittag_leffler series did not converge"));
        }
    }
    Ok(sum)
}
