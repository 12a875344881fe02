//! The mixing measures `μ_t` (atom `e^{-t}` at `u = t` plus a spline
//! density) and their weak limit `μ`, together with the generating
//! functions `φ`, `Φ`, `ϑ` and every moment formula attached to them.

use crate::qspecial::{gamma_ratio, pochhammer_factor, qq_infinite, QValue};
use crate::numerics::chebyshev::Chebyshev;
use crate::numerics::{integrate_with, QuadTarget};
use crate::splines::{truncation_level, SplineFamily};
use crate::{Error, Result};
use statrs::function::gamma::ln_gamma;
use std::sync::Arc;

/// Moment of `μ_t`: `∫ u^γ μ_t(du)`, all real `γ`, `t ∈ (0, 700]`.
///
/// The series over levels is carried in log space once `t` is large, so
/// intermediate `e^t`-scaled terms never overflow.
pub fn mu_t_moment(gamma: f64, t: f64, m: f64) -> Result<f64> {
    QValue::new(m)?;
    if !(t > 0.0 && t <= 700.0) {
        return Err(Error::domain("mu_t_moment needs t in (0, 700]"));
    }
    // ∫ u^γ μ_t(du) = e^{-t} t^γ Σ_j t^j 𝔸(γ, j), 𝔸(γ, 0) = 1.
    if t <= 30.0 {
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        let mut j = 0usize;
        let mut mj = m; // m^{j+1}
        loop {
            term *= t * pochhammer_factor(m, j as f64 + 1.0 + gamma) / (1.0 - mj);
            sum += term;
            j += 1;
            mj *= m;
            if j as f64 > t && term < 1e-18 * sum {
                break;
            }
            if j > 10_000 {
                return Err(Error::numeric("mu_t_moment series did not converge"));
            }
        }
        Ok((-t).exp() * t.powf(gamma) * sum)
    } else {
        // Peak of t^j 𝔸(γ, j) sits near j ≈ t - γ; accumulate in units of
        // the peak term. The exponent is summed with compensation: it is
        // ~t ln t large and enters an exp().
        let j0 = ((t - gamma).floor().max(1.0)) as usize;
        let mut ln_peak = j0 as f64 * t.ln();
        let mut comp = 0.0f64;
        let mut mk = m;
        for k in 1..=j0 {
            let term = (pochhammer_factor(m, k as f64 + gamma) / (1.0 - mk)).ln() - comp;
            let next = ln_peak + term;
            comp = (next - ln_peak) - term;
            ln_peak = next;
            mk *= m;
        }
        let ratio = |j: usize, mj1: f64| -> f64 {
            // T_{j+1} / T_j with m^{j+1} supplied.
            t * pochhammer_factor(m, j as f64 + 1.0 + gamma) / (1.0 - mj1)
        };
        let mut acc = 1.0f64; // T_{j0} in peak units
        // Upward sweep.
        let mut rel = 1.0;
        let mut mj1 = m.powi(j0 as i32 + 1);
        let mut j = j0;
        loop {
            rel *= ratio(j, mj1);
            if !(rel > 1e-18 * acc) || j > j0 + 100_000 {
                break;
            }
            acc += rel;
            j += 1;
            mj1 *= m;
        }
        // Downward sweep.
        rel = 1.0;
        let mut j = j0;
        let mut mj = m.powi(j0 as i32);
        while j > 0 {
            rel /= ratio(j - 1, mj);
            if !(rel > 1e-18 * acc) {
                break;
            }
            acc += rel;
            j -= 1;
            mj /= m;
        }
        Ok((-t + gamma * t.ln() + ln_peak).exp() * acc)
    }
}

/// Integer moment of `μ_t` through the iterated-integral identity
/// `∫ u^k μ_t(du) = e^{-t} k!/(m;m)_k ∫_{mt}^t ∫_{mu}^{u} ⋯ e^{u_0} du…`,
/// evaluated by a Chebyshev antiderivative recursion. Every intermediate
/// is positive, so the value is accurate to near machine precision for all
/// `k <= 30`, unlike the alternating exponential-sum closed form.
pub fn mu_t_integer_moment(k: usize, t: f64, m: f64) -> Result<f64> {
    QValue::new(m)?;
    if !(t > 0.0 && t <= 700.0) {
        return Err(Error::domain("mu_t_integer_moment needs t in (0, 700]"));
    }
    if k > 30 {
        return Err(Error::domain("mu_t_integer_moment supports k <= 30"));
    }
    if k == 0 {
        return Ok(1.0);
    }
    let width = t * (1.0 - m.powi(k as i32));
    let degree = (0.75 * width + 40.0).ceil() as usize;
    // F̃_0(u) = e^{u - t} on [m^k t, t].
    let mut fit = Chebyshev::fit(m.powi(k as i32) * t, t, degree, |u| (u - t).exp());
    for r in 1..k {
        let anti = fit.antiderivative();
        fit = Chebyshev::fit(m.powi((k - r) as i32) * t, t, degree, |x| {
            anti.eval(x) - anti.eval(m * x)
        });
    }
    let anti = fit.antiderivative();
    let scaled = anti.eval(t) - anti.eval(m * t);
    let mut factor = 1.0;
    let mut mm = 1.0;
    let mut mk = m;
    for i in 1..=k {
        factor *= i as f64;
        mm *= 1.0 - mk;
        mk *= m;
    }
    Ok(factor / mm * scaled)
}

/// The exponential-sum closed form
/// `k! Σ_j {∏_{i≠j} 1/(m^j - m^i)} e^{-(1-m^j)t}` with pairwise-stable
/// factor products. The alternating sum loses roughly `k²/2·log₂(1/m)`
/// bits to cancellation, so it is only reliable for small `k`; it is kept
/// as an independent algebraic route for cross-checks.
pub fn mu_t_integer_moment_expsum(k: usize, t: f64, m: f64) -> Result<f64> {
    QValue::new(m)?;
    if t <= 0.0 {
        return Err(Error::domain("needs t > 0"));
    }
    if k == 0 {
        return Ok(1.0);
    }
    let mut sum = 0.0f64;
    for j in 0..=k {
        // ∏_{i≠j} (m^j - m^i) = (-1)^j ∏ m^{min(i,j)} (1 - m^{|i-j|})
        let mut ln_abs = 0.0f64;
        for i in 0..=k {
            if i == j {
                continue;
            }
            let lo = i.min(j) as f64;
            let gap = (i as isize - j as isize).unsigned_abs();
            ln_abs += lo * m.ln() + (1.0 - m.powi(gap as i32)).ln();
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (-(1.0 - m.powi(j as i32)) * t - ln_abs).exp();
    }
    let factorial: f64 = (1..=k).map(|i| i as f64).product();
    Ok(factorial * sum)
}

/// Moment of the limit measure: `∫ u^γ μ(du) = Γ(γ+1)/Γ_m(γ+1) (1-m)^{-γ}`,
/// equal to `k!/(m;m)_k` at integer `k`.
pub fn mu_limit_moment(gamma: f64, m: f64) -> Result<f64> {
    Ok(gamma_ratio(gamma, m)? * (1.0 - m).powf(-gamma))
}

/// Density of the limit measure `μ`:
/// `(1/(m;m)_∞) Σ_k (-1)^k m^{k(k-1)/2}/(m;m)_k e^{-m^{-k}u}`.
///
/// The alternating series is summed in pairs; terms whose exponent
/// underflows are dropped. Small negative values from roundoff are
/// returned as they are: clamping is left to output layers so that
/// nonnegativity probes stay meaningful.
pub fn mu_density(u: f64, m: f64) -> Result<f64> {
    QValue::new(m)?;
    if u < 0.0 {
        return Err(Error::domain("mu_density needs u >= 0"));
    }
    let mut coeff = 1.0f64; // m^{k(k-1)/2} / (m;m)_k
    let mut m_negk = 1.0f64; // m^{-k}
    let mut mk = m; // m^{k+1} for the coefficient update
    let mut mpow = 1.0f64; // m^k
    let mut sum = 0.0f64;
    let mut k = 0usize;
    loop {
        let mut pair = 0.0;
        let e = m_negk * u;
        if e < 745.0 {
            pair += coeff * (-e).exp();
        }
        coeff *= mpow / (1.0 - mk);
        m_negk /= m;
        mpow *= m;
        mk *= m;
        let e = m_negk * u;
        if e < 745.0 {
            pair -= coeff * (-e).exp();
        }
        coeff *= mpow / (1.0 - mk);
        m_negk /= m;
        mpow *= m;
        mk *= m;
        sum += pair;
        k += 2;
        let next_bound = coeff * (-(m_negk * u).min(745.0)).exp();
        if next_bound < 1e-18 * sum.abs().max(1e-300) || k > 500 {
            break;
        }
    }
    Ok(sum / qq_infinite(m))
}

/// Scaled derivatives `e^{-t} φ^{(k)}(t)` of the generating function
/// `φ(t) = Σ_j t^j / (j! (m;m)_{j+1})`, stable for all `t ∈ [0, 700]`.
pub fn phi_scaled(k: usize, t: f64, m: f64) -> Result<f64> {
    QValue::new(m)?;
    if !(0.0..=700.0).contains(&t) {
        return Err(Error::domain("phi needs t in [0, 700]"));
    }
    // Poisson-weighted sum Σ_j pois(j; t) / (m;m)_{j+k+1}.
    let mm_inf = qq_infinite(m);
    let mm_at = |j: usize| -> f64 {
        // (m;m)_{j+k+1}, switching to the infinite product once converged.
        let order = j + k + 1;
        if order > 600 {
            return mm_inf;
        }
        let mut acc = 1.0;
        let mut mp = m;
        for _ in 0..order {
            acc *= 1.0 - mp;
            mp *= m;
            if mp < 1e-20 {
                // Remaining factors are 1 to machine precision.
                break;
            }
        }
        acc
    };
    if t == 0.0 {
        return Ok(1.0 / mm_at(0));
    }
    // Iterate the Poisson pmf outward from its mode.
    let j0 = t.floor() as usize;
    let ln_pmf0 = j0 as f64 * t.ln() - t - ln_gamma(j0 as f64 + 1.0);
    let pmf0 = ln_pmf0.exp();
    let mut sum = pmf0 / mm_at(j0);
    // Precompute (m;m) values incrementally for the upward sweep.
    let mut pmf = pmf0;
    let mut j = j0;
    loop {
        j += 1;
        pmf *= t / j as f64;
        if pmf < 1e-20 * pmf0 {
            break;
        }
        sum += pmf / mm_at(j);
    }
    pmf = pmf0;
    let mut j = j0;
    while j > 0 {
        pmf *= j as f64 / t;
        j -= 1;
        if pmf < 1e-20 * pmf0 {
            break;
        }
        sum += pmf / mm_at(j);
    }
    Ok(sum)
}

/// `φ^{(k)}(t)` itself; errors for `t` beyond the overflow horizon.
pub fn phi(k: usize, t: f64, m: f64) -> Result<f64> {
    let scaled = phi_scaled(k, t, m)?;
    if t > 690.0 {
        return Err(Error::domain("phi overflows for t > 690; use phi_scaled"));
    }
    Ok(scaled * t.exp())
}

/// `(e^{-t}φ, e^{-t}φ', e^{-t}φ'')` in one call; the ratios `φ'/φ`,
/// `φ''/φ` used by the saddle-point machinery follow without forming any
/// `e^t`-sized number.
pub fn phi_scaled_derivs(t: f64, m: f64) -> Result<(f64, f64, f64)> {
    Ok((phi_scaled(0, t, m)?, phi_scaled(1, t, m)?, phi_scaled(2, t, m)?))
}

/// Result of an envelope-weighted series evaluation: the value in the
/// `e^{-t}` scale and a bound on the truncated tail (same scale).
#[derive(Debug, Clone, Copy)]
pub struct PhiEval {
    pub scaled: f64,
    pub tail_bound: f64,
}

/// `e^{-t} Φ(t, u)` where `Φ(t, u) = Σ_{j>=1} t^j P_j(u)`: the density of
/// `μ_t` in the scaled variable `u`. Terms are accumulated through the
/// envelope-ratio representation, so the sum is stable at any depth the
/// family provides; the returned tail bound covers truncation at the
/// family depth.
pub fn big_phi_scaled(family: &SplineFamily, t: f64, u: f64) -> Result<PhiEval> {
    if t < 0.0 {
        return Err(Error::domain("big_phi needs t >= 0"));
    }
    if !(u > 0.0 && u <= 1.0) || t == 0.0 {
        return Ok(PhiEval { scaled: 0.0, tail_bound: 0.0 });
    }
    let m = family.m();
    if u == 1.0 {
        // Only the j = 1 term survives: e^{-t} t P_1(1).
        return Ok(PhiEval { scaled: (-t).exp() * t / (1.0 - m), tail_bound: 0.0 });
    }
    // First level with u inside the support.
    let j_min = if u > m { 1 } else { (u.ln() / m.ln()).ceil() as usize };
    // base_j = e^{-t} t^j (1-u)^{j-1} / ((j-1)! (m;m)_j)
    let one_u = 1.0 - u;
    let mm_at = |j: usize| if j <= family.max_n() { family.mm(j) } else { family.mm_inf() };
    let ln_base = -t + (j_min as f64) * t.ln() + (j_min as f64 - 1.0) * one_u.ln()
        - ln_gamma(j_min as f64)
        - mm_at(j_min).ln();
    if j_min > family.max_n() {
        // Entirely beyond the family: value unknown but bounded through
        // the envelope (R <= 1) and a geometric tail.
        let head = ln_base.exp();
        let rho = t * one_u / (j_min as f64 + 1.0);
        let bound = if rho < 0.9 { head / (1.0 - rho) } else { f64::INFINITY };
        return Ok(PhiEval { scaled: 0.0, tail_bound: bound });
    }
    let mut base = ln_base.exp();
    let mut sum = 0.0f64;
    let mut j = j_min;
    let peak = t * one_u;
    loop {
        let r = family.ratio(j, u)?;
        sum += base * r;
        if j == family.max_n() {
            break;
        }
        // base_{j+1} = base_j * t (1-u) / (j (1 - m^{j+1})); the q-factor
        // is the ratio of consecutive (m;m) values.
        base *= t * one_u * family.mm(j) / (j as f64 * family.mm(j + 1));
        j += 1;
        if (j as f64) > peak + 1.0 && base < 1e-18 * sum.max(1e-300) {
            return Ok(PhiEval { scaled: sum, tail_bound: base });
        }
        if j > 200_000 {
            return Err(Error::numeric("big_phi series did not converge"));
        }
    }
    // Truncated at the family depth: bound the remainder with R <= 1 and a
    // geometric estimate on the base terms.
    let jf = j as f64;
    let next = base * t * one_u / (jf * (1.0 - m.powi(j as i32 + 1)));
    let rho = t * one_u / (jf + 1.0);
    let tail = if rho < 0.9 { next / (1.0 - rho) } else { f64::INFINITY };
    Ok(PhiEval { scaled: sum, tail_bound: tail })
}

/// `Φ(t, u) = Σ_j t^j P_j(u)`, truncated at `J(t)`. Errors with the
/// required depth when the family cannot support the truncation level.
pub fn big_phi(family: &SplineFamily, t: f64, u: f64) -> Result<f64> {
    let eval = big_phi_scaled(family, t, u)?;
    if eval.tail_bound > 1e-12 * eval.scaled.max(1e-300) {
        return Err(Error::Depth {
            t,
            required: truncation_level(t),
            available: family.max_n(),
        });
    }
    if t > 690.0 {
        return Err(Error::domain("big_phi overflows for t > 690; use big_phi_scaled"));
    }
    Ok(eval.scaled * t.exp())
}

/// `ϑ(r) = Σ_j r^j / (m;m)_{j+1}` for `r ∈ [0, 1)`; also equals
/// `∫_0^∞ e^{-s} φ(rs) ds`.
pub fn vartheta(r: f64, m: f64) -> Result<f64> {
    QValue::new(m)?;
    if !(0.0..1.0 - 1e-9).contains(&r) {
        return Err(Error::domain("vartheta needs r in [0, 1 - 1e-9)"));
    }
    let mut mm = 1.0 - m;
    let mut mj = m * m;
    let mut rj = 1.0f64;
    let mut sum = 0.0f64;
    for j in 0..100_000 {
        let term = rj / mm;
        sum += term;
        if j > 2 && term < 1e-17 * sum {
            return Ok(sum);
        }
        rj *= r;
        mm *= 1.0 - mj;
        mj *= m;
    }
    Err(Error::numeric("vartheta series did not converge"))
}

/// Time horizon of a mixing measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Horizon {
    Finite(f64),
    Limit,
}

/// The measure `μ_t` (atom at `t` plus spline density) or its `t → ∞`
/// limit `μ`.
#[derive(Debug, Clone)]
pub struct MuMeasure {
    m: f64,
    horizon: Horizon,
    family: Option<Arc<SplineFamily>>,
}

impl MuMeasure {
    pub fn limit(m: f64) -> Result<Self> {
        QValue::new(m)?;
        Ok(Self { m, horizon: Horizon::Limit, family: None })
    }

    pub fn finite(t: f64, family: Arc<SplineFamily>) -> Result<Self> {
        if t <= 0.0 {
            return Err(Error::domain("mu_t needs t > 0"));
        }
        Ok(Self { m: family.m(), horizon: Horizon::Finite(t), family: Some(family) })
    }

    pub fn horizon(&self) -> Horizon {
        self.horizon
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// Atom location and mass (`t`, `e^{-t}`) for finite horizons.
    pub fn atom(&self) -> Option<(f64, f64)> {
        match self.horizon {
            Horizon::Finite(t) => Some((t, (-t).exp())),
            Horizon::Limit => None,
        }
    }

    /// Density of the absolutely continuous part at physical time `w`.
    pub fn density(&self, w: f64) -> Result<f64> {
        match self.horizon {
            Horizon::Limit => mu_density(w, self.m),
            Horizon::Finite(t) => {
                let family = self.family.as_ref().expect("finite measure holds a family");
                Ok(big_phi_scaled(family, t, w / t)?.scaled / t)
            }
        }
    }

    /// `∫ u^γ dμ` through the closed forms.
    pub fn moment(&self, gamma: f64) -> Result<f64> {
        match self.horizon {
            Horizon::Limit => mu_limit_moment(gamma, self.m),
            Horizon::Finite(t) => mu_t_moment(gamma, t, self.m),
        }
    }

    /// Integrate `f` against the measure (atom included) by adaptive
    /// panel quadrature over the density.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, rel_tol: f64) -> Result<f64> {
        match self.horizon {
            Horizon::Finite(t) => {
                let family = self.family.as_ref().expect("finite measure holds a family");
                let mut total = (-t).exp() * f(t);
                let target = QuadTarget::new(rel_tol, 1e-300);
                for (lo, hi) in family.piece_panels(family.support_floor(), 1.0) {
                    total += integrate_with(lo * t, hi * t, target, |w| {
                        f(w) * big_phi_scaled(family, t, w / t).map(|e| e.scaled).unwrap_or(0.0) / t
                    })
                    .value;
                }
                Ok(total)
            }
            Horizon::Limit => {
                let target = QuadTarget::new(rel_tol, 1e-300);
                let mut total = 0.0;
                let mut lo = 0.0f64;
                let mut hi = 0.125f64;
                while lo < 80.0 {
                    total += integrate_with(lo, hi, target, |w| {
                        f(w) * mu_density(w, self.m).unwrap_or(0.0)
                    })
                    .value;
                    lo = hi;
                    hi = (hi * 2.0).min(80.0);
                }
                Ok(total)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate;
    use crate::splines::build_family;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn first_moment_closed_form() {
        // ∫ u μ_t(du) = (1 - e^{-(1-m)t})/(1-m), exact to 1e-12.
        for m in [0.2, 0.5, 0.8] {
            for t in [0.5, 2.0, 10.0, 60.0] {
                let expect = (1.0 - (-(1.0 - m) * t as f64).exp()) / (1.0 - m);
                let got = mu_t_moment(1.0, t, m).unwrap();
                assert!(rel(got, expect) < 1e-12, "m={m} t={t}: {got} vs {expect}");
            }
        }
    }

    #[test]
    fn zeroth_moment_is_one() {
        for t in [0.3, 5.0, 80.0, 300.0] {
            assert!(rel(mu_t_moment(0.0, t, 0.5).unwrap(), 1.0) < 1e-13, "t={t}");
        }
    }

    #[test]
    fn real_and_integer_moment_formulas_agree() {
        for m in [0.2, 0.5, 0.8] {
            for t in [0.5, 2.0, 10.0] {
                for k in 0..=6usize {
                    let a = mu_t_moment(k as f64, t, m).unwrap();
                    let b = mu_t_integer_moment(k, t, m).unwrap();
                    assert!(rel(a, b) < 1e-10, "m={m} t={t} k={k}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn expsum_route_agrees_for_small_k() {
        for t in [0.5f64, 2.0, 10.0] {
            for k in 0..=3usize {
                let a = mu_t_integer_moment_expsum(k, t, 0.5).unwrap();
                let b = mu_t_integer_moment(k, t, 0.5).unwrap();
                assert!(rel(a, b) < 1e-9, "t={t} k={k}");
            }
        }
    }

    #[test]
    fn second_moment_inequality() {
        // (1-m)² e^t/(e^t - e^{mt}) ∫u² μ_t ≤ 2/(1+m)
        for m in [0.2, 0.5, 0.8] {
            for t in [0.5, 2.0, 10.0, 40.0] {
                let m2 = mu_t_integer_moment(2, t, m).unwrap();
                let lhs = (1.0 - m) * (1.0 - m) / (1.0 - (-(1.0 - m) * t).exp()) * m2;
                assert!(lhs <= 2.0 / (1.0 + m) + 1e-12, "m={m} t={t}: {lhs}");
            }
        }
    }

    #[test]
    fn limit_moment_values() {
        assert!(rel(mu_limit_moment(1.0, 0.5).unwrap(), 2.0) < 1e-13);
        assert!(rel(mu_limit_moment(0.0, 0.37).unwrap(), 1.0) < 1e-13);
        // k!/(m;m)_k at k = 3, m = 0.4
        let m: f64 = 0.4;
        let expect = 6.0 / ((1.0 - 0.4) * (1.0 - 0.16) * (1.0 - 0.064));
        assert!(rel(mu_limit_moment(3.0, m).unwrap(), expect) < 1e-12);
    }

    #[test]
    fn moments_converge_to_limit() {
        for &g in &[-2.5, -1.0, -0.5, 0.5, 1.0, 2.0, 4.0] {
            let a = mu_t_moment(g, 80.0, 0.5).unwrap();
            let b = mu_limit_moment(g, 0.5).unwrap();
            assert!((a - b).abs() <= 1e-8 * b.abs().max(1.0), "γ={g}: {a} vs {b}");
        }
    }

    #[test]
    fn limit_density_normalizes() {
        for m in [0.3, 0.5, 0.7] {
            let mass = integrate(0.0, 80.0, |u| mu_density(u, m).unwrap()).value;
            assert!((mass - 1.0).abs() < 1e-10, "m={m}: {mass}");
            let mean = integrate(0.0, 90.0, |u| u * mu_density(u, m).unwrap()).value;
            assert!((mean - 1.0 / (1.0 - m)).abs() < 1e-9, "m={m}: {mean}");
        }
    }

    #[test]
    fn limit_density_nonnegative_on_grid() {
        for m in [0.2, 0.5, 0.8] {
            let mut u = 1e-3;
            while u < 50.0 {
                assert!(mu_density(u, m).unwrap() >= -1e-12, "m={m} u={u}");
                u *= 1.31;
            }
        }
    }

    #[test]
    fn negative_limit_moment_matches_density_quadrature() {
        let m = 0.5;
        let got = mu_limit_moment(-1.0, m).unwrap();
        let oracle = integrate(0.0, 60.0, |u| {
            if u < 1e-290 { 0.0 } else { mu_density(u, m).unwrap() / u }
        })
        .value;
        assert!(rel(got, oracle) < 1e-6, "{got} vs {oracle}");
    }

    #[test]
    fn phi_at_zero() {
        for m in [0.25, 0.6] {
            assert!(rel(phi(0, 0.0, m).unwrap(), 1.0 / (1.0 - m)) < 1e-14);
        }
    }

    #[test]
    fn phi_derivative_bounds() {
        // e^t/(m;m)_{k+1} <= φ^{(k)}(t) <= e^t/(m;m)_∞
        for m in [0.3f64, 0.6] {
            let mminf = qq_infinite(m);
            for k in 0..=3usize {
                let mut mmk1 = 1.0;
                let mut mp = m;
                for _ in 0..=k {
                    mmk1 *= 1.0 - mp;
                    mp *= m;
                }
                for &t in &[0.0, 0.5, 3.0, 20.0, 60.0] {
                    let scaled = phi_scaled(k, t, m).unwrap();
                    assert!(scaled >= 1.0 / mmk1 - 1e-12, "lower k={k} t={t}");
                    assert!(scaled <= 1.0 / mminf + 1e-12, "upper k={k} t={t}");
                }
            }
        }
    }

    #[test]
    fn phi_approaches_euler_limit() {
        // φ(t) e^{-t} -> 1/(m;m)_∞, deviation < 1e-10 at t = 60.
        let m = 0.5;
        let dev = (phi_scaled(0, 60.0, m).unwrap() - 1.0 / qq_infinite(m)).abs();
        assert!(dev < 1e-10, "{dev}");
    }

    #[test]
    fn phi_log_concavity() {
        // φ''(t) φ(t) - φ'(t)² < 0 on a grid of [0, 50].
        let m = 0.5;
        let mut t = 0.0;
        while t <= 50.0 {
            let (p0, p1, p2) = phi_scaled_derivs(t, m).unwrap();
            assert!(p2 * p0 - p1 * p1 < 0.0, "t={t}");
            t += 2.5;
        }
    }

    #[test]
    fn big_phi_equals_phi_series_on_upper_interval() {
        let m = 0.5;
        let family = build_family(m, 40, 64).unwrap();
        for &t in &[0.7, 2.0, 6.0] {
            for &u in &[0.5, 0.6, 0.85, 0.999] {
                let lhs = big_phi(&family, t, u).unwrap();
                let rhs = t * phi(0, t * (1.0 - u), m).unwrap();
                assert!(rel(lhs, rhs) < 1e-10, "t={t} u={u}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn big_phi_bounded_by_phi_below_m() {
        let m = 0.5;
        let family = build_family(m, 40, 64).unwrap();
        for &t in &[1.0, 4.0] {
            for &u in &[0.05, 0.14, 0.3, 0.45] {
                let lhs = big_phi(&family, t, u).unwrap();
                let rhs = t * phi(0, t * (1.0 - u), m).unwrap();
                assert!(lhs <= rhs * (1.0 + 1e-12), "t={t} u={u}");
            }
        }
    }

    #[test]
    fn big_phi_outside_support() {
        let family = build_family(0.5, 20, 64).unwrap();
        assert_eq!(big_phi(&family, 2.0, 1.5).unwrap(), 0.0);
    }

    #[test]
    fn big_phi_depth_error_when_family_too_shallow() {
        let family = build_family(0.5, 10, 64).unwrap();
        // t = 30 needs roughly 100 levels.
        assert!(matches!(big_phi(&family, 30.0, 0.3), Err(Error::Depth { .. })));
    }

    #[test]
    fn vartheta_series_head() {
        for m in [0.3, 0.5] {
            assert!(rel(vartheta(0.0, m).unwrap(), 1.0 / (1.0 - m)) < 1e-14);
        }
    }

    #[test]
    fn vartheta_matches_integral_identity() {
        // ϑ(r) = ∫_0^∞ e^{-s} φ(rs) ds at r = 0.5, m = 0.4.
        let (r, m) = (0.5, 0.4);
        let got = vartheta(r, m).unwrap();
        let oracle = integrate(0.0, 120.0, |s| (-s).exp() * phi(0, r * s, m).unwrap()).value;
        assert!(rel(got, oracle) < 1e-9, "{got} vs {oracle}");
    }

    #[test]
    fn vartheta_monotone() {
        let m = 0.5;
        let mut last = 0.0;
        for i in 0..9 {
            let r = i as f64 * 0.1;
            let v = vartheta(r, m).unwrap();
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn mu_t_total_mass_and_moment_quadrature() {
        let m = 0.5;
        let t = 2.0;
        let family = Arc::new(build_family(m, 40, 64).unwrap());
        let mu = MuMeasure::finite(t, family).unwrap();
        let mass = mu.integrate(|_| 1.0, 1e-11).unwrap();
        assert!((mass - 1.0).abs() < 1e-10, "mass {mass}");
        for &g in &[-3.5, -1.0, -0.5, 0.0, 1.0, 2.0, 4.0] {
            let quad = mu.integrate(|w| (w / t).powf(g), 1e-11).unwrap();
            // Scaled moments: ∫ (w/t)^γ μ_t(dw) = t^{-γ} ∫ u^γ.
            let closed = mu_t_moment(g, t, m).unwrap() / t.powf(g);
            assert!(rel(quad, closed) < 1e-8, "γ={g}: {quad} vs {closed}");
        }
    }

    #[test]
    fn limit_measure_integrate_matches_moments() {
        let mu = MuMeasure::limit(0.4).unwrap();
        let mass = mu.integrate(|_| 1.0, 1e-11).unwrap();
        assert!((mass - 1.0).abs() < 1e-9);
        let second = mu.integrate(|w| w * w, 1e-11).unwrap();
        assert!(rel(second, mu_limit_moment(2.0, 0.4).unwrap()) < 1e-8);
    }
}
