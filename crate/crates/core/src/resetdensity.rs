//! The resetting transition density `p(t; x, y)`, the stationary density
//! `ρ`, their moments, the generator, and the Fokker–Planck residual.
//!
//! Two independent evaluation routes are kept side by side:
//!
//! - [`ResetModel::p_reset`] sums the level representation
//!   `e^{-t}p_0(t;0,y-x) + e^{-t} Σ_j t^j ∫ p_0(tu;0,y-c^j x) P_j(u) du`
//!   level by level;
//! - [`ResetModel::p_reset_origin`] integrates the collapsed series
//!   `e^{-t}p_0(t;0,y) + e^{-t} ∫ p_0(tu;0,y) Φ(t,u) du` at `x = 0`.
//!
//! Their agreement (and the agreement of the `μ_t` mixture form) is one of
//! the main validation surfaces of the crate.

use crate::kernels::KernelModel;
use crate::measures::{big_phi_scaled, mu_density, phi_scaled};
use crate::numerics::{integrate_with, QuadTarget};
use crate::qspecial::{gamma, gamma_ratio, qq_infinite};
use crate::splines::{truncation_level, SplineFamily};
use crate::{Error, ResetParams, Result};
use statrs::function::gamma::ln_gamma;
use std::collections::HashMap;
use std::sync::Arc;

const PI: f64 = std::f64::consts::PI;

/// Which representation of the stationary density to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoMethod {
    /// `ρ(y) = ∫_0^∞ p_0(u; 0, y) μ(du)` by quadrature against the limit
    /// density.
    Mixture,
    /// The alternating resolvent series
    /// `(1/(m;m)_∞) Σ_k (-1)^k m^{k(k-1)/2}/(m;m)_k U^{(m^{-k})}(y)`.
    ResolventSeries,
}

/// Outcome of a stationary-density evaluation.
#[derive(Debug, Clone, Copy)]
pub struct RhoEval {
    pub value: f64,
    /// Set when the resolvent series lost too many digits and the value
    /// fell back to the mixture form.
    pub fell_back: bool,
}

/// A smooth 1-d test function with its first two derivatives, as required
/// by the generator.
pub struct TestFunction1D {
    pub f: Box<dyn Fn(f64) -> f64 + Sync>,
    pub df: Box<dyn Fn(f64) -> f64 + Sync>,
    pub d2f: Box<dyn Fn(f64) -> f64 + Sync>,
}

/// Residuals of the Fokker–Planck equation at one space-time point.
#[derive(Debug, Clone, Copy)]
pub struct FpResidual {
    /// `|∂_t p - 𝒜_x p|` with the generator acting in the backward variable.
    pub forward: f64,
    /// `|∂_t p - 𝒜*_y p|` with the adjoint acting in the forward variable.
    pub adjoint: f64,
    /// Finite-difference truncation estimate, `O(h²)`.
    pub fd_error: f64,
}

/// A base kernel with resetting parameters and the spline family that
/// represents the level series.
#[derive(Clone)]
pub struct ResetModel {
    kernel: KernelModel,
    params: ResetParams,
    family: Arc<SplineFamily>,
    series_tol: f64,
}

impl ResetModel {
    pub fn new(kernel: KernelModel, params: ResetParams, family: Arc<SplineFamily>) -> Result<Self> {
        kernel.validate()?;
        if (kernel.alpha() - params.alpha).abs() > 1e-12 {
            return Err(Error::config("kernel stability index does not match parameters"));
        }
        if kernel.dim() != params.dim {
            return Err(Error::config("kernel dimension does not match parameters"));
        }
        if (family.m() - params.m).abs() > 1e-15 {
            return Err(Error::config("spline family was built for a different m"));
        }
        Ok(Self { kernel, params, family, series_tol: 1e-12 })
    }

    pub fn kernel(&self) -> &KernelModel {
        &self.kernel
    }

    pub fn params(&self) -> &ResetParams {
        &self.params
    }

    pub fn family(&self) -> &Arc<SplineFamily> {
        &self.family
    }

    /// Relative tolerance of the series and quadrature layers.
    pub fn series_tol(&self) -> f64 {
        self.series_tol
    }

    pub fn with_series_tol(mut self, tol: f64) -> Self {
        self.series_tol = tol.max(1e-15);
        self.family = self.family.clone();
        self
    }

    /// `e^{-t} t^j P_j(u)`, the weight of level `j` in the series.
    fn level_weight(&self, t: f64, j: usize, u: f64) -> Result<f64> {
        let r = self.family.ratio(j, u)?;
        if r == 0.0 {
            return Ok(0.0);
        }
        let ln = -t + j as f64 * t.ln() + self.family.ln_envelope(j, u);
        if ln < -700.0 {
            return Ok(0.0);
        }
        Ok(r * ln.exp())
    }

    /// Transition density `p(t; x, y)` through the level series.
    pub fn p_reset(&self, t: f64, x: &[f64], y: &[f64]) -> Result<f64> {
        let d = self.kernel.dim();
        if x.len() != d || y.len() != d {
            return Err(Error::domain(format!("p_reset expects {d}-dimensional points")));
        }
        if t <= 0.0 {
            return Err(Error::domain("p_reset needs t > 0"));
        }
        let c = self.params.c;
        let m = self.params.m;
        let mut total = (-t).exp() * self.kernel.p0(t, x, y)?;
        let j_cap = truncation_level(t);
        let depth = self.family.max_n().min(j_cap);
        let floor = self.family.support_floor();
        let x_norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let target = QuadTarget::new(1e-11, 1e-300);
        // Kernel values can be shared across levels once the shift has
        // decayed to nothing.
        let mut cache: HashMap<u64, f64> = HashMap::new();
        let mut shifted = vec![0.0; d];
        let mut err = Ok(());
        for j in 1..=depth {
            // Contribution of level j is at most the Poisson mass
            // e^{-t} t^j / j! times the sup of the kernel.
            let ln_mass = -t + j as f64 * t.ln() - ln_gamma(j as f64 + 1.0);
            if j as f64 > t && ln_mass < (1e-18 * total.max(1e-30)).ln() {
                break;
            }
            let cj = c.powi(j as i32);
            let negligible_shift = cj * x_norm < 1e-14;
            for (i, out) in shifted.iter_mut().enumerate() {
                *out = if negligible_shift { y[i] } else { y[i] - cj * x[i] };
            }
            let lo = m.powi(j as i32).max(floor);
            let mut level = 0.0;
            for (a, b) in self.family.piece_panels(lo, 1.0) {
                let r = integrate_with(a, b, target, |u| {
                    let p0 = if negligible_shift {
                        *cache.entry(u.to_bits()).or_insert_with(|| {
                            self.kernel.p0(t * u, &vec![0.0; d], &shifted).unwrap_or(f64::NAN)
                        })
                    } else {
                        self.kernel.p0(t * u, &vec![0.0; d], &shifted).unwrap_or(f64::NAN)
                    };
                    match self.level_weight(t, j, u) {
                        Ok(w) => w * p0,
                        Err(e) => {
                            if err.is_ok() {
                                err = Err(e);
                            }
                            f64::NAN
                        }
                    }
                });
                level += r.value;
            }
            err?;
            err = Ok(());
            total += level;
        }
        if j_cap > self.family.max_n() {
            let bound = self.dropped_levels_bound(t, y, self.family.max_n());
            if bound > self.series_tol * total.max(1e-300) {
                return Err(Error::Depth {
                    t,
                    required: j_cap,
                    available: self.family.max_n(),
                });
            }
        }
        Ok(total.max(0.0))
    }

    /// Largest kernel value on the scaled-time slice `u ∈ [lo, hi]`,
    /// estimated from a log-spaced probe grid.
    fn sup_p0_probe(&self, t: f64, y: &[f64], lo: f64, hi: f64) -> f64 {
        let d = self.kernel.dim();
        let zero = vec![0.0; d];
        let mut u = hi;
        let mut sup = 0.0f64;
        while u >= lo * 0.999 {
            if let Ok(v) = self.kernel.p0(t * u, &zero, y) {
                sup = sup.max(v);
            }
            u *= 0.5;
        }
        sup
    }

    /// Upper bound on the standardized kernel density.
    fn std_sup(&self) -> f64 {
        match self.kernel {
            KernelModel::Brownian { dim } => (4.0 * PI).powf(-(dim as f64) / 2.0),
            KernelModel::SymmetricStable1D { alpha } => gamma(1.0 + 1.0 / alpha) / PI,
            KernelModel::Cauchy1D { .. } => 1.0 / PI,
            KernelModel::SubordinatorHalf => 0.93,
            KernelModel::SubordinatorGeneral { alpha } => {
                // Probe the mode of the one-sided density.
                let mut sup: f64 = 0.0;
                let mut x = 1e-2;
                while x < 1e2 {
                    sup = sup.max(crate::kernels::subordinator_std(alpha, x));
                    x *= 1.25;
                }
                sup * 1.3
            }
            KernelModel::Cylindrical { alpha, dim } => {
                (gamma(1.0 + 1.0 / alpha) / PI).powi(dim as i32)
            }
        }
    }

    /// Bound on the contribution of all levels beyond `n_levels` to the
    /// series at horizon `t` and endpoint `y`: the envelope integral of a
    /// dropped level admits `∫ u^{-κ}(1-u)^{j-1} du <= Γ(1-κ)` for
    /// `κ = d/α < 1`, otherwise the Blumenthal–Getoor bound
    /// `p_0(s;0,w) <= C s ν(w)` or a probe sup takes over.
    fn dropped_levels_bound(&self, t: f64, y: &[f64], n_levels: usize) -> f64 {
        let n = n_levels as f64;
        // Poisson tail mass above n_levels.
        let ln_pmf = -t + (n + 1.0) * t.ln() - ln_gamma(n + 2.0);
        let geom = if n + 2.0 > t { (n + 2.0) / (n + 2.0 - t) } else { 1e3 };
        let tail = (ln_pmf.exp() * geom).min(1.0);
        if tail == 0.0 {
            return 0.0;
        }
        let kappa = self.kernel.dim() as f64 / self.params.alpha;
        let mm_inf = self.family.mm_inf();
        // Each of these is a valid bound where defined; keep the smallest.
        let mut best = f64::INFINITY;
        if kappa < 1.0 {
            // Σ_{j>N} e^{-t} t^j/((j-1)!(m;m)_j) B(1-κ, j)
            //   <= sup_std t^{-κ} Γ(1-κ) t/(m;m)_∞ · tail.
            best = best.min(self.std_sup() * t.powf(-kappa) * gamma(1.0 - kappa) * t / mm_inf * tail);
        }
        if let Ok(nu) = self.kernel.levy_density(y) {
            // p_0(s; 0, w) <= C s ν(w); the time average over a level is
            // at most t.
            best = best.min(20.0 * t * nu / mm_inf * tail);
        }
        // Level mass × kernel sup over the slice (loose near u -> 0 only
        // when the sup is unbounded there, which the other bounds cover).
        let probe = self.sup_p0_probe(t, y, self.family.support_floor(), 1.0);
        best = best.min(4.0 * probe * tail);
        best
    }

    /// `p(t; 0, y)` through the collapsed series, together with an error
    /// estimate covering quadrature, series truncation, and the measure
    /// mass below the family's support floor.
    pub fn p_reset_origin_detailed(&self, t: f64, y: &[f64]) -> Result<(f64, f64)> {
        let d = self.kernel.dim();
        if y.len() != d {
            return Err(Error::domain(format!("p_reset_origin expects {d}-dimensional points")));
        }
        if t <= 0.0 {
            return Err(Error::domain("p_reset_origin needs t > 0"));
        }
        let zero = vec![0.0; d];
        let mut total = (-t).exp() * self.kernel.p0(t, &zero, y)?;
        let floor = self.family.support_floor();
        let target = QuadTarget::new(1e-11, 1e-300);
        let mut quad_err = 0.0;
        for (a, b) in self.family.piece_panels(floor, 1.0) {
            let r = integrate_with(a, b, target, |u| {
                let eval = match big_phi_scaled(&self.family, t, u) {
                    Ok(e) => e,
                    Err(_) => return f64::NAN,
                };
                let p0 = self.kernel.p0(t * u, &zero, y).unwrap_or(f64::NAN);
                p0 * eval.scaled
            });
            total += r.value;
            quad_err += r.error;
        }
        if total.is_nan() {
            return Err(Error::Depth {
                t,
                required: truncation_level(t),
                available: self.family.max_n(),
            });
        }
        // Levels beyond the family depth and the measure mass below the
        // support floor both carry explicit envelope bounds.
        let dropped = self.dropped_levels_bound(t, y, self.family.max_n());
        let below = {
            let dens = big_phi_scaled(&self.family, t, (floor * 1.02).min(1.0))
                .map(|e| e.scaled)
                .unwrap_or(0.0);
            let kappa = self.kernel.dim() as f64 / self.params.alpha;
            let mut weight = f64::INFINITY;
            if kappa < 1.0 {
                weight = weight
                    .min(self.std_sup() * t.powf(-kappa) * floor.powf(1.0 - kappa) / (1.0 - kappa));
            }
            if let Ok(nu) = self.kernel.levy_density(y) {
                weight = weight.min(20.0 * nu * t * floor * floor / 2.0);
            }
            weight = weight.min(4.0 * self.sup_p0_probe(t, y, floor * 1e-3, floor) * floor);
            dens * weight
        };
        let missing = dropped + below;
        if missing > 1e-9 * total.max(1e-300) && missing > 1e-15 {
            return Err(Error::Depth {
                t,
                required: truncation_level(t),
                available: self.family.max_n(),
            });
        }
        Ok((total.max(0.0), quad_err + missing))
    }

    /// `p(t; 0, y)`; equals [`ResetModel::p_reset`] at `x = 0` within the
    /// configured tolerances.
    pub fn p_reset_origin(&self, t: f64, y: &[f64]) -> Result<f64> {
        Ok(self.p_reset_origin_detailed(t, y)?.0)
    }

    /// Resolvent of the base process, `U^{(β)}(y) = ∫_0^∞ e^{-βu} p_0(u;0,y) du`.
    /// Closed Bessel forms for Brownian motion in d = 1 and d = 3, numeric
    /// quadrature otherwise.
    pub fn resolvent_u(&self, beta: f64, y: &[f64]) -> Result<f64> {
        if beta <= 0.0 {
            return Err(Error::domain("resolvent needs beta > 0"));
        }
        let d = self.kernel.dim();
        let r2: f64 = y.iter().map(|v| v * v).sum();
        let r = r2.sqrt();
        if let KernelModel::Brownian { dim } = self.kernel {
            let sb = beta.sqrt();
            match dim {
                1 => return Ok((-sb * r).exp() / (2.0 * sb)),
                3 => return Ok((-sb * r).exp() / (4.0 * PI * r)),
                _ => {}
            }
        }
        // Numeric: log-substituted quadrature over u.
        let zero = vec![0.0; d];
        let target = QuadTarget::new(1e-11, 1e-300);
        let value = integrate_with(-34.0, (700.0 / beta).ln().min(34.0), target, |s: f64| {
            let u = s.exp();
            (-(beta * u)).exp() * self.kernel.p0(u, &zero, y).unwrap_or(0.0) * u
        })
        .value;
        Ok(value)
    }

    /// Stationary density `ρ(y)`.
    pub fn rho(&self, y: &[f64], method: RhoMethod) -> Result<f64> {
        Ok(self.rho_detailed(y, method)?.value)
    }

    /// Stationary density with the fallback flag exposed.
    pub fn rho_detailed(&self, y: &[f64], method: RhoMethod) -> Result<RhoEval> {
        let d = self.kernel.dim();
        if y.len() != d {
            return Err(Error::domain(format!("rho expects {d}-dimensional points")));
        }
        if self.kernel.is_one_sided() && y[0] <= 0.0 {
            return Ok(RhoEval { value: 0.0, fell_back: false });
        }
        match method {
            RhoMethod::Mixture => Ok(RhoEval { value: self.rho_mixture(y)?, fell_back: false }),
            RhoMethod::ResolventSeries => {
                let m = self.params.m;
                let mut coeff = 1.0f64;
                let mut m_negk = 1.0f64;
                let mut mpow = 1.0f64;
                let mut mk = m;
                let mut sum = 0.0f64;
                let mut abs_sum = 0.0f64;
                for k in 0..200 {
                    let u = self.resolvent_u(1.0 / m_negk, y)?;
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    let term = sign * coeff * u;
                    sum += term;
                    abs_sum += term.abs();
                    coeff *= mpow / (1.0 - mk);
                    m_negk *= m;
                    mpow *= m;
                    mk *= m;
                    if coeff * u < 1e-17 * sum.abs().max(1e-300) {
                        break;
                    }
                }
                let value = sum / qq_infinite(m);
                if abs_sum > 1e12 * sum.abs().max(1e-300) || !value.is_finite() {
                    // Cancellation beyond tolerance: fall back.
                    return Ok(RhoEval { value: self.rho_mixture(y)?, fell_back: true });
                }
                Ok(RhoEval { value, fell_back: false })
            }
        }
    }

    fn rho_mixture(&self, y: &[f64]) -> Result<f64> {
        let d = self.kernel.dim();
        let zero = vec![0.0; d];
        let m = self.params.m;
        let r2: f64 = y.iter().map(|v| v * v).sum();
        // The Gaussian saddle sits near u = |y|/√d; reach well past it.
        let u_max = (80.0 + 2.0 * r2.sqrt()).max(80.0);
        let target = QuadTarget::new(1e-11, 1e-300);
        let mut total = 0.0;
        let mut lo = 0.0f64;
        let mut hi = 1.0f64 / 128.0;
        while lo < u_max {
            total += integrate_with(lo, hi, target, |u| {
                if u <= 0.0 {
                    return 0.0;
                }
                let dens = mu_density(u, m).unwrap_or(0.0);
                if dens <= 0.0 {
                    return 0.0;
                }
                dens * self.kernel.p0(u, &zero, y).unwrap_or(0.0)
            })
            .value;
            lo = hi;
            hi = (hi * 2.0).min(u_max);
        }
        Ok(total)
    }

    /// Closed-form absolute moment of the base process at time one,
    /// `E|Y_1|^γ`, where available.
    fn base_moment(&self, gamma: f64) -> Result<f64> {
        let alpha = self.params.alpha;
        match self.kernel {
            KernelModel::Brownian { dim } => {
                let d = dim as f64;
                if gamma <= -d {
                    return Err(Error::domain("Brownian moment needs γ > -d"));
                }
                Ok(2.0f64.powf(gamma) * gamma_fn((d + gamma) / 2.0) / gamma_fn(d / 2.0))
            }
            KernelModel::SymmetricStable1D { .. } => {
                if !(-1.0 < gamma && gamma < alpha) {
                    return Err(Error::domain("symmetric stable moment needs -1 < γ < α"));
                }
                Ok(2.0f64.powf(gamma) * gamma_fn((1.0 + gamma) / 2.0) * gamma_fn(1.0 - gamma / alpha)
                    / (PI.sqrt() * gamma_fn(1.0 - gamma / 2.0)))
            }
            KernelModel::Cauchy1D { drift } if drift == 0.0 => {
                if !(-1.0 < gamma && gamma < 1.0) {
                    return Err(Error::domain("Cauchy moment needs -1 < γ < 1"));
                }
                Ok(2.0f64.powf(gamma) * gamma_fn((1.0 + gamma) / 2.0) * gamma_fn(1.0 - gamma)
                    / (PI.sqrt() * gamma_fn(1.0 - gamma / 2.0)))
            }
            KernelModel::SubordinatorHalf | KernelModel::SubordinatorGeneral { .. } => {
                if gamma >= alpha {
                    return Err(Error::domain("subordinator moment needs γ < α"));
                }
                Ok(gamma_fn(1.0 - gamma / alpha) / gamma_fn(1.0 - gamma))
            }
            _ => Err(Error::unsupported("no closed-form base moment for this kernel")),
        }
    }

    /// `∫ |y|^γ ρ(y) dy = Γ(γ/α+1)/Γ_m(γ/α+1) (1-m)^{-γ/α} E|Y_1|^γ`.
    pub fn rho_moment(&self, g: f64) -> Result<f64> {
        let alpha = self.params.alpha;
        let m = self.params.m;
        let base = self.base_moment(g)?;
        Ok(gamma_ratio(g / alpha, m)? * (1.0 - m).powf(-g / alpha) * base)
    }

    /// Apply the generator `𝒜 f(x) = ℒ f(x) + f(cx) - f(x)` to a smooth
    /// 1-d test function. The jump part uses principal-value quadrature
    /// with the second-order Taylor patch near the origin.
    pub fn generator_apply(&self, f: &TestFunction1D, x: f64) -> Result<f64> {
        let c = self.params.c;
        let reset = (f.f)(c * x) - (f.f)(x);
        let diffusive = match self.kernel {
            KernelModel::Brownian { dim: 1 } => (f.d2f)(x),
            KernelModel::SymmetricStable1D { alpha } => {
                self.symmetric_jump_part(f, x, alpha, 0.0)
            }
            KernelModel::Cauchy1D { drift } => self.symmetric_jump_part(f, x, 1.0, drift),
            KernelModel::SubordinatorHalf => self.subordinator_jump_part(f, x, 0.5),
            KernelModel::SubordinatorGeneral { alpha } => self.subordinator_jump_part(f, x, alpha),
            _ => return Err(Error::unsupported("generator not implemented for this kernel")),
        };
        Ok(diffusive + reset)
    }

    fn symmetric_jump_part(&self, f: &TestFunction1D, x: f64, alpha: f64, drift: f64) -> f64 {
        let nu_c = crate::kernels::isotropic_levy_density(alpha, 1, 1.0).unwrap();
        let z0: f64 = 1e-4;
        // ∫_0^{z0} (f(x+z)+f(x-z)-2f(x)) ν(z) dz ≈ f''(x) ∫ z² ν dz.
        let head = (f.d2f)(x) * nu_c * z0.powf(2.0 - alpha) / (2.0 - alpha);
        let target = QuadTarget::new(1e-10, 1e-300);
        let fx = (f.f)(x);
        let body = integrate_with(z0.ln(), 60.0f64.ln(), target, |s: f64| {
            let z = s.exp();
            ((f.f)(x + z) + (f.f)(x - z) - 2.0 * fx) * nu_c * z.powf(-1.0 - alpha) * z
        })
        .value;
        head + body + drift * (f.df)(x)
    }

    fn subordinator_jump_part(&self, f: &TestFunction1D, x: f64, alpha: f64) -> f64 {
        let nu_c = alpha / gamma_fn(1.0 - alpha);
        let z0: f64 = 1e-4;
        // ∫_0^{z0} (f(x+z)-f(x)) ν dz ≈ f'(x)∫zν + f''(x)/2 ∫z²ν.
        let head = (f.df)(x) * nu_c * z0.powf(1.0 - alpha) / (1.0 - alpha)
            + 0.5 * (f.d2f)(x) * nu_c * z0.powf(2.0 - alpha) / (2.0 - alpha);
        let target = QuadTarget::new(1e-10, 1e-300);
        let fx = (f.f)(x);
        let body = integrate_with(z0.ln(), 60.0f64.ln(), target, |s: f64| {
            let z = s.exp();
            ((f.f)(x + z) - fx) * nu_c * z.powf(-1.0 - alpha) * z
        })
        .value;
        head + body
    }

    /// Residuals of `∂_t p = 𝒜_x p = 𝒜*_y p` by central finite
    /// differences; Brownian d = 1 only.
    pub fn fokker_planck_residual(&self, t: f64, x: f64, y: f64, h: f64) -> Result<FpResidual> {
        if !matches!(self.kernel, KernelModel::Brownian { dim: 1 }) {
            return Err(Error::unsupported(
                "the Fokker–Planck residual is validated for Brownian d = 1",
            ));
        }
        if !(1e-6..=5e-2).contains(&h) {
            return Err(Error::domain("step must lie in [1e-6, 5e-2]"));
        }
        let c = self.params.c;
        let p = |t: f64, x: f64, y: f64| -> Result<f64> { self.p_reset(t, &[x], &[y]) };
        let p_c = p(t, x, y)?;
        let dt = (p(t + h, x, y)? - p(t - h, x, y)?) / (2.0 * h);
        let dxx = (p(t, x + h, y)? - 2.0 * p_c + p(t, x - h, y)?) / (h * h);
        let forward = dt - (dxx + p(t, c * x, y)? - p_c);
        let dyy = (p(t, x, y + h)? - 2.0 * p_c + p(t, x, y - h)?) / (h * h);
        let adjoint = dt - (dyy + p(t, x, y / c)? / c - p_c);
        // Truncation estimate from wider stencils: fourth x-derivative and
        // third t-derivative scales.
        let d4 = (p(t, x + 2.0 * h, y)? - 4.0 * p(t, x + h, y)? + 6.0 * p_c
            - 4.0 * p(t, x - h, y)?
            + p(t, x - 2.0 * h, y)?)
            / h.powi(4);
        let d3t = (p(t + 2.0 * h, x, y)? - 2.0 * p(t + h, x, y)? + 2.0 * p(t - h, x, y)?
            - p(t - 2.0 * h, x, y)?)
            / (2.0 * h.powi(3));
        let fd_error = h * h * (d4.abs() / 12.0 + d3t.abs() / 6.0);
        Ok(FpResidual { forward: forward.abs(), adjoint: adjoint.abs(), fd_error })
    }

    /// Total spatial mass of `p(t; x, ·)` for one-dimensional kernels, by
    /// adaptive quadrature with log-substituted tails.
    pub fn mass_1d(&self, t: f64, x: f64) -> Result<f64> {
        if self.kernel.dim() != 1 {
            return Err(Error::unsupported("mass_1d needs a one-dimensional kernel"));
        }
        let target = QuadTarget::new(1e-10, 1e-300);
        let p = |y: f64| self.p_reset(t, &[x], &[y]).unwrap_or(f64::NAN);
        let mut mass = integrate_with(-2.0f64.max(x.abs() + 1.0) , 2.0f64.max(x.abs() + 1.0), target, p).value;
        let edge = 2.0f64.max(x.abs() + 1.0);
        mass += integrate_with(edge.ln(), 42.0, target, |s: f64| p(s.exp()) * s.exp()).value;
        if !self.kernel.is_one_sided() {
            mass += integrate_with(edge.ln(), 42.0, target, |s: f64| p(-(s.exp())) * s.exp()).value;
        }
        Ok(mass)
    }
}

fn gamma_fn(x: f64) -> f64 {
    gamma(x)
}

/// The Gaussian split form of the collapsed series,
/// `p(t;0,y) = e^{-t}(4πt)^{-d/2} e^{-|y|²/4t}
///   + e^{-t}(4πt)^{-d/2} t ∫_0^1 u^{-d/2} e^{-|y|²/(4tu)} (Φ(t,u)/t) du`,
/// with `Φ = tφ(t(1-u))` made explicit on `[m, 1]`. Cross-check route for
/// the Brownian kernel.
pub fn brownian_split_form(model: &ResetModel, t: f64, y: &[f64]) -> Result<f64> {
    let d = model.kernel().dim() as f64;
    let m = model.params().m;
    let r2: f64 = y.iter().map(|v| v * v).sum();
    let prefactor = (4.0 * PI * t).powf(-d / 2.0);
    let atom = (-t).exp() * prefactor * (-r2 / (4.0 * t)).exp();
    let family = model.family();
    let target = QuadTarget::new(1e-11, 1e-300);
    let mut integral = 0.0;
    for (a, b) in family.piece_panels(family.support_floor(), 1.0) {
        integral += integrate_with(a, b, target, |u| {
            // e^{-t} Φ(t, u): closed φ form above m, spline series below.
            let phi_part = if u >= m {
                t * phi_scaled(0, t * (1.0 - u), m).unwrap_or(f64::NAN) * (-t * u).exp()
            } else {
                big_phi_scaled(family, t, u).map(|e| e.scaled).unwrap_or(f64::NAN)
            };
            u.powf(-d / 2.0) * (-r2 / (4.0 * t * u)).exp() * phi_part
        })
        .value;
    }
    Ok(atom + prefactor * integral)
}
