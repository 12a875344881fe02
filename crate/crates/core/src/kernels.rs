//! Transition densities `p_0` and Lévy densities `ν` of the base stable
//! processes.
//!
//! Normalization conventions (matched by the samplers in `montecarlo`):
//!
//! - Brownian motion: `E e^{i<z,Y_t>} = e^{-t|z|²}`, so
//!   `p_0(t;x,y) = (4πt)^{-d/2} e^{-|y-x|²/4t}` (variance `2t` per
//!   coordinate);
//! - symmetric / isotropic stable: `E e^{izY_t} = e^{-t|z|^α}`;
//! - subordinator: `E e^{-uY_t} = e^{-t u^α}`;
//! - Cauchy with drift: `E e^{izY_t} = e^{-t(|z| - iγz)}`;
//! - cylindrical: independent symmetric one-dimensional coordinates.
//!
//! Every kernel is evaluated at `t = 1` and rescaled through the stable
//! scaling law `p_0(t; x, y) = t^{-d/α} p_0(1; t^{-1/α}x, t^{-1/α}y)`.

use crate::numerics::adaptive::integrate_panels;
use crate::numerics::{integrate_with, QuadTarget};
use crate::qspecial::gamma;
use crate::{Error, Result};

const PI: f64 = std::f64::consts::PI;

/// Which one-dimensional stable transform to invert.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InversionKind {
    Symmetric,
    Subordinator,
}

/// A base process variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelModel {
    /// d-dimensional Brownian motion, `Ψ(z) = |z|²`.
    Brownian { dim: usize },
    /// One-dimensional symmetric α-stable, `α ∈ (0, 2)`.
    SymmetricStable1D { alpha: f64 },
    /// The ½-stable subordinator (explicit density).
    SubordinatorHalf,
    /// General α-stable subordinator, `α ∈ (0, 1)`.
    SubordinatorGeneral { alpha: f64 },
    /// One-dimensional Cauchy process with drift.
    Cauchy1D { drift: f64 },
    /// d-dimensional cylindrical α-stable (independent coordinates).
    Cylindrical { alpha: f64, dim: usize },
}

impl KernelModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelModel::Brownian { dim } | KernelModel::Cylindrical { dim, .. } if dim == 0 => {
                Err(Error::domain("dimension must be positive"))
            }
            KernelModel::SymmetricStable1D { alpha } | KernelModel::Cylindrical { alpha, .. } => {
                if alpha > 0.0 && alpha < 2.0 {
                    Ok(())
                } else {
                    Err(Error::domain("stable index must lie in (0, 2)"))
                }
            }
            KernelModel::SubordinatorGeneral { alpha } => {
                if alpha > 0.0 && alpha < 1.0 {
                    Ok(())
                } else {
                    Err(Error::domain("subordinator index must lie in (0, 1)"))
                }
            }
            _ => Ok(()),
        }
    }

    /// Stability index (2 for Brownian, 1 for Cauchy).
    pub fn alpha(&self) -> f64 {
        match *self {
            KernelModel::Brownian { .. } => 2.0,
            KernelModel::SymmetricStable1D { alpha } => alpha,
            KernelModel::SubordinatorHalf => 0.5,
            KernelModel::SubordinatorGeneral { alpha } => alpha,
            KernelModel::Cauchy1D { .. } => 1.0,
            KernelModel::Cylindrical { alpha, .. } => alpha,
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            KernelModel::Brownian { dim } => dim,
            KernelModel::Cylindrical { dim, .. } => dim,
            _ => 1,
        }
    }

    /// Is the support restricted to increasing paths?
    pub fn is_one_sided(&self) -> bool {
        matches!(self, KernelModel::SubordinatorHalf | KernelModel::SubordinatorGeneral { .. })
    }

    /// Transition density `p_0(t; x, y)`.
    pub fn p0(&self, t: f64, x: &[f64], y: &[f64]) -> Result<f64> {
        if t <= 0.0 {
            return Err(Error::domain("p0 needs t > 0"));
        }
        let d = self.dim();
        if x.len() != d || y.len() != d {
            return Err(Error::domain(format!("p0 expects {d}-dimensional points")));
        }
        match *self {
            KernelModel::Brownian { dim } => {
                let r2: f64 = x.iter().zip(y).map(|(a, b)| (b - a) * (b - a)).sum();
                Ok((4.0 * PI * t).powf(-(dim as f64) / 2.0) * (-r2 / (4.0 * t)).exp())
            }
            KernelModel::SymmetricStable1D { alpha } => {
                let s = t.powf(1.0 / alpha);
                Ok(symmetric_stable_std(alpha, (y[0] - x[0]) / s) / s)
            }
            KernelModel::SubordinatorHalf => {
                let w = y[0] - x[0];
                if w <= 0.0 {
                    return Ok(0.0);
                }
                let e = t * t / (4.0 * w);
                Ok(if e > 700.0 { 0.0 } else { (4.0 * PI).powf(-0.5) * t * w.powf(-1.5) * (-e).exp() })
            }
            KernelModel::SubordinatorGeneral { alpha } => {
                let s = t.powf(1.0 / alpha);
                Ok(subordinator_std(alpha, (y[0] - x[0]) / s) / s)
            }
            KernelModel::Cauchy1D { drift } => {
                let w = y[0] - x[0] - drift * t;
                Ok(gamma(1.0) / PI * t / (w * w + t * t))
            }
            KernelModel::Cylindrical { alpha, .. } => {
                let s = t.powf(1.0 / alpha);
                let mut prod = 1.0;
                for (a, b) in x.iter().zip(y) {
                    prod *= symmetric_stable_std(alpha, (b - a) / s) / s;
                }
                Ok(prod)
            }
        }
    }

    /// `p_0(t; 0, y)` for one-dimensional kernels.
    pub fn p0_1d(&self, t: f64, x: f64, y: f64) -> Result<f64> {
        self.p0(t, &[x], &[y])
    }

    /// Density of the Lévy measure.
    ///
    /// For the cylindrical kernel this is the one-dimensional factor `ν`
    /// appearing in its limit theorems (the measure itself is singular).
    pub fn levy_density(&self, y: &[f64]) -> Result<f64> {
        match *self {
            KernelModel::Brownian { .. } => {
                Err(Error::unsupported("Brownian motion has no Lévy density"))
            }
            KernelModel::SymmetricStable1D { alpha } => {
                isotropic_levy_density(alpha, 1, y[0].abs())
            }
            KernelModel::Cauchy1D { .. } => isotropic_levy_density(1.0, 1, y[0].abs()),
            KernelModel::SubordinatorHalf => subordinator_levy_density(0.5, y[0]),
            KernelModel::SubordinatorGeneral { alpha } => subordinator_levy_density(alpha, y[0]),
            KernelModel::Cylindrical { alpha, .. } => isotropic_levy_density(alpha, 1, y[0].abs()),
        }
    }
}

/// `ν(y) = 2^α Γ((d+α)/2) / (π^{d/2} |Γ(-α/2)|) |y|^{-d-α}` for the
/// isotropic α-stable process with `E e^{i<z,Y_1>} = e^{-|z|^α}`.
pub fn isotropic_levy_density(alpha: f64, d: usize, r: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::domain("Lévy density needs alpha in (0, 2)"));
    }
    if r == 0.0 {
        return Err(Error::domain("Lévy density is singular at the origin"));
    }
    // |Γ(-α/2)| = (2/α) Γ(1 - α/2) for α ∈ (0, 2).
    let abs_gamma = 2.0 / alpha * gamma(1.0 - alpha / 2.0);
    let constant = 2.0f64.powf(alpha) * gamma((d as f64 + alpha) / 2.0)
        / (PI.powf(d as f64 / 2.0) * abs_gamma);
    Ok(constant * r.powf(-(d as f64) - alpha))
}

/// `ν(s) = α/Γ(1-α) s^{-1-α}` on `s > 0` for the α-stable subordinator.
pub fn subordinator_levy_density(alpha: f64, s: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain("subordinator Lévy density needs alpha in (0, 1)"));
    }
    if s == 0.0 {
        return Err(Error::domain("Lévy density is singular at the origin"));
    }
    if s < 0.0 {
        return Ok(0.0);
    }
    Ok(alpha / gamma(1.0 - alpha) * s.powf(-1.0 - alpha))
}

/// Numeric inversion of `e^{-tΨ}` for the one-dimensional stable laws,
/// with the scaling reduction to `t = 1` applied first.
pub fn stable_density_inversion(alpha: f64, t: f64, z: f64, kind: InversionKind) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::domain("inversion needs t > 0"));
    }
    match kind {
        InversionKind::Symmetric => {
            if !(alpha > 0.0 && alpha <= 2.0) {
                return Err(Error::domain("symmetric index must lie in (0, 2]"));
            }
            let s = t.powf(1.0 / alpha);
            Ok(symmetric_stable_std(alpha, z / s) / s)
        }
        InversionKind::Subordinator => {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::domain("subordinator index must lie in (0, 1)"));
            }
            let s = t.powf(1.0 / alpha);
            Ok(subordinator_std(alpha, z / s) / s)
        }
    }
}

/// Standardized symmetric stable density
/// `p̂(w) = (1/π) ∫_0^∞ cos(wz) e^{-z^α} dz`.
///
/// Large arguments go through the algebraic tail series (convergent for
/// `α < 1`, optimally truncated otherwise); everything else through
/// oscillation-aware quadrature with panels split at the cosine zeros.
pub fn symmetric_stable_std(alpha: f64, w: f64) -> f64 {
    let w = w.abs();
    if alpha >= 2.0 {
        return (4.0 * PI).powf(-0.5) * (-w * w / 4.0).exp();
    }
    if (alpha - 1.0).abs() < 1e-12 {
        return 1.0 / (PI * (1.0 + w * w));
    }
    if alpha < 1.99 && w.powf(alpha) > 12.0 {
        if let Some(v) = symmetric_tail_series(alpha, w) {
            return v;
        }
    }
    symmetric_quadrature(alpha, w)
}

/// `(1/π) Σ_k (-1)^{k+1} Γ(kα+1)/k! sin(kπα/2) w^{-kα-1}`, accepted only
/// when it resolves the value to ~1e-12 without losing digits.
fn symmetric_tail_series(alpha: f64, w: f64) -> Option<f64> {
    let lw = w.ln();
    let mut sum = 0.0f64;
    let mut prev = f64::INFINITY;
    let mut max_mag = 0.0f64;
    for k in 1..=60 {
        let kf = k as f64;
        let ln_mag = statrs::function::gamma::ln_gamma(kf * alpha + 1.0)
            - statrs::function::gamma::ln_gamma(kf + 1.0)
            - (kf * alpha + 1.0) * lw;
        let mag = ln_mag.exp();
        if mag > prev {
            // Past the optimal truncation point: accept if the remainder
            // bound is small enough.
            return if prev < 1e-12 * sum.abs() && max_mag < 1e3 * sum.abs() {
                Some(sum / PI)
            } else {
                None
            };
        }
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * mag * (kf * PI * alpha / 2.0).sin();
        sum += term;
        max_mag = max_mag.max(mag);
        if mag < 1e-14 * sum.abs() {
            return if max_mag < 1e3 * sum.abs() { Some(sum / PI) } else { None };
        }
        prev = mag;
    }
    if prev < 1e-12 * sum.abs() && max_mag < 1e3 * sum.abs() {
        Some(sum / PI)
    } else {
        None
    }
}

fn symmetric_quadrature(alpha: f64, w: f64) -> f64 {
    // e^{-z^α} < 1e-20 beyond z_max.
    let z_max = 46.0f64.powf(1.0 / alpha);
    let mut cuts = vec![0.0];
    if w > 1e-12 {
        // Zeros of cos(wz) at (k + 1/2)π / w.
        let mut k = 0usize;
        loop {
            let z = (k as f64 + 0.5) * PI / w;
            if z >= z_max {
                break;
            }
            cuts.push(z);
            k += 1;
            if k > 2_000_000 {
                break;
            }
        }
    }
    cuts.push(z_max);
    // Cap panel width so the non-oscillatory part is resolved too.
    let mut panels = Vec::new();
    for pair in cuts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let chunks = ((b - a) / (z_max / 8.0)).ceil().max(1.0) as usize;
        let step = (b - a) / chunks as f64;
        for c in 0..chunks {
            panels.push((a + step * c as f64, a + step * (c as f64 + 1.0)));
        }
    }
    let result = integrate_panels(&panels, QuadTarget::new(1e-12, 1e-18), |z| {
        (w * z).cos() * (-z.powf(alpha)).exp()
    });
    result.value / PI
}

/// Standardized α-stable subordinator density (`E e^{-λY} = e^{-λ^α}`),
/// through the tail series for large arguments and the Zolotarev integral
/// representation otherwise.
pub fn subordinator_std(alpha: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.powf(alpha) > 12.0 {
        if let Some(v) = subordinator_tail_series(alpha, x) {
            return v;
        }
    }
    zolotarev_integral(alpha, x)
}

/// `(1/π) Σ_k (-1)^{k+1} Γ(kα+1)/k! sin(kπα) x^{-kα-1}`.
fn subordinator_tail_series(alpha: f64, x: f64) -> Option<f64> {
    let lx = x.ln();
    let mut sum = 0.0f64;
    let mut prev = f64::INFINITY;
    let mut max_mag = 0.0f64;
    for k in 1..=80 {
        let kf = k as f64;
        let ln_mag = statrs::function::gamma::ln_gamma(kf * alpha + 1.0)
            - statrs::function::gamma::ln_gamma(kf + 1.0)
            - (kf * alpha + 1.0) * lx;
        let mag = ln_mag.exp();
        if mag > prev {
            return if prev < 1e-12 * sum.abs() && max_mag < 1e3 * sum.abs() {
                Some(sum / PI)
            } else {
                None
            };
        }
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * mag * (kf * PI * alpha).sin();
        max_mag = max_mag.max(mag);
        if mag < 1e-14 * sum.abs() {
            return if max_mag < 1e3 * sum.abs() { Some(sum / PI) } else { None };
        }
        prev = mag;
    }
    if prev < 1e-12 * sum.abs() && max_mag < 1e3 * sum.abs() {
        Some(sum / PI)
    } else {
        None
    }
}

/// Zolotarev's representation of the one-sided density:
/// `p(x) = (α/(1-α)) (1/π) x^{-1/(1-α)} ∫_0^π A(φ) e^{-x^{-α/(1-α)} A(φ)} dφ`
/// with `A(φ) = sin(αφ)^{α/(1-α)} sin((1-α)φ) sin(φ)^{-1/(1-α)}`.
/// The integrand is positive and bump-shaped: an exact reduction of the
/// Bromwich inversion of `e^{-λ^α}` to a real integral.
fn zolotarev_integral(alpha: f64, x: f64) -> f64 {
    let xi = x.powf(-alpha / (1.0 - alpha));
    let ln_a = |phi: f64| -> f64 {
        (alpha / (1.0 - alpha)) * (alpha * phi).sin().ln()
            + ((1.0 - alpha) * phi).sin().ln()
            - (1.0 / (1.0 - alpha)) * phi.sin().ln()
    };
    let integrand = |phi: f64| -> f64 {
        if phi <= 0.0 || phi >= PI {
            return 0.0;
        }
        let la = ln_a(phi);
        let a = la.exp();
        let e = la - xi * a;
        if e < -700.0 {
            0.0
        } else {
            e.exp()
        }
    };
    // The integrand peaks at the left end for small x and spreads towards
    // π for large x; dyadic panels on both ends keep adaptive depth low.
    let panels = [
        (0.0, PI / 512.0),
        (PI / 512.0, PI / 64.0),
        (PI / 64.0, PI / 8.0),
        (PI / 8.0, PI * 0.75),
        (PI * 0.75, PI * (1.0 - 1.0 / 64.0)),
        (PI * (1.0 - 1.0 / 64.0), PI),
    ];
    let mut total = 0.0;
    for &(a, b) in &panels {
        total += integrate_with(a, b, QuadTarget::new(1e-12, 1e-280), integrand).value;
    }
    alpha / (1.0 - alpha) / PI * x.powf(-1.0 / (1.0 - alpha)) * total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate;
    use rand::{Rng, SeedableRng};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    /// Total mass over the real line: direct quadrature on `[-1, 1]` plus
    /// log-substituted tails (reach `e^{40} ≈ 2e17`, enough for the
    /// heaviest `y^{-3/2}` subordinator tail).
    fn mass_1d(f: impl Fn(f64) -> f64, one_sided: bool) -> f64 {
        let target = QuadTarget::new(1e-11, 1e-16);
        let mut mass = integrate_with(-1.0, 1.0, target, &f).value;
        mass += integrate_with(0.0, 40.0, target, |x: f64| f(x.exp()) * x.exp()).value;
        if !one_sided {
            mass += integrate_with(0.0, 40.0, target, |x: f64| f(-(x.exp())) * x.exp()).value;
        }
        mass
    }

    #[test]
    fn brownian_plug_in_value() {
        let k = KernelModel::Brownian { dim: 1 };
        let v = k.p0(1.0, &[0.0], &[0.0]).unwrap();
        assert!(rel(v, (4.0 * PI).powf(-0.5)) < 1e-14);
    }

    #[test]
    fn subordinator_half_closed_form_value() {
        let k = KernelModel::SubordinatorHalf;
        let v = k.p0(1.0, &[0.0], &[1.0]).unwrap();
        let expect = (-0.25f64).exp() / (4.0 * PI).sqrt();
        assert!(rel(v, expect) < 1e-14);
    }

    #[test]
    fn symmetric_alpha_one_is_cauchy() {
        let stable = KernelModel::SymmetricStable1D { alpha: 1.0 };
        let cauchy = KernelModel::Cauchy1D { drift: 0.0 };
        for &y in &[0.0, 0.3, 1.0, 4.0, 20.0] {
            let a = stable.p0_1d(1.3, 0.0, y).unwrap();
            let b = cauchy.p0_1d(1.3, 0.0, y).unwrap();
            assert!(rel(a, b) < 1e-8, "y={y}");
        }
    }

    #[test]
    fn inversion_alpha_two_is_gaussian() {
        for &z in &[0.0, 0.5, 1.5, 3.0] {
            let v = stable_density_inversion(2.0, 1.0, z, InversionKind::Symmetric).unwrap();
            let g = (4.0 * PI).powf(-0.5) * (-z * z / 4.0).exp();
            assert!(rel(v, g) < 1e-10, "z={z}: {v} vs {g}");
        }
    }

    #[test]
    fn quadrature_route_matches_cauchy() {
        // Bypass the closed-form shortcut with α very close to 1.
        for &w in &[0.0, 0.7, 2.0, 9.0] {
            let v = symmetric_quadrature(1.0, w);
            let c = 1.0 / (PI * (1.0 + w * w));
            assert!(rel(v, c) < 1e-10, "w={w}");
        }
    }

    #[test]
    fn series_and_quadrature_agree_midrange() {
        for &alpha in &[0.8, 1.2, 1.5] {
            let w = 14.0f64.powf(1.0 / alpha) * 1.3;
            let series = symmetric_tail_series(alpha, w).expect("series should resolve");
            let quad = symmetric_quadrature(alpha, w);
            assert!(rel(series, quad) < 1e-9, "α={alpha} w={w}: {series} vs {quad}");
        }
    }

    #[test]
    fn subordinator_general_matches_half_closed_form() {
        let k = KernelModel::SubordinatorGeneral { alpha: 0.5 };
        let closed = KernelModel::SubordinatorHalf;
        for &y in &[0.05, 0.3, 1.0, 3.0, 30.0, 300.0] {
            let a = k.p0_1d(1.0, 0.0, y).unwrap();
            let b = closed.p0_1d(1.0, 0.0, y).unwrap();
            assert!(rel(a, b) < 1e-8, "y={y}: {a} vs {b}");
        }
        // And after scaling.
        for &t in &[0.3, 2.0] {
            let a = k.p0_1d(t, 0.1, 1.4).unwrap();
            let b = closed.p0_1d(t, 0.1, 1.4).unwrap();
            assert!(rel(a, b) < 1e-8, "t={t}");
        }
    }

    #[test]
    fn normalization_by_quadrature() {
        let cases: Vec<(KernelModel, bool)> = vec![
            (KernelModel::Brownian { dim: 1 }, false),
            (KernelModel::SymmetricStable1D { alpha: 1.5 }, false),
            (KernelModel::SymmetricStable1D { alpha: 0.8 }, false),
            (KernelModel::Cauchy1D { drift: 0.4 }, false),
            (KernelModel::SubordinatorHalf, true),
            (KernelModel::SubordinatorGeneral { alpha: 0.7 }, true),
        ];
        for (kernel, one_sided) in cases {
            let mass = mass_1d(|y| kernel.p0_1d(1.0, 0.0, y).unwrap(), one_sided);
            assert!((mass - 1.0).abs() < 1e-8, "{kernel:?}: mass {mass}");
        }
    }

    #[test]
    fn scaling_law_random_probes() {
        let kernels = [
            KernelModel::Brownian { dim: 1 },
            KernelModel::SymmetricStable1D { alpha: 1.3 },
            KernelModel::SubordinatorGeneral { alpha: 0.6 },
            KernelModel::Cauchy1D { drift: 0.0 },
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for kernel in kernels {
            let alpha = kernel.alpha();
            for _ in 0..100 {
                let t = 0.2 + 2.0 * rng.gen::<f64>();
                let u = 0.2 + 2.0 * rng.gen::<f64>();
                let y = 0.1 + 3.0 * rng.gen::<f64>();
                let lhs = kernel.p0_1d(t * u, 0.0, y).unwrap();
                let s = t.powf(-1.0 / alpha);
                let rhs = t.powf(-1.0 / alpha) * kernel.p0_1d(u, 0.0, s * y).unwrap();
                assert!(rel(lhs, rhs) < 1e-9, "{kernel:?} t={t} u={u} y={y}");
            }
        }
    }

    #[test]
    fn symmetric_density_is_even_and_unimodal() {
        let k = KernelModel::SymmetricStable1D { alpha: 1.5 };
        let mut last = f64::INFINITY;
        for i in 0..40 {
            let y = 0.25 * i as f64;
            let v = k.p0_1d(1.0, 0.0, y).unwrap();
            assert_eq!(v, k.p0_1d(1.0, 0.0, -y).unwrap());
            assert!(v <= last * (1.0 + 1e-12), "not monotone at y={y}");
            last = v;
        }
    }

    #[test]
    fn chapman_kolmogorov_brownian() {
        let k = KernelModel::Brownian { dim: 1 };
        let (s, t) = (0.4, 0.8);
        let y = 0.9;
        let conv = integrate(-12.0, 12.0, |z| {
            k.p0_1d(s, 0.0, z).unwrap() * k.p0_1d(t, z, y).unwrap()
        })
        .value;
        let direct = k.p0_1d(s + t, 0.0, y).unwrap();
        assert!((conv - direct).abs() < 1e-6, "{conv} vs {direct}");
    }

    #[test]
    fn blumenthal_getoor_tail_limit() {
        // p_0(1; 0, z) / ν(z) -> 1 for large |z|.
        let k = KernelModel::SymmetricStable1D { alpha: 1.5 };
        let z = 50.0;
        let ratio = k.p0_1d(1.0, 0.0, z).unwrap() / k.levy_density(&[z]).unwrap();
        assert!((ratio - 1.0).abs() < 0.02, "{ratio}");
    }

    #[test]
    fn levy_density_values() {
        // d=1, α=1: ν(y) = |y|^{-2}/π.
        let v = isotropic_levy_density(1.0, 1, 2.0).unwrap();
        assert!(rel(v, 1.0 / (PI * 4.0)) < 1e-12);
        // Subordinator α = 0.5: ν(s) = 0.5/Γ(0.5) s^{-1.5}.
        let v = subordinator_levy_density(0.5, 2.0).unwrap();
        assert!(rel(v, 0.5 / gamma(0.5) * 2.0f64.powf(-1.5)) < 1e-12);
    }

    #[test]
    fn levy_density_homogeneity() {
        for (alpha, d) in [(0.7, 1usize), (1.4, 1)] {
            let r = isotropic_levy_density(alpha, d, 2.0).unwrap()
                / isotropic_levy_density(alpha, d, 1.0).unwrap();
            assert!(rel(r, 2.0f64.powf(-(d as f64) - alpha)) < 1e-12);
        }
    }

    #[test]
    fn brownian_has_no_levy_density() {
        let k = KernelModel::Brownian { dim: 2 };
        assert!(matches!(k.levy_density(&[1.0]), Err(Error::Unsupported(_))));
    }

    #[test]
    fn cylindrical_is_a_product() {
        let k = KernelModel::Cylindrical { alpha: 1.2, dim: 2 };
        let f = KernelModel::SymmetricStable1D { alpha: 1.2 };
        let v = k.p0(1.7, &[0.0, 0.1], &[0.8, -0.4]).unwrap();
        let w = f.p0_1d(1.7, 0.0, 0.8).unwrap() * f.p0_1d(1.7, 0.1, -0.4).unwrap();
        assert!(rel(v, w) < 1e-12);
    }

    #[test]
    fn subordinator_supports_positive_axis_only() {
        for kernel in [
            KernelModel::SubordinatorHalf,
            KernelModel::SubordinatorGeneral { alpha: 0.3 },
        ] {
            assert_eq!(kernel.p0_1d(1.0, 0.5, 0.4).unwrap(), 0.0);
            assert!(kernel.p0_1d(1.0, 0.0, 0.5).unwrap() > 0.0);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let k = KernelModel::Brownian { dim: 1 };
        assert!(k.p0(0.0, &[0.0], &[1.0]).is_err());
        assert!(k.p0(1.0, &[0.0, 0.0], &[1.0]).is_err());
        assert!((KernelModel::SubordinatorGeneral { alpha: 1.2 }).validate().is_err());
    }
}
