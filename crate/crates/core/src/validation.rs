//! The acceptance suite: every identity and limit the library promises,
//! runnable as a batch. Each criterion reports pass/fail with a one-line
//! detail; the `acceptance` integration test and the CLI `validate`
//! subcommand both drive this module.

use crate::asymptotics::{
    brownian_bulk_approx, brownian_tail_approx, classify_regime, rho_ratio_diagnostic,
    stable_ratio_diagnostic, BulkMethod, Regime,
};
use crate::kernels::KernelModel;
use crate::measures::{
    mu_density, mu_limit_moment, mu_t_integer_moment, mu_t_moment,
};
use crate::montecarlo::{simulate_endpoint, HistogramSpec, SimConfig, SimKernel};
use crate::numerics::{integrate_with, QuadTarget};
use crate::qspecial::qq_finite;
use crate::resetdensity::{ResetModel, RhoMethod};
use crate::splines::{moment_a, quadrature_moment, SplineFamily, SplineFamilyBuilder};
use crate::{ResetParams, Result};
use serde::Serialize;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CheckResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:02} [{}] {}: {} ({:.1}s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.seconds
        )
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

// Families are expensive; share them across criteria (and across the
// parallel test harness).
fn shared_family(m: f64, max_n: usize, floor: Option<f64>) -> Arc<SplineFamily> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize, u64), Arc<SplineFamily>>>> = OnceLock::new();
    let key = (m.to_bits(), max_n, floor.unwrap_or(0.0).to_bits());
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(key)
        .or_insert_with(|| {
            let builder = SplineFamilyBuilder::new(m, max_n).unwrap();
            let builder = match floor {
                Some(f) => builder.support_floor(f).unwrap(),
                None => builder,
            };
            Arc::new(builder.build().unwrap())
        })
        .clone()
}

fn brownian_model(depth: usize, floor: Option<f64>) -> ResetModel {
    let family = shared_family(0.5, depth, floor);
    let params = ResetParams::from_m(2.0, 0.5, 1).unwrap();
    ResetModel::new(KernelModel::Brownian { dim: 1 }, params, family).unwrap()
}

fn finish(id: usize, name: &'static str, start: Instant, passed: bool, detail: String) -> CheckResult {
    CheckResult { id, name, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

const GAMMA_GRID: [f64; 8] = [-3.5, -2.0, -1.0, -0.5, 0.0, 1.0, 2.0, 4.0];
const M_GRID: [f64; 3] = [0.2, 0.5, 0.8];

/// 1. Spline moment identity against the quadrature oracle, with the
/// limiting values probed by a small `ε` shift.
pub fn criterion_01() -> CheckResult {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut worst_probe = 0.0f64;
    for &m in &M_GRID {
        let family = shared_family(m, 12, None);
        for n in 1..=8usize {
            for &g in &GAMMA_GRID {
                let closed = moment_a(g, n, m).unwrap();
                let quad = quadrature_moment(&family, g, n);
                worst = worst.max(rel(quad, closed));
            }
        }
        for k in [1.0f64, 2.0, 3.0] {
            for n in 1..=8usize {
                let center = moment_a(-k, n, m).unwrap();
                for eps in [1e-6, -1e-6] {
                    let probe = moment_a(-k + eps, n, m).unwrap();
                    worst_probe = worst_probe.max((probe - center).abs() / center.abs().max(1.0));
                }
            }
        }
    }
    let passed = worst < 1e-8 && worst_probe < 1e-5;
    finish(
        1,
        "spline moment identity",
        start,
        passed,
        format!("max rel err {worst:.2e} (tol 1e-8), ε-probe {worst_probe:.2e} (tol 1e-5)"),
    )
}

/// 2. Moment recursion residual.
pub fn criterion_02() -> CheckResult {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for &m in &M_GRID {
        for j in 1..=8usize {
            for &g in &GAMMA_GRID {
                let lhs = (j as f64 + 1.0 + g) * moment_a(g, j + 1, m).unwrap();
                let term_a = moment_a(g, j, m).unwrap();
                let term_b = g * m.powi(j as i32 + 1) * moment_a(g - 1.0, j + 1, m).unwrap();
                let scale = lhs.abs().max(term_a.abs()).max(term_b.abs()).max(1e-12);
                worst = worst.max((lhs - term_a - term_b).abs() / scale);
            }
        }
    }
    let passed = worst < 1e-9;
    finish(2, "moment recursion residual", start, passed, format!("max residual {worst:.2e} (tol 1e-9)"))
}

/// 3. `μ_t` cross-formula agreement and the first/second moment identities.
pub fn criterion_03() -> CheckResult {
    let start = Instant::now();
    let mut worst_cross = 0.0f64;
    let mut worst_first = 0.0f64;
    let mut bound_ok = true;
    for &m in &M_GRID {
        for &t in &[0.5, 2.0, 10.0] {
            for k in 0..=6usize {
                let series = mu_t_moment(k as f64, t, m).unwrap();
                let integral = mu_t_integer_moment(k, t, m).unwrap();
                worst_cross = worst_cross.max(rel(series, integral));
            }
            let expect = (1.0 - (-(1.0 - m) * t).exp()) / (1.0 - m);
            worst_first = worst_first.max(rel(mu_t_moment(1.0, t, m).unwrap(), expect));
            let second = mu_t_integer_moment(2, t, m).unwrap();
            let lhs = (1.0 - m) * (1.0 - m) / (1.0 - (-(1.0 - m) * t).exp()) * second;
            if lhs > 2.0 / (1.0 + m) + 1e-12 {
                bound_ok = false;
            }
        }
    }
    let passed = worst_cross < 1e-10 && worst_first < 1e-12 && bound_ok;
    finish(
        3,
        "mu_t cross-formula",
        start,
        passed,
        format!(
            "cross {worst_cross:.2e} (tol 1e-10), first moment {worst_first:.2e} (tol 1e-12), second-moment bound {}",
            if bound_ok { "held" } else { "violated" }
        ),
    )
}

/// 4. Limit measure: normalization, integer moments, and the convergence
/// of `μ_t` moments at `t = 80`.
pub fn criterion_04() -> CheckResult {
    let start = Instant::now();
    let target = QuadTarget::new(1e-12, 1e-300);
    let mut worst_mass = 0.0f64;
    let mut worst_mom = 0.0f64;
    let mut worst_conv = 0.0f64;
    for &m in &[0.2, 0.5] {
        let mass = integrate_with(0.0, 80.0, target, |u| mu_density(u, m).unwrap()).value;
        worst_mass = worst_mass.max((mass - 1.0).abs());
        for k in 1..=5usize {
            let quad = integrate_with(0.0, 120.0, target, |u| {
                u.powi(k as i32) * mu_density(u, m).unwrap()
            })
            .value;
            let closed = (1..=k).map(|i| i as f64).product::<f64>() / qq_finite(m, k);
            worst_mom = worst_mom.max(rel(quad, closed));
        }
        for &g in &[-2.5, -1.0, -0.5, 0.5, 1.0, 2.0, 4.0] {
            let a = mu_t_moment(g, 80.0, m).unwrap();
            let b = mu_limit_moment(g, m).unwrap();
            worst_conv = worst_conv.max((a - b).abs());
        }
    }
    let passed = worst_mass < 1e-10 && worst_mom < 1e-8 && worst_conv <= 1e-8;
    finish(
        4,
        "limit measure",
        start,
        passed,
        format!(
            "mass dev {worst_mass:.2e} (tol 1e-10), moments {worst_mom:.2e} (tol 1e-8), t=80 gap {worst_conv:.2e} (tol 1e-8)"
        ),
    )
}

struct KernelCase {
    name: &'static str,
    model: ResetModel,
    y_grid: Vec<f64>,
}

fn representation_cases() -> Vec<KernelCase> {
    let m = 0.5;
    let family = shared_family(m, 60, None);
    let mk = |kernel: KernelModel, alpha: f64| -> ResetModel {
        let params = ResetParams::from_m(alpha, m, kernel.dim()).unwrap();
        ResetModel::new(kernel, params, family.clone()).unwrap()
    };
    let sym_grid: Vec<f64> = (0..20)
        .map(|i| {
            let mag = 0.2 * 1.55f64.powi(i / 2);
            if i % 2 == 0 { mag } else { -mag }
        })
        .collect();
    let pos_grid: Vec<f64> = (0..20).map(|i| 0.05 * 1.4f64.powi(i)).collect();
    vec![
        KernelCase {
            name: "brownian d=1",
            model: mk(KernelModel::Brownian { dim: 1 }, 2.0),
            y_grid: (0..20).map(|i| -6.0 + 12.0 * i as f64 / 19.0).collect(),
        },
        KernelCase {
            name: "symmetric alpha=1.5",
            model: mk(KernelModel::SymmetricStable1D { alpha: 1.5 }, 1.5),
            y_grid: sym_grid.clone(),
        },
        KernelCase {
            name: "cauchy",
            model: mk(KernelModel::Cauchy1D { drift: 0.0 }, 1.0),
            y_grid: sym_grid,
        },
        KernelCase {
            name: "subordinator alpha=1/2",
            model: mk(KernelModel::SubordinatorHalf, 0.5),
            y_grid: pos_grid.clone(),
        },
        KernelCase {
            name: "subordinator alpha=0.7",
            model: mk(KernelModel::SubordinatorGeneral { alpha: 0.7 }, 0.7),
            y_grid: pos_grid,
        },
    ]
}

/// 5. Representation equivalence on a 20×20 grid per kernel, plus total
/// mass (and the marginal consistency of the cylindrical kernel).
pub fn criterion_05() -> CheckResult {
    let start = Instant::now();
    let t_grid: Vec<f64> = (0..20).map(|i| 0.3 * (8.0f64 / 0.3).powf(i as f64 / 19.0)).collect();
    let mut worst = 0.0f64;
    let mut worst_mass = 0.0f64;
    let mut details = Vec::new();
    for case in representation_cases() {
        let mut case_worst = 0.0f64;
        for &t in &t_grid {
            for &y in &case.y_grid {
                let series = case.model.p_reset(t, &[0.0], &[y]).unwrap();
                let origin = case.model.p_reset_origin(t, &[y]).unwrap();
                if series.max(origin) > 1e-280 {
                    case_worst = case_worst.max(rel(series, origin.max(1e-300)));
                }
            }
        }
        let mass = case.model.mass_1d(2.0, 0.3).unwrap();
        worst_mass = worst_mass.max((mass - 1.0).abs());
        worst = worst.max(case_worst);
        details.push(format!("{} {:.1e}", case.name, case_worst));
    }
    // Cylindrical d=2: the y1-marginal of the reset density equals the
    // one-dimensional symmetric reset density (same u mixes every
    // coordinate), which pins its mass through the 1-d case above.
    let m = 0.5;
    let family = shared_family(m, 60, None);
    let cyl = ResetModel::new(
        KernelModel::Cylindrical { alpha: 1.2, dim: 2 },
        ResetParams::from_m(1.2, m, 2).unwrap(),
        family.clone(),
    )
    .unwrap();
    let one_d = ResetModel::new(
        KernelModel::SymmetricStable1D { alpha: 1.2 },
        ResetParams::from_m(1.2, m, 1).unwrap(),
        family,
    )
    .unwrap();
    let mut worst_cyl = 0.0f64;
    let t = 2.0;
    for &y2 in &[0.4, 1.5] {
        let marginal = {
            let target = QuadTarget::new(1e-9, 1e-14);
            let f = |y1: f64| cyl.p_reset(t, &[0.0, 0.0], &[y1, y2]).unwrap();
            let mut s = integrate_with(-2.0, 2.0, target, f).value;
            s += integrate_with(2.0f64.ln(), 40.0, target, |x: f64| f(x.exp()) * x.exp()).value;
            s += integrate_with(2.0f64.ln(), 40.0, target, |x: f64| f(-x.exp()) * x.exp()).value;
            s
        };
        let direct = one_d.p_reset(t, &[0.0], &[y2]).unwrap();
        worst_cyl = worst_cyl.max(rel(marginal, direct));
    }
    let passed = worst < 1e-9 && worst_mass < 1e-7 && worst_cyl < 1e-7;
    finish(
        5,
        "representation equivalence",
        start,
        passed,
        format!(
            "route gap {worst:.2e} (tol 1e-9) [{}], mass dev {worst_mass:.2e} (tol 1e-7), cylindrical marginal {worst_cyl:.2e} (tol 1e-7)",
            details.join(", ")
        ),
    )
}

/// 6. Monte Carlo concordance: histogram vs the analytic density, and the
/// AIMD mean against its closed form.
pub fn criterion_06() -> CheckResult {
    let start = Instant::now();
    let model = brownian_model(60, None);
    let params = *model.params();
    let t = 2.0;
    let bins = 40usize;
    let cfg = SimConfig {
        params,
        kernel: SimKernel::Gaussian,
        t,
        paths: 1_000_000,
        seed: 20260810,
        histogram: Some(HistogramSpec { lo: -4.5, hi: 4.5, bins }),
    };
    let stats = simulate_endpoint(&cfg).unwrap();
    let cells = stats.histogram.as_ref().unwrap();
    let rule = crate::numerics::gauss_legendre(24);
    let mut within = 0usize;
    for cell in cells {
        let exact = rule.integrate(cell.lo, cell.hi, |y| model.p_reset_origin(t, &[y]).unwrap());
        let se = cell
            .stderr
            .max((exact * (1.0 - exact) / cfg.paths as f64).sqrt())
            .max(1.0 / cfg.paths as f64);
        if (cell.mass - exact).abs() <= 3.0 * se {
            within += 1;
        }
    }
    let frac = within as f64 / bins as f64;
    // AIMD: drift kernel with factor c; the endpoint mean is
    // (1 - e^{-(1-c)t})/(1-c).
    let c = 0.5;
    let aimd_cfg = SimConfig {
        params: ResetParams::from_c(1.0, c, 1).unwrap(),
        kernel: SimKernel::Drift,
        t,
        paths: 1_000_000,
        seed: 777,
        histogram: None,
    };
    let aimd = simulate_endpoint(&aimd_cfg).unwrap();
    let expect = (1.0 - (-(1.0 - c) * t).exp()) / (1.0 - c);
    let aimd_dev = (aimd.moments[0] - expect).abs() / aimd.moment_stderr[0];
    let passed = frac >= 0.95 && aimd_dev <= 4.0;
    finish(
        6,
        "Monte Carlo concordance",
        start,
        passed,
        format!("{within}/{bins} bins within 3σ (need ≥ 95%), AIMD mean at {aimd_dev:.2}σ (tol 4σ)"),
    )
}

/// 7. Ergodicity: sup and L¹ distance to `ρ` decreasing in `t`, small at
/// `t = 40`.
pub fn criterion_07() -> CheckResult {
    let start = Instant::now();
    let model = brownian_model(170, Some(3e-5));
    let y_grid: Vec<f64> = (0..41).map(|i| -10.0 + 20.0 * i as f64 / 40.0).collect();
    let rho: Vec<f64> = y_grid
        .iter()
        .map(|&y| model.rho(&[y], RhoMethod::ResolventSeries).unwrap())
        .collect();
    let mut sups = Vec::new();
    for &t in &[5.0, 10.0, 20.0, 40.0] {
        let mut sup = 0.0f64;
        for (y, r) in y_grid.iter().zip(&rho) {
            sup = sup.max((model.p_reset_origin(t, &[*y]).unwrap() - r).abs());
        }
        sups.push(sup);
    }
    let decreasing = sups.windows(2).all(|w| w[1] < w[0]);
    let sup_final = *sups.last().unwrap();
    let target = QuadTarget::new(1e-7, 1e-13);
    let l1 = integrate_with(-14.0, 14.0, target, |y| {
        (model.p_reset_origin(40.0, &[y]).unwrap()
            - model.rho(&[y], RhoMethod::ResolventSeries).unwrap())
        .abs()
    })
    .value;
    let passed = decreasing && sup_final < 1e-3 && l1 < 1e-3;
    finish(
        7,
        "ergodic convergence",
        start,
        passed,
        format!(
            "sup distance {} at t=5..40 ({}), final {sup_final:.2e} (tol 1e-3), L1 {l1:.2e} (tol 1e-3)",
            sups.iter().map(|s| format!("{s:.1e}")).collect::<Vec<_>>().join(" → "),
            if decreasing { "monotone" } else { "NOT monotone" }
        ),
    )
}

/// 8. Stationary-density identities: mixture vs resolvent series, even
/// moments, tail ratio.
pub fn criterion_08() -> CheckResult {
    let start = Instant::now();
    let model = brownian_model(60, None);
    let m = 0.5f64;
    let mut worst_pair = 0.0f64;
    for &y in &[0.0, 0.2, 0.7, 1.5, 3.0, 6.0, 12.0] {
        let a = model.rho(&[y], RhoMethod::Mixture).unwrap();
        let b = model.rho(&[y], RhoMethod::ResolventSeries).unwrap();
        worst_pair = worst_pair.max(rel(a, b));
    }
    let mut worst_mom = 0.0f64;
    let target = QuadTarget::new(1e-10, 1e-300);
    for k in 1..=3usize {
        let quad = integrate_with(-60.0, 60.0, target, |y| {
            y.powi(2 * k as i32) * model.rho(&[y], RhoMethod::ResolventSeries).unwrap()
        })
        .value;
        let closed = (1..=2 * k).map(|i| i as f64).product::<f64>() / qq_finite(m, k);
        worst_mom = worst_mom.max(rel(quad, closed));
    }
    let y = 35.0f64;
    let ratio = model.rho(&[y], RhoMethod::ResolventSeries).unwrap()
        * y.exp()
        * 2.0
        * crate::qspecial::qq_infinite(m);
    let passed = worst_pair < 1e-8 && worst_mom < 1e-6 && (0.99..=1.01).contains(&ratio);
    finish(
        8,
        "stationary density identities",
        start,
        passed,
        format!(
            "mixture/resolvent gap {worst_pair:.2e} (tol 1e-8), even moments {worst_mom:.2e} (tol 1e-6), tail ratio {ratio:.6}"
        ),
    )
}

/// 9. Fokker–Planck residual with second-order decay.
pub fn criterion_09() -> CheckResult {
    let start = Instant::now();
    let model = brownian_model(60, None);
    let (t, x, y) = (1.0, 0.2, 0.7);
    let at_h = model.fokker_planck_residual(t, x, y, 1e-3).unwrap();
    // Order probe at steps where truncation dominates roundoff.
    let mut residuals = Vec::new();
    for &h in &[0.04, 0.02, 0.01] {
        let r = model.fokker_planck_residual(t, x, y, h).unwrap();
        residuals.push(r.forward.max(r.adjoint));
    }
    let slope = ((residuals[2] / residuals[0]).ln()) / (0.25f64).ln();
    let passed = at_h.forward <= 1e-4 && at_h.adjoint <= 1e-4 && slope >= 1.6;
    finish(
        9,
        "Fokker-Planck residual",
        start,
        passed,
        format!(
            "residuals at h=1e-3: fwd {:.2e}, adj {:.2e} (tol 1e-4); order {slope:.2} (need ≥ 1.6)",
            at_h.forward, at_h.adjoint
        ),
    )
}

/// 10. Tail-regime error decays like 1/t at fixed `|y|²/4t² = 2`.
pub fn criterion_10() -> CheckResult {
    let start = Instant::now();
    let model = brownian_model(170, Some(3e-5));
    let m = 0.5;
    let mut errs = Vec::new();
    let ts = [10.0, 20.0, 40.0];
    for &t in &ts {
        let y = [2.0 * t * 2.0f64.sqrt()];
        let exact = model.p_reset_origin(t, &y).unwrap();
        let (approx, _) = brownian_tail_approx(m, t, &y, 1, 0.05).unwrap();
        errs.push((approx / exact - 1.0).abs());
    }
    // Least-squares slope of ln err vs ln t.
    let slope = fit_slope(&ts, &errs);
    let passed = slope <= -0.8;
    finish(
        10,
        "tail asymptotics (Theorem F regime)",
        start,
        passed,
        format!(
            "rel errors {} over t=10,20,40; fitted slope {slope:.2} (need <= -0.8)",
            errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn fit_slope(ts: &[f64], errs: &[f64]) -> f64 {
    let n = ts.len() as f64;
    let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.max(1e-300).ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

/// 11. Bulk-regime error decays like 1/t at `|y|²/4t² = 0.6`, and the
/// classifier refuses the uncovered bands.
pub fn criterion_11() -> CheckResult {
    let start = Instant::now();
    let model = brownian_model(170, Some(3e-5));
    let m = 0.5;
    let mut errs = Vec::new();
    let ts = [30.0, 60.0, 120.0];
    for &t in &ts {
        let y = [2.0 * t * 0.6f64.sqrt()];
        let exact = model.p_reset_origin(t, &y).unwrap();
        let (approx, _) =
            brownian_bulk_approx(m, t, &y, 1, 0.05, BulkMethod::SteepestDescent).unwrap();
        errs.push((approx / exact - 1.0).abs());
    }
    let slope = fit_slope(&ts, &errs);
    // The uncovered bands refuse.
    let t = 20.0;
    let banded = [
        2.0 * t * 0.26f64.sqrt(), // just above m² = 0.25
        2.0 * t * 0.99f64.sqrt(),
        2.0 * t * 1.01f64.sqrt(),
    ];
    let refuses = banded.iter().all(|&y| {
        let r = classify_regime(m, t, &[y], 0.05).unwrap();
        r.regime == Regime::Uncovered
            && brownian_bulk_approx(m, t, &[y], 1, 0.05, BulkMethod::SteepestDescent).is_err()
            && brownian_tail_approx(m, t, &[y], 1, 0.05).is_err()
    });
    let passed = slope <= -0.8 && refuses;
    finish(
        11,
        "bulk asymptotics (Theorem D regime)",
        start,
        passed,
        format!(
            "rel errors {} over t=30,60,120; slope {slope:.2} (need <= -0.8); uncovered bands {}",
            errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(", "),
            if refuses { "refused" } else { "NOT refused" }
        ),
    )
}

/// 12. Ratio limits against the Lévy density for the jump kernels.
pub fn criterion_12() -> CheckResult {
    let start = Instant::now();
    let m = 0.5;
    let family = shared_family(m, 170, Some(3e-5));
    let (t, y) = (50.0, 200.0);
    let mut details = Vec::new();
    let mut worst = 0.0f64;
    let mut worst_rho = 0.0f64;
    for (name, kernel, alpha) in [
        ("symmetric α=0.8", KernelModel::SymmetricStable1D { alpha: 0.8 }, 0.8),
        ("symmetric α=1.5", KernelModel::SymmetricStable1D { alpha: 1.5 }, 1.5),
        ("subordinator α=0.5", KernelModel::SubordinatorHalf, 0.5),
    ] {
        let params = ResetParams::from_m(alpha, m, 1).unwrap();
        let model = ResetModel::new(kernel, params, family.clone()).unwrap();
        let diag = stable_ratio_diagnostic(&model, t, &[0.0], &[y]).unwrap().abs();
        let rho_diag =
            rho_ratio_diagnostic(&model, &[y]).unwrap().abs() * (1.0 - m);
        worst = worst.max(diag);
        worst_rho = worst_rho.max(rho_diag);
        details.push(format!("{name}: p {diag:.3}, ρ {rho_diag:.3}"));
    }
    // Cylindrical d = 2 against the product of 1-d Lévy factors and the
    // limit integral.
    let cyl = ResetModel::new(
        KernelModel::Cylindrical { alpha: 1.2, dim: 2 },
        ResetParams::from_m(1.2, m, 2).unwrap(),
        family,
    )
    .unwrap();
    let cyl_diag = stable_ratio_diagnostic(&cyl, t, &[0.0, 0.0], &[200.0, 0.7])
        .unwrap()
        .abs();
    let passed = worst < 0.05 && worst_rho < 0.05 && cyl_diag < 0.10;
    finish(
        12,
        "stable ratio limits",
        start,
        passed,
        format!(
            "{} | cylindrical {cyl_diag:.3} (tol 0.10); 1-d tols 0.05",
            details.join(" | ")
        ),
    )
}

/// Run the full suite in order.
pub fn run_all() -> Vec<CheckResult> {
    vec![
        criterion_01(),
        criterion_02(),
        criterion_03(),
        criterion_04(),
        criterion_05(),
        criterion_06(),
        criterion_07(),
        criterion_08(),
        criterion_09(),
        criterion_10(),
        criterion_11(),
        criterion_12(),
    ]
}

/// Run one criterion by id.
pub fn run_one(id: usize) -> Result<CheckResult> {
    match id {
        1 => Ok(criterion_01()),
        2 => Ok(criterion_02()),
        3 => Ok(criterion_03()),
        4 => Ok(criterion_04()),
        5 => Ok(criterion_05()),
        6 => Ok(criterion_06()),
        7 => Ok(criterion_07()),
        8 => Ok(criterion_08()),
        9 => Ok(criterion_09()),
        10 => Ok(criterion_10()),
        11 => Ok(criterion_11()),
        12 => Ok(criterion_12()),
        _ => Err(crate::Error::config(format!("no criterion {id}; valid ids are 1..=12"))),
    }
}
