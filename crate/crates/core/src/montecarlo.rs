//! Independent stochastic oracle: simulate the reset process path by path
//! and aggregate endpoint statistics.
//!
//! Per-path randomness comes from dedicated ChaCha streams keyed by
//! `(seed, path index)`, so an identical configuration reproduces
//! bit-identical statistics regardless of the number of worker threads.

use crate::{Error, ResetParams, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Sampler family for the driving process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SimKernel {
    /// Brownian motion with `E Y_t² = 2t` (matches `Ψ(z) = z²`).
    Gaussian,
    /// Symmetric α-stable with `E e^{izY_t} = e^{-t|z|^α}`.
    SymmetricStable { alpha: f64 },
    /// α-stable subordinator with `E e^{-uY_t} = e^{-t u^α}`.
    Subordinator { alpha: f64 },
    /// Deterministic unit drift `Y_t = t` (the AIMD case; the endpoint law
    /// is exactly `μ_t` with `m` replaced by `c`).
    Drift,
}

/// Histogram layout: `bins` equal cells on `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramSpec {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

/// Full simulation configuration; equal configurations produce identical
/// output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub params: ResetParams,
    pub kernel: SimKernel,
    pub t: f64,
    pub paths: usize,
    pub seed: u64,
    pub histogram: Option<HistogramSpec>,
}

/// One histogram cell.
#[derive(Debug, Clone, Serialize)]
pub struct HistogramCell {
    pub lo: f64,
    pub hi: f64,
    pub mass: f64,
    pub stderr: f64,
}

/// Aggregated endpoint statistics.
#[derive(Debug, Clone, Serialize)]
pub struct EnsembleStats {
    pub paths: usize,
    pub seed: u64,
    pub t: f64,
    /// Raw endpoint moments `E X^k`, orders 1..4.
    pub moments: [f64; 4],
    /// Standard errors of the raw moments.
    pub moment_stderr: [f64; 4],
    /// Mean number of resets per path (Poisson with mean `t`).
    pub mean_resets: f64,
    pub histogram: Option<Vec<HistogramCell>>,
    /// Mass that fell outside the histogram range.
    pub histogram_overflow: f64,
}

impl EnsembleStats {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }

    /// Histogram CSV with columns `bin_left,bin_right,mass,stderr`.
    pub fn histogram_csv(&self) -> Option<String> {
        let cells = self.histogram.as_ref()?;
        let mut out = String::from("bin_left,bin_right,mass,stderr\n");
        for c in cells {
            out.push_str(&format!("{:.17e},{:.17e},{:.17e},{:.17e}\n", c.lo, c.hi, c.mass, c.stderr));
        }
        Some(out)
    }
}

/// Draw one standardized stable variate.
///
/// `Gaussian` returns `N(0, 2)`; `SymmetricStable` uses the
/// Chambers–Mallows–Stuck transform in the convention matching
/// `E e^{izY} = e^{-|z|^α}`; `Subordinator` uses Kanter's representation
/// matching `E e^{-uY} = e^{-u^α}`.
pub fn sample_stable(kernel: SimKernel, rng: &mut impl Rng) -> Result<f64> {
    match kernel {
        SimKernel::Gaussian => {
            let n: f64 = rng.sample(rand_distr::StandardNormal);
            Ok(n * std::f64::consts::SQRT_2)
        }
        SimKernel::Drift => Ok(1.0),
        SimKernel::SymmetricStable { alpha } => {
            if !(alpha > 0.0 && alpha <= 2.0) {
                return Err(Error::domain("symmetric sampler needs alpha in (0, 2]"));
            }
            let u = std::f64::consts::PI * (clamp_open(rng.gen::<f64>()) - 0.5);
            let w = exp_variate(rng);
            if (alpha - 1.0).abs() < 1e-12 {
                return Ok(u.tan());
            }
            let s = (alpha * u).sin() / u.cos().powf(1.0 / alpha);
            let tail = ((u - alpha * u).cos() / w).powf((1.0 - alpha) / alpha);
            Ok(s * tail)
        }
        SimKernel::Subordinator { alpha } => {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::domain("subordinator sampler needs alpha in (0, 1)"));
            }
            let u = std::f64::consts::PI * clamp_open(rng.gen::<f64>());
            let w = exp_variate(rng);
            let s1 = (alpha * u).sin() / u.sin().powf(1.0 / alpha);
            let s2 = (((1.0 - alpha) * u).sin() / w).powf((1.0 - alpha) / alpha);
            Ok(s1 * s2)
        }
    }
}

fn clamp_open(u: f64) -> f64 {
    u.clamp(1e-14, 1.0 - 1e-14)
}

fn exp_variate(rng: &mut impl Rng) -> f64 {
    -clamp_open(rng.gen::<f64>()).ln()
}

fn check_config(config: &SimConfig) -> Result<()> {
    if config.paths == 0 {
        return Err(Error::config("simulation needs at least one path"));
    }
    if config.t <= 0.0 {
        return Err(Error::config("simulation horizon must be positive"));
    }
    let alpha = match config.kernel {
        SimKernel::Gaussian => 2.0,
        SimKernel::SymmetricStable { alpha } => alpha,
        SimKernel::Subordinator { alpha } => alpha,
        SimKernel::Drift => 1.0,
    };
    if (alpha - config.params.alpha).abs() > 1e-12 {
        return Err(Error::config("kernel index does not match reset parameters"));
    }
    Ok(())
}

/// Simulate one endpoint; exposed for two-sample checks.
pub fn simulate_path(config: &SimConfig, path_index: u64) -> Result<(f64, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(path_index.wrapping_add(1));
    let c = config.params.c;
    let alpha = config.params.alpha;
    let t = config.t;
    let mut pos = 0.0f64;
    let mut tau = 0.0f64;
    let mut resets = 0u32;
    loop {
        let gap = exp_variate(&mut rng);
        if tau + gap >= t {
            let dt: f64 = t - tau;
            pos += dt.powf(1.0 / alpha) * sample_stable(config.kernel, &mut rng)?;
            break;
        }
        pos += gap.powf(1.0 / alpha) * sample_stable(config.kernel, &mut rng)?;
        pos *= c;
        tau += gap;
        resets += 1;
    }
    Ok((pos, resets))
}

/// Run the full ensemble and aggregate endpoint statistics.
pub fn simulate_endpoint(config: &SimConfig) -> Result<EnsembleStats> {
    check_config(config)?;
    let endpoints: Vec<(f64, u32)> = (0..config.paths as u64)
        .into_par_iter()
        .map(|i| simulate_path(config, i))
        .collect::<Result<_>>()?;
    let n = config.paths as f64;
    let mut sums = [0.0f64; 8];
    let mut reset_sum = 0.0f64;
    for &(x, r) in &endpoints {
        let mut p = x;
        for k in 0..8 {
            sums[k] += p;
            p *= x;
        }
        reset_sum += r as f64;
    }
    let mut moments = [0.0; 4];
    let mut moment_stderr = [0.0; 4];
    for k in 0..4 {
        let mk = sums[k] / n;
        let m2k = sums[2 * k + 1] / n;
        moments[k] = mk;
        moment_stderr[k] = ((m2k - mk * mk).max(0.0) / n).sqrt();
    }
    let (histogram, overflow) = match config.histogram {
        None => (None, 0.0),
        Some(spec) => {
            if spec.bins == 0 || !(spec.hi > spec.lo) {
                return Err(Error::config("histogram needs bins > 0 and hi > lo"));
            }
            let width = (spec.hi - spec.lo) / spec.bins as f64;
            let mut counts = vec![0u64; spec.bins];
            let mut out = 0u64;
            for &(x, _) in &endpoints {
                if x < spec.lo || x >= spec.hi {
                    out += 1;
                    continue;
                }
                let idx = (((x - spec.lo) / width) as usize).min(spec.bins - 1);
                counts[idx] += 1;
            }
            let cells = counts
                .iter()
                .enumerate()
                .map(|(i, &cnt)| {
                    let mass = cnt as f64 / n;
                    HistogramCell {
                        lo: spec.lo + width * i as f64,
                        hi: spec.lo + width * (i as f64 + 1.0),
                        mass,
                        stderr: (mass * (1.0 - mass) / n).sqrt(),
                    }
                })
                .collect();
            (Some(cells), out as f64 / n)
        }
    };
    Ok(EnsembleStats {
        paths: config.paths,
        seed: config.seed,
        t: config.t,
        moments,
        moment_stderr,
        mean_resets: reset_sum / n,
        histogram,
        histogram_overflow: overflow,
    })
}

/// Total-variation estimate between the histogram and a reference density:
/// `(1/2) Σ_bins |mass - ∫_bin ref| + (1/2)|outside masses|`. The estimate
/// carries the histogram's binning bias on top of sampling noise.
pub fn tv_estimate(stats: &EnsembleStats, reference: impl Fn(f64) -> f64) -> Result<f64> {
    let cells = stats
        .histogram
        .as_ref()
        .ok_or_else(|| Error::config("tv_estimate needs a histogram"))?;
    let rule = crate::numerics::gauss_legendre(16);
    let mut tv = 0.0;
    let mut ref_mass = 0.0;
    for cell in cells {
        let r = rule.integrate(cell.lo, cell.hi, &reference);
        ref_mass += r;
        tv += (cell.mass - r).abs();
    }
    let emp_out = stats.histogram_overflow;
    let ref_out = (1.0 - ref_mass).max(0.0);
    Ok(0.5 * (tv + (emp_out - ref_out).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(kernel: SimKernel, params: ResetParams, t: f64, paths: usize) -> SimConfig {
        SimConfig { params, kernel, t, paths, seed: 31415, histogram: None }
    }

    #[test]
    fn gaussian_sampler_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 1_000_000;
        let mut s2 = 0.0;
        for _ in 0..n {
            let x = sample_stable(SimKernel::Gaussian, &mut rng).unwrap();
            s2 += x * x;
        }
        let var = s2 / n as f64;
        assert!((var - 2.0).abs() < 0.02, "variance {var}");
    }

    #[test]
    fn cauchy_sampler_density_at_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 1_000_000;
        let w = 0.1;
        let mut hits = 0u64;
        let mut signs = 0i64;
        for _ in 0..n {
            let x = sample_stable(SimKernel::SymmetricStable { alpha: 1.0 }, &mut rng).unwrap();
            if x.abs() < w {
                hits += 1;
            }
            signs += if x > 0.0 { 1 } else { -1 };
        }
        let density = hits as f64 / n as f64 / (2.0 * w);
        assert!((density - 1.0 / std::f64::consts::PI).abs() < 0.01 / std::f64::consts::PI);
        // Median zero: sign balance within 4σ.
        assert!((signs as f64 / n as f64).abs() < 4.0 / (n as f64).sqrt());
    }

    #[test]
    fn subordinator_sampler_ks_distance() {
        // Empirical CDF vs the closed ½-stable CDF erfc(1/(2√x)).
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 1_000_000usize;
        let mut draws: Vec<f64> = (0..n)
            .map(|_| sample_stable(SimKernel::Subordinator { alpha: 0.5 }, &mut rng).unwrap())
            .collect();
        draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut ks = 0.0f64;
        for (i, &x) in draws.iter().enumerate() {
            let f = statrs::function::erf::erfc(1.0 / (2.0 * x.sqrt()));
            let lo = i as f64 / n as f64;
            let hi = (i + 1) as f64 / n as f64;
            ks = ks.max((f - lo).abs()).max((f - hi).abs());
        }
        assert!(ks < 0.002, "KS distance {ks}");
    }

    #[test]
    fn deterministic_across_runs() {
        let params = ResetParams::from_m(2.0, 0.5, 1).unwrap();
        let cfg = SimConfig {
            histogram: Some(HistogramSpec { lo: -4.0, hi: 4.0, bins: 16 }),
            ..config(SimKernel::Gaussian, params, 1.5, 20_000)
        };
        let a = simulate_endpoint(&cfg).unwrap();
        let b = simulate_endpoint(&cfg).unwrap();
        assert_eq!(a.moments, b.moments);
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn aimd_mean_matches_closed_form() {
        // Drift kernel: E X_t = (1 - e^{-(1-c)t})/(1-c).
        let c = 0.5;
        let params = ResetParams::from_c(1.0, c, 1).unwrap();
        let cfg = config(SimKernel::Drift, params, 2.0, 400_000);
        let stats = simulate_endpoint(&cfg).unwrap();
        let expect = (1.0 - (-(1.0 - c) * 2.0f64).exp()) / (1.0 - c);
        let dev = (stats.moments[0] - expect).abs();
        assert!(dev < 4.0 * stats.moment_stderr[0], "dev {dev} vs se {}", stats.moment_stderr[0]);
    }

    #[test]
    fn poisson_reset_count() {
        let params = ResetParams::from_m(2.0, 0.5, 1).unwrap();
        let cfg = config(SimKernel::Gaussian, params, 3.0, 200_000);
        let stats = simulate_endpoint(&cfg).unwrap();
        let se = (3.0f64 / 200_000.0).sqrt();
        assert!((stats.mean_resets - 3.0).abs() < 4.0 * se, "{}", stats.mean_resets);
    }

    #[test]
    fn near_unit_factor_recovers_free_process() {
        // c -> 1: the reset has no effect; the endpoint is Y_t itself.
        let params = ResetParams::from_c(2.0, 1.0 - 1e-9, 1).unwrap();
        let cfg = config(SimKernel::Gaussian, params, 2.0, 400_000);
        let stats = simulate_endpoint(&cfg).unwrap();
        let second = stats.moments[1];
        let se = stats.moment_stderr[1];
        assert!((second - 4.0).abs() < 4.0 * se, "E X² = {second} (se {se})");
    }

    #[test]
    fn affine_fixed_point_two_sample() {
        // At large t: X_∞ =d= c X_∞ + Y_E with E ~ Exp(1) independent.
        let c = 0.5f64.sqrt();
        let params = ResetParams::from_c(2.0, c, 1).unwrap();
        let cfg = config(SimKernel::Gaussian, params, 30.0, 300_000);
        let left = simulate_endpoint(&cfg).unwrap();
        let cfg_b = SimConfig { seed: 999, ..cfg.clone() };
        let right = simulate_endpoint(&cfg_b).unwrap();
        // Build c X + Y_E from the second, independent sample.
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        let n = cfg.paths;
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        let mut m2sq = 0.0;
        for i in 0..n {
            let (x, _) = simulate_path(&cfg_b, i as u64).unwrap();
            let e = exp_variate(&mut rng);
            let y = e.sqrt() * sample_stable(SimKernel::Gaussian, &mut rng).unwrap();
            let z = c * x + y;
            m1 += z;
            m2 += z * z;
            m2sq += z.powi(4);
        }
        let m1 = m1 / n as f64;
        let m2 = m2 / n as f64;
        let se1 = (m2 / n as f64).sqrt();
        let se2 = ((m2sq / n as f64 - m2 * m2) / n as f64).sqrt();
        assert!((left.moments[0] - m1).abs() < 4.0 * (se1 + left.moment_stderr[0]));
        assert!((left.moments[1] - m2).abs() < 4.0 * (se2 + left.moment_stderr[1]));
        let _ = right;
    }

    #[test]
    fn tv_estimate_of_itself_is_zero() {
        let params = ResetParams::from_m(2.0, 0.5, 1).unwrap();
        let cfg = SimConfig {
            histogram: Some(HistogramSpec { lo: -5.0, hi: 5.0, bins: 20 }),
            ..config(SimKernel::Gaussian, params, 1.0, 50_000)
        };
        let stats = simulate_endpoint(&cfg).unwrap();
        // Reference = piecewise-constant density equal to the histogram.
        let cells = stats.histogram.clone().unwrap();
        let tv = tv_estimate(&stats, |x| {
            cells
                .iter()
                .find(|c| x >= c.lo && x < c.hi)
                .map(|c| c.mass / (c.hi - c.lo))
                .unwrap_or(0.0)
        })
        .unwrap();
        assert!(tv < 1e-12, "tv {tv}");
    }
}
