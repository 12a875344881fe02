//! The spline family `P_n` underlying the series representation of the
//! reset transition density, together with its moments.
//!
//! `P_1(u) = 1/(1-m)` on `(m, 1]` and
//! `P_{n+1}(u) = (u - m^{n+1})_+^n ∫_u^1 P_n(v) / (v - m^{n+1})^{n+1} dv`.
//! Each `P_n` is supported on `[m^n, 1]`, equals
//! `(1-u)^{n-1} / ((n-1)! (m;m)_n)` on `[m, 1]` exactly, and is bounded by
//! that expression everywhere.
//!
//! # Representation
//!
//! Levels are stored through the ratio to their envelope,
//!
//! ```text
//! R_n(u) = P_n(u) * (n-1)! * (m;m)_n / (1-u)^{n-1}  ∈ [0, 1],
//! ```
//!
//! with `R_n ≡ 1` on `[m, 1]` and a Chebyshev proxy per breakpoint piece
//! `[m^{k+1}, m^k]` below `m`. In this scale the recursion becomes an
//! exponential average,
//!
//! ```text
//! R_{n+1}(u) = ∫_0^∞ e^{-s} R_n(v_u(s)) ds,
//! v_u(s) = a + (1-a)/(1+ρ(s)),   ρ(s) = e^{-s/n} (1-u)/(u-a),   a = m^{n+1},
//! ```
//!
//! which keeps every intermediate quantity of order one at any level, so
//! the family can be built to the depth required by large evaluation
//! horizons without under- or overflow. Piece values multiply back to
//! `P_n` through the envelope on demand.

use crate::numerics::chebyshev::Chebyshev;
use crate::numerics::gauss::gauss_legendre;
use crate::numerics::{integrate_with, QuadTarget};
use crate::qspecial::{pochhammer_factor, qq_finite, qq_infinite, QValue};
use crate::{Error, Result};
use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

/// Hard cap on family depth.
pub const MAX_LEVELS: usize = 512;

/// Exponential panels beyond this are dropped (`e^{-48} ≈ 1.4e-21`).
const S_CUTOFF: f64 = 48.0;

/// One stored level: Chebyshev proxies for the pieces below `m`.
/// `pieces[k-1]` covers `[m^{k+1}, m^k]`.
#[derive(Debug, Clone)]
struct Level {
    pieces: Vec<Chebyshev>,
}

/// Piecewise evaluable representation of `P_1 .. P_max_n`.
#[derive(Debug, Clone)]
pub struct SplineFamily {
    m: f64,
    max_n: usize,
    proxy_degree: usize,
    /// Deepest piece index built per level; pieces below `m^{floor+1}` are
    /// not represented (their mass is negligible for the configured use).
    piece_floor: usize,
    /// `m^k` for `k = 0 ..= piece_floor + 2`.
    breaks: Vec<f64>,
    /// `(m;m)_k` for `k = 0 ..= max_n`.
    mm: Vec<f64>,
    mm_inf: f64,
    levels: Vec<Level>,
}

/// Configuration for building a [`SplineFamily`].
#[derive(Debug, Clone)]
pub struct SplineFamilyBuilder {
    m: f64,
    max_n: usize,
    proxy_degree: usize,
    piece_floor: usize,
}

impl SplineFamilyBuilder {
    pub fn new(m: f64, max_n: usize) -> Result<Self> {
        QValue::new(m)?;
        if max_n == 0 || max_n > MAX_LEVELS {
            return Err(Error::domain(format!("max_n must lie in 1..={MAX_LEVELS}")));
        }
        Ok(Self { m, max_n, proxy_degree: 64, piece_floor: max_n })
    }

    /// Chebyshev degree per piece (at least 16).
    pub fn proxy_degree(mut self, degree: usize) -> Result<Self> {
        if degree < 16 {
            return Err(Error::domain("proxy_degree must be at least 16"));
        }
        self.proxy_degree = degree;
        Ok(self)
    }

    /// Only build pieces down to `u_min`: pieces `[m^{k+1}, m^k]` with
    /// `m^k < u_min` are skipped. Evaluation below the floor reports a
    /// coverage error; series integrals account for the missing mass.
    pub fn support_floor(mut self, u_min: f64) -> Result<Self> {
        if !(u_min > 0.0 && u_min < 1.0) {
            return Err(Error::domain("support floor must lie in (0, 1)"));
        }
        let k = (u_min.ln() / self.m.ln()).ceil() as usize;
        self.piece_floor = k.max(2);
        Ok(self)
    }

    pub fn build(self) -> Result<SplineFamily> {
        SplineFamily::build_impl(self)
    }
}

/// Build a family with full piece coverage, the form used for desk-scale
/// horizons. Deep families for large `t` set a support floor through
/// [`SplineFamilyBuilder`].
pub fn build_family(m: f64, max_n: usize, proxy_degree: usize) -> Result<SplineFamily> {
    SplineFamilyBuilder::new(m, max_n)?.proxy_degree(proxy_degree)?.build()
}

impl SplineFamily {
    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    pub fn proxy_degree(&self) -> usize {
        self.proxy_degree
    }

    /// Lowest represented `u`; pieces below are not built.
    pub fn support_floor(&self) -> f64 {
        self.power(self.piece_floor + 1)
    }

    /// `(m;m)_k`, `k <= max_n`.
    pub fn mm(&self, k: usize) -> f64 {
        self.mm[k]
    }

    /// `(m;m)_∞`.
    pub fn mm_inf(&self) -> f64 {
        self.mm_inf
    }

    /// `m^k` without repeated powf drift.
    fn power(&self, k: usize) -> f64 {
        if k < self.breaks.len() {
            self.breaks[k]
        } else {
            self.m.powi(k as i32)
        }
    }

    /// Piece index of `u < m`: `k` with `u ∈ [m^{k+1}, m^k)`.
    fn piece_of(&self, u: f64) -> usize {
        let mut k = ((u.ln() / self.m.ln()).ceil() as isize - 1).max(1) as usize;
        while k > 1 && self.power(k) <= u {
            k -= 1;
        }
        while self.power(k + 1) > u {
            k += 1;
        }
        k
    }

    /// The envelope ratio `R_n(u) ∈ [0, 1]`: `1` on `[m, 1]`, `0` outside
    /// the support, Chebyshev proxy on the pieces in between.
    pub fn ratio(&self, n: usize, u: f64) -> Result<f64> {
        if n == 0 || n > self.max_n {
            return Err(Error::Range { requested: n, available: self.max_n });
        }
        if u > 1.0 {
            return Ok(0.0);
        }
        if u >= self.m {
            // Closed form on [m, 1]; for n = 1 the envelope is P_1 itself.
            return Ok(1.0);
        }
        if u <= self.power(n).max(0.0) || u <= 0.0 {
            return Ok(0.0);
        }
        let k = self.piece_of(u);
        if k > self.piece_floor {
            return Err(Error::Coverage { u, floor: self.support_floor() });
        }
        let level = &self.levels[n - 1];
        if k > level.pieces.len() {
            return Ok(0.0);
        }
        Ok(level.pieces[k - 1].eval(u))
    }

    /// `ln` of the envelope `(1-u)^{n-1} / ((n-1)! (m;m)_n)`.
    pub(crate) fn ln_envelope(&self, n: usize, u: f64) -> f64 {
        let ln1u = if n == 1 { 0.0 } else { (n as f64 - 1.0) * (1.0 - u).ln() };
        ln1u - ln_gamma(n as f64) - self.mm[n].ln()
    }

    /// Evaluate `P_n(u)`: exact closed form on `[m, 1]`, proxy value below
    /// `m`, `0` outside the support. Values below `1e-300` flush to zero.
    pub fn eval_p(&self, n: usize, u: f64) -> Result<f64> {
        let r = self.ratio(n, u)?;
        if r == 0.0 {
            return Ok(0.0);
        }
        let ln_env = self.ln_envelope(n, u);
        if ln_env < -690.0 {
            return Ok(0.0);
        }
        Ok(r * ln_env.exp())
    }

    /// Evaluate `W_n(t, u) = t^{n-1} P_n(u/t)` for `t > 0`.
    pub fn eval_w(&self, n: usize, t: f64, u: f64) -> Result<f64> {
        if t <= 0.0 {
            return Err(Error::domain("eval_w needs t > 0"));
        }
        let scaled = u / t;
        let r = self.ratio(n, scaled)?;
        if r == 0.0 {
            return Ok(0.0);
        }
        let ln = (n as f64 - 1.0) * t.ln() + self.ln_envelope(n, scaled);
        if ln < -690.0 {
            return Ok(0.0);
        }
        Ok(r * ln.exp())
    }

    /// Breakpoints `m^k` intersected with `[lo, hi]`, clipped to the built
    /// support: the panel grid for integrating anything against the family.
    pub fn piece_panels(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let lo = lo.max(self.support_floor());
        let hi = hi.min(1.0);
        if lo >= hi {
            return Vec::new();
        }
        let mut cuts = vec![lo];
        for k in (0..=self.piece_floor + 1).rev() {
            let b = self.power(k);
            if b > lo && b < hi {
                cuts.push(b);
            }
        }
        cuts.push(hi);
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        cuts.windows(2).map(|w| (w[0], w[1])).collect()
    }

    fn build_impl(cfg: SplineFamilyBuilder) -> Result<SplineFamily> {
        let m = cfg.m;
        let max_n = cfg.max_n;
        let piece_floor = cfg.piece_floor.min(max_n);
        let mut breaks = Vec::with_capacity(piece_floor + 3);
        let mut p = 1.0;
        for _ in 0..=piece_floor + 2 {
            breaks.push(p);
            p *= m;
        }
        let mut mm = Vec::with_capacity(max_n + 1);
        let mut acc = 1.0;
        let mut mk = m;
        mm.push(1.0);
        for _ in 1..=max_n {
            acc *= 1.0 - mk;
            mk *= m;
            mm.push(acc);
        }
        let mut family = SplineFamily {
            m,
            max_n,
            proxy_degree: cfg.proxy_degree,
            piece_floor,
            breaks,
            mm,
            mm_inf: qq_infinite(m),
            levels: vec![Level { pieces: Vec::new() }],
        };
        for n in 1..max_n {
            // Build level n+1 from level n; pieces within a level are
            // independent.
            let n_pieces = n.min(piece_floor);
            let pieces: Vec<Chebyshev> = (1..=n_pieces)
                .into_par_iter()
                .map(|k| family.fit_piece(n, k))
                .collect::<Result<_>>()?;
            family.levels.push(Level { pieces });
        }
        Ok(family)
    }

    /// Fit the Chebyshev proxy of `R_{n+1}` on piece `k`.
    fn fit_piece(&self, n: usize, k: usize) -> Result<Chebyshev> {
        let lo = self.power(k + 1);
        let hi = self.power(k);
        let mut degree = self.proxy_degree;
        loop {
            let fit = Chebyshev::fit(lo, hi, degree, |u| self.next_ratio_at(n, u));
            if fit.tail_estimate() < 1e-10 {
                return Ok(fit);
            }
            if degree >= 192 {
                return Err(Error::Quadrature {
                    context: "spline level fit",
                    estimate: fit.tail_estimate(),
                    target: 1e-10,
                });
            }
            degree *= 2;
        }
    }

    /// `R_{n+1}(u)` through the exponential-average form of the recursion.
    fn next_ratio_at(&self, n: usize, u: f64) -> f64 {
        let a = self.power(n + 1);
        if u <= a {
            return 0.0;
        }
        if u >= self.m {
            return 1.0;
        }
        let nf = n as f64;
        let scale = (1.0 - u) / (u - a);
        let s_of = |v: f64| -> f64 {
            let r = (u - a) * (1.0 - v) / ((v - a) * (1.0 - u));
            -nf * r.ln()
        };
        let v_of = |s: f64| -> f64 {
            let rho = (-s / nf).exp() * scale;
            a + (1.0 - a) / (1.0 + rho)
        };
        let rule = gauss_legendre(24);
        let k_u = self.piece_of(u);
        let level = &self.levels[n - 1];
        let mut total = 0.0;
        // Panels by piece of the integration variable, from u up to m.
        // R_n vanishes below m^n, so integration starts there.
        let mut s_last = if u < self.power(n) { s_of(self.power(n)) } else { 0.0 };
        for piece in (1..=k_u).rev() {
            let v_hi = self.power(piece);
            if v_hi <= u {
                continue;
            }
            let s_hi = s_of(v_hi);
            if s_hi <= s_last {
                continue;
            }
            if s_last > S_CUTOFF {
                break;
            }
            let s_lo = s_last;
            s_last = s_hi;
            let s_hi = s_hi.min(S_CUTOFF);
            // Subdivide wide panels so GL-24 resolves e^{-s}.
            let width = s_hi - s_lo;
            let chunks = (width / 4.0).ceil().max(1.0) as usize;
            let step = width / chunks as f64;
            for c in 0..chunks {
                let a0 = s_lo + step * c as f64;
                let b0 = a0 + step;
                total += rule.integrate(a0, b0, |s| {
                    let v = v_of(s);
                    let r = if piece <= level.pieces.len() {
                        level.pieces[piece - 1].eval(v)
                    } else {
                        0.0
                    };
                    (-s).exp() * r
                });
            }
        }
        // Exact tail over [m, 1] where R_n = 1.
        let s_m = s_of(self.m);
        if s_m < 700.0 {
            total += (-s_m).exp();
        }
        total.clamp(0.0, 1.0)
    }
}

/// Closed-form moment `𝔸(γ, n) = ∫_0^1 u^γ P_n(u) du`, with the
/// `log(1/m)` substitution for a factor at `k + γ = 0`.
pub fn moment_a(gamma: f64, n: usize, m: f64) -> Result<f64> {
    let m = QValue::new(m)?.get();
    if n == 0 {
        return Err(Error::domain("moment_a needs n >= 1"));
    }
    let mut prod = 1.0 / qq_finite(m, n);
    for k in 1..=n {
        prod *= pochhammer_factor(m, k as f64 + gamma);
    }
    Ok(prod)
}

/// Scaled moment `𝔹(γ, n) = ∏_{k=1}^n (k+γ)/(1-m^{k+γ}) · 𝔸(γ, n)`,
/// with the product understood in the limiting sense at `γ ∈ -ℕ`; equals
/// `1/(m;m)_n` for every real `γ`.
pub fn scaled_moment_b(gamma: f64, n: usize, m: f64) -> Result<f64> {
    let a = moment_a(gamma, n, m)?;
    let mut denom = 1.0;
    for k in 1..=n {
        denom *= pochhammer_factor(m, k as f64 + gamma);
    }
    Ok(a / denom)
}

/// Smallest `J` with `t^J / J! < 1e-18`, the series truncation depth used
/// by the density representation at horizon `t`.
pub fn truncation_level(t: f64) -> usize {
    if t <= 0.0 {
        return 1;
    }
    let lt = t.ln();
    let mut j = t.ceil().max(1.0) as usize;
    loop {
        let ln_term = j as f64 * lt - ln_gamma(j as f64 + 1.0);
        if ln_term < -18.0 * std::f64::consts::LN_10 {
            return j;
        }
        j += 1;
        if j > 100_000 {
            return j;
        }
    }
}

/// Quadrature of `u^γ P_n(u)` against the built family; the oracle side of
/// the moment identities.
pub fn quadrature_moment(family: &SplineFamily, gamma: f64, n: usize) -> f64 {
    let lo = family.power(n.min(family.piece_floor + 1)).max(family.support_floor());
    let panels = family.piece_panels(lo, 1.0);
    let mut total = 0.0;
    for (a, b) in panels {
        total += integrate_with(a, b, QuadTarget::new(1e-12, 1e-300), |u| {
            u.powf(gamma) * family.eval_p(n, u).unwrap_or(0.0)
        })
        .value;
    }
    total
}

// ---------------------------------------------------------------------------
// Binary proxy cache (little-endian IEEE-754 doubles), keyed by
// (m, max_n, proxy_degree, piece_floor, format version).
// ---------------------------------------------------------------------------

const CACHE_MAGIC: &[u8; 4] = b"LRSF";
const CACHE_VERSION: u32 = 1;

impl SplineFamily {
    /// Serialize the proxy coefficients to a byte buffer.
    pub fn to_cache_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(CACHE_MAGIC);
        out.extend_from_slice(&CACHE_VERSION.to_le_bytes());
        out.extend_from_slice(&self.m.to_le_bytes());
        out.extend_from_slice(&(self.max_n as u32).to_le_bytes());
        out.extend_from_slice(&(self.proxy_degree as u32).to_le_bytes());
        out.extend_from_slice(&(self.piece_floor as u32).to_le_bytes());
        for level in self.levels.iter().skip(1) {
            out.extend_from_slice(&(level.pieces.len() as u32).to_le_bytes());
            for piece in &level.pieces {
                out.extend_from_slice(&(piece.coeffs.len() as u32).to_le_bytes());
                for c in &piece.coeffs {
                    out.extend_from_slice(&c.to_le_bytes());
                }
            }
        }
        out
    }

    /// Rebuild a family from [`SplineFamily::to_cache_bytes`] output.
    pub fn from_cache_bytes(bytes: &[u8]) -> Result<SplineFamily> {
        let mut pos = 0usize;
        let take = |pos: &mut usize, n: usize| -> Result<&[u8]> {
            if *pos + n > bytes.len() {
                return Err(Error::numeric("spline cache: truncated file"));
            }
            let s = &bytes[*pos..*pos + n];
            *pos += n;
            Ok(s)
        };
        let magic = take(&mut pos, 4)?;
        if magic != CACHE_MAGIC {
            return Err(Error::numeric("spline cache: bad magic"));
        }
        let version = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap());
        if version != CACHE_VERSION {
            return Err(Error::numeric(format!("spline cache: unsupported version {version}")));
        }
        let m = f64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap());
        let max_n = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap()) as usize;
        let proxy_degree = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap()) as usize;
        let piece_floor = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap()) as usize;
        QValue::new(m)?;
        if max_n == 0 || max_n > MAX_LEVELS {
            return Err(Error::numeric("spline cache: bad max_n"));
        }
        let mut breaks = Vec::with_capacity(piece_floor + 3);
        let mut p = 1.0;
        for _ in 0..=piece_floor + 2 {
            breaks.push(p);
            p *= m;
        }
        let mut mm = vec![1.0];
        let mut acc = 1.0;
        let mut mk = m;
        for _ in 1..=max_n {
            acc *= 1.0 - mk;
            mk *= m;
            mm.push(acc);
        }
        let mut levels = vec![Level { pieces: Vec::new() }];
        for _ in 2..=max_n {
            let n_pieces = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap()) as usize;
            let mut pieces = Vec::with_capacity(n_pieces);
            for k in 1..=n_pieces {
                let len = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap()) as usize;
                let mut coeffs = Vec::with_capacity(len);
                for _ in 0..len {
                    coeffs.push(f64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap()));
                }
                pieces.push(Chebyshev { lo: breaks[k + 1], hi: breaks[k], coeffs });
            }
            levels.push(Level { pieces });
        }
        Ok(SplineFamily {
            m,
            max_n,
            proxy_degree,
            piece_floor,
            breaks,
            mm,
            mm_inf: qq_infinite(m),
            levels,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate;
    use rand::{Rng, SeedableRng};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn family(m: f64, n: usize) -> SplineFamily {
        build_family(m, n, 64).unwrap()
    }

    #[test]
    fn p1_is_constant_on_its_support() {
        let f = family(0.5, 4);
        assert_eq!(f.eval_p(1, 0.49).unwrap(), 0.0);
        assert_eq!(f.eval_p(1, 1.01).unwrap(), 0.0);
        assert!(rel(f.eval_p(1, 0.75).unwrap(), 2.0) < 1e-14);
    }

    #[test]
    fn p2_closed_form_on_upper_interval() {
        let m = 0.37;
        let f = family(m, 4);
        for &u in &[0.4, 0.6, 0.9, 1.0] {
            let expect = (1.0 - u) / ((1.0 - m) * (1.0 - m * m));
            assert!((f.eval_p(2, u).unwrap() - expect).abs() < 1e-13, "u={u}");
        }
    }

    #[test]
    fn p_vanishes_at_one_for_higher_levels() {
        let f = family(0.5, 6);
        for n in 2..=6 {
            assert_eq!(f.eval_p(n, 1.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn corner_value_closed_form() {
        // P_{n+1}(m^n) = m^{n(n-1)/2} (1/n!) (1-m)^n / (m;m)_{n+1}
        let m: f64 = 0.5;
        let f = family(m, 8);
        let fact = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
        for n in 1..=6usize {
            let expect = m.powi((n * (n - 1) / 2) as i32) * (1.0 - m).powi(n as i32)
                / (fact(n) * qq_finite(m, n + 1));
            let got = f.eval_p(n + 1, m.powi(n as i32)).unwrap();
            assert!(rel(got, expect) < 1e-9, "n={n}: {got} vs {expect}");
        }
    }

    #[test]
    fn level_three_matches_independent_quadrature() {
        // Oracle: P_3 by adaptive quadrature of the recursion from the
        // hand-derived closed form of P_2, independent of the proxies.
        let m: f64 = 0.55;
        let f = family(m, 5);
        let p2 = |v: f64| -> f64 {
            if v > 1.0 || v <= m * m {
                0.0
            } else if v >= m {
                (1.0 - v) / ((1.0 - m) * (1.0 - m * m))
            } else {
                (v - m * m) / (m * (1.0 - m) * (1.0 - m * m))
            }
        };
        let a = m.powi(3);
        for &u in &[a * 1.05, (a + m * m) / 2.0, m * m * 0.99] {
            let oracle = (u - a).powi(2)
                * (integrate(u, m, |v| p2(v) / (v - a).powi(3)).value
                    + integrate(m, 1.0, |v| p2(v) / (v - a).powi(3)).value);
            let got = f.eval_p(3, u).unwrap();
            assert!(rel(got, oracle) < 1e-9, "u={u}: {got} vs {oracle}");
        }
    }

    #[test]
    fn eval_w_is_homogeneous() {
        let f = family(0.4, 6);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let t = 0.5 + rng.gen::<f64>() * 3.0;
            let u = rng.gen::<f64>() * t;
            for n in 1..=5usize {
                for &lambda in &[0.5, 2.0] {
                    let lhs = f.eval_w(n, lambda * t, lambda * u).unwrap();
                    let rhs = lambda.powi(n as i32 - 1) * f.eval_w(n, t, u).unwrap();
                    assert!((lhs - rhs).abs() <= 1e-11 * rhs.abs().max(1.0), "n={n} λ={lambda}");
                }
            }
        }
    }

    #[test]
    fn eval_w_level_one_is_indicator() {
        let m = 0.3;
        let f = family(m, 3);
        let t = 2.5;
        assert!(rel(f.eval_w(1, t, 0.9 * t).unwrap(), 1.0 / (1.0 - m)) < 1e-14);
        assert_eq!(f.eval_w(1, t, 0.2 * t).unwrap(), 0.0);
        assert_eq!(f.eval_w(1, t, 1.2 * t).unwrap(), 0.0);
    }

    #[test]
    fn eval_w_level_two_matches_defining_integral() {
        // W_2(t, u) = ∫ W_1(t-s, u - m² s) ds; with W_1 an indicator the
        // integral is an interval length computed here independently.
        let m: f64 = 0.45;
        let f = family(m, 4);
        let t = 3.0;
        let m2 = m * m;
        for &u in &[m2 * t * 1.1, 0.5 * t, 0.8 * t, 0.99 * t] {
            let s_hi: f64 = (t - u) / (1.0 - m2);
            let s_lo: f64 = ((m * t - u) / (m * (1.0 - m))).max(0.0);
            let oracle = (s_hi - s_lo).max(0.0) / (1.0 - m);
            let got = f.eval_w(2, t, u).unwrap();
            assert!((got - oracle).abs() < 1e-10, "u={u}: {got} vs {oracle}");
        }
    }

    #[test]
    fn moment_a_at_zero_is_inverse_factorial() {
        for m in [0.2, 0.5, 0.8] {
            let mut fact = 1.0;
            for n in 1..=10usize {
                fact *= n as f64;
                assert!(rel(moment_a(0.0, n, m).unwrap(), 1.0 / fact) < 1e-13);
            }
        }
    }

    #[test]
    fn moment_a_level_one_closed_form() {
        let m: f64 = 0.6;
        for &g in &[-0.5, 0.7, 2.0] {
            let expect = (1.0 - m.powf(1.0 + g)) / ((1.0 + g) * (1.0 - m));
            assert!(rel(moment_a(g, 1, m).unwrap(), expect) < 1e-14);
        }
    }

    #[test]
    fn moment_a_matches_quadrature_oracle() {
        let f = family(0.6, 6);
        let got = moment_a(-2.5, 4, 0.6).unwrap();
        let oracle = quadrature_moment(&f, -2.5, 4);
        assert!(rel(got, oracle) < 1e-8, "{got} vs {oracle}");
    }

    #[test]
    fn scaled_moment_is_constant_in_gamma() {
        for m in [0.25, 0.5, 0.75] {
            for n in 1..=6usize {
                let expect = 1.0 / qq_finite(m, n);
                for &g in &[-7.3, -3.0, 0.0, 2.5] {
                    let got = scaled_moment_b(g, n, m).unwrap();
                    assert!(rel(got, expect) < 1e-11, "m={m} n={n} γ={g}");
                }
            }
        }
    }

    #[test]
    fn moment_recursion_identity() {
        // (j+1+γ) 𝔸(γ, j+1) = 𝔸(γ, j) + γ m^{j+1} 𝔸(γ-1, j+1)
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for m in [0.3, 0.6] {
            for j in 1..=5usize {
                for _ in 0..8 {
                    let g = -4.0 + 8.0 * rng.gen::<f64>();
                    let lhs = (j as f64 + 1.0 + g) * moment_a(g, j + 1, m).unwrap();
                    let rhs = moment_a(g, j, m).unwrap()
                        + g * m.powi(j as i32 + 1) * moment_a(g - 1.0, j + 1, m).unwrap();
                    assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0), "m={m} j={j} γ={g}");
                }
            }
        }
    }

    #[test]
    fn support_and_envelope_bound() {
        let m = 0.5;
        let f = family(m, 10);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in 1..=10usize {
            for _ in 0..1000 {
                let u = rng.gen::<f64>() * 1.1;
                let p = f.eval_p(n, u).unwrap();
                if u < m.powi(n as i32) || u > 1.0 {
                    assert_eq!(p, 0.0, "support violation at n={n} u={u}");
                } else {
                    let env = (1.0 - u).powi(n as i32 - 1)
                        / ((1..n).map(|k| k as f64).product::<f64>() * qq_finite(m, n));
                    assert!(p <= env * (1.0 + 1e-12) + 1e-300, "bound violation n={n} u={u}");
                }
            }
        }
    }

    #[test]
    fn recursion_residual_is_small() {
        // P_{n+1}(u) - (u - m^{n+1})^n ∫_u^1 P_n(v)/(v - m^{n+1})^{n+1} dv
        let m: f64 = 0.5;
        let f = family(m, 8);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
        for n in 2..=6usize {
            let a = m.powi(n as i32 + 1);
            for _ in 0..20 {
                let u = a + rng.gen::<f64>() * (1.0 - a);
                let mut integral = 0.0;
                for (lo, hi) in f.piece_panels(u, 1.0) {
                    integral += integrate(lo, hi, |v| {
                        f.eval_p(n, v).unwrap() / (v - a).powi(n as i32 + 1)
                    })
                    .value;
                }
                let rhs = (u - a).powi(n as i32) * integral;
                let lhs = f.eval_p(n + 1, u).unwrap();
                assert!((lhs - rhs).abs() < 1e-9 * rhs.abs().max(1e-6), "n={n} u={u}");
            }
        }
    }

    #[test]
    fn deep_level_spot_check() {
        // A deep truncated family still satisfies the recursion pointwise,
        // checked in the stable ratio scale.
        let m = 0.5;
        let f = SplineFamilyBuilder::new(m, 60)
            .unwrap()
            .support_floor(1e-3)
            .unwrap()
            .build()
            .unwrap();
        let n = 40usize;
        let a = m.powi(n as i32 + 1);
        let u = 0.01;
        let mut integral = 0.0;
        for (lo, hi) in f.piece_panels(u, 1.0) {
            integral += integrate(lo, hi, |v| {
                f.eval_p(n, v).unwrap_or(0.0) / (v - a).powi(n as i32 + 1)
            })
            .value;
        }
        let lhs = f.ratio(n + 1, u).unwrap();
        let rhs = (u - a).powi(n as i32) * integral / f.ln_envelope(n + 1, u).exp();
        assert!((lhs - rhs).abs() < 1e-8, "{lhs} vs {rhs}");
    }

    #[test]
    fn truncation_level_matches_definition() {
        for &t in &[0.5, 2.0, 10.0, 40.0] {
            let j = truncation_level(t);
            let below = |j: usize| {
                (j as f64 * t.ln() - ln_gamma(j as f64 + 1.0)) < -18.0 * std::f64::consts::LN_10
            };
            assert!(below(j));
            assert!(!below(j - 1));
        }
    }

    #[test]
    fn cache_roundtrip_is_exact() {
        let f = family(0.42, 8);
        let bytes = f.to_cache_bytes();
        let g = SplineFamily::from_cache_bytes(&bytes).unwrap();
        assert_eq!(f.max_n(), g.max_n());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let u = rng.gen::<f64>();
            for n in 1..=8 {
                assert_eq!(f.eval_p(n, u).unwrap(), g.eval_p(n, u).unwrap());
            }
        }
    }

    #[test]
    fn coverage_error_below_floor() {
        let f = SplineFamilyBuilder::new(0.5, 30)
            .unwrap()
            .support_floor(1e-2)
            .unwrap()
            .build()
            .unwrap();
        assert!(matches!(f.eval_p(25, 1e-4), Err(Error::Coverage { .. })));
    }
}
