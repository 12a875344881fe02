//! Argument surface and command implementations.

use crate::output::{emit, emit_gnuplot, fmt, Format, Table};
use clap::{Args, Parser, Subcommand, ValueEnum};
use levy_reset_core::kernels::KernelModel;
use levy_reset_core::measures::{mu_limit_moment, mu_t_moment};
use levy_reset_core::montecarlo::{simulate_endpoint, HistogramSpec, SimConfig, SimKernel};
use levy_reset_core::resetdensity::{ResetModel, RhoMethod};
use levy_reset_core::splines::{truncation_level, SplineFamily, SplineFamilyBuilder};
use levy_reset_core::{asymptotics, validation, Error, ResetParams};
use std::path::PathBuf;
use std::sync::Arc;

pub fn error_json(kind: &str, message: &str) -> String {
    serde_json::json!({ "error": { "kind": kind, "message": message } }).to_string()
}

pub fn classify_error(err: &Error) -> (&'static str, i32) {
    match err {
        Error::Config(_) => ("config", 2),
        Error::Io(_) => ("io", 3),
        _ => ("numeric", 3),
    }
}

#[derive(Parser)]
#[command(
    name = "levy-reset",
    version,
    about = "Densities, moments, and asymptotics for stable processes with partial resetting"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transition density tables p(t; x, y).
    Density(DensityArgs),
    /// Stationary density tables ρ(y).
    Stationary(StationaryArgs),
    /// Moment tables of the mixing measures or the stationary density.
    Moments(MomentsArgs),
    /// Regime classification and asymptotic approximations.
    Asymptotics(AsymptoticsArgs),
    /// Monte Carlo endpoint simulation.
    Simulate(SimulateArgs),
    /// Run the acceptance suite and emit a pass/fail report.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KernelArg {
    Brownian,
    Stable,
    Cauchy,
    Subordinator,
    Cylindrical,
    /// Unit drift (AIMD); simulation only.
    Drift,
}

#[derive(Args)]
struct ModelArgs {
    /// Base process.
    #[arg(long, value_enum)]
    kernel: KernelArg,
    /// Stability index for stable / subordinator / cylindrical kernels.
    #[arg(long)]
    alpha: Option<f64>,
    /// Dimension (brownian, cylindrical).
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Drift of the Cauchy kernel.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    drift: f64,
    /// Reset factor c in (0, 1); exactly one of --c / --m.
    #[arg(long, conflicts_with = "m")]
    c: Option<f64>,
    /// Reduced parameter m = c^α in (0, 1).
    #[arg(long)]
    m: Option<f64>,
}

impl ModelArgs {
    fn kernel(&self) -> Result<KernelModel, Error> {
        let need_alpha = || {
            self.alpha
                .ok_or_else(|| Error::config("this kernel needs --alpha"))
        };
        let kernel = match self.kernel {
            KernelArg::Brownian => KernelModel::Brownian { dim: self.d },
            KernelArg::Stable => KernelModel::SymmetricStable1D { alpha: need_alpha()? },
            KernelArg::Cauchy => KernelModel::Cauchy1D { drift: self.drift },
            KernelArg::Subordinator => {
                let alpha = need_alpha()?;
                if (alpha - 0.5).abs() < 1e-14 {
                    KernelModel::SubordinatorHalf
                } else {
                    KernelModel::SubordinatorGeneral { alpha }
                }
            }
            KernelArg::Cylindrical => KernelModel::Cylindrical { alpha: need_alpha()?, dim: self.d },
            KernelArg::Drift => return Err(Error::config("the drift kernel is simulation-only")),
        };
        kernel.validate()?;
        Ok(kernel)
    }

    fn params(&self, alpha: f64, dim: usize) -> Result<ResetParams, Error> {
        match (self.c, self.m) {
            (Some(c), None) => ResetParams::from_c(alpha, c, dim),
            (None, Some(m)) => ResetParams::from_m(alpha, m, dim),
            _ => Err(Error::config("provide exactly one of --c or --m")),
        }
    }

    fn model(&self, t_max: f64) -> Result<ResetModel, Error> {
        let kernel = self.kernel()?;
        let params = self.params(kernel.alpha(), kernel.dim())?;
        let family = build_or_load_family(params.m, t_max)?;
        ResetModel::new(kernel, params, family)
    }
}

/// Family sizing: depth covers the series truncation level at the largest
/// horizon; deep builds switch to a support floor so the piece count stays
/// bounded. Honors the RESET_KERNELS_CACHE directory.
fn build_or_load_family(m: f64, t_max: f64) -> Result<Arc<SplineFamily>, Error> {
    let depth = (truncation_level(t_max.max(1.0)) + 8).min(400);
    let floor = if depth > 80 { Some((0.02 / t_max).min(1e-4)) } else { None };
    let cache_dir = std::env::var_os("RESET_KERNELS_CACHE").map(PathBuf::from);
    let path = cache_dir.as_ref().map(|dir| {
        dir.join(format!(
            "spline_{:016x}_{}_{:016x}.bin",
            m.to_bits(),
            depth,
            floor.unwrap_or(0.0).to_bits()
        ))
    });
    if let Some(p) = &path {
        if let Ok(bytes) = std::fs::read(p) {
            if let Ok(family) = SplineFamily::from_cache_bytes(&bytes) {
                if family.m() == m && family.max_n() == depth {
                    return Ok(Arc::new(family));
                }
            }
        }
    }
    let builder = SplineFamilyBuilder::new(m, depth)?;
    let builder = match floor {
        Some(f) => builder.support_floor(f)?,
        None => builder,
    };
    let family = builder.build()?;
    if let Some(p) = &path {
        if let Some(dir) = p.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(p, family.to_cache_bytes())?;
    }
    Ok(Arc::new(family))
}

#[derive(Args)]
struct CommonOut {
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write a companion .gp plotting script next to --out.
    #[arg(long)]
    emit_gnuplot: bool,
}

impl CommonOut {
    fn finish(&self, table: Table, xcol: usize, ycol: usize, title: &str) -> Result<i32, Error> {
        emit(self.out.as_deref(), &table.render(self.format))?;
        if self.emit_gnuplot {
            let out = self
                .out
                .as_deref()
                .ok_or_else(|| Error::config("--emit-gnuplot needs --out"))?;
            emit_gnuplot(out, xcol, ycol, title)?;
        }
        Ok(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DensityMethod {
    /// Level-by-level series (works for any x).
    Series,
    /// Collapsed mixture route (x = 0).
    Mixture,
    /// Emit both and their difference (x = 0).
    Both,
}

#[derive(Args)]
struct DensityArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Horizon list, e.g. `0.5,1,2`.
    #[arg(long, value_delimiter = ',', required = true)]
    t: Vec<f64>,
    /// Starting point (comma-separated coordinates for d > 1).
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    x: String,
    /// Evaluation grid: `lo:hi:n` or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    y_grid: String,
    #[arg(long, value_enum, default_value_t = DensityMethod::Series)]
    method: DensityMethod,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RhoMethodArg {
    Mixture,
    Resolvent,
    Both,
}

#[derive(Args)]
struct StationaryArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, allow_hyphen_values = true)]
    y_grid: String,
    #[arg(long, value_enum, default_value_t = RhoMethodArg::Mixture)]
    method: RhoMethodArg,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeasureArg {
    /// Moments of μ_t / μ (use `--t inf` for the limit).
    Mu,
    /// Absolute moments of the stationary density ρ.
    Rho,
}

#[derive(Args)]
struct MomentsArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Moment orders γ.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    gamma: Vec<f64>,
    /// Horizons; `inf` selects the limit measure.
    #[arg(long, value_delimiter = ',', default_value = "inf")]
    t: Vec<String>,
    #[arg(long, value_enum, default_value_t = MeasureArg::Mu)]
    measure: MeasureArg,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args)]
struct AsymptoticsArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    t: Vec<f64>,
    #[arg(long, allow_hyphen_values = true)]
    y_grid: String,
    /// Regime band half-width δ.
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Also evaluate the exact density for comparison (slower).
    #[arg(long)]
    exact: bool,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    t: f64,
    #[arg(long, default_value_t = 100_000)]
    paths: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Histogram spec `lo:hi:bins`.
    #[arg(long, allow_hyphen_values = true)]
    hist: Option<String>,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args)]
struct ValidateArgs {
    /// Subset of criteria ids (default: all).
    #[arg(long, value_delimiter = ',')]
    criteria: Vec<usize>,
    /// Write the JSON report here (pass/fail lines always go to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, Error> {
    if let Some((range, n)) = spec.rsplit_once(':') {
        if let Some((lo, hi)) = range.split_once(':') {
            let lo: f64 = lo.parse().map_err(|_| Error::config("bad grid lower bound"))?;
            let hi: f64 = hi.parse().map_err(|_| Error::config("bad grid upper bound"))?;
            let n: usize = n.parse().map_err(|_| Error::config("bad grid count"))?;
            if n < 2 {
                return Err(Error::config("grid needs at least 2 points"));
            }
            return Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect());
        }
    }
    let vals: Result<Vec<f64>, _> = spec.split(',').map(str::parse::<f64>).collect();
    let vals = vals.map_err(|_| Error::config("grid must be lo:hi:n or a comma list"))?;
    if vals.is_empty() {
        return Err(Error::config("grid must be non-empty"));
    }
    Ok(vals)
}

fn parse_point(spec: &str, dim: usize) -> Result<Vec<f64>, Error> {
    let vals: Result<Vec<f64>, _> = spec.split(',').map(str::parse::<f64>).collect();
    let vals = vals.map_err(|_| Error::config("point must be a comma list of numbers"))?;
    if vals.len() != dim {
        return Err(Error::config(format!("point must have {dim} coordinates")));
    }
    Ok(vals)
}

fn meta_common(table: &mut Table, params: &ResetParams, kernel: &str) {
    table.meta("kernel", kernel);
    table.meta("alpha", fmt(params.alpha));
    table.meta("c", fmt(params.c));
    table.meta("m", fmt(params.m));
    table.meta("d", params.dim.to_string());
}

pub fn execute(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Density(args) => density(args),
        Command::Stationary(args) => stationary(args),
        Command::Moments(args) => moments(args),
        Command::Asymptotics(args) => asymptotics_cmd(args),
        Command::Simulate(args) => simulate(args),
        Command::Validate(args) => validate(args),
    }
}

fn density(args: DensityArgs) -> Result<i32, Error> {
    let mut t_list = args.t.clone();
    t_list.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if t_list.iter().any(|&t| t <= 0.0) {
        return Err(Error::config("horizons must be positive"));
    }
    let t_max = *t_list.last().unwrap();
    let model = args.model.model(t_max)?;
    let dim = model.kernel().dim();
    let x = parse_point(&args.x, dim)?;
    let y_grid = parse_grid(&args.y_grid)?;
    let x_is_origin = x.iter().all(|&v| v == 0.0);
    if matches!(args.method, DensityMethod::Mixture | DensityMethod::Both) && !x_is_origin {
        return Err(Error::config("the mixture route needs x = 0"));
    }
    let columns = match args.method {
        DensityMethod::Both => vec!["t", "x", "y", "p_series", "p_mixture", "err_est"],
        _ => vec!["t", "x", "y", "p", "method", "err_est"],
    };
    let mut table = Table::new(columns);
    meta_common(&mut table, model.params(), &format!("{:?}", model.kernel()));
    table.meta("x", args.x.clone());
    for &t in &t_list {
        for &y in &y_grid {
            let point = point_for(&y, dim);
            match args.method {
                DensityMethod::Series => {
                    let p = model.p_reset(t, &x, &point)?;
                    table.push(vec![fmt(t), args.x.clone(), fmt(y), fmt(p), "series".into(), String::new()]);
                }
                DensityMethod::Mixture => {
                    let (p, err) = model.p_reset_origin_detailed(t, &point)?;
                    table.push(vec![fmt(t), args.x.clone(), fmt(y), fmt(p), "mixture".into(), fmt(err)]);
                }
                DensityMethod::Both => {
                    let series = model.p_reset(t, &x, &point)?;
                    let (mixture, err) = model.p_reset_origin_detailed(t, &point)?;
                    table.push(vec![fmt(t), args.x.clone(), fmt(y), fmt(series), fmt(mixture), fmt(err)]);
                }
            }
        }
    }
    args.out.finish(table, 3, 4, "reset transition density")
}

fn point_for(y: &f64, dim: usize) -> Vec<f64> {
    // Grids are one-dimensional: higher-dimensional kernels are evaluated
    // along the first axis.
    let mut p = vec![0.0; dim];
    p[0] = *y;
    p
}

fn stationary(args: StationaryArgs) -> Result<i32, Error> {
    let model = args.model.model(1.0)?;
    let dim = model.kernel().dim();
    let y_grid = parse_grid(&args.y_grid)?;
    let columns = match args.method {
        RhoMethodArg::Both => vec!["y", "rho_mixture", "rho_resolvent", "abs_diff"],
        _ => vec!["y", "rho", "method"],
    };
    let mut table = Table::new(columns);
    meta_common(&mut table, model.params(), &format!("{:?}", model.kernel()));
    for &y in &y_grid {
        let point = point_for(&y, dim);
        match args.method {
            RhoMethodArg::Mixture => {
                let v = model.rho(&point, RhoMethod::Mixture)?;
                table.push(vec![fmt(y), fmt(v), "mixture".into()]);
            }
            RhoMethodArg::Resolvent => {
                let eval = model.rho_detailed(&point, RhoMethod::ResolventSeries)?;
                let label = if eval.fell_back { "mixture_fallback" } else { "resolvent" };
                table.push(vec![fmt(y), fmt(eval.value), label.into()]);
            }
            RhoMethodArg::Both => {
                let a = model.rho(&point, RhoMethod::Mixture)?;
                let b = model.rho(&point, RhoMethod::ResolventSeries)?;
                table.push(vec![fmt(y), fmt(a), fmt(b), fmt((a - b).abs())]);
            }
        }
    }
    args.out.finish(table, 1, 2, "stationary density")
}

fn moments(args: MomentsArgs) -> Result<i32, Error> {
    let horizons: Vec<Option<f64>> = args
        .t
        .iter()
        .map(|s| {
            if s == "inf" {
                Ok(None)
            } else {
                s.parse::<f64>().map(Some).map_err(|_| Error::config("bad --t entry"))
            }
        })
        .collect::<Result<_, Error>>()?;
    let mut table = Table::new(vec!["gamma", "t", "value", "method"]);
    match args.measure {
        MeasureArg::Mu => {
            let kernel = args.model.kernel()?;
            let params = args.model.params(kernel.alpha(), kernel.dim())?;
            meta_common(&mut table, &params, &format!("{:?}", kernel));
            for &g in &args.gamma {
                for h in &horizons {
                    match h {
                        None => {
                            let v = mu_limit_moment(g, params.m)?;
                            table.push(vec![fmt(g), "inf".into(), fmt(v), "limit".into()]);
                        }
                        Some(t) => {
                            let v = mu_t_moment(g, *t, params.m)?;
                            table.push(vec![fmt(g), fmt(*t), fmt(v), "series".into()]);
                        }
                    }
                }
            }
        }
        MeasureArg::Rho => {
            let model = args.model.model(1.0)?;
            meta_common(&mut table, model.params(), &format!("{:?}", model.kernel()));
            for &g in &args.gamma {
                let v = model.rho_moment(g)?;
                table.push(vec![fmt(g), "inf".into(), fmt(v), "rho_closed_form".into()]);
            }
        }
    }
    args.out.finish(table, 1, 3, "moments")
}

fn asymptotics_cmd(args: AsymptoticsArgs) -> Result<i32, Error> {
    let kernel = args.model.kernel()?;
    if !matches!(kernel, KernelModel::Brownian { .. }) {
        return Err(Error::config("asymptotic tables cover the Brownian kernel"));
    }
    let d = kernel.dim();
    let t_max = args.t.iter().cloned().fold(0.0f64, f64::max);
    let params = args.model.params(2.0, d)?;
    let y_grid = parse_grid(&args.y_grid)?;
    let model = if args.exact { Some(args.model.model(t_max)?) } else { None };
    let mut table =
        Table::new(vec!["t", "y", "q", "regime", "approx", "err_est", "exact_reference"]);
    meta_common(&mut table, &params, &format!("{kernel:?}"));
    table.meta("delta", fmt(args.delta));
    for &t in &args.t {
        for &y in &y_grid {
            let point = point_for(&y, d);
            let report = asymptotics::classify_regime(params.m, t, &point, args.delta)?;
            let (regime, approx, err) = match report.regime {
                asymptotics::Regime::Bulk => {
                    let (v, e) = asymptotics::brownian_bulk_approx(
                        params.m,
                        t,
                        &point,
                        d,
                        args.delta,
                        asymptotics::BulkMethod::SteepestDescent,
                    )?;
                    ("bulk", Some(v), Some(e))
                }
                asymptotics::Regime::Tail => {
                    let (v, e) =
                        asymptotics::brownian_tail_approx(params.m, t, &point, d, args.delta)?;
                    ("tail", Some(v), Some(e))
                }
                asymptotics::Regime::Uncovered => ("uncovered", None, None),
            };
            let exact = match &model {
                Some(m) => Some(m.p_reset_origin(t, &point)?),
                None => None,
            };
            table.push(vec![
                fmt(t),
                fmt(y),
                fmt(report.q),
                regime.into(),
                approx.map(fmt).unwrap_or_default(),
                err.map(fmt).unwrap_or_default(),
                exact.map(fmt).unwrap_or_default(),
            ]);
        }
    }
    args.out.finish(table, 2, 5, "asymptotic approximations")
}

fn simulate(args: SimulateArgs) -> Result<i32, Error> {
    let (kernel, alpha) = match args.model.kernel {
        KernelArg::Drift => (SimKernel::Drift, 1.0),
        KernelArg::Brownian => (SimKernel::Gaussian, 2.0),
        KernelArg::Stable => {
            let a = args.model.alpha.ok_or_else(|| Error::config("--alpha required"))?;
            (SimKernel::SymmetricStable { alpha: a }, a)
        }
        KernelArg::Subordinator => {
            let a = args.model.alpha.ok_or_else(|| Error::config("--alpha required"))?;
            (SimKernel::Subordinator { alpha: a }, a)
        }
        _ => return Err(Error::config("simulation kernels: brownian, stable, subordinator, drift")),
    };
    if args.model.d != 1 {
        return Err(Error::config("simulation is one-dimensional"));
    }
    let params = args.model.params(alpha, 1)?;
    let histogram = match &args.hist {
        None => None,
        Some(spec) => {
            let parts: Vec<&str> = spec.split(':').collect();
            if parts.len() != 3 {
                return Err(Error::config("--hist must be lo:hi:bins"));
            }
            let lo: f64 = parts[0].parse().map_err(|_| Error::config("bad hist lo"))?;
            let hi: f64 = parts[1].parse().map_err(|_| Error::config("bad hist hi"))?;
            let bins: usize = parts[2].parse().map_err(|_| Error::config("bad hist bins"))?;
            Some(HistogramSpec { lo, hi, bins })
        }
    };
    let config = SimConfig { params, kernel, t: args.t, paths: args.paths, seed: args.seed, histogram };
    let stats = simulate_endpoint(&config)?;
    let mut report = serde_json::json!({
        "version": crate::output::VERSION,
        "config": config,
        "stats": stats,
    });
    // The histogram goes to its own CSV next to the JSON when --out is set.
    if let Some(out) = &args.out.out {
        if let Some(csv) = stats.histogram_csv() {
            let path = out.with_extension("hist.csv");
            let mut content = format!("# levy-reset {}\n# seed: {}\n", crate::output::VERSION, args.seed);
            content.push_str(&csv);
            std::fs::write(&path, content)?;
            report["histogram_csv"] = serde_json::json!(path.to_string_lossy());
        }
    }
    emit(args.out.out.as_deref(), &serde_json::to_string_pretty(&report).expect("stats json"))?;
    Ok(0)
}

fn validate(args: ValidateArgs) -> Result<i32, Error> {
    let ids: Vec<usize> = if args.criteria.is_empty() {
        (1..=12).collect()
    } else {
        args.criteria.clone()
    };
    let mut results = Vec::new();
    for id in ids {
        let r = validation::run_one(id)?;
        println!("{}", r.line());
        results.push(r);
    }
    let all_passed = results.iter().all(|r| r.passed);
    let report = serde_json::json!({
        "version": crate::output::VERSION,
        "passed": all_passed,
        "results": results,
    });
    if let Some(out) = &args.out {
        std::fs::write(out, serde_json::to_string_pretty(&report).expect("report json"))?;
    }
    println!(
        "validation: {}/{} criteria passed",
        results.iter().filter(|r| r.passed).count(),
        results.len()
    );
    Ok(if all_passed { 0 } else { 4 })
}
