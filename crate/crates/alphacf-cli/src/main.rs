//! Command-line front end: every computation in the library as a
//! subcommand with CSV/JSON output, a fixed default seed, and
//! schedule-independent results under any `--threads` setting.

use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use alphacf::density::{
    closed_form_density, series_density_one_over_r, ulam_density, Density,
};
use alphacf::entropy::{ensemble_entropy, entropy_scan, exact_entropy, stddev_scan, ScanRow};
use alphacf::maps::AlphaContext;
use alphacf::natext::{
    build_exclusion_sets, check_forward_invariance, check_injectivity, check_invariance,
    complementarity_check, sample_invariant, MidRangeDomain, NatExtDomain,
};
use alphacf::symbolic::{eval_by_excess, reflect, ByExcessSeq};

/// Default seed for every randomised computation; fixed so published
/// outputs regenerate exactly.
const DEFAULT_SEED: u64 = 0xA1FA;

#[derive(Parser)]
#[command(
    name = "alphacf",
    about = "Continued-fraction interval maps: densities, entropy, natural extensions",
    version
)]
struct Cli {
    /// Cap the rayon thread pool (0 = default). Outputs are identical
    /// at every setting.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Output format for tabular data
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Ensemble Birkhoff entropy estimate at one parameter value
    EntropyPoint {
        #[arg(long)]
        alpha: f64,
        /// Iterates per orbit
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        /// Number of orbits
        #[arg(long, default_value_t = 10_000)]
        ensemble: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Entropy estimates on a uniform grid of parameter values
    EntropyScan {
        #[arg(long)]
        alpha_min: f64,
        #[arg(long)]
        alpha_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        ensemble: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Per-orbit standard deviation against orbit length, with the
    /// fitted log-log slope (expect about -1/2)
    StddevScan {
        #[arg(long)]
        alpha: f64,
        /// Comma-separated ascending orbit lengths
        #[arg(long, value_delimiter = ',', default_value = "500,2000,8000,32000")]
        n_values: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        ensemble: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Invariant density on a grid (x,rho CSV plus a JSON sidecar)
    Density {
        #[arg(long)]
        alpha: Option<f64>,
        /// Unit-fraction parameter 1/r for the series method
        #[arg(long)]
        r: Option<u32>,
        #[arg(long, value_enum)]
        method: DensityMethod,
        #[arg(long, default_value_t = 4096)]
        bins: usize,
        #[arg(long, default_value_t = 10)]
        depth: u32,
        #[arg(long, default_value_t = 10_000)]
        iters: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Grid resolution of the CSV output
        #[arg(long, default_value_t = 1024)]
        grid: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Natural-extension domain: point cloud, summary, checks
    Natext {
        /// Unit-fraction parameter 1/r (r >= 3)
        #[arg(long)]
        r: Option<u32>,
        /// Mid-range parameter for --prop1
        #[arg(long)]
        alpha: Option<f64>,
        /// Use the explicit three-block domain for sqrt(2)-1 <= alpha <= 1/2
        #[arg(long, default_value_t = false)]
        prop1: bool,
        #[arg(long, default_value_t = 12)]
        depth: u32,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = alphacf::natext::DEFAULT_PRUNE)]
        prune: f64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Which check to run
        #[arg(long, value_enum, default_value_t = CheckKind::All)]
        check: CheckKind,
        /// Histogram resolution for the invariance check
        #[arg(long, default_value_t = 32)]
        hist_bins: usize,
        /// Output file prefix (PREFIX_points.csv, PREFIX_summary.json,
        /// PREFIX_checks.json); stdout JSON when omitted
        #[arg(long)]
        out: Option<String>,
    },
    /// Reflect a by-excess sequence: the expansion of 1 - x from x
    Reflect {
        /// Sequence literal like "<2^1,3;y=2.5>"
        sequence: String,
    },
    /// Forward orbit with digits
    Orbit {
        #[arg(long)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DensityMethod {
    Ulam,
    Closed,
    Series,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    All,
    Membership,
    Invariance,
    Injectivity,
    Complementarity,
}

/// 17-significant-digit formatting: round-trips f64 exactly.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_output(path: &Option<std::path::PathBuf>, content: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, content),
        None => std::io::stdout().write_all(content.as_bytes()),
    }
}

fn config_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn scan_rows_csv(rows: &[ScanRow]) -> String {
    let mut s = String::from("alpha,n,N,mean,stddev,stderr,exact,seed,discarded\n");
    for r in rows {
        let exact = r.exact.map(fmt).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            fmt(r.alpha),
            r.n,
            r.ensemble,
            fmt(r.mean),
            fmt(r.stddev),
            fmt(r.stderr),
            exact,
            r.seed,
            r.discarded
        );
    }
    s
}

fn run() -> Result<ExitCode, String> {
    let cli = Cli::parse();
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    match cli.command {
        Command::EntropyPoint { alpha, n, ensemble, seed, output } => {
            let ctx = AlphaContext::new(alpha).map_err(|e| e.to_string())?;
            let est = ensemble_entropy(&ctx, n, ensemble, seed).map_err(|e| e.to_string())?;
            let row = ScanRow {
                alpha,
                n,
                ensemble,
                mean: est.mean,
                stddev: est.stddev,
                stderr: est.stderr,
                exact: exact_entropy(alpha),
                seed,
                discarded: est.discarded,
            };
            let content = match output.format {
                Format::Csv => scan_rows_csv(&[row]),
                Format::Json => serde_json::to_string_pretty(&[row]).unwrap() + "\n",
            };
            write_output(&output.out, &content).map_err(|e| e.to_string())?;
        }
        Command::EntropyScan { alpha_min, alpha_max, steps, n, ensemble, seed, output } => {
            if !(0.0 < alpha_min && alpha_min <= alpha_max && alpha_max <= 1.0) {
                return Err("need 0 < alpha-min <= alpha-max <= 1".into());
            }
            let t0 = std::time::Instant::now();
            let rows =
                entropy_scan(alpha_min, alpha_max, steps, n, ensemble, seed)
                    .map_err(|e| e.to_string())?;
            let dt = t0.elapsed().as_secs_f64();
            eprintln!("{} rows in {:.1}s ({:.2} rows/s)", rows.len(), dt, rows.len() as f64 / dt);
            let content = match output.format {
                Format::Csv => scan_rows_csv(&rows),
                Format::Json => serde_json::to_string_pretty(&rows).unwrap() + "\n",
            };
            write_output(&output.out, &content).map_err(|e| e.to_string())?;
        }
        Command::StddevScan { alpha, n_values, ensemble, seed, output } => {
            if n_values.len() < 3 || n_values.windows(2).any(|w| w[0] >= w[1]) {
                return Err("need at least three ascending --n-values".into());
            }
            let ctx = AlphaContext::new(alpha).map_err(|e| e.to_string())?;
            let scan =
                stddev_scan(&ctx, &n_values, ensemble, seed).map_err(|e| e.to_string())?;
            eprintln!("fitted log-log slope: {}", fmt(scan.slope));
            let content = match output.format {
                Format::Csv => {
                    let mut s = String::from("n,stddev\n");
                    for (n, sd) in &scan.rows {
                        let _ = writeln!(s, "{},{}", n, fmt(*sd));
                    }
                    s
                }
                Format::Json => {
                    let obj = serde_json::json!({
                        "alpha": alpha,
                        "rows": scan.rows.iter()
                            .map(|(n, sd)| serde_json::json!({"n": n, "stddev": sd}))
                            .collect::<Vec<_>>(),
                        "slope": scan.slope,
                    });
                    serde_json::to_string_pretty(&obj).unwrap() + "\n"
                }
            };
            write_output(&output.out, &content).map_err(|e| e.to_string())?;
        }
        Command::Density { alpha, r, method, bins, depth, iters, tol, grid, output } => {
            return run_density(alpha, r, method, bins, depth, iters, tol, grid, output);
        }
        Command::Natext {
            r,
            alpha,
            prop1,
            depth,
            samples,
            prune,
            seed,
            check,
            hist_bins,
            out,
        } => {
            return run_natext(
                r, alpha, prop1, depth, samples, prune, seed, check, hist_bins, out,
            );
        }
        Command::Reflect { sequence } => {
            let seq: ByExcessSeq = sequence.parse().map_err(|e| format!("{e}"))?;
            let value = eval_by_excess(&seq).map_err(|e| e.to_string())?;
            let refl = reflect(&seq).map_err(|e| e.to_string())?;
            let rvalue = eval_by_excess(&refl).map_err(|e| e.to_string())?;
            println!("input:     {seq} = {}", fmt(value));
            println!("reflected: {refl} = {}", fmt(rvalue));
        }
        Command::Orbit { alpha, x0, n, output } => {
            let ctx = AlphaContext::new(alpha).map_err(|e| e.to_string())?;
            let rec = ctx.orbit(x0, n).map_err(|e| e.to_string())?;
            if rec.escaped_zero {
                eprintln!(
                    "orbit landed exactly on 0 after {} steps; truncated",
                    rec.digits.len()
                );
            }
            let content = match output.format {
                Format::Csv => {
                    let mut s = String::from("i,x,j,sign,x_next\n");
                    for (i, d) in rec.digits.iter().enumerate() {
                        let _ = writeln!(
                            s,
                            "{},{},{},{},{}",
                            i,
                            fmt(rec.points[i]),
                            d.j,
                            d.sign.as_char(),
                            fmt(rec.points[i + 1])
                        );
                    }
                    s
                }
                Format::Json => {
                    let rows: Vec<_> = rec
                        .digits
                        .iter()
                        .enumerate()
                        .map(|(i, d)| {
                            serde_json::json!({
                                "i": i,
                                "x": rec.points[i],
                                "j": d.j,
                                "sign": d.sign.as_char().to_string(),
                                "x_next": rec.points[i + 1],
                            })
                        })
                        .collect();
                    serde_json::to_string_pretty(&rows).unwrap() + "\n"
                }
            };
            write_output(&output.out, &content).map_err(|e| e.to_string())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn run_density(
    alpha: Option<f64>,
    r: Option<u32>,
    method: DensityMethod,
    bins: usize,
    depth: u32,
    iters: usize,
    tol: f64,
    grid: usize,
    output: OutputArgs,
) -> Result<ExitCode, String> {
    let alpha = match (alpha, r) {
        (Some(a), None) => a,
        (None, Some(r)) => {
            if r < 1 {
                return Err("--r must be at least 1".into());
            }
            1.0 / r as f64
        }
        _ => return Err("give exactly one of --alpha or --r".into()),
    };
    enum Built {
        Pc(alphacf::density::PiecewiseConstantDensity, serde_json::Value),
        Frac(alphacf::density::PiecewiseFractionalDensity, &'static str),
    }
    let built = match method {
        DensityMethod::Ulam => {
            let ctx = AlphaContext::new(alpha).map_err(|e| e.to_string())?;
            let res = ulam_density(&ctx, bins, iters, tol).map_err(|e| e.to_string())?;
            if !res.converged {
                eprintln!(
                    "warning: iteration stopped at residual {} after {} steps",
                    fmt(res.residual),
                    res.iterations
                );
            }
            let meta = serde_json::json!({
                "bins": bins,
                "iterations": res.iterations,
                "residual": res.residual,
                "converged": res.converged,
            });
            Built::Pc(res.density, meta)
        }
        DensityMethod::Closed => {
            let d = closed_form_density(alpha).map_err(|e| e.to_string())?;
            Built::Frac(d, "closed")
        }
        DensityMethod::Series => {
            let Some(r) = r else {
                return Err("--method series needs --r".into());
            };
            if r < 3 {
                return Err("--method series needs r >= 3".into());
            }
            Built::Frac(series_density_one_over_r(r, depth), "series")
        }
    };
    let (support, eval): ((f64, f64), Box<dyn Fn(f64) -> f64>) = match &built {
        Built::Pc(d, _) => (d.support(), Box::new(move |x| d.eval(x))),
        Built::Frac(d, _) => (d.support(), Box::new(move |x| d.eval(x))),
    };
    let mut csv = String::from("x,rho\n");
    let (lo, hi) = support;
    for k in 0..grid {
        let x = lo + (hi - lo) * (k as f64 + 0.5) / grid as f64;
        let _ = writeln!(csv, "{},{}", fmt(x), fmt(eval(x)));
    }
    let integral = match &built {
        Built::Pc(d, _) => d.weights.iter().sum::<f64>() * d.bin_width(),
        Built::Frac(d, _) => d.raw_mass() / d.norm_constant,
    };
    let sidecar = match &built {
        Built::Pc(_, meta) => serde_json::json!({
            "alpha": alpha,
            "method": "ulam",
            "integral": integral,
            "ulam": meta,
        }),
        Built::Frac(d, name) => serde_json::json!({
            "alpha": alpha,
            "method": name,
            "integral": integral,
            "norm_constant": d.norm_constant,
            "segments": d.segments,
        }),
    };
    match &output.out {
        Some(path) => {
            std::fs::write(path, &csv).map_err(|e| e.to_string())?;
            let sidecar_path = path.with_extension("json");
            std::fs::write(
                &sidecar_path,
                serde_json::to_string_pretty(&sidecar).unwrap() + "\n",
            )
            .map_err(|e| e.to_string())?;
            eprintln!("wrote {} and {}", path.display(), sidecar_path.display());
        }
        None => match output.format {
            Format::Csv => print!("{csv}"),
            Format::Json => {
                println!("{}", serde_json::to_string_pretty(&sidecar).unwrap())
            }
        },
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn run_natext(
    r: Option<u32>,
    alpha: Option<f64>,
    prop1: bool,
    depth: u32,
    samples: usize,
    prune: f64,
    seed: u64,
    check: CheckKind,
    hist_bins: usize,
    out: Option<String>,
) -> Result<ExitCode, String> {
    if prop1 {
        let Some(alpha) = alpha else {
            return Err("--prop1 needs --alpha".into());
        };
        let domain = MidRangeDomain::build(alpha).map_err(|e| e.to_string())?;
        let ctx = AlphaContext::new(alpha).map_err(|e| e.to_string())?;
        let membership =
            domain.check_membership(&ctx, samples, seed).map_err(|e| e.to_string())?;
        let invariance =
            domain.check_invariance(&ctx, samples, hist_bins, seed).map_err(|e| e.to_string())?;
        let pass = membership == 0 && invariance.ok;
        let report = serde_json::json!({
            "alpha": alpha,
            "c_alpha": domain.c_alpha,
            "blocks": domain.blocks.iter().map(|b| serde_json::json!({
                "x_lo": b.x_lo, "x_hi": b.x_hi, "y_top": b.y_top, "kept": b.kept,
            })).collect::<Vec<_>>(),
            "checks": {
                "membership_failures": membership,
                "invariance": invariance,
                "pass": pass,
            }
        });
        emit_natext(&out, None, &report, samples, seed, |count, s, off| {
            Ok(domain.sample(count, s, off))
        })?;
        return Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(3) });
    }

    let Some(r) = r else {
        return Err("give --r (or --alpha with --prop1)".into());
    };
    if r < 3 {
        return Err("--r must be at least 3".into());
    }
    let alpha = 1.0 / r as f64;
    let ctx = AlphaContext::new(alpha).map_err(|e| e.to_string())?;
    let t0 = std::time::Instant::now();
    let sets = build_exclusion_sets(r, depth, prune);
    let domain = NatExtDomain::from_sets(&sets, alphacf::natext::DEFAULT_MERGE_TOL);
    eprintln!(
        "built exclusion sets and domain for r={r} depth={depth} in {:.1}s \
         (dropped width {:.3e} across {} images; {} subtrees pruned)",
        t0.elapsed().as_secs_f64(),
        sets.dropped_measure,
        sets.dropped_count,
        sets.pruned_subtrees,
    );

    let mut checks = serde_json::Map::new();
    let mut pass = true;
    let want = |k: CheckKind| check == CheckKind::All || check == k;
    if want(CheckKind::Membership) {
        let failures =
            check_forward_invariance(&domain, &ctx, samples, seed).map_err(|e| e.to_string())?;
        pass &= failures == 0;
        checks.insert("membership_failures".into(), failures.into());
    }
    if want(CheckKind::Invariance) {
        let rep = check_invariance(&domain, &ctx, samples, hist_bins, seed)
            .map_err(|e| e.to_string())?;
        pass &= rep.ok;
        checks.insert("invariance".into(), serde_json::to_value(rep).unwrap());
    }
    if want(CheckKind::Injectivity) {
        let collisions =
            check_injectivity(&domain, &ctx, samples, seed).map_err(|e| e.to_string())?;
        pass &= collisions == 0;
        checks.insert("injectivity_collisions".into(), collisions.into());
    }
    if want(CheckKind::Complementarity) {
        let rep = complementarity_check(&sets);
        let ok = rep.overlap_measure < 1e-6 && rep.covered_measure >= 0.95 * rep.target;
        pass &= ok;
        let mut v = serde_json::to_value(rep).unwrap();
        v["ok"] = ok.into();
        checks.insert("complementarity".into(), v);
    }
    checks.insert("pass".into(), pass.into());

    let masses = domain.strip_masses();
    let summary = serde_json::json!({
        "r": r,
        "alpha": alpha,
        "depth": depth,
        "prune": prune,
        "beta": domain.beta,
        "xi": domain.xi,
        "c_alpha": domain.c_alpha,
        "dropped_measure": domain.dropped_measure,
        "strips": domain.strips.iter().zip(&masses).map(|(s, m)| serde_json::json!({
            "x_lo": s.x_lo,
            "x_hi": s.x_hi,
            "y_top": s.y_top,
            "kept_intervals": s.kept.len(),
            "kept_measure": s.y_top - s.excluded_measure,
            "excluded_measure": s.excluded_measure,
            "mass": m,
        })).collect::<Vec<_>>(),
        "checks": serde_json::Value::Object(checks),
    });
    emit_natext(&out, Some(&sets), &summary, samples, seed, |count, s, off| {
        sample_invariant(&domain, count, s, off).map_err(|e| e.to_string())
    })?;
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

/// Write the natext outputs: point cloud CSV, summary JSON, checks
/// JSON (checks ride inside the summary object; a separate file keeps
/// plotting pipelines simple).
fn emit_natext<F>(
    out: &Option<String>,
    sets: Option<&alphacf::natext::ExclusionSets>,
    summary: &serde_json::Value,
    samples: usize,
    seed: u64,
    sample: F,
) -> Result<(), String>
where
    F: Fn(usize, u64, u64) -> Result<Vec<(f64, f64)>, String>,
{
    match out {
        None => {
            println!("{}", serde_json::to_string_pretty(summary).unwrap());
        }
        Some(prefix) => {
            let pts = sample(samples, seed, 0)?;
            let mut csv = String::from("x,y\n");
            for (x, y) in &pts {
                let _ = writeln!(csv, "{},{}", fmt(*x), fmt(*y));
            }
            std::fs::write(format!("{prefix}_points.csv"), csv).map_err(|e| e.to_string())?;
            std::fs::write(
                format!("{prefix}_summary.json"),
                serde_json::to_string_pretty(summary).unwrap() + "\n",
            )
            .map_err(|e| e.to_string())?;
            std::fs::write(
                format!("{prefix}_checks.json"),
                serde_json::to_string_pretty(&summary["checks"]).unwrap() + "\n",
            )
            .map_err(|e| e.to_string())?;
            if let Some(sets) = sets {
                let excl = serde_json::json!({
                    "plus": sets.plus.intervals(),
                    "minus": sets.minus.intervals(),
                    "inner": sets.inner.iter().map(|s| s.intervals()).collect::<Vec<_>>(),
                });
                std::fs::write(
                    format!("{prefix}_exclusions.json"),
                    serde_json::to_string(&excl).unwrap() + "\n",
                )
                .map_err(|e| e.to_string())?;
            }
            eprintln!("wrote {prefix}_points.csv, {prefix}_summary.json, {prefix}_checks.json");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(msg) => config_error(&msg),
    }
}
