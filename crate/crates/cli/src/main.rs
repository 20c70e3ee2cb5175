//! `bergman`: reproducible kernel experiments from the command line.
//!
//! Results go to standard output (or `--out`); errors go to standard error as
//! one JSON object `{code, message, context}`. Exit status: 0 success,
//! 2 invalid input, 3 accuracy target not met, 1 anything else.

use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use bergman::equivalent_weights::convergence_report;
use bergman::kernel::{reproduce_check, KernelEvaluator, KernelPath};
use bergman::mittag_leffler::{ml_eval, MLFunctionParams};
use bergman::moments::moment_table;
use bergman::report::{format_f64, to_csv, to_json};
use bergman::weights::RadialWeightSpec;
use bergman::zeros::{kernel_zeros, zero_growth_scan};
use bergman::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "bergman", version, about = "Weighted Bergman kernels of radial weights")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Absolute tolerance for kernel values, zeros and quadrature
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,

    /// Write the result here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format (each subcommand has its own default)
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads; 0 picks one per core
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Report progress of long sweeps on standard error
    #[arg(long, global = true)]
    progress: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PathArg {
    Series,
    Closed,
    DiskLimit,
}

impl From<PathArg> for KernelPath {
    fn from(p: PathArg) -> Self {
        match p {
            PathArg::Series => KernelPath::Series,
            PathArg::Closed => KernelPath::Closed,
            PathArg::DiskLimit => KernelPath::DiskLimit,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Moment table W_0..W_K of a weight (default CSV)
    #[command(allow_negative_numbers = true)]
    Moments {
        /// Weight as JSON, e.g. '{"family":"truncated_disk","q":100}'
        #[arg(long)]
        weight: String,
        /// Highest moment index
        #[arg(long)]
        k_max: usize,
    },
    /// Two-parameter Mittag-Leffler function E_{beta,gamma}(z)
    #[command(allow_negative_numbers = true)]
    MlEval {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        gamma: f64,
        /// Complex point as `re,im`
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Complex64,
    },
    /// Kernel value K(z, w)
    #[command(allow_negative_numbers = true)]
    KernelEval {
        /// Weight as JSON, e.g. '{"family":"truncated_disk","q":100}'
        #[arg(long)]
        weight: String,
        /// Complex point as `re,im`
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Complex64,
        /// Second kernel variable as `re,im`
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        w: Complex64,
        /// Evaluation route; defaults to the closed form where one exists
        #[arg(long, value_enum)]
        path: Option<PathArg>,
    },
    /// K(z, w) over all pairs of a polar grid, `polar:R:N` (default CSV)
    #[command(allow_negative_numbers = true)]
    KernelGrid {
        /// Weight as JSON, e.g. '{"family":"truncated_disk","q":100}'
        #[arg(long)]
        weight: String,
        /// Polar grid `polar:R:N`
        #[arg(long, value_parser = parse_grid)]
        grid: Grid,
        /// Evaluation route; defaults to the closed form where one exists
        #[arg(long, value_enum)]
        path: Option<PathArg>,
    },
    /// Zeros of z ↦ K(z, w) in |z| < radius, or counts along --scan radii
    #[command(allow_negative_numbers = true)]
    Zeros {
        /// Weight as JSON, e.g. '{"family":"truncated_disk","q":100}'
        #[arg(long)]
        weight: String,
        /// Second kernel variable as `re,im`
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        w: Complex64,
        /// Search radius in the z-plane
        #[arg(long)]
        radius: f64,
        /// Comma-separated increasing radii for a zero-count scan
        #[arg(long, value_delimiter = ',')]
        scan: Option<Vec<f64>>,
        /// Evaluation route; defaults to the closed form where one exists
        #[arg(long, value_enum)]
        path: Option<PathArg>,
    },
    /// Convergence of the truncated disk kernels to the limit kernel
    #[command(allow_negative_numbers = true)]
    Ramadanov {
        /// Comma-separated truncation parameters q
        #[arg(long, value_delimiter = ',', default_value = "10,100,1000,10000")]
        q_ladder: Vec<f64>,
        /// Radius of the comparison grid
        #[arg(long, default_value_t = 0.5)]
        grid_radius: f64,
        /// Grid size: rings and angles per ring
        #[arg(long, default_value_t = 16)]
        grid_n: usize,
        /// Fixed second variable for the emergent-zero search
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0.5,0")]
        w: Complex64,
    },
    /// Reproducing-property residual for a polynomial, `--poly "re,im;re,im;…"`
    /// listing coefficients from the constant term up
    #[command(allow_negative_numbers = true)]
    ReproduceCheck {
        /// Weight as JSON, e.g. '{"family":"truncated_disk","q":100}'
        #[arg(long)]
        weight: String,
        /// Coefficients `re,im;re,im;…`, constant term first
        #[arg(long, value_parser = parse_poly, allow_hyphen_values = true)]
        poly: Poly,
        /// Complex point as `re,im`
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Complex64,
        /// Evaluation route; defaults to the closed form where one exists
        #[arg(long, value_enum)]
        path: Option<PathArg>,
    },
}

#[derive(Clone, Debug)]
struct Grid {
    radius: f64,
    n: usize,
}

#[derive(Clone, Debug)]
struct Poly(Vec<Complex64>);

fn parse_complex(text: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|e| format!("`{s}`: {e}"));
    let z = match parts.as_slice() {
        [re] => Complex64::new(num(re)?, 0.0),
        [re, im] => Complex64::new(num(re)?, num(im)?),
        _ => return Err(format!("expected RE,IM, got `{text}`")),
    };
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(format!("non-finite complex number `{text}`"));
    }
    Ok(z)
}

fn parse_grid(text: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        ["polar", r, n] => {
            let radius: f64 = r.parse().map_err(|e| format!("grid radius `{r}`: {e}"))?;
            let n: usize = n.parse().map_err(|e| format!("grid size `{n}`: {e}"))?;
            if !(radius > 0.0 && radius.is_finite()) || n == 0 {
                return Err(format!("grid needs a positive radius and size, got `{text}`"));
            }
            Ok(Grid { radius, n })
        }
        _ => Err(format!("expected polar:R:N, got `{text}`")),
    }
}

fn parse_poly(text: &str) -> Result<Poly, String> {
    let coeffs = text
        .split(';')
        .map(|c| parse_complex(c.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    if coeffs.is_empty() {
        return Err("polynomial has no coefficients".into());
    }
    Ok(Poly(coeffs))
}

fn weight(text: &str) -> Result<RadialWeightSpec, Error> {
    RadialWeightSpec::from_json(text)
}

fn evaluator(spec: &RadialWeightSpec, path: Option<PathArg>) -> Result<KernelEvaluator, Error> {
    KernelEvaluator::for_weight(spec, path.map(Into::into))
}

fn progress(on: bool, msg: &str) {
    if on {
        eprintln!("progress: {msg}");
    }
}

/// Radii `R·i/(N−1)` and angles `2πl/N`; a one-node grid is the origin.
fn polar_points(grid: &Grid) -> Vec<Complex64> {
    let radii: Vec<f64> = if grid.n == 1 {
        vec![0.0]
    } else {
        (0..grid.n)
            .map(|i| grid.radius * i as f64 / (grid.n - 1) as f64)
            .collect()
    };
    let mut pts = Vec::new();
    for &r in &radii {
        if r == 0.0 {
            pts.push(Complex64::new(0.0, 0.0));
            continue;
        }
        for l in 0..grid.n {
            pts.push(Complex64::from_polar(r, 2.0 * PI * l as f64 / grid.n as f64));
        }
    }
    pts
}

#[derive(Serialize)]
struct ZerosOutput<'a> {
    weight: &'a RadialWeightSpec,
    w: [f64; 2],
    #[serde(flatten)]
    report: &'a bergman::zeros::ZeroReport,
}

#[derive(Serialize)]
struct ScanOutput<'a> {
    weight: &'a RadialWeightSpec,
    w: [f64; 2],
    /// radii in the z-plane
    radii: &'a [f64],
    counts: Vec<Option<usize>>,
    scan: &'a bergman::zeros::GrowthScan,
}

fn run(cli: &Cli) -> Result<String, Error> {
    let g = &cli.global;
    if !(g.tol > 0.0 && g.tol.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "--tol must be positive, got {}",
            g.tol
        )));
    }
    let fmt = |default: Format| g.format.unwrap_or(default);
    match &cli.command {
        Command::Moments { weight: w, k_max } => {
            let table = moment_table(&weight(w)?, *k_max, g.tol)?;
            match fmt(Format::Csv) {
                Format::Csv => table.to_csv(),
                Format::Json => table.to_json(),
            }
        }
        Command::MlEval { beta, gamma, z } => {
            let e = ml_eval(MLFunctionParams::new(*beta, *gamma)?, *z, g.tol)?;
            match fmt(Format::Json) {
                Format::Json => to_json(&e),
                Format::Csv => to_csv(
                    &["re", "im", "terms", "tail_bound", "error_bound"],
                    [vec![
                        format_f64(e.value[0]),
                        format_f64(e.value[1]),
                        e.terms.to_string(),
                        format_f64(e.tail_bound),
                        format_f64(e.error_bound),
                    ]],
                ),
            }
        }
        Command::KernelEval {
            weight: w,
            z,
            w: wp,
            path,
        } => {
            let ev = evaluator(&weight(w)?, *path)?;
            let e = ev.eval(*z, *wp, g.tol)?;
            match fmt(Format::Json) {
                Format::Json => to_json(&e),
                Format::Csv => to_csv(
                    &["re_K", "im_K", "terms", "tail_bound", "error_bound"],
                    [vec![
                        format_f64(e.value[0]),
                        format_f64(e.value[1]),
                        e.terms.to_string(),
                        format_f64(e.tail_bound),
                        format_f64(e.error_bound),
                    ]],
                ),
            }
        }
        Command::KernelGrid { weight: w, grid, path } => {
            let ev = evaluator(&weight(w)?, *path)?;
            let pts = polar_points(grid);
            progress(g.progress, &format!("{} point pairs", pts.len() * pts.len()));
            let mut rows = Vec::with_capacity(pts.len() * pts.len());
            for &z in &pts {
                for &wv in &pts {
                    let k = ev.eval(z, wv, g.tol)?;
                    rows.push((z, wv, k));
                }
            }
            match fmt(Format::Csv) {
                Format::Csv => to_csv(
                    &["re_z", "im_z", "re_w", "im_w", "re_K", "im_K"],
                    rows.iter().map(|(z, wv, k)| {
                        [z.re, z.im, wv.re, wv.im, k.value[0], k.value[1]]
                            .into_iter()
                            .map(format_f64)
                            .collect()
                    }),
                ),
                Format::Json => {
                    #[derive(Serialize)]
                    struct Row {
                        z: [f64; 2],
                        w: [f64; 2],
                        value: [f64; 2],
                        error_bound: f64,
                    }
                    let rows: Vec<Row> = rows
                        .iter()
                        .map(|(z, wv, k)| Row {
                            z: [z.re, z.im],
                            w: [wv.re, wv.im],
                            value: k.value,
                            error_bound: k.error_bound,
                        })
                        .collect();
                    to_json(&rows)
                }
            }
        }
        Command::Zeros {
            weight: w,
            w: wp,
            radius,
            scan,
            path,
        } => {
            let spec = weight(w)?;
            let ev = evaluator(&spec, *path)?;
            if !(*radius > 0.0 && radius.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "--radius must be positive, got {radius}"
                )));
            }
            if wp.norm() == 0.0 {
                return Err(Error::InvalidParameter("K(·, 0) is constant; choose w ≠ 0".into()));
            }
            if let Some(radii) = scan {
                progress(g.progress, &format!("counting zeros on {} circles", radii.len()));
                // counts of z ↦ K(z, w) on |z| = R are profile counts on |s| = R|w|
                let profile_radii: Vec<f64> = radii.iter().map(|r| r * wp.norm()).collect();
                let s = zero_growth_scan(&ev, &profile_radii, g.tol)?;
                let out = ScanOutput {
                    weight: &spec,
                    w: [wp.re, wp.im],
                    radii,
                    counts: s.counts(),
                    scan: &s,
                };
                return match fmt(Format::Json) {
                    Format::Json => to_json(&out),
                    Format::Csv => to_csv(
                        &["radius", "count"],
                        radii
                            .iter()
                            .zip(s.counts())
                            .map(|(r, c)| vec![format_f64(*r), c.map_or(String::new(), |c| c.to_string())]),
                    ),
                };
            }
            let report = kernel_zeros(&ev, *wp, *radius, g.tol)?;
            match fmt(Format::Json) {
                Format::Json => to_json(&ZerosOutput {
                    weight: &spec,
                    w: [wp.re, wp.im],
                    report: &report,
                }),
                Format::Csv => report.to_csv(),
            }
        }
        Command::Ramadanov {
            q_ladder,
            grid_radius,
            grid_n,
            w,
        } => {
            progress(g.progress, &format!("{} truncation levels", q_ladder.len()));
            let r = convergence_report(q_ladder, *grid_radius, *grid_n, *w, g.tol)?;
            match fmt(Format::Json) {
                Format::Json => to_json(&r),
                Format::Csv => r.to_csv(),
            }
        }
        Command::ReproduceCheck {
            weight: w,
            poly,
            z,
            path,
        } => {
            let spec = weight(w)?;
            let ev = evaluator(&spec, *path)?;
            let r = reproduce_check(&ev, &spec, &poly.0, *z, g.tol)?;
            match fmt(Format::Json) {
                Format::Json => to_json(&r),
                Format::Csv => to_csv(
                    &["residual", "re_integral", "im_integral", "re_expected", "im_expected"],
                    [[r.residual, r.integral[0], r.integral[1], r.expected[0], r.expected[1]]
                        .into_iter()
                        .map(format_f64)
                        .collect()],
                ),
            }
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Moments { .. } => "moments",
        Command::MlEval { .. } => "ml-eval",
        Command::KernelEval { .. } => "kernel-eval",
        Command::KernelGrid { .. } => "kernel-grid",
        Command::Zeros { .. } => "zeros",
        Command::Ramadanov { .. } => "ramadanov",
        Command::ReproduceCheck { .. } => "reproduce-check",
    }
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    code: &'a str,
    message: String,
    context: serde_json::Value,
}

fn report_error(code: &str, message: String, context: serde_json::Value) {
    let report = ErrorReport { code, message, context };
    eprintln!("{}", serde_json::to_string(&report).expect("error reports serialize"));
}

fn emit(text: &str, out: Option<&PathBuf>) -> std::io::Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            report_error("usage", e.to_string().trim_end().to_string(), serde_json::Value::Null);
            return ExitCode::from(2);
        }
    };
    if cli.global.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.threads)
            .build_global()
        {
            report_error("internal", e.to_string(), serde_json::Value::Null);
            return ExitCode::from(1);
        }
    }
    let name = command_name(&cli.command);
    let result = run(&cli).and_then(|text| emit(&text, cli.global.out.as_ref()).map_err(Error::from));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut context = serde_json::json!({ "subcommand": name });
            if let Error::Accuracy {
                best_estimate: Some(b), ..
            } = &e
            {
                context["best_estimate"] = serde_json::json!(b);
            }
            report_error(e.code(), e.to_string(), context);
            let status = if e.is_validation() {
                2
            } else if e.is_accuracy() {
                3
            } else {
                1
            };
            ExitCode::from(status)
        }
    }
}
