use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use hankel_besov::besov::{besov_report, BesovInput, BesovParams, DirectMoment};
use hankel_besov::convolution::{convolve, spectral_convolve, ConvolutionPath};
use hankel_besov::cwt::{cwt, parse_scales};
use hankel_besov::grid::read_csv;
use hankel_besov::hankel::{parseval_residual, plan, HankelPlan};
use hankel_besov::harness::{generate_test_function, run_verify, RunConfig, TestFunctionKind};
use hankel_besov::kernels::calibrate_d_constant;
use hankel_besov::wavelet::{make_wavelet, WaveletProfile};
use hankel_besov::{Error, MeasureParams, RadialGrid, Result, SampledFunction};

#[derive(Parser)]
#[command(
    name = "hankel-besov",
    version,
    about = "Hankel transforms, Hankel convolution, Bessel wavelets and Besov-Hankel seminorms"
)]
struct Cli {
    /// Order parameter ν (> 0).
    #[arg(long, global = true)]
    nu: Option<f64>,
    /// Run configuration (.toml or .json).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// RNG seed for seeded test functions and checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hankel transform of a sampled function, with a Parseval self-check.
    Hankel {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Largest tolerated relative gap between ‖f‖₂² and ‖f̂‖₂².
        #[arg(long, default_value_t = 1e-6)]
        parseval_tol: f64,
    },
    /// Hankel convolution of two sampled functions.
    Convolve {
        #[arg(long = "in", num_args = 2, required = true, value_names = ["F", "G"])]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "spectral")]
        path: PathArg,
    },
    /// Continuous Bessel wavelet transform; writes CSV or JSON by extension.
    Cwt {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// `hankel_mexican:N`; defaults to the configured wavelet.
        #[arg(long)]
        wavelet: Option<String>,
        /// `a_min:a_max:count`, geometric.
        #[arg(long)]
        scales: Option<String>,
    },
    /// Both Besov-Hankel seminorms and the two inequalities between them.
    Besov {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        #[arg(long)]
        wavelet: Option<String>,
        /// Weight of the direct constant.
        #[arg(long, value_enum, default_value = "positive")]
        moment: MomentArg,
        /// JSON report; printed to stdout when absent.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Sample a test function: gaussian:W, hankel_band:LO:HI, spectral_decay:R, noise[:SEED].
    Gen {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the property suite.
    Verify {
        /// Only checks whose name contains this string.
        #[arg(long)]
        only: Option<String>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        table: Option<PathBuf>,
        /// Use this tolerance for every check.
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum PathArg {
    Direct,
    Spectral,
}

impl From<PathArg> for ConvolutionPath {
    fn from(p: PathArg) -> Self {
        match p {
            PathArg::Direct => Self::Direct,
            PathArg::Spectral => Self::Spectral,
        }
    }
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum MomentArg {
    Positive,
    Negative,
}

/// A failed check, as opposed to an error.
struct CheckFailed;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Parameter(_) | Error::Shape(_) | Error::Capability(_) | Error::Admissibility(_) => 2,
        _ => 3,
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(nu) = cli.nu {
        cfg.nu = nu;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

struct Setup {
    params: MeasureParams,
    grid: Arc<RadialGrid>,
    plan: HankelPlan,
}

fn setup(cfg: &RunConfig) -> Result<Setup> {
    let params = MeasureParams::new(cfg.nu)?;
    let grid = Arc::new(RadialGrid::new(&params, cfg.grid)?);
    let plan = plan(&params, &grid, &grid)?;
    Ok(Setup { params, grid, plan })
}

fn read_function(path: &Path, grid: &Arc<RadialGrid>) -> Result<SampledFunction> {
    let file = File::open(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let (xs, vs) = read_csv(file).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    SampledFunction::from_table(grid, &xs, &vs)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "json")
}

fn write_function(path: &Path, f: &SampledFunction) -> Result<()> {
    let mut out = create(path)?;
    if is_json(path) {
        writeln!(out, "{}", f.to_json()?)?;
    } else {
        f.write_csv(&mut out)?;
    }
    out.flush()?;
    Ok(())
}

fn wavelet_profile(cfg: &RunConfig, arg: &Option<String>) -> Result<WaveletProfile> {
    arg.as_deref().unwrap_or(&cfg.wavelet).parse()
}

fn run(cli: &Cli) -> Result<std::result::Result<(), CheckFailed>> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Hankel {
            input,
            out,
            parseval_tol,
        } => {
            let s = setup(&cfg)?;
            let f = read_function(input, &s.grid)?;
            let fh = s.plan.forward(&f)?;
            write_function(out, &fh)?;
            let r = parseval_residual(&s.plan, &f, &f)?;
            eprintln!("parseval residual {:.3e} (tolerance {parseval_tol:.1e})", r.relative);
            if r.relative > *parseval_tol {
                return Ok(Err(CheckFailed));
            }
        }
        Command::Convolve { inputs, out, path } => {
            let s = setup(&cfg)?;
            let f = read_function(&inputs[0], &s.grid)?;
            let g = read_function(&inputs[1], &s.grid)?;
            let c = match ConvolutionPath::from(*path) {
                ConvolutionPath::Direct => convolve(&calibrate_d_constant(&s.params)?, &f, &g)?,
                ConvolutionPath::Spectral => spectral_convolve(&s.plan, &f, &g)?,
            };
            write_function(out, &c)?;
        }
        Command::Cwt {
            input,
            out,
            wavelet,
            scales,
        } => {
            let s = setup(&cfg)?;
            let f = read_function(input, &s.grid)?;
            let w = make_wavelet(&s.params, wavelet_profile(&cfg, wavelet)?, &s.plan)?;
            let scales = match scales {
                Some(spec) => parse_scales(spec)?,
                None => cfg.scales.points()?,
            };
            let sc = cwt(&s.plan, &f, &w, &scales)?;
            let mut o = create(out)?;
            if is_json(out) {
                writeln!(o, "{}", serde_json::to_string(&sc.to_record())?)?;
            } else {
                sc.write_csv(&mut o)?;
            }
            o.flush()?;
        }
        Command::Besov {
            input,
            alpha,
            p,
            q,
            wavelet,
            moment,
            report,
        } => {
            let s = setup(&cfg)?;
            let f = read_function(input, &s.grid)?;
            let params = BesovParams::new(*alpha, *p, *q)?
                .with_h_grid(cfg.h.points()?)?
                .with_scale_grid(cfg.scales.points()?)?;
            let w = make_wavelet(&s.params, wavelet_profile(&cfg, wavelet)?, &s.plan)?;
            let input = if params.alpha_int > 0 {
                BesovInput::with_derivative(&s.plan, f)?
            } else {
                BesovInput::new(f)
            };
            let moment = match moment {
                MomentArg::Positive => DirectMoment::Positive,
                MomentArg::Negative => DirectMoment::Negative,
            };
            let cal = calibrate_d_constant(&s.params)?;
            let r = besov_report(&s.plan, &cal, &input, &w, &params, moment)?;
            let text = serde_json::to_string_pretty(&r)?;
            match report {
                Some(path) => {
                    let mut o = create(path)?;
                    writeln!(o, "{text}")?;
                    o.flush()?;
                }
                None => println!("{text}"),
            }
            if !r.holds() {
                return Ok(Err(CheckFailed));
            }
        }
        Command::Gen { kind, out } => {
            let kind = match kind.as_str() {
                "noise" => TestFunctionKind::Noise { seed: cfg.seed },
                k => k.parse()?,
            };
            let s = setup(&cfg)?;
            write_function(out, &generate_test_function(kind, &s.plan)?)?;
        }
        Command::Verify {
            only,
            report,
            table,
            tolerance,
        } => {
            let cfg = match tolerance {
                Some(v) => cfg.with_uniform_tolerance(*v),
                None => cfg,
            };
            cfg.validate()?;
            let r = run_verify(&cfg, only.as_deref())?;
            r.write_table(std::io::stdout().lock())?;
            if let Some(path) = table.as_ref().or(cfg.output.table.as_ref()) {
                let mut o = create(path)?;
                r.write_table(&mut o)?;
                o.flush()?;
            }
            if let Some(path) = report.as_ref().or(cfg.output.report.as_ref()) {
                let mut o = create(path)?;
                o.write_all(r.to_json()?.as_bytes())?;
                o.flush()?;
            }
            match r.exit_code() {
                0 => {}
                1 => return Ok(Err(CheckFailed)),
                _ => return Err(Error::State(format!("{} check(s) could not run", r.summary.errors))),
            }
        }
    }
    Ok(Ok(()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(CheckFailed)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
