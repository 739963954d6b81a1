use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use rdp_dbar::dbar_solver::{QuadratureSpec, SolveMethod, SolveOptions};
use rdp_dbar::descend::{solve_on_surface, write_solution_csv};
use rdp_dbar::geometry::{ev, Covering, SurfaceKind};
use rdp_dbar::harness::{
    build_case, hoelder_seminorm, lambda_sup_norm, run_commute_check, run_solve, shipped_case, smooth_test_form,
    FileConfig, Format, ManufacturedCase,
};
use rdp_dbar::inequalities::{self, check_j_sets, write_summary_csv, Lemma, SearchConfig};
use rdp_dbar::Error;

#[derive(Parser, Debug)]
#[command(name = "rdp-dbar", version, about = "dbar solver and inequality checks on A_n and D_n surface singularities")]
#[command(arg_required_else_help = true)]
struct Cli {
    /// Seed for every random stream.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// TOML file with defaults for seed, format, samples, restarts, pairs, grid and a case table.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct SurfaceArgs {
    /// Surface family, A or D.
    #[arg(long, default_value = "A")]
    surface: SurfaceKind,
    #[arg(long = "N", default_value_t = 2)]
    n: u32,
    /// Plane radius.
    #[arg(long = "R", default_value_t = 1.0)]
    radius: f64,
    /// Shipped case: zero, bump_u0 or bump_u3.
    #[arg(long, default_value = "bump_u3")]
    case: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a manufactured case and export the solution on sampled surface points.
    Solve {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Nodes per axis; 32 on A surfaces, 48 on D surfaces by default.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, value_enum, default_value = "direct")]
        method: MethodArg,
        /// Number of exported sample points.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Number of probes for the dbar residual (0 skips it).
        #[arg(long, default_value_t = 0)]
        residual_probes: usize,
    },
    /// Sample the distance inequalities and search for counterexamples.
    VerifyLemmas {
        /// Lemma name, `all`, or `j_set`.
        #[arg(long, default_value = "all")]
        lemma: String,
        /// Degree or inclusive range such as 2..8.
        #[arg(long = "N")]
        n: Option<String>,
        /// Radii (R or rho); defaults to 0.5, 1, 2.
        #[arg(long, value_delimiter = ',')]
        radius: Option<Vec<f64>>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        restarts: Option<usize>,
    },
    /// Empirical Hölder seminorm of a computed solution.
    Hoelder {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        pairs: Option<usize>,
        /// Exponent; 1/Ev(N) on A surfaces and 1/(4N) on D surfaces by default.
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Compare dbar of a pulled-back form with the pullback of its dbar.
    Commute {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Coarsest difference step.
        #[arg(long, default_value_t = 0.1)]
        grid: f64,
        #[arg(long, default_value_t = 4)]
        levels: usize,
    },
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
enum MethodArg {
    Direct,
    Table,
}

impl From<MethodArg> for SolveMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Direct => SolveMethod::Direct,
            MethodArg::Table => SolveMethod::Table,
        }
    }
}

struct Ctx {
    seed: u64,
    format: Format,
    out: Option<PathBuf>,
    file: FileConfig,
}

impl Ctx {
    fn writer(&self) -> Result<Box<dyn Write>, Error> {
        Ok(match &self.out {
            Some(p) => Box::new(File::create(p)?),
            None => Box::new(io::stdout().lock()),
        })
    }

    fn json<T: Serialize>(&self, value: &T) -> Result<(), Error> {
        let mut w = self.writer()?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        Ok(())
    }

    fn case(&self, s: &SurfaceArgs) -> Result<ManufacturedCase, Error> {
        if let Some(case) = &self.file.case {
            return Ok(case.clone());
        }
        shipped_case(&s.case, Covering::new(s.surface, s.n)?, s.radius)
    }
}

fn parse_range(s: &str) -> Result<Vec<u32>, Error> {
    let bad = || Error::Config(format!("expected N or A..B, got `{s}`"));
    let parse = |t: &str| t.trim().parse::<u32>().map_err(|_| bad());
    match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            let (a, b) = (parse(a)?, parse(b)?);
            if a > b {
                return Err(bad());
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![parse(s)?]),
    }
}

fn metadata_path(out: &Path) -> PathBuf {
    out.with_extension("meta.json")
}

fn solve(
    ctx: &Ctx,
    s: &SurfaceArgs,
    grid: Option<usize>,
    method: MethodArg,
    samples: usize,
    probes: usize,
) -> Result<bool, Error> {
    let case = ctx.case(s)?;
    let cov = case.covering()?;
    let quad = match grid.or(ctx.file.grid) {
        Some(n) => QuadratureSpec::new(case.radius, n)?,
        None => QuadratureSpec::default_for(&cov, case.radius)?,
    };
    let (h, report) = run_solve(&case, &quad, method.into(), samples, probes, ctx.seed)?;
    match ctx.format {
        Format::Json => ctx.json(&report)?,
        Format::Csv => {
            let points = rdp_dbar::descend::sample_surface(&cov, case.radius, samples, ctx.seed);
            write_solution_csv(&h, &points, ctx.writer()?)?;
            let mut meta = report.clone();
            meta.rows.clear();
            let text = serde_json::to_string_pretty(&meta)?;
            match &ctx.out {
                Some(p) => std::fs::write(metadata_path(p), text + "\n")?,
                None => eprintln!("{text}"),
            }
        }
    }
    Ok(report.passed)
}

fn verify(
    ctx: &Ctx,
    lemma: &str,
    n: Option<&str>,
    radius: Option<&[f64]>,
    samples: Option<usize>,
    restarts: Option<usize>,
) -> Result<bool, Error> {
    let samples = samples.or(ctx.file.samples).unwrap_or(1_000_000);
    let restarts = restarts.or(ctx.file.restarts).unwrap_or(100);
    if lemma == "j_set" {
        let report = check_j_sets(samples, ctx.seed);
        match ctx.format {
            Format::Json => ctx.json(&report)?,
            Format::Csv => {
                let mut w = csv::Writer::from_writer(ctx.writer()?);
                w.serialize(&report)?;
                w.flush()?;
            }
        }
        return Ok(report.passed());
    }
    let lemmas: Vec<Lemma> = if lemma == "all" { Lemma::ALL.to_vec() } else { vec![lemma.parse()?] };
    let degrees = match n {
        Some(s) => parse_range(s)?,
        None => Vec::new(),
    };
    let radii = radius.map(|r| r.to_vec()).unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
    let mut configs = Vec::new();
    if degrees.is_empty() && radius.is_none() {
        configs = inequalities::standard_suite(samples, restarts, ctx.seed)
            .into_iter()
            .filter(|(l, _)| lemmas.contains(l))
            .collect();
    } else {
        for &l in &lemmas {
            let ns: Vec<u32> = if degrees.is_empty() {
                match l {
                    Lemma::A2 => vec![2],
                    Lemma::Final | Lemma::FinalIntermediate => (2..=5).collect(),
                    _ => (2..=8).collect(),
                }
            } else {
                degrees.clone()
            };
            for &nn in &ns {
                for &r in &radii {
                    let idx = configs.len() as u64;
                    let mut cfg = SearchConfig::new(nn, r, samples, ctx.seed.wrapping_add(idx));
                    cfg.restarts = restarts;
                    configs.push((l, cfg));
                }
            }
        }
    }
    let reports = inequalities::run_suite(&configs)?;
    match ctx.format {
        Format::Json => ctx.json(&reports)?,
        Format::Csv => write_summary_csv(&reports, ctx.writer()?)?,
    }
    Ok(reports.iter().all(|r| r.passed()))
}

fn hoelder(
    ctx: &Ctx,
    s: &SurfaceArgs,
    pairs: Option<usize>,
    beta: Option<f64>,
    grid: Option<usize>,
) -> Result<bool, Error> {
    let case = ctx.case(s)?;
    let cov = case.covering()?;
    let beta = beta.unwrap_or(match cov.kind {
        SurfaceKind::A => 1.0 / ev(cov.n) as f64,
        SurfaceKind::D => 1.0 / (4 * cov.n) as f64,
    });
    let pairs = pairs.or(ctx.file.pairs).unwrap_or(100_000);
    let (lam, _) = build_case(&case)?;
    let quad = QuadratureSpec::new(case.radius, grid.or(ctx.file.grid).unwrap_or(32))?;
    let h = solve_on_surface(&lam, &quad, &SolveOptions { method: SolveMethod::Table, ..Default::default() })?;
    let report = hoelder_seminorm(&h, beta, pairs, ctx.seed)?
        .with_lambda(lambda_sup_norm(&lam, 100_000, ctx.seed), "sampled sup over 1e5 covering points");
    match ctx.format {
        Format::Json => ctx.json(&report)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(ctx.writer()?);
            w.write_record([
                "surface",
                "beta",
                "pairs",
                "seminorm",
                "seminorm_doubled",
                "stability_ratio",
                "sup_norm",
                "lambda_sup",
                "constant",
                "bound_holds",
            ])?;
            w.write_record([
                report.surface.clone(),
                report.beta.to_string(),
                report.pairs.to_string(),
                report.seminorm.to_string(),
                report.seminorm_doubled.to_string(),
                report.stability_ratio.to_string(),
                report.sup_norm.to_string(),
                report.lambda_sup.map(|v| v.to_string()).unwrap_or_default(),
                report.constant.map(|v| v.to_string()).unwrap_or_default(),
                report.bound_holds.map(|v| v.to_string()).unwrap_or_default(),
            ])?;
            w.flush()?;
        }
    }
    Ok(report.stable && report.bound_holds != Some(false))
}

/// Residual threshold `10 h^2`, scaled by the form magnitude.
fn commute_threshold(step: f64, scale: f64) -> f64 {
    10.0 * step * step * scale.max(1.0)
}

fn commute(ctx: &Ctx, s: &SurfaceArgs, grid: f64, levels: usize) -> Result<bool, Error> {
    let cov = Covering::new(s.surface, s.n)?;
    let lam = if s.case == "smooth" && ctx.file.case.is_none() {
        smooth_test_form(cov, s.radius)
    } else {
        build_case(&ctx.case(s)?)?.0
    };
    if !(grid > 0.0) || levels == 0 {
        return Err(Error::Config("grid must be positive and levels at least 1".into()));
    }
    let report = run_commute_check(&lam, grid, levels)?;
    let scale = lambda_sup_norm(&lam, 10_000, ctx.seed);
    let ok = report.steps.iter().zip(&report.residuals).all(|(&h, &r)| r <= commute_threshold(h, scale));
    match ctx.format {
        Format::Json => ctx.json(&report)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(ctx.writer()?);
            w.write_record(["step", "residual"])?;
            for (h, r) in report.steps.iter().zip(&report.residuals) {
                w.write_record([h.to_string(), r.to_string()])?;
            }
            w.flush()?;
        }
    }
    Ok(ok)
}

fn run(cli: Cli) -> Result<bool, Error> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let ctx = Ctx {
        seed: cli.seed.or(file.seed).unwrap_or(42),
        format: cli.format.or(file.format).unwrap_or_default(),
        out: cli.out.clone(),
        file,
    };
    match &cli.command {
        Command::Solve { surface, grid, method, samples, residual_probes } => {
            solve(&ctx, surface, *grid, *method, *samples, *residual_probes)
        }
        Command::VerifyLemmas { lemma, n, radius, samples, restarts } => {
            verify(&ctx, lemma, n.as_deref(), radius.as_deref(), *samples, *restarts)
        }
        Command::Hoelder { surface, pairs, beta, grid } => hoelder(&ctx, surface, *pairs, *beta, *grid),
        Command::Commute { surface, grid, levels } => commute(&ctx, surface, *grid, *levels),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_)
                | Error::UnknownCase(_)
                | Error::InvalidDegree(_)
                | Error::InvalidCutoff { .. }
                | Error::InvalidQuadrature(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
