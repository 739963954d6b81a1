//! Oracle comparisons, probe sets, solve reports and the config file format.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dbar_solver::{dbar_residual_at, QuadratureSpec, SolveMethod, SolveOptions};
use crate::descend::{sample_surface, solution_rows, solve_on_surface, SolutionRow, SurfaceFunction};
use crate::error::{Error, Result};
use crate::forms::pullback;
use crate::geometry::{Covering, Point2, Point3};
use crate::harness::cases::{build_case, ManufacturedCase};
use crate::sampling;

/// Relative sup error accepted against a manufactured solution.
pub const ORACLE_TOLERANCE: f64 = 0.05;

/// `sup |h - exact| / sup |exact|` over `points` (absolute when the exact
/// solution vanishes there).
pub fn oracle_error(h: &SurfaceFunction, exact: &SurfaceFunction, points: &[Point3]) -> Result<f64> {
    let (mut err, mut top): (f64, f64) = (0.0, 0.0);
    for x in points {
        let want = exact.eval(x)?;
        err = err.max((h.eval(x)? - want).norm());
        top = top.max(want.norm());
    }
    Ok(if top > 0.0 { err / top } else { err })
}

/// Seeded plane points with `0.1 R <= |z| <= 0.9 R`.
pub fn origin_excluding_probes(radius: f64, count: usize, seed: u64) -> Vec<Point2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z = sampling::uniform_ball(&mut rng, 0.9 * radius);
        if z.norm() >= 0.1 * radius {
            out.push(z);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Optional settings read from `--config`; command-line flags win.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub samples: Option<usize>,
    pub restarts: Option<usize>,
    pub pairs: Option<usize>,
    pub grid: Option<usize>,
    pub case: Option<ManufacturedCase>,
}

impl FileConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub case: ManufacturedCase,
    pub surface: String,
    pub method: SolveMethod,
    pub quadrature: QuadratureSpec,
    pub seed: u64,
    pub oracle_points: usize,
    pub oracle_error: f64,
    /// dbar residual of the plane function of `h` against the pulled-back
    /// data, when requested.
    pub residual: Option<f64>,
    pub passed: bool,
    pub rows: Vec<SolutionRow>,
}

/// Solves a manufactured case, compares with the exact solution on
/// `samples` seeded surface points and optionally measures the residual on
/// `residual_probes` origin-excluding probes.
pub fn run_solve(
    case: &ManufacturedCase,
    quad: &QuadratureSpec,
    method: SolveMethod,
    samples: usize,
    residual_probes: usize,
    seed: u64,
) -> Result<(SurfaceFunction, SolveReport)> {
    let cov: Covering = case.covering()?;
    let (lam, exact) = build_case(case)?;
    let opts = SolveOptions { method, ..Default::default() };
    let h = solve_on_surface(&lam, quad, &opts)?;
    let points = sample_surface(&cov, case.radius, samples, seed);
    let oracle = oracle_error(&h, &exact, &points)?;
    let residual = if residual_probes > 0 {
        let mu = pullback(&lam)?;
        let plane = h.plane().ok_or_else(|| Error::Config("solution has no plane representative".into()))?;
        let probes = origin_excluding_probes(case.radius, residual_probes, seed);
        Some(dbar_residual_at(plane, &mu, &probes, quad.step()))
    } else {
        None
    };
    let report = SolveReport {
        case: case.clone(),
        surface: cov.surface_name(),
        method,
        quadrature: *quad,
        seed,
        oracle_points: samples,
        oracle_error: oracle,
        residual,
        passed: oracle <= ORACLE_TOLERANCE,
        rows: solution_rows(&h, &points)?,
    };
    Ok((h, report))
}
