//! Solving `dbar g = mu` on a ball of `C^2` with the Bochner-Martinelli-Koppelman
//! kernel.
//!
//! For a dbar-closed `(0,1)`-form `mu` with compact support,
//!
//! ```text
//! g(z) = -1/pi^2 * integral over C^2 of
//!        [mu1(zeta)(conj(zeta1 - z1)) + mu2(zeta)(conj(zeta2 - z2))] / |zeta - z|^4 dV(zeta)
//! ```
//!
//! is the unique solution vanishing at infinity. The integral is a midpoint
//! sum over the lattice `z + h (Z + 1/2)^4`: the lattice is centered on the
//! evaluation point, so the odd kernel cancels against the leading constant
//! term of `mu` pair by pair and the sum is a smooth function of `z`. Nodes
//! closer than `excision_eps` to `z` are dropped.
//!
//! [`bmk_tabulate`] evaluates the same sum on every node of the lattice
//! `h Z^4` at once by FFT convolution and interpolates between nodes.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd;
use crate::forms::{relative_closedness_defect, PlaneForm01};
use crate::geometry::{Point2, C64};
use crate::sampling;

/// Normalization of the kernel in `C^2`: `-(n-1)!/pi^n` with `n = 2`.
pub const BMK_NORMALIZATION: f64 = -1.0 / (PI * PI);

/// Default threshold on [`relative_closedness_defect`] for [`bmk_solve`].
/// Closed manufactured forms score a few `1e-3` at most; forms that are not
/// closed score of order 1.
pub const CLOSEDNESS_THRESHOLD: f64 = 1e-2;

/// Default lattice resolution across the diameter.
pub const DEFAULT_NODES_PER_AXIS: usize = 32;

/// Difference step of the closedness precondition, relative to `R`.
pub const CLOSEDNESS_STEP: f64 = 1.0 / 256.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Radius `R` of the ball `B_R`.
    pub radius: f64,
    /// Lattice nodes across the diameter `[-R, R]` at refinement level 0.
    pub nodes_per_axis: usize,
    /// Radius of the ball around the evaluation point left out of the sum.
    pub excision_eps: f64,
    /// Each level halves the step (and the default excision radius).
    pub refinement_level: u32,
}

impl QuadratureSpec {
    /// Default resolution for solving on the image of `B_R` under `covering`.
    /// The `D` tower has degree `4N` and steeper pulled-back data.
    pub fn default_for(covering: &crate::geometry::Covering, radius: f64) -> Result<Self> {
        let nodes = match covering.kind {
            crate::geometry::SurfaceKind::A => DEFAULT_NODES_PER_AXIS,
            crate::geometry::SurfaceKind::D => 3 * DEFAULT_NODES_PER_AXIS / 2,
        };
        Self::new(radius, nodes)
    }

    /// Spec with the excision radius tied to the step: `h/2`, capped just
    /// below `R/10`. The lattice is centered on the evaluation point, so the
    /// nearest node is `h` away and nothing is excised; excising whole
    /// shells of nodes costs an `O(eps^2 |grad mu|)` bias.
    pub fn new(radius: f64, nodes_per_axis: usize) -> Result<Self> {
        let mut spec = Self { radius, nodes_per_axis, excision_eps: 0.0, refinement_level: 0 };
        spec.excision_eps = spec.default_excision();
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_excision(mut self, eps: f64) -> Result<Self> {
        self.excision_eps = eps;
        self.validate()?;
        Ok(self)
    }

    pub fn with_level(mut self, level: u32) -> Result<Self> {
        self.refinement_level = level;
        self.excision_eps = self.default_excision();
        self.validate()?;
        Ok(self)
    }

    fn default_excision(&self) -> f64 {
        (0.5 * self.step()).min(0.099 * self.radius)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::InvalidQuadrature(format!("radius {} must be positive", self.radius)));
        }
        if self.nodes_per_axis < 8 {
            return Err(Error::InvalidQuadrature(format!("nodes_per_axis {} must be at least 8", self.nodes_per_axis)));
        }
        if !(self.excision_eps > 0.0 && self.excision_eps < self.radius / 10.0) {
            return Err(Error::InvalidQuadrature(format!("excision_eps {} must lie in (0, R/10)", self.excision_eps)));
        }
        Ok(())
    }

    /// Lattice step `h = 2R / (nodes_per_axis * 2^level)`.
    pub fn step(&self) -> f64 {
        2.0 * self.radius / (self.nodes_per_axis as f64 * f64::powi(2.0, self.refinement_level as i32))
    }

    /// The next refinement level, with the excision radius halved.
    pub fn refined(&self) -> Self {
        Self { refinement_level: self.refinement_level + 1, excision_eps: self.excision_eps * 0.5, ..*self }
    }
}

impl fmt::Display for QuadratureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "R={} nodes={} level={} h={:.5} eps={:.5}",
            self.radius,
            self.nodes_per_axis,
            self.refinement_level,
            self.step(),
            self.excision_eps
        )
    }
}

/// Visits every node `origin + h (i + 1/2)`, `i` in `Z^4`, lying in the
/// closed ball of radius `radius` about `0`. The callback receives the node
/// and its integer offsets from `origin`.
pub(crate) fn for_each_ball_node(origin: [f64; 4], h: f64, radius: f64, mut f: impl FnMut([f64; 4], [i64; 4])) {
    let r2 = radius * radius;
    let range = |c: f64, rem: f64| {
        let half = rem.max(0.0).sqrt();
        let lo = ((-half - c) / h - 0.5).ceil() as i64;
        let hi = ((half - c) / h - 0.5).floor() as i64;
        lo..=hi
    };
    let coord = |c: f64, i: i64| c + (i as f64 + 0.5) * h;
    for i0 in range(origin[0], r2) {
        let p0 = coord(origin[0], i0);
        let rem0 = r2 - p0 * p0;
        for i1 in range(origin[1], rem0) {
            let p1 = coord(origin[1], i1);
            let rem1 = rem0 - p1 * p1;
            for i2 in range(origin[2], rem1) {
                let p2 = coord(origin[2], i2);
                let rem2 = rem1 - p2 * p2;
                for i3 in range(origin[3], rem2) {
                    let p3 = coord(origin[3], i3);
                    f([p0, p1, p2, p3], [i0, i1, i2, i3]);
                }
            }
        }
    }
}

/// The kernel contribution `(mu1 conj(w1) + mu2 conj(w2)) / |w|^4` for the
/// offset `w = zeta - z`.
#[inline]
fn kernel_term(mu: [C64; 2], w: [f64; 4]) -> C64 {
    let r2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2] + w[3] * w[3];
    let w1 = C64::new(w[0], -w[1]);
    let w2 = C64::new(w[2], -w[3]);
    (mu[0] * w1 + mu[1] * w2) / (r2 * r2)
}

/// The raw lattice sum for `g(z)` with step `h`, excising `|zeta - z| < eps`.
pub fn bmk_lattice_sum(mu: &PlaneForm01, z: &Point2, h: f64, eps: f64) -> C64 {
    let eps2 = eps * eps;
    let mut acc = C64::new(0.0, 0.0);
    for_each_ball_node(z.to_reals(), h, mu.support(), |node, idx| {
        let w: [f64; 4] = std::array::from_fn(|k| (idx[k] as f64 + 0.5) * h);
        let r2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2] + w[3] * w[3];
        if r2 < eps2 {
            return;
        }
        acc += kernel_term(mu.eval(&Point2::from_reals(node)), w);
    });
    acc * (BMK_NORMALIZATION * h.powi(4))
}

/// Coefficient `c` in `sum - integral = 2 kappa c h^2 (dmu1/dz1 + dmu2/dz2)(z) + O(h^4)`.
///
/// The linear part of `mu` contributes the regularized lattice sum of
/// `n_1^2 / |n|^4` over `(Z + 1/2)^4`, which is a quarter of the Epstein zeta
/// value `16 (1 - 2^-s)(1 - 2^(1-s)) zeta(s) zeta(s-1)` at `s = 1`, i.e.
/// `-ln 2`. Excised nodes are subtracted from it.
pub fn lattice_error_coefficient(h: f64, eps: f64) -> f64 {
    let mut c = -std::f64::consts::LN_2;
    let e = eps / h;
    for_each_ball_node([0.0; 4], 1.0, e, |n, _| {
        let r2 = n[0] * n[0] + n[1] * n[1] + n[2] * n[2] + n[3] * n[3];
        if r2 < e * e {
            c -= 0.25 / r2;
        }
    });
    c
}

/// `dmu1/dz1 + dmu2/dz2` by central differences with step `h`.
fn holomorphic_divergence(mu: &PlaneForm01, z: &Point2, h: f64) -> C64 {
    let f = |p: &Point2| mu.eval(p);
    let d1 = fd::d_plane(&f, z, h, 0);
    let d2 = fd::d_plane(&f, z, h, 1);
    d1[0] + d2[1]
}

/// The lattice sum for `g(z)` with its `O(h^2)` error term removed, leaving
/// an `O(h^4)` quadrature error for smooth `mu`.
pub fn bmk_integral(mu: &PlaneForm01, z: &Point2, h: f64, eps: f64) -> C64 {
    let raw = bmk_lattice_sum(mu, z, h, eps);
    if z.norm() > mu.support() + h {
        return raw;
    }
    let c = lattice_error_coefficient(h, eps);
    raw - holomorphic_divergence(mu, z, h) * (2.0 * BMK_NORMALIZATION * c * h * h)
}

/// Provenance of a [`SolutionField`].
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SolutionMeta {
    pub method: String,
    pub quadrature: Option<QuadratureSpec>,
    /// Closedness residual of the data, when it was checked.
    pub data_residual: Option<f64>,
    /// dbar residual of the solution, when it was measured.
    pub residual: Option<f64>,
}

/// A function on the ball `B_R` of `C^2`.
#[derive(Clone)]
pub struct SolutionField {
    eval: Arc<dyn Fn(&Point2) -> C64 + Send + Sync>,
    radius: f64,
    pub meta: SolutionMeta,
}

impl fmt::Debug for SolutionField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SolutionField").field("radius", &self.radius).field("meta", &self.meta).finish()
    }
}

impl SolutionField {
    pub fn new(radius: f64, method: &str, eval: impl Fn(&Point2) -> C64 + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(eval), radius, meta: SolutionMeta { method: method.to_string(), ..Default::default() } }
    }

    pub fn zero(radius: f64) -> Self {
        Self::new(radius, "zero", |_| C64::new(0.0, 0.0))
    }

    pub fn eval(&self, z: &Point2) -> C64 {
        (self.eval)(z)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn with_meta(mut self, meta: SolutionMeta) -> Self {
        self.meta = meta;
        self
    }
}

/// How a solution is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMethod {
    /// One lattice sum per evaluation point.
    #[default]
    Direct,
    /// All lattice nodes at once by FFT, interpolated in between.
    Table,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub method: SolveMethod,
    /// Reject data whose closedness residual exceeds this; `None` skips the check.
    pub closedness_threshold: Option<f64>,
    /// Probe count and tolerance for comparing against the next refinement.
    pub convergence_check: Option<(usize, f64)>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { method: SolveMethod::Direct, closedness_threshold: Some(CLOSEDNESS_THRESHOLD), convergence_check: None }
    }
}

fn check_data(mu: &PlaneForm01, quad: &QuadratureSpec, opts: &SolveOptions) -> Result<Option<f64>> {
    quad.validate()?;
    if mu.support() >= quad.radius {
        return Err(Error::SupportNotInterior { support: mu.support(), radius: quad.radius });
    }
    match opts.closedness_threshold {
        Some(threshold) => {
            // scanned on the level-0 grid whatever the refinement
            let grid = QuadratureSpec { refinement_level: 0, ..*quad };
            let residual = relative_closedness_defect(mu, &grid, CLOSEDNESS_STEP * quad.radius);
            if residual > threshold {
                return Err(Error::NotClosed { residual, threshold });
            }
            Ok(Some(residual))
        }
        None => Ok(None),
    }
}

impl SolveOptions {
    pub fn unchecked(method: SolveMethod) -> Self {
        Self { method, closedness_threshold: None, convergence_check: None }
    }
}

/// Solves with the method chosen in `opts`.
pub fn solve(mu: &PlaneForm01, quad: &QuadratureSpec, opts: &SolveOptions) -> Result<SolutionField> {
    match opts.method {
        SolveMethod::Direct => bmk_solve_with(mu, quad, opts),
        SolveMethod::Table => bmk_tabulate_with(mu, quad, opts),
    }
}

/// Quadrature-backed solution of `dbar g = mu`, evaluated lazily per point.
pub fn bmk_solve(mu: &PlaneForm01, quad: &QuadratureSpec) -> Result<SolutionField> {
    bmk_solve_with(mu, quad, &SolveOptions::default())
}

pub fn bmk_solve_with(mu: &PlaneForm01, quad: &QuadratureSpec, opts: &SolveOptions) -> Result<SolutionField> {
    let data_residual = check_data(mu, quad, opts)?;
    let (h, eps) = (quad.step(), quad.excision_eps);
    if let Some((probes, tolerance)) = opts.convergence_check {
        let fine = quad.refined();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut difference: f64 = 0.0;
        for _ in 0..probes {
            let z = sampling::uniform_ball(&mut rng, mu.support());
            let coarse = bmk_integral(mu, &z, h, eps);
            let finer = bmk_integral(mu, &z, fine.step(), fine.excision_eps);
            difference = difference.max((coarse - finer).norm());
        }
        if difference > tolerance {
            return Err(Error::QuadratureNotConverged { difference, tolerance });
        }
    }
    let form = mu.clone();
    let field = SolutionField::new(quad.radius, "bmk-direct", move |z| bmk_integral(&form, z, h, eps));
    Ok(field.with_meta(SolutionMeta {
        method: "bmk-direct".into(),
        quadrature: Some(*quad),
        data_residual,
        residual: None,
    }))
}

/// Values of a lattice sum on the nodes `h j`, `j` in `[-half, half]^4`, with
/// a four-dimensional Catmull-Rom interpolant between them.
#[derive(Clone, Debug)]
pub struct LatticeTable {
    h: f64,
    half: usize,
    values: Vec<C64>,
}

impl LatticeTable {
    fn side(&self) -> usize {
        2 * self.half + 1
    }

    fn index(&self, j: [i64; 4]) -> Option<usize> {
        let side = self.side() as i64;
        let mut idx = 0i64;
        for &c in &j {
            let k = c + self.half as i64;
            if k < 0 || k >= side {
                return None;
            }
            idx = idx * side + k;
        }
        Some(idx as usize)
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    /// Value at the node `h j`, zero outside the table.
    pub fn node(&self, j: [i64; 4]) -> C64 {
        self.index(j).map_or(C64::new(0.0, 0.0), |i| self.values[i])
    }

    pub fn interpolate(&self, z: &Point2) -> C64 {
        let r = z.to_reals();
        let mut base = [0i64; 4];
        let mut weights = [[0.0f64; 4]; 4];
        for k in 0..4 {
            let p = r[k] / self.h;
            let b = p.floor();
            let t = p - b;
            base[k] = b as i64;
            let (t2, t3) = (t * t, t * t * t);
            weights[k] = [
                0.5 * (-t3 + 2.0 * t2 - t),
                0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
                0.5 * (-3.0 * t3 + 4.0 * t2 + t),
                0.5 * (t3 - t2),
            ];
        }
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..4 {
            for b in 0..4 {
                let wab = weights[0][a] * weights[1][b];
                for c in 0..4 {
                    let wabc = wab * weights[2][c];
                    for d in 0..4 {
                        let j = [
                            base[0] + a as i64 - 1,
                            base[1] + b as i64 - 1,
                            base[2] + c as i64 - 1,
                            base[3] + d as i64 - 1,
                        ];
                        acc += self.node(j) * (wabc * weights[3][d]);
                    }
                }
            }
        }
        acc
    }
}

fn fft_len(min: usize) -> usize {
    (min..)
        .find(|&n| {
            let mut m = n;
            for p in [2, 3, 5] {
                while m % p == 0 {
                    m /= p;
                }
            }
            m == 1
        })
        .expect("a 5-smooth length always exists")
}

/// In-place FFT of a `len^4` array along every axis.
fn fft4(data: &mut [C64], len: usize, fft: &Arc<dyn Fft<f64>>) {
    let mut line = vec![C64::new(0.0, 0.0); len];
    let mut scratch = vec![C64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for axis in 0..4 {
        let stride = len.pow(3 - axis as u32);
        let outer = len.pow(axis as u32);
        for o in 0..outer {
            for inner in 0..stride {
                let start = o * stride * len + inner;
                for (k, v) in line.iter_mut().enumerate() {
                    *v = data[start + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    data[start + k * stride] = *v;
                }
            }
        }
    }
}

/// Tabulates [`bmk_integral`] on every node `h j` with
/// `|h j_k| <= table_radius + 2h` by one FFT convolution, returning the
/// table. Node values agree with [`bmk_integral`] at those nodes up to FFT
/// roundoff.
pub fn bmk_lattice_table(mu: &PlaneForm01, h: f64, eps: f64, table_radius: f64) -> LatticeTable {
    let half = (table_radius / h).ceil() as usize + 2;
    let src_half = (mu.support() / h).ceil() as usize + 1;
    // sources at (i + 1/2) h for i in [-src_half, src_half - 1]
    let src_len = 2 * src_half;
    let out_len = 2 * half + 1;
    let len = fft_len(src_len + out_len - 1);
    let total = len.pow(4);
    let at = |c: [usize; 4]| ((c[0] * len + c[1]) * len + c[2]) * len + c[3];

    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(len);
    let inverse = planner.plan_fft_inverse(len);

    // g[j] = sum_i mu[i] K((i - j + 1/2) h); as a convolution in m = j - i the
    // kernel is Kr[m] = K((1/2 - m) h) and the source i sits at array slot
    // i + src_half.
    let mut source = [vec![C64::new(0.0, 0.0); total], vec![C64::new(0.0, 0.0); total]];
    for_each_ball_node([0.0; 4], h, mu.support(), |node, idx| {
        let v = mu.eval(&Point2::from_reals(node));
        let slot = at(std::array::from_fn(|k| (idx[k] + src_half as i64) as usize));
        source[0][slot] = v[0];
        source[1][slot] = v[1];
    });

    // output j lives at slot j - m_min where m = j - i ranges over
    // [-half - (src_half - 1), half + src_half]
    let m_min = -(half as i64) - (src_half as i64 - 1);
    let m_max = half as i64 + src_half as i64;
    let eps2 = eps * eps;
    let mut acc = vec![C64::new(0.0, 0.0); total];
    for comp in 0..2 {
        let mut kernel = vec![C64::new(0.0, 0.0); total];
        let span = (m_max - m_min + 1) as usize;
        for a in 0..span {
            let wa = (0.5 - (a as i64 + m_min) as f64) * h;
            for b in 0..span {
                let wb = (0.5 - (b as i64 + m_min) as f64) * h;
                for c in 0..span {
                    let wc = (0.5 - (c as i64 + m_min) as f64) * h;
                    for d in 0..span {
                        let wd = (0.5 - (d as i64 + m_min) as f64) * h;
                        let w = [wa, wb, wc, wd];
                        let r2 = wa * wa + wb * wb + wc * wc + wd * wd;
                        if r2 < eps2 {
                            continue;
                        }
                        let mu = if comp == 0 {
                            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
                        } else {
                            [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]
                        };
                        kernel[at([a % len, b % len, c % len, d % len])] = kernel_term(mu, w);
                    }
                }
            }
        }
        fft4(&mut kernel, len, &forward);
        let src = &mut source[comp];
        fft4(src, len, &forward);
        for (o, (s, k)) in acc.iter_mut().zip(src.iter().zip(kernel.iter())) {
            *o += s * k;
        }
    }
    drop(source);
    fft4(&mut acc, len, &inverse);

    // source slot i + src_half plus kernel slot m - m_min puts output j at
    // j + src_half - m_min
    let scale = BMK_NORMALIZATION * h.powi(4) / total as f64;
    let side = out_len;
    let mut values = vec![C64::new(0.0, 0.0); side.pow(4)];
    let off = |j: usize| ((j as i64 - half as i64) + src_half as i64 - m_min) as usize % len;
    let correction = 2.0 * BMK_NORMALIZATION * lattice_error_coefficient(h, eps) * h * h;
    let reach = mu.support() + h;
    for a in 0..side {
        for b in 0..side {
            for c in 0..side {
                for d in 0..side {
                    let mut v = acc[at([off(a), off(b), off(c), off(d)])] * scale;
                    let z = Point2::from_reals([a, b, c, d].map(|k| (k as f64 - half as f64) * h));
                    if z.norm() <= reach {
                        v -= holomorphic_divergence(mu, &z, h) * correction;
                    }
                    values[((a * side + b) * side + c) * side + d] = v;
                }
            }
        }
    }
    LatticeTable { h, half, values }
}

/// Table-backed solution: the lattice sum of [`bmk_solve`] computed on all
/// nodes of `h Z^4` inside the ball by FFT, with cubic interpolation between
/// nodes. Suited to workloads that evaluate the solution at very many points.
pub fn bmk_tabulate(mu: &PlaneForm01, quad: &QuadratureSpec) -> Result<SolutionField> {
    bmk_tabulate_with(mu, quad, &SolveOptions::default())
}

pub fn bmk_tabulate_with(mu: &PlaneForm01, quad: &QuadratureSpec, opts: &SolveOptions) -> Result<SolutionField> {
    let data_residual = check_data(mu, quad, opts)?;
    let table = Arc::new(bmk_lattice_table(mu, quad.step(), quad.excision_eps, quad.radius));
    let field = SolutionField::new(quad.radius, "bmk-table", move |z| table.interpolate(z));
    Ok(field.with_meta(SolutionMeta {
        method: "bmk-table".into(),
        quadrature: Some(*quad),
        data_residual,
        residual: None,
    }))
}

/// Probe points `(i + 1/2) 2R/per_axis - R` of a cubic lattice that lie in
/// the annulus `exclude <= |z| <= fill * R`.
pub fn probe_lattice(radius: f64, per_axis: usize, fill: f64, exclude: f64) -> Vec<Point2> {
    let step = 2.0 * radius / per_axis as f64;
    let mut out = Vec::new();
    for_each_ball_node([-radius; 4], step, 2.0 * radius, |node, _| {
        let z = Point2::from_reals(node);
        let r = z.norm();
        if r <= fill * radius && r >= exclude {
            out.push(z);
        }
    });
    out
}

/// Probe set used by [`dbar_residual`]: a 4-per-axis lattice in `|z| <= 0.9R`.
pub fn residual_probes(radius: f64) -> Vec<Point2> {
    probe_lattice(radius, 4, 0.9, 0.0)
}

/// Sup over `probes` of `|dbar g - mu|` by central differences with step `h`.
pub fn dbar_residual_at(g: &SolutionField, mu: &PlaneForm01, probes: &[Point2], h: f64) -> f64 {
    let f = |z: &Point2| [g.eval(z)];
    probes
        .iter()
        .map(|z| {
            let d1 = fd::dbar_plane(&f, z, h, 0)[0];
            let d2 = fd::dbar_plane(&f, z, h, 1)[0];
            let m = mu.eval(z);
            (d1 - m[0]).norm().hypot((d2 - m[1]).norm())
        })
        .fold(0.0, f64::max)
}

/// Sup of `|dbar g - mu|` over [`residual_probes`], with the difference step
/// equal to the grid step.
pub fn dbar_residual(g: &SolutionField, mu: &PlaneForm01, grid: &QuadratureSpec) -> f64 {
    dbar_residual_at(g, mu, &residual_probes(grid.radius), grid.step())
}

/// Largest difference quotient `|g(z) - g(zeta)| / |z - zeta|` over seeded
/// random pairs in `B_{R/2}`.
pub fn lipschitz_probe(g: &SolutionField, radius: f64, pairs: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sup: f64 = 0.0;
    for _ in 0..pairs {
        let z = sampling::uniform_ball(&mut rng, radius / 2.0);
        let zeta = if rng.random::<bool>() {
            sampling::uniform_ball(&mut rng, radius / 2.0)
        } else {
            // nearby partner, kept inside the half ball
            let d = sampling::uniform_ball(&mut rng, 0.05 * radius);
            let p = z + d;
            if p.norm() <= radius / 2.0 {
                p
            } else {
                z - d
            }
        };
        let dist = (z - zeta).norm();
        if dist == 0.0 {
            continue;
        }
        sup = sup.max((g.eval(&z) - g.eval(&zeta)).norm() / dist);
    }
    sup
}
