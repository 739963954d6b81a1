//! Checkers for the distance inequalities behind the Hölder estimates, with
//! seeded sampling and a local counterexample search.
//!
//! Every checker returns both sides of its inequality. The normalized margin
//! `(lhs - rhs) / max(lhs, rhs)` is what the search minimizes and what counts
//! as a violation below `-MARGIN_TOLERANCE`.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    apply_p, apply_q, closest_in_orbit, ev, joint_norm_inf, on_surface_a, pi_n, pi_n_diff, root_of_unity, Point2,
    Point3, C64, SURFACE_TOL,
};
use crate::sampling::{self, chunk_rng};

pub const MARGIN_TOLERANCE: f64 = 1e-12;

/// Samples drawn from one random stream before switching to the next.
const CHUNK: usize = 1 << 16;

/// Both sides of one inequality `lhs >= rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginEntry {
    pub lhs: f64,
    pub rhs: f64,
}

impl MarginEntry {
    pub fn margin(&self) -> f64 {
        (self.lhs - self.rhs) / self.lhs.max(self.rhs).max(f64::MIN_POSITIVE)
    }

    pub fn violated(&self) -> bool {
        self.margin() < -MARGIN_TOLERANCE
    }
}

fn norm3(x: &Point3) -> f64 {
    x.norm()
}

/// Replaces `zeta` by `-zeta` when `|z - zeta| > |z + zeta|`.
pub fn enforce_a2(z: &Point2, zeta: &Point2) -> Point2 {
    if (*z - *zeta).norm() > (*z + *zeta).norm() {
        -*zeta
    } else {
        *zeta
    }
}

/// `2 |pi_2(z) - pi_2(zeta)| >= |z - zeta| max(|z|, |zeta|, |z - zeta|)`,
/// after the sign flip of [`enforce_a2`].
pub fn check_lemma_a2(z: &Point2, zeta: &Point2) -> MarginEntry {
    let zeta = enforce_a2(z, zeta);
    let d = (*z - zeta).norm();
    MarginEntry { lhs: 2.0 * norm3(&pi_n_diff(2, z, &zeta)), rhs: d * z.norm().max(zeta.norm()).max(d) }
}

/// Right side of the general lemma for `N` and `delta`, from `|z - zeta|_inf`
/// and `|z, zeta|_inf`.
pub fn general_bound(n: u32, delta: u32, diff_inf: f64, joint_inf: f64) -> f64 {
    let k = (n - delta) as i32;
    let second = joint_inf.powi(k) * diff_inf.powi(delta as i32) / ((8.0f64 / 3.0).powi(k) * 2f64.powi(delta as i32));
    (diff_inf * diff_inf / 12.0).min(second)
}

/// `|pi_N(z) - pi_N(zeta)| >= min{ |z - zeta|_inf^2 / 12,
/// |z, zeta|_inf^(N - delta) |z - zeta|_inf^delta / ((8/3)^(N - delta) 2^delta) }`,
/// with `zeta` first moved along its deck orbit to the point closest to `z`.
pub fn check_lemma_general(n: u32, delta: u32, z: &Point2, zeta: &Point2) -> MarginEntry {
    let zeta = closest_in_orbit(n, z, zeta);
    MarginEntry {
        lhs: norm3(&pi_n_diff(n, z, &zeta)),
        rhs: general_bound(n, delta, (*z - zeta).norm_inf(), joint_norm_inf(z, &zeta)),
    }
}

/// `|pi_N(z) - pi_N(zeta)| >= |z - zeta|^N / sqrt(8)^N * min{1 / (3 R^(N-2)), 1}`
/// for `z, zeta` in the closed ball of radius `R`.
pub fn check_ball_corollary(n: u32, radius: f64, z: &Point2, zeta: &Point2) -> MarginEntry {
    let zeta = closest_in_orbit(n, z, zeta);
    let d = (*z - zeta).norm();
    let scale = (1.0 / (3.0 * radius.powi(n as i32 - 2))).min(1.0);
    MarginEntry { lhs: norm3(&pi_n_diff(n, z, &zeta)), rhs: d.powi(n as i32) / 8f64.sqrt().powi(n as i32) * scale }
}

/// `C12(rho) = min{4, 5 / (3 rho), 1 / (rho^(2N-2) N)} / 80`.
pub fn c12(n: u32, rho: f64) -> f64 {
    let third = 1.0 / (rho.powi(2 * n as i32 - 2) * n as f64);
    4.0f64.min(5.0 / (3.0 * rho)).min(third) / 80.0
}

/// The pair `(x, w)` and the difference `x - w` after the swap `x <- Px`
/// that makes `|Q(w - Px)| >= |Q(w - x)|`.
fn enforce_final(x: &Point3, w: &Point3, d: &Point3) -> (Point3, Point3) {
    let px = apply_p(x);
    let same = norm3(&apply_q(&(*w - *x)));
    let swapped = norm3(&apply_q(&(*w - px)));
    if swapped >= same {
        (*x, *d)
    } else {
        (px, px - *w)
    }
}

/// `x` or `Px`, whichever is closer to `w` after applying `Q`.
pub fn final_representative(x: &Point3, w: &Point3) -> Point3 {
    enforce_final(x, w, &(*x - *w)).0
}

/// `eta2(x) - eta2(w)` and `pi_2(b, c) - pi_2(t, u)` in the `Q` variables,
/// from `x`, `w` and a separately computed `x - w`.
fn final_differences(x: &Point3, w: &Point3, d: &Point3) -> (Point3, Point3) {
    let q = apply_q(x);
    let r = apply_q(w);
    let dq = apply_q(d);
    let (c, t, u) = (q.x3, r.x2, r.x3);
    let (db, dc) = (dq.x2, dq.x3);
    let eta = Point3::new(dq.x1, db * c + t * dc, dc * (c + u));
    let b = q.x2;
    let pi2 = Point3::new(db * (b + t), dc * (c + u), db * c + t * dc);
    (eta, pi2)
}

fn check_final_parts(n: u32, x: &Point3, w: &Point3, d: &Point3, rho: f64) -> (MarginEntry, MarginEntry) {
    let (x, d) = enforce_final(x, w, d);
    let (eta, pi2) = final_differences(&x, w, &d);
    let lhs = norm3(&eta);
    let c = c12(n, rho);
    (MarginEntry { lhs, rhs: c * d.norm_sqr() }, MarginEntry { lhs, rhs: 16.0 * c * norm3(&pi2) })
}

fn check_final_inputs(n: u32, x: &Point3, w: &Point3, rho: f64) -> Result<()> {
    for p in [x, w] {
        if !p.is_finite() {
            return Err(Error::NonFinite);
        }
        if !on_surface_a(2 * n, p, SURFACE_TOL) {
            return Err(Error::OffSurface {
                surface: format!("X_{}", 2 * n),
                defect: (p.x1 * p.x2 - p.x3.powu(2 * n)).norm(),
            });
        }
        if p.norm() > rho {
            return Err(Error::OutsideDomain { norm: p.norm(), radius: rho });
        }
    }
    Ok(())
}

/// `|eta2(x) - eta2(w)| >= C12(rho) |x - w|^2` for `x, w` on `X_2N` with
/// norms at most `rho`, after the swap `x <- Px` when
/// `|Q(w - Px)| < |Q(w - x)|`.
pub fn check_lemma_final(n: u32, x: &Point3, w: &Point3, rho: f64) -> Result<MarginEntry> {
    check_final_inputs(n, x, w, rho)?;
    Ok(check_final_parts(n, x, w, &(*x - *w), rho).0)
}

/// `|eta2(x) - eta2(w)| >= 16 C12(rho) |pi_2(b, c) - pi_2(t, u)|` with
/// `(a, b, c) = Qx`, `(s, t, u) = Qw`, under the same swap.
pub fn check_final_intermediate(n: u32, x: &Point3, w: &Point3, rho: f64) -> Result<MarginEntry> {
    check_final_inputs(n, x, w, rho)?;
    Ok(check_final_parts(n, x, w, &(*x - *w), rho).1)
}

/// Exponents `j` in `1..=N` with `Re(rho_N^j theta s) <= 0`, where `theta`
/// rotates `a` onto the nonnegative reals. Values within `1e-12 |s|` of the
/// imaginary axis count as zero.
pub fn build_j(n: u32, a: C64, s: C64) -> Vec<u32> {
    let theta = if a.norm() > 0.0 { a.conj() / a.norm() } else { C64::new(1.0, 0.0) };
    let s = theta * s;
    let slack = 1e-12 * s.norm();
    (1..=n).filter(|&j| (root_of_unity(n, j as i64) * s).re <= slack).collect()
}

/// Smallest admissible size of the set from [`build_j`].
pub fn j_required(n: u32) -> usize {
    (n - ev(n) / 2) as usize
}

/// Worst normalized margin of `|a - rho^j s| >= max{|a|, |s|, |a - s| / sqrt 2}`
/// over `j` in `J`.
pub fn j_bound_margin(n: u32, a: C64, s: C64, j: &[u32]) -> f64 {
    let rhs = a.norm().max(s.norm()).max((a - s).norm() / SQRT_2);
    j.iter()
        .map(|&k| {
            let e = MarginEntry { lhs: (a - root_of_unity(n, k as i64) * s).norm(), rhs };
            e.margin()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Which inequality to sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma {
    A2,
    /// `delta = N`.
    GeneralFull,
    /// `delta = Ev(N) / 2`.
    GeneralHalf,
    BallCorollary,
    Final,
    FinalIntermediate,
}

impl Lemma {
    pub const ALL: [Lemma; 6] = [
        Lemma::A2,
        Lemma::GeneralFull,
        Lemma::GeneralHalf,
        Lemma::BallCorollary,
        Lemma::Final,
        Lemma::FinalIntermediate,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Lemma::A2 => "a2",
            Lemma::GeneralFull => "general_full",
            Lemma::GeneralHalf => "general_half",
            Lemma::BallCorollary => "ball_corollary",
            Lemma::Final => "final",
            Lemma::FinalIntermediate => "final_intermediate",
        }
    }

    pub fn delta(&self, n: u32) -> Option<u32> {
        match self {
            Lemma::GeneralFull | Lemma::BallCorollary => Some(n),
            Lemma::GeneralHalf => Some(ev(n) / 2),
            _ => None,
        }
    }

    /// Whether samples live on `X_2N` rather than in the plane.
    fn on_surface(&self) -> bool {
        matches!(self, Lemma::Final | Lemma::FinalIntermediate)
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Lemma {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Lemma::ALL.into_iter().find(|l| l.name() == s).ok_or_else(|| Error::Config(format!("unknown lemma `{s}`")))
    }
}

/// Sampling and search parameters for one lemma configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub seed: u64,
    pub samples: usize,
    pub restarts: usize,
    pub steps: usize,
    /// Plane ball radius `R`, or `rho` for the surface lemmas.
    pub radius: f64,
    pub n: u32,
}

impl SearchConfig {
    pub fn new(n: u32, radius: f64, samples: usize, seed: u64) -> Self {
        Self { seed, samples, restarts: 100, steps: 200, radius, n }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 || self.restarts == 0 || self.steps == 0 {
            return Err(Error::Config("sample, restart and step counts must be at least 1".into()));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::Config(format!("radius must be positive, got {}", self.radius)));
        }
        if self.n < 2 {
            return Err(Error::InvalidDegree(self.n));
        }
        Ok(())
    }
}

/// A sampled input: the plane points `(z, zeta)` as eight reals. For the
/// surface lemmas these are preimages of `x = pi_2N(z)`, `w = pi_2N(zeta)`.
pub type PlanePair = [f64; 8];

fn split(p: &PlanePair) -> (Point2, Point2) {
    (Point2::from_reals([p[0], p[1], p[2], p[3]]), Point2::from_reals([p[4], p[5], p[6], p[7]]))
}

fn join(z: &Point2, zeta: &Point2) -> PlanePair {
    let (a, b) = (z.to_reals(), zeta.to_reals());
    [a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3]]
}

/// Evaluates `lemma` on a plane pair, or `None` when the pair is outside the
/// configured domain.
pub fn evaluate(lemma: Lemma, cfg: &SearchConfig, p: &PlanePair) -> Option<MarginEntry> {
    let (z, zeta) = split(p);
    let n = cfg.n;
    if lemma.on_surface() {
        let m = 2 * n;
        let (x, w) = (pi_n(m, &z), pi_n(m, &zeta));
        if x.norm() > cfg.radius || w.norm() > cfg.radius {
            return None;
        }
        let parts = check_final_parts(n, &x, &w, &pi_n_diff(m, &z, &zeta), cfg.radius);
        return Some(if lemma == Lemma::Final { parts.0 } else { parts.1 });
    }
    if z.norm() > cfg.radius || zeta.norm() > cfg.radius {
        return None;
    }
    Some(match lemma {
        Lemma::A2 => check_lemma_a2(&z, &zeta),
        Lemma::GeneralFull | Lemma::GeneralHalf => check_lemma_general(n, lemma.delta(n).unwrap_or(n), &z, &zeta),
        _ => check_ball_corollary(n, cfg.radius, &z, &zeta),
    })
}

fn draw<R: Rng + ?Sized>(rng: &mut R, lemma: Lemma, cfg: &SearchConfig) -> PlanePair {
    if lemma.on_surface() {
        // every surface point of norm <= rho has preimages in this polydisk
        let r0 = cfg.radius.powf(1.0 / (2 * cfg.n) as f64);
        loop {
            let z = sampling::uniform_polydisk(rng, r0);
            let zeta = if rng.random::<f64>() < 0.2 { near(rng, &z, r0) } else { sampling::uniform_polydisk(rng, r0) };
            let p = join(&z, &zeta);
            if evaluate(lemma, cfg, &p).is_some() {
                return p;
            }
        }
    }
    let r = cfg.radius;
    let z = sampling::uniform_ball(rng, r);
    loop {
        let zeta = if rng.random::<f64>() < 0.2 { near(rng, &z, r) } else { sampling::uniform_ball(rng, r) };
        if zeta.norm() <= r {
            return join(&z, &zeta);
        }
    }
}

/// A partner at log-uniform distance in `[1e-6 r, r]`.
fn near<R: Rng + ?Sized>(rng: &mut R, z: &Point2, r: f64) -> Point2 {
    let t = r * 10f64.powf(rng.random_range(-6.0..0.0));
    *z + sampling::unit_direction(rng) * t
}

/// Outcome of sampling plus local search for one configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: Lemma,
    pub n: u32,
    pub delta: Option<u32>,
    pub radius: f64,
    pub samples: usize,
    pub restarts: usize,
    pub steps: usize,
    pub violations: usize,
    pub worst_margin: f64,
    /// `max rhs / lhs` over all evaluated inputs with `lhs > 0`.
    pub sharpness: f64,
    /// Worst margin reached by the local search alone.
    pub search_margin: f64,
    pub worst_input: PlanePair,
    pub counterexample: Option<PlanePair>,
    pub seed: u64,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

struct Tally {
    violations: usize,
    worst: f64,
    worst_input: PlanePair,
    sharpness: f64,
    counterexample: Option<PlanePair>,
}

impl Tally {
    fn new() -> Self {
        Self { violations: 0, worst: f64::INFINITY, worst_input: [0.0; 8], sharpness: 0.0, counterexample: None }
    }

    fn record(&mut self, e: &MarginEntry, p: &PlanePair) -> f64 {
        let m = e.margin();
        if e.lhs > 0.0 {
            self.sharpness = self.sharpness.max(e.rhs / e.lhs);
        }
        if m < -MARGIN_TOLERANCE {
            self.violations += 1;
            if self.counterexample.is_none() || m < self.worst {
                self.counterexample = Some(*p);
            }
        }
        if m < self.worst {
            self.worst = m;
            self.worst_input = *p;
        }
        m
    }
}

/// Seeded sampling followed by coordinate descent on the margin from the
/// `restarts` worst samples. Deterministic for a fixed configuration.
pub fn adversarial_search(lemma: Lemma, cfg: &SearchConfig) -> Result<LemmaReport> {
    cfg.validate()?;
    let mut tally = Tally::new();
    let mut pool: Vec<(f64, PlanePair)> = Vec::with_capacity(4 * cfg.restarts);
    let prune = |pool: &mut Vec<(f64, PlanePair)>| {
        pool.sort_by(|a, b| a.0.total_cmp(&b.0));
        pool.truncate(cfg.restarts);
    };
    let chunks = cfg.samples.div_ceil(CHUNK);
    for chunk in 0..chunks {
        let mut rng = chunk_rng(cfg.seed, chunk as u64);
        let count = CHUNK.min(cfg.samples - chunk * CHUNK);
        for _ in 0..count {
            let p = draw(&mut rng, lemma, cfg);
            let e = evaluate(lemma, cfg, &p).expect("sampler stays in the domain");
            let m = tally.record(&e, &p);
            if pool.len() < cfg.restarts || m < pool.last().map_or(f64::INFINITY, |w| w.0) {
                pool.push((m, p));
                if pool.len() >= 4 * cfg.restarts {
                    prune(&mut pool);
                }
            }
        }
        prune(&mut pool);
    }
    prune(&mut pool);

    let mut search_worst = f64::INFINITY;
    let step0 = 0.1 * cfg.radius;
    for (m0, p0) in pool {
        let (mut best, mut p) = (m0, p0);
        let mut step = step0;
        for _ in 0..cfg.steps {
            let mut improved = false;
            for k in 0..8 {
                for sign in [1.0, -1.0] {
                    let mut q = p;
                    q[k] += sign * step;
                    if let Some(e) = evaluate(lemma, cfg, &q) {
                        let m = tally.record(&e, &q);
                        if m < best {
                            best = m;
                            p = q;
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                step *= 0.7;
            }
        }
        search_worst = search_worst.min(best);
    }

    Ok(LemmaReport {
        lemma,
        n: cfg.n,
        delta: lemma.delta(cfg.n),
        radius: cfg.radius,
        samples: cfg.samples,
        restarts: cfg.restarts,
        steps: cfg.steps,
        violations: tally.violations,
        worst_margin: tally.worst,
        sharpness: tally.sharpness,
        search_margin: search_worst,
        worst_input: tally.worst_input,
        counterexample: tally.counterexample,
        seed: cfg.seed,
    })
}

/// The configurations of the full lemma suite: `A2` on the unit ball, both
/// general variants for `N = 2..=8` and `R` in `{1/2, 1, 2}`, the ball
/// corollary on the same grid, and both surface inequalities for
/// `N = 2..=5`, `rho` in `{1/2, 1, 2}`.
pub fn standard_suite(samples: usize, restarts: usize, seed: u64) -> Vec<(Lemma, SearchConfig)> {
    let radii = [0.5, 1.0, 2.0];
    let mut out = Vec::new();
    let mut push = |lemma: Lemma, n: u32, r: f64| {
        let idx = out.len() as u64;
        let mut cfg = SearchConfig::new(n, r, samples, seed.wrapping_add(idx));
        cfg.restarts = restarts;
        out.push((lemma, cfg));
    };
    push(Lemma::A2, 2, 1.0);
    for lemma in [Lemma::GeneralFull, Lemma::GeneralHalf, Lemma::BallCorollary] {
        for n in 2..=8 {
            for r in radii {
                push(lemma, n, r);
            }
        }
    }
    for lemma in [Lemma::Final, Lemma::FinalIntermediate] {
        for n in 2..=5 {
            for r in radii {
                push(lemma, n, r);
            }
        }
    }
    out
}

pub fn run_suite(configs: &[(Lemma, SearchConfig)]) -> Result<Vec<LemmaReport>> {
    configs.iter().map(|(l, c)| adversarial_search(*l, c)).collect()
}

/// Outcome of the sampled check of [`build_j`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JSetReport {
    pub samples: usize,
    pub size_violations: usize,
    pub bound_violations: usize,
    /// Smallest `|J| - (N - Ev(N)/2)` seen.
    pub min_surplus: i64,
    pub worst_margin: f64,
    pub seed: u64,
}

impl JSetReport {
    pub fn passed(&self) -> bool {
        self.size_violations == 0 && self.bound_violations == 0
    }
}

/// Random `(a, s, N)` with `N` in `2..=9` and `a`, `s` in the unit disk; one
/// sample in fifty has `a = 0` and another `s = 0`.
pub fn check_j_sets(samples: usize, seed: u64) -> JSetReport {
    let mut report = JSetReport {
        samples,
        size_violations: 0,
        bound_violations: 0,
        min_surplus: i64::MAX,
        worst_margin: f64::INFINITY,
        seed,
    };
    for chunk in 0..samples.div_ceil(CHUNK) {
        let mut rng = chunk_rng(seed, chunk as u64);
        for _ in 0..CHUNK.min(samples - chunk * CHUNK) {
            let n = rng.random_range(2..=9u32);
            let mut a = sampling::uniform_disk(&mut rng, 1.0);
            let mut s = sampling::uniform_disk(&mut rng, 1.0);
            match rng.random_range(0..50) {
                0 => a = C64::new(0.0, 0.0),
                1 => s = C64::new(0.0, 0.0),
                _ => {}
            }
            let j = build_j(n, a, s);
            let surplus = j.len() as i64 - j_required(n) as i64;
            report.min_surplus = report.min_surplus.min(surplus);
            if surplus < 0 {
                report.size_violations += 1;
            }
            let m = j_bound_margin(n, a, s, &j);
            report.worst_margin = report.worst_margin.min(m);
            if m < -MARGIN_TOLERANCE {
                report.bound_violations += 1;
            }
        }
    }
    report
}

/// Summary CSV with header `lemma,N,delta,radius,samples,violations,worst_margin,sharpness`.
pub fn write_summary_csv<W: Write>(reports: &[LemmaReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["lemma", "N", "delta", "radius", "samples", "violations", "worst_margin", "sharpness"])?;
    for r in reports {
        w.write_record([
            r.lemma.name().to_string(),
            r.n.to_string(),
            r.delta.map(|d| d.to_string()).unwrap_or_default(),
            r.radius.to_string(),
            r.samples.to_string(),
            r.violations.to_string(),
            format!("{:e}", r.worst_margin),
            format!("{:e}", r.sharpness),
        ])?;
    }
    w.flush()?;
    Ok(())
}
