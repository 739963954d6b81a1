//! Empirical Hölder seminorms of surface functions over stratified random
//! pairs, measured in the ambient distance of `C^3`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::descend::SurfaceFunction;
use crate::error::{Error, Result};
use crate::forms::AmbientForm01;
use crate::geometry::{Point2, Point3};
use crate::sampling::{self, chunk_rng};

/// Doubling-growth ratio up to which the seminorm counts as stable.
pub const STABILITY_LIMIT: f64 = 1.1;

/// Ambient distance below which a pair counts as nearby.
pub const NEAR_DISTANCE: f64 = 0.01;

/// Fraction of the plane radius treated as the neighbourhood of the origin.
const ORIGIN_FRACTION: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stratum {
    Uniform,
    NearOrigin,
    Nearby,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoelderReport {
    pub surface: String,
    pub beta: f64,
    pub pairs: usize,
    pub seed: u64,
    /// Sup of the quotient over the first `pairs` pairs.
    pub seminorm: f64,
    /// Same over `2 * pairs` pairs, the first half shared.
    pub seminorm_doubled: f64,
    /// `seminorm_doubled / seminorm`, at least 1.
    pub stability_ratio: f64,
    pub stable: bool,
    /// Sup of `|h|` over all sampled points.
    pub sup_norm: f64,
    /// Quotient sup over pairs with both preimages in `B_{R/2}`.
    pub seminorm_inner: f64,
    /// Quotient sup over pairs with a preimage outside `B_{R/2}`.
    pub seminorm_outer: f64,
    /// Sampled sup of `|lambda|` on the surface, when supplied.
    pub lambda_sup: Option<f64>,
    /// `STABILITY_LIMIT * (seminorm + sup) / |lambda|` from the first
    /// `pairs` pairs.
    pub constant: Option<f64>,
    /// Whether `seminorm_doubled + sup <= constant * |lambda|`.
    pub bound_holds: Option<bool>,
    pub lambda_method: Option<String>,
}

fn draw_pair<R: Rng + ?Sized>(rng: &mut R, stratum: Stratum, h: &SurfaceFunction) -> (Point2, Point2) {
    let r = h.radius();
    let cov = h.covering();
    match stratum {
        Stratum::Uniform => (sampling::uniform_ball(rng, r), sampling::uniform_ball(rng, r)),
        Stratum::NearOrigin => (sampling::uniform_ball(rng, ORIGIN_FRACTION * r), sampling::uniform_ball(rng, r)),
        Stratum::Nearby => {
            let z = sampling::uniform_ball(rng, r);
            let x = cov.apply(&z);
            let mut t = NEAR_DISTANCE;
            loop {
                let zeta = z + sampling::uniform_ball(rng, t);
                if zeta.norm() <= r && (cov.apply(&zeta) - x).norm() <= NEAR_DISTANCE {
                    return (z, zeta);
                }
                t *= 0.5;
            }
        }
    }
}

fn stratum_of(i: usize) -> Stratum {
    match i % 4 {
        0 | 1 => Stratum::Uniform,
        2 => Stratum::NearOrigin,
        _ => Stratum::Nearby,
    }
}

struct Scan {
    semi: f64,
    inner: f64,
    outer: f64,
    sup: f64,
}

fn scan(h: &SurfaceFunction, beta: f64, seed: u64, from: usize, to: usize, acc: &mut Scan) -> Result<()> {
    const CHUNK: usize = 1 << 14;
    let r = h.radius();
    let cov = h.covering();
    // chunks are aligned so every pair index maps to the same stream
    for chunk in from / CHUNK..to.div_ceil(CHUNK) {
        let mut rng = chunk_rng(seed, chunk as u64);
        for i in chunk * CHUNK..((chunk + 1) * CHUNK).min(to) {
            let (z, zeta) = draw_pair(&mut rng, stratum_of(i), h);
            if i < from {
                continue;
            }
            let (x, w): (Point3, Point3) = (cov.apply(&z), cov.apply(&zeta));
            let (a, b) = (h.pullback_eval(&z)?, h.pullback_eval(&zeta)?);
            acc.sup = acc.sup.max(a.norm()).max(b.norm());
            let d = (x - w).norm();
            if d == 0.0 {
                continue;
            }
            let q = (a - b).norm() / d.powf(beta);
            acc.semi = acc.semi.max(q);
            if z.norm() <= r / 2.0 && zeta.norm() <= r / 2.0 {
                acc.inner = acc.inner.max(q);
            } else {
                acc.outer = acc.outer.max(q);
            }
        }
    }
    Ok(())
}

/// Stratified Hölder quotient sup of `h` with exponent `beta`: half the
/// pairs uniform in `B_R`, a quarter with one point in `B_{R/10}`, a quarter
/// at ambient distance at most [`NEAR_DISTANCE`]. The run is repeated with
/// twice as many pairs, reusing the first half, to measure stability.
pub fn hoelder_seminorm(h: &SurfaceFunction, beta: f64, pairs: usize, seed: u64) -> Result<HoelderReport> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Config(format!("exponent must lie in (0, 1], got {beta}")));
    }
    if pairs == 0 {
        return Err(Error::Config("pair count must be at least 1".into()));
    }
    let mut acc = Scan { semi: 0.0, inner: 0.0, outer: 0.0, sup: 0.0 };
    scan(h, beta, seed, 0, pairs, &mut acc)?;
    let semi = acc.semi;
    scan(h, beta, seed, pairs, 2 * pairs, &mut acc)?;
    let ratio = if semi > 0.0 { acc.semi / semi } else { 1.0 };
    Ok(HoelderReport {
        surface: h.covering().surface_name(),
        beta,
        pairs,
        seed,
        seminorm: semi,
        seminorm_doubled: acc.semi,
        stability_ratio: ratio,
        stable: ratio <= STABILITY_LIMIT,
        sup_norm: acc.sup,
        seminorm_inner: acc.inner,
        seminorm_outer: acc.outer,
        lambda_sup: None,
        constant: None,
        bound_holds: None,
        lambda_method: None,
    })
}

impl HoelderReport {
    /// Fills the empirical constant from the base run and checks the bound
    /// on the doubled run.
    pub fn with_lambda(mut self, lambda_sup: f64, method: &str) -> Self {
        self.lambda_sup = Some(lambda_sup);
        self.lambda_method = Some(method.to_string());
        if lambda_sup > 0.0 {
            let c = STABILITY_LIMIT * (self.seminorm + self.sup_norm) / lambda_sup;
            self.constant = Some(c);
            self.bound_holds = Some(self.seminorm_doubled + self.sup_norm <= c * lambda_sup);
        } else {
            self.bound_holds = Some(self.seminorm_doubled + self.sup_norm == 0.0);
        }
        self
    }
}

/// Sampled sup of `|lambda(F(z))|` over `z` uniform in `B_R`.
pub fn lambda_sup_norm(lam: &AmbientForm01, samples: usize, seed: u64) -> f64 {
    let mut rng = chunk_rng(seed, 0);
    let r = lam.radius;
    (0..samples.max(1))
        .map(|_| {
            let (_, x) = sampling::surface_point(&mut rng, &lam.covering, r);
            let v = lam.eval(&x);
            (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt()
        })
        .fold(0.0, f64::max)
}
