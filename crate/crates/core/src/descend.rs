//! Deck-group averaging of plane solutions and push-down to the surfaces.
//!
//! On `X_N` a plane solution `g` of `dbar g = pi_N^* lambda` is averaged over
//! the deck group, and the average is constant on fibers, so it defines `h`
//! on the surface with `dbar h = lambda`. On `Y_N` the data is first pulled
//! back to `X_2N` through `eta2`, solved there, and the result is averaged
//! over the involution `P`.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dbar_solver::{self, QuadratureSpec, SolutionField, SolutionMeta, SolveOptions};
use crate::error::{Error, Result};
use crate::forms::{pullback_a, pullback_d, AmbientForm01};
use crate::geometry::{deck, fiber_a, fiber_d, Covering, Point2, Point3, SurfaceKind, C64};
use crate::sampling;

/// Relative tolerance for fiber agreement in [`push_down_a`].
pub const DECK_TOLERANCE: f64 = 1e-10;

/// Seeded plane points on which [`push_down_a`] checks invariance.
const INVARIANCE_SAMPLES: usize = 8;
const INVARIANCE_SEED: u64 = 0x5eed;

type SurfaceFn = Arc<dyn Fn(&Point3) -> Result<C64> + Send + Sync>;

/// A function on the image `F(B_R)` of the plane ball under a covering `F`.
#[derive(Clone)]
pub struct SurfaceFunction {
    eval: SurfaceFn,
    covering: Covering,
    radius: f64,
    plane: Option<SolutionField>,
    pub meta: SolutionMeta,
}

impl fmt::Debug for SurfaceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfaceFunction")
            .field("surface", &self.covering.surface_name())
            .field("radius", &self.radius)
            .field("meta", &self.meta)
            .finish()
    }
}

impl SurfaceFunction {
    /// `radius` is the plane radius `R` of the domain `F(B_R)`.
    pub fn new(covering: Covering, radius: f64, f: impl Fn(&Point3) -> Result<C64> + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(f), covering, radius, plane: None, meta: SolutionMeta::default() }
    }

    pub fn zero(covering: Covering, radius: f64) -> Self {
        Self::new(covering, radius, |_| Ok(C64::new(0.0, 0.0)))
    }

    /// Restriction of an ambient function; the plane pullback is exact.
    pub fn restriction(covering: Covering, radius: f64, f: impl Fn(&Point3) -> C64 + Send + Sync + 'static) -> Self {
        let f = Arc::new(f);
        let g = f.clone();
        let mut out = Self::new(covering, radius, move |x| Ok(f(x)));
        out.plane = Some(SolutionField::new(radius, "restriction", move |z| g(&covering.apply(z))));
        out
    }

    pub fn eval(&self, x: &Point3) -> Result<C64> {
        (self.eval)(x)
    }

    pub fn covering(&self) -> Covering {
        self.covering
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// The plane function `F^* h`, when it is known in closed form.
    pub fn plane(&self) -> Option<&SolutionField> {
        self.plane.as_ref()
    }

    /// `h(F(z))`, through the plane function when available.
    pub fn pullback_eval(&self, z: &Point2) -> Result<C64> {
        match &self.plane {
            Some(g) => Ok(g.eval(z)),
            None => self.eval(&self.covering.apply(z)),
        }
    }

    /// Values of the plane function at every fiber point over `x`.
    pub fn fiber_values(&self, x: &Point3) -> Result<Vec<C64>> {
        let g = self.plane.as_ref().ok_or_else(|| Error::Config("function has no plane representative".into()))?;
        Ok(full_fiber(&self.covering, x)?.iter().map(|z| g.eval(z)).collect())
    }
}

/// All plane preimages of `x` under the covering.
pub fn full_fiber(covering: &Covering, x: &Point3) -> Result<Vec<Point2>> {
    match covering.kind {
        SurfaceKind::A => fiber_a(covering.n, x),
        SurfaceKind::D => {
            let mut out = Vec::with_capacity(covering.sheets() as usize);
            for w in fiber_d(covering.n, x)? {
                out.extend(fiber_a(2 * covering.n, &w)?);
            }
            Ok(out)
        }
    }
}

/// `z -> (1/N) sum_k g(phi_k z)`.
pub fn symmetrize_a(n: u32, g: &SolutionField) -> SolutionField {
    let inner = g.clone();
    let mut out = SolutionField::new(g.radius(), "deck-average", move |z| {
        let sum: C64 = (1..=n as i64).map(|k| inner.eval(&deck(n, k, z))).sum();
        sum / n as f64
    });
    out.meta = SolutionMeta { method: format!("{}+deck-average", g.meta.method), ..g.meta.clone() };
    out
}

fn check_invariance(n: u32, g: &SolutionField, tol: f64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(INVARIANCE_SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..INVARIANCE_SAMPLES {
        let z = sampling::uniform_ball(&mut rng, g.radius());
        let v = g.eval(&z);
        for k in 1..n as i64 {
            let d = (g.eval(&deck(n, k, &z)) - v).norm() / (1.0 + v.norm());
            worst = worst.max(d);
        }
    }
    if worst > tol {
        return Err(Error::NotDeckInvariant { disagreement: worst, tolerance: tol });
    }
    Ok(())
}

/// `h(x) = g_avg(zeta)` for a fiber point `zeta` over `x`.
///
/// Invariance of `g_avg` is checked on seeded plane samples with relative
/// tolerance [`DECK_TOLERANCE`].
pub fn push_down_a(n: u32, g_avg: &SolutionField) -> Result<SurfaceFunction> {
    push_down_a_with(n, g_avg, DECK_TOLERANCE)
}

pub fn push_down_a_with(n: u32, g_avg: &SolutionField, tol: f64) -> Result<SurfaceFunction> {
    let covering = Covering::a(n)?;
    check_invariance(n, g_avg, tol)?;
    let g = g_avg.clone();
    let mut h = SurfaceFunction::new(covering, g_avg.radius(), move |x| {
        let fiber = fiber_a(n, x)?;
        Ok(g.eval(&fiber[0]))
    });
    h.plane = Some(g_avg.clone());
    h.meta = g_avg.meta.clone();
    Ok(h)
}

/// `f(y) = (h(x) + h(Px)) / 2` for `x` over `y`, a function on `Y_N` from one
/// on `X_2N`.
pub fn symmetrize_push_down_d(n: u32, h: &SurfaceFunction) -> Result<SurfaceFunction> {
    let src = h.covering();
    if src.kind != SurfaceKind::A || src.n != 2 * n {
        return Err(Error::WrongSurface { expected: format!("X_{}", 2 * n), found: src.surface_name() });
    }
    let covering = Covering::d(n)?;
    let inner = h.clone();
    let mut f = SurfaceFunction::new(covering, h.radius(), move |y| {
        let fiber = fiber_d(n, y)?;
        let mut sum = C64::new(0.0, 0.0);
        for x in &fiber {
            sum += inner.eval(x)?;
        }
        Ok(sum / fiber.len() as f64)
    });
    if let Some(g) = h.plane() {
        // P pi_2N(z1, z2) = pi_2N(z2, -z1)
        let g = g.clone();
        let meta = g.meta.clone();
        f.plane = Some(
            SolutionField::new(h.radius(), "p-average", move |z| 0.5 * (g.eval(z) + g.eval(&Point2::new(z.z2, -z.z1))))
                .with_meta(meta),
        );
    }
    f.meta = h.meta.clone();
    Ok(f)
}

/// Solves `dbar h = lambda` on `X_N`: pullback, plane solve, deck average,
/// push-down.
pub fn solve_on_a(lam: &AmbientForm01, quad: &QuadratureSpec, opts: &SolveOptions) -> Result<SurfaceFunction> {
    let mu = pullback_a(lam)?;
    let g = dbar_solver::solve(&mu, quad, opts)?;
    push_down_a(lam.covering.n, &symmetrize_a(lam.covering.n, &g))
}

/// Solves `dbar f = aleph` on `Y_N` through `X_2N`.
pub fn solve_on_d(al: &AmbientForm01, quad: &QuadratureSpec, opts: &SolveOptions) -> Result<SurfaceFunction> {
    let lifted = pullback_d(al)?;
    let h = solve_on_a(&lifted, quad, opts)?;
    symmetrize_push_down_d(al.covering.n, &h)
}

/// Dispatch on the surface of `lam`.
pub fn solve_on_surface(lam: &AmbientForm01, quad: &QuadratureSpec, opts: &SolveOptions) -> Result<SurfaceFunction> {
    match lam.covering.kind {
        SurfaceKind::A => solve_on_a(lam, quad, opts),
        SurfaceKind::D => solve_on_d(lam, quad, opts),
    }
}

/// Seeded surface points `F(z)` with `z` uniform in `B_R`.
pub fn sample_surface(covering: &Covering, radius: f64, count: usize, seed: u64) -> Vec<Point3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| sampling::surface_point(&mut rng, covering, radius).1).collect()
}

/// One exported sample.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct SolutionRow {
    pub x1_re: f64,
    pub x1_im: f64,
    pub x2_re: f64,
    pub x2_im: f64,
    pub x3_re: f64,
    pub x3_im: f64,
    pub h_re: f64,
    pub h_im: f64,
}

pub fn solution_rows(h: &SurfaceFunction, points: &[Point3]) -> Result<Vec<SolutionRow>> {
    points
        .iter()
        .map(|x| {
            let v = h.eval(x)?;
            Ok(SolutionRow {
                x1_re: x.x1.re,
                x1_im: x.x1.im,
                x2_re: x.x2.re,
                x2_im: x.x2.im,
                x3_re: x.x3.re,
                x3_im: x.x3.im,
                h_re: v.re,
                h_im: v.im,
            })
        })
        .collect()
}

/// CSV with header `x1_re,x1_im,x2_re,x2_im,x3_re,x3_im,h_re,h_im`.
pub fn write_solution_csv<W: Write>(h: &SurfaceFunction, points: &[Point3], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in solution_rows(h, points)? {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{apply_p, apply_q, eta2_map, pi_n};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample(seed: u64, r: f64) -> Vec<Point2> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..50).map(|_| sampling::uniform_ball(&mut rng, r)).collect()
    }

    #[test]
    fn averaging_examples() {
        let odd = symmetrize_a(2, &SolutionField::new(1.0, "t", |z| z.z1));
        let even = symmetrize_a(2, &SolutionField::new(1.0, "t", |z| z.z1 * z.z2));
        let inv = |z: &Point2| {
            let x = pi_n(3, z);
            (x.x1 * x.x3.conj() + x.x2).exp()
        };
        let inv3 = symmetrize_a(3, &SolutionField::new(1.0, "t", inv));
        for z in sample(1, 1.0) {
            assert!(odd.eval(&z).norm() < 1e-15);
            assert!((even.eval(&z) - z.z1 * z.z2).norm() < 1e-15);
            assert!((inv3.eval(&z) - inv(&z)).norm() < 1e-13);
        }
    }

    #[test]
    fn averages_are_deck_invariant() {
        let g = SolutionField::new(1.0, "t", |z| (z.z1 + c(0.3, 0.1) * z.z2.conj()).exp() + z.z1.conj() * z.z2);
        for n in 2..=6u32 {
            let avg = symmetrize_a(n, &g);
            for z in sample(n as u64, 1.0) {
                let v = avg.eval(&z);
                for k in 1..=n as i64 {
                    assert!((avg.eval(&deck(n, k, &z)) - v).norm() <= 1e-10 * (1.0 + v.norm()));
                }
            }
        }
    }

    #[test]
    fn push_down_factors_through_the_covering() {
        let u = |x: &Point3| x.x3.conj() * (-x.norm_sqr()).exp() + x.x1;
        let cov = Covering::a(3).unwrap();
        let g = SolutionField::new(1.0, "t", move |z| u(&pi_n(3, z)));
        let h = push_down_a(3, &g).unwrap();
        assert!((h.eval(&Point3::ORIGIN).unwrap() - g.eval(&Point2::ORIGIN)).norm() < 1e-15);
        for z in sample(9, 1.0) {
            let x = cov.apply(&z);
            assert!((h.eval(&x).unwrap() - u(&x)).norm() < 1e-10);
            let vals = h.fiber_values(&x).unwrap();
            assert_eq!(vals.len(), 3);
            for v in &vals {
                assert!((v - vals[0]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn push_down_rejects_non_invariant() {
        let g = SolutionField::new(1.0, "t", |z| z.z1);
        assert!(matches!(push_down_a(2, &g), Err(Error::NotDeckInvariant { .. })));
        let h = push_down_a(2, &symmetrize_a(2, &g)).unwrap();
        assert!(h.eval(&Point3::real(1.0, 0.0, 0.5)).is_err());
    }

    #[test]
    fn p_average_examples() {
        let n = 2;
        let cov = Covering::a(4).unwrap();
        // b-coordinate of Qx is odd under P
        let odd = SurfaceFunction::restriction(cov, 1.0, |x| apply_q(x).x2);
        let f = symmetrize_push_down_d(n, &odd).unwrap();
        // x1 + x2 is even under P
        let even_fn = |x: &Point3| (x.x1 + x.x2) * x.x3 * x.x3;
        let even = SurfaceFunction::restriction(cov, 1.0, even_fn);
        let fe = symmetrize_push_down_d(n, &even).unwrap();
        assert!((fe.eval(&Point3::ORIGIN).unwrap()).norm() < 1e-15);
        for z in sample(4, 1.0) {
            let x = cov.apply(&z);
            let y = eta2_map(&x);
            assert!(f.eval(&y).unwrap().norm() < 1e-12);
            assert!((fe.eval(&y).unwrap() - even_fn(&x)).norm() < 1e-12);
            let p = apply_p(&x);
            assert!((fe.pullback_eval(&z).unwrap() - fe.eval(&eta2_map(&p)).unwrap()).norm() < 1e-12);
        }
        assert!(symmetrize_push_down_d(3, &odd).is_err());
    }

    #[test]
    fn d_tower_two_ways() {
        let n = 2;
        let g = SolutionField::new(1.0, "t", |z| (z.z1 * c(0.2, 0.7) + z.z2.conj()).exp() * z.z1);
        let h = push_down_a(4, &symmetrize_a(4, &g)).unwrap();
        let f = symmetrize_push_down_d(n, &h).unwrap();
        let cov = Covering::d(n).unwrap();
        for z in sample(5, 0.9) {
            let via_surface = f.eval(&cov.apply(&z)).unwrap();
            // average over the group of order 4N generated by deck maps and (z2, -z1)
            let mut direct = C64::new(0.0, 0.0);
            for w in [z, Point2::new(z.z2, -z.z1)] {
                for k in 1..=4 {
                    direct += g.eval(&deck(4, k, &w));
                }
            }
            direct /= 8.0;
            assert!((via_surface - direct).norm() < 1e-10, "{via_surface} {direct}");
            assert!((f.pullback_eval(&z).unwrap() - direct).norm() < 1e-12);
            assert_eq!(f.fiber_values(&cov.apply(&z)).unwrap().len(), 8);
        }
    }

    #[test]
    fn zero_data_gives_zero() {
        let cov = Covering::a(3).unwrap();
        let lam = AmbientForm01::zero(cov, 1.0);
        let quad = QuadratureSpec::new(1.0, 8).unwrap();
        let h = solve_on_a(&lam, &quad, &SolveOptions::default()).unwrap();
        for x in sample_surface(&cov, 1.0, 5, 2) {
            assert_eq!(h.eval(&x).unwrap(), C64::new(0.0, 0.0));
        }
        let al = AmbientForm01::zero(Covering::d(2).unwrap(), 1.0);
        let f = solve_on_d(&al, &quad, &SolveOptions::default()).unwrap();
        assert_eq!(f.eval(&Point3::ORIGIN).unwrap(), C64::new(0.0, 0.0));
        assert!(solve_on_a(&al, &quad, &SolveOptions::default()).is_err());
    }

    #[test]
    fn csv_export() {
        let cov = Covering::a(2).unwrap();
        let h = SurfaceFunction::restriction(cov, 1.0, |x| x.x3);
        let pts = sample_surface(&cov, 1.0, 3, 1);
        let mut buf = Vec::new();
        write_solution_csv(&h, &pts, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "x1_re,x1_im,x2_re,x2_im,x3_re,x3_im,h_re,h_im");
        assert_eq!(lines.count(), 3);
    }
}
