//! `(0,1)`-forms on `C^2` and on the surfaces, their pullbacks through the
//! coverings, and the weak pairing against `(2,0)` test forms.
//!
//! Surface forms are stored by ambient components: `lambda = sum lambda_k
//! dxbar_k` with `lambda_k` defined on `C^3`. Pulling back through a
//! holomorphic map `F` acts on the components by the conjugate Jacobian,
//! `mu_m = sum_k conj(dF_k/dz_m) lambda_k(F)`.

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dbar_solver::{for_each_ball_node, QuadratureSpec};
use crate::error::{Error, Result};
use crate::fd;
use crate::fields::CutoffPoly;
use crate::geometry::{Covering, Point2, Point3, SurfaceKind, C64, I};
use crate::sampling;

/// `dzbar1 ^ dzbar2 ^ dz1 ^ dz2 = WEDGE_VOLUME * dV` for the standard
/// orientation of `C^2`.
pub const WEDGE_VOLUME: f64 = 4.0;

type AmbientFn = Arc<dyn Fn(&Point3) -> [C64; 3] + Send + Sync>;
type PlaneFn = Arc<dyn Fn(&Point2) -> [C64; 2] + Send + Sync>;

/// A `(0,1)`-form on the image `F(B_R)` of a covering `F`.
#[derive(Clone)]
pub struct AmbientForm01 {
    eval: AmbientFn,
    pub covering: Covering,
    /// Plane radius `R`; the domain is `F(B_R)`.
    pub radius: f64,
    /// The pullback vanishes for `|z| >= plane_support`.
    plane_support: Option<f64>,
}

impl fmt::Debug for AmbientForm01 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AmbientForm01")
            .field("covering", &self.covering)
            .field("radius", &self.radius)
            .field("plane_support", &self.plane_support)
            .finish()
    }
}

impl AmbientForm01 {
    pub fn new(covering: Covering, radius: f64, f: impl Fn(&Point3) -> [C64; 3] + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(f), covering, radius, plane_support: None }
    }

    pub fn zero(covering: Covering, radius: f64) -> Self {
        Self::new(covering, radius, |_| [C64::new(0.0, 0.0); 3]).with_plane_support(0.0)
    }

    /// Constant form `dxbar_k`.
    pub fn coordinate(covering: Covering, radius: f64, k: usize) -> Self {
        Self::new(covering, radius, move |_| {
            let mut v = [C64::new(0.0, 0.0); 3];
            v[k] = C64::new(1.0, 0.0);
            v
        })
    }

    pub fn with_plane_support(mut self, support: f64) -> Self {
        self.plane_support = Some(support);
        self
    }

    /// Declares that the components vanish for `|x| >= support`.
    pub fn with_ambient_support(self, support: f64) -> Self {
        let plane = self.covering.preimage_radius(support);
        self.with_plane_support(plane)
    }

    pub fn plane_support(&self) -> Option<f64> {
        self.plane_support
    }

    pub fn eval(&self, x: &Point3) -> [C64; 3] {
        (self.eval)(x)
    }

    /// `a * self + b * other` on the same domain.
    pub fn combine(&self, a: C64, other: &AmbientForm01, b: C64) -> Self {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        let support = match (self.plane_support, other.plane_support) {
            (Some(s), Some(t)) => Some(s.max(t)),
            _ => None,
        };
        Self {
            eval: Arc::new(move |x| {
                let (u, v) = (f(x), g(x));
                std::array::from_fn(|k| a * u[k] + b * v[k])
            }),
            covering: self.covering,
            radius: self.radius,
            plane_support: support,
        }
    }
}

/// A `(0,1)`-form `mu1 dzbar1 + mu2 dzbar2` on `B_R`.
#[derive(Clone)]
pub struct PlaneForm01 {
    eval: PlaneFn,
    radius: f64,
    support: f64,
}

impl fmt::Debug for PlaneForm01 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlaneForm01").field("radius", &self.radius).field("support", &self.support).finish()
    }
}

impl PlaneForm01 {
    /// `support` is the radius outside which the components vanish.
    pub fn new(radius: f64, support: f64, f: impl Fn(&Point2) -> [C64; 2] + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(f), radius, support }
    }

    pub fn zero(radius: f64, support: f64) -> Self {
        Self::new(radius, support, |_| [C64::new(0.0, 0.0); 2])
    }

    /// `dbar` of a scalar with known antiholomorphic gradient.
    pub fn exact(radius: f64, support: f64, grad: impl Fn(&Point2) -> [C64; 2] + Send + Sync + 'static) -> Self {
        Self::new(radius, support, grad)
    }

    pub fn eval(&self, z: &Point2) -> [C64; 2] {
        (self.eval)(z)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn combine(&self, a: C64, other: &PlaneForm01, b: C64) -> Self {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        Self {
            eval: Arc::new(move |z| {
                let (u, v) = (f(z), g(z));
                [a * u[0] + b * v[0], a * u[1] + b * v[1]]
            }),
            radius: self.radius,
            support: self.support.max(other.support),
        }
    }
}

fn expect_kind(lam: &AmbientForm01, kind: SurfaceKind) -> Result<()> {
    if lam.covering.kind != kind {
        let expected = match kind {
            SurfaceKind::A => "an A-type surface",
            SurfaceKind::D => "a D-type surface",
        };
        return Err(Error::WrongSurface { expected: expected.into(), found: lam.covering.surface_name() });
    }
    Ok(())
}

/// `pi_N^* lambda` for a form on `X_N`.
pub fn pullback_a(lam: &AmbientForm01) -> Result<PlaneForm01> {
    expect_kind(lam, SurfaceKind::A)?;
    let n = lam.covering.n;
    let nf = n as f64;
    let f = lam.eval.clone();
    Ok(PlaneForm01::new(lam.radius, lam.plane_support.unwrap_or(lam.radius), move |z| {
        let l = f(&crate::geometry::pi_n(n, z));
        let (b1, b2) = (z.z1.conj(), z.z2.conj());
        [b1.powu(n - 1) * nf * l[0] + b2 * l[2], b2.powu(n - 1) * nf * l[1] + b1 * l[2]]
    }))
}

/// `eta2^* aleph` for a form on `Y_N`, returned as a form on `X_2N`.
pub fn pullback_d(al: &AmbientForm01) -> Result<AmbientForm01> {
    expect_kind(al, SurfaceKind::D)?;
    let f = al.eval.clone();
    let covering = Covering::a(2 * al.covering.n)?;
    Ok(AmbientForm01 {
        eval: Arc::new(move |x| {
            let a = f(&crate::geometry::eta2_map(x));
            let x3b = x.x3.conj();
            let half = 0.5 * a[0];
            let twist = 0.5 * I * x3b * a[1];
            [half + twist, half - twist, 0.5 * I * (x.x1.conj() - x.x2.conj()) * a[1] + 2.0 * x3b * a[2]]
        }),
        covering,
        radius: al.radius,
        plane_support: al.plane_support,
    })
}

/// Pullback to the plane through the full covering of the form's surface.
pub fn pullback(lam: &AmbientForm01) -> Result<PlaneForm01> {
    match lam.covering.kind {
        SurfaceKind::A => pullback_a(lam),
        SurfaceKind::D => pullback_a(&pullback_d(lam)?),
    }
}

/// Pullback through the conjugate Jacobian of the covering, independent of
/// the closed-form coefficients in [`pullback_a`] and [`pullback_d`].
pub fn pullback_jacobian(lam: &AmbientForm01) -> PlaneForm01 {
    let f = lam.eval.clone();
    let cov = lam.covering;
    PlaneForm01::new(lam.radius, lam.plane_support.unwrap_or(lam.radius), move |z| {
        let l = f(&cov.apply(z));
        let j = cov.jacobian(z);
        std::array::from_fn(|m| (0..3).map(|k| j[k][m].conj() * l[k]).sum())
    })
}

/// Grid nodes `(i + 1/2) h` at least `margin` inside `B_R` and within
/// `limit` of the origin.
fn interior_nodes(radius: f64, h: f64, margin: f64, limit: f64, mut f: impl FnMut(Point2)) {
    let r = (radius - margin).min(limit);
    if r <= 0.0 {
        return;
    }
    for_each_ball_node([0.0; 4], h, r, |node, _| f(Point2::from_reals(node)));
}

/// `|dmu1/dzbar2 - dmu2/dzbar1|` at `z` by central differences.
pub fn closedness_at(mu: &PlaneForm01, z: &Point2, h: f64) -> f64 {
    let f = |p: &Point2| mu.eval(p);
    let d1 = fd::dbar_plane(&f, z, h, 0);
    let d2 = fd::dbar_plane(&f, z, h, 1);
    (d2[0] - d1[1]).norm()
}

/// Sup over interior grid nodes of `|dmu1/dzbar2 - dmu2/dzbar1|` by central
/// differences with the grid step. Nodes farther than one step outside the
/// support are skipped, where the form vanishes identically.
pub fn closedness_residual(mu: &PlaneForm01, grid: &QuadratureSpec) -> f64 {
    let h = grid.step();
    let mut sup: f64 = 0.0;
    interior_nodes(grid.radius, h, h, mu.support() + h, |z| sup = sup.max(closedness_at(mu, &z, h)));
    sup
}

/// Like [`closedness_residual`] but with difference step `step` instead of
/// the grid step, and the mixed difference at each node extrapolated from
/// `step` and `step/2` to cancel its `O(step^2)` term. This separates closed
/// forms with large higher derivatives from forms that are not closed.
pub fn closedness_defect(mu: &PlaneForm01, grid: &QuadratureSpec, step: f64) -> f64 {
    closedness_scan(mu, grid, step).0
}

/// [`closedness_defect`] divided by `sup |mu| / R` over the same nodes, so
/// that a form which is not closed scores of order 1 whatever its size.
/// Zero when `mu` vanishes on every node.
pub fn relative_closedness_defect(mu: &PlaneForm01, grid: &QuadratureSpec, step: f64) -> f64 {
    let (defect, scale) = closedness_scan(mu, grid, step);
    if scale == 0.0 {
        defect
    } else {
        defect * grid.radius / scale
    }
}

fn closedness_scan(mu: &PlaneForm01, grid: &QuadratureSpec, step: f64) -> (f64, f64) {
    let grid_step = grid.step();
    let f = |p: &Point2| mu.eval(p);
    let mixed = |z: &Point2, h: f64| {
        let d1 = fd::dbar_plane(&f, z, h, 0);
        let d2 = fd::dbar_plane(&f, z, h, 1);
        d2[0] - d1[1]
    };
    let (mut sup, mut scale): (f64, f64) = (0.0, 0.0);
    interior_nodes(grid.radius, grid_step, grid_step.max(step), mu.support() + grid_step, |z| {
        let extrapolated = (4.0 * mixed(&z, 0.5 * step) - mixed(&z, step)) / 3.0;
        sup = sup.max(extrapolated.norm());
        let m = mu.eval(&z);
        scale = scale.max(m[0].norm().hypot(m[1].norm()));
    });
    (sup, scale)
}

/// A test `(2,0)`-form on the surface, represented on the plane as
/// `v dz1 ^ dz2` with `v = f o F`. The covering groups act by unimodular
/// linear maps, so `dz1 ^ dz2` is invariant and every such `v` comes from a
/// form on the regular part of the surface.
#[derive(Clone)]
pub struct TestForm20 {
    coefficient: Arc<dyn Fn(&Point3) -> C64 + Send + Sync>,
    dbar: AmbientFn,
    pub covering: Covering,
    plane_support: f64,
    /// Sup of `|f|` over its support.
    pub scale: f64,
}

impl fmt::Debug for TestForm20 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestForm20")
            .field("covering", &self.covering)
            .field("plane_support", &self.plane_support)
            .field("scale", &self.scale)
            .finish()
    }
}

impl TestForm20 {
    pub fn from_cutoff_poly(covering: Covering, f: CutoffPoly<3>) -> Self {
        let plane_support = covering.preimage_radius(f.cutoff.r_out);
        let g = f.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let scale = (0..4000)
            .map(|_| {
                let z = sampling::uniform_ball(&mut rng, plane_support);
                f.value(&covering.apply(&z).coords()).norm()
            })
            .fold(0.0, f64::max);
        Self {
            coefficient: Arc::new(move |x| f.value(&x.coords())),
            dbar: Arc::new(move |x| g.dbar(&x.coords())),
            covering,
            plane_support,
            scale,
        }
    }

    pub fn coefficient(&self, x: &Point3) -> C64 {
        (self.coefficient)(x)
    }

    pub fn plane_support(&self) -> f64 {
        self.plane_support
    }

    /// `dbar v` on the plane, i.e. the pullback of `dbar f`.
    pub fn plane_dbar(&self, radius: f64) -> PlaneForm01 {
        let form = AmbientForm01 {
            eval: self.dbar.clone(),
            covering: self.covering,
            radius,
            plane_support: Some(self.plane_support),
        };
        pullback_jacobian(&form)
    }
}

fn pairing_sum(mu: &PlaneForm01, dv: &PlaneForm01, radius: f64, h: f64) -> C64 {
    let reach = mu.support().min(dv.support()).min(radius);
    let mut acc = C64::new(0.0, 0.0);
    for_each_ball_node([0.0; 4], h, reach, |node, _| {
        let z = Point2::from_reals(node);
        let m = mu.eval(&z);
        let d = dv.eval(&z);
        acc += m[0] * d[1] - m[1] * d[0];
    });
    acc * (WEDGE_VOLUME * h.powi(4))
}

/// `(1/sheets) * integral over B_R of F^*(lambda ^ dbar sigma)`, the surface
/// integral of `lambda ^ dbar sigma` over `F(B_R)`, by the midpoint rule.
/// With `tolerance`, the value is compared against the next refinement and a
/// larger change is reported as non-convergence.
pub fn pairing_integral(
    lam: &AmbientForm01,
    sig: &TestForm20,
    quad: &QuadratureSpec,
    tolerance: Option<f64>,
) -> Result<C64> {
    quad.validate()?;
    if sig.covering != lam.covering {
        return Err(Error::WrongSurface { expected: lam.covering.surface_name(), found: sig.covering.surface_name() });
    }
    if sig.plane_support >= quad.radius {
        return Err(Error::SupportNotInterior { support: sig.plane_support, radius: quad.radius });
    }
    let mu = pullback(lam)?;
    let dv = sig.plane_dbar(quad.radius);
    let sheets = lam.covering.sheets() as f64;
    let value = pairing_sum(&mu, &dv, quad.radius, quad.step()) / sheets;
    if let Some(tolerance) = tolerance {
        let finer = pairing_sum(&mu, &dv, quad.radius, quad.refined().step()) / sheets;
        let difference = (finer - value).norm();
        if difference > tolerance {
            return Err(Error::QuadratureNotConverged { difference, tolerance });
        }
    }
    Ok(value)
}

fn norm3(v: &[C64; 3]) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt()
}

/// Sampled `sup |F^* lambda| / sup |lambda|` over `B_R` (zero when `lambda`
/// vanishes at every sample).
pub fn pullback_sup_ratio(lam: &AmbientForm01, radius: f64, samples: usize, seed: u64) -> Result<f64> {
    let mu = pullback(lam)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut top, mut bottom): (f64, f64) = (0.0, 0.0);
    for _ in 0..samples.max(1) {
        let z = sampling::uniform_ball(&mut rng, radius);
        let m = mu.eval(&z);
        top = top.max(m[0].norm().hypot(m[1].norm()));
        bottom = bottom.max(norm3(&lam.eval(&lam.covering.apply(&z))));
    }
    Ok(if bottom == 0.0 { 0.0 } else { top / bottom })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Cutoff, Poly};
    use crate::geometry::{deck, pi_n};
    use rand::Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn coordinate_pullbacks_on_x2() {
        let cov = Covering::a(2).unwrap();
        let z = Point2::new(c(0.3, 0.1), c(-0.2, 0.4));
        let mu = pullback_a(&AmbientForm01::coordinate(cov, 1.0, 0)).unwrap().eval(&z);
        assert!(close(mu[0], 2.0 * z.z1.conj(), 1e-15) && mu[1] == c(0.0, 0.0));
        let mu = pullback_a(&AmbientForm01::coordinate(cov, 1.0, 2)).unwrap().eval(&z);
        assert!(close(mu[0], z.z2.conj(), 1e-15) && close(mu[1], z.z1.conj(), 1e-15));
    }

    #[test]
    fn coordinate_pullback_on_x3_matches_differences() {
        let cov = Covering::a(3).unwrap();
        let z = Point2::new(c(0.3, 0.1), c(-0.2, 0.4));
        let mu = pullback_a(&AmbientForm01::coordinate(cov, 1.0, 1)).unwrap().eval(&z);
        assert!(close(mu[1], 3.0 * z.z2.conj().powu(2), 1e-15) && mu[0] == c(0.0, 0.0));
        // xbar2 o pi_3 = zbar2^3
        let fd = fd::dbar_scalar(&|p: &Point2| pi_n(3, p).x2.conj(), &z, 1e-4);
        assert!(close(fd[1], mu[1], 1e-7) && close(fd[0], mu[0], 1e-7));
    }

    #[test]
    fn coordinate_pullbacks_through_eta2() {
        let cov = Covering::d(2).unwrap();
        let x = Point3::new(c(0.3, 0.2), c(-0.1, 0.4), c(0.5, -0.3));
        let l = pullback_d(&AmbientForm01::coordinate(cov, 1.0, 0)).unwrap().eval(&x);
        assert_eq!(l, [c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0)]);
        let l = pullback_d(&AmbientForm01::coordinate(cov, 1.0, 2)).unwrap().eval(&x);
        assert!(l[0] == c(0.0, 0.0) && l[1] == c(0.0, 0.0) && close(l[2], 2.0 * x.x3.conj(), 1e-15));
        let l = pullback_d(&AmbientForm01::zero(cov, 1.0)).unwrap().eval(&x);
        assert_eq!(l, [c(0.0, 0.0); 3]);
    }

    #[test]
    fn closed_form_pullbacks_agree_with_jacobian() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for cov in [Covering::a(2).unwrap(), Covering::a(5).unwrap(), Covering::d(2).unwrap(), Covering::d(3).unwrap()]
        {
            let lam = AmbientForm01::new(cov, 1.0, |x| [x.x2.conj() * x.x1, c(0.5, -1.0) + x.x3, x.x1.conj().powu(2)]);
            let a = pullback(&lam).unwrap();
            let b = pullback_jacobian(&lam);
            for _ in 0..200 {
                let z = sampling::uniform_ball(&mut rng, 1.0);
                let (u, v) = (a.eval(&z), b.eval(&z));
                assert!(close(u[0], v[0], 1e-13) && close(u[1], v[1], 1e-13), "{cov:?}");
            }
        }
    }

    #[test]
    fn pullback_matches_differences_of_composite() {
        // lambda = dbar u for u(x) = xbar1 x3 + xbar3^2 x2 + xbar2; the pullback is dbar (u o F)
        let u = |x: &Point3| x.x1.conj() * x.x3 + x.x3.conj().powu(2) * x.x2 + x.x2.conj();
        for cov in [Covering::a(3).unwrap(), Covering::d(2).unwrap()] {
            let lam = AmbientForm01::new(cov, 1.0, |x| [x.x3, c(1.0, 0.0), 2.0 * x.x3.conj() * x.x2]);
            let mu = pullback(&lam).unwrap();
            let z = Point2::new(c(0.35, -0.2), c(0.1, 0.45));
            let fd = fd::dbar_scalar(&|p: &Point2| u(&cov.apply(p)), &z, 1e-4);
            let m = mu.eval(&z);
            assert!(close(fd[0], m[0], 1e-6) && close(fd[1], m[1], 1e-6), "{cov:?}");
        }
    }

    #[test]
    fn pullback_is_deck_invariant() {
        let cov = Covering::a(4).unwrap();
        let lam = AmbientForm01::new(cov, 1.0, |x| [x.x3.conj(), x.x1 * x.x2.conj(), c(1.0, 2.0)]);
        let mu = pullback_a(&lam).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..500 {
            let z = sampling::uniform_ball(&mut rng, 1.0);
            let k = rng.random_range(1..=4);
            // phi_k^* mu = (rhobar^k mu1(phi z), rho^k mu2(phi z))
            let w = deck(4, k, &z);
            let m = mu.eval(&w);
            let rho = crate::geometry::root_of_unity(4, k);
            let back = [rho.conj() * m[0], rho * m[1]];
            let base = mu.eval(&z);
            let scale = 1.0 + base[0].norm() + base[1].norm();
            assert!(close(back[0], base[0], 1e-12 * scale) && close(back[1], base[1], 1e-12 * scale));
        }
    }

    #[test]
    fn linearity() {
        let cov = Covering::a(3).unwrap();
        let l1 = AmbientForm01::new(cov, 1.0, |x| [x.x1, x.x3.conj(), c(0.0, 1.0)]);
        let l2 = AmbientForm01::new(cov, 1.0, |x| [x.x2.conj(), x.x1 * x.x3, x.x2]);
        let (a, b) = (c(0.7, -0.2), c(-1.5, 0.4));
        let lhs = pullback_a(&l1.combine(a, &l2, b)).unwrap();
        let p1 = pullback_a(&l1).unwrap();
        let p2 = pullback_a(&l2).unwrap();
        let z = Point2::new(c(0.2, 0.3), c(0.4, -0.1));
        let (u, v, w) = (lhs.eval(&z), p1.eval(&z), p2.eval(&z));
        for m in 0..2 {
            assert!(close(u[m], a * v[m] + b * w[m], 1e-15));
        }
    }

    #[test]
    fn closedness_examples() {
        let grid = QuadratureSpec::new(1.0, 16).unwrap();
        let zero = PlaneForm01::zero(1.0, 1.0);
        assert_eq!(closedness_residual(&zero, &grid), 0.0);
        let open = PlaneForm01::new(1.0, 1.0, |z| [c(0.0, 0.0), z.z1.conj()]);
        assert!((closedness_residual(&open, &grid) - 1.0).abs() < 1e-12);
        // dbar of exp(zbar1 zbar2 + z1 zbar1): closed, residual O(h^2)
        let grad = |z: &Point2| {
            let e = (z.z1.conj() * z.z2.conj() + z.z1 * z.z1.conj()).exp();
            [e * (z.z2.conj() + z.z1), e * z.z1.conj()]
        };
        let mu = PlaneForm01::new(1.0, 1.0, grad);
        assert!(closedness_residual(&mu, &grid) < 0.2);
        let probes = crate::dbar_solver::probe_lattice(1.0, 4, 0.9, 0.0);
        let sup = |h: f64| probes.iter().map(|z| closedness_at(&mu, z, h)).fold(0.0, f64::max);
        let (r1, r2) = (sup(0.1), sup(0.05));
        assert!(r1 > 0.0 && (r1 / r2).log2() >= 1.9, "{r1} {r2}");
    }

    #[test]
    fn pairing_of_exact_forms_vanishes() {
        let cov = Covering::a(2).unwrap();
        let quad = QuadratureSpec::new(1.0, 16).unwrap();
        let r_img = cov.image_radius(1.0);
        let u = CutoffPoly::new(
            Cutoff::new(0.3 * r_img, 0.7 * r_img).unwrap(),
            Poly::term(c(1.0, 0.0), [0, 0, 0], [0, 0, 1]),
        );
        let lam = AmbientForm01::new(cov, 1.0, move |x| u.dbar(&x.coords())).with_ambient_support(0.7 * r_img);
        let sig = TestForm20::from_cutoff_poly(
            cov,
            CutoffPoly::new(
                Cutoff::new(0.2 * r_img, 0.6 * r_img).unwrap(),
                Poly::term(c(1.0, 0.0), [1, 0, 0], [0, 0, 0]),
            ),
        );
        let v = pairing_integral(&lam, &sig, &quad, None).unwrap();
        assert!(v.norm() < 1e-3, "{v}");
        let zero = AmbientForm01::zero(cov, 1.0);
        assert_eq!(pairing_integral(&zero, &sig, &quad, None).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn pairing_detects_non_closed_forms() {
        // lambda = xbar2 dxbar1 on X_2 is not closed: dbar lambda = dxbar2 ^ dxbar1
        // pulls back to a multiple of conj(z1 z2) and pairs with sigma = chi x3
        let cov = Covering::a(2).unwrap();
        let quad = QuadratureSpec::new(1.0, 16).unwrap();
        let lam = AmbientForm01::new(cov, 1.0, |x| [x.x2.conj(), c(0.0, 0.0), c(0.0, 0.0)]);
        let sig = TestForm20::from_cutoff_poly(
            cov,
            CutoffPoly::new(Cutoff::new(0.2, 0.6).unwrap(), Poly::term(c(1.0, 0.0), [0, 0, 1], [0, 0, 0])),
        );
        let v = pairing_integral(&lam, &sig, &quad, Some(0.05)).unwrap();
        assert!(v.norm() > 1e-2, "{v}");
        assert!(matches!(pairing_integral(&lam, &sig, &quad, Some(1e-9)), Err(Error::QuadratureNotConverged { .. })));
    }

    #[test]
    fn gaussian_volume_oracle() {
        // integral of exp(-|z|^2) over C^2 is pi^2
        let h = 0.25;
        let mut acc = 0.0;
        for_each_ball_node([0.0; 4], h, 6.0, |node, _| acc += (-node.iter().map(|c| c * c).sum::<f64>()).exp());
        let integral = acc * h.powi(4);
        assert!((integral - std::f64::consts::PI.powi(2)).abs() < 1e-9);
        // dzbar ^ dz = 2i dx ^ dy per variable, and reordering dzbar1 dzbar2 dz1 dz2
        // into (dzbar1 dz1)(dzbar2 dz2) costs one sign
        let per_variable = 2.0 * I;
        assert_eq!((-(per_variable * per_variable)).re, WEDGE_VOLUME);
    }

    #[test]
    fn sup_ratio_examples() {
        let cov = Covering::a(2).unwrap();
        let r = pullback_sup_ratio(&AmbientForm01::coordinate(cov, 1.0, 0), 1.0, 20_000, 1).unwrap();
        assert!(r <= 3.0 && r > 1.9, "{r}");
        assert_eq!(pullback_sup_ratio(&AmbientForm01::zero(cov, 1.0), 1.0, 100, 1).unwrap(), 0.0);
        let cov3 = Covering::a(3).unwrap();
        let r = pullback_sup_ratio(&AmbientForm01::coordinate(cov3, 1.0, 2), 1.0, 20_000, 1).unwrap();
        assert!(r <= 2.0, "{r}");
    }
}
