//! The surfaces `X_N : x1 x2 = x3^N` and `Y_N : y1^2 y3 + y2^2 = y3^(N+1)`,
//! the coverings `pi_N : C^2 -> X_N` and `eta2 : X_2N -> Y_N`, their deck
//! transformations and fibers.
//!
//! `pi_N(z1, z2) = (z1^N, z2^N, z1 z2)` is an `N`-sheeted covering branched
//! only at the origin; the sheets are permuted by
//! `phi_k(z1, z2) = (rho^k z1, rho^-k z2)` with `rho = exp(2 pi i / N)`.
//! `eta2` is 2-sheeted, its sheets exchanged by the linear involution `P`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const I: C64 = C64::new(0.0, 1.0);

/// Relative defect accepted by the surface-membership checks of the fiber
/// and covering operations.
pub const SURFACE_TOL: f64 = 1e-10;

/// Surface points closer than this to the origin are treated as the branch
/// point itself.
pub const BRANCH_EPS: f64 = 1e-14;

/// A point of `C^2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub z1: C64,
    pub z2: C64,
}

/// A point of `C^3`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x1: C64,
    pub x2: C64,
    pub x3: C64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { z1: C64::new(0.0, 0.0), z2: C64::new(0.0, 0.0) };

    pub fn new(z1: C64, z2: C64) -> Self {
        Self { z1, z2 }
    }

    pub fn real(a: f64, b: f64) -> Self {
        Self::new(C64::new(a, 0.0), C64::new(b, 0.0))
    }

    /// Builds a point from its four real coordinates `(Re z1, Im z1, Re z2, Im z2)`.
    pub fn from_reals(r: [f64; 4]) -> Self {
        Self::new(C64::new(r[0], r[1]), C64::new(r[2], r[3]))
    }

    pub fn to_reals(self) -> [f64; 4] {
        [self.z1.re, self.z1.im, self.z2.re, self.z2.im]
    }

    pub fn is_finite(&self) -> bool {
        self.z1.is_finite() && self.z2.is_finite()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.z1.norm_sqr() + self.z2.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.z1.norm().hypot(self.z2.norm())
    }

    pub fn norm_inf(&self) -> f64 {
        self.z1.norm().max(self.z2.norm())
    }
}

/// `||z, zeta||_inf`: the largest modulus among the four coordinates.
pub fn joint_norm_inf(z: &Point2, zeta: &Point2) -> f64 {
    z.norm_inf().max(zeta.norm_inf())
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.z1 + o.z1, self.z2 + o.z2)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.z1 - o.z1, self.z2 - o.z2)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.z1, -self.z2)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, t: f64) -> Point2 {
        Point2::new(self.z1 * t, self.z2 * t)
    }
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { x1: C64::new(0.0, 0.0), x2: C64::new(0.0, 0.0), x3: C64::new(0.0, 0.0) };

    pub fn new(x1: C64, x2: C64, x3: C64) -> Self {
        Self { x1, x2, x3 }
    }

    pub fn real(a: f64, b: f64, c: f64) -> Self {
        Self::new(C64::new(a, 0.0), C64::new(b, 0.0), C64::new(c, 0.0))
    }

    pub fn coords(&self) -> [C64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x1.norm_sqr() + self.x2.norm_sqr() + self.x3.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, t: f64) -> Point3 {
        Point3::new(self.x1 * t, self.x2 * t, self.x3 * t)
    }
}

fn check_degree(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidDegree(n));
    }
    Ok(())
}

/// The `A_{N-1}` surface `x1 x2 = x3^N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceA {
    n: u32,
}

impl SurfaceA {
    pub fn new(n: u32) -> Result<Self> {
        check_degree(n)?;
        Ok(Self { n })
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn defect(&self, x: &Point3) -> f64 {
        (x.x1 * x.x2 - x.x3.powu(self.n)).norm()
    }

    pub fn contains(&self, x: &Point3, tol: f64) -> bool {
        on_surface_a(self.n, x, tol)
    }
}

/// The `D_{N+2}` surface `y1^2 y3 + y2^2 = y3^(N+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceD {
    n: u32,
}

impl SurfaceD {
    pub fn new(n: u32) -> Result<Self> {
        check_degree(n)?;
        Ok(Self { n })
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn defect(&self, y: &Point3) -> f64 {
        (y.x1 * y.x1 * y.x3 + y.x2 * y.x2 - y.x3.powu(self.n + 1)).norm()
    }

    pub fn contains(&self, y: &Point3, tol: f64) -> bool {
        on_surface_d(self.n, y, tol)
    }
}

/// Index `k` of the deck transformation `phi_k`; `k = N` is the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeckIndex {
    n: u32,
    k: u32,
}

impl DeckIndex {
    pub fn new(n: u32, k: u32) -> Result<Self> {
        check_degree(n)?;
        if k == 0 || k > n {
            return Err(Error::InvalidDeckIndex { n, k });
        }
        Ok(Self { n, k })
    }

    pub fn identity(n: u32) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Group law `phi_j o phi_k = phi_{j+k}` with indices taken in `1..=N`.
    pub fn compose(&self, other: &DeckIndex) -> DeckIndex {
        debug_assert_eq!(self.n, other.n);
        DeckIndex { n: self.n, k: (self.k + other.k - 1) % self.n + 1 }
    }

    pub fn apply(&self, z: &Point2) -> Point2 {
        deck(self.n, self.k as i64, z)
    }
}

/// `exp(2 pi i k / n)`, exact whenever `k/n` is a multiple of a quarter turn.
pub fn root_of_unity(n: u32, k: i64) -> C64 {
    let n = n as i64;
    let r = k.rem_euclid(n);
    if (4 * r) % n == 0 {
        return match 4 * r / n {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
    }
    C64::from_polar(1.0, 2.0 * PI * r as f64 / n as f64)
}

/// Smallest even integer `>= n`.
pub fn ev(n: u32) -> u32 {
    n + n % 2
}

pub fn on_surface_a(n: u32, x: &Point3, tol: f64) -> bool {
    let defect = (x.x1 * x.x2 - x.x3.powu(n)).norm();
    defect <= tol * (1.0 + x.norm().powi(n as i32))
}

pub fn on_surface_d(n: u32, y: &Point3, tol: f64) -> bool {
    let defect = (y.x1 * y.x1 * y.x3 + y.x2 * y.x2 - y.x3.powu(n + 1)).norm();
    defect <= tol * (1.0 + y.norm().powi(n as i32 + 1))
}

/// `pi_N(z1, z2) = (z1^N, z2^N, z1 z2)`.
pub fn pi_n(n: u32, z: &Point2) -> Point3 {
    Point3::new(z.z1.powu(n), z.z2.powu(n), z.z1 * z.z2)
}

/// `a^n - b^n` evaluated as `(a - b) * sum a^k b^(n-1-k)` so that nearby
/// arguments do not cancel catastrophically.
pub fn power_diff(a: C64, b: C64, n: u32) -> C64 {
    let mut sum = C64::new(1.0, 0.0);
    let mut bp = C64::new(1.0, 0.0);
    for _ in 1..n {
        bp *= b;
        sum = a * sum + bp;
    }
    (a - b) * sum
}

/// `pi_N(z) - pi_N(zeta)` without cancellation.
pub fn pi_n_diff(n: u32, z: &Point2, zeta: &Point2) -> Point3 {
    Point3::new(
        power_diff(z.z1, zeta.z1, n),
        power_diff(z.z2, zeta.z2, n),
        (z.z1 - zeta.z1) * z.z2 + zeta.z1 * (z.z2 - zeta.z2),
    )
}

/// `phi_k(z) = (rho^k z1, rho^-k z2)`; `k` is read modulo `n`.
pub fn deck(n: u32, k: i64, z: &Point2) -> Point2 {
    Point2::new(root_of_unity(n, k) * z.z1, root_of_unity(n, -k) * z.z2)
}

/// All preimages of `x` under `pi_N`, as the deck orbit `{phi_k(z0)}_{k=1..N}`.
///
/// The base preimage takes the principal `N`-th root of the larger of `x1`,
/// `x2` and recovers the other coordinate from `x3`. Points within
/// [`BRANCH_EPS`] of the origin return the single branch point.
pub fn fiber_a(n: u32, x: &Point3) -> Result<Vec<Point2>> {
    check_degree(n)?;
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    if !on_surface_a(n, x, SURFACE_TOL) {
        return Err(Error::OffSurface { surface: format!("X_{n}"), defect: (x.x1 * x.x2 - x.x3.powu(n)).norm() });
    }
    if x.norm() < BRANCH_EPS {
        return Ok(vec![Point2::ORIGIN]);
    }
    let inv_n = 1.0 / n as f64;
    let base = if x.x1.norm() >= x.x2.norm() {
        let z1 = x.x1.powf(inv_n);
        Point2::new(z1, x.x3 / z1)
    } else {
        let z2 = x.x2.powf(inv_n);
        Point2::new(x.x3 / z2, z2)
    };
    Ok((1..=n as i64).map(|k| deck(n, k, &base)).collect())
}

/// The fiber point over `w` closest to `z` in the max-norm.
pub fn select_representative(n: u32, z: &Point2, w: &Point3) -> Result<Point2> {
    let fiber = fiber_a(n, w)?;
    let mut best = fiber[0];
    let mut best_d = (*z - best).norm_inf();
    for cand in &fiber[1..] {
        let d = (*z - *cand).norm_inf();
        if d < best_d {
            best = *cand;
            best_d = d;
        }
    }
    Ok(best)
}

/// Moves `zeta` along its deck orbit until no `phi_j` brings it strictly
/// closer to `z` in the max-norm. The comparison is re-evaluated on the
/// returned point itself, so the hypothesis `||z - phi_j(zeta)|| >=
/// ||z - zeta||` holds in floating point for every `j`.
pub fn closest_in_orbit(n: u32, z: &Point2, zeta: &Point2) -> Point2 {
    let mut cur = *zeta;
    let mut cur_d = (*z - cur).norm_inf();
    loop {
        let mut improved = false;
        for k in 1..n as i64 {
            let cand = deck(n, k, &cur);
            let d = (*z - cand).norm_inf();
            if d < cur_d {
                cur = cand;
                cur_d = d;
                improved = true;
            }
        }
        if !improved {
            return cur;
        }
    }
}

/// `P`: swaps `x1`, `x2` and negates `x3`.
pub fn apply_p(x: &Point3) -> Point3 {
    Point3::new(x.x2, x.x1, -x.x3)
}

/// `Q x = ((x1 + x2)/2, i (x2 - x1)/2, x3)`.
pub fn apply_q(x: &Point3) -> Point3 {
    Point3::new((x.x1 + x.x2) * 0.5, I * (x.x2 - x.x1) * 0.5, x.x3)
}

pub fn apply_q_inverse(v: &Point3) -> Point3 {
    Point3::new(v.x1 + I * v.x2, v.x1 - I * v.x2, v.x3)
}

/// `eta2(x) = ((x1 + x2)/2, x3 (x1 - x2)/(2i), x3^2)` without the surface
/// check.
pub fn eta2_map(x: &Point3) -> Point3 {
    Point3::new((x.x1 + x.x2) * 0.5, x.x3 * (x.x1 - x.x2) * (-0.5 * I), x.x3 * x.x3)
}

/// `eta2 : X_2N -> Y_N`.
pub fn eta2(n: u32, x: &Point3) -> Result<Point3> {
    check_degree(n)?;
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    if !on_surface_a(2 * n, x, SURFACE_TOL) {
        return Err(Error::OffSurface {
            surface: format!("X_{}", 2 * n),
            defect: (x.x1 * x.x2 - x.x3.powu(2 * n)).norm(),
        });
    }
    Ok(eta2_map(x))
}

/// `eta2(x) - eta2(w)` in the `Q` variables, `(a - s, bc - tu, c^2 - u^2)`.
pub fn eta2_diff(x: &Point3, w: &Point3) -> Point3 {
    let q = apply_q(x);
    let r = apply_q(w);
    let (b, c, t, u) = (q.x2, q.x3, r.x2, r.x3);
    Point3::new(q.x1 - r.x1, (b - t) * c + t * (c - u), (c - u) * (c + u))
}

/// The two preimages `{x, Px}` of `y` under `eta2` (or the origin alone).
///
/// In the `Q` variables `(a, b, c)` the preimage has `a = y1`, `c = +-sqrt(y3)`
/// and `b = y2 / c`; on the axis `y3 = 0` the surface forces `b = -+ i a`.
pub fn fiber_d(n: u32, y: &Point3) -> Result<Vec<Point3>> {
    check_degree(n)?;
    if !y.is_finite() {
        return Err(Error::NonFinite);
    }
    if !on_surface_d(n, y, SURFACE_TOL) {
        return Err(Error::OffSurface {
            surface: format!("Y_{n}"),
            defect: (y.x1 * y.x1 * y.x3 + y.x2 * y.x2 - y.x3.powu(n + 1)).norm(),
        });
    }
    if y.norm() < BRANCH_EPS {
        return Ok(vec![Point3::ORIGIN]);
    }
    let a = y.x1;
    let c = y.x3.sqrt();
    let b = if c.norm() > 1e-6 * (1.0 + a.norm()) {
        y.x2 / c
    } else if c == C64::new(0.0, 0.0) {
        -I * a
    } else {
        // near the axis b^2 = c^2N - a^2; pick the root consistent with y2 = b c
        let root = (c.powu(2 * n) - a * a).sqrt();
        if (root * c - y.x2).norm() <= (-root * c - y.x2).norm() {
            root
        } else {
            -root
        }
    };
    let x = apply_q_inverse(&Point3::new(a, b, c));
    Ok(vec![x, apply_p(&x)])
}

/// Which surface a function or form lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SurfaceKind {
    A,
    D,
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceKind::A => write!(f, "A"),
            SurfaceKind::D => write!(f, "D"),
        }
    }
}

impl std::str::FromStr for SurfaceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(SurfaceKind::A),
            "D" | "d" => Ok(SurfaceKind::D),
            _ => Err(Error::Config(format!("unknown surface `{s}` (expected A or D)"))),
        }
    }
}

/// The covering from the plane onto a surface: `pi_N` onto `X_N`, or
/// `eta2 o pi_2N` onto `Y_N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Covering {
    pub kind: SurfaceKind,
    pub n: u32,
}

impl Covering {
    pub fn new(kind: SurfaceKind, n: u32) -> Result<Self> {
        check_degree(n)?;
        Ok(Self { kind, n })
    }

    pub fn a(n: u32) -> Result<Self> {
        Self::new(SurfaceKind::A, n)
    }

    pub fn d(n: u32) -> Result<Self> {
        Self::new(SurfaceKind::D, n)
    }

    /// Number of plane points over a generic surface point.
    pub fn sheets(&self) -> u32 {
        match self.kind {
            SurfaceKind::A => self.n,
            SurfaceKind::D => 4 * self.n,
        }
    }

    pub fn apply(&self, z: &Point2) -> Point3 {
        match self.kind {
            SurfaceKind::A => pi_n(self.n, z),
            SurfaceKind::D => eta2_map(&pi_n(2 * self.n, z)),
        }
    }

    /// Holomorphic Jacobian `dF_k/dz_m` of the covering at `z`.
    pub fn jacobian(&self, z: &Point2) -> [[C64; 2]; 3] {
        let pi_jac = |n: u32| {
            let nf = n as f64;
            [[z.z1.powu(n - 1) * nf, C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), z.z2.powu(n - 1) * nf], [z.z2, z.z1]]
        };
        match self.kind {
            SurfaceKind::A => pi_jac(self.n),
            SurfaceKind::D => {
                let x = pi_n(2 * self.n, z);
                let jp = pi_jac(2 * self.n);
                let half = C64::new(0.5, 0.0);
                let zero = C64::new(0.0, 0.0);
                let je = [
                    [half, half, zero],
                    [x.x3 * (-0.5 * I), x.x3 * (0.5 * I), (x.x1 - x.x2) * (-0.5 * I)],
                    [zero, zero, x.x3 * 2.0],
                ];
                std::array::from_fn(|k| std::array::from_fn(|m| (0..3).map(|j| je[k][j] * jp[j][m]).sum()))
            }
        }
    }

    pub fn contains(&self, x: &Point3, tol: f64) -> bool {
        match self.kind {
            SurfaceKind::A => on_surface_a(self.n, x, tol),
            SurfaceKind::D => on_surface_d(self.n, x, tol),
        }
    }

    pub fn surface_name(&self) -> String {
        match self.kind {
            SurfaceKind::A => format!("X_{}", self.n),
            SurfaceKind::D => format!("Y_{}", self.n),
        }
    }

    // The covering norm is invariant under a common phase of (z1, z2), so
    // unit directions are scanned as (sqrt(t), sqrt(1-t) e^{i gamma}).
    fn directions() -> impl Iterator<Item = Point2> {
        const T_STEPS: usize = 128;
        const PHASE_STEPS: usize = 128;
        (0..=T_STEPS).flat_map(|i| {
            let t = i as f64 / T_STEPS as f64;
            (0..PHASE_STEPS).map(move |j| {
                let gamma = 2.0 * PI * j as f64 / PHASE_STEPS as f64;
                Point2::new(C64::new(t.sqrt(), 0.0), C64::from_polar((1.0 - t).sqrt(), gamma))
            })
        })
    }

    /// Largest ambient radius `r` with `{x on the surface : ||x|| < r}`
    /// contained in the image of the ball `B_R`, i.e. the minimum of
    /// `||F(z)||` over the sphere `||z|| = R` (sampled).
    pub fn image_radius(&self, radius: f64) -> f64 {
        Self::directions().map(|w| self.apply(&(w * radius)).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Plane radius beyond which every point maps outside the ambient ball
    /// of radius `ambient`. Each coordinate of the covering is homogeneous
    /// of positive degree, so `||F(r w)||` increases along rays and the ray
    /// crossing is found by bisection. A 2% margin covers the sampling of
    /// directions.
    pub fn preimage_radius(&self, ambient: f64) -> f64 {
        let crossing = |w: Point2| {
            let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
            while self.apply(&(w * hi)).norm() < ambient {
                hi *= 2.0;
            }
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if self.apply(&(w * mid)).norm() < ambient {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            hi
        };
        1.02 * Self::directions().map(crossing).fold(0.0, f64::max)
    }
}
