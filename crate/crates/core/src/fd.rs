//! Second-order central differences for Wirtinger derivatives.

use crate::geometry::{Point2, Point3, C64, I};

/// `d/dzbar_j` (j = 0, 1) of every component of `f` at `z`, with step `h`
/// along both real directions of the coordinate.
pub fn dbar_plane<const M: usize>(f: &impl Fn(&Point2) -> [C64; M], z: &Point2, h: f64, j: usize) -> [C64; M] {
    let shift = |d: C64| {
        let mut p = *z;
        if j == 0 {
            p.z1 += d;
        } else {
            p.z2 += d;
        }
        p
    };
    let xp = f(&shift(C64::new(h, 0.0)));
    let xm = f(&shift(C64::new(-h, 0.0)));
    let yp = f(&shift(C64::new(0.0, h)));
    let ym = f(&shift(C64::new(0.0, -h)));
    std::array::from_fn(|m| ((xp[m] - xm[m]) + I * (yp[m] - ym[m])) / (4.0 * h))
}

/// `d/dz_j` (j = 0, 1) of every component of `f` at `z`.
pub fn d_plane<const M: usize>(f: &impl Fn(&Point2) -> [C64; M], z: &Point2, h: f64, j: usize) -> [C64; M] {
    let shift = |d: C64| {
        let mut p = *z;
        if j == 0 {
            p.z1 += d;
        } else {
            p.z2 += d;
        }
        p
    };
    let xp = f(&shift(C64::new(h, 0.0)));
    let xm = f(&shift(C64::new(-h, 0.0)));
    let yp = f(&shift(C64::new(0.0, h)));
    let ym = f(&shift(C64::new(0.0, -h)));
    std::array::from_fn(|m| ((xp[m] - xm[m]) - I * (yp[m] - ym[m])) / (4.0 * h))
}

/// `d/dxbar_k` (k = 0, 1, 2) of every component of `f` at `x`.
pub fn dbar_ambient<const M: usize>(f: &impl Fn(&Point3) -> [C64; M], x: &Point3, h: f64, k: usize) -> [C64; M] {
    let shift = |d: C64| {
        let mut p = *x;
        match k {
            0 => p.x1 += d,
            1 => p.x2 += d,
            _ => p.x3 += d,
        }
        p
    };
    let xp = f(&shift(C64::new(h, 0.0)));
    let xm = f(&shift(C64::new(-h, 0.0)));
    let yp = f(&shift(C64::new(0.0, h)));
    let ym = f(&shift(C64::new(0.0, -h)));
    std::array::from_fn(|m| ((xp[m] - xm[m]) + I * (yp[m] - ym[m])) / (4.0 * h))
}

/// Scalar convenience wrapper of [`dbar_plane`].
pub fn dbar_scalar(f: &impl Fn(&Point2) -> C64, z: &Point2, h: f64) -> [C64; 2] {
    let g = |p: &Point2| [f(p)];
    [dbar_plane(&g, z, h, 0)[0], dbar_plane(&g, z, h, 1)[0]]
}
