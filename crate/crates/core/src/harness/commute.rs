//! `dbar` of a pulled-back form against the pullback of `dbar` of the form,
//! both by central differences, on fixed probes away from the origin.

use serde::{Deserialize, Serialize};

use crate::dbar_solver::probe_lattice;
use crate::error::Result;
use crate::fd;
use crate::forms::{pullback_jacobian, AmbientForm01, PlaneForm01};
use crate::geometry::{Covering, Point2, Point3, C64};

/// Coefficient of `dzbar1 ^ dzbar2` in `dbar mu`.
pub fn plane_dbar2(mu: &PlaneForm01, z: &Point2, h: f64) -> C64 {
    let f = |p: &Point2| mu.eval(p);
    fd::dbar_plane(&f, z, h, 0)[1] - fd::dbar_plane(&f, z, h, 1)[0]
}

/// Coefficients of `dxbar_i ^ dxbar_j` for `(i, j)` in `(0,1), (0,2), (1,2)`.
pub fn ambient_dbar2(lam: &AmbientForm01, x: &Point3, h: f64) -> [C64; 3] {
    let f = |p: &Point3| lam.eval(p);
    let d: [[C64; 3]; 3] = std::array::from_fn(|k| fd::dbar_ambient(&f, x, h, k));
    // d[k][m] = d lam_m / d xbar_k
    [d[0][1] - d[1][0], d[0][2] - d[2][0], d[1][2] - d[2][1]]
}

/// `F^*` of a `(0,2)`-form through the conjugate `2x2` minors of the Jacobian.
pub fn pullback_02(cov: &Covering, z: &Point2, w: [C64; 3]) -> C64 {
    let j = cov.jacobian(z);
    let minor = |a: usize, b: usize| (j[a][0] * j[b][1] - j[a][1] * j[b][0]).conj();
    w[0] * minor(0, 1) + w[1] * minor(0, 2) + w[2] * minor(1, 2)
}

pub fn commute_residual_at(lam: &AmbientForm01, probes: &[Point2], h: f64) -> f64 {
    let mu = pullback_jacobian(lam);
    probes
        .iter()
        .map(|z| {
            let left = plane_dbar2(&mu, z, h);
            let right = pullback_02(&lam.covering, z, ambient_dbar2(lam, &lam.covering.apply(z), h));
            (left - right).norm()
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommuteReport {
    pub surface: String,
    pub steps: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `log2` of successive residual ratios.
    pub orders: Vec<f64>,
    pub min_order: f64,
    pub probes: usize,
}

/// Residuals at `step`, `step / 2`, ... (`levels` values) on the fixed probe
/// lattice of `B_R` with `0.1 R <= |z| <= 0.9 R`.
pub fn run_commute_check(lam: &AmbientForm01, step: f64, levels: usize) -> Result<CommuteReport> {
    let probes = probe_lattice(lam.radius, 4, 0.9, 0.1 * lam.radius);
    let steps: Vec<f64> = (0..levels).map(|k| step / 2f64.powi(k as i32)).collect();
    let residuals: Vec<f64> = steps.iter().map(|&h| commute_residual_at(lam, &probes, h)).collect();
    let orders: Vec<f64> = residuals.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let min_order = orders.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(CommuteReport {
        surface: lam.covering.surface_name(),
        steps,
        residuals,
        orders,
        min_order,
        probes: probes.len(),
    })
}

/// The smooth form `xbar2 e^(xbar3) dxbar1 + e^(xbar1) dxbar2 + x1 xbar2 dxbar3`,
/// which is not `dbar`-closed.
pub fn smooth_test_form(cov: Covering, radius: f64) -> AmbientForm01 {
    AmbientForm01::new(cov, radius, |x| [x.x2.conj() * x.x3.conj().exp(), x.x1.conj().exp(), x.x1 * x.x2.conj()])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_form_commutes_to_roundoff_on_x2() {
        let cov = Covering::a(2).unwrap();
        let lam = AmbientForm01::new(cov, 1.0, |x| [C64::new(0.0, 0.0), x.x1.conj(), C64::new(0.0, 0.0)]);
        let probes = probe_lattice(1.0, 4, 0.9, 0.1);
        let z = probes[0];
        let left = plane_dbar2(&pullback_jacobian(&lam), &z, 0.01);
        assert!(left.norm() > 0.1);
        assert!(commute_residual_at(&lam, &probes, 0.01) < 1e-10);
    }

    #[test]
    fn second_order_decay() {
        for cov in [Covering::a(3).unwrap(), Covering::d(2).unwrap()] {
            let r = run_commute_check(&smooth_test_form(cov, 1.0), 0.1, 4).unwrap();
            assert!(r.residuals[0] > 1e-6, "{r:?}");
            assert!(r.min_order >= 1.9, "{r:?}");
        }
    }

    #[test]
    fn closed_form_has_no_two_form() {
        let cov = Covering::a(3).unwrap();
        let lam = AmbientForm01::new(cov, 1.0, |x| [x.x2.conj(), x.x1.conj(), C64::new(0.0, 0.0)]);
        let probes = probe_lattice(1.0, 4, 0.9, 0.1);
        assert!(commute_residual_at(&lam, &probes, 0.05) < 1e-10);
    }
}
