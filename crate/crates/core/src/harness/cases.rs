//! Manufactured test problems: `lambda = dbar(chi u)` restricted to a
//! surface, with the exact solution `chi u`.

use serde::{Deserialize, Serialize};

use crate::descend::SurfaceFunction;
use crate::error::{Error, Result};
use crate::fields::{Cutoff, CutoffPoly, Monomial, Poly};
use crate::forms::AmbientForm01;
use crate::geometry::{Covering, SurfaceKind, C64};

/// Cutoff radii of the shipped cases, as fractions of the image radius.
pub const SHIPPED_CUTOFF: (f64, f64) = (0.2, 0.8);

pub const SHIPPED_CASES: [&str; 3] = ["zero", "bump_u0", "bump_u3"];

/// One term of the ambient potential, as written in config files.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    /// `[re, im]`.
    pub coeff: [f64; 2],
    #[serde(default)]
    pub holo: [u32; 3],
    #[serde(default)]
    pub anti: [u32; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManufacturedCase {
    pub name: String,
    pub surface: SurfaceKind,
    pub n: u32,
    /// Plane radius `R`.
    pub radius: f64,
    /// Ambient cutoff radii.
    pub cutoff: Cutoff,
    #[serde(default)]
    pub potential: Vec<TermSpec>,
}

impl ManufacturedCase {
    pub fn covering(&self) -> Result<Covering> {
        Covering::new(self.surface, self.n)
    }

    pub fn poly(&self) -> Poly<3> {
        Poly {
            terms: self
                .potential
                .iter()
                .map(|t| Monomial { coeff: C64::new(t.coeff[0], t.coeff[1]), holo: t.holo, anti: t.anti })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cov = self.covering()?;
        Cutoff::new(self.cutoff.r_in, self.cutoff.r_out)?;
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::Config(format!("radius must be positive, got {}", self.radius)));
        }
        let support = cov.preimage_radius(self.cutoff.r_out);
        if support >= self.radius {
            return Err(Error::SupportNotInterior { support, radius: self.radius });
        }
        Ok(())
    }
}

/// A shipped case by name: `zero`, `bump_u0` (`u = 1`) or `bump_u3`
/// (`u = conj(x3)`), with the cutoff at [`SHIPPED_CUTOFF`] of the image radius.
pub fn shipped_case(name: &str, covering: Covering, radius: f64) -> Result<ManufacturedCase> {
    let img = covering.image_radius(radius);
    let cutoff = Cutoff::new(SHIPPED_CUTOFF.0 * img, SHIPPED_CUTOFF.1 * img)?;
    let potential = match name {
        "zero" => Vec::new(),
        "bump_u0" => vec![TermSpec { coeff: [1.0, 0.0], holo: [0; 3], anti: [0; 3] }],
        "bump_u3" => vec![TermSpec { coeff: [1.0, 0.0], holo: [0; 3], anti: [0, 0, 1] }],
        other => return Err(Error::UnknownCase(other.to_string())),
    };
    Ok(ManufacturedCase { name: name.to_string(), surface: covering.kind, n: covering.n, radius, cutoff, potential })
}

/// The form `lambda = dbar(chi u)` on the surface and the exact solution
/// `chi u`.
pub fn build_case(case: &ManufacturedCase) -> Result<(AmbientForm01, SurfaceFunction)> {
    case.validate()?;
    let cov = case.covering()?;
    let f = CutoffPoly::new(case.cutoff, case.poly());
    let g = f.clone();
    let lam =
        AmbientForm01::new(cov, case.radius, move |x| f.dbar(&x.coords())).with_ambient_support(case.cutoff.r_out);
    let exact = SurfaceFunction::restriction(cov, case.radius, move |x| g.value(&x.coords()));
    Ok((lam, exact))
}
