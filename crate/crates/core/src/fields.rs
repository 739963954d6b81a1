//! Scalar building blocks for manufactured data: polynomials in `(x, xbar)`
//! and smooth radial cutoffs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::C64;

/// One term `c * prod x_k^a_k * prod conj(x_k)^b_k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Monomial<const D: usize> {
    pub coeff: C64,
    pub holo: [u32; D],
    pub anti: [u32; D],
}

/// A polynomial in `D` complex variables and their conjugates.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly<const D: usize> {
    pub terms: Vec<Monomial<D>>,
}

impl<const D: usize> Poly<D> {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::term(c, [0; D], [0; D])
    }

    pub fn term(coeff: C64, holo: [u32; D], anti: [u32; D]) -> Self {
        Self { terms: vec![Monomial { coeff, holo, anti }] }
    }

    pub fn plus(mut self, other: Self) -> Self {
        self.terms.extend(other.terms);
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff == C64::new(0.0, 0.0))
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.holo.iter().sum::<u32>() + t.anti.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[C64; D]) -> C64 {
        let xb: [C64; D] = std::array::from_fn(|k| x[k].conj());
        self.terms
            .iter()
            .map(|t| {
                let mut v = t.coeff;
                for k in 0..D {
                    if t.holo[k] > 0 {
                        v *= x[k].powu(t.holo[k]);
                    }
                    if t.anti[k] > 0 {
                        v *= xb[k].powu(t.anti[k]);
                    }
                }
                v
            })
            .sum()
    }

    /// `d/d conj(x_k)`.
    pub fn dbar(&self, k: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|t| t.anti[k] > 0)
            .map(|t| {
                let mut anti = t.anti;
                anti[k] -= 1;
                Monomial { coeff: t.coeff * t.anti[k] as f64, holo: t.holo, anti }
            })
            .collect();
        Self { terms }
    }
}

/// `S(s) = int_0^s 630 t^4 (1 - t)^4 dt`, rising from 0 to 1 with four
/// vanishing derivatives at both ends.
fn smoothstep(s: f64) -> f64 {
    s.powi(5) * (126.0 + s * (-420.0 + s * (540.0 + s * (-315.0 + 70.0 * s))))
}

fn smoothstep_derivative(s: f64) -> f64 {
    630.0 * (s * (1.0 - s)).powi(4)
}

/// `chi(q)` with `q = |x|^2`: equal to 1 for `|x| <= r_in`, to 0 for
/// `|x| >= r_out`, monotone and `C^4` in between.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub r_in: f64,
    pub r_out: f64,
}

impl Cutoff {
    pub fn new(r_in: f64, r_out: f64) -> Result<Self> {
        if !(r_in > 0.0 && r_in < r_out && r_out.is_finite()) {
            return Err(Error::InvalidCutoff { r_in, r_out });
        }
        Ok(Self { r_in, r_out })
    }

    fn s(&self, q: f64) -> f64 {
        let (a, b) = (self.r_in * self.r_in, self.r_out * self.r_out);
        (q - a) / (b - a)
    }

    pub fn value(&self, q: f64) -> f64 {
        let s = self.s(q);
        if s <= 0.0 {
            1.0
        } else if s >= 1.0 {
            0.0
        } else {
            1.0 - smoothstep(s)
        }
    }

    /// `d chi / d q`.
    pub fn derivative(&self, q: f64) -> f64 {
        let s = self.s(q);
        if s <= 0.0 || s >= 1.0 {
            return 0.0;
        }
        -smoothstep_derivative(s) / (self.r_out * self.r_out - self.r_in * self.r_in)
    }
}

/// `chi(|x|^2) * p(x)` with its antiholomorphic gradient.
#[derive(Clone, Debug)]
pub struct CutoffPoly<const D: usize> {
    pub cutoff: Cutoff,
    pub poly: Poly<D>,
    grad: [Poly<D>; D],
}

impl<const D: usize> CutoffPoly<D> {
    pub fn new(cutoff: Cutoff, poly: Poly<D>) -> Self {
        let grad = std::array::from_fn(|k| poly.dbar(k));
        Self { cutoff, poly, grad }
    }

    pub fn value(&self, x: &[C64; D]) -> C64 {
        let q: f64 = x.iter().map(|c| c.norm_sqr()).sum();
        let chi = self.cutoff.value(q);
        if chi == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            self.poly.eval(x) * chi
        }
    }

    /// `d/d conj(x_k)` for every `k`: `chi'(q) x_k p + chi dp/dconj(x_k)`.
    pub fn dbar(&self, x: &[C64; D]) -> [C64; D] {
        let q: f64 = x.iter().map(|c| c.norm_sqr()).sum();
        let chi = self.cutoff.value(q);
        if chi == 0.0 {
            return [C64::new(0.0, 0.0); D];
        }
        let dchi = self.cutoff.derivative(q);
        let p = if dchi != 0.0 { self.poly.eval(x) } else { C64::new(0.0, 0.0) };
        std::array::from_fn(|k| x[k] * (dchi * p) + self.grad[k].eval(x) * chi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn poly_eval_and_dbar() {
        // p = 2 x1 xbar2^2 + i xbar1
        let p = Poly::<2>::term(c(2.0, 0.0), [1, 0], [0, 2]).plus(Poly::term(c(0.0, 1.0), [0, 0], [1, 0]));
        let x = [c(0.3, -0.2), c(0.5, 0.1)];
        let want = 2.0 * x[0] * x[1].conj().powu(2) + c(0.0, 1.0) * x[0].conj();
        assert!((p.eval(&x) - want).norm() < 1e-15);
        let d2 = p.dbar(1);
        assert!((d2.eval(&x) - 4.0 * x[0] * x[1].conj()).norm() < 1e-15);
        let d1 = p.dbar(0);
        assert!((d1.eval(&x) - c(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(p.degree(), 3);
        assert!(Poly::<2>::zero().is_zero());
    }

    #[test]
    fn cutoff_profile() {
        let chi = Cutoff::new(0.3, 0.6).unwrap();
        assert_eq!(chi.value(0.0), 1.0);
        assert_eq!(chi.value(0.09), 1.0);
        assert_eq!(chi.value(0.36), 0.0);
        let mid = 0.5 * (0.09 + 0.36);
        assert!((chi.value(mid) - 0.5).abs() < 1e-14);
        let mut prev = 1.0;
        for i in 0..=100 {
            let q = 0.36 * i as f64 / 100.0;
            let v = chi.value(q);
            assert!(v <= prev + 1e-15);
            prev = v;
            let h = 1e-6;
            let fd = (chi.value(q + h) - chi.value(q - h)) / (2.0 * h);
            assert!((fd - chi.derivative(q)).abs() < 1e-5, "q={q} fd={fd} an={}", chi.derivative(q));
        }
        assert!(Cutoff::new(0.6, 0.3).is_err());
        assert!(Cutoff::new(0.0, 0.3).is_err());
    }

    #[test]
    fn cutoff_poly_gradient_matches_differences() {
        let f = CutoffPoly::new(
            Cutoff::new(0.2, 0.9).unwrap(),
            Poly::<3>::term(c(1.0, 0.5), [1, 0, 0], [0, 0, 1]).plus(Poly::constant(c(0.3, 0.0))),
        );
        let x = [c(0.2, 0.1), c(-0.3, 0.25), c(0.1, -0.4)];
        let g = f.dbar(&x);
        let h = 1e-5;
        for k in 0..3 {
            let shift = |d: C64| {
                let mut y = x;
                y[k] += d;
                f.value(&y)
            };
            let fd = ((shift(c(h, 0.0)) - shift(c(-h, 0.0))) + c(0.0, 1.0) * (shift(c(0.0, h)) - shift(c(0.0, -h))))
                / (4.0 * h);
            assert!((fd - g[k]).norm() < 1e-7, "k={k}");
        }
    }
}
