//! Seeded samplers on balls, polydisks and the surfaces.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Covering, Point2, Point3, C64};

/// Uniform point of the ball of radius `r` in `C^2` (rejection from the cube).
pub fn uniform_ball<R: Rng + ?Sized>(rng: &mut R, r: f64) -> Point2 {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let s: f64 = v.iter().map(|c| c * c).sum();
        if s <= 1.0 {
            return Point2::from_reals(v.map(|c| c * r));
        }
    }
}

/// Uniform point of the disk of radius `r` in `C`.
pub fn uniform_disk<R: Rng + ?Sized>(rng: &mut R, r: f64) -> C64 {
    loop {
        let (a, b): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if a * a + b * b <= 1.0 {
            return C64::new(a * r, b * r);
        }
    }
}

/// Uniform point of the polydisk `|z1|, |z2| <= r`.
pub fn uniform_polydisk<R: Rng + ?Sized>(rng: &mut R, r: f64) -> Point2 {
    Point2::new(uniform_disk(rng, r), uniform_disk(rng, r))
}

/// Uniform point of the unit sphere in `C^2`.
pub fn unit_direction<R: Rng + ?Sized>(rng: &mut R) -> Point2 {
    loop {
        let z = uniform_ball(rng, 1.0);
        let n = z.norm();
        if n > 1e-3 {
            return z * (1.0 / n);
        }
    }
}

/// Surface point `F(z)` for `z` uniform in `B_R`, with its plane preimage.
pub fn surface_point<R: Rng + ?Sized>(rng: &mut R, covering: &Covering, radius: f64) -> (Point2, Point3) {
    let z = uniform_ball(rng, radius);
    (z, covering.apply(&z))
}

/// Independent generator for chunk `chunk` of a run seeded with `seed`, so
/// that chunked and serial runs draw the same streams.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}
