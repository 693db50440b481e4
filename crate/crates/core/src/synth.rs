//! Correlated standard Gaussian pairs and their closed-form mutual information.
//!
//! Streams come from ChaCha8 seeded through `SeedableRng::seed_from_u64`,
//! which is specified independently of platform and word size. Uniforms take
//! the top 53 bits of each `u64` draw and normals use the Box–Muller cosine
//! branch, one normal per pair of uniforms. Together these fix every sample
//! bit-for-bit given the seed.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::SampleMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec {
    rho: f64,
    samples: usize,
    seed: u64,
}

impl GaussianSpec {
    pub fn new(rho: f64, samples: usize, seed: u64) -> Result<Self> {
        check_rho(rho)?;
        if samples < 2 {
            return Err(Error::TooFewRows(samples));
        }
        Ok(GaussianSpec { rho, samples, seed })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho.is_finite() && rho.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidRho(rho))
    }
}

/// Deterministic standard normal stream.
pub struct NormalStream {
    rng: ChaCha8Rng,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        NormalStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform on (0, 1].
    fn open_uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on [0, 1).
    fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_normal(&mut self) -> f64 {
        let r = (-2.0 * self.open_uniform().ln()).sqrt();
        r * (std::f64::consts::TAU * self.uniform()).cos()
    }
}

/// Draws `samples` pairs (X, ρX + √(1−ρ²) Z) with X, Z independent N(0, 1).
pub fn gaussian_sample(spec: &GaussianSpec) -> Result<SampleMatrix> {
    check_rho(spec.rho)?;
    let mut stream = NormalStream::new(spec.seed);
    let scale = (1.0 - spec.rho * spec.rho).sqrt();
    let mut values = Vec::with_capacity(2 * spec.samples);
    for _ in 0..spec.samples {
        let x = stream.next_normal();
        let z = stream.next_normal();
        values.push(x);
        values.push(spec.rho * x + scale * z);
    }
    SampleMatrix::new(values, spec.samples, 2)
}

/// −½ ln(1 − ρ²), the mutual information of a bivariate normal with
/// correlation ρ.
pub fn gaussian_mi_analytic(rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(-0.5 * (-rho * rho).ln_1p())
}
