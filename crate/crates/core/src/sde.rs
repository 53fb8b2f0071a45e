//! Propagation of one positive-P trajectory through the χ⁽²⁾ medium.
//!
//! ```text
//! dα/dz  = κ α⁺ β  + sqrt(κ β)  η1(z)
//! dα⁺/dz = κ α β⁺  + sqrt(κ β⁺) η2(z)
//! dβ/dz  = −κ/2 α²
//! dβ⁺/dz = −κ/2 α⁺²
//! ```
//!
//! with `η1, η2` independent real white noises. The noise amplitudes depend
//! only on the harmonic variables, which are themselves noise free, so the Itô
//! and Stratonovich readings coincide and the midpoint scheme integrates the
//! same equations as Euler-Maruyama.

use num_complex::Complex64;
use rand::Rng;

use crate::phase::principal_sqrt;
use crate::rng::standard_normal;
use crate::{Error, PhasePoint, PumpSpec, Result};

/// Components beyond this modulus count as a diverged trajectory.
pub const OVERFLOW_GUARD: f64 = 1e12;
/// Fixed-point sweeps of the semi-implicit midpoint scheme.
pub const MIDPOINT_ITERATIONS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Euler,
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdeConfig {
    pub kappa: f64,
    pub z_max: f64,
    pub n_steps: usize,
    pub scheme: Scheme,
    /// Observables are recorded every `record_stride` steps.
    pub record_stride: usize,
    /// `false` integrates the noiseless (classical) equations.
    pub noise: bool,
}

impl SdeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(Error::InvalidConfig("kappa must be positive"));
        }
        if !(self.z_max.is_finite() && self.z_max > 0.0) {
            return Err(Error::InvalidConfig("medium length must be positive"));
        }
        if self.n_steps == 0 || self.record_stride == 0 {
            return Err(Error::InvalidConfig(
                "step count and record stride must be >= 1",
            ));
        }
        if !self.n_steps.is_multiple_of(self.record_stride) {
            return Err(Error::InvalidConfig(
                "record stride must divide the step count so z_max is recorded",
            ));
        }
        Ok(())
    }

    pub fn dz(&self) -> f64 {
        self.z_max / self.n_steps as f64
    }

    pub fn n_records(&self) -> usize {
        self.n_steps / self.record_stride + 1
    }

    /// Position of recorded grid point `k`.
    pub fn record_z(&self, k: usize) -> f64 {
        if k * self.record_stride == self.n_steps {
            self.z_max
        } else {
            (k * self.record_stride) as f64 * self.dz()
        }
    }
}

/// Maps medium position onto `ζ = κ z sqrt((|α0|² + sinh²r)/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaScale {
    pub scale: f64,
}

impl ZetaScale {
    pub fn new(kappa: f64, pump: &PumpSpec) -> Self {
        Self {
            scale: kappa * libm::sqrt(pump.mean_photon_number() * 0.5),
        }
    }

    pub fn zeta(&self, z: f64) -> f64 {
        self.scale * z
    }

    pub fn z(&self, zeta: f64) -> f64 {
        zeta / self.scale
    }
}

/// Deterministic part of the equations of motion.
#[inline]
pub fn drift(p: &PhasePoint, kappa: f64) -> PhasePoint {
    PhasePoint {
        alpha: p.alpha_plus * p.beta * kappa,
        alpha_plus: p.alpha * p.beta_plus * kappa,
        beta: p.alpha * p.alpha * (-0.5 * kappa),
        beta_plus: p.alpha_plus * p.alpha_plus * (-0.5 * kappa),
    }
}

/// Noise added for Wiener increments `w1, w2` (each `η·sqrt(dz)`).
#[inline(always)]
fn diffusion(p: &PhasePoint, kappa: f64, w1: f64, w2: f64) -> (Complex64, Complex64) {
    (
        principal_sqrt(p.beta * kappa) * w1,
        principal_sqrt(p.beta_plus * kappa) * w2,
    )
}

/// One stochastic increment over `dz`. Only `α` and `α⁺` receive noise.
pub fn noise_increment<R: Rng + ?Sized>(
    p: &PhasePoint,
    kappa: f64,
    dz: f64,
    rng: &mut R,
) -> PhasePoint {
    let sq = libm::sqrt(dz);
    let w1 = standard_normal(rng) * sq;
    let w2 = standard_normal(rng) * sq;
    let (da, dap) = diffusion(p, kappa, w1, w2);
    PhasePoint {
        alpha: da,
        alpha_plus: dap,
        ..PhasePoint::ZERO
    }
}

fn check(p: PhasePoint) -> Result<PhasePoint> {
    let size = p.max_norm_sqr();
    if size.is_nan() || size > OVERFLOW_GUARD * OVERFLOW_GUARD {
        return Err(Error::Divergence {
            trajectory: None,
            z: f64::NAN,
        });
    }
    Ok(p)
}

/// Advance one step of length `cfg.dz()`.
pub fn step<R: Rng + ?Sized>(p: &PhasePoint, cfg: &SdeConfig, rng: &mut R) -> Result<PhasePoint> {
    let dz = cfg.dz();
    let (w1, w2) = if cfg.noise {
        let sq = libm::sqrt(dz);
        (standard_normal(rng) * sq, standard_normal(rng) * sq)
    } else {
        (0.0, 0.0)
    };
    check(advance(p, cfg.kappa, dz, cfg.scheme, cfg.noise, w1, w2))
}

/// Noise of one step with the amplitudes taken at `p`.
#[inline(always)]
fn noise_at(p: &PhasePoint, kappa: f64, w1: f64, w2: f64) -> PhasePoint {
    let (alpha, alpha_plus) = diffusion(p, kappa, w1, w2);
    PhasePoint {
        alpha,
        alpha_plus,
        ..PhasePoint::ZERO
    }
}

#[inline]
fn advance(
    p: &PhasePoint,
    kappa: f64,
    dz: f64,
    scheme: Scheme,
    noise: bool,
    w1: f64,
    w2: f64,
) -> PhasePoint {
    match scheme {
        Scheme::Euler => {
            let mut next = *p + drift(p, kappa) * dz;
            if noise {
                next = next + noise_at(p, kappa, w1, w2);
            }
            next
        }
        Scheme::Midpoint => {
            // The noise amplitudes sit at a noise-free predictor of the
            // midpoint. Iterating them with the drift correlates the root with
            // w1 through the midpoint β and biases the means at O(dz).
            let noise_inc = if noise {
                let pred = *p + drift(p, kappa) * (0.5 * dz);
                noise_at(&pred, kappa, w1, w2)
            } else {
                PhasePoint::ZERO
            };
            let mut mid = *p;
            for _ in 0..MIDPOINT_ITERATIONS {
                mid = *p + (drift(&mid, kappa) * dz + noise_inc) * 0.5;
            }
            mid * 2.0 - *p
        }
    }
}

/// Integrate from `z = 0` to `cfg.z_max`, calling `observer(k, z, point)` at
/// every recorded grid point `k` (including both ends).
pub fn integrate_trajectory<R, F>(
    p0: PhasePoint,
    cfg: &SdeConfig,
    rng: &mut R,
    mut observer: F,
) -> Result<PhasePoint>
where
    R: Rng + ?Sized,
    F: FnMut(usize, f64, &PhasePoint) -> Result<()>,
{
    cfg.validate()?;
    let mut p = p0;
    observer(0, 0.0, &p)?;
    for n in 1..=cfg.n_steps {
        p = step(&p, cfg, rng).map_err(|e| match e {
            Error::Divergence { trajectory, .. } => Error::Divergence {
                trajectory,
                z: n as f64 * cfg.dz(),
            },
            other => other,
        })?;
        if n % cfg.record_stride == 0 {
            let k = n / cfg.record_stride;
            observer(k, cfg.record_z(k), &p)?;
        }
    }
    Ok(p)
}

/// Noiseless solution for a real coherent pump and empty harmonic:
/// `α = α0 sech ζ`, `β = −(α0/√2) tanh ζ` with `ζ = κ z α0/√2`.
pub fn classical_solution(alpha0: f64, zeta: f64) -> (f64, f64) {
    (
        alpha0 / libm::cosh(zeta),
        -alpha0 * core::f64::consts::FRAC_1_SQRT_2 * libm::tanh(zeta),
    )
}
