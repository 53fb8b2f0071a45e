//! Input pump states in the doubled phase space.
//!
//! A coherent state is a point distribution `α = α0, α⁺ = α0*`. A displaced
//! squeezed state is sampled as a Gaussian cloud around that point,
//!
//! ```text
//! δα  = λ1·n1 + i·λ2·n2
//! δα⁺ = λ1·n1 − i·λ2·n2        n1, n2 ~ N(0, 1) independent
//! ```
//!
//! with complex `λ1, λ2` fixed by the normally ordered second moments
//! `⟨δα δα⁺⟩ = sinh²r` and `⟨δα²⟩ = ⟨δα⁺²⟩ = ∓ sinh r cosh r`
//! (upper sign: X squeezed). One of the two `λ` is purely imaginary, which
//! the positive-P representation permits because `α` and `α⁺` are independent
//! variables.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::Rng;

use crate::rng::{standard_normal, TrajectoryStreams};
use crate::{Error, PhasePoint, Result};

/// Which pump quadrature carries the reduced noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SqueezeQuadrature {
    /// Squeeze angle 0: `V(X) = e^{-2r}`.
    X,
    /// Squeeze angle π/2: `V(Y) = e^{-2r}`.
    Y,
}

impl SqueezeQuadrature {
    pub fn angle(self) -> f64 {
        match self {
            SqueezeQuadrature::X => 0.0,
            SqueezeQuadrature::Y => FRAC_PI_2,
        }
    }

    pub fn from_angle(phi: f64) -> Result<Self> {
        const TOL: f64 = 1e-12;
        if phi.abs() < TOL {
            Ok(SqueezeQuadrature::X)
        } else if (phi - FRAC_PI_2).abs() < TOL {
            Ok(SqueezeQuadrature::Y)
        } else {
            Err(Error::UnsupportedSqueezeAngle(phi))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpSpec {
    pub alpha0: Complex64,
    pub r: f64,
    pub quadrature: SqueezeQuadrature,
}

impl PumpSpec {
    pub fn new(alpha0: Complex64, r: f64, quadrature: SqueezeQuadrature) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::NegativeSqueezing(r));
        }
        Ok(Self {
            alpha0,
            r,
            quadrature,
        })
    }

    pub fn from_angle(alpha0: Complex64, r: f64, phi: f64) -> Result<Self> {
        Self::new(alpha0, r, SqueezeQuadrature::from_angle(phi)?)
    }

    pub fn coherent(alpha0: Complex64) -> Self {
        Self {
            alpha0,
            r: 0.0,
            quadrature: SqueezeQuadrature::X,
        }
    }

    pub fn is_coherent(&self) -> bool {
        self.r == 0.0
    }

    /// Squeeze-operator argument `ε = r·e^{2iφ}`.
    pub fn epsilon(&self) -> Complex64 {
        Complex64::from_polar(self.r, 2.0 * self.quadrature.angle())
    }

    /// `|α0|² + sinh²r`.
    pub fn mean_photon_number(&self) -> f64 {
        let s = libm::sinh(self.r);
        self.alpha0.norm_sqr() + s * s
    }

    fn lambdas(&self) -> (Complex64, Complex64) {
        let s = libm::sinh(self.r);
        let small = libm::sqrt(s * libm::exp(-self.r) * 0.5);
        let large = libm::sqrt(s * libm::exp(self.r) * 0.5);
        match self.quadrature {
            SqueezeQuadrature::X => (Complex64::new(0.0, small), Complex64::new(large, 0.0)),
            SqueezeQuadrature::Y => (Complex64::new(large, 0.0), Complex64::new(0.0, small)),
        }
    }

    /// Draw one input point. Coherent pumps consume no random numbers.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> PhasePoint {
        let mut p = PhasePoint::pump(self.alpha0);
        if self.is_coherent() {
            return p;
        }
        let (l1, l2) = self.lambdas();
        let n1 = standard_normal(rng);
        let n2 = standard_normal(rng);
        let even = l1 * n1;
        let odd = Complex64::i() * l2 * n2;
        p.alpha += even + odd;
        p.alpha_plus += even - odd;
        p
    }
}

/// Analytic moments of the input pump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputMoments {
    pub n: f64,
    pub vx: f64,
    pub vy: f64,
    pub vn: f64,
    /// `None` for the vacuum, where `g²(0)` is undefined.
    pub g2: Option<f64>,
}

pub fn sample_coherent(alpha0: Complex64, count: usize) -> Vec<PhasePoint> {
    alloc::vec![PhasePoint::pump(alpha0); count]
}

pub fn sample_squeezed<R: Rng + ?Sized>(
    spec: &PumpSpec,
    count: usize,
    rng: &mut R,
) -> Vec<PhasePoint> {
    (0..count).map(|_| spec.sample_point(rng)).collect()
}

/// Partitioned sampling: point `i` is drawn from trajectory stream `i`, so any
/// split of `range` across workers reproduces the same points.
pub fn sample_indexed(
    spec: &PumpSpec,
    streams: &TrajectoryStreams,
    range: core::ops::Range<u64>,
) -> Vec<PhasePoint> {
    range
        .map(|i| spec.sample_point(&mut streams.stream(i)))
        .collect()
}

pub fn input_moments(spec: &PumpSpec) -> InputMoments {
    let r = spec.r;
    let (s, c) = (libm::sinh(r), libm::cosh(r));
    let n = spec.mean_photon_number();
    let (squeezed, anti) = (libm::exp(-2.0 * r), libm::exp(2.0 * r));
    let (vx, vy) = match spec.quadrature {
        SqueezeQuadrature::X => (squeezed, anti),
        SqueezeQuadrature::Y => (anti, squeezed),
    };
    // Displacement noise along the coherent amplitude direction θ, reduced
    // to |α0|²e^{∓2r} when θ = 0:
    // |α0|²(cosh 2r − sinh 2r·cos(2θ − 2φ)) + 2 sinh²r cosh²r.
    let theta = spec.alpha0.arg();
    let psi = 2.0 * spec.quadrature.angle();
    let vn = spec.alpha0.norm_sqr()
        * (libm::cosh(2.0 * r) - libm::sinh(2.0 * r) * libm::cos(2.0 * theta - psi))
        + 2.0 * s * s * c * c;
    let g2 = (n > 0.0).then(|| 1.0 + (vn - n) / (n * n));
    InputMoments { n, vx, vy, vn, g2 }
}
