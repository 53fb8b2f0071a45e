use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;

/// One positive-P sample: the fundamental pair `(α, α⁺)` and the harmonic
/// pair `(β, β⁺)`. The two members of a pair are independent complex numbers,
/// conjugate only on average.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhasePoint {
    pub alpha: Complex64,
    pub alpha_plus: Complex64,
    pub beta: Complex64,
    pub beta_plus: Complex64,
}

impl PhasePoint {
    pub const ZERO: PhasePoint = PhasePoint {
        alpha: Complex64::new(0.0, 0.0),
        alpha_plus: Complex64::new(0.0, 0.0),
        beta: Complex64::new(0.0, 0.0),
        beta_plus: Complex64::new(0.0, 0.0),
    };

    pub fn new(
        alpha: Complex64,
        alpha_plus: Complex64,
        beta: Complex64,
        beta_plus: Complex64,
    ) -> Self {
        Self {
            alpha,
            alpha_plus,
            beta,
            beta_plus,
        }
    }

    /// Fundamental in `alpha0`, harmonic in vacuum.
    pub fn pump(alpha0: Complex64) -> Self {
        Self {
            alpha: alpha0,
            alpha_plus: alpha0.conj(),
            ..Self::ZERO
        }
    }

    pub fn components(&self) -> [Complex64; 4] {
        [self.alpha, self.alpha_plus, self.beta, self.beta_plus]
    }

    pub fn is_finite(&self) -> bool {
        self.components()
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest squared component modulus over the four variables.
    #[inline]
    pub fn max_norm_sqr(&self) -> f64 {
        self.components()
            .iter()
            .map(|c| c.norm_sqr())
            .fold(0.0, f64::max)
    }

    /// `α⁺α + 2β⁺β`, the sample of the conserved photon flux.
    pub fn flux(&self) -> Complex64 {
        self.alpha_plus * self.alpha + self.beta_plus * self.beta * 2.0
    }
}

impl Add for PhasePoint {
    type Output = PhasePoint;
    #[inline]
    fn add(self, o: PhasePoint) -> PhasePoint {
        PhasePoint::new(
            self.alpha + o.alpha,
            self.alpha_plus + o.alpha_plus,
            self.beta + o.beta,
            self.beta_plus + o.beta_plus,
        )
    }
}

impl Sub for PhasePoint {
    type Output = PhasePoint;
    #[inline]
    fn sub(self, o: PhasePoint) -> PhasePoint {
        PhasePoint::new(
            self.alpha - o.alpha,
            self.alpha_plus - o.alpha_plus,
            self.beta - o.beta,
            self.beta_plus - o.beta_plus,
        )
    }
}

impl Mul<f64> for PhasePoint {
    type Output = PhasePoint;
    #[inline]
    fn mul(self, s: f64) -> PhasePoint {
        PhasePoint::new(
            self.alpha * s,
            self.alpha_plus * s,
            self.beta * s,
            self.beta_plus * s,
        )
    }
}

/// Principal square root, branch cut on the negative real axis.
///
/// Agrees with `Complex64::sqrt` off the cut but avoids the polar round trip,
/// which dominates the stepper otherwise.
#[inline]
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    if x == 0.0 && y == 0.0 {
        return Complex64::new(0.0, y);
    }
    // No overflow concern: trajectories are cut off far below 1e150.
    let t = libm::sqrt((libm::sqrt(x * x + y * y) + x.abs()) * 0.5);
    if x >= 0.0 {
        Complex64::new(t, y / (2.0 * t))
    } else {
        Complex64::new(y.abs() / (2.0 * t), t.copysign(y))
    }
}
