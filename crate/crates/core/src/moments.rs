//! Normally ordered moment accumulation.
//!
//! Ensemble averages of `α^m α⁺ⁿ` estimate `⟨â†ⁿ âᵐ⟩`, so every reported
//! quantity is a function of the means of a fixed set of sixteen monomials.
//! Sums are kept per recorded grid point and per batch; batch sums are never
//! mixed until a report is requested, which keeps the total independent of
//! how batches were scheduled.
//!
//! The first- and second-order monomials are also summed about a fixed
//! origin per grid point. Variances built from those do not cancel at the
//! scale of the mean, and a point distribution at the origin gives exact
//! zeros.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::{Error, PhasePoint, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(usize)]
pub enum Monomial {
    A,
    Ap,
    A2,
    Ap2,
    ApA,
    B,
    Bp,
    B2,
    Bp2,
    BpB,
    AB,
    ABp,
    ApB,
    ApBp,
    Ap2A2,
    Bp2B2,
}

pub const N_MONOMIALS: usize = 16;
/// Monomials `A ..= ApBp`, of order at most two.
pub const N_LOW_ORDER: usize = 14;

impl Monomial {
    pub const ALL: [Monomial; N_MONOMIALS] = [
        Monomial::A,
        Monomial::Ap,
        Monomial::A2,
        Monomial::Ap2,
        Monomial::ApA,
        Monomial::B,
        Monomial::Bp,
        Monomial::B2,
        Monomial::Bp2,
        Monomial::BpB,
        Monomial::AB,
        Monomial::ABp,
        Monomial::ApB,
        Monomial::ApBp,
        Monomial::Ap2A2,
        Monomial::Bp2B2,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

pub type MonomialValues = [Complex64; N_MONOMIALS];
pub type LowOrderValues = [Complex64; N_LOW_ORDER];

/// Evaluate every monomial on one sample.
#[inline]
pub fn monomials(p: &PhasePoint) -> MonomialValues {
    let (a, ap, b, bp) = (p.alpha, p.alpha_plus, p.beta, p.beta_plus);
    let (a2, ap2, b2, bp2) = (a * a, ap * ap, b * b, bp * bp);
    [
        a,
        ap,
        a2,
        ap2,
        ap * a,
        b,
        bp,
        b2,
        bp2,
        bp * b,
        a * b,
        a * bp,
        ap * b,
        ap * bp,
        ap2 * a2,
        bp2 * b2,
    ]
}

/// First- and second-order monomials of `p − origin`.
#[inline]
pub fn shifted_monomials(p: &PhasePoint, origin: &PhasePoint) -> LowOrderValues {
    let m = monomials(&(*p - *origin));
    let mut out = [Complex64::new(0.0, 0.0); N_LOW_ORDER];
    out.copy_from_slice(&m[..N_LOW_ORDER]);
    out
}

/// Mean values of the monomial set, i.e. normally ordered expectations.
///
/// Built either from an ensemble or, for the Fock reference, directly from
/// exact operator expectations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalMoments {
    pub values: MonomialValues,
    /// Means of the low-order monomials about `origin`.
    pub shifted: LowOrderValues,
    pub origin: PhasePoint,
    pub count: u64,
}

impl NormalMoments {
    pub fn exact(values: MonomialValues) -> Self {
        let mut shifted = [Complex64::new(0.0, 0.0); N_LOW_ORDER];
        shifted.copy_from_slice(&values[..N_LOW_ORDER]);
        Self {
            values,
            shifted,
            origin: PhasePoint::ZERO,
            count: u64::MAX,
        }
    }

    #[inline]
    pub fn get(&self, m: Monomial) -> Complex64 {
        self.values[m.index()]
    }

    /// Mean of `m` evaluated on `p − origin`; `m` must be of order two or less.
    #[inline]
    pub fn shifted(&self, m: Monomial) -> Complex64 {
        self.shifted[m.index()]
    }
}

/// Sums for one batch across all recorded grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchSums {
    sums: Vec<MonomialValues>,
    shifted: Vec<LowOrderValues>,
    origins: Vec<PhasePoint>,
    counts: Vec<u64>,
}

impl BatchSums {
    pub fn new(n_grid: usize) -> Self {
        Self::with_origins(vec![PhasePoint::ZERO; n_grid])
    }

    /// One origin per grid point for the shifted sums.
    pub fn with_origins(origins: Vec<PhasePoint>) -> Self {
        let n_grid = origins.len();
        Self {
            sums: vec![[Complex64::new(0.0, 0.0); N_MONOMIALS]; n_grid],
            shifted: vec![[Complex64::new(0.0, 0.0); N_LOW_ORDER]; n_grid],
            origins,
            counts: vec![0; n_grid],
        }
    }

    pub fn n_grid(&self) -> usize {
        self.sums.len()
    }

    pub fn accumulate(&mut self, point: &PhasePoint, grid_index: usize) -> Result<()> {
        if grid_index >= self.sums.len() {
            return Err(Error::IndexOutOfRange);
        }
        if !point.is_finite() {
            return Err(Error::NonFinite);
        }
        let m = monomials(point);
        for (s, v) in self.sums[grid_index].iter_mut().zip(m.iter()) {
            *s += v;
        }
        let d = shifted_monomials(point, &self.origins[grid_index]);
        for (s, v) in self.shifted[grid_index].iter_mut().zip(d.iter()) {
            *s += v;
        }
        self.counts[grid_index] += 1;
        Ok(())
    }

    pub fn merge(&mut self, other: &BatchSums) -> Result<()> {
        if other.n_grid() != self.n_grid() || other.origins != self.origins {
            return Err(Error::IndexOutOfRange);
        }
        for (mine, theirs) in self.sums.iter_mut().zip(&other.sums) {
            for (s, v) in mine.iter_mut().zip(theirs.iter()) {
                *s += v;
            }
        }
        for (mine, theirs) in self.shifted.iter_mut().zip(&other.shifted) {
            for (s, v) in mine.iter_mut().zip(theirs.iter()) {
                *s += v;
            }
        }
        for (c, o) in self.counts.iter_mut().zip(&other.counts) {
            *c += o;
        }
        Ok(())
    }

    pub fn count(&self, grid_index: usize) -> u64 {
        self.counts[grid_index]
    }

    pub fn sums(&self, grid_index: usize) -> &MonomialValues {
        &self.sums[grid_index]
    }

    pub fn shifted_sums(&self, grid_index: usize) -> &LowOrderValues {
        &self.shifted[grid_index]
    }

    pub fn origin(&self, grid_index: usize) -> PhasePoint {
        self.origins[grid_index]
    }

    pub fn means(&self, grid_index: usize) -> NormalMoments {
        let n = self.counts[grid_index];
        let inv = 1.0 / n as f64;
        NormalMoments {
            values: self.sums[grid_index].map(|s| s * inv),
            shifted: self.shifted[grid_index].map(|s| s * inv),
            origin: self.origins[grid_index],
            count: n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentAccumulator {
    batches: Vec<BatchSums>,
}

impl MomentAccumulator {
    pub const DEFAULT_BATCHES: usize = 100;

    pub fn new(n_grid: usize, n_batches: usize) -> Self {
        Self {
            batches: (0..n_batches).map(|_| BatchSums::new(n_grid)).collect(),
        }
    }

    pub fn with_origins(origins: Vec<PhasePoint>, n_batches: usize) -> Self {
        Self {
            batches: (0..n_batches)
                .map(|_| BatchSums::with_origins(origins.clone()))
                .collect(),
        }
    }

    /// Assemble from per-batch sums; batch `i` of the result is `batches[i]`.
    pub fn from_batches(batches: Vec<BatchSums>) -> Result<Self> {
        if let Some(first) = batches.first() {
            if batches.iter().any(|b| b.origins != first.origins) {
                return Err(Error::IndexOutOfRange);
            }
        }
        Ok(Self { batches })
    }

    pub fn n_batches(&self) -> usize {
        self.batches.len()
    }

    pub fn n_grid(&self) -> usize {
        self.batches.first().map_or(0, BatchSums::n_grid)
    }

    pub fn batch(&self, index: usize) -> &BatchSums {
        &self.batches[index]
    }

    pub fn accumulate(
        &mut self,
        point: &PhasePoint,
        grid_index: usize,
        batch_index: usize,
    ) -> Result<()> {
        self.batches
            .get_mut(batch_index)
            .ok_or(Error::IndexOutOfRange)?
            .accumulate(point, grid_index)
    }

    /// Batch-wise addition of another accumulator with the same layout.
    pub fn merge(&mut self, other: &MomentAccumulator) -> Result<()> {
        if other.n_batches() != self.n_batches() {
            return Err(Error::IndexOutOfRange);
        }
        for (mine, theirs) in self.batches.iter_mut().zip(&other.batches) {
            mine.merge(theirs)?;
        }
        Ok(())
    }

    pub fn count(&self, grid_index: usize) -> u64 {
        self.batches.iter().map(|b| b.count(grid_index)).sum()
    }

    /// Means over all batches, summed in batch order.
    pub fn means(&self, grid_index: usize) -> NormalMoments {
        let mut total = [Complex64::new(0.0, 0.0); N_MONOMIALS];
        let mut shifted = [Complex64::new(0.0, 0.0); N_LOW_ORDER];
        let mut n = 0u64;
        for b in &self.batches {
            for (t, s) in total.iter_mut().zip(b.sums(grid_index).iter()) {
                *t += s;
            }
            for (t, s) in shifted.iter_mut().zip(b.shifted_sums(grid_index).iter()) {
                *t += s;
            }
            n += b.count(grid_index);
        }
        let inv = 1.0 / n as f64;
        NormalMoments {
            values: total.map(|s| s * inv),
            shifted: shifted.map(|s| s * inv),
            origin: self
                .batches
                .first()
                .map_or(PhasePoint::ZERO, |b| b.origin(grid_index)),
            count: n,
        }
    }

    pub fn batch_means(&self, grid_index: usize, batch_index: usize) -> NormalMoments {
        self.batches[batch_index].means(grid_index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn vacuum_adds_only_counts() {
        let mut acc = MomentAccumulator::new(2, 3);
        acc.accumulate(&PhasePoint::ZERO, 1, 2).unwrap();
        assert_eq!(acc.count(1), 1);
        assert_eq!(acc.count(0), 0);
        assert!(acc.batch(2).sums(1).iter().all(|v| *v == c(0.0)));
    }

    #[test]
    fn hand_evaluated_monomials() {
        let mut acc = MomentAccumulator::new(1, 1);
        acc.accumulate(&PhasePoint::pump(c(2.0)), 0, 0).unwrap();
        let s = acc.batch(0).sums(0);
        assert_eq!(s[Monomial::ApA.index()], c(4.0));
        assert_eq!(s[Monomial::Ap2A2.index()], c(16.0));
        assert_eq!(s[Monomial::AB.index()], c(0.0));
    }

    #[test]
    fn rejects_non_finite_and_bad_indices() {
        let mut acc = MomentAccumulator::new(1, 1);
        let bad = PhasePoint::pump(Complex64::new(f64::NAN, 0.0));
        assert_eq!(acc.accumulate(&bad, 0, 0), Err(Error::NonFinite));
        assert_eq!(
            acc.accumulate(&PhasePoint::ZERO, 1, 0),
            Err(Error::IndexOutOfRange)
        );
        assert_eq!(
            acc.accumulate(&PhasePoint::ZERO, 0, 1),
            Err(Error::IndexOutOfRange)
        );
    }

    #[test]
    fn merging_halves_equals_serial() {
        // Integer-valued samples so both orders of summation are exact.
        let pts: Vec<PhasePoint> = (0..1000)
            .map(|i| {
                let x = (i % 17) as f64 - 8.0;
                PhasePoint::new(c(x), c(x + 1.0), Complex64::new(0.0, x), c(2.0))
            })
            .collect();
        let mut serial = MomentAccumulator::new(1, 4);
        let mut first = MomentAccumulator::new(1, 4);
        let mut second = MomentAccumulator::new(1, 4);
        for (i, p) in pts.iter().enumerate() {
            serial.accumulate(p, 0, i % 4).unwrap();
            let half = if i < 500 { &mut first } else { &mut second };
            half.accumulate(p, 0, i % 4).unwrap();
        }
        first.merge(&second).unwrap();
        assert_eq!(first, serial);
        assert_eq!(first.count(0), 1000);
    }

    #[test]
    fn point_mass_at_origin_has_zero_shifted_moments() {
        let p = PhasePoint::new(
            Complex64::new(100.0, 0.3),
            Complex64::new(100.0, -0.3),
            Complex64::new(-7.1, 0.0),
            Complex64::new(-7.1, 0.0),
        );
        let mut acc = MomentAccumulator::with_origins(vec![p], 2);
        for i in 0..10 {
            acc.accumulate(&p, 0, i % 2).unwrap();
        }
        let m = acc.means(0);
        assert!(m.shifted.iter().all(|v| *v == c(0.0)));
        assert_eq!(m.origin, p);
        assert!((m.get(Monomial::A) - p.alpha).norm() < 1e-12);
    }

    #[test]
    fn shifted_sums_agree_with_raw_sums() {
        let origin = PhasePoint::new(c(1.5), c(-0.5), Complex64::new(0.0, 2.0), c(3.0));
        let mut acc = MomentAccumulator::with_origins(vec![origin], 1);
        let pts: Vec<PhasePoint> = (0..50)
            .map(|i| {
                let x = (i % 7) as f64 - 3.0;
                PhasePoint::new(c(x), Complex64::new(0.5, x), c(x * x), c(1.0 - x))
            })
            .collect();
        for p in &pts {
            acc.accumulate(p, 0, 0).unwrap();
        }
        let m = acc.means(0);
        let o = origin;
        let checks = [
            (Monomial::A, m.get(Monomial::A) - o.alpha),
            (
                Monomial::ApB,
                m.get(Monomial::ApB)
                    - o.alpha_plus * m.get(Monomial::B)
                    - o.beta * m.get(Monomial::Ap)
                    + o.alpha_plus * o.beta,
            ),
            (
                Monomial::A2,
                m.get(Monomial::A2) - m.get(Monomial::A) * o.alpha * 2.0 + o.alpha * o.alpha,
            ),
        ];
        for (k, want) in checks {
            assert!((m.shifted(k) - want).norm() < 1e-12, "{k:?}");
        }
    }

    #[test]
    fn different_origins_do_not_merge() {
        let mut a = MomentAccumulator::new(1, 1);
        let b = MomentAccumulator::with_origins(vec![PhasePoint::pump(c(1.0))], 1);
        assert_eq!(a.merge(&b), Err(Error::IndexOutOfRange));
    }

    proptest! {
        #[test]
        fn merge_is_associative_on_integer_samples(
            xs in proptest::collection::vec((-50i32..50, -50i32..50, 0usize..3), 1..60),
            split in 0usize..60,
        ) {
            let split = split.min(xs.len());
            let pt = |a: i32, b: i32| PhasePoint::new(
                c(a as f64), Complex64::new(0.0, b as f64), c(b as f64), c(a as f64),
            );
            let mut serial = MomentAccumulator::new(1, 3);
            let mut left = MomentAccumulator::new(1, 3);
            let mut right = MomentAccumulator::new(1, 3);
            for (i, &(a, b, batch)) in xs.iter().enumerate() {
                serial.accumulate(&pt(a, b), 0, batch).unwrap();
                let side = if i < split { &mut left } else { &mut right };
                side.accumulate(&pt(a, b), 0, batch).unwrap();
            }
            left.merge(&right).unwrap();
            prop_assert_eq!(left, serial);
        }
    }
}
