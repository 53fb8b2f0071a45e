//! Correlations derived from normally ordered moments.
//!
//! Quadratures are `X = a + a†`, `Y = −i(a − a†)`, so vacuum and coherent
//! states have unit variance. Every scalar is computed as a complex number from
//! the moment means and its real part reported; the imaginary parts of the
//! Hermitian combinations are kept as a consistency diagnostic.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::moments::{MomentAccumulator, Monomial as M, NormalMoments};
use crate::{Error, Result};

/// Same-frequency variances below this cannot be used to infer from.
pub const DEGENERATE_VARIANCE: f64 = 1e-12;
/// `g²(0)` is omitted below this mean photon number.
pub const MIN_PHOTONS_FOR_G2: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadStats {
    pub mean_xa: f64,
    pub mean_ya: f64,
    pub mean_xb: f64,
    pub mean_yb: f64,
    pub vxa: f64,
    pub vya: f64,
    pub vxb: f64,
    pub vyb: f64,
    /// `V(X_a, X_b)`.
    pub vxaxb: f64,
    /// `V(Y_a, Y_b)`.
    pub vyayb: f64,
    /// Imaginary parts of `vxa, vya, vxb, vyb, vxaxb, vyayb`, in that order.
    pub imag: [f64; 6],
}

fn require_count(m: &NormalMoments) -> Result<()> {
    if m.count < 2 {
        return Err(Error::InsufficientCount {
            needed: 2,
            have: m.count,
        });
    }
    Ok(())
}

pub fn quad_stats(m: &NormalMoments) -> Result<QuadStats> {
    require_count(m)?;
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    let d = |k: M| m.shifted(k);
    let (a, ap, b, bp) = (m.get(M::A), m.get(M::Ap), m.get(M::B), m.get(M::Bp));

    // Variances are shift invariant, so they use the moments about the origin.
    let sum_a = d(M::A) + d(M::Ap);
    let dif_a = d(M::A) - d(M::Ap);
    let sum_b = d(M::B) + d(M::Bp);
    let dif_b = d(M::B) - d(M::Bp);

    let vxa = one + d(M::A2) + d(M::Ap2) + d(M::ApA) * 2.0 - sum_a * sum_a;
    let vya = one - d(M::A2) - d(M::Ap2) + d(M::ApA) * 2.0 + dif_a * dif_a;
    let vxb = one + d(M::B2) + d(M::Bp2) + d(M::BpB) * 2.0 - sum_b * sum_b;
    let vyb = one - d(M::B2) - d(M::Bp2) + d(M::BpB) * 2.0 + dif_b * dif_b;
    // Different modes commute, so no ordering correction in the cross terms.
    let vxaxb = d(M::AB) + d(M::ABp) + d(M::ApB) + d(M::ApBp) - sum_a * sum_b;
    let vyayb = -(d(M::AB) - d(M::ABp) - d(M::ApB) + d(M::ApBp) - dif_a * dif_b);

    Ok(QuadStats {
        mean_xa: (a + ap).re,
        mean_ya: (-i * (a - ap)).re,
        mean_xb: (b + bp).re,
        mean_yb: (-i * (b - bp)).re,
        vxa: vxa.re,
        vya: vya.re,
        vxb: vxb.re,
        vyb: vyb.re,
        vxaxb: vxaxb.re,
        vyayb: vyayb.re,
        imag: [vxa.im, vya.im, vxb.im, vyb.im, vxaxb.im, vyayb.im],
    })
}

/// `(V(X_a − X_b) + V(Y_a + Y_b), V(X_a + X_b) + V(Y_a − Y_b))`. Values below
/// 4 certify entanglement; values at or above 4 are inconclusive.
pub fn duan_simon(q: &QuadStats) -> (f64, f64) {
    let xs = q.vxa + q.vxb;
    let ys = q.vya + q.vyb;
    (
        xs - 2.0 * q.vxaxb + ys + 2.0 * q.vyayb,
        xs + 2.0 * q.vxaxb + ys - 2.0 * q.vyayb,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReidEpr {
    pub inf_xa: f64,
    pub inf_ya: f64,
    pub inf_xb: f64,
    pub inf_yb: f64,
    /// `V^inf(X_a) V^inf(Y_a)`; below 1 demonstrates steering of `a` by `b`.
    pub epr_a: f64,
    pub epr_b: f64,
}

/// Inferred variances of one mode's quadratures from measurements on the
/// other mode at the other frequency.
pub fn reid_epr(q: &QuadStats) -> Result<ReidEpr> {
    for v in [q.vxa, q.vya, q.vxb, q.vyb] {
        if v.is_nan() || v < DEGENERATE_VARIANCE {
            return Err(Error::DegenerateDenominator(v));
        }
    }
    let cx = q.vxaxb * q.vxaxb;
    let cy = q.vyayb * q.vyayb;
    let inf_xa = q.vxa - cx / q.vxb;
    let inf_ya = q.vya - cy / q.vyb;
    let inf_xb = q.vxb - cx / q.vxa;
    let inf_yb = q.vyb - cy / q.vya;
    Ok(ReidEpr {
        inf_xa,
        inf_ya,
        inf_xb,
        inf_yb,
        epr_a: inf_xa * inf_ya,
        epr_b: inf_xb * inf_yb,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonStats {
    pub na: f64,
    pub nb: f64,
    pub g2a: Option<f64>,
    pub g2b: Option<f64>,
    /// Fraction of the conserved flux `Na + 2Nb` carried by the harmonic.
    pub efficiency: f64,
    /// Imaginary parts of `⟨α⁺α⟩` and `⟨β⁺β⟩`.
    pub imag: [f64; 2],
}

pub fn photon_stats(m: &NormalMoments) -> Result<PhotonStats> {
    require_count(m)?;
    let na_c = m.get(M::ApA);
    let nb_c = m.get(M::BpB);
    let (na, nb) = (na_c.re, nb_c.re);
    let g2 = |n: f64, pair: Complex64| (n >= MIN_PHOTONS_FOR_G2).then(|| pair.re / (n * n));
    let flux = na + 2.0 * nb;
    Ok(PhotonStats {
        na,
        nb,
        g2a: g2(na, m.get(M::Ap2A2)),
        g2b: g2(nb, m.get(M::Bp2B2)),
        efficiency: if flux > 0.0 { 2.0 * nb / flux } else { 0.0 },
        imag: [na_c.im, nb_c.im],
    })
}

pub const N_QUANTITIES: usize = 15;

/// Column names of the reported scalars, in output order.
pub const QUANTITY_NAMES: [&str; N_QUANTITIES] = [
    "Na",
    "Nb",
    "efficiency",
    "VXa",
    "VYa",
    "VXb",
    "VYb",
    "VXaXb",
    "VYaYb",
    "DS_minus",
    "DS_plus",
    "EPR_a",
    "EPR_b",
    "g2a",
    "g2b",
];

/// Every observable at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationReport {
    pub zeta: f64,
    pub na: f64,
    pub nb: f64,
    pub efficiency: f64,
    pub vxa: f64,
    pub vya: f64,
    pub vxb: f64,
    pub vyb: f64,
    pub vxaxb: f64,
    pub vyayb: f64,
    pub ds_minus: f64,
    pub ds_plus: f64,
    /// `None` when a sample variance is too small to infer from, which can
    /// happen in small batches under strong squeezing.
    pub epr_a: Option<f64>,
    pub epr_b: Option<f64>,
    pub g2a: Option<f64>,
    pub g2b: Option<f64>,
}

/// A report together with the imaginary parts of its eight Hermitian inputs
/// (`Na, Nb, VXa, VYa, VXb, VYb, VXaXb, VYaYb`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub report: CorrelationReport,
    pub imag: [f64; 8],
}

impl CorrelationReport {
    pub fn evaluate(zeta: f64, m: &NormalMoments) -> Result<Evaluation> {
        let q = quad_stats(m)?;
        let p = photon_stats(m)?;
        let (ds_minus, ds_plus) = duan_simon(&q);
        let epr = reid_epr(&q).ok();
        let report = CorrelationReport {
            zeta,
            na: p.na,
            nb: p.nb,
            efficiency: p.efficiency,
            vxa: q.vxa,
            vya: q.vya,
            vxb: q.vxb,
            vyb: q.vyb,
            vxaxb: q.vxaxb,
            vyayb: q.vyayb,
            ds_minus,
            ds_plus,
            epr_a: epr.map(|e| e.epr_a),
            epr_b: epr.map(|e| e.epr_b),
            g2a: p.g2a,
            g2b: p.g2b,
        };
        let mut imag = [0.0; 8];
        imag[..2].copy_from_slice(&p.imag);
        imag[2..].copy_from_slice(&q.imag);
        Ok(Evaluation { report, imag })
    }

    pub fn from_moments(zeta: f64, m: &NormalMoments) -> Result<Self> {
        Self::evaluate(zeta, m).map(|e| e.report)
    }

    /// Scalars in [`QUANTITY_NAMES`] order.
    pub fn values(&self) -> [Option<f64>; N_QUANTITIES] {
        [
            Some(self.na),
            Some(self.nb),
            Some(self.efficiency),
            Some(self.vxa),
            Some(self.vya),
            Some(self.vxb),
            Some(self.vyb),
            Some(self.vxaxb),
            Some(self.vyayb),
            Some(self.ds_minus),
            Some(self.ds_plus),
            self.epr_a,
            self.epr_b,
            self.g2a,
            self.g2b,
        ]
    }
}

/// A report with batch-means standard errors for each scalar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportWithErrors {
    pub report: CorrelationReport,
    /// Standard errors in [`QUANTITY_NAMES`] order; `None` where the scalar
    /// itself is undefined in the full ensemble or in some batch.
    pub se: [Option<f64>; N_QUANTITIES],
    /// Largest `|Im|/SE(Im)` over the Hermitian combinations.
    pub im_residual_max: f64,
}

impl ReportWithErrors {
    pub fn value(&self, name: &str) -> Option<f64> {
        let k = QUANTITY_NAMES.iter().position(|n| *n == name)?;
        self.report.values()[k]
    }

    pub fn error(&self, name: &str) -> Option<f64> {
        let k = QUANTITY_NAMES.iter().position(|n| *n == name)?;
        self.se[k]
    }
}

/// Sample standard deviation over batches divided by `sqrt(B)`.
pub fn batch_standard_error(xs: &[f64]) -> f64 {
    let b = xs.len() as f64;
    // Shifted by the first batch so identical batches give exactly zero.
    let shift = xs[0];
    let mean = xs.iter().map(|x| x - shift).sum::<f64>() / b;
    let ss: f64 = xs
        .iter()
        .map(|x| (x - shift - mean) * (x - shift - mean))
        .sum();
    libm::sqrt(ss / (b - 1.0) / b)
}

fn check_batches(acc: &MomentAccumulator, grid_index: usize) -> Result<()> {
    if grid_index >= acc.n_grid() {
        return Err(Error::IndexOutOfRange);
    }
    let ok =
        acc.n_batches() >= 10 && (0..acc.n_batches()).all(|b| acc.batch(b).count(grid_index) >= 2);
    if ok {
        Ok(())
    } else {
        Err(Error::InsufficientBatches)
    }
}

/// Full-ensemble value and batch-means error of an arbitrary scalar function
/// of the moments.
pub fn batch_estimate<F>(acc: &MomentAccumulator, grid_index: usize, f: F) -> Result<(f64, f64)>
where
    F: Fn(&NormalMoments) -> f64,
{
    check_batches(acc, grid_index)?;
    let per_batch: Vec<f64> = (0..acc.n_batches())
        .map(|b| f(&acc.batch_means(grid_index, b)))
        .collect();
    Ok((f(&acc.means(grid_index)), batch_standard_error(&per_batch)))
}

pub fn standard_errors(
    acc: &MomentAccumulator,
    grid_index: usize,
    zeta: f64,
) -> Result<ReportWithErrors> {
    check_batches(acc, grid_index)?;
    let full = CorrelationReport::evaluate(zeta, &acc.means(grid_index))?;
    let batches = (0..acc.n_batches())
        .map(|b| CorrelationReport::evaluate(zeta, &acc.batch_means(grid_index, b)))
        .collect::<Result<Vec<_>>>()?;

    let full_values = full.report.values();
    let mut se = [None; N_QUANTITIES];
    for (k, slot) in se.iter_mut().enumerate() {
        if full_values[k].is_none() {
            continue;
        }
        let xs: Option<Vec<f64>> = batches.iter().map(|e| e.report.values()[k]).collect();
        *slot = xs.map(|xs| batch_standard_error(&xs));
    }

    let mut im_residual_max: f64 = 0.0;
    for k in 0..full.imag.len() {
        let xs: Vec<f64> = batches.iter().map(|e| e.imag[k]).collect();
        let err = batch_standard_error(&xs);
        let im = full.imag[k].abs();
        if im == 0.0 {
            continue;
        }
        // Point distributions have zero spread; there only rounding noise
        // relative to the scalar itself can show up.
        let floor = 1e-10 * (1.0 + full_values_abs(&full.report, k));
        im_residual_max = im_residual_max.max(im / err.max(floor));
    }

    Ok(ReportWithErrors {
        report: full.report,
        se,
        im_residual_max,
    })
}

fn full_values_abs(r: &CorrelationReport, k: usize) -> f64 {
    let v = [r.na, r.nb, r.vxa, r.vya, r.vxb, r.vyb, r.vxaxb, r.vyayb];
    v[k].abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::MomentAccumulator;
    use crate::rng::{standard_normal, TrajectoryStreams};
    use crate::states::{sample_indexed, PumpSpec, SqueezeQuadrature};
    use crate::PhasePoint;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn accumulate(points: &[PhasePoint], batches: usize) -> MomentAccumulator {
        let mut acc = MomentAccumulator::new(1, batches);
        let per = points.len() / batches;
        for (i, p) in points.iter().enumerate() {
            acc.accumulate(p, 0, i / per).unwrap();
        }
        acc
    }

    #[test]
    fn coherent_point_ensemble_is_exact() {
        let pts = alloc::vec![PhasePoint::pump(c(7.0)); 1000];
        let acc = accumulate(&pts, 100);
        let r = standard_errors(&acc, 0, 0.0).unwrap();
        let rep = r.report;
        assert_eq!((rep.vxa, rep.vya, rep.vxb, rep.vyb), (1.0, 1.0, 1.0, 1.0));
        assert_eq!((rep.ds_minus, rep.ds_plus), (4.0, 4.0));
        assert_eq!((rep.epr_a, rep.epr_b), (Some(1.0), Some(1.0)));
        assert_eq!(rep.g2a, Some(1.0));
        assert_eq!(rep.g2b, None);
        assert_eq!(r.error("VXa"), Some(0.0));
        assert_eq!(r.error("g2b"), None);
        assert_eq!(r.im_residual_max, 0.0);
    }

    #[test]
    fn correlated_gaussian_ensemble() {
        // α = α⁺ = g·n  ⇒  V(X_a) = 1 + 4g², V(Y_a) = 1.
        let g = 0.5;
        let mut rng = TrajectoryStreams::new(11).stream(0);
        let pts: Vec<PhasePoint> = (0..200_000)
            .map(|_| {
                let x = c(g * standard_normal(&mut rng));
                PhasePoint::new(x, x, c(0.0), c(0.0))
            })
            .collect();
        let acc = accumulate(&pts, 100);
        let r = standard_errors(&acc, 0, 0.0).unwrap();
        let se = r.error("VXa").unwrap();
        assert!((r.report.vxa - 2.0).abs() < 5.0 * se);
        assert!((r.report.vya - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uncorrelated_coherent_states_give_four() {
        let m = NormalMoments::exact(crate::moments::monomials(&PhasePoint::new(
            c(2.0),
            c(2.0),
            c(-1.0),
            c(-1.0),
        )));
        let q = quad_stats(&m).unwrap();
        assert_eq!(duan_simon(&q), (4.0, 4.0));
        let e = reid_epr(&q).unwrap();
        assert_eq!((e.epr_a, e.epr_b), (1.0, 1.0));
        assert_eq!(e.inf_xa, q.vxa);
        let vac = quad_stats(&NormalMoments::exact([c(0.0); 16])).unwrap();
        assert_eq!(duan_simon(&vac), (4.0, 4.0));
    }

    #[test]
    fn bright_point_mass_about_itself_is_exact() {
        let p = PhasePoint::pump(Complex64::new(123.456, 7.89));
        let mut acc = MomentAccumulator::with_origins(alloc::vec![p], 10);
        for b in 0..10 {
            for _ in 0..7 {
                acc.accumulate(&p, 0, b).unwrap();
            }
        }
        let r = standard_errors(&acc, 0, 0.0).unwrap().report;
        assert_eq!((r.vxa, r.vya, r.vxb, r.vyb), (1.0, 1.0, 1.0, 1.0));
        assert_eq!((r.ds_minus, r.ds_plus), (4.0, 4.0));
        assert_eq!((r.epr_a, r.epr_b), (Some(1.0), Some(1.0)));
    }

    #[test]
    fn perfectly_correlated_ensemble_drives_ds_minus_to_zero() {
        // Normally ordered spreads of −1/2 in X_a and Y_a cancel both vacuum
        // contributions: α = (i n1 + n2)/√2, α⁺ = (i n1 − n2)/√2, harmonic
        // empty, so V(X_a − X_b) = V(Y_a + Y_b) = 0.
        let mut rng = TrajectoryStreams::new(6).stream(0);
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let pts: Vec<PhasePoint> = (0..400_000)
            .map(|_| {
                let (n1, n2) = (standard_normal(&mut rng), standard_normal(&mut rng));
                let even = Complex64::new(0.0, n1 * s);
                let odd = c(n2 * s);
                PhasePoint::new(even + odd, even - odd, c(0.0), c(0.0))
            })
            .collect();
        let acc = accumulate(&pts, 100);
        let (minus, se) =
            batch_estimate(&acc, 0, |m| duan_simon(&quad_stats(m).unwrap()).0).unwrap();
        assert!(minus.abs() < 5.0 * se, "{minus} ± {se}");
    }

    #[test]
    fn inferred_variance_hand_value() {
        let q = QuadStats {
            mean_xa: 0.0,
            mean_ya: 0.0,
            mean_xb: 0.0,
            mean_yb: 0.0,
            vxa: 2.0,
            vya: 1.0,
            vxb: 2.0,
            vyb: 1.0,
            vxaxb: 1.0,
            vyayb: 0.0,
            imag: [0.0; 6],
        };
        let e = reid_epr(&q).unwrap();
        assert_eq!(e.inf_xa, 1.5);
        assert_eq!(e.inf_ya, 1.0);
        let mut bad = q;
        bad.vyb = 0.0;
        assert!(matches!(
            reid_epr(&bad),
            Err(Error::DegenerateDenominator(_))
        ));
    }

    #[test]
    fn requires_two_samples_and_ten_batches() {
        let mut acc = MomentAccumulator::new(1, 5);
        for b in 0..5 {
            for _ in 0..3 {
                acc.accumulate(&PhasePoint::ZERO, 0, b).unwrap();
            }
        }
        assert_eq!(
            standard_errors(&acc, 0, 0.0).unwrap_err(),
            Error::InsufficientBatches
        );
        let one = MomentAccumulator::new(1, 1);
        let mut one = one;
        one.accumulate(&PhasePoint::ZERO, 0, 0).unwrap();
        assert!(matches!(
            quad_stats(&one.means(0)),
            Err(Error::InsufficientCount { .. })
        ));
    }

    #[test]
    fn identical_batches_have_zero_error() {
        let mut rng = TrajectoryStreams::new(2).stream(0);
        let block: Vec<PhasePoint> = (0..20)
            .map(|_| PhasePoint::pump(c(standard_normal(&mut rng))))
            .collect();
        let mut acc = MomentAccumulator::new(1, 10);
        for b in 0..10 {
            for p in &block {
                acc.accumulate(p, 0, b).unwrap();
            }
        }
        let r = standard_errors(&acc, 0, 0.0).unwrap();
        for se in r.se.iter().flatten() {
            assert_eq!(*se, 0.0);
        }
    }

    #[test]
    fn squeezed_vacuum_pair_ds_baseline() {
        // No interaction: DS = V(X_a) + V(Y_a) + 2 = e^{-2r} + e^{2r} + 2.
        let r = 0.8;
        for quad in [SqueezeQuadrature::X, SqueezeQuadrature::Y] {
            let spec = PumpSpec::new(c(3.0), r, quad).unwrap();
            let pts = sample_indexed(&spec, &TrajectoryStreams::new(4), 0..200_000);
            let acc = accumulate(&pts, 100);
            let rep = standard_errors(&acc, 0, 0.0).unwrap();
            let target = (-2.0 * r).exp() + (2.0 * r).exp() + 2.0;
            for name in ["DS_minus", "DS_plus"] {
                let (v, se) = (rep.value(name).unwrap(), rep.error(name).unwrap());
                assert!(
                    (v - target).abs() < 5.0 * se,
                    "{name}: {v} vs {target} ± {se}"
                );
            }
            assert!(rep.im_residual_max < 10.0);
        }
    }

    #[test]
    fn heisenberg_bound_holds_for_sampled_inputs() {
        for (r, quad) in [(0.3, SqueezeQuadrature::X), (1.2, SqueezeQuadrature::Y)] {
            let spec = PumpSpec::new(Complex64::new(1.0, 2.0), r, quad).unwrap();
            let pts = sample_indexed(&spec, &TrajectoryStreams::new(8), 0..100_000);
            let acc = accumulate(&pts, 100);
            let (v, se) = batch_estimate(&acc, 0, |m| {
                let q = quad_stats(m).unwrap();
                q.vxa * q.vya
            })
            .unwrap();
            assert!(v > 1.0 - 5.0 * se, "{v} ± {se}");
        }
    }
}
