//! Exact number-state reference for small photon numbers.
//!
//! The two-mode wavefunction is evolved under `H = iħκ/2 (a†² b − a² b†)`.
//! `H` conserves `n_a + 2 n_b`, so the truncated space splits into chains
//! `|M − 2k, k⟩` that are evolved independently. On a chain the generator
//! `−iH/ħ` is real antisymmetric and tridiagonal; conjugating by
//! `diag(i^k)` turns it into `−i S` with `S` real symmetric, so each chain is
//! propagated exactly from one eigen-decomposition.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::moments::{Monomial, NormalMoments, N_MONOMIALS};
use crate::observables::CorrelationReport;
use crate::tridiag::symmetric_tridiagonal_eigen;
use crate::{Error, PumpSpec, Result};

/// Retained-norm threshold when truncating the prepared pump state.
pub const MIN_RETAINED_NORM: f64 = 1.0 - 1e-6;
/// Allowed norm drift during evolution.
pub const MAX_NORM_DRIFT: f64 = 1e-6;
/// Boundary population above which a state is flagged as truncation-limited.
pub const BOUNDARY_WARNING: f64 = 1e-6;

pub const DEFAULT_CUTOFF_A: usize = 40;
pub const DEFAULT_CUTOFF_B: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    cutoff_a: usize,
    cutoff_b: usize,
    coeffs: Vec<Complex64>,
}

impl FockState {
    pub fn vacuum(cutoff_a: usize, cutoff_b: usize) -> Self {
        Self::number(cutoff_a, cutoff_b, 0, 0)
    }

    pub fn number(cutoff_a: usize, cutoff_b: usize, na: usize, nb: usize) -> Self {
        assert!(na <= cutoff_a && nb <= cutoff_b);
        let mut s = Self {
            cutoff_a,
            cutoff_b,
            coeffs: vec![Complex64::new(0.0, 0.0); (cutoff_a + 1) * (cutoff_b + 1)],
        };
        let k = s.idx(na, nb);
        s.coeffs[k] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn cutoffs(&self) -> (usize, usize) {
        (self.cutoff_a, self.cutoff_b)
    }

    #[inline]
    fn idx(&self, na: usize, nb: usize) -> usize {
        na * (self.cutoff_b + 1) + nb
    }

    pub fn amplitude(&self, na: usize, nb: usize) -> Complex64 {
        self.coeffs[self.idx(na, nb)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨n_a + 2 n_b⟩`.
    pub fn mean_flux(&self) -> f64 {
        let mut total = 0.0;
        for na in 0..=self.cutoff_a {
            for nb in 0..=self.cutoff_b {
                total += (na + 2 * nb) as f64 * self.amplitude(na, nb).norm_sqr();
            }
        }
        total
    }

    /// Probability of `n_a` photons in the fundamental.
    pub fn pump_distribution(&self) -> Vec<f64> {
        (0..=self.cutoff_a)
            .map(|na| {
                (0..=self.cutoff_b)
                    .map(|nb| self.amplitude(na, nb).norm_sqr())
                    .sum()
            })
            .collect()
    }

    /// Population on the truncation edges `n_a = cutoff_a` or `n_b = cutoff_b`.
    pub fn boundary_population(&self) -> f64 {
        let mut p = 0.0;
        for na in 0..=self.cutoff_a {
            for nb in 0..=self.cutoff_b {
                if na == self.cutoff_a || nb == self.cutoff_b {
                    p += self.amplitude(na, nb).norm_sqr();
                }
            }
        }
        p
    }

    pub fn truncation_warning(&self) -> bool {
        self.boundary_population() > BOUNDARY_WARNING
    }

    /// `a^qa b^qb |ψ⟩`, exact in the truncated space.
    fn lowered(&self, qa: usize, qb: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len()];
        for na in 0..=self.cutoff_a {
            for nb in 0..=self.cutoff_b {
                let (sa, sb) = (na + qa, nb + qb);
                if sa > self.cutoff_a || sb > self.cutoff_b {
                    continue;
                }
                let fa: f64 = (na + 1..=sa).map(|n| n as f64).product();
                let fb: f64 = (nb + 1..=sb).map(|n| n as f64).product();
                out[self.idx(na, nb)] = self.amplitude(sa, sb) * libm::sqrt(fa * fb);
            }
        }
        out
    }

    /// `⟨b†^pb a†^pa a^qa b^qb⟩`.
    fn expect(&self, pa: usize, pb: usize, qa: usize, qb: usize) -> Complex64 {
        let left = self.lowered(pa, pb);
        let right = self.lowered(qa, qb);
        left.iter().zip(&right).map(|(l, r)| l.conj() * r).sum()
    }

    /// Exact normally ordered moments in the monomial layout used by the
    /// trajectory accumulator.
    pub fn normal_moments(&self) -> NormalMoments {
        let mut v = [Complex64::new(0.0, 0.0); N_MONOMIALS];
        let mut set = |m: Monomial, x: Complex64| v[m.index()] = x;
        set(Monomial::A, self.expect(0, 0, 1, 0));
        set(Monomial::Ap, self.expect(1, 0, 0, 0));
        set(Monomial::A2, self.expect(0, 0, 2, 0));
        set(Monomial::Ap2, self.expect(2, 0, 0, 0));
        set(Monomial::ApA, self.expect(1, 0, 1, 0));
        set(Monomial::B, self.expect(0, 0, 0, 1));
        set(Monomial::Bp, self.expect(0, 1, 0, 0));
        set(Monomial::B2, self.expect(0, 0, 0, 2));
        set(Monomial::Bp2, self.expect(0, 2, 0, 0));
        set(Monomial::BpB, self.expect(0, 1, 0, 1));
        set(Monomial::AB, self.expect(0, 0, 1, 1));
        set(Monomial::ABp, self.expect(0, 1, 1, 0));
        set(Monomial::ApB, self.expect(1, 0, 0, 1));
        set(Monomial::ApBp, self.expect(1, 1, 0, 0));
        set(Monomial::Ap2A2, self.expect(2, 0, 2, 0));
        set(Monomial::Bp2B2, self.expect(0, 2, 0, 2));
        NormalMoments::exact(v)
    }
}

/// exp(G) v for a sparse single-mode generator G given as a matvec, by
/// Taylor series over `substeps` equal slices.
fn expm_apply<F>(v: &mut Vec<Complex64>, substeps: usize, apply: F)
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let frac = 1.0 / substeps as f64;
    for _ in 0..substeps {
        let mut term = v.clone();
        let mut acc = v.clone();
        for k in 1..200 {
            let next = apply(&term);
            term = next.into_iter().map(|x| x * (frac / k as f64)).collect();
            let size: f64 = term.iter().map(|x| x.norm_sqr()).sum();
            for (a, t) in acc.iter_mut().zip(&term) {
                *a += t;
            }
            if size < 1e-36 {
                break;
            }
        }
        *v = acc;
    }
}

/// `(a^p)_mn` style helpers on a single mode of dimension `dim`.
fn lower(v: &[Complex64], times: usize) -> Vec<Complex64> {
    let dim = v.len();
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for (n, o) in out.iter_mut().enumerate().take(dim.saturating_sub(times)) {
        let s = n + times;
        let f: f64 = (n + 1..=s).map(|k| k as f64).product();
        *o = v[s] * libm::sqrt(f);
    }
    out
}

fn raise(v: &[Complex64], times: usize) -> Vec<Complex64> {
    let dim = v.len();
    let mut out = vec![Complex64::new(0.0, 0.0); dim];
    for (n, x) in v.iter().enumerate().take(dim.saturating_sub(times)) {
        let t = n + times;
        let f: f64 = (n + 1..=t).map(|k| k as f64).product();
        out[t] = x * libm::sqrt(f);
    }
    out
}

/// Displaced squeezed pump `D(α0) S(ε) |0⟩` in the fundamental, vacuum
/// harmonic, with `S(ε) = exp(½ε* a² − ½ε a†²)` and `D(α) = exp(α a† − α* a)`.
pub fn prepare_input(spec: &PumpSpec, cutoff_a: usize, cutoff_b: usize) -> Result<FockState> {
    let pad = 2 * cutoff_a + 60;
    let dim = cutoff_a + 1 + pad;
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    v[0] = Complex64::new(1.0, 0.0);

    let eps = spec.epsilon();
    if spec.r > 0.0 {
        let substeps = 1 + libm::ceil(spec.r * dim as f64) as usize;
        expm_apply(&mut v, substeps, |x| {
            let down = lower(x, 2);
            let up = raise(x, 2);
            down.iter()
                .zip(&up)
                .map(|(d, u)| eps.conj() * *d * 0.5 - eps * *u * 0.5)
                .collect()
        });
    }
    let alpha = spec.alpha0;
    if alpha.norm() > 0.0 {
        let substeps = 1 + libm::ceil(2.0 * alpha.norm() * libm::sqrt(dim as f64)) as usize;
        expm_apply(&mut v, substeps, |x| {
            let down = lower(x, 1);
            let up = raise(x, 1);
            up.iter()
                .zip(&down)
                .map(|(u, d)| alpha * *u - alpha.conj() * *d)
                .collect()
        });
    }

    let kept: f64 = v[..=cutoff_a].iter().map(|c| c.norm_sqr()).sum();
    let tail: f64 = v[dim - pad / 2..].iter().map(|c| c.norm_sqr()).sum();
    if kept < MIN_RETAINED_NORM || tail > 1e-12 {
        return Err(Error::CutoffTooSmall { norm: kept });
    }
    let scale = 1.0 / libm::sqrt(kept);
    let mut state = FockState::vacuum(cutoff_a, cutoff_b);
    for (na, c) in v[..=cutoff_a].iter().enumerate() {
        let k = state.idx(na, 0);
        state.coeffs[k] = *c * scale;
    }
    Ok(state)
}

/// One conserved-flux chain `|M − 2k, k⟩`, `k = k_min..=k_max`, with its
/// eigen-decomposition.
struct Chain {
    flux: usize,
    k_min: usize,
    values: Vec<f64>,
    vectors: Vec<f64>,
}

impl Chain {
    fn len(&self) -> usize {
        self.values.len()
    }
}

/// Precomputed exact propagator for fixed cutoffs and coupling.
pub struct FockPropagator {
    cutoff_a: usize,
    cutoff_b: usize,
    chains: Vec<Chain>,
}

impl FockPropagator {
    pub fn new(cutoff_a: usize, cutoff_b: usize, kappa: f64) -> Self {
        let mut chains = Vec::new();
        for flux in 0..=cutoff_a + 2 * cutoff_b {
            let k_min = flux.saturating_sub(cutoff_a).div_ceil(2);
            let k_max = (flux / 2).min(cutoff_b);
            if k_min > k_max {
                continue;
            }
            let len = k_max - k_min + 1;
            // Lower entry of the antisymmetric generator between k and k+1:
            // ⟨M−2k−2, k+1| −a²b† κ/2 |M−2k, k⟩.
            let off: Vec<f64> = (k_min..k_max)
                .map(|k| {
                    let n = (flux - 2 * k) as f64;
                    -0.5 * kappa * libm::sqrt(n * (n - 1.0) * (k + 1) as f64)
                })
                .collect();
            let eig = symmetric_tridiagonal_eigen(&vec![0.0; len], &off);
            chains.push(Chain {
                flux,
                k_min,
                values: eig.values,
                vectors: eig.vectors,
            });
        }
        Self {
            cutoff_a,
            cutoff_b,
            chains,
        }
    }

    pub fn evolve(&self, state: &FockState, z: f64) -> Result<FockState> {
        assert_eq!(state.cutoffs(), (self.cutoff_a, self.cutoff_b));
        let norm_in = state.norm_sqr();
        let mut out = FockState::vacuum(self.cutoff_a, self.cutoff_b);
        out.coeffs[0] = Complex64::new(0.0, 0.0);
        let i_pow = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ];
        for ch in &self.chains {
            let n = ch.len();
            let at = |j: usize| {
                let k = ch.k_min + j;
                state.idx(ch.flux - 2 * k, k)
            };
            // u = D⁻¹ ψ, with D = diag(i^j).
            let u: Vec<Complex64> = (0..n)
                .map(|j| state.coeffs[at(j)] * i_pow[(4 - j % 4) % 4])
                .collect();
            // Eigen-coordinates, phase, back.
            let mut w = vec![Complex64::new(0.0, 0.0); n];
            for (e, we) in w.iter_mut().enumerate() {
                let proj: Complex64 = (0..n).map(|k| u[k] * ch.vectors[k * n + e]).sum();
                *we = proj * Complex64::from_polar(1.0, -z * ch.values[e]);
            }
            for j in 0..n {
                let back: Complex64 = (0..n).map(|e| w[e] * ch.vectors[j * n + e]).sum();
                out.coeffs[at(j)] = back * i_pow[j % 4];
            }
        }
        let drift = (out.norm_sqr() - norm_in).abs();
        if drift > MAX_NORM_DRIFT {
            return Err(Error::NormDrift(drift));
        }
        Ok(out)
    }
}

pub fn evolve(state: &FockState, kappa: f64, z: f64) -> Result<FockState> {
    let (ca, cb) = state.cutoffs();
    FockPropagator::new(ca, cb, kappa).evolve(state, z)
}

pub fn fock_observables(state: &FockState, zeta: f64) -> Result<CorrelationReport> {
    CorrelationReport::from_moments(zeta, &state.normal_moments())
}
