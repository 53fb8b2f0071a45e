//! Number-state reference on the runner's ζ grid.

use log::warn;
use shgsim_core::fock::{prepare_input, FockPropagator, DEFAULT_CUTOFF_A, DEFAULT_CUTOFF_B};
use shgsim_core::observables::QUANTITY_NAMES;
use shgsim_core::{CorrelationReport, Error, PumpSpec, ReportWithErrors};

use crate::config::SimConfig;
use crate::error::{Result, RunError};

/// Largest fundamental cutoff the oracle will try.
pub const MAX_CUTOFF_A: usize = 320;

/// Smallest cutoffs (starting from the defaults and doubling) whose prepared
/// input loses less than 1e-6 of its norm.
pub fn choose_cutoffs(pump: &PumpSpec) -> Result<(usize, usize)> {
    let (mut ca, mut cb) = (DEFAULT_CUTOFF_A, DEFAULT_CUTOFF_B);
    loop {
        match prepare_input(pump, ca, cb) {
            Ok(_) => return Ok((ca, cb)),
            Err(Error::CutoffTooSmall { .. }) if ca < MAX_CUTOFF_A => {
                ca *= 2;
                cb *= 2;
            }
            Err(e) => {
                return Err(RunError::Config(format!(
                    "pump too bright for the number-state oracle: {e}"
                )))
            }
        }
    }
}

pub fn fock_reference_with(
    cfg: &SimConfig,
    cutoffs: (usize, usize),
) -> Result<Vec<CorrelationReport>> {
    let pump = cfg.pump()?;
    let scale = cfg.zeta_scale()?;
    let input = prepare_input(&pump, cutoffs.0, cutoffs.1)?;
    let prop = FockPropagator::new(cutoffs.0, cutoffs.1, cfg.kappa);
    cfg.zeta_grid()?
        .into_iter()
        .map(|zeta| {
            let state = prop.evolve(&input, scale.z(zeta))?;
            if state.truncation_warning() {
                warn!(
                    "number-state reference at zeta = {zeta}: boundary population {:e}",
                    state.boundary_population()
                );
            }
            Ok(shgsim_core::fock::fock_observables(&state, zeta)?)
        })
        .collect()
}

pub fn fock_reference(cfg: &SimConfig) -> Result<Vec<CorrelationReport>> {
    let cutoffs = choose_cutoffs(&cfg.pump()?)?;
    fock_reference_with(cfg, cutoffs)
}

/// Exact rows in the runner's record format (no errors, no residual).
pub fn as_rows(exact: &[CorrelationReport]) -> Vec<ReportWithErrors> {
    exact
        .iter()
        .map(|r| ReportWithErrors {
            report: *r,
            se: [None; QUANTITY_NAMES.len()],
            im_residual_max: 0.0,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Deviation {
    pub zeta: f64,
    pub quantity: &'static str,
    pub sampled: f64,
    pub exact: f64,
    pub se: f64,
}

impl Deviation {
    /// `|sampled − exact|` in standard errors, with a rounding-level floor
    /// for zero-spread ensembles.
    pub fn sigmas(&self) -> f64 {
        let floor = 1e-9 * (1.0 + self.exact.abs());
        (self.sampled - self.exact).abs() / self.se.max(floor)
    }
}

pub fn compare(
    sampled: &[ReportWithErrors],
    exact: &[CorrelationReport],
    quantities: &[&'static str],
) -> Vec<Deviation> {
    let mut out = Vec::new();
    for (s, e) in sampled.iter().zip(exact) {
        let ev = e.values();
        for &q in quantities {
            let k = QUANTITY_NAMES
                .iter()
                .position(|n| *n == q)
                .expect("known quantity");
            if let (Some(sv), Some(se), Some(x)) = (s.report.values()[k], s.se[k], ev[k]) {
                out.push(Deviation {
                    zeta: s.report.zeta,
                    quantity: q,
                    sampled: sv,
                    exact: x,
                    se,
                });
            }
        }
    }
    out
}
