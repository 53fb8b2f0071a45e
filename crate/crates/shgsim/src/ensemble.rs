//! Parallel trajectory ensembles with a scheduling-independent reduction.
//!
//! Batches are the unit of work: trajectories `b·n .. (b+1)·n` are integrated
//! in index order into batch `b`'s sums, and batch sums are only combined in
//! batch order. Together with the per-trajectory random streams this makes the
//! result a pure function of the configuration, whatever the worker count.

use log::debug;
use rayon::prelude::*;
use shgsim_core::observables::standard_errors;
use shgsim_core::sde::integrate_trajectory;
use shgsim_core::{
    BatchSums, Error, MomentAccumulator, PhasePoint, ReportWithErrors, SdeConfig, TrajectoryStreams,
};

use crate::config::SimConfig;
use crate::error::{Result, RunError};

pub struct Ensemble {
    pub zetas: Vec<f64>,
    pub accumulator: MomentAccumulator,
}

impl Ensemble {
    pub fn reports(&self) -> Result<Vec<ReportWithErrors>> {
        self.zetas
            .iter()
            .enumerate()
            .map(|(k, &zeta)| Ok(standard_errors(&self.accumulator, k, zeta)?))
            .collect()
    }
}

fn sde_config(cfg: &SimConfig) -> Result<Option<SdeConfig>> {
    let (steps, stride) = cfg.grid()?;
    if steps == 0 {
        return Ok(None);
    }
    let scale = cfg.zeta_scale()?;
    Ok(Some(SdeConfig {
        kappa: cfg.kappa,
        z_max: scale.z(steps as f64 * cfg.d_zeta),
        n_steps: steps,
        scheme: cfg.scheme.into(),
        record_stride: stride,
        noise: !cfg.deterministic,
    }))
}

/// Noise-free path from the mean input, used as the origin of the shifted
/// moment sums.
fn classical_path(
    cfg: &SimConfig,
    sde: Option<&SdeConfig>,
) -> shgsim_core::Result<Vec<PhasePoint>> {
    let p0 = PhasePoint::pump(cfg.pump().expect("validated").alpha0);
    let Some(sde) = sde else {
        return Ok(vec![p0]);
    };
    let quiet = SdeConfig {
        noise: false,
        ..*sde
    };
    let mut path = Vec::with_capacity(quiet.n_records());
    let mut rng = TrajectoryStreams::new(0).stream(0);
    integrate_trajectory(p0, &quiet, &mut rng, |_, _, p| {
        path.push(*p);
        Ok(())
    })?;
    Ok(path)
}

fn run_batch(
    cfg: &SimConfig,
    sde: Option<&SdeConfig>,
    origins: &[PhasePoint],
    batch: usize,
) -> shgsim_core::Result<BatchSums> {
    let pump = cfg.pump().expect("validated");
    let streams = TrajectoryStreams::new(cfg.seed);
    let per_batch = cfg.trajectories / cfg.batches as u64;
    let mut sums = BatchSums::with_origins(origins.to_vec());
    let first = batch as u64 * per_batch;
    for traj in first..first + per_batch {
        let mut rng = streams.stream(traj);
        let p0 = pump.sample_point(&mut rng);
        match sde {
            None => sums.accumulate(&p0, 0)?,
            Some(sde) => {
                integrate_trajectory(p0, sde, &mut rng, |k, _, p| sums.accumulate(p, k)).map_err(
                    |e| match e {
                        Error::Divergence { z, .. } => Error::Divergence {
                            trajectory: Some(traj),
                            z,
                        },
                        other => other,
                    },
                )?;
            }
        }
    }
    Ok(sums)
}

pub fn simulate(cfg: &SimConfig) -> Result<Ensemble> {
    cfg.validate()?;
    let zetas = cfg.zeta_grid()?;
    let sde = sde_config(cfg)?;
    let origins = classical_path(cfg, sde.as_ref())?;
    debug_assert_eq!(origins.len(), zetas.len());
    let work = || {
        (0..cfg.batches)
            .into_par_iter()
            .map(|b| run_batch(cfg, sde.as_ref(), &origins, b))
            .collect::<shgsim_core::Result<Vec<_>>>()
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| RunError::ThreadPool(e.to_string()))?;
    debug!(
        "integrating {} trajectories on {} workers",
        cfg.trajectories,
        pool.current_num_threads()
    );
    let batches = pool.install(work)?;
    Ok(Ensemble {
        zetas,
        accumulator: MomentAccumulator::from_batches(batches)?,
    })
}
