//! Run configuration: built-in profiles, an optional TOML file and command
//! line overrides, applied in that order.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use shgsim_core::{Complex64, PumpSpec, Scheme, SqueezeQuadrature, ZetaScale};

use crate::error::{Result, RunError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// alpha0 = 100, 2e5 trajectories.
    Desk,
    /// alpha0 = 1000, 1e7 trajectories.
    Paper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Quad {
    X,
    Y,
}

impl From<Quad> for SqueezeQuadrature {
    fn from(q: Quad) -> Self {
        match q {
            Quad::X => SqueezeQuadrature::X,
            Quad::Y => SqueezeQuadrature::Y,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SchemeArg {
    Euler,
    Midpoint,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Euler => Scheme::Euler,
            SchemeArg::Midpoint => Scheme::Midpoint,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub alpha0: [f64; 2],
    pub squeeze_r: f64,
    pub squeeze_quad: Quad,
    pub kappa: f64,
    pub zeta_max: f64,
    /// Integration step in ζ.
    pub d_zeta: f64,
    /// Spacing of recorded ζ grid points.
    pub record_every: f64,
    pub trajectories: u64,
    pub batches: usize,
    pub scheme: SchemeArg,
    pub seed: u64,
    /// `None` lets rayon pick the worker count.
    pub workers: Option<usize>,
    pub out: PathBuf,
    pub deterministic: bool,
    pub profile: Profile,
}

pub const DEFAULT_SEED: u64 = 20_170_301;

impl SimConfig {
    pub fn profile(profile: Profile) -> Self {
        let (alpha0, trajectories) = match profile {
            Profile::Desk => (100.0, 200_000),
            Profile::Paper => (1000.0, 10_000_000),
        };
        Self {
            alpha0: [alpha0, 0.0],
            squeeze_r: 0.0,
            squeeze_quad: Quad::X,
            kappa: 1e-2,
            zeta_max: 6.0,
            d_zeta: 1e-3,
            record_every: 0.05,
            trajectories,
            batches: 100,
            scheme: SchemeArg::Midpoint,
            seed: DEFAULT_SEED,
            workers: None,
            out: PathBuf::from("shg.csv"),
            deterministic: false,
            profile,
        }
    }

    pub fn pump(&self) -> Result<PumpSpec> {
        Ok(PumpSpec::new(
            Complex64::new(self.alpha0[0], self.alpha0[1]),
            self.squeeze_r,
            self.squeeze_quad.into(),
        )?)
    }

    pub fn zeta_scale(&self) -> Result<ZetaScale> {
        Ok(ZetaScale::new(self.kappa, &self.pump()?))
    }

    /// Integration steps and record stride, both exact integers.
    pub fn grid(&self) -> Result<(usize, usize)> {
        let steps = exact_ratio(self.zeta_max, self.d_zeta, "zeta_max / d_zeta")?;
        let stride = exact_ratio(self.record_every, self.d_zeta, "record_every / d_zeta")?;
        if stride == 0 {
            return Err(RunError::Config(
                "record_every must be at least d_zeta".into(),
            ));
        }
        if steps % stride != 0 {
            return Err(RunError::Config(
                "zeta_max must be a multiple of record_every".into(),
            ));
        }
        Ok((steps, stride))
    }

    pub fn validate(&self) -> Result<()> {
        self.pump()?;
        let positive = |x: f64, what: &str| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(RunError::Config(format!("{what} must be positive")))
            }
        };
        positive(self.kappa, "kappa")?;
        positive(self.d_zeta, "d_zeta")?;
        positive(self.record_every, "record_every")?;
        if !(self.zeta_max.is_finite() && self.zeta_max >= 0.0) {
            return Err(RunError::Config("zeta_max must be non-negative".into()));
        }
        if self.pump()?.mean_photon_number() <= 0.0 {
            return Err(RunError::Config("pump must carry photons".into()));
        }
        self.grid()?;
        if self.batches < 10 {
            return Err(RunError::Config("at least 10 batches are needed".into()));
        }
        if !self.trajectories.is_multiple_of(self.batches as u64) {
            return Err(RunError::Config(
                "trajectories must be divisible by batches".into(),
            ));
        }
        if self.trajectories / (self.batches as u64) < 2 {
            return Err(RunError::Config(
                "each batch needs at least 2 trajectories".into(),
            ));
        }
        if self.workers == Some(0) {
            return Err(RunError::Config("workers must be >= 1".into()));
        }
        Ok(())
    }

    /// ζ of every recorded grid point.
    pub fn zeta_grid(&self) -> Result<Vec<f64>> {
        let (steps, stride) = self.grid()?;
        // Dividing by an integral 1/dζ keeps decimal grids like 2.3 exact.
        let per_unit = 1.0 / self.d_zeta;
        let at = |n: usize| {
            if (per_unit - per_unit.round()).abs() < 1e-9 * per_unit {
                n as f64 / per_unit.round()
            } else {
                n as f64 * self.d_zeta
            }
        };
        Ok((0..=steps / stride).map(|k| at(k * stride)).collect())
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(a) = &o.alpha0 {
            self.alpha0 = parse_alpha0(a)?;
        }
        macro_rules! set {
            ($($field:ident),*) => { $( if let Some(v) = o.$field.clone() { self.$field = v; } )* };
        }
        set!(
            squeeze_r,
            squeeze_quad,
            kappa,
            zeta_max,
            d_zeta,
            record_every,
            trajectories,
            batches,
            scheme,
            seed,
            out
        );
        if let Some(w) = &o.workers {
            self.workers = parse_workers(w)?;
        }
        if let Some(d) = o.deterministic {
            self.deterministic = d;
        }
        Ok(())
    }
}

fn exact_ratio(num: f64, den: f64, what: &str) -> Result<usize> {
    let q = num / den;
    let n = q.round();
    if !(n.is_finite() && n >= 0.0) || (q - n).abs() > 1e-6 {
        return Err(RunError::Config(format!(
            "{what} must be an integer, got {q}"
        )));
    }
    Ok(n as usize)
}

/// `"re"` or `"re,im"`.
pub fn parse_alpha0(text: &str) -> Result<[f64; 2]> {
    let bad = || RunError::Config(format!("alpha0 must be \"re\" or \"re,im\", got {text:?}"));
    let mut parts = text.split(',').map(|s| s.trim().parse::<f64>());
    let re = parts.next().ok_or_else(bad)?.map_err(|_| bad())?;
    let im = match parts.next() {
        Some(v) => v.map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok([re, im])
}

pub fn parse_workers(text: &str) -> Result<Option<usize>> {
    if text == "auto" {
        return Ok(None);
    }
    text.parse::<usize>()
        .map(Some)
        .map_err(|_| RunError::Config(format!("workers must be a count or \"auto\", got {text:?}")))
}

/// Partial settings from a config file or the command line.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    /// Coherent amplitude as "re" or "re,im".
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, deserialize_with = "de_text_or_number")]
    pub alpha0: Option<String>,
    #[arg(long = "squeeze-r", allow_negative_numbers = true)]
    pub squeeze_r: Option<f64>,
    #[arg(long = "squeeze-quad", value_enum)]
    pub squeeze_quad: Option<Quad>,
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    #[arg(long = "zeta-max", allow_negative_numbers = true)]
    pub zeta_max: Option<f64>,
    /// Integration step in ζ.
    #[arg(long = "d-zeta", allow_negative_numbers = true)]
    pub d_zeta: Option<f64>,
    /// Spacing of the recorded ζ grid.
    #[arg(long = "record-every", allow_negative_numbers = true)]
    pub record_every: Option<f64>,
    #[arg(long)]
    pub trajectories: Option<u64>,
    #[arg(long)]
    pub batches: Option<usize>,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads, or "auto".
    #[arg(long)]
    #[serde(default, deserialize_with = "de_text_or_number")]
    pub workers: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Switch the noise off and integrate the classical equations.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub deterministic: Option<bool>,
    /// Also compute the exact number-state reference on the same grid.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub oracle: Option<bool>,
    #[arg(long, value_enum)]
    pub profile: Option<Profile>,
}

fn de_text_or_number<'de, D>(d: D) -> std::result::Result<Option<String>, D::Error>
where
    D: serde::Deserializer<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum TextOrNumber {
        Text(String),
        Int(i64),
        Float(f64),
    }
    Ok(Option::<TextOrNumber>::deserialize(d)?.map(|v| match v {
        TextOrNumber::Text(s) => s,
        TextOrNumber::Int(i) => i.to_string(),
        TextOrNumber::Float(f) => f.to_string(),
    }))
}

pub fn read_config_file(path: &Path) -> Result<Overrides> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
    toml::from_str(&text).map_err(|e| RunError::ConfigFile {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Profile defaults, then the file, then the flags.
pub fn resolve(file: Option<&Overrides>, flags: &Overrides) -> Result<(SimConfig, bool)> {
    let profile = flags
        .profile
        .or(file.and_then(|f| f.profile))
        .unwrap_or(Profile::Desk);
    let mut cfg = SimConfig::profile(profile);
    if let Some(f) = file {
        cfg.apply(f)?;
    }
    cfg.apply(flags)?;
    let oracle = flags
        .oracle
        .or(file.and_then(|f| f.oracle))
        .unwrap_or(false);
    cfg.validate()?;
    Ok((cfg, oracle))
}
