//! Runs over a list of pump settings sharing every other parameter.

use std::path::PathBuf;

use crate::config::{Quad, SimConfig};
use crate::error::{Result, RunError};
use crate::output::with_suffix;
use crate::{run, Written};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpSetting {
    pub r: f64,
    pub quad: Quad,
}

impl PumpSetting {
    pub fn label(&self) -> String {
        if self.r == 0.0 {
            "coherent".into()
        } else {
            let q = match self.quad {
                Quad::X => 'x',
                Quad::Y => 'y',
            };
            format!("{q}{}", self.r)
        }
    }
}

/// The five inputs of the quadrature-variance figures: X-squeezed r = 1 and
/// 0.5, coherent, Y-squeezed r = 0.5 and 1.
pub fn figure_set() -> Vec<PumpSetting> {
    vec![
        PumpSetting {
            r: 1.0,
            quad: Quad::X,
        },
        PumpSetting {
            r: 0.5,
            quad: Quad::X,
        },
        PumpSetting {
            r: 0.0,
            quad: Quad::X,
        },
        PumpSetting {
            r: 0.5,
            quad: Quad::Y,
        },
        PumpSetting {
            r: 1.0,
            quad: Quad::Y,
        },
    ]
}

/// Comma-separated `x:R`, `y:R` or `coherent` items, or `figures` for
/// [`figure_set`]. An empty string is an empty list.
pub fn parse_pumps(text: &str) -> Result<Vec<PumpSetting>> {
    if text.trim() == "figures" {
        return Ok(figure_set());
    }
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            if item == "coherent" {
                return Ok(PumpSetting {
                    r: 0.0,
                    quad: Quad::X,
                });
            }
            let bad = || RunError::Config(format!("pump {item:?} is not x:R, y:R or coherent"));
            let (q, r) = item.split_once(':').ok_or_else(bad)?;
            let quad = match q {
                "x" => Quad::X,
                "y" => Quad::Y,
                _ => return Err(bad()),
            };
            let r: f64 = r.parse().map_err(|_| bad())?;
            Ok(PumpSetting { r, quad })
        })
        .collect()
}

/// Per-pump configurations; output `i` goes to `<stem>_<i>_<label>.<ext>`.
pub fn plan(base: &SimConfig, pumps: &[PumpSetting]) -> Vec<SimConfig> {
    pumps
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut cfg = base.clone();
            cfg.squeeze_r = p.r;
            cfg.squeeze_quad = p.quad;
            cfg.out = with_suffix(&base.out, &format!("_{i}_{}", p.label()));
            cfg
        })
        .collect()
}

pub fn sweep(base: &SimConfig, pumps: &[PumpSetting]) -> Result<Vec<Written>> {
    let configs = plan(base, pumps);
    for c in &configs {
        c.validate()?;
    }
    configs.iter().map(|c| run(c).map(|(_, w)| w)).collect()
}

pub fn output_paths(base: &SimConfig, pumps: &[PumpSetting]) -> Vec<PathBuf> {
    plan(base, pumps).into_iter().map(|c| c.out).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Profile;

    #[test]
    fn parses_lists() {
        assert_eq!(parse_pumps("").unwrap(), vec![]);
        assert_eq!(parse_pumps("figures").unwrap(), figure_set());
        let p = parse_pumps("x:1, coherent,y:0.5").unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p[1].r, 0.0);
        assert_eq!(p[2].quad, Quad::Y);
        assert!(parse_pumps("z:1").is_err());
        assert!(parse_pumps("x:abc").is_err());
    }

    #[test]
    fn duplicate_specs_get_distinct_files() {
        let base = SimConfig::profile(Profile::Desk);
        let pumps = parse_pumps("x:0.5,x:0.5").unwrap();
        let paths = output_paths(&base, &pumps);
        assert_eq!(paths[0], PathBuf::from("shg_0_x0.5.csv"));
        assert_eq!(paths[1], PathBuf::from("shg_1_x0.5.csv"));
    }

    #[test]
    fn labels_follow_figure_order() {
        let labels: Vec<String> = figure_set().iter().map(PumpSetting::label).collect();
        assert_eq!(labels, ["x1", "x0.5", "coherent", "y0.5", "y1"]);
    }
}
