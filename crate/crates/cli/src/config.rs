use std::path::Path;

use serde::{Deserialize, Serialize};
use spamqpt::sim::{
    EstimatorSpec, ExperimentDesign, Shots, SweepConfig, SweepKind, DEFAULT_GATE_GAMMA,
};

use crate::error::{CliError, CliResult};
use crate::meta::read_file;

/// Output formats of the sweep tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

fn all_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

/// Complete description of a sweep run. The output directory is not part
/// of it, so the same run written to two places has the same hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(flatten)]
    pub sweep: SweepConfig,
    #[serde(default = "all_formats")]
    pub formats: Vec<Format>,
}

pub const BUILTIN_BASE_SEED: u64 = 20_240_601;

/// Names of the builtin configurations.
pub const BUILTINS: [&str; 4] = ["fig1-depol", "fig1-coherent", "fig2-depol", "fig2-coherent"];

/// Standard plus corrected estimates for a square design, least squares
/// plus overcomplete corrected estimates otherwise.
pub fn default_estimators(
    design: &ExperimentDesign,
    gauges: &[f64],
    truncate_p: bool,
) -> Vec<EstimatorSpec> {
    let square = design.frame().is_ok_and(|f| f.is_square());
    let mut v = vec![if square {
        EstimatorSpec::Standard
    } else {
        EstimatorSpec::Ols
    }];
    for &p in gauges {
        v.push(if square {
            EstimatorSpec::Corrected { p }
        } else {
            EstimatorSpec::Overcomplete { p, truncate_p }
        });
    }
    v
}

/// 9-point grid, 50 runs of 5000 shots on the square design, standard plus
/// corrected estimates at `p = 0, 0.5, 1`.
pub fn builtin(name: &str) -> Option<RunConfig> {
    if !BUILTINS.contains(&name) {
        return None;
    }
    let kind = if name.ends_with("depol") {
        SweepKind::Depolarizing
    } else {
        SweepKind::Coherent
    };
    let design = ExperimentDesign::square(Shots::Finite(5000));
    Some(RunConfig {
        name: Some(name.to_string()),
        sweep: SweepConfig {
            kind,
            grid: kind.default_grid(),
            n_runs: 50,
            estimators: default_estimators(&design, &[0.0, 0.5, 1.0], true),
            design,
            base_seed: BUILTIN_BASE_SEED,
            gate_gamma: DEFAULT_GATE_GAMMA,
        },
        formats: all_formats(),
    })
}

/// A builtin name or a path to a JSON configuration.
pub fn load(source: &str) -> CliResult<RunConfig> {
    if let Some(c) = builtin(source) {
        return Ok(c);
    }
    let path = Path::new(source);
    if !path.exists() {
        return Err(CliError::Usage(format!(
            "{source:?} is neither a configuration file nor a builtin ({})",
            BUILTINS.join(", ")
        )));
    }
    serde_json::from_str(&read_file(path)?)
        .map_err(|e| CliError::Usage(format!("{source}: invalid configuration: {e}")))
}

/// Command-line overrides of a loaded configuration.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub shots: Option<Shots>,
    pub grid: Option<Vec<f64>>,
    pub runs: Option<usize>,
    pub gauge_p: Option<Vec<f64>>,
    pub no_truncate_p: bool,
    pub formats: Option<Vec<Format>>,
}

impl RunConfig {
    pub fn apply(&mut self, o: &Overrides) {
        let s = &mut self.sweep;
        if let Some(seed) = o.seed {
            s.base_seed = seed;
        }
        if let Some(shots) = o.shots {
            s.design.shots = shots;
        }
        if let Some(grid) = &o.grid {
            s.grid = grid.clone();
        }
        if let Some(runs) = o.runs {
            s.n_runs = runs;
        }
        if let Some(gauges) = &o.gauge_p {
            s.estimators = default_estimators(&s.design, gauges, true);
        }
        if o.no_truncate_p {
            for e in &mut s.estimators {
                if let EstimatorSpec::Overcomplete { truncate_p, .. } = e {
                    *truncate_p = false;
                }
            }
        }
        if let Some(f) = &o.formats {
            self.formats = f.clone();
        }
        self.formats.sort();
        self.formats.dedup();
    }

    pub fn validate(&self) -> CliResult<()> {
        self.sweep
            .validate()
            .map_err(|e| CliError::core("invalid configuration", e))?;
        for e in &self.sweep.estimators {
            if let EstimatorSpec::Corrected { p } | EstimatorSpec::Overcomplete { p, .. } = e {
                if !(0.0..=1.0).contains(p) {
                    return Err(CliError::Usage(format!("gauge p = {p} is outside [0, 1]")));
                }
            }
            if e.needs_calibration() && !self.sweep.design.include_calibration {
                return Err(CliError::Usage(format!(
                    "estimator {} needs calibration circuits but the design has none",
                    e.label()
                )));
            }
        }
        if self.formats.is_empty() {
            return Err(CliError::Usage("no output format selected".into()));
        }
        Ok(())
    }
}
