//! Experiment configuration: a TOML document with one section per
//! subcommand, overridden by command-line flags and echoed back with every
//! default filled in.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandName {
    Analytic,
    Bounds,
    Admissible,
    Empirical,
    Simplicial,
    Plotdata,
}

impl CommandName {
    pub fn is_stochastic(self) -> bool {
        matches!(self, Self::Empirical | Self::Simplicial)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depths: Option<Vec<usize>>,
    /// Dimension for the coordinate-projection bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proj_d: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdmissibleSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assumptions: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmpiricalSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depths: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplicialSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kmax: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_draws: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlotdataSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inputs: Option<Vec<PathBuf>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandName>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem: Option<ProblemSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub admissible: Option<AdmissibleSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical: Option<EmpiricalSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simplicial: Option<SimplicialSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plotdata: Option<PlotdataSection>,
}

pub const RESOLVED_CONFIG: &str = "resolved_config.toml";
pub const DEFAULT_OUT: &str = "depth-out";

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(format!("cannot render config: {e}")))
    }

    pub fn out_dir(&self) -> &Path {
        self.out.as_deref().unwrap_or(Path::new(DEFAULT_OUT))
    }

    /// Fills defaults for the selected command, drops sections it does not
    /// read, and checks every invariant that does not need a computation.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        let command = self
            .command
            .ok_or_else(|| CliError::Config("no subcommand given on the command line or in the config".into()))?;
        if command.is_stochastic() && self.seed.is_none() {
            return Err(CliError::Config("--seed is required for stochastic runs".into()));
        }
        if !command.is_stochastic() {
            self.seed = None;
        }
        self.out.get_or_insert_with(|| PathBuf::from(DEFAULT_OUT));
        let (bounds, admissible, empirical, simplicial, plotdata) = (
            self.bounds.take(),
            self.admissible.take(),
            self.empirical.take(),
            self.simplicial.take(),
            self.plotdata.take(),
        );
        if command == CommandName::Plotdata {
            self.problem = None;
            let inputs = plotdata.unwrap_or_default().inputs.unwrap_or_default();
            if inputs.is_empty() {
                return Err(CliError::Config("plotdata needs at least one input".into()));
            }
            self.plotdata = Some(PlotdataSection { inputs: Some(inputs) });
            return Ok(self);
        }
        let default_point = if command == CommandName::Simplicial { "median" } else { "inverse-k" };
        let default_model = match command {
            CommandName::Simplicial => "uniform",
            _ => "gaussian_unit",
        };
        let problem = self.problem.get_or_insert_with(ProblemSection::default);
        problem.model.get_or_insert_with(|| default_model.into());
        problem.point.get_or_insert_with(|| default_point.into());
        match command {
            CommandName::Analytic | CommandName::Plotdata => {}
            CommandName::Bounds => {
                let mut s = bounds.unwrap_or_default();
                s.depths.get_or_insert_with(|| (0..=10).map(|i| 1usize << i).collect());
                positive_list("depths", s.depths.as_deref())?;
                positive("proj_d", s.proj_d)?;
                self.bounds = Some(s);
            }
            CommandName::Admissible => {
                let mut s = admissible.unwrap_or_default();
                s.assumptions.get_or_insert_with(|| "AIII".into());
                self.admissible = Some(s);
            }
            CommandName::Empirical => {
                let mut s = empirical.unwrap_or_default();
                let n = *s.n.get_or_insert(2);
                s.seeds.get_or_insert(100);
                let family = s.family.get_or_insert_with(|| "coordinates".into()).clone();
                match family.as_str() {
                    "coordinates" => {
                        s.k.get_or_insert(50 * n);
                    }
                    "random-sparse" => {
                        s.k.get_or_insert(50 * n);
                        s.count.get_or_insert(500);
                        s.support_size.get_or_insert(3);
                    }
                    "markov" => {
                        s.depths.get_or_insert_with(|| vec![4, 16, 64]);
                    }
                    other => {
                        return Err(CliError::Config(format!(
                            "unknown family {other:?}; expected coordinates, random-sparse or markov"
                        )))
                    }
                }
                for (name, v) in [("n", s.n), ("K", s.k), ("seeds", s.seeds), ("count", s.count), ("support_size", s.support_size)] {
                    positive(name, v)?;
                }
                positive_list("n_grid", s.n_grid.as_deref())?;
                positive_list("depths", s.depths.as_deref())?;
                self.empirical = Some(s);
            }
            CommandName::Simplicial => {
                let mut s = simplicial.unwrap_or_default();
                s.n.get_or_insert(4);
                s.d.get_or_insert(2);
                s.kmax.get_or_insert(200);
                s.seeds.get_or_insert(100);
                s.budget.get_or_insert(10_000_000);
                s.mc_draws.get_or_insert(100_000);
                for (name, v) in [
                    ("n", s.n),
                    ("d", s.d),
                    ("kmax", s.kmax),
                    ("seeds", s.seeds),
                    ("budget", s.budget.map(|b| b as usize)),
                    ("mc_draws", s.mc_draws),
                ] {
                    positive(name, v)?;
                }
                self.simplicial = Some(s);
            }
        }
        Ok(self)
    }
}

fn positive(name: &str, v: Option<usize>) -> Result<(), CliError> {
    match v {
        Some(0) => Err(CliError::Config(format!("{name} must be at least 1"))),
        _ => Ok(()),
    }
}

fn positive_list(name: &str, v: Option<&[usize]>) -> Result<(), CliError> {
    match v {
        Some([]) => Err(CliError::Config(format!("{name} must not be empty"))),
        Some(xs) if xs.contains(&0) => Err(CliError::Config(format!("{name} entries must be at least 1"))),
        _ => Ok(()),
    }
}
