//! Run configuration: a JSON file of parameters, overridden key by key by
//! command-line flags.

use std::path::{Path, PathBuf};

use nbldpc::de::DeQuery;
use nbldpc::{DegreeRounding, DegreeSpec, Ensemble, EnsembleConfig, GroupKind};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Every parameter any command understands. All fields are optional; each
/// command resolves the ones it needs and applies its defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub p: Option<u8>,
    pub group: Option<GroupKind>,
    pub lambda: Option<DegreeSpec>,
    pub rho: Option<DegreeSpec>,
    pub f: Option<String>,
    pub n: Option<usize>,
    pub rounding: Option<Rounding>,
    pub seed: Option<u64>,
    pub code: Option<PathBuf>,
    pub channel: Option<PathBuf>,
    pub stream: Option<PathBuf>,
    pub message: Option<PathBuf>,
    pub epsilon: Option<f64>,
    pub max_iters: Option<usize>,
    pub grid: Option<usize>,
    pub eps: Option<Vec<f64>>,
    pub trials: Option<usize>,
    pub grid_trials: Option<usize>,
    pub resolution: Option<usize>,
    pub max_de_iters: Option<usize>,
    pub convergence_delta: Option<f64>,
    pub bisection_tolerance: Option<f64>,
    pub stagnation_tolerance: Option<f64>,
    pub stagnation_window: Option<usize>,
    pub reduce: Option<bool>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),*) => {
        Params { $($field: $top.$field.or($base.$field)),* }
    };
}

impl Params {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = read_file(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    /// `top` wins wherever it sets a value.
    pub fn overlay(self, top: Params) -> Params {
        let base = self;
        overlay!(base, top; p, group, lambda, rho, f, n, rounding, seed, code, channel, stream, message,
            epsilon, max_iters, grid, eps, trials, grid_trials, resolution, max_de_iters, convergence_delta,
            bisection_tolerance, stagnation_tolerance, stagnation_window, reduce)
    }

    pub fn require<T: Clone>(value: &Option<T>, name: &str) -> CliResult<T> {
        value.clone().ok_or_else(|| CliError::Usage(format!("missing required parameter `{name}`")))
    }

    pub fn ensemble(&self) -> CliResult<(Ensemble, EnsembleEcho)> {
        let cfg = EnsembleConfig {
            p: Some(Self::require(&self.p, "p")?),
            group: self.group,
            lambda: Some(Self::require(&self.lambda, "lambda")?),
            rho: Some(Self::require(&self.rho, "rho")?),
            f: self.f.clone(),
            seed: None,
        };
        let ens = cfg.to_ensemble()?;
        let echo = EnsembleEcho::of(&ens);
        Ok((ens, echo))
    }

    pub fn de_query(&self, ensemble: Ensemble) -> CliResult<(DeQuery, DeEcho)> {
        let mut q = DeQuery::new(ensemble);
        q.max_iters = self.max_de_iters.unwrap_or(q.max_iters);
        q.convergence_delta = self.convergence_delta.unwrap_or(q.convergence_delta);
        q.bisection_tolerance = self.bisection_tolerance.unwrap_or(q.bisection_tolerance);
        q.stagnation_tolerance = self.stagnation_tolerance.unwrap_or(q.stagnation_tolerance);
        q.stagnation_window = self.stagnation_window.unwrap_or(q.stagnation_window);
        q.validate()?;
        let echo = DeEcho {
            max_de_iters: q.max_iters,
            convergence_delta: q.convergence_delta,
            bisection_tolerance: q.bisection_tolerance,
            stagnation_tolerance: q.stagnation_tolerance,
            stagnation_window: q.stagnation_window,
        };
        Ok((q, echo))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Rounding {
    #[default]
    Exact,
    Nearest,
}

impl From<Rounding> for DegreeRounding {
    fn from(r: Rounding) -> Self {
        match r {
            Rounding::Exact => DegreeRounding::Exact,
            Rounding::Nearest => DegreeRounding::Nearest,
        }
    }
}

/// Canonical form of a resolved ensemble.
#[derive(Clone, Debug, Serialize)]
pub struct EnsembleEcho {
    pub p: u8,
    pub group: GroupKind,
    pub lambda: String,
    pub rho: String,
    pub f: String,
}

impl EnsembleEcho {
    fn of(ens: &Ensemble) -> Self {
        let f =
            if ens.pdf.is_uniform_over_group(&ens.field) { "uniform".to_string() } else { ens.pdf.format(&ens.field) };
        EnsembleEcho {
            p: ens.field.p(),
            group: ens.kind,
            lambda: ens.degrees.lambda_string(),
            rho: ens.degrees.rho_string(),
            f,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DeEcho {
    pub max_de_iters: usize,
    pub convergence_delta: f64,
    pub bisection_tolerance: f64,
    pub stagnation_tolerance: f64,
    pub stagnation_window: usize,
}

pub fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values() {
        let file: Params = serde_json::from_str(r#"{"p": 2, "n": 300, "seed": 1, "lambda": {"2": 1.0}}"#).unwrap();
        let flags = Params { seed: Some(9), ..Params::default() };
        let merged = file.overlay(flags);
        assert_eq!((merged.p, merged.n, merged.seed), (Some(2), Some(300), Some(9)));
        assert!(merged.lambda.is_some());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<Params>(r#"{"sead": 1}"#).is_err());
    }

    #[test]
    fn ensemble_echo_is_canonical() {
        let params = Params {
            p: Some(2),
            lambda: Some(DegreeSpec::Text("1:1.0@2".into())),
            rho: Some(DegreeSpec::Text("1.0@3".into())),
            ..Params::default()
        };
        let (_, echo) = params.ensemble().unwrap();
        assert_eq!(echo.f, "uniform");
        assert_eq!(echo.group, GroupKind::Field);
        assert!(Params::default().ensemble().is_err());
    }
}
