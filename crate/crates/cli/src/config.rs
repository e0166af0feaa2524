//! Run configuration: TOML file, flag overrides, per-experiment defaults.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use fermistab::experiments::dynamics::{InitialState, LocalObservable};
use fermistab::fourier::{DEFAULT_BETAS, DEFAULT_ETAS, DEFAULT_GRID, DEFAULT_ORDERS};
use fermistab::PerturbationMode;
use serde::{Deserialize, Serialize};

pub const OUTPUT_DIR_ENV: &str = "FERMISTAB_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "results";
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    SshStability,
    Dynamics,
    Gibbs,
    Anderson,
    NonlocalCounterexample,
    ThermoExtrapolate,
    Adiabatic,
    FourierCertify,
    OracleCheck,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::SshStability => "ssh-stability",
            Experiment::Dynamics => "dynamics",
            Experiment::Gibbs => "gibbs",
            Experiment::Anderson => "anderson",
            Experiment::NonlocalCounterexample => "nonlocal-counterexample",
            Experiment::ThermoExtrapolate => "thermo-extrapolate",
            Experiment::Adiabatic => "adiabatic",
            Experiment::FourierCertify => "fourier-certify",
            Experiment::OracleCheck => "oracle-check",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Panels of the ground-state stability figure, plus the clean gap scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Panel {
    /// Error against system size.
    A,
    /// Error against `δ` at the largest size.
    B,
    /// Error against `J` at the largest size.
    C,
    /// Single-particle gap of the clean ring against size.
    Gap,
}

/// Everything a run depends on. Every field is optional in the file; the
/// resolved copy echoed into the summary has the defaults filled in and
/// leaves out keys the experiment does not use.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instances: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<PerturbationMode>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    #[serde(rename = "J")]
    pub j: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    #[serde(rename = "T")]
    pub total_time: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    #[serde(rename = "M")]
    pub m: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub panel: Option<Vec<Panel>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_step: Option<f64>,

    /// Couplings of the ssh-stability peak scan.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_scan: Option<Vec<f64>>,
    /// `δ` of the ssh-stability peak scan.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan_delta: Option<f64>,
    /// Ring sizes of the gap scan.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_n: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<InitialState>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observable: Option<LocalObservable>,
    /// Anderson window for the clean ring.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clean_window: Option<usize>,
    /// Adiabatic target precision per unit `δ`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision_scale: Option<f64>,
    /// Clean sizes fitted to choose the adiabatic ring sizes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extrapolation_n: Option<Vec<usize>>,
    /// Largest change of the adiabatic result allowed when the step is halved.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence_tolerance: Option<f64>,
    /// Uniform points of the certification grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn fail<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($field:ident),+) => {
        RunConfig { $($field: $top.$field.or($base.$field)),+ }
    };
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
    }

    /// Field-wise `top` over `self`.
    pub fn overlay(self, top: RunConfig) -> RunConfig {
        overlay!(
            self,
            top,
            experiment,
            seed,
            instances,
            threads,
            output_dir,
            mode,
            delta,
            n,
            j,
            t,
            total_time,
            beta,
            m,
            eta,
            panel,
            time_step,
            j_scan,
            scan_delta,
            gap_n,
            initial_state,
            observable,
            clean_window,
            precision_scale,
            extrapolation_n,
            convergence_tolerance,
            grid_points
        )
    }

    /// Fills the defaults of `experiment` and validates every grid it uses.
    /// `env_output_dir` is the fallback when neither file nor flags set one.
    pub fn resolve(
        mut self,
        experiment: Experiment,
        env_output_dir: Option<PathBuf>,
    ) -> Result<RunConfig, ConfigError> {
        if let Some(e) = self.experiment {
            if e != experiment {
                return fail(format!(
                    "config is for experiment '{e}', but '{experiment}' was requested"
                ));
            }
        }
        self.experiment = Some(experiment);
        self.seed.get_or_insert(DEFAULT_SEED);
        self.threads.get_or_insert(0);
        if self.output_dir.is_none() {
            self.output_dir =
                Some(env_output_dir.unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)));
        }
        let ground_deltas = || vec![0.001, 0.003, 0.01, 0.03, 0.1];
        match experiment {
            Experiment::SshStability => {
                self.mode.get_or_insert_with(Default::default);
                self.instances.get_or_insert(500);
                self.delta.get_or_insert_with(ground_deltas);
                self.n.get_or_insert_with(|| vec![50, 100, 200, 400]);
                self.j.get_or_insert_with(|| vec![0.5, 1.0, 1.5]);
                self.panel
                    .get_or_insert_with(|| vec![Panel::A, Panel::B, Panel::C]);
                self.j_scan.get_or_insert_with(|| {
                    (0..=20).map(|k| f64::from(50 + 5 * k) / 100.0).collect()
                });
                self.scan_delta.get_or_insert(0.03);
                // n ≡ 2 mod 4 keeps the critical ring free of exact zero modes
                self.gap_n
                    .get_or_insert_with(|| vec![50, 98, 202, 402, 802]);
                self.check_ssh_sizes("n", &self.n)?;
                self.check_ssh_sizes("gap_n", &self.gap_n)?;
                self.check_couplings("J", &self.j)?;
                self.check_couplings("j_scan", &self.j_scan)?;
                self.check_deltas()?;
                check_nonnegative("scan_delta", self.scan_delta.iter())?;
            }
            Experiment::Dynamics => {
                self.mode.get_or_insert_with(Default::default);
                self.instances.get_or_insert(100);
                self.delta.get_or_insert_with(|| vec![0.01, 0.03, 0.1]);
                self.n.get_or_insert_with(|| vec![100, 400]);
                self.j.get_or_insert_with(|| vec![1.0]);
                self.t.get_or_insert_with(|| vec![0.5, 1.0, 2.0, 4.0, 8.0]);
                self.initial_state.get_or_insert_with(Default::default);
                self.observable.get_or_insert_with(Default::default);
                self.check_ssh_sizes("n", &self.n)?;
                self.check_single_coupling()?;
                self.check_deltas()?;
                check_nonnegative("t", self.t.iter().flatten())?;
            }
            Experiment::Gibbs => {
                self.mode.get_or_insert_with(Default::default);
                self.instances.get_or_insert(200);
                self.delta
                    .get_or_insert_with(|| vec![0.003, 0.01, 0.03, 0.1]);
                self.n.get_or_insert_with(|| vec![200, 400]);
                self.j.get_or_insert_with(|| vec![1.0]);
                self.beta.get_or_insert_with(|| vec![1.0, 2.0, 5.0, 10.0]);
                self.check_ssh_sizes("n", &self.n)?;
                self.check_single_coupling()?;
                self.check_deltas()?;
                check_nonnegative("beta", self.beta.iter().flatten())?;
            }
            Experiment::Anderson => {
                self.instances.get_or_insert(100);
                self.delta.get_or_insert_with(|| vec![0.0, 0.1, 0.25, 0.5]);
                self.n.get_or_insert_with(|| vec![100, 200, 400]);
                self.clean_window.get_or_insert(10);
                self.check_deltas()?;
                if self.n.iter().flatten().any(|&n| n < 3) {
                    return fail("anderson rings need n >= 3");
                }
                if self.clean_window == Some(0) {
                    return fail("clean_window must be positive");
                }
            }
            Experiment::NonlocalCounterexample => {
                self.delta.get_or_insert_with(ground_deltas);
                self.n.get_or_insert_with(|| vec![10, 100, 1000, 10_000]);
                self.check_deltas()?;
            }
            Experiment::ThermoExtrapolate => {
                self.j.get_or_insert_with(|| vec![1.0, 0.5]);
                // n ≡ 0 mod 4: the critical correction keeps one sign along the grid
                self.n.get_or_insert_with(|| vec![52, 100, 200, 400, 800]);
                self.check_ssh_sizes("n", &self.n)?;
                self.check_couplings("J", &self.j)?;
            }
            Experiment::Adiabatic => {
                self.instances.get_or_insert(4);
                self.delta.get_or_insert_with(|| vec![0.003, 0.01, 0.03]);
                self.total_time.get_or_insert_with(|| {
                    vec![10.0, 30.0, 100.0, 300.0, 1000.0, 3000.0, 10_000.0]
                });
                self.time_step.get_or_insert(0.1);
                self.precision_scale.get_or_insert(0.01);
                self.extrapolation_n
                    .get_or_insert_with(|| vec![52, 100, 200, 400]);
                self.convergence_tolerance.get_or_insert(1e-6);
                match self.mode {
                    None => self.mode = Some(PerturbationMode::ExistingTerms),
                    Some(PerturbationMode::ExistingTerms) => {}
                    Some(m) => {
                        return fail(format!(
                            "adiabatic runs only support existing-terms mode, got {m:?}"
                        ))
                    }
                }
                self.check_deltas()?;
                self.check_ssh_sizes("extrapolation_n", &self.extrapolation_n)?;
                if let Some(n) = &self.n {
                    self.check_ssh_sizes("n", &self.n)?;
                    if n.len() != self.delta.as_ref().map_or(0, Vec::len) {
                        return fail("adiabatic n, when given, needs one size per delta");
                    }
                }
                check_positive("T", self.total_time.iter().flatten())?;
                check_positive("time_step", self.time_step.iter())?;
                check_positive("precision_scale", self.precision_scale.iter())?;
                check_positive("convergence_tolerance", self.convergence_tolerance.iter())?;
            }
            Experiment::FourierCertify => {
                self.m.get_or_insert_with(|| DEFAULT_ORDERS.to_vec());
                self.beta.get_or_insert_with(|| DEFAULT_BETAS.to_vec());
                self.eta.get_or_insert_with(|| DEFAULT_ETAS.to_vec());
                self.grid_points.get_or_insert(DEFAULT_GRID);
                if self.m.iter().flatten().any(|&m| m == 0) {
                    return fail("M must be >= 1");
                }
                check_positive("beta", self.beta.iter().flatten())?;
                if self
                    .eta
                    .iter()
                    .flatten()
                    .any(|&e| !(e > 0.0 && e < std::f64::consts::FRAC_PI_2))
                {
                    return fail("eta must lie in (0, π/2)");
                }
                if self.grid_points.is_some_and(|p| p < 2) {
                    return fail("grid_points must be >= 2");
                }
            }
            Experiment::OracleCheck => {
                self.instances.get_or_insert(20);
                self.beta.get_or_insert_with(|| vec![1.0]);
                self.t.get_or_insert_with(|| vec![1.0]);
                check_positive("beta", self.beta.iter().flatten())?;
                check_nonnegative("t", self.t.iter().flatten())?;
            }
        }
        if self.instances == Some(0) {
            return fail("instances must be positive");
        }
        Ok(self)
    }

    fn check_deltas(&self) -> Result<(), ConfigError> {
        check_nonnegative("delta", self.delta.iter().flatten())
    }

    fn check_couplings(&self, name: &str, j: &Option<Vec<f64>>) -> Result<(), ConfigError> {
        check_nonnegative(name, j.iter().flatten())
    }

    fn check_single_coupling(&self) -> Result<(), ConfigError> {
        match self.j.as_deref() {
            Some([j]) if j.is_finite() && *j >= 0.0 => Ok(()),
            _ => fail("this experiment takes a single nonnegative J"),
        }
    }

    fn check_ssh_sizes(&self, name: &str, n: &Option<Vec<usize>>) -> Result<(), ConfigError> {
        match n.iter().flatten().find(|&&n| n < 4 || n % 2 == 1) {
            Some(bad) => fail(format!(
                "{name}: SSH rings need an even number of sites >= 4, got {bad}"
            )),
            None => Ok(()),
        }
    }

    /// The single coupling of dynamics and Gibbs runs.
    pub fn coupling(&self) -> f64 {
        self.j
            .as_ref()
            .and_then(|j| j.first().copied())
            .unwrap_or(1.0)
    }
}

fn check_nonnegative<'a>(
    name: &str,
    mut values: impl Iterator<Item = &'a f64>,
) -> Result<(), ConfigError> {
    match values.find(|v| !(v.is_finite() && **v >= 0.0)) {
        Some(v) => fail(format!("{name} must be finite and >= 0, got {v}")),
        None => Ok(()),
    }
}

fn check_positive<'a>(
    name: &str,
    mut values: impl Iterator<Item = &'a f64>,
) -> Result<(), ConfigError> {
    match values.find(|v| !(v.is_finite() && **v > 0.0)) {
        Some(v) => fail(format!("{name} must be finite and > 0, got {v}")),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("seed = 1\nwat = 2\n").is_err());
        let c = RunConfig::from_toml(
            "seed = 1\nJ = [0.5]\nT = [10.0]\nM = [3]\nmode = \"all-local-terms\"\n",
        )
        .unwrap();
        assert_eq!(c.j, Some(vec![0.5]));
        assert_eq!(c.total_time, Some(vec![10.0]));
        assert_eq!(c.m, Some(vec![3]));
        assert_eq!(c.mode, Some(PerturbationMode::AllLocalTerms));
    }

    #[test]
    fn flags_win_over_the_file() {
        let file = RunConfig {
            seed: Some(1),
            delta: Some(vec![0.1]),
            ..Default::default()
        };
        let flags = RunConfig {
            seed: Some(2),
            ..Default::default()
        };
        let merged = file.overlay(flags);
        assert_eq!(merged.seed, Some(2));
        assert_eq!(merged.delta, Some(vec![0.1]));
    }

    #[test]
    fn defaults_and_output_dir_precedence() {
        let r = RunConfig::default()
            .resolve(Experiment::SshStability, Some("env".into()))
            .unwrap();
        assert_eq!(r.output_dir, Some(PathBuf::from("env")));
        assert_eq!(r.instances, Some(500));
        assert_eq!(r.j_scan.as_ref().unwrap().len(), 21);
        assert_eq!(r.j_scan.as_ref().unwrap()[10], 1.0);
        let r = RunConfig {
            output_dir: Some("mine".into()),
            ..Default::default()
        }
        .resolve(Experiment::Gibbs, Some("env".into()))
        .unwrap();
        assert_eq!(r.output_dir, Some(PathBuf::from("mine")));
        let r = RunConfig::default()
            .resolve(Experiment::Gibbs, None)
            .unwrap();
        assert_eq!(r.output_dir, Some(PathBuf::from(DEFAULT_OUTPUT_DIR)));
    }

    #[test]
    fn invalid_grids_are_config_errors() {
        let bad = |c: RunConfig, e| c.resolve(e, None).is_err();
        assert!(bad(
            RunConfig {
                n: Some(vec![7]),
                ..Default::default()
            },
            Experiment::SshStability
        ));
        assert!(bad(
            RunConfig {
                delta: Some(vec![-0.1]),
                ..Default::default()
            },
            Experiment::Gibbs
        ));
        assert!(bad(
            RunConfig {
                j: Some(vec![0.5, 1.0]),
                ..Default::default()
            },
            Experiment::Dynamics
        ));
        assert!(bad(
            RunConfig {
                eta: Some(vec![2.0]),
                ..Default::default()
            },
            Experiment::FourierCertify
        ));
        assert!(bad(
            RunConfig {
                mode: Some(PerturbationMode::AllLocalTerms),
                ..Default::default()
            },
            Experiment::Adiabatic
        ));
        assert!(bad(
            RunConfig {
                instances: Some(0),
                ..Default::default()
            },
            Experiment::Anderson
        ));
        assert!(bad(
            RunConfig {
                experiment: Some(Experiment::Gibbs),
                ..Default::default()
            },
            Experiment::Dynamics
        ));
    }
}
