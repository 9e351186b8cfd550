use std::fmt;
use std::path::PathBuf;

use nncc::montecarlo::MIN_TRIALS;
use nncc::SystemParams;
use serde::Deserialize;
use thiserror::Error;

use crate::config::ConfigFile;

#[derive(Debug, Error, PartialEq)]
pub enum SpecError {
    #[error("unknown figure {0}; expected 3, 4, 5 or 6")]
    UnknownFigure(u8),
    #[error("sweep range invalid: {0}")]
    Range(String),
    #[error("a sweep needs sweep_var, sweep_min, sweep_max and sweep_count")]
    MissingSweep,
    #[error("{field} must be positive and finite, got {value}")]
    Distance { field: &'static str, value: f64 },
    #[error("simulation budget too small: {requested} trials requested, at least {required} required")]
    Budget { requested: u64, required: u64 },
    #[error(transparent)]
    Param(#[from] nncc::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Figure(u8),
    Sweep,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// Quantities a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepVar {
    R1,
    R,
    Rho,
    #[value(name = "p_out_target")]
    POutTarget,
    Rate,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::R1 => "r1",
            SweepVar::R => "r",
            SweepVar::Rho => "rho",
            SweepVar::POutTarget => "p_out_target",
            SweepVar::Rate => "rate",
        }
    }
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub var: SweepVar,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl SweepRange {
    pub fn validate(&self) -> Result<(), SpecError> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(SpecError::Range(format!("need min < max, got [{}, {}]", self.min, self.max)));
        }
        if self.count < 2 {
            return Err(SpecError::Range(format!("need count >= 2, got {}", self.count)));
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return Err(SpecError::Range(format!("log spacing needs min > 0, got {}", self.min)));
        }
        Ok(())
    }

    /// Grid values; the end points are exact.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i + 1 == self.count {
                    return self.max;
                }
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * t,
                    Spacing::Log => (self.min.ln() + (self.max / self.min).ln() * t).exp(),
                }
            })
            .collect()
    }
}

/// Where U2 sits relative to U1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Placement {
    /// Fixed inter-user distance, uniform bearing.
    FixedDistance(f64),
    /// Nearest neighbour of the PPP with density `rho`.
    Poisson,
}

/// Everything one CLI invocation runs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub params: SystemParams,
    pub r1: f64,
    pub placement: Placement,
    pub sweep: Option<SweepRange>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub n_trials: u64,
    pub workers: Option<usize>,
    /// Fault injection: multiplies the cooperative cellular coefficients.
    pub eta_scale: f64,
}

pub const DEFAULT_SEED: u64 = 20_240_917;
pub const DEFAULT_FIGURE_TRIALS: u64 = 20_000;
pub const DEFAULT_VALIDATE_TRIALS: u64 = 1_000_000;
pub const DEFAULT_R1: f64 = 500.0;

impl ExperimentSpec {
    fn base(kind: ExperimentKind) -> Self {
        ExperimentSpec {
            kind,
            params: SystemParams::default(),
            r1: DEFAULT_R1,
            placement: Placement::Poisson,
            sweep: None,
            out: None,
            seed: DEFAULT_SEED,
            n_trials: match kind {
                ExperimentKind::Validate => DEFAULT_VALIDATE_TRIALS,
                _ => DEFAULT_FIGURE_TRIALS,
            },
            workers: None,
            eta_scale: 1.0,
        }
    }

    /// Preset of one of the figure datasets.
    pub fn figure(n: u8) -> Result<Self, SpecError> {
        let mut s = Self::base(ExperimentKind::Figure(n));
        match n {
            3 | 4 => {
                s.placement = Placement::FixedDistance(20.0);
                s.params.p_out_target = 1e-3;
                s.params.rate = 1e5;
                s.sweep = Some(SweepRange {
                    var: SweepVar::R1,
                    min: 100.0,
                    max: 3000.0,
                    count: 30,
                    spacing: Spacing::Linear,
                });
            }
            5 => {
                s.r1 = 2000.0;
                s.params.rate = 1e7;
                s.params.p_out_target = 1e-3;
                s.sweep = Some(SweepRange {
                    var: SweepVar::Rho,
                    min: 1e-5,
                    max: 1e-2,
                    count: 19,
                    spacing: Spacing::Log,
                });
            }
            6 => {
                s.r1 = 150.0;
                s.params.rate = 1e6;
                s.params.rho = 1e-4;
                s.sweep = Some(SweepRange {
                    var: SweepVar::POutTarget,
                    min: 1e-4,
                    max: 1e-1,
                    count: 19,
                    spacing: Spacing::Log,
                });
            }
            other => return Err(SpecError::UnknownFigure(other)),
        }
        Ok(s)
    }

    pub fn sweep() -> Self {
        Self::base(ExperimentKind::Sweep)
    }

    pub fn validate_run() -> Self {
        let mut s = Self::base(ExperimentKind::Validate);
        s.placement = Placement::FixedDistance(20.0);
        s
    }

    /// Applies a configuration layer. A figure keeps its swept variable;
    /// the other sweep keys only affect `sweep` runs.
    pub fn apply(&mut self, c: &ConfigFile) -> Result<(), SpecError> {
        c.apply_params(&mut self.params);
        if let Some(r1) = c.r1 {
            self.r1 = r1;
        }
        if let Some(r) = c.r {
            self.placement = Placement::FixedDistance(r);
        }
        if let Some(seed) = c.seed {
            self.seed = seed;
        }
        if let Some(n) = c.trials {
            self.n_trials = n;
        }
        if c.workers.is_some() {
            self.workers = c.workers;
        }
        if c.out.is_some() {
            self.out = c.out.clone();
        }
        if self.kind == ExperimentKind::Sweep {
            let prev = self.sweep;
            let var = c.sweep_var.or(prev.map(|s| s.var));
            let min = c.sweep_min.or(prev.map(|s| s.min));
            let max = c.sweep_max.or(prev.map(|s| s.max));
            let count = c.sweep_count.or(prev.map(|s| s.count));
            let spacing = c.sweep_spacing.or(prev.map(|s| s.spacing)).unwrap_or(Spacing::Linear);
            self.sweep = match (var, min, max, count) {
                (Some(var), Some(min), Some(max), Some(count)) => Some(SweepRange {
                    var,
                    min,
                    max,
                    count,
                    spacing,
                }),
                (None, None, None, None) => None,
                _ => return Err(SpecError::MissingSweep),
            };
        }
        Ok(())
    }

    /// Checks everything the run needs before any work starts.
    pub fn validate(&self) -> Result<(), SpecError> {
        self.params.validate()?;
        if !(self.r1.is_finite() && self.r1 > 0.0) {
            return Err(SpecError::Distance {
                field: "r1",
                value: self.r1,
            });
        }
        if let Placement::FixedDistance(r) = self.placement {
            if !(r.is_finite() && r > 0.0) {
                return Err(SpecError::Distance { field: "r", value: r });
            }
        }
        if self.n_trials < MIN_TRIALS {
            return Err(SpecError::Budget {
                requested: self.n_trials,
                required: MIN_TRIALS,
            });
        }
        match self.kind {
            ExperimentKind::Figure(n) if !(3..=6).contains(&n) => return Err(SpecError::UnknownFigure(n)),
            ExperimentKind::Figure(_) | ExperimentKind::Sweep => {
                let sweep = self.sweep.ok_or(SpecError::MissingSweep)?;
                sweep.validate()?;
                // Every point must be a valid parameter set.
                for v in sweep.values() {
                    self.params_at(sweep.var, v).validate()?;
                    if matches!(sweep.var, SweepVar::R1 | SweepVar::R) && v <= 0.0 {
                        return Err(SpecError::Distance {
                            field: sweep.var.name(),
                            value: v,
                        });
                    }
                }
            }
            ExperimentKind::Validate => {}
        }
        Ok(())
    }

    /// System parameters with `var` set to `value` (distances are not
    /// system parameters and leave them unchanged).
    pub fn params_at(&self, var: SweepVar, value: f64) -> SystemParams {
        let mut p = self.params;
        match var {
            SweepVar::Rho => p.rho = value,
            SweepVar::POutTarget => p.p_out_target = value,
            SweepVar::Rate => p.rate = value,
            SweepVar::R1 | SweepVar::R => {}
        }
        p
    }
}
