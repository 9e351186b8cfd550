//! Command-line front end of the nncc toolkit: figure datasets, parameter
//! sweeps and the cross-validation report.

pub mod config;
pub mod dataset;
pub mod spec;
pub mod validate;

use anyhow::Result;

use crate::spec::{ExperimentKind, ExperimentSpec};

/// Rendered output of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub bytes: Vec<u8>,
    /// False when a validation check failed.
    pub passed: bool,
}

/// Runs `spec` on its own worker pool when a worker count is set.
pub fn execute(spec: &ExperimentSpec) -> Result<RunOutput> {
    spec.validate()?;
    match spec.workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build()?;
            pool.install(|| execute_here(spec))
        }
        None => execute_here(spec),
    }
}

fn execute_here(spec: &ExperimentSpec) -> Result<RunOutput> {
    match spec.kind {
        ExperimentKind::Figure(_) | ExperimentKind::Sweep => {
            let rows = dataset::compute_rows(spec, true)?;
            let mut bytes = Vec::new();
            dataset::write_csv(&rows, &mut bytes)?;
            Ok(RunOutput { bytes, passed: true })
        }
        ExperimentKind::Validate => {
            let report = validate::validate_report(spec)?;
            Ok(RunOutput {
                bytes: report.render().into_bytes(),
                passed: report.passed(),
            })
        }
    }
}
