//! Figure and sweep datasets.
//!
//! One row per grid point. Analytic energies are exact expectations: over
//! the bearing for a fixed inter-user distance, over the PPP otherwise. The
//! Monte Carlo column is the mean simulated protocol energy per round,
//! with geometry drawn the same way as the analytic expectation.

use std::io::Write;

use anyhow::Result;
use nncc::DistributionContext;
use nncc::montecarlo::{run_protocol, GeometrySampler};
use nncc::{PowerModel, RandomStream};

use crate::spec::{ExperimentSpec, Placement, SpecError, SweepVar};

pub const CSV_HEADER: [&str; 8] = [
    "swept_var",
    "value",
    "e_nncc_analytic",
    "e_conv_analytic",
    "e_nncc_mc",
    "e_nncc_mc_stderr",
    "ee_nncc",
    "ee_conv",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub swept_var: SweepVar,
    pub value: f64,
    /// W (J per unit slot)
    pub e_nncc_analytic: f64,
    pub e_conv_analytic: f64,
    pub e_nncc_mc: f64,
    pub e_nncc_mc_stderr: f64,
    /// bits/J
    pub ee_nncc: f64,
    pub ee_conv: f64,
}

/// Twelve significant digits.
pub fn format_number(x: f64) -> String {
    format!("{x:.11e}")
}

impl Row {
    pub fn record(&self) -> [String; 8] {
        [
            self.swept_var.name().to_string(),
            format_number(self.value),
            format_number(self.e_nncc_analytic),
            format_number(self.e_conv_analytic),
            format_number(self.e_nncc_mc),
            format_number(self.e_nncc_mc_stderr),
            format_number(self.ee_nncc),
            format_number(self.ee_conv),
        ]
    }
}

/// Analytic energies (W) of both schemes at one point.
pub fn analytic_energies(model: &PowerModel, r1: f64, placement: Placement) -> Result<(f64, f64)> {
    Ok(match placement {
        Placement::FixedDistance(r) => (
            model.nncc_total_bearing_averaged(r1, r),
            model.conventional_total_bearing_averaged(r1, r),
        ),
        Placement::Poisson => {
            let ctx = DistributionContext::new(*model, r1)?;
            (ctx.expected_power(), ctx.conventional_expected_power())
        }
    })
}

/// Computes one row; grid point `index` simulates on run `(seed, index)`.
pub fn compute_row(spec: &ExperimentSpec, var: SweepVar, value: f64, index: u64, with_mc: bool) -> Result<Row> {
    let params = spec.params_at(var, value).validate()?;
    let model = PowerModel::new(params)?;
    let r1 = if var == SweepVar::R1 { value } else { spec.r1 };
    let placement = match (var, spec.placement) {
        (SweepVar::R, _) => Placement::FixedDistance(value),
        (_, p) => p,
    };
    let (e_nncc, e_conv) = analytic_energies(&model, r1, placement)?;
    let (mc_mean, mc_stderr) = if with_mc {
        let sampler = match placement {
            Placement::FixedDistance(r) => GeometrySampler::Bearing { r1, r },
            Placement::Poisson => GeometrySampler::Poisson { rho: params.rho(), r1 },
        };
        let rep = run_protocol(spec.n_trials, sampler, &model, &RandomStream::new(spec.seed, index))?;
        (rep.energy.mean, rep.energy.stderr())
    } else {
        (f64::NAN, f64::NAN)
    };
    let bits = 2.0 * params.rate();
    Ok(Row {
        swept_var: var,
        value,
        e_nncc_analytic: e_nncc,
        e_conv_analytic: e_conv,
        e_nncc_mc: mc_mean,
        e_nncc_mc_stderr: mc_stderr,
        ee_nncc: bits / e_nncc,
        ee_conv: bits / e_conv,
    })
}

/// All rows of a figure or sweep spec, in grid order.
pub fn compute_rows(spec: &ExperimentSpec, with_mc: bool) -> Result<Vec<Row>> {
    spec.validate()?;
    let sweep = spec.sweep.ok_or(SpecError::MissingSweep)?;
    sweep
        .values()
        .into_iter()
        .enumerate()
        .map(|(i, v)| compute_row(spec, sweep.var, v, i as u64, with_mc))
        .collect()
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}
