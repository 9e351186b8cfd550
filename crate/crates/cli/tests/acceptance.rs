//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::Instant;

use nncc::montecarlo::{estimate_outage, ks_distance_with, sample_power_distribution};
use nncc::powermodel::{
    per_link_outage_conventional, per_link_outage_nncc, per_link_outage_nncc_bisection, short_range_outage_prob,
};
use nncc::{DistributionContext, Geometry, PowerModel, QuadraticForm, RandomStream, SystemParams};
use nncc_cli::dataset::compute_rows;
use nncc_cli::spec::ExperimentSpec;
use nncc_cli::validate::{validate_report, EXPECTATION_SETS};

type Outcome = Result<(bool, String), Box<dyn std::error::Error>>;

const SEED: u64 = 20_240_917;

fn fig3_model(p_out: f64) -> Result<PowerModel, nncc::Error> {
    let mut p = ExperimentSpec::figure(3).expect("preset").params;
    p.p_out_target = p_out;
    PowerModel::new(p.validate()?)
}

fn inversion_closure() -> Outcome {
    let mut worst: f64 = 0.0;
    for p_out in [1e-4, 1e-3, 1e-2] {
        let m = fig3_model(p_out)?;
        for r in [1.0, 20.0, 100.0] {
            let got = short_range_outage_prob(m.coefficients().zeta * r * r, r, m.params())?;
            worst = worst.max((got - p_out).abs());
        }
    }
    Ok((worst <= 1e-12, format!("max |P_short(zeta r^2) - P_out| = {worst:.3e} (bound 1e-12)")))
}

fn per_link_target() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 1..=100 {
        let p = 0.2 * k as f64 / 100.0;
        worst = worst.max((per_link_outage_nncc(p)? - per_link_outage_nncc_bisection(p)?).abs());
    }
    let at = per_link_outage_nncc(1e-3f64)?;
    Ok((
        worst <= 1e-10 && (at - 0.029743).abs() <= 1e-6,
        format!("max gap to bisection {worst:.3e} (bound 1e-10); value at 1e-3 = {at:.9} (0.029743 +- 1e-6)"),
    ))
}

struct OutageRun {
    conventional: nncc::montecarlo::Rate,
    composite: nncc::montecarlo::Rate,
    delta0: nncc::montecarlo::Rate,
    per_message: nncc::montecarlo::Rate,
    p_out: f64,
}

fn outage_run() -> Result<OutageRun, Box<dyn std::error::Error>> {
    let spec = ExperimentSpec::validate_run();
    let lin = spec.params.validate()?;
    let geom = Geometry::new(spec.r1, 20.0, 2.0 * PI / 3.0)?;
    let rep = estimate_outage(10_000_000, &geom, &lin, &RandomStream::new(SEED, 100))?;
    let rates = rep.rates.ok_or("outage run without rates")?;
    Ok(OutageRun {
        conventional: rates.conventional_outage,
        composite: rates.composite_outage,
        delta0: rates.delta0,
        per_message: rates.d1_outage,
        p_out: lin.p_out(),
    })
}

fn conventional_target(run: &OutageRun) -> Outcome {
    let pc = per_link_outage_conventional(1e-3f64)?;
    let z = run.conventional.z_score(run.p_out);
    Ok((
        (pc - 5.00125e-4).abs() <= 1e-9 && z.abs() <= 3.0,
        format!(
            "per-link target {pc:.9e} (5.00125e-4 +- 1e-9); simulated conventional outage {:.4e} over {} trials, z = {z:.3} (bound 3)",
            run.conventional.value(),
            run.conventional.n
        ),
    ))
}

fn quadratic_totals() -> Outcome {
    let m = fig3_model(1e-3)?;
    let mut stream = RandomStream::new(SEED, 101);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let r1 = 10.0 + 4990.0 * stream.uniform();
        let r = 500.0 * stream.uniform();
        let theta = 2.0 * PI * stream.uniform();
        let total = m.nncc_breakdown(&Geometry::new(r1, r, theta)?).total_nncc;
        let quad = QuadraticForm::from_model(&m, r1).eval(r, theta);
        worst = worst.max(((total - quad) / total).abs());
    }
    Ok((worst <= 1e-9, format!("max relative gap on 10^4 triples = {worst:.3e} (bound 1e-9)")))
}

fn protocol_statistics(run: &OutageRun) -> Outcome {
    let q = (1.0 - run.p_out) * (1.0 - run.p_out);
    let z_delta = run.delta0.z_score(q);
    let z_comp = run.composite.z_score(run.p_out);
    Ok((
        z_delta.abs() <= 3.0 && z_comp.abs() <= 3.0,
        format!(
            "Pr(delta=0) = {:.6} vs {q:.6}, z = {z_delta:.3}; composite outage {:.4e} vs {:.1e}, z = {z_comp:.3} (bound 3); per-message D1 loss {:.4e} (reported)",
            run.delta0.value(),
            run.composite.value(),
            run.p_out,
            run.per_message.value()
        ),
    ))
}

fn fig5_params() -> SystemParams {
    let mut p = ExperimentSpec::figure(5).expect("preset").params;
    p.rho = 1e-4;
    p
}

fn distribution_ks() -> Outcome {
    let lin = fig5_params().validate()?;
    let ctx = DistributionContext::new(PowerModel::new(lin)?, 2000.0)?;
    let rep = sample_power_distribution(1_000_000, 1e-4, 2000.0, &lin, &RandomStream::new(SEED, 102))?;
    let ks = ks_distance_with(&rep.samples, |p| ctx.cdf_reference(p))?;
    Ok((ks < 0.005, format!("KS distance over 10^6 samples = {ks:.4e} (bound 0.005)")))
}

fn expectation_agreement() -> Outcome {
    let mut ok = true;
    let mut worst_rel: f64 = 0.0;
    let mut worst_z: f64 = 0.0;
    for (k, (rho, r1)) in EXPECTATION_SETS.into_iter().enumerate() {
        let mut p = fig5_params();
        p.rho = rho;
        let lin = p.validate()?;
        let ctx = DistributionContext::new(PowerModel::new(lin)?, r1)?;
        let closed = ctx.expected_power();
        let quad = ctx.expected_power_quadrature()?;
        let rel = ((closed - quad) / closed).abs();
        let rep = sample_power_distribution(1_000_000, rho, r1, &lin, &RandomStream::new(SEED, 110 + k as u64))?;
        let z = (rep.energy.mean - closed) / rep.energy.stderr();
        ok &= rel <= 1e-9 && z.abs() <= 3.0;
        worst_rel = worst_rel.max(rel);
        worst_z = worst_z.max(z.abs());
    }
    Ok((
        ok,
        format!("5 sets: max closed-vs-quadrature relative gap {worst_rel:.3e} (bound 1e-9), max |z| of simulated mean {worst_z:.3} (bound 3)"),
    ))
}

fn discrepancy_report() -> Outcome {
    let mut spec = ExperimentSpec::validate_run();
    spec.params = fig5_params();
    spec.r1 = 2000.0;
    spec.n_trials = 20_000;
    let text = validate_report(&spec)?.render();
    let gap = text.lines().find(|l| l.starts_with("INFO max |printed CDF - reference CDF|"));
    let integral = text.lines().find(|l| l.starts_with("INFO integral of the printed PDF - 1"));
    let found = gap.is_some() && integral.is_some();
    Ok((
        found,
        format!(
            "report quantifies the printed law: [{}] [{}]",
            gap.map_or("missing", |l| l.trim_start_matches("INFO ")),
            integral.map_or("missing", |l| l.trim_start_matches("INFO "))
        ),
    ))
}

fn figure_shapes() -> Outcome {
    let in_band = |v: f64| (500.0..=3000.0).contains(&v);
    let f3 = compute_rows(&ExperimentSpec::figure(3)?, false)?;
    let f4 = compute_rows(&ExperimentSpec::figure(4)?, false)?;
    let f5 = compute_rows(&ExperimentSpec::figure(5)?, false)?;
    let f6 = compute_rows(&ExperimentSpec::figure(6)?, false)?;
    let s3 = f3.iter().filter(|r| in_band(r.value)).all(|r| r.e_nncc_analytic < r.e_conv_analytic);
    let s4 = f4.iter().filter(|r| in_band(r.value)).all(|r| r.ee_nncc > r.ee_conv);
    let s5 = f5.windows(2).all(|w| w[1].e_nncc_analytic < w[0].e_nncc_analytic);
    let s6 = f6.windows(2).all(|w| w[1].e_nncc_analytic < w[0].e_nncc_analytic);
    Ok((
        s3 && s4 && s5 && s6,
        format!("fig3 NNCC < conventional: {s3}; fig4 EE reversed: {s4}; fig5 decreasing in rho: {s5}; fig6 decreasing in P_out: {s6}"),
    ))
}

fn reproducibility() -> Outcome {
    let run = |workers: &str| -> Result<Vec<u8>, Box<dyn std::error::Error>> {
        let out = Command::new(env!("CARGO_BIN_EXE_nncc"))
            .args(["validate", "--trials", "100000", "--seed", "7", "--workers", workers])
            .output()?;
        if !out.status.success() {
            return Err(format!("validate exited with {}", out.status).into());
        }
        Ok(out.stdout)
    };
    let a = run("1")?;
    let b = run("2")?;
    Ok((
        a == b && !a.is_empty(),
        format!("validate report with 1 and 2 workers: {} and {} bytes, identical = {}", a.len(), b.len(), a == b),
    ))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let run = outage_run();
    let shared = |f: fn(&OutageRun) -> Outcome| -> Outcome {
        match &run {
            Ok(r) => f(r),
            Err(e) => Err(e.to_string().into()),
        }
    };
    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "inversion closure", inversion_closure()),
        (2, "cooperative per-link target", per_link_target()),
        (3, "conventional per-link target", shared(conventional_target)),
        (4, "quadratic form of the total", quadratic_totals()),
        (5, "protocol statistics", shared(protocol_statistics)),
        (6, "distribution ground truth", distribution_ks()),
        (7, "expectation agreement", expectation_agreement()),
        (8, "printed closed-form report", discrepancy_report()),
        (9, "figure shapes", figure_shapes()),
        (10, "reproducibility across worker counts", reproducibility()),
    ];
    let mut failed = 0;
    for (id, name, outcome) in results {
        let (pass, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        if !pass {
            failed += 1;
        }
        println!("{} criterion {id:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} of 10 passed in {:.1} s", 10 - failed, started.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
