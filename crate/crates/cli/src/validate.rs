//! Cross-validation report.
//!
//! Sections: (a) power-model closure identities, (b) goodness of fit of the
//! sampled power law, (c) expectation agreement, (d) simulated outage
//! against targets, (e) the printed closed forms against the reference law,
//! (f) qualitative shape of the figure datasets. Checks print as
//! `PASS`/`FAIL` lines, measurements without a bound as `INFO` lines. The
//! text depends only on the spec, never on timing or worker count.

use std::f64::consts::PI;
use std::fmt::Write as _;

use anyhow::Result;
use nncc::DistributionContext;
use nncc::geometry::Geometry;
use nncc::montecarlo::{ks_distance_with, run_protocol, sample_power_distribution, GeometrySampler};
use nncc::powermodel::{
    cellular_outage_prob, composite_outage, per_link_outage_conventional, per_link_outage_nncc,
    per_link_outage_nncc_bisection, short_range_outage_prob, Ms,
};
use nncc::{PowerModel, RandomStream, SystemParams};

use crate::dataset::compute_rows;
use crate::spec::{ExperimentSpec, Placement};

/// Bearing of the fixed geometry used by the outage and closure sections.
const FIXED_BEARING: f64 = 2.0 * PI / 3.0;
const DEFAULT_PAIR_DISTANCE: f64 = 20.0;
const SIGMA_BOUND: f64 = 3.0;

/// `(rho, r1)` of the expectation-agreement table.
pub const EXPECTATION_SETS: [(f64, f64); 5] = [(1e-5, 150.0), (1e-4, 2000.0), (1e-3, 500.0), (1e-2, 3000.0), (3e-4, 1000.0)];

// Stream ids of the independent simulation runs inside one report.
const STREAM_QUADRATIC_POINTS: u64 = 1;
const STREAM_POWER_SAMPLES: u64 = 2;
const STREAM_OUTAGE: u64 = 3;
const STREAM_EXPECTATION: u64 = 10;

#[derive(Debug, Clone, PartialEq)]
pub enum Line {
    Check { id: String, pass: bool, text: String },
    Info(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub title: String,
    pub lines: Vec<Line>,
}

impl Section {
    fn new(title: &str) -> Self {
        Section {
            title: title.to_string(),
            lines: Vec::new(),
        }
    }

    fn check(&mut self, id: impl Into<String>, pass: bool, text: impl Into<String>) {
        self.lines.push(Line::Check {
            id: id.into(),
            pass,
            text: text.into(),
        });
    }

    fn info(&mut self, text: impl Into<String>) {
        self.lines.push(Line::Info(text.into()));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub header: Vec<String>,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn checks(&self) -> impl Iterator<Item = (&str, bool, &str)> {
        self.sections.iter().flat_map(|s| &s.lines).filter_map(|l| match l {
            Line::Check { id, pass, text } => Some((id.as_str(), *pass, text.as_str())),
            Line::Info(_) => None,
        })
    }

    pub fn passed(&self) -> bool {
        self.checks().all(|(_, pass, _)| pass)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("# nncc validation report\n");
        for h in &self.header {
            let _ = writeln!(out, "{h}");
        }
        for s in &self.sections {
            let _ = writeln!(out, "\n## {}", s.title);
            for l in &s.lines {
                match l {
                    Line::Check { id, pass, text } => {
                        let _ = writeln!(out, "{} {id} {text}", if *pass { "PASS" } else { "FAIL" });
                    }
                    Line::Info(text) => {
                        let _ = writeln!(out, "INFO {text}");
                    }
                }
            }
        }
        let total = self.checks().count();
        let failed = self.checks().filter(|c| !c.1).count();
        let _ = writeln!(out, "\n## Summary\nchecks: {total}, failed: {failed}");
        let _ = writeln!(out, "RESULT: {}", if failed == 0 { "PASS" } else { "FAIL" });
        out
    }
}

fn e(x: f64) -> String {
    format!("{x:.6e}")
}

fn model_for(spec: &ExperimentSpec, params: SystemParams) -> Result<PowerModel> {
    Ok(PowerModel::new(params.validate()?)?.with_eta_scaled(spec.eta_scale))
}

fn pair_distance(spec: &ExperimentSpec) -> f64 {
    match spec.placement {
        Placement::FixedDistance(r) => r,
        Placement::Poisson => DEFAULT_PAIR_DISTANCE,
    }
}

/// Runs every section. Fails only on invalid specs or numerical breakdown;
/// violated bounds show up as `FAIL` lines.
pub fn validate_report(spec: &ExperimentSpec) -> Result<Report> {
    spec.validate()?;
    let mut header = vec![
        format!("seed = {}", spec.seed),
        format!("trials = {}", spec.n_trials),
        format!("r1 = {}", e(spec.r1)),
        format!("r = {}", e(pair_distance(spec))),
    ];
    if spec.eta_scale != 1.0 {
        header.push(format!("eta_scale = {} (fault injection)", e(spec.eta_scale)));
    }
    for (name, value) in spec.params.fields() {
        header.push(format!("{name} = {}", e(value)));
    }
    let sections = vec![
        closure_section(spec)?,
        fit_section(spec)?,
        expectation_section(spec)?,
        outage_section(spec)?,
        closed_form_section(spec)?,
        figure_section()?,
    ];
    Ok(Report { header, sections })
}

fn closure_section(spec: &ExperimentSpec) -> Result<Section> {
    let mut s = Section::new("(a) Power-model closure identities");
    let geom = Geometry::new(spec.r1, pair_distance(spec), FIXED_BEARING)?;
    for (i, p_out) in [1e-4, 1e-3, 1e-2].into_iter().enumerate() {
        let mut params = spec.params;
        params.p_out_target = p_out;
        let m = model_for(spec, params)?;
        let lin = m.params();
        let c = m.coefficients();
        let t = m.targets();
        for (j, r) in [1.0, 20.0, 100.0].into_iter().enumerate() {
            let res = short_range_outage_prob(c.zeta * r * r, r, lin)? - p_out;
            s.check(
                format!("a.1.{}", 3 * i + j + 1),
                res.abs() <= 1e-12,
                format!("short-range outage at zeta r^2 (r={r} m, P_out={}) - P_out = {} (bound 1e-12)", e(p_out), e(res)),
            );
        }
        let p1 = cellular_outage_prob(c.eta_u1 * geom.r1 * geom.r1, geom.r1, lin, Ms::U1)?;
        let p2 = cellular_outage_prob(c.eta_u2 * geom.r2 * geom.r2, geom.r2, lin, Ms::U2)?;
        let worst = (p1 - t.p_out_nc).abs().max((p2 - t.p_out_nc).abs());
        s.check(
            format!("a.2.{}", i + 1),
            worst <= 1e-12,
            format!("uplink outage at eta r_i^2 vs per-link target {} (P_out={}): max residual {} (bound 1e-12)", e(t.p_out_nc), e(p_out), e(worst)),
        );
        let p_short = short_range_outage_prob(c.zeta * geom.r * geom.r, geom.r, lin)?;
        let eps_short = (1.0 - p_short) * (1.0 - p_short);
        let res = composite_outage(p1, eps_short) - p_out;
        s.check(
            format!("a.3.{}", i + 1),
            res.abs() <= 1e-12,
            format!("composite outage at the cooperative powers - P_out = {} (P_out={}, bound 1e-12)", e(res), e(p_out)),
        );
        let cc = m.conventional_coefficients();
        let q1 = cellular_outage_prob(cc.eta_u1 * geom.r1 * geom.r1, geom.r1, lin, Ms::U1)?;
        let q2 = cellular_outage_prob(cc.eta_u2 * geom.r2 * geom.r2, geom.r2, lin, Ms::U2)?;
        let res = 1.0 - (1.0 - q1) * (1.0 - q2) - p_out;
        s.check(
            format!("a.4.{}", i + 1),
            res.abs() <= 1e-12,
            format!("conventional outage at the non-cooperative powers - P_out = {} (P_out={}, bound 1e-12)", e(res), e(p_out)),
        );
    }

    let pc = per_link_outage_conventional(1e-3f64)?;
    s.check(
        "a.5",
        (pc - 5.00125e-4).abs() <= 1e-9,
        format!("conventional per-link target at P_out=1e-3: {} (expected 5.00125e-4 +- 1e-9)", e(pc)),
    );
    let mut worst: f64 = 0.0;
    for k in 1..=100 {
        let p = 0.2 * k as f64 / 100.0;
        worst = worst.max((per_link_outage_nncc(p)? - per_link_outage_nncc_bisection(p)?).abs());
    }
    s.check(
        "a.6",
        worst <= 1e-10,
        format!("cooperative per-link target vs bisection root, 100 points in (0, 0.2]: max gap {} (bound 1e-10)", e(worst)),
    );
    let pnc = per_link_outage_nncc(1e-3f64)?;
    s.check(
        "a.7",
        (pnc - 0.029743).abs() <= 1e-6,
        format!("cooperative per-link target at P_out=1e-3: {} (expected 0.029743 +- 1e-6)", e(pnc)),
    );

    let m = model_for(spec, spec.params)?;
    let mut stream = RandomStream::new(spec.seed, STREAM_QUADRATIC_POINTS);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let r1 = 10.0 + 4990.0 * stream.uniform();
        let r = 500.0 * stream.uniform();
        let theta = -PI / 2.0 + 2.0 * PI * stream.uniform();
        let total = m.nncc_breakdown(&Geometry::new(r1, r, theta)?).total_nncc;
        let quad = nncc::QuadraticForm::from_model(&m, r1).eval(r, theta);
        worst = worst.max(((total - quad) / total).abs());
    }
    s.check(
        "a.8",
        worst <= 1e-9,
        format!("per-link power sum vs quadratic in r on 10^4 random (r1, r, theta): max relative gap {} (bound 1e-9)", e(worst)),
    );
    Ok(s)
}

fn context(spec: &ExperimentSpec, params: SystemParams, r1: f64) -> Result<DistributionContext> {
    Ok(DistributionContext::new(model_for(spec, params)?, r1)?)
}

fn fit_section(spec: &ExperimentSpec) -> Result<Section> {
    let mut s = Section::new("(b) Sampled power law vs analytic CDFs");
    let ctx = context(spec, spec.params, spec.r1)?;
    let lin = spec.params.validate()?;
    let rep = sample_power_distribution(spec.n_trials, lin.rho(), spec.r1, &lin, &RandomStream::new(spec.seed, STREAM_POWER_SAMPLES))?;
    let n = rep.samples.len();
    let inf = ctx.support_infimum();
    s.check(
        "b.1",
        rep.samples[0] >= inf,
        format!("sample minimum {} >= support infimum {}", e(rep.samples[0]), e(inf)),
    );
    let ks_ref = ks_distance_with(&rep.samples, |p| ctx.cdf_reference(p))?;
    s.check(
        "b.2",
        ks_ref < 0.005,
        format!("KS distance, {n} samples vs reference CDF: {} (bound 0.005)", e(ks_ref)),
    );
    let ks_printed = ks_distance_with(&rep.samples, |p| ctx.cdf_paper(p))?;
    s.info(format!("KS distance, {n} samples vs printed closed-form CDF: {}", e(ks_printed)));
    let median = rep.samples[n / 2];
    s.info(format!(
        "at the sample median {}: reference CDF - 0.5 = {}, printed CDF - 0.5 = {}",
        e(median),
        e(ctx.cdf_reference(median)? - 0.5),
        e(ctx.cdf_paper(median)? - 0.5)
    ));
    Ok(s)
}

fn expectation_section(spec: &ExperimentSpec) -> Result<Section> {
    let mut s = Section::new("(c) Expected cooperative power: moments, quadrature, simulation");
    for (k, (rho, r1)) in EXPECTATION_SETS.into_iter().enumerate() {
        let mut params = spec.params;
        params.rho = rho;
        let ctx = context(spec, params, r1)?;
        let closed = ctx.expected_power();
        let quad = ctx.expected_power_quadrature()?;
        let rel = ((closed - quad) / closed).abs();
        let label = format!("rho={}, r1={r1} m", e(rho));
        s.check(
            format!("c.{}.1", k + 1),
            rel <= 1e-9,
            format!("{label}: closed form {} vs 2-D quadrature {}, relative gap {} (bound 1e-9)", e(closed), e(quad), e(rel)),
        );
        let lin = params.validate()?;
        let rep = sample_power_distribution(spec.n_trials, rho, r1, &lin, &RandomStream::new(spec.seed, STREAM_EXPECTATION + k as u64))?;
        let z = (rep.energy.mean - closed) / rep.energy.stderr();
        s.check(
            format!("c.{}.2", k + 1),
            z.abs() <= SIGMA_BOUND,
            format!("{label}: simulated mean {} +- {} vs closed form, z = {:.3} (bound 3)", e(rep.energy.mean), e(rep.energy.stderr()), z),
        );
    }
    Ok(s)
}

fn outage_section(spec: &ExperimentSpec) -> Result<Section> {
    let mut s = Section::new("(d) Simulated outage vs targets");
    let m = model_for(spec, spec.params)?;
    let geom = Geometry::new(spec.r1, pair_distance(spec), FIXED_BEARING)?;
    let rep = run_protocol(spec.n_trials, GeometrySampler::Fixed(geom), &m, &RandomStream::new(spec.seed, STREAM_OUTAGE))?;
    let rates = rep.rates.expect("protocol runs report rates");
    let t = m.targets();
    let p = t.p_out;
    let mut rate_check = |id: &str, what: &str, rate: nncc::montecarlo::Rate, target: f64| {
        let z = rate.z_score(target);
        s.check(
            id,
            z.abs() <= SIGMA_BOUND,
            format!("{what}: {} ({} of {}) vs {}, z = {:.3} (bound 3)", e(rate.value()), rate.count, rate.n, e(target), z),
        );
    };
    rate_check("d.1", "composite cooperative outage", rates.composite_outage, p);
    rate_check("d.2", "both exchanges decoded (delta = 0)", rates.delta0, (1.0 - p) * (1.0 - p));
    rate_check("d.3", "conventional outage (either uplink)", rates.conventional_outage, p);
    rate_check("d.4", "single cooperative uplink (U1, slot 2)", rates.u1_uplink_outage, t.p_out_nc);
    rate_check("d.5", "short-range exchange", rates.exchange_outage, p);

    // Per message: both copies lost after a successful exchange, the own
    // copy lost otherwise.
    let x = t.p_out_nc;
    let per_message = t.eps_short * x * x + (1.0 - t.eps_short) * x;
    for (what, rate) in [
        ("D1 lost", rates.d1_outage),
        ("D2 lost", rates.d2_outage),
        ("any message lost", rates.any_message_outage),
    ] {
        s.info(format!("{what}: {} +- {} ({} of {})", e(rate.value()), e(rate.stderr()), rate.count, rate.n));
    }
    s.info(format!(
        "per-message loss expected under independent fading: {} (the composite target {} is met by the pair event, not by each message)",
        e(per_message),
        e(p)
    ));
    let expected = m.nncc_breakdown(&geom).total_nncc;
    s.info(format!(
        "simulated energy per round {} +- {} vs cooperative total {} (z = {:.3})",
        e(rep.energy.mean),
        e(rep.energy.stderr()),
        e(expected),
        (rep.energy.mean - expected) / rep.energy.stderr()
    ));
    Ok(s)
}

fn closed_form_section(spec: &ExperimentSpec) -> Result<Section> {
    let mut s = Section::new("(e) Printed two-branch CDF/PDF vs reference law");
    let ctx = context(spec, spec.params, spec.r1)?;
    let res = ctx.evaluate(nncc::distribution::GRID_POINTS)?;
    let d = ctx.discrepancy(&res)?;
    s.info(format!(
        "grid: {} points on [{}, {}], junction c0 = {}",
        res.p_grid.len(),
        e(res.p_grid[0]),
        e(*res.p_grid.last().unwrap_or(&f64::NAN)),
        e(ctx.branch_point())
    ));
    let monotone = res.cdf_reference.windows(2).all(|w| w[0] <= w[1] + 1e-12)
        && res.cdf_reference.iter().all(|f| (0.0..=1.0).contains(f));
    s.check("e.1", monotone, "reference CDF non-decreasing and within [0, 1] on the grid");
    s.check(
        "e.2",
        d.pdf_reference_integral_minus_one.abs() <= 1e-3,
        format!("integral of the reference PDF - 1 = {} (bound 1e-3)", e(d.pdf_reference_integral_minus_one)),
    );
    let peak = res.pdf_reference.iter().cloned().fold(0.0, f64::max);
    let fd_rel = d.fd_reference_max_abs / peak;
    s.check(
        "e.3",
        fd_rel <= 1e-4,
        format!(
            "central differences of the reference CDF vs reference PDF at {} points: max gap {} = {} of the peak density (bound 1e-4)",
            d.fd_points,
            e(d.fd_reference_max_abs),
            e(fd_rel)
        ),
    );
    s.info(format!("max |printed CDF - reference CDF| = {} at p = {}", e(d.max_cdf_gap), e(d.max_cdf_gap_at)));
    s.info(format!("  lower branch (p <= c0): {}", e(d.max_cdf_gap_q1)));
    s.info(format!("  upper branch (p > c0): {}", e(d.max_cdf_gap_q2)));
    s.info(format!("reference F(c0) = {}", e(d.reference_mass_below_junction)));
    s.info(format!(
        "printed CDF jump at c0 (upper - lower branch) = {}",
        e(d.cdf_paper_junction_jump)
    ));
    s.info(format!("printed PDF jump at c0 = {}", e(d.pdf_paper_junction_jump)));
    s.info(format!("integral of the printed PDF - 1 = {}", e(d.pdf_paper_integral_minus_one)));
    s.info(format!("max |printed PDF - reference PDF| on the grid = {}", e(d.max_pdf_gap)));
    s.info(format!(
        "central differences of the printed CDF vs printed PDF: max relative gap {}",
        e(d.fd_paper_max_rel)
    ));
    Ok(s)
}

fn figure_section() -> Result<Section> {
    let mut s = Section::new("(f) Figure dataset shapes (analytic columns)");
    let rows = compute_rows(&ExperimentSpec::figure(3)?, false)?;
    let band: Vec<_> = rows.iter().filter(|r| (500.0..=3000.0).contains(&r.value)).collect();
    s.check(
        "f.3",
        !band.is_empty() && band.iter().all(|r| r.e_nncc_analytic < r.e_conv_analytic),
        format!("figure 3: cooperative energy below conventional at all {} r1 points in [500, 3000] m", band.len()),
    );
    let rows = compute_rows(&ExperimentSpec::figure(4)?, false)?;
    let band: Vec<_> = rows.iter().filter(|r| (500.0..=3000.0).contains(&r.value)).collect();
    s.check(
        "f.4",
        !band.is_empty() && band.iter().all(|r| r.ee_nncc > r.ee_conv),
        format!("figure 4: cooperative efficiency above conventional at all {} r1 points in [500, 3000] m", band.len()),
    );
    let rows = compute_rows(&ExperimentSpec::figure(5)?, false)?;
    s.check(
        "f.5",
        rows.windows(2).all(|w| w[1].e_nncc_analytic < w[0].e_nncc_analytic),
        format!("figure 5: cooperative energy strictly decreasing over {} densities", rows.len()),
    );
    let rows = compute_rows(&ExperimentSpec::figure(6)?, false)?;
    s.check(
        "f.6",
        rows.windows(2).all(|w| w[1].e_nncc_analytic < w[0].e_nncc_analytic),
        format!("figure 6: cooperative energy strictly decreasing over {} outage targets", rows.len()),
    );
    Ok(s)
}
