//! Outage-constrained transmit powers.
//!
//! Every link is Rayleigh faded, so a link of desired power `P` at distance
//! `d` is in outage with probability `1 - exp(-K d² / P)` for a link constant
//! `K`. Inverting that at a per-link outage target gives powers of the form
//! `coefficient · d²`. The cooperative (NNCC) scheme needs
//!
//! * `ζ`: short-range coefficient at the end-to-end target `P_out`,
//! * `η`: cellular coefficient at the relaxed per-link target `P_out^NC`,
//!
//! and the non-cooperative baseline needs `η_C` at `P_out^C = 1 - sqrt(1 - P_out)`.
//!
//! Powers are summed over the slots of one cooperation round. Every slot has
//! unit duration, so the totals double as energy per round in joules.

use crate::distribution::QuadraticForm;
use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::params::LinearParams;
use crate::roots::bisect;
use crate::Real;

/// Which mobile station a per-user quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ms {
    U1,
    U2,
}

/// Outage targets derived from the end-to-end target `p_out`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageTargets<T> {
    pub p_out: T,
    /// Probability that both short-range decodes succeed, `(1 - p_out)²`.
    pub eps_short: T,
    /// Expected number of cellular slots per round, `1 + (1 - p_out)²`.
    pub eps_total: T,
    /// Per-cellular-link target of the cooperative scheme.
    pub p_out_nc: T,
    /// Per-link target of the non-cooperative scheme.
    pub p_out_c: T,
}

impl<T: Real> OutageTargets<T> {
    pub fn new(p_out: T) -> Result<Self> {
        if !(p_out > T::zero() && p_out < T::one()) {
            return Err(Error::domain("OutageTargets::new", p_out.as_f64(), "0 < p_out < 1"));
        }
        let one_minus = T::one() - p_out;
        let eps_short = one_minus * one_minus;
        Ok(OutageTargets {
            p_out,
            eps_short,
            eps_total: T::one() + eps_short,
            p_out_nc: per_link_outage_nncc(p_out)?,
            p_out_c: per_link_outage_conventional(p_out)?,
        })
    }
}

fn check_probability<T: Real>(op: &'static str, p: T) -> Result<()> {
    if p >= T::zero() && p < T::one() {
        Ok(())
    } else {
        Err(Error::domain(op, p.as_f64(), "0 <= p < 1"))
    }
}

/// End-to-end outage of the cooperative scheme when each cellular link fails
/// with probability `p_link` and the exchange succeeds with probability
/// `eps_short`: `ε x² + (1 - ε)(1 - (1 - x)²)`.
pub fn composite_outage<T: Real>(p_link: T, eps_short: T) -> T {
    let x = p_link;
    eps_short * x * x + (T::one() - eps_short) * (T::lit(2.0) * x - x * x)
}

/// Distance from the singular point `2ε - 1 = 0` below which the closed form
/// is replaced by bisection.
const SINGULAR_BAND: f64 = 1e-3;

/// Per-cellular-link outage target `P_out^NC` of the cooperative scheme.
///
/// Closed-form root of [`composite_outage`]` = p_out` in `(0, 1)`; within
/// [`SINGULAR_BAND`] of `p_out = 1 - 1/√2`, where the closed form is 0/0, the
/// root comes from [`per_link_outage_nncc_bisection`] instead. `p_out = 0`
/// maps to 0.
pub fn per_link_outage_nncc<T: Real>(p_out: T) -> Result<T> {
    check_probability("per_link_outage_nncc", p_out)?;
    if p_out == T::zero() {
        return Ok(T::zero());
    }
    let eps = (T::one() - p_out) * (T::one() - p_out);
    let denom = T::lit(2.0) * eps - T::one();
    if denom.abs() < T::lit(SINGULAR_BAND) {
        return per_link_outage_nncc_bisection(p_out);
    }
    let one_minus_eps = T::one() - eps;
    Ok(((one_minus_eps * one_minus_eps + p_out * denom).sqrt() - one_minus_eps) / denom)
}

/// Root of the composite-outage equation by bisection on `[0, 1]`, run until
/// the bracket stops shrinking.
pub fn per_link_outage_nncc_bisection<T: Real>(p_out: T) -> Result<T> {
    check_probability("per_link_outage_nncc_bisection", p_out)?;
    if p_out == T::zero() {
        return Ok(T::zero());
    }
    let eps = (T::one() - p_out) * (T::one() - p_out);
    bisect(|x| composite_outage(x, eps) - p_out, T::zero(), T::one(), T::zero())
}

/// Per-link target `1 - sqrt(1 - p_out)` of the non-cooperative scheme, so
/// that two independent links both succeed with probability `1 - p_out`.
pub fn per_link_outage_conventional<T: Real>(p_out: T) -> Result<T> {
    check_probability("per_link_outage_conventional", p_out)?;
    // Rationalised to avoid cancellation at small p_out.
    Ok(p_out / (T::one() + (T::one() - p_out).sqrt()))
}

/// `2^(rate/bandwidth) - 1`, the linear SNR needed at zero gap.
fn snr_threshold<T: Real>(rate: T, bandwidth: T) -> T {
    (rate / bandwidth * T::LN_2()).exp_m1()
}

fn sixteen_pi_sq<T: Real>() -> T {
    T::lit(16.0) * T::PI() * T::PI()
}

/// Short-range link constant: `P · ln(1/(1 - outage)) / r²` for any target.
fn short_range_constant<T: Real>(params: &LinearParams<T>) -> T {
    let raw = params.raw();
    sixteen_pi_sq::<T>() * params.delta_s() * raw.n0 * raw.b_s * snr_threshold(raw.rate, raw.b_s)
        / (raw.sigma2_short * params.g_u1() * params.g_u2() * params.lambda_s() * params.lambda_s())
}

fn ms_gain<T: Real>(params: &LinearParams<T>, ms: Ms) -> T {
    match ms {
        Ms::U1 => params.g_u1(),
        Ms::U2 => params.g_u2(),
    }
}

fn cellular_constant<T: Real>(params: &LinearParams<T>, ms: Ms) -> T {
    let raw = params.raw();
    sixteen_pi_sq::<T>() * params.delta_c() * raw.n0 * raw.b_c * snr_threshold(raw.rate, raw.b_c)
        / (raw.sigma2_cell * ms_gain(params, ms) * params.g_bs() * params.lambda_c() * params.lambda_c())
}

/// `-1 / ln(1 - p)`, finite and positive for `0 < p < 1`.
fn inverse_log_survival<T: Real>(p: T) -> T {
    -T::one() / (-p).ln_1p()
}

/// Short-range coefficient `ζ` (W/m²): `P₁₂ = P₂₁ = ζ r²` meets `P_out` on
/// each exchange link.
pub fn short_range_coeff<T: Real>(params: &LinearParams<T>) -> T {
    short_range_constant(params) * inverse_log_survival(params.p_out())
}

/// Cellular coefficient `η` (W/m²) of station `ms` at per-link target
/// `p_link`: `P_ib = η r_i²`. Serves both schemes.
pub fn cellular_coeff<T: Real>(params: &LinearParams<T>, p_link: T, ms: Ms) -> Result<T> {
    if !(p_link > T::zero() && p_link < T::one()) {
        return Err(Error::domain("cellular_coeff", p_link.as_f64(), "0 < p_link < 1"));
    }
    Ok(cellular_constant(params, ms) * inverse_log_survival(p_link))
}

/// Gap-adjusted Shannon rate `B log2(1 + snr/gap)` in bits/s.
pub fn link_capacity<T: Real>(snr: T, bandwidth: T, gap: T) -> Result<T> {
    if !(snr >= T::zero()) {
        return Err(Error::domain("link_capacity", snr.as_f64(), "snr >= 0"));
    }
    if !(bandwidth > T::zero()) {
        return Err(Error::domain("link_capacity", bandwidth.as_f64(), "bandwidth > 0"));
    }
    if !(gap >= T::one()) {
        return Err(Error::domain("link_capacity", gap.as_f64(), "gap >= 1"));
    }
    Ok(bandwidth * (snr / gap).ln_1p() / T::LN_2())
}

fn free_space_snr<T: Real>(p_tx: T, d: T, fading: T, lambda: T, noise: T, gains: T) -> T {
    let path = lambda / (T::lit(4.0) * T::PI() * d);
    p_tx / noise * path * path * gains * fading
}

fn check_link_inputs<T: Real>(op: &'static str, p_tx: T, d: T, fading: T) -> Result<()> {
    if !(p_tx >= T::zero()) {
        return Err(Error::domain(op, p_tx.as_f64(), "p_tx >= 0"));
    }
    if !(d > T::zero()) {
        return Err(Error::domain(op, d.as_f64(), "distance > 0"));
    }
    if !(fading >= T::zero()) {
        return Err(Error::domain(op, fading.as_f64(), "fading gain >= 0"));
    }
    Ok(())
}

/// Received SNR on the short-range link for fading power gain `fading`.
pub fn received_snr_short<T: Real>(p_tx: T, r: T, fading: T, params: &LinearParams<T>) -> Result<T> {
    check_link_inputs("received_snr_short", p_tx, r, fading)?;
    let raw = params.raw();
    Ok(free_space_snr(
        p_tx,
        r,
        fading,
        params.lambda_s(),
        raw.n0 * raw.b_s,
        params.g_u1() * params.g_u2(),
    ))
}

/// Received SNR at the BS from station `ms` at distance `ri`.
pub fn received_snr_cellular<T: Real>(
    p_tx: T,
    ri: T,
    fading: T,
    params: &LinearParams<T>,
    ms: Ms,
) -> Result<T> {
    check_link_inputs("received_snr_cellular", p_tx, ri, fading)?;
    let raw = params.raw();
    Ok(free_space_snr(
        p_tx,
        ri,
        fading,
        params.lambda_c(),
        raw.n0 * raw.b_c,
        ms_gain(params, ms) * params.g_bs(),
    ))
}

fn rayleigh_outage<T: Real>(constant: T, d: T, p_tx: T) -> T {
    -(-(constant * d * d / p_tx)).exp_m1()
}

/// Outage probability of a short-range transmission at power `p_tx` over `r`.
pub fn short_range_outage_prob<T: Real>(p_tx: T, r: T, params: &LinearParams<T>) -> Result<T> {
    if !(p_tx > T::zero()) {
        return Err(Error::domain("short_range_outage_prob", p_tx.as_f64(), "p_tx > 0"));
    }
    if !(r > T::zero()) {
        return Err(Error::domain("short_range_outage_prob", r.as_f64(), "r > 0"));
    }
    Ok(rayleigh_outage(short_range_constant(params), r, p_tx))
}

/// Outage probability of an uplink from `ms` at power `p_tx` over `ri`.
pub fn cellular_outage_prob<T: Real>(p_tx: T, ri: T, params: &LinearParams<T>, ms: Ms) -> Result<T> {
    if !(p_tx > T::zero()) {
        return Err(Error::domain("cellular_outage_prob", p_tx.as_f64(), "p_tx > 0"));
    }
    if !(ri > T::zero()) {
        return Err(Error::domain("cellular_outage_prob", ri.as_f64(), "ri > 0"));
    }
    Ok(rayleigh_outage(cellular_constant(params, ms), ri, p_tx))
}

/// Desired-power coefficients of one scheme, W/m².
///
/// The cellular coefficient is kept per station since it depends on that
/// station's antenna gain; with equal gains `eta_u1 == eta_u2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerCoefficients<T> {
    pub zeta: T,
    pub eta_u1: T,
    pub eta_u2: T,
}

/// Per-link desired powers (W) and scheme totals (W, or J per unit-slot round).
///
/// The per-link fields belong to the scheme that produced the breakdown
/// (short-range fields are zero for the non-cooperative scheme); both totals
/// are always filled for the same geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBreakdown<T> {
    pub p12: T,
    pub p21: T,
    pub p1b: T,
    pub p2b: T,
    /// `p12 + p21 + (1 + (1 - P_out)²)(p1b + p2b)` with cooperative powers.
    pub total_nncc: T,
    /// `p1b + p2b` with non-cooperative powers.
    pub total_conventional: T,
}

/// Validated parameters together with every derived target and coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerModel<T> {
    params: LinearParams<T>,
    targets: OutageTargets<T>,
    nncc: PowerCoefficients<T>,
    conventional: PowerCoefficients<T>,
}

impl<T: Real> PowerModel<T> {
    pub fn new(params: LinearParams<T>) -> Result<Self> {
        let targets = OutageTargets::new(params.p_out())?;
        let nncc = PowerCoefficients {
            zeta: short_range_coeff(&params),
            eta_u1: cellular_coeff(&params, targets.p_out_nc, Ms::U1)?,
            eta_u2: cellular_coeff(&params, targets.p_out_nc, Ms::U2)?,
        };
        let conventional = PowerCoefficients {
            zeta: T::zero(),
            eta_u1: cellular_coeff(&params, targets.p_out_c, Ms::U1)?,
            eta_u2: cellular_coeff(&params, targets.p_out_c, Ms::U2)?,
        };
        Ok(PowerModel {
            params,
            targets,
            nncc,
            conventional,
        })
    }

    pub fn params(&self) -> &LinearParams<T> {
        &self.params
    }

    pub fn targets(&self) -> &OutageTargets<T> {
        &self.targets
    }

    pub fn coefficients(&self) -> &PowerCoefficients<T> {
        &self.nncc
    }

    /// Coefficients of the non-cooperative scheme (`zeta` is zero).
    pub fn conventional_coefficients(&self) -> &PowerCoefficients<T> {
        &self.conventional
    }

    /// Fault-injection hook: scales the cooperative cellular coefficients.
    #[doc(hidden)]
    pub fn with_eta_scaled(mut self, factor: T) -> Self {
        self.nncc.eta_u1 = self.nncc.eta_u1 * factor;
        self.nncc.eta_u2 = self.nncc.eta_u2 * factor;
        self
    }

    fn conventional_total(&self, geom: &Geometry<T>) -> T {
        self.conventional.eta_u1 * geom.r1 * geom.r1 + self.conventional.eta_u2 * geom.r2 * geom.r2
    }

    /// Cooperative per-link powers and totals.
    pub fn nncc_breakdown(&self, geom: &Geometry<T>) -> PowerBreakdown<T> {
        let short = self.nncc.zeta * geom.r * geom.r;
        let p1b = self.nncc.eta_u1 * geom.r1 * geom.r1;
        let p2b = self.nncc.eta_u2 * geom.r2 * geom.r2;
        let total_nncc = short + short + self.targets.eps_total * (p1b + p2b);
        debug_assert!({
            let quad = QuadraticForm::from_model(self, geom.r1).eval(geom.r, geom.theta);
            (quad - total_nncc).abs() <= T::lit(1e-9) * total_nncc.abs().max(T::min_positive_value())
                || T::epsilon() > T::lit(1e-9)
        });
        PowerBreakdown {
            p12: short,
            p21: short,
            p1b,
            p2b,
            total_nncc,
            total_conventional: self.conventional_total(geom),
        }
    }

    /// Non-cooperative per-link powers and totals.
    pub fn conventional_breakdown(&self, geom: &Geometry<T>) -> PowerBreakdown<T> {
        let p1b = self.conventional.eta_u1 * geom.r1 * geom.r1;
        let p2b = self.conventional.eta_u2 * geom.r2 * geom.r2;
        let nncc = self.nncc_breakdown(geom);
        PowerBreakdown {
            p12: T::zero(),
            p21: T::zero(),
            p1b,
            p2b,
            total_nncc: nncc.total_nncc,
            total_conventional: p1b + p2b,
        }
    }

    /// Cooperative total averaged over a uniform bearing at fixed `r`.
    ///
    /// `r2²` is affine in `cos θ`, whose mean is zero, so this is exact.
    pub fn nncc_total_bearing_averaged(&self, r1: T, r: T) -> T {
        let c = &self.nncc;
        T::lit(2.0) * c.zeta * r * r
            + self.targets.eps_total * (c.eta_u1 * r1 * r1 + c.eta_u2 * (r1 * r1 + r * r))
    }

    /// Non-cooperative total averaged over a uniform bearing at fixed `r`.
    pub fn conventional_total_bearing_averaged(&self, r1: T, r: T) -> T {
        let c = &self.conventional;
        c.eta_u1 * r1 * r1 + c.eta_u2 * (r1 * r1 + r * r)
    }
}

/// Cooperative breakdown for one geometry.
pub fn nncc_power_breakdown<T: Real>(geom: &Geometry<T>, params: &LinearParams<T>) -> Result<PowerBreakdown<T>> {
    Ok(PowerModel::new(*params)?.nncc_breakdown(geom))
}

/// Non-cooperative breakdown for one geometry.
pub fn conventional_power<T: Real>(geom: &Geometry<T>, params: &LinearParams<T>) -> Result<PowerBreakdown<T>> {
    Ok(PowerModel::new(*params)?.conventional_breakdown(geom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::SystemParams;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    // Reference values computed independently at 40 significant digits,
    // P_out^NC by 200-step bisection of the composite-outage equation.
    const P_NC_1E3: f64 = 0.029_742_656_133_926_22;
    const P_NC_1E4: f64 = 0.009_803_931_276_436_949;
    const P_NC_1E2: f64 = 0.083_409_757_868_088_15;
    const P_NC_1E1: f64 = 0.198_724_508_495_671_8;
    const P_C_1E3: f64 = 5.001_250_625_390_899e-4;
    const ZETA_DEFAULT: f64 = 7.134_384_537_899_981e-9;
    const ETA_DEFAULT: f64 = 3.573_850_379_502_909e-11;
    const ETA_C_DEFAULT: f64 = 2.157_093_192_130_267e-9;

    fn defaults() -> LinearParams<f64> {
        SystemParams::default().validate().unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn nncc_per_link_target_matches_reference() {
        let x = per_link_outage_nncc(1e-3f64).unwrap();
        assert!((x - 0.029743).abs() < 1e-6);
        for (p, want) in [(1e-4, P_NC_1E4), (1e-3, P_NC_1E3), (1e-2, P_NC_1E2), (0.1, P_NC_1E1)] {
            assert!((per_link_outage_nncc(p).unwrap() - want).abs() < 1e-13, "p={p}");
            assert!((per_link_outage_nncc_bisection(p).unwrap() - want).abs() < 1e-13, "p={p}");
        }
        assert_eq!(per_link_outage_nncc(0.0).unwrap(), 0.0);
        assert!(per_link_outage_nncc(1.0).is_err());
        assert!(per_link_outage_nncc(-1e-3).is_err());
    }

    #[test]
    fn nncc_per_link_target_near_singular_point() {
        let singular = 1.0 - 1.0 / 2f64.sqrt();
        for p in [singular, singular - 1e-6, singular + 1e-6, singular + 2e-3] {
            let x = per_link_outage_nncc(p).unwrap();
            let eps = (1.0 - p) * (1.0 - p);
            assert!((composite_outage(x, eps) - p).abs() < 1e-12, "p={p}");
            assert!(x > 0.0 && x < 1.0);
        }
    }

    #[test]
    fn composite_identity_closure() {
        for p in [1e-4f64, 1e-3, 1e-2, 0.1] {
            let t = OutageTargets::new(p).unwrap();
            assert!((composite_outage(t.p_out_nc, t.eps_short) - p).abs() < 1e-12);
            let conv = 1.0 - (1.0 - t.p_out_c).powi(2);
            assert!((conv - p).abs() < 1e-12);
            assert_eq!(t.eps_total, 1.0 + t.eps_short);
            assert!(0.0 < t.p_out_c && t.p_out_c < t.p_out_nc && t.p_out_nc < 1.0);
        }
        assert!(OutageTargets::new(0.0).is_err());
    }

    #[test]
    fn conventional_per_link_target() {
        assert!((per_link_outage_conventional(1e-3f64).unwrap() - 5.00125e-4).abs() < 1e-9);
        assert!((per_link_outage_conventional(1e-3).unwrap() - P_C_1E3).abs() < 1e-18);
        assert_eq!(per_link_outage_conventional(0.0).unwrap(), 0.0);
        assert!((per_link_outage_conventional(0.75f64).unwrap() - 0.5).abs() < 1e-15);
        assert!(per_link_outage_conventional(1.5).is_err());
    }

    #[test]
    fn conventional_target_below_cooperative_on_grid() {
        for i in 1..=100 {
            let p = 0.2 * i as f64 / 100.0;
            assert!(per_link_outage_conventional(p).unwrap() < per_link_outage_nncc(p).unwrap());
        }
    }

    #[test]
    fn coefficient_golden_values() {
        let lp = defaults();
        assert!(rel(short_range_coeff(&lp), ZETA_DEFAULT) < 1e-12);
        assert!(rel(short_range_coeff(&lp), 7.1e-9) < 0.02);
        let eta = cellular_coeff(&lp, P_NC_1E3, Ms::U1).unwrap();
        assert!(rel(eta, ETA_DEFAULT) < 1e-12);
        assert!(rel(cellular_coeff(&lp, 0.029743, Ms::U1).unwrap(), 3.57e-11) < 0.02);
        assert!(rel(cellular_coeff(&lp, P_C_1E3, Ms::U2).unwrap(), ETA_C_DEFAULT) < 1e-12);

        let m = PowerModel::new(lp).unwrap();
        assert!(rel(m.coefficients().eta_u1, ETA_DEFAULT) < 1e-12);
        assert!(m.conventional_coefficients().eta_u1 > m.coefficients().eta_u1);
    }

    #[test]
    fn coefficient_monotonicity() {
        let lp = defaults();
        let mut last = f64::INFINITY;
        for p in [1e-4, 1e-3, 1e-2, 0.1, 0.5] {
            let z = short_range_coeff(&lp.with(|r| r.p_out_target = p).unwrap());
            assert!(z < last);
            last = z;
        }
        let mut last = f64::INFINITY;
        for i in 1..50 {
            let e = cellular_coeff(&lp, i as f64 / 50.0, Ms::U1).unwrap();
            assert!(e < last);
            last = e;
        }
        assert!(cellular_coeff(&lp, 0.0, Ms::U1).is_err());
        assert!(cellular_coeff(&lp, 1.0, Ms::U1).is_err());
    }

    #[test]
    fn zeta_is_distance_free() {
        let m = PowerModel::new(defaults()).unwrap();
        let a = m.nncc_breakdown(&Geometry::new(500.0, 10.0, 0.3).unwrap());
        let b = m.nncc_breakdown(&Geometry::new(500.0, 20.0, 0.3).unwrap());
        assert!(rel(b.p12, 4.0 * a.p12) < 1e-14);
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(link_capacity(0.0, 2e6, 2.0).unwrap(), 0.0);
        assert!((link_capacity(3.0f64, 1.0, 3.0).unwrap() - 1.0).abs() < 1e-15);
        let gap = 2.51189;
        let snr = gap * (2f64.powf(0.05) - 1.0);
        assert!((snr - 0.08858).abs() < 1e-5);
        assert!((link_capacity(snr, 2e6, gap).unwrap() - 1e5).abs() < 1e-6);
        assert!(link_capacity(1.0, 1.0, 0.5).is_err());
        assert!(link_capacity(-1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn snr_scaling() {
        let lp = defaults();
        assert_eq!(received_snr_short(1e-3, 10.0, 0.0, &lp).unwrap(), 0.0);
        let a = received_snr_short(1e-3, 10.0, 1.3, &lp).unwrap();
        let b = received_snr_short(1e-3, 20.0, 1.3, &lp).unwrap();
        assert!(rel(a / b, 4.0) < 1e-14);
        assert!(received_snr_short(1e-3, 0.0, 1.0, &lp).is_err());

        assert_eq!(received_snr_cellular(1.0, 100.0, 0.0, &lp, Ms::U1).unwrap(), 0.0);
        let a = received_snr_cellular(1.0, 100.0, 0.7, &lp, Ms::U1).unwrap();
        let b = received_snr_cellular(1.0, 200.0, 0.7, &lp, Ms::U2).unwrap();
        assert!(rel(a / b, 4.0) < 1e-14);
    }

    #[test]
    fn snr_chains_into_capacity_outage() {
        // Capacity below R exactly when the fading gain is below the
        // threshold implied by the outage formula.
        let lp = defaults();
        let r = 20.0;
        let p_tx = short_range_coeff(&lp) * r * r;
        // Unit-mean fading: outage iff gain < -ln(1 - P_out).
        let g_star = -(-1e-3f64).ln_1p();
        let below = received_snr_short(p_tx, r, g_star * 0.999, &lp).unwrap();
        let above = received_snr_short(p_tx, r, g_star * 1.001, &lp).unwrap();
        let rate = lp.rate();
        assert!(link_capacity(below, lp.raw().b_s, lp.delta_s()).unwrap() < rate);
        assert!(link_capacity(above, lp.raw().b_s, lp.delta_s()).unwrap() > rate);
    }

    #[test]
    fn inversion_closure() {
        for p in [1e-4, 1e-3, 1e-2] {
            let lp = defaults().with(|raw| raw.p_out_target = p).unwrap();
            let zeta = short_range_coeff(&lp);
            let m = PowerModel::new(lp).unwrap();
            for r in [1.0, 20.0, 100.0] {
                let got = short_range_outage_prob(zeta * r * r, r, &lp).unwrap();
                assert!((got - p).abs() < 1e-12, "p={p} r={r} got={got}");
                let eta = m.coefficients().eta_u1;
                let got = cellular_outage_prob(eta * r * r, r, &lp, Ms::U1).unwrap();
                assert!((got - m.targets().p_out_nc).abs() < 1e-12);
            }
        }
        let lp = defaults();
        assert!(short_range_outage_prob(1e30, 20.0, &lp).unwrap() < 1e-30);
    }

    #[test]
    fn breakdown_edge_cases() {
        let lp = defaults();
        let m = PowerModel::new(lp).unwrap();
        let g = Geometry::new(1000.0, 0.0, 1.0).unwrap();
        let b = nncc_power_breakdown(&g, &lp).unwrap();
        assert_eq!(b.p12, 0.0);
        assert_eq!(b.p21, 0.0);
        assert_eq!(g.r2, g.r1);
        let eta = m.coefficients().eta_u1;
        let eps2 = m.targets().eps_total;
        assert!(rel(b.total_nncc, 2.0 * eps2 * eta * 1e6) < 1e-14);

        let c = conventional_power(&g, &lp).unwrap();
        let eta_c = m.conventional_coefficients().eta_u1;
        assert!(rel(c.total_conventional, 2.0 * eta_c * 1e6) < 1e-14);
        assert_eq!(c.p12, 0.0);
        let c2 = conventional_power(&Geometry::new(1000.0, 0.0, 2.5).unwrap(), &lp).unwrap();
        assert_eq!(c.total_conventional, c2.total_conventional);
    }

    #[test]
    fn theorem_total_matches_quadratic_at_example() {
        let lp = defaults();
        let m = PowerModel::new(lp).unwrap();
        let g = Geometry::new(2000.0, 50.0, PI / 2.0).unwrap();
        let b = m.nncc_breakdown(&g);
        let q = QuadraticForm::from_model(&m, 2000.0).eval(50.0, PI / 2.0);
        assert!(rel(b.total_nncc, q) < 1e-12);
        assert!(rel(b.total_nncc, b.p12 + b.p21 + m.targets().eps_total * (b.p1b + b.p2b)) < 1e-12);
    }

    #[test]
    fn figure3_regime_ordering_and_growth() {
        let m = PowerModel::new(defaults()).unwrap();
        let mut last = 0.0;
        for i in 0..=50 {
            let r1 = 500.0 + 50.0 * i as f64;
            for theta in [-1.0, 0.0, 1.7, PI, 4.0] {
                let b = m.nncc_breakdown(&Geometry::new(r1, 20.0, theta).unwrap());
                assert!(b.total_conventional > b.total_nncc);
            }
            let avg = m.nncc_total_bearing_averaged(r1, 20.0);
            assert!(avg > last);
            last = avg;
        }
    }

    #[test]
    fn total_decreases_with_outage_target() {
        let g = Geometry::new(800.0, 30.0, 2.0).unwrap();
        let mut last = f64::INFINITY;
        for i in 1..=60 {
            let p = 1e-4 * 10f64.powf(3.0 * i as f64 / 60.0);
            let lp = defaults().with(|raw| raw.p_out_target = p).unwrap();
            let t = nncc_power_breakdown(&g, &lp).unwrap().total_nncc;
            assert!(t < last, "p={p}");
            last = t;
        }
    }

    #[test]
    fn single_precision_model() {
        let lp = SystemParams::<f32>::default().validate().unwrap();
        let m = PowerModel::new(lp).unwrap();
        assert!(((m.coefficients().zeta as f64) - ZETA_DEFAULT).abs() / ZETA_DEFAULT < 1e-4);
        assert!(((m.targets().p_out_nc as f64) - P_NC_1E3).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn theorem_total_equals_quadratic(r1 in 1.0f64..5000.0, r in 0.0f64..500.0, theta in -PI / 2.0..1.5 * PI) {
            let m = PowerModel::new(defaults()).unwrap();
            let g = Geometry::new(r1, r, theta).unwrap();
            let b = m.nncc_breakdown(&g);
            let q = QuadraticForm::from_model(&m, r1).eval(r, theta);
            prop_assert!(rel(b.total_nncc, q) < 1e-9);
            prop_assert!(b.p12 >= 0.0 && b.p1b >= 0.0 && b.p2b >= 0.0);
        }

        #[test]
        fn totals_grow_with_distances(r1 in 100.0f64..4000.0, r in 0.0f64..90.0, theta in -PI / 2.0..1.5 * PI) {
            let m = PowerModel::new(defaults()).unwrap();
            let base = m.nncc_breakdown(&Geometry::new(r1, r, theta).unwrap()).total_nncc;
            let farther = m.nncc_breakdown(&Geometry::new(r1 * 1.01, r, theta).unwrap()).total_nncc;
            prop_assert!(farther > base);
            let avg = m.nncc_total_bearing_averaged(r1, r);
            prop_assert!(m.nncc_total_bearing_averaged(r1, r + 1.0) > avg);
        }

        #[test]
        fn geometry_invariants(r1 in 1e-3f64..1e4, r in 0.0f64..1e4, theta in -PI / 2.0..1.5 * PI) {
            let g = Geometry::new(r1, r, theta).unwrap();
            let lhs = g.r2 * g.r2;
            let rhs = r * r + r1 * r1 + 2.0 * r1 * r * theta.cos();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (r + r1).powi(2));
            let slack = 1e-9 * (r + r1);
            prop_assert!(g.r2 >= (r1 - r).abs() - slack);
            prop_assert!(g.r2 <= r1 + r + slack);
        }
    }
}
