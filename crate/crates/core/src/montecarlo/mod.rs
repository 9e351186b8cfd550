//! Monte Carlo ground truth for the analytic modules.
//!
//! A protocol round runs on unit-length slots:
//!
//! 1. U1 and U2 exchange their messages over the short-range link (both
//!    directions fade independently). `δ = 0` iff both exchanges decode.
//! 2. Each MS uplinks its own message.
//! 3. If `δ = 0`, each MS relays its partner's message on freshly faded
//!    uplinks; a message is delivered if either copy decodes.
//!
//! Every trial `i` of a run draws from `base.substream(i)`, and partial
//! results are merged chunk by chunk in index order, so a report is
//! bit-identical for any number of rayon workers.

mod stats;
mod stream;

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use rayon::prelude::*;

pub use stats::{Moments, Rate};
pub use stream::RandomStream;

use crate::error::{Error, Result};
use crate::geometry::{sample_nn_geometry, Geometry};
use crate::params::LinearParams;
use crate::powermodel::{link_capacity, received_snr_cellular, received_snr_short, Ms, PowerBreakdown, PowerModel};
use crate::Real;

/// Smallest accepted number of trials.
pub const MIN_TRIALS: u64 = 10_000;

const CHUNK: u64 = 1 << 14;

/// Source of fading power gains.
pub trait FadingSource {
    /// One power gain with the given mean.
    fn gain(&mut self, mean: f64) -> f64;
}

impl FadingSource for RandomStream {
    fn gain(&mut self, mean: f64) -> f64 {
        self.exponential(mean)
    }
}

/// Test hook: every draw returns the same gain (`f64::INFINITY`, `0.0`, ...).
#[derive(Debug, Clone, Copy)]
pub struct ConstantFading(pub f64);

impl FadingSource for ConstantFading {
    fn gain(&mut self, _mean: f64) -> f64 {
        self.0
    }
}

/// Fading gains drawn in one protocol round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotFading<T> {
    pub g12: T,
    pub g21: T,
    /// Own uplinks, slot 2.
    pub g1b: T,
    pub g2b: T,
    /// Relay uplinks in slot 3 (`U1 → BS`, `U2 → BS`); only when `δ = 0`.
    pub relay: Option<(T, T)>,
}

/// One simulated protocol round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome<T> {
    /// 0 when both short-range exchanges decoded.
    pub delta: u8,
    pub d1_delivered: bool,
    pub d2_delivered: bool,
    /// `δ = 0`: both copies of D1 failed. `δ = 1`: either own uplink failed.
    pub pair_outage_composite: bool,
    /// Transmit energy over unit slots, J.
    pub energy: T,
    pub cellular_slots: u8,
    /// `U1 → U2`, `U2 → U1` decode flags.
    pub exchange_ok: [bool; 2],
    /// Slot-2 own-uplink decode flags of U1, U2.
    pub uplink_ok: [bool; 2],
    pub fading: SlotFading<T>,
}

/// One round of the non-cooperative baseline: each MS uplinks its own
/// message once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConventionalOutcome<T> {
    pub d1_delivered: bool,
    pub d2_delivered: bool,
    /// Either uplink failed.
    pub outage: bool,
    pub energy: T,
}

fn meets_rate<T: Real>(capacity: Result<T>, rate: T) -> bool {
    capacity.map(|c| c >= rate).unwrap_or(false)
}

fn short_link_ok<T: Real>(p_tx: T, r: T, gain: T, params: &LinearParams<T>) -> bool {
    if r <= T::zero() {
        return true;
    }
    let capacity = received_snr_short(p_tx, r, gain, params)
        .and_then(|snr| link_capacity(snr, params.raw().b_s, params.delta_s()));
    meets_rate(capacity, params.rate())
}

fn uplink_ok<T: Real>(p_tx: T, d: T, gain: T, params: &LinearParams<T>, ms: Ms) -> bool {
    if d <= T::zero() {
        return true;
    }
    let capacity = received_snr_cellular(p_tx, d, gain, params, ms)
        .and_then(|snr| link_capacity(snr, params.raw().b_c, params.delta_c()));
    meets_rate(capacity, params.rate())
}

/// Simulates one cooperative round at fixed geometry and powers.
///
/// Draw order: `g12, g21`, slot-2 `g1b, g2b`, then (if `δ = 0`) the slot-3
/// gains of U1 and U2.
pub fn simulate_protocol_trial<T: Real, F: FadingSource>(
    fading: &mut F,
    geom: &Geometry<T>,
    powers: &PowerBreakdown<T>,
    params: &LinearParams<T>,
) -> TrialOutcome<T> {
    let raw = params.raw();
    let (mean_s, mean_c) = (raw.sigma2_short.as_f64(), raw.sigma2_cell.as_f64());
    let g12 = T::lit(fading.gain(mean_s));
    let g21 = T::lit(fading.gain(mean_s));
    let exchange_ok = [
        short_link_ok(powers.p12, geom.r, g12, params),
        short_link_ok(powers.p21, geom.r, g21, params),
    ];
    let delta = if exchange_ok[0] && exchange_ok[1] { 0 } else { 1 };

    let g1b = T::lit(fading.gain(mean_c));
    let g2b = T::lit(fading.gain(mean_c));
    let up = [
        uplink_ok(powers.p1b, geom.r1, g1b, params, Ms::U1),
        uplink_ok(powers.p2b, geom.r2, g2b, params, Ms::U2),
    ];

    let (d1, d2, relay) = if delta == 0 {
        let h1 = T::lit(fading.gain(mean_c));
        let h2 = T::lit(fading.gain(mean_c));
        // U1 relays D2, U2 relays D1.
        let relay_d2 = uplink_ok(powers.p1b, geom.r1, h1, params, Ms::U1);
        let relay_d1 = uplink_ok(powers.p2b, geom.r2, h2, params, Ms::U2);
        (up[0] || relay_d1, up[1] || relay_d2, Some((h1, h2)))
    } else {
        (up[0], up[1], None)
    };

    let cellular_slots: u8 = if delta == 0 { 2 } else { 1 };
    TrialOutcome {
        delta,
        d1_delivered: d1,
        d2_delivered: d2,
        pair_outage_composite: if delta == 0 { !d1 } else { !(up[0] && up[1]) },
        energy: powers.p12 + powers.p21 + T::lit(f64::from(cellular_slots)) * (powers.p1b + powers.p2b),
        cellular_slots,
        exchange_ok,
        uplink_ok: up,
        fading: SlotFading {
            g12,
            g21,
            g1b,
            g2b,
            relay,
        },
    }
}

/// Simulates one non-cooperative round; draws `g1b` then `g2b`.
pub fn simulate_conventional_trial<T: Real, F: FadingSource>(
    fading: &mut F,
    geom: &Geometry<T>,
    powers: &PowerBreakdown<T>,
    params: &LinearParams<T>,
) -> ConventionalOutcome<T> {
    let mean_c = params.raw().sigma2_cell.as_f64();
    let g1b = T::lit(fading.gain(mean_c));
    let g2b = T::lit(fading.gain(mean_c));
    let d1 = uplink_ok(powers.p1b, geom.r1, g1b, params, Ms::U1);
    let d2 = uplink_ok(powers.p2b, geom.r2, g2b, params, Ms::U2);
    ConventionalOutcome {
        d1_delivered: d1,
        d2_delivered: d2,
        outage: !(d1 && d2),
        energy: powers.p1b + powers.p2b,
    }
}

/// How each trial places the pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeometrySampler<T> {
    Fixed(Geometry<T>),
    /// Fixed `r1` and `r`, bearing uniform (one uniform per trial).
    Bearing { r1: T, r: T },
    /// Fixed `r1`, nearest neighbour of a PPP (two uniforms per trial).
    Poisson { rho: T, r1: T },
}

impl<T: Real> GeometrySampler<T> {
    pub fn draw(&self, stream: &mut RandomStream) -> Result<Geometry<T>> {
        match *self {
            GeometrySampler::Fixed(g) => Ok(g),
            GeometrySampler::Bearing { r1, r } => {
                let lo = -T::FRAC_PI_2();
                let mut theta = lo + T::lit(stream.uniform()) * T::lit(2.0) * T::PI();
                if theta >= T::lit(1.5) * T::PI() {
                    theta = lo;
                }
                Geometry::new(r1, r, theta)
            }
            GeometrySampler::Poisson { rho, r1 } => sample_nn_geometry(stream, rho, r1),
        }
    }
}

/// Empirical event rates of a protocol run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OutageRates {
    pub d1_outage: Rate,
    pub d2_outage: Rate,
    /// At least one message lost.
    pub any_message_outage: Rate,
    pub composite_outage: Rate,
    pub delta0: Rate,
    /// Short-range decode failures, both directions (`2n` attempts).
    pub exchange_outage: Rate,
    pub u1_uplink_outage: Rate,
    pub u2_uplink_outage: Rate,
    /// Non-cooperative baseline: either uplink failed.
    pub conventional_outage: Rate,
    pub conventional_u1_outage: Rate,
}

impl OutageRates {
    fn record(&mut self, t: &TrialOutcome<impl Real>, c: &ConventionalOutcome<impl Real>) {
        self.d1_outage.record(!t.d1_delivered);
        self.d2_outage.record(!t.d2_delivered);
        self.any_message_outage.record(!(t.d1_delivered && t.d2_delivered));
        self.composite_outage.record(t.pair_outage_composite);
        self.delta0.record(t.delta == 0);
        self.exchange_outage.record(!t.exchange_ok[0]);
        self.exchange_outage.record(!t.exchange_ok[1]);
        self.u1_uplink_outage.record(!t.uplink_ok[0]);
        self.u2_uplink_outage.record(!t.uplink_ok[1]);
        self.conventional_outage.record(c.outage);
        self.conventional_u1_outage.record(!c.d1_delivered);
    }

    fn merge(&mut self, o: &OutageRates) {
        self.d1_outage.merge(&o.d1_outage);
        self.d2_outage.merge(&o.d2_outage);
        self.any_message_outage.merge(&o.any_message_outage);
        self.composite_outage.merge(&o.composite_outage);
        self.delta0.merge(&o.delta0);
        self.exchange_outage.merge(&o.exchange_outage);
        self.u1_uplink_outage.merge(&o.u1_uplink_outage);
        self.u2_uplink_outage.merge(&o.u2_uplink_outage);
        self.conventional_outage.merge(&o.conventional_outage);
        self.conventional_u1_outage.merge(&o.conventional_u1_outage);
    }
}

/// Aggregated result of a simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct McReport<T> {
    pub n_trials: u64,
    pub seed: u64,
    pub stream_id: u64,
    /// Present for protocol runs.
    pub rates: Option<OutageRates>,
    /// Simulated cooperative energy per round, or the sampled total power
    /// for [`sample_power_distribution`].
    pub energy: Moments,
    /// Non-cooperative energy per round (protocol runs only).
    pub conventional_energy: Option<Moments>,
    /// Sorted samples (power-distribution runs only).
    pub samples: Vec<T>,
    /// Wall-clock time; excluded from reproducibility comparisons.
    pub elapsed: Duration,
}

impl<T> McReport<T> {
    /// Copy with the timing field zeroed.
    pub fn without_timing(&self) -> Self
    where
        T: Clone,
    {
        McReport {
            elapsed: Duration::ZERO,
            ..self.clone()
        }
    }
}

fn check_budget(n: u64) -> Result<()> {
    if n < MIN_TRIALS {
        return Err(Error::Budget {
            requested: n,
            required: MIN_TRIALS,
        });
    }
    Ok(())
}

/// Runs `body` over `[0, n)` in fixed chunks on the current rayon pool and
/// returns the per-chunk results in index order.
fn chunked<A: Send>(n: u64, body: impl Fn(u64, u64) -> Result<A> + Sync) -> Result<Vec<A>> {
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| body(c * CHUNK, ((c + 1) * CHUNK).min(n)))
        .collect()
}

#[derive(Default)]
struct ProtocolTally {
    rates: OutageRates,
    energy: Moments,
    conventional: Moments,
}

/// Runs `n` cooperative and non-cooperative rounds. Each trial draws its
/// geometry from `sampler`, then the cooperative gains, then the baseline's.
pub fn run_protocol<T: Real>(
    n: u64,
    sampler: GeometrySampler<T>,
    model: &PowerModel<T>,
    base: &RandomStream,
) -> Result<McReport<T>> {
    check_budget(n)?;
    let start = Instant::now();
    let params = model.params();
    let parts = chunked(n, |lo, hi| {
        let mut tally = ProtocolTally::default();
        for i in lo..hi {
            let mut stream = base.substream(i);
            let geom = sampler.draw(&mut stream)?;
            let coop = simulate_protocol_trial(&mut stream, &geom, &model.nncc_breakdown(&geom), params);
            let conv = simulate_conventional_trial(&mut stream, &geom, &model.conventional_breakdown(&geom), params);
            tally.rates.record(&coop, &conv);
            tally.energy.push(coop.energy.as_f64());
            tally.conventional.push(conv.energy.as_f64());
        }
        Ok(tally)
    })?;
    let mut total = ProtocolTally::default();
    for part in &parts {
        total.rates.merge(&part.rates);
        total.energy.merge(&part.energy);
        total.conventional.merge(&part.conventional);
    }
    Ok(McReport {
        n_trials: n,
        seed: base.seed(),
        stream_id: base.stream_id(),
        rates: Some(total.rates),
        energy: total.energy,
        conventional_energy: Some(total.conventional),
        samples: Vec::new(),
        elapsed: start.elapsed(),
    })
}

/// `n` protocol rounds at a fixed geometry with fresh fading per slot.
pub fn estimate_outage<T: Real>(n: u64, geom: &Geometry<T>, params: &LinearParams<T>, base: &RandomStream) -> Result<McReport<T>> {
    run_protocol(n, GeometrySampler::Fixed(*geom), &PowerModel::new(*params)?, base)
}

/// Draws `n` PPP geometries for U1 at `r1` and records the cooperative
/// total power of each.
pub fn sample_power_distribution<T: Real>(
    n: u64,
    rho: T,
    r1: T,
    params: &LinearParams<T>,
    base: &RandomStream,
) -> Result<McReport<T>> {
    check_budget(n)?;
    let start = Instant::now();
    let model = PowerModel::new(params.with(|p| p.rho = rho)?)?;
    let sampler = GeometrySampler::Poisson { rho, r1 };
    let parts = chunked(n, |lo, hi| {
        let mut moments = Moments::default();
        let mut samples = Vec::with_capacity((hi - lo) as usize);
        for i in lo..hi {
            let geom = sampler.draw(&mut base.substream(i))?;
            let p = model.nncc_breakdown(&geom).total_nncc;
            moments.push(p.as_f64());
            samples.push(p);
        }
        Ok((moments, samples))
    })?;
    let mut energy = Moments::default();
    let mut samples = Vec::with_capacity(n as usize);
    for (m, s) in parts {
        energy.merge(&m);
        samples.extend(s);
    }
    samples.par_sort_unstable_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    Ok(McReport {
        n_trials: n,
        seed: base.seed(),
        stream_id: base.stream_id(),
        rates: None,
        energy,
        conventional_energy: None,
        samples,
        elapsed: start.elapsed(),
    })
}

/// Kolmogorov-Smirnov statistic of sorted `samples` against `cdf`.
pub fn ks_distance<T: Real>(samples: &[T], cdf: impl Fn(T) -> T + Sync) -> Result<T> {
    ks_distance_with(samples, |x| Ok(cdf(x)))
}

/// [`ks_distance`] for a fallible CDF. The CDF is evaluated in parallel.
pub fn ks_distance_with<T: Real>(samples: &[T], cdf: impl Fn(T) -> Result<T> + Sync) -> Result<T> {
    if samples.is_empty() {
        return Err(Error::Contract("ks_distance needs at least one sample".into()));
    }
    if samples.iter().any(|x| x.is_nan()) || samples.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Contract("ks_distance samples must be sorted ascending".into()));
    }
    let values: Vec<T> = samples.par_iter().map(|&x| cdf(x)).collect::<Result<_>>()?;
    let n = T::lit(samples.len() as f64);
    let mut d = T::zero();
    for (i, f) in values.into_iter().enumerate() {
        let upper = T::lit((i + 1) as f64) / n;
        let lower = T::lit(i as f64) / n;
        d = d.max((upper - f).abs()).max((lower - f).abs());
    }
    Ok(d)
}
