//! Distribution of the cooperative total power over the PPP.
//!
//! For a fixed U1 distance `r1` the cooperative total is a quadratic in the
//! neighbour distance,
//!
//! ```text
//! P(r, θ) = a r² + b(θ) r + c0,   a = 2ζ + ε η₂,  b(θ) = 2 ε η₂ r1 cos θ,
//!                                 c0 = ε (η₁ + η₂) r1²,
//! ```
//!
//! with `ε = 1 + (1 - P_out)²`, `r` Rayleigh distributed and `θ` uniform and
//! independent of `r`. (With equal MS antenna gains `η₁ = η₂ = η` and
//! `c0 = 2εη r1²`.)
//!
//! Two evaluations of the law are provided:
//!
//! * [`DistributionContext::cdf_reference`] integrates the nearest-neighbour
//!   law over the admissible `r`-interval for each bearing, straight from
//!   `F(p) = Pr(P(r, θ) <= p)`. This is the normative CDF.
//! * [`DistributionContext::cdf_paper`] / [`DistributionContext::pdf_paper`]
//!   evaluate the two-branch closed forms term by term (regions
//!   `Q₁: p <= c0` and `Q₂: p > c0`), including the additive `F(c0)` term of
//!   the upper branch. [`TheoremDiscrepancy`] quantifies how far they are from
//!   the reference.

use crate::error::{Error, Result};
use crate::powermodel::PowerModel;
use crate::quadrature::{gauss_kronrod, tanh_sinh, Tolerance};
use crate::Real;

const MAX_SEGMENTS: usize = 2000;

/// Coefficients of the total power as a quadratic in `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticForm<T> {
    /// `2ζ + ε η₂`, W/m².
    pub a: T,
    /// `ε η₂ r1`, W/m; `b(θ) = 2 · half_b · cos θ`.
    pub half_b: T,
    /// `ε (η₁ + η₂) r1²`, W. Total power when the neighbour coincides with U1.
    pub c0: T,
}

impl<T: Real> QuadraticForm<T> {
    pub fn from_model(model: &PowerModel<T>, r1: T) -> Self {
        let c = model.coefficients();
        let eps = model.targets().eps_total;
        QuadraticForm {
            a: T::lit(2.0) * c.zeta + eps * c.eta_u2,
            half_b: eps * c.eta_u2 * r1,
            c0: eps * (c.eta_u1 + c.eta_u2) * r1 * r1,
        }
    }

    /// Linear coefficient `b(θ)`.
    pub fn b(&self, theta: T) -> T {
        T::lit(2.0) * self.half_b * theta.cos()
    }

    pub fn eval(&self, r: T, theta: T) -> T {
        (self.a * r + self.b(theta)) * r + self.c0
    }

    /// Lower edge of `Q₁` at bearing `θ`: the minimum over `r` of
    /// `P(r, θ)` when `cos θ < 0`.
    pub fn q1_lower_boundary(&self, theta: T) -> T {
        let hb = self.half_b * theta.cos();
        self.c0 - hb * hb / self.a
    }

    /// Smallest attainable total power, reached at `θ = π`,
    /// `r = half_b / a`.
    pub fn support_infimum(&self) -> T {
        self.c0 - self.half_b * self.half_b / self.a
    }
}

/// Real roots of `a r² + b(θ) r + c0 - p = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootPair<T> {
    /// `sqrt((half_b cos θ)² - a (c0 - p))`.
    pub delta_r: T,
    pub r_small: T,
    pub r_large: T,
}

/// Roots of the power quadratic at level `p` and bearing `theta`, or `None`
/// when the discriminant is negative. Roots may be negative.
pub fn power_roots<T: Real>(p: T, theta: T, q: &QuadraticForm<T>) -> Option<RootPair<T>> {
    let hb = q.half_b * theta.cos();
    let disc = hb * hb - q.a * (q.c0 - p);
    if !(disc >= T::zero()) {
        return None;
    }
    Some(roots_from(q.a, hb, disc.sqrt(), q.c0 - p))
}

/// Roots of `a r² + 2 hb r + gap` given `delta = sqrt(hb² - a gap)`.
fn roots_from<T: Real>(a: T, hb: T, delta: T, gap: T) -> RootPair<T> {
    // Take the non-cancelling root first, recover the other from the
    // product of roots `gap / a`.
    let (r_small, r_large) = if hb > T::zero() {
        let r_small = -(hb + delta) / a;
        (r_small, gap / (a * r_small))
    } else {
        let r_large = (delta - hb) / a;
        if r_large == T::zero() {
            (T::zero(), T::zero())
        } else {
            (gap / (a * r_large), r_large)
        }
    };
    RootPair {
        delta_r: delta,
        r_small: r_small.min(r_large),
        r_large: r_large.max(r_small),
    }
}

/// Bearings admitting a real root below the junction: `[θ*, 2π - θ*]`
/// with `θ* ∈ [π/2, π]`.
#[derive(Debug, Clone, Copy)]
struct Opening<T> {
    cos_star: T,
    theta_star: T,
}

impl<T: Real> Opening<T> {
    /// Length of `[θ*, π]`.
    fn half_span(&self) -> T {
        (T::PI() - self.theta_star).max(T::zero())
    }
}

/// `exp(-k lo²) - exp(-k hi²)` without cancellation for `hi >= lo >= 0`.
fn annulus_mass<T: Real>(k: T, lo: T, hi: T) -> T {
    -(-k * lo * lo).exp() * (-k * (hi - lo) * (hi + lo)).exp_m1()
}

/// Everything needed to evaluate the power law for one `r1`.
#[derive(Debug, Clone, Copy)]
pub struct DistributionContext<T> {
    model: PowerModel<T>,
    form: QuadraticForm<T>,
    r1: T,
    rho: T,
    /// Absolute tolerance of the θ-quadratures behind CDF/PDF values.
    tol: T,
}

/// Tail mass left above the last point of the default evaluation grid.
pub const GRID_TAIL_MASS: f64 = 1e-6;

/// Default number of evaluation-grid points.
pub const GRID_POINTS: usize = 256;

impl<T: Real> DistributionContext<T> {
    /// Context for U1 at distance `r1`; density and rate come from the model.
    pub fn new(model: PowerModel<T>, r1: T) -> Result<Self> {
        if !(r1 > T::zero()) {
            return Err(Error::domain("DistributionContext::new", r1.as_f64(), "r1 > 0"));
        }
        Ok(DistributionContext {
            form: QuadraticForm::from_model(&model, r1),
            rho: model.params().rho(),
            model,
            r1,
            tol: T::lit(1e-9),
        })
    }

    pub fn with_tolerance(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }

    pub fn form(&self) -> &QuadraticForm<T> {
        &self.form
    }

    pub fn model(&self) -> &PowerModel<T> {
        &self.model
    }

    pub fn r1(&self) -> T {
        self.r1
    }

    pub fn rho(&self) -> T {
        self.rho
    }

    pub fn tolerance(&self) -> T {
        self.tol
    }

    pub fn support_infimum(&self) -> T {
        self.form.support_infimum()
    }

    /// Junction `c0` between the `Q₁` and `Q₂` branches.
    pub fn branch_point(&self) -> T {
        self.form.c0
    }

    fn pi_rho(&self) -> T {
        T::PI() * self.rho
    }

    /// For `support_infimum < p <= c0`.
    fn opening(&self, p: T) -> Opening<T> {
        let f = &self.form;
        let cos_star = (-(f.a * (f.c0 - p).max(T::zero())).sqrt() / f.half_b).max(-T::one());
        Opening {
            cos_star,
            theta_star: cos_star.acos(),
        }
    }

    /// `(half_b cos θ, Δ_R²)` at `θ = θ* + φ`. The discriminant is
    /// `half_b² (cos θ - cos θ*)(cos θ + cos θ*)`, with the first factor
    /// formed from `φ` so it stays accurate as `φ → 0`.
    fn at_offset(&self, o: &Opening<T>, phi: T) -> (T, T) {
        let two = T::lit(2.0);
        let cos = (o.theta_star + phi).cos();
        let diff = -two * (o.theta_star + phi / two).sin() * (phi / two).sin();
        let hb = self.form.half_b * cos;
        (hb, self.form.half_b * self.form.half_b * diff * (cos + o.cos_star))
    }

    /// Power level `p` with `F(p) >= 1 - tail` guaranteed: every bearing's
    /// admissible interval then covers `[0, r_q]` with `Pr(r > r_q) = tail`.
    pub fn upper_point(&self, tail: T) -> T {
        let r_q = (-tail.ln() / self.pi_rho()).sqrt();
        let f = &self.form;
        (f.a * r_q + T::lit(2.0) * f.half_b) * r_q + f.c0
    }

    fn annulus(&self, roots: &RootPair<T>) -> T {
        annulus_mass(self.pi_rho(), roots.r_small.max(T::zero()), roots.r_large.max(T::zero()))
    }

    /// `ρ Σ R e^{-πρR²} / (2Δ_R)` over the positive roots.
    fn root_density(&self, r_small: T, r_large: T, delta: T) -> T {
        let k = self.pi_rho();
        let term = |r: T| if r > T::zero() { r * (-k * r * r).exp() } else { T::zero() };
        self.rho * (term(r_large) + term(r_small)) / (T::lit(2.0) * delta)
    }

    /// `Pr(P <= p)` from the definition: for each bearing, the nearest-
    /// neighbour mass on the admissible interval `[max(0, R₁), max(0, R₂)]`,
    /// averaged over the bearing. Uses the symmetry `θ ↦ 2π - θ` to
    /// integrate over `[0, π]` only.
    pub fn cdf_reference(&self, p: T) -> Result<T> {
        self.cdf_reference_with(p, self.tol)
    }

    pub fn cdf_reference_with(&self, p: T, tol: T) -> Result<T> {
        if p <= self.support_infimum() {
            return Ok(T::zero());
        }
        let scale = T::FRAC_1_PI();
        let value = if p < self.form.c0 {
            let o = self.opening(p);
            let gap = self.form.c0 - p;
            let f = |phi: T| {
                let (hb, disc) = self.at_offset(&o, phi);
                if !(disc > T::zero()) {
                    return T::zero();
                }
                scale * self.annulus(&roots_from(self.form.a, hb, disc.sqrt(), gap))
            };
            tanh_sinh(f, T::zero(), o.half_span(), Tolerance::absolute(tol))?.value
        } else {
            let f = |theta: T| power_roots(p, theta, &self.form).map_or(T::zero(), |r| scale * self.annulus(&r));
            let half = T::FRAC_PI_2();
            let tol = Tolerance::absolute(tol / T::lit(2.0));
            gauss_kronrod(f, T::zero(), half, tol, MAX_SEGMENTS)?.value
                + gauss_kronrod(f, half, T::PI(), tol, MAX_SEGMENTS)?.value
        };
        Ok(value.max(T::zero()).min(T::one()))
    }

    /// Density of the total power, by differentiating the reference CDF
    /// under the bearing integral (`dR₂/dp = -dR₁/dp = 1/(2Δ_R)`).
    pub fn pdf_reference(&self, p: T) -> Result<T> {
        if p <= self.support_infimum() {
            return Ok(T::zero());
        }
        let two = T::lit(2.0);
        let tol = Tolerance {
            abs: self.tol,
            rel: self.tol,
        };
        let value = if p < self.form.c0 {
            let o = self.opening(p);
            let gap = self.form.c0 - p;
            let f = |phi: T| {
                let (hb, disc) = self.at_offset(&o, phi);
                if !(disc > T::zero()) {
                    return T::zero();
                }
                let r = roots_from(self.form.a, hb, disc.sqrt(), gap);
                two * self.root_density(r.r_small, r.r_large, r.delta_r)
            };
            tanh_sinh(f, T::zero(), o.half_span(), tol)?.value
        } else {
            let f = |theta: T| match power_roots(p, theta, &self.form) {
                Some(r) if r.delta_r > T::zero() => two * self.root_density(r.r_small, r.r_large, r.delta_r),
                _ => T::zero(),
            };
            let half = T::FRAC_PI_2();
            gauss_kronrod(f, T::zero(), half, tol, MAX_SEGMENTS)?.value
                + gauss_kronrod(f, half, T::PI(), tol, MAX_SEGMENTS)?.value
        };
        Ok(value)
    }

    /// Roots as printed, `R₁,₂ = (-ε η r1 cos θ ∓ Δ_R) / (2ζ + ε η)`, from
    /// `hb = ε η r1 cos θ` and `Δ_R²`.
    fn printed_roots_from(&self, hb: T, disc: T) -> Option<(T, T, T)> {
        if !(disc > T::zero()) {
            return None;
        }
        let delta = disc.sqrt();
        Some(((-hb - delta) / self.form.a, (-hb + delta) / self.form.a, delta))
    }

    fn printed_roots(&self, p: T, theta: T) -> Option<(T, T, T)> {
        let f = &self.form;
        let hb = f.half_b * theta.cos();
        self.printed_roots_from(hb, hb * hb - f.a * (f.c0 - p))
    }

    /// Printed lower branch of the CDF:
    /// `∫_{π/2}^{3π/2} (e^{-πρR₁²} - e^{-πρR₂²}) / 2π dθ`, integrand zero
    /// where `Δ_R` is not real. The integrand depends on `θ` only through
    /// `cos θ`, so the real part `[θ*, 2π - θ*]` is taken as twice
    /// `[θ*, π]`, in the offset `φ = θ - θ*`.
    pub fn cdf_paper_q1(&self, p: T) -> Result<T> {
        if p <= self.support_infimum() {
            return Ok(T::zero());
        }
        let k = self.pi_rho();
        let o = self.opening(p.min(self.form.c0));
        let f = |phi: T| {
            let (hb, disc) = self.at_offset(&o, phi);
            match self.printed_roots_from(hb, disc) {
                Some((r1, r2, _)) => ((-k * r1 * r1).exp() - (-k * r2 * r2).exp()) / T::PI(),
                None => T::zero(),
            }
        };
        Ok(tanh_sinh(f, T::zero(), o.half_span(), Tolerance::absolute(self.tol))?.value)
    }

    /// Printed upper branch of the CDF:
    /// `∫_{-π/2}^{3π/2} (1 - e^{-πρR₂²}) / 2π dθ + F(c0)`.
    pub fn cdf_paper_q2(&self, p: T) -> Result<T> {
        let k = self.pi_rho();
        let f = |theta: T| match self.printed_roots(p, theta) {
            Some((_, r2, _)) => -(-k * r2 * r2).exp_m1() / (T::lit(2.0) * T::PI()),
            None => T::zero(),
        };
        let tol = Tolerance::absolute(self.tol / T::lit(2.0));
        let (lo, mid, hi) = (-T::FRAC_PI_2(), T::FRAC_PI_2(), T::lit(1.5) * T::PI());
        let integral = gauss_kronrod(f, lo, mid, tol, MAX_SEGMENTS)?.value
            + gauss_kronrod(f, mid, hi, tol, MAX_SEGMENTS)?.value;
        Ok(integral + self.cdf_paper_q1(self.form.c0)?)
    }

    /// The published two-branch CDF, evaluated as printed.
    pub fn cdf_paper(&self, p: T) -> Result<T> {
        if p <= self.support_infimum() {
            Ok(T::zero())
        } else if p <= self.form.c0 {
            self.cdf_paper_q1(p)
        } else {
            self.cdf_paper_q2(p)
        }
    }

    /// Printed lower branch of the PDF:
    /// `∫_{π/2}^{3π/2} (ρR₂e^{-πρR₂²} + ρR₁e^{-πρR₁²}) / (2Δ_R) dθ`,
    /// integrated like [`cdf_paper_q1`](Self::cdf_paper_q1).
    pub fn pdf_paper_q1(&self, p: T) -> Result<T> {
        if p <= self.support_infimum() {
            return Ok(T::zero());
        }
        let k = self.pi_rho();
        let rho = self.rho;
        let o = self.opening(p.min(self.form.c0));
        let f = |phi: T| {
            let (hb, disc) = self.at_offset(&o, phi);
            match self.printed_roots_from(hb, disc) {
                Some((r1, r2, delta)) => (rho * r2 * (-k * r2 * r2).exp() + rho * r1 * (-k * r1 * r1).exp()) / delta,
                None => T::zero(),
            }
        };
        let tol = Tolerance {
            abs: self.tol,
            rel: self.tol,
        };
        Ok(tanh_sinh(f, T::zero(), o.half_span(), tol)?.value)
    }

    /// Printed upper branch of the PDF:
    /// `∫_{-π/2}^{3π/2} ρR₂e^{-πρR₂²} / (2Δ_R) dθ`.
    pub fn pdf_paper_q2(&self, p: T) -> Result<T> {
        let k = self.pi_rho();
        let rho = self.rho;
        let f = |theta: T| match self.printed_roots(p, theta) {
            Some((_, r2, delta)) => rho * r2 * (-k * r2 * r2).exp() / (T::lit(2.0) * delta),
            None => T::zero(),
        };
        let tol = Tolerance {
            abs: self.tol / T::lit(2.0),
            rel: self.tol,
        };
        let (lo, mid, hi) = (-T::FRAC_PI_2(), T::FRAC_PI_2(), T::lit(1.5) * T::PI());
        Ok(gauss_kronrod(f, lo, mid, tol, MAX_SEGMENTS)?.value + gauss_kronrod(f, mid, hi, tol, MAX_SEGMENTS)?.value)
    }

    /// The published two-branch PDF, evaluated as printed.
    pub fn pdf_paper(&self, p: T) -> Result<T> {
        if p <= self.support_infimum() {
            Ok(T::zero())
        } else if p <= self.form.c0 {
            self.pdf_paper_q1(p)
        } else {
            self.pdf_paper_q2(p)
        }
    }

    /// `E[P]` from the moments `E[r²] = 1/(πρ)` and `E[cos θ] = 0`:
    /// `a/(πρ) + c0`.
    pub fn expected_power(&self) -> T {
        self.form.a / self.pi_rho() + self.form.c0
    }

    /// `E[P]` by nested adaptive quadrature over `r ∈ [0, r_max]` and
    /// `θ ∈ [-π/2, 3π/2]`, where `r_max` leaves tail mass `e^{-45}`.
    pub fn expected_power_quadrature(&self) -> Result<T> {
        let k = self.pi_rho();
        let rho = self.rho;
        let r_max = (T::lit(45.0) / k).sqrt();
        let inner_tol = Tolerance::relative(T::lit(1e-13).max(T::epsilon() * T::lit(8.0)));
        let outer_tol = Tolerance::relative(T::lit(1e-12).max(T::epsilon() * T::lit(16.0)));
        let mut failure = None;
        let outer = gauss_kronrod(
            |theta: T| {
                let joint = |r: T| self.form.eval(r, theta) * rho * r * (-k * r * r).exp();
                match gauss_kronrod(joint, T::zero(), r_max, inner_tol, MAX_SEGMENTS) {
                    Ok(v) => v.value,
                    Err(e) => {
                        failure.get_or_insert(e);
                        T::nan()
                    }
                }
            },
            -T::FRAC_PI_2(),
            T::lit(1.5) * T::PI(),
            outer_tol,
            MAX_SEGMENTS,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(outer?.value)
    }

    /// Delivered bits per joule, `2R / E[P]`.
    pub fn energy_efficiency(&self) -> T {
        T::lit(2.0) * self.model.params().rate() / self.expected_power()
    }

    /// Non-cooperative expectation `η_C₁ r1² + η_C₂ (r1² + 1/(πρ))`, by the
    /// same moment argument (`E[r2²] = r1² + E[r²]`).
    pub fn conventional_expected_power(&self) -> T {
        let c = self.model.conventional_coefficients();
        let r1_sq = self.r1 * self.r1;
        c.eta_u1 * r1_sq + c.eta_u2 * (r1_sq + T::one() / self.pi_rho())
    }

    pub fn conventional_energy_efficiency(&self) -> T {
        T::lit(2.0) * self.model.params().rate() / self.conventional_expected_power()
    }

    /// `n` increasing points covering the support: an eighth of them
    /// evenly spaced on `[support_infimum, c0)`, the rest geometric on
    /// `[c0, upper_point(GRID_TAIL_MASS)]`.
    pub fn grid(&self, n: usize) -> Vec<T> {
        let n = n.max(4);
        let lo = self.support_infimum();
        let c0 = self.form.c0;
        let hi = self.upper_point(T::lit(GRID_TAIL_MASS));
        let n_low = n / 8;
        let n_high = n - n_low;
        let low = (0..n_low).map(|k| lo + (c0 - lo) * T::lit(k as f64 / n_low as f64));
        let ratio = (hi / c0).ln();
        let high = (0..n_high).map(|k| {
            if k + 1 == n_high {
                hi
            } else {
                c0 * (ratio * T::lit(k as f64 / (n_high - 1) as f64)).exp()
            }
        });
        low.chain(high).collect()
    }

    /// Evaluates both CDFs and both PDFs on [`grid`](Self::grid)`(n)`.
    pub fn evaluate(&self, n: usize) -> Result<DistributionResult<T>> {
        let p_grid = self.grid(n);
        let mut result = DistributionResult {
            cdf_paper: Vec::with_capacity(p_grid.len()),
            pdf_paper: Vec::with_capacity(p_grid.len()),
            cdf_reference: Vec::with_capacity(p_grid.len()),
            pdf_reference: Vec::with_capacity(p_grid.len()),
            expected_power: self.expected_power(),
            energy_efficiency: self.energy_efficiency(),
            p_grid: Vec::new(),
        };
        for &p in &p_grid {
            result.cdf_paper.push(self.cdf_paper(p)?);
            result.pdf_paper.push(self.pdf_paper(p)?);
            result.cdf_reference.push(self.cdf_reference(p)?);
            result.pdf_reference.push(self.pdf_reference(p)?);
        }
        result.p_grid = p_grid;
        Ok(result)
    }

    fn integrate_density(&self, density: impl Fn(T) -> Result<T>) -> Result<T> {
        let mut failure = None;
        let mut eval = |p: T| match density(p) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                T::nan()
            }
        };
        let lo = self.support_infimum();
        let c0 = self.form.c0;
        let hi = self.upper_point(T::lit(1e-13));
        let tol = Tolerance::absolute(T::lit(1e-8));
        let lower = tanh_sinh(&mut eval, lo, c0, tol);
        let upper = gauss_kronrod(&mut eval, c0, hi, tol, MAX_SEGMENTS);
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(lower?.value + upper?.value)
    }

    /// Compares the printed closed forms with the reference on `result`.
    pub fn discrepancy(&self, result: &DistributionResult<T>) -> Result<TheoremDiscrepancy<T>> {
        let c0 = self.form.c0;
        let mut max_gap_q1 = T::zero();
        let mut max_gap_q2 = T::zero();
        let mut argmax = T::zero();
        let mut max_gap = T::zero();
        let mut max_pdf_gap = T::zero();
        for i in 0..result.p_grid.len() {
            let p = result.p_grid[i];
            let gap = (result.cdf_paper[i] - result.cdf_reference[i]).abs();
            if p <= c0 {
                max_gap_q1 = max_gap_q1.max(gap);
            } else {
                max_gap_q2 = max_gap_q2.max(gap);
            }
            if gap > max_gap {
                max_gap = gap;
                argmax = p;
            }
            max_pdf_gap = max_pdf_gap.max((result.pdf_paper[i] - result.pdf_reference[i]).abs());
        }

        // Central differences of both CDFs against their PDFs at up to 50
        // grid points, with the step kept well inside the smooth pieces.
        let lo = self.support_infimum();
        let hi = *result.p_grid.last().unwrap_or(&lo);
        let fine = self.with_tolerance(T::lit(1e-13).max(T::epsilon() * T::lit(64.0)));
        let candidates: Vec<(T, T)> = result
            .p_grid
            .iter()
            .filter_map(|&p| fd_step(p, lo, hi, c0).map(|h| (p, h)))
            .collect();
        let stride = (candidates.len() / 50).max(1);
        let mut fd_paper_max_rel = T::zero();
        let mut fd_reference_max_abs = T::zero();
        let mut fd_points = 0;
        for &(p, h) in candidates.iter().step_by(stride).take(50) {
            let two_h = T::lit(2.0) * h;
            let fd_paper = (fine.cdf_paper(p + h)? - fine.cdf_paper(p - h)?) / two_h;
            let pdf_paper = fine.pdf_paper(p)?;
            let rel = (fd_paper - pdf_paper).abs() / pdf_paper.abs().max(T::min_positive_value());
            fd_paper_max_rel = fd_paper_max_rel.max(rel);
            let fd_ref = (fine.cdf_reference(p + h)? - fine.cdf_reference(p - h)?) / two_h;
            fd_reference_max_abs = fd_reference_max_abs.max((fd_ref - fine.pdf_reference(p)?).abs());
            fd_points += 1;
        }

        Ok(TheoremDiscrepancy {
            max_cdf_gap: max_gap,
            max_cdf_gap_at: argmax,
            max_cdf_gap_q1: max_gap_q1,
            max_cdf_gap_q2: max_gap_q2,
            max_pdf_gap,
            pdf_paper_integral_minus_one: self.integrate_density(|p| self.pdf_paper(p))? - T::one(),
            pdf_reference_integral_minus_one: self.integrate_density(|p| self.pdf_reference(p))? - T::one(),
            cdf_paper_junction_jump: self.cdf_paper_q2(c0)? - self.cdf_paper_q1(c0)?,
            pdf_paper_junction_jump: self.pdf_paper_q2(c0)? - self.pdf_paper_q1(c0)?,
            reference_mass_below_junction: self.cdf_reference(c0)?,
            fd_paper_max_rel,
            fd_reference_max_abs,
            fd_points,
        })
    }
}

/// Central-difference step at `p` for a law supported on `[lo, hi]` with a
/// kink at `c0`: `1e-4` of the support, shrunk near the edges and the
/// kink. `None` when `p` sits too close to one of them.
pub fn fd_step<T: Real>(p: T, lo: T, hi: T, c0: T) -> Option<T> {
    let spread = hi - lo;
    let clearance = (p - lo).min(hi - p).min((p - c0).abs());
    if !(clearance > spread * T::lit(1e-5)) {
        return None;
    }
    Some((spread * T::lit(1e-4)).min(clearance / T::lit(8.0)))
}

/// CDF/PDF values of the cooperative total on a power grid (W).
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionResult<T> {
    pub p_grid: Vec<T>,
    pub cdf_paper: Vec<T>,
    pub pdf_paper: Vec<T>,
    pub cdf_reference: Vec<T>,
    pub pdf_reference: Vec<T>,
    pub expected_power: T,
    /// bits/J
    pub energy_efficiency: T,
}

/// How the printed closed forms deviate from the reference law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremDiscrepancy<T> {
    /// `max |cdf_paper - cdf_reference|` over the grid, and where.
    pub max_cdf_gap: T,
    pub max_cdf_gap_at: T,
    pub max_cdf_gap_q1: T,
    pub max_cdf_gap_q2: T,
    pub max_pdf_gap: T,
    pub pdf_paper_integral_minus_one: T,
    pub pdf_reference_integral_minus_one: T,
    /// Upper-branch minus lower-branch value at `p = c0`.
    pub cdf_paper_junction_jump: T,
    pub pdf_paper_junction_jump: T,
    /// `F(c0)` from the reference CDF.
    pub reference_mass_below_junction: T,
    /// Central differences of `cdf_paper` against `pdf_paper`.
    pub fd_paper_max_rel: T,
    /// Central differences of `cdf_reference` against `pdf_reference`.
    pub fd_reference_max_abs: T,
    pub fd_points: usize,
}
