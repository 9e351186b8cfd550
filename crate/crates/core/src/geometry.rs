//! Placement of the cooperating pair relative to the base station.
//!
//! The BS sits at the origin and U1 at `(r1, 0)`. U2 is U1's nearest
//! neighbour in a homogeneous PPP of intensity `rho`, at distance `r` and
//! bearing `theta` (uniform on `[-π/2, 3π/2)`) from U1.

use crate::error::{Error, Result};
use crate::montecarlo::RandomStream;
use crate::quadrature::{gauss_kronrod, Tolerance};
use crate::Real;

/// One realisation of the pair geometry. Distances in metres, `theta` in
/// radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry<T> {
    pub r1: T,
    pub r: T,
    pub theta: T,
    pub r2: T,
}

impl<T: Real> Geometry<T> {
    /// Builds the geometry, deriving `r2` by the law of cosines.
    pub fn new(r1: T, r: T, theta: T) -> Result<Self> {
        let r2 = partner_distance_to_bs(r1, r, theta)?;
        Ok(Geometry { r1, r, theta, r2 })
    }
}

/// Nearest-neighbour distance density `2πρ r exp(-πρ r²)`.
pub fn nn_distance_pdf<T: Real>(r: T, rho: T) -> Result<T> {
    if !(r >= T::zero()) {
        return Err(Error::domain("nn_distance_pdf", r.as_f64(), "r >= 0"));
    }
    if !(rho > T::zero()) {
        return Err(Error::domain("nn_distance_pdf", rho.as_f64(), "rho > 0"));
    }
    let pi_rho = T::PI() * rho;
    Ok(T::lit(2.0) * pi_rho * r * (-pi_rho * r * r).exp())
}

/// `P(nearest neighbour within r) = 1 - exp(-πρ r²)`.
pub fn nn_distance_cdf<T: Real>(r: T, rho: T) -> T {
    if r <= T::zero() {
        return T::zero();
    }
    -(-T::PI() * rho * r * r).exp_m1()
}

/// Distance from U2 to the BS.
pub fn partner_distance_to_bs<T: Real>(r1: T, r: T, theta: T) -> Result<T> {
    if !(r1 > T::zero()) {
        return Err(Error::domain("partner_distance_to_bs", r1.as_f64(), "r1 > 0"));
    }
    if !(r >= T::zero()) {
        return Err(Error::domain("partner_distance_to_bs", r.as_f64(), "r >= 0"));
    }
    let sq = r * r + r1 * r1 + T::lit(2.0) * r1 * r * theta.cos();
    if sq < T::zero() {
        let scale = (r1 + r) * (r1 + r);
        if sq < -T::lit(1e-12) * scale {
            return Err(Error::domain(
                "partner_distance_to_bs",
                sq.as_f64(),
                "non-negative squared distance",
            ));
        }
        return Ok(T::zero());
    }
    Ok(sq.sqrt())
}

/// Draws `(r, θ)` by inverse CDF and derives `r2`.
///
/// Consumes exactly two uniforms from `stream`: first the distance, then the
/// bearing.
pub fn sample_nn_geometry<T: Real>(stream: &mut RandomStream, rho: T, r1: T) -> Result<Geometry<T>> {
    if !(rho > T::zero()) {
        return Err(Error::domain("sample_nn_geometry", rho.as_f64(), "rho > 0"));
    }
    let u = stream.uniform_open_below();
    let v = stream.uniform();
    let r = T::lit((-u.ln()).sqrt()) / (T::PI() * rho).sqrt();
    let lo = -T::FRAC_PI_2();
    let mut theta = lo + T::lit(v) * T::lit(2.0) * T::PI();
    // Rounding in narrow scalar types can land exactly on 3π/2.
    if theta >= T::lit(1.5) * T::PI() {
        theta = lo;
    }
    Geometry::new(r1, r, theta)
}

/// Radius beyond which the nearest-neighbour law has tail mass `exp(-x)`.
pub fn nn_tail_radius<T: Real>(rho: T, log_tail: T) -> T {
    (log_tail / (T::PI() * rho)).sqrt()
}

/// `E[r]` by adaptive quadrature of `r · f_r(r)` (closed form `1/(2√ρ)`).
pub fn mean_nn_distance<T: Real>(rho: T) -> Result<T> {
    if !(rho > T::zero()) {
        return Err(Error::domain("mean_nn_distance", rho.as_f64(), "rho > 0"));
    }
    // Tail beyond this radius weighs about r·e^{-50}.
    let r_max = nn_tail_radius(rho, T::lit(50.0));
    let pi_rho = T::PI() * rho;
    let integrand = |r: T| T::lit(2.0) * pi_rho * r * r * (-pi_rho * r * r).exp();
    let tol = Tolerance {
        abs: T::zero(),
        rel: T::epsilon() * T::lit(16.0),
    };
    Ok(gauss_kronrod(integrand, T::zero(), r_max, tol, 400)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn pdf_vanishes_at_origin_and_rejects_negative() {
        assert_eq!(nn_distance_pdf(0.0, 1e-4).unwrap(), 0.0);
        assert!(nn_distance_pdf(-1.0, 1e-4).is_err());
        assert!(nn_distance_pdf(1.0, 0.0).is_err());
    }

    #[test]
    fn pdf_normalises() {
        for rho in [1e-5f64, 1e-4, 1e-3] {
            let r_max = nn_tail_radius(rho, 50.0);
            let total = gauss_kronrod(|r| nn_distance_pdf(r, rho).unwrap(), 0.0, r_max, Tolerance::absolute(1e-13), 200)
                .unwrap()
                .value;
            assert!((total - 1.0).abs() < 1e-9, "rho={rho} total={total}");
        }
    }

    #[test]
    fn pdf_mode() {
        let rho = 1e-4;
        let analytic = 1.0 / (2.0 * PI * rho).sqrt();
        assert!((analytic - 39.894).abs() < 1e-3);
        let best = (0..100_000)
            .map(|i| i as f64 * 1e-3)
            .max_by(|a, b| nn_distance_pdf(*a, rho).unwrap().total_cmp(&nn_distance_pdf(*b, rho).unwrap()))
            .unwrap();
        assert!((best - analytic).abs() < 2e-3);
    }

    #[test]
    fn partner_distance_examples() {
        for theta in [0.0, 1.0, PI, -1.2] {
            assert_eq!(partner_distance_to_bs(100.0, 0.0, theta).unwrap(), 100.0);
        }
        assert!((partner_distance_to_bs(100.0f64, 20.0, 0.0).unwrap() - 120.0).abs() < 1e-12);
        assert!((partner_distance_to_bs(100.0, 20.0, PI).unwrap() - 80.0).abs() < 1e-12);
        // U2 right on top of the BS.
        assert!(partner_distance_to_bs(100.0, 100.0, PI).unwrap() < 1e-5);
        assert!(partner_distance_to_bs(0.0, 1.0, 0.0).is_err());
        assert!(partner_distance_to_bs(1.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn mean_distance_matches_closed_form() {
        for rho in [1e-4, 1e-2, 1.0 / (4.0 * PI), 3e-6] {
            let q = mean_nn_distance(rho).unwrap();
            let exact = 1.0 / (2.0 * rho.sqrt());
            assert!(((q - exact) / exact).abs() < 1e-9, "rho={rho}: {q} vs {exact}");
        }
        assert!((mean_nn_distance(1e-4f64).unwrap() - 50.0).abs() < 1e-7);
        assert!((mean_nn_distance(1e-2f64).unwrap() - 5.0).abs() < 1e-8);
    }

    #[test]
    fn samples_are_reproducible() {
        let draw = |seed| {
            let mut s = RandomStream::new(seed, 9);
            (0..50).map(|_| sample_nn_geometry(&mut s, 1e-4, 500.0).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
        assert_ne!(draw(3), draw(4));
    }

    #[test]
    fn sample_statistics() {
        let rho = 1e-4;
        let n = 1_000_000;
        let mut s = RandomStream::new(2024, 0);
        let mut rs = Vec::with_capacity(n);
        let mut bins = [0u64; 64];
        for _ in 0..n {
            let g = sample_nn_geometry(&mut s, rho, 1000.0).unwrap();
            assert!(g.theta >= -PI / 2.0 && g.theta < 1.5 * PI);
            let idx = ((g.theta + PI / 2.0) / (2.0 * PI) * 64.0) as usize;
            bins[idx.min(63)] += 1;
            rs.push(g.r);
        }
        let mean = rs.iter().sum::<f64>() / n as f64;
        assert!((mean - 50.0).abs() / 50.0 < 0.005, "mean r = {mean}");

        rs.sort_by(f64::total_cmp);
        let ks = rs
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let f = nn_distance_cdf(r, rho);
                (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.002, "ks = {ks}");

        let expected = n as f64 / 64.0;
        let chi2: f64 = bins.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
        // 99th percentile of chi-square with 63 degrees of freedom.
        assert!(chi2 < 92.01, "chi2 = {chi2}");
    }
}
