//! System constants and their validated, linear-scale form.
//!
//! Frequencies and bandwidths are in Hz, `n0` in W/Hz, `rho` in MS/m² and
//! `rate` in bits/s. Every `*_db` field is a power ratio in dB.

use crate::error::{Error, ParamViolation, Result};
use crate::Real;

/// Speed of light in vacuum, m/s (exact SI value).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Thermal noise density of -174 dBm/Hz, in W/Hz.
pub const DEFAULT_N0: f64 = 3.981_071_705_534_969e-21;

/// Raw system parameters as a user writes them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<T> {
    /// Short-range carrier frequency.
    pub f_s: T,
    /// Short-range bandwidth.
    pub b_s: T,
    /// Cellular carrier frequency.
    pub f_c: T,
    /// Cellular bandwidth.
    pub b_c: T,
    pub g_u1_db: T,
    pub g_u2_db: T,
    pub g_bs_db: T,
    /// Short-range capacity gap.
    pub gap_s_db: T,
    /// Cellular capacity gap.
    pub gap_c_db: T,
    /// Noise power spectral density.
    pub n0: T,
    /// Mean of the short-range fading power gains.
    pub sigma2_short: T,
    /// Mean of the cellular fading power gains.
    pub sigma2_cell: T,
    /// Mobile-station density.
    pub rho: T,
    /// End-to-end target outage probability.
    pub p_out_target: T,
    /// Required data rate.
    pub rate: T,
}

impl<T: Real> Default for SystemParams<T> {
    /// 2.4 GHz / 2 MHz short range, 2100 MHz / 5 MHz cellular, 0 dB MS and
    /// 5 dB BS antennas, 4 dB and 2 dB gaps, -174 dBm/Hz noise, unit-mean
    /// Rayleigh fading, 1e-4 MS/m², `P_out = 1e-3`, 100 kbit/s.
    fn default() -> Self {
        SystemParams {
            f_s: T::lit(2.4e9),
            b_s: T::lit(2.0e6),
            f_c: T::lit(2.1e9),
            b_c: T::lit(5.0e6),
            g_u1_db: T::zero(),
            g_u2_db: T::zero(),
            g_bs_db: T::lit(5.0),
            gap_s_db: T::lit(4.0),
            gap_c_db: T::lit(2.0),
            n0: T::lit(DEFAULT_N0),
            sigma2_short: T::one(),
            sigma2_cell: T::one(),
            rho: T::lit(1e-4),
            p_out_target: T::lit(1e-3),
            rate: T::lit(1e5),
        }
    }
}

impl<T: Real> SystemParams<T> {
    /// Field names paired with their values, in declaration order.
    pub fn fields(&self) -> [(&'static str, T); 15] {
        [
            ("f_s", self.f_s),
            ("b_s", self.b_s),
            ("f_c", self.f_c),
            ("b_c", self.b_c),
            ("g_u1_db", self.g_u1_db),
            ("g_u2_db", self.g_u2_db),
            ("g_bs_db", self.g_bs_db),
            ("gap_s_db", self.gap_s_db),
            ("gap_c_db", self.gap_c_db),
            ("n0", self.n0),
            ("sigma2_short", self.sigma2_short),
            ("sigma2_cell", self.sigma2_cell),
            ("rho", self.rho),
            ("p_out_target", self.p_out_target),
            ("rate", self.rate),
        ]
    }

    /// Checks every invariant and computes the derived constants once.
    pub fn validate(&self) -> Result<LinearParams<T>> {
        for (field, value) in self.fields() {
            if !value.is_finite() {
                return Err(Error::InvalidParam {
                    field,
                    violation: ParamViolation::NotFinite,
                });
            }
        }
        let positive = [
            ("f_s", self.f_s),
            ("b_s", self.b_s),
            ("f_c", self.f_c),
            ("b_c", self.b_c),
            ("n0", self.n0),
            ("sigma2_short", self.sigma2_short),
            ("sigma2_cell", self.sigma2_cell),
            ("rho", self.rho),
            ("rate", self.rate),
        ];
        for (field, value) in positive {
            if value <= T::zero() {
                return Err(Error::InvalidParam {
                    field,
                    violation: ParamViolation::NotPositive,
                });
            }
        }
        if !(self.p_out_target > T::zero() && self.p_out_target < T::one()) {
            return Err(Error::InvalidParam {
                field: "p_out_target",
                violation: ParamViolation::NotProbability,
            });
        }
        for (field, value) in [("gap_s_db", self.gap_s_db), ("gap_c_db", self.gap_c_db)] {
            if value <= T::zero() {
                return Err(Error::InvalidParam {
                    field,
                    violation: ParamViolation::GapNotAboveUnity,
                });
            }
        }

        Ok(LinearParams {
            raw: *self,
            lambda_s: wavelength(self.f_s)?,
            lambda_c: wavelength(self.f_c)?,
            g_u1: db_to_linear(self.g_u1_db)?,
            g_u2: db_to_linear(self.g_u2_db)?,
            g_bs: db_to_linear(self.g_bs_db)?,
            delta_s: db_to_linear(self.gap_s_db)?,
            delta_c: db_to_linear(self.gap_c_db)?,
        })
    }
}

/// Validated parameters with wavelengths and linear gains precomputed.
///
/// Only obtainable through [`SystemParams::validate`], so every instance
/// satisfies the parameter invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearParams<T> {
    raw: SystemParams<T>,
    lambda_s: T,
    lambda_c: T,
    g_u1: T,
    g_u2: T,
    g_bs: T,
    delta_s: T,
    delta_c: T,
}

impl<T: Real> LinearParams<T> {
    pub fn raw(&self) -> &SystemParams<T> {
        &self.raw
    }

    pub fn lambda_s(&self) -> T {
        self.lambda_s
    }

    pub fn lambda_c(&self) -> T {
        self.lambda_c
    }

    pub fn g_u1(&self) -> T {
        self.g_u1
    }

    pub fn g_u2(&self) -> T {
        self.g_u2
    }

    pub fn g_bs(&self) -> T {
        self.g_bs
    }

    pub fn delta_s(&self) -> T {
        self.delta_s
    }

    pub fn delta_c(&self) -> T {
        self.delta_c
    }

    pub fn rate(&self) -> T {
        self.raw.rate
    }

    pub fn p_out(&self) -> T {
        self.raw.p_out_target
    }

    pub fn rho(&self) -> T {
        self.raw.rho
    }

    /// Re-validates a modified copy of the raw parameters.
    pub fn with(&self, edit: impl FnOnce(&mut SystemParams<T>)) -> Result<Self> {
        let mut raw = self.raw;
        edit(&mut raw);
        raw.validate()
    }
}

/// `10^(x/10)`.
pub fn db_to_linear<T: Real>(x_db: T) -> Result<T> {
    if !x_db.is_finite() {
        return Err(Error::domain("db_to_linear", x_db.as_f64(), "finite dB value"));
    }
    Ok(T::lit(10.0).powf(x_db / T::lit(10.0)))
}

/// Free-space wavelength `c / f`.
pub fn wavelength<T: Real>(freq: T) -> Result<T> {
    if !(freq > T::zero()) || !freq.is_finite() {
        return Err(Error::domain("wavelength", freq.as_f64(), "frequency > 0"));
    }
    Ok(T::lit(SPEED_OF_LIGHT) / freq)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn db_conversion_examples() {
        assert_eq!(db_to_linear(0.0_f64).unwrap(), 1.0);
        assert!(close(db_to_linear(5.0_f64).unwrap(), 3.16228, 1e-5));
        assert!(close(db_to_linear(4.0_f64).unwrap(), 2.51189, 1e-5));
        assert!(db_to_linear(f64::NAN).is_err());
        assert!(db_to_linear(f64::INFINITY).is_err());
    }

    #[test]
    fn db_round_trip() {
        for a in [-30.0, -4.0, 0.5, 2.0, 17.3, 60.0_f64] {
            let prod = db_to_linear(a).unwrap() * db_to_linear(-a).unwrap();
            assert!((prod - 1.0).abs() < 1e-12, "a={a} prod={prod}");
        }
    }

    #[test]
    fn wavelength_examples() {
        assert!(close(wavelength(2.4e9_f64).unwrap(), 0.124_913_524_166_666_7, 1e-15));
        assert!(close(wavelength(2.1e9_f64).unwrap(), 0.142_758_313_333_333_3, 1e-15));
        assert_eq!(wavelength(SPEED_OF_LIGHT).unwrap(), 1.0);
        assert!(wavelength(0.0_f64).is_err());
        assert!(wavelength(-1.0_f64).is_err());
    }

    #[test]
    fn default_n0_is_minus_174_dbm_per_hz() {
        let n0 = 10f64.powf(-20.4);
        assert!((DEFAULT_N0 - n0).abs() / n0 < 1e-14);
    }

    #[test]
    fn paper_parameter_set_is_accepted() {
        let lp = SystemParams::<f64>::default().validate().unwrap();
        assert!(close(lp.g_bs(), 3.162_277_660_168_379, 1e-14));
        assert!(close(lp.delta_s(), 2.511_886_431_509_58, 1e-14));
        assert!(close(lp.delta_c(), 1.584_893_192_461_113, 1e-14));
        assert_eq!(lp.g_u1(), 1.0);
    }

    #[test]
    fn violations_name_the_field() {
        let mut p = SystemParams::<f64>::default();
        p.p_out_target = 0.0;
        assert_eq!(
            p.validate().unwrap_err(),
            Error::InvalidParam {
                field: "p_out_target",
                violation: ParamViolation::NotProbability
            }
        );

        let mut p = SystemParams::<f64>::default();
        p.rho = -1.0;
        assert_eq!(
            p.validate().unwrap_err(),
            Error::InvalidParam {
                field: "rho",
                violation: ParamViolation::NotPositive
            }
        );

        let mut p = SystemParams::<f64>::default();
        p.gap_c_db = 0.0;
        assert!(matches!(
            p.validate(),
            Err(Error::InvalidParam { field: "gap_c_db", violation: ParamViolation::GapNotAboveUnity })
        ));

        let mut p = SystemParams::<f64>::default();
        p.n0 = f64::NAN;
        assert!(matches!(
            p.validate(),
            Err(Error::InvalidParam { field: "n0", violation: ParamViolation::NotFinite })
        ));

        let mut p = SystemParams::<f64>::default();
        p.p_out_target = 1.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn validation_is_idempotent() {
        let lp = SystemParams::<f64>::default().validate().unwrap();
        let again = lp.raw().validate().unwrap();
        assert_eq!(lp, again);
    }

    #[test]
    fn single_precision_validates() {
        let lp = SystemParams::<f32>::default().validate().unwrap();
        assert!((lp.lambda_s() - 0.124_913_5).abs() < 1e-6);
    }
}
