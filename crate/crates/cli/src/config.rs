use std::path::{Path, PathBuf};

use nncc::SystemParams;
use serde::Deserialize;

use crate::spec::{Spacing, SweepVar};

/// Flat TOML configuration. Every key is optional; absent keys keep the
/// preset or built-in default.
///
/// ```toml
/// b_s = 2e6
/// rho = 1e-4
/// r1 = 500.0
/// sweep_var = "r1"
/// sweep_min = 100.0
/// sweep_max = 3000.0
/// sweep_count = 30
/// sweep_spacing = "linear"
/// ```
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub f_s: Option<f64>,
    #[serde(alias = "B_s")]
    pub b_s: Option<f64>,
    pub f_c: Option<f64>,
    #[serde(alias = "B_c")]
    pub b_c: Option<f64>,
    #[serde(alias = "G_U1_dB")]
    pub g_u1_db: Option<f64>,
    #[serde(alias = "G_U2_dB")]
    pub g_u2_db: Option<f64>,
    #[serde(alias = "G_BS_dB")]
    pub g_bs_db: Option<f64>,
    #[serde(alias = "Delta_s_dB")]
    pub gap_s_db: Option<f64>,
    #[serde(alias = "Delta_c_dB")]
    pub gap_c_db: Option<f64>,
    #[serde(alias = "N0")]
    pub n0: Option<f64>,
    pub sigma2_short: Option<f64>,
    pub sigma2_cell: Option<f64>,
    pub rho: Option<f64>,
    #[serde(alias = "P_out")]
    pub p_out_target: Option<f64>,
    #[serde(alias = "R")]
    pub rate: Option<f64>,

    pub r1: Option<f64>,
    pub r: Option<f64>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,

    pub sweep_var: Option<SweepVar>,
    pub sweep_min: Option<f64>,
    pub sweep_max: Option<f64>,
    pub sweep_count: Option<usize>,
    pub sweep_spacing: Option<Spacing>,
}

impl ConfigFile {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        Self::from_toml(&text).map_err(|e| anyhow::anyhow!("invalid config {}: {e}", path.display()))
    }

    /// Overwrites the system parameters that are set here.
    pub fn apply_params(&self, p: &mut SystemParams) {
        let pairs: [(&Option<f64>, &mut f64); 15] = [
            (&self.f_s, &mut p.f_s),
            (&self.b_s, &mut p.b_s),
            (&self.f_c, &mut p.f_c),
            (&self.b_c, &mut p.b_c),
            (&self.g_u1_db, &mut p.g_u1_db),
            (&self.g_u2_db, &mut p.g_u2_db),
            (&self.g_bs_db, &mut p.g_bs_db),
            (&self.gap_s_db, &mut p.gap_s_db),
            (&self.gap_c_db, &mut p.gap_c_db),
            (&self.n0, &mut p.n0),
            (&self.sigma2_short, &mut p.sigma2_short),
            (&self.sigma2_cell, &mut p.sigma2_cell),
            (&self.rho, &mut p.rho),
            (&self.p_out_target, &mut p.p_out_target),
            (&self.rate, &mut p.rate),
        ];
        for (src, dst) in pairs {
            if let Some(v) = *src {
                *dst = v;
            }
        }
    }

    /// Layers `top` over `self`: keys set in `top` win.
    pub fn merged(self, top: ConfigFile) -> ConfigFile {
        macro_rules! pick {
            ($($f:ident),*) => { ConfigFile { $($f: top.$f.or(self.$f)),* } };
        }
        pick!(
            f_s, b_s, f_c, b_c, g_u1_db, g_u2_db, g_bs_db, gap_s_db, gap_c_db, n0, sigma2_short, sigma2_cell, rho,
            p_out_target, rate, r1, r, seed, trials, workers, out, sweep_var, sweep_min, sweep_max, sweep_count,
            sweep_spacing
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_keys_and_aliases() {
        let c = ConfigFile::from_toml("B_s = 1e6\nrho = 2e-4\nr1 = 700.0\nsweep_var = \"p_out_target\"\nsweep_spacing = \"log\"\n")
            .unwrap();
        assert_eq!(c.b_s, Some(1e6));
        assert_eq!(c.rho, Some(2e-4));
        assert_eq!(c.r1, Some(700.0));
        assert_eq!(c.sweep_var, Some(SweepVar::POutTarget));
        assert_eq!(c.sweep_spacing, Some(Spacing::Log));
        let mut p = SystemParams::default();
        c.apply_params(&mut p);
        assert_eq!(p.b_s, 1e6);
        assert_eq!(p.rho, 2e-4);
        assert_eq!(p.b_c, SystemParams::default().b_c);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(ConfigFile::from_toml("bandwidth = 3.0").is_err());
        assert!(ConfigFile::from_toml("sweep_var = \"theta\"").is_err());
    }

    #[test]
    fn later_layer_wins() {
        let base = ConfigFile {
            rho: Some(1.0),
            r1: Some(5.0),
            ..Default::default()
        };
        let top = ConfigFile {
            rho: Some(2.0),
            ..Default::default()
        };
        let m = base.merged(top);
        assert_eq!(m.rho, Some(2.0));
        assert_eq!(m.r1, Some(5.0));
    }
}
