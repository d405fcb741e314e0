//! Optional TOML config file. Keys mirror the long flag names exactly
//! (`K`, `Ec`, `ng-from`, `gamma-w-plus`, ...); a flag given on the command
//! line always wins over the file.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(rename = "K")]
    pub k: Option<usize>,
    pub g: Option<f64>,
    #[serde(rename = "Ec")]
    pub ec: Option<f64>,
    pub mbar: Option<f64>,
    pub m0: Option<i64>,
    pub ng: Option<f64>,
    pub units: Option<String>,

    #[serde(rename = "EJ")]
    pub ej: Option<f64>,
    #[serde(rename = "ng-from")]
    pub ng_from: Option<f64>,
    #[serde(rename = "ng-to")]
    pub ng_to: Option<f64>,
    pub steps: Option<usize>,
    #[serde(rename = "check-K")]
    pub check_k: Option<usize>,

    pub source: Option<String>,
    pub lambda: Option<f64>,
    #[serde(rename = "lambda-per-K")]
    pub lambda_per_k: Option<bool>,
    #[serde(rename = "K-list")]
    pub k_list: Option<Vec<usize>>,
    pub seeds: Option<u64>,

    pub amps: Option<String>,
    #[serde(rename = "A")]
    pub a: Option<f64>,
    pub seed: Option<u64>,
    pub scale: Option<f64>,
    #[serde(rename = "amp-file")]
    pub amp_file: Option<String>,

    pub gamma: Option<f64>,
    #[serde(rename = "gamma-w-plus")]
    pub gamma_w_plus: Option<f64>,
    #[serde(rename = "gamma-w-minus")]
    pub gamma_w_minus: Option<f64>,
    #[serde(rename = "gamma-e-plus")]
    pub gamma_e_plus: Option<f64>,
    #[serde(rename = "gamma-e-minus")]
    pub gamma_e_minus: Option<f64>,
    pub omega: Option<f64>,
    pub t: Option<f64>,
    pub dt: Option<f64>,
    #[serde(rename = "p-plus")]
    pub p_plus: Option<f64>,
    #[serde(rename = "p-zero")]
    pub p_zero: Option<f64>,
    #[serde(rename = "p-minus")]
    pub p_minus: Option<f64>,
    #[serde(rename = "alpha-re")]
    pub alpha_re: Option<f64>,
    #[serde(rename = "alpha-im")]
    pub alpha_im: Option<f64>,
    pub every: Option<usize>,

    pub corrupt: Option<String>,
    pub csv: Option<bool>,
}

impl FileConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &std::path::Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::from_toml_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_mirror_flags() {
        let c = FileConfig::from_toml_str(
            "K = 8\nEc = 0.5\nng-from = 0.1\ngamma-w-plus = 0.3\nK-list = [10, 100]\ncsv = true\n",
        )
        .unwrap();
        assert_eq!(c.k, Some(8));
        assert_eq!(c.ec, Some(0.5));
        assert_eq!(c.ng_from, Some(0.1));
        assert_eq!(c.gamma_w_plus, Some(0.3));
        assert_eq!(c.k_list, Some(vec![10, 100]));
        assert_eq!(c.csv, Some(true));
    }

    #[test]
    fn unknown_and_mistyped_keys_fail() {
        assert!(FileConfig::from_toml_str("Kk = 8").is_err());
        assert!(FileConfig::from_toml_str("K = -8").is_err());
        assert!(FileConfig::from_toml_str("g = \"one\"").is_err());
        assert_eq!(FileConfig::from_toml_str("").unwrap(), FileConfig::default());
    }
}
