use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::{FeatureOpts, KernelOpts, SpectrogramOpts};
use crate::CliError;

/// Contents of a `--config` file: one optional section per command.
#[derive(Serialize, Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub spectrogram: SpectrogramOpts,
    pub features: FeatureOpts,
    pub kernels: KernelOpts,
}

pub fn load(path: Option<&Path>) -> Result<RunConfig, CliError> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// `base` with every value given on the command line (`top`) laid over it.
/// Absent options and unset switches in `top` keep the value from `base`.
pub fn overlay<T: Serialize + DeserializeOwned>(base: &T, top: &T) -> Result<T, CliError> {
    let internal = |e: serde_json::Error| CliError::Runtime(format!("config merge: {e}"));
    let mut merged = serde_json::to_value(base).map_err(internal)?;
    let top = serde_json::to_value(top).map_err(internal)?;
    if let (Some(out), Value::Object(given)) = (merged.as_object_mut(), top) {
        for (key, value) in given {
            if !matches!(value, Value::Null | Value::Bool(false)) {
                out.insert(key, value);
            }
        }
    }
    serde_json::from_value(merged).map_err(internal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::FamilyArg;

    #[test]
    fn command_line_wins_and_unset_values_fall_through() {
        let file = SpectrogramOpts {
            k: Some(4),
            n: Some(6.0),
            db: true,
            ..Default::default()
        };
        let cli = SpectrogramOpts {
            k: Some(5),
            family: Some(FamilyArg::RecUni),
            ..Default::default()
        };
        let merged = overlay(&file, &cli).unwrap();
        assert_eq!(merged.k, Some(5));
        assert_eq!(merged.n, Some(6.0));
        assert_eq!(merged.family, Some(FamilyArg::RecUni));
        assert!(merged.db);
    }

    #[test]
    fn config_sections_reject_unknown_keys() {
        let ok: RunConfig =
            serde_json::from_str(r#"{"spectrogram": {"K": 3, "nu-min": 40}}"#).unwrap();
        assert_eq!(ok.spectrogram.k, Some(3));
        assert_eq!(ok.spectrogram.nu_min, Some(40.0));
        assert!(serde_json::from_str::<RunConfig>(r#"{"spectrogram": {"bins": 3}}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"other": {}}"#).is_err());
    }
}
