use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{FixtureBackend, HttpBackend, HttpTemplate, KeywordSpotter, ModerationBackend, Result};

/// Declarative backend description as it appears in campaign configs.
/// Relative paths resolve against the directory of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BackendConfig {
    Http {
        name: String,
        template: HttpTemplate,
    },
    Fixture {
        name: String,
        path: PathBuf,
    },
    KeywordSpotter {
        name: String,
        /// Directory of `<tag>__<word>.wav` files.
        templates: PathBuf,
        #[serde(default)]
        threshold: Option<f64>,
        #[serde(default)]
        window_s: Option<f64>,
        #[serde(default)]
        hop_s: Option<f64>,
    },
}

impl BackendConfig {
    pub fn name(&self) -> &str {
        match self {
            BackendConfig::Http { name, .. }
            | BackendConfig::Fixture { name, .. }
            | BackendConfig::KeywordSpotter { name, .. } => name,
        }
    }

    pub fn build(&self, base_dir: &Path) -> Result<Arc<dyn ModerationBackend>> {
        Ok(match self {
            BackendConfig::Http { name, template } => Arc::new(HttpBackend::new(name.clone(), template.clone())?),
            BackendConfig::Fixture { name, path } => Arc::new(FixtureBackend::load(name.clone(), base_dir.join(path))?),
            BackendConfig::KeywordSpotter { .. } => Arc::new(self.build_spotter(base_dir)?),
        })
    }

    /// The spotter behind a `keyword_spotter` entry, threshold applied when
    /// one is configured.
    pub fn build_spotter(&self, base_dir: &Path) -> Result<KeywordSpotter> {
        let BackendConfig::KeywordSpotter {
            name,
            templates,
            threshold,
            window_s,
            hop_s,
        } = self
        else {
            return Err(crate::BackendError::Config(format!("`{}` is not a keyword spotter", self.name())));
        };
        let mut s = KeywordSpotter::load(name.clone(), base_dir.join(templates))?;
        if let Some(t) = threshold {
            s = s.with_threshold(*t)?;
        }
        s.window_s = *window_s;
        s.hop_s = hop_s.unwrap_or(KeywordSpotter::DEFAULT_HOP_S);
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_kind() {
        let c: BackendConfig =
            serde_json::from_str(r#"{"kind": "fixture", "name": "fx", "path": "f.json"}"#).unwrap();
        assert_eq!(c.name(), "fx");
        let c: BackendConfig = serde_json::from_str(
            r#"{"kind": "keyword_spotter", "name": "desk", "templates": "t", "threshold": 3.5}"#,
        )
        .unwrap();
        assert!(matches!(c, BackendConfig::KeywordSpotter { threshold: Some(_), .. }));
        let c: BackendConfig = serde_json::from_str(
            r#"{"kind": "http", "name": "api", "template": {"endpoint": "http://x", "body": {"kind": "multipart", "file_field": "f"},
                "response": {"category_path": "label"}, "rate_limit_per_s": 2}}"#,
        )
        .unwrap();
        assert_eq!(c.name(), "api");
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(serde_json::from_str::<BackendConfig>(r#"{"kind": "fixture", "name": "fx", "path": "f", "x": 1}"#).is_err());
        assert!(serde_json::from_str::<BackendConfig>(r#"{"kind": "oracle", "name": "fx"}"#).is_err());
    }

    #[test]
    fn missing_fixture_file_is_io() {
        let c = BackendConfig::Fixture {
            name: "fx".into(),
            path: "nope.json".into(),
        };
        assert!(c.build(Path::new("/nonexistent")).is_err());
    }
}
