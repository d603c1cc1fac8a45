use std::path::{Path, PathBuf};

use serde::Deserialize;
use syriaca_works::linkage::LinkageConfig;
use syriaca_works::NamespaceTable;

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    strict: bool,
    namespaces: Option<PathBuf>,
    linkage: LinkageConfig,
    serve: ServeConfig,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServeConfig {
    pub data: Option<PathBuf>,
    pub review: Option<PathBuf>,
    pub host: Option<String>,
    pub port: Option<u16>,
    pub read_only: bool,
}

/// Configuration file merged with global flags. Relative paths in the file
/// resolve against the file's directory.
#[derive(Debug)]
pub struct Settings {
    pub strict: bool,
    pub ns: NamespaceTable,
    pub linkage: LinkageConfig,
    pub serve: ServeConfig,
}

fn resolve(base: &Path, p: Option<PathBuf>) -> Option<PathBuf> {
    p.map(|p| if p.is_relative() { base.join(p) } else { p })
}

impl Settings {
    pub fn load(config: Option<&Path>, namespaces: Option<&Path>) -> Result<Self, CliError> {
        let file = match config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
                let mut cfg: FileConfig =
                    toml::from_str(&text).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
                let base = path.parent().unwrap_or(Path::new("."));
                cfg.namespaces = resolve(base, cfg.namespaces);
                cfg.serve.data = resolve(base, cfg.serve.data);
                cfg.serve.review = resolve(base, cfg.serve.review);
                cfg
            }
            None => FileConfig::default(),
        };
        file.linkage.validate()?;
        let ns = match namespaces.map(Path::to_path_buf).or(file.namespaces) {
            Some(path) => {
                let text = std::fs::read_to_string(&path).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
                NamespaceTable::from_config_str(&text).map_err(|e| CliError(format!("{}: {e}", path.display())))?
            }
            None => NamespaceTable::default(),
        };
        Ok(Settings { strict: file.strict, ns, linkage: file.linkage, serve: file.serve })
    }
}
