//! Effective configuration: defaults, then the config file, then the
//! environment, then explicit flags, each layer overriding the last.

use std::path::Path;

use clap::ValueEnum;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    /// Graphviz output; only the diagram command supports it.
    Dot,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Text => "text",
            OutputFormat::Json => "json",
            OutputFormat::Dot => "dot",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub search_bound: u32,
    pub degree_cap: usize,
    pub format: OutputFormat,
    pub seed: Option<u64>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            search_bound: eqdd_core::locring::DEFAULT_SEARCH_BOUND,
            degree_cap: 32,
            format: OutputFormat::Text,
            seed: None,
        }
    }
}

pub struct Overrides {
    pub config: Option<std::path::PathBuf>,
    pub search_bound: Option<u32>,
    pub degree_cap: Option<usize>,
    pub format: Option<OutputFormat>,
    pub seed: Option<u64>,
}

impl Settings {
    pub fn resolve(overrides: &Overrides) -> Result<Settings, CliError> {
        let mut s = Settings::default();
        if let Some(path) = &overrides.config {
            s.apply_file(path)?;
        }
        if let Ok(raw) = std::env::var("EQDD_SEARCH_BOUND") {
            s.search_bound = raw.trim().parse().map_err(|_| {
                CliError::usage(format!(
                    "EQDD_SEARCH_BOUND must be a positive integer, got {raw:?}"
                ))
            })?;
        }
        if let Some(v) = overrides.search_bound {
            s.search_bound = v;
        }
        if let Some(v) = overrides.degree_cap {
            s.degree_cap = v;
        }
        if let Some(v) = overrides.format {
            s.format = v;
        }
        if let Some(v) = overrides.seed {
            s.seed = Some(v);
        }
        if s.search_bound == 0 {
            return Err(CliError::usage("search bound must be positive"));
        }
        if s.degree_cap == 0 {
            return Err(CliError::usage("degree cap must be positive"));
        }
        Ok(s)
    }

    /// `key = value` lines; `#` starts a comment.
    fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad =
                |msg: String| CliError::usage(format!("{}:{}: {msg}", path.display(), lineno + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad("expected key = value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "search_bound" => {
                    self.search_bound = value
                        .parse()
                        .map_err(|_| bad(format!("invalid search_bound {value:?}")))?;
                }
                "degree_cap" => {
                    self.degree_cap = value
                        .parse()
                        .map_err(|_| bad(format!("invalid degree_cap {value:?}")))?;
                }
                "format" => {
                    self.format = match value {
                        "text" => OutputFormat::Text,
                        "json" => OutputFormat::Json,
                        other => {
                            return Err(bad(format!("format must be text or json, got {other:?}")))
                        }
                    };
                }
                "seed" => {
                    self.seed = Some(
                        value
                            .parse()
                            .map_err(|_| bad(format!("invalid seed {value:?}")))?,
                    );
                }
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        Ok(())
    }

    pub fn echo(&self) -> serde_json::Value {
        serde_json::json!({
            "search_bound": self.search_bound,
            "degree_cap": self.degree_cap,
            "format": self.format.name(),
            "seed": self.seed,
        })
    }
}
