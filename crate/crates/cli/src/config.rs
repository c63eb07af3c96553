//! Option resolution: command line, then config file, then defaults.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::report::RunManifest;
use crate::{CliError, CliResult};

pub const SEED_ENV: &str = "SPECTRAFORGE_SEED";

pub struct Resolver {
    command: &'static str,
    file: BTreeMap<String, Value>,
    file_seed: Option<u64>,
    config: BTreeMap<String, Value>,
    input_hashes: BTreeMap<String, String>,
}

impl Resolver {
    pub fn new(command: &'static str, config: Option<&Path>) -> CliResult<Self> {
        let mut r = Self {
            command,
            file: BTreeMap::new(),
            file_seed: None,
            config: BTreeMap::new(),
            input_hashes: BTreeMap::new(),
        };
        if let Some(path) = config {
            r.load(path)?;
        }
        Ok(r)
    }

    fn load(&mut self, path: &Path) -> CliResult<()> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let bad = |e: String| CliError::Usage(format!("config {}: {e}", path.display()));
        let root: Value = if text.trim_start().starts_with('{') {
            serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?
        } else {
            let table: toml::Table = toml::from_str(&text).map_err(|e| bad(e.to_string()))?;
            serde_json::to_value(table).map_err(|e| bad(e.to_string()))?
        };
        let Value::Object(mut map) = root else {
            return Err(bad("expected a table of options".into()));
        };
        // JSON reports embed their manifest under `manifest`.
        if let Some(Value::Object(inner)) = map.get("manifest").cloned() {
            map = inner;
        }
        // A manifest carries its options under `config` and the seed on top.
        if let Some(Value::Object(inner)) = map.get("config").cloned() {
            if let Some(cmd) = map.get("command").and_then(Value::as_str) {
                if cmd != self.command {
                    return Err(bad(format!("manifest is for `{cmd}`, not `{}`", self.command)));
                }
            }
            self.file_seed = map.get("seed").and_then(Value::as_u64);
            map = inner;
        } else if let Some(seed) = map.remove("seed") {
            self.file_seed = Some(
                seed.as_u64()
                    .ok_or_else(|| bad("seed must be a nonnegative integer".into()))?,
            );
        }
        self.file = map.into_iter().map(|(k, v)| (k.replace('_', "-"), v)).collect();
        Ok(())
    }

    fn lookup<T: DeserializeOwned + Serialize>(&mut self, key: &str, cli: Option<T>) -> CliResult<Option<T>> {
        let from_file = self.file.remove(key);
        let value = match (cli, from_file) {
            (Some(v), _) => Some(v),
            (None, Some(v)) => Some(serde_json::from_value(v).map_err(|e| {
                CliError::Usage(format!("config value for `{key}`: {e}"))
            })?),
            (None, None) => None,
        };
        Ok(value)
    }

    fn record<T: Serialize>(&mut self, key: &str, v: &T) {
        let json = serde_json::to_value(v).unwrap_or(Value::Null);
        self.config.insert(key.to_string(), json);
    }

    pub fn get<T: DeserializeOwned + Serialize>(&mut self, key: &str, cli: Option<T>, default: T) -> CliResult<T> {
        let v = self.lookup(key, cli)?.unwrap_or(default);
        self.record(key, &v);
        Ok(v)
    }

    pub fn optional<T: DeserializeOwned + Serialize>(&mut self, key: &str, cli: Option<T>) -> CliResult<Option<T>> {
        let v = self.lookup(key, cli)?;
        if let Some(v) = &v {
            self.record(key, v);
        }
        Ok(v)
    }

    pub fn required<T: DeserializeOwned + Serialize>(&mut self, key: &str, cli: Option<T>) -> CliResult<T> {
        self.optional(key, cli)?
            .ok_or_else(|| CliError::Usage(format!("missing required option --{key}")))
    }

    /// A required input file; its digest goes into the manifest.
    pub fn input(&mut self, key: &str, cli: Option<String>) -> CliResult<String> {
        let path = self.required(key, cli)?;
        self.hash_input(key, &path)?;
        Ok(path)
    }

    fn hash_input(&mut self, key: &str, path: &str) -> CliResult<()> {
        let bytes = fs::read(path).map_err(|e| CliError::Usage(format!("missing file {path}: {e}")))?;
        self.input_hashes
            .insert(key.to_string(), hex::encode(Sha256::digest(&bytes)));
        Ok(())
    }

    /// Environment, then command line, then config file, then 0.
    pub fn seed(&mut self, cli: Option<u64>) -> CliResult<u64> {
        if let Ok(raw) = std::env::var(SEED_ENV) {
            return raw
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{SEED_ENV}={raw:?} is not a seed")));
        }
        Ok(cli.or(self.file_seed).unwrap_or(0))
    }

    /// Rejects leftover config keys and builds the manifest.
    pub fn finish(self, seed: u64) -> CliResult<RunManifest> {
        if let Some(key) = self.file.keys().next() {
            return Err(CliError::Usage(format!(
                "unknown option `{key}` in config for `{}`",
                self.command
            )));
        }
        Ok(RunManifest {
            command: self.command.to_string(),
            config: self.config,
            input_hashes: self.input_hashes,
            seed,
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
        })
    }
}
