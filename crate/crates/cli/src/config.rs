use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use rtmix_core::FluidSetup;

use crate::CommonArgs;

const KEYS: [&str; 13] =
    ["rho-minus", "rho-plus", "g", "n", "t", "epsilon", "seed", "out", "grid", "e", "random", "suites", "N"];

/// Validated settings for one command.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub setup: FluidSetup,
    /// Requested times; empty means the command's default.
    pub times: Vec<f64>,
    pub epsilon: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub grid: Option<usize>,
    /// Extra keys from the config file, for command-specific options.
    pub extra: HashMap<String, String>,
}

/// Parses `key = value` lines; `#` starts a comment, underscores in keys
/// are read as dashes.
pub fn parse_config_file(text: &str) -> Result<HashMap<String, String>> {
    let mut map = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("config line {}: expected key = value", i + 1))?;
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            bail!("config line {}: unknown key '{}'", i + 1, k.trim());
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

fn pick<T: FromStr>(flag: Option<T>, file: &HashMap<String, String>, key: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    if flag.is_some() {
        return Ok(flag);
    }
    file.get(key)
        .map(|v| v.parse::<T>().map_err(|e| anyhow!("config key '{key}': {e}")))
        .transpose()
}

pub fn parse_list<T: FromStr>(text: &str, what: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| anyhow!("{what} '{s}': {e}")))
        .collect()
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => load(path)?,
            None => HashMap::new(),
        };
        let rho_minus = pick(args.rho_minus, &file, "rho-minus")?.unwrap_or(0.25);
        let rho_plus = pick(args.rho_plus, &file, "rho-plus")?.unwrap_or(4.0);
        let g = pick(args.g, &file, "g")?.unwrap_or(1.0);
        let n = pick(args.n, &file, "n")?.unwrap_or(2);
        let setup = FluidSetup::new(rho_minus, rho_plus, g, n)?;
        let times = match pick(args.t.clone(), &file, "t")? {
            Some(s) => parse_list::<f64>(&s, "time")?,
            None => Vec::new(),
        };
        if let Some(t) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            bail!("time {t} must be finite and nonnegative");
        }
        let epsilon = pick(args.epsilon, &file, "epsilon")?.unwrap_or(0.0);
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            bail!("epsilon {epsilon} must be finite and nonnegative");
        }
        let grid = pick(args.grid, &file, "grid")?;
        if grid.is_some_and(|g| g < 2) {
            bail!("grid must be at least 2");
        }
        Ok(Self {
            setup,
            times,
            epsilon,
            seed: pick(args.seed, &file, "seed")?.unwrap_or(7),
            out: pick(args.out.clone(), &file, "out")?,
            grid,
            extra: file,
        })
    }
}

fn load(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse_config_file(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_roundtrip() {
        let m = parse_config_file("# setup\nrho_minus = 0.5\nrho-plus=9 # heavy\n\nt = 0.5, 1.0\n").unwrap();
        assert_eq!(m["rho-minus"], "0.5");
        assert_eq!(m["rho-plus"], "9");
        assert_eq!(m["t"], "0.5, 1.0");
    }

    #[test]
    fn unknown_key_is_rejected() {
        assert!(parse_config_file("density = 3").is_err());
        assert!(parse_config_file("just text").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = parse_config_file("g = 2").unwrap();
        assert_eq!(pick(Some(3.0), &file, "g").unwrap(), Some(3.0));
        assert_eq!(pick(None::<f64>, &file, "g").unwrap(), Some(2.0));
    }
}
