//! Parsing of shape specs, grid specs, and key=value config files.

use specinv_core::models::{self, PotentialShape, WKind};
use specinv_core::{Error, Result};
use std::collections::HashMap;
use std::path::Path;

/// Parse a shape spec: `coulomb`, `power Q`, `log`, `hulthen`,
/// `coulomb_plus {linear|oscillator|log} A B`, or `csv PATH`.
pub fn parse_shape(text: &str) -> Result<PotentialShape> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    match tokens.as_slice() {
        ["coulomb"] => Ok(PotentialShape::coulomb()),
        ["log"] => Ok(PotentialShape::log()),
        ["hulthen"] => Ok(PotentialShape::hulthen()),
        ["power", q] => {
            let q = q.trim_start_matches("q=");
            PotentialShape::power(parse_num(q, "power exponent")?)
        }
        ["coulomb_plus", w, a, b] => {
            let w = match *w {
                "linear" => WKind::Linear,
                "oscillator" | "osc" => WKind::Oscillator,
                "log" => WKind::Log,
                other => {
                    return Err(Error::Parse(format!(
                        "unknown confining term {other:?} (expected linear|oscillator|log)"
                    )))
                }
            };
            PotentialShape::coulomb_plus(
                w,
                parse_num(a, "coulomb_plus a")?,
                parse_num(b, "coulomb_plus b")?,
            )
        }
        ["csv", path] => models::read_shape_csv(Path::new(path), true),
        _ => Err(Error::Parse(format!(
            "cannot parse shape spec {text:?}; expected one of: coulomb | power Q | log | \
             hulthen | coulomb_plus {{linear|oscillator|log}} A B | csv PATH"
        ))),
    }
}

fn parse_num(text: &str, what: &str) -> Result<f64> {
    text.parse()
        .map_err(|_| Error::Parse(format!("bad {what}: {text:?}")))
}

/// A grid spec `min:max:count[:lin|log]` (log-spaced by default).
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub log: bool,
}

impl GridSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() < 3 || parts.len() > 4 {
            return Err(Error::Parse(format!(
                "grid spec {text:?} must be min:max:count[:lin|log]"
            )));
        }
        let min = parse_num(parts[0], "grid min")?;
        let max = parse_num(parts[1], "grid max")?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| Error::Parse(format!("bad grid count: {:?}", parts[2])))?;
        if count < 2 {
            return Err(Error::Parse("grid count must be >= 2".into()));
        }
        if !(min < max) {
            return Err(Error::Parse(format!("grid needs min < max, got {text:?}")));
        }
        let log = match parts.get(3) {
            None => true,
            Some(&"log") => true,
            Some(&"lin") => false,
            Some(other) => {
                return Err(Error::Parse(format!(
                    "grid scale must be lin or log, got {other:?}"
                )))
            }
        };
        Ok(GridSpec {
            min,
            max,
            count,
            log,
        })
    }

    pub fn build(&self) -> Result<Vec<f64>> {
        if self.log {
            specinv_core::grid::log_grid(self.min, self.max, self.count)
        } else {
            specinv_core::grid::linear_grid(self.min, self.max, self.count)
        }
    }
}

/// Read a plain-text `key=value` config file; `#` comments and blank
/// lines are ignored. Flags given on the command line win on conflict.
pub fn read_config_file(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) => {
                map.insert(k.trim().to_string(), v.trim().to_string());
            }
            None => {
                return Err(Error::Parse(format!(
                    "{}:{}: expected key=value, got {line:?}",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    Ok(map)
}

/// Fill an optional CLI field from the config map (CLI flag wins).
pub fn fill<T: Clone>(
    flag: &Option<T>,
    key: &str,
    cfg: &HashMap<String, String>,
    parse: impl Fn(&str) -> Result<T>,
) -> Result<Option<T>> {
    if let Some(v) = flag {
        return Ok(Some(v.clone()));
    }
    match cfg.get(key) {
        Some(text) => Ok(Some(parse(text)?)),
        None => Ok(None),
    }
}

pub fn require<T>(value: Option<T>, key: &str) -> Result<T> {
    value.ok_or_else(|| Error::Parse(format!("missing required option --{key} (or {key}= in the config file)")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_shape_vocabulary() {
        assert!(parse_shape("coulomb").is_ok());
        assert!(parse_shape("power 2").is_ok());
        assert!(parse_shape("power q=-0.5").is_ok());
        assert!(parse_shape("coulomb_plus linear 1 0.5").is_ok());
        assert!(parse_shape("coulomb_plus osc 1 0.5").is_ok());
        assert!(parse_shape("banana").is_err());
        assert!(parse_shape("power").is_err());
        assert!(parse_shape("coulomb_plus linear 1").is_err());
    }

    #[test]
    fn parses_grid_specs() {
        let g = GridSpec::parse("1:20:20").unwrap();
        assert!(g.log);
        assert_eq!(g.count, 20);
        let g2 = GridSpec::parse("0.5:4:8:lin").unwrap();
        assert!(!g2.log);
        assert!(GridSpec::parse("5:1:10").is_err());
        assert!(GridSpec::parse("1:2").is_err());
        assert!(GridSpec::parse("1:2:3:weird").is_err());
    }
}
