//! Plain-text `key = value` form of a system.
//!
//! ```text
//! kind = cocycle
//! base.kind = rotation
//! base.alpha = 6.1803398874989490e-1
//! cocycle.linear = 1
//! cocycle.offset = 0.0000000000000000e0
//! seed = 42
//! ```
//!
//! Reals are written with 17 significant digits so the text round-trips
//! bit-exactly. Vectors are comma-separated; matrices use `;` between rows.

use super::{AffineCocycle, DynamicalSystem, SystemKind};
use crate::error::{Error, Result};
use crate::intmat::IntMatrix;
use std::collections::BTreeMap;

/// A system plus the seed of the experiment that uses it.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    pub system: DynamicalSystem,
    pub seed: Option<u64>,
}

/// 17 significant digits: enough for exact `f64` round-trips.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn format_reals(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| format_real(*x))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn parse_real(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("real {s:?}: {e}")))?;
    if !v.is_finite() {
        return Err(Error::NonFinite(v));
    }
    Ok(v)
}

pub fn parse_reals(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_real).collect()
}

impl DynamicalSystem {
    /// Key/value pairs, keys prefixed by `prefix`.
    pub fn to_pairs(&self, prefix: &str) -> Vec<(String, String)> {
        let key = |k: &str| format!("{prefix}{k}");
        let mut out = vec![(key("kind"), self.kind_name().to_string())];
        match self.kind() {
            SystemKind::Rotation { alpha } => out.push((key("alpha"), format_reals(alpha))),
            SystemKind::ToralAutomorphism { matrix } => {
                out.push((key("matrix"), matrix.to_string()))
            }
            SystemKind::HeisenbergTranslation { alpha, beta } => {
                out.push((key("alpha"), format_real(*alpha)));
                out.push((key("beta"), format_real(*beta)));
            }
            SystemKind::CocycleExtension { base, cocycle } => {
                out.extend(base.to_pairs(&key("base.")));
                out.push((key("cocycle.linear"), cocycle.linear.to_string()));
                out.push((key("cocycle.offset"), format_reals(&cocycle.offset)));
            }
        }
        out
    }

    pub fn from_pairs(pairs: &BTreeMap<String, String>, prefix: &str) -> Result<Self> {
        let get = |k: &str| {
            pairs
                .get(&format!("{prefix}{k}"))
                .map(String::as_str)
                .ok_or_else(|| Error::Parse(format!("missing key {prefix}{k}")))
        };
        match get("kind")?.trim() {
            "rotation" => DynamicalSystem::rotation(parse_reals(get("alpha")?)?),
            "automorphism" => DynamicalSystem::automorphism(get("matrix")?.parse()?),
            "heisenberg" => {
                DynamicalSystem::heisenberg(parse_real(get("alpha")?)?, parse_real(get("beta")?)?)
            }
            "cocycle" => {
                let base = DynamicalSystem::from_pairs(pairs, &format!("{prefix}base."))?;
                let linear: IntMatrix = get("cocycle.linear")?.parse()?;
                let offset = parse_reals(get("cocycle.offset")?)?;
                DynamicalSystem::cocycle_extension(base, AffineCocycle { linear, offset })
            }
            other => Err(Error::Parse(format!("unknown system kind {other:?}"))),
        }
    }
}

/// Splits `key = value` lines; `#` starts a comment.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
        let k = k.trim().to_string();
        if map.insert(k.clone(), v.trim().to_string()).is_some() {
            return Err(Error::Parse(format!(
                "line {}: duplicate key {k}",
                lineno + 1
            )));
        }
    }
    Ok(map)
}

impl SystemSpec {
    pub fn new(system: DynamicalSystem) -> Self {
        Self { system, seed: None }
    }

    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let mut pairs = self.system.to_pairs("");
        if let Some(seed) = self.seed {
            pairs.push(("seed".into(), seed.to_string()));
        }
        pairs
    }

    pub fn to_text(&self) -> String {
        self.to_pairs()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let system = DynamicalSystem::from_pairs(map, "")?;
        let seed = map
            .get("seed")
            .map(|s| {
                s.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::Parse(format!("seed {s:?}: {e}")))
            })
            .transpose()?;
        Ok(Self { system, seed })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_map(&parse_key_values(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::golden;

    #[test]
    fn round_trip_all_kinds() {
        let systems = [
            DynamicalSystem::rotation(vec![golden(), 0.1]).unwrap(),
            DynamicalSystem::cat_map(),
            DynamicalSystem::skew_product(golden()),
            DynamicalSystem::default_heisenberg(),
            DynamicalSystem::cocycle_extension(
                DynamicalSystem::skew_product(0.3),
                AffineCocycle {
                    linear: "0,1".parse().unwrap(),
                    offset: vec![1.0 / 3.0],
                },
            )
            .unwrap(),
        ];
        for s in systems {
            let spec = SystemSpec {
                system: s,
                seed: Some(17),
            };
            let text = spec.to_text();
            assert_eq!(SystemSpec::parse(&text).unwrap(), spec, "{text}");
        }
    }

    #[test]
    fn reals_carry_seventeen_digits() {
        let s = format_real(golden());
        let digits = s
            .split('e')
            .next()
            .unwrap()
            .chars()
            .filter(char::is_ascii_digit)
            .count();
        assert_eq!(digits, 17);
        assert_eq!(parse_real(&s).unwrap().to_bits(), golden().to_bits());
    }

    #[test]
    fn unknown_kind() {
        assert!(SystemSpec::parse("kind = odometer").is_err());
        assert!(SystemSpec::parse("kind = rotation").is_err());
    }
}
