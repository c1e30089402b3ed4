//! Named degree distributions shipped with the crate.

use std::collections::BTreeMap;

use crate::codes::DegreeDistribution;
use crate::error::{Error, Result};

const BUILTIN: &str = include_str!("../../presets/degree_distributions.toml");

/// Parses a table of named distributions.
pub fn parse_presets(text: &str) -> Result<BTreeMap<String, DegreeDistribution>> {
    let mut table: BTreeMap<String, DegreeDistribution> =
        toml::from_str(text).map_err(|e| Error::Config(format!("degree distribution table: {e}")))?;
    for (name, dd) in table.iter_mut() {
        dd.name = name.clone();
        dd.validate()
            .map_err(|e| Error::Config(format!("degree distribution {name:?}: {e}")))?;
    }
    Ok(table)
}

pub fn builtin() -> BTreeMap<String, DegreeDistribution> {
    parse_presets(BUILTIN).expect("builtin presets are valid")
}

pub fn lookup(name: &str) -> Result<DegreeDistribution> {
    builtin()
        .remove(name)
        .ok_or_else(|| Error::Config(format!("unknown degree distribution {name:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_presets_parse() {
        let all = builtin();
        assert!(!all.is_empty());
        assert!(lookup("regular-3").is_ok());
        assert!(lookup("nope").is_err());
    }
}
