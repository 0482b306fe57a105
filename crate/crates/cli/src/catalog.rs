use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use abtqft_core::numeric::PolarValue;
use abtqft_core::surgery::SurgeryPresentation;
use serde::{Deserialize, Serialize};

use crate::CliError;

const EMBEDDED: &str = include_str!("../catalog.json");

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Expected {
    Values(BTreeMap<String, PolarValue>),
    Tag(ExpectedTag),
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub enum ExpectedTag {
    #[serde(rename = "derived-at-build")]
    DerivedAtBuild,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub presentation: SurgeryPresentation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Expected>,
}

impl CatalogEntry {
    pub fn expected_at(&self, k: u64) -> Option<&PolarValue> {
        match &self.expected {
            Some(Expected::Values(map)) => map.get(&k.to_string()),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let catalog: Catalog =
            serde_json::from_str(text).map_err(|e| CliError::Parse(format!("catalog: {e}")))?;
        let mut names = HashSet::new();
        for e in &catalog.entries {
            if !names.insert(e.name.as_str()) {
                return Err(CliError::Parse(format!(
                    "duplicate catalog name {:?}",
                    e.name
                )));
            }
            if let Some(Expected::Values(map)) = &e.expected {
                if let Some(bad) = map.keys().find(|key| key.parse::<u64>().is_err()) {
                    return Err(CliError::Parse(format!(
                        "{}: level {bad:?} is not an integer",
                        e.name
                    )));
                }
            }
        }
        Ok(catalog)
    }

    pub fn embedded() -> Self {
        Catalog::parse(EMBEDDED).expect("embedded catalog is valid")
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Catalog::embedded()),
            Some(p) => Catalog::parse(&crate::read_file(p)?),
        }
    }

    pub fn get(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_catalog_loads() {
        let c = Catalog::embedded();
        for name in ["S3", "S3_minus", "S1xS2", "L2_1", "L3_1", "E8"] {
            assert!(c.get(name).is_some(), "{name}");
        }
        assert_eq!(c.get("E8").unwrap().presentation.components(), 8);
        assert!(c.get("S3").unwrap().expected_at(4).is_some());
        assert!(c.get("L4_1").unwrap().expected_at(2).is_none());
    }

    #[test]
    fn duplicate_names_rejected() {
        let text = r#"{"entries":[{"name":"a","presentation":{"L":[[1]]}},{"name":"a","presentation":{"L":[[0]]}}]}"#;
        assert!(Catalog::parse(text).is_err());
        let bad = r#"{"entries":[{"name":"a","presentation":{"L":[[1,2],[3,4]]}}]}"#;
        assert!(Catalog::parse(bad).is_err());
    }
}
