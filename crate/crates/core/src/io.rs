//! The JSON space file:
//!
//! ```json
//! {"labels": ["a", "b"], "dist": [["0", "1/2"], ["1/2", "0"]], "map": [1, 1]}
//! ```
//!
//! Distances are exact rationals written as `"p/q"` or `"p"`. `map` may be
//! omitted for commands that only look at the metric. An optional `domain`
//! lists the points tuples are drawn from when certifying.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, SelfMap};
use crate::scalar::{format_rational, parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDocument {
    pub labels: Vec<String>,
    pub dist: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<usize>>,
}

/// Parsed but not yet validated contents of a space file.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSpace {
    pub labels: Vec<String>,
    pub dist: Vec<Vec<Rational>>,
    pub map: Option<Vec<usize>>,
    pub domain: Option<Vec<usize>>,
}

impl RawSpace {
    pub fn parse(text: &str) -> Result<Self> {
        let doc: SpaceDocument =
            serde_json::from_str(text).map_err(|e| Error::SpaceFile(e.to_string()))?;
        doc.try_into()
    }

    /// Validates the metric and, if present, the map.
    pub fn into_space(self) -> Result<(FiniteMetricSpace<Rational>, Option<SelfMap>, Option<Vec<usize>>)> {
        let space = FiniteMetricSpace::new(self.labels, self.dist)?;
        let map = self.map.map(|m| SelfMap::for_space(m, &space)).transpose()?;
        if let Some(domain) = &self.domain {
            for &p in domain {
                space.check_index(p)?;
            }
        }
        Ok((space, map, self.domain))
    }
}

impl TryFrom<SpaceDocument> for RawSpace {
    type Error = Error;

    fn try_from(doc: SpaceDocument) -> Result<Self> {
        let dist = doc
            .dist
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, entry)| {
                        parse_rational(entry).map_err(|_| {
                            Error::SpaceFile(format!(
                                "dist[{i}][{j}] = {entry:?} is not a rational \"p/q\" or \"p\""
                            ))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if doc.labels.len() != dist.len() {
            return Err(Error::SpaceFile(format!(
                "{} labels for a {}-row distance matrix",
                doc.labels.len(),
                dist.len()
            )));
        }
        Ok(Self {
            labels: doc.labels,
            dist,
            map: doc.map,
            domain: doc.domain,
        })
    }
}

impl SpaceDocument {
    pub fn from_space(space: &FiniteMetricSpace<Rational>, map: Option<&SelfMap>, domain: Option<&[usize]>) -> Self {
        Self {
            labels: space.labels().to_vec(),
            dist: space
                .matrix()
                .iter()
                .map(|row| row.iter().map(format_rational).collect())
                .collect(),
            map: map.map(|m| m.image().to_vec()),
            domain: domain.map(<[usize]>::to_vec),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("space documents always serialize")
    }
}
