use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sequence of vertex-type names `c_1 -> c_2 -> ... -> c_l` with `l >= 2`.
///
/// Written as bare concatenation when every name is one character (`APA`)
/// and dash-separated otherwise (`Author-Paper-Author`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Metapath {
    types: Vec<String>,
}

impl Metapath {
    pub fn new<S: Into<String>>(types: impl IntoIterator<Item = S>) -> Result<Self> {
        let types: Vec<String> = types.into_iter().map(Into::into).collect();
        if types.len() < 2 {
            return Err(Error::InvalidMetapath {
                path: types.join("-"),
                reason: "needs at least two vertex types".into(),
            });
        }
        if let Some(bad) = types.iter().find(|t| t.is_empty() || t.contains('-')) {
            return Err(Error::InvalidMetapath {
                path: types.join("-"),
                reason: format!("bad vertex type name `{bad}`"),
            });
        }
        Ok(Metapath { types })
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains('-') {
            Metapath::new(s.split('-').map(str::trim))
        } else {
            Metapath::new(s.chars().map(String::from))
        }
        .map_err(|e| match e {
            Error::InvalidMetapath { reason, .. } => Error::InvalidMetapath {
                path: s.to_string(),
                reason,
            },
            e => e,
        })
    }

    pub fn types(&self) -> &[String] {
        &self.types
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn hops(&self) -> usize {
        self.types.len() - 1
    }

    pub fn first(&self) -> &str {
        &self.types[0]
    }

    pub fn last(&self) -> &str {
        &self.types[self.types.len() - 1]
    }

    /// Sub-path spanning type positions `start..=end`.
    pub fn slice(&self, start: usize, end: usize) -> Result<Metapath> {
        Metapath::new(self.types[start..=end].iter().cloned())
    }

    /// Junction-overlapped concatenation: `APS` + `SP` = `APSP`.
    pub fn join(&self, next: &Metapath) -> Result<Metapath> {
        if self.last() != next.first() {
            return Err(Error::TypeMismatch {
                left: self.to_string(),
                left_end: self.last().to_string(),
                right: next.to_string(),
                right_start: next.first().to_string(),
            });
        }
        let mut types = self.types.clone();
        types.extend(next.types[1..].iter().cloned());
        Ok(Metapath { types })
    }
}

impl fmt::Display for Metapath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.types.iter().all(|t| t.chars().count() == 1) {
            for t in &self.types {
                f.write_str(t)?;
            }
            Ok(())
        } else {
            f.write_str(&self.types.join("-"))
        }
    }
}

impl FromStr for Metapath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metapath::parse(s)
    }
}

impl TryFrom<String> for Metapath {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        Metapath::parse(&s)
    }
}

impl From<Metapath> for String {
    fn from(p: Metapath) -> String {
        p.to_string()
    }
}
