use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::scalar::{self, Scalar};
use crate::Result;

/// Environment variable overriding every enumeration cap.
pub const CAP_ENV: &str = "INVFORGE_CAP";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Decision {
    Yes,
    No,
}

impl Decision {
    pub fn from_bool(yes: bool) -> Self {
        if yes {
            Decision::Yes
        } else {
            Decision::No
        }
    }

    pub fn is_yes(self) -> bool {
        self == Decision::Yes
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    Exhaustive,
    PatternEnumeration,
    /// A NO from this certificate proves nothing.
    FalsifierOnly,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub latents: u64,
    pub patterns: u64,
    pub lp_pivots: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub decision: Decision,
    #[serde(with = "scalar::serde_str::option_vec", default)]
    pub witness: Option<Vec<Scalar>>,
    pub certificate: Certificate,
    pub stats: Stats,
    /// Smallest `dist^p` (or source objective) seen, when the oracle tracks it.
    #[serde(
        with = "scalar::serde_str::option",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub best: Option<Scalar>,
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        self.decision.is_yes()
    }

    /// Witness coordinates read as bits (nonzero is `true`), for the source
    /// oracles whose witnesses are `0/1` vectors.
    pub fn witness_bits(&self) -> Option<Vec<bool>> {
        self.witness
            .as_ref()
            .map(|w| w.iter().map(|v| !v.is_zero()).collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdicts always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Enumeration limits and the parallelism switch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub sat_cap: usize,
    pub cvp_cap: usize,
    pub graph_cap: usize,
    pub binary_cap: usize,
    pub pattern_cap: usize,
    pub parallel: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            sat_cap: 24,
            cvp_cap: 24,
            graph_cap: 16,
            binary_cap: 24,
            pattern_cap: 18,
            parallel: true,
        }
    }
}

impl OracleConfig {
    pub fn with_cap(cap: usize) -> Self {
        OracleConfig {
            sat_cap: cap,
            cvp_cap: cap,
            graph_cap: cap,
            binary_cap: cap,
            pattern_cap: cap,
            ..Default::default()
        }
    }

    /// Defaults, with every cap replaced by `INVFORGE_CAP` when it is set to
    /// a valid integer.
    pub fn from_env() -> Self {
        match std::env::var(CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
        {
            Some(cap) => OracleConfig::with_cap(cap),
            None => OracleConfig::default(),
        }
    }

    pub fn sequential(mut self) -> Self {
        self.parallel = false;
        self
    }
}
