//! Per-instance oracle comparison records and their CSV form.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Equal,
    WithinFactor,
    WithinBracket,
    Mismatch,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Relation::Equal => "equal",
            Relation::WithinFactor => "within-factor",
            Relation::WithinBracket => "within-bracket",
            Relation::Mismatch => "mismatch",
        };
        f.write_str(s)
    }
}

/// One oracle-vs-tested comparison.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub instance: String,
    pub oracle: f64,
    pub tested: f64,
    pub relation: Relation,
    pub elapsed_ms: f64,
}

impl OracleReport {
    pub fn exact(instance: impl Into<String>, oracle: u64, tested: u64, elapsed_ms: f64) -> Self {
        OracleReport {
            instance: instance.into(),
            oracle: oracle as f64,
            tested: tested as f64,
            relation: if oracle == tested {
                Relation::Equal
            } else {
                Relation::Mismatch
            },
            elapsed_ms,
        }
    }

    /// Tested value must lie in `[oracle, factor * oracle]`.
    pub fn within_factor(
        instance: impl Into<String>,
        oracle: u64,
        tested: u64,
        factor: f64,
        elapsed_ms: f64,
    ) -> Self {
        let ok = tested >= oracle && (tested as f64) <= factor * oracle as f64 + 1e-9;
        OracleReport {
            instance: instance.into(),
            oracle: oracle as f64,
            tested: tested as f64,
            relation: if ok {
                Relation::WithinFactor
            } else {
                Relation::Mismatch
            },
            elapsed_ms,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.relation != Relation::Mismatch
    }

    pub fn csv_header() -> &'static str {
        "instance,oracle,tested,relation,elapsed_ms"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.3}",
            self.instance, self.oracle, self.tested, self.relation, self.elapsed_ms
        )
    }
}
