use serde::{Deserialize, Serialize};

/// Where a constant comes from, and in which direction it can be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Exact,
    EstimatedLowerBound,
    EstimatedUpperBound,
    UserSupplied,
}

impl Provenance {
    pub fn is_estimate(self) -> bool {
        matches!(self, Self::EstimatedLowerBound | Self::EstimatedUpperBound)
    }
}

/// A scalar constant tagged with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub provenance: Provenance,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            provenance: Provenance::Exact,
        }
    }

    pub fn lower(value: f64) -> Self {
        Self {
            value,
            provenance: Provenance::EstimatedLowerBound,
        }
    }

    pub fn upper(value: f64) -> Self {
        Self {
            value,
            provenance: Provenance::EstimatedUpperBound,
        }
    }

    pub fn user(value: f64) -> Self {
        Self {
            value,
            provenance: Provenance::UserSupplied,
        }
    }
}
