use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mwum::Variant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    #[default]
    Exact,
    Qmf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub strategy: StrategyKind,
    /// Per-run QMF failure probability; defaults to `1 / (2 K_planned)`.
    pub fail_prob: Option<f64>,
    /// Oracle precision; defaults to `1 / (2|A|)`.
    pub delta: Option<f64>,
    pub rho: Option<i64>,
    pub seed: u64,
    pub escalation_limit: u32,
    pub rounds_override: Option<usize>,
    pub variant: Variant,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            strategy: StrategyKind::Exact,
            fail_prob: None,
            delta: None,
            rho: None,
            seed: 0,
            escalation_limit: 3,
            rounds_override: None,
            variant: Variant::Approximate,
        }
    }
}

impl SolveConfig {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn qmf(seed: u64) -> Self {
        SolveConfig {
            strategy: StrategyKind::Qmf,
            seed,
            ..Self::default()
        }
    }

    /// δ for an instance with `num_actions` actions.
    pub fn resolve_delta(&self, num_actions: usize) -> Result<f64> {
        let delta = self.delta.unwrap_or(1.0 / (2.0 * num_actions as f64));
        if !(delta > 0.0 && delta <= 0.5) {
            return Err(Error::InvalidParameter(format!(
                "delta {delta} outside (0, 1/2]"
            )));
        }
        Ok(delta)
    }

    pub(crate) fn check(&self) -> Result<()> {
        if let Some(p) = self.fail_prob {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "failure probability {p} outside (0, 1)"
                )));
            }
        }
        if self.rounds_override == Some(0) {
            return Err(Error::InvalidParameter(
                "rounds override must be positive".into(),
            ));
        }
        Ok(())
    }
}
