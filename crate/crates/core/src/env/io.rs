//! JSON round-trip of bandit instances.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BanditInstance, EnvError, Representation, Result};

/// Tolerance when checking a stored feature bound against the features.
const BOUND_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepDoc {
    pub id: String,
    pub d: usize,
    /// Row-major over `(context, action, coordinate)`.
    pub features: Vec<f64>,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "B")]
    pub b: f64,
}

/// Serialized form of a [`BanditInstance`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub contexts: usize,
    pub actions: usize,
    pub rho: Vec<f64>,
    pub mu: Vec<Vec<f64>>,
    pub sigma: f64,
    pub reps: Vec<RepDoc>,
    pub star_ids: Vec<String>,
}

impl From<&BanditInstance> for InstanceDoc {
    fn from(inst: &BanditInstance) -> Self {
        Self {
            contexts: inst.n_contexts(),
            actions: inst.n_actions(),
            rho: inst.rho().to_vec(),
            mu: inst.mu_table(),
            sigma: inst.sigma(),
            reps: inst
                .reps()
                .iter()
                .map(|r| RepDoc {
                    id: r.id().to_string(),
                    d: r.dim(),
                    features: r.features().to_vec(),
                    l: r.feature_bound(),
                    b: r.param_bound(),
                })
                .collect(),
            star_ids: inst.star_ids().to_vec(),
        }
    }
}

impl InstanceDoc {
    /// Rebuilds the instance, re-validating every invariant.
    pub fn into_instance(self) -> Result<BanditInstance> {
        if self.rho.len() != self.contexts || self.mu.len() != self.contexts {
            return Err(EnvError::Invalid("context count does not match rho/mu".into()));
        }
        if self.mu.iter().any(|r| r.len() != self.actions) {
            return Err(EnvError::Invalid("action count does not match mu".into()));
        }
        let reps = self
            .reps
            .into_iter()
            .map(|r| {
                let rep = Representation::new(r.id, r.d, self.contexts, self.actions, r.features, r.b)?;
                if (rep.feature_bound() - r.l).abs() > BOUND_TOL * r.l.abs().max(1.0) {
                    return Err(EnvError::Invalid(format!(
                        "{}: stored L = {} but features give {}",
                        rep.id(),
                        r.l,
                        rep.feature_bound()
                    )));
                }
                Ok(rep)
            })
            .collect::<Result<Vec<_>>>()?;
        BanditInstance::new(self.rho, self.mu, self.sigma, reps, self.star_ids)
    }
}

impl BanditInstance {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&InstanceDoc::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<InstanceDoc>(text)?.into_instance()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
