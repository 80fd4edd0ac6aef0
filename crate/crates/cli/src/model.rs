//! The JSON model file: system matrices, optional candidate generating
//! matrices, thresholds, a switching automaton, and a simulation block.
//! Epsilon entries are spelled as the string `-inf`; everything else is a
//! plain number. See `docs/schema/model.schema.json`.

use std::collections::HashSet;

use anyhow::{bail, Context, Result};
use maxplus::{MpMatrix, MpVector, SmplSystem, SwitchingAutomaton};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub dimension: usize,
    pub modes: Vec<NamedMatrix>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub candidate_q: Vec<NamedMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub switching_automaton: Option<AutomatonSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedMatrix {
    pub name: String,
    pub matrix: MpMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonSpec {
    pub states: Vec<String>,
    /// Empty means every state may start a run.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub initial: Vec<String>,
    pub transitions: Vec<TransitionSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionSpec {
    pub from: String,
    pub mode: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    pub x0: Vec<f64>,
    pub length: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub policy: PolicySpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PolicySpec {
    Random,
    Periodic { sequence: Vec<String> },
    Automaton,
}

impl ModelFile {
    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read model file {}", path.display()))?;
        let model: ModelFile = serde_json::from_str(&text)
            .with_context(|| format!("cannot parse model file {}", path.display()))?;
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes.is_empty() {
            bail!("model declares no modes");
        }
        let mut names = HashSet::new();
        for m in &self.modes {
            if !names.insert(m.name.as_str()) {
                bail!("duplicate mode name '{}'", m.name);
            }
            if m.matrix.rows() != self.dimension || m.matrix.cols() != self.dimension {
                bail!(
                    "mode '{}' is {}x{}, expected {dim}x{dim}",
                    m.name,
                    m.matrix.rows(),
                    m.matrix.cols(),
                    dim = self.dimension
                );
            }
        }
        let mut qnames = HashSet::new();
        for q in &self.candidate_q {
            if !qnames.insert(q.name.as_str()) {
                bail!("duplicate candidate name '{}'", q.name);
            }
            if q.matrix.rows() != self.dimension || q.matrix.cols() != self.dimension {
                bail!("candidate '{}' does not match the model dimension", q.name);
            }
        }
        if let Some(aut) = &self.switching_automaton {
            let states: HashSet<&str> = aut.states.iter().map(String::as_str).collect();
            if states.len() != aut.states.len() {
                bail!("duplicate automaton state names");
            }
            for q in &aut.initial {
                if !states.contains(q.as_str()) {
                    bail!("initial state '{q}' is not declared");
                }
            }
            for t in &aut.transitions {
                if !states.contains(t.from.as_str()) || !states.contains(t.to.as_str()) {
                    bail!("transition {}-{}->{} references an unknown state", t.from, t.mode, t.to);
                }
                if self.mode_index(&t.mode).is_none() {
                    bail!("transition label '{}' is not a declared mode", t.mode);
                }
            }
        }
        if let Some(sim) = &self.simulation {
            if sim.x0.len() != self.dimension {
                bail!("simulation x0 has length {}, expected {}", sim.x0.len(), self.dimension);
            }
            if let PolicySpec::Periodic { sequence } = &sim.policy {
                if sequence.is_empty() {
                    bail!("periodic policy needs a non-empty sequence");
                }
                for name in sequence {
                    if self.mode_index(name).is_none() {
                        bail!("periodic sequence entry '{name}' is not a declared mode");
                    }
                }
            }
            if matches!(sim.policy, PolicySpec::Automaton) && self.switching_automaton.is_none() {
                bail!("automaton policy requires a switching_automaton block");
            }
        }
        Ok(())
    }

    /// 1-based mode index for a mode name.
    pub fn mode_index(&self, name: &str) -> Option<usize> {
        self.modes.iter().position(|m| m.name == name).map(|i| i + 1)
    }

    pub fn system(&self) -> Result<SmplSystem> {
        SmplSystem::new(self.modes.iter().map(|m| m.matrix.clone()).collect())
            .context("invalid mode matrices")
    }

    /// Candidate matrix by name, falling back to the first candidate and
    /// then to the ⊕-sum of the modes.
    pub fn candidate(&self, target: Option<&str>) -> Result<(String, MpMatrix)> {
        match target {
            Some(name) => {
                if let Some(q) = self.candidate_q.iter().find(|q| q.name == name) {
                    Ok((q.name.clone(), q.matrix.clone()))
                } else if let Some(m) = self.modes.iter().find(|m| m.name == name) {
                    Ok((m.name.clone(), m.matrix.clone()))
                } else {
                    bail!("no mode or candidate named '{name}'")
                }
            }
            None => match self.candidate_q.first() {
                Some(q) => Ok((q.name.clone(), q.matrix.clone())),
                None => Ok(("oplus(modes)".to_string(), self.system()?.mode_sum())),
            },
        }
    }

    pub fn automaton(&self) -> Result<Option<SwitchingAutomaton>> {
        let Some(spec) = &self.switching_automaton else {
            return Ok(None);
        };
        let index_of = |name: &str| spec.states.iter().position(|s| s == name).unwrap();
        let initial: Vec<usize> = spec.initial.iter().map(|s| index_of(s)).collect();
        let transitions: Vec<(usize, usize, usize)> = spec
            .transitions
            .iter()
            .map(|t| (index_of(&t.from), self.mode_index(&t.mode).unwrap(), index_of(&t.to)))
            .collect();
        Ok(Some(SwitchingAutomaton::new(
            spec.states.clone(),
            initial,
            &transitions,
            self.modes.len(),
        )?))
    }

    pub fn x0(&self) -> Result<Option<MpVector>> {
        match &self.simulation {
            None => Ok(None),
            Some(sim) => Ok(Some(
                MpVector::from_extended(&sim.x0).context("simulation x0 must be finite")?,
            )),
        }
    }
}
