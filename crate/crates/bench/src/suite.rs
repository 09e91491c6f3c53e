//! Built-in verification scenarios, compiled into the binary.

use crate::error::Result;
use crate::runner::{run_scenario, RunOptions, RunRecord};
use crate::scenario::Scenario;

pub const BUILTIN: &[(&str, &str)] = &[
    ("qubit", include_str!("../scenarios/qubit.toml")),
    (
        "quantum_povm",
        include_str!("../scenarios/quantum_povm.toml"),
    ),
    (
        "quantum_projective",
        include_str!("../scenarios/quantum_projective.toml"),
    ),
    (
        "quantum_near_identity",
        include_str!("../scenarios/quantum_near_identity.toml"),
    ),
    (
        "classical_rotation",
        include_str!("../scenarios/classical_rotation.toml"),
    ),
    (
        "classical_cat",
        include_str!("../scenarios/classical_cat.toml"),
    ),
    (
        "classical_baker",
        include_str!("../scenarios/classical_baker.toml"),
    ),
    (
        "classical_cat_dominant",
        include_str!("../scenarios/classical_cat_dominant.toml"),
    ),
    (
        "classical_ensemble",
        include_str!("../scenarios/classical_ensemble.toml"),
    ),
    ("synthetic", include_str!("../scenarios/synthetic.toml")),
];

pub fn builtin_scenarios() -> Result<Vec<Scenario>> {
    BUILTIN
        .iter()
        .map(|(_, text)| Scenario::from_toml(text, "."))
        .collect()
}

/// Runs every built-in scenario with `opts` applied, one after another.
pub fn run_builtin(opts: &RunOptions) -> Result<Vec<RunRecord>> {
    let mut records = Vec::new();
    for s in builtin_scenarios()? {
        // the gap tolerance only concerns quantum systems
        let o = if s.quantum.is_some() {
            *opts
        } else {
            RunOptions {
                gap_tol: None,
                ..*opts
            }
        };
        records.extend(run_scenario(&o.apply(&s)?)?);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_scenarios_parse() {
        let all = builtin_scenarios().unwrap();
        assert_eq!(all.len(), BUILTIN.len());
        let grid: usize = all.iter().map(|s| s.grid().len()).sum();
        assert!(grid > 1000);
    }
}
