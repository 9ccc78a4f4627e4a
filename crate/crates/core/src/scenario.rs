//! Scenario files: a flat key = value format selecting the backend, the
//! twist pair, the three modules, the weight cap, the task list, and
//! the sweep seed.
//!
//! ```text
//! T = 2
//! backend = heisenberg
//! g1 = id
//! g2 = theta
//! M1 = vacuum
//! M2 = theta-twisted
//! M3 = theta-twisted
//! weight_cap = 6
//! tasks = verify, fusion-bound
//! seed = 42
//! ```

use crate::fock::{ModuleId, Twist};
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord)]
pub enum Task {
    BuildZhu,
    BuildBimodule,
    FusionBound,
    Verify,
}

impl Task {
    pub fn label(self) -> &'static str {
        match self {
            Task::BuildZhu => "build-zhu",
            Task::BuildBimodule => "build-bimodule",
            Task::FusionBound => "fusion-bound",
            Task::Verify => "verify",
        }
    }

    pub fn parse(s: &str) -> Option<Task> {
        match s {
            "build-zhu" => Some(Task::BuildZhu),
            "build-bimodule" => Some(Task::BuildBimodule),
            "fusion-bound" => Some(Task::FusionBound),
            "verify" => Some(Task::Verify),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub t: u32,
    pub backend: String,
    pub g1: Twist,
    pub g2: Twist,
    pub m1: Option<ModuleId>,
    pub m2: Option<ModuleId>,
    pub m3: Option<ModuleId>,
    pub weight_cap: i64,
    pub tasks: Vec<Task>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScenarioError {
    Parse(String),
    Validation(String),
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Parse(m) => write!(f, "scenario parse error: {}", m),
            ScenarioError::Validation(m) => write!(f, "scenario validation error: {}", m),
        }
    }
}

impl std::error::Error for ScenarioError {}

fn parse_twist(s: &str) -> Result<Twist, ScenarioError> {
    match s {
        "id" | "1" => Ok(Twist::Id),
        "theta" => Ok(Twist::Theta),
        _ => Err(ScenarioError::Parse(format!("unknown automorphism '{}'", s))),
    }
}

fn parse_module(s: &str) -> Result<ModuleId, ScenarioError> {
    match s {
        "vacuum" => Ok(ModuleId::Vacuum),
        "theta-twisted" => Ok(ModuleId::ThetaTwisted),
        _ => Err(ScenarioError::Parse(format!("unknown module '{}'", s))),
    }
}

/// Parse the flat key = value format. Unknown keys are errors; `#`
/// starts a comment.
pub fn parse_scenario_str(text: &str) -> Result<Scenario, ScenarioError> {
    let mut t = None;
    let mut backend = None;
    let mut g1 = None;
    let mut g2 = None;
    let mut m1 = None;
    let mut m2 = None;
    let mut m3 = None;
    let mut weight_cap = None;
    let mut tasks = None;
    let mut seed = 0u64;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ScenarioError::Parse(format!(
                "line {}: expected 'key = value', got '{}'",
                lineno + 1,
                line
            )));
        };
        let (key, value) = (key.trim(), value.trim());
        let bad_int = |k: &str| ScenarioError::Parse(format!("malformed integer for {}", k));
        match key {
            "T" => t = Some(value.parse::<u32>().map_err(|_| bad_int("T"))?),
            "backend" => backend = Some(value.to_string()),
            "g1" => g1 = Some(parse_twist(value)?),
            "g2" => g2 = Some(parse_twist(value)?),
            "M1" => m1 = Some(parse_module(value)?),
            "M2" => m2 = Some(parse_module(value)?),
            "M3" => m3 = Some(parse_module(value)?),
            "weight_cap" => {
                weight_cap = Some(value.parse::<i64>().map_err(|_| bad_int("weight_cap"))?)
            }
            "tasks" => {
                let mut list = Vec::new();
                for part in value.split(',') {
                    let part = part.trim();
                    if part.is_empty() {
                        continue;
                    }
                    let task = Task::parse(part).ok_or_else(|| {
                        ScenarioError::Parse(format!("unknown task '{}'", part))
                    })?;
                    if !list.contains(&task) {
                        list.push(task);
                    }
                }
                tasks = Some(list);
            }
            "seed" => seed = value.parse::<u64>().map_err(|_| bad_int("seed"))?,
            _ => {
                return Err(ScenarioError::Parse(format!(
                    "line {}: unknown key '{}'",
                    lineno + 1,
                    key
                )))
            }
        }
    }
    let missing = |k: &str| ScenarioError::Parse(format!("missing required key '{}'", k));
    let scenario = Scenario {
        t: t.ok_or_else(|| missing("T"))?,
        backend: backend.ok_or_else(|| missing("backend"))?,
        g1: g1.ok_or_else(|| missing("g1"))?,
        g2: g2.ok_or_else(|| missing("g2"))?,
        m1,
        m2,
        m3,
        weight_cap: weight_cap.ok_or_else(|| missing("weight_cap"))?,
        tasks: tasks.ok_or_else(|| missing("tasks"))?,
        seed,
    };
    validate(&scenario)?;
    Ok(scenario)
}

/// Twist-compatibility and per-task requirements.
pub fn validate(s: &Scenario) -> Result<(), ScenarioError> {
    let err = |m: String| Err(ScenarioError::Validation(m));
    if s.backend != "heisenberg" {
        return err(format!("unknown backend '{}'", s.backend));
    }
    if s.t != 2 {
        return err(format!(
            "backend 'heisenberg' ships with automorphism order T = 2, got T = {}",
            s.t
        ));
    }
    if s.weight_cap < 0 {
        return err("weight_cap must be nonnegative".into());
    }
    let g3 = s.g1.compose(s.g2);
    let check_twist = |label: &str, m: Option<ModuleId>, g: Twist| -> Result<(), ScenarioError> {
        match m {
            Some(m) if m.twist() != g => Err(ScenarioError::Validation(format!(
                "{} = {} is {}-twisted but must be {}-twisted",
                label,
                m.label(),
                m.twist(),
                g
            ))),
            _ => Ok(()),
        }
    };
    check_twist("M1", s.m1, s.g1)?;
    check_twist("M2", s.m2, s.g2)?;
    check_twist("M3", s.m3, g3)?;
    for task in &s.tasks {
        let need = |cond: bool, what: &str| -> Result<(), ScenarioError> {
            if cond {
                Ok(())
            } else {
                Err(ScenarioError::Validation(format!(
                    "task '{}' requires {}",
                    task.label(),
                    what
                )))
            }
        };
        match task {
            Task::BuildZhu => {}
            Task::BuildBimodule => need(s.m1.is_some(), "M1")?,
            Task::FusionBound | Task::Verify => {
                need(s.m1.is_some() && s.m2.is_some() && s.m3.is_some(), "M1, M2 and M3")?
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
T = 2
backend = heisenberg
g1 = id
g2 = theta
M1 = vacuum
M2 = theta-twisted
M3 = theta-twisted
weight_cap = 6
tasks = fusion-bound
";

    #[test]
    fn minimal_valid_file() {
        let s = parse_scenario_str(MINIMAL).unwrap();
        assert_eq!(s.g1, Twist::Id);
        assert_eq!(s.g2, Twist::Theta);
        assert_eq!(s.m2, Some(ModuleId::ThetaTwisted));
        assert_eq!(s.weight_cap, 6);
        assert_eq!(s.tasks, vec![Task::FusionBound]);
        assert_eq!(s.seed, 0);
    }

    #[test]
    fn twist_mismatch_is_rejected() {
        let text = MINIMAL.replace("g1 = id", "g1 = theta");
        let e = parse_scenario_str(&text).unwrap_err();
        assert!(matches!(e, ScenarioError::Validation(_)), "{}", e);
    }

    #[test]
    fn verify_without_modules_is_rejected() {
        let text = "\
T = 2
backend = heisenberg
g1 = id
g2 = theta
weight_cap = 6
tasks = verify
";
        let e = parse_scenario_str(text).unwrap_err();
        assert!(matches!(e, ScenarioError::Validation(_)), "{}", e);
    }

    #[test]
    fn unknown_backend_is_rejected() {
        let text = MINIMAL.replace("backend = heisenberg", "backend = lattice");
        let e = parse_scenario_str(&text).unwrap_err();
        assert!(matches!(e, ScenarioError::Validation(_)));
    }

    #[test]
    fn comments_and_empty_tasks() {
        let text = "\
# canonical scenario
T = 2
backend = heisenberg  # rank one
g1 = id
g2 = theta
weight_cap = 4
tasks =
";
        let s = parse_scenario_str(text).unwrap();
        assert!(s.tasks.is_empty());
    }

    #[test]
    fn unknown_key_is_rejected() {
        let text = format!("{}\nmystery = 1\n", MINIMAL);
        assert!(matches!(
            parse_scenario_str(&text),
            Err(ScenarioError::Parse(_))
        ));
    }
}
