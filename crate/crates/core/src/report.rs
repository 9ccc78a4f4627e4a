//! The structured report a run emits: scenario echo, per-task results,
//! and the flat list of verification checks. Serialized as JSON with a
//! versioned schema; all maps are ordered so two runs of one scenario
//! produce identical bytes outside the timing block.
//!
//! Scalars serialize as arrays of [numerator, denominator] decimal
//! string pairs over the ζ_{2T} power basis.

use crate::scalar::Cyc;
use crate::scenario::Scenario;
use serde::Serialize;
use std::collections::BTreeMap;

pub const SCHEMA_VERSION: u32 = 1;

/// One verification check: a named identity instance, the cap it was
/// certified at, and the residual when it failed.
#[derive(Serialize, Clone, Debug)]
pub struct CheckRecord {
    pub name: String,
    pub instance: String,
    pub cap: i64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
}

impl CheckRecord {
    pub fn from_result(name: &str, instance: &str, cap: i64, r: Result<(), String>) -> CheckRecord {
        CheckRecord {
            name: name.to_string(),
            instance: instance.to_string(),
            cap,
            pass: r.is_ok(),
            residual: r.err(),
        }
    }
}

/// A coefficient of ℚ(ζ_{2T}) as [num, den] decimal-string pairs.
pub fn cyc_to_json(c: &Cyc) -> Vec<[String; 2]> {
    c.coeffs()
        .iter()
        .map(|r| [r.numer().to_string(), r.denom().to_string()])
        .collect()
}

#[derive(Serialize, Clone, Debug)]
pub struct ZhuReport {
    pub g: String,
    pub cap: i64,
    /// Representative count per weight layer, [weight, count].
    pub layer_dims: Vec<(String, usize)>,
    /// Interior layers agree between caps N and N+1.
    pub filtration_stable: bool,
}

#[derive(Serialize, Clone, Debug)]
pub struct BimoduleReport {
    pub g1: String,
    pub g2: String,
    pub m1: String,
    pub cap: i64,
    pub layer_dims_oprime: Vec<(String, usize)>,
    pub layer_dims_full: Vec<(String, usize)>,
    /// Whether the O″ generators enlarged the O′ span at this cap.
    pub o_double_prime_enlarges: bool,
}

#[derive(Serialize, Clone, Debug)]
pub struct FusionReport {
    pub caps: Vec<i64>,
    pub dims: Vec<usize>,
    pub stabilized: bool,
    pub value: usize,
    /// π(Y_M) data, present when a concrete intertwiner exists for the
    /// scenario (M¹ = V, M² = M³).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi_nonzero: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi_equivariant: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi_in_hom_span: Option<bool>,
    /// Coordinates of π(Y_M) on the reduced tensor basis at the top cap.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi_coords: Option<Vec<(usize, Vec<[String; 2]>)>>,
    /// Bound vs the lower bound from the explicit intertwiner: flags a
    /// gap the surjectivity conjecture would close.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_above_lower_bound: Option<bool>,
}

#[derive(Serialize, Clone, Debug)]
#[serde(tag = "task", rename_all = "kebab-case")]
pub enum TaskReport {
    BuildZhu { algebras: Vec<ZhuReport> },
    BuildBimodule { bimodule: BimoduleReport },
    FusionBound { fusion: FusionReport },
    Verify { checks_run: usize, checks_failed: usize },
}

#[derive(Serialize, Clone, Debug)]
pub struct ScenarioEcho {
    pub t: u32,
    pub backend: String,
    pub g1: String,
    pub g2: String,
    pub m1: Option<String>,
    pub m2: Option<String>,
    pub m3: Option<String>,
    pub weight_cap: i64,
    pub tasks: Vec<String>,
    pub seed: u64,
}

impl ScenarioEcho {
    pub fn from_scenario(s: &Scenario) -> ScenarioEcho {
        ScenarioEcho {
            t: s.t,
            backend: s.backend.clone(),
            g1: s.g1.to_string(),
            g2: s.g2.to_string(),
            m1: s.m1.map(|m| m.label().to_string()),
            m2: s.m2.map(|m| m.label().to_string()),
            m3: s.m3.map(|m| m.label().to_string()),
            weight_cap: s.weight_cap,
            tasks: s.tasks.iter().map(|t| t.label().to_string()).collect(),
            seed: s.seed,
        }
    }
}

#[derive(Serialize, Debug)]
pub struct Report {
    pub schema_version: u32,
    pub scenario: ScenarioEcho,
    pub tasks: Vec<TaskReport>,
    pub checks: Vec<CheckRecord>,
    pub all_passed: bool,
    pub timing_ms: BTreeMap<String, u64>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}
