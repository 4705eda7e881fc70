//! Input file schemas for the subcommands. States are either full matrices
//! or qubit Bloch vectors; Hamiltonians are matrices or sampled schedules.

use serde::Deserialize;

use qsl_core::cptp::DilationSpec;
use qsl_core::matrix::ComplexMatrix;
use qsl_core::states::{ScheduleSpec, StateSpec};

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum BoundInput {
    Many { instances: Vec<BoundInstance> },
    One(BoundInstance),
}

impl BoundInput {
    pub fn into_instances(self) -> Vec<BoundInstance> {
        match self {
            BoundInput::Many { instances } => instances,
            BoundInput::One(inst) => vec![inst],
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundInstance {
    pub rho: StateSpec,
    #[serde(rename = "H", default)]
    pub h: Option<ComplexMatrix>,
    #[serde(default)]
    pub schedule: Option<ScheduleSpec>,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(default)]
    pub hbar: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricInput {
    pub rho: StateSpec,
    #[serde(rename = "U", default)]
    pub u: Option<ComplexMatrix>,
    #[serde(rename = "H", default)]
    pub h: Option<ComplexMatrix>,
    #[serde(rename = "t", default)]
    pub t: Option<f64>,
    #[serde(default)]
    pub hbar: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelInput {
    pub rho: StateSpec,
    #[serde(default)]
    pub kraus: Option<Vec<ComplexMatrix>>,
    #[serde(default)]
    pub dilation: Option<DilationSpec>,
    #[serde(rename = "T", default)]
    pub t: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterfereInput {
    pub rho: StateSpec,
    #[serde(rename = "H")]
    pub h: ComplexMatrix,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(default)]
    pub hbar: Option<f64>,
}
