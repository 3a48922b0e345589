//! Instance and plan files.
//!
//! Both are pretty-printed JSON documents with a `format_version` field and an
//! explicit `time_unit` (always `"s"`). Field order is fixed, so saving a
//! loaded canonical document reproduces it byte for byte. The schema is
//! described in `docs/instance-format.md`.

use serde::{Deserialize, Serialize};

use crate::error::InstanceError;
use crate::model::{
    FeedingWindow, GroundStation, Instance, InstanceParts, Satellite, Schedule, Task, Time, TimingParams, VisibleWindow,
};

pub const FORMAT_VERSION: u32 = 1;
pub const TIME_UNIT: &str = "s";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDocument {
    format_version: u32,
    time_unit: String,
    horizon: [Time; 2],
    timing: TimingParams,
    satellites: Vec<Satellite>,
    ground_stations: Vec<GroundStation>,
    tasks: Vec<Task>,
    windows: Vec<VisibleWindow>,
    #[serde(default)]
    feeding_windows: Vec<FeedingWindow>,
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: u32,
}

fn parse<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T, InstanceError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        InstanceError::Parse { path, line: inner.line(), column: inner.column(), message: inner.to_string() }
    })
}

fn check_version(text: &str) -> Result<(), InstanceError> {
    // A document that does not even carry a version falls through to the full
    // parse, which reports the missing field with its location.
    if let Ok(VersionProbe { format_version }) = serde_json::from_str::<VersionProbe>(text) {
        if format_version != FORMAT_VERSION {
            return Err(InstanceError::Version { found: format_version, expected: FORMAT_VERSION });
        }
    }
    Ok(())
}

/// Parses and validates an instance document.
pub fn load_instance(bytes: &[u8]) -> Result<Instance, InstanceError> {
    let text = std::str::from_utf8(bytes).map_err(|e| InstanceError::Parse {
        path: ".".into(),
        line: 0,
        column: e.valid_up_to(),
        message: "document is not valid UTF-8".into(),
    })?;
    check_version(text)?;
    let doc: InstanceDocument = parse(text)?;
    if doc.time_unit != TIME_UNIT {
        return Err(InstanceError::Invalid(vec![crate::error::Diagnostic::new(
            "time_unit",
            format!("unsupported time unit {:?}, expected {TIME_UNIT:?}", doc.time_unit),
        )]));
    }
    Instance::new(InstanceParts {
        horizon: (doc.horizon[0], doc.horizon[1]),
        timing: doc.timing,
        satellites: doc.satellites,
        ground_stations: doc.ground_stations,
        tasks: doc.tasks,
        windows: doc.windows,
        feeding_windows: doc.feeding_windows,
    })
}

/// Serializes an instance in canonical form (trailing newline included).
pub fn save_instance(instance: &Instance) -> Vec<u8> {
    let p = instance.to_parts();
    let doc = InstanceDocument {
        format_version: FORMAT_VERSION,
        time_unit: TIME_UNIT.into(),
        horizon: [p.horizon.0, p.horizon.1],
        timing: p.timing,
        satellites: p.satellites,
        ground_stations: p.ground_stations,
        tasks: p.tasks,
        windows: p.windows,
        feeding_windows: p.feeding_windows,
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("instance documents always serialize");
    out.push(b'\n');
    out
}

/// A solved plan as written by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanDocument {
    pub format_version: u32,
    pub time_unit: String,
    pub instance: String,
    pub algorithm: String,
    pub seed: u64,
    pub fitness: u64,
    #[serde(flatten)]
    pub schedule: Schedule,
}

impl PlanDocument {
    pub fn new(
        instance: impl Into<String>,
        algorithm: impl Into<String>,
        seed: u64,
        fitness: u64,
        schedule: Schedule,
    ) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            time_unit: TIME_UNIT.into(),
            instance: instance.into(),
            algorithm: algorithm.into(),
            seed,
            fitness,
            schedule,
        }
    }
}

pub fn save_plan(plan: &PlanDocument) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(plan).expect("plan documents always serialize");
    out.push(b'\n');
    out
}

pub fn load_plan(bytes: &[u8]) -> Result<PlanDocument, InstanceError> {
    let text = std::str::from_utf8(bytes).map_err(|e| InstanceError::Parse {
        path: ".".into(),
        line: 0,
        column: e.valid_up_to(),
        message: "document is not valid UTF-8".into(),
    })?;
    check_version(text)?;
    parse(text)
}
