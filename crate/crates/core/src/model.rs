//! Domain types for satellite ground network planning with feed-switching.
//!
//! An [`Instance`] is built once through [`Instance::new`], which checks every
//! structural invariant and precomputes the dense resource indices used by the
//! decoder and the feasibility checker. After construction it is immutable.
//!
//! Time is integer seconds from the start of the planning horizon.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Diagnostic, InstanceError, ModelError};

/// Integer seconds.
pub type Time = i64;

macro_rules! id_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

id_newtype!(
    /// Identifier of a communication task.
    TaskId
);
id_newtype!(
    /// Identifier of a visible time window (VTW).
    WindowId
);
id_newtype!(
    /// Identifier of a feeding time window (FVTW).
    FeedWindowId
);

/// Global timing parameters shared by every resource.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimingParams {
    /// Attitude adjustment time of a satellite antenna between two tasks.
    pub alpha: Time,
    /// Minimum VTW/FVTW overlap needed to complete a feed switch.
    pub beta: Time,
    /// Minimum interval between two tasks on one ground antenna.
    pub gamma: Time,
}

impl TimingParams {
    /// Gap kept free on both sides of a placement inside one window pair.
    pub fn pair_gap(&self) -> Time {
        self.alpha.max(self.gamma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OwnerKind {
    Satellite,
    GroundStation,
    FeedingGroundStation,
}

/// One antenna, addressed by its owner and its index on that owner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AntennaRef {
    pub kind: OwnerKind,
    pub owner: u32,
    pub index: u32,
}

impl fmt::Display for AntennaRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            OwnerKind::Satellite => "sat",
            OwnerKind::GroundStation => "gs",
            OwnerKind::FeedingGroundStation => "fgs",
        };
        write!(f, "{tag}{}/{}", self.owner, self.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Satellite {
    pub id: u32,
    pub antennas: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundStation {
    pub id: u32,
    pub antennas: u32,
    pub feeding: bool,
}

/// A communication request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Task {
    pub id: TaskId,
    /// Earliest allowed start.
    pub est: Time,
    /// Latest allowed end.
    #[serde(rename = "let")]
    pub latest_end: Time,
    pub duration: Time,
    pub profit: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisibleWindow {
    pub id: WindowId,
    pub satellite_antenna: AntennaRef,
    pub ground_antenna: AntennaRef,
    pub start: Time,
    pub end: Time,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedingWindow {
    pub id: FeedWindowId,
    pub satellite_antenna: AntennaRef,
    pub ground_antenna: AntennaRef,
    pub start: Time,
    pub end: Time,
}

/// Execution of one task: the window it runs in, the optional feeding window
/// it switches onto, and its start/end times.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub task: TaskId,
    pub window: WindowId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feeding_window: Option<FeedWindowId>,
    pub start: Time,
    pub end: Time,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub placements: Vec<Placement>,
    pub unscheduled: Vec<TaskId>,
}

impl Schedule {
    pub fn is_placed(&self, task: TaskId) -> bool {
        self.placements.iter().any(|p| p.task == task)
    }
}

/// Dense indices of the resources a window pair touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct PairResources {
    pub sat_antenna: usize,
    pub ground_antenna: usize,
    pub satellite: usize,
    pub station: usize,
}

/// Which resource a busy segment occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Side {
    Satellite,
    Ground,
}

/// A time interval during which one antenna is held by a placement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct BusySegment {
    pub side: Side,
    /// Dense antenna index (satellite or ground antenna space, per `side`).
    pub antenna: usize,
    /// Dense owner index (satellite or station space, per `side`).
    pub owner: usize,
    pub start: Time,
    pub end: Time,
}

/// A validated, immutable problem instance.
#[derive(Debug, Clone)]
pub struct Instance {
    horizon: (Time, Time),
    timing: TimingParams,
    satellites: Vec<Satellite>,
    ground_stations: Vec<GroundStation>,
    tasks: Vec<Task>,
    windows: Vec<VisibleWindow>,
    feeding_windows: Vec<FeedingWindow>,

    task_index: HashMap<TaskId, usize>,
    window_index: HashMap<WindowId, usize>,
    feed_index: HashMap<FeedWindowId, usize>,
    window_res: Vec<PairResources>,
    feed_res: Vec<PairResources>,
    sat_antenna_count: usize,
    ground_antenna_count: usize,
}

/// Plain parts of an [`Instance`], in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceParts {
    pub horizon: (Time, Time),
    pub timing: TimingParams,
    pub satellites: Vec<Satellite>,
    pub ground_stations: Vec<GroundStation>,
    pub tasks: Vec<Task>,
    pub windows: Vec<VisibleWindow>,
    pub feeding_windows: Vec<FeedingWindow>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.horizon == other.horizon
            && self.timing == other.timing
            && self.satellites == other.satellites
            && self.ground_stations == other.ground_stations
            && self.tasks == other.tasks
            && self.windows == other.windows
            && self.feeding_windows == other.feeding_windows
    }
}

struct ResourceLookup {
    sat_offset: HashMap<u32, (usize, usize, u32)>,
    station_offset: HashMap<u32, (usize, usize, u32, bool)>,
}

impl ResourceLookup {
    fn satellite_antenna(&self, r: &AntennaRef) -> Result<(usize, usize), String> {
        if r.kind != OwnerKind::Satellite {
            return Err(format!("antenna {r} must belong to a satellite"));
        }
        let &(pos, offset, count) =
            self.sat_offset.get(&r.owner).ok_or_else(|| format!("unknown satellite {}", r.owner))?;
        if r.index >= count {
            return Err(format!("antenna index {} out of range for satellite {} ({count} antennas)", r.index, r.owner));
        }
        Ok((offset + r.index as usize, pos))
    }

    fn ground_antenna(&self, r: &AntennaRef, need_feeding: bool) -> Result<(usize, usize), String> {
        let &(pos, offset, count, feeding) =
            self.station_offset.get(&r.owner).ok_or_else(|| format!("unknown ground station {}", r.owner))?;
        match r.kind {
            OwnerKind::Satellite => return Err(format!("antenna {r} must belong to a ground station")),
            OwnerKind::GroundStation if feeding => {
                return Err(format!("station {} is a feeding station but is referenced as ground-station", r.owner))
            }
            OwnerKind::FeedingGroundStation if !feeding => {
                return Err(format!("station {} is not flagged feeding", r.owner))
            }
            _ => {}
        }
        if need_feeding && !feeding {
            return Err(format!("feeding window on non-feeding station {}", r.owner));
        }
        if r.index >= count {
            return Err(format!("antenna index {} out of range for station {} ({count} antennas)", r.index, r.owner));
        }
        Ok((offset + r.index as usize, pos))
    }
}

impl Instance {
    /// Validates `parts` and builds the instance. Every violated invariant is
    /// reported with a field path.
    pub fn new(parts: InstanceParts) -> Result<Self, InstanceError> {
        let mut diags = Vec::new();
        let InstanceParts { horizon, timing, satellites, ground_stations, tasks, windows, feeding_windows } = parts;

        if horizon.0 >= horizon.1 {
            diags.push(Diagnostic::new("horizon", "horizon start must precede its end"));
        }
        for (name, v) in [("alpha", timing.alpha), ("beta", timing.beta), ("gamma", timing.gamma)] {
            if v < 0 {
                diags.push(Diagnostic::new(format!("timing.{name}"), "must be non-negative"));
            }
        }

        let mut lookup = ResourceLookup { sat_offset: HashMap::new(), station_offset: HashMap::new() };
        let mut offset = 0usize;
        for (i, s) in satellites.iter().enumerate() {
            if s.antennas == 0 {
                diags.push(Diagnostic::new(format!("satellites[{i}].antennas"), "must be at least 1"));
            }
            if lookup.sat_offset.insert(s.id, (i, offset, s.antennas)).is_some() {
                diags.push(Diagnostic::new(format!("satellites[{i}].id"), format!("duplicate satellite id {}", s.id)));
            }
            offset += s.antennas as usize;
        }
        let sat_antenna_count = offset;
        offset = 0;
        for (i, g) in ground_stations.iter().enumerate() {
            if g.antennas == 0 {
                diags.push(Diagnostic::new(format!("ground_stations[{i}].antennas"), "must be at least 1"));
            }
            if lookup.station_offset.insert(g.id, (i, offset, g.antennas, g.feeding)).is_some() {
                diags.push(Diagnostic::new(
                    format!("ground_stations[{i}].id"),
                    format!("duplicate station id {}", g.id),
                ));
            }
            offset += g.antennas as usize;
        }
        let ground_antenna_count = offset;

        let mut task_index = HashMap::with_capacity(tasks.len());
        for (i, t) in tasks.iter().enumerate() {
            let path = format!("tasks[{i}]");
            if task_index.insert(t.id, i).is_some() {
                diags.push(Diagnostic::new(format!("{path}.id"), format!("duplicate task id {}", t.id)));
            }
            if t.duration <= 0 {
                diags.push(Diagnostic::new(
                    format!("{path}.duration"),
                    format!("task {} has non-positive duration", t.id),
                ));
            }
            if t.est + t.duration > t.latest_end {
                diags.push(Diagnostic::new(
                    path,
                    format!("task {}: est + duration ({}) exceeds let ({})", t.id, t.est + t.duration, t.latest_end),
                ));
            }
        }

        let check_interval = |diags: &mut Vec<Diagnostic>, path: &str, start: Time, end: Time| {
            if start >= end {
                diags.push(Diagnostic::new(path.to_string(), "window start must precede its end"));
            }
            if start < horizon.0 || end > horizon.1 {
                diags.push(Diagnostic::new(path.to_string(), "window lies outside the horizon"));
            }
        };

        let mut window_index = HashMap::with_capacity(windows.len());
        let mut window_res = Vec::with_capacity(windows.len());
        for (i, w) in windows.iter().enumerate() {
            let path = format!("windows[{i}]");
            if window_index.insert(w.id, i).is_some() {
                diags.push(Diagnostic::new(format!("{path}.id"), format!("duplicate window id {}", w.id)));
            }
            check_interval(&mut diags, &path, w.start, w.end);
            let sat = lookup.satellite_antenna(&w.satellite_antenna);
            let gnd = lookup.ground_antenna(&w.ground_antenna, false);
            match (sat, gnd) {
                (Ok((sa, s)), Ok((ga, g))) => {
                    window_res.push(PairResources { sat_antenna: sa, ground_antenna: ga, satellite: s, station: g })
                }
                (sat, gnd) => {
                    if let Err(e) = sat {
                        diags.push(Diagnostic::new(format!("{path}.satellite_antenna"), e));
                    }
                    if let Err(e) = gnd {
                        diags.push(Diagnostic::new(format!("{path}.ground_antenna"), e));
                    }
                    window_res.push(PairResources { sat_antenna: 0, ground_antenna: 0, satellite: 0, station: 0 });
                }
            }
        }

        let mut feed_index = HashMap::with_capacity(feeding_windows.len());
        let mut feed_res = Vec::with_capacity(feeding_windows.len());
        for (i, w) in feeding_windows.iter().enumerate() {
            let path = format!("feeding_windows[{i}]");
            if feed_index.insert(w.id, i).is_some() {
                diags.push(Diagnostic::new(format!("{path}.id"), format!("duplicate feeding window id {}", w.id)));
            }
            check_interval(&mut diags, &path, w.start, w.end);
            let sat = lookup.satellite_antenna(&w.satellite_antenna);
            let gnd = lookup.ground_antenna(&w.ground_antenna, true);
            match (sat, gnd) {
                (Ok((sa, s)), Ok((ga, g))) => {
                    feed_res.push(PairResources { sat_antenna: sa, ground_antenna: ga, satellite: s, station: g })
                }
                (sat, gnd) => {
                    if let Err(e) = sat {
                        diags.push(Diagnostic::new(format!("{path}.satellite_antenna"), e));
                    }
                    if let Err(e) = gnd {
                        diags.push(Diagnostic::new(format!("{path}.ground_antenna"), e));
                    }
                    feed_res.push(PairResources { sat_antenna: 0, ground_antenna: 0, satellite: 0, station: 0 });
                }
            }
        }

        if !diags.is_empty() {
            return Err(InstanceError::Invalid(diags));
        }
        Ok(Instance {
            horizon,
            timing,
            satellites,
            ground_stations,
            tasks,
            windows,
            feeding_windows,
            task_index,
            window_index,
            feed_index,
            window_res,
            feed_res,
            sat_antenna_count,
            ground_antenna_count,
        })
    }

    pub fn horizon(&self) -> (Time, Time) {
        self.horizon
    }
    pub fn timing(&self) -> TimingParams {
        self.timing
    }
    pub fn satellites(&self) -> &[Satellite] {
        &self.satellites
    }
    pub fn ground_stations(&self) -> &[GroundStation] {
        &self.ground_stations
    }
    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }
    pub fn windows(&self) -> &[VisibleWindow] {
        &self.windows
    }
    pub fn feeding_windows(&self) -> &[FeedingWindow] {
        &self.feeding_windows
    }

    pub fn task_index(&self, id: TaskId) -> Option<usize> {
        self.task_index.get(&id).copied()
    }
    pub fn task(&self, id: TaskId) -> Option<&Task> {
        self.task_index(id).map(|i| &self.tasks[i])
    }
    pub fn window_index(&self, id: WindowId) -> Option<usize> {
        self.window_index.get(&id).copied()
    }
    pub fn feed_index(&self, id: FeedWindowId) -> Option<usize> {
        self.feed_index.get(&id).copied()
    }

    /// Sum of all task profits; an upper bound on any schedule's fitness.
    pub fn total_profit(&self) -> u64 {
        self.tasks.iter().map(|t| u64::from(t.profit)).sum()
    }

    pub fn into_parts(self) -> InstanceParts {
        InstanceParts {
            horizon: self.horizon,
            timing: self.timing,
            satellites: self.satellites,
            ground_stations: self.ground_stations,
            tasks: self.tasks,
            windows: self.windows,
            feeding_windows: self.feeding_windows,
        }
    }

    pub fn to_parts(&self) -> InstanceParts {
        self.clone().into_parts()
    }

    pub(crate) fn window_resources(&self, idx: usize) -> PairResources {
        self.window_res[idx]
    }
    pub(crate) fn feed_resources(&self, idx: usize) -> PairResources {
        self.feed_res[idx]
    }
    pub(crate) fn sat_antenna_count(&self) -> usize {
        self.sat_antenna_count
    }
    pub(crate) fn ground_antenna_count(&self) -> usize {
        self.ground_antenna_count
    }

    /// Busy segments held by a placement in window `window` starting at
    /// `start` and ending at `end`, optionally switching onto `feed`.
    ///
    /// The satellite antenna is held for the whole task. Without a feed the
    /// ground antenna is held for the whole task too; with a feed, the regular
    /// ground antenna is held until the window closes and the feeding antenna
    /// from the later of task start and feed window start until the task ends.
    /// Empty segments are omitted.
    pub(crate) fn busy_segments(
        &self,
        window: usize,
        feed: Option<usize>,
        start: Time,
        end: Time,
    ) -> smallvec::SmallVec<[BusySegment; 3]> {
        let res = self.window_res[window];
        let mut out = smallvec::SmallVec::new();
        out.push(BusySegment { side: Side::Satellite, antenna: res.sat_antenna, owner: res.satellite, start, end });
        match feed {
            None => out.push(BusySegment {
                side: Side::Ground,
                antenna: res.ground_antenna,
                owner: res.station,
                start,
                end,
            }),
            Some(f) => {
                let vtw_end = self.windows[window].end.min(end);
                if start < vtw_end {
                    out.push(BusySegment {
                        side: Side::Ground,
                        antenna: res.ground_antenna,
                        owner: res.station,
                        start,
                        end: vtw_end,
                    });
                }
                let fres = self.feed_res[f];
                let feed_start = start.max(self.feeding_windows[f].start);
                if feed_start < end {
                    out.push(BusySegment {
                        side: Side::Ground,
                        antenna: fres.ground_antenna,
                        owner: fres.station,
                        start: feed_start,
                        end,
                    });
                }
            }
        }
        out
    }
}

/// Total profit of the placed tasks.
pub fn fitness(instance: &Instance, schedule: &Schedule) -> Result<u64, ModelError> {
    schedule.placements.iter().try_fold(0u64, |acc, p| {
        let task = instance.task(p.task).ok_or(ModelError::UnknownTask(p.task))?;
        Ok(acc + u64::from(task.profit))
    })
}

/// Which rule a [`Violation`] breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// A numbered model constraint (2 through 13).
    Constraint(u8),
    /// The placement references something that does not exist or is internally inconsistent.
    Structure,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Constraint(n) => write!(f, "constraint ({n})"),
            Rule::Structure => write!(f, "structure"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    pub tasks: Vec<TaskId>,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, constraint: u8) -> usize {
        self.violations.iter().filter(|v| v.rule == Rule::Constraint(constraint)).count()
    }

    pub fn has(&self, constraint: u8) -> bool {
        self.count(constraint) > 0
    }

    fn push(&mut self, rule: Rule, tasks: Vec<TaskId>, detail: String) {
        self.violations.push(Violation { rule, tasks, detail });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "no violations");
        }
        for v in &self.violations {
            let ids: Vec<String> = v.tasks.iter().map(|t| t.to_string()).collect();
            writeln!(f, "{} tasks [{}]: {}", v.rule, ids.join(","), v.detail)?;
        }
        Ok(())
    }
}

struct Held {
    task: TaskId,
    seg: BusySegment,
}

/// Checks a schedule against the model constraints and lists every violation.
pub fn validate_schedule(instance: &Instance, schedule: &Schedule) -> ValidationReport {
    let mut report = ValidationReport::default();
    let timing = instance.timing();
    let mut seen: HashSet<TaskId> = HashSet::new();
    let mut held: Vec<Held> = Vec::new();

    for p in &schedule.placements {
        if !seen.insert(p.task) {
            report.push(Rule::Constraint(13), vec![p.task], format!("task {} placed more than once", p.task));
        }
        let Some(task) = instance.task(p.task) else {
            report.push(Rule::Structure, vec![p.task], format!("unknown task {}", p.task));
            continue;
        };
        let Some(wi) = instance.window_index(p.window) else {
            report.push(Rule::Structure, vec![p.task], format!("unknown window {}", p.window));
            continue;
        };
        let w = &instance.windows()[wi];
        if p.end != p.start + task.duration {
            report.push(
                Rule::Structure,
                vec![p.task],
                format!("end {} differs from start {} + duration {}", p.end, p.start, task.duration),
            );
        }
        let end = p.start + task.duration;
        if end > task.latest_end {
            report.push(Rule::Constraint(2), vec![p.task], format!("ends at {end} after let {}", task.latest_end));
        }
        if p.start < w.start {
            report.push(
                Rule::Constraint(3),
                vec![p.task],
                format!("starts at {} before window {} opens at {}", p.start, w.id, w.start),
            );
        }
        if p.start < task.est {
            report.push(Rule::Constraint(5), vec![p.task], format!("starts at {} before est {}", p.start, task.est));
        }
        if p.start >= task.latest_end {
            report.push(
                Rule::Constraint(6),
                vec![p.task],
                format!("starts at {} not before let {}", p.start, task.latest_end),
            );
        }

        let feed_idx = match p.feeding_window {
            None => {
                if end > w.end {
                    report.push(
                        Rule::Constraint(4),
                        vec![p.task],
                        format!("ends at {end} after window {} closes at {}", w.id, w.end),
                    );
                }
                None
            }
            Some(fid) => {
                let Some(fi) = instance.feed_index(fid) else {
                    report.push(Rule::Structure, vec![p.task], format!("unknown feeding window {fid}"));
                    continue;
                };
                let fw = &instance.feeding_windows()[fi];
                if p.start > w.end {
                    report.push(
                        Rule::Constraint(4),
                        vec![p.task],
                        format!("starts at {} after window {} closes at {}", p.start, w.id, w.end),
                    );
                }
                if fw.satellite_antenna != w.satellite_antenna {
                    report.push(
                        Rule::Structure,
                        vec![p.task],
                        format!("feeding window {fid} is on a different satellite antenna than window {}", w.id),
                    );
                }
                if fw.ground_antenna.owner == w.ground_antenna.owner {
                    report.push(
                        Rule::Structure,
                        vec![p.task],
                        format!("feeding window {fid} is on the same station as window {}", w.id),
                    );
                }
                let overlap = w.end - fw.start;
                if overlap < timing.beta {
                    report.push(
                        Rule::Constraint(11),
                        vec![p.task],
                        format!("window {} / feeding window {fid} overlap {overlap} below beta {}", w.id, timing.beta),
                    );
                }
                if end < w.end || end > fw.end {
                    report.push(
                        Rule::Constraint(12),
                        vec![p.task],
                        format!("feed-switched end {end} outside [{}, {}]", w.end, fw.end),
                    );
                }
                Some(fi)
            }
        };
        for seg in instance.busy_segments(wi, feed_idx, p.start, end) {
            held.push(Held { task: p.task, seg });
        }
    }

    for &t in &schedule.unscheduled {
        if !seen.insert(t) {
            report.push(Rule::Constraint(13), vec![t], format!("task {t} listed more than once"));
        }
        if instance.task(t).is_none() {
            report.push(Rule::Structure, vec![t], format!("unknown task {t}"));
        }
    }

    check_pairs(&mut report, &held, Side::Satellite, timing.alpha, 7, 9);
    check_pairs(&mut report, &held, Side::Ground, timing.gamma, 8, 10);
    report
}

/// Reports same-antenna gap violations (`gap_rule`) and same-owner overlaps
/// on different antennas (`owner_rule`) among the segments on one side.
fn check_pairs(report: &mut ValidationReport, held: &[Held], side: Side, gap: Time, gap_rule: u8, owner_rule: u8) {
    let mut by_owner: HashMap<usize, Vec<&Held>> = HashMap::new();
    for h in held.iter().filter(|h| h.seg.side == side) {
        by_owner.entry(h.seg.owner).or_default().push(h);
    }
    let mut owners: Vec<_> = by_owner.into_iter().collect();
    owners.sort_by_key(|(o, _)| *o);
    for (_, mut segs) in owners {
        segs.sort_by_key(|h| (h.seg.start, h.seg.end, h.task));
        for (i, a) in segs.iter().enumerate() {
            for b in &segs[i + 1..] {
                if b.seg.start >= a.seg.end + gap {
                    break;
                }
                if a.seg.antenna == b.seg.antenna {
                    report.push(
                        Rule::Constraint(gap_rule),
                        vec![a.task, b.task],
                        format!("gap {} on one antenna is below {gap}", b.seg.start - a.seg.end),
                    );
                } else if b.seg.start < a.seg.end {
                    report.push(
                        Rule::Constraint(owner_rule),
                        vec![a.task, b.task],
                        format!(
                            "two antennas of one owner busy at once during [{}, {}]",
                            b.seg.start,
                            a.seg.end.min(b.seg.end)
                        ),
                    );
                }
            }
        }
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn placement(task: u32, window: u32, start: Time, end: Time) -> Placement {
        Placement { task: TaskId(task), window: WindowId(window), feeding_window: None, start, end }
    }

    #[test]
    fn fitness_sums_placed_profits() {
        let inst = Instance::new(parts(
            vec![task(1, 0, 100, 10, 5), task(2, 0, 100, 10, 2), task(3, 0, 100, 10, 9), task(4, 0, 100, 10, 7)],
            vec![vtw(0, sat(0, 0), gs(0, 0), 0, 500)],
            vec![],
            zero_timing(),
        ))
        .unwrap();
        assert_eq!(fitness(&inst, &Schedule::default()).unwrap(), 0);
        let one = Schedule { placements: vec![placement(4, 0, 0, 10)], unscheduled: vec![] };
        assert_eq!(fitness(&inst, &one).unwrap(), 7);
        let three = Schedule {
            placements: vec![placement(1, 0, 0, 10), placement(2, 0, 10, 20), placement(3, 0, 20, 30)],
            unscheduled: vec![TaskId(4)],
        };
        assert_eq!(fitness(&inst, &three).unwrap(), 16);
        let bad = Schedule { placements: vec![placement(99, 0, 0, 10)], unscheduled: vec![] };
        assert_eq!(fitness(&inst, &bad), Err(ModelError::UnknownTask(TaskId(99))));
    }

    #[test]
    fn empty_schedule_has_no_violations() {
        let inst = Instance::new(parts(
            vec![task(1, 0, 100, 10, 5)],
            vec![vtw(0, sat(0, 0), gs(0, 0), 0, 500)],
            vec![],
            TimingParams { alpha: 5, beta: 5, gamma: 5 },
        ))
        .unwrap();
        assert!(validate_schedule(&inst, &Schedule::default()).is_feasible());
    }

    #[test]
    fn satellite_antenna_gap_below_alpha() {
        let inst = Instance::new(parts(
            vec![task(1, 0, 100, 10, 1), task(2, 0, 100, 8, 1)],
            vec![vtw(0, sat(0, 0), gs(0, 0), 0, 50), vtw(1, sat(0, 0), gs(1, 0), 0, 50)],
            vec![],
            TimingParams { alpha: 5, beta: 0, gamma: 0 },
        ))
        .unwrap();
        let s = Schedule { placements: vec![placement(1, 0, 0, 10), placement(2, 1, 12, 20)], unscheduled: vec![] };
        let report = validate_schedule(&inst, &s);
        assert!(report.has(7), "{report}");
        assert_eq!(report.violations.len(), 1);
    }

    #[test]
    fn ground_antenna_gap_below_gamma() {
        let inst = Instance::new(parts(
            vec![task(1, 0, 100, 10, 1), task(2, 0, 100, 8, 1)],
            vec![vtw(0, sat(0, 0), gs(0, 0), 0, 50), vtw(1, sat(0, 1), gs(0, 0), 0, 50)],
            vec![],
            TimingParams { alpha: 0, beta: 0, gamma: 4 },
        ))
        .unwrap();
        let s = Schedule { placements: vec![placement(1, 0, 0, 10), placement(2, 1, 12, 20)], unscheduled: vec![] };
        let report = validate_schedule(&inst, &s);
        assert!(report.has(8));
        assert!(!report.has(7));
    }

    #[test]
    fn one_antenna_per_satellite_and_station_at_a_time() {
        let inst = Instance::new(parts(
            vec![task(1, 0, 100, 10, 1), task(2, 0, 100, 10, 1)],
            vec![vtw(0, sat(0, 0), gs(0, 0), 0, 50), vtw(1, sat(0, 1), gs(0, 1), 0, 50)],
            vec![],
            zero_timing(),
        ))
        .unwrap();
        let s = Schedule { placements: vec![placement(1, 0, 0, 10), placement(2, 1, 5, 15)], unscheduled: vec![] };
        let report = validate_schedule(&inst, &s);
        assert!(report.has(9));
        assert!(report.has(10));
    }

    #[test]
    fn feed_overlap_below_beta() {
        let inst = Instance::new(parts(
            vec![task(1, 0, 200, 60, 1)],
            vec![vtw(0, sat(0, 0), gs(0, 0), 0, 50)],
            vec![ftw(0, sat(0, 0), fgs(2, 0), 45, 120)],
            TimingParams { alpha: 0, beta: 10, gamma: 0 },
        ))
        .unwrap();
        let p = Placement {
            task: TaskId(1),
            window: WindowId(0),
            feeding_window: Some(FeedWindowId(0)),
            start: 0,
            end: 60,
        };
        let report = validate_schedule(&inst, &Schedule { placements: vec![p], unscheduled: vec![] });
        assert!(report.has(11), "{report}");
        assert!(!report.has(12));
    }

    #[test]
    fn window_and_task_bounds() {
        let inst = Instance::new(parts(
            vec![task(1, 20, 60, 10, 1)],
            vec![vtw(0, sat(0, 0), gs(0, 0), 30, 55)],
            vec![],
            zero_timing(),
        ))
        .unwrap();
        let early = Schedule { placements: vec![placement(1, 0, 10, 20)], unscheduled: vec![] };
        let r = validate_schedule(&inst, &early);
        assert!(r.has(3) && r.has(5));
        let late = Schedule { placements: vec![placement(1, 0, 52, 62)], unscheduled: vec![] };
        let r = validate_schedule(&inst, &late);
        assert!(r.has(2) && r.has(4));
        let twice = Schedule { placements: vec![placement(1, 0, 30, 40)], unscheduled: vec![TaskId(1)] };
        assert!(validate_schedule(&inst, &twice).has(13));
    }

    #[test]
    fn instance_rejects_bad_task_and_feeding_station() {
        let err = Instance::new(parts(vec![task(7, 0, 5, 10, 1)], vec![], vec![], zero_timing())).unwrap_err();
        assert!(err.to_string().contains("task 7"), "{err}");

        let err =
            Instance::new(parts(vec![], vec![], vec![ftw(0, sat(0, 0), fgs(1, 0), 0, 10)], zero_timing())).unwrap_err();
        let InstanceError::Invalid(diags) = err else { panic!() };
        assert!(diags.iter().any(|d| d.path.starts_with("feeding_windows[0]")));
    }
}
