//! Task scheduling with feed-switching (TSMFS): turns a task order into a
//! feasible [`Schedule`].
//!
//! Tasks are taken in order. For each one the free pieces of the visible
//! windows are scanned by start time (ties by window id). A task starts at
//! `aest = max(est, piece start)`; it is placed in the piece if it ends by
//! `alet = min(let, piece end)`, and otherwise it may run past the end of the
//! window onto the feeding window bound to it. Either way every antenna it
//! holds must keep its setup gap to earlier placements, and no satellite or
//! station may use two antennas at once. Placed tasks cut their interval
//! (widened by `max(alpha, gamma)`) out of the pool; a feed placement keeps
//! only the part of the window before its start and the part of the feeding
//! window after its end.

use std::collections::BTreeMap;

use smallvec::SmallVec;

use crate::error::DecodeError;
use crate::model::{FeedWindowId, Instance, Placement, Schedule, Side, TaskId, Time, WindowId};

type Pieces = SmallVec<[(Time, Time); 2]>;

/// Binds visible windows to the feeding window a task may switch onto.
///
/// A feeding window qualifies for a visible window when both share the
/// satellite antenna, sit on different stations, overlap by at least `beta`
/// (`vtw.end - ftw.start >= beta`) and the feeding window outlasts the
/// visible one. Among several candidates the one ending last wins, ties by
/// smallest id.
pub fn associate_feed_windows(instance: &Instance) -> BTreeMap<WindowId, FeedWindowId> {
    association_indices(instance)
        .into_iter()
        .enumerate()
        .filter_map(|(w, f)| f.map(|f| (instance.windows()[w].id, instance.feeding_windows()[f].id)))
        .collect()
}

fn association_indices(instance: &Instance) -> Vec<Option<usize>> {
    let beta = instance.timing().beta;
    let mut by_sat_antenna: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for f in 0..instance.feeding_windows().len() {
        by_sat_antenna.entry(instance.feed_resources(f).sat_antenna).or_default().push(f);
    }
    let feeds = instance.feeding_windows();
    instance
        .windows()
        .iter()
        .enumerate()
        .map(|(w, vtw)| {
            let res = instance.window_resources(w);
            by_sat_antenna
                .get(&res.sat_antenna)?
                .iter()
                .copied()
                .filter(|&f| {
                    let ftw = &feeds[f];
                    instance.feed_resources(f).station != res.station
                        && vtw.end - ftw.start >= beta
                        && ftw.end > vtw.end
                })
                .max_by(|&a, &b| feeds[a].end.cmp(&feeds[b].end).then(feeds[b].id.cmp(&feeds[a].id)))
        })
        .collect()
}

/// Sorted busy intervals of one resource.
#[derive(Debug, Clone, Default)]
pub struct AntennaTimeline {
    busy: Vec<(Time, Time)>,
}

impl AntennaTimeline {
    /// Whether `[start, end)` keeps `gap` to every busy interval.
    #[inline]
    pub fn is_free(&self, start: Time, end: Time, gap: Time) -> bool {
        // Busy intervals are disjoint, so ends are sorted along with starts.
        let i = self.busy.partition_point(|&(_, b)| b + gap <= start);
        i == self.busy.len() || self.busy[i].0 >= end + gap
    }

    pub fn insert(&mut self, start: Time, end: Time) {
        let i = self.busy.partition_point(|&(a, _)| a < start);
        self.busy.insert(i, (start, end));
    }

    pub fn intervals(&self) -> &[(Time, Time)] {
        &self.busy
    }
}

/// Free pieces of every visible and feeding window.
#[derive(Debug, Clone)]
pub struct WindowPool {
    vtw: Vec<Pieces>,
    ftw: Vec<Pieces>,
}

impl WindowPool {
    fn new(instance: &Instance) -> Self {
        Self {
            vtw: instance.windows().iter().map(|w| SmallVec::from_slice(&[(w.start, w.end)])).collect(),
            ftw: instance.feeding_windows().iter().map(|w| SmallVec::from_slice(&[(w.start, w.end)])).collect(),
        }
    }

    pub fn window_pieces(&self, window: usize) -> &[(Time, Time)] {
        &self.vtw[window]
    }

    pub fn feed_pieces(&self, feed: usize) -> &[(Time, Time)] {
        &self.ftw[feed]
    }

    /// Total free time over all pieces.
    pub fn free_time(&self) -> Time {
        self.vtw.iter().chain(&self.ftw).flat_map(|p| p.iter()).map(|(a, b)| b - a).sum()
    }
}

/// A free piece the current task could be tried in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Candidate {
    pub piece_start: Time,
    pub window_id: WindowId,
    pub window: usize,
    pub piece: usize,
}

/// A concrete placement ready to be applied to a [`PlanState`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct PlannedPlacement {
    pub task: usize,
    pub window: usize,
    pub piece: usize,
    pub feed: Option<(usize, usize)>,
    pub start: Time,
    pub end: Time,
}

/// Precomputed, read-only lookup tables for one instance.
#[derive(Debug, Clone)]
pub struct Decoder<'a> {
    instance: &'a Instance,
    by_start: Vec<usize>,
    starts: Vec<Time>,
    max_len: Time,
    association: Vec<Option<usize>>,
    template: PlanState,
}

/// Mutable decoding state: window pool plus resource timelines.
#[derive(Debug, Clone)]
pub struct PlanState {
    pool: WindowPool,
    sat_antennas: Vec<AntennaTimeline>,
    ground_antennas: Vec<AntennaTimeline>,
    satellites: Vec<AntennaTimeline>,
    stations: Vec<AntennaTimeline>,
}

impl PlanState {
    pub fn pool(&self) -> &WindowPool {
        &self.pool
    }
}

/// Result of decoding one order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub placements: Vec<Placement>,
    /// Positions (in the instance task list) of tasks that could not be placed, in order.
    pub unscheduled: Vec<usize>,
    pub fitness: u64,
}

impl Decoded {
    pub fn to_schedule(&self, instance: &Instance) -> Schedule {
        Schedule {
            placements: self.placements.clone(),
            unscheduled: self.unscheduled.iter().map(|&i| instance.tasks()[i].id).collect(),
        }
    }
}

impl<'a> Decoder<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        let windows = instance.windows();
        let mut by_start: Vec<usize> = (0..windows.len()).collect();
        by_start.sort_by_key(|&w| (windows[w].start, windows[w].id));
        let starts = by_start.iter().map(|&w| windows[w].start).collect();
        let max_len = windows.iter().map(|w| w.end - w.start).max().unwrap_or(0);
        let template = PlanState {
            pool: WindowPool::new(instance),
            sat_antennas: vec![AntennaTimeline::default(); instance.sat_antenna_count()],
            ground_antennas: vec![AntennaTimeline::default(); instance.ground_antenna_count()],
            satellites: vec![AntennaTimeline::default(); instance.satellites().len()],
            stations: vec![AntennaTimeline::default(); instance.ground_stations().len()],
        };
        Self { instance, by_start, starts, max_len, association: association_indices(instance), template }
    }

    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    /// A fresh state with every window free.
    pub fn initial_state(&self) -> PlanState {
        self.template.clone()
    }

    /// Checks that `order` is a permutation of the instance task ids and
    /// returns the matching task positions.
    pub fn order_indices(&self, order: &[TaskId]) -> Result<Vec<usize>, DecodeError> {
        let n = self.instance.tasks().len();
        if order.len() != n {
            return Err(DecodeError::WrongLength { expected: n, got: order.len() });
        }
        let mut seen = vec![false; n];
        order
            .iter()
            .map(|&id| {
                let i = self.instance.task_index(id).ok_or(DecodeError::UnknownTask(id))?;
                if std::mem::replace(&mut seen[i], true) {
                    return Err(DecodeError::Duplicate(id));
                }
                Ok(i)
            })
            .collect()
    }

    pub fn decode(&self, order: &[TaskId]) -> Result<Schedule, DecodeError> {
        let idx = self.order_indices(order)?;
        Ok(self.decode_indices(&idx).to_schedule(self.instance))
    }

    /// Decodes an order given as task positions. The caller guarantees it is a permutation.
    pub fn decode_indices(&self, order: &[usize]) -> Decoded {
        let mut state = self.initial_state();
        let mut cands = Vec::with_capacity(32);
        let mut placements = Vec::with_capacity(order.len());
        let mut unscheduled = Vec::new();
        let mut fitness = 0u64;
        for &k in order {
            self.candidates(&state, k, &mut cands);
            let planned = cands.iter().find_map(|c| self.evaluate(&state, k, c));
            match planned {
                Some(p) => {
                    placements.push(self.apply(&mut state, &p));
                    fitness += u64::from(self.instance.tasks()[k].profit);
                }
                None => unscheduled.push(k),
            }
        }
        Decoded { placements, unscheduled, fitness }
    }

    /// Free pieces task `k` could use, in scan order.
    pub(crate) fn candidates(&self, state: &PlanState, k: usize, out: &mut Vec<Candidate>) {
        out.clear();
        let task = &self.instance.tasks()[k];
        let latest_start = task.latest_end - task.duration;
        let lo = self.starts.partition_point(|&s| s < task.est - self.max_len);
        let hi = self.starts.partition_point(|&s| s <= latest_start);
        let windows = self.instance.windows();
        for &w in &self.by_start[lo..hi] {
            if windows[w].end < task.est {
                continue;
            }
            for (p, &(ps, pe)) in state.pool.vtw[w].iter().enumerate() {
                if ps <= latest_start && pe >= task.est {
                    out.push(Candidate { piece_start: ps, window_id: windows[w].id, window: w, piece: p });
                }
            }
        }
        out.sort_unstable_by_key(|c| (c.piece_start, c.window_id));
    }

    /// The placement task `k` gets in candidate piece `c`, if any.
    pub(crate) fn evaluate(&self, state: &PlanState, k: usize, c: &Candidate) -> Option<PlannedPlacement> {
        let task = &self.instance.tasks()[k];
        let (ps, pe) = state.pool.vtw[c.window][c.piece];
        let aest = task.est.max(ps);
        let alet = task.latest_end.min(pe);
        let start = aest;
        let end = start + task.duration;
        if alet - aest >= task.duration && self.timelines_free(state, c.window, None, start, end) {
            return Some(PlannedPlacement { task: k, window: c.window, piece: c.piece, feed: None, start, end });
        }

        let vtw_end = self.instance.windows()[c.window].end;
        let f = self.association[c.window]?;
        if pe != vtw_end || start > vtw_end || end > task.latest_end || end < vtw_end {
            return None;
        }
        let anchor = start.max(self.instance.feeding_windows()[f].start);
        let q = state.pool.ftw[f].iter().position(|&(qs, qe)| qs <= anchor && end <= qe)?;
        if !self.timelines_free(state, c.window, Some(f), start, end) {
            return None;
        }
        Some(PlannedPlacement { task: k, window: c.window, piece: c.piece, feed: Some((f, q)), start, end })
    }

    fn timelines_free(&self, state: &PlanState, window: usize, feed: Option<usize>, start: Time, end: Time) -> bool {
        let timing = self.instance.timing();
        self.instance.busy_segments(window, feed, start, end).iter().all(|s| match s.side {
            Side::Satellite => {
                state.sat_antennas[s.antenna].is_free(s.start, s.end, timing.alpha)
                    && state.satellites[s.owner].is_free(s.start, s.end, 0)
            }
            Side::Ground => {
                state.ground_antennas[s.antenna].is_free(s.start, s.end, timing.gamma)
                    && state.stations[s.owner].is_free(s.start, s.end, 0)
            }
        })
    }

    pub(crate) fn apply(&self, state: &mut PlanState, p: &PlannedPlacement) -> Placement {
        let gap = self.instance.timing().pair_gap();
        let pieces = &mut state.pool.vtw[p.window];
        let (ps, pe) = pieces[p.piece];
        let head = (ps, p.start - gap);
        let feed_id = match p.feed {
            None => {
                let tail = (p.end + gap, pe);
                replace_piece(pieces, p.piece, &[head, tail]);
                None
            }
            Some((f, q)) => {
                replace_piece(pieces, p.piece, &[head]);
                let fpieces = &mut state.pool.ftw[f];
                let (_, qe) = fpieces[q];
                replace_piece(fpieces, q, &[(p.end + gap, qe)]);
                Some(self.instance.feeding_windows()[f].id)
            }
        };
        for s in self.instance.busy_segments(p.window, p.feed.map(|(f, _)| f), p.start, p.end) {
            match s.side {
                Side::Satellite => {
                    state.sat_antennas[s.antenna].insert(s.start, s.end);
                    state.satellites[s.owner].insert(s.start, s.end);
                }
                Side::Ground => {
                    state.ground_antennas[s.antenna].insert(s.start, s.end);
                    state.stations[s.owner].insert(s.start, s.end);
                }
            }
        }
        Placement {
            task: self.instance.tasks()[p.task].id,
            window: self.instance.windows()[p.window].id,
            feeding_window: feed_id,
            start: p.start,
            end: p.end,
        }
    }
}

/// Replaces piece `at` by the non-empty entries of `with`, keeping order.
fn replace_piece(pieces: &mut Pieces, at: usize, with: &[(Time, Time)]) {
    pieces.remove(at);
    let mut pos = at;
    for &(a, b) in with {
        if b > a {
            pieces.insert(pos, (a, b));
            pos += 1;
        }
    }
}

/// Convenience wrapper: builds a [`Decoder`] and decodes one order.
pub fn decode(instance: &Instance, order: &[TaskId]) -> Result<Schedule, DecodeError> {
    Decoder::new(instance).decode(order)
}
