//! Seeded random instance generator.
//!
//! Randomness comes from ChaCha8 seeded with `seed`; each entity kind draws
//! from its own ChaCha stream (see [`Stream`]), so adding windows never shifts
//! task draws and vice versa. Integer draws use `rand::Rng::random_range`
//! and durations use `rand_distr::Normal`.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::GeneratorError;
use crate::model::{
    AntennaRef, FeedWindowId, FeedingWindow, GroundStation, Instance, InstanceParts, OwnerKind, Satellite, Task,
    TaskId, Time, TimingParams, VisibleWindow, WindowId,
};

/// ChaCha stream number per entity kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Durations = 1,
    Profits = 2,
    TaskIntervals = 3,
    Windows = 4,
    FeedingWindows = 5,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    pub task_count: usize,
    pub satellite_count: u32,
    pub antennas_per_satellite: u32,
    /// Regular (non-feeding) ground stations.
    pub station_count: u32,
    pub antennas_per_station: u32,
    pub feeding_station_count: u32,
    pub horizon_length: Time,
    pub duration_mean: f64,
    pub duration_std: f64,
    pub profit_low: u32,
    pub profit_high: u32,
    pub window_length_range: (Time, Time),
    pub window_gap_range: (Time, Time),
    pub feed_overlap_probability: f64,
    pub timing: TimingParams,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            task_count: 100,
            satellite_count: 5,
            antennas_per_satellite: 2,
            station_count: 3,
            antennas_per_station: 2,
            feeding_station_count: 1,
            horizon_length: 86_400,
            duration_mean: 55.0,
            duration_std: 45.0,
            profit_low: 1,
            profit_high: 19,
            window_length_range: (300, 900),
            window_gap_range: (1800, 5400),
            feed_overlap_probability: 0.3,
            timing: TimingParams { alpha: 300, beta: 30, gamma: 300 },
            seed: 0,
        }
    }
}

impl GeneratorConfig {
    pub fn with_tasks(mut self, task_count: usize) -> Self {
        self.task_count = task_count;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        let bad = |m: &str| Err(GeneratorError::Config(m.to_string()));
        if self.satellite_count == 0 || self.antennas_per_satellite == 0 {
            return bad("satellite and antenna counts must be at least 1");
        }
        if self.station_count == 0 || self.antennas_per_station == 0 {
            return bad("station and antenna counts must be at least 1");
        }
        if self.horizon_length <= 0 {
            return bad("horizon length must be positive");
        }
        if self.duration_std.is_nan() || self.duration_std < 0.0 || !self.duration_mean.is_finite() {
            return bad("duration mean must be finite and std non-negative");
        }
        if self.profit_low > self.profit_high {
            return bad("profit-low exceeds profit-high");
        }
        let (wl, wh) = self.window_length_range;
        let (gl, gh) = self.window_gap_range;
        if wl <= 0 || wl > wh {
            return bad("window length range must be positive and non-empty");
        }
        if gl <= 0 || gl > gh {
            return bad("window gap range must be positive and non-empty");
        }
        if !(0.0..=1.0).contains(&self.feed_overlap_probability) {
            return bad("feed overlap probability must lie in [0, 1]");
        }
        if self.timing.alpha < 0 || self.timing.beta < 0 || self.timing.gamma < 0 {
            return bad("timing parameters must be non-negative");
        }
        if self.horizon_length < wl {
            return Err(GeneratorError::Infeasible(format!(
                "horizon {} is shorter than the shortest window {wl}",
                self.horizon_length
            )));
        }
        Ok(())
    }
}

/// Instance label `A-B`: size and index within that size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InstanceLabel {
    pub size: u32,
    pub index: u32,
}

impl fmt::Display for InstanceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.size, self.index)
    }
}

impl std::str::FromStr for InstanceLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once('-').ok_or_else(|| format!("label {s:?} is not of the form A-B"))?;
        let size: u32 = a.parse().map_err(|_| format!("bad size in label {s:?}"))?;
        let index: u32 = b.parse().map_err(|_| format!("bad index in label {s:?}"))?;
        if size == 0 || index == 0 {
            return Err(format!("label {s:?} must have positive parts"));
        }
        Ok(Self { size, index })
    }
}

/// Draws raw (unrounded, unclipped) durations from the configured normal law.
pub struct DurationSampler {
    normal: Normal<f64>,
    rng: ChaCha8Rng,
}

impl DurationSampler {
    pub fn new(config: &GeneratorConfig) -> Result<Self, GeneratorError> {
        let normal = Normal::new(config.duration_mean, config.duration_std)
            .map_err(|e| GeneratorError::Config(format!("duration distribution: {e}")))?;
        Ok(Self { normal, rng: stream_rng(config.seed, Stream::Durations) })
    }

    pub fn sample_raw(&mut self) -> f64 {
        self.normal.sample(&mut self.rng)
    }

    /// Rounded and clipped to at least one second.
    pub fn sample(&mut self) -> Time {
        (self.sample_raw().round() as Time).max(1)
    }
}

fn gen_tasks(config: &GeneratorConfig) -> Result<Vec<Task>, GeneratorError> {
    let mut durations = DurationSampler::new(config)?;
    let mut profits = stream_rng(config.seed, Stream::Profits);
    let mut intervals = stream_rng(config.seed, Stream::TaskIntervals);
    let horizon = config.horizon_length;
    let mut tasks = Vec::with_capacity(config.task_count);
    for k in 0..config.task_count {
        let duration = durations.sample();
        let profit = profits.random_range(config.profit_low..=config.profit_high);
        let est = intervals.random_range(0..=(horizon - 4 * duration).max(0));
        let latest_end = est + intervals.random_range(2 * duration..=8 * duration);
        tasks.push(Task { id: TaskId(k as u32), est, latest_end, duration, profit });
    }
    Ok(tasks)
}

fn antenna(kind: OwnerKind, owner: u32, index: u32) -> AntennaRef {
    AntennaRef { kind, owner, index }
}

/// Builds a random instance. Deterministic in `config` (seed included).
pub fn generate_instance(config: &GeneratorConfig) -> Result<Instance, GeneratorError> {
    config.validate()?;
    let horizon = config.horizon_length;
    let tasks = gen_tasks(config)?;

    let satellites: Vec<Satellite> =
        (0..config.satellite_count).map(|id| Satellite { id, antennas: config.antennas_per_satellite }).collect();
    let mut ground_stations: Vec<GroundStation> = (0..config.station_count)
        .map(|id| GroundStation { id, antennas: config.antennas_per_station, feeding: false })
        .collect();
    ground_stations.extend((0..config.feeding_station_count).map(|f| GroundStation {
        id: config.station_count + f,
        antennas: config.antennas_per_station,
        feeding: true,
    }));

    let (wl, wh) = config.window_length_range;
    let (gl, gh) = config.window_gap_range;
    let mut wrng = stream_rng(config.seed, Stream::Windows);
    let mut frng = stream_rng(config.seed, Stream::FeedingWindows);
    let mut windows = Vec::new();
    let mut feed_candidates = Vec::new();

    for s in &satellites {
        for sa in 0..s.antennas {
            for g in ground_stations.iter().filter(|g| !g.feeding) {
                for ga in 0..g.antennas {
                    let sat_ref = antenna(OwnerKind::Satellite, s.id, sa);
                    let gnd_ref = antenna(OwnerKind::GroundStation, g.id, ga);
                    let mut t = wrng.random_range(0..=gh);
                    while t < horizon {
                        let mut len = wrng.random_range(wl..=wh);
                        if t + len > horizon {
                            if horizon - t < wl {
                                break;
                            }
                            len = horizon - t;
                        }
                        let (start, end) = (t, t + len);
                        windows.push(VisibleWindow {
                            id: WindowId(windows.len() as u32),
                            satellite_antenna: sat_ref,
                            ground_antenna: gnd_ref,
                            start,
                            end,
                        });

                        if config.feeding_station_count > 0 && frng.random_bool(config.feed_overlap_probability) {
                            // Regular station j is adjacent to feeding station j mod F.
                            let feed_station = config.station_count + g.id % config.feeding_station_count;
                            let feed_ref = antenna(
                                OwnerKind::FeedingGroundStation,
                                feed_station,
                                ga % config.antennas_per_station,
                            );
                            let third_start = start + (2 * len) / 3;
                            let fstart = frng.random_range(third_start..=end - 1);
                            let fend = (end + frng.random_range(wl..=wh)).min(horizon);
                            if fend > end {
                                feed_candidates.push((sat_ref, feed_ref, fstart, fend));
                            }
                        }
                        t = end + wrng.random_range(gl..=gh);
                    }
                }
            }
        }
    }

    // Keep feeding windows on one antenna pair strictly increasing and disjoint.
    feed_candidates.sort_by_key(|&(s, f, start, end)| (s.owner, s.index, f.owner, f.index, start, end));
    let mut feeding_windows: Vec<FeedingWindow> = Vec::new();
    for (sat_ref, feed_ref, start, end) in feed_candidates {
        if let Some(prev) = feeding_windows.last() {
            if prev.satellite_antenna == sat_ref && prev.ground_antenna == feed_ref && start <= prev.end {
                continue;
            }
        }
        feeding_windows.push(FeedingWindow {
            id: FeedWindowId(feeding_windows.len() as u32),
            satellite_antenna: sat_ref,
            ground_antenna: feed_ref,
            start,
            end,
        });
    }

    Instance::new(InstanceParts {
        horizon: (0, horizon),
        timing: config.timing,
        satellites,
        ground_stations,
        tasks,
        windows,
        feeding_windows,
    })
    .map_err(|e| GeneratorError::Invalid(e.to_string()))
}
