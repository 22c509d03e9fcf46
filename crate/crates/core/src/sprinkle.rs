//! Seeded sprinkling of events into a causal diamond.
//!
//! Points are drawn uniformly in the lightcone square `[-S/2, S/2]²`,
//! scaled by `S` and then rotated by 45° into `(t, x)`. The resulting
//! diamond is `|t| + |x| ≤ S·√2/2`.

use crate::geometry::{from_lightcone, Event, LightconePoint};
use crate::rng::CounterRng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

const STREAM_POINTS: u64 = 0;
const STREAM_COUNT: u64 = 1;
const STREAM_REDRAW: u64 = 2;

const PARALLEL_THRESHOLD: usize = 4096;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SprinkleError {
    #[error("number of points must be at least 1")]
    ZeroPoints,
    #[error("diamond size S must be positive and finite, got {0}")]
    BadSize(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SprinkleMode {
    /// Exactly `n` points.
    #[default]
    Fixed,
    /// `N ~ Poisson(n)` points.
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SprinkleConfig {
    pub n: usize,
    #[serde(rename = "S")]
    pub size: f64,
    pub seed: u64,
    pub mode: SprinkleMode,
}

impl SprinkleConfig {
    pub fn new(n: usize, size: f64, seed: u64) -> Self {
        Self {
            n,
            size,
            seed,
            mode: SprinkleMode::Fixed,
        }
    }

    pub fn with_mode(mut self, mode: SprinkleMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<(), SprinkleError> {
        if self.n == 0 {
            return Err(SprinkleError::ZeroPoints);
        }
        if !(self.size > 0.0 && self.size.is_finite()) {
            return Err(SprinkleError::BadSize(self.size));
        }
        Ok(())
    }
}

/// A sprinkled event set, sorted canonically by `(t, x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sprinkle {
    pub config: SprinkleConfig,
    pub events: Vec<Event>,
}

impl Sprinkle {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string(self)
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

/// Half-diagonal of the diamond of lightcone edge `size`.
pub fn diamond_half_diagonal(size: f64) -> f64 {
    size * FRAC_1_SQRT_2
}

pub fn diamond_contains(size: f64, e: Event) -> bool {
    e.t.abs() + e.x.abs() <= diamond_half_diagonal(size) + 1e-12
}

pub fn sprinkle(config: &SprinkleConfig) -> Result<Sprinkle, SprinkleError> {
    config.validate()?;
    let count = match config.mode {
        SprinkleMode::Fixed => config.n,
        SprinkleMode::Poisson => poisson_count(config),
    };
    let points = draw_points(config, count, count >= PARALLEL_THRESHOLD);
    let events = canonicalize(points, |attempt, index| {
        draw_point(config, STREAM_REDRAW + attempt, index)
    });
    Ok(Sprinkle {
        config: *config,
        events,
    })
}

fn poisson_count(config: &SprinkleConfig) -> usize {
    let mut rng = CounterRng::stream(config.seed, STREAM_COUNT);
    // n >= 1 was validated, so the rate is positive and finite.
    let dist = Poisson::new(config.n as f64).expect("positive Poisson rate");
    dist.sample(&mut rng) as usize
}

fn draw_point(config: &SprinkleConfig, stream: u64, index: u64) -> Event {
    let rng = CounterRng::stream(config.seed, stream);
    let u_minus = config.size * (rng.unit_at(2 * index) - 0.5);
    let u_plus = config.size * (rng.unit_at(2 * index + 1) - 0.5);
    from_lightcone(LightconePoint::new(u_minus, u_plus))
}

fn draw_points(config: &SprinkleConfig, count: usize, parallel: bool) -> Vec<Event> {
    let point = |i: usize| draw_point(config, STREAM_POINTS, i as u64);
    if parallel {
        (0..count).into_par_iter().map(point).collect()
    } else {
        (0..count).map(point).collect()
    }
}

/// Sort canonically and replace exact duplicates. The later draw of a
/// duplicated pair is redrawn from a fresh stream (`attempt` counts from 0).
fn canonicalize(points: Vec<Event>, redraw: impl Fn(u64, u64) -> Event) -> Vec<Event> {
    let mut tagged: Vec<(Event, u64)> = points
        .into_iter()
        .enumerate()
        .map(|(i, e)| (e, i as u64))
        .collect();
    let mut attempt = 0u64;
    loop {
        tagged.sort_by(|a, b| a.0.canonical_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut dup = Vec::new();
        for w in 1..tagged.len() {
            if tagged[w].0 == tagged[w - 1].0 {
                dup.push(w);
            }
        }
        if dup.is_empty() {
            break;
        }
        for w in dup {
            let index = tagged[w].1;
            tagged[w].0 = redraw(attempt, index);
        }
        attempt += 1;
    }
    tagged.into_iter().map(|(e, _)| e).collect()
}
