//! Flat (1+1)-dimensional Minkowski geometry in natural units (c = 1).
//!
//! Events carry `(t, x)` coordinates. The line element is `ds² = -dt² + dx²`,
//! so timelike separations have negative `ds²`. Lightcone coordinates are
//! `u⁻ = (t - x)/√2` and `u⁺ = (x + t)/√2`; in them causal precedence is
//! componentwise monotonicity.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::f64::consts::FRAC_1_SQRT_2;

/// Absolute tolerance on `Δt² - Δx²` inside which a separation counts as lightlike.
pub const LIGHTCONE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("superluminal boost: |beta| = {0} must be < 1")]
    SuperluminalBoost(f64),
    #[error("non-finite coordinate in event ({t}, {x})")]
    NonFinite { t: f64, x: f64 },
}

/// A point of (1+1)-dimensional Minkowski space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub x: f64,
}

impl Event {
    pub const fn new(t: f64, x: f64) -> Self {
        Self { t, x }
    }

    /// Like [`Event::new`] but rejects NaN and infinite coordinates.
    pub fn try_new(t: f64, x: f64) -> Result<Self, GeometryError> {
        if t.is_finite() && x.is_finite() {
            Ok(Self { t, x })
        } else {
            Err(GeometryError::NonFinite { t, x })
        }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.is_finite()
    }

    /// Canonical total order: ascending `t`, ties broken by ascending `x`.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.t
            .total_cmp(&other.t)
            .then_with(|| self.x.total_cmp(&other.x))
    }

    /// Squared interval `ds² = -Δt² + Δx²` from `self` to `other`.
    pub fn interval_sq(&self, other: &Self) -> f64 {
        let dt = other.t - self.t;
        let dx = other.x - self.x;
        -dt * dt + dx * dx
    }
}

/// An event expressed in lightcone coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LightconePoint {
    pub u_minus: f64,
    pub u_plus: f64,
}

impl LightconePoint {
    pub const fn new(u_minus: f64, u_plus: f64) -> Self {
        Self { u_minus, u_plus }
    }
}

/// Causal character of the separation from a first event to a second one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IntervalClass {
    FutureTimelike,
    PastTimelike,
    FutureLightlike,
    PastLightlike,
    Spacelike,
    Coincident,
}

impl IntervalClass {
    /// The class of the reversed pair.
    pub fn time_reverse(self) -> Self {
        match self {
            Self::FutureTimelike => Self::PastTimelike,
            Self::PastTimelike => Self::FutureTimelike,
            Self::FutureLightlike => Self::PastLightlike,
            Self::PastLightlike => Self::FutureLightlike,
            Self::Spacelike => Self::Spacelike,
            Self::Coincident => Self::Coincident,
        }
    }

    pub fn is_future_causal(self) -> bool {
        matches!(self, Self::FutureTimelike | Self::FutureLightlike)
    }
}

pub fn to_lightcone(e: Event) -> LightconePoint {
    LightconePoint {
        u_minus: (e.t - e.x) * FRAC_1_SQRT_2,
        u_plus: (e.x + e.t) * FRAC_1_SQRT_2,
    }
}

/// Inverse of [`to_lightcone`]: the 45° rotation
/// `t = (u⁻ + u⁺)/√2`, `x = (-u⁻ + u⁺)/√2`.
pub fn from_lightcone(p: LightconePoint) -> Event {
    Event {
        t: FRAC_1_SQRT_2 * p.u_minus + FRAC_1_SQRT_2 * p.u_plus,
        x: -FRAC_1_SQRT_2 * p.u_minus + FRAC_1_SQRT_2 * p.u_plus,
    }
}

pub fn classify_interval(e1: Event, e2: Event) -> IntervalClass {
    let dt = e2.t - e1.t;
    let dx = e2.x - e1.x;
    let dt2 = dt * dt;
    let dx2 = dx * dx;
    if dt2 + dx2 <= LIGHTCONE_TOLERANCE {
        return IntervalClass::Coincident;
    }
    let timelike_excess = dt2 - dx2;
    if timelike_excess > LIGHTCONE_TOLERANCE {
        if dt > 0.0 {
            IntervalClass::FutureTimelike
        } else {
            IntervalClass::PastTimelike
        }
    } else if timelike_excess < -LIGHTCONE_TOLERANCE {
        IntervalClass::Spacelike
    } else if dt > 0.0 {
        IntervalClass::FutureLightlike
    } else {
        IntervalClass::PastLightlike
    }
}

/// True when `e2` lies in the causal future of `e1` (timelike or lightlike).
pub fn precedes(e1: Event, e2: Event) -> bool {
    classify_interval(e1, e2).is_future_causal()
}

/// True when the pair sits inside the lightcone guard band, where the
/// classification is decided by the tolerance rather than by the data.
pub fn in_lightcone_guard_band(e1: Event, e2: Event) -> bool {
    let dt = e2.t - e1.t;
    let dx = e2.x - e1.x;
    (dt * dt - dx * dx).abs() <= LIGHTCONE_TOLERANCE
}

/// Lorentz boost with velocity `beta`: `t' = γ(t - βx)`, `x' = γ(x - βt)`.
pub fn boost(e: Event, beta: f64) -> Result<Event, GeometryError> {
    if !(beta.abs() < 1.0) {
        return Err(GeometryError::SuperluminalBoost(beta));
    }
    let gamma = 1.0 / (1.0 - beta * beta).sqrt();
    Ok(Event {
        t: gamma * (e.t - beta * e.x),
        x: gamma * (e.x - beta * e.t),
    })
}

/// Serialize events as CSV with a `t,x` header and 17 significant digits.
pub fn write_events_csv<W: std::io::Write>(mut w: W, events: &[Event]) -> std::io::Result<()> {
    writeln!(w, "t,x")?;
    for e in events {
        writeln!(w, "{:.16e},{:.16e}", e.t, e.x)?;
    }
    Ok(())
}

#[derive(Debug, thiserror::Error)]
pub enum EventParseError {
    #[error("events file is empty")]
    Empty,
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// Parse events from CSV with a `t,x` header. Line numbers in errors are 1-based.
pub fn read_events_csv<R: std::io::Read>(r: R) -> Result<Vec<Event>, EventParseError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(r);
    let headers = reader
        .headers()
        .map_err(|e| malformed(1, e.to_string()))?
        .clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(EventParseError::Empty);
    }
    if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "x" {
        return Err(malformed(
            1,
            format!(
                "expected header `t,x`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut events = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            malformed(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != 2 {
            return Err(malformed(
                line,
                format!("expected 2 fields, found {}", record.len()),
            ));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| malformed(line, format!("`{s}` is not a number")))
        };
        let e = Event::new(parse(&record[0])?, parse(&record[1])?);
        if !e.is_finite() {
            return Err(malformed(line, "non-finite coordinate".into()));
        }
        events.push(e);
    }
    if events.is_empty() {
        return Err(EventParseError::Empty);
    }
    Ok(events)
}

fn malformed(line: u64, message: String) -> EventParseError {
    EventParseError::Malformed { line, message }
}
