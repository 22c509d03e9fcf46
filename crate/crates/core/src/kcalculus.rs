//! Radar (light-flash) construction of time dilation and length contraction.
//!
//! A stationary observer sits at `x = 0`; a second observer moves along
//! `x = v t`, both clocks reading zero at the origin. A flash emitted at
//! `t = T` travels along `x = c (t - T)`, is received by the moving observer,
//! reflected, and comes back to `x = 0` at `t = k² T`.
//!
//! Everything here is obtained from line intersections and the invariant
//! interval; the closed forms `γ = 1/√(1 - v²/c²)` and `k = √((c+v)/(c-v))`
//! appear only in [`gamma`] and [`bondi_k`], which exist for comparison.

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum KCalculusError {
    #[error("relative speed must satisfy 0 <= v < c (v = {v}, c = {c})")]
    Speed { v: f64, c: f64 },
    #[error("emission time must be positive, got {0}")]
    EmissionTime(f64),
    #[error("rest length must be positive, got {0}")]
    RestLength(f64),
}

/// A point `(t, x)` of the flash diagram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlashEvent {
    pub t: f64,
    pub x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlashExchange {
    /// Emission time on the stationary clock.
    pub emission_time: f64,
    pub v: f64,
    pub c: f64,
    pub emission: FlashEvent,
    pub reception: FlashEvent,
    pub return_event: FlashEvent,
    /// Stationary-frame time assigned to the reception: the foot of the
    /// perpendicular bisector of the emission/return pair, `(T + k²T)/2`.
    pub t1: f64,
    /// Moving clock's reading at the reception, `√(t² - x²/c²)`.
    pub t2: f64,
    /// Bondi factor, `√(t_return / T)`.
    pub k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RulerMeasurement {
    pub rest_length: f64,
    pub v: f64,
    pub length: f64,
}

fn check_speed(v: f64, c: f64) -> Result<(), KCalculusError> {
    if c > 0.0 && c.is_finite() && v >= 0.0 && v < c {
        Ok(())
    } else {
        Err(KCalculusError::Speed { v, c })
    }
}

/// Intersection of `x = a (t - t_a)` with `x = b (t - t_b)`.
fn intersect(a: f64, t_a: f64, b: f64, t_b: f64) -> FlashEvent {
    let t = (a * t_a - b * t_b) / (a - b);
    FlashEvent {
        t,
        x: a * (t - t_a),
    }
}

pub fn simulate_flash(emission_time: f64, v: f64, c: f64) -> Result<FlashExchange, KCalculusError> {
    check_speed(v, c)?;
    if !(emission_time > 0.0 && emission_time.is_finite()) {
        return Err(KCalculusError::EmissionTime(emission_time));
    }
    let emission = FlashEvent {
        t: emission_time,
        x: 0.0,
    };
    // outgoing flash x = c (t - T) against the moving worldline x = v t
    let reception = intersect(c, emission_time, v, 0.0);
    // reflected flash x = x_r - c (t - t_r) meets x = 0 at t = t_r + x_r / c
    let return_event = FlashEvent {
        t: reception.t + reception.x / c,
        x: 0.0,
    };
    let t1 = 0.5 * (emission.t + return_event.t);
    let light_x = reception.x / c;
    let t2 = ((reception.t - light_x) * (reception.t + light_x)).sqrt();
    let k = (return_event.t / emission_time).sqrt();
    Ok(FlashExchange {
        emission_time,
        v,
        c,
        emission,
        reception,
        return_event,
        t1,
        t2,
        k,
    })
}

pub fn dilation_ratio(ex: &FlashExchange) -> f64 {
    ex.t1 / ex.t2
}

/// Length of a ruler of rest length `rest_length` moving at `v`.
///
/// The ruler passes a fixed marker in `L0 / v` of ruler time; the marker's
/// own clock, moving relative to the ruler, runs slow by the simulated
/// dilation ratio, and the measured length is `v` times the marker's reading.
pub fn contracted_length(
    rest_length: f64,
    v: f64,
    c: f64,
) -> Result<RulerMeasurement, KCalculusError> {
    check_speed(v, c)?;
    if !(rest_length > 0.0 && rest_length.is_finite()) {
        return Err(KCalculusError::RestLength(rest_length));
    }
    let ex = simulate_flash(1.0, v, c)?;
    let length = rest_length * ex.t2 / ex.t1;
    Ok(RulerMeasurement {
        rest_length,
        v,
        length,
    })
}

pub fn gamma(v: f64, c: f64) -> f64 {
    1.0 / (1.0 - (v / c) * (v / c)).sqrt()
}

pub fn bondi_k(v: f64, c: f64) -> f64 {
    ((c + v) / (c - v)).sqrt()
}

/// One row of the `beta,k,t1_over_t2,gamma_closed_form,L_over_L0` sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub beta: f64,
    pub k: f64,
    pub t1_over_t2: f64,
    pub gamma_closed_form: f64,
    #[serde(rename = "L_over_L0")]
    pub l_over_l0: f64,
}

impl SweepRow {
    /// Largest deviation among the three checks: dilation vs γ, k² vs
    /// (1+β)/(1-β), and the product law `L·γ = L0`.
    pub fn max_deviation(&self) -> f64 {
        let dil = (self.t1_over_t2 - self.gamma_closed_form).abs();
        let k2 = (self.k * self.k - (1.0 + self.beta) / (1.0 - self.beta)).abs();
        let prod = (self.l_over_l0 * self.gamma_closed_form - 1.0).abs();
        dil.max(k2).max(prod)
    }
}

pub fn sweep(betas: &[f64]) -> Result<Vec<SweepRow>, KCalculusError> {
    betas
        .iter()
        .map(|&beta| {
            let ex = simulate_flash(1.0, beta, 1.0)?;
            let ruler = contracted_length(1.0, beta, 1.0)?;
            Ok(SweepRow {
                beta,
                k: ex.k,
                t1_over_t2: dilation_ratio(&ex),
                gamma_closed_form: gamma(beta, 1.0),
                l_over_l0: ruler.length,
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("beta,k,t1_over_t2,gamma_closed_form,L_over_L0\n");
    for r in rows {
        s.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            r.beta, r.k, r.t1_over_t2, r.gamma_closed_form, r.l_over_l0
        ));
    }
    s
}
