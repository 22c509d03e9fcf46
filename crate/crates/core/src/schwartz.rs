//! Sampled rapidly decaying functions on a uniform grid in one dimension:
//! the seminorms `sup |x^α D^β f|`, the position expectation value, and
//! membership in its preimage of an open window.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const DEFAULT_HALF_WIDTH: f64 = 10.0;
pub const DEFAULT_STEP: f64 = 1.0 / 256.0;
/// Boundary samples must be below this fraction of the peak magnitude.
pub const DECAY_RATIO: f64 = 1e-10;
pub const MAX_ORDER: u32 = 4;
const ZERO_NORM: f64 = 1e-30;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SchwartzError {
    #[error("unsupported seminorm index (alpha = {alpha}, beta = {beta}); both must be <= 4")]
    UnsupportedOrder { alpha: u32, beta: u32 },
    #[error("invalid grid: {0}")]
    BadGrid(String),
    #[error("function does not decay at the grid boundary (|f| = {boundary:e} vs peak {peak:e})")]
    NotDecaying { boundary: f64, peak: f64 },
    #[error("expectation undefined on zero vector")]
    ZeroFunction,
    #[error("functions are sampled on different grids")]
    GridMismatch,
    #[error("{functions} functions but {coeffs} coefficients")]
    LengthMismatch { functions: usize, coeffs: usize },
    #[error("window must satisfy lo < hi (lo = {lo}, hi = {hi})")]
    BadWindow { lo: f64, hi: f64 },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
}

/// Samples of a complex function at `x_i = -R + i·h`, `i = 0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    half_width: f64,
    step: f64,
    values: Vec<Complex64>,
}

fn grid_len(half_width: f64, step: f64) -> Result<usize, SchwartzError> {
    if !(half_width > 0.0 && half_width.is_finite() && step > 0.0 && step.is_finite()) {
        return Err(SchwartzError::BadGrid(format!(
            "need R > 0 and h > 0, got R = {half_width}, h = {step}"
        )));
    }
    let intervals = 2.0 * half_width / step;
    let rounded = intervals.round();
    if (intervals - rounded).abs() > 1e-9 * rounded.max(1.0) {
        return Err(SchwartzError::BadGrid(format!(
            "2R/h = {intervals} is not an integer"
        )));
    }
    let n = rounded as usize + 1;
    if n < 7 {
        return Err(SchwartzError::BadGrid(format!(
            "{n} points is too few for the derivative stencils"
        )));
    }
    Ok(n)
}

impl TestFunction {
    pub fn from_samples(
        half_width: f64,
        step: f64,
        values: Vec<Complex64>,
    ) -> Result<Self, SchwartzError> {
        let n = grid_len(half_width, step)?;
        if values.len() != n {
            return Err(SchwartzError::BadGrid(format!(
                "expected {n} samples, got {}",
                values.len()
            )));
        }
        let f = Self {
            half_width,
            step,
            values,
        };
        f.check_decay()?;
        Ok(f)
    }

    pub fn from_fn(
        half_width: f64,
        step: f64,
        f: impl Fn(f64) -> Complex64,
    ) -> Result<Self, SchwartzError> {
        let n = grid_len(half_width, step)?;
        let values = (0..n).map(|i| f(-half_width + i as f64 * step)).collect();
        Self::from_samples(half_width, step, values)
    }

    /// `exp(-((x - center)/width)²)`.
    pub fn gaussian(
        center: f64,
        width: f64,
        half_width: f64,
        step: f64,
    ) -> Result<Self, SchwartzError> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(SchwartzError::BadGrid(format!(
                "width must be positive, got {width}"
            )));
        }
        Self::from_fn(half_width, step, |x| {
            let u = (x - center) / width;
            Complex64::new((-u * u).exp(), 0.0)
        })
    }

    pub fn zero(half_width: f64, step: f64) -> Result<Self, SchwartzError> {
        Self::from_fn(half_width, step, |_| Complex64::new(0.0, 0.0))
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.step
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.half_width == other.half_width && self.step == other.step && self.len() == other.len()
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn check_decay(&self) -> Result<(), SchwartzError> {
        let peak = self.peak();
        let boundary = self.values[0]
            .norm()
            .max(self.values[self.len() - 1].norm());
        if boundary > DECAY_RATIO * peak {
            return Err(SchwartzError::NotDecaying { boundary, peak });
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,re,im\n");
        for (i, v) in self.values.iter().enumerate() {
            s.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", self.x(i), v.re, v.im));
        }
        s
    }

    /// Parses `x,re,im` rows on a uniform grid symmetric about zero.
    pub fn from_csv(text: &str) -> Result<Self, SchwartzError> {
        let mut rows: Vec<(f64, Complex64)> = Vec::new();
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.replace(' ', "") == "x,re,im" => {}
            Some((i, _)) => return Err(parse_err(i, "expected header `x,re,im`")),
            None => return Err(parse_err(0, "empty input")),
        }
        for (i, line) in lines {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(parse_err(
                    i,
                    &format!("expected 3 fields, found {}", fields.len()),
                ));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(i, &format!("`{s}` is not a finite number")))
            };
            rows.push((
                num(fields[0])?,
                Complex64::new(num(fields[1])?, num(fields[2])?),
            ));
        }
        if rows.len() < 7 {
            return Err(SchwartzError::BadGrid(format!(
                "{} samples is too few",
                rows.len()
            )));
        }
        let n = rows.len();
        let half_width = -rows[0].0;
        let step = (rows[n - 1].0 - rows[0].0) / (n - 1) as f64;
        let tol = 1e-9 * half_width.abs().max(1.0);
        if (rows[n - 1].0 - half_width).abs() > tol {
            return Err(SchwartzError::BadGrid(
                "grid is not symmetric about zero".into(),
            ));
        }
        for (i, (x, _)) in rows.iter().enumerate() {
            if (x - (-half_width + i as f64 * step)).abs() > tol {
                return Err(SchwartzError::BadGrid(format!(
                    "sample {i} is off the uniform grid"
                )));
            }
        }
        Self::from_samples(half_width, step, rows.into_iter().map(|(_, v)| v).collect())
    }
}

fn parse_err(zero_based: usize, message: &str) -> SchwartzError {
    SchwartzError::Parse {
        line: zero_based as u64 + 1,
        message: message.to_string(),
    }
}

/// Multi-index of a seminorm in one dimension: power of `x` and derivative order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeminormIndex {
    pub alpha: u32,
    pub beta: u32,
}

impl SeminormIndex {
    pub fn new(alpha: u32, beta: u32) -> Result<Self, SchwartzError> {
        if alpha > MAX_ORDER || beta > MAX_ORDER {
            return Err(SchwartzError::UnsupportedOrder { alpha, beta });
        }
        Ok(Self { alpha, beta })
    }
}

/// Open interval `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpenWindow {
    lo: f64,
    hi: f64,
}

impl OpenWindow {
    pub fn new(lo: f64, hi: f64) -> Result<Self, SchwartzError> {
        if !(lo < hi) {
            return Err(SchwartzError::BadWindow { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo < v && v < self.hi
    }
}

// Central stencils with O(h⁴) truncation error: (offsets start, weights, divisor).
fn stencil(order: u32) -> (isize, &'static [f64], f64) {
    match order {
        1 => (-2, &[1.0, -8.0, 0.0, 8.0, -1.0], 12.0),
        2 => (-2, &[-1.0, 16.0, -30.0, 16.0, -1.0], 12.0),
        3 => (-3, &[1.0, -8.0, 13.0, 0.0, -13.0, 8.0, -1.0], 8.0),
        4 => (-3, &[-1.0, 12.0, -39.0, 56.0, -39.0, 12.0, -1.0], 6.0),
        _ => unreachable!("order checked by SeminormIndex"),
    }
}

/// `D^order f` at every grid point. Samples beyond the grid are taken as zero.
pub fn derivative(f: &TestFunction, order: u32) -> Result<Vec<Complex64>, SchwartzError> {
    if order > MAX_ORDER {
        return Err(SchwartzError::UnsupportedOrder {
            alpha: 0,
            beta: order,
        });
    }
    if order == 0 {
        return Ok(f.values.clone());
    }
    let (start, weights, divisor) = stencil(order);
    let scale = 1.0 / (divisor * f.step.powi(order as i32));
    let n = f.len() as isize;
    Ok((0..n)
        .map(|i| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (w, off) in weights.iter().zip(start..) {
                let k = i + off;
                if *w != 0.0 && (0..n).contains(&k) {
                    acc += f.values[k as usize] * *w;
                }
            }
            acc * scale
        })
        .collect())
}

/// Supremum of sampled magnitudes.
///
/// The grid maximum is refined by maximizing the quartic through the five
/// samples around it, which recovers a peak lying between grid points.
fn refined_sup(g: &[f64]) -> f64 {
    let raw = g.iter().copied().fold(0.0, f64::max);
    if raw == 0.0 {
        return raw;
    }
    // Every near-tied grid maximum is refined so that rounding cannot pick a different centre.
    let floor = raw * (1.0 - 1e-9);
    g.iter()
        .enumerate()
        .filter(|&(_, &v)| v >= floor)
        .filter_map(|(i, _)| refine_at(g, i))
        .fold(raw, f64::max)
}

fn refine_at(g: &[f64], i: usize) -> Option<f64> {
    if i < 2 || i + 2 >= g.len() {
        return None;
    }
    let (ym2, ym1, y0, y1, y2) = (g[i - 2], g[i - 1], g[i], g[i + 1], g[i + 2]);
    let a1 = (ym2 - 8.0 * ym1 + 8.0 * y1 - y2) / 12.0;
    let a2 = (-ym2 + 16.0 * ym1 - 30.0 * y0 + 16.0 * y1 - y2) / 24.0;
    let a3 = (-ym2 + 2.0 * ym1 - 2.0 * y1 + y2) / 12.0;
    let a4 = (ym2 - 4.0 * ym1 + 6.0 * y0 - 4.0 * y1 + y2) / 24.0;
    let p = |s: f64| y0 + s * (a1 + s * (a2 + s * (a3 + s * a4)));
    let mut s = 0.0;
    for _ in 0..50 {
        let d1 = a1 + s * (2.0 * a2 + s * (3.0 * a3 + s * 4.0 * a4));
        let d2 = 2.0 * a2 + s * (6.0 * a3 + s * 12.0 * a4);
        if d2 >= 0.0 {
            return None;
        }
        let next = s - d1 / d2;
        if !(-1.0..=1.0).contains(&next) {
            return None;
        }
        if (next - s).abs() < 1e-15 {
            s = next;
            break;
        }
        s = next;
    }
    Some(p(s))
}

/// `sup_x |x^α D^β f(x)|` over the grid.
pub fn seminorm(f: &TestFunction, idx: SeminormIndex) -> Result<f64, SchwartzError> {
    let idx = SeminormIndex::new(idx.alpha, idx.beta)?;
    let d = derivative(f, idx.beta)?;
    let g: Vec<f64> = d
        .iter()
        .enumerate()
        .map(|(i, v)| (f.x(i).powi(idx.alpha as i32) * v).norm())
        .collect();
    Ok(refined_sup(&g))
}

/// Composite Simpson rule on uniformly spaced samples; an odd number of
/// intervals closes with the 3/8 rule on the last three.
pub fn simpson(samples: &[f64], h: f64) -> f64 {
    let m = samples.len().saturating_sub(1);
    match m {
        0 => 0.0,
        1 => 0.5 * h * (samples[0] + samples[1]),
        2 => h / 3.0 * (samples[0] + 4.0 * samples[1] + samples[2]),
        _ => {
            let even = if m.is_multiple_of(2) { m } else { m - 3 };
            let mut acc = 0.0;
            if even > 0 {
                let mut s = samples[0] + samples[even];
                for (i, v) in samples.iter().enumerate().take(even).skip(1) {
                    s += if i % 2 == 1 { 4.0 } else { 2.0 } * v;
                }
                acc += h / 3.0 * s;
            }
            if even != m {
                let t = &samples[m - 3..];
                acc += 3.0 * h / 8.0 * (t[0] + 3.0 * t[1] + 3.0 * t[2] + t[3]);
            }
            acc
        }
    }
}

/// `∫ x |f|² dx / ∫ |f|² dx`.
pub fn expectation(f: &TestFunction) -> Result<f64, SchwartzError> {
    let density: Vec<f64> = f.values.iter().map(Complex64::norm_sqr).collect();
    let norm = simpson(&density, f.step);
    if !(norm > ZERO_NORM) {
        return Err(SchwartzError::ZeroFunction);
    }
    let first: Vec<f64> = density
        .iter()
        .enumerate()
        .map(|(i, d)| f.x(i) * d)
        .collect();
    Ok(simpson(&first, f.step) / norm)
}

pub fn in_preimage(f: &TestFunction, window: OpenWindow) -> Result<bool, SchwartzError> {
    Ok(window.contains(expectation(f)?))
}

/// Pointwise `Σ cₖ fₖ`. The result is not re-checked for boundary decay.
pub fn superpose(fs: &[TestFunction], coeffs: &[Complex64]) -> Result<TestFunction, SchwartzError> {
    if fs.len() != coeffs.len() {
        return Err(SchwartzError::LengthMismatch {
            functions: fs.len(),
            coeffs: coeffs.len(),
        });
    }
    let first = fs.first().ok_or(SchwartzError::LengthMismatch {
        functions: 0,
        coeffs: 0,
    })?;
    if fs.iter().any(|g| !g.same_grid(first)) {
        return Err(SchwartzError::GridMismatch);
    }
    let mut values = vec![Complex64::new(0.0, 0.0); first.len()];
    for (g, c) in fs.iter().zip(coeffs) {
        for (acc, v) in values.iter_mut().zip(&g.values) {
            *acc += c * v;
        }
    }
    Ok(TestFunction {
        values,
        ..first.clone()
    })
}
