//! Scatter plot of a sprinkle in the (x, t) plane.
//!
//! The canvas is a fixed square of [`CANVAS`] pixels with a [`MARGIN`] on
//! every side; the plotted square spans ±1.1 times the diamond half-diagonal
//! in both x and t, so the aspect ratio is exact. Time runs upward. Every
//! event is one `<circle>` of radius [`POINT_RADIUS`]; the diamond outline
//! is a `<polygon>` and the axes are `<line>` elements, so counting circles
//! counts events.

use causet_core::geometry::Event;
use causet_core::sprinkle::diamond_half_diagonal;
use std::fmt::Write;

pub const CANVAS: f64 = 640.0;
pub const MARGIN: f64 = 40.0;
pub const POINT_RADIUS: f64 = 2.0;

pub fn scatter(events: &[Event], size: f64) -> String {
    let half = diamond_half_diagonal(size);
    let extent = 1.1 * half;
    let scale = (CANVAS - 2.0 * MARGIN) / (2.0 * extent);
    let centre = CANVAS / 2.0;
    let px = |x: f64| centre + x * scale;
    let py = |t: f64| centre - t * scale;

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" viewBox="0 0 {CANVAS} {CANVAS}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{CANVAS}" height="{CANVAS}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="gray" stroke-width="1"/>"#,
        px(-extent),
        py(0.0),
        px(extent),
        py(0.0)
    );
    let _ = writeln!(
        out,
        r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="gray" stroke-width="1"/>"#,
        px(0.0),
        py(-extent),
        px(0.0),
        py(extent)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="14">x</text>"#,
        px(extent) + 6.0,
        py(0.0) + 5.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="14">t</text>"#,
        px(0.0) - 4.0,
        py(extent) - 8.0
    );
    let _ = writeln!(
        out,
        r#"<polygon points="{:.3},{:.3} {:.3},{:.3} {:.3},{:.3} {:.3},{:.3}" fill="none" stroke="black" stroke-width="1"/>"#,
        px(0.0),
        py(half),
        px(half),
        py(0.0),
        px(0.0),
        py(-half),
        px(-half),
        py(0.0)
    );
    let _ = writeln!(out, r#"<g fill="steelblue">"#);
    for e in events {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.3}" cy="{:.3}" r="{POINT_RADIUS}"/>"#,
            px(e.x),
            py(e.t)
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</svg>");
    out
}
