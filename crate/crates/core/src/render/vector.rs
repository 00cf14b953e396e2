//! SVG drawings of the flat symbol classes.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::synth::class_outline;

/// The class stroke fitted into a `width x height` mm page, y up.
pub(crate) fn svg(label: &str, width: f64, height: f64) -> Result<String> {
    if !(width > 0.0 && height > 0.0) {
        return Err(Error::Degenerate(format!("{label} needs a positive width and height")));
    }
    let pts = class_outline(label, 200).ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
    let (lo, hi) = pts.iter().fold(
        ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]),
        |(mut lo, mut hi), p| {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
            (lo, hi)
        },
    );
    let map = |v: f64, k: usize, size: f64| {
        if hi[k] > lo[k] {
            (v - lo[k]) / (hi[k] - lo[k]) * size
        } else {
            size / 2.0
        }
    };
    let coords: Vec<String> = pts
        .iter()
        .map(|p| format!("{:.4},{:.4}", map(p[0], 0, width), height - map(p[1], 1, height)))
        .collect();
    let mut out = String::new();
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}mm\" height=\"{height}mm\" viewBox=\"0 0 {width} {height}\">\n\
<title>{label}</title>\n\
<polyline points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"{}\" stroke-linejoin=\"round\"/>\n</svg>\n",
        coords.join(" "),
        (width.max(height) / 100.0).max(0.2)
    );
    Ok(out)
}
