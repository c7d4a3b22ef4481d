//! Minimal self-contained SVG rendering of a classifier response surface
//! with real/fake scatter overlay.
//!
//! The heatmap uses a fixed two-ramp color map over the classifier output:
//! 0 -> rgb(178,24,43) (red, "fake"), 0.5 -> rgb(247,247,247) (white,
//! indifferent), 1 -> rgb(33,102,172) (blue, "real"). Real points are drawn
//! black, generated points green.

use crate::error::{Error, Result};
use crate::eval::GridSpec;
use std::fmt::Write as _;

pub const RAMP_LOW: (u8, u8, u8) = (178, 24, 43);
pub const RAMP_MID: (u8, u8, u8) = (247, 247, 247);
pub const RAMP_HIGH: (u8, u8, u8) = (33, 102, 172);

const REAL_COLOR: &str = "rgb(0,0,0)";
const FAKE_COLOR: &str = "rgb(0,150,40)";

const PLOT: f64 = 600.0;
const MARGIN: f64 = 40.0;

/// Two-ramp interpolation of a classifier output in [0, 1]; inputs outside
/// the range are clamped.
pub fn color_of(value: f64) -> (u8, u8, u8) {
    let v = value.clamp(0.0, 1.0);
    let lerp = |a: u8, b: u8, t: f64| -> u8 { (a as f64 + (b as f64 - a as f64) * t).round() as u8 };
    if v <= 0.5 {
        let t = v / 0.5;
        (
            lerp(RAMP_LOW.0, RAMP_MID.0, t),
            lerp(RAMP_LOW.1, RAMP_MID.1, t),
            lerp(RAMP_LOW.2, RAMP_MID.2, t),
        )
    } else {
        let t = (v - 0.5) / 0.5;
        (
            lerp(RAMP_MID.0, RAMP_HIGH.0, t),
            lerp(RAMP_MID.1, RAMP_HIGH.1, t),
            lerp(RAMP_MID.2, RAMP_HIGH.2, t),
        )
    }
}

/// Renders the surface heatmap with scatter overlay as a standalone SVG
/// document. `values` is the row-major (y-outer) surface over `grid`; `real`
/// and `fake` are flat planar point lists.
pub fn render_figure(
    grid: &GridSpec,
    values: &[f64],
    real: &[f64],
    fake: &[f64],
    title: &str,
) -> Result<String> {
    if values.len() != grid.nx * grid.ny {
        return Err(Error::DimensionMismatch(format!(
            "{} surface values for a {}x{} grid",
            values.len(),
            grid.nx,
            grid.ny
        )));
    }
    if real.len() % 2 != 0 || fake.len() % 2 != 0 {
        return Err(Error::DimensionMismatch(
            "scatter points must be planar".to_string(),
        ));
    }
    let width = PLOT + 2.0 * MARGIN;
    let height = PLOT + 2.0 * MARGIN + 20.0;
    let to_sx = |x: f64| MARGIN + (x - grid.x_min) / (grid.x_max - grid.x_min) * PLOT;
    let to_sy = |y: f64| MARGIN + 20.0 + (grid.y_max - y) / (grid.y_max - grid.y_min) * PLOT;

    let mut out = String::new();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">"
    )
    .expect("string write");
    writeln!(
        out,
        "  <title>{title}</title>\n  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" \
         font-family=\"sans-serif\" font-size=\"16\">{title}</text>",
        width / 2.0,
        MARGIN / 2.0 + 8.0
    )
    .expect("string write");

    let cw = PLOT / grid.nx as f64;
    let ch = PLOT / grid.ny as f64;
    let mut k = 0;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let (r, g, b) = color_of(values[k]);
            k += 1;
            // Row j is the j-th y from the bottom; SVG y grows downward.
            let x = MARGIN + i as f64 * cw;
            let y = MARGIN + 20.0 + PLOT - (j + 1) as f64 * ch;
            writeln!(
                out,
                "  <rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{:.2}\" height=\"{:.2}\" \
                 fill=\"rgb({r},{g},{b})\"/>",
                cw + 0.05,
                ch + 0.05
            )
            .expect("string write");
        }
    }
    for (pts, color, radius) in [(real, REAL_COLOR, 1.6), (fake, FAKE_COLOR, 1.6)] {
        for p in pts.chunks_exact(2) {
            let (sx, sy) = (to_sx(p[0]), to_sy(p[1]));
            if sx < MARGIN || sx > MARGIN + PLOT || sy < MARGIN + 20.0 || sy > MARGIN + 20.0 + PLOT
            {
                continue;
            }
            writeln!(
                out,
                "  <circle cx=\"{sx:.1}\" cy=\"{sy:.1}\" r=\"{radius}\" fill=\"{color}\"/>"
            )
            .expect("string write");
        }
    }
    writeln!(
        out,
        "  <rect x=\"{MARGIN}\" y=\"{}\" width=\"{PLOT}\" height=\"{PLOT}\" fill=\"none\" \
         stroke=\"black\" stroke-width=\"1\"/>",
        MARGIN + 20.0
    )
    .expect("string write");
    out.push_str("</svg>\n");
    Ok(out)
}
