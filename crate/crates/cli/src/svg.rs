//! Minimal SVG renderer: polylines in chart coordinates, auto-fit viewport
//! with a 5% margin, and axis ticks labelled in chart coordinates.

/// One curve to draw; `class` selects the stroke style (primal edges red,
/// dual edges blue, sphere patches dark gray).
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    pub class: &'static str,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 640.0;
const N_TICKS: usize = 5;

fn bounds(polylines: &[Polyline]) -> ([f64; 2], [f64; 2]) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for pl in polylines {
        for p in &pl.points {
            for i in 0..2 {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
    }
    for i in 0..2 {
        if !lo[i].is_finite() || !hi[i].is_finite() {
            lo[i] = 0.0;
            hi[i] = 1.0;
        }
        let span = hi[i] - lo[i];
        let margin = if span > 0.0 { 0.05 * span } else { 0.5 };
        lo[i] -= margin;
        hi[i] += margin;
    }
    (lo, hi)
}

/// Renders the polylines as a standalone SVG document.
pub fn render(polylines: &[Polyline]) -> String {
    let (lo, hi) = bounds(polylines);
    let sx = WIDTH / (hi[0] - lo[0]);
    let sy = HEIGHT / (hi[1] - lo[1]);
    // Map chart coordinates to pixels; SVG's y axis points down.
    let px = |p: &[f64; 2]| {
        (
            (p[0] - lo[0]) * sx,
            HEIGHT - (p[1] - lo[1]) * sy,
        )
    };

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\">\n",
        w = WIDTH,
        h = HEIGHT
    ));
    out.push_str(
        "<style>\n\
         .primal { stroke: #d62728; fill: none; stroke-width: 1.5; }\n\
         .dual { stroke: #1f77b4; fill: none; stroke-width: 1.5; }\n\
         .sphere { stroke: #333333; fill: none; stroke-width: 1.5; }\n\
         .axis { stroke: #999999; stroke-width: 1; }\n\
         .tick { font: 11px sans-serif; fill: #555555; }\n\
         </style>\n",
    );

    // Axis frame and ticks along the bottom and left edges.
    out.push_str(&format!(
        "<rect class=\"axis\" x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"none\"/>\n"
    ));
    for k in 0..=N_TICKS {
        let f = k as f64 / N_TICKS as f64;
        let vx = lo[0] + f * (hi[0] - lo[0]);
        let vy = lo[1] + f * (hi[1] - lo[1]);
        let x = f * WIDTH;
        let y = HEIGHT - f * HEIGHT;
        out.push_str(&format!(
            "<line class=\"axis\" x1=\"{x:.1}\" y1=\"{h}\" x2=\"{x:.1}\" y2=\"{h2}\"/>\n\
             <text class=\"tick\" x=\"{x:.1}\" y=\"{ty}\" text-anchor=\"middle\">{vx:.3}</text>\n",
            h = HEIGHT,
            h2 = HEIGHT - 6.0,
            ty = HEIGHT - 10.0
        ));
        out.push_str(&format!(
            "<line class=\"axis\" x1=\"0\" y1=\"{y:.1}\" x2=\"6\" y2=\"{y:.1}\"/>\n\
             <text class=\"tick\" x=\"10\" y=\"{ly:.1}\">{vy:.3}</text>\n",
            ly = y + 4.0
        ));
    }

    for pl in polylines {
        if pl.points.len() < 2 {
            continue;
        }
        let coords: Vec<String> = pl
            .points
            .iter()
            .map(|p| {
                let (x, y) = px(p);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        out.push_str(&format!(
            "<polyline class=\"{}\" points=\"{}\"/>\n",
            pl.class,
            coords.join(" ")
        ));
    }
    out.push_str("</svg>\n");
    out
}
