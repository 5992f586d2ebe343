//! Minimal SVG line chart of a convergence study: per coefficient, the mean
//! across repeats against subsample size with a mean ± std band.

use std::fmt::Write;

use crate::coefficient::Coefficient;
use crate::resampling::ConvergenceReport;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 160.0;
const MARGIN_TOP: f64 = 24.0;
const MARGIN_BOTTOM: f64 = 48.0;

fn colour(c: Coefficient) -> &'static str {
    match c {
        Coefficient::W => "#1f77b4",
        Coefficient::WTied => "#ff7f0e",
        Coefficient::WWasserstein => "#2ca02c",
    }
}

struct Scale {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Scale {
    fn x(&self, v: f64) -> f64 {
        let span = (self.x_max - self.x_min).max(1.0);
        MARGIN_LEFT + (v - self.x_min) / span * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        let span = self.y_max - self.y_min;
        HEIGHT - MARGIN_BOTTOM - (v - self.y_min) / span * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    step * mag
}

pub fn convergence_svg(report: &ConvergenceReport) -> String {
    let mut sizes = report.sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();

    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for cell in &report.cells {
        lo = lo.min(cell.mean - cell.std);
        hi = hi.max(cell.mean + cell.std);
    }
    if !lo.is_finite() || !hi.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-9 {
        lo -= 0.05;
        hi += 0.05;
    }
    let pad = (hi - lo) * 0.05;
    let scale = Scale {
        x_min: sizes.first().copied().unwrap_or(1) as f64,
        x_max: sizes.last().copied().unwrap_or(1) as f64,
        y_min: lo - pad,
        y_max: hi + pad,
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let (x0, x1) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
    let (y0, y1) = (HEIGHT - MARGIN_BOTTOM, MARGIN_TOP);
    let _ = writeln!(
        svg,
        r#"<path d="M{x0},{y1} L{x0},{y0} L{x1},{y0}" fill="none" stroke="black"/>"#
    );

    let step = nice_step(scale.y_max - scale.y_min);
    let mut tick = (scale.y_min / step).ceil() * step;
    while tick <= scale.y_max {
        let y = scale.y(tick);
        let _ = writeln!(
            svg,
            r##"<line x1="{x0}" y1="{y:.2}" x2="{x1}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{:.3}</text>"##,
            x0 - 6.0,
            y + 4.0,
            tick
        );
        tick += step;
    }
    let x_step = nice_step(scale.x_max - scale.x_min).max(1.0).round();
    let mut xt = (scale.x_min / x_step).ceil() * x_step;
    while xt <= scale.x_max {
        let x = scale.x(xt);
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{xt}</text>"#,
            y0 + 16.0
        );
        xt += x_step;
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">number of tests sampled</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text transform="translate(16,{:.2}) rotate(-90)" text-anchor="middle">randomness coefficient</text>"#,
        (y0 + y1) / 2.0
    );

    for (i, &c) in report.coefficients.iter().enumerate() {
        let pts: Vec<(f64, f64, f64)> = sizes
            .iter()
            .filter_map(|&k| report.cell(k, c))
            .map(|cell| (scale.x(cell.size as f64), cell.mean, cell.std))
            .collect();
        let upper = pts.iter().map(|(x, m, s)| format!("{x:.2},{:.2}", scale.y(m + s)));
        let lower = pts
            .iter()
            .rev()
            .map(|(x, m, s)| format!("{x:.2},{:.2}", scale.y(m - s)));
        let band: Vec<String> = upper.chain(lower).collect();
        let line: Vec<String> = pts
            .iter()
            .map(|(x, m, _)| format!("{x:.2},{:.2}", scale.y(*m)))
            .collect();
        let col = colour(c);
        let _ = writeln!(
            svg,
            r#"<polygon points="{}" fill="{col}" fill-opacity="0.2" stroke="none"/>"#,
            band.join(" ")
        );
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{col}" stroke-width="2"/>"#,
            line.join(" ")
        );
        let ly = MARGIN_TOP + 16.0 + 20.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{col}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{c}</text>"#,
            x1 + 16.0,
            x1 + 40.0,
            x1 + 46.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}
