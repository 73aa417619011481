//! Minimal line chart written directly as SVG 1.1 text.

use std::fmt::Write;

const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 52.0;
const TICK: f64 = 5.0;
const LINE_COLOR: &str = "#1f5fa8";

pub struct Chart<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    /// Points with non-finite coordinates are skipped.
    pub points: &'a [(f64, f64)],
    pub log_x: bool,
    pub width: u32,
    pub height: u32,
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(ch),
        }
    }
    out
}

/// Pixel coordinate with two decimals and no negative zero.
fn px(v: f64) -> String {
    let r = (v * 100.0).round() / 100.0;
    format!("{:.2}", if r == 0.0 { 0.0 } else { r })
}

pub fn tick_label(v: f64) -> String {
    let v: f64 = format!("{v:.12e}").parse().unwrap_or(v);
    if v == 0.0 {
        return "0".to_string();
    }
    let mag = v.abs();
    if (1e-3..1e5).contains(&mag) {
        let s = format!("{v:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:e}")
    }
}

/// Step of the form 1, 2 or 5 times a power of ten giving roughly `target` intervals.
fn nice_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let pow = 10f64.powf(raw.log10().floor());
    let frac = raw / pow;
    let m = if frac <= 1.0 {
        1.0
    } else if frac <= 2.0 {
        2.0
    } else if frac <= 5.0 {
        5.0
    } else {
        10.0
    };
    m * pow
}

fn linear_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo, 5.0);
    let first = (lo / step - 1e-9).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn decade_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let first = (lo.log10() - 1e-9).ceil() as i32;
    let last = (hi.log10() + 1e-9).floor() as i32;
    let stride = ((last - first) / 8 + 1).max(1);
    (first..=last)
        .filter(|k| (k - first) % stride == 0)
        .map(|k| 10f64.powi(k))
        .collect()
}

pub fn render(chart: &Chart) -> String {
    let w = chart.width as f64;
    let h = chart.height as f64;
    let plot_w = (w - MARGIN_LEFT - MARGIN_RIGHT).max(1.0);
    let plot_h = (h - MARGIN_TOP - MARGIN_BOTTOM).max(1.0);
    let x0 = MARGIN_LEFT;
    let y0 = MARGIN_TOP + plot_h;

    let pts: Vec<(f64, f64)> = chart
        .points
        .iter()
        .copied()
        .filter(|(x, y)| x.is_finite() && y.is_finite() && (!chart.log_x || *x > 0.0))
        .collect();

    let tx = |x: f64| if chart.log_x { x.log10() } else { x };
    let (mut x_lo, mut x_hi) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(x, _)| {
            (lo.min(x), hi.max(x))
        });
    if x_lo >= x_hi {
        let centre = if x_lo.is_finite() { x_lo } else { 1.0 };
        (x_lo, x_hi) = if chart.log_x {
            (centre / 10.0, centre * 10.0)
        } else {
            (centre - 0.5, centre + 0.5)
        };
    }
    let y_max = pts.iter().map(|p| p.1).fold(0.0f64, f64::max);
    let y_step = if y_max > 0.0 {
        nice_step(y_max, 5.0)
    } else {
        0.2
    };
    let y_hi = if y_max > 0.0 {
        (y_max / y_step - 1e-9).ceil() * y_step
    } else {
        1.0
    };
    let y_lo = 0.0;

    let (tx_lo, tx_hi) = (tx(x_lo), tx(x_hi));
    let sx = |x: f64| x0 + (tx(x) - tx_lo) / (tx_hi - tx_lo) * plot_w;
    let sy = |y: f64| y0 - (y - y_lo) / (y_hi - y_lo) * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#
    );
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        chart.width, chart.height, chart.width, chart.height
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#,
        chart.width, chart.height
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="15">{}</text>"#,
        px(x0 + plot_w / 2.0),
        px(MARGIN_TOP / 2.0 + 5.0),
        escape(chart.title)
    );

    let _ = writeln!(out, r#"<g stroke="black" stroke-width="1" fill="none">"#);
    let _ = writeln!(
        out,
        r#"<path d="M {} {} L {} {} L {} {}"/>"#,
        px(x0),
        px(MARGIN_TOP),
        px(x0),
        px(y0),
        px(x0 + plot_w),
        px(y0)
    );
    let x_ticks = if chart.log_x {
        decade_ticks(x_lo, x_hi)
    } else {
        linear_ticks(x_lo, x_hi)
    };
    let y_ticks = linear_ticks(y_lo, y_hi);
    for &t in &x_ticks {
        let _ = writeln!(
            out,
            r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}"/>"#,
            px(sx(t)),
            px(y0),
            px(y0 + TICK)
        );
    }
    for &t in &y_ticks {
        let _ = writeln!(
            out,
            r#"<line x1="{0}" y1="{2}" x2="{1}" y2="{2}"/>"#,
            px(x0 - TICK),
            px(x0),
            px(sy(t))
        );
    }
    let _ = writeln!(out, "</g>");

    let _ = writeln!(
        out,
        r#"<g font-family="sans-serif" font-size="11" fill="black">"#
    );
    for &t in &x_ticks {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            px(sx(t)),
            px(y0 + TICK + 13.0),
            escape(&tick_label(t))
        );
    }
    for &t in &y_ticks {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            px(x0 - TICK - 3.0),
            px(sy(t) + 4.0),
            escape(&tick_label(t))
        );
    }
    let _ = writeln!(out, "</g>");

    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>"#,
        px(x0 + plot_w / 2.0),
        px(h - 10.0),
        escape(chart.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="{0}" y="{1}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 {0} {1})">{2}</text>"#,
        px(18.0),
        px(MARGIN_TOP + plot_h / 2.0),
        escape(chart.y_label)
    );

    let coords: Vec<String> = pts
        .iter()
        .map(|&(x, y)| format!("{},{}", px(sx(x)), px(sy(y))))
        .collect();
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="{LINE_COLOR}" stroke-width="1.5" points="{}"/>"#,
        coords.join(" ")
    );
    let _ = writeln!(out, "</svg>");
    out
}
