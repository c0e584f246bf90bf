//! Plain SVG renderings of the CSV data. Decorative only.

use std::fmt::Write;

use crate::config::Scheme;
use crate::experiment::SeriesRow;
use crate::sweep::SweepResult;

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#7f7f7f"];

struct Frame {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        let span = (self.x.1 - self.x.0).max(1e-300);
        self.left + (x - self.x.0) / span * self.width
    }

    fn py(&self, y: f64) -> f64 {
        let span = (self.y.1 - self.y.0).max(1e-300);
        self.top + self.height - (y - self.y.0) / span * self.height
    }

    fn axes(&self, out: &mut String, xlabel: &str, ylabel: &str) {
        let (l, t, w, h) = (self.left, self.top, self.width, self.height);
        let _ = writeln!(out, r##"<rect x="{l}" y="{t}" width="{w}" height="{h}" fill="none" stroke="#333"/>"##);
        for k in 0..=4 {
            let fx = self.x.0 + (self.x.1 - self.x.0) * k as f64 / 4.0;
            let fy = self.y.0 + (self.y.1 - self.y.0) * k as f64 / 4.0;
            let (x, y) = (self.px(fx), self.py(fy));
            let _ = writeln!(
                out,
                r##"<line x1="{x:.1}" y1="{b:.1}" x2="{x:.1}" y2="{b2:.1}" stroke="#333"/><text x="{x:.1}" y="{ty:.1}" font-size="11" text-anchor="middle">{fx:.3}</text>"##,
                b = t + h,
                b2 = t + h + 4.0,
                ty = t + h + 16.0
            );
            let _ = writeln!(
                out,
                r##"<line x1="{l1:.1}" y1="{y:.1}" x2="{l:.1}" y2="{y:.1}" stroke="#333"/><text x="{tx:.1}" y="{yy:.1}" font-size="11" text-anchor="end">{fy:.3}</text>"##,
                l1 = l - 4.0,
                tx = l - 6.0,
                yy = y + 4.0
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{}</text>"#,
            l + w / 2.0,
            t + h + 34.0,
            escape(xlabel)
        );
        let _ = writeln!(
            out,
            r#"<text x="{x:.1}" y="{y:.1}" font-size="12" text-anchor="middle" transform="rotate(-90 {x:.1} {y:.1})">{}</text>"#,
            escape(ylabel),
            x = l - 44.0,
            y = t + h / 2.0
        );
    }

    fn polyline(&self, out: &mut String, xs: &[f64], ys: &[f64], color: &str) {
        let pts: Vec<String> = xs
            .iter()
            .zip(ys)
            .filter(|(_, y)| y.is_finite())
            .map(|(&x, &y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect();
        let _ =
            writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn document(width: f64, height: f64, body: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    )
}

fn legend(out: &mut String, x: f64, y: f64, entries: &[(&str, &str)]) {
    for (k, (name, color)) in entries.iter().enumerate() {
        let yy = y + 16.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{x}" y1="{yy}" x2="{x2}" y2="{yy}" stroke="{color}" stroke-width="2"/><text x="{tx}" y="{ty}" font-size="11">{}</text>"#,
            escape(name),
            x2 = x + 18.0,
            tx = x + 22.0,
            ty = yy + 4.0
        );
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) =
        values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

/// Manifold populations and the no-jump weight against time.
pub fn population_plot(title: &str, rows: &[SeriesRow]) -> String {
    let frame =
        Frame { left: 70.0, top: 40.0, width: 560.0, height: 320.0, x: range(rows.iter().map(|r| r.t)), y: (0.0, 1.0) };
    let mut body = String::new();
    let _ = writeln!(body, r#"<text x="350" y="22" font-size="14" text-anchor="middle">{}</text>"#, escape(title));
    frame.axes(&mut body, "t g", "population");
    let ts: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let names = ["P_I", "P_B", "P_D", "P_E+", "P_E-", "norm"];
    for (k, color) in COLORS.iter().enumerate() {
        let ys: Vec<f64> = rows.iter().map(|r| if k < 5 { r.populations.as_array()[k] } else { r.norm }).collect();
        frame.polyline(&mut body, &ts, &ys, color);
    }
    let entries: Vec<(&str, &str)> = names.iter().copied().zip(COLORS).collect();
    legend(&mut body, 650.0, 60.0, &entries);
    document(740.0, 420.0, &body)
}

fn schemes(result: &SweepResult) -> Vec<Scheme> {
    let mut s: Vec<Scheme> = Vec::new();
    for r in &result.rows {
        if !s.contains(&r.scheme) {
            s.push(r.scheme);
        }
    }
    s
}

/// F and S_fixed against the swept parameter, one line per scheme.
pub fn sweep_lines(result: &SweepResult) -> String {
    let mut body = String::new();
    let x = range(result.x_values.iter().copied());
    let schemes = schemes(result);
    let panels: [(&str, fn(&crate::sweep::SweepRow) -> f64, (f64, f64)); 2] =
        [("F", |r| r.f, (0.0, 1.0)), ("S_fixed", |r| r.s_fixed, (0.0, 2.0 * std::f64::consts::SQRT_2))];
    for (k, (label, get, y)) in panels.into_iter().enumerate() {
        let frame = Frame { left: 70.0 + 380.0 * k as f64, top: 30.0, width: 300.0, height: 260.0, x, y };
        frame.axes(&mut body, result.x_param, label);
        for (scheme, color) in schemes.iter().zip(COLORS) {
            let rows: Vec<_> = result.rows_for(*scheme).collect();
            let xs: Vec<f64> = rows.iter().map(|r| r.x).collect();
            let ys: Vec<f64> = rows.iter().map(|r| get(r)).collect();
            frame.polyline(&mut body, &xs, &ys, color);
        }
    }
    let entries: Vec<(&str, &str)> = schemes.iter().map(|s| s.name()).zip(COLORS).collect();
    legend(&mut body, 770.0, 50.0, &entries);
    document(860.0, 340.0, &body)
}

fn shade(v: f64) -> String {
    if !v.is_finite() {
        return "#cccccc".into();
    }
    // White at F = 0 to dark blue at F = 1.
    let v = v.clamp(0.0, 1.0);
    let c = |a: f64, b: f64| (a + (b - a) * v).round() as u8;
    format!("#{:02x}{:02x}{:02x}", c(255.0, 8.0), c(255.0, 48.0), c(255.0, 107.0))
}

/// F over the two swept parameters, one panel per scheme.
pub fn heatmaps(result: &SweepResult) -> String {
    let mut body = String::new();
    let (nx, ny) = (result.x_values.len(), result.y_values.len());
    let x = range(result.x_values.iter().copied());
    let y = range(result.y_values.iter().copied());
    let schemes = schemes(result);
    for (k, scheme) in schemes.iter().enumerate() {
        let frame = Frame { left: 80.0 + 380.0 * k as f64, top: 40.0, width: 280.0, height: 280.0, x, y };
        let (cw, ch) = (frame.width / nx as f64, frame.height / ny as f64);
        for (i, row) in result.rows_for(*scheme).enumerate() {
            let (ix, iy) = (i / ny, i % ny);
            let _ = writeln!(
                body,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                frame.left + ix as f64 * cw,
                frame.top + frame.height - (iy + 1) as f64 * ch,
                cw + 0.3,
                ch + 0.3,
                shade(row.f)
            );
        }
        frame.axes(&mut body, result.x_param, result.y_param.unwrap_or(""));
        let _ = writeln!(
            body,
            r#"<text x="{:.1}" y="28" font-size="14" text-anchor="middle">F, {}</text>"#,
            frame.left + frame.width / 2.0,
            scheme
        );
    }
    document(80.0 + 380.0 * schemes.len() as f64, 380.0, &body)
}
