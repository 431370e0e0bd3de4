//! Plain SVG box plots and bar charts. Output depends only on the input
//! numbers, so figures can be compared byte for byte.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 360.0;
const LEFT: f64 = 56.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 64.0;

/// One box or bar with its label.
#[derive(Clone, Debug, PartialEq)]
pub struct Group {
    pub label: String,
    pub values: Vec<f64>,
}

/// Quantile with linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Frame {
    lo: f64,
    hi: f64,
    slots: usize,
}

impl Frame {
    fn y(&self, v: f64) -> f64 {
        let t = (v.clamp(self.lo, self.hi) - self.lo) / (self.hi - self.lo);
        TOP + (1.0 - t) * (HEIGHT - TOP - BOTTOM)
    }

    fn slot_width(&self) -> f64 {
        (WIDTH - LEFT - RIGHT) / self.slots.max(1) as f64
    }

    fn x_center(&self, i: usize) -> f64 {
        LEFT + self.slot_width() * (i as f64 + 0.5)
    }
}

fn open(out: &mut String, title: &str, frame: &Frame, groups: &[Group]) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title));
    let steps = 4;
    for k in 0..=steps {
        let v = frame.lo + (frame.hi - frame.lo) * k as f64 / steps as f64;
        let y = frame.y(v);
        let _ = writeln!(
            out,
            r##"<line x1="{LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#dddddd"/>"##,
            WIDTH - RIGHT
        );
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.2}</text>"#, LEFT - 6.0, y + 4.0);
    }
    for (i, g) in groups.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            frame.x_center(i),
            HEIGHT - BOTTOM + 16.0,
            escape(&g.label)
        );
        let _ = writeln!(
            out,
            r##"<text x="{:.1}" y="{:.1}" text-anchor="middle" fill="#666666">n={}</text>"##,
            frame.x_center(i),
            HEIGHT - BOTTOM + 30.0,
            g.values.len()
        );
    }
}

/// Box plot of each group over the value range `[lo, hi]`: box from the
/// first to the third quartile, median line, whiskers to the extremes.
pub fn box_plot(title: &str, groups: &[Group], lo: f64, hi: f64) -> String {
    let frame = Frame { lo, hi, slots: groups.len() };
    let mut out = String::new();
    open(&mut out, title, &frame, groups);
    let half = (frame.slot_width() * 0.3).min(28.0);
    for (i, g) in groups.iter().enumerate() {
        if g.values.is_empty() {
            continue;
        }
        let mut v = g.values.clone();
        v.sort_by(f64::total_cmp);
        let x = frame.x_center(i);
        let (q1, q2, q3) = (quantile(&v, 0.25), quantile(&v, 0.5), quantile(&v, 0.75));
        let (min, max) = (v[0], v[v.len() - 1]);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/>"#,
            frame.y(max),
            frame.y(q3)
        );
        let _ = writeln!(
            out,
            r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/>"#,
            frame.y(q1),
            frame.y(min)
        );
        for w in [min, max] {
            let _ = writeln!(
                out,
                r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black"/>"#,
                x - half / 2.0,
                frame.y(w),
                x + half / 2.0,
                frame.y(w)
            );
        }
        let _ = writeln!(
            out,
            r##"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="#9ecae1" stroke="black"/>"##,
            x - half,
            frame.y(q3),
            2.0 * half,
            (frame.y(q1) - frame.y(q3)).max(0.5)
        );
        let _ = writeln!(
            out,
            r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black" stroke-width="2"/>"#,
            x - half,
            frame.y(q2),
            x + half,
            frame.y(q2)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Bar chart with one bar per group, its height the group's first value.
pub fn bar_chart(title: &str, groups: &[Group], lo: f64, hi: f64) -> String {
    let frame = Frame { lo, hi, slots: groups.len() };
    let mut out = String::new();
    open(&mut out, title, &frame, groups);
    let half = (frame.slot_width() * 0.3).min(28.0);
    for (i, g) in groups.iter().enumerate() {
        let Some(&v) = g.values.first() else { continue };
        let x = frame.x_center(i);
        let _ = writeln!(
            out,
            r##"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="#9ecae1" stroke="black"/>"##,
            x - half,
            frame.y(v),
            2.0 * half,
            frame.y(lo) - frame.y(v)
        );
        let _ = writeln!(out, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{v:.2}</text>"#, frame.y(v) - 4.0);
    }
    out.push_str("</svg>\n");
    out
}
