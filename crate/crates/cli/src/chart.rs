//! Standalone SVG line charts of supplier counts over time.

use std::fmt::Write;

use chainrisk::TimeSeries;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 130.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

struct Frame {
    x_max: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, period: f64) -> f64 {
        let span = (self.x_max - 1.0).max(1.0);
        LEFT + (period - 1.0) / span * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, value: f64) -> f64 {
        HEIGHT - BOTTOM - value / self.y_max * (HEIGHT - TOP - BOTTOM)
    }
}

fn polyline(frame: &Frame, points: &[(f64, f64)]) -> String {
    points
        .iter()
        .map(|(p, v)| format!("{:.1},{:.1}", frame.x(*p), frame.y(*v)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn y_ticks(y_max: f64) -> Vec<f64> {
    let step = if y_max <= 10.0 {
        2.0
    } else if y_max <= 25.0 {
        5.0
    } else {
        (y_max / 5.0).ceil()
    };
    let mut ticks = Vec::new();
    let mut t = 0.0;
    while t <= y_max + 1e-9 {
        ticks.push(t);
        t += step;
    }
    ticks
}

/// East dashed grey, South black with square markers, total solid red.
pub fn supplier_chart(series: &TimeSeries, run_id: &str) -> String {
    let records = &series.records;
    let top = records.iter().map(|r| r.suppliers_total).max().unwrap_or(0).max(1);
    let frame = Frame {
        x_max: records.len().max(1) as f64,
        y_max: (top as f64 * 1.1).ceil(),
    };
    let east: Vec<_> = records
        .iter()
        .map(|r| (r.period as f64, r.suppliers_east as f64))
        .collect();
    let south: Vec<_> = records
        .iter()
        .map(|r| (r.period as f64, r.suppliers_south as f64))
        .collect();
    let total: Vec<_> = records
        .iter()
        .map(|r| (r.period as f64, r.suppliers_total as f64))
        .collect();

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, "<metadata>run {run_id}; cell {}</metadata>", series.cell_name());
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        series.cell_name()
    );

    let (x0, x1) = (frame.x(1.0), frame.x(frame.x_max));
    let (y0, y1) = (frame.y(0.0), frame.y(frame.y_max));
    let _ = writeln!(s, r#"<g stroke="black" stroke-width="1">"#);
    let _ = writeln!(s, r#"<line x1="{x0:.1}" y1="{y0:.1}" x2="{x1:.1}" y2="{y0:.1}"/>"#);
    let _ = writeln!(s, r#"<line x1="{x0:.1}" y1="{y0:.1}" x2="{x0:.1}" y2="{y1:.1}"/>"#);
    let _ = writeln!(s, "</g>");

    for t in y_ticks(frame.y_max) {
        let y = frame.y(t);
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{y:.1}" x2="{x0:.1}" y2="{y:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" text-anchor="end">{t}</text>"#,
            x0 - 4.0,
            x0 - 7.0,
            y + 4.0
        );
    }
    for r in records.iter().filter(|r| r.period == 1 || r.period % 5 == 0) {
        let x = frame.x(r.period as f64);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.1}" y1="{y0:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            y0 + 4.0,
            y0 + 18.0,
            r.period
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">period</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">suppliers</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    let _ = writeln!(
        s,
        r##"<polyline fill="none" stroke="#d62728" stroke-width="2" points="{}"/>"##,
        polyline(&frame, &total)
    );
    let _ = writeln!(
        s,
        r##"<polyline fill="none" stroke="#808080" stroke-width="2" stroke-dasharray="6 4" points="{}"/>"##,
        polyline(&frame, &east)
    );
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="black" stroke-width="1.5" points="{}"/>"#,
        polyline(&frame, &south)
    );
    let _ = writeln!(s, r#"<g fill="black">"#);
    for (p, v) in &south {
        let _ = writeln!(
            s,
            r#"<rect x="{:.1}" y="{:.1}" width="6" height="6"/>"#,
            frame.x(*p) - 3.0,
            frame.y(*v) - 3.0
        );
    }
    let _ = writeln!(s, "</g>");

    let lx = WIDTH - RIGHT + 15.0;
    let _ = writeln!(
        s,
        r##"<g><line x1="{lx}" y1="60" x2="{}" y2="60" stroke="#808080" stroke-width="2" stroke-dasharray="6 4"/><text x="{}" y="64">East</text>"##,
        lx + 30.0,
        lx + 36.0
    );
    let _ = writeln!(
        s,
        r#"<line x1="{lx}" y1="80" x2="{}" y2="80" stroke="black" stroke-width="1.5"/><rect x="{}" y="77" width="6" height="6"/><text x="{}" y="84">South</text>"#,
        lx + 30.0,
        lx + 12.0,
        lx + 36.0
    );
    let _ = writeln!(
        s,
        r##"<line x1="{lx}" y1="100" x2="{}" y2="100" stroke="#d62728" stroke-width="2"/><text x="{}" y="104">Total</text></g>"##,
        lx + 30.0,
        lx + 36.0
    );
    s.push_str("</svg>\n");
    s
}
