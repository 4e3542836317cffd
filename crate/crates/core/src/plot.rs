//! Minimal SVG and ASCII line plots.

use std::fmt::Write as _;

use crate::algebra::{g_unchecked, G};
use crate::error::{domain, Result};
use crate::profile::{eta, HedgehogProfile};
use crate::spectra::STABILITY_CSV_HEADER;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 50.0;

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub dashed: bool,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Marker {
    pub x: f64,
    pub y: f64,
    pub label: String,
}

#[derive(Debug, Clone)]
pub struct Figure {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub markers: Vec<Marker>,
}

fn bounds(fig: &Figure) -> (f64, f64, f64, f64) {
    let pts = fig.series.iter().flat_map(|s| s.points.iter().copied()).chain(fig.markers.iter().map(|m| (m.x, m.y)));
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in pts.filter(|(x, y)| x.is_finite() && y.is_finite()) {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x1 > x0) {
        x1 = x0 + 1.0;
    }
    if !(y1 > y0) {
        y1 = y0 + 1.0;
    }
    let dy = 0.05 * (y1 - y0);
    (x0, x1, y0 - dy, y1 + dy)
}

pub fn render_svg(fig: &Figure) -> String {
    let (x0, x1, y0, y1) = bounds(fig);
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, esc(&fig.title));
    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    if y0 < 0.0 && y1 > 0.0 {
        let _ = writeln!(s, r#"<line x1="{PAD}" y1="{0:.2}" x2="{1}" y2="{0:.2}" stroke="gray" stroke-width="0.5"/>"#, sy(0.0), W - PAD);
    }
    for (v, anchor) in [(x0, "start"), (x1, "end")] {
        let _ = writeln!(s, r#"<text x="{:.2}" y="{}" text-anchor="{anchor}" font-size="11">{}</text>"#, sx(v), H - PAD + 15.0, fmt_tick(v));
    }
    for v in [y0, y1] {
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end" font-size="11">{}</text>"#, PAD - 4.0, sy(v) + 4.0, fmt_tick(v));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{}</text>"#, W / 2.0, H - 10.0, esc(&fig.x_label));
    let _ = writeln!(
        s,
        r#"<text x="14" y="{0}" text-anchor="middle" font-size="12" transform="rotate(-90 14 {0})">{1}</text>"#,
        H / 2.0,
        esc(&fig.y_label)
    );
    for (i, ser) in fig.series.iter().enumerate() {
        let pts: Vec<String> = ser
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let dash = if ser.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{}" stroke-width="1.5"{dash} points="{}"/>"#, ser.color, pts.join(" "));
        let ly = PAD + 16.0 + 16.0 * i as f64;
        let _ = writeln!(s, r#"<text x="{}" y="{ly}" font-size="12" fill="{}">{}</text>"#, W - PAD - 150.0, ser.color, esc(&ser.label));
    }
    for m in &fig.markers {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="crimson"/>"#, sx(m.x), sy(m.y));
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#, sx(m.x) + 6.0, sy(m.y) - 6.0, esc(&m.label));
    }
    s.push_str("</svg>\n");
    s
}

/// Character-cell rendering of the first series.
pub fn render_ascii(fig: &Figure, cols: usize, rows: usize) -> String {
    let (x0, x1, y0, y1) = bounds(fig);
    let (cols, rows) = (cols.max(10), rows.max(5));
    let mut grid = vec![vec![' '; cols]; rows];
    let glyphs = ['*', '+', 'o', 'x'];
    for (si, ser) in fig.series.iter().enumerate() {
        for &(x, y) in ser.points.iter().filter(|(x, y)| x.is_finite() && y.is_finite()) {
            let c = (((x - x0) / (x1 - x0)) * (cols - 1) as f64).round() as usize;
            let r = (((y1 - y) / (y1 - y0)) * (rows - 1) as f64).round() as usize;
            grid[r.min(rows - 1)][c.min(cols - 1)] = glyphs[si % glyphs.len()];
        }
    }
    let mut s = format!("{}\n", fig.title);
    for (i, row) in grid.iter().enumerate() {
        let tick = if i == 0 { fmt_tick(y1) } else if i == rows - 1 { fmt_tick(y0) } else { String::new() };
        let _ = writeln!(s, "{tick:>10} |{}", row.iter().collect::<String>());
    }
    let _ = writeln!(s, "{:>10} +{}", "", "-".repeat(cols));
    let _ = writeln!(s, "{:>12}{:<w$}{}", fmt_tick(x0), "", fmt_tick(x1), w = cols.saturating_sub(12));
    for (si, ser) in fig.series.iter().enumerate() {
        let _ = writeln!(s, "  {} {}", glyphs[si % glyphs.len()], ser.label);
    }
    s
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// `G` on `[−1, eps_max]` with its zeros and interior maximum marked.
pub fn g_figure(eps_max: f64, n: usize) -> Result<Figure> {
    if !(eps_max > 0.0) {
        return domain(format!("eps_max must be positive, got {eps_max}"));
    }
    let n = n.max(16);
    let points = (0..n)
        .map(|i| {
            let e = -1.0 + (eps_max + 1.0) * i as f64 / (n - 1) as f64;
            (e, g_unchecked(e))
        })
        .collect();
    Ok(Figure {
        title: "G(eps) = eps^2/4 + 3eps/4 + 1/2 - (eps+1)^(3/2)/2".into(),
        x_label: "eps".into(),
        y_label: "G".into(),
        series: vec![Series { label: "G".into(), color: "steelblue", dashed: false, points }],
        markers: vec![
            Marker { x: -1.0, y: G(-1.0)?, label: "G(-1) = 0".into() },
            Marker { x: -0.75, y: G(-0.75)?, label: "local max".into() },
            Marker { x: 0.0, y: G(0.0)?, label: "G(0) = 0".into() },
        ],
    })
}

/// `h(r)` with the lower barrier `η(r)` overlaid.
pub fn profile_figure(prof: &HedgehogProfile) -> Result<Figure> {
    let r_outer = prof.r_outer;
    let h_pts: Vec<(f64, f64)> = prof.grid.nodes().iter().copied().zip(prof.h.iter().copied()).collect();
    let eta_pts = prof.grid.nodes().iter().map(|&r| eta(r, r_outer).map(|e| (r, e))).collect::<Result<Vec<_>>>()?;
    let floor = vec![(1.0, 2.0 / 3.0), (r_outer, 2.0 / 3.0)];
    Ok(Figure {
        title: format!("hedgehog profile, R = {}, t = {}", r_outer, prof.params.t),
        x_label: "r".into(),
        y_label: "h".into(),
        series: vec![
            Series { label: "h(r)".into(), color: "steelblue", dashed: false, points: h_pts },
            Series { label: "eta(r)".into(), color: "darkorange", dashed: true, points: eta_pts },
            Series { label: "2/3".into(), color: "gray", dashed: true, points: floor },
        ],
        markers: vec![],
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapCell {
    pub r_outer: f64,
    pub t: f64,
    pub verdict: String,
}

pub fn parse_stability_csv(text: &str) -> Result<Vec<MapCell>> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if header.trim() != STABILITY_CSV_HEADER {
        return domain(format!("unexpected stability CSV header: {header}"));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 8 {
                return domain(format!("malformed stability row: {l}"));
            }
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| crate::HedgehogError::Domain(format!("bad number {s:?}")));
            Ok(MapCell { r_outer: num(f[0])?, t: num(f[1])?, verdict: f[7].trim().to_string() })
        })
        .collect()
}

fn verdict_color(v: &str) -> &'static str {
    match v {
        "stable" => "seagreen",
        "unstable" => "firebrick",
        _ => "goldenrod",
    }
}

/// Heat grid of stability verdicts over the `(R, t)` samples.
pub fn map_svg(cells: &[MapCell]) -> Result<String> {
    if cells.is_empty() {
        return domain("empty stability map");
    }
    let mut rs: Vec<f64> = cells.iter().map(|c| c.r_outer).collect();
    let mut ts: Vec<f64> = cells.iter().map(|c| c.t).collect();
    for v in [&mut rs, &mut ts] {
        v.sort_by(f64::total_cmp);
        v.dedup();
    }
    let cw = (W - 2.0 * PAD) / rs.len() as f64;
    let ch = (H - 2.0 * PAD) / ts.len() as f64;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">stability map (R horizontal, t vertical)</text>"#, W / 2.0);
    for c in cells {
        let i = rs.partition_point(|&r| r < c.r_outer);
        let j = ts.partition_point(|&t| t < c.t);
        let x = PAD + i as f64 * cw;
        let y = H - PAD - (j + 1) as f64 * ch;
        let _ = writeln!(
            s,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{cw:.2}" height="{ch:.2}" fill="{}" stroke="white" stroke-width="0.5"><title>R={} t={} {}</title></rect>"#,
            verdict_color(&c.verdict),
            c.r_outer,
            c.t,
            esc(&c.verdict)
        );
    }
    let _ = writeln!(s, r#"<text x="{PAD}" y="{}" font-size="11">R {} .. {}</text>"#, H - PAD + 15.0, rs[0], rs[rs.len() - 1]);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="11" text-anchor="end">t {} .. {}</text>"#, W - PAD, H - PAD + 15.0, ts[0], ts[ts.len() - 1]);
    for (k, v) in ["stable", "unstable", "inconclusive"].iter().enumerate() {
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="11" fill="{}">{v}</text>"#, PAD + 120.0 * k as f64, H - 8.0, verdict_color(v));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn map_ascii(cells: &[MapCell]) -> Result<String> {
    if cells.is_empty() {
        return domain("empty stability map");
    }
    let mut rs: Vec<f64> = cells.iter().map(|c| c.r_outer).collect();
    let mut ts: Vec<f64> = cells.iter().map(|c| c.t).collect();
    for v in [&mut rs, &mut ts] {
        v.sort_by(f64::total_cmp);
        v.dedup();
    }
    let mut grid = vec![vec!['.'; rs.len()]; ts.len()];
    for c in cells {
        let i = rs.partition_point(|&r| r < c.r_outer);
        let j = ts.partition_point(|&t| t < c.t);
        grid[ts.len() - 1 - j][i] = match c.verdict.as_str() {
            "stable" => 'S',
            "unstable" => 'U',
            _ => '?',
        };
    }
    let mut s = String::from("stability map: S stable, U unstable, ? inconclusive\n");
    for (row, j) in grid.iter().zip((0..ts.len()).rev()) {
        let _ = writeln!(s, "t={:>10} {}", fmt_tick(ts[j]), row.iter().collect::<String>());
    }
    let _ = writeln!(s, "R from {} to {}", rs[0], rs[rs.len() - 1]);
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_plot_marks_zeros() {
        let fig = g_figure(3.0, 200).unwrap();
        assert_eq!(fig.markers[0].y, 0.0);
        assert_eq!(fig.markers[2].y, 0.0);
        let svg = render_svg(&fig);
        assert!(svg.starts_with("<svg") && svg.contains("G(0) = 0"));
        assert!(render_ascii(&fig, 60, 15).contains('*'));
        assert!(g_figure(-1.0, 10).is_err());
    }

    #[test]
    fn map_round_trip() {
        let csv = format!("{STABILITY_CSV_HEADER}\n1.5,0,1,2,3,4,nan,stable\n2,0,1,2,3,4,nan,unstable\n");
        let cells = parse_stability_csv(&csv).unwrap();
        assert_eq!(cells.len(), 2);
        assert!(map_svg(&cells).unwrap().contains("firebrick"));
        assert!(map_ascii(&cells).unwrap().contains("SU"));
        assert!(parse_stability_csv("a,b\n").is_err());
    }
}
