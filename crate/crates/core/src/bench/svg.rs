use std::fmt::Write;
use std::path::Path;

use super::{Method, SummaryCell};
use crate::error::{Error, Result};

const PANEL_W: f64 = 480.0;
const PANEL_H: f64 = 360.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const Y_TICKS: usize = 5;

fn color(m: Method) -> &'static str {
    match m {
        Method::Gnn => "#1f77b4",
        Method::Kl => "#d62728",
        Method::Spectral => "#2ca02c",
    }
}

fn label(m: Method) -> &'static str {
    match m {
        Method::Gnn => "GNN",
        Method::Kl => "Kernighan-Lin",
        Method::Spectral => "Spectral",
    }
}

/// A tick label without trailing zeros.
fn tick(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn panel(out: &mut String, x0: f64, title: &str, cells: &[SummaryCell], value: fn(&SummaryCell) -> f64) {
    let methods: Vec<Method> = {
        let mut m: Vec<Method> = cells.iter().map(|c| c.method).collect();
        m.sort();
        m.dedup();
        m
    };
    let mut sizes: Vec<usize> = cells.iter().map(|c| c.nodes).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let (xmin, xmax) = (sizes[0] as f64, *sizes.last().unwrap() as f64);
    let ymax = cells.iter().map(value).filter(|v| v.is_finite()).fold(0.0, f64::max);
    let ymax = if ymax > 0.0 { ymax * 1.1 } else { 1.0 };

    let plot_w = PANEL_W - LEFT - RIGHT;
    let plot_h = PANEL_H - TOP - BOTTOM;
    let px = |n: f64| {
        if xmax > xmin {
            x0 + LEFT + (n - xmin) / (xmax - xmin) * plot_w
        } else {
            x0 + LEFT + plot_w / 2.0
        }
    };
    let py = |v: f64| TOP + plot_h - v / ymax * plot_h;

    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">{title}</text>"#,
        x0 + LEFT + plot_w / 2.0
    );
    let _ = writeln!(
        out,
        r##"<rect x="{:.1}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#000"/>"##,
        x0 + LEFT
    );
    for &n in &sizes {
        let x = px(n as f64);
        let _ = writeln!(
            out,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle" font-size="10">{n}</text>"#,
            TOP + plot_h + 14.0
        );
    }
    for k in 0..=Y_TICKS {
        let v = ymax * k as f64 / Y_TICKS as f64;
        let y = py(v);
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/>"##,
            x0 + LEFT,
            x0 + LEFT + plot_w
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-size="10">{}</text>"#,
            x0 + LEFT - 4.0,
            y + 3.0,
            tick(v)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12">Nodes</text>"#,
        x0 + LEFT + plot_w / 2.0,
        PANEL_H - 12.0
    );
    let ly = TOP + plot_h / 2.0;
    let lx = x0 + 16.0;
    let _ = writeln!(
        out,
        r#"<text x="{lx:.1}" y="{ly:.1}" text-anchor="middle" font-size="12" transform="rotate(-90 {lx:.1} {ly:.1})">{title}</text>"#
    );

    for (i, &m) in methods.iter().enumerate() {
        let mut pts: Vec<(usize, f64)> = cells
            .iter()
            .filter(|c| c.method == m && value(c).is_finite())
            .map(|c| (c.nodes, value(c)))
            .collect();
        pts.sort_by_key(|p| p.0);
        let points: Vec<String> = pts
            .iter()
            .map(|&(n, v)| format!("{:.1},{:.1}", px(n as f64), py(v)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline class="series" data-method="{m}" fill="none" stroke="{}" stroke-width="2" points="{}"/>"#,
            color(m),
            points.join(" ")
        );
        let y = TOP + 14.0 + 16.0 * i as f64;
        let x = x0 + LEFT + plot_w - 110.0;
        let _ = writeln!(
            out,
            r#"<g class="legend"><line x1="{x:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{}" stroke-width="2"/><text x="{:.1}" y="{:.1}" font-size="11">{}</text></g>"#,
            x + 18.0,
            color(m),
            x + 22.0,
            y + 4.0,
            label(m)
        );
    }
}

/// Two side-by-side line charts, cut % and imbalance % against node count,
/// with one polyline per method.
pub fn render_svg(summary: &[SummaryCell]) -> Result<String> {
    if summary.is_empty() {
        return Err(Error::EmptyRows);
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{PANEL_H}" viewBox="0 0 {w} {PANEL_H}">"#,
        w = 2.0 * PANEL_W
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n");
    panel(&mut out, 0.0, "Cut percent", summary, |c| c.mean_cut_percent);
    panel(&mut out, PANEL_W, "Imbalance percent", summary, |c| {
        c.mean_imbalance_percent
    });
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn emit_plot(summary: &[SummaryCell], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let svg = render_svg(summary)?;
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}
