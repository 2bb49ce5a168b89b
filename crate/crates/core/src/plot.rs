//! Standalone SVG 1.1 emitters: log-log box-counting plots and heatmap
//! renderings of two-axis sweeps (the discrete stand-in for contour plots).

use std::fs;
use std::path::Path;

use crate::boxcover::NbCurve;
use crate::error::{Error, Result};
use crate::experiments::StatsTable;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 50.0;

const PALETTE: &[&str] = &[
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

fn svg_open(out: &mut String) {
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
}

fn text(out: &mut String, x: f64, y: f64, anchor: &str, s: &str) {
    out.push_str(&format!(
        "<text x=\"{x:.1}\" y=\"{y:.1}\" font-family=\"sans-serif\" font-size=\"12\" \
text-anchor=\"{anchor}\">{s}</text>\n"
    ));
}

/// Log-log `N_B(l_B)` plot: one polyline per labelled curve, legend on the
/// right. The point `(1, max N_B)` maps to the top-left corner of the plot
/// area.
pub fn emit_svg_loglog(curves: &[(String, NbCurve)], destination: &Path) -> Result<()> {
    if curves.is_empty() {
        return Err(Error::InvalidParameter("no curves to plot".into()));
    }
    let mut lx_max = f64::MIN;
    let mut ly_min = f64::MAX;
    let mut ly_max = f64::MIN;
    for (_, c) in curves {
        for &(l, nb) in c.points() {
            let lx = (l as f64).log10();
            let ly = nb.log10();
            lx_max = lx_max.max(lx);
            ly_min = ly_min.min(ly);
            ly_max = ly_max.max(ly);
        }
    }
    let lx_min = 0.0; // curves start at l_B = 1
    let lx_span = (lx_max - lx_min).max(1e-9);
    let ly_span = (ly_max - ly_min).max(1e-9);

    let pw = WIDTH - MARGIN_L - MARGIN_R;
    let ph = HEIGHT - MARGIN_T - MARGIN_B;
    let px = |lx: f64| MARGIN_L + (lx - lx_min) / lx_span * pw;
    let py = |ly: f64| MARGIN_T + (ly_max - ly) / ly_span * ph;

    let mut out = String::new();
    svg_open(&mut out);
    out.push_str(&format!(
        "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{pw}\" height=\"{ph}\" \
fill=\"none\" stroke=\"black\"/>\n"
    ));

    // decade ticks
    let mut dec = 0;
    while (dec as f64) <= lx_max + 1e-9 {
        let x = px(dec as f64);
        out.push_str(&format!(
            "<line x1=\"{x:.1}\" y1=\"{:.1}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
            MARGIN_T + ph,
            MARGIN_T + ph + 5.0
        ));
        text(&mut out, x, MARGIN_T + ph + 20.0, "middle", &format!("10^{dec}"));
        dec += 1;
    }
    let mut dec = ly_min.floor() as i64;
    while (dec as f64) <= ly_max + 1e-9 {
        if dec as f64 >= ly_min - 1e-9 {
            let y = py(dec as f64);
            out.push_str(&format!(
                "<line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{MARGIN_L}\" y2=\"{y:.1}\" stroke=\"black\"/>\n",
                MARGIN_L - 5.0
            ));
            text(&mut out, MARGIN_L - 8.0, y + 4.0, "end", &format!("10^{dec}"));
        }
        dec += 1;
    }
    text(
        &mut out,
        MARGIN_L + pw / 2.0,
        HEIGHT - 10.0,
        "middle",
        "l_B (log scale)",
    );

    for (i, (label, curve)) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = curve
            .points()
            .iter()
            .map(|&(l, nb)| format!("{:.2},{:.2}", px((l as f64).log10()), py(nb.log10())))
            .collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            pts.join(" ")
        ));
        let ly = MARGIN_T + 15.0 + 18.0 * i as f64;
        out.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" \
stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            WIDTH - MARGIN_R + 10.0,
            WIDTH - MARGIN_R + 35.0
        ));
        text(&mut out, WIDTH - MARGIN_R + 40.0, ly + 4.0, "start", label);
    }
    out.push_str("</svg>\n");
    fs::write(destination, out).map_err(|e| Error::io(destination, e))
}

/// Linear ramp from blue (minimum) through white to red (maximum).
fn heat_color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let (r, g, b) = if t < 0.5 {
        let u = t * 2.0;
        (
            (59.0 + u * 196.0) as u8,
            (76.0 + u * 179.0) as u8,
            (192.0 + u * 63.0) as u8,
        )
    } else {
        let u = (t - 0.5) * 2.0;
        (
            255.0 as u8,
            (255.0 - u * 179.0) as u8,
            (255.0 - u * 216.0) as u8,
        )
    };
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Heatmap of `metric`'s per-cell mean over a two-axis sweep, with a colour
/// scale bar. Axis 0 runs along x, axis 1 along y.
pub fn emit_svg_contour(table: &StatsTable, metric: &str, destination: &Path) -> Result<()> {
    if table.key_names.len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "heatmap needs a two-axis sweep, got {} key column(s)",
            table.key_names.len()
        )));
    }
    let col = table.column_index(metric).ok_or_else(|| {
        Error::InvalidParameter(format!("unknown metric column '{metric}'"))
    })?;

    let mut xs: Vec<f64> = table.rows.iter().map(|r| r.key[0]).collect();
    let mut ys: Vec<f64> = table.rows.iter().map(|r| r.key[1]).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    ys.sort_by(f64::total_cmp);
    ys.dedup();

    let values: Vec<f64> = table.rows.iter().map(|r| r.stats[col].mean).collect();
    let vmin = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let vmax = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = vmax - vmin;

    let pw = WIDTH - MARGIN_L - MARGIN_R;
    let ph = HEIGHT - MARGIN_T - MARGIN_B;
    let cw = pw / xs.len() as f64;
    let ch = ph / ys.len() as f64;

    let mut out = String::new();
    svg_open(&mut out);
    for (row, &v) in table.rows.iter().zip(&values) {
        let xi = xs.iter().position(|&x| x == row.key[0]).unwrap();
        let yi = ys.iter().position(|&y| y == row.key[1]).unwrap();
        let t = if span == 0.0 { 0.5 } else { (v - vmin) / span };
        let x = MARGIN_L + xi as f64 * cw;
        // larger axis-1 values towards the top
        let y = MARGIN_T + (ys.len() - 1 - yi) as f64 * ch;
        out.push_str(&format!(
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{cw:.2}\" height=\"{ch:.2}\" \
fill=\"{}\" stroke=\"none\"/>\n",
            heat_color(t)
        ));
    }
    for (xi, &x) in xs.iter().enumerate() {
        text(
            &mut out,
            MARGIN_L + (xi as f64 + 0.5) * cw,
            MARGIN_T + ph + 18.0,
            "middle",
            &format!("{x}"),
        );
    }
    for (yi, &y) in ys.iter().enumerate() {
        text(
            &mut out,
            MARGIN_L - 8.0,
            MARGIN_T + (ys.len() - 1 - yi) as f64 * ch + ch / 2.0 + 4.0,
            "end",
            &format!("{y}"),
        );
    }
    text(&mut out, MARGIN_L + pw / 2.0, HEIGHT - 10.0, "middle", &table.key_names[0]);
    text(&mut out, MARGIN_L + pw / 2.0, 18.0, "middle", metric);

    // colour scale
    let bar_x = WIDTH - MARGIN_R + 30.0;
    let steps = 32;
    for i in 0..steps {
        let t = i as f64 / (steps - 1) as f64;
        let y = MARGIN_T + ph - (i as f64 + 1.0) / steps as f64 * ph;
        out.push_str(&format!(
            "<rect x=\"{bar_x:.1}\" y=\"{y:.2}\" width=\"20\" height=\"{:.2}\" \
fill=\"{}\" stroke=\"none\"/>\n",
            ph / steps as f64 + 0.5,
            heat_color(t)
        ));
    }
    text(&mut out, bar_x + 26.0, MARGIN_T + ph, "start", &format!("{vmin:.4}"));
    text(&mut out, bar_x + 26.0, MARGIN_T + 10.0, "start", &format!("{vmax:.4}"));
    out.push_str("</svg>\n");
    fs::write(destination, out).map_err(|e| Error::io(destination, e))
}
