//! Hand-rolled SVG scatter plot of predicted vs observed T_mrt.

use std::fmt::Write;

use mrtforge_core::metrics::MetricsReport;

const W: f64 = 640.0;
const H: f64 = 640.0;
const MARGIN: f64 = 64.0;

/// Builds the scatter SVG with an identity line and an RMSE/R^2
/// annotation (two decimals, matching the metrics report).
pub fn scatter_svg(pairs: &[(f64, f64)], metrics: &MetricsReport) -> String {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &(o, p) in pairs {
        lo = lo.min(o).min(p);
        hi = hi.max(o).max(p);
    }
    let pad = ((hi - lo) * 0.05).max(1.0);
    let lo = lo - pad;
    let hi = hi + pad;
    let span = hi - lo;
    let plot = W - 2.0 * MARGIN;
    let sx = |v: f64| MARGIN + (v - lo) / span * plot;
    let sy = |v: f64| H - MARGIN - (v - lo) / span * plot;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);

    // axes
    let _ = writeln!(
        s,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        MARGIN,
        H - MARGIN,
        W - MARGIN,
        H - MARGIN
    );
    let _ = writeln!(
        s,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        MARGIN,
        MARGIN,
        MARGIN,
        H - MARGIN
    );

    // ticks
    let n_ticks = 6;
    for k in 0..=n_ticks {
        let v = lo + span * k as f64 / n_ticks as f64;
        let x = sx(v);
        let y = sy(v);
        let _ = writeln!(
            s,
            r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="black"/>"#,
            H - MARGIN,
            H - MARGIN + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{}" font-size="12" text-anchor="middle">{v:.0}</text>"#,
            H - MARGIN + 18.0
        );
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="black"/>"#,
            MARGIN - 5.0,
            MARGIN
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{v:.0}</text>"#,
            MARGIN - 8.0,
            y + 4.0
        );
    }

    // identity line
    let _ = writeln!(
        s,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray" stroke-dasharray="6,4"/>"#,
        sx(lo),
        sy(lo),
        sx(hi),
        sy(hi)
    );

    // points
    for &(o, p) in pairs {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue" fill-opacity="0.6"/>"#,
            sx(o),
            sy(p)
        );
    }

    // labels and annotation
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">Observed T_mrt (degC)</text>"#,
        W / 2.0,
        H - 16.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" font-size="14" text-anchor="middle" transform="rotate(-90 18 {})">Predicted T_mrt (degC)</text>"#,
        H / 2.0,
        H / 2.0
    );
    let r2_txt = metrics
        .r2
        .map(|r| format!("{r:.2}"))
        .unwrap_or_else(|| "n/a".into());
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="14">RMSE = {:.2} degC, R2 = {}</text>"#,
        MARGIN + 10.0,
        MARGIN + 20.0,
        metrics.rmse,
        r2_txt
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" fill="gray">n = {}</text>"#,
        MARGIN + 10.0,
        MARGIN + 38.0,
        metrics.n
    );
    s.push_str("</svg>\n");
    s
}
