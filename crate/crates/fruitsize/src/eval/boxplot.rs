//! Static SVG box-plot grid of signed size errors: one panel per
//! estimator, one box per retention range. Presentation only; every
//! number is taken from the quartile summaries.

use super::sweep::SummaryEntry;
use super::Estimator;
use std::fmt::Write;

const PANEL_WIDTH: f64 = 260.0;
const PANEL_HEIGHT: f64 = 220.0;
const MARGIN_LEFT: f64 = 56.0;
const MARGIN_TOP: f64 = 40.0;
const PANEL_GAP: f64 = 26.0;
const COLUMNS: usize = 3;

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

/// Renders the summaries as a self-contained SVG document.
pub fn render_boxplot_svg(entries: &[SummaryEntry]) -> String {
    let estimators: Vec<Estimator> = Estimator::all()
        .into_iter()
        .filter(|e| entries.iter().any(|s| s.estimator == *e))
        .collect();
    let mut retentions = Vec::new();
    for e in entries {
        if !retentions.contains(&e.retention) {
            retentions.push(e.retention);
        }
    }

    // Shared y-scale over whisker extents (outliers are counted, not drawn).
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for e in entries {
        if let Some(q) = &e.quartiles {
            y_min = y_min.min(q.whisker_low);
            y_max = y_max.max(q.whisker_high);
        }
    }
    if !y_min.is_finite() || !y_max.is_finite() {
        y_min = -1.0;
        y_max = 1.0;
    }
    if y_max - y_min < 1e-9 {
        y_min -= 1.0;
        y_max += 1.0;
    }
    let pad = 0.06 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    let rows = estimators.len().div_ceil(COLUMNS);
    let total_w = MARGIN_LEFT + COLUMNS as f64 * (PANEL_WIDTH + PANEL_GAP) + 10.0;
    let total_h = MARGIN_TOP + rows as f64 * (PANEL_HEIGHT + PANEL_GAP + 30.0) + 10.0;

    let mut svg = String::new();
    let _ = write!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{total_w:.0}" height="{total_h:.0}" font-family="sans-serif" font-size="11">"##
    );
    let _ = write!(
        svg,
        r##"<rect width="{total_w:.0}" height="{total_h:.0}" fill="white"/>"##
    );
    let _ = write!(
        svg,
        r##"<text x="{:.1}" y="20" font-size="14">Signed size error (mm) by estimator and retention range</text>"##,
        MARGIN_LEFT
    );

    let y_of = |v: f64, top: f64| top + PANEL_HEIGHT * (1.0 - (v - y_min) / (y_max - y_min));

    for (ei, est) in estimators.iter().enumerate() {
        let col = ei % COLUMNS;
        let row = ei / COLUMNS;
        let left = MARGIN_LEFT + col as f64 * (PANEL_WIDTH + PANEL_GAP);
        let top = MARGIN_TOP + row as f64 * (PANEL_HEIGHT + PANEL_GAP + 30.0);

        let _ = write!(
            svg,
            r##"<rect x="{left:.1}" y="{top:.1}" width="{PANEL_WIDTH:.1}" height="{PANEL_HEIGHT:.1}" fill="none" stroke="#444"/>"##
        );
        let _ = write!(
            svg,
            r##"<text x="{:.1}" y="{:.1}" font-weight="bold">{}</text>"##,
            left,
            top - 6.0,
            est.name()
        );
        // Zero-error reference line and axis labels.
        if y_min < 0.0 && y_max > 0.0 {
            let yz = y_of(0.0, top);
            let _ = write!(
                svg,
                r##"<line x1="{left:.1}" y1="{yz:.1}" x2="{:.1}" y2="{yz:.1}" stroke="#bbb" stroke-dasharray="3 3"/>"##,
                left + PANEL_WIDTH
            );
        }
        for (v, anchor_y) in [(y_max, top + 10.0), (y_min, top + PANEL_HEIGHT)] {
            let _ = write!(
                svg,
                r##"<text x="{:.1}" y="{anchor_y:.1}" text-anchor="end">{}</text>"##,
                left - 4.0,
                fmt(v)
            );
        }

        let slot = PANEL_WIDTH / retentions.len().max(1) as f64;
        for (ri, retention) in retentions.iter().enumerate() {
            let Some(entry) = entries
                .iter()
                .find(|s| s.estimator == *est && s.retention == *retention)
            else {
                continue;
            };
            let cx = left + slot * (ri as f64 + 0.5);
            let label = format!(
                "{:.0}-{:.0}",
                100.0 * retention.lower_percentile(),
                100.0 * retention.upper_percentile()
            );
            let _ = write!(
                svg,
                r##"<text x="{cx:.1}" y="{:.1}" text-anchor="middle" font-size="8" transform="rotate(45 {cx:.1} {:.1})">{label}</text>"##,
                top + PANEL_HEIGHT + 14.0,
                top + PANEL_HEIGHT + 14.0
            );
            let Some(q) = &entry.quartiles else { continue };
            let half = slot * 0.30;
            let (yq1, yq2, yq3) = (y_of(q.q1, top), y_of(q.q2, top), y_of(q.q3, top));
            let (ylo, yhi) = (y_of(q.whisker_low, top), y_of(q.whisker_high, top));
            // Whisker stem, caps, box, median.
            let _ = write!(
                svg,
                r##"<line x1="{cx:.1}" y1="{ylo:.1}" x2="{cx:.1}" y2="{yhi:.1}" stroke="#333"/>"##
            );
            for y in [ylo, yhi] {
                let _ = write!(
                    svg,
                    r##"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#333"/>"##,
                    cx - half * 0.6,
                    cx + half * 0.6
                );
            }
            let _ = write!(
                svg,
                r##"<rect x="{:.1}" y="{yq3:.1}" width="{:.1}" height="{:.1}" fill="#9ecae1" stroke="#333"/>"##,
                cx - half,
                2.0 * half,
                (yq1 - yq3).max(0.5)
            );
            let _ = write!(
                svg,
                r##"<line x1="{:.1}" y1="{yq2:.1}" x2="{:.1}" y2="{yq2:.1}" stroke="#000" stroke-width="1.5"/>"##,
                cx - half,
                cx + half
            );
            if q.n_outliers > 0 {
                let _ = write!(
                    svg,
                    r##"<text x="{cx:.1}" y="{:.1}" text-anchor="middle" font-size="7" fill="#a33">{} out</text>"##,
                    top + 10.0,
                    q.n_outliers
                );
            }
        }
    }
    svg.push_str("</svg>\n");
    svg
}
