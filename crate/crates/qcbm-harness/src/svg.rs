//! Dependency-free SVG rendering of the plot CSV files.
//!
//! Deliberately small: linear axes, one subplot per metric, polylines
//! colored per series. The CSV data files remain the primary output;
//! when a CSV holds nothing renderable these return None and the caller
//! skips the SVG.

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];
const PLOT_W: f64 = 460.0;
const PLOT_H: f64 = 200.0;
const MARGIN_L: f64 = 58.0;
const MARGIN_T: f64 = 30.0;
const GAP: f64 = 44.0;

struct Parsed {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn parse(csv: &str) -> Option<Parsed> {
    let mut lines = csv.lines();
    let header: Vec<String> = lines.next()?.split(',').map(str::to_string).collect();
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .filter(|r: &Vec<String>| r.len() == header.len())
        .collect();
    (!rows.is_empty()).then_some(Parsed { header, rows })
}

impl Parsed {
    fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    if !(hi - lo).is_finite() || hi <= lo {
        return vec![lo];
    }
    (0..=4).map(|i| lo + (hi - lo) * i as f64 / 4.0).collect()
}

fn fmt(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e7 {
        format!("{v}")
    } else {
        format!("{v:.3}")
    }
}

/// One subplot per y column, series split by `series_col`.
pub fn line_chart(
    csv: &str,
    x_col: &str,
    y_cols: &[String],
    series_col: &str,
    title: &str,
) -> Option<String> {
    let parsed = parse(csv)?;
    let xi = parsed.column(x_col)?;
    let si = parsed.column(series_col)?;
    let mut series_names: Vec<String> = Vec::new();
    for row in &parsed.rows {
        if !series_names.contains(&row[si]) {
            series_names.push(row[si].clone());
        }
    }

    let total_h = MARGIN_T + y_cols.len() as f64 * (PLOT_H + GAP) + 10.0;
    let total_w = MARGIN_L + PLOT_W + 30.0;
    let mut out = svg_open(total_w, total_h, title);
    let mut drew_any = false;

    for (plot_idx, y_col) in y_cols.iter().enumerate() {
        let Some(yi) = parsed.column(y_col) else { continue };
        let mut points: Vec<(usize, f64, f64)> = Vec::new(); // series, x, y
        for row in &parsed.rows {
            let (Ok(x), Ok(y)) = (row[xi].parse::<f64>(), row[yi].parse::<f64>()) else {
                continue;
            };
            let s = series_names.iter().position(|n| *n == row[si]).unwrap();
            points.push((s, x, y));
        }
        if points.is_empty() {
            continue;
        }
        drew_any = true;
        let (x_lo, x_hi) = bounds(points.iter().map(|p| p.1));
        let (y_lo, y_hi) = bounds(points.iter().map(|p| p.2));
        let top = MARGIN_T + plot_idx as f64 * (PLOT_H + GAP);
        let sx = |x: f64| MARGIN_L + (x - x_lo) / (x_hi - x_lo).max(1e-300) * PLOT_W;
        let sy = |y: f64| top + PLOT_H - (y - y_lo) / (y_hi - y_lo).max(1e-300) * PLOT_H;

        out.push_str(&format!(
            "<rect x='{MARGIN_L}' y='{top}' width='{PLOT_W}' height='{PLOT_H}' \
             fill='none' stroke='#888'/>\n"
        ));
        out.push_str(&format!(
            "<text x='{MARGIN_L}' y='{}' font-size='13' fill='#444'>{y_col}</text>\n",
            top - 8.0
        ));
        for t in nice_ticks(x_lo, x_hi) {
            out.push_str(&format!(
                "<text x='{}' y='{}' font-size='10' fill='#666' text-anchor='middle'>{}</text>\n",
                sx(t),
                top + PLOT_H + 14.0,
                fmt(t)
            ));
        }
        for t in nice_ticks(y_lo, y_hi) {
            out.push_str(&format!(
                "<text x='{}' y='{}' font-size='10' fill='#666' text-anchor='end'>{}</text>\n",
                MARGIN_L - 5.0,
                sy(t) + 3.5,
                fmt(t)
            ));
        }
        for (s, name) in series_names.iter().enumerate() {
            let color = PALETTE[s % PALETTE.len()];
            let mut path: Vec<(f64, f64)> = points
                .iter()
                .filter(|p| p.0 == s)
                .map(|p| (p.1, p.2))
                .collect();
            path.sort_by(|a, b| a.0.total_cmp(&b.0));
            if path.is_empty() {
                continue;
            }
            let coords: Vec<String> = path
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            out.push_str(&format!(
                "<polyline points='{}' fill='none' stroke='{color}' stroke-width='1.5'/>\n",
                coords.join(" ")
            ));
            if plot_idx == 0 {
                let lx = MARGIN_L + PLOT_W - 90.0;
                let ly = top + 16.0 + s as f64 * 14.0;
                out.push_str(&format!(
                    "<rect x='{lx}' y='{}' width='10' height='3' fill='{color}'/>\
                     <text x='{}' y='{}' font-size='11' fill='#444'>{series_col} {name}</text>\n",
                    ly - 2.0,
                    lx + 14.0,
                    ly + 2.0
                ));
            }
        }
        let x_label_y = top + PLOT_H + 28.0;
        out.push_str(&format!(
            "<text x='{}' y='{x_label_y}' font-size='12' fill='#444' text-anchor='middle'>{x_col}</text>\n",
            MARGIN_L + PLOT_W / 2.0
        ));
    }
    out.push_str("</svg>\n");
    drew_any.then_some(out)
}

pub fn histogram(csv: &str, x_col: &str, y_col: &str, title: &str) -> Option<String> {
    let parsed = parse(csv)?;
    let xi = parsed.column(x_col)?;
    let yi = parsed.column(y_col)?;
    let mut bars: Vec<(f64, f64)> = Vec::new();
    for row in &parsed.rows {
        if let (Ok(x), Ok(y)) = (row[xi].parse::<f64>(), row[yi].parse::<f64>()) {
            bars.push((x, y));
        }
    }
    if bars.is_empty() {
        return None;
    }
    bars.sort_by(|a, b| a.0.total_cmp(&b.0));
    let y_hi = bars.iter().map(|b| b.1).fold(0.0f64, f64::max).max(1e-300);
    let total_h = MARGIN_T + PLOT_H + 50.0;
    let total_w = MARGIN_L + PLOT_W + 30.0;
    let mut out = svg_open(total_w, total_h, title);
    let bar_w = PLOT_W / bars.len() as f64;
    out.push_str(&format!(
        "<rect x='{MARGIN_L}' y='{MARGIN_T}' width='{PLOT_W}' height='{PLOT_H}' \
         fill='none' stroke='#888'/>\n"
    ));
    for (i, &(x, y)) in bars.iter().enumerate() {
        let h = y / y_hi * (PLOT_H - 10.0);
        let bx = MARGIN_L + i as f64 * bar_w;
        out.push_str(&format!(
            "<rect x='{:.2}' y='{:.2}' width='{:.2}' height='{:.2}' fill='{}'/>\n",
            bx + bar_w * 0.1,
            MARGIN_T + PLOT_H - h,
            bar_w * 0.8,
            h,
            PALETTE[0]
        ));
        out.push_str(&format!(
            "<text x='{:.2}' y='{}' font-size='10' fill='#666' text-anchor='middle'>{}</text>\n",
            bx + bar_w / 2.0,
            MARGIN_T + PLOT_H + 14.0,
            fmt(x)
        ));
    }
    for t in nice_ticks(0.0, y_hi) {
        out.push_str(&format!(
            "<text x='{}' y='{:.2}' font-size='10' fill='#666' text-anchor='end'>{}</text>\n",
            MARGIN_L - 5.0,
            MARGIN_T + PLOT_H - t / y_hi * (PLOT_H - 10.0) + 3.5,
            fmt(t)
        ));
    }
    out.push_str(&format!(
        "<text x='{}' y='{}' font-size='12' fill='#444' text-anchor='middle'>{x_col}</text>\n",
        MARGIN_L + PLOT_W / 2.0,
        MARGIN_T + PLOT_H + 32.0
    ));
    out.push_str("</svg>\n");
    Some(out)
}

fn svg_open(w: f64, h: f64, title: &str) -> String {
    format!(
        "<svg xmlns='http://www.w3.org/2000/svg' width='{w:.0}' height='{h:.0}' \
         viewBox='0 0 {w:.0} {h:.0}' font-family='sans-serif'>\n\
         <rect width='100%' height='100%' fill='white'/>\n\
         <text x='{}' y='18' font-size='14' fill='#222'>{title}</text>\n",
        MARGIN_L
    )
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_chart_renders_two_series() {
        let csv = "layers,iteration,f_mean,f_err\n\
                   2,0,0.1,0.01\n2,100,0.2,0.01\n\
                   16,0,0.1,0.02\n16,100,0.5,0.02\n";
        let svg = line_chart(csv, "iteration", &["f_mean".to_string()], "layers", "t").unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn missing_or_empty_columns_yield_none() {
        assert!(line_chart("a,b\n", "a", &["b".to_string()], "a", "t").is_none());
        let csv = "layers,iteration,f_mean\n2,0,\n2,100,\n";
        assert!(line_chart(csv, "iteration", &["f_mean".to_string()], "layers", "t").is_none());
        assert!(line_chart(csv, "no_such", &["f_mean".to_string()], "layers", "t").is_none());
    }

    #[test]
    fn histogram_draws_one_bar_per_bin() {
        let csv = "cost,probability\n-3,0.5\n-2,0.25\n-1,0.0\n";
        let svg = histogram(csv, "cost", "probability", "t").unwrap();
        // frame + 3 bars
        assert_eq!(svg.matches("<rect").count(), 1 + 1 + 3);
    }
}
