//! Minimal SVG scatter rendering for the map outputs.

use std::collections::BTreeMap;

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 620.0;
const MARGIN: f64 = 40.0;
const LEGEND_WIDTH: f64 = 170.0;

const PALETTE: [&str; 14] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
    "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78", "#000000", "#c49c94",
];

fn scaled(points: &[[f64; 2]]) -> Vec<(f64, f64)> {
    let (mut lo_x, mut hi_x) = (f64::MAX, f64::MIN);
    let (mut lo_y, mut hi_y) = (f64::MAX, f64::MIN);
    for p in points {
        lo_x = lo_x.min(p[0]);
        hi_x = hi_x.max(p[0]);
        lo_y = lo_y.min(p[1]);
        hi_y = hi_y.max(p[1]);
    }
    let span_x = (hi_x - lo_x).max(1e-12);
    let span_y = (hi_y - lo_y).max(1e-12);
    let plot_w = WIDTH - LEGEND_WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    points
        .iter()
        .map(|p| {
            (
                MARGIN + (p[0] - lo_x) / span_x * plot_w,
                MARGIN + (1.0 - (p[1] - lo_y) / span_y) * plot_h,
            )
        })
        .collect()
}

fn document(body: String) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         {body}</svg>\n"
    )
}

/// One circle per point, colored by category, with a legend column.
pub fn scatter_by_category(points: &[[f64; 2]], categories: &[String]) -> String {
    let scaled = scaled(points);
    let mut color_of: BTreeMap<&str, &str> = BTreeMap::new();
    for c in categories {
        let next = PALETTE[color_of.len() % PALETTE.len()];
        color_of.entry(c.as_str()).or_insert(next);
    }
    let mut body = String::new();
    for ((x, y), category) in scaled.iter().zip(categories) {
        body.push_str(&format!(
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"6\" fill=\"{}\" fill-opacity=\"0.85\">\
             <title>{category}</title></circle>\n",
            color_of[category.as_str()]
        ));
    }
    for (k, (name, color)) in color_of.iter().enumerate() {
        let y = MARGIN + 18.0 * k as f64;
        let x = WIDTH - LEGEND_WIDTH;
        body.push_str(&format!(
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"6\" fill=\"{color}\"/>\
             <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" font-family=\"sans-serif\">{name}</text>\n",
            x + 12.0,
            y + 4.0
        ));
    }
    document(body)
}

fn gradient_color(t: f64) -> String {
    // blue (low) through violet to red (high)
    let t = t.clamp(0.0, 1.0);
    let r = (40.0 + 200.0 * t) as u8;
    let g = (60.0 * (1.0 - t)) as u8;
    let b = (220.0 * (1.0 - t) + 35.0) as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// One circle per point colored along a gradient over the value range,
/// with min/max swatches as a legend.
pub fn scatter_by_value(points: &[[f64; 2]], values: &[f64]) -> String {
    let scaled = scaled(points);
    let lo = values.iter().copied().fold(f64::MAX, f64::min);
    let hi = values.iter().copied().fold(f64::MIN, f64::max);
    let span = (hi - lo).max(1e-12);
    let mut body = String::new();
    for ((x, y), v) in scaled.iter().zip(values) {
        body.push_str(&format!(
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"6\" fill=\"{}\" fill-opacity=\"0.9\">\
             <title>{v:.4}</title></circle>\n",
            gradient_color((v - lo) / span)
        ));
    }
    for (k, (value, label)) in [(lo, "min"), (hi, "max")].iter().enumerate() {
        let y = MARGIN + 18.0 * k as f64;
        let x = WIDTH - LEGEND_WIDTH;
        body.push_str(&format!(
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"6\" fill=\"{}\"/>\
             <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" font-family=\"sans-serif\">{label} {value:.3}</text>\n",
            gradient_color((value - lo) / span),
            x + 12.0,
            y + 4.0
        ));
    }
    document(body)
}
