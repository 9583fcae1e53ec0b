//! Minimal static SVG line chart (fixed 800x600 viewBox).

pub struct Series {
    pub label: String,
    pub color: String,
    pub points: Vec<(f64, f64)>,
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 770.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 545.0;

/// Render polyline series over x in [0, x_max], y auto-scaled from the data.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series], config: &str) -> String {
    let x_max = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let y_max = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .fold(0.0f64, f64::max)
        .max(1e-12)
        * 1.05;

    let x_px = |x: f64| LEFT + (RIGHT - LEFT) * x / x_max;
    let y_px = |y: f64| BOTTOM - (BOTTOM - TOP) * y / y_max;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str(&format!("<!-- config: {config} -->\n"));
    out.push_str("<rect width=\"800\" height=\"600\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-size=\"18\" font-family=\"sans-serif\">{title}</text>\n"
    ));

    // axes
    out.push_str(&format!(
        "<line x1=\"{LEFT}\" y1=\"{BOTTOM}\" x2=\"{RIGHT}\" y2=\"{BOTTOM}\" stroke=\"black\"/>\n"
    ));
    out.push_str(&format!(
        "<line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{BOTTOM}\" stroke=\"black\"/>\n"
    ));
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let xv = x_max * f;
        let xp = x_px(xv);
        out.push_str(&format!(
            "<line x1=\"{xp:.2}\" y1=\"{BOTTOM}\" x2=\"{xp:.2}\" y2=\"{}\" stroke=\"black\"/>\n",
            BOTTOM + 6.0
        ));
        out.push_str(&format!(
            "<text x=\"{xp:.2}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">{xv:.2}</text>\n",
            BOTTOM + 22.0
        ));
        let yv = y_max * f;
        let yp = y_px(yv);
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{yp:.2}\" x2=\"{LEFT}\" y2=\"{yp:.2}\" stroke=\"black\"/>\n",
            LEFT - 6.0
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">{yv:.2}</text>\n",
            LEFT - 10.0,
            yp + 4.0
        ));
    }
    out.push_str(&format!(
        "<text x=\"420\" y=\"585\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\">{x_label}</text>\n"
    ));
    out.push_str(&format!(
        "<text x=\"20\" y=\"300\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\" transform=\"rotate(-90 20 300)\">{y_label}</text>\n"
    ));

    for s in series {
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", x_px(x), y_px(y)))
            .collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.6\" points=\"{}\"/>\n",
            s.color,
            pts.join(" ")
        ));
    }

    // legend, top right
    for (i, s) in series.iter().enumerate() {
        let y = TOP + 16.0 + 18.0 * i as f64;
        out.push_str(&format!(
            "<line x1=\"640\" y1=\"{y:.2}\" x2=\"668\" y2=\"{y:.2}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
            s.color
        ));
        out.push_str(&format!(
            "<text x=\"674\" y=\"{:.2}\" font-size=\"12\" font-family=\"sans-serif\">{}</text>\n",
            y + 4.0,
            s.label
        ));
    }
    out.push_str("</svg>\n");
    out
}
