//! Small dependency-free SVG charts for experiment reports.

use std::fmt::Write;

use super::experiment::{ExperimentReport, RunReport, SweepReport};
use super::metrics::ConfusionMatrix;

const W: f64 = 480.0;
const H: f64 = 320.0;
const PAD: f64 = 48.0;

fn header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\
<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\
<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">{}</text>",
        W / 2.0,
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes(out: &mut String, x_label: &str, y_label: &str) {
    let _ = write!(
        out,
        "<path d=\"M{PAD} {PAD} V{} H{}\" stroke=\"black\" fill=\"none\"/>\
<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\
<text x=\"12\" y=\"{}\" transform=\"rotate(-90 12 {})\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
        H - PAD,
        W - PAD,
        W / 2.0,
        H - 10.0,
        escape(x_label),
        H / 2.0,
        H / 2.0,
        escape(y_label)
    );
}

/// Polyline of `(x, y)` points with y as a percentage.
fn line_chart(title: &str, x_label: &str, points: &[(f64, f64)]) -> String {
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, x_label, "%");
    if !points.is_empty() {
        let (lo, hi) = points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
        let span = if hi > lo { hi - lo } else { 1.0 };
        let sx = |x: f64| PAD + (x - lo) / span * (W - 2.0 * PAD);
        let sy = |y: f64| H - PAD - y.clamp(0.0, 100.0) / 100.0 * (H - 2.0 * PAD);
        let path: Vec<String> = points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = write!(
            out,
            "<polyline points=\"{}\" stroke=\"steelblue\" stroke-width=\"2\" fill=\"none\"/>",
            path.join(" ")
        );
        for &(x, y) in points {
            let _ = write!(
                out,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"steelblue\"/>\
<text x=\"{:.2}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"9\">{}</text>",
                sx(x),
                sy(y),
                sx(x),
                H - PAD + 12.0,
                x
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

pub fn sweep_svg(sweep: &SweepReport) -> String {
    let pts: Vec<(f64, f64)> = sweep.points.iter().map(|p| (p.value as f64, p.recognition)).collect();
    line_chart(&format!("{} recognition", sweep.run), &format!("{:?}", sweep.axis), &pts)
}

pub fn rejection_svg(run: &RunReport) -> String {
    let pts: Vec<(f64, f64)> = run
        .rejection_sweep
        .iter()
        .map(|p| (p.threshold, p.metrics.reliability.unwrap_or(100.0)))
        .collect();
    line_chart(&format!("{} reliability vs threshold", run.name), "margin threshold", &pts)
}

pub fn top_n_svg(run: &RunReport) -> String {
    let pts: Vec<(f64, f64)> = run.top_n.iter().map(|t| (t.n as f64, t.accuracy)).collect();
    line_chart(&format!("{} top-N accuracy", run.name), "N", &pts)
}

/// Heatmap shaded by row share.
pub fn confusion_svg(title: &str, m: &ConfusionMatrix) -> String {
    let n = m.labels.len().max(1);
    let cell = ((W.min(H) - 2.0 * PAD) / n as f64).max(2.0);
    let mut out = String::new();
    header(&mut out, title);
    for (i, row) in m.counts.iter().enumerate() {
        let total: usize = row.iter().sum();
        for (j, &c) in row.iter().enumerate() {
            let share = if total > 0 { c as f64 / total as f64 } else { 0.0 };
            let shade = (255.0 * (1.0 - share)).round() as u8;
            let _ = write!(
                out,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{cell:.2}\" height=\"{cell:.2}\" fill=\"rgb({shade},{shade},255)\"><title>{} / {}: {c}</title></rect>",
                PAD + j as f64 * cell,
                PAD + i as f64 * cell,
                escape(&m.labels[i]),
                escape(&m.labels[j])
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// File name and SVG body for every chart of a report.
pub fn report_charts(report: &ExperimentReport) -> Vec<(String, String)> {
    let mut charts = Vec::new();
    for r in &report.runs {
        charts.push((format!("{}.rejection.svg", r.name), rejection_svg(r)));
        charts.push((format!("{}.topn.svg", r.name), top_n_svg(r)));
        charts.push((format!("{}.confusion.svg", r.name), confusion_svg(&r.name, &r.confusion)));
    }
    for (i, s) in report.sweeps.iter().enumerate() {
        charts.push((format!("sweep{i}.{}.svg", s.run), sweep_svg(s)));
    }
    charts
}
