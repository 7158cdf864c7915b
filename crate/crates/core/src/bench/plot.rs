use super::{BenchError, Summary, TargetState, CHEMICAL_ACCURACY};
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Levels,
    Deviations,
    LogErrors,
}

impl FromStr for PlotKind {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s {
            "levels" => Ok(PlotKind::Levels),
            "deviations" => Ok(PlotKind::Deviations),
            "log-errors" | "log_errors" => Ok(PlotKind::LogErrors),
            other => Err(BenchError::Config(format!("unknown plot kind {other:?}"))),
        }
    }
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 130.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

fn color(s: TargetState) -> &'static str {
    match s {
        TargetState::Ground => "#1f77b4",
        TargetState::Triplet => "#d62728",
        TargetState::Singlet => "#2ca02c",
        TargetState::Doubly => "#9467bd",
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64>) -> Self {
        let (x0, x1) = bounds(xs);
        let (y0, y1) = bounds(ys);
        let pad = 0.05 * (y1 - y0).max(1e-9);
        Self { x0, x1: if x1 > x0 { x1 } else { x0 + 1.0 }, y0: y0 - pad, y1: y1 + pad }
    }
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (W - LEFT - RIGHT)
    }
    fn py(&self, y: f64) -> f64 {
        H - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (H - TOP - BOTTOM)
    }
}

fn bounds(v: impl Iterator<Item = f64>) -> (f64, f64) {
    v.filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

fn axes(out: &mut String, f: &Frame, title: &str, ylabel: &str) {
    let _ = writeln!(out, r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#, W - LEFT - RIGHT, H - TOP - BOTTOM);
    let _ = writeln!(out, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{title}</text>"#, W / 2.0);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">bond length (Å)</text>"#, (LEFT + W - RIGHT) / 2.0, H - 12.0);
    let _ = writeln!(out, r#"<text x="16" y="{}" font-size="12" transform="rotate(-90 16 {})" text-anchor="middle">{ylabel}</text>"#, H / 2.0, H / 2.0);
    for i in 0..=4 {
        let x = f.x0 + (f.x1 - f.x0) * i as f64 / 4.0;
        let y = f.y0 + (f.y1 - f.y0) * i as f64 / 4.0;
        let _ = writeln!(out, r#"<text x="{:.1}" y="{}" text-anchor="middle" font-size="10">{x:.2}</text>"#, f.px(x), H - BOTTOM + 14.0);
        let _ = writeln!(out, r#"<text x="{}" y="{:.1}" text-anchor="end" font-size="10">{y:.3}</text>"#, LEFT - 4.0, f.py(y) + 3.0);
    }
}

fn polyline(out: &mut String, f: &Frame, pts: &[(f64, f64)], stroke: &str, dashed: bool) {
    let path: Vec<String> = pts.iter().filter(|p| p.1.is_finite()).map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y))).collect();
    let dash = if dashed { r#" stroke-dasharray="5,3""# } else { "" };
    let _ = writeln!(out, r#"<polyline class="series" fill="none" stroke="{stroke}"{dash} points="{}"/>"#, path.join(" "));
}

fn legend(out: &mut String, entries: &[(String, &str, bool)]) {
    let _ = writeln!(out, r#"<g class="legend">"#);
    for (i, (name, c, dashed)) in entries.iter().enumerate() {
        let y = TOP + 14.0 + 18.0 * i as f64;
        let x = W - RIGHT + 10.0;
        let dash = if *dashed { r#" stroke-dasharray="5,3""# } else { "" };
        let _ = writeln!(out, r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{c}"{dash}/>"#, x + 20.0);
        let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="11">{name}</text>"#, x + 25.0, y + 4.0);
    }
    let _ = writeln!(out, "</g>");
}

/// Render an SVG document.
pub fn render_plot(summaries: &[Summary], kind: PlotKind) -> Result<String, BenchError> {
    if summaries.is_empty() {
        return Err(BenchError::EmptyCell);
    }
    let mut states: Vec<TargetState> = summaries.iter().map(|s| s.state).collect();
    states.sort();
    states.dedup();
    let of = |st: TargetState| summaries.iter().filter(move |s| s.state == st);
    let xs = summaries.iter().map(|s| s.r);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let mut entries = Vec::new();
    match kind {
        PlotKind::Levels => {
            let f = Frame::new(xs, summaries.iter().flat_map(|s| [s.mean_energy, s.exact]));
            axes(&mut out, &f, "Energy levels", "energy (Hartree)");
            for &st in &states {
                let c = color(st);
                let pts: Vec<_> = of(st).map(|s| (s.r, s.mean_energy)).collect();
                polyline(&mut out, &f, &pts, c, false);
                for &(x, y) in &pts {
                    let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{c}"/>"#, f.px(x), f.py(y));
                }
                polyline(&mut out, &f, &of(st).map(|s| (s.r, s.exact)).collect::<Vec<_>>(), c, true);
                entries.push((st.to_string(), c, false));
                entries.push((format!("{st} exact"), c, true));
            }
        }
        PlotKind::Deviations => {
            let ys = summaries.iter().flat_map(|s| {
                s.deviations.iter().copied().chain([s.std_dev, -s.std_dev])
            });
            let f = Frame::new(xs, ys);
            axes(&mut out, &f, "Deviation from the mean", "energy − mean (Hartree)");
            for &st in &states {
                let c = color(st);
                for s in of(st) {
                    let x = f.px(s.r);
                    let _ = writeln!(out, r#"<line class="sigma" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{c}"/>"#, f.py(s.std_dev), f.py(-s.std_dev));
                    for d in &s.deviations {
                        let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{:.2}" r="2" fill="{c}"/>"#, f.py(*d));
                    }
                }
                entries.push((st.to_string(), c, false));
            }
        }
        PlotKind::LogErrors => {
            let chem = CHEMICAL_ACCURACY.log10();
            let ys = summaries.iter().flat_map(|s| [s.log_error, s.min_log_error, s.max_log_error]).chain([chem]);
            let f = Frame::new(xs, ys);
            axes(&mut out, &f, "log10 |E − E_exact|", "log10 error");
            for &st in &states {
                let c = color(st);
                let pts: Vec<_> = of(st).map(|s| (s.r, s.log_error)).collect();
                polyline(&mut out, &f, &pts, c, false);
                for s in of(st) {
                    let x = f.px(s.r);
                    let _ = writeln!(out, r#"<line class="whisker" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{c}"/>"#, f.py(s.min_log_error), f.py(s.max_log_error));
                }
                entries.push((st.to_string(), c, false));
            }
            let y = f.py(chem);
            let _ = writeln!(out, r#"<line class="chemical-accuracy" x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="black" stroke-dasharray="2,2"/>"#, W - RIGHT);
            entries.push(("chemical accuracy".to_string(), "black", true));
        }
    }
    legend(&mut out, &entries);
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn emit_plot(summaries: &[Summary], kind: PlotKind, path: impl AsRef<Path>) -> Result<(), BenchError> {
    let svg = render_plot(summaries, kind)?;
    let path = path.as_ref();
    std::fs::write(path, svg).map_err(|source| BenchError::Io { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizers::OptimizerId;

    fn summary(state: TargetState, r: f64) -> Summary {
        Summary {
            r,
            state,
            optimizer: OptimizerId::Rcga,
            count: 2,
            mean_energy: -1.0 + r,
            std_dev: 0.01,
            exact: -1.01 + r,
            log_error: -2.0,
            min_log_error: -3.0,
            max_log_error: -1.5,
            deviations: vec![0.01, -0.01],
        }
    }

    #[test]
    fn single_state_levels() {
        let s = vec![summary(TargetState::Ground, 0.5), summary(TargetState::Ground, 1.0)];
        let svg = render_plot(&s, PlotKind::Levels).unwrap();
        assert_eq!(svg.matches(r#"class="series""#).count(), 2);
        assert!(svg.contains("<g class=\"legend\">"));
    }

    #[test]
    fn log_errors_always_draw_chemical_accuracy() {
        let s = vec![summary(TargetState::Singlet, 0.5)];
        let svg = render_plot(&s, PlotKind::LogErrors).unwrap();
        assert_eq!(svg.matches("chemical-accuracy").count(), 1);
    }

    #[test]
    fn four_states_have_distinct_colours() {
        let s: Vec<_> = TargetState::ALL.iter().flat_map(|&t| [summary(t, 0.5), summary(t, 1.0)]).collect();
        let svg = render_plot(&s, PlotKind::Deviations).unwrap();
        for t in TargetState::ALL {
            assert!(svg.contains(color(t)));
            assert!(svg.contains(&format!(">{t}</text>")));
        }
        assert!(render_plot(&[], PlotKind::Levels).is_err());
    }
}
