//! Static SVG emission for a run directory: the shrinking figure eight,
//! the monitor series, and the final blow-up frame with its fitted grim
//! reaper. No plotting dependency; the files are plain hand-built SVG.

use crate::blowup::sample_grim_reaper;
use crate::error::Result;
use crate::geom::Vec2;
use crate::io;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#17becf", "#7f7f7f",
];

struct Frame2D {
    min: Vec2,
    max: Vec2,
    width: f64,
    height: f64,
    margin: f64,
}

impl Frame2D {
    fn new(points: impl Iterator<Item = Vec2>, width: f64, height: f64) -> Self {
        let mut min = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        if !min.is_finite() || !max.is_finite() {
            min = Vec2::new(-1.0, -1.0);
            max = Vec2::new(1.0, 1.0);
        }
        if (max.x - min.x).abs() < 1e-12 {
            max.x = min.x + 1.0;
        }
        if (max.y - min.y).abs() < 1e-12 {
            max.y = min.y + 1.0;
        }
        Frame2D {
            min,
            max,
            width,
            height,
            margin: 30.0,
        }
    }

    fn map(&self, p: Vec2) -> (f64, f64) {
        let sx = (self.width - 2.0 * self.margin) / (self.max.x - self.min.x);
        let sy = (self.height - 2.0 * self.margin) / (self.max.y - self.min.y);
        let s = sx.min(sy);
        let cx = 0.5 * (self.min.x + self.max.x);
        let cy = 0.5 * (self.min.y + self.max.y);
        (
            0.5 * self.width + (p.x - cx) * s,
            0.5 * self.height - (p.y - cy) * s,
        )
    }
}

fn path_of(frame: &Frame2D, pts: &[Vec2], color: &str, width: f64) -> String {
    let mut d = String::new();
    for (i, &p) in pts.iter().enumerate() {
        let (x, y) = frame.map(p);
        let _ = write!(d, "{}{x:.2} {y:.2} ", if i == 0 { "M" } else { "L" });
    }
    format!(
        "  <path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\"/>\n",
        d.trim_end()
    )
}

fn text_at(x: f64, y: f64, size: f64, color: &str, content: &str) -> String {
    format!(
        "  <text x=\"{x:.1}\" y=\"{y:.1}\" font-size=\"{size}\" font-family=\"monospace\" fill=\"{color}\">{}</text>\n",
        xml_escape(content)
    )
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn svg_document(width: f64, height: f64, body: &str) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n  <rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n{body}</svg>\n"
    )
}

/// Snapshot overlay: each recorded curve plus its point reflection, so lobes
/// appear as the full figure eight.
fn snapshots_svg(snapshots: &[(f64, Vec<Vec2>, bool)]) -> String {
    let (w, h) = (640.0, 640.0);
    let all = snapshots
        .iter()
        .flat_map(|(_, nodes, _)| nodes.iter().flat_map(|z| [*z, -*z]));
    let frame = Frame2D::new(all, w, h);
    let mut body = String::new();
    // Axes through the origin.
    let (x0, y0) = frame.map(Vec2::ZERO);
    let _ = write!(
        body,
        "  <line x1=\"0\" y1=\"{y0:.1}\" x2=\"{w}\" y2=\"{y0:.1}\" stroke=\"#dddddd\"/>\n  <line x1=\"{x0:.1}\" y1=\"0\" x2=\"{x0:.1}\" y2=\"{h}\" stroke=\"#dddddd\"/>\n"
    );
    for (i, (t, nodes, lobe)) in snapshots.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        body.push_str(&path_of(&frame, nodes, color, 1.2));
        if *lobe {
            let reflected: Vec<Vec2> = nodes.iter().map(|z| -*z).collect();
            body.push_str(&path_of(&frame, &reflected, color, 1.2));
        }
        body.push_str(&text_at(
            10.0,
            16.0 + 14.0 * i as f64,
            11.0,
            color,
            &format!("t = {t:.6}"),
        ));
    }
    svg_document(w, h, &body)
}

/// Monitor series, each normalized to its own range with the range in the
/// legend.
fn series_svg(ts: &[f64], series: &[(&str, Vec<f64>)]) -> String {
    let (w, h) = (760.0, 440.0);
    let frame = Frame2D::new(
        [Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0)].into_iter(),
        w,
        h,
    );
    let t0 = ts.first().copied().unwrap_or(0.0);
    let t1 = ts.last().copied().unwrap_or(1.0).max(t0 + 1e-300);
    let mut body = String::new();
    let _ = write!(
        body,
        "  <rect x=\"{:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"#999999\"/>\n",
        frame.map(Vec2::new(0.0, 1.0)).0,
        frame.map(Vec2::new(0.0, 1.0)).1,
        frame.map(Vec2::new(1.0, 0.0)).0 - frame.map(Vec2::new(0.0, 0.0)).0,
        frame.map(Vec2::new(0.0, 0.0)).1 - frame.map(Vec2::new(0.0, 1.0)).1,
    );
    body.push_str(&text_at(frame.margin, h - 8.0, 11.0, "#333333", &format!("t in [{t0:.4e}, {t1:.4e}]")));
    for (i, (name, values)) in series.iter().enumerate() {
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let span = (hi - lo).max(1e-300);
        let pts: Vec<Vec2> = ts
            .iter()
            .zip(values.iter())
            .filter(|(_, v)| v.is_finite())
            .map(|(&t, &v)| Vec2::new((t - t0) / (t1 - t0), (v - lo) / span))
            .collect();
        let color = PALETTE[i % PALETTE.len()];
        if !pts.is_empty() {
            body.push_str(&path_of(&frame, &pts, color, 1.3));
        }
        body.push_str(&text_at(
            frame.margin + 4.0,
            18.0 + 14.0 * i as f64,
            11.0,
            color,
            &format!("{name} [{lo:.4e}, {hi:.4e}]"),
        ));
    }
    svg_document(w, h, &body)
}

/// Final blow-up frame with the fitted translator overlaid.
fn blowup_svg(frame_nodes: &[Vec2], fit: Option<(f64, f64, f64)>) -> String {
    let (w, h) = (640.0, 640.0);
    let frame = Frame2D::new(frame_nodes.iter().copied(), w, h);
    let mut body = String::new();
    body.push_str(&path_of(&frame, frame_nodes, PALETTE[0], 1.6));
    body.push_str(&text_at(10.0, 16.0, 11.0, PALETTE[0], "rescaled frame"));
    if let Some((theta, speed, tip_k)) = fit {
        // Tip of the fitted reaper sits at the frame's curvature maximum.
        if let Ok(g) = crate::curve::WindowGeometry::compute(frame_nodes, Vec2::ZERO) {
            let mut tip_idx = 0usize;
            let mut best = 0.0;
            for (i, &k) in g.k.iter().enumerate() {
                if k.abs() > best {
                    best = k.abs();
                    tip_idx = i;
                }
            }
            let reaper = sample_grim_reaper(512, 1.52, theta, speed, frame_nodes[tip_idx]);
            body.push_str(&path_of(&frame, &reaper, PALETTE[3], 1.0));
            body.push_str(&text_at(
                10.0,
                30.0,
                11.0,
                PALETTE[3],
                &format!(
                    "grim reaper fit: theta = {:.2} deg, c = {speed:.4}, tip |k| = {tip_k:.3}",
                    theta.to_degrees()
                ),
            ));
        }
    }
    svg_document(w, h, &body)
}

/// Emit the run plots into `dir`. Missing inputs are skipped with a warning
/// on stderr; under `strict` they are errors instead. Returns the artifact
/// paths that were written, relative to `dir`.
pub fn emit_plots(dir: &Path, strict: bool) -> Result<Vec<PathBuf>> {
    let mut artifacts = Vec::new();
    let warn = |what: &str| -> Result<()> {
        if strict {
            Err(crate::error::Error::Rejected(format!(
                "plot input missing: {what}"
            )))
        } else {
            eprintln!("plot: skipping {what} (missing input)");
            Ok(())
        }
    };

    match io::read_history(dir) {
        Ok(history) => {
            let snaps: Vec<(f64, Vec<Vec2>, bool)> = history
                .snapshots
                .iter()
                .map(|s| {
                    (
                        s.t(),
                        s.nodes().to_vec(),
                        s.arc_kind() == crate::curve::ArcKind::SphereLobe,
                    )
                })
                .collect();
            let rel = PathBuf::from("snapshots.svg");
            io::write_file(&dir.join(&rel), snapshots_svg(&snaps).as_bytes())?;
            artifacts.push(rel);

            let ts = history.times();
            let series: Vec<(&str, Vec<f64>)> = vec![
                ("phi_l", history.series.iter().map(|s| s.phi_l).collect()),
                ("area", history.series.iter().map(|s| s.area).collect()),
                ("I_kp", history.series.iter().map(|s| s.i_kp).collect()),
                (
                    "min p/r",
                    history.series.iter().map(|s| s.min_p_over_r).collect(),
                ),
                (
                    "min (k-p)/r",
                    history.series.iter().map(|s| s.min_kp_over_r).collect(),
                ),
                ("max|A|", history.series.iter().map(|s| s.max_a).collect()),
            ];
            let rel = PathBuf::from("series.svg");
            io::write_file(&dir.join(&rel), series_svg(&ts, &series).as_bytes())?;
            artifacts.push(rel);
        }
        Err(_) => warn("run history (series.csv, summary.json)")?,
    }

    // Blow-up overlay requires fits.json and the matching frame file.
    let fits_path = dir.join("fits.json");
    match std::fs::read_to_string(&fits_path) {
        Ok(text) => {
            #[derive(serde::Deserialize)]
            struct FitsDoc {
                frames: Vec<io::FrameFitDoc>,
            }
            let parsed: std::result::Result<FitsDoc, _> = serde_json::from_str(&text);
            match parsed {
                Ok(doc) => {
                    let fitted = doc
                        .frames
                        .iter()
                        .rev()
                        .find(|f| f.theta.is_some() && f.speed.is_some());
                    if let Some(f) = fitted {
                        let frame_path = dir.join(format!("frames/{:02}.csv", f.j));
                        match read_frame_nodes(&frame_path) {
                            Ok(nodes) => {
                                let rel = PathBuf::from("blowup.svg");
                                let fit = Some((f.theta.unwrap(), f.speed.unwrap(), f.a));
                                io::write_file(
                                    &dir.join(&rel),
                                    blowup_svg(&nodes, fit).as_bytes(),
                                )?;
                                artifacts.push(rel);
                            }
                            Err(_) => warn("blow-up frame csv")?,
                        }
                    }
                }
                Err(_) => warn("fits.json (unreadable)")?,
            }
        }
        Err(_) => warn("fits.json")?,
    }

    Ok(artifacts)
}

fn read_frame_nodes(path: &Path) -> Result<Vec<Vec2>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| crate::error::Error::io(path.display().to_string(), e))?;
    let mut nodes = Vec::new();
    for line in text.lines().skip(1) {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() < 3 {
            continue;
        }
        let x: f64 = cols[1].parse().unwrap_or(f64::NAN);
        let y: f64 = cols[2].parse().unwrap_or(f64::NAN);
        nodes.push(Vec2::new(x, y));
    }
    Ok(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Minimal well-formedness check used by the tests: balanced tags and
    /// escaped text content.
    pub(crate) fn assert_valid_svg(text: &str) {
        assert!(text.starts_with("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"));
        assert!(text.ends_with("</svg>\n"));
        let opens = text.matches("<svg").count();
        let closes = text.matches("</svg>").count();
        assert_eq!(opens, closes);
        // Every raw ampersand must be an entity.
        let mut rest = text;
        while let Some(i) = rest.find('&') {
            let tail = &rest[i..];
            assert!(
                tail.starts_with("&amp;") || tail.starts_with("&lt;") || tail.starts_with("&gt;"),
                "unescaped ampersand"
            );
            rest = &rest[i + 1..];
        }
    }

    #[test]
    fn svg_builders_produce_wellformed_documents() {
        let nodes: Vec<Vec2> = (0..32)
            .map(|i| {
                let t = i as f64 / 31.0 * std::f64::consts::PI;
                Vec2::new(t.cos(), t.sin())
            })
            .collect();
        assert_valid_svg(&snapshots_svg(&[(0.0, nodes.clone(), true)]));
        let ts: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let vals: Vec<f64> = ts.iter().map(|t| (t * 0.1).sin()).collect();
        assert_valid_svg(&series_svg(&ts, &[("wiggle <&>", vals)]));
        assert_valid_svg(&blowup_svg(&nodes, Some((0.3, 1.0, 1.0))));
    }

    #[test]
    fn empty_dir_warns_without_files() {
        let dir = tempfile::tempdir().unwrap();
        let written = emit_plots(dir.path(), false).unwrap();
        assert!(written.is_empty());
        // Strict mode turns the missing input into an error.
        assert!(emit_plots(dir.path(), true).is_err());
    }
}
