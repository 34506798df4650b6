//! Artifact formats: CSV for dense series and polylines, JSON for metadata
//! and reports, and the content-hashed manifest. All files are UTF-8 with LF
//! line endings; CSV floats carry 17 significant digits so identical runs
//! are byte-identical.

use crate::blowup::{BlowupFrame, IntersectionDistances, ReaperFit, TypeIndicator};
use crate::curve::{ArcKind, ProfileCurve};
use crate::error::{Error, Result};
use crate::flow::{FlowHistory, SeriesSample, Termination};
use crate::geom::Vec2;
use crate::monitors::MonitorReport;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Schema versions recorded in the manifest.
pub const SERIES_SCHEMA: &str = "v1:t,dt,maxA,phi_l,area,I_kp,min_p_over_r,min_kp_over_r";
pub const RATES_SCHEMA: &str = "v1:t,max_k,c0,c_pi,evo_residual";
pub const CURVE_SCHEMA: &str = "v1:s_index,x,y";
pub const FRAME_SCHEMA: &str = "v1:idx,x,y";

/// Format a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn parse_f64(s: &str, path: &Path) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::malformed(path.display().to_string(), format!("bad float {s:?}")))
}

pub fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| Error::io(parent.display().to_string(), e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path.display().to_string(), e))
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))
}

// ---------------------------------------------------------------------------
// Curves.
// ---------------------------------------------------------------------------

pub fn curve_csv(curve: &ProfileCurve) -> String {
    let mut out = String::with_capacity(curve.node_count() * 48);
    out.push_str("s_index,x,y\n");
    for (i, z) in curve.nodes().iter().enumerate() {
        let _ = writeln!(out, "{i},{},{}", fmt_f64(z.x), fmt_f64(z.y));
    }
    out
}

pub fn write_curve_csv(path: &Path, curve: &ProfileCurve) -> Result<()> {
    write_file(path, curve_csv(curve).as_bytes())
}

fn read_polyline_csv(path: &Path) -> Result<Vec<Vec2>> {
    let text = read_to_string(path)?;
    let mut nodes = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        if ln == 0 || line.is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let _idx = cols.next();
        let x = parse_f64(
            cols.next()
                .ok_or_else(|| Error::malformed(path.display().to_string(), "missing x"))?,
            path,
        )?;
        let y = parse_f64(
            cols.next()
                .ok_or_else(|| Error::malformed(path.display().to_string(), "missing y"))?,
            path,
        )?;
        nodes.push(Vec2::new(x, y));
    }
    Ok(nodes)
}

#[derive(Serialize, Deserialize)]
struct CurveDoc {
    m: u32,
    t: f64,
    arc_kind: ArcKind,
    nodes: Vec<[f64; 2]>,
}

pub fn curve_json(curve: &ProfileCurve) -> String {
    let doc = CurveDoc {
        m: curve.m(),
        t: curve.t(),
        arc_kind: curve.arc_kind(),
        nodes: curve.nodes().iter().map(|z| [z.x, z.y]).collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serialize curve");
    s.push('\n');
    s
}

pub fn write_curve_json(path: &Path, curve: &ProfileCurve) -> Result<()> {
    write_file(path, curve_json(curve).as_bytes())
}

pub fn read_curve_json(path: &Path) -> Result<ProfileCurve> {
    let text = read_to_string(path)?;
    let doc: CurveDoc = serde_json::from_str(&text)
        .map_err(|e| Error::malformed(path.display().to_string(), e.to_string()))?;
    let nodes = doc.nodes.iter().map(|p| Vec2::new(p[0], p[1])).collect();
    ProfileCurve::new(doc.m, doc.arc_kind, nodes, doc.t)
}

// ---------------------------------------------------------------------------
// Flow histories.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct SnapshotMeta {
    file: String,
    t: f64,
    nodes: usize,
}

#[derive(Serialize, Deserialize)]
struct SummaryDoc {
    m: u32,
    arc_kind: ArcKind,
    termination: Termination,
    t_final: f64,
    steps: usize,
    initial_max_a: f64,
    initial_max_k: f64,
    final_max_a: f64,
    final_max_k: f64,
    estimated_blowup_time: Option<f64>,
    snapshots: Vec<SnapshotMeta>,
}

pub fn series_csv(history: &FlowHistory) -> String {
    let mut out = String::with_capacity(history.series.len() * 160);
    out.push_str("t,dt,maxA,phi_l,area,I_kp,min_p_over_r,min_kp_over_r\n");
    for s in &history.series {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt_f64(s.t),
            fmt_f64(s.dt),
            fmt_f64(s.max_a),
            fmt_f64(s.phi_l),
            fmt_f64(s.area),
            fmt_f64(s.i_kp),
            fmt_f64(s.min_p_over_r),
            fmt_f64(s.min_kp_over_r),
        );
    }
    out
}

pub fn rates_csv(history: &FlowHistory) -> String {
    let mut out = String::with_capacity(history.series.len() * 100);
    out.push_str("t,max_k,c0,c_pi,evo_residual\n");
    for s in &history.series {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(s.t),
            fmt_f64(s.max_k),
            fmt_f64(s.c0),
            fmt_f64(s.c_pi),
            s.evo_residual.map(fmt_f64).unwrap_or_default(),
        );
    }
    out
}

/// Write series.csv, rates.csv, snapshots/NNN.csv and summary.json into a
/// run directory; returns the artifact paths relative to the directory.
pub fn write_history(dir: &Path, history: &FlowHistory) -> Result<Vec<PathBuf>> {
    let mut artifacts = Vec::new();
    let series_path = dir.join("series.csv");
    write_file(&series_path, series_csv(history).as_bytes())?;
    artifacts.push(PathBuf::from("series.csv"));
    let rates_path = dir.join("rates.csv");
    write_file(&rates_path, rates_csv(history).as_bytes())?;
    artifacts.push(PathBuf::from("rates.csv"));

    let mut metas = Vec::new();
    for (i, snap) in history.snapshots.iter().enumerate() {
        let rel = format!("snapshots/{i:03}.csv");
        write_file(&dir.join(&rel), curve_csv(snap).as_bytes())?;
        metas.push(SnapshotMeta {
            file: rel.clone(),
            t: snap.t(),
            nodes: snap.node_count(),
        });
        artifacts.push(PathBuf::from(rel));
    }

    let last = history.series.last();
    let summary = SummaryDoc {
        m: history.m,
        arc_kind: history.arc_kind,
        termination: history.termination,
        t_final: history.t_final(),
        steps: history.series.len().saturating_sub(1),
        initial_max_a: history.initial_max_a,
        initial_max_k: history.initial_max_k,
        final_max_a: last.map(|s| s.max_a).unwrap_or(f64::NAN),
        final_max_k: last.map(|s| s.max_k).unwrap_or(f64::NAN),
        estimated_blowup_time: crate::blowup::estimate_blowup_time(history),
        snapshots: metas,
    };
    let mut text = serde_json::to_string_pretty(&summary).expect("serialize summary");
    text.push('\n');
    write_file(&dir.join("summary.json"), text.as_bytes())?;
    artifacts.push(PathBuf::from("summary.json"));
    Ok(artifacts)
}

/// Reconstruct a flow history from a run directory written by
/// [`write_history`].
pub fn read_history(dir: &Path) -> Result<FlowHistory> {
    let summary_path = dir.join("summary.json");
    let text = read_to_string(&summary_path)?;
    let summary: SummaryDoc = serde_json::from_str(&text)
        .map_err(|e| Error::malformed(summary_path.display().to_string(), e.to_string()))?;

    let series_path = dir.join("series.csv");
    let series_text = read_to_string(&series_path)?;
    let rates_path = dir.join("rates.csv");
    let rates_text = read_to_string(&rates_path)?;
    let mut series = Vec::new();
    let rates_lines: Vec<&str> = rates_text.lines().skip(1).collect();
    for (i, line) in series_text.lines().skip(1).enumerate() {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 8 {
            return Err(Error::malformed(
                series_path.display().to_string(),
                format!("expected 8 columns, got {}", cols.len()),
            ));
        }
        let rate_cols: Vec<&str> = rates_lines
            .get(i)
            .map(|l| l.split(',').collect())
            .unwrap_or_default();
        let (max_k, c0, c_pi, evo) = if rate_cols.len() == 5 {
            (
                parse_f64(rate_cols[1], &rates_path)?,
                parse_f64(rate_cols[2], &rates_path)?,
                parse_f64(rate_cols[3], &rates_path)?,
                if rate_cols[4].is_empty() {
                    None
                } else {
                    Some(parse_f64(rate_cols[4], &rates_path)?)
                },
            )
        } else {
            (f64::NAN, f64::NAN, f64::NAN, None)
        };
        series.push(SeriesSample {
            t: parse_f64(cols[0], &series_path)?,
            dt: parse_f64(cols[1], &series_path)?,
            max_a: parse_f64(cols[2], &series_path)?,
            phi_l: parse_f64(cols[3], &series_path)?,
            area: parse_f64(cols[4], &series_path)?,
            i_kp: parse_f64(cols[5], &series_path)?,
            min_p_over_r: parse_f64(cols[6], &series_path)?,
            min_kp_over_r: parse_f64(cols[7], &series_path)?,
            max_k,
            c0,
            c_pi,
            evo_residual: evo,
        });
    }
    if series.is_empty() {
        return Err(Error::malformed(
            series_path.display().to_string(),
            "empty series",
        ));
    }

    let mut snapshots = Vec::new();
    for meta in &summary.snapshots {
        let nodes = read_polyline_csv(&dir.join(&meta.file))?;
        snapshots.push(ProfileCurve::new(
            summary.m,
            summary.arc_kind,
            nodes,
            meta.t,
        )?);
    }
    if snapshots.is_empty() {
        return Err(Error::malformed(
            summary_path.display().to_string(),
            "no snapshots",
        ));
    }

    Ok(FlowHistory {
        m: summary.m,
        arc_kind: summary.arc_kind,
        series,
        snapshots,
        termination: summary.termination,
        initial_max_a: summary.initial_max_a,
        initial_max_k: summary.initial_max_k,
    })
}

// ---------------------------------------------------------------------------
// Blow-up artifacts.
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrameFitDoc {
    pub j: usize,
    pub a: f64,
    pub t: f64,
    pub r_j: f64,
    pub delta: Option<f64>,
    pub resolution: f64,
    pub theta: Option<f64>,
    pub speed: Option<f64>,
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlowupDoc {
    pub frames: usize,
    pub t_hat: Option<f64>,
    pub delta_growth: f64,
    pub r_j_growth: f64,
    pub type_ii: Option<bool>,
    pub unbounded_trend: Option<bool>,
    pub fitted_frame: Option<usize>,
    pub fit: Option<ReaperFit>,
    pub pass: bool,
    pub detail: String,
}

pub fn frame_csv(frame: &BlowupFrame) -> String {
    let mut out = String::with_capacity(frame.nodes.len() * 48);
    out.push_str("idx,x,y\n");
    for (i, z) in frame.nodes.iter().enumerate() {
        let _ = writeln!(out, "{i},{},{}", fmt_f64(z.x), fmt_f64(z.y));
    }
    out
}

pub fn write_frames(
    dir: &Path,
    frames: &[BlowupFrame],
    fits: &[FrameFitDoc],
    indicator: &TypeIndicator,
    distances: &IntersectionDistances,
    doc: &BlowupDoc,
) -> Result<Vec<PathBuf>> {
    let mut artifacts = Vec::new();
    for frame in frames {
        let rel = format!("frames/{:02}.csv", frame.j);
        write_file(&dir.join(&rel), frame_csv(frame).as_bytes())?;
        artifacts.push(PathBuf::from(rel));
    }
    #[derive(Serialize)]
    struct FitsDoc<'a> {
        t_hat: Option<f64>,
        delta: &'a [f64],
        r_j: &'a [f64],
        frames: &'a [FrameFitDoc],
    }
    let fits_doc = FitsDoc {
        t_hat: indicator.t_hat,
        delta: &indicator.delta,
        r_j: &distances.r_j,
        frames: fits,
    };
    let mut text = serde_json::to_string_pretty(&fits_doc).expect("serialize fits");
    text.push('\n');
    write_file(&dir.join("fits.json"), text.as_bytes())?;
    artifacts.push(PathBuf::from("fits.json"));

    let mut text = serde_json::to_string_pretty(doc).expect("serialize blowup doc");
    text.push('\n');
    write_file(&dir.join("blowup.json"), text.as_bytes())?;
    artifacts.push(PathBuf::from("blowup.json"));
    Ok(artifacts)
}

// ---------------------------------------------------------------------------
// Reports.
// ---------------------------------------------------------------------------

pub fn report_txt(report: &MonitorReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "monitor report: m = {}, {} samples, growth horizon {}x",
        report.m, report.samples, report.growth_horizon
    );
    for v in &report.verdicts {
        let status = match v.pass {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "SKIP",
        };
        let _ = writeln!(
            out,
            "{status} {:<32} measured {:>13.6e}  limit {:>13.6e}  {}",
            v.id, v.measured, v.limit, v.note
        );
    }
    let _ = writeln!(
        out,
        "overall: {}",
        if report.all_pass() { "PASS" } else { "FAIL" }
    );
    out
}

pub fn write_report(dir: &Path, report: &MonitorReport) -> Result<Vec<PathBuf>> {
    let mut text = serde_json::to_string_pretty(report).expect("serialize report");
    text.push('\n');
    write_file(&dir.join("report.json"), text.as_bytes())?;
    write_file(&dir.join("report.txt"), report_txt(report).as_bytes())?;
    Ok(vec![
        PathBuf::from("report.json"),
        PathBuf::from("report.txt"),
    ])
}

// ---------------------------------------------------------------------------
// Manifest.
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub status: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub ok: bool,
    pub stages: Vec<StageRecord>,
    pub schemas: Vec<(String, String)>,
    pub artifacts: Vec<ManifestEntry>,
    pub config: serde_json::Value,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

pub fn hash_file(path: &Path) -> Result<ManifestEntry> {
    let bytes =
        std::fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(ManifestEntry {
        path: String::new(),
        bytes: bytes.len() as u64,
        sha256: sha256_hex(&bytes),
    })
}

/// Hash the listed artifacts (paths relative to `dir`) and write
/// manifest.json.
pub fn write_manifest(
    dir: &Path,
    ok: bool,
    stages: Vec<StageRecord>,
    artifacts: &[PathBuf],
    config: &crate::config::RunConfig,
) -> Result<Manifest> {
    let mut entries = Vec::new();
    let mut sorted: Vec<&PathBuf> = artifacts.iter().collect();
    sorted.sort();
    for rel in sorted {
        let mut entry = hash_file(&dir.join(rel))?;
        entry.path = rel.to_string_lossy().replace('\\', "/");
        entries.push(entry);
    }
    let manifest = Manifest {
        ok,
        stages,
        schemas: vec![
            ("series.csv".into(), SERIES_SCHEMA.into()),
            ("rates.csv".into(), RATES_SCHEMA.into()),
            ("seed.csv".into(), CURVE_SCHEMA.into()),
            ("snapshots/*.csv".into(), CURVE_SCHEMA.into()),
            ("frames/*.csv".into(), FRAME_SCHEMA.into()),
        ],
        artifacts: entries,
        config: serde_json::to_value(config).expect("config to value"),
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("serialize manifest");
    text.push('\n');
    write_file(&dir.join("manifest.json"), text.as_bytes())?;
    Ok(manifest)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join("manifest.json");
    let text = read_to_string(&path)?;
    serde_json::from_str(&text)
        .map_err(|e| Error::malformed(path.display().to_string(), e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::whitney_lobe;

    #[test]
    fn float_formatting_has_17_digits() {
        let s = fmt_f64(std::f64::consts::PI);
        assert_eq!(s, "3.1415926535897931e0");
        assert_eq!(fmt_f64(f64::NAN), "nan");
    }

    #[test]
    fn curve_roundtrip_json() {
        let dir = tempfile::tempdir().unwrap();
        let c = whitney_lobe(3, 64).unwrap();
        let path = dir.path().join("c.json");
        write_curve_json(&path, &c).unwrap();
        let back = read_curve_json(&path).unwrap();
        assert_eq!(back.m(), 3);
        assert_eq!(back.node_count(), 65);
        for (a, b) in c.nodes().iter().zip(back.nodes()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn history_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let seed = whitney_lobe(2, 64).unwrap();
        let cfg = crate::flow::FlowConfig {
            t_max: Some(1e-4),
            ..Default::default()
        };
        let h = crate::flow::run(&seed, &cfg).unwrap();
        write_history(dir.path(), &h).unwrap();
        let back = read_history(dir.path()).unwrap();
        assert_eq!(back.series.len(), h.series.len());
        assert_eq!(back.snapshots.len(), h.snapshots.len());
        assert_eq!(back.termination, h.termination);
        let (a, b) = (back.series.last().unwrap(), h.series.last().unwrap());
        assert_eq!(a.t, b.t);
        assert_eq!(a.phi_l, b.phi_l);
        assert_eq!(a.evo_residual, b.evo_residual);
    }
}
