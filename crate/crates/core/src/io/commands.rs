use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cluster::{subset_connected, ClusterSet};
use crate::error::{Error, Result};
use crate::exploration::{estimate_pinning_scaling, explore_chord, replica_seed, Chord};
use crate::io::manifest::{CliError, Command, ExperimentManifest};
use crate::io::render::render_svg;
use crate::lattice::{DomainKind, LatticeDomain, Site};
use crate::loop_measure::{sample_loop_soup, sample_loop_soup_with, LoopSoupSample, SoupConfig};
use crate::restriction::{choose_lambda, restriction_ratio_test, AvoidanceLaw, Chart, ExcursionLaw, Hull};
use crate::stats::{difference_z, spearman_monotone, wilson_interval, EstimatorReport, GofReport};
use crate::topology::boundary_touching_loops;

type CliResult<T> = std::result::Result<T, CliError>;

/// One file produced by a command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub path: String,
    pub contents: String,
}

pub fn write_outputs(files: &[OutputFile]) -> CliResult<()> {
    for f in files {
        if let Some(dir) = Path::new(&f.path).parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        std::fs::write(&f.path, &f.contents)?;
    }
    Ok(())
}

fn out_path(m: &ExperimentManifest, index: usize, default: &str) -> String {
    m.outputs.get(index).cloned().unwrap_or_else(|| default.to_string())
}

fn report_file<T: Serialize>(m: &ExperimentManifest, default: &str, body: &T) -> CliResult<OutputFile> {
    let doc = serde_json::json!({ "manifest": m, "report": body });
    Ok(OutputFile { path: out_path(m, 0, default), contents: serde_json::to_string_pretty(&doc)? + "\n" })
}

#[derive(Serialize, Deserialize)]
struct SampleFile {
    manifest: ExperimentManifest,
    sample: LoopSoupSample,
}

/// Draws a loop-soup and writes it with its manifest.
pub fn cmd_sample(m: &ExperimentManifest) -> CliResult<Vec<OutputFile>> {
    let sample = sample_loop_soup(&m.soup_config()?)?;
    let doc = SampleFile { manifest: m.clone(), sample };
    Ok(vec![OutputFile { path: out_path(m, 0, "sample.json"), contents: serde_json::to_string(&doc)? + "\n" }])
}

/// Reads a file written by `sample`, or a bare serialised sample.
pub fn load_sample_file(path: &str) -> CliResult<(Option<ExperimentManifest>, LoopSoupSample)> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{path}: {e}")))?;
    if let Ok(doc) = serde_json::from_str::<SampleFile>(&text) {
        return Ok((Some(doc.manifest), doc.sample));
    }
    Ok((None, LoopSoupSample::from_json(&text)?))
}

pub fn cmd_render(m: &ExperimentManifest) -> CliResult<Vec<OutputFile>> {
    let input = m.input.as_deref().ok_or_else(|| CliError::config("render needs an input file"))?;
    let (_, sample) = load_sample_file(input)?;
    let spec = m.render.clone().unwrap_or_default();
    let meta = serde_json::to_string(m)?;
    Ok(vec![OutputFile { path: out_path(m, 0, "render.svg"), contents: render_svg(&sample, &spec, Some(&meta)) }])
}

fn target_of(domain: &LatticeDomain) -> Site {
    match domain.kind() {
        DomainKind::Disk { .. } => Site::ORIGIN,
        DomainKind::HalfPlaneBox { height, .. } => Site::new(0, (height / 2) as i32),
    }
}

pub fn cmd_explore(m: &ExperimentManifest) -> CliResult<Vec<OutputFile>> {
    let cfg = m.soup_config()?;
    let sample = sample_loop_soup(&cfg)?;
    let clusters = ClusterSet::build(&sample.loops);
    let target = target_of(&cfg.domain);
    let chord = Chord::toward(&cfg.domain, target);
    let body = match explore_chord(&sample, &clusters, target, &chord) {
        Ok(r) => serde_json::json!({ "status": "ok", "target": target, "result": r.to_json() }),
        Err(Error::NoSurroundingCluster) => serde_json::json!({ "status": "no-surrounding-cluster", "target": target }),
        Err(e) => return Err(e.into()),
    };
    Ok(vec![report_file(m, "explore.json", &body)?])
}

pub const DEFAULT_SIGMA: f64 = 6.0;
const DEFAULT_HULLS: [[f64; 2]; 2] = [[-2.0, 1.0], [-4.0, 1.0]];

pub fn cmd_restriction_test(m: &ExperimentManifest) -> CliResult<Vec<OutputFile>> {
    let domain = m.lattice_domain()?;
    let hulls = m.hulls.clone().unwrap_or_else(|| DEFAULT_HULLS.to_vec());
    if hulls.len() != 2 {
        return Err(CliError::config(format!("restriction test needs 2 hulls, got {}", hulls.len())));
    }
    let (law, chart) = match domain.kind() {
        DomainKind::Disk { radius } => (
            ExcursionLaw::lower_half(domain, 1.0)?,
            Chart::Disk { radius, sigma: m.sigma.unwrap_or(DEFAULT_SIGMA) },
        ),
        DomainKind::HalfPlaneBox { .. } => (ExcursionLaw::right_arc(domain, 1.0)?, Chart::HalfPlane),
    };
    let h1 = Hull::new(hulls[0][0], hulls[0][1], chart)?;
    let h2 = Hull::new(hulls[1][0], hulls[1][1], chart)?;
    let lambda = match m.lambda {
        Some(l) => l,
        None => choose_lambda(&law, &h1, 0.12, 1000, m.seed)?,
    };
    let replicas = m.replicas.unwrap_or(10_000);
    let r = restriction_ratio_test(&AvoidanceLaw::Excursions(law.with_lambda(lambda)), &h1, &h2, replicas, m.seed)?;
    let body = serde_json::json!({
        "inputs": { "lambda": lambda, "hulls": hulls, "chart": chart, "replicas": replicas },
        "estimate": r.observed,
        "ci": [r.observed - 1.96 * r.std_error, r.observed + 1.96 * r.std_error],
        "predicted": r.predicted,
        "z": r.z,
        "degenerate": r.degenerate,
        "detail": r,
    });
    Ok(vec![report_file(m, "restriction.json", &body)?])
}

pub fn cmd_pinning_fit(m: &ExperimentManifest) -> CliResult<Vec<OutputFile>> {
    let cfg = m.soup_config()?;
    let (anchor, pin) = match cfg.domain.kind() {
        DomainKind::Disk { .. } => (Site::ORIGIN, cfg.domain.right_boundary_point()),
        DomainKind::HalfPlaneBox { .. } => (target_of(&cfg.domain), Site::ORIGIN),
    };
    let eps = m.eps.clone().unwrap_or_else(|| vec![2, 4, 8]);
    let report = estimate_pinning_scaling(&cfg, anchor, pin, &eps, m.replicas.unwrap_or(200))?;
    Ok(vec![report_file(m, "pinning.json", &serde_json::json!({ "anchor": anchor, "pin": pin, "fit": report }))?])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseScanRow {
    pub c: f64,
    pub clusters: u64,
    pub hooked: u64,
    pub soups: u64,
    pub fraction: EstimatorReport,
    /// Fewer macroscopic clusters than requested were found.
    pub insufficient: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseScanReport {
    pub diameter_floor: f64,
    pub rows: Vec<PhaseScanRow>,
    pub spearman: Option<GofReport>,
    pub spearman_skipped: bool,
    /// z of fraction at the first grid point minus the last.
    pub drop_z: Option<f64>,
}

const SCAN_BATCH: u64 = 8;

/// Counts (hooked, macroscopic) complete clusters in one soup.
fn scan_soup(cfg: &SoupConfig, table: &crate::loop_measure::LengthTable, floor: f64) -> Result<(u64, u64)> {
    let sample = sample_loop_soup_with(cfg, table)?;
    let clusters = ClusterSet::build(&sample.loops);
    let (mut hooked, mut total) = (0, 0);
    for &id in clusters.outermost_clusters() {
        let c = clusters.cluster(id);
        if (c.bbox.width().max(c.bbox.height()) as f64) < floor / 2f64.sqrt() || c.trace.diameter() < floor {
            continue;
        }
        let cc = clusters.complete_cluster(&sample.loops, id)?;
        let touching = boundary_touching_loops(&cc, &sample.loops);
        total += 1;
        hooked += subset_connected(&sample.loops, &touching)? as u64;
    }
    Ok((hooked, total))
}

/// Fraction of macroscopic complete clusters whose boundary-touching loops
/// form a single cluster by themselves, across a grid of intensities.
pub fn phase_scan(
    base: &SoupConfig,
    c_grid: &[f64],
    min_clusters: u64,
    max_soups: u64,
) -> Result<PhaseScanReport> {
    let floor = base.domain.scale() as f64 / 4.0;
    let table = base.length_table()?;
    let mut rows = Vec::new();
    for (k, &c) in c_grid.iter().enumerate() {
        let (mut hooked, mut clusters, mut soups) = (0, 0, 0);
        while clusters < min_clusters && soups < max_soups {
            let end = (soups + SCAN_BATCH).min(max_soups);
            let batch = (soups..end)
                .into_par_iter()
                .map(|j| {
                    let cfg = base.clone().with_c(c).with_seed(replica_seed(base.seed, k as u64 + 1, j));
                    scan_soup(&cfg, &table, floor)
                })
                .collect::<Result<Vec<_>>>()?;
            for (h, t) in batch {
                hooked += h;
                clusters += t;
            }
            soups = end;
        }
        let fraction = if clusters > 0 {
            wilson_interval(hooked, clusters, 0.95).with_seeds(&[base.seed, k as u64])
        } else {
            EstimatorReport {
                estimate: f64::NAN,
                ci_low: 0.0,
                ci_high: 1.0,
                std_error: f64::NAN,
                n: 0,
                method: crate::stats::CiMethod::Wilson,
                seed_hash: String::new(),
            }
        };
        rows.push(PhaseScanRow { c, clusters, hooked, soups, fraction, insufficient: clusters < min_clusters });
    }
    let usable: Vec<&PhaseScanRow> = rows.iter().filter(|r| r.clusters > 0).collect();
    let (spearman, spearman_skipped) = if usable.len() >= 4 {
        let xs: Vec<f64> = usable.iter().map(|r| r.c).collect();
        let ys: Vec<f64> = usable.iter().map(|r| r.fraction.estimate).collect();
        (Some(spearman_monotone(&xs, &ys, 10_000, base.seed)?), false)
    } else {
        (None, true)
    };
    let drop_z = match (usable.first(), usable.last()) {
        (Some(a), Some(b)) if usable.len() >= 2 => Some(difference_z(&a.fraction, &b.fraction)),
        _ => None,
    };
    Ok(PhaseScanReport { diameter_floor: floor, rows, spearman, spearman_skipped, drop_z })
}

pub const DEFAULT_C_GRID: [f64; 6] = [0.2, 0.4, 0.6, 0.8, 14.0 / 15.0, 1.0];

pub fn cmd_phase_scan(m: &ExperimentManifest) -> CliResult<Vec<OutputFile>> {
    let cfg = m.soup_config()?;
    let grid = m.c_grid.clone().unwrap_or_else(|| DEFAULT_C_GRID.to_vec());
    if grid.is_empty() {
        return Err(CliError::config("empty c grid"));
    }
    let report = phase_scan(&cfg, &grid, m.min_clusters.unwrap_or(500), m.replicas.unwrap_or(4000))?;
    let mut files = vec![report_file(m, "phase_scan.json", &report)?];
    if let Some(csv_path) = m.outputs.get(1) {
        let mut csv = String::from("c,clusters,hooked,fraction,ci_low,ci_high\n");
        for r in &report.rows {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.c, r.clusters, r.hooked, r.fraction.estimate, r.fraction.ci_low, r.fraction.ci_high
            ));
        }
        files.push(OutputFile { path: csv_path.clone(), contents: csv });
    }
    Ok(files)
}

/// Dispatches a manifest to its command.
pub fn run_manifest(m: &ExperimentManifest) -> CliResult<Vec<OutputFile>> {
    match m.command {
        Command::Sample => cmd_sample(m),
        Command::PhaseScan => cmd_phase_scan(m),
        Command::Render => cmd_render(m),
        Command::Explore => cmd_explore(m),
        Command::RestrictionTest => cmd_restriction_test(m),
        Command::PinningFit => cmd_pinning_fit(m),
    }
}
