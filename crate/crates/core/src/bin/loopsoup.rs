use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use loopsoup::io::{
    parse_domain, run_manifest, write_outputs, CliError, Command, ExperimentManifest, Layer, RenderSpec,
};
use loopsoup::DomainKind;

/// Random-walk loop-soup laboratory.
#[derive(Parser)]
#[command(name = "loopsoup", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// disk:R or box:W,H
    #[arg(long, value_parser = parse_domain, default_value = "disk:32")]
    domain: DomainKind,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Shortest loop length kept.
    #[arg(long, default_value_t = 4)]
    cutoff: u32,
    #[arg(long)]
    nmax: Option<u32>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    replicas: Option<u64>,
    /// Output file.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Draw a loop-soup.
    Sample(Common),
    /// Hookup fraction of boundary-touching loops across intensities.
    PhaseScan {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        c_grid: Option<Vec<f64>>,
        #[arg(long)]
        min_clusters: Option<u64>,
        /// Also write the per-c table as CSV.
        #[arg(long)]
        csv: Option<String>,
    },
    /// Render a sample file as SVG.
    Render {
        input: String,
        #[arg(long, value_delimiter = ',')]
        layers: Option<Vec<Layer>>,
        #[arg(long)]
        scale: Option<f64>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Explore the chord toward the centre until the surrounding cluster.
    Explore(Common),
    /// Ratio test of avoidance probabilities for two half-disk hulls.
    RestrictionTest {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        lambda: Option<f64>,
        /// a,eps (give twice)
        #[arg(long, value_parser = parse_pair)]
        hull: Vec<[f64; 2]>,
        /// Scale of the disk-to-half-plane chart.
        #[arg(long)]
        sigma: Option<f64>,
    },
    /// Fit u(ε) ∝ ε^β for the pinned cluster.
    PinningFit {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<u32>>,
        #[arg(long)]
        delta: Option<u32>,
    },
    /// Re-run the manifest embedded in an output file (or a bare manifest).
    Rerun {
        file: String,
        /// Write somewhere else instead of the recorded output paths.
        #[arg(long)]
        out: Option<String>,
    },
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected a,eps, got '{s}'"))?;
    let p = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("bad number '{v}': {e}"));
    Ok([p(a)?, p(b)?])
}

fn base(command: Command, c: &Common) -> ExperimentManifest {
    let mut m = ExperimentManifest::new(command, c.domain, c.seed);
    m.c = c.c;
    m.cutoff = c.cutoff;
    m.n_max = c.nmax;
    m.replicas = c.replicas;
    m.outputs.extend(c.out.clone());
    m
}

fn manifest_from_file(path: &str) -> Result<ExperimentManifest, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{path}: {e}")))?;
    if path.ends_with(".svg") {
        let start = text.find("<metadata>").ok_or_else(|| CliError::config("svg has no manifest"))? + 10;
        let end = text.find("</metadata>").ok_or_else(|| CliError::config("svg has no manifest"))?;
        let raw = text[start..end].replace("&lt;", "<").replace("&gt;", ">").replace("&amp;", "&");
        return Ok(serde_json::from_str(&raw)?);
    }
    let v: serde_json::Value = serde_json::from_str(&text)?;
    let m = v.get("manifest").cloned().unwrap_or(v);
    Ok(serde_json::from_value(m)?)
}

fn build(cmd: Cmd) -> Result<ExperimentManifest, CliError> {
    Ok(match cmd {
        Cmd::Sample(c) => base(Command::Sample, &c),
        Cmd::PhaseScan { common, c_grid, min_clusters, csv } => {
            let mut m = base(Command::PhaseScan, &common);
            m.c_grid = c_grid;
            m.min_clusters = min_clusters;
            if let Some(csv) = csv {
                if m.outputs.is_empty() {
                    m.outputs.push("phase_scan.json".into());
                }
                m.outputs.push(csv);
            }
            m
        }
        Cmd::Render { input, layers, scale, out } => {
            let mut m = ExperimentManifest::new(Command::Render, DomainKind::Disk { radius: 8 }, 0);
            let mut spec = RenderSpec::default();
            if let Some(l) = layers {
                spec.layers = l;
            }
            if let Some(s) = scale {
                spec.scale = s;
            }
            m.input = Some(input);
            m.render = Some(spec);
            m.outputs.extend(out);
            m
        }
        Cmd::Explore(c) => base(Command::Explore, &c),
        Cmd::RestrictionTest { common, lambda, hull, sigma } => {
            let mut m = base(Command::RestrictionTest, &common);
            m.lambda = lambda;
            m.sigma = sigma;
            if !hull.is_empty() {
                m.hulls = Some(hull);
            }
            m
        }
        Cmd::PinningFit { common, eps, delta } => {
            let mut m = base(Command::PinningFit, &common);
            m.eps = eps;
            m.delta = delta;
            m
        }
        Cmd::Rerun { file, out } => {
            let mut m = manifest_from_file(&file)?;
            if let Some(o) = out {
                m.outputs = vec![o];
            }
            m
        }
    })
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("LOOPSOUP_WORKERS").ok().and_then(|v| v.parse::<usize>().ok()) {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok();
    }
    let cli = Cli::parse();
    let result = build(cli.command).and_then(|m| {
        let files = run_manifest(&m)?;
        write_outputs(&files)?;
        for f in &files {
            eprintln!("wrote {}", f.path);
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
