use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::cluster::ClusterSet;
use crate::exploration::{explore_chord, Chord, ExplorationResult};
use crate::lattice::{DomainKind, Site};
use crate::loop_measure::LoopSoupSample;
use crate::topology::boundary_touching_loops;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    AllLoops,
    Fillings,
    Contours,
    BoundaryTouching,
    Interior,
    Exploration,
}

impl std::str::FromStr for Layer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.replace('-', "_"))).map_err(|_| format!("unknown layer '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Palette {
    pub contour: String,
    pub boundary_touching: String,
    pub interior: String,
    pub highlight: String,
    pub filling: String,
}

impl Default for Palette {
    fn default() -> Self {
        Palette {
            contour: "red".into(),
            boundary_touching: "blue".into(),
            interior: "black".into(),
            highlight: "green".into(),
            filling: "#f4d6d6".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderSpec {
    pub layers: Vec<Layer>,
    #[serde(default)]
    pub palette: Palette,
    /// Pixels per lattice spacing.
    pub scale: f64,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec { layers: vec![Layer::Fillings, Layer::AllLoops, Layer::Contours], palette: Palette::default(), scale: 4.0 }
    }
}

fn fmt_points(points: impl IntoIterator<Item = [f64; 2]>) -> String {
    let mut s = String::new();
    for (k, [x, y]) in points.into_iter().enumerate() {
        if k > 0 {
            s.push(' ');
        }
        write!(s, "{},{}", x, -y).unwrap();
    }
    s
}

fn closed_path(points: &[[f64; 2]]) -> String {
    let mut d = String::new();
    for (k, [x, y]) in points.iter().enumerate() {
        write!(d, "{}{} {} ", if k == 0 { "M" } else { "L" }, x, -y).unwrap();
    }
    d.push('Z');
    d
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Standalone SVG of a sample. Layers are drawn in the fixed order
/// fillings, loops, contours, annotations whatever order `spec` lists them.
pub fn render_svg(sample: &LoopSoupSample, spec: &RenderSpec, metadata: Option<&str>) -> String {
    let has = |l: Layer| spec.layers.contains(&l);
    let domain = &sample.config.domain;
    let bb = domain.bbox().expand(2);
    let (w, h) = (bb.width() as f64, bb.height() as f64);
    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        w * spec.scale,
        h * spec.scale,
        bb.min_x,
        -bb.max_y,
        w,
        h
    )
    .unwrap();
    if let Some(m) = metadata {
        writeln!(svg, "<metadata>{}</metadata>", escape(m)).unwrap();
    }
    svg.push_str(r#"<g id="domain" fill="none" stroke="gray" stroke-width="0.3">"#);
    match domain.kind() {
        DomainKind::Disk { radius } => write!(svg, r#"<circle cx="0" cy="0" r="{}"/>"#, radius as f64 + 0.5).unwrap(),
        DomainKind::HalfPlaneBox { width, height } => write!(
            svg,
            r#"<rect x="{}" y="{}" width="{}" height="{}"/>"#,
            -(width as f64) - 0.5,
            -(height as f64) - 0.5,
            2 * width + 1,
            height + 1
        )
        .unwrap(),
    }
    svg.push_str("</g>\n");

    let clusters = ClusterSet::build(&sample.loops);
    let complete = clusters.complete_clusters(&sample.loops);
    let mut touching = vec![false; sample.loops.len()];
    for cc in &complete {
        for i in boundary_touching_loops(cc, &sample.loops) {
            touching[i] = true;
        }
    }

    if has(Layer::Fillings) {
        writeln!(svg, r#"<g id="fillings" fill="{}" stroke="none">"#, spec.palette.filling).unwrap();
        for cc in &complete {
            writeln!(svg, r#"<path d="{}"/>"#, closed_path(&cc.contour.polyline())).unwrap();
        }
        svg.push_str("</g>\n");
    }

    let loop_layers = [Layer::AllLoops, Layer::BoundaryTouching, Layer::Interior];
    if loop_layers.iter().any(|&l| has(l)) {
        svg.push_str(r#"<g id="loops" fill="none" stroke-width="0.25">"#);
        svg.push('\n');
        for (i, l) in sample.loops.iter().enumerate() {
            let show = has(Layer::AllLoops)
                || (touching[i] && has(Layer::BoundaryTouching))
                || (!touching[i] && has(Layer::Interior));
            if !show {
                continue;
            }
            let color = if touching[i] { &spec.palette.boundary_touching } else { &spec.palette.interior };
            let pts = l.sites().iter().chain(l.sites().first()).map(|s| [s.x as f64, s.y as f64]);
            writeln!(svg, r#"<polyline stroke="{}" points="{}"/>"#, color, fmt_points(pts)).unwrap();
        }
        svg.push_str("</g>\n");
    }

    if has(Layer::Contours) {
        writeln!(svg, r#"<g id="contours" fill="none" stroke="{}" stroke-width="0.4">"#, spec.palette.contour).unwrap();
        for cc in &complete {
            writeln!(svg, r#"<path d="{}"/>"#, closed_path(&cc.contour.polyline())).unwrap();
        }
        svg.push_str("</g>\n");
    }

    if has(Layer::Exploration) {
        let target = Site::ORIGIN;
        let chord = Chord::toward(domain, target);
        let result: Option<ExplorationResult> = explore_chord(sample, &clusters, target, &chord).ok();
        writeln!(svg, r#"<g id="annotations" stroke="{0}" fill="{0}">"#, spec.palette.highlight).unwrap();
        if let Some(r) = &result {
            for s in r.explored.iter() {
                writeln!(
                    svg,
                    r#"<rect x="{}" y="{}" width="1" height="1" fill-opacity="0.25" stroke="none"/>"#,
                    s.x as f64 - 0.5,
                    -(s.y as f64) - 0.5
                )
                .unwrap();
            }
            let pts = chord.sites[..=r.t_index].iter().map(|s| [s.x as f64, s.y as f64]);
            writeln!(svg, r#"<polyline fill="none" stroke-width="0.5" points="{}"/>"#, fmt_points(pts)).unwrap();
        }
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    svg
}
