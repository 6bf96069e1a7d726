//! Experiment manifests, the command implementations behind the `loopsoup`
//! binary, and SVG rendering.

mod commands;
mod manifest;
mod render;

pub use commands::{
    cmd_explore, cmd_phase_scan, cmd_pinning_fit, cmd_render, cmd_restriction_test, cmd_sample, load_sample_file, phase_scan,
    run_manifest, write_outputs, OutputFile, PhaseScanReport, PhaseScanRow, DEFAULT_C_GRID,
};
pub use manifest::{parse_domain, CliError, Command, ExperimentManifest, EXIT_BUDGET, EXIT_CONFIG};
pub use render::{render_svg, Layer, Palette, RenderSpec};
