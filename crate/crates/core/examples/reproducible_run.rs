//! Runs a manifest under two worker counts and checks the outputs match.

use loopsoup::io::{run_manifest, Command, ExperimentManifest};
use loopsoup::DomainKind;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = ExperimentManifest::new(Command::Explore, DomainKind::Disk { radius: 32 }, 17);
    let run = |workers| {
        rayon::ThreadPoolBuilder::new().num_threads(workers).build().unwrap().install(|| run_manifest(&m))
    };
    let one = run(1).map_err(|e| e.message)?;
    let four = run(4).map_err(|e| e.message)?;
    println!("{}", one[0].contents);
    println!("identical under 1 and 4 workers: {}", one == four);
    Ok(())
}
