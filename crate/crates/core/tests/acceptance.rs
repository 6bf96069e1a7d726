//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if any
//! criterion fails. Run with `cargo test --test acceptance -- --nocapture`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::time::{Duration, Instant};

use loopsoup::cluster::ClusterSet;
use loopsoup::exploration::{deep_sites, markov_consistency};
use loopsoup::io::{phase_scan, run_manifest, Command, ExperimentManifest, DEFAULT_C_GRID};
use loopsoup::loop_measure::{sample_free_bridge, sample_loop_soup, sample_loop_soup_with, RwLoop, SoupConfig};
use loopsoup::restriction::{
    alpha_of_kappa, c_of_kappa, calibrate_lambda, choose_lambda, cutpoint_contrast, kappa_of_c, restriction_ratio_test,
    AvoidanceLaw, Chart, ContrastConfig, ExcursionLaw, Hull,
};
use loopsoup::rng::{stream, Tag};
use loopsoup::stats::{chi_square_gof, difference_z, mean_interval};
use loopsoup::topology::articulation_sites;
use loopsoup::{DomainKind, LatticeDomain, Site, SiteSet};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn exponent_algebra() -> Outcome {
    let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
    let fixed = close(c_of_kappa(4.0).unwrap(), 1.0)
        && close(alpha_of_kappa(4.0).unwrap(), 0.25)
        && close(c_of_kappa(3.6).unwrap(), 14.0 / 15.0)
        && close(alpha_of_kappa(3.6).unwrap(), 1.0 / 3.0)
        && close(alpha_of_kappa(8.0 / 3.0 + 1e-13).unwrap(), 0.625);
    let mut worst = 0.0f64;
    for i in 1..=1000 {
        let kappa = 8.0 / 3.0 + (4.0 - 8.0 / 3.0) * i as f64 / 1000.0;
        let back = kappa_of_c(c_of_kappa(kappa).unwrap()).unwrap();
        worst = worst.max((back - kappa).abs());
    }
    outcome(fixed && worst <= 1e-12, format!("fixed values ok = {fixed}, worst round trip {worst:.2e}"))
}

fn sampler_exactness() -> Outcome {
    let domain = LatticeDomain::disk(40).unwrap();
    let interior = deep_sites(&domain.sites().collect::<SiteSet>(), 3);
    let mut by_len: HashMap<u32, Vec<f64>> = HashMap::new();
    let mut soups = 0;
    while by_len.get(&2).map_or(0, Vec::len) < 100_000 {
        let cfg = SoupConfig::new(domain, 1.0, 1000 + soups).with_cutoff(2).with_n_max(16);
        let sample = sample_loop_soup(&cfg).unwrap();
        for len in [2u32, 4] {
            let mut counts: HashMap<Site, u32> = HashMap::new();
            for l in sample.loops.iter().filter(|l| l.len() == len as usize) {
                *counts.entry(l.root()).or_default() += 1;
            }
            let cells = by_len.entry(len).or_default();
            cells.extend(interior.iter().map(|s| counts.get(&s).copied().unwrap_or(0) as f64));
        }
        soups += 1;
    }
    let mut pass = true;
    let mut detail = Vec::new();
    for (len, expected) in [(2u32, 1.0 / 8.0), (4, 9.0 / 256.0)] {
        let cells = &by_len[&len];
        let n = cells.len() as f64;
        let mean = cells.iter().sum::<f64>() / n;
        let var = cells.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let z = (mean - expected) / (var / n).sqrt();
        let dispersion = var / mean;
        pass &= z.abs() < 3.0 && (0.9..=1.1).contains(&dispersion);
        detail.push(format!("len {len}: mean {mean:.5} (z {z:.2}) dispersion {dispersion:.3} over {} cells", cells.len()));
    }
    let mut rng = stream(2024, Tag::Bridge, 4, 0, 0);
    let mut outcomes: HashMap<Vec<Site>, u64> = HashMap::new();
    for _ in 0..36_000 {
        let l = sample_free_bridge(Site::ORIGIN, 4, &mut rng).unwrap();
        *outcomes.entry(l.sites().to_vec()).or_default() += 1;
    }
    let observed: Vec<u64> = outcomes.values().copied().collect();
    let gof = chi_square_gof(&observed, &vec![1.0 / 36.0; observed.len()]).unwrap();
    pass &= observed.len() == 36 && gof.p_value > 0.01;
    detail.push(format!("bridge {} outcomes, chi-square p {:.3}", observed.len(), gof.p_value));
    outcome(pass, detail.join("; "))
}

fn transitive_closure(loops: &[RwLoop]) -> Vec<usize> {
    let traces: Vec<SiteSet> = loops.iter().map(RwLoop::trace).collect();
    let mut label = vec![usize::MAX; loops.len()];
    for start in 0..loops.len() {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = start;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for j in 0..loops.len() {
                if label[j] == usize::MAX && traces[i].intersects(&traces[j]) {
                    label[j] = start;
                    queue.push_back(j);
                }
            }
        }
    }
    label
}

fn components(set: &SiteSet) -> usize {
    let mut seen = HashSet::new();
    let mut count = 0;
    for s in set.iter() {
        if seen.contains(&s) {
            continue;
        }
        count += 1;
        let mut queue = VecDeque::from([s]);
        seen.insert(s);
        while let Some(u) = queue.pop_front() {
            for v in u.adjacent() {
                if set.contains(v) && !seen.contains(&v) {
                    seen.insert(v);
                    queue.push_back(v);
                }
            }
        }
    }
    count
}

fn cluster_oracles() -> Outcome {
    let mut cluster_mismatch = 0;
    let mut loops_seen = 0;
    for k in 0..100u64 {
        let radius = 8 + (k % 9) as u32;
        let c = 0.5 + (k % 7) as f64 * 0.4;
        let cfg = SoupConfig::new(LatticeDomain::disk(radius).unwrap(), c, 500 + k);
        let mut loops = sample_loop_soup(&cfg).unwrap().loops;
        loops.truncate(200);
        loops_seen += loops.len();
        let cs = ClusterSet::build(&loops);
        let brute = transitive_closure(&loops);
        for i in 0..loops.len() {
            for j in 0..i {
                if (cs.cluster_of_loop(i) == cs.cluster_of_loop(j)) != (brute[i] == brute[j]) {
                    cluster_mismatch += 1;
                }
            }
        }
    }
    let mut rng = stream(77, Tag::Replica, 3, 0, 0);
    let mut art_mismatch = 0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=60);
        let set: SiteSet = (0..n).map(|_| Site::new(rng.gen_range(0..9), rng.gen_range(0..9))).collect();
        let base = components(&set);
        let oracle: SiteSet = set
            .iter()
            .filter(|&s| components(&set.iter().filter(|&t| t != s).collect()) > base)
            .collect();
        if articulation_sites(&set, None) != oracle {
            art_mismatch += 1;
        }
    }
    outcome(
        cluster_mismatch == 0 && art_mismatch == 0,
        format!("{cluster_mismatch} cluster mismatches over {loops_seen} loops, {art_mismatch} articulation mismatches over 100 sets"),
    )
}

fn largest_fraction(c: f64) -> loopsoup::stats::EstimatorReport {
    let base = SoupConfig::new(LatticeDomain::disk(64).unwrap(), c, 0);
    let table = base.length_table().unwrap();
    let values: Vec<f64> = (0..200u64)
        .map(|seed| {
            let sample = sample_loop_soup_with(&base.clone().with_seed(9000 + seed), &table).unwrap();
            ClusterSet::build(&sample.loops).largest_cluster_fraction()
        })
        .collect();
    mean_interval(&values, 0.95)
}

fn sub_supercritical() -> Outcome {
    let low = largest_fraction(0.5);
    let high = largest_fraction(1.5);
    let z = difference_z(&high, &low);
    outcome(z >= 3.0, format!("fraction c=0.5 {:.4}, c=1.5 {:.4}, z {z:.2}", low.estimate, high.estimate))
}

fn phase_transition() -> Outcome {
    let base = SoupConfig::new(LatticeDomain::disk(64).unwrap(), 1.0, 11);
    let report = phase_scan(&base, &DEFAULT_C_GRID, 3000, 200_000).unwrap();
    let fractions: Vec<String> = report.rows.iter().map(|r| format!("{:.3}", r.fraction.estimate)).collect();
    let enough = report.rows.iter().all(|r| r.clusters >= 500);
    let p = report.spearman.as_ref().map_or(1.0, |g| g.p_value);
    let drop = report.drop_z.unwrap_or(f64::NAN);
    outcome(
        enough && p < 0.01 && drop >= 3.0,
        format!("fractions [{}], Spearman p {p:.4}, drop z {drop:.2}", fractions.join(", ")),
    )
}

fn restriction_form() -> Outcome {
    let domain = LatticeDomain::disk(96).unwrap();
    let chart = Chart::Disk { radius: 96, sigma: 6.0 };
    let first = Hull::new(-2.0, 1.0, chart).unwrap();
    let second = Hull::new(-4.0, 1.0, chart).unwrap();
    let law = ExcursionLaw::lower_half(domain, 1.0).unwrap();
    let lambda = choose_lambda(&law, &first, 0.12, 1000, 1).unwrap();
    let r = restriction_ratio_test(&AvoidanceLaw::Excursions(law.with_lambda(lambda)), &first, &second, 10_000, 2).unwrap();
    let (p1, p2) = (r.first.avoidance.estimate, r.second.avoidance.estimate);
    let in_range = [p1, p2].iter().all(|p| (0.05..=0.95).contains(p));
    outcome(
        in_range && r.z.abs() < 3.0,
        format!(
            "lambda {lambda:.2}, avoidance {p1:.4} / {p2:.4}, log-ratio {:.4} vs {:.4} (se {:.4}, z {:.2})",
            r.observed, r.predicted, r.std_error, r.z
        ),
    )
}

fn cutpoint() -> Outcome {
    let domain = LatticeDomain::disk(96).unwrap();
    let reference = Hull::new(-2.0, 1.0, Chart::Disk { radius: 96, sigma: 6.0 }).unwrap();
    let pilot = ExcursionLaw::lower_half(domain, 20.0).unwrap();
    let cal = calibrate_lambda(&pilot, &reference, 0.625, 2000, 3).unwrap();
    let cfg = ContrastConfig { radii: vec![32, 64, 96], replicas: 400, lambda: cal.lambda_star, seed: 5, max_tries: 10_000 };
    let report = cutpoint_contrast(&cfg).unwrap();
    let rows: Vec<String> = report
        .rows
        .iter()
        .map(|r| format!("R={} loop {:.3} exc {:.3}", r.radius, r.loop_frequency.estimate, r.excursion_frequency.estimate))
        .collect();
    let z = report.z_at_largest();
    outcome(
        z >= 3.0 && report.excursion_non_increasing,
        format!(
            "lambda {:.3}; {}; z {z:.2}; excursion non-increasing {}",
            cal.lambda_star,
            rows.join(", "),
            report.excursion_non_increasing
        ),
    )
}

fn markov_shadow() -> Outcome {
    let cfg = SoupConfig::new(LatticeDomain::disk(64).unwrap(), 1.0, 3).with_cutoff(2);
    let r = markov_consistency(&cfg, 700, 3).unwrap();
    let done = r.explorations - r.skipped;
    outcome(
        done >= 500 && r.z.abs() < 3.0,
        format!("{done} explorations, {} cells, mean {:.5} vs {:.5}, z {:.2}", r.cells, r.mean.estimate, r.expected, r.z),
    )
}

fn with_workers<T: Send>(n: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap().install(f)
}

fn reproducibility() -> Outcome {
    let disk = DomainKind::Disk { radius: 24 };
    let sample = ExperimentManifest::new(Command::Sample, disk, 41);
    let explore = ExperimentManifest::new(Command::Explore, disk, 42);
    let mut restriction = ExperimentManifest::new(Command::RestrictionTest, disk, 43);
    restriction.lambda = Some(8.0);
    restriction.replicas = Some(300);
    let mut scan = ExperimentManifest::new(Command::PhaseScan, disk, 44);
    scan.c_grid = Some(vec![0.4, 1.0]);
    scan.min_clusters = Some(20);
    scan.replicas = Some(200);
    let mut identical = 0;
    let manifests = [sample, explore, restriction, scan];
    for m in &manifests {
        let first = with_workers(1, || run_manifest(m).unwrap());
        let second = with_workers(3, || run_manifest(m).unwrap());
        let doc: serde_json::Value = serde_json::from_str(&first[0].contents).unwrap();
        let stored: ExperimentManifest = serde_json::from_value(doc["manifest"].clone()).unwrap();
        let rerun = with_workers(2, || run_manifest(&stored).unwrap());
        if first == second && first == rerun {
            identical += 1;
        }
    }
    outcome(
        identical == manifests.len(),
        format!("{identical}/{} commands byte-identical across 1, 2 and 3 workers and manifest re-runs", manifests.len()),
    )
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome, Duration); 9] = [
        ("exponent algebra", exponent_algebra, Duration::from_secs(1)),
        ("sampler exactness", sampler_exactness, Duration::from_secs(120)),
        ("cluster oracle equivalence", cluster_oracles, Duration::from_secs(60)),
        ("sub/supercritical contrast", sub_supercritical, Duration::from_secs(600)),
        ("phase-transition monotonicity", phase_transition, Duration::from_secs(1800)),
        ("restriction functional form", restriction_form, Duration::from_secs(900)),
        ("cut-point contrast", cutpoint, Duration::from_secs(1200)),
        ("markov-consistency shadow", markov_shadow, Duration::from_secs(1200)),
        ("reproducibility", reproducibility, Duration::from_secs(120)),
    ];
    let mut failed = Vec::new();
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let pass = o.pass && elapsed < *budget;
        println!(
            "{} criterion {}: {name}: {} [{:.1}s of {}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        if !pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
