//! Sweep harness: synthetic instances across sizes, all requested
//! backends, one CSV row per run with within-run medians.
//!
//! Instances run in parallel across a bounded worker pool; per-run seeds
//! derive from the master seed and the run index, and rows are emitted in
//! canonical `(n, instance, backend)` order, so output is byte-identical
//! for any worker count.

use anyhow::{Context, Result};
use rayon::prelude::*;

use hsdpc_core::seeding::{derive, Stream};
use hsdpc_core::synth::feasible_instance;
use hsdpc_core::{predictor_corrector, BackendKind, SolverConfig};

use crate::io::format_sig;

/// One sweep run descriptor.
#[derive(Debug, Clone, Copy)]
struct RunSpec {
    n: usize,
    m: usize,
    instance_idx: usize,
    backend: BackendKind,
    backend_idx: usize,
    seed: u64,
}

fn backend_name(b: BackendKind) -> &'static str {
    match b {
        BackendKind::Exact => "exact",
        BackendKind::ConjugateGradient => "cg",
        BackendKind::QlsaSim => "qlsa",
    }
}

fn median(mut values: Vec<f64>) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

/// Runs the sweep and renders the aggregate CSV.
pub fn run_sweep(
    sizes: &[usize],
    count: usize,
    backends: &[BackendKind],
    workers: usize,
    base_config: &SolverConfig,
    master_seed: u64,
) -> Result<String> {
    let mut specs = Vec::new();
    for (si, &n) in sizes.iter().enumerate() {
        let m = n.div_ceil(2);
        for instance_idx in 0..count {
            let run_index = (si * count + instance_idx) as u64;
            let seed = derive(master_seed, Stream::InstanceGen, run_index);
            for (backend_idx, &backend) in backends.iter().enumerate() {
                specs.push(RunSpec {
                    n,
                    m,
                    instance_idx,
                    backend,
                    backend_idx,
                    seed,
                });
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .context("worker pool")?;

    let mut rows: Vec<(usize, usize, usize, String)> = pool.install(|| {
        specs
            .par_iter()
            .map(|spec| {
                let generated = feasible_instance(spec.n, spec.m, spec.seed);
                let config = SolverConfig {
                    backend: spec.backend,
                    seed: derive(spec.seed, Stream::Solve, 0),
                    ..base_config.clone()
                };
                let report = predictor_corrector::run(&generated.problem, &config)
                    .map_err(|f| anyhow::anyhow!("run failed: {}", f.error))?;
                let kappas: Vec<f64> = report.trace.iter().map(|r| r.kappa).collect();
                let costs: Vec<f64> = report.trace.iter().map(|r| r.cost_units).collect();
                let line = format!(
                    "{},{},{},{},{},{}\n",
                    spec.n,
                    spec.m,
                    backend_name(spec.backend),
                    report.iterations,
                    format_sig(median(costs)),
                    format_sig(median(kappas)),
                );
                Ok((spec.n, spec.instance_idx, spec.backend_idx, line))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    rows.sort_by_key(|&(n, idx, b, _)| (n, idx, b));
    let mut out = String::from("n,m,backend,median_iterations,median_cost,median_kappa\n");
    for (_, _, _, line) in rows {
        out.push_str(&line);
    }
    Ok(out)
}
