//! Benchmark grid: (n, delta, method) cells sharing instances per (n, delta),
//! run on the library's worker pool and merged in a deterministic order.

use std::fs;
use std::path::{Path, PathBuf};

use qubo_admm::exec;
use qubo_admm::qkp::{self, QkpInstance, MAX_ORACLE_VARS};

use crate::methods::{self, Method, SolverSpec};
use crate::record::RunRecord;
use crate::CliError;

pub struct BenchConfig {
    pub n_list: Vec<usize>,
    pub delta_list: Vec<f64>,
    pub instances: usize,
    pub methods: Vec<Method>,
    pub repeats: usize,
    pub seed: u64,
    pub csv_path: PathBuf,
    pub plot_path: Option<PathBuf>,
}

struct CsvRow {
    n: usize,
    delta: f64,
    method: &'static str,
    postprocess: String,
    instances: usize,
    repeats: usize,
    regenerated: u64,
    mape: f64,
    feasibility_rate: f64,
    mean_iterations: f64,
    mean_total_s: f64,
    mean_sampler_s: f64,
    mean_postprocess_s: f64,
}

struct CellResult {
    row: CsvRow,
    records: Vec<RunRecord>,
}

/// splitmix64 finalizer; spreads structured indices over the seed space so
/// instance slots and repeat seeds cannot collide by construction pattern.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn derive_seed(root: u64, parts: &[u64]) -> u64 {
    parts.iter().enumerate().fold(root, |acc, (i, &p)| {
        mix64(acc ^ p.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (i as u64) << 56)
    })
}

pub fn run(cfg: &BenchConfig, base: &SolverSpec) -> Result<i32, CliError> {
    validate(cfg)?;

    // One instance set per (n, delta), shared by every method so the grid
    // compares methods on identical inputs. Optima come from the exact
    // oracle; degenerate draws are replaced per the generation policy and
    // counted in the `regenerated` column.
    let mut sets: Vec<Vec<(QkpInstance, i64)>> = Vec::new();
    let mut regenerated: Vec<u64> = Vec::new();
    for (ni, &n) in cfg.n_list.iter().enumerate() {
        for (di, &delta) in cfg.delta_list.iter().enumerate() {
            let mut set = Vec::with_capacity(cfg.instances);
            let mut skipped_total = 0;
            for k in 0..cfg.instances {
                let slot = derive_seed(cfg.seed, &[ni as u64, di as u64, k as u64]);
                let (inst, skipped) =
                    qkp::generate_nondegenerate(n, delta, slot).map_err(CliError::param)?;
                skipped_total += skipped;
                let (_, opt) = qkp::brute_force_opt(&inst).map_err(CliError::param)?;
                set.push((inst, opt));
            }
            sets.push(set);
            regenerated.push(skipped_total);
        }
    }

    let cells: Vec<(usize, usize, usize)> = (0..cfg.n_list.len())
        .flat_map(|ni| {
            (0..cfg.delta_list.len())
                .flat_map(move |di| (0..cfg.methods.len()).map(move |mi| (ni, di, mi)))
        })
        .collect();

    let results: Vec<Result<CellResult, CliError>> = exec::map_indexed(cells.len(), |c| {
        let (ni, di, mi) = cells[c];
        run_cell(
            cfg,
            base,
            ni,
            di,
            mi,
            &sets[ni * cfg.delta_list.len() + di],
            regenerated[ni * cfg.delta_list.len() + di],
        )
    });
    let mut results: Vec<CellResult> = results.into_iter().collect::<Result<_, _>>()?;
    results.sort_by(|a, b| {
        a.row
            .n
            .cmp(&b.row.n)
            .then(a.row.delta.total_cmp(&b.row.delta))
            .then(a.row.method.cmp(b.row.method))
            .then(a.row.postprocess.cmp(&b.row.postprocess))
    });

    for cell in &results {
        for record in &cell.records {
            println!("{}", record.to_line());
        }
    }
    write_csv(&cfg.csv_path, &results)?;
    if let Some(plot) = &cfg.plot_path {
        write_plot_data(plot, &results)?;
    }
    print_summary(&results);
    Ok(0)
}

fn validate(cfg: &BenchConfig) -> Result<(), CliError> {
    let fail = |msg: String| Err(CliError::Parameter(msg));
    if cfg.n_list.is_empty() || cfg.delta_list.is_empty() {
        return fail("n-list and delta-list must be nonempty".into());
    }
    if cfg.instances == 0 || cfg.repeats == 0 {
        return fail("instances and repeats must be at least 1".into());
    }
    for &n in &cfg.n_list {
        if n == 0 || n > MAX_ORACLE_VARS {
            return fail(format!(
                "benchmark sizes must be in 1..={MAX_ORACLE_VARS} so the exact \
                 oracle can score accuracy; got {n}"
            ));
        }
    }
    for &d in &cfg.delta_list {
        if !(d.is_finite() && d > 0.0 && d <= 1.0) {
            return fail(format!("density {d} outside (0, 1]"));
        }
    }
    Ok(())
}

fn run_cell(
    cfg: &BenchConfig,
    base: &SolverSpec,
    ni: usize,
    di: usize,
    mi: usize,
    set: &[(QkpInstance, i64)],
    regenerated: u64,
) -> Result<CellResult, CliError> {
    let n = cfg.n_list[ni];
    let delta = cfg.delta_list[di];
    let method = cfg.methods[mi];

    let mut records = Vec::with_capacity(set.len() * cfg.repeats);
    let mut opts = Vec::new();
    let mut founds = Vec::new();
    let mut feasible = 0usize;
    let mut sum_iter = 0.0;
    let mut sum_total = 0.0;
    let mut sum_sampler = 0.0;
    let mut sum_post = 0.0;

    for (k, (inst, opt)) in set.iter().enumerate() {
        for r in 0..cfg.repeats {
            let mut spec = base.clone();
            spec.method = method;
            spec.seed = derive_seed(
                cfg.seed,
                &[0x5017e, ni as u64, di as u64, mi as u64, k as u64, r as u64],
            );
            let outcome = methods::run(inst, &spec)?;
            opts.push(*opt as f64);
            founds.push(outcome.found.unwrap_or(0) as f64);
            feasible += outcome.feasible as usize;
            sum_iter += outcome.iterations as f64;
            sum_total += outcome.total.as_secs_f64();
            sum_sampler += outcome.sampler.as_secs_f64();
            sum_post += outcome.postprocess.as_secs_f64();
            let id = format!("n{}_d{}_s{}", inst.n, inst.delta, inst.seed);
            records.push(RunRecord::new(id, &spec, &outcome, Some(*opt)));
        }
    }

    let runs = (set.len() * cfg.repeats) as f64;
    let row = CsvRow {
        n,
        delta,
        method: method.tag(),
        postprocess: records
            .first()
            .map_or_else(|| "none".to_string(), |r| r.postprocess.clone()),
        instances: set.len(),
        repeats: cfg.repeats,
        regenerated,
        mape: qkp::mape(&opts, &founds).map_err(CliError::param)?,
        feasibility_rate: feasible as f64 / runs,
        mean_iterations: sum_iter / runs,
        mean_total_s: sum_total / runs,
        mean_sampler_s: sum_sampler / runs,
        mean_postprocess_s: sum_post / runs,
    };
    Ok(CellResult { row, records })
}

fn write_csv(path: &Path, results: &[CellResult]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
    }
    let mut out = String::from(
        "n,delta,method,postprocess,instances,repeats,regenerated,mape,\
         feasibility_rate,mean_iterations,mean_total_s,mean_sampler_s,mean_postprocess_s\n",
    );
    for cell in results {
        let r = &cell.row;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{:.6},{:.4},{:.2},{:.6},{:.6},{:.6}\n",
            r.n,
            r.delta,
            r.method,
            r.postprocess,
            r.instances,
            r.repeats,
            r.regenerated,
            r.mape,
            r.feasibility_rate,
            r.mean_iterations,
            r.mean_total_s,
            r.mean_sampler_s,
            r.mean_postprocess_s,
        ));
    }
    fs::write(path, out)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

/// Tidy long-format series for plotting accuracy and time against n, one
/// series per (metric, delta, method, postprocess).
fn write_plot_data(path: &Path, results: &[CellResult]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
    }
    let mut out = String::from("series,x,y\n");
    for cell in results {
        let r = &cell.row;
        out.push_str(&format!(
            "mape_vs_n:{}:{}:d{},{},{:.6}\n",
            r.method, r.postprocess, r.delta, r.n, r.mape
        ));
    }
    for cell in results {
        let r = &cell.row;
        out.push_str(&format!(
            "time_vs_n:{}:{}:d{},{},{:.6}\n",
            r.method, r.postprocess, r.delta, r.n, r.mean_total_s
        ));
    }
    fs::write(path, out)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn print_summary(results: &[CellResult]) {
    eprintln!(
        "{:>4} {:>6} {:<12} {:<14} {:>8} {:>6} {:>10}",
        "n", "delta", "method", "postprocess", "mape", "feas", "mean_s"
    );
    for cell in results {
        let r = &cell.row;
        eprintln!(
            "{:>4} {:>6} {:<12} {:<14} {:>8.4} {:>6.2} {:>10.3}",
            r.n, r.delta, r.method, r.postprocess, r.mape, r.feasibility_rate, r.mean_total_s
        );
    }
}
