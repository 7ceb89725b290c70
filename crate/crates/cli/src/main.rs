//! Command-line driver tying the toolkit into reproducible experiments.
//!
//! Subcommands: `stats`, `sim`, `fit`, `cv`, `predict`. All randomness
//! flows from the single `--seed`; identical inputs and seed produce
//! byte-identical outputs. Exit codes: 0 success, 2 usage or input
//! error, 3 numerical divergence.

mod config;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use config::{resolve, FileConfig};
use std::fs;
use std::path::{Path, PathBuf};
use tritensor::data::Dataset;
use tritensor::eval::rank_for_disease;
use tritensor::experiment::{
    check_fold_count, run_cv_triplet, run_cv_type, CvTripletReport, CvTypeReport, FitMethod,
};
use tritensor::io::{
    load_dag, load_model, load_similarity, load_triplets, save_model, save_similarity,
    write_predictions, ModelKind,
};
use tritensor::sim::{build_similarity_matrices, SimParams, SimilarityMatrix};
use tritensor::solver::{cp_als_fit, predict_scores, tdrc_fit, Hyperparams};

#[derive(Parser)]
#[command(name = "tritensor", version, about = "Multi-type association prediction via tensor completion")]
struct Cli {
    /// Master seed; all randomness derives from it.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for parallel sections (0 = all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Log progress details to stderr.
    #[arg(long, global = true)]
    verbose: bool,

    /// Optional key=value config file; flags win over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print dataset statistics.
    Stats {
        #[arg(long)]
        triplets: PathBuf,
        /// Drop miRNAs/diseases with fewer associations than this.
        #[arg(long)]
        min_assoc: Option<usize>,
    },
    /// Build both similarity matrices from a triplet file and a disease hierarchy.
    Sim {
        #[arg(long)]
        triplets: PathBuf,
        #[arg(long)]
        dag: PathBuf,
        /// Semantic contribution decay factor.
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Fit a model and write the checkpoint plus iteration history.
    Fit {
        #[arg(long)]
        triplets: PathBuf,
        #[arg(long)]
        mirna_sim: Option<PathBuf>,
        #[arg(long)]
        disease_sim: Option<PathBuf>,
        #[arg(long, value_enum)]
        method: Option<Method>,
        #[command(flatten)]
        hp: HpArgs,
    },
    /// Cross-validate and report metrics.
    Cv {
        #[arg(long)]
        triplets: PathBuf,
        #[arg(long)]
        mirna_sim: Option<PathBuf>,
        #[arg(long)]
        disease_sim: Option<PathBuf>,
        #[arg(long, value_enum)]
        protocol: Protocol,
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long, value_enum)]
        method: Option<Method>,
        /// Aggregate by pooling predictions across folds instead of
        /// averaging per-fold metrics.
        #[arg(long)]
        pooled: bool,
        #[command(flatten)]
        hp: HpArgs,
    },
    /// Rank unknown cells for one disease (or all) from a checkpoint.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        triplets: PathBuf,
        #[arg(long, conflicts_with = "all")]
        disease: Option<String>,
        #[arg(long)]
        all: bool,
        /// List length per disease.
        #[arg(long)]
        top: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Tdrc,
    Cp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Protocol {
    Type,
    Triplet,
}

#[derive(Args, Debug, Clone)]
struct HpArgs {
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    rho_init: Option<f64>,
    #[arg(long)]
    rho_cap: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    cg_tol: Option<f64>,
    #[arg(long)]
    cg_max_iter: Option<usize>,
}

impl HpArgs {
    fn build(&self, cfg: &FileConfig, seed: u64) -> Result<Hyperparams> {
        let d = Hyperparams::default();
        Ok(Hyperparams {
            rank: resolve(self.rank, cfg, "rank", d.rank)?,
            alpha: resolve(self.alpha, cfg, "alpha", d.alpha)?,
            beta: resolve(self.beta, cfg, "beta", d.beta)?,
            lambda: resolve(self.lambda, cfg, "lambda", d.lambda)?,
            mu: resolve(self.mu, cfg, "mu", d.mu)?,
            rho_init: resolve(self.rho_init, cfg, "rho_init", d.rho_init)?,
            rho_cap: resolve(self.rho_cap, cfg, "rho_cap", d.rho_cap)?,
            tol: resolve(self.tol, cfg, "tol", d.tol)?,
            max_iter: resolve(self.max_iter, cfg, "max_iter", d.max_iter)?,
            cg_tol: resolve(self.cg_tol, cfg, "cg_tol", d.cg_tol)?,
            cg_max_iter: resolve(self.cg_max_iter, cfg, "cg_max_iter", d.cg_max_iter)?,
            seed,
        })
    }
}

fn main() {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e:#}");
            let divergence = e
                .chain()
                .any(|c| matches!(c.downcast_ref(), Some(tritensor::Error::Diverged(_))));
            std::process::exit(if divergence { 3 } else { 2 });
        }
    }
}

fn require_file(path: &Path) -> Result<()> {
    if !path.is_file() {
        bail!("input file not found: {}", path.display());
    }
    Ok(())
}

fn ensure_out_dir(out: &Path) -> Result<()> {
    fs::create_dir_all(out)
        .with_context(|| format!("cannot create output directory {}", out.display()))?;
    Ok(())
}

/// Similarity labels must line up with the dataset vocabulary so that
/// matrix indices and tensor indices agree.
fn check_labels(sm: &SimilarityMatrix, names: &[String], what: &str) -> Result<()> {
    if sm.labels.len() != names.len() {
        bail!(
            "{what} similarity has {} labels but the dataset has {} entries",
            sm.labels.len(),
            names.len()
        );
    }
    for (a, b) in sm.labels.iter().zip(names.iter()) {
        if a.trim().to_lowercase() != b.trim().to_lowercase() {
            bail!("{what} similarity label '{a}' does not match dataset entry '{b}'");
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let seed = resolve(cli.seed, &cfg, "seed", 42u64)?;
    let jobs = resolve(cli.jobs, &cfg, "jobs", 0usize)?;
    let out = match cli.out {
        Some(o) => o,
        None => PathBuf::from(cfg.get::<String>("out")?.unwrap_or_else(|| ".".into())),
    };
    if jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("cannot configure thread pool")?;
    }

    match cli.command {
        Command::Stats { triplets, min_assoc } => cmd_stats(&triplets, min_assoc, &cfg),
        Command::Sim { triplets, dag, delta } => cmd_sim(&triplets, &dag, delta, &cfg, &out),
        Command::Fit {
            triplets,
            mirna_sim,
            disease_sim,
            method,
            hp,
        } => cmd_fit(&triplets, mirna_sim, disease_sim, method, &hp, &cfg, seed, &out),
        Command::Cv {
            triplets,
            mirna_sim,
            disease_sim,
            protocol,
            folds,
            method,
            pooled,
            hp,
        } => cmd_cv(
            &triplets,
            mirna_sim,
            disease_sim,
            protocol,
            folds,
            method,
            pooled,
            &hp,
            &cfg,
            seed,
            &out,
        ),
        Command::Predict {
            model,
            triplets,
            disease,
            all,
            top,
        } => cmd_predict(&model, &triplets, disease, all, top, &cfg, &out),
    }
}

fn load_dataset(path: &Path) -> Result<Dataset> {
    require_file(path)?;
    Ok(load_triplets(path)?)
}

fn stats_lines(ds: &Dataset) -> String {
    let s = ds.stats();
    format!(
        "mirnas\tdiseases\ttypes\ttriplets\tdensity\n{}\t{}\t{}\t{}\t{:.3}%\n",
        s.mirnas,
        s.diseases,
        s.types,
        s.triplets,
        s.density * 100.0
    )
}

fn cmd_stats(triplets: &Path, min_assoc: Option<usize>, cfg: &FileConfig) -> Result<()> {
    let ds = load_dataset(triplets)?;
    let min_assoc = resolve(min_assoc, cfg, "min_assoc", 0usize)?;
    let ds = if min_assoc > 1 {
        ds.filter_min_associations(min_assoc)?
    } else {
        ds
    };
    print!("{}", stats_lines(&ds));
    Ok(())
}

fn cmd_sim(
    triplets: &Path,
    dag_path: &Path,
    delta: Option<f64>,
    cfg: &FileConfig,
    out: &Path,
) -> Result<()> {
    let ds = load_dataset(triplets)?;
    require_file(dag_path)?;
    let delta = resolve(delta, cfg, "delta", 0.5)?;
    let params = SimParams::new(delta)?;
    let dag = load_dag(dag_path)?;
    log::info!("hierarchy: {} nodes", dag.len());

    let (s_m, s_n) = build_similarity_matrices(&ds, &dag, params)?;
    ensure_out_dir(out)?;
    save_similarity(&s_m, out.join("mirna_similarity.tsv"))?;
    save_similarity(&s_n, out.join("disease_similarity.tsv"))?;

    let mut summary = String::from("matrix\tsize\tmean_offdiag\tmax_offdiag\n");
    for (name, sm) in [("mirna", &s_m), ("disease", &s_n)] {
        let n = sm.n();
        let mut sum = 0.0;
        let mut max = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    sum += sm.get(i, j);
                    max = max.max(sm.get(i, j));
                }
            }
        }
        let denom = (n * n).saturating_sub(n).max(1) as f64;
        summary.push_str(&format!("{name}\t{n}\t{:.6}\t{:.6}\n", sum / denom, max));
    }
    fs::write(out.join("sim_summary.tsv"), &summary)?;
    print!("{}", stats_lines(&ds));
    print!("{summary}");
    Ok(())
}

fn parse_method(method: Option<Method>, cfg: &FileConfig) -> Result<FitMethod> {
    let m = match method {
        Some(m) => m,
        None => match cfg.get::<String>("method")?.as_deref() {
            Some("cp") => Method::Cp,
            Some("tdrc") | None => Method::Tdrc,
            Some(other) => bail!("config key 'method': unknown value '{other}'"),
        },
    };
    Ok(match m {
        Method::Tdrc => FitMethod::Tdrc,
        Method::Cp => FitMethod::CpAls,
    })
}

/// Load both similarity matrices and check them against the dataset.
fn load_sims(
    ds: &Dataset,
    mirna_sim: Option<PathBuf>,
    disease_sim: Option<PathBuf>,
) -> Result<(SimilarityMatrix, SimilarityMatrix)> {
    let (Some(mp), Some(dp)) = (mirna_sim, disease_sim) else {
        bail!(
            "the tdrc method needs --mirna-sim and --disease-sim \
             (generate them with the `sim` subcommand, or pass --method cp)"
        );
    };
    require_file(&mp)?;
    require_file(&dp)?;
    let s_m = load_similarity(&mp)?;
    let s_n = load_similarity(&dp)?;
    check_labels(&s_m, ds.mirnas.names(), "miRNA")?;
    check_labels(&s_n, ds.diseases.names(), "disease")?;
    Ok((s_m, s_n))
}

#[allow(clippy::too_many_arguments)]
fn cmd_fit(
    triplets: &Path,
    mirna_sim: Option<PathBuf>,
    disease_sim: Option<PathBuf>,
    method: Option<Method>,
    hp_args: &HpArgs,
    cfg: &FileConfig,
    seed: u64,
    out: &Path,
) -> Result<()> {
    let ds = load_dataset(triplets)?;
    let hp = hp_args.build(cfg, seed)?;
    hp.validate()?;
    let method = parse_method(method, cfg)?;
    let x = ds.tensor();
    ensure_out_dir(out)?;
    let history_path = out.join("fit_history.tsv");
    let model_path = out.join("model.bin");

    match method {
        FitMethod::Tdrc => {
            let (s_m, s_n) = load_sims(&ds, mirna_sim, disease_sim)?;
            let fit = tdrc_fit(&x, &s_m.values, &s_n.values, &hp)?;
            let mut hist = String::from("iter\tobjective\tprimal_res1\tprimal_res2\trho1\trho2\n");
            for h in &fit.history {
                hist.push_str(&format!(
                    "{}\t{:.16e}\t{:.16e}\t{:.16e}\t{:.16e}\t{:.16e}\n",
                    h.iter, h.objective, h.primal_res1, h.primal_res2, h.rho1, h.rho2
                ));
            }
            fs::write(&history_path, hist)?;
            save_model(&fit.factors, &fit.m1, &fit.m2, &hp, ModelKind::Tdrc, &model_path)?;
            let last = fit.history.last().expect("at least one iteration");
            println!(
                "method\titerations\tobjective\ntdrc\t{}\t{:.6e}",
                fit.history.len(),
                last.objective
            );
        }
        FitMethod::CpAls => {
            if mirna_sim.is_some() || disease_sim.is_some() {
                log::warn!("--method cp ignores the similarity matrices");
            }
            let fit = cp_als_fit(&x, hp.rank, hp.tol, hp.max_iter, hp.seed)?;
            let mut hist = String::from("sweep\tresidual\n");
            for h in &fit.history {
                hist.push_str(&format!("{}\t{:.16e}\n", h.sweep, h.residual));
            }
            fs::write(&history_path, hist)?;
            let r = hp.rank;
            let zero = tritensor::Matrix::zeros((r, r));
            save_model(&fit.factors, &zero, &zero, &hp, ModelKind::CpAls, &model_path)?;
            println!(
                "method\tsweeps\tresidual\ncp\t{}\t{:.6e}",
                fit.history.len(),
                fit.final_residual()
            );
        }
    }
    log::info!("wrote {} and {}", model_path.display(), history_path.display());
    Ok(())
}

fn format_cv_type(report: &CvTypeReport, pooled: bool) -> String {
    let mut out = String::from("fold\ttop1_precision\ttop1_recall\ttop1_f1\n");
    for (f, m) in report.per_fold.iter().enumerate() {
        out.push_str(&format!(
            "{f}\t{:.6}\t{:.6}\t{:.6}\n",
            m.precision, m.recall, m.f1
        ));
    }
    let (label, m) = if pooled {
        ("pooled", &report.pooled)
    } else {
        ("mean", &report.mean)
    };
    out.push_str(&format!(
        "{label}\t{:.6}\t{:.6}\t{:.6}\n",
        m.precision, m.recall, m.f1
    ));
    out
}

fn format_cv_triplet(report: &CvTripletReport, pooled: bool) -> String {
    let mut out = String::from("fold\taupr\tauc\tf1\n");
    for (f, m) in report.per_fold.iter().enumerate() {
        out.push_str(&format!("{f}\t{:.6}\t{:.6}\t{:.6}\n", m.aupr, m.auc, m.f1));
    }
    let (label, m) = if pooled {
        ("pooled", &report.pooled)
    } else {
        ("mean", &report.mean)
    };
    out.push_str(&format!("{label}\t{:.6}\t{:.6}\t{:.6}\n", m.aupr, m.auc, m.f1));
    out
}

#[allow(clippy::too_many_arguments)]
fn cmd_cv(
    triplets: &Path,
    mirna_sim: Option<PathBuf>,
    disease_sim: Option<PathBuf>,
    protocol: Protocol,
    folds: Option<usize>,
    method: Option<Method>,
    pooled: bool,
    hp_args: &HpArgs,
    cfg: &FileConfig,
    seed: u64,
    out: &Path,
) -> Result<()> {
    let ds = load_dataset(triplets)?;
    let hp = hp_args.build(cfg, seed)?;
    hp.validate()?;
    let k = resolve(folds, cfg, "folds", 10usize)?;
    check_fold_count(k)?;
    let method = parse_method(method, cfg)?;
    let (s_m, s_n) = match method {
        FitMethod::Tdrc => {
            let (a, b) = load_sims(&ds, mirna_sim, disease_sim)?;
            (a.values, b.values)
        }
        FitMethod::CpAls => {
            if mirna_sim.is_some() || disease_sim.is_some() {
                log::warn!("--method cp ignores the similarity matrices");
            }
            let (m, n, _) = ds.dims();
            (
                tritensor::Matrix::eye(m),
                tritensor::Matrix::eye(n),
            )
        }
    };

    let table = match protocol {
        Protocol::Type => {
            let report = run_cv_type(&ds, &s_m, &s_n, &hp, k, seed, method)?;
            format_cv_type(&report, pooled)
        }
        Protocol::Triplet => {
            let report = run_cv_triplet(&ds, &s_m, &s_n, &hp, k, seed, method)?;
            format_cv_triplet(&report, pooled)
        }
    };
    ensure_out_dir(out)?;
    fs::write(out.join("cv_metrics.tsv"), &table)?;
    print!("{table}");
    Ok(())
}

fn cmd_predict(
    model_path: &Path,
    triplets: &Path,
    disease: Option<String>,
    all: bool,
    top: Option<usize>,
    cfg: &FileConfig,
    out: &Path,
) -> Result<()> {
    require_file(model_path)?;
    let ds = load_dataset(triplets)?;
    let model = load_model(model_path)?;
    if model.factors.dims() != ds.dims() {
        bail!(
            "model dimensions {:?} do not match dataset dimensions {:?}",
            model.factors.dims(),
            ds.dims()
        );
    }
    let top = resolve(top, cfg, "top", 20usize)?;
    let diseases: Vec<usize> = if all {
        (0..ds.diseases.len()).collect()
    } else {
        let name = disease.ok_or_else(|| anyhow!("pass --disease <id> or --all"))?;
        let idx = ds
            .diseases
            .get(&name)
            .ok_or_else(|| anyhow!("unknown disease '{name}'"))?;
        vec![idx]
    };

    let scores = predict_scores(&model.factors);
    let rankings: Vec<(usize, Vec<_>)> = diseases
        .into_iter()
        .map(|d| (d, rank_for_disease(&scores, d, &ds.triplets, top)))
        .collect();
    ensure_out_dir(out)?;
    let path = out.join("predictions.tsv");
    write_predictions(&path, &ds, &rankings)?;
    println!(
        "predictions\t{}\nrows\t{}",
        path.display(),
        rankings.iter().map(|(_, r)| r.len()).sum::<usize>()
    );
    Ok(())
}
