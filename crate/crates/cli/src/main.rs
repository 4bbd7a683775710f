mod manifest;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::SystemTime;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ensemble_spectra::ensembles::{calibrate, MicMethod, MicSamplerConfig};
use ensemble_spectra::entropy::{entropy_scaling_scan, relative_entropy};
use ensemble_spectra::enumeration::{ensemble_table, write_golden, Functional, GraphFunctional, ENUMERATION_CAP};
use ensemble_spectra::experiments::{
    canonical_map, degree_concentration_stat, delta_experiment, lambda_ratio_gap, microcanonical_map,
    ratio_concentration, transfer_check, ExperimentConfig, TransferEvent,
};
use ensemble_spectra::io::{load_constraint, load_edge_list, write_edge_list};
use ensemble_spectra::report::{fmt_sig17, report_path, sig17, spec_hash, write_csv};
use ensemble_spectra::schedule::{DensitySchedule, FamilyKind, SpecFamily};
use ensemble_spectra::spectral::{degree_ratio, lambda1, lambda2, residual_decomposition, DEFAULT_TOL};
use ensemble_spectra::{ConstraintSpec, Error, Graph};
use serde::Serialize;

use manifest::RunManifest;

const OUT_ENV: &str = "ENSEMBLE_SPECTRA_OUT";
const DEFAULT_OUT: &str = "results";
const DEFAULT_SAMPLES: usize = 200;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 4,
            CliError::Core(e) => match e {
                Error::CalibrationDiverged { .. } | Error::NotConverged { .. } | Error::TooManyRejections(_) => 3,
                Error::Io(_) => 4,
                Error::Csv(c) if matches!(c.kind(), csv::ErrorKind::Io(_)) => 4,
                _ => 2,
            },
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "ensemble-spectra", version, about = "Canonical vs microcanonical random-graph ensembles")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; the ENSEMBLE_SPECTRA_OUT variable takes precedence.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Sizes, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    n: Vec<usize>,
    /// Constant edge density.
    #[arg(long, global = true)]
    p: Option<f64>,
    #[arg(long, global = true, value_enum)]
    kind: Option<Kind>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Worker threads (default: machine parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Kind {
    DegreeSequence,
    EdgeCount,
}

impl From<Kind> for FamilyKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::DegreeSequence => FamilyKind::DegreeSequence,
            Kind::EdgeCount => FamilyKind::EdgeCount,
        }
    }
}

/// A single constraint: from a file, an explicit degree list, or `--kind`
/// with `--n` and one of `--L`, `--d`, `--p`.
#[derive(Args, Debug)]
struct SpecArgs {
    #[arg(long)]
    constraint: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    degrees: Vec<usize>,
    /// Edge count.
    #[arg(long = "L")]
    edges: Option<usize>,
    /// Constant degree.
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Ensemble {
    Can,
    Mic,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Stat {
    Degree,
    Ratio,
    Gap,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EventArg {
    Everything,
    Gamma,
    RatioDeviation,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw graphs from either ensemble and write them as edge lists.
    Sample {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value = "both")]
        ensemble: Ensemble,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, value_parser = parse_method)]
        method: Option<MicMethod>,
    },
    /// Largest and second eigenvalue of a graph read from an edge list.
    Lambda {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Canonical minus microcanonical mean of lambda1 per size.
    Delta,
    /// Relative entropy of one constraint, or a scan over `--n`.
    Entropy {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Exact ensemble laws of one small constraint by exhaustive enumeration.
    Enumerate {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Degree, ratio and spectral-gap concentration statistics.
    Concentration {
        #[arg(long, value_enum, default_value = "all")]
        stat: Stat,
    },
    /// Canonical probability of an event complement against exp(-S_n).
    Transfer {
        #[arg(long, value_enum, default_value = "ratio-deviation")]
        event: EventArg,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 0.0)]
        log_power: f64,
    },
    /// Recompute the exact-expectation golden file.
    GoldenRegen {
        #[arg(long)]
        path: Option<PathBuf>,
    },
}

fn parse_method(s: &str) -> Result<MicMethod, String> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|e| e.to_string())
}

struct Context<'a> {
    global: &'a Global,
    started: SystemTime,
}

impl Context<'_> {
    /// Environment override, then `--out-dir`.
    fn explicit_out(&self) -> Option<PathBuf> {
        std::env::var_os(OUT_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
            .or_else(|| self.global.out_dir.clone())
    }

    fn out_dir(&self) -> PathBuf {
        self.explicit_out().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }

    fn experiment_config(&self) -> CliResult<ExperimentConfig> {
        let g = self.global;
        let mut cfg = match &g.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                serde_json::from_str::<ExperimentConfig>(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            }
            None => {
                if g.n.is_empty() {
                    return Err(CliError::Config("either --config or --n is required".into()));
                }
                let family = SpecFamily::new(
                    g.kind.map_or(FamilyKind::DegreeSequence, Into::into),
                    DensitySchedule::Constant { p: g.p.unwrap_or(0.5) },
                );
                ExperimentConfig::new(family, g.n.clone(), DEFAULT_SAMPLES, 0)
            }
        };
        if let Some(seed) = g.seed {
            cfg.seed = seed;
        }
        if !g.n.is_empty() {
            cfg.n_list = g.n.clone();
        }
        if let Some(p) = g.p {
            cfg.family.schedule = DensitySchedule::Constant { p };
        }
        if let Some(k) = g.kind {
            cfg.family.kind = k.into();
        }
        if let Some(s) = g.samples {
            cfg.samples_per_n = s;
        }
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    fn single_n(&self) -> CliResult<usize> {
        match self.global.n.as_slice() {
            [n] => Ok(*n),
            [] => Err(CliError::Config("--n is required".into())),
            _ => Err(CliError::Config("expected a single --n".into())),
        }
    }

    fn constraint(&self, a: &SpecArgs) -> CliResult<ConstraintSpec> {
        let spec = if let Some(path) = &a.constraint {
            load_constraint(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        } else if !a.degrees.is_empty() {
            ConstraintSpec::degree_sequence(a.degrees.clone())
        } else {
            let n = self.single_n()?;
            match (self.global.kind, a.edges, a.d) {
                (Some(Kind::EdgeCount) | None, Some(l), None) => ConstraintSpec::edge_count(n, l),
                (Some(Kind::DegreeSequence) | None, None, Some(d)) => ConstraintSpec::constant_degree(n, d),
                (Some(k), None, None) => {
                    let p = self
                        .global
                        .p
                        .ok_or_else(|| CliError::Config("one of --L, --d or --p is required".into()))?;
                    SpecFamily::new(k.into(), DensitySchedule::Constant { p })
                        .at(n)
                        .map_err(|e| CliError::Config(e.to_string()))?
                        .spec
                }
                _ => return Err(CliError::Config("give --kind with exactly one of --L, --d or --p".into())),
            }
        };
        spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(spec)
    }

    /// Writes the manifest next to the reports, named with the reports' hash.
    fn finish(&self, command: &str, hash: &str, seed: u64, config: &impl Serialize, files: Vec<PathBuf>, dir: &Path) -> CliResult<()> {
        let config = serde_json::to_value(config).map_err(|e| CliError::Config(e.to_string()))?;
        let manifest = RunManifest::new(command, seed, config, self.started, &files)?;
        let path = dir.join(format!("{command}_{hash}_{seed}.manifest.json"));
        manifest.write(&path)?;
        for f in &files {
            println!("wrote {}", f.display());
        }
        println!("manifest {}", path.display());
        Ok(())
    }
}

fn kv(key: &str, value: f64) {
    println!("{key} = {}", fmt_sig17(value));
}

#[derive(Serialize)]
struct SampleRow {
    ensemble: &'static str,
    index: usize,
    edges: usize,
    #[serde(serialize_with = "sig17")]
    lambda1: f64,
    file: String,
}

fn cmd_sample(ctx: &Context, spec_args: &SpecArgs, ensemble: Ensemble, count: usize, method: Option<MicMethod>) -> CliResult<()> {
    let spec = ctx.constraint(spec_args)?;
    let seed = ctx.global.seed.unwrap_or(0);
    let sampler = MicSamplerConfig {
        method,
        ..MicSamplerConfig::default()
    };
    let dir = ctx.out_dir();
    let hash = spec_hash(&(&spec, &sampler));
    let mut draws: Vec<(&'static str, Vec<Graph>)> = Vec::new();
    if matches!(ensemble, Ensemble::Can | Ensemble::Both) {
        let model = calibrate(&spec)?;
        draws.push(("can", canonical_map(&model, seed, count, |g| Ok(g.clone()))?));
    }
    if matches!(ensemble, Ensemble::Mic | Ensemble::Both) {
        draws.push(("mic", microcanonical_map(&spec, &sampler, seed, count, |g| Ok(g.clone()))?));
    }
    fs::create_dir_all(&dir)?;
    let mut rows = Vec::new();
    let mut files = Vec::new();
    for (name, graphs) in &draws {
        for (k, g) in graphs.iter().enumerate() {
            let file = dir.join(format!("sample_{hash}_{seed}_{name}_{k}.txt"));
            let mut buf = Vec::new();
            write_edge_list(g, &mut buf)?;
            fs::write(&file, buf)?;
            let l1 = if g.edge_count() == 0 { 0.0 } else { lambda1(g, DEFAULT_TOL)? };
            rows.push(SampleRow {
                ensemble: name,
                index: k,
                edges: g.edge_count(),
                lambda1: l1,
                file: file.file_name().unwrap().to_string_lossy().into_owned(),
            });
            files.push(file);
        }
    }
    let index = report_path(&dir, "sample", &hash, seed);
    write_csv(&index, &rows)?;
    files.insert(0, index);
    ctx.finish("sample", &hash, seed, &(&spec, &sampler, count), files, &dir)
}

#[derive(Serialize)]
struct LambdaRow {
    n: usize,
    edges: usize,
    #[serde(serialize_with = "sig17")]
    lambda1: f64,
    #[serde(serialize_with = "sig17")]
    lambda2: f64,
    #[serde(serialize_with = "sig17")]
    degree_ratio: f64,
    #[serde(serialize_with = "sig17")]
    residual: f64,
}

fn cmd_lambda(ctx: &Context, edges: &Path, tol: f64) -> CliResult<()> {
    let g = load_edge_list(edges).map_err(|e| match e {
        Error::Io(io) => CliError::Io(io),
        other => CliError::Config(format!("{}: {other}", edges.display())),
    })?;
    let row = if g.edge_count() == 0 {
        LambdaRow {
            n: g.n(),
            edges: 0,
            lambda1: 0.0,
            lambda2: 0.0,
            degree_ratio: 0.0,
            residual: 0.0,
        }
    } else {
        let dec = residual_decomposition(&g, tol)?;
        LambdaRow {
            n: g.n(),
            edges: g.edge_count(),
            lambda1: dec.lambda1,
            lambda2: if g.n() > 1 { lambda2(&g, tol)? } else { 0.0 },
            degree_ratio: degree_ratio(&g)?,
            residual: dec.residual,
        }
    };
    println!("n = {}", row.n);
    println!("edges = {}", row.edges);
    kv("lambda1", row.lambda1);
    kv("lambda2", row.lambda2);
    kv("degree_ratio", row.degree_ratio);
    kv("residual", row.residual);
    if let Some(dir) = ctx.explicit_out() {
        let bytes = fs::read(edges)?;
        let hash = &ensemble_spectra::report::sha256_hex(&bytes)[..16];
        let path = report_path(&dir, "lambda", hash, 0);
        write_csv(&path, &[row])?;
        ctx.finish("lambda", hash, 0, &(edges, tol), vec![path], &dir)?;
    }
    Ok(())
}

fn cmd_delta(ctx: &Context) -> CliResult<()> {
    let cfg = ctx.experiment_config()?;
    let rep = delta_experiment(&cfg)?;
    println!("n,delta,delta_stderr,fk_prediction");
    for r in &rep.rows {
        println!("{},{},{},{}", r.n, fmt_sig17(r.delta), fmt_sig17(r.delta_stderr), fmt_sig17(r.fk_prediction));
    }
    let dir = ctx.out_dir();
    let files = rep.write(&dir)?;
    ctx.finish("delta", &cfg.spec_hash(), cfg.seed, &cfg, files, &dir)
}

fn cmd_entropy(ctx: &Context, a: &SpecArgs) -> CliResult<()> {
    let single = a.constraint.is_some() || !a.degrees.is_empty() || a.edges.is_some() || a.d.is_some() || ctx.global.n.len() == 1;
    if single && ctx.global.config.is_none() {
        let spec = ctx.constraint(a)?;
        let rep = relative_entropy(&spec, ENUMERATION_CAP)?;
        kv("s_n", rep.s_n);
        kv("log_gamma_size", rep.log_gamma_size);
        if let Some(size) = rep.gamma_size {
            println!("gamma_size = {size}");
        }
        if let Some(dir) = ctx.explicit_out() {
            let hash = spec_hash(&spec);
            let path = dir.join(format!("entropy_{hash}_0.json"));
            fs::create_dir_all(&dir)?;
            fs::write(&path, serde_json::to_vec_pretty(&rep).map_err(|e| CliError::Config(e.to_string()))?)?;
            ctx.finish("entropy", &hash, 0, &spec, vec![path], &dir)?;
        }
        return Ok(());
    }
    let cfg = ctx.experiment_config()?;
    let rows = entropy_scaling_scan(&cfg.family, &cfg.n_list, cfg.enumeration_cap)?;
    println!("n,s_n,s_n_minus_log_n");
    for r in &rows {
        println!("{},{},{}", r.n, fmt_sig17(r.s_n), fmt_sig17(r.s_n_minus_log_n));
    }
    let dir = ctx.out_dir();
    let path = report_path(&dir, "entropy_scan", &cfg.spec_hash(), cfg.seed);
    write_csv(&path, &rows)?;
    ctx.finish("entropy", &cfg.spec_hash(), cfg.seed, &cfg, vec![path], &dir)
}

#[derive(Serialize)]
struct EnumerateRow {
    functional: String,
    #[serde(serialize_with = "sig17")]
    mic: f64,
    #[serde(serialize_with = "sig17")]
    can: f64,
}

fn cmd_enumerate(ctx: &Context, a: &SpecArgs) -> CliResult<()> {
    let spec = ctx.constraint(a)?;
    let fs_: Vec<&dyn GraphFunctional> = Functional::ALL.iter().map(|f| f as &dyn GraphFunctional).collect();
    let table = ensemble_table(&spec, &fs_, ENUMERATION_CAP)?;
    println!("gamma_size = {}", table.gamma_size);
    kv("p_can_gamma", table.p_can_gamma);
    kv("s_n", -table.p_can_gamma.ln());
    let rows: Vec<EnumerateRow> = table
        .values
        .iter()
        .map(|v| EnumerateRow {
            functional: v.name.clone(),
            mic: v.mic,
            can: v.can,
        })
        .collect();
    for r in &rows {
        println!("{}: mic = {}, can = {}", r.functional, fmt_sig17(r.mic), fmt_sig17(r.can));
    }
    if let Some(dir) = ctx.explicit_out() {
        let path = report_path(&dir, "enumerate", &spec_hash(&spec), 0);
        write_csv(&path, &rows)?;
        ctx.finish("enumerate", &spec_hash(&spec), 0, &spec, vec![path], &dir)?;
    }
    Ok(())
}

fn cmd_concentration(ctx: &Context, stat: Stat) -> CliResult<()> {
    let cfg = ctx.experiment_config()?;
    let reports = match stat {
        Stat::Degree => vec![degree_concentration_stat(&cfg)?],
        Stat::Ratio => vec![ratio_concentration(&cfg)?],
        Stat::Gap => vec![lambda_ratio_gap(&cfg)?],
        Stat::All => vec![degree_concentration_stat(&cfg)?, ratio_concentration(&cfg)?, lambda_ratio_gap(&cfg)?],
    };
    let dir = ctx.out_dir();
    let mut files = Vec::new();
    for rep in &reports {
        for q in &rep.quantiles {
            println!(
                "{} {} n={} q99 = {} tail_scale = {}",
                q.statistic,
                q.ensemble,
                q.n,
                fmt_sig17(q.q99),
                fmt_sig17(q.tail_scale)
            );
        }
        files.extend(rep.write(&dir)?);
    }
    ctx.finish("concentration", &cfg.spec_hash(), cfg.seed, &cfg, files, &dir)
}

fn cmd_transfer(ctx: &Context, event: EventArg, gamma: f64, log_power: f64) -> CliResult<()> {
    let cfg = ctx.experiment_config()?;
    let event = match event {
        EventArg::Everything => TransferEvent::Everything,
        EventArg::Gamma => TransferEvent::Gamma,
        EventArg::RatioDeviation => TransferEvent::RatioDeviation { gamma, log_power },
    };
    let rep = transfer_check(&cfg, event)?;
    println!("n,s_n,p_event_c,ratio,ratio_upper");
    for r in &rep.rows {
        println!(
            "{},{},{},{},{}",
            r.n,
            fmt_sig17(r.s_n),
            fmt_sig17(r.p_event_c),
            fmt_sig17(r.ratio),
            fmt_sig17(r.ratio_upper)
        );
    }
    let dir = ctx.out_dir();
    let files = rep.write(&dir)?;
    ctx.finish("transfer", &spec_hash(&(&cfg.spec_hash(), &event)), cfg.seed, &(&cfg, &event), files, &dir)
}

fn cmd_golden(ctx: &Context, path: Option<&Path>) -> CliResult<()> {
    let dir = ctx.out_dir();
    let path = path.map(Path::to_path_buf).unwrap_or_else(|| dir.join("expectations.csv"));
    let rows = write_golden(&path)?;
    println!("{} rows", rows.len());
    ctx.finish("golden-regen", "expectations", 0, &path, vec![path.clone()], &dir)
}

fn run(cli: &Cli) -> CliResult<()> {
    if let Some(w) = cli.global.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::Config(format!("--workers: {e}")))?;
    }
    let ctx = Context {
        global: &cli.global,
        started: SystemTime::now(),
    };
    match &cli.command {
        Command::Sample {
            spec,
            ensemble,
            count,
            method,
        } => cmd_sample(&ctx, spec, *ensemble, *count, *method),
        Command::Lambda { edges, tol } => cmd_lambda(&ctx, edges, *tol),
        Command::Delta => cmd_delta(&ctx),
        Command::Entropy { spec } => cmd_entropy(&ctx, spec),
        Command::Enumerate { spec } => cmd_enumerate(&ctx, spec),
        Command::Concentration { stat } => cmd_concentration(&ctx, *stat),
        Command::Transfer { event, gamma, log_power } => cmd_transfer(&ctx, *event, *gamma, *log_power),
        Command::GoldenRegen { path } => cmd_golden(&ctx, path.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
