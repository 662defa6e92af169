//! Command-line front end: encode problems to the CSP JSON format, generate
//! planted instances, run the solvers and oracles, and drive benchmark
//! grids. All heavy lifting lives in the library; this binary parses
//! arguments, moves files and maps errors to exit codes (0 ok, 2 invalid
//! input, 3 cap exceeded, 4 internal invariant violation).

use clap::{Args, Parser, Subcommand, ValueEnum};
use mincsp::additive::{AdditiveBackend, DEFAULT_ADDITIVE_CAP};
use mincsp::bench::{bench_ratio, bench_scaling, RatioConfig, ScalingConfig};
use mincsp::cost::ExactCost;
use mincsp::csp::CspInstance;
use mincsp::encode::gb::GbInstance;
use mincsp::encode::hier::{hier_to_rigid_csp, HierProblem, Trunk};
use mincsp::encode::ksat::DnfInstance;
use mincsp::encode::mwc::MwcInstance;
use mincsp::encode::ncp::NcpInstance;
use mincsp::encode::ugp::UgpInstance;
use mincsp::error::{Error, Result};
use mincsp::fragile::{solve_fragile, FragilePtasParams, SampleCount};
use mincsp::generate::{planted_csp, planted_gb, planted_hier, CspTemplate};
use mincsp::oracle;
use mincsp::report::{OracleDetail, PhaseTimings, ReportDetail, SolveReport};
use mincsp::rigid::{solve_hierarchical, RigidPtasParams};
use serde_json::json;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "mincsp", version, about = "Approximation schemes and exact oracles for fragile-dense minimization CSPs")]
struct Cli {
    /// Default seed for subcommands that take one
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for benchmark grids
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Output format where a choice exists (bench defaults to csv, reports
    /// and instances to json)
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a problem file as a CSP instance (JSON)
    Encode {
        #[command(subcommand)]
        kind: EncodeKind,
    },
    /// Generate planted instances
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Run an approximation scheme
    Solve {
        #[command(subcommand)]
        kind: SolveKind,
    },
    /// Run an exact oracle
    Oracle {
        #[command(subcommand)]
        kind: OracleKind,
    },
    /// Run benchmark grids emitting CSV
    Bench {
        #[command(subcommand)]
        kind: BenchKind,
    },
}

#[derive(Args)]
struct InOut {
    /// Input file
    #[arg(short = 'i', long)]
    input: PathBuf,
    /// Output file (stdout when omitted)
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum EncodeKind {
    /// Gale-Berlekamp board ("m" header, then +/- rows)
    Gb {
        #[command(flatten)]
        io: InOut,
        /// Emit an implicit-source materialization check instead of tables
        #[arg(long, default_value_t = false)]
        implicit_check: bool,
    },
    /// XOR equations ("n m" header, lines "rhs i1 i2 ...")
    Ncp {
        #[command(flatten)]
        io: InOut,
        /// Target arity k (equations of lower arity are padded)
        #[arg(long)]
        arity: usize,
    },
    /// Unique games ("n colors m" header, lines "u v p0 p1 ...")
    Ugp {
        #[command(flatten)]
        io: InOut,
    },
    /// DNF conjunctions ("n k m" header, signed 1-based literals)
    Ksat {
        #[command(flatten)]
        io: InOut,
    },
    /// Multiway cut ("n colors m t" header, edge lines, terminal lines)
    Mwc {
        #[command(flatten)]
        io: InOut,
    },
    /// Hierarchical clustering ("n M d" header, dissimilarity matrix)
    Hier {
        #[command(flatten)]
        io: InOut,
        /// Index into the trunk enumeration
        #[arg(long, default_value_t = 0)]
        trunk_index: usize,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// Planted rank-1 board plus noise
    Gb {
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short = 'o', long)]
        output: PathBuf,
        /// Planted-solution sidecar JSON
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// Planted fragile CSP from a template family
    Csp {
        #[arg(long)]
        vars: usize,
        #[arg(long, value_enum)]
        template: TemplateArg,
        #[arg(long, default_value_t = 2)]
        arity: usize,
        #[arg(long, default_value_t = 3)]
        colors: usize,
        #[arg(long, default_value_t = 1.0)]
        density: f64,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short = 'o', long)]
        output: PathBuf,
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// Planted hierarchical clustering problem
    Hier {
        #[arg(long)]
        objects: usize,
        #[arg(long)]
        levels: usize,
        #[arg(long)]
        clusters: usize,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short = 'o', long)]
        output: PathBuf,
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TemplateArg {
    Ncp,
    Ugp,
    Ksat,
}

#[derive(Args)]
struct SolveCommon {
    #[arg(long)]
    eps: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    guess_cap: Option<u64>,
    /// Additive backend
    #[arg(long, value_enum, default_value_t = BackendArg::Exact)]
    additive: BackendArg,
    #[arg(long)]
    additive_cap: Option<u64>,
    /// SAMPLED-backend sample size
    #[arg(long)]
    additive_sample: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Exact,
    Sampled,
}

impl SolveCommon {
    fn backend(&self, seed: u64) -> AdditiveBackend {
        let cap = self.additive_cap.unwrap_or(DEFAULT_ADDITIVE_CAP);
        match self.additive {
            BackendArg::Exact => AdditiveBackend::Exact { cap },
            BackendArg::Sampled => AdditiveBackend::Sampled {
                t: self.additive_sample,
                cap,
                seed,
            },
        }
    }
}

#[derive(Subcommand)]
enum SolveKind {
    /// Fragile-dense MIN-kCSP scheme on a CSP instance (JSON)
    Fragile {
        #[command(flatten)]
        io: InOut,
        #[command(flatten)]
        common: SolveCommon,
        /// Fragile density the instance is declared to satisfy
        #[arg(long)]
        delta: String,
    },
    /// Correlation clustering: hierarchical input with M = 1
    Cc {
        #[command(flatten)]
        io: InOut,
        #[command(flatten)]
        common: SolveCommon,
    },
    /// Hierarchical clustering: trunk enumeration over the rigid scheme
    Hier {
        #[command(flatten)]
        io: InOut,
        #[command(flatten)]
        common: SolveCommon,
        /// Validated against the instance header when given
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long)]
        clusters: Option<usize>,
    },
}

#[derive(Subcommand)]
enum OracleKind {
    /// Exhaustive search over a CSP instance (JSON)
    Csp {
        #[command(flatten)]
        io: InOut,
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Row-enumeration oracle for a board file
    Gb {
        #[command(flatten)]
        io: InOut,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Trunk x assignment enumeration for a hierarchical problem
    Hier {
        #[command(flatten)]
        io: InOut,
        #[arg(long)]
        cap: Option<u64>,
    },
}

#[derive(Subcommand)]
enum BenchKind {
    /// Approximation-ratio grid (config JSON)
    Ratio {
        #[arg(long)]
        config: PathBuf,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Runtime-scaling experiment (config JSON)
    Scaling {
        #[arg(long)]
        config: PathBuf,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn parse_ratio(text: &str) -> Result<ExactCost> {
    ExactCost::parse(text).map_err(Error::InvalidInput)
}

fn run(cli: Cli) -> Result<()> {
    if matches!(cli.format, Some(Format::Csv)) && !matches!(cli.command, Command::Bench { .. }) {
        return Err(Error::invalid(
            "--format csv applies to bench output; other commands emit JSON".to_string(),
        ));
    }
    match cli.command {
        Command::Encode { kind } => run_encode(kind),
        Command::Gen { kind } => run_gen(kind, cli.seed),
        Command::Solve { kind } => run_solve(kind, cli.seed),
        Command::Oracle { kind } => run_oracle(kind),
        Command::Bench { kind } => run_bench(kind, cli.threads, cli.format),
    }
}

/// Re-shape a bench CSV as JSON: the embedded config plus one object per
/// data row.
fn csv_as_json(csv: &str) -> Result<String> {
    let config: serde_json::Value = serde_json::from_str(
        csv.lines()
            .find(|l| l.starts_with("# config "))
            .map(|l| l.trim_start_matches("# config "))
            .unwrap_or("null"),
    )?;
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::Internal("bench CSV without header".to_string()))?
        .split(',')
        .collect();
    let rows: Vec<serde_json::Value> = lines
        .map(|line| {
            let fields = line.split(',');
            let map: serde_json::Map<String, serde_json::Value> = header
                .iter()
                .zip(fields)
                .filter(|(_, v)| !v.is_empty())
                .map(|(k, v)| {
                    let value = v
                        .parse::<u64>()
                        .map(Into::into)
                        .or_else(|_| v.parse::<f64>().map(Into::into))
                        .unwrap_or_else(|_| serde_json::Value::String(v.to_string()));
                    (k.to_string(), value)
                })
                .collect();
            serde_json::Value::Object(map)
        })
        .collect();
    Ok(serde_json::to_string_pretty(&json!({
        "config": config,
        "rows": rows,
    }))?)
}

fn run_encode(kind: EncodeKind) -> Result<()> {
    match kind {
        EncodeKind::Gb { io, implicit_check } => {
            let gb = GbInstance::parse(&fs::read_to_string(&io.input)?)?;
            let inst = gb.to_csp();
            if implicit_check && gb.to_csp_implicit().to_json() != inst.to_json() {
                return Err(Error::Internal(
                    "implicit and explicit encodings disagree".to_string(),
                ));
            }
            emit(io.output.as_deref(), &inst.to_json())
        }
        EncodeKind::Ncp { io, arity } => {
            let ncp = NcpInstance::parse(&fs::read_to_string(&io.input)?)?;
            emit(io.output.as_deref(), &ncp.to_csp(arity)?.to_json())
        }
        EncodeKind::Ugp { io } => {
            let ugp = UgpInstance::parse(&fs::read_to_string(&io.input)?)?;
            emit(io.output.as_deref(), &ugp.to_csp()?.to_json())
        }
        EncodeKind::Ksat { io } => {
            let dnf = DnfInstance::parse(&fs::read_to_string(&io.input)?)?;
            emit(io.output.as_deref(), &dnf.to_csp()?.to_json())
        }
        EncodeKind::Mwc { io } => {
            let mwc = MwcInstance::parse(&fs::read_to_string(&io.input)?)?;
            emit(io.output.as_deref(), &mwc.to_csp()?.to_json())
        }
        EncodeKind::Hier { io, trunk_index } => {
            let hp = HierProblem::parse(&fs::read_to_string(&io.input)?)?;
            let trunks = Trunk::enumerate(hp.clusters, hp.levels);
            let trunk = trunks.get(trunk_index).ok_or_else(|| {
                Error::invalid(format!(
                    "trunk index {trunk_index} out of range ({} trunks)",
                    trunks.len()
                ))
            })?;
            emit(io.output.as_deref(), &hier_to_rigid_csp(&hp, trunk)?.to_json())
        }
    }
}

fn run_gen(kind: GenKind, default_seed: u64) -> Result<()> {
    match kind {
        GenKind::Gb {
            size,
            noise,
            seed,
            output,
            sidecar,
        } => {
            let planted = planted_gb(size, noise, seed.unwrap_or(default_seed))?;
            fs::write(&output, planted.board.to_text())?;
            if let Some(path) = sidecar {
                let doc = json!({
                    "rows": planted.rows,
                    "cols": planted.cols,
                    "planted_cost": planted.planted_cost,
                });
                fs::write(path, serde_json::to_string_pretty(&doc)?)?;
            }
            Ok(())
        }
        GenKind::Csp {
            vars,
            template,
            arity,
            colors,
            density,
            noise,
            seed,
            output,
            sidecar,
        } => {
            let template = match template {
                TemplateArg::Ncp => CspTemplate::Ncp { arity },
                TemplateArg::Ugp => CspTemplate::Ugp { colors },
                TemplateArg::Ksat => CspTemplate::Ksat { arity },
            };
            let planted = planted_csp(
                vars,
                template,
                density,
                noise,
                seed.unwrap_or(default_seed),
                None,
            )?;
            fs::write(&output, planted.inst.to_json())?;
            if let Some(path) = sidecar {
                let doc = json!({
                    "planted": planted.planted.values(),
                    "delta": planted.delta,
                    "planted_cost": planted.planted_cost,
                });
                fs::write(path, serde_json::to_string_pretty(&doc)?)?;
            }
            Ok(())
        }
        GenKind::Hier {
            objects,
            levels,
            clusters,
            noise,
            seed,
            output,
            sidecar,
        } => {
            let planted =
                planted_hier(objects, levels, clusters, noise, seed.unwrap_or(default_seed))?;
            fs::write(&output, planted.problem.to_text())?;
            if let Some(path) = sidecar {
                let doc = json!({
                    "trunk_parents": planted.trunk.flat_parents(),
                    "assignment": planted.assignment.values(),
                    "planted_cost": planted.planted_cost,
                });
                fs::write(path, serde_json::to_string_pretty(&doc)?)?;
            }
            Ok(())
        }
    }
}

fn run_solve(kind: SolveKind, default_seed: u64) -> Result<()> {
    match kind {
        SolveKind::Fragile { io, common, delta } => {
            let inst = CspInstance::from_json(&fs::read_to_string(&io.input)?)?;
            let seed = common.seed.unwrap_or(default_seed);
            let mut params = FragilePtasParams::new(
                parse_ratio(&common.eps)?,
                parse_ratio(&delta)?,
                seed,
            )
            .with_backend(common.backend(seed));
            if let Some(s) = common.samples {
                params.samples = SampleCount::Fixed(s);
            }
            if let Some(cap) = common.guess_cap {
                params.guess_cap = cap;
            }
            let report = solve_fragile(&inst, &params)?;
            emit(io.output.as_deref(), &report.to_json())
        }
        SolveKind::Cc { io, common } => {
            let hp = HierProblem::parse(&fs::read_to_string(&io.input)?)?;
            if hp.levels != 1 {
                return Err(Error::invalid(format!(
                    "correlation clustering expects a single level, file has M = {}",
                    hp.levels
                )));
            }
            let report = solve_hier_common(&hp, &common, default_seed)?;
            emit(io.output.as_deref(), &report.to_json())
        }
        SolveKind::Hier {
            io,
            common,
            levels,
            clusters,
        } => {
            let hp = HierProblem::parse(&fs::read_to_string(&io.input)?)?;
            if let Some(m) = levels {
                if m != hp.levels {
                    return Err(Error::invalid(format!(
                        "--levels {m} contradicts the instance header (M = {})",
                        hp.levels
                    )));
                }
            }
            if let Some(d) = clusters {
                if d != hp.clusters {
                    return Err(Error::invalid(format!(
                        "--clusters {d} contradicts the instance header (d = {})",
                        hp.clusters
                    )));
                }
            }
            let report = solve_hier_common(&hp, &common, default_seed)?;
            emit(io.output.as_deref(), &report.to_json())
        }
    }
}

fn solve_hier_common(
    hp: &HierProblem,
    common: &SolveCommon,
    default_seed: u64,
) -> Result<SolveReport> {
    let seed = common.seed.unwrap_or(default_seed);
    let mut params = RigidPtasParams::new(
        parse_ratio(&common.eps)?,
        ExactCost::new(1, hp.levels as u64),
        seed,
    )
    .with_backend(common.backend(seed));
    if let Some(s) = common.samples {
        params.samples = SampleCount::Fixed(s);
    }
    if let Some(cap) = common.guess_cap {
        params.guess_cap = cap;
    }
    solve_hierarchical(hp, &params)
}

fn run_oracle(kind: OracleKind) -> Result<()> {
    match kind {
        OracleKind::Csp { io, cap } => {
            let inst = CspInstance::from_json(&fs::read_to_string(&io.input)?)?;
            let cap = cap.unwrap_or(oracle::DEFAULT_CSP_CAP);
            let sol = oracle::exact_csp(&inst, &vec![None; inst.n()], cap)?;
            let report = SolveReport {
                algorithm: "oracle-csp".to_string(),
                cost: sol.cost,
                assignment: sol.assignment.values().to_vec(),
                seed: 0,
                timings: PhaseTimings::default(),
                detail: ReportDetail::Oracle(OracleDetail {
                    method: "exhaustive".to_string(),
                    cap,
                }),
            };
            emit(io.output.as_deref(), &report.to_json())
        }
        OracleKind::Gb { io, cap } => {
            let gb = GbInstance::parse(&fs::read_to_string(&io.input)?)?;
            let cap = cap.unwrap_or(oracle::DEFAULT_GB_CAP);
            let sol = oracle::exact_gb(&gb, cap)?;
            let assignment: Vec<usize> = sol
                .rows
                .iter()
                .chain(sol.cols.iter())
                .map(|&s| (s == -1) as usize)
                .collect();
            let report = SolveReport {
                algorithm: "oracle-gb".to_string(),
                cost: sol.cost,
                assignment,
                seed: 0,
                timings: PhaseTimings::default(),
                detail: ReportDetail::Oracle(OracleDetail {
                    method: "row-enumeration".to_string(),
                    cap: cap as u64,
                }),
            };
            emit(io.output.as_deref(), &report.to_json())
        }
        OracleKind::Hier { io, cap } => {
            let hp = HierProblem::parse(&fs::read_to_string(&io.input)?)?;
            let cap = cap.unwrap_or(oracle::DEFAULT_HIER_CAP);
            let sol = oracle::exact_hier(&hp, cap)?;
            let report = SolveReport {
                algorithm: "oracle-hier".to_string(),
                cost: sol.cost,
                assignment: sol.assignment.values().to_vec(),
                seed: 0,
                timings: PhaseTimings::default(),
                detail: ReportDetail::Oracle(OracleDetail {
                    method: format!(
                        "trunk-enumeration({})",
                        sol.trunk.flat_parents().len()
                    ),
                    cap,
                }),
            };
            emit(io.output.as_deref(), &report.to_json())
        }
    }
}

fn run_bench(kind: BenchKind, threads: usize, format: Format) -> Result<()> {
    let (csv, output) = match kind {
        BenchKind::Ratio { config, output } => {
            let mut cfg: RatioConfig = serde_json::from_str(&fs::read_to_string(&config)?)?;
            if threads > 1 {
                cfg.threads = threads;
            }
            (bench_ratio(&cfg)?, output)
        }
        BenchKind::Scaling { config, output } => {
            let cfg: ScalingConfig = serde_json::from_str(&fs::read_to_string(&config)?)?;
            (bench_scaling(&cfg)?.to_csv(), output)
        }
    };
    match format {
        Format::Csv => emit(output.as_deref(), &csv),
        Format::Json => emit(output.as_deref(), &csv_as_json(&csv)?),
    }
}
