//! The `rcap` command line.
//!
//! [`run`] parses arguments, executes one command and returns the exit code
//! together with what would be written to stdout and stderr, so the binary
//! and the tests share one code path.
//!
//! Exit codes: 0 success, 1 other failure, 2 usage error, 3 parse error,
//! 4 exhaustive limit refused.

mod report;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rcap_core::format::{parse_graph, parse_mixed, parse_profile, parse_ucp, write_graph};
use rcap_core::game::{self, MixedProfile, Order, StrategyProfile, DEFAULT_PNE_LIMIT};
use rcap_core::graph::{generate, reception_value, GraphKind, VertexSet};
use rcap_core::maxpds::{self, DEFAULT_EXACT_LIMIT, DEFAULT_TRIALS_PER_SCALE};
use rcap_core::ucp::{self, DEFAULT_UCP_LIMIT};
use rcap_core::{Error, Graph};
use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

pub use report::{Format, Report};

#[derive(Debug, Parser)]
#[command(name = "rcap", version, about = "Reception capacity of radio networks")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Seed for every randomized step; required by randomized commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Samples per scale for `solve approx`.
    #[arg(long, global = true, default_value_t = DEFAULT_TRIALS_PER_SCALE)]
    pub trials: usize,
    /// Tolerance for mixed-equilibrium checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Raise or lower the exhaustive-search vertex limit.
    #[arg(long, global = true)]
    pub max_exhaustive: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve MaxPDS on one or more graph files.
    Solve {
        #[arg(value_enum)]
        method: SolveMethod,
        #[arg(required = true)]
        graphs: Vec<PathBuf>,
        /// Starting set for `local`, as comma-separated vertex ids.
        #[arg(long, default_value = "")]
        start: String,
        /// Sampling probabilities for `approx`, comma-separated.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Expected |D(S)| under independent inclusion.
    Expect {
        graph: PathBuf,
        #[command(flatten)]
        mixed: MixedArg,
    },
    /// Round a mixed profile to a set by conditional expectations.
    Derand {
        graph: PathBuf,
        #[command(flatten)]
        mixed: MixedArg,
    },
    /// Unique coverage instances and the reduction to MaxPDS.
    Ucp {
        #[command(subcommand)]
        command: UcpCommand,
    },
    /// The reception-capacity game.
    Game {
        #[command(subcommand)]
        command: GameCommand,
    },
    /// Generate a graph in the text format.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 10)]
        c_size: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveMethod {
    Exact,
    Local,
    Approx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Star,
    Path,
    Cycle,
    Complete,
    Gnp,
    Figure1,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct MixedArg {
    /// Mixed profile: a JSON array, or `@path` to a file holding one.
    #[arg(long)]
    mixed: Option<String>,
    /// The same probability for every vertex.
    #[arg(long)]
    uniform: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum UcpCommand {
    /// Exhaustive unique coverage.
    Solve { instance: PathBuf },
    /// Build the MaxPDS graph; with `--out`, the graph goes to that path and
    /// the `{k, a, b, v}` sidecar next to it with a `.json` suffix.
    Reduce {
        instance: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Lift a subcollection to a broadcast set on the reduced graph.
    Lift {
        instance: PathBuf,
        /// Chosen set indices, comma-separated.
        #[arg(long, default_value = "")]
        chosen: String,
        #[arg(long)]
        k: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum GameCommand {
    Utility {
        graph: PathBuf,
        #[arg(long)]
        profile: String,
        #[arg(long)]
        player: usize,
    },
    Value {
        graph: PathBuf,
        #[arg(long)]
        profile: String,
    },
    /// Check a pure profile for profitable deviations.
    Pne {
        graph: PathBuf,
        #[arg(long)]
        profile: String,
    },
    /// All pure equilibria.
    Enumerate { graph: PathBuf },
    /// Best-response dynamics.
    Dynamics {
        graph: PathBuf,
        /// Starting profile; all quiet by default.
        #[arg(long)]
        start: Option<String>,
        #[arg(long, default_value_t = 100)]
        max_rounds: usize,
        #[arg(long, value_enum, default_value_t = OrderArg::RoundRobin)]
        order: OrderArg,
    },
    /// Expected broadcasters, successes, failures and idle vertices.
    Mixed {
        graph: PathBuf,
        #[command(flatten)]
        mixed: MixedArg,
    },
    /// Equilibrium check plus the inequalities that hold at equilibria.
    Audit {
        graph: PathBuf,
        #[command(flatten)]
        mixed: MixedArg,
    },
    /// Optimum against the pure equilibria.
    Poa {
        #[arg(required = true)]
        graphs: Vec<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    RoundRobin,
    Random,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Parse { path: String, source: Error },
    #[error("{0}")]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Parse { .. } | CliError::Core(Error::Parse { .. }) => 3,
            CliError::Core(Error::LimitExceeded { .. }) => 4,
            CliError::Core(_) | CliError::Io { .. } => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs one invocation. `args[0]` is the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let result = match cli.global.workers {
        Some(0) => Err(CliError::Usage("--workers must be positive".into())),
        Some(w) => match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => Err(CliError::Usage(format!("cannot start {w} workers: {e}"))),
        },
        None => execute(&cli),
    };
    match result {
        Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn execute(cli: &Cli) -> CliResult<String> {
    let g = &cli.global;
    if g.max_exhaustive == Some(0) {
        return Err(CliError::Usage("--max-exhaustive must be positive".into()));
    }
    if g.tol.is_nan() || g.tol < 0.0 {
        return Err(CliError::Usage("--tol must be non-negative".into()));
    }
    if g.trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    let (report, default_format) = dispatch(cli)?;
    let rendered = report.render(g.format.unwrap_or(default_format));
    match (&g.out, &cli.command) {
        (Some(_), Command::Ucp { command: UcpCommand::Reduce { .. } }) => Ok(rendered),
        (Some(path), _) => {
            write_file(path, &rendered)?;
            Ok(String::new())
        }
        (None, _) => Ok(rendered),
    }
}

fn command_name(cmd: &Command) -> String {
    match cmd {
        Command::Solve { method, .. } => format!("solve {}", value_name(*method)),
        Command::Expect { .. } => "expect".into(),
        Command::Derand { .. } => "derand".into(),
        Command::Ucp { command } => match command {
            UcpCommand::Solve { .. } => "ucp solve",
            UcpCommand::Reduce { .. } => "ucp reduce",
            UcpCommand::Lift { .. } => "ucp lift",
        }
        .into(),
        Command::Game { command } => match command {
            GameCommand::Utility { .. } => "game utility",
            GameCommand::Value { .. } => "game value",
            GameCommand::Pne { .. } => "game pne",
            GameCommand::Enumerate { .. } => "game enumerate",
            GameCommand::Dynamics { .. } => "game dynamics",
            GameCommand::Mixed { .. } => "game mixed",
            GameCommand::Audit { .. } => "game audit",
            GameCommand::Poa { .. } => "game poa",
        }
        .into(),
        Command::Gen { kind, .. } => format!("gen {}", value_name(*kind)),
    }
}

fn value_name<V: ValueEnum>(v: V) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

fn provenance(cli: &Cli) -> Value {
    let g = &cli.global;
    json!({
        "command": command_name(&cli.command),
        "seed": g.seed,
        "limits": {
            "exact": g.max_exhaustive.unwrap_or(DEFAULT_EXACT_LIMIT),
            "ucp": g.max_exhaustive.unwrap_or(DEFAULT_UCP_LIMIT),
            "pne": g.max_exhaustive.unwrap_or(DEFAULT_PNE_LIMIT),
        },
        "trials": g.trials,
        "tol": g.tol,
        "version": env!("CARGO_PKG_VERSION"),
    })
}

fn require_seed(cli: &Cli, what: &str) -> CliResult<u64> {
    cli.global
        .seed
        .ok_or_else(|| CliError::Usage(format!("{what} is randomized and needs --seed")))
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parsed<T>(path: &Path, r: rcap_core::Result<T>) -> CliResult<T> {
    r.map_err(|source| match source {
        Error::Parse { .. } => CliError::Parse {
            path: path.display().to_string(),
            source,
        },
        other => CliError::Core(other),
    })
}

fn load_graph(path: &Path) -> CliResult<Graph> {
    parsed(path, parse_graph(&read_file(path)?))
}

fn load_ucp(path: &Path) -> CliResult<ucp::UcpInstance> {
    parsed(path, parse_ucp(&read_file(path)?))
}

fn inline<T>(what: &str, r: rcap_core::Result<T>) -> CliResult<T> {
    parsed(Path::new(what), r)
}

fn load_mixed(arg: &MixedArg, n: usize) -> CliResult<MixedProfile> {
    match (&arg.mixed, arg.uniform) {
        (_, Some(p)) => Ok(MixedProfile::uniform(n, p)?),
        (Some(spec), None) => match spec.strip_prefix('@') {
            Some(path) => parsed(Path::new(path), parse_mixed(&read_file(Path::new(path))?)),
            None => inline("--mixed", parse_mixed(spec)),
        },
        (None, None) => Err(CliError::Usage("pass --mixed or --uniform".into())),
    }
}

fn id_list(what: &str, text: &str) -> CliResult<Vec<usize>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| CliError::Usage(format!("{what}: {t:?} is not an index")))
        })
        .collect()
}

fn to_record<T: Serialize>(value: &T) -> Map<String, Value> {
    match serde_json::to_value(value).expect("report serializes") {
        Value::Object(map) => map,
        other => {
            let mut map = Map::new();
            map.insert("result".into(), other);
            map
        }
    }
}

fn records(cli: &Cli, records: Vec<Map<String, Value>>) -> Report {
    Report::Records {
        provenance: provenance(cli),
        records,
    }
}

fn one(cli: &Cli, record: Value) -> Report {
    records(cli, vec![to_record(&record)])
}

fn with_input(path: &Path, mut rec: Map<String, Value>, batch: bool) -> Map<String, Value> {
    if batch {
        let mut out = Map::new();
        out.insert("input".into(), Value::String(path.display().to_string()));
        out.append(&mut rec);
        out
    } else {
        rec
    }
}

fn dispatch(cli: &Cli) -> CliResult<(Report, Format)> {
    let g = &cli.global;
    let exact_limit = g.max_exhaustive.unwrap_or(DEFAULT_EXACT_LIMIT);
    let pne_limit = g.max_exhaustive.unwrap_or(DEFAULT_PNE_LIMIT);
    let ucp_limit = g.max_exhaustive.unwrap_or(DEFAULT_UCP_LIMIT);
    let report = match &cli.command {
        Command::Gen { kind, n, p, c_size } => {
            let kind = match kind {
                GenKind::Star => GraphKind::Star { n: *n },
                GenKind::Path => GraphKind::Path { n: *n },
                GenKind::Cycle => GraphKind::Cycle { n: *n },
                GenKind::Complete => GraphKind::Complete { n: *n },
                GenKind::Gnp => GraphKind::Gnp { n: *n, p: *p },
                GenKind::Figure1 => GraphKind::Figure1 { c_size: *c_size },
            };
            let seed = match kind {
                GraphKind::Gnp { .. } => require_seed(cli, "gen gnp")?,
                _ => g.seed.unwrap_or(0),
            };
            let graph = generate(kind, seed).map_err(|e| CliError::Usage(e.to_string()))?;
            return Ok((Report::Text(write_graph(&graph)), Format::Plain));
        }
        Command::Solve {
            method,
            graphs,
            start,
            grid,
        } => {
            let seed = match method {
                SolveMethod::Exact => None,
                SolveMethod::Local => Some(require_seed(cli, "solve local")?),
                SolveMethod::Approx => Some(require_seed(cli, "solve approx")?),
            };
            let grid = grid
                .as_deref()
                .map(|text| {
                    text.split(',')
                        .map(|t| {
                            t.trim()
                                .parse::<f64>()
                                .map_err(|_| CliError::Usage(format!("--grid: {t:?} is not a number")))
                        })
                        .collect::<CliResult<Vec<f64>>>()
                })
                .transpose()?;
            let start = id_list("--start", start)?;
            let batch = graphs.len() > 1;
            let mut out = Vec::with_capacity(graphs.len());
            for path in graphs {
                let graph = load_graph(path)?;
                let result = match method {
                    SolveMethod::Exact => maxpds::exact_opt(&graph, exact_limit)?,
                    SolveMethod::Local => {
                        let s0 = VertexSet::from_members(graph.n(), start.iter().copied())?;
                        maxpds::local_search_maximal(&graph, &s0, seed.unwrap())?
                    }
                    SolveMethod::Approx => match &grid {
                        Some(grid) => maxpds::approx_with_grid(&graph, grid, g.trials, seed.unwrap())?,
                        None => maxpds::approx_log(&graph, g.trials, seed.unwrap())?,
                    },
                };
                let mut rec = to_record(&result);
                rec.insert("n".into(), json!(graph.n()));
                out.push(with_input(path, rec, batch));
            }
            records(cli, out)
        }
        Command::Expect { graph, mixed } => {
            let graph = load_graph(graph)?;
            let p = load_mixed(mixed, graph.n())?;
            let e = maxpds::expected_value(&graph, &p)?;
            one(cli, json!({ "expected_value": e }))
        }
        Command::Derand { graph, mixed } => {
            let graph = load_graph(graph)?;
            let p = load_mixed(mixed, graph.n())?;
            let e = maxpds::expected_value(&graph, &p)?;
            let mut rec = to_record(&maxpds::derandomize(&graph, &p)?);
            rec.insert("expected_value".into(), json!(e));
            records(cli, vec![rec])
        }
        Command::Ucp { command } => match command {
            UcpCommand::Solve { instance } => {
                let inst = load_ucp(instance)?;
                let (value, witness) = ucp::exact_ucp(&inst, ucp_limit)?;
                one(cli, json!({ "value": value, "chosen": witness }))
            }
            UcpCommand::Reduce { instance, k } => {
                let inst = load_ucp(instance)?;
                let out = ucp::reduce(&inst, *k)?;
                let text = write_graph(&out.graph);
                let mut rec = Map::new();
                rec.insert("n".into(), json!(out.graph.n()));
                rec.insert("m".into(), json!(out.graph.edge_count()));
                if let Some(path) = &g.out {
                    let mut sidecar = path.clone().into_os_string();
                    sidecar.push(".json");
                    let sidecar = PathBuf::from(sidecar);
                    write_file(path, &text)?;
                    write_file(&sidecar, &(out.sidecar_json() + "\n"))?;
                    rec.insert("graph_path".into(), json!(path.display().to_string()));
                    rec.insert("sidecar_path".into(), json!(sidecar.display().to_string()));
                } else {
                    rec.insert("graph".into(), json!(text));
                }
                rec.append(&mut to_record(&out));
                records(cli, vec![rec])
            }
            UcpCommand::Lift { instance, chosen, k } => {
                let inst = load_ucp(instance)?;
                let out = ucp::reduce(&inst, *k)?;
                let chosen = id_list("--chosen", chosen)?;
                let (broadcast, predicted) = ucp::lift_solution(&inst, &out, &chosen)?;
                let actual = reception_value(&out.graph, &broadcast)?;
                one(
                    cli,
                    json!({
                        "k": out.k,
                        "broadcast": broadcast.to_vec(),
                        "predicted_value": predicted,
                        "reception_value": actual,
                    }),
                )
            }
        },
        Command::Game { command } => game_command(cli, command, exact_limit, pne_limit)?,
    };
    Ok((report, Format::Json))
}

fn game_command(
    cli: &Cli,
    command: &GameCommand,
    exact_limit: usize,
    pne_limit: usize,
) -> CliResult<Report> {
    let profile = |text: &str| inline("--profile", parse_profile(text));
    Ok(match command {
        GameCommand::Utility {
            graph,
            profile: s,
            player,
        } => {
            let graph = load_graph(graph)?;
            let u = game::utility(&graph, &profile(s)?, *player)?;
            one(cli, json!({ "player": player, "utility": u }))
        }
        GameCommand::Value { graph, profile: s } => {
            let graph = load_graph(graph)?;
            let v = game::value(&graph, &profile(s)?)?;
            one(cli, json!({ "value": v }))
        }
        GameCommand::Pne { graph, profile: s } => {
            let graph = load_graph(graph)?;
            let (nash, deviator) = game::is_pure_nash(&graph, &profile(s)?)?;
            one(cli, json!({ "nash": nash, "deviator": deviator }))
        }
        GameCommand::Enumerate { graph } => {
            let graph = load_graph(graph)?;
            let list = game::enumerate_pure_nash(&graph, pne_limit)?;
            let profiles: Vec<String> = list.iter().map(ToString::to_string).collect();
            one(cli, json!({ "count": profiles.len(), "profiles": profiles }))
        }
        GameCommand::Dynamics {
            graph,
            start,
            max_rounds,
            order,
        } => {
            let graph = load_graph(graph)?;
            let s0 = match start {
                Some(s) => profile(s)?,
                None => StrategyProfile::quiet(graph.n()),
            };
            let order = match order {
                OrderArg::RoundRobin => Order::RoundRobin,
                OrderArg::Random => Order::Random {
                    seed: require_seed(cli, "random-order dynamics")?,
                },
            };
            let d = game::best_response(&graph, &s0, *max_rounds, order)?;
            records(cli, vec![to_record(&d)])
        }
        GameCommand::Mixed { graph, mixed } => {
            let graph = load_graph(graph)?;
            let p = load_mixed(mixed, graph.n())?;
            let stats = game::mixed_stats(&graph, &p)?;
            let check = game::is_mixed_nash(&graph, &p, cli.global.tol)?;
            let mut rec = to_record(&stats);
            rec.insert("mixed_nash".into(), json!(check.nash));
            rec.insert("violations".into(), json!(check.violations));
            records(cli, vec![rec])
        }
        GameCommand::Audit { graph, mixed } => {
            let graph = load_graph(graph)?;
            let p = load_mixed(mixed, graph.n())?;
            let audit = game::nash_lemma_audit(&graph, &p, cli.global.tol)?;
            let mut rec = Map::new();
            rec.insert("all_hold".into(), json!(audit.all_hold()));
            rec.append(&mut to_record(&audit));
            records(cli, vec![rec])
        }
        GameCommand::Poa { graphs } => {
            let batch = graphs.len() > 1;
            let mut out = Vec::with_capacity(graphs.len());
            for path in graphs {
                let graph = load_graph(path)?;
                let r = game::poa_report(&graph, exact_limit, pne_limit)?;
                out.push(with_input(path, to_record(&r), batch));
            }
            records(cli, out)
        }
    })
}
