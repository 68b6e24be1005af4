//! `pcg-eval`: generate levels, solve them, score them, and run the batch
//! experiments. Exit codes: 0 success, 2 bad arguments or config, 3 not
//! enough solvable levels, 4 I/O failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pcg_eval_core::{
    astar_difficulty, astar_diversity, compression_distance, exit_code, gen_maze_with_difficulty,
    gen_platformer, gen_random_maze, init_thread_pool, leniency, mann_whitney_u,
    manhattan_diversity, maze_reachable_count, mix_seed, pearson, platformer_reachable_states,
    read_level_set, run_experiment, solve_maze, solve_platformer, write_level_set, Alternative,
    ConfigError, DifficultyClass, Domain, ExperimentConfig, GenError, LevelIoError, MazeError,
    Metric, MetricError, PlatformerError, Repr, StatsError, TileGrid, DEFAULT_BUDGET,
    DEFAULT_ENEMY_RATE, DEFAULT_GAP_RATE,
};

#[derive(Parser)]
#[command(name = "pcg-eval", version, about = "Evaluate procedurally generated tile levels")]
struct Cli {
    /// Base directory for all relative paths (inputs and outputs).
    #[arg(long, global = true, default_value = ".")]
    output_dir: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a set of levels and write them to a file.
    Generate(GenerateArgs),
    /// Solve levels with the instrumented planner and print run stats.
    Solve(SolveArgs),
    /// Compute one metric for a level or a pair of levels.
    Metric(MetricArgs),
    /// Run a config-driven experiment and write its CSV outputs.
    Experiment(ExperimentArgs),
    /// Run a statistical test on two CSV columns.
    Stats(StatsArgs),
}

fn parse_domain(s: &str) -> Result<Domain, String> {
    Domain::parse(s).ok_or_else(|| format!("unknown domain {s:?} (maze|platformer)"))
}

fn parse_repr(s: &str) -> Result<Repr, String> {
    Repr::parse(s).ok_or_else(|| format!("unknown representation {s:?}"))
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    Metric::parse(s).ok_or_else(|| format!("unknown metric {s:?}"))
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_parser = parse_domain)]
    domain: Domain,
    #[arg(long)]
    width: usize,
    #[arg(long)]
    height: usize,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Wall probability for random mazes.
    #[arg(long, default_value_t = 0.3)]
    wall_prob: f64,
    /// Carve a maze of this difficulty class (1-5) instead of rolling
    /// random walls.
    #[arg(long)]
    difficulty_class: Option<u8>,
    #[arg(long, default_value_t = DEFAULT_GAP_RATE)]
    gap_rate: f64,
    #[arg(long, default_value_t = DEFAULT_ENEMY_RATE)]
    enemy_rate: f64,
    /// Output level-set file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_parser = parse_domain)]
    domain: Domain,
    /// Level-set file to solve.
    #[arg(long)]
    file: PathBuf,
    /// Solve only this level (default: all).
    #[arg(long)]
    index: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
}

#[derive(Args)]
struct MetricArgs {
    #[arg(long, value_parser = parse_metric)]
    metric: Metric,
    #[arg(long, value_parser = parse_domain)]
    domain: Domain,
    /// Level-set file holding the level(s).
    #[arg(long)]
    file: PathBuf,
    /// First (or only) level index.
    #[arg(long, default_value_t = 0)]
    index_a: usize,
    /// Second level index for pairwise metrics.
    #[arg(long)]
    index_b: Option<usize>,
    #[arg(long, value_parser = parse_repr, default_value = "flat")]
    repr: Repr,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Flat key=value config file.
    #[arg(long)]
    config: PathBuf,
    /// Override a config key, e.g. --set seeds=1,2,3 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Args)]
struct StatsArgs {
    /// Test to run: pearson | mann_whitney.
    #[arg(long)]
    test: String,
    #[arg(long)]
    file_a: PathBuf,
    /// Column name in file_a's header.
    #[arg(long, default_value = "value")]
    col_a: String,
    #[arg(long)]
    file_b: PathBuf,
    #[arg(long, default_value = "value")]
    col_b: String,
    /// less | greater | two-sided (Mann-Whitney only).
    #[arg(long, default_value = "two-sided")]
    alternative: String,
}

struct CliError {
    code: u8,
    msg: String,
}

impl CliError {
    fn config(msg: impl Into<String>) -> CliError {
        CliError { code: 2, msg: msg.into() }
    }
}

type CliResult<T> = Result<T, CliError>;

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError { code: 4, msg: e.to_string() }
    }
}

impl From<LevelIoError> for CliError {
    fn from(e: LevelIoError) -> CliError {
        let code = match &e {
            LevelIoError::Parse(_) => 2,
            LevelIoError::Io { .. } => 4,
        };
        CliError { code, msg: e.to_string() }
    }
}

impl From<pcg_eval_core::ExperimentError> for CliError {
    fn from(e: pcg_eval_core::ExperimentError) -> CliError {
        CliError { code: exit_code(&e) as u8, msg: e.to_string() }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> CliError {
        CliError::config(e.to_string())
    }
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> CliError {
        CliError::config(e.to_string())
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> CliError {
        CliError::config(e.to_string())
    }
}

impl From<MazeError> for CliError {
    fn from(e: MazeError) -> CliError {
        CliError::config(e.to_string())
    }
}

impl From<PlatformerError> for CliError {
    fn from(e: PlatformerError) -> CliError {
        CliError::config(e.to_string())
    }
}

impl From<GenError> for CliError {
    fn from(e: GenError) -> CliError {
        let code = match e {
            GenError::BadDimensions { .. } => 2,
            GenError::UnsolvableBase => 3,
        };
        CliError { code, msg: e.to_string() }
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let base = cli.output_dir;
    match cli.cmd {
        Cmd::Generate(args) => generate(&base, args),
        Cmd::Solve(args) => solve(&base, args),
        Cmd::Metric(args) => metric(&base, args),
        Cmd::Experiment(args) => experiment(&base, args),
        Cmd::Stats(args) => stats(&base, args),
    }
}

fn generate(base: &Path, args: GenerateArgs) -> CliResult<()> {
    let mut levels = Vec::with_capacity(args.count);
    for i in 0..args.count {
        let seed = mix_seed(args.seed, i as u64);
        let level = match (args.domain, args.difficulty_class) {
            (Domain::Maze, Some(c)) => {
                let class = DifficultyClass::from_index(c)
                    .ok_or_else(|| CliError::config(format!("difficulty class {c} not in 1-5")))?;
                gen_maze_with_difficulty(args.width, args.height, class, seed)?
            }
            (Domain::Maze, None) => {
                gen_random_maze(args.width, args.height, args.wall_prob, seed)
            }
            (Domain::Platformer, Some(_)) => {
                return Err(CliError::config("difficulty classes only exist for mazes"))
            }
            (Domain::Platformer, None) => {
                gen_platformer(args.width, args.height, args.gap_rate, args.enemy_rate, seed)
            }
        };
        levels.push(level);
    }
    let out = resolve(base, &args.out);
    if let Some(parent) = out.parent() {
        std::fs::create_dir_all(parent)?;
    }
    write_level_set(&out, &levels)?;
    println!("wrote {} levels to {}", levels.len(), out.display());
    Ok(())
}

fn load_levels(base: &Path, file: &Path, domain: Domain) -> CliResult<Vec<TileGrid>> {
    let levels = read_level_set(&resolve(base, file), domain)?;
    if levels.is_empty() {
        return Err(CliError::config("level file is empty"));
    }
    Ok(levels)
}

fn pick(levels: &[TileGrid], i: usize) -> CliResult<&TileGrid> {
    levels
        .get(i)
        .ok_or_else(|| CliError::config(format!("level index {i} out of range 0..{}", levels.len())))
}

fn solve(base: &Path, args: SolveArgs) -> CliResult<()> {
    let levels = load_levels(base, &args.file, args.domain)?;
    let indices: Vec<usize> = match args.index {
        Some(i) => {
            pick(&levels, i)?;
            vec![i]
        }
        None => (0..levels.len()).collect(),
    };
    for i in indices {
        let line = match args.domain {
            Domain::Maze => describe_run(i, &solve_maze(&levels[i], args.budget)?),
            Domain::Platformer => describe_run(i, &solve_platformer(&levels[i], args.budget)?),
        };
        println!("{line}");
    }
    Ok(())
}

fn describe_run<S, K: Eq + std::hash::Hash>(
    i: usize,
    r: &pcg_eval_core::SearchResult<S, K>,
) -> String {
    let off = if r.solved {
        pcg_eval_core::off_path_expansions(r).map(|n| n.to_string()).unwrap_or_default()
    } else {
        "-".to_string()
    };
    format!(
        "level {i}: solved={} length={} expansions={} off_path={off} budget_exhausted={}",
        r.solved,
        r.actions.len(),
        r.expansions_total,
        r.budget_exhausted
    )
}

fn metric(base: &Path, args: MetricArgs) -> CliResult<()> {
    let levels = load_levels(base, &args.file, args.domain)?;
    let a = pick(&levels, args.index_a)?;
    let value = if args.metric.is_pairwise() {
        let ib = args.index_b.unwrap_or(1);
        let b = pick(&levels, ib)?;
        match args.metric {
            Metric::CD => compression_distance(a, b, args.repr)?,
            Metric::AStarDiversity | Metric::ManhattanDiversity => match args.domain {
                Domain::Maze => {
                    let ra = solve_maze(a, args.budget)?;
                    let rb = solve_maze(b, args.budget)?;
                    if args.metric == Metric::AStarDiversity {
                        astar_diversity(&ra, &rb)?
                    } else {
                        manhattan_diversity(&ra, &rb)?
                    }
                }
                Domain::Platformer => {
                    let ra = solve_platformer(a, args.budget)?;
                    let rb = solve_platformer(b, args.budget)?;
                    if args.metric == Metric::AStarDiversity {
                        astar_diversity(&ra, &rb)?
                    } else {
                        manhattan_diversity(&ra, &rb)?
                    }
                }
            },
            _ => unreachable!(),
        }
    } else {
        if args.index_b.is_some() {
            return Err(CliError::config(format!(
                "{} scores a single level; --index-b is not accepted",
                args.metric
            )));
        }
        match args.metric {
            Metric::Leniency => leniency(a)?,
            Metric::AStarDifficulty => match args.domain {
                Domain::Maze => {
                    let run = solve_maze(a, args.budget)?;
                    astar_difficulty(&run, maze_reachable_count(a)?)?
                }
                Domain::Platformer => {
                    let run = solve_platformer(a, args.budget)?;
                    let reach = platformer_reachable_states(a, usize::MAX)?;
                    astar_difficulty(&run, reach.count)?
                }
            },
            _ => unreachable!(),
        }
    };
    println!("{value}");
    Ok(())
}

fn experiment(base: &Path, args: ExperimentArgs) -> CliResult<()> {
    let path = resolve(base, &args.config);
    let text = std::fs::read_to_string(&path)?;
    let mut cfg = ExperimentConfig::parse_str(&text)?;
    for setting in &args.sets {
        let (k, v) = setting
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("--set needs KEY=VALUE, got {setting:?}")))?;
        cfg.apply(k.trim(), v.trim())?;
    }
    cfg.validate()?;
    cfg.output_dir = resolve(base, &cfg.output_dir);
    let out = run_experiment(&cfg)?;
    for file in out.files {
        println!("{}", file.display());
    }
    Ok(())
}

/// Read one named column of a headered CSV as floats.
fn read_column(path: &Path, column: &str) -> CliResult<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| CliError::config("empty CSV"))?;
    let idx = header
        .split(',')
        .position(|c| c == column)
        .ok_or_else(|| CliError::config(format!("no column {column:?} in {}", path.display())))?;
    let mut values = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cell = line.split(',').nth(idx).unwrap_or("");
        let v: f64 = cell.parse().map_err(|_| {
            CliError::config(format!("line {}: bad number {cell:?}", lineno + 2))
        })?;
        values.push(v);
    }
    Ok(values)
}

fn stats(base: &Path, args: StatsArgs) -> CliResult<()> {
    let a = read_column(&resolve(base, &args.file_a), &args.col_a)?;
    let b = read_column(&resolve(base, &args.file_b), &args.col_b)?;
    let report = match args.test.as_str() {
        "pearson" => pearson(&a, &b)?,
        "mann_whitney" | "mann-whitney" => {
            let alternative = match args.alternative.as_str() {
                "less" => Alternative::Less,
                "greater" => Alternative::Greater,
                "two-sided" | "two_sided" => Alternative::TwoSided,
                other => {
                    return Err(CliError::config(format!("unknown alternative {other:?}")))
                }
            };
            if a.is_empty() || b.is_empty() {
                return Err(CliError::config("both samples must be non-empty"));
            }
            mann_whitney_u(&a, &b, alternative)
        }
        other => return Err(CliError::config(format!("unknown test {other:?}"))),
    };
    println!(
        "statistic={} p_value={} n1={} n2={} alternative={}",
        report.statistic, report.p_value, report.n1, report.n2, report.alternative
    );
    Ok(())
}
