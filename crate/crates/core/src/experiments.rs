//! Config-driven experiment recipes. Every run is a pure function of its
//! config: generation is seeded, pairwise work is parallel but collected
//! and sorted on a canonical key before writing, and floats are written
//! with their shortest round-trip representation, so output files are
//! byte-identical across reruns.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use rayon::prelude::*;
use thiserror::Error;

use crate::generators::{
    gen_fixed_path_base, gen_maze_with_difficulty, gen_platformer, gen_random_maze,
    gen_visual_variants, mix_seed, DifficultyClass, GenError, DEFAULT_ENEMY_RATE,
    DEFAULT_GAP_RATE,
};
use crate::level::{Domain, TileGrid};
use crate::maze::MazeState;
use crate::metrics::{
    astar_difficulty, astar_diversity, compression_distance, leniency, maze_reachable_count,
    MetricError,
};
use crate::planner::{SearchResult, DEFAULT_BUDGET};
use crate::platformer::{solve_platformer, PlatformerKey, PlatformerState};
use crate::repr::Repr;
use crate::stats::{mann_whitney_u, pairwise_indices, pearson, Alternative, StatsError};

pub const SAMPLES_FILE: &str = "samples.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const MATRIX_FILE: &str = "matrix.csv";
pub const REPORT_FILE: &str = "report.csv";
pub const EXCLUSIONS_FILE: &str = "exclusions.csv";

const SAMPLES_HEADER: &str = "experiment,domain,seed,size_w,size_h,metric,repr,id_a,id_b,value";
const EXCLUSIONS_HEADER: &str = "experiment,domain,seed,size_w,size_h,attempt,reason";
/// Rejection-sampling attempt ceiling, as a multiple of the target count.
const ATTEMPT_FACTOR: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    DiversityDistribution,
    SizeSweep,
    VisualVariation,
    DifficultyOrdering,
    DifficultyCorrelation,
}

impl Experiment {
    pub fn parse(s: &str) -> Option<Experiment> {
        match s {
            "diversity_distribution" => Some(Experiment::DiversityDistribution),
            "size_sweep" => Some(Experiment::SizeSweep),
            "visual_variation" => Some(Experiment::VisualVariation),
            "difficulty_ordering" => Some(Experiment::DifficultyOrdering),
            "difficulty_correlation" => Some(Experiment::DifficultyCorrelation),
            _ => None,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::DiversityDistribution => "diversity_distribution",
            Experiment::SizeSweep => "size_sweep",
            Experiment::VisualVariation => "visual_variation",
            Experiment::DifficultyOrdering => "difficulty_ordering",
            Experiment::DifficultyCorrelation => "difficulty_correlation",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("bad value {value:?} for key {key}")]
    BadValue { key: String, value: String },
    #[error("missing required key {0}")]
    MissingKey(&'static str),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub domain: Domain,
    pub sizes: Vec<(usize, usize)>,
    pub n_levels: usize,
    pub seeds: Vec<u64>,
    pub reprs: Vec<Repr>,
    pub output_dir: PathBuf,
    pub budget: usize,
    pub wall_prob: f64,
    pub gap_rate: f64,
    pub enemy_rate: f64,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> ExperimentConfig {
        ExperimentConfig {
            experiment,
            domain: Domain::Maze,
            sizes: vec![(20, 20)],
            n_levels: 100,
            seeds: vec![1],
            reprs: vec![Repr::Flat],
            output_dir: PathBuf::from("."),
            budget: DEFAULT_BUDGET,
            wall_prob: 0.3,
            gap_rate: DEFAULT_GAP_RATE,
            enemy_rate: DEFAULT_ENEMY_RATE,
        }
    }

    /// Flat key=value text; blank lines and '#' comments are skipped.
    /// `experiment` is the only required key.
    pub fn parse_str(text: &str) -> Result<ExperimentConfig, ConfigError> {
        let mut pairs = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Invalid(format!("not a key=value line: {line:?}")))?;
            pairs.push((key.trim().to_string(), value.trim().to_string()));
        }
        let experiment = pairs
            .iter()
            .find(|(k, _)| k == "experiment")
            .ok_or(ConfigError::MissingKey("experiment"))
            .and_then(|(k, v)| {
                Experiment::parse(v)
                    .ok_or_else(|| ConfigError::BadValue { key: k.clone(), value: v.clone() })
            })?;
        let mut cfg = ExperimentConfig::new(experiment);
        for (k, v) in &pairs {
            cfg.apply(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Set one key; used both for file keys and CLI flag overrides.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = || ConfigError::BadValue { key: key.to_string(), value: value.to_string() };
        match key {
            "experiment" => self.experiment = Experiment::parse(value).ok_or_else(bad)?,
            "domain" => self.domain = Domain::parse(value).ok_or_else(bad)?,
            "sizes" => {
                let mut sizes = Vec::new();
                for part in value.split(',') {
                    let (w, h) = part.trim().split_once('x').ok_or_else(bad)?;
                    sizes.push((
                        w.parse().map_err(|_| bad())?,
                        h.parse().map_err(|_| bad())?,
                    ));
                }
                self.sizes = sizes;
            }
            "n_levels" => self.n_levels = value.parse().map_err(|_| bad())?,
            "seeds" => {
                let seeds: Result<Vec<u64>, _> =
                    value.split(',').map(|s| s.trim().parse()).collect();
                self.seeds = seeds.map_err(|_| bad())?;
            }
            "reprs" => {
                let reprs: Option<Vec<Repr>> =
                    value.split(',').map(|s| Repr::parse(s.trim())).collect();
                self.reprs = reprs.ok_or_else(bad)?;
            }
            "output_dir" => self.output_dir = PathBuf::from(value),
            "budget" => self.budget = value.parse().map_err(|_| bad())?,
            "wall_prob" => self.wall_prob = value.parse().map_err(|_| bad())?,
            "gap_rate" => self.gap_rate = value.parse().map_err(|_| bad())?,
            "enemy_rate" => self.enemy_rate = value.parse().map_err(|_| bad())?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.sizes.is_empty() {
            return Err(ConfigError::Invalid("sizes must be non-empty".to_string()));
        }
        if self.seeds.is_empty() {
            return Err(ConfigError::Invalid("seeds must be non-empty".to_string()));
        }
        if self.reprs.is_empty() {
            return Err(ConfigError::Invalid("reprs must be non-empty".to_string()));
        }
        if self.budget == 0 {
            return Err(ConfigError::Invalid("budget must be positive".to_string()));
        }
        if self.experiment == Experiment::SizeSweep && self.sizes.len() < 2 {
            return Err(ConfigError::Invalid("size_sweep needs at least 2 sizes".to_string()));
        }
        if self.n_levels < 2
            && matches!(
                self.experiment,
                Experiment::DiversityDistribution
                    | Experiment::SizeSweep
                    | Experiment::VisualVariation
            )
        {
            return Err(ConfigError::Invalid("pairwise experiments need n_levels >= 2".to_string()));
        }
        if self.domain == Domain::Maze && self.reprs.iter().any(|&r| r != Repr::Flat) {
            return Err(ConfigError::Invalid(
                "maze levels only support the flat representation".to_string(),
            ));
        }
        for &(w, h) in &self.sizes {
            let ok = match self.domain {
                Domain::Maze => w >= 2 && h >= 2,
                Domain::Platformer => w >= 10 && h >= 5,
            };
            if !ok {
                return Err(ConfigError::Invalid(format!("size {w}x{h} too small for domain")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("seed {seed}: only {got} solvable levels after {attempts} attempts, need {need}")]
    InsufficientSolvable { seed: u64, got: usize, need: usize, attempts: usize },
    #[error("base level is not solvable")]
    UnsolvableBase,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

impl From<GenError> for ExperimentError {
    fn from(e: GenError) -> ExperimentError {
        match e {
            GenError::UnsolvableBase => ExperimentError::UnsolvableBase,
            GenError::BadDimensions { w, h } => {
                ExperimentError::Config(ConfigError::Invalid(format!("bad dimensions {w}x{h}")))
            }
        }
    }
}

/// Process exit code for an experiment failure: 2 config, 3 level supply,
/// 4 I/O.
pub fn exit_code(err: &ExperimentError) -> i32 {
    match err {
        ExperimentError::Config(_) | ExperimentError::Metric(_) | ExperimentError::Stats(_) => 2,
        ExperimentError::InsufficientSolvable { .. } | ExperimentError::UnsolvableBase => 3,
        ExperimentError::Io(_) => 4,
    }
}

/// Cap the global rayon pool at PCG_EVAL_THREADS if set. First caller
/// wins; later calls are no-ops, matching rayon's global-pool semantics.
pub fn init_thread_pool() {
    static INIT: OnceLock<()> = OnceLock::new();
    INIT.get_or_init(|| {
        if let Some(n) = std::env::var("PCG_EVAL_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&n| n > 0)
        {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    });
}

/// One line of the shared sample schema. `experiment` and `domain` are
/// added at write time.
#[derive(Debug, Clone, PartialEq)]
struct Row {
    seed: u64,
    size_w: usize,
    size_h: usize,
    metric: String,
    repr: String,
    id_a: String,
    id_b: String,
    value: f64,
}

fn sort_key(r: &Row) -> (u64, usize, usize, String, String, String, String) {
    (r.seed, r.size_w, r.size_h, r.metric.clone(), r.repr.clone(), r.id_a.clone(), r.id_b.clone())
}

#[derive(Debug, Clone)]
struct Exclusion {
    seed: u64,
    size_w: usize,
    size_h: usize,
    attempt: usize,
    reason: String,
}

/// Zero-padded level ids keep lexicographic and numeric order identical.
fn level_id(i: usize) -> String {
    format!("{i:04}")
}

fn write_rows(
    path: &Path,
    cfg: &ExperimentConfig,
    header: &str,
    rows: &mut Vec<Row>,
) -> Result<(), ExperimentError> {
    rows.sort_by(|a, b| sort_key(a).cmp(&sort_key(b)));
    let mut out = String::with_capacity(rows.len() * 48 + header.len() + 1);
    out.push_str(header);
    out.push('\n');
    for r in rows.iter() {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            cfg.experiment, cfg.domain, r.seed, r.size_w, r.size_h, r.metric, r.repr, r.id_a,
            r.id_b, r.value
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

fn write_exclusions(
    path: &Path,
    cfg: &ExperimentConfig,
    mut rows: Vec<Exclusion>,
) -> Result<(), ExperimentError> {
    rows.sort_by_key(|e| (e.seed, e.size_w, e.size_h, e.attempt));
    let mut out = String::new();
    out.push_str(EXCLUSIONS_HEADER);
    out.push('\n');
    for e in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            cfg.experiment, cfg.domain, e.seed, e.size_w, e.size_h, e.attempt, e.reason
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Per-domain solver runs kept alongside the levels they solved.
enum Runs {
    Maze(Vec<SearchResult<MazeState, MazeState>>),
    Platformer(Vec<SearchResult<PlatformerState, PlatformerKey>>),
}

impl Runs {
    fn diversity(&self, i: usize, j: usize) -> Result<f64, MetricError> {
        match self {
            Runs::Maze(v) => astar_diversity(&v[i], &v[j]),
            Runs::Platformer(v) => astar_diversity(&v[i], &v[j]),
        }
    }
}

fn solve_any(grid: &TileGrid, budget: usize) -> (bool, Option<String>) {
    match grid.domain() {
        Domain::Maze => match crate::maze::solve_maze(grid, budget) {
            Ok(r) if r.solved => (true, None),
            Ok(r) => (false, Some(if r.budget_exhausted { "budget" } else { "unsolvable" }.into())),
            Err(e) => (false, Some(e.to_string())),
        },
        Domain::Platformer => match solve_platformer(grid, budget) {
            Ok(r) if r.solved => (true, None),
            Ok(r) => (false, Some(if r.budget_exhausted { "budget" } else { "unsolvable" }.into())),
            Err(e) => (false, Some(e.to_string())),
        },
    }
}

/// Rejection-sample exactly `need` solvable levels for one seed, recording
/// every rejected attempt.
fn sample_solvable(
    cfg: &ExperimentConfig,
    seed: u64,
    w: usize,
    h: usize,
    need: usize,
) -> Result<(Vec<TileGrid>, Runs, Vec<Exclusion>), ExperimentError> {
    let cap = (need * ATTEMPT_FACTOR).max(200);
    let mut levels = Vec::with_capacity(need);
    let mut exclusions = Vec::new();
    let mut attempt = 0usize;
    while levels.len() < need && attempt < cap {
        let level_seed = mix_seed(seed, attempt as u64);
        let grid = match cfg.domain {
            Domain::Maze => gen_random_maze(w, h, cfg.wall_prob, level_seed),
            Domain::Platformer => gen_platformer(w, h, cfg.gap_rate, cfg.enemy_rate, level_seed),
        };
        match solve_any(&grid, cfg.budget) {
            (true, _) => levels.push(grid),
            (false, reason) => exclusions.push(Exclusion {
                seed,
                size_w: w,
                size_h: h,
                attempt,
                reason: reason.unwrap_or_else(|| "unsolvable".into()),
            }),
        }
        attempt += 1;
    }
    if levels.len() < need {
        return Err(ExperimentError::InsufficientSolvable {
            seed,
            got: levels.len(),
            need,
            attempts: attempt,
        });
    }
    let runs = solve_all(&levels, cfg.budget);
    Ok((levels, runs, exclusions))
}

fn solve_all(levels: &[TileGrid], budget: usize) -> Runs {
    match levels.first().map(|l| l.domain()) {
        Some(Domain::Platformer) => Runs::Platformer(
            levels
                .par_iter()
                .map(|l| solve_platformer(l, budget).expect("level validated at sampling"))
                .collect(),
        ),
        _ => Runs::Maze(
            levels
                .par_iter()
                .map(|l| crate::maze::solve_maze(l, budget).expect("level validated at sampling"))
                .collect(),
        ),
    }
}

/// Pairwise CD per representation plus A* diversity for one level list.
fn pairwise_rows(
    cfg: &ExperimentConfig,
    seed: u64,
    (w, h): (usize, usize),
    levels: &[TileGrid],
    runs: &Runs,
) -> Result<Vec<Row>, ExperimentError> {
    let pairs = pairwise_indices(levels.len());
    let rows: Result<Vec<Vec<Row>>, MetricError> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut out = Vec::with_capacity(cfg.reprs.len() + 1);
            for &repr in &cfg.reprs {
                let value = compression_distance(&levels[i], &levels[j], repr)?;
                out.push(Row {
                    seed,
                    size_w: w,
                    size_h: h,
                    metric: "cd".into(),
                    repr: repr.to_string(),
                    id_a: level_id(i),
                    id_b: level_id(j),
                    value,
                });
            }
            out.push(Row {
                seed,
                size_w: w,
                size_h: h,
                metric: "astar_diversity".into(),
                repr: String::new(),
                id_a: level_id(i),
                id_b: level_id(j),
                value: runs.diversity(i, j)?,
            });
            Ok(out)
        })
        .collect();
    Ok(rows?.into_iter().flatten().collect())
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub files: Vec<PathBuf>,
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, ExperimentError> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.output_dir)?;
    match cfg.experiment {
        Experiment::DiversityDistribution => run_diversity_distribution(cfg),
        Experiment::SizeSweep => run_size_sweep(cfg),
        Experiment::VisualVariation => run_visual_variation(cfg),
        Experiment::DifficultyOrdering => run_difficulty_ordering(cfg),
        Experiment::DifficultyCorrelation => run_difficulty_correlation(cfg),
    }
}

/// Per seed: n solvable levels, all pairwise CD and A* diversity samples.
pub fn run_diversity_distribution(
    cfg: &ExperimentConfig,
) -> Result<ExperimentOutput, ExperimentError> {
    let (w, h) = cfg.sizes[0];
    let mut rows = Vec::new();
    let mut exclusions = Vec::new();
    for &seed in &cfg.seeds {
        let (levels, runs, excl) = sample_solvable(cfg, seed, w, h, cfg.n_levels)?;
        exclusions.extend(excl);
        rows.extend(pairwise_rows(cfg, seed, (w, h), &levels, &runs)?);
    }
    let samples = cfg.output_dir.join(SAMPLES_FILE);
    let excl_path = cfg.output_dir.join(EXCLUSIONS_FILE);
    write_rows(&samples, cfg, SAMPLES_HEADER, &mut rows)?;
    write_exclusions(&excl_path, cfg, exclusions)?;
    Ok(ExperimentOutput { files: vec![samples, excl_path] })
}

/// Diversity distributions for each size, plus mean/variance summary rows
/// per (seed, size, metric, repr) group.
pub fn run_size_sweep(cfg: &ExperimentConfig) -> Result<ExperimentOutput, ExperimentError> {
    let mut rows = Vec::new();
    let mut exclusions = Vec::new();
    for &(w, h) in &cfg.sizes {
        for &seed in &cfg.seeds {
            let (levels, runs, excl) = sample_solvable(cfg, seed, w, h, cfg.n_levels)?;
            exclusions.extend(excl);
            rows.extend(pairwise_rows(cfg, seed, (w, h), &levels, &runs)?);
        }
    }

    let mut groups: BTreeMap<(u64, usize, usize, String, String), Vec<f64>> = BTreeMap::new();
    for r in &rows {
        groups
            .entry((r.seed, r.size_w, r.size_h, r.metric.clone(), r.repr.clone()))
            .or_default()
            .push(r.value);
    }
    let mut summary = Vec::new();
    for ((seed, w, h, metric, repr), values) in groups {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let variance = if values.len() < 2 {
            0.0
        } else {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
        };
        for (stat, value) in [("mean", mean), ("variance", variance)] {
            summary.push(Row {
                seed,
                size_w: w,
                size_h: h,
                metric: metric.clone(),
                repr: repr.clone(),
                id_a: stat.into(),
                id_b: String::new(),
                value,
            });
        }
    }

    let samples = cfg.output_dir.join(SAMPLES_FILE);
    let summary_path = cfg.output_dir.join(SUMMARY_FILE);
    let excl_path = cfg.output_dir.join(EXCLUSIONS_FILE);
    write_rows(&samples, cfg, SAMPLES_HEADER, &mut rows)?;
    write_rows(&summary_path, cfg, SAMPLES_HEADER, &mut summary)?;
    write_exclusions(&excl_path, cfg, exclusions)?;
    Ok(ExperimentOutput { files: vec![samples, summary_path, excl_path] })
}

/// Variants of one fixed-path base per seed; pairwise CD and A* diversity.
pub fn run_visual_variation(cfg: &ExperimentConfig) -> Result<ExperimentOutput, ExperimentError> {
    let (w, h) = cfg.sizes[0];
    let base = gen_fixed_path_base(w, h);
    let mut rows = Vec::new();
    for &seed in &cfg.seeds {
        let set = gen_visual_variants(&base, cfg.n_levels, seed)?;
        let runs = solve_all(&set.levels, cfg.budget);
        rows.extend(pairwise_rows(cfg, seed, (w, h), &set.levels, &runs)?);
    }
    let samples = cfg.output_dir.join(SAMPLES_FILE);
    let excl_path = cfg.output_dir.join(EXCLUSIONS_FILE);
    write_rows(&samples, cfg, SAMPLES_HEADER, &mut rows)?;
    write_exclusions(&excl_path, cfg, Vec::new())?;
    Ok(ExperimentOutput { files: vec![samples, excl_path] })
}

/// Per-class A* difficulty and leniency samples plus the 5x5 result
/// matrix: class means on the diagonal, one-sided Mann-Whitney p-values
/// off it (A*(i) < A*(j); Leniency(i) > Leniency(j)).
pub fn run_difficulty_ordering(cfg: &ExperimentConfig) -> Result<ExperimentOutput, ExperimentError> {
    let (w, h) = cfg.sizes[0];
    let mut rows = Vec::new();
    let mut matrix = Vec::new();
    for &seed in &cfg.seeds {
        // per class: difficulty and leniency samples
        let mut difficulty: BTreeMap<u8, Vec<f64>> = BTreeMap::new();
        let mut lenient: BTreeMap<u8, Vec<f64>> = BTreeMap::new();
        for class in DifficultyClass::ALL {
            let levels: Vec<TileGrid> = (0..cfg.n_levels)
                .map(|i| {
                    let level_seed = mix_seed(seed, (class.index() as u64) << 32 | i as u64);
                    gen_maze_with_difficulty(w, h, class, level_seed)
                })
                .collect::<Result<_, _>>()?;
            let per_level: Result<Vec<(f64, f64)>, MetricError> = levels
                .par_iter()
                .map(|level| {
                    let run = crate::maze::solve_maze(level, cfg.budget)
                        .map_err(|_| MetricError::Unsolvable)?;
                    let d = astar_difficulty(&run, maze_reachable_count(level)?)?;
                    let l = leniency(level)?;
                    Ok((d, l))
                })
                .collect();
            for (i, (d, l)) in per_level?.into_iter().enumerate() {
                let id = format!("{}-{}", class.index(), level_id(i));
                for (metric, value) in [("astar_difficulty", d), ("leniency", l)] {
                    rows.push(Row {
                        seed,
                        size_w: w,
                        size_h: h,
                        metric: metric.into(),
                        repr: String::new(),
                        id_a: id.clone(),
                        id_b: String::new(),
                        value,
                    });
                }
                difficulty.entry(class.index()).or_default().push(d);
                lenient.entry(class.index()).or_default().push(l);
            }
        }

        for (metric, samples, alternative) in [
            ("astar_difficulty", &difficulty, Alternative::Less),
            ("leniency", &lenient, Alternative::Greater),
        ] {
            for class in DifficultyClass::ALL {
                let values = &samples[&class.index()];
                matrix.push(Row {
                    seed,
                    size_w: w,
                    size_h: h,
                    metric: format!("{metric}_mean"),
                    repr: String::new(),
                    id_a: class.index().to_string(),
                    id_b: String::new(),
                    value: values.iter().sum::<f64>() / values.len() as f64,
                });
            }
            for i in DifficultyClass::ALL {
                for j in DifficultyClass::ALL {
                    if i == j {
                        continue;
                    }
                    let rep =
                        mann_whitney_u(&samples[&i.index()], &samples[&j.index()], alternative);
                    matrix.push(Row {
                        seed,
                        size_w: w,
                        size_h: h,
                        metric: format!("{metric}_p"),
                        repr: String::new(),
                        id_a: i.index().to_string(),
                        id_b: j.index().to_string(),
                        value: rep.p_value,
                    });
                }
            }
        }
    }
    let samples = cfg.output_dir.join(SAMPLES_FILE);
    let matrix_path = cfg.output_dir.join(MATRIX_FILE);
    let excl_path = cfg.output_dir.join(EXCLUSIONS_FILE);
    write_rows(&samples, cfg, SAMPLES_HEADER, &mut rows)?;
    write_rows(&matrix_path, cfg, SAMPLES_HEADER, &mut matrix)?;
    write_exclusions(&excl_path, cfg, Vec::new())?;
    Ok(ExperimentOutput { files: vec![samples, matrix_path, excl_path] })
}

/// Per-level leniency vs A* difficulty over the pooled corpus, with a
/// Pearson report. Pooled rows carry seed 0 in the report file.
pub fn run_difficulty_correlation(
    cfg: &ExperimentConfig,
) -> Result<ExperimentOutput, ExperimentError> {
    let (w, h) = cfg.sizes[0];
    let mut rows = Vec::new();
    let mut exclusions = Vec::new();
    let mut difficulty = Vec::new();
    let mut lenient = Vec::new();
    for &seed in &cfg.seeds {
        let (levels, _, excl) = sample_solvable(cfg, seed, w, h, cfg.n_levels)?;
        exclusions.extend(excl);
        let per_level: Result<Vec<(f64, f64)>, MetricError> = levels
            .par_iter()
            .map(|level| {
                let d = match level.domain() {
                    Domain::Maze => {
                        let run = crate::maze::solve_maze(level, cfg.budget)
                            .map_err(|_| MetricError::Unsolvable)?;
                        astar_difficulty(&run, maze_reachable_count(level)?)?
                    }
                    Domain::Platformer => {
                        let run = solve_platformer(level, cfg.budget)
                            .map_err(|_| MetricError::Unsolvable)?;
                        let reach =
                            crate::platformer::platformer_reachable_states(level, usize::MAX)
                                .map_err(|_| MetricError::Unsolvable)?;
                        astar_difficulty(&run, reach.count)?
                    }
                };
                Ok((d, leniency(level)?))
            })
            .collect();
        for (i, (d, l)) in per_level?.into_iter().enumerate() {
            for (metric, value) in [("astar_difficulty", d), ("leniency", l)] {
                rows.push(Row {
                    seed,
                    size_w: w,
                    size_h: h,
                    metric: metric.into(),
                    repr: String::new(),
                    id_a: level_id(i),
                    id_b: String::new(),
                    value,
                });
            }
            difficulty.push(d);
            lenient.push(l);
        }
    }
    if difficulty.len() < 100 {
        return Err(ExperimentError::InsufficientSolvable {
            seed: cfg.seeds[0],
            got: difficulty.len(),
            need: 100,
            attempts: 0,
        });
    }
    let report = pearson(&difficulty, &lenient)?;
    let mut report_rows = vec![
        Row {
            seed: 0,
            size_w: w,
            size_h: h,
            metric: "pearson_r".into(),
            repr: String::new(),
            id_a: "astar_difficulty".into(),
            id_b: "leniency".into(),
            value: report.statistic,
        },
        Row {
            seed: 0,
            size_w: w,
            size_h: h,
            metric: "pearson_p".into(),
            repr: String::new(),
            id_a: "astar_difficulty".into(),
            id_b: "leniency".into(),
            value: report.p_value,
        },
        Row {
            seed: 0,
            size_w: w,
            size_h: h,
            metric: "n".into(),
            repr: String::new(),
            id_a: "astar_difficulty".into(),
            id_b: "leniency".into(),
            value: report.n1 as f64,
        },
    ];
    let samples = cfg.output_dir.join(SAMPLES_FILE);
    let report_path = cfg.output_dir.join(REPORT_FILE);
    let excl_path = cfg.output_dir.join(EXCLUSIONS_FILE);
    write_rows(&samples, cfg, SAMPLES_HEADER, &mut rows)?;
    write_rows(&report_path, cfg, SAMPLES_HEADER, &mut report_rows)?;
    write_exclusions(&excl_path, cfg, exclusions)?;
    Ok(ExperimentOutput { files: vec![samples, report_path, excl_path] })
}
