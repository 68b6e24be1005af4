//! Python bindings: levels, generators, the planner, metrics, and the
//! statistical tests. Errors surface as ValueError (bad input) or OSError
//! (file trouble).

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use pcg_eval_core as core;

fn val_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_domain(s: &str) -> PyResult<core::Domain> {
    core::Domain::parse(s).ok_or_else(|| val_err(format!("unknown domain {s:?}")))
}

fn parse_repr(s: &str) -> PyResult<core::Repr> {
    core::Repr::parse(s).ok_or_else(|| val_err(format!("unknown representation {s:?}")))
}

fn parse_alternative(s: &str) -> PyResult<core::Alternative> {
    match s {
        "less" => Ok(core::Alternative::Less),
        "greater" => Ok(core::Alternative::Greater),
        "two-sided" | "two_sided" => Ok(core::Alternative::TwoSided),
        _ => Err(val_err(format!("unknown alternative {s:?}"))),
    }
}

/// A rectangular tile level.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct Level {
    grid: core::TileGrid,
}

#[pymethods]
impl Level {
    /// Parse a level from its text form.
    #[new]
    fn new(text: &str, domain: &str) -> PyResult<Level> {
        let grid = core::parse_level(text, parse_domain(domain)?).map_err(val_err)?;
        Ok(Level { grid })
    }

    #[getter]
    fn width(&self) -> usize {
        self.grid.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.grid.height()
    }

    #[getter]
    fn domain(&self) -> String {
        self.grid.domain().to_string()
    }

    /// Tile code character at (x, y).
    fn tile(&self, x: usize, y: usize) -> PyResult<char> {
        if x >= self.grid.width() || y >= self.grid.height() {
            return Err(val_err(format!("({x}, {y}) out of bounds")));
        }
        Ok(self.grid.tile(x, y).code())
    }

    fn to_text(&self) -> String {
        core::serialize_level(&self.grid)
    }

    /// Representation string ("normal", "concatenated", or "flat").
    fn repr_string(&self, repr: &str) -> PyResult<String> {
        core::level_repr(&self.grid, parse_repr(repr)?).map_err(val_err)
    }

    fn __repr__(&self) -> String {
        format!("Level({} {}x{})", self.grid.domain(), self.grid.width(), self.grid.height())
    }
}

/// Outcome of one planner run.
#[pyclass(frozen)]
struct SolveReport {
    #[pyo3(get)]
    solved: bool,
    #[pyo3(get)]
    actions: Vec<u8>,
    #[pyo3(get)]
    path: Vec<(usize, usize)>,
    #[pyo3(get)]
    expansions_total: usize,
    #[pyo3(get)]
    off_path_expansions: Option<usize>,
    #[pyo3(get)]
    budget_exhausted: bool,
}

#[pymethods]
impl SolveReport {
    fn __repr__(&self) -> String {
        format!(
            "SolveReport(solved={}, len={}, expansions={})",
            self.solved,
            self.actions.len(),
            self.expansions_total
        )
    }
}

enum Run {
    Maze(core::SearchResult<core::MazeState, core::MazeState>),
    Platformer(core::SearchResult<core::PlatformerState, core::PlatformerKey>),
}

fn run_level(level: &Level, budget: usize) -> PyResult<Run> {
    match level.grid.domain() {
        core::Domain::Maze => {
            Ok(Run::Maze(core::solve_maze(&level.grid, budget).map_err(val_err)?))
        }
        core::Domain::Platformer => {
            Ok(Run::Platformer(core::solve_platformer(&level.grid, budget).map_err(val_err)?))
        }
    }
}

fn report(run: &Run) -> SolveReport {
    fn build<S, K: Eq + std::hash::Hash>(
        r: &core::SearchResult<S, K>,
        path: Vec<(usize, usize)>,
    ) -> SolveReport {
        SolveReport {
            solved: r.solved,
            actions: r.actions.clone(),
            path,
            expansions_total: r.expansions_total,
            off_path_expansions: core::off_path_expansions(r).ok(),
            budget_exhausted: r.budget_exhausted,
        }
    }
    match run {
        Run::Maze(r) => build(r, r.path_states.iter().map(|s| (s.x, s.y)).collect()),
        Run::Platformer(r) => build(r, r.path_states.iter().map(|s| (s.x, s.y)).collect()),
    }
}

/// Solve a level with A*.
#[pyfunction]
#[pyo3(signature = (level, budget = core::DEFAULT_BUDGET))]
fn solve(level: &Level, budget: usize) -> PyResult<SolveReport> {
    Ok(report(&run_level(level, budget)?))
}

#[pyfunction]
#[pyo3(signature = (w, h, wall_prob = 0.3, seed = 0))]
fn gen_random_maze(w: usize, h: usize, wall_prob: f64, seed: u64) -> Level {
    Level { grid: core::gen_random_maze(w, h, wall_prob, seed) }
}

#[pyfunction]
#[pyo3(signature = (w, h, class_index, seed = 0))]
fn gen_maze_with_difficulty(w: usize, h: usize, class_index: u8, seed: u64) -> PyResult<Level> {
    let class = core::DifficultyClass::from_index(class_index)
        .ok_or_else(|| val_err(format!("difficulty class {class_index} not in 1-5")))?;
    Ok(Level { grid: core::gen_maze_with_difficulty(w, h, class, seed).map_err(val_err)? })
}

#[pyfunction]
#[pyo3(signature = (w, h, gap_rate = core::DEFAULT_GAP_RATE, enemy_rate = core::DEFAULT_ENEMY_RATE, seed = 0))]
fn gen_platformer(w: usize, h: usize, gap_rate: f64, enemy_rate: f64, seed: u64) -> Level {
    Level { grid: core::gen_platformer(w, h, gap_rate, enemy_rate, seed) }
}

#[pyfunction]
fn gen_fixed_path_base(w: usize, h: usize) -> Level {
    Level { grid: core::gen_fixed_path_base(w, h) }
}

#[pyfunction]
fn gen_visual_variants(base: &Level, n: usize, seed: u64) -> PyResult<Vec<Level>> {
    let set = core::gen_visual_variants(&base.grid, n, seed).map_err(val_err)?;
    Ok(set.levels.into_iter().map(|grid| Level { grid }).collect())
}

#[pyfunction]
fn compression_distance(a: &Level, b: &Level, repr: &str) -> PyResult<f64> {
    core::compression_distance(&a.grid, &b.grid, parse_repr(repr)?).map_err(val_err)
}

#[pyfunction]
#[pyo3(signature = (a, b, budget = core::DEFAULT_BUDGET))]
fn astar_diversity(a: &Level, b: &Level, budget: usize) -> PyResult<f64> {
    match (run_level(a, budget)?, run_level(b, budget)?) {
        (Run::Maze(ra), Run::Maze(rb)) => core::astar_diversity(&ra, &rb).map_err(val_err),
        (Run::Platformer(ra), Run::Platformer(rb)) => {
            core::astar_diversity(&ra, &rb).map_err(val_err)
        }
        _ => Err(val_err("levels are from different domains")),
    }
}

#[pyfunction]
#[pyo3(signature = (a, b, budget = core::DEFAULT_BUDGET))]
fn manhattan_diversity(a: &Level, b: &Level, budget: usize) -> PyResult<f64> {
    match (run_level(a, budget)?, run_level(b, budget)?) {
        (Run::Maze(ra), Run::Maze(rb)) => core::manhattan_diversity(&ra, &rb).map_err(val_err),
        (Run::Platformer(ra), Run::Platformer(rb)) => {
            core::manhattan_diversity(&ra, &rb).map_err(val_err)
        }
        _ => Err(val_err("levels are from different domains")),
    }
}

#[pyfunction]
#[pyo3(signature = (level, budget = core::DEFAULT_BUDGET))]
fn astar_difficulty(level: &Level, budget: usize) -> PyResult<f64> {
    match run_level(level, budget)? {
        Run::Maze(run) => {
            let reach = core::maze_reachable_count(&level.grid).map_err(val_err)?;
            core::astar_difficulty(&run, reach).map_err(val_err)
        }
        Run::Platformer(run) => {
            let reach =
                core::platformer_reachable_states(&level.grid, usize::MAX).map_err(val_err)?;
            core::astar_difficulty(&run, reach.count).map_err(val_err)
        }
    }
}

#[pyfunction]
fn leniency(level: &Level) -> PyResult<f64> {
    core::leniency(&level.grid).map_err(val_err)
}

#[pyfunction]
fn levenshtein(a: Vec<u8>, b: Vec<u8>) -> usize {
    core::levenshtein(&a, &b)
}

/// (r, p_value)
#[pyfunction]
fn pearson(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<(f64, f64)> {
    let rep = core::pearson(&xs, &ys).map_err(val_err)?;
    Ok((rep.statistic, rep.p_value))
}

/// (U statistic for `a`, p_value)
#[pyfunction]
#[pyo3(signature = (a, b, alternative = "two-sided"))]
fn mann_whitney_u(a: Vec<f64>, b: Vec<f64>, alternative: &str) -> PyResult<(f64, f64)> {
    if a.is_empty() || b.is_empty() {
        return Err(val_err("both samples must be non-empty"));
    }
    let rep = core::mann_whitney_u(&a, &b, parse_alternative(alternative)?);
    Ok((rep.statistic, rep.p_value))
}

#[pyfunction]
fn pairwise_indices(n: usize) -> PyResult<Vec<(usize, usize)>> {
    if n < 2 {
        return Err(val_err("need at least two items"));
    }
    Ok(core::pairwise_indices(n))
}

/// Run an experiment from config text; returns the written file paths.
#[pyfunction]
fn run_experiment(config_text: &str) -> PyResult<Vec<String>> {
    let cfg = core::ExperimentConfig::parse_str(config_text).map_err(val_err)?;
    let out = core::run_experiment(&cfg).map_err(|e| match &e {
        core::ExperimentError::Io(_) => PyIOError::new_err(e.to_string()),
        _ => val_err(e),
    })?;
    Ok(out.files.into_iter().map(|p| p.display().to_string()).collect())
}

#[pymodule]
fn pcg_eval(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Level>()?;
    m.add_class::<SolveReport>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(gen_random_maze, m)?)?;
    m.add_function(wrap_pyfunction!(gen_maze_with_difficulty, m)?)?;
    m.add_function(wrap_pyfunction!(gen_platformer, m)?)?;
    m.add_function(wrap_pyfunction!(gen_fixed_path_base, m)?)?;
    m.add_function(wrap_pyfunction!(gen_visual_variants, m)?)?;
    m.add_function(wrap_pyfunction!(compression_distance, m)?)?;
    m.add_function(wrap_pyfunction!(astar_diversity, m)?)?;
    m.add_function(wrap_pyfunction!(manhattan_diversity, m)?)?;
    m.add_function(wrap_pyfunction!(astar_difficulty, m)?)?;
    m.add_function(wrap_pyfunction!(leniency, m)?)?;
    m.add_function(wrap_pyfunction!(levenshtein, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(mann_whitney_u, m)?)?;
    m.add_function(wrap_pyfunction!(pairwise_indices, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add("DEFAULT_BUDGET", core::DEFAULT_BUDGET)?;
    Ok(())
}
