//! Simulation-based evaluation of procedurally generated tile levels.
//!
//! The crate models two playable domains (corner-to-corner mazes and a
//! discrete side-scrolling platformer), solves levels with an instrumented
//! A* planner, and scores level sets with agent-derived metrics (action
//! diversity, search difficulty) alongside compression distance and
//! leniency baselines. Generators, significance tests, and the batch
//! experiment driver live here too; the `pcg-eval` binary is a thin shell
//! over this API.

pub mod experiments;
pub mod generators;
pub mod level;
pub mod maze;
pub mod metrics;
pub mod planner;
pub mod platformer;
pub mod repr;
pub mod stats;

pub use experiments::{
    exit_code, init_thread_pool, run_difficulty_correlation, run_difficulty_ordering,
    run_diversity_distribution, run_experiment, run_size_sweep, run_visual_variation,
    ConfigError, Experiment, ExperimentConfig, ExperimentError, ExperimentOutput,
    EXCLUSIONS_FILE, MATRIX_FILE, REPORT_FILE, SAMPLES_FILE, SUMMARY_FILE,
};
pub use generators::{
    dead_end_cell_fraction, gen_fixed_path_base, gen_maze_with_difficulty, gen_platformer,
    gen_random_maze, gen_visual_variants, mix_seed, DifficultyClass, DifficultyClassSet, GenError,
    DEFAULT_ENEMY_RATE, DEFAULT_GAP_RATE,
};
pub use level::{
    parse_level, parse_level_set, read_level_set, serialize_level, serialize_level_set,
    write_level_set, Domain, LevelError, LevelIoError, LevelSet, TileGrid, TileKind,
};
pub use maze::{
    is_solvable, maze_heuristic, maze_start_goal, maze_successors, reachable_cells, solve_maze,
    MazeAction, MazeDomain, MazeError, MazeState,
};
pub use metrics::{
    astar_difficulty, astar_diversity, compression_distance, leniency, leniency_maze,
    leniency_platformer, levenshtein, manhattan_diversity, maze_reachable_count, ncd, HasPosition,
    Metric, MetricError, MetricSample,
};
pub use planner::{astar, off_path_expansions, PlannerError, SearchDomain, SearchResult, DEFAULT_BUDGET};
pub use platformer::{
    platformer_goal_col, platformer_reachable_states, solve_platformer, Goomba, PlatformerAction,
    PlatformerDomain, PlatformerError, PlatformerKey, PlatformerSim, PlatformerState,
    ReachableStates,
};
pub use repr::{
    column_features, level_repr, platform_height, repr_concatenated, repr_flat, repr_normal,
    ColumnFeatures, HeightDelta, Repr, ReprError,
};
pub use stats::{mann_whitney_u, pairwise_indices, pearson, Alternative, StatReport, StatsError};
