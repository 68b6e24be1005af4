//! Level metrics: normalized compression distance, leniency for both
//! domains, and the agent-derived diversity and difficulty scores.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::io::Write;

use flate2::write::GzEncoder;
use flate2::Compression;
use thiserror::Error;

use crate::level::{Domain, TileGrid, TileKind};
use crate::maze::{maze_start_goal, maze_successors, reachable_cells, MazeState};
use crate::planner::{off_path_expansions, SearchResult};
use crate::repr::{column_features, level_repr, Repr, ReprError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    CD,
    Leniency,
    AStarDiversity,
    AStarDifficulty,
    ManhattanDiversity,
}

impl Metric {
    pub fn parse(s: &str) -> Option<Metric> {
        match s {
            "cd" => Some(Metric::CD),
            "leniency" => Some(Metric::Leniency),
            "astar_diversity" => Some(Metric::AStarDiversity),
            "astar_difficulty" => Some(Metric::AStarDifficulty),
            "manhattan_diversity" => Some(Metric::ManhattanDiversity),
            _ => None,
        }
    }

    /// Pairwise metrics compare two levels; the rest score one.
    pub fn is_pairwise(self) -> bool {
        matches!(self, Metric::CD | Metric::AStarDiversity | Metric::ManhattanDiversity)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::CD => write!(f, "cd"),
            Metric::Leniency => write!(f, "leniency"),
            Metric::AStarDiversity => write!(f, "astar_diversity"),
            Metric::AStarDifficulty => write!(f, "astar_difficulty"),
            Metric::ManhattanDiversity => write!(f, "manhattan_diversity"),
        }
    }
}

/// One metric evaluation; pairwise metrics carry two level ids (a < b),
/// per-level metrics one.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSample {
    pub metric: Metric,
    pub value: f64,
    pub id_a: usize,
    pub id_b: Option<usize>,
    pub repr_tag: Option<Repr>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricError {
    #[error("compression distance inputs must be non-empty")]
    EmptyInput,
    #[error("representation {repr} is not defined for domain {domain}")]
    ReprDomainMismatch { repr: Repr, domain: Domain },
    #[error("levels are from different domains: {0} vs {1}")]
    DomainMismatch(Domain, Domain),
    #[error("metric is undefined on unsolved levels")]
    UnsolvedLevel,
    #[error("reachable count {reachable} is smaller than expanded count {expanded}")]
    InvalidDenominator { reachable: usize, expanded: usize },
    #[error("maze is not solvable")]
    Unsolvable,
    #[error(transparent)]
    Repr(#[from] ReprError),
}

/// Compressed size in bytes under DEFLATE in a gzip container at maximum
/// compression; header fields are left at defaults so sizes are stable.
pub fn compressed_len(bytes: &[u8]) -> usize {
    let mut enc = GzEncoder::new(Vec::new(), Compression::best());
    enc.write_all(bytes).expect("in-memory write");
    enc.finish().expect("in-memory finish").len()
}

/// NCD(x, y) = (C(xy) - min(C(x), C(y))) / max(C(x), C(y)).
pub fn ncd(x: &[u8], y: &[u8]) -> Result<f64, MetricError> {
    if x.is_empty() || y.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    let cx = compressed_len(x);
    let cy = compressed_len(y);
    let mut xy = Vec::with_capacity(x.len() + y.len());
    xy.extend_from_slice(x);
    xy.extend_from_slice(y);
    let cxy = compressed_len(&xy);
    Ok((cxy as f64 - cx.min(cy) as f64) / cx.max(cy) as f64)
}

/// NCD over the chosen representation strings of two same-domain levels.
/// Mazes admit only the Flat form.
pub fn compression_distance(a: &TileGrid, b: &TileGrid, repr: Repr) -> Result<f64, MetricError> {
    if a.domain() != b.domain() {
        return Err(MetricError::DomainMismatch(a.domain(), b.domain()));
    }
    if a.domain() == Domain::Maze && repr != Repr::Flat {
        return Err(MetricError::ReprDomainMismatch { repr, domain: a.domain() });
    }
    let sa = level_repr(a, repr)?;
    let sb = level_repr(b, repr)?;
    ncd(sa.as_bytes(), sb.as_bytes())
}

/// Minimum insert/delete/substitute count between two code sequences.
pub fn levenshtein(a: &[u8], b: &[u8]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Edit distance between two action trajectories, normalized by the longer
/// length. Two empty trajectories count as identical.
pub fn astar_diversity<S, K>(
    ra: &SearchResult<S, K>,
    rb: &SearchResult<S, K>,
) -> Result<f64, MetricError> {
    if !ra.solved || !rb.solved {
        return Err(MetricError::UnsolvedLevel);
    }
    let longer = ra.actions.len().max(rb.actions.len());
    if longer == 0 {
        return Ok(0.0);
    }
    Ok(levenshtein(&ra.actions, &rb.actions) as f64 / longer as f64)
}

/// Grid position of a search state, for the Manhattan cross-check.
pub trait HasPosition {
    fn pos(&self) -> (usize, usize);
}

impl HasPosition for MazeState {
    fn pos(&self) -> (usize, usize) {
        (self.x, self.y)
    }
}

impl HasPosition for crate::platformer::PlatformerState {
    fn pos(&self) -> (usize, usize) {
        (self.x, self.y)
    }
}

/// Mean Manhattan distance between corresponding path positions; the
/// shorter path is padded by repeating its final position.
pub fn manhattan_diversity<S: HasPosition, K>(
    ra: &SearchResult<S, K>,
    rb: &SearchResult<S, K>,
) -> Result<f64, MetricError> {
    if !ra.solved || !rb.solved {
        return Err(MetricError::UnsolvedLevel);
    }
    let n = ra.path_states.len().max(rb.path_states.len());
    let mut total = 0usize;
    for i in 0..n {
        let (xa, ya) = ra.path_states[i.min(ra.path_states.len() - 1)].pos();
        let (xb, yb) = rb.path_states[i.min(rb.path_states.len() - 1)].pos();
        total += xa.abs_diff(xb) + ya.abs_diff(yb);
    }
    Ok(total as f64 / n as f64)
}

/// Off-path expansions over the domain's reachable-state count.
pub fn astar_difficulty<S, K: Eq + std::hash::Hash>(
    r: &SearchResult<S, K>,
    reachable_count: usize,
) -> Result<f64, MetricError> {
    let off = off_path_expansions(r).map_err(|_| MetricError::UnsolvedLevel)?;
    if reachable_count < r.expanded.len() {
        return Err(MetricError::InvalidDenominator {
            reachable: reachable_count,
            expanded: r.expanded.len(),
        });
    }
    Ok(off as f64 / reachable_count as f64)
}

/// Deterministic breadth-first tree over empty cells from `from`, in Up,
/// Down, Left, Right expansion order. Returns per-cell predecessors.
fn bfs_tree(grid: &TileGrid, from: MazeState) -> HashMap<MazeState, MazeState> {
    let mut parent = HashMap::new();
    let mut queue = VecDeque::new();
    parent.insert(from, from);
    queue.push_back(from);
    while let Some(s) = queue.pop_front() {
        for (_, next) in maze_successors(grid, s) {
            if !parent.contains_key(&next) {
                parent.insert(next, s);
                queue.push_back(next);
            }
        }
    }
    parent
}

fn path_to(parent: &HashMap<MazeState, MazeState>, mut t: MazeState) -> Vec<MazeState> {
    let mut path = vec![t];
    while parent[&t] != t {
        t = parent[&t];
        path.push(t);
    }
    path.reverse();
    path
}

/// Dead-end fraction of a maze. For every empty tile t reachable from the
/// start and not on the start-goal shortest path, the shortest start-to-t
/// path (minus t itself) is filled with walls; t is a dead end when the
/// goal is unreachable from t afterwards. Shortest paths are taken from
/// the breadth-first tree, which fixes tie-breaking. Path tiles stay in
/// the denominator but are never labelled dead ends, so a corridor scores
/// zero; tiles unreachable from the start are excluded entirely.
pub fn leniency_maze(grid: &TileGrid) -> Result<f64, MetricError> {
    let (start, goal) = maze_start_goal(grid).map_err(|_| MetricError::Unsolvable)?;
    let parent = bfs_tree(grid, start);
    if !parent.contains_key(&goal) {
        return Err(MetricError::Unsolvable);
    }
    let on_sg_path: HashSet<MazeState> = path_to(&parent, goal).into_iter().collect();
    let reachable: Vec<MazeState> = {
        let mut cells: Vec<MazeState> = parent.keys().copied().collect();
        cells.sort();
        cells
    };

    let mut dead = 0usize;
    let mut scratch = grid.clone();
    for &t in &reachable {
        if on_sg_path.contains(&t) {
            continue;
        }
        let path = path_to(&parent, t);
        let filled = &path[..path.len() - 1];
        for c in filled {
            scratch.set_tile(c.x, c.y, TileKind::Wall);
        }
        if !reaches(&scratch, t, goal) {
            dead += 1;
        }
        for c in filled {
            scratch.set_tile(c.x, c.y, TileKind::Empty);
        }
    }
    Ok(dead as f64 / reachable.len() as f64)
}

fn reaches(grid: &TileGrid, from: MazeState, to: MazeState) -> bool {
    let mut seen = HashSet::new();
    let mut stack = vec![from];
    seen.insert(from);
    while let Some(s) = stack.pop() {
        if s == to {
            return true;
        }
        for (_, next) in maze_successors(grid, s) {
            if seen.insert(next) {
                stack.push(next);
            }
        }
    }
    false
}

/// Mean challenge score of a platformer level, rescaled from [-1, 1] to
/// [0, 1]. Challenges: each gap -1, each enemy -1, each upward ledge step
/// between solid columns (a jump with no associated gap) +1. No
/// challenges means maximal leniency, 1.0.
pub fn leniency_platformer(grid: &TileGrid) -> Result<f64, MetricError> {
    let features = column_features(grid)?;
    let mut scores: Vec<f64> = Vec::new();
    for (c, f) in features.iter().enumerate() {
        if f.gap_start {
            scores.push(-1.0);
        }
        if f.has_enemy {
            scores.push(-1.0);
        }
        let prev_h = if c == 0 { f.platform_height } else { features[c - 1].platform_height };
        if f.platform_height > prev_h && prev_h > 0 {
            scores.push(1.0);
        }
    }
    if scores.is_empty() {
        return Ok(1.0);
    }
    let mean = scores.iter().sum::<f64>() / scores.len() as f64;
    Ok((mean + 1.0) / 2.0)
}

/// Per-level leniency for either domain.
pub fn leniency(grid: &TileGrid) -> Result<f64, MetricError> {
    match grid.domain() {
        Domain::Maze => leniency_maze(grid),
        Domain::Platformer => leniency_platformer(grid),
    }
}

/// Difficulty denominator for mazes: cells reachable from the start.
pub fn maze_reachable_count(grid: &TileGrid) -> Result<usize, MetricError> {
    let (start, _) = maze_start_goal(grid).map_err(|_| MetricError::Unsolvable)?;
    Ok(reachable_cells(grid, start).len())
}
