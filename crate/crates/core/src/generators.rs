//! Seeded level sources: noise mazes, difficulty-controlled carved mazes,
//! fixed-path visual variants, and band platformer levels. Everything is a
//! pure function of (parameters, seed).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::level::{Domain, LevelSet, TileGrid, TileKind};
use crate::maze::{maze_start_goal, reachable_cells};

pub const DEFAULT_GAP_RATE: f64 = 0.07;
pub const DEFAULT_ENEMY_RATE: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("dimensions {w}x{h} too small for a carved maze (need at least 5x5)")]
    BadDimensions { w: usize, h: usize },
    #[error("base level is not solvable")]
    UnsolvableBase,
}

/// Difficulty labels for carved mazes, ordered easiest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum DifficultyClass {
    VeryEasy = 1,
    Easy = 2,
    Moderate = 3,
    Difficult = 4,
    VeryDifficult = 5,
}

impl DifficultyClass {
    pub const ALL: [DifficultyClass; 5] = [
        DifficultyClass::VeryEasy,
        DifficultyClass::Easy,
        DifficultyClass::Moderate,
        DifficultyClass::Difficult,
        DifficultyClass::VeryDifficult,
    ];

    pub fn from_index(i: u8) -> Option<DifficultyClass> {
        DifficultyClass::ALL.get(i.checked_sub(1)? as usize).copied()
    }

    pub fn index(self) -> u8 {
        self as u8
    }
}

/// Levels sharing one difficulty label.
#[derive(Debug, Clone)]
pub struct DifficultyClassSet {
    pub class: DifficultyClass,
    pub levels: LevelSet,
}

/// Splitmix64-style mixer for deriving per-item seeds from a master seed.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent Wall coin flips per tile; both corners stay Empty so the
/// endpoints are never blocked. Solvability is not guaranteed.
pub fn gen_random_maze(w: usize, h: usize, wall_prob: f64, seed: u64) -> TileGrid {
    assert!(w >= 2 && h >= 2, "maze needs at least 2x2");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grid = TileGrid::filled(w, h, TileKind::Empty, Domain::Maze);
    for y in 0..h {
        for x in 0..w {
            let corner = (x == 0 && y == 0) || (x == w - 1 && y == h - 1);
            if !corner && rng.random::<f64>() < wall_prob {
                grid.set_tile(x, y, TileKind::Wall);
            }
        }
    }
    grid
}

/// Lattice view of a carved maze: cells sit at even coordinates, passage
/// tiles between them at odd ones. Carving happens on the largest odd
/// bounds; even requested sizes get one Empty row/column of padding at the
/// far edges afterwards.
struct Lattice {
    cw: usize,
    ch: usize,
}

impl Lattice {
    fn cell_tile(i: usize, j: usize) -> (usize, usize) {
        (2 * i, 2 * j)
    }

    fn neighbors(&self, i: usize, j: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(4);
        if j > 0 {
            out.push((i, j - 1));
        }
        if j + 1 < self.ch {
            out.push((i, j + 1));
        }
        if i > 0 {
            out.push((i - 1, j));
        }
        if i + 1 < self.cw {
            out.push((i + 1, j));
        }
        out
    }

    fn open_passage(grid: &mut TileGrid, a: (usize, usize), b: (usize, usize)) {
        let (ax, ay) = Self::cell_tile(a.0, a.1);
        let (bx, by) = Self::cell_tile(b.0, b.1);
        grid.set_tile((ax + bx) / 2, (ay + by) / 2, TileKind::Empty);
    }

    fn passage_open(grid: &TileGrid, a: (usize, usize), b: (usize, usize)) -> bool {
        let (ax, ay) = Self::cell_tile(a.0, a.1);
        let (bx, by) = Self::cell_tile(b.0, b.1);
        grid.tile((ax + bx) / 2, (ay + by) / 2) == TileKind::Empty
    }

    fn open_degree(&self, grid: &TileGrid, i: usize, j: usize) -> usize {
        self.neighbors(i, j)
            .into_iter()
            .filter(|&n| Self::passage_open(grid, (i, j), n))
            .count()
    }
}

fn carve_backtracker(grid: &mut TileGrid, lat: &Lattice, rng: &mut ChaCha8Rng) {
    let mut visited = vec![false; lat.cw * lat.ch];
    let at = |i: usize, j: usize| j * lat.cw + i;
    let mut stack = vec![(0usize, 0usize)];
    visited[at(0, 0)] = true;
    let (x, y) = Lattice::cell_tile(0, 0);
    grid.set_tile(x, y, TileKind::Empty);
    while let Some(&(i, j)) = stack.last() {
        let nbrs: Vec<(usize, usize)> =
            lat.neighbors(i, j).into_iter().filter(|&(a, b)| !visited[at(a, b)]).collect();
        if nbrs.is_empty() {
            stack.pop();
            continue;
        }
        let next = nbrs[rng.random_range(0..nbrs.len())];
        visited[at(next.0, next.1)] = true;
        let (nx, ny) = Lattice::cell_tile(next.0, next.1);
        grid.set_tile(nx, ny, TileKind::Empty);
        Lattice::open_passage(grid, (i, j), next);
        stack.push(next);
    }
}

/// Open `fraction` of the still-closed internal walls, cutting corridor
/// runs short and collapsing detours.
fn shortcut(grid: &mut TileGrid, lat: &Lattice, fraction: f64, rng: &mut ChaCha8Rng) {
    let mut closed: Vec<((usize, usize), (usize, usize))> = Vec::new();
    for j in 0..lat.ch {
        for i in 0..lat.cw {
            if i + 1 < lat.cw && !Lattice::passage_open(grid, (i, j), (i + 1, j)) {
                closed.push(((i, j), (i + 1, j)));
            }
            if j + 1 < lat.ch && !Lattice::passage_open(grid, (i, j), (i, j + 1)) {
                closed.push(((i, j), (i, j + 1)));
            }
        }
    }
    closed.shuffle(rng);
    let target = (closed.len() as f64 * fraction).round() as usize;
    for &(a, b) in closed.iter().take(target) {
        Lattice::open_passage(grid, a, b);
    }
}

/// Open a wall out of `fraction` of the dead-end cells, creating loops.
fn braid(grid: &mut TileGrid, lat: &Lattice, fraction: f64, rng: &mut ChaCha8Rng) {
    let mut dead: Vec<(usize, usize)> = Vec::new();
    for j in 0..lat.ch {
        for i in 0..lat.cw {
            if lat.open_degree(grid, i, j) == 1 {
                dead.push((i, j));
            }
        }
    }
    dead.shuffle(rng);
    let target = (dead.len() as f64 * fraction).round() as usize;
    for &(i, j) in dead.iter().take(target) {
        if lat.open_degree(grid, i, j) != 1 {
            continue; // already fixed by an earlier opening
        }
        let closed: Vec<(usize, usize)> = lat
            .neighbors(i, j)
            .into_iter()
            .filter(|&n| !Lattice::passage_open(grid, (i, j), n))
            .collect();
        if !closed.is_empty() {
            let pick = closed[rng.random_range(0..closed.len())];
            Lattice::open_passage(grid, (i, j), pick);
        }
    }
}

/// Fraction of lattice cells that are dead ends (exactly one open
/// passage). Measured on the carved odd-sized region, ignoring padding.
pub fn dead_end_cell_fraction(grid: &TileGrid) -> f64 {
    let cw = (grid.width() + 1) / 2 - usize::from(grid.width() % 2 == 0);
    let ch = (grid.height() + 1) / 2 - usize::from(grid.height() % 2 == 0);
    let lat = Lattice { cw, ch };
    let mut dead = 0usize;
    for j in 0..ch {
        for i in 0..cw {
            if lat.open_degree(grid, i, j) == 1 {
                dead += 1;
            }
        }
    }
    dead as f64 / (cw * ch) as f64
}

/// Depth-first perfect-maze carving with per-class post-processing. The
/// carver leaves long winding branches; braiding then trades dead ends for
/// loops. Class 1 braids every dead end, opens half of the remaining
/// internal walls so corridors stay short and direct, and re-braids until
/// at most 5% of cells are dead ends. Classes 2-4 braid 75%, 50%, 25% of
/// dead ends. Class 5 keeps every dead end the depth-first carve produced,
/// so its corridors form the deepest branches. Even dimensions carve one
/// smaller and pad an Empty row/column at the far edges.
pub fn gen_maze_with_difficulty(
    w: usize,
    h: usize,
    class: DifficultyClass,
    seed: u64,
) -> Result<TileGrid, GenError> {
    if w < 5 || h < 5 {
        return Err(GenError::BadDimensions { w, h });
    }
    let cw_t = if w % 2 == 0 { w - 1 } else { w };
    let ch_t = if h % 2 == 0 { h - 1 } else { h };
    let lat = Lattice { cw: (cw_t + 1) / 2, ch: (ch_t + 1) / 2 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grid = TileGrid::filled(w, h, TileKind::Wall, Domain::Maze);

    carve_backtracker(&mut grid, &lat, &mut rng);
    let (fraction, shortcut_fraction) = match class {
        DifficultyClass::VeryEasy => (1.0, 0.5),
        DifficultyClass::Easy => (0.75, 0.0),
        DifficultyClass::Moderate => (0.5, 0.0),
        DifficultyClass::Difficult => (0.25, 0.0),
        DifficultyClass::VeryDifficult => (0.0, 0.0),
    };
    if fraction > 0.0 {
        braid(&mut grid, &lat, fraction, &mut rng);
    }
    if shortcut_fraction > 0.0 {
        shortcut(&mut grid, &lat, shortcut_fraction, &mut rng);
    }
    if class == DifficultyClass::VeryEasy {
        for _ in 0..8 {
            if dead_end_cell_fraction(&grid) <= 0.05 {
                break;
            }
            braid(&mut grid, &lat, 1.0, &mut rng);
        }
    }

    // Padding: the carved region spans [0, cw_t) x [0, ch_t); anything
    // beyond is an Empty margin, which keeps the goal corner open.
    for y in 0..h {
        for x in 0..w {
            if x >= cw_t || y >= ch_t {
                grid.set_tile(x, y, TileKind::Empty);
            }
        }
    }
    Ok(grid)
}

/// Single forced staircase corridor from corner to corner; everything else
/// is wall. The base level for the visual-variation experiment.
pub fn gen_fixed_path_base(w: usize, h: usize) -> TileGrid {
    assert!(w >= 2 && h >= 2);
    let mut grid = TileGrid::filled(w, h, TileKind::Wall, Domain::Maze);
    let (mut x, mut y) = (0usize, 0usize);
    grid.set_tile(x, y, TileKind::Empty);
    while x < w - 1 || y < h - 1 {
        if x < w - 1 {
            x += 1;
            grid.set_tile(x, y, TileKind::Empty);
        }
        if y < h - 1 {
            y += 1;
            grid.set_tile(x, y, TileKind::Empty);
        }
    }
    grid
}

/// Copies of `base` with every tile outside the start-reachable region and
/// its wall boundary re-rolled per variant. The playable area is untouched
/// byte for byte, so search trajectories cannot change.
pub fn gen_visual_variants(base: &TileGrid, n: usize, seed: u64) -> Result<LevelSet, GenError> {
    let (start, goal) = maze_start_goal(base).map_err(|_| GenError::UnsolvableBase)?;
    let reachable = reachable_cells(base, start);
    if !reachable.contains(&goal) {
        return Err(GenError::UnsolvableBase);
    }
    let mut frozen = vec![false; base.width() * base.height()];
    for s in &reachable {
        frozen[s.y * base.width() + s.x] = true;
        for (dx, dy) in [(0isize, -1isize), (0, 1), (-1, 0), (1, 0)] {
            let (nx, ny) = (s.x as isize + dx, s.y as isize + dy);
            if base.in_bounds(nx, ny) {
                frozen[ny as usize * base.width() + nx as usize] = true;
            }
        }
    }

    let mut levels = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, i as u64));
        let mut level = base.clone();
        for y in 0..base.height() {
            for x in 0..base.width() {
                if !frozen[y * base.width() + x] {
                    let tile =
                        if rng.random::<f64>() < 0.5 { TileKind::Wall } else { TileKind::Empty };
                    level.set_tile(x, y, tile);
                }
            }
        }
        levels.push(level);
    }
    Ok(LevelSet::new(levels, seed, "visual_variants").expect("same domain"))
}

/// Band platformer: a ground strip with small elevation steps, jumpable
/// gaps (width 1-3, equal heights on both rims, at least two solid columns
/// apart), surface Goombas, and a Flag in the last column. The first three
/// and last two columns are kept flat and hazard-free. Below the walking
/// surface the band is textured with a Ground/Brick mix.
pub fn gen_platformer(
    w: usize,
    h: usize,
    gap_rate: f64,
    enemy_rate: f64,
    seed: u64,
) -> TileGrid {
    assert!(w >= 10 && h >= 5, "platformer needs at least 10x5");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_height = (h - 3).min(9);
    let base_height = 2usize.min(max_height);

    let mut heights = vec![base_height; w];
    let mut height = base_height;
    let mut col = 3usize;
    let mut since_gap = usize::MAX; // columns since the last gap ended
    while col < w - 2 {
        let can_gap = since_gap >= 2 && col + 3 < w - 2;
        if can_gap && rng.random::<f64>() < gap_rate {
            let width = rng.random_range(1..=3usize);
            for _ in 0..width {
                heights[col] = 0;
                col += 1;
            }
            since_gap = 0;
            continue; // rim resumes at the pre-gap height
        }
        if rng.random::<f64>() < 0.15 {
            let up = rng.random::<f64>() < 0.5;
            if up && height < max_height {
                height += 1;
            } else if !up && height > 1 {
                height -= 1;
            }
        }
        heights[col] = height;
        col += 1;
        since_gap = since_gap.saturating_add(1);
    }
    for c in w - 2..w {
        heights[c] = height;
    }

    let mut grid = TileGrid::filled(w, h, TileKind::Air, Domain::Platformer);
    for c in 0..w {
        for k in 0..heights[c] {
            grid.set_tile(c, h - 1 - k, TileKind::Ground);
        }
    }

    // Buried texture: tiles strictly below the walking surface vary between
    // Ground and Brick. Both are solid, so physics, column heights, and the
    // feature strings never see the difference; only the tile grid does.
    for c in 0..w {
        for k in 0..heights[c].saturating_sub(1) {
            if rng.random::<f64>() < 0.4 {
                grid.set_tile(c, h - 1 - k, TileKind::Brick);
            }
        }
    }

    // Goombas on the walking surface, never near gaps or the level ends,
    // and at least four columns apart so the planner can always thread
    // through.
    let mut last_enemy: isize = -8;
    for c in 3..w.saturating_sub(2) {
        if heights[c] == 0 || heights[c.saturating_sub(1)] == 0 || heights[(c + 1).min(w - 1)] == 0
        {
            continue;
        }
        if (c as isize - last_enemy) >= 4 && rng.random::<f64>() < enemy_rate {
            grid.set_tile(c, h - 1 - heights[c], TileKind::Goomba);
            last_enemy = c as isize;
        }
    }

    grid.set_tile(w - 1, h - 1 - heights[w - 1], TileKind::Flag);
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::level::TileKind;
    use crate::maze::{is_solvable, solve_maze, MazeState};
    use crate::metrics::{astar_diversity, leniency_maze};
    use crate::planner::DEFAULT_BUDGET;
    use crate::platformer::solve_platformer;

    #[test]
    fn random_maze_zero_prob_is_all_empty() {
        let g = gen_random_maze(6, 4, 0.0, 1);
        for y in 0..4 {
            for x in 0..6 {
                assert_eq!(g.tile(x, y), TileKind::Empty);
            }
        }
    }

    #[test]
    fn random_maze_deterministic() {
        let a = gen_random_maze(20, 20, 0.3, 99);
        let b = gen_random_maze(20, 20, 0.3, 99);
        assert_eq!(crate::level::serialize_level(&a), crate::level::serialize_level(&b));
    }

    #[test]
    fn random_maze_corners_open() {
        let g = gen_random_maze(10, 10, 0.95, 3);
        assert_eq!(g.tile(0, 0), TileKind::Empty);
        assert_eq!(g.tile(9, 9), TileKind::Empty);
    }

    #[test]
    fn random_maze_wall_fraction_matches_prob() {
        let mut walls = 0usize;
        let mut tiles = 0usize;
        for seed in 0..1000 {
            let g = gen_random_maze(20, 20, 0.3, seed);
            for y in 0..20 {
                for x in 0..20 {
                    if (x == 0 && y == 0) || (x == 19 && y == 19) {
                        continue;
                    }
                    tiles += 1;
                    walls += usize::from(g.tile(x, y) == TileKind::Wall);
                }
            }
        }
        let frac = walls as f64 / tiles as f64;
        assert!((frac - 0.3).abs() < 0.02, "wall fraction {frac}");
    }

    #[test]
    fn difficulty_classes_always_solvable() {
        for class in DifficultyClass::ALL {
            for seed in 0..3 {
                let g = gen_maze_with_difficulty(21, 21, class, seed).unwrap();
                assert!(is_solvable(&g), "class {class:?} seed {seed}");
            }
        }
    }

    #[test]
    fn class_one_has_few_dead_ends() {
        for seed in 0..5 {
            let g = gen_maze_with_difficulty(41, 41, DifficultyClass::VeryEasy, seed).unwrap();
            assert!(dead_end_cell_fraction(&g) <= 0.05);
        }
    }

    // Dead-end coverage is audited with the fill-and-check labelling, which
    // counts every cell on a dead-end branch rather than just the tips.
    #[test]
    fn class_five_keeps_many_dead_ends() {
        for seed in 0..5 {
            let g =
                gen_maze_with_difficulty(41, 41, DifficultyClass::VeryDifficult, seed).unwrap();
            assert!(leniency_maze(&g).unwrap() >= 0.25);
        }
    }

    #[test]
    fn dead_end_fraction_monotone_in_class() {
        let mut means = Vec::new();
        for class in DifficultyClass::ALL {
            let mut total = 0.0;
            for seed in 0..5 {
                let g = gen_maze_with_difficulty(41, 41, class, seed).unwrap();
                total += leniency_maze(&g).unwrap();
            }
            means.push(total / 5.0);
        }
        for pair in means.windows(2) {
            assert!(pair[0] <= pair[1] + 1e-9, "means {means:?}");
        }
    }

    #[test]
    fn small_dimensions_rejected() {
        assert_eq!(
            gen_maze_with_difficulty(4, 9, DifficultyClass::Easy, 0),
            Err(GenError::BadDimensions { w: 4, h: 9 })
        );
    }

    #[test]
    fn even_dimensions_padded_and_solvable() {
        let g = gen_maze_with_difficulty(40, 40, DifficultyClass::Moderate, 7).unwrap();
        assert_eq!((g.width(), g.height()), (40, 40));
        assert!(is_solvable(&g));
        assert_eq!(g.tile(39, 39), TileKind::Empty);
    }

    #[test]
    fn fixed_path_base_is_forced_corridor() {
        let g = gen_fixed_path_base(8, 8);
        let r = solve_maze(&g, DEFAULT_BUDGET).unwrap();
        assert!(r.solved);
        assert_eq!(crate::planner::off_path_expansions(&r).unwrap(), 0);
        let reach = reachable_cells(&g, MazeState::new(0, 0));
        assert_eq!(reach.len(), r.path_states.len());
    }

    #[test]
    fn visual_variants_preserve_playable_region() {
        let base = gen_fixed_path_base(12, 12);
        let set = gen_visual_variants(&base, 3, 5).unwrap();
        assert_eq!(set.levels.len(), 3);
        let base_run = solve_maze(&base, DEFAULT_BUDGET).unwrap();
        let base_reach = reachable_cells(&base, MazeState::new(0, 0));
        let mut runs = Vec::new();
        for level in &set.levels {
            assert_eq!(reachable_cells(level, MazeState::new(0, 0)), base_reach);
            let r = solve_maze(level, DEFAULT_BUDGET).unwrap();
            assert_eq!(r.actions, base_run.actions);
            runs.push(r);
        }
        for i in 0..runs.len() {
            for j in i + 1..runs.len() {
                assert_eq!(astar_diversity(&runs[i], &runs[j]).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn single_variant_matches_base_in_reachable_region() {
        let base = gen_fixed_path_base(10, 10);
        let set = gen_visual_variants(&base, 1, 11).unwrap();
        let level = &set.levels[0];
        for s in reachable_cells(&base, MazeState::new(0, 0)) {
            assert_eq!(level.tile(s.x, s.y), base.tile(s.x, s.y));
        }
    }

    #[test]
    fn unsolvable_base_rejected() {
        let mut base = gen_fixed_path_base(6, 6);
        base.set_tile(1, 0, TileKind::Wall);
        base.set_tile(1, 1, TileKind::Wall);
        assert!(matches!(gen_visual_variants(&base, 2, 0), Err(GenError::UnsolvableBase)));
    }

    #[test]
    fn gapless_platformer_solved_at_full_speed() {
        let g = gen_platformer(30, 8, 0.0, 0.0, 4);
        let r = solve_platformer(&g, DEFAULT_BUDGET).unwrap();
        assert!(r.solved);
        // One column per tick, never a retreat: only Right and JumpRight.
        assert_eq!(r.actions.len(), 29);
        assert!(r.actions.iter().all(|&a| a == 1 || a == 3));
    }

    #[test]
    fn platformer_deterministic() {
        let a = gen_platformer(60, 8, DEFAULT_GAP_RATE, DEFAULT_ENEMY_RATE, 123);
        let b = gen_platformer(60, 8, DEFAULT_GAP_RATE, DEFAULT_ENEMY_RATE, 123);
        assert_eq!(crate::level::serialize_level(&a), crate::level::serialize_level(&b));
    }

    #[test]
    fn platformer_flag_in_last_column() {
        let g = gen_platformer(40, 8, DEFAULT_GAP_RATE, DEFAULT_ENEMY_RATE, 9);
        let col: Vec<TileKind> = (0..8).map(|y| g.tile(39, y)).collect();
        assert!(col.contains(&TileKind::Flag));
    }

    #[test]
    fn platformer_audit_mostly_solvable() {
        let mut solvable = 0;
        for seed in 0..100 {
            let g = gen_platformer(60, 8, DEFAULT_GAP_RATE, DEFAULT_ENEMY_RATE, seed);
            let r = solve_platformer(&g, DEFAULT_BUDGET).unwrap();
            solvable += usize::from(r.solved);
        }
        assert!(solvable >= 90, "only {solvable}/100 solvable");
    }

    #[test]
    fn mix_seed_spreads() {
        let a = mix_seed(1, 0);
        let b = mix_seed(1, 1);
        let c = mix_seed(2, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
    }
}
