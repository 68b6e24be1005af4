//! Maze domain: 4-connected grid walk from the top-left corner to the
//! bottom-right corner.

use std::collections::HashSet;

use thiserror::Error;

use crate::level::{Domain, TileGrid, TileKind};
use crate::planner::{astar, SearchDomain, SearchResult};

/// Agent position in tile coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MazeState {
    pub x: usize,
    pub y: usize,
}

impl MazeState {
    pub fn new(x: usize, y: usize) -> Self {
        MazeState { x, y }
    }
}

/// Action codes are the enum discriminants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum MazeAction {
    Up = 0,
    Down = 1,
    Left = 2,
    Right = 3,
}

impl MazeAction {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn delta(self) -> (isize, isize) {
        match self {
            MazeAction::Up => (0, -1),
            MazeAction::Down => (0, 1),
            MazeAction::Left => (-1, 0),
            MazeAction::Right => (1, 0),
        }
    }
}

pub const MAZE_ACTIONS: [MazeAction; 4] =
    [MazeAction::Up, MazeAction::Down, MazeAction::Left, MazeAction::Right];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MazeError {
    #[error("endpoint ({x}, {y}) is a wall")]
    BlockedEndpoint { x: usize, y: usize },
    #[error("grid domain is {0}, expected maze")]
    WrongDomain(Domain),
}

/// Start and goal for a maze: `(0, 0)` and `(w-1, h-1)`.
pub fn maze_start_goal(grid: &TileGrid) -> Result<(MazeState, MazeState), MazeError> {
    if grid.domain() != Domain::Maze {
        return Err(MazeError::WrongDomain(grid.domain()));
    }
    let start = MazeState::new(0, 0);
    let goal = MazeState::new(grid.width() - 1, grid.height() - 1);
    for pos in [start, goal] {
        if grid.tile(pos.x, pos.y) == TileKind::Wall {
            return Err(MazeError::BlockedEndpoint { x: pos.x, y: pos.y });
        }
    }
    Ok((start, goal))
}

/// In-bounds, non-wall neighbours in Up, Down, Left, Right order.
pub fn maze_successors(grid: &TileGrid, s: MazeState) -> Vec<(MazeAction, MazeState)> {
    let mut out = Vec::with_capacity(4);
    for action in MAZE_ACTIONS {
        let (dx, dy) = action.delta();
        let nx = s.x as isize + dx;
        let ny = s.y as isize + dy;
        if let Some(tile) = grid.get(nx, ny) {
            if tile != TileKind::Wall {
                out.push((action, MazeState::new(nx as usize, ny as usize)));
            }
        }
    }
    out
}

/// Manhattan distance, admissible for unit-cost 4-connected moves.
pub fn maze_heuristic(s: MazeState, goal: MazeState) -> u32 {
    (s.x.abs_diff(goal.x) + s.y.abs_diff(goal.y)) as u32
}

/// All cells reachable from `from` by legal moves, including `from` itself
/// (when it is not a wall).
pub fn reachable_cells(grid: &TileGrid, from: MazeState) -> HashSet<MazeState> {
    let mut seen = HashSet::new();
    if grid.tile(from.x, from.y) == TileKind::Wall {
        return seen;
    }
    let mut stack = vec![from];
    seen.insert(from);
    while let Some(s) = stack.pop() {
        for (_, next) in maze_successors(grid, s) {
            if seen.insert(next) {
                stack.push(next);
            }
        }
    }
    seen
}

/// Whether the goal corner is reachable from the start corner.
pub fn is_solvable(grid: &TileGrid) -> bool {
    match maze_start_goal(grid) {
        Ok((start, goal)) => reachable_cells(grid, start).contains(&goal),
        Err(_) => false,
    }
}

/// Planner adapter. Borrows the grid; construct per solve.
pub struct MazeDomain<'a> {
    grid: &'a TileGrid,
    start: MazeState,
    goal: MazeState,
}

impl<'a> MazeDomain<'a> {
    pub fn new(grid: &'a TileGrid) -> Result<Self, MazeError> {
        let (start, goal) = maze_start_goal(grid)?;
        Ok(MazeDomain { grid, start, goal })
    }

    pub fn start(&self) -> MazeState {
        self.start
    }

    pub fn goal(&self) -> MazeState {
        self.goal
    }
}

impl SearchDomain for MazeDomain<'_> {
    type State = MazeState;
    type Key = MazeState;

    fn key(&self, s: &MazeState) -> MazeState {
        *s
    }

    fn is_goal(&self, s: &MazeState) -> bool {
        *s == self.goal
    }

    fn heuristic(&self, s: &MazeState) -> u32 {
        maze_heuristic(*s, self.goal)
    }

    fn successors(&self, s: &MazeState, out: &mut Vec<(u8, MazeState)>) {
        for (action, next) in maze_successors(self.grid, *s) {
            out.push((action.code(), next));
        }
    }
}

/// Run A* corner to corner.
pub fn solve_maze(
    grid: &TileGrid,
    budget: usize,
) -> Result<SearchResult<MazeState, MazeState>, MazeError> {
    let domain = MazeDomain::new(grid)?;
    Ok(astar(&domain, domain.start(), budget))
}
