//! Deterministic discrete platformer: walk, fixed-impulse jumps, gravity,
//! patrolling Goombas, a flag at the right edge.
//!
//! Sign conventions: y grows downward (row 0 is the top of the level);
//! vy is positive upward, so a tick's vertical move subtracts vy from y.

use std::collections::{HashSet, VecDeque};

use thiserror::Error;

use crate::level::{Domain, TileGrid, TileKind};
use crate::planner::{astar, SearchDomain, SearchResult};

/// Terminal fall velocity (tiles/tick, downward).
pub const VY_MIN: i32 = -4;
/// Jump impulse applied while standing on solid ground.
pub const JUMP_VELOCITY: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PlatformerState {
    pub x: usize,
    pub y: usize,
    /// Vertical velocity, positive upward, in [-4, +3].
    pub vy: i32,
    pub tick: u32,
    pub alive: bool,
    /// Goombas stomped so far on this trace, as a bitmask over spawn index.
    pub stomped: u128,
}

/// Duplicate-detection identity: (x, y, vy). Tick and the stomped set are
/// trace payload, not identity, which keeps the searched space finite and
/// inside the agent-only reachability closure.
pub type PlatformerKey = (usize, usize, i32);

impl PlatformerState {
    pub fn key(&self) -> PlatformerKey {
        (self.x, self.y, self.vy)
    }
}

/// Action codes are the enum discriminants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum PlatformerAction {
    Noop = 0,
    Right = 1,
    Left = 2,
    JumpRight = 3,
    JumpLeft = 4,
    JumpUp = 5,
}

pub const PLATFORMER_ACTIONS: [PlatformerAction; 6] = [
    PlatformerAction::Noop,
    PlatformerAction::Right,
    PlatformerAction::Left,
    PlatformerAction::JumpRight,
    PlatformerAction::JumpLeft,
    PlatformerAction::JumpUp,
];

impl PlatformerAction {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn dx(self) -> isize {
        match self {
            PlatformerAction::Right | PlatformerAction::JumpRight => 1,
            PlatformerAction::Left | PlatformerAction::JumpLeft => -1,
            _ => 0,
        }
    }

    pub fn is_jump(self) -> bool {
        matches!(
            self,
            PlatformerAction::JumpRight | PlatformerAction::JumpLeft | PlatformerAction::JumpUp
        )
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlatformerError {
    #[error("grid domain is {0}, expected platformer")]
    WrongDomain(Domain),
    #[error("column 0 has no cell to stand in")]
    NoStandingStart,
    #[error("level has {0} Goombas, more than the {max} the stomp mask holds", max = 128)]
    TooManyGoombas(usize),
}

/// A Goomba patrols the maximal walkable run of its supporting platform at
/// one tile per tick, dwelling one extra tick at each end (triangle wave of
/// period 2·len), so its position is a pure function of the tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Goomba {
    pub y: usize,
    pub left: usize,
    pub len: usize,
    /// Spawn offset from `left`; the patrol phase at tick 0.
    pub phase: usize,
}

impl Goomba {
    pub fn position_at(&self, tick: u32) -> (usize, usize) {
        let period = 2 * self.len;
        let r = (self.phase + tick as usize) % period;
        let off = if r < self.len { r } else { period - 1 - r };
        (self.left + off, self.y)
    }
}

/// Precomputed simulation context for one grid: goomba patrols and the
/// goal column (rightmost Flag column, else the last column).
pub struct PlatformerSim<'a> {
    grid: &'a TileGrid,
    goombas: Vec<Goomba>,
    goal_col: usize,
    start: PlatformerState,
}

fn is_solid(grid: &TileGrid, x: isize, y: isize) -> bool {
    grid.get(x, y).is_some_and(|t| t.is_solid())
}

/// Rightmost column containing a Flag; width-1 when there is none.
pub fn platformer_goal_col(grid: &TileGrid) -> usize {
    (0..grid.width())
        .rev()
        .find(|&x| (0..grid.height()).any(|y| grid.tile(x, y) == TileKind::Flag))
        .unwrap_or(grid.width() - 1)
}

impl<'a> PlatformerSim<'a> {
    pub fn new(grid: &'a TileGrid) -> Result<Self, PlatformerError> {
        if grid.domain() != Domain::Platformer {
            return Err(PlatformerError::WrongDomain(grid.domain()));
        }
        let h = grid.height();

        // The agent spawns in column 0, standing on its topmost solid tile;
        // with no solid tile it hangs at the bottom row and falls.
        let stand = (0..h).find(|&y| grid.tile(0, y).is_solid());
        let start_y = match stand {
            Some(0) => return Err(PlatformerError::NoStandingStart),
            Some(r) => {
                if grid.tile(0, r - 1).is_solid() {
                    return Err(PlatformerError::NoStandingStart);
                }
                r - 1
            }
            None => h - 1,
        };
        let start = PlatformerState { x: 0, y: start_y, vy: 0, tick: 0, alive: true, stomped: 0 };

        let mut goombas = Vec::new();
        for y in 0..h {
            for x in 0..grid.width() {
                if grid.tile(x, y) == TileKind::Goomba {
                    goombas.push(patrol_for(grid, x, y));
                }
            }
        }
        if goombas.len() > 128 {
            return Err(PlatformerError::TooManyGoombas(goombas.len()));
        }

        Ok(PlatformerSim { grid, goombas, goal_col: platformer_goal_col(grid), start })
    }

    pub fn grid(&self) -> &TileGrid {
        self.grid
    }

    pub fn start(&self) -> PlatformerState {
        self.start
    }

    pub fn goal_col(&self) -> usize {
        self.goal_col
    }

    pub fn goombas(&self) -> &[Goomba] {
        &self.goombas
    }

    /// Index of the live Goomba occupying (x, y) at `tick`, if any.
    pub fn goomba_at(&self, x: usize, y: usize, tick: u32, stomped: u128) -> Option<usize> {
        self.goombas.iter().enumerate().find_map(|(i, g)| {
            if stomped & (1 << i) == 0 && g.position_at(tick) == (x, y) {
                Some(i)
            } else {
                None
            }
        })
    }

    /// One simulation tick. Order within the tick: jump impulse (if
    /// grounded), gravity, horizontal move at the pre-move row, then
    /// vertical motion one cell at a time. Entering a Goomba's cell while
    /// moving down stomps it without altering the motion; entering it any
    /// other way, or sharing a cell with one after moving, kills the agent.
    pub fn step(&self, s: &PlatformerState, a: PlatformerAction) -> PlatformerState {
        self.step_inner(s, a, true)
    }

    /// Same physics with Goombas absent; the dynamics behind the
    /// reachability denominator.
    pub fn step_agent_only(&self, s: &PlatformerState, a: PlatformerAction) -> PlatformerState {
        self.step_inner(s, a, false)
    }

    fn step_inner(&self, s: &PlatformerState, a: PlatformerAction, goombas_on: bool) -> PlatformerState {
        debug_assert!(s.alive, "dead states have no transitions");
        let (w, h) = (self.grid.width(), self.grid.height());
        let tick = s.tick + 1;
        let mut x = s.x;
        let mut y = s.y;
        let mut vy = s.vy;
        let mut stomped = s.stomped;

        let grounded = y + 1 < h && is_solid(self.grid, x as isize, y as isize + 1);
        if a.is_jump() && grounded {
            vy = JUMP_VELOCITY;
        }
        vy = (vy - 1).max(VY_MIN);

        let dead = |x, y, vy, stomped| PlatformerState { x, y, vy, tick, alive: false, stomped };

        let dx = a.dx();
        if dx != 0 {
            let nx = x as isize + dx;
            if nx >= 0 && (nx as usize) < w && !is_solid(self.grid, nx, y as isize) {
                x = nx as usize;
                if goombas_on && self.goomba_at(x, y, tick, stomped).is_some() {
                    return dead(x, y, vy, stomped); // lateral contact kills
                }
            }
        }

        if vy > 0 {
            for _ in 0..vy {
                if y == 0 || is_solid(self.grid, x as isize, y as isize - 1) {
                    vy = 0; // ceiling bonk
                    break;
                }
                y -= 1;
                if goombas_on {
                    if let Some(_) = self.goomba_at(x, y, tick, stomped) {
                        return dead(x, y, vy, stomped); // rising contact kills
                    }
                }
            }
        } else if vy < 0 {
            for _ in 0..-vy {
                if y + 1 >= h {
                    return dead(x, y, vy, stomped); // fell out of the level
                }
                if is_solid(self.grid, x as isize, y as isize + 1) {
                    vy = 0; // landed
                    break;
                }
                y += 1;
                if goombas_on {
                    if let Some(i) = self.goomba_at(x, y, tick, stomped) {
                        stomped |= 1 << i; // stomp: remove, keep falling
                    }
                }
            }
        }

        if goombas_on && self.goomba_at(x, y, tick, stomped).is_some() {
            return dead(x, y, vy, stomped); // a Goomba walked into the agent
        }

        PlatformerState { x, y, vy, tick, alive: true, stomped }
    }

    pub fn goal_reached(&self, s: &PlatformerState) -> bool {
        s.x == self.goal_col
    }

    /// Ticks to the goal column at the top horizontal speed of 1 tile/tick;
    /// admissible because no action moves right faster than that.
    pub fn heuristic(&self, s: &PlatformerState) -> u32 {
        self.goal_col.saturating_sub(s.x) as u32
    }
}

/// Maximal run of patrol-walkable columns around a spawn cell: the cell is
/// passable and the cell below is solid. A floating Goomba patrols the
/// single column it spawned in.
fn patrol_for(grid: &TileGrid, x: usize, y: usize) -> Goomba {
    let walkable = |c: usize| {
        !grid.tile(c, y).is_solid()
            && y + 1 < grid.height()
            && is_solid(grid, c as isize, y as isize + 1)
    };
    if !walkable(x) {
        return Goomba { y, left: x, len: 1, phase: 0 };
    }
    let mut left = x;
    while left > 0 && walkable(left - 1) {
        left -= 1;
    }
    let mut right = x;
    while right + 1 < grid.width() && walkable(right + 1) {
        right += 1;
    }
    Goomba { y, left, len: right - left + 1, phase: x - left }
}

/// Whether the agent reached the goal column; dead states never qualify
/// because they are pruned before enqueueing.
pub struct PlatformerDomain<'a> {
    pub sim: PlatformerSim<'a>,
}

impl<'a> PlatformerDomain<'a> {
    pub fn new(grid: &'a TileGrid) -> Result<Self, PlatformerError> {
        Ok(PlatformerDomain { sim: PlatformerSim::new(grid)? })
    }
}

impl SearchDomain for PlatformerDomain<'_> {
    type State = PlatformerState;
    type Key = PlatformerKey;

    fn key(&self, s: &PlatformerState) -> PlatformerKey {
        s.key()
    }

    fn is_goal(&self, s: &PlatformerState) -> bool {
        self.sim.goal_reached(s)
    }

    fn heuristic(&self, s: &PlatformerState) -> u32 {
        self.sim.heuristic(s)
    }

    fn successors(&self, s: &PlatformerState, out: &mut Vec<(u8, PlatformerState)>) {
        if !s.alive {
            return;
        }
        for a in PLATFORMER_ACTIONS {
            let t = self.sim.step(s, a);
            if t.alive {
                out.push((a.code(), t));
            }
        }
    }
}

/// Run A* from the spawn to the flag column.
pub fn solve_platformer(
    grid: &TileGrid,
    budget: usize,
) -> Result<SearchResult<PlatformerState, PlatformerKey>, PlatformerError> {
    let domain = PlatformerDomain::new(grid)?;
    let start = domain.sim.start();
    Ok(astar(&domain, start, budget))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReachableStates {
    pub count: usize,
    pub truncated: bool,
}

/// Breadth-first count of distinct (x, y, vy) triples reachable under
/// agent-only dynamics (Goombas ignored), truncated at `cap`.
pub fn platformer_reachable_states(
    grid: &TileGrid,
    cap: usize,
) -> Result<ReachableStates, PlatformerError> {
    assert!(cap >= 1, "cap must be positive");
    let sim = PlatformerSim::new(grid)?;
    let start = sim.start();
    let mut seen: HashSet<PlatformerKey> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.key());
    queue.push_back(start);
    while let Some(s) = queue.pop_front() {
        if seen.len() >= cap {
            return Ok(ReachableStates { count: cap, truncated: true });
        }
        for a in PLATFORMER_ACTIONS {
            let t = sim.step_agent_only(&s, a);
            if t.alive && seen.insert(t.key()) {
                queue.push_back(t);
            }
        }
    }
    Ok(ReachableStates { count: seen.len(), truncated: false })
}
