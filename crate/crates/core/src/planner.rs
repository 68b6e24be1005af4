//! Generic A* over any search domain, instrumented with everything the
//! metrics need: the action trajectory, the solution path, and the set of
//! expanded states.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::hash::Hash;

use thiserror::Error;

/// Default expansion budget for a single search.
pub const DEFAULT_BUDGET: usize = 1_000_000;

/// A deterministic single-agent search problem with unit action costs.
///
/// `State` is the full simulation state; `Key` is the identity used for
/// duplicate detection. Domains where part of the state is bookkeeping
/// (e.g. elapsed ticks) can fold it out of the key so the searched space
/// stays finite and matches the domain's reachable-state count.
pub trait SearchDomain {
    type State: Clone;
    type Key: Clone + Eq + Hash;

    fn key(&self, s: &Self::State) -> Self::Key;
    fn is_goal(&self, s: &Self::State) -> bool;
    /// Admissible estimate of the remaining cost, in action steps.
    fn heuristic(&self, s: &Self::State) -> u32;
    /// Push `(action code, successor)` pairs onto `out` in a fixed order.
    fn successors(&self, s: &Self::State, out: &mut Vec<(u8, Self::State)>);
}

/// Outcome of one A* run.
#[derive(Debug, Clone)]
pub struct SearchResult<S, K> {
    pub solved: bool,
    /// Integer action codes, one per edge of the solution path.
    pub actions: Vec<u8>,
    /// Solution states from start to goal inclusive; empty when unsolved.
    pub path_states: Vec<S>,
    /// Keys of `path_states`, for set arithmetic against `expanded`.
    pub path_keys: Vec<K>,
    /// Every key popped and expanded, in pop order; each appears once.
    pub expanded: Vec<K>,
    pub expansions_total: usize,
    pub budget_exhausted: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlannerError {
    #[error("operation requires a solved search result")]
    NotSolved,
}

struct Node<S> {
    state: S,
    parent: usize,
    action: u8,
    g: u32,
}

/// A* with unit edge costs.
///
/// Tie-breaking is fixed so trajectories are bit-reproducible: pop lowest
/// f, then highest g, then earliest insertion. Duplicate handling is
/// closed-set with re-insert on a shorter g; stale heap entries are
/// skipped, so each key is expanded at most once. The goal test runs at
/// pop time and a popped goal is not counted as an expansion.
pub fn astar<D: SearchDomain>(
    domain: &D,
    start: D::State,
    budget: usize,
) -> SearchResult<D::State, D::Key> {
    let mut nodes: Vec<Node<D::State>> = Vec::new();
    let mut best_g: HashMap<D::Key, u32> = HashMap::new();
    let mut closed: HashSet<D::Key> = HashSet::new();
    let mut expanded: Vec<D::Key> = Vec::new();
    // Min-heap on (f, Reverse(g), insertion seq); the node index rides along.
    let mut heap: BinaryHeap<Reverse<(u32, Reverse<u32>, u64, usize)>> = BinaryHeap::new();
    let mut seq: u64 = 0;

    let h0 = domain.heuristic(&start);
    best_g.insert(domain.key(&start), 0);
    nodes.push(Node { state: start, parent: usize::MAX, action: 0, g: 0 });
    heap.push(Reverse((h0, Reverse(0), seq, 0)));

    let mut budget_exhausted = false;
    let mut goal_idx: Option<usize> = None;

    while let Some(Reverse((_, _, _, idx))) = heap.pop() {
        let key = domain.key(&nodes[idx].state);
        if closed.contains(&key) {
            continue;
        }
        if best_g.get(&key).is_some_and(|&g| g < nodes[idx].g) {
            continue; // stale entry superseded by a re-insert
        }
        if domain.is_goal(&nodes[idx].state) {
            goal_idx = Some(idx);
            break;
        }
        if expanded.len() >= budget {
            budget_exhausted = true;
            break;
        }
        closed.insert(key.clone());
        expanded.push(key);

        let g_next = nodes[idx].g + 1;
        let mut succs = Vec::new();
        domain.successors(&nodes[idx].state, &mut succs);
        for (action, succ) in succs {
            let sk = domain.key(&succ);
            if closed.contains(&sk) {
                continue;
            }
            let improves = best_g.get(&sk).is_none_or(|&g| g_next < g);
            if improves {
                best_g.insert(sk, g_next);
                let h = domain.heuristic(&succ);
                let node_idx = nodes.len();
                nodes.push(Node { state: succ, parent: idx, action, g: g_next });
                seq += 1;
                heap.push(Reverse((g_next + h, Reverse(g_next), seq, node_idx)));
            }
        }
    }

    let mut result = SearchResult {
        solved: false,
        actions: Vec::new(),
        path_states: Vec::new(),
        path_keys: Vec::new(),
        expanded,
        expansions_total: 0,
        budget_exhausted,
    };
    result.expansions_total = result.expanded.len();

    if let Some(goal) = goal_idx {
        result.solved = true;
        let mut idx = goal;
        loop {
            result.path_states.push(nodes[idx].state.clone());
            if nodes[idx].parent == usize::MAX {
                break;
            }
            result.actions.push(nodes[idx].action);
            idx = nodes[idx].parent;
        }
        result.path_states.reverse();
        result.actions.reverse();
        result.path_keys = result.path_states.iter().map(|s| domain.key(s)).collect();
    }
    result
}

/// Number of expanded states that are not on the solution path.
pub fn off_path_expansions<S, K: Eq + Hash>(r: &SearchResult<S, K>) -> Result<usize, PlannerError> {
    if !r.solved {
        return Err(PlannerError::NotSolved);
    }
    let on_path: HashSet<&K> = r.path_keys.iter().collect();
    Ok(r.expanded.iter().filter(|k| !on_path.contains(k)).count())
}
