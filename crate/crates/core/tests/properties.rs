//! Randomized property tests over the structural invariants the unit
//! tests only spot-check.

use std::collections::VecDeque;

use proptest::prelude::*;

use pcg_eval_core::{
    astar_diversity, gen_platformer, gen_random_maze, levenshtein, level_repr, mann_whitney_u,
    maze_reachable_count, ncd, off_path_expansions, parse_level, pearson, serialize_level,
    solve_maze, Alternative, Domain, Repr, TileGrid, TileKind, DEFAULT_BUDGET,
};

fn actions() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..4, 0..40)
}

fn bfs_len(grid: &TileGrid) -> Option<usize> {
    let (w, h) = (grid.width(), grid.height());
    let open = |x: usize, y: usize| grid.tile(x, y) == TileKind::Empty;
    let mut dist = vec![usize::MAX; w * h];
    dist[0] = 0;
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    while let Some((x, y)) = queue.pop_front() {
        if (x, y) == (w - 1, h - 1) {
            return Some(dist[y * w + x]);
        }
        let d = dist[y * w + x];
        for (nx, ny) in [
            (x, y.wrapping_sub(1)),
            (x, y + 1),
            (x.wrapping_sub(1), y),
            (x + 1, y),
        ] {
            if nx < w && ny < h && open(nx, ny) && dist[ny * w + nx] == usize::MAX {
                dist[ny * w + nx] = d + 1;
                queue.push_back((nx, ny));
            }
        }
    }
    None
}

proptest! {
    #[test]
    fn levenshtein_symmetric(a in actions(), b in actions()) {
        prop_assert_eq!(levenshtein(&a, &b), levenshtein(&b, &a));
    }

    #[test]
    fn levenshtein_triangle(a in actions(), b in actions(), c in actions()) {
        prop_assert!(levenshtein(&a, &b) <= levenshtein(&a, &c) + levenshtein(&c, &b));
    }

    #[test]
    fn levenshtein_bounded(a in actions(), b in actions()) {
        let d = levenshtein(&a, &b);
        prop_assert!(d >= a.len().abs_diff(b.len()));
        prop_assert!(d <= a.len().max(b.len()));
    }

    #[test]
    fn maze_text_round_trips(
        w in 2usize..14,
        h in 2usize..14,
        wall_prob in 0.0f64..0.9,
        seed in any::<u64>(),
    ) {
        let g = gen_random_maze(w, h, wall_prob, seed);
        let text = serialize_level(&g);
        let back = parse_level(&text, Domain::Maze).unwrap();
        prop_assert_eq!(serialize_level(&back), text);
    }

    #[test]
    fn repr_names_round_trip(repr in prop::sample::select(
        vec![Repr::Normal, Repr::Concatenated, Repr::Flat],
    )) {
        prop_assert_eq!(Repr::parse(&repr.to_string()), Some(repr));
    }

    #[test]
    fn mann_whitney_statistic_duality(
        a in prop::collection::vec(-50i32..50, 2..12),
        b in prop::collection::vec(-50i32..50, 2..12),
    ) {
        let a: Vec<f64> = a.into_iter().map(f64::from).collect();
        let b: Vec<f64> = b.into_iter().map(f64::from).collect();
        let fwd = mann_whitney_u(&a, &b, Alternative::TwoSided);
        let rev = mann_whitney_u(&b, &a, Alternative::TwoSided);
        let product = (a.len() * b.len()) as f64;
        prop_assert!((fwd.statistic + rev.statistic - product).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&fwd.p_value));
        prop_assert!((fwd.p_value - rev.p_value).abs() < 1e-9);
    }

    #[test]
    fn pearson_r_bounded(
        pairs in prop::collection::vec((-100i32..100, -100i32..100), 3..30),
    ) {
        let xs: Vec<f64> = pairs.iter().map(|&(x, _)| f64::from(x)).collect();
        let ys: Vec<f64> = pairs.iter().map(|&(_, y)| f64::from(y)).collect();
        if let Ok(rep) = pearson(&xs, &ys) {
            prop_assert!(rep.statistic.abs() <= 1.0 + 1e-12);
            prop_assert!((0.0..=1.0).contains(&rep.p_value));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ncd_identity_stays_below_cross(
        x in prop::collection::vec(any::<u8>(), 1024..1400),
        y in prop::collection::vec(any::<u8>(), 1024..1400),
    ) {
        prop_assume!(x != y);
        prop_assert!(ncd(&x, &x).unwrap() < ncd(&x, &y).unwrap());
    }

    #[test]
    fn astar_is_optimal_and_instrumented(seed in any::<u64>()) {
        let g = gen_random_maze(13, 11, 0.28, seed);
        prop_assume!(bfs_len(&g).is_some());
        let run = solve_maze(&g, DEFAULT_BUDGET).unwrap();
        prop_assert!(run.solved);
        prop_assert_eq!(run.actions.len(), bfs_len(&g).unwrap());
        prop_assert_eq!(run.path_states.len(), run.actions.len() + 1);
        let off = off_path_expansions(&run).unwrap();
        prop_assert!(off <= run.expansions_total);
        prop_assert!(run.expansions_total <= maze_reachable_count(&g).unwrap());
    }

    #[test]
    fn astar_diversity_symmetric_unit(sa in any::<u64>(), sb in any::<u64>()) {
        let solved = |seed| {
            let g = gen_random_maze(11, 11, 0.25, seed);
            let r = solve_maze(&g, DEFAULT_BUDGET).unwrap();
            r.solved.then_some(r)
        };
        prop_assume!(solved(sa).is_some() && solved(sb).is_some());
        let (ra, rb) = (solved(sa).unwrap(), solved(sb).unwrap());
        let ab = astar_diversity(&ra, &rb).unwrap();
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(ab, astar_diversity(&rb, &ra).unwrap());
        prop_assert_eq!(astar_diversity(&ra, &ra).unwrap(), 0.0);
    }

    #[test]
    fn buried_texture_invisible_to_feature_reprs(seed in any::<u64>(), flips in any::<u64>()) {
        let g = gen_platformer(40, 8, 0.07, 0.05, seed);
        let mut decorated = g.clone();
        let mut bit = 0u32;
        for x in 0..decorated.width() {
            // walk up each column, flipping buried solid tiles only
            for y in (0..decorated.height() - 1).rev() {
                let below_surface = decorated.tile(x, y).is_solid()
                    && y + 1 < decorated.height()
                    && decorated.tile(x, y + 1).is_solid();
                if !below_surface {
                    continue;
                }
                if flips >> (bit % 64) & 1 == 1 {
                    let t = decorated.tile(x, y);
                    let swapped =
                        if t == TileKind::Ground { TileKind::Brick } else { TileKind::Ground };
                    decorated.set_tile(x, y, swapped);
                }
                bit += 1;
            }
        }
        for repr in [Repr::Normal, Repr::Concatenated] {
            prop_assert_eq!(
                level_repr(&g, repr).unwrap(),
                level_repr(&decorated, repr).unwrap(),
            );
        }
    }
}
