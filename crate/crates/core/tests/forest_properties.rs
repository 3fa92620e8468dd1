//! End-to-end properties of the forest planner and the roadmap built from it.

use proptest::prelude::*;
use sff_core::roadmap::{extract_path, path_length};
use sff_core::union_find::DisjointSets;
use sff_core::{
    all_target_distances, build_graph, distance, plan, solve_tour, tour_cost, Configuration, PlannerOutput,
    PlannerParams, Polygon, Rect, TreeId, Workspace,
};

fn workspace(with_wall: bool) -> Workspace {
    let obstacles = if with_wall {
        vec![
            Polygon::rectangle(95.0, 40.0, 105.0, 160.0).unwrap(),
            Polygon::new(vec![
                Configuration::new(30.0, 150.0),
                Configuration::new(60.0, 150.0),
                Configuration::new(45.0, 175.0),
            ])
            .unwrap(),
        ]
    } else {
        Vec::new()
    };
    Workspace::new(Rect::square(200.0), obstacles, 1.0).unwrap()
}

fn free_targets(ws: &Workspace, raw: &[(f64, f64)]) -> Vec<Configuration> {
    let mut out: Vec<Configuration> = Vec::new();
    for &(x, y) in raw {
        let p = Configuration::new(x, y);
        if ws.point_free(p) && out.iter().all(|q| distance(*q, p) > 1.0) {
            out.push(p);
        }
    }
    out
}

fn params() -> impl Strategy<Value = PlannerParams> {
    (5.0..25.0f64, 1.2..3.0f64, 1usize..14, 0.0..=1.0f64, 50usize..1500, any::<bool>(), any::<bool>(), 2usize..6, any::<u64>())
        .prop_map(|(l, d_factor, k, p_q, i_max, rewiring, queues, check_points, seed)| PlannerParams {
            l,
            d: l * d_factor,
            k,
            p_q,
            i_max,
            rewiring_enabled: rewiring,
            queues_enabled: queues,
            check_points,
            rng_seed: seed,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn forest_invariants(
        wall in any::<bool>(),
        raw in prop::collection::vec((5.0..195.0f64, 5.0..195.0f64), 1..6),
        p in params(),
    ) {
        let ws = workspace(wall);
        let targets = free_targets(&ws, &raw);
        prop_assume!(!targets.is_empty());
        let f = plan(&ws, &targets, p.clone()).unwrap();
        let nodes = f.nodes();
        let n = targets.len();

        prop_assert!(f.iterations_used() <= p.i_max);
        prop_assert!(f.iterations_used() == p.i_max || (f.open_list().count() == 0 && f.is_single_component()));
        prop_assert_eq!(f.counters().len(), f.iterations_used());

        for (i, t) in targets.iter().enumerate() {
            let root = &nodes[i];
            prop_assert!(root.is_root());
            prop_assert_eq!(root.config, *t);
            prop_assert_eq!(root.cost, 0.0);
            prop_assert_eq!(root.tree, TreeId(i as u32));
        }
        for v in &nodes[n..] {
            prop_assert!(v.source.is_some());
            let parent = &nodes[v.parent.unwrap().index()];
            prop_assert_eq!(parent.tree, v.tree);
            prop_assert!(ws.segment_free(parent.config, v.config, p.check_points));
            prop_assert!(!(f.is_open(v.id) && f.is_closed(v.id)));
        }

        let mut sets = DisjointSets::new(n);
        for e in f.virtual_edges() {
            let (a, b) = (&nodes[e.a.index()], &nodes[e.b.index()]);
            prop_assert_ne!(a.tree, b.tree);
            prop_assert_eq!(e.length, distance(a.config, b.config));
            prop_assert!(e.length < p.d);
            prop_assert!(ws.segment_free(a.config, b.config, p.check_points));
            sets.union(a.tree.index(), b.tree.index());
        }
        prop_assert_eq!(sets.set_count() == 1, f.is_single_component());
        if !p.queues_enabled {
            prop_assert!(f.queues().all(|q| q.is_empty()));
        }

        let again = plan(&ws, &targets, p).unwrap();
        prop_assert_eq!(f.to_record("x"), again.to_record("x"));
    }

    #[test]
    fn roadmap_paths_reproduce_matrix_entries(
        raw in prop::collection::vec((5.0..195.0f64, 5.0..195.0f64), 2..6),
        seed in any::<u64>(),
    ) {
        let ws = workspace(true);
        let targets = free_targets(&ws, &raw);
        prop_assume!(targets.len() >= 2);
        let p = PlannerParams { l: 15.0, d: 30.0, ..PlannerParams::default() }.with_seed(seed);
        let f = plan(&ws, &targets, p).unwrap();
        prop_assume!(f.is_single_component());
        let g = build_graph(&f);
        let m = all_target_distances(&g);
        for i in 0..targets.len() {
            for j in 0..targets.len() {
                let path = extract_path(&g, &m, i, j).unwrap();
                prop_assert_eq!(path[0], targets[i]);
                prop_assert_eq!(*path.last().unwrap(), targets[j]);
                let len = path_length(&path);
                prop_assert!((len - m.get(i, j)).abs() <= 1e-9 * len.max(1.0));
                prop_assert!(m.get(i, j) >= distance(targets[i], targets[j]) - 1e-9);
            }
        }
        let tour = solve_tour(m.costs()).unwrap();
        prop_assert!((tour_cost(m.costs(), &tour.sequence).unwrap() - tour.total_cost).abs() <= 1e-9 * tour.total_cost);
    }
}
