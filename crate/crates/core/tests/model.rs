use std::sync::Arc;

use proptest::prelude::*;
use sggraph::exact::state_from_mask;
use sggraph::model::{shell, Edge, EnergyModel, GraphState, Vertex, Window};

fn five_vertices() -> Arc<Window> {
    let v = Vertex::new;
    Arc::new(Window::from_vertices([v(0, 0), v(1, 0), v(2, 0), v(0, 1), v(1, 1)]).unwrap())
}

fn models() -> Vec<EnergyModel> {
    vec![EnergyModel::EdgeOnly, EnergyModel::ferrari(0.3, 0.5).unwrap(), EnergyModel::ferrari(0.1, 2.0).unwrap(), EnergyModel::TwoStar]
}

fn model_strategy() -> impl Strategy<Value = EnergyModel> {
    prop_oneof![
        Just(EnergyModel::EdgeOnly),
        Just(EnergyModel::TwoStar),
        (0.01f64..0.49, 0.0f64..3.0).prop_map(|(h0, extra)| EnergyModel::ferrari(h0, h0 + 0.01 + extra).unwrap()),
    ]
}

proptest! {
    #[test]
    fn hamiltonian_difference_is_length_plus_local_difference(
        model in model_strategy(),
        mask in 0u64..1 << 10,
        k in 0usize..10,
    ) {
        let w = five_vertices();
        let edges = w.edges();
        let x = state_from_mask(&w, &edges, mask);
        let e = edges[k];
        let with = x.with_edge(e).unwrap();
        let without = x.without_edge(e);
        let lhs = model.hamiltonian(&with) - model.hamiltonian(&without);
        let rhs = e.length() as f64 + model.local_difference(&x, e).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9, "{lhs} vs {rhs}");
    }

    #[test]
    fn local_difference_ignores_unrelated_edges(
        model in model_strategy(),
        mask in 0u64..1 << 10,
        k in 0usize..10,
        j in 0usize..10,
    ) {
        let w = five_vertices();
        let edges = w.edges();
        let (e, f) = (edges[k], edges[j]);
        prop_assume!(!e.relates(f));
        let x = state_from_mask(&w, &edges, mask);
        let toggled = if x.contains(f) { x.without_edge(f) } else { x.with_edge(f).unwrap() };
        prop_assert_eq!(model.local_difference(&x, e).unwrap(), model.local_difference(&toggled, e).unwrap());
    }

    #[test]
    fn local_difference_does_not_read_the_edge_itself(
        model in model_strategy(),
        mask in 0u64..1 << 10,
        k in 0usize..10,
    ) {
        let w = five_vertices();
        let edges = w.edges();
        let x = state_from_mask(&w, &edges, mask);
        let e = edges[k];
        prop_assert_eq!(
            model.local_difference(&x.with_edge(e).unwrap(), e).unwrap(),
            model.local_difference(&x.without_edge(e), e).unwrap()
        );
    }

    #[test]
    fn acceptance_is_a_probability(
        model in model_strategy(),
        beta in 0.01f64..20.0,
        mask in 0u64..1 << 10,
        k in 0usize..10,
    ) {
        let w = five_vertices();
        let edges = w.edges();
        let x = state_from_mask(&w, &edges, mask);
        let q = model.acceptance_q(beta, &x, edges[k]).unwrap();
        prop_assert!((0.0..=1.0).contains(&q), "q = {q}");
    }

    #[test]
    fn twostar_statistic_is_path_independent(mask in 0u64..1 << 10, seed in any::<u64>()) {
        // insert the edges of the target state in a shuffled order
        let w = five_vertices();
        let edges = w.edges();
        let target = state_from_mask(&w, &edges, mask);
        let mut order: Vec<Edge> = target.edges().collect();
        let mut s = seed;
        for i in (1..order.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        let mut x = GraphState::empty(w.clone());
        let mut sum = 0.0;
        for e in order {
            sum += EnergyModel::TwoStar.local_difference(&x, e).unwrap();
            x.insert(e).unwrap();
        }
        prop_assert!((sum - EnergyModel::TwoStar.sufficient_statistic(&target)).abs() < 1e-9);
    }

    #[test]
    fn shells_have_4s_distinct_points(x in -50i64..50, y in -50i64..50, s in 1u64..40) {
        let c = Vertex::new(x, y);
        let points = shell(c, s);
        prop_assert_eq!(points.len() as u64, 4 * s);
        let set: std::collections::BTreeSet<_> = points.iter().collect();
        prop_assert_eq!(set.len(), points.len());
        prop_assert!(points.iter().all(|p| p.l1(c) == s));
    }
}

#[test]
fn minimum_local_difference_respects_m() {
    let w = five_vertices();
    let edges = w.edges();
    for model in models() {
        let mut min = f64::INFINITY;
        for mask in 0..1u64 << edges.len() {
            let x = state_from_mask(&w, &edges, mask);
            for &e in &edges {
                min = min.min(model.local_difference(&x, e).unwrap());
            }
        }
        let m = model.constant_m();
        assert!(min >= m - 1e-12, "{model}: min {min} below M {m}");
        if matches!(model, EnergyModel::Ferrari(_)) {
            assert!((min - m).abs() < 1e-12, "{model}: M not attained");
        }
    }
}

#[test]
fn ferrari_parameters_are_guarded() {
    assert!(EnergyModel::ferrari(0.5, 1.0).is_err());
    assert!(EnergyModel::ferrari(0.3, 0.2).is_err());
    assert!(EnergyModel::ferrari(0.0, 0.2).is_err());
    assert!(EnergyModel::ferrari(f64::NAN, 0.2).is_err());
    assert_eq!(EnergyModel::ferrari(0.3, 0.5).unwrap().constant_m(), -0.6);
}

#[test]
fn edges_are_canonical_and_nondegenerate() {
    let a = Vertex::new(2, -1);
    let b = Vertex::new(-3, 4);
    assert_eq!(Edge::new(a, b).unwrap(), Edge::new(b, a).unwrap());
    assert_eq!(Edge::new(a, b).unwrap().length(), 10);
    assert!(Edge::new(a, a).is_err());
}

#[test]
fn states_outside_the_window_are_refused() {
    let w = five_vertices();
    let mut x = GraphState::empty(w);
    let outside = Edge::new(Vertex::new(0, 0), Vertex::new(5, 5)).unwrap();
    assert!(x.insert(outside).is_err());
    assert!(EnergyModel::TwoStar.local_difference(&x, outside).is_err());
}
