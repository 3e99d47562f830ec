use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use sggraph::analysis::{
    alpha, beta_star, empirical_covariance, expected_degree_bound, mixing_bound, restricted_degree_support,
    sd_tail_bound, space_convergence_bound, tl_tail_bound, BoundQuery, ClanKind, Support, DEFAULT_TOL,
};
use sggraph::perfect::{perfect_samples, ClanOptions};
use sggraph::{Edge, EnergyModel, Vertex, Window};

proptest! {
    #[test]
    fn beta_star_solves_alpha_equals_one(m in -0.95f64..2.0) {
        let bs = beta_star(m, DEFAULT_TOL).unwrap();
        prop_assert!((alpha(bs, m).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn alpha_decreases_in_beta(m in -0.95f64..2.0, b in 0.05f64..20.0, db in 0.01f64..5.0) {
        prop_assert!(alpha(b + db, m).unwrap() < alpha(b, m).unwrap());
    }

    #[test]
    fn tail_bounds_decrease(k in 1u64..50, t in 0.1f64..50.0) {
        let (beta, bt) = (4.0, 3.0);
        let v1 = sd_tail_bound(ClanKind::Vertex, k, beta, bt, 0.0).unwrap();
        let v2 = sd_tail_bound(ClanKind::Vertex, k + 1, beta, bt, 0.0).unwrap();
        prop_assert!(v1 >= 0.0 && v2 < v1);
        let e1 = sd_tail_bound(ClanKind::Edge { length: 1 }, k, beta, bt, 0.0).unwrap();
        let e2 = sd_tail_bound(ClanKind::Edge { length: 1 }, k + 1, beta, bt, 0.0).unwrap();
        prop_assert!(e2 < e1);
        let t1 = tl_tail_bound(1, 1.0, t, beta, 0.0).unwrap();
        prop_assert!(t1 >= 0.0 && tl_tail_bound(1, 1.0, t + 1.0, beta, 0.0).unwrap() < t1);
    }

    #[test]
    fn convergence_bound_decreases_with_the_box(l in 0u64..30) {
        let c = Vertex::new(0, 0);
        let q = |l| BoundQuery::new(4.0, Some(3.0), 0.0, Support::Vertices(vec![c]), Window::ball(c, l), 1.0).unwrap();
        let (a, b) = (space_convergence_bound(&q(l)).unwrap(), space_convergence_bound(&q(l + 1)).unwrap());
        prop_assert!(a >= 0.0 && b < a);
    }
}

#[test]
fn zero_norm_gives_zero_bound() {
    let c = Vertex::new(0, 0);
    let q = BoundQuery::new(4.0, None, 0.0, Support::Vertices(vec![c]), Window::rect(-3, 3, -3, 3).unwrap(), 0.0).unwrap();
    assert_eq!(space_convergence_bound(&q).unwrap(), 0.0);
    let g = BoundQuery::new(4.0, None, 0.0, Support::Vertices(vec![Vertex::new(2, 0)]), q.window.clone(), 1.0).unwrap();
    assert_eq!(mixing_bound(&g, &q).unwrap(), 0.0);
}

#[test]
fn beta_tilde_must_sit_between_beta_star_and_beta() {
    let c = Vertex::new(0, 0);
    let w = Window::rect(-1, 1, -1, 1).unwrap();
    assert!(BoundQuery::new(4.0, Some(2.0), 0.0, Support::Vertices(vec![c]), w.clone(), 1.0).is_err());
    assert!(BoundQuery::new(4.0, Some(4.5), 0.0, Support::Vertices(vec![c]), w.clone(), 1.0).is_err());
    assert!(BoundQuery::new(2.0, None, 0.0, Support::Vertices(vec![c]), w, 1.0).is_err());
}

#[test]
fn mixing_bound_vanishes_with_distance() {
    let q = |x: i64| {
        BoundQuery::new(4.0, Some(3.0), 0.0, Support::Vertices(vec![Vertex::new(x, 0)]), Window::rect(-1, 100, -1, 1).unwrap(), 1.0)
            .unwrap()
    };
    let values: Vec<f64> = (1..40).map(|n| mixing_bound(&q(0), &q(n)).unwrap()).collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]));
    assert!(*values.last().unwrap() < 1e-12);
}

#[test]
fn covariances_of_constant_functions_vanish() {
    let window = Window::rect(0, 3, 0, 3).unwrap();
    let samples = perfect_samples(EnergyModel::EdgeOnly, &window, 3.0, 200, 4, &ClanOptions::default()).unwrap();
    let c = empirical_covariance(&samples, |_, _| 1.0, Vertex::new(0, 0), &[(0, 0), (1, 0)]).unwrap();
    assert!(c.iter().all(|e| e.covariance == 0.0));
    let d = empirical_covariance(&samples, |s, v| s.degree(v) as f64, Vertex::new(1, 1), &[(0, 0), (1, 0), (2, 0)]).unwrap();
    assert!(d[0].covariance > 0.0);
    assert!(empirical_covariance(&samples[..50], |_, _| 1.0, Vertex::new(0, 0), &[(0, 0)]).is_err());
}

#[test]
fn degree_bound_decreases_in_m() {
    assert_abs_diff_eq!(expected_degree_bound(3.0, 0.0).unwrap(), 0.22056402200823905, epsilon = 1e-15);
    assert!(expected_degree_bound(3.0, 0.5).unwrap() < expected_degree_bound(3.0, 0.0).unwrap());
}

#[test]
fn restricted_degree_norm_is_the_shell_count() {
    let edges = restricted_degree_support(Vertex::new(0, 0), 2);
    assert_eq!(edges.len(), 12);
    assert!(edges.iter().all(|e: &Edge| e.contains(Vertex::new(0, 0))));
}
