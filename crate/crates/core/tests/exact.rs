use approx::assert_abs_diff_eq;
use sggraph::exact::{
    detailed_balance_residual, enumerate_states, enumerate_states_with_limit, exact_distribution, exact_expectation,
    total_variation, ExactDistribution,
};
use sggraph::validation::{fixture_models, oracle_windows};
use sggraph::{EnergyModel, Error, Vertex, Window};

#[test]
fn tables_sum_to_one() {
    for model in fixture_models() {
        for (_, w) in oracle_windows() {
            for beta in [0.5, 1.0, 3.0, 6.0] {
                let d = exact_distribution(model, &w, beta).unwrap();
                let total: f64 = d.probabilities().iter().sum();
                assert!((total - 1.0).abs() < 1e-12, "{model} beta={beta}: {total}");
            }
        }
    }
}

#[test]
fn detailed_balance_on_all_oracle_windows() {
    for model in fixture_models() {
        for (name, w) in oracle_windows() {
            for beta in [0.5, 1.0, 3.0, 6.0] {
                let r = detailed_balance_residual(model, &w, beta).unwrap();
                assert!(r < 1e-12, "{model}/{name} beta={beta}: {r}");
            }
        }
    }
}

#[test]
fn edge_only_factorizes() {
    let w = Window::rect(0, 1, 0, 1).unwrap();
    let beta = 1.3;
    let d = exact_distribution(EnergyModel::EdgeOnly, &w, beta).unwrap();
    let p: Vec<f64> = d
        .edges()
        .iter()
        .map(|e| {
            let q = (-beta * e.length() as f64).exp();
            q / (1.0 + q)
        })
        .collect();
    let product: Vec<f64> = (0..1u64 << p.len())
        .map(|mask| p.iter().enumerate().map(|(k, &pk)| if mask >> k & 1 == 1 { pk } else { 1.0 - pk }).product())
        .collect();
    assert!(total_variation(d.probabilities(), &product).unwrap() < 1e-12);
}

#[test]
fn two_vertex_marginal() {
    let w = Window::from_vertices([Vertex::new(0, 0), Vertex::new(1, 0)]).unwrap();
    let d = exact_distribution(EnergyModel::EdgeOnly, &w, 1.0).unwrap();
    assert_abs_diff_eq!(d.edge_marginals()[0], 0.2689414213699951, epsilon = 1e-12);
    assert_abs_diff_eq!(exact_expectation(&d, |x| x.edge_count() as f64), 0.2689414213699951, epsilon = 1e-12);
}

#[test]
fn enumeration_guard() {
    let big = Window::rect(0, 2, 0, 2).unwrap();
    assert!(matches!(enumerate_states(&big), Err(Error::WindowTooLarge { edges: 36, .. })));
    assert_eq!(enumerate_states_with_limit(&Window::rect(0, 1, 0, 1).unwrap(), 6).unwrap().len(), 64);
    assert!(ExactDistribution::with_limit(EnergyModel::EdgeOnly, &Window::rect(0, 1, 0, 1).unwrap(), 1.0, 5).is_err());
}

#[test]
fn total_variation_cases() {
    assert_eq!(total_variation(&[0.5, 0.5], &[0.5, 0.5]).unwrap(), 0.0);
    assert_eq!(total_variation(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
    assert_eq!(total_variation(&[0.5, 0.5], &[1.0, 0.0]).unwrap(), 0.5);
    assert!(matches!(total_variation(&[1.0], &[0.5, 0.5]), Err(Error::SupportMismatch { .. })));
}

#[test]
fn csv_export_lists_every_state() {
    let w = Window::rect(0, 1, 0, 1).unwrap();
    let d = exact_distribution(EnergyModel::TwoStar, &w, 3.0).unwrap();
    let mut buf = Vec::new();
    d.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("bitmask,probability,energy"));
    assert_eq!(lines.count(), 64);
}
