//! Evaluators for the convergence, mixing and clan-size bounds.

use serde::Serialize;

use super::constants::{alpha, beta_star, check_m, DEFAULT_TOL};
use crate::error::{check_beta, invalid, Error, Result};
use crate::model::{set_distance, Edge, Vertex, Window};

/// The set of vertices or of vertex pairs a function depends on.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "items", rename_all = "lowercase")]
pub enum Support {
    Vertices(Vec<Vertex>),
    Edges(Vec<Edge>),
}

/// Picks the auxiliary inverse temperature: the midpoint of `(beta*, beta)`
/// when `requested` is `None`, otherwise `requested` after checking it lies
/// in that interval.
pub fn resolve_beta_tilde(beta: f64, m: f64, requested: Option<f64>) -> Result<f64> {
    check_beta(beta)?;
    check_m(m)?;
    let bs = beta_star(m, DEFAULT_TOL)?;
    if beta <= bs {
        return Err(Error::Subcritical { beta, beta_star: bs, m });
    }
    let bt = requested.unwrap_or(0.5 * (bs + beta));
    if !(bt > bs && bt < beta) {
        return Err(invalid(
            "beta_tilde",
            format!("must lie in (beta*, beta) = ({bs:.6}, {beta}), got {bt}"),
        ));
    }
    // alpha(bs) = 1 only up to the solver tolerance
    let a = alpha(bt, m)?;
    if a >= 1.0 {
        return Err(invalid("beta_tilde", format!("alpha(beta_tilde) = {a} is not below 1")));
    }
    Ok(bt)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundQuery {
    pub beta: f64,
    pub beta_tilde: f64,
    pub m: f64,
    pub support: Support,
    pub window: Window,
    pub f_sup_norm: f64,
}

impl BoundQuery {
    /// Validates the query; `beta_tilde = None` selects the midpoint.
    pub fn new(
        beta: f64,
        beta_tilde: Option<f64>,
        m: f64,
        support: Support,
        window: Window,
        f_sup_norm: f64,
    ) -> Result<Self> {
        let beta_tilde = resolve_beta_tilde(beta, m, beta_tilde)?;
        if !(f_sup_norm.is_finite() && f_sup_norm >= 0.0) {
            return Err(invalid("f_sup_norm", format!("must be finite and nonnegative, got {f_sup_norm}")));
        }
        match &support {
            Support::Vertices(vs) => {
                if let Some(&v) = vs.iter().find(|&&v| !window.contains(v)) {
                    return Err(Error::VertexOutsideWindow(v));
                }
            }
            Support::Edges(es) => {
                if let Some(&e) = es.iter().find(|&&e| !window.contains_edge(e)) {
                    return Err(Error::EdgeOutsideWindow(e));
                }
            }
        }
        Ok(BoundQuery { beta, beta_tilde, m, support, window, f_sup_norm })
    }

    fn gap(&self) -> f64 {
        self.beta - self.beta_tilde
    }

    fn alpha_tilde(&self) -> f64 {
        alpha(self.beta_tilde, self.m).expect("validated")
    }
}

/// Bound on `|mu f - mu_V f|` for `f` supported in the query's window.
pub fn space_convergence_bound(q: &BoundQuery) -> Result<f64> {
    let a = q.alpha_tilde();
    let gap = q.gap();
    Ok(match &q.support {
        Support::Vertices(vs) => {
            let sum: f64 = vs.iter().map(|&v| (-gap * q.window.distance_to_complement(v) as f64).exp()).sum();
            a / (1.0 - a) * (-gap * q.m).exp() * q.f_sup_norm * sum
        }
        Support::Edges(es) => {
            let sum: f64 = es
                .iter()
                .map(|&e| {
                    let d = q.window.edge_distance_to_complement(e) as f64;
                    (-q.beta_tilde * e.length() as f64 - q.beta * q.m).exp() * (-gap * d).exp()
                })
                .sum();
            2.0 * q.f_sup_norm / (1.0 - a) * sum
        }
    })
}

/// Bound on `|mu_V(fg) - mu_V f mu_V g|`.
pub fn mixing_bound(qf: &BoundQuery, qg: &BoundQuery) -> Result<f64> {
    if qf.beta != qg.beta || qf.beta_tilde != qg.beta_tilde || qf.m != qg.m {
        return Err(invalid("mixing", "both queries must share beta, beta_tilde and M"));
    }
    let a = qf.alpha_tilde();
    let gap = qf.gap();
    let norms = qf.f_sup_norm * qg.f_sup_norm;
    match (&qf.support, &qg.support) {
        (Support::Vertices(fs), Support::Vertices(gs)) => {
            let mut sum = 0.0;
            for &i in fs {
                for &j in gs {
                    let l = i.l1(j) as f64;
                    sum += l * (-gap * l).exp();
                }
            }
            Ok(0.5 * (a / (1.0 - a)).powi(2) * (-2.0 * gap * qf.m).exp() * norms * sum)
        }
        (Support::Edges(fs), Support::Edges(gs)) => {
            let mut sum = 0.0;
            for &e in fs {
                for &f in gs {
                    let (ea, eb) = e.endpoints();
                    let (fa, fb) = f.endpoints();
                    let d = set_distance(&[ea, eb], &[fa, fb]).unwrap_or(0) as f64;
                    let lengths = (e.length() + f.length()) as f64;
                    sum += d * (-qf.beta_tilde * lengths - 2.0 * qf.beta * qf.m).exp() * (-gap * d).exp();
                }
            }
            Ok(2.0 * norms / (1.0 - a).powi(2) * sum)
        }
        _ => Err(invalid("mixing", "supports must both be vertex sets or both be edge sets")),
    }
}

/// Which clan a tail bound refers to.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ClanKind {
    Vertex,
    Edge { length: u64 },
}

/// Bound on `P(SD > k)`.
pub fn sd_tail_bound(kind: ClanKind, k: u64, beta: f64, beta_tilde: f64, m: f64) -> Result<f64> {
    let bt = resolve_beta_tilde(beta, m, Some(beta_tilde))?;
    let a = alpha(bt, m)?;
    let gap = beta - bt;
    let decay = (-gap * k as f64).exp();
    Ok(match kind {
        ClanKind::Vertex => 0.5 * a / (1.0 - a) * (-gap * m).exp() * decay,
        ClanKind::Edge { length } => (-bt * length as f64 - beta * m).exp() / (1.0 - a) * decay,
    })
}

/// Bound on `P(TL > b t)` for the clan of an edge of length `length`.
pub fn tl_tail_bound(length: u64, b: f64, t: f64, beta: f64, m: f64) -> Result<f64> {
    let a = alpha(beta, m)?;
    if a >= 1.0 {
        return Err(Error::Subcritical { beta, beta_star: beta_star(m, DEFAULT_TOL)?, m });
    }
    if !(b > 0.0 && t > 0.0) {
        return Err(invalid("b, t", format!("must be positive, got b={b}, t={t}")));
    }
    Ok((-beta * length as f64 - beta * m).exp() * (-(1.0 - a) * b * t).exp())
}

/// `alpha(beta) / 2`, a bound on the expected degree of a vertex.
pub fn expected_degree_bound(beta: f64, m: f64) -> Result<f64> {
    Ok(0.5 * alpha(beta, m)?)
}

/// Edges `{center, j}` with `1 <= L(center, j) <= k`: the edge support of
/// the degree restricted to the ball of radius `k`.
pub fn restricted_degree_support(center: Vertex, k: u64) -> Vec<Edge> {
    (1..=k)
        .flat_map(|s| crate::model::shell(center, s))
        .map(|j| Edge::new(center, j).expect("distinct"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn v(x: i64, y: i64) -> Vertex {
        Vertex::new(x, y)
    }

    #[test]
    fn vertex_form_uses_distance_to_complement() {
        let c = v(0, 0);
        for l in [1u64, 3, 6] {
            let w = Window::ball(c, l);
            assert_eq!(w.distance_to_complement(c), l + 1);
            let q = BoundQuery::new(4.0, Some(3.0), 0.0, Support::Vertices(vec![c]), w, 1.0).unwrap();
            let a = alpha(3.0, 0.0).unwrap();
            let expected = a / (1.0 - a) * (-(l as f64 + 1.0)).exp();
            assert_abs_diff_eq!(space_convergence_bound(&q).unwrap(), expected, epsilon = 1e-15);
        }
        let q = BoundQuery::new(4.0, None, 0.0, Support::Vertices(vec![c]), Window::ball(c, 2), 0.0).unwrap();
        assert_eq!(space_convergence_bound(&q).unwrap(), 0.0);
    }

    #[test]
    fn restricted_degree_specialization() {
        let (k, l, beta, bt) = (2u64, 5u64, 4.0, 3.0);
        let c = v(0, 0);
        let support = restricted_degree_support(c, k);
        assert_eq!(support.len(), 12);
        let norm = 2.0 * (k * (k + 1)) as f64;
        let q = BoundQuery::new(beta, Some(bt), 0.0, Support::Edges(support), Window::ball(c, l), norm).unwrap();
        let shell_sum: f64 = (1..=k)
            .map(|s| 4.0 * s as f64 * (-bt * s as f64).exp() * (-(beta - bt) * (l + 1 - s) as f64).exp())
            .sum();
        assert_abs_diff_eq!(shell_sum, 0.0017050499497099263, epsilon = 1e-15);
        let a = alpha(bt, 0.0).unwrap();
        let expected = 2.0 * norm / (1.0 - a) * shell_sum;
        assert_abs_diff_eq!(space_convergence_bound(&q).unwrap(), expected, epsilon = 1e-9);
    }

    #[test]
    fn mixing_examples() {
        let e = Edge::new(v(0, 0), v(1, 0)).unwrap();
        let f = Edge::new(v(5, 0), v(6, 0)).unwrap();
        let w = Window::rect(-1, 7, -1, 1).unwrap();
        let qf = BoundQuery::new(4.0, Some(3.0), 0.0, Support::Edges(vec![e]), w.clone(), 1.0).unwrap();
        let qg = BoundQuery::new(4.0, Some(3.0), 0.0, Support::Edges(vec![f]), w.clone(), 1.0).unwrap();
        assert_abs_diff_eq!(mixing_bound(&qf, &qg).unwrap(), 0.0011628415280696542, epsilon = 1e-15);
        let zero = BoundQuery { f_sup_norm: 0.0, ..qg.clone() };
        assert_eq!(mixing_bound(&qf, &zero).unwrap(), 0.0);
        let qv = BoundQuery::new(4.0, Some(3.0), 0.0, Support::Vertices(vec![v(0, 0)]), w, 1.0).unwrap();
        assert!(mixing_bound(&qf, &qv).is_err());
    }

    #[test]
    fn vertex_mixing_decays_with_distance() {
        let mut last = f64::INFINITY;
        for n in 2..40i64 {
            let w = Window::rect(0, n, 0, 0).unwrap();
            let qf = BoundQuery::new(4.0, None, 0.0, Support::Vertices(vec![v(0, 0)]), w.clone(), 1.0).unwrap();
            let qg = BoundQuery::new(4.0, None, 0.0, Support::Vertices(vec![v(n, 0)]), w, 1.0).unwrap();
            let b = mixing_bound(&qf, &qg).unwrap();
            assert!(b < last);
            last = b;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn tail_bounds() {
        let sd = sd_tail_bound(ClanKind::Vertex, 3, 4.0, 3.0, 0.0).unwrap();
        assert_abs_diff_eq!(sd, 0.01964893018095727, epsilon = 1e-15);
        assert!(sd_tail_bound(ClanKind::Vertex, 200, 4.0, 3.0, 0.0).unwrap() < 1e-80);
        assert!(sd_tail_bound(ClanKind::Vertex, 3, 4.0, 2.0, 0.0).is_err());
        let tl = tl_tail_bound(1, 1.0, 5.0, 4.0, 0.0).unwrap();
        assert_abs_diff_eq!(tl, 0.0002639418612471209, epsilon = 1e-15);
        assert!(tl_tail_bound(1, 1.0, 1e4, 4.0, 0.0).unwrap() < 1e-300);
        assert!(tl_tail_bound(1, 1.0, 5.0, 2.0, 0.0).is_err());
        assert_abs_diff_eq!(expected_degree_bound(3.0, 0.0).unwrap(), 0.22056402200823905, epsilon = 1e-15);
        assert!(expected_degree_bound(3.0, 0.5).unwrap() < expected_degree_bound(3.0, 0.0).unwrap());
    }

    #[test]
    fn beta_tilde_defaults_to_midpoint() {
        let bs = beta_star(0.0, DEFAULT_TOL).unwrap();
        let bt = resolve_beta_tilde(4.0, 0.0, None).unwrap();
        assert_abs_diff_eq!(bt, 0.5 * (bs + 4.0), epsilon = 1e-12);
        assert!(matches!(resolve_beta_tilde(2.0, 0.0, None), Err(Error::Subcritical { .. })));
    }
}
