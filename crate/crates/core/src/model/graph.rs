use std::collections::{BTreeSet, HashMap};
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::lattice::{Edge, Vertex, Window};
use crate::error::{Error, Result};

/// A simple graph on the vertices of a window.
#[derive(Clone, Debug)]
pub struct GraphState {
    window: Arc<Window>,
    edges: BTreeSet<Edge>,
    adjacency: HashMap<Vertex, Vec<Vertex>>,
}

impl PartialEq for GraphState {
    fn eq(&self, other: &Self) -> bool {
        self.edges == other.edges && self.window == other.window
    }
}

impl Eq for GraphState {}

impl Hash for GraphState {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.edges.hash(state);
    }
}

impl GraphState {
    pub fn empty(window: impl Into<Arc<Window>>) -> Self {
        GraphState {
            window: window.into(),
            edges: BTreeSet::new(),
            adjacency: HashMap::new(),
        }
    }

    pub fn from_edges(
        window: impl Into<Arc<Window>>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self> {
        let mut g = GraphState::empty(window);
        for e in edges {
            g.insert(e)?;
        }
        Ok(g)
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn shared_window(&self) -> Arc<Window> {
        Arc::clone(&self.window)
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.edges.contains(&e)
    }

    /// Adds `e`; returns whether it was absent.
    pub fn insert(&mut self, e: Edge) -> Result<bool> {
        if !self.window.contains_edge(e) {
            return Err(Error::EdgeOutsideWindow(e));
        }
        if !self.edges.insert(e) {
            return Ok(false);
        }
        let (a, b) = e.endpoints();
        self.adjacency.entry(a).or_default().push(b);
        self.adjacency.entry(b).or_default().push(a);
        Ok(true)
    }

    /// Removes `e`; returns whether it was present.
    pub fn remove(&mut self, e: Edge) -> bool {
        if !self.edges.remove(&e) {
            return false;
        }
        let (a, b) = e.endpoints();
        for (v, w) in [(a, b), (b, a)] {
            let list = self.adjacency.get_mut(&v).expect("adjacency in sync");
            let pos = list.iter().position(|&u| u == w).expect("adjacency in sync");
            list.swap_remove(pos);
            if list.is_empty() {
                self.adjacency.remove(&v);
            }
        }
        true
    }

    /// `x^1_e`: the same graph with `e` present.
    pub fn with_edge(&self, e: Edge) -> Result<Self> {
        let mut g = self.clone();
        g.insert(e)?;
        Ok(g)
    }

    /// `x^0_e`: the same graph with `e` absent.
    pub fn without_edge(&self, e: Edge) -> Self {
        let mut g = self.clone();
        g.remove(e);
        g
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Neighbors of `v` in unspecified order.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        self.adjacency.get(&v).map_or(&[], Vec::as_slice)
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.neighbors(v).len()
    }

    /// Number of neighbors of `v` within L1 distance `k`.
    pub fn restricted_degree(&self, v: Vertex, k: u64) -> Result<usize> {
        if !self.window.contains(v) {
            return Err(Error::VertexOutsideWindow(v));
        }
        Ok(self.neighbors(v).iter().filter(|w| w.l1(v) <= k).count())
    }

    pub fn total_length(&self) -> u64 {
        self.edges.iter().map(|e| e.length()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: i64, y: i64) -> Vertex {
        Vertex::new(x, y)
    }

    fn e(a: Vertex, b: Vertex) -> Edge {
        Edge::new(a, b).unwrap()
    }

    #[test]
    fn insert_remove_keep_adjacency() {
        let w = Window::rect(0, 2, 0, 2).unwrap();
        let mut g = GraphState::empty(w);
        assert!(g.insert(e(v(0, 0), v(1, 0))).unwrap());
        assert!(!g.insert(e(v(1, 0), v(0, 0))).unwrap());
        g.insert(e(v(0, 0), v(2, 2))).unwrap();
        assert_eq!(g.degree(v(0, 0)), 2);
        assert!(g.remove(e(v(0, 0), v(1, 0))));
        assert!(!g.remove(e(v(0, 0), v(1, 0))));
        assert_eq!(g.neighbors(v(0, 0)), &[v(2, 2)]);
        assert_eq!(g.degree(v(1, 0)), 0);
        assert!(matches!(
            g.insert(e(v(0, 0), v(3, 0))),
            Err(Error::EdgeOutsideWindow(_))
        ));
    }

    #[test]
    fn restricted_degrees() {
        let w = Window::rect(-3, 3, -3, 3).unwrap();
        let c = v(0, 0);
        let empty = GraphState::empty(w.clone());
        assert_eq!(empty.restricted_degree(c, 3).unwrap(), 0);

        let star = GraphState::from_edges(
            w.clone(),
            [v(1, 0), v(-1, 0), v(0, 1), v(0, -1)].map(|u| e(c, u)),
        )
        .unwrap();
        assert_eq!(star.restricted_degree(c, 1).unwrap(), 4);

        let spread = GraphState::from_edges(w, [v(1, 0), v(1, 1), v(2, 1)].map(|u| e(c, u))).unwrap();
        assert_eq!(spread.restricted_degree(c, 2).unwrap(), 2);
        assert!(matches!(
            spread.restricted_degree(v(9, 9), 1),
            Err(Error::VertexOutsideWindow(_))
        ));
    }
}
