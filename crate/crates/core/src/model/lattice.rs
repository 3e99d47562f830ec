//! Lattice geometry on Z^2 with the L1 metric.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub x: i64,
    pub y: i64,
}

impl Vertex {
    pub const fn new(x: i64, y: i64) -> Self {
        Vertex { x, y }
    }

    pub fn l1(self, other: Vertex) -> u64 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }

    pub fn translate(self, dx: i64, dy: i64) -> Vertex {
        Vertex::new(self.x + dx, self.y + dy)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Unordered pair of distinct vertices, stored with `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    a: Vertex,
    b: Vertex,
}

impl Edge {
    pub fn new(u: Vertex, v: Vertex) -> Result<Self> {
        match u.cmp(&v) {
            std::cmp::Ordering::Less => Ok(Edge { a: u, b: v }),
            std::cmp::Ordering::Greater => Ok(Edge { a: v, b: u }),
            std::cmp::Ordering::Equal => Err(Error::DegenerateEdge(u)),
        }
    }

    pub fn endpoints(self) -> (Vertex, Vertex) {
        (self.a, self.b)
    }

    pub fn contains(self, v: Vertex) -> bool {
        self.a == v || self.b == v
    }

    /// The endpoint that is not `v`. `v` must be an endpoint.
    pub fn other(self, v: Vertex) -> Vertex {
        debug_assert!(self.contains(v));
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }

    /// The dependence relation: the two edges share a vertex.
    pub fn relates(self, other: Edge) -> bool {
        self.contains(other.a) || self.contains(other.b)
    }

    pub fn length(self) -> u64 {
        self.a.l1(self.b)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.a, self.b)
    }
}

pub fn edge_length(e: Edge) -> u64 {
    e.length()
}

/// All vertices at L1 distance exactly `s` from `center`, counter-clockwise
/// starting from `center + (s, 0)`. Has exactly `4s` elements.
pub fn shell(center: Vertex, s: u64) -> Vec<Vertex> {
    (0..4 * s).map(|k| shell_point(center, s, k)).collect()
}

/// The `k`-th point (`0 <= k < 4s`) of [`shell`].
pub fn shell_point(center: Vertex, s: u64, k: u64) -> Vertex {
    debug_assert!(s >= 1 && k < 4 * s);
    let s = s as i64;
    let side = k as i64 / s;
    let t = k as i64 % s;
    let (dx, dy) = match side {
        0 => (s - t, t),
        1 => (-t, s - t),
        2 => (t - s, -t),
        _ => (t, t - s),
    };
    center.translate(dx, dy)
}

/// Minimum L1 distance between two vertex sets.
pub fn set_distance<'a>(
    left: impl IntoIterator<Item = &'a Vertex>,
    right: impl IntoIterator<Item = &'a Vertex> + Clone,
) -> Option<u64> {
    left.into_iter()
        .flat_map(|a| right.clone().into_iter().map(move |b| a.l1(*b)))
        .min()
}

/// Lower and upper corners of an axis-aligned box, inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub x0: i64,
    pub x1: i64,
    pub y0: i64,
    pub y1: i64,
}

/// A finite nonempty vertex set.
#[derive(Clone, Debug)]
pub struct Window {
    vertices: BTreeSet<Vertex>,
    bounds: Option<Bounds>,
}

impl PartialEq for Window {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
    }
}

impl Eq for Window {}

/// Boxes serialize as their corners, other windows as a vertex list.
impl Serialize for Window {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(rename_all = "lowercase")]
        enum Repr<'a> {
            Box(Bounds),
            Vertices(Vec<&'a Vertex>),
        }
        match self.bounds {
            Some(b) => Repr::Box(b).serialize(serializer),
            None => Repr::Vertices(self.vertices.iter().collect()).serialize(serializer),
        }
    }
}

impl Window {
    pub fn from_vertices(vertices: impl IntoIterator<Item = Vertex>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for v in vertices {
            if !set.insert(v) {
                return Err(Error::DuplicateVertex(v));
            }
        }
        if set.is_empty() {
            return Err(Error::EmptyWindow);
        }
        Ok(Window {
            vertices: set,
            bounds: None,
        })
    }

    /// The box `[x0, x1] x [y0, y1]`, inclusive.
    pub fn rect(x0: i64, x1: i64, y0: i64, y1: i64) -> Result<Self> {
        if x0 > x1 || y0 > y1 {
            return Err(Error::EmptyWindow);
        }
        let vertices = (x0..=x1)
            .flat_map(|x| (y0..=y1).map(move |y| Vertex::new(x, y)))
            .collect();
        Ok(Window {
            vertices,
            bounds: Some(Bounds { x0, x1, y0, y1 }),
        })
    }

    /// The L1 ball of radius `r` around `center`.
    pub fn ball(center: Vertex, r: u64) -> Self {
        let mut vertices = BTreeSet::from([center]);
        for s in 1..=r {
            vertices.extend(shell(center, s));
        }
        Window {
            vertices,
            bounds: None,
        }
    }

    pub fn bounding_box(&self) -> Bounds {
        if let Some(b) = self.bounds {
            return b;
        }
        let first = *self.vertices.iter().next().expect("nonempty");
        self.vertices.iter().fold(
            Bounds {
                x0: first.x,
                x1: first.x,
                y0: first.y,
                y1: first.y,
            },
            |b, v| Bounds {
                x0: b.x0.min(v.x),
                x1: b.x1.max(v.x),
                y0: b.y0.min(v.y),
                y1: b.y1.max(v.y),
            },
        )
    }

    /// Box around the bounding box of `self`, grown by `margin` on every side.
    pub fn expanded_box(&self, margin: u64) -> Window {
        let b = self.bounding_box();
        let m = margin as i64;
        Window::rect(b.x0 - m, b.x1 + m, b.y0 - m, b.y1 + m).expect("nonempty")
    }

    pub fn is_box(&self) -> bool {
        self.bounds.is_some()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        match self.bounds {
            Some(b) => v.x >= b.x0 && v.x <= b.x1 && v.y >= b.y0 && v.y <= b.y1,
            None => self.vertices.contains(&v),
        }
    }

    pub fn contains_edge(&self, e: Edge) -> bool {
        let (a, b) = e.endpoints();
        self.contains(a) && self.contains(b)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.vertices.iter().copied()
    }

    pub fn is_subset_of(&self, other: &Window) -> bool {
        self.vertices().all(|v| other.contains(v))
    }

    /// `E_V` in canonical order.
    pub fn edges(&self) -> Vec<Edge> {
        let vs: Vec<Vertex> = self.vertices().collect();
        let mut out = Vec::with_capacity(vs.len() * vs.len().saturating_sub(1) / 2);
        for (k, &a) in vs.iter().enumerate() {
            for &b in &vs[k + 1..] {
                out.push(Edge { a, b });
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        let n = self.len();
        n * n.saturating_sub(1) / 2
    }

    /// `d({v}, V^c)`: distance from `v` to the nearest vertex outside.
    pub fn distance_to_complement(&self, v: Vertex) -> u64 {
        if let Some(b) = self.bounds {
            if !self.contains(v) {
                return 0;
            }
            let inner = (v.x - b.x0).min(b.x1 - v.x).min(v.y - b.y0).min(b.y1 - v.y);
            return inner as u64 + 1;
        }
        if !self.contains(v) {
            return 0;
        }
        (1..)
            .find(|&s| shell(v, s).into_iter().any(|w| !self.contains(w)))
            .expect("finite window")
    }

    pub fn edge_distance_to_complement(&self, e: Edge) -> u64 {
        let (a, b) = e.endpoints();
        self.distance_to_complement(a)
            .min(self.distance_to_complement(b))
    }

    pub fn center(&self) -> Vertex {
        let b = self.bounding_box();
        let c = Vertex::new(b.x0 + (b.x1 - b.x0) / 2, b.y0 + (b.y1 - b.y0) / 2);
        if self.contains(c) {
            c
        } else {
            *self.vertices.iter().next().expect("nonempty")
        }
    }
}
