use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use super::clan::{sample_backward_clan, Clan, ClanOptions, Origin};
use crate::error::Result;
use crate::rng::replica_stream;
use crate::forward::Rectangle;
use crate::model::{EnergyModel, Edge, GraphState, Vertex, Window};

/// Runs the kept/erased test forward in time over the clan.
///
/// Returns one flag per clan rectangle, in clan order. Each rectangle's
/// own mark plays the role of the uniform variable of the test; marks are
/// independent of everything the backward construction looked at.
pub fn clean_clan(model: EnergyModel, beta: f64, clan: &Clan) -> Vec<bool> {
    let rects = clan.rectangles();
    let mut order: Vec<usize> = (0..rects.len()).collect();
    order.sort_by(|&i, &j| {
        rects[i].birth.total_cmp(&rects[j].birth).then(rects[i].basis.cmp(&rects[j].basis))
    });
    let mut kept = vec![false; rects.len()];
    // kept rectangles by endpoint; dead entries are pruned lazily since
    // births are visited in increasing order
    let mut alive: HashMap<Vertex, Vec<usize>> = HashMap::new();
    for &k in &order {
        let r = &rects[k];
        let t = r.birth;
        let (a, b) = r.basis.endpoints();
        let mut occupied = false;
        let mut around = |v: Vertex, other: Vertex, out: &mut Vec<Vertex>| {
            if let Some(list) = alive.get_mut(&v) {
                list.retain(|&j| rects[j].death() > t);
                for &j in list.iter() {
                    let w = rects[j].basis.other(v);
                    if w == other {
                        occupied = true;
                    } else {
                        out.push(w);
                    }
                }
            }
        };
        let mut na = Vec::new();
        let mut nb = Vec::new();
        around(a, b, &mut na);
        around(b, a, &mut nb);
        if occupied {
            continue;
        }
        let q = model.q_from_delta(beta, model.delta_from_neighbors(r.basis, &na, &nb));
        if r.mark < q {
            kept[k] = true;
            alive.entry(a).or_default().push(k);
            alive.entry(b).or_default().push(k);
        }
    }
    kept
}

/// One exact draw restricted to a window, with diagnostics of its clan.
#[derive(Clone, Debug)]
pub struct PerfectSample {
    /// Edges inside the window present at time 0.
    pub graph: GraphState,
    /// Every edge present at time 0 with at least one endpoint in the window.
    pub touching: Vec<Edge>,
    pub clan_size: usize,
    pub space_diameter: u64,
    pub time_length: f64,
    pub proposals: u64,
}

impl PerfectSample {
    /// Degree of `v` in the full sampled graph, counting edges that leave
    /// the window.
    pub fn degree(&self, v: Vertex) -> usize {
        self.touching.iter().filter(|e| e.contains(v)).count()
    }
}

/// Clan, cleaning and read-off in one go.
#[derive(Clone, Debug)]
pub struct CleanedClan {
    pub clan: Clan,
    pub kept: Vec<bool>,
}

impl CleanedClan {
    pub fn kept_rectangles(&self) -> impl Iterator<Item = &Rectangle> + '_ {
        self.clan.rectangles().iter().zip(&self.kept).filter(|(_, &k)| k).map(|(r, _)| r)
    }
}

pub fn sample_cleaned_clan<R: Rng>(
    model: EnergyModel,
    origin: &Origin,
    beta: f64,
    rng: &mut R,
    options: &ClanOptions,
) -> Result<CleanedClan> {
    let clan = sample_backward_clan(origin, beta, model.constant_m(), rng, options)?;
    let kept = clean_clan(model, beta, &clan);
    Ok(CleanedClan { clan, kept })
}

/// Draws the graph at time 0 on `window`.
pub fn perfect_sample<R: Rng>(
    model: EnergyModel,
    window: &Window,
    beta: f64,
    rng: &mut R,
    options: &ClanOptions,
) -> Result<PerfectSample> {
    let cleaned = sample_cleaned_clan(model, &Origin::Window(window.clone()), beta, rng, options)?;
    let mut graph = GraphState::empty(Arc::new(window.clone()));
    let mut touching = Vec::new();
    for r in cleaned.kept_rectangles() {
        if r.death() > 0.0 {
            let (a, b) = r.basis.endpoints();
            if window.contains(a) || window.contains(b) {
                touching.push(r.basis);
                if window.contains_edge(r.basis) {
                    graph.insert(r.basis).expect("edge inside window");
                }
            }
        }
    }
    touching.sort();
    Ok(PerfectSample {
        graph,
        touching,
        clan_size: cleaned.clan.len(),
        space_diameter: cleaned.clan.space_diameter(),
        time_length: cleaned.clan.time_length(),
        proposals: cleaned.clan.proposals(),
    })
}

/// `count` independent draws, replica `i` reading its own stream.
pub fn perfect_samples(
    model: EnergyModel,
    window: &Window,
    beta: f64,
    count: usize,
    seed: u64,
    options: &ClanOptions,
) -> Result<Vec<PerfectSample>> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| perfect_sample(model, window, beta, &mut replica_stream(seed, i), options))
        .collect()
}
