//! Reproducible random streams.
//!
//! Every random quantity is drawn from a ChaCha8 stream selected by a
//! 64-bit master seed and a 64-bit stream key. Keys are derived from a
//! purpose tag and the data the stream belongs to (edge coordinates,
//! replica index), so the numbers an edge sees do not depend on the order
//! in which edges are visited, and two processes built from the same
//! master seed share their rectangles exactly.
//!
//! Key derivation: start from the tag, then for every word `w` fold
//! `h = splitmix64(h ^ w)`. Signed coordinates are reinterpreted as `u64`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::Edge;

pub type StreamRng = ChaCha8Rng;

/// Purpose tags. Changing any of these changes every stream of that kind.
pub mod tag {
    pub const BIRTHS: u64 = 0x6269_7274_6873_0001;
    pub const INITIAL: u64 = 0x696e_6974_6961_0002;
    pub const REPLICA: u64 = 0x7265_706c_6963_0003;
    pub const CLAN: u64 = 0x636c_616e_0000_0004;
}

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_key(tag: u64, words: &[u64]) -> u64 {
    words.iter().fold(splitmix64(tag), |h, &w| splitmix64(h ^ w))
}

pub fn edge_key(tag: u64, e: Edge) -> u64 {
    let (a, b) = e.endpoints();
    derive_key(tag, &[a.x as u64, a.y as u64, b.x as u64, b.y as u64])
}

/// Stream `key` of the generator rooted at `master`.
pub fn stream(master: u64, key: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(key);
    rng
}

pub fn edge_stream(master: u64, tag: u64, e: Edge) -> StreamRng {
    stream(master, edge_key(tag, e))
}

/// Seed of replica `index`; replicas never share a stream with each other
/// or with the streams of the master seed itself.
pub fn replica_seed(master: u64, index: u64) -> u64 {
    derive_key(tag::REPLICA, &[master, index])
}

/// Stream owned by replica `index` of a batch rooted at `master`.
pub fn replica_stream(master: u64, index: u64) -> StreamRng {
    stream(replica_seed(master, index), derive_key(tag::CLAN, &[]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Vertex;
    use rand::Rng;

    #[test]
    fn edge_streams_are_reproducible_and_distinct() {
        let e = Edge::new(Vertex::new(0, 0), Vertex::new(1, 0)).unwrap();
        let f = Edge::new(Vertex::new(0, 0), Vertex::new(0, 1)).unwrap();
        let a: Vec<u64> = (0..4).map(|_| edge_stream(7, tag::BIRTHS, e).random()).collect();
        let mut s = edge_stream(7, tag::BIRTHS, e);
        let b: Vec<u64> = (0..4).map(|_| s.random()).collect();
        assert_eq!(a[0], b[0]);
        let mut t = edge_stream(7, tag::BIRTHS, f);
        assert_ne!(b[0], t.random::<u64>());
        let mut u = edge_stream(7, tag::INITIAL, e);
        assert_ne!(b[0], u.random::<u64>());
    }

    #[test]
    fn replica_seeds_differ() {
        let seeds: std::collections::BTreeSet<u64> = (0..1000).map(|i| replica_seed(1, i)).collect();
        assert_eq!(seeds.len(), 1000);
    }
}
