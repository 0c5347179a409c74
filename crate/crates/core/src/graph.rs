//! Undirected simple graphs, vertex sets and perfect domination.

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Graphs with at most this many vertices also carry one `u64` neighbour
/// mask per vertex, which the exhaustive searches run on.
pub const MASK_VERTICES: usize = 64;

/// A subset of the vertices `0..n` of some graph, stored as a bit vector.
///
/// Sets are ordered by their integer encoding (vertex `i` is bit `i`), so
/// "smallest" means the highest differing vertex is absent.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    n: usize,
    words: Vec<u64>,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet {
            n,
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for v in 0..n {
            s.insert(v);
        }
        s
    }

    /// Builds a set over `0..n`; any member `>= n` is an error.
    pub fn from_members<I: IntoIterator<Item = usize>>(n: usize, members: I) -> Result<Self> {
        let mut s = Self::empty(n);
        for v in members {
            if v >= n {
                return Err(Error::invalid(format!(
                    "vertex {v} out of range for {n} vertices"
                )));
            }
            s.insert(v);
        }
        Ok(s)
    }

    /// Set whose members are the one bits of `mask`. Requires `n <= 64`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!(n <= 64, "mask sets hold at most 64 vertices");
        let mut s = Self::empty(n);
        if n > 0 {
            let keep = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            s.words[0] = mask & keep;
        }
        s
    }

    /// The integer encoding, when the set fits in one word.
    pub fn to_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    /// Size of the vertex universe this set lives in.
    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.n && self.words[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        assert!(v < self.n, "vertex {v} out of range");
        self.words[v / 64] |= 1 << (v % 64);
    }

    pub fn remove(&mut self, v: usize) {
        assert!(v < self.n, "vertex {v} out of range");
        self.words[v / 64] &= !(1 << (v % 64));
    }

    pub fn toggle(&mut self, v: usize) {
        assert!(v < self.n, "vertex {v} out of range");
        self.words[v / 64] ^= 1 << (v % 64);
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&v| self.contains(v))
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl Ord for VertexSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| {
            for (a, b) in self.words.iter().rev().zip(other.words.iter().rev()) {
                match a.cmp(b) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for VertexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// An undirected simple graph on the dense vertex ids `0..n`.
///
/// Neighbour lists are sorted. Construction rejects self-loops, duplicate
/// edges and out-of-range endpoints; a graph is immutable afterwards.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
    masks: Option<Vec<u64>>,
}

impl Graph {
    pub fn edgeless(n: usize) -> Self {
        Self::build(vec![Vec::new(); n], 0)
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!(
                    "edge {{{u}, {v}}} has an endpoint outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at vertex {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = (u.min(w[0]), u.max(w[0]));
                return Err(Error::invalid(format!("duplicate edge {{{a}, {b}}}")));
            }
        }
        Ok(Self::build(adj, edges.len()))
    }

    fn build(adj: Vec<Vec<usize>>, edge_count: usize) -> Self {
        let masks = (adj.len() <= MASK_VERTICES).then(|| {
            adj.iter()
                .map(|list| list.iter().fold(0u64, |m, &u| m | 1 << u))
                .collect()
        });
        Graph {
            adj,
            edge_count,
            masks,
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn isolated_vertices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.adj[v].is_empty()).collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.n() == 0 {
            return true;
        }
        let mut seen = vec![false; self.n()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n()
    }

    /// One neighbour mask per vertex, available when `n <= 64`.
    pub fn neighbor_masks(&self) -> Option<&[u64]> {
        self.masks.as_deref()
    }

    pub(crate) fn check_set(&self, s: &VertexSet) -> Result<()> {
        if s.universe() != self.n() {
            return Err(Error::invalid(format!(
                "vertex set over {} vertices used with a graph on {}",
                s.universe(),
                self.n()
            )));
        }
        Ok(())
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n())
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

/// Vertices outside `s` with exactly one neighbour in `s`.
pub fn perfectly_dominated(g: &Graph, s: &VertexSet) -> Result<VertexSet> {
    g.check_set(s)?;
    let mut out = VertexSet::empty(g.n());
    for v in 0..g.n() {
        if !s.contains(v) && hits(g, s, v) == 1 {
            out.insert(v);
        }
    }
    Ok(out)
}

/// `|D(s)|`: the number of successful receptions when exactly `s` broadcasts.
pub fn reception_value(g: &Graph, s: &VertexSet) -> Result<usize> {
    g.check_set(s)?;
    if let (Some(masks), Some(bits)) = (g.neighbor_masks(), s.to_mask()) {
        return Ok(dominated_count(masks, bits) as usize);
    }
    Ok((0..g.n())
        .filter(|&v| !s.contains(v) && hits(g, s, v) == 1)
        .count())
}

/// Number of neighbours of `v` in `s`, stopping once it reaches 2.
fn hits(g: &Graph, s: &VertexSet, v: usize) -> usize {
    let mut c = 0;
    for &u in g.neighbors(v) {
        if s.contains(u) {
            c += 1;
            if c > 1 {
                break;
            }
        }
    }
    c
}

/// Bit-parallel `|D(S)|` for `S` given as a mask.
#[inline]
pub(crate) fn dominated_count(masks: &[u64], s: u64) -> u32 {
    let mut count = 0;
    for (v, &m) in masks.iter().enumerate() {
        if s >> v & 1 == 0 && (m & s).count_ones() == 1 {
            count += 1;
        }
    }
    count
}

/// Instance families for [`generate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum GraphKind {
    /// `K_{1,n-1}` with centre 0.
    Star { n: usize },
    Path { n: usize },
    /// Requires `n >= 3`.
    Cycle { n: usize },
    Complete { n: usize },
    /// Erdős–Rényi `G(n, p)`, seeded.
    Gnp { n: usize, p: f64 },
    /// The equilibrium/maximality counterexample gadget, see
    /// [`crate::game::figure1_gadget`].
    Figure1 { c_size: usize },
}

/// Generates a graph of the given kind.
///
/// Only `Gnp` consumes the seed. Its PRNG is ChaCha8 seeded with
/// `seed_from_u64(seed)`; candidate edges `(u, v)`, `u < v`, are visited in
/// lexicographic order and each is kept when a fresh uniform `f64` in
/// `[0, 1)` is below `p`.
pub fn generate(kind: GraphKind, seed: u64) -> Result<Graph> {
    let need = |n: usize, min: usize| {
        if n < min {
            Err(Error::invalid(format!("{kind:?} needs n >= {min}")))
        } else {
            Ok(())
        }
    };
    match kind {
        GraphKind::Star { n } => {
            need(n, 1)?;
            let edges: Vec<_> = (1..n).map(|v| (0, v)).collect();
            Graph::from_edges(n, &edges)
        }
        GraphKind::Path { n } => {
            need(n, 1)?;
            let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
            Graph::from_edges(n, &edges)
        }
        GraphKind::Cycle { n } => {
            need(n, 3)?;
            let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
            edges.push((0, n - 1));
            Graph::from_edges(n, &edges)
        }
        GraphKind::Complete { n } => {
            need(n, 1)?;
            let edges: Vec<_> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .collect();
            Graph::from_edges(n, &edges)
        }
        GraphKind::Gnp { n, p } => {
            need(n, 1)?;
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(format!("edge probability {p} not in [0, 1]")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen::<f64>() < p {
                        edges.push((u, v));
                    }
                }
            }
            Graph::from_edges(n, &edges)
        }
        GraphKind::Figure1 { c_size } => Ok(crate::game::figure1_gadget(c_size)?.0),
    }
}
