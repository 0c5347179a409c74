//! Unique coverage and its reduction to MaxPDS.
//!
//! An instance is a universe `0..m` and a list of subsets. A subcollection
//! uniquely covers an element when exactly one chosen set contains it.
//!
//! [`reduce`] builds the MaxPDS instance: one vertex per set (the `A`
//! side), `k` copies of one vertex per element (the `B` copies), each copy
//! wired to `A` by the incidence relation, and an apex adjacent to all of
//! `A`. Broadcasting the chosen sets plus the apex receives exactly
//! `k * unique_coverage(chosen) + (number of unchosen sets)` messages: every
//! element copy counts when its element is uniquely covered, and every quiet
//! set vertex hears only the apex.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::maxpds::check_exhaustive;

pub const DEFAULT_UCP_LIMIT: usize = 22;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UcpInstance {
    universe_size: usize,
    sets: Vec<Vec<usize>>,
}

impl UcpInstance {
    /// Sets keep their order and may repeat; each set is stored sorted.
    pub fn new(universe_size: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let mut sets = sets;
        for (i, set) in sets.iter_mut().enumerate() {
            set.sort_unstable();
            if let Some(&e) = set.iter().find(|&&e| e >= universe_size) {
                return Err(Error::invalid(format!(
                    "set {i} holds element {e} outside 0..{universe_size}"
                )));
            }
            if set.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("set {i} repeats an element")));
            }
        }
        Ok(UcpInstance {
            universe_size,
            sets,
        })
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    /// Total incidence count `sum |S_i|`.
    pub fn incidences(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }

    fn check_chosen(&self, chosen: &[usize]) -> Result<Vec<bool>> {
        let mut picked = vec![false; self.sets.len()];
        for &i in chosen {
            if i >= self.sets.len() {
                return Err(Error::invalid(format!(
                    "set index {i} out of range 0..{}",
                    self.sets.len()
                )));
            }
            if std::mem::replace(&mut picked[i], true) {
                return Err(Error::invalid(format!("set index {i} chosen twice")));
            }
        }
        Ok(picked)
    }
}

/// Number of elements contained in exactly one chosen set.
pub fn unique_coverage(inst: &UcpInstance, chosen: &[usize]) -> Result<usize> {
    inst.check_chosen(chosen)?;
    let mut count = vec![0u32; inst.universe_size];
    for &i in chosen {
        for &e in &inst.sets[i] {
            count[e] += 1;
        }
    }
    Ok(count.iter().filter(|&&c| c == 1).count())
}

/// Best unique coverage over all subcollections and the smallest witness
/// (set `i` is bit `i` of the compared integer).
pub fn exact_ucp(inst: &UcpInstance, limit: usize) -> Result<(usize, Vec<usize>)> {
    let s = inst.sets.len();
    check_exhaustive("exhaustive unique coverage search", s, limit)?;
    // Element membership as bit masks over set indices.
    let mut owners = vec![0u64; inst.universe_size];
    for (i, set) in inst.sets.iter().enumerate() {
        for &e in set {
            owners[e] |= 1 << i;
        }
    }
    let mut best = (0u32, 0u64);
    for chosen in 0..1u64 << s {
        let v = owners
            .iter()
            .filter(|&&o| (o & chosen).count_ones() == 1)
            .count() as u32;
        if v > best.0 {
            best = (v, chosen);
        }
    }
    let witness = (0..s).filter(|&i| best.1 >> i & 1 == 1).collect();
    Ok((best.0 as usize, witness))
}

/// The MaxPDS instance built from a unique coverage instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionOutput {
    #[serde(skip)]
    pub graph: Graph,
    pub k: usize,
    /// Vertex of each set, in set order.
    #[serde(rename = "a")]
    pub a_vertices: Vec<usize>,
    /// `b_copies[t][e]` is the vertex of element `e` in copy `t`.
    #[serde(rename = "b")]
    pub b_copies: Vec<Vec<usize>>,
    /// The apex adjacent to every set vertex.
    #[serde(rename = "v")]
    pub v_vertex: usize,
}

impl ReductionOutput {
    /// The JSON sidecar `{k, a, b, v}` accompanying the graph file.
    pub fn sidecar_json(&self) -> String {
        serde_json::to_string(self).expect("sidecar serializes")
    }
}

/// Builds the reduction with `k` element copies (default: the number of sets).
///
/// Vertices are numbered set vertices first, then copy 0 through copy `k-1`
/// in element order, then the apex.
pub fn reduce(inst: &UcpInstance, k: Option<usize>) -> Result<ReductionOutput> {
    let s = inst.sets.len();
    let m = inst.universe_size;
    if m == 0 || s == 0 {
        return Err(Error::invalid("reduction needs at least one element and one set"));
    }
    let k = k.unwrap_or(s);
    if k == 0 {
        return Err(Error::invalid("reduction needs k >= 1"));
    }
    let a_vertices: Vec<usize> = (0..s).collect();
    let b_copies: Vec<Vec<usize>> = (0..k)
        .map(|t| (0..m).map(|e| s + t * m + e).collect())
        .collect();
    let v_vertex = s + k * m;
    let mut edges = Vec::with_capacity(k * inst.incidences() + s);
    for (i, set) in inst.sets.iter().enumerate() {
        for copy in &b_copies {
            edges.extend(set.iter().map(|&e| (a_vertices[i], copy[e])));
        }
        edges.push((a_vertices[i], v_vertex));
    }
    let graph = Graph::from_edges(v_vertex + 1, &edges)?;
    Ok(ReductionOutput {
        graph,
        k,
        a_vertices,
        b_copies,
        v_vertex,
    })
}

/// Broadcast set for a subcollection: its set vertices plus the apex, and
/// the reception value that set achieves on the reduced graph.
pub fn lift_solution(
    inst: &UcpInstance,
    out: &ReductionOutput,
    chosen: &[usize],
) -> Result<(VertexSet, usize)> {
    if out.a_vertices.len() != inst.sets.len() {
        return Err(Error::invalid("reduction output does not belong to this instance"));
    }
    let unique = unique_coverage(inst, chosen)?;
    let members = chosen
        .iter()
        .map(|&i| out.a_vertices[i])
        .chain(std::iter::once(out.v_vertex));
    let broadcast = VertexSet::from_members(out.graph.n(), members)?;
    let predicted = out.k * unique + (inst.sets.len() - chosen.len());
    Ok((broadcast, predicted))
}
