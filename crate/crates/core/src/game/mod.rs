//! The reception-capacity game.
//!
//! Every vertex is a player choosing to broadcast (1) or stay quiet (0).
//! A quiet player earns 0. A broadcaster `i` earns `|A_i| - |B_i|`, where
//! `A_i` are the quiet neighbours hearing exactly one broadcast and `B_i`
//! the rest of `N(i)` (broadcasting, or hearing two or more). The quality of
//! a profile is the number of successful receptions, `|D(S)|` of its
//! broadcast set, which no player optimizes directly.

mod dynamics;
mod gadget;
mod mixed;
mod poa;

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{reception_value, Graph, VertexSet};
use crate::maxpds::{check_exhaustive, mask_chunks};

pub use dynamics::{best_response, Dynamics, Order};
pub use gadget::{figure1_gadget, GadgetLabels};
pub use mixed::{
    is_mixed_nash, mixed_stats, nash_lemma_audit, InequalityCheck, LemmaAudit, MixedNashCheck,
    MixedStats, VertexStats,
};
pub use poa::{poa_report, PoaReport, Rational};

pub const DEFAULT_PNE_LIMIT: usize = 24;

/// One pure strategy per vertex; `true` broadcasts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StrategyProfile(Vec<bool>);

impl StrategyProfile {
    pub fn new(bits: Vec<bool>) -> Self {
        StrategyProfile(bits)
    }

    pub fn quiet(n: usize) -> Self {
        StrategyProfile(vec![false; n])
    }

    pub fn from_set(s: &VertexSet) -> Self {
        StrategyProfile((0..s.universe()).map(|v| s.contains(v)).collect())
    }

    /// Profile whose broadcasters are the one bits of `mask`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        StrategyProfile((0..n).map(|v| mask >> v & 1 == 1).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn broadcasts(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    pub fn broadcasters(&self) -> VertexSet {
        VertexSet::from_members(self.len(), (0..self.len()).filter(|&i| self.0[i]))
            .expect("indices are in range")
    }
}

impl fmt::Display for StrategyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Independent broadcast probabilities, one per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedProfile(Vec<f64>);

impl MixedProfile {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !(0.0..=1.0).contains(*p)) {
            return Err(Error::invalid(format!("probability {p} at vertex {i} not in [0, 1]")));
        }
        Ok(MixedProfile(probs))
    }

    pub fn uniform(n: usize, p: f64) -> Result<Self> {
        Self::new(vec![p; n])
    }

    pub fn from_pure(s: &StrategyProfile) -> Self {
        MixedProfile(s.bits().iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub(crate) fn check_len(g: &Graph, len: usize) -> Result<()> {
    if len != g.n() {
        return Err(Error::invalid(format!(
            "profile has {len} entries for {} vertices",
            g.n()
        )));
    }
    Ok(())
}

/// Number of broadcasting neighbours of every vertex.
fn broadcasting_neighbours(g: &Graph, s: &StrategyProfile) -> Vec<usize> {
    (0..g.n())
        .map(|j| g.neighbors(j).iter().filter(|&&u| s.broadcasts(u)).count())
        .collect()
}

/// Utility `i` would get by broadcasting, everyone else fixed as in `s`.
fn broadcast_payoff(g: &Graph, s: &StrategyProfile, hits: &[usize], i: usize) -> i64 {
    // Broadcasting adds one to each neighbour's count when i is currently quiet.
    let own = usize::from(!s.broadcasts(i));
    g.neighbors(i)
        .iter()
        .map(|&j| if !s.broadcasts(j) && hits[j] + own == 1 { 1 } else { -1 })
        .sum()
}

/// `u_i(s)`.
pub fn utility(g: &Graph, s: &StrategyProfile, i: usize) -> Result<i64> {
    check_len(g, s.len())?;
    if i >= g.n() {
        return Err(Error::invalid(format!("player {i} out of range 0..{}", g.n())));
    }
    if !s.broadcasts(i) {
        return Ok(0);
    }
    Ok(broadcast_payoff(g, s, &broadcasting_neighbours(g, s), i))
}

/// Number of successful receptions under `s`.
pub fn value(g: &Graph, s: &StrategyProfile) -> Result<usize> {
    check_len(g, s.len())?;
    reception_value(g, &s.broadcasters())
}

/// The first player with a strictly profitable unilateral flip, scanning in
/// `order`.
pub(crate) fn first_deviator(
    g: &Graph,
    s: &StrategyProfile,
    order: impl Iterator<Item = usize>,
) -> Option<usize> {
    let hits = broadcasting_neighbours(g, s);
    order.into_iter().find(|&i| {
        let payoff = broadcast_payoff(g, s, &hits, i);
        if s.broadcasts(i) {
            payoff < 0
        } else {
            payoff > 0
        }
    })
}

/// Whether `s` is a pure Nash equilibrium, with the smallest profitable
/// deviator when it is not.
pub fn is_pure_nash(g: &Graph, s: &StrategyProfile) -> Result<(bool, Option<usize>)> {
    check_len(g, s.len())?;
    let dev = first_deviator(g, s, 0..g.n());
    Ok((dev.is_none(), dev))
}

/// Pure Nash test on neighbour masks.
#[inline]
fn is_pure_nash_mask(masks: &[u64], s: u64) -> bool {
    let (mut zero, mut one) = (0u64, 0u64);
    for (j, &m) in masks.iter().enumerate() {
        match (m & s).count_ones() {
            0 => zero |= 1 << j,
            1 => one |= 1 << j,
            _ => {}
        }
    }
    let quiet = !s;
    for (i, &m) in masks.iter().enumerate() {
        let deg = m.count_ones();
        if s >> i & 1 == 1 {
            if 2 * (m & one & quiet).count_ones() < deg {
                return false;
            }
        } else if 2 * (m & zero & quiet).count_ones() > deg {
            return false;
        }
    }
    true
}

/// All pure Nash equilibria, ordered by their integer encoding (vertex `i`
/// is bit `i`).
pub fn enumerate_pure_nash(g: &Graph, limit: usize) -> Result<Vec<StrategyProfile>> {
    check_exhaustive("pure equilibrium enumeration", g.n(), limit)?;
    let masks = g.neighbor_masks().expect("n <= 63 carries masks");
    let found: Vec<Vec<u64>> = mask_chunks(g.n())
        .into_par_iter()
        .map(|range| range.filter(|&s| is_pure_nash_mask(masks, s)).collect())
        .collect();
    Ok(found
        .into_iter()
        .flatten()
        .map(|s| StrategyProfile::from_mask(g.n(), s))
        .collect())
}
