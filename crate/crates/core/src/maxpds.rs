//! Solvers for the maximum perfect dominated set problem.
//!
//! * [`exact_opt`]: exhaustive search over all `2^n` broadcast sets.
//! * [`local_search_maximal`]: single-vertex flips until no flip improves.
//! * [`approx_log`]: independent sampling at the probabilities
//!   `1, 1/2, 1/4, ..., 2^-ceil(log2 n)`; a vertex of degree `d` is perfectly
//!   dominated with constant probability at the scale closest to `1/(d+1)`.
//! * [`expected_value`] and [`derandomize`]: the closed form of `E|D(S)|`
//!   when each vertex joins `S` independently, and the method of conditional
//!   expectations over it.

use std::ops::Range;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::game::MixedProfile;
use crate::graph::{dominated_count, reception_value, Graph, VertexSet};

pub const DEFAULT_EXACT_LIMIT: usize = 26;
pub const DEFAULT_TRIALS_PER_SCALE: usize = 32;

/// Hard ceiling for mask-based enumeration, whatever limit the caller sets.
pub const MASK_ENUMERATION_CEILING: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    LocalSearch,
    Sampled,
    Derandomized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleOutcome {
    pub probability: f64,
    pub best_value: usize,
}

/// A broadcast set together with its reception value.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub best_set: VertexSet,
    pub best_value: usize,
    pub method: Method,
    pub scales_tried: Option<Vec<ScaleOutcome>>,
}

impl SolveResult {
    /// Evaluates `set` on `g`; the stored value is always recomputed here.
    pub fn new(g: &Graph, set: VertexSet, method: Method) -> Result<Self> {
        let best_value = reception_value(g, &set)?;
        Ok(SolveResult {
            best_set: set,
            best_value,
            method,
            scales_tried: None,
        })
    }
}

impl Serialize for SolveResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            method: Method,
            value: usize,
            set: Vec<usize>,
            #[serde(skip_serializing_if = "Option::is_none")]
            scales: Option<&'a [ScaleOutcome]>,
        }
        Wire {
            method: self.method,
            value: self.best_value,
            set: self.best_set.to_vec(),
            scales: self.scales_tried.as_deref(),
        }
        .serialize(serializer)
    }
}

/// Splits `0..2^n` into contiguous chunks for parallel enumeration.
pub(crate) fn mask_chunks(n: usize) -> Vec<Range<u64>> {
    let total = 1u64 << n;
    let chunk = 1u64 << n.min(16);
    (0..total / chunk).map(|c| c * chunk..(c + 1) * chunk).collect()
}

pub(crate) fn check_exhaustive(what: &'static str, n: usize, limit: usize) -> Result<()> {
    let limit_eff = limit.min(MASK_ENUMERATION_CEILING);
    if n > limit_eff {
        return Err(Error::LimitExceeded {
            what,
            size: n,
            limit: limit_eff,
        });
    }
    Ok(())
}

/// Maximum of `|D(S)|` over all `S`, with the smallest maximizing set.
pub fn exact_opt(g: &Graph, limit: usize) -> Result<SolveResult> {
    check_exhaustive("exhaustive MaxPDS search", g.n(), limit)?;
    let masks = g.neighbor_masks().expect("n <= 63 carries masks");
    let (value, mask) = mask_chunks(g.n())
        .into_par_iter()
        .map(|range| {
            let mut best = (0u32, range.start);
            for s in range {
                let v = dominated_count(masks, s);
                if v > best.0 {
                    best = (v, s);
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0u32, 0u64), |acc, b| if b.0 > acc.0 { b } else { acc });
    let set = VertexSet::from_mask(g.n(), mask);
    let result = SolveResult::new(g, set, Method::Exact)?;
    debug_assert_eq!(result.best_value, value as usize);
    Ok(result)
}

/// Improves `s0` by single-vertex additions and deletions until no flip
/// strictly increases `|D(S)|`.
///
/// Each pass scans the vertices in a fresh seeded random order and applies
/// the first improving flip.
pub fn local_search_maximal(g: &Graph, s0: &VertexSet, seed: u64) -> Result<SolveResult> {
    g.check_set(s0)?;
    let n = g.n();
    let mut set = s0.clone();
    let mut hits: Vec<usize> = (0..n)
        .map(|v| g.neighbors(v).iter().filter(|&&u| set.contains(u)).count())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();

    let gain = |set: &VertexSet, hits: &[usize], v: usize| -> isize {
        let in_set = set.contains(v);
        let own_before = (!in_set && hits[v] == 1) as isize;
        let own_after = (in_set && hits[v] == 1) as isize;
        let step: isize = if in_set { -1 } else { 1 };
        let mut delta = own_after - own_before;
        for &w in g.neighbors(v) {
            if set.contains(w) {
                continue;
            }
            let before = hits[w] as isize;
            delta += ((before + step) == 1) as isize - (before == 1) as isize;
        }
        delta
    };

    loop {
        order.shuffle(&mut rng);
        let Some(&v) = order.iter().find(|&&v| gain(&set, &hits, v) > 0) else {
            break;
        };
        let adding = !set.contains(v);
        set.toggle(v);
        for &w in g.neighbors(v) {
            if adding {
                hits[w] += 1;
            } else {
                hits[w] -= 1;
            }
        }
    }
    SolveResult::new(g, set, Method::LocalSearch)
}

/// True when no single addition or deletion increases `|D(s)|`.
pub fn is_maximal(g: &Graph, s: &VertexSet) -> Result<bool> {
    let base = reception_value(g, s)?;
    let mut t = s.clone();
    for v in 0..g.n() {
        t.toggle(v);
        let better = reception_value(g, &t)? > base;
        t.toggle(v);
        if better {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_profile(g: &Graph, p: &MixedProfile) -> Result<()> {
    if p.len() != g.n() {
        return Err(Error::invalid(format!(
            "mixed profile has {} entries for {} vertices",
            p.len(),
            g.n()
        )));
    }
    Ok(())
}

/// Probability that `v` is perfectly dominated when each vertex `u` joins
/// the broadcast set independently with probability `probs[u]`.
///
/// Evaluated by a running recurrence, so neighbours with `p = 1` need no
/// division.
pub(crate) fn reception_probability(g: &Graph, probs: &[f64], v: usize) -> f64 {
    let quiet = 1.0 - probs[v];
    if quiet == 0.0 {
        return 0.0;
    }
    quiet * exactly_one(g.neighbors(v).iter().map(|&u| probs[u]))
}

/// `sum_k q_k prod_{j != k} (1 - q_j)`: the chance that exactly one of the
/// independent events fires.
pub(crate) fn exactly_one(qs: impl Iterator<Item = f64>) -> f64 {
    // Running over the events: `none` = P(none so far), `one` = P(exactly one so far).
    let (mut none, mut one) = (1.0, 0.0);
    for q in qs {
        one = one * (1.0 - q) + none * q;
        none *= 1.0 - q;
    }
    one
}

/// `E|D(S)|` when each vertex joins `S` independently with its probability in `p`.
pub fn expected_value(g: &Graph, p: &MixedProfile) -> Result<f64> {
    check_profile(g, p)?;
    let probs = p.probs();
    Ok((0..g.n()).map(|v| reception_probability(g, probs, v)).sum())
}

/// Fixes vertices `0, 1, ..., n-1` in turn to whichever of 0 or 1 keeps the
/// conditional expectation larger (ties go to 0). The resulting set has
/// `|D(S)| >= expected_value(g, p)`.
pub fn derandomize(g: &Graph, p: &MixedProfile) -> Result<SolveResult> {
    check_profile(g, p)?;
    let mut probs = p.probs().to_vec();
    for v in 0..g.n() {
        // Only v and its neighbours see p_v change.
        let local = |probs: &[f64]| -> f64 {
            reception_probability(g, probs, v)
                + g.neighbors(v)
                    .iter()
                    .map(|&w| reception_probability(g, probs, w))
                    .sum::<f64>()
        };
        probs[v] = 0.0;
        let quiet = local(&probs);
        probs[v] = 1.0;
        let loud = local(&probs);
        if loud <= quiet {
            probs[v] = 0.0;
        }
    }
    let set = VertexSet::from_members(g.n(), (0..g.n()).filter(|&v| probs[v] == 1.0))?;
    SolveResult::new(g, set, Method::Derandomized)
}

/// The default sampling grid `2^-i` for `i = 0..=ceil(log2 n)`.
pub fn scale_grid(n: usize) -> Vec<f64> {
    let top = n.max(1).next_power_of_two().trailing_zeros();
    (0..=top).map(|i| 0.5f64.powi(i as i32)).collect()
}

/// Samples `trials_per_scale` sets at each probability of [`scale_grid`]
/// and returns the best one seen.
pub fn approx_log(g: &Graph, trials_per_scale: usize, seed: u64) -> Result<SolveResult> {
    approx_with_grid(g, &scale_grid(g.n()), trials_per_scale, seed)
}

/// [`approx_log`] over an explicit list of inclusion probabilities.
///
/// Trial `t` at grid position `i` draws from ChaCha8 seeded with `seed` on
/// stream `(i << 32) | t`, so the result does not depend on how trials are
/// scheduled across threads. Ties keep the smallest set.
pub fn approx_with_grid(
    g: &Graph,
    grid: &[f64],
    trials_per_scale: usize,
    seed: u64,
) -> Result<SolveResult> {
    if trials_per_scale == 0 {
        return Err(Error::invalid("trials per scale must be at least 1"));
    }
    if grid.is_empty() {
        return Err(Error::invalid("sampling grid is empty"));
    }
    if let Some(q) = grid.iter().find(|q| !(0.0..=1.0).contains(*q)) {
        return Err(Error::invalid(format!("grid probability {q} not in [0, 1]")));
    }
    let n = g.n();
    let jobs: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|i| (0..trials_per_scale).map(move |t| (i, t)))
        .collect();
    let samples: Vec<(usize, VertexSet)> = jobs
        .into_par_iter()
        .map(|(i, t)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(((i as u64) << 32) | t as u64);
            let q = grid[i];
            let mut s = VertexSet::empty(n);
            for v in 0..n {
                if rng.gen::<f64>() < q {
                    s.insert(v);
                }
            }
            let value = reception_value(g, &s).expect("sampled set matches graph");
            (value, s)
        })
        .collect();

    let better = |a: &(usize, VertexSet), b: &(usize, VertexSet)| a.0 > b.0 || (a.0 == b.0 && a.1 < b.1);
    let mut scales = Vec::with_capacity(grid.len());
    let mut best: Option<&(usize, VertexSet)> = None;
    for (i, chunk) in samples.chunks(trials_per_scale).enumerate() {
        let mut scale_best = &chunk[0];
        for s in &chunk[1..] {
            if better(s, scale_best) {
                scale_best = s;
            }
        }
        scales.push(ScaleOutcome {
            probability: grid[i],
            best_value: scale_best.0,
        });
        if best.is_none_or(|b| better(scale_best, b)) {
            best = Some(scale_best);
        }
    }
    let mut result = SolveResult::new(g, best.expect("grid is nonempty").1.clone(), Method::Sampled)?;
    result.scales_tried = Some(scales);
    Ok(result)
}
