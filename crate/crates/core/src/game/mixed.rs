//! Expected quantities of a mixed profile and the equilibrium inequalities.
//!
//! For a product distribution with broadcast probabilities `p`:
//!
//! * `alpha[i][j]`, for `j ∈ N(i)`: probability that `j` would hear `i` if
//!   `i` broadcast, `(1 - p_j) · prod_{k ∈ N(j) \ {i}} (1 - p_k)`.
//! * `S_i = sum_j alpha[i][j]`, `F_i = deg(i) - S_i`: expected successes and
//!   failures among `i`'s neighbours should `i` broadcast. Broadcasting pays
//!   `S_i - F_i` in expectation, staying quiet pays 0.
//! * `B = sum p_i`, `S = sum_i sum_{j ∈ N(i)} p_j alpha[j][i]`,
//!   `A = sum_i (1 - p_i) prod_{j ∈ N(i)} (1 - p_j)` and `F` (quiet vertices
//!   hearing two or more) partition the vertices in expectation:
//!   `B + S + F + A = n` for every profile.
//!
//! At a mixed equilibrium on a graph without isolated vertices:
//! `S_i >= F_i` and `S_i >= 1/2` whenever `p_i > 0`, `B <= 2S`, `F <= S`,
//! `A <= 0.9n + 2000 S^2`, hence `n <= 40 S + 20000 S^2`.

use serde::Serialize;

use super::{check_len, MixedProfile};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::maxpds::exactly_one;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexStats {
    /// `S_i`.
    pub successes: f64,
    /// `F_i`.
    pub failures: f64,
    /// Probability of neither broadcasting nor receiving anything.
    pub idle: f64,
    /// Probability of receiving exactly one message while quiet.
    pub success_prob: f64,
    /// `p_i (S_i - F_i)`.
    pub expected_utility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedStats {
    pub vertices: Vec<VertexStats>,
    /// Expected broadcasters.
    pub b: f64,
    /// Expected successful receptions.
    pub s: f64,
    /// Expected collisions, as the residual `n - B - S - A`.
    pub f: f64,
    /// Expected idle vertices.
    pub a: f64,
    /// Expected collisions summed vertex by vertex from
    /// `(1 - p_i)(1 - P(no neighbour broadcasts) - P(exactly one does))`.
    pub f_direct: f64,
}

impl MixedStats {
    /// `B + S + F + A` with the directly summed `F`.
    pub fn partition_total(&self) -> f64 {
        self.b + self.s + self.f_direct + self.a
    }
}

/// `hear[j][k]` is `alpha[N(j)[k]][j]`: the chance `j` hears its `k`-th
/// neighbour if that neighbour broadcasts.
fn hearing_probabilities(g: &Graph, p: &[f64]) -> Vec<Vec<f64>> {
    (0..g.n())
        .map(|j| {
            let nbrs = g.neighbors(j);
            let d = nbrs.len();
            // suffix[k] = prod_{k' >= k} (1 - p[N(j)[k']])
            let mut suffix = vec![1.0; d + 1];
            for k in (0..d).rev() {
                suffix[k] = suffix[k + 1] * (1.0 - p[nbrs[k]]);
            }
            let mut prefix = 1.0;
            let mut row = Vec::with_capacity(d);
            for k in 0..d {
                row.push((1.0 - p[j]) * prefix * suffix[k + 1]);
                prefix *= 1.0 - p[nbrs[k]];
            }
            row
        })
        .collect()
}

pub fn mixed_stats(g: &Graph, p: &MixedProfile) -> Result<MixedStats> {
    check_len(g, p.len())?;
    let p = p.probs();
    let n = g.n();
    let hear = hearing_probabilities(g, p);

    let mut vertices = Vec::with_capacity(n);
    let (mut b, mut s, mut a, mut f_direct) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let nbrs = g.neighbors(i);
        let successes: f64 = nbrs
            .iter()
            .map(|&j| {
                let k = g.neighbors(j).binary_search(&i).expect("adjacency is symmetric");
                hear[j][k]
            })
            .sum();
        let failures = nbrs.len() as f64 - successes;
        let silent_nbrs: f64 = nbrs.iter().map(|&j| 1.0 - p[j]).product();
        let idle = (1.0 - p[i]) * silent_nbrs;
        let success_prob: f64 = nbrs.iter().zip(&hear[i]).map(|(&j, &h)| p[j] * h).sum();
        let one = exactly_one(nbrs.iter().map(|&j| p[j]));
        f_direct += (1.0 - p[i]) * (1.0 - silent_nbrs - one);
        b += p[i];
        s += success_prob;
        a += idle;
        vertices.push(VertexStats {
            successes,
            failures,
            idle,
            success_prob,
            expected_utility: p[i] * (successes - failures),
        });
    }
    Ok(MixedStats {
        vertices,
        b,
        s,
        f: n as f64 - b - s - a,
        a,
        f_direct,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedNashCheck {
    pub nash: bool,
    /// `(vertex, S_i - F_i)` for every vertex whose probability is not a best
    /// response.
    pub violations: Vec<(usize, f64)>,
}

/// Sign conditions on `D_i = S_i - F_i`: `p_i = 1` needs `D_i >= -tol`,
/// `p_i = 0` needs `D_i <= tol`, and an interior `p_i` needs `|D_i| <= tol`.
pub fn is_mixed_nash(g: &Graph, p: &MixedProfile, tol: f64) -> Result<MixedNashCheck> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::invalid(format!("tolerance {tol} must be non-negative")));
    }
    let stats = mixed_stats(g, p)?;
    let violations: Vec<(usize, f64)> = stats
        .vertices
        .iter()
        .zip(p.probs())
        .enumerate()
        .filter_map(|(i, (v, &pi))| {
            let d = v.successes - v.failures;
            let ok = if pi == 1.0 {
                d >= -tol
            } else if pi == 0.0 {
                d <= tol
            } else {
                d.abs() <= tol
            };
            (!ok).then_some((i, d))
        })
        .collect();
    Ok(MixedNashCheck {
        nash: violations.is_empty(),
        violations,
    })
}

/// One inequality `lhs <= rhs`, evaluated with tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`; negative beyond the tolerance means the check failed.
    pub slack: f64,
    /// For per-vertex inequalities, the vertex with the least slack.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex: Option<usize>,
    pub holds: bool,
}

impl InequalityCheck {
    fn new(name: &'static str, lhs: f64, rhs: f64, vertex: Option<usize>, tol: f64) -> Self {
        InequalityCheck {
            name,
            lhs,
            rhs,
            slack: rhs - lhs,
            vertex,
            holds: lhs <= rhs + tol,
        }
    }

    /// Tightest instance of `lhs(i) <= rhs(i)` over the given vertices.
    fn per_vertex(
        name: &'static str,
        vertices: impl Iterator<Item = (usize, f64, f64)>,
        tol: f64,
    ) -> Self {
        let worst = vertices.min_by(|x, y| (x.2 - x.1).total_cmp(&(y.2 - y.1)));
        match worst {
            Some((i, lhs, rhs)) => Self::new(name, lhs, rhs, Some(i), tol),
            None => Self::new(name, 0.0, 0.0, None, tol),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaAudit {
    pub n: usize,
    pub stats: MixedStats,
    /// `|B + S + F + A - n| <= tol`; asserted for every profile.
    pub partition: InequalityCheck,
    /// Whether `p` passed [`is_mixed_nash`]; the remaining checks run only then.
    pub mixed_nash: bool,
    pub violations: Vec<(usize, f64)>,
    pub equilibrium_checks: Vec<InequalityCheck>,
}

impl LemmaAudit {
    pub fn all_hold(&self) -> bool {
        self.partition.holds && self.equilibrium_checks.iter().all(|c| c.holds)
    }
}

/// Evaluates the expectation identity for any `p`, and the equilibrium
/// inequalities when `p` is a mixed equilibrium within `tol`.
///
/// Isolated vertices are rejected: they never receive and never profit, so
/// they should be deleted first.
pub fn nash_lemma_audit(g: &Graph, p: &MixedProfile, tol: f64) -> Result<LemmaAudit> {
    if let Some(&v) = g.isolated_vertices().first() {
        return Err(Error::IsolatedVertex(v));
    }
    let check = is_mixed_nash(g, p, tol)?;
    let stats = mixed_stats(g, p)?;
    let n = g.n() as f64;
    let partition = {
        let diff = (stats.partition_total() - n).abs();
        InequalityCheck::new("|B + S + F + A - n| <= 0", diff, 0.0, None, tol)
    };

    let mut equilibrium_checks = Vec::new();
    if check.nash {
        let probs = p.probs();
        let active = || {
            stats
                .vertices
                .iter()
                .enumerate()
                .filter(move |(i, _)| probs[*i] > 0.0)
        };
        let s = stats.s;
        equilibrium_checks.extend([
            InequalityCheck::per_vertex(
                "F_i <= S_i where p_i > 0",
                active().map(|(i, v)| (i, v.failures, v.successes)),
                tol,
            ),
            InequalityCheck::per_vertex(
                "1/2 <= S_i where p_i > 0",
                active().map(|(i, v)| (i, 0.5, v.successes)),
                tol,
            ),
            InequalityCheck::new("B <= 2S", stats.b, 2.0 * s, None, tol),
            InequalityCheck::new("F <= S", stats.f_direct, s, None, tol),
            InequalityCheck::new("A <= 0.9n + 2000S^2", stats.a, 0.9 * n + 2000.0 * s * s, None, tol),
            InequalityCheck::new("n <= 40S + 20000S^2", n, 40.0 * s + 20000.0 * s * s, None, tol),
        ]);
    }
    Ok(LemmaAudit {
        n: g.n(),
        stats,
        partition,
        mixed_nash: check.nash,
        violations: check.violations,
        equilibrium_checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{utility, StrategyProfile};
    use crate::graph::{generate, reception_value, GraphKind};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn k2() -> Graph {
        generate(GraphKind::Complete { n: 2 }, 0).unwrap()
    }

    fn mixed(p: &[f64]) -> MixedProfile {
        MixedProfile::new(p.to_vec()).unwrap()
    }

    /// B, S, F, A by summing over all 2^n pure outcomes.
    fn enumerated(g: &Graph, p: &[f64]) -> [f64; 4] {
        let n = g.n();
        let mut acc = [0.0; 4];
        for code in 0..1u64 << n {
            let w: f64 = (0..n)
                .map(|v| if code >> v & 1 == 1 { p[v] } else { 1.0 - p[v] })
                .product();
            for v in 0..n {
                let c = g.neighbors(v).iter().filter(|&&u| code >> u & 1 == 1).count();
                let slot = match (code >> v & 1 == 1, c) {
                    (true, _) => 0,
                    (false, 1) => 1,
                    (false, 0) => 3,
                    (false, _) => 2,
                };
                acc[slot] += w;
            }
        }
        acc
    }

    #[test]
    fn k2_half_half() {
        let st = mixed_stats(&k2(), &mixed(&[0.5, 0.5])).unwrap();
        assert!((st.b - 1.0).abs() < 1e-15);
        assert!((st.s - 0.5).abs() < 1e-15);
        assert!(st.f.abs() < 1e-15 && st.f_direct.abs() < 1e-15);
        assert!((st.a - 0.5).abs() < 1e-15);
        assert!((st.partition_total() - 2.0).abs() < 1e-15);
        for v in &st.vertices {
            assert!((v.successes + v.failures - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn all_quiet() {
        let g = generate(GraphKind::Cycle { n: 5 }, 0).unwrap();
        let st = mixed_stats(&g, &mixed(&[0.0; 5])).unwrap();
        assert_eq!((st.b, st.s, st.f, st.a), (0.0, 0.0, 0.0, 5.0));
    }

    #[test]
    fn mixed_nash_examples() {
        assert!(is_mixed_nash(&k2(), &mixed(&[0.5, 0.5]), 1e-9).unwrap().nash);
        assert!(is_mixed_nash(&k2(), &mixed(&[1.0, 0.0]), 1e-9).unwrap().nash);
        let c = is_mixed_nash(&k2(), &mixed(&[0.3, 0.9]), 1e-9).unwrap();
        assert!(!c.nash);
        let vs: Vec<usize> = c.violations.iter().map(|v| v.0).collect();
        assert_eq!(vs, vec![0, 1]);
        assert!((c.violations[0].1 - (1.0 - 2.0 * 0.9)).abs() < 1e-12);
        assert!(is_mixed_nash(&k2(), &mixed(&[0.5, 0.5]), -1.0).is_err());
    }

    #[test]
    fn audit_k2() {
        let audit = nash_lemma_audit(&k2(), &mixed(&[0.5, 0.5]), 1e-9).unwrap();
        assert!(audit.mixed_nash && audit.all_hold());
        let b_check = audit.equilibrium_checks.iter().find(|c| c.name == "B <= 2S").unwrap();
        assert!(b_check.slack.abs() < 1e-12, "B <= 2S is tight at (1/2, 1/2)");

        let audit = nash_lemma_audit(&k2(), &mixed(&[1.0, 0.0]), 1e-9).unwrap();
        assert!(audit.all_hold());
        let si = &audit.equilibrium_checks[0];
        assert_eq!((si.vertex, si.lhs, si.rhs), (Some(0), 0.0, 1.0));
    }

    #[test]
    fn audit_skips_inequalities_off_equilibrium() {
        let audit = nash_lemma_audit(&k2(), &mixed(&[0.3, 0.9]), 1e-9).unwrap();
        assert!(!audit.mixed_nash);
        assert!(audit.equilibrium_checks.is_empty());
        assert!(audit.partition.holds);
    }

    #[test]
    fn audit_rejects_isolated_vertices() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert_eq!(
            nash_lemma_audit(&g, &mixed(&[0.5, 0.5, 0.0]), 1e-9),
            Err(Error::IsolatedVertex(2))
        );
    }

    #[test]
    fn integral_profiles_count_directly() {
        let g = generate(GraphKind::Gnp { n: 9, p: 0.4 }, 3).unwrap();
        for code in [0u64, 1, 0b1010_0110, 0x1ff] {
            let s = StrategyProfile::from_mask(9, code);
            let st = mixed_stats(&g, &MixedProfile::from_pure(&s)).unwrap();
            let hits = |v: usize| g.neighbors(v).iter().filter(|&&u| s.broadcasts(u)).count();
            let quiet = |v: usize| !s.broadcasts(v);
            assert_eq!(st.b, code.count_ones() as f64);
            assert_eq!(st.s, reception_value(&g, &s.broadcasters()).unwrap() as f64);
            assert_eq!(st.f_direct, (0..9).filter(|&v| quiet(v) && hits(v) >= 2).count() as f64);
            assert_eq!(st.a, (0..9).filter(|&v| quiet(v) && hits(v) == 0).count() as f64);
        }
    }

    #[test]
    fn expected_utility_matches_sampling() {
        let g = generate(GraphKind::Gnp { n: 7, p: 0.5 }, 21).unwrap();
        let p = [0.2, 0.7, 0.5, 0.1, 0.9, 0.35, 0.6];
        let st = mixed_stats(&g, &mixed(&p)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let samples = 100_000;
        let mut sum = [0.0; 7];
        let mut sq = [0.0; 7];
        for _ in 0..samples {
            let s = StrategyProfile::new(p.iter().map(|&q| rng.gen::<f64>() < q).collect());
            for i in 0..7 {
                let u = utility(&g, &s, i).unwrap() as f64;
                sum[i] += u;
                sq[i] += u * u;
            }
        }
        for i in 0..7 {
            let mean = sum[i] / samples as f64;
            let var = sq[i] / samples as f64 - mean * mean;
            let se = (var / samples as f64).sqrt();
            let want = st.vertices[i].expected_utility;
            assert!((mean - want).abs() <= 4.0 * se + 1e-12, "vertex {i}: {mean} vs {want}");
        }
    }

    proptest! {
        #[test]
        fn aggregates_match_enumeration(n in 1usize..=7, seed in any::<u64>(), p in proptest::collection::vec(prop_oneof![Just(0.0), Just(1.0), 0.0f64..=1.0], 7)) {
            let g = generate(GraphKind::Gnp { n, p: 0.5 }, seed).unwrap();
            let p = &p[..n];
            let st = mixed_stats(&g, &mixed(p)).unwrap();
            let [b, s, f, a] = enumerated(&g, p);
            prop_assert!((st.b - b).abs() < 1e-9);
            prop_assert!((st.s - s).abs() < 1e-9);
            prop_assert!((st.f_direct - f).abs() < 1e-9);
            prop_assert!((st.f - f).abs() < 1e-9);
            prop_assert!((st.a - a).abs() < 1e-9);
            prop_assert!((st.partition_total() - n as f64).abs() < 1e-9);
            for (i, v) in st.vertices.iter().enumerate() {
                prop_assert!((v.successes + v.failures - g.degree(i) as f64).abs() < 1e-12);
                prop_assert!(v.successes >= -1e-12 && v.idle >= 0.0);
            }
        }

        #[test]
        fn pure_equilibria_are_mixed_equilibria(n in 1usize..=8, seed in any::<u64>()) {
            let g = generate(GraphKind::Gnp { n, p: 0.4 }, seed).unwrap();
            for s in crate::game::enumerate_pure_nash(&g, 24).unwrap() {
                prop_assert!(is_mixed_nash(&g, &MixedProfile::from_pure(&s), 0.0).unwrap().nash);
            }
        }
    }
}
