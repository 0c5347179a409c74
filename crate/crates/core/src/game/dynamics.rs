use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{check_len, first_deviator, StrategyProfile};
use crate::error::Result;
use crate::graph::Graph;

/// Which profitable deviator moves next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    /// Scan cyclically by index, resuming after the last player that moved.
    RoundRobin,
    /// Scan a fresh ChaCha8 permutation before every move.
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Dynamics {
    #[serde(serialize_with = "as_bits")]
    pub profile: StrategyProfile,
    pub converged: bool,
    pub flips: usize,
}

fn as_bits<S: serde::Serializer>(p: &StrategyProfile, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(p)
}

/// Best-response dynamics: one strictly profitable flip at a time.
///
/// Stops at a pure equilibrium (`converged`), after `max_rounds * n` flips,
/// or when a profile repeats.
pub fn best_response(
    g: &Graph,
    s0: &StrategyProfile,
    max_rounds: usize,
    order: Order,
) -> Result<Dynamics> {
    check_len(g, s0.len())?;
    let n = g.n();
    let budget = max_rounds.saturating_mul(n);
    let mut rng = match order {
        Order::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        Order::RoundRobin => None,
    };
    let mut perm: Vec<usize> = (0..n).collect();
    let mut cursor = 0;
    let mut profile = s0.clone();
    let mut seen = HashSet::from([profile.clone()]);
    let mut flips = 0;

    loop {
        let mover = match rng.as_mut() {
            Some(rng) => {
                perm.shuffle(rng);
                first_deviator(g, &profile, perm.iter().copied())
            }
            None => first_deviator(g, &profile, (0..n).map(|k| (cursor + k) % n)),
        };
        let Some(i) = mover else {
            return Ok(Dynamics {
                profile,
                converged: true,
                flips,
            });
        };
        if flips == budget {
            break;
        }
        profile.flip(i);
        flips += 1;
        cursor = (i + 1) % n;
        if !seen.insert(profile.clone()) {
            break;
        }
    }
    Ok(Dynamics {
        profile,
        converged: false,
        flips,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{enumerate_pure_nash, figure1_gadget, is_pure_nash, DEFAULT_PNE_LIMIT};
    use crate::graph::{generate, GraphKind};

    #[test]
    fn k2_converges_to_first_mover() {
        let g = generate(GraphKind::Complete { n: 2 }, 0).unwrap();
        let d = best_response(&g, &StrategyProfile::quiet(2), 10, Order::RoundRobin).unwrap();
        assert_eq!(d.profile.to_string(), "10");
        assert!(d.converged);
        assert_eq!(d.flips, 1);
    }

    #[test]
    fn equilibrium_start_is_fixed_point() {
        let g = generate(GraphKind::Star { n: 5 }, 0).unwrap();
        let s0 = StrategyProfile::from_mask(5, 1);
        for order in [Order::RoundRobin, Order::Random { seed: 4 }] {
            let d = best_response(&g, &s0, 10, order).unwrap();
            assert_eq!((d.profile.clone(), d.converged, d.flips), (s0.clone(), true, 0));
        }
    }

    #[test]
    fn gadget_dynamics_end_in_enumerated_equilibrium_or_stop() {
        let (g, _) = figure1_gadget(3).unwrap();
        let pne = enumerate_pure_nash(&g, DEFAULT_PNE_LIMIT).unwrap();
        for order in [Order::RoundRobin, Order::Random { seed: 1 }, Order::Random { seed: 2 }] {
            let d = best_response(&g, &StrategyProfile::quiet(g.n()), 50, order).unwrap();
            if d.converged {
                assert!(pne.contains(&d.profile));
                assert!(is_pure_nash(&g, &d.profile).unwrap().0);
            } else {
                assert!(d.flips <= 50 * g.n());
            }
        }
    }

    #[test]
    fn budget_caps_flips() {
        let g = generate(GraphKind::Complete { n: 2 }, 0).unwrap();
        let d = best_response(&g, &StrategyProfile::quiet(2), 0, Order::RoundRobin).unwrap();
        assert!(!d.converged);
        assert_eq!(d.flips, 0);
    }
}
