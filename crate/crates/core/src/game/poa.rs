use num_rational::Ratio;
use serde::Serialize;

use super::{enumerate_pure_nash, value, StrategyProfile};
use crate::error::Result;
use crate::graph::Graph;
use crate::maxpds::exact_opt;

/// An exact ratio in lowest terms, serialized as `{num, den}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Rational {
    pub num: u64,
    pub den: u64,
}

impl Rational {
    fn new(num: u64, den: u64) -> Self {
        let r = Ratio::new(num, den);
        Rational {
            num: *r.numer(),
            den: *r.denom(),
        }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Optimum versus the pure equilibria of one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoaReport {
    pub n: usize,
    pub opt: usize,
    #[serde(serialize_with = "profiles_as_bits")]
    pub pne_list: Vec<StrategyProfile>,
    pub pne_values: Vec<usize>,
    /// Set when the game has no pure equilibrium; the ratios are then absent.
    pub no_pne: bool,
    pub worst_pne_value: Option<usize>,
    pub best_pne_value: Option<usize>,
    /// `opt / worst`. Absent without equilibria or when the worst equilibrium
    /// has value 0 while `opt > 0`. `0/0` counts as 1.
    pub poa_ratio: Option<Rational>,
    /// `opt / best`, under the same conventions.
    pub pos_ratio: Option<Rational>,
    /// `n <= 40 S + 20000 S^2` with `S` the worst equilibrium value.
    pub worst_pne_bound_holds: Option<bool>,
}

fn profiles_as_bits<S: serde::Serializer>(
    list: &[StrategyProfile],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(list.iter().map(ToString::to_string))
}

fn ratio(opt: usize, eq: usize) -> Option<Rational> {
    match (opt, eq) {
        (0, 0) => Some(Rational { num: 1, den: 1 }),
        (_, 0) => None,
        _ => Some(Rational::new(opt as u64, eq as u64)),
    }
}

/// Exhaustive optimum and pure-equilibrium enumeration for one graph.
pub fn poa_report(g: &Graph, exact_limit: usize, pne_limit: usize) -> Result<PoaReport> {
    let opt = exact_opt(g, exact_limit)?.best_value;
    let pne_list = enumerate_pure_nash(g, pne_limit)?;
    let pne_values = pne_list
        .iter()
        .map(|s| value(g, s))
        .collect::<Result<Vec<_>>>()?;
    let worst = pne_values.iter().copied().min();
    let best = pne_values.iter().copied().max();
    let n = g.n() as f64;
    Ok(PoaReport {
        n: g.n(),
        opt,
        no_pne: pne_list.is_empty(),
        pne_list,
        pne_values,
        worst_pne_value: worst,
        best_pne_value: best,
        poa_ratio: worst.and_then(|w| ratio(opt, w)),
        pos_ratio: best.and_then(|b| ratio(opt, b)),
        worst_pne_bound_holds: worst.map(|w| {
            let s = w as f64;
            n <= 40.0 * s + 20000.0 * s * s
        }),
    })
}
