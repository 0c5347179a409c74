//! Acceptance suite. Runs every criterion, prints one line each, and exits
//! non-zero if any failed.

use std::collections::BTreeSet;
use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rcap_core::game::{
    enumerate_pure_nash, figure1_gadget, is_pure_nash, mixed_stats, nash_lemma_audit, poa_report,
    utility, MixedProfile, StrategyProfile,
};
use rcap_core::graph::{generate, reception_value, GraphKind, VertexSet};
use rcap_core::maxpds::{
    approx_log, derandomize, exact_opt, expected_value, is_maximal, DEFAULT_EXACT_LIMIT,
};
use rcap_core::ucp::{exact_ucp, lift_solution, reduce, UcpInstance};
use rcap_core::Graph;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Adjacency matrix; the oracles below use only this.
fn matrix(g: &Graph) -> Vec<Vec<bool>> {
    let mut m = vec![vec![false; g.n()]; g.n()];
    for (u, v) in g.edges() {
        m[u][v] = true;
        m[v][u] = true;
    }
    m
}

fn naive_value(adj: &[Vec<bool>], s: &[bool]) -> usize {
    (0..adj.len())
        .filter(|&v| !s[v] && (0..adj.len()).filter(|&u| s[u] && adj[u][v]).count() == 1)
        .count()
}

fn naive_opt(adj: &[Vec<bool>]) -> usize {
    let n = adj.len();
    (0..1u32 << n)
        .map(|mask| {
            let s: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            naive_value(adj, &s)
        })
        .max()
        .unwrap_or(0)
}

fn naive_utility(adj: &[Vec<bool>], s: &[bool], i: usize) -> i64 {
    if !s[i] {
        return 0;
    }
    let n = adj.len();
    (0..n)
        .filter(|&j| adj[i][j])
        .map(|j| {
            let hits = (0..n).filter(|&k| s[k] && adj[k][j]).count();
            if !s[j] && hits == 1 {
                1
            } else {
                -1
            }
        })
        .sum()
}

fn naive_is_pne(adj: &[Vec<bool>], s: &[bool]) -> bool {
    (0..adj.len()).all(|i| {
        let mut t = s.to_vec();
        t[i] = !t[i];
        naive_utility(adj, &t, i) <= naive_utility(adj, s, i)
    })
}

fn graph_from_edge_mask(n: usize, mask: u64) -> Graph {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let edges: Vec<_> = pairs
        .iter()
        .enumerate()
        .filter(|(b, _)| mask >> b & 1 == 1)
        .map(|(_, &e)| e)
        .collect();
    Graph::from_edges(n, &edges).unwrap()
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let edges: Vec<_> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect::<Vec<_>>()
        .into_iter()
        .filter(|_| rng.gen::<f64>() < p)
        .collect();
    Graph::from_edges(n, &edges).unwrap()
}

const GRAPHS_PER_SIZE: usize = 500;

/// Connected labelled graphs on 2..=7 vertices: all of them while a size
/// has at most 500, otherwise 500 distinct ones drawn uniformly.
fn connected_graphs() -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut out = Vec::new();
    for n in 2..=7usize {
        let pairs = n * (n - 1) / 2;
        let all: Vec<u64> = if pairs <= 12 {
            (0..1u64 << pairs)
                .filter(|&m| graph_from_edge_mask(n, m).is_connected())
                .collect()
        } else {
            Vec::new()
        };
        let chosen: BTreeSet<u64> = if !all.is_empty() && all.len() <= GRAPHS_PER_SIZE {
            all.into_iter().collect()
        } else if !all.is_empty() {
            all.choose_multiple(&mut rng, GRAPHS_PER_SIZE).copied().collect()
        } else {
            let mut picked = BTreeSet::new();
            while picked.len() < GRAPHS_PER_SIZE {
                let m = rng.gen::<u64>() & ((1 << pairs) - 1);
                if graph_from_edge_mask(n, m).is_connected() {
                    picked.insert(m);
                }
            }
            picked
        };
        out.extend(chosen.into_iter().map(|m| graph_from_edge_mask(n, m)));
    }
    out
}

fn random_profile(rng: &mut ChaCha8Rng, n: usize, integral_share: f64) -> MixedProfile {
    let p = (0..n)
        .map(|_| {
            if rng.gen::<f64>() < integral_share {
                f64::from(u8::from(rng.gen::<bool>()))
            } else {
                rng.gen::<f64>()
            }
        })
        .collect();
    MixedProfile::new(p).unwrap()
}

fn expectation_pairs() -> Vec<(Graph, MixedProfile)> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    (0..100)
        .map(|_| {
            let n = rng.gen_range(1..=12);
            let p = rng.gen_range(0.1..0.7);
            let g = random_graph(&mut rng, n, p);
            let prof = random_profile(&mut rng, n, 0.2);
            (g, prof)
        })
        .collect()
}

fn c1_star_capacity() -> Outcome {
    for n in 3..=12 {
        let g = generate(GraphKind::Star { n }, 0).unwrap();
        let r = exact_opt(&g, DEFAULT_EXACT_LIMIT).unwrap();
        ensure(r.best_value == n - 1 && r.best_set.to_vec() == vec![0], || {
            format!("K_1,{}: value {} set {:?}", n - 1, r.best_value, r.best_set.to_vec())
        })?;
    }
    Ok("n = 3..=12, opt = n-1 at the centre".into())
}

fn c2_oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..200 {
        let n = rng.gen_range(1..=12);
        let p = if i % 2 == 0 { 0.2 } else { 0.5 };
        let g = random_graph(&mut rng, n, p);
        let r = exact_opt(&g, DEFAULT_EXACT_LIMIT).unwrap();
        let oracle = naive_opt(&matrix(&g));
        ensure(r.best_value == oracle, || {
            format!("instance {i} (n={n}): solver {} oracle {oracle}", r.best_value)
        })?;
    }
    Ok("200 instances agree".into())
}

fn c3_expectation() -> Outcome {
    const SAMPLES: usize = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut worst_z = 0.0f64;
    for (idx, (g, p)) in expectation_pairs().iter().enumerate() {
        let adj = matrix(g);
        let n = g.n();
        let e = expected_value(g, p).unwrap();
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        let mut s = vec![false; n];
        for _ in 0..SAMPLES {
            for (v, bit) in s.iter_mut().enumerate() {
                *bit = rng.gen::<f64>() < p.probs()[v];
            }
            let x = naive_value(&adj, &s) as f64;
            sum += x;
            sum_sq += x * x;
        }
        let mean = sum / SAMPLES as f64;
        let var = (sum_sq / SAMPLES as f64 - mean * mean).max(0.0);
        let se = (var / SAMPLES as f64).sqrt();
        let diff = (e - mean).abs();
        if se > 0.0 {
            worst_z = worst_z.max(diff / se);
        }
        ensure(diff <= 4.0 * se + 1e-9, || {
            format!("pair {idx}: exact {e}, Monte Carlo {mean} +- {se}")
        })?;

        let rounded: Vec<bool> = p.probs().iter().map(|&q| q >= 0.5).collect();
        let pure = MixedProfile::new(rounded.iter().map(|&b| f64::from(u8::from(b))).collect())
            .unwrap();
        let set = VertexSet::from_members(n, (0..n).filter(|&v| rounded[v])).unwrap();
        let exact = reception_value(g, &set).unwrap() as f64;
        let e_pure = expected_value(g, &pure).unwrap();
        ensure(e_pure == exact, || {
            format!("pair {idx}: integral expectation {e_pure} vs reception value {exact}")
        })?;
    }
    Ok(format!("100 pairs within 4 SE (max |z| = {worst_z:.2}); integral p exact"))
}

fn c4_derandomization() -> Outcome {
    let mut min_gap = f64::INFINITY;
    for (idx, (g, p)) in expectation_pairs().iter().enumerate() {
        let e = expected_value(g, p).unwrap();
        let r = derandomize(g, p).unwrap();
        ensure(r.best_value as f64 >= e - 1e-9, || {
            format!("pair {idx}: derandomized {} < expected {e}", r.best_value)
        })?;
        min_gap = min_gap.min(r.best_value as f64 - e);
    }
    Ok(format!("100 pairs, min value - E = {min_gap:.3}"))
}

fn c5_approximation() -> Outcome {
    const N: usize = 14;
    let log = (N as f64).log2().ceil() as usize;
    let mut passed = 0;
    let mut worst = f64::INFINITY;
    for seed in 0..100u64 {
        let g = generate(GraphKind::Gnp { n: N, p: 0.3 }, seed).unwrap();
        let opt = exact_opt(&g, DEFAULT_EXACT_LIMIT).unwrap().best_value;
        let got = approx_log(&g, 64, seed).unwrap().best_value;
        if (got * 2 * log) >= opt {
            passed += 1;
        }
        if opt > 0 {
            worst = worst.min(got as f64 / opt as f64);
        }
    }
    let line = format!("{passed}/100 reach opt/{}; worst value/opt = {worst:.3}", 2 * log);
    if passed >= 95 {
        Ok(line)
    } else {
        Err(line)
    }
}

/// Every multiset of `s` subsets of `0..m`.
fn ucp_instances(m: usize, s: usize) -> Vec<UcpInstance> {
    fn rec(start: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, top: usize) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for x in start..top {
            cur.push(x);
            rec(x, left - 1, cur, out, top);
            cur.pop();
        }
    }
    let mut combos = Vec::new();
    rec(0, s, &mut Vec::new(), &mut combos, 1 << m);
    combos
        .into_iter()
        .map(|c| {
            let sets = c
                .iter()
                .map(|&mask| (0..m).filter(|e| mask >> e & 1 == 1).collect())
                .collect();
            UcpInstance::new(m, sets).unwrap()
        })
        .collect()
}

fn naive_unique(inst: &UcpInstance, chosen: &[usize]) -> usize {
    (0..inst.universe_size())
        .filter(|e| chosen.iter().filter(|&&i| inst.sets()[i].contains(e)).count() == 1)
        .count()
}

fn c6_reduction() -> Outcome {
    const OPT_CHECK_LIMIT: usize = 20;
    let (mut instances, mut checked_opt, mut lifts) = (0, 0, 0);
    for m in 1..=4 {
        for s in 1..=3 {
            for inst in ucp_instances(m, s) {
                instances += 1;
                let (ucp_opt, _) = exact_ucp(&inst, 22).unwrap();
                for k in [1, s] {
                    let out = reduce(&inst, Some(k)).unwrap();
                    let mut best_lift = 0;
                    for mask in 0..1u32 << s {
                        let chosen: Vec<usize> = (0..s).filter(|i| mask >> i & 1 == 1).collect();
                        let (set, predicted) = lift_solution(&inst, &out, &chosen).unwrap();
                        let actual = reception_value(&out.graph, &set).unwrap();
                        let formula = k * naive_unique(&inst, &chosen) + (s - chosen.len());
                        lifts += 1;
                        ensure(actual == formula && predicted == formula, || {
                            format!(
                                "m={m} sets={:?} k={k} chosen={chosen:?}: value {actual}, formula {formula}",
                                inst.sets()
                            )
                        })?;
                        best_lift = best_lift.max(actual);
                    }
                    ensure(best_lift >= k * ucp_opt, || {
                        format!("sets={:?} k={k}: best lift {best_lift} < k*ucp", inst.sets())
                    })?;
                    if out.graph.n() <= OPT_CHECK_LIMIT {
                        let opt = exact_opt(&out.graph, OPT_CHECK_LIMIT).unwrap().best_value;
                        checked_opt += 1;
                        ensure(opt >= k * ucp_opt, || {
                            format!("sets={:?} k={k}: opt {opt} < k*ucp {}", inst.sets(), k * ucp_opt)
                        })?;
                    }
                }
            }
        }
    }
    Ok(format!(
        "{instances} instances, {lifts} lifts exact; opt >= k*ucp solved directly on {checked_opt} graphs"
    ))
}

fn c7_partition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let n = rng.gen_range(1..=12);
        let density = rng.gen_range(0.1..0.9);
        let g = random_graph(&mut rng, n, density);
        let p = random_profile(&mut rng, n, 0.3);
        let st = mixed_stats(&g, &p).unwrap();
        let err = (st.partition_total() - n as f64).abs();
        worst = worst.max(err);
        ensure(err <= 1e-9, || format!("profile {i}: |B+S+F+A-n| = {err:e}"))?;
    }
    Ok(format!("1000 profiles, max error {worst:.1e}"))
}

fn c8_equilibrium_inequalities(graphs: &[Graph]) -> Outcome {
    let k2 = generate(GraphKind::Complete { n: 2 }, 0).unwrap();
    let half = MixedProfile::new(vec![0.5, 0.5]).unwrap();
    let audit = nash_lemma_audit(&k2, &half, 1e-9).unwrap();
    ensure(audit.mixed_nash && audit.all_hold(), || {
        format!("K_2 at (1/2, 1/2): {audit:?}")
    })?;
    let mut equilibria = 0;
    for g in graphs {
        let adj = matrix(g);
        let n = g.n();
        let pnes = enumerate_pure_nash(g, 24).unwrap();
        let oracle = (0..1u32 << n)
            .filter(|mask| {
                let s: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
                naive_is_pne(&adj, &s)
            })
            .count();
        ensure(pnes.len() == oracle, || {
            format!("{:?}: {} equilibria enumerated, oracle {oracle}", g.edges().collect::<Vec<_>>(), pnes.len())
        })?;
        for s in &pnes {
            equilibria += 1;
            let a = nash_lemma_audit(g, &MixedProfile::from_pure(s), 1e-9).unwrap();
            ensure(a.mixed_nash && a.all_hold() && a.equilibrium_checks.len() == 6, || {
                let failed: Vec<_> = a.equilibrium_checks.iter().filter(|c| !c.holds).collect();
                format!("profile {s} on {:?}: {failed:?}", g.edges().collect::<Vec<_>>())
            })?;
        }
    }
    Ok(format!("K_2 mixed plus {equilibria} pure equilibria on {} graphs", graphs.len()))
}

fn c9_gadget() -> Outcome {
    let (g, l) = figure1_gadget(10).unwrap();
    let n = g.n();
    let profile = |members: &[usize]| {
        StrategyProfile::from_set(&VertexSet::from_members(n, members.iter().copied()).unwrap())
    };
    let pair = profile(&[l.a1, l.a2]);
    let triple = profile(&[l.a1, l.a2, l.b1]);
    ensure(is_pure_nash(&g, &pair).unwrap().0, || "(a) {a1,a2} is not a PNE".into())?;
    let (v2, v3) = (
        reception_value(&g, &pair.broadcasters()).unwrap(),
        reception_value(&g, &triple.broadcasters()).unwrap(),
    );
    ensure(v2 == 20 && v3 == 21, || format!("(b) values {v2}, {v3}"))?;
    ensure(is_maximal(&g, &triple.broadcasters()).unwrap(), || "(c) not maximal".into())?;
    ensure(!is_pure_nash(&g, &triple).unwrap().0, || "(c) {a1,a2,b1} is a PNE".into())?;
    ensure(utility(&g, &triple, l.b1).unwrap() < 0, || "(c) b1 gains".into())?;
    let start = Instant::now();
    let all = enumerate_pure_nash(&g, 24).unwrap();
    ensure(all == vec![pair.clone()], || {
        format!("(d) equilibria {:?}", all.iter().map(ToString::to_string).collect::<Vec<_>>())
    })?;
    Ok(format!(
        "(a)-(c) hold; (d) 2^24 profiles, unique PNE {{a1,a2}} in {:.1}s",
        start.elapsed().as_secs_f64()
    ))
}

fn c10_poa(graphs: &[Graph]) -> Outcome {
    let (mut with_pne, mut max_scaled) = (0, 0.0f64);
    for g in graphs {
        let r = poa_report(g, DEFAULT_EXACT_LIMIT, 24).unwrap();
        if r.no_pne {
            continue;
        }
        with_pne += 1;
        let ratio = r.poa_ratio.ok_or_else(|| format!("infinite ratio on {:?}", r))?;
        ensure(r.worst_pne_bound_holds == Some(true), || format!("bound fails: {r:?}"))?;
        let w = r.worst_pne_value.unwrap() as f64;
        ensure((g.n() as f64) <= 40.0 * w + 20000.0 * w * w, || format!("bound fails: {r:?}"))?;
        max_scaled = max_scaled.max(ratio.to_f64() / (g.n() as f64).sqrt());
    }
    Ok(format!("{with_pne} graphs with equilibria; max poa/sqrt(n) = {max_scaled:.3}"))
}

fn c11_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("g.txt");
    let gen = rcap_cli::run(["rcap", "gen", "gnp", "--n", "16", "--p", "0.3", "--seed", "5"]);
    ensure(gen.code == 0, || gen.stderr.clone())?;
    fs::write(&path, &gen.stdout).map_err(|e| e.to_string())?;
    let g = path.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["gen", "gnp", "--n", "30", "--p", "0.2", "--seed", "9", "--format", "json"],
        vec!["solve", "local", g, "--seed", "11"],
        vec!["solve", "approx", g, "--seed", "11", "--trials", "50"],
        vec!["game", "dynamics", g, "--order", "random", "--seed", "11"],
    ];
    for cmd in &commands {
        let mut outputs = Vec::new();
        for workers in ["1", "2", "4"] {
            let mut args = vec!["rcap", "--workers", workers];
            args.extend(cmd);
            let o = rcap_cli::run(args);
            ensure(o.code == 0, || format!("{cmd:?}: {}", o.stderr))?;
            outputs.push(o.stdout);
        }
        ensure(outputs.windows(2).all(|w| w[0] == w[1]), || {
            format!("{cmd:?} differs across worker counts")
        })?;
    }
    Ok(format!("{} randomized commands identical at 1, 2 and 4 workers", commands.len()))
}

fn main() -> ExitCode {
    let graphs = connected_graphs();
    let criteria: Vec<Criterion> = vec![
        ("1 star capacity", Box::new(c1_star_capacity)),
        ("2 oracle equivalence", Box::new(c2_oracle_equivalence)),
        ("3 expectation engine", Box::new(c3_expectation)),
        ("4 derandomization dominance", Box::new(c4_derandomization)),
        ("5 approximation quality", Box::new(c5_approximation)),
        ("6 reduction identity", Box::new(c6_reduction)),
        ("7 partition identity", Box::new(c7_partition)),
        ("8 equilibrium inequalities", Box::new(|| c8_equilibrium_inequalities(&graphs))),
        ("9 gadget counterexample", Box::new(c9_gadget)),
        ("10 anarchy ratio", Box::new(|| c10_poa(&graphs))),
        ("11 determinism", Box::new(c11_determinism)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {name}: PASS ({secs:.1}s) {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL ({secs:.1}s) {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
