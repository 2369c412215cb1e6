//! Genetic operators on connected graphs of fixed size.
//!
//! Mutation adds or removes edges depending on whether the graph's
//! algebraic connectivity is below or above the target's. The three
//! crossovers cut parents into two vertex groups, drop the edges between the
//! groups, recombine group-induced subgraphs and glue them back together with
//! random cross edges. Every output is repaired to be connected.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral::{self, Bisection};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MutationParams {
    /// Probability that a graph is mutated at all.
    pub alpha: f64,
    /// Edge operations per mutated graph.
    pub beta: usize,
    /// Below this algebraic connectivity, additions favor low-degree vertices.
    pub lambda2_threshold: f64,
}

impl Default for MutationParams {
    fn default() -> Self {
        MutationParams {
            alpha: 0.75,
            beta: 4,
            lambda2_threshold: 0.001,
        }
    }
}

impl MutationParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::param(format!("mutation rate must be in [0, 1], got {}", self.alpha)));
        }
        if self.beta == 0 {
            return Err(Error::param("mutation strength must be positive"));
        }
        if self.lambda2_threshold.is_nan() || self.lambda2_threshold <= 0.0 {
            return Err(Error::param("connectivity threshold must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum CrossoverVariant {
    /// Random vertex subsets of a shared size, at least `nu` on each side.
    Basic { nu: usize },
    /// Fiedler cut of one parent, rewired across the cut.
    Spectral1,
    /// Fiedler cuts of the whole population, recombined within size groups.
    Spectral2,
}

impl CrossoverVariant {
    pub const DEFAULT_NU: usize = 3;

    pub fn tag(&self) -> &'static str {
        match self {
            CrossoverVariant::Basic { .. } => "bc",
            CrossoverVariant::Spectral1 => "sc1",
            CrossoverVariant::Spectral2 => "sc2",
        }
    }

    pub fn from_tag(tag: &str, nu: usize) -> Result<Self> {
        match tag {
            "bc" => Ok(CrossoverVariant::Basic { nu }),
            "sc1" => Ok(CrossoverVariant::Spectral1),
            "sc2" => Ok(CrossoverVariant::Spectral2),
            other => Err(Error::param(format!("unknown crossover `{other}` (expected bc, sc1 or sc2)"))),
        }
    }

    pub fn apply<R: Rng + ?Sized>(&self, pop: &[Graph], rng: &mut R) -> Result<CrossoverOutput> {
        match *self {
            CrossoverVariant::Basic { nu } => basic_crossover(pop, nu, rng),
            CrossoverVariant::Spectral1 => spectral_crossover_1(pop, rng),
            CrossoverVariant::Spectral2 => spectral_crossover_2(pop, rng),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeBias {
    /// Probability proportional to degree.
    High,
    /// Probability proportional to 1/degree.
    Low,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MutationReport {
    pub mutated: bool,
    pub high_bias_additions: usize,
    pub low_bias_additions: usize,
    pub removals: usize,
    pub skipped: usize,
}

impl MutationReport {
    pub fn additions(&self) -> usize {
        self.high_bias_additions + self.low_bias_additions
    }
}

#[derive(Debug, Clone, Default)]
pub struct CrossoverOutput {
    pub children: Vec<Graph>,
    /// Edges added by connectivity repair, beyond the crossover budgets.
    pub repair_edges: usize,
}

/// Draws a vertex that still has a non-neighbor, weighted by its degree
/// (`High`) or inverse degree (`Low`). `None` if the graph is complete.
pub fn pick_biased_vertex<R: Rng + ?Sized>(g: &Graph, bias: DegreeBias, rng: &mut R) -> Option<usize> {
    let n = g.n();
    let weights: Vec<f64> = (0..n)
        .map(|v| {
            let k = g.degree(v);
            if k + 1 >= n {
                0.0
            } else {
                match bias {
                    DegreeBias::High => k as f64,
                    DegreeBias::Low => 1.0 / k.max(1) as f64,
                }
            }
        })
        .collect();
    WeightedIndex::new(&weights).ok().map(|w| w.sample(rng))
}

fn add_biased_edge<R: Rng + ?Sized>(g: &mut Graph, bias: DegreeBias, rng: &mut R) -> bool {
    let Some(u) = pick_biased_vertex(g, bias, rng) else {
        return false;
    };
    let others = g.non_neighbors(u);
    let v = *others.choose(rng).expect("picked vertex has a non-neighbor");
    g.add_edge(u, v).expect("non-neighbor pair is absent");
    true
}

fn remove_edge_keeping_connected<R: Rng + ?Sized>(g: &mut Graph, rng: &mut R) -> bool {
    let cap = 10 * g.edge_count();
    for _ in 0..cap {
        let (u, v) = g.edges()[rng.gen_range(0..g.edge_count())];
        g.remove_edge(u, v).expect("sampled edge exists");
        if g.is_connected() {
            return true;
        }
        g.add_edge(u, v).expect("undo of removal");
    }
    false
}

/// Algebraic-connectivity-controlled mutation.
pub fn mutate<R: Rng + ?Sized>(
    g: &Graph,
    target_lambda2: f64,
    params: &MutationParams,
    rng: &mut R,
) -> Result<Graph> {
    Ok(mutate_with_report(g, target_lambda2, params, rng)?.0)
}

pub fn mutate_with_report<R: Rng + ?Sized>(
    g: &Graph,
    target_lambda2: f64,
    params: &MutationParams,
    rng: &mut R,
) -> Result<(Graph, MutationReport)> {
    let mut report = MutationReport::default();
    if !rng.gen_bool(params.alpha) {
        return Ok((g.clone(), report));
    }
    report.mutated = true;
    let lambda2 = spectral::algebraic_connectivity(g)?;
    let mut out = g.clone();
    for _ in 0..params.beta {
        if lambda2 <= target_lambda2 {
            let bias = if lambda2 > params.lambda2_threshold && out.min_degree() >= 2 {
                DegreeBias::High
            } else {
                DegreeBias::Low
            };
            if add_biased_edge(&mut out, bias, rng) {
                match bias {
                    DegreeBias::High => report.high_bias_additions += 1,
                    DegreeBias::Low => report.low_bias_additions += 1,
                }
            } else {
                report.skipped += 1;
            }
        } else if remove_edge_keeping_connected(&mut out, rng) {
            report.removals += 1;
        } else {
            report.skipped += 1;
        }
    }
    Ok((out, report))
}

/// Inserts up to `budget` uniformly chosen absent pairs that cross `side`.
/// Returns the number inserted.
pub fn add_random_cross_edges<R: Rng + ?Sized>(
    g: &mut Graph,
    side: &[bool],
    budget: usize,
    rng: &mut R,
) -> usize {
    let n = g.n();
    let mut absent = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if side[u] != side[v] && !g.has_edge(u, v) {
                absent.push((u, v));
            }
        }
    }
    if budget >= absent.len() {
        for &(u, v) in &absent {
            g.add_edge(u, v).expect("absent pair");
        }
        return absent.len();
    }
    let mut picks = index::sample(rng, absent.len(), budget).into_vec();
    picks.sort_unstable();
    for i in picks {
        let (u, v) = absent[i];
        g.add_edge(u, v).expect("absent pair");
    }
    budget
}

/// Joins components with random edges, preferring pairs that cross `side`,
/// until the graph is connected. Returns the graph and the edges added.
pub fn repair_connectivity<R: Rng + ?Sized>(g: &Graph, side: &[bool], rng: &mut R) -> (Graph, usize) {
    let mut out = g.clone();
    let mut added = 0;
    loop {
        let (labels, count) = out.component_labels();
        if count <= 1 {
            return (out, added);
        }
        let n = out.n();
        let mut cross = Vec::new();
        let mut any = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if labels[u] != labels[v] {
                    if side[u] != side[v] {
                        cross.push((u, v));
                    } else {
                        any.push((u, v));
                    }
                }
            }
        }
        let pool = if cross.is_empty() { &any } else { &cross };
        let &(u, v) = pool.choose(rng).expect("disconnected graph has inter-component pairs");
        out.add_edge(u, v).expect("pairs in different components are absent");
        added += 1;
    }
}

/// Round-half-up average of two deleted-edge counts.
pub fn rounded_average(a: usize, b: usize) -> usize {
    (a + b).div_ceil(2)
}

fn membership(n: usize, set: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in set {
        m[v] = true;
    }
    m
}

/// Child laid out on `host`'s labels: `host`'s edges inside `host_keep`, plus
/// `donor`'s edges inside `donor_part` relabeled onto the complement of
/// `host_keep` (order-preserving).
fn splice(host: &Graph, host_keep: &[bool], donor: &Graph, donor_part: &[bool]) -> Graph {
    let n = host.n();
    let slots: Vec<usize> = (0..n).filter(|&v| !host_keep[v]).collect();
    let mut map = vec![usize::MAX; n];
    for (slot, v) in slots.iter().zip((0..n).filter(|&v| donor_part[v])) {
        map[v] = *slot;
    }
    let kept = host
        .edges()
        .iter()
        .copied()
        .filter(|&(u, v)| host_keep[u] && host_keep[v]);
    let moved = donor
        .edges()
        .iter()
        .filter(|&&(u, v)| donor_part[u] && donor_part[v])
        .map(|&(u, v)| (map[u], map[v]));
    Graph::from_edges(n, kept.chain(moved)).expect("spliced parts are disjoint")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairStats {
    pub deleted: (usize, usize),
    pub budget: usize,
    pub cross_added: (usize, usize),
    pub repair_edges: usize,
}

/// One basic-crossover mating on explicit vertex subsets of equal size.
/// `subset1` (in `p1`) is kept by the first child alongside the complement of
/// `subset2` taken from `p2`; the second child is the mirror image.
pub fn basic_crossover_pair<R: Rng + ?Sized>(
    p1: &Graph,
    p2: &Graph,
    subset1: &[usize],
    subset2: &[usize],
    rng: &mut R,
) -> Result<(Graph, Graph, PairStats)> {
    let n = p1.n();
    if p2.n() != n || subset1.len() != subset2.len() {
        return Err(Error::param("parents and subsets must have matching sizes"));
    }
    let in1 = membership(n, subset1);
    let in2 = membership(n, subset2);
    let d1 = p1.cut_size(&in1);
    let d2 = p2.cut_size(&in2);
    let budget = rounded_average(d1, d2);

    let out1: Vec<bool> = in1.iter().map(|&b| !b).collect();
    let out2: Vec<bool> = in2.iter().map(|&b| !b).collect();
    let mut c1 = splice(p1, &in1, p2, &out2);
    let mut c2 = splice(p2, &in2, p1, &out1);
    let a1 = add_random_cross_edges(&mut c1, &in1, budget, rng);
    let a2 = add_random_cross_edges(&mut c2, &in2, budget, rng);
    let (c1, r1) = repair_connectivity(&c1, &in1, rng);
    let (c2, r2) = repair_connectivity(&c2, &in2, rng);
    Ok((
        c1,
        c2,
        PairStats {
            deleted: (d1, d2),
            budget,
            cross_added: (a1, a2),
            repair_edges: r1 + r2,
        },
    ))
}

fn check_population(pop: &[Graph], min_n: usize) -> Result<usize> {
    let first = pop.first().ok_or_else(|| Error::param("empty population"))?;
    let n = first.n();
    if pop.iter().any(|g| g.n() != n) {
        return Err(Error::param("population graphs differ in size"));
    }
    if n < min_n {
        return Err(Error::param(format!("crossover needs n >= {min_n}, got {n}")));
    }
    Ok(n)
}

/// Basic crossover: `len/2` matings of uniformly drawn parent pairs.
pub fn basic_crossover<R: Rng + ?Sized>(pop: &[Graph], nu: usize, rng: &mut R) -> Result<CrossoverOutput> {
    let n = check_population(pop, 2)?;
    if !pop.len().is_multiple_of(2) {
        return Err(Error::param("basic crossover needs an even population"));
    }
    if nu < 1 || 2 * nu > n {
        return Err(Error::param(format!("minimal subgraph size {nu} incompatible with n = {n}")));
    }
    let mut out = CrossoverOutput::default();
    for _ in 0..pop.len() / 2 {
        let p1 = &pop[rng.gen_range(0..pop.len())];
        let p2 = &pop[rng.gen_range(0..pop.len())];
        let s = rng.gen_range(nu..=n - nu);
        let mut s1 = index::sample(rng, n, s).into_vec();
        let mut s2 = index::sample(rng, n, s).into_vec();
        s1.sort_unstable();
        s2.sort_unstable();
        let (c1, c2, stats) = basic_crossover_pair(p1, p2, &s1, &s2, rng)?;
        out.children.push(c1);
        out.children.push(c2);
        out.repair_edges += stats.repair_edges;
    }
    Ok(out)
}

/// Fiedler-cut rewiring of a single graph: cut edges are removed and the same
/// number of random cross pairs inserted.
pub fn spectral_rewire<R: Rng + ?Sized>(
    g: &Graph,
    bisection: &Bisection,
    rng: &mut R,
) -> (Graph, PairStats) {
    let side = bisection.side();
    let deleted = g.cut_size(&side);
    let mut child = splice(g, &side, g, &side.iter().map(|&b| !b).collect::<Vec<_>>());
    let added = add_random_cross_edges(&mut child, &side, deleted, rng);
    let (child, repairs) = repair_connectivity(&child, &side, rng);
    (
        child,
        PairStats {
            deleted: (deleted, deleted),
            budget: deleted,
            cross_added: (added, added),
            repair_edges: repairs,
        },
    )
}

/// Spectral crossover 1: `len` draws of a single parent, each rewired across
/// its Fiedler cut.
pub fn spectral_crossover_1<R: Rng + ?Sized>(pop: &[Graph], rng: &mut R) -> Result<CrossoverOutput> {
    check_population(pop, 4)?;
    let mut cuts: Vec<Option<Bisection>> = vec![None; pop.len()];
    let mut out = CrossoverOutput::default();
    for _ in 0..pop.len() {
        let i = rng.gen_range(0..pop.len());
        if cuts[i].is_none() {
            cuts[i] = Some(spectral::fiedler_bisection(&pop[i])?);
        }
        let (child, stats) = spectral_rewire(&pop[i], cuts[i].as_ref().expect("filled"), rng);
        out.children.push(child);
        out.repair_edges += stats.repair_edges;
    }
    Ok(out)
}

/// One parent's Fiedler cut, oriented as (smaller side, larger side).
#[derive(Debug, Clone)]
pub struct CutHalves {
    pub parent: usize,
    /// Membership of the smaller side (cluster_a on ties).
    pub small: Vec<bool>,
    pub deleted: usize,
}

impl CutHalves {
    pub fn from_bisection(parent: usize, g: &Graph, b: &Bisection) -> Self {
        let side = b.side();
        let a_small = b.cluster_a.len() <= b.cluster_b.len();
        let small = side.iter().map(|&s| s == a_small).collect();
        CutHalves {
            parent,
            small,
            deleted: g.cut_size(&side),
        }
    }

    pub fn small_size(&self) -> usize {
        self.small.iter().filter(|&&b| b).count()
    }
}

/// Joins the small side of `small_from` with the large side of `large_from`
/// on `large_from`'s vertex labels, then adds the rounded-average number of
/// random cross edges and repairs connectivity.
pub fn recombine_halves<R: Rng + ?Sized>(
    pop: &[Graph],
    small_from: &CutHalves,
    large_from: &CutHalves,
    rng: &mut R,
) -> (Graph, PairStats) {
    let host = &pop[large_from.parent];
    let donor = &pop[small_from.parent];
    let host_keep: Vec<bool> = large_from.small.iter().map(|&b| !b).collect();
    let mut child = splice(host, &host_keep, donor, &small_from.small);
    let budget = rounded_average(small_from.deleted, large_from.deleted);
    let added = add_random_cross_edges(&mut child, &host_keep, budget, rng);
    let (child, repairs) = repair_connectivity(&child, &host_keep, rng);
    (
        child,
        PairStats {
            deleted: (small_from.deleted, large_from.deleted),
            budget,
            cross_added: (added, added),
            repair_edges: repairs,
        },
    )
}

fn random_derangement<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..m).collect();
    if m < 2 {
        return perm;
    }
    loop {
        perm.shuffle(rng);
        if perm.iter().enumerate().all(|(i, &p)| i != p) {
            return perm;
        }
    }
}

/// Spectral crossover 2: every member is Fiedler-cut; halves are grouped by
/// the smaller side's size, and within a group each small half is matched to
/// another parent's large half by a random derangement.
pub fn spectral_crossover_2<R: Rng + ?Sized>(pop: &[Graph], rng: &mut R) -> Result<CrossoverOutput> {
    check_population(pop, 4)?;
    let mut groups: BTreeMap<usize, Vec<CutHalves>> = BTreeMap::new();
    for (i, g) in pop.iter().enumerate() {
        let b = spectral::fiedler_bisection(g)?;
        let halves = CutHalves::from_bisection(i, g, &b);
        groups.entry(halves.small_size()).or_default().push(halves);
    }
    let mut out = CrossoverOutput::default();
    for members in groups.values() {
        let perm = random_derangement(members.len(), rng);
        for (i, &j) in perm.iter().enumerate() {
            let (child, stats) = recombine_halves(pop, &members[i], &members[j], rng);
            out.children.push(child);
            out.repair_edges += stats.repair_edges;
        }
    }
    Ok(out)
}
