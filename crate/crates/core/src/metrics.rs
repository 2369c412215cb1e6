//! Non-spectral graph metrics and the gap-product diversity contribution.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Ac,
    Pl,
    Cc,
    Bc,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Ac, Metric::Pl, Metric::Cc, Metric::Bc];

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Ac => "ac",
            Metric::Pl => "pl",
            Metric::Cc => "cc",
            Metric::Bc => "bc",
        }
    }

    pub fn parse(s: &str) -> Result<Metric> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ac" => Ok(Metric::Ac),
            "pl" => Ok(Metric::Pl),
            "cc" => Ok(Metric::Cc),
            "bc" => Ok(Metric::Bc),
            other => Err(Error::param(format!("unknown metric `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub graph_id: String,
    pub ac: f64,
    pub pl: f64,
    pub cc: f64,
    pub bc: f64,
}

impl MetricSample {
    pub fn compute(graph_id: impl Into<String>, g: &Graph) -> Result<Self> {
        Ok(MetricSample {
            graph_id: graph_id.into(),
            ac: spectral::algebraic_connectivity(g)?,
            pl: average_path_length(g)?,
            cc: global_clustering(g),
            bc: average_betweenness(g)?,
        })
    }

    pub fn get(&self, m: Metric) -> f64 {
        match m {
            Metric::Ac => self.ac,
            Metric::Pl => self.pl,
            Metric::Cc => self.cc,
            Metric::Bc => self.bc,
        }
    }
}

fn bfs_distances(g: &Graph, s: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for v in g.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Mean hop distance over all unordered vertex pairs.
pub fn average_path_length(g: &Graph) -> Result<f64> {
    let n = g.n();
    if n < 2 {
        return Err(Error::param("path length needs at least two vertices"));
    }
    let mut total = 0usize;
    for s in 0..n {
        let dist = bfs_distances(g, s);
        for &d in &dist[s + 1..] {
            if d == usize::MAX {
                return Err(Error::Disconnected);
            }
            total += d;
        }
    }
    Ok(total as f64 / (n * (n - 1) / 2) as f64)
}

/// Transitivity: three times the triangle count over the number of paths of
/// length two. Zero when there are no such paths.
pub fn global_clustering(g: &Graph) -> f64 {
    let mut closed = 0usize;
    let mut triples = 0usize;
    for v in 0..g.n() {
        let k = g.degree(v);
        triples += k * k.saturating_sub(1) / 2;
        let nbrs: Vec<usize> = g.neighbors(v).collect();
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                if g.has_edge(a, b) {
                    closed += 1;
                }
            }
        }
    }
    // Each triangle is closed at each of its three corners.
    if triples == 0 {
        0.0
    } else {
        closed as f64 / triples as f64
    }
}

/// Per-vertex betweenness by dependency accumulation over BFS trees, each
/// unordered pair counted once, endpoints excluded, no normalization.
pub fn betweenness(g: &Graph) -> Result<Vec<f64>> {
    let n = g.n();
    let mut bc = vec![0.0; n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    for s in 0..n {
        sigma.fill(0.0);
        dist.fill(usize::MAX);
        delta.fill(0.0);
        preds.iter_mut().for_each(Vec::clear);
        order.clear();
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for w in g.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        if order.len() != n {
            return Err(Error::Disconnected);
        }
        while let Some(w) = order.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                bc[w] += delta[w];
            }
        }
    }
    bc.iter_mut().for_each(|b| *b /= 2.0);
    Ok(bc)
}

pub fn average_betweenness(g: &Graph) -> Result<f64> {
    let bc = betweenness(g)?;
    Ok(bc.iter().sum::<f64>() / bc.len() as f64)
}

/// Min-max normalized, sorted values and their gap-product contributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityReport {
    pub metric: Option<Metric>,
    /// Original sample index of each sorted entry.
    pub order: Vec<usize>,
    pub normalized: Vec<f64>,
    /// `f64::INFINITY` for the two extreme entries.
    pub contributions: Vec<f64>,
}

impl DiversityReport {
    /// Contributions of interior entries only.
    pub fn interior(&self) -> &[f64] {
        &self.contributions[1..self.contributions.len() - 1]
    }

    /// Contribution for the sample that was at index `i` in the input.
    pub fn contribution_of(&self, i: usize) -> f64 {
        let pos = self.order.iter().position(|&o| o == i).expect("index in sample");
        self.contributions[pos]
    }
}

/// Sorts the values, rescales them to `[0, 1]` and assigns each interior value
/// `(h_i - h_{i-1}) * (h_{i+1} - h_i)`. Ties keep input order.
pub fn diversity_contributions(values: &[f64]) -> Result<DiversityReport> {
    let r = values.len();
    if r < 3 {
        return Err(Error::param(format!("diversity needs at least 3 values, got {r}")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::param("diversity values must be finite"));
    }
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let lo = values[order[0]];
    let hi = values[order[r - 1]];
    let span = hi - lo;
    let normalized: Vec<f64> = order
        .iter()
        .map(|&i| if span > 0.0 { (values[i] - lo) / span } else { 0.0 })
        .collect();
    let mut contributions = vec![f64::INFINITY; r];
    for i in 1..r - 1 {
        contributions[i] = (normalized[i] - normalized[i - 1]) * (normalized[i + 1] - normalized[i]);
    }
    Ok(DiversityReport {
        metric: None,
        order,
        normalized,
        contributions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{make_circulant, make_star};

    #[test]
    fn path_length_examples() {
        for n in 2..8 {
            assert_eq!(average_path_length(&Graph::complete(n)).unwrap(), 1.0);
        }
        assert!((average_path_length(&Graph::path(4)).unwrap() - 10.0 / 6.0).abs() < 1e-15);
        let split = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(average_path_length(&split), Err(Error::Disconnected)));
    }

    #[test]
    fn star_path_length_closed_form() {
        for n in 5..=30 {
            let leaves = (n - 1) as f64;
            let want = (2.0 * leaves * (leaves - 1.0) / 2.0 + leaves) / (n * (n - 1) / 2) as f64;
            let got = average_path_length(&make_star(n).unwrap()).unwrap();
            assert!((got - want).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn clustering_examples() {
        assert_eq!(global_clustering(&Graph::complete(6)), 1.0);
        assert_eq!(global_clustering(&make_star(9).unwrap()), 0.0);
        assert_eq!(global_clustering(&Graph::from_edges(3, [(0, 1)]).unwrap()), 0.0);
    }

    #[test]
    fn clustering_c6_12_by_triples() {
        let g = make_circulant(6, &[1, 2]).unwrap();
        let mut tri = 0;
        let mut paths = 0;
        for a in 0..6 {
            for b in 0..6 {
                for c in 0..6 {
                    if a == b || b == c || a == c {
                        continue;
                    }
                    // Ordered path a-b-c centered at b.
                    if g.has_edge(a, b) && g.has_edge(b, c) {
                        paths += 1;
                        if g.has_edge(a, c) {
                            tri += 1;
                        }
                    }
                }
            }
        }
        let want = tri as f64 / paths as f64;
        assert!((global_clustering(&g) - want).abs() < 1e-15);
        // Octahedron: every neighborhood is a 4-cycle.
        assert!((want - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn betweenness_examples() {
        assert!(betweenness(&Graph::complete(6)).unwrap().iter().all(|&b| b == 0.0));
        assert_eq!(betweenness(&Graph::path(3)).unwrap(), vec![0.0, 1.0, 0.0]);
        assert!((average_betweenness(&Graph::path(3)).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let hub = betweenness(&make_star(6).unwrap()).unwrap();
        assert_eq!(hub[0], 10.0);
    }

    #[test]
    fn diversity_examples() {
        let r = diversity_contributions(&[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(r.interior(), &[0.25]);
        assert!(r.contributions[0].is_infinite() && r.contributions[2].is_infinite());

        let dup = diversity_contributions(&[3.0, 1.0, 2.0, 2.0, 7.0]).unwrap();
        assert_eq!(dup.contribution_of(2), 0.0);
        assert_eq!(dup.contribution_of(3), 0.0);

        let flat = diversity_contributions(&[4.0; 5]).unwrap();
        assert!(flat.interior().iter().all(|&c| c == 0.0));
        assert!(diversity_contributions(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn metric_names_round_trip() {
        for m in Metric::ALL {
            assert_eq!(Metric::parse(m.name()).unwrap(), m);
        }
        assert!(Metric::parse("xx").is_err());
    }
}
