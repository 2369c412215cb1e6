//! Fixed-size undirected simple graphs.
//!
//! A [`Graph`] keeps two synchronized views of its edge set: a sorted list of
//! unordered pairs `(i, j)` with `i < j`, and one adjacency bitmap per vertex.
//! The list gives deterministic iteration order and uniform edge sampling; the
//! bitmaps give constant-time adjacency tests. The vertex count never changes
//! after construction.

use std::collections::hash_map::DefaultHasher;
use std::collections::VecDeque;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
    degrees: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges)
            .finish()
    }
}

/// Degree sequence of a graph, indexed by vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeView {
    pub degrees: Vec<usize>,
}

impl DegreeView {
    pub fn sum(&self) -> usize {
        self.degrees.iter().sum()
    }

    pub fn min(&self) -> usize {
        self.degrees.iter().copied().min().unwrap_or(0)
    }

    pub fn max(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn mean(&self) -> f64 {
        self.sum() as f64 / self.degrees.len() as f64
    }
}

#[inline]
fn ordered(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    ///
    /// Panics if `n == 0`.
    pub fn empty(n: usize) -> Self {
        assert!(n > 0, "graph must have at least one vertex");
        let words = n.div_ceil(WORD);
        Graph {
            n,
            words,
            bits: vec![0; n * words],
            degrees: vec![0; n],
            edges: Vec::new(),
        }
    }

    /// Builds a graph from unordered pairs. Pairs may be given in either
    /// orientation; self-loops, duplicates and out-of-range vertices are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(Error::param("graph must have at least one vertex"));
        }
        let mut g = Graph::empty(n);
        for (u, v) in edges {
            g.check_pair(u, v)?;
            if g.has_edge(u, v) {
                let (a, b) = ordered(u, v);
                return Err(Error::DuplicateEdge(a, b));
            }
            g.set_bit(u, v, true);
            g.edges.push(ordered(u, v));
        }
        g.edges.sort_unstable();
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.set_bit(u, v, true);
                g.edges.push((u, v));
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path edges are valid")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle edges are valid")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(i, j)` with `i < j`, ascending lexicographic order.
    #[inline]
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && (self.bits[u * self.words + v / WORD] >> (v % WORD)) & 1 == 1
    }

    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        self.degrees[u]
    }

    pub fn degree_view(&self) -> DegreeView {
        DegreeView {
            degrees: self.degrees.clone(),
        }
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn min_degree(&self) -> usize {
        self.degrees.iter().copied().min().unwrap_or(0)
    }

    pub fn max_edges(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    /// Neighbors of `u` in ascending order.
    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        let row = &self.bits[u * self.words..(u + 1) * self.words];
        row.iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    None
                } else {
                    let bit = word.trailing_zeros() as usize;
                    word &= word - 1;
                    Some(w * WORD + bit)
                }
            })
        })
    }

    /// All `v != u` not adjacent to `u`, ascending.
    pub fn non_neighbors(&self, u: usize) -> Vec<usize> {
        (0..self.n).filter(|&v| v != u && !self.has_edge(u, v)).collect()
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        self.check_pair(u, v)?;
        let e = ordered(u, v);
        match self.edges.binary_search(&e) {
            Ok(_) => Err(Error::DuplicateEdge(e.0, e.1)),
            Err(pos) => {
                self.edges.insert(pos, e);
                self.set_bit(u, v, true);
                Ok(())
            }
        }
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> Result<()> {
        self.check_pair(u, v)?;
        let e = ordered(u, v);
        match self.edges.binary_search(&e) {
            Ok(pos) => {
                self.edges.remove(pos);
                self.set_bit(u, v, false);
                Ok(())
            }
            Err(_) => Err(Error::MissingEdge(e.0, e.1)),
        }
    }

    /// Copy of `self` with `{u, v}` added.
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Graph> {
        let mut g = self.clone();
        g.add_edge(u, v)?;
        Ok(g)
    }

    /// Copy of `self` with `{u, v}` removed. Connectivity is not checked.
    pub fn without_edge(&self, u: usize, v: usize) -> Result<Graph> {
        let mut g = self.clone();
        g.remove_edge(u, v)?;
        Ok(g)
    }

    /// Breadth-first reachability from vertex 0.
    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for v in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.n
    }

    /// Component label per vertex (labels are 0.., in order of smallest member)
    /// together with the number of components.
    pub fn component_labels(&self) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for v in self.neighbors(u) {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        queue.push_back(v);
                    }
                }
            }
            next += 1;
        }
        (label, next)
    }

    /// Graph with vertex `v` renamed to `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(Error::param("permutation length differs from vertex count"));
        }
        Graph::from_edges(self.n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph::empty(self.n);
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(u, v) {
                    g.set_bit(u, v, true);
                    g.edges.push((u, v));
                }
            }
        }
        g
    }

    /// Number of edges with exactly one endpoint in `side`.
    pub fn cut_size(&self, side: &[bool]) -> usize {
        self.edges.iter().filter(|&&(u, v)| side[u] != side[v]).count()
    }

    /// Stable 64-bit hash of `(n, sorted edge list)`.
    pub fn edge_hash(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.n.hash(&mut h);
        self.edges.hash(&mut h);
        h.finish()
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<()> {
        for x in [u, v] {
            if x >= self.n {
                return Err(Error::VertexOutOfRange { vertex: x, n: self.n });
            }
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        Ok(())
    }

    fn set_bit(&mut self, u: usize, v: usize, on: bool) {
        let w = self.words;
        if on {
            self.bits[u * w + v / WORD] |= 1 << (v % WORD);
            self.bits[v * w + u / WORD] |= 1 << (u % WORD);
            self.degrees[u] += 1;
            self.degrees[v] += 1;
        } else {
            self.bits[u * w + v / WORD] &= !(1 << (v % WORD));
            self.bits[v * w + u / WORD] &= !(1 << (u % WORD));
            self.degrees[u] -= 1;
            self.degrees[v] -= 1;
        }
    }
}
