//! Independent oracles shared by the integration suites. Nothing here calls
//! into the library's numeric paths; graphs enter only as edge lists.

#![allow(dead_code, clippy::needless_range_loop, clippy::too_many_arguments)]

use rand::Rng;
use spectra_evolve::Graph;

pub fn adjacency(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.n();
    let mut a = vec![vec![false; n]; n];
    for &(u, v) in g.edges() {
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

/// `I - D^{-1/2} A D^{-1/2}` built straight from the edge list.
pub fn laplacian_matrix(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.n();
    let a = adjacency(g);
    let deg: Vec<f64> = a.iter().map(|r| r.iter().filter(|&&x| x).count() as f64).collect();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        m[i][i] = 1.0;
        for j in 0..n {
            if a[i][j] {
                m[i][j] = -1.0 / (deg[i] * deg[j]).sqrt();
            }
        }
    }
    m
}

/// Cyclic Jacobi rotations until the off-diagonal mass vanishes.
pub fn jacobi_eigenvalues(mut m: Vec<Vec<f64>>) -> Vec<f64> {
    let n = m.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of the circulant normalized Laplacian from the cosine sum.
pub fn circulant_eigenvalues(n: usize, offsets: &[usize]) -> Vec<f64> {
    let mut nbrs: Vec<usize> = offsets.iter().flat_map(|&j| [j % n, (n - j % n) % n]).collect();
    nbrs.sort_unstable();
    nbrs.dedup();
    let k = nbrs.len() as f64;
    let mut ev: Vec<f64> = (0..n)
        .map(|m| {
            let s: f64 = nbrs
                .iter()
                .map(|&d| (2.0 * std::f64::consts::PI * (m * d) as f64 / n as f64).cos())
                .sum();
            1.0 - s / k
        })
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn gaussian_mixture(eigs: &[f64], x: f64) -> f64 {
    let n = eigs.len() as f64;
    let sigma = 1.0 / n;
    let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    eigs.iter()
        .map(|&l| norm * (-(x - l) * (x - l) / (2.0 * sigma * sigma)).exp())
        .sum::<f64>()
        / n
}

pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Floyd-Warshall hop distances; `usize::MAX` when unreachable.
pub fn all_pairs_hops(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    let a = adjacency(g);
    let inf = usize::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for i in 0..n {
        d[i][i] = 0;
        for j in 0..n {
            if a[i][j] {
                d[i][j] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

pub fn brute_path_length(g: &Graph) -> f64 {
    let d = all_pairs_hops(g);
    let n = g.n();
    let mut total = 0;
    for i in 0..n {
        for j in i + 1..n {
            total += d[i][j];
        }
    }
    total as f64 / (n * (n - 1) / 2) as f64
}

/// Closed ordered triples over connected ordered triples.
pub fn brute_clustering(g: &Graph) -> f64 {
    let a = adjacency(g);
    let n = g.n();
    let (mut closed, mut open) = (0usize, 0usize);
    for c in 0..n {
        for x in 0..n {
            for y in 0..n {
                if x != y && x != c && y != c && a[c][x] && a[c][y] {
                    open += 1;
                    if a[x][y] {
                        closed += 1;
                    }
                }
            }
        }
    }
    if open == 0 {
        0.0
    } else {
        closed as f64 / open as f64
    }
}

fn shortest_paths(a: &[Vec<bool>], d: &[Vec<usize>], s: usize, t: usize) -> Vec<Vec<usize>> {
    if s == t {
        return vec![vec![t]];
    }
    let mut out = Vec::new();
    for v in 0..a.len() {
        if a[s][v] && d[v][t] + 1 == d[s][t] {
            for mut p in shortest_paths(a, d, v, t) {
                p.insert(0, s);
                out.push(p);
            }
        }
    }
    out
}

/// Enumerates every shortest path of every unordered pair.
pub fn brute_betweenness(g: &Graph) -> Vec<f64> {
    let a = adjacency(g);
    let d = all_pairs_hops(g);
    let n = g.n();
    let mut bc = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            let paths = shortest_paths(&a, &d, s, t);
            let total = paths.len() as f64;
            for v in 0..n {
                if v == s || v == t {
                    continue;
                }
                let through = paths.iter().filter(|p| p.contains(&v)).count() as f64;
                bc[v] += through / total;
            }
        }
    }
    bc
}

/// Rejection-samples connected graphs with edge probability `p`.
pub fn random_connected<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    loop {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::from_edges(n, edges).unwrap();
        if g.is_connected() {
            return g;
        }
    }
}

/// For each value, product of distances to the nearest strictly smaller and
/// strictly larger values after min-max scaling; `inf` at the extremes.
pub fn gap_product_oracle(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let h: Vec<f64> = values.iter().map(|v| (v - lo) / (hi - lo)).collect();
    h.iter()
        .map(|&x| {
            let below = h.iter().filter(|&&y| y < x).cloned().fold(f64::NEG_INFINITY, f64::max);
            let above = h.iter().filter(|&&y| y > x).cloned().fold(f64::INFINITY, f64::min);
            if below.is_infinite() || above.is_infinite() {
                f64::INFINITY
            } else {
                (x - below) * (above - x)
            }
        })
        .collect()
}
