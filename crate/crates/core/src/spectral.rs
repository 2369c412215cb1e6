//! Normalized-Laplacian spectra, smoothed spectral densities and the L1
//! distance between them, plus Fiedler-vector bisection.
//!
//! For a graph with adjacency `A` and degree matrix `D` the normalized
//! Laplacian is `I - D^{-1/2} A D^{-1/2}`; its eigenvalues lie in `[0, 2]`.
//! The density of a spectrum is a Gaussian mixture with one unit-weight
//! kernel per eigenvalue and bandwidth `1/n`, evaluated on a uniform grid over
//! `[0, 2]`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Eigenvalues closer than this to zero are reported as exactly zero.
pub const ZERO_EIGEN_TOL: f64 = 1e-9;

/// Fiedler entries with magnitude at or below this are treated as zero.
const FIEDLER_ZERO: f64 = 1e-12;

/// Beyond this many bandwidths, `exp(-z^2/2)` underflows to exactly `0.0`.
const KERNEL_SUPPORT: f64 = 38.7;

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Ascending, clamped to `[0, 2]`.
    pub eigenvalues: Vec<f64>,
    pub sigma: f64,
}

impl Spectrum {
    /// Wraps raw eigenvalues, sorting them and using bandwidth `1/len`.
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>) -> Self {
        assert!(!eigenvalues.is_empty(), "spectrum needs at least one eigenvalue");
        eigenvalues.sort_by(f64::total_cmp);
        let sigma = 1.0 / eigenvalues.len() as f64;
        Spectrum { eigenvalues, sigma }
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Second-smallest eigenvalue.
    pub fn lambda2(&self) -> f64 {
        self.eigenvalues.get(1).copied().unwrap_or(0.0)
    }

    /// Eigenvalues rounded to 1e-6, usable as a hashable graph fingerprint.
    pub fn fingerprint(&self) -> Vec<i64> {
        self.eigenvalues
            .iter()
            .map(|&l| (l * 1e6).round() as i64)
            .collect()
    }
}

/// Smoothed spectral density sampled on a uniform grid over `[0, 2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub xs: Vec<f64>,
    pub phis: Vec<f64>,
}

impl DensityGrid {
    pub fn spacing(&self) -> f64 {
        2.0 / (self.xs.len() - 1) as f64
    }
}

/// Grid size that keeps spacing at or below half the bandwidth `1/n`.
pub fn grid_size(n: usize) -> usize {
    2049.max(8 * n + 1)
}

pub fn uniform_grid(points: usize) -> Vec<f64> {
    let h = 2.0 / (points - 1) as f64;
    (0..points).map(|i| i as f64 * h).collect()
}

/// Two-way split of the vertex set by the sign of the Fiedler vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Bisection {
    pub cluster_a: Vec<usize>,
    pub cluster_b: Vec<usize>,
    pub fiedler: Vec<f64>,
}

impl Bisection {
    /// `side[v]` is true when `v` belongs to `cluster_a`.
    pub fn side(&self) -> Vec<bool> {
        let mut side = vec![false; self.fiedler.len()];
        for &v in &self.cluster_a {
            side[v] = true;
        }
        side
    }
}

pub fn normalized_laplacian(g: &Graph) -> Result<DMatrix<f64>> {
    let n = g.n();
    if let Some(v) = (0..n).find(|&v| g.degree(v) == 0) {
        return Err(Error::IsolatedVertex(v));
    }
    let inv_sqrt: Vec<f64> = g.degrees().iter().map(|&k| 1.0 / (k as f64).sqrt()).collect();
    let mut m = DMatrix::<f64>::identity(n, n);
    for &(i, j) in g.edges() {
        let w = -inv_sqrt[i] * inv_sqrt[j];
        m[(i, j)] = w;
        m[(j, i)] = w;
    }
    Ok(m)
}

fn clean_eigenvalue(l: f64) -> f64 {
    if l.abs() <= ZERO_EIGEN_TOL {
        0.0
    } else {
        l.clamp(0.0, 2.0)
    }
}

/// Full sorted normalized-Laplacian spectrum.
pub fn eigen_spectrum(g: &Graph) -> Result<Spectrum> {
    if g.n() < 2 {
        return Err(Error::param("spectrum needs at least two vertices"));
    }
    let lap = normalized_laplacian(g)?;
    let raw = lap.symmetric_eigenvalues();
    if raw.iter().any(|l| !l.is_finite()) {
        return Err(Error::EigenFailure);
    }
    Ok(Spectrum::from_eigenvalues(
        raw.iter().map(|&l| clean_eigenvalue(l)).collect(),
    ))
}

/// Eigenvalues (ascending) and matching unit eigenvectors as columns.
pub fn eigen_decomposition(g: &Graph) -> Result<(Vec<f64>, DMatrix<f64>)> {
    if g.n() < 2 {
        return Err(Error::param("spectrum needs at least two vertices"));
    }
    let n = g.n();
    let lap = normalized_laplacian(g)?;
    let eig = SymmetricEigen::try_new(lap, f64::EPSILON, 1000 * n).ok_or(Error::EigenFailure)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| clean_eigenvalue(eig.eigenvalues[i])).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    if vectors.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenFailure);
    }
    Ok((values, vectors))
}

/// Second-smallest normalized-Laplacian eigenvalue; zero iff disconnected.
pub fn algebraic_connectivity(g: &Graph) -> Result<f64> {
    Ok(eigen_spectrum(g)?.lambda2())
}

/// Density value at a single point.
pub fn density_at(sp: &Spectrum, x: f64) -> f64 {
    let s = sp.sigma;
    let coef = 1.0 / (sp.n() as f64 * (2.0 * PI * s * s).sqrt());
    coef * sp
        .eigenvalues
        .iter()
        .map(|&l| (-(x - l) * (x - l) / (2.0 * s * s)).exp())
        .sum::<f64>()
}

/// Density sampled at arbitrary points.
pub fn density_on(sp: &Spectrum, xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|&x| density_at(sp, x)).collect()
}

/// Density on the standard grid for this spectrum's size.
pub fn density(sp: &Spectrum) -> DensityGrid {
    let points = grid_size(sp.n());
    let xs = uniform_grid(points);
    let h = 2.0 / (points - 1) as f64;
    let s = sp.sigma;
    let two_s2 = 2.0 * s * s;
    let reach = KERNEL_SUPPORT * s;
    let mut sums = vec![0.0; points];
    // Eigenvalue-major accumulation; skipped terms are exactly zero.
    for &l in &sp.eigenvalues {
        let lo = (((l - reach) / h).floor().max(0.0)) as usize;
        let hi = (((l + reach) / h).ceil() as usize).min(points - 1);
        for i in lo..=hi {
            let d = xs[i] - l;
            sums[i] += (-d * d / two_s2).exp();
        }
    }
    let coef = 1.0 / (sp.n() as f64 * (2.0 * PI * s * s).sqrt());
    let phis = sums.into_iter().map(|v| coef * v).collect();
    DensityGrid { xs, phis }
}

/// Trapezoidal approximation of the L1 distance between two densities on
/// `[0, 2]`.
pub fn spectral_distance(a: &DensityGrid, b: &DensityGrid) -> Result<f64> {
    if a.xs.len() != b.xs.len() || a.xs.first() != b.xs.first() || a.xs.last() != b.xs.last() {
        return Err(Error::GridMismatch(a.xs.len(), b.xs.len()));
    }
    let m = a.xs.len();
    let h = a.spacing();
    let mut acc = 0.0;
    for i in 0..m {
        let w = if i == 0 || i == m - 1 { 0.5 } else { 1.0 };
        acc += w * (a.phis[i] - b.phis[i]).abs();
    }
    Ok(acc * h)
}

/// Spectral two-way clustering by the signs of the Fiedler vector.
///
/// Entries with magnitude at most 1e-12 count as zero and join `cluster_a`.
/// If either side ends up with fewer than two vertices, the vertices of the
/// larger side closest to zero are moved over until both have at least two.
pub fn fiedler_bisection(g: &Graph) -> Result<Bisection> {
    let n = g.n();
    if n < 4 {
        return Err(Error::param("bisection needs at least four vertices"));
    }
    let (_, vectors) = eigen_decomposition(g)?;
    let mut fiedler: Vec<f64> = vectors.column(1).iter().copied().collect();

    // Fix the arbitrary eigenvector sign: largest-magnitude entry positive.
    let pivot = (0..n)
        .max_by(|&a, &b| fiedler[a].abs().total_cmp(&fiedler[b].abs()).then(b.cmp(&a)))
        .expect("n >= 4");
    if fiedler[pivot] < 0.0 {
        fiedler.iter_mut().for_each(|x| *x = -*x);
    }

    let mut side: Vec<bool> = fiedler.iter().map(|&x| x >= -FIEDLER_ZERO).collect();
    rebalance(&mut side, &fiedler);

    let cluster_a = (0..n).filter(|&v| side[v]).collect();
    let cluster_b = (0..n).filter(|&v| !side[v]).collect();
    Ok(Bisection {
        cluster_a,
        cluster_b,
        fiedler,
    })
}

fn rebalance(side: &mut [bool], fiedler: &[f64]) {
    loop {
        let a = side.iter().filter(|&&s| s).count();
        let b = side.len() - a;
        if a >= 2 && b >= 2 {
            return;
        }
        let from_a = a > b;
        let mover = (0..side.len())
            .filter(|&v| side[v] == from_a)
            .min_by(|&u, &v| fiedler[u].abs().total_cmp(&fiedler[v].abs()).then(u.cmp(&v)))
            .expect("larger side is nonempty");
        side[mover] = !from_a;
    }
}
