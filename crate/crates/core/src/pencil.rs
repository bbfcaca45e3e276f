//! Advisory diagnostics on the pencil `A(x,t) + λB(x,t)`.
//!
//! Nothing here gates the solver; callers decide what to do with a failed
//! check.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{
    determinant, eig_small, lu_solve, poly_roots, rank, trim_polynomial, DenseMatrix, DEFAULT_RANK_TOL,
};
use crate::problem::{GridSpec, PdaeProblem};
use crate::stencil::build_stencil;

pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;
/// Coefficients of degree above the last one exceeding this fraction of the
/// largest are dropped.
pub const COEFF_TRIM_TOL: f64 = 1e-9;
/// Relative accuracy assumed for sampled coefficients when widening root
/// clusters.
const COEFF_NOISE: f64 = 1e-10;

/// Ascending coefficients of `det(A + λB)` for fixed matrices.
///
/// Fails with [`Error::DegeneratePolynomial`] when the determinant vanishes
/// at every sample.
pub fn pencil_char_poly(a: &DenseMatrix, b: &DenseMatrix) -> Result<Vec<f64>> {
    if !a.is_square() || a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::InvalidArgument("pencil matrices must be square and of equal size".into()));
    }
    let n = a.rows();
    let lambdas: Vec<f64> = (0..=n).map(|k| 2.0 * ((2 * k + 1) as f64 * PI / (2 * (n + 1)) as f64).cos()).collect();
    let dets: Vec<f64> = lambdas.iter().map(|&l| determinant(&(a + &b.scale(l)))).collect();
    let scale = a.norm_inf().max(2.0 * b.norm_inf()).max(f64::MIN_POSITIVE);
    let floor = 1e-12 * scale.powi(n as i32);
    if dets.iter().all(|d| d.abs() <= floor) {
        return Err(Error::DegeneratePolynomial);
    }
    let vander = DenseMatrix::from_fn(n + 1, n + 1, |i, j| lambdas[i].powi(j as i32));
    let coeffs = lu_solve(&vander, &dets)?;
    trim_polynomial(&coeffs, COEFF_TRIM_TOL).ok_or(Error::DegeneratePolynomial)
}

/// Ascending coefficients of `det(A(x,t) + λB(x,t))`.
pub fn char_poly(problem: &PdaeProblem, x: f64, t: f64) -> Result<Vec<f64>> {
    pencil_char_poly(&problem.a(x, t), &problem.b(x, t)).map_err(|e| match e {
        Error::DegeneratePolynomial => Error::IdenticallySingularPencil { x, t },
        other => other,
    })
}

/// A group of numerically coincident roots.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootCluster {
    pub re: f64,
    pub im: f64,
    pub mult: usize,
    /// True when the imaginary part exceeds the cluster's uncertainty.
    #[serde(skip)]
    pub non_real: bool,
}

/// Groups roots whose spread is explained by `cluster_tol` plus the
/// perturbation a `k`-fold root suffers from coefficient noise.
///
/// For a candidate group of `k` roots with centroid `c` the admissible
/// radius is `cluster_tol + 2ρ`, `ρ = (noise(c) / |q(c)|)^(1/k)`, where `q`
/// is the polynomial with the group's roots divided out.
pub fn cluster_roots(coeffs: &[f64], roots: &[Complex64], cluster_tol: f64) -> Vec<RootCluster> {
    let lead = coeffs.last().copied().unwrap_or(1.0).abs();
    let cmax = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let noise = |c: Complex64| {
        let r = c.norm();
        COEFF_NOISE * cmax * (0..coeffs.len()).map(|i| r.powi(i as i32)).sum::<f64>()
    };
    let mut rest: Vec<Complex64> = roots.to_vec();
    rest.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut clusters = Vec::new();
    while !rest.is_empty() {
        let seed = rest[0];
        let mut order: Vec<usize> = (0..rest.len()).collect();
        order.sort_by(|&p, &q| (rest[p] - seed).norm().total_cmp(&(rest[q] - seed).norm()));
        let mut best = (1, seed, cluster_tol);
        for k in 2..=rest.len() {
            let group = &order[..k];
            let centroid = group.iter().map(|&g| rest[g]).sum::<Complex64>() / k as f64;
            let q: f64 = lead * order[k..].iter().map(|&o| (centroid - rest[o]).norm()).product::<f64>();
            let rho = if q > 0.0 { (noise(centroid) / q).powf(1.0 / k as f64) } else { f64::INFINITY };
            let bound = cluster_tol + 2.0 * rho;
            let spread = group.iter().map(|&g| (rest[g] - centroid).norm()).fold(0.0, f64::max);
            if spread <= bound {
                best = (k, centroid, bound);
            }
        }
        let (k, centroid, bound) = best;
        let mut taken: Vec<usize> = order[..k].to_vec();
        taken.sort_unstable_by(|a, b| b.cmp(a));
        for idx in taken {
            rest.remove(idx);
        }
        clusters.push(RootCluster {
            re: centroid.re,
            im: if centroid.im.abs() <= bound { 0.0 } else { centroid.im },
            mult: k,
            non_real: centroid.im.abs() > bound,
        });
    }
    clusters
}

/// Roots of the characteristic polynomial at `(x, t)` with multiplicities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharRoots {
    pub degree: usize,
    pub clusters: Vec<RootCluster>,
}

impl CharRoots {
    pub fn all_real(&self) -> bool {
        self.clusters.iter().all(|c| !c.non_real)
    }

    /// Cluster multiplicities in ascending order.
    pub fn multiplicity_pattern(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.clusters.iter().map(|c| c.mult).collect();
        p.sort_unstable();
        p
    }
}

pub fn pencil_char_roots(a: &DenseMatrix, b: &DenseMatrix, cluster_tol: f64) -> Result<CharRoots> {
    if cluster_tol.is_nan() || cluster_tol <= 0.0 {
        return Err(Error::InvalidArgument("cluster tolerance must be positive".into()));
    }
    let coeffs = pencil_char_poly(a, b)?;
    let roots = poly_roots(&coeffs)?;
    Ok(CharRoots { degree: coeffs.len() - 1, clusters: cluster_roots(&coeffs, &roots, cluster_tol) })
}

pub fn char_roots(problem: &PdaeProblem, x: f64, t: f64, cluster_tol: f64) -> Result<CharRoots> {
    pencil_char_roots(&problem.a(x, t), &problem.b(x, t), cluster_tol).map_err(|e| match e {
        Error::DegeneratePolynomial => Error::IdenticallySingularPencil { x, t },
        other => other,
    })
}

/// Diagnostics at one point of the domain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PencilSample {
    pub x: f64,
    pub t: f64,
    pub rank_a: usize,
    pub rank_b: usize,
    pub degree: usize,
    pub roots: Vec<RootCluster>,
    #[serde(skip)]
    pub rank_degree_b_holds: bool,
    #[serde(skip)]
    pub rank_degree_a_holds: bool,
}

pub fn sample_pencil(problem: &PdaeProblem, x: f64, t: f64, cluster_tol: f64) -> Result<PencilSample> {
    let (a, b) = (problem.a(x, t), problem.b(x, t));
    let roots = char_roots(problem, x, t, cluster_tol)?;
    let rank_a = rank(&a, DEFAULT_RANK_TOL);
    let rank_b = rank(&b, DEFAULT_RANK_TOL);
    let swapped_degree = pencil_char_poly(&b, &a).map_err(|_| Error::IdenticallySingularPencil { x, t })?.len() - 1;
    Ok(PencilSample {
        x,
        t,
        rank_a,
        rank_b,
        degree: roots.degree,
        rank_degree_b_holds: rank_b == roots.degree,
        rank_degree_a_holds: rank_a == swapped_degree,
        roots: roots.clusters,
    })
}

/// Whether `rank B = deg det(A + λB)` and `rank A = deg det(λA + B)` hold at
/// every sample.
pub fn rank_degree_check(problem: &PdaeProblem, samples: &[(f64, f64)]) -> Result<(bool, bool)> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("at least one sample point is required".into()));
    }
    let mut flags = (true, true);
    for &(x, t) in samples {
        let s = sample_pencil(problem, x, t, DEFAULT_CLUSTER_TOL)?;
        flags.0 &= s.rank_degree_b_holds;
        flags.1 &= s.rank_degree_a_holds;
    }
    Ok(flags)
}

/// `max ‖P(A + λB)Q − canonical pencil‖∞` over `(x, t, λ)` triples.
pub fn canonical_equivalence_residual(problem: &PdaeProblem, triples: &[(f64, f64, f64)]) -> Result<f64> {
    let can =
        problem.canonical().ok_or_else(|| Error::Unsupported(format!("{} has no canonical data", problem.name())))?;
    let mut worst = 0.0f64;
    for &(x, t, lambda) in triples {
        let pencil = &problem.a(x, t) + &problem.b(x, t).scale(lambda);
        let lhs = (can.left)(x, t).matmul(&pencil).matmul(&(can.right)(x, t));
        worst = worst.max((&lhs - &can.canonical_pencil(x, t, lambda)).norm_inf());
    }
    Ok(worst)
}

/// `min |r ξ_γ̄ ξ_J + ξ_γ|` over all triples; `+∞` when `xi_j` is empty.
pub fn separation_from_spectra(r: f64, xi_gbar: &[Complex64], xi_g: &[Complex64], xi_j: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for &a in xi_gbar {
        for &c in xi_j {
            for &g in xi_g {
                best = best.min((r * a * c + g).norm());
            }
        }
    }
    best
}

/// `max |exp(−k r ξ_γ̄ ξ_J)|` over `k ∈ 1..=m2`; `0` when `xi_j` is empty.
pub fn mu_from_spectra(r: f64, m2: usize, xi_gbar: &[Complex64], xi_j: &[Complex64]) -> f64 {
    let mut worst = 0.0f64;
    for &a in xi_gbar {
        for &c in xi_j {
            for k in 1..=m2 {
                worst = worst.max((-(k as f64) * r * (a * c).re).exp());
            }
        }
    }
    worst
}

fn stencil_spectra(m1: usize, m2: usize) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    Ok((eig_small(build_stencil(m1)?.gamma())?, eig_small(build_stencil(m2)?.gamma())?))
}

fn j_spectrum(problem: &PdaeProblem, x: f64, t: f64) -> Result<Vec<Complex64>> {
    let can =
        problem.canonical().ok_or_else(|| Error::Unsupported(format!("{} has no canonical data", problem.name())))?;
    if can.d == 0 {
        return Ok(Vec::new());
    }
    eig_small(&(can.j)(x, t))
}

pub fn lemma2_separation(
    problem: &PdaeProblem,
    grid: &GridSpec,
    m1: usize,
    m2: usize,
    samples: &[(f64, f64)],
) -> Result<f64> {
    let (xi_gbar, xi_g) = stencil_spectra(m1, m2)?;
    let mut best = f64::INFINITY;
    for &(x, t) in samples {
        let xi_j = j_spectrum(problem, x, t)?;
        best = best.min(separation_from_spectra(grid.r, &xi_gbar, &xi_g, &xi_j));
    }
    Ok(best)
}

pub fn mu_spectral_radius(
    problem: &PdaeProblem,
    grid: &GridSpec,
    m1: usize,
    m2: usize,
    samples: &[(f64, f64)],
) -> Result<f64> {
    let (xi_gbar, _) = stencil_spectra(m1, m2)?;
    let mut worst = 0.0f64;
    for &(x, t) in samples {
        let xi_j = j_spectrum(problem, x, t)?;
        worst = worst.max(mu_from_spectra(grid.r, m2, &xi_gbar, &xi_j));
    }
    Ok(worst)
}

/// Smallest real part of the `J`-block eigenvalues over the samples, `None`
/// when `d = 0`.
pub fn xi_j_min(problem: &PdaeProblem, samples: &[(f64, f64)]) -> Result<Option<f64>> {
    let mut best: Option<f64> = None;
    for &(x, t) in samples {
        for xi in j_spectrum(problem, x, t)? {
            best = Some(best.map_or(xi.re, |b| b.min(xi.re)));
        }
    }
    Ok(best)
}

/// `s × s` lattice strictly inside the rectangle, `s = round(√k)`.
pub fn interior_lattice(grid: &GridSpec, k: usize) -> Vec<(f64, f64)> {
    let s = ((k as f64).sqrt().round() as usize).max(1);
    lattice(grid, s, |a| (a + 1) as f64 / (s + 1) as f64)
}

/// The interior lattice extended by the rectangle's edges.
pub fn closed_lattice(grid: &GridSpec, k: usize) -> Vec<(f64, f64)> {
    let s = ((k as f64).sqrt().round() as usize).max(1);
    lattice(grid, s + 2, |a| a as f64 / (s + 1) as f64)
}

fn lattice(grid: &GridSpec, count: usize, frac: impl Fn(usize) -> f64) -> Vec<(f64, f64)> {
    let mut pts = Vec::with_capacity(count * count);
    for a in 0..count {
        for b in 0..count {
            let x = grid.x0 + frac(a) * (grid.x_end - grid.x0);
            let t = grid.t0 + frac(b) * (grid.t_end - grid.t0);
            pts.push((x, t));
        }
    }
    pts
}

/// λ values paired with every sample in the canonical residual.
pub const RESIDUAL_LAMBDAS: [f64; 4] = [-1.5, -0.3, 0.7, 2.0];

fn finite_or_null<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) if x.is_finite() => s.serialize_f64(*x),
        _ => s.serialize_none(),
    }
}

/// Aggregated diagnostics. Values that do not apply (no `J` block, no
/// canonical data) serialize as `null`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PencilReport {
    pub samples: Vec<PencilSample>,
    pub rank_degree_b: bool,
    pub rank_degree_a: bool,
    pub multiplicity_constant: bool,
    #[serde(serialize_with = "finite_or_null")]
    pub lemma2_min_separation: Option<f64>,
    #[serde(serialize_with = "finite_or_null")]
    pub mu: Option<f64>,
    #[serde(serialize_with = "finite_or_null")]
    pub xi_j_min: Option<f64>,
    #[serde(serialize_with = "finite_or_null")]
    pub canonical_residual: Option<f64>,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyzeOptions {
    pub samples: usize,
    pub m1: usize,
    pub m2: usize,
    pub cluster_tol: f64,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions { samples: 25, m1: 2, m2: 2, cluster_tol: DEFAULT_CLUSTER_TOL }
    }
}

/// Runs every diagnostic. Root data and lemma checks use the interior
/// lattice; `xi_j_min` also scans the boundary.
pub fn analyze(problem: &PdaeProblem, grid: &GridSpec, opts: &AnalyzeOptions) -> Result<PencilReport> {
    if opts.samples == 0 {
        return Err(Error::InvalidArgument("at least one sample is required".into()));
    }
    let pts = interior_lattice(grid, opts.samples);
    let samples =
        pts.par_iter().map(|&(x, t)| sample_pencil(problem, x, t, opts.cluster_tol)).collect::<Result<Vec<_>>>()?;
    let mut warnings = Vec::new();
    let rank_degree_b = samples.iter().all(|s| s.rank_degree_b_holds);
    let rank_degree_a = samples.iter().all(|s| s.rank_degree_a_holds);
    let pattern = |s: &PencilSample| {
        let mut p: Vec<usize> = s.roots.iter().map(|c| c.mult).collect();
        p.sort_unstable();
        p
    };
    let multiplicity_constant = samples.windows(2).all(|w| pattern(&w[0]) == pattern(&w[1]));
    if !multiplicity_constant {
        warnings.push("root multiplicities differ between samples".into());
    }
    if let Some(s) = samples.iter().find(|s| s.roots.iter().any(|c| c.non_real)) {
        warnings.push(format!("non-real characteristic root at ({}, {})", s.x, s.t));
    }
    if !rank_degree_b {
        warnings.push("rank B differs from deg det(A + lambda B)".into());
    }

    let (mut sep, mut mu, mut xj, mut residual) = (None, None, None, None);
    if let Some(can) = problem.canonical() {
        let triples: Vec<(f64, f64, f64)> =
            pts.iter().flat_map(|&(x, t)| RESIDUAL_LAMBDAS.iter().map(move |&l| (x, t, l))).collect();
        residual = Some(canonical_equivalence_residual(problem, &triples)?);
        if can.d > 0 {
            sep = Some(lemma2_separation(problem, grid, opts.m1, opts.m2, &pts)?);
            mu = Some(mu_spectral_radius(problem, grid, opts.m1, opts.m2, &pts)?);
            xj = xi_j_min(problem, &closed_lattice(grid, opts.samples))?;
            if xj.is_some_and(|v| v <= 1e-12) {
                warnings.push(format!(
                    "J-block eigenvalue real part reaches {:.3e} <= 0 on the closed domain",
                    xj.unwrap_or_default()
                ));
            }
            if mu.is_some_and(|v| v >= 1.0) {
                warnings.push("spectral radius mu >= 1".into());
            }
        } else {
            sep = Some(f64::INFINITY);
        }
    } else {
        warnings.push(format!("{} has no canonical data; J-block checks skipped", problem.name()));
    }
    Ok(PencilReport {
        samples,
        rank_degree_b,
        rank_degree_a,
        multiplicity_constant,
        lemma2_min_separation: sep,
        mu,
        xi_j_min: xj,
        canonical_residual: residual,
        warnings,
    })
}
