//! Independent numerical ground truth.
//!
//! [`sphere_min`] estimates `min_{|x| = 1} f(x)` by multistart projected
//! gradient descent; because `f` is homogeneous, a negative value anywhere on
//! the sphere refutes positive semi-definiteness, while a nonnegative estimate
//! is evidence only. [`matrix_psd`] decides semi-definiteness of a small
//! symmetric matrix through cyclic Jacobi rotations.
//!
//! # Random starts
//!
//! Start points come from SplitMix64: the state advances by
//! `0x9E3779B97F4A7C15` and each output is the state passed through
//! `z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9; z = (z ^ (z >> 27)) * 0x94D049BB133111EB; z ^ (z >> 31)`.
//! A master generator seeded with the user seed emits one sub-seed per start;
//! each start draws Gaussian coordinates by Box-Muller from uniforms
//! `(next >> 11) * 2^-53` and normalizes. Start `i` therefore depends only
//! on `(seed, i)`, whatever the execution order.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::poly::{eval_fast, eval_with_gradient};
use crate::tensor::{max_abs, witnesses, GeneratingVector, Pattern, WitnessFamily, WitnessLabel};

pub const DEFAULT_STARTS: usize = 64;
pub const DEFAULT_MAX_ITERS: usize = 10_000;
pub const INITIAL_STEP: f64 = 0.1;
const MAX_HALVINGS: usize = 40;
const STALL_RTOL: f64 = 1e-14;
/// Sign vectors are enumerated only up to this dimension (`3^6` candidates).
pub const SIGN_VECTOR_MAX_DIM: usize = 6;

/// Deterministic sampler over SplitMix64.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: SplitMix64,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: SplitMix64::seed_from_u64(seed) }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal by Box-Muller (the cosine branch only).
    pub fn gaussian(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform(); // in (0, 1]
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn gaussian_vec(&mut self, len: usize) -> Vec<f64> {
        (0..len).map(|_| self.gaussian()).collect()
    }

    /// Uniformly distributed point on the unit sphere.
    pub fn unit_vector(&mut self, len: usize) -> Vec<f64> {
        loop {
            let x = self.gaussian_vec(len);
            if let Some(u) = normalize(&x) {
                return u;
            }
        }
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn normalize(x: &[f64]) -> Option<Vec<f64>> {
    let n = norm(x);
    (n > 0.0 && n.is_finite()).then(|| x.iter().map(|v| v / n).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereMinOptions {
    pub starts: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub initial_step: f64,
    pub execution: Execution,
}

impl Default for SphereMinOptions {
    fn default() -> Self {
        Self {
            starts: DEFAULT_STARTS,
            seed: 0,
            max_iters: DEFAULT_MAX_ITERS,
            initial_step: INITIAL_STEP,
            execution: Execution::default(),
        }
    }
}

/// Where the reported minimizer came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MinimizerSource {
    RandomStart { start: usize },
    Candidate { label: WitnessLabel },
    PolishedCandidate { label: WitnessLabel },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereMinResult {
    pub min_value: f64,
    /// Unit vector at which `min_value` was evaluated.
    pub argmin: Vec<f64>,
    pub source: MinimizerSource,
    pub starts: usize,
    /// Starts that stopped on the stall criterion rather than the iteration cap.
    pub converged_starts: usize,
    pub candidates: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
struct Descent {
    value: f64,
    point: Vec<f64>,
    converged: bool,
}

/// Projected gradient descent on the sphere from a unit vector.
///
/// Each step moves along the tangential gradient and renormalizes, halving
/// the step until `f` decreases (at most 40 times) and doubling it after a
/// successful step. Stops once the decrease falls below `1e-14 (1 + |f|)`.
fn descend(gen: &GeneratingVector, start: Vec<f64>, opts: &SphereMinOptions) -> Descent {
    let mut x = start;
    let (mut f, mut g) = eval_with_gradient(gen, &x).expect("dimension checked by caller");
    let mut step = opts.initial_step;
    for _ in 0..opts.max_iters {
        let radial: f64 = g.iter().zip(&x).map(|(gi, xi)| gi * xi).sum();
        let tangent: Vec<f64> = g.iter().zip(&x).map(|(gi, xi)| gi - radial * xi).collect();
        if norm(&tangent) == 0.0 {
            return Descent { value: f, point: x, converged: true };
        }
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = x.iter().zip(&tangent).map(|(xi, ti)| xi - step * ti).collect();
            if let Some(y) = normalize(&trial) {
                let fy = eval_fast(gen, &y).expect("dimension checked by caller");
                if fy < f {
                    accepted = Some((y, fy));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((y, fy)) = accepted else {
            return Descent { value: f, point: x, converged: true };
        };
        let decrease = f - fy;
        x = y;
        let (nf, ng) = eval_with_gradient(gen, &x).expect("dimension checked by caller");
        f = nf;
        g = ng;
        if decrease < STALL_RTOL * (1.0 + f.abs()) {
            return Descent { value: f, point: x, converged: true };
        }
        step *= 2.0;
    }
    Descent { value: f, point: x, converged: false }
}

/// Every `{-1, 0, 1}^n` vector with a positive leading nonzero entry
/// (`f` is even, so the other half is redundant).
fn sign_vectors(dim: usize) -> Vec<Vec<f64>> {
    let total = 3usize.pow(dim as u32);
    let mut out = Vec::new();
    for code in 1..total {
        let mut c = code;
        let x: Vec<f64> = (0..dim)
            .map(|_| {
                let d = c % 3;
                c /= 3;
                [0.0, 1.0, -1.0][d]
            })
            .collect();
        if x.iter().find(|&&v| v != 0.0) == Some(&1.0) {
            out.push(x);
        }
    }
    out
}

/// Structured candidates: witness families valid for the dimension, alpha
/// lines at a few magnitudes, and sign vectors when `n <= 6`.
pub fn candidate_points(dim: usize) -> Vec<(Vec<f64>, WitnessLabel)> {
    let mut families = vec![
        WitnessFamily::Unit,
        WitnessFamily::UnitDifference,
        WitnessFamily::StepTwoDifference,
    ];
    families.extend(Pattern::ALL.iter().map(|&pattern| WitnessFamily::Pattern { pattern }));
    for k in 0..8 {
        let alpha = f64::from(1u32 << k);
        families.push(WitnessFamily::Alpha { alpha });
        families.push(WitnessFamily::Alpha { alpha: -alpha });
    }
    let mut out = Vec::new();
    for family in families {
        if let Ok(ws) = witnesses(dim, family) {
            out.extend(ws.into_iter().map(|w| (w.x, w.label)));
        }
    }
    if dim <= SIGN_VECTOR_MAX_DIM {
        out.extend(sign_vectors(dim).into_iter().map(|x| (x, WitnessLabel::SignVector)));
    }
    out
}

/// Estimates `min f` on the unit sphere with `starts` random starts and seed `seed`.
pub fn sphere_min(gen: &GeneratingVector, starts: usize, seed: u64) -> Result<SphereMinResult> {
    sphere_min_with(gen, &SphereMinOptions { starts, seed, ..Default::default() })
}

/// Best over the random starts, the structured candidates and one descent
/// polished from the best candidate; ties go to the earliest entry in that
/// order, so the result is identical under sequential and parallel execution.
pub fn sphere_min_with(gen: &GeneratingVector, opts: &SphereMinOptions) -> Result<SphereMinResult> {
    if opts.starts == 0 {
        return Err(Error::NoStarts);
    }
    gen.half_order()?;
    let dim = gen.dim();
    let mut master = Sampler::new(opts.seed);
    let seeds: Vec<u64> = (0..opts.starts).map(|_| master.next_u64()).collect();

    let runs = opts.execution.map_slice(&seeds, |&s| {
        let start = Sampler::new(s).unit_vector(dim);
        descend(gen, start, opts)
    });
    let converged_starts = runs.iter().filter(|d| d.converged).count();

    let candidates = candidate_points(dim);
    let values = opts.execution.map_slice(&candidates, |(x, _)| {
        let u = normalize(x).expect("candidates are nonzero");
        let f = eval_fast(gen, &u).expect("dimension matches");
        (f, u)
    });

    let mut best_value = f64::INFINITY;
    let mut best: Option<(Vec<f64>, MinimizerSource)> = None;
    for (i, d) in runs.iter().enumerate() {
        if d.value < best_value {
            best_value = d.value;
            best = Some((d.point.clone(), MinimizerSource::RandomStart { start: i }));
        }
    }
    let mut best_candidate: Option<usize> = None;
    for (i, (f, _)) in values.iter().enumerate() {
        if best_candidate.is_none_or(|b| *f < values[b].0) {
            best_candidate = Some(i);
        }
        if *f < best_value {
            best_value = *f;
            best = Some((
                values[i].1.clone(),
                MinimizerSource::Candidate { label: candidates[i].1.clone() },
            ));
        }
    }
    if let Some(b) = best_candidate {
        let polished = descend(gen, values[b].1.clone(), opts);
        if polished.value < best_value {
            best_value = polished.value;
            best = Some((
                polished.point,
                MinimizerSource::PolishedCandidate { label: candidates[b].1.clone() },
            ));
        }
    }

    let (argmin, source) = best.expect("at least one start was evaluated");
    // re-evaluate at the exact reported point
    let min_value = eval_fast(gen, &argmin)?;
    debug_assert!(min_value == best_value || min_value.is_nan() || best_value.is_nan());
    Ok(SphereMinResult {
        min_value,
        argmin,
        source,
        starts: opts.starts,
        converged_starts,
        candidates: candidates.len(),
        seed: opts.seed,
    })
}

/// Sequential reference run, regardless of the `parallel` feature.
pub fn sphere_min_sequential(gen: &GeneratingVector, starts: usize, seed: u64) -> Result<SphereMinResult> {
    sphere_min_with(
        gen,
        &SphereMinOptions { starts, seed, execution: Execution::Sequential, ..Default::default() },
    )
}

pub const JACOBI_RTOL: f64 = 1e-12;
pub const PSD_EIGEN_RTOL: f64 = 1e-9;
const SYMMETRY_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

fn check_symmetric(rows: &[Vec<f64>]) -> Result<f64> {
    let n = rows.len();
    let mut scale = 0.0_f64;
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::NotSquare { row: i, expected: n, got: row.len() });
        }
        scale = scale.max(max_abs(row));
    }
    for i in 0..n {
        for j in i + 1..n {
            if (rows[i][j] - rows[j][i]).abs() > SYMMETRY_TOL * scale.max(1.0) {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
        }
    }
    Ok(scale)
}

/// Eigenvalues of a symmetric matrix, descending, by cyclic Jacobi rotations
/// until the off-diagonal norm drops below `1e-12` of the Frobenius norm.
pub fn symmetric_eigenvalues(rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    check_symmetric(rows)?;
    let n = rows.len();
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let frobenius = a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    let off = |a: &Vec<Vec<f64>>| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i][j] * a[i][j];
                }
            }
        }
        s.sqrt()
    };
    for _ in 0..MAX_SWEEPS {
        if off(&a) <= JACOBI_RTOL * frobenius {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    Ok(eig)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixPsd {
    pub passed: bool,
    pub min_eigenvalue: f64,
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// `1e-9 * max |a_ij|`; the matrix passes when the smallest eigenvalue is at least `-floor`.
    pub floor: f64,
}

pub fn matrix_psd(rows: &[Vec<f64>]) -> Result<MatrixPsd> {
    let scale = check_symmetric(rows)?;
    let eigenvalues = symmetric_eigenvalues(rows)?;
    let min_eigenvalue = eigenvalues.last().copied().unwrap_or(0.0);
    let floor = PSD_EIGEN_RTOL * scale;
    Ok(MatrixPsd { passed: min_eigenvalue >= -floor, min_eigenvalue, eigenvalues, floor })
}
