//! Classical hitting and mixing times.

use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_range, Error, Result};
use crate::linalg::SpectralDecomposition;
use crate::markov::{
    discriminant, discriminant_of, interpolate, stationary_distribution, MarkedSet,
    StationaryDistribution, StochasticMatrix,
};
use crate::policy::policy;
use crate::rng::{derive_seed, rng_from};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HitMethod {
    Spectral,
    MonteCarlo,
}

/// Expected number of steps to reach the marked set from a stationary start
/// conditioned on starting unmarked.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HittingTimeReport {
    pub ht: f64,
    pub method: HitMethod,
    pub stderr: f64,
    pub trials: u64,
    /// Monte Carlo only: the unconditioned sample mean, where marked starts
    /// count as zero steps. Equals `(1 - p_M) * ht`.
    pub raw_mean: f64,
    /// Spectral only: the unmarked block has repeated eigenvalues.
    pub degenerate: bool,
}

/// Hitting time from the unmarked block of the discriminant:
/// `sum_j |<v'_j|U>|^2 / (1 - lambda'_j)`.
pub fn hitting_time_spectral(
    p: &StochasticMatrix,
    pi: &StationaryDistribution,
    marked: &MarkedSet,
) -> Result<HittingTimeReport> {
    if !marked.is_proper() {
        return Err(Error::MarkedSet(
            "hitting time needs a proper nonempty marked set".into(),
        ));
    }
    let unmarked = marked.complement();
    let k = unmarked.len();
    let d_uu = DMatrix::from_fn(k, k, |a, b| {
        let (x, y) = (unmarked[a], unmarked[b]);
        (p.get(x, y) * p.get(y, x)).sqrt()
    });
    let d_uu = (&d_uu + d_uu.transpose()) * 0.5;
    let spec = SpectralDecomposition::hermitian(d_uu);
    let p_m = pi.p_m(marked);
    let u = DVector::from_iterator(k, unmarked.iter().map(|&x| (pi.pi[x] / (1.0 - p_m)).sqrt()));
    let overlaps = spec.overlaps(&u);
    let tol = policy().ill_conditioned;
    let mut ht = 0.0;
    for (j, &lam) in spec.values.iter().enumerate() {
        if lam >= 1.0 - tol {
            return Err(Error::IllConditioned {
                index: j,
                value: lam,
                tol,
            });
        }
        ht += overlaps[j].powi(2) / (1.0 - lam);
    }
    let scale = spec.values.amax().max(1.0);
    let degenerate = spec
        .values
        .as_slice()
        .windows(2)
        .any(|w| (w[1] - w[0]).abs() <= 1e-9 * scale);
    Ok(HittingTimeReport {
        ht,
        method: HitMethod::Spectral,
        stderr: 0.0,
        trials: 0,
        raw_mean: f64::NAN,
        degenerate,
    })
}

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_STEP_BUDGET: u64 = 100_000_000;
const TRIAL_BLOCK: u64 = 4096;

fn cumulative(row: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    row.map(|v| {
        acc += v;
        acc
    })
    .collect()
}

fn sample(cdf: &[f64], u: f64) -> usize {
    let target = u * cdf[cdf.len() - 1];
    cdf.partition_point(|&c| c <= target).min(cdf.len() - 1)
}

/// Random-walk search: sample a start from `pi`, step until a marked state
/// is reached. Trials run in blocks with seeds derived from `seed` and the
/// block index, so the result does not depend on scheduling.
pub fn hitting_time_montecarlo(
    p: &StochasticMatrix,
    marked: &MarkedSet,
    trials: u64,
    seed: u64,
) -> Result<HittingTimeReport> {
    hitting_time_montecarlo_capped(p, marked, trials, seed, DEFAULT_STEP_BUDGET)
}

pub fn hitting_time_montecarlo_capped(
    p: &StochasticMatrix,
    marked: &MarkedSet,
    trials: u64,
    seed: u64,
    step_budget: u64,
) -> Result<HittingTimeReport> {
    if trials == 0 {
        return Err(Error::OutOfRange {
            name: "trials",
            value: 0.0,
            range: ">= 1",
        });
    }
    if marked.is_empty() {
        return Err(Error::MarkedSet("marked set is empty".into()));
    }
    let pi = stationary_distribution(p)?;
    let p_m = pi.p_m(marked);
    let start_cdf = cumulative(pi.pi.iter().copied());
    let rows: Vec<Vec<f64>> = (0..p.n())
        .map(|x| cumulative(p.matrix().row(x).iter().copied()))
        .collect();
    let mask = marked.mask();
    let used = AtomicU64::new(0);
    let blocks = trials.div_ceil(TRIAL_BLOCK);

    let sums = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let count = TRIAL_BLOCK.min(trials - b * TRIAL_BLOCK);
            let mut rng = rng_from(derive_seed(seed, &[b]));
            let (mut sum, mut sum_sq) = (0u128, 0u128);
            for _ in 0..count {
                let mut x = sample(&start_cdf, rng.random());
                let mut steps = 0u64;
                while !mask[x] {
                    x = sample(&rows[x], rng.random());
                    steps += 1;
                    if steps.is_multiple_of(1024) && used.load(Ordering::Relaxed) + steps > step_budget {
                        return Err(Error::Timeout(step_budget));
                    }
                }
                if used.fetch_add(steps, Ordering::Relaxed) + steps > step_budget {
                    return Err(Error::Timeout(step_budget));
                }
                sum += steps as u128;
                sum_sq += (steps as u128) * (steps as u128);
            }
            Ok((sum, sum_sq))
        })
        .collect::<Result<Vec<_>>>()?;

    let (sum, sum_sq) = sums
        .iter()
        .fold((0u128, 0u128), |(a, b), &(c, d)| (a + c, b + d));
    let nt = trials as f64;
    let mean = sum as f64 / nt;
    let var = if trials > 1 {
        ((sum_sq as f64) - nt * mean * mean).max(0.0) / (nt - 1.0)
    } else {
        0.0
    };
    let raw_stderr = (var / nt).sqrt();
    // Marked starts contribute zero; condition on an unmarked start.
    let (ht, stderr) = if p_m < 1.0 {
        (mean / (1.0 - p_m), raw_stderr / (1.0 - p_m))
    } else {
        (0.0, 0.0)
    };
    Ok(HittingTimeReport {
        ht,
        method: HitMethod::MonteCarlo,
        stderr,
        trials,
        raw_mean: mean,
        degenerate: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HtPoint {
    pub s: f64,
    pub ht_s: f64,
    /// `HT(s) (1 - s(1 - p_M))^2 / p_M^2`.
    pub ht_plus_estimate: f64,
    /// `(1/Delta(s)) sum_j |<v_j(s)|U>|^2`, an upper bound on `HT(s)`.
    pub gap_bound: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtendedHittingTimeReport {
    pub ht_plus: f64,
    pub per_s: Vec<HtPoint>,
    /// Max relative deviation of the per-s estimates from their mean.
    pub invariance_residual: f64,
    /// Set when the residual exceeds 1e-6.
    pub warning: Option<String>,
}

impl ExtendedHittingTimeReport {
    pub fn per_s_values(&self) -> Vec<(f64, f64)> {
        self.per_s.iter().map(|pt| (pt.s, pt.ht_s)).collect()
    }
}

/// Interpolated hitting time `HT(s) = sum_{j<n} |<v_j(s)|U>|^2 / (1 - lambda_j(s))`
/// on each grid point, rescaled to the extended hitting time.
pub fn extended_hitting_time(
    p: &StochasticMatrix,
    pi: &StationaryDistribution,
    marked: &MarkedSet,
    s_grid: &[f64],
) -> Result<ExtendedHittingTimeReport> {
    if s_grid.is_empty() {
        return Err(Error::OutOfRange {
            name: "s_grid length",
            value: 0.0,
            range: ">= 1",
        });
    }
    if !marked.is_proper() {
        return Err(Error::MarkedSet(
            "extended hitting time needs a proper nonempty marked set".into(),
        ));
    }
    let p_m = pi.p_m(marked);
    let mask = marked.mask();
    let root = pi.sqrt();
    let u = DVector::from_iterator(
        pi.n(),
        root.iter()
            .zip(&mask)
            .map(|(&r, &m)| if m { 0.0 } else { r / (1.0 - p_m).sqrt() }),
    );
    let n = p.n();
    let mut per_s = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        check_range("s", s, "[0, 1 - 1e-6]", (0.0..=1.0 - 1e-6).contains(&s))?;
        let d = discriminant(&interpolate(p, marked, s)?)?;
        let ov = d.spectrum.overlaps(&u);
        let gap = d.gap();
        let mut ht_s = 0.0;
        let mut weight = 0.0;
        for j in 0..n - 1 {
            let w = ov[j].powi(2);
            ht_s += w / (1.0 - d.spectrum.values[j]);
            weight += w;
        }
        let norm = 1.0 - s * (1.0 - p_m);
        per_s.push(HtPoint {
            s,
            ht_s,
            ht_plus_estimate: ht_s * norm * norm / (p_m * p_m),
            gap_bound: weight / gap,
            gap,
        });
    }
    let ht_plus = per_s.iter().map(|pt| pt.ht_plus_estimate).sum::<f64>() / per_s.len() as f64;
    let invariance_residual = per_s
        .iter()
        .map(|pt| ((pt.ht_plus_estimate - ht_plus) / ht_plus).abs())
        .fold(0.0, f64::max);
    let warning = (invariance_residual > 1e-6).then(|| {
        let values: Vec<String> = per_s
            .iter()
            .map(|pt| format!("s={}: {}", pt.s, pt.ht_plus_estimate))
            .collect();
        format!(
            "extended hitting time not invariant in s (residual {invariance_residual:e}): {}",
            values.join(", ")
        )
    });
    Ok(ExtendedHittingTimeReport {
        ht_plus,
        per_s,
        invariance_residual,
        warning,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalMixingReport {
    pub t_mix_empirical: u64,
    pub t_mix_bound: f64,
    pub epsilon: f64,
    pub gap: f64,
}

/// `max_x (1/2) |e_x P^t - pi|_1` given the matrix `P^t`.
pub fn worst_tv(pt: &DMatrix<f64>, pi: &StationaryDistribution) -> f64 {
    pt.row_iter()
        .map(|row| {
            0.5 * row
                .iter()
                .zip(pi.pi.iter())
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

fn matrix_power(m: &DMatrix<f64>, mut e: u64) -> DMatrix<f64> {
    let n = m.nrows();
    let mut result = DMatrix::identity(n, n);
    let mut base = m.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    result
}

const MAX_DOUBLINGS: u32 = 62;

pub fn classical_mixing_time(
    p: &StochasticMatrix,
    pi: &StationaryDistribution,
    epsilon: f64,
) -> Result<ClassicalMixingReport> {
    check_range("epsilon", epsilon, "(0, 1)", epsilon > 0.0 && epsilon < 1.0)?;
    let gap = discriminant_of(p, 0.0).gap();
    let t_mix_bound = (1.0 / gap) * (1.0 / (epsilon * pi.min())).ln();

    // Doubling: keep P^lo with distance above epsilon and P^hi below.
    let m = p.matrix();
    let mut hi = 1u64;
    let mut p_hi = m.clone();
    let mut p_lo = DMatrix::identity(p.n(), p.n());
    let mut lo = 0u64;
    let mut doublings = 0;
    while worst_tv(&p_hi, pi) > epsilon {
        if doublings == MAX_DOUBLINGS {
            return Err(Error::Timeout(hi));
        }
        lo = hi;
        p_lo = p_hi.clone();
        p_hi = &p_hi * &p_hi;
        hi *= 2;
        doublings += 1;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let p_mid = &p_lo * matrix_power(m, mid - lo);
        if worst_tv(&p_mid, pi) > epsilon {
            lo = mid;
            p_lo = p_mid;
        } else {
            hi = mid;
        }
    }
    Ok(ClassicalMixingReport {
        t_mix_empirical: hi,
        t_mix_bound,
        epsilon,
        gap,
    })
}

/// Worst-case total-variation distance at each requested time.
pub fn classical_mixing_trace(
    p: &StochasticMatrix,
    pi: &StationaryDistribution,
    times: &[u64],
) -> Vec<(u64, f64)> {
    times
        .iter()
        .map(|&t| (t, worst_tv(&matrix_power(p.matrix(), t), pi)))
        .collect()
}
