//! Erdos-Renyi graphs `G(n, p)` and spectral statistics of the normalized
//! adjacency matrix `A / (np)`.

use std::collections::VecDeque;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_range, Error, Result};
use crate::linalg::SpectralDecomposition;
use crate::pointer::ModeBasis;
use crate::qlsamp::{first_crossing, gap_statistics, geometric_grid, GapStatistics};
use crate::rng::{derive_seed, rng_from};

/// Default size cap for dense eigensolves.
pub const MAX_N: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct GnpSample {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub adjacency: DMatrix<f64>,
    pub normalized: DMatrix<f64>,
    pub spectrum: SpectralDecomposition,
    pub edges: usize,
}

impl GnpSample {
    pub fn connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            for y in 0..self.n {
                if self.adjacency[(x, y)] > 0.0 && !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen.iter().all(|&b| b)
    }

    pub fn lambda_top(&self) -> f64 {
        self.spectrum.values[self.n - 1]
    }
}

/// Independent coin flips on the upper triangle, visited row by row.
pub fn sample_gnp(n: usize, p: f64, seed: u64) -> Result<GnpSample> {
    check_range("n", n as f64, "[2, 2000]", (2..=MAX_N).contains(&n))?;
    check_range("p", p, "(0, 1)", p > 0.0 && p < 1.0)?;
    let mut rng = rng_from(seed);
    let mut adjacency = DMatrix::zeros(n, n);
    let mut edges = 0;
    for x in 0..n {
        for y in (x + 1)..n {
            if rng.random::<f64>() < p {
                adjacency[(x, y)] = 1.0;
                adjacency[(y, x)] = 1.0;
                edges += 1;
            }
        }
    }
    let normalized = &adjacency / (n as f64 * p);
    let spectrum = SpectralDecomposition::hermitian(normalized.clone());
    Ok(GnpSample {
        n,
        p,
        seed,
        adjacency,
        normalized,
        spectrum,
        edges,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemicircleModel {
    pub n: usize,
    pub p: f64,
    /// `2 sqrt(np(1-p))`, the bulk edge of `A`.
    pub radius: f64,
    /// `2 sqrt((1-p)/(np))`, the bulk edge of `A/(np)`.
    pub radius_norm: f64,
    /// `gamma_1 < ... < gamma_{n-1}`.
    pub locations: Vec<f64>,
}

impl SemicircleModel {
    pub fn density(&self, x: f64) -> f64 {
        semicircle_density(x, self.radius_norm)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        semicircle_cdf(x, self.radius_norm)
    }
}

pub fn semicircle_density(x: f64, r: f64) -> f64 {
    if x.abs() >= r {
        0.0
    } else {
        2.0 * (r * r - x * x).sqrt() / (PI * r * r)
    }
}

pub fn semicircle_cdf(x: f64, r: f64) -> f64 {
    if x <= -r {
        0.0
    } else if x >= r {
        1.0
    } else {
        0.5 + x * (r * r - x * x).sqrt() / (PI * r * r) + (x / r).asin() / PI
    }
}

/// Solve `F(gamma_i) = i/n` for `i = 1..n-1` by bisection.
pub fn classical_locations(n: usize, p: f64) -> Result<SemicircleModel> {
    check_range("n", n as f64, ">= 4", n >= 4)?;
    check_range("p", p, "(0, 1)", p > 0.0 && p < 1.0)?;
    let nf = n as f64;
    let radius_norm = 2.0 * ((1.0 - p) / (nf * p)).sqrt();
    let locations = (1..n)
        .map(|i| {
            let target = i as f64 / nf;
            let (mut lo, mut hi) = (-radius_norm, radius_norm);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let f = semicircle_cdf(mid, radius_norm);
                if (f - target).abs() <= 1e-15 {
                    return mid;
                }
                if f < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect();
    Ok(SemicircleModel {
        n,
        p,
        radius: 2.0 * (nf * p * (1.0 - p)).sqrt(),
        radius_norm,
        locations,
    })
}

/// Smallest `c` with `gamma_{i+r} - gamma_i >= c r / (n^{7/6} i^{1/3} sqrt p)`
/// over `i <= n/2`, `r <= n - 2i`.
pub fn spacing_constant(m: &SemicircleModel) -> f64 {
    let n = m.n;
    let nf = n as f64;
    let mut c = f64::INFINITY;
    for i in 1..=n / 2 {
        for r in 1..=(n - 2 * i).min(n - 1 - i) {
            let gap = m.locations[i + r - 1] - m.locations[i - 1];
            let scale = r as f64 / (nf.powf(7.0 / 6.0) * (i as f64).cbrt() * m.p.sqrt());
            c = c.min(gap / scale);
        }
    }
    c
}

/// Kolmogorov-Smirnov distance between sorted samples and the semicircle.
pub fn ks_semicircle(sorted: &[f64], r: f64) -> f64 {
    let m = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = semicircle_cdf(x, r);
            (f - i as f64 / m).abs().max(((i + 1) as f64 / m - f).abs())
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RmtReport {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub connected: bool,
    pub lambda_top: f64,
    pub lambda_second: f64,
    pub delta_min: f64,
    pub avg_gap: f64,
    /// Bulk average gap, excluding the top eigenvalue.
    pub bulk_avg_gap: f64,
    pub deloc_max: f64,
    /// Bulk indices with `|lambda_i - gamma_i|` above the rigidity envelope.
    pub rigidity_violations: usize,
    /// Same count after adding back the deterministic `1/n` bulk shift.
    pub rigidity_violations_centered: usize,
    pub rigidity_max_ratio: f64,
    pub sigma1: f64,
    pub sigma: f64,
    pub simple_spectrum: bool,
    /// KS distance of the bulk against the semicircle.
    pub ks: f64,
    /// Sorted normalized bulk gaps `delta_i n^{3/2} sqrt(p)`; their
    /// empirical CDF is the tail histogram.
    pub tail_hist: Vec<f64>,
    /// Least-squares `C` in `P(gap <= x) ~ C x log n` over the lower quartile.
    pub tail_c: f64,
}

/// `n^eps (n^{-2/3} alpha_i^{-1/3} + n^{-1-phi}) / sqrt(pn)` with
/// `alpha_i = max(i, n - i)` and `phi = log p / log n`.
pub fn rigidity_envelope(n: usize, p: f64, i: usize, eps: f64) -> f64 {
    let nf = n as f64;
    let alpha = i.max(n - i) as f64;
    let phi = p.ln() / nf.ln();
    nf.powf(eps) * (nf.powf(-2.0 / 3.0) * alpha.powf(-1.0 / 3.0) + nf.powf(-1.0 - phi))
        / (p * nf).sqrt()
}

pub fn rmt_report(sample: &GnpSample, model: &SemicircleModel, eps_exponent: f64) -> Result<RmtReport> {
    if model.n != sample.n {
        return Err(Error::DimensionMismatch {
            expected: sample.n,
            got: model.n,
        });
    }
    let n = sample.n;
    let values = sample.spectrum.values.as_slice();
    let bulk = &values[..n - 1];

    let mut rigidity_violations = 0;
    let mut rigidity_violations_centered = 0;
    let mut rigidity_max_ratio = 0.0_f64;
    // The zero diagonal makes E[A] = p(J - I), which moves the whole bulk of
    // A/(np) down by exactly 1/n.
    let shift = 1.0 / n as f64;
    for (k, (&lam, &gamma)) in bulk.iter().zip(&model.locations).enumerate() {
        let env = rigidity_envelope(n, sample.p, k + 1, eps_exponent);
        let ratio = (lam - gamma).abs() / env;
        rigidity_max_ratio = rigidity_max_ratio.max(ratio);
        if ratio > 1.0 {
            rigidity_violations += 1;
        }
        if (lam + shift - gamma).abs() > env {
            rigidity_violations_centered += 1;
        }
    }
    let deloc_max = sample.spectrum.vectors.amax();
    let stats: GapStatistics = gap_statistics(values, 1e-12)?;

    let scale = (n as f64).powf(1.5) * sample.p.sqrt();
    let mut tail_hist: Vec<f64> = bulk.windows(2).map(|w| (w[1] - w[0]) * scale).collect();
    tail_hist.sort_by(f64::total_cmp);
    let m = tail_hist.len() as f64;
    let log_n = (n as f64).ln();
    let quartile = (tail_hist.len() / 4).max(1);
    let (num, den) = tail_hist[..quartile]
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(a, b), (i, &x)| {
            let u = x * log_n;
            (a + ((i + 1) as f64 / m) * u, b + u * u)
        });

    Ok(RmtReport {
        n,
        p: sample.p,
        seed: sample.seed,
        connected: sample.connected(),
        lambda_top: values[n - 1],
        lambda_second: values[n - 2],
        delta_min: stats.delta_min,
        avg_gap: stats.avg_gap,
        bulk_avg_gap: (bulk[n - 2] - bulk[0]) / (n - 2) as f64,
        deloc_max,
        rigidity_violations,
        rigidity_violations_centered,
        rigidity_max_ratio,
        sigma1: stats.sigma1(),
        sigma: stats.sigma,
        simple_spectrum: stats.simple_spectrum,
        ks: ks_semicircle(bulk, model.radius_norm),
        tail_c: if den > 0.0 { num / den } else { f64::NAN },
        tail_hist,
    })
}

/// Inclusive `start:stop:step` size list, or several specs joined by commas
/// such as `"50,100,200"`.
pub fn parse_sizes(spec: &str) -> Result<Vec<usize>> {
    if spec.contains(',') {
        let mut out = Vec::new();
        for part in spec.split(',').filter(|p| !p.trim().is_empty()) {
            out.extend(parse_sizes(part)?);
        }
        return Ok(out);
    }
    let parts: Vec<&str> = spec.split(':').collect();
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("size spec {spec:?}: {e}")))
    };
    match parts.as_slice() {
        [single] => Ok(vec![parse(single)?]),
        [a, b] => Ok((parse(a)?..=parse(b)?).collect()),
        [a, b, c] => {
            let step = parse(c)?;
            if step == 0 {
                return Err(Error::Parse("size step must be positive".into()));
            }
            Ok((parse(a)?..=parse(b)?).step_by(step).collect())
        }
        _ => Err(Error::Parse(format!("size spec {spec:?} is not start:stop:step"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingCell {
    pub n: usize,
    pub seed_index: usize,
    pub seed: u64,
    pub t_mix: Option<f64>,
    pub sigma: f64,
    pub sigma1: f64,
    pub delta_min: f64,
    pub deloc_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingExponentResult {
    pub cells: Vec<MixingCell>,
    /// `(n, median t_mix)` over cells that crossed.
    pub per_size_median: Vec<(usize, f64)>,
    pub exponent_c: f64,
    pub intercept: f64,
    /// RMS residual of the log-log fit.
    pub fit_residual: f64,
    /// Cells without a crossing by `t_max`.
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixingExperiment {
    pub sizes: Vec<usize>,
    pub p: f64,
    pub epsilon: f64,
    pub seeds_per_size: usize,
    pub t_max: f64,
    pub master_seed: u64,
    /// Geometric grid resolution.
    pub points_per_decade: usize,
}

impl MixingExperiment {
    pub fn grid(&self) -> Vec<f64> {
        let t_min = 0.1;
        let decades = (self.t_max / t_min).log10();
        let points = (decades * self.points_per_decade as f64).ceil() as usize + 1;
        geometric_grid(t_min, self.t_max, points)
    }
}

pub fn cell_seed(master: u64, n: usize, seed_index: usize) -> u64 {
    derive_seed(master, &[n as u64, seed_index as u64])
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Least squares `y = c x + b`; returns `(c, b, rms residual)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let c = sxy / sxx;
    let b = my - c * mx;
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - c * x - b).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    (c, b, rms)
}

/// Quantum mixing time of the walk `e^{-i A t/(np)}` from node 0 across
/// sizes and seeds, and the exponent of `t_mix ~ n^c`.
pub fn mixing_exponent_experiment(cfg: &MixingExperiment) -> Result<MixingExponentResult> {
    if cfg.sizes.iter().any(|&n| n < 10) || cfg.sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::OutOfRange {
            name: "sizes",
            value: f64::NAN,
            range: "strictly increasing, each >= 10",
        });
    }
    check_range("epsilon", cfg.epsilon, "(0, 1)", cfg.epsilon > 0.0 && cfg.epsilon < 1.0)?;
    check_range("t_max", cfg.t_max, "> 0.1", cfg.t_max > 0.1)?;
    let grid = cfg.grid();
    let jobs: Vec<(usize, usize)> = cfg
        .sizes
        .iter()
        .flat_map(|&n| (0..cfg.seeds_per_size).map(move |k| (n, k)))
        .collect();
    let cells = jobs
        .par_iter()
        .map(|&(n, k)| {
            let seed = cell_seed(cfg.master_seed, n, k);
            let g = sample_gnp(n, cfg.p, seed)?;
            let modes = ModeBasis::from(&g.spectrum);
            let mut psi = DVector::zeros(n);
            psi[0] = Complex64::new(1.0, 0.0);
            let t_mix = first_crossing(&modes, &psi, cfg.epsilon, &grid)?;
            let stats = gap_statistics(g.spectrum.values.as_slice(), 1e-12)?;
            Ok(MixingCell {
                n,
                seed_index: k,
                seed,
                t_mix,
                sigma: stats.sigma,
                sigma1: stats.sigma1(),
                delta_min: stats.delta_min,
                deloc_max: g.spectrum.vectors.amax(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let excluded = cells.iter().filter(|c| c.t_mix.is_none()).count();
    let per_size_median: Vec<(usize, f64)> = cfg
        .sizes
        .iter()
        .filter_map(|&n| {
            let mut ts: Vec<f64> = cells
                .iter()
                .filter(|c| c.n == n)
                .filter_map(|c| c.t_mix)
                .collect();
            (!ts.is_empty()).then(|| (n, median(&mut ts)))
        })
        .collect();
    let (exponent_c, intercept, fit_residual) = if per_size_median.len() >= 2 {
        let xs: Vec<f64> = per_size_median.iter().map(|&(n, _)| (n as f64).ln()).collect();
        let ys: Vec<f64> = per_size_median.iter().map(|&(_, t)| t.ln()).collect();
        linear_fit(&xs, &ys)
    } else {
        (f64::NAN, f64::NAN, f64::NAN)
    };
    Ok(MixingExponentResult {
        cells,
        per_size_median,
        exponent_c,
        intercept,
        fit_residual,
        excluded,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaRow {
    pub n: usize,
    pub seed_index: usize,
    pub seed: u64,
    pub sigma1: f64,
    pub sigma: f64,
    pub delta_min: f64,
    pub deloc_max: f64,
    pub simple_spectrum: bool,
    /// `Sigma_1 <= n^2.7 sqrt p`.
    pub sigma1_ok: bool,
    /// `Sigma <= n^(2.7 - log p / log n) sqrt p`.
    pub sigma_ok: bool,
    /// `Delta_min >= n^-2.7 / sqrt p`.
    pub delta_ok: bool,
    /// `deloc_max <= n^-0.3`.
    pub deloc_ok: bool,
    /// `Sigma >= 1 / Delta_min`.
    pub sigma_lower_ok: bool,
    /// Bulk average gap within a factor 4 of `1 / (n^1.5 sqrt p)`.
    pub avg_gap_ok: bool,
}

pub const EXPONENT_SLACK: f64 = 0.2;

pub fn sigma_row(g: &GnpSample, seed_index: usize) -> Result<SigmaRow> {
    let n = g.n;
    let nf = n as f64;
    let sp = g.p.sqrt();
    let stats = gap_statistics(g.spectrum.values.as_slice(), 1e-12)?;
    let deloc_max = g.spectrum.vectors.amax();
    let values = g.spectrum.values.as_slice();
    let bulk_avg = (values[n - 2] - values[0]) / (n - 2) as f64;
    let scale = 1.0 / (nf.powf(1.5) * sp);
    let e = 2.5 + EXPONENT_SLACK;
    Ok(SigmaRow {
        n,
        seed_index,
        seed: g.seed,
        sigma1: stats.sigma1(),
        sigma: stats.sigma,
        delta_min: stats.delta_min,
        deloc_max,
        simple_spectrum: stats.simple_spectrum,
        sigma1_ok: stats.sigma1() <= nf.powf(e) * sp,
        sigma_ok: stats.sigma <= nf.powf(e - g.p.ln() / nf.ln()) * sp,
        delta_ok: stats.delta_min >= nf.powf(-e) / sp,
        deloc_ok: deloc_max <= nf.powf(-0.5 + EXPONENT_SLACK),
        sigma_lower_ok: stats.sigma >= 1.0 / stats.delta_min,
        avg_gap_ok: bulk_avg <= 4.0 * scale && bulk_avg >= scale / 4.0,
    })
}

pub fn sigma_scaling_experiment(
    sizes: &[usize],
    p: f64,
    seeds_per_size: usize,
    master_seed: u64,
) -> Result<Vec<SigmaRow>> {
    let jobs: Vec<(usize, usize)> = sizes
        .iter()
        .flat_map(|&n| (0..seeds_per_size).map(move |k| (n, k)))
        .collect();
    jobs.par_iter()
        .map(|&(n, k)| sigma_row(&sample_gnp(n, p, cell_seed(master_seed, n, k))?, k))
        .collect()
}

/// Fraction of rows passing `check`, per size.
pub fn pass_rates(rows: &[SigmaRow], check: impl Fn(&SigmaRow) -> bool) -> Vec<(usize, f64)> {
    let mut sizes: Vec<usize> = rows.iter().map(|r| r.n).collect();
    sizes.dedup();
    sizes
        .into_iter()
        .map(|n| {
            let of_n: Vec<&SigmaRow> = rows.iter().filter(|r| r.n == n).collect();
            let ok = of_n.iter().filter(|r| check(r)).count();
            (n, ok as f64 / of_n.len() as f64)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn near_complete_graph() {
        let g = sample_gnp(8, 1.0 - 1e-12, 5).unwrap();
        assert_eq!(g.edges, 28);
        // A/(np) of K_8 has top eigenvalue (n - 1)/(np).
        let expect = 7.0 / (8.0 * (1.0 - 1e-12));
        assert!((g.lambda_top() - expect).abs() < 1e-12);
        assert!((g.lambda_top() - 7.0 / 8.0).abs() < 1e-10);
    }

    #[test]
    fn edge_count_within_binomial_band() {
        let g = sample_gnp(100, 0.5, 11).unwrap();
        let pairs = 4950.0;
        let sd = (pairs * 0.25f64).sqrt();
        assert!((g.edges as f64 - 0.5 * pairs).abs() <= 5.0 * sd);
        assert_eq!(g.adjacency, g.adjacency.transpose());
        assert!((0..100).all(|i| g.adjacency[(i, i)] == 0.0));
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_gnp(40, 0.3, 99).unwrap();
        let b = sample_gnp(40, 0.3, 99).unwrap();
        assert_eq!(a.adjacency, b.adjacency);
        let model = classical_locations(40, 0.3).unwrap();
        assert_eq!(rmt_report(&a, &model, 0.25).unwrap(), rmt_report(&b, &model, 0.25).unwrap());
        assert_ne!(a.adjacency, sample_gnp(40, 0.3, 100).unwrap().adjacency);
    }

    #[test]
    fn locations_are_symmetric_and_normalized() {
        let m = classical_locations(100, 0.5).unwrap();
        assert!(m.locations.windows(2).all(|w| w[1] > w[0]));
        assert!(m.locations[49].abs() < 1e-12);
        for i in 0..49 {
            assert!((m.locations[i] + m.locations[98 - i]).abs() < 1e-12);
        }
        // Simpson rule on the density.
        let r = m.radius_norm;
        let k = 200_000;
        let h = 2.0 * r / k as f64;
        let mut s = m.density(-r) + m.density(r);
        for i in 1..k {
            let x = -r + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * m.density(x);
        }
        assert!((s * h / 3.0 - 1.0).abs() < 1e-6);
        assert!((m.cdf(r) - 1.0).abs() < 1e-15 && m.cdf(-r) == 0.0);
        assert!((m.cdf(0.3 * r) - 0.5 - (0.3 * (1.0f64 - 0.09).sqrt() + 0.3f64.asin()) / PI).abs() < 1e-14);
    }

    #[test]
    fn location_spacing_constant_is_positive() {
        let m = classical_locations(200, 0.5).unwrap();
        let c = spacing_constant(&m);
        assert!(c > 0.1 && c.is_finite(), "{c}");
        // Larger n keeps the fitted constant of the same order.
        let c400 = spacing_constant(&classical_locations(400, 0.5).unwrap());
        assert!((c400 / c - 1.0).abs() < 0.5);
    }

    #[test]
    fn report_on_dense_sample() {
        let g = sample_gnp(200, 0.5, 3).unwrap();
        let m = classical_locations(200, 0.5).unwrap();
        let r = rmt_report(&g, &m, 0.25).unwrap();
        assert!(r.connected && r.simple_spectrum);
        assert!((r.lambda_top - 1.0).abs() <= 10.0 * (0.5f64 / 100.0).sqrt());
        assert!(r.lambda_second <= 6.0 / 100f64.sqrt());
        assert!(r.sigma >= 1.0 / r.delta_min);
        assert_eq!(r.tail_hist.len(), 198);
        assert!(r.ks < 0.1);
    }

    #[test]
    fn size_specs() {
        assert_eq!(parse_sizes("10:30:10").unwrap(), vec![10, 20, 30]);
        assert_eq!(parse_sizes("5").unwrap(), vec![5]);
        assert_eq!(parse_sizes("3:5").unwrap(), vec![3, 4, 5]);
        assert!(parse_sizes("1:2:0").is_err());
        assert!(parse_sizes("a:b").is_err());
        assert_eq!(parse_sizes("50,100,200").unwrap(), vec![50, 100, 200]);
        assert_eq!(parse_sizes("10:20:10,40").unwrap(), vec![10, 20, 40]);
    }

    #[test]
    fn fit_recovers_a_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 1.5 * x - 2.0).collect();
        let (c, b, r) = linear_fit(&xs, &ys);
        assert!((c - 1.5).abs() < 1e-12 && (b + 2.0).abs() < 1e-12 && r < 1e-12);
    }

    #[test]
    fn gnp50_mixes_within_ten_thousand() {
        let grid = geometric_grid(0.1, 1e4, 200);
        for k in 0..3 {
            let g = sample_gnp(50, 0.5, cell_seed(4, 50, k)).unwrap();
            let modes = ModeBasis::from(&g.spectrum);
            let mut psi = DVector::zeros(50);
            psi[0] = Complex64::new(1.0, 0.0);
            let t = first_crossing(&modes, &psi, 0.1, &grid).unwrap();
            assert!(t.is_some_and(|t| t <= 1e4), "seed {k}: {t:?}");
        }
    }

    #[test]
    fn rigidity_at_n200() {
        let m = classical_locations(200, 0.5).unwrap();
        let mut clean = 0;
        for k in 0..20 {
            let g = sample_gnp(200, 0.5, cell_seed(1, 200, k)).unwrap();
            let r = rmt_report(&g, &m, 0.25).unwrap();
            // The literal count sees the deterministic -1/n bulk shift; the
            // envelope at n = 200 is about as wide as that shift.
            assert!(r.rigidity_violations >= r.rigidity_violations_centered);
            if r.rigidity_violations_centered == 0 {
                clean += 1;
            }
        }
        assert!(clean >= 18, "{clean}/20 seeds without violations");
    }

    #[test]
    fn top_eigenvalue_fluctuation_scales_like_inverse_n() {
        // At p = 1/2, lambda_top - 1 has mean ~0 and spread sqrt(2p(1-p))/(np).
        let sizes = [50usize, 100, 200, 400];
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for &n in &sizes {
            let rms = ((0..20)
                .map(|k| {
                    let g = sample_gnp(n, 0.5, cell_seed(2, n, k)).unwrap();
                    (g.lambda_top() - 1.0).powi(2)
                })
                .sum::<f64>()
                / 20.0)
                .sqrt();
            xs.push((n as f64).ln());
            ys.push(rms.ln());
        }
        let (slope, _, _) = linear_fit(&xs, &ys);
        assert!((-1.3..=-0.7).contains(&slope), "slope {slope:.3}");
    }

    #[test]
    fn smaller_epsilon_mixes_later() {
        let g = sample_gnp(30, 0.5, 8).unwrap();
        let modes = ModeBasis::from(&g.spectrum);
        let mut psi = DVector::zeros(30);
        psi[0] = Complex64::new(1.0, 0.0);
        let grid = geometric_grid(0.1, 1e5, 400);
        let loose = first_crossing(&modes, &psi, 0.2, &grid).unwrap().unwrap();
        let tight = first_crossing(&modes, &psi, 0.05, &grid).unwrap().unwrap();
        assert!(loose <= tight);
    }
}
