//! Time-averaged quantum walk distributions, quantum mixing times and
//! eigenvalue-gap statistics.
//!
//! Spectra enter as a [`ModeBasis`]: energies plus orthonormal modes. A full
//! [`SpectralDecomposition`](crate::linalg::SpectralDecomposition) converts
//! with `ModeBasis::from`. Outcomes are computational basis indices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_range, Error, Result};
use crate::markov::Discriminant;
use crate::pointer::ModeBasis;

/// `(1/T) int_0^T e^{-i delta t} dt = e^{-i delta T/2} sinc(delta T / 2)`.
pub fn time_average_kernel(delta: f64, t: f64) -> Complex64 {
    let x = delta * t / 2.0;
    let sinc = if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    };
    Complex64::from_polar(sinc, -x)
}

/// `W[f, i] = <f|v_i><v_i|psi0>` restricted to the requested outcomes.
fn weights(modes: &ModeBasis, psi0: &DVector<Complex64>, outcomes: &[usize]) -> DMatrix<Complex64> {
    let c = modes.vectors.ad_mul(psi0);
    DMatrix::from_fn(outcomes.len(), modes.len(), |r, i| {
        modes.vectors[(outcomes[r], i)] * c[i]
    })
}

fn all_outcomes(modes: &ModeBasis, outcomes: Option<&[usize]>) -> Vec<usize> {
    outcomes.map_or_else(|| (0..modes.dim()).collect(), <[usize]>::to_vec)
}

fn check_psi(modes: &ModeBasis, psi0: &DVector<Complex64>) -> Result<()> {
    if psi0.len() != modes.dim() {
        return Err(Error::DimensionMismatch {
            expected: modes.dim(),
            got: psi0.len(),
        });
    }
    let norm = psi0.norm();
    check_range("|psi0|", norm, "1 +- 1e-10", (norm - 1.0).abs() <= 1e-10)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeAveragedDistribution {
    pub probs: Vec<f64>,
    pub t: f64,
    /// Largest imaginary part discarded from the closed form.
    pub imag_residue: f64,
}

fn averaged_probs(w: &DMatrix<Complex64>, energies: &[f64], t: f64) -> (Vec<f64>, f64) {
    let m = energies.len();
    let k = DMatrix::from_fn(m, m, |i, l| time_average_kernel(energies[i] - energies[l], t));
    let wk = w * k;
    let mut imag = 0.0_f64;
    let probs = (0..w.nrows())
        .map(|f| {
            let z: Complex64 = (0..m).map(|l| wk[(f, l)] * w[(f, l)].conj()).sum();
            imag = imag.max(z.im.abs());
            z.re
        })
        .collect();
    (probs, imag)
}

/// `P_f(T) = (1/T) int_0^T |<f|e^{-iHt}|psi0>|^2 dt` in closed form.
pub fn time_averaged_distribution(
    modes: &ModeBasis,
    psi0: &DVector<Complex64>,
    t: f64,
    outcomes: Option<&[usize]>,
) -> Result<TimeAveragedDistribution> {
    check_range("T", t, "> 0", t > 0.0)?;
    check_psi(modes, psi0)?;
    let w = weights(modes, psi0, &all_outcomes(modes, outcomes));
    let (probs, imag_residue) = averaged_probs(&w, &modes.energies, t);
    Ok(TimeAveragedDistribution {
        probs,
        t,
        imag_residue,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitingDistribution {
    pub probs: Vec<f64>,
    pub degeneracy_tol: f64,
    /// Mode indices grouped by (numerically) equal energy.
    pub groups: Vec<Vec<usize>>,
}

impl LimitingDistribution {
    pub fn is_simple(&self) -> bool {
        self.groups.iter().all(|g| g.len() == 1)
    }
}

/// Default grouping tolerance: `1e-9 (E_max - E_min)`.
pub fn default_degeneracy_tol(energies: &[f64]) -> f64 {
    let (lo, hi) = energies
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &e| (a.min(e), b.max(e)));
    if hi > lo {
        1e-9 * (hi - lo)
    } else {
        0.0
    }
}

fn energy_groups(energies: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..energies.len()).collect();
    order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some(g) if energies[i] - energies[*g.last().unwrap()] <= tol => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
}

/// `T -> infinity` limit: `sum_groups |sum_{i in group} <f|v_i><v_i|psi0>|^2`.
pub fn limiting_distribution(
    modes: &ModeBasis,
    psi0: &DVector<Complex64>,
    outcomes: Option<&[usize]>,
    degeneracy_tol: Option<f64>,
) -> Result<LimitingDistribution> {
    check_psi(modes, psi0)?;
    let tol = degeneracy_tol.unwrap_or_else(|| default_degeneracy_tol(&modes.energies));
    let groups = energy_groups(&modes.energies, tol);
    let w = weights(modes, psi0, &all_outcomes(modes, outcomes));
    let probs = (0..w.nrows())
        .map(|f| {
            groups
                .iter()
                .map(|g| g.iter().map(|&i| w[(f, i)]).sum::<Complex64>().norm_sqr())
                .sum()
        })
        .collect();
    Ok(LimitingDistribution {
        probs,
        degeneracy_tol: tol,
        groups,
    })
}

/// Gap quantities of one spectrum. Sums over eigenvalue pairs count each
/// unordered pair once.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapStatistics {
    pub spectrum: Vec<f64>,
    /// Distinct values after merging those within the tolerance.
    pub distinct: Vec<f64>,
    /// Consecutive gaps of the distinct values.
    pub deltas: Vec<f64>,
    pub delta: f64,
    pub delta_min: f64,
    pub avg_gap: f64,
    pub sigma: f64,
    /// `sigma_r[r - 1] = sum_i 1 / (lambda_{i+r} - lambda_i)`.
    pub sigma_r: Vec<f64>,
    pub simple_spectrum: bool,
}

impl GapStatistics {
    pub fn sigma1(&self) -> f64 {
        self.sigma_r[0]
    }

    /// `1/Delta_min <= Sigma <= k ln k / Delta_min` with `k` distinct values.
    pub fn sandwich(&self) -> (f64, f64) {
        let k = self.distinct.len() as f64;
        (1.0 / self.delta_min, k * k.ln() / self.delta_min)
    }

    pub fn sandwich_holds(&self) -> bool {
        let (lo, hi) = self.sandwich();
        lo <= self.sigma && self.sigma <= hi
    }
}

pub fn gap_statistics(spectrum: &[f64], tol: f64) -> Result<GapStatistics> {
    if spectrum.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::DegenerateSpectrum("spectrum must be sorted ascending".into()));
    }
    let mut distinct: Vec<f64> = Vec::new();
    let mut simple_spectrum = true;
    for &x in spectrum {
        match distinct.last() {
            Some(&last) if x - last <= tol => simple_spectrum = false,
            _ => distinct.push(x),
        }
    }
    let k = distinct.len();
    if k < 2 {
        return Err(Error::DegenerateSpectrum(
            "fewer than two distinct eigenvalues".into(),
        ));
    }
    let deltas: Vec<f64> = distinct.windows(2).map(|w| w[1] - w[0]).collect();
    let delta_min = deltas.iter().copied().fold(f64::INFINITY, f64::min);
    let sigma_r: Vec<f64> = (1..k)
        .map(|r| (0..k - r).map(|i| 1.0 / (distinct[i + r] - distinct[i])).sum())
        .collect();
    Ok(GapStatistics {
        spectrum: spectrum.to_vec(),
        delta: distinct[k - 1] - distinct[k - 2],
        delta_min,
        avg_gap: (distinct[k - 1] - distinct[0]) / (k - 1) as f64,
        sigma: sigma_r.iter().sum(),
        sigma_r,
        deltas,
        distinct,
        simple_spectrum,
    })
}

/// `(1/eps) sum_{pairs, E_i != E_l} |<v_i|psi0>| |<psi0|v_l>| / |E_l - E_i|`.
pub fn mixing_time_bound(modes: &ModeBasis, psi0: &DVector<Complex64>, epsilon: f64) -> Result<f64> {
    check_range("epsilon", epsilon, "(0, 1)", epsilon > 0.0 && epsilon < 1.0)?;
    check_psi(modes, psi0)?;
    let c: Vec<f64> = modes.vectors.ad_mul(psi0).iter().map(|z| z.norm()).collect();
    let e = &modes.energies;
    let tol = default_degeneracy_tol(e);
    let mut total = 0.0;
    for i in 0..e.len() {
        for l in (i + 1)..e.len() {
            let gap = (e[l] - e[i]).abs();
            if gap > tol {
                total += c[i] * c[l] / gap;
            }
        }
    }
    Ok(total / epsilon)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingTrace {
    pub times: Vec<f64>,
    /// `|P(t) - P(inf)|_1`.
    pub distances: Vec<f64>,
    pub t_mix: Option<f64>,
    pub epsilon: f64,
}

/// Increasing geometric grid of `points` values in `[t_min, t_max]`.
pub fn geometric_grid(t_min: f64, t_max: f64, points: usize) -> Vec<f64> {
    if points < 2 {
        return vec![t_max];
    }
    let ratio = (t_max / t_min).ln() / (points - 1) as f64;
    (0..points)
        .map(|k| t_min * (ratio * k as f64).exp())
        .collect()
}

pub fn mixing_trace(
    modes: &ModeBasis,
    psi0: &DVector<Complex64>,
    epsilon: f64,
    t_grid: &[f64],
    outcomes: Option<&[usize]>,
) -> Result<MixingTrace> {
    check_range("epsilon", epsilon, "(0, 1)", epsilon > 0.0 && epsilon < 1.0)?;
    check_psi(modes, psi0)?;
    if t_grid.windows(2).any(|w| w[1] <= w[0]) || t_grid.first().is_some_and(|&t| t <= 0.0) {
        return Err(Error::OutOfRange {
            name: "t_grid",
            value: f64::NAN,
            range: "positive and strictly increasing",
        });
    }
    let out = all_outcomes(modes, outcomes);
    let limit = limiting_distribution(modes, psi0, Some(&out), None)?.probs;
    let w = weights(modes, psi0, &out);
    let distances: Vec<f64> = t_grid
        .par_iter()
        .map(|&t| l1(&averaged_probs(&w, &modes.energies, t).0, &limit))
        .collect();
    let t_mix = t_grid
        .iter()
        .zip(&distances)
        .find(|(_, &d)| d <= epsilon)
        .map(|(&t, _)| t);
    Ok(MixingTrace {
        times: t_grid.to_vec(),
        distances,
        t_mix,
        epsilon,
    })
}

/// First grid time with `|P(t) - P(inf)|_1 <= eps`, scanning in order and
/// stopping at the crossing.
pub fn first_crossing(
    modes: &ModeBasis,
    psi0: &DVector<Complex64>,
    epsilon: f64,
    t_grid: &[f64],
) -> Result<Option<f64>> {
    check_psi(modes, psi0)?;
    let out = all_outcomes(modes, None);
    let limit = limiting_distribution(modes, psi0, Some(&out), None)?.probs;
    let w = weights(modes, psi0, &out);
    Ok(t_grid
        .iter()
        .copied()
        .find(|&t| l1(&averaged_probs(&w, &modes.energies, t).0, &limit) <= epsilon))
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapPair {
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub delta: f64,
    /// `|sqrt(1 - hi^2) - sqrt(1 - lo^2)|`.
    pub delta_h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapMap {
    pub delta_min_p: f64,
    pub delta_min_h: f64,
    pub per_gap: Vec<GapPair>,
    /// Spectral gap `1 - lambda_{n-1}`.
    pub spectral_gap: f64,
    /// `(lambda_1 + lambda_2) / 2`.
    pub lambda_plus: f64,
    /// `lambda_plus * Delta_min`, a lower bound on the mapped minimum gap
    /// whenever the spectrum is nonnegative.
    pub lower_bound: f64,
    /// `2 Delta_min / sqrt(Delta)`.
    pub upper_bound: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

/// How consecutive discriminant gaps map to gaps of the edge-walk energies
/// `sqrt(1 - lambda^2)`.
pub fn edge_walk_gap_map(d: &Discriminant) -> Result<GapMap> {
    let mut lam: Vec<f64> = d.spectrum.values.iter().map(|&l| l.clamp(-1.0, 1.0)).collect();
    let n = lam.len();
    // The top eigenvalue is exactly 1; roundoff there would leak ~1e-8 into its energy.
    if let Some(top) = lam.last_mut() {
        *top = 1.0;
    }
    let tol = 1e-12_f64.max(default_degeneracy_tol(&lam));
    if n < 2 {
        return Err(Error::DegenerateSpectrum("need at least two eigenvalues".into()));
    }
    if let Some(w) = lam.windows(2).find(|w| w[1] - w[0] <= tol) {
        return Err(Error::DegenerateSpectrum(format!(
            "eigenvalues {} and {} coincide",
            w[0], w[1]
        )));
    }
    let energy = |l: f64| (1.0 - l * l).max(0.0).sqrt();
    let per_gap: Vec<GapPair> = lam
        .windows(2)
        .map(|w| GapPair {
            lambda_lo: w[0],
            lambda_hi: w[1],
            delta: w[1] - w[0],
            delta_h: (energy(w[1]) - energy(w[0])).abs(),
        })
        .collect();
    let delta_min_p = per_gap.iter().map(|g| g.delta).fold(f64::INFINITY, f64::min);
    let delta_min_h = per_gap.iter().map(|g| g.delta_h).fold(f64::INFINITY, f64::min);
    let spectral_gap = 1.0 - lam[n - 2];
    let lambda_plus = if n >= 2 { (lam[0] + lam[1]) / 2.0 } else { 0.0 };
    let lower_bound = lambda_plus * delta_min_p;
    let upper_bound = 2.0 * delta_min_p / spectral_gap.sqrt();
    let slack = 1e-12;
    Ok(GapMap {
        lower_holds: delta_min_h >= lower_bound - slack,
        upper_holds: delta_min_h <= upper_bound + slack,
        delta_min_p,
        delta_min_h,
        per_gap,
        spectral_gap,
        lambda_plus,
        lower_bound,
        upper_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::hamiltonian::build_effective;
    use crate::linalg::SpectralDecomposition;
    use crate::markov::{discriminant, discriminant_of, interpolate, make_lazy, MarkedSet};
    use crate::rng::rng_from;
    use proptest::prelude::*;
    use rand::Rng;

    fn random_hermitian(d: usize, seed: u64) -> DMatrix<Complex64> {
        let mut rng = rng_from(seed);
        let a = DMatrix::from_fn(d, d, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
    }

    fn random_state(d: usize, seed: u64) -> DVector<Complex64> {
        let mut rng = rng_from(seed);
        DVector::from_fn(d, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
        .normalize()
    }

    fn basis(d: usize, i: usize) -> DVector<Complex64> {
        let mut v = DVector::zeros(d);
        v[i] = Complex64::new(1.0, 0.0);
        v
    }

    /// Trapezoid rule on `|<f|e^{-iHt}|psi0>|^2` over `[0, T]`.
    fn trapezoid(modes: &ModeBasis, psi0: &DVector<Complex64>, t: f64, points: usize) -> Vec<f64> {
        let c = modes.vectors.ad_mul(psi0);
        let d = modes.dim();
        let mut acc = vec![0.0; d];
        for k in 0..=points {
            let time = t * k as f64 / points as f64;
            let phased = DVector::from_iterator(
                c.len(),
                c.iter()
                    .zip(&modes.energies)
                    .map(|(&ci, &e)| ci * Complex64::from_polar(1.0, -e * time)),
            );
            let amp = &modes.vectors * phased;
            let wgt = if k == 0 || k == points { 0.5 } else { 1.0 };
            for f in 0..d {
                acc[f] += wgt * amp[f].norm_sqr();
            }
        }
        acc.iter().map(|a| a / points as f64).collect()
    }

    #[test]
    fn kernel_properties() {
        assert_eq!(time_average_kernel(0.0, 5.0), Complex64::new(1.0, 0.0));
        for &(d, t) in &[(1e-9, 3.0), (0.3, 10.0), (-2.0, 7.0), (5.0, 1e4)] {
            let k = time_average_kernel(d, t);
            assert!(k.norm() <= 1.0 + 1e-15);
            let direct = (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -d * t))
                / Complex64::new(0.0, d * t);
            assert!((k - direct).norm() < 1e-7);
        }
        assert!(time_average_kernel(1.0, 1e8).norm() < 1e-7);
    }

    #[test]
    fn eigenstate_start_is_static() {
        let spec = SpectralDecomposition::hermitian(random_hermitian(5, 1));
        let modes = ModeBasis::from(&spec);
        let v = spec.vector(2);
        for t in [0.5, 50.0] {
            let dist = time_averaged_distribution(&modes, &v, t, None).unwrap();
            for f in 0..5 {
                assert!((dist.probs[f] - v[f].norm_sqr()).abs() < 1e-14);
            }
        }
        let lim = limiting_distribution(&modes, &v, None, None).unwrap();
        for f in 0..5 {
            assert!((lim.probs[f] - v[f].norm_sqr()).abs() < 1e-14);
        }
        let trace = mixing_trace(&modes, &v, 0.1, &[1.0, 2.0, 4.0], None).unwrap();
        assert!(trace.distances.iter().all(|&d| d < 1e-14));
        assert!(mixing_time_bound(&modes, &v, 0.1).unwrap() < 1e-10);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let spec = SpectralDecomposition::hermitian(random_hermitian(6, 2));
        let modes = ModeBasis::from(&spec);
        let psi = random_state(6, 3);
        let dist = time_averaged_distribution(&modes, &psi, 50.0, None).unwrap();
        let quad = trapezoid(&modes, &psi, 50.0, 10_000);
        for f in 0..6 {
            assert!((dist.probs[f] - quad[f]).abs() < 1e-4);
        }
        assert!((dist.probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(dist.imag_residue < 1e-10);
    }

    #[test]
    fn trace_values_match_refined_quadrature() {
        let spec = SpectralDecomposition::hermitian(random_hermitian(5, 21));
        let modes = ModeBasis::from(&spec);
        let psi = random_state(5, 22);
        let lim = limiting_distribution(&modes, &psi, None, None).unwrap();
        let trace = mixing_trace(&modes, &psi, 0.1, &[20.0, 40.0], None).unwrap();
        for (i, &t) in [20.0, 40.0].iter().enumerate() {
            let quad = trapezoid(&modes, &psi, t, 40_000);
            assert!((l1(&quad, &lim.probs) - trace.distances[i]).abs() < 1e-4);
        }
    }

    #[test]
    fn k8_long_average_reaches_limit() {
        let p = make_lazy(&generators::complete_graph_walk(8));
        let d = discriminant_of(&p, 0.0);
        let modes = ModeBasis::from(&d.spectrum);
        let psi = basis(8, 0);
        let lim = limiting_distribution(&modes, &psi, None, None).unwrap();
        // K_8 is degenerate: the limit keeps the cross terms inside the 7-fold group.
        assert!(!lim.is_simple());
        let avg = time_averaged_distribution(&modes, &psi, 1e4, None).unwrap();
        assert!(l1(&avg.probs, &lim.probs) <= 1e-3);
        assert!((lim.probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        let trace = mixing_trace(&modes, &psi, 0.1, &geometric_grid(0.1, 1e4, 200), None).unwrap();
        let bound = mixing_time_bound(&modes, &psi, 0.1).unwrap();
        assert!(bound >= trace.t_mix.unwrap());
    }

    #[test]
    fn simple_spectrum_limit_matches_long_average() {
        let spec = SpectralDecomposition::hermitian(random_hermitian(8, 4));
        let modes = ModeBasis::from(&spec);
        let psi = random_state(8, 5);
        let lim = limiting_distribution(&modes, &psi, None, None).unwrap();
        assert!(lim.is_simple());
        let avg = time_averaged_distribution(&modes, &psi, 1e6, None).unwrap();
        for f in 0..8 {
            assert!((lim.probs[f] - avg.probs[f]).abs() < 2e-3);
            let point: f64 = (0..8)
                .map(|i| (modes.vectors[(f, i)] * modes.vectors.column(i).dotc(&psi)).norm_sqr())
                .sum();
            assert!((lim.probs[f] - point).abs() < 1e-14);
        }
    }

    #[test]
    fn two_point_and_equally_spaced() {
        let g = gap_statistics(&[0.0, 1.0], 1e-12).unwrap();
        assert_eq!(g.sigma, 1.0);
        assert_eq!(g.delta_min, 1.0);
        let (n, h) = (9usize, 0.3);
        let spec: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
        let g = gap_statistics(&spec, 1e-12).unwrap();
        let closed = (1..n).map(|r| (n - r) as f64 / r as f64).sum::<f64>() / h;
        let mut direct = 0.0;
        for i in 0..n {
            for l in (i + 1)..n {
                direct += 1.0 / (spec[l] - spec[i]);
            }
        }
        assert!((g.sigma - closed).abs() < 1e-12 * closed);
        assert!((g.sigma - direct).abs() < 1e-12 * closed);
        assert!((g.sigma_r.iter().sum::<f64>() - g.sigma).abs() < 1e-12);
        assert!(g.simple_spectrum && g.sandwich_holds());
        assert!(gap_statistics(&[1.0, 1.0], 1e-12).is_err());
        assert!(gap_statistics(&[2.0, 1.0], 1e-12).is_err());
    }

    #[test]
    fn uniform_overlap_bound_factorizes() {
        let spec = SpectralDecomposition::hermitian(random_hermitian(6, 9));
        let modes = ModeBasis::from(&spec);
        let uniform = DVector::from_element(6, Complex64::new(1.0 / 6f64.sqrt(), 0.0));
        let psi = &modes.vectors * uniform;
        let g = gap_statistics(spec.values.as_slice(), 1e-12).unwrap();
        let bound = mixing_time_bound(&modes, &psi, 0.2).unwrap();
        assert!((bound - g.sigma / (6.0 * 0.2)).abs() < 1e-10 * bound);
    }

    #[test]
    fn gap_map_series_limits() {
        let delta: f64 = 1e-3;
        let near_zero = (1.0 - (1.0 - delta * delta).sqrt()) / (delta * delta / 2.0);
        assert!((near_zero - 1.0).abs() < 1e-3);
        let near_one = (2.0 * delta - delta * delta).sqrt() / (2.0 * delta).sqrt();
        assert!((near_one - 1.0).abs() < 1e-3);
    }

    #[test]
    fn gap_map_matches_hamiltonian_spectrum() {
        for seed in 0..5 {
            let p = generators::random_reversible(9, seed, true);
            let m = MarkedSet::single(0, 9).unwrap();
            let d = discriminant(&interpolate(&p, &m, 0.3).unwrap()).unwrap();
            let map = edge_walk_gap_map(&d).unwrap();
            let h = build_effective(&d).unwrap();
            // Positive branch in lambda order, with 0 for the top eigenvector.
            let mut e = h.plane_energies.clone();
            e.push(0.0);
            for (j, g) in map.per_gap.iter().enumerate() {
                assert!((g.delta_h - (e[j] - e[j + 1]).abs()).abs() < 1e-12);
            }
            assert!(map.lower_holds && map.upper_holds, "{map:?}");
        }
    }

    #[test]
    fn distance_stays_below_epsilon_past_the_bound() {
        for (d, seed) in [(6, 1), (12, 2), (24, 3), (48, 4), (64, 5)] {
            let spec = SpectralDecomposition::hermitian(random_hermitian(d, seed));
            let modes = ModeBasis::from(&spec);
            for psi in [basis(d, 0), random_state(d, seed + 100)] {
                for eps in [0.2, 0.1, 0.05] {
                    let bound = mixing_time_bound(&modes, &psi, eps).unwrap();
                    let times: Vec<f64> = [1.0, 1.3, 2.0, 5.0, 20.0].iter().map(|m| m * bound).collect();
                    let tr = mixing_trace(&modes, &psi, eps, &times, None).unwrap();
                    for (t, dist) in tr.times.iter().zip(&tr.distances) {
                        assert!(*dist <= eps, "d={d} eps={eps} T={t:.3e}: D={dist:.3e}");
                    }
                }
            }
        }
    }

    #[test]
    fn edge_walk_limit_in_node_sector() {
        // Oracle: the dense n^2 Hamiltonian, whose kernel is heavily degenerate.
        for (n, seed, s) in [(4, 1, 0.0), (5, 2, 0.0), (6, 3, 0.4)] {
            let p = generators::random_reversible(n, seed, true);
            let d = discriminant_of(&p, s);
            let full = crate::hamiltonian::build_full_with_limit(&d.chain, 8).unwrap();
            let full_modes = ModeBasis::from(&full.spectrum());
            let eff = build_effective(&d).unwrap();
            let c = random_state(n, seed + 7);
            let psi = eff.isometry.embed(&c);
            let outcomes: Vec<usize> = (0..n).map(|x| x * n).collect();
            let from_full = limiting_distribution(&full_modes, &psi, Some(&outcomes), Some(1e-8)).unwrap();
            let from_eff = limiting_distribution(&eff.modes(), &psi, Some(&outcomes), None).unwrap();
            let v = &d.spectrum.vectors;
            let ck: Vec<Complex64> = (0..n)
                .map(|k| (0..n).map(|x| c[x] * v[(x, k)]).sum())
                .collect();
            for x in 0..n {
                let mut want = (v[(x, n - 1)] * ck[n - 1]).norm_sqr();
                for k in 0..n - 1 {
                    want += 0.5 * (v[(x, k)] * ck[k]).norm_sqr();
                }
                assert!((from_full.probs[x] - want).abs() < 1e-9, "n={n} x={x}");
                assert!((from_eff.probs[x] - want).abs() < 1e-12, "n={n} x={x}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sandwich_for_simple_spectra(mut xs in proptest::collection::vec(-10.0f64..10.0, 2..40)) {
            xs.sort_by(f64::total_cmp);
            xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
            prop_assume!(xs.len() >= 2);
            let g = gap_statistics(&xs, 1e-9).unwrap();
            prop_assert!(g.simple_spectrum);
            prop_assert!(g.sandwich_holds());
            prop_assert!((g.sigma_r.iter().sum::<f64>() - g.sigma).abs() <= 1e-9 * g.sigma);
        }

        #[test]
        fn averaged_distribution_is_a_distribution(seed in 0u64..1000, d in 2usize..12, t in 0.01f64..1e4) {
            let spec = SpectralDecomposition::hermitian(random_hermitian(d, seed));
            let modes = ModeBasis::from(&spec);
            let psi = random_state(d, seed + 1);
            let dist = time_averaged_distribution(&modes, &psi, t, None).unwrap();
            prop_assert!((dist.probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            prop_assert!(dist.probs.iter().all(|&p| p > -1e-12));
            prop_assert!(dist.imag_residue < 1e-10);
        }

        #[test]
        fn gap_map_bounds_on_lazy_chains(seed in 0u64..1000, n in 3usize..16) {
            let p = generators::random_reversible(n, seed, true);
            let d = discriminant_of(&p, 0.0);
            if let Ok(map) = edge_walk_gap_map(&d) {
                prop_assert!(map.lower_holds && map.upper_holds);
            }
        }
    }
}
