//! The edge-walk Hamiltonian `H(s) = i[V^dagger S V, Pi_0]` on the edge space
//! `|x, y>`, index `x * n + y`, with reference state `y = 0`.
//!
//! `V` maps `|x, 0>` to `|phi_x> = sum_y sqrt(p_xy) |x, y>` and is completed
//! inside each `x` block by the Householder reflection swapping `e_0` and
//! `phi_x`. The reflection is symmetric and involutive, so `V = V^dagger`.
//! `H` is block diagonal over the planes `B_k = span{|v_k, 0>, |v_k, 0>^perp}`
//! with energies `+-sqrt(1 - lambda_k^2)`, annihilates `|v_n, 0>`, and is zero
//! on the complement of those planes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::SpectralDecomposition;
use crate::markov::{discriminant_of, Discriminant, InterpolatedChain, StochasticMatrix};
use crate::pointer::ModeBasis;
use crate::policy::policy;

/// `V = V^dagger` for a chain, applied without forming the `n^2` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeIsometry {
    n: usize,
    /// Householder vectors `e_0 - phi_x`, `None` when `phi_x = e_0`.
    reflectors: Vec<Option<DVector<f64>>>,
    /// Pairs swapped by `S`.
    swap: Vec<bool>,
}

impl EdgeIsometry {
    pub fn new(p: &StochasticMatrix) -> Self {
        let n = p.n();
        let reflectors = (0..n)
            .map(|x| {
                let mut w = DVector::from_fn(n, |y, _| -p.get(x, y).sqrt());
                w[0] += 1.0;
                (w.norm_squared() > 1e-30).then_some(w)
            })
            .collect();
        let swap = (0..n * n)
            .map(|i| {
                let (x, y) = (i / n, i % n);
                p.get(x, y) > 0.0 && p.get(y, x) > 0.0
            })
            .collect();
        Self {
            n,
            reflectors,
            swap,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn apply_v(&self, psi: &mut DVector<Complex64>) {
        let n = self.n;
        for (x, w) in self.reflectors.iter().enumerate() {
            if let Some(w) = w {
                let block = &mut psi.as_mut_slice()[x * n..(x + 1) * n];
                let dot: Complex64 = w.iter().zip(block.iter()).map(|(&a, &b)| b * a).sum();
                let f = dot * (2.0 / w.norm_squared());
                for (b, &a) in block.iter_mut().zip(w.iter()) {
                    *b -= f * a;
                }
            }
        }
    }

    pub fn apply_s(&self, psi: &mut DVector<Complex64>) {
        let n = self.n;
        for x in 0..n {
            for y in (x + 1)..n {
                if self.swap[x * n + y] {
                    psi.swap_rows(x * n + y, y * n + x);
                }
            }
        }
    }

    /// `V^dagger S V psi`.
    pub fn apply_a(&self, psi: &DVector<Complex64>) -> DVector<Complex64> {
        let mut out = psi.clone();
        self.apply_v(&mut out);
        self.apply_s(&mut out);
        self.apply_v(&mut out);
        out
    }

    /// `sum_x c_x |x, 0>`.
    pub fn embed(&self, c: &DVector<Complex64>) -> DVector<Complex64> {
        let n = self.n;
        let mut out = DVector::zeros(n * n);
        for x in 0..n {
            out[x * n] = c[x];
        }
        out
    }

    /// Coefficients `<x, 0|psi>`.
    pub fn sector(&self, psi: &DVector<Complex64>) -> DVector<Complex64> {
        DVector::from_fn(self.n, |x, _| psi[x * self.n])
    }

    fn dense_v(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut v = DMatrix::identity(n * n, n * n);
        for (x, w) in self.reflectors.iter().enumerate() {
            if let Some(w) = w {
                let r = DMatrix::identity(n, n) - (w * w.transpose()) * (2.0 / w.norm_squared());
                v.view_mut((x * n, x * n), (n, n)).copy_from(&r);
            }
        }
        v
    }

    fn dense_s(&self) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(n * n, n * n, |i, j| {
            let (x, y) = (j / n, j % n);
            let target = if self.swap[j] { y * n + x } else { j };
            if i == target {
                1.0
            } else {
                0.0
            }
        })
    }
}

/// Spectral form of `H(s)` on the `2n - 1` dimensional invariant subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWalkHamiltonian {
    pub n: usize,
    pub s: f64,
    /// Discriminant eigenvalues, ascending, clamped into `[-1, 1]`.
    pub lambdas: DVector<f64>,
    /// Discriminant eigenvectors as columns.
    pub vectors: DMatrix<f64>,
    /// `sqrt(1 - lambda_k^2)` for `k < n`.
    pub plane_energies: Vec<f64>,
    /// Smallest nonzero `|E|`, which is `sqrt(1 - lambda_{n-1}^2)` for lazy chains.
    pub gap: f64,
    /// Eigenvalues that needed clamping.
    pub clamped: usize,
    pub isometry: EdgeIsometry,
}

impl EdgeWalkHamiltonian {
    /// All `2n - 1` energies: `+E_k, -E_k` for each `k < n`, then `0`.
    pub fn energies(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self
            .plane_energies
            .iter()
            .flat_map(|&x| [x, -x])
            .collect();
        e.push(0.0);
        e
    }

    /// `|v_k, 0>` in the edge space.
    pub fn sector_state(&self, k: usize) -> DVector<Complex64> {
        self.isometry
            .embed(&self.vectors.column(k).map(|x| Complex64::new(x, 0.0)))
    }

    /// `(A - lambda_k) |v_k, 0> / sqrt(1 - lambda_k^2)`, orthogonal to the
    /// node sector.
    pub fn perp_state(&self, k: usize) -> DVector<Complex64> {
        let v = self.sector_state(k);
        let av = self.isometry.apply_a(&v);
        let lam = Complex64::new(self.lambdas[k], 0.0);
        (av - v * lam) / Complex64::new(self.plane_energies[k], 0.0)
    }

    /// `(|v_k,0> + i sign |v_k,0>^perp) / sqrt 2`, energy `sign * E_k`.
    pub fn eigenstate(&self, k: usize, sign: f64) -> DVector<Complex64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        self.sector_state(k) * Complex64::new(h, 0.0)
            + self.perp_state(k) * Complex64::new(0.0, sign * h)
    }

    /// Orthonormal eigenmodes in the edge space, ordered as [`Self::energies`].
    pub fn modes(&self) -> ModeBasis {
        let n = self.n;
        let mut vectors = DMatrix::zeros(n * n, 2 * n - 1);
        for k in 0..n - 1 {
            vectors.set_column(2 * k, &self.eigenstate(k, 1.0));
            vectors.set_column(2 * k + 1, &self.eigenstate(k, -1.0));
        }
        vectors.set_column(2 * n - 2, &self.sector_state(n - 1));
        ModeBasis {
            energies: self.energies(),
            vectors,
        }
    }

    /// `H psi` through the effective spectral form.
    pub fn apply(&self, psi: &DVector<Complex64>) -> DVector<Complex64> {
        let m = self.modes();
        let (c, _) = m.decompose(psi);
        let scaled = DVector::from_iterator(
            c.len(),
            c.iter().zip(&m.energies).map(|(&ci, &e)| ci * e),
        );
        &m.vectors * scaled
    }
}

fn clamp_eigenvalue(lam: f64, clamped: &mut usize) -> Result<f64> {
    let tol = policy().eigen_clamp;
    if lam.abs() <= 1.0 {
        Ok(lam)
    } else if lam.abs() - 1.0 < tol {
        *clamped += 1;
        Ok(lam.signum())
    } else {
        Err(Error::EigenvalueOutOfRange(lam))
    }
}

pub fn build_effective(d: &Discriminant) -> Result<EdgeWalkHamiltonian> {
    let n = d.n();
    if n < 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: n,
        });
    }
    let mut clamped = 0;
    let lambdas = d
        .spectrum
        .values
        .iter()
        .map(|&l| clamp_eigenvalue(l, &mut clamped))
        .collect::<Result<Vec<_>>>()?;
    let lambdas = DVector::from_vec(lambdas);
    let tol = policy().ill_conditioned;
    if lambdas.iter().take(n - 1).any(|&l| l.abs() >= 1.0 - tol) {
        return Err(Error::DegenerateSpectrum(format!(
            "top discriminant eigenvalue is not simple (lambda_(n-1) = {})",
            lambdas[n - 2]
        )));
    }
    let plane_energies: Vec<f64> = lambdas
        .iter()
        .take(n - 1)
        .map(|&l| (1.0 - l * l).sqrt())
        .collect();
    let gap = plane_energies.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(EdgeWalkHamiltonian {
        n,
        s: d.s,
        lambdas,
        vectors: d.spectrum.vectors.clone(),
        plane_energies,
        gap,
        clamped,
        isometry: EdgeIsometry::new(&d.chain),
    })
}

/// Dense `n^2 x n^2` Hamiltonian, used to cross-check the spectral form.
#[derive(Debug, Clone, PartialEq)]
pub struct FullHamiltonian {
    pub dim: usize,
    pub matrix: DMatrix<Complex64>,
    /// `max |V^dagger V - I|` of the completed isometry.
    pub completion_residual: f64,
}

impl FullHamiltonian {
    pub fn spectrum(&self) -> SpectralDecomposition<Complex64> {
        SpectralDecomposition::hermitian(self.matrix.clone())
    }

    /// `max |H - H^dagger|`.
    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

pub fn build_full(chain: &InterpolatedChain) -> Result<FullHamiltonian> {
    build_full_with_limit(&chain.result, policy().full_build_limit)
}

pub fn build_full_with_limit(p: &StochasticMatrix, limit: usize) -> Result<FullHamiltonian> {
    let n = p.n();
    if n > limit {
        return Err(Error::TooLarge { n, limit });
    }
    let iso = EdgeIsometry::new(p);
    let v = iso.dense_v();
    let dim = n * n;
    let mut completion_residual = (v.transpose() * &v - DMatrix::identity(dim, dim)).amax();
    for x in 0..n {
        for y in 0..n {
            completion_residual =
                completion_residual.max((v[(x * n + y, x * n)] - p.get(x, y).sqrt()).abs());
        }
    }
    if completion_residual > policy().completion {
        return Err(Error::Completion(completion_residual));
    }
    let a = v.transpose() * iso.dense_s() * &v;
    let pi0 = DMatrix::from_fn(dim, dim, |i, j| if i == j && i % n == 0 { 1.0 } else { 0.0 });
    let comm = &a * &pi0 - &pi0 * &a;
    Ok(FullHamiltonian {
        dim,
        matrix: comm.map(|x| Complex64::new(0.0, x)),
        completion_residual,
    })
}

/// Effective Hamiltonian directly from a chain matrix `P(s)`.
pub fn build_effective_for(p: &StochasticMatrix, s: f64) -> Result<EdgeWalkHamiltonian> {
    build_effective(&discriminant_of(p, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::markov::{discriminant, interpolate, make_lazy, MarkedSet};

    fn full_for(p: &StochasticMatrix) -> FullHamiltonian {
        build_full_with_limit(p, 12).unwrap()
    }

    fn nonzero(values: &DVector<f64>) -> Vec<f64> {
        let mut v: Vec<f64> = values.iter().copied().filter(|e| e.abs() > 1e-9).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn extreme_lambdas() {
        // Flip chain on two states: lambdas -1 and 1 are rejected as non-simple.
        let flip = StochasticMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(build_effective_for(&flip, 0.0).is_err());
        let half = StochasticMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let h = build_effective_for(&half, 0.0).unwrap();
        // lambda_1 = 0 gives energies +-1; lambda_2 = 1 gives 0.
        assert!((h.plane_energies[0] - 1.0).abs() < 1e-15);
        assert_eq!(h.energies(), vec![h.plane_energies[0], -h.plane_energies[0], 0.0]);
    }

    #[test]
    fn n2_full_spectrum() {
        let p = StochasticMatrix::from_rows(&[vec![0.7, 0.3], vec![0.3, 0.7]]).unwrap();
        let full = full_for(&p);
        let nz = nonzero(&full.spectrum().values);
        let e = (1.0f64 - 0.4 * 0.4).sqrt();
        assert_eq!(nz.len(), 2);
        assert!((nz[0] + e).abs() < 1e-12 && (nz[1] - e).abs() < 1e-12);
    }

    #[test]
    fn lazy_k3_zero_multiplicity() {
        let p = make_lazy(&generators::complete_graph_walk(3));
        let full = full_for(&p);
        let zeros = full.spectrum().values.iter().filter(|e| e.abs() < 1e-9).count();
        assert_eq!(zeros, 2 * 2 + 1);
        assert!(full.hermiticity_error() < 1e-13);
    }

    #[test]
    fn effective_matches_full_on_lazy_k4() {
        let p = make_lazy(&generators::complete_graph_walk(4));
        let h = build_effective_for(&p, 0.0).unwrap();
        let mut eff: Vec<f64> = h.energies().into_iter().filter(|e| e.abs() > 1e-9).collect();
        eff.sort_by(f64::total_cmp);
        let full = nonzero(&full_for(&p).spectrum().values);
        assert_eq!(eff.len(), full.len());
        for (a, b) in eff.iter().zip(&full) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn eigenpairs_against_dense_matrix() {
        for seed in 0..4 {
            let p = generators::random_reversible(5, seed, true);
            let m = MarkedSet::single(1, 5).unwrap();
            let chain = interpolate(&p, &m, 0.6).unwrap();
            let d = discriminant(&chain).unwrap();
            let h = build_effective(&d).unwrap();
            let full = build_full(&chain).unwrap();
            let modes = h.modes();
            // Orthonormal modes.
            let gram = modes.vectors.adjoint() * &modes.vectors;
            assert!((gram - DMatrix::identity(9, 9)).iter().all(|z| z.norm() < 1e-10));
            for (j, &e) in modes.energies.iter().enumerate() {
                let v = modes.vectors.column(j).into_owned();
                let r = &full.matrix * &v - &v * Complex64::new(e, 0.0);
                assert!(r.norm() < 1e-10, "mode {j}: {}", r.norm());
            }
            // Pi_0 projection of each plane eigenstate is |v_k,0>/sqrt 2.
            for k in 0..4 {
                for sign in [1.0, -1.0] {
                    let psi = h.eigenstate(k, sign);
                    let sector = h.isometry.embed(&h.isometry.sector(&psi));
                    let expect = h.sector_state(k) * Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                    assert!((sector - expect).norm() < 1e-10);
                }
            }
            // The effective action agrees with the dense matrix on the node sector.
            let x = h.isometry.embed(&DVector::from_fn(5, |i, _| Complex64::new(i as f64, 1.0)));
            assert!((h.apply(&x) - &full.matrix * &x).norm() < 1e-10);
        }
    }

    #[test]
    fn top_state_is_annihilated() {
        let p = generators::random_reversible(6, 9, true);
        let h = build_effective_for(&p, 0.0).unwrap();
        let full = full_for(&p);
        let top = h.sector_state(5);
        assert!((&full.matrix * top).norm() < 1e-10);
    }

    #[test]
    fn gap_sandwich() {
        for seed in 0..10 {
            let p = generators::random_reversible(8, seed, true);
            let m = MarkedSet::single(0, 8).unwrap();
            let d = discriminant(&interpolate(&p, &m, 0.5).unwrap()).unwrap();
            let h = build_effective(&d).unwrap();
            let delta = d.gap();
            assert!((h.gap.powi(2) + d.second_value().powi(2) - 1.0).abs() < 1e-12);
            assert!(h.gap >= delta.sqrt() - 1e-15);
            assert!(h.gap <= (2.0 * delta).sqrt() + 1e-15);
        }
    }

    #[test]
    fn full_build_guard() {
        let p = make_lazy(&generators::complete_graph_walk(13));
        let m = MarkedSet::single(0, 13).unwrap();
        let chain = interpolate(&p, &m, 0.0).unwrap();
        assert!(matches!(build_full(&chain), Err(Error::TooLarge { n: 13, .. })));
    }

    #[test]
    fn node_sector_dynamics_do_not_leak() {
        for n in [3usize, 5, 6] {
            let p = generators::random_reversible(n, n as u64, true);
            let h = build_effective_for(&p, 0.0).unwrap();
            let full = full_for(&p);
            let modes = h.modes();
            let psi = h.isometry.embed(&DVector::from_fn(n, |i, _| {
                Complex64::new(1.0 + i as f64, -(i as f64))
            }));
            let psi = psi.normalize();
            for t in [0.7, 3.0, 11.0] {
                let u = (&full.matrix * Complex64::new(0.0, -t)).exp();
                let out = u * &psi;
                let (_, leak) = modes.decompose(&out);
                assert!(leak.norm() < 1e-10);
            }
        }
    }
}
