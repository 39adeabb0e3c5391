//! Von Neumann phase estimation with an `l`-qubit pointer and post-selection
//! on the pointer returning to position zero.
//!
//! Fourier convention, used everywhere in this module: a pointer at
//! position `x` has momentum amplitudes `(1/sqrt N) e^{-2 pi i x q / N}`, and
//! the coupling `H (x) p` multiplies momentum level `q` of an energy-`E`
//! mode by `e^{-i E tau q / N}`. Position zero therefore collects
//! `gamma(E) = (1/N) sum_q e^{-i E tau q / N}`, which is 1 at `E = 0`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{check_range, Error, Result};
use crate::linalg::SpectralDecomposition;
use crate::policy::policy;

#[derive(Debug, Clone, PartialEq)]
pub struct PointerConfig {
    /// Qubits per block; one block has `2^l` momentum levels.
    pub l: u32,
    pub blocks: u32,
    pub tau: f64,
    pub eps_prime: f64,
}

impl PointerConfig {
    pub fn new(l: u32, blocks: u32, tau: f64, eps_prime: f64) -> Result<Self> {
        check_range("l", l as f64, "[1, 40]", (1..=40).contains(&l))?;
        check_range("blocks", blocks as f64, ">= 1", blocks >= 1)?;
        check_range("tau", tau, "> 0", tau > 0.0)?;
        Ok(Self {
            l,
            blocks,
            tau,
            eps_prime,
        })
    }

    /// Standard sizing for an energy gap: `l = ceil(log2(1/gap)) + 1`,
    /// `blocks = ceil(log2(1/eps'))`, `tau = 2 pi / gap`.
    pub fn for_gap(gap: f64, eps_prime: f64) -> Result<Self> {
        check_range("gap", gap, "(0, 1]", gap > 0.0 && gap <= 1.0)?;
        check_range("eps'", eps_prime, "(0, 1)", eps_prime > 0.0 && eps_prime < 1.0)?;
        Self::new(
            qubits_for(gap),
            blocks_for(eps_prime),
            2.0 * PI / gap,
            eps_prime,
        )
    }

    pub fn levels(&self) -> usize {
        1usize << self.l
    }

    pub fn total_qubits(&self) -> u32 {
        self.l * self.blocks
    }

    pub fn total_time(&self) -> f64 {
        self.tau * self.blocks as f64
    }
}

pub(crate) fn qubits_for(gap: f64) -> u32 {
    (1.0 / gap).log2().ceil().max(0.0) as u32 + 1
}

pub(crate) fn blocks_for(eps_prime: f64) -> u32 {
    ((1.0 / eps_prime).log2().ceil() as u32).max(1)
}

/// `(1/N) sum_{q<N} e^{-i E tau q / N}` with `N = 2^l`.
pub fn pointer_zero_amplitude(e: f64, tau: f64, l: u32) -> Complex64 {
    let n = (1u64 << l) as f64;
    let theta = e * tau / n;
    // Only the phase modulo 2 pi matters since q is an integer.
    let phi = theta - 2.0 * PI * (theta / (2.0 * PI)).round();
    if phi == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    if phi.abs() < 1e-8 && n * phi.abs() < 1e-4 {
        // Taylor series of the sum in phi through third order.
        let s1 = n * (n - 1.0) / 2.0;
        let s2 = (n - 1.0) * n * (2.0 * n - 1.0) / 6.0;
        let s3 = s1 * s1;
        let re = n - phi * phi * s2 / 2.0;
        let im = -phi * s1 + phi.powi(3) * s3 / 6.0;
        return Complex64::new(re / n, im / n);
    }
    let magnitude = (n * phi / 2.0).sin() / (n * (phi / 2.0).sin());
    Complex64::from_polar(magnitude, -phi * (n - 1.0) / 2.0)
}

/// Orthonormal eigenmodes spanning part of a system space. Anything
/// orthogonal to the span is treated as energy zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeBasis {
    pub energies: Vec<f64>,
    /// Columns are the modes.
    pub vectors: DMatrix<Complex64>,
}

impl ModeBasis {
    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Mode coefficients and the component outside the span.
    pub fn decompose(&self, psi: &DVector<Complex64>) -> (DVector<Complex64>, DVector<Complex64>) {
        let c = self.vectors.ad_mul(psi);
        let residual = psi - &self.vectors * &c;
        (c, residual)
    }

    /// The Hamiltonian `sum_j E_j |j><j|` as a dense matrix.
    pub fn dense(&self) -> DMatrix<Complex64> {
        let diag = DMatrix::from_diagonal(&DVector::from_iterator(
            self.len(),
            self.energies.iter().map(|&e| Complex64::new(e, 0.0)),
        ));
        &self.vectors * diag * self.vectors.adjoint()
    }
}

impl From<&SpectralDecomposition<f64>> for ModeBasis {
    fn from(s: &SpectralDecomposition<f64>) -> Self {
        Self {
            energies: s.values.iter().copied().collect(),
            vectors: s.vectors.map(|x| Complex64::new(x, 0.0)),
        }
    }
}

impl From<&SpectralDecomposition<Complex64>> for ModeBasis {
    fn from(s: &SpectralDecomposition<Complex64>) -> Self {
        Self {
            energies: s.values.iter().copied().collect(),
            vectors: s.vectors.clone(),
        }
    }
}

/// System (x) pointer amplitudes, index `sys * pointer_dim + position`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeState {
    pub system_dim: usize,
    pub pointer_dim: usize,
    pub amplitudes: DVector<Complex64>,
}

impl CompositeState {
    /// `|psi>|x = 0>`.
    pub fn with_pointer_at_zero(system: &DVector<Complex64>, pointer_dim: usize) -> Self {
        let d = system.len();
        let mut amplitudes = DVector::zeros(d * pointer_dim);
        for (i, &a) in system.iter().enumerate() {
            amplitudes[i * pointer_dim] = a;
        }
        Self {
            system_dim: d,
            pointer_dim,
            amplitudes,
        }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Unnormalized system vector conditioned on pointer position `x`.
    pub fn system_at(&self, x: usize) -> DVector<Complex64> {
        DVector::from_iterator(
            self.system_dim,
            (0..self.system_dim).map(|i| self.amplitudes[i * self.pointer_dim + x]),
        )
    }

    fn rows_mut(&mut self) -> impl Iterator<Item = &mut [Complex64]> {
        self.amplitudes.as_mut_slice().chunks_mut(self.pointer_dim)
    }
}

/// One block of `e^{-i tau H (x) p}` on a state whose pointer register has
/// `2^l` levels.
pub fn evolve_block(
    modes: &ModeBasis,
    state: &CompositeState,
    cfg: &PointerConfig,
) -> Result<CompositeState> {
    if state.system_dim != modes.dim() {
        return Err(Error::DimensionMismatch {
            expected: modes.dim(),
            got: state.system_dim,
        });
    }
    let n = cfg.levels();
    if state.pointer_dim != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: state.pointer_dim,
        });
    }
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let scale = 1.0 / (n as f64).sqrt();

    let mut out = state.clone();
    for row in out.rows_mut() {
        forward.process(row);
        row.iter_mut().for_each(|a| *a *= scale);
    }
    for q in 0..n {
        let psi = out.system_at(q);
        let (c, residual) = modes.decompose(&psi);
        let phased = DVector::from_iterator(
            c.len(),
            c.iter().zip(&modes.energies).map(|(&ci, &e)| {
                ci * Complex64::from_polar(1.0, -e * cfg.tau * q as f64 / n as f64)
            }),
        );
        let new = &modes.vectors * phased + residual;
        for (i, &a) in new.iter().enumerate() {
            out.amplitudes[i * n + q] = a;
        }
    }
    for row in out.rows_mut() {
        inverse.process(row);
        row.iter_mut().for_each(|a| *a *= scale);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PostSelected {
    /// Normalized system state after every block returned the pointer to zero.
    pub state: DVector<Complex64>,
    pub success_prob: f64,
    /// Per-mode pointer-zero amplitude of a single block.
    pub gammas: Vec<Complex64>,
}

/// Apply `blocks` fresh pointer blocks, each post-selected on position zero.
/// Mode `j` is multiplied by `gamma_j^blocks`; the part of `psi0` outside the
/// modes has energy zero and passes unchanged.
pub fn run_blocks_postselect(
    modes: &ModeBasis,
    psi0: &DVector<Complex64>,
    cfg: &PointerConfig,
) -> Result<PostSelected> {
    if psi0.len() != modes.dim() {
        return Err(Error::DimensionMismatch {
            expected: modes.dim(),
            got: psi0.len(),
        });
    }
    let gammas: Vec<Complex64> = modes
        .energies
        .iter()
        .map(|&e| pointer_zero_amplitude(e, cfg.tau, cfg.l))
        .collect();
    let (c, residual) = modes.decompose(psi0);
    let kept = DVector::from_iterator(
        c.len(),
        c.iter()
            .zip(&gammas)
            .map(|(&ci, &g)| ci * g.powu(cfg.blocks)),
    );
    let out = &modes.vectors * kept + residual;
    let success_prob = out.norm_squared();
    if success_prob < policy().min_postselect {
        return Err(Error::DegeneratePostSelection(success_prob));
    }
    Ok(PostSelected {
        state: out / Complex64::new(success_prob.sqrt(), 0.0),
        success_prob,
        gammas,
    })
}
