//! Spatial search and coherent stationary-state preparation with the
//! edge-walk Hamiltonian and pointer post-selection.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{check_range, Error, Result};
use crate::hamiltonian::{build_effective, EdgeWalkHamiltonian};
use crate::linalg::complexify;
use crate::markov::{
    check_ergodic_reversible, discriminant, discriminant_of, interpolate, s_star, MarkedSet,
    StationaryDistribution, StochasticMatrix,
};
use crate::pointer::{blocks_for, qubits_for, run_blocks_postselect, PointerConfig};
use crate::policy::policy;
use crate::rng::rng_from;

/// How the pointer of the search stage is sized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointerSizing {
    /// `tau = 2 pi / g`, `l = ceil(log2(1/g)) + 1` with `g` the Hamiltonian gap.
    #[default]
    HamiltonianGap,
    /// `tau = 2 pi / sqrt(Delta(s*))`, `l = ceil(log2(1/Delta(s*))) + 1`, with
    /// `Delta(s*)` the gap of the interpolated chain.
    ChainGap,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SearchOptions {
    pub sizing: PointerSizing,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOutcome {
    /// `None` when the pointer post-selection failed or the measurement
    /// landed outside the node sector.
    pub sampled_node: Option<usize>,
    pub is_marked: bool,
    /// Probability of post-selecting and then observing a marked node.
    pub success_prob: f64,
    pub total_time: f64,
    pub s_star: f64,
    pub post_prob: f64,
    /// Node distribution of the post-selected state within the node sector.
    pub node_probs: Vec<f64>,
    /// `|<v_n(0)|v_n(s*)>|^2`.
    pub alpha_sq: f64,
    /// Gap `Delta(s*)` of the interpolated chain.
    pub chain_gap: f64,
    pub hamiltonian_gap: f64,
    pub l: u32,
    pub blocks: u32,
}

fn sector_state(h: &EdgeWalkHamiltonian, c: &DVector<f64>) -> DVector<Complex64> {
    h.isometry.embed(&complexify(c))
}

fn sample_index(probs: &[f64], u: f64) -> Option<usize> {
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return Some(i);
        }
    }
    None
}

pub fn spatial_search(
    p: &StochasticMatrix,
    pi: &StationaryDistribution,
    marked: &MarkedSet,
    epsilon: f64,
    seed: u64,
) -> Result<SearchOutcome> {
    spatial_search_with(p, pi, marked, epsilon, seed, SearchOptions::default())
}

pub fn spatial_search_with(
    p: &StochasticMatrix,
    pi: &StationaryDistribution,
    marked: &MarkedSet,
    epsilon: f64,
    seed: u64,
    opts: SearchOptions,
) -> Result<SearchOutcome> {
    check_range("epsilon", epsilon, "(0, 1/4)", epsilon > 0.0 && epsilon < 0.25)?;
    if !marked.is_proper() {
        return Err(Error::MarkedSet("search needs a proper nonempty marked set".into()));
    }
    let p_m = pi.p_m(marked);
    if p_m >= 0.5 {
        return Err(Error::OutOfRange {
            name: "p_M",
            value: p_m,
            range: "(0, 1/2): larger marked mass puts s* below zero",
        });
    }
    let s = s_star(p_m)?;
    let d = discriminant(&interpolate(p, marked, s)?)?;
    let h = build_effective(&d)?;
    let eps_prime = epsilon / 2.0;
    let cfg = match opts.sizing {
        PointerSizing::HamiltonianGap => PointerConfig::for_gap(h.gap, eps_prime)?,
        PointerSizing::ChainGap => {
            let delta = d.gap();
            PointerConfig::new(
                qubits_for(delta),
                blocks_for(eps_prime),
                2.0 * PI / delta.sqrt(),
                eps_prime,
            )?
        }
    };
    let root = pi.sqrt();
    let alpha_sq = root.dot(&d.top_vector()).powi(2);
    let psi0 = sector_state(&h, &root);
    let post = run_blocks_postselect(&h.modes(), &psi0, &cfg)?;

    let amps = h.isometry.sector(&post.state);
    let node_probs: Vec<f64> = amps.iter().map(|a| a.norm_sqr()).collect();
    let marked_given: f64 = marked.indices().iter().map(|&x| node_probs[x]).sum();
    let success_prob = marked_given * post.success_prob;

    let mut rng = rng_from(seed);
    let sampled_node = if rng.random::<f64>() < post.success_prob {
        sample_index(&node_probs, rng.random())
    } else {
        None
    };
    Ok(SearchOutcome {
        sampled_node,
        is_marked: sampled_node.is_some_and(|x| marked.contains(x)),
        success_prob,
        total_time: cfg.total_time(),
        s_star: s,
        post_prob: post.success_prob,
        node_probs,
        alpha_sq,
        chain_gap: d.gap(),
        hamiltonian_gap: h.gap,
        l: cfg.l,
        blocks: cfg.blocks,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageReport {
    pub s: f64,
    pub post_prob: f64,
    pub hamiltonian_gap: f64,
    pub l: u32,
    pub blocks: u32,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QSSampOutcome {
    /// Node-sector amplitudes of the output, phase-aligned with `sqrt(pi)`.
    pub state: DVector<Complex64>,
    /// Full edge-space output state.
    pub edge_state: DVector<Complex64>,
    /// `|<sqrt(pi), 0|psi>|^2`.
    pub fidelity_to_pi: f64,
    /// `min_theta |psi - e^{i theta} |sqrt(pi), 0>|_2`.
    pub distance: f64,
    /// Total-variation distance between node measurement outcomes and `pi`.
    pub tv_to_pi: f64,
    pub stage_probs: (f64, f64),
    pub stages: [StageReport; 2],
    pub total_time: f64,
    pub s_star: f64,
}

/// Two-stage preparation of `sum_x sqrt(pi_x) |x>`: filter `|j>` onto the
/// top eigenvector of `H(s*)` with `{j}` marked, then onto that of `H(0)`.
pub fn qssamp_prepare(
    p: &StochasticMatrix,
    pi_hint: Option<&StationaryDistribution>,
    j: usize,
    epsilon: f64,
) -> Result<QSSampOutcome> {
    check_range("epsilon", epsilon, "(0, 1)", epsilon > 0.0 && epsilon < 1.0)?;
    let n = p.n();
    let pi = match pi_hint {
        Some(pi) => {
            if pi.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: pi.n(),
                });
            }
            pi.clone()
        }
        None => check_ergodic_reversible(p).require_reversible()?,
    };
    let marked = MarkedSet::single(j, n)?;
    let pi_j = pi.pi[j];
    if pi_j >= 0.5 {
        return Err(Error::OutOfRange {
            name: "pi_j",
            value: pi_j,
            range: "(0, 1/2)",
        });
    }
    let s = s_star(pi_j)?;
    let eps_prime = epsilon / 4.0;

    let h1 = build_effective(&discriminant(&interpolate(p, &marked, s)?)?)?;
    let cfg1 = PointerConfig::for_gap(h1.gap, eps_prime)?;
    let mut start = DVector::zeros(n);
    start[j] = 1.0;
    let stage1 = run_blocks_postselect(&h1.modes(), &sector_state(&h1, &start), &cfg1)?;

    let h2 = build_effective(&discriminant_of(p, 0.0))?;
    let cfg2 = PointerConfig::for_gap(h2.gap, eps_prime)?;
    let stage2 = run_blocks_postselect(&h2.modes(), &stage1.state, &cfg2)?;
    let floor = policy().min_postselect.max(1e-12);
    for prob in [stage1.success_prob, stage2.success_prob] {
        if prob < floor {
            return Err(Error::DegeneratePostSelection(prob));
        }
    }

    let root = pi.sqrt();
    let target = sector_state(&h2, &root);
    let overlap = target.dotc(&stage2.state);
    let phase = if overlap.norm() > 0.0 {
        overlap.conj() / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let edge_state = &stage2.state * phase;
    let state = h2.isometry.sector(&edge_state);
    let fidelity_to_pi = overlap.norm_sqr();
    let distance = (2.0 - 2.0 * overlap.norm()).max(0.0).sqrt();
    let tv_to_pi = 0.5
        * state
            .iter()
            .zip(pi.pi.iter())
            .map(|(a, &q)| (a.norm_sqr() - q).abs())
            .sum::<f64>();
    let stages = [
        StageReport {
            s,
            post_prob: stage1.success_prob,
            hamiltonian_gap: h1.gap,
            l: cfg1.l,
            blocks: cfg1.blocks,
            time: cfg1.total_time(),
        },
        StageReport {
            s: 0.0,
            post_prob: stage2.success_prob,
            hamiltonian_gap: h2.gap,
            l: cfg2.l,
            blocks: cfg2.blocks,
            time: cfg2.total_time(),
        },
    ];
    Ok(QSSampOutcome {
        state,
        edge_state,
        fidelity_to_pi,
        distance,
        tv_to_pi,
        stage_probs: (stage1.success_prob, stage2.success_prob),
        total_time: cfg1.total_time() + cfg2.total_time(),
        stages,
        s_star: s,
    })
}

/// Abstract costs of one setup, update and check step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostModel {
    pub setup: f64,
    pub update: f64,
    pub check: f64,
    pub ht_plus: f64,
}

/// `S + sqrt(HT+) (U + C)`.
pub fn cost_total(c: &CostModel) -> Result<f64> {
    check_range("HT+", c.ht_plus, ">= 0", c.ht_plus >= 0.0)?;
    for (name, v) in [("S", c.setup), ("U", c.update), ("C", c.check)] {
        check_range(name, v, ">= 0", v >= 0.0)?;
    }
    Ok(c.setup + c.ht_plus.sqrt() * (c.update + c.check))
}
