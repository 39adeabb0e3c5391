//! Test and example chains.

use nalgebra::DMatrix;
use rand::Rng;

use crate::markov::StochasticMatrix;
use crate::rng::rng_from;

/// Symmetric edge weights of a random connected graph: a shuffled spanning
/// path plus each remaining pair with probability 0.6, weights in [0.1, 1).
pub fn random_reversible_weights(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = rng_from(seed);
    let mut w = DMatrix::zeros(n, n);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    for pair in order.windows(2) {
        let v = rng.random_range(0.1..1.0);
        w[(pair[0], pair[1])] = v;
        w[(pair[1], pair[0])] = v;
    }
    for x in 0..n {
        for y in (x + 1)..n {
            if w[(x, y)] == 0.0 && rng.random_bool(0.6) {
                let v = rng.random_range(0.1..1.0);
                w[(x, y)] = v;
                w[(y, x)] = v;
            }
        }
    }
    w
}

/// Random walk on weighted graph `w`: `p_xy = w_xy / sum_y w_xy`.
pub fn weighted_walk(w: &DMatrix<f64>) -> StochasticMatrix {
    let n = w.nrows();
    let mut m = w.clone();
    for x in 0..n {
        let d: f64 = w.row(x).sum();
        m.row_mut(x).scale_mut(1.0 / d);
    }
    StochasticMatrix::new(m).expect("weighted walk is stochastic")
}

/// Reversible random chain, optionally made lazy.
pub fn random_reversible(n: usize, seed: u64, lazy: bool) -> StochasticMatrix {
    let p = weighted_walk(&random_reversible_weights(n, seed));
    if lazy {
        crate::markov::make_lazy(&p)
    } else {
        p
    }
}

/// Simple random walk on the complete graph `K_n` (no self-loops).
pub fn complete_graph_walk(n: usize) -> StochasticMatrix {
    let off = 1.0 / (n as f64 - 1.0);
    let m = DMatrix::from_fn(n, n, |x, y| if x == y { 0.0 } else { off });
    StochasticMatrix::new(m).expect("K_n walk is stochastic")
}

/// Simple random walk on the cycle `C_n`.
pub fn cycle_walk(n: usize) -> StochasticMatrix {
    let mut m = DMatrix::zeros(n, n);
    for x in 0..n {
        m[(x, (x + 1) % n)] += 0.5;
        m[(x, (x + n - 1) % n)] += 0.5;
    }
    StochasticMatrix::new(m).expect("cycle walk is stochastic")
}

/// Two disjoint copies of lazy `K_k`.
pub fn two_block(k: usize) -> StochasticMatrix {
    let n = 2 * k;
    let m = DMatrix::from_fn(n, n, |x, y| if x / k == y / k { 1.0 / k as f64 } else { 0.0 });
    StochasticMatrix::new(m).expect("block chain is stochastic")
}
