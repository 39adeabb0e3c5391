//! Reversible Markov chains: validation, stationary states, interpolation
//! towards a marked set, and the symmetric discriminant matrix.

use std::collections::VecDeque;
use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_range, Error, Result, ValidationReport};
use crate::linalg::SpectralDecomposition;
use crate::policy::policy;

/// Row-stochastic `n x n` matrix of transition probabilities `p_xy`.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    m: DMatrix<f64>,
}

impl StochasticMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let report = Self::validate(&m);
        if report.is_ok() {
            Ok(Self { m })
        } else {
            Err(Error::Validation(report))
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut report = ValidationReport::default();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                report.push(format!("row {i} has {} entries, expected {n}", r.len()));
            }
        }
        if !report.is_ok() {
            return Err(Error::Validation(report));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn validate(m: &DMatrix<f64>) -> ValidationReport {
        let mut report = ValidationReport::default();
        if m.nrows() != m.ncols() {
            report.push(format!("matrix is {}x{}, not square", m.nrows(), m.ncols()));
            return report;
        }
        if m.nrows() == 0 {
            report.push("matrix is empty");
            return report;
        }
        let tol = policy().row_sum;
        for (i, row) in m.row_iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    report.push(format!("entry ({i},{j}) is not finite"));
                } else if v < 0.0 {
                    report.push(format!("entry ({i},{j}) = {v} is negative"));
                } else if v > 1.0 + tol {
                    report.push(format!("entry ({i},{j}) = {v} exceeds 1"));
                }
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > tol {
                report.push(format!("row {i} sums to {s}"));
            }
        }
        report
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.m[(x, y)]
    }

    /// Distribution after one step from `mu` (row vector convention).
    pub fn step(&self, mu: &DVector<f64>) -> DVector<f64> {
        self.m.tr_mul(mu)
    }
}

/// Strictly increasing list of marked state indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MarkedSet {
    indices: Vec<usize>,
    n: usize,
}

impl MarkedSet {
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::MarkedSet(format!("duplicate index {}", w[0])));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::MarkedSet(format!("index {bad} out of range for n = {n}")));
        }
        Ok(Self { indices, n })
    }

    pub fn single(j: usize, n: usize) -> Result<Self> {
        Self::new(vec![j], n)
    }

    /// Parse a comma-separated index list such as `"0,3,7"`.
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let indices = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("marked index {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(indices, n)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.indices.binary_search(&x).is_ok()
    }

    pub fn is_proper(&self) -> bool {
        !self.indices.is_empty() && self.indices.len() < self.n
    }

    /// Unmarked indices in increasing order.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.n).filter(|&x| !self.contains(x)).collect()
    }

    /// Membership mask of length `n`.
    pub fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.n];
        for &i in &self.indices {
            m[i] = true;
        }
        m
    }
}

impl fmt::Display for MarkedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution {
    pub pi: DVector<f64>,
}

impl StationaryDistribution {
    pub fn new(pi: DVector<f64>) -> Self {
        Self { pi }
    }

    pub fn n(&self) -> usize {
        self.pi.len()
    }

    /// Stationary mass on the marked set.
    pub fn p_m(&self, marked: &MarkedSet) -> f64 {
        marked.indices().iter().map(|&i| self.pi[i]).sum()
    }

    pub fn min(&self) -> f64 {
        self.pi.min()
    }

    /// Entrywise square root, the coherent encoding of `pi`.
    pub fn sqrt(&self) -> DVector<f64> {
        self.pi.map(f64::sqrt)
    }

    /// `max_y |(pi P)_y - pi_y|`.
    pub fn residual(&self, p: &StochasticMatrix) -> f64 {
        (p.step(&self.pi) - &self.pi).amax()
    }
}

/// `P(s) = (1 - s) P + s P'` where `P'` turns every marked state absorbing.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolatedChain {
    pub base: StochasticMatrix,
    pub marked: MarkedSet,
    pub s: f64,
    pub result: StochasticMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub ergodic: bool,
    pub irreducible: bool,
    pub aperiodic: bool,
    pub reversible: bool,
    /// Present whenever the chain is irreducible.
    pub pi: Option<StationaryDistribution>,
    /// `max |pi_x p_xy - pi_y p_yx|`, infinite when `pi` is undefined.
    pub detailed_balance_residual: f64,
}

impl ChainReport {
    /// The stationary distribution of an ergodic reversible chain, or the
    /// reason there is none.
    pub fn require_reversible(self) -> Result<StationaryDistribution> {
        if !self.ergodic {
            return Err(Error::NotErgodic);
        }
        if !self.reversible {
            return Err(Error::NotReversible(self.detailed_balance_residual));
        }
        Ok(self.pi.expect("ergodic chains carry pi"))
    }
}

/// Symmetric discriminant `D_xy = sqrt(p_xy(s) p_yx(s))` with its spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Discriminant {
    pub s: f64,
    /// The chain `P(s)` the discriminant was built from.
    pub chain: StochasticMatrix,
    pub matrix: DMatrix<f64>,
    /// Ascending; the top eigenvector is oriented with positive entries.
    pub spectrum: SpectralDecomposition,
    /// Largest `|D - D^T|` entry before symmetrization.
    pub asymmetry: f64,
}

impl Discriminant {
    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn top_value(&self) -> f64 {
        self.spectrum.values[self.n() - 1]
    }

    /// Second largest eigenvalue `lambda_{n-1}(s)`.
    pub fn second_value(&self) -> f64 {
        self.spectrum.values[self.n() - 2]
    }

    /// Spectral gap `1 - lambda_{n-1}(s)`.
    pub fn gap(&self) -> f64 {
        1.0 - self.second_value()
    }

    pub fn top_vector(&self) -> DVector<f64> {
        self.spectrum.vector(self.n() - 1)
    }
}

/// `(I + P) / 2`.
pub fn make_lazy(p: &StochasticMatrix) -> StochasticMatrix {
    let n = p.n();
    let m = (DMatrix::identity(n, n) + p.matrix()) * 0.5;
    StochasticMatrix { m }
}

fn reachable(p: &StochasticMatrix, transpose: bool) -> Vec<bool> {
    let n = p.n();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(x) = queue.pop_front() {
        for y in 0..n {
            let w = if transpose { p.get(y, x) } else { p.get(x, y) };
            if w > 0.0 && !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    seen
}

fn bool_square(a: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    let mut out = vec![vec![false; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] {
                let (row_k, row_i) = (&a[k], &mut out[i]);
                for j in 0..n {
                    row_i[j] |= row_k[j];
                }
            }
        }
    }
    out
}

/// An irreducible chain is aperiodic iff its support is primitive, i.e. some
/// power `k <= (n-1)^2 + 1` is entrywise positive. Powers beyond that bound
/// stay positive, so repeated squaring past it decides the question.
fn is_primitive(p: &StochasticMatrix) -> bool {
    let n = p.n();
    let wielandt = (n - 1) * (n - 1) + 1;
    let mut a: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| p.get(i, j) > 0.0).collect())
        .collect();
    let mut power = 1usize;
    while power < wielandt {
        a = bool_square(&a);
        power *= 2;
    }
    a.iter().all(|row| row.iter().all(|&b| b))
}

/// Solve `(P^T - I) pi = 0` with the last equation replaced by `sum pi = 1`.
pub fn stationary_distribution(p: &StochasticMatrix) -> Result<StationaryDistribution> {
    let n = p.n();
    let mut a = p.matrix().transpose() - DMatrix::identity(n, n);
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    let pi = a.lu().solve(&b).ok_or(Error::NotErgodic)?;
    let total = pi.sum();
    Ok(StationaryDistribution::new(pi / total))
}

pub fn check_ergodic_reversible(p: &StochasticMatrix) -> ChainReport {
    let irreducible =
        reachable(p, false).iter().all(|&b| b) && reachable(p, true).iter().all(|&b| b);
    let aperiodic = irreducible && is_primitive(p);
    let pi = if irreducible {
        stationary_distribution(p).ok()
    } else {
        None
    };
    let detailed_balance_residual = match &pi {
        Some(st) => {
            let n = p.n();
            let mut worst = 0.0_f64;
            for x in 0..n {
                for y in (x + 1)..n {
                    let r = (st.pi[x] * p.get(x, y) - st.pi[y] * p.get(y, x)).abs();
                    worst = worst.max(r);
                }
            }
            worst
        }
        None => f64::INFINITY,
    };
    ChainReport {
        ergodic: irreducible && aperiodic,
        irreducible,
        aperiodic,
        reversible: detailed_balance_residual <= policy().reversible,
        pi,
        detailed_balance_residual,
    }
}

/// Marked rows become `(1 - s) row + s e_x`; unmarked rows are untouched.
pub fn interpolate(p: &StochasticMatrix, marked: &MarkedSet, s: f64) -> Result<InterpolatedChain> {
    check_range("s", s, "[0, 1]", (0.0..=1.0).contains(&s))?;
    if marked.is_empty() {
        return Err(Error::MarkedSet("marked set is empty".into()));
    }
    if marked.n() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            got: marked.n(),
        });
    }
    let mut m = p.matrix().clone();
    if s != 0.0 {
        let n = p.n();
        for &x in marked.indices() {
            for y in 0..n {
                let self_loop = if x == y { 1.0 } else { 0.0 };
                m[(x, y)] = (1.0 - s) * m[(x, y)] + s * self_loop;
            }
        }
    }
    Ok(InterpolatedChain {
        base: p.clone(),
        marked: marked.clone(),
        s,
        result: StochasticMatrix { m },
    })
}

/// Closed-form stationary state of `P(s)`:
/// `((1 - s) pi_U, pi_M) / (1 - s (1 - p_M))`.
pub fn stationary_of_interpolated(
    pi: &StationaryDistribution,
    marked: &MarkedSet,
    s: f64,
) -> Result<StationaryDistribution> {
    check_range("s", s, "[0, 1)", (0.0..1.0).contains(&s))?;
    let p_m = pi.p_m(marked);
    let norm = 1.0 - s * (1.0 - p_m);
    let mask = marked.mask();
    let out = DVector::from_iterator(
        pi.n(),
        pi.pi
            .iter()
            .zip(&mask)
            .map(|(&v, &m)| if m { v / norm } else { (1.0 - s) * v / norm }),
    );
    Ok(StationaryDistribution::new(out))
}

/// Discriminant of an arbitrary chain matrix. The caller is responsible for
/// ergodicity and reversibility; `s` is bookkeeping only.
pub fn discriminant_of(p: &StochasticMatrix, s: f64) -> Discriminant {
    let n = p.n();
    let raw = DMatrix::from_fn(n, n, |x, y| (p.get(x, y) * p.get(y, x)).sqrt());
    let asymmetry = (&raw - raw.transpose()).amax();
    let matrix = (&raw + raw.transpose()) * 0.5;
    let mut spectrum = SpectralDecomposition::hermitian(matrix.clone());
    spectrum.orient_positive(n - 1);
    Discriminant {
        s,
        chain: p.clone(),
        matrix,
        spectrum,
        asymmetry,
    }
}

pub fn discriminant(chain: &InterpolatedChain) -> Result<Discriminant> {
    check_range(
        "s",
        chain.s,
        "[0, s_cap]",
        (0.0..=policy().s_cap).contains(&chain.s),
    )?;
    let d = discriminant_of(&chain.result, chain.s);
    debug_assert!(d.asymmetry <= policy().discriminant_asymmetry);
    Ok(d)
}

/// Decomposition of the top discriminant eigenvector into the normalized
/// unmarked and marked parts of `sqrt(pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UmSplit {
    pub u_state: DVector<f64>,
    pub m_state: DVector<f64>,
    pub coeff_u: f64,
    pub coeff_m: f64,
    /// `coeff_u |U> + coeff_m |M>`.
    pub v_n: DVector<f64>,
}

pub fn u_m_split(pi: &StationaryDistribution, marked: &MarkedSet, s: f64) -> Result<UmSplit> {
    check_range("s", s, "[0, 1)", (0.0..1.0).contains(&s))?;
    let p_m = pi.p_m(marked);
    check_range("p_M", p_m, "(0, 1)", p_m > 0.0 && p_m < 1.0)?;
    let mask = marked.mask();
    let root = pi.sqrt();
    let u_state = DVector::from_iterator(
        pi.n(),
        root.iter().zip(&mask).map(|(&r, &m)| if m { 0.0 } else { r }),
    ) / (1.0 - p_m).sqrt();
    let m_state = DVector::from_iterator(
        pi.n(),
        root.iter().zip(&mask).map(|(&r, &m)| if m { r } else { 0.0 }),
    ) / p_m.sqrt();
    let denom = 1.0 - s * (1.0 - p_m);
    let coeff_u = ((1.0 - s) * (1.0 - p_m) / denom).sqrt();
    let coeff_m = (p_m / denom).sqrt();
    let v_n = &u_state * coeff_u + &m_state * coeff_m;
    Ok(UmSplit {
        u_state,
        m_state,
        coeff_u,
        coeff_m,
        v_n,
    })
}

/// `s* = 1 - p_M / (1 - p_M)`, where the top eigenvector is `(|U> + |M>)/sqrt 2`.
pub fn s_star(p_m: f64) -> Result<f64> {
    check_range("p_M", p_m, "(0, 1/2)", p_m > 0.0 && p_m < 0.5)?;
    Ok(1.0 - p_m / (1.0 - p_m))
}
