//! Two-dimensional status evolution chain `U_n = (X_n, T_n)`.
//!
//! `X_n` is the status over a finite alphabet and `T_n` counts the slots the
//! system has spent in its current status. From `(x, t)` the chain either
//! stays in `x` and moves to `(x, t + 1)`, or, with probability `q_t(x)`,
//! leaves: a new status `y` is drawn from row `p_x` of the change kernel and
//! the chain lands on `(y, 0)`. A draw of `y == x` is allowed and still counts
//! as a change.
//!
//! The stationary law has the product form
//!
//! ```text
//! mu(x, i) = mu(x, 0) * prod_{j < i} (1 - q_j(x))
//! ```
//!
//! where `mu(x, 0)` is proportional to the stationary vector of the change
//! kernel divided by the mean dwell length. All entropies are in bits.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Tolerance on change kernel row sums.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// Tolerance on the normalization of a probability vector passed to
/// [`discrete_entropy`].
pub const ENTROPY_NORM_TOL: f64 = 1e-9;

/// Default per-model tail mass left out of the stored stationary distribution.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Upper bound on the number of dwell levels stored per status.
pub const MAX_DWELL_LEVELS: usize = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("change kernel has {rows} rows but alphabet size is {alphabet}")]
    RowCount { rows: usize, alphabet: usize },
    #[error("change kernel row {row} has length {len}, expected {alphabet}")]
    RowLength {
        row: usize,
        len: usize,
        alphabet: usize,
    },
    #[error("dwell kernel covers {states} states but alphabet size is {alphabet}")]
    DwellCount { states: usize, alphabet: usize },
    #[error("alphabet must contain at least one status")]
    EmptyAlphabet,
    #[error("change kernel entry ({row}, {col}) = {value} is not a probability")]
    BadEntry { row: usize, col: usize, value: f64 },
    #[error("change kernel row {row} sums to {sum}")]
    RowSum { row: usize, sum: f64 },
    #[error("dwell probability q_{level}({state}) = {value} is not a probability")]
    BadDwell {
        state: usize,
        level: usize,
        value: f64,
    },
    #[error("dwell tail for status {state} is zero; the dwell counter would never reset")]
    ZeroTail { state: usize },
    #[error("status {0} is outside the alphabet")]
    UnknownState(usize),
    #[error("change chain is not irreducible; statuses {unreachable:?} do not communicate with status 0")]
    NotIrreducible { unreachable: Vec<usize> },
    #[error("dwell kernel differs between statuses")]
    NotHomogeneous,
    #[error("status {state} needs more than {limit} dwell levels to reach the tail tolerance")]
    TruncationTooLong { state: usize, limit: usize },
    #[error("stationary solve for the change chain failed")]
    Singular,
    #[error("invalid probability vector: {0}")]
    BadDistribution(String),
}

/// Index of a status in the alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub usize);

impl StateId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Row-stochastic matrix giving the next status after a change.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangeKernel {
    rows: Vec<Vec<f64>>,
}

impl ChangeKernel {
    pub fn new(rows: Vec<Vec<f64>>) -> Self {
        Self { rows }
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, x: StateId) -> &[f64] {
        &self.rows[x.0]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Change probabilities `q_i(x)` for one status: an explicit prefix followed
/// by a constant tail value used for every level past the prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct DwellLaw {
    pub prefix: Vec<f64>,
    pub tail: f64,
}

impl DwellLaw {
    pub fn new(prefix: Vec<f64>, tail: f64) -> Self {
        Self { prefix, tail }
    }

    /// Memoryless dwell: change with probability `q` in every slot.
    pub fn geometric(q: f64) -> Self {
        Self {
            prefix: Vec::new(),
            tail: q,
        }
    }

    /// `q_level`, the probability of leaving after `level` slots in the status.
    pub fn change_prob(&self, level: u64) -> f64 {
        usize::try_from(level)
            .ok()
            .and_then(|i| self.prefix.get(i).copied())
            .unwrap_or(self.tail)
    }

    /// Survival `prod_{j < level} (1 - q_j)`.
    pub fn survival(&self, level: usize) -> f64 {
        (0..level).fold(1.0, |acc, j| acc * (1.0 - self.change_prob(j as u64)))
    }

    /// Mean dwell length `sum_i prod_{j<i} (1 - q_j)` with the geometric tail
    /// summed in closed form.
    pub fn mean_dwell(&self) -> f64 {
        let mut surv = 1.0;
        let mut total = 0.0;
        for &q in &self.prefix {
            total += surv;
            surv *= 1.0 - q;
        }
        total + surv / self.tail
    }

    fn same_law(&self, other: &DwellLaw) -> bool {
        let m = self.prefix.len().max(other.prefix.len());
        (0..=m as u64).all(|i| self.change_prob(i) == other.change_prob(i))
    }
}

/// Per-status dwell laws.
#[derive(Debug, Clone, PartialEq)]
pub struct DwellKernel {
    laws: Vec<DwellLaw>,
}

impl DwellKernel {
    pub fn new(laws: Vec<DwellLaw>) -> Self {
        Self { laws }
    }

    /// Same law for every status.
    pub fn homogeneous(law: DwellLaw, alphabet_size: usize) -> Self {
        Self {
            laws: vec![law; alphabet_size],
        }
    }

    pub fn law(&self, x: StateId) -> &DwellLaw {
        &self.laws[x.0]
    }

    pub fn laws(&self) -> &[DwellLaw] {
        &self.laws
    }

    pub fn is_homogeneous(&self) -> bool {
        self.laws.windows(2).all(|w| w[0].same_law(&w[1]))
    }
}

/// A point `(x, t)` of the joint chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct JointState {
    pub x: StateId,
    pub t: u64,
}

impl JointState {
    pub fn new(x: usize, t: u64) -> Self {
        Self { x: StateId(x), t }
    }
}

/// Validated pair of change and dwell kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct JointModel {
    change: ChangeKernel,
    dwell: DwellKernel,
    alphabet_size: usize,
}

/// Checks both kernels and bundles them into a model.
pub fn validate_model(change: ChangeKernel, dwell: DwellKernel) -> Result<JointModel, ModelError> {
    let alphabet = change.len();
    if alphabet == 0 {
        return Err(ModelError::EmptyAlphabet);
    }
    for (r, row) in change.rows().iter().enumerate() {
        if row.len() != alphabet {
            return Err(ModelError::RowLength {
                row: r,
                len: row.len(),
                alphabet,
            });
        }
        for (c, &v) in row.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(ModelError::BadEntry {
                    row: r,
                    col: c,
                    value: v,
                });
            }
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(ModelError::RowSum { row: r, sum });
        }
    }
    if dwell.laws().len() != alphabet {
        return Err(ModelError::DwellCount {
            states: dwell.laws().len(),
            alphabet,
        });
    }
    for (x, law) in dwell.laws().iter().enumerate() {
        let levels = law.prefix.iter().chain(std::iter::once(&law.tail));
        for (level, &q) in levels.enumerate() {
            if !(0.0..=1.0).contains(&q) {
                return Err(ModelError::BadDwell {
                    state: x,
                    level,
                    value: q,
                });
            }
        }
        if law.tail == 0.0 {
            return Err(ModelError::ZeroTail { state: x });
        }
    }
    Ok(JointModel {
        change,
        dwell,
        alphabet_size: alphabet,
    })
}

impl JointModel {
    pub fn new(change: ChangeKernel, dwell: DwellKernel) -> Result<Self, ModelError> {
        validate_model(change, dwell)
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn change(&self) -> &ChangeKernel {
        &self.change
    }

    pub fn dwell(&self) -> &DwellKernel {
        &self.dwell
    }

    /// `q_t(x)`.
    pub fn change_prob(&self, x: StateId, t: u64) -> f64 {
        self.dwell.law(x).change_prob(t)
    }

    pub fn check_state(&self, u: JointState) -> Result<(), ModelError> {
        if u.x.0 < self.alphabet_size {
            Ok(())
        } else {
            Err(ModelError::UnknownState(u.x.0))
        }
    }

    /// One transition driven by two uniform draws in `[0, 1)`: the first
    /// decides whether a change happens, the second picks the new status by
    /// inverse CDF over the change row.
    pub fn joint_step(
        &self,
        u: JointState,
        change_draw: f64,
        target_draw: f64,
    ) -> Result<JointState, ModelError> {
        self.check_state(u)?;
        if change_draw < self.change_prob(u.x, u.t) {
            let row = self.change.row(u.x);
            let mut acc = 0.0;
            let mut target = None;
            for (y, &p) in row.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                acc += p;
                target = Some(y);
                if target_draw < acc {
                    break;
                }
            }
            // a row always has a positive entry after validation
            let y = target.ok_or(ModelError::RowSum { row: u.x.0, sum: 0.0 })?;
            Ok(JointState::new(y, 0))
        } else {
            Ok(JointState {
                x: u.x,
                t: u.t + 1,
            })
        }
    }

    /// States that do not communicate with status 0 in the change chain.
    fn non_communicating(&self) -> Vec<usize> {
        let n = self.alphabet_size;
        let reach = |forward: bool| {
            let mut seen = vec![false; n];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(a) = stack.pop() {
                for (b, seen_b) in seen.iter_mut().enumerate() {
                    let p = if forward {
                        self.change.rows[a][b]
                    } else {
                        self.change.rows[b][a]
                    };
                    if p > 0.0 && !*seen_b {
                        *seen_b = true;
                        stack.push(b);
                    }
                }
            }
            seen
        };
        let fwd = reach(true);
        let bwd = reach(false);
        (0..n).filter(|&x| !(fwd[x] && bwd[x])).collect()
    }

    /// Stationary vector of the change kernel. Requires irreducibility.
    pub fn change_stationary(&self) -> Result<Vec<f64>, ModelError> {
        let unreachable = self.non_communicating();
        if !unreachable.is_empty() {
            return Err(ModelError::NotIrreducible { unreachable });
        }
        let n = self.alphabet_size;
        // (P^T - I) pi = 0 with the last balance equation replaced by sum(pi) = 1
        let mut a = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = self.change.rows[j][i] - if i == j { 1.0 } else { 0.0 };
            }
        }
        for j in 0..n {
            a[(n - 1, j)] = 1.0;
        }
        let mut b = DVector::<f64>::zeros(n);
        b[n - 1] = 1.0;
        let pi = a.lu().solve(&b).ok_or(ModelError::Singular)?;
        Ok(pi.iter().map(|&v| v.max(0.0)).collect())
    }
}

/// Stationary law of the joint chain, stored per status up to a truncation
/// level. Probabilities beyond the stored levels are accounted for in
/// `tail_mass`.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution {
    mu: Vec<Vec<f64>>,
    tail_mass: f64,
}

impl StationaryDistribution {
    /// `mu(x, i)`; zero past the stored levels.
    pub fn prob(&self, u: JointState) -> f64 {
        self.mu
            .get(u.x.0)
            .and_then(|levels| usize::try_from(u.t).ok().and_then(|i| levels.get(i)))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn levels(&self, x: StateId) -> &[f64] {
        &self.mu[x.0]
    }

    pub fn alphabet_size(&self) -> usize {
        self.mu.len()
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn stored_mass(&self) -> f64 {
        self.mu.iter().flatten().sum()
    }

    /// Number of stored dwell levels for status `x`.
    pub fn truncation_len(&self, x: StateId) -> usize {
        self.mu[x.0].len()
    }

    /// All stored `(state, probability)` pairs in status-major order.
    pub fn iter(&self) -> impl Iterator<Item = (JointState, f64)> + '_ {
        self.mu.iter().enumerate().flat_map(|(x, levels)| {
            levels
                .iter()
                .enumerate()
                .map(move |(i, &m)| (JointState::new(x, i as u64), m))
        })
    }
}

/// Solves the change chain, then fills each status's dwell levels with the
/// product formula until the remaining mass drops below
/// `tail_tol / alphabet_size`.
pub fn stationary_distribution(
    model: &JointModel,
    tail_tol: f64,
) -> Result<StationaryDistribution, ModelError> {
    let pi = model.change_stationary()?;
    let laws = model.dwell.laws();
    let norm: f64 = pi
        .iter()
        .zip(laws)
        .map(|(&p, law)| p * law.mean_dwell())
        .sum();
    let per_state_tol = tail_tol / model.alphabet_size as f64;

    let mut mu = Vec::with_capacity(model.alphabet_size);
    let mut tail_mass = 0.0;
    for (x, (&p, law)) in pi.iter().zip(laws).enumerate() {
        let head = p / norm;
        let m = law.prefix.len();
        // remaining[i] = sum_{k >= i} survival(k), exact for the geometric tail
        let mut remaining_prefix = vec![0.0; m + 1];
        let mut surv = Vec::with_capacity(m + 1);
        let mut s = 1.0;
        for &q in &law.prefix {
            surv.push(s);
            s *= 1.0 - q;
        }
        surv.push(s);
        remaining_prefix[m] = surv[m] / law.tail;
        for i in (0..m).rev() {
            remaining_prefix[i] = remaining_prefix[i + 1] + surv[i];
        }

        let mut levels = Vec::new();
        let mut s = 1.0;
        let mut i = 0usize;
        loop {
            levels.push(head * s);
            s *= 1.0 - law.change_prob(i as u64);
            i += 1;
            let rest = if i <= m {
                remaining_prefix[i]
            } else {
                s / law.tail
            };
            let rest_mass = head * rest;
            if i >= m && rest_mass < per_state_tol {
                tail_mass += rest_mass;
                break;
            }
            if levels.len() >= MAX_DWELL_LEVELS {
                return Err(ModelError::TruncationTooLong {
                    state: x,
                    limit: MAX_DWELL_LEVELS,
                });
            }
        }
        mu.push(levels);
    }
    Ok(StationaryDistribution { mu, tail_mass })
}

/// `P(T_n = 0)`, the per-slot probability of a status change.
pub fn prob_change(dist: &StationaryDistribution) -> f64 {
    dist.mu.iter().filter_map(|levels| levels.first()).sum()
}

/// Entropy in bits of a probability vector, with `0 log 0 = 0`.
pub fn discrete_entropy(pi: &[f64]) -> Result<f64, ModelError> {
    if let Some(v) = pi.iter().find(|v| v.is_nan() || **v < 0.0) {
        return Err(ModelError::BadDistribution(format!("entry {v} is negative")));
    }
    let sum: f64 = pi.iter().sum();
    if (sum - 1.0).abs() > ENTROPY_NORM_TOL {
        return Err(ModelError::BadDistribution(format!("entries sum to {sum}")));
    }
    Ok(entropy_bits(pi))
}

/// Unchecked entropy in bits.
pub fn entropy_bits(pi: &[f64]) -> f64 {
    pi.iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// `H(q, 1 - q)` in bits.
pub fn binary_entropy(q: f64) -> f64 {
    if q <= 0.0 || q >= 1.0 {
        0.0
    } else {
        -q * q.log2() - (1.0 - q) * (1.0 - q).log2()
    }
}

/// Entropy rate with a bound on the error from the truncated dwell tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyRate {
    pub bits: f64,
    pub truncation_bound: f64,
}

/// Entropy rate of the joint chain:
///
/// ```text
/// sum_x sum_i mu(x, i) [ H(q_i(x), 1 - q_i(x)) + q_i(x) H(p_x) ]
/// ```
///
/// summed over the stored levels of `dist`. Each one-step law has at most
/// `|X| + 1` outcomes, so the omitted tail contributes at most
/// `tail_mass * log2(|X| + 1)`.
pub fn entropy_rate(model: &JointModel, dist: &StationaryDistribution) -> EntropyRate {
    let mut bits = 0.0;
    for (x, levels) in dist.mu.iter().enumerate() {
        let law = model.dwell.law(StateId(x));
        let row_entropy = entropy_bits(model.change.row(StateId(x)));
        for (i, &m) in levels.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let q = law.change_prob(i as u64);
            bits += m * (binary_entropy(q) + q * row_entropy);
        }
    }
    let truncation_bound = dist.tail_mass * ((model.alphabet_size + 1) as f64).log2();
    EntropyRate {
        bits,
        truncation_bound,
    }
}

/// Entropy rate of the dwell counter alone, `H(P_T)`, for a single law.
pub fn dwell_entropy_rate(law: &DwellLaw) -> f64 {
    let mut surv = 1.0;
    let mut weighted = 0.0;
    let mut mass = 0.0;
    for &q in &law.prefix {
        weighted += surv * binary_entropy(q);
        mass += surv;
        surv *= 1.0 - q;
    }
    weighted += surv / law.tail * binary_entropy(law.tail);
    mass += surv / law.tail;
    weighted / mass
}

/// `H(P_X)`: entropy rate of the change chain under its stationary vector.
pub fn change_entropy_rate(model: &JointModel) -> Result<f64, ModelError> {
    let pi = model.change_stationary()?;
    Ok(pi
        .iter()
        .zip(model.change.rows())
        .map(|(&p, row)| p * entropy_bits(row))
        .sum())
}

/// `H(P_T) + H(P_X) P(T_n = 0)`, valid when every status shares one dwell law.
pub fn entropy_rate_homogeneous(
    model: &JointModel,
    dist: &StationaryDistribution,
) -> Result<f64, ModelError> {
    if !model.dwell.is_homogeneous() {
        return Err(ModelError::NotHomogeneous);
    }
    let dwell = dwell_entropy_rate(model.dwell.law(StateId(0)));
    let change = change_entropy_rate(model)?;
    Ok(dwell + change * prob_change(dist))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn swap(q: f64) -> JointModel {
        validate_model(
            ChangeKernel::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]),
            DwellKernel::homogeneous(DwellLaw::geometric(q), 2),
        )
        .unwrap()
    }

    fn cycle3() -> JointModel {
        validate_model(
            ChangeKernel::new(vec![
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
                vec![1.0, 0.0, 0.0],
            ]),
            DwellKernel::homogeneous(DwellLaw::geometric(1.0), 3),
        )
        .unwrap()
    }

    fn uniform3(q: f64) -> JointModel {
        validate_model(
            ChangeKernel::new(vec![
                vec![0.0, 0.5, 0.5],
                vec![0.5, 0.0, 0.5],
                vec![0.5, 0.5, 0.0],
            ]),
            DwellKernel::homogeneous(DwellLaw::geometric(q), 3),
        )
        .unwrap()
    }

    #[test]
    fn validation_accepts_and_rejects() {
        swap(0.6);
        validate_model(
            ChangeKernel::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
            DwellKernel::homogeneous(DwellLaw::geometric(0.5), 2),
        )
        .unwrap();
        let err = validate_model(
            ChangeKernel::new(vec![vec![0.5, 0.4], vec![0.0, 1.0]]),
            DwellKernel::homogeneous(DwellLaw::geometric(0.5), 2),
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::RowSum { row: 0, .. }));
        let err = validate_model(
            ChangeKernel::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]),
            DwellKernel::homogeneous(DwellLaw::new(vec![0.3], 0.0), 2),
        )
        .unwrap_err();
        assert_eq!(err, ModelError::ZeroTail { state: 0 });
        let err = validate_model(
            ChangeKernel::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]),
            DwellKernel::homogeneous(DwellLaw::geometric(0.5), 3),
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::DwellCount { .. }));
        let err = validate_model(
            ChangeKernel::new(vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0]]),
            DwellKernel::homogeneous(DwellLaw::geometric(0.5), 2),
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::RowLength { .. }));
    }

    #[test]
    fn step_rules() {
        let model = validate_model(
            ChangeKernel::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]),
            DwellKernel::new(vec![
                DwellLaw::new(vec![1.0, 0.2, 0.2, 0.0], 0.5),
                DwellLaw::geometric(0.5),
            ]),
        )
        .unwrap();
        for draw in [0.0, 0.3, 0.999] {
            assert_eq!(
                model.joint_step(JointState::new(0, 3), draw, draw).unwrap(),
                JointState::new(0, 4)
            );
            assert_eq!(
                model.joint_step(JointState::new(0, 0), draw, draw).unwrap(),
                JointState::new(1, 0)
            );
        }
        assert!(model.joint_step(JointState::new(2, 0), 0.1, 0.1).is_err());
    }

    #[test]
    fn swap_stationary() {
        let dist = stationary_distribution(&swap(0.6), DEFAULT_TAIL_TOL).unwrap();
        for x in 0..2 {
            for i in 0..20 {
                let expected = 0.3 * 0.4f64.powi(i);
                let got = dist.prob(JointState::new(x, i as u64));
                assert!((got - expected).abs() < 1e-15, "{x} {i}: {got}");
            }
        }
        assert!((prob_change(&dist) - 0.6).abs() < 1e-12);
        assert!(dist.tail_mass() <= DEFAULT_TAIL_TOL);
        assert!((dist.stored_mass() + dist.tail_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cycle_is_deterministic() {
        let model = cycle3();
        let dist = stationary_distribution(&model, DEFAULT_TAIL_TOL).unwrap();
        for x in 0..3 {
            assert!((dist.prob(JointState::new(x, 0)) - 1.0 / 3.0).abs() < 1e-15);
            assert_eq!(dist.prob(JointState::new(x, 1)), 0.0);
        }
        assert_eq!(prob_change(&dist), 1.0);
        assert_eq!(entropy_rate(&model, &dist).bits, 0.0);
        assert_eq!(entropy_rate_homogeneous(&model, &dist).unwrap(), 0.0);
    }

    #[test]
    fn reducible_change_chain_is_reported() {
        let model = validate_model(
            ChangeKernel::new(vec![
                vec![0.0, 1.0, 0.0],
                vec![1.0, 0.0, 0.0],
                vec![0.5, 0.0, 0.5],
            ]),
            DwellKernel::homogeneous(DwellLaw::geometric(0.5), 3),
        )
        .unwrap();
        let err = stationary_distribution(&model, DEFAULT_TAIL_TOL).unwrap_err();
        assert_eq!(err, ModelError::NotIrreducible { unreachable: vec![2] });
    }

    #[test]
    fn entropy_values() {
        assert_eq!(discrete_entropy(&[0.5, 0.5]).unwrap(), 1.0);
        assert_eq!(discrete_entropy(&[1.0, 0.0]).unwrap(), 0.0);
        let h = discrete_entropy(&[0.6, 0.4]).unwrap();
        assert!((h - 0.970951).abs() < 1e-6);
        assert!(discrete_entropy(&[0.5, 0.4]).is_err());
        assert!(discrete_entropy(&[1.5, -0.5]).is_err());
    }

    #[test]
    fn entropy_rate_examples() {
        let m = swap(0.6);
        let d = stationary_distribution(&m, DEFAULT_TAIL_TOL).unwrap();
        let r = entropy_rate(&m, &d);
        assert!((r.bits - binary_entropy(0.6)).abs() < 1e-12);
        assert!(r.truncation_bound < 1e-11);
        assert!((entropy_rate_homogeneous(&m, &d).unwrap() - r.bits).abs() < 1e-9);

        let m = uniform3(0.5);
        let d = stationary_distribution(&m, DEFAULT_TAIL_TOL).unwrap();
        assert!((entropy_rate(&m, &d).bits - 1.5).abs() < 1e-11);
        assert!((entropy_rate_homogeneous(&m, &d).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn always_changing_rate_is_change_entropy() {
        let m = uniform3(1.0);
        let d = stationary_distribution(&m, DEFAULT_TAIL_TOL).unwrap();
        assert_eq!(entropy_rate_homogeneous(&m, &d).unwrap(), 1.0);
        assert_eq!(entropy_rate(&m, &d).bits, 1.0);
    }

    #[test]
    fn heterogeneous_dwell_is_not_homogeneous() {
        let m = validate_model(
            ChangeKernel::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]),
            DwellKernel::new(vec![DwellLaw::geometric(0.2), DwellLaw::geometric(0.7)]),
        )
        .unwrap();
        let d = stationary_distribution(&m, DEFAULT_TAIL_TOL).unwrap();
        assert_eq!(
            entropy_rate_homogeneous(&m, &d),
            Err(ModelError::NotHomogeneous)
        );
        // mean dwell 5 vs 1/0.7, each status entered equally often
        let norm = 5.0 + 1.0 / 0.7;
        assert!((d.prob(JointState::new(0, 0)) - 1.0 / norm).abs() < 1e-15);
    }

    #[test]
    fn prefix_equivalent_to_tail_is_homogeneous() {
        let k = DwellKernel::new(vec![DwellLaw::new(vec![0.5], 0.5), DwellLaw::geometric(0.5)]);
        assert!(k.is_homogeneous());
    }
}
