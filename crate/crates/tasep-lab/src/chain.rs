//! The six Markov chains over rows and complete configurations: transition
//! matrices with exact rational entries, exact and floating stationary
//! solvers, structural checks, and seeded simulation.
//!
//! Every chain picks a wall uniformly at random each step (`n + 1` walls
//! for open boundaries, `n` for the circle) and applies its move with the
//! probability attached to the local pattern; the remaining mass stays put.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num::{BigInt, BigRational, BigUint, Integer, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config::{Boundary, CompleteConfig, Particle, TasepRow};
use crate::enumerate::{
    binomial, count_omega, count_omega0, count_omega_hat_sector, omega, omega0, omega_hat_sector,
    rows2, rows3, rows_circular, EnumError,
};
use crate::kernel::{
    circular_map, relocation_map, relocation_map_primary, relocation_map_secondary, theta, theta3,
    theta_hat, ThetaVariant,
};
use crate::weight::{rational_to_f64, RateParams, WeightError};

/// Largest state space the matrix builders will enumerate.
pub const DEFAULT_SPACE_CAP: usize = 200_000;

/// Largest state space the floating stationary solver accepts.
pub const FLOAT_SOLVE_CAP: usize = 4_000;

// --- errors ---

/// Errors raised while building or analyzing chains.
#[derive(Clone, PartialEq, Debug, Error)]
pub enum ChainError {
    #[error("state space for {model} at n {n} has {size} states, over the cap {cap}")]
    SpaceTooLarge {
        model: Model,
        n: usize,
        size: BigUint,
        cap: usize,
    },
    #[error("{model} requires a sector (k, l, m)")]
    SectorRequired { model: Model },
    #[error("{model} does not take a sector")]
    SectorUnsupported { model: Model },
    #[error("sector ({k}, {l}, {m}) does not fit size {n}")]
    BadSector {
        n: usize,
        k: usize,
        l: usize,
        m: usize,
    },
    #[error("the circular complete chain needs at least one neutral column")]
    NeedsNeutralColumn,
    #[error("chain is not irreducible: {witness} and {base} do not communicate")]
    NotIrreducible { base: String, witness: String },
    #[error("not a stationary vector: {reason}")]
    NotStationary { reason: String },
    #[error("initial state {state:?} is not a state of this chain")]
    BadInitial { state: String },
    #[error("burn-in {burn_in} is not below the step count {steps}")]
    BadBurnIn { burn_in: u64, steps: u64 },
    #[error("float stationary solve capped at {cap} states, space has {size}")]
    FloatSolveTooLarge { size: usize, cap: usize },
    #[error("weights must be nonnegative with a positive sum")]
    BadWeights,
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Enumerate(#[from] EnumError),
}

// --- chain specification ---

/// The six models: row or complete chains over two species, three species,
/// and the circle.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Model {
    /// Two-species row chain (open boundaries).
    RowTwo,
    /// Two-species complete chain on balanced pairs.
    CompleteTwo,
    /// Three-species row chain (open boundaries).
    RowThree,
    /// Three-species complete chain.
    CompleteThree,
    /// Circular row chain; conserves the letter counts.
    RowCircular,
    /// Circular complete chain on a sector with neutral columns.
    CompleteCircular,
}

impl Model {
    pub fn as_str(&self) -> &'static str {
        match self {
            Model::RowTwo => "s0",
            Model::CompleteTwo => "x0",
            Model::RowThree => "s",
            Model::CompleteThree => "x",
            Model::RowCircular => "shat",
            Model::CompleteCircular => "xhat",
        }
    }

    /// True for the chains whose states are single rows.
    pub fn is_row(&self) -> bool {
        matches!(self, Model::RowTwo | Model::RowThree | Model::RowCircular)
    }

    /// True for the circular chains.
    pub fn is_circular(&self) -> bool {
        matches!(self, Model::RowCircular | Model::CompleteCircular)
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Model, String> {
        match s {
            "s0" => Ok(Model::RowTwo),
            "x0" => Ok(Model::CompleteTwo),
            "s" => Ok(Model::RowThree),
            "x" => Ok(Model::CompleteThree),
            "shat" => Ok(Model::RowCircular),
            "xhat" => Ok(Model::CompleteCircular),
            other => Err(format!(
                "unknown model {other:?} (expected s0, x0, s, x, shat, or xhat)"
            )),
        }
    }
}

/// Conserved letter counts for the circular chains: `k` blacks, `l`
/// neutrals, `m` whites in the top row.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Sector {
    pub k: usize,
    pub l: usize,
    pub m: usize,
}

/// A fully specified chain.
#[derive(Clone, PartialEq, Debug)]
pub struct ChainSpec {
    pub model: Model,
    pub n: usize,
    pub params: RateParams,
    pub sector: Option<Sector>,
}

impl ChainSpec {
    /// Checks the sector against the model and the rates against the moves
    /// the model uses.
    pub fn validate(&self) -> Result<(), ChainError> {
        match (self.model.is_circular(), self.sector) {
            (true, None) => return Err(ChainError::SectorRequired { model: self.model }),
            (false, Some(_)) => return Err(ChainError::SectorUnsupported { model: self.model }),
            (true, Some(Sector { k, l, m })) => {
                if k + l + m != self.n {
                    return Err(ChainError::BadSector { n: self.n, k, l, m });
                }
                if self.model == Model::CompleteCircular && l == 0 {
                    return Err(ChainError::NeedsNeutralColumn);
                }
            }
            (false, None) => {}
        }
        if matches!(self.model, Model::RowThree | Model::CompleteThree) {
            self.params.check_neutral_rate()?;
        }
        Ok(())
    }

    /// Number of walls a step chooses from.
    pub fn walls(&self) -> usize {
        if self.model.is_circular() {
            self.n
        } else {
            self.n + 1
        }
    }
}

// --- state spaces ---

/// The states of a chain, either rows or complete configurations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum StateSpace {
    Rows(Vec<TasepRow>),
    Complete(Vec<CompleteConfig>),
}

impl StateSpace {
    pub fn len(&self) -> usize {
        match self {
            StateSpace::Rows(v) => v.len(),
            StateSpace::Complete(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn labels(&self) -> Vec<String> {
        match self {
            StateSpace::Rows(v) => v.iter().map(|r| r.serialize()).collect(),
            StateSpace::Complete(v) => v.iter().map(|c| c.serialize()).collect(),
        }
    }
}

fn space_size(spec: &ChainSpec) -> BigUint {
    let n = spec.n as u64;
    match spec.model {
        Model::RowTwo => BigUint::from(2u32).pow(spec.n as u32),
        Model::RowThree => BigUint::from(3u32).pow(spec.n as u32),
        Model::CompleteTwo => count_omega0(n),
        Model::CompleteThree => count_omega(n),
        Model::RowCircular => {
            let s = spec.sector.expect("validated sector");
            binomial(n, s.k as u64) * binomial(n - s.k as u64, s.l as u64)
        }
        Model::CompleteCircular => {
            let s = spec.sector.expect("validated sector");
            count_omega_hat_sector(n, s.l as u64, s.k as u64)
        }
    }
}

/// Enumerates the states of a chain, sorted, after checking the size cap.
pub fn state_space(spec: &ChainSpec) -> Result<StateSpace, ChainError> {
    state_space_with_cap(spec, DEFAULT_SPACE_CAP)
}

/// [`state_space`] with an explicit cap.
pub fn state_space_with_cap(spec: &ChainSpec, cap: usize) -> Result<StateSpace, ChainError> {
    spec.validate()?;
    let size = space_size(spec);
    if size > BigUint::from(cap) {
        return Err(ChainError::SpaceTooLarge {
            model: spec.model,
            n: spec.n,
            size,
            cap,
        });
    }
    let n = spec.n;
    Ok(match spec.model {
        Model::RowTwo => StateSpace::Rows(rows2(n)),
        Model::RowThree => StateSpace::Rows(rows3(n)),
        Model::CompleteTwo => StateSpace::Complete(omega0(n)),
        Model::CompleteThree => StateSpace::Complete(omega(n)),
        Model::RowCircular => {
            let s = spec.sector.expect("validated sector");
            StateSpace::Rows(rows_circular(n, s.k, s.l, s.m)?)
        }
        Model::CompleteCircular => {
            let s = spec.sector.expect("validated sector");
            StateSpace::Complete(omega_hat_sector(n, s.k, s.l, s.m)?)
        }
    })
}

// --- local move masses ---

/// The base rate of the three-species pattern at a wall; `None` marks a
/// border side.
pub(crate) fn lambda_pattern(
    left: Option<Particle>,
    right: Option<Particle>,
    params: &RateParams,
) -> BigRational {
    match (left, right) {
        (None, Some(Particle::White)) => params.beta().clone(),
        (None, Some(Particle::Neutral)) => params.neutral_rate(),
        (Some(Particle::Black), None) => params.gamma().clone(),
        (Some(Particle::Neutral), None) => params.neutral_rate(),
        (Some(Particle::Black), Some(Particle::White)) => params.alpha().clone(),
        (Some(Particle::Neutral), Some(Particle::White)) => params.beta().clone(),
        (Some(Particle::Black), Some(Particle::Neutral)) => params.gamma().clone(),
        _ => BigRational::zero(),
    }
}

/// Splits the pattern rate into the masses of the primary and secondary
/// moves. A neutral border cell moves only through the secondary map, with
/// its full rate; everything else splits `(1 - epsilon)` to `epsilon`.
pub(crate) fn mass_split(
    left: Option<Particle>,
    right: Option<Particle>,
    params: &RateParams,
) -> (BigRational, BigRational) {
    let lambda = lambda_pattern(left, right, params);
    if lambda.is_zero() {
        return (BigRational::zero(), BigRational::zero());
    }
    let neutral_border = matches!(
        (left, right),
        (None, Some(Particle::Neutral)) | (Some(Particle::Neutral), None)
    );
    if neutral_border {
        (BigRational::zero(), lambda)
    } else {
        let complement = BigRational::one() - params.epsilon();
        (complement * &lambda, params.epsilon() * lambda)
    }
}

/// The rate of the two-species move at a wall: `beta` entering, `gamma`
/// leaving, `alpha` in the bulk.
pub(crate) fn lambda_wall(wall: usize, n: usize, params: &RateParams) -> BigRational {
    if wall == 0 {
        params.beta().clone()
    } else if wall == n {
        params.gamma().clone()
    } else {
        params.alpha().clone()
    }
}

pub(crate) fn open_pattern(
    cells: &[Particle],
    wall: usize,
) -> (Option<Particle>, Option<Particle>) {
    let n = cells.len();
    let left = if wall >= 1 {
        Some(cells[wall - 1])
    } else {
        None
    };
    let right = if wall < n { Some(cells[wall]) } else { None };
    (left, right)
}

pub(crate) fn circular_pattern(
    cells: &[Particle],
    wall: usize,
) -> (Option<Particle>, Option<Particle>) {
    let n = cells.len();
    let left = if wall == 0 { n } else { wall };
    let right = wall % n + 1;
    (Some(cells[left - 1]), Some(cells[right - 1]))
}

/// The circular move's rate reads the pattern with bulk, entering, and
/// leaving rates attached to the three swap types.
pub(crate) fn lambda_circular(
    left: Option<Particle>,
    right: Option<Particle>,
    params: &RateParams,
) -> BigRational {
    match (left, right) {
        (Some(Particle::Black), Some(Particle::White)) => params.alpha().clone(),
        (Some(Particle::Neutral), Some(Particle::White)) => params.beta().clone(),
        (Some(Particle::Black), Some(Particle::Neutral)) => params.gamma().clone(),
        _ => BigRational::zero(),
    }
}

// --- transition matrix ---

/// A stochastic matrix over labeled states. Row `i` lists `(j, p)` pairs
/// with positive probability, ascending in `j`, self-loop included.
#[derive(Clone, PartialEq, Debug)]
pub struct TransitionMatrix {
    pub labels: Vec<String>,
    pub rows: Vec<Vec<(usize, BigRational)>>,
}

impl TransitionMatrix {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// The probability of moving from state `i` to state `j`.
    pub fn prob(&self, i: usize, j: usize) -> BigRational {
        self.rows[i]
            .iter()
            .find(|(t, _)| *t == j)
            .map(|(_, p)| p.clone())
            .unwrap_or_else(BigRational::zero)
    }
}

/// All moves out of a single state: `(image label, mass)` pairs, stable
/// walls skipped.
fn moves_from(spec: &ChainSpec, state: &SimState) -> Vec<(String, BigRational)> {
    let n = spec.n;
    let mut out = Vec::new();
    match (state, spec.model) {
        (SimState::Row(row), Model::RowTwo) => {
            for wall in 0..=n {
                let image = theta(row, wall);
                if image != *row {
                    out.push((image.serialize(), lambda_wall(wall, n, &spec.params)));
                }
            }
        }
        (SimState::Row(row), Model::RowThree) => {
            for wall in 0..=n {
                let (l, r) = open_pattern(row.cells(), wall);
                let (m1, m2) = mass_split(l, r, &spec.params);
                if !m1.is_zero() {
                    let image = theta3(row, wall, ThetaVariant::Primary);
                    if image != *row {
                        out.push((image.serialize(), m1));
                    }
                }
                if !m2.is_zero() {
                    let image = theta3(row, wall, ThetaVariant::Secondary);
                    if image != *row {
                        out.push((image.serialize(), m2));
                    }
                }
            }
        }
        (SimState::Row(row), Model::RowCircular) => {
            for wall in 0..n {
                let (l, r) = circular_pattern(row.cells(), wall);
                let mass = lambda_circular(l, r, &spec.params);
                if !mass.is_zero() {
                    let image = theta_hat(row, wall);
                    if image != *row {
                        out.push((image.serialize(), mass));
                    }
                }
            }
        }
        (SimState::Complete(cfg), Model::CompleteTwo) => {
            for wall in 0..=n {
                let (image, _) = relocation_map(cfg, wall);
                if image != *cfg {
                    out.push((image.serialize(), lambda_wall(wall, n, &spec.params)));
                }
            }
        }
        (SimState::Complete(cfg), Model::CompleteThree) => {
            for wall in 0..=n {
                let (l, r) = open_pattern(cfg.top(), wall);
                let (m1, m2) = mass_split(l, r, &spec.params);
                if !m1.is_zero() {
                    let (image, _) = relocation_map_primary(cfg, wall);
                    if image != *cfg {
                        out.push((image.serialize(), m1));
                    }
                }
                if !m2.is_zero() {
                    let (image, _) = relocation_map_secondary(cfg, wall);
                    if image != *cfg {
                        out.push((image.serialize(), m2));
                    }
                }
            }
        }
        (SimState::Complete(cfg), Model::CompleteCircular) => {
            for wall in 0..n {
                let (l, r) = circular_pattern(cfg.top(), wall);
                let mass = lambda_circular(l, r, &spec.params);
                if !mass.is_zero() {
                    let (image, _) = circular_map(cfg, wall).expect("validated circular state");
                    if image != *cfg {
                        out.push((image.serialize(), mass));
                    }
                }
            }
        }
        _ => unreachable!("state kind does not match the model"),
    }
    out
}

/// Builds the transition matrix of a chain over its full state space.
pub fn transition_matrix(spec: &ChainSpec) -> Result<TransitionMatrix, ChainError> {
    transition_matrix_with_cap(spec, DEFAULT_SPACE_CAP)
}

/// [`transition_matrix`] with an explicit state-space cap.
pub fn transition_matrix_with_cap(
    spec: &ChainSpec,
    cap: usize,
) -> Result<TransitionMatrix, ChainError> {
    let space = state_space_with_cap(spec, cap)?;
    let labels = space.labels();
    let index: HashMap<&str, usize> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let walls = BigRational::from_integer(BigInt::from(spec.walls().max(1)));
    let states: Vec<SimState> = match &space {
        StateSpace::Rows(rows) => rows.iter().cloned().map(SimState::Row).collect(),
        StateSpace::Complete(cfgs) => cfgs.iter().cloned().map(SimState::Complete).collect(),
    };
    let mut rows_out = Vec::with_capacity(states.len());
    for (i, state) in states.iter().enumerate() {
        let mut entries: BTreeMap<usize, BigRational> = BTreeMap::new();
        for (label, mass) in moves_from(spec, state) {
            let j = *index
                .get(label.as_str())
                .unwrap_or_else(|| panic!("image {label} escapes the state space"));
            *entries.entry(j).or_insert_with(BigRational::zero) += mass / &walls;
        }
        let total: BigRational = entries.values().cloned().sum();
        debug_assert!(total <= BigRational::one(), "masses exceed one");
        let stay = BigRational::one() - total;
        if !stay.is_zero() {
            *entries.entry(i).or_insert_with(BigRational::zero) += stay;
        }
        rows_out.push(entries.into_iter().collect());
    }
    Ok(TransitionMatrix {
        labels,
        rows: rows_out,
    })
}

// --- structural checks ---

fn neighbors(matrix: &TransitionMatrix, reverse: bool) -> Vec<Vec<usize>> {
    let n = matrix.len();
    let mut adj = vec![Vec::new(); n];
    for (i, row) in matrix.rows.iter().enumerate() {
        for (j, p) in row {
            if *j != i && p.is_positive() {
                if reverse {
                    adj[*j].push(i);
                } else {
                    adj[i].push(*j);
                }
            }
        }
    }
    adj
}

fn reachable(adj: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// True when every state communicates with every other.
pub fn check_irreducible(matrix: &TransitionMatrix) -> bool {
    irreducibility_witness(matrix).is_none()
}

/// `None` for an irreducible chain, otherwise a state that does not
/// communicate with state 0.
pub fn irreducibility_witness(matrix: &TransitionMatrix) -> Option<usize> {
    if matrix.len() <= 1 {
        return None;
    }
    let forward = reachable(&neighbors(matrix, false), 0);
    let backward = reachable(&neighbors(matrix, true), 0);
    (0..matrix.len()).find(|&i| !forward[i] || !backward[i])
}

/// The strongly connected components of the transition graph, each sorted,
/// listed in order of their smallest state.
pub fn strongly_connected_components(matrix: &TransitionMatrix) -> Vec<Vec<usize>> {
    // Kosaraju with explicit stacks.
    let n = matrix.len();
    let adj = neighbors(matrix, false);
    let radj = neighbors(matrix, true);
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut stack = vec![(s, 0usize)];
        seen[s] = true;
        while let Some(&mut (u, ref mut next)) = stack.last_mut() {
            if *next < adj[u].len() {
                let v = adj[u][*next];
                *next += 1;
                if !seen[v] {
                    seen[v] = true;
                    stack.push((v, 0));
                }
            } else {
                order.push(u);
                stack.pop();
            }
        }
    }
    let mut component = vec![usize::MAX; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for &s in order.iter().rev() {
        if component[s] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut members = vec![s];
        component[s] = id;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &v in &radj[u] {
                if component[v] == usize::MAX {
                    component[v] = id;
                    members.push(v);
                    queue.push_back(v);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components.sort_by_key(|c| c[0]);
    components
}

/// True when the chain's period is one. Any self-loop settles it; otherwise
/// the period is the gcd of the cycle defects over a breadth-first
/// spanning tree. Assumes irreducibility.
pub fn check_aperiodic(matrix: &TransitionMatrix) -> bool {
    let n = matrix.len();
    if n == 0 {
        return true;
    }
    for (i, row) in matrix.rows.iter().enumerate() {
        if row.iter().any(|(j, p)| *j == i && p.is_positive()) {
            return true;
        }
    }
    let adj = neighbors(matrix, false);
    let mut level = vec![i64::MIN; n];
    level[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    let mut g: i64 = 0;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if level[v] == i64::MIN {
                level[v] = level[u] + 1;
                queue.push_back(v);
            } else {
                g = gcd64(g, (level[u] + 1 - level[v]).abs());
            }
        }
    }
    g == 1
}

fn gcd64(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd64(b, a % b)
    }
}

// --- distributions ---

/// Probabilities attached to a support, exact or floating.
#[derive(Clone, PartialEq, Debug)]
pub enum Probabilities {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

/// A probability distribution over labeled states.
#[derive(Clone, PartialEq, Debug)]
pub struct Distribution {
    pub support: Vec<String>,
    pub probs: Probabilities,
}

impl Distribution {
    /// The uniform distribution over the given labels.
    pub fn uniform(support: Vec<String>) -> Distribution {
        let n = support.len().max(1);
        let p = BigRational::new(BigInt::one(), BigInt::from(n));
        let probs = vec![p; support.len()];
        Distribution {
            support,
            probs: Probabilities::Exact(probs),
        }
    }

    /// Normalizes nonnegative weights into a distribution.
    pub fn from_weights(
        support: Vec<String>,
        weights: Vec<BigRational>,
    ) -> Result<Distribution, ChainError> {
        if weights.len() != support.len() || weights.iter().any(|w| w.is_negative()) {
            return Err(ChainError::BadWeights);
        }
        let total: BigRational = weights.iter().cloned().sum();
        if !total.is_positive() {
            return Err(ChainError::BadWeights);
        }
        let probs = weights.into_iter().map(|w| w / &total).collect();
        Ok(Distribution {
            support,
            probs: Probabilities::Exact(probs),
        })
    }

    /// The exact probabilities, when carried.
    pub fn exact_probs(&self) -> Option<&[BigRational]> {
        match &self.probs {
            Probabilities::Exact(v) => Some(v),
            Probabilities::Float(_) => None,
        }
    }

    /// The probabilities as doubles.
    pub fn float_probs(&self) -> Vec<f64> {
        match &self.probs {
            Probabilities::Exact(v) => v.iter().map(rational_to_f64).collect(),
            Probabilities::Float(v) => v.clone(),
        }
    }

    /// The probability of one label, zero when absent.
    pub fn prob_of(&self, label: &str) -> f64 {
        self.support
            .iter()
            .position(|l| l == label)
            .map(|i| self.float_probs()[i])
            .unwrap_or(0.0)
    }

    /// Merges probabilities by the part of each label before the `/`,
    /// projecting a complete-chain distribution onto its top row.
    pub fn marginal_top(&self) -> Distribution {
        let tops: Vec<String> = self
            .support
            .iter()
            .map(|l| match l.split_once('/') {
                Some((top, _)) => top.to_string(),
                None => l.clone(),
            })
            .collect();
        match &self.probs {
            Probabilities::Exact(v) => {
                let mut merged: BTreeMap<String, BigRational> = BTreeMap::new();
                for (t, p) in tops.into_iter().zip(v.iter()) {
                    *merged.entry(t).or_insert_with(BigRational::zero) += p;
                }
                let (support, probs) = merged.into_iter().unzip();
                Distribution {
                    support,
                    probs: Probabilities::Exact(probs),
                }
            }
            Probabilities::Float(v) => {
                let mut merged: BTreeMap<String, f64> = BTreeMap::new();
                for (t, p) in tops.into_iter().zip(v.iter()) {
                    *merged.entry(t).or_insert(0.0) += p;
                }
                let (support, probs) = merged.into_iter().unzip();
                Distribution {
                    support,
                    probs: Probabilities::Float(probs),
                }
            }
        }
    }
}

/// Total variation distance, over the union of supports.
pub fn tv_distance(a: &Distribution, b: &Distribution) -> f64 {
    let mut table: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
    for (l, p) in a.support.iter().zip(a.float_probs()) {
        table.entry(l).or_insert((0.0, 0.0)).0 = p;
    }
    for (l, p) in b.support.iter().zip(b.float_probs()) {
        table.entry(l).or_insert((0.0, 0.0)).1 = p;
    }
    0.5 * table.values().map(|(p, q)| (p - q).abs()).sum::<f64>()
}

// --- stationary solvers ---

fn lcm_bigint(a: BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() || b.is_zero() {
        BigInt::zero()
    } else {
        a.lcm(b)
    }
}

/// Solves `A x = b` exactly with fraction-free elimination; `None` when the
/// matrix is singular.
fn solve_exact(a: Vec<Vec<BigRational>>, b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = a.len();
    if n == 0 {
        return Some(Vec::new());
    }
    // Integerize row by row; row scaling keeps the solution.
    let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for (row, rhs) in a.into_iter().zip(b.into_iter()) {
        let mut scale = BigInt::one();
        for x in row.iter().chain(std::iter::once(&rhs)) {
            scale = lcm_bigint(scale, x.denom());
        }
        let scale_rat = BigRational::from_integer(scale);
        let mut out: Vec<BigInt> = Vec::with_capacity(n + 1);
        for x in row.iter().chain(std::iter::once(&rhs)) {
            let v = x * &scale_rat;
            debug_assert!(v.is_integer());
            out.push(v.to_integer());
        }
        m.push(out);
    }
    // Fraction-free forward elimination with row pivoting.
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = (k..n).find(|&r| !m[r][k].is_zero())?;
        m.swap(k, pivot);
        for i in k + 1..n {
            for j in k + 1..=n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                debug_assert!((&num % &prev).is_zero());
                m[i][j] = num / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    // Back substitution in rationals.
    let mut x = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = BigRational::from_integer(m[i][n].clone());
        for j in i + 1..n {
            acc -= BigRational::from_integer(m[i][j].clone()) * &x[j];
        }
        x[i] = acc / BigRational::from_integer(m[i][i].clone());
    }
    Some(x)
}

/// The exact stationary distribution of an irreducible chain.
pub fn stationary_exact(matrix: &TransitionMatrix) -> Result<Distribution, ChainError> {
    if let Some(w) = irreducibility_witness(matrix) {
        return Err(ChainError::NotIrreducible {
            base: matrix.labels[0].clone(),
            witness: matrix.labels[w].clone(),
        });
    }
    let n = matrix.len();
    if n == 0 {
        return Ok(Distribution {
            support: Vec::new(),
            probs: Probabilities::Exact(Vec::new()),
        });
    }
    // Rows 0..n-1: transpose(P) - I; the last row is replaced by the
    // normalization (the dropped balance equation is implied by the rest).
    let mut a = vec![vec![BigRational::zero(); n]; n];
    for (i, row) in matrix.rows.iter().enumerate() {
        for (j, p) in row {
            a[*j][i] += p;
        }
    }
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= BigRational::one();
    }
    a[n - 1] = vec![BigRational::one(); n];
    let mut b = vec![BigRational::zero(); n];
    b[n - 1] = BigRational::one();
    let pi = solve_exact(a, b).ok_or_else(|| ChainError::NotStationary {
        reason: "the balance system is singular".to_string(),
    })?;
    debug_assert!(pi.iter().all(|p| !p.is_negative()));
    debug_assert!(verify_stationary(matrix, &pi).is_ok());
    Ok(Distribution {
        support: matrix.labels.clone(),
        probs: Probabilities::Exact(pi),
    })
}

/// Checks a candidate stationary vector exactly: nonnegative entries
/// summing to one with `pi P = pi`. This certifies closed-form candidates
/// on spaces too large for the solver.
pub fn verify_stationary(matrix: &TransitionMatrix, pi: &[BigRational]) -> Result<(), ChainError> {
    let n = matrix.len();
    if pi.len() != n {
        return Err(ChainError::NotStationary {
            reason: format!("length {} does not match {n} states", pi.len()),
        });
    }
    if pi.iter().any(|p| p.is_negative()) {
        return Err(ChainError::NotStationary {
            reason: "negative entry".to_string(),
        });
    }
    let total: BigRational = pi.iter().cloned().sum();
    if !total.is_one() {
        return Err(ChainError::NotStationary {
            reason: format!("total mass {total}"),
        });
    }
    let mut image = vec![BigRational::zero(); n];
    for (i, row) in matrix.rows.iter().enumerate() {
        for (j, p) in row {
            image[*j] += p * &pi[i];
        }
    }
    for j in 0..n {
        if image[j] != pi[j] {
            return Err(ChainError::NotStationary {
                reason: format!("balance fails at {}", matrix.labels[j]),
            });
        }
    }
    Ok(())
}

/// The stationary distribution through floating-point elimination, for
/// chains too large to solve exactly.
pub fn stationary_float(matrix: &TransitionMatrix) -> Result<Distribution, ChainError> {
    if let Some(w) = irreducibility_witness(matrix) {
        return Err(ChainError::NotIrreducible {
            base: matrix.labels[0].clone(),
            witness: matrix.labels[w].clone(),
        });
    }
    let n = matrix.len();
    if n > FLOAT_SOLVE_CAP {
        return Err(ChainError::FloatSolveTooLarge {
            size: n,
            cap: FLOAT_SOLVE_CAP,
        });
    }
    if n == 0 {
        return Ok(Distribution {
            support: Vec::new(),
            probs: Probabilities::Float(Vec::new()),
        });
    }
    let mut a = vec![vec![0.0f64; n + 1]; n];
    for (i, row) in matrix.rows.iter().enumerate() {
        for (j, p) in row {
            a[*j][i] += rational_to_f64(p);
        }
    }
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= 1.0;
    }
    for x in a[n - 1].iter_mut().take(n) {
        *x = 1.0;
    }
    a[n - 1][n] = 1.0;
    // Gaussian elimination with partial pivoting on the augmented matrix.
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&r, &s| a[r][k].abs().total_cmp(&a[s][k].abs()))
            .expect("nonempty range");
        a.swap(k, pivot);
        let pk = a[k][k];
        if pk == 0.0 {
            return Err(ChainError::NotStationary {
                reason: "the balance system is singular".to_string(),
            });
        }
        for i in k + 1..n {
            let f = a[i][k] / pk;
            if f == 0.0 {
                continue;
            }
            for j in k..=n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    let mut pi = vec![0.0f64; n];
    for i in (0..n).rev() {
        let mut acc = a[i][n];
        for j in i + 1..n {
            acc -= a[i][j] * pi[j];
        }
        pi[i] = acc / a[i][i];
    }
    for p in pi.iter_mut() {
        if *p < 0.0 && *p > -1e-12 {
            *p = 0.0;
        }
    }
    Ok(Distribution {
        support: matrix.labels.clone(),
        probs: Probabilities::Float(pi),
    })
}

// --- simulation ---

/// One simulated state, row or complete.
#[derive(Clone, PartialEq, Eq, Debug)]
enum SimState {
    Row(TasepRow),
    Complete(CompleteConfig),
}

impl SimState {
    fn serialize(&self) -> String {
        match self {
            SimState::Row(r) => r.serialize(),
            SimState::Complete(c) => c.serialize(),
        }
    }
}

/// Options for [`simulate`].
#[derive(Clone, PartialEq, Debug)]
pub struct SimulateOptions {
    /// Number of steps to run.
    pub steps: u64,
    /// Steps discarded before recording; defaults to `steps / 100`.
    pub burn_in: Option<u64>,
    /// Seed for the generator.
    pub seed: u64,
    /// Stream index, for independent runs under one seed.
    pub stream: u64,
    /// Serialized initial state; defaults to the model's canonical start.
    pub initial: Option<String>,
}

impl Default for SimulateOptions {
    fn default() -> SimulateOptions {
        SimulateOptions {
            steps: 100_000,
            burn_in: None,
            seed: 0,
            stream: 0,
            initial: None,
        }
    }
}

/// The outcome of a simulation run.
#[derive(Clone, PartialEq, Debug)]
pub struct SimulationSummary {
    /// Empirical occupation distribution over the visited states.
    pub distribution: Distribution,
    pub steps: u64,
    pub burn_in: u64,
    /// Number of recorded states, `steps - burn_in` (one for a zero-step run).
    pub samples: u64,
    pub final_state: String,
}

fn default_initial(spec: &ChainSpec) -> SimState {
    let n = spec.n;
    match spec.model {
        Model::RowTwo | Model::RowThree => SimState::Row(TasepRow::new(vec![Particle::White; n])),
        Model::RowCircular => {
            let s = spec.sector.expect("validated sector");
            let mut cells = vec![Particle::Neutral; s.l];
            cells.extend(vec![Particle::Black; s.k]);
            cells.extend(vec![Particle::White; s.m]);
            SimState::Row(TasepRow::new(cells))
        }
        Model::CompleteTwo => SimState::Complete(CompleteConfig::from_parts_unchecked(
            vec![Particle::Black; n],
            vec![Particle::White; n],
            Boundary::Open2,
        )),
        Model::CompleteThree => SimState::Complete(CompleteConfig::from_parts_unchecked(
            vec![Particle::Black; n],
            vec![Particle::White; n],
            Boundary::Open3,
        )),
        Model::CompleteCircular => {
            let s = spec.sector.expect("validated sector");
            let mut top = vec![Particle::Neutral; s.l];
            top.extend(vec![Particle::White; s.m]);
            top.extend(vec![Particle::Black; s.k]);
            let mut bottom = vec![Particle::Neutral; s.l];
            bottom.extend(vec![Particle::Black; s.m]);
            bottom.extend(vec![Particle::White; s.k]);
            SimState::Complete(CompleteConfig::from_parts_unchecked(
                top,
                bottom,
                Boundary::Periodic,
            ))
        }
    }
}

fn parse_initial(spec: &ChainSpec, text: &str) -> Result<SimState, ChainError> {
    let bad = || ChainError::BadInitial {
        state: text.to_string(),
    };
    if spec.model.is_row() {
        let row: TasepRow = text.parse().map_err(|_| bad())?;
        if row.n() != spec.n {
            return Err(bad());
        }
        match spec.model {
            Model::RowTwo => {
                if row.count(Particle::Neutral) > 0 {
                    return Err(bad());
                }
            }
            Model::RowCircular => {
                let s = spec.sector.expect("validated sector");
                if row.count(Particle::Black) != s.k
                    || row.count(Particle::Neutral) != s.l
                    || row.count(Particle::White) != s.m
                {
                    return Err(bad());
                }
            }
            _ => {}
        }
        Ok(SimState::Row(row))
    } else {
        let cfg: CompleteConfig = text.parse().map_err(|_| bad())?;
        let expected = match spec.model {
            Model::CompleteTwo => Boundary::Open2,
            Model::CompleteThree => Boundary::Open3,
            _ => Boundary::Periodic,
        };
        if cfg.boundary() != expected || cfg.n() != spec.n {
            return Err(bad());
        }
        if spec.model == Model::CompleteCircular {
            let s = spec.sector.expect("validated sector");
            if cfg.top_black_count() != s.k || cfg.ell() != s.l {
                return Err(bad());
            }
        }
        Ok(SimState::Complete(cfg))
    }
}

fn step_state(spec: &ChainSpec, state: &mut SimState, wall: usize, u: f64) {
    let params = &spec.params;
    match (&mut *state, spec.model) {
        (SimState::Row(row), Model::RowTwo) => {
            let lambda = rational_to_f64(&lambda_wall(wall, spec.n, params));
            if u < lambda {
                *row = theta(row, wall);
            }
        }
        (SimState::Row(row), Model::RowThree) => {
            let (l, r) = open_pattern(row.cells(), wall);
            let (m1, m2) = mass_split(l, r, params);
            let m1 = rational_to_f64(&m1);
            let m2 = rational_to_f64(&m2);
            if u < m1 {
                *row = theta3(row, wall, ThetaVariant::Primary);
            } else if u < m1 + m2 {
                *row = theta3(row, wall, ThetaVariant::Secondary);
            }
        }
        (SimState::Row(row), Model::RowCircular) => {
            let (l, r) = circular_pattern(row.cells(), wall);
            let lambda = rational_to_f64(&lambda_circular(l, r, params));
            if u < lambda {
                *row = theta_hat(row, wall);
            }
        }
        (SimState::Complete(cfg), Model::CompleteTwo) => {
            let lambda = rational_to_f64(&lambda_wall(wall, spec.n, params));
            if u < lambda {
                *cfg = relocation_map(cfg, wall).0;
            }
        }
        (SimState::Complete(cfg), Model::CompleteThree) => {
            let (l, r) = open_pattern(cfg.top(), wall);
            let (m1, m2) = mass_split(l, r, params);
            let m1 = rational_to_f64(&m1);
            let m2 = rational_to_f64(&m2);
            if u < m1 {
                *cfg = relocation_map_primary(cfg, wall).0;
            } else if u < m1 + m2 {
                *cfg = relocation_map_secondary(cfg, wall).0;
            }
        }
        (SimState::Complete(cfg), Model::CompleteCircular) => {
            let (l, r) = circular_pattern(cfg.top(), wall);
            let lambda = rational_to_f64(&lambda_circular(l, r, params));
            if u < lambda {
                *cfg = circular_map(cfg, wall).expect("validated circular state").0;
            }
        }
        _ => unreachable!("state kind does not match the model"),
    }
}

/// Runs a chain from its initial state and returns the empirical
/// occupation distribution over the steps after burn-in.
///
/// The draw sequence is fixed: each step consumes one wall index from
/// `gen_range` and one uniform double, so runs with equal seeds and
/// streams reproduce bit for bit.
pub fn simulate(
    spec: &ChainSpec,
    options: &SimulateOptions,
) -> Result<SimulationSummary, ChainError> {
    spec.validate()?;
    let mut state = match &options.initial {
        Some(text) => parse_initial(spec, text)?,
        None => default_initial(spec),
    };
    let steps = options.steps;
    let burn_in = options.burn_in.unwrap_or(steps / 100);
    if steps > 0 && burn_in >= steps {
        return Err(ChainError::BadBurnIn { burn_in, steps });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    rng.set_stream(options.stream);
    let walls = spec.walls();
    let mut counts: HashMap<String, u64> = HashMap::new();
    let mut samples = 0u64;
    if steps == 0 {
        counts.insert(state.serialize(), 1);
        samples = 1;
    } else {
        for t in 1..=steps {
            let wall = if walls > 0 {
                rng.gen_range(0..walls)
            } else {
                0
            };
            let u: f64 = rng.gen();
            if walls > 0 {
                step_state(spec, &mut state, wall, u);
            }
            if t > burn_in {
                *counts.entry(state.serialize()).or_insert(0) += 1;
                samples += 1;
            }
        }
    }
    let mut support: Vec<String> = counts.keys().cloned().collect();
    support.sort();
    let probs = support
        .iter()
        .map(|l| counts[l] as f64 / samples as f64)
        .collect();
    Ok(SimulationSummary {
        distribution: Distribution {
            support,
            probs: Probabilities::Float(probs),
        },
        steps,
        burn_in: if steps == 0 { 0 } else { burn_in },
        samples,
        final_state: state.serialize(),
    })
}

// --- tests ---

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{catalan, narayana};
    use crate::weight::{parse_rational, partition_sum, weight};

    fn rat(s: &str) -> BigRational {
        parse_rational(s).expect("valid rational")
    }

    fn params(a: &str, b: &str, g: &str) -> RateParams {
        RateParams::new(rat(a), rat(b), rat(g)).expect("valid rates")
    }

    fn params_eps(a: &str, b: &str, g: &str, e: &str) -> RateParams {
        RateParams::with_epsilon(rat(a), rat(b), rat(g), rat(e)).expect("valid rates")
    }

    fn spec(model: Model, n: usize, p: RateParams) -> ChainSpec {
        ChainSpec {
            model,
            n,
            params: p,
            sector: None,
        }
    }

    fn spec_sector(
        model: Model,
        n: usize,
        p: RateParams,
        k: usize,
        l: usize,
        m: usize,
    ) -> ChainSpec {
        ChainSpec {
            model,
            n,
            params: p,
            sector: Some(Sector { k, l, m }),
        }
    }

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn row_two_matrix_at_size_one() {
        let m = transition_matrix(&spec(Model::RowTwo, 1, params("1", "1/3", "1/5"))).unwrap();
        assert_eq!(m.labels, vec!["B".to_string(), "W".to_string()]);
        // Two walls: the white enters with rate beta at wall 0, the black
        // leaves with rate gamma at wall 1; each wall is chosen with
        // probability one half.
        assert_eq!(m.prob(1, 0), rat("1/6"));
        assert_eq!(m.prob(1, 1), rat("5/6"));
        assert_eq!(m.prob(0, 1), rat("1/10"));
        assert_eq!(m.prob(0, 0), rat("9/10"));
    }

    #[test]
    fn complete_two_stationary_at_size_one() {
        let m = transition_matrix(&spec(Model::CompleteTwo, 1, params("1", "1/3", "1/5"))).unwrap();
        let pi = stationary_exact(&m).unwrap();
        assert_eq!(pi.support, vec!["B/W".to_string(), "W/B".to_string()]);
        // pi is proportional to (beta, gamma).
        let expected = vec![rat("5/8"), rat("3/8")];
        assert_eq!(pi.exact_probs().unwrap(), &expected[..]);
    }

    #[test]
    fn complete_two_uniform_at_unit_rates() {
        let m = transition_matrix(&spec(Model::CompleteTwo, 3, params("1", "1", "1"))).unwrap();
        assert_eq!(m.len(), 14);
        let pi = stationary_exact(&m).unwrap();
        for p in pi.exact_probs().unwrap() {
            assert_eq!(*p, rat("1/14"));
        }
    }

    #[test]
    fn stationary_matches_the_weights() {
        let p = params("1/2", "1/3", "1/5");
        for n in 1..=3 {
            let m = transition_matrix(&spec(Model::CompleteTwo, n, p.clone())).unwrap();
            let pi = stationary_exact(&m).unwrap();
            let space = omega0(n);
            let total = partition_sum(&space, &p).unwrap();
            for (c, got) in space.iter().zip(pi.exact_probs().unwrap()) {
                assert_eq!(*got, weight(c, &p).unwrap() / &total, "{c}");
            }
        }
    }

    #[test]
    fn marginal_of_the_uniform_law_is_narayana_over_catalan() {
        let m = transition_matrix(&spec(Model::CompleteTwo, 2, params("1", "1", "1"))).unwrap();
        let pi = stationary_exact(&m).unwrap();
        let marginal = pi.marginal_top();
        assert_eq!(marginal.prob_of("WW"), 0.2);
        assert_eq!(marginal.prob_of("BW"), 0.4);
        // Grouping rows by their black count gives Narayana over Catalan.
        let n = 2usize;
        for k in 0..=n {
            let total: f64 = marginal
                .support
                .iter()
                .zip(marginal.float_probs())
                .filter(|(row, _)| row.chars().filter(|&ch| ch == 'B').count() == k)
                .map(|(_, p)| p)
                .sum();
            let expected = rational_to_f64(&BigRational::new(
                BigInt::from(narayana(n as u64, k as u64)),
                BigInt::from(catalan(n as u64 + 1)),
            ));
            assert!((total - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn row_marginal_agrees_with_the_row_chain() {
        let p = params("1/2", "1/3", "2/3");
        for n in 1..=4 {
            let mx = transition_matrix(&spec(Model::CompleteTwo, n, p.clone())).unwrap();
            let ms = transition_matrix(&spec(Model::RowTwo, n, p.clone())).unwrap();
            let pix = stationary_exact(&mx).unwrap().marginal_top();
            let pis = stationary_exact(&ms).unwrap();
            assert_eq!(pix.support, pis.support);
            assert_eq!(pix.exact_probs().unwrap(), pis.exact_probs().unwrap());
        }
    }

    #[test]
    fn three_species_sector_mass_at_size_two() {
        // At unit rates with epsilon one half the complete chain is uniform,
        // so the row marginal of a sector is its configuration count over
        // the total.
        let p = params_eps("1", "1", "1", "1/2");
        let m = transition_matrix(&spec(Model::CompleteThree, 2, p)).unwrap();
        assert_eq!(m.len(), 10);
        let pi = stationary_exact(&m).unwrap();
        let marginal = pi.marginal_top();
        // Rows with one black and one neutral: BX and XB.
        let mass = marginal.prob_of("BX") + marginal.prob_of("XB");
        assert!((mass - 0.2).abs() < 1e-12);
        for p in pi.exact_probs().unwrap() {
            assert_eq!(*p, rat("1/10"));
        }
    }

    #[test]
    fn row_three_at_epsilon_zero_restricts_to_row_two() {
        let p2 = params("1/2", "1/3", "1/8");
        let p3 = RateParams::with_epsilon(rat("1/2"), rat("1/3"), rat("1/8"), rat("0")).unwrap();
        for n in 1..=3 {
            let m2 = transition_matrix(&spec(Model::RowTwo, n, p2.clone())).unwrap();
            let m3 = transition_matrix(&spec(Model::RowThree, n, p3.clone())).unwrap();
            let index3: HashMap<&str, usize> = m3
                .labels
                .iter()
                .enumerate()
                .map(|(i, l)| (l.as_str(), i))
                .collect();
            for (i2, label) in m2.labels.iter().enumerate() {
                let i3 = index3[label.as_str()];
                let mut row3: Vec<(String, BigRational)> = m3.rows[i3]
                    .iter()
                    .map(|(j, p)| (m3.labels[*j].clone(), p.clone()))
                    .collect();
                row3.retain(|(_, p)| p.is_positive());
                let mut row2: Vec<(String, BigRational)> = m2.rows[i2]
                    .iter()
                    .map(|(j, p)| (m2.labels[*j].clone(), p.clone()))
                    .collect();
                row2.retain(|(_, p)| p.is_positive());
                assert_eq!(row3, row2, "row {label}");
            }
        }
    }

    #[test]
    fn circular_chain_is_doubly_stochastic_at_unit_rates() {
        let p = params("1", "1", "1");
        for (n, k, l, m) in [(3, 1, 1, 1), (4, 2, 1, 1), (5, 2, 2, 1)] {
            let spec = spec_sector(Model::CompleteCircular, n, p.clone(), k, l, m);
            let matrix = transition_matrix(&spec).unwrap();
            let size = matrix.len();
            let mut col_sums = vec![BigRational::zero(); size];
            for row in &matrix.rows {
                for (j, p) in row {
                    col_sums[*j] += p;
                }
            }
            for s in col_sums {
                assert!(s.is_one());
            }
            let uniform = vec![BigRational::new(BigInt::one(), BigInt::from(size)); size];
            verify_stationary(&matrix, &uniform).unwrap();
            let pi = stationary_exact(&matrix).unwrap();
            assert_eq!(pi.exact_probs().unwrap(), &uniform[..]);
        }
    }

    #[test]
    fn structural_checks_see_the_whole_chain() {
        let p = params("1", "1/2", "1/2");
        let m = transition_matrix(&spec(Model::CompleteTwo, 3, p)).unwrap();
        assert!(check_irreducible(&m));
        assert!(check_aperiodic(&m));
        assert_eq!(strongly_connected_components(&m).len(), 1);
        // With epsilon zero the three-species complete chain cannot change
        // its neutral count, so the components are the constant-count levels.
        let p0 = RateParams::with_epsilon(rat("1"), rat("1/2"), rat("1/2"), rat("0")).unwrap();
        let m0 = transition_matrix(&spec(Model::CompleteThree, 2, p0)).unwrap();
        assert!(!check_irreducible(&m0));
        let comps = strongly_connected_components(&m0);
        assert_eq!(comps.len(), 3);
        let mut sizes: Vec<usize> = comps.iter().map(|c| c.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 4, 5]);
    }

    #[test]
    fn space_caps_and_sector_validation() {
        let p = params("1", "1", "1");
        assert!(matches!(
            state_space_with_cap(&spec(Model::RowTwo, 10, p.clone()), 100),
            Err(ChainError::SpaceTooLarge { .. })
        ));
        assert!(matches!(
            spec(Model::RowCircular, 3, p.clone()).validate(),
            Err(ChainError::SectorRequired { .. })
        ));
        assert!(matches!(
            spec_sector(Model::RowTwo, 3, p.clone(), 1, 1, 1).validate(),
            Err(ChainError::SectorUnsupported { .. })
        ));
        assert!(matches!(
            spec_sector(Model::RowCircular, 3, p.clone(), 2, 2, 2).validate(),
            Err(ChainError::BadSector { .. })
        ));
        assert!(matches!(
            spec_sector(Model::CompleteCircular, 3, p.clone(), 2, 0, 1).validate(),
            Err(ChainError::NeedsNeutralColumn)
        ));
        // The neutral-rate constraint guards the three-species chains.
        let steep = RateParams::with_epsilon(rat("1/4"), rat("1"), rat("1"), rat("0")).unwrap();
        assert!(spec(Model::RowThree, 2, steep).validate().is_err());
    }

    #[test]
    fn space_sizes_match_the_counting_formulas() {
        let p = params("1", "1", "1");
        assert_eq!(
            state_space(&spec(Model::CompleteTwo, 4, p.clone()))
                .unwrap()
                .len(),
            42
        );
        assert_eq!(
            state_space(&spec(Model::CompleteThree, 3, p.clone()))
                .unwrap()
                .len(),
            35
        );
        assert_eq!(
            state_space(&spec_sector(Model::CompleteCircular, 4, p.clone(), 2, 1, 1))
                .unwrap()
                .len(),
            24
        );
        assert_eq!(big(24), count_omega_hat_sector(4, 1, 2));
        assert_eq!(
            state_space(&spec_sector(Model::RowCircular, 4, p, 2, 1, 1))
                .unwrap()
                .len(),
            12
        );
    }

    #[test]
    fn simulation_is_deterministic_and_respects_burn_in() {
        let spec3 = spec(Model::CompleteTwo, 3, params("1", "1", "1"));
        let options = SimulateOptions {
            steps: 2_000,
            burn_in: Some(100),
            seed: 42,
            stream: 7,
            initial: None,
            ..SimulateOptions::default()
        };
        let a = simulate(&spec3, &options).unwrap();
        let b = simulate(&spec3, &options).unwrap();
        assert_eq!(a.distribution, b.distribution);
        assert_eq!(a.final_state, b.final_state);
        assert_eq!(a.samples, 1_900);
        let other = simulate(
            &spec3,
            &SimulateOptions {
                stream: 8,
                ..options.clone()
            },
        )
        .unwrap();
        assert!(other.distribution != a.distribution || other.final_state != a.final_state);
        // Zero steps yield a point mass at the initial state.
        let still = simulate(
            &spec3,
            &SimulateOptions {
                steps: 0,
                burn_in: None,
                ..options.clone()
            },
        )
        .unwrap();
        assert_eq!(still.distribution.support, vec!["BBB/WWW".to_string()]);
        assert_eq!(still.samples, 1);
        // Burn-in must leave room for samples.
        assert!(matches!(
            simulate(
                &spec3,
                &SimulateOptions {
                    steps: 10,
                    burn_in: Some(10),
                    ..options
                }
            ),
            Err(ChainError::BadBurnIn { .. })
        ));
    }

    #[test]
    fn simulation_approaches_the_uniform_law() {
        let spec3 = spec(Model::CompleteTwo, 3, params("1", "1", "1"));
        let summary = simulate(
            &spec3,
            &SimulateOptions {
                steps: 200_000,
                burn_in: Some(2_000),
                seed: 1,
                ..SimulateOptions::default()
            },
        )
        .unwrap();
        let uniform = Distribution::uniform(summary.distribution.support.clone());
        assert_eq!(summary.distribution.support.len(), 14);
        assert!(tv_distance(&summary.distribution, &uniform) < 0.03);
    }

    #[test]
    fn initial_states_are_validated() {
        let p = params("1", "1", "1");
        let spec2 = spec(Model::CompleteTwo, 2, p.clone());
        let ok = SimulateOptions {
            steps: 10,
            burn_in: Some(0),
            initial: Some("BW/WB".to_string()),
            ..SimulateOptions::default()
        };
        assert!(simulate(&spec2, &ok).is_ok());
        for bad in ["BW/WB@open3", "BBB/WWW", "nonsense", "BX/WX@open3"] {
            let options = SimulateOptions {
                initial: Some(bad.to_string()),
                ..ok.clone()
            };
            assert!(
                matches!(
                    simulate(&spec2, &options),
                    Err(ChainError::BadInitial { .. })
                ),
                "{bad} accepted"
            );
        }
        let circ = spec_sector(Model::RowCircular, 3, p, 1, 1, 1);
        let options = SimulateOptions {
            initial: Some("BBW".to_string()),
            ..ok
        };
        assert!(matches!(
            simulate(&circ, &options),
            Err(ChainError::BadInitial { .. })
        ));
    }

    #[test]
    fn tv_distance_handles_disjoint_support() {
        let a = Distribution::uniform(vec!["x".to_string(), "y".to_string()]);
        let b = Distribution::uniform(vec!["y".to_string(), "z".to_string()]);
        assert!((tv_distance(&a, &b) - 0.5).abs() < 1e-12);
        assert_eq!(tv_distance(&a, &a), 0.0);
    }
}
