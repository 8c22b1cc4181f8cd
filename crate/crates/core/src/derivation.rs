//! Rule-driven equality engine over symbolic probability terms.
//!
//! A term `p(S:k; sigma)` stands for "the probability of the system being
//! in the labeled Schmidt vector `s_k` when the composite state is
//! `sigma`", where `sigma` is a transcript of swaps and phases applied to a
//! base state. Labels are fixed by the base state's Schmidt decomposition,
//! so after a system swap `s_1` is paired with `e_2`.
//!
//! Probabilities are never evaluated. Each enabled [`Rule`] contributes
//! equalities between terms, a union-find store merges them, and every
//! merge is logged with its rule. The numeric value `1/d` is only emitted
//! when all branch terms of the base state ended up in one class and the
//! normalization rule is enabled.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_rational::Ratio;

use crate::envariance::{phase_transform, swap_transform};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::schmidt::{schmidt, SchmidtDecomposition, SCHMIDT_TOL};
use crate::state::BipartiteState;

/// Amplitudes below this are treated as absent when reading off pairings.
pub const PAIR_TOL: f64 = 1e-9;
/// Replayed states closer than this count as the same state vector.
pub const STATE_TOL: f64 = 1e-9;

pub type Probability = Ratio<u64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subsystem {
    S,
    E,
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subsystem::S => f.write_str("S"),
            Subsystem::E => f.write_str("E"),
        }
    }
}

/// One step of a transcript, in the labeled Schmidt bases of the base state.
/// Indices are zero-based branch indices.
#[derive(Clone, Debug, PartialEq)]
pub enum Transform {
    SystemSwap(usize, usize),
    EnvSwap(usize, usize),
    SystemPhase(Vec<f64>),
    EnvPhase(Vec<f64>),
}

impl Transform {
    pub fn side(&self) -> Subsystem {
        match self {
            Transform::SystemSwap(..) | Transform::SystemPhase(_) => Subsystem::S,
            Transform::EnvSwap(..) | Transform::EnvPhase(_) => Subsystem::E,
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let phases = |b: &[f64]| b.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",");
        match self {
            Transform::SystemSwap(i, j) => write!(f, "swapS({},{})", i + 1, j + 1),
            Transform::EnvSwap(i, j) => write!(f, "swapE({},{})", i + 1, j + 1),
            Transform::SystemPhase(b) => write!(f, "phaseS({})", phases(b)),
            Transform::EnvPhase(b) => write!(f, "phaseE({})", phases(b)),
        }
    }
}

/// A base state followed by transforms, applied left to right.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StateExpr {
    pub transcript: Vec<Transform>,
}

impl StateExpr {
    pub fn base() -> Self {
        StateExpr::default()
    }

    pub fn then(&self, t: Transform) -> Self {
        let mut transcript = self.transcript.clone();
        transcript.push(t);
        StateExpr { transcript }
    }

    /// The expression without its last transform.
    pub fn parent(&self) -> Option<(StateExpr, &Transform)> {
        let (last, rest) = self.transcript.split_last()?;
        Some((
            StateExpr {
                transcript: rest.to_vec(),
            },
            last,
        ))
    }
}

impl fmt::Display for StateExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in self.transcript.iter().rev() {
            write!(f, "{t}\u{b7}")?;
        }
        f.write_str("psi")
    }
}

/// `p(subsystem:index; state)` with a zero-based branch index.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbTerm {
    pub subsystem: Subsystem,
    pub index: usize,
    pub state: StateExpr,
}

impl ProbTerm {
    pub fn new(subsystem: Subsystem, index: usize, state: StateExpr) -> Self {
        ProbTerm {
            subsystem,
            index,
            state,
        }
    }
}

impl fmt::Display for ProbTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p({}:{}; {})", self.subsystem, self.index + 1, self.state)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    /// Schmidt partners are equally likely: `p(s_k; sigma) = p(e_l; sigma)`.
    Pairing,
    /// A system-side transform leaves environment probabilities alone.
    EnvLocality,
    /// An environment-side transform leaves system probabilities alone.
    SysLocality,
    /// Probabilities depend only on the state vector.
    StateFunction,
    /// Branch probabilities of the base state sum to one.
    Normalization,
}

impl Rule {
    pub const ALL: [Rule; 5] = [
        Rule::Pairing,
        Rule::EnvLocality,
        Rule::SysLocality,
        Rule::StateFunction,
        Rule::Normalization,
    ];

    /// The four rules that produce equalities.
    pub const EQUALITY_RULES: [Rule; 4] = [Rule::Pairing, Rule::EnvLocality, Rule::SysLocality, Rule::StateFunction];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Pairing => "pairing",
            Rule::EnvLocality => "env_locality",
            Rule::SysLocality => "sys_locality",
            Rule::StateFunction => "state_function",
            Rule::Normalization => "normalization",
        }
    }

    pub fn from_name(name: &str) -> Option<Rule> {
        let norm = name.trim().to_ascii_lowercase().replace('-', "_");
        Rule::ALL.into_iter().find(|r| r.name() == norm)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RuleSet {
    pub pairing: bool,
    pub env_locality: bool,
    pub sys_locality: bool,
    pub state_function: bool,
    pub normalization: bool,
}

impl Default for RuleSet {
    fn default() -> Self {
        Self::all()
    }
}

impl RuleSet {
    pub fn all() -> Self {
        RuleSet {
            pairing: true,
            env_locality: true,
            sys_locality: true,
            state_function: true,
            normalization: true,
        }
    }

    pub fn none() -> Self {
        RuleSet {
            pairing: false,
            env_locality: false,
            sys_locality: false,
            state_function: false,
            normalization: false,
        }
    }

    pub fn only(rules: &[Rule]) -> Self {
        rules.iter().fold(Self::none(), |acc, &r| acc.with(r, true))
    }

    pub fn with(mut self, rule: Rule, on: bool) -> Self {
        *self.flag_mut(rule) = on;
        self
    }

    pub fn without(self, rule: Rule) -> Self {
        self.with(rule, false)
    }

    pub fn enabled(&self, rule: Rule) -> bool {
        match rule {
            Rule::Pairing => self.pairing,
            Rule::EnvLocality => self.env_locality,
            Rule::SysLocality => self.sys_locality,
            Rule::StateFunction => self.state_function,
            Rule::Normalization => self.normalization,
        }
    }

    fn flag_mut(&mut self, rule: Rule) -> &mut bool {
        match rule {
            Rule::Pairing => &mut self.pairing,
            Rule::EnvLocality => &mut self.env_locality,
            Rule::SysLocality => &mut self.sys_locality,
            Rule::StateFunction => &mut self.state_function,
            Rule::Normalization => &mut self.normalization,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermId(pub usize);

/// The term population for one base state: every labeled branch of both
/// subsystems, for every state in the transcripts.
#[derive(Clone, Debug)]
pub struct TermSet {
    base: BipartiteState,
    labels: SchmidtDecomposition,
    states: Vec<StateExpr>,
    replayed: Vec<BipartiteState>,
    /// `S^dagger C conj(E)` of each replayed state.
    labeled: Vec<CMatrix>,
}

impl TermSet {
    /// Builds the population for arbitrary transcripts. The base state is
    /// always included; duplicate transcripts are collapsed.
    pub fn from_transcripts(psi: &BipartiteState, transcripts: &[StateExpr]) -> Result<Self> {
        let labels = schmidt(psi);
        let s_basis = labels.completed_system_basis();
        let e_basis = labels.completed_env_basis();
        let rank = labels.rank();

        let mut set = TermSet {
            base: psi.clone(),
            labels,
            states: Vec::new(),
            replayed: Vec::new(),
            labeled: Vec::new(),
        };
        let mut pending = vec![StateExpr::base()];
        pending.extend(transcripts.iter().cloned());
        for expr in pending {
            // prefixes first, so every state's parent is in the population
            for len in 0..=expr.transcript.len() {
                let prefix = StateExpr {
                    transcript: expr.transcript[..len].to_vec(),
                };
                if set.state_index(&prefix).is_some() {
                    continue;
                }
                let state = match prefix.transcript.last() {
                    None => psi.clone(),
                    Some(t) => {
                        let parent = &set.replayed[set.state_index(&prefix.parent().unwrap().0).unwrap()];
                        apply_transform(parent, t, rank, &s_basis, &e_basis)?
                    }
                };
                set.labeled.push(set.labels.labeled_amplitudes(&state)?);
                set.replayed.push(state);
                set.states.push(prefix);
            }
        }
        Ok(set)
    }

    pub fn base(&self) -> &BipartiteState {
        &self.base
    }

    /// Schmidt decomposition of the base state that fixes the labels.
    pub fn labels(&self) -> &SchmidtDecomposition {
        &self.labels
    }

    pub fn rank(&self) -> usize {
        self.labels.rank()
    }

    pub fn states(&self) -> &[StateExpr] {
        &self.states
    }

    pub fn replayed(&self, state: usize) -> &BipartiteState {
        &self.replayed[state]
    }

    pub fn len(&self) -> usize {
        self.states.len() * 2 * self.rank()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn state_index(&self, expr: &StateExpr) -> Option<usize> {
        self.states.iter().position(|s| s == expr)
    }

    fn id_of(&self, state: usize, subsystem: Subsystem, index: usize) -> TermId {
        let r = self.rank();
        let side = match subsystem {
            Subsystem::S => 0,
            Subsystem::E => 1,
        };
        TermId(state * 2 * r + side * r + index)
    }

    fn parts(&self, id: TermId) -> (usize, Subsystem, usize) {
        let r = self.rank();
        let state = id.0 / (2 * r);
        let rem = id.0 % (2 * r);
        let subsystem = if rem < r { Subsystem::S } else { Subsystem::E };
        (state, subsystem, rem % r)
    }

    pub fn term(&self, id: TermId) -> ProbTerm {
        let (state, subsystem, index) = self.parts(id);
        ProbTerm::new(subsystem, index, self.states[state].clone())
    }

    pub fn terms(&self) -> Vec<ProbTerm> {
        (0..self.len()).map(|i| self.term(TermId(i))).collect()
    }

    pub fn lookup(&self, term: &ProbTerm) -> Result<TermId> {
        let state = self.state_index(&term.state).ok_or(Error::UnknownTerm)?;
        if term.index >= self.rank() {
            return Err(Error::UnknownTerm);
        }
        Ok(self.id_of(state, term.subsystem, term.index))
    }

    /// Born value of a term: `<s_k| rho_S |s_k>` or `<e_l| rho_E |e_l>` of
    /// the replayed state. Used only to audit the engine.
    pub fn born_value(&self, id: TermId) -> f64 {
        let (state, subsystem, index) = self.parts(id);
        let t = &self.labeled[state];
        let r = self.rank();
        match subsystem {
            Subsystem::S => (0..r).map(|l| t[(index, l)].norm_sqr()).sum(),
            Subsystem::E => (0..r).map(|k| t[(k, index)].norm_sqr()).sum(),
        }
    }

    /// `(k, l)` pairs such that `s_k` and `e_l` are exclusively correlated
    /// in the given replayed state.
    fn pairings(&self, state: usize) -> Vec<(usize, usize)> {
        let t = &self.labeled[state];
        let r = self.rank();
        let support = |k: usize, l: usize| t[(k, l)].norm() > PAIR_TOL;
        let mut out = Vec::new();
        for k in 0..r {
            let mut cols = (0..r).filter(|&l| support(k, l));
            if let (Some(l), None) = (cols.next(), cols.next()) {
                if (0..r).filter(|&m| support(m, l)).count() == 1 {
                    out.push((k, l));
                }
            }
        }
        out
    }

    /// Every rule instance the enabled rules produce, in rule order.
    pub fn rule_instances(&self, rules: &RuleSet) -> Vec<Merge> {
        let r = self.rank();
        let n = self.states.len();
        let mut out = Vec::new();

        if rules.pairing {
            for s in 0..n {
                for (k, l) in self.pairings(s) {
                    out.push(Merge::new(Rule::Pairing, self.id_of(s, Subsystem::S, k), self.id_of(s, Subsystem::E, l)));
                }
            }
        }
        for (rule, trigger, kept) in [
            (Rule::EnvLocality, Subsystem::S, Subsystem::E),
            (Rule::SysLocality, Subsystem::E, Subsystem::S),
        ] {
            if !rules.enabled(rule) {
                continue;
            }
            for child in 0..n {
                let Some((parent, last)) = self.states[child].parent() else {
                    continue;
                };
                if last.side() != trigger {
                    continue;
                }
                let parent = self.state_index(&parent).expect("prefixes are in the population");
                for k in 0..r {
                    out.push(Merge::new(rule, self.id_of(parent, kept, k), self.id_of(child, kept, k)));
                }
            }
        }
        if rules.state_function {
            for a in 0..n {
                for b in a + 1..n {
                    let dist = self.replayed[a].distance(&self.replayed[b]).expect("same shape");
                    if dist > STATE_TOL {
                        continue;
                    }
                    for side in [Subsystem::S, Subsystem::E] {
                        for k in 0..r {
                            out.push(Merge::new(Rule::StateFunction, self.id_of(a, side, k), self.id_of(b, side, k)));
                        }
                    }
                }
            }
        }
        out
    }
}

fn apply_transform(
    state: &BipartiteState,
    t: &Transform,
    rank: usize,
    s_basis: &CMatrix,
    e_basis: &CMatrix,
) -> Result<BipartiteState> {
    let check = |i: usize| {
        if i < rank {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, len: rank })
        }
    };
    let phase_indices = |b: &[f64]| -> Result<Vec<usize>> {
        if b.len() > rank {
            return Err(Error::IndexOutOfRange { index: b.len() - 1, len: rank });
        }
        Ok((0..b.len()).collect())
    };
    match t {
        Transform::SystemSwap(i, j) => {
            check(*i)?;
            check(*j)?;
            state.apply_system(&swap_transform(*i, *j, s_basis)?)
        }
        Transform::EnvSwap(i, j) => {
            check(*i)?;
            check(*j)?;
            state.apply_env(&swap_transform(*i, *j, e_basis)?)
        }
        Transform::SystemPhase(b) => state.apply_system(&phase_transform(&phase_indices(b)?, b, s_basis)?),
        Transform::EnvPhase(b) => state.apply_env(&phase_transform(&phase_indices(b)?, b, e_basis)?),
    }
}

/// `[(0,1), (1,2), ..., (d-2,d-1)]`.
pub fn adjacent_swaps(d: usize) -> Vec<(usize, usize)> {
    (1..d).map(|k| (k - 1, k)).collect()
}

/// Terms for the base state, each system swap, and each swap followed by
/// its environment counterswap. Every swapped pair must have equal
/// coefficients.
pub fn generate_terms(psi: &BipartiteState, swaps: &[(usize, usize)]) -> Result<TermSet> {
    let d = schmidt(psi);
    let lambda = d.coefficients();
    let mut transcripts = Vec::with_capacity(2 * swaps.len());
    for &(i, j) in swaps {
        for idx in [i, j] {
            if idx >= lambda.len() {
                return Err(Error::IndexOutOfRange {
                    index: idx,
                    len: lambda.len(),
                });
            }
        }
        if i == j {
            return Err(Error::InvalidTransform("a swap needs two distinct indices"));
        }
        if (lambda[i] - lambda[j]).abs() > SCHMIDT_TOL {
            return Err(Error::UnevenCoefficients {
                i,
                j,
                lambda_i: lambda[i],
                lambda_j: lambda[j],
            });
        }
        let swapped = StateExpr::base().then(Transform::SystemSwap(i, j));
        transcripts.push(swapped.then(Transform::EnvSwap(i, j)));
    }
    TermSet::from_transcripts(psi, &transcripts)
}

/// One equality `a = b` justified by `rule`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Merge {
    pub rule: Rule,
    pub a: TermId,
    pub b: TermId,
}

impl Merge {
    pub fn new(rule: Rule, a: TermId, b: TermId) -> Self {
        Merge { rule, a, b }
    }
}

#[derive(Clone, Debug)]
struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            core::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    fn classes(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
        for x in 0..n {
            let r = self.find(x);
            by_root[r].push(x);
        }
        let mut classes: Vec<Vec<usize>> = by_root.into_iter().filter(|c| !c.is_empty()).collect();
        classes.sort_by_key(|c| c[0]);
        classes
    }
}

/// Result of [`equal_probabilities`]: whether two terms share a class, and
/// the shortest chain of rule instances connecting them.
#[derive(Clone, Debug, PartialEq)]
pub struct Equality {
    pub equal: bool,
    /// Oriented from the first term to the second.
    pub chain: Vec<Merge>,
}

/// Union-find over a term population, with the merge log.
#[derive(Clone, Debug)]
pub struct EqualityStore {
    terms: Arc<TermSet>,
    rules: RuleSet,
    uf: UnionFind,
    /// Every rule instance, merging or not; the explanation graph.
    instances: Vec<Merge>,
    /// The instances that actually joined two classes, in order.
    trace: Vec<Merge>,
}

impl EqualityStore {
    pub fn terms(&self) -> &TermSet {
        &self.terms
    }

    pub fn rules(&self) -> RuleSet {
        self.rules
    }

    pub fn trace(&self) -> &[Merge] {
        &self.trace
    }

    pub fn instances(&self) -> &[Merge] {
        &self.instances
    }

    pub fn same_class(&mut self, a: TermId, b: TermId) -> bool {
        self.uf.find(a.0) == self.uf.find(b.0)
    }

    /// Classes as sorted term ids, ordered by smallest member.
    pub fn classes(&self) -> Vec<Vec<TermId>> {
        let mut uf = self.uf.clone();
        uf.classes()
            .into_iter()
            .map(|c| c.into_iter().map(TermId).collect())
            .collect()
    }

    /// Partition obtained by replaying `trace` on `n` singleton classes.
    pub fn replay(n: usize, trace: &[Merge]) -> Vec<Vec<TermId>> {
        let mut uf = UnionFind::new(n);
        for m in trace {
            uf.union(m.a.0, m.b.0);
        }
        uf.classes()
            .into_iter()
            .map(|c| c.into_iter().map(TermId).collect())
            .collect()
    }

    /// Pairs of terms in a common class whose Born values differ by more
    /// than `tol`. Each class is reported at most once, by its extreme pair.
    pub fn soundness_violations(&self, tol: f64) -> Vec<(TermId, TermId, f64)> {
        let mut out = Vec::new();
        for class in self.classes() {
            let values: Vec<(TermId, f64)> = class.iter().map(|&t| (t, self.terms.born_value(t))).collect();
            let lo = values.iter().copied().fold((class[0], f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
            let hi = values.iter().copied().fold((class[0], f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
            if hi.1 - lo.1 > tol {
                out.push((lo.0, hi.0, hi.1 - lo.1));
            }
        }
        out
    }

    /// Shortest chain of rule instances from `a` to `b` (breadth first).
    fn explain(&self, a: TermId, b: TermId) -> Option<Vec<Merge>> {
        let n = self.terms.len();
        let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (e, m) in self.instances.iter().enumerate() {
            adjacency[m.a.0].push((m.b.0, e));
            adjacency[m.b.0].push((m.a.0, e));
        }
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = alloc::collections::VecDeque::new();
        seen[a.0] = true;
        queue.push_back(a.0);
        while let Some(x) = queue.pop_front() {
            if x == b.0 {
                break;
            }
            for &(y, e) in &adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    prev[y] = Some((x, e));
                    queue.push_back(y);
                }
            }
        }
        if !seen[b.0] {
            return None;
        }
        let mut chain = Vec::new();
        let mut at = b.0;
        while let Some((from, e)) = prev[at] {
            let m = self.instances[e];
            chain.push(Merge::new(m.rule, TermId(from), TermId(at)));
            at = from;
        }
        chain.reverse();
        Some(chain)
    }

    pub fn render(&self, id: TermId) -> String {
        format!("{}", self.terms.term(id))
    }
}

/// Applies every enabled equality rule to the population. Rule instances
/// depend only on the population, so one pass reaches the fixpoint.
pub fn saturate(terms: &TermSet, rules: RuleSet) -> EqualityStore {
    saturate_shared(Arc::new(terms.clone()), rules)
}

/// [`saturate`] without copying the population.
pub fn saturate_shared(terms: Arc<TermSet>, rules: RuleSet) -> EqualityStore {
    let instances = terms.rule_instances(&rules);
    let mut uf = UnionFind::new(terms.len());
    let trace = instances.iter().copied().filter(|m| uf.union(m.a.0, m.b.0)).collect();
    EqualityStore {
        terms,
        rules,
        uf,
        instances,
        trace,
    }
}

/// Whether `a` and `b` were derived equal, with the shortest justification.
pub fn equal_probabilities(store: &EqualityStore, a: &ProbTerm, b: &ProbTerm) -> Result<Equality> {
    let ia = store.terms.lookup(a)?;
    let ib = store.terms.lookup(b)?;
    match store.explain(ia, ib) {
        Some(chain) => Ok(Equality { equal: true, chain }),
        None => Ok(Equality {
            equal: false,
            chain: Vec::new(),
        }),
    }
}

/// Exact branch probabilities of the base state: `1/d` each, emitted only
/// when all `d` system branch terms share one class and normalization is
/// enabled.
pub fn numeric_probabilities(store: &EqualityStore) -> Result<Vec<(usize, Probability)>> {
    if !store.rules.normalization {
        return Err(Error::NormalizationDisabled);
    }
    let terms = &store.terms;
    let d = terms.rank();
    let mut uf = store.uf.clone();
    let root = uf.find(terms.id_of(0, Subsystem::S, 0).0);
    for k in 1..d {
        if uf.find(terms.id_of(0, Subsystem::S, k).0) != root {
            return Err(Error::IncompleteDerivation);
        }
    }
    let p = Probability::new(1, d as u64);
    Ok((0..d).map(|k| (k, p)).collect())
}
