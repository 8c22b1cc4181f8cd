//! Counting argument for rational Born weights.
//!
//! Weights `m_k / M` are realized by enlarging the environment to `M`
//! dimensions and spreading branch `k` over `m_k` environment states with
//! equal amplitude `1/sqrt(M)`. The `M` fine branches are then equally
//! weighted, the derivation engine assigns each `1/M`, and branch `k`
//! collects `m_k` of them.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
#[allow(unused_imports)] // float methods are inherent when std is linked
use num_traits::Float;
use num_traits::Zero;

use crate::derivation::{adjacent_swaps, generate_terms, numeric_probabilities, saturate_shared, EqualityStore, Probability, RuleSet};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::state::BipartiteState;

/// `m_k / M` with every `m_k > 0` and `sum m_k = M`. Not reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalWeights {
    numerators: Vec<u64>,
    denominator: u64,
}

impl RationalWeights {
    pub fn new(numerators: Vec<u64>, denominator: u64) -> Result<Self> {
        if numerators.is_empty() {
            return Err(Error::InvalidWeights("at least one weight is needed"));
        }
        if denominator == 0 || numerators.contains(&0) {
            return Err(Error::InvalidWeights("numerators and denominator must be positive"));
        }
        let sum = numerators.iter().try_fold(0u64, |acc, &m| acc.checked_add(m));
        if sum != Some(denominator) {
            return Err(Error::WeightMismatch("numerators must sum to the denominator"));
        }
        Ok(RationalWeights {
            numerators,
            denominator,
        })
    }

    /// Brings `p_k / q_k` to a common denominator (the lcm of the `q_k`).
    pub fn from_fractions(fractions: &[(u64, u64)]) -> Result<Self> {
        if fractions.iter().any(|&(_, q)| q == 0) {
            return Err(Error::InvalidWeights("zero denominator"));
        }
        let den = fractions.iter().fold(1u64, |acc, &(_, q)| acc.lcm(&q));
        let nums = fractions.iter().map(|&(p, q)| p * (den / q)).collect();
        Self::new(nums, den)
    }

    pub fn numerators(&self) -> &[u64] {
        &self.numerators
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    pub fn as_probabilities(&self) -> Vec<Probability> {
        self.numerators
            .iter()
            .map(|&m| Probability::new(m, self.denominator))
            .collect()
    }
}

/// First continued-fraction convergent of `x` within `tol`, if its
/// denominator stays at or below `max_den`.
fn convergent_within(x: f64, tol: f64, max_den: u64) -> Option<(u64, u64)> {
    let (mut h1, mut h2) = (1u64, 0u64);
    let (mut k1, mut k2) = (0u64, 1u64);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        if !(0.0..=u64::MAX as f64).contains(&a) {
            return None;
        }
        let a = a as u64;
        let h = a.checked_mul(h1)?.checked_add(h2)?;
        let k = a.checked_mul(k1)?.checked_add(k2)?;
        if k > max_den {
            return None;
        }
        if (h as f64 / k as f64 - x).abs() <= tol {
            return Some((h, k));
        }
        let frac = rest - a as f64;
        if frac <= 0.0 {
            return None;
        }
        rest = 1.0 / frac;
        (h2, h1) = (h1, h);
        (k2, k1) = (k1, k);
    }
    None
}

/// Rational approximation of squared coefficients with a common
/// denominator at most `max_den`, each within `tol`.
pub fn rationalize(weights: &[f64], tol: f64, max_den: u64) -> Result<RationalWeights> {
    if weights.is_empty() || weights.iter().any(|&w| !w.is_finite() || w <= 0.0) {
        return Err(Error::InvalidWeights("weights must be finite and positive"));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > tol {
        return Err(Error::WeightMismatch("weights must sum to one"));
    }
    let no_fit = Error::NoRationalFit { max_den, tol };
    let mut fractions = Vec::with_capacity(weights.len());
    let mut den = 1u64;
    for &w in weights {
        let (p, q) = convergent_within(w, tol, max_den).ok_or(no_fit.clone())?;
        den = den.lcm(&q);
        if den > max_den {
            return Err(no_fit);
        }
        fractions.push((p, q));
    }
    let nums: Vec<u64> = fractions.iter().map(|&(p, q)| p * (den / q)).collect();
    if nums.contains(&0) || nums.iter().sum::<u64>() != den {
        return Err(no_fit);
    }
    RationalWeights::new(nums, den)
}

/// A state whose branch `k` is spread evenly over `m_k` environment states.
#[derive(Clone, Debug, PartialEq)]
pub struct FineGrainedState {
    state: BipartiteState,
    branch_map: Vec<Vec<usize>>,
}

impl FineGrainedState {
    pub fn state(&self) -> &BipartiteState {
        &self.state
    }

    /// Environment indices (zero-based) carrying each system branch.
    pub fn branch_map(&self) -> &[Vec<usize>] {
        &self.branch_map
    }

    pub fn grain(&self) -> usize {
        self.state.dim_e()
    }

    /// The `M` fine branches `|s_k>|eps_j>` as an `M x M` state, with a
    /// register attached to the system recording `j`. Its branches are the
    /// nonzero entries of the fine-grained amplitudes, in order.
    pub fn branch_resolved(&self) -> BipartiteState {
        let amps = self.state.amplitudes();
        let m = self.grain();
        let mut resolved = CMatrix::zeros(m, m);
        let mut fine = 0;
        for k in 0..self.state.dim_s() {
            for &j in &self.branch_map[k] {
                resolved[(fine, j)] = amps[(k, j)];
                fine += 1;
            }
        }
        BipartiteState::from_amplitudes(resolved, false).expect("fine branches carry the full norm")
    }

    /// Squared Schmidt coefficients per system branch, computed exactly
    /// from the support structure: rows have disjoint supports and equal
    /// moduli `1/sqrt(M)`, so `rho_S` is diagonal with entries
    /// `(row support size) / M`.
    pub fn exact_branch_weights(&self) -> Vec<Probability> {
        let m = self.grain() as u64;
        self.branch_map
            .iter()
            .map(|cols| Probability::new(cols.len() as u64, m))
            .collect()
    }
}

/// Builds the fine-grained state for `n` system branches.
pub fn fine_grain(w: &RationalWeights, n: usize) -> Result<FineGrainedState> {
    if w.len() != n {
        return Err(Error::WeightMismatch("one weight is needed per system branch"));
    }
    let m = w.denominator() as usize;
    let amp = C64::new((1.0 / m as f64).sqrt(), 0.0);
    let mut amps = CMatrix::zeros(n, m);
    let mut branch_map = Vec::with_capacity(n);
    let mut next = 0;
    for (k, &mk) in w.numerators().iter().enumerate() {
        let cols: Vec<usize> = (next..next + mk as usize).collect();
        for &j in &cols {
            amps[(k, j)] = amp;
        }
        next += mk as usize;
        branch_map.push(cols);
    }
    let state = BipartiteState::from_amplitudes(amps, true)?;
    Ok(FineGrainedState { state, branch_map })
}

/// Outcome of the counting route for one weight vector.
#[derive(Clone, Debug)]
pub struct CountingResult {
    /// `m_k / M`, exact.
    pub probabilities: Vec<Probability>,
    /// The probability the derivation assigned to each fine branch.
    pub fine_probabilities: Vec<Probability>,
    pub fine_grained: FineGrainedState,
    /// The equal-branch derivation over the `M` fine branches.
    pub derivation: Arc<EqualityStore>,
}

/// Memoizes the equal-branch derivation by grain `M`; the derivation for
/// `M` fine branches does not depend on how they are grouped.
#[derive(Debug, Default)]
pub struct CountingEngine {
    runs: BTreeMap<usize, Arc<EqualityStore>>,
}

impl CountingEngine {
    pub fn new() -> Self {
        Self::default()
    }

    /// Cached derivations, by ascending grain.
    pub fn runs(&self) -> impl Iterator<Item = &EqualityStore> {
        self.runs.values().map(|s| s.as_ref())
    }

    fn equal_branch_run(&mut self, fg: &FineGrainedState) -> Result<Arc<EqualityStore>> {
        let m = fg.grain();
        if let Some(run) = self.runs.get(&m) {
            return Ok(run.clone());
        }
        let resolved = fg.branch_resolved();
        let terms = generate_terms(&resolved, &adjacent_swaps(m))?;
        let store = Arc::new(saturate_shared(Arc::new(terms), RuleSet::all()));
        self.runs.insert(m, store.clone());
        Ok(store)
    }

    pub fn born(&mut self, w: &RationalWeights) -> Result<CountingResult> {
        let fg = fine_grain(w, w.len())?;
        let store = self.equal_branch_run(&fg)?;
        let derived = numeric_probabilities(&store)?;

        // label t of the derivation is the fine branch its system vector selects
        let labels = store.terms().labels();
        let m = fg.grain();
        let mut fine = vec![Probability::zero(); m];
        for (t, p) in derived {
            let s = labels.system_vector(t);
            let branch = (0..m)
                .max_by(|&a, &b| s[a].norm().total_cmp(&s[b].norm()))
                .expect("grain is positive");
            fine[branch] = p;
        }

        let mut probabilities = Vec::with_capacity(w.len());
        let mut offset = 0;
        for cols in fg.branch_map() {
            let p = fine[offset..offset + cols.len()]
                .iter()
                .fold(Probability::zero(), |acc, &q| acc + q);
            probabilities.push(p);
            offset += cols.len();
        }
        Ok(CountingResult {
            probabilities,
            fine_probabilities: fine,
            fine_grained: fg,
            derivation: store,
        })
    }
}

/// Born weights `m_k / M` obtained through the equal-branch derivation.
pub fn born_via_counting(w: &RationalWeights) -> Result<CountingResult> {
    CountingEngine::new().born(w)
}
