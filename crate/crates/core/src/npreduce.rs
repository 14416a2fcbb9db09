//! Bin packing to a single quadratic equation.
//!
//! An exact packing of items `r_1..r_s` into `N` bins of capacity `B` gives a
//! solution of `∏ z_j^-1 [a, b^{r_j}] z_j = [a^N, b^B]`, and conversely at the
//! sizes we can search exhaustively.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::freewords::{commutator, Generator, Word};
use crate::makanin::{solve_quadratic, SolveOptions, Verdict};
use crate::oracle::{find_solution, SearchBound};
use crate::quadratic::{Assignment, Equation, EquationSystem};
use crate::symbols::Alphabet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("a bin packing instance needs at least one item")]
    NoItems,
    #[error("item sizes, bin count and capacity must be positive")]
    NonPositive,
    #[error("index i = {0} is below 3")]
    SmallIndex(u32),
    #[error("exponent D must be positive")]
    ZeroExponent,
    #[error("spacer exponents must be positive and strictly increasing")]
    Spacers,
    #[error("generator names must be three distinct identifiers")]
    Names,
    #[error("packing: {0}")]
    Packing(String),
    #[error("extra word '{word}': {message}")]
    Extra { word: String, message: String },
    #[error("constructed witness does not reduce to a solution")]
    Witness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinPackInstance {
    sizes: Vec<u64>,
    bins: u64,
    capacity: u64,
}

impl BinPackInstance {
    pub fn new(sizes: Vec<u64>, bins: u64, capacity: u64) -> Result<Self, ReductionError> {
        if sizes.is_empty() {
            return Err(ReductionError::NoItems);
        }
        if bins == 0 || capacity == 0 || sizes.contains(&0) {
            return Err(ReductionError::NonPositive);
        }
        Ok(BinPackInstance {
            sizes,
            bins,
            capacity,
        })
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn bins(&self) -> u64 {
        self.bins
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    /// Whether `Σ r_j = N·B`; exact packings exist only then.
    pub fn sum_matches(&self) -> bool {
        self.sizes.iter().sum::<u64>() == self.bins * self.capacity
    }

    /// Checks that `bin_of[j]` puts every item in a bin and fills each bin exactly.
    pub fn check_packing(&self, bin_of: &[usize]) -> Result<(), ReductionError> {
        if bin_of.len() != self.sizes.len() {
            return Err(ReductionError::Packing(format!(
                "{} items packed, instance has {}",
                bin_of.len(),
                self.sizes.len()
            )));
        }
        let mut load = vec![0u64; self.bins as usize];
        for (j, &b) in bin_of.iter().enumerate() {
            let slot = load
                .get_mut(b)
                .ok_or_else(|| ReductionError::Packing(format!("item {} goes to missing bin {b}", j + 1)))?;
            *slot += self.sizes[j];
        }
        match load.iter().position(|&l| l != self.capacity) {
            Some(b) => Err(ReductionError::Packing(format!(
                "bin {b} holds {} instead of {}",
                load[b], self.capacity
            ))),
            None => Ok(()),
        }
    }

    /// An exact packing by exhaustive search, as a bin index per item.
    pub fn find_packing(&self) -> Option<Vec<usize>> {
        if !self.sum_matches() {
            return None;
        }
        let mut order: Vec<usize> = (0..self.sizes.len()).collect();
        order.sort_by_key(|&j| std::cmp::Reverse(self.sizes[j]));
        let mut load = vec![0u64; self.bins as usize];
        let mut bin_of = vec![0usize; self.sizes.len()];
        self.place(&order, 0, &mut load, &mut bin_of).then_some(bin_of)
    }

    fn place(&self, order: &[usize], k: usize, load: &mut [u64], bin_of: &mut [usize]) -> bool {
        let Some(&j) = order.get(k) else {
            return load.iter().all(|&l| l == self.capacity);
        };
        for b in 0..load.len() {
            // Empty bins are interchangeable; try only the first one.
            if b > 0 && load[..b].contains(&0) && load[b] == 0 {
                break;
            }
            if load[b] + self.sizes[j] <= self.capacity {
                load[b] += self.sizes[j];
                bin_of[j] = b;
                if self.place(order, k + 1, load, bin_of) {
                    return true;
                }
                load[b] -= self.sizes[j];
            }
        }
        false
    }
}

impl fmt::Display for BinPackInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.sizes.iter().map(u64::to_string).collect();
        write!(f, "r=({}) N={} B={}", items.join(","), self.bins, self.capacity)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionParams {
    pub i: u32,
    pub d: u32,
    pub spacers: Vec<u32>,
    /// Names of the generators `b`, `c`, `d`.
    pub names: [String; 3],
}

impl Default for ReductionParams {
    fn default() -> Self {
        ReductionParams {
            i: 3,
            d: 1,
            spacers: vec![1, 2],
            names: ["b".into(), "c".into(), "d".into()],
        }
    }
}

impl ReductionParams {
    pub fn validate(&self) -> Result<(), ReductionError> {
        if self.i < 3 {
            return Err(ReductionError::SmallIndex(self.i));
        }
        if self.d == 0 {
            return Err(ReductionError::ZeroExponent);
        }
        if self.spacers.is_empty() || self.spacers[0] == 0 || self.spacers.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ReductionError::Spacers);
        }
        let [b, c, d] = &self.names;
        if b == c || c == d || b == d {
            return Err(ReductionError::Names);
        }
        Ok(())
    }

    /// Letters of `a^{(i)}`: `D(n+1) + iD·Σt`.
    pub fn a_length(&self) -> u64 {
        let d = u64::from(self.d);
        let n = self.spacers.len() as u64;
        let t: u64 = self.spacers.iter().map(|&t| u64::from(t)).sum();
        d * (n + 1) + u64::from(self.i) * d * t
    }

    /// An alphabet holding `b`, `c`, `d` as constants (in that order).
    pub fn alphabet(&self) -> Result<Alphabet, ReductionError> {
        self.validate()?;
        let [b, c, d] = &self.names;
        Alphabet::with(&[b, c, d], &[]).map_err(|_| ReductionError::Names)
    }
}

/// `a^{(i)} = d^D c^{i t_1 D} d^D … c^{i t_n D} d^D` over the alphabet of `params`.
pub fn build_a(params: &ReductionParams) -> Result<Word, ReductionError> {
    let al = params.alphabet()?;
    Ok(a_word(params, &al))
}

fn a_word(params: &ReductionParams, al: &Alphabet) -> Word {
    let c = Word::generator(Generator::pos(al.lookup(&params.names[1]).expect("c declared")));
    let d = Word::generator(Generator::pos(al.lookup(&params.names[2]).expect("d declared")));
    let dd = d.pow(i64::from(params.d));
    let mut parts = vec![dd.clone()];
    for &t in &params.spacers {
        parts.push(c.pow(i64::from(params.i) * i64::from(t) * i64::from(params.d)));
        parts.push(dd.clone());
    }
    Word::product(&parts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EquationForm {
    /// `a = a^{(i)}`, `b` raised to `i` times the sizes, over `b, c, d`.
    Full,
    /// Two letters `a1`, `b1` standing for `a^{(i)}` and `b^i`.
    Free,
}

/// The reduction equation with its two base words `a`, `y`: item `j`
/// contributes `z_j^-1 [a, y^{r_j}] z_j` and the right side is `[a^N, y^B]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionEquation {
    pub system: EquationSystem,
    pub form: EquationForm,
    pub a: Word,
    pub y: Word,
    /// The variable `z_j` for item `j`.
    pub z: Vec<u16>,
    /// Conjugating variables of the extra words, in order.
    pub extra: Vec<u16>,
}

pub fn build_equation(
    inst: &BinPackInstance,
    params: &ReductionParams,
    form: EquationForm,
) -> Result<ReductionEquation, ReductionError> {
    build_equation_with_extra(inst, params, form, &[])
}

/// As [`build_equation`], with `∏ y_k^-1 R_k y_k` prepended to the left side
/// for each fixed word `R_k` (written over the equation's constants).
pub fn build_equation_with_extra(
    inst: &BinPackInstance,
    params: &ReductionParams,
    form: EquationForm,
    extra: &[&str],
) -> Result<ReductionEquation, ReductionError> {
    let (mut al, a, y) = match form {
        EquationForm::Full => {
            let al = params.alphabet()?;
            let a = a_word(params, &al);
            let b = Word::generator(Generator::pos(al.lookup(&params.names[0]).expect("b declared")));
            let y = b.pow(i64::from(params.i));
            (al, a, y)
        }
        EquationForm::Free => {
            params.validate()?;
            let al = Alphabet::with(&["a1", "b1"], &[]).expect("valid names");
            let a = Word::generator(Generator::pos(0));
            let y = Word::generator(Generator::pos(1));
            (al, a, y)
        }
    };
    let rs: Vec<Word> = extra
        .iter()
        .map(|w| {
            al.parse_word(w).map_err(|e| ReductionError::Extra {
                word: w.to_string(),
                message: e.to_string(),
            })
        })
        .collect::<Result<_, _>>()?;
    let extra_vars: Vec<u16> = (0..rs.len()).map(|_| al.fresh_variable("y")).collect();
    let z: Vec<u16> = (1..=inst.sizes.len())
        .map(|j| al.add_variable(&format!("z{j}")).expect("fresh name"))
        .collect();
    // Conjugates are built letter by letter so the variables stay visible.
    let conj = |v: u16, body: &Word| -> Word {
        let zv = Word::generator(Generator::pos(v));
        let mut letters = zv.inverse().into_letters();
        letters.extend_from_slice(body.letters());
        letters.extend_from_slice(zv.letters());
        Word::from(letters)
    };
    let mut lhs: Vec<Generator> = Vec::new();
    for (r, &v) in rs.iter().zip(&extra_vars) {
        lhs.extend_from_slice(conj(v, r).letters());
    }
    for (&r, &v) in inst.sizes.iter().zip(&z) {
        lhs.extend_from_slice(conj(v, &commutator(&a, &y.pow(r as i64))).letters());
    }
    let rhs = commutator(&a.pow(inst.bins as i64), &y.pow(inst.capacity as i64));
    let mut system = EquationSystem::new(al);
    system.push(Equation::new(Word::from(lhs), rhs));
    Ok(ReductionEquation {
        system,
        form,
        a,
        y,
        z,
        extra: extra_vars,
    })
}

/// Explicit conjugators for an exact packing.
///
/// Bin `n` (0-based) contributes `a^{-(N-1-n)} [a, y^B] a^{N-1-n}`, the bins
/// multiplying out to `[a^N, y^B]`; inside a bin the item with `P` units
/// before it is conjugated by `y^P`. Adjacent conjugates are then swapped
/// into item order via `u·v = v·(v^-1 u v)`.
pub fn packing_to_witness(
    inst: &BinPackInstance,
    bin_of: &[usize],
    eq: &ReductionEquation,
) -> Result<Assignment, ReductionError> {
    inst.check_packing(bin_of)?;
    if !eq.extra.is_empty() {
        return Err(ReductionError::Packing("the equation carries extra fixed words".into()));
    }
    let n = inst.bins as usize;
    let mut seq: Vec<(usize, Word)> = Vec::with_capacity(bin_of.len());
    for bin in 0..n {
        let outer = eq.a.pow((n - 1 - bin) as i64);
        let mut before = 0u64;
        for j in (0..bin_of.len()).filter(|&j| bin_of[j] == bin) {
            seq.push((j, eq.y.pow(before as i64).concat(&outer)));
            before += inst.sizes[j];
        }
    }
    let factor = |j: usize, g: &Word| commutator(&eq.a, &eq.y.pow(inst.sizes[j] as i64)).conjugate_by(g);
    for end in (1..seq.len()).rev() {
        for k in 0..end {
            if seq[k].0 > seq[k + 1].0 {
                let right = factor(seq[k + 1].0, &seq[k + 1].1);
                let moved = (seq[k].0, seq[k].1.concat(&right));
                seq[k] = seq[k + 1].clone();
                seq[k + 1] = moved;
            }
        }
    }
    let asg: Assignment = seq.into_iter().map(|(j, g)| (eq.z[j], g)).collect();
    if !eq.system.is_solution(&asg) {
        return Err(ReductionError::Witness);
    }
    Ok(asg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EquationVerdict {
    Sat,
    /// No solution with every variable of length at most the bound.
    UnsatWithinBound,
    /// The decision procedure proved there is no solution.
    Unsat,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub instance: BinPackInstance,
    pub packing: Option<Vec<usize>>,
    /// The constructed witness, when a packing exists.
    pub witness: Option<Assignment>,
    pub verdict: EquationVerdict,
    /// A solution found independently of the packing.
    pub found: Option<Assignment>,
}

impl EquivalenceReport {
    pub fn agrees(&self) -> bool {
        match self.verdict {
            EquationVerdict::Sat => self.packing.is_some() && self.witness.is_some(),
            EquationVerdict::Unsat | EquationVerdict::UnsatWithinBound => self.packing.is_none(),
            EquationVerdict::Inconclusive => false,
        }
    }
}

/// How the free-form equation is decided independently of the packing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EquivalenceBound {
    /// Per-variable length bound of the brute-force search.
    pub oracle: usize,
    /// State budget of the decision procedure, run when the search finds nothing.
    pub solver_states: usize,
}

impl Default for EquivalenceBound {
    fn default() -> Self {
        EquivalenceBound {
            oracle: 4,
            solver_states: 20_000,
        }
    }
}

/// Compares the exhaustive packing verdict with a verdict on the free-form
/// equation reached without looking at the packing.
pub fn check_equivalence(
    inst: &BinPackInstance,
    params: &ReductionParams,
    bound: EquivalenceBound,
) -> Result<EquivalenceReport, ReductionError> {
    let eq = build_equation(inst, params, EquationForm::Free)?;
    let packing = inst.find_packing();
    let witness = packing
        .as_ref()
        .map(|p| packing_to_witness(inst, p, &eq))
        .transpose()?;
    let (verdict, found) = match find_solution(&eq.system, SearchBound::new(bound.oracle)) {
        Some(a) => (EquationVerdict::Sat, Some(a)),
        None => {
            let opts = SolveOptions {
                bound: None,
                max_states: bound.solver_states,
            };
            match solve_quadratic(&eq.system, &opts) {
                Ok(r) => match r.verdict {
                    Verdict::Sat => (EquationVerdict::Sat, r.witness),
                    Verdict::Unsat => (EquationVerdict::Unsat, None),
                    Verdict::Inconclusive => (EquationVerdict::UnsatWithinBound, None),
                },
                Err(_) => (EquationVerdict::Inconclusive, None),
            }
        }
    };
    Ok(EquivalenceReport {
        instance: inst.clone(),
        packing,
        witness,
        verdict,
        found,
    })
}

/// Every instance with `s ≤ max_items` items of size at most `max_cap`,
/// `N ≤ max_bins`, `B ≤ max_cap` and `Σ r_j = N·B`, sizes non-increasing.
pub fn desk_instances(max_items: usize, max_cap: u64, max_bins: u64) -> Vec<BinPackInstance> {
    fn sizes(len: usize, top: u64, out: &mut Vec<Vec<u64>>, cur: &mut Vec<u64>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        let hi = cur.last().copied().unwrap_or(top);
        for r in (1..=hi).rev() {
            cur.push(r);
            sizes(len, top, out, cur);
            cur.pop();
        }
    }
    let mut all = Vec::new();
    for bins in 1..=max_bins {
        for cap in 1..=max_cap {
            for s in 1..=max_items {
                let mut vs = Vec::new();
                // Items larger than B are allowed so infeasible cases appear.
                sizes(s, bins * cap, &mut vs, &mut Vec::new());
                for v in vs {
                    if v.iter().sum::<u64>() == bins * cap {
                        all.push(BinPackInstance::new(v, bins, cap).expect("positive"));
                    }
                }
            }
        }
    }
    all
}

/// Runs [`check_equivalence`] over instances in parallel.
pub fn equivalence_sweep(
    instances: &[BinPackInstance],
    params: &ReductionParams,
    bound: EquivalenceBound,
) -> Result<Vec<EquivalenceReport>, ReductionError> {
    instances
        .par_iter()
        .map(|inst| check_equivalence(inst, params, bound))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(r: &[u64], n: u64, b: u64) -> BinPackInstance {
        BinPackInstance::new(r.to_vec(), n, b).unwrap()
    }

    #[test]
    fn a_word_examples() {
        let p = ReductionParams::default();
        let a = build_a(&p).unwrap();
        assert_eq!(p.alphabet().unwrap().show(&a), "d c^3 d c^6 d");
        assert_eq!(a.len() as u64, p.a_length());
        let single = ReductionParams {
            spacers: vec![1],
            ..p.clone()
        };
        assert_eq!(single.alphabet().unwrap().show(&build_a(&single).unwrap()), "d c^3 d");
        assert_eq!(
            build_a(&ReductionParams { i: 2, ..p.clone() }),
            Err(ReductionError::SmallIndex(2))
        );
        assert_eq!(
            build_a(&ReductionParams {
                spacers: vec![2, 2],
                ..p
            }),
            Err(ReductionError::Spacers)
        );
    }

    #[test]
    fn equation_shape() {
        let p = ReductionParams::default();
        let i = inst(&[1, 1, 2], 2, 2);
        for form in [EquationForm::Full, EquationForm::Free] {
            let eq = build_equation(&i, &p, form).unwrap();
            assert!(eq.system.is_quadratic());
            assert_eq!(eq.z.len(), 3);
            assert_eq!(eq.system.occurring_variables(), eq.z);
        }
        let free = build_equation(&i, &p, EquationForm::Free).unwrap();
        let text = free.system.alphabet.show(&free.system.equations[0].lhs);
        assert!(text.starts_with("z1^-1 a1^-1 b1^-1 a1 b1 z1"), "{text}");
    }

    #[test]
    fn single_item_is_solved_by_one() {
        let p = ReductionParams::default();
        let i = inst(&[3], 1, 3);
        let eq = build_equation(&i, &p, EquationForm::Full).unwrap();
        let w = packing_to_witness(&i, &[0], &eq).unwrap();
        assert_eq!(w[&eq.z[0]], Word::empty());
    }

    #[test]
    fn splitting_identity() {
        let p = ReductionParams::default();
        let i = inst(&[1, 1], 1, 2);
        let eq = build_equation(&i, &p, EquationForm::Free).unwrap();
        let w = packing_to_witness(&i, &[0, 0], &eq).unwrap();
        assert_eq!(w[&eq.z[0]], Word::empty());
        assert_eq!(w[&eq.z[1]], eq.y);
    }

    #[test]
    fn witnesses_need_reordering() {
        let p = ReductionParams::default();
        let i = inst(&[1, 2, 1], 2, 2);
        let packing = i.find_packing().unwrap();
        i.check_packing(&packing).unwrap();
        for form in [EquationForm::Full, EquationForm::Free] {
            let eq = build_equation(&i, &p, form).unwrap();
            let w = packing_to_witness(&i, &packing, &eq).unwrap();
            assert!(eq.system.is_solution(&w));
        }
    }

    #[test]
    fn packing_search() {
        assert!(inst(&[1, 1, 2], 2, 2).find_packing().is_some());
        assert!(inst(&[3, 1], 2, 2).find_packing().is_none());
        assert!(inst(&[2, 2], 3, 2).find_packing().is_none());
        assert!(inst(&[2, 2, 2], 2, 3).find_packing().is_none());
        assert!(inst(&[1, 1], 1, 2).check_packing(&[0, 1]).is_err());
        assert_eq!(BinPackInstance::new(vec![], 1, 1), Err(ReductionError::NoItems));
    }

    #[test]
    fn extra_words() {
        let p = ReductionParams::default();
        let i = inst(&[1, 1, 2], 2, 2);
        let eq = build_equation_with_extra(&i, &p, EquationForm::Full, &["c d c^-1", "b^2"]).unwrap();
        assert!(eq.system.is_quadratic());
        assert_eq!(eq.extra.len(), 2);
        assert!(build_equation_with_extra(&i, &p, EquationForm::Full, &["q"]).is_err());
    }
}
