//! Exhaustive small corpora of quadratic systems over `F(a, b)`.
//!
//! Variable patterns are enumerated once per orbit under renaming variables,
//! inverting variables, rotating and inverting relators and reordering
//! equations. Constant words are then distributed into the gaps between
//! variable occurrences, keeping one representative per orbit of the eight
//! signed permutations of `{a, b}`.

use std::collections::BTreeSet;

use crate::freewords::{Generator, Word};
use crate::quadratic::{Equation, EquationSystem};
use crate::symbols::Alphabet;

/// `+(v+1)` / `-(v+1)` for variable `v`.
type Token = i8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusSpec {
    pub max_vars: usize,
    pub max_equations: usize,
    /// Total number of constant letters in a system.
    pub max_constant_length: usize,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            max_vars: 3,
            max_equations: 2,
            max_constant_length: 3,
        }
    }
}

const VAR_NAMES: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

fn canonical_pattern(eqs: &[Vec<Token>]) -> Vec<Vec<Token>> {
    fn orientations(eq: &[Token]) -> Vec<Vec<Token>> {
        let n = eq.len();
        let mut out = Vec::new();
        for r in 0..n {
            let rot: Vec<Token> = (0..n).map(|i| eq[(r + i) % n]).collect();
            out.push(rot.clone());
            out.push(rot.iter().rev().map(|t| -t).collect());
        }
        out
    }
    fn rename(eqs: &[Vec<Token>]) -> Vec<Vec<Token>> {
        let mut map: Vec<(i8, i8)> = Vec::new();
        eqs.iter()
            .map(|eq| {
                eq.iter()
                    .map(|&t| {
                        let v = t.abs();
                        let (nv, sign) = match map.iter().find(|(old, _)| *old == v) {
                            Some(&(_, packed)) => (packed.abs(), packed.signum()),
                            None => {
                                let nv = map.len() as i8 + 1;
                                map.push((v, nv * t.signum()));
                                (nv, t.signum())
                            }
                        };
                        nv * t.signum() * sign
                    })
                    .collect()
            })
            .collect()
    }
    let mut best: Option<Vec<Vec<Token>>> = None;
    let orders: Vec<Vec<usize>> = if eqs.len() == 2 {
        vec![vec![0, 1], vec![1, 0]]
    } else {
        vec![(0..eqs.len()).collect()]
    };
    for order in orders {
        let choices: Vec<Vec<Vec<Token>>> = order.iter().map(|&i| orientations(&eqs[i])).collect();
        let mut idx = vec![0usize; choices.len()];
        'odometer: loop {
            let pick: Vec<Vec<Token>> = idx.iter().zip(&choices).map(|(&k, c)| c[k].clone()).collect();
            let cand = rename(&pick);
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
            let mut p = 0;
            loop {
                if p == idx.len() {
                    break 'odometer;
                }
                idx[p] += 1;
                if idx[p] < choices[p].len() {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
        }
    }
    best.expect("at least one candidate")
}

/// Canonical variable patterns with `n` variables split over `m` equations.
fn patterns(n: usize, m: usize) -> Vec<Vec<Vec<Token>>> {
    let mut seen = BTreeSet::new();
    let mut tokens: Vec<Token> = Vec::new();
    let mut counts = vec![0usize; n];
    fn arrange(
        n: usize,
        m: usize,
        counts: &mut Vec<usize>,
        tokens: &mut Vec<Token>,
        seen: &mut BTreeSet<Vec<Vec<Token>>>,
    ) {
        if tokens.len() == 2 * n {
            let splits: Vec<Vec<usize>> = if m == 1 {
                vec![vec![]]
            } else {
                (1..2 * n).map(|s| vec![s]).collect()
            };
            for split in splits {
                let mut eqs = Vec::new();
                let mut start = 0;
                for &s in split.iter().chain(std::iter::once(&(2 * n))) {
                    eqs.push(tokens[start..s].to_vec());
                    start = s;
                }
                seen.insert(canonical_pattern(&eqs));
            }
            return;
        }
        for v in 0..n {
            if counts[v] == 2 {
                continue;
            }
            // First occurrences appear in variable order.
            if counts[v] == 0 && (0..v).any(|u| counts[u] == 0) {
                continue;
            }
            for sign in [1i8, -1] {
                if counts[v] == 0 && sign < 0 {
                    continue;
                }
                counts[v] += 1;
                tokens.push(sign * (v as i8 + 1));
                arrange(n, m, counts, tokens, seen);
                tokens.pop();
                counts[v] -= 1;
            }
        }
    }
    arrange(n, m, &mut counts, &mut tokens, &mut seen);
    seen.into_iter().collect()
}

/// Reduced words over `{a, b}` (ids 0 and 1) of exactly length `len`.
fn const_words(len: usize) -> Vec<Vec<Generator>> {
    let letters = [
        Generator::pos(0),
        Generator::neg(0),
        Generator::pos(1),
        Generator::neg(1),
    ];
    let mut layer = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &layer {
            for &g in &letters {
                if w.last().is_some_and(|l: &Generator| l.cancels(g)) {
                    continue;
                }
                let mut v = w.clone();
                v.push(g);
                next.push(v);
            }
        }
        layer = next;
    }
    layer
}

/// First constant letter is `a`, and the first letter on the other generator
/// is `b`.
fn alphabet_normal(consts: &[Generator]) -> bool {
    let Some(first) = consts.first() else {
        return true;
    };
    if *first != Generator::pos(0) {
        return false;
    }
    match consts.iter().find(|g| g.id() == 1) {
        Some(g) => !g.is_inverse(),
        None => true,
    }
}

fn build(pattern: &[Vec<Token>], gaps: &[Vec<Generator>], n: usize) -> EquationSystem {
    let mut alphabet = Alphabet::with(&["a", "b"], &[]).expect("names");
    let vars: Vec<u16> = (0..n)
        .map(|i| alphabet.add_variable(VAR_NAMES[i]).expect("names"))
        .collect();
    let mut sys = EquationSystem::new(alphabet);
    let mut g = 0;
    for eq in pattern {
        let mut raw = Vec::new();
        for &t in eq {
            raw.push(Generator::new(vars[t.unsigned_abs() as usize - 1], t.signum()));
            raw.extend_from_slice(&gaps[g]);
            g += 1;
        }
        sys.push(Equation::relator(Word::from(raw)));
    }
    sys
}

/// All corpus systems for the given limits, in a deterministic order.
pub fn quadratic_corpus(spec: CorpusSpec) -> Vec<EquationSystem> {
    let mut out = Vec::new();
    let words: Vec<Vec<Vec<Generator>>> = (0..=spec.max_constant_length).map(const_words).collect();
    for n in 1..=spec.max_vars {
        for m in 1..=spec.max_equations.min(2 * n) {
            for pattern in patterns(n, m) {
                if pattern.iter().any(|e| e.is_empty()) {
                    continue;
                }
                let gap_count: usize = pattern.iter().map(|e| e.len()).sum();
                // Gaps that must be non-empty to keep relators cyclically reduced.
                let mut needs = Vec::new();
                for eq in &pattern {
                    for i in 0..eq.len() {
                        let next = eq[(i + 1) % eq.len()];
                        needs.push(eq.len() > 1 && eq[i] == -next);
                    }
                }
                let mut gaps: Vec<Vec<Generator>> = vec![Vec::new(); gap_count];
                distribute(0, spec.max_constant_length, &words, &needs, &mut gaps, &mut |gaps| {
                    let consts: Vec<Generator> = gaps.iter().flatten().copied().collect();
                    if alphabet_normal(&consts) {
                        let sys = build(&pattern, gaps, n);
                        if sys.relators().iter().all(|r| r.is_cyclically_reduced()) {
                            out.push(sys);
                        }
                    }
                });
            }
        }
    }
    out
}

fn distribute<F: FnMut(&[Vec<Generator>])>(
    i: usize,
    budget: usize,
    words: &[Vec<Vec<Generator>>],
    needs: &[bool],
    gaps: &mut Vec<Vec<Generator>>,
    emit: &mut F,
) {
    if i == gaps.len() {
        emit(gaps);
        return;
    }
    let min = usize::from(needs[i]);
    for len in min..=budget {
        for w in &words[len] {
            gaps[i] = w.clone();
            distribute(i + 1, budget - len, words, needs, gaps, emit);
        }
    }
    gaps[i].clear();
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_variable_patterns() {
        // x x and x x^-1 on one relator; on two, x | x^-1 inverts to x | x.
        assert_eq!(patterns(1, 1).len(), 2);
        assert_eq!(patterns(1, 2).len(), 1);
    }

    #[test]
    fn canonical_pattern_ignores_equation_order() {
        let a: Vec<Token> = vec![1, 2, -1];
        let b: Vec<Token> = vec![3, 3, -2];
        assert_eq!(canonical_pattern(&[a.clone(), b.clone()]), canonical_pattern(&[b, a]));
    }

    #[test]
    fn corpus_is_quadratic_and_reduced() {
        let c = quadratic_corpus(CorpusSpec {
            max_vars: 2,
            max_equations: 2,
            max_constant_length: 2,
        });
        assert!(!c.is_empty());
        for s in &c {
            assert!(s.is_quadratic());
            assert!(s.relators().iter().all(|r| r.is_cyclically_reduced()));
        }
    }
}
