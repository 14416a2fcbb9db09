//! Bounded brute-force solver, independent of the transformation machinery.
//!
//! Variables range over reduced words of length at most `L`. A variable that
//! is the only unassigned one in some equation is solved for directly
//! (cancellation, square roots, or a conjugacy family) instead of enumerated.

use std::cmp::Ordering;

use rayon::prelude::*;
use thiserror::Error;

use crate::freewords::{substitute, Generator, Word};
use crate::quadratic::{Assignment, EquationSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBound {
    pub max_len: usize,
    /// Optional cap on the summed length of all variable values.
    pub total_cap: Option<usize>,
}

impl SearchBound {
    pub fn new(max_len: usize) -> Self {
        SearchBound {
            max_len,
            total_cap: None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("no solution with every variable of length at most {0}")]
    NoSolution(usize),
}

/// All reduced words over the given generators of length at most `max_len`,
/// in shortlex order.
pub fn words_up_to(gens: &[u16], max_len: usize) -> Vec<Word> {
    let mut letters: Vec<Generator> = gens
        .iter()
        .flat_map(|&g| [Generator::pos(g), Generator::neg(g)])
        .collect();
    letters.sort();
    let mut out = vec![Word::empty()];
    let mut layer = vec![Vec::<Generator>::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &g in &letters {
                if w.last().is_some_and(|l| l.cancels(g)) {
                    continue;
                }
                let mut v = w.clone();
                v.push(g);
                next.push(v);
            }
        }
        out.extend(next.iter().map(|v| Word::from(v.clone())));
        layer = next;
    }
    out
}

struct Problem<'a> {
    sys: &'a EquationSystem,
    relators: Vec<Word>,
    /// Occurring variables of each relator.
    vars_of: Vec<Vec<u16>>,
    words: Vec<Word>,
    bound: SearchBound,
}

enum Candidates {
    Free,
    List(Vec<Word>),
}

impl Problem<'_> {
    fn is_var(&self, id: u16) -> bool {
        self.sys.alphabet.is_variable(id)
    }

    fn eval(&self, r: &Word, asg: &Assignment) -> Word {
        substitute(r, |id| self.is_var(id), asg).expect("all variables assigned")
    }

    fn consistent(&self, asg: &Assignment) -> bool {
        self.relators
            .iter()
            .zip(&self.vars_of)
            .filter(|(_, vs)| vs.iter().all(|v| asg.contains_key(v)))
            .all(|(r, _)| self.eval(r, asg).is_empty())
    }

    fn within_cap(&self, asg: &Assignment) -> bool {
        match self.bound.total_cap {
            Some(cap) => asg.values().map(|w| w.len()).sum::<usize>() <= cap,
            None => true,
        }
    }

    /// Values of `v` forced by relator `j` once all its other variables are
    /// assigned.
    fn solve_for(&self, j: usize, v: u16, asg: &Assignment) -> Candidates {
        let mut letters = self.relators[j].letters().to_vec();
        let pos: Vec<usize> = (0..letters.len()).filter(|&i| letters[i].id() == v).collect();
        let seg = |ls: &[Generator]| -> Word {
            self.eval(&Word::from(ls.to_vec()), asg)
        };
        match pos.as_slice() {
            [p] => {
                let e = letters[*p].sign();
                let pre = seg(&letters[..*p]);
                let post = seg(&letters[p + 1..]);
                let val = Word::product([&pre.inverse(), &post.inverse()]);
                Candidates::List(vec![if e < 0 { val.inverse() } else { val }])
            }
            [p1, p2] => {
                let (p1, p2) = (*p1, *p2);
                if letters[p1].sign() == letters[p2].sign() {
                    let n = letters.len();
                    let (p1, p2) = if letters[p1].is_inverse() {
                        letters = letters.iter().rev().map(|g| g.inv()).collect();
                        (n - 1 - p2, n - 1 - p1)
                    } else {
                        (p1, p2)
                    };
                    // v Q v T = 1 with T = S P, so (vQ)^2 = T^-1 Q.
                    let q = seg(&letters[p1 + 1..p2]);
                    let mut sp = letters[p2 + 1..].to_vec();
                    sp.extend_from_slice(&letters[..p1]);
                    let t = seg(&sp);
                    match Word::product([&t.inverse(), &q]).sqrt() {
                        Some(root) => Candidates::List(vec![root.concat(&q.inverse())]),
                        None => Candidates::List(Vec::new()),
                    }
                } else {
                    // Rotate so that the positive occurrence comes first:
                    // v Q v^-1 T = 1.
                    let (a, b) = if letters[p1].is_inverse() { (p2, p1) } else { (p1, p2) };
                    let n = letters.len();
                    let rot: Vec<Generator> = (0..n).map(|i| letters[(a + i) % n]).collect();
                    let b = (b + n - a) % n;
                    let q = seg(&rot[1..b]);
                    let t = seg(&rot[b + 1..]);
                    let m = t.inverse();
                    if q.is_empty() {
                        return if m.is_empty() {
                            Candidates::Free
                        } else {
                            Candidates::List(Vec::new())
                        };
                    }
                    let Some(g) = q.conjugator_to(&m) else {
                        return Candidates::List(Vec::new());
                    };
                    let v0 = g.inverse();
                    let (r, _) = q.root();
                    let span = (self.bound.max_len + v0.len() + 1) as i64;
                    let mut out: Vec<Word> = (-span..=span)
                        .map(|k| v0.concat(&r.pow(k)))
                        .filter(|w| w.len() <= self.bound.max_len)
                        .collect();
                    out.sort();
                    out.dedup();
                    Candidates::List(out)
                }
            }
            _ => Candidates::Free,
        }
    }

    fn search<F: FnMut(&Assignment) -> bool>(&self, asg: &mut Assignment, remaining: &[u16], emit: &mut F) -> bool {
        if remaining.is_empty() {
            if self.consistent(asg) && self.within_cap(asg) {
                return emit(asg);
            }
            return true;
        }
        // Prefer a variable that some relator pins down.
        let mut forced: Option<(usize, u16)> = None;
        for (j, vs) in self.vars_of.iter().enumerate() {
            let open: Vec<u16> = vs.iter().copied().filter(|v| !asg.contains_key(v)).collect();
            if let [v] = open.as_slice() {
                forced = Some((j, *v));
                break;
            }
        }
        let (v, cands) = match forced {
            Some((j, v)) => (v, self.solve_for(j, v, asg)),
            None => (remaining[0], Candidates::Free),
        };
        let rest: Vec<u16> = remaining.iter().copied().filter(|&u| u != v).collect();
        let list: Vec<Word> = match cands {
            Candidates::Free => self.words.clone(),
            Candidates::List(l) => l
                .into_iter()
                .filter(|w| w.len() <= self.bound.max_len)
                .collect(),
        };
        for w in list {
            asg.insert(v, w);
            if self.consistent(asg) && self.within_cap(asg) && !self.search(asg, &rest, emit) {
                asg.remove(&v);
                return false;
            }
        }
        asg.remove(&v);
        true
    }
}

fn problem(sys: &EquationSystem, bound: SearchBound) -> Problem<'_> {
    let relators = sys.relators();
    let vars_of = relators
        .iter()
        .map(|r| {
            let mut vs: Vec<u16> = r
                .letters()
                .iter()
                .map(|g| g.id())
                .filter(|&id| sys.alphabet.is_variable(id))
                .collect();
            vs.sort_unstable();
            vs.dedup();
            vs
        })
        .collect();
    Problem {
        sys,
        relators,
        vars_of,
        words: words_up_to(&sys.alphabet.constants(), bound.max_len),
        bound,
    }
}

fn occurring(sys: &EquationSystem) -> Vec<u16> {
    let mut vs: Vec<u16> = sys
        .relators()
        .iter()
        .flat_map(|r| r.letters().iter().map(|g| g.id()).collect::<Vec<_>>())
        .filter(|&id| sys.alphabet.is_variable(id))
        .collect();
    vs.sort_unstable();
    vs.dedup();
    vs
}

/// Orders assignments variable by variable, each value in shortlex order.
pub fn compare_assignments(a: &Assignment, b: &Assignment) -> Ordering {
    a.iter().cmp(b.iter())
}

/// Every solution with all occurring variables of length at most the bound,
/// sorted and duplicate-free.
pub fn enumerate_solutions(sys: &EquationSystem, bound: SearchBound) -> Vec<Assignment> {
    let p = problem(sys, bound);
    let vars = occurring(sys);
    let mut out: Vec<Assignment> = if let Some((&first, rest)) = vars.split_first() {
        p.words
            .par_iter()
            .flat_map_iter(|w| {
                let mut asg = Assignment::new();
                asg.insert(first, w.clone());
                let mut found = Vec::new();
                if p.consistent(&asg) {
                    p.search(&mut asg, rest, &mut |a| {
                        found.push(a.clone());
                        true
                    });
                }
                found
            })
            .collect()
    } else {
        let mut found = Vec::new();
        p.search(&mut Assignment::new(), &[], &mut |a| {
            found.push(a.clone());
            true
        });
        found
    };
    out.sort_by(compare_assignments);
    out.dedup();
    out
}

/// Some solution within the bound, if any.
pub fn find_solution(sys: &EquationSystem, bound: SearchBound) -> Option<Assignment> {
    let p = problem(sys, bound);
    let vars = occurring(sys);
    let mut hit = None;
    p.search(&mut Assignment::new(), &vars, &mut |a| {
        hit = Some(a.clone());
        false
    });
    hit
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinStats {
    /// Least `m` such that some solution has every variable of length `<= m`.
    pub max_len: usize,
    pub witness: Assignment,
}

/// The least per-variable length admitting a solution, searched up to the bound.
pub fn min_solution_stats(sys: &EquationSystem, bound: SearchBound) -> Result<MinStats, OracleError> {
    for m in 0..=bound.max_len {
        let b = SearchBound {
            max_len: m,
            total_cap: bound.total_cap,
        };
        if let Some(witness) = find_solution(sys, b) {
            return Ok(MinStats { max_len: m, witness });
        }
    }
    Err(OracleError::NoSolution(bound.max_len))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(t: &str) -> EquationSystem {
        EquationSystem::parse(t).unwrap()
    }

    #[test]
    fn word_counts() {
        assert_eq!(words_up_to(&[0, 1], 3).len(), 1 + 4 + 12 + 36);
        let ws = words_up_to(&[0, 1], 2);
        assert!(ws.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn centralizer_example() {
        let s = sys("gens: a b\nvars: x\nx a x^-1 = a\n");
        let sols = enumerate_solutions(&s, SearchBound::new(1));
        let shown: Vec<String> = sols
            .iter()
            .map(|a| s.alphabet.show(a.values().next().unwrap()))
            .collect();
        assert_eq!(shown, ["1", "a", "a^-1"]);
    }

    #[test]
    fn no_square_root() {
        let s = sys("gens: a b\nvars: x\nx^2 = a\n");
        assert!(enumerate_solutions(&s, SearchBound::new(5)).is_empty());
    }

    #[test]
    fn commutator_solutions() {
        let s = sys("gens: a b\nvars: x y\n[x,y] [a,b] = 1\n");
        let sols = enumerate_solutions(&s, SearchBound::new(1));
        let (x, y) = (s.alphabet.lookup("x").unwrap(), s.alphabet.lookup("y").unwrap());
        let b = s.alphabet.parse_word("b").unwrap();
        let a = s.alphabet.parse_word("a").unwrap();
        assert!(sols.iter().any(|m| m[&x] == b && m[&y] == a));
        assert!(sols.iter().all(|m| s.is_solution(m)));
        assert!(sols.windows(2).all(|p| compare_assignments(&p[0], &p[1]) == Ordering::Less));
    }

    #[test]
    fn min_stats() {
        let s = sys("gens: a b\nvars: x y\n[x,y] [a,b] = 1\n");
        assert_eq!(min_solution_stats(&s, SearchBound::new(3)).unwrap().max_len, 1);
        let s = sys("gens: a b\nvars: x\nx = a\n");
        assert_eq!(min_solution_stats(&s, SearchBound::new(3)).unwrap().max_len, 1);
        let s = sys("gens: a b\nvars: x\nx^2 a^2 = 1\n");
        let st = min_solution_stats(&s, SearchBound::new(3)).unwrap();
        assert_eq!(st.max_len, 1);
        let x = s.alphabet.lookup("x").unwrap();
        assert_eq!(s.alphabet.show(&st.witness[&x]), "a^-1");
        let s = sys("gens: a b\nvars: x\nx^2 = a\n");
        assert!(min_solution_stats(&s, SearchBound::new(3)).is_err());
    }

    #[test]
    fn doubling_bound_keeps_solutions() {
        let s = sys("gens: a b\nvars: x y\nx y x^-1 y^-1 = 1\n");
        let small = enumerate_solutions(&s, SearchBound::new(1));
        let large = enumerate_solutions(&s, SearchBound::new(2));
        assert!(small.iter().all(|a| large.contains(a)));
    }
}
