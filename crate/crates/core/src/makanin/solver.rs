//! Exact decision procedure for quadratic systems.
//!
//! The system is triangulated and every relator `z_1 ... z_n = 1` is replaced
//! by legs `L_1 .. L_n` with `z_k = L_k · bar(L_{k+1})` (indices mod n). In a
//! free group every geodesic triangle is a tripod, so the system is solvable
//! iff the resulting system of word equations in the free monoid with
//! involution is solvable. That system is quadratic in the legs and is decided
//! by leading-letter transformations (the entire transformation of the
//! associated generalized equation read as word equations). None of the
//! transformations lengthen the system, so the reachable state space is finite
//! and exhausting it proves unsolvability.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::hash::{Hash, Hasher};

use serde::Serialize;
use thiserror::Error;

use crate::freewords::{reduce, Generator, Word};
use crate::intlin::solvable_over_z;
use crate::quadratic::{triangulate, Assignment, EquationSystem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("system is not quadratic: variable '{0}' occurs {1} times")]
    NotQuadratic(String, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// A witness was found and verified.
    Sat,
    /// The whole transformation graph was explored without reaching a solution.
    Unsat,
    /// The state budget ran out first.
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Per-variable length bound recorded in reports; `None` means the
    /// theoretical bound.
    pub bound: Option<u64>,
    /// Maximum number of distinct states explored.
    pub max_states: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            bound: None,
            max_states: 400_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub verdict: Verdict,
    pub witness: Option<Assignment>,
    pub states: usize,
    /// Total length of the constants occurring in the system.
    pub coefficient_length: usize,
    pub orientable: bool,
    /// `2s` for orientable systems, `12 s^4` otherwise.
    pub theoretical_bound: u64,
    pub bound_used: u64,
}

impl SolveResult {
    pub fn max_witness_length(&self) -> Option<usize> {
        self.witness
            .as_ref()
            .map(|w| w.values().map(|v| v.len()).max().unwrap_or(0))
    }
}

/// Orientable iff no variable occurs twice with the same exponent sign.
pub fn system_is_orientable(sys: &EquationSystem) -> bool {
    let mut signs: HashMap<u16, i32> = HashMap::new();
    for eq in &sys.equations {
        for g in eq.lhs.letters() {
            if sys.alphabet.is_variable(g.id()) {
                *signs.entry(g.id()).or_insert(0) += g.sign() as i32;
            }
        }
        for g in eq.rhs.letters() {
            if sys.alphabet.is_variable(g.id()) {
                *signs.entry(g.id()).or_insert(0) -= g.sign() as i32;
            }
        }
    }
    signs.values().all(|&s| s == 0)
}

pub fn coefficient_length(sys: &EquationSystem) -> usize {
    sys.relators()
        .iter()
        .map(|r| {
            r.letters()
                .iter()
                .filter(|g| !sys.alphabet.is_variable(g.id()))
                .count()
        })
        .sum()
}

pub fn theoretical_bound(s: usize, orientable: bool) -> u64 {
    let s = s as u64;
    if orientable {
        2 * s
    } else {
        12 * s.pow(4)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
enum Sym {
    C(Generator),
    V(u32, bool),
}

fn bar(s: Sym) -> Sym {
    match s {
        Sym::C(g) => Sym::C(g.inv()),
        Sym::V(x, b) => Sym::V(x, !b),
    }
}

fn bar_side(side: &[Sym]) -> Vec<Sym> {
    side.iter().rev().map(|&s| bar(s)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct WordEq {
    l: Vec<Sym>,
    r: Vec<Sym>,
}

#[derive(Clone, Debug)]
enum Step {
    Erase(u32),
    Flip(u32),
    /// `x := t`
    Full(u32, Sym),
    /// `x := t x`
    Prefix(u32, Sym),
}

fn expand(side: &[Sym], step: &Step) -> Vec<Sym> {
    let mut out = Vec::with_capacity(side.len() + 1);
    for &s in side {
        match (s, step) {
            (Sym::V(x, _), Step::Erase(y)) if x == *y => {}
            (Sym::V(x, b), Step::Flip(y)) if x == *y => out.push(Sym::V(x, !b)),
            (Sym::V(x, b), Step::Full(y, t)) if x == *y => out.push(if b { bar(*t) } else { *t }),
            (Sym::V(x, b), Step::Prefix(y, t)) if x == *y => {
                if b {
                    out.push(s);
                    out.push(bar(*t));
                } else {
                    out.push(*t);
                    out.push(s);
                }
            }
            _ => out.push(s),
        }
    }
    out
}

#[derive(Clone, Debug)]
struct State {
    eqs: Vec<WordEq>,
}

impl State {
    fn apply(&mut self, step: &Step) {
        for eq in &mut self.eqs {
            eq.l = expand(&eq.l, step);
            eq.r = expand(&eq.r, step);
        }
    }

    fn count(&self, x: u32) -> usize {
        self.eqs
            .iter()
            .flat_map(|e| e.l.iter().chain(e.r.iter()))
            .filter(|s| matches!(s, Sym::V(y, _) if *y == x))
            .count()
    }

    /// Cancels equal heads and tails, resolves empty sides and drops solved
    /// equations. Returns `false` on a contradiction.
    fn normalize(&mut self, steps: &mut Vec<Step>) -> bool {
        'outer: loop {
            let mut i = 0;
            while i < self.eqs.len() {
                loop {
                    let heads = (self.eqs[i].l.first().copied(), self.eqs[i].r.first().copied());
                    match heads {
                        (Some(Sym::C(a)), Some(Sym::C(b))) => {
                            if a != b {
                                return false;
                            }
                            self.eqs[i].l.remove(0);
                            self.eqs[i].r.remove(0);
                        }
                        (Some(Sym::V(x, bx)), Some(Sym::V(y, by))) if x == y => {
                            if bx != by && self.count(x) > 2 {
                                break;
                            }
                            self.eqs[i].l.remove(0);
                            self.eqs[i].r.remove(0);
                            // When these were the only occurrences (x u = x v or
                            // x u = bar(x) v), setting x = 1 loses nothing.
                            if self.count(x) == 0 {
                                steps.push(Step::Erase(x));
                            }
                        }
                        _ => break,
                    }
                }
                loop {
                    let heads = (self.eqs[i].l.last().copied(), self.eqs[i].r.last().copied());
                    match heads {
                        (Some(Sym::C(a)), Some(Sym::C(b))) => {
                            if a != b {
                                return false;
                            }
                            self.eqs[i].l.pop();
                            self.eqs[i].r.pop();
                        }
                        (Some(Sym::V(x, bx)), Some(Sym::V(y, by))) if x == y => {
                            if bx != by && self.count(x) > 2 {
                                break;
                            }
                            self.eqs[i].l.pop();
                            self.eqs[i].r.pop();
                            if self.count(x) == 0 {
                                steps.push(Step::Erase(x));
                            }
                        }
                        _ => break,
                    }
                }
                let eq = &self.eqs[i];
                if eq.l.is_empty() || eq.r.is_empty() {
                    let other = if eq.l.is_empty() { &eq.r } else { &eq.l };
                    let mut vars = Vec::new();
                    for s in other {
                        match s {
                            Sym::C(_) => return false,
                            Sym::V(x, _) => vars.push(*x),
                        }
                    }
                    self.eqs.remove(i);
                    if vars.is_empty() {
                        continue;
                    }
                    vars.sort_unstable();
                    vars.dedup();
                    for x in vars {
                        let st = Step::Erase(x);
                        self.apply(&st);
                        steps.push(st);
                    }
                    continue 'outer;
                }
                if !self.lengths_compatible(i) {
                    return false;
                }
                i += 1;
            }
            return true;
        }
    }

    /// A side made only of constants cannot equal a longer side, and a side
    /// with more constants than the other side's total length is impossible
    /// when that side has no variables.
    fn lengths_compatible(&self, i: usize) -> bool {
        let eq = &self.eqs[i];
        let consts = |s: &[Sym]| s.iter().filter(|x| matches!(x, Sym::C(_))).count();
        let (cl, cr) = (consts(&eq.l), consts(&eq.r));
        let (vl, vr) = (eq.l.len() - cl, eq.r.len() - cr);
        !((vl == 0 && cl < cr) || (vr == 0 && cr < cl))
    }

    /// The abelianized system must be solvable over the integers.
    fn abelian_ok(&self) -> bool {
        let mut vars: Vec<u32> = Vec::new();
        let mut gens: Vec<u16> = Vec::new();
        for e in &self.eqs {
            for s in e.l.iter().chain(&e.r) {
                match s {
                    Sym::V(x, _) => vars.push(*x),
                    Sym::C(g) => gens.push(g.id()),
                }
            }
        }
        vars.sort_unstable();
        vars.dedup();
        gens.sort_unstable();
        gens.dedup();
        let col = |x: u32| vars.binary_search(&x).expect("collected");
        let mut a = vec![vec![0i64; vars.len()]; self.eqs.len()];
        let mut b = vec![vec![0i64; self.eqs.len()]; gens.len()];
        for (i, e) in self.eqs.iter().enumerate() {
            for (side, dir) in [(&e.l, 1i64), (&e.r, -1i64)] {
                for s in side.iter() {
                    match *s {
                        Sym::V(x, bx) => a[i][col(x)] += if bx { -dir } else { dir },
                        Sym::C(g) => {
                            let k = gens.binary_search(&g.id()).expect("collected");
                            b[k][i] -= dir * g.sign() as i64;
                        }
                    }
                }
            }
        }
        b.iter().all(|rhs| solvable_over_z(&a, rhs))
    }

    /// A structural hash invariant under renaming and reorienting variables
    /// and under reordering equations and swapping their sides.
    fn canonical_hash(&self) -> (u64, u64) {
        let shape = |side: &[Sym]| -> Vec<u32> {
            side.iter()
                .map(|s| match s {
                    Sym::C(g) => 2 * g.id() as u32 + g.is_inverse() as u32,
                    Sym::V(..) => u32::MAX,
                })
                .collect()
        };
        let mut keyed: Vec<(Vec<u32>, Vec<u32>, usize, bool)> = self
            .eqs
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let (a, b) = (shape(&e.l), shape(&e.r));
                if a <= b {
                    (a, b, i, false)
                } else {
                    (b, a, i, true)
                }
            })
            .collect();
        keyed.sort();
        let mut rename: HashMap<u32, (u32, bool)> = HashMap::new();
        let mut code: Vec<u32> = Vec::new();
        for (_, _, i, swapped) in &keyed {
            let e = &self.eqs[*i];
            let (a, b) = if *swapped { (&e.r, &e.l) } else { (&e.l, &e.r) };
            for side in [a, b] {
                for s in side.iter() {
                    match *s {
                        Sym::C(g) => code.push(2 * g.id() as u32 + g.is_inverse() as u32),
                        Sym::V(x, bx) => {
                            let n = rename.len() as u32;
                            let (r, flip) = *rename.entry(x).or_insert((n, bx));
                            code.push((1 << 24) + 2 * r + (bx != flip) as u32);
                        }
                    }
                }
                code.push(u32::MAX);
            }
            code.push(u32::MAX - 1);
        }
        let mut h1 = DefaultHasher::new();
        code.hash(&mut h1);
        let mut h2 = DefaultHasher::new();
        0xa5a5_u32.hash(&mut h2);
        code.hash(&mut h2);
        code.len().hash(&mut h2);
        (h1.finish(), h2.finish())
    }

    /// The next branching point: the equation whose leading letters give the
    /// fewest alternatives.
    fn branches(&mut self) -> Vec<(usize, Vec<Step>)> {
        let cost = |a: Sym, b: Sym| match (a, b) {
            (Sym::V(..), Sym::V(..)) => 5,
            _ => 2,
        };
        // (equation, reversed, cost); a reversed equation is read through bar().
        let mut best: Option<(usize, bool, usize)> = None;
        for (i, e) in self.eqs.iter().enumerate() {
            let head = cost(e.l[0], e.r[0]);
            let tail = cost(*e.l.last().expect("non-empty"), *e.r.last().expect("non-empty"));
            for (rev, n) in [(false, head), (true, tail)] {
                if best.is_none_or(|(_, _, m)| n < m) {
                    best = Some((i, rev, n));
                }
            }
        }
        let (i, rev, _) = best.expect("non-empty system");
        if rev {
            let e = &mut self.eqs[i];
            e.l = bar_side(&e.l);
            e.r = bar_side(&e.r);
        }
        if matches!(self.eqs[i].l[0], Sym::C(_)) {
            let e = &mut self.eqs[i];
            std::mem::swap(&mut e.l, &mut e.r);
        }
        let mut pre = Vec::new();
        for side in [true, false] {
            let e = &self.eqs[i];
            let head = if side { e.l[0] } else { e.r[0] };
            if let Sym::V(x, true) = head {
                let st = Step::Flip(x);
                self.apply(&st);
                pre.push(st);
            }
        }
        let e = &self.eqs[i];
        let with = |s: Step| {
            let mut v = pre.clone();
            v.push(s);
            (i, v)
        };
        match (e.l[0], e.r[0]) {
            (Sym::V(x, _), Sym::C(a)) => vec![
                with(Step::Erase(x)),
                with(Step::Prefix(x, Sym::C(a))),
            ],
            (Sym::V(x, _), Sym::V(y, _)) => vec![
                with(Step::Erase(x)),
                with(Step::Erase(y)),
                with(Step::Full(x, Sym::V(y, false))),
                with(Step::Prefix(x, Sym::V(y, false))),
                with(Step::Prefix(y, Sym::V(x, false))),
            ],
            _ => unreachable!("normalized heads"),
        }
    }
}

struct Node {
    parent: usize,
    steps: Vec<Step>,
}

enum Search {
    Found(Vec<Step>),
    Exhausted,
    Budget,
}

fn search(root: State, root_steps: Vec<Step>, max_states: usize, explored: &mut usize) -> Search {
    let mut arena = vec![Node {
        parent: usize::MAX,
        steps: root_steps,
    }];
    let mut stack = vec![(root, 0usize)];
    let mut seen: HashSet<(u64, u64)> = HashSet::new();
    while let Some((mut state, node)) = stack.pop() {
        if state.eqs.is_empty() {
            let mut chain = Vec::new();
            let mut n = node;
            while n != usize::MAX {
                chain.push(n);
                n = arena[n].parent;
            }
            let steps = chain
                .into_iter()
                .rev()
                .flat_map(|n| arena[n].steps.clone())
                .collect();
            return Search::Found(steps);
        }
        if !seen.insert(state.canonical_hash()) {
            continue;
        }
        *explored += 1;
        if *explored > max_states {
            return Search::Budget;
        }
        let branches = state.branches();
        let mut children = Vec::new();
        for (i, steps) in branches {
            let mut child = state.clone();
            let mut taken = Vec::new();
            for st in &steps {
                if !matches!(st, Step::Flip(_)) {
                    child.apply(st);
                }
                taken.push(st.clone());
            }
            if !matches!(steps.last(), Some(Step::Erase(_))) {
                let e = &mut child.eqs[i];
                debug_assert_eq!(e.l[0], e.r[0]);
                e.l.remove(0);
                e.r.remove(0);
            }
            if child.normalize(&mut taken) && child.abelian_ok() {
                arena.push(Node {
                    parent: node,
                    steps: taken,
                });
                children.push((child, arena.len() - 1));
            }
        }
        while let Some(c) = children.pop() {
            stack.push(c);
        }
    }
    Search::Exhausted
}

fn bar_word(w: &[Generator]) -> Vec<Generator> {
    w.iter().rev().map(|g| g.inv()).collect()
}

fn unwind(steps: &[Step]) -> HashMap<u32, Vec<Generator>> {
    let mut vals: HashMap<u32, Vec<Generator>> = HashMap::new();
    let value = |vals: &HashMap<u32, Vec<Generator>>, t: Sym| -> Vec<Generator> {
        match t {
            Sym::C(g) => vec![g],
            Sym::V(y, b) => {
                let v = vals.get(&y).cloned().unwrap_or_default();
                if b {
                    bar_word(&v)
                } else {
                    v
                }
            }
        }
    };
    for st in steps.iter().rev() {
        match *st {
            Step::Erase(x) => {
                vals.insert(x, Vec::new());
            }
            Step::Flip(x) => {
                let v = vals.get(&x).cloned().unwrap_or_default();
                vals.insert(x, bar_word(&v));
            }
            Step::Full(x, t) => {
                let v = value(&vals, t);
                vals.insert(x, v);
            }
            Step::Prefix(x, t) => {
                let mut v = value(&vals, t);
                v.extend(vals.get(&x).cloned().unwrap_or_default());
                vals.insert(x, v);
            }
        }
    }
    vals
}

/// One letter occurrence of the triangulated system: relator, position, and
/// the relator's length.
type Occurrence = (usize, usize, usize);

/// Decides a quadratic system.
pub fn solve_quadratic(sys: &EquationSystem, opts: &SolveOptions) -> Result<SolveResult, SolveError> {
    if let Some((v, c)) = sys.occurrences().into_iter().find(|&(_, c)| c != 2) {
        return Err(SolveError::NotQuadratic(sys.alphabet.name(v).to_string(), c));
    }
    let s = coefficient_length(sys);
    let orientable = system_is_orientable(sys);
    let tbound = theoretical_bound(s, orientable);
    let bound_used = opts.bound.unwrap_or(tbound);

    let tri = triangulate(sys);
    let tsys = &tri.system;
    let relators: Vec<Word> = tsys.relators();

    // Leg ids: relator j, position k -> legs[j] + k.
    let mut legs = Vec::with_capacity(relators.len());
    let mut next = 0u32;
    for r in &relators {
        legs.push(next);
        next += r.len() as u32;
    }
    let side = |j: usize, k: usize| -> Vec<Sym> {
        let n = relators[j].len();
        vec![
            Sym::V(legs[j] + k as u32, false),
            Sym::V(legs[j] + ((k + 1) % n) as u32, true),
        ]
    };

    let mut occ: BTreeMap<u16, Vec<(Occurrence, i8)>> = BTreeMap::new();
    let mut eqs = Vec::new();
    for (j, r) in relators.iter().enumerate() {
        for (k, g) in r.letters().iter().enumerate() {
            if tsys.alphabet.is_variable(g.id()) {
                occ.entry(g.id()).or_default().push(((j, k, r.len()), g.sign()));
            } else {
                eqs.push(WordEq {
                    l: side(j, k),
                    r: vec![Sym::C(*g)],
                });
            }
        }
    }
    for list in occ.values() {
        match list.as_slice() {
            [((j1, k1, _), e1), ((j2, k2, _), e2)] => {
                let a = side(*j1, *k1);
                let b = side(*j2, *k2);
                let b = if e1 == e2 { b } else { bar_side(&b) };
                eqs.push(WordEq { l: a, r: b });
            }
            other => {
                // Cancellation inside a relator removes both occurrences, so a
                // quadratic input only ever yields two or zero here.
                debug_assert!(other.is_empty());
            }
        }
    }

    let mut root = State { eqs };
    let mut root_steps = Vec::new();
    let mut explored = 0usize;
    let outcome = if root.normalize(&mut root_steps) && root.abelian_ok() {
        search(root, root_steps, opts.max_states, &mut explored)
    } else {
        Search::Exhausted
    };

    let (verdict, witness) = match outcome {
        Search::Found(steps) => {
            let vals = unwind(&steps);
            let leg = |id: u32| -> Vec<Generator> { vals.get(&id).cloned().unwrap_or_default() };
            let mut asg = Assignment::new();
            for (&v, list) in &occ {
                let ((j, k, n), e) = list[0];
                let mut raw = leg(legs[j] + k as u32);
                raw.extend(bar_word(&leg(legs[j] + ((k + 1) % n) as u32)));
                let w = reduce(raw);
                asg.insert(v, if e < 0 { w.inverse() } else { w });
            }
            let mut asg = tri.project(&asg);
            for v in sys.alphabet.variables() {
                asg.entry(v).or_insert_with(Word::empty);
            }
            assert!(sys.is_solution(&asg), "reconstructed witness fails verification");
            (Verdict::Sat, Some(asg))
        }
        Search::Exhausted => (Verdict::Unsat, None),
        Search::Budget => (Verdict::Inconclusive, None),
    };
    Ok(SolveResult {
        verdict,
        witness,
        states: explored,
        coefficient_length: s,
        orientable,
        theoretical_bound: tbound,
        bound_used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(text: &str) -> SolveResult {
        let sys = EquationSystem::parse(text).unwrap();
        solve_quadratic(&sys, &SolveOptions::default()).unwrap()
    }

    #[test]
    fn square_root() {
        let r = solve("gens: a b\nvars: x\nx^2 = (a b)^2\n");
        assert_eq!(r.verdict, Verdict::Sat);
        let sys = EquationSystem::parse("gens: a b\nvars: x\nx^2 = (a b)^2\n").unwrap();
        let x = sys.alphabet.lookup("x").unwrap();
        assert_eq!(sys.alphabet.show(&r.witness.unwrap()[&x]), "a b");
    }

    #[test]
    fn commutator_equation() {
        let r = solve("gens: a b\nvars: x y\n[x,y] = [a,b]\n");
        assert_eq!(r.verdict, Verdict::Sat);
        assert!(r.orientable);
    }

    #[test]
    fn non_square() {
        let r = solve("gens: a b\nvars: x\nx^2 = a\n");
        assert_eq!(r.verdict, Verdict::Unsat);
        assert!(!r.orientable);
        assert_eq!(r.theoretical_bound, 12);
    }

    #[test]
    fn conjugacy() {
        assert_eq!(solve("gens: a b\nvars: x\nx^-1 a x = b a b^-1\n").verdict, Verdict::Sat);
        assert_eq!(solve("gens: a b\nvars: x\nx^-1 a x = b\n").verdict, Verdict::Unsat);
        assert_eq!(solve("gens: a b\nvars: x y\n[x,y] = a\n").verdict, Verdict::Unsat);
    }

    #[test]
    fn systems() {
        let r = solve("gens: a b\nvars: x y z\nx y = a b\ny x = b a\n");
        assert_eq!(r.verdict, Verdict::Sat);
        let r = solve("gens: a b\nvars: x y\nx y = 1\nx^-1 a y^-1 = b\n");
        assert_eq!(r.verdict, Verdict::Unsat);
        assert_eq!(solve("gens: a\nvars: x\nx = x\n").verdict, Verdict::Sat);
        assert_eq!(solve("gens: a\n").verdict, Verdict::Sat);
    }

    #[test]
    fn rejects_non_quadratic() {
        let sys = EquationSystem::parse("gens: a\nvars: x\nx^3 = a\n").unwrap();
        assert!(solve_quadratic(&sys, &SolveOptions::default()).is_err());
    }
}
