//! Combinatorial generalized equations.
//!
//! Boundaries are `1..=s`; item `h_i` sits between boundaries `i` and `i+1`.
//! Items `1..=rho` form the active section, the rest hold constants. A base
//! runs from `alpha` to `beta`; `alpha > beta` means it is read backwards and
//! stands for the inverse of its items.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::freewords::{reduce, tripod_legs, Generator, Word};
use crate::quadratic::{triangulate, Assignment, Equation, EquationSystem};
use crate::symbols::Alphabet;

pub type BaseId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Label {
    Dual(BaseId),
    /// A constant base; `None` pins its item to the empty word.
    Constant(Option<Generator>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Base {
    pub alpha: u32,
    pub beta: u32,
    pub label: Label,
}

impl Base {
    pub fn lo(&self) -> u32 {
        self.alpha.min(self.beta)
    }
    pub fn hi(&self) -> u32 {
        self.alpha.max(self.beta)
    }
    pub fn epsilon(&self) -> i8 {
        if self.alpha < self.beta {
            1
        } else {
            -1
        }
    }
    pub fn covers_item(&self, i: u32) -> bool {
        self.lo() <= i && i < self.hi()
    }
    pub fn on(&self, p: u32) -> bool {
        self.lo() <= p && p <= self.hi()
    }
    pub fn internal(&self, p: u32) -> bool {
        self.lo() < p && p < self.hi()
    }
    pub fn is_constant(&self) -> bool {
        matches!(self.label, Label::Constant(_))
    }
    pub fn dual(&self) -> Option<BaseId> {
        match self.label {
            Label::Dual(d) => Some(d),
            Label::Constant(_) => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenEqError {
    #[error("base {0} does not exist")]
    NoBase(BaseId),
    #[error("base {0} is constant")]
    ConstantBase(BaseId),
    #[error("condition failed: {0}")]
    Condition(&'static str),
    #[error("solution has {got} items, expected {expected}")]
    SolutionShape { expected: usize, got: usize },
    #[error("solution is not graphical on base {0}")]
    NotGraphical(BaseId),
    #[error("trace line {line}: {message}")]
    Trace { line: usize, message: String },
    #[error("system must be triangular: equation {0} has length {1}")]
    NotTriangular(usize, usize),
    #[error("assignment does not solve the system")]
    NotASolution,
}

/// A combinatorial generalized equation with its boundary connections.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GenEq {
    /// Number of boundaries `s`.
    pub boundaries: u32,
    /// Last item of the active section.
    pub rho: u32,
    pub bases: BTreeMap<BaseId, Base>,
    /// `(p, mu, q)`: boundary `p` on `mu` corresponds to `q` on its dual.
    /// Stored for both bases of a pair.
    pub connections: BTreeSet<(u32, BaseId, u32)>,
    pub next_id: BaseId,
}

/// Item values; `items[i - 1]` is `h_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GenEqSolution(pub Vec<Word>);

impl GenEq {
    pub fn items(&self) -> u32 {
        self.boundaries.saturating_sub(1)
    }

    pub fn base(&self, id: BaseId) -> Result<&Base, GenEqError> {
        self.bases.get(&id).ok_or(GenEqError::NoBase(id))
    }

    pub fn dual_of(&self, id: BaseId) -> Result<BaseId, GenEqError> {
        self.base(id)?.dual().ok_or(GenEqError::ConstantBase(id))
    }

    pub fn add_pair(&mut self, a: (u32, u32), b: (u32, u32)) -> (BaseId, BaseId) {
        let (x, y) = (self.next_id, self.next_id + 1);
        self.next_id += 2;
        self.bases.insert(
            x,
            Base {
                alpha: a.0,
                beta: a.1,
                label: Label::Dual(y),
            },
        );
        self.bases.insert(
            y,
            Base {
                alpha: b.0,
                beta: b.1,
                label: Label::Dual(x),
            },
        );
        (x, y)
    }

    pub fn add_constant(&mut self, item: u32, label: Option<Generator>) -> BaseId {
        let id = self.next_id;
        self.next_id += 1;
        self.bases.insert(
            id,
            Base {
                alpha: item,
                beta: item + 1,
                label: Label::Constant(label),
            },
        );
        id
    }

    pub fn connect(&mut self, p: u32, mu: BaseId, q: u32) -> Result<(), GenEqError> {
        let d = self.dual_of(mu)?;
        self.connections.insert((p, mu, q));
        self.connections.insert((q, d, p));
        Ok(())
    }

    pub fn is_tied(&self, p: u32, mu: BaseId) -> Option<u32> {
        self.connections
            .range((p, mu, 0)..=(p, mu, u32::MAX))
            .next()
            .map(|c| c.2)
    }

    /// Removes a base pair and every connection on it.
    pub fn remove_pair(&mut self, id: BaseId) -> Result<(), GenEqError> {
        let d = self.dual_of(id)?;
        self.bases.remove(&id);
        self.bases.remove(&d);
        self.connections.retain(|c| c.1 != id && c.1 != d);
        Ok(())
    }

    /// Applies a boundary renaming to bases and connections.
    pub fn rename_boundaries<F: Fn(u32) -> u32>(&mut self, f: F) {
        for b in self.bases.values_mut() {
            b.alpha = f(b.alpha);
            b.beta = f(b.beta);
        }
        self.connections = self.connections.iter().map(|&(p, m, q)| (f(p), m, f(q))).collect();
    }

    /// Number of non-constant bases covering item `i`.
    pub fn gamma(&self, i: u32) -> usize {
        self.bases
            .values()
            .filter(|b| !b.is_constant() && b.covers_item(i))
            .count()
    }

    pub fn non_constant_bases(&self) -> usize {
        self.bases.values().filter(|b| !b.is_constant()).count()
    }

    /// Every item is covered by at most two non-constant bases.
    pub fn is_quadratic(&self) -> bool {
        (1..=self.items()).all(|i| self.gamma(i) <= 2)
    }

    /// Structural form with base ids and connections erased, for repetition checks.
    pub fn canonical(&self) -> String {
        let ids: Vec<BaseId> = self.bases.keys().copied().collect();
        let mut pairs: Vec<String> = Vec::new();
        let mut consts: Vec<String> = Vec::new();
        for id in &ids {
            let b = self.bases[id];
            match b.label {
                Label::Dual(d) if d > *id => {
                    let o = self.bases[&d];
                    let mut e = [(b.alpha, b.beta), (o.alpha, o.beta)];
                    e.sort_unstable();
                    pairs.push(format!("{:?}", e));
                }
                Label::Dual(_) => {}
                Label::Constant(l) => consts.push(format!("{}{:?}", b.alpha, l.map(|g| (g.id(), g.sign())))),
            }
        }
        pairs.sort();
        consts.sort();
        format!("{}|{}|{}|{}", self.boundaries, self.rho, pairs.join(","), consts.join(","))
    }

    /// Reading of a base under a solution, with the check that no
    /// cancellation happens between its items.
    pub fn read(&self, sol: &GenEqSolution, id: BaseId) -> Result<Word, GenEqError> {
        let b = self.base(id)?;
        let letters: Vec<Generator> = (b.lo()..b.hi())
            .flat_map(|i| sol.0[(i - 1) as usize].letters().to_vec())
            .collect();
        let w = reduce(letters.iter().copied());
        if w.len() != letters.len() {
            return Err(GenEqError::NotGraphical(id));
        }
        Ok(if b.epsilon() < 0 { w.inverse() } else { w })
    }

    /// Every basic and constant equation holds in the free group.
    pub fn is_solution(&self, sol: &GenEqSolution) -> bool {
        if sol.0.len() != self.items() as usize {
            return false;
        }
        let product = |b: &Base| -> Word {
            let w = reduce((b.lo()..b.hi()).flat_map(|i| sol.0[(i - 1) as usize].letters().to_vec()));
            if b.epsilon() < 0 {
                w.inverse()
            } else {
                w
            }
        };
        self.bases.iter().all(|(&id, b)| match b.label {
            Label::Dual(d) => d < id || product(b) == product(&self.bases[&d]),
            Label::Constant(l) => product(b) == l.map(Word::generator).unwrap_or_default(),
        })
    }

    /// Checks `is_solution` and that every base reads without cancellation.
    pub fn is_graphical_solution(&self, sol: &GenEqSolution) -> Result<(), GenEqError> {
        if sol.0.len() != self.items() as usize {
            return Err(GenEqError::SolutionShape {
                expected: self.items() as usize,
                got: sol.0.len(),
            });
        }
        for &id in self.bases.keys() {
            self.read(sol, id)?;
        }
        if self.is_solution(sol) {
            Ok(())
        } else {
            Err(GenEqError::NotASolution)
        }
    }

    /// Graphical solution that also respects every boundary connection.
    pub fn satisfies(&self, sol: &GenEqSolution) -> bool {
        self.is_graphical_solution(sol).is_ok()
            && self.connections.iter().all(|&(p, m, q)| {
                let d = match self.dual_of(m) {
                    Ok(d) => d,
                    Err(_) => return false,
                };
                matches!((self.offset(sol, m, p), self.offset(sol, d, q)), (Ok(a), Ok(b)) if a == b)
            })
    }

    /// Boundary of the dual matching `p` on `mu`: the endpoints always match,
    /// internal boundaries only through a connection.
    pub fn correspondent(&self, p: u32, mu: BaseId) -> Option<u32> {
        let b = self.bases.get(&mu)?;
        let d = self.bases.get(&b.dual()?)?;
        if p == b.alpha {
            Some(d.alpha)
        } else if p == b.beta {
            Some(d.beta)
        } else {
            self.is_tied(p, mu)
        }
    }

    /// Letters read along `mu` from `alpha(mu)` up to boundary `p`.
    pub fn offset(&self, sol: &GenEqSolution, mu: BaseId, p: u32) -> Result<usize, GenEqError> {
        let b = self.base(mu)?;
        if !b.on(p) {
            return Err(GenEqError::Condition("boundary lies on the base"));
        }
        let (a, z) = (b.alpha.min(p), b.alpha.max(p));
        Ok((a..z).map(|i| sol.0[(i - 1) as usize].len()).sum())
    }
}

impl fmt::Display for GenEq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "boundaries {} rho {}", self.boundaries, self.rho)?;
        for (id, b) in &self.bases {
            match b.label {
                Label::Dual(d) => writeln!(f, "base {id} {} {} dual {d}", b.alpha, b.beta)?,
                Label::Constant(Some(g)) => writeln!(f, "base {id} {} {} const {}{}", b.alpha, b.beta, g.id(), if g.is_inverse() { "-" } else { "+" })?,
                Label::Constant(None) => writeln!(f, "base {id} {} {} const 1", b.alpha, b.beta)?,
            }
        }
        for (p, m, q) in &self.connections {
            writeln!(f, "tie {p} {m} {q}")?;
        }
        Ok(())
    }
}

/// Where each system variable lives in the generalized equation.
#[derive(Debug, Clone)]
pub struct SystemLink {
    /// Variable -> (item, sign of the occurrence).
    pub variables: BTreeMap<u16, (u32, i8)>,
    /// Item -> the letter occurrence it was built from; constant section items map to `None`.
    pub item_letters: Vec<Option<Generator>>,
}

impl SystemLink {
    pub fn to_geneq_solution(&self, g: &GenEq, asg: &Assignment) -> GenEqSolution {
        let mut items = vec![Word::empty(); g.items() as usize];
        for (i, l) in self.item_letters.iter().enumerate() {
            if let Some(l) = l {
                let v = asg.get(&l.id()).cloned().unwrap_or_else(|| Word::generator(Generator::pos(l.id())));
                items[i] = if l.is_inverse() { v.inverse() } else { v };
            }
        }
        for b in g.bases.values() {
            if let Label::Constant(c) = b.label {
                items[(b.lo() - 1) as usize] = c.map(Word::generator).unwrap_or_default();
            }
        }
        GenEqSolution(items)
    }

    pub fn to_assignment(&self, sol: &GenEqSolution) -> Assignment {
        self.variables
            .iter()
            .map(|(&v, &(item, sign))| {
                let w = sol.0[(item - 1) as usize].clone();
                (v, if sign < 0 { w.inverse() } else { w })
            })
            .collect()
    }
}

/// Builds the generalized equation of a system: one item per letter
/// occurrence, a dual pair per equation (its two sides), a dual pair per
/// repeated variable and per constant occurrence, and one constant item per
/// constant occurrence (plus one empty item per one-sided equation).
pub fn from_system(sys: &EquationSystem) -> (GenEq, SystemLink) {
    let al = &sys.alphabet;
    let mut g = GenEq {
        boundaries: 1,
        rho: 0,
        bases: BTreeMap::new(),
        connections: BTreeSet::new(),
        next_id: 0,
    };
    let mut item_letters: Vec<Option<Generator>> = Vec::new();
    let mut first: BTreeMap<u16, (u32, i8)> = BTreeMap::new();
    let mut second: BTreeMap<u16, (u32, i8)> = BTreeMap::new();
    let mut constants: Vec<(u32, Generator)> = Vec::new();
    // (side spans, inverted second side, needs empty item)
    type Side = ((u32, u32), Option<(u32, u32)>, bool);
    let mut sides: Vec<Side> = Vec::new();

    let mut place = |w: &Word, item_letters: &mut Vec<Option<Generator>>| -> (u32, u32) {
        let start = item_letters.len() as u32 + 1;
        for &l in w.letters() {
            let item = item_letters.len() as u32 + 1;
            item_letters.push(Some(l));
            if al.is_variable(l.id()) {
                if let std::collections::btree_map::Entry::Vacant(e) = first.entry(l.id()) {
                    e.insert((item, l.sign()));
                } else {
                    second.insert(l.id(), (item, l.sign()));
                }
            } else {
                constants.push((item, l));
            }
        }
        (start, item_letters.len() as u32 + 1)
    };

    for eq in &sys.equations {
        let (lhs, rhs, inverted) = if !eq.lhs.is_empty() && !eq.rhs.is_empty() {
            (eq.lhs.clone(), eq.rhs.clone(), false)
        } else {
            let w = eq.relator_word();
            if w.is_empty() {
                continue;
            }
            let cut = w.len().div_ceil(2);
            let (u, v) = w.letters().split_at(cut);
            (Word::from(u.to_vec()), Word::from(v.to_vec()), true)
        };
        let a = place(&lhs, &mut item_letters);
        if rhs.is_empty() {
            sides.push((a, None, false));
        } else {
            let b = place(&rhs, &mut item_letters);
            sides.push((a, Some(if inverted { (b.1, b.0) } else { b }), false));
        }
    }
    let rho = item_letters.len() as u32;
    // Constant section: one item per constant occurrence, then empty items.
    let mut next = rho + 1;
    let mut constant_items = Vec::new();
    for &(item, l) in &constants {
        constant_items.push((item, l, next));
        item_letters.push(None);
        next += 1;
    }
    for s in sides.iter_mut() {
        if s.1.is_none() {
            s.1 = Some((next, next + 1));
            s.2 = true;
            item_letters.push(None);
            next += 1;
        }
    }
    g.boundaries = next;
    g.rho = rho;
    for (a, b, empty) in sides {
        let b = b.expect("filled");
        g.add_pair(a, b);
        if empty {
            g.add_constant(b.0, None);
        }
    }
    for (&v, &(i, s)) in &first {
        if let Some(&(j, t)) = second.get(&v) {
            let span = |k: u32, sign: i8| if sign > 0 { (k, k + 1) } else { (k + 1, k) };
            g.add_pair(span(i, s), span(j, t));
        }
    }
    for (item, l, c) in constant_items {
        let span = if l.is_inverse() { (item + 1, item) } else { (item, item + 1) };
        g.add_pair(span, (c, c + 1));
        g.add_constant(c, Some(Generator::pos(l.id())));
    }
    (
        g,
        SystemLink {
            variables: first,
            item_letters,
        },
    )
}

/// A quadratic triangular system rewritten with tripod legs: each letter
/// `z_k` of a relator `z_1 .. z_n` (n <= 3) becomes `z_k = L_k L_{k+1}^-1`.
/// Solutions of the tripod form read without cancellation.
#[derive(Debug, Clone)]
pub struct TripodForm {
    pub system: EquationSystem,
    /// Legs of each relator, in order.
    pub legs: Vec<Vec<u16>>,
}

pub fn tripod_form(sys: &EquationSystem) -> Result<TripodForm, GenEqError> {
    let mut alphabet: Alphabet = sys.alphabet.clone();
    let mut out = Vec::new();
    let mut legs = Vec::new();
    for (e, w) in sys.relators().iter().enumerate() {
        let n = w.len();
        if n > 3 {
            return Err(GenEqError::NotTriangular(e, n));
        }
        if n <= 1 {
            if n == 1 {
                out.push(Equation::relator(w.clone()));
            }
            legs.push(Vec::new());
            continue;
        }
        let ls: Vec<u16> = (0..n).map(|_| alphabet.fresh_variable("l")).collect();
        for k in 0..n {
            let z = Word::generator(w.letters()[k]);
            let rhs = Word::from(vec![Generator::pos(ls[k]), Generator::neg(ls[(k + 1) % n])]);
            out.push(Equation::new(z, rhs));
        }
        legs.push(ls);
    }
    let mut system = EquationSystem::new(alphabet);
    for eq in out {
        system.push(eq);
    }
    Ok(TripodForm { system, legs })
}

impl TripodForm {
    /// Extends a solution of the triangular system by its tripod legs.
    pub fn lift(&self, original: &EquationSystem, asg: &Assignment) -> Result<Assignment, GenEqError> {
        if !original.is_solution(asg) {
            return Err(GenEqError::NotASolution);
        }
        let al = &original.alphabet;
        let value = |g: Generator| -> Word {
            let v = if al.is_variable(g.id()) {
                asg.get(&g.id()).cloned().unwrap_or_default()
            } else {
                Word::generator(Generator::pos(g.id()))
            };
            if g.is_inverse() {
                v.inverse()
            } else {
                v
            }
        };
        let mut out = asg.clone();
        for (w, ls) in original.relators().iter().zip(&self.legs) {
            let z: Vec<Word> = w.letters().iter().map(|&g| value(g)).collect();
            let vals = tripod_legs(&z);
            for (&l, v) in ls.iter().zip(vals) {
                out.insert(l, v);
            }
        }
        if !self.system.is_solution(&out) {
            return Err(GenEqError::NotASolution);
        }
        Ok(out)
    }
}

/// A generalized equation for an arbitrary quadratic system together with
/// the cancellation-free solution induced by `asg`.
#[derive(Debug, Clone)]
pub struct GuidedGenEq {
    pub geneq: GenEq,
    pub solution: GenEqSolution,
    pub link: SystemLink,
    pub tripod: TripodForm,
}

/// The generalized equation of a system before any solution is chosen:
/// triangulate, pass to tripod form, read off bases.
pub fn initial_geneq(sys: &EquationSystem) -> Result<GenEq, GenEqError> {
    let tri = triangulate(sys);
    let tripod = tripod_form(&tri.system)?;
    Ok(from_system(&tripod.system).0)
}

pub fn guided_geneq(sys: &EquationSystem, asg: &Assignment) -> Result<GuidedGenEq, GenEqError> {
    let tri = triangulate(sys);
    let lifted = tri.lift(asg).map_err(|_| GenEqError::NotASolution)?;
    let tripod = tripod_form(&tri.system)?;
    let legs = tripod.lift(&tri.system, &lifted)?;
    let (geneq, link) = from_system(&tripod.system);
    let solution = link.to_geneq_solution(&geneq, &legs);
    geneq.is_graphical_solution(&solution)?;
    Ok(GuidedGenEq {
        geneq,
        solution,
        link,
        tripod,
    })
}
