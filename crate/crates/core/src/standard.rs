//! Standard forms of single quadratic equations and the genus of a tuple.
//!
//! `standardize` walks the cyclic relator, peeling off squares, commutators
//! and conjugated coefficients. Every move is an automorphism of the free
//! group on the variables (or a conjugation of the whole equation), and the
//! composite is recorded in both directions so solutions transport each way.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::freewords::{commutator, cyclic_normalize, Generator, Word};
use crate::makanin::solver::{solve_quadratic, SolveOptions, Verdict};
use crate::quadratic::{Assignment, Equation, EquationSystem};
use crate::symbols::Alphabet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StandardError {
    #[error("expected a single equation, found {0}")]
    NotSingle(usize),
    #[error("equation is not quadratic: variable '{0}' occurs {1} times")]
    NotQuadratic(String, usize),
    #[error("non-orientable genus must be at least 1")]
    ZeroNonOrientable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SurfaceKind {
    Orientable,
    NonOrientable,
}

/// `prod [x_i, y_i] · prod z_j^-1 C_j z_j · C = 1` or
/// `prod x_i^2 · prod z_j^-1 C_j z_j · C = 1`.
#[derive(Debug, Clone)]
pub struct StandardForm {
    pub kind: SurfaceKind,
    pub genus: usize,
    /// `C_1 .. C_{m-1}`, each cyclically reduced.
    pub coefficients: Vec<Word>,
    /// The unconjugated last coefficient `C`.
    pub last: Word,
    pub alphabet: Alphabet,
    /// `x_i` (and `y_i` for orientable forms).
    pub surface_vars: Vec<u16>,
    /// `z_j`.
    pub conjugators: Vec<u16>,
}

impl StandardForm {
    /// Builds the standard equation over a fresh alphabet containing the
    /// constants of `constants` (same names, same order).
    pub fn new(kind: SurfaceKind, genus: usize, coefficients: Vec<Word>, last: Word, constants: &Alphabet) -> Self {
        let mut alphabet = Alphabet::new();
        for c in constants.constants() {
            alphabet.add_constant(constants.name(c)).expect("distinct names");
        }
        let remap = |w: &Word| -> Word {
            let ids = constants.constants();
            w.map_letters(|g| {
                let k = ids.iter().position(|&c| c == g.id()).expect("constant");
                Word::generator(Generator::new(k as u16, g.sign()))
            })
        };
        let coefficients: Vec<Word> = coefficients.iter().map(remap).collect();
        let last = remap(&last);
        let mut surface_vars = Vec::new();
        for i in 1..=genus {
            surface_vars.push(alphabet.add_variable(&format!("x{i}")).expect("fresh"));
            if kind == SurfaceKind::Orientable {
                surface_vars.push(alphabet.add_variable(&format!("y{i}")).expect("fresh"));
            }
        }
        let conjugators = (1..=coefficients.len())
            .map(|j| alphabet.add_variable(&format!("z{j}")).expect("fresh"))
            .collect();
        StandardForm {
            kind,
            genus,
            coefficients,
            last,
            alphabet,
            surface_vars,
            conjugators,
        }
    }

    pub fn relator(&self) -> Word {
        let mut parts = Vec::new();
        match self.kind {
            SurfaceKind::Orientable => {
                for p in self.surface_vars.chunks(2) {
                    parts.push(commutator(
                        &Word::generator(Generator::pos(p[0])),
                        &Word::generator(Generator::pos(p[1])),
                    ));
                }
            }
            SurfaceKind::NonOrientable => {
                for &x in &self.surface_vars {
                    parts.push(Word::generator(Generator::pos(x)).pow(2));
                }
            }
        }
        for (c, &z) in self.coefficients.iter().zip(&self.conjugators) {
            parts.push(c.conjugate_by(&Word::generator(Generator::pos(z))));
        }
        parts.push(self.last.clone());
        Word::product(parts.iter())
    }

    pub fn system(&self) -> EquationSystem {
        let mut sys = EquationSystem::new(self.alphabet.clone());
        sys.push(Equation::relator(self.relator()));
        sys
    }
}

/// Substitutions between the original variables and the standard ones.
#[derive(Debug, Clone)]
pub struct AutomorphismRecord {
    /// Original variable -> word over the standard alphabet.
    pub to_original: BTreeMap<u16, Word>,
    /// Standard variable -> word over the original alphabet.
    pub to_standard: BTreeMap<u16, Word>,
}

impl AutomorphismRecord {
    /// Turns a solution of the standard form into one of the original equation.
    pub fn pull(&self, form: &StandardForm, sol: &Assignment) -> Assignment {
        let al = &form.alphabet;
        self.to_original
            .iter()
            .map(|(&v, w)| {
                let val = crate::freewords::substitute(w, |id| al.is_variable(id), sol)
                    .expect("standard solution covers every standard variable");
                (v, val)
            })
            .collect()
    }

    /// Turns a solution of the original equation into one of the standard form.
    pub fn push(&self, original: &EquationSystem, sol: &Assignment) -> Assignment {
        let al = &original.alphabet;
        let mut full = sol.clone();
        for v in al.variables() {
            full.entry(v).or_insert_with(Word::empty);
        }
        self.to_standard
            .iter()
            .map(|(&v, w)| {
                let val = crate::freewords::substitute(w, |id| al.is_variable(id), &full)
                    .expect("all original variables assigned");
                (v, val)
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
enum Block {
    Square(u16),
    Handle(u16, u16),
    Coeff(u16, Word),
}

impl Block {
    fn word(&self) -> Word {
        let v = |x: u16| Word::generator(Generator::pos(x));
        match self {
            Block::Square(x) => v(*x).pow(2),
            Block::Handle(x, y) => commutator(&v(*x), &v(*y)),
            Block::Coeff(z, c) => c.conjugate_by(&v(*z)),
        }
    }

    fn is_surface(&self) -> bool {
        !matches!(self, Block::Coeff(..))
    }
}

struct Work {
    al: Alphabet,
    blocks: Vec<Block>,
    rest: Word,
    /// Original variable -> word over current variables.
    back: BTreeMap<u16, Word>,
    /// Current variable -> word over original variables.
    fwd: BTreeMap<u16, Word>,
}

fn letter(x: u16) -> Word {
    Word::generator(Generator::pos(x))
}

impl Work {
    fn is_var(&self, id: u16) -> bool {
        self.al.is_variable(id)
    }

    /// Applies `v := old_in_new(v)` for every listed variable; `new_in_old`
    /// gives the inverse images over the variables before the move.
    fn subst(&mut self, changes: &[(u16, Word, Word)]) {
        let old_of = |g: Generator| -> Word {
            match changes.iter().find(|c| c.0 == g.id()) {
                Some((_, w, _)) if g.is_inverse() => w.inverse(),
                Some((_, w, _)) => w.clone(),
                None => Word::generator(g),
            }
        };
        for w in self.back.values_mut() {
            *w = w.map_letters(old_of);
        }
        self.rest = self.rest.map_letters(old_of);
        let fwd = &self.fwd;
        let al = &self.al;
        let updated: Vec<(u16, Word)> = changes
            .iter()
            .map(|(v, _, new_in_old)| {
                let w = new_in_old.map_letters(|g| {
                    if al.is_variable(g.id()) {
                        let f = fwd.get(&g.id()).cloned().unwrap_or_else(|| letter(g.id()));
                        if g.is_inverse() {
                            f.inverse()
                        } else {
                            f
                        }
                    } else {
                        Word::generator(g)
                    }
                });
                (*v, w)
            })
            .collect();
        for (v, w) in updated {
            self.fwd.insert(v, w);
        }
    }

    fn flip(&mut self, x: u16) {
        let xi = letter(x).inverse();
        self.subst(&[(x, xi.clone(), xi)]);
    }

    /// Replaces `blocks · p · q` by `blocks' · q · p`, conjugating the blocks.
    fn rotate(&mut self, p: &Word) {
        if p.is_empty() {
            return;
        }
        let pi = p.inverse();
        let mut changes = Vec::new();
        for b in &self.blocks {
            match b {
                Block::Square(x) => changes.push((*x, Word::product([p, &letter(*x), &pi]), Word::product([&pi, &letter(*x), p]))),
                Block::Handle(x, y) => {
                    for v in [*x, *y] {
                        changes.push((v, Word::product([p, &letter(v), &pi]), Word::product([&pi, &letter(v), p])));
                    }
                }
                Block::Coeff(z, _) => changes.push((*z, letter(*z).concat(&pi), letter(*z).concat(p))),
            }
        }
        let rest = Word::product([&pi, &self.rest, p]);
        self.subst(&changes);
        self.rest = rest;
    }

    fn rotate_to(&mut self, i: usize) {
        let p = Word::from(self.rest.letters()[..i].to_vec());
        self.rotate(&p);
    }

    fn positions(&self) -> BTreeMap<u16, Vec<usize>> {
        let mut m: BTreeMap<u16, Vec<usize>> = BTreeMap::new();
        for (i, g) in self.rest.letters().iter().enumerate() {
            if self.is_var(g.id()) {
                m.entry(g.id()).or_default().push(i);
            }
        }
        m
    }

    fn sign_at(&self, i: usize) -> i8 {
        self.rest.letters()[i].sign()
    }

    fn slice(&self, a: usize, b: usize) -> Word {
        Word::from(self.rest.letters()[a..b].to_vec())
    }

    fn cyclic_reduce(&mut self) {
        let (u, _) = self.rest.cyclic_split();
        self.rotate(&u);
    }

    /// One extraction step; `false` once the rest is constant.
    fn step(&mut self) -> bool {
        self.cyclic_reduce();
        let pos = self.positions();
        if pos.is_empty() {
            return false;
        }
        // Same-sign pair: x A x B -> x^2 · A^-1 B.
        if let Some((&x, p)) = pos.iter().find(|(_, p)| self.sign_at(p[0]) == self.sign_at(p[1])) {
            let first = p[0];
            self.rotate_to(first);
            if self.sign_at(0) < 0 {
                self.flip(x);
            }
            let p2 = self.positions()[&x][1];
            let a = self.slice(1, p2);
            self.subst(&[(x, letter(x).concat(&a.inverse()), letter(x).concat(&a))]);
            debug_assert_eq!(&self.rest.letters()[..2], &[Generator::pos(x); 2]);
            self.rest = self.slice(2, self.rest.len());
            self.blocks.push(Block::Square(x));
            return true;
        }
        // Linked pair: x A y B x^-1 C y^-1 D -> [x, y] · D C B A.
        let linked = pos.iter().find_map(|(&x, px)| {
            pos.iter()
                .find(|(&y, py)| y != x && px[0] < py[0] && py[0] < px[1] && px[1] < py[1])
                .map(|(&y, _)| (x, y, px[0]))
        });
        if let Some((x, y, first)) = linked {
            self.rotate_to(first);
            if self.sign_at(0) < 0 {
                self.flip(x);
            }
            let py = self.positions()[&y][0];
            if self.sign_at(py) < 0 {
                self.flip(y);
            }
            let px = self.positions()[&x][1];
            let qy = self.positions()[&y][1];
            let (a, b, c) = (self.slice(1, py), self.slice(py + 1, px), self.slice(px + 1, qy));
            let cba = Word::product([&c, &b, &a]);
            let (ai, bi) = (a.inverse(), b.inverse());
            let xl = letter(x);
            let yl = letter(y);
            self.subst(&[
                (x, Word::product([&cba, &xl.inverse(), &ai]), Word::product([&ai, &xl.inverse(), &cba])),
                (y, Word::product([&yl.inverse(), &ai, &bi]), Word::product([&ai, &bi, &yl.inverse()])),
            ]);
            self.rotate(&cba);
            debug_assert_eq!(self.slice(0, 4), commutator(&xl, &yl));
            self.rest = self.slice(4, self.rest.len());
            self.blocks.push(Block::Handle(x, y));
            return true;
        }
        // Innermost pair with only constants between: x C x^-1.
        let (&x, p) = pos
            .iter()
            .min_by_key(|(_, p)| p[1] - p[0])
            .expect("some variable");
        let first = p[0];
        self.rotate_to(first);
        if self.sign_at(0) > 0 {
            self.flip(x);
        }
        // Now x^-1 C x Q, a conjugated coefficient.
        let q = self.positions()[&x][1];
        let c = self.slice(1, q);
        self.rest = self.slice(q + 1, self.rest.len());
        self.blocks.push(Block::Coeff(x, c));
        true
    }

    /// Moves coefficient blocks behind all surface blocks.
    fn sort_blocks(&mut self) {
        loop {
            let Some(i) = (0..self.blocks.len().saturating_sub(1))
                .find(|&i| !self.blocks[i].is_surface() && self.blocks[i + 1].is_surface())
            else {
                return;
            };
            let h = self.blocks[i + 1].word();
            let Block::Coeff(z, _) = self.blocks[i] else { unreachable!() };
            self.subst(&[(z, letter(z).concat(&h.inverse()), letter(z).concat(&h))]);
            self.blocks.swap(i, i + 1);
        }
    }

    /// `x^2 [y, z]` becomes `x^2 y^2 z^2` under
    /// `x -> xyz, y -> (xyz)^-1 y zxyz, z -> (xyz)^-1 z`.
    fn merge_handles(&mut self) {
        loop {
            let Some(i) = (0..self.blocks.len().saturating_sub(1)).find(|&i| {
                matches!(self.blocks[i], Block::Square(_)) && matches!(self.blocks[i + 1], Block::Handle(..))
            }) else {
                return;
            };
            let Block::Square(x) = self.blocks[i] else { unreachable!() };
            let Block::Handle(y, z) = self.blocks[i + 1] else { unreachable!() };
            let (lx, ly, lz) = (letter(x), letter(y), letter(z));
            let (ix, iy, iz) = (lx.inverse(), ly.inverse(), lz.inverse());
            let g = Word::product([&lx, &ly, &lz]);
            let gi = g.inverse();
            self.subst(&[
                (x, g.clone(), Word::product([&lx, &lx, &iy, &ix])),
                (y, Word::product([&gi, &ly, &lz, &g]), Word::product([&lx, &ly, &ix, &iz, &ix])),
                (z, Word::product([&gi, &lz]), Word::product([&lx, &lz])),
            ]);
            self.blocks.splice(i..i + 2, [Block::Square(x), Block::Square(y), Block::Square(z)]);
        }
    }

    fn fold_conjugators(&mut self) {
        let (u, _) = self.rest.cyclic_split();
        self.rotate(&u);
        for i in 0..self.blocks.len() {
            if let Block::Coeff(z, c) = self.blocks[i].clone() {
                let (u, core) = c.cyclic_split();
                if !u.is_empty() {
                    self.subst(&[(z, u.concat(&letter(z)), u.inverse().concat(&letter(z)))]);
                    self.blocks[i] = Block::Coeff(z, core);
                }
            }
        }
    }
}

/// Normalizes one quadratic equation to standard form.
pub fn standardize(sys: &EquationSystem) -> Result<(StandardForm, AutomorphismRecord), StandardError> {
    if sys.equations.len() != 1 {
        return Err(StandardError::NotSingle(sys.equations.len()));
    }
    if let Some((v, c)) = sys.occurrences().into_iter().find(|&(_, c)| c != 2) {
        return Err(StandardError::NotQuadratic(sys.alphabet.name(v).to_string(), c));
    }
    let vars = sys.alphabet.variables();
    let mut w = Work {
        al: sys.alphabet.clone(),
        blocks: Vec::new(),
        rest: sys.equations[0].relator_word(),
        back: vars.iter().map(|&v| (v, letter(v))).collect(),
        fwd: vars.iter().map(|&v| (v, letter(v))).collect(),
    };
    while w.step() {}
    w.sort_blocks();
    w.merge_handles();
    w.fold_conjugators();

    let squares = w.blocks.iter().filter(|b| matches!(b, Block::Square(_))).count();
    let handles = w.blocks.iter().filter(|b| matches!(b, Block::Handle(..))).count();
    let (kind, genus) = if squares > 0 {
        (SurfaceKind::NonOrientable, squares)
    } else {
        (SurfaceKind::Orientable, handles)
    };
    let coefficients: Vec<Word> = w
        .blocks
        .iter()
        .filter_map(|b| match b {
            Block::Coeff(_, c) => Some(c.clone()),
            _ => None,
        })
        .collect();
    let form = StandardForm::new(kind, genus, coefficients, w.rest.clone(), &sys.alphabet);

    // Internal variable -> standard variable.
    let mut rename: BTreeMap<u16, u16> = BTreeMap::new();
    let mut sv = form.surface_vars.iter();
    let mut cv = form.conjugators.iter();
    for b in &w.blocks {
        match b {
            Block::Square(x) => {
                rename.insert(*x, *sv.next().expect("surface var"));
            }
            Block::Handle(x, y) => {
                rename.insert(*x, *sv.next().expect("surface var"));
                rename.insert(*y, *sv.next().expect("surface var"));
            }
            Block::Coeff(z, _) => {
                rename.insert(*z, *cv.next().expect("conjugator"));
            }
        }
    }
    let consts = sys.alphabet.constants();
    let to_std = |word: &Word| -> Word {
        word.map_letters(|g| {
            if sys.alphabet.is_variable(g.id()) {
                match rename.get(&g.id()) {
                    Some(&s) => Word::generator(Generator::new(s, g.sign())),
                    None => Word::empty(),
                }
            } else {
                let k = consts.iter().position(|&c| c == g.id()).expect("constant");
                Word::generator(Generator::new(k as u16, g.sign()))
            }
        })
    };
    let to_original = w.back.iter().map(|(&v, word)| (v, to_std(word))).collect();
    let to_standard = rename
        .iter()
        .map(|(internal, s)| (*s, w.fwd.get(internal).cloned().unwrap_or_else(|| letter(*internal))))
        .collect();
    Ok((
        form,
        AutomorphismRecord {
            to_original,
            to_standard,
        },
    ))
}

/// The standard-form equation with the given genus and coefficient tuple:
/// `coeffs = (C_1, ..., C_{m-1}, C)`.
pub fn standard_equation(kind: SurfaceKind, genus: usize, coeffs: &[Word], constants: &Alphabet) -> StandardForm {
    let (last, rest) = match coeffs.split_last() {
        Some((l, r)) => (l.clone(), r.to_vec()),
        None => (Word::empty(), Vec::new()),
    };
    StandardForm::new(kind, genus, rest, last, constants)
}

#[derive(Debug, Clone)]
pub struct GenusCheck {
    pub verdict: Verdict,
    pub witness: Option<Assignment>,
    pub form: StandardForm,
}

fn check(kind: SurfaceKind, g: usize, coeffs: &[Word], constants: &Alphabet, opts: &SolveOptions) -> GenusCheck {
    let form = standard_equation(kind, g, coeffs, constants);
    let r = solve_quadratic(&form.system(), opts).expect("standard forms are quadratic");
    GenusCheck {
        verdict: r.verdict,
        witness: r.witness,
        form,
    }
}

/// Decides the orientable standard equation of genus `g` for the tuple.
pub fn genus_orientable(coeffs: &[Word], g: usize, constants: &Alphabet, opts: &SolveOptions) -> GenusCheck {
    check(SurfaceKind::Orientable, g, coeffs, constants, opts)
}

/// Decides the non-orientable standard equation of genus `g >= 1`.
pub fn genus_nonorientable(
    coeffs: &[Word],
    g: usize,
    constants: &Alphabet,
    opts: &SolveOptions,
) -> Result<GenusCheck, StandardError> {
    if g == 0 {
        return Err(StandardError::ZeroNonOrientable);
    }
    Ok(check(SurfaceKind::NonOrientable, g, coeffs, constants, opts))
}

/// Least solvable genus, searched up to `total coefficient length / 2 + 1`.
/// `Ok(None)` means no genus up to the cutoff was solvable.
pub fn tuple_genus(
    kind: SurfaceKind,
    coeffs: &[Word],
    constants: &Alphabet,
    opts: &SolveOptions,
) -> Result<Option<(usize, GenusCheck)>, Verdict> {
    let total: usize = coeffs.iter().map(|c| c.len()).sum();
    let start = usize::from(kind == SurfaceKind::NonOrientable);
    let mut inconclusive = false;
    for g in start..=total / 2 + 1 {
        let c = check(kind, g, coeffs, constants, opts);
        match c.verdict {
            Verdict::Sat => return Ok(Some((g, c))),
            Verdict::Inconclusive => inconclusive = true,
            Verdict::Unsat => {}
        }
    }
    if inconclusive {
        Err(Verdict::Inconclusive)
    } else {
        Ok(None)
    }
}

/// Cyclic normal form of a relator, for comparing equations up to conjugation.
pub fn relator_class(w: &Word) -> Word {
    cyclic_normalize(w).representative().clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freewords::substitute;

    fn std_of(text: &str) -> (EquationSystem, StandardForm, AutomorphismRecord) {
        let sys = EquationSystem::parse(text).unwrap();
        let (f, r) = standardize(&sys).unwrap();
        (sys, f, r)
    }

    fn check_record(sys: &EquationSystem, f: &StandardForm, r: &AutomorphismRecord) {
        let rel = sys.equations[0].relator_word();
        let pulled = substitute(&rel, |id| sys.alphabet.is_variable(id), &r.to_original).unwrap();
        assert_eq!(relator_class(&pulled), relator_class(&f.relator()), "back map");
        let fal = &f.alphabet;
        let pushed = f.relator().map_letters(|g| {
            if fal.is_variable(g.id()) {
                let w = &r.to_standard[&g.id()];
                if g.is_inverse() {
                    w.inverse()
                } else {
                    w.clone()
                }
            } else {
                let c = sys.alphabet.lookup(fal.name(g.id())).unwrap();
                Word::generator(Generator::new(c, g.sign()))
            }
        });
        assert_eq!(relator_class(&pushed), relator_class(&rel), "forward map");
    }

    #[test]
    fn already_standard() {
        let (sys, f, r) = std_of("gens: a b\nvars: x y\n[x,y] [a,b] = 1\n");
        assert_eq!(f.kind, SurfaceKind::Orientable);
        assert_eq!(f.genus, 1);
        assert!(f.coefficients.is_empty());
        assert_eq!(f.alphabet.show(&f.last), "a^-1 b^-1 a b");
        check_record(&sys, &f, &r);

        let (sys, f, r) = std_of("gens: a\nvars: x\nx^2 a = 1\n");
        assert_eq!((f.kind, f.genus), (SurfaceKind::NonOrientable, 1));
        assert_eq!(f.alphabet.show(&f.last), "a");
        check_record(&sys, &f, &r);
    }

    #[test]
    fn transported_square() {
        let (sys, f, r) = std_of("gens: a b\nvars: x\nx a x b = 1\n");
        assert_eq!((f.kind, f.genus), (SurfaceKind::NonOrientable, 1));
        assert_eq!(f.alphabet.show(&f.last), "a^-1 b");
        check_record(&sys, &f, &r);
    }

    #[test]
    fn mixed_surfaces_become_squares() {
        let (sys, f, r) = std_of("gens: a b\nvars: x y z\nx^2 [y,z] a = 1\n");
        assert_eq!((f.kind, f.genus), (SurfaceKind::NonOrientable, 3));
        check_record(&sys, &f, &r);
    }

    #[test]
    fn coefficients_and_handles() {
        let (sys, f, r) = std_of("gens: a b\nvars: x y z\nx a x^-1 y b y^-1 z^-1 a z = 1\n");
        assert_eq!((f.kind, f.genus), (SurfaceKind::Orientable, 0));
        assert_eq!(f.coefficients.len(), 2);
        assert_eq!(f.alphabet.show(&f.last), "a");
        check_record(&sys, &f, &r);
        let (sys, f, r) = std_of("gens: a b\nvars: x y u\nx a y x^-1 b y^-1 u a u^-1 = 1\n");
        assert_eq!((f.kind, f.genus), (SurfaceKind::Orientable, 1));
        assert_eq!(f.coefficients.len(), 1);
        check_record(&sys, &f, &r);
    }

    #[test]
    fn solutions_transport() {
        let (sys, f, r) = std_of("gens: a b\nvars: x y\nx a y x^-1 b y^-1 = 1\n");
        let fs = f.system();
        let res = solve_quadratic(&fs, &SolveOptions::default()).unwrap();
        let orig = solve_quadratic(&sys, &SolveOptions::default()).unwrap();
        assert_eq!(res.verdict, orig.verdict);
        if let Some(sol) = res.witness {
            let back = r.pull(&f, &sol);
            assert!(sys.is_solution(&back));
        }
        if let Some(sol) = orig.witness {
            let fwd = r.push(&sys, &sol);
            assert!(fs.is_solution(&fwd));
        }
    }

    #[test]
    fn genus_examples() {
        let al = Alphabet::with(&["a", "b"], &[]).unwrap();
        let ab = al.parse_word("[a,b]").unwrap();
        let opts = SolveOptions::default();
        let c = genus_orientable(std::slice::from_ref(&ab), 1, &al, &opts);
        assert_eq!(c.verdict, Verdict::Sat);
        assert!(c.form.system().is_solution(c.witness.as_ref().unwrap()));
        assert_eq!(genus_orientable(std::slice::from_ref(&ab), 0, &al, &opts).verdict, Verdict::Unsat);
        assert_eq!(genus_orientable(&[Word::empty()], 0, &al, &opts).verdict, Verdict::Sat);

        let a2 = al.parse_word("a^2").unwrap();
        let c = genus_nonorientable(&[a2], 1, &al, &opts).unwrap();
        assert_eq!(c.verdict, Verdict::Sat);
        let x1 = c.form.surface_vars[0];
        assert_eq!(c.form.alphabet.show(&c.witness.unwrap()[&x1]), "a^-1");
        // A commutator of a basis is a product of three squares but not two.
        assert_eq!(
            genus_nonorientable(std::slice::from_ref(&ab), 2, &al, &opts).unwrap().verdict,
            Verdict::Unsat
        );
        let c = genus_nonorientable(std::slice::from_ref(&ab), 3, &al, &opts).unwrap();
        assert_eq!(c.verdict, Verdict::Sat);
        assert!(c.form.system().is_solution(c.witness.as_ref().unwrap()));
        let a = al.parse_word("a").unwrap();
        assert_eq!(genus_nonorientable(&[a], 1, &al, &opts).unwrap().verdict, Verdict::Unsat);
        assert!(genus_nonorientable(std::slice::from_ref(&ab), 0, &al, &opts).is_err());

        let (g, _) = tuple_genus(SurfaceKind::Orientable, &[ab], &al, &opts).unwrap().unwrap();
        assert_eq!(g, 1);
    }
}
