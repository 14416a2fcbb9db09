//! Reduction of a triangular system over a hyperbolic (or toral relatively
//! hyperbolic) group to a system over the free group, for one choice of
//! short tripod centres `c_k^{(j)}`, and the length constant `L`.
//!
//! Every relator `z_1 .. z_n` (n <= 3) of the input is a polygon `j`; its
//! corner `k` carries the leg variable `x_k^{(j)}` and the side `z_k` is sent
//! to `x_k c_k x_{k+1}^-1`. Two occurrences of a variable give one matching
//! equation; each constant occurrence `a` gives `x_k c_k x_{k+1}^-1 = theta(a)`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::freewords::{reduce, substitute, tripod_legs, Generator, Word};
use crate::quadratic::{Assignment, Equation, EquationSystem};
use crate::symbols::Alphabet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemaError {
    #[error("equation {0} has length {1}; triangulate first")]
    NotTriangular(usize, usize),
    #[error("no centre triple for polygon {0}")]
    MissingTriple(usize),
    #[error("polygon {polygon} needs {expected} centres, got {got}")]
    TripleArity { polygon: usize, expected: usize, got: usize },
    #[error("centre {k} of polygon {polygon} has length {len}, not below {bound}")]
    TooLong { polygon: usize, k: usize, len: usize, bound: usize },
    #[error("centres of polygon {0} do not multiply to 1 in the target")]
    NotTrivial(usize),
    #[error("no representative for constant {0}")]
    MissingRepresentative(String),
    #[error("representative of {name} has length {len} > lambda*|a| + mu = {bound}")]
    NotQuasiGeodesic { name: String, len: usize, bound: usize },
    #[error("schema size {size} exceeds the bound {bound}")]
    SizeBound { size: usize, bound: usize },
    #[error("assignment does not solve the schema system")]
    NotASolution,
    #[error("pulled-back assignment fails the original system")]
    PullbackFailed,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// The group the input system lives in, as far as the schema needs it:
/// a word problem for the centre certificate and quasi-geodesic constants
/// for the size bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    /// The free group on the constants; representatives are geodesic.
    Free,
    /// A free product of free abelian groups, each factor listed by its
    /// generators; constants outside every factor generate free factors.
    FreeProduct(Vec<Vec<u16>>),
    /// A hyperbolic group handled externally; centre certificates are
    /// taken on trust and representatives are `(lambda, mu)`-quasi-geodesic.
    Declared { lambda: usize, mu: usize },
}

impl Target {
    /// `Some(answer)` when the word problem is decidable here.
    pub fn is_trivial(&self, w: &Word) -> Option<bool> {
        match self {
            Target::Free => Some(w.is_empty()),
            Target::FreeProduct(factors) => Some(free_product_trivial(factors, w)),
            Target::Declared { .. } => None,
        }
    }

    pub fn quasi_geodesic(&self) -> (usize, usize) {
        match *self {
            Target::Free | Target::FreeProduct(_) => (1, 0),
            Target::Declared { lambda, mu } => (lambda, mu),
        }
    }
}

/// Syllable normal form in a free product of free abelian groups.
fn free_product_trivial(factors: &[Vec<u16>], w: &Word) -> bool {
    let factor_of = |id: u16| factors.iter().position(|f| f.contains(&id));
    // (factor, exponent per generator) or a free letter.
    let mut stack: Vec<(Option<usize>, BTreeMap<u16, i64>)> = Vec::new();
    for &g in w.letters() {
        let f = factor_of(g.id());
        match (f, stack.last_mut()) {
            (Some(i), Some((Some(j), exps))) if i == *j => {
                let e = exps.entry(g.id()).or_insert(0);
                *e += g.sign() as i64;
                if *e == 0 {
                    exps.remove(&g.id());
                }
                if exps.is_empty() {
                    stack.pop();
                }
            }
            (None, Some((None, exps))) if exps.get(&g.id()) == Some(&-(g.sign() as i64)) => {
                stack.pop();
            }
            _ => stack.push((f, BTreeMap::from([(g.id(), g.sign() as i64)]))),
        }
    }
    stack.is_empty()
}

/// Centres for every polygon and the certificate that each product is 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CTripleChoice {
    pub triples: Vec<Vec<Word>>,
}

impl CTripleChoice {
    /// Trivial centres: exact tripods, enough for the free group.
    pub fn trivial(sys: &EquationSystem) -> Self {
        CTripleChoice {
            triples: sys.relators().iter().map(|w| vec![Word::empty(); w.len()]).collect(),
        }
    }

    /// Reads centres for `sys` from lines `<polygon>: <word> ; <word> ; <word>`,
    /// polygons numbered from 1 in relator order. Unlisted polygons keep
    /// trivial centres; `#` starts a comment.
    pub fn parse(text: &str, sys: &EquationSystem) -> Result<Self, SchemaError> {
        let mut choice = CTripleChoice::trivial(sys);
        let mut seen = vec![false; choice.triples.len()];
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |message: String| SchemaError::Parse { line, message };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (head, body) = content
                .split_once(':')
                .ok_or_else(|| err("expected '<polygon>: <word> ; ...'".into()))?;
            let j: usize = head
                .trim()
                .parse()
                .map_err(|_| err(format!("bad polygon number '{}'", head.trim())))?;
            if j == 0 || j > choice.triples.len() {
                return Err(err(format!("polygon {j} out of range 1..={}", choice.triples.len())));
            }
            if std::mem::replace(&mut seen[j - 1], true) {
                return Err(err(format!("polygon {j} listed twice")));
            }
            let words: Vec<Word> = body
                .split(';')
                .map(|w| {
                    let w = sys.alphabet.parse_word(w).map_err(|e| err(e.to_string()))?;
                    match w.letters().iter().find(|g| sys.alphabet.is_variable(g.id())) {
                        Some(g) => Err(err(format!("variable '{}' in a centre", sys.alphabet.name(g.id())))),
                        None => Ok(w),
                    }
                })
                .collect::<Result<_, _>>()?;
            let expected = choice.triples[j - 1].len();
            if words.len() != expected {
                return Err(err(format!("polygon {j} needs {expected} centres, got {}", words.len())));
            }
            choice.triples[j - 1] = words;
        }
        Ok(choice)
    }
}

/// Representatives `theta(a)` of the constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representatives(pub BTreeMap<u16, Word>);

impl Representatives {
    /// Each constant stands for itself.
    pub fn geodesic(alphabet: &Alphabet) -> Self {
        Representatives(
            alphabet
                .constants()
                .into_iter()
                .map(|c| (c, Word::generator(Generator::pos(c))))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemaParams {
    /// Strict upper bound on centre lengths.
    pub l_param: usize,
}

#[derive(Debug, Clone)]
pub struct SchemaOutput {
    pub system: EquationSystem,
    /// `legs[j][k]` is `x_{k+1}^{(j+1)}`.
    pub legs: Vec<Vec<u16>>,
    /// Image of every input variable.
    pub rho: BTreeMap<u16, Word>,
    pub matching_equations: usize,
    pub constant_equations: usize,
    pub size_bound: usize,
    input_alphabet: Alphabet,
}

/// `|S| (4 + 2L + lambda |S| + mu)`.
pub fn schema_size_bound(input_size: usize, l_param: usize, lambda: usize, mu: usize) -> usize {
    input_size * (4 + 2 * l_param + lambda * input_size + mu)
}

pub fn build_schema(
    sys: &EquationSystem,
    choice: &CTripleChoice,
    reps: &Representatives,
    target: &Target,
    params: SchemaParams,
) -> Result<SchemaOutput, SchemaError> {
    let relators = sys.relators();
    let al = &sys.alphabet;
    let (lambda, mu) = target.quasi_geodesic();
    for (j, w) in relators.iter().enumerate() {
        if w.len() > 3 {
            return Err(SchemaError::NotTriangular(j, w.len()));
        }
        let cs = choice.triples.get(j).ok_or(SchemaError::MissingTriple(j))?;
        if cs.len() != w.len() {
            return Err(SchemaError::TripleArity {
                polygon: j,
                expected: w.len(),
                got: cs.len(),
            });
        }
        for (k, c) in cs.iter().enumerate() {
            if c.len() >= params.l_param {
                return Err(SchemaError::TooLong {
                    polygon: j,
                    k,
                    len: c.len(),
                    bound: params.l_param,
                });
            }
        }
        if target.is_trivial(&Word::product(cs)) == Some(false) {
            return Err(SchemaError::NotTrivial(j));
        }
    }
    for &c in &al.constants() {
        if !relators.iter().any(|w| w.count_id(c) > 0) {
            continue;
        }
        let r = reps.0.get(&c).ok_or_else(|| SchemaError::MissingRepresentative(al.name(c).to_string()))?;
        if r.len() > lambda + mu {
            return Err(SchemaError::NotQuasiGeodesic {
                name: al.name(c).to_string(),
                len: r.len(),
                bound: lambda + mu,
            });
        }
    }

    let mut alphabet = Alphabet::new();
    for &c in &al.constants() {
        alphabet.add_constant(al.name(c)).expect("distinct constant names");
    }
    let constant_map: BTreeMap<u16, u16> = al
        .constants()
        .into_iter()
        .map(|c| (c, alphabet.lookup(al.name(c)).expect("copied")))
        .collect();
    let translate = |w: &Word| -> Word {
        reduce(w.letters().iter().map(|g| Generator::new(constant_map[&g.id()], g.sign())))
    };
    let mut legs = Vec::new();
    for (j, w) in relators.iter().enumerate() {
        let ls: Vec<u16> = (0..w.len())
            .map(|k| alphabet.add_variable(&format!("x{}_{}", j + 1, k + 1)).unwrap_or_else(|_| alphabet.fresh_variable("x")))
            .collect();
        legs.push(ls);
    }
    // Value of the generator at corner k of polygon j: the side word, inverted
    // for an inverse occurrence.
    let side = |j: usize, k: usize, sign: i8| -> Word {
        let ls = &legs[j];
        let n = ls.len();
        let c = translate(&choice.triples[j][k]);
        let w = Word::generator(Generator::pos(ls[k]))
            .concat(&c)
            .concat(&Word::generator(Generator::neg(ls[(k + 1) % n])));
        if sign < 0 {
            w.inverse()
        } else {
            w
        }
    };
    let mut out = EquationSystem::new(alphabet);
    let mut seen: BTreeMap<u16, (usize, usize, i8)> = BTreeMap::new();
    let mut rho = BTreeMap::new();
    let (mut matching, mut constant) = (0, 0);
    for (j, w) in relators.iter().enumerate() {
        for (k, &g) in w.letters().iter().enumerate() {
            let here = side(j, k, g.sign());
            if al.is_variable(g.id()) {
                if let Some(&(j0, k0, s0)) = seen.get(&g.id()) {
                    out.push(Equation::new(side(j0, k0, s0), here));
                    matching += 1;
                } else {
                    rho.insert(g.id(), here);
                }
                seen.insert(g.id(), (j, k, g.sign()));
            } else {
                let theta = translate(&reps.0[&g.id()]);
                out.push(Equation::new(here, theta));
                constant += 1;
            }
        }
    }
    let size_bound = schema_size_bound(sys.size(), params.l_param, lambda, mu);
    let size = out.size();
    if size > size_bound {
        return Err(SchemaError::SizeBound { size, bound: size_bound });
    }
    Ok(SchemaOutput {
        system: out,
        legs,
        rho,
        matching_equations: matching,
        constant_equations: constant,
        size_bound,
        input_alphabet: al.clone(),
    })
}

impl SchemaOutput {
    /// Maps a solution of the schema system to one of the input system.
    /// The result is checked against `original` whenever the target has a
    /// word problem.
    pub fn pullback(&self, original: &EquationSystem, target: &Target, phi: &Assignment) -> Result<Assignment, SchemaError> {
        if !self.system.is_solution(phi) {
            return Err(SchemaError::NotASolution);
        }
        let al = &self.system.alphabet;
        let back: BTreeMap<u16, u16> = al
            .constants()
            .into_iter()
            .map(|c| (c, self.input_alphabet.lookup(al.name(c)).expect("same constants")))
            .collect();
        let mut psi = Assignment::new();
        for (&z, image) in &self.rho {
            let w = substitute(image, |id| al.is_variable(id), phi).map_err(|_| SchemaError::NotASolution)?;
            let w = reduce(w.letters().iter().map(|g| Generator::new(back[&g.id()], g.sign())));
            psi.insert(z, w);
        }
        let ok = match target {
            Target::Free => original.is_solution(&psi),
            _ => original
                .evaluate(&psi)
                .map(|vals| vals.iter().all(|v| target.is_trivial(v) != Some(false)))
                .unwrap_or(false),
        };
        if ok {
            Ok(psi)
        } else {
            Err(SchemaError::PullbackFailed)
        }
    }

    /// The leg values a free-group solution induces under trivial centres.
    pub fn forward(&self, original: &EquationSystem, psi: &Assignment) -> Assignment {
        let ial = &self.input_alphabet;
        let al = &self.system.alphabet;
        let to_out = |w: &Word| reduce(w.letters().iter().map(|g| Generator::new(al.lookup(ial.name(g.id())).expect("same constants"), g.sign())));
        let value = |g: Generator| -> Word {
            let v = if ial.is_variable(g.id()) {
                psi.get(&g.id()).cloned().unwrap_or_default()
            } else {
                Word::generator(Generator::pos(g.id()))
            };
            if g.is_inverse() {
                v.inverse()
            } else {
                v
            }
        };
        let mut phi = Assignment::new();
        for (w, ls) in original.relators().iter().zip(&self.legs) {
            let z: Vec<Word> = w.letters().iter().map(|&g| value(g)).collect();
            let vals = tripod_legs(&z);
            for (k, &l) in ls.iter().enumerate() {
                phi.insert(l, vals.get(k).map(&to_out).unwrap_or_default());
            }
        }
        phi
    }
}

/// `L = q * 2^E` with `E = 5050 (delta+1)^6 (2|A|)^(2 delta)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LConstant {
    pub q: u64,
    /// `log2(L / q)`, exact.
    pub exponent: BigUint,
    /// Decimal digits of `L`; `None` when the exponent is too large to settle it.
    pub digits: Option<BigUint>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LError {
    #[error("q and |A| must be at least 1")]
    Domain,
    #[error("L has 2^{0} bits or more; expansion refused")]
    TooLarge(BigUint),
}

/// log10(2) to 60 places.
const LOG10_2: &str = "301029995663981195213738894724493026768189881462108541310430";

pub fn compute_l(q: u64, delta: u32, alphabet: u64) -> Result<LConstant, LError> {
    if q == 0 || alphabet == 0 {
        return Err(LError::Domain);
    }
    let d1 = BigUint::from(delta) + 1u32;
    let exponent = BigUint::from(5050u32) * d1.pow(6) * (BigUint::from(2 * alphabet)).pow(2 * delta);
    let digits = decimal_digits(q, &exponent);
    Ok(LConstant { q, exponent, digits })
}

/// floor(log10(q) + E log10(2)) + 1, from interval bounds; falls back to
/// exact arithmetic when the bounds straddle an integer and `E` is small.
fn decimal_digits(q: u64, e: &BigUint) -> Option<BigUint> {
    let scale = BigUint::from(10u32).pow(60);
    let l2: BigUint = LOG10_2.parse().expect("digits");
    // log10(q) bracketed within 1e-12 of its f64 value.
    let lq = (q as f64).log10();
    let to_fixed = |x: f64| BigUint::from((x.max(0.0) * 1e12) as u128) * BigUint::from(10u32).pow(48);
    let lo = e * &l2 + to_fixed(lq - 1e-12);
    let hi = e * (&l2 + 1u32) + to_fixed(lq + 1e-12) + BigUint::from(10u32).pow(48);
    let (flo, fhi) = (&lo / &scale, &hi / &scale);
    if flo == fhi {
        return Some(flo + 1u32);
    }
    let bits = e.to_u64()?;
    if bits > 1 << 24 {
        return None;
    }
    let l = BigUint::from(q) << bits;
    let mut d = flo.to_u64()?;
    let mut p = BigUint::from(10u32).pow(d as u32);
    while p <= l {
        p *= 10u32;
        d += 1;
    }
    Some(BigUint::from(d))
}

impl LConstant {
    /// log2(L) when q is a power of two, otherwise `None`.
    pub fn log2_exact(&self) -> Option<BigUint> {
        self.q.is_power_of_two().then(|| &self.exponent + self.q.trailing_zeros())
    }

    /// The full integer, refused above `max_bits`.
    pub fn expand(&self, max_bits: u64) -> Result<BigUint, LError> {
        match self.exponent.to_u64() {
            Some(e) if e <= max_bits => Ok(BigUint::from(self.q) << e),
            _ => Err(LError::TooLarge(self.exponent.clone())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::triangulate;

    #[test]
    fn l_values() {
        let l = compute_l(1, 1, 2).unwrap();
        assert_eq!(l.exponent, BigUint::from(5_171_200u32));
        assert_eq!(l.log2_exact(), Some(BigUint::from(5_171_200u32)));
        let small = compute_l(1, 0, 1).unwrap();
        assert_eq!(small.exponent, BigUint::from(5050u32));
        let full = small.expand(10_000).unwrap();
        assert_eq!(small.digits, Some(BigUint::from(full.to_string().len())));
        let twice = compute_l(2, 0, 1).unwrap();
        assert_eq!(twice.expand(10_000).unwrap(), full * 2u32);
        assert_eq!(twice.log2_exact(), Some(BigUint::from(5051u32)));
        assert!(compute_l(3, 0, 1).unwrap().log2_exact().is_none());
        assert_eq!(compute_l(0, 1, 1), Err(LError::Domain));
        let huge = compute_l(1, 40, 50).unwrap();
        assert!(huge.expand(1 << 30).is_err());
        assert!(huge.digits.is_none());
        let big = compute_l(1, 5, 10).unwrap();
        let approx = big.exponent.to_f64().unwrap() * 2f64.log10();
        let d = big.digits.unwrap().to_f64().unwrap();
        assert!((d - approx.floor() - 1.0).abs() < 1e7, "{d} vs {approx}");
        for (q, d, a) in [(1, 0, 2), (7, 0, 1), (1000, 0, 1), (5, 0, 3)] {
            let l = compute_l(q, d, a).unwrap();
            assert_eq!(l.digits, Some(BigUint::from(l.expand(1 << 20).unwrap().to_string().len())));
        }
    }

    #[test]
    fn centre_file() {
        let s = EquationSystem::parse("gens: a b\nvars: x y z\nx y z = 1\ny = a\n").unwrap();
        let c = CTripleChoice::parse("# centres\n1: a ; a^-1 ; 1\n", &s).unwrap();
        assert_eq!(c.triples[0][0], s.alphabet.parse_word("a").unwrap());
        assert_eq!(c.triples[1], vec![Word::empty(); 2]);
        for bad in ["3: a\n", "1: a ; b\n", "1: x ; 1 ; 1\n", "1 a\n", "1: a ; 1 ; 1 )\n", "1: 1;1;1\n1: 1;1;1\n"] {
            assert!(matches!(CTripleChoice::parse(bad, &s), Err(SchemaError::Parse { .. })), "{bad}");
        }
    }

    #[test]
    fn size_bound_example() {
        assert_eq!(schema_size_bound(20, 4, 1, 0), 640);
    }

    #[test]
    fn free_product_word_problem() {
        let f = vec![vec![0, 1]];
        let g = |id, s| Generator::new(id, s);
        let w = Word::from(vec![g(0, 1), g(1, 1), g(0, -1), g(1, -1)]);
        assert!(free_product_trivial(&f, &w));
        assert!(!free_product_trivial(&[], &w));
        let w2 = Word::from(vec![g(0, 1), g(2, 1), g(0, -1), g(2, -1)]);
        assert!(!free_product_trivial(&f, &w2));
    }

    #[test]
    fn degenerate_tripod() {
        let s = EquationSystem::parse("gens: a b\nvars: x y z\nx y z = 1\ny = a\nz = b\n").unwrap();
        let out = build_schema(&s, &CTripleChoice::trivial(&s), &Representatives::geodesic(&s.alphabet), &Target::Free, SchemaParams { l_param: 1 }).unwrap();
        assert_eq!(out.constant_equations, 2);
        assert_eq!(out.matching_equations, 2);
        assert!(out.system.occurrences().values().all(|&n| n <= 2));
        let al = &s.alphabet;
        let psi: Assignment = [
            (al.lookup("x").unwrap(), al.parse_word("b^-1 a^-1").unwrap()),
            (al.lookup("y").unwrap(), al.parse_word("a").unwrap()),
            (al.lookup("z").unwrap(), al.parse_word("b").unwrap()),
        ]
        .into();
        let phi = out.forward(&s, &psi);
        assert!(out.system.is_solution(&phi));
        assert_eq!(out.pullback(&s, &Target::Free, &phi).unwrap(), psi);
        assert_eq!(out.pullback(&s, &Target::Free, &Assignment::new()), Err(SchemaError::NotASolution));
    }

    #[test]
    fn rejects_bad_choices() {
        let s = EquationSystem::parse("gens: a b\nvars: x y\nx y a = 1\nx^-1 y^-1 b = 1\n").unwrap();
        let reps = Representatives::geodesic(&s.alphabet);
        let p = SchemaParams { l_param: 3 };
        let mut c = CTripleChoice::trivial(&s);
        let a = s.alphabet.parse_word("a").unwrap();
        c.triples[0][0] = a.clone();
        assert_eq!(build_schema(&s, &c, &reps, &Target::Free, p).unwrap_err(), SchemaError::NotTrivial(0));
        c.triples[0][1] = a.inverse();
        assert!(build_schema(&s, &c, &reps, &Target::Free, p).is_ok());
        assert!(matches!(build_schema(&s, &c, &reps, &Target::Free, SchemaParams { l_param: 1 }), Err(SchemaError::TooLong { .. })));
        c.triples.pop();
        assert_eq!(build_schema(&s, &c, &reps, &Target::Free, p).unwrap_err(), SchemaError::MissingTriple(1));
        let long = triangulate(&EquationSystem::parse("gens: a\nvars: x y\nx y x^-1 y^-1 = a\n").unwrap());
        let out = build_schema(&long.system, &CTripleChoice::trivial(&long.system), &reps, &Target::Free, p).unwrap();
        assert!(out.system.is_quadratic());
        let raw = EquationSystem::parse("gens: a\nvars: x y\nx y x^-1 y^-1 = a\n").unwrap();
        assert!(matches!(build_schema(&raw, &CTripleChoice::trivial(&raw), &reps, &Target::Free, p), Err(SchemaError::NotTriangular(0, 5))));
    }
}
