//! Quadratic sets of cyclic words and the surfaces they glue into.
//!
//! Letters are kept unreduced: a quadratic set is a cell structure, not a
//! group element, so `a a^-1` on a disc boundary is a legitimate sphere.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::freewords::{reduce, Generator, Word};
use crate::symbols::Alphabet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("letter '{0}' occurs {1} times, expected exactly 2")]
    NotQuadratic(String, usize),
    #[error("empty word in a quadratic set")]
    EmptyWord,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("vertex has degree {expected} but {got} insertions were given")]
    Arity { expected: usize, got: usize },
    #[error("inserted words multiply to {got}, expected {expected}")]
    ProductMismatch { expected: String, got: String },
    #[error("no vertex {0}")]
    UnknownVertex(usize),
    #[error("case {0} is not one of 1..4")]
    BadCase(u8),
    #[error("case iv needs an even numerator, got {0}")]
    OddNumerator(i64),
    #[error("inconsistent declaration: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SetKind {
    Orientable,
    NonOrientable,
}

/// A quadratic set of cyclic words over an edge alphabet.
#[derive(Debug, Clone)]
pub struct QuadraticSet {
    pub alphabet: Alphabet,
    pub words: Vec<Vec<Generator>>,
    pub kind: SetKind,
}

/// Position of a letter: word index and offset.
type Slot = (usize, usize);

fn occurrences(words: &[Vec<Generator>]) -> BTreeMap<u16, Vec<Slot>> {
    let mut occ: BTreeMap<u16, Vec<Slot>> = BTreeMap::new();
    for (w, word) in words.iter().enumerate() {
        for (i, g) in word.iter().enumerate() {
            occ.entry(g.id()).or_default().push((w, i));
        }
    }
    occ
}

/// Checks the exactly-twice condition and sorts the set into a kind.
pub fn classify(alphabet: &Alphabet, words: Vec<Vec<Generator>>) -> Result<QuadraticSet, SurfaceError> {
    if words.iter().any(|w| w.is_empty()) {
        return Err(SurfaceError::EmptyWord);
    }
    let occ = occurrences(&words);
    for (&id, slots) in &occ {
        if slots.len() != 2 {
            return Err(SurfaceError::NotQuadratic(alphabet.name(id).to_string(), slots.len()));
        }
    }
    let same_sign = occ
        .values()
        .any(|s| words[s[0].0][s[0].1].sign() == words[s[1].0][s[1].1].sign());
    Ok(QuadraticSet {
        alphabet: alphabet.clone(),
        words,
        kind: if same_sign {
            SetKind::NonOrientable
        } else {
            SetKind::Orientable
        },
    })
}

/// Parses one cyclic word per line: letters `name` or `name^-1`, whitespace
/// separated, `#` starts a comment. Names are registered on first use.
pub fn parse_words(text: &str, alphabet: &mut Alphabet) -> Result<Vec<Vec<Generator>>, SurfaceError> {
    let mut words = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| SurfaceError::Parse { line: n + 1, message };
        let mut word = Vec::new();
        for tok in line.split_whitespace() {
            let (name, sign) = match tok.split_once('^') {
                None => (tok, 1i8),
                Some((name, "-1")) => (name, -1),
                Some((name, "1")) => (name, 1),
                Some((_, e)) => return Err(err(format!("exponent must be 1 or -1, got '{e}'"))),
            };
            let id = match alphabet.lookup(name) {
                Some(id) => id,
                None => alphabet.add_constant(name).map_err(|e| err(e.to_string()))?,
            };
            word.push(Generator::new(id, sign));
        }
        words.push(word);
    }
    Ok(words)
}

impl QuadraticSet {
    pub fn parse(text: &str) -> Result<Self, SurfaceError> {
        let mut alphabet = Alphabet::new();
        let words = parse_words(text, &mut alphabet)?;
        classify(&alphabet, words)
    }

    pub fn show_word(&self, w: &[Generator]) -> String {
        show_letters(&self.alphabet, w)
    }

    pub fn edge_count(&self) -> usize {
        self.words.iter().map(|w| w.len()).sum::<usize>() / 2
    }
}

pub fn show_letters(alphabet: &Alphabet, w: &[Generator]) -> String {
    let parts: Vec<String> = w
        .iter()
        .map(|g| {
            if g.is_inverse() {
                format!("{}^-1", alphabet.name(g.id()))
            } else {
                alphabet.name(g.id()).to_string()
            }
        })
        .collect();
    parts.join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Component {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler: i64,
    pub orientable: bool,
    pub genus: i64,
    /// Indices of the words forming this component.
    pub words: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GluedSurface {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub face_count: usize,
    pub components: Vec<Component>,
    /// Sum of the component genera.
    pub genus: i64,
    /// `corner_vertex[w][i]`: vertex at the corner after letter `i` of word `w`.
    pub corner_vertex: Vec<Vec<usize>>,
}

impl GluedSurface {
    pub fn euler(&self) -> i64 {
        self.components.iter().map(|c| c.euler).sum()
    }

    pub fn is_connected(&self) -> bool {
        self.components.len() == 1
    }

    pub fn is_orientable(&self) -> bool {
        self.components.iter().all(|c| c.orientable)
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a] = b;
        }
    }
}

/// Corners bounding letter `i` of a word of length `n`: (tail, head).
fn endpoints(g: Generator, i: usize, n: usize) -> (usize, usize) {
    let before = (i + n - 1) % n;
    if g.is_inverse() {
        (i, before)
    } else {
        (before, i)
    }
}

/// Builds the cell complex and reads off its invariants.
pub fn glue(q: &QuadraticSet) -> GluedSurface {
    let words = &q.words;
    let offsets: Vec<usize> = words
        .iter()
        .scan(0, |acc, w| {
            let o = *acc;
            *acc += w.len();
            Some(o)
        })
        .collect();
    let total: usize = words.iter().map(|w| w.len()).sum();
    let occ = occurrences(words);

    let mut corners = UnionFind::new(total);
    for slots in occ.values() {
        let [(w1, i1), (w2, i2)] = [slots[0], slots[1]];
        let (t1, h1) = endpoints(words[w1][i1], i1, words[w1].len());
        let (t2, h2) = endpoints(words[w2][i2], i2, words[w2].len());
        corners.union(offsets[w1] + t1, offsets[w2] + t2);
        corners.union(offsets[w1] + h1, offsets[w2] + h2);
    }

    let mut vertex_id: BTreeMap<usize, usize> = BTreeMap::new();
    let corner_vertex: Vec<Vec<usize>> = words
        .iter()
        .enumerate()
        .map(|(w, word)| {
            (0..word.len())
                .map(|i| {
                    let root = corners.find(offsets[w] + i);
                    let next = vertex_id.len();
                    *vertex_id.entry(root).or_insert(next)
                })
                .collect()
        })
        .collect();

    // Disc orientations: letter pairs must be read oppositely.
    let mut orient: Vec<Option<i8>> = vec![None; words.len()];
    let mut coherent = vec![true; words.len()];
    let mut adj: Vec<Vec<(usize, i8)>> = vec![Vec::new(); words.len()];
    for slots in occ.values() {
        let [(w1, i1), (w2, i2)] = [slots[0], slots[1]];
        let rel = -words[w1][i1].sign() * words[w2][i2].sign();
        if w1 == w2 {
            if rel != 1 {
                coherent[w1] = false;
            }
        } else {
            adj[w1].push((w2, rel));
            adj[w2].push((w1, rel));
        }
    }
    let mut comp_of = vec![0usize; words.len()];
    let mut components = Vec::new();
    for start in 0..words.len() {
        if orient[start].is_some() {
            continue;
        }
        let mut ok = true;
        let mut members = Vec::new();
        orient[start] = Some(1);
        let mut queue = VecDeque::from([start]);
        while let Some(w) = queue.pop_front() {
            members.push(w);
            comp_of[w] = components.len();
            ok &= coherent[w];
            let o = orient[w].expect("visited");
            for &(v, rel) in &adj[w] {
                match orient[v] {
                    None => {
                        orient[v] = Some(o * rel);
                        queue.push_back(v);
                    }
                    Some(ov) => ok &= ov == o * rel,
                }
            }
        }
        members.sort_unstable();
        components.push(Component {
            vertices: 0,
            edges: members.iter().map(|&w| words[w].len()).sum::<usize>() / 2,
            faces: members.len(),
            euler: 0,
            orientable: ok,
            genus: 0,
            words: members,
        });
    }
    let mut seen = vec![false; vertex_id.len()];
    for (w, cv) in corner_vertex.iter().enumerate() {
        for &v in cv {
            if !seen[v] {
                seen[v] = true;
                components[comp_of[w]].vertices += 1;
            }
        }
    }
    for c in &mut components {
        c.euler = c.vertices as i64 - c.edges as i64 + c.faces as i64;
        c.genus = if c.orientable { (2 - c.euler) / 2 } else { 2 - c.euler };
    }
    GluedSurface {
        vertex_count: vertex_id.len(),
        edge_count: q.edge_count(),
        face_count: words.len(),
        genus: components.iter().map(|c| c.genus).sum(),
        components,
        corner_vertex,
    }
}

/// One corner `x | y` of a vertex link: the letters `words[word][index]`
/// and the one after it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Corner {
    pub word: usize,
    pub index: usize,
    /// Read as `a_{j+1}^-1 a_j` rather than `a_j^-1 a_{j+1}`.
    pub reversed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Girth {
    pub vertex: usize,
    pub corners: Vec<Corner>,
}

impl Girth {
    pub fn degree(&self) -> usize {
        self.corners.len()
    }

    /// Corner subwords as read in the words.
    pub fn subwords(&self, q: &QuadraticSet) -> Vec<[Generator; 2]> {
        self.corners
            .iter()
            .map(|c| {
                let w = &q.words[c.word];
                [w[c.index], w[(c.index + 1) % w.len()]]
            })
            .collect()
    }

    /// Emanating edges `a_1 .. a_l`, each oriented away from the vertex.
    pub fn edges(&self, q: &QuadraticSet) -> Vec<Generator> {
        self.subwords(q)
            .iter()
            .zip(&self.corners)
            .map(|(&[x, y], c)| if c.reversed { y } else { x.inv() })
            .collect()
    }
}

/// Walks the link of the vertex at `start`, leaving through the letter after
/// the corner when `forward`.
pub fn girth_from(q: &QuadraticSet, start: (usize, usize), forward: bool) -> Girth {
    let words = &q.words;
    let occ = occurrences(words);
    let glued_vertex = glue(q).corner_vertex[start.0][start.1];
    let mut state = (start.0, start.1, forward);
    let mut corners = Vec::new();
    loop {
        let (w, i, fwd) = state;
        corners.push(Corner {
            word: w,
            index: i,
            reversed: !fwd,
        });
        let n = words[w].len();
        let e = if fwd { (i + 1) % n } else { i };
        let g = words[w][e];
        let is_tail = fwd == !g.is_inverse();
        let slots = &occ[&g.id()];
        let (w2, f) = if slots[0] == (w, e) { slots[1] } else { slots[0] };
        let n2 = words[w2].len();
        let at_start = is_tail == !words[w2][f].is_inverse();
        state = if at_start {
            (w2, (f + n2 - 1) % n2, false)
        } else {
            (w2, f, true)
        };
        if (state.0, state.1) == start {
            break;
        }
        assert!(corners.len() <= 2 * q.edge_count(), "vertex link does not close");
    }
    assert!(!corners.is_empty());
    Girth {
        vertex: glued_vertex,
        corners,
    }
}

/// Girth of a vertex, starting at its first corner and walking forward.
pub fn girth_of(q: &QuadraticSet, vertex: usize) -> Result<Girth, SurfaceError> {
    let g = glue(q);
    for (w, cv) in g.corner_vertex.iter().enumerate() {
        if let Some(i) = cv.iter().position(|&v| v == vertex) {
            return Ok(girth_from(q, (w, i), true));
        }
    }
    Err(SurfaceError::UnknownVertex(vertex))
}

/// A vertex extended by `W = prod psi_j^(+-1)`.
#[derive(Debug, Clone)]
pub struct ExtendedVertex {
    pub girth: Girth,
    /// Emanating edges `a_1 .. a_l`.
    pub edges: Vec<Generator>,
    pub psis: Vec<Word>,
    pub product: Word,
    /// The set with every `psi_j` inserted into its corner.
    pub words: Vec<Vec<Generator>>,
}

/// Inserts `psis[j]` into the `j`-th corner of the girth. Reversed corners
/// contribute `psi_j^-1` to the product. When `expected` is given the product
/// must equal it.
pub fn extend_vertex(
    q: &QuadraticSet,
    girth: &Girth,
    psis: &[Word],
    expected: Option<&Word>,
) -> Result<ExtendedVertex, SurfaceError> {
    if psis.len() != girth.degree() {
        return Err(SurfaceError::Arity {
            expected: girth.degree(),
            got: psis.len(),
        });
    }
    let signed: Vec<Word> = psis
        .iter()
        .zip(&girth.corners)
        .map(|(p, c)| if c.reversed { p.inverse() } else { p.clone() })
        .collect();
    let product = Word::product(signed.iter());
    if let Some(w) = expected {
        if *w != product {
            return Err(SurfaceError::ProductMismatch {
                expected: show_letters(&q.alphabet, w.letters()),
                got: show_letters(&q.alphabet, product.letters()),
            });
        }
    }
    let mut inserts: BTreeMap<(usize, usize), &Word> = BTreeMap::new();
    for (c, p) in girth.corners.iter().zip(psis) {
        inserts.insert((c.word, c.index), p);
    }
    let words = q
        .words
        .iter()
        .enumerate()
        .map(|(w, word)| {
            let mut out = Vec::new();
            for (i, &g) in word.iter().enumerate() {
                out.push(g);
                if let Some(p) = inserts.get(&(w, i)) {
                    out.extend_from_slice(p.letters());
                }
            }
            out
        })
        .collect();
    Ok(ExtendedVertex {
        girth: girth.clone(),
        edges: girth.edges(q),
        psis: psis.to_vec(),
        product,
        words,
    })
}

/// Corners rewritten over the new letters `A_i`.
#[derive(Debug, Clone)]
pub struct Augmentation {
    /// `A_1^-1 A_2, ..., A_{l-1}^-1 A_l` and finally `A_l^-1 W A_1`.
    pub corners: Vec<Word>,
    /// `A_i = psi_1 .. psi_{i-1} a_i`.
    pub definitions: Vec<(u16, Word)>,
    /// `a_i^-1 (psi_1..psi_{i-1})^-1 (psi_1..psi_i) a_{i+1}` before cancellation.
    pub expanded: Vec<Vec<Generator>>,
}

/// Augments an extended vertex. `names` are fresh letters for `A_1 .. A_l`;
/// `w` is the letter standing for the product `W`.
pub fn augment(ext: &ExtendedVertex, names: &[u16], w: Generator) -> Augmentation {
    let l = ext.edges.len();
    assert_eq!(names.len(), l, "one new letter per corner");
    let a: Vec<Word> = ext.edges.iter().map(|&g| Word::generator(g)).collect();
    let signed: Vec<Word> = ext
        .psis
        .iter()
        .zip(&ext.girth.corners)
        .map(|(p, c)| if c.reversed { p.inverse() } else { p.clone() })
        .collect();
    let prefix = |i: usize| Word::product(signed[..i].iter());
    let big = |i: usize| Word::generator(Generator::pos(names[i]));
    let mut corners = Vec::new();
    let mut expanded = Vec::new();
    for j in 0..l {
        let next = (j + 1) % l;
        if next == 0 {
            corners.push(Word::product([&big(j).inverse(), &Word::generator(w), &big(0)]));
        } else {
            corners.push(big(j).inverse().concat(&big(next)));
        }
        let mut raw: Vec<Generator> = a[j].inverse().into_letters();
        raw.extend(prefix(j).inverse().into_letters());
        raw.extend(prefix(j + 1).into_letters());
        raw.extend(a[next].letters());
        expanded.push(raw);
    }
    let definitions = (0..l).map(|i| (names[i], prefix(i).concat(&a[i]))).collect();
    Augmentation {
        corners,
        definitions,
        expanded,
    }
}

/// Substitutes the `A_i` definitions and `W` back into the augmented corners.
pub fn expand_augmentation(aug: &Augmentation, w: Generator, product: &Word) -> Vec<Word> {
    aug.corners
        .iter()
        .map(|c| {
            c.map_letters(|g| {
                let image = if g.id() == w.id() {
                    product.clone()
                } else {
                    aug.definitions
                        .iter()
                        .find(|(id, _)| *id == g.id())
                        .map(|(_, d)| d.clone())
                        .unwrap_or_else(|| Word::generator(Generator::pos(g.id())))
                };
                if g.is_inverse() {
                    image.inverse()
                } else {
                    image
                }
            })
        })
        .collect()
}

/// Genus of `{u_1..u_t}` when `t` holes of a genus-`k` surface are glued
/// into a genus-`n` surface. Cases: 1 both orientable, 2 both
/// non-orientable, 3 surface orientable and set non-orientable, 4 the
/// reverse.
pub fn genus_formula(case: u8, n: i64, k: i64, t: i64) -> Result<i64, SurfaceError> {
    match case {
        1 => Ok(n - k - t + 1),
        2 => Ok(n - k - 2 * t + 2),
        3 => Ok(n - 2 * k - 2 * t + 2),
        4 => {
            let num = n - k - 2 * t + 2;
            if num % 2 != 0 {
                Err(SurfaceError::OddNumerator(num))
            } else {
                Ok(num / 2)
            }
        }
        c => Err(SurfaceError::BadCase(c)),
    }
}

/// A joint extension on `t` vertices by `W_1 .. W_t`.
#[derive(Debug, Clone)]
pub struct JointExtension {
    pub vertices: Vec<usize>,
    pub words: Vec<Word>,
    pub genus: usize,
    pub kind: SetKind,
}

impl JointExtension {
    pub fn length(&self) -> usize {
        self.words.iter().map(|w| w.len()).sum()
    }

    /// Genus the tuple `(W_1..W_t)` must have in the factor.
    pub fn tuple_genus(&self) -> Result<usize, SurfaceError> {
        let (g, t) = (self.genus as i64, self.words.len() as i64);
        let l = match self.kind {
            SetKind::Orientable => g - t + 1,
            SetKind::NonOrientable => g - 2 * t + 2,
        };
        usize::try_from(l).map_err(|_| {
            SurfaceError::Inconsistent(format!("genus {g} extension on {t} vertices needs tuple genus {l}"))
        })
    }
}

/// Framing genus and extension genera of a multi-form.
#[derive(Debug, Clone)]
pub struct MultiForm {
    pub framing: SetKind,
    pub framing_genus: usize,
    pub extensions: Vec<(SetKind, usize)>,
}

pub fn multiform_genus(m: &MultiForm) -> Result<usize, SurfaceError> {
    if m.framing == SetKind::NonOrientable && m.framing_genus == 0 {
        return Err(SurfaceError::Inconsistent("non-orientable framing of genus 0".into()));
    }
    if m.extensions.iter().any(|&(k, g)| k == SetKind::NonOrientable && g == 0) {
        return Err(SurfaceError::Inconsistent("non-orientable extension of genus 0".into()));
    }
    let k = m.framing_genus;
    let sum: usize = m.extensions.iter().map(|e| e.1).sum();
    let any_non = m.extensions.iter().any(|e| e.0 == SetKind::NonOrientable);
    Ok(match (m.framing, any_non) {
        (SetKind::Orientable, false) | (SetKind::NonOrientable, true) => k + sum,
        (SetKind::Orientable, true) => 2 * k + sum,
        (SetKind::NonOrientable, false) => k + 2 * sum,
    })
}

/// Graphviz rendering of the embedded graph.
pub fn to_dot(q: &QuadraticSet) -> String {
    let g = glue(q);
    let mut out = String::from("graph quadratic_set {\n");
    for v in 0..g.vertex_count {
        let _ = writeln!(out, "  v{v};");
    }
    let mut done = std::collections::BTreeSet::new();
    for (w, word) in q.words.iter().enumerate() {
        for (i, &l) in word.iter().enumerate() {
            if !done.insert(l.id()) {
                continue;
            }
            let (t, h) = endpoints(l, i, word.len());
            let _ = writeln!(
                out,
                "  v{} -- v{} [label=\"{}\"];",
                g.corner_vertex[w][t],
                g.corner_vertex[w][h],
                q.alphabet.name(l.id())
            );
        }
    }
    out.push_str("}\n");
    out
}

/// A surface with `t` holes glued shut along a quadratic hole labelling.
#[derive(Debug, Clone)]
pub struct HoleConfiguration {
    pub case: u8,
    pub surface_genus: usize,
    pub holes: usize,
    /// The glued surface.
    pub glued: QuadraticSet,
    /// The hole labels `u_1 .. u_t` as a set of their own.
    pub labels: QuadraticSet,
}

fn random_labels<R: Rng>(rng: &mut R, t: usize, letters: usize, orientable: bool) -> Option<Vec<Vec<Generator>>> {
    let mut slots: Vec<Generator> = Vec::new();
    for id in 0..letters as u16 {
        slots.push(Generator::pos(id));
        let s = if orientable || rng.gen_bool(0.5) { -1 } else { 1 };
        slots.push(Generator::new(id, s));
    }
    if !orientable && slots.chunks(2).all(|p| p[0].sign() != p[1].sign()) {
        slots[1] = slots[1].inv();
    }
    slots.shuffle(rng);
    if t > slots.len() {
        return None;
    }
    let mut cuts: Vec<usize> = (1..slots.len()).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts[..t - 1].to_vec();
    cuts.sort_unstable();
    let mut words = Vec::new();
    let mut start = 0;
    for c in cuts.into_iter().chain(std::iter::once(slots.len())) {
        words.push(slots[start..c].to_vec());
        start = c;
    }
    Some(words)
}

/// Random configuration for one of the four genus-formula cases with at
/// most `max_edges` edges in the glued set. Returns `None` when the sampled
/// parameters do not fit; callers retry.
pub fn random_hole_configuration<R: Rng>(rng: &mut R, case: u8, max_edges: usize) -> Option<HoleConfiguration> {
    let surface_orientable = matches!(case, 1 | 3);
    let labels_orientable = matches!(case, 1 | 4);
    let k = if surface_orientable {
        rng.gen_range(0..=2)
    } else {
        rng.gen_range(1..=3)
    };
    let t = rng.gen_range(1..=3);
    let m = rng.gen_range(1..=4);
    let base = if surface_orientable { 2 * k } else { k };
    let diagonals = rng.gen_range(0..=2);
    if base + t + m + diagonals > max_edges {
        return None;
    }

    let mut al = Alphabet::new();
    let u_ids: Vec<u16> = (1..=m).map(|i| al.add_constant(&format!("u{i}")).expect("fresh")).collect();
    let labels_raw = random_labels(rng, t, m, labels_orientable)?;
    let labels_raw: Vec<Vec<Generator>> = labels_raw
        .into_iter()
        .map(|w| w.into_iter().map(|g| Generator::new(u_ids[g.id() as usize], g.sign())).collect())
        .collect();
    let labels = classify(&al, labels_raw.clone()).ok()?;
    let lg = glue(&labels);
    let want = if labels_orientable {
        SetKind::Orientable
    } else {
        SetKind::NonOrientable
    };
    if !lg.is_connected() || lg.is_orientable() != labels_orientable || labels.kind != want {
        return None;
    }

    // One polygon: surface word, then c_i u_i c_i^-1 for every hole.
    let mut poly: Vec<Generator> = Vec::new();
    for i in 1..=k {
        if surface_orientable {
            let a = al.add_constant(&format!("a{i}")).expect("fresh");
            let b = al.add_constant(&format!("b{i}")).expect("fresh");
            poly.extend([Generator::neg(a), Generator::neg(b), Generator::pos(a), Generator::pos(b)]);
        } else {
            let a = al.add_constant(&format!("a{i}")).expect("fresh");
            poly.extend([Generator::pos(a), Generator::pos(a)]);
        }
    }
    for (i, u) in labels_raw.iter().enumerate() {
        let c = al.add_constant(&format!("c{}", i + 1)).expect("fresh");
        poly.push(Generator::pos(c));
        poly.extend_from_slice(u);
        poly.push(Generator::neg(c));
    }
    let mut words = vec![poly];
    for d in 1..=diagonals {
        let idx = rng.gen_range(0..words.len());
        if words[idx].len() < 2 {
            continue;
        }
        let mut w = words.swap_remove(idx);
        let r = rng.gen_range(0..w.len());
        w.rotate_left(r);
        let cut = rng.gen_range(1..w.len());
        let e = al.add_constant(&format!("d{d}")).expect("fresh");
        let mut left = w[..cut].to_vec();
        left.push(Generator::pos(e));
        let mut right = vec![Generator::neg(e)];
        right.extend_from_slice(&w[cut..]);
        words.push(left);
        words.push(right);
    }
    for w in &mut words {
        let r = rng.gen_range(0..w.len());
        w.rotate_left(r);
        if rng.gen_bool(0.5) {
            w.reverse();
            for g in w.iter_mut() {
                *g = g.inv();
            }
        }
    }
    words.shuffle(rng);
    let glued = classify(&al, words).ok()?;
    Some(HoleConfiguration {
        case,
        surface_genus: k,
        holes: t,
        glued,
        labels,
    })
}

/// Freely reduced product of a word list, for comparing with expected `W`.
pub fn product_of(words: &[Vec<Generator>]) -> Word {
    reduce(words.iter().flatten().copied())
}
