//! Elementary transformations of generalized equations and their solution carriers.
//!
//! Each transformation is a pure structural map that either produces the new
//! equation or names the side condition it failed. `carry` pushes a solution
//! forward (returning `None` when this branch of the family does not fit the
//! solution) and `pull` maps a solution of the output back.

use std::fmt;
use std::str::FromStr;

use super::geneq::{BaseId, GenEq, GenEqError, GenEqSolution, Label};
use crate::freewords::Word;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Step {
    /// ET1: cut `base` at `p` and its dual at the connected `q`.
    Cut { base: BaseId, p: u32, q: u32 },
    /// ET2: move `moved`, lying inside `carrier`, onto the dual of `carrier`.
    Transfer { carrier: BaseId, moved: BaseId },
    /// ET3
    RemoveMatched { base: BaseId },
    /// ET4
    RemoveLone { base: BaseId },
    /// ET5 placing `p` of `base` on the existing boundary `q` of the dual.
    Tie { base: BaseId, p: u32, q: u32 },
    /// ET5 placing `p` of `base` on a new boundary between `q` and `q + 1`.
    Insert { base: BaseId, p: u32, q: u32 },
    /// Drops items `1..upto` together with the one base pair covering them.
    Delete { upto: u32 },
    /// Merges away the listed items, pinning them to the empty word.
    /// Base pairs left with no items disappear.
    Collapse { items: Vec<u32> },
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Step::Cut { base, p, q } => write!(f, "et1 {base} {p} {q}"),
            Step::Transfer { carrier, moved } => write!(f, "et2 {carrier} {moved}"),
            Step::RemoveMatched { base } => write!(f, "et3 {base}"),
            Step::RemoveLone { base } => write!(f, "et4 {base}"),
            Step::Tie { base, p, q } => write!(f, "et5 tie {base} {p} {q}"),
            Step::Insert { base, p, q } => write!(f, "et5 new {base} {p} {q}"),
            Step::Delete { upto } => write!(f, "delete {upto}"),
            Step::Collapse { ref items } => {
                write!(f, "collapse")?;
                items.iter().try_for_each(|i| write!(f, " {i}"))
            }
        }
    }
}

impl FromStr for Step {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: Vec<&str> = s.split_whitespace().collect();
        let n = |i: usize| -> Result<u32, String> {
            t.get(i)
                .ok_or_else(|| format!("missing field {i}"))?
                .parse::<u32>()
                .map_err(|e| format!("field {i}: {e}"))
        };
        let step = match (t.first().copied(), t.get(1).copied()) {
            (Some("et1"), _) if t.len() == 4 => Step::Cut { base: n(1)?, p: n(2)?, q: n(3)? },
            (Some("et2"), _) if t.len() == 3 => Step::Transfer { carrier: n(1)?, moved: n(2)? },
            (Some("et3"), _) if t.len() == 2 => Step::RemoveMatched { base: n(1)? },
            (Some("et4"), _) if t.len() == 2 => Step::RemoveLone { base: n(1)? },
            (Some("et5"), Some("tie")) if t.len() == 5 => Step::Tie { base: n(2)?, p: n(3)?, q: n(4)? },
            (Some("et5"), Some("new")) if t.len() == 5 => Step::Insert { base: n(2)?, p: n(3)?, q: n(4)? },
            (Some("delete"), _) if t.len() == 2 => Step::Delete { upto: n(1)? },
            (Some("collapse"), _) if t.len() >= 2 => Step::Collapse {
                items: (1..t.len()).map(n).collect::<Result<_, _>>()?,
            },
            _ => return Err(format!("unrecognised step `{s}`")),
        };
        Ok(step)
    }
}

fn fail<T>(what: &'static str) -> Result<T, GenEqError> {
    Err(GenEqError::Condition(what))
}

fn dual_pair(g: &GenEq, id: BaseId) -> Result<(super::geneq::Base, BaseId, super::geneq::Base), GenEqError> {
    let b = *g.base(id)?;
    let d = g.dual_of(id)?;
    Ok((b, d, *g.base(d)?))
}

/// Position of `p` along a base read from its `alpha`, so that "between"
/// tests work for both orientations.
fn along(alpha: u32, p: u32) -> i64 {
    p as i64 - alpha as i64
}

fn between(alpha: u32, x: u32, y: u32) -> bool {
    let (a, b) = (along(alpha, x).abs(), along(alpha, y).abs());
    a <= b
}

pub fn apply(g: &GenEq, step: &Step) -> Result<GenEq, GenEqError> {
    match *step {
        Step::Cut { base, p, q } => cut(g, base, p, q),
        Step::Transfer { carrier, moved } => transfer(g, carrier, moved),
        Step::RemoveMatched { base } => remove_matched(g, base),
        Step::RemoveLone { base } => remove_lone(g, base),
        Step::Tie { base, p, q } => tie(g, base, p, q),
        Step::Insert { base, p, q } => insert(g, base, p, q),
        Step::Delete { upto } => delete_prefix(g, upto),
        Step::Collapse { ref items } => collapse(g, items),
    }
}

pub fn cut(g: &GenEq, lambda: BaseId, p: u32, q: u32) -> Result<GenEq, GenEqError> {
    let (l, d, ld) = dual_pair(g, lambda)?;
    if !l.internal(p) {
        return fail("cut boundary is internal to the base");
    }
    if !g.connections.contains(&(p, lambda, q)) {
        return fail("cut boundary is connected to the dual");
    }
    if !ld.internal(q) {
        return fail("connected boundary is internal to the dual");
    }
    let mut out = g.clone();
    out.bases.remove(&lambda);
    out.bases.remove(&d);
    out.connections.retain(|c| c.1 != lambda && c.1 != d);
    let (l1, _) = out.add_pair((l.alpha, p), (ld.alpha, q));
    let (l2, _) = out.add_pair((p, l.beta), (q, ld.beta));
    for &(r, m, t) in &g.connections {
        if m != lambda || r == p {
            continue;
        }
        let first = between(l.alpha, r, p) && between(ld.alpha, t, q);
        let second = !between(l.alpha, r, p) && !between(ld.alpha, t, q);
        if first && r != l.alpha {
            out.connect(r, l1, t)?;
        } else if second && r != l.beta {
            out.connect(r, l2, t)?;
        }
    }
    Ok(out)
}

pub fn transfer(g: &GenEq, lambda: BaseId, mu: BaseId) -> Result<GenEq, GenEqError> {
    let (l, ldid, _) = dual_pair(g, lambda)?;
    let (m, _, _) = dual_pair(g, mu)?;
    if mu == lambda || mu == ldid {
        return fail("transferred base differs from the carrier and its dual");
    }
    if !(l.lo() <= m.lo() && m.hi() <= l.hi()) {
        return fail("transferred base lies inside the carrier");
    }
    let (Some(a), Some(b)) = (g.correspondent(m.alpha, lambda), g.correspondent(m.beta, lambda)) else {
        return fail("endpoints of the transferred base are connected on the carrier");
    };
    if a == b {
        return fail("transferred base keeps positive length");
    }
    let mut out = g.clone();
    let moved = out.bases.get_mut(&mu).expect("present");
    moved.alpha = a;
    moved.beta = b;
    let dual = g.dual_of(mu)?;
    out.connections.retain(|c| c.1 != mu && c.1 != dual);
    for &(r, id, t) in &g.connections {
        if id != mu {
            continue;
        }
        if let Some(r2) = g.correspondent(r, lambda) {
            if r2 != a && r2 != b {
                out.connect(r2, mu, t)?;
            }
        }
    }
    Ok(out)
}

pub fn remove_matched(g: &GenEq, lambda: BaseId) -> Result<GenEq, GenEqError> {
    let (l, _, ld) = dual_pair(g, lambda)?;
    if l.alpha != ld.alpha || l.beta != ld.beta {
        return fail("base and dual share both endpoints");
    }
    let mut out = g.clone();
    out.remove_pair(lambda)?;
    Ok(out)
}

fn is_lone(g: &GenEq, lambda: BaseId) -> Result<(), GenEqError> {
    let l = *g.base(lambda)?;
    if l.is_constant() {
        return Err(GenEqError::ConstantBase(lambda));
    }
    if l.hi() > g.rho + 1 {
        return fail("base lies in the active section");
    }
    let overlaps = g
        .bases
        .iter()
        .any(|(&id, b)| id != lambda && b.lo() < l.hi() && l.lo() < b.hi());
    if overlaps {
        return fail("no other base overlaps the base");
    }
    Ok(())
}

pub fn remove_lone(g: &GenEq, lambda: BaseId) -> Result<GenEq, GenEqError> {
    is_lone(g, lambda)?;
    let l = *g.base(lambda)?;
    let k = l.hi() - l.lo() - 1;
    let mut out = g.clone();
    out.remove_pair(lambda)?;
    let (lo, hi) = (l.lo(), l.hi());
    out.rename_boundaries(|b| if b <= lo { b } else if b >= hi { b - k } else { unreachable!("interior boundary {b} referenced") });
    out.boundaries -= k;
    out.rho -= k;
    Ok(out)
}

fn check_placement(g: &GenEq, lambda: BaseId, p: u32) -> Result<(super::geneq::Base, super::geneq::Base), GenEqError> {
    let (l, _, ld) = dual_pair(g, lambda)?;
    if !l.internal(p) {
        return fail("placed boundary is internal to the base");
    }
    if g.is_tied(p, lambda).is_some() {
        return fail("placed boundary is not yet connected");
    }
    Ok((l, ld))
}

pub fn tie(g: &GenEq, lambda: BaseId, p: u32, q: u32) -> Result<GenEq, GenEqError> {
    let (_, ld) = check_placement(g, lambda, p)?;
    if !ld.on(q) {
        return fail("target boundary lies on the dual");
    }
    let mut out = g.clone();
    out.connect(p, lambda, q)?;
    Ok(out)
}

pub fn insert(g: &GenEq, lambda: BaseId, p: u32, q: u32) -> Result<GenEq, GenEqError> {
    let (_, ld) = check_placement(g, lambda, p)?;
    if !(ld.lo() <= q && q < ld.hi()) {
        return fail("split item lies under the dual");
    }
    let mut out = g.clone();
    out.rename_boundaries(|b| if b > q { b + 1 } else { b });
    out.boundaries += 1;
    if q <= g.rho {
        out.rho += 1;
    }
    let p2 = if p > q { p + 1 } else { p };
    out.connect(p2, lambda, q + 1)?;
    Ok(out)
}

pub fn delete_prefix(g: &GenEq, upto: u32) -> Result<GenEq, GenEqError> {
    if upto < 2 || upto > g.rho + 1 {
        return fail("deleted prefix lies in the active section");
    }
    let touching: Vec<BaseId> = g
        .bases
        .iter()
        .filter(|(_, b)| b.lo() < upto)
        .map(|(&id, _)| id)
        .collect();
    let mut out = g.clone();
    match touching.as_slice() {
        [] => {}
        [id] => {
            let b = g.bases[id];
            if b.lo() != 1 || b.hi() != upto {
                return fail("prefix is exactly one base");
            }
            out.remove_pair(*id)?;
        }
        _ => return fail("prefix is covered by a single base"),
    }
    let k = upto - 1;
    if out.connections.iter().any(|c| c.0 < upto || c.2 < upto) {
        return fail("no connection enters the prefix");
    }
    out.rename_boundaries(|b| b - k);
    out.boundaries -= k;
    out.rho -= k;
    Ok(out)
}

pub fn collapse(g: &GenEq, items: &[u32]) -> Result<GenEq, GenEqError> {
    let gone: std::collections::BTreeSet<u32> = items.iter().copied().collect();
    if gone.len() != items.len() || gone.iter().any(|&i| i == 0 || i >= g.boundaries) {
        return fail("collapsed items are distinct items");
    }
    // Boundary b keeps its place minus the collapsed items before it.
    let shift = |b: u32| b - gone.range(..b).count() as u32;
    let degenerate = |id: &BaseId| {
        let b = g.bases[id];
        (b.lo()..b.hi()).all(|i| gone.contains(&i))
    };
    let mut out = g.clone();
    for (id, b) in &g.bases {
        let dead = degenerate(id);
        match b.label {
            Label::Dual(d) if dead != degenerate(&d) => return fail("collapse empties whole base pairs"),
            Label::Constant(Some(_)) if dead => return fail("collapsed items carry no constant letter"),
            _ => {}
        }
        if dead {
            out.bases.remove(id);
        }
    }
    out.connections.retain(|c| out.bases.contains_key(&c.1));
    out.rename_boundaries(shift);
    out.connections.retain(|&(p, m, _)| out.bases[&m].internal(p));
    let tied = out.connections.clone();
    out.connections
        .retain(|&(p, m, q)| tied.contains(&(q, out.bases[&m].dual().expect("non-constant"), p)));
    out.boundaries = shift(g.boundaries);
    out.rho = shift(g.rho + 1) - 1;
    Ok(out)
}

/// Every application of a single transformation kind available on `g`.
/// ET5 applications come as families: all placements of one boundary.
pub fn applicable(g: &GenEq) -> Vec<Vec<Step>> {
    let mut out = Vec::new();
    for &(p, base, q) in &g.connections {
        if cut(g, base, p, q).is_ok() {
            out.push(vec![Step::Cut { base, p, q }]);
        }
    }
    for &carrier in g.bases.keys() {
        for &moved in g.bases.keys() {
            if transfer(g, carrier, moved).is_ok() {
                out.push(vec![Step::Transfer { carrier, moved }]);
            }
        }
    }
    for (&base, b) in &g.bases {
        if remove_matched(g, base).is_ok() {
            out.push(vec![Step::RemoveMatched { base }]);
        }
        if remove_lone(g, base).is_ok() {
            out.push(vec![Step::RemoveLone { base }]);
        }
        if let Label::Dual(_) = b.label {
            for p in b.lo() + 1..b.hi() {
                let fam = placements(g, base, p);
                if !fam.is_empty() {
                    out.push(fam);
                }
            }
        }
    }
    out
}

/// The ET5 family for boundary `p` of `lambda`.
pub fn placements(g: &GenEq, lambda: BaseId, p: u32) -> Vec<Step> {
    let Ok((_, ld)) = check_placement(g, lambda, p) else {
        return Vec::new();
    };
    let mut fam = Vec::new();
    for q in ld.lo()..=ld.hi() {
        fam.push(Step::Tie { base: lambda, p, q });
        if q < ld.hi() {
            fam.push(Step::Insert { base: lambda, p, q });
        }
    }
    fam
}

/// Pushes a solution of `g` through `step`. `None` means the solution
/// does not fit this member of the family.
pub fn carry(g: &GenEq, step: &Step, sol: &GenEqSolution) -> Option<GenEqSolution> {
    if !g.satisfies(sol) {
        return None;
    }
    let after = apply(g, step).ok()?;
    let items = &sol.0;
    let out = match *step {
        Step::Cut { .. } | Step::Transfer { .. } | Step::RemoveMatched { .. } | Step::Tie { .. } => sol.clone(),
        Step::RemoveLone { base } => {
            let b = g.bases[&base];
            let (lo, hi) = ((b.lo() - 1) as usize, (b.hi() - 1) as usize);
            let mut v = items[..lo].to_vec();
            v.push(Word::product(&items[lo..hi]));
            v.extend_from_slice(&items[hi..]);
            GenEqSolution(v)
        }
        Step::Insert { base, p, q } => {
            let ld = g.bases[&g.dual_of(base).ok()?];
            let k = g.offset(sol, base, p).ok()?;
            let item = &items[(q - 1) as usize];
            // Letters of the dual before item q in its reading direction.
            let before = if ld.epsilon() > 0 {
                g.offset(sol, g.dual_of(base).ok()?, q).ok()?
            } else {
                g.offset(sol, g.dual_of(base).ok()?, q + 1).ok()?
            };
            let d = k.checked_sub(before)?;
            if d == 0 || d >= item.len() {
                return None;
            }
            let cut_at = if ld.epsilon() > 0 { d } else { item.len() - d };
            let (x, y) = item.letters().split_at(cut_at);
            let mut v = items[..(q - 1) as usize].to_vec();
            v.push(Word::from(x.to_vec()));
            v.push(Word::from(y.to_vec()));
            v.extend_from_slice(&items[q as usize..]);
            GenEqSolution(v)
        }
        Step::Delete { upto } => GenEqSolution(items[(upto - 1) as usize..].to_vec()),
        Step::Collapse { items: ref gone } => {
            if gone.iter().any(|&i| !items[(i - 1) as usize].is_empty()) {
                return None;
            }
            GenEqSolution(
                items
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !gone.contains(&(*i as u32 + 1)))
                    .map(|(_, w)| w.clone())
                    .collect(),
            )
        }
    };
    after.satisfies(&out).then_some(out)
}

/// Maps a solution of `apply(g, step)` back to a solution of `g`.
pub fn pull(g: &GenEq, step: &Step, sol: &GenEqSolution) -> GenEqSolution {
    let items = &sol.0;
    match *step {
        Step::Cut { .. } | Step::Transfer { .. } | Step::RemoveMatched { .. } | Step::Tie { .. } => sol.clone(),
        Step::Insert { q, .. } => {
            let i = (q - 1) as usize;
            let mut v = items[..i].to_vec();
            v.push(items[i].concat(&items[i + 1]));
            v.extend_from_slice(&items[i + 2..]);
            GenEqSolution(v)
        }
        Step::RemoveLone { base } => {
            let b = g.bases[&base];
            let (lo, hi) = ((b.lo() - 1) as usize, (b.hi() - 1) as usize);
            let mut v = items[..lo].to_vec();
            v.extend(std::iter::repeat_n(Word::empty(), hi - lo));
            v.extend_from_slice(&items[lo + 1..]);
            fill_from_dual(g, base, &mut v);
            GenEqSolution(v)
        }
        Step::Delete { upto } => {
            let mut v = vec![Word::empty(); (upto - 1) as usize];
            v.extend_from_slice(items);
            if let Some((&id, _)) = g.bases.iter().find(|(_, b)| b.lo() == 1 && b.hi() == upto) {
                fill_from_dual(g, id, &mut v);
            }
            GenEqSolution(v)
        }
        Step::Collapse { items: ref gone } => {
            let mut rest = items.iter();
            GenEqSolution(
                (1..g.boundaries)
                    .map(|i| if gone.contains(&i) { Word::empty() } else { rest.next().cloned().unwrap_or_default() })
                    .collect(),
            )
        }
    }
}

/// Fills the items of `base` with the word its dual reads, split at the
/// offsets its connections prescribe.
fn fill_from_dual(g: &GenEq, base: BaseId, v: &mut [Word]) {
    let b = g.bases[&base];
    let did = b.dual().expect("non-constant");
    let d = g.bases[&did];
    let w = Word::product(&v[(d.lo() - 1) as usize..(d.hi() - 1) as usize]);
    let w = if d.epsilon() > 0 { w } else { w.inverse() };
    let probe = GenEqSolution(v.to_vec());
    let interior: Vec<u32> = if b.epsilon() > 0 {
        (b.lo() + 1..b.hi()).collect()
    } else {
        (b.lo() + 1..b.hi()).rev().collect()
    };
    let mut cuts = vec![0];
    for p in interior {
        let last = *cuts.last().expect("nonempty");
        let off = g
            .is_tied(p, base)
            .and_then(|q| g.offset(&probe, did, q).ok())
            .unwrap_or(last);
        cuts.push(off.clamp(last, w.len()));
    }
    cuts.push(w.len());
    let letters = w.letters();
    for k in 0..cuts.len() - 1 {
        let piece = Word::from(letters[cuts[k]..cuts[k + 1]].to_vec());
        if b.epsilon() > 0 {
            v[(b.lo() - 1) as usize + k] = piece;
        } else {
            v[(b.hi() - 2) as usize - k] = piece.inverse();
        }
    }
}
