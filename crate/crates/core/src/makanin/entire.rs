//! The entire transformation: repeatedly rewrite along the leading base until
//! the active section is empty, guided by a known solution.

use std::collections::HashSet;

use thiserror::Error;

use super::et::{apply, carry, Step};
use super::geneq::{BaseId, GenEq, GenEqError, GenEqSolution};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EntireError {
    #[error(transparent)]
    GenEq(#[from] GenEqError),
    #[error("step budget of {0} exhausted")]
    Budget(usize),
    #[error("generalized equation repeated after {0} steps")]
    Repeated(usize),
    #[error("no placement of boundary {p} on base {base} fits the solution")]
    NoPlacement { base: BaseId, p: u32 },
    #[error("leading base {0} overlaps its dual at the first item")]
    SelfOverlap(BaseId),
    #[error("starting solution does not satisfy the equation")]
    BadSolution,
}

#[derive(Debug, Clone)]
pub struct EntireRun {
    pub terminal: GenEq,
    pub solution: GenEqSolution,
    pub steps: Vec<Step>,
    /// Equations at the start of each round, the first being the input.
    pub rounds: Vec<GenEq>,
}

impl EntireRun {
    pub fn trace(&self) -> String {
        self.steps.iter().map(|s| format!("{s}\n")).collect()
    }

    /// Largest count of non-constant bases seen at a round boundary.
    pub fn max_bases(&self) -> usize {
        self.rounds.iter().map(GenEq::non_constant_bases).max().unwrap_or(0)
    }
}

struct Runner {
    g: GenEq,
    sol: GenEqSolution,
    steps: Vec<Step>,
    budget: usize,
}

impl Runner {
    fn step(&mut self, step: Step) -> Result<(), EntireError> {
        if self.steps.len() >= self.budget {
            return Err(EntireError::Budget(self.budget));
        }
        let next = apply(&self.g, &step)?;
        let sol = carry(&self.g, &step, &self.sol).ok_or(EntireError::BadSolution)?;
        self.g = next;
        self.sol = sol;
        self.steps.push(step);
        Ok(())
    }

    fn cleanup(&mut self) -> Result<(), EntireError> {
        loop {
            let matched = self.g.bases.iter().find_map(|(&id, b)| {
                let d = self.g.bases.get(&b.dual()?)?;
                (d.alpha == b.alpha && d.beta == b.beta).then_some(id)
            });
            match matched {
                Some(id) => self.step(Step::RemoveMatched { base: id })?,
                None => return Ok(()),
            }
        }
    }

    fn leading(&self) -> Option<BaseId> {
        self.g
            .bases
            .iter()
            .filter(|(_, b)| b.lo() == 1 && !b.is_constant())
            .max_by(|x, y| x.1.hi().cmp(&y.1.hi()).then(y.0.cmp(x.0)))
            .map(|(&id, _)| id)
    }

    /// Ties each internal boundary of `mu` to its image on the dual.
    fn tie_all(&mut self, mu: BaseId) -> Result<(), EntireError> {
        loop {
            let b = *self.g.base(mu)?;
            let Some(p) = (b.lo() + 1..b.hi()).find(|&p| self.g.is_tied(p, mu).is_none()) else {
                return Ok(());
            };
            let dual = *self.g.base(self.g.dual_of(mu)?)?;
            let mut chosen = None;
            for q in dual.lo()..=dual.hi() {
                let tie = Step::Tie { base: mu, p, q };
                if carry(&self.g, &tie, &self.sol).is_some() {
                    chosen = Some(tie);
                    break;
                }
                if q < dual.hi() {
                    let ins = Step::Insert { base: mu, p, q };
                    if carry(&self.g, &ins, &self.sol).is_some() {
                        chosen = Some(ins);
                        break;
                    }
                }
            }
            self.step(chosen.ok_or(EntireError::NoPlacement { base: mu, p })?)?;
        }
    }

    fn round(&mut self) -> Result<(), EntireError> {
        let Some(mu) = self.leading() else {
            // The first item is free: drop it.
            let upto = (2..=self.g.rho + 1)
                .find(|&j| self.g.bases.values().any(|b| b.covers_item(j)) || j == self.g.rho + 1)
                .unwrap_or(2);
            return self.step(Step::Delete { upto });
        };
        self.tie_all(mu)?;
        let m = *self.g.base(mu)?;
        let dual = self.g.dual_of(mu)?;
        let inside: Vec<BaseId> = self
            .g
            .bases
            .iter()
            .filter(|(&id, b)| id != mu && id != dual && !b.is_constant() && m.lo() <= b.lo() && b.hi() <= m.hi())
            .map(|(&id, _)| id)
            .collect();
        for id in inside {
            self.step(Step::Transfer { carrier: mu, moved: id })?;
        }
        let m = *self.g.base(mu)?;
        if self.g.gamma(1) >= 2 {
            return Err(EntireError::SelfOverlap(mu));
        }
        let j = (2..m.hi()).find(|&j| self.g.gamma(j) >= 2).unwrap_or(m.hi());
        if j < m.hi() {
            let q = self.g.is_tied(j, mu).expect("all boundaries tied");
            self.step(Step::Cut { base: mu, p: j, q })?;
        }
        self.step(Step::Delete { upto: j })
    }
}

/// Runs the entire transformation on `g` along the solution `sol`.
/// Terminates when the active section is empty.
pub fn entire_transform(g: &GenEq, sol: &GenEqSolution, budget: usize) -> Result<EntireRun, EntireError> {
    if !g.satisfies(sol) {
        return Err(EntireError::BadSolution);
    }
    let mut r = Runner {
        g: g.clone(),
        sol: sol.clone(),
        steps: Vec::new(),
        budget,
    };
    let empty: Vec<u32> = (1..g.boundaries).filter(|&i| sol.0[(i - 1) as usize].is_empty()).collect();
    if !empty.is_empty() {
        r.step(Step::Collapse { items: empty })?;
    }
    let mut rounds = Vec::new();
    let mut seen = HashSet::new();
    loop {
        r.cleanup()?;
        if !seen.insert(r.g.canonical()) {
            return Err(EntireError::Repeated(r.steps.len()));
        }
        rounds.push(r.g.clone());
        if r.g.rho == 0 {
            return Ok(EntireRun {
                terminal: r.g,
                solution: r.sol,
                steps: r.steps,
                rounds,
            });
        }
        r.round()?;
    }
}

/// Re-applies a recorded trace.
pub fn replay(g: &GenEq, trace: &str) -> Result<GenEq, GenEqError> {
    let mut cur = g.clone();
    for (n, line) in trace.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let step: Step = line.parse().map_err(|message| GenEqError::Trace { line: n + 1, message })?;
        cur = apply(&cur, &step).map_err(|e| GenEqError::Trace {
            line: n + 1,
            message: e.to_string(),
        })?;
    }
    Ok(cur)
}
