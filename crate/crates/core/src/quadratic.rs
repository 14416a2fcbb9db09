//! Equation systems over free groups, quadraticity and triangulation.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::freewords::{substitute, FreeError, Generator, Word};
use crate::symbols::{Alphabet, ParseError, SymbolError};

/// `lhs = rhs`; algorithms mostly work with the relator `lhs · rhs^-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Equation {
    pub lhs: Word,
    pub rhs: Word,
}

impl Equation {
    pub fn new(lhs: Word, rhs: Word) -> Self {
        Equation { lhs, rhs }
    }

    pub fn relator(lhs: Word) -> Self {
        Equation {
            lhs,
            rhs: Word::empty(),
        }
    }

    pub fn relator_word(&self) -> Word {
        self.lhs.concat(&self.rhs.inverse())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error("line {line}, {source}")]
    Parse {
        line: usize,
        #[source]
        source: ParseError,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Symbol {
        line: usize,
        #[source]
        source: SymbolError,
    },
    #[error("system is not quadratic: {0}")]
    NotQuadratic(String),
    #[error(transparent)]
    Free(#[from] FreeError),
}

/// A finite system of equations over `F(A)` with variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationSystem {
    pub alphabet: Alphabet,
    pub equations: Vec<Equation>,
}

pub type Assignment = BTreeMap<u16, Word>;

impl EquationSystem {
    pub fn new(alphabet: Alphabet) -> Self {
        EquationSystem {
            alphabet,
            equations: Vec::new(),
        }
    }

    pub fn push(&mut self, eq: Equation) {
        self.equations.push(eq);
    }

    pub fn relators(&self) -> Vec<Word> {
        self.equations.iter().map(|e| e.relator_word()).collect()
    }

    /// `|S|`: total length of the relators.
    pub fn size(&self) -> usize {
        self.relators().iter().map(|w| w.len()).sum()
    }

    /// Occurrence counts of variables over both sides of every equation.
    pub fn occurrences(&self) -> BTreeMap<u16, usize> {
        let mut counts = BTreeMap::new();
        for eq in &self.equations {
            for g in eq.lhs.letters().iter().chain(eq.rhs.letters()) {
                if self.alphabet.is_variable(g.id()) {
                    *counts.entry(g.id()).or_insert(0) += 1;
                }
            }
        }
        counts
    }

    /// Every occurring variable occurs exactly twice. Declared variables that
    /// never occur are unconstrained and ignored.
    pub fn is_quadratic(&self) -> bool {
        self.occurrences().values().all(|&c| c == 2)
    }

    pub fn check_quadratic(&self) -> Result<(), SystemError> {
        for (v, c) in self.occurrences() {
            if c != 2 {
                return Err(SystemError::NotQuadratic(format!(
                    "variable '{}' occurs {} times",
                    self.alphabet.name(v),
                    c
                )));
            }
        }
        Ok(())
    }

    /// Variables that occur in some equation, ascending.
    pub fn occurring_variables(&self) -> Vec<u16> {
        self.occurrences().keys().copied().collect()
    }

    /// Applies an assignment; unassigned occurring variables are an error.
    pub fn evaluate(&self, asg: &Assignment) -> Result<Vec<Word>, FreeError> {
        self.relators()
            .iter()
            .map(|r| substitute(r, |id| self.alphabet.is_variable(id), asg))
            .collect()
    }

    pub fn is_solution(&self, asg: &Assignment) -> bool {
        matches!(self.evaluate(asg), Ok(v) if v.iter().all(|w| w.is_empty()))
    }

    /// Parses the system file format:
    ///
    /// ```text
    /// # comment
    /// gens: a b
    /// vars: x y
    /// [x,y] = [a,b]
    /// x^2 a^-2 = 1
    /// ```
    pub fn parse(text: &str) -> Result<Self, SystemError> {
        let mut sys = EquationSystem::new(Alphabet::new());
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let trimmed = content.trim_start();
            for (key, constant) in [("gens:", true), ("vars:", false)] {
                if let Some(rest) = trimmed.strip_prefix(key) {
                    for name in rest.split_whitespace() {
                        let r = if constant {
                            sys.alphabet.add_constant(name)
                        } else {
                            sys.alphabet.add_variable(name)
                        };
                        r.map_err(|source| SystemError::Symbol { line, source })?;
                    }
                }
            }
            if trimmed.starts_with("gens:") || trimmed.starts_with("vars:") {
                continue;
            }
            let Some(eqpos) = content.find('=') else {
                return Err(SystemError::Syntax {
                    line,
                    message: "expected '<word> = <word>'".into(),
                });
            };
            let shift = |e: ParseError, by: usize| SystemError::Parse {
                line,
                source: ParseError {
                    column: e.column + by,
                    message: e.message,
                },
            };
            let lhs = sys
                .alphabet
                .parse_word(&content[..eqpos])
                .map_err(|e| shift(e, 0))?;
            let rhs = sys
                .alphabet
                .parse_word(&content[eqpos + 1..])
                .map_err(|e| shift(e, eqpos + 1))?;
            sys.push(Equation::new(lhs, rhs));
        }
        Ok(sys)
    }

    pub fn show_assignment(&self, asg: &Assignment) -> Vec<(String, String)> {
        asg.iter()
            .map(|(v, w)| (self.alphabet.name(*v).to_string(), self.alphabet.show(w)))
            .collect()
    }
}

impl fmt::Display for EquationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |ids: Vec<u16>| {
            ids.iter()
                .map(|&i| self.alphabet.name(i).to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(f, "gens: {}", names(self.alphabet.constants()))?;
        writeln!(f, "vars: {}", names(self.alphabet.variables()))?;
        for eq in &self.equations {
            writeln!(
                f,
                "{} = {}",
                self.alphabet.show(&eq.lhs),
                self.alphabet.show(&eq.rhs)
            )?;
        }
        Ok(())
    }
}

/// Result of triangulation: the new system plus the definitions of the fresh
/// variables in terms of the original letters, used to lift solutions.
#[derive(Debug, Clone)]
pub struct Triangulation {
    pub system: EquationSystem,
    pub original_variables: Vec<u16>,
    pub fresh: Vec<(u16, Word)>,
}

impl Triangulation {
    /// Restricts a solution of the triangular system to the original variables.
    pub fn project(&self, asg: &Assignment) -> Assignment {
        self.original_variables
            .iter()
            .filter_map(|v| asg.get(v).map(|w| (*v, w.clone())))
            .collect()
    }

    /// Extends a solution of the original system to the triangular one.
    pub fn lift(&self, asg: &Assignment) -> Result<Assignment, FreeError> {
        let mut out = asg.clone();
        let al = &self.system.alphabet;
        for (v, def) in &self.fresh {
            let val = substitute(def, |id| al.is_variable(id), asg)?;
            out.insert(*v, val);
        }
        Ok(out)
    }
}

/// Rewrites every relator of length `n > 3` as the chain
/// `y1 y2 x1 = 1, x1^-1 y3 x2 = 1, ..., x_{n-3}^-1 y_{n-1} y_n = 1`.
pub fn triangulate(sys: &EquationSystem) -> Triangulation {
    let mut alphabet = sys.alphabet.clone();
    let original_variables = sys.alphabet.variables();
    let mut out = Vec::new();
    let mut fresh = Vec::new();
    for rel in sys.relators() {
        let y = rel.letters();
        let n = y.len();
        if n <= 3 {
            out.push(Equation::relator(rel.clone()));
            continue;
        }
        let xs: Vec<u16> = (0..n - 3).map(|_| alphabet.fresh_variable("x")).collect();
        for (k, &x) in xs.iter().enumerate() {
            // x_{k+1} = (y_1 ... y_{k+2})^-1
            fresh.push((x, Word::from(y[..k + 2].to_vec()).inverse()));
        }
        let xg = |k: usize| Generator::pos(xs[k]);
        out.push(Equation::relator(Word::from(vec![y[0], y[1], xg(0)])));
        for k in 1..n - 3 {
            out.push(Equation::relator(Word::from(vec![
                xg(k - 1).inv(),
                y[k + 1],
                xg(k),
            ])));
        }
        out.push(Equation::relator(Word::from(vec![
            xg(n - 4).inv(),
            y[n - 2],
            y[n - 1],
        ])));
    }
    let system = EquationSystem {
        alphabet,
        equations: out,
    };
    let (before, after) = (sys.size(), system.size());
    if before >= 3 {
        assert!(
            after <= (before - 2) * (3 * before),
            "triangulation size bound violated: {after} > ({before}-2)*3*{before}"
        );
    }
    Triangulation {
        system,
        original_variables,
        fresh,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_quadratic() {
        let s = EquationSystem::parse("gens: a b\nvars: x y\n[x,y] = [a,b] # comment\n").unwrap();
        assert_eq!(s.equations.len(), 1);
        assert!(s.is_quadratic());
        assert_eq!(s.size(), 8);
        let s = EquationSystem::parse("gens: a\nvars: x\nx^3 = a\n").unwrap();
        assert!(!s.is_quadratic());
        assert!(s.check_quadratic().is_err());
    }

    #[test]
    fn parse_errors_have_positions() {
        let e = EquationSystem::parse("gens: a\nvars: x\nx q = 1\n").unwrap_err();
        assert_eq!(e.to_string(), "line 3, column 3: undeclared symbol 'q'");
        let e = EquationSystem::parse("gens: a\nx a\n").unwrap_err();
        assert!(matches!(e, SystemError::Syntax { line: 2, .. }));
        let e = EquationSystem::parse("gens: a\nvars: x\nx = a)\n").unwrap_err();
        assert!(e.to_string().starts_with("line 3, column 6"));
    }

    #[test]
    fn triangulate_chain() {
        let s = EquationSystem::parse("vars: y1 y2 y3 y4 y5\ny1 y2 y3 y4 y5 = 1\n").unwrap();
        let t = triangulate(&s);
        let shown: Vec<String> = t
            .system
            .equations
            .iter()
            .map(|e| t.system.alphabet.show(&e.lhs))
            .collect();
        assert_eq!(shown, ["y1 y2 x1", "x1^-1 y3 x2", "x2^-1 y4 y5"]);
    }

    #[test]
    fn triangulate_short_and_quadratic() {
        let s = EquationSystem::parse("gens: a\nvars: x\nx a x^-1 = 1\n").unwrap();
        let t = triangulate(&s);
        assert_eq!(t.system.equations, s.equations);

        let s = EquationSystem::parse("gens: a b\nvars: x y\n[x,y] a = 1\n").unwrap();
        let t = triangulate(&s);
        assert!(t.system.is_quadratic());
        assert_eq!(t.system.equations.len(), 3);
        assert!(t.system.equations.iter().all(|e| e.lhs.len() == 3));
    }

    #[test]
    fn lift_and_project() {
        let s = EquationSystem::parse("gens: a b\nvars: x y\n[x,y] [b,a] = 1\n").unwrap();
        let t = triangulate(&s);
        let (x, y) = (s.alphabet.lookup("x").unwrap(), s.alphabet.lookup("y").unwrap());
        let mut asg = Assignment::new();
        asg.insert(x, s.alphabet.parse_word("a").unwrap());
        asg.insert(y, s.alphabet.parse_word("b").unwrap());
        assert!(s.is_solution(&asg));
        let lifted = t.lift(&asg).unwrap();
        assert!(t.system.is_solution(&lifted));
        assert_eq!(t.project(&lifted), asg);
    }
}
