//! End-to-end: parse, solve, triangulate, standardize and move witnesses
//! back and forth between the forms.

use quadeq::makanin::{solve_quadratic, SolveOptions, Verdict};
use quadeq::oracle::{find_solution, SearchBound};
use quadeq::quadratic::{triangulate, EquationSystem};
use quadeq::standard::{standardize, SurfaceKind};
use quadeq::surfaces::{glue, QuadraticSet};

const SAT: &[(&str, SurfaceKind, usize)] = &[
    ("gens: a b\nvars: x y\n[x,y][a,b] = 1\n", SurfaceKind::Orientable, 1),
    ("gens: a b\nvars: x y\nx y x^-1 y^-1 = b a b^-1 a^-1\n", SurfaceKind::Orientable, 1),
    ("gens: a b\nvars: x y\nx^2 y^2 = a^2 b^2\n", SurfaceKind::NonOrientable, 2),
    ("gens: a b\nvars: x y z\nx^-1 a x y^-1 b y z^-1 a^-1 b^-1 z = 1\n", SurfaceKind::Orientable, 0),
];

const UNSAT: &[&str] = &["gens: a b\nvars: x\nx^2 = a b\n", "gens: a b\nvars: x y\n[x,y] = a\n"];

#[test]
fn witnesses_survive_every_form() {
    for &(text, kind, genus) in SAT {
        let sys = EquationSystem::parse(text).unwrap();
        assert!(sys.is_quadratic(), "{text}");
        let r = solve_quadratic(&sys, &SolveOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Sat, "{text}");
        let w = r.witness.unwrap();
        assert!(sys.is_solution(&w));

        let tri = triangulate(&sys);
        assert!(tri.system.is_quadratic());
        let lifted = tri.lift(&w).unwrap();
        assert!(tri.system.is_solution(&lifted), "{text}");
        assert!(sys.is_solution(&tri.project(&lifted)));

        let (form, record) = standardize(&sys).unwrap();
        assert_eq!((form.kind, form.genus), (kind, genus), "{text}");
        let std_sys = form.system();
        let pushed = record.push(&sys, &w);
        assert!(std_sys.is_solution(&pushed), "{text}");
        assert!(sys.is_solution(&record.pull(&form, &pushed)), "{text}");

        let longest = w.values().map(|v| v.len()).max().unwrap_or(0);
        let found = find_solution(&sys, SearchBound::new(longest)).expect("oracle reaches the witness length");
        assert!(sys.is_solution(&found));
    }
}

#[test]
fn unsolvable_systems_are_refuted() {
    for text in UNSAT {
        let sys = EquationSystem::parse(text).unwrap();
        let r = solve_quadratic(&sys, &SolveOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Unsat, "{text}");
        assert!(r.witness.is_none());
        assert!(find_solution(&sys, SearchBound::new(3)).is_none());
    }
}

#[test]
fn classical_surfaces() {
    // (words, orientable, euler characteristic, genus)
    let cases = [
        ("a a^-1\n", true, 2, 0),
        ("a b a^-1 b^-1\n", true, 0, 1),
        ("a b a^-1 b^-1 c d c^-1 d^-1\n", true, -2, 2),
        ("a a\n", false, 1, 1),
        ("a a b b\n", false, 0, 2),
        ("a b a b^-1\n", false, 0, 2),
        ("a b\nb^-1 a^-1\n", true, 2, 0),
    ];
    for (text, orientable, euler, genus) in cases {
        let s = glue(&QuadraticSet::parse(text).unwrap());
        assert!(s.is_connected(), "{text}");
        assert_eq!((s.is_orientable(), s.euler(), s.genus), (orientable, euler, genus), "{text}");
    }
}
