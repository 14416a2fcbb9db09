use quadeq::corpus::{quadratic_corpus, CorpusSpec};
use quadeq::freewords::Word;
use quadeq::hypreduce::{build_schema, CTripleChoice, Representatives, SchemaParams, Target};
use quadeq::makanin::{solve_quadratic, SolveOptions, Verdict};
use quadeq::quadratic::triangulate;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn schema_on_corpus() {
    let params = SchemaParams { l_param: 1 };
    let mut worst_ratio = 0f64;
    for s in quadratic_corpus(CorpusSpec::default()).iter().step_by(5) {
        let t = triangulate(s);
        let reps = Representatives::geodesic(&t.system.alphabet);
        let out = build_schema(&t.system, &CTripleChoice::trivial(&t.system), &reps, &Target::Free, params).unwrap();
        assert!(out.system.is_quadratic(), "{s}");
        assert!(out.system.size() <= out.size_bound);
        let n = s.size().max(2) as f64;
        worst_ratio = worst_ratio.max(out.system.size() as f64 / n.powi(4));
        let verdict = solve_quadratic(s, &Default::default()).unwrap();
        if let Some(psi) = verdict.witness {
            let lifted = t.lift(&psi).unwrap();
            let phi = out.forward(&t.system, &lifted);
            assert!(out.system.is_solution(&phi), "{s}");
            let back = out.pullback(&t.system, &Target::Free, &phi).unwrap();
            assert!(s.is_solution(&t.project(&back)));
        }
    }
    assert!(worst_ratio <= 3.0 * (4.0 + 2.0 + 3.0), "ratio {worst_ratio}");
}

#[test]
fn schema_solvability_matches() {
    let spec = CorpusSpec {
        max_vars: 2,
        max_equations: 2,
        max_constant_length: 2,
    };
    let deep = SolveOptions {
        bound: None,
        max_states: 3_000_000,
    };
    for s in &quadratic_corpus(spec) {
        let t = triangulate(s);
        let reps = Representatives::geodesic(&t.system.alphabet);
        let out = build_schema(&t.system, &CTripleChoice::trivial(&t.system), &reps, &Target::Free, SchemaParams { l_param: 1 }).unwrap();
        let a = solve_quadratic(s, &Default::default()).unwrap();
        match a.witness {
            Some(psi) => {
                let phi = out.forward(&t.system, &t.lift(&psi).unwrap());
                assert!(out.system.is_solution(&phi), "{s}");
            }
            None => {
                assert_eq!(a.verdict, Verdict::Unsat);
                let b = solve_quadratic(&out.system, &deep).unwrap();
                assert_eq!(b.verdict, Verdict::Unsat, "{s}");
            }
        }
    }
}

#[test]
fn random_centres_pull_back() {
    let mut rng = StdRng::seed_from_u64(7);
    let systems: Vec<_> = quadratic_corpus(CorpusSpec::default())
        .into_iter()
        .filter(|s| s.equations.len() == 1 && s.size() <= 6)
        .collect();
    let mut pulled = 0;
    for _ in 0..100 {
        let s = &systems[rng.gen_range(0..systems.len())];
        let t = triangulate(s);
        let al = &t.system.alphabet;
        let consts = al.constants();
        let mut choice = CTripleChoice::trivial(&t.system);
        for cs in choice.triples.iter_mut() {
            if cs.len() == 3 {
                let g = quadeq::freewords::Generator::new(consts[rng.gen_range(0..consts.len())], if rng.gen() { 1 } else { -1 });
                cs[0] = Word::generator(g);
                cs[1] = Word::generator(g.inv());
            }
        }
        let reps = Representatives::geodesic(al);
        let out = build_schema(&t.system, &choice, &reps, &Target::Free, SchemaParams { l_param: 2 }).unwrap();
        assert!(out.system.is_quadratic());
        let r = solve_quadratic(&out.system, &Default::default()).unwrap();
        if let Some(phi) = r.witness {
            let psi = out.pullback(&t.system, &Target::Free, &phi).unwrap();
            assert!(s.is_solution(&t.project(&psi)));
            pulled += 1;
        }
    }
    assert!(pulled > 0);
}
