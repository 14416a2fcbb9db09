use quadeq::corpus::{quadratic_corpus, CorpusSpec};
use quadeq::makanin::entire::{entire_transform, replay};
use quadeq::makanin::et::{applicable, apply, carry, pull, Step};
use quadeq::makanin::geneq::{guided_geneq, GenEq, GenEqSolution};
use quadeq::makanin::{solve_quadratic, Verdict};
use quadeq::oracle::{enumerate_solutions, SearchBound};
use quadeq::quadratic::EquationSystem;

fn sat_systems(spec: CorpusSpec) -> Vec<EquationSystem> {
    quadratic_corpus(spec)
        .into_iter()
        .filter(|s| solve_quadratic(s, &Default::default()).unwrap().verdict == Verdict::Sat)
        .collect()
}

/// Every family applicable at `g` carries each solution into some member,
/// and pulling back lands on a solution of `g`.
fn check_families(g: &GenEq, sols: &[GenEqSolution]) -> usize {
    let mut checked = 0;
    for fam in applicable(g) {
        for sol in sols {
            let mut hit = false;
            for st in &fam {
                if let Some(out) = carry(g, st, sol) {
                    hit = true;
                    let back = pull(g, st, &out);
                    assert!(g.satisfies(&back), "{st} pulled back to a non-solution");
                    if !matches!(st, Step::RemoveLone { .. } | Step::Delete { .. }) {
                        assert_eq!(&back, sol, "{st} is not invertible");
                    }
                }
            }
            assert!(hit, "no member of {fam:?} carries a solution");
            checked += 1;
        }
    }
    checked
}

#[test]
fn carriers_are_sound_on_small_corpus() {
    let spec = CorpusSpec {
        max_vars: 3,
        max_equations: 2,
        max_constant_length: 2,
    };
    let mut checked = 0;
    for s in sat_systems(spec).iter().step_by(7) {
        let sols = enumerate_solutions(s, SearchBound::new(2));
        let Some(first) = sols.first() else { continue };
        let lead = guided_geneq(s, first).unwrap();
        let g0 = lead.geneq.clone();
        let mut carried: Vec<GenEqSolution> = sols
            .iter()
            .filter_map(|a| guided_geneq(s, a).ok().map(|x| x.solution))
            .collect();
        let run = entire_transform(&g0, &lead.solution, 10_000).unwrap();
        let mut g = g0;
        checked += check_families(&g, &carried);
        for st in run.steps.iter().take(12) {
            carried = carried.iter().filter_map(|x| carry(&g, st, x)).collect();
            g = apply(&g, st).unwrap();
            checked += check_families(&g, &carried);
        }
    }
    assert!(checked > 1000, "only {checked} checks");
}

#[test]
fn entire_transform_on_corpus_sample() {
    for s in sat_systems(CorpusSpec::default()).iter().step_by(13) {
        let w = solve_quadratic(s, &Default::default()).unwrap().witness.unwrap();
        let lead = guided_geneq(s, &w).unwrap();
        let run = entire_transform(&lead.geneq, &lead.solution, 10_000).unwrap();
        assert_eq!(run.terminal.rho, 0);
        assert!(run.rounds.iter().all(GenEq::is_quadratic), "{s}");
        let counts: Vec<usize> = run.rounds.iter().map(GenEq::non_constant_bases).collect();
        assert!(counts.windows(2).all(|w| w[1] <= w[0]), "{s}: {counts:?}");
        let again = replay(&lead.geneq, &run.trace()).unwrap();
        assert_eq!(again.to_string(), run.terminal.to_string());
        assert!(run.terminal.satisfies(&run.solution));
    }
}

#[test]
fn replay_rejects_foreign_steps() {
    let s = EquationSystem::parse("gens: a b\nvars: x y\nx y x^-1 y^-1 = a b a^-1 b^-1\n").unwrap();
    let w = solve_quadratic(&s, &Default::default()).unwrap().witness.unwrap();
    let lead = guided_geneq(&s, &w).unwrap();
    let run = entire_transform(&lead.geneq, &lead.solution, 1000).unwrap();
    let mut trace = run.trace();
    trace.push_str("et3 424242\n");
    let err = replay(&lead.geneq, &trace).unwrap_err();
    assert!(err.to_string().contains("424242"), "{err}");
    assert!(replay(&lead.geneq, "bogus\n").is_err());
}

#[test]
fn budget_is_enforced() {
    let s = EquationSystem::parse("gens: a b\nvars: x y\nx x y y = a a b b\n").unwrap();
    let w = solve_quadratic(&s, &Default::default()).unwrap().witness.unwrap();
    let lead = guided_geneq(&s, &w).unwrap();
    let full = entire_transform(&lead.geneq, &lead.solution, 10_000).unwrap();
    assert!(full.steps.len() > 2);
    assert!(entire_transform(&lead.geneq, &lead.solution, 2).is_err());
}
