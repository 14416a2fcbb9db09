use quadeq::npreduce::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Every way of packing `sizes` into `bins` bins filled to `cap` exactly.
fn all_packings(sizes: &[u64], bins: usize, cap: u64) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let total = bins.pow(sizes.len() as u32);
    for code in 0..total {
        let mut c = code;
        let bin_of: Vec<usize> = sizes
            .iter()
            .map(|_| {
                let b = c % bins;
                c /= bins;
                b
            })
            .collect();
        let mut load = vec![0u64; bins];
        for (j, &b) in bin_of.iter().enumerate() {
            load[b] += sizes[j];
        }
        if load.iter().all(|&l| l == cap) {
            out.push(bin_of);
        }
    }
    out
}

#[test]
fn witnesses_are_sound() {
    let p = ReductionParams::default();
    let mut checked = 0;
    for inst in desk_instances(5, 5, 5) {
        if inst.sizes().len() > 5 || inst.sizes().iter().any(|&r| r > inst.capacity()) {
            continue;
        }
        let eq = build_equation(&inst, &p, EquationForm::Free).unwrap();
        let full = build_equation(&inst, &p, EquationForm::Full).unwrap();
        for packing in all_packings(inst.sizes(), inst.bins() as usize, inst.capacity()) {
            let w = packing_to_witness(&inst, &packing, &eq).unwrap();
            assert!(eq.system.is_solution(&w), "{inst} {packing:?}");
            let wf = packing_to_witness(&inst, &packing, &full).unwrap();
            assert!(full.system.is_solution(&wf), "{inst} {packing:?}");
            checked += 1;
        }
    }
    assert!(checked > 500, "{checked}");
}

#[test]
fn inexact_packings_are_rejected() {
    let p = ReductionParams::default();
    let inst = BinPackInstance::new(vec![1, 1, 2], 2, 2).unwrap();
    let eq = build_equation(&inst, &p, EquationForm::Free).unwrap();
    for bad in [vec![0, 0, 0], vec![0, 1, 1], vec![0, 1], vec![0, 1, 2]] {
        assert!(matches!(
            packing_to_witness(&inst, &bad, &eq),
            Err(ReductionError::Packing(_))
        ));
    }
}

#[test]
fn equations_are_quadratic() {
    let p = ReductionParams::default();
    for inst in desk_instances(4, 3, 3) {
        for form in [EquationForm::Full, EquationForm::Free] {
            let eq = build_equation(&inst, &p, form).unwrap();
            assert!(eq.system.is_quadratic());
            for &z in &eq.z {
                assert_eq!(eq.system.occurrences()[&z], 2);
            }
        }
    }
}

#[test]
fn a_length_matches_closed_form() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..200 {
        let n = rng.gen_range(1..=4);
        let mut t = 0;
        let spacers: Vec<u32> = (0..n)
            .map(|_| {
                t += rng.gen_range(1..=3);
                t
            })
            .collect();
        let p = ReductionParams {
            i: rng.gen_range(3..=6),
            d: rng.gen_range(1..=3),
            spacers,
            ..Default::default()
        };
        let a = build_a(&p).unwrap();
        assert_eq!(a.len() as u64, p.a_length());
        if n == 2 {
            let (i, d) = (u64::from(p.i), u64::from(p.d));
            let t: u64 = p.spacers.iter().map(|&x| u64::from(x)).sum();
            assert_eq!(a.len() as u64, 3 * d + i * d * t);
        }
        let al = p.alphabet().unwrap();
        let c = al.lookup("c").unwrap();
        let d = al.lookup("d").unwrap();
        assert_eq!(a.count_id(d) as u64, u64::from(p.d) * (n as u64 + 1));
        assert_eq!(a.count_id(c) + a.count_id(d), a.len());
    }
}

#[test]
fn desk_examples() {
    let p = ReductionParams::default();
    let ok = check_equivalence(&BinPackInstance::new(vec![1, 1, 2], 2, 2).unwrap(), &p, Default::default()).unwrap();
    assert_eq!(ok.verdict, EquationVerdict::Sat);
    assert!(ok.agrees());
    let mismatch = check_equivalence(&BinPackInstance::new(vec![2, 2], 3, 2).unwrap(), &p, Default::default()).unwrap();
    assert!(mismatch.packing.is_none());
    assert_ne!(mismatch.verdict, EquationVerdict::Sat);
    let big = check_equivalence(&BinPackInstance::new(vec![3, 1], 2, 2).unwrap(), &p, Default::default()).unwrap();
    assert!(big.packing.is_none());
    assert_ne!(big.verdict, EquationVerdict::Sat);
    assert!(big.agrees());
}

#[test]
fn desk_sweep_agrees() {
    let reports = equivalence_sweep(&desk_instances(4, 3, 3), &ReductionParams::default(), Default::default()).unwrap();
    assert_eq!(reports.len(), 52);
    for r in &reports {
        assert!(r.agrees(), "{} {:?}", r.instance, r.verdict);
    }
    assert_eq!(reports.iter().filter(|r| r.packing.is_some()).count(), 19);
}
