use proptest::prelude::*;
use quadeq::freewords::{commutator, reduce, substitute, tripod_legs, Generator, Word};
use quadeq::surfaces::{classify, glue, SetKind};
use quadeq::symbols::Alphabet;
use std::collections::BTreeMap;

fn letter(gens: u16) -> impl Strategy<Value = Generator> {
    (0..gens, any::<bool>()).prop_map(|(id, inv)| Generator::new(id, if inv { -1 } else { 1 }))
}

fn word(gens: u16, max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(letter(gens), 0..=max).prop_map(reduce)
}

/// A single cyclic word in which each of `n` letters occurs twice, signs free.
fn quadratic_word(max_letters: u16) -> impl Strategy<Value = Vec<Generator>> {
    (1..=max_letters)
        .prop_flat_map(|n| {
            let slots: Vec<u16> = (0..n).flat_map(|i| [i, i]).collect();
            (Just(slots).prop_shuffle(), prop::collection::vec(any::<bool>(), 2 * n as usize))
        })
        .prop_map(|(ids, signs)| {
            ids.into_iter()
                .zip(signs)
                .map(|(id, s)| Generator::new(id, if s { -1 } else { 1 }))
                .collect()
        })
}

fn letters_alphabet(n: u16) -> Alphabet {
    let mut al = Alphabet::new();
    for i in 0..n {
        al.add_constant(&format!("e{i}")).unwrap();
    }
    al
}

proptest! {
    #[test]
    fn words_form_a_group(u in word(3, 12), v in word(3, 12), w in word(3, 12)) {
        prop_assert!(u.concat(&u.inverse()).is_empty());
        prop_assert_eq!(u.inverse().inverse(), u.clone());
        prop_assert_eq!(u.concat(&v).concat(&w), u.concat(&v.concat(&w)));
        prop_assert_eq!(u.concat(&v).inverse(), v.inverse().concat(&u.inverse()));
        prop_assert_eq!(commutator(&u, &v).inverse(), commutator(&v, &u));
    }

    #[test]
    fn substitution_is_a_homomorphism(t1 in word(4, 8), t2 in word(4, 8), x in word(2, 6), y in word(2, 6)) {
        // Ids 0, 1 are constants and 2, 3 are variables.
        let asg: BTreeMap<u16, Word> = [(2, x), (3, y)].into_iter().collect();
        let is_var = |id: u16| id >= 2;
        let whole = substitute(&t1.concat(&t2), is_var, &asg).unwrap();
        let parts = substitute(&t1, is_var, &asg).unwrap().concat(&substitute(&t2, is_var, &asg).unwrap());
        prop_assert_eq!(whole, parts);
    }

    #[test]
    fn triangles_are_tripods(z1 in word(2, 10), z2 in word(2, 10)) {
        let z3 = z1.concat(&z2).inverse();
        let z = [z1, z2, z3];
        let legs = tripod_legs(&z);
        for k in 0..3 {
            let next = &legs[(k + 1) % 3];
            prop_assert_eq!(&legs[k].concat(&next.inverse()), &z[k]);
            prop_assert_eq!(legs[k].len() + next.len(), z[k].len());
        }
    }

    #[test]
    fn single_words_glue_as_classified(w in quadratic_word(6)) {
        let n = w.iter().map(|g| g.id()).max().unwrap() + 1;
        let al = letters_alphabet(n);
        let q = classify(&al, vec![w]).unwrap();
        let s = glue(&q);
        prop_assert!(s.is_connected());
        prop_assert_eq!(s.is_orientable(), q.kind == SetKind::Orientable);
        prop_assert_eq!(s.euler(), s.vertex_count as i64 - s.edge_count as i64 + s.face_count as i64);
        let expected_genus = if s.is_orientable() { (2 - s.euler()) / 2 } else { 2 - s.euler() };
        prop_assert_eq!(s.genus, expected_genus);
    }

    #[test]
    fn euler_characteristic_is_additive(u in quadratic_word(5), v in quadratic_word(5)) {
        let nu = u.iter().map(|g| g.id()).max().unwrap() + 1;
        let nv = v.iter().map(|g| g.id()).max().unwrap() + 1;
        let shifted: Vec<Generator> = v.iter().map(|g| Generator::new(g.id() + nu, g.sign())).collect();
        let al = letters_alphabet(nu + nv);
        let a = glue(&classify(&al, vec![u.clone()]).unwrap());
        let b = glue(&classify(&al, vec![shifted.clone()]).unwrap());
        let both = glue(&classify(&al, vec![u, shifted]).unwrap());
        prop_assert_eq!(both.components.len(), 2);
        prop_assert_eq!(both.euler(), a.euler() + b.euler());
        prop_assert_eq!(both.genus, a.genus + b.genus);
    }
}
