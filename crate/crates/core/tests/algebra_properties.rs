use std::collections::BTreeSet;

use nbldpc::code::degree_sequences;
use nbldpc::{
    sample_code, AffineSet, Coset, DegreeDist, DegreeRounding, Encoder, Ensemble, Field, GroupKind, LabelPdf, LdpcCode,
    Subspace, Symbol,
};
use proptest::prelude::*;

fn set(xs: impl IntoIterator<Item = Symbol>) -> BTreeSet<u8> {
    xs.into_iter().map(Symbol::value).collect()
}

fn coset(p: u8) -> impl Strategy<Value = Coset> {
    let q = 1u16 << p;
    (0..q, prop::collection::vec(0..q, 0..=p as usize))
        .prop_map(|(o, dirs)| Coset::new(Symbol(o as u8), Subspace::span(dirs.into_iter().map(|v| v as u8))))
}

fn field_and_pair() -> impl Strategy<Value = (u8, Coset, Coset)> {
    (2u8..=4).prop_flat_map(|p| (Just(p), coset(p), coset(p)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn sum_matches_minkowski_sum((_, a, b) in field_and_pair()) {
        let oracle: BTreeSet<u8> = a.elements().iter().flat_map(|x| b.elements().into_iter().map(move |y| x.value() ^ y.value())).collect();
        let s = a.sum(&b);
        prop_assert_eq!(set(s.elements()), oracle);
        prop_assert_eq!(s, b.sum(&a));
        prop_assert!(s.cardinality().is_power_of_two());
    }

    #[test]
    fn intersect_matches_set_intersection((_, a, b) in field_and_pair()) {
        let oracle: BTreeSet<u8> = set(a.elements()).intersection(&set(b.elements())).copied().collect();
        let i = a.intersect(&b);
        prop_assert_eq!(set(i.elements()), oracle.clone());
        prop_assert_eq!(i.is_empty(), oracle.is_empty());
        prop_assert_eq!(&i, &b.intersect(&a));
        if !oracle.is_empty() {
            prop_assert!(oracle.len().is_power_of_two());
            let from = AffineSet::from_elements(&oracle.iter().map(|&v| Symbol(v)).collect::<Vec<_>>()).unwrap();
            prop_assert_eq!(from, i);
        }
    }

    #[test]
    fn operations_are_associative((p, a, b) in field_and_pair(), c in 0u16..16, d in prop::collection::vec(0u16..16, 0..3)) {
        let mask = ((1u16 << p) - 1) as u8;
        let c = Coset::new(Symbol(c as u8 & mask), Subspace::span(d.into_iter().map(|v| v as u8 & mask)));
        prop_assert_eq!(a.sum(&b).sum(&c), a.sum(&b.sum(&c)));
        let left = a.intersect(&b).intersect(&AffineSet::Coset(c));
        let right = AffineSet::Coset(a).intersect(&b.intersect(&c));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn canonical_form_is_idempotent((_, a, _) in field_and_pair()) {
        let again = Coset::new(a.offset(), *a.direction());
        prop_assert_eq!(&again, &a);
        let elements = a.elements();
        let rebuilt = AffineSet::from_elements(&elements).unwrap();
        prop_assert_eq!(rebuilt, AffineSet::Coset(a));
        prop_assert_eq!(a.cardinality(), 1usize << a.dim());
    }
}

#[test]
fn action_distributes_over_sum_exhaustively() {
    for p in 2u8..=3 {
        let field = Field::with_degree(p).unwrap();
        let g = nbldpc::Grassmannian::enumerate(p).unwrap();
        for kind in [GroupKind::Field, GroupKind::Matrix] {
            for h in field.enumerate_labels(kind).unwrap() {
                for s1 in g.spaces() {
                    for s2 in g.spaces() {
                        for o in 0..field.q() as u8 {
                            let a = Coset::new(Symbol(o), *s1);
                            let b = Coset::linear(*s2);
                            assert_eq!(a.sum(&b).act(&field, &h), a.act(&field, &h).sum(&b.act(&field, &h)));
                            let image = set(a.elements().into_iter().map(|x| field.apply(&h, x)));
                            assert_eq!(set(a.act(&field, &h).elements()), image);
                        }
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn label_composition_is_sequential_application(p in 2u8..=3, kind_matrix in any::<bool>(), i in 0usize..10_000, j in 0usize..10_000, s in 0u8..8) {
        let field = Field::with_degree(p).unwrap();
        let kind = if kind_matrix { GroupKind::Matrix } else { GroupKind::Field };
        let labels = field.enumerate_labels(kind).unwrap();
        let (h1, h2) = (&labels[i % labels.len()], &labels[j % labels.len()]);
        let s = Symbol(s & field.spec().mask());
        prop_assert_eq!(field.apply(&field.compose(h1, h2), s), field.apply(h1, field.apply(h2, s)));
        prop_assert_eq!(field.apply(&field.invert_label(h1), field.apply(h1, s)), s);
    }

    #[test]
    fn sampled_codes_have_exact_profiles(family in 0usize..3, n in 1usize..12, seed in any::<u64>()) {
        let (p, kind, lambda, rho) = [
            (2u8, GroupKind::Field, "1@2", "1@3"),
            (3, GroupKind::Matrix, "0.5@2,0.5@3", "1@4"),
            (3, GroupKind::Field, "1@3", "1@6"),
        ][family];
        let field = Field::with_degree(p).unwrap();
        let pdf = LabelPdf::uniform(&field, kind).unwrap();
        let ens = Ensemble::new(field, DegreeDist::parse(lambda, rho).unwrap(), pdf);
        let n = n * 30;
        let (vars, checks) = degree_sequences(n, &ens.degrees, DegreeRounding::Exact).unwrap();
        let code = sample_code(n, &ens, seed, DegreeRounding::Exact).unwrap();
        let mut want_v = std::collections::BTreeMap::new();
        for d in vars { *want_v.entry(d).or_insert(0usize) += 1; }
        let mut want_c = std::collections::BTreeMap::new();
        for d in checks { *want_c.entry(d).or_insert(0usize) += 1; }
        prop_assert_eq!(code.var_degree_histogram(), want_v);
        prop_assert_eq!(code.check_degree_histogram(), want_c);
        prop_assert_eq!(LdpcCode::from_text(&code.to_text()).unwrap(), code.clone());

        let enc = Encoder::new(&code);
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let msg: Vec<bool> = (0..enc.k_bin()).map(|_| rand::Rng::gen(&mut rng)).collect();
        let word = enc.encode(&msg).unwrap();
        prop_assert!(code.verify_codeword(&word));
    }
}

#[test]
fn label_frequencies_follow_the_pdf() {
    let field = Field::with_degree(3).unwrap();
    let pdf = LabelPdf::parse(&field, GroupKind::Field, "1:0.5,2:0.3,7:0.2").unwrap();
    let ens = Ensemble::new(field.clone(), DegreeDist::parse("1@3", "1@6").unwrap(), pdf.clone());
    let code = sample_code(4000, &ens, 17, DegreeRounding::Exact).unwrap();
    let edges = code.edges().len() as f64;
    assert!(edges >= 1e4);
    let mut chi2 = 0.0;
    for (h, prob) in pdf.support() {
        let observed = code.edges().iter().filter(|e| e.label == *h).count() as f64;
        let expected = prob * edges;
        chi2 += (observed - expected).powi(2) / expected;
    }
    // two degrees of freedom; 13.8 is the 0.999 quantile
    assert!(chi2 < 13.8, "chi2 = {chi2}");
}
