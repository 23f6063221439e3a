mod common;

use std::sync::Arc;

use dgtilt::algebra::DGAlgebra;
use dgtilt::complexes::Complex;
use dgtilt::format::{parse_str, serialize, Document, ModuleEntry, Reference};
use dgtilt::linalg::{GradedMap, GradedSpace, Matrix};
use dgtilt::module::{DGModule, Side};
use dgtilt::scalar::{Field, Scalar};
use proptest::prelude::*;

fn field() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::Rationals), Just(Field::prime(2).unwrap()), Just(Field::prime(7).unwrap())]
}

fn scalar(f: Field) -> impl Strategy<Value = Scalar> {
    (-20i64..20, 1i64..9).prop_map(move |(n, d)| match f {
        Field::Rationals => Scalar::parse(&format!("{n}/{d}"), f).unwrap(),
        _ => f.from_i64(n),
    })
}

fn triple() -> impl Strategy<Value = (Scalar, Scalar, Scalar)> {
    field().prop_flat_map(|f| (scalar(f), scalar(f), scalar(f)))
}

proptest! {
    #[test]
    fn field_axioms((a, b, c) in triple()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, a.field().zero());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn scalar_text_round_trip((a, _, _) in triple()) {
        prop_assert_eq!(Scalar::parse(&a.to_string(), a.field()).unwrap(), a);
    }

    #[test]
    fn rank_nullity(f in field(), rows in 0usize..6, cols in 0usize..6, seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        use rand::Rng;
        let data: Vec<Vec<Scalar>> = (0..rows).map(|_| (0..cols).map(|_| f.from_i64(rng.gen_range(-2..3))).collect()).collect();
        let m = Matrix::from_rows(f, data, cols);
        let k = m.kernel();
        prop_assert_eq!(m.rank() + k.cols(), cols);
        prop_assert!(m.mul(&k).is_zero());
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn f2_homology_matches_enumeration(seed in any::<u64>()) {
        let b = common::random_bit_complex(&mut common::rng(seed));
        let c = common::to_complex(&b);
        prop_assert_eq!(common::library_dims(&c, b.dims.len()), common::brute_force(&b));
    }

    #[test]
    fn module_serialization_round_trip(seed in any::<u64>(), q in any::<bool>()) {
        // a random complex over the ground field, written as a module over k
        let b = common::random_bit_complex(&mut common::rng(seed));
        let c = common::to_complex(&b);
        let f = if q { Field::Rationals } else { Field::prime(2).unwrap() };
        let space = Arc::new(GradedSpace::new(f, (0..c.space().dim()).map(|i| (c.space().label(i).to_string(), c.space().degree(i)))).unwrap());
        let d = GradedMap::from_images(space.clone(), space.clone(), 1, |i| {
            c.differential().image(i).into_iter().map(|(t, _)| (t, f.one())).collect()
        }).unwrap();
        let k = Arc::new(DGAlgebra::ground(f));
        // over Q the lifted differential may not square to zero
        let complex = Complex::new(d).unwrap_or_else(|_| Complex::zero_differential(space.clone()));
        let m = DGModule::from_actions(k.clone(), Side::Left, complex, vec![GradedMap::identity(space)]).unwrap();
        let mut doc = Document::default();
        doc.algebras.insert("k".into(), k);
        doc.modules.insert("X".into(), ModuleEntry { over: Reference::Local("k".into()), module: m });
        let text = serialize(&doc);
        let back = parse_str(&text, "round-trip", None).unwrap();
        prop_assert_eq!(serialize(&back), text);
        prop_assert_eq!(back, doc);
    }
}
