//! Randomized algebraic identities, shared by the test suites and the acceptance harness.

use std::collections::BTreeMap;

use rand::Rng;

use super::{parity_of, sign, Gen, CASES};
use varlie_core::algebra::{Parity, Poly};
use varlie_core::algebroid::{OperatorCollection, SolveOptions};
use varlie_core::diffop::{coupling, TotalDiffOperator};
use varlie_core::jet::{
    cohomology_equal, divergence, euler, euler_right, linearization_cols, EquationKind, EquationNormalForm,
    EvolutionaryField,
};
use varlie_core::poisson::{poisson_bracket, schouten, Pairing};
use varlie_core::text::{parse_op, parse_poly, render, Env};
use varlie_core::Signature;

fn koszul(a: Parity, b: Parity) -> Poly {
    sign(a.koszul(b))
}

pub fn graded_commutativity_and_odd_squares() {
    let mut g = Gen::new(1);
    for _ in 0..CASES {
        let (pa, pb) = (g.parity(), g.parity());
        let a = g.poly(pa, 3);
        let b = g.poly(pb, 3);
        assert_eq!(&a * &b, &koszul(pa, pb) * &(&b * &a));
        let o = g.poly(Parity::Odd, 3);
        assert!((&o * &o).is_zero());
        let v = Poly::jet({
            let name = if g.rng.gen_bool(0.5) { "b" } else { "c" };
            g.jet_of(name)
        });
        assert!((&(&a * &v) * &v).is_zero());
    }
}

pub fn multiplication_is_associative_and_normal_forms_are_stable() {
    let mut g = Gen::new(2);
    for _ in 0..CASES {
        let ps: Vec<Poly> = (0..3).map(|_| {
            let p = g.parity();
            g.poly(p, 3)
        }).collect();
        assert_eq!(&(&ps[0] * &ps[1]) * &ps[2], &ps[0] * &(&ps[1] * &ps[2]));
        let p = &ps[0] * &ps[1];
        let mut rebuilt = Poly::zero();
        for (m, c) in p.terms().rev() {
            rebuilt.add_term(m.clone(), c.clone());
        }
        assert_eq!(rebuilt, p);
        assert_eq!(&(&p + &ps[2]) - &ps[2], p);
    }
}

pub fn partial_derivatives_obey_graded_leibniz() {
    let mut g = Gen::new(3);
    for _ in 0..CASES {
        let (pa, pb) = (g.parity(), g.parity());
        let a = g.poly(pa, 3);
        let b = g.poly(pb, 3);
        let v = g.any_jet();
        let ab = &a * &b;
        let left = &(&a.partial(&v) * &b) + &(&koszul(v.parity, pa) * &(&a * &b.partial(&v)));
        assert_eq!(ab.partial(&v), left);
        let right = &(&a * &b.partial_right(&v)) + &(&koszul(v.parity, pb) * &(&a.partial_right(&v) * &b));
        assert_eq!(ab.partial_right(&v), right);
        let lr = &koszul(v.parity, parity_of(&a).add(v.parity)) * &a.partial(&v);
        assert_eq!(a.partial_right(&v), lr);
    }
}

pub fn total_derivatives_obey_leibniz_and_commute() {
    let mut g = Gen::new(4);
    for _ in 0..CASES {
        let (pa, pb) = (g.parity(), g.parity());
        let a = g.poly(pa, 3);
        let b = g.poly(pb, 3);
        for d in 0..2 {
            let ab = (&a * &b).total_derivative(d);
            assert_eq!(ab, &(&a.total_derivative(d) * &b) + &(&a * &b.total_derivative(d)));
        }
        assert_eq!(a.total_derivative(0).total_derivative(1), a.total_derivative(1).total_derivative(0));
    }
}

pub fn rendering_round_trips() {
    let mut g = Gen::new(5);
    let sig = g.sig.clone();
    let env = Env::new(&sig);
    for _ in 0..CASES {
        let p = {
            let par = g.parity();
            g.poly(par, 4)
        };
        let text = render::poly(&sig, &p);
        assert_eq!(parse_poly(&env, &text).unwrap(), p, "{text}");
        let op = g.operator(1, 1);
        let text = render::op(&sig, &op);
        assert_eq!(parse_op(&env, &text).unwrap(), op, "{text}");
    }
}

pub fn adjoint_is_an_involution() {
    let mut g = Gen::new(6);
    for _ in 0..CASES {
        let (r, c) = (g.rng.gen_range(1..=2), g.rng.gen_range(1..=2));
        let a = g.operator(r, c);
        assert_eq!(a.adjoint().adjoint(), a);
        assert_eq!(a.adjoint().rows(), c);
    }
}

pub fn adjoint_moves_across_the_coupling() {
    let mut g = Gen::new(7);
    for _ in 0..CASES {
        let a = g.operator(2, 2);
        let psi = g.even_tuple(2);
        let phi = g.even_tuple(2);
        let lhs = coupling(&psi, &a.apply(&phi)).unwrap();
        let rhs = coupling(&a.adjoint().apply(&psi), &phi).unwrap();
        assert!(cohomology_equal(&lhs, &rhs));
    }
}

pub fn composition_is_associative_and_matches_nested_application() {
    let mut g = Gen::new(8);
    g.max_order = 1;
    for _ in 0..CASES {
        let a = g.operator(1, 2);
        let b = g.operator(2, 2);
        let c = g.operator(2, 1);
        assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
        let phi = g.even_tuple(1);
        assert_eq!(b.compose(&c).apply(&phi), b.apply(&c.apply(&phi)));
        assert!(a.compose(&b).order() <= a.order() + b.order());
    }
}

pub fn euler_annihilates_total_divergences() {
    let mut g = Gen::new(9);
    for _ in 0..CASES {
        let p = g.parity();
        let div = divergence(&[g.poly(p, 3), g.poly(p, 3)]);
        for name in ["u", "v", "b", "c"] {
            let q = g.sig.var(name);
            assert!(euler(&div, &q).is_zero());
            assert!(euler_right(&div, &q).is_zero());
        }
    }
}

pub fn evolutionary_fields_commute_with_total_derivatives() {
    let mut g = Gen::new(10);
    for _ in 0..CASES {
        let par = g.parity();
        let x = g.field(par, 2);
        let p = {
            let pp = g.parity();
            g.poly(pp, 3)
        };
        for d in 0..2 {
            assert_eq!(x.apply(&p.total_derivative(d)), x.apply(&p).total_derivative(d));
        }
    }
}

pub fn linearization_applies_as_the_evolutionary_derivative() {
    let mut g = Gen::new(11);
    for _ in 0..CASES {
        let f = g.even_tuple(2);
        let phi = g.even_tuple(2);
        let cols = [g.sig.var("u"), g.sig.var("v")];
        let l = linearization_cols(&f, &cols);
        let x = EvolutionaryField::new(Parity::Even).with(cols[0], phi[0].clone()).with(cols[1], phi[1].clone());
        let direct: Vec<Poly> = f.iter().map(|fi| x.apply(fi)).collect();
        assert_eq!(l.apply(&phi), direct);
    }
}

fn same_field(a: &EvolutionaryField, b: &EvolutionaryField) -> bool {
    let keys: std::collections::BTreeSet<_> = a.sections().keys().chain(b.sections().keys()).collect();
    keys.into_iter().all(|q| a.section(q) == b.section(q))
}

pub fn commutator_satisfies_graded_jacobi() {
    let mut g = Gen::new(12);
    g.max_order = 1;
    for _ in 0..CASES {
        let (px, py, pz) = (g.parity(), g.parity(), g.parity());
        let x = g.field(px, 2);
        let y = g.field(py, 2);
        let z = g.field(pz, 2);
        let lhs = x.commutator(&y.commutator(&z));
        let t1 = x.commutator(&y).commutator(&z);
        let t2 = y.commutator(&x.commutator(&z));
        let t2 = if px.koszul(py) { t2.neg() } else { t2 };
        let rhs = t1.add(&t2);
        assert!(same_field(&lhs, &rhs));
        let xy = x.commutator(&y);
        let yx = y.commutator(&x);
        let yx = if px.koszul(py) { yx } else { yx.neg() };
        assert!(same_field(&xy, &yx));
    }
}

fn pairing(sig: &Signature) -> Pairing {
    Pairing::fields(sig, "u", "b").extend(Pairing::fields(sig, "v", "c"))
}

pub fn schouten_of_linear_charges_is_the_commutator() {
    let mut g = Gen::new(13);
    g.max_order = 1;
    let sig = g.sig.clone();
    let pr = pairing(&sig);
    let (u, b) = (sig.var("u"), sig.poly("b"));
    for _ in 0..CASES {
        let phi = g.even_tuple(2);
        let w1 = &b * &phi[0];
        let w2 = &b * &phi[1];
        let x1 = EvolutionaryField::new(Parity::Even).with(u, phi[0].clone());
        let x2 = EvolutionaryField::new(Parity::Even).with(u, phi[1].clone());
        let comm = &x1.apply(&phi[1]) - &x2.apply(&phi[0]);
        assert!(cohomology_equal(&schouten(&w1, &w2, &pr), &(&b * &comm)));
    }
}

pub fn schouten_is_graded_antisymmetric_and_satisfies_jacobi() {
    let mut g = Gen::new(14);
    g.max_order = 1;
    let pr = pairing(&g.sig.clone());
    let shifted = |p: Parity| p.flip();
    for _ in 0..CASES {
        let (pa, pb, pc) = (g.parity(), g.parity(), g.parity());
        let a = g.poly(pa, 2);
        let b = g.poly(pb, 2);
        let c = g.poly(pc, 2);
        let ab = schouten(&a, &b, &pr);
        let ba = schouten(&b, &a, &pr);
        let s = koszul(shifted(pa), shifted(pb));
        assert!(cohomology_equal(&ab, &-(&s * &ba)));
        let lhs = schouten(&a, &schouten(&b, &c, &pr), &pr);
        let t1 = schouten(&ab, &c, &pr);
        let t2 = &s * &schouten(&b, &schouten(&a, &c, &pr), &pr);
        assert!(cohomology_equal(&lhs, &(&t1 + &t2)));
    }
}

pub fn euler_derivatives_of_actions_are_self_adjoint() {
    let mut g = Gen::new(15);
    for _ in 0..CASES {
        let s = g.even_tuple(1).remove(0) + g.even_tuple(1).remove(0);
        let cols = [g.sig.var("u"), g.sig.var("v")];
        let e: Vec<Poly> = cols.iter().map(|q| euler(&s, q)).collect();
        let l = linearization_cols(&e, &cols);
        assert!(l.is_self_adjoint(), "{}", render::poly(&g.sig, &s));
    }
}

pub fn poisson_bracket_is_antisymmetric_for_skew_operators() {
    let mut g = Gen::new(16);
    g.max_order = 1;
    for _ in 0..CASES {
        let b = g.operator(2, 2);
        let a = b.sub(&b.adjoint());
        assert!(a.is_skew_adjoint());
        let h1 = g.even_tuple(1).remove(0);
        let h2 = g.even_tuple(1).remove(0);
        let cols = [g.sig.var("u"), g.sig.var("v")];
        let p12 = poisson_bracket(&h1, &h2, &a, &cols).unwrap();
        let p21 = poisson_bracket(&h2, &h1, &a, &cols).unwrap();
        assert!(cohomology_equal(&p12, &-p21));
    }
}

fn liouville() -> (Signature, EquationNormalForm) {
    let sig = Signature::new(&["x", "y"]).with_field("q", 1, Parity::Even);
    let rhs = parse_poly(&Env::new(&sig), "exp(2*q)").unwrap();
    let eq = EquationNormalForm::new(EquationKind::Hyperbolic { x: 0, y: 1 }, BTreeMap::from([(sig.var("q"), rhs)])).unwrap();
    (sig, eq)
}

pub fn on_shell_reduction_is_confluent_and_idempotent() {
    let (sig, eq) = liouville();
    let mut g = Gen::with_fields(17, sig.clone(), vec!["q"], vec![]);
    g.max_order = 4;
    for _ in 0..CASES {
        let mut p = g.even_poly(3);
        if g.rng.gen_bool(0.5) {
            p = &p * &Poly::exp(vec![(sig.var("q"), g.rng.gen_range(-2..=2))]);
        }
        let r = eq.reduce(&p).unwrap();
        assert!(r.jets().iter().all(|v| !eq.is_reducible(v)));
        assert_eq!(eq.reduce(&r).unwrap(), r);
        assert_eq!(eq.reduce_alternate(&p).unwrap(), r);
        let d = eq.reduce(&r.total_derivative(1)).unwrap();
        assert_eq!(d, eq.reduce(&p.total_derivative(1)).unwrap());
    }
}

pub fn structure_constants_are_antisymmetric_and_reproduce_brackets() {
    let sig = Signature::new(&["x"]).with_field("u", 1, Parity::Even);
    let ops = ["-1/2*Dx^3 + 2*u*Dx + u_x", "2*u_x^2 - u*u_xx - 2*u*u_x*Dx + u^2*Dx^2", "u^3 - u_x^2"];
    let cases: Vec<_> = ops
        .iter()
        .map(|src| {
            let a = parse_op(&Env::new(&sig), src).unwrap();
            let coll = OperatorCollection::single(&sig, sig.var("u"), a).unwrap();
            let gamma = coll.christoffel_extract(SolveOptions::default()).c;
            (coll, gamma)
        })
        .collect();
    let mut g = Gen::with_fields(18, sig.clone(), vec!["u"], vec![]);
    g.max_order = 1;
    for k in 0..CASES {
        let (coll, gamma) = &cases[k % cases.len()];
        let s1 = g.even_tuple(1);
        let s2 = g.even_tuple(1);
        let c12 = coll.structure_constants(gamma, &s1, &s2);
        let c21 = coll.structure_constants(gamma, &s2, &s1);
        assert_eq!(c12, c21.iter().map(|p| -p).collect::<Vec<_>>());
        assert!(coll.structure_defect(gamma, &s1, &s2).iter().all(Poly::is_zero));
    }
}

pub fn right_variational_derivative_differs_by_the_sign_table() {
    let mut g = Gen::new(19);
    for _ in 0..CASES {
        let p = g.parity();
        let f = g.poly(p, 3);
        for name in ["u", "b"] {
            let q = g.sig.var(name);
            let s = koszul(q.parity, p.flip());
            assert_eq!(euler_right(&f, &q), &s * &euler(&f, &q));
        }
    }
}

pub fn operators_act_additively() {
    let mut g = Gen::new(20);
    for _ in 0..CASES {
        let a: TotalDiffOperator = g.operator(1, 1);
        let phi = g.even_tuple(1);
        let psi = g.even_tuple(1);
        let sum: Vec<Poly> = vec![&phi[0] + &psi[0]];
        assert_eq!(a.apply(&sum)[0], &a.apply(&phi)[0] + &a.apply(&psi)[0]);
    }
}

/// Every property with its name.
pub const ALL: &[(&str, fn())] = &[
    ("graded_commutativity_and_odd_squares", graded_commutativity_and_odd_squares),
    ("multiplication_is_associative_and_normal_forms_are_stable", multiplication_is_associative_and_normal_forms_are_stable),
    ("partial_derivatives_obey_graded_leibniz", partial_derivatives_obey_graded_leibniz),
    ("total_derivatives_obey_leibniz_and_commute", total_derivatives_obey_leibniz_and_commute),
    ("rendering_round_trips", rendering_round_trips),
    ("adjoint_is_an_involution", adjoint_is_an_involution),
    ("adjoint_moves_across_the_coupling", adjoint_moves_across_the_coupling),
    ("composition_is_associative_and_matches_nested_application", composition_is_associative_and_matches_nested_application),
    ("euler_annihilates_total_divergences", euler_annihilates_total_divergences),
    ("evolutionary_fields_commute_with_total_derivatives", evolutionary_fields_commute_with_total_derivatives),
    ("linearization_applies_as_the_evolutionary_derivative", linearization_applies_as_the_evolutionary_derivative),
    ("commutator_satisfies_graded_jacobi", commutator_satisfies_graded_jacobi),
    ("schouten_of_linear_charges_is_the_commutator", schouten_of_linear_charges_is_the_commutator),
    ("schouten_is_graded_antisymmetric_and_satisfies_jacobi", schouten_is_graded_antisymmetric_and_satisfies_jacobi),
    ("euler_derivatives_of_actions_are_self_adjoint", euler_derivatives_of_actions_are_self_adjoint),
    ("poisson_bracket_is_antisymmetric_for_skew_operators", poisson_bracket_is_antisymmetric_for_skew_operators),
    ("on_shell_reduction_is_confluent_and_idempotent", on_shell_reduction_is_confluent_and_idempotent),
    ("structure_constants_are_antisymmetric_and_reproduce_brackets", structure_constants_are_antisymmetric_and_reproduce_brackets),
    ("right_variational_derivative_differs_by_the_sign_table", right_variational_derivative_differs_by_the_sign_table),
    ("operators_act_additively", operators_act_additively),
];
