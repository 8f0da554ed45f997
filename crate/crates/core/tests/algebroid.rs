use varlie_core::algebra::{Parity, Poly, Signature};
use varlie_core::algebroid::{Homological, OperatorCollection, SolveOptions};
use varlie_core::diffop::TotalDiffOperator;
use varlie_core::text::{parse_op, parse_poly, render, Env};

fn kdv() -> (Signature, OperatorCollection) {
    let sig = Signature::new(&["x"]).with_field("w", 1, Parity::Even).with_field("b", 1, Parity::Odd);
    let a2 = parse_op(&Env::new(&sig), "-1/2*Dx^3 + 2*w*Dx + w_x").unwrap();
    let coll = OperatorCollection::single(&sig, sig.var("w"), a2).unwrap();
    (sig, coll)
}

fn env(c: &OperatorCollection) -> Env<'_> {
    Env::new(c.signature())
}

#[test]
fn kdv_christoffel_and_q() {
    let (sig, coll) = kdv();
    let dec = coll.christoffel_extract(SolveOptions::default());
    assert!(dec.is_exact());
    let gamma = coll.bilinear(&dec.c);
    assert_eq!(gamma, vec![parse_poly(&env(&coll), "p1_x*p2 - p1*p2_x").unwrap()]);
    let q = coll.build_q(&dec.c, sig.var("b").field).unwrap();
    let e = Env::new(&sig);
    assert_eq!(q.section(&sig.var("b")), parse_poly(&e, "b*b_x").unwrap());
    assert_eq!(q.section(&sig.var("w")), parse_poly(&e, "-1/2*b_xxx + 2*w*b_x + w_x*b").unwrap());
    let rep = coll.verify_homological(&q, sig.var("b").field).unwrap();
    assert_eq!(rep.outcome, Homological::ExactZero);
    assert!(coll.jacobi_residual(&dec.c).iter().all(Poly::is_zero));
}

#[test]
fn corrupted_gamma_is_detected() {
    let (sig, coll) = kdv();
    let bad = coll.symbol_from_bilinear(&[parse_poly(&env(&coll), "p1_x*p2").unwrap()]).unwrap();
    let q = coll.build_q(&bad, sig.var("b").field).unwrap();
    let rep = coll.verify_homological(&q, sig.var("b").field).unwrap();
    assert_eq!(rep.outcome, Homological::Failed);
    println!("{}", render::poly(&sig, &rep.square.section(&sig.var("w"))));
}

#[test]
fn liouville_box() {
    let sig = Signature::new(&["x", "y"]).with_field("q", 1, Parity::Even).with_field("b", 1, Parity::Odd);
    let bx = parse_op(&Env::new(&sig), "q_x + 1/2*Dx").unwrap();
    let coll = OperatorCollection::single(&sig, sig.var("q"), bx).unwrap();
    let dec = coll.christoffel_extract(SolveOptions::default());
    assert!(dec.is_exact());
    assert_eq!(coll.bilinear(&dec.c), vec![parse_poly(&env(&coll), "p1_x*p2 - p1*p2_x").unwrap()]);
    let q = coll.build_q(&dec.c, sig.var("b").field).unwrap();
    assert_eq!(q.section(&sig.var("b")), parse_poly(&Env::new(&sig), "b*b_x").unwrap());
    assert_eq!(coll.verify_homological(&q, sig.var("b").field).unwrap().outcome, Homological::ExactZero);
}

#[test]
fn dx_has_zero_gamma_and_p1p2_is_not_an_image() {
    let sig = Signature::new(&["x"]).with_field("u", 1, Parity::Even);
    let coll = OperatorCollection::single(&sig, sig.var("u"), TotalDiffOperator::d(varlie_core::algebra::MultiIndex::unit(0))).unwrap();
    let dec = coll.christoffel_extract(SolveOptions::default());
    assert!(dec.is_exact() && dec.c.is_zero());
    let e = parse_poly(&env(&coll), "p1*p2").unwrap();
    for bound in 0..=3 {
        assert!(!coll.membership_solve(&[e.clone()], SolveOptions::with_bound(Some(bound))).is_exact());
    }
}
