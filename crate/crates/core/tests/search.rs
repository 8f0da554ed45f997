use varlie_core::algebra::{Parity, Poly};
use varlie_core::search::*;
use varlie_core::text::{parse_op, parse_poly, render, Env};
use varlie_core::Signature;

fn sig() -> Signature {
    AnsatzSpec::new(1).signature()
}

fn with_sections(sig: &Signature) -> Signature {
    let mut s = sig.clone();
    s.add_field("p1", 1, Parity::Even, None).unwrap();
    s.add_field("p2", 1, Parity::Even, None).unwrap();
    s
}

fn gamma(sig: &Signature, src: &str) -> Poly {
    let s = with_sections(sig);
    parse_poly(&Env::new(&s), src).unwrap()
}

const TABLE: &[(u32, &str, Option<&str>)] = &[
    (1, "Dx", Some("0")),
    (3, "Dx^3", Some("0")),
    (5, "Dx^5", Some("0")),
    (7, "Dx^7", Some("0")),
    (3, "-1/2*Dx^3 + 2*u*Dx + u_x", Some("p1_x*p2 - p1*p2_x")),
    (7, "u^2*Dx^3 + 3*u*u_x*Dx^2 + 3*u*u_xx*Dx + u*u_xxx", None),
    (6, "u^3 - u_x^2", Some("2*u_x*(p1*p2_x - p1_x*p2)")),
    (6, "2*u_x^2 - u*u_xx - 2*u*u_x*Dx + u^2*Dx^2", Some("-2*u_x*(p1*p2_x - p1_x*p2) + u*(p1*p2_xx - p1_xx*p2)")),
    (7, "u_x^2*Dx - 2*u*u_xx*Dx - 4*u*u_x*Dx^2 - 4*u^2*Dx^3", Some("2*u*(p1_x*p2_xx - p1_xx*p2_x)")),
    (7, "-2*u_x*u_xx - u_x^2*Dx", Some("8*u_xx*(p1*p2_x - p1_x*p2) + 2*u_x*(p1*p2_xx - p1_xx*p2)")),
];

#[test]
fn weight_three_ansatz() {
    let a = enumerate_ansatz(&AnsatzSpec::new(3));
    let s = sig();
    let parts: Vec<String> = a.basis.iter().map(|(t, m)| format!("{t}:{}", render::monomial(&s, m))).collect();
    assert_eq!(parts, ["3:", "1:u", "0:u_x"]);
}

#[test]
fn weight_six_order_zero_contains_cubic_direction() {
    let mut spec = AnsatzSpec::new(6);
    spec.max_order = 0;
    let a = enumerate_ansatz(&spec);
    let s = sig();
    let op = parse_op(&Env::new(&s), "u^3 - u_x^2").unwrap();
    assert!(a.coordinates(&op).is_some());
}

#[test]
fn listed_operators_are_found_with_their_symbols() {
    let s = sig();
    let results = search(7, &SearchOptions::default()).unwrap();
    for r in &results {
        assert!(r.open.is_empty(), "weight {} left open branches", r.weight);
    }
    for (w, op_src, g_src) in TABLE {
        let op = parse_op(&Env::new(&s), op_src).unwrap();
        let r = &results[*w as usize - 1];
        let c = r.ansatz.coordinates(&op).expect("operator lies in the ansatz");
        assert!(r.families.iter().any(|f| f.contains(&c)), "{op_src} not emitted");
        let expected = g_src.map(|g| gamma(&s, g));
        let chk = check_operator(&s, &op, expected.as_ref()).unwrap();
        assert!(chk.passed(), "{op_src}: {chk:?}");
    }
}

#[test]
fn quadratic_symbol_does_not_reconstruct_a8() {
    let s = sig();
    let op = parse_op(&Env::new(&s), "u_x^2*Dx - 2*u*u_xx*Dx - 4*u*u_x*Dx^2 - 4*u^2*Dx^3").unwrap();
    for g in ["u^2*(p1*p2_x - p1_x*p2)", "-u^2*(p1*p2_x - p1_x*p2)"] {
        let chk = check_operator(&s, &op, Some(&gamma(&s, g))).unwrap();
        assert!(chk.gamma.is_some() && chk.matches == Some(false), "{g}");
    }
    let uux = parse_op(&Env::new(&s), "u^2*u_x").unwrap();
    let chk = check_operator(&s, &uux, Some(&gamma(&s, "-u^2*(p1*p2_x - p1_x*p2)"))).unwrap();
    assert!(chk.passed());
}

#[test]
fn every_family_member_sampled_is_involutive() {
    let s = sig();
    for r in search(6, &SearchOptions::default()).unwrap() {
        for f in &r.families {
            for p in f.samples() {
                let op = r.ansatz.specialize(&p);
                let chk = check_operator(&s, &op, None).unwrap();
                assert!(chk.passed(), "{}", render::op(&s, &op));
            }
        }
    }
}

#[test]
fn formal_families_verify() {
    let (s, cases) = formal_cases(4);
    for c in cases {
        let chk = check_operator(&s, &c.op, Some(&c.gamma)).unwrap();
        assert!(chk.passed(), "{}: {chk:?}", c.name);
    }
}

#[test]
fn wrong_symbol_is_rejected() {
    let s = sig();
    let op = parse_op(&Env::new(&s), "u^3 - u_x^2").unwrap();
    let chk = check_operator(&s, &op, Some(&gamma(&s, "u_x*(p1*p2_x - p1_x*p2)"))).unwrap();
    assert_eq!(chk.matches, Some(false));
    let not_inv = parse_op(&Env::new(&s), "Dx^3 + u_x").unwrap();
    assert!(!check_operator(&s, &not_inv, None).unwrap().passed());
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let run = |n| {
        rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap().install(|| {
            let s = sig();
            search_weight(6, &SearchOptions::default())
                .unwrap()
                .families
                .iter()
                .map(|f| render::op(&s, &f.operator(&enumerate_ansatz(&AnsatzSpec::new(6)))))
                .collect::<Vec<_>>()
        })
    };
    assert_eq!(run(1), run(4));
}
