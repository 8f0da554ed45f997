use varlie_core::algebra::{rat, ratio, JetVar, MultiIndex, Parity, Poly, Symbol};
use varlie_core::algebroid::{OperatorCollection, SolveOptions};
use varlie_core::diffop::TotalDiffOperator;
use varlie_core::gauge::*;
use varlie_core::jet::{cohomology_equal, euler};
use varlie_core::poisson::field_of_charge;
use varlie_core::Signature;

struct Maxwell {
    sig: Signature,
    sys: EquationSystem,
    phi: Vec<Poly>,
    names: BvNames,
}

fn a(sig: &Signature, j: u16, idx: &[u8]) -> Poly {
    Poly::jet(sig.jet("A", j, MultiIndex::from_slice(idx)))
}

fn unit2(i: usize, j: usize) -> Vec<u8> {
    let mut v = vec![0u8; 4];
    v[i] += 1;
    v[j] += 1;
    v
}

fn maxwell() -> Maxwell {
    let sig = Signature::new(&["t", "x", "y", "z"])
        .with_field("A", 4, Parity::Even)
        .with_field("F", 4, Parity::Even)
        .with_field("g", 1, Parity::Odd)
        .with_field("Ad", 4, Parity::Odd)
        .with_field("gd", 1, Parity::Even);
    let mut eqs = Vec::new();
    for j in 0..4 {
        let mut f = Poly::zero();
        for i in 0..4 {
            f += a(&sig, i as u16, &unit2(i, j));
            f -= a(&sig, j as u16, &unit2(i, i));
        }
        eqs.push(f);
    }
    let mut s = Poly::zero();
    for i in 0..4 {
        for j in 0..4 {
            let mut di = vec![0u8; 4];
            di[i] = 1;
            let mut dj = vec![0u8; 4];
            dj[j] = 1;
            let d = a(&sig, j as u16, &di) - a(&sig, i as u16, &dj);
            s += (&d * &d).scale(&ratio(1, 4));
        }
    }
    let fields: Vec<JetVar> = (0..4).map(|j| sig.jet("A", j, MultiIndex::ZERO)).collect();
    let sys = EquationSystem::new(fields, eqs, Some(s), Symbol::new("F"));
    let phi = vec![(0..4).map(|j| Poly::jet(sig.jet("F", j, MultiIndex::unit(j as usize)))).fold(Poly::zero(), |x, y| x + y)];
    let names = BvNames { ghost: Symbol::new("g"), antifield: Symbol::new("Ad"), antighost: Symbol::new("gd") };
    Maxwell { sig, sys, phi, names }
}

fn generator(m: &Maxwell) -> TotalDiffOperator {
    generator_from_relation(&m.sig, &m.phi, &m.sys)
}

#[test]
fn maxwell_is_euler_lagrange_and_noether() {
    let m = maxwell();
    assert!(m.sys.is_euler_lagrange());
    assert!(helmholtz_check(&m.sys));
    assert!(noether_check(&m.phi, &m.sys));
    let gen = generator(&m);
    assert_eq!((gen.rows(), gen.cols()), (4, 1));
    for i in 0..4 {
        assert_eq!(gen.entry(i, 0).len(), 1);
        assert_eq!(gen.coeff(i, 0, &MultiIndex::unit(i)), Poly::int(-1));
    }
    assert!(linear_noether_relation(&gen, &m.sys));
}

#[test]
fn maxwell_brst_and_bv() {
    let m = maxwell();
    let gen = generator(&m);
    let coll = OperatorCollection::new(&m.sig, m.sys.fields.clone(), vec![gen.clone()]).unwrap();
    let dec = coll.christoffel_extract(SolveOptions::default());
    assert!(dec.is_exact() && dec.c.is_zero());
    let g = Poly::jet(m.sig.jet("g", 0, MultiIndex::ZERO));
    let ag = gen.apply(&[g]);
    let nabla = solve_nabla(&m.sig, &ag, &m.sys, None).unwrap().unwrap();
    assert!(nabla.is_zero());
    let q = brst_lift(&coll, &dec.c, &m.sys, m.names, &nabla).unwrap();
    assert!(q.square().is_zero());
    let kt = koszul_tate(&coll, &m.sys, m.names).unwrap();
    assert!(kt.square().is_zero());
    let d = kt.add(&q);
    assert!(d.square().is_zero());

    let s_bv = bv_action(&coll, &dec.c, &m.sys, m.names).unwrap();
    let pairing = bv_pairing(coll.signature(), &m.sys, m.names).unwrap();
    let ans = CorrectionAnsatz::new(vec![(Symbol::new("A"), 0), (Symbol::new("g"), 1), (Symbol::new("Ad"), -1), (Symbol::new("gd"), -2)]);
    let rep = bv_master_check(coll.signature(), &s_bv, &pairing, &ans);
    assert!(rep.passed && rep.bracket_trivial && rep.corrections.is_zero());

    let x = field_of_charge(&-s_bv.clone(), &pairing);
    let keys: std::collections::BTreeSet<_> = d.sections().keys().chain(x.sections().keys()).copied().collect();
    for v in keys {
        let (dv, xv) = (d.section(&v), x.section(&v));
        if v.field.as_str() == "gd" {
            assert!(!dv.is_zero());
            assert_eq!(xv, -dv, "antighost sector agrees up to sign");
        } else {
            assert_eq!(xv, dv, "{v:?}");
        }
    }
}

#[test]
fn corrupted_ghost_term_breaks_master_equation() {
    let m = maxwell();
    let gen = generator(&m);
    let coll = OperatorCollection::new(&m.sig, m.sys.fields.clone(), vec![gen.clone()]).unwrap();
    let dec = coll.christoffel_extract(SolveOptions::default());
    let mut bad = gen.clone();
    bad.add_to(2, 0, MultiIndex::unit(2), &Poly::int(2));
    let s_bad = bv_action(&OperatorCollection::new(&m.sig, m.sys.fields.clone(), vec![bad]).unwrap(), &dec.c, &m.sys, m.names).unwrap();
    let pairing = bv_pairing(coll.signature(), &m.sys, m.names).unwrap();
    let ans = CorrectionAnsatz::new(vec![(Symbol::new("A"), 0), (Symbol::new("g"), 1), (Symbol::new("Ad"), -1), (Symbol::new("gd"), -2)]);
    let rep = bv_master_check(coll.signature(), &s_bad, &pairing, &ans);
    assert!(!rep.passed);
    assert!(!rep.bracket_trivial);
    assert!(!rep.residual.is_zero());
}

#[test]
fn nabla_for_simple_symmetries() {
    let sig = Signature::new(&["t", "x"]).with_field("u", 1, Parity::Even).with_field("E", 1, Parity::Even);
    let u = sig.var("u");
    let f = Poly::jet(u.derive(0)) - Poly::jet(u.derive(1));
    let sys = EquationSystem::new(vec![u], vec![f], None, Symbol::new("E"));
    let n = solve_nabla(&sig, &[Poly::jet(u.derive(1))], &sys, None).unwrap().unwrap();
    assert_eq!(n, TotalDiffOperator::d(MultiIndex::unit(1)));
    let n = solve_nabla(&sig, &[Poly::jet(u)], &sys, None).unwrap().unwrap();
    assert_eq!(n, TotalDiffOperator::identity(1));
    let xu = &Poly::coord(1) * &Poly::jet(u);
    for b in 0..=2 {
        assert!(solve_nabla(&sig, &[xu.clone()], &sys, Some(b)).unwrap().is_none());
    }
    let _ = (rat(0), euler(&Poly::zero(), &u), cohomology_equal(&Poly::zero(), &Poly::zero()));
}
