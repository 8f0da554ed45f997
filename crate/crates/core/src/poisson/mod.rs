//! Hamiltonian operators, variational Poisson and Schouten brackets.

use crate::algebra::{ratio, JetVar, Parity, Poly};
use crate::algebroid::{DecompositionResult, Homological, OperatorCollection, SolveOptions};
use crate::diffop::{coupling, TotalDiffOperator};
use crate::error::Result;
use crate::jet::{euler, euler_right, EvolutionaryField};
use crate::Signature;

/// Canonically conjugate pairs `(even, odd)` of order-0 jets, one per component.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Pairing {
    pub pairs: Vec<(JetVar, JetVar)>,
}

impl Pairing {
    pub fn new(pairs: Vec<(JetVar, JetVar)>) -> Pairing {
        for (e, o) in &pairs {
            assert!(!e.is_odd() && o.is_odd(), "pairs are (even, odd)");
        }
        Pairing { pairs }
    }

    /// Pairs all components of an even field with those of an odd one.
    pub fn fields(sig: &Signature, even: &str, odd: &str) -> Pairing {
        let e = sig.field(even).expect("declared field");
        let n = e.components;
        Pairing::new((0..n).map(|k| (sig.jet(even, k, Default::default()), sig.jet(odd, k, Default::default()))).collect())
    }

    pub fn extend(mut self, other: Pairing) -> Pairing {
        self.pairs.extend(other.pairs);
        self
    }
}

/// `{H1, H2}_A = ⟨δH1/δq, A(δH2/δq)⟩`.
pub fn poisson_bracket(h1: &Poly, h2: &Poly, a: &TotalDiffOperator, fields: &[JetVar]) -> Result<Poly> {
    let d1: Vec<Poly> = fields.iter().map(|q| euler(h1, q)).collect();
    let d2: Vec<Poly> = fields.iter().map(|q| euler(h2, q)).collect();
    coupling(&d1, &a.try_apply(&d2)?)
}

/// The even charge `-½⟨b, A(b)⟩`.
pub fn w_charge(a: &TotalDiffOperator, b: &[Poly]) -> Result<Poly> {
    Ok(coupling(b, &a.try_apply(b)?)?.scale(&ratio(-1, 2)))
}

/// `[[ω1, ω2]] = Σ (→δω1/δo · ←δω2/δe - →δω1/δe · ←δω2/δo)` over the pairs `(e, o)`.
pub fn schouten(w1: &Poly, w2: &Poly, pairing: &Pairing) -> Poly {
    let mut out = Poly::zero();
    for (e, o) in &pairing.pairs {
        let a = euler_right(w1, o);
        if !a.is_zero() {
            out += &a * &euler(w2, e);
        }
        let b = euler_right(w1, e);
        if !b.is_zero() {
            out -= &b * &euler(w2, o);
        }
    }
    out
}

/// The field `X` with `X(ξ) = [[Ω, ξ]]` on generators: `e ↦ →δΩ/δo`, `o ↦ -δΩ/δe`.
pub fn field_of_charge(omega: &Poly, pairing: &Pairing) -> EvolutionaryField {
    let parity = omega.parity_or_even().flip();
    let mut x = EvolutionaryField::new(parity);
    for (e, o) in &pairing.pairs {
        x.set(*e, euler_right(omega, o)).expect("velocity parity");
        x.set(*o, -euler(omega, e)).expect("velocity parity");
    }
    x
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HamiltonianReport {
    pub skew_adjoint: bool,
    pub extraction: Option<DecompositionResult>,
    pub homological: Option<Homological>,
}

impl HamiltonianReport {
    /// `Some(true)` Hamiltonian, `Some(false)` not, `None` inconclusive at the bound.
    pub fn verdict(&self) -> Option<bool> {
        if !self.skew_adjoint {
            return Some(false);
        }
        match (&self.extraction, self.homological) {
            (Some(d), _) if !d.is_exact() => None,
            (_, Some(Homological::Failed)) => Some(false),
            (_, Some(_)) => Some(true),
            _ => None,
        }
    }
}

/// Skew-adjointness followed by `Q² = 0` for the field built from the extracted Christoffel symbols.
pub fn is_hamiltonian(sig: &Signature, target: JetVar, a: &TotalDiffOperator, ghost: &str, opts: SolveOptions) -> Result<HamiltonianReport> {
    let skew = a.is_skew_adjoint();
    if !skew {
        return Ok(HamiltonianReport { skew_adjoint: false, extraction: None, homological: None });
    }
    let mut sig = sig.clone();
    if sig.field(ghost).is_none() {
        sig.add_field(ghost, a.cols() as u16, Parity::Odd, None)?;
    }
    let coll = OperatorCollection::single(&sig, target, a.clone())?;
    let dec = coll.christoffel_extract(opts);
    if !dec.is_exact() {
        return Ok(HamiltonianReport { skew_adjoint: true, extraction: Some(dec), homological: None });
    }
    let g = sig.field(ghost).unwrap().name;
    let q = coll.build_q(&dec.c, g)?;
    let rep = coll.verify_homological(&q, g)?;
    Ok(HamiltonianReport { skew_adjoint: true, extraction: Some(dec), homological: Some(rep.outcome) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{cohomology_equal, is_trivial_class};
    use crate::text::{parse_op, parse_poly, Env};

    fn sig() -> Signature {
        Signature::new(&["x"]).with_field("w", 1, Parity::Even).with_field("b", 1, Parity::Odd)
    }

    #[test]
    fn kdv_master_equation_and_charge_field() {
        let s = sig();
        let env = Env::new(&s);
        let a2 = parse_op(&env, "-1/2*Dx^3 + 2*w*Dx + w_x").unwrap();
        let b = vec![s.poly("b")];
        let omega = w_charge(&a2, &b).unwrap().scale(&crate::algebra::rat(-1));
        let pairing = Pairing::fields(&s, "w", "b");
        assert!(is_trivial_class(&schouten(&omega, &omega, &pairing)));
        let q = field_of_charge(&-omega.clone(), &pairing);
        assert_eq!(q.section(&s.var("w")), a2.apply1(&s.poly("b")));
        assert_eq!(q.section(&s.var("b")), parse_poly(&env, "b*b_x").unwrap());
    }

    #[test]
    fn dx_charge_field() {
        let s = sig();
        let env = Env::new(&s);
        let d = parse_op(&env, "Dx").unwrap();
        let charge = w_charge(&d, &[s.poly("b")]).unwrap();
        assert_eq!(charge, parse_poly(&env, "-1/2*b*b_x").unwrap());
        let q = field_of_charge(&charge, &Pairing::fields(&s, "w", "b"));
        assert_eq!(q.section(&s.var("w")), s.poly_x("b", 1));
        assert!(q.section(&s.var("b")).is_zero());
    }

    #[test]
    fn poisson_bracket_examples() {
        let s = sig();
        let env = Env::new(&s);
        let d = parse_op(&env, "Dx").unwrap();
        let h1 = parse_poly(&env, "1/2*w^2").unwrap();
        let h2 = s.poly("w");
        let br = poisson_bracket(&h1, &h2, &d, &[s.var("w")]).unwrap();
        assert!(cohomology_equal(&br, &Poly::zero()));
    }
}
