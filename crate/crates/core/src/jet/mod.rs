//! Total derivatives, evolutionary fields, linearizations and the Euler operator.

mod onshell;

pub use onshell::{EquationKind, EquationNormalForm};

use std::collections::{BTreeMap, HashMap};

use crate::algebra::{Generator, JetVar, MultiIndex, Parity, Poly, Signature, Symbol, MAX_DIM};
use crate::diffop::TotalDiffOperator;
use crate::error::{Error, Result};

/// An evolutionary derivation `∂_φ` given by its generating section on each field component.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct EvolutionaryField {
    parity: Parity,
    sections: BTreeMap<JetVar, Poly>,
}

impl EvolutionaryField {
    pub fn new(parity: Parity) -> EvolutionaryField {
        EvolutionaryField { parity, sections: BTreeMap::new() }
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Sets the velocity of the order-0 jet `q`. Zero velocities are not stored.
    pub fn set(&mut self, q: JetVar, section: Poly) -> Result<()> {
        let q = q.base();
        if let Some(p) = section.parity() {
            if !section.is_zero() && p != q.parity.add(self.parity) {
                return Err(Error::Invalid(format!(
                    "section for `{}` has parity {p}, expected {}",
                    q.field,
                    q.parity.add(self.parity)
                )));
            }
        } else {
            return Err(Error::Invalid(format!("section for `{}` has mixed parity", q.field)));
        }
        if section.is_zero() {
            self.sections.remove(&q);
        } else {
            self.sections.insert(q, section);
        }
        Ok(())
    }

    pub fn with(mut self, q: JetVar, section: Poly) -> EvolutionaryField {
        self.set(q, section).expect("section parity");
        self
    }

    pub fn section(&self, q: &JetVar) -> Poly {
        self.sections.get(&q.base()).cloned().unwrap_or_default()
    }

    pub fn sections(&self) -> &BTreeMap<JetVar, Poly> {
        &self.sections
    }

    pub fn is_zero(&self) -> bool {
        self.sections.is_empty()
    }

    /// Applies the prolonged field to `p`.
    pub fn apply(&self, p: &Poly) -> Poly {
        Prolongation::new(self).apply(p)
    }

    /// Graded commutator `[X, Y]`.
    pub fn commutator(&self, other: &EvolutionaryField) -> EvolutionaryField {
        let parity = self.parity.add(other.parity);
        let mut out = EvolutionaryField::new(parity);
        let neg = self.parity.koszul(other.parity);
        let mut px = Prolongation::new(self);
        let mut py = Prolongation::new(other);
        let keys: std::collections::BTreeSet<JetVar> =
            self.sections.keys().chain(other.sections.keys()).copied().collect();
        for q in keys {
            let a = px.apply(&other.section(&q));
            let b = py.apply(&self.section(&q));
            let s = if neg { a + b } else { a - b };
            out.set(q, s).expect("commutator parity");
        }
        out
    }

    /// The field `X∘X` for odd `X` (half the self-commutator); for even fields this is the full square of sections.
    pub fn square(&self) -> EvolutionaryField {
        let mut out = EvolutionaryField::new(Parity::Even);
        let mut px = Prolongation::new(self);
        for (q, s) in &self.sections {
            let v = px.apply(s);
            out.sections.insert(*q, v);
        }
        out.sections.retain(|_, p| !p.is_zero());
        out
    }

    pub fn add(&self, other: &EvolutionaryField) -> EvolutionaryField {
        assert_eq!(self.parity, other.parity, "adding fields of different parity");
        let mut out = self.clone();
        for (q, s) in &other.sections {
            let v = out.section(q) + s.clone();
            out.set(*q, v).expect("parity");
        }
        out
    }

    pub fn neg(&self) -> EvolutionaryField {
        EvolutionaryField { parity: self.parity, sections: self.sections.iter().map(|(q, s)| (*q, -s)).collect() }
    }

    /// Restriction to the given fields.
    pub fn restrict(&self, keep: impl Fn(&JetVar) -> bool) -> EvolutionaryField {
        EvolutionaryField {
            parity: self.parity,
            sections: self.sections.iter().filter(|(q, _)| keep(q)).map(|(q, s)| (*q, s.clone())).collect(),
        }
    }
}

/// An evolutionary field together with a cache of the prolonged velocities `D^σ(φ)`.
pub struct Prolongation<'a> {
    field: &'a EvolutionaryField,
    cache: HashMap<JetVar, Poly>,
}

impl<'a> Prolongation<'a> {
    pub fn new(field: &'a EvolutionaryField) -> Prolongation<'a> {
        Prolongation { field, cache: HashMap::new() }
    }

    /// Velocity of an arbitrary jet.
    pub fn velocity(&mut self, v: &JetVar) -> Poly {
        if let Some(p) = self.cache.get(v) {
            return p.clone();
        }
        let out = match v.index.first_dir() {
            None => self.field.section(v),
            Some(d) => {
                let mut parent = *v;
                parent.index.0[d] -= 1;
                let base = self.velocity(&parent);
                base.total_derivative(d)
            }
        };
        self.cache.insert(*v, out.clone());
        out
    }

    pub fn apply(&mut self, p: &Poly) -> Poly {
        if self.field.sections.is_empty() {
            return Poly::zero();
        }
        let parity = self.field.parity;
        let fields: Vec<JetVar> = self.field.sections.keys().copied().collect();
        p.derive_with(parity, &mut |g| match g {
            Generator::Jet(v) if fields.contains(&v.base()) => Some(self.velocity(&v)),
            _ => None,
        })
    }
}

/// The linearization `ℓ_F` with respect to the components of `field`.
pub fn linearization(sig: &Signature, f: &[Poly], field: Symbol) -> TotalDiffOperator {
    let decl = sig.field_of(field).expect("declared field");
    let cols: Vec<JetVar> =
        (0..decl.components).map(|k| JetVar::new(field, k, MultiIndex::ZERO, decl.parity)).collect();
    linearization_cols(f, &cols)
}

/// The linearization with columns given by the listed order-0 jets.
pub fn linearization_cols(f: &[Poly], cols: &[JetVar]) -> TotalDiffOperator {
    let mut op = TotalDiffOperator::zero(f.len(), cols.len());
    for (j, fj) in f.iter().enumerate() {
        for v in fj.jets() {
            if let Some(c) = cols.iter().position(|q| *q == v.base()) {
                let d = fj.partial(&v);
                if !d.is_zero() {
                    op.add_to(j, c, v.index, &d);
                }
            }
        }
    }
    op
}

/// Jets of the base field `q` appearing in `p`, including function and exponent arguments.
fn jets_of(p: &Poly, q: &JetVar) -> Vec<JetVar> {
    p.jets().into_iter().filter(|v| v.base() == q.base()).collect()
}

fn signed_derivative(p: &Poly, index: &MultiIndex) -> Poly {
    let d = p.total_derivative_multi(index);
    if index.order() % 2 == 1 {
        -d
    } else {
        d
    }
}

/// Left variational derivative `δL/δq = Σ (-D)^τ ∂L/∂q_τ`.
pub fn euler(density: &Poly, q: &JetVar) -> Poly {
    let mut out = Poly::zero();
    for v in jets_of(density, q) {
        out += signed_derivative(&density.partial(&v), &v.index);
    }
    out
}

/// Right variational derivative (the variable is moved to the end before removal).
pub fn euler_right(density: &Poly, q: &JetVar) -> Poly {
    let mut out = Poly::zero();
    for v in jets_of(density, q) {
        out += signed_derivative(&density.partial_right(&v), &v.index);
    }
    out
}

/// All order-0 field jets that occur in `p`.
pub fn base_jets(p: &Poly) -> Vec<JetVar> {
    let mut v: Vec<JetVar> = p.jets().into_iter().map(|v| v.base()).collect();
    v.dedup();
    v
}

/// Equality of horizontal cohomology classes, decided by the Euler operator of the difference.
pub fn cohomology_equal(a: &Poly, b: &Poly) -> bool {
    is_trivial_class(&(a - b))
}

/// True iff the density is a total divergence.
pub fn is_trivial_class(p: &Poly) -> bool {
    base_jets(p).iter().all(|q| euler(p, q).is_zero())
}

/// Total divergence `Σ_i D_i(g_i)`.
pub fn divergence(g: &[Poly]) -> Poly {
    let mut out = Poly::zero();
    for (i, gi) in g.iter().enumerate().take(MAX_DIM) {
        out += gi.total_derivative(i);
    }
    out
}
