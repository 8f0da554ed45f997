use std::collections::{BTreeMap, HashMap, HashSet};

use crate::algebra::{Generator, JetVar, MultiIndex, Poly};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquationKind {
    /// `q_t = rhs` with `rhs` free of `t`-derivatives.
    Evolution { time: usize },
    /// `q_xy = rhs` with `rhs` free of mixed `x,y`-derivatives.
    Hyperbolic { x: usize, y: usize },
}

/// A system in one of the two supported normal forms, keyed by order-0 field jet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationNormalForm {
    kind: EquationKind,
    rhs: BTreeMap<JetVar, Poly>,
}

impl EquationNormalForm {
    pub fn new(kind: EquationKind, rhs: BTreeMap<JetVar, Poly>) -> Result<EquationNormalForm> {
        let nf = EquationNormalForm { kind, rhs: rhs.into_iter().map(|(q, p)| (q.base(), p)).collect() };
        if let EquationKind::Hyperbolic { x, y } = kind {
            if x == y {
                return Err(Error::Invalid("hyperbolic form needs two distinct directions".into()));
            }
        }
        for p in nf.rhs.values() {
            if let Some(v) = p.jets().into_iter().find(|v| nf.is_reducible(v)) {
                return Err(Error::Invalid(format!(
                    "right-hand side is not in normal form: contains a derivative of `{}` reducible by the equation",
                    v.field
                )));
            }
        }
        Ok(nf)
    }

    pub fn kind(&self) -> EquationKind {
        self.kind
    }

    pub fn rhs(&self) -> &BTreeMap<JetVar, Poly> {
        &self.rhs
    }

    /// The principal jet of `q`: `q_t` or `q_xy`.
    pub fn principal(&self, q: &JetVar) -> JetVar {
        match self.kind {
            EquationKind::Evolution { time } => q.base().with_index(MultiIndex::unit(time)),
            EquationKind::Hyperbolic { x, y } => q.base().with_index(MultiIndex::unit(x).add(&MultiIndex::unit(y))),
        }
    }

    pub fn is_reducible(&self, v: &JetVar) -> bool {
        if !self.rhs.contains_key(&v.base()) {
            return false;
        }
        match self.kind {
            EquationKind::Evolution { time } => v.index.get(time) > 0,
            EquationKind::Hyperbolic { x, y } => v.index.get(x) > 0 && v.index.get(y) > 0,
        }
    }

    /// Normal form of `p` modulo the equation and all its differential consequences.
    pub fn reduce(&self, p: &Poly) -> Result<Poly> {
        Reducer::new(self, false).reduce(p)
    }

    /// Same normal form computed along the alternative peeling order; used for confluence checks.
    pub fn reduce_alternate(&self, p: &Poly) -> Result<Poly> {
        Reducer::new(self, true).reduce(p)
    }
}

struct Reducer<'a> {
    eq: &'a EquationNormalForm,
    alternate: bool,
    memo: HashMap<JetVar, Poly>,
    active: HashSet<JetVar>,
}

impl<'a> Reducer<'a> {
    fn new(eq: &'a EquationNormalForm, alternate: bool) -> Reducer<'a> {
        Reducer { eq, alternate, memo: HashMap::new(), active: HashSet::new() }
    }

    fn reduce(&mut self, p: &Poly) -> Result<Poly> {
        let targets: Vec<JetVar> = p.jets().into_iter().filter(|v| self.eq.is_reducible(v)).collect();
        if targets.is_empty() {
            return Ok(p.clone());
        }
        let mut images = HashMap::new();
        for v in targets {
            let nf = self.jet(&v)?;
            images.insert(v, nf);
        }
        Ok(p.substitute(&mut |g| match g {
            Generator::Jet(v) => images.get(&v).cloned(),
            _ => None,
        }))
    }

    fn jet(&mut self, v: &JetVar) -> Result<Poly> {
        if let Some(p) = self.memo.get(v) {
            return Ok(p.clone());
        }
        if !self.active.insert(*v) {
            return Err(Error::Invalid("on-shell reduction does not terminate for this equation".into()));
        }
        let principal = self.eq.principal(v);
        let out = if *v == principal {
            self.eq.rhs[&v.base()].clone()
        } else {
            let dir = self.peel_dir(v);
            let mut parent = *v;
            parent.index.0[dir] -= 1;
            let lower = self.jet(&parent)?;
            self.reduce(&lower.total_derivative(dir))?
        };
        self.active.remove(v);
        self.memo.insert(*v, out.clone());
        Ok(out)
    }

    /// Direction to strip from a reducible jet that is not itself principal.
    fn peel_dir(&self, v: &JetVar) -> usize {
        let principal = self.eq.principal(v).index;
        let excess = v.index.checked_sub(&principal).expect("reducible jet dominates the principal one");
        let dirs: Vec<usize> = (0..crate::algebra::MAX_DIM).filter(|&d| excess.get(d) > 0).collect();
        if self.alternate {
            *dirs.last().unwrap()
        } else {
            dirs[0]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, Parity, Signature};

    fn liouville() -> (Signature, EquationNormalForm) {
        let s = Signature::new(&["x", "y"]).with_field("q", 1, Parity::Even);
        let mut rhs = BTreeMap::new();
        rhs.insert(s.var("q"), Poly::exp(vec![(s.var("q"), 2)]));
        let eq = EquationNormalForm::new(EquationKind::Hyperbolic { x: 0, y: 1 }, rhs).unwrap();
        (s, eq)
    }

    #[test]
    fn liouville_integral_is_conserved() {
        let (s, eq) = liouville();
        let w = &s.poly_x("q", 1).pow(2) - &s.poly_x("q", 2);
        assert!(eq.reduce(&w.total_derivative(1)).unwrap().is_zero());
        let qxxy = Poly::jet(s.jet("q", 0, MultiIndex::from_slice(&[2, 1])));
        let expect = &(&s.poly_x("q", 1) * &Poly::exp(vec![(s.var("q"), 2)])).scale(&rat(2)) + &Poly::zero();
        assert_eq!(eq.reduce(&qxxy).unwrap(), expect);
    }

    #[test]
    fn rejects_non_normal_rhs() {
        let s = Signature::new(&["t", "x"]).with_field("u", 1, Parity::Even);
        let mut rhs = BTreeMap::new();
        rhs.insert(s.var("u"), Poly::jet(s.jet("u", 0, MultiIndex::from_slice(&[1, 1]))));
        assert!(EquationNormalForm::new(EquationKind::Evolution { time: 0 }, rhs).is_err());
    }
}
