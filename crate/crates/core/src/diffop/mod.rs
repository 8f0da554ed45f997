//! Matrix linear operators in total derivatives, stored as `Σ_τ a_τ D^τ` with coefficients on the left.

use std::collections::BTreeMap;

use num_traits::One;

use crate::algebra::{JetVar, MultiIndex, Poly, Rational};
use crate::error::{Error, Result};

type Entry = BTreeMap<MultiIndex, Poly>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TotalDiffOperator {
    rows: usize,
    cols: usize,
    entries: Vec<Entry>,
}

impl TotalDiffOperator {
    pub fn zero(rows: usize, cols: usize) -> TotalDiffOperator {
        TotalDiffOperator { rows, cols, entries: vec![Entry::new(); rows * cols] }
    }

    pub fn identity(n: usize) -> TotalDiffOperator {
        let mut op = TotalDiffOperator::zero(n, n);
        for i in 0..n {
            op.add_to(i, i, MultiIndex::ZERO, &Poly::one());
        }
        op
    }

    /// Scalar multiplication operator.
    pub fn mult(p: Poly) -> TotalDiffOperator {
        let mut op = TotalDiffOperator::zero(1, 1);
        op.add_to(0, 0, MultiIndex::ZERO, &p);
        op
    }

    /// Scalar `D^index`.
    pub fn d(index: MultiIndex) -> TotalDiffOperator {
        let mut op = TotalDiffOperator::zero(1, 1);
        op.add_to(0, 0, index, &Poly::one());
        op
    }

    pub fn scalar(terms: impl IntoIterator<Item = (MultiIndex, Poly)>) -> TotalDiffOperator {
        let mut op = TotalDiffOperator::zero(1, 1);
        for (t, p) in terms {
            op.add_to(0, 0, t, &p);
        }
        op
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, r: usize, c: usize) -> &BTreeMap<MultiIndex, Poly> {
        &self.entries[r * self.cols + c]
    }

    pub fn coeff(&self, r: usize, c: usize, t: &MultiIndex) -> Poly {
        self.entry(r, c).get(t).cloned().unwrap_or_default()
    }

    pub fn add_to(&mut self, r: usize, c: usize, t: MultiIndex, p: &Poly) {
        let e = &mut self.entries[r * self.cols + c];
        let slot = e.entry(t).or_default();
        *slot += p;
        if slot.is_zero() {
            e.remove(&t);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_empty())
    }

    pub fn is_scalar(&self) -> bool {
        self.rows == 1 && self.cols == 1
    }

    /// Highest total derivative order with a nonzero coefficient.
    pub fn order(&self) -> u32 {
        self.entries.iter().flat_map(|e| e.keys().map(|t| t.order())).max().unwrap_or(0)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Poly) -> Poly) -> TotalDiffOperator {
        let mut out = TotalDiffOperator::zero(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                for (t, p) in self.entry(r, c) {
                    out.add_to(r, c, *t, &f(p));
                }
            }
        }
        out
    }

    pub fn scale(&self, k: &Rational) -> TotalDiffOperator {
        self.map_coeffs(|p| p.scale(k))
    }

    pub fn neg(&self) -> TotalDiffOperator {
        self.map_coeffs(|p| -p)
    }

    fn check_same(&self, other: &TotalDiffOperator) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Invalid(format!(
                "operator layouts differ: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &TotalDiffOperator) -> Result<TotalDiffOperator> {
        self.check_same(other)?;
        let mut out = self.clone();
        for r in 0..self.rows {
            for c in 0..self.cols {
                for (t, p) in other.entry(r, c) {
                    out.add_to(r, c, *t, p);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &TotalDiffOperator) -> TotalDiffOperator {
        self.try_add(other).expect("operator layout")
    }

    pub fn sub(&self, other: &TotalDiffOperator) -> TotalDiffOperator {
        self.add(&other.neg())
    }

    /// Component `j` of the image is `Σ_{k,τ} a_τ · D^τ(s_k)`.
    pub fn try_apply(&self, s: &[Poly]) -> Result<Vec<Poly>> {
        if s.len() != self.cols {
            return Err(Error::Invalid(format!("operator expects {} arguments, got {}", self.cols, s.len())));
        }
        let mut cache: Vec<BTreeMap<MultiIndex, Poly>> = vec![BTreeMap::new(); self.cols];
        let mut out = vec![Poly::zero(); self.rows];
        for r in 0..self.rows {
            for c in 0..self.cols {
                for (t, a) in self.entry(r, c) {
                    let d = derivative_cached(&mut cache[c], &s[c], t);
                    out[r] += a * &d;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, s: &[Poly]) -> Vec<Poly> {
        self.try_apply(s).expect("operator layout")
    }

    /// Scalar operator applied to a single argument.
    pub fn apply1(&self, s: &Poly) -> Poly {
        assert!(self.cols == 1 && self.rows == 1, "apply1 needs a scalar operator");
        self.apply(std::slice::from_ref(s)).pop().unwrap()
    }

    /// Composition `self ∘ other`.
    pub fn try_compose(&self, other: &TotalDiffOperator) -> Result<TotalDiffOperator> {
        if self.cols != other.rows {
            return Err(Error::Invalid(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = TotalDiffOperator::zero(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entry(r, k);
                if a.is_empty() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.entry(k, c);
                    if b.is_empty() {
                        continue;
                    }
                    for (sigma, asig) in a {
                        for rho in sigma.sub_indices() {
                            let binom = Poly::constant(Rational::from_integer(sigma.binomial(&rho)));
                            let rest = sigma.checked_sub(&rho).unwrap();
                            let left = asig * &binom;
                            for (tau, btau) in b {
                                let db = btau.total_derivative_multi(&rho);
                                if db.is_zero() {
                                    continue;
                                }
                                out.add_to(r, c, rest.add(tau), &(&left * &db));
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn compose(&self, other: &TotalDiffOperator) -> TotalDiffOperator {
        self.try_compose(other).expect("operator layout")
    }

    /// Formal adjoint: transpose with `a_τ D^τ ↦ (-1)^{|τ|} D^τ ∘ a_τ`.
    pub fn adjoint(&self) -> TotalDiffOperator {
        let mut out = TotalDiffOperator::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                for (tau, a) in self.entry(r, c) {
                    let sign = if tau.order() % 2 == 1 { -Rational::one() } else { Rational::one() };
                    for rho in tau.sub_indices() {
                        let k = Rational::from_integer(tau.binomial(&rho)) * &sign;
                        let da = a.total_derivative_multi(&rho).scale(&k);
                        out.add_to(c, r, tau.checked_sub(&rho).unwrap(), &da);
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> TotalDiffOperator {
        let mut out = TotalDiffOperator::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.entries[c * self.rows + r] = self.entry(r, c).clone();
            }
        }
        out
    }

    /// Block concatenation `(A_1 | A_2 | ...)` into a wide operator.
    pub fn hstack(ops: &[TotalDiffOperator]) -> Result<TotalDiffOperator> {
        let rows = ops.first().map(|o| o.rows).unwrap_or(0);
        if ops.iter().any(|o| o.rows != rows) {
            return Err(Error::Invalid("operators in a collection must share their target".into()));
        }
        let cols: usize = ops.iter().map(|o| o.cols).sum();
        let mut out = TotalDiffOperator::zero(rows, cols);
        let mut off = 0;
        for o in ops {
            for r in 0..rows {
                for c in 0..o.cols {
                    out.entries[r * cols + off + c] = o.entry(r, c).clone();
                }
            }
            off += o.cols;
        }
        Ok(out)
    }

    /// Columns `start..start+len`.
    pub fn columns(&self, start: usize, len: usize) -> TotalDiffOperator {
        let mut out = TotalDiffOperator::zero(self.rows, len);
        for r in 0..self.rows {
            for c in 0..len {
                out.entries[r * len + c] = self.entry(r, start + c).clone();
            }
        }
        out
    }

    /// Every jet appearing in some coefficient.
    pub fn jets(&self) -> Vec<JetVar> {
        let mut v: Vec<JetVar> = self.entries.iter().flat_map(|e| e.values().flat_map(|p| p.jets())).collect();
        v.sort();
        v.dedup();
        v
    }

    /// True iff `A = -A†`.
    pub fn is_skew_adjoint(&self) -> bool {
        self.rows == self.cols && self.adjoint() == self.neg()
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.rows == self.cols && self.adjoint() == *self
    }
}

fn derivative_cached(cache: &mut BTreeMap<MultiIndex, Poly>, s: &Poly, t: &MultiIndex) -> Poly {
    if let Some(p) = cache.get(t) {
        return p.clone();
    }
    let out = match t.first_dir() {
        None => s.clone(),
        Some(d) => {
            let mut parent = *t;
            parent.0[d] -= 1;
            derivative_cached(cache, s, &parent).total_derivative(d)
        }
    };
    cache.insert(*t, out.clone());
    out
}

/// The density `Σ_k ψ_k φ_k`, in the order written.
pub fn coupling(psi: &[Poly], phi: &[Poly]) -> Result<Poly> {
    if psi.len() != phi.len() {
        return Err(Error::Invalid(format!("coupling of tuples of lengths {} and {}", psi.len(), phi.len())));
    }
    let mut out = Poly::zero();
    for (a, b) in psi.iter().zip(phi) {
        out += a * b;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, ratio, Parity, Signature};

    fn dx(k: u8) -> MultiIndex {
        MultiIndex::pow(0, k)
    }

    #[test]
    fn compose_examples() {
        let s = Signature::new(&["x"]).with_field("u", 1, Parity::Even);
        let d = TotalDiffOperator::d(dx(1));
        assert_eq!(d.compose(&d), TotalDiffOperator::d(dx(2)));
        let u = TotalDiffOperator::mult(s.poly("u"));
        assert_eq!(u.compose(&d), TotalDiffOperator::scalar([(dx(1), s.poly("u"))]));
        assert_eq!(d.compose(&u), TotalDiffOperator::scalar([(dx(1), s.poly("u")), (dx(0), s.poly_x("u", 1))]));
    }

    #[test]
    fn adjoint_examples() {
        let s = Signature::new(&["x"]).with_field("w", 1, Parity::Even);
        let d = TotalDiffOperator::d(dx(1));
        assert_eq!(d.adjoint(), d.neg());
        let a2 = TotalDiffOperator::scalar([
            (dx(3), Poly::constant(ratio(-1, 2))),
            (dx(1), s.poly("w").scale(&rat(2))),
            (dx(0), s.poly_x("w", 1)),
        ]);
        assert!(a2.is_skew_adjoint());
        let ud = TotalDiffOperator::scalar([(dx(1), s.poly("w"))]);
        assert_eq!(ud.adjoint(), TotalDiffOperator::scalar([(dx(1), -s.poly("w")), (dx(0), -s.poly_x("w", 1))]));
    }
}
