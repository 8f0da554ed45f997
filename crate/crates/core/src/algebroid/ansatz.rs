//! Undetermined-coefficient ansätze for bi-differential operators.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::bidiff::{BiDiffSymbol, BiKey};
use crate::algebra::{Atom, JetVar, Monomial, MultiIndex, Poly, Rational, Signature, Symbol};
use crate::diffop::TotalDiffOperator;
use crate::linalg::{solve_columns, SparseVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    /// Decide from the expression: antisymmetric ansatz iff the expression is antisymmetric.
    Auto,
    Antisymmetric,
    General,
}

/// One basis element `m · D^σ(first_a) · D^τ(second_b)`, antisymmetrized when requested.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BasisTerm {
    pub key: BiKey,
    pub coeff: Monomial,
    pub antisymmetric: bool,
}

impl BasisTerm {
    pub fn symbol(&self, outputs: usize, c: &Rational) -> BiDiffSymbol {
        let mut s = BiDiffSymbol::zero(outputs);
        let m = Poly::term(self.coeff.clone(), c.clone());
        s.add_term(self.key, &m);
        if self.antisymmetric {
            let k = self.key;
            s.add_term(BiKey { out: k.out, a: k.b, sigma: k.tau, b: k.a, tau: k.sigma }, &-m);
        }
        s
    }
}

/// Multi-indices of order at most `max` supported on the given directions.
pub fn indices_on(dirs: &[usize], max: u32) -> Vec<MultiIndex> {
    let mut out = vec![MultiIndex::ZERO];
    for &d in dirs {
        let mut next = Vec::new();
        for m in &out {
            for k in 0..=(max - m.order()) {
                let mut n = *m;
                n.0[d] = k as u8;
                next.push(n);
            }
        }
        out = next;
    }
    out.sort_by_key(|m| (m.order(), *m));
    out
}

/// All divisors of the commuting part of `m` (exponential factors kept whole or dropped).
pub fn divisors(m: &Monomial) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    for &(a, n) in m.even_part() {
        let mut next = Vec::with_capacity(out.len() * (n as usize + 1));
        for d in &out {
            for k in 0..=n {
                let (p, _) = d.mul(&Monomial::atom(a, k)).unwrap();
                next.push(p);
            }
        }
        out = next;
    }
    if !m.exp_part().is_empty() {
        let e = Monomial::exponential(m.exp_part().to_vec());
        let with: Vec<Monomial> = out.iter().map(|d| d.mul(&e).unwrap().0).collect();
        out.extend(with);
    }
    out
}

/// Monomials in the jets of `fields` of exact weight `w`, using only the given directions.
pub fn weighted_monomials(sig: &Signature, fields: &[JetVar], dirs: &[usize], w: &Rational) -> Vec<Monomial> {
    let zero = Rational::from_integer(0.into());
    if *w < zero {
        return Vec::new();
    }
    let mut jets: Vec<(JetVar, Rational)> = Vec::new();
    for q in fields {
        let wq = match sig.field_of(q.field).and_then(|f| f.weight.clone()) {
            Some(x) if x > zero => x,
            _ => return Vec::new(),
        };
        let max = (w - &wq).floor().to_integer();
        if max < 0.into() {
            continue;
        }
        let max: u32 = max.try_into().unwrap_or(0);
        for idx in indices_on(dirs, max) {
            jets.push((q.with_index(idx), &wq + Rational::from_integer((idx.order() as i64).into())));
        }
    }
    let mut out = Vec::new();
    fn rec(jets: &[(JetVar, Rational)], i: usize, left: Rational, cur: Monomial, out: &mut Vec<Monomial>) {
        let zero = Rational::from_integer(0.into());
        if left == zero {
            out.push(cur);
            return;
        }
        if i == jets.len() {
            return;
        }
        let (v, wv) = &jets[i];
        let mut k = 0u32;
        let mut rem = left.clone();
        loop {
            let m = cur.mul(&Monomial::atom(Atom::Jet(*v), k)).unwrap().0;
            rec(jets, i + 1, rem.clone(), m, out);
            rem -= wv;
            k += 1;
            if rem < zero {
                break;
            }
        }
    }
    rec(&jets, 0, w.clone(), Monomial::one(), &mut out);
    out.sort();
    out
}

/// Section pairs `(a, σ, b, τ)` with `|σ|+|τ| <= bound`; for the antisymmetric case one per unordered pair.
pub fn section_pairs(ncomp: usize, dirs: &[usize], bound: u32, antisym: bool) -> Vec<(usize, MultiIndex, usize, MultiIndex)> {
    let idx = indices_on(dirs, bound);
    let mut out = Vec::new();
    for a in 0..ncomp {
        for s in &idx {
            for b in 0..ncomp {
                for t in &idx {
                    if s.order() + t.order() > bound {
                        continue;
                    }
                    if antisym && (a, s.order(), *s) >= (b, t.order(), *t) {
                        continue;
                    }
                    out.push((a, *s, b, *t));
                }
            }
        }
    }
    out
}

/// Solves `Σ_k A_k(c_k) = expr` over the provided basis; returns the coefficients found.
pub fn solve_image(
    op: &TotalDiffOperator,
    first: Symbol,
    second: Symbol,
    sig: &Signature,
    basis: &[BasisTerm],
    expr: &[Poly],
) -> Option<BiDiffSymbol> {
    let outputs = op.cols();
    let (p1, p2) = section_vectors(sig, first, second, outputs);
    let columns: Vec<Vec<Poly>> = basis
        .par_iter()
        .map(|t| {
            let sym = t.symbol(outputs, &Rational::from_integer(1.into()));
            let c = sym.apply(&p1, &p2);
            op.apply(&c)
        })
        .collect();
    let mut index: BTreeMap<(usize, Monomial), usize> = BTreeMap::new();
    let sparse = |v: &[Poly], index: &mut BTreeMap<(usize, Monomial), usize>| -> SparseVec {
        let mut s = SparseVec::new();
        for (r, p) in v.iter().enumerate() {
            for (m, c) in p.terms() {
                let n = index.len();
                let i = *index.entry((r, m.clone())).or_insert(n);
                s.insert(i, c.clone());
            }
        }
        s
    };
    let target = sparse(expr, &mut index);
    let cols: Vec<SparseVec> = columns.iter().map(|c| sparse(c, &mut index)).collect();
    let x = solve_columns(&cols, &target)?;
    let mut out = BiDiffSymbol::zero(outputs);
    for (j, c) in x {
        out = out.add(&basis[j].symbol(outputs, &c));
    }
    Some(out)
}

/// The tuples `(first_0, first_1, ...)` and `(second_0, ...)` of order-0 section jets.
pub fn section_vectors(sig: &Signature, first: Symbol, second: Symbol, n: usize) -> (Vec<Poly>, Vec<Poly>) {
    let f = sig.field_of(first).expect("section field");
    let s = sig.field_of(second).expect("section field");
    let p1 = (0..n).map(|a| Poly::jet(JetVar::new(f.name, a as u16, MultiIndex::ZERO, f.parity))).collect();
    let p2 = (0..n).map(|a| Poly::jet(JetVar::new(s.name, a as u16, MultiIndex::ZERO, s.parity))).collect();
    (p1, p2)
}

/// Commuting parts of the terms of `expr` with the section jets removed.
pub fn coefficient_parts(expr: &[Poly], sections: &[Symbol]) -> BTreeSet<Monomial> {
    let mut out = BTreeSet::new();
    for p in expr {
        for (m, _) in p.terms() {
            let (_, rest, _) = m.split(
                |a| matches!(a, Atom::Jet(v) if sections.contains(&v.field)),
                |v| sections.contains(&v.field),
                false,
            );
            out.insert(rest.commuting_part());
        }
    }
    out
}
