use std::collections::BTreeMap;

use crate::algebra::{Atom, JetVar, MultiIndex, Poly, Rational, Symbol};
use crate::error::{Error, Result};

/// Index of one bi-differential term `coeff · D^σ(first_a) · D^τ(second_b)` in output slot `out`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BiKey {
    pub out: usize,
    pub a: usize,
    pub sigma: MultiIndex,
    pub b: usize,
    pub tau: MultiIndex,
}

/// A bi-differential operator, applied with the first argument to the left of the second.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BiDiffSymbol {
    outputs: usize,
    terms: BTreeMap<BiKey, Poly>,
}

impl BiDiffSymbol {
    pub fn zero(outputs: usize) -> BiDiffSymbol {
        BiDiffSymbol { outputs, terms: BTreeMap::new() }
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<BiKey, Poly> {
        &self.terms
    }

    pub fn add_term(&mut self, key: BiKey, coeff: &Poly) {
        assert!(key.out < self.outputs);
        let slot = self.terms.entry(key).or_default();
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn scale(&self, k: &Rational) -> BiDiffSymbol {
        let mut out = BiDiffSymbol::zero(self.outputs);
        for (key, c) in &self.terms {
            out.add_term(*key, &c.scale(k));
        }
        out
    }

    pub fn add(&self, other: &BiDiffSymbol) -> BiDiffSymbol {
        let mut out = self.clone();
        for (key, c) in &other.terms {
            out.add_term(*key, c);
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&Poly) -> Poly) -> BiDiffSymbol {
        let mut out = BiDiffSymbol::zero(self.outputs);
        for (key, c) in &self.terms {
            out.add_term(*key, &f(c));
        }
        out
    }

    /// Evaluates on two tuples of sections.
    pub fn apply(&self, first: &[Poly], second: &[Poly]) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.outputs];
        let mut d1: BTreeMap<(usize, MultiIndex), Poly> = BTreeMap::new();
        let mut d2: BTreeMap<(usize, MultiIndex), Poly> = BTreeMap::new();
        for (k, c) in &self.terms {
            let x = d1.entry((k.a, k.sigma)).or_insert_with(|| first[k.a].total_derivative_multi(&k.sigma)).clone();
            let y = d2.entry((k.b, k.tau)).or_insert_with(|| second[k.b].total_derivative_multi(&k.tau)).clone();
            out[k.out] += &(c * &x) * &y;
        }
        out
    }

    /// Reads a symbol from polynomials bilinear in the even jets of `first` and `second`.
    pub fn from_bilinear(polys: &[Poly], first: Symbol, second: Symbol) -> Result<BiDiffSymbol> {
        let mut out = BiDiffSymbol::zero(polys.len());
        for (k, p) in polys.iter().enumerate() {
            for (m, c) in p.terms() {
                let mut f: Option<JetVar> = None;
                let mut s: Option<JetVar> = None;
                let mut bad = false;
                let (sel, rest, neg) = m.split(
                    |a| matches!(a, Atom::Jet(v) if v.field == first || v.field == second),
                    |_| false,
                    false,
                );
                for (a, n) in sel.even_part() {
                    if let Atom::Jet(v) = a {
                        let slot = if v.field == first { &mut f } else { &mut s };
                        if *n != 1 || slot.is_some() {
                            bad = true;
                        }
                        *slot = Some(*v);
                    }
                }
                if rest.jets().any(|v| v.field == first || v.field == second) {
                    bad = true;
                }
                let (f, s) = match (f, s, bad) {
                    (Some(f), Some(s), false) => (f, s),
                    _ => return Err(Error::Invalid("expression is not bilinear in the two sections".into())),
                };
                let coeff = Poly::term(rest, if neg { -c.clone() } else { c.clone() });
                out.add_term(BiKey { out: k, a: f.comp as usize, sigma: f.index, b: s.comp as usize, tau: s.index }, &coeff);
            }
        }
        Ok(out)
    }

    /// Sub-symbol `Γ^k_{ij}` for output block `k` and argument blocks `i`, `j` (ranges of components).
    pub fn block(&self, out: (usize, usize), a: (usize, usize), b: (usize, usize)) -> BiDiffSymbol {
        let mut res = BiDiffSymbol::zero(out.1);
        for (key, c) in &self.terms {
            let inside = |x: usize, r: (usize, usize)| x >= r.0 && x < r.0 + r.1;
            if inside(key.out, out) && inside(key.a, a) && inside(key.b, b) {
                res.add_term(
                    BiKey { out: key.out - out.0, a: key.a - a.0, sigma: key.sigma, b: key.b - b.0, tau: key.tau },
                    c,
                );
            }
        }
        res
    }

    /// Every jet appearing in coefficients.
    pub fn jets(&self) -> Vec<JetVar> {
        let mut v: Vec<JetVar> = self.terms.values().flat_map(|p| p.jets()).collect();
        v.sort();
        v.dedup();
        v
    }
}
