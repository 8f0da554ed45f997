//! Undetermined-coefficient search for scalar operators with involutive images.

mod solver;

pub use solver::{rational_roots, Leaf, Solver};

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::algebra::{rat, Atom, FuncAtom, Generator, JetVar, Monomial, MultiIndex, Parity, Poly, Rational, Signature, Symbol};
use crate::algebroid::{weighted_monomials, BiDiffSymbol, BiKey, Homological, OperatorCollection, SolveOptions};
use crate::diffop::TotalDiffOperator;
use crate::error::Result;
use crate::text;

/// Ansatz shape: one field `u` of weight `field_weight` on a line, `|D_x| = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnsatzSpec {
    pub field_weight: Rational,
    pub weight: u32,
    pub max_order: u32,
    /// Multiply every coefficient by a formal function `f(u)`.
    pub formal: bool,
}

impl AnsatzSpec {
    pub fn new(weight: u32) -> AnsatzSpec {
        AnsatzSpec { field_weight: rat(2), weight, max_order: weight, formal: false }
    }

    pub fn signature(&self) -> Signature {
        let mut sig = Signature::new(&["x"]);
        sig.add_field("u", 1, Parity::Even, Some(self.field_weight.clone())).expect("fresh");
        if self.formal {
            sig.add_func("f");
        }
        sig
    }
}

/// A parametric operator `Σ_τ (Σ_i #i m_i) D^τ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamOperator {
    pub op: TotalDiffOperator,
    /// `(order, coefficient monomial)` per parameter index.
    pub basis: Vec<(u32, Monomial)>,
}

impl ParamOperator {
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// The operator with parameter values `c`.
    pub fn specialize(&self, c: &[Rational]) -> TotalDiffOperator {
        let mut op = TotalDiffOperator::zero(1, 1);
        for ((t, m), v) in self.basis.iter().zip(c) {
            if !v.is_zero() {
                op.add_to(0, 0, MultiIndex::pow(0, *t as u8), &Poly::term(m.clone(), v.clone()));
            }
        }
        op
    }

    /// Coordinates of a concrete operator in this ansatz, if it lies in it.
    pub fn coordinates(&self, op: &TotalDiffOperator) -> Option<Vec<Rational>> {
        let mut c = vec![Rational::zero(); self.len()];
        let mut seen = 0;
        for (t, p) in op.entry(0, 0) {
            for (m, v) in p.terms() {
                let i = self.basis.iter().position(|(o, b)| *o == t.order() && b == m)?;
                c[i] = v.clone();
                seen += 1;
            }
        }
        let _ = seen;
        Some(c)
    }
}

fn f_atom(u: JetVar, k: u32) -> Monomial {
    Monomial::atom(Atom::Func(FuncAtom { name: Symbol::new("f"), order: k, arg: u }), 1)
}

/// All weight-homogeneous scalar operators of the given weight, with one parameter per coefficient monomial.
/// Parameters are ordered by decreasing derivative order.
pub fn enumerate_ansatz(spec: &AnsatzSpec) -> ParamOperator {
    let sig = spec.signature();
    let u = sig.var("u");
    let mut basis = Vec::new();
    for t in (0..=spec.max_order.min(spec.weight)).rev() {
        let w = rat(spec.weight as i64 - t as i64);
        for m in weighted_monomials(&sig, &[u], &[0], &w) {
            let m = if spec.formal { f_atom(u, 0).mul(&m).unwrap().0 } else { m };
            basis.push((t, m));
        }
    }
    let mut op = TotalDiffOperator::zero(1, 1);
    for (i, (t, m)) in basis.iter().enumerate() {
        op.add_to(0, 0, MultiIndex::pow(0, *t as u8), &Poly::term(m.clone(), Rational::one()).mul_monomial_left(&Monomial::atom(Atom::Param(i as u32), 1), &Rational::one()));
    }
    ParamOperator { op, basis }
}

/// Antisymmetric bi-differential ansatz for `Γ` of weight `weight - 2`, parameters from `first`.
fn gamma_ansatz(spec: &AnsatzSpec, sig: &Signature, first: u32) -> (BiDiffSymbol, usize) {
    let u = sig.var("u");
    let total = spec.weight as i64 - 2;
    let mut g = BiDiffSymbol::zero(1);
    let mut k = first;
    if total < 0 {
        return (g, 0);
    }
    let fk: Vec<u32> = if spec.formal { vec![0, 1] } else { vec![0] };
    for s in 0..=total as u32 {
        for t in (s + 1)..=(total as u32 - s) {
            for &d in &fk {
                let w = rat(total - (s + t) as i64 + 2 * d as i64);
                for m in weighted_monomials(sig, &[u], &[0], &w) {
                    let m = if spec.formal { f_atom(u, d).mul(&m).unwrap().0 } else { m };
                    let c = Poly::term(m, Rational::one()).mul_monomial_left(&Monomial::atom(Atom::Param(k), 1), &Rational::one());
                    let (ks, kt) = (MultiIndex::pow(0, s as u8), MultiIndex::pow(0, t as u8));
                    g.add_term(BiKey { out: 0, a: 0, sigma: ks, b: 0, tau: kt }, &c);
                    g.add_term(BiKey { out: 0, a: 0, sigma: kt, b: 0, tau: ks }, &-c);
                    k += 1;
                }
            }
        }
    }
    (g, (k - first) as usize)
}

/// Coefficient equations of `[A p1, A p2] = A(Γ(p1, p2))` in the ansatz parameters.
pub fn involutivity_equations(spec: &AnsatzSpec, ansatz: &ParamOperator) -> Result<(Vec<Poly>, usize)> {
    let sig = spec.signature();
    let coll = OperatorCollection::single(&sig, sig.var("u"), ansatz.op.clone())?;
    let (gamma, ng) = gamma_ansatz(spec, coll.signature(), ansatz.len() as u32);
    let bracket = coll.image_bracket();
    let recon = ansatz.op.apply(&gamma.apply(&coll.section(0), &coll.section(1)));
    let diff = &bracket[0] - &recon[0];
    let groups = diff.group_by(|m| m.split(|a| !matches!(a, Atom::Param(_)), |_| true, true));
    Ok((groups.into_values().collect(), ng))
}

/// A family of involutive operators: ansatz coordinates polynomial in the free parameters,
/// normalized so that coordinate `leading` is one and all earlier ones vanish.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Family {
    pub weight: u32,
    pub leading: usize,
    pub coords: Vec<Poly>,
    pub free: Vec<u32>,
}

fn echelon(mut rows: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let n = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut out: Vec<Vec<Rational>> = Vec::new();
    let mut col = 0;
    while col < n && !rows.is_empty() {
        if let Some(i) = rows.iter().position(|r| !r[col].is_zero()) {
            let mut p = rows.remove(i);
            let inv = p[col].recip();
            for v in p.iter_mut() {
                *v *= &inv;
            }
            for r in rows.iter_mut().chain(out.iter_mut()) {
                if !r[col].is_zero() {
                    let a = r[col].clone();
                    for (x, y) in r.iter_mut().zip(&p) {
                        *x -= &a * y;
                    }
                }
            }
            out.push(p);
        }
        col += 1;
    }
    out.retain(|r| r.iter().any(|x| !x.is_zero()));
    out
}

fn eval_at(p: &Poly, at: &BTreeMap<u32, Rational>) -> Rational {
    p.substitute(&mut |g| match g {
        Generator::Param(k) => Some(Poly::constant(at.get(&k).cloned().unwrap_or_else(Rational::zero))),
        _ => None,
    })
    .as_constant()
    .unwrap_or_else(Rational::zero)
}

impl Family {
    fn from_assignment(assign: &BTreeMap<u32, Poly>, nop: usize, leading: usize, weight: u32) -> Family {
        let coords: Vec<Poly> = (0..nop as u32).map(|i| assign.get(&i).cloned().unwrap_or_else(|| Poly::param(i))).collect();
        let mut free: Vec<u32> = coords.iter().flat_map(|c| c.params()).collect();
        free.sort();
        free.dedup();
        Family { weight, leading, coords, free }
    }

    /// Number of free parameters; the projective dimension plus one for linear families.
    pub fn dim(&self) -> usize {
        self.free.len() + 1
    }

    pub fn is_linear(&self) -> bool {
        self.coords.iter().all(|c| c.terms().all(|(m, _)| m.degree() <= 1))
    }

    /// The family's member at the given values of the free parameters.
    pub fn point(&self, values: &[Rational]) -> Vec<Rational> {
        let at: BTreeMap<u32, Rational> = self.free.iter().copied().zip(values.iter().cloned()).collect();
        self.coords.iter().map(|c| eval_at(c, &at)).collect()
    }

    /// Echelon basis of the span of a linear family.
    pub fn span(&self) -> Vec<Vec<Rational>> {
        let k = self.free.len();
        let zero = vec![Rational::zero(); k];
        let p0 = self.point(&zero);
        let mut rows = vec![p0.clone()];
        for i in 0..k {
            let mut e = zero.clone();
            e[i] = Rational::one();
            rows.push(self.point(&e).iter().zip(&p0).map(|(a, b)| a - b).collect());
        }
        echelon(rows)
    }

    /// Deterministic sample members.
    pub fn samples(&self) -> Vec<Vec<Rational>> {
        let k = self.free.len();
        let mut out = vec![self.point(&vec![Rational::zero(); k])];
        for i in 0..k {
            let mut e = vec![Rational::zero(); k];
            e[i] = Rational::one();
            out.push(self.point(&e));
        }
        if k > 0 {
            let mixed: Vec<Rational> = (0..k).map(|i| Rational::new((2 * i as i64 + 3).into(), (i as i64 + 2).into())).collect();
            out.push(self.point(&mixed));
            let neg: Vec<Rational> = (0..k).map(|i| Rational::from_integer((-(i as i64) - 2).into())).collect();
            out.push(self.point(&neg));
        }
        out
    }

    /// Whether an ansatz coordinate vector lies in the family up to scale.
    pub fn contains(&self, c: &[Rational]) -> bool {
        if c.iter().all(|x| x.is_zero()) {
            return true;
        }
        if self.is_linear() {
            let span = self.span();
            let mut rows = span.clone();
            rows.push(c.to_vec());
            return echelon(rows).len() == span.len();
        }
        if c[..self.leading].iter().any(|x| !x.is_zero()) || c[self.leading].is_zero() {
            return false;
        }
        let inv = c[self.leading].recip();
        let eqs: Vec<Poly> = self.coords.iter().zip(c).map(|(p, x)| p - &Poly::constant(x * &inv)).collect();
        let solver = Solver { order: self.free.clone(), max_splits: 3 };
        let mut log = Vec::new();
        solver.solve(BTreeMap::new(), eqs, &mut log).iter().any(|l| matches!(l, Leaf::Solved(_)))
    }

    pub fn contains_family(&self, other: &Family) -> bool {
        other.samples().iter().all(|p| self.contains(p))
    }

    /// The parametric operator of the family.
    pub fn operator(&self, ansatz: &ParamOperator) -> TotalDiffOperator {
        let mut op = TotalDiffOperator::zero(1, 1);
        for ((t, m), c) in ansatz.basis.iter().zip(&self.coords) {
            if !c.is_zero() {
                op.add_to(0, 0, MultiIndex::pow(0, *t as u8), &c.mul_monomial_right(m, &Rational::one()));
            }
        }
        op
    }
}

/// Result of a search at one weight.
#[derive(Clone, Debug)]
pub struct WeightResult {
    pub weight: u32,
    pub ansatz: ParamOperator,
    pub families: Vec<Family>,
    pub open: Vec<(BTreeMap<u32, Poly>, Vec<Poly>)>,
    pub log: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub max_splits: u32,
    pub max_order: Option<u32>,
    pub formal: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { max_splits: 3, max_order: None, formal: false }
    }
}

/// Runs the search at a single weight.
pub fn search_weight(weight: u32, opts: &SearchOptions) -> Result<WeightResult> {
    let mut spec = AnsatzSpec::new(weight);
    spec.formal = opts.formal;
    if let Some(o) = opts.max_order {
        spec.max_order = o.min(weight);
    }
    let ansatz = enumerate_ansatz(&spec);
    let (eqs, ng) = involutivity_equations(&spec, &ansatz)?;
    let nop = ansatz.len();
    let order: Vec<u32> = (nop as u32..(nop + ng) as u32).chain(0..nop as u32).collect();
    let solver = Solver { order, max_splits: opts.max_splits };
    let branches: Vec<(usize, Vec<Leaf>, Vec<String>)> = (0..nop)
        .into_par_iter()
        .map(|j| {
            let mut assign = BTreeMap::new();
            for i in 0..j {
                assign.insert(i as u32, Poly::zero());
            }
            assign.insert(j as u32, Poly::one());
            let mut log = vec![format!("leading coefficient #{j}")];
            let leaves = solver.solve(assign, eqs.clone(), &mut log);
            (j, leaves, log)
        })
        .collect();
    let mut families: Vec<Family> = Vec::new();
    let mut open = Vec::new();
    let mut log = Vec::new();
    for (j, leaves, l) in branches {
        log.extend(l);
        for leaf in leaves {
            match leaf {
                Leaf::Solved(a) => families.push(Family::from_assignment(&a, nop, j, weight)),
                Leaf::Open(a, e) => open.push((a, e)),
            }
        }
    }
    families.sort();
    families.dedup();
    let inside: Vec<Vec<bool>> = families
        .par_iter()
        .map(|g| families.iter().map(|f| f != g && g.contains_family(f)).collect())
        .collect();
    let maximal: Vec<Family> = families
        .iter()
        .enumerate()
        .filter(|(i, _)| !(0..families.len()).any(|j| inside[j][*i] && (!inside[*i][j] || j < *i)))
        .map(|(_, f)| f.clone())
        .collect();
    Ok(WeightResult { weight, ansatz, families: maximal, open, log })
}

/// Exact algebroid verification of one concrete operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorCheck {
    pub gamma: Option<BiDiffSymbol>,
    /// `Γ(p1, p2)` in canonical rendering; empty when extraction failed.
    pub gamma_text: String,
    pub homological: Option<Homological>,
    /// Agreement with an expected symbol modulo the kernel: `A(Γ) = A(Γ_expected)`.
    pub matches: Option<bool>,
}

impl OperatorCheck {
    pub fn passed(&self) -> bool {
        self.gamma.is_some()
            && matches!(self.homological, Some(Homological::ExactZero | Homological::ZeroModuloKernel))
            && self.matches != Some(false)
    }
}

/// The section jet `p{k}_{x^n}` as seen by operator collections built from a signature without `p` fields.
pub fn section_jet(k: usize, n: u8) -> Poly {
    Poly::jet(JetVar::new(Symbol::new(&format!("p{k}")), 0, MultiIndex::pow(0, n), Parity::Even))
}

/// Extracts `Γ`, checks `Q² = 0` and compares with `expected`, a bilinear expression in the sections `p1, p2`.
pub fn check_operator(sig: &Signature, op: &TotalDiffOperator, expected: Option<&Poly>) -> Result<OperatorCheck> {
    let mut sig = sig.clone();
    if sig.field("b").is_none() {
        sig.add_field("b", 1, Parity::Odd, None)?;
    }
    let coll = OperatorCollection::single(&sig, sig.var("u"), op.clone())?;
    let dec = coll.christoffel_extract(SolveOptions::default());
    if !dec.is_exact() {
        return Ok(OperatorCheck { gamma: None, gamma_text: String::new(), homological: None, matches: None });
    }
    let q = coll.build_q(&dec.c, Symbol::new("b"))?;
    let rep = coll.verify_homological(&q, Symbol::new("b"))?;
    let ours = coll.bilinear(&dec.c);
    let gamma_text = text::render::poly(coll.signature(), &ours[0]);
    let matches = expected.map(|e| op.apply1(e) == op.apply1(&ours[0]));
    Ok(OperatorCheck { gamma: Some(dec.c), gamma_text, homological: Some(rep.outcome), matches })
}

/// An operator with a formal function `f(u)` and its expected bracket.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalCase {
    pub name: String,
    pub op: TotalDiffOperator,
    pub gamma: Poly,
}

/// `f u_x`, `f (u D - u_x)`, `f D^n` for `1 <= n <= max_n`, and `f u²`.
pub fn formal_cases(max_n: u32) -> (Signature, Vec<FormalCase>) {
    let mut spec = AnsatzSpec::new(1);
    spec.formal = true;
    let sig = spec.signature();
    let u = sig.var("u");
    let f = Poly::monomial(f_atom(u, 0));
    let ux = Poly::jet(u.derive(0));
    let (p, px, q, qx) = (section_jet(1, 0), section_jet(1, 1), section_jet(2, 0), section_jet(2, 1));
    let skew = &(&p * &qx) - &(&px * &q);
    let mut out = vec![
        FormalCase { name: "f(u)*u_x".into(), op: TotalDiffOperator::mult(&f * &ux), gamma: -(&f * &skew) },
        FormalCase {
            name: "f(u)*(u*Dx - u_x)".into(),
            op: TotalDiffOperator::scalar([(MultiIndex::unit(0), &f * &Poly::jet(u)), (MultiIndex::ZERO, -(&f * &ux))]),
            gamma: &f * &skew,
        },
    ];
    for n in 1..=max_n {
        out.push(FormalCase {
            name: format!("f(u)*Dx^{n}"),
            op: TotalDiffOperator::scalar([(MultiIndex::pow(0, n as u8), f.clone())]),
            gamma: Poly::zero(),
        });
    }
    out.push(FormalCase { name: "f(u)*u^2".into(), op: TotalDiffOperator::mult(&f * &Poly::jet(u).pow(2)), gamma: Poly::zero() });
    (sig, out)
}

/// Runs the search for every weight in `1..=max_weight`.
pub fn search(max_weight: u32, opts: &SearchOptions) -> Result<Vec<WeightResult>> {
    (1..=max_weight).map(|w| search_weight(w, opts)).collect()
}
