//! Involutive operator images, bi-differential structure constants and the homological field `Q`.

mod ansatz;
mod bidiff;

pub use ansatz::{divisors, indices_on, section_pairs, weighted_monomials, BasisTerm, Symmetry};
pub use bidiff::{BiDiffSymbol, BiKey};

use std::collections::BTreeSet;

use crate::algebra::{rat, ratio, Atom, JetVar, Monomial, MultiIndex, Parity, Poly, Rational, Signature, Symbol};
use crate::diffop::TotalDiffOperator;
use crate::error::{Error, Result};
use crate::jet::EvolutionaryField;

/// Options for undetermined-coefficient solves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    pub order_bound: Option<u32>,
    pub symmetry: Symmetry,
}

impl Default for SolveOptions {
    fn default() -> SolveOptions {
        SolveOptions { order_bound: None, symmetry: Symmetry::Auto }
    }
}

impl SolveOptions {
    pub fn with_bound(bound: Option<u32>) -> SolveOptions {
        SolveOptions { order_bound: bound, ..SolveOptions::default() }
    }
}

/// `expr = A(c) + residual`; the residual vanishes iff membership was established at this bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionResult {
    pub c: BiDiffSymbol,
    pub residual: Vec<Poly>,
    pub order_bound: u32,
    pub ansatz_size: usize,
}

impl DecompositionResult {
    pub fn is_exact(&self) -> bool {
        self.residual.iter().all(|p| p.is_zero())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Homological {
    ExactZero,
    /// `Q²` vanishes on the base fields and its ghost part lies in the kernel of the anchor.
    ZeroModuloKernel,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologicalReport {
    pub outcome: Homological,
    /// The field `Q² = ½[Q,Q]`.
    pub square: EvolutionaryField,
}

/// Operators `A_1..A_N` with a common target, processed through their wide concatenation.
#[derive(Clone, Debug)]
pub struct OperatorCollection {
    sig: Signature,
    targets: Vec<JetVar>,
    ops: Vec<TotalDiffOperator>,
    wide: TotalDiffOperator,
    blocks: Vec<(usize, usize)>,
    sections: [Symbol; 3],
}

fn fresh_names(sig: &Signature) -> [Symbol; 3] {
    for stem in ["p", "s", "ς"] {
        let names = [format!("{stem}1"), format!("{stem}2"), format!("{stem}3")];
        if names.iter().all(|n| sig.field(n).is_none() && !sig.is_func(n)) {
            return [Symbol::new(&names[0]), Symbol::new(&names[1]), Symbol::new(&names[2])];
        }
    }
    let mut k = 0;
    loop {
        let names = [format!("ς{k}a"), format!("ς{k}b"), format!("ς{k}c")];
        if names.iter().all(|n| sig.field(n).is_none()) {
            return [Symbol::new(&names[0]), Symbol::new(&names[1]), Symbol::new(&names[2])];
        }
        k += 1;
    }
}

impl OperatorCollection {
    /// `targets` are the order-0 jets of the image components, in row order.
    pub fn new(sig: &Signature, targets: Vec<JetVar>, ops: Vec<TotalDiffOperator>) -> Result<OperatorCollection> {
        if ops.is_empty() {
            return Err(Error::Invalid("an operator collection needs at least one operator".into()));
        }
        let wide = TotalDiffOperator::hstack(&ops)?;
        if wide.rows() != targets.len() {
            return Err(Error::Invalid(format!(
                "operators have {} rows but {} target components were given",
                wide.rows(),
                targets.len()
            )));
        }
        let mut blocks = Vec::new();
        let mut off = 0;
        for o in &ops {
            blocks.push((off, o.cols()));
            off += o.cols();
        }
        let mut ext = sig.clone();
        let names = fresh_names(sig);
        let graded = targets.iter().all(|q| sig.field_of(q.field).map(|f| f.weight.is_some()).unwrap_or(false));
        let w = if graded { Some(rat(0)) } else { None };
        for n in &names {
            ext.add_field(n.as_str(), wide.cols() as u16, Parity::Even, w.clone())?;
        }
        Ok(OperatorCollection { sig: ext, targets: targets.into_iter().map(|q| q.base()).collect(), ops, wide, blocks, sections: names })
    }

    pub fn single(sig: &Signature, target: JetVar, op: TotalDiffOperator) -> Result<OperatorCollection> {
        OperatorCollection::new(sig, vec![target], vec![op])
    }

    /// The signature extended by the three section copies.
    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn targets(&self) -> &[JetVar] {
        &self.targets
    }

    pub fn operators(&self) -> &[TotalDiffOperator] {
        &self.ops
    }

    pub fn wide(&self) -> &TotalDiffOperator {
        &self.wide
    }

    pub fn blocks(&self) -> &[(usize, usize)] {
        &self.blocks
    }

    /// Total number of section components.
    pub fn width(&self) -> usize {
        self.wide.cols()
    }

    pub fn section_names(&self) -> [Symbol; 3] {
        self.sections
    }

    /// Order-0 jets of the `k`-th section copy (0, 1 or 2).
    pub fn section(&self, k: usize) -> Vec<Poly> {
        let s = self.sections[k];
        (0..self.width()).map(|a| Poly::jet(JetVar::new(s, a as u16, MultiIndex::ZERO, Parity::Even))).collect()
    }

    fn section_block(&self, k: usize, block: usize) -> Vec<Poly> {
        let (start, len) = self.blocks[block];
        self.section(k)
            .into_iter()
            .enumerate()
            .map(|(a, p)| if a >= start && a < start + len { p } else { Poly::zero() })
            .collect()
    }

    /// The evolutionary field `∂^{(q)}_{A(s)}` acting on the target fields only.
    pub fn anchor_field(&self, s: &[Poly]) -> EvolutionaryField {
        let parity = s.iter().find_map(|p| if p.is_zero() { None } else { p.parity() }).unwrap_or(Parity::Even);
        let image = self.wide.apply(s);
        let mut x = EvolutionaryField::new(parity);
        for (q, v) in self.targets.iter().zip(image) {
            x.set(*q, v).expect("anchor parity");
        }
        x
    }

    fn bracket_of(&self, s1: &[Poly], s2: &[Poly]) -> Vec<Poly> {
        let x1 = self.anchor_field(s1);
        let x2 = self.anchor_field(s2);
        let a1 = self.wide.apply(s1);
        let a2 = self.wide.apply(s2);
        a2.iter().zip(&a1).map(|(f2, f1)| x1.apply(f2) - x2.apply(f1)).collect()
    }

    /// Generating section of `[∂_{A(p1)}, ∂_{A(p2)}]` for sections independent of the base fields.
    pub fn image_bracket(&self) -> Vec<Poly> {
        self.bracket_of(&self.section(0), &self.section(1))
    }

    /// Bracket of the images of blocks `i` and `j`.
    pub fn image_bracket_blocks(&self, i: usize, j: usize) -> Vec<Poly> {
        self.bracket_of(&self.section_block(0, i), &self.section_block(1, j))
    }

    /// Highest derivative order of section jets in `expr`.
    fn section_order(&self, expr: &[Poly]) -> u32 {
        expr.iter()
            .flat_map(|p| p.jets())
            .filter(|v| self.sections.contains(&v.field))
            .map(|v| v.order())
            .max()
            .unwrap_or(0)
    }

    fn directions(&self, expr: &[Poly]) -> Vec<usize> {
        let mut used = BTreeSet::new();
        for v in expr.iter().flat_map(|p| p.jets()).chain(self.wide.jets()) {
            for d in 0..self.sig.dims() {
                if v.index.get(d) > 0 {
                    used.insert(d);
                }
            }
        }
        for r in 0..self.wide.rows() {
            for c in 0..self.wide.cols() {
                for t in self.wide.entry(r, c).keys() {
                    for d in 0..self.sig.dims() {
                        if t.get(d) > 0 {
                            used.insert(d);
                        }
                    }
                }
            }
        }
        used.into_iter().collect()
    }

    fn swap_sections(&self, expr: &[Poly]) -> Vec<Poly> {
        let [a, b, _] = self.sections;
        expr.iter()
            .map(|p| {
                p.substitute(&mut |g| match g {
                    crate::algebra::Generator::Jet(v) if v.field == a => Some(Poly::jet(JetVar { field: b, ..v })),
                    crate::algebra::Generator::Jet(v) if v.field == b => Some(Poly::jet(JetVar { field: a, ..v })),
                    _ => None,
                })
            })
            .collect()
    }

    /// Weight of `c` in `A(c) = expr` when every relevant quantity is weight-homogeneous.
    fn graded_target(&self, expr: &[Poly]) -> Option<Rational> {
        let has_extra = expr.iter().flat_map(|p| p.terms()).any(|(m, _)| {
            !m.exp_part().is_empty() || m.even_part().iter().any(|(a, _)| !matches!(a, Atom::Jet(_)))
        });
        if has_extra {
            return None;
        }
        let mut we: Option<Rational> = None;
        for p in expr.iter().filter(|p| !p.is_zero()) {
            let w = self.sig.weight(p)?;
            if we.as_ref().map(|x| *x != w).unwrap_or(false) {
                return None;
            }
            we = Some(w);
        }
        let mut wa: Option<Rational> = None;
        for p in self.wide.apply(&self.section(0)).iter().filter(|p| !p.is_zero()) {
            let w = self.sig.weight(p)?;
            if wa.as_ref().map(|x| *x != w).unwrap_or(false) {
                return None;
            }
            wa = Some(w);
        }
        Some(we? - wa?)
    }

    /// Finds `c` with `A(c(p1, p2)) = expr` by undetermined coefficients.
    pub fn membership_solve(&self, expr: &[Poly], opts: SolveOptions) -> DecompositionResult {
        let outputs = self.width();
        let bound = opts.order_bound.unwrap_or_else(|| self.section_order(expr) + self.wide.order());
        let zero = DecompositionResult {
            c: BiDiffSymbol::zero(outputs),
            residual: expr.to_vec(),
            order_bound: bound,
            ansatz_size: 0,
        };
        if expr.iter().all(|p| p.is_zero()) {
            return DecompositionResult { residual: vec![Poly::zero(); expr.len()], ..zero };
        }
        let antisym = match opts.symmetry {
            Symmetry::Antisymmetric => true,
            Symmetry::General => false,
            Symmetry::Auto => {
                let sw = self.swap_sections(expr);
                sw.iter().zip(expr).all(|(a, b)| *a == -b)
            }
        };
        let basis = self.basis(expr, bound, antisym);
        let [p1, p2, _] = self.sections;
        let n = basis.len();
        match ansatz::solve_image(&self.wide, p1, p2, &self.sig, &basis, expr) {
            None => DecompositionResult { ansatz_size: n, ..zero },
            Some(c) => {
                let (s1, s2) = (self.section(0), self.section(1));
                let recon = self.wide.apply(&c.apply(&s1, &s2));
                let residual = expr.iter().zip(recon).map(|(e, r)| e - &r).collect();
                DecompositionResult { c, residual, order_bound: bound, ansatz_size: n }
            }
        }
    }

    fn basis(&self, expr: &[Poly], bound: u32, antisym: bool) -> Vec<BasisTerm> {
        let dirs = self.directions(expr);
        let outputs = self.width();
        let mut basis = Vec::new();
        let graded = self.graded_target(expr);
        let base_fields: Vec<JetVar> = {
            let mut v: Vec<JetVar> = self.targets.clone();
            v.sort();
            v.dedup();
            v
        };
        let divisor_set: Vec<Monomial> = match &graded {
            Some(_) => Vec::new(),
            None => {
                let mut all = BTreeSet::new();
                for m in ansatz::coefficient_parts(expr, &self.sections) {
                    all.extend(divisors(&m));
                }
                all.into_iter().collect()
            }
        };
        for (a, s, b, t) in section_pairs(outputs, &dirs, bound, antisym) {
            let order = s.order() + t.order();
            let coeffs: Vec<Monomial> = match &graded {
                Some(w) => {
                    let rest = w - rat(order as i64);
                    weighted_monomials(&self.sig, &base_fields, &dirs, &rest)
                }
                None => divisor_set.clone(),
            };
            for out in 0..outputs {
                for m in &coeffs {
                    basis.push(BasisTerm {
                        key: BiKey { out, a, sigma: s, b, tau: t },
                        coeff: m.clone(),
                        antisymmetric: antisym,
                    });
                }
            }
        }
        basis.sort_by(|x, y| {
            (x.coeff.degree(), x.key.sigma.order() + x.key.tau.order(), &x.coeff, x.key).cmp(&(
                y.coeff.degree(),
                y.key.sigma.order() + y.key.tau.order(),
                &y.coeff,
                y.key,
            ))
        });
        basis
    }

    /// Christoffel symbols `Γ`. With sections independent of the base fields the standard
    /// terms of the structure constants vanish, so `Γ` is the full structure constant `c`.
    pub fn christoffel_extract(&self, opts: SolveOptions) -> DecompositionResult {
        let bracket = self.image_bracket();
        self.membership_solve(&bracket, opts)
    }

    /// Structure constants `c(s1,s2) = ∂_{A(s1)}(s2) - ∂_{A(s2)}(s1) + Γ(s1,s2)` for arbitrary even sections.
    pub fn structure_constants(&self, gamma: &BiDiffSymbol, s1: &[Poly], s2: &[Poly]) -> Vec<Poly> {
        let x1 = self.anchor_field(s1);
        let x2 = self.anchor_field(s2);
        let g = gamma.apply(s1, s2);
        (0..self.width()).map(|k| &(&x1.apply(&s2[k]) - &x2.apply(&s1[k])) + &g[k]).collect()
    }

    /// `[A(s1), A(s2)] - A(c(s1, s2))`; zero when `Γ` reproduces the bracket on these sections.
    pub fn structure_defect(&self, gamma: &BiDiffSymbol, s1: &[Poly], s2: &[Poly]) -> Vec<Poly> {
        let br = self.bracket_of(s1, s2);
        let rec = self.wide.apply(&self.structure_constants(gamma, s1, s2));
        br.iter().zip(rec).map(|(a, b)| a - &b).collect()
    }

    fn ghost_vector(&self, ghost: Symbol) -> Result<Vec<Poly>> {
        let f = self.sig.field_of(ghost).ok_or_else(|| Error::Unknown(ghost.to_string()))?;
        if f.parity != Parity::Odd || f.components as usize != self.width() {
            return Err(Error::Invalid(format!(
                "ghost `{ghost}` must be odd with {} components",
                self.width()
            )));
        }
        Ok((0..self.width()).map(|a| Poly::jet(JetVar::new(f.name, a as u16, MultiIndex::ZERO, Parity::Odd))).collect())
    }

    /// `Q = ∂^{(q)}_{A(b)} - ½ ∂^{(b)}_{Γ(b,b)}`.
    pub fn build_q(&self, gamma: &BiDiffSymbol, ghost: Symbol) -> Result<EvolutionaryField> {
        let b = self.ghost_vector(ghost)?;
        let mut q = self.anchor_field(&b);
        if q.parity() != Parity::Odd {
            q = EvolutionaryField::new(Parity::Odd);
        }
        let gbb = gamma.apply(&b, &b);
        let half = ratio(-1, 2);
        for (k, v) in gbb.into_iter().enumerate() {
            let jet = JetVar::new(ghost, k as u16, MultiIndex::ZERO, Parity::Odd);
            q.set(jet, v.scale(&half))?;
        }
        Ok(q)
    }

    /// Computes `Q² = ½[Q,Q]` and classifies the result.
    pub fn verify_homological(&self, q: &EvolutionaryField, ghost: Symbol) -> Result<HomologicalReport> {
        let square = q.square();
        if square.is_zero() {
            return Ok(HomologicalReport { outcome: Homological::ExactZero, square });
        }
        let base_clean = self.targets.iter().all(|t| square.section(t).is_zero());
        let others_only_ghost = square.sections().keys().all(|k| k.field == ghost || self.targets.contains(k));
        let residual: Vec<Poly> = (0..self.width())
            .map(|k| square.section(&JetVar::new(ghost, k as u16, MultiIndex::ZERO, Parity::Odd)))
            .collect();
        let in_kernel = self.wide.apply(&residual).iter().all(|p| p.is_zero());
        let outcome = if base_clean && others_only_ghost && in_kernel {
            Homological::ZeroModuloKernel
        } else {
            Homological::Failed
        };
        Ok(HomologicalReport { outcome, square })
    }

    /// `Σ_cyc A{∂_{A(p_i)} Γ(p_m, p_n) + Γ(p_i, Γ(p_m, p_n))}` over three section copies.
    pub fn jacobi_residual(&self, gamma: &BiDiffSymbol) -> Vec<Poly> {
        let s = [self.section(0), self.section(1), self.section(2)];
        let mut total = vec![Poly::zero(); self.width()];
        for (i, m, n) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            let inner = gamma.apply(&s[m], &s[n]);
            let x = self.anchor_field(&s[i]);
            let outer = gamma.apply(&s[i], &inner);
            for k in 0..self.width() {
                total[k] += x.apply(&inner[k]);
                total[k] += &outer[k];
            }
        }
        self.wide.apply(&total)
    }

    /// The symbol `Γ` as polynomials bilinear in the first two section copies.
    pub fn bilinear(&self, gamma: &BiDiffSymbol) -> Vec<Poly> {
        gamma.apply(&self.section(0), &self.section(1))
    }

    /// Reads a bilinear expression in the first two section copies as a symbol.
    pub fn symbol_from_bilinear(&self, polys: &[Poly]) -> Result<BiDiffSymbol> {
        BiDiffSymbol::from_bilinear(polys, self.sections[0], self.sections[1])
    }
}
