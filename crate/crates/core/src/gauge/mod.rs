//! Noether identities, gauge generators, BRST and Koszul–Tate differentials, and the BV action.

mod master;

pub use master::{bv_master_check, CorrectionAnsatz, MasterReport};

use std::collections::BTreeSet;

use crate::algebra::{ratio, Generator, JetVar, Monomial, MultiIndex, Parity, Poly, Signature, Symbol};
use crate::algebroid::{divisors, indices_on, BiDiffSymbol, OperatorCollection};
use crate::diffop::{coupling, TotalDiffOperator};
use crate::error::{Error, Result};
use crate::jet::{euler, linearization, linearization_cols, EvolutionaryField};
use crate::linalg::{solve_columns, SparseVec};

/// Equations of motion `F`, optionally Euler–Lagrange for an action `S`, with a slot field standing for `F` in relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationSystem {
    pub fields: Vec<JetVar>,
    pub equations: Vec<Poly>,
    pub action: Option<Poly>,
    pub slots: Symbol,
}

impl EquationSystem {
    pub fn new(fields: Vec<JetVar>, equations: Vec<Poly>, action: Option<Poly>, slots: Symbol) -> EquationSystem {
        EquationSystem { fields: fields.into_iter().map(|q| q.base()).collect(), equations, action, slots }
    }

    /// Euler–Lagrange system `F_i = δS/δq^i`.
    pub fn from_action(fields: Vec<JetVar>, action: Poly, slots: Symbol) -> EquationSystem {
        let equations = fields.iter().map(|q| euler(&action, q)).collect();
        EquationSystem::new(fields, equations, Some(action), slots)
    }

    pub fn is_euler_lagrange(&self) -> bool {
        match &self.action {
            None => false,
            Some(s) => self.fields.iter().zip(&self.equations).all(|(q, f)| euler(s, q) == *f),
        }
    }

    /// Replaces jets of the slot field by the corresponding total derivatives of `F`.
    pub fn substitute_slots(&self, p: &Poly) -> Poly {
        p.substitute(&mut |g| match g {
            Generator::Jet(v) if v.field == self.slots => {
                Some(self.equations[v.comp as usize].total_derivative_multi(&v.index))
            }
            _ => None,
        })
    }
}

/// `Φ[F] ≡ 0` off-shell.
pub fn noether_check(phi: &[Poly], e: &EquationSystem) -> bool {
    phi.iter().all(|p| e.substitute_slots(p).is_zero())
}

/// `A = (ℓ^{(F)}_Φ)†`, with remaining slot jets replaced by `F`.
pub fn generator_from_relation(sig: &Signature, phi: &[Poly], e: &EquationSystem) -> TotalDiffOperator {
    let l = linearization(sig, phi, e.slots);
    l.adjoint().map_coeffs(|c| e.substitute_slots(c))
}

/// The linearization of `F` with respect to all fields is self-adjoint.
pub fn helmholtz_check(e: &EquationSystem) -> bool {
    linearization_cols(&e.equations, &e.fields).is_self_adjoint()
}

/// `A†(F) = 0` off-shell.
pub fn linear_noether_relation(a: &TotalDiffOperator, e: &EquationSystem) -> bool {
    match a.adjoint().try_apply(&e.equations) {
        Ok(v) => v.iter().all(|p| p.is_zero()),
        Err(_) => false,
    }
}

/// The evolutionary field with the given velocities on the system's fields.
pub fn field_with(e: &EquationSystem, phi: &[Poly]) -> Result<EvolutionaryField> {
    let parity = phi.iter().find(|p| !p.is_zero()).and_then(|p| p.parity()).unwrap_or(Parity::Even);
    let mut x = EvolutionaryField::new(parity);
    for (q, p) in e.fields.iter().zip(phi) {
        x.set(*q, p.clone())?;
    }
    Ok(x)
}

fn all_divisors(m: &Monomial) -> Vec<Monomial> {
    let odd = m.odd_part();
    let mut out = Vec::new();
    for d in divisors(m) {
        for mask in 0u64..(1u64 << odd.len().min(12)) {
            let pick: Vec<JetVar> = odd.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| *v).collect();
            let (om, _) = Monomial::odd_product(&pick).unwrap();
            out.push(d.mul(&om).unwrap().0);
        }
    }
    out
}

/// Solves `∂_φ(F) = ∇(F)` for a matrix operator `∇` linear in the slots; `None` when no solution exists at the bound.
pub fn solve_nabla(sig: &Signature, phi: &[Poly], e: &EquationSystem, bound: Option<u32>) -> Result<Option<TotalDiffOperator>> {
    let x = field_with(e, phi)?;
    let lhs: Vec<Poly> = e.equations.iter().map(|f| x.apply(f)).collect();
    let n = e.equations.len();
    if lhs.iter().all(|p| p.is_zero()) {
        return Ok(Some(TotalDiffOperator::zero(n, n)));
    }
    let bound = bound.unwrap_or_else(|| phi.iter().map(|p| p.max_order()).max().unwrap_or(0));
    let mut dirs = BTreeSet::new();
    for v in lhs.iter().chain(&e.equations).flat_map(|p| p.jets()) {
        for d in 0..sig.dims() {
            if v.index.get(d) > 0 {
                dirs.insert(d);
            }
        }
    }
    let dirs: Vec<usize> = dirs.into_iter().collect();
    let mut monos = BTreeSet::new();
    for p in &lhs {
        for (m, _) in p.terms() {
            monos.extend(all_divisors(m));
        }
    }
    let mut basis: Vec<(usize, usize, MultiIndex, Monomial)> = Vec::new();
    for j in 0..n {
        for k in 0..n {
            for t in indices_on(&dirs, bound) {
                for m in &monos {
                    basis.push((j, k, t, m.clone()));
                }
            }
        }
    }
    basis.sort_by(|a, b| (a.3.degree(), a.2.order(), a).cmp(&(b.3.degree(), b.2.order(), b)));
    let mut index = std::collections::BTreeMap::new();
    let mut sparse = |r: usize, p: &Poly| -> SparseVec {
        let mut s = SparseVec::new();
        for (m, c) in p.terms() {
            let len = index.len();
            let i = *index.entry((r, m.clone())).or_insert(len);
            s.insert(i, c.clone());
        }
        s
    };
    let mut target = SparseVec::new();
    for (r, p) in lhs.iter().enumerate() {
        target.extend(sparse(r, p));
    }
    let cols: Vec<SparseVec> = basis
        .iter()
        .map(|(j, k, t, m)| sparse(*j, &(&Poly::monomial(m.clone()) * &e.equations[*k].total_derivative_multi(t))))
        .collect();
    let sol = match solve_columns(&cols, &target) {
        None => return Ok(None),
        Some(s) => s,
    };
    let mut nabla = TotalDiffOperator::zero(n, n);
    for (i, c) in sol {
        let (j, k, t, m) = &basis[i];
        nabla.add_to(*j, *k, *t, &Poly::term(m.clone(), c));
    }
    Ok(Some(nabla))
}

/// Names of the BV generators: ghosts `γ`, antifields `q†` (equation slots), antighosts `γ†`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BvNames {
    pub ghost: Symbol,
    pub antifield: Symbol,
    pub antighost: Symbol,
}

fn order0(sig: &Signature, s: Symbol) -> Result<Vec<JetVar>> {
    let f = sig.field_of(s).ok_or_else(|| Error::Unknown(s.to_string()))?;
    Ok((0..f.components).map(|k| JetVar::new(f.name, k, MultiIndex::ZERO, f.parity)).collect())
}

fn polys(v: &[JetVar]) -> Vec<Poly> {
    v.iter().map(|q| Poly::jet(*q)).collect()
}

impl BvNames {
    fn check(&self, sig: &Signature, coll: &OperatorCollection, e: &EquationSystem) -> Result<()> {
        let want = [
            (self.ghost, Parity::Odd, coll.width(), "ghost"),
            (self.antifield, Parity::Odd, e.equations.len(), "antifield"),
            (self.antighost, Parity::Even, coll.width(), "antighost"),
        ];
        for (s, p, n, what) in want {
            let f = sig.field_of(s).ok_or_else(|| Error::Unknown(s.to_string()))?;
            if f.parity != p || f.components as usize != n {
                return Err(Error::Invalid(format!("{what} `{s}` must be {p} with {n} components")));
            }
        }
        Ok(())
    }
}

/// The antifield–antighost lifting `Q̃` of the BRST differential.
pub fn brst_lift(
    coll: &OperatorCollection,
    gamma: &BiDiffSymbol,
    e: &EquationSystem,
    names: BvNames,
    nabla: &TotalDiffOperator,
) -> Result<EvolutionaryField> {
    let sig = coll.signature();
    names.check(sig, coll, e)?;
    let g = polys(&order0(sig, names.ghost)?);
    let qd = order0(sig, names.antifield)?;
    let gd = order0(sig, names.antighost)?;
    let mut q = coll.build_q(gamma, names.ghost)?;
    let anchor = coll.anchor_field(&g);
    for (slot, v) in qd.iter().zip(nabla.try_apply(&polys(&qd))?) {
        q.set(*slot, v)?;
    }
    let adj = coll.wide().adjoint();
    let moved = adj.map_coeffs(|c| anchor.apply(c));
    let t1 = moved.try_apply(&e.equations)?;
    let t2 = adj.try_apply(&nabla.try_apply(&e.equations)?)?;
    for ((k, a), b) in gd.iter().zip(t1).zip(t2) {
        q.set(*k, a + b)?;
    }
    Ok(q)
}

/// `d_KT = ∂^{(q†)}_{δS/δq} + Σ_k ∂^{(γ_k†)}_{A_k†(q†)}`.
pub fn koszul_tate(coll: &OperatorCollection, e: &EquationSystem, names: BvNames) -> Result<EvolutionaryField> {
    let sig = coll.signature();
    names.check(sig, coll, e)?;
    let qd = order0(sig, names.antifield)?;
    let gd = order0(sig, names.antighost)?;
    let mut d = EvolutionaryField::new(Parity::Odd);
    for (slot, f) in qd.iter().zip(&e.equations) {
        d.set(*slot, f.clone())?;
    }
    for (k, v) in gd.iter().zip(coll.wide().adjoint().try_apply(&polys(&qd))?) {
        d.set(*k, v)?;
    }
    Ok(d)
}

/// `S + ⟨q†, A(γ)⟩ - ½⟨Γ(γ,γ), γ†⟩`.
pub fn bv_action(coll: &OperatorCollection, gamma: &BiDiffSymbol, e: &EquationSystem, names: BvNames) -> Result<Poly> {
    let sig = coll.signature();
    names.check(sig, coll, e)?;
    let g = polys(&order0(sig, names.ghost)?);
    let qd = polys(&order0(sig, names.antifield)?);
    let gd = polys(&order0(sig, names.antighost)?);
    let s = e.action.clone().unwrap_or_default();
    let ghost_term = coupling(&qd, &coll.wide().try_apply(&g)?)?;
    let gamma_term = coupling(&gamma.apply(&g, &g), &gd)?.scale(&ratio(-1, 2));
    Ok(s + ghost_term + gamma_term)
}

/// The pairing `(q, q†)`, `(γ†, γ)` used by the BV antibracket.
pub fn bv_pairing(sig: &Signature, e: &EquationSystem, names: BvNames) -> Result<crate::poisson::Pairing> {
    let qd = order0(sig, names.antifield)?;
    let g = order0(sig, names.ghost)?;
    let gd = order0(sig, names.antighost)?;
    let mut pairs: Vec<(JetVar, JetVar)> = e.fields.iter().copied().zip(qd).collect();
    pairs.extend(gd.into_iter().zip(g));
    Ok(crate::poisson::Pairing::new(pairs))
}
