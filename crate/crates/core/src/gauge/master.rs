use crate::algebra::{JetVar, MultiIndex, Poly, Symbol};
use crate::jet::{base_jets, euler, is_trivial_class};
use crate::linalg::solve_params;
use crate::poisson::{schouten, Pairing};
use crate::Signature;

/// Shape of the corrections tried when `[[S, S]]` is not trivial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectionAnsatz {
    /// Fields with their ghost numbers; only fields listed with nonzero ghost number enter corrections.
    pub ghost_numbers: Vec<(Symbol, i32)>,
    pub min_degree: u32,
    pub max_degree: u32,
    pub max_order: u32,
}

impl CorrectionAnsatz {
    pub fn new(ghost_numbers: Vec<(Symbol, i32)>) -> CorrectionAnsatz {
        CorrectionAnsatz { ghost_numbers, min_degree: 3, max_degree: 3, max_order: 1 }
    }

    /// Monomials of ghost number zero in the graded fields.
    pub fn monomials(&self, sig: &Signature) -> Vec<Poly> {
        let mut atoms = Vec::new();
        for (s, gh) in &self.ghost_numbers {
            if *gh == 0 {
                continue;
            }
            let f = match sig.field_of(*s) {
                Some(f) => f,
                None => continue,
            };
            for c in 0..f.components {
                for t in MultiIndex::all_up_to(sig.dims(), self.max_order) {
                    atoms.push((JetVar::new(f.name, c, t, f.parity), *gh));
                }
            }
        }
        atoms.sort();
        let mut out = Vec::new();
        for d in self.min_degree..=self.max_degree {
            let mut stack: Vec<usize> = Vec::new();
            pick(&atoms, d as usize, 0, &mut stack, &mut out);
        }
        out
    }
}

fn pick(atoms: &[(JetVar, i32)], left: usize, from: usize, stack: &mut Vec<usize>, out: &mut Vec<Poly>) {
    if left == 0 {
        if stack.iter().map(|&i| atoms[i].1).sum::<i32>() == 0 {
            let mut p = Poly::one();
            for &i in stack.iter() {
                p = &p * &Poly::jet(atoms[i].0);
            }
            if !p.is_zero() {
                out.push(p);
            }
        }
        return;
    }
    for i in from..atoms.len() {
        if atoms[i].0.is_odd() && stack.last() == Some(&i) {
            continue;
        }
        stack.push(i);
        pick(atoms, left - 1, i, stack, out);
        stack.pop();
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MasterReport {
    /// `[[S, S]]` for the uncorrected action.
    pub bracket: Poly,
    pub bracket_trivial: bool,
    pub corrections: Poly,
    /// `[[S + C, S + C]]` after corrections; trivial exactly when the check passes.
    pub residual: Poly,
    pub passed: bool,
    pub ansatz_size: usize,
}

fn symmetric(a: &Poly, b: &Poly, pairing: &Pairing) -> Poly {
    schouten(a, b, pairing) + schouten(b, a, pairing)
}

/// Checks `[[S, S]] ≅ 0`, trying the given corrections when it fails.
pub fn bv_master_check(sig: &Signature, action: &Poly, pairing: &Pairing, ansatz: &CorrectionAnsatz) -> MasterReport {
    let bracket = schouten(action, action, pairing);
    if is_trivial_class(&bracket) {
        return MasterReport {
            bracket: bracket.clone(),
            bracket_trivial: true,
            corrections: Poly::zero(),
            residual: bracket,
            passed: true,
            ansatz_size: 0,
        };
    }
    let basis = ansatz.monomials(sig);
    let first = action.params().into_iter().max().map(|m| m + 1).unwrap_or(0);
    let mut c = Poly::zero();
    for (i, m) in basis.iter().enumerate() {
        c += &Poly::param(first + i as u32) * m;
    }
    let linear = &bracket + &symmetric(action, &c, pairing);
    let eqs: Vec<Poly> = base_jets(&linear).iter().map(|q| euler(&linear, q)).collect();
    let corrections = match solve_params(&eqs, (first as usize) + basis.len()) {
        None => Poly::zero(),
        Some(x) => {
            let mut out = Poly::zero();
            for (i, v) in x {
                if i >= first as usize {
                    out += basis[i - first as usize].scale(&v);
                }
            }
            out
        }
    };
    let total = action + &corrections;
    let residual = schouten(&total, &total, pairing);
    let passed = is_trivial_class(&residual);
    MasterReport { bracket, bracket_trivial: false, corrections, residual, passed, ansatz_size: basis.len() }
}
