//! Exact sparse Gaussian elimination over the rationals.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::algebra::{Atom, Monomial, Poly, Rational};

pub type SparseVec = BTreeMap<usize, Rational>;

fn axpy(y: &mut SparseVec, a: &Rational, x: &SparseVec) {
    for (i, v) in x {
        let slot = y.entry(*i).or_insert_with(Rational::zero);
        *slot += a * v;
        if slot.is_zero() {
            y.remove(i);
        }
    }
}

/// Incrementally maintained reduced row echelon form of an augmented system `A x = b`.
/// Pivots are always the leftmost nonzero column of their row, so lower-indexed
/// columns are preferred as basic variables.
#[derive(Clone, Debug, Default)]
pub struct Rref {
    ncols: usize,
    rows: BTreeMap<usize, (SparseVec, Rational)>,
    inconsistent: bool,
}

impl Rref {
    pub fn new(ncols: usize) -> Rref {
        Rref { ncols, rows: BTreeMap::new(), inconsistent: false }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_consistent(&self) -> bool {
        !self.inconsistent
    }

    /// Adds the equation `Σ row_i x_i = rhs`.
    pub fn push(&mut self, mut row: SparseVec, mut rhs: Rational) {
        row.retain(|_, v| !v.is_zero());
        let hits: Vec<usize> = row.keys().filter(|c| self.rows.contains_key(c)).copied().collect();
        for c in hits {
            let a = match row.get(&c) {
                Some(a) => -a.clone(),
                None => continue,
            };
            let (prow, prhs) = &self.rows[&c];
            axpy(&mut row, &a, prow);
            rhs += &a * prhs;
        }
        let pivot = match row.keys().next() {
            None => {
                if !rhs.is_zero() {
                    self.inconsistent = true;
                }
                return;
            }
            Some(&p) => p,
        };
        let inv = row[&pivot].recip();
        if !inv.is_one() {
            for v in row.values_mut() {
                *v *= &inv;
            }
            rhs *= &inv;
        }
        for (prow, prhs) in self.rows.values_mut() {
            if let Some(a) = prow.get(&pivot).cloned() {
                let a = -a;
                axpy(prow, &a, &row);
                *prhs += &a * &rhs;
            }
        }
        self.rows.insert(pivot, (row, rhs));
    }

    pub fn pivots(&self) -> impl Iterator<Item = &usize> {
        self.rows.keys()
    }

    /// Solution with every free variable set to zero.
    pub fn particular(&self) -> Option<SparseVec> {
        if self.inconsistent {
            return None;
        }
        Some(self.rows.iter().filter(|(_, (_, r))| !r.is_zero()).map(|(p, (_, r))| (*p, r.clone())).collect())
    }

    /// One basis vector of the solution space of the homogeneous system per free column.
    pub fn nullspace(&self) -> Vec<SparseVec> {
        let mut deps: BTreeMap<usize, Vec<(usize, Rational)>> = BTreeMap::new();
        for (p, (row, _)) in &self.rows {
            for (c, v) in row {
                if c != p {
                    deps.entry(*c).or_default().push((*p, -v.clone()));
                }
            }
        }
        (0..self.ncols)
            .filter(|c| !self.rows.contains_key(c))
            .map(|c| {
                let mut v = SparseVec::new();
                v.insert(c, Rational::one());
                if let Some(d) = deps.get(&c) {
                    for (p, a) in d {
                        v.insert(*p, a.clone());
                    }
                }
                v
            })
            .collect()
    }

    /// Express reduced rows as equations `x_pivot = rhs - Σ a_c x_c`.
    pub fn rows(&self) -> impl Iterator<Item = (&usize, &(SparseVec, Rational))> {
        self.rows.iter()
    }
}

/// Greedily shrinks the support of a solution by moving along nullspace directions.
/// Exact minimal support is NP-hard; this gives a deterministic local optimum.
pub fn reduce_support(mut x: SparseVec, nullspace: &[SparseVec]) -> SparseVec {
    loop {
        let mut improved = false;
        for n in nullspace {
            let candidates: Vec<usize> = x.keys().filter(|k| n.contains_key(k)).copied().collect();
            let mut best: Option<SparseVec> = None;
            for k in candidates {
                let a = -(&x[&k] / &n[&k]);
                let mut y = x.clone();
                axpy(&mut y, &a, n);
                if y.len() < x.len() && best.as_ref().map(|b| y.len() < b.len()).unwrap_or(true) {
                    best = Some(y);
                }
            }
            if let Some(b) = best {
                x = b;
                improved = true;
            }
        }
        if !improved {
            return x;
        }
    }
}

/// Solve `Σ_j x_j col_j = target` for sparse columns, returning a minimal-support solution.
pub fn solve_columns(cols: &[SparseVec], target: &SparseVec) -> Option<SparseVec> {
    let mut rows: BTreeMap<usize, SparseVec> = BTreeMap::new();
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col {
            rows.entry(*i).or_default().insert(j, v.clone());
        }
    }
    let mut rref = Rref::new(cols.len());
    let mut keys: Vec<usize> = rows.keys().copied().collect();
    keys.extend(target.keys().filter(|k| !rows.contains_key(k)));
    keys.sort();
    keys.dedup();
    for i in keys {
        let row = rows.remove(&i).unwrap_or_default();
        rref.push(row, target.get(&i).cloned().unwrap_or_else(Rational::zero));
        if !rref.is_consistent() {
            return None;
        }
    }
    let x = rref.particular()?;
    Some(reduce_support(x, &rref.nullspace()))
}

/// Reads polynomials affine in the parameters `#i` as linear equations `Σ a_i x_i = b`,
/// one per monomial in the remaining variables.
pub fn param_equations(polys: &[Poly]) -> Vec<(SparseVec, Rational)> {
    let mut eqs: BTreeMap<(usize, Monomial), (SparseVec, Rational)> = BTreeMap::new();
    for (k, p) in polys.iter().enumerate() {
        for (m, c) in p.terms() {
            let (sel, rest, neg) = m.split(|a| matches!(a, Atom::Param(_)), |_| false, false);
            let c = if neg { -c.clone() } else { c.clone() };
            let slot = eqs.entry((k, rest)).or_default();
            match sel.even_part() {
                [] => slot.1 -= c,
                [(Atom::Param(i), 1)] => {
                    let e = slot.0.entry(*i as usize).or_insert_with(Rational::zero);
                    *e += c;
                }
                _ => panic!("polynomial is not affine in the parameters"),
            }
        }
    }
    eqs.into_values().filter(|(r, b)| !(r.values().all(|v| v.is_zero()) && b.is_zero())).collect()
}

/// Solves an affine parameter system; the minimal-support particular solution, or `None` if inconsistent.
pub fn solve_params(polys: &[Poly], nparams: usize) -> Option<SparseVec> {
    let mut rref = Rref::new(nparams);
    for (row, rhs) in param_equations(polys) {
        rref.push(row, rhs);
        if !rref.is_consistent() {
            return None;
        }
    }
    let x = rref.particular()?;
    Some(reduce_support(x, &rref.nullspace()))
}
