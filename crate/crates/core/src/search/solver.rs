//! Branching solver for polynomial systems in the parameters `#i`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::{Atom, Generator, Monomial, Poly, Rational};
use crate::linalg::Rref;

/// One leaf of the case analysis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Leaf {
    /// Every equation holds; assigned parameters are affine in the free ones.
    Solved(BTreeMap<u32, Poly>),
    /// The split budget ran out with these equations left.
    Open(BTreeMap<u32, Poly>, Vec<Poly>),
}

#[derive(Clone, Debug)]
pub struct Solver {
    /// Elimination preference: earlier parameters become pivots first.
    pub order: Vec<u32>,
    pub max_splits: u32,
}

fn subst(p: &Poly, assign: &BTreeMap<u32, Poly>) -> Poly {
    if assign.is_empty() {
        return p.clone();
    }
    p.substitute(&mut |g| match g {
        Generator::Param(i) => assign.get(&i).cloned(),
        _ => None,
    })
}

fn param_degree(m: &Monomial) -> u32 {
    m.even_part().iter().filter(|(a, _)| matches!(a, Atom::Param(_))).map(|(_, n)| *n).sum()
}

fn degree(p: &Poly) -> u32 {
    p.terms().map(|(m, _)| param_degree(m)).max().unwrap_or(0)
}

fn assign_one(assign: &mut BTreeMap<u32, Poly>, var: u32, value: Poly) {
    let one: BTreeMap<u32, Poly> = [(var, value.clone())].into_iter().collect();
    for v in assign.values_mut() {
        *v = subst(v, &one);
    }
    assign.insert(var, value);
}

/// Parameters dividing every term of `p`.
fn common_factors(p: &Poly) -> Vec<u32> {
    let mut common: Option<BTreeSet<u32>> = None;
    for (m, _) in p.terms() {
        let here: BTreeSet<u32> = m
            .even_part()
            .iter()
            .filter_map(|(a, _)| if let Atom::Param(i) = a { Some(*i) } else { None })
            .collect();
        common = Some(match common {
            None => here,
            Some(c) => c.intersection(&here).copied().collect(),
        });
    }
    common.unwrap_or_default().into_iter().collect()
}

fn divide_by(p: &Poly, var: u32) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        let idx = m.even_part().iter().position(|(a, _)| *a == Atom::Param(var)).expect("common factor");
        out.add_term(m.without_one(idx), c.clone());
    }
    out
}

fn single_var(p: &Poly) -> Option<u32> {
    let ps = p.params();
    if ps.len() == 1 {
        Some(ps[0])
    } else {
        None
    }
}

fn int_divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            let e = &n / &d;
            if e != d {
                out.push(e);
            }
        }
        d += 1;
    }
    out
}

/// Rational roots of a univariate polynomial in `var`.
pub fn rational_roots(p: &Poly, var: u32) -> Vec<Rational> {
    let mut coeffs: BTreeMap<u32, Rational> = BTreeMap::new();
    for (m, c) in p.terms() {
        *coeffs.entry(m.power_of(&Atom::Param(var))).or_insert_with(Rational::zero) += c;
    }
    coeffs.retain(|_, c| !c.is_zero());
    let mut roots = Vec::new();
    let low = match coeffs.keys().next() {
        None => return roots,
        Some(&k) => k,
    };
    if low > 0 {
        roots.push(Rational::zero());
    }
    let lcm = coeffs.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: BTreeMap<u32, BigInt> = coeffs.iter().map(|(k, c)| (k - low, (c * Rational::from_integer(lcm.clone())).to_integer())).collect();
    let top = *ints.keys().next_back().unwrap();
    if top == 0 {
        return roots;
    }
    let eval = |x: &Rational| -> Rational {
        let mut acc = Rational::zero();
        for (k, c) in ints.iter().rev() {
            acc += Rational::from_integer(c.clone()) * num_traits::pow(x.clone(), *k as usize);
        }
        acc
    };
    for a in int_divisors(&ints[&0]) {
        for b in int_divisors(&ints[&top]) {
            for s in [1, -1] {
                let r = Rational::new(BigInt::from(s) * &a, b.clone());
                if !roots.contains(&r) && eval(&r).is_zero() {
                    roots.push(r);
                }
            }
        }
    }
    roots.sort();
    roots
}

/// Row reduction with every parameter monomial as an unknown, highest degree first;
/// exposes lower-degree consequences of the nonlinear equations.
fn reduce_monomials(eqs: Vec<Poly>) -> Vec<Poly> {
    let mut monos: BTreeSet<(std::cmp::Reverse<u32>, Monomial)> = BTreeSet::new();
    for e in &eqs {
        for (m, _) in e.terms() {
            if !m.is_one() {
                monos.insert((std::cmp::Reverse(param_degree(m)), m.clone()));
            }
        }
    }
    let cols: Vec<Monomial> = monos.into_iter().map(|(_, m)| m).collect();
    let index: BTreeMap<&Monomial, usize> = cols.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut rref = Rref::new(cols.len());
    for e in &eqs {
        let mut row = BTreeMap::new();
        let mut rhs = Rational::zero();
        for (m, c) in e.terms() {
            if m.is_one() {
                rhs -= c;
            } else {
                row.insert(index[m], c.clone());
            }
        }
        rref.push(row, rhs);
        if !rref.is_consistent() {
            return vec![Poly::one()];
        }
    }
    rref.rows()
        .map(|(_, (row, rhs))| {
            let mut p = Poly::constant(-rhs.clone());
            for (c, a) in row {
                p.add_term(cols[*c].clone(), a.clone());
            }
            p
        })
        .collect()
}

enum Step {
    Dead,
    Done(BTreeMap<u32, Poly>, Vec<Poly>),
}

impl Solver {
    fn column_order(&self, eqs: &[Poly]) -> Vec<u32> {
        let mut seen: BTreeSet<u32> = BTreeSet::new();
        let mut out = Vec::new();
        for v in &self.order {
            if seen.insert(*v) {
                out.push(*v);
            }
        }
        for p in eqs {
            for v in p.params() {
                if seen.insert(v) {
                    out.push(v);
                }
            }
        }
        out
    }

    /// A parameter entering some equation only through a constant multiple of itself.
    fn triangular(&self, eqs: &[Poly]) -> Option<(u32, Poly)> {
        let cols = self.column_order(eqs);
        for v in cols {
            let a = Atom::Param(v);
            for e in eqs {
                let mut coeff = None;
                let mut ok = true;
                for (m, c) in e.terms() {
                    let k = m.power_of(&a);
                    if k == 0 {
                        continue;
                    }
                    if k == 1 && m.even_part().len() == 1 && m.odd_part().is_empty() {
                        coeff = Some(c.clone());
                    } else {
                        ok = false;
                        break;
                    }
                }
                if let (true, Some(c)) = (ok, coeff) {
                    let mut rest = e.clone();
                    rest.add_term(Monomial::atom(a, 1), -c.clone());
                    return Some((v, rest.scale(&-c.recip())));
                }
            }
        }
        None
    }

    /// Linear elimination to a fixed point.
    fn simplify(&self, mut assign: BTreeMap<u32, Poly>, eqs: Vec<Poly>) -> Step {
        let mut eqs = eqs;
        loop {
            let mut next: BTreeSet<Poly> = BTreeSet::new();
            for e in &eqs {
                let s = subst(e, &assign);
                if s.is_zero() {
                    continue;
                }
                if s.as_constant().is_some() {
                    return Step::Dead;
                }
                next.insert(s.monic());
            }
            let next = reduce_monomials(next.into_iter().collect());
            if next.iter().any(|p| p.as_constant().is_some()) {
                return Step::Dead;
            }
            let (lin, rest): (Vec<Poly>, Vec<Poly>) = next.into_iter().partition(|p| degree(p) <= 1);
            if lin.is_empty() {
                match self.triangular(&rest) {
                    None => return Step::Done(assign, rest),
                    Some((v, value)) => {
                        assign_one(&mut assign, v, value);
                        eqs = rest;
                        continue;
                    }
                }
            }
            let cols = self.column_order(&lin);
            let index: BTreeMap<u32, usize> = cols.iter().enumerate().map(|(i, v)| (*v, i)).collect();
            let mut rref = Rref::new(cols.len());
            for p in &lin {
                let mut row = BTreeMap::new();
                let mut rhs = Rational::zero();
                for (m, c) in p.terms() {
                    match m.even_part() {
                        [] => rhs -= c,
                        [(Atom::Param(i), 1)] => {
                            row.insert(index[i], c.clone());
                        }
                        _ => unreachable!("linear equation"),
                    }
                }
                rref.push(row, rhs);
                if !rref.is_consistent() {
                    return Step::Dead;
                }
            }
            for (p, (row, rhs)) in rref.rows() {
                let mut value = Poly::constant(rhs.clone());
                for (c, a) in row {
                    if c != p {
                        value.add_scaled(&Poly::param(cols[*c]), &-a.clone());
                    }
                }
                assign_one(&mut assign, cols[*p], value);
            }
            eqs = rest;
        }
    }

    /// Explores all cases; `log` receives one line per split.
    pub fn solve(&self, assign: BTreeMap<u32, Poly>, eqs: Vec<Poly>, log: &mut Vec<String>) -> Vec<Leaf> {
        let mut out = Vec::new();
        self.explore(assign, eqs, 0, log, &mut out);
        out
    }

    fn explore(&self, assign: BTreeMap<u32, Poly>, eqs: Vec<Poly>, depth: u32, log: &mut Vec<String>, out: &mut Vec<Leaf>) {
        let (assign, eqs) = match self.simplify(assign, eqs) {
            Step::Dead => {
                log.push(format!("{}inconsistent", "  ".repeat(depth as usize)));
                return;
            }
            Step::Done(a, e) => (a, e),
        };
        if eqs.is_empty() {
            out.push(Leaf::Solved(assign));
            return;
        }
        let pad = "  ".repeat(depth as usize);
        if let Some((e, v)) = eqs.iter().find_map(|e| single_var(e).map(|v| (e, v))) {
            let roots = rational_roots(e, v);
            log.push(format!("{pad}#{v}: {} rational root(s)", roots.len()));
            for r in roots {
                let mut a = assign.clone();
                assign_one(&mut a, v, Poly::constant(r));
                self.explore(a, eqs.clone(), depth, log, out);
            }
            return;
        }
        if depth >= self.max_splits {
            log.push(format!("{pad}split budget exhausted with {} equation(s)", eqs.len()));
            out.push(Leaf::Open(assign, eqs));
            return;
        }
        let pick = eqs.iter().enumerate().find_map(|(i, e)| common_factors(e).first().map(|v| (i, *v)));
        if let Some((i, v)) = pick {
            log.push(format!("{pad}split #{v} = 0"));
            let mut a = assign.clone();
            assign_one(&mut a, v, Poly::zero());
            self.explore(a, eqs.clone(), depth + 1, log, out);
            log.push(format!("{pad}split #{v} != 0"));
            let mut rest = eqs.clone();
            rest[i] = divide_by(&eqs[i], v);
            self.explore(assign, rest, depth + 1, log, out);
            return;
        }
        let e = eqs.iter().min_by_key(|e| (e.len(), e.params().len())).unwrap();
        let ps = e.params();
        let v = self.order.iter().copied().find(|v| ps.contains(v)).unwrap_or(ps[0]);
        log.push(format!("{pad}split #{v} = 0 (remaining case not resolved)"));
        let mut a = assign.clone();
        assign_one(&mut a, v, Poly::zero());
        self.explore(a, eqs.clone(), depth + 1, log, out);
        out.push(Leaf::Open(assign, eqs));
    }
}
