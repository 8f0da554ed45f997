use super::symbol::{JetVar, Parity, Symbol};

/// Formal unary function factor `f^{(order)}(arg)` applied to an order-0 even jet.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FuncAtom {
    pub name: Symbol,
    pub order: u32,
    pub arg: JetVar,
}

/// Commuting (even) generators of the algebra.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Atom {
    /// Explicit base coordinate `x^i`.
    Coord(u8),
    /// An undetermined constant used by ansatz solvers; constant under every derivation.
    Param(u32),
    /// Even jet coordinate.
    Jet(JetVar),
    Func(FuncAtom),
}

/// The variable content of a term: even atoms with exponents, a strictly
/// increasing list of odd jets, and an integer-linear exponent.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Monomial {
    pub(crate) even: Vec<(Atom, u32)>,
    pub(crate) odd: Vec<JetVar>,
    pub(crate) exp: Vec<(JetVar, i64)>,
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial::default()
    }

    pub fn atom(a: Atom, pow: u32) -> Monomial {
        if pow == 0 {
            return Monomial::one();
        }
        if let Atom::Jet(v) = a {
            debug_assert!(!v.is_odd(), "odd jets are not even atoms");
        }
        Monomial { even: vec![(a, pow)], ..Monomial::default() }
    }

    pub fn odd_var(v: JetVar) -> Monomial {
        debug_assert!(v.is_odd());
        Monomial { odd: vec![v], ..Monomial::default() }
    }

    /// Canonical odd product of `vars` in the given order, with sign; `None` on repeats.
    pub fn odd_product(vars: &[JetVar]) -> Option<(Monomial, bool)> {
        let mut sorted: Vec<JetVar> = vars.to_vec();
        let neg = sort_with_sign(&mut sorted)?;
        Some((Monomial { odd: sorted, ..Monomial::default() }, neg))
    }

    pub fn exponential(lin: Vec<(JetVar, i64)>) -> Monomial {
        let mut lin: Vec<(JetVar, i64)> = lin.into_iter().filter(|(_, k)| *k != 0).collect();
        lin.sort();
        let mut merged: Vec<(JetVar, i64)> = Vec::with_capacity(lin.len());
        for (v, k) in lin {
            match merged.last_mut() {
                Some((w, acc)) if *w == v => *acc += k,
                _ => merged.push((v, k)),
            }
        }
        merged.retain(|(_, k)| *k != 0);
        Monomial { exp: merged, ..Monomial::default() }
    }

    pub fn is_one(&self) -> bool {
        self.even.is_empty() && self.odd.is_empty() && self.exp.is_empty()
    }

    pub fn parity(&self) -> Parity {
        Parity::from_bool(self.odd.len() % 2 == 1)
    }

    pub fn even_part(&self) -> &[(Atom, u32)] {
        &self.even
    }

    pub fn odd_part(&self) -> &[JetVar] {
        &self.odd
    }

    pub fn exp_part(&self) -> &[(JetVar, i64)] {
        &self.exp
    }

    /// Total polynomial degree in the atoms and odd jets (exponentials not counted).
    pub fn degree(&self) -> u32 {
        self.even.iter().map(|(_, n)| *n).sum::<u32>() + self.odd.len() as u32
    }

    pub fn power_of(&self, a: &Atom) -> u32 {
        self.even.binary_search_by(|(b, _)| b.cmp(a)).map(|i| self.even[i].1).unwrap_or(0)
    }

    /// Graded product; `None` if an odd jet repeats. The flag is the Koszul sign.
    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, bool)> {
        let (odd, neg) = merge_odd(&self.odd, &other.odd)?;
        Some((
            Monomial { even: merge_even(&self.even, &other.even), odd, exp: merge_exp(&self.exp, &other.exp) },
            neg,
        ))
    }

    /// Remove one power of an even atom.
    pub(crate) fn without_one(&self, idx: usize) -> Monomial {
        let mut m = self.clone();
        if m.even[idx].1 == 1 {
            m.even.remove(idx);
        } else {
            m.even[idx].1 -= 1;
        }
        m
    }

    /// The even and exponential part only.
    pub fn commuting_part(&self) -> Monomial {
        Monomial { even: self.even.clone(), odd: Vec::new(), exp: self.exp.clone() }
    }

    pub(crate) fn odd_slice(vars: &[JetVar]) -> Monomial {
        Monomial { odd: vars.to_vec(), ..Monomial::default() }
    }

    /// Splits into `(selected, rest)` with `self = sign * selected * rest`.
    pub fn split(
        &self,
        even_sel: impl Fn(&Atom) -> bool,
        odd_sel: impl Fn(&JetVar) -> bool,
        exp_sel: bool,
    ) -> (Monomial, Monomial, bool) {
        let mut a = Monomial::one();
        let mut b = Monomial::one();
        for &(atom, n) in &self.even {
            if even_sel(&atom) {
                a.even.push((atom, n));
            } else {
                b.even.push((atom, n));
            }
        }
        for &v in &self.odd {
            if odd_sel(&v) {
                a.odd.push(v);
            } else {
                b.odd.push(v);
            }
        }
        if exp_sel {
            a.exp = self.exp.clone();
        } else {
            b.exp = self.exp.clone();
        }
        let (_, neg) = merge_odd(&a.odd, &b.odd).expect("distinct odd factors");
        (a, b, neg)
    }

    /// All jets occurring anywhere in the monomial (including function and exponent arguments).
    pub fn jets(&self) -> impl Iterator<Item = JetVar> + '_ {
        self.even
            .iter()
            .filter_map(|(a, _)| match a {
                Atom::Jet(v) => Some(*v),
                Atom::Func(f) => Some(f.arg),
                _ => None,
            })
            .chain(self.odd.iter().copied())
            .chain(self.exp.iter().map(|(v, _)| *v))
    }
}

fn merge_even(a: &[(Atom, u32)], b: &[(Atom, u32)]) -> Vec<(Atom, u32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn merge_exp(a: &[(JetVar, i64)], b: &[(JetVar, i64)]) -> Vec<(JetVar, i64)> {
    if b.is_empty() {
        return a.to_vec();
    }
    if a.is_empty() {
        return b.to_vec();
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let k = a[i].1 + b[j].1;
                if k != 0 {
                    out.push((a[i].0, k));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Merge two sorted odd lists; the flag counts transpositions modulo two.
pub(crate) fn merge_odd(a: &[JetVar], b: &[JetVar]) -> Option<(Vec<JetVar>, bool)> {
    if b.is_empty() {
        return Some((a.to_vec(), false));
    }
    if a.is_empty() {
        return Some((b.to_vec(), false));
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut neg = false;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                // b[j] moves past the remaining a's
                if (a.len() - i) % 2 == 1 {
                    neg = !neg;
                }
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => return None,
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, neg))
}

/// Insertion sort tracking the sign of the permutation; `None` on repeats.
pub(crate) fn sort_with_sign(v: &mut [JetVar]) -> Option<bool> {
    let mut neg = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            neg = !neg;
            j -= 1;
        }
        if j > 0 && v[j - 1] == v[j] {
            return None;
        }
    }
    Some(neg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::symbol::MultiIndex;

    fn b(k: u8) -> JetVar {
        JetVar::new(Symbol::new("b"), 0, MultiIndex::pow(0, k), Parity::Odd)
    }

    #[test]
    fn odd_transposition_sign() {
        let (m, neg) = Monomial::odd_product(&[b(1), b(0)]).unwrap();
        assert_eq!(m.odd_part(), &[b(0), b(1)]);
        assert!(neg);
        assert!(Monomial::odd_product(&[b(0), b(0)]).is_none());
    }

    #[test]
    fn merge_counts_inversions() {
        let (_, neg) = merge_odd(&[b(1), b(3)], &[b(0), b(2)]).unwrap();
        // b1 b3 b0 b2 -> b0 b1 b2 b3 needs three transpositions
        assert!(neg);
    }
}
