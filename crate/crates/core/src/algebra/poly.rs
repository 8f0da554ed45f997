use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::monomial::{Atom, FuncAtom, Monomial};
use super::symbol::{JetVar, MultiIndex, Parity};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// A generator that a derivation or substitution may act on.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Generator {
    Coord(u8),
    Param(u32),
    Jet(JetVar),
}

/// A graded-commutative polynomial with rational coefficients in jet coordinates,
/// base coordinates, parameters, formal functions and exponentials.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl std::fmt::Debug for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map().entries(self.terms.iter().map(|(m, c)| (m, c.to_string()))).finish()
    }
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn one() -> Poly {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Poly {
        Poly::term(Monomial::one(), c)
    }

    pub fn int(n: i64) -> Poly {
        Poly::constant(rat(n))
    }

    pub fn term(m: Monomial, c: Rational) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn monomial(m: Monomial) -> Poly {
        Poly::term(m, Rational::one())
    }

    pub fn jet(v: JetVar) -> Poly {
        if v.is_odd() {
            Poly::monomial(Monomial::odd_var(v))
        } else {
            Poly::monomial(Monomial::atom(Atom::Jet(v), 1))
        }
    }

    pub fn coord(i: u8) -> Poly {
        Poly::monomial(Monomial::atom(Atom::Coord(i), 1))
    }

    pub fn param(i: u32) -> Poly {
        Poly::monomial(Monomial::atom(Atom::Param(i), 1))
    }

    pub fn func(f: FuncAtom) -> Poly {
        assert!(!f.arg.is_odd() && f.arg.order() == 0, "function arguments must be even order-0 jets");
        Poly::monomial(Monomial::atom(Atom::Func(f), 1))
    }

    pub fn exp(lin: Vec<(JetVar, i64)>) -> Poly {
        for (v, _) in &lin {
            assert!(!v.is_odd() && v.order() == 0, "exponent arguments must be even order-0 jets");
        }
        Poly::monomial(Monomial::exponential(lin))
    }

    /// Product of odd jets in the given order.
    pub fn odd_product(vars: &[JetVar]) -> Poly {
        match Monomial::odd_product(vars) {
            None => Poly::zero(),
            Some((m, neg)) => Poly::term(m, if neg { -Rational::one() } else { Rational::one() }),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Rational)> {
        self.terms.into_iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                if m.is_one() {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Poly, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (m, d) in &other.terms {
            self.add_term(m.clone(), d * c);
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect() }
    }

    /// Multiply every term on the left by a single monomial with coefficient.
    pub fn mul_monomial_left(&self, m: &Monomial, c: &Rational) -> Poly {
        let mut out = Poly::zero();
        for (n, d) in &self.terms {
            if let Some((p, neg)) = m.mul(n) {
                let v = c * d;
                out.add_term(p, if neg { -v } else { v });
            }
        }
        out
    }

    pub fn mul_monomial_right(&self, m: &Monomial, c: &Rational) -> Poly {
        let mut out = Poly::zero();
        for (n, d) in &self.terms {
            if let Some((p, neg)) = n.mul(m) {
                let v = c * d;
                out.add_term(p, if neg { -v } else { v });
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Parity if homogeneous; zero counts as even.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(|m| m.parity());
        let first = match it.next() {
            None => return Some(Parity::Even),
            Some(p) => p,
        };
        if it.all(|p| p == first) {
            Some(first)
        } else {
            None
        }
    }

    /// The parity used when the polynomial is treated as a section component.
    pub fn parity_or_even(&self) -> Parity {
        self.parity().unwrap_or(Parity::Even)
    }

    /// Every jet appearing in the polynomial, sorted.
    pub fn jets(&self) -> Vec<JetVar> {
        let mut v: Vec<JetVar> = self.terms.keys().flat_map(|m| m.jets().collect::<Vec<_>>()).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn params(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self
            .terms
            .keys()
            .flat_map(|m| {
                m.even_part()
                    .iter()
                    .filter_map(|(a, _)| if let Atom::Param(i) = a { Some(*i) } else { None })
                    .collect::<Vec<_>>()
            })
            .collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn has_coords(&self) -> bool {
        self.terms.keys().any(|m| m.even_part().iter().any(|(a, _)| matches!(a, Atom::Coord(_))))
    }

    /// Highest derivative order among jets of `field`, if any.
    pub fn max_order_of(&self, field: super::symbol::Symbol) -> Option<u32> {
        self.jets().iter().filter(|v| v.field == field).map(|v| v.order()).max()
    }

    pub fn max_order(&self) -> u32 {
        self.jets().iter().map(|v| v.order()).max().unwrap_or(0)
    }

    /// Left partial derivative with respect to a jet: the variable is moved to the front before removal.
    pub fn partial(&self, v: &JetVar) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if v.is_odd() {
                if let Ok(k) = m.odd.binary_search(v) {
                    let mut rest = m.clone();
                    rest.odd.remove(k);
                    out.add_term(rest, if k % 2 == 1 { -c.clone() } else { c.clone() });
                }
                continue;
            }
            self.partial_even_term(m, c, v, &mut out);
        }
        out
    }

    fn partial_even_term(&self, m: &Monomial, c: &Rational, v: &JetVar, out: &mut Poly) {
        for (idx, &(a, n)) in m.even.iter().enumerate() {
            match a {
                Atom::Jet(w) if w == *v => {
                    out.add_term(m.without_one(idx), c * rat(n as i64));
                }
                Atom::Func(f) if f.arg == *v => {
                    let base = m.without_one(idx);
                    let next = Monomial::atom(Atom::Func(FuncAtom { order: f.order + 1, ..f }), 1);
                    let (p, _) = base.mul(&next).expect("even factor");
                    out.add_term(p, c * rat(n as i64));
                }
                _ => {}
            }
        }
        if let Some(&(_, k)) = m.exp.iter().find(|(w, _)| w == v) {
            out.add_term(m.clone(), c * rat(k));
        }
    }

    /// Right partial derivative: the variable is moved to the back before removal.
    pub fn partial_right(&self, v: &JetVar) -> Poly {
        if !v.is_odd() {
            return self.partial(v);
        }
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if let Ok(k) = m.odd.binary_search(v) {
                let after = m.odd.len() - 1 - k;
                let mut rest = m.clone();
                rest.odd.remove(k);
                out.add_term(rest, if after % 2 == 1 { -c.clone() } else { c.clone() });
            }
        }
        out
    }

    /// Derivative with respect to a base coordinate or parameter appearing explicitly.
    pub fn partial_atom(&self, a: &Atom) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if let Ok(idx) = m.even.binary_search_by(|(b, _)| b.cmp(a)) {
                let n = m.even[idx].1;
                out.add_term(m.without_one(idx), c * rat(n as i64));
            }
        }
        out
    }

    /// Apply the (graded) derivation determined by its values on generators.
    /// Generators for which `image` returns `None` are annihilated.
    pub fn derive_with<F>(&self, parity: Parity, image: &mut F) -> Poly
    where
        F: FnMut(Generator) -> Option<Poly>,
    {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            derive_term(m, c, parity, image, &mut out);
        }
        out
    }

    /// Total derivative along base direction `dir`.
    pub fn total_derivative(&self, dir: usize) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            for (idx, &(a, n)) in m.even.iter().enumerate() {
                let img = match a {
                    Atom::Coord(i) if i as usize == dir => Some(Monomial::one()),
                    Atom::Jet(v) => Some(Monomial::atom(Atom::Jet(v.derive(dir)), 1)),
                    Atom::Func(f) => {
                        let (p, _) = Monomial::atom(Atom::Func(FuncAtom { order: f.order + 1, ..f }), 1)
                            .mul(&Monomial::atom(Atom::Jet(f.arg.derive(dir)), 1))
                            .unwrap();
                        Some(p)
                    }
                    _ => None,
                };
                if let Some(img) = img {
                    let (p, _) = m.without_one(idx).mul(&img).unwrap();
                    out.add_term(p, c * rat(n as i64));
                }
            }
            for &(v, k) in &m.exp {
                let (p, _) = m.mul(&Monomial::atom(Atom::Jet(v.derive(dir)), 1)).unwrap();
                out.add_term(p, c * rat(k));
            }
            for k in 0..m.odd.len() {
                let mut odd = m.odd.clone();
                odd[k] = odd[k].derive(dir);
                if let Some(neg) = super::monomial::sort_with_sign(&mut odd) {
                    let p = Monomial { even: m.even.clone(), odd, exp: m.exp.clone() };
                    out.add_term(p, if neg { -c.clone() } else { c.clone() });
                }
            }
        }
        out
    }

    /// `D^index` applied iteratively.
    pub fn total_derivative_multi(&self, index: &MultiIndex) -> Poly {
        let mut acc = self.clone();
        for dir in 0..super::symbol::MAX_DIM {
            for _ in 0..index.get(dir) {
                if acc.is_zero() {
                    return acc;
                }
                acc = acc.total_derivative(dir);
            }
        }
        acc
    }

    /// Algebra homomorphism replacing generators; unmapped generators are kept.
    /// Jets inside function or exponent arguments are never replaced.
    pub fn substitute<F>(&self, map: &mut F) -> Poly
    where
        F: FnMut(Generator) -> Option<Poly>,
    {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut kept = Monomial { even: Vec::new(), odd: Vec::new(), exp: m.exp.clone() };
            let mut acc: Option<Poly> = None;
            for &(a, n) in &m.even {
                let g = match a {
                    Atom::Coord(i) => Some(Generator::Coord(i)),
                    Atom::Param(i) => Some(Generator::Param(i)),
                    Atom::Jet(v) => Some(Generator::Jet(v)),
                    Atom::Func(_) => None,
                };
                match g.and_then(|g| map(g)) {
                    Some(img) => {
                        let p = img.pow(n);
                        acc = Some(match acc {
                            None => p,
                            Some(q) => &q * &p,
                        });
                    }
                    None => kept.even.push((a, n)),
                }
            }
            let mut acc = match acc {
                None => Poly::term(kept, c.clone()),
                Some(p) => p.mul_monomial_left(&kept, c),
            };
            let mut run: Vec<JetVar> = Vec::new();
            for &v in &m.odd {
                match map(Generator::Jet(v)) {
                    Some(img) => {
                        if !run.is_empty() {
                            acc = acc.mul_monomial_right(&Monomial::odd_slice(&run), &Rational::one());
                            run.clear();
                        }
                        acc = &acc * &img;
                    }
                    None => run.push(v),
                }
                if acc.is_zero() {
                    break;
                }
            }
            if !run.is_empty() {
                acc = acc.mul_monomial_right(&Monomial::odd_slice(&run), &Rational::one());
            }
            out += acc;
        }
        out
    }

    /// Group terms by the part selected with `select`; each group carries the complementary factor on the right.
    pub fn group_by<S>(&self, select: S) -> BTreeMap<Monomial, Poly>
    where
        S: Fn(&Monomial) -> (Monomial, Monomial, bool),
    {
        let mut out: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (a, b, neg) = select(m);
            out.entry(a).or_default().add_term(b, if neg { -c.clone() } else { c.clone() });
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    /// Sum of the absolute values of the coefficients, used as a size measure.
    pub fn l1(&self) -> Rational {
        self.terms.values().map(|c| c.abs()).fold(Rational::zero(), |a, b| a + b)
    }

    /// Divide by the leading coefficient.
    pub fn monic(&self) -> Poly {
        match self.terms.values().next_back() {
            None => Poly::zero(),
            Some(c) => self.scale(&c.recip()),
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn map_coeffs(&self, f: impl Fn(&Rational) -> Rational) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn filter_terms(&self, keep: impl Fn(&Monomial) -> bool) -> Poly {
        Poly { terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }
}

fn derive_term<F>(m: &Monomial, c: &Rational, parity: Parity, image: &mut F, out: &mut Poly)
where
    F: FnMut(Generator) -> Option<Poly>,
{
    let odd_tail = Monomial::odd_slice(&m.odd);
    for (idx, &(a, n)) in m.even.iter().enumerate() {
        let img = match a {
            Atom::Coord(i) => image(Generator::Coord(i)),
            Atom::Param(i) => image(Generator::Param(i)),
            Atom::Jet(v) => image(Generator::Jet(v)),
            Atom::Func(f) => image(Generator::Jet(f.arg)).map(|g| {
                g.mul_monomial_left(&Monomial::atom(Atom::Func(FuncAtom { order: f.order + 1, ..f }), 1), &Rational::one())
            }),
        };
        if let Some(img) = img {
            if img.is_zero() {
                continue;
            }
            let front = m.without_one(idx).commuting_part();
            let t = img.mul_monomial_left(&front, &(c * rat(n as i64)));
            *out += t.mul_monomial_right(&odd_tail, &Rational::one());
        }
    }
    if !m.exp.is_empty() {
        let mut lin = Poly::zero();
        for &(v, k) in &m.exp {
            if let Some(img) = image(Generator::Jet(v)) {
                lin.add_scaled(&img, &rat(k));
            }
        }
        if !lin.is_zero() {
            let t = lin.mul_monomial_left(&m.commuting_part(), c);
            *out += t.mul_monomial_right(&odd_tail, &Rational::one());
        }
    }
    if m.odd.is_empty() {
        return;
    }
    let front = m.commuting_part();
    for k in 0..m.odd.len() {
        if let Some(img) = image(Generator::Jet(m.odd[k])) {
            if img.is_zero() {
                continue;
            }
            let sign = parity.is_odd() && k % 2 == 1;
            let coef = if sign { -c.clone() } else { c.clone() };
            let (head, _) = front.mul(&Monomial::odd_slice(&m.odd[..k])).unwrap();
            let t = img.mul_monomial_left(&head, &coef);
            *out += t.mul_monomial_right(&Monomial::odd_slice(&m.odd[k + 1..]), &Rational::one());
        }
    }
}

impl AddAssign<Poly> for Poly {
    fn add_assign(&mut self, rhs: Poly) {
        if self.terms.len() < rhs.terms.len() {
            let lhs = std::mem::take(self);
            *self = rhs;
            for (m, c) in lhs.terms {
                self.add_term(m, c);
            }
            return;
        }
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl SubAssign<Poly> for Poly {
    fn sub_assign(&mut self, rhs: Poly) {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += rhs;
        self
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        self -= rhs;
        self
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(mut self) -> Poly {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            for (n, d) in &rhs.terms {
                if let Some((p, neg)) = m.mul(n) {
                    let v = c * d;
                    out.add_term(p, if neg { -v } else { v });
                }
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}
