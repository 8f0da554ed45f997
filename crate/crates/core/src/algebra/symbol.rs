//! Interned names, parities, multi-indices and jet coordinates.

use std::collections::HashSet;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::One;

/// Maximal number of base coordinates.
pub const MAX_DIM: usize = 4;

/// An interned identifier. Ordering and equality compare the string content.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(&'static str);

fn interner() -> &'static Mutex<HashSet<&'static str>> {
    static INTERNER: OnceLock<Mutex<HashSet<&'static str>>> = OnceLock::new();
    INTERNER.get_or_init(|| Mutex::new(HashSet::new()))
}

impl Symbol {
    pub fn new(name: &str) -> Symbol {
        let mut table = interner().lock().expect("symbol interner poisoned");
        if let Some(s) = table.get(name) {
            return Symbol(s);
        }
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        table.insert(leaked);
        Symbol(leaked)
    }

    pub fn as_str(&self) -> &'static str {
        self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

/// Grassmann parity.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub enum Parity {
    #[default]
    Even,
    Odd,
}

impl Parity {
    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn from_bool(odd: bool) -> Parity {
        if odd {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    /// Sum modulo two.
    pub fn add(self, other: Parity) -> Parity {
        Parity::from_bool(self.is_odd() != other.is_odd())
    }

    pub fn flip(self) -> Parity {
        Parity::from_bool(!self.is_odd())
    }

    /// The Koszul sign `(-1)^{self * other}` as a boolean "negative".
    pub fn koszul(self, other: Parity) -> bool {
        self.is_odd() && other.is_odd()
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// Derivative counts along each base direction.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex(pub [u8; MAX_DIM]);

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex([0; MAX_DIM]);

    pub fn unit(dir: usize) -> MultiIndex {
        let mut m = MultiIndex::ZERO;
        m.0[dir] = 1;
        m
    }

    pub fn from_slice(counts: &[u8]) -> MultiIndex {
        assert!(counts.len() <= MAX_DIM, "too many base directions");
        let mut m = MultiIndex::ZERO;
        m.0[..counts.len()].copy_from_slice(counts);
        m
    }

    pub fn order(&self) -> u32 {
        self.0.iter().map(|&k| k as u32).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0; MAX_DIM]
    }

    pub fn get(&self, dir: usize) -> u8 {
        self.0[dir]
    }

    pub fn shifted(&self, dir: usize) -> MultiIndex {
        let mut m = *self;
        m.0[dir] = m.0[dir].checked_add(1).expect("derivative order overflow");
        m
    }

    pub fn pow(dir: usize, k: u8) -> MultiIndex {
        let mut m = MultiIndex::ZERO;
        m.0[dir] = k;
        m
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        let mut m = *self;
        for i in 0..MAX_DIM {
            m.0[i] = m.0[i].checked_add(other.0[i]).expect("derivative order overflow");
        }
        m
    }

    /// `self - other` when `other <= self` componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut m = *self;
        for i in 0..MAX_DIM {
            m.0[i] = self.0[i].checked_sub(other.0[i])?;
        }
        Some(m)
    }

    /// First direction with a nonzero count.
    pub fn first_dir(&self) -> Option<usize> {
        self.0.iter().position(|&k| k > 0)
    }

    /// All multi-indices `rho <= self` componentwise, in lexicographic order.
    pub fn sub_indices(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::ZERO];
        for dir in 0..MAX_DIM {
            let top = self.0[dir];
            if top == 0 {
                continue;
            }
            let mut next = Vec::with_capacity(out.len() * (top as usize + 1));
            for m in &out {
                for k in 0..=top {
                    let mut n = *m;
                    n.0[dir] = k;
                    next.push(n);
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    /// Product of binomial coefficients `prod_i C(self_i, rho_i)`.
    pub fn binomial(&self, rho: &MultiIndex) -> BigInt {
        let mut acc = BigInt::one();
        for i in 0..MAX_DIM {
            acc *= binomial(self.0[i] as u64, rho.0[i] as u64);
        }
        acc
    }

    /// All multi-indices of total order at most `max` in the first `dims` directions.
    pub fn all_up_to(dims: usize, max: u32) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::ZERO];
        for dir in 0..dims {
            let mut next = Vec::new();
            for m in &out {
                let used = m.order();
                for k in 0..=(max - used) {
                    let mut n = *m;
                    n.0[dir] = k as u8;
                    next.push(n);
                }
            }
            out = next;
        }
        out.sort_by_key(|m| (m.order(), *m));
        out
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.0)
    }
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// A jet coordinate `q^comp_index` of a declared field.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct JetVar {
    pub field: Symbol,
    pub comp: u16,
    pub index: MultiIndex,
    pub parity: Parity,
}

impl JetVar {
    pub fn new(field: Symbol, comp: u16, index: MultiIndex, parity: Parity) -> JetVar {
        JetVar { field, comp, index, parity }
    }

    pub fn order(&self) -> u32 {
        self.index.order()
    }

    pub fn derive(&self, dir: usize) -> JetVar {
        JetVar { index: self.index.shifted(dir), ..*self }
    }

    pub fn with_index(&self, index: MultiIndex) -> JetVar {
        JetVar { index, ..*self }
    }

    pub fn base(&self) -> JetVar {
        self.with_index(MultiIndex::ZERO)
    }

    pub fn is_odd(&self) -> bool {
        self.parity.is_odd()
    }
}
