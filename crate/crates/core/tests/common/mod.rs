#![allow(dead_code)]

pub mod props;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use varlie_core::algebra::{rat, ratio, JetVar, MultiIndex, Parity, Poly};
use varlie_core::diffop::TotalDiffOperator;
use varlie_core::jet::EvolutionaryField;
use varlie_core::Signature;

pub const CASES: usize = 128;

/// Base `x, y`; even fields `u, v`; odd fields `b, c`.
pub fn signature() -> Signature {
    Signature::new(&["x", "y"])
        .with_field("u", 1, Parity::Even)
        .with_field("v", 1, Parity::Even)
        .with_field("b", 1, Parity::Odd)
        .with_field("c", 1, Parity::Odd)
}

pub struct Gen {
    pub rng: ChaCha8Rng,
    pub sig: Signature,
    pub even: Vec<&'static str>,
    pub odd: Vec<&'static str>,
    pub max_order: u8,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed), sig: signature(), even: vec!["u", "v"], odd: vec!["b", "c"], max_order: 2 }
    }

    pub fn with_fields(seed: u64, sig: Signature, even: Vec<&'static str>, odd: Vec<&'static str>) -> Gen {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed), sig, even, odd, max_order: 2 }
    }

    pub fn coefficient(&mut self) -> Poly {
        let n = self.rng.gen_range(1..=3i64) * if self.rng.gen_bool(0.5) { 1 } else { -1 };
        let d = self.rng.gen_range(1..=2i64);
        Poly::constant(ratio(n, d))
    }

    pub fn index(&mut self) -> MultiIndex {
        let dims = self.sig.dims();
        let total = self.rng.gen_range(0..=self.max_order);
        let mut m = MultiIndex::ZERO;
        for _ in 0..total {
            let d = self.rng.gen_range(0..dims);
            m = m.shifted(d);
        }
        m
    }

    pub fn jet_of(&mut self, name: &str) -> JetVar {
        let idx = self.index();
        self.sig.jet(name, 0, idx)
    }

    fn pick(&mut self, odd: bool) -> &'static str {
        let pool = if odd { &self.odd } else { &self.even };
        pool[self.rng.gen_range(0..pool.len())]
    }

    /// A random term whose number of odd factors has the requested parity.
    pub fn term(&mut self, parity: Parity) -> Poly {
        let mut p = self.coefficient();
        for _ in 0..self.rng.gen_range(0..=2) {
            if self.even.is_empty() {
                break;
            }
            let name = self.pick(false);
            p = &p * &Poly::jet(self.jet_of(name));
        }
        if !self.odd.is_empty() {
            let mut k = if parity.is_odd() { 1 } else { 0 };
            if self.rng.gen_bool(0.3) {
                k += 2;
            }
            for _ in 0..k {
                let name = self.pick(true);
                p = &p * &Poly::jet(self.jet_of(name));
            }
        }
        p
    }

    /// Random polynomial of definite parity; may be zero when odd factors collide.
    pub fn poly(&mut self, parity: Parity, terms: usize) -> Poly {
        let mut p = Poly::zero();
        for _ in 0..self.rng.gen_range(1..=terms) {
            p += self.term(parity);
        }
        p
    }

    pub fn even_poly(&mut self, terms: usize) -> Poly {
        self.poly(Parity::Even, terms)
    }

    pub fn parity(&mut self) -> Parity {
        Parity::from_bool(self.rng.gen_bool(0.5))
    }

    /// A random generator `v`, even or odd.
    pub fn any_jet(&mut self) -> JetVar {
        let odd = !self.odd.is_empty() && (self.even.is_empty() || self.rng.gen_bool(0.5));
        let name = self.pick(odd);
        self.jet_of(name)
    }

    /// Random evolutionary field of the given parity on every declared field.
    pub fn field(&mut self, parity: Parity, terms: usize) -> EvolutionaryField {
        let mut x = EvolutionaryField::new(parity);
        let names: Vec<&'static str> = self.even.iter().chain(&self.odd).copied().collect();
        for name in names {
            if self.rng.gen_bool(0.25) {
                continue;
            }
            let q = self.sig.var(name);
            let s = self.poly(q.parity.add(parity), terms);
            x.set(q, s).expect("section parity");
        }
        x
    }

    /// Random matrix operator with even coefficients in the even fields.
    pub fn operator(&mut self, rows: usize, cols: usize) -> TotalDiffOperator {
        let mut op = TotalDiffOperator::zero(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                for _ in 0..self.rng.gen_range(0..=2) {
                    let t = self.index();
                    let coeff = if self.rng.gen_bool(0.4) { self.coefficient() } else { self.term_even_only() };
                    op.add_to(r, c, t, &coeff);
                }
            }
        }
        op
    }

    fn term_even_only(&mut self) -> Poly {
        let mut p = self.coefficient();
        for _ in 0..self.rng.gen_range(1..=2) {
            let name = self.pick(false);
            p = &p * &Poly::jet(self.jet_of(name));
        }
        p
    }

    /// A tuple of even polynomials in the even fields.
    pub fn even_tuple(&mut self, n: usize) -> Vec<Poly> {
        (0..n).map(|_| {
            let mut p = Poly::zero();
            for _ in 0..self.rng.gen_range(1..=2) {
                p += self.term_even_only();
            }
            p
        }).collect()
    }
}

pub fn sign(neg: bool) -> Poly {
    Poly::constant(rat(if neg { -1 } else { 1 }))
}

pub fn parity_of(p: &Poly) -> Parity {
    p.parity_or_even()
}
