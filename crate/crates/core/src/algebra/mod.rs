//! Graded-commutative polynomial algebra over the rationals.

mod monomial;
mod poly;
pub mod symbol;

pub use monomial::{Atom, FuncAtom, Monomial};
pub use poly::{rat, ratio, Generator, Poly, Rational};
pub use symbol::{binomial, JetVar, MultiIndex, Parity, Symbol, MAX_DIM};

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// A field declaration: name, number of components, parity and optional weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldDecl {
    pub name: Symbol,
    pub components: u16,
    pub parity: Parity,
    pub weight: Option<Rational>,
}

/// Base coordinates, fields and formal functions of a problem.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    base: Vec<Symbol>,
    fields: BTreeMap<Symbol, FieldDecl>,
    order: Vec<Symbol>,
    funcs: Vec<Symbol>,
}

impl Signature {
    pub fn new(base: &[&str]) -> Signature {
        assert!(base.len() <= MAX_DIM, "at most {MAX_DIM} base coordinates");
        Signature { base: base.iter().map(|s| Symbol::new(s)).collect(), ..Signature::default() }
    }

    pub fn set_base(&mut self, base: Vec<Symbol>) -> Result<()> {
        if base.len() > MAX_DIM {
            return Err(Error::Invalid(format!("at most {MAX_DIM} base coordinates")));
        }
        self.base = base;
        Ok(())
    }

    pub fn dims(&self) -> usize {
        self.base.len()
    }

    pub fn base(&self) -> &[Symbol] {
        &self.base
    }

    pub fn dir(&self, name: &str) -> Option<usize> {
        self.base.iter().position(|s| s.as_str() == name)
    }

    pub fn add_field(&mut self, name: &str, components: u16, parity: Parity, weight: Option<Rational>) -> Result<Symbol> {
        let sym = Symbol::new(name);
        if self.fields.contains_key(&sym) {
            return Err(Error::Invalid(format!("field `{name}` declared twice")));
        }
        self.fields.insert(sym, FieldDecl { name: sym, components, parity, weight });
        self.order.push(sym);
        Ok(sym)
    }

    /// Builder form of [`Signature::add_field`].
    pub fn with_field(mut self, name: &str, components: u16, parity: Parity) -> Signature {
        self.add_field(name, components, parity, None).expect("fresh field");
        self
    }

    pub fn with_weighted_field(mut self, name: &str, parity: Parity, weight: Rational) -> Signature {
        self.add_field(name, 1, parity, Some(weight)).expect("fresh field");
        self
    }

    pub fn add_func(&mut self, name: &str) -> Symbol {
        let s = Symbol::new(name);
        if !self.funcs.contains(&s) {
            self.funcs.push(s);
        }
        s
    }

    pub fn is_func(&self, name: &str) -> bool {
        self.funcs.iter().any(|s| s.as_str() == name)
    }

    pub fn field(&self, name: &str) -> Option<&FieldDecl> {
        self.fields.get(&Symbol::new(name))
    }

    pub fn field_of(&self, sym: Symbol) -> Option<&FieldDecl> {
        self.fields.get(&sym)
    }

    /// Fields in declaration order.
    pub fn fields(&self) -> impl Iterator<Item = &FieldDecl> {
        self.order.iter().map(move |s| &self.fields[s])
    }

    pub fn jet(&self, name: &str, comp: u16, index: MultiIndex) -> JetVar {
        let f = self.field(name).unwrap_or_else(|| panic!("unknown field `{name}`"));
        assert!(comp < f.components, "component out of range");
        JetVar::new(f.name, comp, index, f.parity)
    }

    /// Order-0 jet of a single-component field.
    pub fn var(&self, name: &str) -> JetVar {
        self.jet(name, 0, MultiIndex::ZERO)
    }

    /// `name` differentiated `k` times along the first base direction.
    pub fn var_x(&self, name: &str, k: u8) -> JetVar {
        self.jet(name, 0, MultiIndex::pow(0, k))
    }

    pub fn poly(&self, name: &str) -> Poly {
        Poly::jet(self.var(name))
    }

    pub fn poly_x(&self, name: &str, k: u8) -> Poly {
        Poly::jet(self.var_x(name, k))
    }

    /// Grading weight of a monomial with `|D| = 1` and `|x| = -1`; `None` when some factor has no weight.
    pub fn weight_of(&self, m: &Monomial) -> Option<Rational> {
        let mut w = Rational::from_integer(0.into());
        let jet_w = |v: &JetVar| -> Option<Rational> {
            let f = self.fields.get(&v.field)?;
            Some(f.weight.clone()? + rat(v.order() as i64))
        };
        for (a, n) in m.even_part() {
            let aw = match a {
                Atom::Coord(_) => rat(-1),
                Atom::Param(_) => rat(0),
                Atom::Jet(v) => jet_w(v)?,
                Atom::Func(f) => -(jet_w(&f.arg)? * rat(f.order as i64)),
            };
            w += aw * rat(*n as i64);
        }
        for v in m.odd_part() {
            w += jet_w(v)?;
        }
        if !m.exp_part().is_empty() {
            return None;
        }
        Some(w)
    }

    /// Weight of a homogeneous polynomial; `None` if inhomogeneous or undefined. Zero has no weight.
    pub fn weight(&self, p: &Poly) -> Option<Rational> {
        let mut out: Option<Rational> = None;
        for (m, _) in p.terms() {
            let w = self.weight_of(m)?;
            match &out {
                None => out = Some(w),
                Some(o) if *o == w => {}
                Some(_) => return None,
            }
        }
        out
    }
}
