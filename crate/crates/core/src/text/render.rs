use num_traits::One;

use crate::algebra::{Atom, JetVar, Monomial, MultiIndex, Poly, Rational, Signature};
use crate::diffop::TotalDiffOperator;

pub fn rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn jet(sig: &Signature, v: &JetVar) -> String {
    let mut s = v.field.as_str().to_string();
    let multi = sig.field_of(v.field).map(|f| f.components > 1).unwrap_or(v.comp > 0);
    if multi {
        s.push_str(&format!("[{}]", v.comp));
    }
    let suffix = derivative_letters(sig, &v.index);
    if !suffix.is_empty() {
        s.push('_');
        s.push_str(&suffix);
    }
    s
}

fn base_name(sig: &Signature, d: usize) -> String {
    sig.base().get(d).map(|s| s.as_str().to_string()).unwrap_or_else(|| format!("x{d}"))
}

fn derivative_letters(sig: &Signature, index: &MultiIndex) -> String {
    let mut s = String::new();
    for d in 0..crate::algebra::MAX_DIM {
        for _ in 0..index.get(d) {
            s.push_str(&base_name(sig, d));
        }
    }
    s
}

fn power(s: String, n: u32) -> String {
    if n == 1 {
        s
    } else {
        format!("{s}^{n}")
    }
}

/// Factors of a monomial without coefficient, joined by `*`; empty for the unit monomial.
pub fn monomial(sig: &Signature, m: &Monomial) -> String {
    let mut parts: Vec<String> = Vec::new();
    let rank = |a: &Atom| match a {
        Atom::Param(_) => 0,
        Atom::Coord(_) => 1,
        Atom::Jet(_) => 2,
        Atom::Func(_) => 3,
    };
    let mut even: Vec<&(Atom, u32)> = m.even_part().iter().collect();
    even.sort_by_key(|(a, _)| rank(a));
    for (a, n) in even {
        let s = match a {
            Atom::Param(i) => format!("#{i}"),
            Atom::Coord(d) => base_name(sig, *d as usize),
            Atom::Jet(v) => jet(sig, v),
            Atom::Func(f) => format!("{}{}({})", f.name, "'".repeat(f.order as usize), jet(sig, &f.arg)),
        };
        parts.push(power(s, *n));
    }
    if !m.exp_part().is_empty() {
        let mut lin = Poly::zero();
        for (v, k) in m.exp_part() {
            lin.add_term(Monomial::atom(Atom::Jet(*v), 1), Rational::from_integer((*k).into()));
        }
        parts.push(format!("exp({})", poly(sig, &lin)));
    }
    for v in m.odd_part() {
        parts.push(jet(sig, v));
    }
    parts.join("*")
}

fn term(sig: &Signature, m: &Monomial, c: &Rational) -> String {
    let s = monomial(sig, m);
    if s.is_empty() {
        return rational(c);
    }
    if c.is_one() {
        s
    } else if (-c).is_one() {
        format!("-{s}")
    } else {
        format!("{}*{s}", rational(c))
    }
}

fn join_signed(chunks: Vec<String>) -> String {
    let mut out = String::new();
    for (i, t) in chunks.into_iter().enumerate() {
        if i == 0 {
            out.push_str(&t);
        } else if let Some(rest) = t.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(&t);
        }
    }
    out
}

/// Canonical rendering: terms by descending degree, ties in monomial order.
pub fn poly(sig: &Signature, p: &Poly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut terms: Vec<(&Monomial, &Rational)> = p.terms().collect();
    terms.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then_with(|| a.0.cmp(b.0)));
    join_signed(terms.into_iter().map(|(m, c)| term(sig, m, c)).collect())
}

fn d_part(sig: &Signature, t: &MultiIndex) -> String {
    let mut parts = Vec::new();
    for d in 0..crate::algebra::MAX_DIM {
        let k = t.get(d) as u32;
        if k > 0 {
            parts.push(power(format!("D{}", base_name(sig, d)), k));
        }
    }
    parts.join("*")
}

/// A scalar operator entry `Σ a_τ D^τ`, highest order first.
pub fn op_entry(sig: &Signature, entry: &std::collections::BTreeMap<MultiIndex, Poly>) -> String {
    if entry.is_empty() {
        return "0".to_string();
    }
    let mut taus: Vec<(&MultiIndex, &Poly)> = entry.iter().collect();
    taus.sort_by(|a, b| b.0.order().cmp(&a.0.order()).then_with(|| b.0.cmp(a.0)));
    let mut chunks = Vec::new();
    for (t, a) in taus {
        if t.is_zero() {
            chunks.push(poly(sig, a));
            continue;
        }
        let d = d_part(sig, t);
        if a.len() == 1 {
            let (m, c) = a.terms().next().unwrap();
            let s = monomial(sig, m);
            let lead = if s.is_empty() { String::new() } else { format!("{s}*") };
            let chunk = if c.is_one() {
                format!("{lead}{d}")
            } else if (-c).is_one() {
                format!("-{lead}{d}")
            } else {
                format!("{}*{lead}{d}", rational(c))
            };
            chunks.push(chunk);
        } else {
            chunks.push(format!("({})*{d}", poly(sig, a)));
        }
    }
    join_signed(chunks)
}

pub fn op(sig: &Signature, o: &TotalDiffOperator) -> String {
    if o.is_scalar() {
        return op_entry(sig, o.entry(0, 0));
    }
    let rows: Vec<String> = (0..o.rows())
        .map(|r| {
            let cols: Vec<String> = (0..o.cols()).map(|c| op_entry(sig, o.entry(r, c))).collect();
            format!("[{}]", cols.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

pub fn tuple(sig: &Signature, ps: &[Poly]) -> String {
    if ps.len() == 1 {
        return poly(sig, &ps[0]);
    }
    format!("[{}]", ps.iter().map(|p| poly(sig, p)).collect::<Vec<_>>().join(", "))
}

