use std::collections::BTreeMap;

use num_traits::{ToPrimitive, Zero};

use super::ast::{BinOp, Expr, ExprKind};
use crate::algebra::{Atom, FuncAtom, JetVar, MultiIndex, Poly, Rational, Signature, Symbol};
use crate::diffop::TotalDiffOperator;
use crate::error::Result;

/// The value of an expression: a polynomial, an operator or a list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Poly(Poly),
    Op(TotalDiffOperator),
    List(Vec<Value>),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Poly(_) => "polynomial",
            Value::Op(_) => "operator",
            Value::List(_) => "list",
        }
    }
}

/// Name bindings available while evaluating expressions.
#[derive(Clone, Debug)]
pub struct Env<'a> {
    pub sig: &'a Signature,
    pub ops: BTreeMap<String, TotalDiffOperator>,
    pub lets: BTreeMap<String, Poly>,
    /// Local names standing for declared fields, e.g. lambda parameters.
    pub aliases: BTreeMap<String, Symbol>,
}

impl<'a> Env<'a> {
    pub fn new(sig: &'a Signature) -> Env<'a> {
        Env { sig, ops: BTreeMap::new(), lets: BTreeMap::new(), aliases: BTreeMap::new() }
    }

    pub fn eval(&self, e: &Expr) -> Result<Value> {
        match &e.kind {
            ExprKind::Int(n) => Ok(Value::Poly(Poly::constant(Rational::from_integer(n.clone())))),
            ExprKind::Param(i) => Ok(Value::Poly(Poly::param(*i))),
            ExprKind::Neg(a) => Ok(match self.eval(a)? {
                Value::Poly(p) => Value::Poly(-p),
                Value::Op(o) => Value::Op(o.neg()),
                Value::List(_) => return Err(a.error("cannot negate a list")),
            }),
            ExprKind::Pow(a, k) => match self.eval(a)? {
                Value::Poly(p) => Ok(Value::Poly(p.pow(*k))),
                Value::Op(o) => {
                    if o.rows() != o.cols() {
                        return Err(a.error("only square operators have powers"));
                    }
                    let mut acc = TotalDiffOperator::identity(o.rows());
                    for _ in 0..*k {
                        acc = acc.compose(&o);
                    }
                    Ok(Value::Op(acc))
                }
                Value::List(_) => Err(a.error("cannot raise a list to a power")),
            },
            ExprKind::Bin(op, a, b) => {
                let x = self.eval(a)?;
                let y = self.eval(b)?;
                self.binary(*op, x, y, e, b)
            }
            ExprKind::List(items) => {
                let vals: Vec<Value> = items.iter().map(|i| self.eval(i)).collect::<Result<_>>()?;
                if !vals.is_empty() && vals.iter().all(|v| matches!(v, Value::List(_))) {
                    return self.matrix(vals, e).map(Value::Op);
                }
                Ok(Value::List(vals))
            }
            ExprKind::Var { name, comp, suffix } => self.var(e, name, *comp, suffix),
            ExprKind::Call { name, primes, args } => self.call(e, name, *primes, args),
        }
    }

    pub fn eval_poly(&self, e: &Expr) -> Result<Poly> {
        match self.eval(e)? {
            Value::Poly(p) => Ok(p),
            other => Err(e.error(format!("expected a polynomial, found an {}", other.kind()))),
        }
    }

    pub fn eval_op(&self, e: &Expr) -> Result<TotalDiffOperator> {
        match self.eval(e)? {
            Value::Poly(p) => Ok(TotalDiffOperator::mult(p)),
            Value::Op(o) => Ok(o),
            Value::List(_) => Err(e.error("expected an operator, found a list")),
        }
    }

    /// A polynomial or a list of polynomials.
    pub fn eval_tuple(&self, e: &Expr) -> Result<Vec<Poly>> {
        match self.eval(e)? {
            Value::Poly(p) => Ok(vec![p]),
            Value::List(vs) => vs
                .into_iter()
                .map(|v| match v {
                    Value::Poly(p) => Ok(p),
                    other => Err(e.error(format!("expected polynomial entries, found an {}", other.kind()))),
                })
                .collect(),
            Value::Op(_) => Err(e.error("expected a polynomial tuple, found an operator")),
        }
    }

    fn matrix(&self, rows: Vec<Value>, e: &Expr) -> Result<TotalDiffOperator> {
        let rows: Vec<Vec<Value>> = rows.into_iter().map(|r| if let Value::List(v) = r { v } else { unreachable!() }).collect();
        let ncols = rows[0].len();
        if ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
            return Err(e.error("matrix rows must be nonempty and of equal length"));
        }
        let mut out = TotalDiffOperator::zero(rows.len(), ncols);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                let o = match v {
                    Value::Poly(p) => TotalDiffOperator::mult(p),
                    Value::Op(o) if o.is_scalar() => o,
                    _ => return Err(e.error("matrix entries must be scalar operators")),
                };
                for (t, p) in o.entry(0, 0) {
                    out.add_to(i, j, *t, p);
                }
            }
        }
        Ok(out)
    }

    fn binary(&self, op: BinOp, x: Value, y: Value, e: &Expr, rhs: &Expr) -> Result<Value> {
        use Value::*;
        let lift = |o: &TotalDiffOperator, p: crate::algebra::Poly| -> Result<TotalDiffOperator> {
            if o.rows() != o.cols() {
                return Err(e.error("polynomial and non-square operator cannot be combined"));
            }
            let mut id = TotalDiffOperator::zero(o.rows(), o.rows());
            for i in 0..o.rows() {
                id.add_to(i, i, MultiIndex::ZERO, &p);
            }
            Ok(id)
        };
        match op {
            BinOp::Add | BinOp::Sub => {
                let neg = op == BinOp::Sub;
                match (x, y) {
                    (Poly(a), Poly(b)) => Ok(Poly(if neg { a - b } else { a + b })),
                    (Op(a), Op(b)) => {
                        let b = if neg { b.neg() } else { b };
                        a.try_add(&b).map(Op).map_err(|er| e.error(er.to_string()))
                    }
                    (Op(a), Poly(b)) => {
                        let b = lift(&a, if neg { -b } else { b })?;
                        Ok(Op(a.add(&b)))
                    }
                    (Poly(a), Op(b)) => {
                        let b = if neg { b.neg() } else { b };
                        let a = lift(&b, a)?;
                        Ok(Op(a.add(&b)))
                    }
                    (List(a), List(b)) if a.len() == b.len() => {
                        let mut out = Vec::new();
                        for (u, v) in a.into_iter().zip(b) {
                            out.push(self.binary(op, u, v, e, rhs)?);
                        }
                        Ok(List(out))
                    }
                    _ => Err(e.error("mismatched operands")),
                }
            }
            BinOp::Mul => match (x, y) {
                (Poly(a), Poly(b)) => Ok(Poly(&a * &b)),
                (Poly(a), Op(b)) => Ok(Op(b.map_coeffs(|c| &a * c))),
                (Op(a), Poly(b)) => {
                    let m = lift(&a, b)?;
                    Ok(Op(a.compose(&m)))
                }
                (Op(a), Op(b)) => a.try_compose(&b).map(Op).map_err(|er| e.error(er.to_string())),
                (Poly(a), List(b)) => Ok(List(
                    b.into_iter().map(|v| self.binary(BinOp::Mul, Poly(a.clone()), v, e, rhs)).collect::<Result<_>>()?,
                )),
                _ => Err(e.error("mismatched operands")),
            },
            BinOp::Div => {
                let d = match y {
                    Poly(b) => b.as_constant(),
                    _ => None,
                };
                let d = match d {
                    Some(d) if !d.is_zero() => d,
                    _ => return Err(rhs.error("division only by nonzero rational constants")),
                };
                let k = d.recip();
                match x {
                    Poly(a) => Ok(Poly(a.scale(&k))),
                    Op(a) => Ok(Op(a.scale(&k))),
                    List(_) => Err(e.error("cannot divide a list")),
                }
            }
        }
    }

    fn field_jet(&self, e: &Expr, field: Symbol, comp: Option<u16>, suffix: &str) -> Result<JetVar> {
        let decl = self.sig.field_of(field).ok_or_else(|| e.error(format!("unknown field `{field}`")))?;
        let comp = match comp {
            Some(c) if c < decl.components => c,
            Some(c) => return Err(e.error(format!("field `{field}` has no component {c}"))),
            None if decl.components == 1 => 0,
            None => return Err(e.error(format!("field `{field}` needs a component index"))),
        };
        let index = self.suffix_index(e, suffix)?;
        Ok(JetVar::new(decl.name, comp, index, decl.parity))
    }

    fn suffix_index(&self, e: &Expr, suffix: &str) -> Result<MultiIndex> {
        let mut index = MultiIndex::ZERO;
        for ch in suffix.chars() {
            let d = self
                .sig
                .dir(&ch.to_string())
                .ok_or_else(|| e.error(format!("`{ch}` is not a base coordinate")))?;
            index = index.shifted(d);
        }
        Ok(index)
    }

    fn resolve_field(&self, name: &str) -> Option<Symbol> {
        if let Some(s) = self.aliases.get(name) {
            return Some(*s);
        }
        self.sig.field(name).map(|f| f.name)
    }

    fn derivative_dir(&self, name: &str) -> Option<usize> {
        let rest = name.strip_prefix('D')?;
        self.sig.dir(rest)
    }

    fn var(&self, e: &Expr, name: &str, comp: Option<u16>, suffix: &str) -> Result<Value> {
        if let Some(f) = self.resolve_field(name) {
            return Ok(Value::Poly(Poly::jet(self.field_jet(e, f, comp, suffix)?)));
        }
        if comp.is_some() {
            return Err(e.error(format!("`{name}` is not a multi-component field")));
        }
        if let Some(p) = self.lets.get(name) {
            let index = self.suffix_index(e, suffix)?;
            return Ok(Value::Poly(p.total_derivative_multi(&index)));
        }
        if !suffix.is_empty() {
            return Err(e.error(format!("unknown field `{name}`")));
        }
        if let Some(o) = self.ops.get(name) {
            return Ok(Value::Op(o.clone()));
        }
        if let Some(d) = self.sig.dir(name) {
            return Ok(Value::Poly(Poly::coord(d as u8)));
        }
        if let Some(d) = self.derivative_dir(name) {
            return Ok(Value::Op(TotalDiffOperator::d(MultiIndex::unit(d))));
        }
        Err(e.error(format!("unknown name `{name}`")))
    }

    fn call(&self, e: &Expr, name: &str, primes: u32, args: &[Expr]) -> Result<Value> {
        if name == "exp" && primes == 0 {
            if args.len() != 1 {
                return Err(e.error("exp takes one argument"));
            }
            let lin = self.eval_poly(&args[0])?;
            let mut terms = Vec::new();
            for (m, c) in lin.terms() {
                let v = match m.even_part() {
                    [(Atom::Jet(v), 1)] if m.odd_part().is_empty() && m.exp_part().is_empty() && v.order() == 0 => *v,
                    _ => return Err(args[0].error("exp needs an integer-linear combination of order-0 fields")),
                };
                if !c.is_integer() {
                    return Err(args[0].error("exp coefficients must be integers"));
                }
                let k = c.to_integer().to_i64().ok_or_else(|| args[0].error("exp coefficient out of range"))?;
                terms.push((v, k));
            }
            return Ok(Value::Poly(Poly::exp(terms)));
        }
        if primes == 0 {
            if let Some(d) = self.derivative_dir(name).filter(|_| self.resolve_field(name).is_none()) {
                if args.len() != 1 {
                    return Err(e.error("a total derivative takes one argument"));
                }
                return Ok(match self.eval(&args[0])? {
                    Value::Poly(p) => Value::Poly(p.total_derivative(d)),
                    Value::List(vs) => Value::List(
                        vs.into_iter()
                            .map(|v| match v {
                                Value::Poly(p) => Ok(Value::Poly(p.total_derivative(d))),
                                _ => Err(args[0].error("total derivative of a non-polynomial")),
                            })
                            .collect::<Result<_>>()?,
                    ),
                    Value::Op(_) => return Err(args[0].error("total derivative of an operator; write Dx*A")),
                });
            }
            if let Some(o) = self.ops.get(name) {
                let mut vals = Vec::new();
                for a in args {
                    vals.extend(self.eval_tuple(a)?);
                }
                let out = o.try_apply(&vals).map_err(|er| e.error(er.to_string()))?;
                return Ok(if out.len() == 1 {
                    Value::Poly(out.into_iter().next().unwrap())
                } else {
                    Value::List(out.into_iter().map(Value::Poly).collect())
                });
            }
        }
        if self.sig.is_func(name) {
            if args.len() != 1 {
                return Err(e.error("formal functions are unary"));
            }
            let arg = self.eval_poly(&args[0])?;
            let v = arg.jets();
            let ok = v.len() == 1 && Poly::jet(v[0]) == arg && !v[0].is_odd() && v[0].order() == 0;
            if !ok {
                return Err(args[0].error("formal functions apply to an even order-0 field"));
            }
            return Ok(Value::Poly(Poly::func(FuncAtom { name: Symbol::new(name), order: primes, arg: v[0] })));
        }
        Err(e.error(format!("unknown function `{name}`")))
    }
}

/// Parses and evaluates a polynomial expression.
pub fn parse_poly(env: &Env, src: &str) -> Result<Poly> {
    let e = super::ast::parse_expression_str(src)?;
    env.eval_poly(&e)
}

/// Parses and evaluates an operator expression.
pub fn parse_op(env: &Env, src: &str) -> Result<TotalDiffOperator> {
    let e = super::ast::parse_expression_str(src)?;
    env.eval_op(&e)
}
