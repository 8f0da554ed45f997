//! Canonical text for scenario syntax trees.

use std::fmt::Write;

use varlie_core::algebra::Parity;
use varlie_core::text::{BinOp, Expr, ExprKind};

use crate::scenario::{ClauseValue, Scenario, Stmt, StmtKind, TaskDecl};

const ADD: u8 = 1;
const MUL: u8 = 2;
const UNARY: u8 = 3;
const ATOM: u8 = 5;

fn level(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Bin(BinOp::Add | BinOp::Sub, ..) => ADD,
        ExprKind::Bin(..) => MUL,
        ExprKind::Neg(_) => UNARY,
        ExprKind::Pow(..) => 4,
        _ => ATOM,
    }
}

fn write_expr(out: &mut String, e: &Expr, min: u8) {
    let paren = level(e) < min;
    if paren {
        out.push('(');
    }
    match &e.kind {
        ExprKind::Int(n) => write!(out, "{n}").unwrap(),
        ExprKind::Param(i) => write!(out, "#{i}").unwrap(),
        ExprKind::Var { name, comp, suffix } => {
            out.push_str(name);
            if let Some(c) = comp {
                write!(out, "[{c}]").unwrap();
            }
            if !suffix.is_empty() {
                out.push('_');
                out.push_str(suffix);
            }
        }
        ExprKind::Call { name, primes, args } => {
            out.push_str(name);
            for _ in 0..*primes {
                out.push('\'');
            }
            out.push('(');
            write_list(out, args);
            out.push(')');
        }
        ExprKind::List(items) => {
            out.push('[');
            write_list(out, items);
            out.push(']');
        }
        ExprKind::Neg(a) => {
            out.push('-');
            write_expr(out, a, UNARY);
        }
        ExprKind::Pow(a, k) => {
            write_expr(out, a, ATOM);
            write!(out, "^{k}").unwrap();
        }
        ExprKind::Bin(op, a, b) => {
            let (sym, lhs, rhs) = match op {
                BinOp::Add => (" + ", ADD, MUL),
                BinOp::Sub => (" - ", ADD, MUL),
                BinOp::Mul => ("*", MUL, UNARY),
                BinOp::Div => ("/", MUL, UNARY),
            };
            write_expr(out, a, lhs);
            out.push_str(sym);
            write_expr(out, b, rhs);
        }
    }
    if paren {
        out.push(')');
    }
}

fn write_list(out: &mut String, items: &[Expr]) {
    for (i, a) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(out, a, ADD);
    }
}

pub fn expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, ADD);
    s
}

/// An argument in a position where juxtaposition follows: parenthesize anything that is not atomic.
fn arg(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, ATOM);
    s
}

fn task(t: &TaskDecl) -> String {
    let mut s = format!("task {} = {}", t.name, t.kind.as_str());
    for a in &t.args {
        s.push(' ');
        s.push_str(&arg(a));
    }
    for c in &t.clauses {
        s.push(' ');
        s.push_str(&c.key);
        match &c.value {
            ClauseValue::Flag => {}
            ClauseValue::Name(n) => write!(s, " {n}").unwrap(),
            ClauseValue::Int(n) => write!(s, " {n}").unwrap(),
            ClauseValue::Expr(e) => write!(s, " {}", expr(e)).unwrap(),
            ClauseValue::Keyed(items) => {
                for (i, (name, comp, e)) in items.iter().enumerate() {
                    s.push_str(if i == 0 { " " } else { ", " });
                    s.push_str(name);
                    if let Some(c) = comp {
                        write!(s, "[{c}]").unwrap();
                    }
                    write!(s, " = {}", expr(e)).unwrap();
                }
            }
            ClauseValue::Case(op, gamma) => {
                write!(s, " {}", expr(op)).unwrap();
                if let Some(g) = gamma {
                    write!(s, " gamma {}", expr(g)).unwrap();
                }
            }
            ClauseValue::Exprs(v) => {
                let parts: Vec<String> = v.iter().map(expr).collect();
                write!(s, " {}", parts.join(", ")).unwrap();
            }
        }
    }
    s
}

fn parity(p: Parity) -> &'static str {
    if p.is_odd() {
        "odd"
    } else {
        "even"
    }
}

pub fn stmt(st: &Stmt) -> String {
    let body = match &st.kind {
        StmtKind::Base(names) => format!("base {}", names.join(" ")),
        StmtKind::Field { name, components, parity: p, weight } => {
            let mut s = format!("field {name}");
            if *components != 1 {
                write!(s, "[{components}]").unwrap();
            }
            write!(s, " {}", parity(*p)).unwrap();
            if let Some(w) = weight {
                write!(s, " weight {}", expr(w)).unwrap();
            }
            s
        }
        StmtKind::Func(n) => format!("func {n}"),
        StmtKind::Op { name, expr: e } => format!("op {name} = {}", expr(e)),
        StmtKind::Let { name, expr: e } => format!("let {name} = {}", expr(e)),
        StmtKind::Relation { name, expr: e } => format!("relation {name} = {}", expr(e)),
        StmtKind::Equation { name, lhs, rhs } => format!("equation {name}: {} = {}", expr(lhs), expr(rhs)),
        StmtKind::System { name, fields, slots, equations, action } => {
            let mut s = format!("system {name} fields {fields} slots {slots}");
            if let Some(e) = equations {
                write!(s, " equations {}", expr(e)).unwrap();
            }
            if let Some(a) = action {
                write!(s, " action {}", expr(a)).unwrap();
            }
            s
        }
        StmtKind::Pair { even, odd } => format!("pair {even} with {odd}"),
        StmtKind::Task(t) => task(t),
    };
    body + ";"
}

/// One statement per line, comments dropped.
pub fn scenario(s: &Scenario) -> String {
    let mut out = String::new();
    for st in &s.stmts {
        out.push_str(&stmt(st));
        out.push('\n');
    }
    out
}

/// Zeroes every source position in an expression.
pub fn erase_expr(e: &mut Expr) {
    e.line = 0;
    e.col = 0;
    match &mut e.kind {
        ExprKind::Neg(a) | ExprKind::Pow(a, _) => erase_expr(a),
        ExprKind::Bin(_, a, b) => {
            erase_expr(a);
            erase_expr(b);
        }
        ExprKind::List(v) | ExprKind::Call { args: v, .. } => v.iter_mut().for_each(erase_expr),
        _ => {}
    }
}

/// The tree with every source position zeroed, for structural comparison.
pub fn erase_spans(s: &Scenario) -> Scenario {
    let mut s = s.clone();
    for st in &mut s.stmts {
        st.line = 0;
        st.col = 0;
        match &mut st.kind {
            StmtKind::Field { weight: Some(w), .. } => erase_expr(w),
            StmtKind::Op { expr, .. } | StmtKind::Let { expr, .. } | StmtKind::Relation { expr, .. } => erase_expr(expr),
            StmtKind::Equation { lhs, rhs, .. } => {
                erase_expr(lhs);
                erase_expr(rhs);
            }
            StmtKind::System { equations, action, .. } => {
                equations.iter_mut().chain(action.iter_mut()).for_each(erase_expr);
            }
            StmtKind::Task(t) => {
                t.args.iter_mut().for_each(erase_expr);
                for c in &mut t.clauses {
                    c.line = 0;
                    c.col = 0;
                    match &mut c.value {
                        ClauseValue::Expr(e) => erase_expr(e),
                        ClauseValue::Keyed(items) => items.iter_mut().for_each(|(_, _, e)| erase_expr(e)),
                        ClauseValue::Case(a, b) => {
                            erase_expr(a);
                            b.iter_mut().for_each(erase_expr);
                        }
                        ClauseValue::Exprs(v) => v.iter_mut().for_each(erase_expr),
                        _ => {}
                    }
                }
            }
            _ => {}
        }
    }
    s
}
