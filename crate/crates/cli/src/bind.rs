//! Name resolution and evaluation of a parsed scenario into runnable jobs.

use std::collections::BTreeMap;

use varlie_core::algebra::{JetVar, MultiIndex, Parity, Poly, Rational, Signature, Symbol};
use varlie_core::algebroid::{BiDiffSymbol, OperatorCollection};
use varlie_core::diffop::TotalDiffOperator;
use varlie_core::gauge::{BvNames, EquationSystem};
use varlie_core::jet::{EquationKind, EquationNormalForm};
use varlie_core::poisson::Pairing;
use varlie_core::text::{render, Env, Expr};
use varlie_core::{Error, Result};

use crate::scenario::{arg_name, Clause, ClauseValue, Scenario, StmtKind, TaskDecl, TaskKind};

#[derive(Clone, Debug)]
pub struct Problem {
    pub sig: Signature,
    pub ops: BTreeMap<String, TotalDiffOperator>,
    pub lets: BTreeMap<String, Poly>,
    pub pairing: Pairing,
    pub tasks: Vec<Bound>,
}

#[derive(Clone, Debug)]
pub struct Bound {
    pub name: String,
    pub kind: TaskKind,
    pub deps: Vec<usize>,
    pub job: Job,
}

#[derive(Clone, Debug)]
pub enum QSource {
    Task(usize),
    Given { coll: OperatorCollection, gamma: BiDiffSymbol },
}

#[derive(Clone, Debug)]
pub struct SystemRef {
    pub system: EquationSystem,
    pub relation: Vec<Poly>,
}

#[derive(Clone, Debug)]
pub struct Case {
    pub op: TotalDiffOperator,
    pub text: String,
    pub gamma: Option<Poly>,
}

#[derive(Clone, Debug)]
pub struct SearchJob {
    pub weight: Option<u32>,
    pub order: Option<u32>,
    pub formal: bool,
    pub splits: u32,
    pub cases: Vec<Case>,
    pub represent: Vec<Case>,
}

#[derive(Clone, Debug)]
pub enum Job {
    Hamiltonian { op: TotalDiffOperator, target: JetVar, ghost: String, bound: Option<u32> },
    Christoffel { coll: OperatorCollection, bound: Option<u32>, expect: Option<Vec<Poly>> },
    BuildQ { from: QSource, ghost: Symbol, expect: Vec<(JetVar, Poly)> },
    VerifyQ2 { from: usize },
    Schouten { w1: Poly, w2: Poly, expect: Option<Poly>, charge: Option<(Poly, usize)> },
    Noether { sys: SystemRef, expect: Option<TotalDiffOperator> },
    Brst { sys: SystemRef, names: BvNames, bound: Option<u32>, expect: Option<Vec<Poly>>, nabla: Option<TotalDiffOperator> },
    BvMaster { sys: SystemRef, names: BvNames, generator: Option<TotalDiffOperator>, degree: u32 },
    Search(SearchJob),
    OnShell { eq: EquationNormalForm, expr: Poly, expect: Option<Poly> },
}

fn err_at(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::parse(line, col, msg)
}

/// Lifts evaluation errors without a position to the statement position.
fn at<T>(line: usize, col: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        other => err_at(line, col, other.to_string()),
    })
}

struct Binder {
    sig: Option<Signature>,
    ops: BTreeMap<String, TotalDiffOperator>,
    lets: BTreeMap<String, Poly>,
    equations: BTreeMap<String, EquationNormalForm>,
    systems: BTreeMap<String, EquationSystem>,
    relations: BTreeMap<String, Vec<Poly>>,
    pairs: Vec<(JetVar, JetVar)>,
    tasks: Vec<Bound>,
}

impl Binder {
    fn sig(&self, line: usize, col: usize) -> Result<&Signature> {
        self.sig.as_ref().ok_or_else(|| err_at(line, col, "`base` must be declared first"))
    }

    fn env<'a>(&self, sig: &'a Signature) -> Env<'a> {
        let mut env = Env::new(sig);
        env.ops = self.ops.clone();
        env.lets = self.lets.clone();
        env
    }

    fn taken(&self, name: &str) -> bool {
        self.ops.contains_key(name)
            || self.lets.contains_key(name)
            || self.equations.contains_key(name)
            || self.systems.contains_key(name)
            || self.relations.contains_key(name)
            || self.tasks.iter().any(|t| t.name == name)
            || self.sig.as_ref().is_some_and(|s| s.field(name).is_some() || s.is_func(name))
    }

    fn fresh(&self, name: &str, line: usize, col: usize) -> Result<()> {
        if self.taken(name) {
            return Err(err_at(line, col, format!("`{name}` is already defined")));
        }
        Ok(())
    }

    fn field_jets(&self, sig: &Signature, name: &str, line: usize, col: usize) -> Result<Vec<JetVar>> {
        let f = sig.field(name).ok_or_else(|| err_at(line, col, format!("unknown field `{name}`")))?;
        Ok((0..f.components).map(|k| JetVar::new(f.name, k, MultiIndex::ZERO, f.parity)).collect())
    }

    fn single_jet(&self, sig: &Signature, c: &Clause) -> Result<JetVar> {
        let name = name_of(c)?;
        let jets = self.field_jets(sig, name, c.line, c.col)?;
        if jets.len() != 1 {
            return Err(err_at(c.line, c.col, format!("`{name}` must be a single-component field")));
        }
        Ok(jets[0])
    }

    fn task_index(&self, name: &str, want: TaskKind, line: usize, col: usize) -> Result<usize> {
        let i = self
            .tasks
            .iter()
            .position(|t| t.name == name)
            .ok_or_else(|| err_at(line, col, format!("unknown task `{name}` (tasks must be defined before use)")))?;
        if self.tasks[i].kind != want {
            return Err(err_at(line, col, format!("task `{name}` is not a {} task", want.as_str())));
        }
        Ok(i)
    }
}

fn name_of(c: &Clause) -> Result<&str> {
    match &c.value {
        ClauseValue::Name(n) => Ok(n),
        _ => Err(err_at(c.line, c.col, format!("clause `{}` needs a name", c.key))),
    }
}

fn int_of(c: Option<&Clause>) -> Option<u32> {
    match c.map(|c| &c.value) {
        Some(ClauseValue::Int(n)) => Some(*n),
        _ => None,
    }
}

fn expr_of(c: &Clause) -> &Expr {
    match &c.value {
        ClauseValue::Expr(e) => e,
        _ => unreachable!("clause shape checked by the parser"),
    }
}

fn required<'a>(t: &'a TaskDecl, key: &str, line: usize, col: usize) -> Result<&'a Clause> {
    t.clause(key).ok_or_else(|| err_at(line, col, format!("`{}` needs a `{key}` clause", t.kind.as_str())))
}

fn constant(p: &Poly, e: &Expr) -> Result<Rational> {
    p.as_constant().ok_or_else(|| e.error("expected a rational constant"))
}

/// Resolves and evaluates every statement; returns the runnable problem.
pub fn bind(s: &Scenario) -> Result<Problem> {
    let mut b = Binder {
        sig: None,
        ops: BTreeMap::new(),
        lets: BTreeMap::new(),
        equations: BTreeMap::new(),
        systems: BTreeMap::new(),
        relations: BTreeMap::new(),
        pairs: Vec::new(),
        tasks: Vec::new(),
    };
    for st in &s.stmts {
        let (line, col) = (st.line, st.col);
        match &st.kind {
            StmtKind::Base(names) => {
                if b.sig.is_some() {
                    return Err(err_at(line, col, "`base` declared twice"));
                }
                if names.len() > varlie_core::algebra::MAX_DIM {
                    return Err(err_at(line, col, format!("at most {} base coordinates", varlie_core::algebra::MAX_DIM)));
                }
                for (i, n) in names.iter().enumerate() {
                    if names[..i].contains(n) {
                        return Err(err_at(line, col, format!("base coordinate `{n}` repeated")));
                    }
                }
                let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                b.sig = Some(Signature::new(&refs));
            }
            StmtKind::Field { name, components, parity, weight } => {
                b.fresh(name, line, col)?;
                let sig = b.sig(line, col)?.clone();
                if sig.dir(name).is_some() || sig.base().iter().any(|d| format!("D{d}") == *name) {
                    return Err(err_at(line, col, format!("`{name}` clashes with a base name")));
                }
                let w = match weight {
                    Some(e) => Some(constant(&b.env(&sig).eval_poly(e)?, e)?),
                    None => None,
                };
                let sig = b.sig.as_mut().unwrap();
                at(line, col, sig.add_field(name, *components, *parity, w))?;
            }
            StmtKind::Func(name) => {
                b.fresh(name, line, col)?;
                b.sig(line, col)?;
                b.sig.as_mut().unwrap().add_func(name);
            }
            StmtKind::Op { name, expr } => {
                b.fresh(name, line, col)?;
                let sig = b.sig(line, col)?.clone();
                let op = b.env(&sig).eval_op(expr)?;
                b.ops.insert(name.clone(), op);
            }
            StmtKind::Let { name, expr } => {
                b.fresh(name, line, col)?;
                let sig = b.sig(line, col)?.clone();
                let p = b.env(&sig).eval_poly(expr)?;
                if p.parity().is_none() {
                    return Err(expr.error("expression has mixed parity"));
                }
                b.lets.insert(name.clone(), p);
            }
            StmtKind::Relation { name, expr } => {
                b.fresh(name, line, col)?;
                let sig = b.sig(line, col)?.clone();
                let v = b.env(&sig).eval_tuple(expr)?;
                b.relations.insert(name.clone(), v);
            }
            StmtKind::Equation { name, lhs, rhs } => {
                b.fresh(name, line, col)?;
                let sig = b.sig(line, col)?.clone();
                let env = b.env(&sig);
                let l = env.eval_poly(lhs)?;
                let r = env.eval_poly(rhs)?;
                let v = match l.jets().as_slice() {
                    [v] if Poly::jet(*v) == l => *v,
                    _ => return Err(lhs.error("left-hand side must be a single jet such as `u_t` or `q_xy`")),
                };
                let dirs: Vec<usize> = (0..sig.dims()).filter(|&d| v.index.get(d) > 0).collect();
                let kind = match (v.order(), dirs.as_slice()) {
                    (1, [t]) => EquationKind::Evolution { time: *t },
                    (2, [x, y]) => EquationKind::Hyperbolic { x: *x, y: *y },
                    _ => return Err(lhs.error("expected an evolution `q_t` or hyperbolic `q_xy` left-hand side")),
                };
                let eq = at(lhs.line, lhs.col, EquationNormalForm::new(kind, BTreeMap::from([(v.base(), r)])))?;
                b.equations.insert(name.clone(), eq);
            }
            StmtKind::System { name, fields, slots, equations, action } => {
                b.fresh(name, line, col)?;
                let sig = b.sig(line, col)?.clone();
                let env = b.env(&sig);
                let qs = b.field_jets(&sig, fields, line, col)?;
                if qs.iter().any(JetVar::is_odd) {
                    return Err(err_at(line, col, format!("field `{fields}` of a system must be even")));
                }
                let slot = sig.field(slots).ok_or_else(|| err_at(line, col, format!("unknown slot field `{slots}`")))?.clone();
                let act = action.as_ref().map(|a| env.eval_poly(a)).transpose()?;
                let sys = match (equations, act) {
                    (Some(e), act) => EquationSystem::new(qs, env.eval_tuple(e)?, act, slot.name),
                    (None, Some(act)) => EquationSystem::from_action(qs, act, slot.name),
                    (None, None) => unreachable!("parser requires equations or action"),
                };
                if sys.equations.len() != slot.components as usize {
                    return Err(err_at(
                        line,
                        col,
                        format!("{} equations but slot field `{slots}` has {} components", sys.equations.len(), slot.components),
                    ));
                }
                b.systems.insert(name.clone(), sys);
            }
            StmtKind::Pair { even, odd } => {
                let sig = b.sig(line, col)?.clone();
                let e = b.field_jets(&sig, even, line, col)?;
                let o = b.field_jets(&sig, odd, line, col)?;
                if e.iter().any(JetVar::is_odd) || o.iter().any(|v| !v.is_odd()) || e.len() != o.len() {
                    return Err(err_at(line, col, "`pair` needs an even field and an odd field of equal width"));
                }
                b.pairs.extend(e.into_iter().zip(o));
            }
            StmtKind::Task(t) => {
                b.fresh(&t.name, line, col)?;
                let bound = bind_task(&b, t, line, col)?;
                b.tasks.push(bound);
            }
        }
    }
    let sig = b.sig.clone().ok_or_else(|| err_at(1, 1, "scenario declares no `base`"))?;
    Ok(Problem { sig, ops: b.ops, lets: b.lets, pairing: Pairing::new(b.pairs), tasks: b.tasks })
}

fn arg<'a>(t: &'a TaskDecl, i: usize) -> &'a Expr {
    &t.args[i]
}

fn arg_ident<'a>(t: &'a TaskDecl, i: usize) -> Result<&'a str> {
    let e = arg(t, i);
    arg_name(e).ok_or_else(|| e.error("expected a name"))
}

fn system_ref(b: &Binder, t: &TaskDecl, line: usize, col: usize) -> Result<SystemRef> {
    let name = arg_ident(t, 0)?;
    let system = b.systems.get(name).cloned().ok_or_else(|| arg(t, 0).error(format!("unknown system `{name}`")))?;
    let rc = required(t, "relation", line, col)?;
    let rname = name_of(rc)?;
    let relation = b.relations.get(rname).cloned().ok_or_else(|| err_at(rc.line, rc.col, format!("unknown relation `{rname}`")))?;
    Ok(SystemRef { system, relation })
}

fn bv_names(t: &TaskDecl, sig: &Signature, line: usize, col: usize) -> Result<BvNames> {
    let get = |key: &str| -> Result<Symbol> {
        let c = required(t, key, line, col)?;
        let n = name_of(c)?;
        sig.field(n).map(|f| f.name).ok_or_else(|| err_at(c.line, c.col, format!("unknown field `{n}`")))
    };
    Ok(BvNames { ghost: get("ghost")?, antifield: get("antifield")?, antighost: get("antighost")? })
}

/// A signature with the two section fields `p1`, `p2` used in expected symbols.
pub fn with_sections(sig: &Signature) -> Signature {
    let mut s = sig.clone();
    for n in ["p1", "p2"] {
        if s.field(n).is_none() {
            s.add_field(n, 1, Parity::Even, None).expect("fresh section field");
        }
    }
    s
}

fn bind_task(b: &Binder, t: &TaskDecl, line: usize, col: usize) -> Result<Bound> {
    let sig = b.sig(line, col)?.clone();
    let env = b.env(&sig);
    let bound = int_of(t.clause("bound"));
    let mut deps = Vec::new();
    let job = match t.kind {
        TaskKind::CheckHamiltonian => {
            let op = env.eval_op(arg(t, 0))?;
            let target = b.single_jet(&sig, required(t, "target", line, col)?)?;
            let gc = required(t, "ghost", line, col)?;
            let ghost = name_of(gc)?.to_string();
            if sig.field(&ghost).is_some_and(|f| !f.parity.is_odd()) {
                return Err(err_at(gc.line, gc.col, format!("ghost `{ghost}` must be odd")));
            }
            Job::Hamiltonian { op, target, ghost, bound }
        }
        TaskKind::ExtractChristoffel => {
            let op = env.eval_op(arg(t, 0))?;
            let tc = required(t, "target", line, col)?;
            let targets = b.field_jets(&sig, name_of(tc)?, tc.line, tc.col)?;
            let coll = at(tc.line, tc.col, OperatorCollection::new(&sig, targets, vec![op]))?;
            let expect = match t.clause("expect") {
                Some(c) => {
                    let v = b.env(coll.signature()).eval_tuple(expr_of(c))?;
                    if v.len() != coll.width() {
                        return Err(err_at(c.line, c.col, format!("expected symbol needs {} components", coll.width())));
                    }
                    Some(v)
                }
                None => None,
            };
            Job::Christoffel { coll, bound, expect }
        }
        TaskKind::BuildQ => {
            let ghost_c = required(t, "ghost", line, col)?;
            let gname = name_of(ghost_c)?;
            let ghost = sig.field(gname).map(|f| f.name).ok_or_else(|| err_at(ghost_c.line, ghost_c.col, format!("unknown field `{gname}`")))?;
            let from = match t.clause("gamma") {
                None => {
                    let name = arg_ident(t, 0)?;
                    let i = b.task_index(name, TaskKind::ExtractChristoffel, arg(t, 0).line, arg(t, 0).col)?;
                    deps.push(i);
                    QSource::Task(i)
                }
                Some(gc) => {
                    let op = env.eval_op(arg(t, 0))?;
                    let tc = required(t, "target", line, col)?;
                    let targets = b.field_jets(&sig, name_of(tc)?, tc.line, tc.col)?;
                    let coll = at(tc.line, tc.col, OperatorCollection::new(&sig, targets, vec![op]))?;
                    let v = b.env(coll.signature()).eval_tuple(expr_of(gc))?;
                    let gamma = at(gc.line, gc.col, coll.symbol_from_bilinear(&v))?;
                    QSource::Given { coll, gamma }
                }
            };
            let mut expect = Vec::new();
            if let Some(c) = t.clause("expect") {
                let ClauseValue::Keyed(items) = &c.value else { unreachable!("keyed clause") };
                for (name, comp, e) in items {
                    let f = sig.field(name).ok_or_else(|| e.error(format!("unknown field `{name}`")))?;
                    let k = comp.unwrap_or(0);
                    if k >= f.components || (comp.is_none() && f.components != 1) {
                        return Err(e.error(format!("`{name}` needs a valid component index")));
                    }
                    expect.push((JetVar::new(f.name, k, MultiIndex::ZERO, f.parity), env.eval_poly(e)?));
                }
            }
            Job::BuildQ { from, ghost, expect }
        }
        TaskKind::VerifyQ2 => {
            let name = arg_ident(t, 0)?;
            let i = b.task_index(name, TaskKind::BuildQ, arg(t, 0).line, arg(t, 0).col)?;
            deps.push(i);
            Job::VerifyQ2 { from: i }
        }
        TaskKind::Schouten => {
            if b.pairs.is_empty() {
                return Err(err_at(line, col, "`schouten` needs `pair` declarations"));
            }
            let w1 = env.eval_poly(arg(t, 0))?;
            let w2 = env.eval_poly(arg(t, 1))?;
            for (w, e) in [(&w1, arg(t, 0)), (&w2, arg(t, 1))] {
                if w.parity().is_none() {
                    return Err(e.error("superfunctional has mixed parity"));
                }
            }
            let expect = t.clause("expect").map(|c| env.eval_poly(expr_of(c))).transpose()?;
            let charge = match (t.clause("charge-of"), t.clause("equals")) {
                (Some(c), Some(q)) => {
                    let i = b.task_index(name_of(q)?, TaskKind::BuildQ, q.line, q.col)?;
                    deps.push(i);
                    Some((env.eval_poly(expr_of(c))?, i))
                }
                (None, None) => None,
                (Some(c), None) | (None, Some(c)) => {
                    return Err(err_at(c.line, c.col, "`charge-of` and `equals` go together"));
                }
            };
            Job::Schouten { w1, w2, expect, charge }
        }
        TaskKind::Noether => {
            let sys = system_ref(b, t, line, col)?;
            let expect = t.clause("expect").map(|c| env.eval_op(expr_of(c))).transpose()?;
            Job::Noether { sys, expect }
        }
        TaskKind::Brst => {
            let sys = system_ref(b, t, line, col)?;
            let names = bv_names(t, &sig, line, col)?;
            let expect = match t.clause("expect") {
                Some(c) => {
                    let s = with_sections(&sig);
                    Some(b.env(&s).eval_tuple(expr_of(c))?)
                }
                None => None,
            };
            let nabla = t.clause("nabla").map(|c| env.eval_op(expr_of(c))).transpose()?;
            Job::Brst { sys, names, bound, expect, nabla }
        }
        TaskKind::BvMaster => {
            let sys = system_ref(b, t, line, col)?;
            let names = bv_names(t, &sig, line, col)?;
            let generator = t.clause("generator").map(|c| env.eval_op(expr_of(c))).transpose()?;
            let degree = int_of(t.clause("degree")).unwrap_or(3);
            Job::BvMaster { sys, names, generator, degree }
        }
        TaskKind::Search => Job::Search(bind_search(b, t, &sig, line, col)?),
        TaskKind::OnShell => {
            let name = arg_ident(t, 0)?;
            let eq = b.equations.get(name).cloned().ok_or_else(|| arg(t, 0).error(format!("unknown equation `{name}`")))?;
            let expr = env.eval_poly(expr_of(required(t, "of", line, col)?))?;
            let expect = t.clause("expect").map(|c| env.eval_poly(expr_of(c))).transpose()?;
            Job::OnShell { eq, expr, expect }
        }
    };
    Ok(Bound { name: t.name.clone(), kind: t.kind, deps, job })
}

fn bind_search(b: &Binder, t: &TaskDecl, sig: &Signature, line: usize, col: usize) -> Result<SearchJob> {
    let weight = int_of(t.clause("weight"));
    let u = sig.field("u");
    let line_ok = sig.base().len() == 1 && sig.base()[0].as_str() == "x";
    if !line_ok || u.is_none_or(|f| f.parity.is_odd() || f.components != 1) {
        return Err(err_at(line, col, "`search` works on `base x` with an even scalar field `u`"));
    }
    if weight.is_some() && u.and_then(|f| f.weight.clone()) != Some(Rational::from_integer(2.into())) {
        return Err(err_at(line, col, "`search` by weight needs `field u even weight 2`"));
    }
    if weight == Some(0) {
        return Err(err_at(line, col, "weight must be at least 1"));
    }
    let formal = t.clause("formal").is_some();
    if formal && !sig.is_func("f") {
        return Err(err_at(line, col, "`formal` needs `func f`"));
    }
    let ext = with_sections(sig);
    let env = b.env(sig);
    let genv = b.env(&ext);
    let mut cases = Vec::new();
    for c in t.all("expect") {
        let ClauseValue::Case(op, gamma) = &c.value else { unreachable!("case clause") };
        let o = env.eval_op(op)?;
        if !o.is_scalar() {
            return Err(op.error("search operators are scalar"));
        }
        let g = gamma.as_ref().map(|g| genv.eval_poly(g)).transpose()?;
        cases.push(Case { text: render::op(sig, &o), op: o, gamma: g });
    }
    let mut represent = Vec::new();
    if let Some(c) = t.clause("represent") {
        let ClauseValue::Exprs(v) = &c.value else { unreachable!("expression list") };
        for e in v {
            let o = env.eval_op(e)?;
            represent.push(Case { text: render::op(sig, &o), op: o, gamma: None });
        }
    }
    if weight.is_none() && cases.is_empty() {
        return Err(err_at(line, col, "`search` needs a `weight` or `expect` cases to verify"));
    }
    Ok(SearchJob { weight, order: int_of(t.clause("order")), formal, splits: int_of(t.clause("splits")).unwrap_or(3), cases, represent })
}
