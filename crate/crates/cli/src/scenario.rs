//! Scenario files: statements, task declarations and their parser.

use varlie_core::algebra::Parity;
use varlie_core::text::{describe, parse_expr, Expr, Tok, Tokens};
use varlie_core::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub stmts: Vec<Stmt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StmtKind {
    Base(Vec<String>),
    Field { name: String, components: u16, parity: Parity, weight: Option<Expr> },
    Func(String),
    Op { name: String, expr: Expr },
    Let { name: String, expr: Expr },
    /// `equation E: q_xy = exp(2*q);`
    Equation { name: String, lhs: Expr, rhs: Expr },
    /// `system M fields A slots F [equations [...]] [action S];`
    System { name: String, fields: String, slots: String, equations: Option<Expr>, action: Option<Expr> },
    Relation { name: String, expr: Expr },
    Pair { even: String, odd: String },
    Task(TaskDecl),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TaskKind {
    CheckHamiltonian,
    ExtractChristoffel,
    BuildQ,
    VerifyQ2,
    Schouten,
    Noether,
    Brst,
    BvMaster,
    Search,
    OnShell,
}

/// How a clause value is read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    Flag,
    Name,
    Int,
    Expr,
    /// `expr` or `key = expr, key = expr`
    Keyed,
    /// `expr (gamma expr)?`, repeatable
    Case,
    /// `expr, expr, ...`
    Exprs,
}

impl TaskKind {
    pub const ALL: [TaskKind; 10] = [
        TaskKind::CheckHamiltonian,
        TaskKind::ExtractChristoffel,
        TaskKind::BuildQ,
        TaskKind::VerifyQ2,
        TaskKind::Schouten,
        TaskKind::Noether,
        TaskKind::Brst,
        TaskKind::BvMaster,
        TaskKind::Search,
        TaskKind::OnShell,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::CheckHamiltonian => "check-hamiltonian",
            TaskKind::ExtractChristoffel => "extract-christoffel",
            TaskKind::BuildQ => "build-q",
            TaskKind::VerifyQ2 => "verify-q2",
            TaskKind::Schouten => "schouten",
            TaskKind::Noether => "noether",
            TaskKind::Brst => "brst",
            TaskKind::BvMaster => "bv-master",
            TaskKind::Search => "search",
            TaskKind::OnShell => "on-shell",
        }
    }

    pub fn from_name(s: &str) -> Option<TaskKind> {
        TaskKind::ALL.into_iter().find(|k| k.as_str() == s)
    }

    fn positional(self) -> usize {
        match self {
            TaskKind::Search => 0,
            TaskKind::Schouten => 2,
            _ => 1,
        }
    }

    fn clauses(self) -> &'static [(&'static str, Shape)] {
        use Shape::*;
        match self {
            TaskKind::CheckHamiltonian => &[("target", Name), ("ghost", Name), ("bound", Int)],
            TaskKind::ExtractChristoffel => &[("target", Name), ("bound", Int), ("expect", Expr)],
            TaskKind::BuildQ => &[("target", Name), ("ghost", Name), ("gamma", Expr), ("expect", Keyed)],
            TaskKind::VerifyQ2 => &[],
            TaskKind::Schouten => &[("expect", Expr), ("charge-of", Expr), ("equals", Name)],
            TaskKind::Noether => &[("relation", Name), ("expect", Expr)],
            TaskKind::Brst => &[
                ("relation", Name),
                ("ghost", Name),
                ("antifield", Name),
                ("antighost", Name),
                ("bound", Int),
                ("expect", Expr),
                ("nabla", Expr),
            ],
            TaskKind::BvMaster => &[
                ("relation", Name),
                ("ghost", Name),
                ("antifield", Name),
                ("antighost", Name),
                ("generator", Expr),
                ("degree", Int),
            ],
            TaskKind::Search => &[
                ("weight", Int),
                ("order", Int),
                ("splits", Int),
                ("formal", Flag),
                ("expect", Case),
                ("represent", Exprs),
            ],
            TaskKind::OnShell => &[("of", Expr), ("expect", Expr)],
        }
    }

    fn shape(self, key: &str) -> Option<Shape> {
        self.clauses().iter().find(|(k, _)| *k == key).map(|(_, s)| *s)
    }

    pub fn is_clause(self, key: &str) -> bool {
        self.shape(key).is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskDecl {
    pub name: String,
    pub kind: TaskKind,
    pub args: Vec<Expr>,
    pub clauses: Vec<Clause>,
}

impl TaskDecl {
    pub fn clause(&self, key: &str) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.key == key)
    }

    pub fn all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a Clause> + 'a {
        self.clauses.iter().filter(move |c| c.key == key)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub key: String,
    pub value: ClauseValue,
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClauseValue {
    Flag,
    Name(String),
    Int(u32),
    Expr(Expr),
    /// Named targets, e.g. `w = ..., b = ...`; the key may carry a component `A[1]`.
    Keyed(Vec<(String, Option<u16>, Expr)>),
    Case(Expr, Option<Expr>),
    Exprs(Vec<Expr>),
}

/// Parses a whole scenario file.
pub fn parse(src: &str) -> Result<Scenario> {
    let mut t = Tokens::new(src)?;
    let mut stmts = Vec::new();
    while !t.at_eof() {
        stmts.push(statement(&mut t)?);
    }
    Ok(Scenario { stmts })
}

fn small(t: &mut Tokens, what: &str) -> Result<u32> {
    let tok = t.peek().clone();
    let n = t.expect_int()?;
    u32::try_from(n).map_err(|_| Error::parse(tok.line, tok.col, format!("{what} out of range")))
}

fn statement(t: &mut Tokens) -> Result<Stmt> {
    let head = t.peek().clone();
    let (line, col) = (head.line, head.col);
    let (kw, _, _) = t.expect_ident()?;
    let kind = match kw.as_str() {
        "base" => {
            let mut names = Vec::new();
            while !t.is_punct(";") {
                let (n, l, c) = t.expect_ident()?;
                if n.chars().count() != 1 {
                    return Err(Error::parse(l, c, format!("base coordinate `{n}` must be a single letter")));
                }
                names.push(n);
            }
            if names.is_empty() {
                return Err(t.error_here("expected at least one base coordinate"));
            }
            StmtKind::Base(names)
        }
        "field" => {
            let (name, _, _) = t.expect_ident()?;
            let mut components = 1u16;
            if t.eat_punct("[") {
                let tok = t.peek().clone();
                let n = small(t, "component count")?;
                if n == 0 || n > u16::MAX as u32 {
                    return Err(Error::parse(tok.line, tok.col, "component count must be positive"));
                }
                components = n as u16;
                t.expect_punct("]")?;
            }
            let parity = if t.eat_ident("even") {
                Parity::Even
            } else if t.eat_ident("odd") {
                Parity::Odd
            } else {
                return Err(t.error_here(format!("expected `even` or `odd`, found {}", describe(&t.peek().tok))));
            };
            let weight = if t.eat_ident("weight") { Some(parse_expr(t)?) } else { None };
            StmtKind::Field { name, components, parity, weight }
        }
        "func" => StmtKind::Func(t.expect_ident()?.0),
        "op" | "let" | "relation" => {
            let (name, _, _) = t.expect_name()?;
            t.expect_punct("=")?;
            let expr = parse_expr(t)?;
            match kw.as_str() {
                "op" => StmtKind::Op { name, expr },
                "let" => StmtKind::Let { name, expr },
                _ => StmtKind::Relation { name, expr },
            }
        }
        "equation" => {
            let (name, _, _) = t.expect_name()?;
            t.expect_punct(":")?;
            let lhs = parse_expr(t)?;
            t.expect_punct("=")?;
            let rhs = parse_expr(t)?;
            StmtKind::Equation { name, lhs, rhs }
        }
        "system" => {
            let (name, _, _) = t.expect_name()?;
            t.expect_keyword("fields")?;
            let fields = t.expect_ident()?.0;
            t.expect_keyword("slots")?;
            let slots = t.expect_ident()?.0;
            let mut equations = None;
            let mut action = None;
            loop {
                if t.eat_ident("equations") {
                    equations = Some(parse_expr(t)?);
                } else if t.eat_ident("action") {
                    action = Some(parse_expr(t)?);
                } else {
                    break;
                }
            }
            if equations.is_none() && action.is_none() {
                return Err(t.error_here("a system needs `equations` or an `action`"));
            }
            StmtKind::System { name, fields, slots, equations, action }
        }
        "pair" => {
            let even = t.expect_ident()?.0;
            t.expect_keyword("with")?;
            let odd = t.expect_ident()?.0;
            StmtKind::Pair { even, odd }
        }
        "task" => StmtKind::Task(task(t)?),
        other => return Err(Error::parse(line, col, format!("unknown statement `{other}`"))),
    };
    t.expect_punct(";")?;
    Ok(Stmt { kind, line, col })
}

fn at_clause(t: &Tokens, kind: TaskKind) -> bool {
    match &t.peek().tok {
        Tok::Ident(s) => {
            let mut key = s.clone();
            if matches!(t.peek_at(1).tok, Tok::Punct("-")) && t.adjacent(0) && t.adjacent(1) {
                if let Tok::Ident(rest) = &t.peek_at(2).tok {
                    key = format!("{s}-{rest}");
                }
            }
            kind.is_clause(&key)
        }
        _ => false,
    }
}

fn task(t: &mut Tokens) -> Result<TaskDecl> {
    let (name, _, _) = t.expect_name()?;
    t.expect_punct("=")?;
    let head = t.peek().clone();
    let (kname, _, _) = t.expect_name()?;
    let kind = TaskKind::from_name(&kname)
        .ok_or_else(|| Error::parse(head.line, head.col, format!("unknown task kind `{kname}`")))?;
    let mut args = Vec::new();
    for _ in 0..kind.positional() {
        if at_clause(t, kind) || t.is_punct(";") {
            return Err(t.error_here(format!("`{kname}` takes {} argument(s)", kind.positional())));
        }
        args.push(parse_expr(t)?);
    }
    let mut clauses: Vec<Clause> = Vec::new();
    while !t.is_punct(";") {
        let tok = t.peek().clone();
        let (key, _, _) = t.expect_name()?;
        let shape = kind
            .shape(&key)
            .ok_or_else(|| Error::parse(tok.line, tok.col, format!("`{kname}` has no clause `{key}`")))?;
        if !matches!(shape, Shape::Case) && clauses.iter().any(|c| c.key == key) {
            return Err(Error::parse(tok.line, tok.col, format!("clause `{key}` given twice")));
        }
        let value = match shape {
            Shape::Flag => ClauseValue::Flag,
            Shape::Name => ClauseValue::Name(t.expect_ident()?.0),
            Shape::Int => ClauseValue::Int(small(t, &key)?),
            Shape::Expr => ClauseValue::Expr(parse_expr(t)?),
            Shape::Keyed => keyed(t)?,
            Shape::Case => {
                let op = parse_expr(t)?;
                let gamma = if t.eat_ident("gamma") { Some(parse_expr(t)?) } else { None };
                ClauseValue::Case(op, gamma)
            }
            Shape::Exprs => {
                let mut v = vec![parse_expr(t)?];
                while t.eat_punct(",") {
                    v.push(parse_expr(t)?);
                }
                ClauseValue::Exprs(v)
            }
        };
        clauses.push(Clause { key, value, line: tok.line, col: tok.col });
    }
    Ok(TaskDecl { name, kind, args, clauses })
}

fn keyed_head(t: &Tokens) -> bool {
    match (&t.peek().tok, &t.peek_at(1).tok) {
        (Tok::Ident(_), Tok::Punct("=")) => true,
        (Tok::Ident(_), Tok::Punct("[")) => {
            matches!(t.peek_at(2).tok, Tok::Int(_))
                && matches!(t.peek_at(3).tok, Tok::Punct("]"))
                && matches!(t.peek_at(4).tok, Tok::Punct("="))
        }
        _ => false,
    }
}

fn keyed(t: &mut Tokens) -> Result<ClauseValue> {
    if !keyed_head(t) {
        return Err(t.error_here("expected `field = expression`"));
    }
    let mut items = Vec::new();
    loop {
        let (name, _, _) = t.expect_ident()?;
        let mut comp = None;
        if t.eat_punct("[") {
            comp = Some(small(t, "component")? as u16);
            t.expect_punct("]")?;
        }
        t.expect_punct("=")?;
        items.push((name, comp, parse_expr(t)?));
        if !t.eat_punct(",") {
            break;
        }
    }
    Ok(ClauseValue::Keyed(items))
}

/// Extracts a bare name from an argument expression such as `A2` or `gam`.
pub fn arg_name(e: &Expr) -> Option<&str> {
    match &e.kind {
        varlie_core::text::ExprKind::Var { name, comp: None, suffix } if suffix.is_empty() => Some(name),
        _ => None,
    }
}
