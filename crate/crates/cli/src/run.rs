//! Execution of bound tasks: dependency waves in parallel, reports in file order.

use std::collections::BTreeSet;
use std::time::Instant;

use rayon::prelude::*;

use varlie_core::algebra::{rat, JetVar, MultiIndex, Poly, Signature, Symbol};
use varlie_core::algebroid::{BiDiffSymbol, Homological, OperatorCollection, SolveOptions};
use varlie_core::diffop::TotalDiffOperator;
use varlie_core::gauge::{
    bv_action, bv_master_check, bv_pairing, brst_lift, generator_from_relation, helmholtz_check, koszul_tate,
    linear_noether_relation, noether_check, solve_nabla, BvNames, CorrectionAnsatz,
};
use varlie_core::jet::{cohomology_equal, is_trivial_class, EvolutionaryField};
use varlie_core::poisson::{field_of_charge, is_hamiltonian, schouten};
use varlie_core::search::{check_operator, search_weight, SearchOptions, WeightResult};
use varlie_core::text::render;
use varlie_core::Result;

use crate::bind::{Bound, Case, Job, Problem, QSource, SearchJob, SystemRef};
use crate::report::{Report, Status, TaskReport};

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Overrides every task's order bound.
    pub order_bound: Option<u32>,
    /// Used when neither the command line nor the task gives a bound.
    pub default_bound: Option<u32>,
    pub timing: bool,
}

impl RunOptions {
    fn bound(&self, task: Option<u32>) -> Option<u32> {
        self.order_bound.or(task).or(self.default_bound)
    }
}

/// Results a later task may consume.
#[derive(Clone, Debug)]
enum Artifact {
    Gamma { coll: OperatorCollection, gamma: BiDiffSymbol },
    Q { coll: OperatorCollection, q: EvolutionaryField, ghost: Symbol },
}

type Outcome = (TaskReport, Option<Artifact>);

/// Runs every task; independent tasks of the same dependency depth run in parallel.
pub fn run(name: &str, p: &Problem, opts: &RunOptions) -> Report {
    let n = p.tasks.len();
    let mut depth = vec![0usize; n];
    for i in 0..n {
        depth[i] = p.tasks[i].deps.iter().map(|&d| depth[d] + 1).max().unwrap_or(0);
    }
    let mut done: Vec<Option<Outcome>> = vec![None; n];
    let max = depth.iter().copied().max().unwrap_or(0);
    for level in 0..=max {
        let wave: Vec<usize> = (0..n).filter(|&i| depth[i] == level).collect();
        let results: Vec<(usize, Outcome)> = wave
            .par_iter()
            .map(|&i| {
                let deps: Vec<Option<&Artifact>> =
                    p.tasks[i].deps.iter().map(|&d| done[d].as_ref().and_then(|o| o.1.as_ref())).collect();
                (i, run_task(p, &p.tasks[i], &deps, opts))
            })
            .collect();
        for (i, o) in results {
            done[i] = Some(o);
        }
    }
    Report::new(name, done.into_iter().map(|o| o.expect("every task ran").0).collect())
}

fn run_task(p: &Problem, t: &Bound, deps: &[Option<&Artifact>], opts: &RunOptions) -> Outcome {
    let start = Instant::now();
    let mut r = TaskReport::new(&t.name, t.kind.as_str());
    let art = if let Some(k) = deps.iter().position(Option::is_none) {
        let dep = &p.tasks[t.deps[k]].name;
        r.check("dependencies", Status::Inconclusive, Some(format!("task `{dep}` produced no result")));
        None
    } else {
        let deps: Vec<&Artifact> = deps.iter().map(|d| d.unwrap()).collect();
        match execute(p, &t.job, &deps, opts, &mut r) {
            Ok(a) => a,
            Err(e) => {
                r.check("evaluation", Status::Fail, Some(e.to_string()));
                None
            }
        }
    };
    if opts.timing {
        r.millis = Some(start.elapsed().as_millis());
    }
    let r = r.finish();
    let art = if r.status == Status::Pass { art } else { None };
    (r, art)
}

fn homological_check(r: &mut TaskReport, h: Homological) {
    let (s, d) = match h {
        Homological::ExactZero => (Status::Pass, "exact zero"),
        Homological::ZeroModuloKernel => (Status::Pass, "zero modulo the anchor kernel"),
        Homological::Failed => (Status::Fail, "nonzero"),
    };
    r.check("Q^2 = 0", s, Some(d.to_string()));
}

fn residual_text(sig: &Signature, res: &[Poly]) -> String {
    format!("residual {}", render::tuple(sig, res))
}

fn execute(p: &Problem, job: &Job, deps: &[&Artifact], opts: &RunOptions, r: &mut TaskReport) -> Result<Option<Artifact>> {
    let sig = &p.sig;
    match job {
        Job::Hamiltonian { op, target, ghost, bound } => {
            let b = opts.bound(*bound);
            let rep = is_hamiltonian(sig, *target, op, ghost, SolveOptions::with_bound(b))?;
            r.pass_if("skew-adjoint", rep.skew_adjoint);
            if let Some(d) = &rep.extraction {
                let mut ext = sig.clone();
                if ext.field(ghost).is_none() {
                    ext.add_field(ghost, op.cols() as u16, varlie_core::algebra::Parity::Odd, None)?;
                }
                let coll = OperatorCollection::single(&ext, *target, op.clone())?;
                r.order_bound = Some(d.order_bound);
                r.object("ansatz size", d.ansatz_size.to_string());
                if d.is_exact() {
                    r.check("Christoffel extraction", Status::Pass, None);
                    r.object("gamma", render::tuple(coll.signature(), &coll.bilinear(&d.c)));
                } else {
                    r.check("Christoffel extraction", Status::Inconclusive, Some(residual_text(coll.signature(), &d.residual)));
                }
            }
            if let Some(h) = rep.homological {
                homological_check(r, h);
            }
            Ok(None)
        }
        Job::Christoffel { coll, bound, expect } => {
            let d = coll.christoffel_extract(SolveOptions::with_bound(opts.bound(*bound)));
            r.order_bound = Some(d.order_bound);
            r.object("ansatz size", d.ansatz_size.to_string());
            if !d.is_exact() {
                r.check("Christoffel extraction", Status::Inconclusive, Some(residual_text(coll.signature(), &d.residual)));
                return Ok(None);
            }
            r.check("Christoffel extraction", Status::Pass, None);
            let ours = coll.bilinear(&d.c);
            r.object("gamma", render::tuple(coll.signature(), &ours));
            if let Some(e) = expect {
                let ok = coll.wide().apply(e) == coll.wide().apply(&ours);
                let detail = if ok { None } else { Some(format!("expected {}", render::tuple(coll.signature(), e))) };
                r.check("matches expected symbol modulo the kernel", Status::from_bool(ok), detail);
            }
            Ok(Some(Artifact::Gamma { coll: coll.clone(), gamma: d.c }))
        }
        Job::BuildQ { from, ghost, expect } => {
            let (coll, gamma) = match from {
                QSource::Task(_) => match deps[0] {
                    Artifact::Gamma { coll, gamma } => (coll.clone(), gamma.clone()),
                    Artifact::Q { .. } => unreachable!("binder checks task kinds"),
                },
                QSource::Given { coll, gamma } => (coll.clone(), gamma.clone()),
            };
            let q = coll.build_q(&gamma, *ghost)?;
            for (v, s) in q.sections() {
                r.object(format!("Q({})", render::jet(coll.signature(), v)), render::poly(coll.signature(), s));
            }
            if expect.is_empty() {
                r.check("built", Status::Pass, None);
            }
            for (v, want) in expect {
                let got = q.section(v);
                let name = format!("Q({}) as expected", render::jet(sig, v));
                let detail = (got != *want).then(|| format!("got {}", render::poly(coll.signature(), &got)));
                r.check(name, Status::from_bool(detail.is_none()), detail);
            }
            Ok(Some(Artifact::Q { coll, q, ghost: *ghost }))
        }
        Job::VerifyQ2 { .. } => {
            let Artifact::Q { coll, q, ghost } = deps[0] else { unreachable!("binder checks task kinds") };
            let rep = coll.verify_homological(q, *ghost)?;
            homological_check(r, rep.outcome);
            for (v, s) in rep.square.sections() {
                if !s.is_zero() {
                    r.object(format!("Q^2({})", render::jet(coll.signature(), v)), render::poly(coll.signature(), s));
                }
            }
            Ok(None)
        }
        Job::Schouten { w1, w2, expect, charge } => {
            let b = schouten(w1, w2, &p.pairing);
            r.object("bracket", render::poly(sig, &b));
            if let Some(e) = expect {
                let ok = cohomology_equal(&b, e);
                let detail = (!ok).then(|| format!("expected {}", render::poly(sig, e)));
                r.check("bracket equals expected in cohomology", Status::from_bool(ok), detail);
            }
            if let Some((omega, _)) = charge {
                let Artifact::Q { q, coll, .. } = deps[0] else { unreachable!("binder checks task kinds") };
                let x = field_of_charge(omega, &p.pairing);
                let diff = field_mismatch(&x, q);
                let detail = (!diff.is_empty()).then(|| {
                    let v: Vec<String> = diff.iter().map(|v| render::jet(coll.signature(), v)).collect();
                    format!("differs on {}", v.join(", "))
                });
                r.check("field of the charge equals Q", Status::from_bool(diff.is_empty()), detail);
            }
            if expect.is_none() && charge.is_none() {
                r.check("computed", Status::Pass, None);
            }
            Ok(None)
        }
        Job::Noether { sys, expect } => {
            noether(sig, sys, expect.as_ref(), r)?;
            Ok(None)
        }
        Job::Brst { sys, names, bound, expect, nabla } => {
            brst(sig, sys, *names, opts.bound(*bound), expect.as_deref(), nabla.as_ref(), r)?;
            Ok(None)
        }
        Job::BvMaster { sys, names, generator, degree } => {
            bv_master(sig, sys, *names, generator.as_ref(), *degree, opts, r)?;
            Ok(None)
        }
        Job::Search(s) => {
            search(sig, s, r)?;
            Ok(None)
        }
        Job::OnShell { eq, expr, expect } => {
            let red = eq.reduce(expr)?;
            r.object("reduced", render::poly(sig, &red));
            let alt = eq.reduce_alternate(expr)?;
            r.pass_if("confluent", alt == red);
            r.pass_if("normal form", red.jets().iter().all(|v| !eq.is_reducible(v)));
            if let Some(e) = expect {
                let ok = red == *e;
                let detail = (!ok).then(|| format!("expected {}", render::poly(sig, e)));
                r.check("reduces to expected", Status::from_bool(ok), detail);
            }
            Ok(None)
        }
    }
}

fn field_mismatch(a: &EvolutionaryField, b: &EvolutionaryField) -> Vec<JetVar> {
    let keys: BTreeSet<JetVar> = a.sections().keys().chain(b.sections().keys()).copied().collect();
    keys.into_iter().filter(|v| a.section(v) != b.section(v)).collect()
}

fn noether(sig: &Signature, s: &SystemRef, expect: Option<&TotalDiffOperator>, r: &mut TaskReport) -> Result<()> {
    let e = &s.system;
    if e.action.is_some() {
        r.pass_if("Euler-Lagrange system of the action", e.is_euler_lagrange());
        r.pass_if("Helmholtz self-adjointness", helmholtz_check(e));
    }
    r.pass_if("relation vanishes off-shell", noether_check(&s.relation, e));
    let gen = generator_from_relation(sig, &s.relation, e);
    r.object("generator", render::op(sig, &gen));
    r.pass_if("generator annihilates the equations", linear_noether_relation(&gen, e));
    if let Some(want) = expect {
        let ok = gen == *want;
        let detail = (!ok).then(|| format!("expected {}", render::op(sig, want)));
        r.check("generator as expected", Status::from_bool(ok), detail);
    }
    if let Some(act) = &e.action {
        let coll = OperatorCollection::new(sig, e.fields.clone(), vec![gen])?;
        let x = coll.anchor_field(&coll.section(0));
        r.pass_if("action invariant up to divergence", is_trivial_class(&x.apply(act)));
    }
    Ok(())
}

struct Gauge {
    coll: OperatorCollection,
    gamma: BiDiffSymbol,
    gen: TotalDiffOperator,
}

/// The generator, its collection and extracted symbol; `None` when extraction is inconclusive.
fn gauge_algebra(sig: &Signature, s: &SystemRef, bound: Option<u32>, r: &mut TaskReport) -> Result<Option<Gauge>> {
    let gen = generator_from_relation(sig, &s.relation, &s.system);
    r.object("generator", render::op(sig, &gen));
    let coll = OperatorCollection::new(sig, s.system.fields.clone(), vec![gen.clone()])?;
    let d = coll.christoffel_extract(SolveOptions::with_bound(bound));
    r.order_bound = Some(d.order_bound);
    if !d.is_exact() {
        r.check("Christoffel extraction", Status::Inconclusive, Some(residual_text(coll.signature(), &d.residual)));
        return Ok(None);
    }
    r.check("Christoffel extraction", Status::Pass, None);
    r.object("gamma", render::tuple(coll.signature(), &coll.bilinear(&d.c)));
    Ok(Some(Gauge { coll, gamma: d.c, gen }))
}

fn ghost_image(g: &Gauge, names: BvNames) -> Result<Vec<Poly>> {
    let f = g
        .coll
        .signature()
        .field_of(names.ghost)
        .ok_or_else(|| varlie_core::Error::Unknown(names.ghost.to_string()))?;
    let ghosts: Vec<Poly> = (0..f.components).map(|k| Poly::jet(JetVar::new(f.name, k, MultiIndex::ZERO, f.parity))).collect();
    g.gen.try_apply(&ghosts)
}

/// `D = d_KT + Q~`, or `None` when no compensator exists within the bound.
fn differential(g: &Gauge, s: &SystemRef, names: BvNames, bound: Option<u32>, r: &mut TaskReport) -> Result<Option<(EvolutionaryField, EvolutionaryField, TotalDiffOperator)>> {
    let ag = ghost_image(g, names)?;
    let Some(nabla) = solve_nabla(g.coll.signature(), &ag, &s.system, bound)? else {
        r.check("compensator", Status::Inconclusive, Some("no solution within the order bound".into()));
        return Ok(None);
    };
    r.check("compensator", Status::Pass, None);
    r.object("nabla", render::op(g.coll.signature(), &nabla));
    let q = brst_lift(&g.coll, &g.gamma, &s.system, names, &nabla)?;
    let kt = koszul_tate(&g.coll, &s.system, names)?;
    Ok(Some((q, kt, nabla)))
}

fn brst(
    sig: &Signature,
    s: &SystemRef,
    names: BvNames,
    bound: Option<u32>,
    expect: Option<&[Poly]>,
    want_nabla: Option<&TotalDiffOperator>,
    r: &mut TaskReport,
) -> Result<()> {
    let Some(g) = gauge_algebra(sig, s, bound, r)? else { return Ok(()) };
    if let Some(e) = expect {
        let ours = g.coll.bilinear(&g.gamma);
        let ok = e.len() == ours.len() && g.coll.wide().apply(e) == g.coll.wide().apply(&ours);
        let detail = (!ok).then(|| format!("expected {}", render::tuple(g.coll.signature(), e)));
        r.check("gamma matches expected modulo the kernel", Status::from_bool(ok), detail);
    }
    let Some((q, kt, nabla)) = differential(&g, s, names, bound, r)? else { return Ok(()) };
    if let Some(want) = want_nabla {
        let ok = nabla == *want || (want.is_zero() && nabla.is_zero());
        r.check("nabla as expected", Status::from_bool(ok), None);
    }
    let base = g.coll.build_q(&g.gamma, names.ghost)?;
    let on_base = q.restrict(|v| v.field != names.antifield && v.field != names.antighost);
    r.pass_if("lift restricts to Q on fields and ghosts", field_mismatch(&on_base, &base).is_empty());
    r.pass_if("[Q~, Q~] = 0", q.square().is_zero());
    r.pass_if("d_KT^2 = 0", kt.square().is_zero());
    let d = kt.add(&q);
    r.pass_if("D^2 = 0", d.square().is_zero());
    for (v, sec) in d.sections() {
        r.object(format!("D({})", render::jet(g.coll.signature(), v)), render::poly(g.coll.signature(), sec));
    }
    Ok(())
}

fn bv_master(
    sig: &Signature,
    s: &SystemRef,
    names: BvNames,
    generator: Option<&TotalDiffOperator>,
    degree: u32,
    opts: &RunOptions,
    r: &mut TaskReport,
) -> Result<()> {
    let bound = opts.bound(None);
    let Some(g) = gauge_algebra(sig, s, bound, r)? else { return Ok(()) };
    let used = match generator {
        Some(op) => {
            r.note("ghost term built from the given generator, not the one derived from the relation");
            OperatorCollection::new(sig, s.system.fields.clone(), vec![op.clone()])?
        }
        None => g.coll.clone(),
    };
    let s_bv = bv_action(&used, &g.gamma, &s.system, names)?;
    r.object("S_BV", render::poly(g.coll.signature(), &s_bv));
    let pairing = bv_pairing(g.coll.signature(), &s.system, names)?;
    let mut ghosts = vec![(names.ghost, 1), (names.antifield, -1), (names.antighost, -2)];
    if let Some(f) = s.system.fields.first() {
        ghosts.insert(0, (f.field, 0));
    }
    let mut ans = CorrectionAnsatz::new(ghosts);
    ans.min_degree = degree;
    ans.max_degree = degree;
    let rep = bv_master_check(g.coll.signature(), &s_bv, &pairing, &ans);
    r.object("[[S, S]]", render::poly(g.coll.signature(), &rep.bracket));
    if rep.bracket_trivial {
        r.check("[[S, S]] trivial", Status::Pass, None);
    } else {
        r.check("[[S, S]] trivial", Status::Fail, Some(format!("corrections tried: {} monomials of degree {degree}", rep.ansatz_size)));
        if rep.passed {
            r.object("corrections", render::poly(g.coll.signature(), &rep.corrections));
        }
    }
    r.pass_if("master equation", rep.passed);
    if generator.is_none() && rep.bracket_trivial {
        if let Some((q, kt, _)) = differential(&g, s, names, bound, r)? {
            let d = kt.add(&q);
            let x = field_of_charge(&-s_bv, &pairing);
            let neg = x.neg();
            let mut same = Vec::new();
            let mut flipped = Vec::new();
            let mut other = Vec::new();
            let keys: BTreeSet<JetVar> = d.sections().keys().chain(x.sections().keys()).copied().collect();
            for v in keys {
                let (dv, xv) = (d.section(&v), x.section(&v));
                if dv == xv {
                    same.push(v.field);
                } else if neg.section(&v) == dv {
                    flipped.push(v.field);
                } else {
                    other.push(v.field);
                }
            }
            let names_of = |v: &mut Vec<Symbol>| {
                v.dedup();
                v.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
            };
            r.pass_if("field of -S_BV matches D up to sector signs", other.is_empty());
            if !flipped.is_empty() {
                r.note(format!(
                    "field of -S_BV agrees with D on {} and is opposite in sign on {}",
                    names_of(&mut same),
                    names_of(&mut flipped)
                ));
            }
        }
    }
    Ok(())
}

fn case_check(sig: &Signature, c: &Case, res: Option<&WeightResult>, r: &mut TaskReport, label: &str) -> Result<Option<usize>> {
    let name = format!("{label} {}", c.text);
    let mut family = None;
    let mut detail = String::new();
    if let Some(w) = res {
        let Some(coords) = w.ansatz.coordinates(&c.op) else {
            r.check(name, Status::Fail, Some("not in the ansatz".into()));
            return Ok(None);
        };
        let Some(i) = w.families.iter().position(|f| f.contains(&coords)) else {
            r.check(name, Status::Fail, Some("not contained in any emitted family".into()));
            return Ok(None);
        };
        family = Some(i);
        detail.push_str(&format!("family {i}"));
        let lead = &coords[w.families[i].leading];
        if *lead != rat(0) {
            detail.push_str(&format!(", scale {}", render::rational(lead)));
        }
        detail.push_str("; ");
    }
    let chk = check_operator(sig, &c.op, c.gamma.as_ref())?;
    if chk.gamma.is_none() {
        r.check(name, Status::Inconclusive, Some(detail + "Christoffel extraction inconclusive"));
        return Ok(family);
    }
    detail.push_str(&format!("gamma = {}", chk.gamma_text));
    if chk.matches == Some(false) {
        let listed = render::poly(&crate::bind::with_sections(sig), c.gamma.as_ref().unwrap());
        detail.push_str(&format!(" (listed {listed} does not reconstruct)"));
    }
    r.check(name, Status::from_bool(chk.passed()), Some(detail));
    Ok(family)
}

fn search(sig: &Signature, s: &SearchJob, r: &mut TaskReport) -> Result<()> {
    let Some(weight) = s.weight else {
        for c in &s.cases {
            case_check(sig, c, None, r, "involutive")?;
        }
        return Ok(());
    };
    let opts = SearchOptions { max_splits: s.splits, max_order: s.order, formal: s.formal };
    let w = search_weight(weight, &opts)?;
    let asig = {
        let mut a = sig.clone();
        if s.formal && !a.is_func("f") {
            a.add_func("f");
        }
        a
    };
    r.object("ansatz", render::op(&asig, &w.ansatz.op));
    r.object("ansatz size", w.ansatz.len().to_string());
    let open = w.open.len();
    let detail = format!("{} branch log lines, {open} open", w.log.len());
    r.check("all branches resolved", if open == 0 { Status::Pass } else { Status::Inconclusive }, Some(detail));
    for l in &w.log {
        r.note(l.clone());
    }
    let mut bad = Vec::new();
    for (i, f) in w.families.iter().enumerate() {
        r.object(format!("family {i}"), format!("{} (dim {})", render::op(&asig, &f.operator(&w.ansatz)), f.dim()));
        let samples = f.samples();
        let ok = samples
            .par_iter()
            .map(|c| check_operator(&asig, &w.ansatz.specialize(c), None).map(|k| k.passed()))
            .collect::<Result<Vec<bool>>>()?;
        if ok.iter().any(|b| !b) {
            bad.push(i);
        }
    }
    let detail = (!bad.is_empty()).then(|| format!("failing families {bad:?}"));
    r.check("sampled family members are involutive", Status::from_bool(bad.is_empty()), detail);
    let mut covered = BTreeSet::new();
    for c in &s.cases {
        covered.extend(case_check(sig, c, Some(&w), r, "listed")?);
    }
    for c in &s.represent {
        covered.extend(case_check(sig, c, Some(&w), r, "represented")?);
    }
    if !s.cases.is_empty() || !s.represent.is_empty() {
        let missing: Vec<usize> = (0..w.families.len()).filter(|i| !covered.contains(i)).collect();
        let detail = (!missing.is_empty()).then(|| format!("families without a listed member: {missing:?}"));
        r.check("every emitted family has a listed member", Status::from_bool(missing.is_empty()), detail);
    }
    Ok(())
}
