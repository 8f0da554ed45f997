use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use varlie::canon;
use varlie::scenario::parse;
use varlie_core::text::{parse_expression_str, BinOp, Expr, ExprKind};

fn small(rng: &mut ChaCha8Rng) -> u32 {
    rng.gen_range(0..12)
}

fn files() -> Vec<PathBuf> {
    let here = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let mut out = Vec::new();
    for dir in [here.join("../../scenarios"), here.join("tests/fixtures")] {
        for e in std::fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.extension().is_some_and(|x| x == "vl") {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

#[test]
fn shipped_scenarios_round_trip() {
    let mut n = 0;
    for p in files() {
        let src = std::fs::read_to_string(&p).unwrap();
        let Ok(s) = parse(&src) else {
            assert!(p.ends_with("syntax-error.vl"), "{} does not parse", p.display());
            continue;
        };
        let text = canon::scenario(&s);
        let again = parse(&text).unwrap_or_else(|e| panic!("{}: {e}\n{text}", p.display()));
        assert_eq!(canon::erase_spans(&again), canon::erase_spans(&s), "{}", p.display());
        assert_eq!(canon::scenario(&again), text);
        n += 1;
    }
    assert_eq!(n, 16);
}

fn at(kind: ExprKind) -> Expr {
    Expr { kind, line: 0, col: 0 }
}

const NAMES: &[&str] = &["u", "v", "b", "Dx", "Dy", "x", "A"];
const SUFFIXES: &[&str] = &["", "", "x", "xy", "yyx"];

fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    let leaf = depth == 0 || rng.gen_bool(0.25);
    if leaf {
        return match rng.gen_range(0..4) {
            0 => at(ExprKind::Int(small(rng).into())),
            1 => at(ExprKind::Param(small(rng))),
            _ => {
                let name = NAMES[rng.gen_range(0..NAMES.len())].to_string();
                let comp = if name == "A" { Some(rng.gen_range(0..4)) } else { None };
                let suffix = SUFFIXES[rng.gen_range(0..SUFFIXES.len())].to_string();
                at(ExprKind::Var { name, comp, suffix })
            }
        };
    }
    let sub = |rng: &mut ChaCha8Rng| Box::new(random_expr(rng, depth - 1));
    match rng.gen_range(0..8) {
        0 => at(ExprKind::Neg(sub(rng))),
        1 => at(ExprKind::Pow(sub(rng), rng.gen_range(1..5))),
        2 => {
            let args = (0..rng.gen_range(1..3)).map(|_| random_expr(rng, depth - 1)).collect();
            at(ExprKind::Call { name: ["f", "Dx", "exp"][rng.gen_range(0..3)].into(), primes: rng.gen_range(0..3), args })
        }
        3 => at(ExprKind::List((0..rng.gen_range(1..4)).map(|_| random_expr(rng, depth - 1)).collect())),
        k => {
            let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div][k - 4];
            at(ExprKind::Bin(op, sub(rng), sub(rng)))
        }
    }
}

#[test]
fn random_expressions_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        let e = random_expr(&mut rng, 5);
        let text = canon::expr(&e);
        let mut back = parse_expression_str(&text).unwrap_or_else(|err| panic!("{text}: {err}"));
        canon::erase_expr(&mut back);
        assert_eq!(back, e, "{text}");
        assert_eq!(canon::expr(&back), text);
    }
}
