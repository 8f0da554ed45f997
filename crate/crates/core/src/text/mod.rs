//! Expression syntax: tokens, parsing, evaluation and canonical rendering.

mod ast;
mod eval;
mod lexer;
pub mod render;

pub use ast::{parse_expr, parse_expression_str, BinOp, Expr, ExprKind};
pub use eval::{parse_op, parse_poly, Env, Value};
pub use lexer::{describe, tokenize, Tok, Token, Tokens};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Parity, Signature};

    fn sig() -> Signature {
        let mut s = Signature::new(&["x", "y"]).with_field("u", 1, Parity::Even).with_field("b", 1, Parity::Odd);
        s.add_field("A", 2, Parity::Even, None).unwrap();
        s.add_func("f");
        s
    }

    #[test]
    fn operator_round_trip() {
        let s = sig();
        let env = Env::new(&s);
        let a = parse_op(&env, "-1/2*Dx^3 + 2*u*Dx + u_x").unwrap();
        assert_eq!(a.order(), 3);
        let text = render::op(&s, &a);
        assert_eq!(text, "-1/2*Dx^3 + 2*u*Dx + u_x");
        assert_eq!(parse_op(&env, &text).unwrap(), a);
        assert_eq!(parse_op(&env, "Dx*u").unwrap(), parse_op(&env, "u*Dx + u_x").unwrap());
    }

    #[test]
    fn polynomial_round_trip() {
        let s = sig();
        let env = Env::new(&s);
        for src in ["b_x*b", "exp(2*u)*u_xy - 3/4*x*A[1]_y^2", "f''(u)*u_x + f(u)", "#2*u - #0"] {
            let p = parse_poly(&env, src).unwrap();
            let text = render::poly(&s, &p);
            assert_eq!(parse_poly(&env, &text).unwrap(), p, "{src} -> {text}");
        }
        assert_eq!(render::poly(&s, &parse_poly(&env, "b_x*b").unwrap()), "-b*b_x");
        assert_eq!(parse_poly(&env, "Dy(u_x*b)").unwrap(), parse_poly(&env, "u_xy*b + u_x*b_y").unwrap());
    }
}
