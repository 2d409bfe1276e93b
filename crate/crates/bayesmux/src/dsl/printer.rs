//! Canonical pretty-printer. `parse_model(pretty_print(m))` reproduces `m`
//! structurally; expressions are re-parenthesized from precedence alone.

use super::ast::*;
use std::fmt::Write;

pub fn pretty_print(m: &ParsedModel) -> String {
    let mut out = String::new();

    out.push_str("data {\n");
    for d in &m.data_decls {
        let kind = match d.kind {
            NumKind::Int => "int",
            NumKind::Real => "real",
        };
        write!(out, "  {kind} {}", d.name).unwrap();
        if let Some(len) = &d.len {
            write!(out, "[{len}]").unwrap();
        }
        if d.zero_one {
            out.push_str(" in {0,1}");
        }
        out.push_str(";\n");
    }
    out.push_str("}\nparams {\n");
    for p in &m.params {
        out.push_str("  real");
        match (p.lower, p.upper) {
            (Some(l), Some(u)) => write!(out, "<lower={l},upper={u}>").unwrap(),
            (Some(l), None) => write!(out, "<lower={l}>").unwrap(),
            (None, Some(u)) => write!(out, "<upper={u}>").unwrap(),
            (None, None) => {}
        }
        write!(out, " {}", p.name).unwrap();
        if let Some(len) = &p.len {
            write!(out, "[{len}]").unwrap();
        }
        out.push_str(";\n");
    }
    out.push_str("}\nmodel {\n");
    for s in &m.statements {
        write!(out, "  {} ~ {}(", s.target, s.dist.name()).unwrap();
        for (i, a) in s.args.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            write_expr(&mut out, a, 0);
        }
        out.push_str(");\n");
    }
    out.push_str("}\ngoal {\n");
    for g in &m.goals {
        write!(out, "  {} = ", g.name).unwrap();
        write_expr(&mut out, &g.expr, 0);
        out.push_str(";\n");
    }
    out.push_str("}\n");
    out
}

// precedence: 0 additive, 1 multiplicative, 2 unary, 3 atoms
fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Bin(BinOp::Add | BinOp::Sub, _, _) => 0,
        Expr::Bin(BinOp::Mul | BinOp::Div, _, _) => 1,
        Expr::Neg(_) => 2,
        Expr::Number(v) if *v < 0.0 => 2,
        _ => 3,
    }
}

fn write_expr(out: &mut String, e: &Expr, min_prec: u8) {
    let prec = precedence(e);
    let needs_parens = prec < min_prec;
    if needs_parens {
        out.push('(');
    }
    match e {
        Expr::Number(v) => {
            write!(out, "{v}").unwrap();
        }
        Expr::Name(n) => out.push_str(n),
        Expr::Index(n, idx) => {
            out.push_str(n);
            out.push('[');
            write_expr(out, idx, 0);
            out.push(']');
        }
        Expr::Neg(inner) => {
            out.push('-');
            write_expr(out, inner, 3);
        }
        Expr::Bin(op, l, r) => {
            // parsing is left-associative, so the left operand may share our
            // precedence but the right operand must always bind tighter;
            // anything looser would re-associate on the way back in
            write_expr(out, l, prec);
            write!(out, " {} ", op.symbol()).unwrap();
            write_expr(out, r, prec + 1);
        }
    }
    if needs_parens {
        out.push(')');
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_model;

    fn roundtrip(src: &str) -> ParsedModel {
        let m = parse_model(src).unwrap();
        let printed = pretty_print(&m);
        let again = parse_model(&printed)
            .unwrap_or_else(|e| panic!("canonical text failed to parse: {e}\n{printed}"));
        assert_eq!(m, again, "round-trip changed the AST:\n{printed}");
        again
    }

    #[test]
    fn coin_roundtrip() {
        roundtrip(
            "data{int N; int y[N] in {0,1};} params{real<lower=0,upper=1> theta;} \
             model{theta ~ beta(2,2); y ~ bernoulli(theta);} goal{z = theta;}",
        );
    }

    #[test]
    fn declaration_order_preserved() {
        let m = roundtrip(
            "data{int N;} params{real a[N]; real<lower=0> b; real c;} \
             model{a ~ normal(0,1); b ~ gamma(2,2); c ~ student_t(4, 0, 1);} \
             goal{z = a[1] + b;}",
        );
        let names: Vec<&str> = m.params.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names, ["a", "b", "c"]);
    }

    #[test]
    fn expression_parens_survive() {
        roundtrip(
            "data{int N;} params{real mu;} model{mu ~ normal(0, 1);} \
             goal{z = (1 + mu) * (2 - mu) / (mu + 3) - -mu;}",
        );
    }

    #[test]
    fn nested_subtraction_prints_correctly() {
        // a - (b - c) must keep its parens; (a - b) - c must not gain any
        let src = "params{real a; real b; real c;} \
                   model{a ~ normal(0,1); b ~ normal(0,1); c ~ normal(0,1);} \
                   goal{x = a - (b - c); y = a - b - c;}";
        let m = roundtrip(src);
        let printed = pretty_print(&m);
        assert!(printed.contains("x = a - (b - c);"), "{printed}");
        assert!(printed.contains("y = a - b - c;"), "{printed}");
    }
}
