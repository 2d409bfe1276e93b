//! Recursive-descent parser producing a [`ParsedModel`].
//!
//! Besides the grammar itself this enforces the static scope rules: every
//! name used in a statement or goal expression must be declared, array
//! lengths must name integer data scalars declared earlier, declarations may
//! not collide, and sampling-statement arity must match the distribution.

use super::ast::*;
use super::lexer::{lex, Spanned, Tok};
use super::{DslError, DslErrorCode};

const RESERVED: &[&str] = &[
    "data",
    "params",
    "model",
    "goal",
    "int",
    "real",
    "in",
    "lower",
    "upper",
    "normal",
    "student_t",
    "uniform",
    "beta",
    "gamma",
    "exponential",
    "bernoulli",
    "binomial",
];

struct Cursor {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (u32, u32) {
        match self.toks.get(self.pos) {
            Some(s) => (s.line, s.col),
            None => self
                .toks
                .last()
                .map(|s| (s.line, s.col + 1))
                .unwrap_or((1, 1)),
        }
    }

    fn err(&self, code: DslErrorCode, msg: impl Into<String>) -> DslError {
        let (line, col) = self.here();
        DslError::new(code, msg, line, col)
    }

    fn syntax(&self, expected: &str) -> DslError {
        let found = match self.peek() {
            Some(s) => s.tok.describe(),
            None => "end of input".into(),
        };
        self.err(
            DslErrorCode::Syntax,
            format!("expected {expected}, found {found}"),
        )
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), DslError> {
        match self.peek() {
            Some(s) if s.tok == tok => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.syntax(expected)),
        }
    }

    fn eat_keyword(&mut self, word: &str) -> bool {
        if let Some(Spanned {
            tok: Tok::Ident(s), ..
        }) = self.peek()
        {
            if s == word {
                self.pos += 1;
                return true;
            }
        }
        false
    }

    fn ident(&mut self, what: &str) -> Result<String, DslError> {
        match self.peek() {
            Some(Spanned {
                tok: Tok::Ident(s), ..
            }) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.syntax(what)),
        }
    }

    fn name(&mut self, what: &str) -> Result<String, DslError> {
        let (line, col) = self.here();
        let s = self.ident(what)?;
        if RESERVED.contains(&s.as_str()) {
            return Err(DslError::new(
                DslErrorCode::Syntax,
                format!("`{s}` is a reserved word and cannot be used as a name"),
                line,
                col,
            ));
        }
        Ok(s)
    }

    fn number(&mut self, what: &str) -> Result<f64, DslError> {
        // optional leading sign for bound values
        let neg = matches!(self.peek().map(|s| &s.tok), Some(Tok::Minus));
        if neg {
            self.pos += 1;
        }
        match self.peek() {
            Some(Spanned {
                tok: Tok::Number(v),
                ..
            }) => {
                let v = *v;
                self.pos += 1;
                Ok(if neg { -v } else { v })
            }
            _ => Err(self.syntax(what)),
        }
    }
}

/// Parse model text into an AST. Deterministic; whitespace and comment
/// insensitive.
pub fn parse_model(model_text: &str) -> Result<ParsedModel, DslError> {
    let toks = lex(model_text)?;
    let mut c = Cursor { toks, pos: 0 };

    let mut model = ParsedModel {
        data_decls: Vec::new(),
        params: Vec::new(),
        statements: Vec::new(),
        goals: Vec::new(),
    };

    if c.eat_keyword("data") {
        c.expect(Tok::LBrace, "`{` after `data`")?;
        while !c.eat_keyword_rbrace() {
            let d = parse_data_decl(&mut c, &model)?;
            model.data_decls.push(d);
        }
    }
    if c.eat_keyword("params") {
        c.expect(Tok::LBrace, "`{` after `params`")?;
        while !c.eat_keyword_rbrace() {
            let p = parse_param_decl(&mut c, &model)?;
            model.params.push(p);
        }
    }
    if c.eat_keyword("model") {
        c.expect(Tok::LBrace, "`{` after `model`")?;
        while !c.eat_keyword_rbrace() {
            let s = parse_statement(&mut c, &model)?;
            model.statements.push(s);
        }
    }
    if c.eat_keyword("goal") {
        c.expect(Tok::LBrace, "`{` after `goal`")?;
        while !c.eat_keyword_rbrace() {
            let g = parse_goal(&mut c, &model)?;
            model.goals.push(g);
        }
    }
    if c.peek().is_some() {
        return Err(
            c.syntax("end of input (blocks must appear in the order data, params, model, goal)")
        );
    }
    Ok(model)
}

impl Cursor {
    fn eat_keyword_rbrace(&mut self) -> bool {
        if matches!(self.peek().map(|s| &s.tok), Some(Tok::RBrace)) {
            self.pos += 1;
            return true;
        }
        false
    }
}

fn declared(model: &ParsedModel, name: &str) -> bool {
    model.data_decl(name).is_some() || model.param(name).is_some()
}

fn check_duplicate(c: &Cursor, model: &ParsedModel, name: &str) -> Result<(), DslError> {
    if declared(model, name) || model.goals.iter().any(|g| g.name == name) {
        Err(c.err(
            DslErrorCode::Syntax,
            format!("duplicate declaration of `{name}`"),
        ))
    } else {
        Ok(())
    }
}

fn parse_array_len(c: &mut Cursor, model: &ParsedModel) -> Result<Option<ArrayLen>, DslError> {
    if !matches!(c.peek().map(|s| &s.tok), Some(Tok::LBracket)) {
        return Ok(None);
    }
    c.pos += 1;
    let len = match c.peek().map(|s| s.tok.clone()) {
        Some(Tok::Number(v)) => {
            c.pos += 1;
            if v.fract() != 0.0 || v < 1.0 {
                return Err(c.err(
                    DslErrorCode::Syntax,
                    format!("array length must be a positive integer, got `{v}`"),
                ));
            }
            ArrayLen::Literal(v as u64)
        }
        Some(Tok::Ident(name)) => {
            c.pos += 1;
            match model.data_decl(&name) {
                Some(d) if d.kind == NumKind::Int && d.len.is_none() => ArrayLen::Name(name),
                Some(_) => {
                    return Err(c.err(
                        DslErrorCode::Syntax,
                        format!("array length `{name}` must be an integer data scalar"),
                    ))
                }
                None => {
                    return Err(c.err(
                        DslErrorCode::UndeclaredName,
                        format!("array length `{name}` is not declared"),
                    ))
                }
            }
        }
        _ => return Err(c.syntax("array length (integer or data name)")),
    };
    c.expect(Tok::RBracket, "`]` after array length")?;
    Ok(Some(len))
}

fn parse_data_decl(c: &mut Cursor, model: &ParsedModel) -> Result<DataDecl, DslError> {
    let kind = if c.eat_keyword("int") {
        NumKind::Int
    } else if c.eat_keyword("real") {
        NumKind::Real
    } else {
        return Err(c.syntax("`int` or `real`"));
    };
    let name = c.name("data variable name")?;
    check_duplicate(c, model, &name)?;
    let len = parse_array_len(c, model)?;
    let mut zero_one = false;
    if c.eat_keyword("in") {
        // exactly `{0,1}`
        c.expect(Tok::LBrace, "`{` in domain marker")?;
        let zero = c.number("`0`")?;
        c.expect(Tok::Comma, "`,` in domain marker")?;
        let one = c.number("`1`")?;
        c.expect(Tok::RBrace, "`}` in domain marker")?;
        if zero != 0.0 || one != 1.0 {
            return Err(c.err(
                DslErrorCode::Syntax,
                "the only supported domain marker is `in {0,1}`",
            ));
        }
        if kind != NumKind::Int {
            return Err(c.err(
                DslErrorCode::Syntax,
                "`in {0,1}` applies to integer data only",
            ));
        }
        zero_one = true;
    }
    c.expect(Tok::Semi, "`;` after data declaration")?;
    Ok(DataDecl {
        name,
        kind,
        len,
        zero_one,
    })
}

fn parse_param_decl(c: &mut Cursor, model: &ParsedModel) -> Result<ParamDecl, DslError> {
    if !c.eat_keyword("real") {
        return Err(c.syntax("`real` (parameters are real-valued)"));
    }
    let mut lower = None;
    let mut upper = None;
    if matches!(c.peek().map(|s| &s.tok), Some(Tok::Lt)) {
        c.pos += 1;
        loop {
            let which = c.ident("`lower` or `upper`")?;
            c.expect(Tok::Eq, "`=` in bound")?;
            let v = c.number("bound value")?;
            match which.as_str() {
                "lower" if lower.is_none() => lower = Some(v),
                "upper" if upper.is_none() => upper = Some(v),
                "lower" | "upper" => {
                    return Err(c.err(DslErrorCode::Syntax, format!("bound `{which}` given twice")))
                }
                other => {
                    return Err(c.err(
                        DslErrorCode::Syntax,
                        format!("expected `lower` or `upper`, found `{other}`"),
                    ))
                }
            }
            if matches!(c.peek().map(|s| &s.tok), Some(Tok::Comma)) {
                c.pos += 1;
                continue;
            }
            break;
        }
        c.expect(Tok::Gt, "`>` closing the bounds")?;
        if let (Some(l), Some(u)) = (lower, upper) {
            if l >= u {
                return Err(c.err(
                    DslErrorCode::Syntax,
                    format!("lower bound {l} must be below upper bound {u}"),
                ));
            }
        }
    }
    let name = c.name("parameter name")?;
    check_duplicate(c, model, &name)?;
    let len = parse_array_len(c, model)?;
    c.expect(Tok::Semi, "`;` after parameter declaration")?;
    Ok(ParamDecl {
        name,
        len,
        lower,
        upper,
    })
}

fn parse_statement(c: &mut Cursor, model: &ParsedModel) -> Result<SamplingStatement, DslError> {
    let (line, col) = c.here();
    let target = c.name("sampling target name")?;
    if !declared(model, &target) {
        return Err(DslError::new(
            DslErrorCode::UndeclaredName,
            format!("sampling target `{target}` is not declared"),
            line,
            col,
        ));
    }
    c.expect(Tok::Tilde, "`~` in sampling statement")?;
    let (dline, dcol) = c.here();
    let dist_name = c.ident("distribution name")?;
    let dist = Dist::from_name(&dist_name).ok_or_else(|| {
        DslError::new(
            DslErrorCode::UnknownDist,
            format!("unknown distribution `{dist_name}`"),
            dline,
            dcol,
        )
    })?;
    c.expect(Tok::LParen, "`(` after distribution name")?;
    let mut args = Vec::new();
    if !matches!(c.peek().map(|s| &s.tok), Some(Tok::RParen)) {
        loop {
            args.push(parse_expr(c, model)?);
            if matches!(c.peek().map(|s| &s.tok), Some(Tok::Comma)) {
                c.pos += 1;
                continue;
            }
            break;
        }
    }
    c.expect(Tok::RParen, "`)` closing the argument list")?;
    c.expect(Tok::Semi, "`;` after sampling statement")?;
    if args.len() != dist.arity() {
        return Err(DslError::new(
            DslErrorCode::Syntax,
            format!(
                "`{}` takes {} argument(s), found {}",
                dist.name(),
                dist.arity(),
                args.len()
            ),
            dline,
            dcol,
        ));
    }
    Ok(SamplingStatement { target, dist, args })
}

// goal names live in their own output namespace: they may repeat a data or
// parameter name (reporting a parameter under its own name is the common
// case), but two goals cannot share a name
fn parse_goal(c: &mut Cursor, model: &ParsedModel) -> Result<GoalDecl, DslError> {
    let name = c.name("goal name")?;
    if model.goals.iter().any(|g| g.name == name) {
        return Err(c.err(DslErrorCode::Syntax, format!("duplicate goal `{name}`")));
    }
    c.expect(Tok::Eq, "`=` in goal definition")?;
    let expr = parse_expr(c, model)?;
    c.expect(Tok::Semi, "`;` after goal definition")?;
    Ok(GoalDecl { name, expr })
}

// expression grammar: term (+|- term)*; term: factor (*|/ factor)*;
// factor: -factor | atom; atom: number | name[index]? | ( expr )
fn parse_expr(c: &mut Cursor, model: &ParsedModel) -> Result<Expr, DslError> {
    let mut lhs = parse_term(c, model)?;
    loop {
        let op = match c.peek().map(|s| &s.tok) {
            Some(Tok::Plus) => BinOp::Add,
            Some(Tok::Minus) => BinOp::Sub,
            _ => break,
        };
        c.pos += 1;
        let rhs = parse_term(c, model)?;
        lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn parse_term(c: &mut Cursor, model: &ParsedModel) -> Result<Expr, DslError> {
    let mut lhs = parse_factor(c, model)?;
    loop {
        let op = match c.peek().map(|s| &s.tok) {
            Some(Tok::Star) => BinOp::Mul,
            Some(Tok::Slash) => BinOp::Div,
            _ => break,
        };
        c.pos += 1;
        let rhs = parse_factor(c, model)?;
        lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn parse_factor(c: &mut Cursor, model: &ParsedModel) -> Result<Expr, DslError> {
    if matches!(c.peek().map(|s| &s.tok), Some(Tok::Minus)) {
        c.pos += 1;
        let inner = parse_factor(c, model)?;
        // fold a negated literal into the literal itself
        return Ok(match inner {
            Expr::Number(v) => Expr::Number(-v),
            other => Expr::Neg(Box::new(other)),
        });
    }
    match c.peek().map(|s| s.tok.clone()) {
        Some(Tok::Number(v)) => {
            c.pos += 1;
            Ok(Expr::Number(v))
        }
        Some(Tok::LParen) => {
            c.pos += 1;
            let e = parse_expr(c, model)?;
            c.expect(Tok::RParen, "`)`")?;
            Ok(e)
        }
        Some(Tok::Ident(_)) => {
            let (line, col) = c.here();
            let name = c.name("name")?;
            if !declared(model, &name) {
                return Err(DslError::new(
                    DslErrorCode::UndeclaredName,
                    format!("`{name}` is not declared"),
                    line,
                    col,
                ));
            }
            if matches!(c.peek().map(|s| &s.tok), Some(Tok::LBracket)) {
                c.pos += 1;
                let idx = parse_expr(c, model)?;
                c.expect(Tok::RBracket, "`]` closing the index")?;
                return Ok(Expr::Index(name, Box::new(idx)));
            }
            Ok(Expr::Name(name))
        }
        _ => Err(c.syntax("expression")),
    }
}
