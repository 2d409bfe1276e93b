//! Static validation of parsed models.
//!
//! Parsing guarantees shape; validation enforces the probabilistic-hygiene
//! rules: every parameter gets exactly one proper prior, a goal block must be
//! present, statically visible argument-domain violations are rejected, and
//! count distributions may only target integer data. Declared-but-unsampled
//! data is reported as a warning, not an error.

use super::ast::*;

/// Rejection codes carried in a [`ValidationReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationCode {
    /// A parameter appears on the left of two or more sampling statements.
    DoubleSample,
    /// A parameter never appears on the left of a sampling statement.
    NoPrior,
    /// The goal block is absent or empty.
    NoGoal,
    /// A distribution argument violates its domain in a statically visible way.
    BadArg,
}

impl ValidationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ValidationCode::DoubleSample => "E_DOUBLE_SAMPLE",
            ValidationCode::NoPrior => "E_NO_PRIOR",
            ValidationCode::NoGoal => "E_NO_GOAL",
            ValidationCode::BadArg => "E_BAD_ARG",
        }
    }
}

/// One finding, with a human-readable location.
#[derive(Debug, Clone)]
pub struct Issue {
    pub code: ValidationCode,
    pub message: String,
    /// Where in the model the finding points (statement index or name).
    pub location: String,
}

/// Outcome of [`validate_model`]. `accepted` holds exactly when `errors` is
/// empty; warnings never block acceptance.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub accepted: bool,
    pub errors: Vec<Issue>,
    pub warnings: Vec<String>,
}

pub fn validate_model(m: &ParsedModel) -> ValidationReport {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();

    // exactly one prior per parameter
    for p in &m.params {
        let n = m.statements.iter().filter(|s| s.target == p.name).count();
        match n {
            0 => errors.push(Issue {
                code: ValidationCode::NoPrior,
                message: format!("parameter `{}` has no prior", p.name),
                location: format!("param {}", p.name),
            }),
            1 => {}
            _ => errors.push(Issue {
                code: ValidationCode::DoubleSample,
                message: format!("parameter `{}` is sampled {n} times", p.name),
                location: format!("param {}", p.name),
            }),
        }
    }

    // data sampled at most once; data that never appears anywhere (neither
    // sampled nor referenced as a length, argument, or goal input) is only
    // worth a warning
    let mut referenced: Vec<&str> = Vec::new();
    for d in &m.data_decls {
        if let Some(ArrayLen::Name(n)) = &d.len {
            referenced.push(n);
        }
    }
    for p in &m.params {
        if let Some(ArrayLen::Name(n)) = &p.len {
            referenced.push(n);
        }
    }
    for s in &m.statements {
        for a in &s.args {
            a.names(&mut referenced);
        }
    }
    for g in &m.goals {
        g.expr.names(&mut referenced);
    }
    for d in &m.data_decls {
        let n = m.statements.iter().filter(|s| s.target == d.name).count();
        if n > 1 {
            errors.push(Issue {
                code: ValidationCode::DoubleSample,
                message: format!("data `{}` is sampled {n} times", d.name),
                location: format!("data {}", d.name),
            });
        } else if n == 0 && !referenced.contains(&d.name.as_str()) {
            warnings.push(format!("data `{}` is declared but never used", d.name));
        }
    }

    if m.goals.is_empty() {
        errors.push(Issue {
            code: ValidationCode::NoGoal,
            message: "model has no goal block".into(),
            location: "goal".into(),
        });
    }

    for (i, s) in m.statements.iter().enumerate() {
        check_statement(m, i, s, &mut errors);
    }

    ValidationReport {
        accepted: errors.is_empty(),
        errors,
        warnings,
    }
}

fn bad(errors: &mut Vec<Issue>, idx: usize, s: &SamplingStatement, msg: String) {
    errors.push(Issue {
        code: ValidationCode::BadArg,
        message: msg,
        location: format!("statement {} ({} ~ {})", idx + 1, s.target, s.dist.name()),
    });
}

fn check_statement(m: &ParsedModel, idx: usize, s: &SamplingStatement, errors: &mut Vec<Issue>) {
    // count distributions target integer data only
    if s.dist.is_discrete() {
        match m.data_decl(&s.target) {
            Some(d) if d.kind == NumKind::Int => {}
            Some(_) => bad(
                errors,
                idx,
                s,
                format!("`{}` requires an integer data target", s.dist.name()),
            ),
            None => bad(
                errors,
                idx,
                s,
                format!(
                    "`{}` cannot target parameter `{}`; parameters are real-valued",
                    s.dist.name(),
                    s.target
                ),
            ),
        }
    }

    // statically visible argument-domain violations (constant subexpressions)
    let consts: Vec<Option<f64>> = s.args.iter().map(|a| a.as_const()).collect();
    let positive = |errors: &mut Vec<Issue>, k: usize, what: &str| {
        if let Some(v) = consts[k] {
            if v <= 0.0 {
                bad(
                    errors,
                    idx,
                    s,
                    format!("{what} of `{}` must be positive, got {v}", s.dist.name()),
                );
            }
        }
    };
    match s.dist {
        Dist::Normal => positive(errors, 1, "scale"),
        Dist::StudentT => {
            positive(errors, 0, "degrees of freedom");
            positive(errors, 2, "scale");
        }
        Dist::Uniform => {
            if let (Some(a), Some(b)) = (consts[0], consts[1]) {
                if a >= b {
                    bad(
                        errors,
                        idx,
                        s,
                        format!("uniform bounds must satisfy lower < upper, got ({a}, {b})"),
                    );
                }
            }
        }
        Dist::Beta | Dist::Gamma => {
            positive(errors, 0, "first shape");
            positive(errors, 1, "second shape/rate");
        }
        Dist::Exponential => positive(errors, 0, "rate"),
        Dist::Bernoulli => {
            if let Some(p) = consts[0] {
                if !(0.0..=1.0).contains(&p) {
                    bad(
                        errors,
                        idx,
                        s,
                        format!("probability must lie in [0,1], got {p}"),
                    );
                }
            }
        }
        Dist::Binomial => {
            // the count must be an integer literal or integer data
            match &s.args[0] {
                Expr::Number(v) => {
                    if v.fract() != 0.0 || *v < 0.0 {
                        bad(
                            errors,
                            idx,
                            s,
                            format!("binomial count must be a nonnegative integer, got {v}"),
                        );
                    }
                }
                Expr::Name(n) | Expr::Index(n, _) => match m.data_decl(n) {
                    Some(d) if d.kind == NumKind::Int => {}
                    _ => bad(
                        errors,
                        idx,
                        s,
                        format!("binomial count `{n}` must be integer data"),
                    ),
                },
                _ => {}
            }
            if let Some(p) = consts[1] {
                if !(0.0..=1.0).contains(&p) {
                    bad(
                        errors,
                        idx,
                        s,
                        format!("probability must lie in [0,1], got {p}"),
                    );
                }
            }
        }
    }
}
