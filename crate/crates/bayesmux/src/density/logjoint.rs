//! Compilation of a validated model plus a dataset into an evaluable
//! log-joint density over the unconstrained parameter vector.
//!
//! Compilation resolves every name to a data constant or a parameter slice,
//! checks statement and goal shapes (all shapes are known once data is
//! bound), and plans truncation renormalization for each prior whose target
//! carries bounds tighter than the distribution's natural support. After
//! compilation, evaluation is infallible: domain violations yield `-inf`.

use super::dataset::{DataValue, Dataset};
use super::dist::{log_density_dist, Trunc};
use super::space::{build_parameter_space, from_unconstrained, ParameterSpace};
use super::DensityError;
use crate::dsl::{BinOp, Dist, Expr, ParsedModel};
use std::sync::Arc;

/// Options controlling density semantics.
#[derive(Debug, Clone, Copy)]
pub struct DensityOptions {
    /// Divide truncated priors by the mass inside their bounds. Disabling
    /// this reproduces the uncorrected behavior where constrained priors are
    /// left unnormalized (a downward bias on the evidence).
    pub renormalize_truncation: bool,
}

impl Default for DensityOptions {
    fn default() -> Self {
        DensityOptions {
            renormalize_truncation: true,
        }
    }
}

/// Compiled expression; all data is folded, parameters are slice references.
#[derive(Debug, Clone)]
enum CExpr {
    Const(f64),
    ConstVec(Arc<Vec<f64>>),
    Param { offset: usize, len: usize },
    Neg(Box<CExpr>),
    Bin(BinOp, Box<CExpr>, Box<CExpr>),
}

impl CExpr {
    fn len(&self) -> usize {
        match self {
            CExpr::Const(_) => 1,
            CExpr::ConstVec(v) => v.len(),
            CExpr::Param { len, .. } => *len,
            CExpr::Neg(e) => e.len(),
            CExpr::Bin(_, l, r) => l.len().max(r.len()),
        }
    }

    /// Element `i` with scalar broadcasting; `v` is the constrained vector.
    fn eval(&self, v: &[f64], i: usize) -> f64 {
        match self {
            CExpr::Const(c) => *c,
            CExpr::ConstVec(xs) => xs[i],
            CExpr::Param { offset, len } => {
                if *len == 1 {
                    v[*offset]
                } else {
                    v[*offset + i]
                }
            }
            CExpr::Neg(e) => -e.eval(v, i),
            CExpr::Bin(op, l, r) => {
                let (li, ri) = (
                    if l.len() == 1 { 0 } else { i },
                    if r.len() == 1 { 0 } else { i },
                );
                let (a, b) = (l.eval(v, li), r.eval(v, ri));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                }
            }
        }
    }
}

/// Compiled sampling statement.
#[derive(Debug, Clone)]
struct CStatement {
    dist: Dist,
    target: CExpr,
    args: Vec<CExpr>,
    len: usize,
    trunc: Option<Trunc>,
}

/// Compiled goal.
#[derive(Debug, Clone)]
struct CGoal {
    name: String,
    expr: CExpr,
    len: usize,
}

/// An immutable, thread-safe log-joint density over R^dim.
#[derive(Debug, Clone)]
pub struct LogDensityFn {
    model: Arc<ParsedModel>,
    data: Arc<Dataset>,
    space: ParameterSpace,
    statements: Vec<CStatement>,
    goals: Vec<CGoal>,
    options: DensityOptions,
}

impl LogDensityFn {
    /// Compile `model` against `data`. The model must already have passed
    /// validation; compilation re-derives the parameter space, folds data
    /// into every expression, checks shapes, and plans truncation.
    pub fn compile(
        model: &ParsedModel,
        data: &Dataset,
        options: DensityOptions,
    ) -> Result<LogDensityFn, DensityError> {
        let space = build_parameter_space(model, data)?;

        let mut statements = Vec::with_capacity(model.statements.len());
        for s in &model.statements {
            let target = compile_expr(&Expr::Name(s.target.clone()), model, data, &space)?;
            let len = target.len();
            let mut args = Vec::with_capacity(s.args.len());
            for a in &s.args {
                let c = compile_expr(a, model, data, &space)?;
                if c.len() != 1 && c.len() != len {
                    return Err(DensityError::ShapeMismatch {
                        message: format!(
                            "argument of `{}` has length {} but target `{}` has length {len}",
                            s.dist.name(),
                            c.len(),
                            s.target
                        ),
                    });
                }
                args.push(c);
            }

            // truncation plan: bounds on a parameter target tighter than the
            // distribution's natural support
            let trunc = space
                .entries
                .iter()
                .find(|e| e.name == s.target)
                .and_then(|e| {
                    if e.lower.is_none() && e.upper.is_none() {
                        None
                    } else {
                        Some(Trunc {
                            lower: e.lower,
                            upper: e.upper,
                        })
                    }
                });
            if let Some(t) = trunc {
                if s.dist == Dist::StudentT && (t.lower.is_some() || t.upper.is_some()) {
                    return Err(DensityError::UnsupportedTruncation {
                        message: format!(
                            "parameter `{}` is bounded but `student_t` cannot be renormalized",
                            s.target
                        ),
                    });
                }
                if s.dist.is_discrete() {
                    return Err(DensityError::ShapeMismatch {
                        message: format!(
                            "`{}` cannot target bounded parameter `{}`",
                            s.dist.name(),
                            s.target
                        ),
                    });
                }
            }

            statements.push(CStatement {
                dist: s.dist,
                target,
                args,
                len,
                trunc,
            });
        }

        let mut goals = Vec::with_capacity(model.goals.len());
        for g in &model.goals {
            let expr = compile_expr(&g.expr, model, data, &space)?;
            goals.push(CGoal {
                len: expr.len(),
                name: g.name.clone(),
                expr,
            });
        }

        Ok(LogDensityFn {
            model: Arc::new(model.clone()),
            data: Arc::new(data.clone()),
            space,
            statements,
            goals,
            options,
        })
    }

    pub fn model(&self) -> &ParsedModel {
        &self.model
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn space(&self) -> &ParameterSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim
    }

    pub fn options(&self) -> DensityOptions {
        self.options
    }

    /// Log joint density at an unconstrained point, including the
    /// change-of-variables correction. `-inf` on any domain violation;
    /// never NaN.
    pub fn log_joint(&self, y: &[f64]) -> f64 {
        debug_assert_eq!(y.len(), self.space.dim);
        if y.iter().any(|v| !v.is_finite()) {
            return f64::NEG_INFINITY;
        }
        let (v, log_jac) = from_unconstrained(&self.space, y);
        let s = self.log_statements(&v);
        let total = s + log_jac;
        if total.is_nan() {
            f64::NEG_INFINITY
        } else {
            total
        }
    }

    /// Sum of statement log densities at a constrained point (no Jacobian).
    pub fn log_statements(&self, v: &[f64]) -> f64 {
        let mut acc = 0.0;
        for st in &self.statements {
            let trunc = if self.options.renormalize_truncation {
                st.trunc
            } else {
                // keep the support restriction but skip the renormalizer
                None
            };
            for i in 0..st.len {
                let value = st.target.eval(v, i);
                let mut args = [0.0; 3];
                for (k, a) in st.args.iter().enumerate() {
                    args[k] = a.eval(v, if a.len() == 1 { 0 } else { i });
                }
                // compilation already rejected unsupported truncations
                let ld = log_density_dist(st.dist, &args[..st.args.len()], value, trunc)
                    .unwrap_or(f64::NEG_INFINITY);
                if ld == f64::NEG_INFINITY {
                    return f64::NEG_INFINITY;
                }
                acc += ld;
            }
        }
        if acc.is_nan() {
            f64::NEG_INFINITY
        } else {
            acc
        }
    }

    /// Goal names in declaration order.
    pub fn goal_names(&self) -> Vec<String> {
        self.goals.iter().map(|g| g.name.clone()).collect()
    }

    /// Per-goal lengths (1 for scalars).
    pub fn goal_lens(&self) -> Vec<usize> {
        self.goals.iter().map(|g| g.len).collect()
    }

    /// Evaluate all goal expressions at a constrained point.
    pub fn eval_goals(&self, v: &[f64]) -> Vec<Vec<f64>> {
        self.goals
            .iter()
            .map(|g| (0..g.len).map(|i| g.expr.eval(v, i)).collect())
            .collect()
    }
}

fn compile_expr(
    e: &Expr,
    model: &ParsedModel,
    data: &Dataset,
    space: &ParameterSpace,
) -> Result<CExpr, DensityError> {
    Ok(match e {
        Expr::Number(v) => CExpr::Const(*v),
        Expr::Name(name) => resolve_name(name, model, data, space)?,
        Expr::Index(name, idx) => {
            let base = resolve_name(name, model, data, space)?;
            let idx_val = const_index(idx, model, data, space)?;
            let len = base.len();
            if idx_val < 1 || idx_val as usize > len {
                return Err(DensityError::ShapeMismatch {
                    message: format!("index {idx_val} out of range for `{name}` (length {len})"),
                });
            }
            let i = idx_val as usize - 1;
            match base {
                CExpr::ConstVec(v) => CExpr::Const(v[i]),
                CExpr::Param { offset, .. } => CExpr::Param {
                    offset: offset + i,
                    len: 1,
                },
                CExpr::Const(_) => {
                    return Err(DensityError::ShapeMismatch {
                        message: format!("`{name}` is a scalar and cannot be indexed"),
                    })
                }
                _ => unreachable!(),
            }
        }
        Expr::Neg(inner) => CExpr::Neg(Box::new(compile_expr(inner, model, data, space)?)),
        Expr::Bin(op, l, r) => {
            let cl = compile_expr(l, model, data, space)?;
            let cr = compile_expr(r, model, data, space)?;
            let (ll, rl) = (cl.len(), cr.len());
            if ll != 1 && rl != 1 && ll != rl {
                return Err(DensityError::ShapeMismatch {
                    message: format!("operands of `{}` have lengths {ll} and {rl}", op.symbol()),
                });
            }
            CExpr::Bin(*op, Box::new(cl), Box::new(cr))
        }
    })
}

fn resolve_name(
    name: &str,
    model: &ParsedModel,
    data: &Dataset,
    space: &ParameterSpace,
) -> Result<CExpr, DensityError> {
    if let Some(entry) = space.entries.iter().find(|e| e.name == name) {
        return Ok(CExpr::Param {
            offset: entry.offset,
            len: entry.len,
        });
    }
    if model.data_decl(name).is_some() {
        let value = data.get(name).ok_or_else(|| DensityError::MissingData {
            name: name.to_string(),
        })?;
        return Ok(match value {
            DataValue::Scalar(n) => CExpr::Const(n.as_f64()),
            DataValue::Array(items) => {
                CExpr::ConstVec(Arc::new(items.iter().map(|n| n.as_f64()).collect()))
            }
        });
    }
    Err(DensityError::ShapeMismatch {
        message: format!("`{name}` is neither data nor a parameter"),
    })
}

/// Indices must be resolvable from data and literals alone.
fn const_index(
    e: &Expr,
    model: &ParsedModel,
    data: &Dataset,
    space: &ParameterSpace,
) -> Result<i64, DensityError> {
    let c = compile_expr(e, model, data, space)?;
    fn fold(c: &CExpr) -> Option<f64> {
        match c {
            CExpr::Const(v) => Some(*v),
            CExpr::Neg(e) => fold(e).map(|v| -v),
            CExpr::Bin(op, l, r) => {
                let (a, b) = (fold(l)?, fold(r)?);
                Some(match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                })
            }
            _ => None,
        }
    }
    let v = fold(&c).ok_or_else(|| DensityError::ShapeMismatch {
        message: "index expressions must be computable from data".into(),
    })?;
    if v.fract() != 0.0 {
        return Err(DensityError::ShapeMismatch {
            message: format!("index must be an integer, got {v}"),
        });
    }
    Ok(v as i64)
}

/// Unconstrained initialization point: the constrained midpoint of every
/// bounded coordinate and zero for unbounded ones, which is the origin after
/// the transforms.
pub fn midpoint_init(space: &ParameterSpace) -> Vec<f64> {
    vec![0.0; space.dim]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_model;

    fn compile(model_src: &str, data_json: &str) -> Result<LogDensityFn, DensityError> {
        let m = parse_model(model_src).unwrap();
        let d = Dataset::from_json_str(data_json).unwrap();
        LogDensityFn::compile(&m, &d, DensityOptions::default())
    }

    const COIN: &str = "data{int N; int y[N] in {0,1};} params{real<lower=0,upper=1> theta;} \
                        model{theta ~ beta(2,2); y ~ bernoulli(theta);} goal{z = theta;}";

    fn coin_data() -> String {
        let y: Vec<i64> = std::iter::repeat(1)
            .take(14)
            .chain(std::iter::repeat(0).take(6))
            .collect();
        format!(
            r#"{{"N": 20, "y": {}}}"#,
            serde_json::to_string(&y).unwrap()
        )
    }

    #[test]
    fn coin_log_joint_at_origin() {
        // at y = 0, theta = 1/2: log Beta(1/2; 2,2) + 20 log(1/2) + log(1/4)
        // = log(3/2) - 20 log 2 - log 4 = -14.843772864210632
        let f = compile(COIN, &coin_data()).unwrap();
        let got = f.log_joint(&[0.0]);
        assert!(
            (got - (-14.843772864210632)).abs() < 1e-12,
            "log joint at origin: {got}"
        );
    }

    #[test]
    fn pure_gaussian_model_is_sum_of_two_normals() {
        let f = compile(
            "data{real x;} params{real mu;} model{mu ~ normal(0,1); x ~ normal(mu, 1);} \
             goal{z = mu;}",
            r#"{"x": 0.7}"#,
        )
        .unwrap();
        let y = 0.31;
        let expect = log_density_dist(Dist::Normal, &[0.0, 1.0], y, None).unwrap()
            + log_density_dist(Dist::Normal, &[y, 1.0], 0.7, None).unwrap();
        assert!((f.log_joint(&[y]) - expect).abs() < 1e-14);
    }

    #[test]
    fn boundary_mapped_scale_never_nan() {
        let f = compile(
            "data{real x;} params{real<lower=0> s;} model{s ~ gamma(2,2); x ~ normal(0, s);} \
             goal{z = s;}",
            r#"{"x": 1.0}"#,
        )
        .unwrap();
        for y in [-800.0, -1e4, 700.0, f64::NEG_INFINITY, f64::NAN] {
            let v = f.log_joint(&[y]);
            assert!(!v.is_nan(), "log joint at y={y} must not be NaN, got {v}");
        }
    }

    #[test]
    fn determinism_bitwise() {
        let f = compile(COIN, &coin_data()).unwrap();
        let a = f.log_joint(&[0.37]);
        let b = f.log_joint(&[0.37]);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn truncated_prior_is_renormalized() {
        // theta in (0, 1/2) with a beta(1,1) prior: density doubles
        let narrow = compile(
            "data{int N; int y[N] in {0,1};} params{real<lower=0,upper=0.5> theta;} \
             model{theta ~ beta(1,1); y ~ bernoulli(theta);} goal{z = theta;}",
            r#"{"N": 1, "y": [1]}"#,
        )
        .unwrap();
        // at y=0 the constrained value is 0.25; joint = log(2*1) + log(0.25)
        //   + jacobian log(0.5 * 1/4)
        let got = narrow.log_joint(&[0.0]);
        let expect = 2f64.ln() + 0.25f64.ln() + (0.5f64 * 0.25).ln();
        assert!((got - expect).abs() < 1e-12, "{got} vs {expect}");
    }

    #[test]
    fn renormalization_can_be_disabled() {
        let src = "params{real<lower=0> s;} model{s ~ normal(0, 1);} goal{z = s;}";
        let m = parse_model(src).unwrap();
        let d = Dataset::new();
        let on = LogDensityFn::compile(&m, &d, DensityOptions::default()).unwrap();
        let off = LogDensityFn::compile(
            &m,
            &d,
            DensityOptions {
                renormalize_truncation: false,
            },
        )
        .unwrap();
        let y = [0.2];
        let diff = on.log_joint(&y) - off.log_joint(&y);
        assert!(
            (diff - 2f64.ln()).abs() < 1e-12,
            "half-normal factor: {diff}"
        );
    }

    #[test]
    fn student_t_on_bounded_parameter_rejected_at_compile() {
        let err = compile(
            "params{real<lower=0> s;} model{s ~ student_t(4, 0, 1);} goal{z = s;}",
            "{}",
        )
        .unwrap_err();
        assert!(matches!(err, DensityError::UnsupportedTruncation { .. }));
    }

    #[test]
    fn vectorized_statement_with_array_args() {
        let f = compile(
            "data{int N; real x[N];} params{real mu[N];} \
             model{mu ~ normal(0, 1); x ~ normal(mu, 0.5);} goal{z = mu[1];}",
            r#"{"N": 2, "x": [0.3, -0.2]}"#,
        )
        .unwrap();
        let y = [0.1, 0.4];
        let expect: f64 = [
            log_density_dist(Dist::Normal, &[0.0, 1.0], 0.1, None).unwrap(),
            log_density_dist(Dist::Normal, &[0.0, 1.0], 0.4, None).unwrap(),
            log_density_dist(Dist::Normal, &[0.1, 0.5], 0.3, None).unwrap(),
            log_density_dist(Dist::Normal, &[0.4, 0.5], -0.2, None).unwrap(),
        ]
        .iter()
        .sum();
        assert!((f.log_joint(&y) - expect).abs() < 1e-12);
    }

    #[test]
    fn goal_evaluation() {
        let f = compile(
            "data{int N; real x[N];} params{real mu[N];} \
             model{mu ~ normal(0,1); x ~ normal(mu, 1);} \
             goal{first = mu[1]; spread = mu[2] - mu[1]; all = mu;}",
            r#"{"N": 2, "x": [0.0, 1.0]}"#,
        )
        .unwrap();
        assert_eq!(f.goal_names(), ["first", "spread", "all"]);
        assert_eq!(f.goal_lens(), [1, 1, 2]);
        let g = f.eval_goals(&[1.5, 2.0]);
        assert_eq!(g[0], [1.5]);
        assert_eq!(g[1], [0.5]);
        assert_eq!(g[2], [1.5, 2.0]);
    }

    #[test]
    fn argument_length_mismatch_rejected() {
        let err = compile(
            "data{int N; real x[N]; int M; real w[M];} params{real mu;} \
             model{mu ~ normal(0,1); x ~ normal(w, 1);} goal{z = mu;}",
            r#"{"N": 3, "x": [0.0, 1.0, 2.0], "M": 2, "w": [1.0, 2.0]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, DensityError::ShapeMismatch { .. }));
    }
}
