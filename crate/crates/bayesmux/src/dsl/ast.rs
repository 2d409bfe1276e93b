//! Abstract syntax tree for the model language.
//!
//! A model is four blocks: `data` declarations, `params` declarations with
//! optional bounds, `model` sampling statements, and `goal` definitions of
//! the quantities every candidate model must expose. ASTs are immutable
//! value types; structural equality is the round-trip contract for the
//! pretty-printer.

use std::fmt;

/// Scalar kind of a data declaration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumKind {
    Int,
    Real,
}

/// Array length: a literal or the name of an integer data scalar.
#[derive(Debug, Clone, PartialEq)]
pub enum ArrayLen {
    Literal(u64),
    Name(String),
}

impl fmt::Display for ArrayLen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArrayLen::Literal(n) => write!(f, "{n}"),
            ArrayLen::Name(s) => write!(f, "{s}"),
        }
    }
}

/// One entry of the `data` block.
#[derive(Debug, Clone, PartialEq)]
pub struct DataDecl {
    pub name: String,
    pub kind: NumKind,
    /// `None` for scalars.
    pub len: Option<ArrayLen>,
    /// `in {0,1}` marker restricting every element to zero or one.
    pub zero_one: bool,
}

/// One entry of the `params` block. Parameters are always real-valued.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamDecl {
    pub name: String,
    pub len: Option<ArrayLen>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

/// The supported distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dist {
    Normal,
    StudentT,
    Uniform,
    Beta,
    Gamma,
    Exponential,
    Bernoulli,
    Binomial,
}

impl Dist {
    pub fn name(self) -> &'static str {
        match self {
            Dist::Normal => "normal",
            Dist::StudentT => "student_t",
            Dist::Uniform => "uniform",
            Dist::Beta => "beta",
            Dist::Gamma => "gamma",
            Dist::Exponential => "exponential",
            Dist::Bernoulli => "bernoulli",
            Dist::Binomial => "binomial",
        }
    }

    pub fn from_name(s: &str) -> Option<Dist> {
        match s {
            "normal" => Some(Dist::Normal),
            "student_t" => Some(Dist::StudentT),
            "uniform" => Some(Dist::Uniform),
            "beta" => Some(Dist::Beta),
            "gamma" => Some(Dist::Gamma),
            "exponential" => Some(Dist::Exponential),
            "bernoulli" => Some(Dist::Bernoulli),
            "binomial" => Some(Dist::Binomial),
            _ => None,
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Dist::StudentT => 3,
            Dist::Exponential | Dist::Bernoulli => 1,
            _ => 2,
        }
    }

    /// Whether values of the distribution are counts rather than reals.
    pub fn is_discrete(self) -> bool {
        matches!(self, Dist::Bernoulli | Dist::Binomial)
    }

    pub fn all() -> [Dist; 8] {
        [
            Dist::Normal,
            Dist::StudentT,
            Dist::Uniform,
            Dist::Beta,
            Dist::Gamma,
            Dist::Exponential,
            Dist::Bernoulli,
            Dist::Binomial,
        ]
    }
}

/// Arithmetic operators of the expression language.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }
}

/// Expressions over literals, declared names, arithmetic, and 1-based
/// element indexing.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Name(String),
    /// `name[index]`, 1-based; the index must be resolvable from data.
    Index(String, Box<Expr>),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    /// Fold an expression made only of literals to its value.
    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Number(v) => Some(*v),
            Expr::Neg(e) => e.as_const().map(|v| -v),
            Expr::Bin(op, l, r) => {
                let (l, r) = (l.as_const()?, r.as_const()?);
                Some(match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => l / r,
                })
            }
            _ => None,
        }
    }

    /// Every name referenced anywhere in the expression.
    pub fn names<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Number(_) => {}
            Expr::Name(n) => out.push(n),
            Expr::Index(n, idx) => {
                out.push(n);
                idx.names(out);
            }
            Expr::Neg(e) => e.names(out),
            Expr::Bin(_, l, r) => {
                l.names(out);
                r.names(out);
            }
        }
    }
}

/// `target ~ dist(args...);`
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingStatement {
    pub target: String,
    pub dist: Dist,
    pub args: Vec<Expr>,
}

/// `name = expr;` inside the goal block.
#[derive(Debug, Clone, PartialEq)]
pub struct GoalDecl {
    pub name: String,
    pub expr: Expr,
}

/// A parsed candidate model.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedModel {
    pub data_decls: Vec<DataDecl>,
    pub params: Vec<ParamDecl>,
    pub statements: Vec<SamplingStatement>,
    pub goals: Vec<GoalDecl>,
}

impl ParsedModel {
    pub fn data_decl(&self, name: &str) -> Option<&DataDecl> {
        self.data_decls.iter().find(|d| d.name == name)
    }

    pub fn param(&self, name: &str) -> Option<&ParamDecl> {
        self.params.iter().find(|p| p.name == name)
    }
}
