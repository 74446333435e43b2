//! Profile expressions: a small arithmetic language over the radial
//! variable `s` and named parameters, with exact symbolic d/ds.
//!
//! ```
//! use renvol::expr::{Bindings, Expression};
//!
//! let f = Expression::parse("1 + s^2 - m/s").unwrap();
//! let params = Bindings::from([("m".to_string(), 2.0)]);
//! assert_eq!(f.eval(1.0, &params).unwrap(), 0.0);
//! assert_eq!(f.derivative().eval(1.0, &params).unwrap(), 4.0);
//! ```

mod deriv;
mod parser;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use parser::{parse_profile_file, ParseError};

/// Parameter bindings. Ordered so that printing and iteration are stable.
pub type Bindings = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub(crate) fn from_name(name: &str) -> Option<Func> {
        match name {
            "exp" => Some(Func::Exp),
            "log" | "ln" => Some(Func::Log),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }
}

/// Syntax tree of a profile function f(s).
///
/// Trees are immutable once built; evaluation is a pure function of the
/// tree, the radius and the bindings.
#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    Const(f64),
    /// The radial coordinate `s`.
    Var,
    Param(String),
    Add(Box<Expression>, Box<Expression>),
    Sub(Box<Expression>, Box<Expression>),
    Mul(Box<Expression>, Box<Expression>),
    Div(Box<Expression>, Box<Expression>),
    /// Integer power; exponents are literals in the source text.
    Pow(Box<Expression>, i32),
    Neg(Box<Expression>),
    Call(Func, Box<Expression>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound parameter `{0}`")]
    Unbound(String),
    #[error("domain error in `{node}` at s = {s}: {reason}")]
    Domain {
        node: String,
        s: f64,
        reason: &'static str,
    },
}

impl Expression {
    pub fn parse(text: &str) -> Result<Expression, ParseError> {
        parser::parse(text)
    }

    /// Free parameter names, sorted.
    pub fn params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut BTreeSet<String>) {
        match self {
            Expression::Const(_) | Expression::Var => {}
            Expression::Param(name) => {
                out.insert(name.clone());
            }
            Expression::Add(a, b)
            | Expression::Sub(a, b)
            | Expression::Mul(a, b)
            | Expression::Div(a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
            Expression::Pow(a, _) | Expression::Neg(a) | Expression::Call(_, a) => {
                a.collect_params(out)
            }
        }
    }

    /// Evaluate at radius `s`.
    ///
    /// Division by zero, `log` of a nonpositive number, `sqrt` of a negative
    /// number and non-finite intermediate results are domain errors that name
    /// the offending subexpression.
    pub fn eval(&self, s: f64, params: &Bindings) -> Result<f64, EvalError> {
        let domain = |node: &Expression, reason| EvalError::Domain {
            node: node.to_string(),
            s,
            reason,
        };
        let value = match self {
            Expression::Const(c) => *c,
            Expression::Var => s,
            Expression::Param(name) => *params
                .get(name)
                .ok_or_else(|| EvalError::Unbound(name.clone()))?,
            Expression::Add(a, b) => a.eval(s, params)? + b.eval(s, params)?,
            Expression::Sub(a, b) => a.eval(s, params)? - b.eval(s, params)?,
            Expression::Mul(a, b) => a.eval(s, params)? * b.eval(s, params)?,
            Expression::Div(a, b) => {
                let num = a.eval(s, params)?;
                let den = b.eval(s, params)?;
                if den == 0.0 {
                    return Err(domain(self, "division by zero"));
                }
                num / den
            }
            Expression::Pow(a, n) => {
                let base = a.eval(s, params)?;
                if base == 0.0 && *n < 0 {
                    return Err(domain(self, "negative power of zero"));
                }
                base.powi(*n)
            }
            Expression::Neg(a) => -a.eval(s, params)?,
            Expression::Call(func, a) => {
                let x = a.eval(s, params)?;
                match func {
                    Func::Exp => x.exp(),
                    Func::Log => {
                        if x <= 0.0 {
                            return Err(domain(self, "log of a nonpositive value"));
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(domain(self, "sqrt of a negative value"));
                        }
                        x.sqrt()
                    }
                }
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(domain(self, "non-finite result"))
        }
    }

    /// Symbolic d/ds with constant folding.
    pub fn derivative(&self) -> Expression {
        deriv::differentiate(self)
    }

    /// `1 + s^2 - self`, with structurally identical terms of the two sums
    /// cancelled before evaluation.
    ///
    /// For profiles written as `1 + s^2 + (lower order terms)` the result
    /// contains only the lower order terms, so it evaluates without the
    /// O(s^2) cancellation a direct subtraction would suffer at large s.
    pub fn hyperbolic_deviation(&self) -> Expression {
        deriv::hyperbolic_deviation(self)
    }

    /// [`hyperbolic_deviation`](Self::hyperbolic_deviation) plus a flag that
    /// is true when the `s^2` term cancelled.
    pub fn hyperbolic_deviation_reduced(&self) -> (Expression, bool) {
        deriv::hyperbolic_deviation_reduced(self)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expression::Add(..) | Expression::Sub(..) => 1,
            Expression::Mul(..) | Expression::Div(..) => 2,
            Expression::Neg(..) => 3,
            Expression::Pow(..) => 4,
            Expression::Const(c) if *c < 0.0 => 3,
            _ => 5,
        }
    }
}

impl From<f64> for Expression {
    fn from(c: f64) -> Self {
        Expression::Const(c)
    }
}

fn write_child(
    f: &mut fmt::Formatter<'_>,
    child: &Expression,
    min_prec: u8,
) -> fmt::Result {
    if child.precedence() < min_prec {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // `{}` on f64 is the shortest representation that round-trips.
            Expression::Const(c) => write!(f, "{c}"),
            Expression::Var => f.write_str("s"),
            Expression::Param(name) => f.write_str(name),
            Expression::Add(a, b) => {
                write_child(f, a, 1)?;
                f.write_str(" + ")?;
                write_child(f, b, 2)
            }
            Expression::Sub(a, b) => {
                write_child(f, a, 1)?;
                f.write_str(" - ")?;
                write_child(f, b, 2)
            }
            Expression::Mul(a, b) => {
                write_child(f, a, 2)?;
                f.write_str("*")?;
                write_child(f, b, 3)
            }
            Expression::Div(a, b) => {
                write_child(f, a, 2)?;
                f.write_str("/")?;
                write_child(f, b, 3)
            }
            Expression::Neg(a) => {
                f.write_str("-")?;
                write_child(f, a, 3)
            }
            Expression::Pow(a, n) => {
                write_child(f, a, 5)?;
                if *n < 0 {
                    write!(f, "^({n})")
                } else {
                    write!(f, "^{n}")
                }
            }
            Expression::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
