use super::{Expression, Func};

fn is_const(e: &Expression, v: f64) -> bool {
    matches!(e, Expression::Const(c) if *c == v)
}

fn konst(e: &Expression) -> Option<f64> {
    match e {
        Expression::Const(c) => Some(*c),
        _ => None,
    }
}

pub(crate) fn add(a: Expression, b: Expression) -> Expression {
    match (konst(&a), konst(&b)) {
        (Some(x), Some(y)) => Expression::Const(x + y),
        (Some(x), _) if x == 0.0 => b,
        (_, Some(y)) if y == 0.0 => a,
        _ => Expression::Add(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn sub(a: Expression, b: Expression) -> Expression {
    match (konst(&a), konst(&b)) {
        (Some(x), Some(y)) => Expression::Const(x - y),
        (_, Some(y)) if y == 0.0 => a,
        (Some(x), _) if x == 0.0 => neg(b),
        _ => Expression::Sub(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn mul(a: Expression, b: Expression) -> Expression {
    match (konst(&a), konst(&b)) {
        (Some(x), Some(y)) => Expression::Const(x * y),
        (Some(x), _) | (_, Some(x)) if x == 0.0 => Expression::Const(0.0),
        (Some(x), _) if x == 1.0 => b,
        (_, Some(y)) if y == 1.0 => a,
        _ => Expression::Mul(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn div(a: Expression, b: Expression) -> Expression {
    match (konst(&a), konst(&b)) {
        (Some(x), Some(y)) if y != 0.0 => Expression::Const(x / y),
        (Some(x), _) if x == 0.0 && !is_const(&b, 0.0) => Expression::Const(0.0),
        (_, Some(y)) if y == 1.0 => a,
        _ => Expression::Div(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn pow(a: Expression, n: i32) -> Expression {
    match (konst(&a), n) {
        (_, 0) => Expression::Const(1.0),
        (_, 1) => a,
        (Some(x), n) if x != 0.0 || n > 0 => Expression::Const(x.powi(n)),
        _ => Expression::Pow(Box::new(a), n),
    }
}

pub(crate) fn neg(a: Expression) -> Expression {
    match a {
        Expression::Const(c) => Expression::Const(-c),
        Expression::Neg(inner) => *inner,
        other => Expression::Neg(Box::new(other)),
    }
}

fn call(func: Func, a: Expression) -> Expression {
    Expression::Call(func, Box::new(a))
}

pub(crate) fn differentiate(e: &Expression) -> Expression {
    use Expression::*;
    match e {
        Const(_) | Param(_) => Const(0.0),
        Var => Const(1.0),
        Add(a, b) => add(differentiate(a), differentiate(b)),
        Sub(a, b) => sub(differentiate(a), differentiate(b)),
        Mul(a, b) => add(
            mul(differentiate(a), (**b).clone()),
            mul((**a).clone(), differentiate(b)),
        ),
        Div(a, b) => sub(
            div(differentiate(a), (**b).clone()),
            div(
                mul((**a).clone(), differentiate(b)),
                pow((**b).clone(), 2),
            ),
        ),
        Pow(a, n) => mul(
            mul(Const(*n as f64), pow((**a).clone(), n - 1)),
            differentiate(a),
        ),
        Neg(a) => neg(differentiate(a)),
        Call(Func::Exp, a) => mul(e.clone(), differentiate(a)),
        Call(Func::Log, a) => div(differentiate(a), (**a).clone()),
        Call(Func::Sqrt, a) => div(
            differentiate(a),
            mul(Const(2.0), call(Func::Sqrt, (**a).clone())),
        ),
    }
}

/// Signed summands of a (possibly nested) sum.
fn flatten_sum(e: &Expression, positive: bool, out: &mut Vec<(bool, Expression)>) {
    match e {
        Expression::Add(a, b) => {
            flatten_sum(a, positive, out);
            flatten_sum(b, positive, out);
        }
        Expression::Sub(a, b) => {
            flatten_sum(a, positive, out);
            flatten_sum(b, !positive, out);
        }
        Expression::Neg(a) => flatten_sum(a, !positive, out),
        other => out.push((positive, other.clone())),
    }
}

fn s_squared() -> Expression {
    Expression::Pow(Box::new(Expression::Var), 2)
}

/// `1 + s^2 - f` with like terms cancelled. The flag reports whether the
/// `s^2` term was eliminated, i.e. whether the result is free of the
/// leading-order cancellation.
pub(crate) fn hyperbolic_deviation_reduced(f: &Expression) -> (Expression, bool) {
    let mut terms = vec![(true, Expression::Const(1.0)), (true, s_squared())];
    let mut rest = Vec::new();
    flatten_sum(f, false, &mut rest);
    terms.extend(rest);

    // pairwise cancellation of identical non-constant terms
    let mut alive = vec![true; terms.len()];
    for i in 0..terms.len() {
        if !alive[i] || matches!(terms[i].1, Expression::Const(_)) {
            continue;
        }
        for j in (i + 1)..terms.len() {
            if alive[j] && terms[j].0 != terms[i].0 && terms[j].1 == terms[i].1 {
                alive[i] = false;
                alive[j] = false;
                break;
            }
        }
    }

    let mut constant = 0.0;
    let mut kept = Vec::new();
    for ((positive, term), live) in terms.into_iter().zip(alive) {
        if !live {
            continue;
        }
        match term {
            Expression::Const(c) => constant += if positive { c } else { -c },
            other => kept.push((positive, other)),
        }
    }

    let reduced = !kept.iter().any(|(_, t)| *t == s_squared());
    let mut out = Expression::Const(constant);
    for (positive, term) in kept {
        out = if positive { add(out, term) } else { sub(out, term) };
    }
    (out, reduced)
}

pub(crate) fn hyperbolic_deviation(f: &Expression) -> Expression {
    hyperbolic_deviation_reduced(f).0
}
