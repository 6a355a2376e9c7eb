//! Expression trees over variables `x1..xn` (and `y1..ym` for two-argument
//! perturbation functions).

mod parser;

use std::fmt;

pub use parser::{parse_expression, parse_expression_xy};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    /// Zero-based index into `x`.
    X(usize),
    /// Zero-based index into `y`.
    Y(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Min,
    Max,
    Sin,
    Cos,
    Exp,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
        }
    }

    pub(crate) fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "abs" => Func::Abs,
            "min" => Func::Min,
            "max" => Func::Max,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    /// `min` and `max` are variadic with at least two arguments.
    fn is_variadic(self) -> bool {
        matches!(self, Func::Min | Func::Max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// Integer power with a constant exponent.
    Pow(Box<Expr>, i32),
    Call(Func, Vec<Expr>),
}

impl Expr {
    /// Evaluates at `(x, y)`. May return NaN or infinities; the caller decides
    /// how to map those onto extended reals.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::X(i)) => x[*i],
            Expr::Var(Var::Y(i)) => y[*i],
            Expr::Neg(e) => -e.eval(x, y),
            Expr::Binary(op, l, r) => {
                let (l, r) = (l.eval(x, y), r.eval(x, y));
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => l / r,
                }
            }
            Expr::Pow(e, k) => e.eval(x, y).powi(*k),
            Expr::Call(f, args) => match f {
                Func::Abs => args[0].eval(x, y).abs(),
                Func::Sin => args[0].eval(x, y).sin(),
                Func::Cos => args[0].eval(x, y).cos(),
                Func::Exp => args[0].eval(x, y).exp(),
                Func::Sqrt => args[0].eval(x, y).sqrt(),
                Func::Min => fold_nan_aware(args, x, y, f64::min),
                Func::Max => fold_nan_aware(args, x, y, f64::max),
            },
        }
    }

    /// Evaluation for expressions over `x` only.
    pub fn eval_x(&self, x: &[f64]) -> f64 {
        self.eval(x, &[])
    }

    /// Largest variable index used, per kind, as counts: `(max_x + 1, max_y + 1)`.
    pub fn variable_extent(&self) -> (usize, usize) {
        let mut extent = (0, 0);
        self.visit(&mut |e| {
            if let Expr::Var(v) = e {
                match v {
                    Var::X(i) => extent.0 = extent.0.max(i + 1),
                    Var::Y(i) => extent.1 = extent.1.max(i + 1),
                }
            }
        });
        extent
    }

    /// Replaces every `y_i` by the constant `y[i]`.
    pub fn substitute_y(&self, y: &[f64]) -> Expr {
        match self {
            Expr::Var(Var::Y(i)) => Expr::Num(y[*i]),
            Expr::Num(_) | Expr::Var(Var::X(_)) => self.clone(),
            Expr::Neg(e) => Expr::Neg(Box::new(e.substitute_y(y))),
            Expr::Pow(e, k) => Expr::Pow(Box::new(e.substitute_y(y)), *k),
            Expr::Binary(op, l, r) => Expr::Binary(*op, Box::new(l.substitute_y(y)), Box::new(r.substitute_y(y))),
            Expr::Call(f, args) => Expr::Call(*f, args.iter().map(|a| a.substitute_y(y)).collect()),
        }
    }

    fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Neg(e) | Expr::Pow(e, _) => e.visit(f),
            Expr::Binary(_, l, r) => {
                l.visit(f);
                r.visit(f);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.visit(f)),
            Expr::Num(_) | Expr::Var(_) => {}
        }
    }
}

// f64::min/max drop NaN operands; a NaN argument must poison the result.
fn fold_nan_aware(args: &[Expr], x: &[f64], y: &[f64], op: fn(f64, f64) -> f64) -> f64 {
    let mut acc = args[0].eval(x, y);
    for a in &args[1..] {
        let v = a.eval(x, y);
        if v.is_nan() || acc.is_nan() {
            return f64::NAN;
        }
        acc = op(acc, v);
    }
    acc
}

/// Canonical, fully parenthesized rendering. Parsing the output yields the
/// same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var(Var::X(i)) => write!(f, "x{}", i + 1),
            Expr::Var(Var::Y(i)) => write!(f, "y{}", i + 1),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expr::Pow(e, k) => write!(f, "({e}^{k})"),
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_expr(n: usize) -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0.0f64..100.0).prop_map(Expr::Num),
            (0..n).prop_map(|i| Expr::Var(Var::X(i))),
        ];
        leaf.prop_recursive(4, 32, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (inner.clone(), inner.clone(), 0..4usize).prop_map(|(l, r, k)| {
                    let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div][k];
                    Expr::Binary(op, Box::new(l), Box::new(r))
                }),
                (inner.clone(), -3i32..5).prop_map(|(e, k)| Expr::Pow(Box::new(e), k)),
                (inner.clone(), 0..5usize).prop_map(|(e, k)| {
                    let f = [Func::Abs, Func::Sin, Func::Cos, Func::Exp, Func::Sqrt][k];
                    Expr::Call(f, vec![e])
                }),
                (prop::collection::vec(inner, 2..4), any::<bool>()).prop_map(|(args, min)| {
                    Expr::Call(if min { Func::Min } else { Func::Max }, args)
                }),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in arb_expr(3)) {
            let printed = e.to_string();
            let reparsed = parse_expression(&printed, 3).unwrap();
            prop_assert_eq!(&reparsed, &e);
            prop_assert_eq!(reparsed.to_string(), printed);
        }

        #[test]
        fn parse_print_parse_is_stable(a in -5.0f64..5.0, b in 0.0f64..5.0) {
            let src = format!("min(x1 - {b}, -x2^2) * abs({a} + x1) / (1 + x2^2)");
            let once = parse_expression(&src, 2).unwrap();
            let twice = parse_expression(&once.to_string(), 2).unwrap();
            prop_assert_eq!(once, twice);
        }
    }

    #[test]
    fn substitution() {
        let e = parse_expression_xy("x1 * y1 + y2", 1, 2).unwrap();
        let s = e.substitute_y(&[2.0, -1.0]);
        assert_eq!(s.variable_extent(), (1, 0));
        assert_eq!(s.eval_x(&[3.0]), 5.0);
    }

    #[test]
    fn nan_poisons_min() {
        let e = parse_expression("min(sqrt(x1), 1)", 1).unwrap();
        assert!(e.eval_x(&[-1.0]).is_nan());
    }
}
