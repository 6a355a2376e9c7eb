use super::{BinOp, Expr, Func, Var};
use crate::error::{Error, Result};

/// Parses an expression over `x1..xn`.
///
/// Grammar: numbers, variables, binary `+ - * /`, unary `-`, `^` with a
/// constant integer exponent, and the functions `abs min max sin cos exp sqrt`.
/// Whitespace is insignificant.
pub fn parse_expression(source: &str, n: usize) -> Result<Expr> {
    parse_expression_xy(source, n, 0)
}

/// Parses an expression over `x1..xn` and `y1..ym`.
pub fn parse_expression_xy(source: &str, n: usize, m: usize) -> Result<Expr> {
    let mut parser = Parser {
        src: source,
        bytes: source.as_bytes(),
        pos: 0,
        n,
        m,
    };
    let expr = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.bytes.len() {
        return Err(parser.syntax("unexpected trailing input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    n: usize,
    m: usize,
}

impl Parser<'_> {
    fn syntax(&self, message: &str) -> Error {
        self.syntax_at(self.pos, message)
    }

    fn syntax_at(&self, offset: usize, message: &str) -> Error {
        Error::Syntax {
            offset,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, byte: u8) -> bool {
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, byte: u8) -> Result<()> {
        if self.eat(byte) {
            Ok(())
        } else {
            Err(self.syntax(&format!("expected `{}`", byte as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        self.skip_ws();
        let start = self.pos;
        let negative = self.eat(b'-');
        self.skip_ws();
        let digits_start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if digits_start == self.pos {
            return Err(self.syntax_at(start, "exponent must be a constant integer"));
        }
        if matches!(self.bytes.get(self.pos), Some(b'.' | b'e' | b'E')) {
            return Err(self.syntax_at(start, "exponent must be a constant integer"));
        }
        let magnitude: i32 = self.src[digits_start..self.pos]
            .parse()
            .map_err(|_| self.syntax_at(start, "exponent out of range"))?;
        let exponent = if negative { -magnitude } else { magnitude };
        if self.peek() == Some(b'^') {
            return Err(self.syntax("chained exponents are not supported"));
        }
        Ok(Expr::Pow(Box::new(base), exponent))
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(b) if b.is_ascii_digit() || b == b'.' => self.number(),
            Some(b) if b.is_ascii_alphabetic() || b == b'_' => self.identifier(),
            Some(_) => Err(self.syntax("unexpected character")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.bytes.len() && p.bytes[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut count = digits(self);
        if self.bytes.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            count += digits(self);
        }
        if count == 0 {
            return Err(self.syntax_at(start, "malformed number"));
        }
        if matches!(self.bytes.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.bytes.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
                return Err(self.syntax_at(save, "malformed exponent in number"));
            }
        }
        let value: f64 = self.src[start..self.pos]
            .parse()
            .map_err(|_| self.syntax_at(start, "malformed number"))?;
        if !value.is_finite() {
            return Err(self.syntax_at(start, "number out of range"));
        }
        Ok(Expr::Num(value))
    }

    fn identifier(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = &self.src[start..self.pos];
        if let Some(func) = Func::from_name(name) {
            return self.call(func, start);
        }
        if let Some(var) = self.variable(name) {
            return Ok(Expr::Var(var));
        }
        Err(Error::UnknownIdentifier {
            name: name.to_string(),
            offset: start,
        })
    }

    fn variable(&self, name: &str) -> Option<Var> {
        let (kind, digits) = name.split_at(1);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
            return None;
        }
        let k: usize = digits.parse().ok()?;
        match kind {
            "x" if k <= self.n => Some(Var::X(k - 1)),
            "y" if k <= self.m => Some(Var::Y(k - 1)),
            _ => None,
        }
    }

    fn call(&mut self, func: Func, start: usize) -> Result<Expr> {
        if !self.eat(b'(') {
            return Err(self.syntax(&format!("expected `(` after `{}`", func.name())));
        }
        let mut args = Vec::new();
        if self.peek() != Some(b')') {
            loop {
                args.push(self.expr()?);
                if !self.eat(b',') {
                    break;
                }
            }
        }
        self.expect(b')')?;
        let ok = if func.is_variadic() { args.len() >= 2 } else { args.len() == 1 };
        if !ok {
            return Err(Error::Arity {
                name: func.name().to_string(),
                offset: start,
                expected: if func.is_variadic() { "at least 2" } else { "1" },
                found: args.len(),
            });
        }
        Ok(Expr::Call(func, args))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_documented_examples() {
        let e = parse_expression("x1^2 - 1", 1).unwrap();
        assert_eq!(e.eval_x(&[2.0]), 3.0);
        let e = parse_expression("min((x1+1)^2,(x1-1)^2)", 1).unwrap();
        assert_eq!(e.eval_x(&[0.0]), 1.0);
        let e = parse_expression("abs(x1)*x2", 2).unwrap();
        assert_eq!(e.eval_x(&[-2.0, 3.0]), 6.0);
    }

    #[test]
    fn precedence() {
        let e = parse_expression("-x1^2 + 2*3 - 4/2", 1).unwrap();
        assert_eq!(e.eval_x(&[3.0]), -9.0 + 6.0 - 2.0);
        let e = parse_expression(" 1.5e1 *  x1 ^ -1 ", 1).unwrap();
        assert_eq!(e.eval_x(&[3.0]), 5.0);
        let e = parse_expression("x1 - x1 - x1", 1).unwrap();
        assert_eq!(e.eval_x(&[1.0]), -1.0);
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match parse_expression("x1 + * 2", 1) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_expression("(x1", 1), Err(Error::Syntax { offset: 3, .. })));
        assert!(matches!(parse_expression("x1^1.5", 1), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expression("x1^x1", 1), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expression("", 1), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse_expression("1e999", 1), Err(Error::Syntax { .. })));
    }

    #[test]
    fn unknown_identifiers() {
        assert_eq!(
            parse_expression("x1 + x3", 2),
            Err(Error::UnknownIdentifier { name: "x3".into(), offset: 5 })
        );
        assert!(matches!(parse_expression("x0", 2), Err(Error::UnknownIdentifier { .. })));
        assert!(matches!(parse_expression("y1", 2), Err(Error::UnknownIdentifier { .. })));
        assert!(matches!(parse_expression("log(x1)", 1), Err(Error::UnknownIdentifier { .. })));
        assert!(parse_expression_xy("x1 + y2", 1, 2).is_ok());
    }

    #[test]
    fn arity_mismatch() {
        assert!(matches!(
            parse_expression("min(x1)", 1),
            Err(Error::Arity { found: 1, .. })
        ));
        assert!(matches!(
            parse_expression("abs(x1, 2)", 1),
            Err(Error::Arity { found: 2, .. })
        ));
        assert!(parse_expression("max(x1, 2, -3)", 1).is_ok());
    }
}
