//! Recursive-descent parser for the coordinate expression language.
//!
//! ```text
//! list    := expr (',' expr)*
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' exponent)?
//! exponent:= ['+' | '-'] INTEGER | '(' ['+' | '-'] INTEGER ')'
//! primary := NUMBER | 'x' INDEX | FUNC '(' expr ')' | '(' expr ')'
//! ```

use super::ast::{Expr, Func};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64, String),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let (start_line, start_col) = (line, col);
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let save = i;
                i += 1;
                if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                    i += 1;
                }
                if i < chars.len() && chars[i].is_ascii_digit() {
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                } else {
                    i = save;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value: f64 = text.parse().map_err(|_| Error::Syntax {
                line: start_line,
                column: start_col,
                message: format!("malformed number `{text}`"),
            })?;
            col += i - start;
            out.push(Token {
                tok: Tok::Num(value, text),
                line: start_line,
                column: start_col,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: start_line,
                column: start_col,
            });
            continue;
        }
        if "+-*/^(),".contains(c) {
            out.push(Token {
                tok: Tok::Sym(c),
                line,
                column: col,
            });
            i += 1;
            col += 1;
            continue;
        }
        return Err(Error::Syntax {
            line,
            column: col,
            message: format!("unexpected character `{c}`"),
        });
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    dim: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, t: &Token, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.is_sym(c) {
            self.bump();
            Ok(())
        } else {
            let t = self.peek().clone();
            Err(self.error_at(&t, format!("expected `{c}`, found {}", describe(&t.tok))))
        }
    }

    fn list(&mut self) -> Result<Vec<Expr>> {
        let mut items = vec![self.expr()?];
        while self.is_sym(',') {
            self.bump();
            items.push(self.expr()?);
        }
        let t = self.peek().clone();
        if t.tok != Tok::End {
            return Err(self.error_at(&t, format!("unexpected {}", describe(&t.tok))));
        }
        Ok(items)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.is_sym('+') {
                self.bump();
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.is_sym('-') {
                self.bump();
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.is_sym('*') {
                self.bump();
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.is_sym('/') {
                self.bump();
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.is_sym('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.is_sym('+') {
            self.bump();
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if !self.is_sym('^') {
            return Ok(base);
        }
        self.bump();
        let k = self.exponent()?;
        if self.is_sym('^') {
            let t = self.peek().clone();
            return Err(self.error_at(&t, "chained `^` is ambiguous; add parentheses"));
        }
        Ok(Expr::Pow(Box::new(base), k))
    }

    fn exponent(&mut self) -> Result<i32> {
        let parens = self.is_sym('(');
        if parens {
            self.bump();
        }
        let mut sign = 1i64;
        if self.is_sym('-') {
            self.bump();
            sign = -1;
        } else if self.is_sym('+') {
            self.bump();
        }
        let t = self.bump();
        let k = match &t.tok {
            Tok::Num(v, text)
                if v.fract() == 0.0 && !text.contains(['.', 'e', 'E']) && *v <= i32::MAX as f64 =>
            {
                sign * (*v as i64)
            }
            other => {
                return Err(self.error_at(
                    &t,
                    format!("exponent must be an integer literal, found {}", describe(other)),
                ))
            }
        };
        if parens {
            self.expect_sym(')')?;
        }
        Ok(k as i32)
    }

    fn primary(&mut self) -> Result<Expr> {
        let t = self.bump();
        match &t.tok {
            Tok::Num(v, _) => Ok(Expr::Num(*v)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(f) = Func::from_name(name) {
                    self.expect_sym('(')?;
                    let arg = self.expr()?;
                    self.expect_sym(')')?;
                    return Ok(Expr::Call(f, Box::new(arg)));
                }
                match parse_variable(name) {
                    Some(index) if index >= 1 && index <= self.dim => Ok(Expr::Var(index - 1)),
                    Some(index) => Err(Error::VariableOutOfRange {
                        index,
                        dim: self.dim,
                        line: t.line,
                        column: t.column,
                    }),
                    None => Err(Error::UnknownIdentifier {
                        name: name.clone(),
                        line: t.line,
                        column: t.column,
                    }),
                }
            }
            other => Err(self.error_at(&t, format!("expected an operand, found {}", describe(other)))),
        }
    }
}

fn parse_variable(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    digits.parse().ok()
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(_, text) => format!("number `{text}`"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::End => "end of input".into(),
    }
}

/// Parses a comma-separated list of expressions in `x1..x{dim}`.
pub fn parse_list(src: &str, dim: usize) -> Result<Vec<Expr>> {
    let mut p = Parser {
        toks: tokenize(src)?,
        pos: 0,
        dim,
    };
    p.list()
}

/// Parses a single expression in `x1..x{dim}`.
pub fn parse_expr(src: &str, dim: usize) -> Result<Expr> {
    let mut items = parse_list(src, dim)?;
    if items.len() != 1 {
        return Err(Error::Syntax {
            line: 1,
            column: 1,
            message: format!("expected a single expression, found {}", items.len()),
        });
    }
    Ok(items.pop().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_associativity() {
        let e = parse_expr("1 - 2 - 3", 1).unwrap();
        assert_eq!(e.eval(&[0.0]).unwrap(), -4.0);
        let e = parse_expr("2 * 3 + 4 / 2", 1).unwrap();
        assert_eq!(e.eval(&[0.0]).unwrap(), 8.0);
        let e = parse_expr("-x1^2", 1).unwrap();
        assert_eq!(e.eval(&[3.0]).unwrap(), -9.0);
        let e = parse_expr("x1^-2", 1).unwrap();
        assert_eq!(e.eval(&[2.0]).unwrap(), 0.25);
        let e = parse_expr("x1^(-1)", 1).unwrap();
        assert_eq!(e.eval(&[4.0]).unwrap(), 0.25);
    }

    #[test]
    fn scientific_literals() {
        let e = parse_expr("1.5e2 + .5 + 2E-1", 1).unwrap();
        assert!((e.eval(&[0.0]).unwrap() - 150.7).abs() < 1e-12);
    }

    #[test]
    fn reports_locations() {
        match parse_list("x1 +\n  * x2", 2) {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
        match parse_list("x1 + foo", 1) {
            Err(Error::UnknownIdentifier { name, column, .. }) => {
                assert_eq!(name, "foo");
                assert_eq!(column, 6);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_list("x0", 3),
            Err(Error::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn rejects_fractional_and_chained_powers() {
        assert!(matches!(parse_expr("x1^2.5", 1), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expr("x1^x1", 1), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expr("x1^2^3", 1), Err(Error::Syntax { .. })));
    }

    #[test]
    fn display_round_trips() {
        for src in [
            "x1 - (x2 - x3)",
            "-(x1 * x2) / -x3",
            "(x1 + 2)^3 * sin(x2)^-1",
            "--x1",
            "sqrt(exp(x1) + log(x2)) - cos(-x3)",
            "1 / (x1 / x2)",
        ] {
            let e = parse_expr(src, 3).unwrap();
            let back = parse_expr(&e.to_string(), 3).unwrap();
            assert_eq!(e, back, "{src} -> {e}");
        }
    }
}
