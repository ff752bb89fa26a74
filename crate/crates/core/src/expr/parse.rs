use super::{BinOp, Expr, Func, Var};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("unexpected character `{ch}` at col {col}")]
    BadChar { ch: char, col: usize },
    #[error("malformed number `{text}` at col {col}")]
    BadNumber { text: String, col: usize },
    #[error("unexpected {found} at col {col}")]
    Unexpected { found: String, col: usize },
    #[error("unbalanced parenthesis at col {col}")]
    Unbalanced { col: usize },
    #[error("unknown symbol `{name}` at col {col}")]
    UnknownSymbol { name: String, col: usize },
    #[error("unknown function `{name}` at col {col}")]
    UnknownFunction { name: String, col: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| ParseError::BadNumber { text, col })?;
            out.push((Tok::Num(v), col));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => return Err(ParseError::BadChar { ch: c, col }),
        };
        out.push((tok, col));
        i += 1;
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    symbols: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self) -> ParseError {
        match self.peek() {
            Tok::RParen => ParseError::Unbalanced { col: self.col() },
            t => ParseError::Unexpected {
                found: t.describe(),
                col: self.col(),
            },
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            return Ok(Expr::neg(self.factor()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Op('^') {
            self.bump();
            let exp = self.factor()?;
            return Ok(Expr::bin(BinOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn close_paren(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::RParen => {
                self.bump();
                Ok(())
            }
            Tok::End => Err(ParseError::Unbalanced { col: self.col() }),
            t => Err(ParseError::Unexpected {
                found: t.describe(),
                col: self.col(),
            }),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::Ident(name) => {
                let col = self.col();
                self.bump();
                if *self.peek() == Tok::LParen {
                    let func = Func::from_name(&name)
                        .ok_or(ParseError::UnknownFunction { name, col })?;
                    self.bump();
                    let arg = self.expr()?;
                    self.close_paren()?;
                    return Ok(Expr::call(func, arg));
                }
                match self.symbols.iter().position(|s| *s == name) {
                    Some(slot) => Ok(Expr::Var(Var { name, slot })),
                    None => Err(ParseError::UnknownSymbol { name, col }),
                }
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.close_paren()?;
                Ok(inner)
            }
            _ => Err(self.unexpected()),
        }
    }
}

/// Parse `source` against the declared `symbols`.
///
/// Precedence, tightest first: `^` (right-associative), unary minus,
/// `* /`, `+ -`. Columns in errors are 1-based character positions.
pub fn parse(source: &str, symbols: &[&str]) -> Result<Expr, ParseError> {
    let toks = lex(source)?;
    if toks.len() == 1 {
        return Err(ParseError::Empty);
    }
    let mut p = Parser {
        toks,
        pos: 0,
        symbols,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected());
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(name: &str, slot: usize) -> Expr {
        Expr::var(name, slot)
    }

    #[test]
    fn unary_minus_binds_tighter_than_product() {
        let e = parse("-a*x + y", &["a", "x", "y"]).unwrap();
        let expected = Expr::bin(
            BinOp::Add,
            Expr::bin(BinOp::Mul, Expr::neg(v("a", 0)), v("x", 1)),
            v("y", 2),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn rational_term() {
        let e = parse("x^2/(1+x^2)", &["x"]).unwrap();
        let x2 = || Expr::bin(BinOp::Pow, v("x", 0), Expr::Num(2.0));
        let expected = Expr::bin(
            BinOp::Div,
            x2(),
            Expr::bin(BinOp::Add, Expr::Num(1.0), x2()),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn power_is_right_associative_and_above_negation() {
        let e = parse("2^3^2", &[]).unwrap();
        assert_eq!(e.eval_slots(&[]).unwrap(), 512.0);
        let e = parse("-2^2", &[]).unwrap();
        assert_eq!(e.eval_slots(&[]).unwrap(), -4.0);
        let e = parse("2^-1", &[]).unwrap();
        assert_eq!(e.eval_slots(&[]).unwrap(), 0.5);
        let e = parse("1-2-3", &[]).unwrap();
        assert_eq!(e.eval_slots(&[]).unwrap(), -4.0);
        let e = parse("8/4/2", &[]).unwrap();
        assert_eq!(e.eval_slots(&[]).unwrap(), 1.0);
    }

    #[test]
    fn numbers_with_exponents() {
        let e = parse("1.5e-3 + 2E2 + .5", &[]).unwrap();
        assert!((e.eval_slots(&[]).unwrap() - 200.5015).abs() < 1e-12);
    }

    #[test]
    fn unbalanced_parenthesis_reports_column() {
        let err = parse("2*x*(1-x/K", &["x", "K"]).unwrap_err();
        assert_eq!(err, ParseError::Unbalanced { col: 11 });
        assert_eq!(err.to_string(), "unbalanced parenthesis at col 11");
        let err = parse("x)", &["x"]).unwrap_err();
        assert_eq!(err, ParseError::Unbalanced { col: 2 });
    }

    #[test]
    fn lexical_and_symbol_errors() {
        assert_eq!(
            parse("x $ y", &["x", "y"]).unwrap_err(),
            ParseError::BadChar { ch: '$', col: 3 }
        );
        assert_eq!(
            parse("x + z", &["x"]).unwrap_err(),
            ParseError::UnknownSymbol {
                name: "z".into(),
                col: 5
            }
        );
        assert!(matches!(
            parse("tan(x)", &["x"]).unwrap_err(),
            ParseError::UnknownFunction { .. }
        ));
        assert!(matches!(
            parse("x +", &["x"]).unwrap_err(),
            ParseError::Unexpected { .. }
        ));
        assert_eq!(parse("  ", &[]).unwrap_err(), ParseError::Empty);
        assert!(matches!(
            parse("1.2.3", &[]).unwrap_err(),
            ParseError::BadNumber { .. }
        ));
    }
}
