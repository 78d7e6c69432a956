//! Recursive-descent front end for the expression grammar.

use super::builtins::{q2, qp};
use super::{DemushkinAtom, Expr};
use crate::error::{Error, Result};
use crate::gf2::BitVec;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Digits(String),
    LParen,
    RParen,
    Comma,
    Semi,
    Star,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        let tok = match c {
            c if c.is_whitespace() => {
                bump(&mut chars);
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '*' => Tok::Star,
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                    s.push(bump(&mut chars));
                }
                out.push(Token {
                    tok: Tok::Digits(s),
                    line: tl,
                    column: tc,
                });
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                let mut s = String::new();
                while chars.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
                    s.push(bump(&mut chars));
                }
                out.push(Token {
                    tok: Tok::Ident(s),
                    line: tl,
                    column: tc,
                });
                continue;
            }
            other => {
                return Err(Error::Syntax {
                    line: tl,
                    column: tc,
                    message: format!("unexpected character {other:?}"),
                })
            }
        };
        bump(&mut chars);
        out.push(Token {
            tok,
            line: tl,
            column: tc,
        });
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error_at(t: &Token, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        let t = self.next();
        if t.tok == tok {
            Ok(())
        } else {
            Err(Self::error_at(&t, format!("expected {what}")))
        }
    }

    fn int(&mut self) -> Result<usize> {
        let t = self.next();
        match &t.tok {
            Tok::Digits(s) => s
                .parse()
                .map_err(|_| Self::error_at(&t, format!("integer {s} is too large"))),
            _ => Err(Self::error_at(&t, "expected an integer")),
        }
    }

    fn bits(&mut self) -> Result<BitVec> {
        let t = self.next();
        match &t.tok {
            Tok::Digits(s) => s
                .parse::<BitVec>()
                .map_err(|e| Self::error_at(&t, format!("bad bit string: {e}"))),
            _ => Err(Self::error_at(&t, "expected a bit string")),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut factors = vec![self.factor()?];
        while self.peek().tok == Tok::Star {
            self.next();
            factors.push(self.factor()?);
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Expr::FreeProd(factors)
        })
    }

    fn factor(&mut self) -> Result<Expr> {
        let t = self.next();
        match &t.tok {
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Digits(s) if s == "1" => Ok(Expr::Trivial),
            Tok::Ident(name) => match name.as_str() {
                "C2" => Ok(Expr::C2),
                "Q2" => Ok(q2()),
                "F" => self.free(&t),
                "D" => self.demushkin(&t),
                "GR" => {
                    self.expect(Tok::LParen, "'(' after GR")?;
                    let m = self.int()?;
                    if m == 0 {
                        return Err(Error::Invalid("GR(m, _) needs m >= 1".into()));
                    }
                    self.expect(Tok::Comma, "','")?;
                    let base = self.expr()?;
                    self.expect(Tok::RParen, "')'")?;
                    Ok(Expr::group_ring(m, base))
                }
                "Qp" => {
                    self.expect(Tok::LParen, "'(' after Qp")?;
                    let p = self.int()?;
                    self.expect(Tok::RParen, "')'")?;
                    qp(p)
                }
                other => Err(Self::error_at(&t, format!("unknown block {other:?}"))),
            },
            _ => Err(Self::error_at(&t, "expected a factor")),
        }
    }

    fn free(&mut self, at: &Token) -> Result<Expr> {
        self.expect(Tok::LParen, "'(' after F")?;
        let rank = self.int()?;
        let e = if self.peek().tok == Tok::Comma {
            self.next();
            self.bits()?
        } else {
            if rank > crate::gf2::MAX_DIM {
                return Err(Self::error_at(at, format!("rank {rank} is too large")));
            }
            BitVec::zero(rank)
        };
        self.expect(Tok::RParen, "')'")?;
        let e = Expr::Free { rank, e };
        e.validate()?;
        Ok(e)
    }

    fn demushkin(&mut self, at: &Token) -> Result<Expr> {
        self.expect(Tok::LParen, "'(' after D")?;
        let n = self.int()?;
        self.expect(Tok::Semi, "';'")?;
        let mut rows = vec![self.bits()?];
        while self.peek().tok == Tok::Comma {
            self.next();
            rows.push(self.bits()?);
        }
        self.expect(Tok::Semi, "';'")?;
        let e = self.bits()?;
        self.expect(Tok::RParen, "')'")?;
        if rows.len() != n {
            return Err(Self::error_at(
                at,
                format!("D({n}; ...) lists {} rows", rows.len()),
            ));
        }
        Ok(Expr::Demushkin(DemushkinAtom::new(rows, e)?))
    }
}

/// Parses and validates an expression. The result is not canonicalized.
pub fn parse(text: &str) -> Result<Expr> {
    let mut parser = Parser {
        tokens: lex(text)?,
        pos: 0,
    };
    let e = parser.expr()?;
    let t = parser.next();
    if t.tok != Tok::End {
        return Err(Parser::error_at(&t, "unexpected trailing input"));
    }
    e.validate()?;
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructor_mapping() {
        assert_eq!(
            parse("F(1) * C2").unwrap(),
            Expr::FreeProd(vec![Expr::free(1), Expr::C2])
        );
        assert_eq!(parse("GR(2, C2)").unwrap(), Expr::group_ring(2, Expr::C2));
        assert_eq!(parse("1").unwrap(), Expr::Trivial);
    }

    #[test]
    fn demushkin_validity() {
        let ok = parse("D(2; 01,10; 00)").unwrap();
        let Expr::Demushkin(atom) = ok else { panic!() };
        assert!(atom.is_alternating());
        // symmetric but q(x0,x0) = 1 while e = 0
        assert!(matches!(parse("D(2; 11,10; 00)"), Err(Error::Invalid(_))));
        assert!(matches!(parse("D(2; 01,00; 00)"), Err(Error::Invalid(m)) if m.contains("symmetric")));
        assert!(matches!(parse("D(2; 00,00; 00)"), Err(Error::Invalid(m)) if m.contains("degenerate")));
        assert!(parse("D(3; 01,10; 00)").is_err());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse("F(1) *\n  GR(1 C2)") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 8)),
            other => panic!("{other:?}"),
        }
        match parse("F(1) + C2") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (1, 6)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("F(1)) "), Err(Error::Syntax { .. })));
        assert!(matches!(parse("X(1)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse(""), Err(Error::Syntax { .. })));
    }

    #[test]
    fn validity_errors() {
        assert!(matches!(parse("F(0)"), Err(Error::Invalid(_))));
        assert!(matches!(parse("F(2,1)"), Err(Error::Invalid(_))));
        assert!(matches!(parse("GR(0,C2)"), Err(Error::Invalid(_))));
        assert!(parse("Qp(9)").is_err());
        assert!(parse("Qp(2)").is_err());
    }
}
