use super::lexer::{tokenize, Token, TokenKind};
use super::{BinOp, Expr, Func, NamedConst, Var};
use crate::error::{Error, Result, SourcePos};

/// Parses an expression. Unknown identifiers and functions are rejected here,
/// not at evaluation time.
pub fn parse(source: &str) -> Result<Expr> {
    let tokens = tokenize(source)?;
    if tokens.is_empty() {
        return Err(Error::Syntax {
            pos: SourcePos(0),
            msg: "empty expression".into(),
        });
    }
    let mut p = Parser {
        tokens,
        idx: 0,
        end: source.len(),
    };
    let e = p.expr()?;
    if let Some(tok) = p.peek() {
        return Err(Error::Syntax {
            pos: tok.pos,
            msg: format!("unexpected `{}`", tok.lexeme),
        });
    }
    Ok(e)
}

struct Parser {
    tokens: Vec<Token>,
    idx: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.idx)
    }

    fn next(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.idx).cloned();
        self.idx += 1;
        tok
    }

    fn peek_op(&self) -> Option<char> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Op(c),
                ..
            }) => Some(*c),
            _ => None,
        }
    }

    fn error_here(&self, msg: &str) -> Error {
        match self.peek() {
            Some(tok) => Error::Syntax {
                pos: tok.pos,
                msg: format!("{msg}, found `{}`", tok.lexeme),
            },
            None => Error::Syntax {
                pos: SourcePos(self.end),
                msg: format!("{msg}, found end of input"),
            },
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.idx += 1;
            let rhs = self.term()?;
            let op = if op == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.idx += 1;
            let rhs = self.factor()?;
            let op = if op == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.unary()?;
        if self.peek_op() == Some('^') {
            self.idx += 1;
            let exponent = self.factor()?;
            return Ok(Expr::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek_op() == Some('-') {
            self.idx += 1;
            let inner = self.primary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error_here("expected a number, identifier or `(`"));
        };
        match tok.kind {
            TokenKind::Number(v) => {
                self.idx += 1;
                Ok(Expr::Const(v))
            }
            TokenKind::LParen => {
                self.idx += 1;
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            TokenKind::Ident(name) => {
                self.idx += 1;
                if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::LParen)) {
                    self.idx += 1;
                    self.call(&name, tok.pos)
                } else {
                    symbol(&name).ok_or(Error::UnknownIdentifier {
                        pos: tok.pos,
                        name,
                    })
                }
            }
            _ => Err(self.error_here("expected a number, identifier or `(`")),
        }
    }

    fn call(&mut self, name: &str, pos: SourcePos) -> Result<Expr> {
        let func = Func::from_name(name).ok_or_else(|| Error::UnknownIdentifier {
            pos,
            name: name.to_string(),
        })?;
        let mut args = vec![self.expr()?];
        while matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Comma)) {
            self.idx += 1;
            args.push(self.expr()?);
        }
        self.expect_rparen()?;
        if args.len() != 1 {
            return Err(Error::Syntax {
                pos,
                msg: format!("`{name}` takes 1 argument, got {}", args.len()),
            });
        }
        Ok(Expr::call(func, args.pop().unwrap()))
    }

    fn expect_rparen(&mut self) -> Result<()> {
        match self.peek().map(|t| &t.kind) {
            Some(TokenKind::RParen) => {
                self.next();
                Ok(())
            }
            _ => Err(self.error_here("expected `)`")),
        }
    }
}

fn symbol(name: &str) -> Option<Expr> {
    Some(match name {
        "t" => Expr::Var(Var::T),
        "x" => Expr::Var(Var::X),
        "y" => Expr::Var(Var::Y),
        "pi" => Expr::Named(NamedConst::Pi),
        "e" => Expr::Named(NamedConst::E),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    #[test]
    fn structural_sum_of_calls() {
        let e = parse("sin(x)+abs(y)").unwrap();
        let want = Expr::binary(
            BinOp::Add,
            Expr::call(Func::Sin, var(Var::X)),
            Expr::call(Func::Abs, var(Var::Y)),
        );
        assert_eq!(e, want);
    }

    #[test]
    fn double_caret_is_syntax_error_at_second_caret() {
        match parse("3*t^^2") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, SourcePos(4)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn power_is_right_associative() {
        let e = parse("t^2^3").unwrap();
        let want = Expr::binary(
            BinOp::Pow,
            var(Var::T),
            Expr::binary(BinOp::Pow, Expr::Const(2.0), Expr::Const(3.0)),
        );
        assert_eq!(e, want);
    }

    #[test]
    fn unary_minus_binds_tighter_than_power() {
        let e = parse("-x^2").unwrap();
        let want = Expr::binary(
            BinOp::Pow,
            Expr::Neg(Box::new(var(Var::X))),
            Expr::Const(2.0),
        );
        assert_eq!(e, want);
        // a negative exponent is still reachable through `factor`
        assert!(parse("2^-1").is_ok());
    }

    #[test]
    fn unknown_names_rejected() {
        assert!(matches!(
            parse("z+1"),
            Err(Error::UnknownIdentifier { pos: SourcePos(0), .. })
        ));
        assert!(matches!(
            parse("t + foo(t)"),
            Err(Error::UnknownIdentifier { pos: SourcePos(4), .. })
        ));
    }

    #[test]
    fn arity_and_trailing_tokens() {
        assert!(matches!(parse("sin(t, x)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("(t"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("t t"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("   "), Err(Error::Syntax { .. })));
        assert!(matches!(parse("2 x"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn left_associative_subtraction() {
        let e = parse("t-1-2").unwrap();
        let want = Expr::binary(
            BinOp::Sub,
            Expr::binary(BinOp::Sub, var(Var::T), Expr::Const(1.0)),
            Expr::Const(2.0),
        );
        assert_eq!(e, want);
    }
}
