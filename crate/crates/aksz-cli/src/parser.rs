//! Recursive-descent parser for model files.

use crate::ast::*;
use crate::error::{ModelError, Pos};
use crate::lexer::{lex, Tok, Token};

pub fn parse_model(src: &str) -> Result<ModelFile, ModelError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, i: 0 };
    let mut stmts = Vec::new();
    loop {
        p.skip_newlines();
        if p.peek() == &Tok::Eof {
            break;
        }
        stmts.push(p.stmt()?);
        match p.peek() {
            Tok::Newline | Tok::Eof => {}
            other => {
                let msg = format!("unexpected {other} after statement");
                return Err(ModelError::syntax(p.pos(), msg, "put each statement on its own line"));
            }
        }
    }
    Ok(ModelFile { stmts })
}

/// Parses a single expression (used for matrix entries in data files).
pub fn parse_expr(src: &str) -> Result<SExpr, ModelError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, i: 0 };
    let e = p.expr()?;
    p.skip_newlines();
    if p.peek() != &Tok::Eof {
        return Err(ModelError::syntax(p.pos(), format!("unexpected {}", p.peek()), "write a single expression"));
    }
    Ok(e)
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn skip_newlines(&mut self) {
        while self.peek() == &Tok::Newline {
            self.bump();
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok, hint: &str) -> Result<Pos, ModelError> {
        if self.peek() == &t {
            Ok(self.bump().pos)
        } else {
            Err(ModelError::syntax(self.pos(), format!("expected {t}, found {}", self.peek()), hint))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ModelError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => Err(ModelError::syntax(
                self.pos(),
                format!("expected {what}, found {other}"),
                format!("write a name for the {what}"),
            )),
        }
    }

    fn int(&mut self) -> Result<i32, ModelError> {
        let neg = self.eat(&Tok::Minus);
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Number(s) if !s.contains('.') => {
                self.bump();
                let v: i32 = s
                    .parse()
                    .map_err(|_| ModelError::syntax(pos, format!("integer `{s}` out of range"), "use a smaller degree"))?;
                Ok(if neg { -v } else { v })
            }
            other => Err(ModelError::syntax(
                pos,
                format!("expected an integer degree, found {other}"),
                "degrees are integers such as `1` or `-2`",
            )),
        }
    }

    fn stmt(&mut self) -> Result<Spanned<Stmt>, ModelError> {
        let pos = self.pos();
        let kw = match self.peek().clone() {
            Tok::Ident(s) => s,
            other => {
                return Err(ModelError::syntax(
                    pos,
                    format!("expected a statement keyword, found {other}"),
                    "statements start with `model`, `space`, `poly`, `check`, …",
                ))
            }
        };
        self.bump();
        let node = match kw.as_str() {
            "model" => match self.bump().tok {
                Tok::Str(s) | Tok::Ident(s) => Stmt::Model(s),
                other => {
                    return Err(ModelError::syntax(
                        pos,
                        format!("expected a model name, found {other}"),
                        "write `model \"name\"`",
                    ))
                }
            },
            "space" => {
                let name = self.ident("space name")?;
                self.expect(Tok::LBrace, "write `space M { x: 0, p: 1 }`")?;
                let mut coords = Vec::new();
                while self.peek() != &Tok::RBrace {
                    let c = self.ident("coordinate name")?;
                    self.expect(Tok::Colon, "give each coordinate a degree, e.g. `x: 0`")?;
                    coords.push((c, self.int()?));
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(Tok::RBrace, "close the coordinate list with `}`")?;
                Stmt::Space { name, coords }
            }
            "vector" => {
                let name = self.ident("vector name")?;
                self.expect(Tok::Colon, "write `vector ψ : g = [ψ1, ψ2, ψ3]`")?;
                let carrier = self.ident("algebra or representation")?;
                self.expect(Tok::Eq, "write `vector ψ : g = [ψ1, ψ2, ψ3]`")?;
                self.expect(Tok::LBracket, "list the components in `[...]`")?;
                let mut comps = Vec::new();
                while self.peek() != &Tok::RBracket {
                    comps.push(self.ident("coordinate name")?);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(Tok::RBracket, "close the component list with `]`")?;
                Stmt::Vector { name, carrier, comps }
            }
            "poly" => {
                let name = self.ident("polynomial name")?;
                match self.peek() {
                    Tok::Ident(s) if s == "on" => {
                        self.bump();
                    }
                    _ => return Err(ModelError::syntax(self.pos(), "expected `on`", "write `poly θ on M = ...`")),
                }
                let on = self.ident("space name")?;
                let degree = if self.eat(&Tok::Colon) { Some(self.int()?) } else { None };
                self.expect(Tok::Eq, "write `poly θ on M = ...`")?;
                Stmt::Poly {
                    name,
                    on,
                    degree,
                    value: self.expr()?,
                }
            }
            "check" => {
                let kind = self.ident("check kind")?;
                self.expect(Tok::LParen, "write `check verify(T)`")?;
                let args = self.args()?;
                Stmt::Check { kind, args }
            }
            other => match DeclKind::from_keyword(other) {
                Some(kind) => {
                    let name = self.ident("declaration name")?;
                    self.expect(Tok::Eq, &format!("write `{other} {name} = ...`"))?;
                    Stmt::Decl {
                        kind,
                        name,
                        value: self.expr()?,
                    }
                }
                None => {
                    return Err(ModelError::syntax(
                        pos,
                        format!("unknown statement `{other}`"),
                        "statements are model, space, vector, poly, check, param, algebra, rep, pairing, target, bundle, bv, pre, loop",
                    ))
                }
            },
        };
        Ok(Spanned { node, pos })
    }

    /// Arguments after `(` up to and including `)`.
    fn args(&mut self) -> Result<Vec<Arg>, ModelError> {
        let mut args = Vec::new();
        while self.peek() != &Tok::RParen {
            let key = match (self.peek().clone(), self.peek_at(1)) {
                (Tok::Ident(k), Tok::Eq) => {
                    self.bump();
                    self.bump();
                    Some(k)
                }
                _ => None,
            };
            args.push(Arg { key, value: self.expr()? });
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RParen, "close the argument list with `)`")?;
        Ok(args)
    }

    pub fn expr(&mut self) -> Result<SExpr, ModelError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let pos = self.bump().pos;
            let rhs = self.term()?;
            lhs = Spanned {
                node: Expr::Bin(op, Box::new(lhs), Box::new(rhs)),
                pos,
            };
        }
    }

    fn term(&mut self) -> Result<SExpr, ModelError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            let pos = self.bump().pos;
            let rhs = self.unary()?;
            lhs = Spanned {
                node: Expr::Bin(op, Box::new(lhs), Box::new(rhs)),
                pos,
            };
        }
    }

    fn unary(&mut self) -> Result<SExpr, ModelError> {
        if self.peek() == &Tok::Minus {
            let pos = self.bump().pos;
            let inner = self.unary()?;
            return Ok(Spanned {
                node: Expr::Neg(Box::new(inner)),
                pos,
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<SExpr, ModelError> {
        let base = self.atom()?;
        if self.peek() == &Tok::Caret {
            let pos = self.bump().pos;
            let exp = self.unary()?;
            return Ok(Spanned {
                node: Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)),
                pos,
            });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<SExpr, ModelError> {
        let pos = self.pos();
        let node = match self.peek().clone() {
            Tok::Number(s) => {
                self.bump();
                Expr::Num(s)
            }
            Tok::Str(s) => {
                self.bump();
                Expr::Str(s)
            }
            Tok::Ident(name) => {
                self.bump();
                if self.eat(&Tok::LParen) {
                    let args = self.args()?;
                    if name == "∂" || name == "deriv" {
                        match args.as_slice() {
                            [Arg {
                                key: None,
                                value: Spanned { node: Expr::Ident(x), .. },
                            }, Arg { key: None, value: f }] => Expr::Deriv(x.clone(), Box::new(f.clone())),
                            _ => return Err(ModelError::syntax(pos, "malformed derivative", "write `∂(x, f)` with a variable name `x`")),
                        }
                    } else {
                        Expr::Call(name, args)
                    }
                } else {
                    Expr::Ident(name)
                }
            }
            Tok::LParen => {
                self.bump();
                let first = self.expr()?;
                if self.eat(&Tok::Comma) {
                    let second = self.expr()?;
                    self.expect(Tok::RParen, "a pairing is written `(a, b)`")?;
                    Expr::Pairing(Box::new(first), Box::new(second))
                } else {
                    self.expect(Tok::RParen, "close the parenthesis")?;
                    return Ok(first);
                }
            }
            Tok::LAngle => {
                self.bump();
                let first = self.expr()?;
                self.expect(Tok::Comma, "a natural pairing is written `⟨a, b⟩`")?;
                let second = self.expr()?;
                self.expect(Tok::RAngle, "close the pairing with `⟩`")?;
                Expr::Natural(Box::new(first), Box::new(second))
            }
            Tok::LBracket => {
                self.bump();
                let mut items = Vec::new();
                while self.peek() != &Tok::RBracket {
                    items.push(self.expr()?);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(Tok::RBracket, "close the list with `]`")?;
                Expr::List(items)
            }
            other => {
                return Err(ModelError::syntax(
                    pos,
                    format!("expected an expression, found {other}"),
                    "check for a missing operand",
                ))
            }
        };
        Ok(Spanned { node, pos })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Expr {
        parse_expr(s).unwrap().node
    }

    #[test]
    fn precedence() {
        let Expr::Bin(BinOp::Add, _, r) = e("a + b*c^2") else { panic!() };
        assert!(matches!(r.node, Expr::Bin(BinOp::Mul, _, _)));
        assert!(matches!(e("-a*b"), Expr::Bin(BinOp::Mul, _, _)));
        assert!(matches!(e("-a^2"), Expr::Neg(_)));
    }

    #[test]
    fn pairings_and_brackets() {
        assert!(matches!(e("(ψ, [ψ, ψ])"), Expr::Pairing(..)));
        assert!(matches!(e("⟨ξ, ψ⟩"), Expr::Natural(..)));
        assert!(matches!(e("<ξ, ψ>"), Expr::Natural(..)));
        assert!(matches!(e("(a)"), Expr::Ident(_)));
        assert!(matches!(e("∂(x, x^2)"), Expr::Deriv(..)));
    }

    #[test]
    fn keyword_arguments() {
        let Expr::Call(f, args) = e("bf(g, D=3)") else { panic!() };
        assert_eq!(f, "bf");
        assert_eq!(args[1].key.as_deref(), Some("D"));
    }

    #[test]
    fn empty_file() {
        assert_eq!(parse_model("").unwrap(), ModelFile::default());
        assert_eq!(parse_model("\n# only a comment\n").unwrap(), ModelFile::default());
    }

    #[test]
    fn errors_have_positions() {
        let err = parse_model("space M { x 0 }").unwrap_err();
        assert_eq!(err.pos, Some(Pos { line: 1, col: 13 }));
        assert!(!err.hint.is_empty());
        assert!(parse_model("frobnicate x = 1").is_err());
        assert!(parse_model("poly θ on M = (a, b").is_err());
    }
}
