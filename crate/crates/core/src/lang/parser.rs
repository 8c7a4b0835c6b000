use std::sync::Arc;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::{LangError, ParseError};

/// Parse a complete module.
pub fn parse(file: &str, source: &str) -> Result<Program, LangError> {
    parse_with(file, source, false)
}

/// Parse text handed to `eval`: identical to a module, except that a final
/// expression statement may omit its semicolon.
pub fn parse_eval(file: &str, source: &str) -> Result<Program, LangError> {
    parse_with(file, source, true)
}

fn parse_with(file: &str, source: &str, lenient_tail: bool) -> Result<Program, LangError> {
    let tokens = tokenize(source)?;
    let mut p = Parser {
        tokens,
        idx: 0,
        lenient_tail,
    };
    let mut body = Vec::new();
    while !p.at(&Tok::Eof) {
        body.push(p.stmt()?);
    }
    Ok(Program {
        file: Arc::from(file),
        body,
    })
}

struct Parser {
    tokens: Vec<Token>,
    idx: usize,
    lenient_tail: bool,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.idx]
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.idx + n).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn at(&self, t: &Tok) -> bool {
        &self.peek().tok == t
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.idx].clone();
        if self.idx + 1 < self.tokens.len() {
            self.idx += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let t = self.peek();
        ParseError {
            pos: t.pos,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.describe(),
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<Token> {
        if self.at(&t) {
            Ok(self.bump())
        } else {
            Err(self.error(&[&format!("`{}`", t.text())]))
        }
    }

    fn ident(&mut self) -> PResult<(String, Pos)> {
        match &self.peek().tok {
            Tok::Ident(name) => {
                let name = name.clone();
                let pos = self.bump().pos;
                Ok((name, pos))
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn semi(&mut self) -> PResult<()> {
        if self.lenient_tail && self.at(&Tok::Eof) {
            return Ok(());
        }
        self.expect(Tok::Semi).map(|_| ())
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect(Tok::LBrace)?;
        let mut body = Vec::new();
        while !self.at(&Tok::RBrace) {
            if self.at(&Tok::Eof) {
                return Err(self.error(&["`}`"]));
            }
            body.push(self.stmt()?);
        }
        self.bump();
        Ok(body)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let pos = self.peek().pos;
        let kind = match self.peek().tok {
            Tok::Var | Tok::Let => {
                let s = self.var_decl()?;
                self.semi()?;
                s
            }
            Tok::If => self.if_stmt()?,
            Tok::While => {
                self.bump();
                self.expect(Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(Tok::RParen)?;
                let body = self.block()?;
                StmtKind::While { cond, body }
            }
            Tok::For => self.for_stmt()?,
            Tok::Function if matches!(self.peek_at(1), Tok::Ident(_)) => {
                StmtKind::Function(self.function()?)
            }
            Tok::Return => {
                self.bump();
                let value = if self.at(&Tok::Semi) || (self.lenient_tail && self.at(&Tok::Eof)) {
                    None
                } else {
                    Some(self.expr()?)
                };
                self.semi()?;
                StmtKind::Return(value)
            }
            Tok::LBrace => StmtKind::Block(self.block()?),
            _ => {
                let s = self.simple_stmt()?;
                self.semi()?;
                s
            }
        };
        Ok(Stmt { kind, pos })
    }

    fn var_decl(&mut self) -> PResult<StmtKind> {
        let kind = match self.bump().tok {
            Tok::Var => DeclKind::Var,
            _ => DeclKind::Let,
        };
        let (name, _) = self.ident()?;
        self.expect(Tok::Eq)?;
        let init = self.expr()?;
        Ok(StmtKind::VarDecl { kind, name, init })
    }

    /// An assignment or expression statement without its terminator.
    fn simple_stmt(&mut self) -> PResult<StmtKind> {
        let target = self.expr()?;
        if self.at(&Tok::Eq) {
            let valid = matches!(target.kind, ExprKind::Ident(_) | ExprKind::Member { .. });
            if !valid {
                return Err(ParseError {
                    pos: target.pos,
                    expected: vec!["assignable expression".into()],
                    found: "expression".into(),
                });
            }
            self.bump();
            let value = self.expr()?;
            Ok(StmtKind::Assign { target, value })
        } else {
            Ok(StmtKind::Expr(target))
        }
    }

    fn if_stmt(&mut self) -> PResult<StmtKind> {
        self.expect(Tok::If)?;
        self.expect(Tok::LParen)?;
        let cond = self.expr()?;
        self.expect(Tok::RParen)?;
        let then_branch = self.block()?;
        let else_branch = if self.at(&Tok::Else) {
            self.bump();
            if self.at(&Tok::If) {
                let pos = self.peek().pos;
                let nested = self.if_stmt()?;
                Some(vec![Stmt { kind: nested, pos }])
            } else {
                Some(self.block()?)
            }
        } else {
            None
        };
        Ok(StmtKind::If {
            cond,
            then_branch,
            else_branch,
        })
    }

    fn for_stmt(&mut self) -> PResult<StmtKind> {
        self.expect(Tok::For)?;
        self.expect(Tok::LParen)?;
        let decl_in = matches!(self.peek().tok, Tok::Var | Tok::Let)
            && matches!(self.peek_at(1), Tok::Ident(_))
            && matches!(self.peek_at(2), Tok::In);
        let bare_in = matches!(self.peek().tok, Tok::Ident(_)) && matches!(self.peek_at(1), Tok::In);
        if decl_in || bare_in {
            let decl = if decl_in {
                Some(match self.bump().tok {
                    Tok::Var => DeclKind::Var,
                    _ => DeclKind::Let,
                })
            } else {
                None
            };
            let (var, var_pos) = self.ident()?;
            self.expect(Tok::In)?;
            let object = self.expr()?;
            self.expect(Tok::RParen)?;
            let body = self.block()?;
            return Ok(StmtKind::ForIn {
                decl,
                var,
                var_pos,
                object,
                body,
            });
        }
        let init_pos = self.peek().pos;
        let init_kind = if matches!(self.peek().tok, Tok::Var | Tok::Let) {
            self.var_decl()?
        } else {
            self.simple_stmt()?
        };
        self.expect(Tok::Semi)?;
        let cond = self.expr()?;
        self.expect(Tok::Semi)?;
        let update_pos = self.peek().pos;
        let update_kind = self.simple_stmt()?;
        self.expect(Tok::RParen)?;
        let body = self.block()?;
        Ok(StmtKind::For {
            init: Box::new(Stmt {
                kind: init_kind,
                pos: init_pos,
            }),
            cond,
            update: Box::new(Stmt {
                kind: update_kind,
                pos: update_pos,
            }),
            body,
        })
    }

    fn function(&mut self) -> PResult<Arc<Function>> {
        let pos = self.expect(Tok::Function)?.pos;
        let name = match &self.peek().tok {
            Tok::Ident(_) => Some(self.ident()?.0),
            _ => None,
        };
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        while !self.at(&Tok::RParen) {
            params.push(self.ident()?.0);
            if !self.at(&Tok::RParen) {
                self.expect(Tok::Comma)?;
            }
        }
        self.bump();
        // A function body is always a fresh statement list; the lenient tail
        // only applies to the outermost eval text.
        let lenient = std::mem::replace(&mut self.lenient_tail, false);
        let body = self.block();
        self.lenient_tail = lenient;
        Ok(Arc::new(Function {
            name,
            params,
            body: body?,
            pos,
        }))
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binary_op(&self) -> Option<BinaryOp> {
        Some(match self.peek().tok {
            Tok::Plus => BinaryOp::Add,
            Tok::Minus => BinaryOp::Sub,
            Tok::Star => BinaryOp::Mul,
            Tok::Slash => BinaryOp::Div,
            Tok::Percent => BinaryOp::Rem,
            Tok::EqEq => BinaryOp::Eq,
            Tok::NotEq => BinaryOp::Ne,
            Tok::Lt => BinaryOp::Lt,
            Tok::Gt => BinaryOp::Gt,
            Tok::Le => BinaryOp::Le,
            Tok::Ge => BinaryOp::Ge,
            Tok::AndAnd => BinaryOp::And,
            Tok::OrOr => BinaryOp::Or,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binary_op() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.bump();
            let rhs = self.binary(prec + 1)?;
            let pos = lhs.pos_start();
            lhs = Expr::new(
                ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                pos,
            );
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let op = match self.peek().tok {
            Tok::Bang => UnaryOp::Not,
            Tok::Minus => UnaryOp::Neg,
            Tok::Delete => UnaryOp::Delete,
            _ => return self.postfix(),
        };
        let pos = self.bump().pos;
        let operand = self.unary()?;
        if op == UnaryOp::Delete && !matches!(operand.kind, ExprKind::Member { .. }) {
            return Err(ParseError {
                pos: operand.pos,
                expected: vec!["property access after `delete`".into()],
                found: "expression".into(),
            });
        }
        Ok(Expr::new(
            ExprKind::Unary {
                op,
                operand: Box::new(operand),
            },
            pos,
        ))
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            match self.peek().tok {
                Tok::Dot => {
                    self.bump();
                    let (name, pos) = self.property_name()?;
                    e = Expr::new(
                        ExprKind::Member {
                            object: Box::new(e),
                            property: Property::Static(name),
                        },
                        pos,
                    );
                }
                Tok::LBracket => {
                    let pos = self.bump().pos;
                    let index = self.expr()?;
                    self.expect(Tok::RBracket)?;
                    e = Expr::new(
                        ExprKind::Member {
                            object: Box::new(e),
                            property: Property::Dynamic(Box::new(index)),
                        },
                        pos,
                    );
                }
                Tok::LParen => {
                    let pos = self.bump().pos;
                    let mut args = Vec::new();
                    while !self.at(&Tok::RParen) {
                        args.push(self.expr()?);
                        if !self.at(&Tok::RParen) {
                            self.expect(Tok::Comma)?;
                        }
                    }
                    self.bump();
                    e = match e.kind {
                        ExprKind::Ident(ref name) if args.len() == 1 && name == "require" => {
                            Expr::new(
                                ExprKind::Import {
                                    arg: Box::new(args.pop().expect("one argument")),
                                },
                                e.pos,
                            )
                        }
                        ExprKind::Ident(ref name) if args.len() == 1 && name == "eval" => Expr::new(
                            ExprKind::Eval {
                                arg: Box::new(args.pop().expect("one argument")),
                            },
                            e.pos,
                        ),
                        _ => Expr::new(
                            ExprKind::Call {
                                callee: Box::new(e),
                                args,
                            },
                            pos,
                        ),
                    };
                }
                _ => return Ok(e),
            }
        }
    }

    /// Property names after `.` may be keywords (`a.delete`, `x.in`).
    fn property_name(&mut self) -> PResult<(String, Pos)> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Ident(name) => {
                self.bump();
                Ok((name, t.pos))
            }
            ref kw if !kw.text().is_empty() && kw.text().chars().all(|c| c.is_ascii_alphabetic()) => {
                self.bump();
                Ok((kw.text().to_string(), t.pos))
            }
            _ => Err(self.error(&["property name"])),
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let t = self.peek().clone();
        let kind = match t.tok {
            Tok::Ident(name) => {
                self.bump();
                ExprKind::Ident(name)
            }
            Tok::Num(n) => {
                self.bump();
                ExprKind::Num(n)
            }
            Tok::Str(s) => {
                self.bump();
                ExprKind::Str(s)
            }
            Tok::True => {
                self.bump();
                ExprKind::Bool(true)
            }
            Tok::False => {
                self.bump();
                ExprKind::Bool(false)
            }
            Tok::Null => {
                self.bump();
                ExprKind::Null
            }
            Tok::Function => ExprKind::Function(self.function()?),
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                return Ok(e);
            }
            Tok::LBrace => {
                self.bump();
                let mut fields = Vec::new();
                while !self.at(&Tok::RBrace) {
                    let key = match self.peek().tok.clone() {
                        Tok::Str(s) => {
                            self.bump();
                            s
                        }
                        _ => self.property_name()?.0,
                    };
                    self.expect(Tok::Colon)?;
                    let value = self.expr()?;
                    fields.push((key, value));
                    if self.at(&Tok::Comma) {
                        self.bump();
                    } else if !self.at(&Tok::RBrace) {
                        return Err(self.error(&["`,`", "`}`"]));
                    }
                }
                self.bump();
                ExprKind::Object(fields)
            }
            _ => return Err(self.error(&["expression"])),
        };
        Ok(Expr::new(kind, t.pos))
    }
}

impl Expr {
    /// Leftmost source position covered by the expression.
    pub fn pos_start(&self) -> Pos {
        match &self.kind {
            ExprKind::Member { object, .. } => object.pos_start(),
            ExprKind::Call { callee, .. } => callee.pos_start(),
            ExprKind::Binary { lhs, .. } => lhs.pos_start(),
            _ => self.pos,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn body(src: &str) -> Vec<Stmt> {
        parse("t.mjs", src).unwrap().body
    }

    #[test]
    fn import_then_method_call() {
        let b = body(r#"let lg = require("log"); lg.info("x");"#);
        assert_eq!(b.len(), 2);
        match &b[0].kind {
            StmtKind::VarDecl { name, init, .. } => {
                assert_eq!(name, "lg");
                assert_eq!(init.import_literal(), Some("log"));
            }
            other => panic!("unexpected {other:?}"),
        }
        match &b[1].kind {
            StmtKind::Expr(Expr {
                kind: ExprKind::Call { callee, args },
                ..
            }) => {
                assert_eq!(args.len(), 1);
                assert!(matches!(
                    &callee.kind,
                    ExprKind::Member { property: Property::Static(p), .. } if p == "info"
                ));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_program() {
        assert!(body("").is_empty());
    }

    #[test]
    fn dynamic_assignment_target() {
        let b = body("let p = 1; x[p] = 1;");
        match &b[1].kind {
            StmtKind::Assign { target, .. } => assert!(target.is_dynamic_access()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_literal_require_is_still_an_import() {
        let b = body("let m = require(name);");
        match &b[0].kind {
            StmtKind::VarDecl { init, .. } => {
                assert!(matches!(init.kind, ExprKind::Import { .. }));
                assert_eq!(init.import_literal(), None);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn semicolons_are_mandatory() {
        let err = parse("t.mjs", "x = 1").unwrap_err();
        match err {
            LangError::Parse(e) => assert!(e.expected.iter().any(|s| s.contains(';'))),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn eval_text_allows_missing_tail_semicolon() {
        let p = parse_eval("<eval>", "2 + 2").unwrap();
        assert_eq!(p.body.len(), 1);
        assert!(parse_eval("<eval>", "let x = 1 x;").is_err());
    }

    #[test]
    fn precedence() {
        let b = body("x = 1 + 2 * 3 == 7 && !false;");
        let StmtKind::Assign { value, .. } = &b[0].kind else {
            panic!()
        };
        assert!(matches!(
            value.kind,
            ExprKind::Binary {
                op: BinaryOp::And,
                ..
            }
        ));
    }

    #[test]
    fn for_and_for_in() {
        let b = body("for (let i = 0; i < 3; i = i + 1) { f(i); } for (let k in fs) { g(k); }");
        assert!(matches!(b[0].kind, StmtKind::For { .. }));
        assert!(matches!(b[1].kind, StmtKind::ForIn { .. }));
    }

    #[test]
    fn invalid_assignment_target() {
        assert!(parse("t.mjs", "f() = 1;").is_err());
    }
}
