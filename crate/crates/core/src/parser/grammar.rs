//! Recursive-descent parser producing an unresolved syntax tree.

use super::lexer::{Tok, Token};
use crate::ast::Span;
use crate::diagnostic::Diagnostic;
use crate::subst::grow;

#[derive(Clone, Debug)]
pub struct RawBinder {
    pub name: String,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct RawParam {
    pub binders: Vec<RawBinder>,
    pub ty: RawExpr,
}

#[derive(Clone, Debug)]
pub struct RawLabel {
    pub name: String,
    pub user: bool,
}

#[derive(Clone, Debug)]
pub enum RawExpr {
    Ident { name: String, args: Option<Vec<RawExpr>>, span: Span },
    Type(Span),
    Dot { scrutinee: Box<RawExpr>, name: String, args: Option<Vec<RawExpr>>, span: Span },
    Match {
        scrutinee: Box<RawExpr>,
        label: Option<RawLabel>,
        motive: Option<(RawBinder, Box<RawExpr>)>,
        cases: Vec<RawClause>,
        span: Span,
    },
    Comatch { label: Option<RawLabel>, cocases: Vec<RawClause>, span: Span },
    Lambda { label: Option<RawLabel>, binder: RawBinder, body: Box<RawExpr>, span: Span },
    Arrow { lhs: Box<RawExpr>, rhs: Box<RawExpr>, span: Span },
}

impl RawExpr {
    pub fn span(&self) -> Span {
        match self {
            RawExpr::Ident { span, .. }
            | RawExpr::Type(span)
            | RawExpr::Dot { span, .. }
            | RawExpr::Match { span, .. }
            | RawExpr::Comatch { span, .. }
            | RawExpr::Lambda { span, .. }
            | RawExpr::Arrow { span, .. } => *span,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RawClause {
    pub name: String,
    pub params: Vec<RawBinder>,
    /// `None` for an absurd clause.
    pub body: Option<RawExpr>,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct RawTypeApp {
    pub name: String,
    pub args: Vec<RawExpr>,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum RawSelf {
    Implicit,
    Typed(RawTypeApp),
    Named(RawBinder, RawTypeApp),
}

#[derive(Clone, Debug)]
pub struct RawCtor {
    pub docs: Vec<String>,
    pub name: String,
    pub params: Vec<RawParam>,
    pub result: Option<RawTypeApp>,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct RawDtor {
    pub docs: Vec<String>,
    pub self_spec: RawSelf,
    pub name: String,
    pub params: Vec<RawParam>,
    pub ret: RawExpr,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum RawDecl {
    Data { docs: Vec<String>, name: String, params: Vec<RawParam>, ctors: Vec<RawCtor>, span: Span },
    Codata { docs: Vec<String>, name: String, params: Vec<RawParam>, dtors: Vec<RawDtor>, span: Span },
    Def {
        docs: Vec<String>,
        self_spec: RawSelf,
        name: String,
        params: Vec<RawParam>,
        ret: RawExpr,
        cases: Vec<RawClause>,
        span: Span,
    },
    Codef {
        docs: Vec<String>,
        name: String,
        params: Vec<RawParam>,
        result: RawTypeApp,
        cocases: Vec<RawClause>,
        span: Span,
    },
    Let { docs: Vec<String>, name: String, params: Vec<RawParam>, ty: RawExpr, body: RawExpr, span: Span },
}

impl RawDecl {
    pub fn name(&self) -> &str {
        match self {
            RawDecl::Data { name, .. }
            | RawDecl::Codata { name, .. }
            | RawDecl::Def { name, .. }
            | RawDecl::Codef { name, .. }
            | RawDecl::Let { name, .. } => name,
        }
    }

    pub fn span(&self) -> Span {
        match self {
            RawDecl::Data { span, .. }
            | RawDecl::Codata { span, .. }
            | RawDecl::Def { span, .. }
            | RawDecl::Codef { span, .. }
            | RawDecl::Let { span, .. } => *span,
        }
    }
}

type PResult<T> = Result<T, ()>;

pub struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
    pub diags: Vec<Diagnostic>,
}

impl<'t> Parser<'t> {
    pub fn new(toks: &'t [Token]) -> Parser<'t> {
        Parser { toks, pos: 0, diags: Vec::new() }
    }

    pub fn at_eof(&mut self) -> bool {
        self.peek() == &Tok::Eof
    }

    fn skip_docs(&mut self) {
        while matches!(self.toks[self.pos].tok, Tok::Doc(_)) {
            self.pos += 1;
        }
    }

    fn docs(&mut self) -> Vec<String> {
        let mut out = Vec::new();
        while let Tok::Doc(d) = &self.toks[self.pos].tok {
            out.push(d.clone());
            self.pos += 1;
        }
        out
    }

    fn peek(&mut self) -> &Tok {
        self.skip_docs();
        &self.toks[self.pos].tok
    }

    /// Token after the current one, skipping documentation.
    fn peek_at(&mut self, n: usize) -> &Tok {
        self.skip_docs();
        let mut i = self.pos;
        let mut left = n;
        while left > 0 && i + 1 < self.toks.len() {
            i += 1;
            if !matches!(self.toks[i].tok, Tok::Doc(_)) {
                left -= 1;
            }
        }
        &self.toks[i].tok
    }

    fn span(&mut self) -> Span {
        self.skip_docs();
        self.toks[self.pos].span
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].span.end
        }
    }

    fn bump(&mut self) -> Token {
        self.skip_docs();
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&mut self, expected: &str) -> PResult<T> {
        let found = self.peek().describe();
        let span = self.span();
        self.diags.push(Diagnostic::error(
            "parse/unexpected-token",
            format!("expected {expected}, found {found}"),
            span,
        ));
        Err(())
    }

    fn expect(&mut self, t: Tok) -> PResult<Span> {
        if self.peek() == &t {
            Ok(self.bump().span)
        } else {
            self.error(&t.describe())
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        if let Tok::Ident(s) = self.peek().clone() {
            let sp = self.bump().span;
            Ok((s, sp))
        } else {
            self.error("an identifier")
        }
    }

    fn binder(&mut self) -> PResult<RawBinder> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok(RawBinder { name: s, span: self.bump().span }),
            Tok::Underscore => Ok(RawBinder { name: "_".into(), span: self.bump().span }),
            _ => self.error("a binder"),
        }
    }

    /// Skips to the next token that can start a declaration.
    fn recover(&mut self) {
        loop {
            match &self.toks[self.pos].tok {
                Tok::Data | Tok::Codata | Tok::Def | Tok::Codef | Tok::Let | Tok::Eof => break,
                _ => self.pos += 1,
            }
        }
    }

    pub fn program(&mut self) -> Vec<RawDecl> {
        let mut out = Vec::new();
        loop {
            let docs = self.docs();
            if self.peek() == &Tok::Eof {
                break;
            }
            let start = self.pos;
            match self.decl(docs) {
                Ok(d) => out.push(d),
                Err(()) => {
                    if self.pos == start {
                        self.pos += 1;
                    }
                    self.recover();
                }
            }
        }
        out
    }

    fn decl(&mut self, docs: Vec<String>) -> PResult<RawDecl> {
        let start = self.span().start;
        match self.peek().clone() {
            Tok::Data => {
                self.bump();
                let (name, _) = self.ident()?;
                let params = self.opt_telescope()?;
                self.expect(Tok::LBrace)?;
                let ctors = self.comma_list(Tok::RBrace, |p| p.ctor())?;
                let span = Span::new(start, self.prev_end());
                Ok(RawDecl::Data { docs, name, params, ctors, span })
            }
            Tok::Codata => {
                self.bump();
                let (name, _) = self.ident()?;
                let params = self.opt_telescope()?;
                self.expect(Tok::LBrace)?;
                let dtors = self.comma_list(Tok::RBrace, |p| p.dtor())?;
                let span = Span::new(start, self.prev_end());
                Ok(RawDecl::Codata { docs, name, params, dtors, span })
            }
            Tok::Def => {
                self.bump();
                let self_spec = match self.peek() {
                    Tok::LParen => self.named_self()?,
                    _ => RawSelf::Typed(self.type_app()?),
                };
                self.expect(Tok::Dot)?;
                let (name, _) = self.ident()?;
                let params = self.opt_telescope()?;
                self.expect(Tok::Colon)?;
                let ret = self.expr()?;
                self.expect(Tok::LBrace)?;
                let cases = self.comma_list(Tok::RBrace, |p| p.clause())?;
                let span = Span::new(start, self.prev_end());
                Ok(RawDecl::Def { docs, self_spec, name, params, ret, cases, span })
            }
            Tok::Codef => {
                self.bump();
                let (name, _) = self.ident()?;
                let params = self.opt_telescope()?;
                self.expect(Tok::Colon)?;
                let result = self.type_app()?;
                self.expect(Tok::LBrace)?;
                let cocases = self.comma_list(Tok::RBrace, |p| p.clause())?;
                let span = Span::new(start, self.prev_end());
                Ok(RawDecl::Codef { docs, name, params, result, cocases, span })
            }
            Tok::Let => {
                self.bump();
                let (name, _) = self.ident()?;
                let params = self.opt_telescope()?;
                self.expect(Tok::Colon)?;
                let ty = self.expr()?;
                self.expect(Tok::ColonEq)?;
                let body = self.expr()?;
                self.eat(&Tok::Semi);
                let span = Span::new(start, self.prev_end());
                Ok(RawDecl::Let { docs, name, params, ty, body, span })
            }
            _ => self.error("a declaration"),
        }
    }

    /// Parses `item, item, ...` up to and including `close`; a trailing
    /// comma is allowed.
    fn comma_list<T>(
        &mut self,
        close: Tok,
        mut item: impl FnMut(&mut Parser<'t>) -> PResult<T>,
    ) -> PResult<Vec<T>> {
        let mut out = Vec::new();
        loop {
            if self.peek() == &close {
                self.bump();
                return Ok(out);
            }
            out.push(item(self)?);
            if !self.eat(&Tok::Comma) {
                self.expect(close)?;
                return Ok(out);
            }
        }
    }

    fn opt_telescope(&mut self) -> PResult<Vec<RawParam>> {
        if self.peek() == &Tok::LParen {
            self.bump();
            self.comma_list(Tok::RParen, |p| p.param())
        } else {
            Ok(Vec::new())
        }
    }

    fn param(&mut self) -> PResult<RawParam> {
        let mut binders = vec![self.binder()?];
        while self.peek() != &Tok::Colon {
            binders.push(self.binder()?);
        }
        self.expect(Tok::Colon)?;
        let ty = self.expr()?;
        Ok(RawParam { binders, ty })
    }

    fn type_app(&mut self) -> PResult<RawTypeApp> {
        let (name, sp) = self.ident()?;
        let args = if self.peek() == &Tok::LParen { self.args()? } else { Vec::new() };
        Ok(RawTypeApp { name, args, span: sp.to(Span::new(sp.start, self.prev_end())) })
    }

    fn named_self(&mut self) -> PResult<RawSelf> {
        self.expect(Tok::LParen)?;
        let b = self.binder()?;
        self.expect(Tok::Colon)?;
        let t = self.type_app()?;
        self.expect(Tok::RParen)?;
        Ok(RawSelf::Named(b, t))
    }

    fn ctor(&mut self) -> PResult<RawCtor> {
        let docs = self.docs();
        let start = self.span().start;
        let (name, _) = self.ident()?;
        let params = self.opt_telescope()?;
        let result = if self.eat(&Tok::Colon) { Some(self.type_app()?) } else { None };
        Ok(RawCtor { docs, name, params, result, span: Span::new(start, self.prev_end()) })
    }

    /// Index of the token closing the parenthesis at `self.pos`.
    fn matching_paren(&mut self) -> usize {
        self.skip_docs();
        let mut depth = 0usize;
        let mut i = self.pos;
        while i < self.toks.len() {
            match self.toks[i].tok {
                Tok::LParen => depth += 1,
                Tok::RParen => {
                    depth -= 1;
                    if depth == 0 {
                        return i;
                    }
                }
                Tok::Eof => return i,
                _ => {}
            }
            i += 1;
        }
        i
    }

    fn dtor(&mut self) -> PResult<RawDtor> {
        let docs = self.docs();
        let start = self.span().start;
        let self_spec = match self.peek().clone() {
            Tok::LParen => {
                let s = self.named_self()?;
                self.expect(Tok::Dot)?;
                s
            }
            Tok::Ident(_) => match self.peek_at(1).clone() {
                Tok::Dot => {
                    let t = self.type_app()?;
                    self.bump();
                    RawSelf::Typed(t)
                }
                Tok::LParen => {
                    self.bump();
                    let close = self.matching_paren();
                    self.pos -= 1;
                    let dotted = self.toks.get(close + 1).is_some_and(|t| t.tok == Tok::Dot);
                    if dotted {
                        let t = self.type_app()?;
                        self.expect(Tok::Dot)?;
                        RawSelf::Typed(t)
                    } else {
                        RawSelf::Implicit
                    }
                }
                _ => RawSelf::Implicit,
            },
            _ => return self.error("a destructor"),
        };
        let (name, _) = self.ident()?;
        let params = self.opt_telescope()?;
        self.expect(Tok::Colon)?;
        let ret = self.expr()?;
        Ok(RawDtor { docs, self_spec, name, params, ret, span: Span::new(start, self.prev_end()) })
    }

    fn clause(&mut self) -> PResult<RawClause> {
        let start = self.span().start;
        let (name, _) = self.ident()?;
        let params = if self.peek() == &Tok::LParen {
            self.bump();
            self.comma_list(Tok::RParen, |p| p.binder())?
        } else {
            Vec::new()
        };
        let body = if self.eat(&Tok::Absurd) {
            None
        } else {
            self.expect(Tok::FatArrow)?;
            Some(self.expr()?)
        };
        Ok(RawClause { name, params, body, span: Span::new(start, self.prev_end()) })
    }

    fn args(&mut self) -> PResult<Vec<RawExpr>> {
        self.expect(Tok::LParen)?;
        self.comma_list(Tok::RParen, |p| p.expr())
    }

    fn opt_label(&mut self) -> Option<RawLabel> {
        if let Tok::Ident(s) = self.peek().clone() {
            self.bump();
            Some(RawLabel { name: s, user: true })
        } else {
            None
        }
    }

    pub fn expr(&mut self) -> PResult<RawExpr> {
        grow(|| self.expr_inner())
    }

    fn expr_inner(&mut self) -> PResult<RawExpr> {
        let start = self.span().start;
        if self.eat(&Tok::Backslash) {
            let binder = self.binder()?;
            self.expect(Tok::Dot)?;
            let body = self.expr()?;
            let span = Span::new(start, self.prev_end());
            return Ok(RawExpr::Lambda { label: None, binder, body: Box::new(body), span });
        }
        let lhs = self.postfix()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.expr()?;
            let span = Span::new(start, self.prev_end());
            return Ok(RawExpr::Arrow { lhs: Box::new(lhs), rhs: Box::new(rhs), span });
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> PResult<RawExpr> {
        let start = self.span().start;
        let mut e = self.atom()?;
        while self.peek() == &Tok::Dot {
            self.bump();
            if self.eat(&Tok::Match) {
                let label = self.opt_label();
                let motive = if self.eat(&Tok::As) {
                    let b = self.binder()?;
                    self.expect(Tok::FatArrow)?;
                    Some((b, Box::new(self.expr()?)))
                } else {
                    None
                };
                self.expect(Tok::LBrace)?;
                let cases = self.comma_list(Tok::RBrace, |p| p.clause())?;
                let span = Span::new(start, self.prev_end());
                e = RawExpr::Match { scrutinee: Box::new(e), label, motive, cases, span };
            } else {
                let (name, _) = self.ident()?;
                let args = if self.peek() == &Tok::LParen { Some(self.args()?) } else { None };
                let span = Span::new(start, self.prev_end());
                e = RawExpr::Dot { scrutinee: Box::new(e), name, args, span };
            }
        }
        Ok(e)
    }

    fn atom(&mut self) -> PResult<RawExpr> {
        let start = self.span().start;
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                let args = if self.peek() == &Tok::LParen { Some(self.args()?) } else { None };
                Ok(RawExpr::Ident { name, args, span: Span::new(start, self.prev_end()) })
            }
            Tok::Type => Ok(RawExpr::Type(self.bump().span)),
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Comatch => {
                self.bump();
                let label = self.opt_label();
                self.expect(Tok::LBrace)?;
                let cocases = self.comma_list(Tok::RBrace, |p| p.clause())?;
                Ok(RawExpr::Comatch { label, cocases, span: Span::new(start, self.prev_end()) })
            }
            _ => self.error("an expression"),
        }
    }
}
