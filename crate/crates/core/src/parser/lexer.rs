//! Tokenizer. Comments run from `--` to the end of the line; `-- |` starts a
//! documentation comment that attaches to the following declaration or entry.

use crate::ast::Span;
use crate::diagnostic::Diagnostic;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Doc(String),
    Data,
    Codata,
    Def,
    Codef,
    Let,
    Match,
    Comatch,
    Absurd,
    As,
    Type,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    ColonEq,
    Semi,
    Dot,
    FatArrow,
    Arrow,
    Backslash,
    Underscore,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Doc(_) => "documentation comment".into(),
            Tok::Eof => "end of file".into(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Data => "data",
            Tok::Codata => "codata",
            Tok::Def => "def",
            Tok::Codef => "codef",
            Tok::Let => "let",
            Tok::Match => "match",
            Tok::Comatch => "comatch",
            Tok::Absurd => "absurd",
            Tok::As => "as",
            Tok::Type => "Type",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::ColonEq => ":=",
            Tok::Semi => ";",
            Tok::Dot => ".",
            Tok::FatArrow => "=>",
            Tok::Arrow => "->",
            Tok::Backslash => "\\",
            Tok::Underscore => "_",
            Tok::Ident(_) | Tok::Doc(_) | Tok::Eof => "",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '×' || c == '_'
}

pub fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '×'
}

pub fn keyword(s: &str) -> Option<Tok> {
    Some(match s {
        "data" => Tok::Data,
        "codata" => Tok::Codata,
        "def" => Tok::Def,
        "codef" => Tok::Codef,
        "let" => Tok::Let,
        "match" => Tok::Match,
        "comatch" => Tok::Comatch,
        "absurd" => Tok::Absurd,
        "as" => Tok::As,
        "Type" => Tok::Type,
        "_" => Tok::Underscore,
        _ => return None,
    })
}

/// Splits `src` into tokens. Unknown characters are reported and skipped.
pub fn lex(src: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut toks = Vec::new();
    let mut diags = Vec::new();
    let mut it = src.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        let single = |t: Tok| Token { tok: t, span: Span::new(i, i + c.len_utf8()) };
        match c {
            c if c.is_whitespace() => {
                it.next();
            }
            '-' if src[i..].starts_with("--") => {
                let end = src[i..].find('\n').map(|n| i + n).unwrap_or(src.len());
                let text = &src[i + 2..end];
                let trimmed = text.trim_start();
                if let Some(doc) = trimmed.strip_prefix('|') {
                    let doc = doc.strip_prefix(' ').unwrap_or(doc).trim_end();
                    toks.push(Token { tok: Tok::Doc(doc.to_string()), span: Span::new(i, end) });
                }
                while it.peek().is_some_and(|&(j, _)| j < end) {
                    it.next();
                }
            }
            '-' if src[i..].starts_with("->") => {
                toks.push(Token { tok: Tok::Arrow, span: Span::new(i, i + 2) });
                it.next();
                it.next();
            }
            '=' if src[i..].starts_with("=>") => {
                toks.push(Token { tok: Tok::FatArrow, span: Span::new(i, i + 2) });
                it.next();
                it.next();
            }
            ':' if src[i..].starts_with(":=") => {
                toks.push(Token { tok: Tok::ColonEq, span: Span::new(i, i + 2) });
                it.next();
                it.next();
            }
            '(' | ')' | '{' | '}' | ',' | ':' | ';' | '.' | '\\' => {
                let t = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    ',' => Tok::Comma,
                    ':' => Tok::Colon,
                    ';' => Tok::Semi,
                    '.' => Tok::Dot,
                    _ => Tok::Backslash,
                };
                toks.push(single(t));
                it.next();
            }
            c if is_ident_start(c) => {
                let mut end = i;
                while let Some(&(j, d)) = it.peek() {
                    if is_ident_continue(d) {
                        end = j + d.len_utf8();
                        it.next();
                    } else {
                        break;
                    }
                }
                let text = &src[i..end];
                let tok = keyword(text).unwrap_or_else(|| Tok::Ident(text.to_string()));
                toks.push(Token { tok, span: Span::new(i, end) });
            }
            _ => {
                diags.push(Diagnostic::error(
                    "parse/unexpected-character",
                    format!("unexpected character `{}`", c.escape_debug()),
                    Span::new(i, i + c.len_utf8()),
                ));
                it.next();
            }
        }
    }
    toks.push(Token { tok: Tok::Eof, span: Span::new(src.len(), src.len()) });
    (toks, diags)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Tok> {
        lex(src).0.into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn unicode_identifiers() {
        assert_eq!(
            kinds("×_ π₁ Σ_ x' _ _a"),
            vec![
                Tok::Ident("×_".into()),
                Tok::Ident("π₁".into()),
                Tok::Ident("Σ_".into()),
                Tok::Ident("x'".into()),
                Tok::Underscore,
                Tok::Ident("_a".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comments_and_docs() {
        assert_eq!(
            kinds("-- plain\n-- | doc text\ndata"),
            vec![Tok::Doc("doc text".into()), Tok::Data, Tok::Eof]
        );
    }

    #[test]
    fn operators() {
        assert_eq!(
            kinds("=> -> := : . \\"),
            vec![Tok::FatArrow, Tok::Arrow, Tok::ColonEq, Tok::Colon, Tok::Dot, Tok::Backslash, Tok::Eof]
        );
    }

    #[test]
    fn bad_character_reported() {
        let (toks, diags) = lex("a # b");
        assert_eq!(toks.len(), 3);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].span, Span::new(2, 3));
    }
}
