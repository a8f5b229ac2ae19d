//! Tokens of the model language.

use std::fmt;

use crate::error::{ModelError, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Decimal literal as written (`3`, `0.25`).
    Number(String),
    Str(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    LAngle,
    RAngle,
    Comma,
    Colon,
    Eq,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Newline,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Number(s) => write!(f, "number `{s}`"),
            Tok::Str(s) => write!(f, "string \"{s}\""),
            Tok::Newline => write!(f, "end of line"),
            Tok::Eof => write!(f, "end of file"),
            other => write!(f, "`{}`", punct(other)),
        }
    }
}

fn punct(t: &Tok) -> &'static str {
    match t {
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::LBracket => "[",
        Tok::RBracket => "]",
        Tok::LBrace => "{",
        Tok::RBrace => "}",
        Tok::LAngle => "⟨",
        Tok::RAngle => "⟩",
        Tok::Comma => ",",
        Tok::Colon => ":",
        Tok::Eq => "=",
        Tok::Plus => "+",
        Tok::Minus => "-",
        Tok::Star => "*",
        Tok::Slash => "/",
        Tok::Caret => "^",
        _ => "",
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

fn ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Splits `src` into tokens. Newlines inside any bracket pair are dropped.
pub fn lex(src: &str) -> Result<Vec<Token>, ModelError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut depth = 0i32;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let advance = |n: usize, col: &mut usize| *col += n;
        match c {
            '\n' => {
                if depth == 0 {
                    out.push(Token { tok: Tok::Newline, pos });
                }
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            ' ' | '\t' | '\r' => {}
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '"' => {
                let mut s = String::new();
                let mut j = i + 1;
                while j < chars.len() && chars[j] != '"' {
                    if chars[j] == '\n' {
                        return Err(ModelError::lexical(pos, "unterminated string", "close the string with `\"` on the same line"));
                    }
                    s.push(chars[j]);
                    j += 1;
                }
                if j == chars.len() {
                    return Err(ModelError::lexical(pos, "unterminated string", "close the string with `\"`"));
                }
                out.push(Token { tok: Tok::Str(s), pos });
                advance(j + 1 - i, &mut col);
                i = j + 1;
                continue;
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j + 1 < chars.len() && chars[j] == '.' && chars[j + 1].is_ascii_digit() {
                    j += 1;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                out.push(Token {
                    tok: Tok::Number(chars[i..j].iter().collect()),
                    pos,
                });
                advance(j - i, &mut col);
                i = j;
                continue;
            }
            '∂' => {
                out.push(Token {
                    tok: Tok::Ident("∂".into()),
                    pos,
                });
            }
            c if ident_start(c) => {
                let mut j = i + 1;
                while j < chars.len() && ident_continue(chars[j]) {
                    j += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(chars[i..j].iter().collect()),
                    pos,
                });
                advance(j - i, &mut col);
                i = j;
                continue;
            }
            _ => {
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '⟨' | '<' => Tok::LAngle,
                    '⟩' | '>' => Tok::RAngle,
                    ',' => Tok::Comma,
                    ':' => Tok::Colon,
                    '=' => Tok::Eq,
                    '+' => Tok::Plus,
                    '-' | '−' => Tok::Minus,
                    '*' | '·' | '×' => Tok::Star,
                    '/' => Tok::Slash,
                    '^' => Tok::Caret,
                    other => {
                        return Err(ModelError::lexical(
                            pos,
                            &format!("unexpected character `{other}`"),
                            "remove it or use `*` for products",
                        ));
                    }
                };
                match tok {
                    Tok::LParen | Tok::LBracket | Tok::LAngle | Tok::LBrace => depth += 1,
                    Tok::RParen | Tok::RBracket | Tok::RAngle | Tok::RBrace => depth -= 1,
                    _ => {}
                }
                out.push(Token { tok, pos });
            }
        }
        col += 1;
        i += 1;
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(out)
}
