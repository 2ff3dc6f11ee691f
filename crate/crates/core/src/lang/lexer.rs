use num_bigint::BigInt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(BigInt),
    Assign,
    ColonIn,
    Colon,
    Semi,
    Comma,
    DotDot,
    At,
    LBrace,
    RBrace,
    LDBrace,
    RDBrace,
    LBrack,
    RBrack,
    LDBrack,
    RDBrack,
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Eof,
}

#[derive(Debug, Clone)]
pub struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn lex(src: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
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
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (l0, c0) = (line, col);
        let mut push = |tok: Tok, len: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned { tok, line: l0, col: c0 });
            *i += len;
            *col += len;
        };
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Spanned { tok: Tok::Int(s.parse().expect("digits")), line: l0, col: c0 });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Spanned { tok: Tok::Ident(s), line: l0, col: c0 });
            continue;
        }
        match (c, next) {
            (':', Some('=')) => push(Tok::Assign, 2, &mut i, &mut col),
            (':', Some('i')) if chars.get(i + 2) == Some(&'n') && !chars.get(i + 3).is_some_and(|c| c.is_alphanumeric() || *c == '_') => {
                push(Tok::ColonIn, 3, &mut i, &mut col)
            }
            (':', _) => push(Tok::Colon, 1, &mut i, &mut col),
            (';', _) => push(Tok::Semi, 1, &mut i, &mut col),
            (',', _) => push(Tok::Comma, 1, &mut i, &mut col),
            ('.', Some('.')) => push(Tok::DotDot, 2, &mut i, &mut col),
            ('@', _) => push(Tok::At, 1, &mut i, &mut col),
            ('{', Some('{')) => push(Tok::LDBrace, 2, &mut i, &mut col),
            ('}', Some('}')) => push(Tok::RDBrace, 2, &mut i, &mut col),
            ('{', _) => push(Tok::LBrace, 1, &mut i, &mut col),
            ('}', _) => push(Tok::RBrace, 1, &mut i, &mut col),
            ('[', Some('[')) => push(Tok::LDBrack, 2, &mut i, &mut col),
            (']', Some(']')) => push(Tok::RDBrack, 2, &mut i, &mut col),
            ('[', _) => push(Tok::LBrack, 1, &mut i, &mut col),
            (']', _) => push(Tok::RBrack, 1, &mut i, &mut col),
            ('(', _) => push(Tok::LParen, 1, &mut i, &mut col),
            (')', _) => push(Tok::RParen, 1, &mut i, &mut col),
            ('+', _) => push(Tok::Plus, 1, &mut i, &mut col),
            ('-', _) => push(Tok::Minus, 1, &mut i, &mut col),
            ('*', _) => push(Tok::Star, 1, &mut i, &mut col),
            ('/', _) => push(Tok::Slash, 1, &mut i, &mut col),
            ('=', _) => push(Tok::Eq, 1, &mut i, &mut col),
            ('!', Some('=')) => push(Tok::Ne, 2, &mut i, &mut col),
            ('<', Some('=')) => push(Tok::Le, 2, &mut i, &mut col),
            ('>', Some('=')) => push(Tok::Ge, 2, &mut i, &mut col),
            ('<', _) => push(Tok::Lt, 1, &mut i, &mut col),
            ('>', _) => push(Tok::Gt, 1, &mut i, &mut col),
            _ => return Err(Error::Parse { line, col, msg: format!("unexpected character '{c}'") }),
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}
