//! Tokenizer. Tracks line/column and whether a token starts its line, which
//! is all the layout rule needs.

use super::ParseError;
use crate::syntax::SourcePos;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(u64),
    // keywords
    Type,
    Unit,
    If,
    Then,
    Else,
    Let,
    In,
    Case,
    Of,
    Data,
    Where,
    Subst,
    By,
    Contra,
    Refl,
    TrustMe,
    Module,
    Import,
    // symbols
    Backslash,
    Dot,
    Colon,
    Arrow,
    Equals,
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Bar,
    Comma,
    Semi,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Num(n) => format!("number `{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.spelling()),
        }
    }

    fn spelling(&self) -> &'static str {
        match self {
            Tok::Type => "Type",
            Tok::Unit => "Unit",
            Tok::If => "if",
            Tok::Then => "then",
            Tok::Else => "else",
            Tok::Let => "let",
            Tok::In => "in",
            Tok::Case => "case",
            Tok::Of => "of",
            Tok::Data => "data",
            Tok::Where => "where",
            Tok::Subst => "subst",
            Tok::By => "by",
            Tok::Contra => "contra",
            Tok::Refl => "Refl",
            Tok::TrustMe => "TRUSTME",
            Tok::Module => "module",
            Tok::Import => "import",
            Tok::Backslash => "\\",
            Tok::Dot => ".",
            Tok::Colon => ":",
            Tok::Arrow => "->",
            Tok::Equals => "=",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Bar => "|",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Ident(_) | Tok::Num(_) | Tok::Eof => "",
        }
    }
}

pub const KEYWORDS: &[&str] = &[
    "Type", "Unit", "if", "then", "else", "let", "in", "case", "of", "data", "where", "subst", "by",
    "contra", "Refl", "TRUSTME", "module", "import",
];

fn keyword(s: &str) -> Option<Tok> {
    Some(match s {
        "Type" => Tok::Type,
        "Unit" => Tok::Unit,
        "if" => Tok::If,
        "then" => Tok::Then,
        "else" => Tok::Else,
        "let" => Tok::Let,
        "in" => Tok::In,
        "case" => Tok::Case,
        "of" => Tok::Of,
        "data" => Tok::Data,
        "where" => Tok::Where,
        "subst" => Tok::Subst,
        "by" => Tok::By,
        "contra" => Tok::Contra,
        "Refl" => Tok::Refl,
        "TRUSTME" => Tok::TrustMe,
        "module" => Tok::Module,
        "import" => Tok::Import,
        _ => return None,
    })
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
    /// First token on its line.
    pub first: bool,
}

pub fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

pub fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

pub fn tokenize(src: &str, file: &Arc<str>) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let mut line_has_token = false;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            line_has_token = false;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (start_line, start_col) = (line, col);
        let tok = if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += (i - start) as u32;
            keyword(&s).unwrap_or(Tok::Ident(s))
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += (i - start) as u32;
            let n = s.parse::<u64>().map_err(|_| ParseError {
                pos: SourcePos { file: file.clone(), line: start_line, column: start_col },
                message: format!("numeric literal `{s}` is too large"),
            })?;
            Tok::Num(n)
        } else {
            let (tok, len) = match (c, chars.get(i + 1)) {
                ('-', Some('>')) => (Tok::Arrow, 2),
                ('\\', _) => (Tok::Backslash, 1),
                ('.', _) => (Tok::Dot, 1),
                (':', _) => (Tok::Colon, 1),
                ('=', _) => (Tok::Equals, 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('[', _) => (Tok::LBrack, 1),
                (']', _) => (Tok::RBrack, 1),
                ('{', _) => (Tok::LBrace, 1),
                ('}', _) => (Tok::RBrace, 1),
                ('|', _) => (Tok::Bar, 1),
                (',', _) => (Tok::Comma, 1),
                (';', _) => (Tok::Semi, 1),
                _ => {
                    return Err(ParseError {
                        pos: SourcePos { file: file.clone(), line, column: col },
                        message: format!("unexpected character `{c}`"),
                    })
                }
            };
            i += len;
            col += len as u32;
            tok
        };
        toks.push(Token { tok, line: start_line, col: start_col, first: !line_has_token });
        line_has_token = true;
    }
    toks.push(Token { tok: Tok::Eof, line, col, first: true });
    Ok(toks)
}
