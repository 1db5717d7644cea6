//! Tokenizer for the supported Java subset.
//!
//! Only enough lexical structure is kept to find declarations and to skip
//! method bodies safely: identifiers, single-character punctuation, `...`,
//! and opaque literals. Comments and whitespace are dropped.

use super::ParseError;
use crate::ast::{is_ident_part, is_ident_start, Position};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum TokenKind {
    Ident,
    Punct(char),
    Ellipsis,
    Literal,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: Position,
}

impl Token {
    pub fn is_ident(&self, word: &str) -> bool {
        self.kind == TokenKind::Ident && self.text == word
    }

    pub fn is_punct(&self, c: char) -> bool {
        self.kind == TokenKind::Punct(c)
    }
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
    // Location of the last consumed character; token spans end there.
    last: (u32, u32),
}

impl Cursor {
    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).copied()
    }

    fn starts_with(&self, s: &str) -> bool {
        s.chars().enumerate().all(|(i, c)| self.peek(i) == Some(c))
    }

    fn bump(&mut self) {
        if let Some(&c) = self.chars.get(self.pos) {
            self.last = (self.line, self.col);
            self.pos += 1;
            if c == '\n' {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
        }
    }

    fn bump_n(&mut self, n: usize) {
        for _ in 0..n {
            self.bump();
        }
    }

    fn bump_while(&mut self, mut pred: impl FnMut(&Cursor, char) -> bool) {
        while let Some(c) = self.peek(0) {
            if !pred(self, c) {
                break;
            }
            self.bump();
        }
    }
}

pub(crate) fn tokenize(source: &str) -> Result<Vec<Token>, ParseError> {
    let mut cur = Cursor {
        chars: source.chars().collect(),
        pos: 0,
        line: 1,
        col: 1,
        last: (1, 1),
    };
    let mut tokens = Vec::new();

    while let Some(c) = cur.peek(0) {
        let (line, col) = (cur.line, cur.col);
        let start = cur.pos;
        if c.is_whitespace() || c == '\u{feff}' {
            cur.bump();
            continue;
        }
        if cur.starts_with("//") {
            cur.bump_while(|_, c| c != '\n');
            continue;
        }
        if cur.starts_with("/*") {
            cur.bump_n(2);
            while !cur.starts_with("*/") {
                if cur.peek(0).is_none() {
                    return Err(ParseError::new(line, col, "unterminated block comment"));
                }
                cur.bump();
            }
            cur.bump_n(2);
            continue;
        }

        let kind = if is_ident_start(c) {
            cur.bump_while(|_, c| is_ident_part(c));
            TokenKind::Ident
        } else if c.is_ascii_digit()
            || (c == '.' && cur.peek(1).is_some_and(|d| d.is_ascii_digit()))
        {
            cur.bump_while(|cur, c| {
                let after_exponent = matches!(
                    cur.chars.get(cur.pos.wrapping_sub(1)),
                    Some('e' | 'E' | 'p' | 'P')
                );
                c.is_ascii_alphanumeric()
                    || c == '_'
                    || c == '.'
                    || ((c == '+' || c == '-') && after_exponent)
            });
            TokenKind::Literal
        } else if cur.starts_with("\"\"\"") {
            cur.bump_n(3);
            while !cur.starts_with("\"\"\"") {
                match cur.peek(0) {
                    None => return Err(ParseError::new(line, col, "unterminated text block")),
                    Some('\\') => cur.bump_n(2),
                    Some(_) => cur.bump(),
                }
            }
            cur.bump_n(3);
            TokenKind::Literal
        } else if c == '"' || c == '\'' {
            cur.bump();
            loop {
                match cur.peek(0) {
                    None | Some('\n') => {
                        let what = if c == '"' { "string" } else { "character" };
                        return Err(ParseError::new(
                            line,
                            col,
                            format!("unterminated {what} literal"),
                        ));
                    }
                    Some('\\') => cur.bump_n(2),
                    Some(q) if q == c => {
                        cur.bump();
                        break;
                    }
                    Some(_) => cur.bump(),
                }
            }
            TokenKind::Literal
        } else if cur.starts_with("...") {
            cur.bump_n(3);
            TokenKind::Ellipsis
        } else {
            cur.bump();
            TokenKind::Punct(c)
        };
        tokens.push(Token {
            kind,
            text: cur.chars[start..cur.pos].iter().collect(),
            span: Position::new(line, col, cur.last.0, cur.last.1),
        });
    }
    Ok(tokens)
}
