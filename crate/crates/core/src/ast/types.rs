//! Canonical type text.
//!
//! Whitespace is dropped, the leading name of every type reference (at any
//! generic nesting depth) is resolved through the file's import table or the
//! package's own type names, and array/varargs suffixes become `[]`.
//! Wildcard bounds are written `?+T` (extends) and `?-T` (super) so that the
//! canonical text never needs a space.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unbalanced generic brackets in `{0}`")]
    UnbalancedGenerics(String),
    #[error("malformed type `{0}`")]
    Malformed(String),
}

/// Normalizes a raw type as written in source.
///
/// `imports` maps simple names to qualified names; names found in
/// `same_package_names` are prefixed with `package`. Anything else, including
/// primitives and already-qualified names, is left as written.
pub fn normalize_type(
    raw: &str,
    imports: &BTreeMap<String, String>,
    same_package_names: &BTreeSet<String>,
    package: &str,
) -> Result<String, TypeError> {
    check_balance(raw)?;
    let tokens = tokenize(raw).ok_or_else(|| TypeError::Malformed(raw.to_string()))?;
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
    };
    let ty = parser
        .parse_type()
        .filter(|_| parser.pos == tokens.len())
        .ok_or_else(|| TypeError::Malformed(raw.to_string()))?;
    let resolver = Resolver {
        imports,
        same_package_names,
        package,
    };
    let mut out = String::with_capacity(raw.len());
    resolver.render(&ty, &mut out);
    Ok(out)
}

/// Converts canonical type text back into Java source syntax.
pub fn to_source_type(canonical: &str) -> String {
    let mut out = String::with_capacity(canonical.len() + 8);
    let mut chars = canonical.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '?' => match chars.peek() {
                Some('+') => {
                    chars.next();
                    out.push_str("? extends ");
                }
                Some('-') => {
                    chars.next();
                    out.push_str("? super ");
                }
                _ => out.push('?'),
            },
            ',' => out.push_str(", "),
            _ => out.push(c),
        }
    }
    out
}

fn check_balance(raw: &str) -> Result<(), TypeError> {
    let mut depth = 0usize;
    for c in raw.chars() {
        match c {
            '<' => depth += 1,
            '>' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| TypeError::UnbalancedGenerics(raw.to_string()))?
            }
            _ => {}
        }
    }
    if depth == 0 {
        Ok(())
    } else {
        Err(TypeError::UnbalancedGenerics(raw.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Sym(char),
    Ellipsis,
}

fn tokenize(raw: &str) -> Option<Vec<Token>> {
    let chars: Vec<char> = raw.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident_part(chars[i]) {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if c == '.' && chars.get(i + 1) == Some(&'.') && chars.get(i + 2) == Some(&'.') {
            out.push(Token::Ellipsis);
            i += 3;
        } else if "<>,?[].+-&".contains(c) {
            out.push(Token::Sym(c));
            i += 1;
        } else {
            return None;
        }
    }
    Some(out)
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '$'
}

pub(crate) fn is_ident_part(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

#[derive(Debug)]
enum TypeExpr {
    Reference { segments: Vec<Segment>, dims: usize },
    Wildcard(Option<(char, Box<TypeExpr>)>),
}

#[derive(Debug)]
struct Segment {
    name: String,
    args: Option<Vec<TypeExpr>>,
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek() == Some(&Token::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Option<String> {
        match self.peek() {
            Some(Token::Ident(name)) => {
                let name = name.clone();
                self.pos += 1;
                Some(name)
            }
            _ => None,
        }
    }

    fn parse_type(&mut self) -> Option<TypeExpr> {
        let mut segments = Vec::new();
        loop {
            let name = self.ident()?;
            let args = if self.eat_sym('<') {
                Some(self.parse_args()?)
            } else {
                None
            };
            segments.push(Segment { name, args });
            if !self.eat_sym('.') {
                break;
            }
        }
        let mut dims = 0;
        loop {
            if self.eat_sym('[') {
                if !self.eat_sym(']') {
                    return None;
                }
                dims += 1;
            } else if self.peek() == Some(&Token::Ellipsis) {
                self.pos += 1;
                dims += 1;
            } else {
                break;
            }
        }
        Some(TypeExpr::Reference { segments, dims })
    }

    fn parse_args(&mut self) -> Option<Vec<TypeExpr>> {
        let mut args = Vec::new();
        if self.eat_sym('>') {
            return Some(args);
        }
        loop {
            args.push(self.parse_arg()?);
            if self.eat_sym('>') {
                return Some(args);
            }
            if !self.eat_sym(',') {
                return None;
            }
        }
    }

    fn parse_arg(&mut self) -> Option<TypeExpr> {
        if !self.eat_sym('?') {
            return self.parse_type();
        }
        let bound = match self.peek() {
            Some(Token::Ident(kw)) if kw == "extends" => Some('+'),
            Some(Token::Ident(kw)) if kw == "super" => Some('-'),
            Some(Token::Sym('+')) => Some('+'),
            Some(Token::Sym('-')) => Some('-'),
            _ => None,
        };
        match bound {
            Some(kind) => {
                self.pos += 1;
                Some(TypeExpr::Wildcard(Some((
                    kind,
                    Box::new(self.parse_type()?),
                ))))
            }
            None => Some(TypeExpr::Wildcard(None)),
        }
    }
}

struct Resolver<'a> {
    imports: &'a BTreeMap<String, String>,
    same_package_names: &'a BTreeSet<String>,
    package: &'a str,
}

impl Resolver<'_> {
    fn resolve_leading(&self, name: &str, out: &mut String) {
        if let Some(qualified) = self.imports.get(name) {
            out.push_str(qualified);
        } else if !self.package.is_empty() && self.same_package_names.contains(name) {
            out.push_str(self.package);
            out.push('.');
            out.push_str(name);
        } else {
            out.push_str(name);
        }
    }

    fn render(&self, ty: &TypeExpr, out: &mut String) {
        match ty {
            TypeExpr::Reference { segments, dims } => {
                for (i, seg) in segments.iter().enumerate() {
                    if i == 0 {
                        self.resolve_leading(&seg.name, out);
                    } else {
                        out.push('.');
                        out.push_str(&seg.name);
                    }
                    if let Some(args) = &seg.args {
                        out.push('<');
                        for (j, arg) in args.iter().enumerate() {
                            if j > 0 {
                                out.push(',');
                            }
                            self.render(arg, out);
                        }
                        out.push('>');
                    }
                }
                for _ in 0..*dims {
                    out.push_str("[]");
                }
            }
            TypeExpr::Wildcard(bound) => {
                out.push('?');
                if let Some((kind, inner)) = bound {
                    out.push(*kind);
                    self.render(inner, out);
                }
            }
        }
    }
}
