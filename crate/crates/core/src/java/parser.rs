//! Declaration-level parser for the supported Java subset.
//!
//! Produces raw declarations with type text exactly as written; name
//! resolution happens afterwards, once the package's type names are known.

use std::collections::BTreeMap;

use super::lexer::{Token, TokenKind};
use super::ParseError;
use crate::ast::{ClassKind, Position};

const MODIFIERS: &[&str] = &[
    "public",
    "protected",
    "private",
    "static",
    "final",
    "abstract",
    "native",
    "synchronized",
    "transient",
    "volatile",
    "strictfp",
    "default",
    "sealed",
];

#[derive(Debug, Clone)]
pub(crate) struct RawTypeRef {
    pub text: String,
    pub span: Position,
}

#[derive(Debug, Clone)]
pub(crate) struct RawVar {
    pub name: String,
    pub ty: RawTypeRef,
    pub modifiers: Vec<String>,
    pub span: Position,
}

#[derive(Debug, Clone)]
pub(crate) struct RawMethod {
    pub name: String,
    pub return_type: Option<RawTypeRef>,
    pub modifiers: Vec<String>,
    pub is_constructor: bool,
    pub override_marker: bool,
    pub params: Vec<RawVar>,
    pub span: Position,
}

#[derive(Debug, Clone)]
pub(crate) struct RawType {
    /// Name as written in source.
    pub simple_name: String,
    /// `Outer$Inner` for nested types, the simple name otherwise.
    pub binary_name: String,
    pub outer: Option<String>,
    pub kind: ClassKind,
    pub extends: Vec<RawTypeRef>,
    pub implements: Vec<RawTypeRef>,
    pub fields: Vec<RawVar>,
    pub methods: Vec<RawMethod>,
    pub span: Position,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct RawFile {
    pub package: String,
    pub imports: BTreeMap<String, String>,
    pub types: Vec<RawType>,
    pub warnings: Vec<(u32, String)>,
}

pub(crate) fn parse(tokens: &[Token]) -> Result<RawFile, ParseError> {
    let mut parser = Parser {
        tokens,
        pos: 0,
        file: RawFile::default(),
    };
    parser.compilation_unit()?;
    Ok(parser.file)
}

struct Modifiers {
    words: Vec<String>,
    override_marker: bool,
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    file: RawFile,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, ahead: usize) -> Option<&'a Token> {
        self.tokens.get(self.pos + ahead)
    }

    fn at_ident(&self, word: &str) -> bool {
        self.peek().is_some_and(|t| t.is_ident(word))
    }

    fn at_punct(&self, c: char) -> bool {
        self.peek().is_some_and(|t| t.is_punct(c))
    }

    fn eof_error(&self, what: &str) -> ParseError {
        let (line, column) = self
            .tokens
            .last()
            .map(|t| (t.span.end_line, t.span.end_column))
            .unwrap_or((1, 1));
        ParseError::new(
            line,
            column,
            format!("unexpected end of file, expected {what}"),
        )
    }

    fn error_at(&self, token: &Token, message: impl Into<String>) -> ParseError {
        ParseError::new(token.span.start_line, token.span.start_column, message)
    }

    fn next(&mut self, what: &str) -> Result<&'a Token, ParseError> {
        let token = self.peek().ok_or_else(|| self.eof_error(what))?;
        self.pos += 1;
        Ok(token)
    }

    fn expect_punct(&mut self, c: char) -> Result<&'a Token, ParseError> {
        let token = self.next(&format!("`{c}`"))?;
        if token.is_punct(c) {
            Ok(token)
        } else {
            Err(self.error_at(token, format!("expected `{c}`, found `{}`", token.text)))
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<&'a Token, ParseError> {
        let token = self.next(what)?;
        if token.kind == TokenKind::Ident {
            Ok(token)
        } else {
            Err(self.error_at(token, format!("expected {what}, found `{}`", token.text)))
        }
    }

    fn qualified_name(&mut self) -> Result<String, ParseError> {
        let mut name = self.expect_ident("a name")?.text.clone();
        while self.at_punct('.') && self.peek_at(1).is_some_and(|t| t.kind == TokenKind::Ident) {
            self.pos += 1;
            name.push('.');
            name.push_str(&self.next("a name")?.text);
        }
        Ok(name)
    }

    /// Consumes a balanced `open ... close` group starting at the current token.
    fn skip_group(&mut self, open: char, close: char) -> Result<&'a Token, ParseError> {
        let first = self.expect_punct(open)?;
        let mut depth = 1usize;
        loop {
            let token = self.peek().ok_or_else(|| {
                ParseError::new(
                    first.span.start_line,
                    first.span.start_column,
                    format!("unclosed `{open}`"),
                )
            })?;
            self.pos += 1;
            if token.is_punct(open) {
                depth += 1;
            } else if token.is_punct(close) {
                depth -= 1;
                if depth == 0 {
                    return Ok(token);
                }
            }
        }
    }

    fn compilation_unit(&mut self) -> Result<(), ParseError> {
        let save = self.pos;
        while self.at_punct('@') {
            self.annotation()?;
        }
        if self.at_ident("package") {
            self.pos += 1;
            self.file.package = self.qualified_name()?;
            self.expect_punct(';')?;
        } else {
            self.pos = save;
        }

        while self.at_ident("import") {
            let start = self.next("import")?;
            let is_static = self.at_ident("static");
            if is_static {
                self.pos += 1;
            }
            let name = self.qualified_name()?;
            let on_demand = self.at_punct('.');
            if on_demand {
                self.pos += 1;
                self.expect_punct('*')?;
            }
            self.expect_punct(';')?;
            if on_demand && !is_static {
                self.file.warnings.push((
                    start.span.start_line,
                    format!("on-demand import `{name}.*` does not contribute to name resolution"),
                ));
            } else if !is_static {
                let simple = name.rsplit('.').next().unwrap_or(&name).to_string();
                self.file.imports.insert(simple, name);
            }
        }

        while let Some(token) = self.peek() {
            if token.is_punct(';') {
                self.pos += 1;
                continue;
            }
            let start = token.span;
            let modifiers = self.modifiers()?;
            let types = self.type_declaration(None, start, modifiers)?;
            self.file.types.extend(types);
        }
        Ok(())
    }

    fn annotation(&mut self) -> Result<String, ParseError> {
        let at = self.expect_punct('@')?;
        if self.at_ident("interface") {
            return Err(self.error_at(at, "annotation type declarations are not supported"));
        }
        let name = self.qualified_name()?;
        if self.at_punct('(') {
            self.skip_group('(', ')')?;
        }
        Ok(name)
    }

    fn modifiers(&mut self) -> Result<Modifiers, ParseError> {
        let mut words = Vec::new();
        let mut override_marker = false;
        while let Some(token) = self.peek() {
            if token.is_punct('@') {
                let name = self.annotation()?;
                override_marker |= name == "Override" || name == "java.lang.Override";
            } else if token.kind == TokenKind::Ident && MODIFIERS.contains(&token.text.as_str()) {
                words.push(token.text.clone());
                self.pos += 1;
            } else if token.is_ident("non")
                && self.peek_at(1).is_some_and(|t| t.is_punct('-'))
                && self.peek_at(2).is_some_and(|t| t.is_ident("sealed"))
            {
                words.push("non-sealed".into());
                self.pos += 3;
            } else {
                break;
            }
        }
        Ok(Modifiers {
            words,
            override_marker,
        })
    }

    fn at_type_keyword(&self) -> bool {
        self.at_ident("class") || self.at_ident("interface") || self.at_ident("enum")
    }

    fn at_record(&self) -> bool {
        self.at_ident("record")
            && self.peek_at(1).is_some_and(|t| t.kind == TokenKind::Ident)
            && self
                .peek_at(2)
                .is_some_and(|t| t.is_punct('(') || t.is_punct('<'))
    }

    /// Parses a type declaration and, for top-level types, its directly
    /// nested types. Returns the declared type first.
    fn type_declaration(
        &mut self,
        outer: Option<&str>,
        start: Position,
        _modifiers: Modifiers,
    ) -> Result<Vec<RawType>, ParseError> {
        if self.at_record() {
            let token = self.next("record")?;
            return Err(self.error_at(token, "record declarations are not supported"));
        }
        let keyword = self.next("a type declaration")?;
        let kind = match keyword.text.as_str() {
            "class" if keyword.kind == TokenKind::Ident => ClassKind::Class,
            "interface" if keyword.kind == TokenKind::Ident => ClassKind::Interface,
            "enum" if keyword.kind == TokenKind::Ident => ClassKind::Enum,
            _ => {
                return Err(self.error_at(
                    keyword,
                    format!(
                        "expected class, interface or enum declaration, found `{}`",
                        keyword.text
                    ),
                ))
            }
        };
        let simple_name = self.expect_ident("a type name")?.text.clone();
        if self.at_punct('<') {
            self.skip_group('<', '>')?;
        }

        let mut extends = Vec::new();
        let mut implements = Vec::new();
        loop {
            let target = if self.at_ident("extends") {
                &mut extends
            } else if self.at_ident("implements") {
                &mut implements
            } else if self.at_ident("permits") {
                self.pos += 1;
                self.type_list()?;
                continue;
            } else {
                break;
            };
            self.pos += 1;
            target.extend(self.type_list()?);
        }

        let binary_name = match outer {
            Some(outer) => format!("{outer}${simple_name}"),
            None => simple_name.clone(),
        };
        let mut declared = RawType {
            simple_name,
            binary_name,
            outer: outer.map(str::to_string),
            kind,
            extends,
            implements,
            fields: Vec::new(),
            methods: Vec::new(),
            span: start,
        };
        let mut nested = Vec::new();

        self.expect_punct('{')?;
        if kind == ClassKind::Enum {
            self.enum_constants()?;
        }
        let close = loop {
            let token = self.peek().ok_or_else(|| self.eof_error("`}`"))?;
            if token.is_punct('}') {
                self.pos += 1;
                break token;
            }
            self.member(&mut declared, &mut nested)?;
        };
        declared.span.end_line = close.span.end_line;
        declared.span.end_column = close.span.end_column;

        let mut out = vec![declared];
        out.extend(nested);
        Ok(out)
    }

    fn type_list(&mut self) -> Result<Vec<RawTypeRef>, ParseError> {
        let mut out = vec![self.type_ref()?];
        while self.at_punct(',') {
            self.pos += 1;
            out.push(self.type_ref()?);
        }
        Ok(out)
    }

    fn enum_constants(&mut self) -> Result<(), ParseError> {
        loop {
            if self.at_punct(';') {
                self.pos += 1;
                return Ok(());
            }
            if self.at_punct('}') {
                return Ok(());
            }
            while self.at_punct('@') {
                self.annotation()?;
            }
            self.expect_ident("an enum constant")?;
            if self.at_punct('(') {
                self.skip_group('(', ')')?;
            }
            if self.at_punct('{') {
                self.skip_group('{', '}')?;
            }
            if self.at_punct(',') {
                self.pos += 1;
            } else if !self.at_punct(';') && !self.at_punct('}') {
                let token = self.peek().ok_or_else(|| self.eof_error("`;`"))?;
                return Err(self.error_at(
                    token,
                    format!("unexpected `{}` in enum constants", token.text),
                ));
            }
        }
    }

    fn member(&mut self, owner: &mut RawType, nested: &mut Vec<RawType>) -> Result<(), ParseError> {
        let token = self.peek().ok_or_else(|| self.eof_error("a member"))?;
        if token.is_punct(';') {
            self.pos += 1;
            return Ok(());
        }
        if token.is_punct('{') {
            self.skip_group('{', '}')?;
            return Ok(());
        }
        if token.is_ident("static") && self.peek_at(1).is_some_and(|t| t.is_punct('{')) {
            self.pos += 1;
            self.skip_group('{', '}')?;
            return Ok(());
        }

        let start = token.span;
        let modifiers = self.modifiers()?;

        if self.at_type_keyword() || self.at_record() {
            if owner.outer.is_none() {
                let types = self.type_declaration(Some(&owner.binary_name), start, modifiers)?;
                nested.extend(types);
            } else {
                if self.at_record() {
                    let token = self.next("record")?;
                    return Err(self.error_at(token, "record declarations are not supported"));
                }
                self.file.warnings.push((
                    start.start_line,
                    format!(
                        "type nested inside `{}` skipped (only one nesting level is extracted)",
                        owner.binary_name
                    ),
                ));
                while !self.at_punct('{') {
                    self.next("`{`")?;
                }
                self.skip_group('{', '}')?;
            }
            return Ok(());
        }

        if self.at_punct('<') {
            self.skip_group('<', '>')?;
        }

        let is_constructor =
            self.at_ident(&owner.simple_name) && self.peek_at(1).is_some_and(|t| t.is_punct('('));
        let (name, return_type) = if is_constructor {
            (self.next("a constructor")?.text.clone(), None)
        } else {
            let ty = self.type_ref()?;
            (self.expect_ident("a member name")?.text.clone(), Some(ty))
        };

        if self.at_punct('(') {
            let method = self.method_rest(name, return_type, modifiers, start)?;
            owner.methods.push(method);
        } else {
            let ty = return_type.expect("fields always have a declared type");
            let name_token = &self.tokens[self.pos - 1];
            self.field_rest(
                name,
                name_token.span,
                ty,
                modifiers.words,
                &mut owner.fields,
            )?;
        }
        Ok(())
    }

    fn method_rest(
        &mut self,
        name: String,
        mut return_type: Option<RawTypeRef>,
        modifiers: Modifiers,
        start: Position,
    ) -> Result<RawMethod, ParseError> {
        self.expect_punct('(')?;
        let mut params = Vec::new();
        if self.at_punct(')') {
            self.pos += 1;
        } else {
            loop {
                if let Some(param) = self.parameter()? {
                    params.push(param);
                }
                let token = self.next("`)`")?;
                if token.is_punct(')') {
                    break;
                }
                if !token.is_punct(',') {
                    return Err(self.error_at(
                        token,
                        format!("expected `,` or `)`, found `{}`", token.text),
                    ));
                }
            }
        }
        while self.at_punct('[') {
            self.pos += 1;
            let close = self.expect_punct(']')?;
            if let Some(ty) = return_type.as_mut() {
                ty.text.push_str(" [ ]");
                ty.span.end_line = close.span.end_line;
                ty.span.end_column = close.span.end_column;
            }
        }
        if self.at_ident("throws") {
            self.pos += 1;
            self.type_list()?;
        }
        let token = self
            .peek()
            .ok_or_else(|| self.eof_error("a method body or `;`"))?;
        let end = if token.is_punct('{') {
            self.skip_group('{', '}')?
        } else if token.is_punct(';') {
            self.pos += 1;
            token
        } else {
            return Err(self.error_at(
                token,
                format!("expected method body or `;`, found `{}`", token.text),
            ));
        };
        Ok(RawMethod {
            name,
            is_constructor: return_type.is_none(),
            return_type,
            modifiers: modifiers.words,
            override_marker: modifiers.override_marker,
            params,
            span: Position::new(
                start.start_line,
                start.start_column,
                end.span.end_line,
                end.span.end_column,
            ),
        })
    }

    /// Parses one formal parameter; receiver parameters yield `None`.
    fn parameter(&mut self) -> Result<Option<RawVar>, ParseError> {
        let start = self
            .peek()
            .ok_or_else(|| self.eof_error("a parameter"))?
            .span;
        let modifiers = self.modifiers()?;
        let mut ty = self.type_ref()?;
        let name_token = self.expect_ident("a parameter name")?;
        if name_token.text == "this" {
            return Ok(None);
        }
        let mut end = name_token.span;
        while self.at_punct('[') {
            self.pos += 1;
            end = self.expect_punct(']')?.span;
            ty.text.push_str(" [ ]");
        }
        Ok(Some(RawVar {
            name: name_token.text.clone(),
            ty,
            modifiers: modifiers.words,
            span: Position::new(
                start.start_line,
                start.start_column,
                end.end_line,
                end.end_column,
            ),
        }))
    }

    fn field_rest(
        &mut self,
        first_name: String,
        first_span: Position,
        ty: RawTypeRef,
        modifiers: Vec<String>,
        out: &mut Vec<RawVar>,
    ) -> Result<(), ParseError> {
        let mut name = first_name;
        let mut span = first_span;
        loop {
            let mut var_ty = ty.clone();
            while self.at_punct('[') {
                self.pos += 1;
                self.expect_punct(']')?;
                var_ty.text.push_str(" [ ]");
            }
            if self.at_punct('=') {
                self.pos += 1;
                self.skip_initializer()?;
            }
            out.push(RawVar {
                name,
                ty: var_ty,
                modifiers: modifiers.clone(),
                span,
            });
            let token = self.next("`;`")?;
            if token.is_punct(';') {
                return Ok(());
            }
            if !token.is_punct(',') {
                return Err(self.error_at(
                    token,
                    format!("expected `,` or `;`, found `{}`", token.text),
                ));
            }
            let next = self.expect_ident("a field name")?;
            name = next.text.clone();
            span = next.span;
        }
    }

    /// Skips an initializer expression, stopping before the `,` or `;` that
    /// ends the declarator.
    fn skip_initializer(&mut self) -> Result<(), ParseError> {
        let mut depth = 0usize;
        loop {
            let token = self.peek().ok_or_else(|| self.eof_error("`;`"))?;
            match token.kind {
                TokenKind::Punct('(' | '[' | '{') => depth += 1,
                TokenKind::Punct(')' | ']' | '}') => {
                    depth = depth.checked_sub(1).ok_or_else(|| {
                        self.error_at(token, format!("unexpected `{}` in initializer", token.text))
                    })?;
                }
                TokenKind::Punct(',' | ';') if depth == 0 => return Ok(()),
                TokenKind::Ident if token.text == "new" => {
                    self.pos += 1;
                    while self
                        .peek()
                        .is_some_and(|t| t.kind == TokenKind::Ident || t.is_punct('.'))
                    {
                        self.pos += 1;
                    }
                    if self.at_punct('<') {
                        self.skip_group('<', '>')?;
                    }
                    continue;
                }
                TokenKind::Punct('.') if self.peek_at(1).is_some_and(|t| t.is_punct('<')) => {
                    self.pos += 1;
                    self.skip_group('<', '>')?;
                    continue;
                }
                _ => {}
            }
            self.pos += 1;
        }
    }

    /// Reads a type as raw text: name segments, generic arguments, array
    /// dimensions and varargs. Type annotations are dropped.
    fn type_ref(&mut self) -> Result<RawTypeRef, ParseError> {
        while self.at_punct('@') {
            self.annotation()?;
        }
        let first = self.expect_ident("a type")?;
        let mut parts = vec![first.text.clone()];
        let mut end = first.span;
        loop {
            if self.at_punct('<') {
                let open = self.next("`<`")?;
                parts.push("<".into());
                let mut depth = 1usize;
                while depth > 0 {
                    let token = self.peek().ok_or_else(|| {
                        ParseError::new(
                            open.span.start_line,
                            open.span.start_column,
                            "unclosed `<`",
                        )
                    })?;
                    if token.is_punct('@') {
                        self.annotation()?;
                        continue;
                    }
                    self.pos += 1;
                    if token.is_punct('<') {
                        depth += 1;
                    } else if token.is_punct('>') {
                        depth -= 1;
                    } else if matches!(
                        token.kind,
                        TokenKind::Punct(';' | '{' | '}' | '(' | ')' | '=')
                    ) {
                        return Err(self.error_at(
                            token,
                            format!("unexpected `{}` in type arguments", token.text),
                        ));
                    }
                    parts.push(token.text.clone());
                    end = token.span;
                }
            } else if self.at_punct('.')
                && self.peek_at(1).is_some_and(|t| t.kind == TokenKind::Ident)
            {
                self.pos += 1;
                let seg = self.next("a name")?;
                parts.push(".".into());
                parts.push(seg.text.clone());
                end = seg.span;
            } else {
                break;
            }
        }
        loop {
            while self.at_punct('@') {
                self.annotation()?;
            }
            if self.at_punct('[') && self.peek_at(1).is_some_and(|t| t.is_punct(']')) {
                self.pos += 1;
                end = self.next("`]`")?.span;
                parts.push("[ ]".into());
            } else if self.peek().is_some_and(|t| t.kind == TokenKind::Ellipsis) {
                end = self.next("`...`")?.span;
                parts.push("...".into());
            } else {
                break;
            }
        }
        Ok(RawTypeRef {
            text: parts.join(" "),
            span: Position::new(
                first.span.start_line,
                first.span.start_column,
                end.end_line,
                end.end_column,
            ),
        })
    }
}
