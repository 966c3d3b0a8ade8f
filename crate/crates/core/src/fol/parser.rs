//! Recursive-descent parser for the rule language.
//!
//! ```text
//! formula := ("forall" | "exists") VAR ":" formula | implication
//! implication := disjunction ["=>" formula]
//! disjunction := conjunction {"or" conjunction}
//! conjunction := unary {"and" unary}
//! unary := "not" unary | atom | "(" formula ")"
//! atom := IDENT "(" VAR {"," VAR} ")"
//! ```

use std::collections::HashSet;

use thiserror::Error;

use super::ast::Formula;
use super::kb::{KnowledgeBase, Rule};

/// Syntax error at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbParseError {
    #[error("line {0}")]
    Syntax(#[from] ParseError),
    #[error("line {line}: duplicate rule id `{id}` (first defined on line {first})")]
    DuplicateId { id: String, line: usize, first: usize },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Forall,
    Exists,
    Not,
    And,
    Or,
    Implies,
    LParen,
    RParen,
    Comma,
    Colon,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Forall => "`forall`".into(),
            Tok::Exists => "`exists`".into(),
            Tok::Not => "`not`".into(),
            Tok::And => "`and`".into(),
            Tok::Or => "`or`".into(),
            Tok::Implies => "`=>`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        let simple = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            _ => None,
        };
        if let Some(tok) = simple {
            chars.next();
            column += 1;
            out.push(Token { tok, line: l, column: col });
            continue;
        }
        if c == '=' {
            chars.next();
            if chars.peek() == Some(&'>') {
                chars.next();
                column += 2;
                out.push(Token { tok: Tok::Implies, line: l, column: col });
                continue;
            }
            return Err(ParseError { line: l, column: col, message: "expected `=>`".into() });
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    word.push(c);
                    chars.next();
                    column += 1;
                } else {
                    break;
                }
            }
            let tok = match word.as_str() {
                "forall" => Tok::Forall,
                "exists" => Tok::Exists,
                "not" => Tok::Not,
                "and" => Tok::And,
                "or" => Tok::Or,
                _ => Tok::Ident(word),
            };
            out.push(Token { tok, line: l, column: col });
            continue;
        }
        return Err(ParseError {
            line: l,
            column: col,
            message: format!("unexpected character `{c}`"),
        });
    }
    out.push(Token { tok: Tok::Eof, line, column });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        let t = self.peek();
        ParseError {
            line: t.line,
            column: t.column,
            message: format!("expected {expected}, found {}", t.tok.describe()),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if self.peek().tok == tok {
            self.advance();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn ident(&mut self, expected: &str) -> Result<String, ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            _ => Err(self.error(expected)),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        match self.peek().tok {
            Tok::Forall | Tok::Exists => {
                let universal = self.advance().tok == Tok::Forall;
                let var = self.ident("a variable")?;
                self.expect(Tok::Colon, "`:` after quantified variable")?;
                let body = self.formula()?;
                Ok(if universal {
                    Formula::ForAll { var, body: Box::new(body) }
                } else {
                    Formula::Exists { var, body: Box::new(body) }
                })
            }
            _ => self.implication(),
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.peek().tok == Tok::Implies {
            self.advance();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.peek().tok == Tok::Or {
            self.advance();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek().tok == Tok::And {
            self.advance();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().tok {
            Tok::Not => {
                self.advance();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.advance();
                let inner = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(_) => self.atom(),
            Tok::Forall | Tok::Exists => {
                Err(self.error("an atom or `(`; parenthesize nested quantifiers"))
            }
            _ => Err(self.error("a formula")),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let predicate = self.ident("a predicate name")?;
        self.expect(Tok::LParen, "`(` after predicate name")?;
        let mut args = vec![self.ident("a variable")?];
        while self.peek().tok == Tok::Comma {
            self.advance();
            args.push(self.ident("a variable")?);
        }
        self.expect(Tok::RParen, "`)` closing the argument list")?;
        Ok(Formula::Atom { predicate, args })
    }
}

/// Parses a single formula.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    if parser.peek().tok == Tok::Eof {
        return Err(parser.error("a formula"));
    }
    let f = parser.formula()?;
    if parser.peek().tok != Tok::Eof {
        return Err(parser.error("end of formula"));
    }
    Ok(f)
}

/// Parses a line-oriented KB file: `id : formula`, with `#` comments.
///
/// A trailing comment on a rule line becomes the rule label. The returned
/// knowledge base has no groundings attached.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, KbParseError> {
    let mut rules: Vec<Rule> = Vec::new();
    let mut seen = std::collections::HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let (content, comment) = match raw.find('#') {
            Some(pos) => (&raw[..pos], Some(raw[pos + 1..].trim())),
            None => (raw, None),
        };
        if content.trim().is_empty() {
            continue;
        }
        let Some(colon) = content.find(':') else {
            return Err(KbParseError::Malformed {
                line,
                message: "expected `id : formula`".into(),
            });
        };
        let id = content[..colon].trim();
        if !is_identifier(id) {
            return Err(KbParseError::Malformed {
                line,
                message: format!("invalid rule id `{id}`"),
            });
        }
        if let Some(&first) = seen.get(id) {
            return Err(KbParseError::DuplicateId { id: id.to_string(), line, first });
        }
        let body_offset = colon + 1;
        let formula = parse_formula(&content[body_offset..]).map_err(|e| ParseError {
            line,
            column: e.column + content[..body_offset].chars().count(),
            message: e.message,
        })?;
        seen.insert(id.to_string(), line);
        let label = comment.filter(|c| !c.is_empty()).unwrap_or(id).to_string();
        rules.push(Rule { id: id.to_string(), formula, label, line });
    }
    Ok(KnowledgeBase::from_rules(rules))
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !matches!(s, "forall" | "exists" | "not" | "and" | "or")
}

/// Ids that occur more than once.
pub(crate) fn duplicates<'a>(ids: impl IntoIterator<Item = &'a str>) -> Vec<&'a str> {
    let mut seen = HashSet::new();
    ids.into_iter().filter(|id| !seen.insert(*id)).collect()
}
