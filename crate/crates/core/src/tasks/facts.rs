//! Facts file for smokers & friends:
//!
//! ```text
//! # comment
//! friend a b
//! smokes a
//! cancer a
//! not-cancer b
//! ```

use std::fmt::Write;

use thiserror::Error;

use super::sf::{group_of, PERSONS};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SfFacts {
    /// Known friendships, each listed once.
    pub friends: Vec<(char, char)>,
    pub smokes: Vec<char>,
    pub cancer: Vec<char>,
    pub not_cancer: Vec<char>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactsError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown person `{name}` (expected one of a..n)")]
    UnknownPerson { line: usize, name: String },
    #[error("line {line}: {message}")]
    Inconsistent { line: usize, message: String },
}

impl Default for SfFacts {
    fn default() -> Self {
        Self::parse(include_str!("../../data/sf_facts.txt")).expect("shipped facts parse")
    }
}

impl SfFacts {
    pub fn parse(text: &str) -> Result<Self, FactsError> {
        let mut facts = SfFacts { friends: vec![], smokes: vec![], cancer: vec![], not_cancer: vec![] };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let words: Vec<&str> = content.split_whitespace().collect();
            let person = |name: &str| -> Result<char, FactsError> {
                let mut chars = name.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) if PERSONS.contains(&c) => Ok(c),
                    _ => Err(FactsError::UnknownPerson { line, name: name.to_string() }),
                }
            };
            let syntax = |message: &str| FactsError::Syntax { line, message: message.to_string() };
            let inconsistent = |message: String| FactsError::Inconsistent { line, message };
            match words.as_slice() {
                ["friend", x, y] => {
                    let (x, y) = (person(x)?, person(y)?);
                    if x == y {
                        return Err(inconsistent(format!("`{x}` cannot be their own friend")));
                    }
                    if facts.friends.iter().any(|&p| p == (x, y) || p == (y, x)) {
                        return Err(inconsistent(format!("friendship {x}-{y} listed twice")));
                    }
                    facts.friends.push((x, y));
                }
                ["smokes", x] => push_unique(&mut facts.smokes, person(x)?, "smokes", line)?,
                ["cancer", x] => {
                    let x = person(x)?;
                    if facts.not_cancer.contains(&x) {
                        return Err(inconsistent(format!("`{x}` both has and lacks cancer")));
                    }
                    push_unique(&mut facts.cancer, x, "cancer", line)?;
                }
                ["not-cancer", x] => {
                    let x = person(x)?;
                    if facts.cancer.contains(&x) {
                        return Err(inconsistent(format!("`{x}` both has and lacks cancer")));
                    }
                    push_unique(&mut facts.not_cancer, x, "not-cancer", line)?;
                }
                [kw, ..] if ["friend", "smokes", "cancer", "not-cancer"].contains(kw) => {
                    return Err(syntax(&format!("wrong number of arguments for `{kw}`")))
                }
                _ => return Err(syntax(&format!("unknown fact `{content}`"))),
            }
        }
        Ok(facts)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (x, y) in &self.friends {
            let _ = writeln!(out, "friend {x} {y}");
        }
        for x in &self.smokes {
            let _ = writeln!(out, "smokes {x}");
        }
        for x in &self.cancer {
            let _ = writeln!(out, "cancer {x}");
        }
        for x in &self.not_cancer {
            let _ = writeln!(out, "not-cancer {x}");
        }
        out
    }

    /// Same-group pairs `(x, y)` with `x < y` that are not listed as
    /// friends in either order.
    pub fn non_friends(&self) -> Vec<(char, char)> {
        let mut out = Vec::new();
        for &x in PERSONS.iter() {
            for &y in PERSONS.iter().filter(|&&y| y > x && group_of(y) == group_of(x)) {
                if !self.friends.iter().any(|&p| p == (x, y) || p == (y, x)) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Everyone not listed as a smoker.
    pub fn non_smokers(&self) -> Vec<char> {
        PERSONS.iter().copied().filter(|p| !self.smokes.contains(p)).collect()
    }
}

fn push_unique(list: &mut Vec<char>, x: char, kind: &str, line: usize) -> Result<(), FactsError> {
    if list.contains(&x) {
        return Err(FactsError::Inconsistent { line, message: format!("`{kind} {x}` listed twice") });
    }
    list.push(x);
    Ok(())
}
