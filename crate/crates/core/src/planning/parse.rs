//! Text format for grounded planning models.
//!
//! ```text
//! # comments run to end of line
//! fluents: at-a at-b holding
//! action move-a-b cost 1 pre {at-a} add {at-b} del {at-a}
//! init {at-a}
//! goal {at-b}
//! ```
//!
//! An action body may optionally be wrapped in braces
//! (`action a { cost 1 pre {} add {g} del {} }`), the field clauses may appear
//! in any order, and omitted `pre`/`add`/`del` clauses default to the empty
//! set. Set members may be separated by whitespace or commas. `fluents:` may
//! appear more than once; declarations accumulate.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::cost::Cost;
use crate::planning::model::{is_valid_name, ActionSchema, ModelError, PlanningModel};

const KEYWORDS: [&str; 4] = ["fluents", "action", "init", "goal"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Semantic(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Open,
    Close,
    Colon,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            let push = |tok: Tok, out: &mut Vec<Token>| {
                out.push(Token {
                    tok,
                    line: li + 1,
                    column,
                })
            };
            match c {
                '#' => break,
                c if c.is_whitespace() || c == ',' => i += 1,
                '{' => {
                    push(Tok::Open, &mut out);
                    i += 1;
                }
                '}' => {
                    push(Tok::Close, &mut out);
                    i += 1;
                }
                ':' => {
                    push(Tok::Colon, &mut out);
                    i += 1;
                }
                c if is_word_char(c) => {
                    let start = i;
                    while i < chars.len() && is_word_char(chars[i]) {
                        i += 1;
                    }
                    push(Tok::Word(chars[start..i].iter().collect()), &mut out);
                }
                other => {
                    return Err(ParseError::Syntax {
                        line: li + 1,
                        column,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            }
        }
    }
    Ok(out)
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | '/')
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    eof: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let (line, column) = self.peek().map(|t| (t.line, t.column)).unwrap_or(self.eof);
        ParseError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t.tok == want => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error_here(format!("expected {what}"))),
        }
    }

    fn name(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Token { tok: Tok::Word(w), .. }) if is_valid_name(w) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            Some(Token { tok: Tok::Word(w), .. }) => {
                let msg = format!("invalid {what} `{w}`");
                Err(self.error_here(msg))
            }
            _ => Err(self.error_here(format!("expected {what}"))),
        }
    }

    fn set(&mut self) -> Result<BTreeSet<String>, ParseError> {
        self.expect(Tok::Open, "`{`")?;
        let mut out = BTreeSet::new();
        loop {
            match self.peek().map(|t| &t.tok) {
                Some(Tok::Close) => {
                    self.pos += 1;
                    return Ok(out);
                }
                Some(Tok::Word(_)) => {
                    out.insert(self.name("fluent name")?);
                }
                _ => return Err(self.error_here("expected fluent name or `}`")),
            }
        }
    }

    fn is_keyword_here(&self) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Word(w), .. }) if KEYWORDS.contains(&w.as_str()))
    }

    fn action(&mut self) -> Result<ActionSchema, ParseError> {
        let name = self.name("action name")?;
        let braced = matches!(self.peek().map(|t| &t.tok), Some(Tok::Open));
        if braced {
            self.pos += 1;
        }
        let mut cost = None;
        let (mut pre, mut add, mut del) = (None, None, None);
        loop {
            let field = match self.peek() {
                Some(Token { tok: Tok::Word(w), .. }) if matches!(w.as_str(), "cost" | "pre" | "add" | "del") => {
                    w.clone()
                }
                _ => break,
            };
            let duplicate = || self.error_here(format!("duplicate `{field}` clause in action `{name}`"));
            match field.as_str() {
                "cost" => {
                    if cost.is_some() {
                        return Err(duplicate());
                    }
                    self.pos += 1;
                    let tok = self.peek().cloned();
                    let value = match tok {
                        Some(Token { tok: Tok::Word(w), .. }) => w.parse::<Cost>().ok().filter(|c| !c.is_negative()),
                        _ => None,
                    };
                    match value {
                        Some(c) => {
                            self.pos += 1;
                            cost = Some(c);
                        }
                        None => return Err(self.error_here("expected non-negative cost")),
                    }
                }
                part => {
                    let slot = match part {
                        "pre" => &mut pre,
                        "add" => &mut add,
                        _ => &mut del,
                    };
                    if slot.is_some() {
                        return Err(duplicate());
                    }
                    self.pos += 1;
                    *slot = Some(self.set()?);
                }
            }
        }
        if braced {
            self.expect(Tok::Close, "`}` closing action body")?;
        }
        let cost = cost.ok_or_else(|| self.error_here(format!("action `{name}` is missing `cost`")))?;
        Ok(ActionSchema {
            name,
            cost,
            pre: pre.unwrap_or_default(),
            add: add.unwrap_or_default(),
            del: del.unwrap_or_default(),
        })
    }
}

/// Parses a model file. Syntax errors carry a 1-based line and column;
/// semantic errors (undeclared fluent, duplicate action, ...) name the
/// offending item.
pub fn parse_model(text: &str) -> Result<PlanningModel, ParseError> {
    let tokens = tokenize(text)?;
    let line_count = text.lines().count().max(1);
    let last_col = text.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
    let mut p = Parser {
        tokens,
        pos: 0,
        eof: (line_count, last_col),
    };
    let mut fluents = BTreeSet::new();
    let mut actions = Vec::new();
    let mut init = None;
    let mut goal = None;

    while let Some(tok) = p.peek().cloned() {
        let Tok::Word(word) = &tok.tok else {
            return Err(p.error_here("expected `fluents:`, `action`, `init` or `goal`"));
        };
        match word.as_str() {
            "fluents" => {
                p.next();
                p.expect(Tok::Colon, "`:` after `fluents`")?;
                while matches!(p.peek().map(|t| &t.tok), Some(Tok::Word(_))) && !p.is_keyword_here() {
                    fluents.insert(p.name("fluent name")?);
                }
            }
            "action" => {
                p.next();
                actions.push(p.action()?);
            }
            "init" | "goal" => {
                p.next();
                let slot = if word == "init" { &mut init } else { &mut goal };
                if slot.is_some() {
                    return Err(ParseError::Syntax {
                        line: tok.line,
                        column: tok.column,
                        message: format!("duplicate `{word}` section"),
                    });
                }
                *slot = Some(p.set()?);
            }
            other => {
                let msg = format!("unknown section `{other}`");
                return Err(p.error_here(msg));
            }
        }
    }
    let init = init.ok_or_else(|| p.error_here("missing `init` section"))?;
    let goal = goal.ok_or_else(|| p.error_here("missing `goal` section"))?;
    Ok(PlanningModel::new(fluents, actions, init, goal)?)
}

fn write_set<'a>(out: &mut String, items: impl IntoIterator<Item = &'a String>) {
    out.push('{');
    let joined: Vec<&str> = items.into_iter().map(String::as_str).collect();
    out.push_str(&joined.join(" "));
    out.push('}');
}

/// Canonical text form: sections in fixed order, entries sorted.
pub fn serialize_model(model: &PlanningModel) -> String {
    let mut out = String::new();
    out.push_str("fluents:");
    for f in model.fluents() {
        out.push(' ');
        out.push_str(f);
    }
    out.push('\n');
    for a in model.actions() {
        let _ = write!(out, "action {} cost {} pre ", a.name, a.cost);
        write_set(&mut out, &a.pre);
        out.push_str(" add ");
        write_set(&mut out, &a.add);
        out.push_str(" del ");
        write_set(&mut out, &a.del);
        out.push('\n');
    }
    out.push_str("init ");
    write_set(&mut out, model.init());
    out.push_str("\ngoal ");
    write_set(&mut out, model.goal());
    out.push('\n');
    out
}
