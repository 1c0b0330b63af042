//! Just enough GBNF to check emitted grammars: literals, character classes, groups,
//! alternation and the `* + ? {m,n}` repeats. Rules are inlined into one anchored regex,
//! so recursive rules are rejected.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use regex::{Regex, RegexBuilder};

use super::GrammarError;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Expr {
    Lit(String),
    Class { negated: bool, items: Vec<(char, char)> },
    Any,
    Ref(String),
    Seq(Vec<Expr>),
    Alt(Vec<Expr>),
    Repeat { inner: Box<Expr>, min: u32, max: Option<u32> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Define,
    Str(String),
    Class { negated: bool, items: Vec<(char, char)> },
    LParen,
    RParen,
    Pipe,
    Star,
    Plus,
    Question,
    Dot,
    Braces(u32, Option<u32>),
}

fn escape_char(chars: &mut std::iter::Peekable<std::str::Chars>, line: usize) -> Result<char, GrammarError> {
    let bad = |what: &str| GrammarError::Syntax { line, message: what.to_string() };
    match chars.next().ok_or_else(|| bad("dangling escape"))? {
        'n' => Ok('\n'),
        't' => Ok('\t'),
        'r' => Ok('\r'),
        'x' => {
            let hex: String = [chars.next(), chars.next()].into_iter().flatten().collect();
            u32::from_str_radix(&hex, 16).ok().and_then(char::from_u32).ok_or_else(|| bad("bad \\x escape"))
        }
        c => Ok(c),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, GrammarError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let err = |message: &str| GrammarError::Syntax { line, message: message.to_string() };
        match c {
            '\n' => {
                line += 1;
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                }
            }
            '"' => {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next().ok_or_else(|| err("unterminated string"))? {
                        '"' => break,
                        '\\' => s.push(escape_char(&mut chars, line)?),
                        '\n' => return Err(err("newline in string")),
                        c => s.push(c),
                    }
                }
                out.push((Tok::Str(s), line));
            }
            '[' => {
                chars.next();
                let negated = chars.next_if_eq(&'^').is_some();
                let mut items = Vec::new();
                loop {
                    let lo = match chars.next().ok_or_else(|| err("unterminated class"))? {
                        ']' => break,
                        '\\' => escape_char(&mut chars, line)?,
                        c => c,
                    };
                    let hi = if chars.peek() == Some(&'-') {
                        let mut look = chars.clone();
                        look.next();
                        if look.peek().is_some_and(|&c| c != ']') {
                            chars.next();
                            match chars.next().unwrap() {
                                '\\' => escape_char(&mut chars, line)?,
                                c => c,
                            }
                        } else {
                            lo
                        }
                    } else {
                        lo
                    };
                    if hi < lo {
                        return Err(err("reversed class range"));
                    }
                    items.push((lo, hi));
                }
                out.push((Tok::Class { negated, items }, line));
            }
            ':' => {
                let word: String = chars.by_ref().take(3).collect();
                if word != "::=" {
                    return Err(err("expected ::="));
                }
                out.push((Tok::Define, line));
            }
            '{' => {
                chars.next();
                let mut body = String::new();
                loop {
                    match chars.next().ok_or_else(|| err("unterminated braces"))? {
                        '}' => break,
                        c => body.push(c),
                    }
                }
                let num = |s: &str| s.trim().parse::<u32>().map_err(|_| err("bad repeat count"));
                let tok = match body.split_once(',') {
                    None => {
                        let n = num(&body)?;
                        Tok::Braces(n, Some(n))
                    }
                    Some((a, b)) if b.trim().is_empty() => Tok::Braces(num(a)?, None),
                    Some((a, b)) => Tok::Braces(num(a)?, Some(num(b)?)),
                };
                out.push((tok, line));
            }
            '(' | ')' | '|' | '*' | '+' | '?' | '.' => {
                chars.next();
                let t = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '|' => Tok::Pipe,
                    '*' => Tok::Star,
                    '+' => Tok::Plus,
                    '?' => Tok::Question,
                    _ => Tok::Dot,
                };
                out.push((t, line));
            }
            c if c.is_ascii_alphanumeric() || c == '-' || c == '_' => {
                let mut s = String::new();
                while let Some(c) = chars.next_if(|c| c.is_ascii_alphanumeric() || *c == '-' || *c == '_') {
                    s.push(c);
                }
                out.push((Tok::Ident(s), line));
            }
            other => return Err(err(&format!("unexpected character {other:?}"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn line(&self) -> usize {
        self.toks.get(self.pos).or(self.toks.last()).map_or(0, |(_, l)| *l)
    }

    fn err(&self, message: &str) -> GrammarError {
        GrammarError::Syntax { line: self.line(), message: message.to_string() }
    }

    fn at_rule_start(&self) -> bool {
        matches!(self.toks.get(self.pos), Some((Tok::Ident(_), _)))
            && matches!(self.toks.get(self.pos + 1), Some((Tok::Define, _)))
    }

    fn alt(&mut self) -> Result<Expr, GrammarError> {
        let mut arms = vec![self.seq()?];
        while self.peek() == Some(&Tok::Pipe) {
            self.pos += 1;
            arms.push(self.seq()?);
        }
        Ok(if arms.len() == 1 { arms.pop().unwrap() } else { Expr::Alt(arms) })
    }

    fn seq(&mut self) -> Result<Expr, GrammarError> {
        let mut items = Vec::new();
        loop {
            if self.at_rule_start() {
                break;
            }
            let atom = match self.peek() {
                Some(Tok::Str(s)) => Expr::Lit(s.clone()),
                Some(Tok::Class { negated, items }) => Expr::Class { negated: *negated, items: items.clone() },
                Some(Tok::Dot) => Expr::Any,
                Some(Tok::Ident(name)) => Expr::Ref(name.clone()),
                Some(Tok::LParen) => {
                    self.pos += 1;
                    let inner = self.alt()?;
                    if self.peek() != Some(&Tok::RParen) {
                        return Err(self.err("expected )"));
                    }
                    inner
                }
                _ => break,
            };
            self.pos += 1;
            let (min, max) = match self.peek() {
                Some(Tok::Star) => (0, None),
                Some(Tok::Plus) => (1, None),
                Some(Tok::Question) => (0, Some(1)),
                Some(Tok::Braces(a, b)) => (*a, *b),
                _ => {
                    items.push(atom);
                    continue;
                }
            };
            self.pos += 1;
            items.push(Expr::Repeat { inner: Box::new(atom), min, max });
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Expr::Seq(items) })
    }
}

/// Parsed rule set.
#[derive(Debug, Clone)]
pub struct Gbnf {
    rules: BTreeMap<String, Expr>,
}

impl Gbnf {
    pub fn parse(src: &str) -> Result<Self, GrammarError> {
        let mut p = Parser { toks: lex(src)?, pos: 0 };
        let mut rules = BTreeMap::new();
        while p.pos < p.toks.len() {
            let Some(Tok::Ident(name)) = p.peek().cloned() else {
                return Err(p.err("expected rule name"));
            };
            p.pos += 1;
            if p.peek() != Some(&Tok::Define) {
                return Err(p.err("expected ::="));
            }
            p.pos += 1;
            let body = p.alt()?;
            if p.pos < p.toks.len() && !p.at_rule_start() {
                return Err(p.err("unexpected token"));
            }
            if rules.insert(name.clone(), body).is_some() {
                return Err(GrammarError::DuplicateRule(name));
            }
        }
        Ok(Gbnf { rules })
    }

    pub fn rule_names(&self) -> impl Iterator<Item = &str> {
        self.rules.keys().map(String::as_str)
    }

    /// Inline everything reachable from `root` into one regex source string.
    pub fn to_regex_source(&self, root: &str) -> Result<String, GrammarError> {
        let mut memo = BTreeMap::new();
        let mut stack = BTreeSet::new();
        self.rule(root, &mut memo, &mut stack)
    }

    fn rule(
        &self,
        name: &str,
        memo: &mut BTreeMap<String, String>,
        stack: &mut BTreeSet<String>,
    ) -> Result<String, GrammarError> {
        if let Some(s) = memo.get(name) {
            return Ok(s.clone());
        }
        let expr = self.rules.get(name).ok_or_else(|| GrammarError::UndefinedRule(name.to_string()))?;
        if !stack.insert(name.to_string()) {
            return Err(GrammarError::Recursive(name.to_string()));
        }
        let s = self.expr(expr, memo, stack)?;
        stack.remove(name);
        memo.insert(name.to_string(), s.clone());
        Ok(s)
    }

    fn expr(
        &self,
        e: &Expr,
        memo: &mut BTreeMap<String, String>,
        stack: &mut BTreeSet<String>,
    ) -> Result<String, GrammarError> {
        Ok(match e {
            Expr::Lit(s) => regex::escape(s),
            Expr::Any => "(?s:.)".to_string(),
            Expr::Class { negated, items } => {
                let mut s = String::from(if *negated { "[^" } else { "[" });
                for (lo, hi) in items {
                    push_class_char(&mut s, *lo);
                    if hi != lo {
                        s.push('-');
                        push_class_char(&mut s, *hi);
                    }
                }
                s.push(']');
                s
            }
            Expr::Ref(name) => format!("(?:{})", self.rule(name, memo, stack)?),
            Expr::Seq(items) => {
                let mut s = String::new();
                for i in items {
                    s.push_str(&self.expr(i, memo, stack)?);
                }
                s
            }
            Expr::Alt(arms) => {
                let parts: Result<Vec<String>, _> = arms.iter().map(|a| self.expr(a, memo, stack)).collect();
                format!("(?:{})", parts?.join("|"))
            }
            Expr::Repeat { inner, min, max } => {
                let body = format!("(?:{})", self.expr(inner, memo, stack)?);
                match (min, max) {
                    (0, None) => format!("{body}*"),
                    (1, None) => format!("{body}+"),
                    (0, Some(1)) => format!("{body}?"),
                    (m, None) => format!("{body}{{{m},}}"),
                    (m, Some(n)) => format!("{body}{{{m},{n}}}"),
                }
            }
        })
    }

    pub fn compile(&self, root: &str) -> Result<Regex, GrammarError> {
        let src = format!(r"\A(?:{})\z", self.to_regex_source(root)?);
        RegexBuilder::new(&src)
            .size_limit(1 << 27)
            .dfa_size_limit(1 << 27)
            .build()
            .map_err(|e| GrammarError::Regex(e.to_string()))
    }
}

fn push_class_char(s: &mut String, c: char) {
    if c.is_ascii_alphanumeric() || !c.is_ascii() {
        s.push(c);
    } else {
        let _ = write!(s, "\\x{{{:X}}}", c as u32);
    }
}
