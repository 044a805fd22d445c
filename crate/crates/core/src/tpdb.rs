//! Reader and writer for the parenthesised TPDB rule format.
//!
//! ```text
//! file      ::= section*
//! section   ::= "(" "VAR" ident* ")"
//!             | "(" "STRATEGY" "INNERMOST" ")"
//!             | "(" "SIGNATURE" ("(" ident nat ")")* ")"
//!             | "(" "RULES" rule* ")"
//!             | "(" "COMMENT" <balanced text> ")"
//! rule      ::= term "->" term | term "->=" term
//! term      ::= ident | ident "(" [term ("," term)*] ")"
//! ident     ::= [A-Za-z0-9_#-]+        (never starting an arrow)
//! ```
//!
//! Identifiers declared in `VAR` are variables; every other identifier is a
//! function symbol whose arity must be the same at each occurrence. A name
//! ending in `#` denotes the sharp twin of the symbol without it and
//! `Com_k` with `k` arguments denotes the compound symbol of arity `k`.
//! Rules written with `->=` are free (relative) rules.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::term::{Symbol, SymbolKind, Term};
use crate::trs::{RelativeTrs, Rule, Trs, TrsError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("symbol {name} used with arity {found}, earlier with arity {expected}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("identifier {0} is ambiguous: declared as a variable but used as a function symbol")]
    AmbiguousIdentifier(String),
    #[error("unknown function symbol {0}")]
    UnknownSymbol(String),
    #[error("invalid rule: {0}")]
    InvalidRule(TrsError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
}

/// A parsed input: a plain system, or a relative one when `->=` rules occur.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum System {
    Plain(Trs),
    Relative(RelativeTrs),
}

impl System {
    /// The system whose rewrite relation is analysed: the whole rule set.
    pub fn rules_union(&self) -> &Trs {
        match self {
            System::Plain(trs) => trs,
            System::Relative(rel) => rel.union(),
        }
    }
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor {
            src,
            pos: 0,
            line: 1,
            column: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            kind,
            line: self.line,
            column: self.column,
        }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.error(ParseErrorKind::Syntax(msg.into()))
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.syntax(format!("expected '{c}'")))
        }
    }

    fn at_arrow(&self) -> bool {
        self.rest().starts_with("->")
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let mut out = String::new();
        while let Some(c) = self.peek() {
            let ok = c.is_ascii_alphanumeric() || matches!(c, '_' | '#' | '-');
            if !ok || self.at_arrow() {
                break;
            }
            out.push(c);
            self.bump();
        }
        if out.is_empty() {
            Err(self.syntax("expected identifier"))
        } else {
            Ok(out)
        }
    }

    /// Skips balanced raw text up to and including the closing parenthesis.
    fn skip_balanced(&mut self) -> Result<(), ParseError> {
        let mut depth = 1usize;
        while let Some(c) = self.bump() {
            match c {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(());
                    }
                }
                _ => {}
            }
        }
        Err(self.syntax("unterminated comment"))
    }
}

/// Symbol resolution shared by file parsing and start-term parsing.
trait Resolver {
    fn is_var(&self, name: &str) -> bool;
    fn symbol(&mut self, name: &str, arity: usize) -> Result<Symbol, ParseErrorKind>;
}

fn symbol_for(name: &str, arity: usize) -> Symbol {
    if let Some(base) = name.strip_suffix('#').filter(|b| !b.is_empty()) {
        return Symbol::new(base, arity).to_sharp();
    }
    if let Some(k) = name
        .strip_prefix("Com_")
        .and_then(|k| k.parse::<usize>().ok())
    {
        if k == arity {
            return Symbol::compound(arity);
        }
    }
    Symbol::new(name, arity)
}

fn parse_term(cur: &mut Cursor<'_>, res: &mut impl Resolver) -> Result<Term, ParseError> {
    let (line, column) = {
        cur.skip_ws();
        (cur.line, cur.column)
    };
    let name = cur.ident()?;
    cur.skip_ws();
    let mut args = Vec::new();
    let applied = cur.peek() == Some('(');
    if applied {
        cur.bump();
        cur.skip_ws();
        if cur.peek() == Some(')') {
            cur.bump();
        } else {
            loop {
                args.push(parse_term(cur, res)?);
                cur.skip_ws();
                match cur.bump() {
                    Some(',') => continue,
                    Some(')') => break,
                    _ => return Err(cur.syntax("expected ',' or ')' in argument list")),
                }
            }
        }
    }
    let at = |kind| ParseError { kind, line, column };
    if res.is_var(&name) {
        if applied {
            return Err(at(ParseErrorKind::AmbiguousIdentifier(name)));
        }
        return Ok(Term::var(&name));
    }
    let f = res.symbol(&name, args.len()).map_err(at)?;
    Ok(Term::App(f, args.into()))
}

#[derive(Default)]
struct FileResolver {
    vars: BTreeSet<String>,
    arities: HashMap<String, usize>,
}

impl Resolver for FileResolver {
    fn is_var(&self, name: &str) -> bool {
        self.vars.contains(name)
    }

    fn symbol(&mut self, name: &str, arity: usize) -> Result<Symbol, ParseErrorKind> {
        match self.arities.get(name) {
            Some(&expected) if expected != arity => Err(ParseErrorKind::ArityMismatch {
                name: name.to_string(),
                expected,
                found: arity,
            }),
            _ => {
                self.arities.insert(name.to_string(), arity);
                Ok(symbol_for(name, arity))
            }
        }
    }
}

pub fn parse(text: &str) -> Result<System, ParseError> {
    let mut cur = Cursor::new(text);
    let mut res = FileResolver::default();
    let mut counted = Vec::new();
    let mut free = Vec::new();
    let mut extra = Vec::new();
    let mut any_free = false;
    loop {
        cur.skip_ws();
        if cur.peek().is_none() {
            break;
        }
        cur.expect('(')?;
        let head = cur.ident()?;
        match head.as_str() {
            "VAR" => loop {
                cur.skip_ws();
                if cur.peek() == Some(')') {
                    cur.bump();
                    break;
                }
                let name = cur.ident()?;
                if res.arities.contains_key(&name) {
                    return Err(cur.error(ParseErrorKind::AmbiguousIdentifier(name)));
                }
                res.vars.insert(name);
            },
            "STRATEGY" => {
                let s = cur.ident()?;
                if s != "INNERMOST" {
                    return Err(cur.syntax(format!("unsupported strategy {s}")));
                }
                cur.expect(')')?;
            }
            "COMMENT" => cur.skip_balanced()?,
            "SIGNATURE" => loop {
                cur.skip_ws();
                match cur.peek() {
                    Some(')') => {
                        cur.bump();
                        break;
                    }
                    Some('(') => {
                        cur.bump();
                        let name = cur.ident()?;
                        let arity_text = cur.ident()?;
                        let arity: usize = arity_text
                            .parse()
                            .map_err(|_| cur.syntax(format!("expected arity, got {arity_text}")))?;
                        cur.expect(')')?;
                        if res.is_var(&name) {
                            return Err(cur.error(ParseErrorKind::AmbiguousIdentifier(name)));
                        }
                        extra.push(res.symbol(&name, arity).map_err(|k| cur.error(k))?);
                    }
                    _ => return Err(cur.syntax("expected '(' or ')' in SIGNATURE")),
                }
            },
            "RULES" => loop {
                cur.skip_ws();
                if cur.peek() == Some(')') {
                    cur.bump();
                    break;
                }
                let (line, column) = (cur.line, cur.column);
                let lhs = parse_term(&mut cur, &mut res)?;
                cur.skip_ws();
                let relative = if cur.rest().starts_with("->=") {
                    cur.bump();
                    cur.bump();
                    cur.bump();
                    true
                } else if cur.rest().starts_with("->") {
                    cur.bump();
                    cur.bump();
                    false
                } else {
                    return Err(cur.syntax("expected '->' or '->='"));
                };
                let rhs = parse_term(&mut cur, &mut res)?;
                let rule = Rule::new(lhs, rhs).map_err(|e| ParseError {
                    kind: ParseErrorKind::InvalidRule(e),
                    line,
                    column,
                })?;
                if relative {
                    any_free = true;
                    free.push(rule);
                } else {
                    counted.push(rule);
                }
            },
            other => return Err(cur.syntax(format!("unknown section {other}"))),
        }
    }
    let wrap = |e: TrsError| ParseError {
        kind: ParseErrorKind::InvalidRule(e),
        line: 1,
        column: 1,
    };
    if any_free {
        Ok(System::Relative(
            RelativeTrs::with_signature(counted, free, extra).map_err(wrap)?,
        ))
    } else {
        Ok(System::Plain(
            Trs::with_signature(counted, extra).map_err(wrap)?,
        ))
    }
}

/// Parses a plain system; relative input is rejected.
pub fn parse_trs(text: &str) -> Result<Trs, ParseError> {
    match parse(text)? {
        System::Plain(trs) => Ok(trs),
        System::Relative(_) => Err(ParseError {
            kind: ParseErrorKind::Syntax("expected a plain system, found relative rules".into()),
            line: 1,
            column: 1,
        }),
    }
}

struct TermResolver<'a> {
    trs: &'a Trs,
}

impl Resolver for TermResolver<'_> {
    fn is_var(&self, name: &str) -> bool {
        let sharp_of_defined = name
            .strip_suffix('#')
            .and_then(|plain| self.trs.lookup(plain))
            .is_some_and(|f| self.trs.is_defined(f));
        self.trs.lookup(name).is_none() && !name.starts_with("Com_") && !sharp_of_defined
    }

    fn symbol(&mut self, name: &str, arity: usize) -> Result<Symbol, ParseErrorKind> {
        if let Some(f) = self.trs.lookup(name) {
            if f.arity() != arity {
                return Err(ParseErrorKind::ArityMismatch {
                    name: name.to_string(),
                    expected: f.arity(),
                    found: arity,
                });
            }
            return Ok(f.clone());
        }
        let f = symbol_for(name, arity);
        let known = match f.kind() {
            SymbolKind::Compound => true,
            SymbolKind::Sharp => self.trs.is_defined(&f.to_plain()),
            SymbolKind::Plain => false,
        };
        if known {
            Ok(f)
        } else {
            Err(ParseErrorKind::UnknownSymbol(name.to_string()))
        }
    }
}

impl Trs {
    /// Parses a term over this system's signature. Unknown identifiers
    /// without arguments are variables; `f#` is accepted for defined `f`.
    pub fn parse_term(&self, text: &str) -> Result<Term, ParseError> {
        let mut cur = Cursor::new(text);
        let t = parse_term(&mut cur, &mut TermResolver { trs: self })?;
        cur.skip_ws();
        if cur.peek().is_some() {
            return Err(cur.syntax("trailing input after term"));
        }
        Ok(t)
    }
}

/// Renders a system in the format accepted by [`parse`].
pub fn serialize(system: &System) -> String {
    match system {
        System::Plain(trs) => render(
            trs,
            &trs.rules().iter().map(|r| (r, false)).collect::<Vec<_>>(),
        ),
        System::Relative(rel) => {
            let rules: Vec<(&Rule, bool)> = rel
                .counted()
                .rules()
                .iter()
                .map(|r| (r, false))
                .chain(rel.free().rules().iter().map(|r| (r, true)))
                .collect();
            render(rel.union(), &rules)
        }
    }
}

pub fn serialize_trs(trs: &Trs) -> String {
    serialize(&System::Plain(trs.clone()))
}

fn render(signature: &Trs, rules: &[(&Rule, bool)]) -> String {
    let names: BTreeSet<String> = signature.signature().map(|f| f.to_string()).collect();
    // Variables that collide with a symbol name are renamed.
    let rules: Vec<(Rule, bool)> = rules
        .iter()
        .map(|(rule, free)| {
            let mut sigma = crate::term::Substitution::new();
            let mut taken: BTreeSet<String> = names.clone();
            taken.extend(rule.variables().iter().map(|x| x.to_string()));
            for x in rule.variables() {
                if names.contains(&*x) {
                    let fresh = (0..)
                        .map(|k| format!("{x}_{k}"))
                        .find(|n| !taken.contains(n))
                        .unwrap();
                    taken.insert(fresh.clone());
                    sigma.insert(&x, Term::var(&fresh));
                }
            }
            (
                Rule {
                    lhs: sigma.apply(&rule.lhs),
                    rhs: sigma.apply(&rule.rhs),
                },
                *free,
            )
        })
        .collect();

    let mut out = String::new();
    if rules.is_empty() && signature.signature().next().is_none() {
        out.push_str("(RULES )\n");
        return out;
    }
    let mut vars: Vec<String> = Vec::new();
    for (rule, _) in &rules {
        for x in rule.variables() {
            if !vars.iter().any(|v| **v == *x) {
                vars.push(x.to_string());
            }
        }
    }
    if !vars.is_empty() {
        let _ = writeln!(out, "(VAR {})", vars.join(" "));
    }
    let mut in_rules: BTreeMap<String, ()> = BTreeMap::new();
    for (rule, _) in &rules {
        for f in rule.lhs.symbols().into_iter().chain(rule.rhs.symbols()) {
            in_rules.insert(f.to_string(), ());
        }
    }
    let extra: Vec<String> = signature
        .signature()
        .filter(|f| !in_rules.contains_key(&f.to_string()))
        .map(|f| format!("({f} {})", f.arity()))
        .collect();
    if !extra.is_empty() {
        let _ = writeln!(out, "(SIGNATURE {})", extra.join(" "));
    }
    out.push_str("(STRATEGY INNERMOST)\n");
    if rules.is_empty() {
        out.push_str("(RULES )\n");
        return out;
    }
    out.push_str("(RULES\n");
    for (rule, free) in &rules {
        let arrow = if *free { "->=" } else { "->" };
        let _ = writeln!(out, "  {} {arrow} {}", rule.lhs, rule.rhs);
    }
    out.push_str(")\n");
    out
}
