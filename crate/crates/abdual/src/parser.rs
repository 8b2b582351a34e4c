//! Text format for abductive frameworks and queries.
//!
//! One clause per line, terminated by `.`:
//!
//! ```text
//! % comment
//! p :- not q*.          % rule; `not ` is default negation, `-` explicit
//! -b.                   % fact for an explicitly negated atom
//! abducible p*.         % declares p* and -p* abducible
//! :- q, -q*.            % integrity rule (head bottom)
//! ```
//!
//! Both `not q` and `not(q)` are accepted. Atoms are opaque ground names;
//! an uppercase or `_`-initial token is treated as a variable and rejected,
//! and the reserved names (`t`, `u`, `f`, `bottom`, `query`, `fold_a_*`,
//! `fold_b_*`) are rejected everywhere in user input.

use std::collections::BTreeSet;

use crate::error::{ParseError, ParseErrorKind, SourcePos};
use crate::framework::AbductiveFramework;
use crate::literal::{Literal, ObjectiveLiteral};
use crate::program::{Program, Rule};
use crate::symbol::Symbol;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Ident(String),
    If,    // :-
    Dot,
    Comma,
    Minus,
    LParen,
    RParen,
}

#[derive(Clone, Debug)]
struct Spanned {
    token: Token,
    pos: SourcePos,
}

struct Lexer<'a> {
    src: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    line_start: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, chars: src.char_indices().peekable(), line: 1, line_start: 0 }
    }

    fn pos_at(&self, byte: usize) -> SourcePos {
        SourcePos { line: self.line, column: byte - self.line_start + 1 }
    }

    fn tokenize(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        while let Some(&(i, c)) = self.chars.peek() {
            match c {
                '\n' => {
                    self.chars.next();
                    self.line += 1;
                    self.line_start = i + 1;
                }
                c if c.is_whitespace() => {
                    self.chars.next();
                }
                '%' => {
                    while let Some(&(_, c)) = self.chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.chars.next();
                    }
                }
                ':' => {
                    let pos = self.pos_at(i);
                    self.chars.next();
                    match self.chars.peek() {
                        Some(&(_, '-')) => {
                            self.chars.next();
                            out.push(Spanned { token: Token::If, pos });
                        }
                        _ => {
                            return Err(ParseError {
                                pos,
                                kind: ParseErrorKind::Syntax("expected `:-`".to_owned()),
                            })
                        }
                    }
                }
                '.' => {
                    out.push(Spanned { token: Token::Dot, pos: self.pos_at(i) });
                    self.chars.next();
                }
                ',' => {
                    out.push(Spanned { token: Token::Comma, pos: self.pos_at(i) });
                    self.chars.next();
                }
                '-' => {
                    out.push(Spanned { token: Token::Minus, pos: self.pos_at(i) });
                    self.chars.next();
                }
                '(' => {
                    out.push(Spanned { token: Token::LParen, pos: self.pos_at(i) });
                    self.chars.next();
                }
                ')' => {
                    out.push(Spanned { token: Token::RParen, pos: self.pos_at(i) });
                    self.chars.next();
                }
                c if c.is_alphabetic() || c == '_' => {
                    let pos = self.pos_at(i);
                    let start = i;
                    let mut end = i + c.len_utf8();
                    self.chars.next();
                    while let Some(&(j, c)) = self.chars.peek() {
                        if c.is_alphanumeric() || c == '_' || c == '*' || c == '\'' {
                            end = j + c.len_utf8();
                            self.chars.next();
                        } else {
                            break;
                        }
                    }
                    let word = &self.src[start..end];
                    if c.is_uppercase() || c == '_' {
                        return Err(ParseError {
                            pos,
                            kind: ParseErrorKind::NonGround(word.to_owned()),
                        });
                    }
                    out.push(Spanned { token: Token::Ident(word.to_owned()), pos });
                }
                other => {
                    return Err(ParseError {
                        pos: self.pos_at(i),
                        kind: ParseErrorKind::Syntax(format!("unexpected character `{other}`")),
                    })
                }
            }
        }
        Ok(out)
    }
}

struct Parser {
    tokens: Vec<Spanned>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.tokens.get(self.at)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.tokens.get(self.at).cloned();
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn last_pos(&self) -> SourcePos {
        self.tokens
            .last()
            .map(|s| s.pos)
            .unwrap_or(SourcePos { line: 1, column: 1 })
    }

    fn error(&self, msg: &str) -> ParseError {
        let pos = self.peek().map(|s| s.pos).unwrap_or_else(|| self.last_pos());
        ParseError { pos, kind: ParseErrorKind::Syntax(msg.to_owned()) }
    }

    fn expect(&mut self, want: &Token, what: &str) -> Result<SourcePos, ParseError> {
        match self.next() {
            Some(s) if s.token == *want => Ok(s.pos),
            _ => {
                self.at = self.at.saturating_sub(1);
                Err(self.error(&format!("expected {what}")))
            }
        }
    }

    fn user_atom(&mut self, allow_bottom_head: bool) -> Result<(Symbol, SourcePos), ParseError> {
        match self.next() {
            Some(Spanned { token: Token::Ident(name), pos }) => {
                let sym = Symbol::new(&name);
                if sym.is_reserved() && !(allow_bottom_head && sym.is_bottom()) {
                    return Err(ParseError { pos, kind: ParseErrorKind::ReservedSymbol(name) });
                }
                if let Some(Spanned { token: Token::LParen, pos }) = self.peek() {
                    return Err(ParseError {
                        pos: *pos,
                        kind: ParseErrorKind::Syntax(
                            "compound terms are not supported; atoms are opaque names"
                                .to_owned(),
                        ),
                    });
                }
                Ok((sym, pos))
            }
            Some(s) => Err(ParseError {
                pos: s.pos,
                kind: ParseErrorKind::Syntax("expected an atom".to_owned()),
            }),
            None => Err(self.error("expected an atom")),
        }
    }

    fn objective_literal(&mut self) -> Result<(ObjectiveLiteral, SourcePos), ParseError> {
        if matches!(self.peek(), Some(Spanned { token: Token::Minus, .. })) {
            let minus = self.next().unwrap();
            let (sym, _) = self.user_atom(false)?;
            if !sym.admits_explicit_negation() {
                return Err(ParseError {
                    pos: minus.pos,
                    kind: ParseErrorKind::ReservedSymbol(sym.name().to_owned()),
                });
            }
            Ok((ObjectiveLiteral::negated_atom(sym), minus.pos))
        } else {
            let (sym, pos) = self.user_atom(false)?;
            Ok((ObjectiveLiteral::atom(sym), pos))
        }
    }

    fn literal(&mut self) -> Result<(Literal, SourcePos), ParseError> {
        if let Some(Spanned { token: Token::Ident(name), .. }) = self.peek() {
            if name == "not" {
                let not = self.next().unwrap();
                // optional parentheses: not(q) or not -q
                if matches!(self.peek(), Some(Spanned { token: Token::LParen, .. })) {
                    self.next();
                    let (o, _) = self.objective_literal()?;
                    self.expect(&Token::RParen, "`)`")?;
                    return Ok((Literal::negative(o), not.pos));
                }
                let (o, _) = self.objective_literal()?;
                return Ok((Literal::negative(o), not.pos));
            }
        }
        let (o, pos) = self.objective_literal()?;
        Ok((Literal::positive(o), pos))
    }

    fn body(&mut self) -> Result<Vec<Literal>, ParseError> {
        let mut body = vec![self.literal()?.0];
        while matches!(self.peek(), Some(Spanned { token: Token::Comma, .. })) {
            self.next();
            body.push(self.literal()?.0);
        }
        Ok(body)
    }
}

/// Parse a full framework document.
pub fn parse_framework(text: &str) -> Result<AbductiveFramework, ParseError> {
    let tokens = Lexer::new(text).tokenize()?;
    let mut p = Parser { tokens, at: 0 };
    let mut program = Program::new();
    let mut integrity = Program::new();
    let mut abducibles: BTreeSet<ObjectiveLiteral> = BTreeSet::new();
    let mut head_positions = Vec::new();

    while p.peek().is_some() {
        match p.peek().unwrap() {
            Spanned { token: Token::If, .. } => {
                // headless integrity rule
                p.next();
                let body = p.body()?;
                p.expect(&Token::Dot, "`.`")?;
                integrity.push(Rule::new(Literal::positive(ObjectiveLiteral::bottom()), body));
            }
            Spanned { token: Token::Ident(name), pos } if name == "abducible" => {
                let decl_pos = *pos;
                p.next();
                let (o, _) = p.objective_literal()?;
                p.expect(&Token::Dot, "`.`")?;
                let conj = o.conj_e().map_err(|_| ParseError {
                    pos: decl_pos,
                    kind: ParseErrorKind::ReservedSymbol(o.symbol().name().to_owned()),
                })?;
                abducibles.insert(o);
                abducibles.insert(conj);
            }
            _ => {
                let (head, head_pos) = p.objective_literal()?;
                let body = if matches!(p.peek(), Some(Spanned { token: Token::If, .. })) {
                    p.next();
                    p.body()?
                } else {
                    Vec::new()
                };
                p.expect(&Token::Dot, "`.`")?;
                head_positions.push((head, head_pos));
                program.push(Rule::new(Literal::positive(head), body));
            }
        }
    }

    for (head, pos) in &head_positions {
        if abducibles.contains(head) {
            return Err(ParseError {
                pos: *pos,
                kind: ParseErrorKind::AbducibleHead(head.to_string()),
            });
        }
    }

    AbductiveFramework::new(program, abducibles, integrity).map_err(|e| ParseError {
        pos: SourcePos { line: 1, column: 1 },
        kind: ParseErrorKind::Syntax(e.to_string()),
    })
}

/// Parse a single ground literal, e.g. `q`, `not q`, `-q`, `not -q`.
pub fn parse_query(text: &str) -> Result<Literal, ParseError> {
    let tokens = Lexer::new(text).tokenize()?;
    let mut p = Parser { tokens, at: 0 };
    let (lit, _) = p.literal()?;
    // optional trailing dot
    if matches!(p.peek(), Some(Spanned { token: Token::Dot, .. })) {
        p.next();
    }
    if let Some(extra) = p.peek() {
        return Err(ParseError {
            pos: extra.pos,
            kind: ParseErrorKind::QueryShape("trailing input after the literal".to_owned()),
        });
    }
    Ok(lit)
}

/// Canonical text for a program, one rule per line. Rules headed by
/// `bottom` serialize in the headless `:- body.` form so they re-parse.
pub fn serialize(program: &Program) -> String {
    let mut out = String::new();
    for rule in program.iter() {
        out.push_str(&serialize_rule(rule));
        out.push('\n');
    }
    out
}

pub fn serialize_rule(rule: &Rule) -> String {
    let body: Vec<String> = rule.body.iter().map(|l| l.to_string()).collect();
    if rule.head.is_positive() && rule.head.objective().is_bottom() {
        format!(":- {}.", body.join(", "))
    } else if body.is_empty() {
        format!("{}.", rule.head)
    } else {
        format!("{} :- {}.", rule.head, body.join(", "))
    }
}

/// Canonical text for a whole framework: rules, one `abducible` line per
/// conjugate pair, then integrity rules.
pub fn serialize_framework(fw: &AbductiveFramework) -> String {
    let mut out = serialize(&fw.program);
    let mut seen = BTreeSet::new();
    for a in &fw.abducibles {
        let pair_key = a.symbol();
        if seen.insert(pair_key) {
            out.push_str(&format!("abducible {}.\n", ObjectiveLiteral::atom(pair_key)));
        }
    }
    out.push_str(&serialize(&fw.integrity_rules));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_plain_normal_program() {
        let fw = parse_framework("p :- not q.\np :- not r.\nq :- not p.\n").unwrap();
        assert_eq!(fw.program.len(), 3);
        assert!(fw.abducibles.is_empty());
        assert!(fw.integrity_rules.is_empty());
        let first = &fw.program.rules()[0];
        assert_eq!(first.to_string(), "p :- not q.");
    }

    #[test]
    fn empty_input_gives_empty_framework() {
        let fw = parse_framework("").unwrap();
        assert!(fw.program.is_empty());
        assert!(fw.abducibles.is_empty());
        assert!(fw.integrity_rules.is_empty());
    }

    #[test]
    fn parses_abducibles_and_integrity_rules() {
        let text = "p :- not q*.\nq :- not p*.\nabducible p*.\nabducible q*.\n\
                    :- p, -p*.\n:- q, -q*.\n";
        let fw = parse_framework(text).unwrap();
        assert_eq!(fw.program.len(), 2);
        let names: Vec<String> = fw.abducibles.iter().map(|a| a.to_string()).collect();
        assert_eq!(names, ["p*", "-p*", "q*", "-q*"]);
        assert_eq!(fw.integrity_rules.len(), 2);
        assert_eq!(fw.integrity_rules.rules()[0].head, Literal::from_name("bottom"));
    }

    #[test]
    fn rejects_variables_with_position() {
        let err = parse_framework("p :- not Q.\n").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::NonGround(_)));
        assert_eq!(err.pos.line, 1);
        assert_eq!(err.pos.column, 10);
    }

    #[test]
    fn rejects_reserved_symbols() {
        for bad in ["bottom :- p.", "p :- query.", "t.", "p :- not u.", "fold_a_1_m."] {
            let err = parse_framework(bad).unwrap_err();
            assert!(
                matches!(err.kind, ParseErrorKind::ReservedSymbol(_)),
                "expected reserved-symbol error for `{bad}`, got {err}"
            );
        }
    }

    #[test]
    fn rejects_abducible_rule_heads() {
        let err = parse_framework("a :- b.\nabducible a.\n").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::AbducibleHead(_)));
    }

    #[test]
    fn parses_queries() {
        assert_eq!(parse_query("q").unwrap(), Literal::from_name("q"));
        assert_eq!(parse_query("not -p").unwrap(), Literal::from_name("not -p"));
        assert_eq!(parse_query("not(p)").unwrap(), Literal::from_name("not p"));
        assert_eq!(parse_query("s").unwrap(), Literal::from_name("s"));
        let err = parse_query("p, q").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::QueryShape(_)));
    }

    #[test]
    fn serialization_round_trips() {
        let text = "p :- not q*.\nq :- not p*.\nabducible p*.\n:- p, -p*.\n";
        let fw = parse_framework(text).unwrap();
        let reparsed = parse_framework(&serialize_framework(&fw)).unwrap();
        assert_eq!(fw.program, reparsed.program);
        assert_eq!(fw.abducibles, reparsed.abducibles);
        assert_eq!(fw.integrity_rules, reparsed.integrity_rules);
    }

    #[test]
    fn serialize_empty_program_is_empty() {
        assert_eq!(serialize(&Program::new()), "");
    }

    #[test]
    fn comments_and_not_parens_are_accepted() {
        let fw = parse_framework("% a comment\nc :- not(b).\n-b. % explicit negation fact\n")
            .unwrap();
        assert_eq!(fw.program.len(), 2);
        assert_eq!(fw.program.rules()[1].head, Literal::from_name("-b"));
    }
}
