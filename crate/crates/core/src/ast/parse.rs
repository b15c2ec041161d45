use std::fmt;

use super::{validate, CalExpr, CalendarDoc, Expr, ValidationReport};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error("invalid calendar:\n{0}")]
    Invalid(ValidationReport),
}

/// Parses and validates a calendar file.
pub fn parse_calendar(text: &str) -> Result<CalendarDoc, ParseError> {
    let doc = parse_unchecked(text)?;
    let report = validate(&doc);
    if report.is_empty() {
        Ok(doc)
    } else {
        Err(ParseError::Invalid(report))
    }
}

/// Parses a calendar file without the static checks.
pub fn parse_unchecked(text: &str) -> Result<CalendarDoc, SyntaxError> {
    let tokens = lex(text)?;
    Parser { tokens, pos: 0 }.document()
}

const OPERATORS: &[&str] = &[
    "group",
    "alter",
    "shift",
    "combine",
    "anchor",
    "subset",
    "selectdown",
    "selectup",
    "selectintersect",
    "union",
    "intersect",
    "difference",
];

const RESERVED: &[&str] = &["calendar", "bottom", "inf"];

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    NegInf,
    LParen,
    RParen,
    Comma,
    Semi,
    Equals,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(v) => write!(f, "`{v}`"),
            Tok::NegInf => f.write_str("`-inf`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Equals => f.write_str("`=`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    col: usize,
}

impl Pos {
    fn error(self, message: impl Into<String>) -> SyntaxError {
        SyntaxError {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, SyntaxError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                bump(&mut chars);
            }
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semi),
            '=' => Some(Tok::Equals),
            _ => None,
        };
        if let Some(tok) = single {
            bump(&mut chars);
            out.push((tok, pos));
        } else if c == '-' || c.is_ascii_digit() {
            let mut text = String::new();
            text.push(bump(&mut chars));
            while chars.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
                text.push(bump(&mut chars));
            }
            if text == "-inf" {
                out.push((Tok::NegInf, pos));
                continue;
            }
            let value = text
                .parse::<i64>()
                .map_err(|_| pos.error(format!("invalid integer literal `{text}`")))?;
            out.push((Tok::Int(value), pos));
        } else if is_ident_start(c) {
            let mut text = String::new();
            while chars.peek().is_some_and(|&c| is_ident_char(c)) {
                text.push(bump(&mut chars));
            }
            out.push((Tok::Ident(text), pos));
        } else {
            return Err(pos.error(format!("unexpected character `{c}`")));
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

enum Arg {
    Int(i64),
    Inf(bool),
    Expr(Expr),
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Int,
    Bound,
    Expr,
}

fn signature(op: &str) -> &'static [Kind] {
    use Kind::*;
    match op {
        "group" | "shift" => &[Int, Expr],
        "alter" => &[Int, Int, Int, Expr, Expr],
        "subset" => &[Bound, Bound, Expr],
        "selectdown" | "selectintersect" => &[Int, Int, Expr, Expr],
        _ => &[Expr, Expr],
    }
}

struct Parser {
    tokens: Vec<(Tok, Pos)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn here(&self) -> Pos {
        self.tokens[self.pos].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let tok = self.tokens[self.pos].clone();
        if tok.0 != Tok::Eof {
            self.pos += 1;
        }
        tok
    }

    fn expect(&mut self, want: Tok) -> Result<(), SyntaxError> {
        let (tok, pos) = self.next();
        if tok == want {
            Ok(())
        } else {
            Err(pos.error(format!("expected {want}, found {tok}")))
        }
    }

    fn keyword(&mut self, word: &str) -> Result<(), SyntaxError> {
        match self.next() {
            (Tok::Ident(s), _) if s == word => Ok(()),
            (tok, pos) => Err(pos.error(format!("expected `{word}`, found {tok}"))),
        }
    }

    fn name(&mut self) -> Result<(String, Pos), SyntaxError> {
        match self.next() {
            (Tok::Ident(s), pos) => {
                if RESERVED.contains(&s.as_str()) || OPERATORS.contains(&s.as_str()) {
                    Err(pos.error(format!("`{s}` is reserved and cannot name a granularity")))
                } else {
                    Ok((s, pos))
                }
            }
            (tok, pos) => Err(pos.error(format!("expected a name, found {tok}"))),
        }
    }

    fn document(mut self) -> Result<CalendarDoc, SyntaxError> {
        self.keyword("calendar")?;
        let (name, _) = self.name()?;
        self.keyword("bottom")?;
        let (bottom, _) = self.name()?;
        self.expect(Tok::Semi)?;
        let mut doc = CalendarDoc::new(name, bottom);
        while *self.peek() != Tok::Eof {
            let (name, _) = self.name()?;
            self.expect(Tok::Equals)?;
            let expr = self.expr(&doc.bottom)?;
            self.expect(Tok::Semi)?;
            doc.definitions.push((name, expr));
        }
        Ok(doc)
    }

    fn expr(&mut self, bottom: &str) -> Result<Expr, SyntaxError> {
        let (tok, pos) = self.next();
        let ident = match tok {
            Tok::Ident(s) => s,
            Tok::Int(_) | Tok::NegInf => {
                return Err(pos.error(format!("expected a granularity, found {tok}")))
            }
            tok => return Err(pos.error(format!("expected a granularity, found {tok}"))),
        };
        if ident == "inf" {
            return Err(pos.error("`inf` is only allowed as a subset bound"));
        }
        if !OPERATORS.contains(&ident.as_str()) {
            if *self.peek() == Tok::LParen {
                return Err(pos.error(format!("unknown operator `{ident}`")));
            }
            return Ok(if ident == bottom {
                CalExpr::bottom()
            } else {
                CalExpr::name(&ident)
            });
        }
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                let at = self.here();
                let arg = match self.peek().clone() {
                    Tok::Int(v) => {
                        self.next();
                        Arg::Int(v)
                    }
                    Tok::NegInf => {
                        self.next();
                        Arg::Inf(false)
                    }
                    Tok::Ident(s) if s == "inf" => {
                        self.next();
                        Arg::Inf(true)
                    }
                    _ => Arg::Expr(self.expr(bottom)?),
                };
                args.push((arg, at));
                if *self.peek() == Tok::Comma {
                    self.next();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        build(&ident, args, pos)
    }
}

fn build(op: &str, args: Vec<(Arg, Pos)>, pos: Pos) -> Result<Expr, SyntaxError> {
    let sig = signature(op);
    if args.len() != sig.len() {
        return Err(pos.error(format!(
            "`{op}` takes {} arguments, found {}",
            sig.len(),
            args.len()
        )));
    }
    let mut ints = Vec::new();
    let mut bounds = Vec::new();
    let mut exprs = Vec::new();
    for ((arg, at), kind) in args.into_iter().zip(sig) {
        match (arg, kind) {
            (Arg::Int(v), Kind::Int) => ints.push(v),
            (Arg::Int(v), Kind::Bound) => bounds.push(Some(v)),
            (Arg::Inf(positive), Kind::Bound) => {
                let lower = bounds.is_empty();
                if positive == lower {
                    let which = if lower { "lower" } else { "upper" };
                    let sign = if positive { "inf" } else { "-inf" };
                    return Err(at.error(format!("`{sign}` cannot be the {which} bound of `subset`")));
                }
                bounds.push(None);
            }
            (Arg::Inf(_), _) => {
                return Err(at.error(format!("infinite value not allowed in `{op}`")))
            }
            (Arg::Expr(e), Kind::Expr) => exprs.push(e),
            (Arg::Expr(_), _) => {
                return Err(at.error(format!("`{op}` expects an integer here")))
            }
            (Arg::Int(_), Kind::Expr) => {
                return Err(at.error(format!("`{op}` expects a granularity here")))
            }
        }
    }
    let mut exprs = exprs.into_iter();
    let mut e = || exprs.next().expect("arity checked");
    let node = match op {
        "group" => CalExpr::Group { m: ints[0], operand: e() },
        "shift" => CalExpr::Shift { m: ints[0], operand: e() },
        "alter" => CalExpr::Alter {
            l: ints[0],
            k: ints[1],
            m: ints[2],
            fine: e(),
            base: e(),
        },
        "subset" => CalExpr::Subset {
            from: bounds[0],
            to: bounds[1],
            operand: e(),
        },
        "selectdown" => CalExpr::SelectDown {
            k: ints[0],
            l: ints[1],
            first: e(),
            second: e(),
        },
        "selectintersect" => CalExpr::SelectIntersect {
            k: ints[0],
            l: ints[1],
            first: e(),
            second: e(),
        },
        "combine" => CalExpr::Combine(e(), e()),
        "anchor" => CalExpr::Anchor(e(), e()),
        "selectup" => CalExpr::SelectUp(e(), e()),
        "union" => CalExpr::Union(e(), e()),
        "intersect" => CalExpr::Intersection(e(), e()),
        "difference" => CalExpr::Difference(e(), e()),
        _ => unreachable!("operator list and signatures agree"),
    };
    Ok(std::sync::Arc::new(node))
}
