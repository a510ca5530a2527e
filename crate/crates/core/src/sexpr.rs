//! Minimal s-expression reader for substitution lists and proof scripts.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexpr {
    Atom(String, usize),
    Str(String, usize),
    List(Vec<Sexpr>, usize),
}

impl Sexpr {
    pub fn offset(&self) -> usize {
        match self {
            Sexpr::Atom(_, o) | Sexpr::Str(_, o) | Sexpr::List(_, o) => *o,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexpr::Atom(a, _) => Some(a),
            _ => None,
        }
    }

    /// An atom or a string literal.
    pub fn as_text(&self) -> Option<&str> {
        match self {
            Sexpr::Atom(a, _) | Sexpr::Str(a, _) => Some(a),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexpr]> {
        match self {
            Sexpr::List(xs, _) => Some(xs),
            _ => None,
        }
    }
}

impl fmt::Display for Sexpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexpr::Atom(a, _) => f.write_str(a),
            Sexpr::Str(s, _) => write!(f, "{}", quote(s)),
            Sexpr::List(xs, _) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SexprError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for SexprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "offset {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for SexprError {}

/// Reads every top-level form. `;` starts a comment outside string literals.
pub fn read_all(src: &str) -> Result<Vec<Sexpr>, SexprError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    let mut stack: Vec<(Vec<Sexpr>, usize)> = Vec::new();
    let mut top = Vec::new();
    let push = |e: Sexpr, stack: &mut Vec<(Vec<Sexpr>, usize)>, top: &mut Vec<Sexpr>| match stack.last_mut() {
        Some((xs, _)) => xs.push(e),
        None => top.push(e),
    };
    while i < chars.len() {
        let (off, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            ';' => {
                while i < chars.len() && chars[i].1 != '\n' {
                    i += 1;
                }
            }
            '(' => {
                stack.push((Vec::new(), off));
                i += 1;
            }
            ')' => {
                let (xs, start) = stack.pop().ok_or(SexprError { offset: off, message: "unbalanced ')'".into() })?;
                push(Sexpr::List(xs, start), &mut stack, &mut top);
                i += 1;
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                loop {
                    let Some(&(_, c)) = chars.get(i) else {
                        return Err(SexprError { offset: off, message: "unterminated string".into() });
                    };
                    i += 1;
                    match c {
                        '"' => break,
                        '\\' => {
                            let Some(&(_, e)) = chars.get(i) else {
                                return Err(SexprError { offset: off, message: "unterminated string".into() });
                            };
                            i += 1;
                            match e {
                                'n' => s.push('\n'),
                                't' => s.push('\t'),
                                e => s.push(e),
                            }
                        }
                        c => s.push(c),
                    }
                }
                push(Sexpr::Str(s, off), &mut stack, &mut top);
            }
            _ => {
                let mut a = String::new();
                while i < chars.len() {
                    let c = chars[i].1;
                    if c.is_whitespace() || c == '(' || c == ')' || c == '"' || c == ';' {
                        break;
                    }
                    a.push(c);
                    i += 1;
                }
                push(Sexpr::Atom(a, off), &mut stack, &mut top);
            }
        }
    }
    if let Some((_, start)) = stack.last() {
        return Err(SexprError { offset: *start, message: "unbalanced '('".into() });
    }
    Ok(top)
}
