//! S-expression reader with source positions.

use std::fmt;

use super::error::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Positions are ignored by equality so that printed-and-reparsed scripts
/// compare equal.
#[derive(Debug, Clone)]
pub enum SExpr {
    Symbol(String, Pos),
    Numeral(u64, Pos),
    List(Vec<SExpr>, Pos),
}

impl PartialEq for SExpr {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (SExpr::Symbol(a, _), SExpr::Symbol(b, _)) => a == b,
            (SExpr::Numeral(a, _), SExpr::Numeral(b, _)) => a == b,
            (SExpr::List(a, _), SExpr::List(b, _)) => a == b,
            _ => false,
        }
    }
}

impl Eq for SExpr {}

impl SExpr {
    pub fn sym(s: impl Into<String>) -> SExpr {
        SExpr::Symbol(s.into(), Pos::default())
    }

    pub fn list(items: Vec<SExpr>) -> SExpr {
        SExpr::List(items, Pos::default())
    }

    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Symbol(_, p) | SExpr::Numeral(_, p) | SExpr::List(_, p) => *p,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            SExpr::Symbol(s, _) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            _ => None,
        }
    }

    /// The head symbol of a non-empty list.
    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_symbol()
    }

    /// A short rendering for error messages.
    pub fn token(&self) -> String {
        let s = self.to_string();
        if s.chars().count() > 40 {
            let cut: String = s.chars().take(37).collect();
            format!("{cut}...")
        } else {
            s
        }
    }
}

fn is_simple_symbol(s: &str) -> bool {
    !s.is_empty()
        && !s.chars().next().unwrap().is_ascii_digit()
        && s.chars().all(|c| c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/:".contains(c))
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Symbol(s, _) if is_simple_symbol(s) => write!(f, "{s}"),
            SExpr::Symbol(s, _) => write!(f, "|{s}|"),
            SExpr::Numeral(n, _) => write!(f, "{n}"),
            SExpr::List(items, _) => {
                write!(f, "(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{it}")?;
                }
                write!(f, ")")
            }
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

#[derive(Debug)]
enum Token {
    Open,
    Close,
    Symbol(String),
    Numeral(u64),
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn next_token(&mut self) -> Result<Option<(Token, Pos)>, ParseError> {
        loop {
            match self.chars.peek() {
                None => return Ok(None),
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some(';') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                Some(_) => break,
            }
        }
        let pos = self.pos();
        let c = self.bump().unwrap();
        let tok = match c {
            '(' => Token::Open,
            ')' => Token::Close,
            '|' => {
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => {
                            return Err(ParseError::new(
                                pos,
                                format!("|{s}"),
                                ParseErrorKind::Lexical("unterminated quoted symbol".into()),
                            ))
                        }
                        Some('|') => break,
                        Some(c) => s.push(c),
                    }
                }
                Token::Symbol(s)
            }
            '"' => {
                return Err(ParseError::new(
                    pos,
                    "\"".into(),
                    ParseErrorKind::Lexical("string literals are not supported".into()),
                ))
            }
            _ => {
                let mut s = String::from(c);
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' || c == '|' {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                if s.chars().all(|c| c.is_ascii_digit()) {
                    match s.parse() {
                        Ok(n) => Token::Numeral(n),
                        Err(_) => {
                            return Err(ParseError::new(
                                pos,
                                s,
                                ParseErrorKind::Lexical("numeral out of range".into()),
                            ))
                        }
                    }
                } else if is_simple_symbol(&s) {
                    Token::Symbol(s)
                } else {
                    return Err(ParseError::new(
                        pos,
                        s,
                        ParseErrorKind::Lexical("invalid symbol".into()),
                    ));
                }
            }
        };
        Ok(Some((tok, pos)))
    }
}

/// Reads every top-level s-expression in `text`.
pub fn parse_sexprs(text: &str) -> Result<Vec<SExpr>, ParseError> {
    let mut lexer = Lexer::new(text);
    let mut stack: Vec<(Vec<SExpr>, Pos)> = Vec::new();
    let mut top = Vec::new();
    while let Some((tok, pos)) = lexer.next_token()? {
        let item = match tok {
            Token::Open => {
                stack.push((Vec::new(), pos));
                continue;
            }
            Token::Close => match stack.pop() {
                Some((items, start)) => SExpr::List(items, start),
                None => {
                    return Err(ParseError::new(
                        pos,
                        ")".into(),
                        ParseErrorKind::Lexical("unbalanced `)`".into()),
                    ))
                }
            },
            Token::Symbol(s) => SExpr::Symbol(s, pos),
            Token::Numeral(n) => SExpr::Numeral(n, pos),
        };
        match stack.last_mut() {
            Some((items, _)) => items.push(item),
            None => top.push(item),
        }
    }
    if let Some((_, start)) = stack.pop() {
        return Err(ParseError::new(
            start,
            "(".into(),
            ParseErrorKind::Lexical("unclosed `(`".into()),
        ));
    }
    Ok(top)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_with_positions() {
        let es = parse_sexprs("; comment\n(a (b 12)\n  |x y|)").unwrap();
        assert_eq!(es.len(), 1);
        assert_eq!(es[0].pos(), Pos { line: 2, col: 1 });
        let items = es[0].as_list().unwrap();
        assert_eq!(items[0].as_symbol(), Some("a"));
        assert_eq!(items[1], SExpr::list(vec![SExpr::sym("b"), SExpr::Numeral(12, Pos::default())]));
        assert_eq!(items[2].as_symbol(), Some("x y"));
        assert_eq!(items[2].pos(), Pos { line: 3, col: 3 });
        assert_eq!(es[0].to_string(), "(a (b 12) |x y|)");
    }

    #[test]
    fn unbalanced_input_reports_location() {
        let err = parse_sexprs("(a\n (b)").unwrap_err();
        assert_eq!(err.pos, Pos { line: 1, col: 1 });
        let err = parse_sexprs("(a))").unwrap_err();
        assert_eq!(err.pos, Pos { line: 1, col: 4 });
        assert_eq!(err.token, ")");
    }
}
