use num::BigInt;

use crate::error::{Pos, Result, ScenarioError};

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(char),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

const SYMBOLS: &str = "+-*/^(),;=|:";

/// Tokenizes one source line. `#` starts a comment that runs to the end of the line.
pub fn tokenize(text: &str, line: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos::new(line, i + 1);
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '.') {
                return Err(ScenarioError::syntax(
                    Pos::new(line, i + 1),
                    format!("unexpected `{}` after number", chars[i]),
                ));
            }
            let digits: String = chars[start..i].iter().collect();
            let n = digits.parse::<BigInt>().expect("ascii digits");
            out.push(Token { tok: Tok::Int(n), pos });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                pos,
            });
        } else if SYMBOLS.contains(c) {
            out.push(Token { tok: Tok::Sym(c), pos });
            i += 1;
        } else {
            return Err(ScenarioError::syntax(pos, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

/// Cursor over a token list with the position just past the last token for end-of-input errors.
pub struct Cursor<'a> {
    toks: &'a [Token],
    i: usize,
    end: Pos,
}

impl<'a> Cursor<'a> {
    pub fn new(toks: &'a [Token], end: Pos) -> Self {
        Cursor { toks, i: 0, end }
    }

    pub fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.i)
    }

    pub fn peek_at(&self, k: usize) -> Option<&'a Token> {
        self.toks.get(self.i + k)
    }

    pub fn next(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.i);
        if t.is_some() {
            self.i += 1;
        }
        t
    }

    pub fn index(&self) -> usize {
        self.i
    }

    /// Source-like rendering of the tokens consumed since `start`.
    pub fn text_since(&self, start: usize) -> String {
        let mut out = String::new();
        for t in &self.toks[start..self.i] {
            match &t.tok {
                Tok::Ident(s) => {
                    if out.chars().last().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                        out.push(' ');
                    }
                    out.push_str(s);
                }
                Tok::Int(n) => {
                    if out.chars().last().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                        out.push(' ');
                    }
                    out.push_str(&n.to_string());
                }
                Tok::Sym(c) => out.push(*c),
            }
        }
        out
    }

    pub fn at_end(&self) -> bool {
        self.i >= self.toks.len()
    }

    pub fn pos(&self) -> Pos {
        self.peek().map(|t| t.pos).unwrap_or(self.end)
    }

    pub fn is_sym(&self, c: char) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Sym(s), .. }) if *s == c)
    }

    pub fn is_ident(&self, name: &str) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Ident(s), .. }) if s == name)
    }

    pub fn eat_sym(&mut self, c: char) -> bool {
        if self.is_sym(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    pub fn eat_ident(&mut self, name: &str) -> bool {
        if self.is_ident(name) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, c: char) -> Result<Pos> {
        let pos = self.pos();
        if self.eat_sym(c) {
            Ok(pos)
        } else {
            Err(self.unexpected(&format!("`{c}`")))
        }
    }

    pub fn expect_keyword(&mut self, name: &str) -> Result<Pos> {
        let pos = self.pos();
        if self.eat_ident(name) {
            Ok(pos)
        } else {
            Err(self.unexpected(&format!("`{name}`")))
        }
    }

    pub fn expect_ident(&mut self) -> Result<(String, Pos)> {
        match self.peek() {
            Some(Token { tok: Tok::Ident(s), pos }) => {
                self.i += 1;
                Ok((s.clone(), *pos))
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    pub fn expect_int(&mut self) -> Result<(BigInt, Pos)> {
        match self.peek() {
            Some(Token { tok: Tok::Int(n), pos }) => {
                self.i += 1;
                Ok((n.clone(), *pos))
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    pub fn unexpected(&self, wanted: &str) -> ScenarioError {
        match self.peek() {
            Some(t) => ScenarioError::syntax(t.pos, format!("expected {wanted}, found {}", describe(&t.tok))),
            None => ScenarioError::syntax(self.end, format!("expected {wanted}, found end of statement")),
        }
    }
}

pub fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(n) => format!("`{n}`"),
        Tok::Sym(c) => format!("`{c}`"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_are_tracked() {
        let toks = tokenize("map D = d/dt  # comment", 3).unwrap();
        assert_eq!(toks.len(), 6);
        assert_eq!(toks[0].pos, Pos::new(3, 1));
        assert_eq!(toks[4].tok, Tok::Sym('/'));
        assert_eq!(toks[5].pos, Pos::new(3, 11));
    }

    #[test]
    fn bad_characters_are_reported() {
        let e = tokenize("x = 1.5", 2).unwrap_err();
        assert_eq!(e.pos(), Pos::new(2, 6));
        let e = tokenize("x @ y", 1).unwrap_err();
        assert_eq!(e.pos(), Pos::new(1, 3));
    }
}
