//! Text syntax for polynomials.
//!
//! Two forms are accepted: sums of monomials such as `y^3 + 2y + 1`, and the
//! labeled form `{i1: [d1, d2], i2: []}`. Labels that are not plain words
//! are written in double quotes.

use crate::error::{Error, Result};
use crate::poly::Poly;

pub fn parse_poly(text: &str) -> Result<Poly> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        parse_labeled(trimmed)
    } else {
        parse_sum(trimmed)
    }
}

fn is_bare(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '.' | '\'' | '-' | '#' | '*')
}

/// Quotes a label unless it is a plain word.
pub fn quote_label(label: &str) -> String {
    if !label.is_empty() && label.chars().all(is_bare) {
        label.to_string()
    } else {
        let mut s = String::from("\"");
        for c in label.chars() {
            if c == '"' || c == '\\' {
                s.push('\\');
            }
            s.push(c);
        }
        s.push('"');
        s
    }
}

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { chars: src.chars().collect(), pos: 0, src }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(format!("column {}", self.pos + 1), format!("{} in `{}`", msg.into(), self.src))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn number(&mut self) -> Result<Option<usize>> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Ok(None);
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map(Some).map_err(|_| self.err("number too large"))
    }

    fn label(&mut self) -> Result<String> {
        match self.peek() {
            Some('"') => {
                self.pos += 1;
                let mut s = String::new();
                loop {
                    match self.chars.get(self.pos) {
                        None => return Err(self.err("unterminated quoted label")),
                        Some('"') => {
                            self.pos += 1;
                            return Ok(s);
                        }
                        Some('\\') => {
                            let c = self.chars.get(self.pos + 1).copied().ok_or_else(|| self.err("dangling escape"))?;
                            s.push(c);
                            self.pos += 2;
                        }
                        Some(&c) => {
                            s.push(c);
                            self.pos += 1;
                        }
                    }
                }
            }
            Some(c) if is_bare(c) => {
                let start = self.pos;
                while self.pos < self.chars.len() && is_bare(self.chars[self.pos]) {
                    self.pos += 1;
                }
                Ok(self.chars[start..self.pos].iter().collect())
            }
            _ => Err(self.err("expected a label")),
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }
}

fn parse_sum(text: &str) -> Result<Poly> {
    let mut cur = Cursor::new(text);
    if cur.at_end() {
        return Err(cur.err("empty polynomial"));
    }
    let mut exps = Vec::new();
    loop {
        let coeff = cur.number()?;
        if cur.peek() == Some('*') {
            if coeff.is_none() {
                return Err(cur.err("`*` must follow a coefficient"));
            }
            cur.pos += 1;
        }
        let exp = if cur.peek() == Some('y') {
            cur.pos += 1;
            if cur.peek() == Some('^') {
                cur.pos += 1;
                cur.number()?.ok_or_else(|| cur.err("expected an exponent"))?
            } else {
                1
            }
        } else if coeff.is_some() {
            0
        } else {
            return Err(cur.err("expected a term"));
        };
        let c = coeff.unwrap_or(1);
        exps.extend(std::iter::repeat_n(exp, c));
        match cur.peek() {
            None => break,
            Some('+') => cur.pos += 1,
            Some(_) => return Err(cur.err("expected `+`")),
        }
    }
    Ok(Poly::from_exponents(&exps))
}

fn parse_labeled(text: &str) -> Result<Poly> {
    let mut cur = Cursor::new(text);
    cur.expect('{')?;
    let mut pairs: Vec<(String, Vec<String>)> = Vec::new();
    if cur.peek() == Some('}') {
        cur.pos += 1;
    } else {
        loop {
            let pos = cur.label()?;
            cur.expect(':')?;
            cur.expect('[')?;
            let mut dirs = Vec::new();
            if cur.peek() == Some(']') {
                cur.pos += 1;
            } else {
                loop {
                    dirs.push(cur.label()?);
                    match cur.peek() {
                        Some(',') => cur.pos += 1,
                        Some(']') => {
                            cur.pos += 1;
                            break;
                        }
                        _ => return Err(cur.err("expected `,` or `]`")),
                    }
                }
            }
            pairs.push((pos, dirs));
            match cur.peek() {
                Some(',') => cur.pos += 1,
                Some('}') => {
                    cur.pos += 1;
                    break;
                }
                _ => return Err(cur.err("expected `,` or `}`")),
            }
        }
    }
    if !cur.at_end() {
        return Err(cur.err("trailing input"));
    }
    Poly::from_pairs(pairs).map_err(|e| match e {
        Error::Parse { message, .. } => Error::parse(text, message),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_forms() {
        assert_eq!(parse_poly("y^3 + 2y + 1").unwrap().normal_form(), vec![(3, 1), (1, 2), (0, 1)]);
        assert_eq!(parse_poly("0").unwrap().num_positions(), 0);
        assert_eq!(parse_poly("3").unwrap().normal_form(), vec![(0, 3)]);
        assert_eq!(parse_poly("2*y^2+y").unwrap().normal_form(), vec![(2, 2), (1, 1)]);
        assert_eq!(parse_poly("y^0").unwrap().normal_form(), vec![(0, 1)]);
    }

    #[test]
    fn sum_printer_is_canonical() {
        for s in ["y^3 + 2y + 1", "0", "y", "5", "3y^4 + y^2"] {
            let p = parse_poly(s).unwrap();
            assert_eq!(p.to_sum_string(), s);
            assert_eq!(parse_poly(&p.to_sum_string()).unwrap(), p);
        }
    }

    #[test]
    fn labeled_roundtrip() {
        let p = parse_poly("{i1: [d1, d2], i2: [], \"a b\": [\"x,y\", \"q\\\"\"]}").unwrap();
        assert_eq!(p.num_positions(), 3);
        assert_eq!(p.directions(2).get(1), "q\"");
        let back = parse_poly(&p.to_labeled_string()).unwrap();
        assert_eq!(back, p);
        assert_eq!(parse_poly("{}").unwrap(), Poly::zero());
    }

    #[test]
    fn errors_are_reported() {
        for bad in ["", "y^", "y +", "2 y ^ x", "{a: [b}", "{a: [], a: []}", "{a: [x, x]}", "x"] {
            assert!(matches!(parse_poly(bad), Err(Error::Parse { .. })), "{bad}");
        }
    }
}
