//! Element expressions: `coeff*gen^e*gen[j] + ... - ...`.

use crate::algebra::{Element, GenKind, Monomial, Presentation};
use crate::error::{Error, Result};

struct Lexer<'s> {
    src: &'s str,
    pos: usize,
}

impl<'s> Lexer<'s> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn column(&self) -> usize {
        self.src[..self.pos].chars().count() + 1
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse { line: 1, column: self.column(), message: message.into() }
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.src[start..self.pos].parse().map_err(|_| {
            self.pos = start;
            self.error("expected a number")
        })
    }

    fn ident(&mut self) -> Option<&'s str> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let mut chars = rest.char_indices();
        match chars.next() {
            Some((_, c)) if c.is_alphabetic() || c == '_' => {}
            _ => return None,
        }
        let end = chars
            .find(|&(_, c)| !(c.is_alphanumeric() || c == '_' || c == '\''))
            .map_or(rest.len(), |(i, _)| i);
        self.pos += end;
        Some(&rest[..end])
    }
}

/// Parses an element expression over `pres`.
pub fn parse_element(pres: &Presentation, src: &str) -> Result<Element> {
    let mut lx = Lexer { src, pos: 0 };
    let mut total: Option<Element> = None;
    let mut first = true;
    loop {
        let neg = match lx.peek() {
            None if first => return Err(lx.error("empty expression")),
            None => break,
            Some('+') => {
                lx.bump();
                false
            }
            Some('-') => {
                lx.bump();
                true
            }
            Some(_) if first => false,
            Some(c) => return Err(lx.error(format!("expected `+` or `-`, found `{c}`"))),
        };
        first = false;
        lx.skip_ws();
        let at = lx.column();
        let term = parse_term(pres, &mut lx)?;
        let term = if neg { term.scaled(pres.p.value() - 1, pres.p) } else { term };
        total = Some(match total {
            None => term,
            Some(acc) => acc.add(&term, pres.p).map_err(|_| Error::Parse {
                line: 1,
                column: at,
                message: "expression is not homogeneous".into(),
            })?,
        });
    }
    Ok(total.expect("at least one term"))
}

fn parse_term(pres: &Presentation, lx: &mut Lexer) -> Result<Element> {
    let mut acc = pres.one();
    loop {
        let factor = parse_factor(pres, lx)?;
        acc = pres.multiply(&acc, &factor)?;
        if lx.peek() == Some('*') {
            lx.bump();
        } else {
            return Ok(acc);
        }
    }
}

fn parse_factor(pres: &Presentation, lx: &mut Lexer) -> Result<Element> {
    match lx.peek() {
        Some(c) if c.is_ascii_digit() => {
            let n = lx.number()?;
            Ok(pres.one().scaled((n % pres.p.value() as u64) as u32, pres.p))
        }
        Some('(') => {
            lx.bump();
            let start = lx.pos;
            let mut depth = 1;
            while depth > 0 {
                match lx.src[lx.pos..].chars().next() {
                    None => return Err(lx.error("unbalanced parenthesis")),
                    Some(c) => {
                        depth += match c {
                            '(' => 1,
                            ')' => -1,
                            _ => 0,
                        };
                        lx.pos += c.len_utf8();
                    }
                }
            }
            let inner = &lx.src[start..lx.pos - 1];
            let e = parse_element(pres, inner).map_err(|e| match e {
                Error::Parse { column, message, .. } => {
                    Error::Parse { line: 1, column: column + lx.src[..start].chars().count(), message }
                }
                other => other,
            })?;
            power_suffix(pres, lx, e)
        }
        _ => {
            let at = lx.pos;
            let name = lx.ident().ok_or_else(|| lx.error("expected a generator name or number"))?;
            let g = pres.index_of(name).map_err(|_| {
                lx.pos = at;
                lx.error(format!("unknown generator `{name}`"))
            })?;
            if lx.peek() == Some('[') {
                if pres.generators[g].kind != GenKind::DividedPower {
                    return Err(lx.error(format!("`{name}` is not a divided-power generator")));
                }
                lx.bump();
                let j = lx.number()?;
                if lx.bump() != Some(']') {
                    return Err(lx.error("expected `]`"));
                }
                let e = pres.monomial_element(Monomial::generator(pres.len(), g, j as u32));
                return power_suffix(pres, lx, e);
            }
            power_suffix(pres, lx, pres.gen(g))
        }
    }
}

fn power_suffix(pres: &Presentation, lx: &mut Lexer, base: Element) -> Result<Element> {
    if lx.peek() != Some('^') {
        return Ok(base);
    }
    lx.bump();
    let e = lx.number()?;
    pres.power(&base, e as u32)
}
