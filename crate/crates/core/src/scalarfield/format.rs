//! Text form of field elements: integer coefficients, explicit `*`, `^` for
//! powers and a parenthesized numerator/denominator, e.g.
//! `(-1)*t1^2/(2*(t1-1))`. `parse` accepts any arithmetic expression in the
//! same alphabet, so rendered output always parses back.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};

use super::{Context, FieldElement, FieldError, Poly};

pub(super) fn render(f: &FieldElement) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let names = f.context().names();
    let l = f.numer().denominator_lcm().lcm(&f.denom().denominator_lcm());
    let lq = BigRational::from_integer(l);
    let mut num = f.numer().scale(&lq);
    let mut den = f.denom().scale(&lq);
    let g = num.integer_content().gcd(&den.integer_content());
    if !g.is_one() {
        let gi = BigRational::from_integer(g).recip();
        num = num.scale(&gi);
        den = den.scale(&gi);
    }
    if den.is_one() {
        return factored(&num, names, true);
    }
    let n = factored(&num, names, false);
    match den.as_constant() {
        Some(d) => format!("{}/{}", n, d.numer()),
        None => format!("{}/({})", n, factored(&den, names, true)),
    }
}

fn factored(p: &Poly, names: &[String], top: bool) -> String {
    if let Some(c) = p.as_constant() {
        return c.numer().to_string();
    }
    let mut c = p.integer_content();
    if !p.sign_of_leading() {
        c = -c;
    }
    let pp = p.scale(&BigRational::from_integer(c.clone()).recip());
    let body = poly_string(&pp, names);
    let multi = pp.num_terms() > 1;
    if c.is_one() {
        if multi && !top {
            format!("({body})")
        } else {
            body
        }
    } else {
        let cs = if c.is_negative() {
            format!("({c})")
        } else {
            c.to_string()
        };
        if multi {
            format!("{cs}*({body})")
        } else {
            format!("{cs}*{body}")
        }
    }
}

fn poly_string(p: &Poly, names: &[String]) -> String {
    let mut out = String::new();
    for (i, (m, c)) in p.terms().rev().enumerate() {
        let c = c.numer().clone();
        let neg = c.is_negative();
        let a = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push(if neg { '-' } else { '+' });
        }
        let mono: Vec<String> = m
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(v, &e)| {
                if e == 1 {
                    names[v].clone()
                } else {
                    format!("{}^{}", names[v], e)
                }
            })
            .collect();
        if mono.is_empty() {
            out.push_str(&a.to_string());
        } else if a.is_one() {
            out.push_str(&mono.join("*"));
        } else {
            out.push_str(&format!("{}*{}", a, mono.join("*")));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, FieldError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = s.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, ch) = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() {
            let start = pos;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let end = chars.get(i).map_or(s.len(), |c| c.0);
            out.push((start, Tok::Int(s[start..end].parse().unwrap())));
        } else if ch.is_alphabetic() || ch == '_' {
            let start = pos;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let end = chars.get(i).map_or(s.len(), |c| c.0);
            out.push((start, Tok::Ident(s[start..end].to_string())));
        } else if "+-*/^()".contains(ch) {
            out.push((pos, Tok::Sym(ch)));
            i += 1;
        } else {
            return Err(FieldError::Parse {
                pos,
                msg: format!("unexpected character `{ch}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    ctx: &'a Context,
    toks: Vec<(usize, Tok)>,
    at: usize,
    len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.len, |t| t.0)
    }

    fn err<T>(&self, msg: &str) -> Result<T, FieldError> {
        Err(FieldError::Parse {
            pos: self.pos(),
            msg: msg.to_string(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<FieldElement, FieldError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.checked_add(&self.term()?)?;
            } else if self.eat('-') {
                acc = acc.checked_sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<FieldElement, FieldError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.checked_mul(&self.unary()?)?;
            } else if self.eat('/') {
                acc = acc.checked_div(&self.unary()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<FieldElement, FieldError> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<FieldElement, FieldError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                let e: i32 = match i32::try_from(n) {
                    Ok(e) => e,
                    Err(_) => return self.err("exponent too large"),
                };
                base.pow(if neg { -e } else { e })
            }
            _ => self.err("expected integer exponent"),
        }
    }

    fn atom(&mut self) -> Result<FieldElement, FieldError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                Ok(self.ctx.rational(BigRational::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                self.ctx.var(&name)
            }
            Some(Tok::Sym('(')) => {
                self.at += 1;
                let v = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(v)
            }
            _ => self.err("expected number, parameter or `(`"),
        }
    }
}

pub(super) fn parse(ctx: &Context, s: &str) -> Result<FieldElement, FieldError> {
    let toks = lex(s)?;
    let mut p = Parser {
        ctx,
        toks,
        at: 0,
        len: s.len(),
    };
    if p.toks.is_empty() {
        return p.err("empty expression");
    }
    let v = p.expr()?;
    if p.at != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(v)
}
