//! Form-class expressions over a built manifold.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('^' | '∧' | '*') unary)*
//! unary := '-' unary | atom
//! atom  := rational | '(' expr ')' | 'vol' | 'vol(' i ')' | 'sym' | 'sym(' i ')'
//!        | 'cls(' label ')' | 'cls(' i ',' label ')'
//! ```
//!
//! `vol` is the fundamental class, `vol(i)` the pull-back of the fundamental
//! class of product factor `i` (1-based), `sym(i)` the pull-back of the
//! degree-2 generator of a complex projective factor, `cls` a basis class by
//! label. Products are cup products; rationals are degree-0 classes.

use qrob_core::rational::parse_q;
use qrob_core::ring::{BuiltManifold, RingElement};
use qrob_core::{Error, Result};

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    built: &'a BuiltManifold,
}

pub fn parse_omega(src: &str, built: &BuiltManifold) -> Result<RingElement> {
    let mut p = Parser { src, pos: 0, built };
    let x = p.expr()?;
    p.skip_ws();
    if p.pos < src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(x)
}

impl<'a> Parser<'a> {
    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse { pos: self.pos, msg: msg.into() }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(format!("expected {tok:?}")))
        }
    }

    fn ring(&self) -> &'a qrob_core::ring::GradedRing {
        &self.built.ring
    }

    fn expr(&mut self) -> Result<RingElement> {
        let mut acc = self.term()?;
        loop {
            if self.eat("+") {
                acc = acc.add(&self.term()?)?;
            } else if self.eat("-") {
                acc = acc.sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RingElement> {
        let mut acc = self.unary()?;
        while self.eat("^") || self.eat("∧") || self.eat("*") {
            let rhs = self.unary()?;
            acc = self.ring().multiply(&acc, &rhs)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RingElement> {
        if self.eat("-") {
            let x = self.unary()?;
            return Ok(x.scale(&-qrob_core::rational::q(1)));
        }
        self.atom()
    }

    fn number(&mut self) -> Result<RingElement> {
        let start = self.pos;
        let digits = |s: &str| s.bytes().take_while(u8::is_ascii_digit).count();
        let mut end = start + digits(self.rest());
        if self.src[end..].starts_with('/') {
            let d = digits(&self.src[end + 1..]);
            if d == 0 {
                self.pos = end + 1;
                return Err(self.error("expected denominator"));
            }
            end += 1 + d;
        }
        let value = parse_q(&self.src[start..end]).map_err(|_| self.error("invalid rational"))?;
        self.pos = end;
        Ok(self.ring().one().scale(&value))
    }

    fn ident(&mut self) -> &'a str {
        let rest = self.rest();
        let len = rest.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn index(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        let len = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if len == 0 {
            return Err(self.error("expected a factor index"));
        }
        self.pos += len;
        let i: usize = self.src[start..self.pos].parse().map_err(|_| self.error("factor index too large"))?;
        if i == 0 || i > self.built.factors.len() {
            self.pos = start;
            return Err(self.error(format!("factor index {i} out of range 1..={}", self.built.factors.len())));
        }
        Ok(i - 1)
    }

    fn label(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest.find([',', ')']).unwrap_or(rest.len());
        let label = rest[..len].trim();
        if label.is_empty() {
            return Err(self.error("expected a class label"));
        }
        self.pos += len;
        Ok(label)
    }

    fn atom(&mut self) -> Result<RingElement> {
        self.skip_ws();
        let start = self.pos;
        match self.rest().chars().next() {
            None => Err(self.error("unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let x = self.expr()?;
                self.expect(")")?;
                Ok(x)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.ident();
                match name {
                    "vol" => {
                        if self.eat("(") {
                            let f = self.index()?;
                            self.expect(")")?;
                            Ok(self.factor_class(f, self.built.factors[f].ring.top_degree(), 0))
                        } else {
                            Ok(self.ring().fundamental_class())
                        }
                    }
                    "sym" => {
                        let f = if self.eat("(") {
                            let f = self.index()?;
                            self.expect(")")?;
                            f
                        } else {
                            let cps: Vec<usize> = (0..self.built.factors.len()).filter(|&f| self.is_cp(f)).collect();
                            match cps[..] {
                                [f] => f,
                                _ => {
                                    self.pos = start;
                                    return Err(self.error("`sym` needs a factor index unless exactly one factor is cp(m)"));
                                }
                            }
                        };
                        if !self.is_cp(f) {
                            self.pos = start;
                            return Err(self.error(format!("factor {} is not a complex projective space", f + 1)));
                        }
                        Ok(self.factor_class(f, 2, 0))
                    }
                    "cls" => {
                        self.expect("(")?;
                        let save = self.pos;
                        self.skip_ws();
                        let first_is_index = {
                            let r = self.rest();
                            let d = r.bytes().take_while(u8::is_ascii_digit).count();
                            d > 0 && r[d..].trim_start().starts_with(',')
                        };
                        self.pos = save;
                        let x = if first_is_index {
                            let f = self.index()?;
                            self.expect(",")?;
                            let at = self.pos;
                            let label = self.label()?;
                            let ring = &self.built.factors[f].ring;
                            let (k, i) = find_label(ring, label).ok_or_else(|| Error::Parse {
                                pos: at,
                                msg: format!("factor {} has no class labelled {label:?}", f + 1),
                            })?;
                            self.factor_class(f, k, i)
                        } else {
                            let at = self.pos;
                            let label = self.label()?;
                            let (k, i) = find_label(self.ring(), label)
                                .ok_or_else(|| Error::Parse { pos: at, msg: format!("no class labelled {label:?}") })?;
                            self.ring().basis_element(k, i)
                        };
                        self.expect(")")?;
                        Ok(x)
                    }
                    other => {
                        self.pos = start;
                        Err(self.error(format!("unknown class name {other:?}")))
                    }
                }
            }
            Some(c) => Err(self.error(format!("unexpected character {c:?}"))),
        }
    }

    fn is_cp(&self, f: usize) -> bool {
        matches!(self.built.factors[f].expr, qrob_core::ring::ManifoldExpr::CP(_))
    }

    fn factor_class(&self, f: usize, k: usize, i: usize) -> RingElement {
        self.ring().basis_element(k, self.built.factors[f].embed[k][i])
    }
}

fn find_label(ring: &qrob_core::ring::GradedRing, label: &str) -> Option<(usize, usize)> {
    ring.labels()
        .iter()
        .enumerate()
        .find_map(|(k, ls)| ls.iter().position(|l| l == label).map(|i| (k, i)))
}
