//! Manifold expressions: `surface(2) * cp(2)`, `connsum(s2xs2, 8)`, `torus(4)`.

use std::fmt;

use super::build::{self, product_with_embeddings};
use super::GradedRing;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ManifoldExpr {
    Sphere(usize),
    Torus(usize),
    Surface(usize),
    CP(usize),
    S2xS2,
    Product(Box<ManifoldExpr>, Box<ManifoldExpr>),
    ConnSum(Box<ManifoldExpr>, Box<ManifoldExpr>),
}

impl ManifoldExpr {
    pub fn product(a: ManifoldExpr, b: ManifoldExpr) -> Self {
        ManifoldExpr::Product(Box::new(a), Box::new(b))
    }

    pub fn connsum(a: ManifoldExpr, b: ManifoldExpr) -> Self {
        ManifoldExpr::ConnSum(Box::new(a), Box::new(b))
    }

    /// `nu`-fold connected sum, folded to the left.
    pub fn connsum_power(x: ManifoldExpr, nu: usize) -> Result<Self> {
        if nu == 0 {
            return Err(Error::InvalidConstructor("connsum with 0 summands".into()));
        }
        let mut acc = x.clone();
        for _ in 1..nu {
            acc = ManifoldExpr::connsum(acc, x.clone());
        }
        Ok(acc)
    }

    /// Connected-sum summands, flattened left to right.
    pub fn summands(&self) -> Vec<&ManifoldExpr> {
        match self {
            ManifoldExpr::ConnSum(a, b) => {
                let mut v = a.summands();
                v.extend(b.summands());
                v
            }
            other => vec![other],
        }
    }

    /// Product factors, flattened left to right.
    pub fn factors(&self) -> Vec<&ManifoldExpr> {
        match self {
            ManifoldExpr::Product(a, b) => {
                let mut v = a.factors();
                v.extend(b.factors());
                v
            }
            other => vec![other],
        }
    }

    pub fn parse(src: &str) -> Result<Self> {
        parse_manifold(src)
    }

    pub fn build(&self) -> Result<BuiltManifold> {
        let built = self.build_unchecked()?;
        built.ring.validate()?;
        Ok(built)
    }

    fn build_unchecked(&self) -> Result<BuiltManifold> {
        let leaf = |ring: GradedRing| {
            let embed = ring.dims().iter().map(|&n| (0..n).collect()).collect();
            Ok(BuiltManifold {
                expr: self.clone(),
                factors: vec![Factor { expr: self.clone(), ring: ring.clone(), embed }],
                ring,
            })
        };
        match self {
            ManifoldExpr::Sphere(n) => leaf(build::sphere(*n)?),
            ManifoldExpr::Torus(n) => leaf(build::torus(*n)?),
            ManifoldExpr::Surface(g) => leaf(build::surface(*g)?),
            ManifoldExpr::CP(m) => leaf(build::cp(*m)?),
            ManifoldExpr::S2xS2 => leaf(build::s2xs2()?),
            ManifoldExpr::ConnSum(..) => {
                let rings = self
                    .summands()
                    .into_iter()
                    .map(|s| s.build_unchecked().map(|b| b.ring))
                    .collect::<Result<Vec<_>>>()?;
                leaf(build::connsum(&rings)?)
            }
            ManifoldExpr::Product(a, b) => {
                let (l, r) = (a.build_unchecked()?, b.build_unchecked()?);
                let (ring, emb) = product_with_embeddings(&l.ring, &r.ring)?;
                let compose = |f: Factor, outer: &[Vec<usize>]| Factor {
                    embed: f.embed.iter().enumerate().map(|(k, m)| m.iter().map(|&i| outer[k][i]).collect()).collect(),
                    ..f
                };
                let mut factors: Vec<Factor> = l.factors.into_iter().map(|f| compose(f, &emb.left)).collect();
                factors.extend(r.factors.into_iter().map(|f| compose(f, &emb.right)));
                Ok(BuiltManifold { expr: self.clone(), ring, factors })
            }
        }
    }
}

/// A built ring together with its product factors and their pull-back maps.
#[derive(Clone, Debug)]
pub struct BuiltManifold {
    pub expr: ManifoldExpr,
    pub ring: GradedRing,
    pub factors: Vec<Factor>,
}

/// One product factor `F_i` of `N = F_1 × ... × F_m`.
#[derive(Clone, Debug)]
pub struct Factor {
    pub expr: ManifoldExpr,
    pub ring: GradedRing,
    /// `embed[k][i]`: index in `H^k(N)` of the pull-back of `basis_k(F_i)[i]`.
    pub embed: Vec<Vec<usize>>,
}

impl fmt::Display for ManifoldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ManifoldExpr::Sphere(n) => write!(f, "sphere({n})"),
            ManifoldExpr::Torus(n) => write!(f, "torus({n})"),
            ManifoldExpr::Surface(g) => write!(f, "surface({g})"),
            ManifoldExpr::CP(m) => write!(f, "cp({m})"),
            ManifoldExpr::S2xS2 => write!(f, "s2xs2"),
            ManifoldExpr::Product(a, b) => {
                write!(f, "{a} * ")?;
                match **b {
                    ManifoldExpr::Product(..) => write!(f, "({b})"),
                    _ => write!(f, "{b}"),
                }
            }
            ManifoldExpr::ConnSum(..) => {
                let parts = self.summands();
                if parts.iter().all(|p| *p == parts[0]) && self.is_left_fold() {
                    write!(f, "connsum({}, {})", parts[0], parts.len())
                } else {
                    let ManifoldExpr::ConnSum(a, b) = self else { unreachable!() };
                    write!(f, "connsum({a}, {b})")
                }
            }
        }
    }
}

impl ManifoldExpr {
    fn is_left_fold(&self) -> bool {
        match self {
            ManifoldExpr::ConnSum(a, b) => !matches!(**b, ManifoldExpr::ConnSum(..)) && a.is_left_fold(),
            _ => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(usize),
    LParen,
    RParen,
    Comma,
    Star,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => {
                out.push((i, Tok::LParen));
                i += 1
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1
            }
            ',' => {
                out.push((i, Tok::Comma));
                i += 1
            }
            '*' => {
                out.push((i, Tok::Star));
                i += 1
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = src[start..i]
                    .parse()
                    .map_err(|_| Error::Parse { pos: start, msg: "integer too large".into() })?;
                out.push((start, Tok::Num(n)));
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_ascii_lowercase())));
            }
            _ => return Err(Error::Parse { pos: i, msg: format!("unexpected character {c:?}") }),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.here(), msg: msg.into() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn number(&mut self) -> Result<usize> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => self.err("expected an integer"),
        }
    }

    fn product(&mut self) -> Result<ManifoldExpr> {
        let mut acc = self.atom()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let rhs = self.atom()?;
            acc = ManifoldExpr::product(acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<usize> {
        self.expect(Tok::LParen, "'('")?;
        let n = self.number()?;
        self.expect(Tok::RParen, "')'")?;
        Ok(n)
    }

    fn atom(&mut self) -> Result<ManifoldExpr> {
        let start = self.here();
        let bad = |msg: String| Error::Parse { pos: start, msg };
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.product()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "sphere" => {
                        let n = self.unary()?;
                        if n == 0 {
                            return Err(bad("sphere dimension must be at least 1".into()));
                        }
                        Ok(ManifoldExpr::Sphere(n))
                    }
                    "torus" => {
                        let n = self.unary()?;
                        if n == 0 {
                            return Err(bad("torus dimension must be at least 1".into()));
                        }
                        Ok(ManifoldExpr::Torus(n))
                    }
                    "surface" => {
                        let g = self.unary()?;
                        if g == 0 {
                            return Err(bad("surface genus must be at least 1 (use sphere(2))".into()));
                        }
                        Ok(ManifoldExpr::Surface(g))
                    }
                    "cp" => {
                        let m = self.unary()?;
                        if m == 0 {
                            return Err(bad("cp(m) needs m >= 1".into()));
                        }
                        Ok(ManifoldExpr::CP(m))
                    }
                    "s2xs2" => Ok(ManifoldExpr::S2xS2),
                    "connsum" => {
                        self.expect(Tok::LParen, "'('")?;
                        let first = self.product()?;
                        self.expect(Tok::Comma, "','")?;
                        let e = if let Some(Tok::Num(_)) = self.peek() {
                            let nu = self.number()?;
                            if nu == 0 {
                                return Err(bad("connsum needs at least one summand".into()));
                            }
                            ManifoldExpr::connsum_power(first, nu)?
                        } else {
                            let mut acc = first;
                            acc = ManifoldExpr::connsum(acc, self.product()?);
                            while self.peek() == Some(&Tok::Comma) {
                                self.pos += 1;
                                acc = ManifoldExpr::connsum(acc, self.product()?);
                            }
                            acc
                        };
                        self.expect(Tok::RParen, "')'")?;
                        Ok(e)
                    }
                    other => Err(bad(format!("unknown manifold {other:?}"))),
                }
            }
            _ => self.err("expected a manifold"),
        }
    }
}

pub fn parse_manifold(src: &str) -> Result<ManifoldExpr> {
    let mut p = Parser { toks: lex(src)?, pos: 0, end: src.len() };
    let e = p.product()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}
