use num_bigint::BigInt;

use super::{GroupExpr, InfSum};
use crate::error::{Error, Result};

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
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
            self.err(format!("expected `{tok}`"))
        }
    }

    fn ident(&mut self) -> &'a str {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !c.is_ascii_alphabetic())
            .unwrap_or(self.rest().len());
        let s = &self.rest()[..len];
        self.pos += len;
        s
    }

    fn digits(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(self.rest().len());
        if len == 0 {
            return self.err("expected a number");
        }
        let s = &self.rest()[..len];
        self.pos += len;
        Ok(s)
    }

    fn big(&mut self) -> Result<BigInt> {
        Ok(self.digits()?.parse().expect("digits"))
    }

    fn small<T: std::str::FromStr>(&mut self) -> Result<T> {
        let at = self.pos;
        let d = self.digits()?;
        d.parse().map_err(|_| Error::Parse {
            offset: at,
            message: format!("number {d} out of range"),
        })
    }

    fn checked<T>(&self, at: usize, r: Result<T>) -> Result<T> {
        r.map_err(|e| match e {
            Error::InvalidExpr(m) => Error::Parse {
                offset: at,
                message: m,
            },
            other => other,
        })
    }

    fn expr(&mut self) -> Result<GroupExpr> {
        self.skip_ws();
        let at = self.pos;
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let n = self.digits()?;
            if n != "0" {
                return Err(Error::Parse {
                    offset: at,
                    message: format!("unexpected number {n}"),
                });
            }
            return Ok(GroupExpr::zero());
        }
        match self.ident() {
            "Z" => {
                if self.eat("^") {
                    if self.eat("(") {
                        self.expect("omega")?;
                        self.expect(")")?;
                        Ok(GroupExpr::FreeCountable)
                    } else {
                        Ok(GroupExpr::Free(self.small()?))
                    }
                } else if self.eat("/") {
                    let d_at = self.pos;
                    let d = self.big()?;
                    if d < BigInt::from(1) {
                        return Err(Error::Parse {
                            offset: d_at,
                            message: "Z/d needs d >= 1".into(),
                        });
                    }
                    Ok(GroupExpr::Cyclic(d))
                } else {
                    Ok(GroupExpr::z())
                }
            }
            "Prufer" => {
                self.expect("(")?;
                let p = self.small()?;
                self.expect(")")?;
                self.checked(at, GroupExpr::prufer(p))
            }
            "Sum" => {
                self.expect("(")?;
                let mut parts = Vec::new();
                if !self.eat(")") {
                    loop {
                        parts.push(self.expr()?);
                        if self.eat(")") {
                            break;
                        }
                        self.expect(",")?;
                    }
                }
                Ok(GroupExpr::Sum(parts))
            }
            "InfSum" => {
                self.expect("(")?;
                let p = self.small()?;
                self.expect(";")?;
                let (slope, offset) = self.affine()?;
                self.expect(")")?;
                self.checked(at, InfSum::new(p, slope, offset).map(GroupExpr::InfSum))
            }
            "InfProduct" => {
                self.expect("(")?;
                let base = self.expr()?;
                self.expect(")")?;
                self.checked(at, GroupExpr::inf_product(base))
            }
            "Padic" => {
                self.expect("(")?;
                let p = self.small()?;
                self.expect(";")?;
                let of = self.expr()?;
                self.expect(")")?;
                self.checked(at, GroupExpr::padic(p, of))
            }
            "" => self.err("expected a group expression"),
            other => Err(Error::Parse {
                offset: at,
                message: format!("unknown constructor `{other}`"),
            }),
        }
    }

    /// `a*n+b` in any order of signed terms; returns `(a, b)`.
    fn affine(&mut self) -> Result<(u64, i64)> {
        self.skip_ws();
        let start = self.pos;
        let mut slope: i64 = 0;
        let mut offset: i64 = 0;
        let mut first = true;
        loop {
            let sign = if self.eat("+") {
                1
            } else if self.eat("-") {
                -1
            } else if first {
                1
            } else {
                break;
            };
            first = false;
            if self.peek() == Some('n') {
                self.pos += 1;
                slope += sign;
                continue;
            }
            let c: i64 = self.small()?;
            if self.eat("*") {
                self.expect("n")?;
                slope += sign * c;
            } else {
                offset += sign * c;
            }
        }
        if slope < 0 {
            return Err(Error::Parse {
                offset: start,
                message: "exponent rule must be non-decreasing".into(),
            });
        }
        Ok((slope as u64, offset))
    }
}

/// Parses the text grammar: `0`, `Z`, `Z^r`, `Z^(omega)`, `Z/d`, `Prufer(p)`,
/// `Sum(e1, ..., ek)`, `InfSum(p; a*n+b)`, `InfProduct(e)`, `Padic(p; e)`.
pub fn parse_expr(s: &str) -> Result<GroupExpr> {
    let mut p = Parser { src: s, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != s.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for s in [
            "0",
            "Z",
            "Z^3",
            "Z^(omega)",
            "Z/12",
            "Prufer(2)",
            "InfSum(2; n)",
            "InfSum(3; 2*n-1)",
            "InfSum(5; 4)",
            "InfProduct(Z/2)",
            "Padic(2; Sum(Z, InfSum(2; n+3)))",
            "Sum(Z, Z/2, Prufer(3))",
        ] {
            assert_eq!(parse_expr(s).unwrap().to_string(), s);
        }
    }

    #[test]
    fn affine_forms() {
        let e = parse_expr("InfSum(2; 3 + 2*n)").unwrap();
        assert_eq!(e.to_string(), "InfSum(2; 2*n+3)");
        let e = parse_expr(" Sum( Z/4 ,InfSum(7;n) ) ").unwrap();
        assert_eq!(e.to_string(), "Sum(Z/4, InfSum(7; n))");
        assert_eq!(parse_expr("Sum()").unwrap(), GroupExpr::zero());
    }

    #[test]
    fn errors_carry_offsets() {
        let off = |s: &str| match parse_expr(s) {
            Err(Error::Parse { offset, .. }) => offset,
            other => panic!("{s}: {other:?}"),
        };
        assert_eq!(off("Prufer(4)"), 0);
        assert_eq!(off("Sum(Z, Q)"), 7);
        assert_eq!(off("Z/0"), 2);
        assert_eq!(off("Z Z"), 2);
        assert_eq!(off("InfSum(2; n-1)"), 0);
        assert_eq!(off("InfProduct(Z)"), 0);
        assert_eq!(off("InfSum(2; -n+3)"), 10);
    }
}
