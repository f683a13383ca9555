//! Text grammar for Laurent polynomials, and the canonical printer.
//!
//! Grammar (whitespace-insensitive, explicit `*` only):
//!
//! ```text
//! expr   := ['-'] term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' int)?
//! base   := rational | var | '(' expr ')'
//! var    := x | y | <context parameter>
//! ```
//!
//! Exponents may be negative on x and y only; `/` divides by a monomial
//! with a rational coefficient. The printer emits terms in graded-lex
//! order on (i, j), descending, with reduced rational coefficients, and
//! `print(parse(print(p))) == print(p)` holds structurally.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::laurent::{LaurentPoly, Var};
use crate::param::{Ctx, ParamPoly};
use crate::rat::{fmt_rat, Rat};

pub fn parse_poly(ctx: &Ctx, text: &str) -> Result<LaurentPoly> {
    let mut p = Parser {
        ctx: ctx.clone(),
        bytes: text.as_bytes(),
        pos: 0,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    ctx: Ctx,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, message: &str) -> Error {
        Error::Parse {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<LaurentPoly> {
        let mut acc = if self.eat(b'-') {
            self.term()?.neg()
        } else {
            self.term()?
        };
        loop {
            if self.eat(b'+') {
                acc = acc.add(&self.term()?)?;
            } else if self.eat(b'-') {
                acc = acc.sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<LaurentPoly> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = acc.mul(&self.factor()?)?;
            } else if self.eat(b'/') {
                let at = self.pos;
                let d = self.factor()?;
                let inv = d.powi(-1).map_err(|_| Error::Parse {
                    position: at,
                    message: "division is only defined by monomials with rational coefficients"
                        .to_string(),
                })?;
                acc = acc.mul(&inv)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<LaurentPoly> {
        let base_at = self.pos;
        let (base, is_var_xy) = self.base()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let exp_at = self.pos;
        let e = self.int()?;
        if e < 0 && !is_var_xy {
            if base.num_terms() == 1 && base.support() == vec![(0, 0)] && base.coeff(0, 0).as_constant().is_none() {
                return Err(Error::Parse {
                    position: exp_at,
                    message: "negative exponent on a parameter".to_string(),
                });
            }
        }
        base.powi(e).map_err(|_| Error::Parse {
            position: base_at,
            message: "cannot raise a non-monomial to a negative power".to_string(),
        })
    }

    fn base(&mut self) -> Result<(LaurentPoly, bool)> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok((inner, false))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.int()?;
                Ok((LaurentPoly::constant(&self.ctx, Rat::from_integer(n.into())), false))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let name = self.ident();
                match name.as_str() {
                    "x" => Ok((LaurentPoly::var(&self.ctx, Var::X), true)),
                    "y" => Ok((LaurentPoly::var(&self.ctx, Var::Y), true)),
                    _ => {
                        let sym = self.ctx.symbol(&name).map_err(|_| Error::Parse {
                            position: self.pos - name.len(),
                            message: format!("unknown variable `{name}`"),
                        })?;
                        Ok((LaurentPoly::from_param(&sym), false))
                    }
                }
            }
            _ => Err(self.err("expected a number, variable or `(`")),
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned()
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let neg = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        let s = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        let v: i64 = s.parse().map_err(|_| self.err("integer out of range"))?;
        Ok(if neg { -v } else { v })
    }
}

/// Canonical text form: graded-lex descending on (i, j), reduced rationals.
pub fn print_poly(p: &LaurentPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut keys = p.support();
    keys.sort_by(|a, b| cmp_mono(*b, *a));
    let mut out = String::new();
    for (idx, (i, j)) in keys.iter().enumerate() {
        let coeff = p.coeff(*i, *j);
        let (sign, body) = term_text(&coeff, *i, *j);
        if idx == 0 {
            if sign < 0 {
                out.push('-');
            }
        } else {
            out.push_str(if sign < 0 { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    out
}

fn cmp_mono(a: (i64, i64), b: (i64, i64)) -> std::cmp::Ordering {
    (a.0 + a.1).cmp(&(b.0 + b.1)).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1))
}

/// Renders one Laurent term as (sign, unsigned text).
fn term_text(coeff: &ParamPoly, i: i64, j: i64) -> (i32, String) {
    let mut parts: Vec<String> = Vec::new();
    let mut sign = 1;
    let single: Vec<(&Vec<u32>, &Rat)> = coeff.terms().collect();
    if single.len() == 1 {
        let (exps, c) = single[0];
        if c.is_negative() {
            sign = -1;
        }
        let abs = c.abs();
        let has_params = exps.iter().any(|&e| e > 0);
        if !abs.is_one() || (!has_params && i == 0 && j == 0) {
            parts.push(fmt_rat(&abs));
        }
        for (idx, &e) in exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let name = coeff.ctx().symbols()[idx].clone();
            parts.push(if e == 1 { name } else { format!("{name}^{e}") });
        }
    } else {
        // multi-term coefficient: lead with its graded-lex head sign
        let mut c = coeff.clone();
        let lead_neg = coeff
            .leading_term()
            .map(|(_, r)| r.is_negative())
            .unwrap_or(false);
        if lead_neg {
            sign = -1;
            c = c.neg();
        }
        parts.push(format!("({c})"));
    }
    for (name, e) in [("x", i), ("y", j)] {
        if e == 0 {
            continue;
        }
        parts.push(if e == 1 {
            name.to_string()
        } else {
            format!("{name}^{e}")
        });
    }
    if parts.is_empty() {
        parts.push("1".to_string());
    }
    (sign, parts.join("*"))
}

/// Convenience used by tests and the CLI: parse in the standard context.
pub fn parse_std(text: &str) -> Result<LaurentPoly> {
    parse_poly(&Ctx::standard(), text)
}

#[allow(dead_code)]
fn bigint_is_one(b: &BigInt) -> bool {
    b.is_one() || b.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_basic_forms() {
        let c = Ctx::standard();
        let p = parse_poly(&c, "x^4*y + 2*x^3").unwrap();
        assert_eq!(p.support(), vec![(3, 0), (4, 1)]);
        assert_eq!(p.coeff(3, 0), c.int(2));
        assert!(parse_poly(&c, "0").unwrap().is_zero());
        let q = parse_poly(&c, "y^5/5 + mu3*y^2/2").unwrap();
        assert_eq!(q.coeff(0, 5), c.constant(crate::rat::rat(1, 5)));
        assert_eq!(q.coeff(0, 2), c.symbol("mu3").unwrap().scale(&crate::rat::rat(1, 2)));
    }

    #[test]
    fn parse_negative_exponents_and_signs() {
        let c = Ctx::standard();
        let p = parse_poly(&c, "x^-2*y - 2/y").unwrap();
        assert_eq!(p.coeff(-2, 1), c.one());
        assert_eq!(p.coeff(0, -1), c.int(-2));
        assert!(parse_poly(&c, "-x + x").unwrap().is_zero());
    }

    #[test]
    fn parse_errors_carry_positions() {
        let c = Ctx::standard();
        match parse_poly(&c, "x + $") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(parse_poly(&c, "mu3^-1"), Err(Error::Parse { .. })));
        assert!(matches!(parse_poly(&c, "(x+y)^-1"), Err(Error::Parse { .. })));
        assert!(matches!(parse_poly(&c, "zeta"), Err(Error::Parse { .. })));
    }

    #[test]
    fn canonical_order() {
        let c = Ctx::standard();
        let p = parse_poly(&c, "y + x").unwrap();
        assert_eq!(print_poly(&p), "x + y");
        let bracket = parse_poly(&c, "mu0 + mu1*x + mu2*x^2 + mu3*x^3 + x^4*y").unwrap();
        assert_eq!(print_poly(&bracket), "x^4*y + mu3*x^3 + mu2*x^2 + mu1*x + mu0");
    }

    #[test]
    fn print_parse_round_trip() {
        let c = Ctx::standard();
        for text in [
            "x^3*y + mu3*x^2",
            "1/5*y^5 + 1/2*mu3*y^2",
            "-x^-2 + (mu0 + 2*mu1)*x*y^-3 - 7",
            "x^9*y^3 - 2*x^5*y^2 + x*y - 2",
            "0",
        ] {
            let p = parse_poly(&c, text).unwrap();
            let printed = print_poly(&p);
            let q = parse_poly(&c, &printed).unwrap();
            assert_eq!(p, q, "round trip failed for {text}: printed {printed}");
            assert_eq!(print_poly(&q), printed);
        }
    }
}
