//! Laurent polynomials with a factored denominator.
//!
//! The substitutions y -> y - f(x) turn negative y-powers into genuine
//! fractions, so the pipeline works with elements N / prod F_k^{e_k} where
//! every F_k is a normalized non-monomial Laurent polynomial. Monomial
//! units are absorbed into the numerator's Laurent exponents. Denominator
//! bookkeeping is purely syntactic: factors are matched after a canonical
//! normalization, there is no general bivariate gcd.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;

use crate::error::{Error, Result};
use crate::laurent::{LaurentPoly, Var};
use crate::param::Ctx;
use crate::rat::{int, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FracElem {
    num: LaurentPoly,
    denom: Vec<(LaurentPoly, u32)>,
}

/// Splits `f` as `scalar * x^a * y^b * F` with `F` normalized: minimal
/// exponents zero and the canonical leading rational coefficient 1.
fn normalize_factor(f: &LaurentPoly) -> Result<(Rat, i64, i64, LaurentPoly)> {
    if f.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let (mi, mj) = f.min_exponents();
    let shifted = f.mul_monomial(-mi, -mj, &f.ctx().one());
    let mut keys = shifted.support();
    keys.sort_by(|a, b| (a.0 + a.1, a.0).cmp(&(b.0 + b.1, b.0)));
    let lead = *keys.last().unwrap();
    let lead_rat = shifted
        .coeff(lead.0, lead.1)
        .leading_term()
        .map(|(_, c)| c.clone())
        .unwrap();
    let normalized = shifted.scale(&(int(1) / lead_rat.clone()));
    Ok((lead_rat, mi, mj, normalized))
}

impl FracElem {
    pub fn from_laurent(p: LaurentPoly) -> FracElem {
        FracElem {
            num: p,
            denom: Vec::new(),
        }
    }

    pub fn zero(ctx: &Ctx) -> FracElem {
        FracElem::from_laurent(LaurentPoly::zero(ctx))
    }

    pub fn one(ctx: &Ctx) -> FracElem {
        FracElem::from_laurent(LaurentPoly::one(ctx))
    }

    /// Builds `num / prod factors`, normalizing and merging the factors.
    pub fn new(num: LaurentPoly, factors: Vec<(LaurentPoly, u32)>) -> Result<FracElem> {
        let mut out = FracElem::from_laurent(num);
        for (f, e) in factors {
            out = out.div_factor(&f, e)?;
        }
        Ok(out)
    }

    pub fn ctx(&self) -> &Ctx {
        self.num.ctx()
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denom_factors(&self) -> &[(LaurentPoly, u32)] {
        &self.denom
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// True when the denominator is empty (the element lies in the Laurent ring).
    pub fn is_laurent(&self) -> bool {
        self.denom.is_empty()
    }

    /// True when the element lies in K[x, y].
    pub fn is_polynomial(&self) -> bool {
        self.denom.is_empty() && self.num.is_polynomial()
    }

    pub fn as_laurent(&self) -> Option<&LaurentPoly> {
        self.denom.is_empty().then_some(&self.num)
    }

    /// Divides by `f^e`, absorbing monomial content into the numerator.
    pub fn div_factor(&self, f: &LaurentPoly, e: u32) -> Result<FracElem> {
        if e == 0 {
            return Ok(self.clone());
        }
        let (scalar, mi, mj, norm) = normalize_factor(f)?;
        let inv_scale = (int(1) / scalar).pow(e as i32);
        let mut num = self
            .num
            .mul_monomial(-mi * e as i64, -mj * e as i64, &self.ctx().one())
            .scale(&inv_scale);
        let mut denom = self.denom.clone();
        if norm.num_terms() == 1 {
            // monomial factor: fold straight into the numerator
            let inv = norm.powi(-(e as i64))?;
            num = num.mul(&inv)?;
        } else {
            match denom.iter_mut().find(|(g, _)| *g == norm) {
                Some((_, exp)) => *exp += e,
                None => denom.push((norm, e)),
            }
        }
        FracElem { num, denom }.reduced()
    }

    fn lift_to_common(&self, target: &[(LaurentPoly, u32)]) -> Result<LaurentPoly> {
        let mut num = self.num.clone();
        for (f, e) in target {
            let have = self
                .denom
                .iter()
                .find(|(g, _)| g == f)
                .map(|(_, k)| *k)
                .unwrap_or(0);
            if *e > have {
                num = num.mul(&f.pow(*e - have))?;
            }
        }
        Ok(num)
    }

    pub fn add(&self, other: &FracElem) -> Result<FracElem> {
        let mut denom = self.denom.clone();
        for (f, e) in &other.denom {
            match denom.iter_mut().find(|(g, _)| g == f) {
                Some((_, k)) => *k = (*k).max(*e),
                None => denom.push((f.clone(), *e)),
            }
        }
        let a = self.lift_to_common(&denom)?;
        let b = other.lift_to_common(&denom)?;
        FracElem {
            num: a.add(&b)?,
            denom,
        }
        .reduced()
    }

    pub fn sub(&self, other: &FracElem) -> Result<FracElem> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FracElem {
        FracElem {
            num: self.num.neg(),
            denom: self.denom.clone(),
        }
    }

    pub fn mul(&self, other: &FracElem) -> Result<FracElem> {
        let mut denom = self.denom.clone();
        for (f, e) in &other.denom {
            match denom.iter_mut().find(|(g, _)| g == f) {
                Some((_, k)) => *k += e,
                None => denom.push((f.clone(), *e)),
            }
        }
        FracElem {
            num: self.num.mul(&other.num)?,
            denom,
        }
        .reduced()
    }

    pub fn mul_laurent(&self, p: &LaurentPoly) -> Result<FracElem> {
        FracElem {
            num: self.num.mul(p)?,
            denom: self.denom.clone(),
        }
        .reduced()
    }

    /// Multiplicative inverse. The numerator becomes a denominator factor;
    /// a zero numerator is the one unsupported case.
    pub fn invert(&self) -> Result<FracElem> {
        if self.num.is_zero() {
            return Err(Error::UnsupportedInversion("zero image".to_string()));
        }
        let mut num = LaurentPoly::one(self.ctx());
        for (f, e) in &self.denom {
            num = num.mul(&f.pow(*e))?;
        }
        FracElem::from_laurent(num).div_factor(&self.num, 1)
    }

    pub fn powi(&self, n: i64) -> Result<FracElem> {
        if n < 0 {
            return self.invert()?.powi(-n);
        }
        let mut acc = FracElem::one(self.ctx());
        let mut base = self.clone();
        let mut n = n as u64;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Cancels denominator factors that exactly divide the numerator.
    pub fn reduced(&self) -> Result<FracElem> {
        let mut num = self.num.clone();
        let mut denom = Vec::new();
        if num.is_zero() {
            return Ok(FracElem::from_laurent(num));
        }
        for (f, e) in &self.denom {
            let mut left = *e;
            while left > 0 {
                match num.exact_divide(f) {
                    Ok(q) => {
                        num = q;
                        left -= 1;
                    }
                    Err(Error::NotDivisible) => break,
                    Err(other) => return Err(other),
                }
            }
            if left > 0 {
                denom.push((f.clone(), left));
            }
        }
        denom.sort_by_key(|(f, _)| crate::expr::print_poly(f));
        Ok(FracElem { num, denom })
    }

    /// Exact cross-multiplied comparison.
    pub fn semantic_eq(&self, other: &FracElem) -> Result<bool> {
        Ok(self.sub(other)?.is_zero())
    }

    /// Quotient-rule partial derivative.
    pub fn derive(&self, var: Var) -> Result<FracElem> {
        if self.denom.is_empty() {
            return Ok(FracElem::from_laurent(self.num.derive(var)));
        }
        let ctx = self.ctx().clone();
        let prod_all: LaurentPoly = self
            .denom
            .iter()
            .try_fold(LaurentPoly::one(&ctx), |acc, (f, _)| acc.mul(f))?;
        // d(N / prod F^e) = [N' prod F - N sum e_i F_i' prod_{k != i} F_k] / prod F^{e+1}
        let mut num = self.num.derive(var).mul(&prod_all)?;
        for (i, (fi, ei)) in self.denom.iter().enumerate() {
            let mut others = LaurentPoly::one(&ctx);
            for (k, (fk, _)) in self.denom.iter().enumerate() {
                if k != i {
                    others = others.mul(fk)?;
                }
            }
            let term = self
                .num
                .mul(&fi.derive(var))?
                .mul(&others)?
                .scale(&int(*ei as i64));
            num = num.sub(&term)?;
        }
        let denom = self.denom.iter().map(|(f, e)| (f.clone(), e + 1)).collect();
        FracElem { num, denom }.reduced()
    }

    pub fn specialize(&self, assignment: &BTreeMap<String, Rat>) -> Result<FracElem> {
        let num = self.num.specialize(assignment)?;
        let mut out = FracElem::from_laurent(num);
        for (f, e) in &self.denom {
            out = out.div_factor(&f.specialize(assignment)?, *e)?;
        }
        Ok(out)
    }

    /// Total degree of a denominator-free element.
    pub fn total_degree(&self) -> Option<i64> {
        self.as_laurent().and_then(|p| p.total_degree())
    }
}

impl fmt::Display for FracElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom.is_empty() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({})", self.num)?;
        write!(f, " / ")?;
        for (k, (fac, e)) in self.denom.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if e.is_one() {
                write!(f, "({fac})")?;
            } else {
                write!(f, "({fac})^{e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_std;

    #[test]
    fn cancel_exact_factor() {
        let g = parse_std("x^2 + y^3 - 1").unwrap();
        let f = parse_std("y - x").unwrap();
        let num = g.mul(&f).unwrap();
        let frac = FracElem::new(num, vec![(f, 1)]).unwrap();
        assert!(frac.is_laurent());
        assert_eq!(*frac.numerator(), g);
    }

    #[test]
    fn irreducible_fraction_unchanged() {
        let num = parse_std("x^2 + 1").unwrap();
        let f = parse_std("y - x").unwrap();
        let frac = FracElem::new(num.clone(), vec![(f.clone(), 1)]).unwrap();
        assert!(!frac.is_laurent());
        let again = frac.reduced().unwrap();
        assert_eq!(frac, again);
    }

    #[test]
    fn monomial_content_absorbed() {
        // dividing by y - x - 2x^-2 stores the unit-free factor and shifts the numerator
        let f = parse_std("y - x - 2*x^-2").unwrap();
        let frac = FracElem::new(parse_std("1").unwrap(), vec![(f.clone(), 1)]).unwrap();
        assert_eq!(frac.denom_factors().len(), 1);
        assert!(frac.denom_factors()[0].0.is_polynomial());
        // multiplying back by f recovers 1
        let back = frac.mul(&FracElem::from_laurent(f)).unwrap();
        assert!(back.is_laurent());
        assert_eq!(*back.numerator(), parse_std("1").unwrap());
    }

    #[test]
    fn arithmetic_and_inverse() {
        let f = parse_std("y^3 + x*y^2 - 2").unwrap();
        let a = FracElem::new(parse_std("x").unwrap(), vec![(f.clone(), 2)]).unwrap();
        let b = FracElem::new(parse_std("y").unwrap(), vec![(f.clone(), 1)]).unwrap();
        let s = a.add(&b).unwrap();
        // x/f^2 + y/f = (x + y f)/f^2
        let expect_num = parse_std("x").unwrap().add(&parse_std("y").unwrap().mul(&f).unwrap()).unwrap();
        assert!(s.sub(&FracElem::new(expect_num, vec![(f.clone(), 2)]).unwrap()).unwrap().is_zero());
        let inv = b.invert().unwrap();
        assert!(b.mul(&inv).unwrap().semantic_eq(&FracElem::one(b.ctx())).unwrap());
    }

    #[test]
    fn quotient_rule_derivative() {
        // d/dy (1/(y - c)) = -1/(y - c)^2, cross-checked by clearing denominators
        let f = parse_std("y - x").unwrap();
        let frac = FracElem::new(parse_std("1").unwrap(), vec![(f.clone(), 1)]).unwrap();
        let d = frac.derive(Var::Y).unwrap();
        let expect = FracElem::new(parse_std("-1").unwrap(), vec![(f, 2)]).unwrap();
        assert!(d.semantic_eq(&expect).unwrap());
    }
}
