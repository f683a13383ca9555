//! Sparse bivariate Laurent polynomials with `ParamPoly` coefficients.
//!
//! A `LaurentPoly` is a finitely supported map (i, j) in Z^2 -> coefficient,
//! representing sum c_ij x^i y^j. Exponents of both variables may be
//! negative. No zero coefficients are stored.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::param::{Ctx, ParamPoly};
use crate::rat::{int, Rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    ctx: Ctx,
    terms: BTreeMap<(i64, i64), ParamPoly>,
}

impl LaurentPoly {
    pub fn zero(ctx: &Ctx) -> LaurentPoly {
        LaurentPoly {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ctx: &Ctx) -> LaurentPoly {
        LaurentPoly::monomial(ctx, 0, 0, ctx.one())
    }

    pub fn monomial(ctx: &Ctx, i: i64, j: i64, coeff: ParamPoly) -> LaurentPoly {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert((i, j), coeff);
        }
        LaurentPoly { ctx: ctx.clone(), terms }
    }

    pub fn var(ctx: &Ctx, v: Var) -> LaurentPoly {
        match v {
            Var::X => LaurentPoly::monomial(ctx, 1, 0, ctx.one()),
            Var::Y => LaurentPoly::monomial(ctx, 0, 1, ctx.one()),
        }
    }

    pub fn constant(ctx: &Ctx, c: Rat) -> LaurentPoly {
        LaurentPoly::monomial(ctx, 0, 0, ctx.constant(c))
    }

    pub fn from_param(coeff: &ParamPoly) -> LaurentPoly {
        LaurentPoly::monomial(coeff.ctx(), 0, 0, coeff.clone())
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &ParamPoly)> {
        self.terms.iter()
    }

    /// Exponent pairs carrying a (generically) nonzero coefficient.
    pub fn support(&self) -> Vec<(i64, i64)> {
        self.terms.keys().copied().collect()
    }

    pub fn coeff(&self, i: i64, j: i64) -> ParamPoly {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(|| self.ctx.zero())
    }

    /// True when no exponent is negative (the element lies in K[x, y]).
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|&(i, j)| i >= 0 && j >= 0)
    }

    /// Total degree max(i + j) over the support; `None` for 0.
    pub fn total_degree(&self) -> Option<i64> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    fn check_ctx(&self, other: &LaurentPoly) -> Result<()> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::MismatchedContext)
        }
    }

    fn insert(terms: &mut BTreeMap<(i64, i64), ParamPoly>, key: (i64, i64), c: ParamPoly) {
        if c.is_zero() {
            return;
        }
        match terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().add(&c).expect("same context");
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_ctx(other)?;
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            Self::insert(&mut terms, *k, c.clone());
        }
        Ok(LaurentPoly { ctx: self.ctx.clone(), terms })
    }

    pub fn sub(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect(),
        }
    }

    pub fn mul(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_ctx(other)?;
        let mut terms = BTreeMap::new();
        for ((ia, ja), ca) in &self.terms {
            for ((ib, jb), cb) in &other.terms {
                Self::insert(&mut terms, (ia + ib, ja + jb), ca.mul(cb)?);
            }
        }
        Ok(LaurentPoly { ctx: self.ctx.clone(), terms })
    }

    pub fn mul_monomial(&self, i: i64, j: i64, c: &ParamPoly) -> LaurentPoly {
        let mut terms = BTreeMap::new();
        for ((ia, ja), ca) in &self.terms {
            Self::insert(&mut terms, (ia + i, ja + j), ca.mul(c).expect("same context"));
        }
        LaurentPoly { ctx: self.ctx.clone(), terms }
    }

    pub fn scale(&self, c: &Rat) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero(&self.ctx);
        }
        LaurentPoly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(k, p)| (*k, p.scale(c))).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> LaurentPoly {
        let mut acc = LaurentPoly::one(&self.ctx);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base).expect("same context");
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base).expect("same context");
            }
        }
        acc
    }

    /// Integer power with negative exponents allowed for monomials only.
    pub fn powi(&self, n: i64) -> Result<LaurentPoly> {
        if n >= 0 {
            return Ok(self.pow(n as u32));
        }
        if self.terms.len() != 1 {
            return Err(Error::UnsupportedInversion(
                "negative power of a non-monomial".to_string(),
            ));
        }
        let ((i, j), c) = self.terms.iter().next().unwrap();
        let c = c
            .as_constant()
            .ok_or_else(|| Error::UnsupportedInversion("parameter coefficient".to_string()))?;
        let inv = LaurentPoly::monomial(&self.ctx, -i, -j, self.ctx.constant(int(1) / c));
        Ok(inv.pow((-n) as u32))
    }

    /// Term-wise exponent-weighted derivative; x^-1 maps to -x^-2 and so on.
    pub fn derive(&self, var: Var) -> LaurentPoly {
        let mut terms = BTreeMap::new();
        for ((i, j), c) in &self.terms {
            let (e, key) = match var {
                Var::X => (*i, (i - 1, *j)),
                Var::Y => (*j, (*i, j - 1)),
            };
            if e == 0 {
                continue;
            }
            Self::insert(&mut terms, key, c.scale(&int(e)));
        }
        LaurentPoly { ctx: self.ctx.clone(), terms }
    }

    /// Term-wise antiderivative in y with zero constant of integration.
    pub fn integrate_y(&self) -> Result<LaurentPoly> {
        let mut terms = BTreeMap::new();
        for ((i, j), c) in &self.terms {
            if *j == -1 {
                return Err(Error::NonElementaryTerm);
            }
            Self::insert(&mut terms, (*i, j + 1), c.scale(&Rat::new(1.into(), (j + 1).into())));
        }
        Ok(LaurentPoly { ctx: self.ctx.clone(), terms })
    }

    /// Evaluates the parameter coefficients exactly; relation-bound symbols
    /// stay formal, every other occurring symbol must be assigned.
    pub fn specialize(&self, assignment: &BTreeMap<String, Rat>) -> Result<LaurentPoly> {
        let rel_sym = self.ctx.relation().map(|r| r.symbol);
        let mut terms = BTreeMap::new();
        for (key, c) in &self.terms {
            let mut acc = self.ctx.zero();
            for (exps, coeff) in c.terms() {
                let mut kept = vec![0u32; exps.len()];
                let mut scalar = coeff.clone();
                for (idx, &e) in exps.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    if Some(idx) == rel_sym {
                        kept[idx] = e;
                        continue;
                    }
                    let name = &self.ctx.symbols()[idx];
                    let v = assignment
                        .get(name)
                        .ok_or_else(|| Error::UnassignedParameter(name.clone()))?;
                    for _ in 0..e {
                        scalar *= v;
                    }
                }
                let mut term = self.ctx.zero();
                if !scalar.is_zero() {
                    let mono = kept;
                    let mut one_term = std::collections::BTreeMap::new();
                    one_term.insert(mono, scalar);
                    term = rebuild(&self.ctx, one_term);
                }
                acc = acc.add(&term)?;
            }
            Self::insert(&mut terms, *key, acc);
        }
        Ok(LaurentPoly { ctx: self.ctx.clone(), terms })
    }

    /// Exact division, viewing both operands as polynomials in y whose
    /// coefficients are Laurent polynomials in x. Non-divisibility is a
    /// signaled outcome, not a panic.
    pub fn exact_divide(&self, divisor: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_ctx(divisor)?;
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(LaurentPoly::zero(&self.ctx));
        }
        // strip monomial content so both operands become honest y-polynomials
        let (nx, ny) = self.min_exponents();
        let (dx, dy) = divisor.min_exponents();
        let n = self.mul_monomial(-nx, -ny, &self.ctx.one());
        let d = divisor.mul_monomial(-dx, -dy, &self.ctx.one());
        let dtop = d.y_degree();
        let dlead = d.y_coeff(dtop);
        let mut rem = n;
        let mut quot = LaurentPoly::zero(&self.ctx);
        while !rem.is_zero() {
            let rtop = rem.y_degree();
            if rtop < dtop {
                return Err(Error::NotDivisible);
            }
            let c = x_laurent_exact_div(&rem.y_coeff(rtop), &dlead, &self.ctx)?;
            let qterm = c.mul_monomial(0, rtop - dtop, &self.ctx.one());
            rem = rem.sub(&qterm.mul(&d)?)?;
            quot = quot.add(&qterm)?;
        }
        Ok(quot.mul_monomial(nx - dx, ny - dy, &self.ctx.one()))
    }

    /// Minimal (x, y) exponents over the support. Zero polynomial gives (0, 0).
    pub fn min_exponents(&self) -> (i64, i64) {
        let ix = self.terms.keys().map(|&(i, _)| i).min().unwrap_or(0);
        let jy = self.terms.keys().map(|&(_, j)| j).min().unwrap_or(0);
        (ix, jy)
    }

    pub fn max_exponents(&self) -> (i64, i64) {
        let ix = self.terms.keys().map(|&(i, _)| i).max().unwrap_or(0);
        let jy = self.terms.keys().map(|&(_, j)| j).max().unwrap_or(0);
        (ix, jy)
    }

    fn y_degree(&self) -> i64 {
        self.terms.keys().map(|&(_, j)| j).max().unwrap_or(0)
    }

    /// The x-Laurent coefficient of y^j, as a LaurentPoly supported on y^0.
    pub fn y_coeff(&self, j: i64) -> LaurentPoly {
        let mut terms = BTreeMap::new();
        for ((i, jj), c) in &self.terms {
            if *jj == j {
                terms.insert((*i, 0), c.clone());
            }
        }
        LaurentPoly { ctx: self.ctx.clone(), terms }
    }

    /// The y-Laurent coefficient of x^i, supported on x^0.
    pub fn x_coeff(&self, i: i64) -> LaurentPoly {
        let mut terms = BTreeMap::new();
        for ((ii, j), c) in &self.terms {
            if *ii == i {
                terms.insert((0, *j), c.clone());
            }
        }
        LaurentPoly { ctx: self.ctx.clone(), terms }
    }
}

fn rebuild(ctx: &Ctx, terms: BTreeMap<Vec<u32>, Rat>) -> ParamPoly {
    let mut acc = ctx.zero();
    for (exps, c) in terms {
        let mut t = ctx.constant(c);
        for (idx, &e) in exps.iter().enumerate() {
            if e > 0 {
                let s = ctx.symbol(&ctx.symbols()[idx].clone()).expect("known symbol");
                t = t.mul(&s.pow(e)).expect("same context");
            }
        }
        acc = acc.add(&t).expect("same context");
    }
    acc
}

/// Exact division of two x-Laurent polynomials (supported on y^0).
fn x_laurent_exact_div(n: &LaurentPoly, d: &LaurentPoly, ctx: &Ctx) -> Result<LaurentPoly> {
    if d.is_zero() {
        return Err(Error::DivisionByZero);
    }
    if n.is_zero() {
        return Ok(LaurentPoly::zero(ctx));
    }
    let (nmin, _) = n.min_exponents();
    let (dmin, _) = d.min_exponents();
    let np = n.mul_monomial(-nmin, 0, &ctx.one());
    let dp = d.mul_monomial(-dmin, 0, &ctx.one());
    let dtop = dp.max_exponents().0;
    let dlead = dp.coeff(dtop, 0);
    let mut rem = np;
    let mut quot = LaurentPoly::zero(ctx);
    while !rem.is_zero() {
        let rtop = rem.max_exponents().0;
        if rtop < dtop {
            return Err(Error::NotDivisible);
        }
        let c = rem.coeff(rtop, 0).exact_div(&dlead)?;
        let qterm = LaurentPoly::monomial(ctx, rtop - dtop, 0, c);
        rem = rem.sub(&qterm.mul(&dp)?)?;
        quot = quot.add(&qterm)?;
    }
    Ok(quot.mul_monomial(nmin - dmin, 0, &ctx.one()))
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::expr::print_poly(self))
    }
}
