//! Polynomials in the parameter symbols (mu0..mu3, r, lambda, ...).
//!
//! Coefficient domain for everything else in the crate. A context fixes an
//! ordered list of symbols and, optionally, one monic relation on a single
//! designated symbol; arithmetic reduces that symbol's exponents below the
//! relation degree, which is how the quotient ring Q[r]/(relation) is
//! realized. Parameters form a polynomial ring, not a fraction field:
//! division only exists through `exact_div`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rat::{fmt_rat, int, Rat};

/// One monic relation `sym^degree = rewrite`, stored dense by exponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub symbol: usize,
    pub rewrite: Vec<Rat>, // rewrite[k] is the coefficient of sym^k, len == degree
}

impl Relation {
    pub fn degree(&self) -> u32 {
        self.rewrite.len() as u32
    }
}

#[derive(Debug, PartialEq, Eq)]
pub struct ParamContext {
    symbols: Vec<String>,
    relation: Option<Relation>,
}

/// Shared handle to a parameter context. Cheap to clone; equality is
/// structural so independently built identical contexts are compatible.
#[derive(Debug, Clone)]
pub struct Ctx(Arc<ParamContext>);

impl PartialEq for Ctx {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}
impl Eq for Ctx {}

/// The symbols the expression grammar knows about.
pub const STANDARD_SYMBOLS: [&str; 7] = ["mu0", "mu1", "mu2", "mu3", "r", "lambda", "lambda1"];

impl Ctx {
    pub fn new<S: AsRef<str>>(symbols: &[S]) -> Ctx {
        Ctx(Arc::new(ParamContext {
            symbols: symbols.iter().map(|s| s.as_ref().to_string()).collect(),
            relation: None,
        }))
    }

    /// The default context used by the parser and the CLI.
    pub fn standard() -> Ctx {
        Ctx::new(&STANDARD_SYMBOLS)
    }

    /// Context with a monic relation `symbol^deg = rewrite` adjoined.
    /// `rewrite[k]` is the coefficient of `symbol^k`.
    pub fn with_relation<S: AsRef<str>>(symbols: &[S], symbol: &str, rewrite: Vec<Rat>) -> Result<Ctx> {
        let syms: Vec<String> = symbols.iter().map(|s| s.as_ref().to_string()).collect();
        let idx = syms
            .iter()
            .position(|s| s == symbol)
            .ok_or_else(|| Error::UnknownParameter(symbol.to_string()))?;
        Ok(Ctx(Arc::new(ParamContext {
            symbols: syms,
            relation: Some(Relation { symbol: idx, rewrite }),
        })))
    }

    pub fn symbols(&self) -> &[String] {
        &self.0.symbols
    }

    pub fn relation(&self) -> Option<&Relation> {
        self.0.relation.as_ref()
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.0.symbols.iter().position(|s| s == symbol)
    }

    fn arity(&self) -> usize {
        self.0.symbols.len()
    }

    pub fn zero(&self) -> ParamPoly {
        ParamPoly {
            ctx: self.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(&self) -> ParamPoly {
        self.constant(Rat::one())
    }

    pub fn constant(&self, c: Rat) -> ParamPoly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0u32; self.arity()], c);
        }
        ParamPoly { ctx: self.clone(), terms }
    }

    pub fn int(&self, n: i64) -> ParamPoly {
        self.constant(int(n))
    }

    /// Single term from an explicit exponent vector.
    pub fn term(&self, exps: Vec<u32>, c: Rat) -> ParamPoly {
        assert_eq!(exps.len(), self.arity(), "exponent vector arity");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        let mut p = ParamPoly { ctx: self.clone(), terms };
        p.reduce_relation();
        p
    }

    pub fn symbol(&self, name: &str) -> Result<ParamPoly> {
        let idx = self
            .index_of(name)
            .ok_or_else(|| Error::UnknownParameter(name.to_string()))?;
        let mut exps = vec![0u32; self.arity()];
        exps[idx] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(exps, Rat::one());
        Ok(ParamPoly { ctx: self.clone(), terms })
    }
}

/// A multivariate polynomial over `Rat` in the symbols of one context.
/// Invariants: no stored zero coefficients; when the context carries a
/// relation, every stored exponent of the designated symbol is below the
/// relation degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamPoly {
    ctx: Ctx,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl ParamPoly {
    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// `Some(c)` when the polynomial is the constant `c` (including 0).
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (exps, c) = self.terms.iter().next().unwrap();
                exps.iter().all(|&e| e == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    fn check_ctx(&self, other: &ParamPoly) -> Result<()> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::MismatchedContext)
        }
    }

    fn insert_term(terms: &mut BTreeMap<Vec<u32>, Rat>, exps: Vec<u32>, c: Rat) {
        if c.is_zero() {
            return;
        }
        match terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &ParamPoly) -> Result<ParamPoly> {
        self.check_ctx(other)?;
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            Self::insert_term(&mut terms, e.clone(), c.clone());
        }
        Ok(ParamPoly { ctx: self.ctx.clone(), terms })
    }

    pub fn sub(&self, other: &ParamPoly) -> Result<ParamPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ParamPoly {
        ParamPoly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &ParamPoly) -> Result<ParamPoly> {
        self.check_ctx(other)?;
        let mut terms = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                Self::insert_term(&mut terms, exps, ca * cb);
            }
        }
        let mut out = ParamPoly { ctx: self.ctx.clone(), terms };
        out.reduce_relation();
        Ok(out)
    }

    pub fn scale(&self, c: &Rat) -> ParamPoly {
        if c.is_zero() {
            return self.ctx.zero();
        }
        ParamPoly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> ParamPoly {
        let mut acc = self.ctx.one();
        for _ in 0..n {
            acc = acc.mul(self).expect("same context");
        }
        acc
    }

    /// Rewrites exponents of the relation symbol below the relation degree.
    fn reduce_relation(&mut self) {
        let Some(rel) = self.ctx.relation().cloned() else {
            return;
        };
        let deg = rel.degree();
        loop {
            let Some((exps, coeff)) = self
                .terms
                .iter()
                .find(|(e, _)| e[rel.symbol] >= deg)
                .map(|(e, c)| (e.clone(), c.clone()))
            else {
                return;
            };
            self.terms.remove(&exps);
            for (k, rc) in rel.rewrite.iter().enumerate() {
                if rc.is_zero() {
                    continue;
                }
                let mut e2 = exps.clone();
                e2[rel.symbol] = e2[rel.symbol] - deg + k as u32;
                Self::insert_term(&mut self.terms, e2, &coeff * rc);
            }
        }
    }

    /// Graded-lex maximal term, used as the canonical leading term.
    pub fn leading_term(&self) -> Option<(&Vec<u32>, &Rat)> {
        self.terms.iter().max_by(|(ea, _), (eb, _)| grlex(ea, eb))
    }

    /// Exact division; fails with `NotDivisible` when no polynomial quotient exists.
    pub fn exact_div(&self, divisor: &ParamPoly) -> Result<ParamPoly> {
        self.check_ctx(divisor)?;
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(c) = divisor.as_constant() {
            return Ok(self.scale(&(Rat::one() / c)));
        }
        let (dexp, dcoef) = divisor.leading_term().unwrap();
        let dexp = dexp.clone();
        let dcoef = dcoef.clone();
        let mut rem = self.clone();
        let mut quot = self.ctx.zero();
        while !rem.is_zero() {
            let (rexp, rcoef) = rem.leading_term().unwrap();
            let Some(qexp) = sub_exps(rexp, &dexp) else {
                return Err(Error::NotDivisible);
            };
            let qcoef = rcoef / &dcoef;
            let mut qterm = BTreeMap::new();
            qterm.insert(qexp, qcoef);
            let qterm = ParamPoly { ctx: self.ctx.clone(), terms: qterm };
            rem = rem.sub(&qterm.mul(divisor)?)?;
            quot = quot.add(&qterm)?;
        }
        Ok(quot)
    }

    /// Substitutes a polynomial for one symbol.
    pub fn subst_symbol(&self, symbol: usize, value: &ParamPoly) -> Result<ParamPoly> {
        if self.ctx != *value.ctx() {
            return Err(Error::MismatchedContext);
        }
        let max_deg = self.terms.keys().map(|e| e[symbol]).max().unwrap_or(0);
        let mut powers = Vec::with_capacity(max_deg as usize + 1);
        powers.push(self.ctx.one());
        for k in 1..=max_deg {
            powers.push(powers[(k - 1) as usize].mul(value)?);
        }
        let mut out = self.ctx.zero();
        for (e, c) in &self.terms {
            let mut rest = e.clone();
            let d = rest[symbol];
            rest[symbol] = 0;
            let mut terms = BTreeMap::new();
            Self::insert_term(&mut terms, rest, c.clone());
            let base = ParamPoly { ctx: self.ctx.clone(), terms };
            out = out.add(&base.mul(&powers[d as usize])?)?;
        }
        Ok(out)
    }

    /// Evaluates under a full assignment of the symbols that actually occur.
    /// Relation-bound symbols may not be assigned or present.
    pub fn specialize(&self, assignment: &BTreeMap<String, Rat>) -> Result<Rat> {
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (idx, &exp) in e.iter().enumerate() {
                if exp == 0 {
                    continue;
                }
                let name = &self.ctx.symbols()[idx];
                let v = assignment
                    .get(name)
                    .ok_or_else(|| Error::UnassignedParameter(name.clone()))?;
                for _ in 0..exp {
                    term *= v;
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Degree in one symbol.
    pub fn degree_in(&self, symbol: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[symbol]).max()
    }

    /// Coefficients as a univariate polynomial in `symbol`; index = exponent.
    pub fn coeffs_in(&self, symbol: usize) -> Vec<ParamPoly> {
        let deg = match self.degree_in(symbol) {
            None => return Vec::new(),
            Some(d) => d,
        };
        let mut out = vec![self.ctx.zero(); deg as usize + 1];
        for (e, c) in &self.terms {
            let k = e[symbol] as usize;
            let mut rest = e.clone();
            rest[symbol] = 0;
            Self::insert_term(&mut out[k].terms, rest, c.clone());
        }
        out
    }

    /// Symbols (by index) that occur with positive exponent.
    pub fn occurring_symbols(&self) -> Vec<usize> {
        let mut seen = vec![false; self.ctx.arity()];
        for e in self.terms.keys() {
            for (i, &x) in e.iter().enumerate() {
                if x > 0 {
                    seen[i] = true;
                }
            }
        }
        seen.iter().enumerate().filter(|(_, &s)| s).map(|(i, _)| i).collect()
    }

    /// Total degree of the graded-lex leading term.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }
}

/// Graded-lex order on exponent vectors (total degree first, then lex).
pub fn grlex(a: &[u32], b: &[u32]) -> std::cmp::Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

fn sub_exps(a: &[u32], b: &[u32]) -> Option<Vec<u32>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.checked_sub(*y))
        .collect::<Option<Vec<u32>>>()
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut entries: Vec<(&Vec<u32>, &Rat)> = self.terms.iter().collect();
        entries.sort_by(|(ea, _), (eb, _)| grlex(eb, ea));
        for (k, (exps, coeff)) in entries.iter().enumerate() {
            let mut parts: Vec<String> = Vec::new();
            let is_const = exps.iter().all(|&e| e == 0);
            let abs = coeff.abs();
            if is_const || !abs.is_one() {
                parts.push(fmt_rat(&abs));
            }
            for (i, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = &self.ctx.symbols()[i];
                if e == 1 {
                    parts.push(name.clone());
                } else {
                    parts.push(format!("{}^{}", name, e));
                }
            }
            let sign = if coeff.is_negative() { "-" } else { "+" };
            if k == 0 {
                if coeff.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", sign)?;
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn ctx() -> Ctx {
        Ctx::standard()
    }

    #[test]
    fn arithmetic_and_normalization() {
        let c = ctx();
        let mu3 = c.symbol("mu3").unwrap();
        let p = mu3.add(&c.int(2)).unwrap();
        let q = p.sub(&p).unwrap();
        assert!(q.is_zero());
        // (mu3 + 2)^2 = mu3^2 + 4 mu3 + 4
        let sq = p.pow(2);
        assert_eq!(sq.to_string(), "mu3^2 + 4*mu3 + 4");
    }

    #[test]
    fn exact_division() {
        let c = ctx();
        let mu3 = c.symbol("mu3").unwrap();
        let p = mu3.pow(2).sub(&c.int(4)).unwrap();
        let d = mu3.add(&c.int(2)).unwrap();
        let q = p.exact_div(&d).unwrap();
        assert_eq!(q, mu3.sub(&c.int(2)).unwrap());
        assert_eq!(p.exact_div(&mu3.add(&c.int(1)).unwrap()), Err(Error::NotDivisible));
    }

    #[test]
    fn relation_reduction_quotient_ring() {
        // 3r^4 - 6r^2 - 5 = 0 at j=1, stored monic: r^4 = 2r^2 + 5/3
        let c = Ctx::with_relation(&["r"], "r", vec![rat(5, 3), rat(0, 1), rat(2, 1), rat(0, 1)]).unwrap();
        let r = c.symbol("r").unwrap();
        // (r^2 - 1)^2 - 8/3 must reduce to 0
        let s = r.pow(2).sub(&c.one()).unwrap();
        let lhs = s.pow(2).sub(&c.constant(rat(8, 3))).unwrap();
        assert!(lhs.is_zero(), "got {lhs}");
    }

    #[test]
    fn specialization() {
        let c = ctx();
        let mu3 = c.symbol("mu3").unwrap();
        let p = mu3.pow(2).sub(&c.int(4)).unwrap();
        let mut asg = BTreeMap::new();
        asg.insert("mu3".to_string(), int(2));
        assert!(p.specialize(&asg).unwrap().is_zero());
        let empty = BTreeMap::new();
        assert_eq!(p.specialize(&empty), Err(Error::UnassignedParameter("mu3".into())));
    }

    #[test]
    fn univariate_views() {
        let c = ctx();
        let mu0 = c.symbol("mu0").unwrap();
        let mu1 = c.symbol("mu1").unwrap();
        let p = mu0.pow(2).mul(&mu1).unwrap().add(&mu0).unwrap().add(&c.int(7)).unwrap();
        let i = c.index_of("mu0").unwrap();
        assert_eq!(p.degree_in(i), Some(2));
        let coeffs = p.coeffs_in(i);
        assert_eq!(coeffs.len(), 3);
        assert_eq!(coeffs[0], c.int(7));
        assert_eq!(coeffs[1], c.one());
        assert_eq!(coeffs[2], mu1);
    }
}
