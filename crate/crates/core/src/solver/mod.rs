//! Search machinery for polynomial solutions of the quadratic (A, q1)
//! equation at bounded degree: symbolic coefficient-system generation,
//! exact solving over Q by triangular elimination with rational-root
//! enumeration (with a Buchberger fallback for stuck branches), the
//! quotient-ring verification of the homogeneous family, and scan reports.

pub mod groebner;
pub mod homogeneous;

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::Zero;
use serde_json::json;

use crate::error::{Error, Result};
use crate::jacobian::{check_conditions, edpol_residual, EdpolInstance, MuVec};
use crate::laurent::LaurentPoly;
use crate::param::{Ctx, ParamPoly};
use crate::rat::{rat, rational_roots, Rat};

pub use groebner::{groebner, GroebnerBudget, GroebnerOutcome};
pub use homogeneous::{homogeneous_family_check, HomogeneousCheck};

/// The polynomial equations in the unknown coefficients obtained by
/// matching y-powers of the residual to zero, with the normalizations
/// applied up front: q1 monic with q1(0) = mu3 and q1'(0) = 0,
/// deg A = 2 deg q1, A(0) = -mu3^2/4, A'(0) = mu2, plus the third side
/// condition as an equation.
#[derive(Debug, Clone)]
pub struct CoefficientSystem {
    pub ctx: Ctx,
    pub d: u32,
    pub unknowns: Vec<String>,
    pub equations: Vec<ParamPoly>,
    /// q1 and A with symbolic coefficients, for re-verification.
    pub q1: LaurentPoly,
    pub a: LaurentPoly,
    pub mu: MuVec,
}

pub fn generate_system(d: u32) -> Result<CoefficientSystem> {
    generate_system_with(d, &[])
}

/// Same, with some unknowns preset to rational constants (used by the
/// restricted scans, e.g. mu1 = mu2 = 0).
pub fn generate_system_with(d: u32, presets: &[(&str, Rat)]) -> Result<CoefficientSystem> {
    if d < 2 {
        return Err(Error::Unsupported("degree must be at least 2".to_string()));
    }
    let mut symbols: Vec<String> = vec!["mu0".into(), "mu1".into(), "mu2".into(), "mu3".into()];
    for i in 2..d {
        symbols.push(format!("q{i}"));
    }
    for i in 2..=2 * d {
        symbols.push(format!("a{i}"));
    }
    let ctx = Ctx::new(&symbols);
    let mu = MuVec([
        ctx.symbol("mu0")?,
        ctx.symbol("mu1")?,
        ctx.symbol("mu2")?,
        ctx.symbol("mu3")?,
    ]);
    // q1 = y^d + sum q_i y^i + mu3 (no linear term)
    let mut q1 = LaurentPoly::monomial(&ctx, 0, d as i64, ctx.one());
    for i in 2..d {
        q1 = q1.add(&LaurentPoly::monomial(&ctx, 0, i as i64, ctx.symbol(&format!("q{i}"))?))?;
    }
    q1 = q1.add(&LaurentPoly::monomial(&ctx, 0, 0, mu.m(3).clone()))?;
    // A = -mu3^2/4 + mu2 y + sum a_i y^i
    let mut a = LaurentPoly::monomial(&ctx, 0, 0, mu.m(3).pow(2).scale(&rat(-1, 4)));
    a = a.add(&LaurentPoly::monomial(&ctx, 0, 1, mu.m(2).clone()))?;
    for i in 2..=2 * d {
        a = a.add(&LaurentPoly::monomial(&ctx, 0, i as i64, ctx.symbol(&format!("a{i}"))?))?;
    }
    let inst = EdpolInstance {
        a: a.clone(),
        q1: q1.clone(),
        mu: mu.clone(),
    };
    let residual = edpol_residual(&inst)?;
    let mut equations: Vec<ParamPoly> = Vec::new();
    for k in 0..=(4 * d as i64) {
        let c = residual.coeff(0, k);
        if !c.is_zero() {
            equations.push(c);
        }
    }
    // third side condition: mu3 A''(0) + 6 mu1 + 2 mu3 q1''(0) = 0
    let a2 = a.coeff(0, 2).scale(&rat(2, 1));
    let q2 = q1.coeff(0, 2).scale(&rat(2, 1));
    let cond3 = mu
        .m(3)
        .mul(&a2)?
        .add(&mu.m(1).scale(&rat(6, 1)))?
        .add(&mu.m(3).mul(&q2)?.scale(&rat(2, 1)))?;
    equations.push(cond3);

    let mut cs = CoefficientSystem {
        unknowns: symbols,
        ctx,
        d,
        equations,
        q1,
        a,
        mu,
    };
    for (name, value) in presets {
        cs.preset(name, value.clone())?;
    }
    Ok(cs)
}

impl CoefficientSystem {
    fn preset(&mut self, name: &str, value: Rat) -> Result<()> {
        let idx = self
            .ctx
            .index_of(name)
            .ok_or_else(|| Error::UnknownParameter(name.to_string()))?;
        let v = self.ctx.constant(value);
        for eq in &mut self.equations {
            *eq = eq.subst_symbol(idx, &v)?;
        }
        self.equations.retain(|e| !e.is_zero());
        self.q1 = subst_laurent(&self.q1, idx, &v)?;
        self.a = subst_laurent(&self.a, idx, &v)?;
        self.mu = MuVec([
            self.mu.m(0).subst_symbol(idx, &v)?,
            self.mu.m(1).subst_symbol(idx, &v)?,
            self.mu.m(2).subst_symbol(idx, &v)?,
            self.mu.m(3).subst_symbol(idx, &v)?,
        ]);
        self.unknowns.retain(|u| u != name);
        Ok(())
    }

    /// The y^(4d) coefficient equation; its roots pin the leading
    /// coefficient of A.
    pub fn leading_equation(&self) -> Result<ParamPoly> {
        let inst = EdpolInstance {
            a: self.a.clone(),
            q1: self.q1.clone(),
            mu: self.mu.clone(),
        };
        Ok(edpol_residual(&inst)?.coeff(0, 4 * self.d as i64))
    }

    /// Lex priority with mu0 last, as the scans want mu0-eliminants first.
    pub fn lex_order_mu0_last(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.ctx.symbols().len()).collect();
        order.reverse(); // a_{2d} .. a2, q_{d-1} .. q2, mu3, mu2, mu1, mu0
        order
    }
}

/// Substitutes one context symbol in every coefficient.
pub fn subst_laurent(p: &LaurentPoly, symbol: usize, value: &ParamPoly) -> Result<LaurentPoly> {
    let mut out = LaurentPoly::zero(p.ctx());
    for (&(i, j), c) in p.terms() {
        out = out.add(&LaurentPoly::monomial(p.ctx(), i, j, c.subst_symbol(symbol, value)?))?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverStatus {
    Complete,
    BudgetExhausted,
}

#[derive(Debug, Clone)]
pub struct SolveBudget {
    pub max_seconds: u64,
    pub max_branches: usize,
}

impl Default for SolveBudget {
    fn default() -> Self {
        SolveBudget {
            max_seconds: 600,
            max_branches: 4096,
        }
    }
}

/// One solution of the coefficient system. Assignments may involve the
/// free symbols (a family); every reported solution re-verifies through
/// the residual and side conditions on an independent code path.
#[derive(Debug, Clone)]
pub struct Solution {
    pub assignments: BTreeMap<String, ParamPoly>,
    pub free: Vec<String>,
    pub mu: [ParamPoly; 4],
    pub verified: bool,
    pub conditions: [bool; 3],
    pub conjecture_mu2_mu1_zero: bool,
    pub mu0_zero: bool,
}

impl Solution {
    /// Builds the concrete (A, q1, mu) instance for this solution, with the
    /// free symbols set to the given rationals (unlisted ones stay formal).
    pub fn instantiate(&self, cs: &CoefficientSystem, frees: &[(&str, Rat)]) -> Result<EdpolInstance> {
        let ctx = &cs.ctx;
        let mut a = cs.a.clone();
        let mut q1 = cs.q1.clone();
        let mut mu = [
            cs.mu.m(0).clone(),
            cs.mu.m(1).clone(),
            cs.mu.m(2).clone(),
            cs.mu.m(3).clone(),
        ];
        let subst = |sym: usize, v: &ParamPoly, a: &mut LaurentPoly, q1: &mut LaurentPoly, mu: &mut [ParamPoly; 4]| -> Result<()> {
            *a = subst_laurent(a, sym, v)?;
            *q1 = subst_laurent(q1, sym, v)?;
            for m in mu.iter_mut() {
                *m = m.subst_symbol(sym, v)?;
            }
            Ok(())
        };
        for (name, value) in &self.assignments {
            let idx = ctx.index_of(name).ok_or_else(|| Error::UnknownParameter(name.clone()))?;
            subst(idx, value, &mut a, &mut q1, &mut mu)?;
        }
        for (name, value) in frees {
            let idx = ctx.index_of(name).ok_or_else(|| Error::UnknownParameter(name.to_string()))?;
            let v = ctx.constant(value.clone());
            subst(idx, &v, &mut a, &mut q1, &mut mu)?;
        }
        Ok(EdpolInstance {
            a,
            q1,
            mu: MuVec(mu),
        })
    }
}

#[derive(Debug, Clone)]
pub struct SolutionReport {
    pub degree: u32,
    pub status: SolverStatus,
    pub solutions: Vec<Solution>,
    pub notes: Vec<String>,
}

impl SolutionReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "degree": self.degree,
            "status": match self.status {
                SolverStatus::Complete => "complete",
                SolverStatus::BudgetExhausted => "budget-exhausted",
            },
            "solutions": self.solutions.iter().map(|s| json!({
                "assignments": s.assignments.iter()
                    .map(|(k, v)| (k.clone(), v.to_string()))
                    .collect::<BTreeMap<String, String>>(),
                "free": s.free,
                "mu": [s.mu[0].to_string(), s.mu[1].to_string(), s.mu[2].to_string(), s.mu[3].to_string()],
                "verified": s.verified,
                "conditions": s.conditions,
                "conjecture_mu2_mu1_zero": s.conjecture_mu2_mu1_zero,
                "mu0_zero": s.mu0_zero,
            })).collect::<Vec<_>>(),
            "notes": self.notes,
        })
    }
}

#[derive(Debug, Clone)]
struct Branch {
    eqs: Vec<ParamPoly>,
    assign: BTreeMap<usize, ParamPoly>,
    /// s -> (c0, c1) with c1 s = -c0 assumed and c1 != 0.
    rational: BTreeMap<usize, (ParamPoly, ParamPoly)>,
    tried_groebner: bool,
}

enum Normalized {
    Alive,
    Dead(String),
}

impl Branch {
    fn new(eqs: Vec<ParamPoly>) -> Branch {
        Branch {
            eqs,
            assign: BTreeMap::new(),
            rational: BTreeMap::new(),
            tried_groebner: false,
        }
    }

    fn normalize(&mut self) -> Normalized {
        self.eqs.retain(|e| !e.is_zero());
        self.eqs.sort_by_key(|e| (e.num_terms(), e.to_string()));
        self.eqs.dedup();
        for e in &self.eqs {
            if let Some(c) = e.as_constant() {
                if !c.is_zero() {
                    return Normalized::Dead(format!("inconsistent constant {c}"));
                }
            }
        }
        Normalized::Alive
    }

    fn substitute(&mut self, sym: usize, value: &ParamPoly) -> Result<()> {
        for e in &mut self.eqs {
            *e = e.subst_symbol(sym, value)?;
        }
        for v in self.assign.values_mut() {
            *v = v.subst_symbol(sym, value)?;
        }
        let keys: Vec<usize> = self.rational.keys().copied().collect();
        for k in keys {
            let (c0, c1) = self.rational.get(&k).unwrap().clone();
            self.rational
                .insert(k, (c0.subst_symbol(sym, value)?, c1.subst_symbol(sym, value)?));
        }
        self.assign.insert(sym, value.clone());
        Ok(())
    }

    /// Equation with a nontrivial common monomial factor: splitting off
    /// the content keeps degrees small. Returns (eq index, symbols of the
    /// content, cofactor).
    fn find_content_split(&self, ctx: &Ctx) -> Option<(usize, Vec<usize>, ParamPoly)> {
        for (ei, e) in self.eqs.iter().enumerate() {
            let arity = ctx.symbols().len();
            let mut content = vec![u32::MAX; arity];
            for (exps, _) in e.terms() {
                for (i, &x) in exps.iter().enumerate() {
                    content[i] = content[i].min(x);
                }
            }
            let syms: Vec<usize> = (0..arity).filter(|&i| content[i] > 0 && content[i] != u32::MAX).collect();
            if syms.is_empty() {
                continue;
            }
            let mono = ctx.term(
                (0..arity).map(|i| if content[i] == u32::MAX { 0 } else { content[i] }).collect(),
                Rat::new(1.into(), 1.into()),
            );
            let cofactor = e.exact_div(&mono).expect("content divides");
            return Some((ei, syms, cofactor));
        }
        None
    }

    /// Equation linear in a symbol with a nonzero rational leading
    /// coefficient: the zero-branching move.
    fn find_linear_const(&self) -> Option<(usize, usize, ParamPoly)> {
        for (ei, e) in self.eqs.iter().enumerate() {
            for &s in &e.occurring_symbols() {
                if e.degree_in(s) == Some(1) {
                    let coeffs = e.coeffs_in(s);
                    if let Some(c1) = coeffs[1].as_constant() {
                        if !c1.is_zero() {
                            let value = coeffs[0].scale(&(-Rat::new(1.into(), 1.into()) / c1));
                            return Some((ei, s, value));
                        }
                    }
                }
            }
        }
        None
    }

    /// Equation involving exactly one symbol: rational-root enumeration.
    fn find_univariate(&self) -> Option<(usize, usize, Vec<Rat>)> {
        for (ei, e) in self.eqs.iter().enumerate() {
            let occ = e.occurring_symbols();
            if occ.len() == 1 {
                let s = occ[0];
                let coeffs: Vec<Rat> = e
                    .coeffs_in(s)
                    .iter()
                    .map(|c| c.as_constant().expect("univariate equation"))
                    .collect();
                return Some((ei, s, rational_roots(&coeffs)));
            }
        }
        None
    }

    /// Equation linear in a symbol with a polynomial coefficient: the
    /// case-splitting move.
    fn find_linear_any(&self) -> Option<(usize, usize)> {
        for (ei, e) in self.eqs.iter().enumerate() {
            for &s in &e.occurring_symbols() {
                if e.degree_in(s) == Some(1) {
                    return Some((ei, s));
                }
            }
        }
        None
    }
}

/// Exact solving over Q. Families with free parameters are reported
/// symbolically; hitting the budget is a status, not a failure.
pub fn solve_system(cs: &CoefficientSystem, budget: &SolveBudget) -> Result<SolutionReport> {
    let ctx = &cs.ctx;
    let start = Instant::now();
    let mut work = vec![Branch::new(cs.equations.clone())];
    let mut leaves: Vec<Branch> = Vec::new();
    let mut notes: Vec<String> = Vec::new();
    let mut status = SolverStatus::Complete;
    let mut visited = 0usize;

    while let Some(mut b) = work.pop() {
        visited += 1;
        if visited > budget.max_branches || start.elapsed().as_secs() >= budget.max_seconds {
            status = SolverStatus::BudgetExhausted;
            notes.push(format!("budget exhausted after {visited} branches"));
            break;
        }
        match b.normalize() {
            Normalized::Dead(reason) => {
                notes.push(reason);
                continue;
            }
            Normalized::Alive => {}
        }
        if b.eqs.is_empty() {
            leaves.push(b);
            continue;
        }
        if let Some((ei, s, value)) = b.find_linear_const() {
            b.eqs.remove(ei);
            b.substitute(s, &value)?;
            work.push(b);
            continue;
        }
        if let Some((ei, syms, cofactor)) = b.find_content_split(ctx) {
            for s in syms {
                let mut child = b.clone();
                child.eqs.remove(ei);
                child.substitute(s, &ctx.zero())?;
                work.push(child);
            }
            let mut rest = b.clone();
            rest.eqs[ei] = cofactor;
            work.push(rest);
            continue;
        }
        if let Some((ei, s, roots)) = b.find_univariate() {
            if roots.is_empty() {
                notes.push(format!(
                    "no rational solutions: {} has no rational root in {}",
                    b.eqs[ei],
                    ctx.symbols()[s]
                ));
                continue;
            }
            for root in roots {
                let mut child = b.clone();
                child.eqs.remove(ei);
                child.substitute(s, &ctx.constant(root))?;
                work.push(child);
            }
            continue;
        }
        if let Some((ei, s)) = b.find_linear_any() {
            let coeffs = b.eqs[ei].coeffs_in(s);
            let (c0, c1) = (coeffs[0].clone(), coeffs[1].clone());
            if c0.is_zero() {
                // c1 * s = 0: either c1 vanishes or s does
                let mut vanish = b.clone();
                vanish.eqs.remove(ei);
                vanish.eqs.push(c1);
                work.push(vanish);
                let mut szero = b.clone();
                szero.eqs.remove(ei);
                szero.substitute(s, &ctx.zero())?;
                work.push(szero);
                continue;
            }
            // branch 1: the coefficient vanishes, forcing the constant too
            let mut vanish = b.clone();
            vanish.eqs.remove(ei);
            vanish.eqs.push(c1.clone());
            vanish.eqs.push(c0.clone());
            work.push(vanish);
            // branch 2: coefficient nonzero, eliminate s by cross-multiplying
            let mut elim = b.clone();
            elim.eqs.remove(ei);
            let mut new_eqs = Vec::new();
            for e in &elim.eqs {
                let deg = e.degree_in(s).unwrap_or(0);
                if deg == 0 {
                    new_eqs.push(e.clone());
                    continue;
                }
                let parts = e.coeffs_in(s);
                let mut acc = ctx.zero();
                let neg_c0 = c0.neg();
                for (i, part) in parts.iter().enumerate() {
                    let term = part.mul(&neg_c0.pow(i as u32))?.mul(&c1.pow((deg as usize - i) as u32))?;
                    acc = acc.add(&term)?;
                }
                new_eqs.push(acc);
            }
            elim.eqs = new_eqs;
            elim.rational.insert(s, (c0, c1));
            work.push(elim);
            continue;
        }
        // no move: one Buchberger attempt, then give up honestly
        if !b.tried_groebner {
            b.tried_groebner = true;
            let order = cs.lex_order_mu0_last();
            match groebner(ctx, &order, &b.eqs, &GroebnerBudget::default())? {
                GroebnerOutcome::Complete(basis) => {
                    b.eqs = basis;
                    work.push(b);
                    continue;
                }
                GroebnerOutcome::Exhausted { .. } => {}
            }
        }
        status = SolverStatus::BudgetExhausted;
        notes.push(format!(
            "stuck branch with {} equations, e.g. {}",
            b.eqs.len(),
            b.eqs[0]
        ));
    }

    let mut solutions: Vec<Solution> = Vec::new();
    for leaf in leaves {
        if let Some(sol) = finish_leaf(cs, leaf, &mut notes)? {
            if !solutions.iter().any(|s| s.assignments == sol.assignments) {
                solutions.push(sol);
            }
        }
    }
    solutions.sort_by_key(|s| format!("{:?}", s.assignments));
    Ok(SolutionReport {
        degree: cs.d,
        status,
        solutions,
        notes,
    })
}

/// Resolves rational back-substitutions, applies the assignments to the
/// symbolic A, q1 and mu, and re-verifies.
fn finish_leaf(cs: &CoefficientSystem, mut leaf: Branch, notes: &mut Vec<String>) -> Result<Option<Solution>> {
    let ctx = &cs.ctx;
    // resolve s = -c0/c1 entries; their coefficients were kept substituted
    let mut pending: Vec<usize> = leaf.rational.keys().copied().collect();
    let mut guard = 0;
    while !pending.is_empty() {
        guard += 1;
        if guard > 64 {
            notes.push("unresolved rational back-substitution".to_string());
            return Ok(None);
        }
        let mut progressed = false;
        pending.retain(|&s| {
            let (c0, c1) = leaf.rational.get(&s).unwrap().clone();
            if let Some(c1v) = c1.as_constant() {
                if c1v.is_zero() {
                    return true; // contradiction with the nonzero assumption
                }
                let value = c0.scale(&(-Rat::new(1.into(), 1.into()) / c1v));
                leaf.substitute(s, &value).expect("same context");
                progressed = true;
                false
            } else if let Ok(q) = c0.exact_div(&c1) {
                let value = q.neg();
                leaf.substitute(s, &value).expect("same context");
                progressed = true;
                false
            } else {
                true
            }
        });
        if !progressed && !pending.is_empty() {
            notes.push("rational back-substitution does not resolve to a polynomial".to_string());
            return Ok(None);
        }
    }

    let mut a = cs.a.clone();
    let mut q1 = cs.q1.clone();
    let mut mu = [
        cs.mu.m(0).clone(),
        cs.mu.m(1).clone(),
        cs.mu.m(2).clone(),
        cs.mu.m(3).clone(),
    ];
    for (&s, v) in &leaf.assign {
        a = subst_laurent(&a, s, v)?;
        q1 = subst_laurent(&q1, s, v)?;
        for m in &mut mu {
            *m = m.subst_symbol(s, v)?;
        }
    }
    let inst = EdpolInstance {
        a,
        q1,
        mu: MuVec(mu.clone()),
    };
    let verified = edpol_residual(&inst)?.is_zero();
    let conditions = check_conditions(&inst);
    let assigned: BTreeMap<String, ParamPoly> = leaf
        .assign
        .iter()
        .map(|(&s, v)| (ctx.symbols()[s].clone(), v.clone()))
        .collect();
    let free: Vec<String> = cs
        .unknowns
        .iter()
        .filter(|u| !assigned.contains_key(*u))
        .cloned()
        .collect();
    Ok(Some(Solution {
        assignments: assigned,
        free,
        conjecture_mu2_mu1_zero: mu[2].is_zero() && mu[1].is_zero(),
        mu0_zero: mu[0].is_zero(),
        mu,
        verified,
        conditions,
    }))
}

/// Runs generate/solve for every degree up to `d_max`, annotating each
/// solution with the scan predicates. `restricted` presets mu1 = mu2 = 0.
pub fn conjecture_scan(d_max: u32, budget: &SolveBudget, restricted: bool) -> Result<Vec<SolutionReport>> {
    let mut out = Vec::new();
    for d in 2..=d_max {
        let cs = if restricted {
            generate_system_with(d, &[("mu1", Rat::zero()), ("mu2", Rat::zero())])?
        } else {
            generate_system(d)?
        };
        out.push(solve_system(&cs, budget)?);
    }
    Ok(out)
}
