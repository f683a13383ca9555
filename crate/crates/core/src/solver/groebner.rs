//! Buchberger's algorithm over Q with a lexicographic order given by an
//! explicit symbol priority. Small exact systems only: the engine favors
//! correctness and honest budget reporting over raw speed.

use std::time::Instant;

use num_traits::One;

use crate::error::Result;
use crate::param::{Ctx, ParamPoly};
use crate::rat::Rat;

/// Symbol indices from most significant to least.
pub type LexOrder = Vec<usize>;

#[derive(Debug, Clone)]
pub struct GroebnerBudget {
    pub max_s_pairs: usize,
    pub max_seconds: Option<u64>,
}

impl Default for GroebnerBudget {
    fn default() -> Self {
        GroebnerBudget {
            max_s_pairs: 20_000,
            max_seconds: Some(120),
        }
    }
}

#[derive(Debug, Clone)]
pub enum GroebnerOutcome {
    /// Reduced basis: monic, fully inter-reduced.
    Complete(Vec<ParamPoly>),
    /// Budget ran out after processing the given number of S-pairs.
    Exhausted { partial: Vec<ParamPoly>, processed: usize },
}

fn cmp_exps(order: &LexOrder, a: &[u32], b: &[u32]) -> std::cmp::Ordering {
    for &i in order {
        match a[i].cmp(&b[i]) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

fn leading(order: &LexOrder, p: &ParamPoly) -> Option<(Vec<u32>, Rat)> {
    p.terms()
        .max_by(|(ea, _), (eb, _)| cmp_exps(order, ea, eb))
        .map(|(e, c)| (e.clone(), c.clone()))
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn exp_sub(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn exp_lcm(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

/// Head normal form: reduces only the leading term, leaving the tail
/// untouched. Cheap enough for the main Buchberger loop.
fn head_reduce(ctx: &Ctx, order: &LexOrder, p: &ParamPoly, basis: &[ParamPoly]) -> Result<ParamPoly> {
    let mut work = p.clone();
    let leads: Vec<(Vec<u32>, Rat)> = basis.iter().filter_map(|g| leading(order, g)).collect();
    'outer: while !work.is_zero() {
        let (we, wc) = leading(order, &work).unwrap();
        for (g, (ge, gc)) in basis.iter().zip(&leads) {
            if divides(ge, &we) {
                let mono = ctx.term(exp_sub(&we, ge), wc.clone() / gc.clone());
                work = work.sub(&mono.mul(g)?)?;
                continue 'outer;
            }
        }
        break;
    }
    Ok(work)
}

/// Full normal form of `p` modulo `basis`.
pub fn reduce(ctx: &Ctx, order: &LexOrder, p: &ParamPoly, basis: &[ParamPoly]) -> Result<ParamPoly> {
    let mut rem = ctx.zero();
    let mut work = p.clone();
    let leads: Vec<(Vec<u32>, Rat)> = basis
        .iter()
        .filter_map(|g| leading(order, g))
        .collect();
    'outer: while !work.is_zero() {
        let (we, wc) = leading(order, &work).unwrap();
        for (g, (ge, gc)) in basis.iter().zip(&leads) {
            if divides(ge, &we) {
                let mono = ctx.term(exp_sub(&we, ge), wc.clone() / gc.clone());
                work = work.sub(&mono.mul(g)?)?;
                continue 'outer;
            }
        }
        // leading term irreducible: move it to the remainder
        let mono = ctx.term(we.clone(), wc.clone());
        rem = rem.add(&mono)?;
        work = work.sub(&mono)?;
    }
    Ok(rem)
}

/// Buchberger with normal selection (smallest lcm first), the product
/// criterion and a processing budget. New elements are made monic and
/// fully reduced to keep coefficients tame.
pub fn groebner(
    ctx: &Ctx,
    order: &LexOrder,
    generators: &[ParamPoly],
    budget: &GroebnerBudget,
) -> Result<GroebnerOutcome> {
    let start = Instant::now();
    let mut basis: Vec<ParamPoly> = Vec::new();
    for g in generators {
        if g.is_zero() {
            continue;
        }
        let nf = head_reduce(ctx, order, g, &basis)?;
        if !nf.is_zero() {
            let (_, lc) = leading(order, &nf).unwrap();
            basis.push(nf.scale(&(Rat::one() / lc)));
        }
    }
    if basis.is_empty() {
        return Ok(GroebnerOutcome::Complete(Vec::new()));
    }
    let lcm_keyed = |order: &LexOrder, basis: &[ParamPoly], i: usize, k: usize| -> (u32, Vec<u32>) {
        let le_i = leading(order, &basis[i]).unwrap().0;
        let le_k = leading(order, &basis[k]).unwrap().0;
        let l = exp_lcm(&le_i, &le_k);
        (l.iter().sum(), l)
    };
    let mut pairs: Vec<(u32, Vec<u32>, usize, usize)> = Vec::new();
    for i in 0..basis.len() {
        for k in 0..i {
            let (deg, l) = lcm_keyed(order, &basis, k, i);
            pairs.push((deg, l, k, i));
        }
    }
    let mut processed = 0usize;
    loop {
        // normal selection: smallest total degree, then smallest lcm
        pairs.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| cmp_exps(order, &b.1, &a.1)));
        let Some((_, _, i, k)) = pairs.pop() else {
            break;
        };
        if processed >= budget.max_s_pairs
            || budget
                .max_seconds
                .is_some_and(|s| start.elapsed().as_secs() >= s)
        {
            return Ok(GroebnerOutcome::Exhausted {
                partial: basis,
                processed,
            });
        }
        processed += 1;
        let (le_i, lc_i) = leading(order, &basis[i]).unwrap();
        let (le_k, lc_k) = leading(order, &basis[k]).unwrap();
        // product criterion: coprime leading monomials reduce to zero
        if le_i.iter().zip(&le_k).all(|(a, b)| *a == 0 || *b == 0) {
            continue;
        }
        let lcm = exp_lcm(&le_i, &le_k);
        let mi = ctx.term(exp_sub(&lcm, &le_i), Rat::one() / lc_i);
        let mk = ctx.term(exp_sub(&lcm, &le_k), Rat::one() / lc_k);
        let s = mi.mul(&basis[i])?.sub(&mk.mul(&basis[k])?)?;
        let nf = head_reduce(ctx, order, &s, &basis)?;
        if !nf.is_zero() {
            let (_, lc) = leading(order, &nf).unwrap();
            let nf = nf.scale(&(Rat::one() / lc));
            let le_new = leading(order, &nf).unwrap().0;
            for idx in 0..basis.len() {
                let le_old = leading(order, &basis[idx]).unwrap().0;
                let l = exp_lcm(&le_new, &le_old);
                pairs.push((l.iter().sum(), l, idx, basis.len()));
            }
            basis.push(nf);
        }
    }
    Ok(GroebnerOutcome::Complete(interreduce(ctx, order, basis)?))
}

/// Monic, fully inter-reduced basis, sorted by leading monomial.
fn interreduce(ctx: &Ctx, order: &LexOrder, mut basis: Vec<ParamPoly>) -> Result<Vec<ParamPoly>> {
    // drop elements whose lead is divisible by another lead
    loop {
        let leads: Vec<Vec<u32>> = basis.iter().map(|g| leading(order, g).unwrap().0).collect();
        let mut drop_idx = None;
        'search: for i in 0..basis.len() {
            for k in 0..basis.len() {
                if i != k && divides(&leads[k], &leads[i]) {
                    drop_idx = Some(i);
                    break 'search;
                }
            }
        }
        match drop_idx {
            Some(i) => {
                basis.remove(i);
            }
            None => break,
        }
    }
    // reduce each element against the others and normalize
    let mut out: Vec<ParamPoly> = Vec::new();
    for i in 0..basis.len() {
        let others: Vec<ParamPoly> = basis
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, g)| g.clone())
            .collect();
        let mut g = reduce(ctx, order, &basis[i], &others)?;
        if g.is_zero() {
            continue;
        }
        let (_, lc) = leading(order, &g).unwrap();
        g = g.scale(&(Rat::one() / lc));
        out.push(g);
    }
    out.sort_by(|a, b| {
        let la = leading(order, a).unwrap().0;
        let lb = leading(order, b).unwrap().0;
        cmp_exps(order, &la, &lb)
    });
    Ok(out)
}

/// True when every generator reduces to zero against the basis and every
/// S-polynomial of basis pairs does too: the completeness certificate.
pub fn verify_basis(
    ctx: &Ctx,
    order: &LexOrder,
    generators: &[ParamPoly],
    basis: &[ParamPoly],
) -> Result<bool> {
    for g in generators {
        if !reduce(ctx, order, g, basis)?.is_zero() {
            return Ok(false);
        }
    }
    for i in 0..basis.len() {
        for k in 0..i {
            let (le_i, lc_i) = leading(order, &basis[i]).unwrap();
            let (le_k, lc_k) = leading(order, &basis[k]).unwrap();
            let lcm = exp_lcm(&le_i, &le_k);
            let mi = ctx.term(exp_sub(&lcm, &le_i), Rat::one() / lc_i);
            let mk = ctx.term(exp_sub(&lcm, &le_k), Rat::one() / lc_k);
            let s = mi.mul(&basis[i])?.sub(&mk.mul(&basis[k])?)?;
            if !reduce(ctx, order, &s, basis)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Basis elements lying in Q[sym]: the univariate eliminant candidates.
pub fn univariate_in<'a>(basis: &'a [ParamPoly], sym: usize) -> Vec<&'a ParamPoly> {
    basis
        .iter()
        .filter(|g| g.occurring_symbols() == vec![sym] || g.occurring_symbols().is_empty())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::int;

    #[test]
    fn basis_of_univariate_pair() {
        // {x^2 - 1, x - 1} -> {x - 1}
        let ctx = Ctx::new(&["x"]);
        let x = ctx.symbol("x").unwrap();
        let g1 = x.pow(2).sub(&ctx.one()).unwrap();
        let g2 = x.sub(&ctx.one()).unwrap();
        let order = vec![0usize];
        let out = groebner(&ctx, &order, &[g1.clone(), g2.clone()], &GroebnerBudget::default()).unwrap();
        match out {
            GroebnerOutcome::Complete(basis) => {
                assert_eq!(basis, vec![g2.clone()]);
                assert!(verify_basis(&ctx, &order, &[g1, g2], &basis).unwrap());
            }
            _ => panic!("budget should not be hit"),
        }
    }

    #[test]
    fn basis_splits_sum_and_difference() {
        // {u + v, u - v} -> {u, v}
        let ctx = Ctx::new(&["u", "v"]);
        let u = ctx.symbol("u").unwrap();
        let v = ctx.symbol("v").unwrap();
        let g1 = u.add(&v).unwrap();
        let g2 = u.sub(&v).unwrap();
        let order = vec![0usize, 1];
        match groebner(&ctx, &order, &[g1, g2], &GroebnerBudget::default()).unwrap() {
            GroebnerOutcome::Complete(basis) => {
                assert_eq!(basis, vec![v.clone(), u.clone()]);
            }
            _ => panic!("budget should not be hit"),
        }
    }

    #[test]
    fn katsura_like_system_with_certificate() {
        // x + 2y - 1, x^2 + 2y^2 - x: a tiny curved system
        let ctx = Ctx::new(&["x", "y"]);
        let x = ctx.symbol("x").unwrap();
        let y = ctx.symbol("y").unwrap();
        let g1 = x.add(&y.scale(&int(2))).unwrap().sub(&ctx.one()).unwrap();
        let g2 = x.pow(2).add(&y.pow(2).scale(&int(2))).unwrap().sub(&x).unwrap();
        let order = vec![0usize, 1];
        let gens = [g1, g2];
        match groebner(&ctx, &order, &gens, &GroebnerBudget::default()).unwrap() {
            GroebnerOutcome::Complete(basis) => {
                assert!(verify_basis(&ctx, &order, &gens, &basis).unwrap());
                // the eliminant in y is 6y^2 - 2y = 2y(3y - 1)
                let uni = univariate_in(&basis, 1);
                assert_eq!(uni.len(), 1);
                let expect = y.pow(2).sub(&y.scale(&crate::rat::rat(1, 3))).unwrap();
                assert_eq!(*uni[0], expect);
            }
            _ => panic!("budget should not be hit"),
        }
    }

    #[test]
    fn budget_is_a_status_not_a_failure() {
        let ctx = Ctx::new(&["x", "y", "z"]);
        let x = ctx.symbol("x").unwrap();
        let y = ctx.symbol("y").unwrap();
        let z = ctx.symbol("z").unwrap();
        // cyclic-3
        let g1 = x.add(&y).unwrap().add(&z).unwrap();
        let g2 = x.mul(&y).unwrap().add(&y.mul(&z).unwrap()).unwrap().add(&z.mul(&x).unwrap()).unwrap();
        let g3 = x.mul(&y).unwrap().mul(&z).unwrap().sub(&ctx.one()).unwrap();
        let tiny = GroebnerBudget {
            max_s_pairs: 1,
            max_seconds: None,
        };
        match groebner(&ctx, &vec![0, 1, 2], &[g1, g2, g3], &tiny).unwrap() {
            GroebnerOutcome::Exhausted { processed, .. } => assert_eq!(processed, 1),
            _ => panic!("tiny budget must exhaust"),
        }
    }
}
