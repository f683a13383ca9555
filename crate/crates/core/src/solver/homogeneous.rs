//! Quotient-ring verification of the homogeneous solution family at
//! mu = 0: A = y^(2j+2) and q1 = 2 r y^(j+1) where r generates
//! Q[r] / (3 r^4 - 6 r^2 - (4j+1)). The relation is exactly what makes
//! 6 (A - q1^2/4)^2 = 4 y A A' collapse, and the four-equation residuals
//! pin the remaining data p2, p1, q0 = lambda y^(2j+1), p0 = lambda1
//! y^(3j+1): lambda and lambda1 enter linearly and are solved for, after
//! which the last equation must vanish identically in the quotient ring.

use crate::error::{Error, Result};
use crate::grading::{vdeg, vdeg_min, Direction};
use crate::jacobian::{edpol_residual, EdpolInstance, MuVec, SystemData};
use crate::laurent::LaurentPoly;
use crate::param::{Ctx, ParamPoly};
use crate::rat::{int, rat};
use crate::solver::subst_laurent;

#[derive(Debug, Clone)]
pub struct HomogeneousCheck {
    pub j: i64,
    /// The monic rewrite r^4 = 2 r^2 + (4j+1)/3 as a display string.
    pub relation: String,
    pub edpol_zero: bool,
    /// 3 (r^2 - 1)^2 - (4j + 4) reduces to zero.
    pub sqrt_identity: bool,
    pub residuals_zero: [bool; 4],
    pub homogeneous_p: bool,
    pub homogeneous_q: bool,
    /// Replacing r by the rational 1 must break the equation.
    pub negative_control_nonzero: bool,
    pub lambda: String,
    pub lambda1: String,
}

impl HomogeneousCheck {
    pub fn all_pass(&self) -> bool {
        self.edpol_zero
            && self.sqrt_identity
            && self.residuals_zero.iter().all(|&b| b)
            && self.homogeneous_p
            && self.homogeneous_q
            && self.negative_control_nonzero
    }
}

fn quotient_ctx(j: i64) -> Result<Ctx> {
    // 3 r^4 - 6 r^2 - (4j+1) = 0, stored monic
    Ctx::with_relation(
        &["r", "lambda", "lambda1"],
        "r",
        vec![rat(4 * j + 1, 3), rat(0, 1), rat(2, 1), rat(0, 1)],
    )
}

pub fn homogeneous_family_check(j: i64) -> Result<HomogeneousCheck> {
    if j < 1 {
        return Err(Error::Unsupported("j must be at least 1".to_string()));
    }
    let ctx = quotient_ctx(j)?;
    let r = ctx.symbol("r")?;
    let lambda = ctx.symbol("lambda")?;
    let lambda1 = ctx.symbol("lambda1")?;

    let a = LaurentPoly::monomial(&ctx, 0, 2 * j + 2, ctx.one());
    let q1 = LaurentPoly::monomial(&ctx, 0, j + 1, r.scale(&int(2)));
    let mu = MuVec::zero(&ctx);
    let edpol_zero = edpol_residual(&EdpolInstance {
        a: a.clone(),
        q1: q1.clone(),
        mu: mu.clone(),
    })?
    .is_zero();

    // (r^2 - 1)^2 = (4j+4)/3 in the quotient ring
    let s = r.pow(2).sub(&ctx.one())?;
    let sqrt_identity = s
        .pow(2)
        .scale(&int(3))
        .sub(&ctx.constant(int(4 * j + 4)))?
        .is_zero();

    // p2 and p1 forced by the first equation and by the definition of A
    let p2 = LaurentPoly::monomial(&ctx, 0, j + 1, r.scale(&rat(3 * j + 2, j)));
    let c = ctx.one().add(&r.pow(2).scale(&rat(3 * j + 4, j)))?;
    let p1 = LaurentPoly::monomial(&ctx, 0, 2 * j + 1, c);
    let q0 = LaurentPoly::monomial(&ctx, 0, 2 * j + 1, lambda);
    let p0 = LaurentPoly::monomial(&ctx, 0, 3 * j + 1, lambda1);
    let sys = SystemData {
        p0,
        p1,
        p2,
        q0,
        q1,
        mu,
    };
    let res = sys.residuals()?;

    // lambda and lambda1 enter linearly; solve for them and substitute
    let lam_idx = ctx.index_of("lambda").unwrap();
    let lam1_idx = ctx.index_of("lambda1").unwrap();
    let lam_value = solve_linear(&res[1].coeff(0, 2 * j + 1), lam_idx)?;
    let res = [
        res[0].clone(),
        subst_laurent(&res[1], lam_idx, &lam_value)?,
        subst_laurent(&res[2], lam_idx, &lam_value)?,
        subst_laurent(&res[3], lam_idx, &lam_value)?,
    ];
    let lam1_value = solve_linear(&res[2].coeff(0, 3 * j + 1), lam1_idx)?;
    let res = [
        res[0].clone(),
        res[1].clone(),
        subst_laurent(&res[2], lam1_idx, &lam1_value)?,
        subst_laurent(&res[3], lam1_idx, &lam1_value)?,
    ];
    let residuals_zero = [
        res[0].is_zero(),
        res[1].is_zero(),
        res[2].is_zero(),
        res[3].is_zero(),
    ];

    // homogeneity of the assembled pair under (j, 1)
    let mut sys2 = sys.clone();
    sys2.q0 = subst_laurent(&sys.q0, lam_idx, &lam_value)?;
    sys2.p0 = subst_laurent(&sys.p0, lam1_idx, &lam1_value)?;
    let (p_asm, q_asm) = sys2.assemble()?;
    let dj1 = Direction::d(j, 1);
    let homogeneous_p = vdeg(&p_asm, dj1)? == vdeg_min(&p_asm, dj1)?;
    let homogeneous_q = vdeg(&q_asm, dj1)? == vdeg_min(&q_asm, dj1)?;

    // negative control: a rational stand-in for r cannot satisfy the relation
    let plain = Ctx::standard();
    let a_plain = LaurentPoly::monomial(&plain, 0, 2 * j + 2, plain.one());
    let q1_plain = LaurentPoly::monomial(&plain, 0, j + 1, plain.int(2));
    let negative_control_nonzero = !edpol_residual(&EdpolInstance {
        a: a_plain,
        q1: q1_plain,
        mu: MuVec::zero(&plain),
    })?
    .is_zero();

    Ok(HomogeneousCheck {
        j,
        relation: format!("3*r^4 - 6*r^2 - {} = 0", 4 * j + 1),
        edpol_zero,
        sqrt_identity,
        residuals_zero,
        homogeneous_p,
        homogeneous_q,
        negative_control_nonzero,
        lambda: lam_value.to_string(),
        lambda1: lam1_value.to_string(),
    })
}

/// Solves a ParamPoly linear in the given symbol with rational leading
/// coefficient.
fn solve_linear(p: &ParamPoly, sym: usize) -> Result<ParamPoly> {
    if p.degree_in(sym) != Some(1) {
        return Err(Error::Unsupported(format!(
            "expected an equation linear in symbol {sym}, got {p}"
        )));
    }
    let coeffs = p.coeffs_in(sym);
    let c1 = coeffs[1]
        .as_constant()
        .ok_or_else(|| Error::Unsupported("nonlinear coupling".to_string()))?;
    Ok(coeffs[0].scale(&(-int(1) / c1)))
}
