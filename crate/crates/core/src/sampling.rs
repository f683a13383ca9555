//! Deterministic random generation of test data: rationals, Laurent
//! polynomials, directions, and pairs with the normalized leading shape.
//! A fixed-seed SplitMix64 keeps every randomized suite reproducible
//! across platforms and dependency versions.

use crate::grading::Direction;
use crate::jacobian::MuVec;
use crate::laurent::LaurentPoly;
use crate::param::Ctx;
use crate::rat::{rat, Rat};

pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    /// Uniform in [lo, hi] inclusive.
    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    /// Small nonzero-biased rational with denominator in 1..=3.
    pub fn rat(&mut self) -> Rat {
        rat(self.int_in(-9, 9), self.int_in(1, 3))
    }

    pub fn nonzero_rat(&mut self) -> Rat {
        loop {
            let r = self.rat();
            if !num_traits::Zero::is_zero(&r) {
                return r;
            }
        }
    }
}

/// Random Laurent polynomial with rational coefficients and exponents in
/// the given inclusive ranges. May return fewer than `terms` distinct
/// monomials; never returns zero coefficients.
pub fn laurent(rng: &mut Rng, ctx: &Ctx, terms: usize, x_range: (i64, i64), y_range: (i64, i64)) -> LaurentPoly {
    let mut out = LaurentPoly::zero(ctx);
    for _ in 0..terms {
        let i = rng.int_in(x_range.0, x_range.1);
        let j = rng.int_in(y_range.0, y_range.1);
        let c = rng.nonzero_rat();
        out = out
            .add(&LaurentPoly::monomial(ctx, i, j, ctx.constant(c)))
            .expect("same context");
    }
    out
}

/// Random nonzero Laurent polynomial.
pub fn laurent_nonzero(
    rng: &mut Rng,
    ctx: &Ctx,
    terms: usize,
    x_range: (i64, i64),
    y_range: (i64, i64),
) -> LaurentPoly {
    loop {
        let p = laurent(rng, ctx, terms, x_range, y_range);
        if !p.is_zero() {
            return p;
        }
    }
}

/// Random polynomial in K[x, y].
pub fn polynomial(rng: &mut Rng, ctx: &Ctx, terms: usize, max_deg: i64) -> LaurentPoly {
    laurent(rng, ctx, terms, (0, max_deg), (0, max_deg))
}

/// Random primitive direction with entries in [-bound, bound].
pub fn direction(rng: &mut Rng, bound: i64) -> Direction {
    loop {
        let rho = rng.int_in(-bound, bound);
        let sigma = rng.int_in(-bound, bound);
        if rho != 0 || sigma != 0 {
            return Direction::d(rho, sigma);
        }
    }
}

/// Random mu vector of rationals, mu0 guaranteed nonzero.
pub fn mu_with_unit(rng: &mut Rng, ctx: &Ctx) -> MuVec {
    MuVec::from_rats(
        ctx,
        [rng.nonzero_rat(), rng.rat(), rng.rat(), rng.rat()],
    )
}

/// Random y-polynomial of degree at most `deg` with the given constant
/// term and (optionally) a vanishing linear term.
pub fn y_poly_with(rng: &mut Rng, ctx: &Ctx, deg: i64, constant: &Rat, kill_linear: bool) -> LaurentPoly {
    let mut p = LaurentPoly::constant(ctx, constant.clone());
    for j in 1..=deg {
        if j == 1 && kill_linear {
            continue;
        }
        let c = rng.rat();
        p = p
            .add(&LaurentPoly::monomial(ctx, 0, j, ctx.constant(c)))
            .expect("same context");
    }
    p
}

/// A random pair with the normalized leading structure
/// P = x^3 y + x^2 p2 + x p1 + p0, Q = x^2 y + x q1 + q0, where
/// p2(0) = q1(0) = mu3 and p2'(0) = 0; `normalized` additionally forces
/// q1'(0) = 0. Returns (P, Q, mu3).
pub fn structured_pair(rng: &mut Rng, ctx: &Ctx, normalized: bool) -> (LaurentPoly, LaurentPoly, Rat) {
    let mu3 = rng.rat();
    let p2 = y_poly_with(rng, ctx, 4, &mu3, true);
    let c1 = rng.rat();
    let p1 = y_poly_with(rng, ctx, 4, &c1, false);
    let c0 = rng.rat();
    let p0 = y_poly_with(rng, ctx, 5, &c0, false);
    let q1 = y_poly_with(rng, ctx, 3, &mu3, normalized);
    let cq = rng.rat();
    let q0 = y_poly_with(rng, ctx, 4, &cq, false);
    let one = ctx.one();
    let p = LaurentPoly::monomial(ctx, 3, 1, one.clone())
        .add(&p2.mul_monomial(2, 0, &one))
        .unwrap()
        .add(&p1.mul_monomial(1, 0, &one))
        .unwrap()
        .add(&p0)
        .unwrap();
    let q = LaurentPoly::monomial(ctx, 2, 1, one.clone())
        .add(&q1.mul_monomial(1, 0, &one))
        .unwrap()
        .add(&q0)
        .unwrap();
    (p, q, mu3)
}

/// Random instance data (A, q1, mu) with rational entries; not a solution
/// in general.
pub fn edpol_instance(rng: &mut Rng, ctx: &Ctx) -> crate::jacobian::EdpolInstance {
    let ca = rng.rat();
    let a = y_poly_with(rng, ctx, 6, &ca, false);
    let cq = rng.rat();
    let q1 = y_poly_with(rng, ctx, 3, &cq, false);
    crate::jacobian::EdpolInstance {
        a,
        q1,
        mu: MuVec::from_rats(ctx, [rng.rat(), rng.rat(), rng.rat(), rng.rat()]),
    }
}
