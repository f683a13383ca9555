//! Ring morphisms given by images of x and y.
//!
//! Covers the elementary plane automorphisms used throughout: the quarter
//! turns (x, y) -> (y, -x) and (x, y) -> (-y, x), the Laurent frame change
//! x -> x^-1, y -> x^3 y, and the shear family x -> x, y -> y - f(x).
//! Applying a map to a Laurent polynomial may leave the Laurent ring, so
//! images are `FracElem`.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::frac::FracElem;
use crate::laurent::{LaurentPoly, Var};
use crate::param::Ctx;

#[derive(Debug, Clone)]
pub struct SubstMap {
    name: String,
    x_image: FracElem,
    y_image: FracElem,
}

impl SubstMap {
    pub fn new(name: &str, x_image: FracElem, y_image: FracElem) -> SubstMap {
        SubstMap {
            name: name.to_string(),
            x_image,
            y_image,
        }
    }

    pub fn identity(ctx: &Ctx) -> SubstMap {
        SubstMap::new(
            "id",
            FracElem::from_laurent(LaurentPoly::var(ctx, Var::X)),
            FracElem::from_laurent(LaurentPoly::var(ctx, Var::Y)),
        )
    }

    /// x -> y, y -> -x (Jacobian 1).
    pub fn quarter_turn(ctx: &Ctx) -> SubstMap {
        SubstMap::new(
            "quarter_turn",
            FracElem::from_laurent(LaurentPoly::var(ctx, Var::Y)),
            FracElem::from_laurent(LaurentPoly::var(ctx, Var::X).neg()),
        )
    }

    /// x -> -y, y -> x (Jacobian 1), the inverse quarter turn.
    pub fn quarter_turn_back(ctx: &Ctx) -> SubstMap {
        SubstMap::new(
            "quarter_turn_back",
            FracElem::from_laurent(LaurentPoly::var(ctx, Var::Y).neg()),
            FracElem::from_laurent(LaurentPoly::var(ctx, Var::X)),
        )
    }

    /// x -> x^-1, y -> x^3 y (Jacobian -x); an involution.
    pub fn x_inversion(ctx: &Ctx) -> SubstMap {
        SubstMap::new(
            "x_inversion",
            FracElem::from_laurent(LaurentPoly::monomial(ctx, -1, 0, ctx.one())),
            FracElem::from_laurent(LaurentPoly::monomial(ctx, 3, 1, ctx.one())),
        )
    }

    /// x -> x, y -> y - shift (Jacobian 1).
    pub fn y_shift(name: &str, shift: &LaurentPoly) -> SubstMap {
        let ctx = shift.ctx();
        SubstMap::new(
            name,
            FracElem::from_laurent(LaurentPoly::var(ctx, Var::X)),
            FracElem::from_laurent(LaurentPoly::var(ctx, Var::Y).sub(shift).expect("same context")),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn x_image(&self) -> &FracElem {
        &self.x_image
    }

    pub fn y_image(&self) -> &FracElem {
        &self.y_image
    }

    /// Applies the map to a Laurent polynomial. Denominators appear exactly
    /// when a negative exponent hits a non-monomial image.
    pub fn apply(&self, p: &LaurentPoly) -> Result<FracElem> {
        let ctx = p.ctx();
        let mut xp: BTreeMap<i64, FracElem> = BTreeMap::new();
        let mut yp: BTreeMap<i64, FracElem> = BTreeMap::new();
        let mut out = FracElem::zero(ctx);
        for ((i, j), c) in p.terms() {
            if !xp.contains_key(i) {
                xp.insert(*i, self.x_image.powi(*i)?);
            }
            if !yp.contains_key(j) {
                yp.insert(*j, self.y_image.powi(*j)?);
            }
            let term = xp[i]
                .mul(&yp[j])?
                .mul_laurent(&LaurentPoly::monomial(ctx, 0, 0, c.clone()))?;
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Applies the map to a fraction: image of numerator over images of the
    /// denominator factors.
    pub fn apply_frac(&self, f: &FracElem) -> Result<FracElem> {
        let mut out = self.apply(f.numerator())?;
        for (fac, e) in f.denom_factors() {
            let img = self.apply(fac)?;
            out = out.mul(&img.powi(-(*e as i64))?)?;
        }
        Ok(out)
    }

    /// The Jacobian [phi(x), phi(y)] of the map.
    pub fn jacobian(&self) -> Result<FracElem> {
        let xx = self.x_image.derive(Var::X)?;
        let xy = self.x_image.derive(Var::Y)?;
        let yx = self.y_image.derive(Var::X)?;
        let yy = self.y_image.derive(Var::Y)?;
        xx.mul(&yy)?.sub(&xy.mul(&yx)?)
    }
}
