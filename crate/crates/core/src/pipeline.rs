//! The six-stage automorphism pipeline: starting from a pair
//! P = x^3 y + ..., Q = x^2 y + ... with the normalized bracket shape,
//! apply in order
//!
//!   1. x-inversion            (x -> x^-1, y -> x^3 y)
//!   2. the mu-shear           (y -> y - (mu0 x + mu1 + mu2 x^-1 + mu3 x^-2))
//!   3. the inverse quarter turn (x -> -y, y -> x)
//!   4. x-inversion again
//!   5. the x^-4 shear         (y -> y - (1/mu0) x^-4)
//!   6. correction shears      (y -> y - lambda_k x^-k, k in {3, 2, 1})
//!
//! checking the documented bracket, direction-set, edge-endpoint and
//! leading-form-proportionality facts at every stage. The pipeline is a
//! verifier as much as a constructor: every expectation is recorded as a
//! `StageCheck`, and in strict mode the first failing check halts the run
//! with a diagnostic containing both sides. Audit mode records failures
//! and keeps going, which is how off-contract inputs are explored.
//!
//! State is carried as `FracElem` because seeds with negative y-powers
//! leave the Laurent ring under the shears; membership in K[x, y] is
//! itself one of the recorded checks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frac::FracElem;
use crate::grading::{
    directions, edge_endpoints, leading_form, polygon_snapshot, pred_dir, succ_dir, trailing_form,
    Direction, PolygonSnapshot,
};
use crate::jacobian::{bracket_frac, MuVec};
use crate::laurent::LaurentPoly;
use crate::param::Ctx;
use crate::rat::{fmt_rat, Rat};
use crate::subst::SubstMap;

#[derive(Debug, Clone, Serialize)]
pub struct StageCheck {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Stage {
    pub index: usize,
    pub name: String,
    pub p: String,
    pub q: String,
    pub in_l: bool,
    pub checks: Vec<StageCheck>,
    pub polygon_p: Option<PolygonSnapshot>,
    pub polygon_q: Option<PolygonSnapshot>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Correction {
    pub k: i64,
    pub lambda: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct FinalReport {
    pub in_l: bool,
    pub degrees: Option<(i64, i64)>,
    pub bracket: String,
    pub bracket_is_nonzero_constant: bool,
    /// True exactly when the final pair lies in K[x, y] with a nonzero
    /// constant bracket.
    pub counterexample: bool,
    pub corrections: Vec<Correction>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineRun {
    pub j: i64,
    pub m: i64,
    pub n: i64,
    pub mu: [String; 4],
    pub map_mu: [String; 4],
    pub stages: Vec<Stage>,
    pub scalars: Vec<(String, String)>,
    pub report: FinalReport,
    pub all_checks_pass: bool,
}

impl PipelineRun {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable trace")
    }

    pub fn failed_checks(&self) -> Vec<&StageCheck> {
        self.stages
            .iter()
            .flat_map(|s| s.checks.iter())
            .filter(|c| !c.pass)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    /// Record failing checks and continue instead of halting.
    pub audit: bool,
    /// mu vector parametrizing the shears and expected forms, when it
    /// differs from the bracket mu of the input pair.
    pub map_mu: Option<MuVec>,
    pub max_corrections: u32,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            audit: false,
            map_mu: None,
            max_corrections: 3,
        }
    }
}

pub struct Pipeline {
    ctx: Ctx,
    j: i64,
    m: i64,
    n: i64,
    mu: MuVec,
    map_mu: MuVec,
    options: PipelineOptions,
    p: FracElem,
    q: FracElem,
    stages: Vec<Stage>,
    scalars: Vec<(String, String)>,
    corrections: Vec<Correction>,
}

pub fn run_pipeline(
    p: &LaurentPoly,
    q: &LaurentPoly,
    mu: &MuVec,
    j: i64,
    options: PipelineOptions,
) -> Result<PipelineRun> {
    let mut pipe = Pipeline::start(p, q, mu, j, options)?;
    pipe.stage1()?;
    pipe.stage2()?;
    pipe.stage3()?;
    pipe.stage4()?;
    pipe.stage5()?;
    pipe.stage6()
}

impl Pipeline {
    pub fn start(
        p: &LaurentPoly,
        q: &LaurentPoly,
        mu: &MuVec,
        j: i64,
        options: PipelineOptions,
    ) -> Result<Pipeline> {
        if j < 1 {
            return Err(Error::BadPipelineInput("j must be at least 1".to_string()));
        }
        let ctx = p.ctx().clone();
        let map_mu = options.map_mu.clone().unwrap_or_else(|| mu.clone());
        let mut pipe = Pipeline {
            ctx,
            j,
            m: 3 * j + 1,
            n: 2 * j + 1,
            mu: mu.clone(),
            map_mu,
            options,
            p: FracElem::from_laurent(p.clone()),
            q: FracElem::from_laurent(q.clone()),
            stages: Vec::new(),
            scalars: Vec::new(),
            corrections: Vec::new(),
        };
        pipe.verify_input_shape()?;
        Ok(pipe)
    }

    fn open_stage(&self, index: usize, name: &str) -> Stage {
        Stage {
            index,
            name: name.to_string(),
            p: self.p.to_string(),
            q: self.q.to_string(),
            in_l: self.p.is_polynomial() && self.q.is_polynomial(),
            checks: Vec::new(),
            polygon_p: self.p.as_laurent().and_then(|l| polygon_snapshot(l).ok()),
            polygon_q: self.q.as_laurent().and_then(|l| polygon_snapshot(l).ok()),
        }
    }

    fn record(&mut self, stage: &mut Stage, name: &str, expected: String, actual: String, pass: bool) -> Result<()> {
        stage.checks.push(StageCheck {
            name: name.to_string(),
            expected: expected.clone(),
            actual: actual.clone(),
            pass,
        });
        if !pass && !self.options.audit {
            self.stages.push(stage.clone());
            return Err(Error::CheckFailed {
                name: name.to_string(),
                expected,
                actual,
            });
        }
        Ok(())
    }

    fn check_frac_eq(&mut self, stage: &mut Stage, name: &str, expected: &FracElem, actual: &FracElem) -> Result<()> {
        let pass = actual.semantic_eq(expected)?;
        self.record(stage, name, expected.to_string(), actual.to_string(), pass)
    }

    fn check_laurent_eq(
        &mut self,
        stage: &mut Stage,
        name: &str,
        expected: &LaurentPoly,
        owner: &FracElem,
        project: impl Fn(&LaurentPoly) -> Result<LaurentPoly>,
    ) -> Result<()> {
        match owner.as_laurent() {
            None => self.record(
                stage,
                name,
                expected.to_string(),
                "(non-Laurent element)".to_string(),
                false,
            ),
            Some(l) => {
                let actual = project(l)?;
                let pass = actual == *expected;
                self.record(stage, name, expected.to_string(), actual.to_string(), pass)
            }
        }
    }

    fn check_dirs(
        &mut self,
        stage: &mut Stage,
        name: &str,
        owner: &FracElem,
        expected: &[Direction],
    ) -> Result<()> {
        let expected_s = format!("{:?}", expected.iter().map(|d| (d.rho, d.sigma)).collect::<Vec<_>>());
        match owner.as_laurent() {
            None => self.record(stage, name, expected_s, "(non-Laurent element)".to_string(), false),
            Some(l) => {
                let dirs = directions(l)?;
                let pass = dirs == expected;
                let actual = format!("{:?}", dirs.iter().map(|d| (d.rho, d.sigma)).collect::<Vec<_>>());
                self.record(stage, name, expected_s, actual, pass)
            }
        }
    }

    fn check_en(
        &mut self,
        stage: &mut Stage,
        name: &str,
        owner: &FracElem,
        d: Direction,
        expected: (i64, i64),
    ) -> Result<()> {
        match owner.as_laurent() {
            None => self.record(
                stage,
                name,
                format!("{expected:?}"),
                "(non-Laurent element)".to_string(),
                false,
            ),
            Some(l) => {
                let e = edge_endpoints(l, d)?;
                self.record(stage, name, format!("{expected:?}"), format!("{:?}", e.en), e.en == expected)
            }
        }
    }

    /// Verifies that the leading form of `owner` in direction `d` is a
    /// scalar multiple of `r^power`, recording the extracted scalar.
    fn check_proportional(
        &mut self,
        stage: &mut Stage,
        name: &str,
        owner: &FracElem,
        d: Direction,
        r: &LaurentPoly,
        power: u32,
        scalar_label: &str,
    ) -> Result<()> {
        let expected = format!("scalar * ({})^{}", r, power);
        let Some(l) = owner.as_laurent() else {
            return self.record(stage, name, expected, "(non-Laurent element)".to_string(), false);
        };
        let form = leading_form(l, d)?;
        let rp = r.pow(power);
        match form.exact_divide(&rp) {
            Ok(qt) if qt.support() == vec![(0, 0)] => {
                let scalar = qt.coeff(0, 0);
                self.scalars.push((scalar_label.to_string(), scalar.to_string()));
                self.record(stage, name, expected, format!("{scalar} * (r)^{power}"), true)
            }
            Ok(qt) => self.record(stage, name, expected, format!("non-scalar quotient {qt}"), false),
            Err(Error::NotDivisible) => self.record(stage, name, expected, format!("form {form} not divisible"), false),
            Err(e) => Err(e),
        }
    }

    /// Bracket transformed through `phi` from the current pair; used to
    /// verify the composition law at every stage.
    fn functorial_bracket(&self, phi: &SubstMap) -> Result<FracElem> {
        let br = bracket_frac(&self.p, &self.q)?;
        phi.apply_frac(&br)?.mul(&phi.jacobian()?)
    }

    fn apply_map(&mut self, phi: &SubstMap) -> Result<()> {
        self.p = phi.apply_frac(&self.p)?;
        self.q = phi.apply_frac(&self.q)?;
        Ok(())
    }

    fn mu_laurent(&self, k: usize) -> LaurentPoly {
        LaurentPoly::monomial(&self.ctx, 0, 0, self.map_mu.m(k).clone())
    }

    /// 1/mu0 of the map vector, required from stage 3 on.
    fn inv_mu0(&self) -> Result<Rat> {
        let c = self
            .map_mu
            .m(0)
            .as_constant()
            .ok_or_else(|| Error::Unsupported("mu0 must be a specialized rational here".to_string()))?;
        if num_traits::Zero::is_zero(&c) {
            return Err(Error::BadPipelineInput("mu0 must be invertible".to_string()));
        }
        Ok(Rat::new(c.denom().clone(), c.numer().clone()))
    }

    /// Stage 0: the input must have the normalized leading forms, the
    /// (j, 1) edge data and the stated bracket.
    fn verify_input_shape(&mut self) -> Result<()> {
        let mut stage = self.open_stage(0, "input-shape");
        let ctx = self.ctx.clone();
        let x3y = LaurentPoly::monomial(&ctx, 3, 1, ctx.one());
        let mu3 = LaurentPoly::monomial(&ctx, 0, 0, self.mu.m(3).clone());
        let lead_p = x3y.add(&mu3.mul_monomial(2, 0, &ctx.one()))?;
        let d1m1 = Direction::d(1, -1);
        self.check_laurent_eq(&mut stage, "lead_(1,-1)_P", &lead_p, &self.p.clone(), |l| {
            leading_form(l, d1m1)
        })?;
        let lead_q = LaurentPoly::monomial(&ctx, 2, 1, ctx.one()).add(&mu3.mul_monomial(1, 0, &ctx.one()))?;
        self.check_laurent_eq(&mut stage, "lead_(1,-1)_Q", &lead_q, &self.q.clone(), |l| {
            leading_form(l, d1m1)
        })?;
        let dj1 = Direction::d(self.j, 1);
        for (name, owner, st, en) in [
            ("edge_(j,1)_P", self.p.clone(), (3, 1), (0, self.m)),
            ("edge_(j,1)_Q", self.q.clone(), (2, 1), (0, self.n)),
        ] {
            match owner.as_laurent() {
                None => self.record(
                    &mut stage,
                    name,
                    format!("st={st:?}, en={en:?}"),
                    "(non-Laurent element)".to_string(),
                    false,
                )?,
                Some(l) => {
                    let in_dir = directions(l)?.contains(&dj1);
                    let e = edge_endpoints(l, dj1)?;
                    let pass = in_dir && e.st == st && e.en == en;
                    self.record(
                        &mut stage,
                        name,
                        format!("(j,1) edge with st={st:?}, en={en:?}"),
                        format!("in Dir: {in_dir}, st={:?}, en={:?}", e.st, e.en),
                        pass,
                    )?;
                }
            }
        }
        let expected_bracket = FracElem::from_laurent(self.mu.bracket_shape());
        let actual = bracket_frac(&self.p, &self.q)?;
        self.check_frac_eq(&mut stage, "bracket_input", &expected_bracket, &actual)?;
        self.stages.push(stage);
        Ok(())
    }

    /// Stage 1: x-inversion.
    pub fn stage1(&mut self) -> Result<()> {
        let phi = SubstMap::x_inversion(&self.ctx);
        let functorial = self.functorial_bracket(&phi)?;
        self.apply_map(&phi)?;
        let mut stage = self.open_stage(1, "x-inversion");
        let ctx = self.ctx.clone();
        let rho_t = Direction::d(-self.j, 3 * self.j + 1);

        // bracket: -(y + mu0 x + mu1 + mu2 x^-1 + mu3 x^-2)
        let y = LaurentPoly::var(&ctx, crate::laurent::Var::Y);
        let expected_bracket = FracElem::from_laurent(y.add(&self.map_mu.shear_shift())?.neg());
        let actual = bracket_frac(&self.p, &self.q)?;
        self.check_frac_eq(&mut stage, "bracket_stage1", &expected_bracket, &actual)?;
        let pass_fun = actual.semantic_eq(&functorial)?;
        self.record(
            &mut stage,
            "bracket_functorial_stage1",
            functorial.to_string(),
            actual.to_string(),
            pass_fun,
        )?;

        // Pred checks back to (1, -1)
        for (name, owner) in [("pred_P1", self.p.clone()), ("pred_Q1", self.q.clone())] {
            match owner.as_laurent() {
                None => self.record(&mut stage, name, "(1,-1)".to_string(), "(non-Laurent element)".to_string(), false)?,
                Some(l) => {
                    let pred = pred_dir(l, rho_t)?;
                    self.record(
                        &mut stage,
                        name,
                        "(1,-1)".to_string(),
                        pred.to_string(),
                        pred == Direction::d(1, -1),
                    )?;
                }
            }
        }
        self.check_en(&mut stage, "en_P1", &self.p.clone(), rho_t, (0, 1))?;
        self.check_en(&mut stage, "en_Q1", &self.q.clone(), rho_t, (1, 1))?;

        // trailing form of (-1, 3) carries the endpoint m*(3,1) resp. n*(3,1)
        let dm13 = Direction::d(-1, 3);
        for (name, owner, mult) in [
            ("trail_(-1,3)_P1", self.p.clone(), self.m),
            ("trail_(-1,3)_Q1", self.q.clone(), self.n),
        ] {
            let target = (3 * mult, mult);
            match owner.as_laurent() {
                None => self.record(&mut stage, name, format!("endpoint {target:?}"), "(non-Laurent element)".to_string(), false)?,
                Some(l) => {
                    let tf = trailing_form(l, dm13)?;
                    let e = edge_endpoints(&tf, dm13)?;
                    let pass = e.st == target || e.en == target;
                    self.record(
                        &mut stage,
                        name,
                        format!("endpoint {target:?}"),
                        format!("st={:?}, en={:?}", e.st, e.en),
                        pass,
                    )?;
                }
            }
        }

        // leading forms at (-1, 2)
        let mu3 = self.mu_laurent(3);
        let lead_p1 = y.add(&mu3.mul_monomial(-2, 0, &ctx.one()))?;
        let dm12 = Direction::d(-1, 2);
        self.check_laurent_eq(&mut stage, "lead_(-1,2)_P1", &lead_p1, &self.p.clone(), |l| {
            leading_form(l, dm12)
        })?;
        let lead_q1 = LaurentPoly::monomial(&ctx, 1, 1, ctx.one()).add(&mu3.mul_monomial(-1, 0, &ctx.one()))?;
        self.check_laurent_eq(&mut stage, "lead_(-1,2)_Q1", &lead_q1, &self.q.clone(), |l| {
            leading_form(l, dm12)
        })?;
        self.stages.push(stage);
        Ok(())
    }

    /// Stage 2: the mu-shear.
    pub fn stage2(&mut self) -> Result<()> {
        let phi = SubstMap::y_shift("mu-shear", &self.map_mu.shear_shift());
        let functorial = self.functorial_bracket(&phi)?;
        self.apply_map(&phi)?;
        let mut stage = self.open_stage(2, "mu-shear");
        let ctx = self.ctx.clone();
        let in_l = stage.in_l;
        self.record(
            &mut stage,
            "in_L_stage2",
            "P2, Q2 in K[x, y]".to_string(),
            format!("in_L = {in_l}"),
            in_l,
        )?;
        let y = LaurentPoly::var(&ctx, crate::laurent::Var::Y);
        let expected_bracket = FracElem::from_laurent(y.neg());
        let actual = bracket_frac(&self.p, &self.q)?;
        self.check_frac_eq(&mut stage, "bracket_stage2", &expected_bracket, &actual)?;
        let pass_fun = actual.semantic_eq(&functorial)?;
        self.record(
            &mut stage,
            "bracket_functorial_stage2",
            functorial.to_string(),
            actual.to_string(),
            pass_fun,
        )?;
        let rho_t = Direction::d(-self.j, 3 * self.j + 1);
        let dirs = vec![Direction::d(1, 1), rho_t];
        let mut sorted = dirs.clone();
        sorted.sort_by(|a, b| a.cmp_angle(b));
        self.check_dirs(&mut stage, "dir_P2", &self.p.clone(), &sorted)?;
        self.check_dirs(&mut stage, "dir_Q2", &self.q.clone(), &sorted)?;
        self.check_en(&mut stage, "en_P2", &self.p.clone(), rho_t, (0, 1))?;
        self.check_en(&mut stage, "en_Q2", &self.q.clone(), rho_t, (1, 1))?;
        // R2 = x^3 (y - mu0 x)
        let mu0 = self.mu_laurent(0);
        let r2 = y.sub(&mu0.mul_monomial(1, 0, &ctx.one()))?.mul_monomial(3, 0, &ctx.one());
        let d11 = Direction::d(1, 1);
        self.check_proportional(&mut stage, "lead_(1,1)_P2", &self.p.clone(), d11, &r2, self.m as u32, "lambda_P")?;
        self.check_proportional(&mut stage, "lead_(1,1)_Q2", &self.q.clone(), d11, &r2, self.n as u32, "lambda_Q")?;
        self.stages.push(stage);
        Ok(())
    }

    /// Stage 3: the inverse quarter turn.
    pub fn stage3(&mut self) -> Result<()> {
        let inv_mu0 = self.inv_mu0()?;
        let phi = SubstMap::quarter_turn_back(&self.ctx);
        let functorial = self.functorial_bracket(&phi)?;
        self.apply_map(&phi)?;
        let mut stage = self.open_stage(3, "quarter-turn");
        let ctx = self.ctx.clone();
        let x = LaurentPoly::var(&ctx, crate::laurent::Var::X);
        let y = LaurentPoly::var(&ctx, crate::laurent::Var::Y);
        let expected_bracket = FracElem::from_laurent(x.neg());
        let actual = bracket_frac(&self.p, &self.q)?;
        self.check_frac_eq(&mut stage, "bracket_stage3", &expected_bracket, &actual)?;
        let pass_fun = actual.semantic_eq(&functorial)?;
        self.record(
            &mut stage,
            "bracket_functorial_stage3",
            functorial.to_string(),
            actual.to_string(),
            pass_fun,
        )?;
        let rho_b = Direction::d(3 * self.j + 1, -self.j);
        let mut dirs = vec![Direction::d(1, 1), rho_b];
        dirs.sort_by(|a, b| a.cmp_angle(b));
        self.check_dirs(&mut stage, "dir_P3", &self.p.clone(), &dirs)?;
        self.check_dirs(&mut stage, "dir_Q3", &self.q.clone(), &dirs)?;
        self.check_en(&mut stage, "en_P3", &self.p.clone(), rho_b, (1, 0))?;
        self.check_en(&mut stage, "en_Q3", &self.q.clone(), rho_b, (1, 1))?;
        // R3 = y^3 (y + (1/mu0) x)
        let r3 = y
            .add(&x.scale(&inv_mu0))?
            .mul_monomial(0, 3, &ctx.one());
        let d11 = Direction::d(1, 1);
        self.check_proportional(&mut stage, "lead_(1,1)_P3", &self.p.clone(), d11, &r3, self.m as u32, "lambda_tilde_P")?;
        self.check_proportional(&mut stage, "lead_(1,1)_Q3", &self.q.clone(), d11, &r3, self.n as u32, "lambda_tilde_Q")?;
        self.stages.push(stage);
        Ok(())
    }

    /// Stage 4: x-inversion again.
    pub fn stage4(&mut self) -> Result<()> {
        let inv_mu0 = self.inv_mu0()?;
        let phi = SubstMap::x_inversion(&self.ctx);
        let functorial = self.functorial_bracket(&phi)?;
        self.apply_map(&phi)?;
        let mut stage = self.open_stage(4, "x-inversion-2");
        let ctx = self.ctx.clone();
        let expected_bracket = FracElem::one(&ctx);
        let actual = bracket_frac(&self.p, &self.q)?;
        self.check_frac_eq(&mut stage, "bracket_stage4", &expected_bracket, &actual)?;
        let pass_fun = actual.semantic_eq(&functorial)?;
        self.record(
            &mut stage,
            "bracket_functorial_stage4",
            functorial.to_string(),
            actual.to_string(),
            pass_fun,
        )?;
        let rho_h = Direction::d(-3 * self.j - 1, 8 * self.j + 3);
        let mut dirs = vec![Direction::d(-1, 4), rho_h];
        dirs.sort_by(|a, b| a.cmp_angle(b));
        self.check_dirs(&mut stage, "dir_P4", &self.p.clone(), &dirs)?;
        self.check_dirs(&mut stage, "dir_Q4", &self.q.clone(), &dirs)?;
        self.check_en(&mut stage, "en_P4", &self.p.clone(), rho_h, (-1, 0))?;
        self.check_en(&mut stage, "en_Q4", &self.q.clone(), rho_h, (2, 1))?;
        // R4 = y^3 x^12 (y + (1/mu0) x^-4)
        let y = LaurentPoly::var(&ctx, crate::laurent::Var::Y);
        let r4 = y
            .add(&LaurentPoly::monomial(&ctx, -4, 0, ctx.constant(inv_mu0)))?
            .mul_monomial(12, 3, &ctx.one());
        let dm14 = Direction::d(-1, 4);
        self.check_proportional(&mut stage, "lead_(-1,4)_P4", &self.p.clone(), dm14, &r4, self.m as u32, "lambda_hat4_P")?;
        self.check_proportional(&mut stage, "lead_(-1,4)_Q4", &self.q.clone(), dm14, &r4, self.n as u32, "lambda_hat4_Q")?;
        self.stages.push(stage);
        Ok(())
    }

    /// Stage 5: the x^-4 shear.
    pub fn stage5(&mut self) -> Result<()> {
        let inv_mu0 = self.inv_mu0()?;
        let ctx = self.ctx.clone();
        let shift = LaurentPoly::monomial(&ctx, -4, 0, ctx.constant(inv_mu0.clone()));
        let phi = SubstMap::y_shift("x4-shear", &shift);
        let functorial = self.functorial_bracket(&phi)?;
        self.apply_map(&phi)?;
        let mut stage = self.open_stage(5, "x4-shear");
        let expected_bracket = FracElem::one(&ctx);
        let actual = bracket_frac(&self.p, &self.q)?;
        self.check_frac_eq(&mut stage, "bracket_stage5", &expected_bracket, &actual)?;
        let pass_fun = actual.semantic_eq(&functorial)?;
        self.record(
            &mut stage,
            "bracket_functorial_stage5",
            functorial.to_string(),
            actual.to_string(),
            pass_fun,
        )?;
        // R5 = y x^12 (y - (1/mu0) x^-4)^3
        let y = LaurentPoly::var(&ctx, crate::laurent::Var::Y);
        let r5 = y
            .sub(&LaurentPoly::monomial(&ctx, -4, 0, ctx.constant(inv_mu0)))?
            .pow(3)
            .mul_monomial(12, 1, &ctx.one());
        let dm14 = Direction::d(-1, 4);
        self.check_proportional(&mut stage, "lead_(-1,4)_P5", &self.p.clone(), dm14, &r5, self.m as u32, "lambda_hat5_P")?;
        self.check_proportional(&mut stage, "lead_(-1,4)_Q5", &self.q.clone(), dm14, &r5, self.n as u32, "lambda_hat5_Q")?;
        self.stages.push(stage);
        Ok(())
    }

    /// Stage 6: correction shears until the pair lies in K[x, y], then the
    /// final report.
    pub fn stage6(mut self) -> Result<PipelineRun> {
        let ctx = self.ctx.clone();
        let dm14 = Direction::d(-1, 4);
        let mut rounds = 0u32;
        while !(self.p.is_polynomial() && self.q.is_polynomial()) {
            if rounds >= self.options.max_corrections {
                if self.options.audit {
                    break;
                }
                return Err(Error::BadPipelineInput(format!(
                    "pair still not in K[x, y] after {rounds} corrections"
                )));
            }
            let Some(pl) = self.p.as_laurent().cloned() else {
                if self.options.audit {
                    break;
                }
                return Err(Error::BadPipelineInput(
                    "final pair not in the Laurent ring: denominators did not cancel".to_string(),
                ));
            };
            let ql = self.q.as_laurent().cloned().ok_or_else(|| {
                Error::BadPipelineInput("final pair not in the Laurent ring".to_string())
            })?;
            let d = succ_dir(&pl, dm14)?;
            if d.rho != -1 || !(1..=3).contains(&d.sigma) {
                return Err(Error::Unsupported(format!(
                    "correction direction {d} is not (-1, k) with k in 1..3"
                )));
            }
            let k = d.sigma;
            let mut stage = self.open_stage(6 + rounds as usize, &format!("correction-k{k}"));
            let (lambda, lam_hat_p) = extract_linear_power(&pl, d, self.m)?;
            self.scalars.push((format!("lambda_hat_P_k{k}"), lam_hat_p.to_string()));
            self.scalars.push((format!("lambda_k{k}"), fmt_rat(&lambda)));
            // verify the same root drives Q's edge
            let (lambda_q, lam_hat_q) = extract_linear_power(&ql, d, self.n)?;
            self.scalars.push((format!("lambda_hat_Q_k{k}"), lam_hat_q.to_string()));
            let pass = lambda_q == lambda;
            self.record(
                &mut stage,
                &format!("correction_root_match_k{k}"),
                fmt_rat(&lambda),
                fmt_rat(&lambda_q),
                pass,
            )?;
            let shift = LaurentPoly::monomial(&ctx, -k, 0, ctx.constant(lambda.clone()));
            let phi = SubstMap::y_shift(&format!("correction-k{k}"), &shift);
            self.apply_map(&phi)?;
            stage.p = self.p.to_string();
            stage.q = self.q.to_string();
            stage.in_l = self.p.is_polynomial() && self.q.is_polynomial();
            stage.polygon_p = self.p.as_laurent().and_then(|l| polygon_snapshot(l).ok());
            stage.polygon_q = self.q.as_laurent().and_then(|l| polygon_snapshot(l).ok());
            self.corrections.push(Correction {
                k,
                lambda: fmt_rat(&lambda),
            });
            self.stages.push(stage);
            rounds += 1;
        }

        let in_l = self.p.is_polynomial() && self.q.is_polynomial();
        let bracket = bracket_frac(&self.p, &self.q)?;
        let bracket_str = bracket.to_string();
        let bracket_const = bracket
            .as_laurent()
            .map(|b| b.support() == vec![(0, 0)] && !b.is_zero())
            .unwrap_or(false);
        let degrees = match (self.p.total_degree(), self.q.total_degree()) {
            (Some(a), Some(b)) if in_l => Some((a, b)),
            _ => None,
        };
        let mut final_stage = self.open_stage(6 + rounds as usize, "final");
        self.record(
            &mut final_stage,
            "final_in_L",
            "pair in K[x, y]".to_string(),
            format!("in_L = {in_l}"),
            in_l,
        )?;
        if bracket_const {
            // counterexample degrees must be (16m, 16n)
            let expect = (16 * self.m, 16 * self.n);
            let pass = degrees == Some(expect);
            self.record(
                &mut final_stage,
                "final_degrees_16m_16n",
                format!("{expect:?}"),
                format!("{degrees:?}"),
                pass,
            )?;
        }
        self.stages.push(final_stage);

        let all_checks_pass = self
            .stages
            .iter()
            .flat_map(|s| s.checks.iter())
            .all(|c| c.pass);
        let report = FinalReport {
            in_l,
            degrees,
            bracket: bracket_str,
            bracket_is_nonzero_constant: bracket_const,
            counterexample: in_l && bracket_const,
            corrections: self.corrections.clone(),
        };
        Ok(PipelineRun {
            j: self.j,
            m: self.m,
            n: self.n,
            mu: [0, 1, 2, 3].map(|k| self.mu.m(k).to_string()),
            map_mu: [0, 1, 2, 3].map(|k| self.map_mu.m(k).to_string()),
            stages: self.stages,
            scalars: self.scalars,
            report,
            all_checks_pass,
        })
    }
}

/// Extracts lambda from an edge form expected to be
/// lambda_hat * (y + lambda x^-k)^mult in direction d = (-1, k): reads the
/// candidate root off the top two edge coefficients and then verifies the
/// perfect-power identity exactly. Non-rational or non-matching edges are
/// unsupported.
fn extract_linear_power(p: &LaurentPoly, d: Direction, mult: i64) -> Result<(Rat, crate::param::ParamPoly)> {
    let ctx = p.ctx().clone();
    let form = leading_form(p, d)?;
    let k = d.sigma;
    let (_, j_top) = form
        .support()
        .into_iter()
        .max_by_key(|&(_, j)| j)
        .ok_or(Error::ZeroPolynomial)?;
    if j_top != mult {
        return Err(Error::Unsupported(format!(
            "edge form has top y-degree {j_top}, expected {mult}"
        )));
    }
    let lam_hat = form.coeff(0, mult);
    if lam_hat.is_zero() {
        return Err(Error::Unsupported("edge form misses the y^m corner".to_string()));
    }
    let next = form.coeff(-k, mult - 1);
    let ratio = next.exact_div(&lam_hat)?;
    let ratio = ratio
        .as_constant()
        .ok_or_else(|| Error::Unsupported("edge ratio is not a rational scalar".to_string()))?;
    let lambda = ratio / crate::rat::int(mult);
    // verify exactly
    let r6 = LaurentPoly::var(&ctx, crate::laurent::Var::Y)
        .add(&LaurentPoly::monomial(&ctx, -k, 0, ctx.constant(lambda.clone())))?;
    let expect = r6.pow(mult as u32).mul_monomial(0, 0, &lam_hat);
    if expect != form {
        return Err(Error::Unsupported(format!(
            "edge form is not a perfect power: expected {expect}, found {form}"
        )));
    }
    Ok((lambda, lam_hat))
}
