//! Randomized structural invariants of the algebra layers, on fixed seeds.

use abeljac_core::expr::{parse_poly, print_poly};
use abeljac_core::grading::{directions, edge_endpoints, leading_form};
use abeljac_core::jacobian::{
    bracket, bracket_coeff_formula, p0_prime, q0_prime, reconstruct, EdpolInstance, MuVec,
    SystemData,
};
use abeljac_core::laurent::{LaurentPoly, Var};
use abeljac_core::param::Ctx;
use abeljac_core::rat::int;
use abeljac_core::sampling::{self, Rng};
use abeljac_core::subst::SubstMap;

#[test]
fn ring_axioms_on_random_triples() {
    let c = Ctx::standard();
    let mut rng = Rng::new(0xAB01);
    for _ in 0..100 {
        let a = sampling::laurent(&mut rng, &c, 4, (-3, 3), (-3, 3));
        let b = sampling::laurent(&mut rng, &c, 4, (-3, 3), (-3, 3));
        let d = sampling::laurent(&mut rng, &c, 4, (-3, 3), (-3, 3));
        let ab_d = a.mul(&b).unwrap().mul(&d).unwrap();
        let a_bd = a.mul(&b.mul(&d).unwrap()).unwrap();
        assert_eq!(ab_d, a_bd);
        let dist = a.mul(&b.add(&d).unwrap()).unwrap();
        let dist2 = a.mul(&b).unwrap().add(&a.mul(&d).unwrap()).unwrap();
        assert_eq!(dist, dist2);
        assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
    }
}

#[test]
fn derive_then_integrate_is_identity_on_zero_constant_polys() {
    let c = Ctx::standard();
    let mut rng = Rng::new(0xAB02);
    for _ in 0..100 {
        let mut p = sampling::laurent(&mut rng, &c, 5, (0, 0), (1, 6));
        // make sure there is no constant term
        p = p.sub(&LaurentPoly::monomial(&c, 0, 0, p.coeff(0, 0))).unwrap();
        let back = p.derive(Var::Y).integrate_y().unwrap();
        assert_eq!(back, p);
    }
}

#[test]
fn substitution_is_a_ring_homomorphism() {
    let c = Ctx::standard();
    let mut rng = Rng::new(0xAB03);
    let shift = parse_poly(&c, "x + 2*x^-2").unwrap();
    let maps = [
        SubstMap::quarter_turn(&c),
        SubstMap::x_inversion(&c),
        SubstMap::y_shift("shear", &shift),
    ];
    for k in 0..200 {
        let phi = &maps[k % maps.len()];
        let p = sampling::laurent(&mut rng, &c, 4, (-2, 3), (0, 3));
        let q = sampling::laurent(&mut rng, &c, 4, (-2, 3), (0, 3));
        let prod = phi.apply(&p.mul(&q).unwrap()).unwrap();
        let prod2 = phi.apply(&p).unwrap().mul(&phi.apply(&q).unwrap()).unwrap();
        assert!(prod.semantic_eq(&prod2).unwrap());
        let sum = phi.apply(&p.add(&q).unwrap()).unwrap();
        let sum2 = phi.apply(&p).unwrap().add(&phi.apply(&q).unwrap()).unwrap();
        assert!(sum.semantic_eq(&sum2).unwrap());
    }
}

#[test]
fn edge_endpoints_step_along_the_edge_direction() {
    let c = Ctx::standard();
    let mut rng = Rng::new(0xAB04);
    for _ in 0..200 {
        let p = sampling::laurent_nonzero(&mut rng, &c, 7, (-4, 5), (-4, 5));
        for d in directions(&p).unwrap() {
            let e = edge_endpoints(&p, d).unwrap();
            assert!(e.t >= 0);
            assert_eq!(
                (e.en.0 - e.st.0, e.en.1 - e.st.1),
                (-d.sigma * e.t, d.rho * e.t)
            );
            let l = leading_form(&p, d).unwrap();
            assert_eq!(leading_form(&l, d).unwrap(), l);
        }
    }
}

#[test]
fn bracket_is_bilinear_antisymmetric_leibniz() {
    let c = Ctx::standard();
    let mut rng = Rng::new(0xAB05);
    for _ in 0..100 {
        let p = sampling::laurent(&mut rng, &c, 4, (-2, 3), (-2, 3));
        let q = sampling::laurent(&mut rng, &c, 4, (-2, 3), (-2, 3));
        let r = sampling::laurent(&mut rng, &c, 4, (-2, 3), (-2, 3));
        let anti = bracket(&p, &q).unwrap().add(&bracket(&q, &p).unwrap()).unwrap();
        assert!(anti.is_zero());
        let lin = bracket(&p.add(&q).unwrap(), &r).unwrap();
        let lin2 = bracket(&p, &r).unwrap().add(&bracket(&q, &r).unwrap()).unwrap();
        assert_eq!(lin, lin2);
        // Leibniz: [pq, r] = p[q, r] + q[p, r]
        let lhs = bracket(&p.mul(&q).unwrap(), &r).unwrap();
        let rhs = p
            .mul(&bracket(&q, &r).unwrap())
            .unwrap()
            .add(&q.mul(&bracket(&p, &r).unwrap()).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn x_graded_bracket_identity() {
    // [x^k p(y), x^j q(y)] = x^(k+j-1) (k p q' - j p' q)
    let c = Ctx::standard();
    let mut rng = Rng::new(0xAB06);
    for _ in 0..100 {
        let k = rng.int_in(0, 4);
        let j = rng.int_in(0, 4);
        let p = sampling::laurent(&mut rng, &c, 4, (0, 0), (0, 5));
        let q = sampling::laurent(&mut rng, &c, 4, (0, 0), (0, 5));
        let lhs = bracket(
            &p.mul_monomial(k, 0, &c.one()),
            &q.mul_monomial(j, 0, &c.one()),
        )
        .unwrap();
        let rhs = p
            .mul(&q.derive(Var::Y))
            .unwrap()
            .scale(&int(k))
            .sub(&p.derive(Var::Y).mul(&q).unwrap().scale(&int(j)))
            .unwrap()
            .mul_monomial(k + j - 1, 0, &c.one());
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn bracket_coefficients_match_the_convolution_formula() {
    let c = Ctx::standard();
    let mut rng = Rng::new(0xAB07);
    for _ in 0..50 {
        let p = sampling::laurent(&mut rng, &c, 5, (-2, 4), (-2, 4));
        let q = sampling::laurent(&mut rng, &c, 5, (-2, 4), (-2, 4));
        let br = bracket(&p, &q).unwrap();
        for i in -5..=8 {
            for j in -5..=8 {
                assert_eq!(bracket_coeff_formula(&p, &q, i, j).unwrap(), br.coeff(i, j));
            }
        }
    }
}

#[test]
fn reconstruct_is_a_retraction_of_consistent_data() {
    let c = Ctx::standard();
    let mut rng = Rng::new(0xAB08);
    for _ in 0..25 {
        // consistent data: q1, p2 from a random F in yK[y]; mu2 and mu1
        // chosen to keep the eliminated q0' and p0' free of y^-1 terms;
        // q0 and p0 from the formulas with zero constants
        let f = sampling::laurent(&mut rng, &c, 2, (0, 0), (1, 2));
        let p1 = sampling::laurent(&mut rng, &c, 3, (0, 0), (0, 3));
        let mu3 = rng.rat();
        let mu2 = p1.coeff(0, 0).as_constant().unwrap();
        let mut mu = MuVec::from_rats(&c, [rng.rat(), int(0), mu2, mu3.clone()]);
        let (q1, p2) = abeljac_core::jacobian::from_f(&f, mu.m(3)).unwrap();
        let (q0p, _) = q0_prime(&f, &p1, &mu).unwrap();
        // the y^-1 slot of p0' vanishes for mu1 = mu3 (2 q0'(0) - p1'(0))
        let mu1 = c
            .constant(mu3)
            .mul(&q0p.coeff(0, 0).scale(&int(2)).sub(&p1.coeff(0, 1)).unwrap())
            .unwrap();
        mu.0[1] = mu1;
        let (p0p, _) = p0_prime(&f, &p1, &q0p, &mu).unwrap();
        let q0 = q0p.integrate_y().unwrap();
        let p0 = p0p.integrate_y().unwrap();
        let sys = SystemData {
            p0,
            p1,
            p2,
            q0,
            q1: q1.clone(),
            mu: mu.clone(),
        };
        let (p_expect, q_expect) = sys.assemble().unwrap();
        let inst = EdpolInstance {
            a: sys.compute_a().unwrap(),
            q1,
            mu,
        };
        let rec = reconstruct(&inst).unwrap();
        assert_eq!(rec.p, p_expect);
        assert_eq!(rec.q, q_expect);
    }
}

#[test]
fn residuals_vanish_exactly_when_the_bracket_matches() {
    let c = Ctx::standard();
    let mut rng = Rng::new(0xAB09);
    let mut seen_true = 0;
    for k in 0..100 {
        let sys = if k % 10 == 0 {
            // known solution instance
            SystemData {
                p0: parse_poly(&c, "y^7/7 + mu3*y^4/4").unwrap(),
                p1: parse_poly(&c, "y^5 + mu3*y^2").unwrap(),
                p2: parse_poly(&c, "mu3 + 2*y^3").unwrap(),
                q0: parse_poly(&c, "y^5/5 + mu3*y^2/2").unwrap(),
                q1: parse_poly(&c, "y^3 + mu3").unwrap(),
                mu: MuVec::formal_mu3(&c),
            }
        } else {
            SystemData {
                p0: sampling::laurent(&mut rng, &c, 3, (0, 0), (0, 5)),
                p1: sampling::laurent(&mut rng, &c, 3, (0, 0), (0, 4)),
                p2: sampling::laurent(&mut rng, &c, 3, (0, 0), (0, 3)),
                q0: sampling::laurent(&mut rng, &c, 3, (0, 0), (0, 4)),
                q1: sampling::laurent(&mut rng, &c, 3, (0, 0), (0, 3)),
                mu: MuVec::from_rats(&c, [rng.rat(), rng.rat(), rng.rat(), rng.rat()]),
            }
        };
        let all_zero = sys.residuals().unwrap().iter().all(|r| r.is_zero());
        let (p, q) = sys.assemble().unwrap();
        let matches = bracket(&p, &q).unwrap() == sys.mu.bracket_shape();
        assert_eq!(all_zero, matches);
        if all_zero {
            seen_true += 1;
        }
    }
    assert!(seen_true >= 10, "the solution instances must exercise the true side");
}

#[test]
fn print_parse_identity_on_500_random_polynomials() {
    let c = Ctx::standard();
    let mut rng = Rng::new(0xAB0A);
    for _ in 0..500 {
        let p = sampling::laurent(&mut rng, &c, 6, (-4, 6), (-4, 6));
        let text = print_poly(&p);
        let q = parse_poly(&c, &text).unwrap();
        assert_eq!(p, q, "round trip through {text}");
        assert_eq!(print_poly(&q), text);
    }
}
