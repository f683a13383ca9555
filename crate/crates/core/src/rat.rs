//! Exact rational scalars.
//!
//! `Rat` is an arbitrary-precision rational kept in lowest terms with a
//! positive denominator, which is exactly the normal form `num-rational`
//! maintains. Everything in this crate is computed over `Rat`; no floating
//! point appears anywhere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

/// `n/d` as an exact rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as a rational.
pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Formats without a denominator when the value is integral.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// All rational roots of `c[0] + c[1] t + ... + c[n] t^n`, by the rational
/// root theorem. The zero polynomial is rejected by the caller; trailing
/// zero coefficients (roots at 0) are handled explicitly.
pub fn rational_roots(coeffs: &[Rat]) -> Vec<Rat> {
    let mut c: Vec<Rat> = coeffs.to_vec();
    while c.last().is_some_and(Zero::is_zero) {
        c.pop();
    }
    if c.len() <= 1 {
        return Vec::new();
    }
    // clear denominators to an integer polynomial
    let mut lcm = BigInt::one();
    for q in &c {
        lcm = num_integer::lcm(lcm, q.denom().clone());
    }
    let ints: Vec<BigInt> = c.iter().map(|q| (q * Rat::from_integer(lcm.clone())).to_integer()).collect();
    let mut roots = Vec::new();
    let mut low = 0;
    while ints[low].is_zero() {
        low += 1;
    }
    if low > 0 {
        roots.push(Rat::zero());
    }
    let a0 = ints[low].abs();
    let an = ints.last().unwrap().abs();
    let eval = |x: &Rat| -> Rat {
        let mut acc = Rat::zero();
        for ci in ints.iter().rev() {
            acc = acc * x + Rat::from_integer(ci.clone());
        }
        acc
    };
    for p in divisors(&a0) {
        for q in divisors(&an) {
            for sign in [1i64, -1] {
                let cand = Rat::new(&p * BigInt::from(sign), q.clone());
                if eval(&cand).is_zero() && !roots.contains(&cand) {
                    roots.push(cand);
                }
            }
        }
    }
    roots.sort();
    roots
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    let mut d = BigInt::one();
    // trial division is plenty here: solver constants stay desk-sized
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            out.push(d.clone());
            let other = n / &d;
            if other != d {
                out.push(other);
            }
        }
        d += 1;
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_roots_of_quadratic() {
        // (2t - 1)(t + 3) = 2t^2 + 5t - 3
        let roots = rational_roots(&[int(-3), int(5), int(2)]);
        assert_eq!(roots, vec![int(-3), rat(1, 2)]);
    }

    #[test]
    fn rational_roots_none_for_irrational() {
        // 10t^2 + 3t - 3/8 has discriminant 24, not a square
        assert!(rational_roots(&[rat(-3, 8), int(3), int(10)]).is_empty());
    }

    #[test]
    fn rational_roots_at_zero() {
        let roots = rational_roots(&[int(0), int(0), int(1), int(1)]);
        assert_eq!(roots, vec![int(-1), int(0)]);
    }
}
