//! (rho, sigma)-graded structure: valuations, leading and trailing forms,
//! Newton-polygon edge directions with their endpoints, successor and
//! predecessor directions, and the induced action of the elementary
//! automorphisms on directions.
//!
//! Directions are coprime integer pairs ordered by the counterclockwise
//! angle measured from (1, -1); all comparisons are exact integer
//! cross-product tests, never floating point. The direction set of a
//! polynomial consists of the outward edge normals of its support hull
//! with angle in [0, 180] degrees; when the support is collinear along
//! the (1, 1) line both boundary normals qualify and (1, -1) is kept.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Direction {
    pub rho: i64,
    pub sigma: i64,
}

impl Direction {
    /// Normalizes to a coprime pair preserving orientation. (0, 0) is invalid.
    pub fn new(rho: i64, sigma: i64) -> Result<Direction> {
        if rho == 0 && sigma == 0 {
            return Err(Error::Unsupported("direction (0, 0)".to_string()));
        }
        let g = gcd(rho.unsigned_abs(), sigma.unsigned_abs()) as i64;
        Ok(Direction {
            rho: rho / g,
            sigma: sigma / g,
        })
    }

    pub fn d(rho: i64, sigma: i64) -> Direction {
        Direction::new(rho, sigma).expect("valid direction")
    }

    /// v_{rho,sigma}(x^i y^j) = rho*i + sigma*j.
    pub fn value(&self, point: (i64, i64)) -> i64 {
        self.rho * point.0 + self.sigma * point.1
    }

    /// The cross functional rho*j - sigma*i ordering points along an edge.
    pub fn cross_value(&self, point: (i64, i64)) -> i64 {
        self.rho * point.1 - self.sigma * point.0
    }

    /// Angular position class measured counterclockwise from (1, -1):
    /// 0 at (1, -1) itself, 1 strictly inside the upper half, 2 at
    /// (-1, 1), 3 strictly inside the lower half.
    fn half_class(&self) -> u8 {
        let cross = self.rho + self.sigma; // cross((1,-1), self)
        match cross.cmp(&0) {
            Ordering::Greater => 1,
            Ordering::Less => 3,
            Ordering::Equal => {
                if self.rho > 0 {
                    0
                } else {
                    2
                }
            }
        }
    }

    /// Exact comparison of counterclockwise angles from (1, -1).
    pub fn cmp_angle(&self, other: &Direction) -> Ordering {
        let (ca, cb) = (self.half_class(), other.half_class());
        if ca != cb {
            return ca.cmp(&cb);
        }
        // same open half-plane: positive cross means self comes first
        let cross = self.rho * other.sigma - self.sigma * other.rho;
        cross.cmp(&0).reverse()
    }

    pub fn le_angle(&self, other: &Direction) -> bool {
        self.cmp_angle(other) != Ordering::Greater
    }

    /// Direction transform of the quarter turn: (rho, sigma) -> (sigma, rho).
    pub fn map_quarter_turn(&self) -> Direction {
        Direction {
            rho: self.sigma,
            sigma: self.rho,
        }
    }

    /// Direction transform of x -> x^-1, y -> x^3 y, branching on the
    /// angular comparison with (-1, 2).
    pub fn map_x_inversion(&self) -> Direction {
        if self.le_angle(&Direction { rho: -1, sigma: 2 }) {
            Direction {
                rho: -self.rho,
                sigma: 3 * self.rho + self.sigma,
            }
        } else {
            Direction {
                rho: self.rho,
                sigma: -3 * self.rho - self.sigma,
            }
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.rho, self.sigma)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

/// Maximal v-degree over the support.
pub fn vdeg(p: &LaurentPoly, d: Direction) -> Result<i64> {
    p.support()
        .iter()
        .map(|&pt| d.value(pt))
        .max()
        .ok_or(Error::ZeroPolynomial)
}

/// Minimal v-degree over the support.
pub fn vdeg_min(p: &LaurentPoly, d: Direction) -> Result<i64> {
    p.support()
        .iter()
        .map(|&pt| d.value(pt))
        .min()
        .ok_or(Error::ZeroPolynomial)
}

/// Sum of the terms attaining the maximal v-degree.
pub fn leading_form(p: &LaurentPoly, d: Direction) -> Result<LaurentPoly> {
    let top = vdeg(p, d)?;
    form_at(p, d, top)
}

/// Sum of the terms attaining the minimal v-degree.
pub fn trailing_form(p: &LaurentPoly, d: Direction) -> Result<LaurentPoly> {
    let bottom = vdeg_min(p, d)?;
    form_at(p, d, bottom)
}

fn form_at(p: &LaurentPoly, d: Direction, level: i64) -> Result<LaurentPoly> {
    let mut out = LaurentPoly::zero(p.ctx());
    for (&(i, j), c) in p.terms() {
        if d.value((i, j)) == level {
            out = out.add(&LaurentPoly::monomial(p.ctx(), i, j, c.clone()))?;
        }
    }
    Ok(out)
}

/// Edge of the Newton polygon in direction `d`: `st` minimizes and `en`
/// maximizes the cross functional rho*j - sigma*i over the leading form,
/// and `en = st + t * (-sigma, rho)` for the returned `t >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeData {
    pub st: (i64, i64),
    pub en: (i64, i64),
    pub direction: Direction,
    pub t: i64,
}

pub fn edge_endpoints(p: &LaurentPoly, d: Direction) -> Result<EdgeData> {
    let form = leading_form(p, d)?;
    let support = form.support();
    let st = *support
        .iter()
        .min_by_key(|&&pt| d.cross_value(pt))
        .ok_or(Error::ZeroPolynomial)?;
    let en = *support.iter().max_by_key(|&&pt| d.cross_value(pt)).unwrap();
    let step = (-d.sigma, d.rho);
    let diff = (en.0 - st.0, en.1 - st.1);
    let t = if step.0 != 0 {
        diff.0 / step.0
    } else if step.1 != 0 {
        diff.1 / step.1
    } else {
        0
    };
    debug_assert_eq!((step.0 * t, step.1 * t), diff, "edge is not lattice-aligned");
    Ok(EdgeData { st, en, direction: d, t })
}

/// All edge directions of the support polygon with angle in [0, 180]
/// degrees, sorted by angle. Single-term polynomials have none.
pub fn directions(p: &LaurentPoly) -> Result<Vec<Direction>> {
    let pts = p.support();
    if pts.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    if pts.len() == 1 {
        return Ok(Vec::new());
    }
    let hull = convex_hull(&pts);
    let mut out: Vec<Direction> = Vec::new();
    if hull.len() == 2 {
        // collinear support: both perpendiculars bound the segment
        let e = (hull[1].0 - hull[0].0, hull[1].1 - hull[0].1);
        for n in [(e.1, -e.0), (-e.1, e.0)] {
            let d = Direction::new(n.0, n.1)?;
            if d.half_class() <= 2 && !out.contains(&d) {
                out.push(d);
            }
        }
        if out.contains(&Direction { rho: 1, sigma: -1 }) {
            out.retain(|d| *d != Direction { rho: -1, sigma: 1 });
        }
    } else {
        for k in 0..hull.len() {
            let a = hull[k];
            let b = hull[(k + 1) % hull.len()];
            let e = (b.0 - a.0, b.1 - a.1);
            let d = Direction::new(e.1, -e.0)?;
            if d.half_class() <= 2 {
                out.push(d);
            }
        }
    }
    out.sort_by(|a, b| a.cmp_angle(b));
    Ok(out)
}

/// Counterclockwise convex hull (monotone chain). Returns 2 points for
/// collinear support and at least 3 otherwise.
fn convex_hull(pts: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut pts: Vec<(i64, i64)> = pts.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| -> i64 {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        // all points collinear: keep the extremes
        return vec![pts[0], *pts.last().unwrap()];
    }
    lower
}

/// Angularly next element of `directions(p)` strictly after `d`, cyclic.
pub fn succ_dir(p: &LaurentPoly, d: Direction) -> Result<Direction> {
    let dirs = directions(p)?;
    if dirs.is_empty() {
        return Err(Error::NoDirections);
    }
    Ok(dirs
        .iter()
        .find(|x| d.cmp_angle(x) == Ordering::Less)
        .copied()
        .unwrap_or(dirs[0]))
}

/// Angularly previous element of `directions(p)` strictly before `d`, cyclic.
pub fn pred_dir(p: &LaurentPoly, d: Direction) -> Result<Direction> {
    let dirs = directions(p)?;
    if dirs.is_empty() {
        return Err(Error::NoDirections);
    }
    Ok(dirs
        .iter()
        .rev()
        .find(|x| d.cmp_angle(x) == Ordering::Greater)
        .copied()
        .unwrap_or(*dirs.last().unwrap()))
}

/// Neutral geometry record for rendering: support, hull and labeled edges.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolygonSnapshot {
    pub support: Vec<(i64, i64)>,
    pub hull: Vec<(i64, i64)>,
    pub edges: Vec<EdgeData>,
}

pub fn polygon_snapshot(p: &LaurentPoly) -> Result<PolygonSnapshot> {
    let support = p.support();
    if support.is_empty() {
        return Ok(PolygonSnapshot {
            support,
            hull: Vec::new(),
            edges: Vec::new(),
        });
    }
    let hull = convex_hull(&support);
    let dirs = if support.len() >= 2 { directions(p)? } else { Vec::new() };
    let edges = dirs
        .into_iter()
        .map(|d| edge_endpoints(p, d))
        .collect::<Result<Vec<_>>>()?;
    Ok(PolygonSnapshot { support, hull, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_std;

    /// The degree-3 family P with formal mu3 (j = 2 member).
    fn p5a() -> LaurentPoly {
        parse_std("x^3*y + x^2*(2*y^3 + mu3) + x*(y^5 + mu3*y^2) + y^7/7 + mu3*y^4/4").unwrap()
    }

    #[test]
    fn angular_order_pins_the_branch_tests() {
        let m12 = Direction::d(-1, 2);
        for j in 1..=5 {
            assert!(Direction::d(j, 1).le_angle(&m12));
            assert!(Direction::d(3 * j + 1, -j).le_angle(&m12));
        }
        assert!(Direction::d(1, 1).le_angle(&m12));
        let d14 = Direction::d(-1, 4);
        let d13 = Direction::d(-1, 3);
        assert_eq!(d14.cmp_angle(&d13), Ordering::Less);
        assert_eq!(d13.cmp_angle(&m12), Ordering::Less);
        assert!(!Direction::d(-1, 1).le_angle(&m12));
        assert_eq!(Direction::d(1, -1).cmp_angle(&Direction::d(2, 1)), Ordering::Less);
    }

    #[test]
    fn vdeg_examples() {
        let d21 = Direction::d(2, 1);
        assert_eq!(vdeg(&parse_std("x^3*y").unwrap(), d21).unwrap(), 7);
        let p = parse_std("x^3*y + mu3*x^2").unwrap();
        assert_eq!(vdeg(&p, Direction::d(1, -1)).unwrap(), 2);
        assert_eq!(vdeg(&parse_std("5").unwrap(), d21).unwrap(), 0);
        assert!(vdeg(&parse_std("0").unwrap(), d21).is_err());
    }

    #[test]
    fn leading_forms_of_the_family() {
        let p = p5a();
        let lead = leading_form(&p, Direction::d(1, -1)).unwrap();
        assert_eq!(lead, parse_std("x^3*y + mu3*x^2").unwrap());
        let top = leading_form(&p, Direction::d(1, 1)).unwrap();
        assert_eq!(top, parse_std("y^7/7").unwrap());
        let mono = parse_std("x^2*y^5").unwrap();
        assert_eq!(leading_form(&mono, Direction::d(1, 1)).unwrap(), mono);
    }

    #[test]
    fn trailing_forms() {
        let p = parse_std("x + y^2").unwrap();
        assert_eq!(trailing_form(&p, Direction::d(1, 1)).unwrap(), parse_std("x").unwrap());
        // the x-inversion image has leading form = image of the trailing form
        let img = crate::subst::SubstMap::x_inversion(p.ctx()).apply(&p).unwrap();
        let img = img.as_laurent().unwrap();
        let lead = leading_form(img, Direction::d(1, -4)).unwrap();
        assert_eq!(lead, parse_std("x^-1").unwrap());
        // x^0 part of the family
        let tail = trailing_form(&p5a(), Direction::d(1, 0)).unwrap();
        assert_eq!(tail, parse_std("y^7/7 + mu3*y^4/4").unwrap());
        let mono = parse_std("x^2*y^5").unwrap();
        assert_eq!(trailing_form(&mono, Direction::d(2, 1)).unwrap(), mono);
    }

    #[test]
    fn direction_sets() {
        let two = parse_std("x^3*y + mu3*x^2").unwrap();
        assert_eq!(directions(&two).unwrap(), vec![Direction::d(1, -1)]);
        assert!(directions(&parse_std("x^2*y").unwrap()).unwrap().is_empty());
        assert_eq!(
            directions(&p5a()).unwrap(),
            vec![Direction::d(1, -1), Direction::d(2, 1)]
        );
    }

    #[test]
    fn edge_endpoint_conventions() {
        // documented case: the (j,1) edge of the family runs (3,1) -> (0, 3j+1)
        let e = edge_endpoints(&p5a(), Direction::d(2, 1)).unwrap();
        assert_eq!(e.st, (3, 1));
        assert_eq!(e.en, (0, 7));
        assert_eq!(e.t, 3); // en - st = 3 * (-sigma, rho) = 3 * (-1, 2)
        let e2 = edge_endpoints(&parse_std("x^3*y + mu3*x^2").unwrap(), Direction::d(1, -1)).unwrap();
        assert_eq!((e2.st, e2.en, e2.t), ((2, 0), (3, 1), 1));
        // vertical-edge case: same v-level under (1, 0), ordered by j
        let e3 = edge_endpoints(&parse_std("x^2*y^3 + x^2*y^5").unwrap(), Direction::d(1, 0)).unwrap();
        assert_eq!((e3.st, e3.en), ((2, 3), (2, 5)));
    }

    #[test]
    fn succ_and_pred_wrap_cyclically() {
        // support realizing Dir = {(1,1), (-1,4), (-1,2)}
        let p = parse_std("1 + x^2*y + x^6*y^2 + x^7*y + x^8").unwrap();
        let dirs = directions(&p).unwrap();
        assert_eq!(
            dirs,
            vec![Direction::d(1, 1), Direction::d(-1, 4), Direction::d(-1, 2)]
        );
        assert_eq!(succ_dir(&p, Direction::d(-1, 4)).unwrap(), Direction::d(-1, 2));
        assert_eq!(pred_dir(&p, Direction::d(1, 1)).unwrap(), Direction::d(-1, 2));
        assert_eq!(succ_dir(&p, Direction::d(-1, 2)).unwrap(), Direction::d(1, 1));
    }

    #[test]
    fn direction_maps() {
        assert_eq!(Direction::d(2, 1).map_x_inversion(), Direction::d(-2, 7));
        assert_eq!(Direction::d(1, 1).map_x_inversion(), Direction::d(-1, 4));
        assert_eq!(Direction::d(3, 1).map_quarter_turn(), Direction::d(1, 3));
        // boundary of the branch: (-1,2) itself maps with the "<=" arm
        assert_eq!(Direction::d(-1, 2).map_x_inversion(), Direction::d(1, -1));
        // strictly past the boundary the other arm fires
        assert_eq!(Direction::d(-1, 1).map_x_inversion(), Direction::d(-1, 2));
    }

    #[test]
    fn leading_form_idempotent() {
        let p = p5a();
        for d in [Direction::d(1, 1), Direction::d(1, -1), Direction::d(2, 1)] {
            let l = leading_form(&p, d).unwrap();
            assert_eq!(leading_form(&l, d).unwrap(), l);
        }
    }
}
