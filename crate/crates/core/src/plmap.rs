//! Piecewise-linear circle homeomorphisms stored as lifts `F: R -> R`.
//!
//! A map is kept in canonical form: the first vertex sits at `x = 0`, its
//! value lies in `[0, 1)`, and no other vertex is collinear with its
//! neighbours. Equality of maps is then equality of the vertex lists.

use std::fmt;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::circle::{canonicalize, CirclePoint};
use crate::error::{Error, Result};
use crate::rational::{floor_int, fmt_q, frac, parse_q, qi, Q};

pub const MAP_FORMAT: &str = "circrev-map/1";

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PLMap {
    degree: i8,
    xs: Vec<Q>,
    ys: Vec<Q>,
}

impl fmt::Debug for PLMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PLMap(deg {}, [", self.degree)?;
        for (i, (x, y)) in self.xs.iter().zip(&self.ys).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({}, {})", fmt_q(x), fmt_q(y))?;
        }
        f.write_str("])")
    }
}

fn lift_int(n: &num::BigInt) -> Q {
    Q::from_integer(n.clone())
}

impl PLMap {
    /// Builds a map from lift vertices. `x` values may lie anywhere on the
    /// line as long as they are distinct mod 1; they are reduced using the
    /// lift relation `F(x + 1) = F(x) + degree`.
    pub fn from_lift_vertices(degree: i8, vertices: Vec<(Q, Q)>) -> Result<PLMap> {
        if degree != 1 && degree != -1 {
            return Err(Error::InvalidMap(format!("degree must be 1 or -1, got {degree}")));
        }
        if vertices.is_empty() {
            return Err(Error::InvalidMap("no vertices".into()));
        }
        let d = qi(degree as i64);
        let mut pts: Vec<(Q, Q)> = vertices
            .into_iter()
            .map(|(x, y)| {
                let n = lift_int(&floor_int(&x));
                (&x - &n, y - &d * &n)
            })
            .collect();
        pts.sort_by(|a, b| a.0.cmp(&b.0));
        for w in pts.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidMap(format!(
                    "two vertices share x = {} mod 1",
                    fmt_q(&w[0].0)
                )));
            }
        }
        Self::check_monotone(degree, &pts)?;
        if !pts[0].0.is_zero() {
            // interpolate the wrap segment at x = 0
            let (xl, yl) = pts.last().unwrap().clone();
            let (x0, y0) = pts[0].clone();
            let (xa, ya) = (xl - Q::one(), yl - &d);
            let y = &ya + (-&xa) * (&y0 - &ya) / (&x0 - &xa);
            pts.insert(0, (Q::zero(), y));
        }
        Ok(Self::canonical(degree, pts))
    }

    fn check_monotone(degree: i8, pts: &[(Q, Q)]) -> Result<()> {
        let d = qi(degree as i64);
        let n = pts.len();
        for i in 0..n {
            let (_, ya) = &pts[i];
            let yb = if i + 1 < n {
                pts[i + 1].1.clone()
            } else {
                &pts[0].1 + &d
            };
            let ok = if degree == 1 { &yb > ya } else { &yb < ya };
            if !ok {
                return Err(Error::InvalidMap(format!(
                    "vertices {} and {} (x = {}, {}): lift is not strictly {}",
                    i,
                    (i + 1) % n,
                    fmt_q(&pts[i].0),
                    fmt_q(&pts[(i + 1) % n].0),
                    if degree == 1 { "increasing" } else { "decreasing" }
                )));
            }
        }
        Ok(())
    }

    fn canonical(degree: i8, mut pts: Vec<(Q, Q)>) -> PLMap {
        let shift = lift_int(&floor_int(&pts[0].1));
        for p in pts.iter_mut() {
            p.1 -= &shift;
        }
        let d = qi(degree as i64);
        // drop collinear vertices other than the anchor at 0
        let mut changed = true;
        while changed && pts.len() > 1 {
            changed = false;
            let n = pts.len();
            for i in 1..n {
                let prev = &pts[i - 1];
                let next = if i + 1 < n {
                    pts[i + 1].clone()
                } else {
                    (Q::one(), &pts[0].1 + &d)
                };
                let cur = &pts[i];
                let s1 = (&cur.1 - &prev.1) / (&cur.0 - &prev.0);
                let s2 = (&next.1 - &cur.1) / (&next.0 - &cur.0);
                if s1 == s2 {
                    pts.remove(i);
                    changed = true;
                    break;
                }
            }
        }
        let (xs, ys) = pts.into_iter().unzip();
        PLMap { degree, xs, ys }
    }

    /// Builds a map from circle points `x_i -> y_i` given in anticlockwise
    /// order of `x`, unwrapping the images into a monotone lift.
    pub fn from_circle_points(degree: i8, pairs: &[(CirclePoint, CirclePoint)]) -> Result<PLMap> {
        if pairs.is_empty() {
            return Err(Error::InvalidMap("no vertices".into()));
        }
        let mut sorted: Vec<_> = pairs.to_vec();
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        sorted.dedup();
        let mut lift = Vec::with_capacity(sorted.len());
        let mut y = sorted[0].1.value().clone();
        let mut total = Q::zero();
        for i in 0..sorted.len() {
            lift.push((sorted[i].0.value().clone(), y.clone()));
            let next = &sorted[(i + 1) % sorted.len()].1;
            let step = if degree == 1 {
                sorted[i].1.distance_to(next)
            } else {
                next.distance_to(&sorted[i].1)
            };
            if step.is_zero() && sorted.len() > 1 {
                return Err(Error::InvalidMap(format!(
                    "points {} and its successor have the same image",
                    sorted[i].0
                )));
            }
            total += &step;
            if degree == 1 {
                y += step;
            } else {
                y -= step;
            }
        }
        if sorted.len() > 1 && total != Q::one() {
            return Err(Error::InvalidMap(
                "images do not wind exactly once around the circle".into(),
            ));
        }
        PLMap::from_lift_vertices(degree, lift)
    }

    pub fn identity() -> PLMap {
        PLMap::rotation(&Q::zero())
    }

    pub fn rotation(angle: &Q) -> PLMap {
        PLMap {
            degree: 1,
            xs: vec![Q::zero()],
            ys: vec![frac(angle)],
        }
    }

    /// `x -> c - x`.
    pub fn reflection(c: &Q) -> PLMap {
        PLMap {
            degree: -1,
            xs: vec![Q::zero()],
            ys: vec![frac(c)],
        }
    }

    pub fn degree(&self) -> i8 {
        self.degree
    }

    pub fn vertex_count(&self) -> usize {
        self.xs.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = (&Q, &Q)> {
        self.xs.iter().zip(self.ys.iter())
    }

    /// Breakpoint abscissae in `[0, 1)`.
    pub fn breakpoints(&self) -> &[Q] {
        &self.xs
    }

    fn segment_end(&self, i: usize) -> (Q, Q) {
        if i + 1 < self.xs.len() {
            (self.xs[i + 1].clone(), self.ys[i + 1].clone())
        } else {
            (Q::one(), &self.ys[0] + qi(self.degree as i64))
        }
    }

    /// Affine segments `[(x_a, y_a), (x_b, y_b)]` of the lift over `[0, 1]`.
    pub fn segments(&self) -> Vec<((Q, Q), (Q, Q))> {
        (0..self.xs.len())
            .map(|i| {
                (
                    (self.xs[i].clone(), self.ys[i].clone()),
                    self.segment_end(i),
                )
            })
            .collect()
    }

    /// Evaluates the lift at any real rational.
    pub fn lift_eval(&self, x: &Q) -> Q {
        let n = lift_int(&floor_int(x));
        let r = x - &n;
        let i = match self.xs.binary_search(&r) {
            Ok(i) => return &self.ys[i] + &n * qi(self.degree as i64),
            Err(i) => i - 1,
        };
        let (xb, yb) = self.segment_end(i);
        let (xa, ya) = (&self.xs[i], &self.ys[i]);
        let y = ya + (&r - xa) * (&yb - ya) / (&xb - xa);
        y + &n * qi(self.degree as i64)
    }

    /// The unique `x` with `F(x) = u`.
    pub fn lift_preimage(&self, u: &Q) -> Q {
        let y0 = &self.ys[0];
        let (n, s) = if self.degree == 1 {
            let n = lift_int(&floor_int(&(u - y0)));
            let s = u - &n;
            (n, s)
        } else {
            let n = lift_int(&floor_int(&(y0 - u)));
            let s = u + &n;
            (n, s)
        };
        // s lies between F(0) and F(1); locate the segment
        let segs = self.xs.len();
        let mut lo = 0usize;
        let mut hi = segs;
        // find last i with ys[i] <= s (increasing) or ys[i] >= s (decreasing)
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            let before = if self.degree == 1 {
                self.ys[mid] <= s
            } else {
                self.ys[mid] >= s
            };
            if before {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (xb, yb) = self.segment_end(lo);
        let (xa, ya) = (&self.xs[lo], &self.ys[lo]);
        let x = if &s == ya {
            xa.clone()
        } else {
            xa + (&s - ya) * (&xb - xa) / (&yb - ya)
        };
        x + n
    }

    pub fn evaluate(&self, x: &CirclePoint) -> CirclePoint {
        canonicalize(&self.lift_eval(x.value()))
    }

    pub fn evaluate_inverse(&self, y: &CirclePoint) -> CirclePoint {
        canonicalize(&self.lift_preimage(y.value()))
    }

    /// Slope of the lift on the segment containing `x` (right derivative).
    pub fn slope_at(&self, x: &CirclePoint) -> Q {
        let r = x.value();
        let i = match self.xs.binary_search(r) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let (xb, yb) = self.segment_end(i);
        (&yb - &self.ys[i]) / (&xb - &self.xs[i])
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &PLMap) -> PLMap {
        let mut ts: Vec<Q> = other.xs.clone();
        for x in &self.xs {
            ts.push(frac(&other.lift_preimage(x)));
        }
        ts.sort();
        ts.dedup();
        let pts = ts
            .into_iter()
            .map(|t| {
                let y = self.lift_eval(&other.lift_eval(&t));
                (t, y)
            })
            .collect();
        PLMap::canonical(self.degree * other.degree, pts)
    }

    pub fn invert(&self) -> PLMap {
        let mut us: Vec<Q> = self.ys.iter().map(frac).collect();
        us.push(Q::zero());
        us.sort();
        us.dedup();
        let pts = us
            .into_iter()
            .map(|u| {
                let x = self.lift_preimage(&u);
                (u, x)
            })
            .collect();
        PLMap::canonical(self.degree, pts)
    }

    pub fn pow(&self, n: i64) -> PLMap {
        let base = if n < 0 { self.invert() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = PLMap::identity();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.compose(&sq);
            }
        }
        acc
    }

    /// `h ∘ self ∘ h⁻¹`.
    pub fn conjugate_by(&self, h: &PLMap) -> PLMap {
        h.compose(self).compose(&h.invert())
    }

    pub fn is_identity(&self) -> bool {
        self.degree == 1 && self.xs.len() == 1 && self.ys[0].is_zero()
    }

    /// True iff `self ∘ self` is the identity (the identity counts).
    pub fn is_involution(&self) -> bool {
        self.compose(self).is_identity()
    }

    /// Largest numerator/denominator size among the vertices, in bits.
    pub fn height_bits(&self) -> u64 {
        self.xs
            .iter()
            .chain(&self.ys)
            .map(crate::rational::height_bits)
            .max()
            .unwrap_or(0)
    }

    pub fn to_description(&self) -> MapDescription {
        MapDescription {
            format: Some(MAP_FORMAT.to_string()),
            degree: self.degree as i64,
            vertices: self
                .xs
                .iter()
                .zip(&self.ys)
                .map(|(x, y)| [fmt_q(x), fmt_q(y)])
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_description()).expect("map serializes")
    }

    pub fn from_json(s: &str) -> Result<PLMap> {
        let desc: MapDescription = serde_json::from_str(s)
            .map_err(|e| Error::Parse(format!("map JSON: {e}")))?;
        desc.to_map()
    }
}

/// The JSON form of a map: `{"degree": 1, "vertices": [["x", "y"], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapDescription {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    pub degree: i64,
    pub vertices: Vec<[String; 2]>,
}

impl MapDescription {
    pub fn to_map(&self) -> Result<PLMap> {
        if let Some(f) = &self.format {
            if f != MAP_FORMAT {
                return Err(Error::Parse(format!("unsupported map format {f:?}")));
            }
        }
        if self.degree != 1 && self.degree != -1 {
            return Err(Error::InvalidMap(format!(
                "degree must be 1 or -1, got {}",
                self.degree
            )));
        }
        let degree = self.degree as i8;
        let mut pts = Vec::with_capacity(self.vertices.len());
        for (i, [xs, ys]) in self.vertices.iter().enumerate() {
            let x = parse_q(xs).map_err(|e| Error::Parse(format!("vertex {i}: {e}")))?;
            let y = parse_q(ys).map_err(|e| Error::Parse(format!("vertex {i}: {e}")))?;
            pts.push((x, y));
        }
        if pts.is_empty() {
            return Err(Error::InvalidMap("no vertices".into()));
        }
        // an explicit closing vertex at x = 1 is accepted if it agrees with the lift
        if pts.len() > 1 && pts.last().unwrap().0 == Q::one() {
            let (_, yl) = pts.pop().unwrap();
            if pts[0].0.is_zero() && yl != &pts[0].1 + qi(degree as i64) {
                return Err(Error::InvalidMap(format!(
                    "vertex {}: closing vertex at x = 1 must equal F(0) + degree",
                    pts.len()
                )));
            }
        }
        for (i, (x, _)) in pts.iter().enumerate() {
            if x.is_negative() || x >= &Q::one() {
                return Err(Error::InvalidMap(format!(
                    "vertex {i}: x = {} is outside [0, 1)",
                    fmt_q(x)
                )));
            }
            if i > 0 && x <= &pts[i - 1].0 {
                return Err(Error::InvalidMap(format!(
                    "vertex {i}: x = {} is not strictly greater than the previous vertex",
                    fmt_q(x)
                )));
            }
        }
        PLMap::check_monotone(degree, &pts)?;
        PLMap::from_lift_vertices(degree, pts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn cp(n: i64, d: i64) -> CirclePoint {
        CirclePoint::new(q(n, d))
    }

    pub(crate) fn sawtooth() -> PLMap {
        PLMap::from_lift_vertices(1, vec![(q(0, 1), q(0, 1)), (q(1, 2), q(1, 4))]).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(PLMap::rotation(&q(1, 3)).evaluate(&cp(5, 6)), cp(1, 6));
        assert_eq!(sawtooth().evaluate(&cp(1, 4)), cp(1, 8));
        assert_eq!(PLMap::reflection(&q(0, 1)).evaluate(&cp(1, 3)), cp(2, 3));
    }

    #[test]
    fn compose_examples() {
        let r = PLMap::rotation(&q(1, 3));
        assert_eq!(r.compose(&r), PLMap::rotation(&q(2, 3)));
        let f = sawtooth();
        assert!(f.compose(&f.invert()).is_identity());
        let s = PLMap::reflection(&q(0, 1));
        assert!(s.compose(&s).is_identity());
    }

    #[test]
    fn invert_examples() {
        assert_eq!(PLMap::rotation(&q(1, 3)).invert(), PLMap::rotation(&q(2, 3)));
        let inv = sawtooth().invert();
        let expected =
            PLMap::from_lift_vertices(1, vec![(q(0, 1), q(0, 1)), (q(1, 4), q(1, 2))]).unwrap();
        assert_eq!(inv, expected);
        assert!(PLMap::identity().invert().is_identity());
    }

    #[test]
    fn involution_examples() {
        assert!(PLMap::rotation(&q(1, 2)).is_involution());
        assert!(!PLMap::rotation(&q(1, 3)).is_involution());
        assert!(PLMap::reflection(&q(0, 1)).is_involution());
        assert!(PLMap::identity().is_involution());
    }

    #[test]
    fn canonical_form_drops_collinear_vertices() {
        let m = PLMap::from_lift_vertices(
            1,
            vec![(q(0, 1), q(1, 1)), (q(1, 4), q(5, 4)), (q(1, 2), q(3, 2))],
        )
        .unwrap();
        assert!(m.is_identity());
    }

    #[test]
    fn wrap_segment_gets_anchor() {
        let m = PLMap::from_lift_vertices(1, vec![(q(1, 4), q(1, 4)), (q(3, 4), q(1, 2))]).unwrap();
        assert_eq!(m.breakpoints()[0], q(0, 1));
        assert_eq!(m.evaluate(&cp(1, 4)), cp(1, 4));
        assert_eq!(m.evaluate(&cp(3, 4)), cp(1, 2));
    }

    #[test]
    fn json_round_trip_and_diagnostics() {
        let f = sawtooth();
        assert_eq!(PLMap::from_json(&f.to_json()).unwrap(), f);
        let closing = r#"{"degree":1,"vertices":[["0","0"],["1/2","1/4"],["1","1"]]}"#;
        assert_eq!(PLMap::from_json(closing).unwrap(), f);
        let bad = r#"{"degree":1,"vertices":[["0","0"],["1/2","3/4"],["1/4","1/2"]]}"#;
        let e = PLMap::from_json(bad).unwrap_err().to_string();
        assert!(e.contains("vertex 2"), "{e}");
        let nonmono = r#"{"degree":1,"vertices":[["0","0"],["1/2","3/4"],["3/4","1/2"]]}"#;
        let e = PLMap::from_json(nonmono).unwrap_err().to_string();
        assert!(e.contains("vertices 1 and 2"), "{e}");
        assert!(PLMap::from_json(r#"{"degree":2,"vertices":[["0","0"]]}"#).is_err());
    }

    #[test]
    fn from_circle_points_unwraps() {
        let pairs = vec![
            (cp(0, 1), cp(1, 2)),
            (cp(1, 4), cp(3, 4)),
            (cp(1, 2), cp(0, 1)),
        ];
        let h = PLMap::from_circle_points(1, &pairs).unwrap();
        assert_eq!(h, PLMap::rotation(&q(1, 2)));
        let bad = vec![
            (cp(0, 1), cp(0, 1)),
            (cp(1, 4), cp(1, 2)),
            (cp(1, 2), cp(1, 4)),
        ];
        assert!(PLMap::from_circle_points(1, &bad).is_err());
    }

    #[test]
    fn pow_matches_repeated_compose() {
        let f = sawtooth().compose(&PLMap::rotation(&q(1, 5)));
        let mut acc = PLMap::identity();
        for _ in 0..5 {
            acc = acc.compose(&f);
        }
        assert_eq!(f.pow(5), acc);
        assert!(f.pow(-3).compose(&f.pow(3)).is_identity());
    }
}
