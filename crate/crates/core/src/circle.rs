//! Exact points and anticlockwise arcs on the circle `R/Z`.

use std::fmt;

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, frac, offset, Q};

/// A point of `R/Z`, stored as its representative in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CirclePoint(#[serde(with = "crate::rational::serde_q")] Q);

impl CirclePoint {
    pub fn new(value: Q) -> Self {
        canonicalize(&value)
    }

    pub fn zero() -> Self {
        CirclePoint(Q::zero())
    }

    pub fn value(&self) -> &Q {
        &self.0
    }

    pub fn into_value(self) -> Q {
        self.0
    }

    /// Anticlockwise distance from `self` to `other`, in `[0, 1)`.
    pub fn distance_to(&self, other: &CirclePoint) -> Q {
        offset(&self.0, &other.0)
    }

    pub fn shifted(&self, by: &Q) -> CirclePoint {
        canonicalize(&(&self.0 + by))
    }
}

impl fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_q(&self.0))
    }
}

impl From<Q> for CirclePoint {
    fn from(q: Q) -> Self {
        canonicalize(&q)
    }
}

pub fn canonicalize(q: &Q) -> CirclePoint {
    CirclePoint(frac(q))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Closure {
    Open,
    Closed,
    /// `[start, end)`
    ClosedOpen,
    /// `(start, end]`
    OpenClosed,
}

impl Closure {
    fn includes_start(self) -> bool {
        matches!(self, Closure::Closed | Closure::ClosedOpen)
    }

    fn includes_end(self) -> bool {
        matches!(self, Closure::Closed | Closure::OpenClosed)
    }
}

/// An anticlockwise arc from `start` to `end`, or the whole circle.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Arc {
    Full,
    Proper {
        start: CirclePoint,
        end: CirclePoint,
        closure: Closure,
    },
}

pub fn arc_between(a: &CirclePoint, b: &CirclePoint, closure: Closure) -> Arc {
    Arc::Proper {
        start: a.clone(),
        end: b.clone(),
        closure,
    }
}

impl Arc {
    pub fn open(a: &CirclePoint, b: &CirclePoint) -> Arc {
        arc_between(a, b, Closure::Open)
    }

    pub fn closed(a: &CirclePoint, b: &CirclePoint) -> Arc {
        arc_between(a, b, Closure::Closed)
    }

    /// Length in `[0, 1]`; degenerate arcs have length zero.
    pub fn length(&self) -> Q {
        match self {
            Arc::Full => Q::from_integer(1.into()),
            Arc::Proper { start, end, .. } => start.distance_to(end),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Arc::Full => false,
            Arc::Proper {
                start,
                end,
                closure,
            } => start == end && *closure != Closure::Closed,
        }
    }

    pub fn contains(&self, x: &CirclePoint) -> bool {
        match self {
            Arc::Full => true,
            Arc::Proper {
                start,
                end,
                closure,
            } => {
                let len = start.distance_to(end);
                let pos = start.distance_to(x);
                if start == end {
                    return *closure == Closure::Closed && pos.is_zero();
                }
                if pos.is_zero() {
                    closure.includes_start()
                } else if pos == len {
                    closure.includes_end()
                } else {
                    pos < len
                }
            }
        }
    }

    /// Splits a proper arc at an interior point into `[start, p]` and `[p, end]`
    /// (closures at the outer ends are kept, the cut is closed on both sides).
    pub fn split_at(&self, p: &CirclePoint) -> Result<(Arc, Arc)> {
        match self {
            Arc::Full => Err(Error::Precondition("cannot split the full circle".into())),
            Arc::Proper {
                start,
                end,
                closure,
            } => {
                let pos = start.distance_to(p);
                if pos.is_zero() || pos >= start.distance_to(end) {
                    return Err(Error::Precondition(format!("{p} is not interior")));
                }
                let left = if closure.includes_start() {
                    Closure::Closed
                } else {
                    Closure::OpenClosed
                };
                let right = if closure.includes_end() {
                    Closure::Closed
                } else {
                    Closure::ClosedOpen
                };
                Ok((
                    arc_between(start, p, left),
                    arc_between(p, end, right),
                ))
            }
        }
    }
}

/// True iff the open anticlockwise arc `(u, v)` is contained in `arc`, i.e. `u < v` in `arc`.
pub fn cyclic_less(u: &CirclePoint, v: &CirclePoint, arc: &Arc) -> Result<bool> {
    let Arc::Proper { start, .. } = arc else {
        return Err(Error::Precondition(
            "cyclic order is undefined on the full circle".into(),
        ));
    };
    for p in [u, v] {
        if !arc.contains(p) {
            return Err(Error::Precondition(format!("{p} is not in the arc")));
        }
    }
    Ok(start.distance_to(u) < start.distance_to(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn cp(n: i64, d: i64) -> CirclePoint {
        CirclePoint::new(q(n, d))
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(canonicalize(&q(5, 4)), cp(1, 4));
        assert_eq!(canonicalize(&q(-1, 3)), cp(2, 3));
        assert_eq!(canonicalize(&qi(0)), CirclePoint::zero());
        assert_eq!(canonicalize(&q(7, 3)), canonicalize(&q(-5, 3)));
    }

    #[test]
    fn cyclic_less_examples() {
        let i = Arc::open(&cp(0, 1), &cp(1, 2));
        assert!(cyclic_less(&cp(1, 8), &cp(1, 4), &i).unwrap());
        assert!(!cyclic_less(&cp(1, 4), &cp(1, 8), &i).unwrap());
        let wrap = Arc::open(&cp(1, 2), &cp(1, 4));
        assert!(cyclic_less(&cp(3, 4), &cp(1, 8), &wrap).unwrap());
    }

    #[test]
    fn cyclic_less_errors() {
        let i = Arc::open(&cp(0, 1), &cp(1, 2));
        assert!(cyclic_less(&cp(3, 4), &cp(1, 4), &i).is_err());
        assert!(cyclic_less(&cp(0, 1), &cp(1, 4), &i).is_err());
        assert!(cyclic_less(&cp(1, 8), &cp(1, 4), &Arc::Full).is_err());
    }

    #[test]
    fn arc_between_examples() {
        let a = arc_between(&cp(0, 1), &cp(1, 2), Closure::Closed);
        assert_eq!(a.length(), q(1, 2));
        assert!(a.contains(&cp(0, 1)) && a.contains(&cp(1, 2)));
        let w = arc_between(&cp(3, 4), &cp(1, 4), Closure::Open);
        assert_eq!(w.length(), q(1, 2));
        assert!(w.contains(&CirclePoint::zero()));
        assert!(!w.contains(&cp(1, 2)));
        let e = arc_between(&cp(1, 3), &cp(1, 3), Closure::Open);
        assert!(e.is_empty());
        assert!(!e.contains(&cp(1, 3)));
    }

    #[test]
    fn split_is_additive() {
        let a = Arc::closed(&cp(3, 4), &cp(1, 4));
        let (l, r) = a.split_at(&cp(1, 8)).unwrap();
        assert_eq!(l.length() + r.length(), a.length());
    }
}
