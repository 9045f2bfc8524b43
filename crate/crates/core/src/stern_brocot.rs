//! Stern–Brocot enumeration of the fractions inside a closed interval.

use num::bigint::BigInt;
use num::{One, ToPrimitive, Zero};

use crate::rational::{floor_int, Q};

/// All fractions `p/q` in lowest terms with `lo <= p/q <= hi` and
/// `q <= max_den`, ordered by `(q, p)` so the simplest candidate comes first.
pub fn fractions_in(lo: &Q, hi: &Q, max_den: u64) -> Vec<(BigInt, u64)> {
    if lo > hi || max_den == 0 {
        return Vec::new();
    }
    let shift = floor_int(lo);
    let s = Q::from_integer(shift.clone());
    let (lo, hi) = (lo - &s, hi - &s);
    let mut out = Vec::new();
    if lo.is_zero() {
        out.push((BigInt::zero(), 1u64));
    }
    // explicit stack: (left p, left q, right p, right q); right may be 1/0
    let mut stack = vec![(BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero())];
    while let Some((a, b, c, d)) = stack.pop() {
        let p = &a + &c;
        let qd = &b + &d;
        if qd.to_u64().is_none_or(|v| v > max_den) {
            continue;
        }
        let m = Q::new(p.clone(), qd.clone());
        if m >= lo && m <= hi {
            out.push((p.clone(), qd.to_u64().unwrap()));
        }
        if lo < m {
            stack.push((a.clone(), b.clone(), p.clone(), qd.clone()));
        }
        if hi > m {
            stack.push((p, qd, c, d));
        }
    }
    for (p, q) in out.iter_mut() {
        *p += &shift * BigInt::from(*q);
    }
    out.sort_by(|x, y| x.1.cmp(&y.1).then_with(|| x.0.cmp(&y.0)));
    out.dedup();
    out
}
