//! Fixed sets, signatures, rotation numbers and minimal periods of PL maps.

use std::fmt;

use num::bigint::BigInt;
use num::{Integer, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::circle::{canonicalize, CirclePoint};
use crate::error::{Error, Result};
use crate::plmap::PLMap;
use crate::rational::{fmt_q, frac, half, height_bits, qi, round_down, round_up, Q};
use crate::stern_brocot::fractions_in;

/// A maximal connected piece of a fixed set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FixComponent {
    Point(CirclePoint),
    /// Closed anticlockwise arc `[start, end]`.
    Arc { start: CirclePoint, end: CirclePoint },
}

impl FixComponent {
    pub fn start(&self) -> &CirclePoint {
        match self {
            FixComponent::Point(p) => p,
            FixComponent::Arc { start, .. } => start,
        }
    }

    pub fn end(&self) -> &CirclePoint {
        match self {
            FixComponent::Point(p) => p,
            FixComponent::Arc { end, .. } => end,
        }
    }

    pub fn length(&self) -> Q {
        self.start().distance_to(self.end())
    }

    pub fn kind(&self) -> FixKind {
        match self {
            FixComponent::Point(_) => FixKind::Point,
            FixComponent::Arc { .. } => FixKind::Arc,
        }
    }

    pub fn contains(&self, x: &CirclePoint) -> bool {
        self.start().distance_to(x) <= self.length()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixKind {
    Point,
    Arc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixSet {
    FullCircle,
    /// Components in anticlockwise order, starting with the one containing 0
    /// or else the first one after 0. Empty when there are no fixed points.
    Components(Vec<FixComponent>),
}

impl FixSet {
    pub fn is_empty(&self) -> bool {
        matches!(self, FixSet::Components(c) if c.is_empty())
    }

    pub fn components(&self) -> &[FixComponent] {
        match self {
            FixSet::FullCircle => &[],
            FixSet::Components(c) => c,
        }
    }

    pub fn contains(&self, x: &CirclePoint) -> bool {
        match self {
            FixSet::FullCircle => true,
            FixSet::Components(c) => c.iter().any(|k| k.contains(x)),
        }
    }
}

/// Solves `F(x) = x + k` segmentwise over all integers `k`.
pub fn fixed_points(f: &PLMap) -> FixSet {
    // closed intervals [s, e] inside [0, 1]
    let mut pieces: Vec<(Q, Q)> = Vec::new();
    for ((xa, ya), (xb, yb)) in f.segments() {
        let da = &ya - &xa;
        let db = &yb - &xb;
        if da == db {
            if da.is_integer() {
                pieces.push((xa, xb));
            }
            continue;
        }
        let (lo, hi) = if da < db { (&da, &db) } else { (&db, &da) };
        let mut k = lo.ceil().to_integer();
        let kmax = hi.floor().to_integer();
        while k <= kmax {
            let kq = Q::from_integer(k.clone());
            let x = &xa + (&kq - &da) * (&xb - &xa) / (&db - &da);
            pieces.push((x.clone(), x));
            k += 1;
        }
    }
    for p in pieces.iter_mut() {
        if p.0 == Q::one() {
            *p = (Q::zero(), Q::zero());
        }
    }
    pieces.sort();
    let mut merged: Vec<(Q, Q)> = Vec::new();
    for (s, e) in pieces {
        if let Some(last) = merged.last_mut() {
            if s <= last.1 {
                if e > last.1 {
                    last.1 = e;
                }
                continue;
            }
        }
        merged.push((s, e));
    }
    if merged.len() == 1 && merged[0].0.is_zero() && merged[0].1 == Q::one() {
        return FixSet::FullCircle;
    }
    // glue a piece ending at 1 onto the piece starting at 0
    if merged.len() > 1 && merged.last().unwrap().1 == Q::one() && merged[0].0.is_zero() {
        let (s, _) = merged.pop().unwrap();
        merged[0].0 = s;
    } else if let Some(last) = merged.last_mut() {
        if last.1 == Q::one() {
            // ends at 1 but nothing starts at 0: 0 itself is fixed then
            last.1 = Q::one();
        }
    }
    let mut comps: Vec<FixComponent> = merged
        .into_iter()
        .map(|(s, e)| {
            if s == e {
                FixComponent::Point(canonicalize(&s))
            } else {
                FixComponent::Arc {
                    start: canonicalize(&s),
                    end: canonicalize(&e),
                }
            }
        })
        .collect();
    // the wrapped component (start > end) contains 0 and goes first
    if let Some(pos) = comps
        .iter()
        .position(|c| matches!(c, FixComponent::Arc { start, end } if start > end))
    {
        comps.rotate_left(pos);
    }
    FixSet::Components(comps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Point,
    Arc,
    /// Fixed-point-free open arc; `+1` when points move anticlockwise.
    Gap(i8),
}

/// One entry of the alternating sequence fix component, gap, fix component, ...
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    pub kind: ElementKind,
    pub start: CirclePoint,
    pub len: Q,
}

impl Element {
    pub fn end(&self) -> CirclePoint {
        self.start.shifted(&self.len)
    }

    pub fn midpoint(&self) -> CirclePoint {
        self.start.shifted(&(&self.len * half()))
    }

    pub fn is_gap(&self) -> bool {
        matches!(self.kind, ElementKind::Gap(_))
    }

    pub fn sign(&self) -> i8 {
        match self.kind {
            ElementKind::Gap(s) => s,
            _ => 0,
        }
    }

    /// Membership in the closed element.
    pub fn contains_closed(&self, x: &CirclePoint) -> bool {
        let pos = self.start.distance_to(x);
        pos <= self.len || (self.len == Q::one())
    }
}

/// The alternating decomposition of the circle by the fixed set of a degree-1
/// map: `elements[2i]` is the i-th fix component and `elements[2i + 1]` the gap
/// following it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub elements: Vec<Element>,
}

impl Layout {
    pub fn of(f: &PLMap) -> Result<Layout> {
        if f.degree() != 1 {
            return Err(Error::Precondition("layout needs an orientation preserving map".into()));
        }
        let comps = match fixed_points(f) {
            FixSet::FullCircle => {
                return Err(Error::Precondition("the identity has no gaps".into()))
            }
            FixSet::Components(c) if c.is_empty() => {
                return Err(Error::Precondition(
                    "signature is undefined for maps without fixed points".into(),
                ))
            }
            FixSet::Components(c) => c,
        };
        Ok(Layout::from_components(f, &comps))
    }

    pub fn from_components(f: &PLMap, comps: &[FixComponent]) -> Layout {
        let m = comps.len();
        let mut elements = Vec::with_capacity(2 * m);
        for i in 0..m {
            let c = &comps[i];
            elements.push(Element {
                kind: match c.kind() {
                    FixKind::Point => ElementKind::Point,
                    FixKind::Arc => ElementKind::Arc,
                },
                start: c.start().clone(),
                len: c.length(),
            });
            let gs = c.end().clone();
            let ge = comps[(i + 1) % m].start();
            let mut len = gs.distance_to(ge);
            if len.is_zero() {
                len = Q::one();
            }
            let mid = gs.shifted(&(&len * half()));
            let moved = gs.distance_to(&f.evaluate(&mid));
            let sign = if moved > &len * half() { 1 } else { -1 };
            elements.push(Element {
                kind: ElementKind::Gap(sign),
                start: gs,
                len,
            });
        }
        Layout { elements }
    }

    /// Number of fix components `m`.
    pub fn blocks(&self) -> usize {
        self.elements.len() / 2
    }

    pub fn element(&self, i: i64) -> &Element {
        let n = self.elements.len() as i64;
        &self.elements[i.rem_euclid(n) as usize]
    }

    /// Index of the element containing `x`, preferring fix components at endpoints.
    pub fn locate(&self, x: &CirclePoint) -> usize {
        for (i, e) in self.elements.iter().enumerate().step_by(2) {
            if e.contains_closed(x) {
                return i;
            }
        }
        for (i, e) in self.elements.iter().enumerate().skip(1).step_by(2) {
            if e.contains_closed(x) {
                return i;
            }
        }
        unreachable!("elements tile the circle")
    }

    pub fn signature_value(&self, x: &CirclePoint) -> i8 {
        self.elements[self.locate(x)].sign()
    }

    pub fn word(&self) -> Vec<Block> {
        self.elements
            .chunks(2)
            .map(|pair| Block {
                fix: match pair[0].kind {
                    ElementKind::Point => FixComponent::Point(pair[0].start.clone()),
                    _ => FixComponent::Arc {
                        start: pair[0].start.clone(),
                        end: pair[0].end(),
                    },
                },
                sign: pair[1].sign(),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub fix: FixComponent,
    /// Sign on the open interval following `fix`.
    pub sign: i8,
}

/// Combinatorial form of the signature `Δ_f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SignatureWord {
    Identity,
    NoFixedPoints,
    Blocks(Vec<Block>),
}

impl SignatureWord {
    pub fn shape(&self) -> Option<(Vec<FixKind>, Vec<i8>)> {
        match self {
            SignatureWord::Blocks(b) => Some((
                b.iter().map(|x| x.fix.kind()).collect(),
                b.iter().map(|x| x.sign).collect(),
            )),
            _ => None,
        }
    }

    /// Word with every sign flipped.
    pub fn negated(&self) -> SignatureWord {
        match self {
            SignatureWord::Blocks(b) => SignatureWord::Blocks(
                b.iter()
                    .map(|x| Block {
                        fix: x.fix.clone(),
                        sign: -x.sign,
                    })
                    .collect(),
            ),
            other => other.clone(),
        }
    }

    /// Compact text such as `(•)+ [•]− `.
    pub fn render(&self) -> String {
        match self {
            SignatureWord::Identity => "identity".into(),
            SignatureWord::NoFixedPoints => "no fixed points".into(),
            SignatureWord::Blocks(b) => b
                .iter()
                .map(|x| {
                    format!(
                        "{}{} ",
                        match x.fix {
                            FixComponent::Point(_) => "(•)",
                            FixComponent::Arc { .. } => "[•]",
                        },
                        if x.sign > 0 { "+" } else { "−" }
                    )
                })
                .collect(),
        }
    }
}

pub fn signature(f: &PLMap) -> Result<SignatureWord> {
    if f.degree() != 1 {
        return Err(Error::Precondition(
            "signature is defined for orientation preserving maps".into(),
        ));
    }
    match fixed_points(f) {
        FixSet::FullCircle => Ok(SignatureWord::Identity),
        FixSet::Components(c) if c.is_empty() => Err(Error::Precondition(
            "signature is undefined for maps without fixed points".into(),
        )),
        FixSet::Components(c) => Ok(SignatureWord::Blocks(Layout::from_components(f, &c).word())),
    }
}

/// Pointwise `Δ_f(x)`.
pub fn signature_value(f: &PLMap, fix: &FixSet, x: &CirclePoint) -> i8 {
    if fix.contains(x) {
        return 0;
    }
    let comps = fix.components();
    // gap containing x: between the last component starting before x and the next
    let mut best: Option<(&FixComponent, Q)> = None;
    for c in comps {
        let d = c.end().distance_to(x);
        if best.as_ref().is_none_or(|(_, bd)| &d < bd) {
            best = Some((c, d));
        }
    }
    let (c, pos) = best.expect("non-empty fixed set");
    let moved = c.end().distance_to(&f.evaluate(x));
    if moved > pos {
        1
    } else {
        -1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub samples: usize,
    pub conjugation_ok: bool,
    pub inverse_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.conjugation_ok && self.inverse_ok
    }
}

/// Checks `Δ_{hfh⁻¹} = deg(h)·Δ_f∘h⁻¹` and `Δ_{f⁻¹} = −Δ_f` pointwise.
pub fn signature_identities_check(
    f: &PLMap,
    h: &PLMap,
    samples: &[CirclePoint],
) -> Result<IdentityReport> {
    if f.degree() != 1 {
        return Err(Error::Precondition("f must preserve orientation".into()));
    }
    let fix_f = fixed_points(f);
    if fix_f.is_empty() {
        return Err(Error::Precondition("f must have a fixed point".into()));
    }
    let conj = f.conjugate_by(h);
    let fix_c = fixed_points(&conj);
    let finv = f.invert();
    let fix_i = fixed_points(&finv);
    let mut report = IdentityReport {
        samples: samples.len(),
        conjugation_ok: true,
        inverse_ok: true,
        counterexample: None,
    };
    for x in samples {
        let lhs = signature_value(&conj, &fix_c, x);
        let rhs = h.degree() * signature_value(f, &fix_f, &h.evaluate_inverse(x));
        if lhs != rhs && report.conjugation_ok {
            report.conjugation_ok = false;
            report.counterexample.get_or_insert_with(|| format!("conjugation identity at {x}"));
        }
        let a = signature_value(&finv, &fix_i, x);
        let b = -signature_value(f, &fix_f, x);
        if a != b && report.inverse_ok {
            report.inverse_ok = false;
            report.counterexample.get_or_insert_with(|| format!("inverse identity at {x}"));
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RotationNumber {
    /// `value = p/q` in lowest terms, `witness` has exact minimal period `q`.
    Rational {
        value: Q,
        witness: CirclePoint,
        period: u64,
    },
    /// The rotation number of the lift normalised by `F(0) ∈ [0, 1)` lies in
    /// `[lo, hi]`; the circle rotation number is that value mod 1.
    Bracket { lo: Q, hi: Q, iterations: u64 },
}

impl RotationNumber {
    pub fn rational(&self) -> Option<&Q> {
        match self {
            RotationNumber::Rational { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn period(&self) -> Option<u64> {
        match self {
            RotationNumber::Rational { period, .. } => Some(*period),
            _ => None,
        }
    }
}

impl fmt::Display for RotationNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RotationNumber::Rational { value, period, .. } => {
                write!(f, "{} (period {})", fmt_q(value), period)
            }
            RotationNumber::Bracket { lo, hi, iterations } => write!(
                f,
                "in [{}, {}] after {} iterations",
                fmt_q(lo),
                fmt_q(hi),
                iterations
            ),
        }
    }
}

pub const DEFAULT_MAX_PERIOD: u64 = 64;
pub const DEFAULT_MAX_ITER: u64 = 100_000;

/// Budgets for rotation number certification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_period: u64,
    pub max_iter: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_period: DEFAULT_MAX_PERIOD,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}
const GRID_BITS: u32 = 96;
const EXACT_BITS: u64 = 160;

/// Caches `f, f², f³, …` for period tests.
struct Powers<'a> {
    f: &'a PLMap,
    list: Vec<PLMap>,
}

impl<'a> Powers<'a> {
    fn new(f: &'a PLMap) -> Self {
        Powers {
            f,
            list: vec![f.clone()],
        }
    }

    fn get(&mut self, n: u64) -> &PLMap {
        while (self.list.len() as u64) < n {
            let next = self.list.last().unwrap().compose(self.f);
            self.list.push(next);
        }
        &self.list[(n - 1) as usize]
    }
}

/// Certifies a periodic point of period `q` when one exists.
fn periodic_point(f: &PLMap, fq: &PLMap) -> Option<CirclePoint> {
    match fixed_points(fq) {
        FixSet::FullCircle => Some(CirclePoint::zero()),
        FixSet::Components(c) => c.first().map(|c| c.start().clone()),
    }
    .filter(|_| f.degree() == 1)
}

fn lift_displacement(f: &PLMap, x: &CirclePoint, q: u64) -> Q {
    let mut y = x.value().clone();
    for _ in 0..q {
        y = f.lift_eval(&y);
    }
    y - x.value()
}

pub fn rotation_number(f: &PLMap, max_period: u64, max_iter: u64) -> Result<RotationNumber> {
    if f.degree() != 1 {
        return Err(Error::Precondition(
            "rotation number is defined for orientation preserving maps".into(),
        ));
    }
    let max_iter = max_iter.max(1);
    let mut powers = Powers::new(f);
    let mut tested = vec![false; max_period as usize + 1];
    let certify = |q: u64, powers: &mut Powers| -> Option<RotationNumber> {
        let fq = powers.get(q).clone();
        let x = periodic_point(f, &fq)?;
        let disp = lift_displacement(f, &x, q);
        let value = disp / Q::from_integer(BigInt::from(q));
        let value = frac(&value);
        let period = value.denom().to_u64().unwrap_or(q);
        Some(RotationNumber::Rational {
            value,
            witness: x,
            period,
        })
    };
    if max_period >= 1 {
        tested[1] = true;
        if let Some(r) = certify(1, &mut powers) {
            return Ok(r);
        }
    }
    let mut lo_pt = Q::zero();
    let mut hi_pt = Q::zero();
    let mut lo = qi(-1);
    let mut hi = qi(2);
    let mut n: u64 = 0;
    let mut stage = 16u64.min(max_iter);
    let hard_cap = max_iter.saturating_mul(2);
    loop {
        while n < stage {
            let exact = lo_pt == hi_pt;
            lo_pt = f.lift_eval(&lo_pt);
            hi_pt = if exact { lo_pt.clone() } else { f.lift_eval(&hi_pt) };
            if height_bits(&lo_pt) > EXACT_BITS {
                lo_pt = round_down(&lo_pt, GRID_BITS);
            }
            if height_bits(&hi_pt) > EXACT_BITS {
                hi_pt = round_up(&hi_pt, GRID_BITS);
            }
            n += 1;
        }
        let nq = Q::from_integer(BigInt::from(n));
        let new_lo = (&lo_pt - Q::one()) / &nq;
        let new_hi = (&hi_pt + Q::one()) / &nq;
        if new_lo > lo {
            lo = new_lo;
        }
        if new_hi < hi {
            hi = new_hi;
        }
        let final_stage = n >= max_iter;
        let mut pending: Vec<u64> = fractions_in(&lo, &hi, max_period)
            .into_iter()
            .map(|(_, q)| q)
            .filter(|q| !tested[*q as usize])
            .collect();
        pending.dedup();
        if final_stage || pending.len() <= 3 {
            for q in pending {
                tested[q as usize] = true;
                if let Some(r) = certify(q, &mut powers) {
                    return Ok(r);
                }
            }
        }
        let target = Q::new(BigInt::from(2), BigInt::from(max_iter));
        if final_stage && (&hi - &lo <= target || n >= hard_cap) {
            return Ok(RotationNumber::Bracket {
                lo,
                hi,
                iterations: n,
            });
        }
        stage = if n >= max_iter { n + 1 } else { (n * 4).min(max_iter) };
    }
}

/// Least `n` with `fix(fⁿ)` non-empty, cross-checked against the rotation number.
pub fn minimal_period(f: &PLMap, rho: &RotationNumber) -> Result<(u64, CirclePoint)> {
    let (q, witness) = match rho {
        RotationNumber::Rational { period, witness, .. } => (*period, witness.clone()),
        RotationNumber::Bracket { lo, hi, .. } => {
            return Err(Error::Uncertified {
                lo: fmt_q(lo),
                hi: fmt_q(hi),
            })
        }
    };
    let mut p = PLMap::identity();
    for n in 1..=q {
        p = p.compose(f);
        let empty = fixed_points(&p).is_empty();
        if n < q && !empty {
            return Err(Error::Internal(format!("f^{n} has fixed points but period is {q}")));
        }
        if n == q && empty {
            return Err(Error::Internal(format!("f^{q} has no fixed points")));
        }
    }
    if p.evaluate(&witness) != witness {
        return Err(Error::Internal("period witness is not periodic".into()));
    }
    Ok((q, witness))
}

/// Exponent `d` with `f^d(x)` the anticlockwise-next point of the periodic orbit of `x`.
pub fn next_orbit_exponent(f: &PLMap, x: &CirclePoint, period: u64) -> u64 {
    let mut best = (Q::one() + Q::one(), 0u64);
    let mut y = x.clone();
    for k in 1..period {
        y = f.evaluate(&y);
        let d = x.distance_to(&y);
        if d.is_positive() && d < best.0 {
            best = (d, k);
        }
    }
    best.1
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn cp(n: i64, d: i64) -> CirclePoint {
        CirclePoint::new(q(n, d))
    }

    fn sawtooth() -> PLMap {
        PLMap::from_lift_vertices(1, vec![(q(0, 1), q(0, 1)), (q(1, 2), q(1, 4))]).unwrap()
    }

    fn two_fixed() -> PLMap {
        // fixed at 0 and 1/2, above the diagonal on (0,1/2), below on (1/2,1)
        PLMap::from_lift_vertices(
            1,
            vec![
                (q(0, 1), q(0, 1)),
                (q(1, 4), q(3, 8)),
                (q(1, 2), q(1, 2)),
                (q(3, 4), q(5, 8)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn fixed_point_examples() {
        assert_eq!(fixed_points(&PLMap::identity()), FixSet::FullCircle);
        assert_eq!(
            fixed_points(&sawtooth()),
            FixSet::Components(vec![FixComponent::Point(cp(0, 1))])
        );
        assert_eq!(
            fixed_points(&PLMap::reflection(&q(0, 1))),
            FixSet::Components(vec![
                FixComponent::Point(cp(0, 1)),
                FixComponent::Point(cp(1, 2))
            ])
        );
        assert!(fixed_points(&PLMap::rotation(&q(1, 3))).is_empty());
    }

    #[test]
    fn fixed_arc_wrapping_zero() {
        let f = PLMap::from_lift_vertices(
            1,
            vec![
                (q(0, 1), q(0, 1)),
                (q(1, 8), q(1, 8)),
                (q(1, 2), q(1, 4)),
                (q(7, 8), q(7, 8)),
            ],
        )
        .unwrap();
        assert_eq!(
            fixed_points(&f),
            FixSet::Components(vec![FixComponent::Arc {
                start: cp(7, 8),
                end: cp(1, 8)
            }])
        );
        let w = signature(&f).unwrap();
        assert_eq!(w.shape().unwrap(), (vec![FixKind::Arc], vec![-1]));
    }

    #[test]
    fn signature_examples() {
        let w = signature(&sawtooth()).unwrap();
        assert_eq!(
            w,
            SignatureWord::Blocks(vec![Block {
                fix: FixComponent::Point(cp(0, 1)),
                sign: -1
            }])
        );
        assert_eq!(signature(&PLMap::identity()).unwrap(), SignatureWord::Identity);
        let w = signature(&two_fixed()).unwrap();
        assert_eq!(
            w.shape().unwrap(),
            (vec![FixKind::Point, FixKind::Point], vec![1, -1])
        );
        assert!(signature(&PLMap::rotation(&q(1, 3))).is_err());
    }

    #[test]
    fn signature_inverse_flips() {
        let f = two_fixed();
        assert_eq!(signature(&f.invert()).unwrap(), signature(&f).unwrap().negated());
    }

    #[test]
    fn identities_examples() {
        let samples: Vec<_> = (0..64).map(|i| cp(2 * i + 1, 128)).collect();
        let f = two_fixed();
        for h in [
            PLMap::identity(),
            PLMap::rotation(&q(1, 2)),
            PLMap::reflection(&q(0, 1)),
        ] {
            assert!(signature_identities_check(&f, &h, &samples).unwrap().passed());
        }
        let r = PLMap::rotation(&q(1, 2));
        let conj = f.conjugate_by(&r);
        let w = signature(&conj).unwrap();
        // fixed points are rotated by 1/2, signs carried along
        assert_eq!(w.shape().unwrap(), (vec![FixKind::Point, FixKind::Point], vec![-1, 1]));
        let refl = f.conjugate_by(&PLMap::reflection(&q(0, 1)));
        // deg(h) = -1: all signs flip and order reverses
        let w = signature(&refl).unwrap();
        assert_eq!(w.shape().unwrap().1, vec![1, -1]);
    }

    #[test]
    fn rotation_number_examples() {
        match rotation_number(&PLMap::rotation(&q(1, 3)), 64, 1000).unwrap() {
            RotationNumber::Rational { value, witness, period } => {
                assert_eq!(value, q(1, 3));
                assert_eq!(period, 3);
                assert_eq!(witness, cp(0, 1));
            }
            other => panic!("{other:?}"),
        }
        let r = rotation_number(&sawtooth(), 64, 1000).unwrap();
        assert_eq!(r.rational(), Some(&q(0, 1)));
        assert_eq!(r.period(), Some(1));
        let slow = PLMap::rotation(&q(7, 53));
        match rotation_number(&slow, 50, 4000).unwrap() {
            RotationNumber::Bracket { lo, hi, .. } => {
                assert!(&hi - &lo <= q(2, 4000));
                assert!(lo <= q(7, 53) && q(7, 53) <= hi);
            }
            other => panic!("{other:?}"),
        }
        assert!(rotation_number(&PLMap::reflection(&q(0, 1)), 8, 8).is_err());
    }

    #[test]
    fn minimal_period_examples() {
        let r = PLMap::rotation(&q(2, 5));
        let rho = rotation_number(&r, 64, 1000).unwrap();
        assert_eq!(minimal_period(&r, &rho).unwrap().0, 5);
        let s = sawtooth();
        let rho = rotation_number(&s, 64, 1000).unwrap();
        assert_eq!(minimal_period(&s, &rho).unwrap().0, 1);
        let b = RotationNumber::Bracket {
            lo: q(0, 1),
            hi: q(1, 100),
            iterations: 100,
        };
        assert!(matches!(minimal_period(&s, &b), Err(Error::Uncertified { .. })));
    }

    #[test]
    fn next_orbit_exponent_examples() {
        let r = PLMap::rotation(&q(2, 5));
        // 0 -> 2/5 -> 4/5 -> 1/5: the nearest anticlockwise point is 1/5 = f^3(0)
        assert_eq!(next_orbit_exponent(&r, &cp(0, 1), 5), 3);
    }
}
