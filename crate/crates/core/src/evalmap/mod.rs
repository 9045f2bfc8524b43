//! Lazily evaluated circle maps assembled from combinators.
//!
//! Nodes are immutable and shared through `Arc`, so cloning an [`EvalMap`] is
//! cheap and evaluation is safe from several threads at once.

mod build;
mod json;

use std::fmt;
use std::sync::Arc;

use num::{One, Signed, Zero};

use crate::circle::CirclePoint;
use crate::error::{Error, Result};
use crate::plmap::PLMap;
use crate::rational::{half, Q};

pub use build::{affine_between, equivariant_conjugator, reverse_on_arc};
pub(crate) use build::{affine_fixed_point, conjugator_on_layouts};
pub use json::{EVALMAP_FORMAT, EvalMapJson};

pub const DEFAULT_ITERATION_CAP: u64 = 1_000_000;

/// Closed anticlockwise arc `[start, start + len]` with `0 <= len <= 1`;
/// `len = 1` is the whole circle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedArc {
    pub start: CirclePoint,
    pub len: Q,
}

impl ClosedArc {
    pub fn new(start: CirclePoint, len: Q) -> ClosedArc {
        ClosedArc { start, len }
    }

    pub fn between(start: &CirclePoint, end: &CirclePoint) -> ClosedArc {
        ClosedArc {
            start: start.clone(),
            len: start.distance_to(end),
        }
    }

    pub fn full_from(start: &CirclePoint) -> ClosedArc {
        ClosedArc {
            start: start.clone(),
            len: Q::one(),
        }
    }

    pub fn end(&self) -> CirclePoint {
        self.start.shifted(&self.len)
    }

    pub fn midpoint(&self) -> CirclePoint {
        self.start.shifted(&(&self.len * half()))
    }

    pub fn is_full(&self) -> bool {
        self.len.is_one()
    }

    /// Position of `x` measured anticlockwise from `start`.
    pub fn position(&self, x: &CirclePoint) -> Q {
        self.start.distance_to(x)
    }

    pub fn contains(&self, x: &CirclePoint) -> bool {
        self.is_full() || self.position(x) <= self.len
    }

    pub fn contains_interior(&self, x: &CirclePoint) -> bool {
        let p = self.position(x);
        p.is_positive() && p < self.len
    }

    pub fn at(&self, pos: &Q) -> CirclePoint {
        self.start.shifted(pos)
    }
}

impl fmt::Display for ClosedArc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start, self.end())
    }
}

/// Affine bijection between two closed arcs, in arc positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffinePiece {
    pub domain: ClosedArc,
    pub target: ClosedArc,
    pub reversing: bool,
}

impl AffinePiece {
    fn apply(&self, x: &CirclePoint) -> Result<CirclePoint> {
        if !self.domain.contains(x) {
            return Err(outside(x));
        }
        if self.domain.len.is_zero() {
            return Ok(if self.reversing {
                self.target.end()
            } else {
                self.target.start.clone()
            });
        }
        let t = self.domain.position(x) / &self.domain.len;
        let pos = if self.reversing {
            (Q::one() - t) * &self.target.len
        } else {
            t * &self.target.len
        };
        Ok(self.target.at(&pos))
    }

    fn inverse(&self) -> AffinePiece {
        AffinePiece {
            domain: self.target.clone(),
            target: self.domain.clone(),
            reversing: self.reversing,
        }
    }
}

/// Data of a conjugacy `k` between `f` on an invariant arc and `g` on a target
/// arc, extended from an affine base map on a fundamental domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantExtension {
    /// Closure of the invariant open arc of `f`.
    pub domain: ClosedArc,
    /// Closure of the invariant open arc of `g`.
    pub target: ClosedArc,
    pub reversing: bool,
    pub f: PLMap,
    pub g: PLMap,
    pub x0: CirclePoint,
    pub y0: CirclePoint,
    // cached lift data: F(a), G(a'), positions of x0, f(x0), y0, g(y0)
    fa: Q,
    ga: Q,
    p0: Q,
    p1: Q,
    q0: Q,
    q1: Q,
    // affine germs of f and g at the two ends of their arcs
    fs: Germ,
    fe: Germ,
    gs: Germ,
    ge: Germ,
}

/// Near a fixed end of an arc the lift is affine: at the start
/// `H(a + t) = H(a) + slope·t`, at the end `H(b − t) = H(b) − slope·t`,
/// for `0 ≤ t ≤ reach`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Germ {
    reach: Q,
    slope: Q,
}

impl Germ {
    fn at(h: &PLMap, arc: &ClosedArc, at_start: bool) -> Germ {
        let p = if at_start { arc.start.clone() } else { arc.end() };
        let reach = h
            .breakpoints()
            .iter()
            .map(|x| {
                let d = if at_start { x - p.value() } else { p.value() - x };
                crate::rational::frac(&d)
            })
            .filter(|d| !d.is_zero())
            .min()
            .unwrap_or_else(Q::one);
        let slope = if at_start {
            h.slope_at(&p)
        } else {
            h.slope_at(&crate::circle::canonicalize(&(p.value() - &reach / Q::from_integer(2.into()))))
        };
        Germ { reach, slope }
    }

    /// Factor and validity bound of one step in direction `dir`.
    fn step(&self, dir: i8) -> (Q, Q) {
        if dir > 0 {
            (self.slope.clone(), self.reach.clone())
        } else {
            (self.slope.recip(), &self.slope * &self.reach)
        }
    }
}

fn pow_q(r: &Q, k: u64) -> Q {
    let k = u32::try_from(k).expect("step count fits in u32");
    Q::new_raw(r.numer().pow(k), r.denom().pow(k))
}

fn log2_q(x: &Q) -> f64 {
    fn lg(b: &num::BigInt) -> f64 {
        use num::ToPrimitive;
        let bits = b.bits();
        if bits <= 900 {
            b.to_f64().unwrap_or(f64::MAX).log2()
        } else {
            let s = bits - 64;
            (b >> s).to_f64().unwrap_or(f64::MAX).log2() + s as f64
        }
    }
    lg(x.numer()) - lg(x.denom())
}

/// Largest `k` such that `t·rᵏ⁻¹` (for `k ≥ 1`) is at most `reach` and below
/// `bound` (at most `bound` when not `strict`); `r > 1`.
fn jump_len(t: &Q, r: &Q, reach: &Q, bound: &Q, strict: bool) -> u64 {
    let ok = |k: u64| -> bool {
        if k == 0 {
            return true;
        }
        let v = t * pow_q(r, k - 1);
        &v <= reach && if strict { &v < bound } else { &v <= bound }
    };
    if !ok(1) {
        return 0;
    }
    let lim = if reach < bound { reach } else { bound };
    let est = (log2_q(&(lim / t)) / log2_q(r)).floor();
    let mut k = if est.is_finite() && est > 0.0 {
        (est as u64).saturating_add(1).min(u32::MAX as u64 / 2)
    } else {
        1
    };
    while k > 1 && !ok(k) {
        k -= 1;
    }
    while ok(k + 1) {
        k += 1;
    }
    k
}

impl EquivariantExtension {
    pub fn new(
        domain: ClosedArc,
        target: ClosedArc,
        reversing: bool,
        f: PLMap,
        g: PLMap,
        x0: CirclePoint,
        y0: CirclePoint,
    ) -> Result<EquivariantExtension> {
        if f.degree() != 1 || g.degree() != 1 {
            return Err(Error::Precondition(
                "equivariant extension needs orientation preserving generators".into(),
            ));
        }
        if domain.len.is_zero() || target.len.is_zero() {
            return Err(Error::Precondition("invariant arcs must be nonempty".into()));
        }
        for (arc, h, name) in [(&domain, &f, "f"), (&target, &g, "g")] {
            if h.evaluate(&arc.start) != arc.start || h.evaluate(&arc.end()) != arc.end() {
                return Err(Error::Precondition(format!(
                    "{name} does not fix the ends of {arc}"
                )));
            }
            if crate::dynamics::fixed_points(h)
                .components()
                .iter()
                .any(|c| arc.contains_interior(c.start()) || arc.contains_interior(c.end()))
                || matches!(crate::dynamics::fixed_points(h), crate::dynamics::FixSet::FullCircle)
            {
                return Err(Error::Precondition(format!(
                    "{name} has a fixed point inside {arc}"
                )));
            }
        }
        if !domain.contains_interior(&x0) || !target.contains_interior(&y0) {
            return Err(Error::Precondition("base points must be interior".into()));
        }
        let fa = f.lift_eval(domain.start.value());
        let ga = g.lift_eval(target.start.value());
        let p0 = domain.position(&x0);
        let p1 = step(&f, domain.start.value(), &fa, &p0, 1);
        let q0 = target.position(&y0);
        let q1 = step(&g, target.start.value(), &ga, &q0, 1);
        let same = (p1 > p0) == (q1 > q0);
        if same == reversing {
            return Err(Error::Precondition(
                "generator directions are incompatible with the orientation".into(),
            ));
        }
        let (fs, fe) = (Germ::at(&f, &domain, true), Germ::at(&f, &domain, false));
        let (gs, ge) = (Germ::at(&g, &target, true), Germ::at(&g, &target, false));
        Ok(EquivariantExtension {
            domain,
            target,
            reversing,
            f,
            g,
            x0,
            y0,
            fa,
            ga,
            p0,
            p1,
            q0,
            q1,
            fs,
            fe,
            gs,
            ge,
        })
    }

    fn inverse(&self) -> EquivariantExtension {
        EquivariantExtension {
            domain: self.target.clone(),
            target: self.domain.clone(),
            reversing: self.reversing,
            f: self.g.clone(),
            g: self.f.clone(),
            x0: self.y0.clone(),
            y0: self.x0.clone(),
            fa: self.ga.clone(),
            ga: self.fa.clone(),
            p0: self.q0.clone(),
            p1: self.q1.clone(),
            q0: self.p0.clone(),
            q1: self.p1.clone(),
            fs: self.gs.clone(),
            fe: self.ge.clone(),
            gs: self.fs.clone(),
            ge: self.fe.clone(),
        }
    }

    /// The fundamental domain `D` as a closed arc.
    pub fn fundamental_domain(&self) -> ClosedArc {
        let (lo, hi) = if self.p0 < self.p1 {
            (&self.p0, &self.p1)
        } else {
            (&self.p1, &self.p0)
        };
        ClosedArc::new(self.domain.at(lo), hi - lo)
    }

    fn source(&self) -> Side<'_> {
        Side {
            arc: &self.domain,
            h: &self.f,
            ha: &self.fa,
            b0: &self.p0,
            b1: &self.p1,
            start: &self.fs,
            end: &self.fe,
        }
    }

    fn sink(&self) -> Side<'_> {
        Side {
            arc: &self.target,
            h: &self.g,
            ha: &self.ga,
            b0: &self.q0,
            b1: &self.q1,
            start: &self.gs,
            end: &self.ge,
        }
    }

    fn apply(&self, x: &CirclePoint, cap: u64) -> Result<CirclePoint> {
        unwind(self.source(), self.sink(), self.reversing, x, cap)
    }

    fn apply_inverse(&self, y: &CirclePoint, cap: u64) -> Result<CirclePoint> {
        unwind(self.sink(), self.source(), self.reversing, y, cap)
    }
}

/// One end of an extension: the arc, its generator, `H(a)` and the
/// positions of the base point and its image.
struct Side<'a> {
    arc: &'a ClosedArc,
    h: &'a PLMap,
    ha: &'a Q,
    b0: &'a Q,
    b1: &'a Q,
    start: &'a Germ,
    end: &'a Germ,
}

impl Side<'_> {
    // positions are offsets from the arc start; the lift maps [a, a + len]
    // onto [H(a), H(a) + len]
    fn step(&self, p: &Q, dir: i8) -> Q {
        step(self.h, self.arc.start.value(), self.ha, p, dir)
    }
}

fn unwind(src: Side, dst: Side, reversing: bool, x: &CirclePoint, cap: u64) -> Result<CirclePoint> {
    if !src.arc.contains(x) {
        return Err(outside(x));
    }
    let mut p = src.arc.position(x);
    if p.is_zero() || p == src.arc.len {
        let to_start = p.is_zero() != reversing;
        return Ok(if to_start {
            dst.arc.start.clone()
        } else {
            dst.arc.end()
        });
    }
    let (p0, p1) = (src.b0, src.b1);
    let (lo, hi) = if p0 < p1 { (p0, p1) } else { (p1, p0) };
    let up = p0 < p1;
    let len = &src.arc.len;
    let mut j: i64 = 0;
    let mut count = 0u64;
    while &p < lo || &p >= hi {
        // move towards the fundamental domain, jumping through affine germs
        let near_start = &p < lo;
        let dir: i8 = if near_start == up { 1 } else { -1 };
        let (r, reach) = if near_start { src.start } else { src.end }.step(dir);
        let t = if near_start { p.clone() } else { len - &p };
        let k = if r > Q::one() {
            if near_start {
                jump_len(&t, &r, &reach, lo, true)
            } else {
                jump_len(&t, &r, &reach, &(len - hi), false)
            }
        } else {
            0
        };
        let k = k.min(cap.saturating_sub(count));
        if k >= 2 {
            let t = t * pow_q(&r, k);
            p = if near_start { t } else { len - t };
            count += k;
            j += dir as i64 * k as i64;
        } else {
            count += 1;
            p = src.step(&p, dir);
            j += dir as i64;
        }
        if count > cap {
            return Err(Error::IterationCap {
                point: x.to_string(),
                iterations: cap,
            });
        }
    }
    let (q0, q1) = (dst.b0, dst.b1);
    let mut q = q0 + (&p - p0) * (q1 - q0) / (p1 - p0);
    let dir: i8 = if j > 0 { -1 } else { 1 };
    let dlen = &dst.arc.len;
    let mut left = j.unsigned_abs();
    while left > 0 {
        // once inside a contracting germ the orbit stays there
        let (rs, reach_s) = dst.start.step(dir);
        if rs < Q::one() && q <= reach_s {
            q *= pow_q(&rs, left);
            break;
        }
        let (re, reach_e) = dst.end.step(dir);
        let t = dlen - &q;
        if re < Q::one() && t <= reach_e {
            q = dlen - t * pow_q(&re, left);
            break;
        }
        // and leaves an expanding one in a single jump
        let k = if rs > Q::one() && q <= reach_s {
            jump_len(&q, &rs, &reach_s, &reach_s, false).min(left)
        } else if re > Q::one() && t <= reach_e {
            jump_len(&t, &re, &reach_e, &reach_e, false).min(left)
        } else {
            0
        };
        if k >= 2 {
            q = if rs > Q::one() && q <= reach_s {
                q * pow_q(&rs, k)
            } else {
                dlen - t * pow_q(&re, k)
            };
            left -= k;
            continue;
        }
        q = dst.step(&q, dir);
        left -= 1;
    }
    Ok(dst.arc.at(&q))
}

fn step(h: &PLMap, a: &Q, ha: &Q, p: &Q, dir: i8) -> Q {
    if dir > 0 {
        h.lift_eval(&(a + p)) - ha
    } else {
        h.lift_preimage(&(ha + p)) - a
    }
}

fn outside(x: &CirclePoint) -> Error {
    Error::OutsideDomain {
        point: x.to_string(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub arc: ClosedArc,
    pub map: EvalMap,
    image: ClosedArc,
}

impl Piece {
    pub fn image(&self) -> &ClosedArc {
        &self.image
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Pl(PLMap),
    Affine(AffinePiece),
    Piecewise(Vec<Piece>),
    /// `Compose([a, b, c])` is `a ∘ b ∘ c`.
    Compose(Vec<EvalMap>),
    InverseOf(EvalMap),
    Equivariant(EquivariantExtension),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalMap(Arc<Node>);

impl From<PLMap> for EvalMap {
    fn from(m: PLMap) -> Self {
        EvalMap::pl(m)
    }
}

impl EvalMap {
    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn identity() -> EvalMap {
        EvalMap::pl(PLMap::identity())
    }

    pub fn pl(m: PLMap) -> EvalMap {
        EvalMap(Arc::new(Node::Pl(m)))
    }

    pub fn affine(domain: ClosedArc, target: ClosedArc, reversing: bool) -> Result<EvalMap> {
        if domain.len.is_zero() != target.len.is_zero() {
            return Err(Error::Precondition(
                "affine piece between a point and a nondegenerate arc".into(),
            ));
        }
        Ok(EvalMap(Arc::new(Node::Affine(AffinePiece {
            domain,
            target,
            reversing,
        }))))
    }

    pub fn equivariant(e: EquivariantExtension) -> EvalMap {
        EvalMap(Arc::new(Node::Equivariant(e)))
    }

    /// `maps[0] ∘ maps[1] ∘ …`; nested compositions are flattened.
    pub fn compose(maps: Vec<EvalMap>) -> EvalMap {
        let mut flat = Vec::with_capacity(maps.len());
        for m in maps {
            match m.node() {
                Node::Compose(inner) => flat.extend(inner.iter().cloned()),
                Node::Pl(p) if p.is_identity() => {}
                _ => flat.push(m),
            }
        }
        match flat.len() {
            0 => EvalMap::identity(),
            1 => flat.pop().unwrap(),
            _ => EvalMap(Arc::new(Node::Compose(flat))),
        }
    }

    /// A composition node holding exactly `maps`.
    pub fn compose_exact(maps: Vec<EvalMap>) -> EvalMap {
        EvalMap(Arc::new(Node::Compose(maps)))
    }

    pub fn inverse_of(m: EvalMap) -> EvalMap {
        EvalMap(Arc::new(Node::InverseOf(m)))
    }

    /// Pieces are closed arcs with disjoint interiors; neighbouring pieces must
    /// agree exactly at shared endpoints. Zero-length pieces are dropped.
    pub fn piecewise(pieces: Vec<(ClosedArc, EvalMap)>) -> Result<EvalMap> {
        let pieces: Vec<(ClosedArc, EvalMap)> =
            pieces.into_iter().filter(|(a, _)| !a.len.is_zero()).collect();
        if pieces.len() == 1 && pieces[0].0.is_full() {
            return Ok(pieces.into_iter().next().unwrap().1);
        }
        EvalMap::piecewise_exact(pieces)
    }

    /// Like [`EvalMap::piecewise`] but keeps the pieces exactly as given.
    pub fn piecewise_exact(pieces: Vec<(ClosedArc, EvalMap)>) -> Result<EvalMap> {
        if pieces.is_empty() {
            return Err(Error::Precondition("piecewise map without pieces".into()));
        }
        let mut built = Vec::with_capacity(pieces.len());
        for (arc, map) in pieces {
            if arc.len > Q::one() || !arc.len.is_positive() {
                return Err(Error::Precondition(format!("bad piece length {}", arc.len)));
            }
            let s = map.eval(&arc.start)?;
            let image = if arc.is_full() {
                ClosedArc::full_from(&s)
            } else {
                let e = map.eval(&arc.end())?;
                let mid = map.eval(&arc.midpoint())?;
                let fwd = ClosedArc::between(&s, &e);
                if fwd.contains_interior(&mid) {
                    fwd
                } else {
                    ClosedArc::between(&e, &s)
                }
            };
            built.push(Piece { arc, map, image });
        }
        for i in 0..built.len() {
            for j in 0..built.len() {
                if i == j {
                    continue;
                }
                let (a, b) = (&built[i].arc, &built[j].arc);
                if b.contains_interior(&a.start) || (a.start == b.start) {
                    return Err(Error::Precondition(format!(
                        "pieces {a} and {b} overlap"
                    )));
                }
                for x in [a.start.clone(), a.end()] {
                    if b.contains(&x) {
                        let u = built[i].map.eval(&x)?;
                        let v = built[j].map.eval(&x)?;
                        if u != v {
                            return Err(Error::Precondition(format!(
                                "pieces {a} and {b} disagree at {x}: {u} vs {v}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(EvalMap(Arc::new(Node::Piecewise(built))))
    }

    /// Structural inverse; piecewise nodes are wrapped in `InverseOf`.
    pub fn inverse(&self) -> EvalMap {
        match self.node() {
            Node::Pl(m) => EvalMap::pl(m.invert()),
            Node::Affine(a) => EvalMap(Arc::new(Node::Affine(a.inverse()))),
            Node::Compose(ms) => EvalMap::compose(ms.iter().rev().map(|m| m.inverse()).collect()),
            Node::InverseOf(m) => m.clone(),
            Node::Equivariant(e) => EvalMap::equivariant(e.inverse()),
            Node::Piecewise(_) => EvalMap::inverse_of(self.clone()),
        }
    }

    pub fn eval(&self, x: &CirclePoint) -> Result<CirclePoint> {
        self.eval_capped(x, DEFAULT_ITERATION_CAP)
    }

    pub fn eval_capped(&self, x: &CirclePoint, cap: u64) -> Result<CirclePoint> {
        match self.node() {
            Node::Pl(m) => Ok(m.evaluate(x)),
            Node::Affine(a) => a.apply(x),
            Node::Piecewise(pieces) => {
                let p = pieces
                    .iter()
                    .find(|p| p.arc.contains(x))
                    .ok_or_else(|| outside(x))?;
                p.map.eval_capped(x, cap)
            }
            Node::Compose(ms) => {
                let mut y = x.clone();
                for m in ms.iter().rev() {
                    y = m.eval_capped(&y, cap)?;
                }
                Ok(y)
            }
            Node::InverseOf(m) => m.eval_inverse_capped(x, cap),
            Node::Equivariant(e) => e.apply(x, cap),
        }
    }

    pub fn eval_inverse(&self, y: &CirclePoint) -> Result<CirclePoint> {
        self.eval_inverse_capped(y, DEFAULT_ITERATION_CAP)
    }

    pub fn eval_inverse_capped(&self, y: &CirclePoint, cap: u64) -> Result<CirclePoint> {
        match self.node() {
            Node::Pl(m) => Ok(m.evaluate_inverse(y)),
            Node::Affine(a) => a.inverse().apply(y),
            Node::Piecewise(pieces) => {
                let p = pieces
                    .iter()
                    .find(|p| p.image.contains(y))
                    .ok_or_else(|| outside(y))?;
                p.map.eval_inverse_capped(y, cap)
            }
            Node::Compose(ms) => {
                let mut x = y.clone();
                for m in ms.iter() {
                    x = m.eval_inverse_capped(&x, cap)?;
                }
                Ok(x)
            }
            Node::InverseOf(m) => m.eval_capped(y, cap),
            Node::Equivariant(e) => e.apply_inverse(y, cap),
        }
    }

    /// Number of nodes in the expression tree, counting shared nodes once per use.
    pub fn size(&self) -> usize {
        1 + match self.node() {
            Node::Pl(_) | Node::Affine(_) | Node::Equivariant(_) => 0,
            Node::Piecewise(ps) => ps.iter().map(|p| p.map.size()).sum(),
            Node::Compose(ms) => ms.iter().map(|m| m.size()).sum(),
            Node::InverseOf(m) => m.size(),
        }
    }
}

#[cfg(test)]
mod tests;
