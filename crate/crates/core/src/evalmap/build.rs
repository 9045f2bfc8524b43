use num::Zero;

use crate::circle::CirclePoint;
use crate::dynamics::{ElementKind, Layout};
use crate::error::{Error, Result};
use crate::plmap::PLMap;
use crate::rational::Q;
use crate::reversibility::ComponentMatching;

use super::{ClosedArc, EquivariantExtension, EvalMap};

/// Piecewise affine homeomorphism `domain → target` through the given knots
/// `(x, y)`, which must lie in the respective arcs in compatible order.
pub fn affine_between(
    domain: &ClosedArc,
    target: &ClosedArc,
    reversing: bool,
    knots: &[(CirclePoint, CirclePoint)],
) -> Result<EvalMap> {
    let mut pts: Vec<(Q, Q)> = Vec::with_capacity(knots.len() + 2);
    pts.push((Q::zero(), if reversing { target.len.clone() } else { Q::zero() }));
    for (x, y) in knots {
        if !domain.contains(x) || !target.contains(y) {
            return Err(Error::Precondition(format!(
                "knot {x} -> {y} does not lie in {domain} -> {target}"
            )));
        }
        pts.push((domain.position(x), target.position(y)));
    }
    pts.push((domain.len.clone(), if reversing { Q::zero() } else { target.len.clone() }));
    pts.sort();
    pts.dedup();
    let mut pieces = Vec::with_capacity(pts.len());
    for w in pts.windows(2) {
        let ((xa, ya), (xb, yb)) = (&w[0], &w[1]);
        let ok = if reversing { yb < ya } else { ya < yb };
        if !ok {
            return Err(Error::Precondition(format!(
                "knots of the map {domain} -> {target} are out of order"
            )));
        }
        let d = ClosedArc::new(domain.at(xa), xb - xa);
        let t = if reversing {
            ClosedArc::new(target.at(yb), ya - yb)
        } else {
            ClosedArc::new(target.at(ya), yb - ya)
        };
        pieces.push((d.clone(), EvalMap::affine(d, t, reversing)?));
    }
    if pieces.len() == 1 {
        return Ok(pieces.pop().unwrap().1);
    }
    EvalMap::piecewise(pieces)
}

/// Orientation reversing involution `τ` of the closure of `arc` with
/// `τ f τ = f⁻¹` there; `f` must fix the ends of `arc` and nothing inside.
pub fn reverse_on_arc(f: &PLMap, arc: &ClosedArc) -> Result<EvalMap> {
    let x0 = arc.midpoint();
    let y0 = f.evaluate(&x0);
    let e = EquivariantExtension::new(arc.clone(), arc.clone(), true, f.clone(), f.invert(), x0, y0)?;
    Ok(EvalMap::equivariant(e))
}

/// Conjugacy `k` with `k ∘ f = g ∘ k`, mapping each element of the layout of
/// `f` onto its partner in the layout of `g` under `matching`.
pub fn equivariant_conjugator(
    f: &PLMap,
    g: &PLMap,
    matching: &ComponentMatching,
) -> Result<EvalMap> {
    let lf = Layout::of(f)?;
    let lg = Layout::of(g)?;
    let k = conjugator_on_layouts(f, &lf, g, &lg, matching)?;
    EvalMap::piecewise(k.into_iter().map(|(_, a, m)| (a, m)).collect())
}

/// Fixed point of the reversing self-map of `arc` built by [`affine_between`]
/// with the given knots.
pub(crate) fn affine_fixed_point(
    arc: &ClosedArc,
    knots: &[(CirclePoint, CirclePoint)],
) -> Option<CirclePoint> {
    let mut pts: Vec<(Q, Q)> = vec![(Q::zero(), arc.len.clone()), (arc.len.clone(), Q::zero())];
    pts.extend(knots.iter().map(|(x, y)| (arc.position(x), arc.position(y))));
    pts.sort();
    pts.dedup();
    for w in pts.windows(2) {
        let ((xa, ya), (xb, yb)) = (&w[0], &w[1]);
        if ya >= xa && yb <= xb {
            let da = ya - xa;
            let db = yb - xb;
            let t = if da == db { Q::zero() } else { &da / (&da - &db) };
            return Some(arc.at(&(xa + t * (xb - xa))));
        }
    }
    None
}

pub(crate) fn conjugator_on_layouts(
    f: &PLMap,
    lf: &Layout,
    g: &PLMap,
    lg: &Layout,
    matching: &ComponentMatching,
) -> Result<Vec<(usize, ClosedArc, EvalMap)>> {
    let m = lf.blocks();
    if lg.blocks() != m || matching.blocks != m {
        return Err(Error::Precondition(format!(
            "signature words have {} and {} blocks, matching expects {}",
            m,
            lg.blocks(),
            matching.blocks
        )));
    }
    let reversing = matching.is_reversing();
    let mut pieces = Vec::with_capacity(2 * m);
    for i in 0..2 * m {
        let a = &lf.elements[i];
        let j = matching.map_element(i)?;
        let b = &lg.elements[j];
        let compatible = match (a.kind, b.kind) {
            (ElementKind::Point, ElementKind::Point) | (ElementKind::Arc, ElementKind::Arc) => true,
            (ElementKind::Gap(s), ElementKind::Gap(t)) => {
                if reversing {
                    s == -t
                } else {
                    s == t
                }
            }
            _ => false,
        };
        if !compatible {
            return Err(Error::Precondition(format!(
                "signature mismatch under the matching: element {i} vs element {j}"
            )));
        }
        let da = ClosedArc::new(a.start.clone(), a.len.clone());
        let db = ClosedArc::new(b.start.clone(), b.len.clone());
        let pins: Vec<(CirclePoint, CirclePoint)> = matching
            .pins
            .iter()
            .filter(|(x, _)| a.kind == ElementKind::Arc && da.contains(x))
            .cloned()
            .collect();
        for (x, y) in &matching.pins {
            if da.contains(x) && !a.is_gap() && !db.contains(y) {
                return Err(Error::Precondition(format!(
                    "pin {x} -> {y} is not respected by the matching"
                )));
            }
        }
        match a.kind {
            ElementKind::Point => {}
            ElementKind::Arc => {
                pieces.push((i, da.clone(), affine_between(&da, &db, reversing, &pins)?));
            }
            ElementKind::Gap(_) => {
                let e = EquivariantExtension::new(
                    da.clone(),
                    db.clone(),
                    reversing,
                    f.clone(),
                    g.clone(),
                    da.midpoint(),
                    db.midpoint(),
                )?;
                pieces.push((i, da, EvalMap::equivariant(e)));
            }
        }
    }
    Ok(pieces)
}
