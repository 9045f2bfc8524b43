//! Explicit involutions realising strong reversibility and the
//! three-involution factorisation, with exact verification.

use std::fmt;
use std::time::{Duration, Instant};

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::circle::CirclePoint;
use crate::dynamics::{
    next_orbit_exponent, rotation_number, signature, ElementKind, Layout, Limits,
    RotationNumber, SignatureWord,
};
use crate::error::{Error, Result};
use crate::evalmap::{
    affine_fixed_point, conjugator_on_layouts, equivariant_conjugator, reverse_on_arc, ClosedArc,
    EvalMap, EvalMapJson,
};
use crate::plmap::{MapDescription, PLMap};
use crate::rational::{half, Q};
use crate::reversibility::{
    block_action, half_turn_matching, matchings, ComponentMatching, Conjugacy, MatchRule, Plan,
};
use crate::sampling::SamplePlan;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Rot0,
    TwoIReversing,
    TwoIi,
    TwoMinus,
    ThreeInvolutions,
    RotHalfTrivial,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("route serializes");
        f.write_str(s.as_str().unwrap_or_default())
    }
}

/// `f⁰, f¹, …, fⁿ`.
fn powers(f: &PLMap, n: u64) -> Vec<PLMap> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(PLMap::identity());
    for i in 0..n as usize {
        out.push(out[i].compose(f));
    }
    out
}

fn element_arc(layout: &Layout, i: usize) -> ClosedArc {
    let e = &layout.elements[i % layout.elements.len()];
    ClosedArc::new(e.start.clone(), e.len.clone())
}

/// Orientation preserving involution `μ` with `μ f μ = f⁻¹`, from a half-turn
/// matching of the signature of `f`.
pub fn involution_rot0(f: &PLMap, matching: &ComponentMatching) -> Result<EvalMap> {
    if f.is_identity() {
        return Ok(EvalMap::identity());
    }
    let m = matching.blocks;
    if matching.rule != MatchRule::Shift(m / 2) || m % 2 == 1 {
        return Err(Error::Precondition("a half-turn matching is required".into()));
    }
    let finv = f.invert();
    // φ conjugates f⁻¹ to f and moves each block half way round
    let phi = equivariant_conjugator(&finv, f, matching)?;
    let layout = Layout::of(f)?;
    let p = layout.elements[0].start.clone();
    let php = phi.eval(&p)?;
    if php != layout.elements[m].start {
        return Err(Error::Internal("half-turn conjugator misplaces block 0".into()));
    }
    EvalMap::piecewise(vec![
        (ClosedArc::between(&p, &php), phi.clone()),
        (ClosedArc::between(&php, &p), phi.inverse()),
    ])
}

/// Orientation reversing involution `μ` with `μ f μ = f⁻¹` for `f` with fixed
/// points, from a reflection matching; pins of the matching are respected.
pub fn reversing_involution_rot0(f: &PLMap, matching: &ComponentMatching) -> Result<EvalMap> {
    if f.is_identity() {
        let c = match matching.pins.first() {
            Some((a, b)) => a.value() + b.value(),
            None => Q::zero(),
        };
        return Ok(EvalMap::pl(PLMap::reflection(&c)));
    }
    let c = match matching.rule {
        MatchRule::Axis(c) => c,
        MatchRule::Shift(_) => {
            return Err(Error::Precondition("a reflection matching is required".into()))
        }
    };
    let layout = Layout::of(f)?;
    let finv = f.invert();
    let linv = Layout::of(&finv)?;
    let pieces = conjugator_on_layouts(f, &layout, &finv, &linv, matching)?;
    let s = EvalMap::piecewise(pieces.into_iter().map(|(_, a, m)| (a, m)).collect())?;
    let ne = layout.elements.len();
    let m = ne / 2;
    // the two elements mapped to themselves by the axis
    let core = |e: usize| -> Result<(ClosedArc, Option<EvalMap>)> {
        let el = &layout.elements[e];
        let arc = element_arc(&layout, e);
        Ok(match el.kind {
            ElementKind::Gap(_) => {
                let tau = reverse_on_arc(f, &arc)?;
                (arc, Some(tau))
            }
            ElementKind::Point => (ClosedArc::new(el.start.clone(), Q::zero()), None),
            ElementKind::Arc => {
                let knots: Vec<_> = matching
                    .pins
                    .iter()
                    .filter(|(x, _)| arc.contains(x))
                    .cloned()
                    .collect();
                let p = affine_fixed_point(&arc, &knots)
                    .ok_or_else(|| Error::Internal("self-reversal without a fixed point".into()))?;
                (ClosedArc::new(p, Q::zero()), None)
            }
        })
    };
    let (ip, tp) = core((c / 2) % ne)?;
    let (iq, tq) = core((c / 2 + m) % ne)?;
    let mut out = vec![
        (ClosedArc::between(&ip.end(), &iq.start), s.clone()),
        (ClosedArc::between(&iq.end(), &ip.start), s.inverse()),
    ];
    if let Some(t) = tp {
        out.push((ip, t));
    }
    if let Some(t) = tq {
        out.push((iq, t));
    }
    EvalMap::piecewise(out)
}

/// Orientation reversing involution `μ` with `μ f μ = f⁻¹` for `f` with
/// rotation number `p/n ≠ 0`; `matching` is an axis of the word of `fⁿ`
/// (absent when `fⁿ` is the identity).
pub fn involution_two_ii(
    f: &PLMap,
    period: u64,
    matching: Option<&ComponentMatching>,
) -> Result<EvalMap> {
    let n = period;
    if n < 2 {
        return Err(Error::Precondition("period must be at least 2".into()));
    }
    let pows = powers(f, n);
    let g = pows[n as usize].clone();
    let (tile, mu0) = if g.is_identity() {
        let u = CirclePoint::zero();
        let d = next_orbit_exponent(f, &u, n) as usize;
        let tile = ClosedArc::between(&u, &pows[d].evaluate(&u));
        (tile.clone(), EvalMap::affine(tile.clone(), tile, true)?)
    } else {
        let matching = matching.ok_or_else(|| {
            Error::Precondition("an axis of the word of f^n is required".into())
        })?;
        base_reversal(f, &g, &pows, matching)?
    };
    let mut tiles = Vec::with_capacity(n as usize);
    for k in 0..n as usize {
        let fk = &pows[k];
        let arc = ClosedArc::between(
            &fk.evaluate_inverse(&tile.start),
            &fk.evaluate_inverse(&tile.end()),
        );
        let map = EvalMap::compose(vec![
            EvalMap::pl(fk.clone()),
            mu0.clone(),
            EvalMap::pl(fk.clone()),
        ]);
        tiles.push((arc, map));
    }
    EvalMap::piecewise(tiles)
}

/// The reversal `μ₀` on a fundamental tile `F` between consecutive orbit points.
fn base_reversal(
    f: &PLMap,
    g: &PLMap,
    pows: &[PLMap],
    matching: &ComponentMatching,
) -> Result<(ClosedArc, EvalMap)> {
    let n = pows.len() - 1;
    let layout = Layout::of(g)?;
    let ginv = g.invert();
    let linv = Layout::of(&ginv)?;
    let ne = layout.elements.len();
    let blocks = ne / 2;
    if blocks % n != 0 {
        return Err(Error::Internal(format!(
            "{blocks} blocks do not split into {n} orbits"
        )));
    }
    let mp = blocks / n;
    let c = match matching.rule {
        MatchRule::Axis(c) => c,
        MatchRule::Shift(_) => {
            return Err(Error::Precondition("a reflection matching is required".into()))
        }
    };
    let u0 = layout.elements[0].start.clone();
    let d = next_orbit_exponent(f, &u0, n as u64) as usize;
    if pows[d].evaluate(&u0) != layout.elements[2 * mp].start {
        return Err(Error::Internal("orbit step does not advance one tile".into()));
    }
    // anchor element x: the tile from x to x + 2m' is mirrored about x + m'
    let anchors: Vec<usize> = (0..2 * n).map(|t| (c / 2 + mp * t) % ne).collect();
    let x = anchors
        .iter()
        .copied()
        .find(|a| a % 2 == 0)
        .unwrap_or(anchors[0]);
    let axis = (2 * x + 2 * mp) % ne;
    let mm = ComponentMatching::axis(blocks, axis);
    let s_pieces = conjugator_on_layouts(g, &layout, &ginv, &linv, &mm)?;
    let piece = |e: usize| s_pieces.iter().find(|(i, _, _)| *i == e % ne);
    let mirror = |e: usize| (axis + ne - e % ne) % ne;
    let mut pieces = Vec::new();
    for t in 1..mp {
        let e = (x + t) % ne;
        if let Some((_, arc, map)) = piece(e) {
            pieces.push((arc.clone(), map.clone()));
            pieces.push((element_arc(&layout, mirror(e)), map.inverse()));
        }
    }
    let ce = (x + mp) % ne;
    let carc = element_arc(&layout, ce);
    match layout.elements[ce].kind {
        ElementKind::Gap(_) => pieces.push((carc.clone(), reverse_on_arc(g, &carc)?)),
        ElementKind::Arc => pieces.push((carc.clone(), EvalMap::affine(carc.clone(), carc, true)?)),
        ElementKind::Point => {}
    }
    let fd = &pows[d];
    let tile = if x % 2 == 0 {
        let cx = &layout.elements[x];
        let q = cx.midpoint();
        let fq = fd.evaluate(&q);
        let left = ClosedArc::between(&q, &cx.end());
        let right = ClosedArc::between(&layout.elements[(x + 2 * mp) % ne].start, &fq);
        if !left.len.is_zero() {
            pieces.push((left.clone(), EvalMap::affine(left.clone(), right.clone(), true)?));
            pieces.push((right.clone(), EvalMap::affine(right, left, true)?));
        }
        ClosedArc::between(&q, &fq)
    } else {
        let j = element_arc(&layout, x);
        let tau = reverse_on_arc(g, &j)?;
        pieces.push((j.clone(), EvalMap::compose(vec![EvalMap::pl(fd.clone()), tau])));
        ClosedArc::between(&j.start, &fd.evaluate(&j.start))
    };
    Ok((tile, EvalMap::piecewise(pieces)?))
}

/// Orientation reversing involution `τ` with `τ f τ = f⁻¹` for orientation
/// reversing `f` with fixed points `a`, `b`; `matching` is a pinned axis of
/// the word of `f²` exchanging `a` and `b`.
pub fn involution_two_minus(
    f: &PLMap,
    a: &CirclePoint,
    b: &CirclePoint,
    matching: &ComponentMatching,
) -> Result<EvalMap> {
    if f.is_involution() {
        return Ok(EvalMap::pl(f.clone()));
    }
    let g = f.compose(f);
    let mu = reversing_involution_rot0(&g, matching)?;
    if &mu.eval(a)? != b || &mu.eval(b)? != a {
        return Err(Error::Internal("reversal of f^2 does not exchange a and b".into()));
    }
    let ff = EvalMap::pl(f.clone());
    EvalMap::piecewise(vec![
        (ClosedArc::between(a, b), mu.clone()),
        (ClosedArc::between(b, a), EvalMap::compose(vec![ff.clone(), mu, ff])),
    ])
}

/// Orientation reversing `γ : J → J'` with `γ g⁻¹ γ = g` on `J`, where `g`
/// maps `J` onto `J'` preserving orientation.
pub fn involution_between_intervals(
    g: &EvalMap,
    j: &ClosedArc,
    jp: &ClosedArc,
) -> Result<EvalMap> {
    if j.len.is_zero() || jp.len.is_zero() {
        return Err(Error::Precondition("intervals must be nontrivial".into()));
    }
    if j.contains(&jp.start) || j.contains(&jp.end()) || jp.contains(&j.start) {
        return Err(Error::Precondition(format!("{j} and {jp} overlap")));
    }
    if g.eval(&j.start)? != jp.start || g.eval(&j.end())? != jp.end() {
        return Err(Error::Precondition(format!("g does not map {j} onto {jp}")));
    }
    let q = j.midpoint();
    let gq = g.eval(&q)?;
    let left = ClosedArc::between(&j.start, &q);
    let alpha = EvalMap::affine(left.clone(), ClosedArc::between(&gq, &jp.end()), true)?;
    EvalMap::piecewise(vec![
        (left, alpha.clone()),
        (
            ClosedArc::between(&q, &j.end()),
            EvalMap::compose(vec![g.clone(), alpha.inverse(), g.clone()]),
        ),
    ])
}

fn find_non_period_two(f2: &PLMap) -> Option<CirclePoint> {
    for ((xa, _), (xb, _)) in f2.segments() {
        for t in [half(), Q::new(1.into(), 4.into())] {
            let x = CirclePoint::new(&xa + t * (&xb - &xa));
            if f2.evaluate(&x) != x {
                return Some(x);
            }
        }
    }
    None
}

/// Three orientation preserving involutions `σ₁, σ₂, σ₃` with `σ₁σ₂σ₃ = f`.
pub fn factor_three_involutions(f: &PLMap) -> Result<Vec<EvalMap>> {
    if f.degree() != 1 {
        return Err(Error::Precondition(
            "three-involution factorisation needs an orientation preserving map".into(),
        ));
    }
    if f.is_involution() {
        return Ok(vec![EvalMap::pl(f.clone()), EvalMap::identity(), EvalMap::identity()]);
    }
    let f2 = f.compose(f);
    let x = find_non_period_two(&f2)
        .ok_or_else(|| Error::Internal("f^2 fixes every sampled point".into()))?;
    let fx = f.evaluate(&x);
    if x.distance_to(&fx) < x.distance_to(&f2.evaluate(&x)) {
        three_core(f, &x)
    } else {
        let mut v = three_core(&f.invert(), &x)?;
        v.reverse();
        Ok(v)
    }
}

/// Requires `x, f(x), f²(x)` distinct in anticlockwise order.
fn three_core(f: &PLMap, x: &CirclePoint) -> Result<Vec<EvalMap>> {
    let finv = f.invert();
    let fx = f.evaluate(x);
    let lx = x.distance_to(&fx);
    let big_l = fx.distance_to(x);
    let p = |z: &CirclePoint| fx.distance_to(z);
    let a_at = |s: &Q| -> Q {
        if s.is_zero() {
            Q::zero()
        } else {
            p(&f.evaluate(&x.shifted(s)))
        }
    };
    let b_at = |s: &Q| -> Q {
        if s == &lx {
            big_l.clone()
        } else {
            p(&finv.evaluate(&x.shifted(s)))
        }
    };
    let mut bps: Vec<Q> = f
        .breakpoints()
        .iter()
        .chain(finv.breakpoints())
        .map(|b| x.distance_to(&CirclePoint::new(b.clone())))
        .filter(|s| s.is_positive() && s < &lx)
        .collect();
    bps.sort();
    bps.dedup();
    let f3x = f.evaluate(&f.evaluate(&fx));
    let p3 = x.distance_to(&f3x);
    let y0 = if p3.is_positive() && p3 < lx { p3 } else { Q::zero() };
    let y = (&y0 + &lx) * half();
    // corridor below min(A, B) on (x, y): breakpoints, crossings, a midpoint
    let mut left: Vec<Q> = bps.iter().filter(|s| s < &&y).cloned().collect();
    left.push(&y * half());
    let mut grid = vec![Q::zero()];
    grid.extend(left.iter().cloned());
    grid.push(y.clone());
    grid.sort();
    grid.dedup();
    for w in grid.windows(2) {
        let da = a_at(&w[0]) - b_at(&w[0]);
        let db = a_at(&w[1]) - b_at(&w[1]);
        if (da.is_negative() && db.is_positive()) || (da.is_positive() && db.is_negative()) {
            left.push(&w[0] + &da * (&w[1] - &w[0]) / (&da - &db));
        }
    }
    left.sort();
    left.dedup();
    let mut knots: Vec<(Q, Q)> = vec![(Q::zero(), Q::zero())];
    for s in &left {
        let (a, b) = (a_at(s), b_at(s));
        knots.push((s.clone(), if a < b { a } else { b } * half()));
    }
    knots.push((y.clone(), a_at(&y)));
    for s in bps.iter().filter(|s| s > &&y) {
        knots.push((s.clone(), (a_at(s) + b_at(s)) * half()));
    }
    knots.push((lx.clone(), big_l.clone()));
    let mut pairs = Vec::with_capacity(2 * knots.len());
    for (s, v) in &knots {
        let t = x.shifted(s);
        let w = fx.shifted(v);
        pairs.push((t.clone(), w.clone()));
        pairs.push((w, t));
    }
    let sigma = PLMap::from_circle_points(1, &pairs)?;
    if !sigma.is_involution() {
        return Err(Error::Internal("corridor map is not an involution".into()));
    }
    let fp = sigma.compose(f);
    let w = signature(&fp)?;
    let m = half_turn_matching(&w).ok_or_else(|| {
        Error::Internal(format!("sigma f has signature {} without half-turn", w.render()))
    })?;
    let mu = involution_rot0(&fp, &m)?;
    Ok(vec![
        EvalMap::pl(sigma),
        mu.clone(),
        EvalMap::compose(vec![mu, EvalMap::pl(fp)]),
    ])
}

/// Conjugacy `c` of degree `eps` with `c ∘ f = g ∘ c` for maps with equal
/// certified rotation numbers (up to sign), built on a fundamental tile
/// between consecutive periodic points and propagated along orbits.
pub fn build_periodic_conjugator(
    f: &PLMap,
    g: &PLMap,
    eps: i8,
    pins: &[(CirclePoint, CirclePoint)],
    limits: Limits,
) -> Result<Conjugacy> {
    let rf = rotation_number(f, limits.max_period, limits.max_iter)?;
    let rg = rotation_number(g, limits.max_period, limits.max_iter)?;
    let (uf, q, ug, qg) = match (&rf, &rg) {
        (
            RotationNumber::Rational {
                witness: uf,
                period: q,
                ..
            },
            RotationNumber::Rational {
                witness: ug,
                period: qg,
                ..
            },
        ) => (uf.clone(), *q, ug.clone(), *qg),
        _ => {
            return Ok(Conjugacy::Unknown(format!(
                "rotation numbers not both certified: {rf}; {rg}"
            )))
        }
    };
    if q != qg {
        return Ok(Conjugacy::NotConjugate(format!("periods {q} and {qg} differ")));
    }
    let fq = f.pow(q as i64);
    let gq = g.pow(q as i64);
    if fq.is_identity() != gq.is_identity() {
        return Ok(Conjugacy::NotConjugate(format!(
            "exactly one of the maps has identity {q}-th power"
        )));
    }
    if q == 1 && fq.is_identity() {
        let c = if pins.is_empty() {
            if eps == 1 {
                PLMap::identity()
            } else {
                PLMap::reflection(&Q::zero())
            }
        } else {
            PLMap::from_circle_points(eps, pins)?
        };
        return Ok(Conjugacy::Found {
            conjugator: EvalMap::pl(c),
            description: "both maps are the identity".into(),
        });
    }
    if q == 1 {
        let wf = signature(f)?;
        let wg = signature(g)?;
        return Ok(match matchings(&wf, &wg, eps, pins).into_iter().next() {
            Some(m) => Conjugacy::Found {
                conjugator: equivariant_conjugator(f, g, &m)?,
                description: m.to_string(),
            },
            None => Conjugacy::NotConjugate(format!(
                "no matching of degree {eps} takes {}to {}",
                wf.render(),
                wg.render().trim_end()
            )),
        });
    }
    let fp = powers(f, q);
    let gp = powers(g, q);
    let (tile0, description): (Vec<(ClosedArc, EvalMap)>, String) = if fq.is_identity() {
        let d = next_orbit_exponent(f, &uf, q) as usize;
        let tile = ClosedArc::between(&uf, &fp[d].evaluate(&uf));
        let gdv = gp[d].evaluate(&ug);
        let target = if eps == 1 {
            ClosedArc::between(&ug, &gdv)
        } else {
            ClosedArc::between(&gdv, &ug)
        };
        if target.len.is_zero() {
            return Ok(Conjugacy::NotConjugate("orbit orders differ".into()));
        }
        (
            vec![(tile.clone(), EvalMap::affine(tile, target, eps == -1)?)],
            "both maps are conjugate to a rotation".into(),
        )
    } else {
        let lf = Layout::of(&fq)?;
        let lg = Layout::of(&gq)?;
        if lf.blocks() != lg.blocks() {
            return Ok(Conjugacy::NotConjugate(format!(
                "the {q}-th powers have {} and {} fix components",
                lf.blocks(),
                lg.blocks()
            )));
        }
        let ne = lf.elements.len();
        let sf = block_action(f, &fq)?;
        let sg = block_action(g, &gq)?;
        let wf = SignatureWord::Blocks(lf.word());
        let wg = SignatureWord::Blocks(lg.word());
        let m = matchings(&wf, &wg, eps, &[]).into_iter().find(|m| {
            (0..ne).all(|i| {
                m.map_element((i + sf) % ne).unwrap() == (m.map_element(i).unwrap() + sg) % ne
            })
        });
        let m = match m {
            Some(m) => m,
            None => {
                return Ok(Conjugacy::NotConjugate(format!(
                    "no equivariant matching of degree {eps} between the words {}and {}",
                    wf.render(),
                    wg.render().trim_end()
                )))
            }
        };
        let u = lf.elements[0].start.clone();
        let d = next_orbit_exponent(f, &u, q) as usize;
        let t = lf.locate(&fp[d].evaluate(&u));
        let pieces = conjugator_on_layouts(&fq, &lf, &gq, &lg, &m)?;
        (
            pieces
                .into_iter()
                .filter(|(i, _, _)| *i < t)
                .map(|(_, a, m)| (a, m))
                .collect(),
            format!("{m} on the words of the {q}-th powers"),
        )
    };
    let d = next_orbit_exponent(f, &uf, q);
    let mut pieces = Vec::with_capacity(tile0.len() * q as usize);
    for j in 0..q {
        let e = ((d * j) % q) as usize;
        for (arc, map) in &tile0 {
            let image = ClosedArc::between(&fp[e].evaluate(&arc.start), &fp[e].evaluate(&arc.end()));
            pieces.push((
                image,
                EvalMap::compose(vec![
                    EvalMap::pl(gp[e].clone()),
                    map.clone(),
                    EvalMap::pl(fp[e].invert()),
                ]),
            ));
        }
    }
    Ok(Conjugacy::Found {
        conjugator: EvalMap::piecewise(pieces)?,
        description,
    })
}

/// Builds the involutions for a YES plan.
pub fn realize(f: &PLMap, plan: &Plan) -> Result<(Route, Vec<EvalMap>)> {
    Ok(match plan {
        Plan::Involution if f.degree() == -1 => (Route::TwoMinus, vec![EvalMap::pl(f.clone())]),
        Plan::Involution => (Route::RotHalfTrivial, vec![EvalMap::identity()]),
        Plan::HalfTurn(m) => (Route::Rot0, vec![involution_rot0(f, m)?]),
        Plan::Reflection(m) => (Route::TwoIReversing, vec![reversing_involution_rot0(f, m)?]),
        Plan::Periodic {
            period, matching, ..
        } => (
            Route::TwoIi,
            vec![involution_two_ii(f, *period, matching.as_ref())?],
        ),
        Plan::ReversingPair { a, b, matching } => {
            (Route::TwoMinus, vec![involution_two_minus(f, a, b, matching)?])
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub samples: usize,
    pub all_pass: bool,
    pub checks: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    /// Largest denominator (in bits) met while evaluating, and where.
    pub max_denominator_bits: u64,
    pub worst_sample: Option<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

fn checks_for(route: Route) -> Vec<String> {
    match route {
        Route::ThreeInvolutions => vec![
            "sigma_i(sigma_i(x)) = x".into(),
            "sigma_1(sigma_2(sigma_3(x))) = f(x)".into(),
        ],
        _ => vec!["mu(mu(x)) = x".into(), "mu(f(mu(x))) = f^-1(x)".into()],
    }
}

/// Exact pointwise check of the defining equations of `route`.
pub fn verify(
    route: Route,
    involutions: &[EvalMap],
    target: &PLMap,
    points: &[CirclePoint],
) -> VerificationReport {
    let start = Instant::now();
    let mut report = VerificationReport {
        samples: points.len(),
        all_pass: true,
        checks: checks_for(route),
        failure: None,
        max_denominator_bits: 0,
        worst_sample: None,
        elapsed: Duration::ZERO,
    };
    let expected = if route == Route::ThreeInvolutions { 3 } else { 1 };
    if involutions.len() != expected {
        report.all_pass = false;
        report.failure = Some(format!(
            "route {route} needs {expected} involutions, found {}",
            involutions.len()
        ));
        return report;
    }
    let finv = target.invert();
    for x in points {
        match check_point(route, involutions, target, &finv, x) {
            Ok(bits) => {
                if bits > report.max_denominator_bits || report.worst_sample.is_none() {
                    report.max_denominator_bits = bits.max(report.max_denominator_bits);
                    report.worst_sample = Some(x.to_string());
                }
            }
            Err(msg) => {
                report.all_pass = false;
                report.failure = Some(msg);
                break;
            }
        }
    }
    report.elapsed = start.elapsed();
    report
}

fn den_bits(x: &CirclePoint) -> u64 {
    x.value().denom().bits()
}

fn check_point(
    route: Route,
    inv: &[EvalMap],
    f: &PLMap,
    finv: &PLMap,
    x: &CirclePoint,
) -> std::result::Result<u64, String> {
    let ev = |m: &EvalMap, p: &CirclePoint| m.eval(p).map_err(|e| format!("at {x}: {e}"));
    let mut bits = 0;
    if route == Route::ThreeInvolutions {
        for (i, s) in inv.iter().enumerate() {
            let y = ev(s, x)?;
            let z = ev(s, &y)?;
            bits = bits.max(den_bits(&y));
            if &z != x {
                return Err(format!("sigma_{}(sigma_{}({x})) = {z}", i + 1, i + 1));
            }
        }
        let y = ev(&inv[0], &ev(&inv[1], &ev(&inv[2], x)?)?)?;
        let fx = f.evaluate(x);
        if y != fx {
            return Err(format!("sigma_1 sigma_2 sigma_3 ({x}) = {y}, f({x}) = {fx}"));
        }
        return Ok(bits.max(den_bits(&y)));
    }
    let mu = &inv[0];
    let y = ev(mu, x)?;
    let z = ev(mu, &y)?;
    if &z != x {
        return Err(format!("mu(mu({x})) = {z}"));
    }
    let w = ev(mu, &f.evaluate(&y))?;
    let want = finv.evaluate(x);
    if w != want {
        return Err(format!("mu(f(mu({x}))) = {w}, f^-1({x}) = {want}"));
    }
    Ok(den_bits(&y).max(den_bits(&w)))
}

/// A verified factorisation of `target` into involutions.
#[derive(Clone, Debug)]
pub struct Witness {
    pub involutions: Vec<EvalMap>,
    pub target: PLMap,
    pub route: Route,
    pub samples: SamplePlan,
    pub verification: VerificationReport,
}

impl Witness {
    /// Verifies and returns the witness, or the failing sample as an error.
    pub fn new(
        route: Route,
        involutions: Vec<EvalMap>,
        target: PLMap,
        samples: SamplePlan,
    ) -> Result<Witness> {
        let verification = verify(route, &involutions, &target, &samples.points());
        if !verification.all_pass {
            return Err(Error::Verification(
                verification.failure.clone().unwrap_or_default(),
            ));
        }
        Ok(Witness {
            involutions,
            target,
            route,
            samples,
            verification,
        })
    }

    pub fn to_archive(&self) -> WitnessArchive {
        WitnessArchive {
            format: WITNESS_FORMAT.to_string(),
            route: self.route,
            target: self.target.to_description(),
            involutions: self.involutions.iter().map(|m| m.to_json_value()).collect(),
            samples: SamplesJson {
                farey: self.samples.farey,
                random: self.samples.random,
                seed: self.samples.seed,
            },
            verification: self.verification.clone(),
        }
    }
}

pub const WITNESS_FORMAT: &str = "circrev-witness/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplesJson {
    pub farey: usize,
    pub random: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessArchive {
    pub format: String,
    pub route: Route,
    pub target: MapDescription,
    pub involutions: Vec<EvalMapJson>,
    pub samples: SamplesJson,
    pub verification: VerificationReport,
}

impl WitnessArchive {
    pub fn from_json(s: &str) -> Result<WitnessArchive> {
        let a: WitnessArchive =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("witness archive: {e}")))?;
        if a.format != WITNESS_FORMAT {
            return Err(Error::Parse(format!("unsupported archive format {:?}", a.format)));
        }
        Ok(a)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("archive serializes")
    }

    pub fn involutions(&self) -> Result<Vec<EvalMap>> {
        self.involutions.iter().map(EvalMap::from_json_value).collect()
    }

    pub fn sample_plan(&self) -> SamplePlan {
        SamplePlan {
            farey: self.samples.farey,
            random: self.samples.random,
            seed: self.samples.seed,
        }
    }

    /// Re-runs the exact checks against `target` (the archived map by default).
    pub fn reverify(&self, target: Option<&PLMap>) -> Result<VerificationReport> {
        let archived = self.target.to_map()?;
        let f = target.unwrap_or(&archived);
        Ok(verify(self.route, &self.involutions()?, f, &self.sample_plan().points()))
    }
}

/// Decision plan to verified witness.
pub fn witness_for_plan(f: &PLMap, plan: &Plan, samples: SamplePlan) -> Result<Witness> {
    let (route, inv) = realize(f, plan)?;
    Witness::new(route, inv, f.clone(), samples)
}

pub fn three_involution_witness(f: &PLMap, samples: SamplePlan) -> Result<Witness> {
    let inv = factor_three_involutions(f)?;
    Witness::new(Route::ThreeInvolutions, inv, f.clone(), samples)
}
