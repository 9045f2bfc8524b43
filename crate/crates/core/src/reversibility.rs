//! Decisions for strong reversibility and conjugacy, reduced to matchings of
//! signature words.

use std::fmt;

use num::Zero;
use serde::Serialize;

use crate::circle::CirclePoint;
use crate::dynamics::{
    fixed_points, rotation_number, signature, ElementKind, FixSet, Limits, RotationNumber,
    SignatureWord,
};
use crate::error::{Error, Result};
use crate::evalmap::EvalMap;
use crate::factorization::Route;
use crate::plmap::PLMap;
use crate::rational::{fmt_q, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Preserving,
    Reversing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MatchRule {
    /// Block `i` goes to block `i + k`.
    Shift(usize),
    /// Element `i` of the doubled sequence goes to element `c - i`.
    Axis(usize),
}

/// A correspondence between the elements (fix components and gaps) of two
/// layouts with `blocks` fix components each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentMatching {
    pub blocks: usize,
    pub rule: MatchRule,
    /// Points `a` whose image must be `b`.
    pub pins: Vec<(CirclePoint, CirclePoint)>,
}

impl ComponentMatching {
    pub fn shift(blocks: usize, k: usize) -> Self {
        ComponentMatching {
            blocks,
            rule: MatchRule::Shift(k % blocks.max(1)),
            pins: Vec::new(),
        }
    }

    pub fn axis(blocks: usize, c: usize) -> Self {
        ComponentMatching {
            blocks,
            rule: MatchRule::Axis(c % (2 * blocks).max(1)),
            pins: Vec::new(),
        }
    }

    pub fn with_pins(mut self, pins: Vec<(CirclePoint, CirclePoint)>) -> Self {
        self.pins = pins;
        self
    }

    pub fn is_reversing(&self) -> bool {
        matches!(self.rule, MatchRule::Axis(_))
    }

    pub fn orientation(&self) -> Orientation {
        if self.is_reversing() {
            Orientation::Reversing
        } else {
            Orientation::Preserving
        }
    }

    pub fn map_element(&self, i: usize) -> Result<usize> {
        let n = 2 * self.blocks;
        match self.rule {
            MatchRule::Shift(k) => Ok((i + 2 * k) % n),
            MatchRule::Axis(c) => {
                if c % 2 == 1 {
                    return Err(Error::Precondition(
                        "an odd axis exchanges fix components with gaps".into(),
                    ));
                }
                Ok((c + n - i % n) % n)
            }
        }
    }

    pub fn to_json(&self) -> MatchingJson {
        let (shift, axis) = match self.rule {
            MatchRule::Shift(k) => (Some(k), None),
            MatchRule::Axis(c) => (None, Some(c)),
        };
        MatchingJson {
            orientation: self.orientation(),
            blocks: self.blocks,
            shift,
            axis,
            pins: self
                .pins
                .iter()
                .map(|(a, b)| [a.to_string(), b.to_string()])
                .collect(),
        }
    }
}

impl fmt::Display for ComponentMatching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rule {
            MatchRule::Shift(k) => write!(f, "shift by {k} of {} blocks", self.blocks)?,
            MatchRule::Axis(c) => write!(f, "reflection with axis {c} of {} blocks", self.blocks)?,
        }
        for (a, b) in &self.pins {
            write!(f, ", {a} -> {b}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchingJson {
    pub orientation: Orientation,
    pub blocks: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub pins: Vec<[String; 2]>,
}

/// The doubled alternating sequence of a word.
pub fn word_elements(w: &SignatureWord) -> Vec<ElementKind> {
    match w {
        SignatureWord::Blocks(blocks) => blocks
            .iter()
            .flat_map(|b| {
                let k = match b.fix.kind() {
                    crate::dynamics::FixKind::Point => ElementKind::Point,
                    crate::dynamics::FixKind::Arc => ElementKind::Arc,
                };
                [k, ElementKind::Gap(b.sign)]
            })
            .collect(),
        _ => Vec::new(),
    }
}

fn block_of(w: &SignatureWord, x: &CirclePoint) -> Option<usize> {
    match w {
        SignatureWord::Blocks(blocks) => blocks.iter().position(|b| b.fix.contains(x)),
        _ => None,
    }
}

/// Every matching `σ` of the elements of `wf` onto those of `wg` with equal
/// kinds and `sign_g(σ(i)) = degree · sign_f(i)`, honouring `pins`, in order
/// of increasing shift or axis.
pub fn matchings(
    wf: &SignatureWord,
    wg: &SignatureWord,
    degree: i8,
    pins: &[(CirclePoint, CirclePoint)],
) -> Vec<ComponentMatching> {
    let ef = word_elements(wf);
    let eg = word_elements(wg);
    if ef.is_empty() || ef.len() != eg.len() {
        return Vec::new();
    }
    let m = ef.len() / 2;
    let mut pin_idx = Vec::with_capacity(pins.len());
    for (a, b) in pins {
        match (block_of(wf, a), block_of(wg, b)) {
            (Some(i), Some(j)) => pin_idx.push((2 * i, 2 * j)),
            _ => return Vec::new(),
        }
    }
    let candidates: Vec<ComponentMatching> = if degree == 1 {
        (0..m).map(|k| ComponentMatching::shift(m, k)).collect()
    } else {
        (0..m).map(|c| ComponentMatching::axis(m, 2 * c)).collect()
    };
    candidates
        .into_iter()
        .filter(|cm| {
            (0..2 * m).all(|i| {
                let j = cm.map_element(i).expect("even axes only");
                match (ef[i], eg[j]) {
                    (ElementKind::Gap(s), ElementKind::Gap(t)) => t == degree * s,
                    (a, b) => a == b,
                }
            }) && pin_idx
                .iter()
                .all(|(i, j)| cm.map_element(*i).expect("even axes only") == *j)
        })
        .map(|cm| cm.with_pins(pins.to_vec()))
        .collect()
}

/// The shift by `m/2` conjugating `f⁻¹` to `f`, if signs flip and kinds agree.
pub fn half_turn_matching(w: &SignatureWord) -> Option<ComponentMatching> {
    let m = word_elements(w).len() / 2;
    if m == 0 || m % 2 == 1 {
        return None;
    }
    matchings(&w.negated(), w, 1, &[])
        .into_iter()
        .find(|cm| cm.rule == MatchRule::Shift(m / 2))
}

/// First reflection axis conjugating `f` to `f⁻¹` by an orientation reversing map.
pub fn reflection_matching(
    w: &SignatureWord,
    pins: &[(CirclePoint, CirclePoint)],
) -> Option<ComponentMatching> {
    matchings(w, &w.negated(), -1, pins).into_iter().next()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Group {
    #[serde(rename = "H+")]
    HPlus,
    #[serde(rename = "H")]
    H,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::HPlus => "H+",
            Group::H => "H",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

impl Answer {
    pub fn exit_code(self) -> i32 {
        match self {
            Answer::Yes => 0,
            Answer::No => 1,
            Answer::Unknown => 2,
        }
    }
}

/// How a YES verdict is realised.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Plan {
    /// `f` is itself an involution.
    Involution,
    /// Orientation preserving witness from a half-turn matching.
    HalfTurn(ComponentMatching),
    /// Orientation reversing witness for a map with fixed points.
    Reflection(ComponentMatching),
    /// Orientation reversing witness for rotation number `p/n ≠ 0`, from an
    /// axis of the word of `fⁿ` (`None` when `fⁿ` is the identity).
    Periodic {
        rotation: Q,
        period: u64,
        matching: Option<ComponentMatching>,
    },
    /// Orientation reversing `f` with fixed points `a`, `b`.
    ReversingPair {
        a: CirclePoint,
        b: CirclePoint,
        matching: ComponentMatching,
    },
}

impl Plan {
    pub fn route(&self, degree: i8) -> Route {
        match self {
            Plan::Involution if degree == -1 => Route::TwoMinus,
            Plan::Involution => Route::RotHalfTrivial,
            Plan::HalfTurn(_) => Route::Rot0,
            Plan::Reflection(_) => Route::TwoIReversing,
            Plan::Periodic { .. } => Route::TwoIi,
            Plan::ReversingPair { .. } => Route::TwoMinus,
        }
    }

    pub fn to_json(&self, degree: i8) -> PlanJson {
        let mut p = PlanJson {
            route: self.route(degree),
            matching: None,
            rotation: None,
            period: None,
            fixed_points: None,
            compatibility: None,
        };
        match self {
            Plan::Involution => {}
            Plan::HalfTurn(m) | Plan::Reflection(m) => p.matching = Some(m.to_json()),
            Plan::Periodic {
                rotation,
                period,
                matching,
            } => {
                p.rotation = Some(fmt_q(rotation));
                p.period = Some(*period);
                p.matching = matching.as_ref().map(|m| m.to_json());
                p.compatibility = Some("axis commutes with the block action of f".into());
            }
            Plan::ReversingPair { a, b, matching } => {
                p.fixed_points = Some([a.to_string(), b.to_string()]);
                p.matching = Some(matching.to_json());
            }
        }
        p
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlanJson {
    pub route: Route,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matching: Option<MatchingJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rotation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_points: Option<[String; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compatibility: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub answer: Answer,
    pub group: Group,
    pub reason: String,
    pub plan: Option<Plan>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerdictJson {
    pub verdict: Answer,
    pub group: Group,
    pub reason: String,
    pub plan: Option<PlanJson>,
}

impl Verdict {
    fn yes(group: Group, reason: impl Into<String>, plan: Plan) -> Verdict {
        Verdict {
            answer: Answer::Yes,
            group,
            reason: reason.into(),
            plan: Some(plan),
        }
    }

    fn no(group: Group, reason: impl Into<String>) -> Verdict {
        Verdict {
            answer: Answer::No,
            group,
            reason: reason.into(),
            plan: None,
        }
    }

    fn unknown(group: Group, rho: &RotationNumber) -> Verdict {
        Verdict {
            answer: Answer::Unknown,
            group,
            reason: format!("rotation number not certified rational: {rho}"),
            plan: None,
        }
    }

    pub fn to_json(&self, degree: i8) -> VerdictJson {
        VerdictJson {
            verdict: self.answer,
            group: self.group,
            reason: self.reason.clone(),
            plan: self.plan.as_ref().map(|p| p.to_json(degree)),
        }
    }
}

/// Strong reversibility in the orientation preserving group.
pub fn decide_strongly_reversible_hplus(f: &PLMap, limits: Limits) -> Result<Verdict> {
    let group = Group::HPlus;
    if f.degree() != 1 {
        return Err(Error::Precondition(
            "H+ decisions need an orientation preserving map".into(),
        ));
    }
    if f.is_involution() {
        return Ok(Verdict::yes(group, "f is an involution", Plan::Involution));
    }
    let rho = rotation_number(f, limits.max_period, limits.max_iter)?;
    let value = match rho.rational() {
        None => return Ok(Verdict::unknown(group, &rho)),
        Some(v) => v.clone(),
    };
    if !value.is_zero() {
        let reason = if value == crate::rational::half() {
            "rotation number 1/2 and f is not an involution".to_string()
        } else {
            format!("rotation number {} is neither 0 nor 1/2", fmt_q(&value))
        };
        return Ok(Verdict::no(group, reason));
    }
    let w = signature(f)?;
    match half_turn_matching(&w) {
        Some(m) => Ok(Verdict::yes(
            group,
            format!("signature {} has a sign-reversing half-turn", w.render().trim_end()),
            Plan::HalfTurn(m),
        )),
        None => Ok(Verdict::no(
            group,
            format!(
                "signature {} has no sign-reversing half-turn",
                w.render().trim_end()
            ),
        )),
    }
}

/// Strong reversibility in the full homeomorphism group.
pub fn decide_strongly_reversible_h(f: &PLMap, limits: Limits) -> Result<Verdict> {
    let group = Group::H;
    if f.is_involution() {
        return Ok(Verdict::yes(group, "f is an involution", Plan::Involution));
    }
    if f.degree() == -1 {
        let (a, b) = reversing_fixed_pair(f)?;
        let g = f.compose(f);
        let w = signature(&g)?;
        let pins = vec![(a.clone(), b.clone()), (b.clone(), a.clone())];
        return Ok(match reflection_matching(&w, &pins) {
            Some(m) => Verdict::yes(
                group,
                format!(
                    "signature {} of f^2 has an axis exchanging the fixed points {a} and {b}",
                    w.render().trim_end()
                ),
                Plan::ReversingPair { a, b, matching: m },
            ),
            None => Verdict::no(
                group,
                format!(
                    "signature {} of f^2 has no axis exchanging the fixed points {a} and {b}",
                    w.render().trim_end()
                ),
            ),
        });
    }
    let rho = rotation_number(f, limits.max_period, limits.max_iter)?;
    let (value, period) = match &rho {
        RotationNumber::Rational { value, period, .. } => (value.clone(), *period),
        _ => return Ok(Verdict::unknown(group, &rho)),
    };
    if value.is_zero() {
        let w = signature(f)?;
        if let Some(m) = half_turn_matching(&w) {
            return Ok(Verdict::yes(
                group,
                format!("signature {} has a sign-reversing half-turn", w.render().trim_end()),
                Plan::HalfTurn(m),
            ));
        }
        return Ok(match reflection_matching(&w, &[]) {
            Some(m) => Verdict::yes(
                group,
                format!("signature {} has a sign-preserving reflection", w.render().trim_end()),
                Plan::Reflection(m),
            ),
            None => Verdict::no(
                group,
                format!(
                    "signature {} has neither a sign-reversing half-turn nor a sign-preserving reflection",
                    w.render().trim_end()
                ),
            ),
        });
    }
    let g = f.pow(period as i64);
    if g.is_identity() {
        return Ok(Verdict::yes(
            group,
            format!(
                "f^{period} is the identity, so f is conjugate to a rotation by {}",
                fmt_q(&value)
            ),
            Plan::Periodic {
                rotation: value,
                period,
                matching: None,
            },
        ));
    }
    let w = signature(&g)?;
    match reflection_matching(&w, &[]) {
        Some(m) => {
            if !axis_commutes_with_f(f, &g, &m)? {
                return Err(Error::Internal(
                    "reflection axis does not commute with the block action of f".into(),
                ));
            }
            Ok(Verdict::yes(
                group,
                format!(
                    "rotation number {}; signature {} of f^{period} has a sign-preserving reflection",
                    fmt_q(&value),
                    w.render().trim_end()
                ),
                Plan::Periodic {
                    rotation: value,
                    period,
                    matching: Some(m),
                },
            ))
        }
        None => Ok(Verdict::no(
            group,
            format!(
                "rotation number {}; signature {} of f^{period} has no sign-preserving reflection",
                fmt_q(&value),
                w.render().trim_end()
            ),
        )),
    }
}

/// Fixed points `a, b` of an orientation reversing map, in increasing order.
pub fn reversing_fixed_pair(f: &PLMap) -> Result<(CirclePoint, CirclePoint)> {
    match fixed_points(f) {
        FixSet::Components(c) if c.len() == 2 => Ok((c[0].start().clone(), c[1].start().clone())),
        other => Err(Error::Internal(format!(
            "orientation reversing map with fixed set {other:?}"
        ))),
    }
}

/// Index shift of the elements of the layout of `g = fⁿ` under `f`.
pub fn block_action(f: &PLMap, g: &PLMap) -> Result<usize> {
    let layout = crate::dynamics::Layout::of(g)?;
    let x = layout.elements[0].start.clone();
    let fx = f.evaluate(&x);
    let j = layout.locate(&fx);
    if j % 2 == 1 || layout.elements[j].start != fx {
        return Err(Error::Internal("f does not permute the fix components of f^n".into()));
    }
    Ok(j)
}

/// Checks that the reflection `i ↦ c − i` conjugates the block action of `f`
/// to its inverse, as needed to propagate a reversal of `fⁿ` along orbits.
pub fn axis_commutes_with_f(f: &PLMap, g: &PLMap, m: &ComponentMatching) -> Result<bool> {
    let s = block_action(f, g)?;
    let n = 2 * m.blocks;
    Ok((0..n).all(|i| {
        let lhs = m.map_element((m.map_element(i).unwrap() + s) % n).unwrap();
        lhs == (i + n - s) % n
    }))
}

/// Outcome of a conjugacy search.
#[derive(Clone, Debug)]
pub enum Conjugacy {
    /// `c` with `c ∘ f = g ∘ c`.
    Found {
        conjugator: EvalMap,
        description: String,
    },
    NotConjugate(String),
    Unknown(String),
}

/// Searches for `h` of degree `eps` with `h f h⁻¹ = g`.
pub fn conjugate_in_h(f: &PLMap, g: &PLMap, eps: i8, limits: Limits) -> Result<Conjugacy> {
    if f.degree() != g.degree() {
        return Err(Error::Precondition(
            "conjugate maps have equal degrees".into(),
        ));
    }
    if eps != 1 && eps != -1 {
        return Err(Error::Precondition("eps must be 1 or -1".into()));
    }
    if f.degree() == -1 {
        return conjugate_reversing(f, g, eps, limits);
    }
    let rf = rotation_number(f, limits.max_period, limits.max_iter)?;
    let rg = rotation_number(g, limits.max_period, limits.max_iter)?;
    let (vf, vg) = match (rf.rational(), rg.rational()) {
        (Some(a), Some(b)) => (a.clone(), b.clone()),
        _ => {
            return Ok(Conjugacy::Unknown(format!(
                "rotation numbers not both certified: {rf}; {rg}"
            )))
        }
    };
    let expected = crate::rational::frac(&(&vf * Q::from_integer(eps.into())));
    if expected != vg {
        return Ok(Conjugacy::NotConjugate(format!(
            "rotation numbers {} and {} are incompatible with degree {eps}",
            fmt_q(&vf),
            fmt_q(&vg)
        )));
    }
    crate::factorization::build_periodic_conjugator(f, g, eps, &[], limits)
}

fn conjugate_reversing(f: &PLMap, g: &PLMap, eps: i8, limits: Limits) -> Result<Conjugacy> {
    let (af, bf) = reversing_fixed_pair(f)?;
    let (ag, bg) = reversing_fixed_pair(g)?;
    let f2 = f.compose(f);
    let g2 = g.compose(g);
    for (a2, b2) in [(&ag, &bg), (&bg, &ag)] {
        let pins = vec![(af.clone(), a2.clone()), (bf.clone(), b2.clone())];
        let k = match crate::factorization::build_periodic_conjugator(&f2, &g2, eps, &pins, limits)? {
            Conjugacy::Found { conjugator, .. } => conjugator,
            Conjugacy::Unknown(r) => return Ok(Conjugacy::Unknown(r)),
            Conjugacy::NotConjugate(_) => continue,
        };
        let upper = crate::evalmap::ClosedArc::between(&af, &bf);
        let lower = crate::evalmap::ClosedArc::between(&bf, &af);
        let c = EvalMap::piecewise(vec![
            (upper, k.clone()),
            (
                lower,
                EvalMap::compose(vec![EvalMap::pl(g.clone()), k, EvalMap::pl(f.invert())]),
            ),
        ])?;
        return Ok(Conjugacy::Found {
            conjugator: c,
            description: format!("conjugator of the squares sending {af} -> {a2}, {bf} -> {b2}"),
        });
    }
    Ok(Conjugacy::NotConjugate(
        "the squares admit no conjugator respecting the fixed points".into(),
    ))
}
