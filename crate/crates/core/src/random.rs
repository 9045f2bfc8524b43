//! Seeded generators for test corpora. Every map comes with the data that
//! certifies its construction (a periodic orbit, a prescribed word).

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circle::CirclePoint;
use crate::dynamics::FixKind;
use crate::error::{Error, Result};
use crate::plmap::PLMap;
use crate::rational::{q, qi, Q};

/// What a generated map is known to satisfy by construction.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<String>,
    /// A periodic orbit listed in orbit order `x, f(x), f²(x), …`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub orbit: Vec<CirclePoint>,
    /// Signature word of `f` (or of `fⁿ` on a fundamental arc for periodic
    /// maps), rendered as in reports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub map: PLMap,
    pub certificate: Certificate,
}

/// One block of a prescribed word: a fix component followed by the sign of
/// the gap after it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WordBlock {
    pub kind: FixKind,
    pub sign: i8,
}

/// Parses words like `P+P-` or `A+P-` (`P` point, `A` arc).
pub fn parse_word(s: &str) -> Result<Vec<WordBlock>> {
    let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() || chars.len() % 2 == 1 {
        return Err(Error::Parse(format!("word {s:?}: expected pairs like P+ or A-")));
    }
    chars
        .chunks(2)
        .map(|c| {
            let kind = match c[0] {
                'P' | 'p' => FixKind::Point,
                'A' | 'a' => FixKind::Arc,
                k => return Err(Error::Parse(format!("word {s:?}: unknown kind {k:?}"))),
            };
            let sign = match c[1] {
                '+' => 1,
                '-' | '−' => -1,
                k => return Err(Error::Parse(format!("word {s:?}: unknown sign {k:?}"))),
            };
            Ok(WordBlock { kind, sign })
        })
        .collect()
}

pub fn render_word(w: &[WordBlock]) -> String {
    w.iter()
        .map(|b| {
            let k = if b.kind == FixKind::Point { "P" } else { "A" };
            let s = if b.sign > 0 { "+" } else { "-" };
            format!("{k}{s}")
        })
        .collect()
}

pub struct Generator {
    rng: ChaCha8Rng,
    /// Denominator used for vertex coordinates.
    pub den: i64,
}

impl Generator {
    pub fn new(seed: u64) -> Generator {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            den: 64,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// `k` sorted distinct points of the open interval `(0, 1)`.
    fn cuts(&mut self, k: usize) -> Vec<Q> {
        let den = self.den.max(2 * k as i64 + 2);
        let mut picked: Vec<i64> = Vec::with_capacity(k);
        while picked.len() < k {
            let n = self.rng.gen_range(1..den);
            if !picked.contains(&n) {
                picked.push(n);
            }
        }
        picked.sort_unstable();
        picked.into_iter().map(|n| q(n, den)).collect()
    }

    /// Rational in `(lo, hi)` with denominator `den`, `0 < lo < hi < 1` assumed.
    fn between(&mut self, lo: i64, hi: i64, den: i64) -> Q {
        q(self.rng.gen_range(lo + 1..hi), den)
    }

    pub fn sign(&mut self) -> i8 {
        if self.rng.gen_bool(0.5) {
            1
        } else {
            -1
        }
    }

    /// Random homeomorphism of the given degree with up to `vertices`
    /// breakpoints.
    pub fn homeomorphism(&mut self, degree: i8, vertices: usize) -> PLMap {
        let n = vertices.max(1);
        let mut xs = vec![Q::zero()];
        xs.extend(self.cuts(n - 1));
        let weights: Vec<i64> = (0..n).map(|_| self.rng.gen_range(1..8)).collect();
        let total: i64 = weights.iter().sum();
        let y0 = q(self.rng.gen_range(0..self.den), self.den);
        let mut ys = vec![y0.clone()];
        let mut acc = 0;
        for w in &weights[..n - 1] {
            acc += w;
            ys.push(&y0 + q(acc, total));
        }
        let h = PLMap::from_lift_vertices(1, xs.into_iter().zip(ys).collect())
            .expect("increasing lift");
        if degree == -1 {
            h.compose(&PLMap::reflection(&Q::zero()))
        } else {
            h
        }
    }

    /// Small random conjugator, used to hide the structure of a model map.
    pub fn conjugator(&mut self) -> PLMap {
        let v = self.rng.gen_range(1..4);
        self.homeomorphism(1, v)
    }

    pub fn random_word(&mut self, blocks: usize, arcs: bool) -> Vec<WordBlock> {
        (0..blocks)
            .map(|_| WordBlock {
                kind: if arcs && self.rng.gen_bool(0.3) {
                    FixKind::Arc
                } else {
                    FixKind::Point
                },
                sign: self.sign(),
            })
            .collect()
    }

    /// Lift vertices on `[0, 1]` of an orientation preserving map fixing `0`
    /// whose word, starting at the component through `0`, is `word`.
    fn word_vertices(&mut self, word: &[WordBlock]) -> Vec<(Q, Q)> {
        // component i occupies one cut (point) or two (arc); block 0 sits at 0
        let extra: usize = word.iter().skip(1).map(|b| b.kind_cuts()).sum();
        let arc0 = word[0].kind == FixKind::Arc;
        let k = extra + if arc0 { 2 } else { 0 };
        let cuts = self.cuts(k);
        let mut it = cuts.into_iter();
        let mut bounds: Vec<(Q, Q)> = Vec::new();
        let mut head = Q::zero();
        if arc0 {
            head = it.next().unwrap();
        }
        bounds.push((Q::zero(), head));
        for b in &word[1..] {
            let s = it.next().unwrap();
            let e = if b.kind == FixKind::Arc {
                it.next().unwrap()
            } else {
                s.clone()
            };
            bounds.push((s, e));
        }
        let tail = if arc0 { it.next().unwrap() } else { Q::one() };
        let mut verts = Vec::new();
        for (i, b) in word.iter().enumerate() {
            let (s, e) = &bounds[i];
            verts.push((s.clone(), s.clone()));
            if e != s {
                verts.push((e.clone(), e.clone()));
            }
            let next = if i + 1 < word.len() {
                bounds[i + 1].0.clone()
            } else {
                tail.clone()
            };
            verts.extend(self.bump(e, &next, b.sign));
        }
        if arc0 {
            verts.push((tail.clone(), tail));
        }
        verts
    }

    /// Interior vertices of a map of `[u, v]` fixing the ends with sign `s`.
    fn bump(&mut self, u: &Q, v: &Q, s: i8) -> Vec<(Q, Q)> {
        let len = v - u;
        let d = 16;
        let a = self.between(3, d - 4, d);
        let lim = 3;
        let off = q(self.rng.gen_range(1..=lim), d);
        let b = if s > 0 { &a + &off } else { &a - &off };
        let mut out = vec![(u + &len * &a, u + &len * &b)];
        if self.rng.gen_bool(0.3) {
            // a second breakpoint on the same side of the diagonal
            let a2 = (&a + Q::one()) / qi(2);
            let b2 = if s > 0 {
                (&b + Q::one()) / qi(2)
            } else {
                (&a2 + &b) / qi(2)
            };
            if a2 > a && b2 > b && (s > 0) == (b2 > a2) && b2 < Q::one() {
                out.push((u + &len * a2, u + &len * b2));
            }
        }
        out
    }

    /// Orientation preserving map realising `word` with fixed points.
    pub fn with_word(&mut self, word: &[WordBlock]) -> Result<Generated> {
        if word.is_empty() {
            return Err(Error::Unsatisfiable("empty word".into()));
        }
        let f = PLMap::from_lift_vertices(1, self.word_vertices(word))?;
        let h = self.conjugator();
        Ok(Generated {
            map: f.conjugate_by(&h),
            certificate: Certificate {
                rotation: Some("0".into()),
                word: Some(render_word(word)),
                ..Default::default()
            },
        })
    }

    /// Map with rotation number `p/q` through the orbit `0 ↦ p/q ↦ …`,
    /// random between orbit points, then conjugated.
    pub fn with_rotation(&mut self, p: i64, qq: i64) -> Result<Generated> {
        if qq < 1 || p < 0 || p >= qq || (p == 0 && qq != 1) || crate::dynamics::gcd(p as u64, qq as u64) != 1 {
            return Err(Error::Unsatisfiable(format!("rotation {p}/{qq} must be reduced in [0, 1)")));
        }
        let mut verts = Vec::new();
        for i in 0..qq {
            let x = q(i, qq);
            let y = q(i + p, qq);
            verts.push((x.clone(), y.clone()));
            let d = 8;
            let a = self.between(0, d, d) / qi(qq);
            let b = self.between(0, d, d) / qi(qq);
            verts.push((x + a, y + b));
        }
        let f = PLMap::from_lift_vertices(1, verts)?;
        Ok(self.periodic_certified(f, p, qq))
    }

    fn periodic_certified(&mut self, f: PLMap, p: i64, qq: i64) -> Generated {
        let h = self.conjugator();
        let g = f.conjugate_by(&h);
        let mut orbit = vec![h.evaluate(&CirclePoint::zero())];
        for _ in 1..qq {
            let next = g.evaluate(orbit.last().unwrap());
            orbit.push(next);
        }
        Generated {
            map: g,
            certificate: Certificate {
                rotation: Some(format!("{p}/{qq}")),
                orbit,
                ..Default::default()
            },
        }
    }

    /// Map with rotation number `p/q` whose `q`-th power restricted to the arc
    /// between consecutive orbit points realises `word`.
    pub fn periodic_with_word(&mut self, p: i64, qq: i64, word: &[WordBlock]) -> Result<Generated> {
        if qq < 2 || p <= 0 || p >= qq || crate::dynamics::gcd(p as u64, qq as u64) != 1 {
            return Err(Error::Unsatisfiable(format!("rotation {p}/{qq} must be reduced in (0, 1)")));
        }
        if word.is_empty() {
            return Err(Error::Unsatisfiable("empty word".into()));
        }
        let scale = qi(qq);
        let shift = q(p, qq);
        let mut verts: Vec<(Q, Q)> = self
            .word_vertices(word)
            .into_iter()
            .filter(|(x, _)| x < &Q::one())
            .map(|(x, y)| (x / &scale, y / &scale + &shift))
            .collect();
        verts.push((Q::one() / &scale, Q::one() / &scale + &shift));
        let f = PLMap::from_lift_vertices(1, verts)?;
        let mut g = self.periodic_certified(f, p, qq);
        g.certificate.word = Some(render_word(word));
        Ok(g)
    }

    pub fn preserving_involution(&mut self) -> PLMap {
        let h = self.conjugator();
        PLMap::rotation(&q(1, 2)).conjugate_by(&h)
    }

    pub fn reversing_involution(&mut self) -> PLMap {
        let h = self.conjugator();
        let c = q(self.rng.gen_range(0..self.den), self.den);
        PLMap::reflection(&c).conjugate_by(&h)
    }

    /// `τ ∘ σ` for random involutions, reversing `τ` and preserving `σ`;
    /// strongly reversible since `σ (τσ) σ = στ`.
    pub fn reversing_product(&mut self) -> Generated {
        let tau = self.reversing_involution();
        let sigma = self.preserving_involution();
        Generated {
            map: tau.compose(&sigma),
            certificate: Certificate {
                note: Some("tau o sigma, reversed by sigma".into()),
                ..Default::default()
            },
        }
    }

    /// Orientation reversing `f` fixing `0` and `1/2` whose square is `φ` on
    /// `[0, 1/2]` with `φ` realising the point word `signs`; the other half
    /// carries the mirrored word, so `f²` has a reflection exchanging the two
    /// fixed points exactly when `signs` is a palindrome.
    pub fn reversing_with_half_word(&mut self, signs: &[i8]) -> Result<Generated> {
        if signs.is_empty() {
            return Err(Error::Unsatisfiable("empty word".into()));
        }
        let word: Vec<WordBlock> = signs
            .iter()
            .map(|&sign| WordBlock {
                kind: FixKind::Point,
                sign,
            })
            .collect();
        let two = qi(2);
        let mut verts = vec![(Q::zero(), Q::zero()), (q(1, 2), q(-1, 2))];
        for (u, pu) in self.word_vertices(&word) {
            let (u, pu) = (u / &two, pu / &two);
            if u.is_zero() || u == q(1, 2) {
                continue;
            }
            verts.push((Q::one() - u, pu - Q::one()));
        }
        let f = PLMap::from_lift_vertices(-1, verts)?;
        let h = self.conjugator();
        let palindrome = signs.iter().eq(signs.iter().rev());
        Ok(Generated {
            map: f.conjugate_by(&h),
            certificate: Certificate {
                word: Some(render_word(&word)),
                note: Some(if palindrome {
                    "square has an exchanging axis".into()
                } else {
                    "square has no exchanging axis".into()
                }),
                ..Default::default()
            },
        })
    }

    /// Non-palindromic point word of length `k ≥ 3`.
    pub fn chiral_signs(&mut self, k: usize) -> Vec<i8> {
        loop {
            let s: Vec<i8> = (0..k.max(3)).map(|_| self.sign()).collect();
            if !s.iter().eq(s.iter().rev()) {
                return s;
            }
        }
    }
}

impl WordBlock {
    fn kind_cuts(&self) -> usize {
        if self.kind == FixKind::Arc {
            2
        } else {
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{fixed_points, rotation_number, signature, FixSet, RotationNumber};

    #[test]
    fn word_parse_round_trip() {
        let w = parse_word("P+A-P-").unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(render_word(&w), "P+A-P-");
        assert!(parse_word("P").is_err());
        assert!(parse_word("X+").is_err());
    }

    #[test]
    fn prescribed_word_is_realised() {
        let mut g = Generator::new(3);
        for s in ["P+P-", "A+P-", "P-", "A+", "P+P-A+A-P-"] {
            let w = parse_word(s).unwrap();
            for _ in 0..10 {
                let f = g.with_word(&w).unwrap().map;
                let got = signature(&f).unwrap();
                let blocks = match &got {
                    crate::dynamics::SignatureWord::Blocks(b) => b.clone(),
                    other => panic!("{s}: {other:?}"),
                };
                assert_eq!(blocks.len(), w.len(), "{s}");
                // same cyclic word up to rotation
                let n = w.len();
                let ok = (0..n).any(|r| {
                    (0..n).all(|i| {
                        let b = &blocks[(i + r) % n];
                        b.fix.kind() == w[i].kind && b.sign == w[i].sign
                    })
                });
                assert!(ok, "{s}: {got:?}");
            }
        }
    }

    #[test]
    fn rotation_is_certified() {
        let mut g = Generator::new(7);
        for (p, qq) in [(1, 2), (1, 3), (2, 5), (3, 7)] {
            let r = g.with_rotation(p, qq).unwrap();
            let orbit = &r.certificate.orbit;
            assert_eq!(orbit.len(), qq as usize);
            assert_eq!(r.map.evaluate(orbit.last().unwrap()), orbit[0]);
            match rotation_number(&r.map, 64, 100_000).unwrap() {
                RotationNumber::Rational { value, .. } => assert_eq!(value, q(p, qq)),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn periodic_word_power() {
        let mut g = Generator::new(11);
        let w = parse_word("P+P-A+").unwrap();
        let r = g.periodic_with_word(2, 5, &w).unwrap();
        let f5 = r.map.pow(5);
        match signature(&f5).unwrap() {
            crate::dynamics::SignatureWord::Blocks(b) => assert_eq!(b.len(), 15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn involutions_and_reversing_maps() {
        let mut g = Generator::new(5);
        for _ in 0..20 {
            assert!(g.preserving_involution().is_involution());
            let t = g.reversing_involution();
            assert!(t.is_involution() && t.degree() == -1);
            let f = g.homeomorphism(-1, 4);
            match fixed_points(&f) {
                FixSet::Components(c) => assert_eq!(c.len(), 2),
                other => panic!("{other:?}"),
            }
            let r = g.reversing_with_half_word(&[1, 1, -1]).unwrap();
            assert_eq!(r.map.degree(), -1);
            let s = signature(&r.map.compose(&r.map)).unwrap();
            assert!(matches!(s, crate::dynamics::SignatureWord::Blocks(ref b) if b.len() == 6));
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = Generator::new(9).homeomorphism(1, 5);
        let b = Generator::new(9).homeomorphism(1, 5);
        assert_eq!(a, b);
    }
}
