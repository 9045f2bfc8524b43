//! JSON report schema shared by the command line tool and the C interface.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::circle::CirclePoint;
use crate::dynamics::{
    fixed_points, minimal_period, rotation_number, signature, FixComponent, FixSet, Limits,
    RotationNumber, SignatureWord,
};
use crate::error::Result;
use crate::factorization::{Route, VerificationReport, Witness};
use crate::plmap::PLMap;
use crate::rational::fmt_q;
use crate::reversibility::{Verdict, VerdictJson};

pub const REPORT_FORMAT: &str = "circrev-report/1";

/// Hex SHA-256 of the raw input bytes.
pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, Serialize)]
pub struct Settings {
    pub max_period: u64,
    pub max_iter: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Settings {
    pub fn new(limits: Limits) -> Settings {
        Settings {
            max_period: limits.max_period,
            max_iter: limits.max_iter,
            samples: None,
            seed: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub format: &'static str,
    pub command: String,
    pub input_digest: String,
    pub settings: Settings,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: &str, input: &[u8], settings: Settings, result: T) -> Report<T> {
        Report {
            format: REPORT_FORMAT,
            command: command.to_string(),
            input_digest: digest(input),
            settings,
            result,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentJson {
    pub kind: &'static str,
    pub start: String,
    pub end: String,
}

impl From<&FixComponent> for ComponentJson {
    fn from(c: &FixComponent) -> Self {
        ComponentJson {
            kind: match c {
                FixComponent::Point(_) => "point",
                FixComponent::Arc { .. } => "arc",
            },
            start: c.start().to_string(),
            end: c.end().to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixSetJson {
    pub full_circle: bool,
    pub components: Vec<ComponentJson>,
}

impl From<&FixSet> for FixSetJson {
    fn from(s: &FixSet) -> Self {
        FixSetJson {
            full_circle: matches!(s, FixSet::FullCircle),
            components: s.components().iter().map(ComponentJson::from).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockJson {
    pub kind: &'static str,
    pub start: String,
    pub end: String,
    pub sign: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WordJson {
    pub text: String,
    pub blocks: Vec<BlockJson>,
}

impl From<&SignatureWord> for WordJson {
    fn from(w: &SignatureWord) -> Self {
        let blocks = match w {
            SignatureWord::Blocks(b) => b
                .iter()
                .map(|b| {
                    let c = ComponentJson::from(&b.fix);
                    BlockJson {
                        kind: c.kind,
                        start: c.start,
                        end: c.end,
                        sign: if b.sign > 0 { "+" } else { "−" },
                    }
                })
                .collect(),
            _ => Vec::new(),
        };
        WordJson {
            text: w.render().trim_end().to_string(),
            blocks,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RotationJson {
    Rational {
        value: String,
        period: u64,
        witness: String,
    },
    Bracket {
        lo: String,
        hi: String,
        iterations: u64,
    },
}

impl From<&RotationNumber> for RotationJson {
    fn from(r: &RotationNumber) -> Self {
        match r {
            RotationNumber::Rational {
                value,
                witness,
                period,
            } => RotationJson::Rational {
                value: fmt_q(value),
                period: *period,
                witness: witness.to_string(),
            },
            RotationNumber::Bracket { lo, hi, iterations } => RotationJson::Bracket {
                lo: fmt_q(lo),
                hi: fmt_q(hi),
                iterations: *iterations,
            },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Analysis {
    pub degree: i8,
    pub vertices: usize,
    pub involution: bool,
    pub fixed_set: FixSetJson,
    /// Absent for orientation reversing maps.
    pub rotation_number: Option<RotationJson>,
    pub minimal_period: Option<u64>,
    pub periodic_point: Option<String>,
    /// Present when the rotation number is `0`; for orientation reversing
    /// maps this is the word of `f²`.
    pub signature: Option<WordJson>,
}

pub fn analyze(f: &PLMap, limits: Limits) -> Result<Analysis> {
    let fix = fixed_points(f);
    let mut a = Analysis {
        degree: f.degree(),
        vertices: f.vertex_count(),
        involution: f.is_involution(),
        fixed_set: FixSetJson::from(&fix),
        rotation_number: None,
        minimal_period: None,
        periodic_point: None,
        signature: None,
    };
    if f.degree() == -1 {
        a.signature = Some(WordJson::from(&signature(&f.compose(f))?));
        return Ok(a);
    }
    let rho = rotation_number(f, limits.max_period, limits.max_iter)?;
    if let RotationNumber::Rational { value, .. } = &rho {
        let (n, x): (u64, CirclePoint) = minimal_period(f, &rho)?;
        a.minimal_period = Some(n);
        a.periodic_point = Some(x.to_string());
        if num::Zero::is_zero(value) {
            a.signature = Some(WordJson::from(&signature(f)?));
        }
    }
    a.rotation_number = Some(RotationJson::from(&rho));
    Ok(a)
}

#[derive(Clone, Debug, Serialize)]
pub struct DecisionResult {
    #[serde(flatten)]
    pub verdict: VerdictJson,
    pub exit_code: i32,
}

pub fn decision(v: &Verdict, degree: i8) -> DecisionResult {
    DecisionResult {
        verdict: v.to_json(degree),
        exit_code: v.answer.exit_code(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorResult {
    pub involutions: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decision: Option<DecisionResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub route: Option<Route>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub archive: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_digest: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refusal: Option<String>,
}

impl FactorResult {
    pub fn refused(involutions: usize, decision: Option<DecisionResult>, why: String) -> Self {
        FactorResult {
            involutions,
            decision,
            route: None,
            verification: None,
            archive: None,
            witness_digest: None,
            refusal: Some(why),
        }
    }

    pub fn success(
        involutions: usize,
        decision: Option<DecisionResult>,
        w: &Witness,
        archive: Option<String>,
    ) -> Self {
        let text = w.to_archive().to_json();
        FactorResult {
            involutions,
            decision,
            route: Some(w.route),
            verification: Some(w.verification.clone()),
            archive,
            witness_digest: Some(digest(text.as_bytes())),
            refusal: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn analysis_of_examples() {
        let r = analyze(&PLMap::rotation(&q(1, 3)), Limits::default()).unwrap();
        assert_eq!(r.minimal_period, Some(3));
        assert!(r.signature.is_none());
        assert!(matches!(
            r.rotation_number,
            Some(RotationJson::Rational { ref value, .. }) if value == "1/3"
        ));
        let saw = PLMap::from_lift_vertices(1, vec![(q(0, 1), q(0, 1)), (q(1, 2), q(1, 4))])
            .unwrap();
        let r = analyze(&saw, Limits::default()).unwrap();
        let w = r.signature.unwrap();
        assert_eq!(w.text, "(•)−");
        assert_eq!(w.blocks[0].kind, "point");
        assert_eq!(r.fixed_set.components[0].start, "0");
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(
            digest(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
