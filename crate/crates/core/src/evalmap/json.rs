//! Combinator-tagged JSON form of [`EvalMap`] trees.
//!
//! ```json
//! {"node": "compose", "maps": [{"node": "pl", "map": {...}}, ...]}
//! ```
//! `compose` lists maps outermost first. Arcs are `{"start": "p/q", "length": "p/q"}`.

use serde::{Deserialize, Serialize};

use crate::circle::CirclePoint;
use crate::error::{Error, Result};
use crate::plmap::MapDescription;
use crate::rational::{fmt_q, parse_q};

use super::{ClosedArc, EquivariantExtension, EvalMap, Node};

pub const EVALMAP_FORMAT: &str = "circrev-evalmap/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcJson {
    pub start: String,
    pub length: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceJson {
    pub arc: ArcJson,
    pub map: EvalMapJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum EvalMapJson {
    Pl {
        map: MapDescription,
    },
    Affine {
        domain: ArcJson,
        target: ArcJson,
        reversing: bool,
    },
    Piecewise {
        pieces: Vec<PieceJson>,
    },
    Compose {
        maps: Vec<EvalMapJson>,
    },
    Inverse {
        of: Box<EvalMapJson>,
    },
    Equivariant {
        domain: ArcJson,
        target: ArcJson,
        reversing: bool,
        f: MapDescription,
        g: MapDescription,
        x0: String,
        y0: String,
    },
}

fn arc_json(a: &ClosedArc) -> ArcJson {
    ArcJson {
        start: a.start.to_string(),
        length: fmt_q(&a.len),
    }
}

fn arc_from(a: &ArcJson) -> Result<ClosedArc> {
    let start = CirclePoint::new(parse_q(&a.start)?);
    let len = parse_q(&a.length)?;
    if len < num::Zero::zero() || len > num::One::one() {
        return Err(Error::Parse(format!("arc length {} outside [0, 1]", a.length)));
    }
    Ok(ClosedArc::new(start, len))
}

fn bare(m: &crate::plmap::PLMap) -> MapDescription {
    let mut d = m.to_description();
    d.format = None;
    d
}

impl EvalMap {
    pub fn to_json_value(&self) -> EvalMapJson {
        match self.node() {
            Node::Pl(m) => EvalMapJson::Pl { map: bare(m) },
            Node::Affine(a) => EvalMapJson::Affine {
                domain: arc_json(&a.domain),
                target: arc_json(&a.target),
                reversing: a.reversing,
            },
            Node::Piecewise(ps) => EvalMapJson::Piecewise {
                pieces: ps
                    .iter()
                    .map(|p| PieceJson {
                        arc: arc_json(&p.arc),
                        map: p.map.to_json_value(),
                    })
                    .collect(),
            },
            Node::Compose(ms) => EvalMapJson::Compose {
                maps: ms.iter().map(|m| m.to_json_value()).collect(),
            },
            Node::InverseOf(m) => EvalMapJson::Inverse {
                of: Box::new(m.to_json_value()),
            },
            Node::Equivariant(e) => EvalMapJson::Equivariant {
                domain: arc_json(&e.domain),
                target: arc_json(&e.target),
                reversing: e.reversing,
                f: bare(&e.f),
                g: bare(&e.g),
                x0: e.x0.to_string(),
                y0: e.y0.to_string(),
            },
        }
    }

    /// Rebuilds the tree, re-running every construction check.
    pub fn from_json_value(v: &EvalMapJson) -> Result<EvalMap> {
        Ok(match v {
            EvalMapJson::Pl { map } => EvalMap::pl(map.to_map()?),
            EvalMapJson::Affine {
                domain,
                target,
                reversing,
            } => EvalMap::affine(arc_from(domain)?, arc_from(target)?, *reversing)?,
            EvalMapJson::Piecewise { pieces } => {
                let mut ps = Vec::with_capacity(pieces.len());
                for p in pieces {
                    ps.push((arc_from(&p.arc)?, EvalMap::from_json_value(&p.map)?));
                }
                EvalMap::piecewise_exact(ps)?
            }
            EvalMapJson::Compose { maps } => {
                let ms = maps
                    .iter()
                    .map(EvalMap::from_json_value)
                    .collect::<Result<Vec<_>>>()?;
                EvalMap::compose_exact(ms)
            }
            EvalMapJson::Inverse { of } => EvalMap::inverse_of(EvalMap::from_json_value(of)?),
            EvalMapJson::Equivariant {
                domain,
                target,
                reversing,
                f,
                g,
                x0,
                y0,
            } => EvalMap::equivariant(EquivariantExtension::new(
                arc_from(domain)?,
                arc_from(target)?,
                *reversing,
                f.to_map()?,
                g.to_map()?,
                CirclePoint::new(parse_q(x0)?),
                CirclePoint::new(parse_q(y0)?),
            )?),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("evalmap serializes")
    }

    pub fn from_json(s: &str) -> Result<EvalMap> {
        let v: EvalMapJson =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("evalmap JSON: {e}")))?;
        EvalMap::from_json_value(&v)
    }
}
