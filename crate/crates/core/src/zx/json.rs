//! JSON document form of a [`ZxDiagram`].
//!
//! Phases are written as `phase_num`/`phase_den_pi` when they are rational
//! multiples of π and as a float `phase` otherwise. Boundary ports are the
//! ids listed in `inputs`/`outputs`; they do not appear under `spiders`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::c64;

use super::diagram::{Color, EdgeKind, Node, NodeId, Spider, ZxDiagram};
use super::phase::Phase;

#[derive(Serialize, Deserialize)]
struct SpiderDoc {
    id: NodeId,
    color: ColorDoc,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    phase_num: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    phase_den_pi: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    phase: Option<f64>,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
enum ColorDoc {
    Z,
    X,
}

#[derive(Serialize, Deserialize)]
struct EdgeDoc {
    a: NodeId,
    b: NodeId,
    #[serde(default)]
    hadamard: bool,
}

#[derive(Serialize, Deserialize)]
struct ScalarDoc {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct DiagramDoc {
    spiders: Vec<SpiderDoc>,
    edges: Vec<EdgeDoc>,
    inputs: Vec<NodeId>,
    outputs: Vec<NodeId>,
    #[serde(default = "unit_scalar")]
    scalar: ScalarDoc,
}

fn unit_scalar() -> ScalarDoc {
    ScalarDoc { re: 1.0, im: 0.0 }
}

impl ZxDiagram {
    pub fn to_json(&self) -> String {
        let spiders = self
            .nodes()
            .filter_map(|(id, n)| match n {
                Node::Spider(s) => Some((id, *s)),
                Node::Boundary => None,
            })
            .map(|(id, s)| {
                let color = match s.color {
                    Color::Z => ColorDoc::Z,
                    Color::X => ColorDoc::X,
                };
                match s.phase.as_pi_fraction() {
                    Some(r) => SpiderDoc {
                        id,
                        color,
                        phase_num: Some(*r.numer()),
                        phase_den_pi: Some(*r.denom()),
                        phase: None,
                    },
                    None => SpiderDoc {
                        id,
                        color,
                        phase_num: None,
                        phase_den_pi: None,
                        phase: Some(s.phase.radians()),
                    },
                }
            })
            .collect();
        let doc = DiagramDoc {
            spiders,
            edges: self
                .edges()
                .iter()
                .map(|e| EdgeDoc {
                    a: e.a,
                    b: e.b,
                    hadamard: e.kind == EdgeKind::Hadamard,
                })
                .collect(),
            inputs: self.inputs().to_vec(),
            outputs: self.outputs().to_vec(),
            scalar: ScalarDoc {
                re: self.scalar().re,
                im: self.scalar().im,
            },
        };
        serde_json::to_string_pretty(&doc).expect("diagram serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<ZxDiagram> {
        let doc: DiagramDoc = serde_json::from_str(text)?;
        let mut d = ZxDiagram::new();
        let mut max_id = 0;
        for s in &doc.spiders {
            let phase = match (s.phase_num, s.phase_den_pi, s.phase) {
                (Some(_), Some(0), _) => {
                    return Err(Error::MalformedDiagram(format!(
                        "spider {} has phase denominator 0",
                        s.id
                    )))
                }
                (Some(n), Some(den), _) => Phase::from_pi_fraction(n, den),
                (None, None, Some(x)) if x.is_finite() => Phase::from_radians(x),
                (None, None, None) => Phase::zero(),
                _ => {
                    return Err(Error::MalformedDiagram(format!(
                        "spider {} has an inconsistent phase",
                        s.id
                    )))
                }
            };
            let color = match s.color {
                ColorDoc::Z => Color::Z,
                ColorDoc::X => Color::X,
            };
            if d.nodes
                .insert(s.id, Node::Spider(Spider { color, phase }))
                .is_some()
            {
                return Err(Error::MalformedDiagram(format!("duplicate id {}", s.id)));
            }
            max_id = max_id.max(s.id + 1);
        }
        for &b in doc.inputs.iter().chain(&doc.outputs) {
            if d.nodes.insert(b, Node::Boundary).is_some() {
                return Err(Error::MalformedDiagram(format!("duplicate id {b}")));
            }
            max_id = max_id.max(b + 1);
        }
        d.inputs = doc.inputs;
        d.outputs = doc.outputs;
        for e in doc.edges {
            let kind = if e.hadamard {
                EdgeKind::Hadamard
            } else {
                EdgeKind::Plain
            };
            d.add_edge(e.a, e.b, kind);
        }
        d.scalar = c64(doc.scalar.re, doc.scalar.im);
        d.next_id = max_id;
        d.validate()?;
        Ok(d)
    }
}
