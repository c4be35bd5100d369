//! File formats for frames and models.
//!
//! Frames travel as JSON documents of the shape
//! `{"worlds": N, "edges": [[u, v], …], "names": {"0": "root", …}?}` and
//! models add `{"valuation": {"p0": [w, …], …}}`. World names are cosmetic:
//! the in-memory types use dense integer ids only. The DOT renderer draws
//! each non-singleton cluster as a box and can overlay extra dashed edges on
//! top of the relation (used to picture linked paths).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bits::BitSet;

use super::{Frame, KripkeError, Model};

/// Wire form of a frame.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameDoc {
    pub worlds: usize,
    pub edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<BTreeMap<usize, String>>,
}

impl FrameDoc {
    pub fn from_frame(frame: &Frame) -> Self {
        FrameDoc {
            worlds: frame.size(),
            edges: frame.edges(),
            names: None,
        }
    }

    pub fn to_frame(&self) -> Result<Frame, KripkeError> {
        let frame = Frame::new(self.worlds, &self.edges)?;
        if let Some(names) = &self.names {
            if let Some(&world) = names.keys().find(|&&w| w >= self.worlds) {
                return Err(KripkeError::WorldOutOfRange {
                    world,
                    size: self.worlds,
                });
            }
        }
        Ok(frame)
    }
}

/// Wire form of a model: a frame document plus a valuation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDoc {
    pub worlds: usize,
    pub edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<BTreeMap<usize, String>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<usize>>,
}

impl ModelDoc {
    pub fn from_model(model: &Model) -> Self {
        ModelDoc {
            worlds: model.frame().size(),
            edges: model.frame().edges(),
            names: None,
            valuation: model
                .valuation()
                .iter()
                .map(|(p, set)| (p.clone(), set.iter().collect()))
                .collect(),
        }
    }

    pub fn to_model(&self) -> Result<Model, KripkeError> {
        let frame_doc = FrameDoc {
            worlds: self.worlds,
            edges: self.edges.clone(),
            names: self.names.clone(),
        };
        let frame = frame_doc.to_frame()?;
        let mut valuation = BTreeMap::new();
        for (var, worlds) in &self.valuation {
            if let Some(&world) = worlds.iter().find(|&&w| w >= self.worlds) {
                return Err(KripkeError::ValuationOutOfRange {
                    var: var.clone(),
                    world,
                    size: self.worlds,
                });
            }
            valuation.insert(
                var.clone(),
                BitSet::from_indices(self.worlds, worlds.iter().copied()),
            );
        }
        Model::new(frame, valuation)
    }
}

/// Rendering choices for [`to_dot`].
#[derive(Debug, Clone, Default)]
pub struct DotOptions<'a> {
    /// Display names for worlds; unnamed worlds show their id.
    pub names: Option<&'a BTreeMap<usize, String>>,
    /// Extra edges drawn dashed on top of the relation.
    pub overlay: &'a [(usize, usize)],
}

/// Renders a frame in Graphviz DOT syntax, boxing each non-singleton cluster.
pub fn to_dot(frame: &Frame, options: &DotOptions<'_>) -> String {
    let mut out = String::from("digraph frame {\n  rankdir=LR;\n  node [shape=circle];\n");
    let label = |w: usize| -> String {
        match options.names.and_then(|names| names.get(&w)) {
            Some(name) => format!("{w} [label=\"{}\"];", name.replace('"', "\\\"")),
            None => format!("{w};"),
        }
    };
    let skeleton = frame.skeleton();
    for (id, cluster) in skeleton.clusters().iter().enumerate() {
        if cluster.count() > 1 {
            let _ = writeln!(out, "  subgraph cluster_{id} {{");
            out.push_str("    style=rounded;\n");
            for w in cluster.iter() {
                let _ = writeln!(out, "    {}", label(w));
            }
            out.push_str("  }\n");
        } else {
            let w = cluster.first().expect("clusters are nonempty");
            let _ = writeln!(out, "  {}", label(w));
        }
    }
    for (u, v) in frame.edges() {
        let _ = writeln!(out, "  {u} -> {v};");
    }
    for &(u, v) in options.overlay {
        let _ = writeln!(out, "  {u} -> {v} [style=dashed];");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_doc_round_trip() {
        let frame = Frame::new(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let doc = FrameDoc::from_frame(&frame);
        let json = serde_json::to_string(&doc).unwrap();
        assert_eq!(json, r#"{"worlds":3,"edges":[[0,1],[1,2],[2,0]]}"#);
        let back: FrameDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_frame().unwrap(), frame);
    }

    #[test]
    fn frame_doc_accepts_names_and_checks_ranges() {
        let json = r#"{"worlds":2,"edges":[[0,1]],"names":{"0":"root"}}"#;
        let doc: FrameDoc = serde_json::from_str(json).unwrap();
        assert!(doc.to_frame().is_ok());

        let json = r#"{"worlds":2,"edges":[[0,1]],"names":{"5":"ghost"}}"#;
        let doc: FrameDoc = serde_json::from_str(json).unwrap();
        assert_eq!(
            doc.to_frame().unwrap_err(),
            KripkeError::WorldOutOfRange { world: 5, size: 2 }
        );

        let json = r#"{"worlds":2,"edges":[[0,7]]}"#;
        let doc: FrameDoc = serde_json::from_str(json).unwrap();
        assert_eq!(
            doc.to_frame().unwrap_err(),
            KripkeError::WorldOutOfRange { world: 7, size: 2 }
        );
    }

    #[test]
    fn model_doc_round_trip() {
        let json = r#"{"worlds":2,"edges":[[0,1],[1,0]],"valuation":{"p0":[0]}}"#;
        let doc: ModelDoc = serde_json::from_str(json).unwrap();
        let model = doc.to_model().unwrap();
        assert_eq!(model.var_set("p0").unwrap().iter().collect::<Vec<_>>(), [0]);
        let back = ModelDoc::from_model(&model);
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }

    #[test]
    fn model_doc_rejects_stray_worlds() {
        let json = r#"{"worlds":2,"edges":[],"valuation":{"p0":[3]}}"#;
        let doc: ModelDoc = serde_json::from_str(json).unwrap();
        assert_eq!(
            doc.to_model().unwrap_err(),
            KripkeError::ValuationOutOfRange {
                var: "p0".to_owned(),
                world: 3,
                size: 2
            }
        );
    }

    #[test]
    fn valuation_defaults_to_empty() {
        let json = r#"{"worlds":1,"edges":[]}"#;
        let doc: ModelDoc = serde_json::from_str(json).unwrap();
        assert!(doc.to_model().unwrap().valuation().is_empty());
    }

    #[test]
    fn dot_boxes_clusters_and_draws_overlays() {
        let frame = Frame::new(3, &[(0, 1), (1, 0), (1, 2)]).unwrap();
        let names = BTreeMap::from([(2, "sink".to_owned())]);
        let dot = to_dot(
            &frame,
            &DotOptions {
                names: Some(&names),
                overlay: &[(2, 0)],
            },
        );
        assert!(dot.contains("subgraph cluster_0"));
        assert!(dot.contains("2 [label=\"sink\"];"));
        assert!(dot.contains("1 -> 2;"));
        assert!(dot.contains("2 -> 0 [style=dashed];"));
        assert!(dot.ends_with("}\n"));
    }
}
