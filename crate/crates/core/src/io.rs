//! JSON instance files.
//!
//! Recoloring: `{"n": 4, "edges": [[0,1],...], "k": 2, "colors": [1, 2, null, 1], "weights": [...]}`.
//! Vertices are 0-based, colors 1-based, `null` (or 0) means uncolored.
//! `edges` defaults to the path `0-1-...-(n-1)` and `weights` to unit weight
//! on colored vertices.
//!
//! Assignment: `{"n": 3, "k": 2, "gains": [[...], [...]]}` with one row per symbol.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::capa::CapaInstance;
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphKind, Instance, PartialColoring};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(usize, usize)>>,
    /// Informational; checked against the edges when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<GraphKind>,
    pub k: usize,
    pub colors: Vec<Option<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapaFile {
    pub n: usize,
    pub k: usize,
    pub gains: Vec<Vec<f64>>,
}

/// Either kind of instance file.
#[derive(Debug, Clone, PartialEq)]
pub enum Loaded {
    Recoloring(Instance<f64>),
    Capa(CapaInstance<f64>),
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<Instance<f64>> {
        if self.colors.len() != self.n {
            return Err(Error::InvalidInstance(format!(
                "{} colors listed for n = {}",
                self.colors.len(),
                self.n
            )));
        }
        let graph = match &self.edges {
            Some(edges) => Graph::from_edges(self.n, edges)?,
            None => Graph::path(self.n)?,
        };
        if let Some(kind) = self.kind {
            if kind != graph.kind() {
                return Err(Error::InvalidGraph(format!(
                    "file says {kind:?} but the edges form a {:?}",
                    graph.kind()
                )));
            }
        }
        let labels: Vec<u32> = self.colors.iter().map(|c| c.unwrap_or(0)).collect();
        let coloring = PartialColoring::from_labels(self.k, &labels)?;
        match self.weights {
            Some(w) => Instance::new(graph, coloring, w),
            None => Instance::unit_weights(graph, coloring),
        }
    }

    pub fn from_instance(instance: &Instance<f64>) -> Self {
        let graph = instance.graph();
        InstanceFile {
            n: graph.vertex_count(),
            edges: (!graph.is_path() || !is_canonical_path(graph)).then(|| graph.edges().to_vec()),
            kind: Some(graph.kind()),
            k: instance.color_count(),
            colors: instance.coloring().assignment().iter().map(|c| c.map(|c| c.label())).collect(),
            weights: Some(instance.weights().to_vec()),
        }
    }
}

fn is_canonical_path(graph: &Graph) -> bool {
    (1..graph.vertex_count()).all(|v| graph.neighbors(v).contains(&(v - 1)))
}

impl CapaFile {
    pub fn into_instance(self) -> Result<CapaInstance<f64>> {
        if self.gains.len() != self.k {
            return Err(Error::InvalidInstance(format!(
                "{} gain rows for k = {}",
                self.gains.len(),
                self.k
            )));
        }
        if let Some(row) = self.gains.iter().find(|r| r.len() != self.n) {
            return Err(Error::InvalidInstance(format!(
                "gain row of length {} for n = {}",
                row.len(),
                self.n
            )));
        }
        CapaInstance::new(self.gains)
    }

    pub fn from_instance(capa: &CapaInstance<f64>) -> Self {
        CapaFile { n: capa.positions(), k: capa.symbols(), gains: capa.gains().to_vec() }
    }
}

pub fn parse_instance(text: &str) -> Result<Loaded> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.get("gains").is_some() {
        Ok(Loaded::Capa(serde_json::from_value::<CapaFile>(value)?.into_instance()?))
    } else {
        Ok(Loaded::Recoloring(serde_json::from_value::<InstanceFile>(value)?.into_instance()?))
    }
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Loaded> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn instance_to_json(instance: &Instance<f64>) -> Result<String> {
    Ok(serde_json::to_string_pretty(&InstanceFile::from_instance(instance))?)
}

pub fn capa_to_json(capa: &CapaInstance<f64>) -> Result<String> {
    Ok(serde_json::to_string_pretty(&CapaFile::from_instance(capa))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_defaults() {
        let Loaded::Recoloring(i) = parse_instance(r#"{"n": 4, "k": 2, "colors": [1, 2, null, 1]}"#).unwrap()
        else {
            panic!()
        };
        assert!(i.graph().is_path());
        assert_eq!(i.weights(), &[1.0, 1.0, 0.0, 1.0]);
        assert_eq!(i.coloring().labels(), vec![1, 2, 0, 1]);
    }

    #[test]
    fn general_graph_and_round_trip() {
        let text = r#"{"n": 4, "edges": [[0,1],[1,2],[2,0],[2,3]], "k": 3, "colors": [1, 2, 3, 1],
                      "weights": [1.5, 2, 1, 0.5]}"#;
        let Loaded::Recoloring(i) = parse_instance(text).unwrap() else { panic!() };
        assert_eq!(i.graph().kind(), GraphKind::General);
        let Loaded::Recoloring(j) = parse_instance(&instance_to_json(&i).unwrap()).unwrap() else {
            panic!()
        };
        assert_eq!(i, j);
    }

    #[test]
    fn capa_file() {
        let Loaded::Capa(c) = parse_instance(r#"{"n": 3, "k": 2, "gains": [[3,0,3],[0,5,0]]}"#).unwrap()
        else {
            panic!()
        };
        assert_eq!(c.symbols(), 2);
        assert!(parse_instance(r#"{"n": 3, "k": 1, "gains": [[3,0,3],[0,5,0]]}"#).is_err());
        assert!(parse_instance(r#"{"n": 2, "k": 2, "gains": [[3,0,3],[0,5,0]]}"#).is_err());
    }

    #[test]
    fn malformed_files() {
        assert!(parse_instance(r#"{"n": 3, "k": 2, "colors": [1, 2]}"#).is_err());
        assert!(parse_instance(r#"{"n": 3, "k": 2, "colors": [1, 2, 3]}"#).is_err());
        assert!(parse_instance(r#"{"n": 3, "k": 2, "colors": [1, 2, 1], "kind": "tree",
                                  "edges": [[0,1],[1,2]]}"#).is_err());
        assert!(parse_instance(r#"{"n": 3, "k": 2, "colors": [1, 2, 1], "extra": 1}"#).is_err());
        assert!(parse_instance("not json").is_err());
    }
}
