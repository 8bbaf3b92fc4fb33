//! OBJ and JSON export.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Polytope;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Json,
}

impl FromStr for MeshFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "obj" => Ok(MeshFormat::Obj),
            "json" => Ok(MeshFormat::Json),
            other => Err(Error::Validation(format!("unknown mesh format `{other}`"))),
        }
    }
}

/// Serialized form of a polytope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeDocument {
    pub dim: usize,
    pub affine_dim: usize,
    pub empty: bool,
    pub vertices: Vec<Vec<f64>>,
    pub faces: Vec<Vec<usize>>,
    #[serde(rename = "H")]
    pub h: Vec<Vec<f64>>,
    pub d: Vec<f64>,
    pub volume: f64,
    pub delta: f64,
}

impl PolytopeDocument {
    pub fn from_polytope(poly: &Polytope) -> Self {
        let (h, d) = poly.halfspaces();
        PolytopeDocument {
            dim: poly.dim(),
            affine_dim: poly.affine_dim(),
            empty: poly.is_empty(),
            vertices: (0..poly.vertices().len()).map(|i| poly.vertex(i).as_slice().to_vec()).collect(),
            faces: poly.faces().iter().map(|f| f.vertices.clone()).collect(),
            h: h.row_iter().map(|r| r.iter().copied().collect()).collect(),
            d: d.as_slice().to_vec(),
            volume: poly.volume(),
            delta: poly.delta(),
        }
    }
}

/// Writes the polytope as a triangle mesh (OBJ, 1-based, outward winding) or a JSON document.
///
/// A full-dimensional planar polytope becomes a single counter-clockwise polygon in `z = 0`.
pub fn export_mesh(poly: &Polytope, format: MeshFormat) -> Result<Vec<u8>> {
    match format {
        MeshFormat::Json => Ok(serde_json::to_vec_pretty(&PolytopeDocument::from_polytope(poly))?),
        MeshFormat::Obj if poly.dim() == 2 && poly.affine_dim() == 2 && !poly.is_empty() => {
            let c = poly.centroid();
            let mut order: Vec<usize> = (0..poly.vertices().len()).collect();
            let angle = |i: &usize| {
                let v = poly.vertices()[*i];
                (v.y - c.y).atan2(v.x - c.x)
            };
            order.sort_by(|a, b| angle(a).total_cmp(&angle(b)));
            let mut out = String::new();
            for &i in &order {
                let v = poly.vertices()[i];
                writeln!(out, "v {:?} {:?} 0.0", v.x, v.y).expect("string write");
            }
            let idx: Vec<String> = (1..=order.len()).map(|i| i.to_string()).collect();
            writeln!(out, "f {}", idx.join(" ")).expect("string write");
            Ok(out.into_bytes())
        }
        MeshFormat::Obj => {
            if poly.dim() != 3 || poly.affine_dim() != 3 || poly.is_empty() {
                return Err(Error::DegenerateExport {
                    affine_dim: poly.affine_dim(),
                    dim: poly.dim(),
                });
            }
            let mut out = String::new();
            for v in poly.vertices() {
                writeln!(out, "v {:?} {:?} {:?}", v.x, v.y, v.z).expect("string write");
            }
            for f in poly.faces() {
                let [a, b, c] = [f.vertices[0] + 1, f.vertices[1] + 1, f.vertices[2] + 1];
                writeln!(out, "f {a} {b} {c}").expect("string write");
            }
            Ok(out.into_bytes())
        }
    }
}

pub fn parse_polytope_json(text: &str) -> Result<PolytopeDocument> {
    Ok(serde_json::from_str(text)?)
}
