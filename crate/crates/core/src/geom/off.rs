//! Minimal OFF reader/writer (ASCII). Only vertex and triangle records.

use std::path::Path;

use nalgebra::Vector3;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct OffMesh {
    pub vertices: Vec<Vector3<f64>>,
    pub faces: Vec<Vec<usize>>,
}

pub fn parse_off(text: &str) -> Result<OffMesh> {
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    let bad = |m: &str| Error::Parse(format!("OFF: {m}"));
    match tokens.next() {
        Some("OFF") => {}
        _ => return Err(bad("missing OFF header")),
    }
    let mut next_num = |what: &str| -> Result<f64> {
        tokens
            .next()
            .ok_or_else(|| bad(&format!("unexpected end reading {what}")))?
            .parse::<f64>()
            .map_err(|e| bad(&format!("{what}: {e}")))
    };
    let nv = next_num("vertex count")? as usize;
    let nf = next_num("face count")? as usize;
    let _ne = next_num("edge count")?;
    let mut mesh = OffMesh::default();
    for _ in 0..nv {
        let x = next_num("vertex")?;
        let y = next_num("vertex")?;
        let z = next_num("vertex")?;
        mesh.vertices.push(Vector3::new(x, y, z));
    }
    for _ in 0..nf {
        let k = next_num("face size")? as usize;
        let mut face = Vec::with_capacity(k);
        for _ in 0..k {
            let i = next_num("face index")? as usize;
            if i >= nv {
                return Err(bad(&format!("face index {i} out of range")));
            }
            face.push(i);
        }
        mesh.faces.push(face);
    }
    Ok(mesh)
}

pub fn read_off(path: impl AsRef<Path>) -> Result<OffMesh> {
    parse_off(&std::fs::read_to_string(path)?)
}

pub fn write_off(mesh: &OffMesh) -> String {
    let mut s = format!("OFF\n{} {} 0\n", mesh.vertices.len(), mesh.faces.len());
    for v in &mesh.vertices {
        s.push_str(&format!("{} {} {}\n", v.x, v.y, v.z));
    }
    for f in &mesh.faces {
        s.push_str(&f.len().to_string());
        for i in f {
            s.push_str(&format!(" {i}"));
        }
        s.push('\n');
    }
    s
}
