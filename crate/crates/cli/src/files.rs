//! Matrix and graph file formats.
//!
//! A matrix file is JSON: `{"dim": n, "data": [[re, im], ...]}` with `n²`
//! entries in row-major order.
//!
//! A graph file is plain text. Blank lines and lines starting with `#` are
//! ignored. The first remaining line is `vertices <count>`; every later line
//! is `<origin> <terminus>` with 0-based vertex indices.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use susywalk::{Graph, SquareMatrix, C64};

#[derive(Debug, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(m: &SquareMatrix) -> Self {
        Self {
            dim: m.dim(),
            data: m.row_major().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<SquareMatrix, String> {
        let entries = self.data.iter().map(|&[re, im]| C64::new(re, im)).collect();
        SquareMatrix::new(self.dim, entries).map_err(|e| e.to_string())
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn read_matrix(path: &Path) -> Result<SquareMatrix, String> {
    let text = read(path)?;
    let file: MatrixFile =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    file.to_matrix()
        .map_err(|e| format!("{}: {e}", path.display()))
}

pub fn write_matrix(path: &Path, m: &SquareMatrix) -> Result<(), String> {
    let text =
        serde_json::to_string(&MatrixFile::from_matrix(m)).expect("finite entries serialize");
    fs::write(path, text + "\n").map_err(|e| format!("{}: {e}", path.display()))
}

pub fn parse_graph(text: &str) -> Result<Graph, String> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (no, header) = lines.next().ok_or("missing `vertices <count>` line")?;
    let count = match header.split_whitespace().collect::<Vec<_>>()[..] {
        ["vertices", n] => n
            .parse::<usize>()
            .map_err(|e| format!("line {no}: bad vertex count: {e}"))?,
        _ => return Err(format!("line {no}: expected `vertices <count>`")),
    };
    let mut edges = Vec::new();
    for (no, line) in lines {
        let ends: Vec<&str> = line.split_whitespace().collect();
        let [o, t] = ends[..] else {
            return Err(format!("line {no}: expected `<origin> <terminus>`"));
        };
        let vertex = |s: &str| {
            s.parse::<usize>()
                .map_err(|e| format!("line {no}: bad vertex `{s}`: {e}"))
        };
        edges.push((vertex(o)?, vertex(t)?));
    }
    Graph::new(count, edges).map_err(|e| e.to_string())
}

pub fn read_graph(path: &Path) -> Result<Graph, String> {
    parse_graph(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}
