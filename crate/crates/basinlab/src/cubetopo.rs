//! Cubical complexes over labeled grids and their Betti profiles.
//!
//! A kept cell contributes its closed unit square: the face, its four edges,
//! its four corners. Under theta-periodicity, column nx is identified with
//! column 0. Betti numbers come from exact integer arithmetic: b0 by
//! union-find on the 1-skeleton, b1 = b0 - chi via the Euler characteristic.
//! That shortcut is valid because none of these complexes can contain a
//! closed surface (the height axis is never periodic), so b2 = 0; the test
//! suite cross-checks against boundary-matrix ranks over GF(2).

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::basin::BasinGrid;
use crate::error::{Error, Result};

/// Edge of the grid graph. A horizontal edge (i, j) joins vertex (i, j) to
/// ((i + 1) mod W, j); a vertical edge joins (i, j) to (i, j + 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId {
    pub horizontal: bool,
    pub i: u32,
    pub j: u32,
}

#[derive(Clone, Debug)]
pub struct CubicalComplex {
    pub nx: usize,
    pub ny: usize,
    pub periodic: bool,
    /// Kept 2-cells (i, j), sorted.
    pub faces: Vec<(u32, u32)>,
    /// All edges of kept faces, deduplicated.
    pub edges: Vec<EdgeId>,
    /// All corners of kept faces, deduplicated.
    pub vertices: Vec<(u32, u32)>,
}

impl CubicalComplex {
    /// Number of distinct vertex columns: nx when the angle wraps, nx + 1
    /// otherwise.
    pub fn vertex_columns(&self) -> u32 {
        if self.periodic {
            self.nx as u32
        } else {
            self.nx as u32 + 1
        }
    }
}

/// Assemble the closed complex over the kept cells of an nx x ny grid.
/// `kept` is row-major (index j * nx + i). Errors if nothing is kept.
pub fn build_complex(nx: usize, ny: usize, periodic: bool, kept: &[bool]) -> Result<CubicalComplex> {
    if kept.len() != nx * ny {
        return Err(Error::BadConfig(format!(
            "keep mask has {} entries for a {nx}x{ny} grid",
            kept.len()
        )));
    }
    let w = if periodic { nx as u32 } else { nx as u32 + 1 };
    let mut faces = Vec::new();
    let mut edges = BTreeSet::new();
    let mut vertices = BTreeSet::new();
    for j in 0..ny as u32 {
        for i in 0..nx as u32 {
            if !kept[j as usize * nx + i as usize] {
                continue;
            }
            faces.push((i, j));
            let i1 = if periodic { (i + 1) % w } else { i + 1 };
            vertices.insert((i, j));
            vertices.insert((i1, j));
            vertices.insert((i, j + 1));
            vertices.insert((i1, j + 1));
            edges.insert(EdgeId { horizontal: true, i, j });
            edges.insert(EdgeId { horizontal: true, i, j: j + 1 });
            edges.insert(EdgeId { horizontal: false, i, j });
            edges.insert(EdgeId { horizontal: false, i: i1, j });
        }
    }
    if faces.is_empty() {
        return Err(Error::EmptyComplex);
    }
    Ok(CubicalComplex {
        nx,
        ny,
        periodic,
        faces,
        edges: edges.into_iter().collect(),
        vertices: vertices.into_iter().collect(),
    })
}

/// Complex of the CONVERGED cells of a basin.
pub fn from_basin(basin: &BasinGrid) -> Result<CubicalComplex> {
    build_complex(
        basin.grid.nx,
        basin.grid.ny,
        basin.chart.periodic(),
        &basin.converged_mask(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiProfile {
    pub b0: i64,
    pub b1: i64,
    pub chi: i64,
    #[serde(rename = "V")]
    pub v: i64,
    #[serde(rename = "E")]
    pub e: i64,
    #[serde(rename = "F")]
    pub f: i64,
}

struct Dsu {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut a: u32) -> u32 {
        while self.parent[a as usize] != a {
            let grand = self.parent[self.parent[a as usize] as usize];
            self.parent[a as usize] = grand;
            a = grand;
        }
        a
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
    }
}

/// Betti profile of a built complex. b0 counts connected components of the
/// 1-skeleton (vertices united through edges; corner-touching faces are one
/// component, as their closures share a vertex). b1 follows from chi.
pub fn betti(c: &CubicalComplex) -> BettiProfile {
    let v = c.vertices.len() as i64;
    let e = c.edges.len() as i64;
    let f = c.faces.len() as i64;
    let chi = v - e + f;

    // Dense vertex index over the (column, row) lattice.
    let w = c.vertex_columns();
    let vid = |iv: u32, jv: u32| -> u32 { jv * w + iv };
    let mut dsu = Dsu::new((w * (c.ny as u32 + 1)) as usize);
    for edge in &c.edges {
        let a = vid(edge.i, edge.j);
        let b = if edge.horizontal {
            vid((edge.i + 1) % w, edge.j)
        } else {
            vid(edge.i, edge.j + 1)
        };
        dsu.union(a, b);
    }
    let mut roots = BTreeSet::new();
    for &(iv, jv) in &c.vertices {
        roots.insert(dsu.find(vid(iv, jv)));
    }
    let b0 = roots.len() as i64;
    BettiProfile { b0, b1: b0 - chi, chi, v, e, f }
}

/// Outcome of comparing two Betti profiles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "UPPERCASE")]
pub enum Verdict {
    Consistent,
    Mismatch { differs: Vec<String> },
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Consistent => f.write_str("CONSISTENT"),
            Verdict::Mismatch { differs } => write!(f, "MISMATCH{{{}}}", differs.join(",")),
        }
    }
}

/// CONSISTENT iff b0 and b1 agree; otherwise lists which differ. Agreement
/// is necessary, not sufficient, for the two complexes to be homotopy
/// equivalent.
pub fn compare_profiles(basin: &BettiProfile, tubular: &BettiProfile) -> Verdict {
    let mut differs = Vec::new();
    if basin.b0 != tubular.b0 {
        differs.push("b0".to_string());
    }
    if basin.b1 != tubular.b1 {
        differs.push("b1".to_string());
    }
    if differs.is_empty() {
        Verdict::Consistent
    } else {
        Verdict::Mismatch { differs }
    }
}
