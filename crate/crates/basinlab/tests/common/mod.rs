//! Mod-2 boundary-matrix homology, used as an independent oracle against
//! the union-find/Euler implementation in the library.

use std::collections::HashMap;

use basinlab::cubetopo::{CubicalComplex, EdgeId};

/// Row-reduce over GF(2); rows are bitsets packed into u64 blocks.
pub fn gf2_rank(mut rows: Vec<Vec<u64>>, ncols: usize) -> usize {
    let mut rank = 0;
    for col in 0..ncols {
        if rank == rows.len() {
            break;
        }
        let blk = col / 64;
        let bit = 1u64 << (col % 64);
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][blk] & bit != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let lead = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[blk] & bit != 0 {
                for (a, b) in row.iter_mut().zip(&lead) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// (b0, b1) from boundary ranks alone: b0 = V - rank d1 and
/// b1 = dim ker d1 - rank d2, with no Euler-characteristic shortcut.
/// Asserts rank d2 = F along the way, which pins b2 = 0: kept faces of a
/// surface with boundary always have independent boundaries.
pub fn betti_gf2(c: &CubicalComplex) -> (i64, i64) {
    let w = c.vertex_columns();
    let vid: HashMap<(u32, u32), usize> =
        c.vertices.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let eid: HashMap<EdgeId, usize> =
        c.edges.iter().enumerate().map(|(k, &e)| (e, k)).collect();
    let blocks = |n: usize| n.div_ceil(64);

    let mut d1 = Vec::with_capacity(c.edges.len());
    for e in &c.edges {
        let mut row = vec![0u64; blocks(c.vertices.len())];
        let ends = if e.horizontal {
            [(e.i, e.j), ((e.i + 1) % w, e.j)]
        } else {
            [(e.i, e.j), (e.i, e.j + 1)]
        };
        // A wrap-around self-loop XORs its single vertex twice: zero row,
        // zero boundary, exactly as mod-2 homology wants it.
        for v in ends {
            let k = vid[&v];
            row[k / 64] ^= 1u64 << (k % 64);
        }
        d1.push(row);
    }
    let rank1 = gf2_rank(d1, c.vertices.len());

    let mut d2 = Vec::with_capacity(c.faces.len());
    for &(i, j) in &c.faces {
        let i1 = (i + 1) % w;
        let mut row = vec![0u64; blocks(c.edges.len())];
        for e in [
            EdgeId { horizontal: true, i, j },
            EdgeId { horizontal: true, i, j: j + 1 },
            EdgeId { horizontal: false, i, j },
            EdgeId { horizontal: false, i: i1, j },
        ] {
            let k = eid[&e];
            row[k / 64] ^= 1u64 << (k % 64);
        }
        d2.push(row);
    }
    let rank2 = gf2_rank(d2, c.edges.len());
    assert_eq!(rank2, c.faces.len(), "kept faces must have independent boundaries");

    let b0 = (c.vertices.len() - rank1) as i64;
    let b1 = (c.edges.len() - rank1 - rank2) as i64;
    (b0, b1)
}
