//! Level-set extraction on a (B, T) scan slice by marching squares.
//!
//! Each grid cell is classified by which corners exceed the level; the 16
//! cases yield zero, one, or two segments whose endpoints are linear
//! interpolations along cell edges. The two ambiguous saddle cases are
//! disambiguated by the cell-center average. Segments are stitched into
//! polylines keyed by shared edge identity: open chains start at
//! degree-one edges (grid boundary), remaining segments form closed loops,
//! which repeat their first point at the end. Cells touching a NaN corner
//! are skipped, so failed scan points punch holes instead of inventing
//! geometry.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Result, SswError};
use crate::scan::ScanGrid;

/// Contour vertices as (B, T) pairs.
pub type Polyline = Vec<(f64, f64)>;

/// Identity of a cell edge in the node grid: H(i, j) joins nodes (i, j) and
/// (i+1, j) along B; V(i, j) joins (i, j) and (i, j+1) along T.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum EdgeId {
    H(usize, usize),
    V(usize, usize),
}

/// Marching-squares contours of `grid` at `level`.
///
/// The grid must be a single-γ slice with at least 2×2 points in (B, T).
pub fn detection_boundary(grid: &ScanGrid, level: f64) -> Result<Vec<Polyline>> {
    if grid.axes.gamma.len() != 1 {
        return Err(SswError::InvalidAxes(format!(
            "contour extraction needs a single-gamma slice, found {} gamma values",
            grid.axes.gamma.len()
        )));
    }
    if !level.is_finite() {
        return Err(SswError::InvalidConfig(format!(
            "contour level {level} is not finite"
        )));
    }
    let (b_axis, t_axis) = (&grid.axes.b, &grid.axes.t);
    let (nb, nt) = (b_axis.len(), t_axis.len());
    if nb < 2 || nt < 2 {
        return Err(SswError::EmptyGrid);
    }

    let v = |i: usize, j: usize| grid.value_at(i, j, 0);

    // Interpolated crossing point of each cut edge, keyed by edge identity.
    let mut points: BTreeMap<EdgeId, (f64, f64)> = BTreeMap::new();
    // Undirected segment adjacency between cut edges.
    let mut adjacency: BTreeMap<EdgeId, Vec<EdgeId>> = BTreeMap::new();

    let cut = |edge: EdgeId,
                   points: &mut BTreeMap<EdgeId, (f64, f64)>|
     -> (f64, f64) {
        *points.entry(edge).or_insert_with(|| match edge {
            EdgeId::H(i, j) => {
                let (va, vb) = (v(i, j), v(i + 1, j));
                let t = (level - va) / (vb - va);
                (b_axis[i] + t * (b_axis[i + 1] - b_axis[i]), t_axis[j])
            }
            EdgeId::V(i, j) => {
                let (va, vb) = (v(i, j), v(i, j + 1));
                let t = (level - va) / (vb - va);
                (b_axis[i], t_axis[j] + t * (t_axis[j + 1] - t_axis[j]))
            }
        })
    };

    for i in 0..nb - 1 {
        for j in 0..nt - 1 {
            let corners = [v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)];
            if corners.iter().any(|c| c.is_nan()) {
                continue;
            }
            // Bits: 1 = bottom-left, 2 = bottom-right, 4 = top-right,
            // 8 = top-left ("bottom" is the lower T index).
            let mut case = 0usize;
            for (bit, &c) in corners.iter().enumerate() {
                if c > level {
                    case |= 1 << bit;
                }
            }
            let bottom = EdgeId::H(i, j);
            let top = EdgeId::H(i, j + 1);
            let left = EdgeId::V(i, j);
            let right = EdgeId::V(i + 1, j);

            let segments: &[(EdgeId, EdgeId)] = match case {
                0 | 15 => &[],
                1 => &[(left, bottom)],
                2 => &[(bottom, right)],
                3 => &[(left, right)],
                4 => &[(top, right)],
                5 => {
                    // Saddle: the center average decides which diagonal of
                    // the above-level corners is connected.
                    let center = corners.iter().sum::<f64>() / 4.0;
                    if center > level {
                        &[(bottom, right), (top, left)]
                    } else {
                        &[(left, bottom), (right, top)]
                    }
                }
                6 => &[(bottom, top)],
                7 => &[(left, top)],
                8 => &[(left, top)],
                9 => &[(bottom, top)],
                10 => {
                    let center = corners.iter().sum::<f64>() / 4.0;
                    if center > level {
                        &[(left, bottom), (top, right)]
                    } else {
                        &[(bottom, right), (left, top)]
                    }
                }
                11 => &[(top, right)],
                12 => &[(left, right)],
                13 => &[(bottom, right)],
                14 => &[(left, bottom)],
                _ => unreachable!(),
            };
            for &(a, b) in segments {
                cut(a, &mut points);
                cut(b, &mut points);
                adjacency.entry(a).or_default().push(b);
                adjacency.entry(b).or_default().push(a);
            }
        }
    }

    // Stitch segments into chains. Open chains first (boundary-terminated),
    // then whatever remains must be closed loops.
    let mut used: BTreeSet<(EdgeId, EdgeId)> = BTreeSet::new();
    let segment_key = |a: EdgeId, b: EdgeId| if a <= b { (a, b) } else { (b, a) };
    let mut polylines = Vec::new();

    let walk = |start: EdgeId,
                    used: &mut BTreeSet<(EdgeId, EdgeId)>|
     -> Polyline {
        let mut path = vec![points[&start]];
        let mut current = start;
        loop {
            let next = adjacency[&current]
                .iter()
                .copied()
                .find(|&n| !used.contains(&segment_key(current, n)));
            match next {
                Some(n) => {
                    used.insert(segment_key(current, n));
                    path.push(points[&n]);
                    current = n;
                }
                None => return path,
            }
        }
    };

    let endpoints: Vec<EdgeId> = adjacency
        .iter()
        .filter(|(_, n)| n.len() == 1)
        .map(|(&e, _)| e)
        .collect();
    for start in endpoints {
        if adjacency[&start]
            .iter()
            .all(|&n| used.contains(&segment_key(start, n)))
        {
            continue;
        }
        polylines.push(walk(start, &mut used));
    }
    let loop_starts: Vec<EdgeId> = adjacency.keys().copied().collect();
    for start in loop_starts {
        if adjacency[&start]
            .iter()
            .all(|&n| used.contains(&segment_key(start, n)))
        {
            continue;
        }
        let mut path = walk(start, &mut used);
        path.push(points[&start]);
        polylines.push(path);
    }
    Ok(polylines)
}
