//! Small geometric utilities: exact planar convex hulls, LP-based extreme
//! point filtering in higher dimension, polygon measures, and a uniform
//! cell grid for nearest-neighbour queries on patches.

use crate::exact::FieldElement;
use crate::lp::{simplex_max, LpOutcome};

/// Orientation sign of the triangle (a, b, c) via an exact cross product.
fn orient(a: &[FieldElement], b: &[FieldElement], c: &[FieldElement]) -> i8 {
    let abx = b[0].sub(&a[0]);
    let aby = b[1].sub(&a[1]);
    let acx = c[0].sub(&a[0]);
    let acy = c[1].sub(&a[1]);
    let cross = abx.mul(&acy).sub(&aby.mul(&acx));
    cross.sign().expect("hull coordinates must be real")
}

fn cmp_xy(a: &[FieldElement], b: &[FieldElement]) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    for (x, y) in a.iter().zip(b) {
        if x == y {
            continue;
        }
        let s = x.sub(y).sign().expect("real coordinate");
        return if s < 0 { Ordering::Less } else { Ordering::Greater };
    }
    Ordering::Equal
}

/// Exact 2D convex hull (monotone chain), strictly convex: collinear
/// boundary points are dropped. Returns indices into `pts` in
/// counterclockwise order.
pub fn convex_hull_2d_exact(pts: &[Vec<FieldElement>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&i, &j| cmp_xy(&pts[i], &pts[j]));
    order.dedup_by(|&mut i, &mut j| cmp_xy(&pts[i], &pts[j]) == std::cmp::Ordering::Equal);
    let n = order.len();
    if n <= 2 {
        return order;
    }
    let mut hull: Vec<usize> = vec![];
    // lower then upper
    for &idx in order.iter() {
        while hull.len() >= 2
            && orient(&pts[hull[hull.len() - 2]], &pts[hull[hull.len() - 1]], &pts[idx]) <= 0
        {
            hull.pop();
        }
        hull.push(idx);
    }
    let lower_len = hull.len() + 1;
    for &idx in order.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && orient(&pts[hull[hull.len() - 2]], &pts[hull[hull.len() - 1]], &pts[idx]) <= 0
        {
            hull.pop();
        }
        hull.push(idx);
    }
    hull.pop();
    hull
}

/// Indices of the extreme points of a float point set in any dimension,
/// decided by a separating-direction LP per candidate. Near-degenerate
/// candidates (gap below `tol`) are treated as non-extreme.
pub fn extreme_points_f64(pts: &[Vec<f64>], tol: f64) -> Vec<usize> {
    let n = pts.len();
    if n == 0 {
        return vec![];
    }
    let dim = pts[0].len();
    let mut out = vec![];
    'cand: for i in 0..n {
        // skip exact duplicates that appeared earlier
        for j in 0..i {
            if pts[i]
                .iter()
                .zip(&pts[j])
                .all(|(a, b)| (a - b).abs() < 1e-14)
            {
                continue 'cand;
            }
        }
        // max delta st c.(p_i - q_j) >= delta for all j, |c_s| <= 1
        // vars: c+ (dim), c- (dim), delta+ , delta-
        let nv = 2 * dim + 2;
        let mut rows = vec![];
        let mut rhs = vec![];
        for j in 0..n {
            if j == i {
                continue;
            }
            let mut row = vec![0.0; nv];
            for s in 0..dim {
                let d = pts[i][s] - pts[j][s];
                row[s] = -d;
                row[dim + s] = d;
            }
            row[2 * dim] = 1.0;
            row[2 * dim + 1] = -1.0;
            rows.push(row);
            rhs.push(0.0);
        }
        for s in 0..2 * dim {
            let mut row = vec![0.0; nv];
            row[s] = 1.0;
            rows.push(row);
            rhs.push(1.0);
        }
        let mut c = vec![0.0; nv];
        c[2 * dim] = 1.0;
        c[2 * dim + 1] = -1.0;
        match simplex_max(&rows, &rhs, &c) {
            LpOutcome::Optimal { objective, .. } if objective > tol => out.push(i),
            _ => {}
        }
    }
    out
}

/// Shoelace area of a counterclockwise polygon given as float vertices.
pub fn polygon_area(vertices: &[Vec<f64>]) -> f64 {
    let n = vertices.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        let j = (i + 1) % n;
        acc += vertices[i][0] * vertices[j][1] - vertices[j][0] * vertices[i][1];
    }
    acc.abs() / 2.0
}

/// Directed Hausdorff-style vertex set distance: max over a of min over b.
pub fn vertex_set_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let one_way = |xs: &[Vec<f64>], ys: &[Vec<f64>]| -> f64 {
        xs.iter()
            .map(|x| {
                ys.iter()
                    .map(|y| {
                        x.iter()
                            .zip(y)
                            .map(|(p, q)| (p - q) * (p - q))
                            .sum::<f64>()
                            .sqrt()
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Uniform cell grid over n-dimensional float points for neighbourhood
/// queries.
pub struct CellGrid {
    cell: f64,
    map: std::collections::HashMap<Vec<i64>, Vec<usize>>,
    pts: Vec<Vec<f64>>,
}

impl CellGrid {
    pub fn build(pts: Vec<Vec<f64>>, cell: f64) -> Self {
        let mut map: std::collections::HashMap<Vec<i64>, Vec<usize>> = Default::default();
        for (i, p) in pts.iter().enumerate() {
            map.entry(Self::key(p, cell)).or_default().push(i);
        }
        CellGrid { cell, map, pts }
    }

    fn key(p: &[f64], cell: f64) -> Vec<i64> {
        p.iter().map(|&x| (x / cell).floor() as i64).collect()
    }

    /// Index and distance of the nearest stored point, scanning outward in
    /// rings of cells until the answer is certain.
    pub fn nearest(&self, p: &[f64]) -> Option<(usize, f64)> {
        if self.pts.is_empty() {
            return None;
        }
        let dim = p.len();
        let base = Self::key(p, self.cell);
        let mut best: Option<(usize, f64)> = None;
        let mut ring = 0i64;
        loop {
            let mut found_any = false;
            // enumerate cells with Chebyshev distance == ring
            let mut idx = vec![-ring; dim];
            'cells: loop {
                if idx.iter().any(|&v| v.abs() == ring) || ring == 0 {
                    let key: Vec<i64> = base.iter().zip(&idx).map(|(b, o)| b + o).collect();
                    if let Some(list) = self.map.get(&key) {
                        found_any = true;
                        for &i in list {
                            let d: f64 = self.pts[i]
                                .iter()
                                .zip(p)
                                .map(|(a, b)| (a - b) * (a - b))
                                .sum::<f64>()
                                .sqrt();
                            if best.map_or(true, |(_, bd)| d < bd) {
                                best = Some((i, d));
                            }
                        }
                    }
                }
                for s in (0..dim).rev() {
                    idx[s] += 1;
                    if idx[s] <= ring {
                        continue 'cells;
                    }
                    idx[s] = -ring;
                }
                break;
            }
            // once a candidate exists, one more ring guarantees correctness
            if let Some((_, bd)) = best {
                if bd <= (ring as f64) * self.cell {
                    return best;
                }
            }
            ring += 1;
            if !found_any && ring as f64 * self.cell > 1e6 {
                return best;
            }
        }
    }

    /// All stored indices within `radius` of p.
    pub fn within(&self, p: &[f64], radius: f64) -> Vec<usize> {
        let dim = p.len();
        let r_cells = (radius / self.cell).ceil() as i64 + 1;
        let base = Self::key(p, self.cell);
        let mut out = vec![];
        let mut idx = vec![-r_cells; dim];
        'cells: loop {
            let key: Vec<i64> = base.iter().zip(&idx).map(|(b, o)| b + o).collect();
            if let Some(list) = self.map.get(&key) {
                for &i in list {
                    let d: f64 = self.pts[i]
                        .iter()
                        .zip(p)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    if d <= radius {
                        out.push(i);
                    }
                }
            }
            for s in (0..dim).rev() {
                idx[s] += 1;
                if idx[s] <= r_cells {
                    continue 'cells;
                }
                idx[s] = -r_cells;
            }
            break;
        }
        out
    }
}
