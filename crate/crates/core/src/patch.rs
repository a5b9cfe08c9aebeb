//! Finite patch enumeration: all selected lattice points whose physical
//! image lies in the closed ball of a given radius.
//!
//! The production path is a depth-first branch-and-bound over the integer
//! coordinates with per-node pruning: a squared-norm prefix bound, interval
//! bounds on the physical coordinates, and an LP relaxation of the joint
//! system (strip slabs for every coordinate, ball box constraints, unfixed
//! coordinates relaxed to reals). Leaves are accepted by exact arithmetic
//! only: the ball test compares field elements setting and the strip test
//! falls back to an exact LP near the boundary.
//!
//! `naive_patch` is the independent test oracle: an exhaustive scan of the
//! candidate box intersected with the superspace ball, with no LP pruning.

use crate::error::{Error, Result};
use crate::exact::FieldElement;
use crate::superspace::SuperspaceDecomposition;
use crate::window::{circumball, coordinate_support, strip_contains, WindowSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

/// Margin below which an LP-relaxation verdict counts as infeasible; keeps
/// float error out of prune decisions (leaves are verified exactly anyway).
const PRUNE_SLACK: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct PatchPoint {
    pub m: Vec<i64>,
    pub phys: Vec<f64>,
    pub internal: Vec<f64>,
    pub component: Vec<i64>,
    pub margin: f64,
}

#[derive(Clone, Debug, Default)]
pub struct GenStats {
    pub nodes_visited: u64,
    pub nodes_pruned: u64,
    pub leaves_tested: u64,
    pub wall_ms: u128,
}

#[derive(Clone, Debug)]
pub struct ModelSetPatch {
    pub k: usize,
    pub physical_dim: usize,
    pub internal_dim: usize,
    pub radius: BigRational,
    pub shift_seed: u64,
    pub epsilon: f64,
    /// Selected points, lexicographically sorted by m, one per physical
    /// position (duplicates modulo the relation lattice keep the smallest m).
    pub points: Vec<PatchPoint>,
    pub stats: GenStats,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PatchOptions {
    pub node_limit: Option<u64>,
    pub jobs: usize,
}

pub const DEFAULT_NODE_LIMIT: u64 = 50_000_000;
pub const NAIVE_SCAN_CAP: u128 = 10_000_000;

/// Shared geometry for the enumeration paths.
struct Enumerator<'a> {
    d: &'a SuperspaceDecomposition,
    w: &'a WindowSpec,
    radius_sq: BigRational,
    radius_sq_f64: f64,
    /// per-coordinate integer bounds
    lo: Vec<i64>,
    hi: Vec<i64>,
    /// squared norm cap in Z^k
    ball_sq: f64,
    /// orthonormal E-basis rows (n x k)
    e_rows: Vec<Vec<f64>>,
    /// half-width of the physical ball in normalized units, R/kappa
    rn: f64,
    gram_f64: Vec<Vec<f64>>,
    vectors_f64: Vec<Vec<f64>>,
    star_cols: Vec<Vec<f64>>,
    /// integer coset functional with common denominator
    coset_num: Vec<Vec<i64>>,
    coset_den: i64,
    window_center: Vec<f64>,
    window_radius: f64,
}

impl<'a> Enumerator<'a> {
    fn new(d: &'a SuperspaceDecomposition, w: &'a WindowSpec, radius: &BigRational) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::BadConfig("radius must be positive".into()));
        }
        let radius_sq = radius * radius;
        let radius_f64 = crate::exact::interval::rational_to_f64(radius);
        let kappa = d.kappa_sq.to_f64().sqrt();
        let rn = radius_f64 / kappa;

        let support = coordinate_support(w, d);
        let (center, wrad) = circumball(w, d);
        let mut lo = Vec::with_capacity(d.k);
        let mut hi = Vec::with_capacity(d.k);
        for i in 0..d.k {
            let amp = rn * d.pi_f64[i][i].max(0.0).sqrt() + 1e-9;
            lo.push((-amp + support[i].0).ceil() as i64);
            hi.push((amp + support[i].1).floor() as i64);
        }
        let ball_sq = rn * rn + wrad * wrad + 1e-6;

        let gram_f64 = (0..d.k)
            .map(|i| (0..d.k).map(|j| d.gram[(i, j)].to_f64()).collect())
            .collect();
        let star_cols = (0..d.k)
            .map(|i| {
                let mut unit = vec![0i64; d.k];
                unit[i] = 1;
                d.star_map(&unit).0
            })
            .collect();

        // coset functional over a common denominator for fast exact indexing
        let rows = d.coset_functional.rows;
        let mut den = BigInt::from(1);
        for r in 0..rows {
            for j in 0..d.k {
                den = num_integer::Integer::lcm(&den, d.coset_functional[(r, j)].denom());
            }
        }
        let coset_den = den.to_i64().ok_or_else(|| {
            Error::InvariantViolation("coset denominator overflows i64".into())
        })?;
        let coset_num = (0..rows)
            .map(|r| {
                (0..d.k)
                    .map(|j| {
                        let q = &d.coset_functional[(r, j)];
                        (q.numer() * (&den / q.denom()))
                            .to_i64()
                            .ok_or_else(|| {
                                Error::InvariantViolation("coset numerator overflows i64".into())
                            })
                    })
                    .collect::<Result<Vec<i64>>>()
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(Enumerator {
            d,
            w,
            radius_sq,
            radius_sq_f64: radius_f64 * radius_f64,
            lo,
            hi,
            ball_sq,
            e_rows: d.e_basis.rows_f64.clone(),
            rn,
            gram_f64,
            vectors_f64: d.cluster.vectors_f64(),
            star_cols,
            coset_num,
            coset_den,
            window_center: center,
            window_radius: wrad,
        })
    }

    fn coset_index_fast(&self, m: &[i64]) -> Vec<i64> {
        self.coset_num
            .iter()
            .map(|row| {
                let s: i128 = row
                    .iter()
                    .zip(m)
                    .map(|(&c, &v)| c as i128 * v as i128)
                    .sum();
                debug_assert_eq!(s % self.coset_den as i128, 0);
                (s / self.coset_den as i128) as i64
            })
            .collect()
    }

    /// Exact closed-ball test with a float fast path.
    fn in_ball_exact(&self, m: &[i64]) -> bool {
        let mut n2 = 0.0;
        for i in 0..self.d.k {
            if m[i] == 0 {
                continue;
            }
            for j in 0..self.d.k {
                if m[j] != 0 {
                    n2 += (m[i] * m[j]) as f64 * self.gram_f64[i][j];
                }
            }
        }
        if (n2 - self.radius_sq_f64).abs() > 1e-6 {
            return n2 <= self.radius_sq_f64;
        }
        let exact = self.d.physical_norm_sq_exact(m);
        let diff = exact.sub(&FieldElement::from_rational(self.radius_sq.clone()));
        diff.sign().expect("norm is real") <= 0
    }

    /// Quick window rejection: outside the circumscribed ball of W.
    fn near_window(&self, m: &[i64]) -> bool {
        let k = self.d.k;
        let mut d2 = 0.0;
        for i in 0..k {
            let mut acc = -self.window_center[i];
            for j in 0..k {
                if m[j] != 0 {
                    acc += self.d.pi_perp_f64[i][j] * m[j] as f64;
                }
            }
            d2 += acc * acc;
            if d2 > (self.window_radius + 1e-9) * (self.window_radius + 1e-9) {
                return false;
            }
        }
        true
    }

    /// Test a complete assignment; Ok(Some(point)) when selected.
    fn test_leaf(&self, m: &[i64]) -> Result<Option<PatchPoint>> {
        if !self.near_window(m) {
            return Ok(None);
        }
        if !self.in_ball_exact(m) {
            return Ok(None);
        }
        let strip = strip_contains(m, self.w, self.d)?;
        if !strip.selected {
            return Ok(None);
        }
        let phys = (0..self.d.dims.physical)
            .map(|c| {
                m.iter()
                    .enumerate()
                    .map(|(i, &v)| v as f64 * self.vectors_f64[i][c])
                    .sum()
            })
            .collect();
        let internal = (0..self.d.dims.dense)
            .map(|t| {
                m.iter()
                    .enumerate()
                    .map(|(i, &v)| v as f64 * self.star_cols[i][t])
                    .sum()
            })
            .collect();
        Ok(Some(PatchPoint {
            m: m.to_vec(),
            phys,
            internal,
            component: self.coset_index_fast(m),
            margin: strip.margin,
        }))
    }

    /// LP relaxation of the full system at a partial assignment: strip
    /// slabs for every coordinate, ball box rows, unfixed coordinates as
    /// bounded reals. Returns false when provably (with slack) infeasible.
    fn relaxation_feasible(&self, prefix: &[i64]) -> bool {
        let k = self.d.k;
        let dep = prefix.len();
        let n_unfixed = k - dep;
        let nb = self.e_rows.len();
        // free variables: alpha (nb); nonneg shifted: y_j for unfixed
        // columns: [y_0.. y_{n_unfixed-1}, alpha+ (nb), alpha- (nb), rho+, rho-]
        let nv = n_unfixed + 2 * nb + 2;
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(2 * k + 2 * nb + n_unfixed);
        let mut rhs: Vec<f64> = Vec::with_capacity(rows.capacity());
        let mut push = |row: Vec<f64>, b: f64, rows: &mut Vec<Vec<f64>>, rhs: &mut Vec<f64>| {
            rows.push(row);
            rhs.push(b);
        };
        // slab constraints: t_i <= c_i - rho ; -t_i <= 1 - c_i - rho
        // with c_i = m_i - v_i, m_i = prefix or lo_j + y_j
        for i in 0..k {
            let mut row_pos = vec![0.0; nv];
            let mut row_neg = vec![0.0; nv];
            for (s, er) in self.e_rows.iter().enumerate() {
                row_pos[n_unfixed + s] = er[i];
                row_pos[n_unfixed + nb + s] = -er[i];
                row_neg[n_unfixed + s] = -er[i];
                row_neg[n_unfixed + nb + s] = er[i];
            }
            row_pos[nv - 2] = 1.0;
            row_pos[nv - 1] = -1.0;
            row_neg[nv - 2] = 1.0;
            row_neg[nv - 1] = -1.0;
            let base;
            if i < dep {
                base = prefix[i] as f64 - self.w.shift_f64[i];
            } else {
                let u = i - dep;
                row_pos[u] -= 1.0;
                row_neg[u] += 1.0;
                base = self.lo[i] as f64 - self.w.shift_f64[i];
            }
            push(row_pos, base, &mut rows, &mut rhs);
            push(row_neg, 1.0 - base, &mut rows, &mut rhs);
        }
        // ball box rows: |sum_j B[s][j] m_j| <= rn
        for (s, er) in self.e_rows.iter().enumerate() {
            let mut row_pos = vec![0.0; nv];
            let mut row_neg = vec![0.0; nv];
            let mut base = 0.0;
            for i in 0..k {
                if i < dep {
                    base += er[i] * prefix[i] as f64;
                } else {
                    let u = i - dep;
                    row_pos[u] += er[i];
                    row_neg[u] -= er[i];
                }
            }
            if dep < k {
                for i in dep..k {
                    base += 0.0 * er[i];
                }
            }
            let shift: f64 = (dep..k).map(|i| er[i] * self.lo[i] as f64).sum();
            push(row_pos.clone(), self.rn - base - shift, &mut rows, &mut rhs);
            push(row_neg, self.rn + base + shift, &mut rows, &mut rhs);
            let _ = s;
        }
        // upper bounds on the shifted unfixed coordinates
        for u in 0..n_unfixed {
            let i = dep + u;
            let mut row = vec![0.0; nv];
            row[u] = 1.0;
            push(row, (self.hi[i] - self.lo[i]) as f64, &mut rows, &mut rhs);
        }
        match crate::lp::maximin_slack(&rows, &rhs) {
            Some((rho, _)) => rho >= -PRUNE_SLACK,
            None => true, // never prune on solver trouble
        }
    }
}

/// Values of a level ordered by increasing magnitude.
fn level_values(lo: i64, hi: i64) -> Vec<i64> {
    let mut vals: Vec<i64> = (lo..=hi).collect();
    vals.sort_by_key(|&v| (v.abs(), -v));
    vals
}

/// Exhaustive oracle: scan the coordinate box clipped by the superspace
/// ball and apply the strip test to every candidate.
pub fn naive_patch(
    d: &SuperspaceDecomposition,
    w: &WindowSpec,
    radius: &BigRational,
) -> Result<ModelSetPatch> {
    let start = std::time::Instant::now();
    let en = Enumerator::new(d, w, radius)?;
    // candidate estimate: coordinate box clipped to the ball cannot exceed
    // the box product; refuse absurd scans early
    let mut box_estimate: u128 = 1;
    for i in 0..d.k {
        let span = (en.hi[i] - en.lo[i] + 1).max(0) as u128;
        box_estimate = box_estimate.saturating_mul(span);
    }
    let ball_estimate = ball_lattice_estimate(d.k, en.ball_sq.sqrt());
    if box_estimate.min(ball_estimate) > NAIVE_SCAN_CAP {
        return Err(Error::ScanTooLarge {
            estimate: box_estimate.min(ball_estimate),
            cap: NAIVE_SCAN_CAP,
        });
    }

    let mut points = vec![];
    let mut m = vec![0i64; d.k];
    let mut visited: u128 = 0;
    scan_rec(&en, &mut m, 0, 0.0, &mut visited, &mut points)?;
    let stats = GenStats {
        nodes_visited: visited as u64,
        nodes_pruned: 0,
        leaves_tested: visited as u64,
        wall_ms: start.elapsed().as_millis(),
    };
    finalize(d, w, radius, points, stats)
}

fn scan_rec(
    en: &Enumerator,
    m: &mut Vec<i64>,
    dep: usize,
    sq: f64,
    visited: &mut u128,
    out: &mut Vec<PatchPoint>,
) -> Result<()> {
    if dep == en.d.k {
        *visited += 1;
        if *visited > NAIVE_SCAN_CAP {
            return Err(Error::ScanTooLarge {
                estimate: *visited,
                cap: NAIVE_SCAN_CAP,
            });
        }
        if let Some(p) = en.test_leaf(m)? {
            out.push(p);
        }
        return Ok(());
    }
    for v in en.lo[dep]..=en.hi[dep] {
        let nsq = sq + (v * v) as f64;
        if nsq > en.ball_sq {
            continue;
        }
        m[dep] = v;
        scan_rec(en, m, dep + 1, nsq, visited, out)?;
    }
    m[dep] = 0;
    Ok(())
}

/// Rough count of integer points in a k-ball, for the scan precondition.
fn ball_lattice_estimate(k: usize, r: f64) -> u128 {
    // vol of unit k-ball via Gamma(k/2+1)
    fn gamma_half(two_s: usize) -> f64 {
        // Gamma(two_s / 2), two_s >= 1
        if two_s % 2 == 0 {
            let mut acc = 1.0;
            for i in 1..(two_s / 2) {
                acc *= i as f64;
            }
            acc
        } else {
            let mut acc = std::f64::consts::PI.sqrt();
            let mut x = 0.5;
            for _ in 0..(two_s / 2) {
                acc *= x;
                x += 1.0;
            }
            acc
        }
    }
    let vol = std::f64::consts::PI.powf(k as f64 / 2.0) / gamma_half(k + 2) * r.powi(k as i32);
    (vol.max(1.0) * 1.5 + 16.0) as u128
}

/// Branch-and-bound enumeration of the selected patch.
pub fn generate_patch(
    d: &SuperspaceDecomposition,
    w: &WindowSpec,
    radius: &BigRational,
    opts: PatchOptions,
) -> Result<ModelSetPatch> {
    let start = std::time::Instant::now();
    let en = Enumerator::new(d, w, radius)?;
    let node_limit = opts.node_limit.unwrap_or(DEFAULT_NODE_LIMIT);
    let jobs = opts.jobs.max(1);

    let level0 = level_values(en.lo[0], en.hi[0]);
    let node_counter = AtomicU64::new(0);
    let prune_counter = AtomicU64::new(0);
    let leaf_counter = AtomicU64::new(0);

    // partition the first level among workers; results merge by sort+dedup
    // so the partition cannot affect the output
    let chunks: Vec<Vec<i64>> = if jobs == 1 {
        vec![level0]
    } else {
        let mut cs: Vec<Vec<i64>> = vec![vec![]; jobs];
        for (t, v) in level0.into_iter().enumerate() {
            cs[t % jobs].push(v);
        }
        cs
    };

    let results: Vec<Result<Vec<PatchPoint>>> = std::thread::scope(|scope| {
        let mut handles = vec![];
        for chunk in &chunks {
            let en_ref = &en;
            let counters = (&node_counter, &prune_counter, &leaf_counter);
            handles.push(scope.spawn(move || {
                let mut out = vec![];
                let mut m = vec![0i64; en_ref.d.k];
                for &v in chunk {
                    m[0] = v;
                    if (v * v) as f64 > en_ref.ball_sq {
                        continue;
                    }
                    bb_rec(en_ref, &mut m, 1, (v * v) as f64, node_limit, counters, &mut out)?;
                }
                Ok(out)
            }));
        }
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });

    let mut points = vec![];
    for r in results {
        points.extend(r?);
    }
    let stats = GenStats {
        nodes_visited: node_counter.load(Ordering::Relaxed),
        nodes_pruned: prune_counter.load(Ordering::Relaxed),
        leaves_tested: leaf_counter.load(Ordering::Relaxed),
        wall_ms: start.elapsed().as_millis(),
    };
    finalize(d, w, radius, points, stats)
}

fn bb_rec(
    en: &Enumerator,
    m: &mut Vec<i64>,
    dep: usize,
    sq: f64,
    node_limit: u64,
    counters: (&AtomicU64, &AtomicU64, &AtomicU64),
    out: &mut Vec<PatchPoint>,
) -> Result<()> {
    let (nodes, pruned, leaves) = counters;
    if nodes.fetch_add(1, Ordering::Relaxed) >= node_limit {
        return Err(Error::NodeLimitExceeded { limit: node_limit });
    }
    // joint LP relaxation on the current partial assignment
    if !en.relaxation_feasible(&m[..dep]) {
        pruned.fetch_add(1, Ordering::Relaxed);
        return Ok(());
    }
    if dep == en.d.k {
        leaves.fetch_add(1, Ordering::Relaxed);
        if let Some(p) = en.test_leaf(m)? {
            out.push(p);
        }
        return Ok(());
    }
    for v in level_values(en.lo[dep], en.hi[dep]) {
        let nsq = sq + (v * v) as f64;
        if nsq > en.ball_sq {
            continue;
        }
        m[dep] = v;
        bb_rec(en, m, dep + 1, nsq, node_limit, counters, out)?;
    }
    m[dep] = 0;
    Ok(())
}

/// Deduplicate modulo the relation lattice (same physical point), keeping
/// the lexicographically smallest selected representative, then sort.
fn finalize(
    d: &SuperspaceDecomposition,
    w: &WindowSpec,
    radius: &BigRational,
    points: Vec<PatchPoint>,
    stats: GenStats,
) -> Result<ModelSetPatch> {
    let mut best: HashMap<Vec<i64>, PatchPoint> = HashMap::new();
    for p in points {
        let key = canonical_key(d, &p.m);
        match best.get(&key) {
            Some(q) if q.m <= p.m => {}
            _ => {
                best.insert(key, p);
            }
        }
    }
    let mut points: Vec<PatchPoint> = best.into_values().collect();
    points.sort_by(|a, b| a.m.cmp(&b.m));
    Ok(ModelSetPatch {
        k: d.k,
        physical_dim: d.dims.physical,
        internal_dim: d.dims.dense,
        radius: radius.clone(),
        shift_seed: w.rng_seed,
        epsilon: w.epsilon,
        points,
        stats,
    })
}

/// Canonical residue of m modulo the relation lattice.
pub fn canonical_key(d: &SuperspaceDecomposition, m: &[i64]) -> Vec<i64> {
    let v: Vec<BigInt> = m.iter().map(|&x| BigInt::from(x)).collect();
    d.relations
        .reduce(&v)
        .iter()
        .map(|x| x.to_i64().expect("reduced coordinate fits i64"))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NeighbourStatus {
    Present { index: usize },
    Absent,
    /// The neighbour's physical position falls outside the patch radius,
    /// so its membership is not decided by this patch.
    Unknown,
}

/// Occupancy of the 2k arithmetic neighbour sites m +/- eps_i of one patch
/// point. A present neighbour sits at exact physical displacement +/- e_i.
pub fn neighbours(
    patch: &ModelSetPatch,
    d: &SuperspaceDecomposition,
    point_index: usize,
) -> Vec<(usize, i8, NeighbourStatus)> {
    let index: HashMap<Vec<i64>, usize> = patch
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| (canonical_key(d, &p.m), i))
        .collect();
    neighbours_with_index(patch, d, &index, point_index)
}

/// As `neighbours`, with a caller-built canonical index for bulk queries.
pub fn neighbours_with_index(
    patch: &ModelSetPatch,
    d: &SuperspaceDecomposition,
    index: &HashMap<Vec<i64>, usize>,
    point_index: usize,
) -> Vec<(usize, i8, NeighbourStatus)> {
    let p = &patch.points[point_index];
    let mut out = Vec::with_capacity(2 * d.k);
    for i in 0..d.k {
        for sign in [1i8, -1] {
            let mut m2 = p.m.clone();
            m2[i] += sign as i64;
            let status = if let Some(&idx) = index.get(&canonical_key(d, &m2)) {
                NeighbourStatus::Present { index: idx }
            } else {
                // outside the ball -> unknown, inside -> truly absent
                let n2 = d.physical_norm_sq_exact(&m2);
                let r2 = FieldElement::from_rational(&patch.radius * &patch.radius);
                if n2.sub(&r2).sign().expect("real") > 0 {
                    NeighbourStatus::Unknown
                } else {
                    NeighbourStatus::Absent
                }
            };
            out.push((i, sign, status));
        }
    }
    out
}

/// Canonical index map for neighbour lookups.
pub fn patch_index(
    patch: &ModelSetPatch,
    d: &SuperspaceDecomposition,
) -> HashMap<Vec<i64>, usize> {
    patch
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| (canonical_key(d, &p.m), i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{build_cluster, ClusterSpec};
    use crate::exact::mat::FeMat;
    use crate::presets;
    use crate::superspace::decompose;
    use crate::window::make_window;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn square() -> SuperspaceDecomposition {
        let fe = FieldElement::from_integer;
        let rot = FeMat::from_rows(vec![vec![fe(0), fe(-1)], vec![fe(1), fe(0)]]);
        let refl = FeMat::from_rows(vec![vec![fe(1), fe(0)], vec![fe(0), fe(-1)]]);
        decompose(
            &build_cluster(&ClusterSpec::new(2, 1, vec![rot, refl], vec![vec![fe(1), fe(0)]]))
                .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn square_patch_is_the_integer_lattice() {
        let d = square();
        let w = make_window(&d, 0, 1e-9).unwrap();
        let p = generate_patch(&d, &w, &q(3, 2), PatchOptions::default()).unwrap();
        let ms: Vec<Vec<i64>> = p.points.iter().map(|pt| pt.m.clone()).collect();
        let want: Vec<Vec<i64>> = vec![
            vec![-1, -1],
            vec![-1, 0],
            vec![-1, 1],
            vec![0, -1],
            vec![0, 0],
            vec![0, 1],
            vec![1, -1],
            vec![1, 0],
            vec![1, 1],
        ];
        assert_eq!(ms, want);
        let naive = naive_patch(&d, &w, &q(3, 2)).unwrap();
        assert_eq!(
            naive.points.iter().map(|pt| &pt.m).collect::<Vec<_>>(),
            p.points.iter().map(|pt| &pt.m).collect::<Vec<_>>()
        );
    }

    #[test]
    fn d10_oracle_equivalence_small() {
        let d = decompose(&presets::cluster("d10-penrose").unwrap()).unwrap();
        let w = make_window(&d, 42, 1e-9).unwrap();
        let r = q(4, 1);
        let a = generate_patch(&d, &w, &r, PatchOptions::default()).unwrap();
        let b = naive_patch(&d, &w, &r).unwrap();
        assert_eq!(
            a.points.iter().map(|p| &p.m).collect::<Vec<_>>(),
            b.points.iter().map(|p| &p.m).collect::<Vec<_>>()
        );
        assert!(!a.points.is_empty());
        // components all lie in 1..=4
        for p in &a.points {
            assert!(p.component[0] >= 1 && p.component[0] <= 4, "{:?}", p);
        }
    }

    #[test]
    fn monotone_in_radius() {
        let d = decompose(&presets::cluster("d10-penrose").unwrap()).unwrap();
        let w = make_window(&d, 7, 1e-9).unwrap();
        let small = generate_patch(&d, &w, &q(5, 1), PatchOptions::default()).unwrap();
        let large = generate_patch(&d, &w, &q(8, 1), PatchOptions::default()).unwrap();
        let set: std::collections::HashSet<Vec<i64>> =
            large.points.iter().map(|p| p.m.clone()).collect();
        for p in &small.points {
            assert!(set.contains(&p.m));
        }
        assert!(large.points.len() > small.points.len());
    }

    #[test]
    fn parallel_equals_serial() {
        let d = decompose(&presets::cluster("d10-penrose").unwrap()).unwrap();
        let w = make_window(&d, 3, 1e-9).unwrap();
        let serial = generate_patch(&d, &w, &q(6, 1), PatchOptions { node_limit: None, jobs: 1 }).unwrap();
        let par = generate_patch(&d, &w, &q(6, 1), PatchOptions { node_limit: None, jobs: 8 }).unwrap();
        assert_eq!(serial.points, par.points);
    }

    #[test]
    fn node_limit_respected() {
        let d = decompose(&presets::cluster("d10-penrose").unwrap()).unwrap();
        let w = make_window(&d, 3, 1e-9).unwrap();
        let r = generate_patch(
            &d,
            &w,
            &q(8, 1),
            PatchOptions { node_limit: Some(10), jobs: 1 },
        );
        assert!(matches!(r, Err(Error::NodeLimitExceeded { limit: 10 })));
    }

    #[test]
    fn neighbour_drift_is_exact_cluster_vector() {
        let d = decompose(&presets::cluster("d10-penrose").unwrap()).unwrap();
        let w = make_window(&d, 42, 1e-9).unwrap();
        let patch = generate_patch(&d, &w, &q(6, 1), PatchOptions::default()).unwrap();
        let index = patch_index(&patch, &d);
        for pi in 0..patch.points.len() {
            let p = &patch.points[pi];
            for (dir, sign, status) in neighbours_with_index(&patch, &d, &index, pi) {
                if let NeighbourStatus::Present { index: qi } = status {
                    let qp = &patch.points[qi];
                    // exact displacement: phys(q) - phys(p) = sign * e_dir
                    let pe = d.physical_exact(&p.m);
                    let qe = d.physical_exact(&qp.m);
                    for c in 0..2 {
                        let diff = qe[c].sub(&pe[c]);
                        let want = if sign > 0 {
                            d.cluster.vectors[dir][c].clone()
                        } else {
                            d.cluster.vectors[dir][c].neg()
                        };
                        assert_eq!(diff, want);
                    }
                }
            }
        }
    }

    #[test]
    fn square_neighbours_all_present_inside() {
        let d = square();
        let w = make_window(&d, 0, 1e-9).unwrap();
        let patch = generate_patch(&d, &w, &q(3, 1), PatchOptions::default()).unwrap();
        let index = patch_index(&patch, &d);
        // origin has all four neighbours
        let origin = patch.points.iter().position(|p| p.m == vec![0, 0]).unwrap();
        let ns = neighbours_with_index(&patch, &d, &index, origin);
        assert_eq!(ns.len(), 4);
        assert!(ns
            .iter()
            .all(|(_, _, s)| matches!(s, NeighbourStatus::Present { .. })));
    }

    #[test]
    fn two_shell_oracle_equivalence_tiny() {
        let d = decompose(&presets::cluster("d10-two-shell").unwrap()).unwrap();
        let w = make_window(&d, 42, 1e-9).unwrap();
        let r = q(2, 1);
        let a = generate_patch(&d, &w, &r, PatchOptions::default()).unwrap();
        let b = naive_patch(&d, &w, &r).unwrap();
        assert_eq!(
            a.points.iter().map(|p| &p.m).collect::<Vec<_>>(),
            b.points.iter().map(|p| &p.m).collect::<Vec<_>>()
        );
    }
}
