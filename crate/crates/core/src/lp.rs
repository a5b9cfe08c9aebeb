//! Small dense linear programs, solved by a two-phase primal simplex with
//! Bland's rule.
//!
//! The solver is generic over the scalar: doubles for the hot enumeration
//! paths, rationals or field elements when a decision sits too close to a
//! boundary to trust floating point. Problems here are tiny (tens of rows,
//! at most ~30 variables), so a dense tableau is the right tool.

use crate::exact::mat::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    Optimal { x: Vec<T>, objective: T },
    Infeasible,
    Unbounded,
    /// Iteration cap hit (only reachable with inexact scalars); callers
    /// should retry with exact arithmetic.
    Stalled,
}

const MAX_PIVOTS: usize = 20_000;

struct Tableau<T> {
    m: usize,
    n_total: usize,
    /// m rows of n_total coefficients plus rhs.
    rows: Vec<Vec<T>>,
    /// objective expressed in nonbasic variables: z = obj_const + obj[j] x_j
    obj: Vec<T>,
    obj_const: T,
    basis: Vec<usize>,
    banned: Vec<bool>,
}

impl<T: Scalar> Tableau<T> {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.div(&p);
        }
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.rows[i][c].clone();
            if f.is_zero() {
                continue;
            }
            let src = self.rows[r].clone();
            for (dst, s) in self.rows[i].iter_mut().zip(src.iter()) {
                *dst = dst.sub(&f.mul(s));
            }
        }
        let f = self.obj[c].clone();
        if !f.is_zero() {
            let rhs = self.rows[r][self.n_total].clone();
            self.obj_const = self.obj_const.add(&f.mul(&rhs));
            let src = self.rows[r].clone();
            for (dst, s) in self.obj.iter_mut().zip(src.iter()) {
                *dst = dst.sub(&f.mul(s));
            }
        }
        self.basis[r] = c;
    }

    /// Bland's rule iteration for maximization. Returns false on unbounded.
    fn run(&mut self) -> Result<(), LpOutcome<T>> {
        for _ in 0..MAX_PIVOTS {
            let Some(c) = (0..self.n_total)
                .find(|&j| !self.banned[j] && self.obj[j].signum() > 0)
            else {
                return Ok(());
            };
            // ratio test; Bland tie-break on the basic variable index
            let mut best: Option<(usize, T)> = None;
            for r in 0..self.m {
                if self.rows[r][c].signum() <= 0 {
                    continue;
                }
                let ratio = self.rows[r][self.n_total].div(&self.rows[r][c]);
                best = match best {
                    None => Some((r, ratio)),
                    Some((br, bratio)) => {
                        let cmp = ratio.sub(&bratio).signum();
                        if cmp < 0 || (cmp == 0 && self.basis[r] < self.basis[br]) {
                            Some((r, ratio))
                        } else {
                            Some((br, bratio))
                        }
                    }
                };
            }
            let Some((r, _)) = best else {
                return Err(LpOutcome::Unbounded);
            };
            self.pivot(r, c);
        }
        Err(LpOutcome::Stalled)
    }
}

/// Maximize c.x subject to A x <= b, x >= 0.
pub fn simplex_max<T: Scalar>(a: &[Vec<T>], b: &[T], c: &[T]) -> LpOutcome<T> {
    let m = a.len();
    let n = c.len();
    // columns: n structural, m slacks, 1 artificial, then rhs
    let art = n + m;
    let n_total = n + m + 1;
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![T::zero(); n_total + 1];
        for j in 0..n {
            row[j] = a[i][j].clone();
        }
        row[n + i] = T::one();
        row[art] = T::one().neg();
        row[n_total] = b[i].clone();
        rows.push(row);
    }
    let mut t = Tableau {
        m,
        n_total,
        rows,
        obj: vec![T::zero(); n_total],
        obj_const: T::zero(),
        basis: (n..n + m).collect(),
        banned: vec![false; n_total],
    };

    // phase 1 if any rhs is negative: maximize -artificial
    let needs_phase1 = (0..m).any(|i| t.rows[i][n_total].signum() < 0);
    if needs_phase1 {
        t.obj[art] = T::one().neg();
        // make the basis feasible: pivot the artificial into the most
        // negative row
        let r0 = (0..m)
            .min_by(|&x, &y| {
                let d = t.rows[x][n_total].sub(&t.rows[y][n_total]);
                match d.signum() {
                    s if s < 0 => std::cmp::Ordering::Less,
                    0 => std::cmp::Ordering::Equal,
                    _ => std::cmp::Ordering::Greater,
                }
            })
            .unwrap();
        t.pivot(r0, art);
        if let Err(out) = t.run() {
            return match out {
                LpOutcome::Unbounded => LpOutcome::Infeasible, // cannot happen: objective <= 0
                other => other,
            };
        }
        if t.obj_const.signum() < 0 {
            return LpOutcome::Infeasible;
        }
        // drive the artificial out of the basis if it lingers at level zero
        if let Some(r) = (0..m).find(|&i| t.basis[i] == art) {
            if let Some(c2) = (0..n + m).find(|&j| !t.rows[r][j].is_zero()) {
                t.pivot(r, c2);
            } else {
                // redundant row: drop it
                t.rows.remove(r);
                t.basis.remove(r);
                t.m -= 1;
            }
        }
        t.banned[art] = true;
        t.obj = vec![T::zero(); n_total];
        t.obj_const = T::zero();
    } else {
        t.banned[art] = true;
    }

    // phase 2 objective, expressed through the current basis
    for j in 0..n {
        t.obj[j] = c[j].clone();
    }
    for r in 0..t.m {
        let bv = t.basis[r];
        if bv < n && !c[bv].is_zero() {
            let f = c[bv].clone();
            let rhs = t.rows[r][n_total].clone();
            t.obj_const = t.obj_const.add(&f.mul(&rhs));
            let src = t.rows[r].clone();
            for (dst, s) in t.obj.iter_mut().zip(src.iter()) {
                *dst = dst.sub(&f.mul(s));
            }
            // the basic column must read zero in the objective row
            t.obj[bv] = T::zero();
        }
    }
    if let Err(out) = t.run() {
        return out;
    }
    let mut x = vec![T::zero(); n];
    for r in 0..t.m {
        if t.basis[r] < n {
            x[t.basis[r]] = t.rows[r][t.n_total].clone();
        }
    }
    LpOutcome::Optimal {
        x,
        objective: t.obj_const,
    }
}

/// Maximize the uniform slack rho of the system `rows . y + rho <= rhs`
/// over free y: the signed Chebyshev-style margin of the constraint system.
/// Returns the optimal (rho, y), or None when the solver stalls or the
/// system fails to bound rho (a construction error in the caller; every
/// system built here pairs opposing constraints).
pub fn maximin_slack<T: Scalar>(rows: &[Vec<T>], rhs: &[T]) -> Option<(T, Vec<T>)> {
    let m = rows.len();
    let nf = rows.first().map_or(0, |r| r.len());
    // variables: y+ (nf), y- (nf), rho+ , rho-
    let n = 2 * nf + 2;
    let mut a = Vec::with_capacity(m);
    for row in rows {
        let mut r = Vec::with_capacity(n);
        for v in row {
            r.push(v.clone());
        }
        for v in row {
            r.push(v.neg());
        }
        r.push(T::one());
        r.push(T::one().neg());
        a.push(r);
    }
    let mut c = vec![T::zero(); n];
    c[n - 2] = T::one();
    c[n - 1] = T::one().neg();
    match simplex_max(&a, rhs, &c) {
        LpOutcome::Optimal { x, .. } => {
            let rho = x[n - 2].sub(&x[n - 1]);
            let y: Vec<T> = (0..nf).map(|i| x[i].sub(&x[nf + i])).collect();
            Some((rho, y))
        }
        _ => None,
    }
}

/// Pure feasibility of `rows . x <= rhs, x >= 0` (phase 1 only, as a
/// zero-objective solve).
pub fn feasible<T: Scalar>(rows: &[Vec<T>], rhs: &[T]) -> Option<bool> {
    let n = rows.first().map_or(0, |r| r.len());
    match simplex_max(rows, rhs, &vec![T::zero(); n]) {
        LpOutcome::Optimal { .. } => Some(true),
        LpOutcome::Infeasible => Some(false),
        LpOutcome::Unbounded => Some(true),
        LpOutcome::Stalled => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn basic_max() {
        // max x+y st x+2y<=4, 3x+y<=6 -> vertex (8/5, 6/5), obj 14/5
        let a = vec![vec![q(1, 1), q(2, 1)], vec![q(3, 1), q(1, 1)]];
        let b = vec![q(4, 1), q(6, 1)];
        let c = vec![q(1, 1), q(1, 1)];
        match simplex_max(&a, &b, &c) {
            LpOutcome::Optimal { x, objective } => {
                assert_eq!(objective, q(14, 5));
                assert_eq!(x, vec![q(8, 5), q(6, 5)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_detected() {
        // x <= -1, x >= 0
        let a = vec![vec![q(1, 1)]];
        let b = vec![q(-1, 1)];
        let c = vec![q(0, 1)];
        assert_eq!(simplex_max(&a, &b, &c), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let a = vec![vec![q(-1, 1)]];
        let b = vec![q(0, 1)];
        let c = vec![q(1, 1)];
        assert_eq!(simplex_max(&a, &b, &c), LpOutcome::Unbounded);
    }

    #[test]
    fn negative_rhs_feasible() {
        // x >= 2 written as -x <= -2, maximize -x -> x = 2
        let a = vec![vec![q(-1, 1)], vec![q(1, 1)]];
        let b = vec![q(-2, 1), q(5, 1)];
        let c = vec![q(-1, 1)];
        match simplex_max(&a, &b, &c) {
            LpOutcome::Optimal { x, objective } => {
                assert_eq!(x[0], q(2, 1));
                assert_eq!(objective, q(-2, 1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn maximin_slab_pair() {
        // slack of 0 <= y <= 1 about its midpoint: rho* = 1/2 at y = 1/2
        // rows: -y + rho <= 0 ; y + rho <= 1
        let rows = vec![vec![q(-1, 1)], vec![q(1, 1)]];
        let rhs = vec![q(0, 1), q(1, 1)];
        let (rho, y) = maximin_slack(&rows, &rhs).unwrap();
        assert_eq!(rho, q(1, 2));
        assert_eq!(y[0], q(1, 2));
    }

    #[test]
    fn maximin_infeasible_system_gives_negative_margin() {
        // y <= 0 and y >= 1: margin -1/2 at y = 1/2
        let rows = vec![vec![q(1, 1)], vec![q(-1, 1)]];
        let rhs = vec![q(0, 1), q(-1, 1)];
        let (rho, _) = maximin_slack(&rows, &rhs).unwrap();
        assert_eq!(rho, q(-1, 2));
    }

    #[test]
    fn f64_and_exact_agree() {
        let rows_q = vec![
            vec![q(1, 1), q(1, 1)],
            vec![q(-1, 1), q(2, 1)],
            vec![q(0, 1), q(-1, 1)],
        ];
        let rhs_q = vec![q(3, 1), q(4, 1), q(0, 1)];
        let rows_f: Vec<Vec<f64>> = rows_q
            .iter()
            .map(|r| r.iter().map(crate::exact::interval::rational_to_f64).collect())
            .collect();
        let rhs_f: Vec<f64> = rhs_q.iter().map(crate::exact::interval::rational_to_f64).collect();
        let (rq, _) = maximin_slack(&rows_q, &rhs_q).unwrap();
        let (rf, _) = maximin_slack(&rows_f, &rhs_f).unwrap();
        assert!((crate::exact::interval::rational_to_f64(&rq) - rf).abs() < 1e-9);
    }

    /// Brute-force LP oracle: evaluate every basis (vertex candidate).
    fn brute_force_max(a: &[Vec<BigRational>], b: &[BigRational], c: &[BigRational]) -> Option<BigRational> {
        use crate::exact::mat::{Mat, QMat};
        let m = a.len();
        let n = c.len();
        // consider all choices of n active constraints among rows and
        // nonnegativity bounds
        let total = m + n;
        let mut best: Option<BigRational> = None;
        let mut feasible_any = false;
        let idx: Vec<usize> = (0..total).collect();
        let mut comb = vec![0usize; n];
        fn combos(idx: &[usize], k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = vec![];
            for (i, &v) in idx.iter().enumerate() {
                for mut rest in combos(&idx[i + 1..], k - 1) {
                    let mut c = vec![v];
                    c.append(&mut rest);
                    out.push(c);
                }
            }
            out
        }
        let _ = &mut comb;
        for combo in combos(&idx, n) {
            let rows: Vec<Vec<BigRational>> = combo
                .iter()
                .map(|&i| {
                    if i < m {
                        a[i].clone()
                    } else {
                        let mut r = vec![BigRational::from_integer(BigInt::from(0)); n];
                        r[i - m] = BigRational::from_integer(BigInt::from(1));
                        r
                    }
                })
                .collect();
            let rhs: Vec<BigRational> = combo
                .iter()
                .map(|&i| {
                    if i < m {
                        b[i].clone()
                    } else {
                        BigRational::from_integer(BigInt::from(0))
                    }
                })
                .collect();
            let mat: QMat = Mat::from_rows(rows);
            let Some(x) = mat.solve(&rhs) else { continue };
            // check feasibility
            let ok = x.iter().all(|v| !num_traits::Signed::is_negative(v))
                && a.iter().zip(b).all(|(row, bv)| {
                    let lhs: BigRational = row.iter().zip(&x).map(|(p, q)| p * q).sum();
                    lhs <= *bv
                });
            if ok {
                feasible_any = true;
                let obj: BigRational = c.iter().zip(&x).map(|(p, q)| p * q).sum();
                best = Some(match best {
                    None => obj,
                    Some(b0) => b0.max(obj),
                });
            }
        }
        if feasible_any {
            best
        } else {
            None
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn simplex_matches_brute_force(
            entries in proptest::collection::vec(-5i64..=5, 6),
            rhs in proptest::collection::vec(-3i64..=6, 3),
            cost in proptest::collection::vec(-3i64..=3, 2),
        ) {
            let a: Vec<Vec<BigRational>> = entries
                .chunks(2)
                .map(|ch| ch.iter().map(|&v| q(v, 1)).collect())
                .collect();
            let b: Vec<BigRational> = rhs.iter().map(|&v| q(v, 1)).collect();
            let c: Vec<BigRational> = cost.iter().map(|&v| q(v, 1)).collect();
            // bound the feasible region so the oracle sees every optimum
            let mut a2 = a.clone();
            let mut b2 = b.clone();
            a2.push(vec![q(1,1), q(0,1)]);
            b2.push(q(50,1));
            a2.push(vec![q(0,1), q(1,1)]);
            b2.push(q(50,1));
            let got = simplex_max(&a2, &b2, &c);
            let want = brute_force_max(&a2, &b2, &c);
            match (got, want) {
                (LpOutcome::Optimal { objective, .. }, Some(w)) => prop_assert_eq!(objective, w),
                (LpOutcome::Infeasible, None) => {}
                (g, w) => prop_assert!(false, "simplex {:?} vs oracle {:?}", g, w),
            }
        }
    }
}
