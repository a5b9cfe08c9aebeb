//! Integer matrix Hermite normal form and saturated kernel lattices.
//!
//! Convention: row-style HNF with positive pivots; entries above each pivot
//! are reduced into [0, pivot). Zero rows are dropped from lattice bases, so
//! a basis in HNF is a canonical representative of its row lattice.

use crate::exact::cyclotomic::FieldElement;
use crate::exact::mat::FeMat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IntRow = Vec<BigInt>;

/// Row-style Hermite normal form: returns (H, U) with H = U * M and U
/// unimodular. H keeps the same number of rows as M (zero rows at the
/// bottom).
pub fn hnf(m: &[IntRow]) -> (Vec<IntRow>, Vec<IntRow>) {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut h: Vec<IntRow> = m.to_vec();
    let mut u: Vec<IntRow> = (0..rows)
        .map(|i| {
            (0..rows)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let mut pivot_row = 0;
    for c in 0..cols {
        if pivot_row == rows {
            break;
        }
        // eliminate below pivot_row in column c by gcd steps
        loop {
            let mut best: Option<usize> = None;
            for i in pivot_row..rows {
                if !h[i][c].is_zero() {
                    best = match best {
                        None => Some(i),
                        Some(b) => {
                            if h[i][c].magnitude() < h[b][c].magnitude() {
                                Some(i)
                            } else {
                                Some(b)
                            }
                        }
                    };
                }
            }
            let Some(b) = best else { break };
            h.swap(pivot_row, b);
            u.swap(pivot_row, b);
            let mut any = false;
            for i in pivot_row + 1..rows {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = div_round(&h[i][c], &h[pivot_row][c]);
                row_sub_mul(&mut h, i, pivot_row, &q);
                row_sub_mul(&mut u, i, pivot_row, &q);
                if !h[i][c].is_zero() {
                    any = true;
                }
            }
            if !any {
                break;
            }
        }
        if h[pivot_row][c].is_zero() {
            continue;
        }
        if h[pivot_row][c].is_negative() {
            negate_row(&mut h, pivot_row);
            negate_row(&mut u, pivot_row);
        }
        // reduce entries above the pivot into [0, pivot)
        for i in 0..pivot_row {
            let q = h[i][c].div_floor(&h[pivot_row][c]);
            if !q.is_zero() {
                row_sub_mul(&mut h, i, pivot_row, &q);
                row_sub_mul(&mut u, i, pivot_row, &q);
            }
        }
        pivot_row += 1;
    }
    (h, u)
}

/// Quotient that minimizes the remainder magnitude (rounded division).
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    // r in [0,|b|) for positive b; pick nearer multiple
    if (&r * 2i32).magnitude() > b.magnitude() {
        q + b.signum()
    } else {
        q
    }
}

fn row_sub_mul(m: &mut [IntRow], dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let srow = m[src].clone();
    for (d, s) in m[dst].iter_mut().zip(srow.iter()) {
        *d -= q * s;
    }
}

fn negate_row(m: &mut [IntRow], i: usize) {
    for v in m[i].iter_mut() {
        *v = -v.clone();
    }
}

/// An integer lattice given by linearly independent rows in canonical HNF.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegerLatticeBasis {
    pub ambient_dim: usize,
    pub rows: Vec<IntRow>,
}

impl IntegerLatticeBasis {
    pub fn empty(ambient_dim: usize) -> Self {
        IntegerLatticeBasis {
            ambient_dim,
            rows: vec![],
        }
    }

    /// Canonicalize a spanning set into an HNF basis (zero rows dropped).
    pub fn from_spanning(ambient_dim: usize, rows: Vec<IntRow>) -> Self {
        let (h, _) = hnf(&rows);
        let rows = h.into_iter().filter(|r| r.iter().any(|v| !v.is_zero())).collect();
        IntegerLatticeBasis { ambient_dim, rows }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce v modulo the lattice: subtract the unique combination that
    /// brings every pivot coordinate into [0, pivot). The result is a
    /// canonical coset representative.
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut out = v.to_vec();
        for row in &self.rows {
            let pc = row.iter().position(|x| !x.is_zero()).unwrap();
            let q = out[pc].div_floor(&row[pc]);
            if !q.is_zero() {
                for (o, r) in out.iter_mut().zip(row.iter()) {
                    *o -= &q * r;
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }
}

/// Saturated kernel lattice {x in Z^cols : M x = 0} of an integer matrix,
/// via the unimodular transform of the HNF of M^T: rows of U aligned with
/// zero rows of H form a basis of the kernel.
pub fn integer_kernel(m: &[IntRow]) -> IntegerLatticeBasis {
    let cols = m.first().map_or(0, |r| r.len());
    if m.is_empty() {
        // kernel is all of Z^cols
        let rows = (0..cols)
            .map(|i| {
                (0..cols)
                    .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                    .collect()
            })
            .collect();
        return IntegerLatticeBasis {
            ambient_dim: cols,
            rows,
        };
    }
    let mt: Vec<IntRow> = (0..cols)
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect();
    let (h, u) = hnf(&mt);
    let mut basis = vec![];
    for (hrow, urow) in h.iter().zip(u.iter()) {
        if hrow.iter().all(|v| v.is_zero()) {
            basis.push(urow.clone());
        }
    }
    IntegerLatticeBasis::from_spanning(cols, basis)
}

/// Integer kernel of a matrix of field elements: expand each row into
/// deg(Phi_N) rational rows (one per power-basis coordinate), clear
/// denominators, and take the saturated integer kernel.
pub fn rational_kernel_over_q(m: &FeMat) -> IntegerLatticeBasis {
    let cols = m.cols;
    let mut int_rows: Vec<IntRow> = vec![];
    for i in 0..m.rows {
        // unify the row to a common conductor
        let mut conductor = 1u32;
        for j in 0..cols {
            conductor = (conductor as u64).lcm(&(m[(i, j)].conductor() as u64)) as u32;
        }
        let row: Vec<FieldElement> = (0..cols)
            .map(|j| m[(i, j)].embed_in(conductor).expect("lcm embedding"))
            .collect();
        let deg = row[0].coeffs().len();
        for t in 0..deg {
            let rats: Vec<BigRational> = row.iter().map(|fe| fe.coeffs()[t].clone()).collect();
            if rats.iter().all(|q| q.is_zero()) {
                continue;
            }
            let mut denom = BigInt::one();
            for q in &rats {
                denom = denom.lcm(q.denom());
            }
            int_rows.push(
                rats.iter()
                    .map(|q| q.numer() * (&denom / q.denom()))
                    .collect(),
            );
        }
    }
    if int_rows.is_empty() {
        return integer_kernel(&[]).ambient(cols)
    }
    integer_kernel(&int_rows)
}

impl IntegerLatticeBasis {
    fn ambient(mut self, dim: usize) -> Self {
        if self.rows.is_empty() {
            self.ambient_dim = dim;
            // full kernel when there were no constraints
            self.rows = (0..dim)
                .map(|i| {
                    (0..dim)
                        .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                        .collect()
                })
                .collect();
        }
        self
    }
}

/// Multiply integer matrix rows by an FeMat column vector check helper:
/// returns M * v where v has integer entries.
pub fn fe_mat_mul_int_vec(m: &FeMat, v: &[BigInt]) -> Vec<FieldElement> {
    (0..m.rows)
        .map(|i| {
            let mut acc = FieldElement::zero_in(1);
            for j in 0..m.cols {
                if v[j].is_zero() {
                    continue;
                }
                acc = acc.add(&m[(i, j)].scale(&BigRational::from_integer(v[j].clone())));
            }
            acc
        })
        .collect()
}

pub fn int_rows_from_i64(rows: &[Vec<i64>]) -> Vec<IntRow> {
    rows.iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect()
}
