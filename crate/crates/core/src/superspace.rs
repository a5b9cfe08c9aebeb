//! Superspace decomposition: lift the cluster to R^k, build the exact
//! orthogonal projectors onto the physical space E, the dense internal part
//! E', and the lattice internal part E'', and validate the whole structure
//! before anything downstream consumes it.
//!
//! Normalization: all lattice work happens in Z^k with the unit cube as the
//! selection window. The physical image of an integer vector m is
//! sum_i m_i e_i, so the scale factor kappa never needs to be carried
//! symbolically; it only appears through kappa^2, which is a field element.

use crate::cluster::GCluster;
use crate::error::{Error, Result};
use crate::exact::hnf::{fe_mat_mul_int_vec, rational_kernel_over_q, IntegerLatticeBasis};
use crate::exact::mat::{FeMat, Mat, QMat};
use crate::exact::FieldElement;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

/// Dimensions of the three orthogonal pieces of R^k.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dims {
    /// dim E = n, the physical space.
    pub physical: usize,
    /// dim E', the densely projected internal part.
    pub dense: usize,
    /// dim E'', the lattice internal part (rank of the relation lattice).
    pub lattice: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Dense,
    Discrete,
}

/// An orthogonal (not normalized) exact basis of a subspace, with the
/// squared norm of each basis vector. Normalization happens only in the
/// float shadow, where the square root is harmless.
#[derive(Clone, Debug)]
pub struct OrthoBasis {
    /// Basis vectors as rows, entries in the cluster's field.
    pub rows: Vec<Vec<FieldElement>>,
    pub sq_norms: Vec<FieldElement>,
    /// Float shadow of the orthonormalized rows.
    pub rows_f64: Vec<Vec<f64>>,
}

impl OrthoBasis {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Float coordinates of an exact k-vector in the orthonormalized basis.
    pub fn coords_f64_exact(&self, v: &[FieldElement]) -> Vec<f64> {
        self.rows
            .iter()
            .zip(&self.sq_norms)
            .map(|(row, n2)| {
                let mut acc = FieldElement::zero_in(1);
                for (r, x) in row.iter().zip(v) {
                    acc = acc.add(&r.mul(x));
                }
                acc.to_f64() / n2.to_f64().sqrt()
            })
            .collect()
    }

    /// Float coordinates of a float k-vector in the orthonormalized basis.
    pub fn coords_f64(&self, v: &[f64]) -> Vec<f64> {
        self.rows_f64
            .iter()
            .map(|row| row.iter().zip(v).map(|(r, x)| r * x).sum())
            .collect()
    }
}

/// Exact Gram-Schmidt (orthogonalization without normalization) over the
/// field, on a deterministic spanning sequence.
fn gram_schmidt(spanning: &[Vec<FieldElement>]) -> OrthoBasis {
    let mut rows: Vec<Vec<FieldElement>> = vec![];
    let mut sq_norms: Vec<FieldElement> = vec![];
    for cand in spanning {
        let mut v = cand.clone();
        for (b, n2) in rows.iter().zip(&sq_norms) {
            let mut proj = FieldElement::zero_in(1);
            for (x, y) in v.iter().zip(b) {
                proj = proj.add(&x.mul(y));
            }
            if proj.is_zero() {
                continue;
            }
            let c = proj.div(n2).expect("nonzero Gram-Schmidt norm");
            for (x, y) in v.iter_mut().zip(b) {
                *x = x.sub(&c.mul(y));
            }
        }
        if v.iter().all(|x| x.is_zero()) {
            continue;
        }
        let mut n2 = FieldElement::zero_in(1);
        for x in &v {
            n2 = n2.add(&x.mul(x));
        }
        rows.push(v);
        sq_norms.push(n2);
    }
    let rows_f64 = rows
        .iter()
        .zip(&sq_norms)
        .map(|(row, n2)| {
            let norm = n2.to_f64().sqrt();
            row.iter().map(|x| x.to_f64() / norm).collect()
        })
        .collect();
    OrthoBasis {
        rows,
        sq_norms,
        rows_f64,
    }
}

/// The full exact decomposition R^k = E + E' + E''.
#[derive(Clone, Debug)]
pub struct SuperspaceDecomposition {
    pub cluster: GCluster,
    pub k: usize,
    pub kappa_sq: FieldElement,
    /// Projector onto E, entries kappa^-2 <e_i, e_j>.
    pub pi: FeMat,
    /// Projector onto E'.
    pub pi_prime: FeMat,
    /// Projector onto E'' (always rational).
    pub pi_dprime: QMat,
    /// Basis of the relation lattice {m in Z^k : sum m_i e_i = 0}, HNF.
    pub relations: IntegerLatticeBasis,
    pub dims: Dims,
    /// Canonical basis of the lattice pi''(Z^k), expressed in relation-span
    /// coordinates (rows).
    pub internal_lattice_basis: QMat,
    /// Coset functional: F m = coordinates of pi'' m in the canonical
    /// internal lattice basis; integer on Z^k.
    pub coset_functional: QMat,
    /// Orthogonal exact basis of E (rows u_j[i] = e_{i,j}).
    pub e_basis: OrthoBasis,
    /// Orthogonal exact basis of E'.
    pub eprime_basis: OrthoBasis,
    /// Gram matrix <e_i, e_j> of the cluster vectors (= kappa^2 pi).
    pub gram: FeMat,
    /// Float shadows used by the fast geometric paths.
    pub pi_f64: Vec<Vec<f64>>,
    pub pi_perp_f64: Vec<Vec<f64>>,
    pub coset_functional_f64: Vec<Vec<f64>>,
}

/// kappa^2 = sum over cluster vectors of the squared first coordinate.
pub fn kappa_squared(cluster: &GCluster) -> FieldElement {
    let mut acc = FieldElement::zero_in(1);
    for v in &cluster.vectors {
        acc = acc.add(&v[0].mul(&v[0]));
    }
    acc
}

/// The k x k projector onto E: entries kappa^-2 <e_i, e_j>.
pub fn physical_projector(cluster: &GCluster) -> Result<FeMat> {
    let kappa2 = kappa_squared(cluster);
    let gram = gram_matrix(cluster);
    let inv = kappa2.inv().map_err(|_| {
        Error::InvariantViolation("kappa^2 must be nonzero".into())
    })?;
    Ok(gram.map(|g| g.mul(&inv)))
}

fn gram_matrix(cluster: &GCluster) -> FeMat {
    let k = cluster.k();
    let mut m = FeMat::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let mut acc = FieldElement::zero_in(1);
            for t in 0..cluster.physical_dim {
                acc = acc.add(&cluster.vectors[i][t].mul(&cluster.vectors[j][t]));
            }
            m[(i, j)] = acc.clone();
            m[(j, i)] = acc;
        }
    }
    m
}

fn qmat_to_femat(m: &QMat) -> FeMat {
    m.map(|q| FieldElement::from_rational(q.clone()))
}

/// Orthogonal rational projector onto the row span of an integer basis:
/// B^T (B B^T)^-1 B.
fn rational_orthoprojector(basis: &IntegerLatticeBasis, k: usize) -> Result<QMat> {
    if basis.rank() == 0 {
        return Ok(QMat::zeros(k, k));
    }
    let b = Mat::from_rows(
        basis
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|v| BigRational::from_integer(v.clone()))
                    .collect::<Vec<_>>()
            })
            .collect(),
    );
    let bt = b.transpose();
    let gram = b.matmul(&bt);
    let inv = gram.inverse().ok_or_else(|| {
        Error::InvariantViolation("relation basis is not linearly independent".into())
    })?;
    Ok(bt.matmul(&inv).matmul(&b))
}

/// Compute and fully verify the decomposition.
pub fn decompose(cluster: &GCluster) -> Result<SuperspaceDecomposition> {
    let k = cluster.k();
    let n = cluster.physical_dim;

    // relation lattice: integer kernel of the n x k matrix [e_1 ... e_k]
    let e_matrix = FeMat::from_rows(
        (0..n)
            .map(|coord| {
                cluster
                    .vectors
                    .iter()
                    .map(|v| v[coord].clone())
                    .collect::<Vec<_>>()
            })
            .collect(),
    );
    let relations = rational_kernel_over_q(&e_matrix);
    let rank = relations.rank();

    if k < n + rank {
        return Err(Error::InvariantViolation(
            "relation rank exceeds the internal dimension".into(),
        ));
    }

    let kappa_sq = kappa_squared(cluster);
    let gram = gram_matrix(cluster);
    let pi = physical_projector(cluster)?;
    let pi_dprime = rational_orthoprojector(&relations, k)?;
    let pi_dprime_fe = qmat_to_femat(&pi_dprime);
    let pi_prime = FeMat::identity(k).sub_mat(&pi).sub_mat(&pi_dprime_fe);

    let dims = Dims {
        physical: n,
        dense: k - n - rank,
        lattice: rank,
    };

    // canonical basis of pi''(Z^k) in relation-span coordinates
    let (internal_lattice_basis, coset_functional) =
        internal_lattice(&relations, &pi_dprime, k)?;

    // orthogonal bases: E from the coordinate rows, E' from pi' columns
    let e_span: Vec<Vec<FieldElement>> = (0..n)
        .map(|coord| {
            cluster
                .vectors
                .iter()
                .map(|v| v[coord].clone())
                .collect::<Vec<_>>()
        })
        .collect();
    let e_basis = gram_schmidt(&e_span);
    let eprime_span: Vec<Vec<FieldElement>> = (0..k)
        .map(|j| (0..k).map(|i| pi_prime[(i, j)].clone()).collect())
        .collect();
    let eprime_basis = gram_schmidt(&eprime_span);

    let pi_f64: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| pi[(i, j)].to_f64()).collect())
        .collect();
    let pi_perp_f64: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let d = if i == j { 1.0 } else { 0.0 };
                    d - pi_f64[i][j]
                })
                .collect()
        })
        .collect();
    let coset_functional_f64 = (0..coset_functional.rows)
        .map(|i| {
            (0..coset_functional.cols)
                .map(|j| crate::exact::interval::rational_to_f64(&coset_functional[(i, j)]))
                .collect()
        })
        .collect();

    let d = SuperspaceDecomposition {
        cluster: cluster.clone(),
        k,
        kappa_sq,
        pi,
        pi_prime,
        pi_dprime,
        relations,
        dims,
        internal_lattice_basis,
        coset_functional,
        e_basis,
        eprime_basis,
        gram,
        pi_f64,
        pi_perp_f64,
        coset_functional_f64,
    };
    d.verify()?;
    Ok(d)
}

/// Canonical basis of pi''(Z^k) written in relation coordinates, plus the
/// functional mapping m to its integer coset coordinates.
fn internal_lattice(
    relations: &IntegerLatticeBasis,
    pi_dprime: &QMat,
    k: usize,
) -> Result<(QMat, QMat)> {
    let rank = relations.rank();
    if rank == 0 {
        return Ok((QMat::zeros(0, 0), QMat::zeros(0, k)));
    }
    let b = Mat::from_rows(
        relations
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|v| BigRational::from_integer(v.clone()))
                    .collect::<Vec<_>>()
            })
            .collect(),
    );
    // relation coordinates of any x in span: c = (B B^T)^-1 B x
    let bt = b.transpose();
    let gram_inv = b
        .matmul(&bt)
        .inverse()
        .ok_or_else(|| Error::InvariantViolation("degenerate relation Gram".into()))?;
    let to_rel_coords = gram_inv.matmul(&b); // rank x k

    // generators of pi''(Z^k) in relation coordinates: columns of
    // to_rel_coords * pi''  =  to_rel_coords (pi'' e_i spans as i varies);
    // pi'' x has relation coords to_rel_coords x, so generators are just
    // the columns of to_rel_coords.
    let gens: Vec<Vec<BigRational>> = (0..k)
        .map(|i| (0..rank).map(|r| to_rel_coords[(r, i)].clone()).collect())
        .collect();

    // canonical lattice basis: clear denominators, HNF, rescale back
    let mut denom = BigInt::from(1);
    for g in &gens {
        for q in g {
            denom = num_integer::Integer::lcm(&denom, q.denom());
        }
    }
    let int_rows: Vec<Vec<BigInt>> = gens
        .iter()
        .map(|g| g.iter().map(|q| q.numer() * (&denom / q.denom())).collect())
        .collect();
    let lat = IntegerLatticeBasis::from_spanning(rank, int_rows);
    if lat.rank() != rank {
        return Err(Error::InvariantViolation(
            "internal lattice does not span the relation space".into(),
        ));
    }
    let basis = Mat::from_rows(
        lat.rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|v| BigRational::new(v.clone(), denom.clone()))
                    .collect::<Vec<_>>()
            })
            .collect(),
    );
    // coset coords c of x satisfy x = basis^T c (basis rows), so
    // c = (basis^T)^-1 x; integer on Z^k
    let basis_inv_t = basis
        .transpose()
        .inverse()
        .ok_or_else(|| Error::InvariantViolation("internal lattice basis singular".into()))?;
    let functional = basis_inv_t.matmul(&to_rel_coords);
    // sanity: pi'' itself maps into the lattice, so F * identity columns
    // must be integral
    for i in 0..functional.rows {
        for j in 0..functional.cols {
            if !functional[(i, j)].is_integer() {
                return Err(Error::InvariantViolation(
                    "coset functional is not integral on Z^k".into(),
                ));
            }
        }
    }
    let _ = pi_dprime;
    Ok((basis, functional))
}

impl SuperspaceDecomposition {
    pub fn classification(&self) -> Classification {
        if self.dims.dense == 0 {
            Classification::Discrete
        } else {
            Classification::Dense
        }
    }

    /// Integer coset coordinates of pi'' m in the canonical internal
    /// lattice basis.
    pub fn coset_index(&self, m: &[i64]) -> Vec<i64> {
        (0..self.coset_functional.rows)
            .map(|r| {
                let mut acc = BigRational::zero();
                for (j, &v) in m.iter().enumerate() {
                    if v != 0 {
                        acc += &self.coset_functional[(r, j)]
                            * BigRational::from_integer(BigInt::from(v));
                    }
                }
                debug_assert!(acc.is_integer());
                use num_traits::ToPrimitive;
                acc.to_integer().to_i64().expect("coset index fits i64")
            })
            .collect()
    }

    /// Exact physical coordinates sum m_i e_i of an integer vector.
    pub fn physical_exact(&self, m: &[i64]) -> Vec<FieldElement> {
        let n = self.dims.physical;
        (0..n)
            .map(|coord| {
                let mut acc = FieldElement::zero_in(1);
                for (i, &v) in m.iter().enumerate() {
                    if v != 0 {
                        acc = acc.add(
                            &self.cluster.vectors[i][coord]
                                .scale(&BigRational::from_integer(BigInt::from(v))),
                        );
                    }
                }
                acc
            })
            .collect()
    }

    /// Exact squared physical norm ||sum m_i e_i||^2 = m^T Gram m.
    pub fn physical_norm_sq_exact(&self, m: &[i64]) -> FieldElement {
        let mut acc = FieldElement::zero_in(1);
        for i in 0..self.k {
            if m[i] == 0 {
                continue;
            }
            for j in 0..self.k {
                if m[j] == 0 {
                    continue;
                }
                let c = BigRational::from_integer(BigInt::from(m[i] * m[j]));
                acc = acc.add(&self.gram[(i, j)].scale(&c));
            }
        }
        acc
    }

    /// Exact pi' image of an integer vector (k coordinates).
    pub fn pi_prime_exact(&self, m: &[i64]) -> Vec<FieldElement> {
        (0..self.k)
            .map(|i| {
                let mut acc = FieldElement::zero_in(1);
                for (j, &v) in m.iter().enumerate() {
                    if v != 0 {
                        acc = acc.add(
                            &self.pi_prime[(i, j)].scale(&BigRational::from_integer(BigInt::from(v))),
                        );
                    }
                }
                acc
            })
            .collect()
    }

    /// Star map: internal-space coordinates of an integer vector in the
    /// orthonormalized E' basis (float), plus the exact pi' image.
    pub fn star_map(&self, m: &[i64]) -> (Vec<f64>, Vec<FieldElement>) {
        let exact = self.pi_prime_exact(m);
        let coords = self.eprime_basis.coords_f64_exact(&exact);
        (coords, exact)
    }

    /// Float physical coordinates.
    pub fn physical_f64(&self, m: &[i64]) -> Vec<f64> {
        let vf = self.cluster.vectors_f64();
        (0..self.dims.physical)
            .map(|coord| {
                m.iter()
                    .enumerate()
                    .map(|(i, &v)| v as f64 * vf[i][coord])
                    .sum()
            })
            .collect()
    }

    /// Full invariant suite; anything false here means the input cluster is
    /// inconsistent (e.g. the physical representation is not irreducible).
    pub fn verify(&self) -> Result<()> {
        let k = self.k;
        let fail = |msg: &str| Err(Error::InvariantViolation(msg.into()));

        let pi_dprime_fe = qmat_to_femat(&self.pi_dprime);
        let id = FeMat::identity(k);

        // symmetry
        if self.pi != self.pi.transpose() {
            return fail("pi is not symmetric");
        }
        if self.pi_prime != self.pi_prime.transpose() {
            return fail("pi' is not symmetric");
        }
        // idempotence
        if self.pi.matmul(&self.pi) != self.pi {
            return fail("pi is not idempotent");
        }
        if self.pi_prime.matmul(&self.pi_prime) != self.pi_prime {
            return fail("pi' is not idempotent");
        }
        if pi_dprime_fe.matmul(&pi_dprime_fe) != pi_dprime_fe {
            return fail("pi'' is not idempotent");
        }
        // mutual annihilation
        if !self.pi.matmul(&self.pi_prime).is_zero()
            || !self.pi.matmul(&pi_dprime_fe).is_zero()
            || !self.pi_prime.matmul(&pi_dprime_fe).is_zero()
        {
            return fail("projectors do not annihilate each other");
        }
        // resolution of identity
        if self.pi.add_mat(&self.pi_prime).add_mat(&pi_dprime_fe) != id {
            return fail("projectors do not sum to the identity");
        }
        // traces
        let n_fe = FieldElement::from_integer(self.dims.physical as i64);
        if self.pi.trace() != n_fe {
            return fail("trace of pi is not the physical dimension");
        }
        if pi_dprime_fe.trace() != FieldElement::from_integer(self.dims.lattice as i64) {
            return fail("trace of pi'' is not the relation rank");
        }
        if self.pi_prime.trace() != FieldElement::from_integer(self.dims.dense as i64) {
            return fail("trace of pi' is not k - n - rank");
        }
        // equivariance with every induced generator matrix
        for (_, sp) in &self.cluster.generators {
            let g = FeMat::from_rows(
                sp.induced_matrix()
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|&v| FieldElement::from_integer(v as i64))
                            .collect::<Vec<_>>()
                    })
                    .collect(),
            );
            if g.matmul(&self.pi) != self.pi.matmul(&g) {
                return fail("pi does not commute with a generator");
            }
            if g.matmul(&self.pi_prime) != self.pi_prime.matmul(&g) {
                return fail("pi' does not commute with a generator");
            }
            if g.matmul(&pi_dprime_fe) != pi_dprime_fe.matmul(&g) {
                return fail("pi'' does not commute with a generator");
            }
        }
        // relation vectors annihilate the cluster and live in E''
        let e_matrix = FeMat::from_rows(
            (0..self.dims.physical)
                .map(|coord| {
                    self.cluster
                        .vectors
                        .iter()
                        .map(|v| v[coord].clone())
                        .collect::<Vec<_>>()
                })
                .collect(),
        );
        for r in &self.relations.rows {
            let img = fe_mat_mul_int_vec(&e_matrix, r);
            if img.iter().any(|fe| !fe.is_zero()) {
                return fail("relation vector does not annihilate the cluster");
            }
            let as_fe: Vec<FieldElement> = r
                .iter()
                .map(|v| FieldElement::from_rational(BigRational::from_integer(v.clone())))
                .collect();
            let proj = pi_dprime_fe.mul_vec(&as_fe);
            if proj != as_fe {
                return fail("pi'' does not fix a relation vector");
            }
            let pr = self.pi_prime.mul_vec(&as_fe);
            if pr.iter().any(|fe| !fe.is_zero()) {
                return fail("pi' does not kill a relation vector");
            }
        }
        Ok(())
    }
}

/// Diagnostics for the cut-and-project structure of a Dense decomposition.
#[derive(Clone, Debug)]
pub struct SchemeReport {
    pub classification: Classification,
    pub injectivity_ok: bool,
    pub density_diagnostic: DensityDiagnostic,
    pub coset_count_bound: u64,
}

#[derive(Clone, Debug)]
pub struct DensityDiagnostic {
    pub sample_radius: i64,
    pub probe_count: usize,
    pub images_in_ball: usize,
    /// Largest distance from a probe point in the unit ball of E' to the
    /// nearest projected lattice point; shrinks as the sample grows.
    pub max_gap: f64,
    pub mean_gap: f64,
}

pub fn classify_projection(d: &SuperspaceDecomposition) -> Classification {
    d.classification()
}

/// Exact injectivity plus an empirical fill statistic of pi'(Z^k) in E'.
pub fn scheme_check(d: &SuperspaceDecomposition, sample_radius: i64) -> Result<SchemeReport> {
    if d.classification() != Classification::Dense {
        return Err(Error::Precondition(
            "scheme_check requires a Dense classification".into(),
        ));
    }
    // ker(pi + pi') cap Z^k must equal the relation lattice exactly
    let pi_tilde = d.pi.add_mat(&d.pi_prime);
    let kernel = rational_kernel_over_q(&pi_tilde);
    let injectivity_ok = kernel == d.relations;

    // fill distances of pi'-images inside the unit ball of E'
    let dim = d.dims.dense;
    let cols: Vec<Vec<f64>> = (0..d.k)
        .map(|i| {
            let mut unit = vec![0i64; d.k];
            unit[i] = 1;
            d.star_map(&unit).0
        })
        .collect();
    let mut images: Vec<Vec<f64>> = vec![];
    let mut idx = vec![-sample_radius; d.k];
    'outer: loop {
        let mut img = vec![0.0; dim];
        for (i, &v) in idx.iter().enumerate() {
            for t in 0..dim {
                img[t] += v as f64 * cols[i][t];
            }
        }
        let r2: f64 = img.iter().map(|x| x * x).sum();
        if r2 <= 1.0 {
            images.push(img);
        }
        // odometer
        for i in (0..d.k).rev() {
            idx[i] += 1;
            if idx[i] <= sample_radius {
                continue 'outer;
            }
            idx[i] = -sample_radius;
        }
        break;
    }

    let probes = probe_grid(dim, 0.15);
    let mut max_gap: f64 = 0.0;
    let mut sum_gap = 0.0;
    for p in &probes {
        let mut best = f64::INFINITY;
        for img in &images {
            let d2: f64 = p.iter().zip(img).map(|(a, b)| (a - b) * (a - b)).sum();
            if d2 < best {
                best = d2;
            }
        }
        let gap = best.sqrt();
        max_gap = max_gap.max(gap);
        sum_gap += gap;
    }

    // bound on cosets with a nonempty window slice: lattice points of the
    // internal lattice inside the bounding box of pi''(cube)
    let mut coset_count_bound = 1u64;
    for r in 0..d.coset_functional.rows {
        let mut lo = 0.0f64;
        let mut hi = 0.0f64;
        for j in 0..d.k {
            let c = d.coset_functional_f64[r][j];
            if c < 0.0 {
                lo += c;
            } else {
                hi += c;
            }
        }
        coset_count_bound *= (hi.floor() - lo.ceil() + 1.0).max(0.0) as u64;
    }

    Ok(SchemeReport {
        classification: d.classification(),
        injectivity_ok,
        density_diagnostic: DensityDiagnostic {
            sample_radius,
            probe_count: probes.len(),
            images_in_ball: images.len(),
            max_gap,
            mean_gap: sum_gap / probes.len().max(1) as f64,
        },
        coset_count_bound,
    })
}

/// Deterministic grid of probe points filling the unit ball.
fn probe_grid(dim: usize, spacing: f64) -> Vec<Vec<f64>> {
    let steps = (1.0 / spacing).floor() as i64;
    let mut out = vec![];
    let mut idx = vec![-steps; dim];
    if dim == 0 {
        return out;
    }
    'outer: loop {
        let p: Vec<f64> = idx.iter().map(|&v| v as f64 * spacing).collect();
        if p.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            out.push(p);
        }
        for i in (0..dim).rev() {
            idx[i] += 1;
            if idx[i] <= steps {
                continue 'outer;
            }
            idx[i] = -steps;
        }
        break;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{build_cluster, ClusterSpec};
    use crate::exact::mat::FeMat;
    use crate::presets;

    fn m55(alpha: FieldElement, beta: FieldElement, gamma: FieldElement) -> FeMat {
        // circulant-symmetric 5x5 pattern [alpha beta gamma gamma beta]
        let pat = [alpha, beta.clone(), gamma.clone(), gamma, beta];
        FeMat::from_rows(
            (0..5)
                .map(|i| (0..5).map(|j| pat[(j + 5 - i) % 5].clone()).collect())
                .collect(),
        )
    }

    fn square_cluster() -> GCluster {
        let fe = FieldElement::from_integer;
        let rot = FeMat::from_rows(vec![vec![fe(0), fe(-1)], vec![fe(1), fe(0)]]);
        let refl = FeMat::from_rows(vec![vec![fe(1), fe(0)], vec![fe(0), fe(-1)]]);
        build_cluster(&ClusterSpec::new(
            2,
            1,
            vec![rot, refl],
            vec![vec![fe(1), fe(0)]],
        ))
        .unwrap()
    }

    #[test]
    fn kappa_squared_values() {
        let d10 = presets::cluster("d10-penrose").unwrap();
        assert_eq!(kappa_squared(&d10), FieldElement::ratio(5, 2));
        assert_eq!(kappa_squared(&square_cluster()), FieldElement::from_integer(1));
        let d12 = presets::cluster("d12").unwrap();
        assert_eq!(kappa_squared(&d12), FieldElement::from_integer(3));
    }

    #[test]
    fn d10_projectors_match_circulant_form() {
        let d = decompose(&presets::cluster("d10-penrose").unwrap()).unwrap();
        let tau = FieldElement::tau(20);
        let taup = FieldElement::one_in(20).sub(&tau);
        let fifth = FieldElement::ratio(1, 5);
        let two_fifths = FieldElement::ratio(2, 5);
        let want_pi = m55(
            two_fifths.clone(),
            taup.neg().scale(&FieldElement::ratio(1, 5).to_rational().unwrap()),
            tau.neg().scale(&FieldElement::ratio(1, 5).to_rational().unwrap()),
        );
        assert_eq!(d.pi, want_pi);
        let want_pip = m55(
            two_fifths,
            tau.neg().scale(&fifth.to_rational().unwrap()),
            taup.neg().scale(&fifth.to_rational().unwrap()),
        );
        assert_eq!(d.pi_prime, want_pip);
        let want_pidp = m55(fifth.clone(), fifth.clone(), fifth);
        assert_eq!(qmat_to_femat(&d.pi_dprime), want_pidp);
        assert_eq!(d.dims, Dims { physical: 2, dense: 2, lattice: 1 });
        assert_eq!(d.kappa_sq, FieldElement::ratio(5, 2));
    }

    #[test]
    fn square_cluster_is_discrete() {
        let d = decompose(&square_cluster()).unwrap();
        assert_eq!(d.dims, Dims { physical: 2, dense: 0, lattice: 0 });
        assert_eq!(d.classification(), Classification::Discrete);
        assert!(d.pi_prime.is_zero());
        assert!(d.pi_dprime.is_zero());
    }

    #[test]
    fn d8_has_trivial_relations() {
        let d = decompose(&presets::cluster("d8").unwrap()).unwrap();
        assert_eq!(d.dims, Dims { physical: 2, dense: 2, lattice: 0 });
        assert_eq!(d.relations.rank(), 0);
        assert!(d.pi_dprime.is_zero());
        assert_eq!(d.classification(), Classification::Dense);
        // diagonal 1/2 circulant
        assert_eq!(d.pi[(0, 0)], FieldElement::ratio(1, 2));
    }

    #[test]
    fn d12_and_two_shell_dims() {
        let d = decompose(&presets::cluster("d12").unwrap()).unwrap();
        assert_eq!(d.dims, Dims { physical: 2, dense: 2, lattice: 2 });
        let d = decompose(&presets::cluster("d10-two-shell").unwrap()).unwrap();
        assert_eq!(d.dims, Dims { physical: 2, dense: 2, lattice: 6 });
        let d = decompose(&presets::cluster("icosahedral").unwrap()).unwrap();
        assert_eq!(d.dims, Dims { physical: 3, dense: 3, lattice: 0 });
    }

    #[test]
    fn coset_index_is_coordinate_sum_for_d10() {
        let d = decompose(&presets::cluster("d10-penrose").unwrap()).unwrap();
        assert_eq!(d.coset_index(&[0, 0, 0, 0, 0]), vec![0]);
        assert_eq!(d.coset_index(&[1, 0, 0, 0, 0]), vec![1]);
        assert_eq!(d.coset_index(&[1, 1, 1, 0, 0]), vec![3]);
        assert_eq!(d.coset_index(&[2, -1, 4, 0, -3]), vec![2]);
    }

    #[test]
    fn physical_identity_for_random_m() {
        // pi(m) pushed back to physical coordinates equals sum m_i e_i
        let d = decompose(&presets::cluster("d10-penrose").unwrap()).unwrap();
        let m = [3i64, -1, 0, 2, 5];
        let phys = d.physical_exact(&m);
        // coords of pi(m) in the orthonormal E basis, rescaled by kappa:
        // <pi m, u_j>/|u_j| = <m, u_j>/kappa since u_j spans E
        // easier exact check: <pi m - something> ... use the Gram identity
        // ||sum m_i e_i||^2 computed two ways
        let n2 = d.physical_norm_sq_exact(&m);
        let mut direct = FieldElement::zero_in(1);
        for c in &phys {
            direct = direct.add(&c.mul(c));
        }
        assert_eq!(n2, direct);
    }

    #[test]
    fn star_map_basics() {
        let d = decompose(&presets::cluster("d10-penrose").unwrap()).unwrap();
        let (coords, exact) = d.star_map(&[0; 5]);
        assert!(coords.iter().all(|&c| c == 0.0));
        assert!(exact.iter().all(|fe| fe.is_zero()));
        // a relation vector is killed by the star map
        let (coords, exact) = d.star_map(&[1, 1, 1, 1, 1]);
        assert!(coords.iter().all(|&c| c.abs() < 1e-12));
        assert!(exact.iter().all(|fe| fe.is_zero()));
        // pentagon vertex: |pi' eps_1| = sqrt(2/5)
        let (coords, _) = d.star_map(&[1, 0, 0, 0, 0]);
        let norm: f64 = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        assert!((norm - (0.4f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn scheme_check_d10() {
        let d = decompose(&presets::cluster("d10-penrose").unwrap()).unwrap();
        let r = scheme_check(&d, 3).unwrap();
        assert!(r.injectivity_ok);
        assert!(r.density_diagnostic.max_gap > 0.0);
        let r8 = scheme_check(&d, 6).unwrap();
        assert!(r8.density_diagnostic.max_gap < r.density_diagnostic.max_gap);
        // discrete input rejected
        let sq = decompose(&square_cluster()).unwrap();
        assert!(matches!(
            scheme_check(&sq, 3),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn permuted_indexing_conjugates_projectors() {
        // uniqueness of the split: permuting the cluster indexing permutes
        // the projector matrices accordingly
        let spec = presets::cluster_spec("d10-penrose").unwrap();
        let mut spec2 = spec.clone();
        let v = spec.explicit_vectors.clone().unwrap();
        let perm = [2usize, 0, 4, 1, 3];
        spec2.explicit_vectors = Some(perm.iter().map(|&i| v[i].clone()).collect());
        let d1 = decompose(&build_cluster(&spec).unwrap()).unwrap();
        let d2 = decompose(&build_cluster(&spec2).unwrap()).unwrap();
        for a in 0..5 {
            for b in 0..5 {
                assert_eq!(d2.pi[(a, b)], d1.pi[(perm[a], perm[b])]);
                assert_eq!(d2.pi_prime[(a, b)], d1.pi_prime[(perm[a], perm[b])]);
            }
        }
    }
}
