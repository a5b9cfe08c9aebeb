//! G-clusters: finite origin-symmetric orbit unions {±e_1, ..., ±e_k}
//! together with the signed-permutation action of each group generator.

use crate::error::{Error, Result};
use crate::exact::mat::FeMat;
use crate::exact::FieldElement;
use num_rational::BigRational;
use std::collections::HashMap;

/// How a generator permutes the antipodal pairs: g e_j = sign[g(j)] * e_{g(j)}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedPermutation {
    /// perm[j] = image index g(j), 0-based.
    pub perm: Vec<usize>,
    /// signs[i] = s_i, the sign attached to target index i.
    pub signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn identity(k: usize) -> Self {
        SignedPermutation {
            perm: (0..k).collect(),
            signs: vec![1; k],
        }
    }

    /// Matrix of the induced action x_i -> s_i x_{g^-1(i)} on R^k; entries
    /// in {-1, 0, 1}, always orthogonal.
    pub fn induced_matrix(&self) -> Vec<Vec<i8>> {
        let k = self.perm.len();
        let mut m = vec![vec![0i8; k]; k];
        for j in 0..k {
            m[self.perm[j]][j] = self.signs[self.perm[j]];
        }
        m
    }

    pub fn compose(&self, other: &Self) -> Self {
        // (self . other)(j): apply other first, then self
        let k = self.perm.len();
        let mut perm = vec![0usize; k];
        let mut signs = vec![1i8; k];
        for j in 0..k {
            let mid = other.perm[j];
            let dst = self.perm[mid];
            perm[j] = dst;
            signs[dst] = other.signs[mid] * self.signs[dst];
        }
        SignedPermutation { perm, signs }
    }
}

/// Specification of a cluster build: group generators as exact orthogonal
/// matrices, seed points, and optionally an explicit indexed vector list
/// (used by presets that pin a particular indexing convention).
#[derive(Clone, Debug)]
pub struct ClusterSpec {
    pub physical_dim: usize,
    pub conductor: u32,
    pub generators: Vec<FeMat>,
    pub seeds: Vec<Vec<FieldElement>>,
    pub explicit_vectors: Option<Vec<Vec<FieldElement>>>,
    /// Cap on orbit closure, guards against non-finite generator sets.
    pub orbit_cap: usize,
}

impl ClusterSpec {
    pub fn new(
        physical_dim: usize,
        conductor: u32,
        generators: Vec<FeMat>,
        seeds: Vec<Vec<FieldElement>>,
    ) -> Self {
        ClusterSpec {
            physical_dim,
            conductor,
            generators,
            seeds,
            explicit_vectors: None,
            orbit_cap: 10_000,
        }
    }
}

/// The built cluster: vectors e_1..e_k (one per antipodal pair) and each
/// generator with its extracted signed permutation.
#[derive(Clone, Debug)]
pub struct GCluster {
    pub physical_dim: usize,
    pub conductor: u32,
    pub vectors: Vec<Vec<FieldElement>>,
    pub generators: Vec<(FeMat, SignedPermutation)>,
    pub seeds: Vec<Vec<FieldElement>>,
    /// Start index of each seed's shell within `vectors` (explicit lists
    /// count as one shell).
    pub shell_starts: Vec<usize>,
}

impl GCluster {
    pub fn k(&self) -> usize {
        self.vectors.len()
    }

    /// Doubles shadow of the cluster vectors (row per vector).
    pub fn vectors_f64(&self) -> Vec<Vec<f64>> {
        self.vectors
            .iter()
            .map(|v| v.iter().map(|fe| fe.to_f64()).collect())
            .collect()
    }
}

fn fe_vec_eq(a: &[FieldElement], b: &[FieldElement]) -> bool {
    a.iter().zip(b).all(|(x, y)| x == y)
}

fn fe_vec_neg(a: &[FieldElement]) -> Vec<FieldElement> {
    a.iter().map(|x| x.neg()).collect()
}

fn is_zero_vec(a: &[FieldElement]) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// Deterministic exact comparison of point coordinates: interval fast path
/// at 128 bits, exact sign on overlap.
fn cmp_points(a: &[FieldElement], b: &[FieldElement]) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    for (x, y) in a.iter().zip(b) {
        if x == y {
            continue;
        }
        let d = x.sub(y);
        if let Ok(iv) = d.embed(128) {
            if let Some(s) = iv.definite_sign() {
                return if s > 0 { Ordering::Greater } else { Ordering::Less };
            }
        }
        let s = d.sign().expect("cluster coordinates must be real");
        return if s > 0 { Ordering::Greater } else { Ordering::Less };
    }
    Ordering::Equal
}

/// Hashable float key for orbit dedup buckets; exact comparison decides
/// within a bucket.
fn bucket_key(v: &[FieldElement]) -> Vec<i64> {
    v.iter()
        .map(|fe| (fe.to_f64() * 1e6).round() as i64)
        .collect()
}

struct PointSet {
    points: Vec<Vec<FieldElement>>,
    buckets: HashMap<Vec<i64>, Vec<usize>>,
}

impl PointSet {
    fn new() -> Self {
        PointSet {
            points: vec![],
            buckets: HashMap::new(),
        }
    }

    fn find(&self, v: &[FieldElement]) -> Option<usize> {
        self.buckets
            .get(&bucket_key(v))?
            .iter()
            .copied()
            .find(|&i| fe_vec_eq(&self.points[i], v))
    }

    fn insert(&mut self, v: Vec<FieldElement>) -> bool {
        if self.find(&v).is_some() {
            return false;
        }
        let key = bucket_key(&v);
        self.buckets.entry(key).or_default().push(self.points.len());
        self.points.push(v);
        true
    }
}

fn apply_generator(g: &FeMat, v: &[FieldElement]) -> Vec<FieldElement> {
    g.mul_vec(v)
}

fn check_orthogonal(g: &FeMat, index: usize) -> Result<()> {
    for i in 0..g.rows {
        for j in 0..g.cols {
            if !g[(i, j)].is_real() {
                return Err(Error::NonOrthogonalGenerator { index });
            }
        }
    }
    let gt = g.transpose();
    let prod = gt.matmul(g);
    let id = FeMat::identity(g.rows);
    if prod != id {
        return Err(Error::NonOrthogonalGenerator { index });
    }
    Ok(())
}

/// Orbit of the seeds and their antipodes under the generated group,
/// closed by repeated application of the generators.
fn orbit_closure(spec: &ClusterSpec, seeds: &[Vec<FieldElement>]) -> Result<Vec<Vec<FieldElement>>> {
    let mut set = PointSet::new();
    let mut frontier: Vec<Vec<FieldElement>> = vec![];
    for s in seeds {
        if is_zero_vec(s) {
            return Err(Error::BadConfig("seed points must be nonzero".into()));
        }
        for p in [s.clone(), fe_vec_neg(s)] {
            if set.insert(p.clone()) {
                frontier.push(p);
            }
        }
    }
    while let Some(p) = frontier.pop() {
        for (_gi, g) in spec.generators.iter().enumerate() {
            let q = apply_generator(g, &p);
            if set.insert(q.clone()) {
                if set.points.len() > spec.orbit_cap {
                    return Err(Error::OrbitCapExceeded { cap: spec.orbit_cap });
                }
                frontier.push(q);
            }
        }
    }
    Ok(set.points)
}

/// Pair antipodes and pick representatives: the lexicographically greater
/// member of each pair, then index representatives in descending
/// lexicographic order of their embedded coordinates.
fn canonical_representatives(points: &[Vec<FieldElement>]) -> Result<Vec<Vec<FieldElement>>> {
    let mut reps: Vec<Vec<FieldElement>> = vec![];
    let mut used = vec![false; points.len()];
    for i in 0..points.len() {
        if used[i] {
            continue;
        }
        let neg = fe_vec_neg(&points[i]);
        let j = points
            .iter()
            .position(|p| fe_vec_eq(p, &neg))
            .ok_or_else(|| {
                Error::InvariantViolation("orbit is not symmetric about the origin".into())
            })?;
        if j == i {
            return Err(Error::InvariantViolation(
                "orbit point equals its own antipode".into(),
            ));
        }
        used[i] = true;
        used[j] = true;
        let rep = if cmp_points(&points[i], &points[j]) == std::cmp::Ordering::Greater {
            points[i].clone()
        } else {
            points[j].clone()
        };
        reps.push(rep);
    }
    reps.sort_by(|a, b| cmp_points(b, a));
    Ok(reps)
}

/// Extract the signed permutation of a generator on an indexed vector list.
fn extract_signed_permutation(
    g: &FeMat,
    vectors: &[Vec<FieldElement>],
    index: usize,
) -> Result<SignedPermutation> {
    let k = vectors.len();
    let mut perm = vec![usize::MAX; k];
    let mut signs = vec![0i8; k];
    for (j, v) in vectors.iter().enumerate() {
        let img = apply_generator(g, v);
        let mut found = false;
        for (i, w) in vectors.iter().enumerate() {
            if fe_vec_eq(&img, w) {
                perm[j] = i;
                if signs[i] != 0 && signs[i] != 1 {
                    return Err(Error::NotSignedPermutation { index });
                }
                signs[i] = 1;
                found = true;
                break;
            }
            if fe_vec_eq(&img, &fe_vec_neg(w)) {
                perm[j] = i;
                if signs[i] != 0 && signs[i] != -1 {
                    return Err(Error::NotSignedPermutation { index });
                }
                signs[i] = -1;
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::NotSignedPermutation { index });
        }
    }
    // must be a bijection
    let mut seen = vec![false; k];
    for &p in &perm {
        if p == usize::MAX || seen[p] {
            return Err(Error::NotSignedPermutation { index });
        }
        seen[p] = true;
    }
    Ok(SignedPermutation { perm, signs })
}

/// Build the cluster: orbit closure, antipodal pairing, deterministic
/// indexing (or the explicit preset indexing), and signed-permutation
/// extraction for every generator.
pub fn build_cluster(spec: &ClusterSpec) -> Result<GCluster> {
    for (i, g) in spec.generators.iter().enumerate() {
        if g.rows != spec.physical_dim || g.cols != spec.physical_dim {
            return Err(Error::BadConfig(format!(
                "generator {i} has shape {}x{}, expected {0}x{0}",
                g.rows, g.cols
            )));
        }
        check_orthogonal(g, i)?;
    }
    if spec.seeds.is_empty() {
        return Err(Error::BadConfig("at least one seed point required".into()));
    }
    for s in &spec.seeds {
        if s.len() != spec.physical_dim {
            return Err(Error::BadConfig("seed dimension mismatch".into()));
        }
    }

    let (vectors, shell_starts) = if let Some(explicit) = &spec.explicit_vectors {
        // Validate the explicit list: the full +/- point set must equal the
        // orbit closure of the seeds, and no two entries may coincide or be
        // antipodal.
        for (a_idx, a) in explicit.iter().enumerate() {
            for b in explicit.iter().skip(a_idx + 1) {
                if fe_vec_eq(a, b) || fe_vec_eq(a, &fe_vec_neg(b)) {
                    return Err(Error::InvariantViolation(
                        "explicit vectors contain an equal or antipodal pair".into(),
                    ));
                }
            }
        }
        let orbit = orbit_closure(spec, &spec.seeds)?;
        let mut full = PointSet::new();
        for v in explicit {
            full.insert(v.clone());
            full.insert(fe_vec_neg(v));
        }
        if orbit.len() != full.points.len()
            || orbit.iter().any(|p| full.find(p).is_none())
        {
            return Err(Error::InvariantViolation(
                "explicit vectors do not enumerate the seed orbit".into(),
            ));
        }
        (explicit.clone(), vec![0])
    } else {
        // per-seed shells, each canonically indexed
        let mut vectors: Vec<Vec<FieldElement>> = vec![];
        let mut shell_starts = vec![];
        let mut covered = PointSet::new();
        for seed in &spec.seeds {
            if covered.find(seed).is_some() {
                continue; // seed already inside an earlier shell
            }
            shell_starts.push(vectors.len());
            let orbit = orbit_closure(spec, std::slice::from_ref(seed))?;
            for p in &orbit {
                if covered.find(p).is_some() {
                    return Err(Error::BadConfig(
                        "seed shells overlap; drop the redundant seed".into(),
                    ));
                }
            }
            for p in &orbit {
                covered.insert(p.clone());
            }
            vectors.extend(canonical_representatives(&orbit)?);
        }
        (vectors, shell_starts)
    };

    let mut generators = vec![];
    for (i, g) in spec.generators.iter().enumerate() {
        let sp = extract_signed_permutation(g, &vectors, i)?;
        generators.push((g.clone(), sp));
    }

    Ok(GCluster {
        physical_dim: spec.physical_dim,
        conductor: spec.conductor,
        vectors,
        generators,
        seeds: spec.seeds.clone(),
        shell_starts,
    })
}

/// Re-derive the signed permutation of one generator of a built cluster.
pub fn signed_permutation_of(cluster: &GCluster, generator_index: usize) -> Result<SignedPermutation> {
    let (g, _) = cluster
        .generators
        .get(generator_index)
        .ok_or_else(|| Error::BadConfig(format!("no generator {generator_index}")))?;
    extract_signed_permutation(g, &cluster.vectors, generator_index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn square_spec() -> ClusterSpec {
        let fe = FieldElement::from_integer;
        let rot = FeMat::from_rows(vec![
            vec![fe(0), fe(-1)],
            vec![fe(1), fe(0)],
        ]);
        let refl = FeMat::from_rows(vec![
            vec![fe(1), fe(0)],
            vec![fe(0), fe(-1)],
        ]);
        ClusterSpec::new(2, 1, vec![rot, refl], vec![vec![fe(1), fe(0)]])
    }

    #[test]
    fn square_cluster() {
        let c = build_cluster(&square_spec()).unwrap();
        assert_eq!(c.k(), 2);
        assert_eq!(c.vectors[0], vec![FieldElement::from_integer(1), FieldElement::from_integer(0)]);
        assert_eq!(c.vectors[1], vec![FieldElement::from_integer(0), FieldElement::from_integer(1)]);
    }

    #[test]
    fn square_determinism() {
        let a = build_cluster(&square_spec()).unwrap();
        let b = build_cluster(&square_spec()).unwrap();
        assert_eq!(a.vectors, b.vectors);
        for ((_, sa), (_, sb)) in a.generators.iter().zip(&b.generators) {
            assert_eq!(sa, sb);
        }
    }

    #[test]
    fn d10_signed_permutations_match_convention() {
        let c = presets::cluster("d10-penrose").unwrap();
        assert_eq!(c.k(), 5);
        // rotation by pi/5 acts as (x1..x5) -> (-x3,-x4,-x5,-x1,-x2)
        let (_, a) = &c.generators[0];
        assert_eq!(a.perm, vec![3, 4, 0, 1, 2]);
        assert_eq!(a.signs, vec![-1, -1, -1, -1, -1]);
        let m = a.induced_matrix();
        assert_eq!(m[0], vec![0, 0, -1, 0, 0]);
        assert_eq!(m[3], vec![-1, 0, 0, 0, 0]);
        // reflection acts as (x1, x5, x4, x3, x2)
        let (_, b) = &c.generators[1];
        assert_eq!(b.perm, vec![0, 4, 3, 2, 1]);
        assert_eq!(b.signs, vec![1, 1, 1, 1, 1]);
    }

    #[test]
    fn d12_has_six_pairs() {
        let c = presets::cluster("d12").unwrap();
        assert_eq!(c.k(), 6);
        // e_j at angles (j-1) pi/6
        for (j, v) in c.vectors.iter().enumerate() {
            let want = (j as f64) * std::f64::consts::PI / 6.0;
            let x = v[0].to_f64();
            let y = v[1].to_f64();
            assert!((x - want.cos()).abs() < 1e-12);
            assert!((y - want.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn icosahedral_orbit() {
        let c = presets::cluster("icosahedral").unwrap();
        assert_eq!(c.k(), 6);
        assert_eq!(c.physical_dim, 3);
        // all vectors have squared norm 2 + tau
        let want = FieldElement::tau(5).add(&FieldElement::from_integer(2));
        for v in &c.vectors {
            let n2 = v.iter().fold(FieldElement::zero_in(1), |acc, x| acc.add(&x.mul(x)));
            assert_eq!(n2, want);
        }
    }

    #[test]
    fn identity_generator_is_identity_perm() {
        let mut spec = square_spec();
        spec.generators.push(FeMat::identity(2));
        let c = build_cluster(&spec).unwrap();
        let (_, sp) = &c.generators[2];
        assert_eq!(*sp, SignedPermutation::identity(2));
    }

    #[test]
    fn central_inversion_is_all_minus() {
        let mut spec = square_spec();
        let fe = FieldElement::from_integer;
        spec.generators.push(FeMat::from_rows(vec![
            vec![fe(-1), fe(0)],
            vec![fe(0), fe(-1)],
        ]));
        let c = build_cluster(&spec).unwrap();
        let (_, sp) = &c.generators[2];
        assert_eq!(sp.perm, vec![0, 1]);
        assert_eq!(sp.signs, vec![-1, -1]);
    }

    #[test]
    fn non_orthogonal_generator_rejected() {
        let fe = FieldElement::from_integer;
        let bad = FeMat::from_rows(vec![vec![fe(2), fe(0)], vec![fe(0), fe(1)]]);
        let spec = ClusterSpec::new(2, 1, vec![bad], vec![vec![fe(1), fe(0)]]);
        assert!(matches!(
            build_cluster(&spec),
            Err(Error::NonOrthogonalGenerator { index: 0 })
        ));
    }

    #[test]
    fn signed_perm_homomorphism_on_words() {
        let c = presets::cluster("d10-penrose").unwrap();
        let (ga, sa) = &c.generators[0];
        let (gb, sb) = &c.generators[1];
        // matrix(a.b) == matrix(a) * matrix(b)
        let sab = extract_signed_permutation(&ga.matmul(gb), &c.vectors, 0).unwrap();
        let ma = sa.induced_matrix();
        let mb = sb.induced_matrix();
        let mab = sab.induced_matrix();
        let k = c.k();
        for i in 0..k {
            for j in 0..k {
                let mut acc = 0i32;
                for l in 0..k {
                    acc += ma[i][l] as i32 * mb[l][j] as i32;
                }
                assert_eq!(acc, mab[i][j] as i32);
            }
        }
        // compose() agrees with matrix composition
        assert_eq!(sa.compose(sb).induced_matrix(), mab);
    }

    #[test]
    fn orbit_cap_triggers() {
        // the 3-4-5 rotation is orthogonal with rational entries but has
        // infinite order, so orbit closure can never stabilize
        let rot = FeMat::from_rows(vec![
            vec![FieldElement::ratio(3, 5), FieldElement::ratio(-4, 5)],
            vec![FieldElement::ratio(4, 5), FieldElement::ratio(3, 5)],
        ]);
        let fe = FieldElement::from_integer;
        let mut spec = ClusterSpec::new(2, 1, vec![rot], vec![vec![fe(1), fe(0)]]);
        spec.orbit_cap = 500;
        assert!(matches!(
            build_cluster(&spec),
            Err(Error::OrbitCapExceeded { cap: 500 })
        ));
    }
}
