//! Built-in cluster definitions.
//!
//! The dihedral presets pin the vector indexing explicitly (circular order
//! of the one-shell roots) so that the projector matrices come out in their
//! standard circulant form; the icosahedral preset exercises the automatic
//! orbit indexing.

use crate::cluster::{build_cluster, ClusterSpec, GCluster};
use crate::error::{Error, Result};
use crate::exact::mat::FeMat;
use crate::exact::FieldElement;

pub const PRESET_NAMES: [&str; 5] = ["d8", "d10-penrose", "d10-two-shell", "d12", "icosahedral"];

fn rotation(j: i64, n: u32) -> FeMat {
    let c = FieldElement::cos_2pi(j, n);
    let s = FieldElement::sin_2pi(j, n);
    FeMat::from_rows(vec![vec![c.clone(), s.neg()], vec![s, c]])
}

fn x_axis_reflection() -> FeMat {
    let fe = FieldElement::from_integer;
    FeMat::from_rows(vec![vec![fe(1), fe(0)], vec![fe(0), fe(-1)]])
}

fn unit_vector_at(j: i64, n: u32) -> Vec<FieldElement> {
    vec![FieldElement::cos_2pi(j, n), FieldElement::sin_2pi(j, n)]
}

/// Dihedral one-shell spec: rotation by 2 pi / order plus the x-axis
/// reflection, seed (1,0). `rep_step` fixes the pinned indexing: e_j sits
/// at angle 2 pi * j * rep_step / conductor.
fn dihedral_one_shell(order: u32, conductor: u32, rep_step: i64) -> ClusterSpec {
    let k = order / 2;
    let step = (conductor / order) as i64; // rotation angle in conductor units
    let gens = vec![rotation(step, conductor), x_axis_reflection()];
    let seeds = vec![unit_vector_at(0, conductor)];
    let explicit = (0..k as i64)
        .map(|j| unit_vector_at(j * rep_step, conductor))
        .collect();
    let mut spec = ClusterSpec::new(2, conductor, gens, seeds);
    spec.explicit_vectors = Some(explicit);
    spec
}

fn d10_two_shell() -> ClusterSpec {
    let tau = FieldElement::tau(20);
    let gens = vec![rotation(2, 20), x_axis_reflection()];
    let shell2_seed: Vec<FieldElement> = unit_vector_at(2, 20)
        .into_iter()
        .map(|c| c.mul(&tau))
        .collect();
    let seeds = vec![unit_vector_at(0, 20), shell2_seed];
    // shell 1: fifth roots in circular order; shell 2: tau-scaled roots at
    // the half-step angles, also circular
    let mut explicit: Vec<Vec<FieldElement>> =
        (0..5).map(|j| unit_vector_at(4 * j, 20)).collect();
    for j in 0..5 {
        explicit.push(
            unit_vector_at(4 * j + 2, 20)
                .into_iter()
                .map(|c| c.mul(&tau))
                .collect(),
        );
    }
    let mut spec = ClusterSpec::new(2, 20, gens, seeds);
    spec.explicit_vectors = Some(explicit);
    spec
}

fn icosahedral() -> ClusterSpec {
    let fe = FieldElement::from_integer;
    let tau = FieldElement::tau(5);
    let half = FieldElement::ratio(1, 2);
    let tau_m1 = tau.sub(&fe(1));
    // order-5 rotation about the (0, 1, tau) axis
    let g5 = FeMat::from_rows(vec![
        vec![tau_m1.mul(&half), tau.neg().mul(&half), half.clone()],
        vec![tau.mul(&half), half.clone(), tau_m1.mul(&half)],
        vec![half.neg(), tau_m1.mul(&half), tau.mul(&half)],
    ]);
    // order-3 rotation: cyclic coordinate shift (x,y,z) -> (z,x,y)
    let cyc = FeMat::from_rows(vec![
        vec![fe(0), fe(0), fe(1)],
        vec![fe(1), fe(0), fe(0)],
        vec![fe(0), fe(1), fe(0)],
    ]);
    let seeds = vec![vec![fe(0), fe(1), tau]];
    ClusterSpec::new(3, 5, vec![g5, cyc], seeds)
}

/// The cluster specification for a named preset.
pub fn cluster_spec(name: &str) -> Result<ClusterSpec> {
    match name {
        // eighth roots, representatives on the upper half turn
        "d8" => Ok(dihedral_one_shell(8, 8, 1)),
        // fifth roots in circular order: the circulant projector convention
        "d10-penrose" => Ok(dihedral_one_shell(10, 20, 4)),
        "d10-two-shell" => Ok(d10_two_shell()),
        "d12" => Ok(dihedral_one_shell(12, 12, 1)),
        "icosahedral" => Ok(icosahedral()),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

/// Build the named preset cluster.
pub fn cluster(name: &str) -> Result<GCluster> {
    build_cluster(&cluster_spec(name)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_build() {
        for name in PRESET_NAMES {
            let c = cluster(name).unwrap();
            let expected_k = match name {
                "d8" => 4,
                "d10-penrose" => 5,
                "d10-two-shell" => 10,
                "d12" => 6,
                "icosahedral" => 6,
                _ => unreachable!(),
            };
            assert_eq!(c.k(), expected_k, "preset {name}");
        }
        assert!(matches!(
            cluster_spec("unknown"),
            Err(Error::UnknownPreset(_))
        ));
    }

    #[test]
    fn d10_vectors_are_fifth_roots() {
        let c = cluster("d10-penrose").unwrap();
        for (j, v) in c.vectors.iter().enumerate() {
            let ang = 2.0 * std::f64::consts::PI * (j as f64) / 5.0;
            assert!((v[0].to_f64() - ang.cos()).abs() < 1e-12);
            assert!((v[1].to_f64() - ang.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn two_shell_second_shell_is_sum_of_neighbours() {
        // tau * zeta_10^(2j+1) = zeta_5^j + zeta_5^(j+1): each outer vector
        // is the sum of two adjacent inner ones
        let c = cluster("d10-two-shell").unwrap();
        for j in 0..5usize {
            let outer = &c.vectors[5 + j];
            let a = &c.vectors[j];
            let b = &c.vectors[(j + 1) % 5];
            for t in 0..2 {
                assert_eq!(outer[t], a[t].add(&b[t]), "shell relation at {j}");
            }
        }
    }
}
