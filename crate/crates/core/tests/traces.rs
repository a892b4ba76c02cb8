use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use u3cert::matgroup::{adjoint_matrix, su3_generators, Mat3};
use u3cert::traces::{kronecker_twist_trace, tensor_trace};

/// Random products of generators, i.e. random elements of SU₃(q).
fn random_elements(q: u32, count: usize, seed: u64) -> Vec<Mat3> {
    let gens = su3_generators(q).unwrap();
    let f = gens.tower().ext().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..20).fold(Mat3::IDENTITY, |acc, _| {
                acc.mul(&gens.matrices()[rng.gen_range(0..gens.len())], &f)
            })
        })
        .collect()
}

#[test]
fn kronecker_product_of_twists_matches_trace_power() {
    let gens = su3_generators(8).unwrap();
    let tower = gens.tower().clone();
    let e = tower.ext();
    for u in random_elements(8, 10, 11) {
        let adj = adjoint_matrix(e, &u).unwrap();
        let t = adj.trace();
        // the adjoint trace is |tr u|² + 1, which lies in GF(q)
        let d = u.trace(e);
        assert_eq!(t, e.pow(d, 9) ^ 1);
        assert!(tower.restrict_raw(t).is_some());
        let direct = kronecker_twist_trace(e, &adj, &[0, 1]);
        assert_eq!(direct, e.pow(t, 3));
        let via = tensor_trace(&tower, e.elem(t).unwrap(), &[0, 1]).unwrap();
        assert_eq!(e.check(via).unwrap(), direct);
        assert_eq!(kronecker_twist_trace(e, &adj, &[0]), t);
        assert_eq!(kronecker_twist_trace(e, &adj, &[2]), e.pow(t, 4));
    }
}
