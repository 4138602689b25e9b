mod common;

use common::transposition_sign;
use egqft::fock::DiscreteKernel;
use egqft::grassmann::graded_permutation_sign;
use egqft::induction::sequence_sign;
use egqft::splitting::{split, LineDistribution, SplitSpec};
use num_complex::Complex64;
use proptest::prelude::*;

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sequence_sign_counts_odd_transpositions(
        perm in (1usize..8).prop_flat_map(permutation),
        odd in proptest::collection::vec(any::<bool>(), 8),
    ) {
        prop_assert_eq!(sequence_sign(&perm, &odd) as i64, transposition_sign(&perm, &odd));
    }

    #[test]
    fn graded_sign_is_multiplicative(
        (p, q) in (1usize..7).prop_flat_map(|n| (permutation(n), permutation(n))),
        odd in proptest::collection::vec(any::<bool>(), 7),
    ) {
        let n = p.len();
        let odd = &odd[..n];
        // target[i] names the source position placed at i; compose p then q
        let pq: Vec<usize> = q.iter().map(|&i| p[i]).collect();
        let odd_after_p: Vec<bool> = p.iter().map(|&i| odd[i]).collect();
        let lhs = graded_permutation_sign(&pq, odd);
        let rhs = graded_permutation_sign(&p, odd) * graded_permutation_sign(&q, &odd_after_p);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn kernel_adjoint_is_an_involution(
        l in 0usize..3,
        m in 0usize..3,
        seed in any::<u64>(),
    ) {
        let k = DiscreteKernel::from_fn(l, m, 3, |t| {
            let h = t.iter().fold(seed, |acc, &x| acc.wrapping_mul(6364136223846793005).wrapping_add(x as u64 + 1));
            Complex64::new((h % 1000) as f64 / 500.0 - 1.0, ((h >> 20) % 1000) as f64 / 500.0 - 1.0)
        });
        prop_assert_eq!(k.adjoint().adjoint(), k);
    }

    #[test]
    fn unique_split_is_linear(a in -2.0f64..2.0, x in -4.0f64..4.0) {
        let d = LineDistribution::toy("sign_exp").unwrap();
        let scaled = {
            let d2 = d.clone();
            LineDistribution::general(move |w| d2.eval(w) * a, -1, vec![])
        };
        let r1 = split(&d, &SplitSpec::unique(-1)).unwrap().retarded(x).unwrap();
        let r2 = split(&scaled, &SplitSpec::unique(-1)).unwrap().retarded(x).unwrap();
        prop_assert!((r2 - r1 * a).norm() <= 1e-10);
    }
}
