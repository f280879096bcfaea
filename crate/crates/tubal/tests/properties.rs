//! Randomized structural properties of the public API.
//!
//! Each property states an algebraic law the implementation must satisfy
//! on arbitrary small inputs, with an independent oracle wherever the law
//! has one (direct circular convolution for the product, entrywise sums
//! for inner products, bit comparison for file round trips).

use proptest::prelude::*;
use tubal::{
    bernoulli_mask, fft3, ifft3, inner_product, p_omega, p_t, p_t_perp, r_omega, read_tensor,
    reshape_from_3d, reshape_to_3d, t_product, t_svd, t_svd_reduced, t_transpose, tnn,
    write_tensor, identity_tensor, TangentSpace, Tensor3,
};

/// Direct tube-wise circular convolution, the definition the transform
/// route must reproduce.
fn conv_product(a: &Tensor3, b: &Tensor3) -> Tensor3 {
    let (n1, n2, n3) = a.dims();
    let n4 = b.n2();
    Tensor3::from_fn(n1, n4, n3, |i, j, k| {
        let mut sum = 0.0;
        for l in 0..n2 {
            for t in 0..n3 {
                sum += a.get(i, l, t) * b.get(l, j, (k + n3 - t) % n3);
            }
        }
        sum
    })
}

fn tensor_strategy(n1: usize, n2: usize, n3: usize) -> impl Strategy<Value = Tensor3> {
    prop::collection::vec(-1.0f64..1.0, n1 * n2 * n3)
        .prop_map(move |data| Tensor3::new(n1, n2, n3, data).unwrap())
}

fn any_tensor() -> impl Strategy<Value = Tensor3> {
    (1usize..=6, 1usize..=6, 1usize..=5)
        .prop_flat_map(|(n1, n2, n3)| tensor_strategy(n1, n2, n3))
}

/// A pair with compatible inner dimensions for the product.
fn product_pair() -> impl Strategy<Value = (Tensor3, Tensor3)> {
    (1usize..=6, 1usize..=6, 1usize..=6, 1usize..=5).prop_flat_map(|(n1, n2, n4, n3)| {
        (tensor_strategy(n1, n2, n3), tensor_strategy(n2, n4, n3))
    })
}

/// A chainable triple for associativity.
fn product_triple() -> impl Strategy<Value = (Tensor3, Tensor3, Tensor3)> {
    (1usize..=5, 1usize..=5, 1usize..=5, 1usize..=5, 1usize..=4).prop_flat_map(
        |(n1, n2, n4, n5, n3)| {
            (
                tensor_strategy(n1, n2, n3),
                tensor_strategy(n2, n4, n3),
                tensor_strategy(n4, n5, n3),
            )
        },
    )
}

/// Relative gap between two tensors, guarded for tiny references.
fn rel_gap(x: &Tensor3, reference: f64) -> f64 {
    x.frobenius() / reference.max(1e-12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_matches_circular_convolution((a, b) in product_pair()) {
        let fast = t_product(&a, &b).unwrap();
        let slow = conv_product(&a, &b);
        prop_assert!(rel_gap(&(&fast - &slow), slow.frobenius()) <= 1e-10);
    }

    #[test]
    fn product_is_associative((a, b, c) in product_triple()) {
        let left = t_product(&t_product(&a, &b).unwrap(), &c).unwrap();
        let right = t_product(&a, &t_product(&b, &c).unwrap()).unwrap();
        prop_assert!(rel_gap(&(&left - &right), right.frobenius()) <= 1e-10);
    }

    #[test]
    fn product_distributes_over_addition(
        (a, b, c) in (1usize..=6, 1usize..=6, 1usize..=6, 1usize..=5).prop_flat_map(
            |(n1, n2, n4, n3)| (
                tensor_strategy(n1, n2, n3),
                tensor_strategy(n2, n4, n3),
                tensor_strategy(n2, n4, n3),
            ),
        ),
    ) {
        let joint = t_product(&a, &(&b + &c)).unwrap();
        let split = &t_product(&a, &b).unwrap() + &t_product(&a, &c).unwrap();
        prop_assert!(rel_gap(&(&joint - &split), split.frobenius()) <= 1e-10);
    }

    #[test]
    fn transpose_reverses_products((a, b) in product_pair()) {
        let left = t_transpose(&t_product(&a, &b).unwrap());
        let right = t_product(&t_transpose(&b), &t_transpose(&a)).unwrap();
        prop_assert!(rel_gap(&(&left - &right), right.frobenius()) <= 1e-10);
        let twice = t_transpose(&t_transpose(&a));
        prop_assert!((&twice - &a).frobenius() <= 1e-12 * a.frobenius().max(1.0));
    }

    #[test]
    fn transform_round_trips(a in any_tensor()) {
        let back = ifft3(&fft3(&a)).unwrap();
        prop_assert!(rel_gap(&(&back - &a), a.frobenius()) <= 1e-12);
    }

    #[test]
    fn parseval_holds(a in any_tensor()) {
        let f = fft3(&a);
        let spatial = a.frobenius();
        let transformed = f.frobenius() / (a.n3() as f64).sqrt();
        prop_assert!((spatial - transformed).abs() <= 1e-10 * spatial.max(1.0));
    }

    #[test]
    fn inner_product_matches_entrywise_sum((a, b) in (1usize..=6, 1usize..=6, 1usize..=5)
        .prop_flat_map(|(n1, n2, n3)| (tensor_strategy(n1, n2, n3), tensor_strategy(n1, n2, n3))))
    {
        let by_op = inner_product(&a, &b).unwrap();
        let by_sum: f64 = a.data().iter().zip(b.data()).map(|(x, y)| x * y).sum();
        prop_assert!((by_op - by_sum).abs() <= 1e-10 * by_sum.abs().max(1.0));
    }

    #[test]
    fn observation_projector_is_idempotent(
        a in any_tensor(),
        rate in 0.05f64..1.0,
        seed in 0u64..1000,
    ) {
        let (n1, n2, n3) = a.dims();
        let mask = bernoulli_mask(n1, n2, n3, rate, seed).unwrap();
        let once = p_omega(&a, &mask).unwrap();
        let twice = p_omega(&once, &mask).unwrap();
        for (x, y) in once.data().iter().zip(twice.data()) {
            prop_assert_eq!(x.to_bits(), y.to_bits());
        }
        // The rescaled observer is the projector divided by the rate.
        let rescaled = r_omega(&a, &mask).unwrap();
        let scaled_back = rescaled.scale(mask.p());
        prop_assert!((&scaled_back - &once).frobenius() <= 1e-12 * a.frobenius().max(1.0));
    }

    #[test]
    fn tsvd_reconstructs_with_orthogonal_factors(a in (2usize..=6, 2usize..=6, 1usize..=5)
        .prop_flat_map(|(n1, n2, n3)| tensor_strategy(n1, n2, n3)))
    {
        let f = t_svd(&a).unwrap();
        let rebuilt = f.reconstruct().unwrap();
        prop_assert!(rel_gap(&(&rebuilt - &a), a.frobenius()) <= 1e-8);
        let w = f.u.n2();
        let gram_u = t_product(&t_transpose(&f.u), &f.u).unwrap();
        let gram_v = t_product(&t_transpose(&f.v), &f.v).unwrap();
        let id_u = identity_tensor(w, a.n3());
        let id_v = identity_tensor(f.v.n2(), a.n3());
        prop_assert!((&gram_u - &id_u).frobenius() <= 1e-8);
        prop_assert!((&gram_v - &id_v).frobenius() <= 1e-8);
    }

    #[test]
    fn tubal_nuclear_norm_behaves_like_a_norm(
        (a, b) in (2usize..=6, 2usize..=6, 1usize..=5).prop_flat_map(|(n1, n2, n3)| {
            (tensor_strategy(n1, n2, n3), tensor_strategy(n1, n2, n3))
        }),
        c in -3.0f64..3.0,
    ) {
        let sum_norm = tnn(&(&a + &b));
        prop_assert!(sum_norm <= tnn(&a) + tnn(&b) + 1e-9);
        let scaled = tnn(&a.scale(c));
        prop_assert!((scaled - c.abs() * tnn(&a)).abs() <= 1e-9 * tnn(&a).max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tangent_projectors_decompose(
        (truth, z) in (2usize..=6, 2usize..=6, 1usize..=4).prop_flat_map(|(n1, n2, n3)| {
            (tensor_strategy(n1, n2, n3), tensor_strategy(n1, n2, n3))
        }),
        r in 1usize..=2,
    ) {
        let r = r.min(truth.n1().min(truth.n2()));
        let t = TangentSpace::new(&t_svd_reduced(&truth, r).unwrap()).unwrap();
        let on = p_t(&z, &t).unwrap();
        let off = p_t_perp(&z, &t).unwrap();
        let scale = z.frobenius().max(1.0);
        prop_assert!((&(&on + &off) - &z).frobenius() <= 1e-10 * scale);
        let on_again = p_t(&on, &t).unwrap();
        prop_assert!((&on_again - &on).frobenius() <= 1e-8 * scale);
        prop_assert!(inner_product(&on, &off).unwrap().abs() <= 1e-8 * scale * scale);
    }

    #[test]
    fn tensor_files_round_trip(a in (1usize..=5, 1usize..=5, 1usize..=4)
        .prop_flat_map(|(n1, n2, n3)| {
            prop::collection::vec(
                prop_oneof![
                    -1.0e12f64..1.0e12,
                    prop::num::f64::NORMAL,
                    Just(0.0),
                    Just(-0.0),
                ],
                n1 * n2 * n3,
            )
            .prop_map(move |d| Tensor3::new(n1, n2, n3, d).unwrap())
        }))
    {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.tsv3");
        write_tensor(&path, &a).unwrap();
        let back = read_tensor(&path).unwrap();
        prop_assert_eq!(back.dims(), a.dims());
        for (x, y) in back.data().iter().zip(a.data()) {
            prop_assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn reshape_round_trips(
        dims in prop::collection::vec(1usize..=4, 3..=5),
        split_pick in 0usize..8,
        scale in -2.0f64..2.0,
    ) {
        let k1 = 1 + split_pick % (dims.len() - 2).max(1);
        let count: usize = dims.iter().product();
        let data: Vec<f64> = (0..count).map(|i| scale * (i as f64 * 0.61).sin()).collect();
        let t = reshape_to_3d(&dims, k1, &data).unwrap();
        let n1: usize = dims[..k1].iter().product();
        let n2: usize = dims[k1..dims.len() - 1].iter().product();
        prop_assert_eq!(t.dims(), (n1, n2, dims[dims.len() - 1]));
        let back = reshape_from_3d(&t, &dims, k1).unwrap();
        prop_assert_eq!(back.len(), data.len());
        for (x, y) in back.iter().zip(&data) {
            prop_assert_eq!(x.to_bits(), y.to_bits());
        }
    }
}
