use anticirc::classifier::{classify, ClassifyOptions, Status};
use anticirc::combinatorics::{alternating_binomial_sums, residue_sum_table, sum_signs, PeriodicSequence, SumSigns};
use anticirc::oracle::symmetric_eigenvalues;
use anticirc::poly::{eval_fast, eval_naive, eval_with_gradient, residue_components};
use anticirc::tensor::{CirculantSpec, GeneratingVector, DEFAULT_DENSE_CAP};
use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;

fn close(a: f64, b: f64, scale: f64, rtol: f64) -> bool {
    (a - b).abs() <= rtol * scale.max(1.0)
}

fn generating() -> impl Strategy<Value = GeneratingVector> {
    (1usize..=3, 2usize..=4).prop_flat_map(|(k, n)| {
        let m = 2 * k;
        prop::collection::vec(-2.0f64..2.0, (n - 1) * m + 1)
            .prop_map(move |v| GeneratingVector::new(m, n, v).unwrap())
    })
}

fn with_point() -> impl Strategy<Value = (GeneratingVector, Vec<f64>)> {
    generating().prop_flat_map(|g| {
        let n = g.dim();
        (Just(g), prop::collection::vec(-1.5f64..1.5, n))
    })
}

fn circulant() -> impl Strategy<Value = CirculantSpec> {
    (2usize..=6, 2usize..=5).prop_flat_map(|(m, n)| {
        let rmax = CirculantSpec::max_index(m, n);
        (Just(m), Just(n), 1..=rmax).prop_flat_map(|(m, n, r)| {
            prop::collection::vec(-2.0f64..2.0, r)
                .prop_map(move |seed| CirculantSpec::new(m, n, r, seed).unwrap())
        })
    })
}

proptest! {
    #[test]
    fn expansion_is_periodic(spec in circulant()) {
        let gen = spec.expand();
        let r = spec.index();
        for (i, v) in gen.values().iter().enumerate() {
            prop_assert_eq!(*v, spec.seed()[i % r]);
        }
    }

    #[test]
    fn entries_are_symmetric(gen in generating(), raw in prop::collection::vec(0usize..64, 6), rot in 0usize..6) {
        let m = gen.order();
        let idx: Vec<usize> = raw[..m].iter().map(|i| i % gen.dim() + 1).collect();
        let mut perm = idx.clone();
        perm.rotate_left(rot % m);
        perm.reverse();
        let t = gen.tensor();
        prop_assert_eq!(t.entry(&idx).unwrap(), t.entry(&perm).unwrap());
        let s: usize = idx.iter().sum();
        prop_assert_eq!(t.entry(&idx).unwrap(), gen.values()[s - m]);
    }

    #[test]
    fn fast_matches_naive((gen, x) in with_point()) {
        let fast = eval_fast(&gen, &x).unwrap();
        let naive = eval_naive(&gen, &x, DEFAULT_DENSE_CAP).unwrap();
        prop_assert!(close(fast, naive, naive.abs(), 1e-10), "{fast} vs {naive}");
    }

    #[test]
    fn homogeneity((gen, x) in with_point(), lambda in -3.0f64..3.0) {
        let f = eval_fast(&gen, &x).unwrap();
        let scaled: Vec<f64> = x.iter().map(|xi| lambda * xi).collect();
        let fl = eval_fast(&gen, &scaled).unwrap();
        let want = lambda.powi(gen.order() as i32) * f;
        prop_assert!(close(fl, want, want.abs(), 1e-9), "{fl} vs {want}");
    }

    #[test]
    fn euler_identity((gen, x) in with_point()) {
        let (f, g) = eval_with_gradient(&gen, &x).unwrap();
        let dot: f64 = x.iter().zip(&g).map(|(a, b)| a * b).sum();
        let want = gen.order() as f64 * f;
        let scale: f64 = x.iter().zip(&g).map(|(a, b)| (a * b).abs()).sum();
        prop_assert!(close(dot, want, scale, 1e-10), "{dot} vs {want}");
    }

    #[test]
    fn residue_parts_recombine(spec in circulant(), xs in prop::collection::vec(-1.5f64..1.5, 5)) {
        let x = &xs[..spec.dim()];
        let parts = residue_components(&spec, x).unwrap();
        let (m, r) = (spec.order(), spec.index());
        let total: f64 = parts.iter().sum();
        let sum_x: f64 = x.iter().sum();
        let scale: f64 = x.iter().map(|v| v.abs()).sum::<f64>().powi(m as i32);
        prop_assert!(close(total, sum_x.powi(m as i32), scale, 1e-10));
        let recombined: f64 = parts
            .iter()
            .enumerate()
            .map(|(j, p)| spec.seed()[(j + r * m - m) % r] * p)
            .sum();
        let f = eval_fast(&spec.expand(), x).unwrap();
        prop_assert!(close(recombined, f, 2.0 * scale, 1e-10), "{recombined} vs {f}");
    }

    #[test]
    fn integer_tables_match_float_parts(
        m in 2usize..=8,
        pattern in prop::collection::vec(-3i64..=3, 2..=4),
        r_pick in 0usize..64,
    ) {
        prop_assume!(pattern.iter().any(|&a| a != 0));
        let n = pattern.len();
        let r = r_pick % CirculantSpec::max_index(m, n) + 1;
        let table = residue_sum_table(m, r, &pattern).unwrap();
        let spec = CirculantSpec::new(m, n, r, vec![0.0; r]).unwrap();
        let x: Vec<f64> = pattern.iter().map(|&a| a as f64).collect();
        let parts = residue_components(&spec, &x).unwrap();
        let scale = pattern.iter().map(|a| a.abs() as f64).sum::<f64>().powi(m as i32);
        for j in 0..r {
            let exact = table.sum(j).to_f64().unwrap();
            prop_assert!(close(exact, parts[j], scale, 1e-12), "j = {j}: {exact} vs {}", parts[j]);
        }
    }

    #[test]
    fn binomial_sums_balance(period in prop::collection::vec(-20i64..=20, 2..=6), order in 1usize..=8) {
        let seq = PeriodicSequence::from_integers(&period).unwrap();
        let sums = alternating_binomial_sums(&seq, order).unwrap();
        let total = sums.iter().fold(num_rational::BigRational::zero(), |acc, d| acc + d);
        prop_assert!(total.is_zero());
        let (_, signs) = sum_signs(&seq, order).unwrap();
        if seq.is_constant() {
            prop_assert_eq!(signs, SumSigns::ForcedConstant);
        } else {
            prop_assert_eq!(signs, SumSigns::MixedSigns);
            prop_assert!(sums.iter().any(|d| d.is_negative()));
        }
    }

    #[test]
    fn jacobi_matches_nalgebra(n in 1usize..=7, entries in prop::collection::vec(-3.0f64..3.0, 49)) {
        let mut rows = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                rows[i][j] = entries[i * 7 + j];
                rows[j][i] = entries[i * 7 + j];
            }
        }
        let ours = symmetric_eigenvalues(&rows).unwrap();
        let dense = nalgebra::DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        let mut reference: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
        reference.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in ours.iter().zip(&reference) {
            prop_assert!((a - b).abs() < 1e-9, "{ours:?} vs {reference:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn verdict_is_scale_invariant(spec in circulant(), lambda in 0.01f64..100.0) {
        prop_assume!(spec.order() % 2 == 0);
        let opts = ClassifyOptions { oracle_starts: 8, ..Default::default() };
        let a = classify(&spec, &opts).unwrap();
        let b = classify(&spec.scaled(lambda).unwrap(), &opts).unwrap();
        prop_assert_eq!(a.status, b.status);
        prop_assert_eq!(a.case_tag, b.case_tag);
        if a.status == Status::Psd {
            let (pa, pb) = (a.power_sum().unwrap(), b.power_sum().unwrap());
            prop_assert!((pa.t - pb.t).abs() < 1e-12);
            prop_assert!(close(pb.v0, lambda * pa.v0, lambda * pa.v0, 1e-12));
        }
    }
}
