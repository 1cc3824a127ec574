use num_traits::{Signed, ToPrimitive};
use odduniv::analytic::{bessel_k0, f4_candidates, f4_scan, k0_majorant};
use odduniv::escalation::{dedup_classes, escalations, truant, TargetSet};
use odduniv::forms::matrix::{adjugate, congruence, det, to_i128};
use odduniv::forms::{cholesky, dual_form, is_isometric, partial_sum, representations, successive_minima, theta_series};
use odduniv::local::{
    eisenstein_coefficient, epsilon_invariant, local_density, locally_represents, relevant_places, stability_exponent,
};
use odduniv::verify::{check_interval, find_split_local_cover, CoverChecker, SweepConfig};
use odduniv::{validate_gram, QuadraticForm};
use proptest::prelude::*;

/// Positive-definite forms with Q-coefficients a_i ∈ [1, max_diag] and Gram off-diagonals bounded by the diagonal.
fn form(rank: usize, max_diag: i64) -> impl Strategy<Value = QuadraticForm> {
    let diag = prop::collection::vec(1..=max_diag, rank);
    let off = prop::collection::vec(-max_diag..=max_diag, rank * rank.saturating_sub(1) / 2);
    (diag, off).prop_filter_map("not positive definite", move |(d, o)| {
        let mut g = vec![vec![0i64; rank]; rank];
        let mut k = 0;
        for i in 0..rank {
            g[i][i] = 2 * d[i];
            for j in i + 1..rank {
                g[i][j] = o[k];
                g[j][i] = o[k];
                k += 1;
            }
        }
        validate_gram(g).ok()
    })
}

fn unimodular(rank: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    // Product of elementary column operations.
    prop::collection::vec((0..rank, 0..rank, -2i64..=2, any::<bool>()), 0..8).prop_map(move |ops| {
        let mut u: Vec<Vec<i64>> = (0..rank).map(|i| (0..rank).map(|j| (i == j) as i64).collect()).collect();
        for (i, j, c, flip) in ops {
            if i != j {
                for row in u.iter_mut() {
                    row[j] += c * row[i];
                }
            } else if flip {
                for row in u.iter_mut() {
                    row[i] = -row[i];
                }
            }
        }
        u
    })
}

/// r_Q(n) by a full box: |x_i| ≤ √(2n·(A⁻¹)_ii).
fn brute_count(q: &QuadraticForm, n: u64) -> usize {
    let a = to_i128(q.gram());
    let (adj, d) = (adjugate(&a), det(&a));
    let r = q.rank();
    let bounds: Vec<i64> = (0..r).map(|i| ((2 * n as i128 * adj[i][i]) as f64 / d as f64).sqrt().floor() as i64).collect();
    let mut x = vec![0i64; r];
    let mut count = 0;
    fn rec(q: &QuadraticForm, n: u64, b: &[i64], x: &mut Vec<i64>, i: usize, count: &mut usize) {
        if i == x.len() {
            *count += (q.value(x) == n as i128) as usize;
            return;
        }
        for v in -b[i]..=b[i] {
            x[i] = v;
            rec(q, n, b, x, i + 1, count);
        }
    }
    rec(q, n, &bounds, &mut x, 0, &mut count);
    count
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn representations_match_box_count(q in (1usize..=3).prop_flat_map(|r| form(r, 4)), n in 0u64..=60) {
        let th = theta_series(&q, 60).unwrap();
        let found = representations(&q, n);
        prop_assert!(found.iter().all(|x| q.value(x) == n as i128));
        prop_assert_eq!(found.len(), brute_count(&q, n));
        prop_assert_eq!(th.get(n) as usize, found.len());
        if n >= 1 {
            prop_assert_eq!(th.get(n) % 2, 0);
        }
    }

    #[test]
    fn dual_partial_sums_obey_box_bound(q in form(4, 4), x in 1u64..=400) {
        let qs = dual_form(&q);
        let ch = cholesky(&qs);
        let bound: f64 = ch.diag.iter().map(|d| 2.0 * (2.0 * x as f64 / d.to_f64().unwrap()).sqrt() + 1.0).product();
        prop_assert!(partial_sum(&qs, x).unwrap() as f64 <= bound + 1e-9);
    }

    #[test]
    fn isometry_is_an_equivalence(q in form(3, 5), u in unimodular(3), v in unimodular(3)) {
        let q1 = validate_gram(congruence(q.gram(), &u)).unwrap();
        let q2 = validate_gram(congruence(q1.gram(), &v)).unwrap();
        prop_assert!(is_isometric(&q, &q).is_some());
        for (a, b) in [(&q, &q1), (&q1, &q), (&q1, &q2), (&q, &q2)] {
            let w = is_isometric(a, b).expect("isometric");
            prop_assert_eq!(congruence(a.gram(), &w), b.gram().to_vec());
        }
        prop_assert_eq!(successive_minima(&q), successive_minima(&q2));
    }

    #[test]
    fn epsilon_product_formula(q in (1usize..=5).prop_flat_map(|r| form(r, 6))) {
        let prod: i32 = relevant_places(&q).into_iter().map(|v| epsilon_invariant(&q, v)).product();
        prop_assert_eq!(prod, 1);
    }

    #[test]
    fn densities_are_stable(q in form(4, 5), n in 1u64..=60) {
        for (p, _) in odduniv::arith::factorize((2 * q.disc()) as u64) {
            let k = stability_exponent(&q, p);
            let step = p.pow(k);
            let v = local_density(&q, n, p).value;
            prop_assert!(!v.is_negative());
            if n % (p * p) != 0 {
                prop_assert_eq!(&v, &local_density(&q, n + step, p).value, "p = {}", p);
            }
        }
    }

    #[test]
    fn eisenstein_positivity_is_local_representability(q in form(4, 5), n in 1u64..=200) {
        let a = eisenstein_coefficient(&q, n).unwrap();
        prop_assert_eq!(a.is_positive(), locally_represents(&q, n));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn escalations_contain_parent_and_truant(q in form(2, 3)) {
        let t = truant(&q, &TargetSet::OddPositive, 200).unwrap().value();
        prop_assume!(t.is_some());
        let t = t.unwrap();
        let kids = escalations(&q, t);
        prop_assert!(!kids.is_empty());
        for (i, k) in kids.iter().enumerate() {
            prop_assert!(odduniv::forms::represents_form(k, &q).is_some());
            prop_assert!(theta_series(k, t).unwrap().get(t) > 0);
            for other in &kids[i + 1..] {
                prop_assert!(is_isometric(k, other).is_none());
            }
        }
        prop_assert_eq!(dedup_classes(kids.clone()).len(), kids.len());
    }

    #[test]
    fn cover_hits_are_sound_and_sweeps_exact(q in form(4, 6)) {
        let cover = find_split_local_cover(&q);
        prop_assume!(cover.is_ok());
        let cover = cover.unwrap();
        prop_assert!(cover.verify(&q));
        let th = theta_series(&q, 2000).unwrap();
        let checker = CoverChecker::new(&q, Some(&cover), 2000);
        for n in 1..=2000u64 {
            if let Some((w, m)) = checker.cover_hit(n) {
                prop_assert_eq!(m + cover.d * w * w, n);
                prop_assert!(th.get(n) > 0);
            }
        }
        let report = check_interval(&q, 1, 2000, &TargetSet::OddPositive, &SweepConfig::default()).unwrap();
        let direct: Vec<u64> = (1..=2000u64).step_by(2).filter(|&n| th.get(n) == 0).collect();
        prop_assert_eq!(report.exceptions, direct);
    }

    #[test]
    fn f4_search_matches_scan(f in 2.0f64..50.0, d in prop::sample::select(vec![5i128, 8, 12, 13, 17, 21, 24, 28, 29, 33])) {
        let level = d as u64;
        prop_assert_eq!(f4_candidates(f, level, d, 100_000), f4_scan(f, level, d, 100_000));
    }

    #[test]
    fn k0_is_positive_and_majorized(x in 0.01f64..60.0) {
        let e = bessel_k0(x).unwrap();
        prop_assert!(e.k0 > 0.0 && e.k1 > e.k0);
        prop_assert!(e.k0 <= k0_majorant(x) * (1.0 + 1e-12));
    }
}
