//! Property tests over the public API: free-group identities, entropy
//! inequalities, cylinder-measure consistency and process invariants.

use std::collections::BTreeSet;

use flab_core::algebraic_shift::{ConvolutionKernel, KernelSubshift, WindowOptions};
use flab_core::exact_entropy::{conditional_entropy, shannon_entropy, FinitePartition, Measure};
use flab_core::f_invariant::{
    f_truncated, generator_entropy_rate, FiniteProcess, FiniteSpaceProcess, KernelProcess,
    RateOptions, ReportOptions, F_of,
};
use flab_core::finite_group::{FiniteGroup, FiniteGroupAction};
use flab_core::free_group::{ball, ball_size, spiral_ordering, FreeWord, WordSet};
use flab_core::skew_product::{sigma_generated, verify_relative_addition};
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

fn word(rank: usize) -> impl Strategy<Value = FreeWord> {
    let letters = prop::collection::vec((1..=rank as i64, any::<bool>()), 0..6);
    letters.prop_map(move |ls| {
        FreeWord::from_letters(rank, ls.into_iter().map(|(i, neg)| if neg { -i } else { i })).unwrap()
    })
}

fn labels(n: usize, k: u32) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..k, n)
}

fn perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_cancels(w in word(3)) {
        prop_assert!((&w * &w.inverse()).is_identity());
        prop_assert_eq!(w.inverse().inverse(), w);
    }

    #[test]
    fn multiplication_associates(a in word(2), b in word(2), c in word(2)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn text_round_trip(w in word(4)) {
        prop_assert_eq!(FreeWord::parse(&w.to_text(), 4).unwrap(), w);
    }

    #[test]
    fn distance_is_left_invariant(a in word(2), b in word(2), g in word(2)) {
        prop_assert_eq!((&g * &a).dist(&(&g * &b)), a.dist(&b));
    }

    #[test]
    fn chain_rule_and_subadditivity(a in labels(12, 3), b in labels(12, 4)) {
        let m = Measure::uniform(12).unwrap();
        let p = FinitePartition::from_labels(m.clone(), a).unwrap();
        let q = FinitePartition::from_labels(m, b).unwrap();
        let hp = shannon_entropy(&p).unwrap();
        let hq = shannon_entropy(&q).unwrap();
        let hpq = shannon_entropy(&p.join(&q).unwrap()).unwrap();
        prop_assert_eq!(hpq.clone(), &hq + &conditional_entropy(&p, &q).unwrap());
        prop_assert!(hpq <= &hp + &hq);
        prop_assert!(hp <= hpq && hq <= hpq);
    }

    // Window entropies of a finite action are monotone, subadditive and
    // invariant under left translation of the window.
    #[test]
    fn finite_process_window_invariants(
        t1 in perm(6), t2 in perm(6), l in labels(6, 2), g in word(2),
        ws in prop::collection::vec(word(2), 1..4), vs in prop::collection::vec(word(2), 1..4),
    ) {
        let p = FinitePartition::from_labels(Measure::uniform(6).unwrap(), l).unwrap();
        let proc = FiniteSpaceProcess::new("perm", vec![t1, t2], p, None).unwrap();
        let w = WordSet::from_words(2, ws).unwrap();
        let v = WordSet::from_words(2, vs).unwrap();
        let hw = proc.entropy(&w).unwrap();
        let hv = proc.entropy(&v).unwrap();
        let hu = proc.entropy(&w.union(&v)).unwrap();
        prop_assert!(hw <= hu && hv <= hu);
        prop_assert!(hu <= &hw + &hv);
        prop_assert_eq!(proc.entropy(&w.translate(&g)).unwrap(), hw);
    }

    // F at every n equals the value recomputed from explicit joins of
    // translated partitions on the group itself.
    #[test]
    fn f_matches_raw_joins(l in labels(4, 3), ai in 0usize..2, bi in 0usize..2, n in 0usize..3) {
        let g = FiniteGroup::cyclic(4).unwrap();
        let autos = [vec![0, 1, 2, 3], vec![0, 3, 2, 1]];
        let act = FiniteGroupAction::new(g, vec![autos[ai].clone(), autos[bi].clone()]).unwrap();
        let proc = FiniteSpaceProcess::from_group_action(&act, &l).unwrap();
        let m = Measure::uniform(4).unwrap();
        let p = FinitePartition::from_labels(m.clone(), l.clone()).unwrap();
        let join_over = |w: &WordSet| {
            let mut acc = FinitePartition::trivial(m.clone());
            for h in w {
                // β_h P: y is labelled by P(β_h⁻¹ y)
                let inv: Vec<usize> = act.word_map(&h.inverse()).iter().map(|&v| v as usize).collect();
                acc = acc.join(&p.pullback(&inv).unwrap()).unwrap();
            }
            shannon_entropy(&acc).unwrap()
        };
        let b = ball(2, n).unwrap();
        let mut expected = join_over(&b).scale_int(-3);
        for i in 1..=2 {
            let s = FreeWord::generator(2, i).unwrap();
            expected += &join_over(&b.union(&b.translate(&s)));
        }
        prop_assert_eq!(F_of(&proc, n).unwrap(), expected);
    }

    // On exact processes the f and f* columns agree.
    #[test]
    fn f_equals_f_star_on_finite_actions(t1 in perm(5), t2 in perm(5), l in labels(5, 3)) {
        let p = FinitePartition::from_labels(Measure::uniform(5).unwrap(), l).unwrap();
        let proc = FiniteSpaceProcess::new("perm", vec![t1, t2], p, None).unwrap();
        let rep = f_truncated(&proc, ReportOptions::default()).unwrap();
        prop_assert!(rep.is_exact());
        prop_assert_eq!(rep.f, rep.f_star);
        let infima: Vec<_> = rep.rows.iter().filter_map(|r| r.f_running.clone()).collect();
        prop_assert!(infima.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn relative_addition_on_random_actions(
        t1 in perm(6), t2 in perm(6), a in labels(6, 2), b in labels(6, 3),
    ) {
        let m = Measure::uniform(6).unwrap();
        let p = FinitePartition::from_labels(m.clone(), a).unwrap();
        let q = FinitePartition::from_labels(m, b).unwrap();
        let r = verify_relative_addition(&[t1, t2], &p, &q, ReportOptions::default()).unwrap();
        prop_assert!(r.holds, "{:?}", r);
    }

    // Σ(Q) equals the join of all translates of Q over a large ball.
    #[test]
    fn sigma_generated_matches_orbit_join(t1 in perm(6), t2 in perm(6), l in labels(6, 3)) {
        let m = Measure::uniform(6).unwrap();
        let q = FinitePartition::from_labels(m.clone(), l).unwrap();
        let maps = vec![t1, t2];
        let proc = FiniteSpaceProcess::new("perm", maps.clone(), q.clone(), None).unwrap();
        let fix = sigma_generated(&maps, &q).unwrap();
        prop_assert_eq!(fix, proc.partition_for(&ball(2, 6).unwrap()));
    }
}

fn kernel_strategy() -> impl Strategy<Value = ConvolutionKernel> {
    let support: Vec<FreeWord> = ball(2, 1).unwrap().to_vec();
    (prop_oneof![Just(2u64), Just(3u64)], prop::collection::vec(0i64..3, support.len()))
        .prop_filter_map("nonzero kernel", move |(p, cs)| {
            let terms: Vec<(FreeWord, Vec<i64>)> = support
                .iter()
                .cloned()
                .zip(cs)
                .filter(|(_, c)| c.rem_euclid(p as i64) != 0)
                .map(|(w, c)| (w, vec![c]))
                .collect();
            if terms.is_empty() {
                return None;
            }
            ConvolutionKernel::new(p, 2, 1, 1, terms).ok()
        })
}

fn all_patterns(p: u32, len: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| (0..p).map(move |a| {
                let mut v = v.clone();
                v.push(a);
                v
            }))
            .collect();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // Summing the cylinder measure over the values at one extra coordinate
    // gives the measure of the shorter cylinder.
    #[test]
    fn cylinder_measures_are_consistent(k in kernel_strategy(), extra in word(2), pat_seed in any::<u64>()) {
        let sub = KernelSubshift::new(k.clone(), WindowOptions::default());
        let p = k.modulus();
        let w = ball(2, 0).unwrap().union(&WordSet::from_words(2, [FreeWord::generator(2, 1).unwrap()]).unwrap());
        if w.contains(&extra) || extra.len() > 2 {
            return Ok(());
        }
        let mut big = w.clone();
        big.insert(extra.clone()).unwrap();
        let pats = all_patterns(p, w.len());
        let pat = &pats[(pat_seed % pats.len() as u64) as usize];
        let small = sub.cylinder_measure(&w, pat).unwrap();
        let pos = big.iter().position(|v| *v == extra).unwrap();
        let mut total = BigRational::zero();
        for a in 0..p {
            let mut ext = pat.clone();
            ext.insert(pos, a);
            total += sub.cylinder_measure(&big, &ext).unwrap();
        }
        prop_assert_eq!(total, small);
    }

    // Shifting a window and its pattern does not change the measure.
    #[test]
    fn cylinder_measures_are_shift_invariant(k in kernel_strategy(), g in word(2), pat_seed in any::<u64>()) {
        let sub = KernelSubshift::new(k.clone(), WindowOptions::default());
        let w = WordSet::parse(2, &["e", "a", "b", "ab"]).unwrap();
        let pats = all_patterns(k.modulus(), w.len());
        let pat = &pats[(pat_seed % pats.len() as u64) as usize];
        let moved = w.translate(&g);
        // reorder the pattern to follow the word order of the translated window
        let order: Vec<FreeWord> = w.iter().map(|v| &g * v).collect();
        let moved_pat: Vec<u32> = moved
            .iter()
            .map(|v| pat[order.iter().position(|u| u == v).unwrap()])
            .collect();
        prop_assert_eq!(sub.cylinder_measure(&moved, &moved_pat).unwrap(), sub.cylinder_measure(&w, pat).unwrap());
    }

    #[test]
    fn kernel_rate_increments_nonincreasing(k in kernel_strategy(), i in 1usize..=2) {
        let proc = KernelProcess::new(k, WindowOptions::default());
        let w = ball(2, 0).unwrap();
        let r = generator_entropy_rate(&proc, i, &w, RateOptions { stable_threshold: 3, max_steps: 8 }).unwrap();
        prop_assert!(r.increments.windows(2).all(|p| p[1] <= p[0]));
    }
}

#[test]
fn ball_size_closed_form() {
    for r in 2..=3 {
        for n in 0..=5 {
            let b = ball(r, n).unwrap();
            assert_eq!(b.len(), ball_size(r, n));
            let spiral = spiral_ordering(r, n).unwrap();
            assert_eq!(spiral.len(), b.len());
            assert_eq!(spiral.iter().collect::<BTreeSet<_>>().len(), b.len());
        }
    }
}
