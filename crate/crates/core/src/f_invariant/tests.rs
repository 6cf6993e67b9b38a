use super::*;
use crate::algebraic_shift::{ConvolutionKernel, WindowOptions};
use crate::exact_entropy::{EntropyValue, FinitePartition, Measure};
use crate::finite_group::{FiniteGroup, FiniteGroupAction};
use crate::free_group::{ball, ball_size, FreeWord};

fn log(k: u64) -> EntropyValue {
    EntropyValue::log_int(k).unwrap()
}

fn negation_action(n: usize) -> FiniteGroupAction {
    let g = FiniteGroup::cyclic(n).unwrap();
    let neg: Vec<u32> = (0..n).map(|x| ((n - x) % n) as u32).collect();
    let id: Vec<u32> = (0..n as u32).collect();
    FiniteGroupAction::new(g, vec![neg, id]).unwrap()
}

// For i.i.d. coordinates H(P^W) = |W| log k, so F only depends on the sizes
// of B(n) and B(n) ∪ s_i B(n), which are counted here by brute force.
#[test]
fn bernoulli_f_matches_counts() {
    for r in 1..=3usize {
        let proc = BernoulliProcess::new(r, 3).unwrap();
        for n in 0..=2 {
            let b = ball(r, n).unwrap();
            let mut expected = (1 - 2 * r as i64) * b.len() as i64;
            for i in 1..=r {
                let s = FreeWord::generator(r, i).unwrap();
                let extra = b.iter().filter(|w| !b.contains(&(&s * w))).count();
                expected += (b.len() + extra) as i64;
            }
            assert_eq!(F_of(&proc, n).unwrap(), log(3).scale_int(expected));
            assert_eq!(b.len(), ball_size(r, n));
        }
    }
}

#[test]
fn bernoulli_f_is_base_entropy() {
    let proc = BernoulliProcess::new(2, 5).unwrap();
    let rep = f_truncated(&proc, ReportOptions::default()).unwrap();
    assert_eq!(rep.f, Some(log(5)));
    assert_eq!(rep.f_star, Some(log(5)));
    assert!(rep.is_exact());
    assert_eq!(rep.f_star_certificate, ReportCertificate::Exact);
}

#[test]
fn rate_of_bernoulli_settles() {
    let proc = BernoulliProcess::new(2, 2).unwrap();
    let b = ball(2, 1).unwrap();
    let r = generator_entropy_rate(&proc, 1, &b, RateOptions::default()).unwrap();
    assert!(matches!(r.certificate, RateCertificate::Stable { threshold: 3 }));
    // each step adds three new words, e.g. s B(1) adds aa, ab, aB
    assert_eq!(r.value, log(2).scale_int(3));
}

// A finite action with the point partition: P^{B(n)} = P, so
// F = (1 - 2r) log|X| + r log|X| = (1 - r) log|X|.
#[test]
fn point_partition_of_finite_action() {
    let act = negation_action(4);
    let proc = FiniteSpaceProcess::group_points(&act).unwrap();
    let rep = f_truncated(&proc, ReportOptions::default()).unwrap();
    assert_eq!(rep.f, Some(-log(4)));
    assert_eq!(rep.f_star, Some(-log(4)));
    assert!(rep.is_exact());
    for row in &rep.rows {
        for rate in &row.rates {
            assert_eq!(rate.certificate, RateCertificate::Exact);
        }
    }
}

#[test]
fn relative_to_trivial_is_absolute() {
    let act = negation_action(6);
    let proc = FiniteSpaceProcess::from_group_action(&act, &[0, 1, 1, 0, 1, 1])
        .unwrap()
        .with_given(FinitePartition::trivial(Measure::uniform(6).unwrap()))
        .unwrap();
    let abs = f_truncated(&proc, ReportOptions::default()).unwrap();
    let rel = relative_f_truncated(&proc, ReportOptions::default()).unwrap();
    assert_eq!(abs.f, rel.f);
    assert_eq!(abs.f_star, rel.f_star);
    for n in 0..=2 {
        assert_eq!(F_of(&proc, n).unwrap(), relative_F(&proc, n).unwrap());
    }
}

#[test]
fn relative_to_points_is_zero() {
    let act = negation_action(4);
    let pts = FiniteSpaceProcess::group_points(&act).unwrap();
    let given = pts.partition().clone();
    let proc = FiniteSpaceProcess::from_group_action(&act, &[0, 1, 0, 1])
        .unwrap()
        .with_given(given)
        .unwrap();
    let rel = relative_f_truncated(&proc, ReportOptions::default()).unwrap();
    assert_eq!(rel.f, Some(EntropyValue::zero()));
}

#[test]
fn relative_needs_capability() {
    let proc = BernoulliProcess::new(2, 2).unwrap();
    assert!(matches!(
        relative_f_truncated(&proc, ReportOptions::default()),
        Err(crate::Error::NoConditionalCapability)
    ));
}

// The kernel of the two-generator difference map is the constants, so
// every window has entropy log 2 and F = (1 - r) log 2.
#[test]
fn difference_map_kernel() {
    let k = ConvolutionKernel::binary_difference(2).unwrap();
    let proc = KernelProcess::new(k, WindowOptions::default());
    for n in 0..=2 {
        assert_eq!(F_of(&proc, n).unwrap(), -log(2));
    }
    let star = F_star_of(&proc, 1, RateOptions::default()).unwrap();
    assert_eq!(star.value, -log(2));
    assert_eq!(star.certificate, RateCertificate::Exact);
}

#[test]
fn addition_verdicts() {
    let act = negation_action(4);
    let pts = FiniteSpaceProcess::group_points(&act).unwrap();
    let b = BernoulliProcess::new(2, 2).unwrap();
    let opts = ReportOptions::default();
    let rp = f_truncated(&pts, opts).unwrap();
    let rb = f_truncated(&b, opts).unwrap();
    let v = addition_report(&rp, &rp, &rb);
    assert_eq!(v.outcome, AdditionOutcome::ExactMismatch);
    assert_eq!(v.implied_part_a, Some(-log(4) - log(2)));
    let v = addition_report(&rb, &rb, &rp.clone_with_f(EntropyValue::zero()));
    assert_eq!(v.outcome, AdditionOutcome::ExactEqual);
    let mut bound = rb.clone();
    bound.f_certificate = ReportCertificate::UpperBound;
    assert_eq!(addition_report(&bound, &rb, &rb).outcome, AdditionOutcome::Incomparable);
}

#[test]
fn zero_n_max_rejected() {
    let proc = BernoulliProcess::new(1, 2).unwrap();
    let opts = ReportOptions {
        n_max: 0,
        ..ReportOptions::default()
    };
    assert!(f_truncated(&proc, opts).is_err());
}

trait WithF {
    fn clone_with_f(&self, v: EntropyValue) -> FReport;
}

impl WithF for FReport {
    fn clone_with_f(&self, v: EntropyValue) -> FReport {
        let mut r = self.clone();
        r.f = Some(v);
        r
    }
}
