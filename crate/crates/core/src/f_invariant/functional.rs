//! The entropy functionals `F`, `F*` and their truncated infima.
//!
//! For a process with partition `P` and rank `r`:
//!
//! - `F(P) = (1 - 2r) H(P) + Σ_i H(P ∨ α_{s_i} P)`
//! - `F*(P) = (1 - r) H(P) + Σ_i h(α_{s_i}, P)`
//!
//! and `f`, `f*` are their infima over `P^{B(n)}`, `n > 0`. The relative
//! versions replace every `H(·)` by `H(· | G)`.

use serde::Serialize;

use super::process::{Exactness, FiniteProcess};
use crate::error::{Error, Result};
use crate::exact_entropy::EntropyValue;
use crate::free_group::{ball, FreeWord, WordSet};

/// Whether values are absolute or conditioned on the process's invariant σ-algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Absolute,
    Relative,
}

fn window_entropy(proc: &dyn FiniteProcess, w: &WordSet, mode: Mode) -> Result<EntropyValue> {
    match mode {
        Mode::Absolute => proc.entropy(w),
        Mode::Relative => proc.conditional_entropy(w),
    }
}

fn generator(proc: &dyn FiniteProcess, i: usize) -> Result<FreeWord> {
    FreeWord::generator(proc.rank(), i)
}

/// `F(P^{B(n)})`.
#[allow(non_snake_case)]
pub fn F_of(proc: &dyn FiniteProcess, n: usize) -> Result<EntropyValue> {
    functional_f(proc, n, Mode::Absolute)
}

/// `F(P^{B(n)} | G)`.
#[allow(non_snake_case)]
pub fn relative_F(proc: &dyn FiniteProcess, n: usize) -> Result<EntropyValue> {
    functional_f(proc, n, Mode::Relative)
}

fn functional_f(proc: &dyn FiniteProcess, n: usize, mode: Mode) -> Result<EntropyValue> {
    let r = proc.rank();
    let b = ball(r, n)?;
    let mut total = window_entropy(proc, &b, mode)?.scale_int(1 - 2 * r as i64);
    for i in 1..=r {
        let w = b.union(&b.translate(&generator(proc, i)?));
        total += &window_entropy(proc, &w, mode)?;
    }
    Ok(total)
}

/// Thresholds for declaring a generator entropy rate stable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RateOptions {
    /// Number of consecutive equal increments that counts as stable.
    pub stable_threshold: usize,
    /// Largest number of increments examined.
    pub max_steps: usize,
}

impl Default for RateOptions {
    fn default() -> Self {
        RateOptions {
            stable_threshold: 3,
            max_steps: 64,
        }
    }
}

/// How a rate value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum RateCertificate {
    /// An increment reached zero; increments are nonincreasing and
    /// nonnegative, so the rate is exactly zero.
    Exact,
    /// The last `threshold` increments agreed.
    Stable { threshold: usize },
    /// Increments did not settle; the last one is an upper bound.
    UpperBound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RateResult {
    pub generator: usize,
    pub value: EntropyValue,
    pub certificate: RateCertificate,
    /// `H(U_m) - H(U_{m-1})` for `m = 1, 2, ...`, `U_m = ∪_{k<=m} s_i^k W`.
    pub increments: Vec<EntropyValue>,
}

/// Entropy rate of `α_{s_i}` with respect to `P^W`, computed from the
/// increments `H(U_m) - H(U_{m-1})` of the one-sided joins.
pub fn generator_entropy_rate(
    proc: &dyn FiniteProcess,
    i: usize,
    w: &WordSet,
    opts: RateOptions,
) -> Result<RateResult> {
    rate(proc, i, w, opts, Mode::Absolute)
}

/// Conditional version of [`generator_entropy_rate`].
pub fn relative_generator_entropy_rate(
    proc: &dyn FiniteProcess,
    i: usize,
    w: &WordSet,
    opts: RateOptions,
) -> Result<RateResult> {
    rate(proc, i, w, opts, Mode::Relative)
}

fn rate(
    proc: &dyn FiniteProcess,
    i: usize,
    w: &WordSet,
    opts: RateOptions,
    mode: Mode,
) -> Result<RateResult> {
    let s = generator(proc, i)?;
    let mut shift = s.clone();
    let mut union = w.clone();
    let mut prev = window_entropy(proc, &union, mode)?;
    let mut increments: Vec<EntropyValue> = Vec::new();
    let threshold = opts.stable_threshold.max(1);
    for _ in 0..opts.max_steps.max(1) {
        union = union.union(&w.translate(&shift));
        shift = &shift * &s;
        let cur = window_entropy(proc, &union, mode)?;
        let inc = &cur - &prev;
        prev = cur;
        if inc.is_zero() {
            increments.push(inc);
            return Ok(RateResult {
                generator: i,
                value: EntropyValue::zero(),
                certificate: RateCertificate::Exact,
                increments,
            });
        }
        increments.push(inc.clone());
        let k = increments.len();
        if k >= threshold && increments[k - threshold..].iter().all(|v| *v == inc) {
            return Ok(RateResult {
                generator: i,
                value: inc,
                certificate: RateCertificate::Stable { threshold },
                increments,
            });
        }
    }
    Ok(RateResult {
        generator: i,
        value: increments.last().cloned().unwrap_or_default(),
        certificate: RateCertificate::UpperBound,
        increments,
    })
}

/// A value of `F*` with the weakest certificate among its rates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarValue {
    pub value: EntropyValue,
    pub certificate: RateCertificate,
    pub rates: Vec<RateResult>,
}

fn weakest(a: RateCertificate, b: RateCertificate) -> RateCertificate {
    use RateCertificate::*;
    match (a, b) {
        (UpperBound, _) | (_, UpperBound) => UpperBound,
        (Stable { threshold }, _) | (_, Stable { threshold }) => Stable { threshold },
        _ => Exact,
    }
}

/// `F*(P^{B(n)})`.
#[allow(non_snake_case)]
pub fn F_star_of(proc: &dyn FiniteProcess, n: usize, opts: RateOptions) -> Result<StarValue> {
    functional_f_star(proc, n, opts, Mode::Absolute)
}

/// `F*(P^{B(n)} | G)`.
#[allow(non_snake_case)]
pub fn relative_F_star(proc: &dyn FiniteProcess, n: usize, opts: RateOptions) -> Result<StarValue> {
    functional_f_star(proc, n, opts, Mode::Relative)
}

fn functional_f_star(
    proc: &dyn FiniteProcess,
    n: usize,
    opts: RateOptions,
    mode: Mode,
) -> Result<StarValue> {
    let r = proc.rank();
    let b = ball(r, n)?;
    let mut value = window_entropy(proc, &b, mode)?.scale_int(1 - r as i64);
    let mut certificate = RateCertificate::Exact;
    let mut rates = Vec::with_capacity(r);
    for i in 1..=r {
        let h = rate(proc, i, &b, opts, mode)?;
        value += &h.value;
        certificate = weakest(certificate, h.certificate);
        rates.push(h);
    }
    Ok(StarValue {
        value,
        certificate,
        rates,
    })
}

/// Certificate of a truncated infimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum ReportCertificate {
    /// The value is the infimum itself.
    Exact,
    /// The value is an infimum over finitely many `n`, hence an upper bound.
    UpperBound,
    /// Some window could not be certified.
    Uncertified,
}

#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FRow {
    pub n: usize,
    pub F: Option<EntropyValue>,
    pub F_star: Option<EntropyValue>,
    pub F_star_certificate: Option<RateCertificate>,
    /// Minimum of `F` over rows `1..=n`; absent on row 0.
    pub f_running: Option<EntropyValue>,
    pub f_star_running: Option<EntropyValue>,
    pub rates: Vec<RateResult>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FReport {
    pub process: String,
    pub mode: Mode,
    pub rows: Vec<FRow>,
    /// Infimum of `F` over the rows with `n >= 1`.
    pub f: Option<EntropyValue>,
    pub f_star: Option<EntropyValue>,
    pub f_certificate: ReportCertificate,
    pub f_star_certificate: ReportCertificate,
    pub exactness: Exactness,
}

impl FReport {
    /// Row `n`, if computed.
    pub fn row(&self, n: usize) -> Option<&FRow> {
        self.rows.iter().find(|r| r.n == n)
    }

    pub fn is_exact(&self) -> bool {
        self.f_certificate == ReportCertificate::Exact
    }
}

/// Options for truncated reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReportOptions {
    pub n_max: usize,
    pub rates: RateOptions,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            n_max: 2,
            rates: RateOptions::default(),
        }
    }
}

/// Truncated `f` and `f*` with per-row values; rows run over `0..=n_max`,
/// extended through the stabilization index when the process has one.
pub fn f_truncated(proc: &dyn FiniteProcess, opts: ReportOptions) -> Result<FReport> {
    report(proc, opts, Mode::Absolute)
}

/// Same report with the `f*` column; kept as a named entry point so callers
/// can state which infimum they read.
pub fn f_star_truncated(proc: &dyn FiniteProcess, opts: ReportOptions) -> Result<FReport> {
    report(proc, opts, Mode::Absolute)
}

/// Relative report conditioned on the process's invariant σ-algebra.
pub fn relative_f_truncated(proc: &dyn FiniteProcess, opts: ReportOptions) -> Result<FReport> {
    report(proc, opts, Mode::Relative)
}

fn report(proc: &dyn FiniteProcess, opts: ReportOptions, mode: Mode) -> Result<FReport> {
    if opts.n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    if mode == Mode::Relative {
        // surface a missing capability as an error rather than a table of failures
        proc.conditional_entropy(&ball(proc.rank(), 0)?)?;
    }
    let exactness = match mode {
        Mode::Absolute => proc.exactness(),
        Mode::Relative => proc.conditional_exactness(),
    };
    let last = match exactness {
        Exactness::Stabilized { from_n } => opts.n_max.max(from_n + 1),
        _ => opts.n_max,
    };
    let mut rows = Vec::with_capacity(last + 1);
    let mut f_run: Option<EntropyValue> = None;
    let mut fs_run: Option<EntropyValue> = None;
    let mut any_error = false;
    let mut star_weak = RateCertificate::Exact;
    for n in 0..=last {
        let f = functional_f(proc, n, mode);
        let fs = functional_f_star(proc, n, opts.rates, mode);
        let mut error = None;
        let f_val = match f {
            Ok(v) => Some(v),
            Err(e) => {
                error = Some(e.to_string());
                None
            }
        };
        let (fs_val, fs_cert, rates) = match fs {
            Ok(s) => (Some(s.value), Some(s.certificate), s.rates),
            Err(e) => {
                error.get_or_insert(e.to_string());
                (None, None, Vec::new())
            }
        };
        any_error |= error.is_some();
        if n >= 1 {
            if let Some(v) = &f_val {
                f_run = Some(match f_run {
                    Some(cur) => cur.min(v.clone()),
                    None => v.clone(),
                });
            }
            if let Some(v) = &fs_val {
                fs_run = Some(match fs_run {
                    Some(cur) => cur.min(v.clone()),
                    None => v.clone(),
                });
            }
            if let Some(c) = fs_cert {
                star_weak = weakest(star_weak, c);
            }
        }
        rows.push(FRow {
            n,
            F: f_val,
            F_star: fs_val,
            F_star_certificate: fs_cert,
            f_running: if n >= 1 { f_run.clone() } else { None },
            f_star_running: if n >= 1 { fs_run.clone() } else { None },
            rates,
            error,
        });
    }
    let exact_tail = matches!(exactness, Exactness::Stabilized { .. } | Exactness::Markov);
    let f_certificate = if any_error {
        ReportCertificate::Uncertified
    } else if exact_tail {
        ReportCertificate::Exact
    } else {
        ReportCertificate::UpperBound
    };
    let f_star_certificate = if any_error {
        ReportCertificate::Uncertified
    } else if exact_tail && star_weak != RateCertificate::UpperBound {
        ReportCertificate::Exact
    } else {
        ReportCertificate::UpperBound
    };
    Ok(FReport {
        process: proc.describe(),
        mode,
        rows,
        f: f_run,
        f_star: fs_run,
        f_certificate,
        f_star_certificate,
        exactness,
    })
}

/// Outcome of comparing `f(total)` with `f(a) + f(b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum AdditionOutcome {
    /// All three exact and the identity holds.
    ExactEqual,
    /// All three exact and the identity fails.
    ExactMismatch,
    /// All three truncated upper bounds and the truncated values satisfy the identity.
    BoundConsistent,
    /// All three truncated upper bounds and the truncated values do not.
    BoundInconsistent,
    /// Mixed certificate levels, or a missing value.
    Incomparable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdditionVerdict {
    pub total: Option<EntropyValue>,
    pub part_a: Option<EntropyValue>,
    pub part_b: Option<EntropyValue>,
    pub certificates: [ReportCertificate; 3],
    pub outcome: AdditionOutcome,
    /// `f(total) - f(b)` when both are exact: the value the identity forces on `f(a)`.
    pub implied_part_a: Option<EntropyValue>,
}

/// Checks `f(total) = f(a) + f(b)`.
pub fn addition_report(total: &FReport, part_a: &FReport, part_b: &FReport) -> AdditionVerdict {
    let certs = [total.f_certificate, part_a.f_certificate, part_b.f_certificate];
    let implied_part_a = match (&total.f, &part_b.f) {
        (Some(t), Some(b))
            if total.f_certificate == ReportCertificate::Exact
                && part_b.f_certificate == ReportCertificate::Exact =>
        {
            Some(t - b)
        }
        _ => None,
    };
    let outcome = match (&total.f, &part_a.f, &part_b.f) {
        (Some(t), Some(a), Some(b)) => {
            let holds = *t == a + b;
            if certs.iter().all(|c| *c == ReportCertificate::Exact) {
                if holds {
                    AdditionOutcome::ExactEqual
                } else {
                    AdditionOutcome::ExactMismatch
                }
            } else if certs.iter().all(|c| *c == ReportCertificate::UpperBound) {
                if holds {
                    AdditionOutcome::BoundConsistent
                } else {
                    AdditionOutcome::BoundInconsistent
                }
            } else {
                AdditionOutcome::Incomparable
            }
        }
        _ => AdditionOutcome::Incomparable,
    };
    AdditionVerdict {
        total: total.f.clone(),
        part_a: part_a.f.clone(),
        part_b: part_b.f.clone(),
        certificates: certs,
        outcome,
        implied_part_a,
    }
}
