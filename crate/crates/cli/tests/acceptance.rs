//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Every comparison is an equality of exact values (rational combinations
//! of prime logarithms, or integers); the tolerance is zero throughout.

use std::process::ExitCode;
use std::time::Instant;

use flab::suites::run_suite;
use flab::{run_algebraic, run_generalization, run_binary_difference, Check, Report, RunConfig};
use flab_core::algebraic_shift::{ConvolutionKernel, KernelSubshift, WindowCertificate, WindowOptions};
use flab_core::exact_entropy::EntropyValue;
use flab_core::f_invariant::{
    f_truncated, F_of, F_star_of, KernelProcess, RateCertificate, ReportOptions,
};
use flab_core::free_group::{ball, FreeWord};

const TOLERANCE: &str = "tolerance 0 (exact)";

struct Outcome {
    ok: bool,
    failures: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            ok: true,
            failures: Vec::new(),
        }
    }

    fn require(&mut self, cond: bool, what: impl Into<String>) {
        if !cond {
            self.ok = false;
            self.failures.push(what.into());
        }
    }

    fn checks(&mut self, checks: &[Check]) {
        for c in checks {
            self.require(c.passed(), format!("{} -> {}", c.name, c.verdict.label()));
        }
    }

    fn report(&mut self, r: &Report) {
        self.checks(&r.checks);
    }

    fn error(&mut self, e: impl std::fmt::Display) {
        self.require(false, format!("error: {e}"));
    }
}

fn suite(o: &mut Outcome, name: &str, cfg: &RunConfig) -> Vec<Check> {
    match run_suite(name, cfg, false) {
        Ok(cs) => {
            o.checks(&cs);
            o.require(!cs.is_empty(), format!("{name} produced no checks"));
            cs
        }
        Err(e) => {
            o.error(e);
            Vec::new()
        }
    }
}

fn detail_u64(c: &Check, key: &str) -> u64 {
    c.detail[key].as_u64().unwrap_or(0)
}

fn log(k: u64) -> EntropyValue {
    EntropyValue::log_int(k).unwrap()
}

fn criterion_1(cfg: &RunConfig) -> Outcome {
    let mut o = Outcome::new();
    match run_binary_difference(cfg) {
        Ok(r) => {
            o.report(&r);
            for name in ["f-full-shift", "f-target-shift", "f-kernel", "addition-triple", "kernel-window-dimension"] {
                o.require(r.checks.iter().any(|c| c.name == name), format!("missing check {name}"));
            }
        }
        Err(e) => o.error(e),
    }
    // the identity itself, on exact values
    o.require(log(2) == &log(2).scale_int(-1) + &log(4), "log2 = -log2 + log4");
    o
}

fn criterion_2(cfg: &RunConfig) -> Outcome {
    let mut o = Outcome::new();
    let cs = suite(&mut o, "finite-groups", cfg);
    o.require(cs.len() == 6, "three groups times two ranks");
    for c in &cs {
        let n = c.detail["assignments"].as_array().map_or(0, Vec::len);
        o.require(n >= 2, format!("{}: {n} automorphism assignments", c.name));
    }
    o
}

fn criterion_3(cfg: &RunConfig) -> Outcome {
    let mut o = Outcome::new();
    for k in ["Z/2", "Z/3"] {
        for r in [2usize, 3] {
            let cfg = RunConfig { rank: r, ..cfg.clone() };
            match run_generalization(&cfg, k) {
                Ok(rep) => {
                    o.report(&rep);
                    let dim = rep.checks.iter().find(|c| c.name == "comparison-kernel-dimension");
                    let radii: Vec<u64> = dim
                        .and_then(|c| c.detail["windows"].as_array())
                        .map(|ws| ws.iter().filter_map(|w| w["n"].as_u64()).collect())
                        .unwrap_or_default();
                    o.require(radii == vec![1, 2], format!("{k} r={r}: comparison kernel windows {radii:?}"));
                }
                Err(e) => o.error(e),
            }
        }
    }
    o
}

fn criterion_4(cfg: &RunConfig) -> Outcome {
    let mut o = Outcome::new();
    let k = ConvolutionKernel::scalar(2, 2, &[("e", 1), ("a", 1)]).unwrap();
    match run_algebraic(cfg, &k) {
        Ok(r) => o.report(&r),
        Err(e) => o.error(e),
    }
    let proc = KernelProcess::new(k.clone(), WindowOptions::default());
    for n in 0..=1 {
        o.require(F_of(&proc, n).map(|v| v.is_zero()).unwrap_or(false), format!("F(B({n})) = 0"));
        // every window entering F(n) is certified by extension, so F(n) is exact
        let sub = KernelSubshift::new(k.clone(), WindowOptions::default());
        let b = ball(2, n).unwrap();
        let mut windows = vec![b.clone()];
        for i in 1..=2 {
            windows.push(b.union(&b.translate(&FreeWord::generator(2, i).unwrap())));
        }
        for w in &windows {
            let cert = sub.projection(w).map(|d| d.certificate);
            o.require(cert == Ok(WindowCertificate::ExtensionCertified), format!("window of F({n}) certified"));
        }
    }
    match F_star_of(&proc, 0, cfg.rate_options()) {
        Ok(s) => {
            o.require(s.value.is_zero(), "F*(0) = 0");
            o.require(s.certificate != RateCertificate::UpperBound, "F*(0) rates settled");
            o.require(s.rates[0].certificate == RateCertificate::Exact, "rate along s_1 is exactly 0");
        }
        Err(e) => o.error(e),
    }
    match f_truncated(&proc, ReportOptions::default()) {
        Ok(rep) => {
            o.require(rep.f == Some(EntropyValue::zero()), "truncated f = 0");
            o.require(rep.f_star == Some(EntropyValue::zero()), "truncated f* = 0");
        }
        Err(e) => o.error(e),
    }
    o
}

fn criterion_5(cfg: &RunConfig) -> Outcome {
    let mut o = Outcome::new();
    let cs = suite(&mut o, "surjectivity", cfg);
    let counts: Vec<u64> = cs.iter().map(|c| detail_u64(c, "kernels")).collect();
    o.require(counts == vec![31, 242], format!("kernel counts {counts:?}"));
    o
}

fn criterion_6(cfg: &RunConfig) -> Outcome {
    let mut o = Outcome::new();
    let cs = suite(&mut o, "preimage", cfg);
    let total: u64 = cs.iter().map(|c| detail_u64(c, "targets")).sum();
    o.require(cs.len() == 5 && total == 100, format!("{} kernels, {total} targets", cs.len()));
    o
}

fn criterion_7(cfg: &RunConfig) -> Outcome {
    let mut o = Outcome::new();
    let cs = suite(&mut o, "cocycle", cfg);
    o.require(cs.len() == 8, "identity and conjugacy for four groups");
    // the verifier must notice a deliberately broken cocycle
    match run_suite("cocycle", cfg, true) {
        Ok(bugged) => o.require(
            bugged.iter().filter(|c| c.name.ends_with("identity")).all(|c| {
                !c.passed() && c.detail["witnesses"].as_array().is_some_and(|w| !w.is_empty())
            }),
            "injected bug is caught with a witness",
        ),
        Err(e) => o.error(e),
    }
    o
}

fn main() -> ExitCode {
    let cfg = RunConfig::default();
    let criteria: Vec<(usize, &str, Box<dyn Fn(&RunConfig) -> Outcome>)> = vec![
        (1, "Z/2 difference-map triple: log2 = -log2 + log4, all EXACT", Box::new(criterion_1)),
        (2, "finite groups: f = -(r-1) log|G| EXACT, >= 2 assignments, r in {2,3}", Box::new(criterion_2)),
        (3, "K in {Z/2,Z/3}, r in {2,3}: log|K| = -(r-1)log|K| + r log|K|; comparison kernel = constants on B(1), B(2)", Box::new(criterion_3)),
        (4, "two-term kernel p=2: F(0) = F(1) = 0, F*(0) = 0, truncated f = f* = 0", Box::new(criterion_4)),
        (5, "surjectivity verdict agrees with solving every target on B(0), B(1)", Box::new(criterion_5)),
        (6, "100 seeded preimages on B(1) across 5 kernels re-verify", Box::new(criterion_6)),
        (7, "cocycle identity and section conjugacy on all words of length <= 3", Box::new(criterion_7)),
        (8, "conditional F* of the skew product equals the fiber F*, n <= 2", Box::new(|c: &RunConfig| {
            let mut o = Outcome::new();
            suite(&mut o, "conditional-star", c);
            o
        })),
        (9, "per-step bound |H(Q^m) - H(Q_x^m)| <= m K(Q) on 20 systems, m <= 5", Box::new(|c: &RunConfig| {
            let mut o = Outcome::new();
            suite(&mut o, "step-bound", c);
            o
        })),
        (10, "relative addition f(P v Q) = f(Q) + f(P | Sigma(Q)) on 10 actions", Box::new(|c: &RunConfig| {
            let mut o = Outcome::new();
            suite(&mut o, "relative-addition", c);
            o
        })),
        (11, "property suites: cylinders, window entropy, rate increments, ball sizes, stabilization", Box::new(|c: &RunConfig| {
            let mut o = Outcome::new();
            for s in ["cylinder-measures", "window-entropy", "rate-increments", "ball-sizes", "window-stabilization"] {
                suite(&mut o, s, c);
            }
            o
        })),
    ];
    let mut all_ok = true;
    for (n, desc, f) in &criteria {
        let start = Instant::now();
        let o = f(&cfg);
        let secs = start.elapsed().as_secs_f64();
        let label = if o.ok { "PASS" } else { "FAIL" };
        println!("{label} criterion {n:>2}: {desc} [{TOLERANCE}, {secs:.1}s]");
        for f in &o.failures {
            println!("      {f}");
        }
        all_ok &= o.ok;
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
