//! Entropy functionals over a common process interface.

mod functional;
mod process;

pub use functional::{
    addition_report, f_star_truncated, f_truncated, generator_entropy_rate,
    relative_f_truncated, relative_generator_entropy_rate, AdditionOutcome, AdditionVerdict,
    FReport, FRow, Mode, RateCertificate, RateOptions, RateResult, ReportCertificate,
    ReportOptions, StarValue, F_of, F_star_of, relative_F, relative_F_star,
};
pub use process::{BernoulliProcess, Exactness, FiniteProcess, FiniteSpaceProcess, KernelProcess};

#[cfg(test)]
mod tests;
