//! Empirical experiments around the open questions: average-case sweeps of
//! L and T, the kernel rank explorer for (L(n)), and a classical continued
//! fraction baseline.

pub mod cf;
pub mod decimal;
pub mod kernel;
pub mod sweep;

pub use cf::{cf_evaluate, cf_expand, compare_cf, CfExpansion, CompareBand, COMPARE_CSV_HEADER};
pub use kernel::{kernel_rank_profile, kernel_rank_profile_of, KernelReport, KERNEL_INDEX_LIMIT};
pub use sweep::{sequence_l, sweep_stats, SweepRow, SEQUENCE_LIMIT, SWEEP_CSV_HEADER, SWEEP_Q_LIMIT};
