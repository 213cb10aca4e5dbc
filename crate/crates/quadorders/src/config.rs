//! Runtime resource budgets.
//!
//! Every potentially unbounded loop in the crate (continued-fraction
//! expansion, form-cycle walks, direct Pell scans, prime sieving) draws its
//! limit from here. Defaults are generous enough for every supported search
//! range; each can be overridden through an environment variable, read once
//! per process.

use std::sync::OnceLock;

/// Upper bound (exclusive) for the shared prime sieve.
/// Override: `QUADORDERS_SIEVE_LIMIT`.
pub const DEFAULT_SIEVE_LIMIT: u64 = 10_000_000;

/// Maximum number of continued-fraction steps when expanding ω until the
/// period closes. Override: `QUADORDERS_CF_STEPS`.
pub const DEFAULT_CF_STEPS: u64 = 100_000_000;

/// Maximum number of ρ-steps in a single form-cycle walk.
/// Override: `QUADORDERS_FORM_STEPS`.
pub const DEFAULT_FORM_STEPS: u64 = 10_000_000;

/// Maximum |b| tried by the direct two-variable Pell scans.
/// Override: `QUADORDERS_PELL_SCAN`.
pub const DEFAULT_PELL_SCAN: u64 = 1_000_000;

fn env_u64(name: &str, default: u64) -> u64 {
    match std::env::var(name) {
        Ok(s) => s.trim().parse().unwrap_or(default),
        Err(_) => default,
    }
}

/// Sieve bound currently in effect.
pub fn sieve_limit() -> u64 {
    static LIMIT: OnceLock<u64> = OnceLock::new();
    *LIMIT.get_or_init(|| env_u64("QUADORDERS_SIEVE_LIMIT", DEFAULT_SIEVE_LIMIT))
}

/// Continued-fraction step budget currently in effect.
pub fn cf_step_limit() -> u64 {
    static LIMIT: OnceLock<u64> = OnceLock::new();
    *LIMIT.get_or_init(|| env_u64("QUADORDERS_CF_STEPS", DEFAULT_CF_STEPS))
}

/// Form-cycle step budget currently in effect.
pub fn form_step_limit() -> u64 {
    static LIMIT: OnceLock<u64> = OnceLock::new();
    *LIMIT.get_or_init(|| env_u64("QUADORDERS_FORM_STEPS", DEFAULT_FORM_STEPS))
}

/// Direct Pell-scan budget currently in effect.
pub fn pell_scan_limit() -> u64 {
    static LIMIT: OnceLock<u64> = OnceLock::new();
    *LIMIT.get_or_init(|| env_u64("QUADORDERS_PELL_SCAN", DEFAULT_PELL_SCAN))
}
