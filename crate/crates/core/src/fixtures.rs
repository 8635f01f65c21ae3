//! Bundled synthetic disclosure tapes. Both are constructed from published
//! program aggregates, not from real daily disclosures.

/// 73 trading days, £184m gross, meant to be audited against 187 allowed days.
pub const EXAMPLE1_TAPE: &str = include_str!("../fixtures/example1_tape.csv");
pub const EXAMPLE1_ALLOWED_DAYS: usize = 187;

/// 125 trading days, £435m gross, front-loaded.
pub const EXAMPLE2_TAPE: &str = include_str!("../fixtures/example2_tape.csv");
pub const EXAMPLE2_ALLOWED_DAYS: usize = 125;
