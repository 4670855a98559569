use thiserror::Error;

/// Everything that can go wrong across the toolkit.
///
/// One flat enum keeps the CLI's error-to-exit-code mapping trivial:
/// parse/format/data problems are distinguishable from horizon/limit
/// problems without downcasting.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported line count {0}; supported widths are 3 and 4")]
    UnsupportedWidth(usize),

    #[error("line count mismatch: {0} lines vs {1} lines")]
    WidthMismatch(u8, u8),

    #[error("bad vector: {0}")]
    BadVector(String),

    #[error("bad circuit: {0}")]
    BadCircuit(String),

    #[error("bad benchmark suite: {0}")]
    BadSuite(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("not a database file (bad magic)")]
    BadMagic,

    #[error("unsupported database version {0}")]
    BadVersion(u16),

    #[error("database checksum mismatch (file damaged or truncated)")]
    BadChecksum,

    #[error("database file truncated")]
    Truncated,

    #[error("corrupt database: {0}")]
    CorruptDb(String),

    #[error("memory budget exceeded after {entries} entries (budget {budget} bytes)")]
    MemoryBudget { entries: u64, budget: u64 },

    #[error("function not covered by this database (depth {depth})")]
    NotInDatabase { depth: u8 },

    #[error("bound {bound} exceeds the database horizon {horizon} (depth {depth})")]
    Horizon { bound: u32, horizon: u32, depth: u8 },
}

pub type Result<T> = std::result::Result<T, Error>;
