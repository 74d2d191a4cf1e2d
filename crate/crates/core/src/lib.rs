//! Exact-arithmetic convolutional codes over erasure channels.

pub mod channel;
pub mod codec;
pub mod construct;
pub mod distance;
pub mod error;
pub mod gf;
pub mod polymat;
pub mod sliding;

pub use error::{Error, Result};

/// Caps on exhaustive work. `CONVEC_BUDGET` overrides both.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Maximum number of index sets an enumeration may visit.
    pub enumeration: u64,
    /// Maximum number of message prefixes a brute-force distance search may visit.
    pub brute_force: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            enumeration: 10_000_000,
            brute_force: 1 << 22,
        }
    }
}

impl Budget {
    pub fn from_env() -> Self {
        match std::env::var("CONVEC_BUDGET").ok().and_then(|v| v.trim().parse().ok()) {
            Some(cap) => Budget {
                enumeration: cap,
                brute_force: cap,
            },
            None => Budget::default(),
        }
    }
}
