//! Information-theoretic key encapsulation from correlated randomness.
//!
//! Alice, Bob and Eve hold `n` IID draws `(x, y, z)` of a known joint source.
//! [`ikem`] turns Alice's string into a short ciphertext and a key that Bob
//! recovers from his own string; [`dem`] and [`hybrid`] use that key to
//! encrypt messages, and [`harness`] measures the resulting security games
//! exactly or by simulation.

pub mod bits;
pub mod cli;
pub mod dem;
pub mod error;
pub mod gf2;
pub mod harness;
pub mod hybrid;
pub mod ikem;
pub mod source;
pub mod uhf;

pub use bits::Bits;
pub use error::{Error, Result};
pub use source::{JointSource, SampleTriple, Symbol};
