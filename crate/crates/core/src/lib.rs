//! Placement delivery arrays (PDAs) for shared-link coded caching.
//!
//! The crate covers the array model and its verifier, the base
//! constructions, the Cartesian-power frameworks that trade a little load
//! for a large drop in subpacketization, an XOR delivery simulator, and
//! exact evaluators for comparing scheme families.

pub mod bench;
pub mod cartesian;
pub mod certificate;
pub mod combinatorics;
pub mod construct;
pub mod matching;
pub mod pda;
pub mod sim;
pub mod text;

pub use cartesian::{
    cartesian_power, downgrade_regular, flatten, theorem1_scheme, theorem2_scheme, CartesianError,
    CodeVector, VectorPda,
};
pub use certificate::{
    find_certificate, search_certificate, verify_certificate, Infeasible, Stage, StarRowCertificate,
};
pub use construct::{cwzw_pda, mn_pda, near_square_pda, replicate_users, ytcc_pda, ParamError};
pub use pda::{verify_grid, CheckReport, Entry, Pda, PdaError, PdaParams, Rule, Violation};
pub use text::{read_pda, write_pda, ParseError};
