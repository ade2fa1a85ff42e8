//! Clifford-deformed tile codes under biased noise.
//!
//! Code construction ([`tilecode`], [`deform`]), pure-Z logical structure ([`blo`]),
//! analytic failure bounds ([`bounds`]), biased channels ([`channel`]), BP-OSD decoding
//! ([`bposd`]), Monte-Carlo threshold estimation ([`capacity`]), the repetition-cascade
//! decoder ([`weightred`]), syndrome-extraction circuits ([`circuit`]) and effective-bias
//! estimation ([`effbias`]).

pub mod algebra;
pub mod tilecode;
pub mod deform;
pub mod rng;
pub mod blo;
pub mod bounds;
pub mod channel;
pub mod bposd;
pub mod capacity;
pub mod weightred;
pub mod circuit;
pub mod effbias;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
