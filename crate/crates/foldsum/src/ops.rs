//! Field-operation counters.
//!
//! Counters are plain data owned by the caller; the polynomial and protocol
//! routines take `&mut OpCounter` and record every multiplication and
//! addition/subtraction they actually perform. Protocol engines keep several
//! counters (one per cost category) so that each complexity claim can be
//! checked against the matching measurement.

use serde::Serialize;

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OpCounter {
    pub adds: u64,
    pub muls: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, n: u64) {
        self.adds += n;
    }

    #[inline]
    pub fn mul(&mut self, n: u64) {
        self.muls += n;
    }

    pub fn total(&self) -> u64 {
        self.adds + self.muls
    }

    pub fn merge(&mut self, other: &OpCounter) {
        self.adds += other.adds;
        self.muls += other.muls;
    }
}
