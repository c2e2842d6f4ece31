//! Resource caps shared by the expensive operations.

use std::time::Instant;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Caps {
    /// Maximum number of dominant weights held by one character.
    pub max_entries: usize,
    /// Largest `dim V_Y(λ)` handed to the direct pushforward.
    pub max_direct_dim: u128,
    /// Largest `dim V_Y(λ)` handed to level peeling.
    pub max_levelpeel_dim: u128,
    /// Largest `dim V_Y(λ)` handed to the constructed route.
    pub max_constructed_dim: u128,
    pub deadline: Option<Instant>,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_entries: 50_000_000,
            max_direct_dim: 2_000_000,
            max_levelpeel_dim: 1_000_000_000,
            max_constructed_dim: 1_000_000_000_000,
            deadline: None,
        }
    }
}

impl Caps {
    pub fn check_time(&self) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() > d => Err(Error::ResourceLimit("wall-clock budget exhausted".into())),
            _ => Ok(()),
        }
    }

    pub fn check_entries(&self, n: usize) -> Result<()> {
        if n > self.max_entries {
            return Err(Error::ResourceLimit(format!("{n} dominant entries exceed cap {}", self.max_entries)));
        }
        self.check_time()
    }
}
