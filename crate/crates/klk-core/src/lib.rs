//! Kazhdan–Lusztig combinatorics for the symmetric group, driving a
//! classifier for Kostant's problem on simple highest-weight modules in
//! the regular block of sl_n.
//!
//! The pieces, bottom to top: exact Laurent polynomials ([`laurent`]),
//! permutations with Bruhat order and RSK ([`perm`]), the Hecke algebra
//! with its KL basis and μ-function ([`hecke`]), cells and the a-function
//! ([`cells`]), graded characters and projective functors
//! ([`characters`]), the verdict engine ([`kostant`]) and brute-force
//! validation suites ([`oracle`]).

pub mod cells;
pub mod characters;
pub mod error;
pub mod hecke;
pub mod kostant;
pub mod laurent;
pub mod oracle;
pub mod perm;

pub use error::{Error, Result};

use cells::CellDecomposition;
use characters::CharacterEngine;
use hecke::{DescentChoice, KLTable};
use perm::{GroupData, DEFAULT_RANK_CAP};
use std::sync::Arc;

/// Everything needed to answer queries at one rank: the KL table, the
/// cell decomposition derived from it, and the character engine with its
/// memo. Construction is single-writer; afterwards the whole structure is
/// immutable and can be shared across threads.
pub struct Engine {
    table: Arc<KLTable>,
    cells: Arc<CellDecomposition>,
    chars: CharacterEngine,
}

impl Engine {
    pub fn new(n: u8) -> Result<Self> {
        Self::new_capped(n, DEFAULT_RANK_CAP)
    }

    pub fn new_capped(n: u8, cap: u8) -> Result<Self> {
        Self::from_table(Arc::new(KLTable::build_capped(
            n,
            cap,
            DescentChoice::default(),
        )?))
    }

    pub fn from_table(table: Arc<KLTable>) -> Result<Self> {
        let cells = Arc::new(cells::build_cells(&table)?);
        let chars = CharacterEngine::new(table.clone());
        Ok(Engine {
            table,
            cells,
            chars,
        })
    }

    pub fn n(&self) -> u8 {
        self.table.n()
    }

    pub fn table(&self) -> &Arc<KLTable> {
        &self.table
    }

    pub fn group(&self) -> &Arc<GroupData> {
        self.table.group()
    }

    pub fn cells(&self) -> &Arc<CellDecomposition> {
        &self.cells
    }

    pub fn chars(&self) -> &CharacterEngine {
        &self.chars
    }
}
