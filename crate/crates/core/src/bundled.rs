//! Design files shipped with the crate.

use crate::cli::format::{parse_dfg_file, parse_folding_spec};
use crate::cli::CostTable;
use crate::dfg::Dfg;
use crate::transforms::FoldingSpec;

pub const LPF_DFG: &str = include_str!("../designs/lpf.dfg");
pub const LPF_FOLD: &str = include_str!("../designs/lpf.fold");
pub const SWAPPED_FOLD: &str = include_str!("../designs/swapped.fold");
pub const DEFAULT_COST: &str = include_str!("../designs/default.cost");

/// Four-adder low-pass stage, `3z^-1(1 + z^-1)`.
pub fn lpf() -> Dfg {
    parse_dfg_file(LPF_DFG).expect("bundled design parses")
}

/// `N = 2`, S1 = {A1, A0}, S2 = {A2, A3}, one-stage adders.
pub fn lpf_spec() -> FoldingSpec {
    parse_folding_spec(LPF_FOLD).expect("bundled spec parses")
}

/// Like [`lpf_spec`] with A0 and A1 exchanged.
pub fn swapped_spec() -> FoldingSpec {
    parse_folding_spec(SWAPPED_FOLD).expect("bundled spec parses")
}

pub fn default_cost_table() -> CostTable {
    CostTable::parse(DEFAULT_COST).expect("bundled cost table parses")
}
