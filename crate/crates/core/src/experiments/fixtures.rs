use std::sync::Arc;

use crate::error::Result;
use crate::setfn::{GramianModel, GramianObjective, Table};

// Found by scanning seeds upward from 0 with the brute-force
// diminishing-returns test; the first seed already fails for both objectives.
pub const WITNESS_DIM: usize = 3;
pub const WITNESS_GROUND: usize = 6;
pub const WITNESS_BETA: f64 = 1.0;
pub const WITNESS_SEED: u64 = 0;

fn witness_model() -> Result<Arc<GramianModel>> {
    Ok(Arc::new(GramianModel::gaussian(
        WITNESS_DIM,
        WITNESS_GROUND,
        WITNESS_BETA,
        WITNESS_SEED,
        true,
    )?))
}

/// Tabulated `λ_1(W_S) - β²` on a frozen instance that is not submodular.
pub fn min_eig_witness() -> Result<Table> {
    Table::tabulate(&GramianObjective::min_eig(witness_model()?)?)
}

/// Tabulated `tr(Λ0⁻¹) - tr(W_S⁻¹)` on a frozen instance that is not
/// submodular.
pub fn neg_trace_inv_witness() -> Result<Table> {
    Table::tabulate(&GramianObjective::neg_trace_inv(witness_model()?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::is_submodular_bruteforce;

    #[test]
    fn witnesses_fail_diminishing_returns() {
        let r = is_submodular_bruteforce(&min_eig_witness().unwrap(), 1e-9).unwrap();
        assert!(!r.submodular && r.worst_violation > 0.1);
        let r = is_submodular_bruteforce(&neg_trace_inv_witness().unwrap(), 1e-9).unwrap();
        assert!(!r.submodular && r.worst_violation > 1e-3);
    }
}
