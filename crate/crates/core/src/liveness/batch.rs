use serde::Serialize;

use super::{compute_pressure, solve_liveness, LivenessResult, PressureReport};
use crate::rvv_front::{FootprintMode, FunctionIr};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Analysis {
    pub liveness: LivenessResult,
    pub report: PressureReport,
}

pub fn analyze_function(ir: &FunctionIr, mode: FootprintMode) -> Analysis {
    let liveness = solve_liveness(ir);
    let report = compute_pressure(ir, &liveness, mode);
    Analysis { liveness, report }
}

/// Analyzes every function; results keep the input order.
///
/// Runs on the rayon pool when the `parallel` feature is enabled.
pub fn analyze_batch(irs: &[FunctionIr], mode: FootprintMode) -> Vec<Analysis> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        irs.par_iter().map(|ir| analyze_function(ir, mode)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        analyze_batch_sequential(irs, mode)
    }
}

pub fn analyze_batch_sequential(irs: &[FunctionIr], mode: FootprintMode) -> Vec<Analysis> {
    irs.iter().map(|ir| analyze_function(ir, mode)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liveness::synth::{random_batch, SynthParams};

    #[test]
    fn batch_matches_sequential() {
        let irs = random_batch(21, 64, &SynthParams::default());
        assert_eq!(
            analyze_batch(&irs, FootprintMode::Physical),
            analyze_batch_sequential(&irs, FootprintMode::Physical)
        );
    }
}
