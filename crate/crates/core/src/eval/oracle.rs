use num_complex::Complex64;

use crate::airlink::{ChannelRealization, SymbolVector};
use crate::numerics::stack;
use crate::pm_solver::evaluate;

use super::EvalError;

/// Largest antenna count the exhaustive search accepts (`4^8` candidates).
pub const ORACLE_MAX_ANTENNAS: usize = 8;

/// Enumerates every `x_Q` in `O^N` and returns the one maximizing `det P`
/// (first in enumeration order on ties).
pub fn exhaustive_oracle(ch: &ChannelRealization, s: &SymbolVector) -> Result<(Vec<Complex64>, f64), EvalError> {
    let n = ch.antennas();
    if n > ORACLE_MAX_ANTENNAS {
        return Err(EvalError::SizeBound {
            what: "exhaustive search antennas",
            size: n,
            bound: ORACLE_MAX_ANTENNAS,
        });
    }
    if s.len() != ch.users() {
        return Err(EvalError::InvalidArgument("symbol vector length differs from user count".into()));
    }
    let mut best: Option<(usize, f64)> = None;
    for code in 0..1usize << (2 * n) {
        let x = SymbolVector::from_index(code, n).expect("code in range");
        let det = evaluate(ch, &stack(x.symbols()), s).det_p;
        if best.is_none_or(|(_, b)| det > b) {
            best = Some((code, det));
        }
    }
    let (code, det) = best.expect("at least one candidate");
    Ok((SymbolVector::from_index(code, n).expect("code in range").symbols().to_vec(), det))
}
