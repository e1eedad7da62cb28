//! Classical ground truth by exhaustive enumeration of the inputs.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::clauses::{CexRecord, ClauseError, ClauseNetwork};

/// Widest input vector the oracle will enumerate.
pub const MAX_ORACLE_INPUTS: usize = 24;

const CHUNK: u64 = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{0} inputs exceed the enumeration bound of {MAX_ORACLE_INPUTS}")]
    TooManyInputs(usize),
    #[error(transparent)]
    Clause(#[from] ClauseError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub cex_list: Vec<CexRecord>,
    pub cex_count: u64,
    pub equivalent: bool,
}

/// Packed counter-examples of `cn`, ordered by input vector.
pub fn cex_assignments(cn: &ClauseNetwork) -> Result<Vec<u64>, OracleError> {
    let nx = cn.num_inputs();
    if nx > MAX_ORACLE_INPUTS {
        return Err(OracleError::TooManyInputs(nx));
    }
    let total = 1u64 << nx;
    let chunks = total.div_ceil(CHUNK);
    let mut found: Vec<u64> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            (c * CHUNK..((c + 1) * CHUNK).min(total))
                .map(|x| cn.propagate(x))
                .filter(|&v| cn.marked(v))
        })
        .collect();
    // Excluded assignments that are not forced by any input cannot be
    // consistent, so the walk over inputs above already sees all of them.
    found.sort_by_key(|&v| cn.input_index(v));
    Ok(found)
}

/// Every consistent assignment with the (augmented) miter set.
pub fn enumerate_cex(cn: &ClauseNetwork) -> Result<OracleReport, OracleError> {
    let found = cex_assignments(cn)?;
    Ok(OracleReport {
        cex_count: found.len() as u64,
        equivalent: found.is_empty(),
        cex_list: found.into_iter().map(|v| cn.record(v)).collect(),
    })
}

/// Whether `cex` is consistent with every aux definition and marked.
pub fn check_cex(cn: &ClauseNetwork, cex: &CexRecord) -> Result<bool, OracleError> {
    let v = cn.encode(cex)?;
    Ok(cn.marked(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clauses::build_miter;
    use crate::netlist::{parse_netlist, GateTag};

    fn miter(outer: &str, fault: GateTag) -> ClauseNetwork {
        let r = parse_netlist(&format!(
            "inputs x1 x2 x3\na1 = {outer}(x1,x2)\na2 = {outer}(a1,x3)\noutputs a2"
        ))
        .unwrap();
        build_miter(&r.replace_gate("a1", fault).unwrap(), &r).unwrap()
    }

    #[test]
    fn and_pair_has_two() {
        let cn = miter("AND", GateTag::Nor);
        let rep = enumerate_cex(&cn).unwrap();
        assert_eq!(rep.cex_count, 2);
        assert!(!rep.equivalent);
        for c in &rep.cex_list {
            assert!(check_cex(&cn, c).unwrap());
        }
        assert!(!check_cex(&cn, &cn.record(0)).unwrap());
    }

    #[test]
    fn flipping_an_aux_bit_breaks_consistency() {
        let cn = miter("AND", GateTag::Nor);
        for v in cex_assignments(&cn).unwrap() {
            for a in cn.num_inputs()..cn.num_vars() {
                assert!(!check_cex(&cn, &cn.record(v ^ 1 << a)).unwrap());
            }
        }
    }

    #[test]
    fn ordered_by_input() {
        let cn = miter("XOR", GateTag::Xnor);
        let xs: Vec<u64> = cex_assignments(&cn)
            .unwrap()
            .iter()
            .map(|&v| cn.input_index(v))
            .collect();
        assert_eq!(xs, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn too_wide() {
        let names: Vec<String> = (0..25).map(|i| format!("x{i}")).collect();
        let cn = ClauseNetwork::empty(names).unwrap();
        assert_eq!(enumerate_cex(&cn).unwrap_err(), OracleError::TooManyInputs(25));
    }
}
