// SPDX-License-Identifier: Apache-2.0

use cpm_computable::{CmpOp, MacroOp, Operand};
use cpm_core::{Result, Topology};
use serde::Serialize;

use crate::{load_nb, AlgoConfig, AlgorithmReport};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThresholdResult {
    pub flags: Vec<bool>,
    pub count: usize,
}

/// Flags `item <cmp> value` everywhere in one broadcast; the count comes
/// from the parallel counter.
pub fn threshold(
    values: &[u64],
    value: u64,
    cmp: CmpOp,
    cfg: AlgoConfig,
) -> Result<AlgorithmReport<ThresholdResult>> {
    let n = values.len();
    let params = [("n", n as i64), ("value", value as i64)];
    if n == 0 {
        let r = ThresholdResult {
            flags: vec![],
            count: 0,
        };
        return Ok(AlgorithmReport::new(r, &params, Default::default()));
    }
    let mut mem = cfg.memory(Topology::line(n), 2)?;
    load_nb(&mut mem, values)?;
    let before = mem.ledger();
    mem.activate_all()?;
    mem.run(MacroOp::Threshold {
        src: Operand::Neighbor,
        value,
        cmp,
    })?;
    let count = mem.count_matches();
    let lines = mem.match_lines();
    let flags = (0..n).map(|i| lines.get(i)).collect();
    Ok(AlgorithmReport::new(
        ThresholdResult { flags, count },
        &params,
        mem.ledger() - before,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn at_least_five() {
        let r = threshold(&[1, 5, 9], 5, CmpOp::Ge, AlgoConfig::default()).unwrap();
        assert_eq!(r.result.flags, vec![false, true, true]);
        assert_eq!(r.result.count, 2);
        assert_eq!(r.ledger.macro_cycles, 3);
    }
}
