// SPDX-License-Identifier: Apache-2.0

/// The PE's one-bit ALU. With `compare` clear the output is the condition
/// bit; with it set, whether the condition equals the datum. The match bit
/// forces the output high either way.
#[inline]
pub fn alu_eval(m: bool, compare: bool, v: bool, d: bool) -> bool {
    m || (compare && v == d) || (!compare && v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truth_table() {
        for row in 0..16u8 {
            let [m, c, v, d] = [8, 4, 2, 1].map(|b| row & b != 0);
            let want = m || (c && ((v && d) || (!v && !d))) || (!c && v);
            assert_eq!(alu_eval(m, c, v, d), want, "row {row:04b}");
        }
        assert!(alu_eval(false, true, true, true));
        assert!(!alu_eval(false, true, true, false));
        assert!(alu_eval(false, false, true, false));
        assert!(!alu_eval(false, false, false, true));
    }
}
