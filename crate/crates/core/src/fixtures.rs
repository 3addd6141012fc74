//! Small hand-checkable matrices used by the examples and tests.

use crate::framework::{CrossImpactMatrix, Framework};

/// Like-indexed pairing matrix `[[+3,-3],[-3,+3]]`.
pub fn reinforcing_block() -> Vec<Vec<i32>> {
    vec![vec![3, -3], vec![-3, 3]]
}

/// Opposite-indexed pairing matrix `[[-3,+3],[+3,-3]]`.
pub fn opposing_block() -> Vec<Vec<i32>> {
    vec![vec![-3, 3], vec![3, -3]]
}

/// All cells absent.
pub fn zero_cim(counts: &[usize]) -> CrossImpactMatrix {
    CrossImpactMatrix::new(Framework::from_counts(counts).expect("valid counts"))
}

fn pair(block: Vec<Vec<i32>>) -> CrossImpactMatrix {
    zero_cim(&[2, 2])
        .cell_from(0, 1, block.clone())
        .and_then(|c| c.cell_from(1, 0, block))
        .expect("fixture cells are valid")
}

/// Two binary descriptors that reinforce matching states.
/// Consistent: (1,1) and (2,2).
pub fn mutual2() -> CrossImpactMatrix {
    pair(reinforcing_block())
}

/// Two binary descriptors that reinforce opposite states.
/// Consistent: (1,2) and (2,1).
pub fn anti2() -> CrossImpactMatrix {
    pair(opposing_block())
}

/// Three binary descriptors in a chain D1 - D2 - D3; D1 and D3 do not
/// interact. Consistent: (1,1,1) and (2,2,2).
pub fn agg3() -> CrossImpactMatrix {
    let m = reinforcing_block();
    let mut cim = zero_cim(&[2, 2, 2]);
    for (i, j) in [(0, 1), (1, 0), (1, 2), (2, 1)] {
        cim.set_cell(i, j, m.clone())
            .expect("fixture cells are valid");
    }
    cim
}

/// D1 follows D2 while D2 opposes D1: no consistent scenario exists and every
/// trajectory ends on a cycle.
pub fn pursuit2() -> CrossImpactMatrix {
    zero_cim(&[2, 2])
        .cell_from(0, 1, vec![vec![-1, 1], vec![1, -1]])
        .and_then(|c| c.cell_from(1, 0, vec![vec![1, -1], vec![-1, 1]]))
        .expect("fixture cells are valid")
}
