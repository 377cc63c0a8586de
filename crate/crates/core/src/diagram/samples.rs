//! Small worked diagrams.

use super::{Crossing, UprightDiagram};

/// One upward edge, no crossings.
pub fn d1() -> UprightDiagram {
    UprightDiagram::unknot()
}

/// A single positive kink.
pub fn d2() -> UprightDiagram {
    UprightDiagram::with_consecutive_labels(vec![Crossing::new(1, 2, 1)], &[(2, 1)]).unwrap()
}

/// A positive trefoil with seven edges.
pub fn d3() -> UprightDiagram {
    UprightDiagram::with_consecutive_labels(
        vec![Crossing::new(1, 1, 4), Crossing::new(1, 3, 6), Crossing::new(1, 5, 2)],
        &[(4, -1)],
    )
    .unwrap()
}
