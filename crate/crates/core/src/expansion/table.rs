//! The lowest-shell coefficients as tabulated in the literature, kept as
//! literal data so they can be compared against the closed formula.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{degenerate_subspace, Ame, ExactCoeff, FeTriple};
use crate::specfun::GaussianRational;

/// `(sign, radicand p/q, unit)`: the value `sign * sqrt(p/q) * unit` where
/// `unit` is 1 or i. A zero radicand encodes a zero entry.
type Entry = (i8, i64, i64, bool);

const Z: Entry = (1, 0, 1, false);

// Columns follow `degenerate_subspace(N)`: (0,0,1),(0,1,0),(1,0,0) for N=1 and
// (0,0,2),(0,1,1),(0,2,0),(1,0,1),(1,1,0),(2,0,0) for N=2.
const N1: [(i32, [Entry; 3]); 3] = [
    (1, [Z, (1, 1, 2, true), (-1, 1, 2, false)]),
    (0, [(1, 1, 1, false), Z, Z]),
    (-1, [Z, (1, 1, 2, true), (1, 1, 2, false)]),
];

const N2_L2: [(i32, [Entry; 6]); 5] = [
    (
        2,
        [
            Z,
            Z,
            (-1, 1, 4, false),
            Z,
            (-1, 1, 2, true),
            (1, 1, 4, false),
        ],
    ),
    (1, [Z, (1, 1, 2, true), Z, (-1, 1, 2, false), Z, Z]),
    (
        0,
        [
            (1, 2, 3, false),
            Z,
            (-1, 1, 6, false),
            Z,
            Z,
            (-1, 1, 6, false),
        ],
    ),
    (-1, [Z, (1, 1, 2, true), Z, (1, 1, 2, false), Z, Z]),
    (
        -2,
        [
            Z,
            Z,
            (-1, 1, 4, false),
            Z,
            (1, 1, 2, true),
            (1, 1, 4, false),
        ],
    ),
];

const N2_K1: [Entry; 6] = [
    (-1, 1, 3, false),
    Z,
    (-1, 1, 3, false),
    Z,
    Z,
    (-1, 1, 3, false),
];

fn exact(e: Entry) -> ExactCoeff {
    let (sign, p, q, imaginary) = e;
    if p == 0 {
        return ExactCoeff::zero();
    }
    let one = BigRational::from_integer(BigInt::from(1));
    let zero = BigRational::from_integer(BigInt::from(0));
    let unit = if imaginary {
        GaussianRational::new(zero, one)
    } else {
        GaussianRational::new(one, zero)
    };
    ExactCoeff::new(
        sign,
        BigRational::new(BigInt::from(p), BigInt::from(q)),
        unit,
    )
    .expect("literal table entries are valid")
}

/// Every coefficient with `N ≤ 2`, zeros included (46 entries).
pub fn reference_table() -> Vec<(Ame, FeTriple, ExactCoeff)> {
    let ame = |k, l, m| Ame::new(k, l, m).expect("valid literal state");
    let mut out = vec![(
        ame(0, 0, 0),
        FeTriple::new(0, 0, 0),
        exact((1, 1, 1, false)),
    )];
    let t1 = degenerate_subspace(1);
    for (m, row) in N1 {
        out.extend(
            t1.iter()
                .zip(row)
                .map(|(&t, e)| (ame(0, 1, m), t, exact(e))),
        );
    }
    let t2 = degenerate_subspace(2);
    for (m, row) in N2_L2 {
        out.extend(
            t2.iter()
                .zip(row)
                .map(|(&t, e)| (ame(0, 2, m), t, exact(e))),
        );
    }
    out.extend(
        t2.iter()
            .zip(N2_K1)
            .map(|(&t, e)| (ame(1, 0, 0), t, exact(e))),
    );
    out
}
