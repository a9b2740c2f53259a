mod common;

use common::{basis_from_columns, big};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use proptest::prelude::*;
use schnorr_vqe::ising::{build_hamiltonian, exact_ground_state, QuboProblem, Selection};

fn problem(n: usize) -> impl Strategy<Value = (Vec<Vec<i64>>, Vec<i64>, Vec<i64>)> {
    (
        proptest::collection::vec(proptest::collection::vec(-30i64..=30, n + 1), n),
        proptest::collection::vec(-100i64..=100, n + 1),
        proptest::collection::vec(-100i64..=100, n + 1),
    )
}

fn any_problem() -> impl Strategy<Value = (Vec<Vec<i64>>, Vec<i64>, Vec<i64>)> {
    (1usize..=6).prop_flat_map(problem)
}

/// `‖t − b_op − Σ x_i b_i‖²` evaluated directly in i64.
fn direct_cost(cols: &[Vec<i64>], b_op: &[i64], t: &[i64], x: &[bool]) -> u64 {
    (0..t.len())
        .map(|k| {
            let mut r = t[k] - b_op[k];
            for (col, &bit) in cols.iter().zip(x) {
                if bit {
                    r -= col[k];
                }
            }
            (r * r) as u64
        })
        .sum()
}

proptest! {
    #[test]
    fn spin_and_bit_forms_agree((cols, b_op, t) in any_problem()) {
        let n = cols.len();
        let p = QuboProblem::new(big(&b_op), &basis_from_columns(&cols), big(&t)).unwrap();
        for idx in 0..1usize << n {
            let x = Selection::from_index(idx, n);
            let bits = p.cost(&x).unwrap();
            prop_assert_eq!(bits.clone(), BigUint::from(direct_cost(&cols, &b_op, &t, &x.0)));
            let spins = p.spin_cost(&x.spins()).unwrap();
            prop_assert_eq!(spins, BigRational::from_integer(BigInt::from(bits)));
        }
    }

    #[test]
    fn cost_is_translation_invariant((cols, b_op, t) in any_problem(), shift_coeffs in proptest::collection::vec(-3i64..=3, 6)) {
        let n = cols.len();
        let basis = basis_from_columns(&cols);
        let shift = basis.combine(&big(&shift_coeffs[..n]));
        let moved = |v: &[i64]| -> Vec<BigInt> { big(v).iter().zip(&shift).map(|(a, s)| a + s).collect() };
        let p = QuboProblem::new(big(&b_op), &basis, big(&t)).unwrap();
        let q = QuboProblem::new(moved(&b_op), &basis, moved(&t)).unwrap();
        prop_assert_eq!(build_hamiltonian(&p).unwrap(), build_hamiltonian(&q).unwrap());
    }

    #[test]
    fn table_is_indexed_msb_first((cols, b_op, t) in any_problem()) {
        let n = cols.len();
        let p = QuboProblem::new(big(&b_op), &basis_from_columns(&cols), big(&t)).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        prop_assert_eq!(h.dim(), 1usize << n);
        for idx in 0..h.dim() {
            let x: Vec<bool> = (0..n).map(|i| idx >> (n - 1 - i) & 1 == 1).collect();
            prop_assert_eq!(&h.energies()[idx], &BigUint::from(direct_cost(&cols, &b_op, &t, &x)));
        }
        let (g, e) = exact_ground_state(&h);
        prop_assert!(h.energies().iter().all(|v| v >= &e));
        prop_assert!(h.energies()[..g.index()].iter().all(|v| v > &e));
    }
}

#[test]
fn selection_round_trip() {
    for n in 1..=6 {
        for idx in 0..1usize << n {
            let s = Selection::from_index(idx, n);
            assert_eq!(s.index(), idx);
            assert_eq!(s.to_string().parse::<Selection>().unwrap(), s);
        }
    }
    assert_eq!(Selection::from_index(4, 3).to_string(), "100");
    assert!("10a".parse::<Selection>().is_err());
}
