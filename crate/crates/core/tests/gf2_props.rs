use nihcoll::gf2::{bin, enumeration_matrix};
use nihcoll::Gf2Matrix;
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Gf2Matrix> {
    proptest::collection::vec(proptest::collection::vec(any::<bool>(), cols), rows)
        .prop_map(move |r| if rows == 0 { Gf2Matrix::zeros(0, cols) } else { Gf2Matrix::from_rows(&r).unwrap() })
}

/// Three matrices with chained inner dimensions.
fn chain() -> impl Strategy<Value = (Gf2Matrix, Gf2Matrix, Gf2Matrix)> {
    (1usize..=16, 1usize..=16, 1usize..=16, 1usize..=16)
        .prop_flat_map(|(a, b, c, d)| (matrix(a, b), matrix(b, c), matrix(c, d)))
}

/// Schoolbook product over bools, independent of the packed kernel.
fn naive_mul(a: &Gf2Matrix, b: &Gf2Matrix) -> Gf2Matrix {
    let mut out = Gf2Matrix::zeros(a.rows(), b.cols());
    for i in 0..a.rows() {
        for j in 0..b.cols() {
            let v = (0..a.cols()).fold(false, |acc, t| acc ^ (a.get(i, t) & b.get(t, j)));
            out.set(i, j, v);
        }
    }
    out
}

/// Rank by brute force: size of the row span, which is 2^rank.
fn span_rank(a: &Gf2Matrix) -> usize {
    let rows: Vec<Vec<bool>> = (0..a.rows()).map(|r| a.row_bits(r)).collect();
    let mut span = std::collections::HashSet::new();
    span.insert(vec![false; a.cols()]);
    for r in rows {
        let next: Vec<Vec<bool>> = span.iter().map(|v| v.iter().zip(&r).map(|(x, y)| x ^ y).collect()).collect();
        span.extend(next);
    }
    span.len().trailing_zeros() as usize
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn product_is_associative((a, b, c) in chain()) {
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(a.mul(&b).unwrap(), naive_mul(&a, &b));
    }

    #[test]
    fn rank_matches_transpose((a, _, _) in chain()) {
        prop_assert_eq!(a.rank(), a.transpose().rank());
        prop_assert!(a.rank() <= a.rows().min(a.cols()));
    }

    #[test]
    fn product_rank_is_bounded((a, b, _) in chain()) {
        let r = a.mul(&b).unwrap().rank();
        prop_assert!(r <= a.rank().min(b.rank()));
    }

    #[test]
    fn rank_agrees_with_span(a in (1usize..=8, 1usize..=10).prop_flat_map(|(r, c)| matrix(r, c))) {
        prop_assert_eq!(a.rank(), span_rank(&a));
    }

    #[test]
    fn text_round_trip(a in (0usize..=5, 1usize..=70).prop_flat_map(|(r, c)| matrix(r, c))) {
        let text = a.to_text();
        prop_assert_eq!(Gf2Matrix::from_text(&text).unwrap(), a);
    }
}

#[test]
fn enumeration_rows_are_binary_expansions() {
    for k in 1..=10 {
        let b = enumeration_matrix(k).unwrap();
        assert_eq!(b.rows(), 1 << k);
        assert_eq!(b.rank(), k);
        for j in 0..1u64 << k {
            assert_eq!(b.row_bits(j as usize), bin(k, j));
        }
    }
}

#[test]
fn mismatched_product_is_an_error() {
    assert!(Gf2Matrix::zeros(2, 3).mul(&Gf2Matrix::zeros(2, 3)).is_err());
}
