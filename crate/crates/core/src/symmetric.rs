//! Elementary symmetric functions of principal curvatures and the
//! Newton–Maclaurin margin.

use crate::error::{GeomError, Result};
use crate::geometry::binomial;

/// `e_0, …, e_m` of `values` by the usual O(m²) recurrence.
pub fn elementary_symmetric_all(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (i, &x) in values.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] += x * e[k - 1];
        }
    }
    e
}

/// `e_k(values)`; `e_0 = 1`.
pub fn elementary_symmetric(values: &[f64], k: usize) -> Result<f64> {
    if k > values.len() {
        return Err(GeomError::Index { k, n: values.len() });
    }
    Ok(elementary_symmetric_all(values)[k])
}

/// `H₁/n − (H_k / C(n,k))^{1/k}` for nonnegative curvatures; never negative
/// beyond round-off.
pub fn newton_maclaurin_margin(curvatures: &[f64], k: usize) -> Result<f64> {
    let n = curvatures.len();
    if k == 0 || k > n {
        return Err(GeomError::Index { k, n });
    }
    if let Some(bad) = curvatures.iter().find(|&&c| !(c >= 0.0)) {
        return Err(GeomError::domain(format!(
            "Newton-Maclaurin margin needs nonnegative curvatures, got {bad}"
        )));
    }
    let e = elementary_symmetric_all(curvatures);
    let mean = e[1] / n as f64;
    let normalized = (e[k] / binomial(n, k)).max(0.0);
    Ok(mean - normalized.powf(1.0 / k as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sphere_values() {
        assert_eq!(elementary_symmetric(&[1.0, 1.0], 1).unwrap(), 2.0);
        assert_eq!(elementary_symmetric(&[1.0, 1.0], 2).unwrap(), 1.0);
        assert_eq!(elementary_symmetric(&[2.0, 3.0], 2).unwrap(), 6.0);
        assert_eq!(elementary_symmetric(&[2.0, 3.0], 0).unwrap(), 1.0);
    }

    #[test]
    fn index_out_of_range() {
        assert!(matches!(
            elementary_symmetric(&[1.0, 1.0], 3),
            Err(GeomError::Index { k: 3, n: 2 })
        ));
    }

    #[test]
    fn margin_examples() {
        assert!(newton_maclaurin_margin(&[1.0, 1.0], 2).unwrap().abs() < 1e-15);
        assert_eq!(newton_maclaurin_margin(&[0.0, 2.0], 2).unwrap(), 1.0);
        assert!(newton_maclaurin_margin(&[-1.0, 2.0], 1).is_err());
        assert!(newton_maclaurin_margin(&[1.0, 2.0], 0).is_err());
    }

    fn brute_force_e(values: &[f64], k: usize) -> f64 {
        // Sum over all k-subsets encoded as bitmasks.
        let m = values.len();
        (0u32..(1 << m))
            .filter(|mask| mask.count_ones() as usize == k)
            .map(|mask| {
                (0..m)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| values[i])
                    .product::<f64>()
            })
            .sum()
    }

    proptest! {
        #[test]
        fn recurrence_matches_subsets(values in proptest::collection::vec(-3.0f64..3.0, 1..7)) {
            for k in 0..=values.len() {
                let fast = elementary_symmetric(&values, k).unwrap();
                let slow = brute_force_e(&values, k);
                prop_assert!((fast - slow).abs() <= 1e-9 * (1.0 + slow.abs()));
            }
        }

        #[test]
        fn margin_nonnegative(values in proptest::collection::vec(0.0f64..10.0, 1..6), k in 1usize..6) {
            prop_assume!(k <= values.len());
            prop_assert!(newton_maclaurin_margin(&values, k).unwrap() >= -1e-12);
        }
    }
}
