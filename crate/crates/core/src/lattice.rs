//! Integer-indexed difference stencils on the element lattice.
//!
//! Only the composites `delta^2` and `mu delta` are provided. Both act on
//! 0-based indices; on a bounded lattice the first and last elements have
//! no neighbour on one side and are rejected.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    Periodic,
    Bounded,
}

/// Indices of the left and right neighbours of `j`.
pub fn neighbours(len: usize, j: usize, topology: Topology) -> Result<(usize, usize)> {
    if j >= len {
        return Err(Error::IndexOutOfRange { index: j, len });
    }
    match topology {
        Topology::Periodic => Ok(((j + len - 1) % len, (j + 1) % len)),
        Topology::Bounded if j == 0 || j + 1 == len => Err(Error::IndexOutOfRange { index: j, len }),
        Topology::Bounded => Ok((j - 1, j + 1)),
    }
}

/// `v[j+1] - 2 v[j] + v[j-1]`.
pub fn second_difference(v: &[Complex64], j: usize, topology: Topology) -> Result<Complex64> {
    let (l, r) = neighbours(v.len(), j, topology)?;
    Ok(v[r] - 2.0 * v[j] + v[l])
}

/// `(v[j+1] - v[j-1]) / 2`.
pub fn mean_difference(v: &[Complex64], j: usize, topology: Topology) -> Result<Complex64> {
    let (l, r) = neighbours(v.len(), j, topology)?;
    Ok(0.5 * (v[r] - v[l]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn re(values: &[f64]) -> Vec<Complex64> {
        values.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn stencil_examples() {
        let b = Topology::Bounded;
        assert_eq!(second_difference(&re(&[1.0, 1.0, 1.0]), 1, b).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(second_difference(&re(&[0.0, 0.0, 1.0]), 1, b).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(second_difference(&re(&[1.0, 2.0, 4.0]), 1, b).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(mean_difference(&re(&[1.0, 1.0, 1.0]), 1, b).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(mean_difference(&re(&[0.0, 0.0, 1.0]), 1, b).unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(mean_difference(&re(&[1.0, 2.0, 4.0]), 1, b).unwrap(), Complex64::new(1.5, 0.0));
    }

    #[test]
    fn bounded_ends_are_rejected_and_periodic_wraps() {
        let v = re(&[1.0, 2.0, 4.0]);
        assert!(second_difference(&v, 0, Topology::Bounded).is_err());
        assert!(mean_difference(&v, 2, Topology::Bounded).is_err());
        assert!(second_difference(&v, 3, Topology::Periodic).is_err());
        assert_eq!(second_difference(&v, 0, Topology::Periodic).unwrap(), Complex64::new(4.0, 0.0));
        assert_eq!(mean_difference(&v, 2, Topology::Periodic).unwrap(), Complex64::new(-0.5, 0.0));
    }

    #[test]
    fn plane_wave_symbols() {
        let n = 24;
        let h = std::f64::consts::TAU;
        for &kappa in &[0.0, 0.013, 0.1, 0.37] {
            // kappa need not be commensurate: evaluate on a bounded lattice away from the ends.
            let v: Vec<Complex64> = (0..n).map(|j| Complex64::from_polar(1.0, kappa * j as f64 * h)).collect();
            for j in 1..n - 1 {
                let d2 = second_difference(&v, j, Topology::Bounded).unwrap() / v[j];
                let md = mean_difference(&v, j, Topology::Bounded).unwrap() / v[j];
                assert!((d2 - Complex64::new(2.0 * (kappa * h).cos() - 2.0, 0.0)).norm() < 1e-12);
                assert!((md - Complex64::new(0.0, (kappa * h).sin())).norm() < 1e-12);
            }
        }
    }

    fn complex_vec(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Complex64::new(a, b)), len)
    }

    proptest! {
        #[test]
        fn stencils_are_linear(
            u in complex_vec(7),
            v in complex_vec(7),
            (sa, sb) in ((-2.0f64..2.0), (-2.0f64..2.0)),
            j in 0usize..7,
        ) {
            let alpha = Complex64::new(sa, sb);
            let beta = Complex64::new(sb, -sa);
            let combo: Vec<Complex64> = u.iter().zip(&v).map(|(x, y)| alpha * x + beta * y).collect();
            let t = Topology::Periodic;
            let lhs = second_difference(&combo, j, t).unwrap();
            let rhs = alpha * second_difference(&u, j, t).unwrap() + beta * second_difference(&v, j, t).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-14);
            let lhs = mean_difference(&combo, j, t).unwrap();
            let rhs = alpha * mean_difference(&u, j, t).unwrap() + beta * mean_difference(&v, j, t).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-14);
        }
    }
}
