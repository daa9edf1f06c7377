//! Closed-form proximal operator of the l1 norm: elementwise soft
//! thresholding `z = [|u| - t]_+ . sgn(u)`.

use super::stacked::StackedVec;

#[inline]
pub fn soft_threshold(u: f64, t: f64) -> f64 {
    (u.abs() - t).max(0.0) * u.signum()
}

/// Soft-threshold every slot of the stacked vector at `t = 1/penalty`.
pub fn prox_l1(u: &StackedVec, t: f64) -> StackedVec {
    u.map(|v| soft_threshold(v, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn scalar_cases() {
        // penalty 1 -> threshold 1
        assert_eq!(soft_threshold(2.0, 1.0), 1.0);
        assert_eq!(soft_threshold(-0.5, 1.0), 0.0);
        // penalty 2 -> threshold 0.5
        assert_eq!(soft_threshold(-3.0, 0.5), -2.5);
        assert_eq!(soft_threshold(0.0, 0.3), 0.0);
    }

    proptest! {
        #[test]
        fn shrinks_magnitude_keeps_sign(u in -1e6f64..1e6, t in 0.0f64..1e3) {
            let z = soft_threshold(u, t);
            prop_assert!(z.abs() <= u.abs());
            prop_assert!(z == 0.0 || z.signum() == u.signum());
        }

        #[test]
        fn nonexpansive(u in -100.0f64..100.0, v in -100.0f64..100.0, t in 0.0f64..10.0) {
            let du = soft_threshold(u, t) - soft_threshold(v, t);
            prop_assert!(du.abs() <= (u - v).abs() + 1e-12);
        }

        #[test]
        fn idempotence_adjacent_identity(u in -100.0f64..100.0, t in 1e-6f64..10.0) {
            // For |u| > t: prox(prox(u) + t*sgn(prox(u))) == prox(u).
            prop_assume!(u.abs() > t);
            let z = soft_threshold(u, t);
            let again = soft_threshold(z + t * z.signum(), t);
            prop_assert!((again - z).abs() <= 1e-12 * z.abs().max(1.0));
        }
    }
}
