use crate::error::{Error, Result};

use super::dense::{dot, norm};

/// Norms below this are treated as zero.
pub const ZERO_NORM: f64 = 1e-12;

/// `a·b / (‖a‖‖b‖)`, clamped to `[-1, 1]`.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let (na, nb) = (norm(a), norm(b));
    if na < ZERO_NORM || nb < ZERO_NORM {
        return Err(Error::ZeroNorm { row: None });
    }
    Ok((dot(a, b) / (na * nb)).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_directions() {
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[-2.0, 0.0]).unwrap(), -1.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            cosine_similarity(&[0.0, 0.0], &[1.0, 0.0]),
            Err(Error::ZeroNorm { .. })
        ));
        assert!(matches!(
            cosine_similarity(&[1.0], &[1.0, 0.0]),
            Err(Error::DimMismatch { .. })
        ));
    }

    proptest! {
        #[test]
        fn scale_invariant(
            a in prop::collection::vec(-10.0f64..10.0, 5),
            b in prop::collection::vec(-10.0f64..10.0, 5),
            alpha in 0.01f64..100.0,
            beta in 0.01f64..100.0,
        ) {
            prop_assume!(norm(&a) > 1e-3 && norm(&b) > 1e-3);
            let base = cosine_similarity(&a, &b).unwrap();
            let sa: Vec<f64> = a.iter().map(|v| v * alpha).collect();
            let sb: Vec<f64> = b.iter().map(|v| v * beta).collect();
            let scaled = cosine_similarity(&sa, &sb).unwrap();
            prop_assert!((base - scaled).abs() <= 1e-9);
            prop_assert!((-1.0..=1.0).contains(&base));
        }
    }
}
