use crate::error::{Error, Result};

/// Stand-in for a probability of exactly 0 inside an entropy term.
pub const PHI: f64 = 1e-6;

fn smooth(p: f64) -> f64 {
    if p == 0.0 {
        PHI
    } else if p == 1.0 {
        1.0 - PHI
    } else {
        p
    }
}

/// Entropy in bits of a two-class split with the given counts.
pub fn binary_entropy(a: u64, b: u64) -> f64 {
    let n = (a + b) as f64;
    let p = smooth(a as f64 / n);
    let q = smooth(b as f64 / n);
    -(p * p.log2()) - q * q.log2()
}

/// Prior class entropy minus the expected class entropy once presence of
/// the feature is known, in bits, floored at 0.
pub fn expected_entropy_loss(pos_df: u64, neg_df: u64, pos_total: u64, neg_total: u64) -> Result<f64> {
    if pos_total == 0 || neg_total == 0 || pos_df > pos_total || neg_df > neg_total {
        return Err(Error::InvalidCounts { pos_df, neg_df, pos_total, neg_total });
    }
    let n = (pos_total + neg_total) as f64;
    let with = pos_df + neg_df;
    let (pos_without, neg_without) = (pos_total - pos_df, neg_total - neg_df);
    let without = pos_without + neg_without;
    let prior = binary_entropy(pos_total, neg_total);
    // Weighted sum of per-branch drops, so a branch whose class mix equals
    // the prior contributes exactly 0.
    let mut loss = 0.0;
    if with > 0 {
        loss += with as f64 * (prior - binary_entropy(pos_df, neg_df));
    }
    if without > 0 {
        loss += without as f64 * (prior - binary_entropy(pos_without, neg_without));
    }
    Ok((loss / n).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn perfect_separator() {
        let e = expected_entropy_loss(10, 0, 10, 10).unwrap();
        assert!((e - 1.0).abs() < 1e-4, "{e}");
    }

    #[test]
    fn uninformative() {
        assert_eq!(expected_entropy_loss(10, 10, 10, 10).unwrap(), 0.0);
        assert_eq!(expected_entropy_loss(3, 6, 10, 20).unwrap(), 0.0);
        assert_eq!(expected_entropy_loss(2, 4, 6, 12).unwrap(), 0.0);
        assert_eq!(expected_entropy_loss(7, 7, 7, 7).unwrap(), 0.0);
    }

    #[test]
    fn eight_of_ten() {
        let h = -(0.8f64 * 0.8f64.log2()) - 0.2 * 0.2f64.log2();
        let e = expected_entropy_loss(8, 2, 10, 10).unwrap();
        assert!((e - (1.0 - h)).abs() < 1e-12);
        assert!((e - 0.2781).abs() < 5e-5);
    }

    #[test]
    fn invalid() {
        assert!(expected_entropy_loss(1, 0, 0, 5).is_err());
        assert!(expected_entropy_loss(6, 0, 5, 5).is_err());
        assert!(expected_entropy_loss(0, 6, 5, 5).is_err());
    }

    fn counts() -> impl Strategy<Value = (u64, u64, u64, u64)> {
        (1u64..200, 1u64..200).prop_flat_map(|(pt, nt)| (0..=pt, 0..=nt, Just(pt), Just(nt)))
    }

    proptest! {
        #[test]
        fn symmetric((pd, nd, pt, nt) in counts()) {
            prop_assert_eq!(
                expected_entropy_loss(pd, nd, pt, nt).unwrap(),
                expected_entropy_loss(nd, pd, nt, pt).unwrap()
            );
        }

        #[test]
        fn scale_invariant((pd, nd, pt, nt) in counts()) {
            prop_assert_eq!(
                expected_entropy_loss(pd, nd, pt, nt).unwrap(),
                expected_entropy_loss(2 * pd, 2 * nd, 2 * pt, 2 * nt).unwrap()
            );
        }

        #[test]
        fn bounded_by_prior((pd, nd, pt, nt) in counts()) {
            let e = expected_entropy_loss(pd, nd, pt, nt).unwrap();
            prop_assert!(e >= 0.0);
            prop_assert!(e <= binary_entropy(pt, nt) + 1e-12);
        }

        #[test]
        fn perfect_separator_is_best((pd, nd, pt, nt) in counts()) {
            let best = expected_entropy_loss(pt, 0, pt, nt).unwrap();
            prop_assert!(expected_entropy_loss(pd, nd, pt, nt).unwrap() <= best + 1e-12);
        }
    }
}
