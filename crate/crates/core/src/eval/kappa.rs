use super::{EvalError, Result};
use crate::labels::{LabelVector, NUM_LABELS};

/// Cohen's kappa of two binary annotations of the same items.
///
/// When chance agreement `p_e` is 1 both annotators gave one constant answer,
/// which for equal-length binary sequences means they agree everywhere; the
/// result is then 1.0.
pub fn cohen_kappa(a: &[bool], b: &[bool]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(EvalError::Empty);
    }
    let n = a.len() as f64;
    let agree = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64;
    let a1 = a.iter().filter(|x| **x).count() as f64 / n;
    let b1 = b.iter().filter(|x| **x).count() as f64 / n;
    let p_o = agree / n;
    let p_e = a1 * b1 + (1.0 - a1) * (1.0 - b1);
    if p_e == 1.0 {
        return Ok(1.0);
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// Kappa of every label between two annotations of the same sentences.
pub fn kappa_per_label(a: &[LabelVector], b: &[LabelVector]) -> Result<[f64; NUM_LABELS]> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut out = [0.0; NUM_LABELS];
    for (k, label) in crate::labels::Label::ALL.iter().enumerate() {
        let x: Vec<bool> = a.iter().map(|v| v.get(*label)).collect();
        let y: Vec<bool> = b.iter().map(|v| v.get(*label)).collect();
        out[k] = cohen_kappa(&x, &y)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_cases() {
        let a = [true, true, false, false];
        let b = [true, false, true, false];
        assert_eq!(cohen_kappa(&a, &b).unwrap(), 0.0);
        assert_eq!(cohen_kappa(&a, &a).unwrap(), 1.0);
        assert_eq!(cohen_kappa(&[true; 3], &[true; 3]).unwrap(), 1.0);
        // p_o = 0, p_e = 0.5
        assert_eq!(cohen_kappa(&a, &[false, false, true, true]).unwrap(), -1.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(cohen_kappa(&[true], &[]), Err(EvalError::LengthMismatch { .. })));
        assert!(matches!(cohen_kappa(&[], &[]), Err(EvalError::Empty)));
    }

    proptest! {
        #[test]
        fn bounded_and_flip_invariant(pairs in proptest::collection::vec(any::<(bool, bool)>(), 1..60)) {
            let (a, b): (Vec<bool>, Vec<bool>) = pairs.into_iter().unzip();
            let k = cohen_kappa(&a, &b).unwrap();
            prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&k));
            let na: Vec<bool> = a.iter().map(|x| !x).collect();
            let nb: Vec<bool> = b.iter().map(|x| !x).collect();
            prop_assert!((cohen_kappa(&na, &nb).unwrap() - k).abs() < 1e-12);
            prop_assert_eq!(cohen_kappa(&a, &a).unwrap(), 1.0);
        }
    }
}
