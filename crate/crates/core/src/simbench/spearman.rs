use crate::error::{Error, Result};

/// Ranks starting at 1; tied values share the mean of the ranks they span.
pub fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && v[order[end]] == v[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let r = (start + 1 + end) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = r;
        }
        start = end;
    }
    ranks
}

fn pearson(u: &[f64], v: &[f64]) -> Option<f64> {
    let n = u.len() as f64;
    let mu = u.iter().sum::<f64>() / n;
    let mv = v.iter().sum::<f64>() / n;
    let (mut suv, mut suu, mut svv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        let (da, db) = (a - mu, b - mv);
        suv += da * db;
        suu += da * da;
        svv += db * db;
    }
    if suu == 0.0 || svv == 0.0 {
        return None;
    }
    Some((suv / (suu * svv).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            actual: v.len(),
        });
    }
    if u.len() < 2 {
        return Err(Error::InvalidInput("spearman needs at least two pairs".into()));
    }
    if u.iter().chain(v).any(|x| x.is_nan()) {
        return Err(Error::InvalidInput("spearman input contains NaN".into()));
    }
    pearson(&average_ranks(u), &average_ranks(v))
        .ok_or_else(|| Error::DegenerateData("undefined correlation: constant input".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_values() {
        let v = [0.3, -1.0, 2.5, 7.0];
        assert_eq!(spearman(&v, &v).unwrap(), 1.0);
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert_eq!(spearman(&[1.0, 2.0, 2.0, 4.0], &[10.0, 20.0, 20.0, 40.0]).unwrap(), 1.0);
    }

    #[test]
    fn tie_ranks() {
        assert_eq!(average_ranks(&[1.0, 2.0, 2.0, 4.0]), vec![1.0, 2.5, 2.5, 4.0]);
        assert_eq!(average_ranks(&[5.0, 5.0, 5.0]), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn constant_input_is_undefined() {
        let err = spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap_err();
        assert!(err.to_string().contains("undefined correlation"));
        assert!(spearman(&[1.0], &[2.0]).is_err());
        assert!(spearman(&[1.0, 2.0], &[2.0]).is_err());
    }

    proptest! {
        #[test]
        fn bounded(u in prop::collection::vec(-100i32..100, 3..40), seed in any::<u64>()) {
            let u: Vec<f64> = u.into_iter().map(f64::from).collect();
            let v: Vec<f64> = u.iter().enumerate().map(|(i, x)| ((i as u64 ^ seed) % 7) as f64 - x).collect();
            if let Ok(r) = spearman(&u, &v) {
                prop_assert!((-1.0..=1.0).contains(&r));
            }
        }
    }
}
