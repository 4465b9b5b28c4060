//! Small numeric helpers shared across modules.

/// `num / den`, or `None` when the denominator is zero.
pub fn ratio(num: f64, den: f64) -> Option<f64> {
    if den == 0.0 {
        None
    } else {
        Some(num / den)
    }
}

pub fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

/// Median of a non-empty slice; `None` when empty.
pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// Population moments: mean, variance, skewness, excess kurtosis.
/// Skewness and kurtosis are `None` when the variance is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
}

impl Moments {
    pub fn of(xs: &[f64]) -> Option<Moments> {
        let n = xs.len() as f64;
        let mean = mean(xs)?;
        let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
        for &x in xs {
            let d = x - mean;
            let d2 = d * d;
            m2 += d2;
            m3 += d2 * d;
            m4 += d2 * d2;
        }
        m2 /= n;
        m3 /= n;
        m4 /= n;
        // relative floor so that round-off on a constant series reads as zero
        let scale = xs.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let flat = m2 <= (scale * 1e-12).powi(2);
        let variance = if flat { 0.0 } else { m2 };
        Some(Moments {
            mean,
            variance,
            skewness: (!flat).then(|| m3 / m2.powf(1.5)),
            kurtosis: (!flat).then(|| m4 / (m2 * m2) - 3.0),
        })
    }

    pub fn to_vec(self) -> [Option<f64>; 4] {
        [Some(self.mean), Some(self.variance), self.skewness, self.kurtosis]
    }
}

/// Cosine similarity; `None` when either vector has zero norm.
pub fn cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        None
    } else {
        Some((dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_even_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn constant_moments() {
        let m = Moments::of(&[0.1; 7]).unwrap();
        assert_eq!(m.variance, 0.0);
        assert!(m.skewness.is_none() && m.kurtosis.is_none());
    }

    #[test]
    fn symmetric_skew_zero() {
        let m = Moments::of(&[-1.0, 0.0, 1.0]).unwrap();
        assert!(m.skewness.unwrap().abs() < 1e-15);
        assert!((m.variance - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.kurtosis.unwrap() - (-1.5)).abs() < 1e-12);
    }
}
