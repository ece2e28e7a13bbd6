//! Time-average ratios and trailing-window averages.

use std::collections::VecDeque;

use super::SimError;

/// `Σ num / Σ den` over whole streams.
pub fn time_average_ratio(num: &[f64], den: &[f64]) -> Result<f64, SimError> {
    if num.len() != den.len() {
        return Err(SimError::Metric(format!(
            "stream lengths differ ({} vs {})",
            num.len(),
            den.len()
        )));
    }
    let d: f64 = den.iter().sum();
    if num.is_empty() || d == 0.0 {
        return Err(SimError::Metric("zero denominator".into()));
    }
    Ok(num.iter().sum::<f64>() / d)
}

/// Ratio of sums over the trailing `window` entries, one value per entry.
/// Entries whose windowed denominator is zero yield `NaN`.
pub fn moving_ratio(num: &[f64], den: &[f64], window: usize) -> Result<Vec<f64>, SimError> {
    if window == 0 {
        return Err(SimError::Metric("window must be at least 1".into()));
    }
    if num.len() != den.len() {
        return Err(SimError::Metric("stream lengths differ".into()));
    }
    let mut w = MovingRatio::new(window);
    Ok(num.iter().zip(den).map(|(&n, &d)| w.push(n, d)).collect())
}

/// Trailing mean of `stream` over `window` entries.
pub fn moving_average(stream: &[f64], window: usize) -> Result<Vec<f64>, SimError> {
    moving_ratio(stream, &vec![1.0; stream.len()], window)
}

/// Incremental form of [`moving_ratio`].
#[derive(Debug, Clone)]
pub struct MovingRatio {
    window: usize,
    entries: VecDeque<(f64, f64)>,
    num: f64,
    den: f64,
    since_refresh: usize,
}

impl MovingRatio {
    pub fn new(window: usize) -> Self {
        Self {
            window: window.max(1),
            entries: VecDeque::with_capacity(window.clamp(1, 1 << 16)),
            num: 0.0,
            den: 0.0,
            since_refresh: 0,
        }
    }

    pub fn push(&mut self, num: f64, den: f64) -> f64 {
        self.entries.push_back((num, den));
        self.num += num;
        self.den += den;
        if self.entries.len() > self.window {
            let (n, d) = self.entries.pop_front().expect("non-empty");
            self.num -= n;
            self.den -= d;
            self.since_refresh += 1;
            if self.since_refresh >= self.window {
                self.num = self.entries.iter().map(|e| e.0).sum();
                self.den = self.entries.iter().map(|e| e.1).sum();
                self.since_refresh = 0;
            }
        }
        self.value()
    }

    pub fn value(&self) -> f64 {
        if self.den == 0.0 {
            f64::NAN
        } else {
            self.num / self.den
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_examples() {
        assert_eq!(time_average_ratio(&[1.0, 1.0], &[7.0, 7.0]).unwrap(), 1.0 / 7.0);
        assert_eq!(time_average_ratio(&[1.0, 3.0], &[17.0, 4.0]).unwrap(), 4.0 / 21.0);
        assert!(time_average_ratio(&[], &[]).is_err());
    }

    #[test]
    fn moving_examples() {
        assert!(moving_average(&[2.0; 10], 3).unwrap().iter().all(|&v| v == 2.0));
        let step: Vec<f64> = (0..20).map(|k| if k < 10 { 0.0 } else { 1.0 }).collect();
        let ma = moving_average(&step, 4).unwrap();
        assert_eq!(ma[13], 1.0);
        assert!(ma[12] < 1.0);
        let num = [1.0, 3.0, 2.0];
        let den = [17.0, 4.0, 5.0];
        let full = moving_ratio(&num, &den, 3).unwrap();
        assert_eq!(full[2], time_average_ratio(&num, &den).unwrap());
        assert!(moving_average(&[1.0], 0).is_err());
    }
}
