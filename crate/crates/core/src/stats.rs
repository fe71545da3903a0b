//! Ranking and correlation primitives shared by the landscape measures.

/// 1-based fractional ranks with averaged ties (exact value equality).
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_unstable_by(|&a, &b| values[a as usize].total_cmp(&values[b as usize]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && values[order[j] as usize] == values[order[i] as usize] {
            j += 1;
        }
        // positions i..j hold 1-based ranks i+1..=j
        let avg = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx as usize] = avg;
        }
        i = j;
    }
    ranks
}

/// Streaming Pearson moments with an associative merge, so chunked parallel
/// reductions produce one fixed summation order.
#[derive(Debug, Clone, Copy, Default)]
pub struct PearsonAccumulator {
    pub n: f64,
    pub su: f64,
    pub sv: f64,
    pub suu: f64,
    pub svv: f64,
    pub suv: f64,
}

impl PearsonAccumulator {
    #[inline]
    pub fn push(&mut self, u: f64, v: f64) {
        self.n += 1.0;
        self.su += u;
        self.sv += v;
        self.suu += u * u;
        self.svv += v * v;
        self.suv += u * v;
    }

    pub fn merge(&mut self, other: &PearsonAccumulator) {
        self.n += other.n;
        self.su += other.su;
        self.sv += other.sv;
        self.suu += other.suu;
        self.svv += other.svv;
        self.suv += other.suv;
    }

    /// The correlation coefficient, or `None` when either variance is zero.
    pub fn correlation(&self) -> Option<f64> {
        if self.n < 2.0 {
            return None;
        }
        let cov = self.n * self.suv - self.su * self.sv;
        let var_u = self.n * self.suu - self.su * self.su;
        let var_v = self.n * self.svv - self.sv * self.sv;
        if var_u <= 0.0 || var_v <= 0.0 {
            return None;
        }
        Some(cov / (var_u * var_v).sqrt())
    }
}

/// Spearman rank correlation with averaged ties. `None` when an input is
/// constant (zero rank variance).
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len());
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    pearson(&rx, &ry)
}

/// Plain Pearson correlation of two equal-length slices.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let mut acc = PearsonAccumulator::default();
    for (&u, &v) in x.iter().zip(y) {
        acc.push(u, v);
    }
    acc.correlation()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_average_ties() {
        let ranks = average_ranks(&[1.0, 3.0, 1.0, 2.0]);
        assert_eq!(ranks, vec![1.5, 4.0, 1.5, 3.0]);
    }

    #[test]
    fn spearman_of_monotone_data_is_one() {
        let x = [0.1, 0.4, 0.9, 2.0];
        let y = [1.0, 2.0, 5.0, 100.0];
        assert!((spearman(&x, &y).unwrap() - 1.0).abs() < 1e-15);
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        assert!((spearman(&x, &neg).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn spearman_of_constant_input_is_undefined() {
        assert!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_none());
    }

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin()).collect();
        let ys: Vec<f64> = (0..100).map(|i| (i as f64 * 0.11).cos()).collect();
        let mut whole = PearsonAccumulator::default();
        for (&u, &v) in xs.iter().zip(&ys) {
            whole.push(u, v);
        }
        let mut left = PearsonAccumulator::default();
        let mut right = PearsonAccumulator::default();
        for (&u, &v) in xs.iter().zip(&ys).take(50) {
            left.push(u, v);
        }
        for (&u, &v) in xs.iter().zip(&ys).skip(50) {
            right.push(u, v);
        }
        left.merge(&right);
        let a = whole.correlation().unwrap();
        let b = left.correlation().unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}
