//! Reductions with a fixed association order.

/// How node contributions are accumulated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Summation {
    /// Balanced binary tree over the node order.
    #[default]
    Pairwise,
    /// Sequential Neumaier compensation over the node order.
    Compensated,
}

const LEAF: usize = 8;

/// Pairwise sum of `x[start + k·stride]` for `k < count`.
pub fn pairwise_strided(x: &[f64], start: usize, stride: usize, count: usize) -> f64 {
    if count <= LEAF {
        let mut s = 0.0;
        for k in 0..count {
            s += x[start + k * stride];
        }
        return s;
    }
    let half = count / 2;
    pairwise_strided(x, start, stride, half)
        + pairwise_strided(x, start + half * stride, stride, count - half)
}

pub fn pairwise(x: &[f64]) -> f64 {
    pairwise_strided(x, 0, 1, x.len())
}

/// Neumaier-compensated sum of `x[start + k·stride]`.
pub fn compensated_strided(x: &[f64], start: usize, stride: usize, count: usize) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for k in 0..count {
        let v = x[start + k * stride];
        let t = s + v;
        if s.abs() >= v.abs() {
            c += (s - t) + v;
        } else {
            c += (v - t) + s;
        }
        s = t;
    }
    s + c
}

impl Summation {
    pub fn strided(self, x: &[f64], start: usize, stride: usize, count: usize) -> f64 {
        match self {
            Summation::Pairwise => pairwise_strided(x, start, stride, count),
            Summation::Compensated => compensated_strided(x, start, stride, count),
        }
    }

    /// Column sums of a row-major `rows × cols` block.
    pub fn columns(self, x: &[f64], cols: usize) -> Vec<f64> {
        let rows = if cols == 0 { 0 } else { x.len() / cols };
        (0..cols).map(|c| self.strided(x, c, cols, rows)).collect()
    }
}

/// Merges a list of items with `merge` along a balanced binary tree over
/// the list order.
pub fn tree_reduce<T>(mut items: Vec<T>, merge: &impl Fn(T, T) -> T) -> Option<T> {
    if items.len() <= 1 {
        return items.pop();
    }
    let right = items.split_off(items.len() / 2);
    let a = tree_reduce(items, merge)?;
    let b = tree_reduce(right, merge)?;
    Some(merge(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_agree_on_benign_input() {
        let x: Vec<f64> = (0..1000).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let naive: f64 = x.iter().sum();
        assert!((pairwise(&x) - naive).abs() < 1e-12);
        assert!((compensated_strided(&x, 0, 1, x.len()) - naive).abs() < 1e-12);
    }

    #[test]
    fn compensation_recovers_cancelled_mass() {
        let x = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_strided(&x, 0, 1, 4), 2.0);
    }

    #[test]
    fn tree_order_is_fixed() {
        let v: Vec<String> = (0..5).map(|i| i.to_string()).collect();
        let s = tree_reduce(v, &|a, b| format!("({a}{b})")).unwrap();
        assert_eq!(s, "((01)(2(34)))");
    }
}
