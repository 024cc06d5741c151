use crate::error::EvalError;
use crate::jet::MAX_DIM;

/// A point of ℝⁿ \ {0} together with its radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    n: usize,
    coords: [f64; MAX_DIM],
    r: f64,
}

impl Point {
    pub fn new(x: &[f64]) -> Result<Self, EvalError> {
        let n = x.len();
        if n == 0 || n > MAX_DIM {
            return Err(EvalError::UnsupportedDimension(n));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(EvalError::NonFinite);
        }
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r <= 0.0 {
            return Err(EvalError::Origin);
        }
        let mut coords = [0.0; MAX_DIM];
        coords[..n].copy_from_slice(x);
        Ok(Self { n, coords, r })
    }

    /// `r·ω` for a unit direction `ω`.
    pub fn polar(r: f64, omega: &[f64]) -> Result<Self, EvalError> {
        let mut x = [0.0; MAX_DIM];
        for (xi, wi) in x.iter_mut().zip(omega) {
            *xi = r * wi;
        }
        Self::new(&x[..omega.len()])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.n]
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// The unit direction x/|x|.
    pub fn direction(&self) -> [f64; MAX_DIM] {
        let mut w = [0.0; MAX_DIM];
        for i in 0..self.n {
            w[i] = self.coords[i] / self.r;
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_origin_and_bad_dimensions() {
        assert_eq!(Point::new(&[0.0; 5]), Err(EvalError::Origin));
        assert_eq!(Point::new(&[]), Err(EvalError::UnsupportedDimension(0)));
        assert_eq!(
            Point::new(&[1.0; 10]),
            Err(EvalError::UnsupportedDimension(10))
        );
        assert_eq!(Point::new(&[f64::NAN, 1.0]), Err(EvalError::NonFinite));
    }

    #[test]
    fn radius_is_euclidean() {
        let p = Point::new(&[3.0, 4.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(p.r(), 5.0);
        assert_eq!(p.direction()[1], 0.8);
    }
}
