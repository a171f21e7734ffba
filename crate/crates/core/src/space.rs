//! Weighted finite ℓ^p spaces: a finite indexed point set, strictly
//! positive rational weights and an exponent p ∈ [1, ∞]. The norm is
//! ‖ξ‖_p = (Σ w(x)|ξ(x)|^p)^{1/p}, and ‖ξ‖_∞ = max |ξ(x)|.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{
    rational_pow_exact, rational_pow_f64, Exponent, Rational, Scalar,
};
use num_traits::{One, Signed, ToPrimitive};

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSpace {
    weights: Vec<Rational>,
    exponent: Exponent,
}

impl WeightedSpace {
    pub fn new(weights: Vec<Rational>, exponent: Exponent) -> Result<Self> {
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::Domain("weights must be strictly positive".into()));
        }
        Ok(WeightedSpace { weights, exponent })
    }

    /// Counting measure on `n` points.
    pub fn counting(n: usize, exponent: Exponent) -> Self {
        WeightedSpace {
            weights: vec![Rational::one(); n],
            exponent,
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn exponent(&self) -> &Exponent {
        &self.exponent
    }

    pub fn with_exponent(&self, exponent: Exponent) -> Self {
        WeightedSpace {
            weights: self.weights.clone(),
            exponent,
        }
    }

    pub fn is_counting(&self) -> bool {
        self.weights.iter().all(|w| w.is_one())
    }

    /// ‖ξ‖_p as a float.
    pub fn norm(&self, v: &[Scalar]) -> f64 {
        assert_eq!(v.len(), self.dim());
        match &self.exponent {
            Exponent::Infinity => v.iter().map(|x| x.abs()).fold(0.0, f64::max),
            Exponent::Finite(p) => {
                let pf = p.to_f64().unwrap();
                let mut acc = 0.0;
                for (x, w) in v.iter().zip(&self.weights) {
                    acc += w.to_f64().unwrap() * x.abs().powf(pf);
                }
                acc.powf(1.0 / pf)
            }
        }
    }

    /// The RN weight factor (w(src)/w(dst))^{1/p} as a scalar; exact when
    /// the rational admits an exact root, float otherwise. For p = ∞ the
    /// factor is 1.
    pub fn rn_factor(&self, src: usize, dst: usize) -> Scalar {
        match &self.exponent {
            Exponent::Infinity => Scalar::one(),
            Exponent::Finite(p) => {
                let ratio = &self.weights[src] / &self.weights[dst];
                let inv_p = p.recip();
                match rational_pow_exact(&ratio, &inv_p) {
                    Some(q) => Scalar::from_rational(q),
                    None => Scalar::float(rational_pow_f64(&ratio, &inv_p), 0.0),
                }
            }
        }
    }
}

/// Conjugate a square matrix on the points of `space` into unweighted
/// coordinates: D^{1/p} M D^{-1/p} with D = diag(weights). The operator
/// norm of the result on the counting space equals the operator norm of
/// `M` on the weighted space. For p = ∞ the matrix is returned unchanged
/// (the sup norm does not see the weights).
pub fn weighted_conjugate(m: &Matrix, space: &WeightedSpace) -> Result<Matrix> {
    if !m.is_square() || m.rows() != space.dim() {
        return Err(Error::Domain(format!(
            "matrix is {}x{} but space has {} points",
            m.rows(),
            m.cols(),
            space.dim()
        )));
    }
    match space.exponent() {
        Exponent::Infinity => Ok(m.clone()),
        Exponent::Finite(p) => {
            let inv_p = p.recip();
            let n = space.dim();
            // factor (w_i / w_j)^{1/p}; keep the whole matrix exact only
            // if every needed root is exact
            let mut factors = vec![None; n * n];
            let mut all_exact = m.is_exact();
            for i in 0..n {
                for j in 0..n {
                    let ratio = &space.weights()[i] / &space.weights()[j];
                    let f = rational_pow_exact(&ratio, &inv_p);
                    if f.is_none() && !m[(i, j)].is_zero() {
                        all_exact = false;
                    }
                    factors[i * n + j] = f;
                }
            }
            let out = Matrix::from_fn(n, n, |i, j| {
                let e = &m[(i, j)];
                if e.is_zero() {
                    return if all_exact {
                        Scalar::zero()
                    } else {
                        Scalar::float(0.0, 0.0)
                    };
                }
                match (&factors[i * n + j], all_exact) {
                    (Some(q), true) => e.mul_rational(q),
                    _ => {
                        let ratio = &space.weights()[i] / &space.weights()[j];
                        let f = rational_pow_f64(&ratio, &inv_p);
                        let (re, im) = e.to_float();
                        Scalar::float(re * f, im * f)
                    }
                }
            });
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    #[test]
    fn rejects_nonpositive_weights() {
        assert!(WeightedSpace::new(vec![rat_int(0)], Exponent::from_int(2).unwrap()).is_err());
    }

    #[test]
    fn conjugation_fixes_diagonal_and_identity() {
        let sp = WeightedSpace::new(
            vec![rat_int(1), rat_int(4)],
            Exponent::from_int(2).unwrap(),
        )
        .unwrap();
        let d = Matrix::diagonal(&[Scalar::from_int(3), Scalar::from_int(-7)]);
        assert_eq!(weighted_conjugate(&d, &sp).unwrap(), d);
        let id = Matrix::identity(2);
        assert_eq!(weighted_conjugate(&id, &sp).unwrap(), id);
    }

    #[test]
    fn conjugation_of_weighted_swap() {
        // swap with RN weights on w = (1,4), p = 2 is [[0,2],[1/2,0]];
        // conjugation brings it to the plain swap matrix
        let sp = WeightedSpace::new(
            vec![rat_int(1), rat_int(4)],
            Exponent::from_int(2).unwrap(),
        )
        .unwrap();
        let m = Matrix::new(
            2,
            2,
            vec![
                Scalar::zero(),
                Scalar::from_int(2),
                Scalar::from_rational(rat(1, 2)),
                Scalar::zero(),
            ],
        )
        .unwrap();
        let c = weighted_conjugate(&m, &sp).unwrap();
        let swap = Matrix::new(
            2,
            2,
            vec![
                Scalar::zero(),
                Scalar::one(),
                Scalar::one(),
                Scalar::zero(),
            ],
        )
        .unwrap();
        assert_eq!(c, swap);
    }

    #[test]
    fn infinity_returns_unchanged() {
        let sp = WeightedSpace::new(vec![rat_int(1), rat_int(9)], Exponent::infinity()).unwrap();
        let m = Matrix::new(
            2,
            2,
            vec![
                Scalar::zero(),
                Scalar::from_int(5),
                Scalar::one(),
                Scalar::zero(),
            ],
        )
        .unwrap();
        assert_eq!(weighted_conjugate(&m, &sp).unwrap(), m);
    }
}
