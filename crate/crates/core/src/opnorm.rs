//! Operator p-norms of matrices in unweighted coordinates.
//!
//! Closed forms for p ∈ {1, 2, ∞}: max absolute column sum, largest
//! singular value, max absolute row sum. For p ∈ (1, ∞) a certified
//! bracket: the lower bound is the best Rayleigh quotient found by Boyd
//! power iteration and multistart ascent, the upper bound the minimum of
//! the Riesz–Thorin interpolation bound ‖M‖_1^{1/p}·‖M‖_∞^{1/q} and a
//! Collatz–Wielandt bound evaluated along the Boyd iteration on the
//! entrywise-absolute matrix (a rigorous upper bound for nonnegative
//! matrices, and ‖M‖_p ≤ ‖|M|‖_p in general).

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{p_dual, Exponent};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const EIGEN_TOL: f64 = 1e-12;
const EIGEN_CAP: usize = 200_000;
const BOYD_CAP: usize = 20_000;
const BRACKET_REL_WIDTH: f64 = 1e-6;

/// Exact-form operator norm for p ∈ {1, 2, ∞}.
pub fn opnorm_exact(m: &Matrix, p: &Exponent) -> Result<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(0.0);
    }
    let a = m.abs_float();
    match p {
        Exponent::Finite(q) if q.to_string() == "1" => Ok(max_col_sum(&a)),
        Exponent::Infinity => Ok(max_row_sum(&a)),
        Exponent::Finite(q) if q.to_string() == "2" => spectral_norm(m),
        _ => Err(Error::Domain(format!(
            "opnorm_exact supports p in {{1, 2, inf}}, got {}",
            p
        ))),
    }
}

fn max_col_sum(a: &[Vec<f64>]) -> f64 {
    let cols = a[0].len();
    (0..cols)
        .map(|j| a.iter().map(|row| row[j]).sum::<f64>())
        .fold(0.0, f64::max)
}

fn max_row_sum(a: &[Vec<f64>]) -> f64 {
    a.iter()
        .map(|row| row.iter().sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest singular value by symmetric power iteration on MᴴM with
/// relative tolerance 1e-12. Errors with a partial bracket message when
/// the iteration cap is reached.
fn spectral_norm(m: &Matrix) -> Result<f64> {
    let gram = &m.conj_transpose().to_float() * &m.to_float();
    let n = gram.rows();
    if n == 0 {
        return Ok(0.0);
    }
    // complex Gram matrix acts on complex vectors; track as float pairs
    let g: Vec<Vec<(f64, f64)>> = (0..n)
        .map(|i| (0..n).map(|j| gram[(i, j)].to_float()).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen::<f64>() + 0.1, 0.0)).collect();
    normalize2(&mut v);
    let mut lambda_prev = 0.0;
    for it in 0..EIGEN_CAP {
        let mut w = vec![(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = (0.0, 0.0);
            for j in 0..n {
                let (gr, gi) = g[i][j];
                let (vr, vi) = v[j];
                acc.0 += gr * vr - gi * vi;
                acc.1 += gr * vi + gi * vr;
            }
            w[i] = acc;
        }
        // Rayleigh quotient on a PSD matrix: real, equals <Gv, v>
        let lambda: f64 = w
            .iter()
            .zip(&v)
            .map(|((wr, wi), (vr, vi))| wr * vr + wi * vi)
            .sum();
        let norm_w = normalize2(&mut w);
        if norm_w == 0.0 {
            return Ok(0.0);
        }
        v = w;
        if it > 2 && (lambda - lambda_prev).abs() <= EIGEN_TOL * lambda.abs().max(1.0) {
            return Ok(lambda.max(0.0).sqrt());
        }
        lambda_prev = lambda;
    }
    Err(Error::NotConverged(format!(
        "spectral norm iteration cap; partial bracket [{}, {}]",
        lambda_prev.max(0.0).sqrt(),
        max_col_sum(&m.abs_float())
            .sqrt()
            .mul_add(max_row_sum(&m.abs_float()).sqrt(), 0.0)
    )))
}

fn normalize2(v: &mut [(f64, f64)]) -> f64 {
    let n: f64 = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
    if n > 0.0 {
        for x in v.iter_mut() {
            x.0 /= n;
            x.1 /= n;
        }
    }
    n
}

/// A certified bracket for ‖M‖_{p→p}.
#[derive(Clone, Debug)]
pub struct NormBracket {
    pub lower: f64,
    pub upper: f64,
    pub converged: bool,
}

impl NormBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Bracket ‖M‖_{p→p} for p ∈ (1, ∞). For entrywise-nonnegative matrices
/// the bracket tightens below 1e-6 relative width; in general only the
/// guarantee lower ≤ ‖M‖ ≤ upper is made and `converged` reports whether
/// the target width was met.
pub fn opnorm_bracket(m: &Matrix, p: &Exponent) -> Result<NormBracket> {
    let pf = p.as_f64();
    if !(pf > 1.0 && pf.is_finite()) {
        return Err(Error::Domain(format!(
            "opnorm_bracket needs p in (1, inf), got {}",
            p
        )));
    }
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(NormBracket {
            lower: 0.0,
            upper: 0.0,
            converged: true,
        });
    }
    let a = m.abs_float();
    if a.iter().all(|row| row.iter().all(|&x| x == 0.0)) {
        return Ok(NormBracket {
            lower: 0.0,
            upper: 0.0,
            converged: true,
        });
    }
    let q = p_dual(p);
    let interp = max_col_sum(&a).powf(1.0 / pf) * max_row_sum(&a).powf(1.0 / q.as_f64());

    let nonneg = matrix_is_nonneg(m);
    // Boyd iteration with Collatz-Wielandt upper bounds on |M|
    let (abs_lower, abs_upper, boyd_x) = boyd_bracket(&a, pf);
    let mut upper = interp.min(abs_upper);
    let mut lower = if nonneg { abs_lower } else { 0.0 };

    // multistart projected ascent on M itself
    let ascent = ascent_lower(m, pf, &boyd_x);
    lower = lower.max(ascent);
    // floating-point guard: never report an inverted bracket
    if lower > upper {
        let mid = 0.5 * (lower + upper);
        lower = mid;
        upper = mid;
    }
    let converged = upper - lower <= BRACKET_REL_WIDTH * upper.max(f64::MIN_POSITIVE);
    Ok(NormBracket {
        lower,
        upper,
        converged,
    })
}

fn matrix_is_nonneg(m: &Matrix) -> bool {
    if !m.is_real() {
        return false;
    }
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if m[(i, j)].to_float().0 < 0.0 {
                return false;
            }
        }
    }
    true
}

/// One Boyd step x ↦ Ψ_q(Aᵀ Ψ_p(A x)) on a nonnegative matrix, returning
/// the new iterate together with the Collatz–Wielandt ratio bound
/// max_i T(x)_i / x_i, which dominates ‖A‖^q for every positive x.
fn boyd_bracket(a: &[Vec<f64>], pf: f64) -> (f64, f64, Vec<f64>) {
    let rows = a.len();
    let cols = a[0].len();
    // strip zero rows/columns: they affect neither the norm nor positivity
    let live_cols: Vec<usize> = (0..cols)
        .filter(|&j| a.iter().any(|row| row[j] != 0.0))
        .collect();
    let live_rows: Vec<usize> = (0..rows)
        .filter(|&i| a[i].iter().any(|&x| x != 0.0))
        .collect();
    if live_cols.is_empty() || live_rows.is_empty() {
        return (0.0, 0.0, vec![1.0; cols]);
    }
    let sub: Vec<Vec<f64>> = live_rows
        .iter()
        .map(|&i| live_cols.iter().map(|&j| a[i][j]).collect())
        .collect();
    let n = live_cols.len();
    let qf = pf / (pf - 1.0);
    let mut x = vec![1.0; n];
    let mut best_lower: f64 = 0.0;
    let mut best_upper = f64::INFINITY;
    for _ in 0..BOYD_CAP {
        let y: Vec<f64> = sub
            .iter()
            .map(|row| row.iter().zip(&x).map(|(aij, xj)| aij * xj).sum())
            .collect();
        let xn = norm_p(&x, pf);
        let yn = norm_p(&y, pf);
        if xn > 0.0 {
            best_lower = best_lower.max(yn / xn);
        }
        // T(x) = Psi_q(A^T Psi_p(Ax))
        let psi_y: Vec<f64> = y.iter().map(|v| v.powf(pf - 1.0)).collect();
        let z: Vec<f64> = (0..n)
            .map(|j| sub.iter().zip(&psi_y).map(|(row, py)| row[j] * py).sum())
            .collect();
        let t: Vec<f64> = z.iter().map(|v| v.powf(qf - 1.0)).collect();
        let cw = x
            .iter()
            .zip(&t)
            .map(|(xi, ti)| ti / xi)
            .fold(0.0, f64::max);
        best_upper = best_upper.min(cw.powf(1.0 / qf));
        if best_upper - best_lower <= 0.25 * BRACKET_REL_WIDTH * best_upper {
            break;
        }
        let tn = norm_p(&t, pf);
        if tn == 0.0 {
            break;
        }
        x = t.iter().map(|v| v / tn).collect();
    }
    // re-embed the final iterate for use as an ascent start
    let mut full = vec![0.0; cols];
    for (k, &j) in live_cols.iter().enumerate() {
        full[j] = x[k];
    }
    (best_lower, best_upper.max(best_lower), full)
}

fn norm_p(v: &[f64], pf: f64) -> f64 {
    v.iter().map(|x| x.abs().powf(pf)).sum::<f64>().powf(1.0 / pf)
}

/// Best ‖Mx‖_p/‖x‖_p over ≥16 random starts plus canonical starts, each
/// improved by Boyd-map ascent steps with a best-seen tracker.
fn ascent_lower(m: &Matrix, pf: f64, boyd_seed: &[f64]) -> f64 {
    let cols = m.cols();
    let mf = m.to_float();
    let complex = !m.is_real();
    let mut rng = ChaCha8Rng::seed_from_u64(0xb07d);
    let mut best: f64 = 0.0;
    let mut starts: Vec<Vec<(f64, f64)>> = Vec::new();
    // canonical starts: basis vectors, all-ones, the |M| fixed point
    for j in 0..cols.min(8) {
        let mut e = vec![(0.0, 0.0); cols];
        e[j] = (1.0, 0.0);
        starts.push(e);
    }
    starts.push(vec![(1.0, 0.0); cols]);
    starts.push(boyd_seed.iter().map(|&x| (x, 0.0)).collect());
    while starts.len() < 16 + cols.min(8) + 2 {
        let v: Vec<(f64, f64)> = (0..cols)
            .map(|_| {
                let re = rng.gen::<f64>() * 2.0 - 1.0;
                let im = if complex {
                    rng.gen::<f64>() * 2.0 - 1.0
                } else {
                    0.0
                };
                (re, im)
            })
            .collect();
        starts.push(v);
    }
    for mut x in starts {
        for _ in 0..200 {
            let val = rayleigh(&mf, &x, pf);
            if val > best {
                best = val;
            }
            x = boyd_map(&mf, &x, pf);
            let nx = norm_pc(&x, pf);
            if nx == 0.0 {
                break;
            }
            for v in x.iter_mut() {
                v.0 /= nx;
                v.1 /= nx;
            }
        }
        best = best.max(rayleigh(&mf, &x, pf));
    }
    best
}

fn apply_c(m: &Matrix, x: &[(f64, f64)]) -> Vec<(f64, f64)> {
    (0..m.rows())
        .map(|i| {
            let mut acc = (0.0, 0.0);
            for j in 0..m.cols() {
                let (ar, ai) = m[(i, j)].to_float();
                let (xr, xi) = x[j];
                acc.0 += ar * xr - ai * xi;
                acc.1 += ar * xi + ai * xr;
            }
            acc
        })
        .collect()
}

fn norm_pc(v: &[(f64, f64)], pf: f64) -> f64 {
    v.iter()
        .map(|(a, b)| a.hypot(*b).powf(pf))
        .sum::<f64>()
        .powf(1.0 / pf)
}

fn rayleigh(m: &Matrix, x: &[(f64, f64)], pf: f64) -> f64 {
    let nx = norm_pc(x, pf);
    if nx == 0.0 {
        return 0.0;
    }
    norm_pc(&apply_c(m, x), pf) / nx
}

/// x ↦ Ψ_q(Mᴴ Ψ_p(Mx)) with phase-preserving signed powers; an ascent
/// heuristic for general matrices, the Boyd iteration for nonnegative ones.
fn boyd_map(m: &Matrix, x: &[(f64, f64)], pf: f64) -> Vec<(f64, f64)> {
    let qf = pf / (pf - 1.0);
    let y = apply_c(m, x);
    let psi_y: Vec<(f64, f64)> = y.iter().map(|&v| signed_pow(v, pf - 1.0)).collect();
    // Mᴴ applied to psi_y
    let z: Vec<(f64, f64)> = (0..m.cols())
        .map(|j| {
            let mut acc = (0.0, 0.0);
            for i in 0..m.rows() {
                let (ar, ai) = m[(i, j)].to_float();
                // conj(a) * v
                let (vr, vi) = psi_y[i];
                acc.0 += ar * vr + ai * vi;
                acc.1 += ar * vi - ai * vr;
            }
            acc
        })
        .collect();
    z.iter().map(|&v| signed_pow(v, qf - 1.0)).collect()
}

fn signed_pow(v: (f64, f64), e: f64) -> (f64, f64) {
    let r = v.0.hypot(v.1);
    if r == 0.0 {
        return (0.0, 0.0);
    }
    let s = r.powf(e) / r;
    (v.0 * s, v.1 * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat_int, Scalar};

    fn m2(a: i64, b: i64, c: i64, d: i64) -> Matrix {
        Matrix::new(
            2,
            2,
            vec![
                Scalar::from_int(a),
                Scalar::from_int(b),
                Scalar::from_int(c),
                Scalar::from_int(d),
            ],
        )
        .unwrap()
    }

    #[test]
    fn closed_forms() {
        let m = m2(1, 1, 0, 1);
        let p1 = Exponent::from_int(1).unwrap();
        assert_eq!(opnorm_exact(&m, &p1).unwrap(), 2.0);
        assert_eq!(opnorm_exact(&m, &Exponent::infinity()).unwrap(), 2.0);
        for p in [p1, Exponent::from_int(2).unwrap(), Exponent::infinity()] {
            assert!((opnorm_exact(&Matrix::identity(4), &p).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_norm_golden_ratio() {
        // eigenvalues of MᵀM are (3 ± sqrt 5)/2, so the norm is (1+sqrt 5)/2
        let m = m2(1, 1, 0, 1);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let got = opnorm_exact(&m, &Exponent::from_int(2).unwrap()).unwrap();
        assert!((got - phi).abs() < 1e-9, "{got} vs {phi}");
    }

    #[test]
    fn transpose_swaps_one_and_infinity() {
        let m = m2(3, -1, 4, 1);
        let p1 = Exponent::from_int(1).unwrap();
        let a = opnorm_exact(&m, &p1).unwrap();
        let b = opnorm_exact(&m.transpose(), &Exponent::infinity()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bracket_identity_and_diagonal() {
        let p3 = Exponent::from_int(3).unwrap();
        let b = opnorm_bracket(&Matrix::identity(3), &p3).unwrap();
        assert!(b.converged);
        assert!(b.lower <= 1.0 + 1e-12 && 1.0 <= b.upper + 1e-12);
        assert!(b.width() <= 1e-6);

        let d = Matrix::diagonal(&[Scalar::from_int(-3), Scalar::from_int(2)]);
        let bd = opnorm_bracket(&d, &p3).unwrap();
        assert!(bd.lower <= 3.0 + 1e-9 && 3.0 <= bd.upper + 1e-9);
        assert!(bd.width() <= 1e-6 * 3.0 + 1e-9);
    }

    #[test]
    fn bracket_nonneg_converges_and_bounds_true_value() {
        let m = m2(1, 1, 0, 1);
        let p3 = Exponent::from_int(3).unwrap();
        let b = opnorm_bracket(&m, &p3).unwrap();
        assert!(b.converged, "width {}", b.width());
        assert!(b.upper <= 2.0 + 1e-9);
        assert!(b.lower >= 1.0);
        assert!(b.lower <= b.upper);
    }

    #[test]
    fn bracket_domain_errors() {
        let m = m2(1, 0, 0, 1);
        assert!(opnorm_bracket(&m, &Exponent::from_int(1).unwrap()).is_err());
        assert!(opnorm_bracket(&m, &Exponent::infinity()).is_err());
        assert!(opnorm_exact(&m, &Exponent::from_int(3).unwrap()).is_err());
    }

    #[test]
    fn empty_matrix_has_zero_norm() {
        let m = Matrix::zero(0, 0);
        assert_eq!(opnorm_exact(&m, &Exponent::from_int(1).unwrap()).unwrap(), 0.0);
        let _ = rat_int(0);
    }
}
