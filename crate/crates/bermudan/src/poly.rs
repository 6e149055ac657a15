//! Multivariate polynomial least squares on the total-degree monomial basis.
//!
//! Inputs are standardized (per-column shift/scale) before the normal
//! equations are formed, which keeps the Gram matrix well conditioned even
//! for spot levels around 100 raised to the fifth power. The solve goes
//! through a symmetric eigendecomposition with small eigenvalues cut off,
//! so rank-deficient designs fall back to the minimum-norm solution, plus
//! one step of iterative refinement. Coefficients are mapped back to the
//! raw monomial basis before they are stored.
//!
//! Monomials are ordered graded-lexicographically: by total degree first,
//! then lexicographically descending on the exponent tuple, e.g. for d = 2,
//! degree 2: 1, x1, x2, x1^2, x1 x2, x2^2.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::collections::HashMap;

use crate::regressor::RegressorError;

/// Number of monomials of total degree <= `degree` in `dimension` variables,
/// i.e. C(dimension + degree, degree).
pub fn monomial_count(dimension: usize, degree: usize) -> usize {
    let mut count: usize = 1;
    for i in 1..=degree {
        count = count * (dimension + i) / i;
    }
    count
}

/// Exponent tuples in graded lexicographic order.
pub fn monomial_exponents(dimension: usize, degree: usize) -> Vec<Vec<u8>> {
    fn fill(remaining_dims: usize, total: u8, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if remaining_dims == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=total).rev() {
            prefix.push(e);
            fill(remaining_dims - 1, total - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::with_capacity(monomial_count(dimension, degree));
    for total in 0..=degree as u8 {
        fill(
            dimension,
            total,
            &mut Vec::with_capacity(dimension),
            &mut out,
        );
    }
    out
}

fn binomial(n: u8, k: u8) -> f64 {
    let mut v = 1.0;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

/// Least-squares polynomial in the raw monomial basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialModel {
    degree: usize,
    dimension: usize,
    /// Dense exponent tuples, graded lex order, aligned with `coefficients`.
    exponents: Vec<Vec<u8>>,
    /// Sparse (dim, power) view of `exponents` for evaluation.
    sparse: Vec<Vec<(usize, u8)>>,
    coefficients: Vec<f64>,
}

impl PolynomialModel {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Raw-basis coefficients, graded lex order.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn exponents(&self) -> &[Vec<u8>] {
        &self.exponents
    }

    /// Evaluates sum_k c_k prod_i x_i^{e_ki}.
    ///
    /// Panics if `x` does not match the training dimension.
    pub fn predict(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dimension, "query dimension mismatch");
        let mut acc = 0.0;
        for (coeff, expo) in self.coefficients.iter().zip(&self.sparse) {
            let mut term = *coeff;
            for &(dim, pow) in expo {
                term *= x[dim].powi(pow as i32);
            }
            acc += term;
        }
        acc
    }
}

/// Evaluates all monomials at a standardized row into `row_out`.
fn fill_design_row(
    z: &[f64],
    sparse: &[Vec<(usize, u8)>],
    powers: &mut [f64],
    degree: usize,
    row_out: &mut [f64],
) {
    let cols = degree + 1;
    for (i, &zi) in z.iter().enumerate() {
        powers[i * cols] = 1.0;
        for p in 1..=degree {
            powers[i * cols + p] = powers[i * cols + p - 1] * zi;
        }
    }
    for (k, expo) in sparse.iter().enumerate() {
        let mut v = 1.0;
        for &(dim, pow) in expo {
            v *= powers[dim * cols + pow as usize];
        }
        row_out[k] = v;
    }
}

/// Ordinary least squares of `y` on the monomial basis of total degree
/// <= `degree`, on rows of `x` (flat row-major).
pub fn fit_polynomial(
    x: &[f64],
    y: &[f64],
    dimension: usize,
    degree: usize,
) -> Result<PolynomialModel, RegressorError> {
    assert!(dimension >= 1, "dimension must be >= 1");
    assert_eq!(x.len(), y.len() * dimension, "x/y size mismatch");
    let rows = y.len();
    let n = monomial_count(dimension, degree);
    if rows < n {
        return Err(RegressorError::InsufficientSamples {
            needed: n,
            available: rows,
        });
    }

    // per-column standardization
    let mut mean = vec![0.0; dimension];
    for row in 0..rows {
        for j in 0..dimension {
            mean[j] += x[row * dimension + j];
        }
    }
    for m in mean.iter_mut() {
        *m /= rows as f64;
    }
    let mut scale = vec![0.0; dimension];
    for row in 0..rows {
        for j in 0..dimension {
            let c = x[row * dimension + j] - mean[j];
            scale[j] += c * c;
        }
    }
    for s in scale.iter_mut() {
        *s = (*s / rows as f64).sqrt();
        if *s == 0.0 {
            *s = 1.0;
        }
    }

    let exponents = monomial_exponents(dimension, degree);
    let sparse: Vec<Vec<(usize, u8)>> = exponents
        .iter()
        .map(|e| {
            e.iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(d, &p)| (d, p))
                .collect()
        })
        .collect();

    // normal equations accumulated over ordered row blocks so the result
    // does not depend on the thread schedule
    let block = 2048usize.max(n);
    let partials: Vec<(DMatrix<f64>, DVector<f64>)> = (0..rows.div_ceil(block))
        .into_par_iter()
        .map(|b| {
            let lo = b * block;
            let hi = (lo + block).min(rows);
            let mut design = DMatrix::zeros(hi - lo, n);
            let mut rhs = DVector::zeros(hi - lo);
            let mut z = vec![0.0; dimension];
            let mut powers = vec![0.0; dimension * (degree + 1)];
            let mut row_buf = vec![0.0; n];
            for row in lo..hi {
                for j in 0..dimension {
                    z[j] = (x[row * dimension + j] - mean[j]) / scale[j];
                }
                fill_design_row(&z, &sparse, &mut powers, degree, &mut row_buf);
                for k in 0..n {
                    design[(row - lo, k)] = row_buf[k];
                }
                rhs[row - lo] = y[row];
            }
            (design.tr_mul(&design), design.tr_mul(&rhs))
        })
        .collect();

    let mut gram = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);
    for (g, b) in partials {
        gram += g;
        rhs += b;
    }

    // rank-revealing orthogonal solve: eigendecompose the Gram matrix and
    // drop directions below a relative cutoff (minimum-norm solution)
    let eigen = gram.clone().symmetric_eigen();
    let max_eig = eigen.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let cutoff = max_eig * 1e-12;
    let apply_pinv = |v: &DVector<f64>| -> DVector<f64> {
        let mut proj = eigen.eigenvectors.tr_mul(v);
        for (i, p) in proj.iter_mut().enumerate() {
            let lambda = eigen.eigenvalues[i];
            *p = if lambda > cutoff { *p / lambda } else { 0.0 };
        }
        &eigen.eigenvectors * proj
    };
    let mut coeff_std = apply_pinv(&rhs);
    // one refinement step recovers accuracy lost to the squared condition
    let residual = &rhs - &gram * &coeff_std;
    coeff_std += apply_pinv(&residual);

    // expand coefficients from the standardized to the raw monomial basis
    let index: HashMap<&[u8], usize> = exponents
        .iter()
        .enumerate()
        .map(|(i, e)| (e.as_slice(), i))
        .collect();
    let mut coefficients = vec![0.0; n];
    for (k, expo) in exponents.iter().enumerate() {
        let mut terms: HashMap<Vec<u8>, f64> = HashMap::new();
        terms.insert(vec![0u8; dimension], coeff_std[k]);
        for (j, &e) in expo.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let inv_scale = scale[j].powi(e as i32).recip();
            let mut next: HashMap<Vec<u8>, f64> = HashMap::new();
            for (ev, c) in &terms {
                for a in 0..=e {
                    let w = c * binomial(e, a) * (-mean[j]).powi((e - a) as i32) * inv_scale;
                    let mut ev2 = ev.clone();
                    ev2[j] += a;
                    *next.entry(ev2).or_insert(0.0) += w;
                }
            }
            terms = next;
        }
        for (ev, c) in terms {
            coefficients[index[ev.as_slice()]] += c;
        }
    }

    Ok(PolynomialModel {
        degree,
        dimension,
        exponents,
        sparse,
        coefficients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    #[test]
    fn monomial_counts_match_binomial() {
        assert_eq!(monomial_count(1, 3), 4);
        assert_eq!(monomial_count(2, 5), 21);
        assert_eq!(monomial_count(10, 3), 286);
        assert_eq!(monomial_count(50, 1), 51);
        assert_eq!(monomial_exponents(2, 5).len(), 21);
        assert_eq!(monomial_exponents(10, 3).len(), 286);
    }

    #[test]
    fn graded_lex_order_for_two_dims() {
        let e = monomial_exponents(2, 2);
        let expect: Vec<Vec<u8>> = vec![
            vec![0, 0],
            vec![1, 0],
            vec![0, 1],
            vec![2, 0],
            vec![1, 1],
            vec![0, 2],
        ];
        assert_eq!(e, expect);
    }

    #[test]
    fn recovers_affine_coefficients() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|&v| 3.0 + 2.0 * v).collect();
        let model = fit_polynomial(&x, &y, 1, 1).unwrap();
        assert!((model.coefficients()[0] - 3.0).abs() < 1e-9);
        assert!((model.coefficients()[1] - 2.0).abs() < 1e-9);
        assert!((model.predict(&[4.0]) - 11.0).abs() < 1e-9);
    }

    #[test]
    fn degree_zero_is_the_mean() {
        let y = vec![1.0, 2.0, 3.0, 6.0];
        let x = vec![10.0, 20.0, 30.0, 40.0];
        let model = fit_polynomial(&x, &y, 1, 0).unwrap();
        assert!((model.coefficients()[0] - 3.0).abs() < 1e-12);
        assert!((model.predict(&[123.0]) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn exactly_representable_target_has_tiny_residual() {
        let mut rng = stream_rng(5, 0);
        let n = 50;
        let x: Vec<f64> = (0..2 * n).map(|_| rng.random::<f64>()).collect();
        let y: Vec<f64> = (0..n).map(|i| x[2 * i] * x[2 * i + 1]).collect();
        let model = fit_polynomial(&x, &y, 2, 2).unwrap();
        for i in 0..n {
            let p = model.predict(&x[2 * i..2 * i + 2]);
            assert!((p - y[i]).abs() <= 1e-9, "row {i}: {p} vs {}", y[i]);
        }
    }

    #[test]
    fn insufficient_samples_is_rejected() {
        let x = vec![1.0, 2.0, 3.0];
        let y = vec![1.0, 2.0, 3.0];
        assert!(matches!(
            fit_polynomial(&x, &y, 1, 3),
            Err(RegressorError::InsufficientSamples {
                needed: 4,
                available: 3
            })
        ));
    }

    #[test]
    fn residual_is_orthogonal_to_basis_columns() {
        let mut rng = stream_rng(7, 0);
        let n = 400;
        let d = 2;
        let x: Vec<f64> = (0..d * n).map(|_| rng.random::<f64>()).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| (5.0 * x[2 * i]).sin() + rng.random::<f64>())
            .collect();
        let model = fit_polynomial(&x, &y, d, 3).unwrap();
        let residual: Vec<f64> = (0..n)
            .map(|i| y[i] - model.predict(&x[2 * i..2 * i + 2]))
            .collect();
        let y_norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        for expo in model.exponents() {
            let mut dot = 0.0;
            for i in 0..n {
                let mut col = 1.0;
                for (j, &p) in expo.iter().enumerate() {
                    col *= x[i * d + j].powi(p as i32);
                }
                dot += col * residual[i];
            }
            assert!(
                dot.abs() <= 1e-8 * y_norm,
                "column {expo:?}: inner product {dot}"
            );
        }
    }

    #[test]
    fn conditioning_survives_spot_scale_inputs() {
        // spots around 100 raised to degree 5: standardization keeps the
        // solve usable where raw normal equations would collapse
        let mut rng = stream_rng(11, 0);
        let n = 3000;
        let x: Vec<f64> = (0..n).map(|_| 60.0 + 90.0 * rng.random::<f64>()).collect();
        let y: Vec<f64> = x.iter().map(|&s: &f64| (110.0 - s).max(0.0)).collect();
        let model = fit_polynomial(&x, &y, 1, 5).unwrap();
        // the fit should track the hockey-stick shape to within a unit
        for &s in &[70.0, 90.0, 100.0, 120.0, 140.0] {
            let p = model.predict(&[s]);
            let target = (110.0 - s).max(0.0);
            assert!((p - target).abs() < 4.0, "s={s}: {p} vs {target}");
        }
    }

    #[test]
    fn rank_deficient_design_falls_back_to_minimum_norm() {
        // duplicate coordinate makes x1 - x2 a null direction
        let mut rng = stream_rng(13, 0);
        let n = 100;
        let mut x = Vec::with_capacity(2 * n);
        for _ in 0..n {
            let v = rng.random::<f64>();
            x.push(v);
            x.push(v);
        }
        let y: Vec<f64> = (0..n).map(|i| 2.0 * x[2 * i]).collect();
        let model = fit_polynomial(&x, &y, 2, 1).unwrap();
        for i in 0..n {
            let p = model.predict(&x[2 * i..2 * i + 2]);
            assert!((p - y[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn fifty_dimensional_affine_fit() {
        let mut rng = stream_rng(17, 0);
        let d = 50;
        let n = 400;
        let x: Vec<f64> = (0..d * n)
            .map(|_| 80.0 + 40.0 * rng.random::<f64>())
            .collect();
        let y: Vec<f64> = (0..n)
            .map(|i| {
                1.0 + (0..d)
                    .map(|j| (j as f64 + 1.0) * 0.01 * x[i * d + j])
                    .sum::<f64>()
            })
            .collect();
        let model = fit_polynomial(&x, &y, d, 1).unwrap();
        for i in 0..20 {
            let p = model.predict(&x[i * d..(i + 1) * d]);
            assert!((p - y[i]).abs() < 1e-6);
        }
    }
}
