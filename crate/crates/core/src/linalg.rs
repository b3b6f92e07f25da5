//! Small dense linear-algebra helpers shared by the numerical modules.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result, Scalar};

/// Eigenvalues below this (relative to the largest) are treated as rounding
/// noise and clipped to zero; anything more negative is a genuine violation.
pub const PSD_CLIP: f64 = 1e-10;

/// Symmetry tolerance for covariance inputs.
pub const SYM_TOL: f64 = 1e-12;

pub fn symmetrize<T: Scalar>(m: &DMatrix<T>) -> DMatrix<T> {
    let half = T::of(0.5);
    (m + m.transpose()).map(|x| x * half)
}

pub fn max_abs_asymmetry<T: Scalar>(m: &DMatrix<T>) -> T {
    let mut worst = T::zero();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let a = (m[(i, j)] - m[(j, i)]).abs();
            if a > worst {
                worst = a;
            }
        }
    }
    worst
}

/// Validates a covariance matrix: square, symmetric within [`SYM_TOL`],
/// eigenvalues at least `-`[`PSD_CLIP`]. Slightly negative eigenvalues are
/// clipped to zero and the matrix is reconstructed.
pub fn validate_covariance<T: Scalar>(cov: &DMatrix<T>) -> Result<DMatrix<T>> {
    if cov.nrows() != cov.ncols() {
        return Err(Error::NotCovariance(format!(
            "not square: {}x{}",
            cov.nrows(),
            cov.ncols()
        )));
    }
    let asym = max_abs_asymmetry(cov);
    if asym > T::of(SYM_TOL) {
        return Err(Error::NotCovariance(format!(
            "asymmetry {asym:?} exceeds {SYM_TOL:e}"
        )));
    }
    let sym = symmetrize(cov);
    let eig = sym.clone().symmetric_eigen();
    let mut clipped = false;
    let mut vals = eig.eigenvalues.clone();
    for v in vals.iter_mut() {
        if *v < -T::of(PSD_CLIP) {
            return Err(Error::NotCovariance(format!(
                "negative eigenvalue {v:?} below -{PSD_CLIP:e}"
            )));
        }
        if *v < T::zero() {
            *v = T::zero();
            clipped = true;
        }
    }
    if clipped {
        let basis = eig.eigenvectors;
        Ok(&basis * DMatrix::from_diagonal(&vals) * basis.transpose())
    } else {
        Ok(sym)
    }
}

pub fn min_eigenvalue<T: Scalar>(m: &DMatrix<T>) -> T {
    let eig = symmetrize(m).symmetric_eigen();
    let mut lo = eig.eigenvalues[0];
    for v in eig.eigenvalues.iter() {
        if *v < lo {
            lo = *v;
        }
    }
    lo
}

pub fn max_eigenvalue<T: Scalar>(m: &DMatrix<T>) -> T {
    let eig = symmetrize(m).symmetric_eigen();
    let mut hi = eig.eigenvalues[0];
    for v in eig.eigenvalues.iter() {
        if *v > hi {
            hi = *v;
        }
    }
    hi
}

/// Nearest PSD matrix: symmetrize and clip negative eigenvalues at zero.
pub fn clip_psd<T: Scalar>(m: &DMatrix<T>) -> DMatrix<T> {
    let eig = symmetrize(m).symmetric_eigen();
    let vals = eig.eigenvalues.map(|v| if v < T::zero() { T::zero() } else { v });
    &eig.eigenvectors * DMatrix::from_diagonal(&vals) * eig.eigenvectors.transpose()
}

pub fn quad_form<T: Scalar>(q: &DMatrix<T>, t: &DVector<T>) -> T {
    let qt = q * t;
    t.dot(&qt)
}

pub fn det_psd<T: Scalar>(m: &DMatrix<T>) -> T {
    m.clone().determinant()
}

pub fn l1_norm<T: Scalar>(t: &DVector<T>) -> T {
    t.iter().fold(T::zero(), |acc, x| acc + x.abs())
}

/// `log det` of a positive-definite matrix via Cholesky.
pub fn log_det_pd<T: Scalar>(m: &DMatrix<T>) -> Result<T> {
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Degenerate("matrix not positive definite".into()))?;
    let two = T::of(2.0);
    let mut acc = T::zero();
    let l = chol.l();
    for i in 0..m.nrows() {
        acc += l[(i, i)].ln();
    }
    Ok(two * acc)
}

/// Differential entropy of a Gaussian with covariance `q`, in nats.
pub fn gaussian_entropy<T: Scalar>(q: &DMatrix<T>) -> Result<T> {
    let d = T::from_usize(q.nrows()).unwrap();
    let half = T::of(0.5);
    Ok(half * (log_det_pd(q)? + d * (T::two_pi() * T::e()).ln()))
}

/// Condition-number estimate in the 2-norm from the symmetric eigenvalues of
/// `m^T m`.
pub fn condition_estimate<T: Scalar>(m: &DMatrix<T>) -> T {
    let gram = m.transpose() * m;
    let eig = gram.symmetric_eigen();
    let mut lo = T::max_value().unwrap();
    let mut hi = T::zero();
    for v in eig.eigenvalues.iter() {
        let v = v.abs();
        if v < lo {
            lo = v;
        }
        if v > hi {
            hi = v;
        }
    }
    if lo <= T::zero() {
        T::max_value().unwrap()
    } else {
        (hi / lo).sqrt()
    }
}
