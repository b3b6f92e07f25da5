//! Closed, exactly-evaluable algebra of `d`-dimensional probability laws.
//!
//! Every law expressible here is a finite mixture of (possibly degenerate)
//! Gaussians, which is what makes moments, characteristic functions and
//! densities exact: atoms are zero-covariance components, affine images and
//! independent sums act componentwise, and mixtures concatenate.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::linalg::{self, validate_covariance};
use crate::{Error, Result, Scalar};

/// Tolerance for weight normalization.
pub const WEIGHT_TOL: f64 = 1e-12;

/// A probability law on `R^d`.
#[derive(Debug, Clone)]
pub enum Distribution<T: Scalar> {
    Gaussian {
        mean: DVector<T>,
        cov: DMatrix<T>,
    },
    Atoms {
        points: Vec<DVector<T>>,
        weights: Vec<T>,
    },
    Mixture {
        components: Vec<Distribution<T>>,
        weights: Vec<T>,
    },
    Affine {
        matrix: DMatrix<T>,
        offset: DVector<T>,
        base: Box<Distribution<T>>,
    },
    IndepSum {
        left: Box<Distribution<T>>,
        right: Box<Distribution<T>>,
    },
}

fn check_weights<T: Scalar>(weights: &[T]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidWeights("empty weight vector".into()));
    }
    let mut sum = T::zero();
    for w in weights {
        if *w < T::zero() {
            return Err(Error::InvalidWeights(format!("negative weight {w:?}")));
        }
        sum += *w;
    }
    if (sum - T::one()).abs() > T::of(WEIGHT_TOL) {
        return Err(Error::InvalidWeights(format!("weights sum to {sum:?}")));
    }
    Ok(())
}

impl<T: Scalar> Distribution<T> {
    pub fn gaussian(mean: DVector<T>, cov: DMatrix<T>) -> Result<Self> {
        let cov = validate_covariance(&cov)?;
        if cov.nrows() != mean.len() {
            return Err(Error::DimensionMismatch {
                expected: mean.len(),
                got: cov.nrows(),
            });
        }
        Ok(Self::Gaussian { mean, cov })
    }

    /// Standard normal in `d` dimensions.
    pub fn standard_gaussian(d: usize) -> Self {
        Self::Gaussian {
            mean: DVector::zeros(d),
            cov: DMatrix::identity(d, d),
        }
    }

    pub fn atoms(points: Vec<DVector<T>>, weights: Vec<T>) -> Result<Self> {
        check_weights(&weights)?;
        if points.len() != weights.len() {
            return Err(Error::InvalidWeights(format!(
                "{} points vs {} weights",
                points.len(),
                weights.len()
            )));
        }
        let d = points[0].len();
        for p in &points {
            if p.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: p.len(),
                });
            }
        }
        Ok(Self::Atoms { points, weights })
    }

    /// Point mass at `x`.
    pub fn point(x: DVector<T>) -> Self {
        Self::Atoms {
            points: vec![x],
            weights: vec![T::one()],
        }
    }

    /// Symmetric two-point law on `{-a, +a}` (d = 1).
    pub fn binary(a: T) -> Self {
        let half = T::of(0.5);
        Self::Atoms {
            points: vec![DVector::from_vec(vec![-a]), DVector::from_vec(vec![a])],
            weights: vec![half, half],
        }
    }

    pub fn mixture(components: Vec<Distribution<T>>, weights: Vec<T>) -> Result<Self> {
        check_weights(&weights)?;
        if components.len() != weights.len() {
            return Err(Error::InvalidWeights(format!(
                "{} components vs {} weights",
                components.len(),
                weights.len()
            )));
        }
        let d = components[0].dim();
        for c in &components {
            if c.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: c.dim(),
                });
            }
        }
        Ok(Self::Mixture {
            components,
            weights,
        })
    }

    pub fn affine(matrix: DMatrix<T>, offset: DVector<T>, base: Distribution<T>) -> Result<Self> {
        if matrix.ncols() != base.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                got: matrix.ncols(),
            });
        }
        if matrix.nrows() != offset.len() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: offset.len(),
            });
        }
        Ok(Self::Affine {
            matrix,
            offset,
            base: Box::new(base),
        })
    }

    pub fn translate(self, shift: &DVector<T>) -> Result<Self> {
        let d = self.dim();
        Self::affine(DMatrix::identity(d, d), shift.clone(), self)
    }

    pub fn indep_sum(left: Distribution<T>, right: Distribution<T>) -> Result<Self> {
        if left.dim() != right.dim() {
            return Err(Error::DimensionMismatch {
                expected: left.dim(),
                got: right.dim(),
            });
        }
        Ok(Self::IndepSum {
            left: Box::new(left),
            right: Box::new(right),
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Gaussian { mean, .. } => mean.len(),
            Self::Atoms { points, .. } => points[0].len(),
            Self::Mixture { components, .. } => components[0].dim(),
            Self::Affine { matrix, .. } => matrix.nrows(),
            Self::IndepSum { left, .. } => left.dim(),
        }
    }

    /// Exact mean and covariance, propagated through the algebra.
    pub fn mean_cov(&self) -> (DVector<T>, DMatrix<T>) {
        match self {
            Self::Gaussian { mean, cov } => (mean.clone(), cov.clone()),
            Self::Atoms { points, weights } => {
                let d = points[0].len();
                let mut mean = DVector::zeros(d);
                for (p, w) in points.iter().zip(weights) {
                    mean += p * *w;
                }
                let mut cov = DMatrix::zeros(d, d);
                for (p, w) in points.iter().zip(weights) {
                    let c = p - &mean;
                    cov += &c * c.transpose() * *w;
                }
                (mean, cov)
            }
            Self::Mixture {
                components,
                weights,
            } => {
                let d = components[0].dim();
                let parts: Vec<_> = components.iter().map(|c| c.mean_cov()).collect();
                let mut mean = DVector::zeros(d);
                for ((m, _), w) in parts.iter().zip(weights) {
                    mean += m * *w;
                }
                // law of total covariance
                let mut cov = DMatrix::zeros(d, d);
                for ((m, q), w) in parts.iter().zip(weights) {
                    let c = m - &mean;
                    cov += (q + &c * c.transpose()) * *w;
                }
                (mean, cov)
            }
            Self::Affine {
                matrix,
                offset,
                base,
            } => {
                let (m, q) = base.mean_cov();
                (matrix * m + offset, matrix * q * matrix.transpose())
            }
            Self::IndepSum { left, right } => {
                let (m1, q1) = left.mean_cov();
                let (m2, q2) = right.mean_cov();
                (m1 + m2, q1 + q2)
            }
        }
    }

    /// Second-moment matrix `E[X X^T]`.
    pub fn second_moment(&self) -> DMatrix<T> {
        let (m, q) = self.mean_cov();
        q + &m * m.transpose()
    }

    /// Upper bound on `E||X||_1` from per-coordinate second moments.
    pub fn l1_moment_bound(&self) -> T {
        let s = self.second_moment();
        let mut acc = T::zero();
        for i in 0..s.nrows() {
            acc += s[(i, i)].max(T::zero()).sqrt();
        }
        acc
    }

    /// Convolution with an independent non-degenerate Gaussian.
    pub fn smooth(self, noise_cov: DMatrix<T>) -> Result<Self> {
        let noise_cov = validate_covariance(&noise_cov)?;
        if linalg::min_eigenvalue(&noise_cov) <= T::zero() {
            return Err(Error::Degenerate(
                "smoothing noise covariance must be positive definite".into(),
            ));
        }
        let d = self.dim();
        if noise_cov.nrows() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: noise_cov.nrows(),
            });
        }
        Self::indep_sum(
            self,
            Self::Gaussian {
                mean: DVector::zeros(d),
                cov: noise_cov,
            },
        )
    }

    /// Canonical form: the finite Gaussian-mixture representation.
    ///
    /// Components may carry singular covariances (atoms have zero covariance);
    /// a density exists iff every component covariance is positive definite.
    pub fn to_gaussian_mixture(&self) -> GaussianMixture<T> {
        match self {
            Self::Gaussian { mean, cov } => GaussianMixture {
                dim: mean.len(),
                components: vec![GmComponent {
                    weight: T::one(),
                    mean: mean.clone(),
                    cov: cov.clone(),
                }],
            },
            Self::Atoms { points, weights } => {
                let d = points[0].len();
                GaussianMixture {
                    dim: d,
                    components: points
                        .iter()
                        .zip(weights)
                        .map(|(p, w)| GmComponent {
                            weight: *w,
                            mean: p.clone(),
                            cov: DMatrix::zeros(d, d),
                        })
                        .collect(),
                }
            }
            Self::Mixture {
                components,
                weights,
            } => {
                let mut out = Vec::new();
                for (c, w) in components.iter().zip(weights) {
                    for mut comp in c.to_gaussian_mixture().components {
                        comp.weight *= *w;
                        out.push(comp);
                    }
                }
                GaussianMixture {
                    dim: components[0].dim(),
                    components: out,
                }
            }
            Self::Affine {
                matrix,
                offset,
                base,
            } => {
                let gm = base.to_gaussian_mixture();
                GaussianMixture {
                    dim: matrix.nrows(),
                    components: gm
                        .components
                        .into_iter()
                        .map(|c| GmComponent {
                            weight: c.weight,
                            mean: matrix * c.mean + offset,
                            cov: matrix * c.cov * matrix.transpose(),
                        })
                        .collect(),
                }
            }
            Self::IndepSum { left, right } => {
                let a = left.to_gaussian_mixture();
                let b = right.to_gaussian_mixture();
                let mut out = Vec::with_capacity(a.components.len() * b.components.len());
                for ca in &a.components {
                    for cb in &b.components {
                        out.push(GmComponent {
                            weight: ca.weight * cb.weight,
                            mean: &ca.mean + &cb.mean,
                            cov: &ca.cov + &cb.cov,
                        });
                    }
                }
                GaussianMixture {
                    dim: a.dim,
                    components: out,
                }
            }
        }
    }

    /// Closed-form density evaluator; errors when any mixture component is
    /// degenerate.
    pub fn density(&self) -> Result<Density<T>> {
        self.to_gaussian_mixture().density()
    }
}

/// One Gaussian-mixture component; `cov` may be singular.
#[derive(Debug, Clone)]
pub struct GmComponent<T: Scalar> {
    pub weight: T,
    pub mean: DVector<T>,
    pub cov: DMatrix<T>,
}

/// Finite Gaussian mixture, the canonical form of every [`Distribution`].
#[derive(Debug, Clone)]
pub struct GaussianMixture<T: Scalar> {
    pub dim: usize,
    pub components: Vec<GmComponent<T>>,
}

impl<T: Scalar> GaussianMixture<T> {
    pub fn density(&self) -> Result<Density<T>> {
        let mut prepared = Vec::with_capacity(self.components.len());
        let log_two_pi = T::two_pi().ln();
        for c in &self.components {
            let chol = c.cov.clone().cholesky().ok_or_else(|| {
                Error::NoDensity("mixture component with singular covariance".into())
            })?;
            let mut log_det = T::zero();
            for i in 0..self.dim {
                log_det += chol.l()[(i, i)].ln();
            }
            log_det *= T::of(2.0);
            let d = T::from_usize(self.dim).unwrap();
            let log_norm = -T::of(0.5) * (d * log_two_pi + log_det);
            prepared.push(PreparedComponent {
                weight: c.weight,
                mean: c.mean.clone(),
                chol,
                log_norm,
            });
        }
        Ok(Density {
            dim: self.dim,
            components: prepared,
        })
    }
}

struct PreparedComponent<T: Scalar> {
    weight: T,
    mean: DVector<T>,
    chol: nalgebra::Cholesky<T, nalgebra::Dyn>,
    log_norm: T,
}

/// Closed-form Gaussian-mixture density.
pub struct Density<T: Scalar> {
    dim: usize,
    components: Vec<PreparedComponent<T>>,
}

impl<T: Scalar> Density<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &DVector<T>) -> T {
        let half = T::of(0.5);
        let mut acc = T::zero();
        for c in &self.components {
            let diff = x - &c.mean;
            let sol = c.chol.solve(&diff);
            let maha = diff.dot(&sol);
            acc += c.weight * (c.log_norm - half * maha).exp();
        }
        acc
    }
}

/// A coupled pair of random vectors.
///
/// The joint law of every variant stays inside the [`Distribution`] algebra,
/// which keeps pair-level queries (joint characteristic function, marginals,
/// densities) exact.
#[derive(Debug, Clone)]
pub enum JointPair<T: Scalar> {
    /// Independent parts.
    Independent {
        x1: Distribution<T>,
        x2: Distribution<T>,
    },
    /// Finitely supported coupling on `(d1 + d2)`-dimensional atoms.
    CoupledAtoms {
        points: Vec<DVector<T>>,
        weights: Vec<T>,
        split: usize,
    },
    /// Linear image of another pair, e.g. the sum/difference rotation.
    LinearImage {
        matrix: DMatrix<T>,
        split: usize,
        base: Box<JointPair<T>>,
    },
}

impl<T: Scalar> JointPair<T> {
    pub fn independent(x1: Distribution<T>, x2: Distribution<T>) -> Self {
        Self::Independent { x1, x2 }
    }

    pub fn coupled_atoms(points: Vec<DVector<T>>, weights: Vec<T>, split: usize) -> Result<Self> {
        check_weights(&weights)?;
        if points.len() != weights.len() {
            return Err(Error::InvalidWeights(format!(
                "{} points vs {} weights",
                points.len(),
                weights.len()
            )));
        }
        let total = points[0].len();
        if split == 0 || split >= total {
            return Err(Error::InvalidParameter(format!(
                "split {split} outside 1..{total}"
            )));
        }
        for p in &points {
            if p.len() != total {
                return Err(Error::DimensionMismatch {
                    expected: total,
                    got: p.len(),
                });
            }
        }
        Ok(Self::CoupledAtoms {
            points,
            weights,
            split,
        })
    }

    pub fn linear_image(matrix: DMatrix<T>, split: usize, base: JointPair<T>) -> Result<Self> {
        let (d1, d2) = base.dims();
        if matrix.ncols() != d1 + d2 {
            return Err(Error::DimensionMismatch {
                expected: d1 + d2,
                got: matrix.ncols(),
            });
        }
        if split == 0 || split >= matrix.nrows() {
            return Err(Error::InvalidParameter(format!(
                "split {split} outside 1..{}",
                matrix.nrows()
            )));
        }
        Ok(Self::LinearImage {
            matrix,
            split,
            base: Box::new(base),
        })
    }

    /// Dimensions `(d1, d2)` of the two parts.
    pub fn dims(&self) -> (usize, usize) {
        match self {
            Self::Independent { x1, x2 } => (x1.dim(), x2.dim()),
            Self::CoupledAtoms { points, split, .. } => (*split, points[0].len() - split),
            Self::LinearImage { matrix, split, .. } => (*split, matrix.nrows() - split),
        }
    }

    /// The joint law on `R^{d1+d2}` as a single distribution.
    pub fn joint_law(&self) -> Distribution<T> {
        match self {
            Self::Independent { x1, x2 } => {
                let (d1, d2) = (x1.dim(), x2.dim());
                let mut e1 = DMatrix::zeros(d1 + d2, d1);
                let mut e2 = DMatrix::zeros(d1 + d2, d2);
                for i in 0..d1 {
                    e1[(i, i)] = T::one();
                }
                for i in 0..d2 {
                    e2[(d1 + i, i)] = T::one();
                }
                Distribution::IndepSum {
                    left: Box::new(Distribution::Affine {
                        matrix: e1,
                        offset: DVector::zeros(d1 + d2),
                        base: Box::new(x1.clone()),
                    }),
                    right: Box::new(Distribution::Affine {
                        matrix: e2,
                        offset: DVector::zeros(d1 + d2),
                        base: Box::new(x2.clone()),
                    }),
                }
            }
            Self::CoupledAtoms {
                points, weights, ..
            } => Distribution::Atoms {
                points: points.clone(),
                weights: weights.clone(),
            },
            Self::LinearImage { matrix, base, .. } => Distribution::Affine {
                matrix: matrix.clone(),
                offset: DVector::zeros(matrix.nrows()),
                base: Box::new(base.joint_law()),
            },
        }
    }

    /// Marginal laws of the two parts.
    pub fn marginal_laws(&self) -> (Distribution<T>, Distribution<T>) {
        match self {
            Self::Independent { x1, x2 } => (x1.clone(), x2.clone()),
            _ => {
                let (d1, d2) = self.dims();
                let joint = self.joint_law();
                let mut s1 = DMatrix::zeros(d1, d1 + d2);
                let mut s2 = DMatrix::zeros(d2, d1 + d2);
                for i in 0..d1 {
                    s1[(i, i)] = T::one();
                }
                for i in 0..d2 {
                    s2[(i, d1 + i)] = T::one();
                }
                (
                    Distribution::Affine {
                        matrix: s1,
                        offset: DVector::zeros(d1),
                        base: Box::new(joint.clone()),
                    },
                    Distribution::Affine {
                        matrix: s2,
                        offset: DVector::zeros(d2),
                        base: Box::new(joint),
                    },
                )
            }
        }
    }

    /// Sum/difference rotation `(x1, x2) -> ((x1+x2)/sqrt 2, (x1-x2)/sqrt 2)`.
    pub fn double(&self) -> Result<JointPair<T>> {
        let (d1, d2) = self.dims();
        if d1 != d2 {
            return Err(Error::DimensionMismatch {
                expected: d1,
                got: d2,
            });
        }
        let s = T::one() / T::of(2.0).sqrt();
        let mut m = DMatrix::zeros(2 * d1, 2 * d1);
        for i in 0..d1 {
            m[(i, i)] = s;
            m[(i, d1 + i)] = s;
            m[(d1 + i, i)] = s;
            m[(d1 + i, d1 + i)] = -s;
        }
        Self::linear_image(m, d1, self.clone())
    }

    /// Unnormalized sum/difference pair `(x1 + x2, x1 - x2)`.
    pub fn sum_difference(&self) -> Result<JointPair<T>> {
        let (d1, d2) = self.dims();
        if d1 != d2 {
            return Err(Error::DimensionMismatch {
                expected: d1,
                got: d2,
            });
        }
        let one = T::one();
        let mut m = DMatrix::zeros(2 * d1, 2 * d1);
        for i in 0..d1 {
            m[(i, i)] = one;
            m[(i, d1 + i)] = one;
            m[(d1 + i, i)] = one;
            m[(d1 + i, d1 + i)] = -one;
        }
        Self::linear_image(m, d1, self.clone())
    }

    /// `(x1 + n1, x2 + n2)` with fresh independent noise on each part.
    pub fn add_independent_noise(
        &self,
        n1: Distribution<T>,
        n2: Distribution<T>,
    ) -> Result<JointPair<T>> {
        let (d1, d2) = self.dims();
        if n1.dim() != d1 {
            return Err(Error::DimensionMismatch {
                expected: d1,
                got: n1.dim(),
            });
        }
        if n2.dim() != d2 {
            return Err(Error::DimensionMismatch {
                expected: d2,
                got: n2.dim(),
            });
        }
        let base = JointPair::Independent {
            x1: self.joint_law(),
            x2: JointPair::Independent { x1: n1, x2: n2 }.joint_law(),
        };
        // (x, y, n1, n2) -> (x + n1, y + n2)
        let mut m = DMatrix::zeros(d1 + d2, 2 * (d1 + d2));
        for i in 0..d1 {
            m[(i, i)] = T::one();
            m[(i, d1 + d2 + i)] = T::one();
        }
        for i in 0..d2 {
            m[(d1 + i, d1 + i)] = T::one();
            m[(d1 + i, d1 + d2 + d1 + i)] = T::one();
        }
        Self::linear_image(m, d1, base)
    }

    /// `(A1 x1, A2 x2)` for part-wise linear maps.
    pub fn map_parts(&self, a1: &DMatrix<T>, a2: &DMatrix<T>) -> Result<JointPair<T>> {
        let (d1, d2) = self.dims();
        if a1.ncols() != d1 || a2.ncols() != d2 {
            return Err(Error::DimensionMismatch {
                expected: d1,
                got: a1.ncols(),
            });
        }
        let (k1, k2) = (a1.nrows(), a2.nrows());
        let mut m = DMatrix::zeros(k1 + k2, d1 + d2);
        m.view_mut((0, 0), (k1, d1)).copy_from(a1);
        m.view_mut((k1, d1), (k2, d2)).copy_from(a2);
        Self::linear_image(m, k1, self.clone())
    }
}

// ---------------------------------------------------------------------------
// JSON wire schema (tagged unions, matrices as row-major nested arrays)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionWire {
    Gaussian {
        mean: Vec<f64>,
        cov: Vec<Vec<f64>>,
    },
    Atoms {
        points: Vec<Vec<f64>>,
        weights: Vec<f64>,
    },
    Mixture {
        components: Vec<DistributionWire>,
        weights: Vec<f64>,
    },
    Affine {
        matrix: Vec<Vec<f64>>,
        offset: Vec<f64>,
        base: Box<DistributionWire>,
    },
    IndepSum {
        left: Box<DistributionWire>,
        right: Box<DistributionWire>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum JointPairWire {
    IndependentPair {
        x1: DistributionWire,
        x2: DistributionWire,
    },
    CoupledAtoms {
        points: Vec<Vec<f64>>,
        weights: Vec<f64>,
        split: usize,
    },
    LinearImage {
        matrix: Vec<Vec<f64>>,
        split: usize,
        base: Box<JointPairWire>,
    },
}

fn vec_to_vector<T: Scalar>(v: &[f64]) -> DVector<T> {
    DVector::from_iterator(v.len(), v.iter().map(|x| T::of(*x)))
}

fn rows_to_matrix<T: Scalar>(rows: &[Vec<f64>]) -> Result<DMatrix<T>> {
    if rows.is_empty() {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    let ncols = rows[0].len();
    for r in rows {
        if r.len() != ncols {
            return Err(Error::InvalidParameter("ragged matrix rows".into()));
        }
    }
    Ok(DMatrix::from_row_iterator(
        rows.len(),
        ncols,
        rows.iter().flatten().map(|x| T::of(*x)),
    ))
}

fn vector_to_vec<T: Scalar>(v: &DVector<T>) -> Vec<f64> {
    v.iter().map(|x| x.to_subset().unwrap()).collect()
}

fn matrix_to_rows<T: Scalar>(m: &DMatrix<T>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].to_subset().unwrap()).collect())
        .collect()
}

impl DistributionWire {
    pub fn decode<T: Scalar>(&self) -> Result<Distribution<T>> {
        match self {
            Self::Gaussian { mean, cov } => {
                Distribution::gaussian(vec_to_vector(mean), rows_to_matrix(cov)?)
            }
            Self::Atoms { points, weights } => Distribution::atoms(
                points.iter().map(|p| vec_to_vector(p)).collect(),
                weights.iter().map(|w| T::of(*w)).collect(),
            ),
            Self::Mixture {
                components,
                weights,
            } => Distribution::mixture(
                components
                    .iter()
                    .map(|c| c.decode())
                    .collect::<Result<_>>()?,
                weights.iter().map(|w| T::of(*w)).collect(),
            ),
            Self::Affine {
                matrix,
                offset,
                base,
            } => Distribution::affine(rows_to_matrix(matrix)?, vec_to_vector(offset), base.decode()?),
            Self::IndepSum { left, right } => {
                Distribution::indep_sum(left.decode()?, right.decode()?)
            }
        }
    }

    pub fn encode<T: Scalar>(dist: &Distribution<T>) -> Self {
        match dist {
            Distribution::Gaussian { mean, cov } => Self::Gaussian {
                mean: vector_to_vec(mean),
                cov: matrix_to_rows(cov),
            },
            Distribution::Atoms { points, weights } => Self::Atoms {
                points: points.iter().map(vector_to_vec).collect(),
                weights: weights.iter().map(|w| w.to_subset().unwrap()).collect(),
            },
            Distribution::Mixture {
                components,
                weights,
            } => Self::Mixture {
                components: components.iter().map(Self::encode).collect(),
                weights: weights.iter().map(|w| w.to_subset().unwrap()).collect(),
            },
            Distribution::Affine {
                matrix,
                offset,
                base,
            } => Self::Affine {
                matrix: matrix_to_rows(matrix),
                offset: vector_to_vec(offset),
                base: Box::new(Self::encode(base)),
            },
            Distribution::IndepSum { left, right } => Self::IndepSum {
                left: Box::new(Self::encode(left)),
                right: Box::new(Self::encode(right)),
            },
        }
    }
}

impl JointPairWire {
    pub fn decode<T: Scalar>(&self) -> Result<JointPair<T>> {
        match self {
            Self::IndependentPair { x1, x2 } => {
                Ok(JointPair::independent(x1.decode()?, x2.decode()?))
            }
            Self::CoupledAtoms {
                points,
                weights,
                split,
            } => JointPair::coupled_atoms(
                points.iter().map(|p| vec_to_vector(p)).collect(),
                weights.iter().map(|w| T::of(*w)).collect(),
                *split,
            ),
            Self::LinearImage {
                matrix,
                split,
                base,
            } => JointPair::linear_image(rows_to_matrix(matrix)?, *split, base.decode()?),
        }
    }
}
