//! Exact characteristic-function evaluation, branch-tracked logarithms, grid
//! sweeps, and the two dependence metrics.
//!
//! Frequency balls are 1-norm balls throughout; grids are the axis-aligned
//! boxes circumscribing the ball with out-of-ball points masked. Grid suprema
//! are lower bounds on the analytic suprema; reports carry the grid spacing
//! and a moment-based Lipschitz pad so callers can account for the gap.

use nalgebra::DVector;
#[cfg(test)]
use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;

use crate::dist::{Distribution, JointPair};
use crate::linalg::{l1_norm, min_eigenvalue, quad_form};
use crate::{Error, Result, Scalar};

/// Modulus floor below which the complex logarithm is numerically meaningless.
pub const BRANCH_FLOOR: f64 = 1e-8;

/// Minimum smallest covariance eigenvalue for a decay certificate.
pub const DECAY_MIN_EIG: f64 = 1e-8;

/// Smallest decay constant worth certifying.
pub const DECAY_MIN_C: f64 = 1e-6;

pub fn cexp<T: Scalar>(z: Complex<T>) -> Complex<T> {
    let r = z.re.exp();
    Complex::new(r * z.im.cos(), r * z.im.sin())
}

pub fn cmod<T: Scalar>(z: Complex<T>) -> T {
    (z.re * z.re + z.im * z.im).sqrt()
}

fn carg<T: Scalar>(z: Complex<T>) -> T {
    z.im.atan2(z.re)
}

/// Exact characteristic function `E[exp(j t . X)]`.
pub fn cf_eval<T: Scalar>(dist: &Distribution<T>, t: &DVector<T>) -> Result<Complex<T>> {
    if t.len() != dist.dim() {
        return Err(Error::DimensionMismatch {
            expected: dist.dim(),
            got: t.len(),
        });
    }
    Ok(cf_eval_unchecked(dist, t))
}

fn cf_eval_unchecked<T: Scalar>(dist: &Distribution<T>, t: &DVector<T>) -> Complex<T> {
    match dist {
        Distribution::Gaussian { mean, cov } => {
            let half = T::of(0.5);
            cexp(Complex::new(-half * quad_form(cov, t), t.dot(mean)))
        }
        Distribution::Atoms { points, weights } => {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (p, w) in points.iter().zip(weights) {
                let phase = t.dot(p);
                acc += Complex::new(*w * phase.cos(), *w * phase.sin());
            }
            acc
        }
        Distribution::Mixture {
            components,
            weights,
        } => {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (c, w) in components.iter().zip(weights) {
                let f = cf_eval_unchecked(c, t);
                acc += Complex::new(*w * f.re, *w * f.im);
            }
            acc
        }
        Distribution::Affine {
            matrix,
            offset,
            base,
        } => {
            let pulled = matrix.transpose() * t;
            let f = cf_eval_unchecked(base, &pulled);
            let phase = t.dot(offset);
            f * Complex::new(phase.cos(), phase.sin())
        }
        Distribution::IndepSum { left, right } => {
            cf_eval_unchecked(left, t) * cf_eval_unchecked(right, t)
        }
    }
}

/// Exact joint characteristic function of a pair at `(t1, t2)`.
pub fn joint_cf_eval<T: Scalar>(
    pair: &JointPair<T>,
    t1: &DVector<T>,
    t2: &DVector<T>,
) -> Result<Complex<T>> {
    let (d1, d2) = pair.dims();
    if t1.len() != d1 || t2.len() != d2 {
        return Err(Error::DimensionMismatch {
            expected: d1 + d2,
            got: t1.len() + t2.len(),
        });
    }
    Ok(joint_cf_unchecked(pair, t1, t2))
}

fn joint_cf_unchecked<T: Scalar>(
    pair: &JointPair<T>,
    t1: &DVector<T>,
    t2: &DVector<T>,
) -> Complex<T> {
    match pair {
        JointPair::Independent { x1, x2 } => {
            cf_eval_unchecked(x1, t1) * cf_eval_unchecked(x2, t2)
        }
        JointPair::CoupledAtoms {
            points,
            weights,
            split,
        } => {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (p, w) in points.iter().zip(weights) {
                let mut phase = T::zero();
                for i in 0..*split {
                    phase += t1[i] * p[i];
                }
                for i in 0..t2.len() {
                    phase += t2[i] * p[split + i];
                }
                acc += Complex::new(*w * phase.cos(), *w * phase.sin());
            }
            acc
        }
        JointPair::LinearImage {
            matrix,
            split,
            base,
        } => {
            // frequencies pull back through the transpose of the map
            let mut t = DVector::zeros(matrix.nrows());
            for i in 0..*split {
                t[i] = t1[i];
            }
            for i in 0..t2.len() {
                t[split + i] = t2[i];
            }
            let pulled = matrix.transpose() * t;
            let (b1, b2) = base.dims();
            let s1 = DVector::from_iterator(b1, (0..b1).map(|i| pulled[i]));
            let s2 = DVector::from_iterator(b2, (0..b2).map(|i| pulled[b1 + i]));
            joint_cf_unchecked(base, &s1, &s2)
        }
    }
}

/// Second characteristic function `g = ln f` with the continuous branch from
/// `g(0) = 0`, tracked along the ray `0 -> t`.
pub fn second_cf<T: Scalar>(
    dist: &Distribution<T>,
    t: &DVector<T>,
    ray_steps: usize,
) -> Result<Complex<T>> {
    if ray_steps == 0 {
        return Err(Error::InvalidParameter("ray_steps must be positive".into()));
    }
    let floor = T::of(BRANCH_FLOOR);
    let mut prev = Complex::new(T::one(), T::zero());
    let mut phase = T::zero();
    let mut modulus = T::one();
    let steps = T::from_usize(ray_steps).unwrap();
    for k in 1..=ray_steps {
        let s = T::from_usize(k).unwrap() / steps;
        let f = cf_eval(dist, &(t * s))?;
        modulus = cmod(f);
        if modulus < floor {
            return Err(Error::BranchLost(format!(
                "|f| = {:?} below floor at ray fraction {:?}",
                modulus, s
            )));
        }
        let delta = carg(f * prev.conj());
        if !(delta.abs() < T::pi()) {
            return Err(Error::BranchLost(
                "phase jump of at least pi between consecutive ray samples".into(),
            ));
        }
        phase += delta;
        prev = f;
    }
    Ok(Complex::new(modulus.ln(), phase))
}

/// Descriptor of the tensor grid used by a sweep.
#[derive(Debug, Clone)]
pub struct GridMeta<T: Scalar> {
    pub radius: T,
    pub points_per_axis: usize,
    pub spacing: T,
    pub dims: (usize, usize),
}

/// Estimated `(epsilon, T)`-dependence with argmax witness.
#[derive(Debug, Clone)]
pub struct DependenceReport<T: Scalar> {
    pub epsilon_hat: T,
    pub t_radius: T,
    pub witness: (DVector<T>, DVector<T>),
    pub robust: bool,
    pub excluded_fraction: Option<T>,
    pub lipschitz_pad: T,
    pub grid: GridMeta<T>,
}

/// Certified quadratic modulus decay `|f(t)| <= 1 - c ||t||^2` on a ball.
#[derive(Debug, Clone)]
pub struct DecayCertificate<T: Scalar> {
    pub c: T,
    pub t_radius: T,
}

/// 1-D grid `-radius..radius` with `n` points (odd `n` puts 0 on the grid).
fn axis_grid<T: Scalar>(radius: T, n: usize) -> Vec<T> {
    let spacing = T::of(2.0) * radius / T::from_usize(n - 1).unwrap();
    (0..n)
        .map(|i| -radius + spacing * T::from_usize(i).unwrap())
        .collect()
}

/// All points of the tensor grid over `dim` axes inside the 1-norm ball, in
/// lexicographic index order.
pub(crate) fn ball_grid<T: Scalar>(radius: T, n: usize, dim: usize) -> Vec<DVector<T>> {
    let axis = axis_grid(radius, n);
    let slack = radius * T::of(1.0 + 1e-12);
    let mut out = Vec::new();
    let mut idx = vec![0usize; dim];
    loop {
        let p = DVector::from_iterator(dim, idx.iter().map(|&i| axis[i]));
        if l1_norm(&p) <= slack {
            out.push(p);
        }
        // odometer, most significant axis first
        let mut k = dim;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn grid_checks<T: Scalar>(t_radius: T, n: usize) -> Result<()> {
    if t_radius <= T::zero() {
        return Err(Error::InvalidGrid("radius must be positive".into()));
    }
    if n < 3 || n % 2 == 0 {
        return Err(Error::InvalidGrid(format!(
            "points_per_axis must be odd and at least 3, got {n}"
        )));
    }
    Ok(())
}

struct SweepTables<T: Scalar> {
    grid1: Vec<DVector<T>>,
    grid2: Vec<DVector<T>>,
    f1: Vec<Complex<T>>,
    f2: Vec<Complex<T>>,
    pad: T,
    meta: GridMeta<T>,
}

fn sweep_tables<T: Scalar>(pair: &JointPair<T>, t_radius: T, n: usize) -> Result<SweepTables<T>> {
    grid_checks(t_radius, n)?;
    let (d1, d2) = pair.dims();
    let (m1, m2) = pair.marginal_laws();
    let grid1 = ball_grid(t_radius, n, d1);
    let grid2 = ball_grid(t_radius, n, d2);
    let f1 = grid1
        .iter()
        .map(|t| cf_eval(&m1, t))
        .collect::<Result<Vec<_>>>()?;
    let f2 = grid2
        .iter()
        .map(|t| cf_eval(&m2, t))
        .collect::<Result<Vec<_>>>()?;
    let spacing = T::of(2.0) * t_radius / T::from_usize(n - 1).unwrap();
    let pad = spacing * (m1.l1_moment_bound() + m2.l1_moment_bound());
    Ok(SweepTables {
        grid1,
        grid2,
        f1,
        f2,
        pad,
        meta: GridMeta {
            radius: t_radius,
            points_per_axis: n,
            spacing,
            dims: (d1, d2),
        },
    })
}

/// Grid estimate of the `(epsilon, T)`-dependence of a pair.
///
/// The returned `epsilon_hat` is the maximum of
/// `|f_{X1 X2}(t1, t2) - f_{X1}(t1) f_{X2}(t2)|` over the masked tensor grid,
/// with the lexicographically smallest argmax as witness.
pub fn dependence_sup<T: Scalar + Send + Sync>(
    pair: &JointPair<T>,
    t_radius: T,
    n: usize,
) -> Result<DependenceReport<T>> {
    let tabs = sweep_tables(pair, t_radius, n)?;
    let rows: Vec<(T, usize)> = tabs
        .grid1
        .par_iter()
        .enumerate()
        .map(|(i, t1)| {
            let mut best = (T::zero() - T::one(), 0usize);
            for (j, t2) in tabs.grid2.iter().enumerate() {
                let joint = joint_cf_unchecked(pair, t1, t2);
                let gap = cmod(joint - tabs.f1[i] * tabs.f2[j]);
                if gap > best.0 {
                    best = (gap, j);
                }
            }
            best
        })
        .collect();
    let mut max = T::zero() - T::one();
    let mut wit = (0usize, 0usize);
    for (i, (gap, j)) in rows.iter().enumerate() {
        if *gap > max {
            max = *gap;
            wit = (i, *j);
        }
    }
    Ok(DependenceReport {
        epsilon_hat: max.max(T::zero()),
        t_radius,
        witness: (tabs.grid1[wit.0].clone(), tabs.grid2[wit.1].clone()),
        robust: false,
        excluded_fraction: None,
        lipschitz_pad: tabs.pad,
        grid: tabs.meta,
    })
}

/// Grid estimate of robust dependence: the same gap divided by
/// `|f_{X1}| |f_{X2}|`, restricted to grid points where the product modulus is
/// at least `floor`.
pub fn robust_dependence_sup<T: Scalar + Send + Sync>(
    pair: &JointPair<T>,
    t_radius: T,
    n: usize,
    floor: T,
) -> Result<DependenceReport<T>> {
    if floor <= T::zero() {
        return Err(Error::InvalidParameter("floor must be positive".into()));
    }
    let tabs = sweep_tables(pair, t_radius, n)?;
    let rows: Vec<(T, usize, usize)> = tabs
        .grid1
        .par_iter()
        .enumerate()
        .map(|(i, t1)| {
            let mut best = (T::zero() - T::one(), 0usize);
            let mut excluded = 0usize;
            for (j, t2) in tabs.grid2.iter().enumerate() {
                let prod = tabs.f1[i] * tabs.f2[j];
                let mag = cmod(prod);
                if mag < floor {
                    excluded += 1;
                    continue;
                }
                let joint = joint_cf_unchecked(pair, t1, t2);
                let ratio = cmod(joint - prod) / mag;
                if ratio > best.0 {
                    best = (ratio, j);
                }
            }
            (best.0, best.1, excluded)
        })
        .collect();
    let total = tabs.grid1.len() * tabs.grid2.len();
    let excluded: usize = rows.iter().map(|r| r.2).sum();
    if excluded == total {
        return Err(Error::AllBelowFloor);
    }
    let mut max = T::zero() - T::one();
    let mut wit = (0usize, 0usize);
    for (i, (ratio, j, _)) in rows.iter().enumerate() {
        if *ratio > max {
            max = *ratio;
            wit = (i, *j);
        }
    }
    Ok(DependenceReport {
        epsilon_hat: max.max(T::zero()),
        t_radius,
        witness: (tabs.grid1[wit.0].clone(), tabs.grid2[wit.1].clone()),
        robust: true,
        excluded_fraction: Some(
            T::from_usize(excluded).unwrap() / T::from_usize(total).unwrap(),
        ),
        lipschitz_pad: tabs.pad,
        grid: tabs.meta,
    })
}

fn decay_axis_points(dim: usize) -> usize {
    match dim {
        1 => 801,
        2 => 57,
        _ => 15,
    }
}

/// Searches for the largest `c` with `|f(t)| <= 1 - c ||t||^2` on the audit
/// grid of some ball `||t|| <= T`, trying `T = t_max, t_max/2, ...` and
/// returning the first certificate with `c >= DECAY_MIN_C`.
pub fn decay_certificate<T: Scalar>(
    dist: &Distribution<T>,
    t_max: T,
) -> Result<DecayCertificate<T>> {
    if t_max <= T::zero() {
        return Err(Error::InvalidParameter("t_max must be positive".into()));
    }
    let (_, cov) = dist.mean_cov();
    if min_eigenvalue(&cov) <= T::of(DECAY_MIN_EIG) {
        return Err(Error::Degenerate(
            "distribution concentrated on a hyperplane has no quadratic decay".into(),
        ));
    }
    let d = dist.dim();
    let n = decay_axis_points(d);
    let mut radius = t_max;
    for _ in 0..16 {
        let mut c = T::max_value().unwrap();
        for t in ball_grid(radius, n, d) {
            let norm = l1_norm(&t);
            if norm == T::zero() {
                continue;
            }
            let f = cf_eval(dist, &t)?;
            let ratio = (T::one() - cmod(f)) / (norm * norm);
            if ratio < c {
                c = ratio;
            }
        }
        if c >= T::of(DECAY_MIN_C) {
            return Ok(DecayCertificate {
                c,
                t_radius: radius,
            });
        }
        radius *= T::of(0.5);
    }
    Err(Error::NoConvergence(
        "no quadratic decay certificate found down to t_max / 2^16".into(),
    ))
}

/// Characteristic-function samples over a masked ball grid, for CSV export.
#[derive(Debug, Clone)]
pub struct CfGrid<T: Scalar> {
    pub radius: T,
    pub points_per_axis: usize,
    pub dim: usize,
    pub points: Vec<DVector<T>>,
    pub values: Vec<Complex<T>>,
}

pub fn sample_cf_grid<T: Scalar>(
    dist: &Distribution<T>,
    radius: T,
    n: usize,
) -> Result<CfGrid<T>> {
    grid_checks(radius, n)?;
    let points = ball_grid(radius, n, dist.dim());
    let values = points
        .iter()
        .map(|t| cf_eval(dist, t))
        .collect::<Result<Vec<_>>>()?;
    // 0 must be a grid point and carry f(0) = 1
    let zero_val = points
        .iter()
        .zip(&values)
        .find(|(p, _)| l1_norm(p) == T::zero())
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::InvalidGrid("grid does not contain 0".into()))?;
    if cmod(zero_val - Complex::new(T::one(), T::zero())) > T::of(1e-12) {
        return Err(Error::InvalidGrid("f(0) deviates from 1".into()));
    }
    Ok(CfGrid {
        radius,
        points_per_axis: n,
        dim: dist.dim(),
        points,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Distribution as D;
    use approx::assert_relative_eq;

    fn dvec(v: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(v)
    }

    #[test]
    fn cf_trivial_values() {
        let g = D::standard_gaussian(2);
        let one = cf_eval(&g, &dvec(&[0.0, 0.0])).unwrap();
        assert_relative_eq!(one.re, 1.0);
        assert_relative_eq!(one.im, 0.0);

        let e1 = cf_eval(&g, &dvec(&[1.0, 0.0])).unwrap();
        assert_relative_eq!(e1.re, (-0.5f64).exp(), epsilon = 1e-15);

        let b = D::binary(1.0);
        for t in [0.3, 1.2, -2.0] {
            let f = cf_eval(&b, &dvec(&[t])).unwrap();
            assert_relative_eq!(f.re, t.cos(), epsilon = 1e-15);
            assert_relative_eq!(f.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn cf_affine_and_sum() {
        // affine image of a Gaussian matches the Gaussian of the pushed moments
        let base = D::standard_gaussian(2);
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        let off = dvec(&[0.5, -1.0]);
        let img = D::affine(a.clone(), off.clone(), base).unwrap();
        let (m, q) = img.mean_cov();
        let direct = D::gaussian(m, q).unwrap();
        for t in [dvec(&[0.3, -0.7]), dvec(&[1.0, 0.2])] {
            let f1 = cf_eval(&img, &t).unwrap();
            let f2 = cf_eval(&direct, &t).unwrap();
            assert_relative_eq!((f1 - f2).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn joint_cf_factorizes_iff_independent() {
        let pair = JointPair::independent(D::binary(1.0), D::standard_gaussian(1));
        let t1 = dvec(&[0.7]);
        let t2 = dvec(&[-0.4]);
        let joint = joint_cf_eval(&pair, &t1, &t2).unwrap();
        let (m1, m2) = pair.marginal_laws();
        let prod = cf_eval(&m1, &t1).unwrap() * cf_eval(&m2, &t2).unwrap();
        assert_relative_eq!((joint - prod).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn doubled_iid_pair_at_equal_frequencies() {
        // pushing (t, t) through the rotation transpose lands on (sqrt(2) t, 0)
        let x = D::binary(1.0);
        let pair = JointPair::independent(x.clone(), x.clone());
        let doubled = pair.double().unwrap();
        let t = dvec(&[0.6]);
        let joint = joint_cf_eval(&doubled, &t, &t).unwrap();
        let f = cf_eval(&x, &(&t * (2.0f64).sqrt())).unwrap();
        assert_relative_eq!((joint - f).norm(), 0.0, epsilon = 1e-14);

        // for a centered Gaussian marginal the same value also equals
        // f(sqrt(2) t)^2 since there f(2s) = f(s)^4
        let g = D::standard_gaussian(1);
        let gpair = JointPair::independent(g.clone(), g.clone())
            .double()
            .unwrap();
        let joint = joint_cf_eval(&gpair, &t, &t).unwrap();
        let fg = cf_eval(&g, &(&t * (2.0f64).sqrt())).unwrap();
        assert_relative_eq!((joint - fg).norm(), 0.0, epsilon = 1e-14);
        assert_relative_eq!((joint - fg * fg).norm(), fg.norm() * (1.0 - fg.norm()), epsilon = 1e-12);
    }

    #[test]
    fn second_cf_gaussian_exact() {
        let m = dvec(&[0.4, -1.1]);
        let q = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 2.0]);
        let g = D::gaussian(m.clone(), q.clone()).unwrap();
        let t = dvec(&[0.8, 0.5]);
        let val = second_cf(&g, &t, 64).unwrap();
        assert_relative_eq!(val.re, -0.5 * quad_form(&q, &t), epsilon = 1e-12);
        assert_relative_eq!(val.im, t.dot(&m), epsilon = 1e-12);
    }

    #[test]
    fn second_cf_zero_and_branch_loss() {
        let b = D::binary(1.0);
        let zero = second_cf(&b, &dvec(&[0.0]), 8).unwrap();
        assert_relative_eq!(zero.norm(), 0.0, epsilon = 1e-14);

        let err = second_cf(&b, &dvec(&[std::f64::consts::FRAC_PI_2]), 128);
        assert!(matches!(err, Err(Error::BranchLost(_))));
    }

    #[test]
    fn second_cf_tracks_phase_past_principal_branch() {
        // mean 6 pushes the phase well beyond pi inside |t| <= 1
        let g = D::gaussian(dvec(&[6.0]), DMatrix::from_row_slice(1, 1, &[0.5])).unwrap();
        let t = dvec(&[1.0]);
        let val = second_cf(&g, &t, 256).unwrap();
        assert_relative_eq!(val.im, 6.0, epsilon = 1e-10);
    }

    #[test]
    fn independent_pair_dependence_is_zero() {
        let pair = JointPair::independent(D::binary(1.0), D::binary(2.0));
        let rep = dependence_sup(&pair, 1.5, 21).unwrap();
        assert!(rep.epsilon_hat < 1e-14);
    }

    #[test]
    fn doubled_iid_gaussian_pair_dependence_vanishes() {
        let q = DMatrix::from_row_slice(2, 2, &[1.0, 0.4, 0.4, 0.8]);
        let x = D::gaussian(DVector::zeros(2), q).unwrap();
        let pair = JointPair::independent(x.clone(), x).double().unwrap();
        let rep = dependence_sup(&pair, 1.0, 9).unwrap();
        assert!(rep.epsilon_hat < 1e-10, "eps = {}", rep.epsilon_hat);
    }

    #[test]
    fn coupled_atoms_dependence_matches_dense_oracle() {
        // atoms on {(0,0),(1,1)}: the gap factors as |u-1||v-1|/4 for
        // u = e^{jt1}, v = e^{jt2}; a dense 1-d scan of |e^{jt}-1| on the
        // axis grid is an independent route to the same supremum.
        let pair = JointPair::coupled_atoms(
            vec![dvec(&[0.0, 0.0]), dvec(&[1.0, 1.0])],
            vec![0.5, 0.5],
            1,
        )
        .unwrap();
        let n_oracle = 10_001;
        let mut axis_max: f64 = 0.0;
        for i in 0..n_oracle {
            let t = -1.0 + 2.0 * (i as f64) / ((n_oracle - 1) as f64);
            let m = ((t.cos() - 1.0).powi(2) + t.sin().powi(2)).sqrt();
            axis_max = axis_max.max(m);
        }
        let oracle = axis_max * axis_max / 4.0;
        assert_relative_eq!(oracle, 0.5f64.sin().powi(2), epsilon = 1e-9);

        let rep = dependence_sup(&pair, 1.0, 201).unwrap();
        assert_relative_eq!(rep.epsilon_hat, oracle, epsilon = 1e-12);
        // witness sits at a corner of the ball
        assert_relative_eq!(rep.witness.0[0].abs(), 1.0);
        assert_relative_eq!(rep.witness.1[0].abs(), 1.0);
    }

    #[test]
    fn robust_ratio_matches_direct_ratio() {
        let pair = JointPair::coupled_atoms(
            vec![dvec(&[0.0, 0.0]), dvec(&[1.0, 1.0])],
            vec![0.5, 0.5],
            1,
        )
        .unwrap();
        let rep = robust_dependence_sup(&pair, 1.0, 201, 1e-6).unwrap();
        assert!(rep.robust);
        assert_eq!(rep.excluded_fraction, Some(0.0));
        // direct evaluation at the witness
        let (m1, m2) = pair.marginal_laws();
        let f1 = cf_eval(&m1, &rep.witness.0).unwrap();
        let f2 = cf_eval(&m2, &rep.witness.1).unwrap();
        let joint = joint_cf_eval(&pair, &rep.witness.0, &rep.witness.1).unwrap();
        let direct = (joint - f1 * f2).norm() / (f1.norm() * f2.norm());
        assert_relative_eq!(rep.epsilon_hat, direct, epsilon = 1e-13);
    }

    #[test]
    fn robust_floor_excludes_everything() {
        let pair = JointPair::independent(D::binary(1.0), D::binary(1.0));
        let err = robust_dependence_sup(&pair, 1.0, 11, 2.0);
        assert!(matches!(err, Err(Error::AllBelowFloor)));
    }

    #[test]
    fn robust_dependence_invariant_under_whitened_channel() {
        // adding independent identity-covariance noise after an invertible
        // scaling leaves the robust ratio at pulled-back frequencies intact
        let pair = JointPair::coupled_atoms(
            vec![dvec(&[0.0, 0.0]), dvec(&[1.0, -1.0]), dvec(&[-1.0, 1.0])],
            vec![0.5, 0.25, 0.25],
            1,
        )
        .unwrap();
        let g1 = 1.0;
        let g2 = 2.0;
        let scaled = pair
            .map_parts(
                &DMatrix::from_row_slice(1, 1, &[g1]),
                &DMatrix::from_row_slice(1, 1, &[g2]),
            )
            .unwrap();
        let noisy = scaled
            .add_independent_noise(D::standard_gaussian(1), D::standard_gaussian(1))
            .unwrap();

        let (x1, x2) = pair.marginal_laws();
        let (y1, y2) = noisy.marginal_laws();
        for (a, b) in [(0.3, -0.8), (0.5, 0.5), (-1.1, 0.2)] {
            let t1 = dvec(&[a]);
            let t2 = dvec(&[b]);
            let fy1 = cf_eval(&y1, &t1).unwrap();
            let fy2 = cf_eval(&y2, &t2).unwrap();
            let jy = joint_cf_eval(&noisy, &t1, &t2).unwrap();
            let ry = (jy - fy1 * fy2).norm() / (fy1.norm() * fy2.norm());

            let s1 = dvec(&[g1 * a]);
            let s2 = dvec(&[g2 * b]);
            let fx1 = cf_eval(&x1, &s1).unwrap();
            let fx2 = cf_eval(&x2, &s2).unwrap();
            let jx = joint_cf_eval(&pair, &s1, &s2).unwrap();
            let rx = (jx - fx1 * fx2).norm() / (fx1.norm() * fx2.norm());
            assert_relative_eq!(ry, rx, epsilon = 1e-11);
        }
    }

    #[test]
    fn dependence_monotone_in_radius_at_fixed_spacing() {
        let pair = JointPair::coupled_atoms(
            vec![dvec(&[0.0, 0.0]), dvec(&[1.0, 1.0])],
            vec![0.5, 0.5],
            1,
        )
        .unwrap();
        // spacing 0.1 in both sweeps
        let narrow = dependence_sup(&pair, 0.5, 11).unwrap();
        let wide = dependence_sup(&pair, 1.0, 21).unwrap();
        assert!(wide.epsilon_hat >= narrow.epsilon_hat - 1e-15);
    }

    #[test]
    fn decay_certificates() {
        let g = D::standard_gaussian(1);
        let cert = decay_certificate(&g, 1.0).unwrap();
        assert_relative_eq!(cert.t_radius, 1.0);
        // analytic minimum of (1 - e^{-t^2/2}) / t^2 on (0, 1]
        assert!(cert.c >= 0.25);
        assert_relative_eq!(cert.c, 1.0 - (-0.5f64).exp(), epsilon = 1e-4);
        // certificate is valid on a dense audit grid
        for i in 1..=10_000 {
            let t = (i as f64) / 10_000.0;
            let f = cf_eval(&g, &dvec(&[t])).unwrap().norm();
            assert!(f <= 1.0 - cert.c * t * t + 1e-12);
        }

        let b = D::binary(1.0);
        let cert = decay_certificate(&b, 0.5).unwrap();
        assert!(cert.c >= 0.45, "c = {}", cert.c);
        for i in 1..=10_000 {
            let t = 0.5 * (i as f64) / 10_000.0;
            assert!(t.cos() <= 1.0 - cert.c * t * t + 1e-12);
        }

        let point = D::point(dvec(&[0.0]));
        assert!(matches!(
            decay_certificate(&point, 1.0),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn grid_sample_contains_zero() {
        let g = sample_cf_grid(&D::binary(1.0), 2.0, 9).unwrap();
        assert!(g.points.iter().any(|p| p.norm() == 0.0));
        assert_eq!(g.points.len(), g.values.len());
        assert!(sample_cf_grid(&D::binary(1.0), 2.0, 8).is_err());
    }
}
