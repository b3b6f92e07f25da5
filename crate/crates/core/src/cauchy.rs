//! Constructive stability of Cauchy's functional equation.
//!
//! Given a function that is almost additive (the additivity defect bounded by
//! `theta`), these fits extract the nearest linear (or bilinear) map by the
//! doubling-limit construction, extended from boxes to the whole line by
//! tiling. Each fit audits its advertised uniform bound on a grid and fails
//! hard if the bound is violated.
//!
//! Complex-valued inputs are handled directly; all constructions are real-
//! linear, so this is identical to fitting real and imaginary parts
//! separately.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::charfn::cmod;
use crate::{Error, Result, Scalar};

/// Number of doublings in the truncated limit; `2^-40` of the defect is far
/// below audit tolerance.
pub const N_MAX: usize = 40;

/// Absolute slack for audits and tail checks, covering floating-point noise
/// on top of the exact bounds.
pub const AUDIT_ATOL: f64 = 1e-9;

/// Domain a sampled function is defined on. Boxes are half-open `[-T, T)^d`.
#[derive(Debug, Clone, Copy)]
pub enum FitDomain<T: Scalar> {
    /// Defined on all of `R^d`; audited on `[-audit_radius, audit_radius]^d`.
    AllReals { audit_radius: T },
    /// Defined on `[-half_width, half_width)^d`.
    Box { half_width: T },
}

/// Unverifiable continuity assumption carried as metadata: the fits require
/// at least one continuous point per coordinate projection, which cannot be
/// checked from finitely many samples.
#[derive(Debug, Clone, Default)]
pub enum ContinuityHint<T: Scalar> {
    #[default]
    AssumedEverywhere,
    AtPoints(Vec<Vec<T>>),
}

/// Black-box complex-valued function on a box or on the line.
pub struct SampledFunction<'f, T: Scalar> {
    pub dim: usize,
    pub domain: FitDomain<T>,
    pub eval: &'f (dyn Fn(&[T]) -> Complex<T> + Sync),
    pub continuity_hint: ContinuityHint<T>,
}

impl<'f, T: Scalar> SampledFunction<'f, T> {
    pub fn on_box(dim: usize, half_width: T, eval: &'f (dyn Fn(&[T]) -> Complex<T> + Sync)) -> Self {
        Self {
            dim,
            domain: FitDomain::Box { half_width },
            eval,
            continuity_hint: ContinuityHint::AssumedEverywhere,
        }
    }

    pub fn on_reals(
        dim: usize,
        audit_radius: T,
        eval: &'f (dyn Fn(&[T]) -> Complex<T> + Sync),
    ) -> Self {
        Self {
            dim,
            domain: FitDomain::AllReals { audit_radius },
            eval,
            continuity_hint: ContinuityHint::AssumedEverywhere,
        }
    }

    fn audit_radius(&self) -> T {
        match self.domain {
            FitDomain::AllReals { audit_radius } => audit_radius,
            FitDomain::Box { half_width } => half_width,
        }
    }

    fn contains(&self, x: &[T]) -> bool {
        match self.domain {
            FitDomain::AllReals { .. } => true,
            FitDomain::Box { half_width } => {
                x.iter().all(|&v| -half_width <= v && v < half_width)
            }
        }
    }
}

/// Symmetric bivariate function on `[-T, T)^d x [-T, T)^d`.
pub struct SampledBiFunction<'f, T: Scalar> {
    pub dim: usize,
    pub half_width: T,
    pub eval: &'f (dyn Fn(&[T], &[T]) -> Complex<T> + Sync),
    pub continuity_hint: ContinuityHint<T>,
}

/// Linear fit `G(x) = <c, x>` with its certified uniform bound.
#[derive(Debug, Clone)]
pub struct AdditiveFit<T: Scalar> {
    pub linear_map: Vec<Complex<T>>,
    pub theta: T,
    pub certified_bound: T,
    pub domain_t: T,
    pub max_residual: T,
}

/// Bilinear fit `G(x, y) = x^T M y` with its certified uniform bound.
#[derive(Debug, Clone)]
pub struct BiadditiveFit<T: Scalar> {
    pub matrix: DMatrix<Complex<T>>,
    pub theta: T,
    pub certified_bound: T,
    pub max_residual: T,
}

impl<T: Scalar> AdditiveFit<T> {
    pub fn apply(&self, x: &[T]) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (c, v) in self.linear_map.iter().zip(x) {
            acc += Complex::new(c.re * *v, c.im * *v);
        }
        acc
    }
}

impl<T: Scalar> BiadditiveFit<T> {
    pub fn apply(&self, x: &[T], y: &[T]) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..x.len() {
            for j in 0..y.len() {
                let m = self.matrix[(i, j)];
                let s = x[i] * y[j];
                acc += Complex::new(m.re * s, m.im * s);
            }
        }
        acc
    }

    /// The fitted matrix restricted to its real part.
    pub fn real_matrix(&self) -> DMatrix<T> {
        DMatrix::from_fn(self.matrix.nrows(), self.matrix.ncols(), |i, j| {
            self.matrix[(i, j)].re
        })
    }
}

/// Maximum additivity defect `|g(x+y) - g(x) - g(y)|` over `n_probe` seeded
/// random pairs with `x`, `y`, `x + y` in the domain.
pub fn measure_theta_additive<T: Scalar>(
    g: &SampledFunction<'_, T>,
    n_probe: usize,
    seed: u64,
) -> T {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = g.audit_radius();
    let mut worst = T::zero();
    let mut xy = vec![T::zero(); g.dim];
    let mut x = vec![T::zero(); g.dim];
    let mut y = vec![T::zero(); g.dim];
    let mut accepted = 0usize;
    while accepted < n_probe {
        for i in 0..g.dim {
            x[i] = (T::of(rng.random::<f64>()) * T::of(2.0) - T::one()) * r;
            y[i] = (T::of(rng.random::<f64>()) * T::of(2.0) - T::one()) * r;
            xy[i] = x[i] + y[i];
        }
        if !(g.contains(&x) && g.contains(&y) && g.contains(&xy)) {
            continue;
        }
        accepted += 1;
        let defect = cmod((g.eval)(&xy) - (g.eval)(&x) - (g.eval)(&y));
        if defect > worst {
            worst = defect;
        }
    }
    worst
}

/// Truncated doubling limit `lim 2^-n f(2^n)` with the geometric tail check
/// `|s_n - s_{n-1}| <= theta 2^{-(n-1)} + atol`.
fn doubling_limit<T: Scalar>(
    f: &dyn Fn(T) -> Result<Complex<T>>,
    theta: T,
    what: &str,
) -> Result<Complex<T>> {
    let mut prev = f(T::one())?;
    let half = T::of(0.5);
    let mut scale = T::one();
    let mut arg = T::one();
    for n in 1..=N_MAX {
        scale *= half;
        arg *= T::of(2.0);
        let cur = f(arg)? * Complex::new(scale, T::zero());
        let diff = cmod(cur - prev);
        let allowed = theta * scale * T::of(2.0) + T::of(AUDIT_ATOL) * (T::one() + cmod(cur));
        if !(diff <= allowed) {
            return Err(Error::NoConvergence(format!(
                "{what}: step {n} moved by {:?}, allowed {:?}",
                diff, allowed
            )));
        }
        prev = cur;
    }
    Ok(prev)
}

/// Splits `x = k T + r` with integer `k` and `0 <= r < T`.
fn tile_split<T: Scalar>(x: T, t: T) -> (T, T) {
    let mut k = (x / t).floor();
    let mut r = x - k * t;
    if r < T::zero() {
        r += t;
        k -= T::one();
    }
    if r >= t {
        r -= t;
        k += T::one();
    }
    (k, r)
}

/// Doubling limit of the tiled extension of a 1-d function on `[-T, T)`:
/// `g~(x) = -k_x g(-T) + g(r_x)`. The extension is `2 theta`-additive when
/// `g` is `theta`-additive, hence the doubled defect in the tail check.
fn tiled_slope<T: Scalar>(
    g1: &dyn Fn(T) -> Result<Complex<T>>,
    t: T,
    theta: T,
    what: &str,
) -> Result<Complex<T>> {
    let g_neg_t = g1(-t)?;
    let tiled = move |x: T| -> Result<Complex<T>> {
        let (k, r) = tile_split(x, t);
        Ok(g1(r)? - Complex::new(k * g_neg_t.re, k * g_neg_t.im))
    };
    doubling_limit(&tiled, T::of(2.0) * theta, what)
}

fn audit_points_per_axis(axes: usize) -> usize {
    match axes {
        0 | 1 | 2 => 101,
        3 => 41,
        _ => 21,
    }
}

/// Uniform audit grid on `[-r, r)^d` (half-open, matching box domains).
fn audit_grid<T: Scalar>(r: T, dim: usize) -> Vec<Vec<T>> {
    let n = audit_points_per_axis(dim);
    let step = T::of(2.0) * r / T::from_usize(n).unwrap();
    let axis: Vec<T> = (0..n)
        .map(|i| -r + step * T::from_usize(i).unwrap())
        .collect();
    let mut out = Vec::with_capacity(n.pow(dim as u32));
    let mut idx = vec![0usize; dim];
    loop {
        out.push(idx.iter().map(|&i| axis[i]).collect());
        let mut carry = true;
        for k in (0..dim).rev() {
            idx[k] += 1;
            if idx[k] < n {
                carry = false;
                break;
            }
            idx[k] = 0;
        }
        if carry {
            return out;
        }
    }
}

fn finish_additive<T: Scalar>(
    g: &SampledFunction<'_, T>,
    linear_map: Vec<Complex<T>>,
    theta: T,
    certified_bound: T,
) -> Result<AdditiveFit<T>> {
    let fit = AdditiveFit {
        linear_map,
        theta,
        certified_bound,
        domain_t: g.audit_radius(),
        max_residual: T::zero(),
    };
    let mut worst = T::zero();
    for x in audit_grid(g.audit_radius(), g.dim) {
        let res = cmod((g.eval)(&x) - fit.apply(&x));
        if res > worst {
            worst = res;
        }
    }
    if !(worst <= certified_bound + T::of(AUDIT_ATOL)) {
        return Err(Error::AuditFailed(format!(
            "additive residual {:?} exceeds certified bound {:?}",
            worst, certified_bound
        )));
    }
    Ok(AdditiveFit {
        max_residual: worst,
        ..fit
    })
}

/// Fit on all of `R^d` by the plain doubling limit; certified bound `theta`.
pub fn hyers_fit<T: Scalar>(g: &SampledFunction<'_, T>, theta: T) -> Result<AdditiveFit<T>> {
    if !matches!(g.domain, FitDomain::AllReals { .. }) {
        return Err(Error::UnsupportedDomain(
            "doubling limit needs the function on all of R^d; use the box fits otherwise".into(),
        ));
    }
    if theta < T::zero() {
        return Err(Error::InvalidParameter("theta must be nonnegative".into()));
    }
    let mut c = Vec::with_capacity(g.dim);
    for i in 0..g.dim {
        let section = |s: T| -> Result<Complex<T>> {
            let mut x = vec![T::zero(); g.dim];
            x[i] = s;
            Ok((g.eval)(&x))
        };
        c.push(doubling_limit(&section, theta, "doubling limit")?);
    }
    finish_additive(g, c, theta, theta)
}

/// Fit on `[-T, T)` (d = 1) through the tiling extension; certified bound
/// `3 theta`.
pub fn skof_extend_fit<T: Scalar>(g: &SampledFunction<'_, T>, theta: T) -> Result<AdditiveFit<T>> {
    if g.dim != 1 {
        return Err(Error::UnsupportedDomain(
            "tiling extension is one-dimensional; use the per-coordinate fit for d > 1".into(),
        ));
    }
    let FitDomain::Box { half_width } = g.domain else {
        return Err(Error::UnsupportedDomain(
            "tiling extension needs a box domain".into(),
        ));
    };
    let section = |s: T| -> Result<Complex<T>> { Ok((g.eval)(&[s])) };
    let c = tiled_slope(&section, half_width, theta, "tiled doubling limit")?;
    finish_additive(g, vec![c], theta, T::of(3.0) * theta)
}

/// Fit on `[-T, T)^d` by per-coordinate tiling extensions; certified bound
/// `(4d - 1) theta`.
pub fn kominek_fit<T: Scalar>(g: &SampledFunction<'_, T>, theta: T) -> Result<AdditiveFit<T>> {
    let FitDomain::Box { half_width } = g.domain else {
        return Err(Error::UnsupportedDomain(
            "per-coordinate fit needs a box domain".into(),
        ));
    };
    let mut c = Vec::with_capacity(g.dim);
    for i in 0..g.dim {
        let section = |s: T| -> Result<Complex<T>> {
            let mut x = vec![T::zero(); g.dim];
            x[i] = s;
            Ok((g.eval)(&x))
        };
        c.push(tiled_slope(
            &section,
            half_width,
            theta,
            "per-coordinate tiled limit",
        )?);
    }
    let d = T::from_usize(g.dim).unwrap();
    let bound = (T::of(4.0) * d - T::one()) * theta;
    finish_additive(g, c, theta, bound)
}

/// Fit of a symmetric almost-biadditive function; certified bound `6 theta`
/// for d = 1 and `(7 d^2 - 1) theta` in general (the two agree at d = 1).
pub fn biadditive_fit<T: Scalar>(
    g: &SampledBiFunction<'_, T>,
    theta: T,
    seed: u64,
) -> Result<BiadditiveFit<T>> {
    let d = g.dim;
    let t = g.half_width;
    // symmetry probe
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..64 {
        let x: Vec<T> = (0..d)
            .map(|_| (T::of(rng.random::<f64>()) * T::of(2.0) - T::one()) * t)
            .collect();
        let y: Vec<T> = (0..d)
            .map(|_| (T::of(rng.random::<f64>()) * T::of(2.0) - T::one()) * t)
            .collect();
        let asym = cmod((g.eval)(&x, &y) - (g.eval)(&y, &x));
        if asym > T::of(1e-10) {
            return Err(Error::NotSymmetric(format!(
                "|g(x,y) - g(y,x)| = {:?} on the probe set",
                asym
            )));
        }
    }

    // per-section double tiling: first extend in the left argument, take the
    // doubling limit, then tile and double the resulting function of the
    // right argument
    let mut m = DMatrix::from_element(d, d, Complex::new(T::zero(), T::zero()));
    for i in 0..d {
        for j in 0..d {
            let section = |u: T, v: T| -> Complex<T> {
                let mut x = vec![T::zero(); d];
                let mut y = vec![T::zero(); d];
                x[i] = u;
                y[j] = v;
                (g.eval)(&x, &y)
            };
            let left_limit = |v: T| -> Result<Complex<T>> {
                let f = |u: T| -> Result<Complex<T>> { Ok(section(u, v)) };
                tiled_slope(&f, t, theta, "bilinear left limit")
            };
            let h_neg_t = left_limit(-t)?;
            let tiled_right = |y: T| -> Result<Complex<T>> {
                let (k, r) = tile_split(y, t);
                Ok(left_limit(r)? - Complex::new(k * h_neg_t.re, k * h_neg_t.im))
            };
            m[(i, j)] = doubling_limit(&tiled_right, T::of(2.0) * theta, "bilinear right limit")?;
        }
    }
    // symmetrize
    let mt = m.transpose();
    let half = Complex::new(T::of(0.5), T::zero());
    let m = (m + mt).map(|z| z * half);

    let dd = T::from_usize(d).unwrap();
    let bound = (T::of(7.0) * dd * dd - T::one()) * theta;
    let fit = BiadditiveFit {
        matrix: m,
        theta,
        certified_bound: bound,
        max_residual: T::zero(),
    };
    let mut worst = T::zero();
    for x in audit_grid(t, d) {
        for y in audit_grid(t, d) {
            let res = cmod((g.eval)(&x, &y) - fit.apply(&x, &y));
            if res > worst {
                worst = res;
            }
        }
    }
    if !(worst <= bound + T::of(AUDIT_ATOL)) {
        return Err(Error::AuditFailed(format!(
            "bilinear residual {:?} exceeds certified bound {:?}",
            worst, bound
        )));
    }
    Ok(BiadditiveFit {
        max_residual: worst,
        ..fit
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn re(x: f64) -> Complex<f64> {
        Complex::new(x, 0.0)
    }

    #[test]
    fn theta_of_linear_is_zero() {
        let f = |x: &[f64]| re(2.0 * x[0] - 0.5 * x[1]);
        let g = SampledFunction::on_box(2, 1.0, &f);
        let theta = measure_theta_additive(&g, 500, 7);
        assert!(theta < 1e-12);
    }

    #[test]
    fn theta_of_sine_perturbation_is_capped() {
        let f = |x: &[f64]| re(2.0 * x[0] + 0.1 * x[0].sin());
        let g = SampledFunction::on_reals(1, 3.0, &f);
        let theta = measure_theta_additive(&g, 2000, 7);
        assert!(theta <= 0.3 + 1e-12);
    }

    #[test]
    fn theta_of_square_matches_grid_oracle() {
        // defect of x^2 on [-1,1) is 2|xy|, approaching 2 near x = -1, y -> 1
        let f = |x: &[f64]| re(x[0] * x[0]);
        let g = SampledFunction::on_box(1, 1.0, &f);
        let probe = measure_theta_additive(&g, 4000, 11);

        let n = 401;
        let mut oracle: f64 = 0.0;
        for i in 0..n {
            let x = -1.0 + 2.0 * (i as f64) / (n as f64);
            for j in 0..n {
                let y = -1.0 + 2.0 * (j as f64) / (n as f64);
                let s = x + y;
                if (-1.0..1.0).contains(&s) {
                    oracle = oracle.max(2.0 * (x * y).abs());
                }
            }
        }
        assert!(oracle > 1.9 && oracle <= 2.0);
        assert!(probe <= oracle + 1e-12);
        assert!(probe > 1.5, "probe = {probe}");
    }

    #[test]
    fn hyers_exact_linear() {
        let f = |x: &[f64]| re(3.0 * x[0]);
        let g = SampledFunction::on_reals(1, 5.0, &f);
        let fit = hyers_fit(&g, 0.0).unwrap();
        assert_relative_eq!(fit.linear_map[0].re, 3.0, epsilon = 1e-12);
        assert!(fit.max_residual < 1e-10);

        // idempotent: fitting the fitted map returns it unchanged
        let lin = |x: &[f64]| re(3.0 * x[0]);
        let g2 = SampledFunction::on_reals(1, 5.0, &lin);
        let fit2 = hyers_fit(&g2, 0.0).unwrap();
        assert_relative_eq!(fit2.linear_map[0].re, fit.linear_map[0].re, epsilon = 1e-12);
    }

    #[test]
    fn hyers_bounded_perturbation() {
        let theta = 0.2;
        let f = |x: &[f64]| re(3.0 * x[0] + 0.1 * x[0].sin());
        let g = SampledFunction::on_reals(1, 4.0, &f);
        let fit = hyers_fit(&g, theta).unwrap();
        assert_relative_eq!(fit.linear_map[0].re, 3.0, epsilon = 1e-9);
        assert!(fit.max_residual <= theta);
    }

    #[test]
    fn hyers_rejects_superlinear() {
        let f = |x: &[f64]| re(3.0 * x[0] + x[0] * x[0]);
        let g = SampledFunction::on_reals(1, 4.0, &f);
        assert!(matches!(hyers_fit(&g, 0.5), Err(Error::NoConvergence(_))));
    }

    #[test]
    fn skof_exact_linear_and_tiny_domain() {
        let f = |x: &[f64]| re(2.5 * x[0]);
        let g = SampledFunction::on_box(1, 1.0, &f);
        let fit = skof_extend_fit(&g, 0.0).unwrap();
        assert_relative_eq!(fit.linear_map[0].re, 2.5, epsilon = 1e-12);
        assert!(fit.max_residual < 1e-10);

        let tiny = SampledFunction::on_box(1, 1e-3, &f);
        let fit = skof_extend_fit(&tiny, 0.0).unwrap();
        assert_relative_eq!(fit.linear_map[0].re, 2.5, epsilon = 1e-9);
    }

    #[test]
    fn skof_oscillating_perturbation() {
        // |0.05 (cos 20(x+y) - cos 20x - cos 20y)| <= 0.15
        let theta = 0.15;
        let f = |x: &[f64]| re(1.7 * x[0] + 0.05 * (20.0 * x[0]).cos());
        let g = SampledFunction::on_box(1, 1.0, &f);
        let fit = skof_extend_fit(&g, theta).unwrap();
        assert!(fit.max_residual <= 3.0 * theta + AUDIT_ATOL);
        assert_eq!(fit.certified_bound, 3.0 * theta);
    }

    #[test]
    fn kominek_multivariate() {
        // exact linear map in any dimension
        let f = |x: &[f64]| re(1.0 * x[0] - 2.0 * x[1] + 0.5 * x[2]);
        let g = SampledFunction::on_box(3, 1.0, &f);
        let fit = kominek_fit(&g, 0.0).unwrap();
        assert_relative_eq!(fit.linear_map[0].re, 1.0, epsilon = 1e-11);
        assert_relative_eq!(fit.linear_map[1].re, -2.0, epsilon = 1e-11);
        assert_relative_eq!(fit.linear_map[2].re, 0.5, epsilon = 1e-11);

        // d = 2 with a bounded perturbation; defect of each term <= 3 x amp
        let theta = 0.6;
        let f2 = |x: &[f64]| {
            re(0.3 * x[0] + 1.1 * x[1] + 0.1 * (x[0].sin() + x[1].cos() - 1.0))
        };
        let g2 = SampledFunction::on_box(2, 1.0, &f2);
        let fit2 = kominek_fit(&g2, theta).unwrap();
        assert_eq!(fit2.certified_bound, 7.0 * theta);
        assert!(fit2.max_residual <= 7.0 * theta);
    }

    #[test]
    fn kominek_agrees_with_hyers_on_the_line() {
        // exactly additive input: both routes are forced to the same map
        let f = |x: &[f64]| re(0.77 * x[0]);
        let boxed = SampledFunction::on_box(1, 2.0, &f);
        let line = SampledFunction::on_reals(1, 2.0, &f);
        let a = kominek_fit(&boxed, 0.0).unwrap();
        let b = hyers_fit(&line, 0.0).unwrap();
        assert_relative_eq!(a.linear_map[0].re, b.linear_map[0].re, epsilon = 1e-10);
        // d = 1 certified bound 3 theta is within the (4d-1) theta family
        assert_eq!(a.certified_bound, 0.0);

        // perturbed input: the box extension pins its slope to -g(-T)/T, so
        // the two maps may differ, but only at the scale of the defect
        let theta = 0.03;
        let fp = |x: &[f64]| re(0.77 * x[0] + 0.01 * x[0].sin());
        let boxed = SampledFunction::on_box(1, 2.0, &fp);
        let line = SampledFunction::on_reals(1, 2.0, &fp);
        let a = kominek_fit(&boxed, theta).unwrap();
        let b = hyers_fit(&line, theta).unwrap();
        let slope_gap = (a.linear_map[0].re - b.linear_map[0].re).abs();
        assert!(slope_gap <= 4.0 * theta / 2.0, "gap = {slope_gap}");
    }

    #[test]
    fn biadditive_recovers_symmetric_matrix() {
        let m = [[1.5, -0.3], [-0.3, 0.8]];
        let f = |x: &[f64], y: &[f64]| {
            let mut acc = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    acc += m[i][j] * x[i] * y[j];
                }
            }
            re(acc)
        };
        let g = SampledBiFunction {
            dim: 2,
            half_width: 1.0,
            eval: &f,
            continuity_hint: ContinuityHint::AssumedEverywhere,
        };
        let fit = biadditive_fit(&g, 0.0, 3).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_relative_eq!(fit.matrix[(i, j)].re, m[i][j], epsilon = 1e-10);
            }
        }
        assert!(fit.max_residual < 1e-9);
    }

    #[test]
    fn biadditive_perturbed_product() {
        // defect of 0.02 sin(xy) under x1 + x2 is at most 0.06
        let theta = 0.06;
        let f = |x: &[f64], y: &[f64]| re(x[0] * y[0] + 0.02 * (x[0] * y[0]).sin());
        let g = SampledBiFunction {
            dim: 1,
            half_width: 1.0,
            eval: &f,
            continuity_hint: ContinuityHint::AssumedEverywhere,
        };
        let fit = biadditive_fit(&g, theta, 3).unwrap();
        assert_relative_eq!(fit.matrix[(0, 0)].re, 1.0, epsilon = 0.05);
        assert!(fit.max_residual <= 6.0 * theta + AUDIT_ATOL);
        assert_eq!(fit.certified_bound, 6.0 * theta);
    }

    #[test]
    fn biadditive_rejects_antisymmetric() {
        let f = |x: &[f64], y: &[f64]| re(x[0] - y[0]);
        let g = SampledBiFunction {
            dim: 1,
            half_width: 1.0,
            eval: &f,
            continuity_hint: ContinuityHint::AssumedEverywhere,
        };
        assert!(matches!(
            biadditive_fit(&g, 0.1, 3),
            Err(Error::NotSymmetric(_))
        ));
    }

    #[test]
    fn complex_valued_fit() {
        let f = |x: &[f64]| Complex::new(2.0 * x[0], -1.25 * x[0]);
        let g = SampledFunction::on_reals(1, 3.0, &f);
        let fit = hyers_fit(&g, 0.0).unwrap();
        assert_relative_eq!(fit.linear_map[0].re, 2.0, epsilon = 1e-12);
        assert_relative_eq!(fit.linear_map[0].im, -1.25, epsilon = 1e-12);
    }
}
