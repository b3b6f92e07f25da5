//! Constructive Gaussian-surrogate fitting with certified error constants.
//!
//! Given a pair of laws whose sum/difference rotation is almost independent
//! (dependence level `epsilon` on a frequency ball), the pipeline extracts a
//! common covariance and per-law means such that each characteristic function
//! stays within a relative gap `C(epsilon)` of the corresponding Gaussian on
//! the half ball. The gap constant, the admissible `epsilon` threshold, the
//! doubling recursion `C_k` for unbounded radii, and the entropy-stability
//! bounds `B1..B4, B` are all computed from closed forms, and every certified
//! bound is audited on a grid.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use std::sync::Mutex;

use crate::cauchy::{
    biadditive_fit, kominek_fit, ContinuityHint, FitDomain, SampledBiFunction, SampledFunction,
};
use crate::charfn::{cexp, cf_eval, cmod, dependence_sup, second_cf, DependenceReport};
use crate::dist::{Distribution, JointPair};
use crate::linalg::{clip_psd, l1_norm, min_eigenvalue, quad_form, symmetrize};
use crate::{Error, Result, Scalar};

/// Smallest usable modulus floor; below it the log pipeline is meaningless.
pub const P_MIN: f64 = 1e-6;

/// Modulus above which a direction is treated as degenerate (the law is
/// concentrated on a hyperplane orthogonal to it).
pub const DEGENERATE_MODULUS: f64 = 1e-10;

/// Audit slack absorbing floating-point noise on exact bounds.
pub const AUDIT_ATOL: f64 = 1e-9;

/// All closed-form constants for a given `(d, p, T, epsilon, delta)`.
#[derive(Debug, Clone)]
pub struct StabilityBudget<T: Scalar> {
    pub d: usize,
    pub p: T,
    pub t_radius: T,
    pub epsilon: T,
    pub delta: T,
    /// Relative-gap constant `720 d^2 (d+1) (epsilon + 4 delta) / p^4`.
    pub c_eps: T,
    /// Admissible dependence level `p^4 / (360 d^2 (d+1))`.
    pub eps_threshold: T,
    /// Anchor modulus `|Phi(t0)|` used by the doubling recursion.
    pub phi_t0_abs: T,
    /// `C_0, C_1, ...` until the recursion turns non-increasing (or 64 terms).
    pub c_k: Vec<T>,
    /// First `k` with `(2 |Phi(2^{k-1} t0)| + C_{k-1})^3 <= 1/2`, if any
    /// within the computed range.
    pub contraction_index: Option<usize>,
    /// `max_i C_i(1)` over the prefix before the recursion stabilized; the
    /// global gap is `c_tilde * (epsilon + 4 delta)`. May be infinite when
    /// the polynomial coefficients overflow.
    pub c_tilde: T,
    pub entropy: Option<EntropyBounds<T>>,
}

impl<T: Scalar> StabilityBudget<T> {
    pub fn eps_eff(&self) -> T {
        self.epsilon + T::of(4.0) * self.delta
    }
}

/// Entropy-stability bounds; `b` may be infinite when the closed forms give
/// no finite bound at the requested level.
#[derive(Debug, Clone)]
pub struct EntropyBounds<T: Scalar> {
    pub b1: T,
    pub b2: T,
    pub b3: T,
    pub b4: T,
    pub b: T,
}

/// Moment inputs for the entropy-stability bounds.
#[derive(Debug, Clone)]
pub struct MomentBounds<T: Scalar> {
    /// `max_i E ||Y_i||_2^2`.
    pub second_moment: T,
    /// Bound on the fourth moment of unit projections of the Gaussian side.
    pub fourth_moment_proj: T,
    /// `max_i (2 pi)^{-d/2} det(Q_{Z_i})^{-1/2}`, the density peak of the
    /// smoothing noise.
    pub gauss_peak: T,
}

/// Fitted common-covariance Gaussian surrogates for a pair of laws.
#[derive(Debug, Clone)]
pub struct GaussianSurrogate<T: Scalar> {
    pub m_hat_1: DVector<T>,
    pub m_hat_2: DVector<T>,
    pub q_hat: DMatrix<T>,
    /// 1-norm ball radius on which the relative gap is certified (`T/2`).
    pub valid_radius: T,
    /// Relative gap `C(epsilon + 4 delta)`.
    pub certified_gap: T,
    pub epsilon_hat: T,
    pub delta_hat: T,
    pub p_floor: T,
    pub t_radius: T,
    /// Largest observed `|f_i - Phi_i| / |Phi_i|` on the audit grid.
    pub audit_max_rel: T,
}

impl<T: Scalar> GaussianSurrogate<T> {
    /// Surrogate characteristic function for part `i` (0 or 1).
    pub fn phi(&self, i: usize, t: &DVector<T>) -> Complex<T> {
        let m = if i == 0 { &self.m_hat_1 } else { &self.m_hat_2 };
        let half = T::of(0.5);
        cexp(Complex::new(-half * quad_form(&self.q_hat, t), t.dot(m)))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    /// Points per axis for the dependence grid (odd).
    pub grid_points: usize,
    /// Ray steps for branch-tracked logarithms.
    pub ray_steps: usize,
    /// Points per axis for the final relative-gap audit.
    pub audit_points: usize,
    /// Points per axis for the modulus-floor estimate.
    pub p_points: usize,
}

impl FitOptions {
    pub fn for_dim(d: usize) -> Self {
        match d {
            0 | 1 => Self {
                grid_points: 101,
                ray_steps: 64,
                audit_points: 257,
                p_points: 201,
            },
            _ => Self {
                grid_points: 13,
                ray_steps: 48,
                audit_points: 21,
                p_points: 21,
            },
        }
    }
}

// ---------------------------------------------------------------------------
// budget
// ---------------------------------------------------------------------------

/// Fills every closed-form constant for the given parameters.
///
/// `phi_t0_abs` is the anchor modulus `|Phi(t0)|` at the doubling anchor on
/// the shell `||t|| = T/4` (see [`anchor`]).
pub fn budget<T: Scalar>(
    d: usize,
    p: T,
    t_radius: T,
    epsilon: T,
    delta: T,
    phi_t0_abs: T,
) -> Result<StabilityBudget<T>> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be positive".into()));
    }
    if !(p > T::zero() && p <= T::one()) {
        return Err(Error::InvalidParameter(format!("p must be in (0, 1], got {p:?}")));
    }
    if epsilon < T::zero() || delta < T::zero() {
        return Err(Error::InvalidParameter("epsilon, delta must be nonnegative".into()));
    }
    if !(phi_t0_abs > T::zero() && phi_t0_abs < T::one()) {
        return Err(Error::InvalidParameter(format!(
            "anchor modulus must be in (0, 1), got {phi_t0_abs:?}"
        )));
    }
    let df = T::from_usize(d).unwrap();
    let p4 = p * p * p * p;
    let denom = T::of(360.0) * df * df * (df + T::one());
    let eps_threshold = p4 / denom;
    let eps_eff = epsilon + T::of(4.0) * delta;
    if eps_eff > eps_threshold {
        return Err(Error::ThresholdExceeded {
            eps: eps_eff.to_subset().unwrap_or(f64::NAN),
            threshold: eps_threshold.to_subset().unwrap_or(f64::NAN),
        });
    }
    let c_of = |e: T| T::of(720.0) * df * df * (df + T::one()) * e / p4;
    let c_eps = c_of(eps_eff);

    // |Phi(2^{k-1} t0)| = phi^(4^{k-1})
    let phi_pow = |k: usize| -> T {
        let e = T::of(4.0f64.powi(k as i32 - 1));
        phi_t0_abs.powf(e)
    };
    let recursion = |e: T| -> (Vec<T>, Option<usize>) {
        let mut seq = vec![c_of(e)];
        let mut contraction = None;
        for k in 1..=64 {
            let prev = seq[k - 1];
            let cube_base = T::of(2.0) * phi_pow(k) + prev;
            if contraction.is_none() && cube_base * cube_base * cube_base <= T::of(0.5) {
                contraction = Some(k);
            }
            let ck = cube_base * cube_base * cube_base * prev + T::of(5.0) * e;
            seq.push(ck);
            if ck <= prev {
                break;
            }
        }
        (seq, contraction)
    };
    let (c_k, contraction_index) = recursion(eps_eff);
    // polynomial coefficient bound: the recursion evaluated at level 1,
    // maxed over the prefix where the sequence stabilized
    let (ones, _) = recursion(T::one());
    let prefix = c_k.len().saturating_sub(1).min(ones.len());
    let mut c_tilde = T::zero();
    for v in ones.iter().take(prefix.max(1)) {
        if *v > c_tilde {
            c_tilde = *v;
        }
    }
    Ok(StabilityBudget {
        d,
        p,
        t_radius,
        epsilon,
        delta,
        c_eps,
        eps_threshold,
        phi_t0_abs,
        c_k,
        contraction_index,
        c_tilde,
        entropy: None,
    })
}

// ---------------------------------------------------------------------------
// entropy bounds
// ---------------------------------------------------------------------------

fn b1_closed<T: Scalar>(eps: T, d: usize, lambda_min: T) -> Option<T> {
    if eps == T::zero() {
        return Some(T::zero());
    }
    let gate = T::one() - (-lambda_min * T::of(0.5)).exp();
    if !(eps < gate) {
        return None;
    }
    let df = T::from_usize(d).unwrap();
    let two_pi = T::two_pi();
    let root = (T::of(-2.0) * eps.ln()).sqrt();
    let num = T::of(2.0) * (df * root).powi(d as i32) * eps
        + T::of(4.0) * df * two_pi.powf(df * T::of(0.5)) * eps;
    let inner = (-lambda_min * T::of(0.5)).exp() + eps;
    let den = two_pi.powi(d as i32) * (T::of(-2.0) * inner.ln()).powf(df * T::of(0.5));
    Some(num / den)
}

struct BChain<T> {
    b1: T,
    b2: T,
    b3: T,
}

fn b_chain<T: Scalar>(eps: T, d: usize, lambda_min: T, m: &MomentBounds<T>) -> Option<BChain<T>> {
    if eps == T::zero() {
        return Some(BChain {
            b1: T::zero(),
            b2: T::zero(),
            b3: T::zero(),
        });
    }
    let b1 = b1_closed(eps, d, lambda_min)?;
    let df = T::from_usize(d).unwrap();
    // T2 solves B1 = T2^{-(d+3)}
    let t2 = b1.powf(-T::one() / (df + T::of(3.0)));
    let b2 = T::of(4.0) / (t2 * t2 * t2) + T::of(2.0) * df * m.second_moment / (t2 * t2);
    let b3 = T::of(2.0) / t2
        + m.fourth_moment_proj.sqrt()
            * (df * m.second_moment / (t2 * t2) + T::of(2.0) / (t2 * t2 * t2)).sqrt();
    Some(BChain { b1, b2, b3 })
}

fn b4_from_l1<T: Scalar>(l1_bound: T, d: usize, m: &MomentBounds<T>) -> T {
    if l1_bound == T::zero() {
        return T::zero();
    }
    let df = T::from_usize(d).unwrap();
    let half_d = df * T::of(0.5);
    let peak = m.gauss_peak + T::one();
    let nu = m.second_moment + T::one();
    let c1 = half_d * (T::of(4.0) * nu * T::pi() * T::e() / df).ln().abs()
        + (peak * T::e() * T::e() * T::of(0.5)).ln()
        + T::one();
    let c2 = half_d + T::of(2.0);
    // an L1 distance never exceeds 2
    let cap = l1_bound.min(T::of(2.0));
    if cap > peak {
        // the entropy-continuity hypothesis ||p - q|| <= m is not guaranteed
        return T::from_f64(f64::INFINITY).unwrap();
    }
    // x (c1 - c2 ln x) is increasing up to x* = e^{c1/c2 - 1}; substituting an
    // upper bound for the distance is only valid on that branch
    let x = cap.min((c1 / c2 - T::one()).exp());
    x * (c1 - c2 * x.ln())
}

/// Entropy-stability bounds for a budget: `B1..B4` at the budget's level and
/// `B = max(B3(c_tilde * eps), B4)`.
pub fn entropy_bounds<T: Scalar>(
    budget: &StabilityBudget<T>,
    lambda_z_min: T,
    moments: &MomentBounds<T>,
) -> Result<EntropyBounds<T>> {
    if lambda_z_min <= T::zero() {
        return Err(Error::Degenerate("noise covariance must be positive definite".into()));
    }
    let eps = budget.eps_eff();
    let gate = T::one() - (-lambda_z_min * T::of(0.5)).exp();
    if eps > T::zero() && !(eps < gate) {
        return Err(Error::HypothesisFailed(format!(
            "dependence level {:?} is not below 1 - exp(-lambda/2) = {:?}",
            eps, gate
        )));
    }
    let d = budget.d;
    let chain = b_chain(eps, d, lambda_z_min, moments)
        .expect("gate checked above");
    let b4 = b4_from_l1(chain.b2, d, moments);
    let inf = T::from_f64(f64::INFINITY).unwrap();
    // the pointwise route enters at the globally certified gap c_tilde * eps
    let b3_global = match b_chain(budget.c_tilde * eps, d, lambda_z_min, moments) {
        Some(c) => c.b3,
        None => inf,
    };
    let b = if b3_global > b4 { b3_global } else { b4 };
    Ok(EntropyBounds {
        b1: chain.b1,
        b2: chain.b2,
        b3: chain.b3,
        b4,
        b,
    })
}

// ---------------------------------------------------------------------------
// branch-tracked log evaluation
// ---------------------------------------------------------------------------

struct GEval<'a, T: Scalar> {
    law: &'a Distribution<T>,
    /// Per-coordinate `sqrt(E X_j^2)`, for the principal-branch fast path.
    moment_abs: Vec<T>,
    ray_steps: usize,
}

impl<'a, T: Scalar> GEval<'a, T> {
    fn new(law: &'a Distribution<T>, ray_steps: usize) -> Self {
        let s = law.second_moment();
        let moment_abs = (0..law.dim())
            .map(|i| s[(i, i)].max(T::zero()).sqrt())
            .collect();
        Self {
            law,
            moment_abs,
            ray_steps,
        }
    }

    fn eval(&self, t: &DVector<T>) -> Result<Complex<T>> {
        // |f(t) - 1| <= E|t . X| keeps f in a disk where the principal
        // branch is the continuous one along the whole ray
        let mut drift = T::zero();
        for (v, m) in t.iter().zip(&self.moment_abs) {
            drift += v.abs() * *m;
        }
        if drift < T::of(0.9) {
            let f = cf_eval(self.law, t)?;
            let modulus = cmod(f);
            if modulus < T::of(crate::charfn::BRANCH_FLOOR) {
                return Err(Error::BranchLost("modulus below floor".into()));
            }
            return Ok(Complex::new(modulus.ln(), f.im.atan2(f.re)));
        }
        second_cf(self.law, t, self.ray_steps)
    }
}

/// Records the first error seen inside an infallible closure.
struct ErrCell(Mutex<Option<Error>>);

impl ErrCell {
    fn new() -> Self {
        Self(Mutex::new(None))
    }

    fn record(&self, e: Error) {
        let mut slot = self.0.lock().unwrap();
        if slot.is_none() {
            *slot = Some(e);
        }
    }

    fn check(&self) -> Result<()> {
        match self.0.lock().unwrap().take() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

// ---------------------------------------------------------------------------
// fit pipeline
// ---------------------------------------------------------------------------

/// Deterministic sample of 1-norm unit directions.
fn unit_directions<T: Scalar>(d: usize, count: usize) -> Vec<DVector<T>> {
    if d == 1 {
        return vec![
            DVector::from_vec(vec![T::one()]),
            DVector::from_vec(vec![-T::one()]),
        ];
    }
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_d19);
    let mut out = Vec::with_capacity(count);
    // include the coordinate axes
    for i in 0..d {
        let mut e = DVector::zeros(d);
        e[i] = T::one();
        out.push(e.clone());
        out.push(-e);
    }
    use rand::Rng;
    while out.len() < count {
        let v = DVector::from_iterator(d, (0..d).map(|_| T::of(rng.random::<f64>() * 2.0 - 1.0)));
        let n = l1_norm(&v);
        if n > T::of(1e-3) {
            out.push(v / n);
        }
    }
    out
}

/// Doubling anchor: the direction on the shell `||t|| = T/4` where the
/// surrogate modulus is largest, and the modulus there.
pub fn anchor<T: Scalar>(surrogate: &GaussianSurrogate<T>) -> Result<(DVector<T>, T)> {
    let d = surrogate.q_hat.nrows();
    let r = surrogate.t_radius * T::of(0.25);
    let mut best: Option<(DVector<T>, T)> = None;
    for u in unit_directions(d, 64) {
        let t = &u * r;
        let q = quad_form(&surrogate.q_hat, &t);
        let phi = (-q * T::of(0.5)).exp();
        if best.as_ref().map_or(true, |(_, b)| phi > *b) {
            best = Some((t, phi));
        }
    }
    let (t0, phi) = best.unwrap();
    if phi >= T::one() - T::of(DEGENERATE_MODULUS) {
        return Err(Error::DegenerateAnchor(phi.to_subset().unwrap_or(f64::NAN)));
    }
    Ok((t0, phi))
}

/// Fits common-covariance Gaussian surrogates to an independent pair.
pub fn fit_surrogate<T: Scalar + Send + Sync>(
    x1: &Distribution<T>,
    x2: &Distribution<T>,
    t_radius: T,
    opts: &FitOptions,
) -> Result<GaussianSurrogate<T>> {
    fit_surrogate_pair(
        &JointPair::independent(x1.clone(), x2.clone()),
        t_radius,
        opts,
        true,
    )
}

/// Fits surrogates to a possibly dependent pair: the admissible level becomes
/// `epsilon + 4 delta`, with `delta` the measured dependence of the pair
/// itself (on the doubled-radius ball).
pub fn fit_surrogate_pair<T: Scalar + Send + Sync>(
    pair: &JointPair<T>,
    t_radius: T,
    opts: &FitOptions,
    known_independent: bool,
) -> Result<GaussianSurrogate<T>> {
    let (d1, d2) = pair.dims();
    if d1 != d2 {
        return Err(Error::DimensionMismatch {
            expected: d1,
            got: d2,
        });
    }
    let d = d1;
    let df = T::from_usize(d).unwrap();
    if t_radius <= T::zero() {
        return Err(Error::InvalidParameter("t_radius must be positive".into()));
    }
    let (x1, x2) = pair.marginal_laws();

    // modulus floor p on the 1-ball of radius T, minus a Lipschitz pad
    let p_grid = crate::charfn::ball_grid(t_radius, opts.p_points | 1, d);
    let mut p_raw = T::max_value().unwrap();
    for t in &p_grid {
        let m1 = cmod(cf_eval(&x1, t)?);
        let m2 = cmod(cf_eval(&x2, t)?);
        p_raw = p_raw.min(m1.min(m2));
    }
    let spacing = T::of(2.0) * t_radius / T::from_usize((opts.p_points | 1) - 1).unwrap();
    let pad_p = spacing * x1.l1_moment_bound().max(x2.l1_moment_bound());
    let p = (p_raw - pad_p).min(T::one());
    if !(p > T::of(P_MIN)) {
        return Err(Error::PFloorZero);
    }

    // dependence of the sum/difference pair: measuring the normalized
    // rotation on the ball of radius sqrt(2) T equals the unnormalized
    // (epsilon, T) level the theory uses
    let sqrt2 = T::of(2.0).sqrt();
    let doubled = pair.double()?;
    let dep = dependence_sup(&doubled, sqrt2 * t_radius, opts.grid_points | 1)?;
    let epsilon_hat = dep.epsilon_hat;
    let delta_hat = if known_independent {
        T::zero()
    } else {
        dependence_sup(pair, T::of(2.0) * t_radius, opts.grid_points | 1)?.epsilon_hat
    };
    let eps_eff = epsilon_hat + T::of(4.0) * delta_hat;
    let p4 = p * p * p * p;
    let threshold = p4 / (T::of(360.0) * df * df * (df + T::one()));
    if eps_eff > threshold {
        return Err(Error::ThresholdExceeded {
            eps: eps_eff.to_subset().unwrap_or(f64::NAN),
            threshold: threshold.to_subset().unwrap_or(f64::NAN),
        });
    }
    // defects fed to the fits use the padded level: the grid estimate is a
    // lower bound on the true supremum
    let eps_pad = eps_eff + dep.lipschitz_pad;

    let g1 = GEval::new(&x1, opts.ray_steps);
    let g2 = GEval::new(&x2, opts.ray_steps);

    // sup-norm box inside the 1-ball of radius T/2
    let hw = t_radius * T::of(0.5) / df;

    // symmetric almost-bilinear form (t, x) -> g1(x + t) - g1(x) - g1(t)
    let errs = ErrCell::new();
    let zero = Complex::new(T::zero(), T::zero());
    let bifun = |t: &[T], x: &[T]| -> Complex<T> {
        let tv = DVector::from_row_slice(t);
        let xv = DVector::from_row_slice(x);
        let sum = &tv + &xv;
        let r = (|| -> Result<Complex<T>> {
            Ok(g1.eval(&sum)? - g1.eval(&xv)? - g1.eval(&tv)?)
        })();
        match r {
            Ok(v) => v,
            Err(e) => {
                errs.record(e);
                zero
            }
        }
    };
    let theta_bi = T::of(7.5) * eps_pad / p4;
    let bi = SampledBiFunction {
        dim: d,
        half_width: hw,
        eval: &bifun,
        continuity_hint: ContinuityHint::AssumedEverywhere,
    };
    let bil = biadditive_fit(&bi, theta_bi, 0x0b1f)?;
    errs.check()?;
    let q_tilde_r = -bil.real_matrix();
    let q_tilde_r = symmetrize(&q_tilde_r);

    // positive-semidefinite shift
    let half_t = t_radius * T::of(0.5);
    let shift = df / (half_t * half_t) * (T::of(720.0) * df * df * eps_eff / p4);
    let mut q_hat = &q_tilde_r + DMatrix::identity(d, d) * shift;
    q_hat = clip_psd(&q_hat);

    // degenerate directions: modulus pinned at 1 along a line means the laws
    // live on a hyperplane; zero the covariance there
    let eig = q_hat.clone().symmetric_eigen();
    let mut projector: Option<DMatrix<T>> = None;
    for col in 0..d {
        let u = eig.eigenvectors.column(col).clone_owned();
        let un = &u / l1_norm(&u);
        let mut pinned = true;
        for k in 1..=16 {
            let s = t_radius * T::from_usize(k).unwrap() / T::of(16.0);
            let t = &un * s;
            let m1 = cmod(cf_eval(&x1, &t)?);
            let m2 = cmod(cf_eval(&x2, &t)?);
            if m1.min(m2) <= T::one() - T::of(DEGENERATE_MODULUS) {
                pinned = false;
                break;
            }
        }
        if pinned {
            let u2 = &u / u.norm();
            let p = DMatrix::identity(d, d) - &u2 * u2.transpose();
            projector = Some(match projector {
                Some(prev) => prev * p,
                None => p,
            });
        }
    }
    if let Some(p) = projector {
        q_hat = clip_psd(&(&p * q_hat * p.transpose()));
    }

    // means from the linear part of the residual g_i(t) + t^T Qt / 2
    let theta_lin = T::of(90.0) * df * eps_pad / p4;
    let mut m_hats = Vec::with_capacity(2);
    for geval in [&g1, &g2] {
        let errs = ErrCell::new();
        let resid = |t: &[T]| -> Complex<T> {
            let tv = DVector::from_row_slice(t);
            match geval.eval(&tv) {
                Ok(v) => v + Complex::new(T::of(0.5) * quad_form(&q_tilde_r, &tv), T::zero()),
                Err(e) => {
                    errs.record(e);
                    zero
                }
            }
        };
        let sf = SampledFunction {
            dim: d,
            domain: FitDomain::Box { half_width: hw },
            eval: &resid,
            continuity_hint: ContinuityHint::AssumedEverywhere,
        };
        let fit = kominek_fit(&sf, theta_lin)?;
        errs.check()?;
        m_hats.push(DVector::from_iterator(
            d,
            fit.linear_map.iter().map(|c| c.im),
        ));
    }

    let c_gap = T::of(720.0) * df * df * (df + T::one()) * eps_eff / p4;
    let surrogate = GaussianSurrogate {
        m_hat_1: m_hats[0].clone(),
        m_hat_2: m_hats[1].clone(),
        q_hat,
        valid_radius: half_t,
        certified_gap: c_gap,
        epsilon_hat,
        delta_hat,
        p_floor: p,
        t_radius,
        audit_max_rel: T::zero(),
    };

    // relative-gap audit on the half ball
    let audit = crate::charfn::ball_grid(half_t, opts.audit_points | 1, d);
    let mut worst = T::zero();
    for t in &audit {
        for (i, law) in [&x1, &x2].into_iter().enumerate() {
            let f = cf_eval(law, t)?;
            let phi = surrogate.phi(i, t);
            let rel = cmod(f - phi) / cmod(phi);
            if rel > worst {
                worst = rel;
            }
        }
    }
    if !(worst <= c_gap + T::of(AUDIT_ATOL)) {
        return Err(Error::AuditFailed(format!(
            "relative gap {:?} exceeds certified {:?} on the half ball",
            worst, c_gap
        )));
    }
    Ok(GaussianSurrogate {
        audit_max_rel: worst,
        ..surrogate
    })
}

// ---------------------------------------------------------------------------
// sum/difference identity audit
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Lemma3Report<T: Scalar> {
    pub epsilon_hat: T,
    pub lipschitz_pad: T,
    pub max_residual: T,
    pub bound: T,
    pub holds: bool,
    pub dependence: DependenceReport<T>,
}

/// Audits the doubling identity `f_i(2t) = f_i(t)^2 |f_i(t)|^2 + r` with
/// `|r| <= 5 epsilon`, for an independent pair whose sum/difference rotation
/// is `(epsilon, T)`-dependent.
pub fn lemma3_audit<T: Scalar + Send + Sync>(
    x1: &Distribution<T>,
    x2: &Distribution<T>,
    t_radius: T,
    n: usize,
) -> Result<Lemma3Report<T>> {
    let pair = JointPair::independent(x1.clone(), x2.clone());
    let doubled = pair.double()?;
    let dep = dependence_sup(&doubled, t_radius, n)?;
    // the normalized rotation measured at radius T certifies the identity on
    // the ball of radius T / sqrt(2)
    let ball = t_radius / T::of(2.0).sqrt();
    let d = x1.dim();
    let mut worst = T::zero();
    for t in crate::charfn::ball_grid(ball, n, d) {
        for law in [x1, x2] {
            let f = cf_eval(law, &t)?;
            let f2 = cf_eval(law, &(&t * T::of(2.0)))?;
            let m2 = f.re * f.re + f.im * f.im;
            let pred = f * f * Complex::new(m2, T::zero());
            let res = cmod(f2 - pred);
            if res > worst {
                worst = res;
            }
        }
    }
    let bound = T::of(5.0) * dep.epsilon_hat + dep.lipschitz_pad;
    Ok(Lemma3Report {
        epsilon_hat: dep.epsilon_hat,
        lipschitz_pad: dep.lipschitz_pad,
        max_residual: worst,
        bound,
        holds: worst <= bound + T::of(AUDIT_ATOL),
        dependence: dep,
    })
}

// ---------------------------------------------------------------------------
// unbounded extension
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ShellAudit<T: Scalar> {
    pub radius_lo: T,
    pub radius_hi: T,
    pub bound: T,
    pub observed: T,
}

#[derive(Debug, Clone)]
pub struct UnboundedCertificate<T: Scalar> {
    /// Global gap `c_tilde * (epsilon + 4 delta)`; may be infinite.
    pub certified_gap: T,
    pub anchor: DVector<T>,
    pub anchor_modulus: T,
    pub shells: Vec<ShellAudit<T>>,
}

/// Extends the half-ball certificate to all radii through the doubling
/// recursion, auditing `|f_i - Phi_i| <= C_k` on sampled shells.
pub fn extend_unbounded<T: Scalar + Send + Sync>(
    surrogate: &GaussianSurrogate<T>,
    x1: &Distribution<T>,
    x2: &Distribution<T>,
    budget: &StabilityBudget<T>,
) -> Result<UnboundedCertificate<T>> {
    let (t0, phi) = anchor(surrogate)?;
    if (phi - budget.phi_t0_abs).abs() > T::of(1e-9) {
        return Err(Error::InvalidParameter(format!(
            "budget anchor modulus {:?} does not match the surrogate anchor {:?}",
            budget.phi_t0_abs, phi
        )));
    }
    let d = x1.dim();
    let t_radius = surrogate.t_radius;
    let dirs = unit_directions::<T>(d, 64);
    let bound_for_shell = |k: usize| -> T {
        if k < budget.c_k.len() {
            budget.c_k[k]
        } else {
            budget.c_k[budget.c_k.len().saturating_sub(2)]
        }
    };
    let mut shells = Vec::new();
    for k in 1..=8usize {
        let lo = t_radius * T::of(2.0f64.powi(k as i32 - 2));
        let hi = t_radius * T::of(2.0f64.powi(k as i32 - 1));
        let bound = bound_for_shell(k);
        let mut observed = T::zero();
        for step in 0..16 {
            let r = lo + (hi - lo) * T::from_usize(step).unwrap() / T::of(15.0);
            for u in &dirs {
                let t = u * r;
                for (i, law) in [x1, x2].into_iter().enumerate() {
                    let gap = cmod(cf_eval(law, &t)? - surrogate.phi(i, &t));
                    if gap > observed {
                        observed = gap;
                    }
                }
            }
        }
        if !(observed <= bound + T::of(AUDIT_ATOL)) {
            return Err(Error::AuditFailed(format!(
                "shell {k}: gap {:?} exceeds C_k = {:?}",
                observed, bound
            )));
        }
        shells.push(ShellAudit {
            radius_lo: lo,
            radius_hi: hi,
            bound,
            observed,
        });
    }
    Ok(UnboundedCertificate {
        certified_gap: budget.c_tilde * budget.eps_eff(),
        anchor: t0,
        anchor_modulus: phi,
        shells,
    })
}

// ---------------------------------------------------------------------------
// entropy stability audit
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct EntropyStabilityReport<T: Scalar> {
    pub t_used: T,
    pub surrogate_entropy: T,
    pub entropies: [T; 2],
    pub entropy_gaps: [T; 2],
    pub b: T,
    pub bounds: EntropyBounds<T>,
    pub budget: StabilityBudget<T>,
    pub cov_slack_min_eig: [T; 2],
    pub holds: bool,
}

/// Audits entropy stability for `Y_i = X_i + Z_i`: fits surrogates to the
/// smoothed laws, evaluates the closed-form bound chain at the measured
/// dependence level, and checks the entropy and second-moment orderings.
pub fn entropy_stability_audit<T: Scalar + Send + Sync>(
    x1: &Distribution<T>,
    x2: &Distribution<T>,
    q_z1: &DMatrix<T>,
    q_z2: &DMatrix<T>,
    initial_t: T,
) -> Result<EntropyStabilityReport<T>> {
    let y1 = x1.clone().smooth(q_z1.clone())?;
    let y2 = x2.clone().smooth(q_z2.clone())?;
    let d = y1.dim();
    let opts = FitOptions::for_dim(d);

    let mut t = initial_t;
    let mut surrogate = None;
    for _ in 0..12 {
        match fit_surrogate(&y1, &y2, t, &opts) {
            Ok(s) => {
                surrogate = Some(s);
                break;
            }
            Err(Error::ThresholdExceeded { .. }) | Err(Error::PFloorZero) => {
                t *= T::of(0.5);
            }
            Err(e) => return Err(e),
        }
    }
    let surrogate = surrogate.ok_or(Error::NoConvergence(
        "no admissible radius for the surrogate fit after 12 halvings".into(),
    ))?;

    let (_, phi) = anchor(&surrogate)?;
    let mut budget = budget(
        d,
        surrogate.p_floor,
        surrogate.t_radius,
        surrogate.epsilon_hat,
        surrogate.delta_hat,
        phi,
    )?;

    let lambda = min_eigenvalue(q_z1).min(min_eigenvalue(q_z2));
    let (m1, c1) = y1.mean_cov();
    let (m2, c2) = y2.mean_cov();
    let e2 = (c1.trace() + m1.norm_squared()).max(c2.trace() + m2.norm_squared());
    let lam_max = crate::linalg::max_eigenvalue(&surrogate.q_hat);
    let mh = surrogate
        .m_hat_1
        .norm_squared()
        .max(surrogate.m_hat_2.norm_squared());
    let m4 = T::of(3.0) * lam_max * lam_max + T::of(6.0) * lam_max * mh + mh * mh;
    let df = T::from_usize(d).unwrap();
    let two_pi = T::two_pi();
    let peak = |q: &DMatrix<T>| -> Result<T> {
        Ok((-T::of(0.5) * (crate::linalg::log_det_pd(q)? + df * two_pi.ln())).exp())
    };
    let moments = MomentBounds {
        second_moment: e2,
        fourth_moment_proj: m4,
        gauss_peak: peak(q_z1)?.max(peak(q_z2)?),
    };
    let bounds = entropy_bounds(&budget, lambda, &moments)?;
    budget.entropy = Some(bounds.clone());

    let h_g = crate::linalg::gaussian_entropy(&surrogate.q_hat)?;
    let h1 = crate::info::differential_entropy_default(&y1)?;
    let h2 = crate::info::differential_entropy_default(&y2)?;
    let b = bounds.b;

    let gap1 = (h1 - h_g).abs();
    let gap2 = (h2 - h_g).abs();
    let slack = |law: &Distribution<T>, m_hat: &DVector<T>| -> T {
        if b.to_subset().map_or(true, |v: f64| v.is_infinite()) {
            return T::zero();
        }
        let s_y = law.second_moment();
        let s_g = &surrogate.q_hat + m_hat * m_hat.transpose();
        min_eigenvalue(&(s_y + DMatrix::identity(d, d) * b - s_g))
    };
    let sl1 = slack(&y1, &surrogate.m_hat_1);
    let sl2 = slack(&y2, &surrogate.m_hat_2);
    let atol = T::of(AUDIT_ATOL);
    let holds = (gap1 <= b + atol || b.to_subset().map_or(false, |v: f64| v.is_infinite()))
        && (gap2 <= b + atol || b.to_subset().map_or(false, |v: f64| v.is_infinite()))
        && sl1 >= -atol
        && sl2 >= -atol;
    Ok(EntropyStabilityReport {
        t_used: surrogate.t_radius,
        surrogate_entropy: h_g,
        entropies: [h1, h2],
        entropy_gaps: [gap1, gap2],
        b,
        bounds,
        budget,
        cov_slack_min_eig: [sl1, sl2],
        holds,
    })
}
