//! Fuglede–Kadison determinants: monotone upper bounds from trace
//! schedules, the ε-regularized integral route, closed forms for the free
//! families, and Mahler-measure oracles for free abelian groups.
//!
//! For an injective A and 0 < λ < ‖A‖⁻², the partial sums
//!
//! ```text
//! f_N = sqrt( (1/λ) · exp( −Σ_{n=1..N} tr((Id − λA*A)ⁿ) / n ) )
//! ```
//!
//! decrease to det(A). With the safe policy λ = ‖A‖₁⁻² the precondition
//! holds because the 1-norm dominates the operator norm.

pub mod mahler;
pub mod quadrature;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{Element, Scalar, TraceSchedule, DEFAULT_TERM_BUDGET};
use crate::error::{Error, Result};
use crate::series::{self, SeriesCoeffs, SeriesFamily};

pub use mahler::{mahler_1d, mahler_nd, LaurentPoly};
pub use quadrature::{GaussLegendre, GradedRule};

/// How λ is chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum LambdaPolicy {
    /// λ = one_norm(A)⁻²; bounds are certified.
    Safe,
    /// Caller-supplied λ, reported as uncertified.
    Published(BigRational),
}

impl LambdaPolicy {
    /// (λ, certified) for an operator with the given 1-norm.
    pub fn resolve(&self, one_norm: &BigRational) -> Result<(BigRational, bool)> {
        match self {
            LambdaPolicy::Safe => {
                if !one_norm.is_positive() {
                    return Err(Error::InvalidArgument("zero operator".into()));
                }
                Ok(((one_norm * one_norm).recip(), true))
            }
            LambdaPolicy::Published(l) => {
                if !l.is_positive() {
                    return Err(Error::InvalidArgument("λ must be positive".into()));
                }
                Ok((l.clone(), false))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ApproxParams {
    pub lambda: BigRational,
    pub policy: LambdaPolicy,
    /// Number of terms of the partial sum.
    pub n: usize,
    /// ε values for the integral route.
    pub eps_schedule: Vec<f64>,
    /// Uniform Gauss–Legendre panels for the integral route.
    pub quadrature_panels: usize,
    pub budget: usize,
}

impl ApproxParams {
    /// λ given explicitly; `certified` only if the caller vouches for λ < ‖A‖⁻².
    pub fn with_lambda(lambda: BigRational, n: usize, certified: bool) -> Self {
        let policy = if certified {
            LambdaPolicy::Safe
        } else {
            LambdaPolicy::Published(lambda.clone())
        };
        ApproxParams {
            lambda,
            policy,
            n,
            eps_schedule: vec![1e-2, 1e-3, 1e-4],
            quadrature_panels: 64,
            budget: DEFAULT_TERM_BUDGET,
        }
    }

    pub fn for_operator(policy: LambdaPolicy, one_norm: &BigRational, n: usize) -> Result<Self> {
        let (lambda, _) = policy.resolve(one_norm)?;
        Ok(ApproxParams {
            lambda,
            policy,
            n,
            eps_schedule: vec![1e-2, 1e-3, 1e-4],
            quadrature_panels: 64,
            budget: DEFAULT_TERM_BUDGET,
        })
    }

    pub fn certified(&self) -> bool {
        self.policy == LambdaPolicy::Safe
    }
}

/// Upper-bound sequence for a determinant.
#[derive(Clone, Debug)]
pub struct DetEstimate {
    /// Index n holds the partial-sum value after n terms; index 0 is 1/√λ.
    pub bounds: Vec<f64>,
    pub lambda: BigRational,
    pub certified: bool,
    pub exact_value: Option<f64>,
}

impl DetEstimate {
    pub fn last(&self) -> f64 {
        *self.bounds.last().expect("bounds always holds index 0")
    }

    pub fn is_nonincreasing(&self, slack: f64) -> bool {
        self.bounds.windows(2).all(|w| w[1] <= w[0] + slack)
    }
}

fn ln_rational(r: &BigRational) -> f64 {
    let ln_big = |b: &BigInt| {
        let bits = b.bits();
        if bits < 1000 {
            b.to_f64().expect("finite").abs().ln()
        } else {
            let shift = bits - 64;
            let top: BigInt = b.abs() >> shift;
            top.to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
        }
    };
    ln_big(r.numer()) - ln_big(r.denom())
}

fn bound_value(ln_inv_lambda: f64, partial_sum: f64) -> f64 {
    (0.5 * (ln_inv_lambda - partial_sum)).exp()
}

/// Bounds from exact tr((A*A)^k), through the exact binomial transform.
pub fn upper_bounds(
    traces: &TraceSchedule<BigRational>,
    params: &ApproxParams,
) -> Result<DetEstimate> {
    let n = params.n;
    if traces.len() < n + 1 {
        return Err(Error::InsufficientCoefficients {
            needed: n + 1,
            got: traces.len(),
        });
    }
    let u = SeriesCoeffs::raw(traces.values[..=n].to_vec());
    let w = series::w_from_u(&u, &params.lambda, &BigRational::zero(), n)?;
    Ok(bounds_from_shifted_exact(&w.coeffs, params))
}

/// Bounds from exact tr(Bⁿ), B = Id − λA*A (index 0 ignored).
pub fn bounds_from_shifted_exact(shifted: &[BigRational], params: &ApproxParams) -> DetEstimate {
    let ln_inv = -ln_rational(&params.lambda);
    let mut bounds = vec![bound_value(ln_inv, 0.0)];
    let mut sum = BigRational::zero();
    for (m, t) in shifted.iter().enumerate().skip(1) {
        sum += t / BigRational::from_integer(BigInt::from(m));
        bounds.push(bound_value(ln_inv, sum.to_f64().unwrap_or(f64::NAN)));
    }
    DetEstimate {
        bounds,
        lambda: params.lambda.clone(),
        certified: params.certified(),
        exact_value: None,
    }
}

/// Bounds from floating-point tr(Bⁿ) (index 0 ignored).
pub fn bounds_from_shifted_float(shifted: &[f64], params: &ApproxParams) -> DetEstimate {
    let ln_inv = -ln_rational(&params.lambda);
    let mut bounds = vec![bound_value(ln_inv, 0.0)];
    let mut sum = 0.0;
    for (m, t) in shifted.iter().enumerate().skip(1) {
        sum += t / m as f64;
        bounds.push(bound_value(ln_inv, sum));
    }
    DetEstimate {
        bounds,
        lambda: params.lambda.clone(),
        certified: params.certified(),
        exact_value: None,
    }
}

/// One-norm of an element as an exact rational.
pub fn one_norm_rational<C: Scalar>(a: &Element<C>) -> BigRational {
    C::real_to_rational(&a.one_norm())
}

/// Trace powers → bounds. Exact elements go through the exact binomial
/// transform; float elements through direct powers of B = Id − λA*A.
pub fn det_upper_bound<C: Scalar>(
    a: &Element<C>,
    policy: &LambdaPolicy,
    n: usize,
    budget: usize,
) -> Result<DetEstimate> {
    if a.is_zero() {
        return Err(Error::InvalidArgument("zero operator".into()));
    }
    let mut params = ApproxParams::for_operator(policy.clone(), &one_norm_rational(a), n)?;
    params.budget = budget;
    det_upper_bound_with(a, &params)
}

pub fn det_upper_bound_with<C: Scalar>(a: &Element<C>, params: &ApproxParams) -> Result<DetEstimate> {
    if a.is_zero() {
        return Err(Error::InvalidArgument("zero operator".into()));
    }
    if C::EXACT {
        let traces = a.power_traces(params.n, params.budget)?;
        let exact = TraceSchedule {
            values: traces
                .values
                .iter()
                .map(|v| C::real_to_rational(v))
                .collect(),
        };
        upper_bounds(&exact, params)
    } else {
        let gram = a.gram()?;
        let lam = C::from_rational(&params.lambda);
        let b = Element::identity(a.spec().clone()).sub(&gram.scale(&lam))?;
        let tr = b.self_power_traces(params.n, params.budget)?;
        let values: Vec<f64> = tr.values.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
        Ok(bounds_from_shifted_float(&values, params))
    }
}

type Integrand = Box<dyn Fn(f64) -> f64 + Sync>;

/// w_{λ,ε}(t) evaluator for a series, by the composed closed form when the
/// family is known and by truncated coefficients otherwise.
fn w_evaluator(
    u: &SeriesCoeffs,
    lambda: &BigRational,
    eps: f64,
) -> Result<(Integrand, f64)> {
    let lam = lambda.to_f64().unwrap_or(f64::NAN);
    let shift = 1.0 - lam * eps;
    let closed = match u.family {
        SeriesFamily::Free { d } => Some(d),
        SeriesFamily::SymmetricFree { d } => Some(2 * d),
        SeriesFamily::Raw => None,
    };
    match closed {
        Some(d) => {
            let d = d as f64;
            let u_at = move |s: f64| (2.0 * d - 2.0) / (d - 2.0 + d * (1.0 - 4.0 * (d - 1.0) * s).sqrt());
            let w = move |t: f64| {
                let den = 1.0 - shift * t;
                u_at(-lam * t / den) / den
            };
            Ok((Box::new(w), shift - lam * d))
        }
        None => {
            if u.coeffs.len() < 2 {
                return Err(Error::InsufficientCoefficients {
                    needed: 2,
                    got: u.coeffs.len(),
                });
            }
            let eps_q = BigRational::from_float(eps)
                .ok_or_else(|| Error::InvalidArgument(format!("ε = {eps}")))?;
            let w = series::w_from_u(u, lambda, &eps_q, u.order())?;
            let c: Vec<f64> = w.coeffs.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
            let slope = c[1];
            let w = move |t: f64| c.iter().rev().fold(0.0, |acc, v| acc * t + v);
            Ok((Box::new(w), slope))
        }
    }
}

/// √((1/λ)·exp(−∫₀¹ (w_{λ,ε}(t) − 1)/t dt)) for each ε of the schedule.
/// As ε → 0⁺ these decrease to det(A).
pub fn det_via_integral(u: &SeriesCoeffs, params: &ApproxParams) -> Result<Vec<(f64, f64)>> {
    if params.eps_schedule.is_empty() {
        return Err(Error::InvalidArgument("empty ε schedule".into()));
    }
    let ln_inv = -ln_rational(&params.lambda);
    let rule = GradedRule::new(params.quadrature_panels);
    params
        .eps_schedule
        .iter()
        .map(|&eps| {
            if !(eps >= 0.0) {
                return Err(Error::InvalidArgument(format!("ε = {eps}")));
            }
            let (w, slope) = w_evaluator(u, &params.lambda, eps)?;
            let integrand = |t: f64| {
                if t < 1e-12 {
                    slope
                } else {
                    (w(t) - 1.0) / t
                }
            };
            let integral = rule.integrate(integrand)?;
            Ok((eps, bound_value(ln_inv, integral)))
        })
        .collect()
}

/// det(Id + ζ₁R_{x₁} + … + ζ_{d−1}R_{x_{d−1}}) on F_{d−1} = (d−1)^{(d−1)/2} / d^{(d−2)/2}.
pub fn free_closed_form(d: usize) -> Result<f64> {
    if d < 3 {
        return Err(Error::InvalidArgument(format!("closed form needs d ≥ 3, got {d}")));
    }
    let d = d as f64;
    Ok((0.5 * (d - 1.0) * (d - 1.0).ln() - 0.5 * (d - 2.0) * d.ln()).exp())
}

/// det(Σ ζ_i R_{x_i} + ξ_i R_{x_i⁻¹}) on F_d = (2d−1)^{(2d−1)/2} / (2d)^{d−1}.
pub fn symmetric_free_closed_form(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("closed form needs d ≥ 2, got {d}")));
    }
    let d = d as f64;
    Ok((0.5 * (2.0 * d - 1.0) * (2.0 * d - 1.0).ln() - (d - 1.0) * (2.0 * d).ln()).exp())
}

/// exp(vol / 6π).
pub fn lehmer_vol_bound(vol: f64) -> Result<f64> {
    if !(vol > 0.0) {
        return Err(Error::InvalidArgument(format!("volume must be positive, got {vol}")));
    }
    Ok((vol / (6.0 * std::f64::consts::PI)).exp())
}

/// The dilation c·Id has determinant |c|.
pub fn scalar_det(c: f64) -> f64 {
    c.abs()
}

impl DetEstimate {
    pub fn with_exact(mut self, v: f64) -> Self {
        self.exact_value = Some(v);
        self
    }
}

/// λ ≤ one_norm⁻², i.e. the provably safe region.
pub fn lambda_is_safe(lambda: &BigRational, one_norm: &BigRational) -> bool {
    lambda * one_norm * one_norm <= BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ExactElement, FloatElement};
    use crate::words::{GroupSpec, Word};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use std::sync::Arc;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn free3() -> ExactElement {
        let s = Arc::new(GroupSpec::free(2));
        ExactElement::from_terms(
            s,
            [
                (Word::empty(), q(1, 1)),
                (Word::generator(1), q(1, 1)),
                (Word::generator(2), q(1, 1)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn first_bound_free_d3() {
        let est = det_upper_bound(&free3(), &LambdaPolicy::Safe, 3, DEFAULT_TERM_BUDGET).unwrap();
        assert_eq!(est.lambda, q(1, 9));
        assert_abs_diff_eq!(est.bounds[0], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(est.bounds[1], 3.0 * (-1.0f64 / 3.0).exp(), epsilon = 1e-14);
        assert!(est.certified);
        assert!(est.is_nonincreasing(1e-12));
    }

    #[test]
    fn identity_bounds_follow_geometric_log() {
        let s = Arc::new(GroupSpec::free(1));
        let id = ExactElement::identity(s);
        let est = det_upper_bound(&id, &LambdaPolicy::Published(q(1, 2)), 30, DEFAULT_TERM_BUDGET)
            .unwrap();
        // tr(Bⁿ) = (1/2)ⁿ
        let mut sum = 0.0;
        for n in 1..=30 {
            sum += 0.5f64.powi(n) / n as f64;
            let expected = (2.0f64 * (-sum).exp()).sqrt();
            assert_abs_diff_eq!(est.bounds[n as usize], expected, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(est.last(), 1.0, epsilon = 1e-9);
        assert!(!est.certified);
    }

    #[test]
    fn dilation_converges_to_modulus() {
        let s = Arc::new(GroupSpec::free(1));
        let c = ExactElement::scalar(s, q(-5, 2));
        let est = det_upper_bound(&c, &LambdaPolicy::Safe, 5, DEFAULT_TERM_BUDGET).unwrap();
        // safe λ = 1/|c|² makes B = 0
        assert_abs_diff_eq!(est.last(), scalar_det(-2.5), epsilon = 1e-12);
    }

    #[test]
    fn float_and_exact_routes_agree() {
        let a = free3();
        let af = FloatElement::from_exact(&a);
        let e = det_upper_bound(&a, &LambdaPolicy::Safe, 6, DEFAULT_TERM_BUDGET).unwrap();
        let f = det_upper_bound(&af, &LambdaPolicy::Safe, 6, DEFAULT_TERM_BUDGET).unwrap();
        for (x, y) in e.bounds.iter().zip(&f.bounds) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn z_instance_bounds_stay_above_mahler() {
        let s = Arc::new(GroupSpec::free_abelian(1));
        let a = ExactElement::from_terms(
            s,
            [(Word::empty(), q(1, 1)), (Word::generator(1), q(-2, 1))],
        )
        .unwrap();
        let est = det_upper_bound(&a, &LambdaPolicy::Safe, 40, DEFAULT_TERM_BUDGET).unwrap();
        assert!(est.is_nonincreasing(1e-12));
        assert!(est.bounds.iter().all(|&b| b >= 2.0 - 1e-9));
        assert!((est.last() - 2.0).abs() < 0.05, "{}", est.last());
    }

    #[test]
    fn upper_bounds_requires_enough_traces() {
        let t = TraceSchedule {
            values: vec![q(1, 1), q(3, 1)],
        };
        let p = ApproxParams::with_lambda(q(1, 9), 2, true);
        assert!(matches!(
            upper_bounds(&t, &p),
            Err(Error::InsufficientCoefficients { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn closed_forms() {
        assert_abs_diff_eq!(free_closed_form(3).unwrap(), 2.0 / 3f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(free_closed_form(4).unwrap(), 1.299038105676658, epsilon = 1e-14);
        assert_abs_diff_eq!(
            symmetric_free_closed_form(2).unwrap(),
            3f64.powf(1.5) / 4.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            symmetric_free_closed_form(3).unwrap(),
            5f64.powf(2.5) / 36.0,
            epsilon = 1e-14
        );
        for d in 2..12 {
            assert_abs_diff_eq!(
                symmetric_free_closed_form(d).unwrap(),
                free_closed_form(2 * d).unwrap(),
                epsilon = 1e-12
            );
        }
        for d in 3..30 {
            assert!(free_closed_form(d + 1).unwrap() > free_closed_form(d).unwrap());
        }
        assert!(free_closed_form(2).is_err());
        assert!(symmetric_free_closed_form(1).is_err());
    }

    #[test]
    fn lehmer_bounds() {
        assert_abs_diff_eq!(lehmer_vol_bound(0.942707).unwrap(), 1.05128, epsilon = 5e-6);
        let m004 = lehmer_vol_bound(2.0298).unwrap();
        assert!((1.113..1.114).contains(&m004));
        let threshold = 6.0 * std::f64::consts::PI * (2.0 / 3f64.sqrt()).ln();
        assert_abs_diff_eq!(threshold, 2.7114, epsilon = 1e-4);
        assert_abs_diff_eq!(lehmer_vol_bound(threshold).unwrap(), 2.0 / 3f64.sqrt(), epsilon = 1e-14);
        assert!(lehmer_vol_bound(0.0).is_err());
    }

    #[test]
    fn integral_trivial_series() {
        // u ≡ 1 at λ = 1, ε = 0: w(t) = Σ (1 − 1)ⁿ tⁿ = 1, integral 0, estimate 1/√λ
        let u = SeriesCoeffs::raw(vec![q(1, 1); 6]);
        let mut p = ApproxParams::with_lambda(q(1, 1), 5, true);
        p.eps_schedule = vec![0.0];
        let v = det_via_integral(&u, &p).unwrap();
        assert_abs_diff_eq!(v[0].1, 1.0, epsilon = 1e-12);
        p.eps_schedule.clear();
        assert!(det_via_integral(&u, &p).is_err());
    }

    /// ∫₀¹ g(t) dt via t = 1 − s² and composite Simpson in s.
    fn simpson_oracle(g: impl Fn(f64) -> f64) -> f64 {
        let m = 400_000;
        let h = 1.0 / m as f64;
        let f = |s: f64| if s == 0.0 { 0.0 } else { 2.0 * s * g(1.0 - s * s) };
        let mut acc = f(0.0) + f(1.0);
        for k in 1..m {
            acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn integral_route_free_d3() {
        let u = series::free_series(3, 4).unwrap();
        let p = ApproxParams::with_lambda(q(1, 9), 40, true);
        let v = det_via_integral(&u, &p).unwrap();
        let target = free_closed_form(3).unwrap();
        assert!(v.windows(2).all(|w| w[1].1 < w[0].1));
        assert!(v.iter().all(|(_, e)| *e > target));
        for (eps, est) in &v {
            let (w, slope) = w_evaluator(&u, &p.lambda, *eps).unwrap();
            let integral = simpson_oracle(|t| if t == 0.0 { slope } else { (w(t) - 1.0) / t });
            let oracle = (9.0 * (-integral).exp()).sqrt();
            assert_abs_diff_eq!(*est, oracle, epsilon = 1e-7);
        }
        // the gap to 2/√3 shrinks like √ε
        let gaps: Vec<f64> = v.iter().map(|(_, e)| e - target).collect();
        for g in gaps.windows(2) {
            assert!((g[0] / g[1] - 10f64.sqrt()).abs() < 0.25, "{gaps:?}");
        }
    }

    #[test]
    fn integrand_limit_at_zero() {
        let u = series::free_series(3, 4).unwrap();
        let (w, slope) = w_evaluator(&u, &q(1, 9), 1e-3).unwrap();
        let t = 1e-7;
        assert_abs_diff_eq!((w(t) - 1.0) / t, slope, epsilon = 1e-6);
        let raw = SeriesCoeffs::raw(u.coeffs.clone());
        let (_, raw_slope) = w_evaluator(&raw, &q(1, 9), 1e-3).unwrap();
        assert_abs_diff_eq!(raw_slope, slope, epsilon = 1e-12);
    }

    #[test]
    fn unit_modulus_float_operator() {
        let s = Arc::new(GroupSpec::free(2));
        let a = FloatElement::from_terms(
            s,
            [
                (Word::empty(), Complex64::new(1.0, 0.0)),
                (Word::generator(1), Complex64::new(0.0, 1.0)),
                (Word::generator(2), Complex64::new(-1.0, 0.0)),
            ],
        )
        .unwrap();
        let est = det_upper_bound(&a, &LambdaPolicy::Safe, 6, DEFAULT_TERM_BUDGET).unwrap();
        let exact = det_upper_bound(&free3(), &LambdaPolicy::Safe, 6, DEFAULT_TERM_BUDGET).unwrap();
        for (x, y) in est.bounds.iter().zip(&exact.bounds) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-10);
        }
    }
}
