//! Exact Taylor coefficients of closed-path generating functions on free
//! groups, and the binomial transform from tr((A*A)^k) to tr(Bⁿ) with
//! B = (1 − λε)·Id − λA*A.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::algebra::DEFAULT_TERM_BUDGET;
use crate::catalog;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesFamily {
    /// u(t) = (2d−2) / (d−2 + d·√(1−4(d−1)t)), the free operator Id + Σ R_{x_i} on F_{d−1}.
    Free { d: usize },
    /// The symmetric operator Σ (R_{x_i} + R_{x_i⁻¹}) on F_d; equals `Free { d: 2d }`.
    SymmetricFree { d: usize },
    Raw,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesCoeffs {
    pub family: SeriesFamily,
    /// Index k holds the coefficient of t^k.
    pub coeffs: Vec<BigRational>,
}

impl SeriesCoeffs {
    pub fn raw(coeffs: Vec<BigRational>) -> Self {
        SeriesCoeffs {
            family: SeriesFamily::Raw,
            coeffs,
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Coefficients as integers; `None` if any is fractional.
    pub fn integers(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Taylor coefficients of √(1 − c·t) up to order k_max.
fn sqrt_one_minus(c: &BigRational, k_max: usize) -> Vec<BigRational> {
    // binom(1/2, k) (−c)^k, built by the ratio binom(1/2,k+1)/binom(1/2,k) = (1/2 − k)/(k+1)
    let half = BigRational::new(1.into(), 2.into());
    let mut out = Vec::with_capacity(k_max + 1);
    let mut term = BigRational::one();
    for k in 0..=k_max {
        out.push(term.clone());
        let kk = int(k as i64);
        term = term * (&half - &kk) / (kk + int(1)) * (-c.clone());
    }
    out
}

/// Coefficients of 1/p(t) by the triangular recurrence; p₀ must be nonzero.
fn reciprocal(p: &[BigRational]) -> Vec<BigRational> {
    let inv0 = p[0].recip();
    let mut out: Vec<BigRational> = Vec::with_capacity(p.len());
    out.push(inv0.clone());
    for k in 1..p.len() {
        let s = (1..=k).fold(BigRational::zero(), |acc, j| acc + &p[j] * &out[k - j]);
        out.push(-s * &inv0);
    }
    out
}

pub fn free_series(d: usize, k: usize) -> Result<SeriesCoeffs> {
    if d < 3 {
        return Err(Error::InvalidArgument(format!("free series needs d ≥ 3, got {d}")));
    }
    let d_q = int(d as i64);
    let root = sqrt_one_minus(&int(4 * (d as i64 - 1)), k);
    let mut denom: Vec<BigRational> = root.into_iter().map(|c| c * &d_q).collect();
    denom[0] += int(d as i64 - 2);
    let numer = int(2 * d as i64 - 2);
    let coeffs = reciprocal(&denom).into_iter().map(|c| c * &numer).collect();
    Ok(SeriesCoeffs {
        family: SeriesFamily::Free { d },
        coeffs,
    })
}

pub fn symmetric_free_series(d: usize, k: usize) -> Result<SeriesCoeffs> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "symmetric free series needs d ≥ 2, got {d}"
        )));
    }
    let mut s = free_series(2 * d, k)?;
    s.family = SeriesFamily::SymmetricFree { d };
    Ok(s)
}

/// Coefficients of w_{λ,ε}(t) = Σ tr(((1−λε)Id − λA*A)ⁿ) tⁿ up to order n_max,
/// via tr(Bⁿ) = Σ_k C(n,k) (1−λε)^{n−k} (−λ)^k u_k.
pub fn w_from_u(
    u: &SeriesCoeffs,
    lambda: &BigRational,
    eps: &BigRational,
    n_max: usize,
) -> Result<SeriesCoeffs> {
    if u.coeffs.len() < n_max + 1 {
        return Err(Error::InsufficientCoefficients {
            needed: n_max + 1,
            got: u.coeffs.len(),
        });
    }
    if !lambda.is_positive() || eps.is_negative() {
        return Err(Error::InvalidArgument("need λ > 0 and ε ≥ 0".into()));
    }
    let shift = BigRational::one() - lambda * eps;
    let neg_lambda = -lambda.clone();
    // scaled[k] = (−λ)^k u_k, shift_pow[j] = (1−λε)^j
    let mut scaled = Vec::with_capacity(n_max + 1);
    let mut shift_pow = Vec::with_capacity(n_max + 1);
    let mut p = BigRational::one();
    let mut s = BigRational::one();
    for k in 0..=n_max {
        scaled.push(&p * &u.coeffs[k]);
        shift_pow.push(s.clone());
        p *= &neg_lambda;
        s *= &shift;
    }
    let mut coeffs = Vec::with_capacity(n_max + 1);
    let mut binom: Vec<BigInt> = vec![BigInt::one()];
    for n in 0..=n_max {
        if n > 0 {
            let mut next = vec![BigInt::one(); n + 1];
            for k in 1..n {
                next[k] = &binom[k - 1] + &binom[k];
            }
            binom = next;
        }
        let mut acc = BigRational::zero();
        for k in 0..=n {
            if scaled[k].is_zero() {
                continue;
            }
            acc += BigRational::from_integer(binom[k].clone()) * &shift_pow[n - k] * &scaled[k];
        }
        coeffs.push(acc);
    }
    Ok(SeriesCoeffs::raw(coeffs))
}

/// Outcome of the dual-route check between the closed-form series and
/// brute-force algebra traces.
#[derive(Clone, Debug)]
pub struct BruteForceReport {
    pub d: usize,
    pub series: Vec<BigRational>,
    pub traces: Vec<BigRational>,
}

impl BruteForceReport {
    pub fn agrees(&self) -> bool {
        self.series == self.traces
    }
}

/// Compare `free_series(d, k)` with exact-mode traces of Id + Σ R_{x_i} over F_{d−1}.
pub fn verify_bruteforce(d: usize, k: usize) -> Result<BruteForceReport> {
    verify_bruteforce_with_budget(d, k, DEFAULT_TERM_BUDGET)
}

pub fn verify_bruteforce_with_budget(d: usize, k: usize, budget: usize) -> Result<BruteForceReport> {
    let series = free_series(d, k)?.coeffs;
    let op = catalog::free_operator_exact(d)?;
    let traces = op.element.power_traces(k, budget)?.values;
    Ok(BruteForceReport { d, series, traces })
}
