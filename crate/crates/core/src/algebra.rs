//! Sparse group-algebra arithmetic over a [`GroupSpec`].
//!
//! An [`Element`] is a finitely supported function from canonical group
//! elements to coefficients and stands for the right-multiplication operator
//! it induces on ℓ²(G). Coefficients are either exact rationals or complex
//! doubles; the choice is fixed per element by the type parameter.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use indexmap::IndexMap;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::words::{CanonicalKey, GroupSpec, Word};

/// Default cap on the number of terms of any materialized product.
pub const DEFAULT_TERM_BUDGET: usize = 50_000_000;

/// Coefficient ring of a group-algebra element.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    /// Real values produced by traces and norms.
    type Real: Clone + Debug + PartialOrd + Zero + Add<Output = Self::Real> + ToPrimitive;

    /// Whether arithmetic is exact.
    const EXACT: bool;

    fn conj(&self) -> Self;
    fn modulus(&self) -> Self::Real;
    fn real_part(&self) -> Self::Real;
    fn from_rational(r: &BigRational) -> Self;
    fn to_complex(&self) -> Complex64;
    fn real_to_rational(r: &Self::Real) -> BigRational;

    /// True when the term should not be stored.
    fn negligible(&self, drop_tolerance: f64) -> bool;
}

impl Scalar for BigRational {
    type Real = BigRational;
    const EXACT: bool = true;

    fn conj(&self) -> Self {
        self.clone()
    }

    fn modulus(&self) -> BigRational {
        self.abs()
    }

    fn real_part(&self) -> BigRational {
        self.clone()
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn real_to_rational(r: &BigRational) -> BigRational {
        r.clone()
    }

    fn negligible(&self, _drop_tolerance: f64) -> bool {
        self.is_zero()
    }
}

impl Scalar for Complex64 {
    type Real = f64;
    const EXACT: bool = false;

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn modulus(&self) -> f64 {
        self.norm()
    }

    fn real_part(&self) -> f64 {
        self.re
    }

    fn from_rational(r: &BigRational) -> Self {
        Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }

    fn real_to_rational(r: &f64) -> BigRational {
        BigRational::from_float(*r).unwrap_or_else(BigRational::zero)
    }

    fn negligible(&self, drop_tolerance: f64) -> bool {
        let m = self.norm();
        m == 0.0 || m <= drop_tolerance
    }
}

/// Finitely supported element of the group algebra ℂG (or ℚG in exact mode).
#[derive(Clone, Debug)]
pub struct Element<C: Scalar> {
    spec: Arc<GroupSpec>,
    terms: IndexMap<CanonicalKey, C>,
    drop_tolerance: f64,
}

/// Exact-mode element.
pub type ExactElement = Element<BigRational>;
/// Float-mode element.
pub type FloatElement = Element<Complex64>;

impl<C: Scalar> Element<C> {
    pub fn zero(spec: Arc<GroupSpec>) -> Self {
        Element {
            spec,
            terms: IndexMap::new(),
            drop_tolerance: 0.0,
        }
    }

    pub fn identity(spec: Arc<GroupSpec>) -> Self {
        Self::scalar(spec, C::one())
    }

    pub fn scalar(spec: Arc<GroupSpec>, c: C) -> Self {
        let mut e = Self::zero(spec);
        let key = e.spec.identity_key();
        e.push(key, c);
        e
    }

    /// Build from `(word, coefficient)` pairs, combining equal group elements.
    pub fn from_terms<I>(spec: Arc<GroupSpec>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Word, C)>,
    {
        let mut e = Self::zero(spec);
        for (w, c) in terms {
            let key = e.spec.canonical_key(&w)?;
            e.push(key, c);
        }
        e.prune();
        Ok(e)
    }

    /// Only meaningful in float mode. A nonzero tolerance voids upper-bound guarantees.
    pub fn with_drop_tolerance(mut self, tol: f64) -> Self {
        self.drop_tolerance = tol;
        self.prune();
        self
    }

    pub fn drop_tolerance(&self) -> f64 {
        self.drop_tolerance
    }

    pub fn spec(&self) -> &Arc<GroupSpec> {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, key: &CanonicalKey) -> Option<&C> {
        self.terms.get(key)
    }

    pub fn coefficient_of(&self, w: &Word) -> Result<C> {
        let key = self.spec.canonical_key(w)?;
        Ok(self.terms.get(&key).cloned().unwrap_or_else(C::zero))
    }

    pub fn keys(&self) -> impl Iterator<Item = &CanonicalKey> {
        self.terms.keys()
    }

    /// Terms as `(key, representative word, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (&CanonicalKey, Word, &C)> + '_ {
        self.terms
            .iter()
            .map(move |(k, c)| (k, self.spec.representative(k), c))
    }

    fn push(&mut self, key: CanonicalKey, c: C) {
        match self.terms.get_mut(&key) {
            Some(v) => *v = v.clone() + c,
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    fn prune(&mut self) {
        let tol = self.drop_tolerance;
        self.terms.retain(|_, c| !c.negligible(tol));
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.spec.same_group(&other.spec) {
            Ok(())
        } else {
            Err(Error::SpecMismatch(
                self.spec.name().to_string(),
                other.spec.name().to_string(),
            ))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.drop_tolerance = self.drop_tolerance.max(other.drop_tolerance);
        for (k, c) in &other.terms {
            out.push(k.clone(), c.clone());
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-C::one()))
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.spec.clone());
        out.drop_tolerance = self.drop_tolerance;
        for (k, v) in &self.terms {
            out.terms.insert(k.clone(), c.clone() * v.clone());
        }
        out.prune();
        out
    }

    /// Convolution product, in the order `self · other`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.multiply_with_budget(other, DEFAULT_TERM_BUDGET)
    }

    /// Like [`Element::multiply`], failing once the product support exceeds `budget`.
    pub fn multiply_with_budget(&self, other: &Self, budget: usize) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::zero(self.spec.clone());
        out.drop_tolerance = self.drop_tolerance.max(other.drop_tolerance);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let key = self.spec.product_key(ka, kb);
                out.push(key, ca.clone() * cb.clone());
            }
            if out.terms.len() > budget {
                return Err(Error::BudgetExceeded {
                    terms: out.terms.len(),
                    budget,
                });
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.spec.clone());
        out.drop_tolerance = self.drop_tolerance;
        for (k, c) in &self.terms {
            let inv = self.spec.inverse_key(k);
            out.push(inv, c.conj());
        }
        out
    }

    /// The Gram element a*·a.
    pub fn gram(&self) -> Result<Self> {
        self.adjoint().multiply(self)
    }

    /// Von Neumann trace: the coefficient of the identity.
    pub fn trace(&self) -> C {
        self.terms
            .get(&self.spec.identity_key())
            .cloned()
            .unwrap_or_else(C::zero)
    }

    /// Sum of coefficient moduli; dominates the operator norm.
    pub fn one_norm(&self) -> C::Real {
        self.terms
            .values()
            .fold(C::Real::zero(), |acc, c| acc + c.modulus())
    }

    /// tr(self · other) without forming the product.
    pub fn pair_trace(&self, other: &Self) -> Result<C> {
        self.check_same(other)?;
        let mut acc = C::zero();
        for (k, c) in &self.terms {
            let inv = self.spec.inverse_key(k);
            if let Some(d) = other.terms.get(&inv) {
                acc = acc + c.clone() * d.clone();
            }
        }
        Ok(acc)
    }

    /// Trace schedule of the Gram element: values[k] = tr((a*a)^k), k = 0..=n.
    pub fn power_traces(&self, n: usize, budget: usize) -> Result<TraceSchedule<C::Real>> {
        self.gram()?.self_power_traces(n, budget)
    }

    /// values[k] = tr(self^k) for k = 0..=n. Powers are materialized up to
    /// ⌈n/2⌉ and the rest paired from half-powers.
    pub fn self_power_traces(&self, n: usize, budget: usize) -> Result<TraceSchedule<C::Real>> {
        let half = n.div_ceil(2);
        let mut powers = vec![Self::identity(self.spec.clone())];
        for _ in 0..half {
            let next = powers
                .last()
                .expect("nonempty")
                .multiply_with_budget(self, budget)?;
            powers.push(next);
        }
        let values = (0..=n)
            .map(|k| {
                let lo = k / 2;
                let hi = k - lo;
                powers[lo]
                    .pair_trace(&powers[hi])
                    .map(|c| c.real_part())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TraceSchedule { values })
    }
}

impl Element<Complex64> {
    /// Float copy of an exact element.
    pub fn from_exact(e: &Element<BigRational>) -> Self {
        Element {
            spec: e.spec.clone(),
            terms: e
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), c.to_complex()))
                .collect(),
            drop_tolerance: 0.0,
        }
    }
}

impl<C: Scalar> PartialEq for Element<C> {
    /// Equal support and coefficients, independent of term order.
    fn eq(&self, other: &Self) -> bool {
        self.spec.same_group(&other.spec)
            && self.terms.len() == other.terms.len()
            && self
                .terms
                .iter()
                .all(|(k, c)| other.terms.get(k) == Some(c))
    }
}

/// Traces tr((A*A)^k) for k = 0..=N.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceSchedule<R> {
    pub values: Vec<R>,
}

impl<R> TraceSchedule<R> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Highest power covered.
    pub fn order(&self) -> usize {
        self.values.len().saturating_sub(1)
    }
}

impl TraceSchedule<f64> {
    /// Exact rational image of each float value.
    pub fn to_exact(&self) -> TraceSchedule<BigRational> {
        TraceSchedule {
            values: self
                .values
                .iter()
                .map(|&v| BigRational::from_float(v).unwrap_or_else(BigRational::zero))
                .collect(),
        }
    }
}
