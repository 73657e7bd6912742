//! Named operators and manifold data: the free families, the two
//! figure-eight knot operators, the Whitehead link relator, and the
//! volume table behind the Lehmer-bound report.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::algebra::{Element, Scalar};
use crate::determinant::lehmer_vol_bound;
use crate::error::{Error, Result};
use crate::words::{load_representation, GroupSpec, Word};

pub const FIG8_WIRTINGER_REP: &str = include_str!("../data/fig8_wirtinger.rep");
pub const FIG8_TWIST_REP: &str = include_str!("../data/fig8_twist.rep");
pub const MANIFOLDS_TSV: &str = include_str!("../data/manifolds.tsv");

/// Mahler measure of Lehmer's polynomial.
pub const LEHMER_MAHLER: f64 = 1.176_280_818_259_917;

const UNIT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum OperatorParams {
    Free { d: usize, zeta: Vec<Complex64> },
    Symmetric { d: usize, zeta: Vec<Complex64>, xi: Vec<Complex64> },
    Fig8Wirtinger { t: BigRational },
    Fig8Twist { t: BigRational },
}

#[derive(Clone, Debug)]
pub struct NamedOperator<C: Scalar> {
    pub name: String,
    pub params: OperatorParams,
    pub spec: Arc<GroupSpec>,
    pub element: Element<C>,
    /// one_norm(det_element())⁻².
    pub certified_lambda: BigRational,
    /// λ used for the published figures, when there is one.
    pub published_lambda: Option<BigRational>,
    /// The determinant is taken of `det_scale · element`.
    pub det_scale: BigRational,
    /// Factor applied to determinant estimates before reporting.
    pub output_factor: f64,
}

impl<C: Scalar> NamedOperator<C> {
    pub fn det_element(&self) -> Element<C> {
        if self.det_scale.is_one() {
            self.element.clone()
        } else {
            self.element.scale(&C::from_rational(&self.det_scale))
        }
    }
}

fn check_unit<C: Scalar>(values: &[C], what: &str) -> Result<()> {
    for (i, z) in values.iter().enumerate() {
        let m = z.to_complex().norm();
        if (m - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "{what}[{i}] has modulus {m}, expected 1"
            )));
        }
    }
    Ok(())
}

fn safe_lambda(norm: &BigRational) -> BigRational {
    (norm * norm).recip()
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Id + ζ₁R_{x₁} + … + ζ_{d−1}R_{x_{d−1}} over F_{d−1}.
pub fn free_operator<C: Scalar>(d: usize, zeta: &[C]) -> Result<NamedOperator<C>> {
    if d < 3 {
        return Err(Error::InvalidArgument(format!("free operator needs d ≥ 3, got {d}")));
    }
    if zeta.len() != d - 1 {
        return Err(Error::InvalidArgument(format!(
            "expected {} coefficients, got {}",
            d - 1,
            zeta.len()
        )));
    }
    check_unit(zeta, "ζ")?;
    let spec = Arc::new(GroupSpec::free(d - 1));
    let terms = std::iter::once((Word::empty(), C::one()))
        .chain(zeta.iter().enumerate().map(|(i, z)| (Word::generator(i + 1), z.clone())));
    let element = Element::from_terms(spec.clone(), terms)?;
    Ok(NamedOperator {
        name: format!("free-d{d}"),
        params: OperatorParams::Free {
            d,
            zeta: zeta.iter().map(Scalar::to_complex).collect(),
        },
        spec,
        element,
        certified_lambda: rat((d * d) as i64).recip(),
        published_lambda: None,
        det_scale: BigRational::one(),
        output_factor: 1.0,
    })
}

/// The free operator with all ζ = 1, over ℚ.
pub fn free_operator_exact(d: usize) -> Result<NamedOperator<BigRational>> {
    free_operator(d, &vec![BigRational::one(); d.saturating_sub(1)])
}

/// Σ ζ_i R_{x_i} + ξ_i R_{x_i⁻¹} over F_d.
pub fn symmetric_operator<C: Scalar>(d: usize, zeta: &[C], xi: &[C]) -> Result<NamedOperator<C>> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("symmetric operator needs d ≥ 2, got {d}")));
    }
    if zeta.len() != d || xi.len() != d {
        return Err(Error::InvalidArgument(format!(
            "expected {d} coefficients each, got {} and {}",
            zeta.len(),
            xi.len()
        )));
    }
    check_unit(zeta, "ζ")?;
    check_unit(xi, "ξ")?;
    let spec = Arc::new(GroupSpec::free(d));
    let terms = (0..d).flat_map(|i| {
        let g = Word::generator(i + 1);
        [(g.invert(), xi[i].clone()), (g, zeta[i].clone())]
    });
    let element = Element::from_terms(spec.clone(), terms)?;
    Ok(NamedOperator {
        name: format!("symmetric-d{d}"),
        params: OperatorParams::Symmetric {
            d,
            zeta: zeta.iter().map(Scalar::to_complex).collect(),
            xi: xi.iter().map(Scalar::to_complex).collect(),
        },
        spec,
        element,
        certified_lambda: rat((4 * d * d) as i64).recip(),
        published_lambda: None,
        det_scale: BigRational::one(),
        output_factor: 1.0,
    })
}

pub fn symmetric_operator_exact(d: usize) -> Result<NamedOperator<BigRational>> {
    let ones = vec![BigRational::one(); d];
    symmetric_operator(d, &ones, &ones)
}

/// ⟨x, y | xyx⁻¹yx = yxy⁻¹xy⟩ with its bundled representation.
pub fn wirtinger_group() -> Result<Arc<GroupSpec>> {
    Ok(Arc::new(load_representation(FIG8_WIRTINGER_REP)?))
}

/// ⟨a₁, α | [a₁,α][a₁⁻¹,α] = α⟩ with its bundled representation.
pub fn twist_group() -> Result<Arc<GroupSpec>> {
    Ok(Arc::new(load_representation(FIG8_TWIST_REP)?))
}

fn check_t(t: &BigRational) -> Result<()> {
    if !t.is_positive() {
        return Err(Error::InvalidArgument(format!("t must be positive, got {t}")));
    }
    Ok(())
}

fn w(s: &[i32]) -> Word {
    Word::from_signed(s).expect("nonzero letters")
}

/// A_t = Id − tR_y − tR_{xyx⁻¹} − tR_{yxy⁻¹} + t²R_{xyx⁻¹y}.
pub fn fig8_wirtinger<C: Scalar>(t: &BigRational, spec: Arc<GroupSpec>) -> Result<NamedOperator<C>> {
    check_t(t)?;
    if spec.rank() != 2 {
        return Err(Error::InvalidArgument("figure-eight group has two generators".into()));
    }
    let neg_t = C::from_rational(&-t.clone());
    let t2 = C::from_rational(&(t * t));
    let element = Element::from_terms(
        spec.clone(),
        [
            (Word::empty(), C::one()),
            (w(&[2]), neg_t.clone()),
            (w(&[1, 2, -1]), neg_t.clone()),
            (w(&[2, 1, -2]), neg_t),
            (w(&[1, 2, -1, 2]), t2),
        ],
    )?;
    let norm = rat(1) + rat(3) * t + t * t;
    Ok(NamedOperator {
        name: "fig8-wirtinger".into(),
        params: OperatorParams::Fig8Wirtinger { t: t.clone() },
        spec,
        element,
        certified_lambda: safe_lambda(&norm),
        published_lambda: Some(norm.recip()),
        det_scale: BigRational::one(),
        output_factor: 1.0,
    })
}

/// A′_t = Id − R_{a₁αa₁⁻¹} − (1/t)R_{[a₁,α]a₁⁻¹} + (1/t)R_{[a₁,α]a₁⁻¹α}.
/// Estimates are taken of t·A′_t and reported times max(1, t).
pub fn fig8_twist<C: Scalar>(t: &BigRational, spec: Arc<GroupSpec>) -> Result<NamedOperator<C>> {
    check_t(t)?;
    if spec.rank() != 2 {
        return Err(Error::InvalidArgument("twist presentation has two generators".into()));
    }
    let inv_t = t.recip();
    let element = Element::from_terms(
        spec.clone(),
        [
            (Word::empty(), C::one()),
            (w(&[1, 2, -1]), -C::one()),
            (w(&[1, 2, -1, -2, -1]), C::from_rational(&-inv_t.clone())),
            (w(&[1, 2, -1, -2, -1, 2]), C::from_rational(&inv_t)),
        ],
    )?;
    let scaled_norm = rat(2) * t + rat(2);
    let factor = t.to_f64().unwrap_or(f64::NAN).max(1.0);
    Ok(NamedOperator {
        name: "fig8-twist".into(),
        params: OperatorParams::Fig8Twist { t: t.clone() },
        spec,
        element,
        certified_lambda: safe_lambda(&scaled_norm),
        published_lambda: Some(scaled_norm.recip()),
        det_scale: t.clone(),
        output_factor: factor,
    })
}

/// Exact-mode A_t for rational t on the bundled representation.
pub fn fig8_wirtinger_exact(t: &BigRational) -> Result<NamedOperator<BigRational>> {
    fig8_wirtinger(t, wirtinger_group()?)
}

pub fn fig8_twist_exact(t: &BigRational) -> Result<NamedOperator<BigRational>> {
    fig8_twist(t, twist_group()?)
}

/// Cyclic reduction of [a,[a,b][a,b⁻¹]] with [g,h] = ghg⁻¹h⁻¹.
pub fn whitehead_relator() -> Word {
    let a = Word::generator(1);
    let b = Word::generator(2);
    let comm = |g: &Word, h: &Word| g.concat(h).concat(&g.invert()).concat(&h.invert());
    let inner = comm(&a, &b).concat(&comm(&a, &b.invert()));
    comm(&a, &inner).cyclically_reduce()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldEntry {
    pub name: String,
    pub volume: f64,
    /// Decimal places used when printing the volume bound.
    pub digits: usize,
    pub generators: Vec<String>,
    pub relators: Vec<String>,
    pub note: String,
}

fn parse_manifolds(text: &str) -> Result<Vec<ManifoldEntry>> {
    let bad = |line: usize, msg: &str| Error::InvalidArgument(format!("manifolds line {line}: {msg}"));
    text.lines()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 6 {
                return Err(bad(i + 1, "expected 6 columns"));
            }
            let volume: f64 = f[1].parse().map_err(|_| bad(i + 1, "bad volume"))?;
            if !(volume > 0.0) {
                return Err(bad(i + 1, "volume must be positive"));
            }
            let digits = f[2].parse().map_err(|_| bad(i + 1, "bad digits"))?;
            let list = |s: &str, sep: char| -> Vec<String> {
                if s == "-" {
                    Vec::new()
                } else {
                    s.split(sep).map(|x| x.trim().to_string()).collect()
                }
            };
            Ok(ManifoldEntry {
                name: f[0].to_string(),
                volume,
                digits,
                generators: list(f[3], ','),
                relators: list(f[4], ';'),
                note: f[5].to_string(),
            })
        })
        .collect()
}

pub fn manifold_table() -> Vec<ManifoldEntry> {
    parse_manifolds(MANIFOLDS_TSV).expect("bundled manifold table is well formed")
}

/// Truncate (not round) to `digits` decimals.
pub fn truncate_decimals(x: f64, digits: usize) -> String {
    let scale = 10f64.powi(digits as i32);
    let v = (x * scale + 1e-9).floor() / scale;
    format!("{v:.digits$}")
}

#[derive(Clone, Debug, PartialEq)]
pub struct LehmerRow {
    pub name: String,
    pub volume: f64,
    pub bound: f64,
    pub printed: String,
    pub beats_generic: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LehmerReport {
    pub rows: Vec<LehmerRow>,
    pub generic_bound: f64,
    pub lehmer: f64,
}

impl LehmerReport {
    pub fn row(&self, name: &str) -> Option<&LehmerRow> {
        self.rows.iter().find(|r| r.name == name)
    }
}

impl fmt::Display for LehmerReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<16} {:>14} {:>12}  beats 2/√3", "manifold", "volume", "exp(vol/6π)")?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<16} {:>14} {:>12}  {}",
                r.name,
                r.volume,
                r.printed,
                if r.beats_generic { "yes" } else { "no" }
            )?;
        }
        write!(
            f,
            "generic free-group bound 2/√3 = {} < M(L) = {}",
            truncate_decimals(self.generic_bound, 4),
            truncate_decimals(self.lehmer, 5)
        )
    }
}

pub fn lehmer_report() -> LehmerReport {
    let generic = 2.0 / 3f64.sqrt();
    let rows = manifold_table()
        .into_iter()
        .map(|m| {
            let bound = lehmer_vol_bound(m.volume).expect("positive volume");
            LehmerRow {
                printed: truncate_decimals(bound, m.digits),
                beats_generic: bound < generic,
                name: m.name,
                volume: m.volume,
                bound,
            }
        })
        .collect();
    LehmerReport {
        rows,
        generic_bound: generic,
        lehmer: LEHMER_MAHLER,
    }
}

/// Exact one-norm for the figure-eight families, for cross-checks.
pub fn documented_one_norm(params: &OperatorParams) -> Option<BigRational> {
    match params {
        OperatorParams::Free { d, .. } => Some(rat(*d as i64)),
        OperatorParams::Symmetric { d, .. } => Some(rat(2 * *d as i64)),
        OperatorParams::Fig8Wirtinger { t } => Some(rat(1) + rat(3) * t + t * t),
        OperatorParams::Fig8Twist { t } => Some(rat(2) + rat(2) * t.recip()),
    }
}

/// Float-mode free operator built from complex ζ.
pub fn free_operator_complex(d: usize, zeta: &[Complex64]) -> Result<NamedOperator<Complex64>> {
    free_operator(d, zeta)
}
