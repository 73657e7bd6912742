//! Laurent polynomials and their Mahler measures, the determinant oracle
//! for free abelian groups.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Nodes with |P| below this are left out of the torus average.
pub const SINGULAR_NODE_THRESHOLD: f64 = 1e-13;

/// Sparse Laurent polynomial in `dims` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly {
    dims: usize,
    terms: BTreeMap<Vec<i32>, Complex64>,
}

impl LaurentPoly {
    pub fn new(dims: usize) -> Self {
        LaurentPoly {
            dims: dims.max(1),
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(dims: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i32>, Complex64)>,
    {
        let mut p = LaurentPoly::new(dims);
        for (e, c) in terms {
            p.add_term(e, c)?;
        }
        Ok(p)
    }

    /// Univariate polynomial from coefficients of X^0, X^1, ….
    pub fn univariate(coeffs: &[f64]) -> Self {
        let mut p = LaurentPoly::new(1);
        for (k, &c) in coeffs.iter().enumerate() {
            p.add_term(vec![k as i32], Complex64::new(c, 0.0))
                .expect("dimension matches");
        }
        p
    }

    /// X¹⁰ + X⁹ − X⁷ − X⁶ − X⁵ − X⁴ − X³ + X + 1.
    pub fn lehmer() -> Self {
        Self::univariate(&[1.0, 1.0, 0.0, -1.0, -1.0, -1.0, -1.0, -1.0, 0.0, 1.0, 1.0])
    }

    pub fn add_term(&mut self, exponents: Vec<i32>, c: Complex64) -> Result<()> {
        if exponents.len() != self.dims {
            return Err(Error::InvalidArgument(format!(
                "exponent vector of length {} in a {}-variable polynomial",
                exponents.len(),
                self.dims
            )));
        }
        let zero = Complex64::new(0.0, 0.0);
        let entry = self.terms.entry(exponents.clone()).or_insert(zero);
        *entry += c;
        if *entry == zero {
            self.terms.remove(&exponents);
        }
        Ok(())
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &Complex64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, point: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(point)
                    .fold(*c, |acc, (&k, z)| acc * z.powi(k))
            })
            .sum()
    }

    /// Parse text such as `1+x+y`, `x-2`, `2*x^2*y^-1 - 3i`, or the keyword `lehmer`.
    /// Variables are `x`, `y`, `z`, `w` or `x1`, `x2`, …; `i` is the imaginary unit.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim().eq_ignore_ascii_case("lehmer") {
            return Ok(Self::lehmer());
        }
        Parser::new(text).parse()
    }
}

struct Parser<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
}

type Monomial = (Complex64, BTreeMap<usize, i32>);

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            chars: src.char_indices().peekable(),
            src,
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::PolyParse(format!("{msg} in `{}`", self.src))
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some((_, c)) if c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn parse(mut self) -> Result<LaurentPoly> {
        let mut monomials: Vec<Monomial> = Vec::new();
        self.skip_ws();
        let mut sign = 1.0;
        if let Some(&(_, c)) = self.chars.peek() {
            if c == '-' || c == '+' {
                sign = if c == '-' { -1.0 } else { 1.0 };
                self.chars.next();
            }
        }
        loop {
            let (c, exps) = self.monomial()?;
            monomials.push((c * sign, exps));
            self.skip_ws();
            match self.chars.next() {
                None => break,
                Some((_, '+')) => sign = 1.0,
                Some((_, '-')) => sign = -1.0,
                Some((_, ch)) => return Err(self.err(&format!("unexpected `{ch}`"))),
            }
        }
        let dims = monomials
            .iter()
            .flat_map(|(_, e)| e.keys().copied())
            .max()
            .unwrap_or(1);
        let mut p = LaurentPoly::new(dims);
        for (c, e) in monomials {
            let mut v = vec![0; dims];
            for (var, k) in e {
                v[var - 1] = k;
            }
            p.add_term(v, c)?;
        }
        Ok(p)
    }

    fn monomial(&mut self) -> Result<Monomial> {
        let mut coeff = Complex64::new(1.0, 0.0);
        let mut exps: BTreeMap<usize, i32> = BTreeMap::new();
        let mut factors = 0;
        loop {
            self.skip_ws();
            match self.chars.peek().copied() {
                Some((_, c)) if c.is_ascii_digit() || c == '.' => {
                    coeff *= self.number()?;
                }
                Some((_, 'i')) => {
                    self.chars.next();
                    coeff *= Complex64::new(0.0, 1.0);
                }
                Some((_, c)) if c.is_ascii_alphabetic() => {
                    let var = self.variable()?;
                    let k = self.exponent()?;
                    *exps.entry(var).or_insert(0) += k;
                }
                _ => {
                    if factors == 0 {
                        return Err(self.err("expected a term"));
                    }
                    break;
                }
            }
            factors += 1;
            self.skip_ws();
            if let Some(&(_, '*')) = self.chars.peek() {
                self.chars.next();
            }
        }
        Ok((coeff, exps))
    }

    fn number(&mut self) -> Result<Complex64> {
        let mut s = String::new();
        while let Some(&(_, c)) = self.chars.peek() {
            if c.is_ascii_digit() || c == '.' || c == 'e' && !s.is_empty() {
                s.push(c);
                self.chars.next();
            } else {
                break;
            }
        }
        s.parse::<f64>()
            .map(|v| Complex64::new(v, 0.0))
            .map_err(|_| self.err(&format!("bad number `{s}`")))
    }

    fn variable(&mut self) -> Result<usize> {
        let (_, c) = self.chars.next().expect("peeked");
        let base = match c.to_ascii_lowercase() {
            'x' => 1,
            'y' => 2,
            'z' => 3,
            'w' => 4,
            other => return Err(self.err(&format!("unknown variable `{other}`"))),
        };
        let mut digits = String::new();
        while let Some(&(_, d)) = self.chars.peek() {
            if d.is_ascii_digit() {
                digits.push(d);
                self.chars.next();
            } else {
                break;
            }
        }
        if digits.is_empty() {
            return Ok(base);
        }
        if base != 1 {
            return Err(self.err("indexed variables are written x1, x2, …"));
        }
        match digits.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(k),
            _ => Err(self.err("variable index must be ≥ 1")),
        }
    }

    fn exponent(&mut self) -> Result<i32> {
        self.skip_ws();
        if !matches!(self.chars.peek(), Some((_, '^'))) {
            return Ok(1);
        }
        self.chars.next();
        self.skip_ws();
        let paren = matches!(self.chars.peek(), Some((_, '(')));
        if paren {
            self.chars.next();
        }
        let mut s = String::new();
        while let Some(&(_, c)) = self.chars.peek() {
            if c.is_ascii_digit() || (s.is_empty() && (c == '-' || c == '+')) {
                s.push(c);
                self.chars.next();
            } else {
                break;
            }
        }
        if paren {
            match self.chars.next() {
                Some((_, ')')) => {}
                _ => return Err(self.err("missing `)`")),
            }
        }
        s.parse::<i32>()
            .map_err(|_| self.err(&format!("bad exponent `{s}`")))
    }
}

/// Roots of Σ coeffs[k] X^k (leading coefficient nonzero), via eigenvalues
/// of the companion matrix and one Newton step per root. When the Schur
/// iteration stalls (cyclic companion matrices), the roots of p(y + s) are
/// computed instead for a few fixed complex shifts s.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let shifts = [
        Complex64::new(0.0, 0.0),
        Complex64::from_polar(0.1, 0.7),
        Complex64::from_polar(0.37, 2.1),
    ];
    let eig = shifts
        .iter()
        .find_map(|&s| {
            companion_eigenvalues(&taylor_shift(coeffs, s)).map(|e| e.into_iter().map(|z| z + s).collect::<Vec<_>>())
        })
        .ok_or(Error::RootFinding)?;
    let polish = |z: Complex64| {
        let (mut p, mut dp) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for c in coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        if dp.norm() > 0.0 {
            let next = z - p / dp;
            if next.is_finite() {
                return next;
            }
        }
        z
    };
    let roots: Vec<Complex64> = eig.iter().map(|&z| polish(z)).collect();
    if roots.iter().any(|z| !z.is_finite()) {
        return Err(Error::RootFinding);
    }
    Ok(roots)
}

/// Coefficients of p(y + s).
fn taylor_shift(coeffs: &[Complex64], s: Complex64) -> Vec<Complex64> {
    let mut c = coeffs.to_vec();
    if s == Complex64::new(0.0, 0.0) {
        return c;
    }
    let n = c.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let next = c[j + 1];
            c[j] += s * next;
        }
    }
    c
}

fn companion_eigenvalues(coeffs: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let mut companion = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        companion[(i, n - 1)] = -coeffs[i] / lead;
    }
    let eig = companion.try_schur(f64::EPSILON, 10_000)?.eigenvalues()?;
    Some(eig.iter().copied().collect())
}

/// Mahler measure of a univariate Laurent polynomial, |C|·∏ max(1, |α_j|).
pub fn mahler_1d(p: &LaurentPoly) -> Result<f64> {
    if p.dims() != 1 {
        return Err(Error::InvalidArgument(format!(
            "univariate Mahler measure of a {}-variable polynomial",
            p.dims()
        )));
    }
    if p.is_zero() {
        return Err(Error::InvalidArgument("zero polynomial".into()));
    }
    let lo = p.terms.keys().map(|e| e[0]).min().expect("nonzero");
    let hi = p.terms.keys().map(|e| e[0]).max().expect("nonzero");
    let mut coeffs = vec![Complex64::new(0.0, 0.0); (hi - lo) as usize + 1];
    for (e, c) in &p.terms {
        coeffs[(e[0] - lo) as usize] = *c;
    }
    let lead = coeffs[coeffs.len() - 1].norm();
    let roots = polynomial_roots(&coeffs)?;
    Ok(roots.iter().fold(lead, |acc, z| acc * z.norm().max(1.0)))
}

/// exp of the average of ln|P| over a uniform `grid`^d torus grid. Nodes sit
/// at the midpoints θ = 2π(j + ½)/grid, so low-order roots of unity are
/// never sampled exactly.
pub fn mahler_nd(p: &LaurentPoly, grid: usize) -> Result<f64> {
    if grid < 8 {
        return Err(Error::InvalidArgument(format!("grid {grid} < 8")));
    }
    if p.is_zero() {
        return Err(Error::InvalidArgument("zero polynomial".into()));
    }
    let dims = p.dims();
    let g2 = 2 * grid as i64;
    let unit: Vec<Complex64> = (0..2 * grid)
        .map(|k| Complex64::from_polar(1.0, PI * k as f64 / grid as f64))
        .collect();
    let terms: Vec<(Vec<i64>, Complex64)> = p
        .terms
        .iter()
        .map(|(e, c)| (e.iter().map(|&k| k as i64).collect(), *c))
        .collect();
    let inner: usize = grid.pow(dims as u32 - 1);

    // one row per value of the first angle; reduced in row order
    let rows: Vec<(f64, u64)> = (0..grid)
        .into_par_iter()
        .map(|j0| {
            let mut idx = vec![0i64; dims];
            idx[0] = j0 as i64;
            let mut sum = 0.0;
            let mut count = 0u64;
            for _ in 0..inner {
                let mut v = Complex64::new(0.0, 0.0);
                for (e, c) in &terms {
                    let phase = e
                        .iter()
                        .zip(&idx)
                        .map(|(k, j)| k * (2 * j + 1))
                        .sum::<i64>()
                        .rem_euclid(g2);
                    v += c * unit[phase as usize];
                }
                let m = v.norm();
                if m >= SINGULAR_NODE_THRESHOLD {
                    sum += m.ln();
                    count += 1;
                }
                for d in (1..dims).rev() {
                    idx[d] += 1;
                    if idx[d] < grid as i64 {
                        break;
                    }
                    idx[d] = 0;
                }
            }
            (sum, count)
        })
        .collect();
    let (sum, count) = rows
        .iter()
        .fold((0.0, 0u64), |(s, n), (rs, rn)| (s + rs, n + rn));
    if count == 0 {
        return Err(Error::AllNodesSingular);
    }
    Ok((sum / count as f64).exp())
}
