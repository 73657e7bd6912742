//! Group elements as words in signed generators, with word-problem solvers
//! for free groups, free abelian groups and groups given by a faithful
//! 2×2 complex representation.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::path::Path;

use num_complex::Complex64;
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Default identity tolerance for matrix word problems.
pub const DEFAULT_EPSILON_ID: f64 = 1e-8;

/// A generator or its inverse, stored as a nonzero signed 1-based index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(i32);

impl Letter {
    /// `generator` is 1-based.
    pub fn new(generator: usize, inverse: bool) -> Self {
        assert!(generator >= 1, "generators are 1-based");
        let g = generator as i32;
        Letter(if inverse { -g } else { g })
    }

    pub fn from_signed(value: i32) -> Result<Self> {
        if value == 0 {
            return Err(Error::InvalidArgument("letter index 0".into()));
        }
        Ok(Letter(value))
    }

    pub fn generator(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn sign(self) -> i32 {
        self.0.signum()
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }

    pub fn signed(self) -> i32 {
        self.0
    }
}

type Letters = SmallVec<[Letter; 16]>;

/// A finite product of letters. The `reduced` flag records that no adjacent
/// pair of mutually inverse letters occurs.
#[derive(Clone, Default)]
pub struct Word {
    letters: Letters,
    reduced: bool,
}

impl Word {
    pub fn empty() -> Self {
        Word {
            letters: Letters::new(),
            reduced: true,
        }
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let letters: Letters = letters.into_iter().collect();
        let reduced = letters.is_empty();
        Word { letters, reduced }
    }

    /// Build from signed 1-based indices, e.g. `[1, 2, -1]` for x y x⁻¹.
    pub fn from_signed(indices: &[i32]) -> Result<Self> {
        let letters = indices
            .iter()
            .map(|&i| Letter::from_signed(i))
            .collect::<Result<Letters>>()?;
        let reduced = letters.is_empty();
        Ok(Word { letters, reduced })
    }

    pub fn generator(index: usize) -> Self {
        Word {
            letters: smallvec::smallvec![Letter::new(index, false)],
            reduced: true,
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn to_signed(&self) -> Vec<i32> {
        self.letters.iter().map(|l| l.signed()).collect()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn max_generator(&self) -> usize {
        self.letters.iter().map(|l| l.generator()).max().unwrap_or(0)
    }

    /// Free reduction by a single left-to-right stack pass.
    pub fn reduce_free(&self) -> Word {
        if self.reduced {
            return self.clone();
        }
        let mut out = Letters::with_capacity(self.letters.len());
        for &l in &self.letters {
            match out.last() {
                Some(&top) if top == l.inverse() => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        Word {
            letters: out,
            reduced: true,
        }
    }

    pub fn invert(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
            reduced: self.reduced,
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Letters::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.letters);
        letters.extend_from_slice(&other.letters);
        let reduced = letters.is_empty();
        Word { letters, reduced }
    }

    /// Concatenate and freely reduce at the junction only; both inputs must be reduced.
    pub fn concat_reduced(&self, other: &Word) -> Word {
        debug_assert!(self.reduced && other.reduced);
        let a = &self.letters;
        let b = &other.letters;
        let mut cancel = 0;
        while cancel < a.len() && cancel < b.len() && a[a.len() - 1 - cancel] == b[cancel].inverse()
        {
            cancel += 1;
        }
        let mut letters = Letters::with_capacity(a.len() + b.len() - 2 * cancel);
        letters.extend_from_slice(&a[..a.len() - cancel]);
        letters.extend_from_slice(&b[cancel..]);
        Word {
            letters,
            reduced: true,
        }
    }

    /// Free reduction followed by removal of mutually inverse first/last letters.
    pub fn cyclically_reduce(&self) -> Word {
        let r = self.reduce_free();
        let n = r.letters.len();
        let mut k = 0;
        while 2 * k + 1 < n && r.letters[k] == r.letters[n - 1 - k].inverse() {
            k += 1;
        }
        Word {
            letters: r.letters[k..n - k].iter().copied().collect(),
            reduced: true,
        }
    }

    /// Signed exponent sum of each generator.
    pub fn abelianize(&self, rank: usize) -> Result<Vec<i64>> {
        let mut out = vec![0i64; rank];
        for l in &self.letters {
            let g = l.generator();
            if g > rank {
                return Err(Error::GeneratorOutOfRange { index: g, rank });
            }
            out[g - 1] += l.sign() as i64;
        }
        Ok(out)
    }

    /// The word x₁^{e₁} x₂^{e₂} ⋯ for an exponent vector.
    pub fn from_exponents(exponents: &[i64]) -> Word {
        let mut letters = Letters::new();
        for (i, &e) in exponents.iter().enumerate() {
            let l = Letter::new(i + 1, e < 0);
            for _ in 0..e.unsigned_abs() {
                letters.push(l);
            }
        }
        Word {
            letters,
            reduced: true,
        }
    }
}

impl PartialEq for Word {
    fn eq(&self, other: &Self) -> bool {
        self.letters == other.letters
    }
}

impl Eq for Word {}

impl Hash for Word {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.letters.hash(state);
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl Word {
    /// Space-separated letters using the given generator names, e.g. "a b^-1".
    pub fn to_string_with(&self, names: &[&str]) -> String {
        if self.letters.is_empty() {
            return "e".into();
        }
        self.letters
            .iter()
            .map(|l| {
                let base = names
                    .get(l.generator() - 1)
                    .map(|s| s.to_string())
                    .unwrap_or_else(|| format!("x{}", l.generator()));
                if l.is_inverse() {
                    format!("{base}^-1")
                } else {
                    base
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "x{}", l.generator())?;
            if l.is_inverse() {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}

/// A 2×2 complex matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mat2 {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Mat2::new(one, zero, zero, one)
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.norm() == 0.0 || !det.is_finite() {
            return None;
        }
        let r = det.inv();
        Some(Mat2::new(self.d * r, -self.b * r, -self.c * r, self.a * r))
    }

    pub fn neg(&self) -> Self {
        Mat2::new(-self.a, -self.b, -self.c, -self.d)
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of the difference.
    pub fn distance(&self, other: &Mat2) -> f64 {
        self.entries()
            .iter()
            .zip(other.entries().iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

/// Term-combination key of a group element under a [`GroupSpec`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CanonicalKey {
    /// Freely reduced word.
    Reduced(Word),
    /// Exponent vector.
    Exponents(SmallVec<[i64; 4]>),
    /// Index into the group's table of distinct matrices.
    Element(u32),
}

type BucketKey = (i32, [i64; 8]);

/// Bucketed table of distinct group elements, keyed by rounded matrix entries.
#[derive(Default)]
struct ElementTable {
    buckets: HashMap<BucketKey, SmallVec<[u32; 2]>>,
    representatives: Vec<Word>,
    matrices: Vec<Mat2>,
    products: HashMap<(u32, u32), u32>,
    inverses: HashMap<u32, u32>,
}

/// A group realised by a faithful representation into GL(2, ℂ), up to sign
/// when `projective` is set.
pub struct MatrixRep {
    rank: usize,
    generators: Vec<Mat2>,
    inverses: Vec<Mat2>,
    epsilon_id: f64,
    relators: Vec<Word>,
    projective: bool,
    digits: i32,
    table: RwLock<ElementTable>,
}

impl MatrixRep {
    pub fn new(
        generators: Vec<Mat2>,
        epsilon_id: f64,
        relators: Vec<Word>,
        projective: bool,
    ) -> Result<Self> {
        if !(epsilon_id >= 0.0) {
            return Err(Error::InvalidArgument("epsilon_id must be nonnegative".into()));
        }
        let inverses = generators
            .iter()
            .enumerate()
            .map(|(i, g)| g.inverse().ok_or(Error::SingularGenerator(i + 1)))
            .collect::<Result<Vec<_>>>()?;
        let digits = ((-epsilon_id.log10()).ceil() as i32 - 1).max(0);
        let rep = MatrixRep {
            rank: generators.len(),
            generators,
            inverses,
            epsilon_id,
            relators,
            projective,
            digits,
            table: RwLock::new(ElementTable::default()),
        };
        rep.insert_or_get(Mat2::identity(), Word::empty);
        Ok(rep)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[Mat2] {
        &self.generators
    }

    pub fn epsilon_id(&self) -> f64 {
        self.epsilon_id
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn projective(&self) -> bool {
        self.projective
    }

    /// Number of distinct elements seen so far.
    pub fn table_len(&self) -> usize {
        self.table.read().matrices.len()
    }

    fn tolerance(&self, m: &Mat2) -> f64 {
        self.epsilon_id * m.max_abs().max(1.0)
    }

    fn same_element(&self, m: &Mat2, other: &Mat2) -> bool {
        let tol = self.tolerance(m);
        m.distance(other) < tol || (self.projective && m.neg().distance(other) < tol)
    }

    /// Distance from ±Id (± only when projective).
    pub fn identity_distance(&self, m: &Mat2) -> f64 {
        let id = Mat2::identity();
        let d = m.distance(&id);
        if self.projective {
            d.min(m.distance(&id.neg()))
        } else {
            d
        }
    }

    fn scale_exponent(scale: f64) -> i32 {
        scale.max(1.0).log2().ceil() as i32
    }

    fn primary_key(&self, m: &Mat2) -> BucketKey {
        let e = Self::scale_exponent(m.max_abs());
        let q = self.quantum(e);
        let mut key = [0i64; 8];
        for (i, z) in m.entries().iter().enumerate() {
            key[2 * i] = (z.re / q).round() as i64;
            key[2 * i + 1] = (z.im / q).round() as i64;
        }
        (e, key)
    }

    fn quantum(&self, exponent: i32) -> f64 {
        2f64.powi(exponent) * 10f64.powi(-self.digits)
    }

    /// All bucket keys a matrix within tolerance of `m` could have been filed under.
    fn probe_keys(&self, m: &Mat2) -> Vec<BucketKey> {
        let scale = m.max_abs();
        let tol = self.tolerance(m);
        let mut exps = vec![Self::scale_exponent(scale - 2.0 * tol)];
        let hi = Self::scale_exponent(scale + 2.0 * tol);
        if hi != exps[0] {
            exps.push(hi);
        }
        let coords: Vec<f64> = m.entries().iter().flat_map(|z| [z.re, z.im]).collect();
        let mut keys = Vec::new();
        for e in exps {
            let q = self.quantum(e);
            let margin = 2.0 * tol / q;
            let mut base = [0i64; 8];
            let mut alternates: SmallVec<[(usize, i64); 8]> = SmallVec::new();
            for (i, &v) in coords.iter().enumerate() {
                let r = v / q;
                let b = r.round();
                base[i] = b as i64;
                let frac = r - b;
                if frac.abs() > 0.5 - margin {
                    alternates.push((i, if frac > 0.0 { 1 } else { -1 }));
                }
            }
            for mask in 0u32..(1u32 << alternates.len()) {
                let mut k = base;
                for (bit, &(i, step)) in alternates.iter().enumerate() {
                    if mask & (1 << bit) != 0 {
                        k[i] += step;
                    }
                }
                keys.push((e, k));
            }
        }
        keys
    }

    fn find_in(&self, table: &ElementTable, m: &Mat2) -> Option<u32> {
        let mut candidates = vec![*m];
        if self.projective {
            candidates.push(m.neg());
        }
        for cand in &candidates {
            for key in self.probe_keys(cand) {
                if let Some(ids) = table.buckets.get(&key) {
                    for &id in ids {
                        if self.same_element(m, &table.matrices[id as usize]) {
                            return Some(id);
                        }
                    }
                }
            }
        }
        None
    }

    fn find(&self, m: &Mat2) -> Option<u32> {
        self.find_in(&self.table.read(), m)
    }

    /// First writer wins: the returned id keeps its first representative.
    fn insert_or_get(&self, m: Mat2, representative: impl FnOnce() -> Word) -> u32 {
        if let Some(id) = self.find(&m) {
            return id;
        }
        let mut table = self.table.write();
        if let Some(id) = self.find_in(&table, &m) {
            return id;
        }
        let id = table.matrices.len() as u32;
        let key = self.primary_key(&m);
        table.buckets.entry(key).or_default().push(id);
        table.matrices.push(m);
        table.representatives.push(representative());
        id
    }

    fn representative(&self, id: u32) -> Word {
        self.table.read().representatives[id as usize].clone()
    }

    fn matrix(&self, id: u32) -> Mat2 {
        self.table.read().matrices[id as usize]
    }

    pub fn matrix_of(&self, w: &Word) -> Result<Mat2> {
        let mut m = Mat2::identity();
        for l in w.letters() {
            let g = l.generator();
            if g > self.rank {
                return Err(Error::GeneratorOutOfRange {
                    index: g,
                    rank: self.rank,
                });
            }
            m = m * if l.is_inverse() {
                self.inverses[g - 1]
            } else {
                self.generators[g - 1]
            };
        }
        Ok(m)
    }

    fn key_of_word(&self, w: &Word) -> Result<u32> {
        let m = self.matrix_of(w)?;
        Ok(self.insert_or_get(m, || w.reduce_free()))
    }

    fn product(&self, x: u32, y: u32) -> u32 {
        if let Some(&id) = self.table.read().products.get(&(x, y)) {
            return id;
        }
        let (mx, my, wx, wy) = {
            let t = self.table.read();
            (
                t.matrices[x as usize],
                t.matrices[y as usize],
                t.representatives[x as usize].clone(),
                t.representatives[y as usize].clone(),
            )
        };
        let id = self.insert_or_get(mx * my, || wx.concat_reduced(&wy));
        self.table.write().products.insert((x, y), id);
        id
    }

    fn inverse_id(&self, x: u32) -> u32 {
        if let Some(&id) = self.table.read().inverses.get(&x) {
            return id;
        }
        let (m, w) = {
            let t = self.table.read();
            (t.matrices[x as usize], t.representatives[x as usize].clone())
        };
        let inv = m.inverse().expect("group elements are invertible");
        let id = self.insert_or_get(inv, || w.invert());
        let mut t = self.table.write();
        t.inverses.insert(x, id);
        t.inverses.insert(id, x);
        id
    }
}

impl fmt::Debug for MatrixRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixRep")
            .field("rank", &self.rank)
            .field("generators", &self.generators)
            .field("epsilon_id", &self.epsilon_id)
            .field("relators", &self.relators)
            .field("projective", &self.projective)
            .finish()
    }
}

#[derive(Debug)]
pub enum GroupKind {
    Free { rank: usize },
    FreeAbelian { rank: usize },
    MatrixRep(MatrixRep),
}

/// A group together with the strategy used to solve its word problem.
#[derive(Debug)]
pub struct GroupSpec {
    name: String,
    kind: GroupKind,
}

impl GroupSpec {
    pub fn free(rank: usize) -> Self {
        GroupSpec {
            name: format!("F{rank}"),
            kind: GroupKind::Free { rank },
        }
    }

    pub fn free_abelian(rank: usize) -> Self {
        GroupSpec {
            name: format!("Z^{rank}"),
            kind: GroupKind::FreeAbelian { rank },
        }
    }

    /// Validates that every relator evaluates to the identity.
    pub fn matrix_rep(name: impl Into<String>, rep: MatrixRep) -> Result<Self> {
        let name = name.into();
        for (i, r) in rep.relators.iter().enumerate() {
            let m = rep.matrix_of(r)?;
            let distance = rep.identity_distance(&m);
            if !(distance < rep.epsilon_id) {
                return Err(Error::RelatorCheck {
                    name,
                    index: i,
                    distance,
                });
            }
        }
        Ok(GroupSpec {
            name,
            kind: GroupKind::MatrixRep(rep),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn rank(&self) -> usize {
        match &self.kind {
            GroupKind::Free { rank } | GroupKind::FreeAbelian { rank } => *rank,
            GroupKind::MatrixRep(rep) => rep.rank,
        }
    }

    pub fn matrix_rep_ref(&self) -> Option<&MatrixRep> {
        match &self.kind {
            GroupKind::MatrixRep(rep) => Some(rep),
            _ => None,
        }
    }

    /// Two specs are interchangeable when their keys mean the same thing.
    pub fn same_group(&self, other: &GroupSpec) -> bool {
        if std::ptr::eq(self, other) {
            return true;
        }
        match (&self.kind, &other.kind) {
            (GroupKind::Free { rank: a }, GroupKind::Free { rank: b })
            | (GroupKind::FreeAbelian { rank: a }, GroupKind::FreeAbelian { rank: b }) => a == b,
            _ => false,
        }
    }

    fn check_rank(&self, w: &Word) -> Result<()> {
        let g = w.max_generator();
        if g > self.rank() {
            return Err(Error::GeneratorOutOfRange {
                index: g,
                rank: self.rank(),
            });
        }
        Ok(())
    }

    pub fn matrix_of(&self, w: &Word) -> Result<Mat2> {
        match &self.kind {
            GroupKind::MatrixRep(rep) => rep.matrix_of(w),
            _ => Err(Error::NotMatrixGroup(self.name.clone())),
        }
    }

    pub fn is_identity(&self, w: &Word) -> bool {
        match &self.kind {
            GroupKind::Free { .. } => w.reduce_free().is_empty(),
            GroupKind::FreeAbelian { rank } => w
                .abelianize(*rank)
                .map(|v| v.iter().all(|&e| e == 0))
                .unwrap_or(false),
            GroupKind::MatrixRep(rep) => rep
                .matrix_of(w)
                .map(|m| rep.identity_distance(&m) < rep.epsilon_id)
                .unwrap_or(false),
        }
    }

    pub fn canonical_key(&self, w: &Word) -> Result<CanonicalKey> {
        self.check_rank(w)?;
        Ok(match &self.kind {
            GroupKind::Free { .. } => CanonicalKey::Reduced(w.reduce_free()),
            GroupKind::FreeAbelian { rank } => {
                CanonicalKey::Exponents(w.abelianize(*rank)?.into_iter().collect())
            }
            GroupKind::MatrixRep(rep) => CanonicalKey::Element(rep.key_of_word(w)?),
        })
    }

    pub fn identity_key(&self) -> CanonicalKey {
        match &self.kind {
            GroupKind::Free { .. } => CanonicalKey::Reduced(Word::empty()),
            GroupKind::FreeAbelian { rank } => {
                CanonicalKey::Exponents(smallvec::smallvec![0; *rank])
            }
            GroupKind::MatrixRep(_) => CanonicalKey::Element(0),
        }
    }

    /// A word whose canonical key is `key`.
    pub fn representative(&self, key: &CanonicalKey) -> Word {
        match (key, &self.kind) {
            (CanonicalKey::Reduced(w), _) => w.clone(),
            (CanonicalKey::Exponents(e), _) => Word::from_exponents(e),
            (CanonicalKey::Element(id), GroupKind::MatrixRep(rep)) => rep.representative(*id),
            (CanonicalKey::Element(_), _) => panic!("element key used with a non-matrix group"),
        }
    }

    /// Stored matrix of an element key (matrix groups only).
    pub fn element_matrix(&self, key: &CanonicalKey) -> Option<Mat2> {
        match (key, &self.kind) {
            (CanonicalKey::Element(id), GroupKind::MatrixRep(rep)) => Some(rep.matrix(*id)),
            _ => None,
        }
    }

    pub(crate) fn product_key(&self, x: &CanonicalKey, y: &CanonicalKey) -> CanonicalKey {
        match (x, y) {
            (CanonicalKey::Reduced(a), CanonicalKey::Reduced(b)) => {
                CanonicalKey::Reduced(a.concat_reduced(b))
            }
            (CanonicalKey::Exponents(a), CanonicalKey::Exponents(b)) => {
                CanonicalKey::Exponents(a.iter().zip(b.iter()).map(|(p, q)| p + q).collect())
            }
            (CanonicalKey::Element(a), CanonicalKey::Element(b)) => match &self.kind {
                GroupKind::MatrixRep(rep) => CanonicalKey::Element(rep.product(*a, *b)),
                _ => panic!("element key used with a non-matrix group"),
            },
            _ => panic!("mixed canonical key kinds"),
        }
    }

    pub(crate) fn inverse_key(&self, x: &CanonicalKey) -> CanonicalKey {
        match x {
            CanonicalKey::Reduced(w) => CanonicalKey::Reduced(w.invert()),
            CanonicalKey::Exponents(e) => CanonicalKey::Exponents(e.iter().map(|v| -v).collect()),
            CanonicalKey::Element(id) => match &self.kind {
                GroupKind::MatrixRep(rep) => CanonicalKey::Element(rep.inverse_id(*id)),
                _ => panic!("element key used with a non-matrix group"),
            },
        }
    }
}

/// On-disk form of a matrix representation. Entries are `[re, im]` pairs,
/// matrices are lists of rows, relators are signed generator indices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RepresentationFile {
    pub name: String,
    pub rank: usize,
    #[serde(default = "default_projective")]
    pub projective: bool,
    #[serde(default = "default_epsilon")]
    pub epsilon_id: f64,
    pub generators: Vec<[[[f64; 2]; 2]; 2]>,
    #[serde(default)]
    pub relators: Vec<Vec<i32>>,
    #[serde(default)]
    pub generator_names: Vec<String>,
}

fn default_projective() -> bool {
    true
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON_ID
}

impl RepresentationFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::RepFormat(e.to_string()))
    }

    /// Build the group, rejecting files whose relators fail the identity check.
    pub fn into_spec(self) -> Result<GroupSpec> {
        if self.generators.len() != self.rank {
            return Err(Error::RepFormat(format!(
                "rank {} but {} generator matrices",
                self.rank,
                self.generators.len()
            )));
        }
        let c = |e: [f64; 2]| Complex64::new(e[0], e[1]);
        let generators = self
            .generators
            .iter()
            .map(|m| Mat2::new(c(m[0][0]), c(m[0][1]), c(m[1][0]), c(m[1][1])))
            .collect();
        let relators = self
            .relators
            .iter()
            .map(|r| {
                let w = Word::from_signed(r)?;
                if w.max_generator() > self.rank {
                    return Err(Error::GeneratorOutOfRange {
                        index: w.max_generator(),
                        rank: self.rank,
                    });
                }
                Ok(w)
            })
            .collect::<Result<Vec<_>>>()?;
        let rep = MatrixRep::new(generators, self.epsilon_id, relators, self.projective)?;
        GroupSpec::matrix_rep(self.name, rep)
    }
}

pub fn load_representation(text: &str) -> Result<GroupSpec> {
    RepresentationFile::parse(text)?.into_spec()
}

pub fn load_representation_file(path: impl AsRef<Path>) -> Result<GroupSpec> {
    let text = std::fs::read_to_string(path)?;
    load_representation(&text)
}
