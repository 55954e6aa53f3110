//! The exterior algebra of a free module of rank `r` with a fixed basis
//! `b_0, ..., b_{r-1}`.
//!
//! Basis monomials are [`Blade`]s, encoded as bitmasks over the basis
//! indices. Within a grade, blades are ordered by ascending mask value
//! (colexicographic order); that order fixes the row/column layout of every
//! grade block elsewhere in the crate.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Rational;

/// Rank cap used when no explicit limit is given.
pub const DEFAULT_MAX_RANK: usize = 12;
/// Blades are `u32` masks.
pub const HARD_MAX_RANK: usize = 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExteriorError {
    #[error("rank {rank} out of range 1..={max}")]
    RankOutOfRange { rank: usize, max: usize },
    #[error("context mismatch: rank {left} vs rank {right}")]
    ContextMismatch { left: usize, right: usize },
    #[error("blade {blade} does not fit in rank {rank}")]
    BladeOutOfRange { blade: Blade, rank: usize },
    #[error("blade indices must be strictly increasing: {0:?}")]
    NonCanonicalBlade(Vec<usize>),
    #[error("invalid blade key {0:?}")]
    BadBladeKey(String),
    #[error("grade {grade} out of range for rank {rank}")]
    GradeOutOfRange { grade: usize, rank: usize },
    #[error("expected {expected} coordinates, found {found}")]
    CoordinateCount { expected: usize, found: usize },
}

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// The rank of the underlying free module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Context {
    rank: usize,
}

impl Context {
    pub fn new(rank: usize) -> Result<Self, ExteriorError> {
        Self::with_max_rank(rank, DEFAULT_MAX_RANK)
    }

    pub fn with_max_rank(rank: usize, max_rank: usize) -> Result<Self, ExteriorError> {
        let max = max_rank.min(HARD_MAX_RANK);
        if rank == 0 || rank > max {
            return Err(ExteriorError::RankOutOfRange { rank, max });
        }
        Ok(Context { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `dim Λ^h M`.
    pub fn grade_dim(&self, grade: usize) -> usize {
        binomial(self.rank, grade)
    }

    /// Blades of `grade` in ascending mask order.
    pub fn blades(&self, grade: usize) -> Vec<Blade> {
        if grade > self.rank {
            return Vec::new();
        }
        if grade == 0 {
            return vec![Blade::one()];
        }
        let limit = 1u64 << self.rank;
        let mut out = Vec::with_capacity(self.grade_dim(grade));
        let mut mask: u64 = (1u64 << grade) - 1;
        while mask < limit {
            out.push(Blade(mask as u32));
            // Gosper's hack: next integer with the same popcount.
            let low = mask & mask.wrapping_neg();
            let ripple = mask + low;
            mask = (((ripple ^ mask) >> 2) / low) | ripple;
        }
        out
    }

    pub fn top_blade(&self) -> Blade {
        Blade(((1u64 << self.rank) - 1) as u32)
    }

    pub fn contains(&self, blade: Blade) -> bool {
        (blade.0 as u64) >> self.rank == 0
    }

    fn check(&self, blade: Blade) -> Result<(), ExteriorError> {
        if self.contains(blade) {
            Ok(())
        } else {
            Err(ExteriorError::BladeOutOfRange {
                blade,
                rank: self.rank,
            })
        }
    }

    fn same(&self, other: &Context) -> Result<(), ExteriorError> {
        if self == other {
            Ok(())
        } else {
            Err(ExteriorError::ContextMismatch {
                left: self.rank,
                right: other.rank,
            })
        }
    }
}

/// A basis monomial `b_{i1} ∧ ... ∧ b_{ih}` with `i1 < ... < ih`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Blade(u32);

impl Blade {
    /// The empty blade, i.e. the unit `1 ∈ Λ^0 M`.
    pub fn one() -> Self {
        Blade(0)
    }

    pub fn from_mask(mask: u32) -> Self {
        Blade(mask)
    }

    pub fn basis(i: usize) -> Self {
        assert!(i < HARD_MAX_RANK);
        Blade(1 << i)
    }

    pub fn from_indices(indices: &[usize]) -> Result<Self, ExteriorError> {
        let canonical = indices.windows(2).all(|w| w[0] < w[1]);
        if !canonical || indices.iter().any(|&i| i >= HARD_MAX_RANK) {
            return Err(ExteriorError::NonCanonicalBlade(indices.to_vec()));
        }
        Ok(Blade(indices.iter().fold(0, |m, &i| m | (1 << i))))
    }

    pub fn mask(&self) -> u32 {
        self.0
    }

    pub fn grade(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..32).filter(|i| self.0 >> i & 1 == 1).collect()
    }

    /// Position of this blade among the blades of its grade.
    pub fn colex_index(&self) -> usize {
        self.indices()
            .iter()
            .enumerate()
            .map(|(k, &c)| binomial(c, k + 1))
            .sum()
    }

    /// Inverse of [`Blade::colex_index`].
    pub fn from_colex_index(grade: usize, mut index: usize) -> Self {
        let mut mask = 0u32;
        for k in (1..=grade).rev() {
            let mut c = k - 1;
            while binomial(c + 1, k) <= index {
                c += 1;
            }
            index -= binomial(c, k);
            mask |= 1 << c;
        }
        Blade(mask)
    }

    /// Comma-joined ascending indices; empty for the unit blade.
    pub fn key(&self) -> String {
        self.indices()
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_key(key: &str) -> Result<Self, ExteriorError> {
        if key.is_empty() {
            return Ok(Blade::one());
        }
        let indices = key
            .split(',')
            .map(|part| {
                if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) || part.len() > 3 {
                    return Err(ExteriorError::BadBladeKey(key.to_string()));
                }
                part.parse::<usize>()
                    .map_err(|_| ExteriorError::BadBladeKey(key.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Blade::from_indices(&indices)
    }
}

impl Ord for Blade {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.grade(), self.0).cmp(&(other.grade(), other.0))
    }
}

impl PartialOrd for Blade {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.indices().iter().map(|i| format!("b{i}")).collect();
        write!(f, "{}", parts.join("∧"))
    }
}

impl fmt::Debug for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.key())
    }
}

/// Sign and product of two blades: `(0, 1)` when they share an index,
/// otherwise `(±1, a ∪ b)` with the sign of the sorting permutation.
pub fn wedge_blades(ctx: &Context, a: Blade, b: Blade) -> Result<(i8, Blade), ExteriorError> {
    ctx.check(a)?;
    ctx.check(b)?;
    Ok(wedge_masks(a, b))
}

fn wedge_masks(a: Blade, b: Blade) -> (i8, Blade) {
    if a.0 & b.0 != 0 {
        return (0, Blade::one());
    }
    // Inversions: pairs (i in a, j in b) with i > j.
    let mut inversions = 0u32;
    let mut rest = a.0;
    while rest != 0 {
        let i = rest.trailing_zeros();
        inversions += (b.0 & ((1u32 << i) - 1)).count_ones();
        rest &= rest - 1;
    }
    let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };
    (sign, Blade(a.0 | b.0))
}

/// An element of `ΛM`: a sparse map from blades to nonzero coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct Multivector {
    ctx: Context,
    terms: BTreeMap<Blade, Rational>,
}

impl Multivector {
    pub fn zero(ctx: Context) -> Self {
        Multivector {
            ctx,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(ctx: Context, c: Rational) -> Self {
        let mut m = Multivector::zero(ctx);
        m.add_term(Blade::one(), c);
        m
    }

    pub fn one(ctx: Context) -> Self {
        Multivector::scalar(ctx, Rational::one())
    }

    pub fn blade(ctx: Context, blade: Blade) -> Result<Self, ExteriorError> {
        ctx.check(blade)?;
        let mut m = Multivector::zero(ctx);
        m.add_term(blade, Rational::one());
        Ok(m)
    }

    /// The basis vector `b_i`. Panics if `i >= rank`.
    pub fn basis_vector(ctx: Context, i: usize) -> Self {
        assert!(i < ctx.rank, "basis index {i} out of range");
        Multivector::blade(ctx, Blade::basis(i)).expect("in range")
    }

    pub fn from_terms(
        ctx: Context,
        terms: impl IntoIterator<Item = (Blade, Rational)>,
    ) -> Result<Self, ExteriorError> {
        let mut m = Multivector::zero(ctx);
        for (blade, c) in terms {
            ctx.check(blade)?;
            m.add_term(blade, c);
        }
        Ok(m)
    }

    /// Homogeneous element from coordinates in the grade's blade order.
    pub fn from_grade_coords(
        ctx: Context,
        grade: usize,
        coords: &[Rational],
    ) -> Result<Self, ExteriorError> {
        if grade > ctx.rank {
            return Err(ExteriorError::GradeOutOfRange {
                grade,
                rank: ctx.rank,
            });
        }
        let blades = ctx.blades(grade);
        if blades.len() != coords.len() {
            return Err(ExteriorError::CoordinateCount {
                expected: blades.len(),
                found: coords.len(),
            });
        }
        let mut m = Multivector::zero(ctx);
        for (blade, c) in blades.into_iter().zip(coords) {
            m.add_term(blade, c.clone());
        }
        Ok(m)
    }

    /// Coordinates of the grade-`h` part, in blade order.
    pub fn grade_coords(&self, grade: usize) -> Vec<Rational> {
        let mut coords = vec![Rational::zero(); self.ctx.grade_dim(grade)];
        for (blade, c) in self.terms.iter().filter(|(b, _)| b.grade() == grade) {
            coords[blade.colex_index()] = c.clone();
        }
        coords
    }

    pub fn context(&self) -> Context {
        self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Blade, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, blade: Blade) -> Rational {
        self.terms.get(&blade).cloned().unwrap_or_default()
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

    /// The common grade of all terms, if homogeneous and nonzero.
    pub fn grade(&self) -> Option<usize> {
        let mut grades = self.terms.keys().map(Blade::grade);
        let first = grades.next()?;
        grades.all(|g| g == first).then_some(first)
    }

    pub fn grade_part(&self, grade: usize) -> Multivector {
        Multivector {
            ctx: self.ctx,
            terms: self
                .terms
                .iter()
                .filter(|(b, _)| b.grade() == grade)
                .map(|(b, c)| (*b, c.clone()))
                .collect(),
        }
    }

    fn add_term(&mut self, blade: Blade, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(blade) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self += c * other`. Panics on a context mismatch.
    pub fn add_scaled(&mut self, c: &Rational, other: &Multivector) {
        assert_eq!(self.ctx, other.ctx, "context mismatch");
        if c.is_zero() {
            return;
        }
        for (blade, x) in &other.terms {
            self.add_term(*blade, c * x);
        }
    }

    pub fn scale(&self, c: &Rational) -> Multivector {
        let mut out = Multivector::zero(self.ctx);
        out.add_scaled(c, self);
        out
    }

    pub fn checked_add(&self, other: &Multivector) -> Result<Multivector, ExteriorError> {
        self.ctx.same(&other.ctx)?;
        let mut out = self.clone();
        out.add_scaled(&Rational::one(), other);
        Ok(out)
    }

    /// Exterior product, the bilinear extension of [`wedge_blades`].
    pub fn wedge(&self, other: &Multivector) -> Result<Multivector, ExteriorError> {
        self.ctx.same(&other.ctx)?;
        let mut out = Multivector::zero(self.ctx);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let (sign, blade) = wedge_masks(*a, *b);
                match sign {
                    0 => {}
                    1 => out.add_term(blade, x * y),
                    _ => out.add_term(blade, -(x * y)),
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(b, c)| format!("({c}){b}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Panics on a context mismatch; see [`Multivector::checked_add`].
impl Add<&Multivector> for &Multivector {
    type Output = Multivector;
    fn add(self, rhs: &Multivector) -> Multivector {
        self.checked_add(rhs).expect("context mismatch")
    }
}

/// Panics on a context mismatch.
impl Sub<&Multivector> for &Multivector {
    type Output = Multivector;
    fn sub(self, rhs: &Multivector) -> Multivector {
        let mut out = self.clone();
        out.add_scaled(&-Rational::one(), rhs);
        out
    }
}

impl Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scale(&-Rational::one())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MultivectorRepr {
    rank: usize,
    terms: BTreeMap<String, Rational>,
}

impl Serialize for Multivector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        struct Terms<'a>(&'a BTreeMap<Blade, Rational>);
        impl Serialize for Terms<'_> {
            fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let mut map = serializer.serialize_map(Some(self.0.len()))?;
                for (b, c) in self.0 {
                    map.serialize_entry(&b.key(), c)?;
                }
                map.end()
            }
        }
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("rank", &self.ctx.rank)?;
        map.serialize_entry("terms", &Terms(&self.terms))?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for Multivector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = MultivectorRepr::deserialize(deserializer)?;
        let ctx = Context::new(repr.rank).map_err(D::Error::custom)?;
        let mut terms = Vec::with_capacity(repr.terms.len());
        for (key, c) in repr.terms {
            terms.push((Blade::parse_key(&key).map_err(D::Error::custom)?, c));
        }
        Multivector::from_terms(ctx, terms).map_err(D::Error::custom)
    }
}
