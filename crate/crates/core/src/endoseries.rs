//! Grade-preserving endomorphisms of `ΛM` and truncated power series of
//! them, including the unique Hasse-Schmidt extension of a series of maps
//! on `M`.
//!
//! Series store plain coefficients: `D(t) = Σ D_i t^i`. Some references
//! write inverses as `Σ (-1)^i D̄_i t^i`; [`EndoSeries::alternating_coeff`]
//! recovers that layout for reporting.

use std::collections::BTreeMap;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exterior::{Blade, Context, ExteriorError, Multivector};
use crate::matrix::Matrix;
use crate::scalar::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EndoError {
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error("grade {grade} block must be {expected}x{expected}, found {rows}x{cols}")]
    BlockShape {
        grade: usize,
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("expected {expected} grade blocks, found {found}")]
    BlockCount { expected: usize, found: usize },
    #[error("series has no coefficients")]
    EmptySeries,
    #[error("leading coefficient is singular on grade {grade}")]
    SingularLeadingTerm { grade: usize },
    #[error("constant term of the map on M must be the identity")]
    NonUnitConstantTerm,
}

/// An endomorphism of `ΛM` that preserves grade, stored as one square
/// block per grade. Column `j` of block `h` is the image of the `j`-th
/// grade-`h` blade.
#[derive(Clone, PartialEq, Eq)]
pub struct GradedEndo {
    ctx: Context,
    blocks: Vec<Matrix>,
}

impl GradedEndo {
    pub fn zero(ctx: Context) -> Self {
        let blocks = (0..=ctx.rank())
            .map(|h| {
                let d = ctx.grade_dim(h);
                Matrix::zeros(d, d)
            })
            .collect();
        GradedEndo { ctx, blocks }
    }

    pub fn identity(ctx: Context) -> Self {
        Self::scalar(ctx, &Rational::one())
    }

    pub fn scalar(ctx: Context, c: &Rational) -> Self {
        let blocks = (0..=ctx.rank())
            .map(|h| Matrix::scalar(ctx.grade_dim(h), c))
            .collect();
        GradedEndo { ctx, blocks }
    }

    pub fn from_blocks(ctx: Context, blocks: Vec<Matrix>) -> Result<Self, EndoError> {
        if blocks.len() != ctx.rank() + 1 {
            return Err(EndoError::BlockCount {
                expected: ctx.rank() + 1,
                found: blocks.len(),
            });
        }
        for (grade, block) in blocks.iter().enumerate() {
            let expected = ctx.grade_dim(grade);
            if block.rows() != expected || block.cols() != expected {
                return Err(EndoError::BlockShape {
                    grade,
                    expected,
                    rows: block.rows(),
                    cols: block.cols(),
                });
            }
        }
        Ok(GradedEndo { ctx, blocks })
    }

    pub fn context(&self) -> Context {
        self.ctx
    }

    pub fn block(&self, grade: usize) -> &Matrix {
        &self.blocks[grade]
    }

    pub fn blocks(&self) -> &[Matrix] {
        &self.blocks
    }

    pub fn set_block(&mut self, grade: usize, block: Matrix) -> Result<(), EndoError> {
        let expected = self.ctx.grade_dim(grade);
        if block.rows() != expected || block.cols() != expected {
            return Err(EndoError::BlockShape {
                grade,
                expected,
                rows: block.rows(),
                cols: block.cols(),
            });
        }
        self.blocks[grade] = block;
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(Matrix::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.blocks.iter().all(Matrix::is_identity)
    }

    pub fn apply(&self, alpha: &Multivector) -> Result<Multivector, EndoError> {
        if alpha.context() != self.ctx {
            return Err(ExteriorError::ContextMismatch {
                left: self.ctx.rank(),
                right: alpha.context().rank(),
            }
            .into());
        }
        let mut out = Multivector::zero(self.ctx);
        for grade in 0..=self.ctx.rank() {
            let coords = alpha.grade_coords(grade);
            if coords.iter().all(Rational::is_zero) {
                continue;
            }
            let image = self.blocks[grade].mul_vec(&coords);
            let part = Multivector::from_grade_coords(self.ctx, grade, &image)?;
            out.add_scaled(&Rational::one(), &part);
        }
        Ok(out)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GradedEndo) -> Result<GradedEndo, EndoError> {
        self.same_context(other)?;
        Ok(GradedEndo {
            ctx: self.ctx,
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// `self += c * other`. Panics on a context mismatch.
    pub fn add_scaled(&mut self, c: &Rational, other: &GradedEndo) {
        assert_eq!(self.ctx, other.ctx, "context mismatch");
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            a.add_scaled(c, b);
        }
    }

    pub fn scale(&self, c: &Rational) -> GradedEndo {
        GradedEndo {
            ctx: self.ctx,
            blocks: self.blocks.iter().map(|b| b.scale(c)).collect(),
        }
    }

    pub fn sub(&self, other: &GradedEndo) -> Result<GradedEndo, EndoError> {
        self.same_context(other)?;
        let mut out = self.clone();
        out.add_scaled(&-Rational::one(), other);
        Ok(out)
    }

    fn same_context(&self, other: &GradedEndo) -> Result<(), EndoError> {
        if self.ctx != other.ctx {
            return Err(ExteriorError::ContextMismatch {
                left: self.ctx.rank(),
                right: other.ctx.rank(),
            }
            .into());
        }
        Ok(())
    }
}

impl std::fmt::Debug for GradedEndo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GradedEndo")
            .field("rank", &self.ctx.rank())
            .field("blocks", &self.blocks)
            .finish()
    }
}

impl Serialize for GradedEndo {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        struct Blocks<'a>(&'a [Matrix]);
        impl Serialize for Blocks<'_> {
            fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let mut map = serializer.serialize_map(Some(self.0.len()))?;
                for (h, block) in self.0.iter().enumerate() {
                    map.serialize_entry(&h.to_string(), &block.row_vecs())?;
                }
                map.end()
            }
        }
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("rank", &self.ctx.rank())?;
        map.serialize_entry("blocks", &Blocks(&self.blocks))?;
        map.end()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GradedEndoRepr {
    rank: usize,
    blocks: BTreeMap<String, Vec<Vec<Rational>>>,
}

impl<'de> Deserialize<'de> for GradedEndo {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = GradedEndoRepr::deserialize(deserializer)?;
        let ctx = Context::new(repr.rank).map_err(D::Error::custom)?;
        let mut blocks: Vec<Option<Matrix>> = vec![None; ctx.rank() + 1];
        for (key, rows) in repr.blocks {
            let grade = key
                .parse::<usize>()
                .ok()
                .filter(|g| *g <= ctx.rank() && key == g.to_string())
                .ok_or_else(|| D::Error::custom(format!("invalid grade key {key:?}")))?;
            let dim = ctx.grade_dim(grade);
            // An empty row list would hide the column count; reject it explicitly.
            if rows.len() != dim {
                return Err(D::Error::custom(format!(
                    "grade {grade} block must have {dim} rows, found {}",
                    rows.len()
                )));
            }
            blocks[grade] = Some(Matrix::from_rows(rows).map_err(D::Error::custom)?);
        }
        let blocks = blocks
            .into_iter()
            .enumerate()
            .map(|(h, b)| b.ok_or_else(|| D::Error::custom(format!("missing grade {h} block"))))
            .collect::<Result<Vec<_>, _>>()?;
        GradedEndo::from_blocks(ctx, blocks).map_err(D::Error::custom)
    }
}

/// A truncated series `D_0 + D_1 t + ... + D_N t^N` of graded endomorphisms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EndoSeries {
    ctx: Context,
    coeffs: Vec<GradedEndo>,
}

impl EndoSeries {
    pub fn new(ctx: Context, coeffs: Vec<GradedEndo>) -> Result<Self, EndoError> {
        if coeffs.is_empty() {
            return Err(EndoError::EmptySeries);
        }
        for c in &coeffs {
            if c.context() != ctx {
                return Err(ExteriorError::ContextMismatch {
                    left: ctx.rank(),
                    right: c.context().rank(),
                }
                .into());
            }
        }
        Ok(EndoSeries { ctx, coeffs })
    }

    pub fn identity(ctx: Context, order: usize) -> Self {
        let mut coeffs = vec![GradedEndo::zero(ctx); order + 1];
        coeffs[0] = GradedEndo::identity(ctx);
        EndoSeries { ctx, coeffs }
    }

    /// `Σ c_i t^i` acting as scalar multiplication on every grade.
    pub fn from_scalars(ctx: Context, scalars: &[Rational]) -> Result<Self, EndoError> {
        let coeffs = scalars.iter().map(|c| GradedEndo::scalar(ctx, c)).collect();
        EndoSeries::new(ctx, coeffs)
    }

    pub fn context(&self) -> Context {
        self.ctx
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[GradedEndo] {
        &self.coeffs
    }

    /// Plain coefficient of `t^i`; zero beyond the truncation order.
    pub fn coeff(&self, i: usize) -> GradedEndo {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| GradedEndo::zero(self.ctx))
    }

    /// `(-1)^i D_i`, the coefficient in the alternating-sign layout.
    pub fn alternating_coeff(&self, i: usize) -> GradedEndo {
        self.coeff(i).scale(&Rational::sign(i))
    }

    pub fn truncate(&self, order: usize) -> EndoSeries {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, GradedEndo::zero(self.ctx));
        EndoSeries {
            ctx: self.ctx,
            coeffs,
        }
    }

    /// `[D_0 α, D_1 α, ..., D_N α]`.
    pub fn apply(&self, alpha: &Multivector) -> Result<Vec<Multivector>, EndoError> {
        self.coeffs.iter().map(|d| d.apply(alpha)).collect()
    }

    /// Cauchy product, truncated to the smaller order.
    pub fn product(&self, other: &EndoSeries) -> Result<EndoSeries, EndoError> {
        self.same_context(other)?;
        let order = self.order().min(other.order());
        let mut coeffs = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let mut acc = GradedEndo::zero(self.ctx);
            for i in 0..=k {
                let (a, b) = (&self.coeffs[i], &other.coeffs[k - i]);
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                acc.add_scaled(&Rational::one(), &a.compose(b)?);
            }
            coeffs.push(acc);
        }
        Ok(EndoSeries {
            ctx: self.ctx,
            coeffs,
        })
    }

    /// The inverse series through the same order, from the triangular
    /// recurrence `Σ_{k=0}^{j} B_k D_{j-k} = 0` (`j ≥ 1`), `B_0 = D_0^{-1}`.
    pub fn invert(&self) -> Result<EndoSeries, EndoError> {
        let lead_inv = self.coeffs[0]
            .blocks()
            .iter()
            .enumerate()
            .map(|(grade, b)| b.inverse().ok_or(EndoError::SingularLeadingTerm { grade }))
            .collect::<Result<Vec<_>, _>>()?;
        let lead_inv = GradedEndo::from_blocks(self.ctx, lead_inv)?;
        let mut inv: Vec<GradedEndo> = Vec::with_capacity(self.coeffs.len());
        inv.push(lead_inv.clone());
        for j in 1..self.coeffs.len() {
            let mut acc = GradedEndo::zero(self.ctx);
            for (k, b) in inv.iter().enumerate() {
                let d = &self.coeffs[j - k];
                if b.is_zero() || d.is_zero() {
                    continue;
                }
                acc.add_scaled(&-Rational::one(), &b.compose(d)?);
            }
            inv.push(acc.compose(&lead_inv)?);
        }
        Ok(EndoSeries {
            ctx: self.ctx,
            coeffs: inv,
        })
    }

    /// Checks `D_i(α∧β) = Σ_j D_j α ∧ D_{i-j} β` for every sample and every
    /// `i` through the truncation order.
    pub fn is_hs(&self, samples: &[(Multivector, Multivector)]) -> Result<HsReport, EndoError> {
        let mut failures = Vec::new();
        for (s, (alpha, beta)) in samples.iter().enumerate() {
            let da = self.apply(alpha)?;
            let db = self.apply(beta)?;
            let dab = self.apply(&alpha.wedge(beta)?)?;
            for i in 0..=self.order() {
                let mut residual = dab[i].clone();
                for j in 0..=i {
                    residual.add_scaled(&-Rational::one(), &da[j].wedge(&db[i - j])?);
                }
                if !residual.is_zero() {
                    failures.push(HsFailure {
                        sample: s,
                        index: i,
                        residual,
                    });
                }
            }
        }
        Ok(HsReport {
            holds: failures.is_empty(),
            failures,
        })
    }

    fn same_context(&self, other: &EndoSeries) -> Result<(), EndoError> {
        if self.ctx != other.ctx {
            return Err(ExteriorError::ContextMismatch {
                left: self.ctx.rank(),
                right: other.ctx.rank(),
            }
            .into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HsFailure {
    pub sample: usize,
    pub index: usize,
    pub residual: Multivector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HsReport {
    pub holds: bool,
    pub failures: Vec<HsFailure>,
}

/// Checks the plain Leibniz rule `D(α∧β) = Dα∧β + α∧Dβ` on the samples.
pub fn is_derivation(
    d: &GradedEndo,
    samples: &[(Multivector, Multivector)],
) -> Result<bool, EndoError> {
    for (alpha, beta) in samples {
        let lhs = d.apply(&alpha.wedge(beta)?)?;
        let rhs = &d.apply(alpha)?.wedge(beta)? + &alpha.wedge(&d.apply(beta)?)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The unique HS-derivation `D(g; t)` whose restriction to `M` is
/// `g(t) = Σ g_j t^j`, truncated at `t^order`. `g[0]` must be the identity;
/// missing `g_j` are zero.
///
/// On a blade `b_{i1}∧...∧b_{ih}` the result is `g(t)b_{i1} ∧ ... ∧ g(t)b_{ih}`,
/// expanded left to right and truncated after every factor.
pub fn extend_to_hs(ctx: Context, g: &[Matrix], order: usize) -> Result<EndoSeries, EndoError> {
    let r = ctx.rank();
    let first = g.first().ok_or(EndoError::EmptySeries)?;
    for m in g {
        if m.rows() != r || m.cols() != r {
            return Err(EndoError::BlockShape {
                grade: 1,
                expected: r,
                rows: m.rows(),
                cols: m.cols(),
            });
        }
    }
    if !first.is_identity() {
        return Err(EndoError::NonUnitConstantTerm);
    }

    // g(t) b_i as a truncated series of grade-1 multivectors.
    let vector_series: Vec<Vec<Multivector>> = (0..r)
        .map(|i| {
            (0..=order)
                .map(|j| match g.get(j) {
                    Some(m) => Multivector::from_grade_coords(ctx, 1, &m.column(i)),
                    None => Ok(Multivector::zero(ctx)),
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;

    let mut blocks: Vec<Vec<Matrix>> = (0..=order)
        .map(|_| {
            (0..=r)
                .map(|h| {
                    let d = ctx.grade_dim(h);
                    Matrix::zeros(d, d)
                })
                .collect()
        })
        .collect();
    blocks[0][0] = Matrix::identity(1);

    // Images of every blade, keyed by mask. Blades are visited in increasing
    // mask order, so the prefix (mask minus its top bit) is always ready.
    let mut images: HashMap<u32, Vec<Multivector>> = HashMap::new();
    let mut unit = vec![Multivector::zero(ctx); order + 1];
    unit[0] = Multivector::one(ctx);
    images.insert(0, unit);
    for mask in 1u32..(1u32 << r) {
        let top = 31 - mask.leading_zeros();
        let prefix = &images[&(mask & !(1 << top))];
        let factor = &vector_series[top as usize];
        let mut series = vec![Multivector::zero(ctx); order + 1];
        for (a, pa) in prefix.iter().enumerate() {
            if pa.is_zero() {
                continue;
            }
            for (b, fb) in factor.iter().enumerate().take(order + 1 - a) {
                if fb.is_zero() {
                    continue;
                }
                let w = pa.wedge(fb)?;
                series[a + b].add_scaled(&Rational::one(), &w);
            }
        }
        let blade = Blade::from_mask(mask);
        let (grade, col) = (blade.grade(), blade.colex_index());
        for (j, term) in series.iter().enumerate() {
            for (row, x) in term.grade_coords(grade).into_iter().enumerate() {
                if !x.is_zero() {
                    blocks[j][grade].set(row, col, x);
                }
            }
        }
        images.insert(mask, series);
    }

    let coeffs = blocks
        .into_iter()
        .map(|b| GradedEndo::from_blocks(ctx, b))
        .collect::<Result<Vec<_>, _>>()?;
    EndoSeries::new(ctx, coeffs)
}
