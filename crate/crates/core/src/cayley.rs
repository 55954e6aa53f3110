//! Characteristic polynomials without determinants, and the graded
//! Cayley-Hamilton identities.
//!
//! Everything starts from `f̄(t)`, the HS-derivation extending `1 - ft`.
//! Its action on the top form `ζ = b_0∧...∧b_{r-1}` is multiplication by
//! `E_r(t) = det(1 - ft)`, which yields the characteristic coefficients.
//! The inverse series `f(t)` restricts to `Σ f^j t^j` on `M`, and the
//! operators `U_i` are the coefficients of `E_r(t) f(t)`.

use serde::Serialize;
use thiserror::Error;

use crate::endoseries::{extend_to_hs, EndoError, EndoSeries, GradedEndo};
use crate::exterior::{Blade, Context, ExteriorError, Multivector};
use crate::matrix::Matrix;
use crate::scalar::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CayleyError {
    #[error(transparent)]
    Endo(#[from] EndoError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error("matrix must be square, found {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("truncation order {order} too small, need at least {min}")]
    OrderTooSmall { order: usize, min: usize },
}

/// An endomorphism `f` of `M`, as the matrix with `f b_j = Σ_i f[i][j] b_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Endomorphism {
    ctx: Context,
    matrix: Matrix,
}

impl Endomorphism {
    pub fn new(matrix: Matrix) -> Result<Self, CayleyError> {
        Self::with_max_rank(matrix, crate::exterior::DEFAULT_MAX_RANK)
    }

    pub fn with_max_rank(matrix: Matrix, max_rank: usize) -> Result<Self, CayleyError> {
        if !matrix.is_square() {
            return Err(CayleyError::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let ctx = Context::with_max_rank(matrix.rows(), max_rank)?;
        Ok(Endomorphism { ctx, matrix })
    }

    pub fn context(&self) -> Context {
        self.ctx
    }

    pub fn rank(&self) -> usize {
        self.ctx.rank()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

/// Coefficients `e_1, ..., e_r` of `det(t - f) = t^r - e_1 t^{r-1} + ... + (-1)^r e_r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharCoeffs {
    ctx: Context,
    e: Vec<Rational>,
}

impl CharCoeffs {
    /// Wraps explicit values; the rank is their count.
    pub fn from_values(e: Vec<Rational>) -> Result<Self, CayleyError> {
        let ctx = Context::with_max_rank(e.len(), crate::exterior::HARD_MAX_RANK)?;
        Ok(CharCoeffs { ctx, e })
    }

    pub fn context(&self) -> Context {
        self.ctx
    }

    pub fn rank(&self) -> usize {
        self.e.len()
    }

    /// `[e_1, ..., e_r]`.
    pub fn values(&self) -> &[Rational] {
        &self.e
    }

    /// `e_k` with `e_0 = 1` and `e_k = 0` for `k > r`.
    pub fn get(&self, k: usize) -> Rational {
        match k {
            0 => Rational::one(),
            k if k <= self.e.len() => self.e[k - 1].clone(),
            _ => Rational::zero(),
        }
    }

    /// `(-1)^k e_k`, the coefficient of `t^k` in `E_r(t)`.
    pub fn signed(&self, k: usize) -> Rational {
        self.get(k) * Rational::sign(k)
    }
}

/// The HS-derivation extending `1 - ft`, through `t^order`. Stored with
/// plain coefficients, so coefficient `j` is `(-1)^j f̄_j`.
pub fn fbar(f: &Endomorphism, order: usize) -> Result<EndoSeries, CayleyError> {
    require_order(order, f.rank())?;
    let g = [Matrix::identity(f.rank()), -f.matrix()];
    Ok(extend_to_hs(f.context(), &g, order)?)
}

/// Reads `e_i` off the eigenvalue of `f̄_i` on the top form.
pub fn char_coeffs(f: &Endomorphism) -> Result<CharCoeffs, CayleyError> {
    let series = fbar(f, f.rank())?;
    Ok(char_coeffs_from_fbar(&series))
}

fn char_coeffs_from_fbar(series: &EndoSeries) -> CharCoeffs {
    let ctx = series.context();
    let r = ctx.rank();
    let e = (1..=r)
        .map(|i| series.alternating_coeff(i).block(r).get(0, 0).clone())
        .collect();
    CharCoeffs { ctx, e }
}

/// `f(t)`, the series inverse of `f̄(t)`.
pub fn f_series(f: &Endomorphism, order: usize) -> Result<EndoSeries, CayleyError> {
    Ok(fbar(f, order)?.invert()?)
}

/// `U_0, ..., U_N` for an endomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct USeq {
    ctx: Context,
    u: Vec<GradedEndo>,
}

impl USeq {
    pub fn order(&self) -> usize {
        self.u.len() - 1
    }

    pub fn get(&self, k: usize) -> &GradedEndo {
        &self.u[k]
    }

    pub fn as_slice(&self) -> &[GradedEndo] {
        &self.u
    }

    pub fn context(&self) -> Context {
        self.ctx
    }
}

/// `U_i = f_i - e_1 f_{i-1} + ... + (-1)^r e_r f_{i-r}`, `f_k = 0` for `k < 0`.
pub fn u_from_formula(e: &CharCoeffs, f_t: &EndoSeries) -> USeq {
    let ctx = f_t.context();
    let u = (0..=f_t.order())
        .map(|i| {
            let mut acc = GradedEndo::zero(ctx);
            for k in 0..=e.rank().min(i) {
                acc.add_scaled(&e.signed(k), &f_t.coeffs()[i - k]);
            }
            acc
        })
        .collect();
    USeq { ctx, u }
}

/// The coefficients of `E_r(t) · f(t)`, with `E_r(t)` as a scalar series.
pub fn u_from_product(e: &CharCoeffs, f_t: &EndoSeries) -> Result<USeq, CayleyError> {
    let ctx = f_t.context();
    let scalars: Vec<Rational> = (0..=f_t.order()).map(|k| e.signed(k)).collect();
    let e_t = EndoSeries::from_scalars(ctx, &scalars)?;
    let product = e_t.product(f_t)?;
    Ok(USeq {
        ctx,
        u: product.coeffs().to_vec(),
    })
}

pub fn u_operators(f: &Endomorphism, order: usize) -> Result<USeq, CayleyError> {
    let pipeline = Pipeline::new(f, order)?;
    Ok(pipeline.u)
}

fn require_order(order: usize, min: usize) -> Result<(), CayleyError> {
    if order < min {
        return Err(CayleyError::OrderTooSmall { order, min });
    }
    Ok(())
}

/// All series derived from one endomorphism at one truncation order.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub f: Endomorphism,
    pub order: usize,
    pub e: CharCoeffs,
    pub fbar: EndoSeries,
    pub f_t: EndoSeries,
    pub u: USeq,
}

impl Pipeline {
    pub fn new(f: &Endomorphism, order: usize) -> Result<Self, CayleyError> {
        let fbar = fbar(f, order)?;
        let e = char_coeffs_from_fbar(&fbar);
        let f_t = fbar.invert()?;
        let u = u_from_formula(&e, &f_t);
        Ok(Pipeline {
            f: f.clone(),
            order,
            e,
            fbar,
            f_t,
            u,
        })
    }

    pub fn context(&self) -> Context {
        self.f.context()
    }

    pub fn rank(&self) -> usize {
        self.f.rank()
    }

    /// `R(j, i) = Σ_{k=0}^{j} (-1)^k e_k f_{i+j-k}` on grade `r - j + 1`.
    pub fn literal_residual(&self, j: usize, i: usize) -> Matrix {
        let grade = self.rank() - j + 1;
        let dim = self.context().grade_dim(grade);
        let mut acc = Matrix::zeros(dim, dim);
        for k in 0..=j {
            acc.add_scaled(&self.e.signed(k), self.f_t.coeffs()[i + j - k].block(grade));
        }
        acc
    }
}

/// A nonzero residual found by a check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub check: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UVanishing {
    pub grade: usize,
    pub first_nonzero_k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiteralResidual {
    pub j: usize,
    pub i: usize,
    pub grade: usize,
    pub residual: Vec<Vec<Rational>>,
}

/// Exact outcome of the graded Cayley-Hamilton checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChReport {
    /// `f^i (f^r - e_1 f^{r-1} + ... + (-1)^r e_r)` for `i = 0..=N-r`.
    pub classic_residuals: Vec<Matrix>,
    pub u_vanishing: Vec<UVanishing>,
    /// `E_r(t) f(t)(α)` minus its first `j` terms, through `t^N`, for every
    /// blade `α` of grade `r - j + 1`. Only nonzero entries are kept.
    pub rational_form_failures: Vec<(usize, Blade, Vec<Multivector>)>,
    /// `U_i` on `Λ^0`, `i = 0..=r`.
    pub grade0_ledger: Vec<Rational>,
    pub literal_residuals: Vec<LiteralResidual>,
    pub u_routes_agree: bool,
    pub counterexamples: Vec<Counterexample>,
}

impl ChReport {
    pub fn classic_ch(&self) -> bool {
        self.classic_residuals.iter().all(Matrix::is_zero)
    }

    pub fn u_vanishing_holds(&self) -> bool {
        self.u_vanishing.iter().all(|u| u.first_nonzero_k.is_none())
    }

    pub fn rational_form(&self) -> bool {
        self.rational_form_failures.is_empty()
    }

    /// Every asserted identity holds. Literal residuals are informational.
    pub fn holds(&self) -> bool {
        self.classic_ch()
            && self.u_vanishing_holds()
            && self.rational_form()
            && self.u_routes_agree
            && self.counterexamples.is_empty()
    }
}

/// Runs the graded Cayley-Hamilton checks through order `N ≥ 2r`.
pub fn wedge_ch_report(f: &Endomorphism, order: usize) -> Result<ChReport, CayleyError> {
    require_order(order, 2 * f.rank())?;
    let p = Pipeline::new(f, order)?;
    ch_report(&p)
}

pub fn ch_report(p: &Pipeline) -> Result<ChReport, CayleyError> {
    let r = p.rank();
    let n = p.order;
    let ctx = p.context();
    require_order(n, 2 * r)?;
    let mut counterexamples = Vec::new();

    // (b) classic Cayley-Hamilton on plain matrix powers.
    let powers = p.f.matrix().powers(n);
    let classic_residuals: Vec<Matrix> = (0..=n - r)
        .map(|i| {
            let mut acc = Matrix::zeros(r, r);
            for k in 0..=r {
                acc.add_scaled(&p.e.signed(k), &powers[i + r - k]);
            }
            acc
        })
        .collect();
    for (i, m) in classic_residuals.iter().enumerate() {
        if !m.is_zero() {
            counterexamples.push(Counterexample {
                check: "classic_ch".into(),
                detail: format!("shift {i}: {m:?}"),
            });
        }
    }

    // (a) U_k vanishes on grade h for k ≥ r - h + 1.
    let u_vanishing = (1..=r)
        .map(|h| UVanishing {
            grade: h,
            first_nonzero_k: (r - h + 1..=n).find(|&k| !p.u.get(k).block(h).is_zero()),
        })
        .collect::<Vec<_>>();
    for u in &u_vanishing {
        if let Some(k) = u.first_nonzero_k {
            counterexamples.push(Counterexample {
                check: "u_vanishing".into(),
                detail: format!(
                    "U_{k} on grade {}: {:?}",
                    u.grade,
                    p.u.get(k).block(u.grade)
                ),
            });
        }
    }

    // Both routes to U must agree.
    let via_product = u_from_product(&p.e, &p.f_t)?;
    let u_routes_agree = via_product == p.u;
    if !u_routes_agree {
        counterexamples.push(Counterexample {
            check: "u_routes".into(),
            detail: "direct formula and E_r(t)f(t) differ".into(),
        });
    }

    // (c) E_r(t) f(t)(α) is a polynomial of degree < j on grade r - j + 1.
    let mut rational_form_failures = Vec::new();
    for j in 1..=r {
        let grade = r - j + 1;
        for blade in ctx.blades(grade) {
            let alpha = Multivector::blade(ctx, blade)?;
            let image = p.f_t.apply(&alpha)?;
            let residual: Vec<Multivector> = (0..=n)
                .map(|i| {
                    let mut acc = Multivector::zero(ctx);
                    for k in 0..=r.min(i) {
                        acc.add_scaled(&p.e.signed(k), &image[i - k]);
                    }
                    if i < j {
                        let poly = via_product.get(i).apply(&alpha)?;
                        acc.add_scaled(&-Rational::one(), &poly);
                    }
                    Ok(acc)
                })
                .collect::<Result<_, CayleyError>>()?;
            if residual.iter().any(|m| !m.is_zero()) {
                counterexamples.push(Counterexample {
                    check: "rational_form".into(),
                    detail: format!("j = {j}, α = {blade}"),
                });
                rational_form_failures.push((j, blade, residual));
            }
        }
    }

    // (d) grade-0 ledger: U_i on Λ^0 is (-1)^i e_i.
    let grade0_ledger: Vec<Rational> = (0..=r)
        .map(|i| p.u.get(i).block(0).get(0, 0).clone())
        .collect();
    for (i, v) in grade0_ledger.iter().enumerate() {
        if *v != p.e.signed(i) {
            counterexamples.push(Counterexample {
                check: "grade0_ledger".into(),
                detail: format!("U_{i} on Λ^0 is {v}, expected {}", p.e.signed(i)),
            });
        }
    }

    // (e) the order-j relations read literally; recorded, not asserted.
    let mut literal_residuals = Vec::new();
    for j in 1..=r {
        for i in 0..=n - j {
            literal_residuals.push(LiteralResidual {
                j,
                i,
                grade: r - j + 1,
                residual: p.literal_residual(j, i).row_vecs(),
            });
        }
    }

    Ok(ChReport {
        classic_residuals,
        u_vanishing,
        rational_form_failures,
        grade0_ledger,
        literal_residuals,
        u_routes_agree,
        counterexamples,
    })
}

/// Outcome of a coefficientwise identity check: `(index, residual)` for
/// every index where the two sides differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub holds: bool,
    pub failures: Vec<(usize, Multivector)>,
}

impl IdentityReport {
    fn from_residuals(residuals: Vec<Multivector>) -> Self {
        let failures: Vec<_> = residuals
            .into_iter()
            .enumerate()
            .filter(|(_, m)| !m.is_zero())
            .collect();
        IdentityReport {
            holds: failures.is_empty(),
            failures,
        }
    }
}

/// Checks `D_j α ∧ β = Σ_{k=0}^{j} D_{j-k}(α ∧ D̄_k β)` for every `j`, where
/// `D̄` is the series inverse in plain coefficients. This is the
/// coefficientwise form of `D(t)α ∧ β = D(t)(α ∧ D̄(t)β)`.
pub fn integration_by_parts_check(
    d: &EndoSeries,
    alpha: &Multivector,
    beta: &Multivector,
) -> Result<IdentityReport, CayleyError> {
    if !d.coeffs()[0].is_identity() {
        return Err(EndoError::NonUnitConstantTerm.into());
    }
    let inverse = d.invert()?;
    integration_by_parts_with_inverse(d, &inverse, alpha, beta)
}

/// As [`integration_by_parts_check`], with the series inverse supplied.
pub fn integration_by_parts_with_inverse(
    d: &EndoSeries,
    inverse: &EndoSeries,
    alpha: &Multivector,
    beta: &Multivector,
) -> Result<IdentityReport, CayleyError> {
    let d_alpha = d.apply(alpha)?;
    let inv_beta = inverse.apply(beta)?;
    let wedged: Vec<Multivector> = inv_beta
        .iter()
        .map(|b| alpha.wedge(b))
        .collect::<Result<_, _>>()?;
    let residuals = (0..=d.order())
        .map(|j| {
            let mut acc = d_alpha[j].wedge(beta)?;
            for (k, w) in wedged.iter().enumerate().take(j + 1) {
                acc.add_scaled(&-Rational::one(), &d.coeffs()[j - k].apply(w)?);
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>, CayleyError>>()?;
    Ok(IdentityReport::from_residuals(residuals))
}

/// Checks `U_i(α) ∧ β = Σ_{j=0}^{i} U_{i-j}(α ∧ D_j β)` for `i ≤ N`, with
/// `D_j` the plain coefficients of `f̄(t)`.
pub fn u_wedge_identity_check(
    f: &Endomorphism,
    alpha: &Multivector,
    beta: &Multivector,
    order: usize,
) -> Result<IdentityReport, CayleyError> {
    let p = Pipeline::new(f, order)?;
    u_wedge_identity(&p, alpha, beta)
}

pub fn u_wedge_identity(
    p: &Pipeline,
    alpha: &Multivector,
    beta: &Multivector,
) -> Result<IdentityReport, CayleyError> {
    let fbar_beta = p.fbar.apply(beta)?;
    let wedged: Vec<Multivector> = fbar_beta
        .iter()
        .map(|b| alpha.wedge(b))
        .collect::<Result<_, _>>()?;
    let residuals = (0..=p.order)
        .map(|i| {
            let mut acc = p.u.get(i).apply(alpha)?.wedge(beta)?;
            for (j, w) in wedged.iter().enumerate().take(i + 1) {
                if w.is_zero() {
                    continue;
                }
                acc.add_scaled(&-Rational::one(), &p.u.get(i - j).apply(w)?);
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>, CayleyError>>()?;
    Ok(IdentityReport::from_residuals(residuals))
}

/// `D_i` acts as zero on `Λ^0` for `i ≥ 1` and as the identity for `i = 0`.
pub fn grade0_is_unit(d: &EndoSeries) -> bool {
    d.coeffs().iter().enumerate().all(|(i, c)| {
        let x = c.block(0).get(0, 0);
        if i == 0 {
            x.is_one()
        } else {
            x.is_zero()
        }
    })
}
