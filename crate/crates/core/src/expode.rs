//! Truncated scalar series, the formal Laplace transform, solution bases of
//! the linear ODE attached to a characteristic polynomial, and three exact
//! routes to the series of `exp(ft)`.
//!
//! An [`EgfSeries`] stores `y_n` for `Σ y_n t^n / n!`, so differentiation is
//! a left shift and the ODE
//! `y^(r) - e_1 y^(r-1) + ... + (-1)^r e_r y = 0` becomes the recurrence
//! `y_{n+r} = Σ_{k=1}^{r} (-1)^{k+1} e_k y_{n+r-k}`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cayley::{CayleyError, CharCoeffs, Endomorphism, Pipeline};
use crate::matrix::Matrix;
use crate::scalar::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("series has no coefficients")]
    Empty,
    #[error("constant term is zero, series is not invertible")]
    NotInvertible,
    #[error("series order {order} below ODE order {rank}")]
    OrderBelowRank { order: usize, rank: usize },
    #[error("series kind mismatch: expected {expected}, found {found}")]
    KindMismatch { expected: String, found: String },
    #[error("order {order} does not match {len} coefficients")]
    LengthMismatch { order: usize, len: usize },
    #[error(transparent)]
    Cayley(#[from] CayleyError),
}

/// `c_0 + c_1 t + ... + c_N t^N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarSeries {
    coeffs: Vec<Rational>,
}

impl ScalarSeries {
    pub fn new(coeffs: Vec<Rational>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::Empty);
        }
        Ok(ScalarSeries { coeffs })
    }

    pub fn one(order: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); order + 1];
        coeffs[0] = Rational::one();
        ScalarSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Rational {
        self.coeffs.get(n).cloned().unwrap_or_default()
    }

    /// Cauchy product through the smaller order.
    pub fn mul(&self, other: &ScalarSeries) -> ScalarSeries {
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|k| {
                (0..=k)
                    .map(|i| &self.coeffs[i] * &other.coeffs[k - i])
                    .sum()
            })
            .collect();
        ScalarSeries { coeffs }
    }

    /// Multiplicative inverse through the same order.
    pub fn inverse(&self) -> Result<ScalarSeries, SeriesError> {
        let c0_inv = self.coeffs[0]
            .inv()
            .map_err(|_| SeriesError::NotInvertible)?;
        let mut out: Vec<Rational> = Vec::with_capacity(self.coeffs.len());
        out.push(c0_inv.clone());
        for n in 1..self.coeffs.len() {
            let acc: Rational = (1..=n).map(|k| &self.coeffs[k] * &out[n - k]).sum();
            out.push(-(acc * &c0_inv));
        }
        Ok(ScalarSeries { coeffs: out })
    }

    /// `t^j · self`, keeping the order.
    pub fn shift(&self, j: usize) -> ScalarSeries {
        let n = self.coeffs.len();
        let coeffs = (0..n)
            .map(|i| {
                if i >= j {
                    self.coeffs[i - j].clone()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        ScalarSeries { coeffs }
    }
}

/// `Σ y_n t^n / n!`, storing `y_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EgfSeries {
    coeffs: Vec<Rational>,
}

impl EgfSeries {
    pub fn new(coeffs: Vec<Rational>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::Empty);
        }
        Ok(EgfSeries { coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Ordinary coefficients `y_n / n!`.
    pub fn to_ordinary(&self) -> ScalarSeries {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, y)| y / &Rational::from_factorial(n))
            .collect();
        ScalarSeries { coeffs }
    }

    pub fn from_ordinary(s: &ScalarSeries) -> EgfSeries {
        let coeffs = s
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| a * &Rational::from_factorial(n))
            .collect();
        EgfSeries { coeffs }
    }

    /// Formal derivative; the order drops by one. `None` at order 0.
    pub fn derivative(&self) -> Option<EgfSeries> {
        (self.coeffs.len() > 1).then(|| EgfSeries {
            coeffs: self.coeffs[1..].to_vec(),
        })
    }

    /// Exact partial sum `Σ_{n ≤ N} y_n t0^n / n!`.
    pub fn evaluate(&self, t0: &Rational) -> Rational {
        let mut term = Rational::one();
        let mut acc = Rational::zero();
        for (n, y) in self.coeffs.iter().enumerate() {
            if n > 0 {
                term = &term * &(t0 / &Rational::from(n as i64));
            }
            acc += &(y * &term);
        }
        acc
    }
}

/// `L(Σ a_n t^n) = Σ n! a_n t^n`: the ordinary coefficients of `s` scaled
/// by `n!`.
pub fn laplace(s: &EgfSeries) -> ScalarSeries {
    let ordinary = s.to_ordinary();
    let coeffs = ordinary
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, a)| a * &Rational::from_factorial(n))
        .collect();
    ScalarSeries { coeffs }
}

/// `L^{-1}(Σ c_n t^n) = Σ c_n t^n / n!`.
pub fn laplace_inv(s: &ScalarSeries) -> EgfSeries {
    let ordinary = ScalarSeries {
        coeffs: s
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c / &Rational::from_factorial(n))
            .collect(),
    };
    EgfSeries::from_ordinary(&ordinary)
}

/// `E_r(t) = 1 - e_1 t + ... + (-1)^r e_r t^r`, through `t^order`.
pub fn ert_series(e: &CharCoeffs, order: usize) -> ScalarSeries {
    ScalarSeries {
        coeffs: (0..=order).map(|k| e.signed(k)).collect(),
    }
}

/// `H_r(t) = 1 / E_r(t)`, through `t^order`.
pub fn h_series(e: &CharCoeffs, order: usize) -> ScalarSeries {
    ert_series(e, order)
        .inverse()
        .expect("E_r has constant term 1")
}

fn require_order(order: usize, rank: usize) -> Result<(), SeriesError> {
    if order < rank {
        return Err(SeriesError::OrderBelowRank { order, rank });
    }
    Ok(())
}

/// `u_{-j} = L^{-1}(t^j H_r(t))` for `j = 0..r`.
pub fn u_basis(e: &CharCoeffs, order: usize) -> Result<Vec<EgfSeries>, SeriesError> {
    require_order(order, e.rank())?;
    let h = h_series(e, order);
    Ok((0..e.rank()).map(|j| laplace_inv(&h.shift(j))).collect())
}

/// The standard basis: `v_j` solves the ODE with `v_j^(i)(0) = δ_ij`.
pub fn v_basis(e: &CharCoeffs, order: usize) -> Result<Vec<EgfSeries>, SeriesError> {
    let r = e.rank();
    require_order(order, r)?;
    Ok((0..r)
        .map(|j| {
            let mut y = vec![Rational::zero(); order + 1];
            y[j] = Rational::one();
            for n in r..=order {
                let next: Rational = (1..=r)
                    .map(|k| &(e.get(k) * Rational::sign(k + 1)) * &y[n - k])
                    .sum();
                y[n] = next;
            }
            EgfSeries { coeffs: y }
        })
        .collect())
}

/// `y^(r) - e_1 y^(r-1) + ... + (-1)^r e_r y` through `t^{N-r}`, via
/// coefficient shifts.
pub fn ode_residual(y: &EgfSeries, e: &CharCoeffs) -> Result<EgfSeries, SeriesError> {
    let r = e.rank();
    require_order(y.order(), r)?;
    let coeffs = (0..=y.order() - r)
        .map(|n| (0..=r).map(|k| &e.signed(k) * &y.coeffs[n + r - k]).sum())
        .collect();
    Ok(EgfSeries { coeffs })
}

/// Same residual, built from repeated formal derivatives.
pub fn ode_residual_by_derivatives(
    y: &EgfSeries,
    e: &CharCoeffs,
) -> Result<EgfSeries, SeriesError> {
    let r = e.rank();
    require_order(y.order(), r)?;
    let mut derivs = vec![y.clone()];
    for _ in 0..r {
        let d =
            derivs
                .last()
                .and_then(EgfSeries::derivative)
                .ok_or(SeriesError::OrderBelowRank {
                    order: y.order(),
                    rank: r,
                })?;
        derivs.push(d);
    }
    let len = y.order() - r + 1;
    let mut acc = vec![Rational::zero(); len];
    for k in 0..=r {
        let c = e.signed(k);
        for (slot, v) in acc.iter_mut().zip(&derivs[r - k].coeffs) {
            *slot += &(&c * v);
        }
    }
    Ok(EgfSeries { coeffs: acc })
}

/// Series of `r×r` matrices in EGF convention: coefficient `n` of `exp(ft)`
/// is `f^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixEgf {
    coeffs: Vec<Matrix>,
}

impl MatrixEgf {
    pub fn coeffs(&self) -> &[Matrix] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Exact partial sum at `t0`.
    pub fn evaluate(&self, t0: &Rational) -> Matrix {
        let n = self.coeffs[0].rows();
        let mut acc = Matrix::zeros(n, n);
        let mut term = Rational::one();
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                term = &term * &(t0 / &Rational::from(k as i64));
            }
            acc.add_scaled(&term, c);
        }
        acc
    }

    fn combination(rank: usize, order: usize, terms: &[(&Matrix, &EgfSeries)]) -> MatrixEgf {
        let coeffs = (0..=order)
            .map(|n| {
                let mut acc = Matrix::zeros(rank, rank);
                for (m, s) in terms {
                    acc.add_scaled(&s.coeffs[n], m);
                }
                acc
            })
            .collect();
        MatrixEgf { coeffs }
    }
}

impl Serialize for MatrixEgf {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.coeffs.iter().map(Matrix::row_vecs))
    }
}

/// `p_k(f) = f^k - e_1 f^{k-1} + ... + (-1)^k e_k` for `k = 0..r`.
pub fn putzer_polynomials(f: &Endomorphism, e: &CharCoeffs) -> Vec<Matrix> {
    let r = f.rank();
    let powers = f.matrix().powers(r);
    (0..r)
        .map(|k| {
            let mut acc = Matrix::zeros(r, r);
            for i in 0..=k {
                acc.add_scaled(&e.signed(i), &powers[k - i]);
            }
            acc
        })
        .collect()
}

/// `exp(ft) = Σ_{k<r} p_k(f) u_{-k}(t)`.
pub fn expm_putzer(f: &Endomorphism, order: usize) -> Result<MatrixEgf, SeriesError> {
    let e = crate::cayley::char_coeffs(f)?;
    let u = u_basis(&e, order)?;
    let p = putzer_polynomials(f, &e);
    let terms: Vec<_> = p.iter().zip(&u).collect();
    Ok(MatrixEgf::combination(f.rank(), order, &terms))
}

/// `exp(ft) = Σ_{j<r} v_j(t) f^j`.
pub fn expm_leonard(f: &Endomorphism, order: usize) -> Result<MatrixEgf, SeriesError> {
    let e = crate::cayley::char_coeffs(f)?;
    let v = v_basis(&e, order)?;
    let powers = f.matrix().powers(f.rank() - 1);
    let terms: Vec<_> = powers.iter().zip(&v).collect();
    Ok(MatrixEgf::combination(f.rank(), order, &terms))
}

/// `exp(ft) = Σ f^n t^n / n!` by repeated multiplication.
pub fn expm_taylor(f: &Endomorphism, order: usize) -> MatrixEgf {
    let m = f.matrix();
    let mut coeffs = vec![Matrix::identity(f.rank())];
    for n in 1..=order {
        let next = coeffs[n - 1].matmul(m).expect("square");
        coeffs.push(next);
    }
    MatrixEgf { coeffs }
}

/// Outcome of checking `Σ f_n t^n/n! = Σ_{j<r} U_j u_{-j}(t)` on grades ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EgfIdentityReport {
    /// `(grade, n)` where the two sides differ.
    pub identity_failures: Vec<(usize, usize)>,
    /// `(grade, n)` where the ODE residual of `Σ f_n t^n/n!` is nonzero.
    pub ode_failures: Vec<(usize, usize)>,
    /// Coefficients of the ODE residual on `Λ^0`, recorded only.
    pub grade0_residual: Vec<Rational>,
}

impl EgfIdentityReport {
    pub fn holds(&self) -> bool {
        self.identity_failures.is_empty() && self.ode_failures.is_empty()
    }
}

pub fn endo_egf_identity(f: &Endomorphism, order: usize) -> Result<EgfIdentityReport, SeriesError> {
    let min = 2 * f.rank();
    if order < min {
        return Err(CayleyError::OrderTooSmall { order, min }.into());
    }
    let p = Pipeline::new(f, order)?;
    egf_identity(&p)
}

pub fn egf_identity(p: &Pipeline) -> Result<EgfIdentityReport, SeriesError> {
    let r = p.rank();
    let n_max = p.order;
    let u = u_basis(&p.e, n_max)?;
    let ctx = p.context();
    let mut identity_failures = Vec::new();
    let mut ode_failures = Vec::new();
    for grade in 1..=r {
        let dim = ctx.grade_dim(grade);
        let f_n = |n: usize| p.f_t.coeffs()[n].block(grade);
        for n in 0..=n_max {
            let mut rhs = Matrix::zeros(dim, dim);
            for (j, uj) in u.iter().enumerate() {
                rhs.add_scaled(&uj.coeffs[n], p.u.get(j).block(grade));
            }
            if &rhs != f_n(n) {
                identity_failures.push((grade, n));
            }
        }
        for n in 0..=n_max - r {
            let mut acc = Matrix::zeros(dim, dim);
            for k in 0..=r {
                acc.add_scaled(&p.e.signed(k), f_n(n + r - k));
            }
            if !acc.is_zero() {
                ode_failures.push((grade, n));
            }
        }
    }
    let grade0 = EgfSeries {
        coeffs: p
            .f_t
            .coeffs()
            .iter()
            .map(|c| c.block(0).get(0, 0).clone())
            .collect(),
    };
    let grade0_residual = ode_residual(&grade0, &p.e)?.coeffs;
    Ok(EgfIdentityReport {
        identity_failures,
        ode_failures,
        grade0_residual,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesRepr {
    kind: String,
    order: usize,
    coeffs: Vec<Rational>,
}

impl SeriesRepr {
    fn check(self, expected: &str) -> Result<Vec<Rational>, SeriesError> {
        if self.kind != expected {
            return Err(SeriesError::KindMismatch {
                expected: expected.into(),
                found: self.kind,
            });
        }
        if self.coeffs.len() != self.order.saturating_add(1) {
            return Err(SeriesError::LengthMismatch {
                order: self.order,
                len: self.coeffs.len(),
            });
        }
        Ok(self.coeffs)
    }
}

macro_rules! series_serde {
    ($ty:ident, $kind:literal) => {
        impl Serialize for $ty {
            fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                SeriesRepr {
                    kind: $kind.into(),
                    order: self.order(),
                    coeffs: self.coeffs.clone(),
                }
                .serialize(serializer)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let coeffs = SeriesRepr::deserialize(deserializer)?
                    .check($kind)
                    .map_err(serde::de::Error::custom)?;
                $ty::new(coeffs).map_err(serde::de::Error::custom)
            }
        }
    };
}

series_serde!(ScalarSeries, "ordinary");
series_serde!(EgfSeries, "egf");

/// A series JSON document of either kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnySeries {
    Ordinary(ScalarSeries),
    Egf(EgfSeries),
}

impl<'de> Deserialize<'de> for AnySeries {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = SeriesRepr::deserialize(deserializer)?;
        match repr.kind.as_str() {
            "ordinary" => Ok(AnySeries::Ordinary(
                ScalarSeries::new(repr.check("ordinary").map_err(D::Error::custom)?)
                    .map_err(D::Error::custom)?,
            )),
            "egf" => Ok(AnySeries::Egf(
                EgfSeries::new(repr.check("egf").map_err(D::Error::custom)?)
                    .map_err(D::Error::custom)?,
            )),
            other => Err(D::Error::custom(format!("unknown series kind {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from(x)).collect()
    }

    fn e(v: &[i64]) -> CharCoeffs {
        CharCoeffs::from_values(ints(v)).unwrap()
    }

    fn endo(rows: &[&[i64]]) -> Endomorphism {
        Endomorphism::new(Matrix::from_i64(rows)).unwrap()
    }

    /// Long division of 1 by `den`, independent of `ScalarSeries::inverse`.
    fn long_division(den: &[i64], n: usize) -> Vec<Rational> {
        let mut rem: Vec<Rational> = vec![Rational::zero(); n + den.len()];
        rem[0] = Rational::one();
        let mut q = Vec::new();
        let d0 = Rational::from(den[0]);
        for i in 0..=n {
            let c = &rem[i] / &d0;
            for (k, &d) in den.iter().enumerate() {
                let sub = &c * &Rational::from(d);
                rem[i + k] -= &sub;
            }
            q.push(c);
        }
        q
    }

    #[test]
    fn ert_examples() {
        assert_eq!(ert_series(&e(&[0, 0]), 4).coeffs(), ints(&[1, 0, 0, 0, 0]));
        assert_eq!(ert_series(&e(&[5, -2]), 3).coeffs(), ints(&[1, -5, -2, 0]));
        assert_eq!(ert_series(&e(&[0, 1]), 3).coeffs(), ints(&[1, 0, 1, 0]));
    }

    #[test]
    fn h_examples() {
        assert_eq!(h_series(&e(&[0, 0]), 4).coeffs(), ints(&[1, 0, 0, 0, 0]));
        let oracle = long_division(&[1, -5, -2], 6);
        assert_eq!(&oracle[..4], ints(&[1, 5, 27, 145]).as_slice());
        assert_eq!(h_series(&e(&[5, -2]), 6).coeffs(), oracle.as_slice());
        assert_eq!(
            h_series(&e(&[0, 1]), 6).coeffs(),
            ints(&[1, 0, -1, 0, 1, 0, -1])
        );
        let e_t = ert_series(&e(&[5, -2]), 10);
        assert_eq!(e_t.mul(&h_series(&e(&[5, -2]), 10)), ScalarSeries::one(10));
    }

    #[test]
    fn laplace_examples() {
        let geometric = ScalarSeries::new(vec![Rational::one(); 7]).unwrap();
        let exp = laplace_inv(&geometric);
        assert_eq!(exp.coeffs(), vec![Rational::one(); 7].as_slice());
        let ordinary = exp.to_ordinary();
        assert_eq!(ordinary.coeff(3), Rational::new(1, 6));
        assert_eq!(laplace(&exp), geometric);
        assert_eq!(
            laplace_inv(&ScalarSeries::one(0)).coeffs(),
            ints(&[1]).as_slice()
        );
    }

    #[test]
    fn u_basis_examples() {
        let u = u_basis(&e(&[0, 1]), 6).unwrap();
        assert_eq!(u[0].coeffs(), ints(&[1, 0, -1, 0, 1, 0, -1]));
        assert_eq!(u[1].coeffs(), ints(&[0, 1, 0, -1, 0, 1, 0]));
        let u = u_basis(&e(&[3]), 5).unwrap();
        assert_eq!(u[0].coeffs(), ints(&[1, 3, 9, 27, 81, 243]));
        assert!(u_basis(&e(&[0, 1]), 1).is_err());
    }

    #[test]
    fn v_basis_examples() {
        let v = v_basis(&e(&[0, 0, 0]), 5).unwrap();
        for (j, vj) in v.iter().enumerate() {
            let mut want = vec![Rational::zero(); 6];
            want[j] = Rational::one();
            assert_eq!(vj.coeffs(), want.as_slice());
        }
        let v = v_basis(&e(&[0, 1]), 6).unwrap();
        assert_eq!(v[0].coeffs(), ints(&[1, 0, -1, 0, 1, 0, -1]));
        assert_eq!(v[1].coeffs(), ints(&[0, 1, 0, -1, 0, 1, 0]));
        let v = v_basis(&e(&[-2]), 4).unwrap();
        assert_eq!(v[0].coeffs(), ints(&[1, -2, 4, -8, 16]));
    }

    #[test]
    fn ode_residual_examples() {
        let coeffs = e(&[5, -2]);
        for y in u_basis(&coeffs, 10)
            .unwrap()
            .iter()
            .chain(&v_basis(&coeffs, 10).unwrap())
        {
            assert!(ode_residual(y, &coeffs)
                .unwrap()
                .coeffs()
                .iter()
                .all(Rational::is_zero));
        }
        let constant = EgfSeries::new(ints(&[1, 0, 0, 0, 0])).unwrap();
        let res = ode_residual(&constant, &coeffs).unwrap();
        assert_eq!(res.coeffs(), ints(&[-2, 0, 0]).as_slice());
        assert_eq!(
            ode_residual_by_derivatives(&constant, &coeffs).unwrap(),
            res
        );
        assert!(matches!(
            ode_residual(&EgfSeries::new(ints(&[1])).unwrap(), &coeffs),
            Err(SeriesError::OrderBelowRank { .. })
        ));
    }

    #[test]
    fn expm_examples() {
        let zero = endo(&[&[0, 0], &[0, 0]]);
        let p = expm_putzer(&zero, 5).unwrap();
        assert!(p.coeffs()[0].is_identity());
        assert!(p.coeffs()[1..].iter().all(Matrix::is_zero));
        assert!(zero_at(&p));

        let rot = endo(&[&[0, 1], &[-1, 0]]);
        let p = expm_putzer(&rot, 8).unwrap();
        let cos = ints(&[1, 0, -1, 0, 1, 0, -1, 0, 1]);
        let sin = ints(&[0, 1, 0, -1, 0, 1, 0, -1, 0]);
        for n in 0..=8 {
            let mut want = Matrix::scalar(2, &cos[n]);
            want.add_scaled(&sin[n], rot.matrix());
            assert_eq!(p.coeffs()[n], want);
        }
        assert_eq!(expm_leonard(&rot, 8).unwrap(), p);

        let nil = endo(&[&[0, 1], &[0, 0]]);
        let l = expm_leonard(&nil, 6).unwrap();
        assert!(l.coeffs()[0].is_identity());
        assert_eq!(l.coeffs()[1], *nil.matrix());
        assert!(l.coeffs()[2..].iter().all(Matrix::is_zero));

        let diag = endo(&[&[1, 0], &[0, 2]]);
        let l = expm_leonard(&diag, 10).unwrap();
        for (n, c) in l.coeffs().iter().enumerate() {
            assert_eq!(
                *c,
                Matrix::diagonal(&[Rational::one(), Rational::from(1i64 << n)])
            );
        }

        let f = endo(&[&[1, 2], &[3, 4]]);
        let t = expm_taylor(&f, 6);
        assert_eq!(t.coeffs()[2], Matrix::from_i64(&[&[7, 10], &[15, 22]]));
        assert_eq!(expm_putzer(&f, 6).unwrap(), t);
        assert!(expm_taylor(&endo(&[&[1, 0], &[0, 1]]), 4)
            .coeffs()
            .iter()
            .all(Matrix::is_identity));
    }

    fn zero_at(p: &MatrixEgf) -> bool {
        p.evaluate(&Rational::from(5)).is_identity()
    }

    #[test]
    fn evaluation_is_exact_partial_sum() {
        let f = endo(&[&[1]]);
        let t = expm_taylor(&f, 4);
        // 1 + 1 + 1/2 + 1/6 + 1/24
        assert_eq!(
            *t.evaluate(&Rational::one()).get(0, 0),
            Rational::new(65, 24)
        );
        let y = EgfSeries::new(ints(&[1, 1, 1])).unwrap();
        assert_eq!(y.evaluate(&Rational::from(2)), Rational::from(5));
    }

    #[test]
    fn egf_identity_examples() {
        let nil = endo(&[&[0, 1], &[0, 0]]);
        let report = endo_egf_identity(&nil, 6).unwrap();
        assert!(report.holds());
        let f = endo(&[&[1, 2], &[3, 4]]);
        let report = endo_egf_identity(&f, 10).unwrap();
        assert!(report.holds());
        // On Λ^0 the constant 1 leaves (-1)^r e_r = -2 behind.
        assert_eq!(report.grade0_residual[0], Rational::from(-2));
        assert!(endo_egf_identity(&f, 3).is_err());
    }

    #[test]
    fn series_json() {
        let s = ScalarSeries::new(vec![Rational::one(), Rational::new(-1, 2)]).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(
            text,
            r#"{"kind":"ordinary","order":1,"coeffs":["1","-1/2"]}"#
        );
        assert_eq!(serde_json::from_str::<ScalarSeries>(&text).unwrap(), s);
        assert!(serde_json::from_str::<EgfSeries>(&text).is_err());
        assert!(matches!(
            serde_json::from_str::<AnySeries>(&text).unwrap(),
            AnySeries::Ordinary(_)
        ));
        for bad in [
            r#"{"kind":"egf","order":2,"coeffs":["1"]}"#,
            r#"{"kind":"egf","order":0,"coeffs":[]}"#,
            r#"{"kind":"weird","order":0,"coeffs":["1"]}"#,
            r#"{"kind":"egf","order":18446744073709551615,"coeffs":["1"]}"#,
        ] {
            assert!(serde_json::from_str::<AnySeries>(bad).is_err(), "{bad}");
        }
    }
}
