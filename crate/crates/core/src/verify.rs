//! The combined verification report for one endomorphism: the graded
//! Cayley-Hamilton checks plus the HS, integration-by-parts, `U`-wedge and
//! exponential-series identities on a deterministic sample set.

use serde::Serialize;

use crate::cayley::{
    ch_report, grade0_is_unit, integration_by_parts_with_inverse, u_wedge_identity, CayleyError,
    Counterexample, Endomorphism, LiteralResidual, Pipeline, UVanishing,
};
use crate::endoseries::{is_derivation, EndoError};
use crate::expode::{egf_identity, SeriesError};
use crate::exterior::{Blade, Context, Multivector};
use crate::scalar::Rational;

/// Default truncation order `max(2r, 8)`.
pub fn default_order(rank: usize) -> usize {
    (2 * rank).max(8)
}

/// Deterministic multivector pairs: every pair of basis blades for small
/// rank, a strided subset otherwise, plus two dense pairs when affordable.
pub fn default_samples(ctx: Context) -> Vec<(Multivector, Multivector)> {
    let total = 1u32 << ctx.rank();
    let blade = |m: u32| Multivector::blade(ctx, Blade::from_mask(m)).expect("in range");
    let mut samples = Vec::new();
    if total <= 16 {
        for a in 0..total {
            for b in 0..total {
                samples.push((blade(a), blade(b)));
            }
        }
    } else {
        for a in 0..total.min(256) {
            samples.push((blade(a), blade((a * 7 + 3) % total)));
        }
    }
    if ctx.rank() <= 6 {
        let dense = |f: &dyn Fn(u32) -> i64| {
            Multivector::from_terms(
                ctx,
                (0..total).map(|m| (Blade::from_mask(m), Rational::from(f(m)))),
            )
            .expect("in range")
        };
        let a = dense(&|m| i64::from(m) + 1);
        let b = dense(&|m| if m % 2 == 0 { 1 } else { -2 } * (i64::from(m % 3) + 1));
        let c = dense(&|m| i64::from(m % 5) - 2);
        samples.push((a.clone(), b.clone()));
        samples.push((b, &c.scale(&Rational::new(1, 3)) + &a));
    }
    samples
}

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Cayley(#[from] CayleyError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

impl From<EndoError> for VerifyError {
    fn from(e: EndoError) -> Self {
        VerifyError::Cayley(e.into())
    }
}

/// Serialized as the `verify` command's JSON report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub rank: usize,
    pub order: usize,
    pub e: Vec<Rational>,
    /// All asserted identities hold; literal residuals never affect this.
    pub verified: bool,
    pub classic_ch: bool,
    pub u_vanishing: Vec<UVanishing>,
    pub rational_form: bool,
    pub u_routes_agree: bool,
    pub hs_multiplicative: bool,
    pub integration_by_parts: bool,
    pub lemma_u_wedge: bool,
    pub egf_identity: bool,
    pub grade0_ledger: Vec<Rational>,
    pub literal_theorem_residuals: Vec<LiteralResidual>,
    pub counterexamples: Vec<Counterexample>,
}

impl VerifyReport {
    /// Keeps only the entries concerning grade `h`.
    pub fn filter_grade(&mut self, grade: usize) {
        self.u_vanishing.retain(|u| u.grade == grade);
        self.literal_theorem_residuals.retain(|r| r.grade == grade);
    }
}

fn counterexample(check: &str, detail: String) -> Counterexample {
    Counterexample {
        check: check.into(),
        detail,
    }
}

pub fn verify(f: &Endomorphism, order: usize) -> Result<VerifyReport, VerifyError> {
    let samples = default_samples(f.context());
    verify_with_samples(f, order, &samples)
}

pub fn verify_with_samples(
    f: &Endomorphism,
    order: usize,
    samples: &[(Multivector, Multivector)],
) -> Result<VerifyReport, VerifyError> {
    let p = Pipeline::new(f, order)?;
    let ch = ch_report(&p)?;
    let mut counterexamples = ch.counterexamples.clone();

    let mut hs_multiplicative = true;
    for (name, series) in [("fbar", &p.fbar), ("f", &p.f_t)] {
        let report = series.is_hs(samples)?;
        for fail in &report.failures {
            counterexamples.push(counterexample(
                "hs_multiplicative",
                format!("{name}: sample {} at t^{}", fail.sample, fail.index),
            ));
        }
        if !grade0_is_unit(series) {
            counterexamples.push(counterexample(
                "hs_multiplicative",
                format!("{name}: grade 0"),
            ));
        }
        if series.order() >= 1 && !is_derivation(&series.coeffs()[1], samples)? {
            counterexamples.push(counterexample(
                "hs_multiplicative",
                format!("{name}: D_1 Leibniz"),
            ));
        }
        hs_multiplicative &= report.holds;
    }
    hs_multiplicative &= !counterexamples
        .iter()
        .any(|c| c.check == "hs_multiplicative");

    let mut integration_by_parts = true;
    let mut lemma_u_wedge = true;
    for (s, (alpha, beta)) in samples.iter().enumerate() {
        let ibp = integration_by_parts_with_inverse(&p.fbar, &p.f_t, alpha, beta)?;
        for (j, _) in &ibp.failures {
            counterexamples.push(counterexample(
                "integration_by_parts",
                format!("sample {s} at t^{j}"),
            ));
        }
        integration_by_parts &= ibp.holds;
        let lemma = u_wedge_identity(&p, alpha, beta)?;
        for (i, _) in &lemma.failures {
            counterexamples.push(counterexample(
                "lemma_u_wedge",
                format!("sample {s} at i = {i}"),
            ));
        }
        lemma_u_wedge &= lemma.holds;
    }

    let egf = egf_identity(&p)?;
    for (grade, n) in &egf.identity_failures {
        counterexamples.push(counterexample(
            "egf_identity",
            format!("grade {grade}, n = {n}"),
        ));
    }
    for (grade, n) in &egf.ode_failures {
        counterexamples.push(counterexample("egf_ode", format!("grade {grade}, n = {n}")));
    }

    let verified = counterexamples.is_empty()
        && ch.holds()
        && hs_multiplicative
        && integration_by_parts
        && lemma_u_wedge
        && egf.holds();

    Ok(VerifyReport {
        rank: f.rank(),
        order,
        e: p.e.values().to_vec(),
        verified,
        classic_ch: ch.classic_ch(),
        u_vanishing: ch.u_vanishing.clone(),
        rational_form: ch.rational_form(),
        u_routes_agree: ch.u_routes_agree,
        hs_multiplicative,
        integration_by_parts,
        lemma_u_wedge,
        egf_identity: egf.holds(),
        grade0_ledger: ch.grade0_ledger.clone(),
        literal_theorem_residuals: ch.literal_residuals,
        counterexamples,
    })
}
