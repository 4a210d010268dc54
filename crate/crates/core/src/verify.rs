//! Identity-verification suites. Each suite enumerates its cases in a fixed
//! order, runs them in parallel and reports every case with its parameters.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{format_rational, RationalFunction};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::field::{Field, PadicQ, QField, RationalQ, SymbolicQ};
use crate::measure::{
    ball_measure, bosonic_power_moment, fermionic_finite_rhs, fermionic_measure_limit,
    fermionic_power_moment, integrate, riemann_sum, BuiltinIntegrand, MeasureKind, MeasureSpec,
};
use crate::numbers::{
    beta_number, beta_polynomial, beta_polynomial_integral, k_chi_closed, k_chi_decomposed_finite,
    k_chi_integral, k_chi_riemann_finite, k_distribution_rhs, k_number, k_polynomial,
    k_polynomial_integral, Form, IntegralOptions,
};
use crate::padic::{PadicNumber, ProfiniteDomain, DEFAULT_BALL_BUDGET};
use crate::series::{bernoulli_limits, exp_t, f_q_coefficient_partial, f_q_series, limit_consistency, TruncatedSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Measure,
    Eq3Eq5,
    Eq4,
    Eq7,
    Eq8Eq10,
    BetaForms,
    Limits,
    Genfun,
    Integral,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Measure,
        Suite::Eq3Eq5,
        Suite::Eq4,
        Suite::Eq7,
        Suite::Eq8Eq10,
        Suite::BetaForms,
        Suite::Limits,
        Suite::Genfun,
        Suite::Integral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Measure => "measure",
            Suite::Eq3Eq5 => "eq3_eq5",
            Suite::Eq4 => "eq4",
            Suite::Eq7 => "eq7",
            Suite::Eq8Eq10 => "eq8_eq10",
            Suite::BetaForms => "beta_forms",
            Suite::Limits => "limits",
            Suite::Genfun => "genfun",
            Suite::Integral => "integral",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown suite {s:?}")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Overrides for the default case grids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyConfig {
    /// Largest `n` where the suite has an `n` range.
    pub n_max: Option<u32>,
    /// The `m` values of the distribution suite.
    pub m_values: Option<Vec<u64>>,
    pub cap: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { n_max: None, m_values: None, cap: DEFAULT_BALL_BUDGET }
    }
}

impl VerifyConfig {
    /// Rejects parameters outside the suites' preconditions before anything runs.
    pub fn validate(&self) -> Result<()> {
        if let Some(ms) = &self.m_values {
            if let Some(&m) = ms.iter().find(|&&m| m % 2 == 0) {
                return Err(Error::EvenParameter { what: "m", value: m });
            }
        }
        Ok(())
    }

    fn n_max(&self, default: u32) -> u32 {
        self.n_max.unwrap_or(default)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseResult {
    pub case: String,
    pub params: Value,
    pub pass: bool,
    /// Reported but not counted towards the suite verdict.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub informational: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub pass: bool,
    pub cases: Vec<CaseResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub suites: Vec<SuiteReport>,
}

type CaseFn = Box<dyn Fn() -> Result<Outcome> + Send + Sync>;

struct Outcome {
    pass: bool,
    detail: Option<String>,
}

impl Outcome {
    fn equal<T: PartialEq + fmt::Debug>(a: &T, b: &T) -> Self {
        if a == b {
            Outcome { pass: true, detail: None }
        } else {
            Outcome { pass: false, detail: Some(format!("{a:?} != {b:?}")) }
        }
    }

    fn check(pass: bool, detail: String) -> Self {
        Outcome { pass, detail: Some(detail) }
    }
}

struct Case {
    name: &'static str,
    params: Value,
    informational: bool,
    run: CaseFn,
}

fn case<G>(name: &'static str, params: Value, run: G) -> Case
where
    G: Fn() -> Result<Outcome> + Send + Sync + 'static,
{
    Case { name, params, informational: false, run: Box::new(run) }
}

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn xs(values: &[(i64, i64)]) -> Vec<BigRational> {
    values.iter().map(|&(n, d)| r(n, d)).collect()
}

/// Root order that makes `q^x` available.
fn root_order_for(x: &BigRational) -> Result<SymbolicQ> {
    let d = u32::try_from(x.denom().clone()).map_err(|_| Error::Invalid("denominator too large".into()))?;
    SymbolicQ::new(d)
}

fn padic_q(q: i64, p: u64, precision: u32) -> Result<PadicQ> {
    PadicQ::from_rational(&r(q, 1), p, precision)
}

/// The symbolic element evaluated at an integer `q`, read p-adically.
fn at_q(e: &RationalFunction, field: &PadicQ) -> Result<PadicNumber> {
    let q = field.value().residue().ok_or_else(|| Error::Invalid("q is not integral".into()))?;
    let q = BigRational::from_integer(q.into());
    PadicNumber::from_rational(&e.evaluate(&q)?, field.prime(), field.precision())
}

fn agreement(a: &PadicNumber, b: &PadicNumber, digits: i64) -> Result<Outcome> {
    let v = a.sub(b)?.valuation().lower_bound();
    Ok(Outcome::check(v >= digits, format!("v_p(difference) >= {v}, need {digits}")))
}

fn measure_cases(cfg: &VerifyConfig) -> Vec<Case> {
    let cap = cfg.cap;
    let mut cases = Vec::new();
    for kind in [MeasureKind::Bosonic, MeasureKind::Fermionic] {
        for p in [3u64, 5] {
            for d in [1u64, 3] {
                if d % p == 0 {
                    continue;
                }
                for level in 1..=3u32 {
                    let params = json!({"kind": kind, "p": p, "d": d, "N": level});
                    cases.push(case("additivity", params.clone(), move || {
                        let spec = MeasureSpec::new(kind, SymbolicQ::new(1)?, ProfiniteDomain::new(p, d)?)?;
                        let f = spec.field();
                        let m = spec.domain().level_size(level, cap)?;
                        let mut pass = true;
                        // Both ends of the range and a spread of interior balls.
                        for a in [0, 1, m / 2, (7919 * level as u64) % m, m - 1] {
                            let whole = ball_measure(&spec, a, level, cap)?;
                            let parts = f.sum(
                                (0..p)
                                    .map(|i| ball_measure(&spec, a + i * m, level + 1, cap))
                                    .collect::<Result<Vec<_>>>()?,
                            );
                            pass &= whole == parts;
                        }
                        Ok(Outcome { pass, detail: None })
                    }));
                    cases.push(case("total_mass", params, move || {
                        let spec = MeasureSpec::new(kind, SymbolicQ::new(1)?, ProfiniteDomain::new(p, d)?)?;
                        let m = spec.domain().level_size(level, cap)?;
                        let masses = (0..m).map(|a| ball_measure(&spec, a, level, cap)).collect::<Result<Vec<_>>>()?;
                        let total = spec.field().sum(masses);
                        Ok(Outcome::check(total.is_one(), format!("total = {total}")))
                    }));
                }
            }
        }
    }
    for (p, q) in [(3u64, 4i64), (5, 6)] {
        cases.push(case("fermionic_limit", json!({"p": p, "q": q, "N": "1..=4"}), move || {
            let field = padic_q(q, p, 24)?;
            let spec = MeasureSpec::new(MeasureKind::Fermionic, field.clone(), ProfiniteDomain::zp(p)?)?;
            let mut pass = true;
            let mut log = Vec::new();
            for a in [0u64, 1, 2, 7] {
                let limit = fermionic_measure_limit(&field, a)?;
                let mut prev = i64::MIN;
                for level in 1..=4u32 {
                    let m = spec.domain().level_size(level, cap)?;
                    if a >= m {
                        continue;
                    }
                    let v = ball_measure(&spec, a, level, cap)?.sub(&limit)?.valuation().lower_bound();
                    let bound = field.sub(&field.q_pow_int(m as i64)?, &field.one()).valuation().lower_bound();
                    pass &= v >= bound && v > prev;
                    log.push(format!("a={a} N={level}: {v} (bound {bound})"));
                    prev = v;
                }
            }
            Ok(Outcome::check(pass, log.join("; ")))
        }));
    }
    cases
}

fn eq3_eq5_cases(cfg: &VerifyConfig) -> Vec<Case> {
    let mut cases = Vec::new();
    for x in xs(&[(0, 1), (1, 1), (2, 1), (1, 2), (1, 3)]) {
        for n in 0..=cfg.n_max(8) {
            let x = x.clone();
            cases.push(case("expansion_vs_closed", json!({"n": n, "x": format_rational(&x)}), move || {
                let field = root_order_for(&x)?;
                let a = k_polynomial(&field, n, &x, Form::Expansion)?;
                let b = k_polynomial(&field, n, &x, Form::Closed)?;
                Ok(Outcome::equal(&a, &b))
            }));
        }
    }
    cases
}

fn eq4_cases(cfg: &VerifyConfig) -> Vec<Case> {
    let cap = cfg.cap;
    let mut cases = Vec::new();
    for level in 1..=2u32 {
        for x in xs(&[(0, 1), (1, 1)]) {
            for n in 0..=cfg.n_max(4) {
                let x = x.clone();
                let params = json!({"p": 3, "N": level, "n": n, "x": format_rational(&x)});
                cases.push(case("riemann_vs_rhs", params, move || {
                    let field = SymbolicQ::new(1)?;
                    let domain = ProfiniteDomain::zp(3)?;
                    let spec = MeasureSpec::new(MeasureKind::Fermionic, field, domain)?;
                    let lhs = riemann_sum(&spec, &BuiltinIntegrand::ShiftedBracketPow(n, x.clone()), level, cap)?;
                    let rhs = fermionic_finite_rhs(&field, n, &x, domain, level, cap)?;
                    Ok(Outcome::equal(&lhs, &rhs))
                }));
            }
        }
    }
    cases
}

fn eq7_cases(cfg: &VerifyConfig) -> Vec<Case> {
    let ms = cfg.m_values.clone().unwrap_or_else(|| vec![1, 3, 5]);
    let mut cases = Vec::new();
    for m in ms {
        for x in xs(&[(0, 1), (1, 3)]) {
            for n in 0..=cfg.n_max(6) {
                let x = x.clone();
                cases.push(case("distribution", json!({"m": m, "n": n, "x": format_rational(&x)}), move || {
                    let field = root_order_for(&x)?;
                    let lhs = k_polynomial(&field, n, &x, Form::Closed)?;
                    let rhs = k_distribution_rhs(&field, n, &x, m)?;
                    Ok(Outcome::equal(&lhs, &rhs))
                }));
            }
        }
    }
    cases
}

fn eq8_eq10_cases(cfg: &VerifyConfig) -> Vec<Case> {
    let cap = cfg.cap;
    let mut cases = Vec::new();
    // Regrouping the twisted Riemann sum by residues mod f, exactly, at P = p^N points.
    for (p, level) in [(3u64, 1u32), (5, 1)] {
        for n in 0..=cfg.n_max(2).min(4) {
            let params = json!({"chi": "3:1", "p": p, "N": level, "n": n});
            cases.push(case("finite_decomposition", params, move || {
                let chi: DirichletCharacter = "3:1".parse()?;
                let field = SymbolicQ::new(1)?;
                let points = p.pow(level);
                let lhs = k_chi_riemann_finite(&field, n, &chi, points)?;
                let rhs = k_chi_decomposed_finite(&field, n, &chi, points)?;
                Ok(Outcome::equal(&lhs, &rhs))
            }));
        }
    }
    for n in 0..=cfg.n_max(4) {
        cases.push(case("trivial_character", json!({"chi": "1:", "n": n}), move || {
            let field = SymbolicQ::new(1)?;
            let chi = DirichletCharacter::trivial(1)?;
            Ok(Outcome::equal(&k_chi_closed(&field, n, &chi)?, &k_number(&field, n)?))
        }));
        let params = json!({"chi": "3:1", "p": 5, "q": 6, "n": n, "digits": 5});
        cases.push(case("integral_vs_closed", params, move || {
            let field = padic_q(6, 5, 24)?;
            let chi: DirichletCharacter = "3:1".parse()?;
            let opts = IntegralOptions { target: 5, n_max: 7, cap };
            let integral = k_chi_integral(&field, n, &chi, opts)?;
            let closed = k_chi_closed(&field, n, &chi)?;
            agreement(&integral.value, &closed, 5)
        }));
    }
    cases
}

fn beta_forms_cases(cfg: &VerifyConfig) -> Vec<Case> {
    let cap = cfg.cap;
    let mut cases = Vec::new();
    for x in xs(&[(0, 1), (1, 1), (1, 2)]) {
        for n in 0..=cfg.n_max(6) {
            let x = x.clone();
            cases.push(case("expansion_vs_closed", json!({"n": n, "x": format_rational(&x)}), move || {
                let field = root_order_for(&x)?;
                let a = beta_polynomial(&field, n, &x, Form::Expansion)?;
                let b = beta_polynomial(&field, n, &x, Form::Closed)?;
                Ok(Outcome::equal(&a, &b))
            }));
        }
    }
    cases.push(case("beta_1", json!({"n": 1}), || {
        let f = SymbolicQ::new(1)?;
        let want = f.div(&f.from_int(-1), &f.add(&f.one(), &f.q()))?;
        Ok(Outcome::equal(&beta_number(&f, 1)?, &want))
    }));
    cases.push(case("beta_2", json!({"n": 2}), || {
        let f = SymbolicQ::new(1)?;
        let two = crate::measure::q_bracket(&f, &r(2, 1))?;
        let three = crate::measure::q_bracket(&f, &r(3, 1))?;
        let want = f.div(&f.q(), &f.mul(&two, &three))?;
        Ok(Outcome::equal(&beta_number(&f, 2)?, &want))
    }));
    for x in [0i64, 1] {
        for n in 0..=cfg.n_max(3).min(3) {
            let params = json!({"p": 5, "q": 6, "n": n, "x": x});
            cases.push(case("integral_vs_closed", params, move || {
                let field = padic_q(6, 5, 24)?;
                let opts = IntegralOptions { target: 4, n_max: 7, cap };
                let res = beta_polynomial_integral(&field, n, &r(x, 1), opts)?;
                let closed = beta_polynomial(&SymbolicQ::new(1)?, n, &r(x, 1), Form::Closed)?;
                agreement(&res.value, &at_q(&closed, &field)?, res.stability)
            }));
        }
    }
    cases
}

fn limits_cases(cfg: &VerifyConfig) -> Vec<Case> {
    let n_max = cfg.n_max(12);
    let mut cases = vec![case("euler", json!({"n_max": n_max}), move || {
        let rows = limit_consistency(n_max)?;
        let failures: Vec<u32> = rows.iter().filter(|row| !row.equal).map(|row| row.n).collect();
        let rows = serde_json::to_string(&rows).map_err(|e| Error::Invalid(e.to_string()))?;
        Ok(Outcome { pass: failures.is_empty(), detail: Some(rows) })
    })];
    let b_max = n_max.min(10);
    let mut bernoulli = case("bernoulli", json!({"n_max": b_max}), move || {
        let rows = bernoulli_limits(b_max)?;
        let pass = rows.iter().all(|row| row.equal);
        let rows = serde_json::to_string(&rows).map_err(|e| Error::Invalid(e.to_string()))?;
        Ok(Outcome { pass, detail: Some(rows) })
    });
    bernoulli.informational = true;
    cases.push(bernoulli);
    cases
}

fn genfun_cases(cfg: &VerifyConfig) -> Vec<Case> {
    let t = cfg.n_max(10);
    let mut cases = vec![case("fq_vs_k_numbers", json!({"T": t}), move || {
        let field = SymbolicQ::new(1)?;
        let series = f_q_series(&field, t as usize)?;
        let bad: Vec<u32> = (0..=t)
            .filter(|&n| k_number(&field, n).map(|k| k != series.scaled_coeff(n as usize)).unwrap_or(true))
            .collect();
        Ok(Outcome::check(bad.is_empty(), format!("mismatched n: {bad:?}")))
    })];
    for (num, den) in [(1i64, 2i64), (1, 3)] {
        for k in 0..=cfg.n_max(6).min(6) {
            let params = json!({"q": format!("{num}/{den}"), "k": k, "terms": 200});
            cases.push(case("coefficient_partial_sum", params, move || {
                let q = r(num, den);
                let exact = k_number(&RationalQ::new(q.clone())?, k)?;
                let partial = f_q_coefficient_partial(k, &q, 200)?;
                let err = (&partial.value - &exact).abs();
                Ok(Outcome::check(err < partial.tail_bound, format!("tail bound {}", format_rational(&partial.tail_bound))))
            }));
        }
    }
    cases.push(case("inverse_exp", json!({"T": 12}), || {
        let e = exp_t(12);
        let neg = TruncatedSeries::new(crate::field::Rationals, vec![r(0, 1), r(-1, 1)], 12).exp()?;
        Ok(Outcome::equal(&e.inverse()?.coeffs().to_vec(), &neg.coeffs().to_vec()))
    }));
    cases
}

fn integral_cases(cfg: &VerifyConfig) -> Vec<Case> {
    let cap = cfg.cap;
    let mut cases = Vec::new();
    for kind in [MeasureKind::Bosonic, MeasureKind::Fermionic] {
        for i in 0..=3u32 {
            cases.push(case("power_moment", json!({"kind": kind, "i": i, "p": 5, "q": 6}), move || {
                let field = padic_q(6, 5, 24)?;
                let spec = MeasureSpec::new(kind, field.clone(), ProfiniteDomain::zp(5)?)?;
                let res = integrate(&spec, &BuiltinIntegrand::QPower(i), 5, 8, cap)?;
                let closed = match kind {
                    MeasureKind::Bosonic => bosonic_power_moment(&field, i)?,
                    MeasureKind::Fermionic => fermionic_power_moment(&field, i)?,
                };
                agreement(&res.value, &closed, res.stability)
            }));
        }
    }
    for x in [0i64, 1, 2] {
        for n in 0..=cfg.n_max(4) {
            let params = json!({"p": 5, "q": 6, "n": n, "x": x, "digits": 6});
            cases.push(case("k_polynomial", params, move || {
                let field = padic_q(6, 5, 24)?;
                let opts = IntegralOptions { target: 6, n_max: 8, cap };
                let res = k_polynomial_integral(&field, n, &r(x, 1), opts)?;
                let closed = k_polynomial(&SymbolicQ::new(1)?, n, &r(x, 1), Form::Closed)?;
                let trace_ok = res.trace.windows(2).all(|w| w[0] <= w[1]);
                let agree = agreement(&res.value, &at_q(&closed, &field)?, 6)?;
                Ok(Outcome::check(agree.pass && trace_ok, format!("trace {:?}; {}", res.trace, agree.detail.unwrap_or_default())))
            }));
        }
    }
    cases
}

fn cases_for(suite: Suite, cfg: &VerifyConfig) -> Vec<Case> {
    match suite {
        Suite::Measure => measure_cases(cfg),
        Suite::Eq3Eq5 => eq3_eq5_cases(cfg),
        Suite::Eq4 => eq4_cases(cfg),
        Suite::Eq7 => eq7_cases(cfg),
        Suite::Eq8Eq10 => eq8_eq10_cases(cfg),
        Suite::BetaForms => beta_forms_cases(cfg),
        Suite::Limits => limits_cases(cfg),
        Suite::Genfun => genfun_cases(cfg),
        Suite::Integral => integral_cases(cfg),
    }
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let cases: Vec<CaseResult> = cases_for(suite, cfg)
        .into_par_iter()
        .map(|c| {
            // A case that errors is a failed case, not a failed run.
            let (pass, detail) = match (c.run)() {
                Ok(o) => (o.pass, o.detail),
                Err(e) => (false, Some(format!("error: {e}"))),
            };
            CaseResult { case: c.name.to_string(), params: c.params, pass, informational: c.informational, detail }
        })
        .collect();
    let pass = cases.iter().all(|c| c.pass || c.informational);
    Ok(SuiteReport { suite, pass, cases })
}

pub fn run_suites(suites: &[Suite], cfg: &VerifyConfig) -> Result<VerifyReport> {
    cfg.validate()?;
    let suites = suites.iter().map(|&s| run_suite(s, cfg)).collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport { pass: suites.iter().all(|s| s.pass), suites })
}
