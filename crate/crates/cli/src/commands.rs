use std::fmt;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use num_integer::Integer;
use num_rational::BigRational;
use qvolk_core::characters::{enumerate_characters, CharacterValue, DirichletCharacter};
use qvolk_core::field::{FieldVisitor, QDescriptor, QField, Rationals};
use qvolk_core::measure::{integrate as integrate_padic, BuiltinIntegrand, MeasureKind, MeasureSpec};
use qvolk_core::numbers::{self, Form, IntegralOptions};
use qvolk_core::padic::{ProfiniteDomain, DEFAULT_BALL_BUDGET, DEFAULT_PRECISION};
use qvolk_core::series::{self, TruncatedSeries};
use qvolk_core::verify::{run_suites, Suite, VerifyConfig};
use qvolk_core::{Error, FieldValue, IntegrationResult, PadicNumber, PadicQ};
use serde_json::{json, Value};

use crate::output::{Cell, Output, Table};
use crate::{Failure, OutputArgs, BUDGET_ENV};

pub fn budget_from_env() -> Result<u64, Failure> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{BUDGET_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_BALL_BUDGET),
    }
}

/// `a`, `a..b` or `a..=b`, both ends included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexRange(Vec<u32>);

impl FromStr for IndexRange {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<u32>().map_err(|_| format!("bad index {t:?}"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
            None => (num(s)?, num(s)?),
        };
        if lo > hi {
            return Err(format!("empty range {s:?}"));
        }
        Ok(IndexRange((lo..=hi).collect()))
    }
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    let bad = || format!("bad rational {s:?}");
    match s.split_once('/') {
        Some((n, d)) => {
            let n: num_bigint::BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: num_bigint::BigInt = d.trim().parse().map_err(|_| bad())?;
            if d == 0.into() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

fn show_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NumberKind {
    #[value(name = "beta")]
    Beta,
    #[value(name = "K")]
    K,
    #[value(name = "K_chi")]
    KChi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolynomialKind {
    #[value(name = "beta_poly")]
    BetaPoly,
    #[value(name = "K_poly")]
    KPoly,
    /// The distribution sum over `a < m` at base `q^m`.
    #[value(name = "K_dist")]
    KDist,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Closed,
    Integral,
}

#[derive(Debug, Clone, Args)]
pub struct IntegralArgs {
    /// Required agreement digits between consecutive Riemann sums.
    #[arg(long, default_value_t = 6)]
    stability: i64,
    /// Largest level N tried.
    #[arg(long, default_value_t = 8)]
    levels: u32,
}

impl IntegralArgs {
    fn options(&self, cap: u64) -> IntegralOptions {
        IntegralOptions { target: self.stability, n_max: self.levels, cap }
    }
}

#[derive(Debug, Args)]
pub struct NumbersArgs {
    #[arg(long, value_enum)]
    kind: NumberKind,
    /// Index or inclusive range, e.g. `3` or `0..6`.
    #[arg(long)]
    n: IndexRange,
    /// `sym`, `sym:D`, a rational `a/b`, or `padic:p:q[:A]`.
    #[arg(long, default_value = "sym")]
    q: String,
    /// Character id `f:e1,e2,...`, for `K_chi`.
    #[arg(long)]
    chi: Option<String>,
    #[arg(long, value_enum, default_value = "closed")]
    method: Method,
    #[command(flatten)]
    integral: IntegralArgs,
    #[command(flatten)]
    pub io: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PolynomialsArgs {
    #[arg(long, value_enum)]
    kind: PolynomialKind,
    #[arg(long)]
    n: IndexRange,
    #[arg(long, default_value = "0", value_parser = parse_rational)]
    x: BigRational,
    /// Odd `m` of the distribution sum.
    #[arg(long, default_value_t = 1)]
    m: u64,
    #[arg(long, default_value = "sym")]
    q: String,
    #[arg(long, default_value = "closed")]
    form: String,
    #[command(flatten)]
    integral: IntegralArgs,
    #[command(flatten)]
    pub io: OutputArgs,
}

const VALUE_COLUMNS: [&str; 7] = ["kind", "n", "x", "m", "chi", "q_spec", "value"];

struct Row {
    kind: &'static str,
    n: u32,
    x: Option<String>,
    m: Option<u64>,
    chi: Option<String>,
    q_spec: String,
    value: Cell,
}

fn value_table(rows: Vec<Row>) -> Output {
    let mut table = Table::new(&VALUE_COLUMNS);
    for r in rows {
        table.push(vec![
            Cell::text(r.kind),
            Cell::int(r.n),
            r.x.map_or_else(Cell::empty, Cell::text),
            r.m.map_or_else(Cell::empty, |m| Cell::int(m as i64)),
            r.chi.map_or_else(Cell::empty, Cell::text),
            Cell::text(r.q_spec),
            r.value,
        ]);
    }
    Output::Table(table)
}

fn parse_q(spec: &str) -> Result<QDescriptor, Failure> {
    Ok(spec.parse::<QDescriptor>()?)
}

fn padic_field(q: &QDescriptor) -> Result<PadicQ, Failure> {
    match q {
        QDescriptor::Padic(x) => Ok(PadicQ::new(x.clone())?),
        _ => Err(Failure::Usage("the integral method needs a p-adic q (padic:p:q[:A])".into())),
    }
}

fn integral_cell(res: Result<IntegrationResult<PadicNumber>, Error>) -> Result<Cell, Failure> {
    Ok(Cell::value(&FieldValue::Padic(res?.value)))
}

/// A symbolic `q` gets enough roots for `q^x`.
fn lift_root_order(q: QDescriptor, x: &BigRational) -> Result<QDescriptor, Failure> {
    match q {
        QDescriptor::Symbolic { root_order } => {
            let den = u32::try_from(x.denom().clone()).map_err(|_| Failure::Usage("denominator of x too large".into()))?;
            Ok(QDescriptor::Symbolic { root_order: root_order.lcm(&den) })
        }
        other => Ok(other),
    }
}

enum Job<'a> {
    Number(NumberKind, &'a [u32], Option<&'a DirichletCharacter>),
    Polynomial(PolynomialKind, &'a [u32], &'a BigRational, Form, u64),
}

impl FieldVisitor for Job<'_> {
    type Output = Result<Vec<FieldValue>, Error>;

    fn visit<F: QField>(self, field: &F) -> Self::Output {
        let one = |n: u32| -> Result<F::Elem, Error> {
            match &self {
                Job::Number(NumberKind::Beta, ..) => numbers::beta_number(field, n),
                Job::Number(NumberKind::K, ..) => numbers::k_number(field, n),
                Job::Number(NumberKind::KChi, _, chi) => {
                    numbers::k_chi_closed(field, n, chi.expect("checked by caller"))
                }
                Job::Polynomial(PolynomialKind::BetaPoly, _, x, form, _) => {
                    numbers::beta_polynomial(field, n, x, *form)
                }
                Job::Polynomial(PolynomialKind::KPoly, _, x, form, _) => numbers::k_polynomial(field, n, x, *form),
                Job::Polynomial(PolynomialKind::KDist, _, x, _, m) => numbers::k_distribution_rhs(field, n, x, *m),
            }
        };
        let ns = match &self {
            Job::Number(_, ns, _) | Job::Polynomial(_, ns, ..) => *ns,
        };
        ns.iter().map(|&n| one(n).map(|e| field.to_value(&e))).collect()
    }
}

pub fn numbers(args: &NumbersArgs, cap: u64) -> Result<Output, Failure> {
    let q = parse_q(&args.q)?;
    let chi = match (&args.kind, &args.chi) {
        (NumberKind::KChi, Some(id)) => Some(id.parse::<DirichletCharacter>()?),
        (NumberKind::KChi, None) => return Err(Failure::Usage("K_chi needs --chi".into())),
        (_, Some(_)) => return Err(Failure::Usage("--chi only applies to K_chi".into())),
        _ => None,
    };
    let ns = &args.n.0;
    let kind = match args.kind {
        NumberKind::Beta => "beta",
        NumberKind::K => "K",
        NumberKind::KChi => "K_chi",
    };
    let cells: Vec<Cell> = match args.method {
        Method::Integral => {
            let field = padic_field(&q)?;
            let opts = args.integral.options(cap);
            let zero = BigRational::from_integer(0.into());
            ns.iter()
                .map(|&n| {
                    integral_cell(match args.kind {
                        NumberKind::Beta => numbers::beta_polynomial_integral(&field, n, &zero, opts),
                        NumberKind::K => numbers::k_polynomial_integral(&field, n, &zero, opts),
                        NumberKind::KChi => numbers::k_chi_integral(&field, n, chi.as_ref().unwrap(), opts),
                    })
                })
                .collect::<Result<_, _>>()?
        }
        Method::Closed => match (&chi, &q) {
            // Characters of order above 2 take values in a cyclotomic field.
            (Some(c), QDescriptor::Symbolic { .. }) if c.value_order() > 2 => ns
                .iter()
                .map(|&n| numbers::k_chi_cyclotomic(n, c).map(|v| Cell::value(&v)))
                .collect::<Result<_, _>>()?,
            _ => q
                .visit(Job::Number(args.kind, ns, chi.as_ref()))??
                .iter()
                .map(Cell::value)
                .collect(),
        },
    };
    let rows = ns
        .iter()
        .zip(cells)
        .map(|(&n, value)| Row {
            kind,
            n,
            x: None,
            m: None,
            chi: chi.as_ref().map(ToString::to_string),
            q_spec: args.q.clone(),
            value,
        })
        .collect();
    Ok(value_table(rows))
}

pub fn polynomials(args: &PolynomialsArgs, cap: u64) -> Result<Output, Failure> {
    let form: Form = args.form.parse()?;
    let q = lift_root_order(parse_q(&args.q)?, &args.x)?;
    let ns = &args.n.0;
    let kind = match args.kind {
        PolynomialKind::BetaPoly => "beta_poly",
        PolynomialKind::KPoly => "K_poly",
        PolynomialKind::KDist => "K_dist",
    };
    let cells: Vec<Cell> = if form == Form::Integral {
        let field = padic_field(&q)?;
        let opts = args.integral.options(cap);
        ns.iter()
            .map(|&n| {
                integral_cell(match args.kind {
                    PolynomialKind::BetaPoly => numbers::beta_polynomial_integral(&field, n, &args.x, opts),
                    PolynomialKind::KPoly => numbers::k_polynomial_integral(&field, n, &args.x, opts),
                    PolynomialKind::KDist => {
                        return Err(Failure::Usage("K_dist has no integral form".into()));
                    }
                })
            })
            .collect::<Result<_, _>>()?
    } else {
        q.visit(Job::Polynomial(args.kind, ns, &args.x, form, args.m))??
            .iter()
            .map(Cell::value)
            .collect()
    };
    let m = (args.kind == PolynomialKind::KDist).then_some(args.m);
    let rows = ns
        .iter()
        .zip(cells)
        .map(|(&n, value)| Row {
            kind,
            n,
            x: Some(show_rational(&args.x)),
            m,
            chi: None,
            q_spec: args.q.clone(),
            value,
        })
        .collect();
    Ok(value_table(rows))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Bosonic,
    Fermionic,
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    #[arg(long, value_enum, default_value = "fermionic")]
    kind: KindArg,
    /// `one`, `bracket_pow:n`, `shifted_bracket_pow:n:x`, `char_twisted:n:chi_id` or `q_power:i`.
    #[arg(long = "f", default_value = "one")]
    integrand: String,
    #[arg(long, default_value_t = 5)]
    p: u64,
    #[arg(long, default_value = "6", value_parser = parse_rational)]
    q: BigRational,
    /// The domain is X_d; twisted integrands default to their modulus.
    #[arg(long)]
    d: Option<u64>,
    /// Relative p-adic precision of q.
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    precision: u32,
    #[command(flatten)]
    integral: IntegralArgs,
    #[command(flatten)]
    pub io: OutputArgs,
}

pub fn integrate(args: &IntegrateArgs, cap: u64) -> Result<Output, Failure> {
    let integrand: BuiltinIntegrand = args.integrand.parse()?;
    let field = PadicQ::from_rational(&args.q, args.p, args.precision)?;
    let d = args.d.unwrap_or(match &integrand {
        BuiltinIntegrand::CharTwisted(_, chi) => chi.modulus(),
        _ => 1,
    });
    let kind = match args.kind {
        KindArg::Bosonic => MeasureKind::Bosonic,
        KindArg::Fermionic => MeasureKind::Fermionic,
    };
    let spec = MeasureSpec::new(kind, field, ProfiniteDomain::new(args.p, d)?)?;
    let res = integrate_padic(&spec, &integrand, args.integral.stability, args.integral.levels, cap)?;
    let q = show_rational(&args.q);
    let json = json!({
        "kind": kind.to_string(),
        "f": integrand.to_string(),
        "p": args.p,
        "d": d,
        "q": q,
        "value": res.value,
        "N_used": res.n_used,
        "stability": res.stability,
        "trace": res.trace,
    });
    let mut table = Table::new(&["kind", "f", "p", "d", "q", "value", "N_used", "stability", "trace"]);
    let trace: Vec<String> = res.trace.iter().map(i64::to_string).collect();
    table.push(vec![
        Cell::text(kind.to_string()),
        Cell::text(integrand.to_string()),
        Cell::int(args.p as i64),
        Cell::int(d as i64),
        Cell::text(q),
        Cell::value(&res.value),
        Cell::int(res.n_used),
        Cell::int(res.stability),
        Cell::text(trace.join(" ")),
    ]);
    Ok(Output::Document { json, table })
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suites to run (repeatable); all of them by default.
    #[arg(long)]
    suite: Vec<Suite>,
    /// Largest n in the suites that range over n.
    #[arg(long)]
    n_max: Option<u32>,
    /// Comma-separated odd m values for the distribution suite.
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<u64>>,
    #[command(flatten)]
    pub io: OutputArgs,
}

pub fn verify(args: &VerifyArgs, cap: u64) -> Result<(Output, bool), Failure> {
    let suites = if args.suite.is_empty() { Suite::ALL.to_vec() } else { args.suite.clone() };
    let cfg = VerifyConfig { n_max: args.n_max, m_values: args.m.clone(), cap };
    let report = run_suites(&suites, &cfg)?;
    let mut table = Table::new(&["suite", "case", "params", "pass", "detail"]);
    for s in &report.suites {
        for c in &s.cases {
            table.push(vec![
                Cell::text(s.suite.to_string()),
                Cell::text(c.case.clone()),
                Cell::json(c.params.clone()),
                Cell::boolean(c.pass),
                c.detail.clone().map_or_else(Cell::empty, Cell::text),
            ]);
        }
    }
    let json = serde_json::to_value(&report).expect("report serializes");
    Ok((Output::Document { json, table }, report.pass))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Gf {
    #[value(name = "euler")]
    Euler,
    #[value(name = "bernoulli")]
    Bernoulli,
    #[value(name = "Fq")]
    Fq,
    /// Partial sums of the `t^k / k!` coefficient of the exponential sum form.
    #[value(name = "partial")]
    Partial,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[arg(long, value_enum)]
    gf: Gf,
    /// Truncation order.
    #[arg(long = "T", default_value_t = 10)]
    order: usize,
    #[arg(long, default_value = "sym")]
    q: String,
    /// Coefficient index for `partial`.
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Number of summed terms for `partial`.
    #[arg(long, default_value_t = 200)]
    terms: u64,
    #[command(flatten)]
    pub io: OutputArgs,
}

struct FqJob(usize);

impl FieldVisitor for FqJob {
    type Output = Result<Vec<(FieldValue, FieldValue)>, Error>;
    fn visit<F: QField>(self, field: &F) -> Self::Output {
        let s = series::f_q_series(field, self.0)?;
        Ok((0..=self.0).map(|n| (field.to_value(&s.coeff(n)), field.to_value(&s.scaled_coeff(n)))).collect())
    }
}

struct Rational<'a>(&'a BigRational);

impl fmt::Display for Rational<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&show_rational(self.0))
    }
}

impl serde::Serialize for Rational<'_> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&show_rational(self.0))
    }
}

fn rational_series_table(name: &str, s: &TruncatedSeries<Rationals>) -> Table {
    let mut table = Table::new(&["gf", "n", "coeff", "scaled"]);
    for n in 0..=s.order() {
        table.push(vec![
            Cell::text(name),
            Cell::int(n as i64),
            Cell::value(&Rational(&s.coeff(n))),
            Cell::value(&Rational(&s.scaled_coeff(n))),
        ]);
    }
    table
}

pub fn series(args: &SeriesArgs) -> Result<Output, Failure> {
    let table = match args.gf {
        Gf::Euler => rational_series_table("euler", &series::euler_gf(args.order)),
        Gf::Bernoulli => rational_series_table("bernoulli", &series::bernoulli_gf(args.order)),
        Gf::Fq => {
            let q = parse_q(&args.q)?;
            let mut table = Table::new(&["gf", "n", "coeff", "scaled", "q_spec"]);
            for (n, (c, k)) in q.visit(FqJob(args.order))??.into_iter().enumerate() {
                table.push(vec![
                    Cell::text("Fq"),
                    Cell::int(n as i64),
                    Cell::value(&c),
                    Cell::value(&k),
                    Cell::text(args.q.clone()),
                ]);
            }
            table
        }
        Gf::Partial => {
            let q = parse_rational(&args.q)
                .map_err(|_| Failure::Usage("partial sums need a rational q with 0 < |q| < 1".into()))?;
            let ps = series::f_q_coefficient_partial(args.k, &q, args.terms)?;
            let mut table = Table::new(&["gf", "k", "terms", "q_spec", "value", "tail_bound"]);
            table.push(vec![
                Cell::text("partial"),
                Cell::int(args.k),
                Cell::int(args.terms as i64),
                Cell::text(args.q.clone()),
                Cell::value(&Rational(&ps.value)),
                Cell::value(&Rational(&ps.tail_bound)),
            ]);
            table
        }
    };
    Ok(Output::Table(table))
}

#[derive(Debug, Args)]
pub struct CharactersArgs {
    /// The modulus.
    #[arg(long)]
    f: u64,
    #[command(flatten)]
    pub io: OutputArgs,
}

fn value_text(v: &CharacterValue, chi: &DirichletCharacter, a: u64) -> String {
    match v {
        CharacterValue::Rational(r) => show_rational(r),
        CharacterValue::Cyclotomic(_) => {
            let k = chi.value_exponent(a).expect("unit");
            format!("z{}^{k}", chi.value_order())
        }
    }
}

pub fn characters(args: &CharactersArgs) -> Result<Output, Failure> {
    let chars = enumerate_characters(args.f)?;
    let mut table = Table::new(&["id", "order", "conductor", "primitive", "values"]);
    for chi in &chars {
        let (conductor, primitive) = chi.conductor();
        let values: Vec<String> = (0..args.f).map(|a| value_text(&chi.value(a), chi, a)).collect();
        table.push(vec![
            Cell::text(chi.to_string()),
            Cell::int(chi.value_order() as i64),
            Cell::int(conductor as i64),
            Cell::boolean(primitive),
            Cell::json(Value::from(values.clone())).with_text(values.join(" ")),
        ]);
    }
    Ok(Output::Table(table))
}
