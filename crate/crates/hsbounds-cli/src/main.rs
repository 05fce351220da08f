mod record;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hsbounds::bounds::{self, BoundKind, Settings};
use hsbounds::golden;
use hsbounds::par::Execution;
use hsbounds::{BoundQuery, Error};
use num_rational::Ratio;
use record::{AsympRecord, BoundRecord, CompareSummary, ElementaryRecord, Golden, Metadata, Records, Report};
use serde::Deserialize;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

const EXIT_FAILURE: u8 = 1;
const EXIT_DOMAIN: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

#[derive(Parser)]
#[command(name = "hsbounds", version, about = "Upper and lower bounds for the multiplication constant of H^n(R^d)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Print JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Print CSV.
    #[arg(long, global = true)]
    csv: bool,
    /// Relative tolerance of the quadratures inside each objective.
    #[arg(long, global = true, value_name = "X")]
    tol_rel: Option<f64>,
    /// TOML file with quad_rel, tol_x, simplex_tol, parallel.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Report wall time (a metadata block in JSON, stderr otherwise).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// K⁺, the supremum bound from above.
    Upper(Point),
    /// One lower bound, or the best applicable one.
    Lower {
        #[command(flatten)]
        point: Point,
        #[arg(long, value_enum, default_value_t = Method::Best)]
        method: Method,
    },
    /// K⁺, the best lower bound and their ratio.
    Sandwich(Point),
    /// One row of the bound table: 13 values of n for dimension d.
    Table1 {
        #[arg(short, long)]
        d: u32,
        /// Add the reference values and a summary of the differences.
        #[arg(long)]
        compare: bool,
    },
    /// Z_d and Θ_d for d = 1..=dmax.
    Table2 {
        #[arg(long, default_value_t = 10)]
        dmax: u32,
        #[arg(long)]
        compare: bool,
    },
    /// Bound-to-asymptote ratios near n = d/2 or for large n.
    Asymp {
        #[arg(long, value_enum)]
        regime: Regime,
        #[arg(short, long, default_value_t = 1)]
        d: u32,
        /// Values of n (large regime); comma separated.
        #[arg(short, long, value_delimiter = ',')]
        n: Vec<f64>,
        /// Values of n − d/2 (small regime); comma separated.
        #[arg(long, value_delimiter = ',')]
        gap: Vec<f64>,
    },
}

#[derive(Args)]
struct Point {
    /// Sobolev index: decimal or fraction such as 5/2.
    #[arg(short, long, allow_hyphen_values = true)]
    n: String,
    /// Dimension.
    #[arg(short, long)]
    d: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Bessel,
    BesselBb,
    Fourier,
    FourierFf,
    Best,
}

#[derive(Clone, Copy, ValueEnum)]
enum Regime {
    Small,
    Large,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct Config {
    quad_rel: Option<f64>,
    tol_x: Option<f64>,
    simplex_tol: Option<f64>,
    parallel: Option<bool>,
}

#[derive(Debug)]
enum CliError {
    Domain(String),
    Other(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Other(e.to_string())
    }
}

fn settings(common: &Common) -> Result<Settings, CliError> {
    let cfg: Config = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Other(format!("{}: {e}", path.display())))?;
            toml::from_str(&text).map_err(|e| CliError::Other(format!("{}: {e}", path.display())))?
        }
        None => Config::default(),
    };
    let mut s = Settings::default();
    if let Some(x) = cfg.quad_rel {
        s.quad_rel = x;
    }
    if let Some(x) = cfg.tol_x {
        s.tol_x = x;
    }
    if let Some(x) = cfg.simplex_tol {
        s.simplex_tol = x;
    }
    if cfg.parallel == Some(false) {
        s.exec = Execution::Sequential;
    }
    if let Some(x) = common.tol_rel {
        s.quad_rel = x;
    }
    for (name, v) in [("quad_rel", s.quad_rel), ("tol_x", s.tol_x), ("simplex_tol", s.simplex_tol)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(CliError::Other(format!("{name} must lie in (0, 1), got {v}")));
        }
    }
    Ok(s)
}

/// Decimal or fraction; decimals without an exponent are read exactly.
fn parse_n(text: &str) -> Result<(f64, Option<Ratio<i64>>), CliError> {
    let t = text.trim();
    let bad = || CliError::Other(format!("cannot read n = {text:?}; use a decimal or a fraction p/q"));
    if let Some((p, q)) = t.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        let r = Ratio::new(p, q);
        return Ok((*r.numer() as f64 / *r.denom() as f64, Some(r)));
    }
    let x: f64 = t.parse().map_err(|_| bad())?;
    if !x.is_finite() {
        return Err(bad());
    }
    Ok((x, exact_decimal(t)))
}

fn exact_decimal(t: &str) -> Option<Ratio<i64>> {
    if t.contains(['e', 'E']) {
        return None;
    }
    let (int, frac) = t.split_once('.').unwrap_or((t, ""));
    if frac.len() > 15 {
        return None;
    }
    let den = 10i64.checked_pow(frac.len() as u32)?;
    let digits: i64 = format!("{int}{frac}").parse().ok()?;
    Some(Ratio::new(digits, den))
}

fn query(p: &Point) -> Result<(BoundQuery, f64), CliError> {
    let (value, exact) = parse_n(&p.n)?;
    if p.d == 0 {
        return Err(CliError::Other("d must be at least 1".into()));
    }
    if value <= 0.5 * p.d as f64 {
        return Err(CliError::Domain(format!(
            "n = {} is not above d/2 = {}; the bounds need n > d/2",
            p.n,
            0.5 * p.d as f64
        )));
    }
    let q = match exact {
        Some(r) => BoundQuery::from_ratio(r, p.d),
        None => BoundQuery::new(value, p.d),
    }
    .map_err(|e| CliError::Domain(e.to_string()))?;
    Ok((q, value))
}

fn lower_kind(m: Method) -> Option<BoundKind> {
    match m {
        Method::Bessel => Some(BoundKind::LowerBessel),
        Method::BesselBb => Some(BoundKind::LowerBesselBb),
        Method::Fourier => Some(BoundKind::LowerFourier),
        Method::FourierFf => Some(BoundKind::LowerFourierFf),
        Method::Best => None,
    }
}

fn point_record(p: &Point, s: &Settings, upper: bool, lower: Option<Option<BoundKind>>) -> Result<Records, CliError> {
    let (q, value) = query(p)?;
    let mut rec = BoundRecord::new(p.d, p.n.trim().to_string(), value);
    if upper {
        match bounds::k_plus_with(&q, None, s) {
            Ok(r) => rec.set_upper(&r),
            Err(e) => rec.fail(format!("K+: {e}")),
        }
    }
    if let Some(kind) = lower {
        let r = match kind {
            Some(k) => bounds::lower_bound(&q, k, s),
            None => bounds::best_lower_with(&q, s),
        };
        match r {
            Ok(r) => rec.set_lower(&r),
            Err(e) => rec.fail(format!("lower bound: {e}")),
        }
    }
    rec.finish();
    Ok(Records::Bound(vec![rec]))
}

fn table1(d: u32, compare: bool, s: &Settings) -> Result<(Records, Option<CompareSummary>), CliError> {
    if !(1..=4).contains(&d) && compare {
        return Err(CliError::Other(format!("reference values exist for d = 1..4, not d = {d}")));
    }
    if d == 0 {
        return Err(CliError::Other("d must be at least 1".into()));
    }
    let rows = bounds::table1(d, s)?;
    let golden_row = golden::table1_row(d).filter(|_| compare);
    let mut recs = Vec::new();
    for (col, (q, cell)) in rows.into_iter().enumerate() {
        let n = golden::table1_n(d, col);
        let mut rec = BoundRecord::new(d, n.to_string(), q.n());
        rec.label = Some(golden::table1_label(d, col));
        match cell {
            Ok(sw) => {
                rec.set_upper(&sw.upper);
                rec.set_lower(&sw.lower);
            }
            Err(e) => rec.fail(e.to_string()),
        }
        rec.finish();
        if let Some(g) = golden_row {
            rec.golden = Some(Golden {
                k_plus: g.k_plus[col],
                ratio: g.ratio[col],
                tag: g.tags[col].tag().to_string(),
                k_plus_rel_diff: rec.k_plus.map(|k| (k - g.k_plus[col]) / g.k_plus[col]),
                ratio_diff: rec.ratio.map(|r| r - g.ratio[col]),
            });
        }
        recs.push(rec);
    }
    let summary = golden_row.map(|g| {
        let mut sum = CompareSummary { max_k_plus_rel_diff: 0.0, k_plus_within_unit: 0, ratios_within_band: 0, tags_matching: 0, cells: recs.len() };
        for (col, r) in recs.iter().enumerate() {
            if let Some(k) = r.k_plus {
                let diff = (k - g.k_plus[col]).abs();
                sum.max_k_plus_rel_diff = sum.max_k_plus_rel_diff.max(diff / g.k_plus[col]);
                if diff <= golden::third_figure_unit(g.k_plus[col]) {
                    sum.k_plus_within_unit += 1;
                }
            }
            if let Some(x) = r.ratio {
                if x >= g.ratio[col] - 0.002 && x <= g.ratio[col] + 0.01 {
                    sum.ratios_within_band += 1;
                }
            }
            if r.tag.as_deref() == Some(g.tags[col].tag()) {
                sum.tags_matching += 1;
            }
        }
        sum
    });
    Ok((Records::Bound(recs), summary))
}

fn table2(dmax: u32, compare: bool, s: &Settings) -> Result<Records, CliError> {
    if !(1..=10).contains(&dmax) {
        return Err(CliError::Other(format!("dmax must lie in 1..=10, got {dmax}")));
    }
    let recs = bounds::table2(dmax, s)
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let d = i as u32 + 1;
            let mut rec = match r {
                Ok(e) => ElementaryRecord::from_data(&e),
                Err(e) => ElementaryRecord::failed(d, e.to_string()),
            };
            if compare {
                if let Some(g) = golden::table2_entry(d) {
                    rec.golden_z_d = Some(g.z_d);
                    rec.golden_theta_d = Some(g.theta_d);
                }
            }
            rec
        })
        .collect();
    Ok(Records::Elementary(recs))
}

fn asymp(regime: Regime, d: u32, ns: &[f64], gaps: &[f64], s: &Settings) -> Result<Records, CliError> {
    if d == 0 {
        return Err(CliError::Other("d must be at least 1".into()));
    }
    let half = 0.5 * d as f64;
    let queries: Vec<BoundQuery> = match regime {
        Regime::Small => {
            let gaps = if gaps.is_empty() { vec![1e-2, 1e-4, 1e-6] } else { gaps.to_vec() };
            let mut v: Vec<BoundQuery> = gaps.iter().map(|&g| BoundQuery::from_gap(d, g)).collect::<Result<_, _>>().map_err(|e| CliError::Domain(e.to_string()))?;
            for &n in ns {
                v.push(BoundQuery::new(n, d).map_err(|e| CliError::Domain(e.to_string()))?);
            }
            v
        }
        Regime::Large => {
            let ns = if ns.is_empty() { vec![50.0, 100.0, 200.0, 300.0] } else { ns.to_vec() };
            ns.iter().map(|&n| BoundQuery::new(n, d)).collect::<Result<_, _>>().map_err(|e| CliError::Domain(e.to_string()))?
        }
    };
    let c = bounds::AsympConstants::new(d);
    let rows = hsbounds::par::map(s.exec, &queries, |q| {
        let mut out = Vec::new();
        let row = |quantity: &str, value: Result<f64, Error>, target: f64| AsympRecord {
            regime: match regime {
                Regime::Small => "small".into(),
                Regime::Large => "large".into(),
            },
            d,
            n: half + q.nd(),
            n_d: q.nd(),
            quantity: quantity.into(),
            rel_diff: value.as_ref().ok().map(|v| (v - target) / target),
            error: value.as_ref().err().map(|e| e.to_string()),
            value: value.ok(),
            target,
        };
        let k_plus = bounds::k_plus_with(q, None, s).map(|r| r.value);
        match regime {
            Regime::Small => {
                let scale = q.nd().sqrt() / c.m_d;
                out.push(row("k_plus*sqrt(n_d)/M_d", k_plus.map(|k| k * scale), 1.0));
                let bb = bounds::k_bb_with(q, s).map(|r| r.value * scale);
                out.push(row("k_bb*sqrt(n_d)/M_d", bb, (2.0f64 / 3.0).sqrt()));
            }
            Regime::Large => {
                let law = bounds::k_plus_asymp_large(q);
                let ff = bounds::k_ff_with(q, s).map(|r| r.value);
                out.push(row("k_plus/law", k_plus.as_ref().map(|k| k / law).map_err(Clone::clone), 1.0));
                out.push(row("k_ff/law", ff.as_ref().map(|k| k / law).map_err(Clone::clone), (5.0f64 / 3.0).sqrt() / 7f64.powf(0.25)));
                let ratio = match (k_plus, ff) {
                    (Ok(u), Ok(l)) => Ok(u / l),
                    (Err(e), _) | (_, Err(e)) => Err(e),
                };
                out.push(row("k_plus/k_ff", ratio, 7f64.powf(0.25) * 0.6f64.sqrt()));
            }
        }
        out
    });
    Ok(Records::Asymp(rows.into_iter().flatten().collect()))
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let s = settings(&cli.common)?;
    let start = Instant::now();
    let (name, records, summary) = match &cli.command {
        Command::Upper(p) => ("upper", point_record(p, &s, true, None)?, None),
        Command::Lower { point, method } => ("lower", point_record(point, &s, false, Some(lower_kind(*method)))?, None),
        Command::Sandwich(p) => ("sandwich", point_record(p, &s, true, Some(None))?, None),
        Command::Table1 { d, compare } => {
            let (r, sum) = table1(*d, *compare, &s)?;
            ("table1", r, sum)
        }
        Command::Table2 { dmax, compare } => ("table2", table2(*dmax, *compare, &s)?, None),
        Command::Asymp { regime, d, n, gap } => ("asymp", asymp(*regime, *d, n, gap, &s)?, None),
    };
    let metadata = cli.common.timing.then(|| Metadata { wall_time_s: start.elapsed().as_secs_f64() });
    Ok(Report { command: name.into(), settings: s, records, summary, metadata })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if cli.common.json {
                println!("{}", report.to_json());
            } else {
                if cli.common.csv {
                    print!("{}", report.to_csv());
                } else {
                    print!("{}", report.to_human());
                }
                if let Some(m) = &report.metadata {
                    eprintln!("wall time: {:.3} s", m.wall_time_s);
                }
            }
            if report.degraded() {
                eprintln!("warning: some results did not converge or failed; see the caveat and error fields");
                ExitCode::from(EXIT_NOT_CONVERGED)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_DOMAIN)
        }
        Err(CliError::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions_and_decimals_are_exact() {
        let (v, r) = parse_n("5/2").unwrap();
        assert_eq!(v, 2.5);
        assert_eq!(r, Some(Ratio::new(5, 2)));
        let (_, r) = parse_n("2.5").unwrap();
        assert_eq!(r, Some(Ratio::new(5, 2)));
        let (_, r) = parse_n("-0.25").unwrap();
        assert_eq!(r, Some(Ratio::new(-1, 4)));
        let (v, r) = parse_n("1e-4").unwrap();
        assert_eq!((v, r), (1e-4, None));
        assert!(parse_n("1/0").is_err());
        assert!(parse_n("two").is_err());
    }

    #[test]
    fn domain_is_checked_before_any_work() {
        let p = Point { n: "0.4".into(), d: 1 };
        assert!(matches!(query(&p), Err(CliError::Domain(_))));
        let p = Point { n: "1/2".into(), d: 1 };
        assert!(matches!(query(&p), Err(CliError::Domain(_))));
    }

    #[test]
    fn unconverged_results_mark_the_report() {
        let q = BoundQuery::from_ratio(Ratio::new(5, 2), 2).unwrap();
        let mut r = bounds::k_b(&q).unwrap();
        r.diagnostics.converged = false;
        let mut rec = BoundRecord::new(2, "5/2".into(), 2.5);
        rec.set_lower(&r);
        rec.finish();
        assert!(!rec.converged);
        assert!(rec.caveat.as_deref().unwrap().contains("did not converge"));
        assert_eq!(rec.k_minus, Some(r.value));
        let report = Report {
            command: "lower".into(),
            settings: Settings::default(),
            records: Records::Bound(vec![rec]),
            summary: None,
            metadata: None,
        };
        assert!(report.degraded());
    }
}
