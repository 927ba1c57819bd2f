//! One function per subcommand, each turning a resolved [`Config`] into
//! records and an optional table.

use almsq_core::analytic::{
    chi, convexity_ratio, default_terms, dirichlet_n, discrepancy, discrepancy_exact, main_term, phi_count,
    zeta_afe, zeta_em, ComplexPoint,
};
use almsq_core::detector::certify;
use almsq_core::oracles::{evaluate, measure_bound, BoundReport, Lemma, LemmaGrid};
use almsq_core::scanner::{gap_stats_of, ScanConfig, ScanMode};
use almsq_core::{choose_parameters, AnalyticConfig, ParameterChoice};
use rayon::prelude::*;
use serde_json::Value;

use crate::config::Config;
use crate::error::CliError;
use crate::parallel::{auto_chunk, par_coverage, par_enumerate};
use crate::records::{fmt_f64, CoveragePayload, EvalPayload, GapPayload, Record, Table, WitnessPayload};
use crate::regression;

/// What a command produced.
#[derive(Debug, Default)]
pub struct Output {
    pub records: Vec<Record>,
    pub table: Option<Table>,
    pub chunk_size: u64,
    /// Inputs read from files that must take part in the config digest.
    pub digest_extra: Option<Value>,
    /// Set when the run finished but a check failed (exit code 1).
    pub failure: Option<String>,
}

fn need<T: Clone>(v: &Option<T>, what: &str, command: &str) -> Result<T, CliError> {
    v.clone().ok_or_else(|| CliError::Config(format!("{command} needs --{what}")))
}

pub fn dispatch(command: &str, cfg: &Config, chunk: Option<u64>) -> Result<Output, CliError> {
    match command {
        "certify" => run_certify(cfg),
        "enumerate" => run_enumerate(cfg, chunk),
        "scan" => run_scan(cfg, chunk),
        "gaps" => run_gaps(cfg, chunk),
        "params" => run_params(cfg),
        "zeta" => run_zeta(cfg),
        "phi" => run_phi(cfg),
        "discrepancy" => run_discrepancy(cfg),
        "verify" => run_verify(cfg),
        "measure" => run_measure(cfg),
        other => Err(CliError::Config(format!("unknown command {other}"))),
    }
}

fn run_certify(cfg: &Config) -> Result<Output, CliError> {
    let n = need(&cfg.n, "n", "certify")?;
    let params = cfg.params()?;
    let w = certify(n, &params)?;
    let eval = EvalPayload::new("certify")
        .input("n", n)
        .input("theta", cfg.theta)
        .input("C", cfg.c)
        .output("almost_square", w.is_some())
        .output("a", w.map(|w| w.a))
        .output("b", w.map(|w| w.b));
    let mut records = vec![Record::Eval(eval)];
    if let Some(w) = w {
        records.push(Record::Witness(WitnessPayload { n: w.n, a: w.a, b: w.b }));
    }
    Ok(Output { records, ..Output::default() })
}

fn range(cfg: &Config, command: &str) -> Result<(u64, u64), CliError> {
    Ok((need(&cfg.lo, "lo", command)?, need(&cfg.hi, "hi", command)?))
}

fn run_enumerate(cfg: &Config, chunk: Option<u64>) -> Result<Output, CliError> {
    let (lo, hi) = range(cfg, "enumerate")?;
    let params = cfg.params()?;
    let chunk = chunk.unwrap_or_else(|| auto_chunk(hi.saturating_sub(lo) + 1, 4096));
    let found = par_enumerate(lo, hi, &params, chunk)?;
    let mut table = Table::new(&["n", "a", "b"]);
    let records = found
        .iter()
        .map(|w| {
            table.push(vec![w.n.to_string(), w.a.to_string(), w.b.to_string()]);
            Record::Witness(WitnessPayload { n: w.n, a: w.a, b: w.b })
        })
        .collect();
    Ok(Output { records, table: Some(table), chunk_size: chunk, ..Output::default() })
}

fn run_scan(cfg: &Config, chunk: Option<u64>) -> Result<Output, CliError> {
    let xs = need(&cfg.x, "x", "scan")?;
    let params = cfg.params()?;
    let spec = cfg.interval_spec()?;
    let mode = cfg.mode.unwrap_or(ScanMode::Theorem);
    let mut out = Output {
        table: Some(Table::new(&["x", "span", "samples", "exceptional", "exceptional_fraction", "max_gap"])),
        ..Output::default()
    };
    for x in xs {
        let scan = ScanConfig { big_x: x, span: cfg.span, params, spec, samples: cfg.samples, seed: cfg.seed, mode };
        scan.validate()?;
        let (lo, hi) = scan.enumeration_range()?;
        let chunk = chunk.unwrap_or_else(|| auto_chunk(hi.saturating_sub(lo) + 1, 4096));
        out.chunk_size = chunk;
        let report = par_coverage(&scan, chunk)?;
        if let Some(t) = out.table.as_mut() {
            t.push(vec![
                fmt_f64(x),
                fmt_f64(scan.span()),
                report.sampled.to_string(),
                report.exceptional.to_string(),
                fmt_f64(report.exceptional_fraction),
                fmt_f64(report.max_gap),
            ]);
        }
        out.records.push(Record::Coverage(CoveragePayload {
            x,
            span: scan.span(),
            samples: cfg.samples,
            seed: cfg.seed,
            mode,
            report,
        }));
    }
    Ok(out)
}

fn run_gaps(cfg: &Config, chunk: Option<u64>) -> Result<Output, CliError> {
    let (lo, hi) = range(cfg, "gaps")?;
    let params = cfg.params()?;
    let chunk = chunk.unwrap_or_else(|| auto_chunk(hi.saturating_sub(lo) + 1, 4096));
    let ns: Vec<u64> = par_enumerate(lo, hi, &params, chunk)?.into_iter().map(|w| w.n).collect();
    let stats = gap_stats_of(&ns)?;
    let mut table = Table::new(&["bucket_lo", "bucket_hi", "count"]);
    for b in &stats.histogram {
        table.push(vec![b.lo.to_string(), b.hi.to_string(), b.count.to_string()]);
    }
    Ok(Output {
        records: vec![Record::Gap(GapPayload { lo, hi, stats })],
        table: Some(table),
        chunk_size: chunk,
        ..Output::default()
    })
}

fn param_eval(choice: &ParameterChoice, cfg: &Config) -> EvalPayload {
    let a = &choice.config;
    EvalPayload::new("params")
        .input("X", choice.big_x)
        .input("theta", cfg.theta)
        .input("C", cfg.c)
        .input("eps", cfg.eps)
        .output("U", a.big_u)
        .output("L", a.big_l)
        .output("T", a.big_t)
        .output("V", a.big_v)
        .output("Y", choice.big_y)
        .output("eta", a.eta)
        .output("c", a.perron_c)
        .output("contour_condition", choice.contour_condition_holds())
}

fn run_params(cfg: &Config) -> Result<Output, CliError> {
    let xs = need(&cfg.x, "x", "params")?;
    let params = cfg.params()?;
    let mut out = Output::default();
    let mut evals = Vec::new();
    for x in xs {
        let choice = choose_parameters(x, &params, cfg.eps)?;
        evals.push(param_eval(&choice, cfg));
    }
    out.table = Some(Table::from_evals(&evals.iter().collect::<Vec<_>>()));
    out.records = evals.into_iter().map(Record::Eval).collect();
    Ok(out)
}

fn complex_outputs(e: EvalPayload, v: num_complex::Complex64) -> EvalPayload {
    e.output("re", v.re).output("im", v.im).output("abs", v.norm())
}

fn zeta_point(method: &str, sigma: f64, t: f64, terms: Option<usize>) -> Result<EvalPayload, CliError> {
    let s = ComplexPoint::new(sigma, t)?;
    let base = EvalPayload::new(method).input("sigma", sigma).input("t", t);
    Ok(match method {
        "em" => {
            let n = terms.unwrap_or_else(|| default_terms(t));
            let z = zeta_em(s, n)?;
            complex_outputs(base.input("terms", n as u64), z.value).output("error_bound", z.error_bound)
        }
        "afe" => {
            if sigma != 0.5 {
                return Err(CliError::Config("afe is defined on σ = 1/2 only".into()));
            }
            complex_outputs(base, zeta_afe(t)?)
        }
        "chi" => complex_outputs(base, chi(s)?),
        "convexity" => base.output("ratio", convexity_ratio(sigma, t)?),
        other => return Err(CliError::Config(format!("unknown zeta method {other:?}"))),
    })
}

fn run_zeta(cfg: &Config) -> Result<Output, CliError> {
    let ts = need(&cfg.t, "t", "zeta")?;
    let sigma = cfg.sigma.unwrap_or(0.5);
    let method = cfg.method.clone().unwrap_or_else(|| "em".into());
    let evals: Vec<Result<EvalPayload, CliError>> =
        ts.par_iter().map(|&t| zeta_point(&method, sigma, t, cfg.terms)).collect();
    let evals = evals.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(Output {
        table: Some(Table::from_evals(&evals.iter().collect::<Vec<_>>())),
        records: evals.into_iter().map(Record::Eval).collect(),
        ..Output::default()
    })
}

fn band(cfg: &Config, command: &str) -> Result<AnalyticConfig, CliError> {
    let u = need(&cfg.big_u, "U", command)?;
    let l = need(&cfg.big_l, "L", command)?;
    let v = need(&cfg.big_v, "V", command)?;
    Ok(AnalyticConfig::band(u, l, v)?)
}

fn run_phi(cfg: &Config) -> Result<Output, CliError> {
    let y = need(&cfg.y, "y", "phi")?;
    if !(y > 0.0) {
        return Err(CliError::Config("phi needs y > 0".into()));
    }
    let a = band(cfg, "phi")?;
    let n1 = dirichlet_n(ComplexPoint::real(1.0), &a).map(|v| v.re).unwrap_or(0.0);
    let eval = EvalPayload::new("phi")
        .input("y", y)
        .input("U", a.big_u)
        .input("L", a.big_l)
        .input("V", a.big_v)
        .output("phi", phi_count(y, &a))
        .output("main_term", main_term(y, &a))
        .output("N1", n1);
    Ok(Output {
        table: Some(Table::from_evals(&[&eval])),
        records: vec![Record::Eval(eval)],
        ..Output::default()
    })
}

fn run_discrepancy(cfg: &Config) -> Result<Output, CliError> {
    let x = *need(&cfg.x, "x", "discrepancy")?
        .first()
        .ok_or_else(|| CliError::Config("discrepancy needs --x".into()))?;
    let mut eval = EvalPayload::new("discrepancy").input("X", x);
    // Band from flags, or from the parameter formulas at X.
    let (a, y) = if cfg.big_u.is_some() || cfg.big_l.is_some() || cfg.big_v.is_some() {
        (band(cfg, "discrepancy")?, need(&cfg.y, "y", "discrepancy")?)
    } else {
        let choice = ParameterChoice::derive(x, &cfg.params()?, cfg.eps)?;
        let violations = choice.config.violations().join("; ");
        eval = eval.input("theta", cfg.theta).input("C", cfg.c).input("eps", cfg.eps).output("violations", violations);
        let a = AnalyticConfig::band(choice.config.big_u, choice.config.big_l, choice.config.big_v)?;
        (a, cfg.y.unwrap_or(choice.big_y))
    };
    let report = if cfg.exact == Some(true) {
        discrepancy_exact(x, y, &a)?
    } else {
        discrepancy(x, y, &a, cfg.samples)?
    };
    let eval = eval
        .input("Y", y)
        .input("U", a.big_u)
        .input("L", a.big_l)
        .input("V", a.big_v)
        .output("i_xy", report.i_xy)
        .output("main_term_sq", report.main_term_sq)
        .output("samples", report.samples)
        .output("tolerance", report.tolerance)
        .output("mode", serde_json::to_value(report.mode).unwrap_or(Value::Null));
    Ok(Output {
        table: Some(Table::from_evals(&[&eval])),
        records: vec![Record::Eval(eval)],
        ..Output::default()
    })
}

fn lemmas(cfg: &Config) -> Result<Vec<Lemma>, CliError> {
    match cfg.lemma.as_deref() {
        None | Some("all") => Ok(Lemma::ALL.to_vec()),
        Some(s) => Lemma::parse(s)
            .map(|l| vec![l])
            .ok_or_else(|| CliError::Config(format!("unknown lemma {s:?} (1, 2, 3, 4, mv or all)"))),
    }
}

/// Evaluates every point of `grid` for `lemma` in parallel, in grid order.
pub fn par_verify(lemma: Lemma, grid: &LemmaGrid) -> Result<Vec<BoundReport>, CliError> {
    let points = grid.points(lemma)?;
    let reports: Vec<_> = points.par_iter().with_max_len(1).map(|p| evaluate(lemma, p)).collect();
    Ok(reports.into_iter().collect::<Result<Vec<_>, _>>()?)
}

fn run_verify(cfg: &Config) -> Result<Output, CliError> {
    let grid_arg = cfg.grid.clone().unwrap_or_else(|| "default".into());
    let custom: Option<LemmaGrid> = if grid_arg == "default" {
        None
    } else {
        let text = std::fs::read_to_string(&grid_arg).map_err(|e| CliError::Config(format!("{grid_arg}: {e}")))?;
        Some(serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{grid_arg}: {e}")))?)
    };
    let mut out = Output {
        table: Some(Table::new(&["lemma", "grid_point", "lhs", "bound", "ratio"])),
        digest_extra: custom.as_ref().map(|g| serde_json::to_value(g).unwrap_or(Value::Null)),
        ..Output::default()
    };
    let mut mismatches = Vec::new();
    for lemma in lemmas(cfg)? {
        let grid = custom.clone().unwrap_or_else(|| LemmaGrid::default_for(lemma));
        let reports = par_verify(lemma, &grid)?;
        if custom.is_none() {
            if let Err(msg) = regression::check_lemma(lemma, &reports) {
                mismatches.push(msg);
            }
        }
        for r in reports {
            if let Some(t) = out.table.as_mut() {
                t.push(vec![
                    r.lemma.label().to_string(),
                    r.grid_point.describe(),
                    fmt_f64(r.lhs),
                    fmt_f64(r.bound),
                    fmt_f64(r.ratio),
                ]);
            }
            out.records.push(Record::Bound(r));
        }
    }
    if !mismatches.is_empty() {
        out.failure = Some(mismatches.join("; "));
    }
    Ok(out)
}

fn run_measure(cfg: &Config) -> Result<Output, CliError> {
    let xs = need(&cfg.x, "x", "measure")?;
    let params = cfg.params()?;
    let mut evals = Vec::new();
    for x in xs {
        let m = measure_bound(x, &params, cfg.eps)?;
        evals.push(
            EvalPayload::new("measure")
                .input("X", x)
                .input("theta", cfg.theta)
                .input("C", cfg.c)
                .input("eps", cfg.eps)
                .output("Y", m.big_y)
                .output("term1", m.terms[0])
                .output("term2", m.terms[1])
                .output("term3", m.terms[2])
                .output("term4", m.terms[3])
                .output("total", m.total)
                .output("fraction", m.fraction)
                .output("vacuous", m.vacuous),
        );
    }
    Ok(Output {
        table: Some(Table::from_evals(&evals.iter().collect::<Vec<_>>())),
        records: evals.into_iter().map(Record::Eval).collect(),
        ..Output::default()
    })
}
