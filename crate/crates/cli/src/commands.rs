use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use ramanujan_core::arith::ArithTables;
use ramanujan_core::expansion::absconv::AbsConvOptions;
use ramanujan_core::expansion::{
    absolute_convergence_report, coprime_expansion_partial_sums, default_checkpoints,
    zero_cloud_verdict, Conclusion, PartialSumSeries, SumMode,
};
use ramanujan_core::functions::catalog::parse_complex;
use ramanujan_core::functions::{
    catalog, is_weakly_exotic, spectrum, ArithmeticFunction, CatalogEntry, CatalogParams,
    MultiplicativeFunction, WeakExoticCertificate,
};
use ramanujan_core::ramanujan::{c_direct, c_holder, c_kluyver};
use ramanujan_core::squarefree::{count_squarefree_in_ap, hooley_constant, lemma7_demo, Lemma7Options};
use ramanujan_core::value::Value;
use ramanujan_core::{Config, Error};

use crate::args::{Command, EntryArgs};
use crate::reproduce;
use crate::CliError;

/// What a subcommand hands back to `run`.
pub enum Outcome {
    Done,
    /// The computation finished but its verdict is not a clear pass.
    Unsettled,
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| CliError::Output(e.to_string()))
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

fn entry(args: &EntryArgs) -> Result<CatalogEntry, Error> {
    catalog(&args.name, &CatalogParams::parse(&args.params)?)
}

fn multiplicative(entry: &CatalogEntry) -> Result<&MultiplicativeFunction, Error> {
    entry.as_multiplicative().ok_or_else(|| {
        Error::InvalidInput(format!("{} is not multiplicative", entry.label()))
    })
}

#[derive(Serialize)]
struct CsumVerify {
    q: u64,
    a: u64,
    direct: i64,
    kluyver: i64,
    holder: i64,
    agree: bool,
}

#[derive(Serialize)]
struct GeneralClassification {
    label: String,
    classification: &'static str,
    weakly_exotic_prime: u64,
    certificate: WeakExoticCertificate,
}

#[derive(Serialize)]
struct ExpandOutput {
    label: String,
    a: u64,
    coprime_to: Option<u64>,
    q_max: u64,
    final_sum: Value,
    series: PartialSumSeries,
}

#[derive(Serialize)]
struct SfcountOutput {
    x: u64,
    m: u64,
    r: u64,
    count: u64,
    density: f64,
    hooley_constant: f64,
    relative_error: f64,
}

pub fn execute(command: Command, config: &Config, out: &mut dyn Write) -> Result<Outcome, CliError> {
    match command {
        Command::Csum { q, a, verify } => {
            let holder = c_holder(q, a)?;
            if !verify {
                writeln!(out, "{holder}").map_err(|e| CliError::Output(e.to_string()))?;
                return Ok(Outcome::Done);
            }
            let direct = c_direct(q, a)?;
            let kluyver = c_kluyver(q, a)?;
            let agree = direct == kluyver && kluyver == holder;
            emit(out, &CsumVerify { q, a, direct, kluyver, holder, agree })?;
            if !agree {
                return Err(Error::Internal(format!("formulas disagree for c_{q}({a})")).into());
            }
        }
        Command::Classify { entry: e, scan_bound, kmax } => {
            let scan = scan_bound.unwrap_or(config.scan_bound);
            let k_max = kmax.unwrap_or(config.k_max);
            match entry(&e)? {
                CatalogEntry::Multiplicative(g) => {
                    emit(out, &spectrum(&g, scan, k_max, config.one_tol)?)?;
                }
                CatalogEntry::General(g) => {
                    let p0 = g.weakly_exotic_prime().ok_or_else(|| {
                        Error::InvalidInput(format!("{} declares no weakly exotic prime", e.name))
                    })?;
                    let certificate =
                        is_weakly_exotic(&g, p0, config.weak_r_bound, config.weak_k_bound, config.one_tol)?;
                    let holds = certificate.holds;
                    emit(out, &GeneralClassification {
                        label: g.label().to_string(),
                        classification: if holds { "weakly_exotic" } else { "unclassified" },
                        weakly_exotic_prime: p0,
                        certificate,
                    })?;
                }
            }
        }
        Command::Expand { entry: e, a, q, coprime, exact, checkpoints, csv } => {
            let g = entry(&e)?;
            let tables = ArithTables::with_budget(q.max(2), config.sieve_budget)?;
            let mut cps = default_checkpoints(q, config.window);
            cps.extend(checkpoints);
            let mode = if exact { SumMode::Exact } else { SumMode::Auto };
            let m = coprime.unwrap_or(1);
            let series = coprime_expansion_partial_sums(&tables, g.as_function(), a, m, q, &cps, mode)?;
            if let Some(path) = csv {
                write_file(&path, &series.to_csv())?;
            }
            emit(out, &ExpandOutput {
                label: g.label().to_string(),
                a,
                coprime_to: coprime,
                q_max: q,
                final_sum: series.final_sum(),
                series,
            })?;
        }
        Command::Verdict { entry: e } => {
            let v = zero_cloud_verdict(&entry(&e)?, config)?;
            emit(out, &v)?;
            if v.conclusion == Conclusion::Inconclusive {
                return Ok(Outcome::Unsettled);
            }
        }
        Command::Absconv { entry: e, a, b, q } => {
            let g = entry(&e)?;
            let g = multiplicative(&g)?;
            let tables = ArithTables::with_budget(q.max(2), config.sieve_budget)?;
            let options = AbsConvOptions {
                increment_threshold: config.prime_increment_threshold,
                scan_bound: config.scan_bound,
                k_max: config.k_max,
                one_tol: config.one_tol,
            };
            emit(out, &absolute_convergence_report(&tables, g, b, a, q, &options)?)?;
        }
        Command::Sfcount { x, m, r } => {
            let count = count_squarefree_in_ap(x, m, r)?;
            let c = hooley_constant(m)?;
            let density = count as f64 / x as f64;
            emit(out, &SfcountOutput {
                x,
                m,
                r,
                count,
                density,
                hooley_constant: c,
                relative_error: (density - c).abs() / c,
            })?;
        }
        Command::Lemma7 { s, to, csv, odd_csv } => {
            let s = parse_complex(&s)?;
            let options = Lemma7Options {
                window: config.window,
                rule: config.divergence_rule(),
                ..Lemma7Options::default()
            };
            let demo = lemma7_demo(s, to, &[], &options)?;
            if let Some(path) = csv {
                write_file(&path, &demo.full.to_csv())?;
            }
            if let Some(path) = odd_csv {
                write_file(&path, &demo.odd.to_csv())?;
            }
            emit(out, &demo)?;
        }
        Command::ReproduceAll { out: dir, only, seed } => {
            let summary = reproduce::reproduce_all(&dir, &only, config, seed)?;
            emit(out, &summary)?;
            if !summary.all_passed {
                return Ok(Outcome::Unsettled);
            }
        }
    }
    Ok(Outcome::Done)
}
