//! The four subcommands. Each prints a human-readable summary to stdout and
//! returns the failure class that decides the exit code.

use std::io::Write as _;
use std::time::Instant;

use clap::{Args, ValueEnum};
use floquet_core::floquet::{
    multipliers_cofactor_with, multipliers_variational_with, pair_spectra, planar_report,
    transversality_profile, verify_invariance, verify_orbit, MultiplierReport, PlanarMode,
    DEFAULT_SAMPLES, HYPOTHESIS_TOL, MIN_SAMPLES,
};
use floquet_core::numlin::ComplexValue;
use floquet_core::ode::IntegratorConfig;
use floquet_core::systems::{
    mathieu_stability_chart, steklov_conservation_suite, steklov_monodromy_analysis, SteklovParams,
    SteklovVerdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;
use crate::report::{
    complex, write_json, AnalysisReport, ComparisonInfo, ConservationInfo, IntegratorInfo,
    MethodResult, Parameter, SteklovReport, SystemInfo, VerifyReport,
};
use crate::target::{load, ManifoldSource, Target};

/// Largest conservation drift accepted by `steklov`.
pub const DRIFT_TOL: f64 = 1e-7;

/// Ratio `atol / rtol` used when only `--rtol` is given.
const ATOL_PER_RTOL: f64 = 1e-2;

#[derive(Debug, Args)]
pub struct TargetArgs {
    /// Builtin name (circle, example1, mathieu, example2, steklov, example3)
    /// or path to a system definition file.
    pub target: String,
    /// Parameter override; real for builtins, rational for files.
    #[arg(long = "param", value_name = "NAME=VALUE", allow_hyphen_values = true)]
    pub params: Vec<String>,
    /// Search for a cofactor of total degree <= D when a file gives
    /// hypersurfaces without one.
    #[arg(long, value_name = "D")]
    pub discover_degree: Option<u32>,
    /// Orbit samples used by the hypothesis checks.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Cofactor,
    Variational,
    Both,
    /// Planar systems only: divergence integral, plus the cofactor integral
    /// when a cofactor is available.
    Planar,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    pub method: MethodArg,
    /// Write the report as JSON.
    #[arg(long, value_name = "FILE")]
    pub json: Option<String>,
    /// Relative integrator tolerance; the absolute tolerance is 1e-2 times it.
    #[arg(long, value_name = "EPS")]
    pub rtol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    /// Write the report as JSON.
    #[arg(long, value_name = "FILE")]
    pub json: Option<String>,
}

#[derive(Debug, Args)]
pub struct ChartArgs {
    /// Only `mathieu` (alias `example2`) is supported.
    pub system: String,
    /// Range of `a` as LO:HI.
    #[arg(long = "a", default_value = "0:4", allow_hyphen_values = true)]
    pub a_range: String,
    /// Range of `q` as LO:HI.
    #[arg(long = "q", default_value = "-1:1", allow_hyphen_values = true)]
    pub q_range: String,
    /// Grid points per axis.
    #[arg(long, default_value_t = 81)]
    pub grid: usize,
    /// CSV output path; stdout when absent.
    #[arg(long, value_name = "FILE")]
    pub out: Option<String>,
    #[arg(long, value_name = "EPS")]
    pub rtol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SteklovArgs {
    #[arg(long = "a", default_value_t = SteklovParams::default().a, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long = "b", default_value_t = SteklovParams::default().b, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long = "c", default_value_t = SteklovParams::default().c, allow_negative_numbers = true)]
    pub c: f64,
    #[arg(long = "W", default_value_t = SteklovParams::default().w, allow_negative_numbers = true)]
    pub w: f64,
    #[arg(long = "l", default_value_t = SteklovParams::default().l, allow_negative_numbers = true)]
    pub l: f64,
    /// Seed of the initial vector of the conservation check.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Write the report as JSON.
    #[arg(long, value_name = "FILE")]
    pub json: Option<String>,
    #[arg(long, value_name = "EPS")]
    pub rtol: Option<f64>,
}

fn integrator(rtol: Option<f64>) -> Result<IntegratorConfig, CliError> {
    match rtol {
        None => Ok(IntegratorConfig::default()),
        Some(r) if r.is_finite() && r > 0.0 && r < 1.0 => {
            Ok(IntegratorConfig::with_tolerances(r, r * ATOL_PER_RTOL))
        }
        Some(r) => Err(CliError::Config(format!(
            "--rtol must lie in (0, 1), got {r}"
        ))),
    }
}

fn checked_samples(samples: usize) -> Result<usize, CliError> {
    if samples < MIN_SAMPLES {
        return Err(CliError::Config(format!(
            "--samples must be at least {MIN_SAMPLES}, got {samples}"
        )));
    }
    Ok(samples)
}

fn fmt_complex(z: ComplexValue) -> String {
    format!("{:+.12e} {:+.12e}i", z.re, z.im)
}

fn print_header(target: &Target, info: &SystemInfo) {
    println!("system      {} ({})", info.name, info.source);
    println!("sha256      {}", info.hash);
    if !info.parameters.is_empty() {
        let list: Vec<String> = info
            .parameters
            .iter()
            .map(|p| format!("{}={}", p.name, p.value))
            .collect();
        println!("parameters  {}", list.join(" "));
    }
    match &target.manifolds {
        Ok((_, ManifoldSource::Discovered { degree })) => {
            println!("cofactor    discovered (degree <= {degree})");
            if let Ok((m, _)) = &target.manifolds {
                for (i, row) in m.cofactor_entries().iter().enumerate() {
                    let row: Vec<String> = row.iter().map(ToString::to_string).collect();
                    println!("  k[{}]      {}", i + 1, row.join(" | "));
                }
            }
        }
        Ok((_, source)) => println!(
            "cofactor    {}",
            if *source == ManifoldSource::Builtin {
                "builtin"
            } else {
                "file"
            }
        ),
        Err(_) => println!("cofactor    none"),
    }
}

fn print_result(report: &MultiplierReport, elapsed: f64) {
    println!();
    println!("[{}]", report.method.as_str());
    for (z, m) in report.multipliers.iter().zip(report.moduli()) {
        println!("  {}   |.| = {:.12e}", fmt_complex(*z), m);
    }
    println!(
        "  verdict              {} ({})",
        report.verdict,
        report.verdict.note()
    );
    let d = &report.diagnostics;
    println!("  orbit residual       {:.3e}", d.orbit_residual);
    if let Some(s) = d.symbolic_invariance {
        println!(
            "  symbolic invariance  {}",
            if s { "exact" } else { "FAILS" }
        );
    }
    if let Some(r) = d.invariance_residual {
        println!("  invariance residual  {r:.3e}");
    }
    if let Some(t) = d.min_transversality {
        println!("  min |transv. det|    {t:.12e}");
    }
    println!("  elapsed              {elapsed:.3} s");
}

pub fn analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let cfg = integrator(args.rtol)?;
    let samples = checked_samples(args.target.samples)?;
    let target = load(
        &args.target.target,
        &args.target.params,
        args.target.discover_degree,
    )?;
    let info = SystemInfo::of(&target);
    let sys = &target.system;
    let orbit = target.orbit.as_ref();

    let timed = |f: &dyn Fn() -> Result<MultiplierReport, CliError>| -> Result<(MultiplierReport, f64), CliError> {
        let t = Instant::now();
        let r = f()?;
        Ok((r, t.elapsed().as_secs_f64()))
    };
    let cofactor = || {
        Ok(multipliers_cofactor_with(
            sys,
            target.manifolds()?,
            orbit,
            &cfg,
            samples,
        )?)
    };
    let variational = || Ok(multipliers_variational_with(sys, orbit, &cfg, samples)?);

    let mut runs = Vec::new();
    let mut comparison = None;
    match args.method {
        MethodArg::Cofactor => runs.push(timed(&cofactor)?),
        MethodArg::Variational => runs.push(timed(&variational)?),
        MethodArg::Both => {
            let c = timed(&cofactor)?;
            let v = timed(&variational)?;
            let pairing = pair_spectra(c.0.clone(), v.0.clone());
            comparison = Some(pairing);
            runs.push(c);
            runs.push(v);
        }
        MethodArg::Planar => {
            if sys.variables().len() != 2 {
                return Err(CliError::Config(format!(
                    "--method planar needs a planar system, `{}` has dimension {}",
                    target.name,
                    sys.variables().len()
                )));
            }
            runs.push(timed(&|| {
                Ok(planar_report(sys, orbit, PlanarMode::Divergence, None)?)
            })?);
            if let Ok(man) = target.manifolds() {
                runs.push(timed(&|| {
                    Ok(planar_report(sys, orbit, PlanarMode::Cofactor, Some(man))?)
                })?);
            }
        }
    }

    print_header(&target, &info);
    println!("integrator  rtol={:e} atol={:e}", cfg.rtol, cfg.atol);
    println!("samples     {samples}");
    for (r, elapsed) in &runs {
        print_result(r, *elapsed);
    }
    if let Some(c) = &comparison {
        println!();
        println!("[comparison]");
        println!("  trivial eigenvalue   {}", fmt_complex(c.trivial));
        println!("  max distance         {:.3e}", c.max_distance);
        println!("  max relative dist.   {:.3e}", c.max_relative_distance);
    }
    if let Some(reference) = &target.reference {
        println!();
        println!("[closed form]");
        for x in reference {
            println!("  {x:.12e}");
        }
    }

    if let Some(path) = &args.json {
        let report = AnalysisReport {
            system: info,
            integrator: IntegratorInfo::from(&cfg),
            samples,
            results: runs.iter().map(|(r, e)| MethodResult::of(r, *e)).collect(),
            comparison: comparison.as_ref().map(ComparisonInfo::from),
            reference: target.reference.clone(),
            total_seconds: start.elapsed().as_secs_f64(),
        };
        write_json(path, &report)?;
    }
    Ok(())
}

pub fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    let samples = checked_samples(args.target.samples)?;
    let target = load(
        &args.target.target,
        &args.target.params,
        args.target.discover_degree,
    )?;
    let info = SystemInfo::of(&target);
    let man = target.manifolds()?;
    let sys = &target.system;
    let orbit = target.orbit.as_ref();

    let orbit_residual = verify_orbit(sys, orbit, samples)?;
    let inv = verify_invariance(sys, man, orbit, samples)?;
    let profile = transversality_profile(sys, man, orbit, samples)?;
    let lo = profile.dets.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = profile
        .dets
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);

    // Written so that NaN fails every check.
    let checks = [
        ("orbit residual", orbit_residual <= HYPOTHESIS_TOL),
        ("symbolic invariance", inv.symbolic != Some(false)),
        ("invariance residual", inv.residual <= HYPOTHESIS_TOL),
        ("transversality", profile.min_abs >= HYPOTHESIS_TOL),
    ];
    let failed: Vec<&str> = checks
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(name, _)| *name)
        .collect();
    let mark = |ok: bool| if ok { "ok" } else { "FAIL" };

    print_header(&target, &info);
    println!("samples     {samples}");
    println!("threshold   {HYPOTHESIS_TOL:e}");
    println!();
    println!(
        "orbit residual        {orbit_residual:.3e}  {}",
        mark(orbit_residual <= HYPOTHESIS_TOL)
    );
    match inv.symbolic {
        Some(s) => println!(
            "symbolic invariance   {}  {}",
            if s { "exact" } else { "nonzero" },
            mark(s)
        ),
        None => println!("symbolic invariance   not applicable"),
    }
    println!(
        "invariance residual   {:.3e}  {}",
        inv.residual,
        mark(inv.residual <= HYPOTHESIS_TOL)
    );
    println!(
        "min |transv. det|     {:.12e}  {}",
        profile.min_abs,
        mark(profile.min_abs >= HYPOTHESIS_TOL)
    );
    println!("transv. det range     [{lo:.12e}, {hi:.12e}]");

    if let Some(path) = &args.json {
        let report = VerifyReport {
            system: info,
            samples,
            threshold: HYPOTHESIS_TOL,
            orbit_residual,
            symbolic_invariance: inv.symbolic,
            invariance_residual: inv.residual,
            min_transversality: profile.min_abs,
            transversality_range: [lo, hi],
            passed: failed.is_empty(),
        };
        write_json(path, &report)?;
    }
    if failed.is_empty() {
        println!("result                all checks pass");
        Ok(())
    } else {
        Err(CliError::Check(format!(
            "verification failed: {}",
            failed.join(", ")
        )))
    }
}

fn parse_range(flag: &str, text: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Config(format!("--{flag} expects LO:HI with LO < HI, got `{text}`"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(bad());
    }
    Ok((lo, hi))
}

pub fn chart(args: &ChartArgs) -> Result<(), CliError> {
    if !matches!(args.system.as_str(), "mathieu" | "example2") {
        return Err(CliError::Config(format!(
            "chart supports only `mathieu`, got `{}`",
            args.system
        )));
    }
    let a = parse_range("a", &args.a_range)?;
    let q = parse_range("q", &args.q_range)?;
    if args.grid < 2 {
        return Err(CliError::Config(format!(
            "--grid must be at least 2, got {}",
            args.grid
        )));
    }
    let cfg = integrator(args.rtol)?;
    let chart = mathieu_stability_chart(a, q, args.grid, &cfg)?;

    let mut csv = String::with_capacity(chart.cells.len() * 48);
    csv.push_str("a,q,trace,verdict\n");
    for cell in &chart.cells {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            cell.a,
            cell.q,
            cell.trace,
            cell.verdict.as_str()
        ));
    }
    match &args.out {
        Some(path) => std::fs::write(path, &csv)
            .map_err(|e| CliError::Config(format!("writing {path}: {e}")))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(csv.as_bytes())
                .and_then(|()| out.flush())
                .map_err(|e| CliError::Config(format!("writing stdout: {e}")))?;
        }
    }
    eprintln!(
        "{} cells; {} recomputed from the Mathieu equation, max trace difference {:.3e}",
        chart.cells.len(),
        chart.cross_checked,
        chart.cross_check_max_diff
    );
    Ok(())
}

pub fn steklov(args: &SteklovArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let cfg = integrator(args.rtol)?;
    let p = SteklovParams {
        a: args.a,
        b: args.b,
        c: args.c,
        w: args.w,
        l: args.l,
    };
    let analysis = steklov_monodromy_analysis(p, &cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let v0: [f64; 5] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    let drifts = steklov_conservation_suite(p, &v0, &cfg)?;
    let d = &analysis.derived;
    let verdict = match analysis.verdict {
        SteklovVerdict::Unstable => "unstable",
        SteklovVerdict::Inconclusive => "inconclusive (non-hyperbolic pair on unit circle)",
    };

    println!(
        "parameters          a={} b={} c={} W={} l={}",
        p.a, p.b, p.c, p.w, p.l
    );
    println!(
        "integrator          rtol={:e} atol={:e}",
        cfg.rtol, cfg.atol
    );
    println!("period T            {:.15}", d.period);
    println!("modulus k           {:.15}", d.k);
    println!("rho1, rho2          {:.12e}, {:.12e}", d.rho1, d.rho2);
    println!("B                   {:.12}", analysis.b);
    println!("C                   {:.12}", analysis.c);
    println!("unit eigenvalues    {}", analysis.unit_eigenvalue_count);
    println!("structure residual  {:.3e}", analysis.structure_residual);
    println!("eigenvalues of v(T)");
    for z in &analysis.eigenvalues {
        println!("  {}", fmt_complex(*z));
    }
    println!(
        "roots of x^2+Bx+C   {}, {}",
        fmt_complex(analysis.nontrivial[0]),
        fmt_complex(analysis.nontrivial[1])
    );
    println!(
        "conservation drift  v1 {:.3e}, h1 {:.3e}, h2 {:.3e} (seed {})",
        drifts.v1, drifts.h1, drifts.h2, args.seed
    );
    println!("verdict             {verdict}");

    if let Some(path) = &args.json {
        let param = |name: &str, value: f64| Parameter {
            name: name.into(),
            value: value.to_string(),
        };
        let report = SteklovReport {
            parameters: vec![
                param("a", p.a),
                param("b", p.b),
                param("c", p.c),
                param("W", p.w),
                param("l", p.l),
            ],
            integrator: IntegratorInfo::from(&cfg),
            period: d.period,
            modulus: d.k,
            rho1: d.rho1,
            rho2: d.rho2,
            b: analysis.b,
            c: analysis.c,
            structure_residual: analysis.structure_residual,
            unit_eigenvalue_count: analysis.unit_eigenvalue_count,
            eigenvalues: analysis.eigenvalues.iter().copied().map(complex).collect(),
            nontrivial: [
                complex(analysis.nontrivial[0]),
                complex(analysis.nontrivial[1]),
            ],
            verdict: verdict.into(),
            conservation: ConservationInfo {
                seed: args.seed,
                v0: v0.to_vec(),
                v1_drift: drifts.v1,
                h1_drift: drifts.h1,
                h2_drift: drifts.h2,
            },
            total_seconds: start.elapsed().as_secs_f64(),
        };
        write_json(path, &report)?;
    }
    if drifts.max() > DRIFT_TOL {
        return Err(CliError::Check(format!(
            "conservation drift {:.3e} exceeds {DRIFT_TOL:e}",
            drifts.max()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_parse_and_reject() {
        assert_eq!(parse_range("q", "-1:1").unwrap(), (-1.0, 1.0));
        assert!(parse_range("a", "4:0").is_err());
        assert!(parse_range("a", "0-4").is_err());
        assert!(parse_range("a", "0:inf").is_err());
    }

    #[test]
    fn rtol_sets_atol() {
        let cfg = integrator(Some(1e-8)).unwrap();
        assert_eq!((cfg.rtol, cfg.atol), (1e-8, 1e-10));
        assert!(integrator(Some(0.0)).is_err());
        assert!(integrator(Some(f64::NAN)).is_err());
    }

    #[test]
    fn samples_have_a_floor() {
        assert!(checked_samples(MIN_SAMPLES - 1).is_err());
        assert_eq!(checked_samples(MIN_SAMPLES).unwrap(), MIN_SAMPLES);
    }
}
