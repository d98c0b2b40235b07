//! The five subcommands. Each returns its exit code.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use serde_json::json;

use delsarte_core::dual::{build_dual, solve_dual, verify_certificate};
use delsarte_core::exact::ExactReal;
use delsarte_core::harness::{epsilon_limit_study, fuzz_strong_duality, run_instance, FuzzPlan};
use delsarte_core::lp::{self, SolveOptions};
use delsarte_core::primal::{solve_primal, PrimalOptions, SigmaWeight};
use delsarte_core::regions::{validate, RegionPair, RegionSpec};
use delsarte_core::spectra::{GridFunction, SphericalStructure};

use crate::certificate::{parse_certificate, read_header, sha256_hex, write_certificate, InstanceHashes, TextScalar};
use crate::config::{self, Arith, LoadedConfig, Number, SweepParameter};
use crate::report;
use crate::{CommonArgs, Failure, EXIT_INVALID_CERTIFICATE, EXIT_INVALID_INPUT, EXIT_OK, EXIT_THEOREM_VIOLATION};

type Outcome = std::result::Result<u8, Failure>;

struct Instance<S> {
    structure: SphericalStructure<S>,
    region: RegionPair,
    sigma: SigmaWeight<S>,
    hashes: InstanceHashes,
}

fn parse_scalar<S: TextScalar>(n: &Number, what: &str) -> Result<S> {
    let text = n.text();
    S::parse_text(&text).ok_or_else(|| anyhow!("{what}: cannot read {text:?} as a number"))
}

fn build_instance<S: TextScalar>(cfg: &LoadedConfig, spec: &RegionSpec, truncation: Option<usize>) -> Result<Instance<S>> {
    let structure = SphericalStructure::<S>::new(cfg.structure_kind(truncation), &spec.boundary_angles())?;
    let region = validate(&structure, spec)?;
    let sc = &cfg.config.sigma;
    let sigma = match sc.kind.as_deref() {
        None | Some("dirac") => {
            if sc.c.is_some() || sc.density.is_some() {
                bail!("sigma.c and sigma.density need sigma.kind = \"mixture\"");
            }
            SigmaWeight::dirac(&structure)
        }
        Some("mixture") => {
            let c = sc.c.as_ref().map(|c| parse_scalar::<S>(c, "sigma.c")).transpose()?.unwrap_or_else(S::zero);
            let values = match &sc.density {
                Some(d) => d.iter().map(|v| parse_scalar::<S>(v, "sigma.density")).collect::<Result<Vec<_>>>()?,
                None => vec![S::zero(); structure.grid_len()],
            };
            if values.len() != structure.grid_len() {
                bail!("sigma.density has {} values but the grid has {} points", values.len(), structure.grid_len());
            }
            let tail = sc.tail_lower_bound.as_ref().map(|t| parse_scalar::<S>(t, "sigma.tail_lower_bound")).transpose()?;
            SigmaWeight::mixture(&structure, c, GridFunction { values }, tail)?
        }
        Some(other) => bail!("unknown sigma.kind {other:?} (expected dirac or mixture)"),
    };
    let hashes = InstanceHashes::of(&structure, &region, &sigma);
    Ok(Instance { structure, region, sigma, hashes })
}

fn options(args: &CommonArgs) -> PrimalOptions {
    PrimalOptions {
        lp: SolveOptions { dump_tableau: args.dump_tableau, ..SolveOptions::default() },
        verify_multiplier: args.verify_grid_multiplier.unwrap_or(PrimalOptions::default().verify_multiplier),
    }
}

fn schedule<S: TextScalar>(cfg: &LoadedConfig, args: &CommonArgs) -> Result<Vec<S>> {
    let texts: Vec<String> = match &args.epsilon {
        Some(list) => list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        None => cfg.config.epsilon.iter().map(Number::text).collect(),
    };
    let mut out: Vec<S> = texts
        .iter()
        .map(|t| S::parse_text(t).ok_or_else(|| anyhow!("cannot read ε = {t:?}")))
        .collect::<Result<_>>()?;
    if !out.is_empty() && !out.iter().any(|e| e.is_zero()) {
        out.push(S::zero());
    }
    Ok(out)
}

fn load(args: &CommonArgs) -> std::result::Result<LoadedConfig, Failure> {
    config::load(&args.config).map_err(Failure::input)
}

fn write(dir: &Path, name: &str, bytes: impl AsRef<[u8]>) -> std::result::Result<(), Failure> {
    let path = dir.join(name);
    fs::write(&path, bytes).with_context(|| format!("cannot write {}", path.display())).map_err(Failure::io)
}

fn make_dir(dir: &Path) -> std::result::Result<(), Failure> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display())).map_err(Failure::io)
}

fn invalid(e: anyhow::Error) -> Failure {
    Failure::new(EXIT_INVALID_INPUT, e)
}

fn flavour_name(cfg: &LoadedConfig) -> &'static str {
    match cfg.config.flavour {
        config::Flavour::Turan => "turan",
        config::Flavour::Delsarte => "delsarte",
        config::Flavour::TwoSided => "two_sided",
    }
}

pub fn solve(args: &CommonArgs) -> Outcome {
    let cfg = load(args)?;
    match cfg.arithmetic(args.arith).map_err(invalid)? {
        Arith::Exact => solve_typed::<ExactReal>(&cfg, args),
        Arith::Float => solve_typed::<f64>(&cfg, args),
    }
}

fn solve_typed<S: TextScalar>(cfg: &LoadedConfig, args: &CommonArgs) -> Outcome {
    let spec = cfg.region_spec().map_err(invalid)?;
    let inst = build_instance::<S>(cfg, &spec, args.truncation).map_err(invalid)?;
    let opts = options(args);
    let eps = schedule::<S>(cfg, args).map_err(invalid)?;
    let report = run_instance(&inst.structure, &inst.region, &inst.sigma, &opts).map_err(|e| invalid(e.into()))?;
    let table = if eps.is_empty() {
        None
    } else {
        Some(epsilon_limit_study(&inst.structure, &inst.region, &inst.sigma, &eps, &opts).map_err(|e| invalid(e.into()))?)
    };

    let out = cfg.out_dir(args.out_dir.as_deref());
    make_dir(&out)?;
    let value = report::duality_json(&report, &inst.region, flavour_name(cfg), table.as_ref());
    write(&out, "report.json", serde_json::to_string_pretty(&value).map_err(Failure::io)? + "\n")?;
    let summary = report::summary(&report);
    write(&out, "summary.txt", &summary)?;
    let csv = report::csv_bytes(&report::SOLVE_CSV_HEADER, &[report::solve_csv_row(&report)]).map_err(Failure::io)?;
    write(&out, "report.csv", csv)?;
    write(&out, "certificate.txt", write_certificate(&inst.hashes, &report.certificate))?;
    if args.dump_tableau {
        write(&out, "tableau_primal.txt", report.primal.tableau_log.clone().unwrap_or_default())?;
        let dual = build_dual(&inst.structure, &inst.region, &inst.sigma).map_err(|e| invalid(e.into()))?;
        let sol = lp::solve_with(&dual.problem, &opts.lp).map_err(|e| invalid(e.into()))?;
        write(&out, "tableau_dual.txt", sol.tableau_log.unwrap_or_default())?;
    }
    print!("{summary}");

    if report.theorem_violation || !report.weak_duality_holds {
        let record = json!({
            "instance": report.description,
            "structure": inst.structure.kind(),
            "region": inst.region.spec,
            "u": report.u_value.to_text(),
            "v": report.v_value.to_text(),
            "gap": report.gap.to_text(),
            "weak_duality": report.weak_duality_holds,
        });
        write(&out, "violation.json", serde_json::to_string_pretty(&record).map_err(Failure::io)? + "\n")?;
        return Ok(EXIT_THEOREM_VIOLATION);
    }
    Ok(EXIT_OK)
}

pub fn certify(args: &CommonArgs) -> Outcome {
    let cfg = load(args)?;
    match cfg.arithmetic(args.arith).map_err(invalid)? {
        Arith::Exact => certify_typed::<ExactReal>(&cfg, args),
        Arith::Float => certify_typed::<f64>(&cfg, args),
    }
}

fn certify_typed<S: TextScalar>(cfg: &LoadedConfig, args: &CommonArgs) -> Outcome {
    let spec = cfg.region_spec().map_err(invalid)?;
    let inst = build_instance::<S>(cfg, &spec, args.truncation).map_err(invalid)?;
    let (_, cert) = solve_dual(&inst.structure, &inst.region, &inst.sigma, &options(args).lp)
        .map_err(|e| invalid(e.into()))?;
    let out = cfg.out_dir(args.out_dir.as_deref());
    make_dir(&out)?;
    write(&out, "certificate.txt", write_certificate(&inst.hashes, &cert))?;
    if cert.valid {
        println!("VALID: 𝒜 ≤ α = {}", cert.alpha.to_text());
        Ok(EXIT_OK)
    } else {
        println!("INVALID");
        for r in &cert.reasons {
            println!("  {r}");
        }
        Ok(EXIT_INVALID_CERTIFICATE)
    }
}

pub fn verify(certificate: &Path, args: &CommonArgs) -> Outcome {
    let text = fs::read_to_string(certificate)
        .with_context(|| format!("cannot read certificate {}", certificate.display()))
        .map_err(Failure::io)?;
    let header = read_header(&text).map_err(invalid)?;
    let cfg = load(args)?;
    if let Some(a) = args.arith {
        if a != header.arithmetic {
            return Err(invalid(anyhow!("--arith disagrees with the certificate's arithmetic")));
        }
    }
    if header.arithmetic == Arith::Exact && !cfg.is_finite() {
        return Err(invalid(anyhow!("exact certificate for a continuous structure")));
    }
    match header.arithmetic {
        Arith::Exact => verify_typed::<ExactReal>(&text, &cfg, args),
        Arith::Float => verify_typed::<f64>(&text, &cfg, args),
    }
}

fn verify_typed<S: TextScalar>(text: &str, cfg: &LoadedConfig, args: &CommonArgs) -> Outcome {
    let spec = cfg.region_spec().map_err(invalid)?;
    let inst = build_instance::<S>(cfg, &spec, args.truncation).map_err(invalid)?;
    let (header, cert) = parse_certificate::<S>(text).map_err(invalid)?;
    for (name, got, want) in [
        ("structure", &header.hashes.structure, &inst.hashes.structure),
        ("region", &header.hashes.region, &inst.hashes.region),
        ("sigma", &header.hashes.sigma, &inst.hashes.sigma),
    ] {
        if got != want {
            return Err(invalid(anyhow!("certificate does not match this configuration: {name} hash differs")));
        }
    }
    let report = verify_certificate(&inst.structure, &inst.region, &inst.sigma, &cert);
    if report.valid {
        println!("VALID: 𝒜 ≤ α = {}", report.bound.to_text());
        println!("recheck length {}, tail {}", report.recheck_length, report::tail_text(&report.tail));
        Ok(EXIT_OK)
    } else {
        println!("INVALID");
        for r in &report.reasons {
            println!("{r}");
        }
        Ok(EXIT_INVALID_CERTIFICATE)
    }
}

pub fn fuzz(args: &CommonArgs, trials: usize, exhaustive: bool) -> Outcome {
    let cfg = load(args)?;
    if !cfg.is_finite() {
        return Err(invalid(anyhow!("fuzzing needs a finite structure")));
    }
    if args.arith == Some(Arith::Float) {
        return Err(invalid(anyhow!("fuzzing runs in exact arithmetic only")));
    }
    let kind = cfg.structure_kind(None);
    let plan = if exhaustive {
        FuzzPlan::Exhaustive
    } else {
        FuzzPlan::Random { trials, seed: args.seed.unwrap_or(cfg.config.seed) }
    };
    let summary = fuzz_strong_duality(&kind, plan).map_err(|e| invalid(e.into()))?;
    let out = cfg.out_dir(args.out_dir.as_deref());
    make_dir(&out)?;
    write(&out, "fuzz.json", serde_json::to_string_pretty(&summary).map_err(Failure::io)? + "\n")?;
    println!(
        "{}: {} instances, {} with zero gap, {} invalid certificates, {} violations",
        kind.canonical(),
        summary.instances,
        summary.zero_gap,
        summary.invalid_certificates,
        summary.violations.len()
    );
    for v in &summary.violations {
        write(&out, &format!("violation-{}.json", v.trial), serde_json::to_string_pretty(v).map_err(Failure::io)? + "\n")?;
    }
    Ok(if summary.violations.is_empty() { EXIT_OK } else { EXIT_THEOREM_VIOLATION })
}

pub const SWEEP_CSV_HEADER: [&str; 9] =
    ["parameter", "x", "u", "v", "gap", "a_value", "alpha", "certificate_valid", "status"];

fn parameter_name(p: SweepParameter) -> &'static str {
    match p {
        SweepParameter::TuranK => "turan_k",
        SweepParameter::Cap => "cap",
        SweepParameter::Epsilon => "epsilon",
    }
}

fn cache_dir(out: &Path) -> PathBuf {
    std::env::var_os("DELSARTE_CACHE_DIR").map(PathBuf::from).unwrap_or_else(|| out.join(".delsarte-cache"))
}

/// One sweep row. `Err` carries a message recorded in the status column.
fn sweep_row<S: TextScalar>(
    cfg: &LoadedConfig,
    args: &CommonArgs,
    parameter: SweepParameter,
    value: &Number,
) -> Result<(Vec<String>, bool)> {
    let spec = cfg.swept_region(parameter, value)?;
    let inst = build_instance::<S>(cfg, &spec, args.truncation)?;
    let opts = options(args);
    let head = vec![parameter_name(parameter).to_string(), value.text()];
    if parameter == SweepParameter::Epsilon {
        let eps = parse_scalar::<S>(value, "ε")?;
        let p = solve_primal(&inst.structure, &inst.region, &inst.sigma, &eps, &opts)?;
        let row = [p.u_value.to_text(), String::new(), String::new(), p.a_value.to_text(), String::new(), String::new()];
        return Ok((head.into_iter().chain(row).chain(["ok".to_string()]).collect(), false));
    }
    let r = run_instance(&inst.structure, &inst.region, &inst.sigma, &opts)?;
    let violation = r.theorem_violation || !r.weak_duality_holds;
    let status = if violation { "theorem_violation" } else { "ok" };
    let row = [
        r.u_value.to_text(),
        r.v_value.to_text(),
        r.gap.to_text(),
        r.a_value.to_text(),
        r.alpha.to_text(),
        r.validity.valid.to_string(),
        status.to_string(),
    ];
    Ok((head.into_iter().chain(row).collect(), violation))
}

pub fn sweep(args: &CommonArgs) -> Outcome {
    let cfg = load(args)?;
    let arith = cfg.arithmetic(args.arith).map_err(invalid)?;
    let sweep = cfg.config.sweep.clone().ok_or_else(|| invalid(anyhow!("config has no [sweep] section")))?;
    if sweep.values.is_empty() {
        return Err(invalid(anyhow!("sweep.values is empty")));
    }
    let out = cfg.out_dir(args.out_dir.as_deref());
    make_dir(&out)?;
    let cache = cache_dir(&out);
    make_dir(&cache)?;
    let name = parameter_name(sweep.parameter);

    let rows: Vec<std::result::Result<(Vec<String>, bool), Failure>> = sweep
        .values
        .par_iter()
        .map(|value| {
            let key = sha256_hex(&format!(
                "{}\0{}\0{:?}\0{:?}\0{name}={}",
                cfg.text,
                crate::certificate::arith_name(arith),
                args.truncation,
                args.verify_grid_multiplier,
                value.text()
            ));
            let path = cache.join(format!("{key}.json"));
            if let Ok(bytes) = fs::read(&path) {
                if let Ok((row, violation)) = serde_json::from_slice::<(Vec<String>, bool)>(&bytes) {
                    return Ok((row, violation));
                }
            }
            let computed = match arith {
                Arith::Exact => sweep_row::<ExactReal>(&cfg, args, sweep.parameter, value),
                Arith::Float => sweep_row::<f64>(&cfg, args, sweep.parameter, value),
            };
            match computed {
                Ok(entry) => {
                    let bytes = serde_json::to_vec(&entry).map_err(Failure::io)?;
                    fs::write(&path, bytes)
                        .with_context(|| format!("cannot write cache entry {}", path.display()))
                        .map_err(Failure::io)?;
                    Ok(entry)
                }
                Err(e) => {
                    eprintln!("warning: {name} = {} failed: {e:#}", value.text());
                    let mut row = vec![name.to_string(), value.text()];
                    row.extend(std::iter::repeat_n(String::new(), 6));
                    row.push(format!("error: {e:#}"));
                    Ok((row, false))
                }
            }
        })
        .collect();

    let mut table = Vec::with_capacity(rows.len());
    let mut any_violation = false;
    for r in rows {
        let (row, violation) = r?;
        any_violation |= violation;
        table.push(row);
    }
    let csv = report::csv_bytes(&SWEEP_CSV_HEADER, &table).map_err(Failure::io)?;
    write(&out, "sweep.csv", csv)?;
    // x and 𝒜 as floats, whitespace separated, for plotting tools.
    let mut plot = String::from("# x a_value\n");
    for row in &table {
        if let (Some(x), Some(y)) = (plot_value(&row[1]), plot_value(&row[5])) {
            plot.push_str(&format!("{x} {y}\n"));
        }
    }
    write(&out, "sweep_plot.dat", plot)?;
    println!("{} rows written to {}", table.len(), out.join("sweep.csv").display());
    Ok(if any_violation { EXIT_THEOREM_VIOLATION } else { EXIT_OK })
}

fn plot_value(text: &str) -> Option<f64> {
    if text.is_empty() {
        return None;
    }
    if let Some(deg) = text.strip_suffix("deg") {
        return deg.trim().parse().ok();
    }
    <f64 as TextScalar>::parse_text(text).or_else(|| {
        delsarte_core::exact::parse_exact(text).map(|e| delsarte_core::scalar::Scalar::to_f64(&e))
    })
}
