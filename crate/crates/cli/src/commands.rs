use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use friedlander::airy::{principal_seed, refine_zero, AiryZeroTable, DEFAULT_ZERO_TOL};
use friedlander::geodesics::{closed_geodesic, length_spectrum, sample_closed_geodesic};
use friedlander::spectrum::{bohr_sommerfeld, enumerate_below, sector_deviation};
use friedlander::symbols::{standard_suite, Claim, GridSpec, SymbolEstimate};
use friedlander::trace::cones::ConePartition;
use friedlander::trace::diagnostics::{diagnostic_spacing, smoothness_asymmetry_with, trace_peaks, uniform_grid};
use friedlander::trace::poisson::{poisson_check, Gaussian};
use friedlander::trace::{
    windowed_trace, Engine, Mollifier, PhaseModel, Sector, TraceRequest, ZeroPolicy,
};

use crate::table::{compare, format_float, Cell, Table};
use crate::{
    Cli, Command, EngineArg, Failure, MollifierArg, PhaseArg, SectorArg, TraceArgs, TraceDiagnostic,
    ZeroPolicyArg,
};

/// Zeros loaded for subcommands that need a table but no particular size.
const DEFAULT_TABLE: usize = 2000;

/// Runs the parsed command; the value is the exit status on success paths.
pub fn dispatch(cli: &Cli) -> Result<u8, Failure> {
    let config = json!({ "command": serde_json::to_value(&cli.command).map_err(Failure::numeric)? });
    let table = run(&cli.command, config, cli)?;
    match &cli.common.from_file {
        None => {
            emit(&table.render(cli.common.format).map_err(Failure::numeric)?, cli)?;
            Ok(0)
        }
        Some(path) => compare_with_file(&table, path, cli),
    }
}

fn emit(text: &str, cli: &Cli) -> Result<(), Failure> {
    match &cli.common.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Numeric(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(Failure::numeric)
        }
    }
}

/// Re-reads the fresh table through its own text form so both sides went
/// through the same parser, then diffs it against the file.
fn compare_with_file(fresh: &Table, path: &Path, cli: &Cli) -> Result<u8, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let stored = Table::parse(&text).map_err(|e| Failure::Numeric(format!("{}: {e}", path.display())))?;
    let fresh = Table::parse(&fresh.render(cli.common.format).map_err(Failure::numeric)?)
        .map_err(Failure::numeric)?;
    let diffs = compare(&stored, &fresh, cli.common.rtol).map_err(Failure::Numeric)?;
    let config_matches = stored.config == fresh.config;
    let mut report = Table::new(
        json!({ "compare": path.display().to_string(), "rtol": cli.common.rtol, "config_matches": config_matches }),
        &["column", "compared", "max_abs_diff", "max_rel_diff", "mismatches"],
    );
    let mut bad = 0;
    for d in diffs {
        bad += d.mismatches;
        report.push(vec![
            d.column.into(),
            d.compared.into(),
            d.max_abs_diff.into(),
            d.max_rel_diff.into(),
            d.mismatches.into(),
        ]);
    }
    emit(&report.render(cli.common.format).map_err(Failure::numeric)?, cli)?;
    if bad > 0 {
        eprintln!("error: {bad} cells differ from {} beyond rtol = {}", path.display(), cli.common.rtol);
        return Ok(1);
    }
    Ok(0)
}

fn run(command: &Command, config: Value, cli: &Cli) -> Result<Table, Failure> {
    match command {
        Command::AiryZeros { count } => airy_zeros(*count, config, cli),
        Command::Spectrum { emax } => spectrum(*emax, config, cli),
        Command::BohrSommerfeld { sector, mmax, mmin } => {
            if mmin > mmax {
                return Err(Failure::Usage(format!("--mmin {mmin} exceeds --mmax {mmax}")));
            }
            let zeros = load_zeros(cli, *mmax)?;
            let s = sector_deviation(sector.0, sector.1, *mmin, *mmax, &zeros).map_err(Failure::numeric)?;
            let mut t = Table::new(
                config,
                &["c1", "c2", "m_min", "m_max", "count", "max_deviation", "argmax_m", "argmax_n", "mean_deviation"],
            );
            t.push(vec![
                s.c1.into(),
                s.c2.into(),
                s.m_min.into(),
                s.m_max.into(),
                s.count.into(),
                s.max_deviation.into(),
                s.argmax_m.into(),
                s.argmax_n.into(),
                s.mean_deviation.into(),
            ]);
            Ok(t)
        }
        Command::Lengths { kmax, lmax } => {
            let table = length_spectrum(*kmax, *lmax).map_err(Failure::numeric)?;
            let mut t = Table::new(config, &["k", "ell", "eta0", "length", "residual1", "residual2"]);
            for g in &table.entries {
                t.push(vec![
                    g.k.into(),
                    g.ell.into(),
                    g.eta0.into(),
                    g.length.into(),
                    g.residual1.into(),
                    g.residual2.into(),
                ]);
            }
            Ok(t)
        }
        Command::Geodesic { k, ell, emit_trajectory, per_arc } => {
            let g = closed_geodesic(*k, *ell).map_err(Failure::numeric)?;
            if *emit_trajectory {
                let mut t = Table::new(config, &["t", "x", "y", "caustic"]);
                for (time, x, y) in sample_closed_geodesic(&g, *per_arc) {
                    t.push(vec![time.into(), x.into(), y.into(), g.caustic().into()]);
                }
                Ok(t)
            } else {
                let mut t = Table::new(
                    config,
                    &["k", "ell", "xi0", "eta0", "length", "caustic", "residual1", "residual2"],
                );
                t.push(vec![
                    g.k.into(),
                    g.ell.into(),
                    g.xi0.into(),
                    g.eta0.into(),
                    g.length.into(),
                    g.caustic().into(),
                    g.residual1.into(),
                    g.residual2.into(),
                ]);
                Ok(t)
            }
        }
        Command::Trace(args) => trace(args, config, cli),
        Command::Symbols { claim, jmax, kmax, suite } => symbols(claim.as_deref(), *jmax, *kmax, *suite, config),
        Command::PoissonCheck { alpha, beta, shift_x, shift_y } => {
            let g = Gaussian {
                alpha: *alpha,
                beta: *beta,
                shift_x: *shift_x,
                shift_y: *shift_y,
            };
            let o = poisson_check(&g).map_err(Failure::numeric)?;
            let mut t = Table::new(
                config,
                &["alpha", "beta", "shift_x", "shift_y", "lhs", "rhs", "rhs_imag", "gap", "lhs_terms", "rhs_terms"],
            );
            t.push(vec![
                g.alpha.into(),
                g.beta.into(),
                g.shift_x.into(),
                g.shift_y.into(),
                o.lhs.into(),
                o.rhs.into(),
                o.rhs_imag.into(),
                o.gap.into(),
                o.lhs_terms.into(),
                o.rhs_terms.into(),
            ]);
            Ok(t)
        }
    }
}

fn airy_zeros(count: usize, config: Value, cli: &Cli) -> Result<Table, Failure> {
    let mut t = Table::new(config, &["m", "t_m", "seed", "residual"]);
    let zeros = load_zeros(cli, count)?;
    for m in 1..=count {
        t.push(vec![
            m.into(),
            zeros.get(m).into(),
            principal_seed(m).into(),
            zeros.residual(m).into(),
        ]);
    }
    Ok(t)
}

fn spectrum(emax: f64, config: Value, cli: &Cli) -> Result<Table, Failure> {
    let zeros = load_zeros(cli, 1)?;
    let points = enumerate_below(emax, &zeros).map_err(Failure::numeric)?;
    let mut t = Table::new(config, &["m", "n", "lambda", "sqrt_lambda", "Lambda", "diff"]);
    for p in points {
        let bs = bohr_sommerfeld(p.m, p.n).map_err(Failure::numeric)?.big_lambda;
        t.push(vec![
            p.m.into(),
            p.n.into(),
            p.lambda.into(),
            p.sqrt_lambda.into(),
            bs.into(),
            (p.sqrt_lambda - bs.sqrt()).into(),
        ]);
    }
    Ok(t)
}

fn trace(args: &TraceArgs, config: Value, cli: &Cli) -> Result<Table, Failure> {
    match &args.diagnostic {
        Some(TraceDiagnostic::Peaks { window, cutoff, kmax, lmax }) => {
            let zeros = load_zeros(cli, DEFAULT_TABLE)?;
            let lengths = length_spectrum(*kmax, *lmax).map_err(Failure::numeric)?;
            let report = trace_peaks((window.0, window.1), *cutoff, &zeros, &lengths).map_err(Failure::numeric)?;
            let mut t = Table::new(
                config,
                &["t_peak", "abs", "matched_k", "matched_ell", "length", "offset"],
            );
            for m in report.matches {
                t.push(vec![
                    m.t_peak.into(),
                    m.abs.into(),
                    m.matched_k.into(),
                    m.matched_ell.into(),
                    m.length.into(),
                    m.offset.into(),
                ]);
            }
            Ok(t)
        }
        Some(TraceDiagnostic::Asymmetry { ell, delta, cutoffs, phase, kmax, lmax }) => {
            let zeros = load_zeros(cli, DEFAULT_TABLE)?;
            let lengths = length_spectrum(*kmax, *lmax).map_err(Failure::numeric)?;
            let rows = smoothness_asymmetry_with(*ell, *delta, cutoffs, &zeros, &lengths, phase_model(*phase))
                .map_err(Failure::numeric)?;
            let mut t = Table::new(config, &["cutoff", "left_metric", "right_metric", "ratio"]);
            for r in rows {
                t.push(vec![r.cutoff.into(), r.left_metric.into(), r.right_metric.into(), r.ratio.into()]);
            }
            Ok(t)
        }
        None => {
            let (tmin, tmax, cutoff) = match (args.tmin, args.tmax, args.cutoff) {
                (Some(a), Some(b), Some(c)) => (a, b, c),
                _ => {
                    return Err(Failure::Usage(
                        "trace needs --tmin, --tmax and --cutoff (or a peaks/asymmetry subcommand)".into(),
                    ))
                }
            };
            if tmax < tmin {
                return Err(Failure::Usage(format!("--tmax {tmax} is below --tmin {tmin}")));
            }
            let step = args.step.unwrap_or_else(|| diagnostic_spacing(cutoff));
            let grid = if tmax == tmin { vec![tmin] } else { uniform_grid(tmin, tmax, step) };
            let bound = std::f64::consts::PI / (4.0 * cutoff);
            if step > bound * (1.0 + 1e-12) {
                return Err(Failure::Numeric(format!(
                    "step {step} exceeds the sampling bound π/(4Λ) = {bound} for cutoff {cutoff}; \
                     the trace would alias"
                )));
            }
            let cones = ConePartition::new(args.kappa1, args.kappa2, args.transition_width)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let req = TraceRequest {
                mollifier: match args.mollifier {
                    MollifierArg::Gaussian => Mollifier::GaussianFreq,
                    MollifierArg::Sharp => Mollifier::SharpEnergy,
                },
                sector: match args.sector {
                    SectorArg::All => Sector::All,
                    SectorArg::One => Sector::Gamma1,
                    SectorArg::Two => Sector::Gamma2,
                    SectorArg::Three => Sector::Gamma3,
                },
                cone_params: cones,
                zero_policy: match args.zero_policy {
                    ZeroPolicyArg::Tail => ZeroPolicy::AsymptoticTail,
                    ZeroPolicyArg::Table => ZeroPolicy::TableOnly,
                },
                phase: phase_model(args.phase),
                engine: match args.engine {
                    EngineArg::Auto => Engine::Auto,
                    EngineArg::Direct => Engine::Direct,
                    EngineArg::Binned => Engine::Binned,
                },
                ..TraceRequest::new(grid, cutoff)
            };
            let zeros = load_zeros(cli, DEFAULT_TABLE)?;
            let res = windowed_trace(&req, &zeros).map_err(Failure::numeric)?;
            let mut config = config;
            config["lattice_count"] = json!(res.lattice_count);
            config["cutoff_used"] = json!(res.cutoff_used);
            config["engine_used"] = json!(res.engine);
            let mut t = Table::new(config, &["t", "re", "im", "abs"]);
            for (time, z) in res.t_grid.iter().zip(&res.values) {
                t.push(vec![(*time).into(), z.re.into(), z.im.into(), z.norm().into()]);
            }
            Ok(t)
        }
    }
}

fn phase_model(p: PhaseArg) -> PhaseModel {
    match p {
        PhaseArg::Friedlander => PhaseModel::Friedlander,
        PhaseArg::Flat => PhaseModel::Flat,
    }
}

const SYMBOL_COLUMNS: [&str; 13] = [
    "claim",
    "function",
    "cone",
    "kind",
    "alpha",
    "beta",
    "j",
    "k",
    "fitted_constant",
    "max_violation_ratio",
    "holdout_ratios",
    "stable",
    "passed",
];

fn symbol_row(claim: &str, c: &Claim, e: &SymbolEstimate) -> Vec<Cell> {
    let ratios: Vec<String> = e.holdout_ratios.iter().map(|r| format_float(*r)).collect();
    let value = |v: Value| v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string());
    vec![
        claim.into(),
        value(json!(c.function)).into(),
        e.cone.to_string().into(),
        value(json!(e.kind)).into(),
        e.alpha.into(),
        e.beta.into(),
        e.order_j.into(),
        e.order_k.into(),
        e.fitted_constant.into(),
        e.max_violation_ratio.into(),
        ratios.join(";").into(),
        e.stable.into(),
        e.passed.into(),
    ]
}

fn symbols(claim: Option<&str>, jmax: usize, kmax: usize, suite: bool, config: Value) -> Result<Table, Failure> {
    let grid = GridSpec::default();
    if suite {
        let mut columns = vec!["label"];
        columns.extend(SYMBOL_COLUMNS);
        columns.push("expect_pass");
        let mut t = Table::new(config, &columns);
        for entry in standard_suite() {
            let est = entry.claim.check(entry.j_max, entry.k_max, &grid).map_err(Failure::numeric)?;
            let text = claim_text(&entry.claim);
            for e in &est {
                let mut row = vec![Cell::from(entry.label)];
                row.extend(symbol_row(&text, &entry.claim, e));
                row.push(entry.expect_pass.into());
                t.push(row);
            }
        }
        return Ok(t);
    }
    let text = claim.expect("clap requires --claim without --suite");
    let c: Claim = text.parse().map_err(|e: friedlander::symbols::SymbolError| Failure::Usage(e.to_string()))?;
    let est = c.check(jmax, kmax, &grid).map_err(Failure::numeric)?;
    let mut t = Table::new(config, &SYMBOL_COLUMNS);
    for e in &est {
        t.push(symbol_row(text, &c, e));
    }
    Ok(t)
}

fn claim_text(c: &Claim) -> String {
    format!("{:?}:{}:{:?}:{},{}", c.function, c.cone, c.kind, format_float(c.alpha), format_float(c.beta))
}

// Zero cache.

const CACHE_COLUMNS: [&str; 3] = ["m", "t_m", "residual"];

fn load_zeros(cli: &Cli, need: usize) -> Result<AiryZeroTable, Failure> {
    let need = need.max(1);
    let Some(path) = &cli.common.zeros_cache else {
        return AiryZeroTable::new(need).map_err(Failure::numeric);
    };
    if !path.exists() {
        let table = AiryZeroTable::new(need).map_err(Failure::numeric)?;
        write_cache(path, &table)?;
        return Ok(table);
    }
    let table = read_cache(path)?;
    if table.len() >= need {
        return Ok(table);
    }
    let grown = table.extended(need).map_err(Failure::numeric)?;
    write_cache(path, &grown)?;
    Ok(grown)
}

fn write_cache(path: &Path, table: &AiryZeroTable) -> Result<(), Failure> {
    let mut t = Table::new(json!({ "zeros_cache": { "refinement_tol": table.refinement_tol() } }), &CACHE_COLUMNS);
    for m in 1..=table.len() {
        t.push(vec![m.into(), table.get(m).into(), table.residual(m).into()]);
    }
    let text = t.render(crate::table::Format::Csv).map_err(Failure::numeric)?;
    fs::write(path, text).map_err(|e| Failure::Numeric(format!("cannot write {}: {e}", path.display())))
}

/// Parses the cache and re-verifies every zero and its stored residual.
fn read_cache(path: &Path) -> Result<AiryZeroTable, Failure> {
    let corrupt = |why: String| Failure::Numeric(format!("zeros cache {} failed verification: {why}", path.display()));
    let text = fs::read_to_string(path).map_err(|e| corrupt(e.to_string()))?;
    let t = Table::parse(&text).map_err(corrupt)?;
    if t.columns != CACHE_COLUMNS {
        return Err(corrupt(format!("columns {:?}", t.columns)));
    }
    let mut zeros = Vec::with_capacity(t.rows.len());
    let mut stored = Vec::with_capacity(t.rows.len());
    for (i, row) in t.rows.iter().enumerate() {
        match row.as_slice() {
            [Cell::Int(m), Cell::Float(z), Cell::Float(r)] if *m == i as i64 + 1 => {
                zeros.push(*z);
                stored.push(*r);
            }
            _ => return Err(corrupt(format!("malformed row {}", i + 1))),
        }
    }
    let table = AiryZeroTable::from_zeros(zeros, DEFAULT_ZERO_TOL).map_err(|e| corrupt(e.to_string()))?;
    for (i, r) in stored.iter().enumerate() {
        let m = i + 1;
        if table.residual(m) != Some(*r) {
            return Err(corrupt(format!(
                "residual of m = {m} is {:e} on re-evaluation, {r:e} stored",
                table.residual(m).unwrap_or(f64::NAN)
            )));
        }
    }
    // The first entry doubles as a check that the table was built the same way.
    let first = refine_zero(1, DEFAULT_ZERO_TOL).map_err(Failure::numeric)?;
    if table.get(1) != Some(first.t) {
        return Err(corrupt("t_1 differs from a fresh refinement".into()));
    }
    Ok(table)
}
