use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use hedgehog::algebra::{run_all, SuiteOptions};
use hedgehog::minimizer::{minimality_suite, minimize as run_minimize, MinOptions, Method};
use hedgehog::plot::{g_figure, map_ascii, map_svg, parse_stability_csv, profile_figure, render_ascii, render_svg};
use hedgehog::profile::{profile_energy, solve_profile, verify_bounds, write_profile_csv, RadialGrid};
use hedgehog::shell::{hedgehog_on_grid, random_admissible, write_field_csv, ShellGrid, SnapshotMeta};
use hedgehog::spectra::{stability_report, write_stability_csv, StabilityOptions, StabilityReport, STABILITY_CSV_HEADER};
use hedgehog::thresholds::{tau_for_constant, threshold_table};
use hedgehog::ScalingParams;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::{LemmaArgs, MethodArg, MinimizeArgs, PlotArgs, PlotFormat, PlotKind, SolveArgs, SpectrumArgs, ThresholdArgs};

pub const OK: u8 = 0;
pub const FAIL: u8 = 1;
pub const USAGE: u8 = 2;

fn emit(value: &serde_json::Value, path: Option<&Path>) -> u8 {
    let text = serde_json::to_string_pretty(value).expect("json values serialize");
    println!("{text}");
    if let Some(p) = path {
        if let Err(e) = fs::write(p, format!("{text}\n")) {
            eprintln!("error: cannot write {}: {e}", p.display());
            return FAIL;
        }
    }
    OK
}

fn config<T: Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).expect("arguments serialize")
}

pub fn solve(a: &SolveArgs) -> u8 {
    let run = || -> hedgehog::Result<_> {
        let p = ScalingParams::new(a.t)?;
        let grid = RadialGrid::uniform(a.r_outer, a.nr)?;
        let prof = solve_profile(a.r_outer, &p, &grid, a.tol)?;
        let bounds = verify_bounds(&prof)?;
        Ok((prof, bounds))
    };
    let (prof, bounds) = match run() {
        Ok(v) => v,
        Err(e) => {
            let last = match &e {
                hedgehog::HedgehogError::Solver { t, residual, iterations, .. } => {
                    json!({"t": t, "residual": residual, "iterations": iterations})
                }
                _ => serde_json::Value::Null,
            };
            emit(&json!({"command": "solve", "config": config(a), "error": e.to_string(), "solver": last}), a.json.as_deref());
            return FAIL;
        }
    };
    if let Some(path) = &a.out {
        let res = File::create(path).map_err(hedgehog::HedgehogError::from).and_then(|f| write_profile_csv(&prof, BufWriter::new(f)));
        if let Err(e) = res {
            eprintln!("error: cannot write {}: {e}", path.display());
            return FAIL;
        }
    }
    let out = json!({
        "command": "solve",
        "config": config(a),
        "energy": profile_energy(&prof),
        "min_h": prof.min_h(),
        "argmin_r": prof.argmin_r(),
        "residual": prof.residual_norm,
        "ode_residual": prof.ode_residual,
        "newton_iterations": prof.newton_iterations,
        "continuation_path": prof.continuation_path,
        "h_plus": prof.params.h_plus,
        "bounds": bounds,
    });
    let code = emit(&out, a.json.as_deref());
    if code != OK {
        return code;
    }
    if bounds.passed { OK } else { FAIL }
}

#[derive(Serialize)]
struct PointFailure {
    #[serde(rename = "R")]
    r_outer: f64,
    t: f64,
    error: String,
}

pub fn spectrum(a: &SpectrumArgs) -> u8 {
    let rs = a.r_range.map_or(vec![a.r_outer], |r| r.values());
    let ts = a.t_range.map_or(vec![a.t], |r| r.values());
    if rs.iter().any(|&r| !(r > 1.0)) {
        eprintln!("error: every R in the sweep must be > 1");
        return USAGE;
    }
    if ts.iter().any(|&t| !(t >= 0.0)) {
        eprintln!("error: every t in the sweep must be >= 0");
        return USAGE;
    }
    let opts = StabilityOptions { n: a.nr, i_max: a.i_max.max(2), full_grid: a.full_grid, tol: a.tol, ..Default::default() };
    let points: Vec<(f64, f64)> = rs.iter().flat_map(|&r| ts.iter().map(move |&t| (r, t))).collect();
    let results: Vec<Result<StabilityReport, PointFailure>> = points
        .par_iter()
        .map(|&(r, t)| stability_report(r, t, &opts).map_err(|e| PointFailure { r_outer: r, t, error: e.to_string() }))
        .collect();
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(rep) => reports.push(rep),
            Err(f) => failures.push(f),
        }
    }
    if let Some(path) = &a.csv {
        let res = File::create(path).map_err(hedgehog::HedgehogError::from).and_then(|f| {
            let mut w = BufWriter::new(f);
            write_stability_csv(&reports, &mut w)?;
            for f in &failures {
                writeln!(w, "{},{},nan,nan,nan,nan,nan,solver_failed", f.r_outer, f.t)?;
            }
            Ok(())
        });
        if let Err(e) = res {
            eprintln!("error: cannot write {}: {e}", path.display());
            return FAIL;
        }
    }
    let out = json!({
        "command": "spectrum",
        "config": config(a),
        "csv_header": STABILITY_CSV_HEADER,
        "reports": reports,
        "failures": failures,
    });
    let code = emit(&out, a.json.as_deref());
    if code != OK {
        return code;
    }
    if failures.is_empty() { OK } else { FAIL }
}

pub fn verify_lemmas(a: &LemmaArgs) -> u8 {
    let opts = SuiteOptions { samples: a.samples.max(1), seed: a.seed, varphi_h: a.varphi_h, ..Default::default() };
    let rep = run_all(&opts);
    for r in &rep.results {
        eprintln!(
            "{:<4} {:<36} worst margin {:>12.4e} (tolerance {:.0e}, {} samples)",
            if r.passed { "ok" } else { "FAIL" },
            r.name,
            r.worst_margin,
            r.tolerance,
            r.samples
        );
    }
    let ex = &rep.exact;
    eprintln!(
        "{:<4} exact y^2 at h = 1: {} (expected {})",
        if ex.y2_matches { "ok" } else { "FAIL" },
        ex.y2_at_one,
        ex.y2_expected
    );
    eprintln!(
        "{:<4} y = z = 0 discriminant negative at {} rational h in [0, 1]",
        if ex.x_branch_all_negative { "ok" } else { "FAIL" },
        ex.x_branch_points
    );
    eprintln!("     onset estimate h* = {} (scan of {} points)", ex.h_star.h_star, ex.h_star.samples);
    let code = emit(&json!({"command": "verify-lemmas", "config": config(a), "report": rep}), a.json.as_deref());
    if code != OK {
        return code;
    }
    if rep.all_passed { OK } else { FAIL }
}

pub fn minimize(a: &MinimizeArgs) -> u8 {
    let method = match a.method {
        MethodArg::Lbfgs => Method::Lbfgs,
        MethodArg::GradientFlow => Method::GradientFlow,
    };
    let opts = MinOptions { tol: a.tol, max_iter: a.max_iter, method, ..Default::default() };
    let run = || -> hedgehog::Result<_> {
        let p = ScalingParams::new(a.t)?;
        let prof = solve_profile(a.r_outer, &p, &RadialGrid::uniform(a.r_outer, a.nr)?, 1e-11)?;
        let (nr, nt, np) = a.grid;
        let g = ShellGrid::new(a.r_outer, nr, nt, np)?;
        let summary = minimality_suite(&prof, &g, a.runs, a.amplitude, a.seed, &opts)?;
        if let Some(path) = &a.snapshot {
            let hq = hedgehog_on_grid(&g, &prof)?;
            let init = random_admissible(&g, &prof, a.amplitude, a.seed)?;
            let (_, q) = run_minimize(&init, &p, &g, &opts, &hq)?;
            write_field_csv(&q, &g, BufWriter::new(File::create(path)?))?;
            let meta = SnapshotMeta { nr, ntheta: nt, nphi: np, r_outer: a.r_outer, t: a.t, seed: Some(a.seed) };
            fs::write(path.with_extension("json"), serde_json::to_string_pretty(&meta)?)?;
        }
        Ok(summary)
    };
    let summary = match run() {
        Ok(s) => s,
        Err(e) => {
            emit(&json!({"command": "minimize", "config": config(a), "error": e.to_string()}), a.json.as_deref());
            return FAIL;
        }
    };
    let e_h = summary.hedgehog_energy.abs();
    let gap_ok = summary.min_gap_to_reference >= -a.gap_tol * e_h;
    let dist_ok = summary.max_distance_to_reference <= a.distance_tol * summary.hedgehog_norm;
    for r in &summary.runs {
        eprintln!(
            "seed {:>4}: E = {:.12e}  gap {:+.3e}  dist {:.3e}  iters {:>5}  {}",
            r.seed,
            r.result.final_energy,
            r.gap_to_reference,
            r.distance_to_reference,
            r.result.iterations,
            if r.result.converged { "converged" } else { "NOT converged" }
        );
    }
    let checks = json!({
        "gap_within_tolerance": gap_ok,
        "distance_within_tolerance": dist_ok,
        "relative_min_gap": summary.min_gap_to_reference / e_h,
        "relative_max_distance": summary.max_distance_to_reference / summary.hedgehog_norm,
        "relative_min_gap_to_sampled_hedgehog": summary.min_gap_to_hedgehog / e_h,
        "relative_max_distance_to_sampled_hedgehog": summary.max_distance_to_hedgehog / summary.hedgehog_norm,
        "all_converged": summary.all_converged,
    });
    let code = emit(&json!({"command": "minimize", "config": config(a), "checks": checks, "summary": summary}), a.json.as_deref());
    if code != OK {
        return code;
    }
    if summary.all_converged || a.allow_nonconverged { OK } else { FAIL }
}

pub fn plot(a: &PlotArgs) -> u8 {
    let format = a.format.unwrap_or(if a.out.is_some() { PlotFormat::Svg } else { PlotFormat::Ascii });
    let rendered = match a.kind {
        PlotKind::G => g_figure(a.eps_max, 600).map(|f| match format {
            PlotFormat::Svg => render_svg(&f),
            PlotFormat::Ascii => render_ascii(&f, 72, 20),
        }),
        PlotKind::Profile => ScalingParams::new(a.t)
            .and_then(|p| solve_profile(a.r_outer, &p, &RadialGrid::uniform(a.r_outer, a.nr)?, 1e-10))
            .and_then(|prof| profile_figure(&prof))
            .map(|f| match format {
                PlotFormat::Svg => render_svg(&f),
                PlotFormat::Ascii => render_ascii(&f, 72, 20),
            }),
        PlotKind::Map => {
            let Some(input) = &a.input else {
                eprintln!("error: --kind map needs --input <stability csv>");
                return USAGE;
            };
            match fs::read_to_string(input) {
                Ok(text) => parse_stability_csv(&text).and_then(|cells| match format {
                    PlotFormat::Svg => map_svg(&cells),
                    PlotFormat::Ascii => map_ascii(&cells),
                }),
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", input.display());
                    return USAGE;
                }
            }
        }
    };
    let text = match rendered {
        Ok(t) => t,
        Err(hedgehog::HedgehogError::Domain(m)) => {
            eprintln!("error: {m}");
            return USAGE;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return FAIL;
        }
    };
    match &a.out {
        Some(p) => match fs::write(p, &text) {
            Ok(()) => OK,
            Err(e) => {
                eprintln!("error: cannot write {}: {e}", p.display());
                FAIL
            }
        },
        None => {
            print!("{text}");
            OK
        }
    }
}

pub fn thresholds(a: &ThresholdArgs) -> u8 {
    let table = match threshold_table() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return FAIL;
        }
    };
    let tau = tau_for_constant(43).expect("43 + 3 is even");
    if a.json {
        return emit(&json!({"command": "thresholds", "config": config(a), "thresholds": table, "tau2": tau}), None);
    }
    println!("{:<8} {:>12}  {}", "name", "value", "source");
    for t in &table {
        println!("{:<8} {:>12.6}  {}", t.name, t.value, t.source);
        println!("{:<8} {:>12}  ({})", "", "", t.note);
    }
    println!(
        "tau2 check: t = {} = 43 * {} exactly: {}",
        tau.t,
        tau.h_plus,
        if tau.equality { "yes" } else { "no" }
    );
    if tau.equality { OK } else { FAIL }
}
