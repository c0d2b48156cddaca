//! The five batch commands.

use std::path::Path;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use isomonodromy::fuchsian::{check_general_position, monodromy, FuchsianSystem};
use isomonodromy::numkit::Matrix;
use isomonodromy::rh::{
    fredholm_parity_check, rh_solve_regular_with, AnnulusFunction, RhError,
};
use isomonodromy::schlesinger::{
    build_explicit, conservation_residual, core_determinant, eval_q, ExplicitSolution,
    SchlesingerError, SchlesingerSeed,
};

use crate::config::Tolerances;
use crate::io::{
    from_c64, parse_json, read_to_string, write_atomic, BoundaryData, CheckLine,
    ConstructSummary, FactorizationArtifact, FamilySpec, PathSpec, SchlesingerSource,
    VerifyReport,
};
use crate::CliError;

fn hyphenated(relation: &str) -> String {
    relation.replace('_', "-")
}

fn seed_error(err: SchlesingerError) -> CliError {
    match err {
        SchlesingerError::InvalidSeed { relation, j, residual } => {
            let location = j.map(|j| format!(" at j={j}")).unwrap_or_default();
            CliError::invalid_seed(format!(
                "{} violated{location} (residual {residual:.3e})",
                hyphenated(&relation)
            ))
        }
        SchlesingerError::InvalidConfiguration(msg) => CliError::invalid_seed(msg),
        other => CliError::invalid_seed(other.to_string()),
    }
}

pub fn construct(input: &Path, output: &Path) -> Result<(), CliError> {
    let text = read_to_string(input)?;
    let seed: SchlesingerSeed = parse_json(&text, "seed")?;
    seed.check_as_error().map_err(seed_error)?;
    let sol = build_explicit(&seed).map_err(seed_error)?;

    let q0 = eval_q(&sol, seed.t0()).map_err(seed_error)?;
    let mut residual: f64 = 0.0;
    for (a, b) in q0.iter().zip(seed.q0().iter()) {
        residual = residual.max((a - b).max_norm());
    }

    let body = serde_json::to_string_pretty(&sol)
        .map_err(|e| CliError::parse(format!("cannot serialize solution: {e}")))?;
    write_atomic(output, &body)?;
    let summary = ConstructSummary {
        s: seed.s(),
        m: seed.m(),
        initial_condition_residual: residual,
        output: output.display().to_string(),
    };
    println!("{}", serde_json::to_string_pretty(&summary).unwrap());
    Ok(())
}

pub struct VerifyOptions {
    pub isomonodromy: bool,
    pub rng_seed: u64,
}

pub fn verify(
    input: &Path,
    path_spec: Option<&Path>,
    output: Option<&Path>,
    tol: &Tolerances,
    opts: &VerifyOptions,
) -> Result<(), CliError> {
    let text = read_to_string(input)?;
    let sol: ExplicitSolution = parse_json(&text, "solution")?;
    let n = 2 * sol.s();

    let samples: Vec<Vec<C64>> = match path_spec {
        Some(p) => {
            let spec: PathSpec = parse_json(&read_to_string(p)?, "path spec")?;
            let pts = spec.sample_points();
            for t in &pts {
                if t.len() != n {
                    return Err(CliError::parse(format!(
                        "path sample has {} coordinates, solution expects {n}",
                        t.len()
                    )));
                }
            }
            pts
        }
        None => {
            // default: five seeded random perturbations around the initial point
            let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
            (0..5)
                .map(|_| {
                    sol.seed()
                        .t0()
                        .iter()
                        .map(|&z| {
                            z + C64::new(
                                rng.gen_range(-0.05..0.05),
                                rng.gen_range(-0.05..0.05),
                            )
                        })
                        .collect()
                })
                .collect()
        }
    };

    // the file's generator halves must reproduce the seed it echoes;
    // this is what catches a tampered solution file
    let mut worst_initial: f64 = 0.0;
    match eval_q(&sol, sol.seed().t0()) {
        Ok(q0) => {
            for (a, b) in q0.iter().zip(sol.seed().q0().iter()) {
                worst_initial = worst_initial.max((a - b).max_norm());
            }
        }
        Err(_) => worst_initial = f64::INFINITY,
    }

    let mut movable = Vec::new();
    let mut worst_conservation: f64 = 0.0;
    let mut worst_structure: f64 = 0.0;
    let mut worst_pde: f64 = 0.0;
    let mut worst_monodromy: f64 = 0.0;
    let mut evaluated = 0usize;
    let h = tol.get("fd_step");
    for (idx, t) in samples.iter().enumerate() {
        let qs = match eval_q(&sol, t) {
            Ok(qs) => qs,
            Err(SchlesingerError::MovablePole { .. }) => {
                movable.push(idx);
                continue;
            }
            Err(e) => return Err(CliError::parse(format!("sample {idx}: {e}"))),
        };
        evaluated += 1;
        worst_conservation = worst_conservation.max(conservation_residual(&qs));
        let f = FuchsianSystem::new(t.clone(), qs)
            .map_err(|e| CliError::parse(format!("sample {idx}: {e}")))?;
        let report = check_general_position(&f, sol.s())
            .map_err(|e| CliError::parse(format!("sample {idx}: {e}")))?;
        worst_structure = worst_structure.max(report.worst());
        match isomonodromy::schlesinger::schlesinger_residual(&sol, t, h) {
            Ok(res) => worst_pde = worst_pde.max(res),
            Err(SchlesingerError::MovablePole { .. }) => movable.push(idx),
            Err(e) => return Err(CliError::parse(format!("sample {idx}: {e}"))),
        }
        if opts.isomonodromy {
            for j in 0..f.n() {
                let radius = f.isolation_gap(j) / 3.0;
                let phi = monodromy(&f, j, radius)
                    .map_err(|e| CliError::parse(format!("sample {idx}, loop {j}: {e}")))?;
                worst_monodromy =
                    worst_monodromy.max((&phi - &Matrix::identity(f.m())).max_norm());
            }
        }
    }

    let mut checks = vec![
        CheckLine {
            name: "initial_condition".into(),
            passed: worst_initial < tol.get("initial_condition"),
            worst_residual: worst_initial,
            tolerance: tol.get("initial_condition"),
        },
        CheckLine {
            name: "conservation".into(),
            passed: worst_conservation < tol.get("conservation"),
            worst_residual: worst_conservation,
            tolerance: tol.get("conservation"),
        },
        CheckLine {
            name: "general_position".into(),
            passed: worst_structure < tol.get("general_position"),
            worst_residual: worst_structure,
            tolerance: tol.get("general_position"),
        },
        CheckLine {
            name: "schlesinger_residual".into(),
            passed: worst_pde < tol.get("schlesinger_residual"),
            worst_residual: worst_pde,
            tolerance: tol.get("schlesinger_residual"),
        },
    ];
    if opts.isomonodromy {
        checks.push(CheckLine {
            name: "isomonodromy".into(),
            passed: worst_monodromy < tol.get("monodromy"),
            worst_residual: worst_monodromy,
            tolerance: tol.get("monodromy"),
        });
    }
    let passed = evaluated > 0 && checks.iter().all(|c| c.passed);
    let report = VerifyReport {
        passed,
        checks,
        movable_pole_samples: movable,
        samples_evaluated: evaluated,
    };
    let body = serde_json::to_string_pretty(&report).unwrap();
    match output {
        Some(path) => {
            write_atomic(path, &body)?;
            println!("{body}");
        }
        None => println!("{body}"),
    }
    if passed {
        Ok(())
    } else {
        Err(CliError::verification_failed(format!(
            "{} of {} checks failed",
            report.checks.iter().filter(|c| !c.passed).count(),
            report.checks.len()
        )))
    }
}

pub fn rh(input: &Path, output: &Path, tol: &Tolerances) -> Result<(), CliError> {
    let text = read_to_string(input)?;
    let data: BoundaryData = parse_json(&text, "boundary data")?;
    let circle = data.circle.build()?;
    let f = AnnulusFunction::from_samples(circle, data.samples)
        .map_err(|e| CliError::parse(e.to_string()))?;
    f.require_invertible().map_err(|e| CliError::parse(e.to_string()))?;

    let det_threshold = tol.get("rh_det");
    let (artifact, outcome) = match rh_solve_regular_with(&f, det_threshold) {
        Ok(sol) => {
            let (fp, fm) = fredholm_parity_check(&f).map_err(|e| CliError::parse(e.to_string()))?;
            (
                FactorizationArtifact {
                    outcome: "solved".into(),
                    mu: None,
                    fredholm_det: Some(from_c64(fp)),
                    fredholm_det_minus: Some(from_c64(fm)),
                    fredholm_det_abs: Some(sol.fredholm_det.norm()),
                    split_residual: Some(sol.split_residual),
                    x_minus: Some(sol.xminus_samples),
                    x_plus: Some(sol.xplus_samples),
                },
                Ok(()),
            )
        }
        Err(RhError::IndexNonzero { mu }) => (
            FactorizationArtifact {
                outcome: "index_nonzero".into(),
                mu: Some(mu),
                fredholm_det: None,
                fredholm_det_minus: None,
                fredholm_det_abs: None,
                split_residual: None,
                x_minus: None,
                x_plus: None,
            },
            Err(CliError::index_obstruction(format!("winding index {mu}"))),
        ),
        Err(RhError::NoRegularSolution { det_abs }) => (
            FactorizationArtifact {
                outcome: "no_regular_solution".into(),
                mu: Some(0),
                fredholm_det: None,
                fredholm_det_minus: None,
                fredholm_det_abs: Some(det_abs),
                split_residual: None,
                x_minus: None,
                x_plus: None,
            },
            Err(CliError::no_regular_solution(format!(
                "discrete Fredholm determinant magnitude {det_abs:.3e}"
            ))),
        ),
        Err(e) => return Err(CliError::parse(e.to_string())),
    };
    let body = serde_json::to_string_pretty(&artifact).unwrap();
    write_atomic(output, &body)?;
    println!("outcome: {}", artifact.outcome);
    outcome
}

pub struct SweepOptions {
    pub parallel: bool,
    pub nodes_override: Option<usize>,
}

pub fn sweep(input: &Path, output: &Path, tol: &Tolerances, opts: &SweepOptions) -> Result<(), CliError> {
    let text = read_to_string(input)?;
    let spec: FamilySpec = parse_json(&text, "family spec")?;
    let csv_text = match spec {
        FamilySpec::Schlesinger { source, grid, emit_q } => {
            let sol = match source {
                SchlesingerSource::Solution(sol) => sol,
                SchlesingerSource::Seed(seed) => {
                    seed.check_as_error().map_err(seed_error)?;
                    build_explicit(&seed).map_err(seed_error)?
                }
            };
            let n = 2 * sol.s();
            if grid.coord == 0 || grid.coord > n {
                return Err(CliError::parse(format!(
                    "grid coordinate {} out of range 1..={n}",
                    grid.coord
                )));
            }
            let base = sol.seed().t0().to_vec();
            let from = crate::io::to_c64(grid.from);
            let to = crate::io::to_c64(grid.to);
            let count = grid.samples.max(2);
            let points: Vec<Vec<C64>> = (0..count)
                .map(|i| {
                    let tau = i as f64 / (count - 1) as f64;
                    let mut t = base.clone();
                    t[grid.coord - 1] = from + (to - from) * tau;
                    t
                })
                .collect();
            let rows: Vec<Vec<String>> = run_rows(opts.parallel, &points, |t| {
                schlesinger_row(&sol, t, emit_q)
            });
            let mut header: Vec<String> = Vec::new();
            for j in 1..=n {
                header.push(format!("t{j}_re"));
                header.push(format!("t{j}_im"));
            }
            header.extend(
                ["det_spz_abs", "conservation", "general_position", "tag"]
                    .iter()
                    .map(|s| s.to_string()),
            );
            if emit_q {
                for j in 1..=n {
                    for i in 0..sol.m() {
                        for k in 0..sol.m() {
                            header.push(format!("q{j}_{i}{k}_re"));
                            header.push(format!("q{j}_{i}{k}_im"));
                        }
                    }
                }
            }
            render_csv(&header, &rows)?
        }
        FamilySpec::RhLinear { mut circle, coefficient, power, grid } => {
            if let Some(nodes) = opts.nodes_override {
                circle.nodes = nodes;
            }
            let quad = circle.build()?;
            let ts = grid.points();
            let det_threshold = tol.get("rh_det");
            let rows: Vec<Vec<String>> = run_rows(opts.parallel, &ts, |&t| {
                let f = AnnulusFunction::from_fn(quad.clone(), |x| {
                    &Matrix::identity(coefficient.rows())
                        + &coefficient.scale(t * x.powi(power))
                });
                rh_row(t, f, det_threshold)
            });
            render_csv(&rh_header(), &rows)?
        }
        FamilySpec::RhPoleZero { mut circle, x0_from, x0_to, samples } => {
            if let Some(nodes) = opts.nodes_override {
                circle.nodes = nodes;
            }
            let quad = circle.build()?;
            let a = crate::io::to_c64(x0_from);
            let b = crate::io::to_c64(x0_to);
            let count = samples.max(2);
            let ts: Vec<C64> = (0..count)
                .map(|i| a + (b - a) * (i as f64 / (count - 1) as f64))
                .collect();
            let det_threshold = tol.get("rh_det");
            let rows: Vec<Vec<String>> = run_rows(opts.parallel, &ts, |&x0| {
                let f = AnnulusFunction::from_fn(quad.clone(), |x| {
                    Matrix::diag(&[x - x0, (x - x0).inv()])
                });
                rh_row(x0, f, det_threshold)
            });
            render_csv(&rh_header(), &rows)?
        }
    };
    write_atomic(output, &csv_text)?;
    println!("sweep written to {}", output.display());
    Ok(())
}

fn run_rows<T: Sync, F: Fn(&T) -> Vec<String> + Sync>(
    parallel: bool,
    items: &[T],
    f: F,
) -> Vec<Vec<String>> {
    if parallel {
        items.par_iter().map(|t| f(t)).collect()
    } else {
        items.iter().map(|t| f(t)).collect()
    }
}

fn schlesinger_row(sol: &ExplicitSolution, t: &[C64], emit_q: bool) -> Vec<String> {
    let n = 2 * sol.s();
    let mut row = Vec::new();
    for &z in t.iter() {
        row.push(format!("{:.12e}", z.re));
        row.push(format!("{:.12e}", z.im));
    }
    let det_abs = core_determinant(sol, t).map(|(d, _)| d.norm());
    match eval_q(sol, t) {
        Ok(qs) => {
            let cons = conservation_residual(&qs);
            let structure = FuchsianSystem::new(t.to_vec(), qs.clone())
                .ok()
                .and_then(|f| check_general_position(&f, sol.s()).ok())
                .map(|r| r.worst());
            row.push(format!("{:.12e}", det_abs.unwrap_or(f64::NAN)));
            row.push(format!("{cons:.12e}"));
            match structure {
                Some(wr) => row.push(format!("{wr:.12e}")),
                None => row.push("nan".into()),
            }
            row.push("ok".into());
            if emit_q {
                for q in &qs {
                    for i in 0..sol.m() {
                        for k in 0..sol.m() {
                            row.push(format!("{:.12e}", q[(i, k)].re));
                            row.push(format!("{:.12e}", q[(i, k)].im));
                        }
                    }
                }
            }
        }
        Err(err) => {
            row.push(format!("{:.12e}", det_abs.unwrap_or(f64::NAN)));
            row.push("nan".into());
            row.push("nan".into());
            row.push(match err {
                SchlesingerError::MovablePole { .. } => "movable-pole".into(),
                SchlesingerError::InvalidConfiguration(_) => "invalid-configuration".into(),
                other => format!("error: {other}"),
            });
            if emit_q {
                for _ in 0..(n * sol.m() * sol.m() * 2) {
                    row.push("nan".into());
                }
            }
        }
    }
    row
}

fn rh_header() -> Vec<String> {
    ["t_re", "t_im", "fredholm_det_abs", "outcome", "max_residual"]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

fn rh_row(t: C64, f: Result<AnnulusFunction, RhError>, det_threshold: f64) -> Vec<String> {
    let mut row = vec![format!("{:.12e}", t.re), format!("{:.12e}", t.im)];
    let f = match f {
        Ok(f) => f,
        Err(e) => {
            row.extend(["nan".into(), format!("invalid-samples: {e}"), "nan".into()]);
            return row;
        }
    };
    match rh_solve_regular_with(&f, det_threshold) {
        Ok(sol) => {
            row.push(format!("{:.12e}", sol.fredholm_det.norm()));
            row.push("solved".into());
            row.push(format!("{:.12e}", sol.split_residual));
        }
        Err(RhError::IndexNonzero { mu }) => {
            row.push("nan".into());
            row.push(format!("index_nonzero({mu})"));
            row.push("nan".into());
        }
        Err(RhError::NoRegularSolution { det_abs }) => {
            row.push(format!("{det_abs:.12e}"));
            row.push("no_regular_solution".into());
            row.push("nan".into());
        }
        Err(e) => {
            row.push("nan".into());
            row.push(format!("error: {e}"));
            row.push("nan".into());
        }
    }
    row
}

fn render_csv(header: &[String], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(header)
        .map_err(|e| CliError::parse(format!("csv: {e}")))?;
    for row in rows {
        wtr.write_record(row)
            .map_err(|e| CliError::parse(format!("csv: {e}")))?;
    }
    let bytes = wtr
        .into_inner()
        .map_err(|e| CliError::parse(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::parse(format!("csv: {e}")))
}

pub fn report(input: &Path) -> Result<(), CliError> {
    let text = read_to_string(input)?;
    let value: serde_json::Value =
        parse_json(&text, "artifact")?;
    let obj = value
        .as_object()
        .ok_or_else(|| CliError::parse("artifact is not a JSON object".into()))?;
    if obj.contains_key("checks") {
        let rep: VerifyReport = parse_json(&text, "verification report")?;
        println!(
            "verification report: {} ({} samples evaluated, {} movable-pole samples)",
            if rep.passed { "PASS" } else { "FAIL" },
            rep.samples_evaluated,
            rep.movable_pole_samples.len()
        );
        for c in &rep.checks {
            println!(
                "  {:<22} {}  worst {:.3e} (tolerance {:.1e})",
                c.name,
                if c.passed { "pass" } else { "FAIL" },
                c.worst_residual,
                c.tolerance
            );
        }
    } else if obj.contains_key("outcome") {
        let art: FactorizationArtifact = parse_json(&text, "factorization artifact")?;
        println!("factorization outcome: {}", art.outcome);
        if let Some(d) = art.fredholm_det {
            println!("  fredholm determinant at +1: {:+.6e} {:+.6e}i", d[0], d[1]);
        }
        if let Some(d) = art.fredholm_det_minus {
            println!("  fredholm determinant at -1: {:+.6e} {:+.6e}i", d[0], d[1]);
        }
        if let Some(r) = art.split_residual {
            println!("  analyticity split residual: {r:.3e}");
        }
        if let Some(mu) = art.mu {
            println!("  winding index: {mu}");
        }
        if let Some(x) = &art.x_minus {
            println!("  outer factor sampled at {} nodes", x.len());
        }
    } else if obj.contains_key("B_P0") {
        let sol: ExplicitSolution = parse_json(&text, "solution")?;
        println!(
            "explicit solution: s = {}, m = {}, {} singular points",
            sol.s(),
            sol.m(),
            2 * sol.s()
        );
        let (d, _) = core_determinant(&sol, sol.seed().t0())
            .map_err(|e| CliError::parse(e.to_string()))?;
        println!("  |det S_PZ(t0)| = {:.6e}", d.norm());
    } else if obj.contains_key("Q0") {
        let seed: SchlesingerSeed = parse_json(&text, "seed")?;
        println!("seed: s = {}, m = {}", seed.s(), seed.m());
        match seed.check_as_error() {
            Ok(()) => println!("  general-position relations: pass"),
            Err(e) => println!("  general-position relations: {e}"),
        }
    } else if obj.contains_key("circle") {
        let data: BoundaryData = parse_json(&text, "boundary data")?;
        println!(
            "boundary data: {} samples on circle of radius {} around ({}, {})",
            data.samples.len(),
            data.circle.radius,
            data.circle.center[0],
            data.circle.center[1]
        );
    } else {
        return Err(CliError::parse("unrecognized artifact type".into()));
    }
    Ok(())
}
