//! Command implementations. Each returns a [`Report`] plus whether the run
//! found a counterexample or a failing check.

use naqc::geometry::critical_v0;
use naqc::optimize::{
    hierarchy_scan_with, max_c4_over_t, maximize_line_aoprime, maximize_over_w, optimize_with_candidates,
    HaarCandidates, ScanConfig, StateRecord,
};
use naqc::statefam::rho1;
use naqc::verify::{Suite, VerifyOptions};
use naqc::naqc::quantifier_of;
use naqc::{bell_m, naqc_value, CoherenceKind, Exec, NaqcReport};
use serde_json::{json, Value};

use crate::args::{
    Command, EvaluateArgs, MaximizeArgs, MaximizeTarget, MeshArgs, QCurveArgs, RunConfig, ScanArgs, SurfaceKind,
    V0cArgs, VerifyArgs,
};
use crate::error::CliError;
use crate::mesh::{bell_surface, naqc_surface, MIN_RESOLUTION};
use crate::report::{Cell, Report, Table};
use crate::states::read_states;

pub const DEFAULT_MESH_GRID: usize = 40;
pub const DEFAULT_SYMMETRIC_GRID: usize = 121;
pub const DEFAULT_C4_GRID: usize = 41;
pub const DEFAULT_LINE_GRID: usize = 24;

pub struct Outcome {
    pub report: Report,
    /// A counterexample was found or a check failed.
    pub failed: bool,
}

/// Grid size a command will use, recorded in its config.
pub fn grid_used(config: &RunConfig) -> Option<usize> {
    let g = &config.global;
    match &config.command {
        Command::SurfaceMesh(_) => Some(g.grid_or(DEFAULT_MESH_GRID)),
        Command::Maximize(a) => Some(g.grid_or(match a.target {
            MaximizeTarget::Symmetric => DEFAULT_SYMMETRIC_GRID,
            MaximizeTarget::C4 => DEFAULT_C4_GRID,
            MaximizeTarget::LineAoprime => DEFAULT_LINE_GRID,
        })),
        _ => None,
    }
}

pub fn execute(config: &RunConfig, exec: Exec) -> Result<Outcome, CliError> {
    let (summary, table, failed) = match &config.command {
        Command::Evaluate(a) => evaluate(config, a, exec)?,
        Command::SurfaceMesh(a) => surface_mesh(config, a, exec)?,
        Command::V0cCurve(a) => v0c_curve(a, exec)?,
        Command::QCurve(a) => q_curve(config, a, exec)?,
        Command::Maximize(a) => maximize(config, a, exec)?,
        Command::HierarchyScan(a) => hierarchy_scan(config, a, exec)?,
        Command::Verify(a) => verify(config, a, exec)?,
        Command::Replay(_) => return Err(CliError::usage("replay cannot be nested")),
    };
    Ok(Outcome { report: Report { config: config.clone(), summary, table }, failed })
}

type Produced = (Option<Value>, Table, bool);

fn evaluate(config: &RunConfig, a: &EvaluateArgs, exec: Exec) -> Result<Produced, CliError> {
    let states = read_states(&a.input)?;
    let budget = config.budget;
    let candidates = a.optimize.then(|| HaarCandidates::new(&budget, exec));
    let kinds = &a.kinds;
    let cells = exec.map_range(states.len() * kinds.len(), |m| {
        let (s, kind) = (&states[m / kinds.len()], kinds[m % kinds.len()]);
        let mut row: Vec<Cell> = vec![(m / kinds.len()).into(), s.line.into(), kind.tag().into()];
        match &s.state {
            Ok(rho) => {
                let value = match &candidates {
                    Some(c) => optimize_with_candidates(rho, kind, c, budget.refine_iters, Exec::Sequential).value,
                    None => naqc_value(rho, kind),
                };
                let r = NaqcReport::from_values(kind, value, bell_m(rho));
                row.extend([
                    r.value.into(),
                    r.threshold.into(),
                    r.bell_m.into(),
                    r.achieves_naqc.into(),
                    r.bell_nonlocal.into(),
                    r.is_counterexample().into(),
                    quantifier_of(r.value, kind).into(),
                    rho.min_eigenvalue().into(),
                    Cell::Missing,
                ]);
                (row, Some(r))
            }
            Err(e) => {
                row.extend(std::iter::repeat_n(Cell::Missing, 8));
                row.push(e.to_string().into());
                (row, None)
            }
        }
    });
    let mut table = Table::new(&[
        "index",
        "line",
        "kind",
        "value",
        "threshold",
        "bell_m",
        "achieves_naqc",
        "bell_nonlocal",
        "counterexample",
        "quantifier",
        "min_eigenvalue",
        "error",
    ]);
    let mut per_kind = serde_json::Map::new();
    for kind in kinds {
        let reports: Vec<&NaqcReport> = cells.iter().filter_map(|c| c.1.as_ref()).filter(|r| r.kind == *kind).collect();
        per_kind.insert(
            kind.tag().into(),
            json!({
                "naqc": reports.iter().filter(|r| r.achieves_naqc).count(),
                "bell_nonlocal": reports.iter().filter(|r| r.bell_nonlocal).count(),
                "counterexamples": reports.iter().filter(|r| r.is_counterexample()).count(),
            }),
        );
    }
    let counterexamples = cells.iter().filter_map(|c| c.1.as_ref()).filter(|r| r.is_counterexample()).count();
    for (row, _) in cells {
        table.push(row);
    }
    let summary = json!({
        "states": states.len(),
        "invalid": states.iter().filter(|s| s.state.is_err()).count(),
        "optimized": a.optimize,
        "by_kind": per_kind,
    });
    Ok((Some(summary), table, counterexamples > 0))
}

fn surface_mesh(config: &RunConfig, a: &MeshArgs, exec: Exec) -> Result<Produced, CliError> {
    let n = grid_used(config).expect("mesh has a grid");
    if n < MIN_RESOLUTION {
        return Err(CliError::usage(format!("--grid must be at least {MIN_RESOLUTION} for surface-mesh")));
    }
    let (mesh, label) = match a.surface {
        SurfaceKind::Bell => (bell_surface(n), "m_minus_1"),
        SurfaceKind::L1 => (naqc_surface(CoherenceKind::L1, n, exec), "c_na_minus_c_m"),
        SurfaceKind::Re => (naqc_surface(CoherenceKind::RelativeEntropy, n, exec), "c_na_minus_c_m"),
    };
    let mut table = Table::new(&["v1", "v2", "v3", label]);
    for (v, r) in mesh.vertices.iter().zip(&mesh.residuals) {
        table.push(vec![v[0].into(), v[1].into(), v[2].into(), (*r).into()]);
    }
    let max_residual = mesh.residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let summary = json!({
        "surface": a.surface,
        "resolution": n,
        "vertices": mesh.vertices.len(),
        "max_abs_residual": max_residual,
        "grid_spacing": 2.0 / (n - 1) as f64,
        "naqc_volume_fraction": mesh.naqc_fraction,
    });
    Ok((Some(summary), table, false))
}

fn require_steps(steps: usize) -> Result<(), CliError> {
    if steps < 2 {
        return Err(CliError::usage("--steps must be at least 2"));
    }
    Ok(())
}

fn grid_point(lo: f64, hi: f64, steps: usize, m: usize) -> f64 {
    lo + (hi - lo) * m as f64 / (steps - 1) as f64
}

fn v0c_curve(a: &V0cArgs, exec: Exec) -> Result<Produced, CliError> {
    require_steps(a.steps)?;
    let points = exec.map_range(a.steps, |m| {
        let w0 = grid_point(a.w0_min, a.w0_max, a.steps, m);
        (w0, critical_v0(a.kind, w0, a.w1, a.tol))
    });
    let mut table = Table::new(&["w0", "v0c", "error"]);
    let mut peak: Option<(f64, f64)> = None;
    for (w0, v) in &points {
        match v {
            Ok(v) => {
                if peak.is_none_or(|p| *v > p.1) {
                    peak = Some((*w0, *v));
                }
                table.push(vec![(*w0).into(), (*v).into(), Cell::Missing]);
            }
            Err(e) => table.push(vec![(*w0).into(), Cell::Missing, e.to_string().into()]),
        }
    }
    let summary = json!({
        "kind": a.kind,
        "w1": a.w1,
        "missing": points.iter().filter(|p| p.1.is_err()).count(),
        "peak_w0": peak.map(|p| p.0),
        "peak_v0c": peak.map(|p| p.1),
    });
    Ok((Some(summary), table, false))
}

fn q_curve(config: &RunConfig, a: &QCurveArgs, exec: Exec) -> Result<Produced, CliError> {
    require_steps(a.steps)?;
    if !(0.0..=1.0).contains(&a.x_min) || !(0.0..=1.0).contains(&a.x_max) {
        return Err(CliError::usage("x range must lie in [0, 1]"));
    }
    let kind = CoherenceKind::L1;
    let budget = config.budget;
    let candidates = HaarCandidates::new(&budget, exec);
    let rows = exec.map_range(a.steps, |m| {
        let x = grid_point(a.x_min, a.x_max, a.steps, m);
        let rho = rho1(x).expect("x checked");
        let plain = naqc_value(&rho, kind);
        let opt = optimize_with_candidates(&rho, kind, &candidates, budget.refine_iters, Exec::Sequential).value;
        (x, quantifier_of(opt, kind), quantifier_of(plain, kind), opt, plain)
    });
    let mut table = Table::new(&["x", "q_tilde_l1", "q_l1", "delta", "c_na_l1_optimized", "c_na_l1"]);
    for &(x, qt, q, opt, plain) in &rows {
        table.push(vec![x.into(), qt.into(), q.into(), (qt - q).into(), opt.into(), plain.into()]);
    }
    let gap: Vec<f64> = rows.iter().filter(|r| r.1 - r.2 > 1e-9).map(|r| r.0).collect();
    let window: Vec<f64> = rows.iter().filter(|r| r.2 == 0.0 && r.1 > 0.0).map(|r| r.0).collect();
    let summary = json!({
        "gap_x_range": (!gap.is_empty()).then(|| [gap[0], gap[gap.len() - 1]]),
        "window_x_range": (!window.is_empty()).then(|| [window[0], window[window.len() - 1]]),
    });
    Ok((Some(summary), table, false))
}

fn maximize(config: &RunConfig, a: &MaximizeArgs, exec: Exec) -> Result<Produced, CliError> {
    let grid = grid_used(config).expect("maximize has a grid");
    match a.target {
        MaximizeTarget::Symmetric => {
            if !(a.v0 > -1.0 && a.v0 <= 0.0) {
                return Err(CliError::usage("--v0 must lie in (-1, 0]"));
            }
            let w = maximize_over_w(a.v0, a.kind, grid, true);
            let mut table = Table::new(&["kind", "v0", "value", "w0", "w1", "sign", "boundary_value"]);
            table.push(vec![
                a.kind.tag().into(),
                a.v0.into(),
                w.value.into(),
                w.w0.into(),
                w.w1.into(),
                f64::from(w.sign).into(),
                w.boundary_value.into(),
            ]);
            Ok((None, table, false))
        }
        MaximizeTarget::C4 => {
            let c4 = max_c4_over_t(grid, &config.budget, exec);
            let mut cols = vec!["value", "v1", "v2", "v3"];
            let t_names: Vec<String> = (1..=3).flat_map(|i| (1..=3).map(move |j| format!("t{i}{j}"))).collect();
            cols.extend(t_names.iter().map(String::as_str));
            let mut table = Table::new(&cols);
            let mut row: Vec<Cell> = vec![c4.value.into()];
            row.extend(c4.v.iter().map(|&x| Cell::from(x)));
            row.extend(c4.t.iter().flatten().map(|&x| Cell::from(x)));
            table.push(row);
            Ok((None, table, false))
        }
        MaximizeTarget::LineAoprime => {
            if !(-1.0..=0.0).contains(&a.a0) {
                return Err(CliError::usage("--a0 must lie in [-1, 0]"));
            }
            let m = maximize_line_aoprime(a.a0, a.kind, grid, exec);
            let mut table = Table::new(&["kind", "a0", "value", "s1", "s2", "s3"]);
            table.push(vec![a.kind.tag().into(), a.a0.into(), m.value.into(), m.s[0].into(), m.s[1].into(), m.s[2].into()]);
            Ok((None, table, false))
        }
    }
}

fn record_row(role: &str, r: &StateRecord) -> Vec<Cell> {
    let mut row: Vec<Cell> = vec![role.into(), r.index.into(), r.value.into(), r.bell_m.into(), r.fidelity.into()];
    row.extend(r.bloch.to_params().iter().map(|&x| Cell::from(x)));
    row
}

fn hierarchy_scan(config: &RunConfig, a: &ScanArgs, exec: Exec) -> Result<Produced, CliError> {
    let cfg = ScanConfig { family: a.family, n: a.n, kind: a.kind, optimize: a.optimize, budget: config.budget };
    let summary = hierarchy_scan_with(&cfg, exec);
    let mut cols = vec!["role", "index", "value", "bell_m", "fidelity", "r1", "r2", "r3", "s1", "s2", "s3"];
    let t_names: Vec<String> = (1..=3).flat_map(|i| (1..=3).map(move |j| format!("t{i}{j}"))).collect();
    cols.extend(t_names.iter().map(String::as_str));
    let mut table = Table::new(&cols);
    for r in &summary.counterexample_records {
        table.push(record_row("counterexample", r));
    }
    if let Some(w) = &summary.worst {
        table.push(record_row("closest-bell-local", w));
    }
    let failed = !summary.passed();
    let mut value = serde_json::to_value(&summary).map_err(CliError::failure)?;
    if let Value::Object(map) = &mut value {
        // Records are in the table; the config is in the header.
        map.remove("counterexample_records");
        map.remove("worst");
        map.remove("config");
        map.insert("passed".into(), json!(!failed));
    }
    Ok((Some(value), table, failed))
}

fn verify(config: &RunConfig, a: &VerifyArgs, exec: Exec) -> Result<Produced, CliError> {
    let suites = Suite::select(&a.suite)?;
    let opts = VerifyOptions { budget: config.budget, exec, long_run: config.global.long_run };
    let mut table = Table::new(&[
        "id",
        "criterion",
        "passed",
        "measured",
        "target",
        "tolerance",
        "relation",
        "runtime_secs",
        "description",
        "note",
    ]);
    let mut failed_ids = Vec::new();
    let mut total = 0;
    for suite in suites {
        for c in suite.run(&opts) {
            eprintln!("{c}");
            total += 1;
            if !c.passed {
                failed_ids.push(c.id.clone());
            }
            let relation = serde_json::to_value(c.relation).map_err(CliError::failure)?;
            table.push(vec![
                c.id.into(),
                Cell::Int(u64::from(c.criterion)),
                c.passed.into(),
                c.measured.into(),
                c.target.into(),
                c.tolerance.into(),
                relation.as_str().unwrap_or_default().into(),
                c.runtime_secs.into(),
                c.description.into(),
                c.note.map_or(Cell::Missing, Cell::Text),
            ]);
        }
    }
    let summary = json!({ "total": total, "failed": failed_ids.len(), "failed_ids": failed_ids });
    Ok((Some(summary), table, !failed_ids.is_empty()))
}
