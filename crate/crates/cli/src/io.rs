//! Problem JSON loading, solution JSON writing, and the trace CSV format.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use hsdpc_core::lp_model;
use hsdpc_core::{LpProblem, Matrix, ProblemForm, SolveReport, SolveStatus, TraceRow};

/// On-disk problem schema.
#[derive(Debug, Deserialize, Serialize)]
pub struct ProblemJson {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub form: String,
}

/// Loads and validates a problem file.
pub fn load_problem(path: &Path) -> Result<LpProblem> {
    let raw = fs::read_to_string(path)
        .with_context(|| format!("cannot read problem file {}", path.display()))?;
    let parsed: ProblemJson =
        serde_json::from_str(&raw).with_context(|| format!("malformed JSON in {}", path.display()))?;
    let form = match parsed.form.as_str() {
        "equality" => ProblemForm::StandardEquality,
        "inequality" => ProblemForm::Inequality,
        other => bail!("unknown form {other:?}: expected \"equality\" or \"inequality\""),
    };
    let a = Matrix::from_rows(&parsed.a).context("invalid matrix A")?;
    LpProblem::new(a, parsed.b, parsed.c, form).context("invalid problem data")
}

/// Decimal with 12 significant digits, the trace CSV number format.
pub fn format_sig(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        format!("{x}")
    }
}

/// Renders the per-step trace in the documented CSV layout.
pub fn trace_to_csv(trace: &[TraceRow]) -> String {
    let mut out = String::from(
        "t,gamma,mu,tau,theta,delta,proximity,kappa,frobenius,cost_units,restoration_steps,residual_norm\n",
    );
    for row in trace {
        let delta = row.delta.map(format_sig).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            row.t,
            row.gamma,
            format_sig(row.mu),
            format_sig(row.tau),
            format_sig(row.theta),
            delta,
            format_sig(row.proximity),
            format_sig(row.kappa),
            format_sig(row.frobenius),
            format_sig(row.cost_units),
            row.restoration_steps,
            format_sig(row.residual_norm),
        ));
    }
    out
}

/// On-disk solution schema.
#[derive(Debug, Serialize, Deserialize)]
pub struct SolutionJson {
    pub status: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub s: Vec<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub iterations: usize,
    pub trace_path: Option<String>,
}

pub fn status_string(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Optimal => "optimal",
        SolveStatus::PrimalInfeasible => "primal_infeasible",
        SolveStatus::DualInfeasible => "dual_infeasible",
        SolveStatus::InfeasibleOrUnbounded => "infeasible_or_unbounded",
        SolveStatus::NonConverged => "non_converged",
    }
}

/// Builds the solution document from a report. Runs that hit the iteration
/// cap report the tau-normalized last iterate.
pub fn solution_json(report: &SolveReport, trace_path: Option<&Path>) -> SolutionJson {
    let trace_path = trace_path.map(|p| p.display().to_string());
    if let Some(sol) = &report.solution {
        SolutionJson {
            status: status_string(report.status).to_string(),
            x: sol.x_star.clone(),
            y: sol.y_star.clone(),
            s: sol.s_star.clone(),
            primal_objective: sol.objective_primal,
            dual_objective: sol.objective_dual,
            iterations: report.iterations,
            trace_path,
        }
    } else {
        let st = &report.final_state;
        let tau = st.tau;
        let problem = report.instance.problem();
        let x: Vec<f64> = st.x.iter().map(|&v| v / tau).collect();
        let y: Vec<f64> = st.y.iter().map(|&v| v / tau).collect();
        let s: Vec<f64> = st.s.iter().map(|&v| v / tau).collect();
        let primal = dot(problem.c(), &x);
        let dual = dot(problem.b(), &y);
        SolutionJson {
            status: status_string(report.status).to_string(),
            x,
            y,
            s,
            primal_objective: primal,
            dual_objective: dual,
            iterations: report.iterations,
            trace_path,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Re-validates a solution document against the invariants expected of a
/// recovered solution; used by the round-trip checks.
pub fn validate_solution(doc: &SolutionJson) -> Result<()> {
    if doc.status == "optimal" {
        if doc.x.iter().any(|&v| v < -1e-9) {
            bail!("optimal x has negative entries");
        }
        if !doc.x.iter().chain(&doc.y).chain(&doc.s).all(|v| v.is_finite()) {
            bail!("non-finite solution entries");
        }
    }
    Ok(())
}

/// Loads and revalidates a solution file.
pub fn load_solution(path: &Path) -> Result<SolutionJson> {
    let raw = fs::read_to_string(path)
        .with_context(|| format!("cannot read solution file {}", path.display()))?;
    let doc: SolutionJson = serde_json::from_str(&raw).context("malformed solution JSON")?;
    validate_solution(&doc)?;
    Ok(doc)
}

/// Standard-form view of a problem, for oracle checks in the test suite.
pub fn standardized_rows(problem: &LpProblem) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let std_problem = lp_model::standardize(problem);
    let a = std_problem.a();
    let rows: Vec<Vec<f64>> = (0..a.rows()).map(|i| a.row(i).to_vec()).collect();
    (rows, std_problem.b().to_vec(), std_problem.c().to_vec())
}
