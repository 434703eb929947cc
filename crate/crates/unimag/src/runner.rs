//! Scenario execution and machine-readable result emission.
//!
//! One run propagates a single initial state with one method, emitting one
//! row per `output_every` grid node (the final node is always included).
//! Identical configs produce byte-identical CSV output; all computed floats
//! are printed with 17 significant digits so values round-trip exactly.

use std::io::Write;
use std::time::Instant;

use ndarray::Array1;
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::config::{OutputFormat, RunConfig, Scenario};
use crate::dyson::{
    dyson_series_nodes, oracle_nodes, state_norm, unitarity_defect, DimensionMismatch, Method,
    PropagationResult,
};
use crate::hamiltonians::{normality_defect, split};
use crate::magnus::{omega_density, MagnusError};
use crate::matrix::{expm, ComplexMatrix, MatrixError};
use crate::unitarize::{normalizer_exact, unitarized_propagator_exact, xi_density, UnitarizeError};

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("numerical failure: {0}")]
    Unitarize(#[from] UnitarizeError),
    #[error("numerical failure: {0}")]
    Matrix(#[from] MatrixError),
    #[error("numerical failure: {0}")]
    Magnus(#[from] MagnusError),
    #[error("numerical failure: {0}")]
    Dimension(#[from] DimensionMismatch),
}

/// One emitted output row.
#[derive(Debug, Clone)]
pub struct RunRow {
    pub t: f64,
    pub state_norm: f64,
    pub site_populations: Vec<f64>,
    pub unitarity_defect: f64,
    pub fidelity_vs_oracle: f64,
    /// Present for the unitarized methods only.
    pub path_disagreement: Option<f64>,
    pub newschro_residual: f64,
    pub normality_defect: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: RunConfig,
    pub rows: Vec<RunRow>,
    /// Propagator bundle at the final grid node.
    pub terminal: PropagationResult,
}

#[derive(Debug, Clone)]
pub struct CompareRow {
    pub method: Method,
    pub terminal_fidelity: f64,
    pub max_unitarity_defect: f64,
    pub wall_seconds: f64,
}

/// Overlap magnitude of two states, insensitive to either norm:
/// `|<a|b>| / (||a|| ||b||)`.
fn fidelity(a: &Array1<C64>, b: &Array1<C64>) -> f64 {
    let na = state_norm(a);
    let nb = state_norm(b);
    if na <= 0.0 || nb <= 0.0 {
        return 0.0;
    }
    let overlap: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    overlap.norm() / (na * nb)
}

/// Grid nodes that become output rows: every `output_every`-th node plus
/// the final one.
fn row_nodes(steps: usize, output_every: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..=steps).step_by(output_every).collect();
    if *out.last().unwrap() != steps {
        out.push(steps);
    }
    out
}

/// Propagator snapshots `P(t_k, t0)` for the chosen method at the requested
/// node indices. For the unitarized methods the companion path is returned
/// as well so rows can report the disagreement between the two.
struct MethodSnapshots {
    /// `p[i]` corresponds to node index `wanted[i]`.
    p: Vec<ComplexMatrix>,
    companion: Option<Vec<ComplexMatrix>>,
    /// Raw propagator and normalizer at the final wanted node (`U = P`,
    /// `N = 1` for the methods that do not unitarize).
    terminal_u: ComplexMatrix,
    terminal_n: ComplexMatrix,
}

fn snapshots_for(
    scenario: &Scenario,
    method: Method,
    wanted: &[usize],
    oracle: &[ComplexMatrix],
) -> Result<MethodSnapshots, RunnerError> {
    let h = &scenario.hamiltonian;
    let grid = &scenario.grid;
    let orders = &scenario.config.orders;
    let minus_i = C64::new(0.0, -1.0);

    let pick = |all: &[ComplexMatrix]| wanted.iter().map(|&k| all[k].clone()).collect::<Vec<_>>();

    let series_at = |k: usize, iomega: &[ComplexMatrix], ixi: &[ComplexMatrix]| -> ComplexMatrix {
        let n = expm(&ixi[k].scale_re(-0.5).hermitian_part());
        let u = expm(&iomega[k].scale(minus_i));
        &n * &u
    };

    let eye = ComplexMatrix::identity(h.dim());
    let last = *wanted.last().expect("at least one node requested");
    match method {
        Method::Oracle => Ok(MethodSnapshots {
            p: pick(oracle),
            companion: None,
            terminal_u: oracle[last].clone(),
            terminal_n: eye,
        }),
        Method::Dyson => {
            let all = dyson_series_nodes(h, grid, orders.dyson_k);
            let terminal_u = all[last].clone();
            Ok(MethodSnapshots {
                p: pick(&all),
                companion: None,
                terminal_u,
                terminal_n: eye,
            })
        }
        Method::Magnus => {
            let omega = omega_density(h, grid, orders.omega_n);
            let iomega = omega.prefix_exponents();
            let p: Vec<ComplexMatrix> = wanted
                .iter()
                .map(|&k| expm(&iomega[k].scale(minus_i)))
                .collect();
            let terminal_u = p.last().expect("non-empty").clone();
            Ok(MethodSnapshots {
                p,
                companion: None,
                terminal_u,
                terminal_n: eye,
            })
        }
        Method::UnitarizedExact | Method::UnitarizedSeries => {
            let exact: Vec<ComplexMatrix> = wanted
                .iter()
                .map(|&k| unitarized_propagator_exact(&oracle[k]))
                .collect::<Result<_, _>>()?;
            let omega = omega_density(h, grid, orders.omega_n);
            let xi = xi_density(&omega, orders.bch_order);
            let iomega = omega.prefix_exponents();
            let ixi = xi.prefix_exponents();
            let series: Vec<ComplexMatrix> = wanted
                .iter()
                .map(|&k| series_at(k, &iomega, &ixi))
                .collect();
            let (terminal_u, terminal_n) = match method {
                Method::UnitarizedExact => (oracle[last].clone(), normalizer_exact(&oracle[last])?),
                _ => (
                    expm(&iomega[last].scale(minus_i)),
                    expm(&ixi[last].scale_re(-0.5).hermitian_part()),
                ),
            };
            let (p, companion) = match method {
                Method::UnitarizedExact => (exact, series),
                _ => (series, exact),
            };
            Ok(MethodSnapshots {
                p,
                companion: Some(companion),
                terminal_u,
                terminal_n,
            })
        }
    }
}

/// Execute one scenario with its configured method.
pub fn run_scenario(scenario: &Scenario) -> Result<RunOutput, RunnerError> {
    run_with_method(scenario, scenario.config.method)
}

/// Execute one scenario with an explicit method (shared by `compare`).
pub fn run_with_method(scenario: &Scenario, method: Method) -> Result<RunOutput, RunnerError> {
    let grid = &scenario.grid;
    let h = &scenario.hamiltonian;
    let steps = grid.steps();
    let rows_at = row_nodes(steps, scenario.config.time.output_every);

    // each row also needs its predecessor node for the backward difference
    let mut wanted: Vec<usize> = Vec::new();
    for &k in &rows_at {
        if k > 0 {
            wanted.push(k - 1);
        }
        wanted.push(k);
    }
    wanted.dedup();

    let oracle = oracle_nodes(h, grid);
    let snaps = snapshots_for(scenario, method, &wanted, &oracle)?;
    let index_of = |k: usize| wanted.binary_search(&k).expect("requested node");

    let dt = grid.spacing();
    let mut rows = Vec::with_capacity(rows_at.len());
    for &k in &rows_at {
        let t = grid.nodes()[k];
        let p = &snaps.p[index_of(k)];
        let psi = p.apply(&scenario.psi0);
        let psi_oracle = oracle[k].apply(&scenario.psi0);
        let (hc, _) = split(&h.at(t));
        let newschro_residual = if k == 0 {
            0.0
        } else {
            let prev = &snaps.p[index_of(k - 1)];
            let fd = (p - prev).scale_re(1.0 / dt);
            (&fd + &(&hc * p).scale(C64::i())).fro_norm()
        };
        rows.push(RunRow {
            t,
            state_norm: state_norm(&psi),
            site_populations: psi.iter().map(|z| z.norm_sqr()).collect(),
            unitarity_defect: unitarity_defect(p),
            fidelity_vs_oracle: fidelity(&psi_oracle, &psi),
            path_disagreement: snaps
                .companion
                .as_ref()
                .map(|c| (p - &c[index_of(k)]).fro_norm()),
            newschro_residual,
            normality_defect: normality_defect(&h.at(t)),
        });
    }
    let last_row = rows.last().expect("at least one row");
    let mut terminal = PropagationResult::from_parts(
        snaps.terminal_u.clone(),
        snaps.terminal_n.clone(),
        snaps.p.last().expect("at least one snapshot").clone(),
        method,
    );
    terminal
        .diagnostics
        .insert("newschro_residual".to_string(), last_row.newschro_residual);
    terminal
        .diagnostics
        .insert("normality_defect".to_string(), last_row.normality_defect);
    if let Some(d) = last_row.path_disagreement {
        terminal
            .diagnostics
            .insert("path_disagreement".to_string(), d);
    }

    let mut config = scenario.config.clone();
    config.method = method;
    Ok(RunOutput {
        config,
        rows,
        terminal,
    })
}

/// Run several methods on one scenario and summarize each.
pub fn compare_scenario(
    scenario: &Scenario,
    methods: &[Method],
) -> Result<Vec<CompareRow>, RunnerError> {
    let mut out = Vec::with_capacity(methods.len());
    for &method in methods {
        let start = Instant::now();
        let run = run_with_method(scenario, method)?;
        let wall_seconds = start.elapsed().as_secs_f64();
        let terminal_fidelity = run.rows.last().map(|r| r.fidelity_vs_oracle).unwrap_or(0.0);
        let max_unitarity_defect = run
            .rows
            .iter()
            .map(|r| r.unitarity_defect)
            .fold(0.0, f64::max);
        out.push(CompareRow {
            method,
            terminal_fidelity,
            max_unitarity_defect,
            wall_seconds,
        });
    }
    Ok(out)
}

/// 17 significant digits; round-trips every f64 exactly.
fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_run_csv<W: Write>(out: &RunOutput, w: &mut W) -> std::io::Result<()> {
    let dim = out
        .rows
        .first()
        .map(|r| r.site_populations.len())
        .unwrap_or(0);
    let mut header = String::from("t,state_norm");
    for i in 1..=dim {
        header.push_str(&format!(",site_{i}"));
    }
    header.push_str(",unitarity_defect,fidelity_vs_oracle,path_disagreement,newschro_residual,normality_defect\n");
    w.write_all(header.as_bytes())?;
    for r in &out.rows {
        let mut line = format!("{},{}", fmt_f(r.t), fmt_f(r.state_norm));
        for p in &r.site_populations {
            line.push(',');
            line.push_str(&fmt_f(*p));
        }
        line.push(',');
        line.push_str(&fmt_f(r.unitarity_defect));
        line.push(',');
        line.push_str(&fmt_f(r.fidelity_vs_oracle));
        line.push(',');
        if let Some(d) = r.path_disagreement {
            line.push_str(&fmt_f(d));
        }
        line.push(',');
        line.push_str(&fmt_f(r.newschro_residual));
        line.push(',');
        line.push_str(&fmt_f(r.normality_defect));
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn write_run_json<W: Write>(out: &RunOutput, w: &mut W) -> std::io::Result<()> {
    let config_echo = serde_json::to_string(&out.config).map_err(std::io::Error::other)?;
    writeln!(w, "[")?;
    write!(w, "  {{\"config_echo\": {config_echo}}}")?;
    for r in &out.rows {
        writeln!(w, ",")?;
        let sites = r
            .site_populations
            .iter()
            .map(|p| fmt_f(*p))
            .collect::<Vec<_>>()
            .join(", ");
        let path = match r.path_disagreement {
            Some(d) => fmt_f(d),
            None => "null".to_string(),
        };
        write!(
            w,
            "  {{\"t\": {}, \"state_norm\": {}, \"site_populations\": [{}], \
             \"unitarity_defect\": {}, \"fidelity_vs_oracle\": {}, \
             \"path_disagreement\": {}, \"newschro_residual\": {}, \
             \"normality_defect\": {}}}",
            fmt_f(r.t),
            fmt_f(r.state_norm),
            sites,
            fmt_f(r.unitarity_defect),
            fmt_f(r.fidelity_vs_oracle),
            path,
            fmt_f(r.newschro_residual),
            fmt_f(r.normality_defect),
        )?;
    }
    writeln!(w, "\n]")?;
    Ok(())
}

pub fn write_compare_csv<W: Write>(rows: &[CompareRow], w: &mut W) -> std::io::Result<()> {
    w.write_all(b"method,terminal_fidelity,max_unitarity_defect,wall_seconds\n")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            r.method,
            fmt_f(r.terminal_fidelity),
            fmt_f(r.max_unitarity_defect),
            fmt_f(r.wall_seconds)
        )?;
    }
    Ok(())
}

pub fn write_compare_json<W: Write>(rows: &[CompareRow], w: &mut W) -> std::io::Result<()> {
    writeln!(w, "[")?;
    for (i, r) in rows.iter().enumerate() {
        let sep = if i + 1 == rows.len() { "" } else { "," };
        writeln!(
            w,
            "  {{\"method\": \"{}\", \"terminal_fidelity\": {}, \
             \"max_unitarity_defect\": {}, \"wall_seconds\": {}}}{}",
            r.method,
            fmt_f(r.terminal_fidelity),
            fmt_f(r.max_unitarity_defect),
            fmt_f(r.wall_seconds),
            sep
        )?;
    }
    writeln!(w, "]")?;
    Ok(())
}

/// Render a run to the configured format.
pub fn render_run(out: &RunOutput, format: OutputFormat) -> std::io::Result<Vec<u8>> {
    let mut buf = Vec::new();
    match format {
        OutputFormat::Csv => write_run_csv(out, &mut buf)?,
        OutputFormat::Json => write_run_json(out, &mut buf)?,
    }
    Ok(buf)
}
