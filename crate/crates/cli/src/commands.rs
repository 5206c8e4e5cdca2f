use std::io::Read;
use std::path::Path;

use polarphi_core::exact::{self, PhiBreakdown};
use polarphi_core::harness::{self, GridReport};
use polarphi_core::revolution::{self, RevolutionProfile, RevolutionReport};
use polarphi_core::sampler::{parse_seed, MCEstimate};
use polarphi_core::strategy::{Detail, EvalOptions, StrategyRegistry, MC_MAX_DIM};
use polarphi_core::{BodySpec, Error, Exponent};

use crate::grid::parse_p_grid;
use crate::output::{render, Cell, Table};
use crate::{Cli, Command, PhiCommand, VerifyCommand};

/// Largest dimension accepted by the closed-form paths.
pub const EXACT_MAX_DIM: usize = 200;

pub struct Outcome {
    pub text: String,
    /// Set when a verification found violations.
    pub failure: Option<String>,
}

type Result<T> = std::result::Result<T, Error>;

pub fn run(cli: &Cli) -> Result<Outcome> {
    let tol = cli.tol.resolve()?;
    let registry = StrategyRegistry::default();
    let (name, tables, failure) = match &cli.command {
        Command::Phi(PhiCommand::Exact { dim, p, method }) => {
            let p: Exponent = p.parse()?;
            check_dim(*dim, 1, EXACT_MAX_DIM)?;
            if !matches!(method.as_str(), "f" | "moments") {
                return Err(Error::Domain(format!(
                    "phi exact supports --method f or moments, got '{method}'"
                )));
            }
            let body = BodySpec::pball(*dim, p)?;
            let e = registry.evaluate(method, &body, &EvalOptions::default())?;
            let Detail::PBall(b) = e.detail else {
                unreachable!("p-ball evaluators return a breakdown")
            };
            ("phi exact", vec![breakdown_table(&b, method)], None)
        }
        Command::Phi(PhiCommand::Mc {
            body,
            samples,
            seed,
        }) => {
            let body = read_body(body)?;
            check_dim(body.dim(), 1, MC_MAX_DIM)?;
            let opts = EvalOptions {
                samples: *samples,
                seed: parse_seed(seed)?,
            };
            let e = registry.evaluate("mc", &body, &opts)?;
            let Detail::MonteCarlo(mc) = e.detail else {
                unreachable!("mc returns an estimate")
            };
            ("phi mc", vec![mc_table(&mc, body.dim())], None)
        }
        Command::Phi(PhiCommand::Eval {
            body,
            method,
            samples,
            seed,
        }) => {
            let body = read_body(body)?;
            check_dim(body.dim(), 1, EXACT_MAX_DIM)?;
            let opts = EvalOptions {
                samples: *samples,
                seed: parse_seed(seed)?,
            };
            let e = registry.evaluate(method, &body, &opts)?;
            let mut t = Table::new("phi", &["dim", "method", "phi", "stderr", "body"]);
            t.push(vec![
                e.dim.into(),
                e.method.into(),
                e.phi.into(),
                e.stderr.into(),
                body.to_canonical_string().into(),
            ]);
            let mut tables = vec![t];
            match &e.detail {
                Detail::PBall(b) => tables.push(breakdown_table(b, e.method)),
                Detail::Exact(r) => {
                    let mut t = Table::new(
                        "volumes",
                        &["ln_volume", "ln_polar_volume", "volume", "polar_volume"],
                    );
                    t.push(vec![
                        r.ln_volume.into(),
                        r.ln_polar_volume.into(),
                        r.ln_volume.exp().into(),
                        r.ln_polar_volume.exp().into(),
                    ]);
                    tables.push(t);
                }
                Detail::Revolution(r) => tables.push(revolution_table(r, "")),
                Detail::MonteCarlo(mc) => tables.push(mc_table(mc, e.dim)),
            }
            ("phi eval", tables, None)
        }
        Command::FEval { y1, y2, p } => {
            let p: Exponent = p.parse()?;
            let f = exact::f_factor(*y1, *y2, p)?;
            let mut t = Table::new("f", &["y1", "y2", "p", "f"]);
            t.push(vec![
                (*y1).into(),
                (*y2).into(),
                p.to_string().into(),
                f.into(),
            ]);
            ("f-eval", vec![t], None)
        }
        Command::Scan { dim, grid } => {
            check_dim(*dim, 1, EXACT_MAX_DIM)?;
            let grid = parse_p_grid(grid)?;
            let scan = harness::scan_p_argmax(*dim, &grid, &tol)?;
            let phi_two = exact::phi_pball(*dim, Exponent::TWO)?.phi;
            let mut rows = Table::new("scan", &["dim", "p", "phi", "gap_to_p2"]);
            for (p, phi) in &scan.rows {
                rows.push(vec![
                    (*dim).into(),
                    p.to_string().into(),
                    (*phi).into(),
                    (phi_two - phi).into(),
                ]);
            }
            let mut summary = Table::new(
                "argmax",
                &[
                    "dim",
                    "argmax",
                    "max_phi",
                    "euclidean_phi",
                    "unimodal",
                    "violations",
                    "passed",
                ],
            );
            summary.push(vec![
                (*dim).into(),
                scan.argmax.to_string().into(),
                scan.max_phi.into(),
                scan.euclidean_phi.into(),
                scan.unimodal.into(),
                scan.report.violations.len().into(),
                scan.report.passed().into(),
            ]);
            let failure = (!scan.report.passed())
                .then(|| format!("scan of dimension {dim} found violations"));
            let mut tables = vec![rows, summary];
            tables.extend(violation_table(&[("scan", &scan.report)]));
            ("scan", tables, failure)
        }
        Command::Verify(VerifyCommand::Theorem { dims, grid }) => {
            let grid = parse_p_grid(grid)?;
            let mut summary = Table::new(
                "theorem",
                &[
                    "dim",
                    "points",
                    "argmax",
                    "max_phi",
                    "euclidean_phi",
                    "endpoint_residual",
                    "violations",
                    "passed",
                ],
            );
            let mut reports = Vec::new();
            for &n in dims {
                check_dim(n, 1, EXACT_MAX_DIM)?;
                let scan = harness::scan_p_argmax(n, &grid, &tol)?;
                summary.push(vec![
                    n.into(),
                    scan.rows.len().into(),
                    scan.argmax.to_string().into(),
                    scan.max_phi.into(),
                    scan.euclidean_phi.into(),
                    scan.report.max_residual.into(),
                    scan.report.violations.len().into(),
                    scan.report.passed().into(),
                ]);
                reports.push((format!("dim {n}"), scan.report));
            }
            verify_outcome("verify theorem", summary, &reports)
        }
        Command::Verify(VerifyCommand::Harness) => {
            let (x, y, pairs) = (
                harness::default_x_grid(),
                harness::default_y_grid(),
                harness::default_pair_grid(),
            );
            let log = harness::default_log_grid();
            let reports = vec![
                (
                    "monotonicity".to_string(),
                    harness::monotonicity_report(&x, &y, &pairs, &tol)?,
                ),
                (
                    "symmetry".to_string(),
                    harness::symmetry_report(&x, &y, &pairs)?,
                ),
                (
                    "convexity".to_string(),
                    harness::convexity_report(&log, &log, &tol)?,
                ),
            ];
            let mut summary = Table::new(
                "harness",
                &[
                    "suite",
                    "description",
                    "points",
                    "violations",
                    "max_residual",
                    "residual_tolerance",
                    "passed",
                ],
            );
            for (name, r) in &reports {
                summary.push(vec![
                    name.as_str().into(),
                    r.description.as_str().into(),
                    r.grid.len().into(),
                    r.violations.len().into(),
                    r.max_residual.into(),
                    r.residual_tolerance.into(),
                    r.passed().into(),
                ]);
            }
            verify_outcome("verify harness", summary, &reports)
        }
        Command::Verify(VerifyCommand::Inequalities { dims, grid }) => {
            let grid = parse_p_grid(grid)?;
            let mut t = Table::new(
                "inequalities",
                &[
                    "dim",
                    "p",
                    "phi",
                    "santalo_product",
                    "euclidean_product",
                    "lower_bound",
                    "identity_residual",
                    "n_phi",
                    "passed",
                ],
            );
            let mut failed = Vec::new();
            for &n in dims {
                check_dim(n, 1, EXACT_MAX_DIM)?;
                for &p in &grid {
                    let r = exact::isotropy_report(n, p)?;
                    let v = r.violations(tol.identity);
                    t.push(vec![
                        n.into(),
                        p.to_string().into(),
                        r.phi.into(),
                        r.santalo_product.into(),
                        r.euclidean_product.into(),
                        r.lower_bound.into(),
                        r.identity_residual.into(),
                        r.n_phi.into(),
                        v.is_empty().into(),
                    ]);
                    failed.extend(v.into_iter().map(|m| format!("n={n} p={p}: {m}")));
                }
            }
            let failure = (!failed.is_empty()).then(|| failed.join("; "));
            ("verify inequalities", vec![t], failure)
        }
        Command::Revolution {
            profile,
            dim,
            diagnostics,
        } => {
            check_dim(*dim, 2, EXACT_MAX_DIM)?;
            let profile = read_profile(profile)?;
            let r = revolution::phi_revolution_of(&profile, *dim, tol.quadrature)?;
            let mut tables = vec![revolution_table(&r, &profile_label(&profile))];
            let mut failure = None;
            if *diagnostics {
                let mut m = Table::new(
                    "moments",
                    &["side", "m0", "m2", "mplus", "quadrature_error"],
                );
                for (side, x) in [("primal", &r.primal), ("polar", &r.polar)] {
                    m.push(vec![
                        side.into(),
                        x.m0.into(),
                        x.m2.into(),
                        x.mplus.into(),
                        x.quadrature_error.into(),
                    ]);
                }
                tables.push(m);
                let v = r.violations();
                let mut checks =
                    Table::new("checks", &["check", "value", "lower", "upper", "passed"]);
                checks.push(vec![
                    "second_summand <= (n-1)/(n+1)^2".into(),
                    r.second_summand.into(),
                    Cell::Null,
                    (r.second_summand_bound + 1e-10).into(),
                    (r.second_summand <= r.second_summand_bound + 1e-10).into(),
                ]);
                checks.push(vec![
                    "hensley_product_sq in [1/12, 1/2]".into(),
                    r.hensley_product_sq.into(),
                    (1.0 / 12.0 - 1e-9).into(),
                    (0.5 + 1e-9).into(),
                    (r.hensley_product_sq >= 1.0 / 12.0 - 1e-9
                        && r.hensley_product_sq <= 0.5 + 1e-9)
                        .into(),
                ]);
                checks.push(vec![
                    "santalo_ratio <= 1".into(),
                    r.santalo_ratio.into(),
                    Cell::Null,
                    (1.0 + 1e-9).into(),
                    (r.santalo_ratio <= 1.0 + 1e-9).into(),
                ]);
                tables.push(checks);
                if !v.is_empty() {
                    failure = Some(v.join("; "));
                }
            }
            ("revolution", tables, failure)
        }
        Command::Methods => {
            let mut t = Table::new("methods", &["name", "description"]);
            for s in registry.iter() {
                t.push(vec![s.name().into(), s.description().into()]);
            }
            ("methods", vec![t], None)
        }
    };
    Ok(Outcome {
        text: render(name, &tables, cli.format),
        failure,
    })
}

fn check_dim(n: usize, lo: usize, hi: usize) -> Result<()> {
    if n < lo || n > hi {
        Err(Error::Domain(format!(
            "dimension must lie in [{lo}, {hi}], got {n}"
        )))
    } else {
        Ok(())
    }
}

fn read_source(arg: &str) -> Result<String> {
    let io = |e: std::io::Error| Error::Domain(format!("cannot read '{arg}': {e}"));
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io)?;
        Ok(s)
    } else if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg).map_err(io)
    }
}

fn read_body(arg: &str) -> Result<BodySpec> {
    BodySpec::parse(&read_source(arg)?)
}

fn read_profile(arg: &str) -> Result<RevolutionProfile> {
    if Path::new(arg).is_file() || arg == "-" {
        read_source(arg)?.parse()
    } else {
        arg.parse()
    }
}

fn profile_label(p: &RevolutionProfile) -> String {
    match p {
        RevolutionProfile::Grid(_) => serde_json::to_string(p).expect("profiles serialize"),
        other => other.to_string(),
    }
}

fn breakdown_table(b: &PhiBreakdown, method: &str) -> Table {
    let mut t = Table::new(
        "phi",
        &[
            "dim",
            "p",
            "method",
            "phi",
            "volume",
            "polar_volume",
            "ln_volume",
            "ln_polar_volume",
            "cross_integral",
        ],
    );
    t.push(vec![
        b.dim.into(),
        b.p.to_string().into(),
        method.into(),
        b.phi.into(),
        b.volume.into(),
        b.polar_volume.into(),
        b.ln_volume.into(),
        b.ln_polar_volume.into(),
        b.cross_integral.into(),
    ]);
    t
}

fn mc_table(e: &MCEstimate, dim: usize) -> Table {
    let mut t = Table::new(
        "mc",
        &[
            "dim",
            "estimate",
            "stderr",
            "samples",
            "seed",
            "primal_acceptance",
            "polar_acceptance",
        ],
    );
    t.push(vec![
        dim.into(),
        e.estimate.into(),
        e.stderr.into(),
        e.samples.into(),
        e.seed.into(),
        e.primal_acceptance.into(),
        e.polar_acceptance.into(),
    ]);
    t
}

fn revolution_table(r: &RevolutionReport, label: &str) -> Table {
    let mut t = Table::new(
        "revolution",
        &[
            "profile",
            "dim",
            "phi",
            "first_summand",
            "second_summand",
            "second_summand_bound",
            "euclidean_phi",
            "n_phi",
            "n2_first_summand",
            "hensley_product_sq",
            "santalo_ratio",
        ],
    );
    t.push(vec![
        label.into(),
        r.dim.into(),
        r.phi.into(),
        r.first_summand.into(),
        r.second_summand.into(),
        r.second_summand_bound.into(),
        r.euclidean_phi.into(),
        r.n_phi.into(),
        r.n2_first_summand.into(),
        r.hensley_product_sq.into(),
        r.santalo_ratio.into(),
    ]);
    t
}

fn violation_table(reports: &[(&str, &GridReport)]) -> Option<Table> {
    let mut t = Table::new("violations", &["suite", "check", "point", "value"]);
    for (name, r) in reports {
        for v in &r.violations {
            let point: Vec<String> = v.point.iter().map(|x| crate::output::number(*x)).collect();
            t.push(vec![
                (*name).into(),
                v.check.as_str().into(),
                point.join(" ").into(),
                v.value.into(),
            ]);
        }
    }
    (!t.rows.is_empty()).then_some(t)
}

fn verify_outcome(
    name: &'static str,
    summary: Table,
    reports: &[(String, GridReport)],
) -> (&'static str, Vec<Table>, Option<String>) {
    let refs: Vec<(&str, &GridReport)> = reports.iter().map(|(n, r)| (n.as_str(), r)).collect();
    let mut tables = vec![summary];
    tables.extend(violation_table(&refs));
    let failed: Vec<&str> = reports
        .iter()
        .filter(|(_, r)| !r.passed())
        .map(|(n, _)| n.as_str())
        .collect();
    let failure = (!failed.is_empty()).then(|| format!("{name} failed for {}", failed.join(", ")));
    (name, tables, failure)
}
