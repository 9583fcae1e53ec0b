//! Command-line driver: spin-walk tables, monomial symbols, dimer sweeps,
//! Gibbs convergence scans, contravariant coefficients and a self-test.
//!
//! Exit codes: 0 success, 1 failed self-check, 2 validation error,
//! 3 resource cap exceeded.

mod svg;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use spinsym::exact::fraction_string;
use spinsym::gibbs::{convergence_scan, HamiltonianSpec, PartitionQuad, ScanConfig, ScanGrid};
use spinsym::symbols::{a_zn_operator, contravariant_matrix, ContravariantInput};
use spinsym::walks::{
    enumerate_walks, monomial_symbol_walks, semiclassical_corrections, walk_weight,
    weight_formula_string, AxisMonomial,
};
use spinsym::{
    completeness_defect, dimer_classical, dimer_partition, dimer_symbol_closed, duality_gap,
    monomial_symbol_direct, motzkin_numbers, parse_hamiltonian, Axis, Complex64, Error,
    MultiIndexMonomial, Operator, PhasePoint, SpinRep, DEFAULT_DIM_CAP,
};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "spinsym",
    version,
    about = "Spin coherent-state symbols, spin walks, and Gibbs-state convergence"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the primary output to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Write an SVG chart alongside the primary output (dimer only)
    #[arg(long, global = true)]
    svg: Option<PathBuf>,

    /// Seed for any randomized grid or sampler
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Override the Hilbert-dimension cap (default 4096)
    #[arg(long = "dim-cap", global = true)]
    dim_cap: Option<usize>,

    /// Override the quadrature exactness degree
    #[arg(long = "quad-degree", global = true)]
    quad_degree: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate spin walks of length n with exact weights
    Walks {
        /// Walk length (1..=14)
        #[arg(long)]
        n: usize,
        /// Bound levels by 2s and evaluate weights at this spin
        #[arg(long = "two-s")]
        two_s: Option<u32>,
    },
    /// Covariant symbol of a spin monomial at a phase-space point
    Symbol {
        /// Whitespace-separated axis tokens ("x y x z"); site-qualified
        /// tokens ("0x 1y") select the multi-site matrix path
        monomial: String,
        /// Polar angle(s), one per site
        #[arg(long, value_delimiter = ',')]
        theta: Vec<f64>,
        /// Azimuth(s), one per site
        #[arg(long, value_delimiter = ',')]
        phi: Vec<f64>,
        #[arg(long = "two-s")]
        two_s: u32,
        #[arg(long, value_enum, default_value_t = Method::Walks)]
        method: Method,
    },
    /// Heisenberg-dimer closed forms over a theta sweep
    Dimer {
        #[arg(long)]
        beta: f64,
        /// Comma-separated list of 2s values
        #[arg(long = "two-s", value_delimiter = ',')]
        two_s: Vec<u32>,
        #[arg(long = "theta-steps", default_value_t = 181)]
        theta_steps: usize,
    },
    /// Convergence scan of a Hamiltonian spec against its classical limit
    Gibbs {
        /// Path to the Hamiltonian JSON document
        spec: PathBuf,
        #[arg(long)]
        beta: f64,
        /// Comma-separated list of 2s values
        #[arg(long = "two-s", value_delimiter = ',')]
        two_s: Vec<u32>,
        /// Grid size (theta steps for the dimer sweep, point count otherwise)
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Exact A(z^n) coefficients with a quadrature cross-check
    Contravariant {
        /// Power of z (1..=7; the quadrature residual is reported for n<=4)
        #[arg(long)]
        n: usize,
        #[arg(long = "two-s")]
        two_s: u32,
    },
    /// Run the built-in consistency checks
    Selftest,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Walks,
    Direct,
    Corrections,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Walks => "walks",
            Method::Direct => "direct",
            Method::Corrections => "corrections",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err.downcast_ref::<Error>() {
                Some(Error::DimCap { .. }) | Some(Error::DimOverflow) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

type AnyError = Box<dyn std::error::Error>;

fn run(cli: &Cli) -> Result<ExitCode, AnyError> {
    match &cli.command {
        Command::Walks { n, two_s } => cmd_walks(cli, *n, *two_s)?,
        Command::Symbol {
            monomial,
            theta,
            phi,
            two_s,
            method,
        } => cmd_symbol(cli, monomial, theta, phi, *two_s, *method)?,
        Command::Dimer {
            beta,
            two_s,
            theta_steps,
        } => cmd_dimer(cli, *beta, two_s, *theta_steps)?,
        Command::Gibbs {
            spec,
            beta,
            two_s,
            grid,
        } => cmd_gibbs(cli, spec, *beta, two_s, *grid)?,
        Command::Contravariant { n, two_s } => cmd_contravariant(cli, *n, *two_s)?,
        Command::Selftest => return cmd_selftest(),
    }
    Ok(ExitCode::SUCCESS)
}

fn write_output(path: &Option<PathBuf>, content: &str) -> Result<(), AnyError> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| format!("cannot write {}: {e}", p.display()).into()),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// 17-significant-digit float rendering (round-trip safe).
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn complex_json(z: Complex64) -> serde_json::Value {
    json!({ "re": z.re, "im": z.im })
}

fn cmd_walks(cli: &Cli, n: usize, two_s: Option<u32>) -> Result<(), AnyError> {
    let walks = enumerate_walks(n, two_s)?;
    let config = match two_s {
        Some(ts) => format!("walks --n {n} --two-s {ts}"),
        None => format!("walks --n {n}"),
    };
    let mut out = String::new();
    writeln!(out, "# config: {config}")?;
    writeln!(out, "# count: {}", walks.len())?;
    writeln!(out, "levels,weight")?;
    for w in &walks {
        let levels: Vec<String> = w.levels().iter().map(|l| l.to_string()).collect();
        let weight = match two_s {
            Some(ts) => walk_weight(w, ts)?.to_fraction_string(),
            None => weight_formula_string(w),
        };
        writeln!(out, "{},{weight}", levels.join(" "))?;
    }
    write_output(&cli.out, &out)
}

fn cmd_symbol(
    cli: &Cli,
    monomial: &str,
    theta: &[f64],
    phi: &[f64],
    two_s: u32,
    method: Method,
) -> Result<(), AnyError> {
    let site_qualified = monomial
        .split_whitespace()
        .any(|t| t.chars().next().is_some_and(|c| c.is_ascii_digit()));
    let config = format!(
        "symbol \"{monomial}\" --theta {} --phi {} --two-s {two_s} --method {}",
        join_f64(theta),
        join_f64(phi),
        method.name()
    );

    if site_qualified {
        if method != Method::Direct {
            return Err(
                "site-qualified monomials use the multi-site matrix path; pass --method direct"
                    .into(),
            );
        }
        let m = MultiIndexMonomial::parse(monomial)?;
        let n_sites = m.factors().iter().map(|&(s, _)| s).max().unwrap_or(0) + 1;
        let point = point_from_angles(theta, phi, n_sites)?;
        let rep = SpinRep::with_dim_cap(two_s, n_sites, cli.dim_cap.unwrap_or(DEFAULT_DIM_CAP))?;
        let value = monomial_symbol_direct(&m, &point, &rep)?;
        let classical = m.classical(&point);
        let doc = json!({
            "config": config,
            "monomial": monomial,
            "two_s": two_s,
            "theta": theta,
            "phi": phi,
            "method": "direct",
            "value": complex_json(value),
            "classical": classical,
        });
        return write_output(&cli.out, &format!("{}\n", serde_json::to_string_pretty(&doc)?));
    }

    let m = AxisMonomial::parse(monomial)?;
    let point = point_from_angles(theta, phi, 1)?;
    let (th, ph) = (point.theta(0), point.phi(0));
    let classical = m.classical(&point.cartesian(0));
    let value = match method {
        Method::Direct => {
            let rep = SpinRep::with_dim_cap(two_s, 1, cli.dim_cap.unwrap_or(DEFAULT_DIM_CAP))?;
            let mm =
                MultiIndexMonomial::new(m.axes().iter().map(|&a| (0usize, a)).collect())?;
            monomial_symbol_direct(&mm, &point, &rep)?
        }
        _ => monomial_symbol_walks(&m, th, ph, two_s)?,
    };
    let mut doc = json!({
        "config": config,
        "monomial": monomial,
        "two_s": two_s,
        "theta": theta,
        "phi": phi,
        "method": method.name(),
        "value": complex_json(value),
        "classical": classical,
    });
    if method == Method::Corrections {
        let corr = semiclassical_corrections(&m, th, ph, two_s);
        doc["corrections"] = json!({
            "c1": complex_json(corr.c1),
            "c2": complex_json(corr.c2),
            "c3": complex_json(corr.c3),
            "first_order": complex_json(Complex64::new(classical, 0.0) + corr.total()),
        });
    }
    write_output(&cli.out, &format!("{}\n", serde_json::to_string_pretty(&doc)?))
}

fn point_from_angles(
    theta: &[f64],
    phi: &[f64],
    n_sites: usize,
) -> Result<PhasePoint<f64>, AnyError> {
    if theta.len() != n_sites || phi.len() != n_sites {
        return Err(format!(
            "need {n_sites} theta and phi values, got {} and {}",
            theta.len(),
            phi.len()
        )
        .into());
    }
    Ok(PhasePoint::new(
        theta.iter().copied().zip(phi.iter().copied()).collect(),
    )?)
}

fn join_f64(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn join_u32(xs: &[u32]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn cmd_dimer(cli: &Cli, beta: f64, two_s_list: &[u32], theta_steps: usize) -> Result<(), AnyError> {
    if two_s_list.is_empty() {
        return Err("pass at least one --two-s value".into());
    }
    let steps = theta_steps.max(2);
    let config = format!(
        "dimer --beta {beta} --two-s {} --theta-steps {steps}",
        join_u32(two_s_list)
    );
    let mut out = String::new();
    writeln!(out, "# config: {config}")?;
    writeln!(out, "theta,two_s,beta,closed_form,classical,abs_error")?;
    let thetas: Vec<f64> = (0..steps)
        .map(|i| std::f64::consts::PI * i as f64 / (steps - 1) as f64)
        .collect();
    let mut curves: Vec<(u32, Vec<(f64, f64)>)> = Vec::new();
    for &two_s in two_s_list {
        if two_s == 0 {
            return Err(Error::TrivialRep.into());
        }
        let mut curve = Vec::with_capacity(steps);
        for &theta in &thetas {
            let closed = dimer_symbol_closed::<f64>(two_s, beta, theta);
            let classical = dimer_classical::<f64>(beta, theta);
            writeln!(
                out,
                "{},{two_s},{},{},{},{}",
                fmt_f64(theta),
                fmt_f64(beta),
                fmt_f64(closed),
                fmt_f64(classical),
                fmt_f64((closed - classical).abs())
            )?;
            curve.push((theta, closed));
        }
        curves.push((two_s, curve));
    }
    if let Some(svg_path) = &cli.svg {
        let palette = ["#6baed6", "#3182bd", "#08519c", "#083a7a", "#052a5c"];
        let mut series: Vec<svg::Series> = curves
            .iter()
            .enumerate()
            .map(|(i, (two_s, points))| svg::Series {
                label: format!("2s = {two_s}"),
                color: palette[i % palette.len()].to_string(),
                points: points.clone(),
            })
            .collect();
        series.push(svg::Series {
            label: "classical".to_string(),
            color: "#b8860b".to_string(),
            points: thetas
                .iter()
                .map(|&t| (t, dimer_classical::<f64>(beta, t)))
                .collect(),
        });
        let chart = svg::line_chart(
            &format!("Scaled dimer Gibbs symbol, beta = {beta}"),
            "theta (rad)",
            "(2s+1)^2 g(G)",
            &series,
            &config,
        );
        std::fs::write(svg_path, chart)
            .map_err(|e| format!("cannot write {}: {e}", svg_path.display()))?;
    }
    write_output(&cli.out, &out)
}

fn cmd_gibbs(
    cli: &Cli,
    spec_path: &PathBuf,
    beta: f64,
    two_s_list: &[u32],
    grid_size: Option<usize>,
) -> Result<(), AnyError> {
    if two_s_list.is_empty() {
        return Err("pass at least one --two-s value".into());
    }
    let text = std::fs::read_to_string(spec_path)
        .map_err(|e| format!("cannot read {}: {e}", spec_path.display()))?;
    let spec: HamiltonianSpec<f64> = parse_hamiltonian(&text)?;
    let grid = match (grid_size, spec.is_isotropic_dimer()) {
        (Some(n), true) => ScanGrid::DimerTheta { steps: n },
        (Some(n), false) => ScanGrid::Random {
            count: n,
            seed: cli.seed,
        },
        (None, _) => ScanGrid::default_for(&spec, cli.seed),
    };
    let config_obj = ScanConfig {
        quad: PartitionQuad {
            degree: cli.quad_degree,
            ..Default::default()
        },
        dim_cap: cli.dim_cap.unwrap_or(DEFAULT_DIM_CAP),
    };
    let config = format!(
        "gibbs {} --beta {beta} --two-s {} --grid {} --seed {} --dim-cap {} --quad-degree {}",
        spec_path.display(),
        join_u32(two_s_list),
        match &grid {
            ScanGrid::DimerTheta { steps } => steps.to_string(),
            ScanGrid::Random { count, .. } => count.to_string(),
            ScanGrid::Points(_) => "explicit".to_string(),
        },
        cli.seed,
        config_obj.dim_cap,
        cli.quad_degree
            .map(|d| d.to_string())
            .unwrap_or_else(|| "auto".to_string()),
    );

    let report = convergence_scan(&spec, beta, two_s_list, &grid, &config_obj)?;
    let n_sites = spec.n_sites();
    let mut out = String::new();
    writeln!(out, "# config: {config}")?;
    match report.z_classical.std_err {
        Some(err) => writeln!(
            out,
            "# z_classical: {} (mc std_err {})",
            fmt_f64(report.z_classical.value),
            fmt_f64(err)
        )?,
        None => writeln!(out, "# z_classical: {}", fmt_f64(report.z_classical.value))?,
    }
    for s in &report.summaries {
        writeln!(
            out,
            "# sup_error two_s={}: {} (bound {})",
            s.two_s,
            fmt_f64(s.sup_error),
            fmt_f64(s.bound)
        )?;
    }
    let mut header = String::from("two_s,beta");
    for site in 0..n_sites {
        write!(header, ",theta{site},phi{site}")?;
    }
    header.push_str(",quantum_scaled,classical,abs_error,unnorm_error,bound");
    writeln!(out, "{header}")?;
    for row in &report.rows {
        let mut line = format!("{},{}", row.two_s, fmt_f64(row.beta));
        for site in 0..n_sites {
            write!(
                line,
                ",{},{}",
                fmt_f64(row.point.theta(site)),
                fmt_f64(row.point.phi(site))
            )?;
        }
        writeln!(
            out,
            "{line},{},{},{},{},{}",
            fmt_f64(row.quantum_scaled),
            fmt_f64(row.classical),
            fmt_f64(row.abs_error),
            fmt_f64(row.unnorm_error),
            fmt_f64(row.bound)
        )?;
    }
    write_output(&cli.out, &out)
}

fn cmd_contravariant(cli: &Cli, n: usize, two_s: u32) -> Result<(), AnyError> {
    let rep = SpinRep::with_dim_cap(two_s, 1, cli.dim_cap.unwrap_or(DEFAULT_DIM_CAP))?;
    let coeffs = spinsym::a_zn_coefficients(n, &rep)?;
    let config = format!(
        "contravariant --n {n} --two-s {two_s} --quad-degree {}",
        cli.quad_degree
            .map(|d| d.to_string())
            .unwrap_or_else(|| "auto".to_string())
    );
    let residual = if n <= 4 {
        let f = ContravariantInput::real(n, move |p: &PhasePoint<f64>| {
            p.component(0, Axis::Z).powi(n as i32)
        });
        let via_quad = contravariant_matrix(&f, &rep, cli.quad_degree)?;
        let via_coeffs = a_zn_operator::<f64>(n, &rep)?;
        Some(via_quad.max_abs_diff(&via_coeffs))
    } else {
        None
    };
    let doc = json!({
        "config": config,
        "n": n,
        "two_s": two_s,
        "coefficients": coeffs
            .iter()
            .map(|(k, v)| json!({ "power": k, "value": fraction_string(v) }))
            .collect::<Vec<_>>(),
        "quadrature_residual": residual,
    });
    write_output(&cli.out, &format!("{}\n", serde_json::to_string_pretty(&doc)?))
}

fn cmd_selftest() -> Result<ExitCode, AnyError> {
    let mut failures = 0usize;
    let mut check = |name: &str, ok: bool, detail: String| {
        if ok {
            println!("PASS {name}: {detail}");
        } else {
            println!("FAIL {name}: {detail}");
            failures += 1;
        }
    };

    // walk counts against the independent Motzkin recurrence
    let motzkin = motzkin_numbers(8);
    let mut counts_ok = true;
    for (n, m) in motzkin.iter().enumerate().skip(1) {
        let count = enumerate_walks(n, None)?.len();
        counts_ok &= m.to_string() == count.to_string();
    }
    check("walk-counts", counts_ok, "n = 1..8 match the recurrence".into());

    // dimer closed form vs the dense matrix path
    let spec = HamiltonianSpec::<f64>::heisenberg_dimer();
    let rep = SpinRep::new(2, 2)?;
    let spectral = spinsym::gibbs::SpectralHamiltonian::new(&spec, &rep)?;
    let mut worst: f64 = 0.0;
    for i in 0..=8 {
        let theta = std::f64::consts::PI * i as f64 / 8.0;
        let point = PhasePoint::new(vec![(0.0, 0.0), (theta, 0.0)])?;
        let a = spectral.scaled_symbol(1.0, &point)?;
        let b = dimer_symbol_closed::<f64>(2, 1.0, theta);
        worst = worst.max((a - b).abs());
    }
    check(
        "dimer-closed-form",
        worst < 1e-9,
        format!("max deviation {worst:.2e}"),
    );

    // partition function closed form
    let z = dimer_partition::<f64>(1, 1.0);
    let expect = 3.0f64.exp() + 3.0 * (-1.0f64).exp();
    check(
        "dimer-partition",
        (z - expect).abs() < 1e-12 * expect,
        format!("{z:.12} vs {expect:.12}"),
    );

    // coherent-state completeness at s = 1/2
    let defect = completeness_defect::<f64>(&SpinRep::new(1, 1)?, 2)?;
    check(
        "completeness",
        defect < 1e-12,
        format!("defect {defect:.2e}"),
    );

    // A(z) coefficient at s = 1/2
    let coeffs = spinsym::a_zn_coefficients(1, &SpinRep::new(1, 1)?)?;
    let a1_ok = fraction_string(&coeffs[0].1) == "2/3";
    check("contravariant-a1", a1_ok, "a_1 = 2/3 at s = 1/2".into());

    // statistical duality on the maximally mixed state
    let rep = SpinRep::new(2, 1)?;
    let w = Operator::identity(rep.dim()).scale_re(1.0 / rep.dim() as f64);
    let f = ContravariantInput::real(2, |p: &PhasePoint<f64>| p.component(0, Axis::Z).powi(2));
    let gap = duality_gap(&w, &f, &rep)?;
    check("duality", gap < 1e-10, format!("gap {gap:.2e}"));

    if failures == 0 {
        println!("selftest: all checks passed");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("selftest: {failures} check(s) failed");
        Ok(ExitCode::from(1))
    }
}
