//! Command-line surface: orchestrates table building (cache-aware), the
//! bound/acceleration/extrapolation pipeline, tails, fits, CDF bounds and
//! the physical estimates. All persisted artifacts use exact `"num/den"`
//! rationals or fixed-width decimal strings, so repeated runs are
//! byte-identical.

use crate::analysis;
use crate::apps;
use crate::arith::{rat, rational_from_string, BigFloat, Rational};
use crate::dist;
use crate::engine::{self, BuiltinOperator, MomentTable, OperatorSpec};
use crate::io::{self, Cache};
use crate::runpoly;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::io::Write as _;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "qmoments", version, about = "Exact moments of Lorentzian-smeared quadratic field operators and the induced moment-problem analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Cache directory (also settable via QMOMENTS_CACHE_DIR).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,

    /// Working precision in decimal digits.
    #[arg(long, global = true, default_value_t = 40)]
    pub digits: u32,

    /// Output format for the primary artifact.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,

    /// Write the primary artifact here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact connected and full moments of an operator.
    Moments {
        #[arg(long)]
        operator: String,
        #[arg(long, default_value_t = 65)]
        n_max: usize,
    },
    /// Support lower bounds y_N from the Hankel pencil.
    LowerBound {
        #[arg(long)]
        operator: String,
        /// Range of pencil sizes, e.g. 2..12
        #[arg(long = "N", default_value = "2..12")]
        n_range: String,
        /// Optional acceleration chain, e.g. "1,2" for L^(2) L^(1)
        #[arg(long)]
        accelerate: Option<String>,
        /// Optional extrapolation basis exponents, e.g. "0,1,2"
        #[arg(long)]
        extrapolate: Option<String>,
        /// Fit window lo:hi for --extrapolate
        #[arg(long, default_value = "21:33")]
        window: String,
    },
    /// Apply an acceleration chain to the bound sequence.
    Accelerate {
        #[arg(long)]
        operator: String,
        #[arg(long = "N", default_value = "2..33")]
        n_range: String,
        /// Chain constants, applied right to left, e.g. "1/2,1,3/2"
        #[arg(long)]
        ks: String,
    },
    /// Window least-squares extrapolation of the bound sequence.
    Extrapolate {
        #[arg(long)]
        operator: String,
        #[arg(long = "N", default_value = "2..33")]
        n_range: String,
        /// Basis exponents of 1/N, e.g. "0,1/2,1,3/2"
        #[arg(long)]
        exponents: String,
        #[arg(long, default_value = "21:33")]
        window: String,
    },
    /// Tail-ansatz parameters (c0, a) from two successive moments.
    Tail {
        #[arg(long)]
        operator: String,
        #[arg(long, default_value = "64,65")]
        n_pair: String,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Moments and density grid of the heuristic full-range model.
    Fit {
        /// Highest moment to compare against the exact table.
        #[arg(long, default_value_t = 21)]
        n_max: usize,
        /// Quadrature relative tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Density sample grid lo:hi:steps for the (x, P(x)) emission.
        #[arg(long, allow_hyphen_values = true, default_value = "-0.047:1.0:200")]
        grid: String,
    },
    /// Chebyshev-variant upper bounds on Prob(X >= λ).
    CdfBound {
        #[arg(long)]
        operator: String,
        /// Log-spaced λ grid lo:hi:steps.
        #[arg(long, default_value = "1e2:1e7:11")]
        lambda_grid: String,
        #[arg(long, default_value_t = 65)]
        n_max: usize,
    },
    /// Black-hole nucleation count or mass from the tail.
    Nucleation {
        /// Observation volume, cm^3 (suffix "cm3" allowed).
        #[arg(long, default_value = "1")]
        volume: String,
        /// Observation time, seconds (suffix "s" allowed).
        #[arg(long, default_value = "1")]
        time: String,
        /// Spacetime 4-volume in Planck units, overriding volume/time.
        #[arg(long)]
        vt_planck: Option<String>,
        /// Expected count (solves for the mass).
        #[arg(long)]
        count: Option<String>,
        /// Black-hole mass in Planck masses (computes the count).
        #[arg(long)]
        mass: Option<String>,
    },
    /// Boltzmann-brain nucleation exponent.
    Brain {
        /// Mass, kg (suffix "kg" allowed).
        #[arg(long)]
        mass: String,
        /// Region size, cm (suffix "cm" allowed).
        #[arg(long)]
        size: String,
        /// Time scale, seconds (suffix "s" allowed).
        #[arg(long)]
        time: String,
    },
    /// Exact moments of a shifted Gamma density.
    GammaMoments {
        /// Parameters "x0,alpha,beta" as rationals, e.g. "1/6,1/72,1/12".
        #[arg(long)]
        params: String,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
    },
    /// Moment-growth diagnostics and dominant-term brackets.
    Diagnostics {
        #[arg(long)]
        operator: String,
        #[arg(long, default_value_t = 65)]
        n_max: usize,
    },
}

/// Process exit codes: 2 invalid config, 3 insufficient depth, 4 numerical
/// non-convergence.
pub fn exit_code(e: &crate::Error) -> i32 {
    match e {
        crate::Error::InvalidArgument(_) | crate::Error::InvalidDerivativeOrder(_) => 2,
        crate::Error::InsufficientDepth { .. } => 3,
        crate::Error::NonConvergence(_) | crate::Error::NoRoot { .. } => 4,
        _ => 1,
    }
}

pub fn run(cli: &Cli) -> crate::Result<()> {
    let cache = cli.cache_dir.as_ref().map(|d| Cache::new(d)).or_else(Cache::from_env);
    let text = match &cli.command {
        Command::Moments { operator, n_max } => cmd_moments(cli, cache.as_ref(), operator, *n_max)?,
        Command::LowerBound { operator, n_range, accelerate, extrapolate, window } => {
            cmd_lower_bound(cli, cache.as_ref(), operator, n_range, accelerate, extrapolate, window)?
        }
        Command::Accelerate { operator, n_range, ks } => {
            cmd_accelerate(cli, cache.as_ref(), operator, n_range, ks)?
        }
        Command::Extrapolate { operator, n_range, exponents, window } => {
            cmd_extrapolate(cli, cache.as_ref(), operator, n_range, exponents, window)?
        }
        Command::Tail { operator, n_pair, n_max } => {
            cmd_tail(cli, cache.as_ref(), operator, n_pair, *n_max)?
        }
        Command::Fit { n_max, tol, grid } => cmd_fit(cli, cache.as_ref(), *n_max, *tol, grid)?,
        Command::CdfBound { operator, lambda_grid, n_max } => {
            cmd_cdf(cli, cache.as_ref(), operator, lambda_grid, *n_max)?
        }
        Command::Nucleation { volume, time, vt_planck, count, mass } => {
            cmd_nucleation(cli, volume, time, vt_planck, count, mass)?
        }
        Command::Brain { mass, size, time } => cmd_brain(cli, mass, size, time)?,
        Command::GammaMoments { params, n_max } => cmd_gamma_moments(cli, params, *n_max)?,
        Command::Diagnostics { operator, n_max } => {
            cmd_diagnostics(cli, cache.as_ref(), operator, *n_max)?
        }
    };
    match &cli.output {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(text.as_bytes())?;
        }
        None => {
            print!("{text}");
        }
    }
    Ok(())
}

/// Cache-aware table construction: finished tables are preferred, then
/// cached base connected moments, then a full recompute (stored back).
pub fn load_or_build_table(
    op: BuiltinOperator,
    n_max: usize,
    cache: Option<&Cache>,
) -> crate::Result<MomentTable> {
    let spec = OperatorSpec::builtin(op);
    if let Some(c) = cache {
        if let Some(t) = c.load_table(spec.name(), n_max) {
            return Ok(t);
        }
        if let Some(base) = c.load_base_moments(spec.p(), n_max) {
            let tables =
                engine::build_tables_from_base(std::slice::from_ref(&spec), &[spec.p()], &[base])?;
            let t = tables.into_iter().next().expect("one table");
            c.store_table(&t)?;
            return Ok(t);
        }
    }
    let kt = crate::kintegrals::KTable::build(spec.p(), n_max.max(2) as u32)?;
    let base = runpoly::base_connected_moments(&kt, n_max as u32)?;
    if let Some(c) = cache {
        c.store_base_moments(spec.p(), n_max, &base)?;
    }
    let tables = engine::build_tables_from_base(std::slice::from_ref(&spec), &[spec.p()], &[base])?;
    let t = tables.into_iter().next().expect("one table");
    if let Some(c) = cache {
        c.store_table(&t)?;
    }
    Ok(t)
}

fn parse_range(s: &str, sep: &str) -> crate::Result<(usize, usize)> {
    let (lo, hi) = s
        .split_once(sep)
        .ok_or_else(|| crate::Error::InvalidArgument(format!("expected lo{sep}hi, got {s:?}")))?;
    let lo = lo.trim().parse().map_err(|_| bad_num(s))?;
    let hi = hi.trim().parse().map_err(|_| bad_num(s))?;
    if hi < lo {
        return Err(crate::Error::InvalidArgument(format!("empty range {s:?}")));
    }
    Ok((lo, hi))
}

fn bad_num(s: &str) -> crate::Error {
    crate::Error::InvalidArgument(format!("could not parse number in {s:?}"))
}

fn parse_rational_list(s: &str) -> crate::Result<Vec<Rational>> {
    s.split(',').map(|t| rational_from_string(t.trim())).collect()
}

/// Strip a unit suffix like "cm3", "s", "kg", "cm" from a numeric flag.
fn parse_unit_value(s: &str, prec: u32) -> crate::Result<BigFloat> {
    let t = s.trim();
    let stripped = ["cm3", "cm^3", "kg", "cm", "s"]
        .iter()
        .find_map(|suffix| t.strip_suffix(suffix))
        .unwrap_or(t);
    BigFloat::parse(stripped.trim(), prec)
}

fn operator_sequence(
    cli: &Cli,
    cache: Option<&Cache>,
    operator: &str,
    n_range: &str,
) -> crate::Result<(BuiltinOperator, analysis::BoundSequence)> {
    let op = BuiltinOperator::parse(operator)?;
    let (lo, hi) = parse_range(n_range, "..")?;
    let table = load_or_build_table(op, 2 * hi - 1, cache)?;
    let seq = analysis::bound_sequence(&table, lo, hi, cli.digits)?;
    Ok((op, seq))
}

fn cmd_moments(
    cli: &Cli,
    cache: Option<&Cache>,
    operator: &str,
    n_max: usize,
) -> crate::Result<String> {
    let op = BuiltinOperator::parse(operator)?;
    let table = load_or_build_table(op, n_max, cache)?;
    Ok(match cli.format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&io::MomentTableJson::from_table(&table))?;
            s.push('\n');
            s
        }
        OutputFormat::Csv => io::moments_csv(&table),
    })
}

fn cmd_lower_bound(
    cli: &Cli,
    cache: Option<&Cache>,
    operator: &str,
    n_range: &str,
    accelerate: &Option<String>,
    extrapolate: &Option<String>,
    window: &str,
) -> crate::Result<String> {
    let (_, seq) = operator_sequence(cli, cache, operator, n_range)?;
    let mut out = io::bound_sequence_csv(&seq);
    if let Some(ks) = accelerate {
        let ks = parse_rational_list(ks)?;
        let chain = analysis::accelerate_chain(&seq.pairs(), &ks)?;
        out.push_str("\nN,accelerated\n");
        for (n, v) in chain {
            out.push_str(&format!("{},{}\n", n, v.format_fixed(cli.digits)));
        }
    }
    if let Some(exps) = extrapolate {
        let exps = parse_rational_list(exps)?;
        let win = parse_range(window, ":")?;
        let fit = analysis::extrapolate_fit(&seq.pairs(), &exps, win)?;
        out.push_str(&format!(
            "\ny_infinity,{}\nmax_residual,{}\n",
            fit.y_infinity.to_string_sig(cli.digits),
            fit.max_residual.to_string_sig(8),
        ));
    }
    Ok(out)
}

fn cmd_accelerate(
    cli: &Cli,
    cache: Option<&Cache>,
    operator: &str,
    n_range: &str,
    ks: &str,
) -> crate::Result<String> {
    let (_, seq) = operator_sequence(cli, cache, operator, n_range)?;
    let ks = parse_rational_list(ks)?;
    let chain = analysis::accelerate_chain(&seq.pairs(), &ks)?;
    let mut out = String::from("N,accelerated\n");
    for (n, v) in chain {
        out.push_str(&format!("{},{}\n", n, v.format_fixed(cli.digits)));
    }
    Ok(out)
}

fn cmd_extrapolate(
    cli: &Cli,
    cache: Option<&Cache>,
    operator: &str,
    n_range: &str,
    exponents: &str,
    window: &str,
) -> crate::Result<String> {
    let (op, seq) = operator_sequence(cli, cache, operator, n_range)?;
    let exps = parse_rational_list(exponents)?;
    let win = parse_range(window, ":")?;
    let fit = analysis::extrapolate_fit(&seq.pairs(), &exps, win)?;
    let doc = json!({
        "operator": op.name(),
        "window": [win.0, win.1],
        "exponents": exps.iter().map(crate::arith::rational_to_string).collect::<Vec<_>>(),
        "coefficients": fit.coefficients.iter().map(|c| c.to_string_sig(cli.digits)).collect::<Vec<_>>(),
        "y_infinity": fit.y_infinity.to_string_sig(cli.digits),
        "max_residual": fit.max_residual.to_string_sig(8),
    });
    Ok(format!("{}\n", serde_json::to_string_pretty(&doc)?))
}

fn cmd_tail(
    cli: &Cli,
    cache: Option<&Cache>,
    operator: &str,
    n_pair: &str,
    n_max: Option<usize>,
) -> crate::Result<String> {
    let op = BuiltinOperator::parse(operator)?;
    let (n_a, n_c) = parse_range(n_pair, ",")?;
    let depth = n_max.unwrap_or_else(|| n_c.max(n_a + 1));
    let table = load_or_build_table(op, depth, cache)?;
    let tail = dist::tail_fit(&table, (n_a, n_c), cli.digits)?;
    let doc = json!({
        "operator": op.name(),
        "calibration_pair": [n_a, n_c],
        "c0": tail.c0.to_string_sig(cli.digits),
        "a": tail.a.to_string_sig(cli.digits),
        "b": tail.b,
        "c": crate::arith::rational_to_string(&tail.c),
    });
    Ok(format!("{}\n", serde_json::to_string_pretty(&doc)?))
}

fn cmd_fit(
    cli: &Cli,
    cache: Option<&Cache>,
    n_max: usize,
    tol: f64,
    grid: &str,
) -> crate::Result<String> {
    let fit = dist::FitParams::rho_em_reference(cli.digits.max(30));
    let moments = dist::model_fit_moments(&fit, n_max, tol)?;
    let table = load_or_build_table(BuiltinOperator::RhoEM, n_max, cache)?;
    let mut out = String::from("n,model_moment,fractional_error\n");
    for (n, m) in moments.iter().enumerate() {
        let exact = table.a(n);
        use num_traits::Zero;
        let err = if exact.is_zero() {
            "n/a".to_string()
        } else {
            let e = BigFloat::from_rational(exact, 20);
            m.sub(&e).div(&e).to_string_sig(6)
        };
        out.push_str(&format!("{},{},{}\n", n, m.to_string_sig(9), err));
    }
    // density samples for external plotting
    let parts: Vec<&str> = grid.split(':').collect();
    if parts.len() != 3 {
        return Err(crate::Error::InvalidArgument(format!("grid must be lo:hi:steps, got {grid:?}")));
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad_num(grid))?;
    let hi: f64 = parts[1].parse().map_err(|_| bad_num(grid))?;
    let steps: usize = parts[2].parse().map_err(|_| bad_num(grid))?;
    out.push_str("\nx,P_fit\n");
    for i in 0..=steps {
        let x = lo + (hi - lo) * i as f64 / steps as f64;
        out.push_str(&format!("{:.8e},{:.8e}\n", x, dist::fit_pdf_value(&fit, x)));
    }
    Ok(out)
}

fn cmd_cdf(
    cli: &Cli,
    cache: Option<&Cache>,
    operator: &str,
    lambda_grid: &str,
    n_max: usize,
) -> crate::Result<String> {
    let op = BuiltinOperator::parse(operator)?;
    let table = load_or_build_table(op, n_max, cache)?;
    let tail = dist::tail_fit(&table, (n_max - 1, n_max), cli.digits)?;
    let parts: Vec<&str> = lambda_grid.split(':').collect();
    if parts.len() != 3 {
        return Err(crate::Error::InvalidArgument(format!(
            "lambda grid must be lo:hi:steps, got {lambda_grid:?}"
        )));
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad_num(lambda_grid))?;
    let hi: f64 = parts[1].parse().map_err(|_| bad_num(lambda_grid))?;
    let steps: usize = parts[2].parse().map_err(|_| bad_num(lambda_grid))?;
    if lo <= 0.0 || hi < lo {
        return Err(crate::Error::InvalidArgument("lambda grid must be positive".into()));
    }
    let mut out = String::from("lambda,moment_bound,asymptotic_bound\n");
    for i in 0..=steps {
        let frac = if steps == 0 { 0.0 } else { i as f64 / steps as f64 };
        let lam_f = lo * (hi / lo).powf(frac);
        let lam = BigFloat::from_f64(lam_f, cli.digits);
        let discrete = dist::cdf_upper_bound(&table, &lam);
        let asym = dist::cdf_asymptotic_bound(&tail, &lam);
        out.push_str(&format!(
            "{:.6e},{},{}\n",
            lam_f,
            discrete.to_string_sig(10),
            asym.to_string_sig(10)
        ));
    }
    Ok(out)
}

fn cmd_nucleation(
    cli: &Cli,
    volume: &str,
    time: &str,
    vt_planck: &Option<String>,
    count: &Option<String>,
    mass: &Option<String>,
) -> crate::Result<String> {
    let prec = cli.digits;
    let tail = reference_tail(prec);
    let constants = apps::PhysicalConstants::rounded(prec);
    let query = apps::NucleationQuery {
        volume_cm3: parse_unit_value(volume, prec)?,
        time_s: parse_unit_value(time, prec)?,
        four_volume_planck: vt_planck.as_ref().map(|s| BigFloat::parse(s, prec)).transpose()?,
        mass_planck: mass.as_ref().map(|s| parse_unit_value(s, prec)).transpose()?,
        expected_count: count.as_ref().map(|s| BigFloat::parse(s, prec)).transpose()?,
    };
    let a0 = apps::nucleation_exponent_coefficient(&tail);
    let vt = query.four_volume(&constants);
    let doc = if query.mass_planck.is_some() {
        let n = apps::black_hole_count(&query, &tail, &constants)?;
        json!({
            "a0": a0.to_string_sig(10),
            "vt_planck": vt.to_string_sig(10),
            "mass_planck": query.mass_planck.as_ref().expect("set").to_string_sig(10),
            "expected_count": n.to_string_sig(10),
        })
    } else {
        let m = apps::black_hole_mass_for_count(&query, &tail, &constants)?;
        json!({
            "a0": a0.to_string_sig(10),
            "vt_planck": vt.to_string_sig(10),
            "expected_count": query.expected_count.as_ref().expect("set").to_string_sig(10),
            "mass_planck": m.to_string_sig(10),
        })
    };
    Ok(format!("{}\n", serde_json::to_string_pretty(&doc)?))
}

/// Frozen electromagnetic-energy-density tail constants; identical to
/// `tail_fit` on the depth-65 table (verified by the acceptance suite).
fn reference_tail(prec: u32) -> dist::TailParams {
    let fit = dist::FitParams::rho_em_reference(prec);
    dist::TailParams { c0: fit.c0, a: fit.a, b: -2, c: rat(1, 3) }
}

fn cmd_brain(cli: &Cli, mass: &str, size: &str, time: &str) -> crate::Result<String> {
    let prec = cli.digits;
    let constants = apps::PhysicalConstants::rounded(prec);
    let e = apps::boltzmann_brain_exponent(
        &parse_unit_value(mass, prec)?,
        &parse_unit_value(size, prec)?,
        &parse_unit_value(time, prec)?,
        &constants,
    );
    let doc = json!({ "exponent": e.to_string_sig(10) });
    Ok(format!("{}\n", serde_json::to_string_pretty(&doc)?))
}

fn cmd_gamma_moments(cli: &Cli, params: &str, n_max: usize) -> crate::Result<String> {
    let vals = parse_rational_list(params)?;
    if vals.len() != 3 {
        return Err(crate::Error::InvalidArgument(
            "params must be x0,alpha,beta (three rationals)".into(),
        ));
    }
    let p = dist::ShiftedGammaParams::new(vals[0].clone(), vals[1].clone(), vals[2].clone())?;
    let moments = dist::shifted_gamma_moments(&p, n_max);
    Ok(match cli.format {
        OutputFormat::Json => {
            let doc = json!({
                "x0": crate::arith::rational_to_string(&p.x0),
                "alpha": crate::arith::rational_to_string(&p.alpha),
                "beta": crate::arith::rational_to_string(&p.beta),
                "moments": moments.iter().map(crate::arith::rational_to_string).collect::<Vec<_>>(),
            });
            format!("{}\n", serde_json::to_string_pretty(&doc)?)
        }
        OutputFormat::Csv => {
            let mut out = String::from("n,moment\n");
            for (n, m) in moments.iter().enumerate() {
                out.push_str(&format!("{},{}\n", n, crate::arith::rational_to_string(m)));
            }
            out
        }
    })
}

fn cmd_diagnostics(
    cli: &Cli,
    cache: Option<&Cache>,
    operator: &str,
    n_max: usize,
) -> crate::Result<String> {
    let op = BuiltinOperator::parse(operator)?;
    let table = load_or_build_table(op, n_max, cache)?;
    let diag = engine::growth_diagnostics(&table, cli.digits)?;
    let kt = crate::kintegrals::KTable::build(table.spec().p(), n_max.max(4) as u32)?;
    let bounds = engine::appendix_b_bounds(table.spec().p(), (n_max as u32).max(4), &kt, cli.digits)?;
    let doc = json!({
        "operator": op.name(),
        "n_max": n_max,
        "factorial_order_estimate": diag.factorial_order_estimate.to_string_sig(8),
        "hamburger_margin_last": diag.hamburger_margin.last().expect("nonempty").to_string_sig(8),
        "stieltjes_margin_last": diag.stieltjes_margin.last().expect("nonempty").to_string_sig(8),
        "dominant_term": {
            "alpha_growth": bounds.alpha_growth.to_string_sig(10),
            "beta_growth": bounds.beta_growth.to_string_sig(10),
            "j_n": crate::arith::rational_to_string(&bounds.j_n),
        },
    });
    Ok(format!("{}\n", serde_json::to_string_pretty(&doc)?))
}
