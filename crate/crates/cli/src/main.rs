use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use zeta_heights::amoeba::{self, AmoebaError};
use zeta_heights::arith::is_prime;
use zeta_heights::constants::{integral_i, log_sine_integrals, special_values};
use zeta_heights::curves::{self, CurveError, TorsionCurve, Witness};
use zeta_heights::export::{self, ExportError};
use zeta_heights::grid::{self, GridError};
use zeta_heights::quad::{QuadConfig, QuadError};
use zeta_heights::torsion::{classify_extremal, total_height, HeightError, TorsionPoint};
use zeta_heights::AmoebaPoint;

#[derive(Parser)]
#[command(name = "zeta-heights", version, about = "Heights of torsion translates of the line x0 + x1 + x2 = 0")]
struct Cli {
    /// Worker threads for grid computations (0 = all cores)
    #[arg(long, global = true, env = "ZETA_HEIGHTS_THREADS", default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridFormat {
    Csv,
    Pgm,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum WitnessKind {
    Sqrt,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Height of the point C ∩ ωC for ω = (ζ^c1, ζ^c2), ζ = exp(2πi/d)
    Height {
        #[arg(long)]
        d: u64,
        /// Residues as `c1,c2`
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        c: (i64, i64),
    },
    /// All heights at level d, written as CSV, PGM or a JSON summary
    Grid {
        #[arg(long)]
        d: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: GridFormat,
        /// Output file (stdout if absent)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Window used by the JSON summary
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    /// Per-level statistics over a range of moduli
    Stats {
        /// Inclusive range `a..b`
        #[arg(long, value_parser = parse_range)]
        range: (u64, u64),
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: TableFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Special values and the quadrature route to η
    Constants {
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Convergence of witness heights toward η, or toward η_{a,e} on a curve
    Limits {
        /// Inclusive range `a..b` of moduli
        #[arg(long, value_parser = parse_range)]
        range: (u64, u64),
        /// Keep only prime moduli
        #[arg(long)]
        primes: bool,
        /// Character of the torsion curve, as `a1,a2`
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        a: Option<(i64, i64)>,
        /// Cyclotomic index of the curve
        #[arg(long, default_value_t = 1, requires = "a")]
        e: u64,
        #[arg(long, value_enum, default_value = "sqrt")]
        witness: WitnessKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-11)]
        tol: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: TableFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Limit height η_{a,e} of a torsion curve
    Curve {
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        a: (i64, i64),
        #[arg(long, default_value_t = 1)]
        e: u64,
        #[arg(long, default_value_t = 1e-11)]
        tol: f64,
        /// Also list the d-torsion points on the curve
        #[arg(long)]
        sample: Option<u64>,
    },
    /// Amoeba of 1 + z1 + z2: membership, moments, Ronkin function
    Amoeba {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        contains: Option<(f64, f64)>,
        /// South moment of order m
        #[arg(long)]
        moment: Option<u32>,
        #[arg(long)]
        volume: bool,
        #[arg(long)]
        psi_average: bool,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        ronkin: Option<(f64, f64)>,
        /// Legendre dual of the Ronkin function at a point of the simplex
        #[arg(long, value_parser = parse_point)]
        dual: Option<(f64, f64)>,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        monge_ampere: Option<(f64, f64)>,
        /// Write Ronkin samples on an n × n lattice over [-bound, bound]² as CSV
        #[arg(long)]
        ronkin_samples: Option<usize>,
        #[arg(long, default_value_t = 5.0)]
        bound: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_pair(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `x,y`, got `{s}`"))?;
    let a = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b = b.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((a, b))
}

fn parse_point(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `x,y`, got `{s}`"))?;
    let a = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b = b.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((a, b))
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected `a..b`, got `{s}`"))?;
    let a = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b = b.trim_start_matches('=').trim().parse().map_err(|e| format!("{e}"))?;
    Ok((a, b))
}

enum Failure {
    Domain(String),
    Io(String),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<ExportError> for Failure {
    fn from(e: ExportError) -> Self {
        match e {
            ExportError::Io(e) => Failure::Io(e.to_string()),
            ExportError::Csv(e) if e.is_io_error() => Failure::Io(e.to_string()),
            other => Failure::Domain(other.to_string()),
        }
    }
}

macro_rules! domain_errors {
    ($($t:ty),*) => {
        $(impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::Domain(e.to_string())
            }
        })*
    };
}

domain_errors!(HeightError, GridError, CurveError, AmoebaError, QuadError<f64>);

fn open_out(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_json(v: &Value, out: &Option<PathBuf>) -> Result<(), Failure> {
    let mut w = open_out(out)?;
    serde_json::to_writer_pretty(&mut w, v).map_err(io::Error::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn moduli(range: (u64, u64), primes: bool) -> Result<Vec<u64>, Failure> {
    let ds: Vec<u64> = (range.0.max(2)..=range.1).filter(|&d| !primes || is_prime(d)).collect();
    if ds.is_empty() {
        return Err(Failure::Domain(format!("no moduli in {}..{}", range.0, range.1)));
    }
    Ok(ds)
}

fn cmd_height(d: u64, c: (i64, i64)) -> Result<(), Failure> {
    let pt = TorsionPoint::nontrivial(d, c.0, c.1)?;
    let h = total_height::<f64>(&pt)?;
    let (c1, c2) = pt.residues();
    print_json(
        &json!({
            "d": d,
            "c1": c1,
            "c2": c2,
            "order": pt.order(),
            "archimedean": h.archimedean,
            "nonarchimedean": h.nonarchimedean,
            "total": h.total,
            "classification": classify_extremal(&pt)?.label(),
        }),
        &None,
    )
}

fn cmd_grid(d: u64, format: GridFormat, out: &Option<PathBuf>, eps: f64, threads: usize) -> Result<(), Failure> {
    let g = grid::compute_grid::<f64>(d, threads)?;
    let mut w = open_out(out)?;
    match format {
        GridFormat::Csv => export::write_grid_csv(&g, &mut w)?,
        GridFormat::Pgm => export::write_grid_pgm(&g, &mut w)?,
        GridFormat::Json => export::write_stats_json(&grid::stats(&g, eps), &mut w)?,
    }
    w.flush()?;
    Ok(())
}

fn cmd_stats(range: (u64, u64), eps: f64, format: TableFormat, out: &Option<PathBuf>, threads: usize) -> Result<(), Failure> {
    let eta = special_values().eta;
    let mut rows = Vec::new();
    for d in moduli(range, false)? {
        let s = grid::stats(&grid::compute_grid::<f64>(d, threads)?, eps);
        rows.push(s);
    }
    let mut w = open_out(out)?;
    match format {
        TableFormat::Csv => {
            writeln!(w, "d,mean,ratio_near_eta,min,max,count_zero,mean_below_eta")?;
            for s in &rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{}",
                    s.d,
                    export::format_height(s.mean),
                    export::format_height(s.ratio_near_eta()),
                    export::format_height(s.min),
                    export::format_height(s.max),
                    s.count_zero,
                    s.mean < eta
                )?;
            }
        }
        TableFormat::Json => {
            let v: Vec<Value> = rows
                .iter()
                .map(|s| {
                    json!({
                        "d": s.d,
                        "mean": s.mean,
                        "ratio_near_eta": s.ratio_near_eta(),
                        "min": s.min,
                        "max": s.max,
                        "count_zero": s.count_zero,
                        "mean_below_eta": s.mean < eta,
                    })
                })
                .collect();
            serde_json::to_writer_pretty(&mut w, &v).map_err(io::Error::from)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_constants(tol: f64) -> Result<(), Failure> {
    let sv = special_values();
    let cfg = QuadConfig::new(tol);
    let i = integral_i(cfg)?;
    let (first, second) = log_sine_integrals(cfg)?;
    print_json(
        &json!({
            "zeta2": sv.zeta2,
            "zeta3": sv.zeta3,
            "zeta4": sv.zeta4,
            "L_chi3_2": sv.l_chi3_2,
            "eta": sv.eta,
            "theta": sv.theta,
            "integral_i": i.value,
            "integral_i_error": i.err_estimate,
            "log_sine_first": first.value,
            "log_sine_second": second.value,
        }),
        &None,
    )
}

#[allow(clippy::too_many_arguments)]
fn cmd_limits(
    range: (u64, u64),
    primes: bool,
    a: Option<(i64, i64)>,
    e: u64,
    witness: WitnessKind,
    seed: u64,
    tol: f64,
    format: TableFormat,
    out: &Option<PathBuf>,
) -> Result<(), Failure> {
    let curve = a.map(|a| TorsionCurve::new(a, e)).transpose()?;
    let ds: Vec<u64> = moduli(range, primes)?
        .into_iter()
        .filter(|d| curve.map_or(true, |c| d % c.index() == 0))
        .collect();
    let witness = match witness {
        WitnessKind::Sqrt => Witness::Sqrt,
        WitnessKind::Random => Witness::Random { seed },
    };
    let rows = curves::limit_experiment(curve.as_ref(), &ds, witness, QuadConfig::new(tol))?;
    let mut w = open_out(out)?;
    match format {
        TableFormat::Csv => {
            writeln!(w, "d,c1,c2,order,height,limit,gap,relation_norm")?;
            for r in &rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{}",
                    r.d,
                    r.c1,
                    r.c2,
                    r.order,
                    export::format_height(r.height),
                    export::format_height(r.limit),
                    export::format_height(r.gap),
                    r.relation_norm
                )?;
            }
        }
        TableFormat::Json => {
            serde_json::to_writer_pretty(&mut w, &rows).map_err(io::Error::from)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_curve(a: (i64, i64), e: u64, tol: f64, sample: Option<u64>) -> Result<(), Failure> {
    let curve = TorsionCurve::new(a, e)?;
    let r = curves::eta_ae(&curve, QuadConfig::new(tol))?;
    let mut v = json!({
        "a1": a.0,
        "a2": a.1,
        "e": e,
        "eta_ae": r.value,
        "err_estimate": r.err_estimate,
    });
    if let Some(d) = sample {
        let pts: Vec<(u64, u64)> = curves::sample_on_curve(&curve, d)?.iter().map(|p| p.residues()).collect();
        v["d"] = json!(d);
        v["strictness_ratio"] = json!(curves::strictness_ratio(a, d)?.to_string());
        v["points"] = json!(pts);
    }
    print_json(&v, &None)
}

#[allow(clippy::too_many_arguments)]
fn cmd_amoeba(
    contains: Option<(f64, f64)>,
    moment: Option<u32>,
    volume: bool,
    psi_average: bool,
    ronkin: Option<(f64, f64)>,
    dual: Option<(f64, f64)>,
    monge_ampere: Option<(f64, f64)>,
    ronkin_samples: Option<usize>,
    bound: f64,
    tol: f64,
    out: &Option<PathBuf>,
) -> Result<(), Failure> {
    let cfg = QuadConfig::new(tol);
    if let Some(n) = ronkin_samples {
        if n < 2 || !(bound > 0.0) {
            return Err(Failure::Domain("need at least 2 samples per axis and a positive bound".into()));
        }
        let mut w = open_out(out)?;
        writeln!(w, "u1,u2,ronkin,psi,inside")?;
        for i in 0..n {
            for j in 0..n {
                let step = 2.0 * bound / (n - 1) as f64;
                let u = AmoebaPoint::new(-bound + step * j as f64, -bound + step * i as f64);
                let r = amoeba::ronkin(u, cfg)?;
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    export::format_height(u.u1),
                    export::format_height(u.u2),
                    export::format_height(r),
                    export::format_height(amoeba::psi(u)),
                    amoeba::contains(u)
                )?;
            }
        }
        w.flush()?;
        return Ok(());
    }

    let mut v = serde_json::Map::new();
    if let Some((u1, u2)) = contains {
        let u = AmoebaPoint::new(u1, u2);
        v.insert("contains".into(), json!(amoeba::contains(u)));
        v.insert("region".into(), json!(amoeba::region(u)));
    }
    if let Some(m) = moment {
        let r = amoeba::south_moment(m, cfg)?;
        v.insert("moment".into(), json!(m));
        v.insert("value".into(), json!(r.value));
        v.insert("err_estimate".into(), json!(r.err_estimate));
    }
    if volume {
        v.insert("volume".into(), json!(amoeba::volume(cfg)?));
    }
    if psi_average {
        v.insert("psi_integral".into(), json!(amoeba::psi_integral(cfg)?));
        v.insert("psi_average".into(), json!(amoeba::psi_average(cfg)?));
    }
    if let Some((u1, u2)) = ronkin {
        let u = AmoebaPoint::new(u1, u2);
        v.insert("ronkin".into(), json!(amoeba::ronkin(u, cfg)?));
        v.insert("psi".into(), json!(amoeba::psi(u)));
    }
    if let Some(x) = dual {
        v.insert("dual".into(), json!(amoeba::legendre_dual(x, cfg)?));
    }
    if let Some((u1, u2)) = monge_ampere {
        let m = amoeba::monge_ampere_density(AmoebaPoint::new(u1, u2), 1e-2, QuadConfig::new(1e-14))?;
        v.insert("monge_ampere".into(), json!(m));
    }
    if v.is_empty() {
        v.insert("volume".into(), json!(amoeba::volume(cfg)?));
        v.insert("psi_integral".into(), json!(amoeba::psi_integral(cfg)?));
        v.insert("psi_average".into(), json!(amoeba::psi_average(cfg)?));
    }
    print_json(&Value::Object(v), out)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let threads = cli.threads;
    match cli.command {
        Command::Height { d, c } => cmd_height(d, c),
        Command::Grid { d, format, out, eps } => cmd_grid(d, format, &out, eps, threads),
        Command::Stats { range, eps, format, out } => cmd_stats(range, eps, format, &out, threads),
        Command::Constants { tol } => cmd_constants(tol),
        Command::Limits {
            range,
            primes,
            a,
            e,
            witness,
            seed,
            tol,
            format,
            out,
        } => cmd_limits(range, primes, a, e, witness, seed, tol, format, &out),
        Command::Curve { a, e, tol, sample } => cmd_curve(a, e, tol, sample),
        Command::Amoeba {
            contains,
            moment,
            volume,
            psi_average,
            ronkin,
            dual,
            monge_ampere,
            ronkin_samples,
            bound,
            tol,
            out,
        } => cmd_amoeba(
            contains,
            moment,
            volume,
            psi_average,
            ronkin,
            dual,
            monge_ampere,
            ronkin_samples,
            bound,
            tol,
            &out,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
