use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use zft_core::apoly::{apoly_factor, apoly_factor_with_order, APolyResult};
use zft_core::closed::{reduce_with, ClosedFormView};
use zft_core::nz::{choose_quad, gluing_matrices, IntMatrix, NzData, ReducedNz, SymplecticCheck};
use zft_core::reduce::{ReduceError, ReduceOptions};
use zft_core::tri::{parse_triangulation, Triangulation};
use zft_core::verify::{verify, VerifyConfig, VerifyReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "zft", version, about = "Triangulation gluing data, A-polynomials and state-integral reduction")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, global = true, value_enum, default_value = "text", env = "ZFT_FORMAT")]
    format: Format,

    /// Seed for the numeric oracle.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Support samples (values of M) drawn by `verify`.
    #[arg(long, global = true, default_value_t = 100)]
    samples: usize,

    /// Residual tolerance for `verify`.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,

    /// Invert shapes of negative tetrahedra when building gluing equations.
    #[arg(long, global = true, default_value_t = true, action = clap::ArgAction::Set)]
    invert_negative: bool,

    /// Edge (index or name) fixed to 1 by `reduce`.
    #[arg(long, global = true)]
    gauge: Option<String>,

    /// Comma-separated tetrahedron order: delta priority for `reduce`,
    /// elimination order for `apoly`.
    #[arg(long, global = true, value_delimiter = ',')]
    order: Option<Vec<usize>>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and summarize a .zft file.
    Parse { input: PathBuf },
    /// Neumann–Zagier matrices, symplectic check and quad choice.
    Nz { input: PathBuf },
    /// Eliminate shapes to an A-polynomial factor.
    Apoly { input: PathBuf },
    /// Reduce the state integral to a closed form.
    Reduce { input: PathBuf },
    /// Reduce, eliminate, and cross-check numerically.
    Verify { input: PathBuf },
}

enum Failure {
    /// Bad file, syntax or option: exit 2.
    Input { kind: &'static str, message: String },
    /// A computation or check failed: exit 1.
    Check { kind: &'static str, message: String },
}

#[derive(Serialize)]
struct ErrorOut<'a> {
    error: &'a str,
    message: &'a str,
}

struct Emit {
    text: String,
    json: String,
    pass: bool,
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable report")
}

fn load(path: &PathBuf) -> Result<Triangulation, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input {
        kind: "io",
        message: if e.kind() == std::io::ErrorKind::NotFound {
            format!("file not found: {}", path.display())
        } else {
            format!("{}: {e}", path.display())
        },
    })?;
    parse_triangulation(&text).map_err(|e| Failure::Input {
        kind: "parse",
        message: format!("{}: {e}", path.display()),
    })
}

fn matrix_text(name: &str, m: &IntMatrix) -> String {
    let mut out = format!("{name}:\n");
    for row in m {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>3}")).collect();
        out.push_str(&format!("  [{} ]\n", cells.join("")));
    }
    out
}

#[derive(Serialize)]
struct ParseOut<'a> {
    triangulation: &'a Triangulation,
    edge_valences: Vec<usize>,
    all_positive: bool,
}

fn cmd_parse(tri: &Triangulation) -> Emit {
    let out = ParseOut {
        triangulation: tri,
        edge_valences: tri.edge_valences(),
        all_positive: tri.all_positive(),
    };
    let signs: String = tri.tets.iter().map(|t| if t.is_positive() { '+' } else { '-' }).collect();
    let edges: Vec<String> = tri
        .edge_names
        .iter()
        .zip(&out.edge_valences)
        .map(|(n, v)| format!("{n} (valence {v})"))
        .collect();
    let text = format!(
        "tetrahedra: {} [{signs}]\nedges: {}\nmeridian: {:?}\nlongitude: {:?}\n",
        tri.tet_count(),
        edges.join(", "),
        tri.meridian.coefficients,
        tri.longitude.coefficients
    );
    Emit {
        text,
        json: json(&out),
        pass: true,
    }
}

#[derive(Serialize)]
struct NzOut {
    #[serde(flatten)]
    nz: NzData,
    column_sums: [Vec<i64>; 3],
    column_sums_ok: bool,
    symplectic: SymplecticCheck,
    reduced: Option<ReducedNz>,
    quad_error: Option<String>,
}

fn cmd_nz(tri: &Triangulation) -> Emit {
    let nz = gluing_matrices(tri);
    let column_sums = nz.column_sums();
    let column_sums_ok = column_sums.iter().flatten().all(|&s| s == 2);
    let symplectic = nz.check_symplectic();
    let (reduced, quad_error) = match choose_quad(&nz) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let pass = column_sums_ok && symplectic.symmetric && reduced.is_some();
    let mut text = String::new();
    for (name, m) in [("A", &nz.a), ("B", &nz.b), ("C", &nz.c), ("A'", &nz.a_prime), ("B'", &nz.b_prime)] {
        text.push_str(&matrix_text(name, m));
    }
    text.push_str(&format!("column sums A+B+C = 2: {column_sums_ok}\n"));
    text.push_str(&format!("A'B'^T symmetric: {}\n", symplectic.symmetric));
    match (&reduced, &quad_error) {
        (Some(r), _) => text.push_str(&format!(
            "quad {:?}, dropped edge row {}, det B_red = {}\n",
            r.quad.rotation, r.dropped_edge_row, r.det_b_red
        )),
        (None, Some(e)) => text.push_str(&format!("quad: {e}\n")),
        (None, None) => {}
    }
    let out = NzOut {
        nz,
        column_sums,
        column_sums_ok,
        symplectic,
        reduced,
        quad_error,
    };
    Emit {
        text,
        json: json(&out),
        pass,
    }
}

fn apoly_text(r: &APolyResult) -> String {
    let mut text = format!("factor: {}\n", r.factor_text);
    text.push_str(&format!("elimination order: {:?}\n", r.order));
    text.push_str(&format!("invert negative: {}\n", r.invert_negative));
    for d in &r.discarded {
        text.push_str(&format!("discarded {} ({})\n", d.factor, d.reason));
    }
    text
}

fn cmd_apoly(tri: &Triangulation, cli: &Cli) -> Result<Emit, Failure> {
    let r = match &cli.order {
        Some(order) => apoly_factor_with_order(tri, cli.invert_negative, order),
        None => apoly_factor(tri, cli.invert_negative),
    };
    let r = r.map_err(|e| match e {
        zft_core::apoly::ApolyError::BadOrder(_) => Failure::Input {
            kind: "option",
            message: e.to_string(),
        },
        _ => Failure::Check {
            kind: "elimination",
            message: e.to_string(),
        },
    })?;
    let mut text = apoly_text(&r);
    text.push_str(&format!("time: {:.3} s\n", r.seconds));
    Ok(Emit {
        text,
        json: json(&r),
        pass: true,
    })
}

fn gauge_index(tri: &Triangulation, gauge: &Option<String>) -> Result<Option<usize>, Failure> {
    let Some(g) = gauge else { return Ok(None) };
    if let Some(i) = tri.edge_names.iter().position(|n| n == g) {
        return Ok(Some(i));
    }
    g.parse().map(Some).map_err(|_| Failure::Input {
        kind: "option",
        message: format!("unknown gauge edge {g:?} (edges: {})", tri.edge_names.join(", ")),
    })
}

#[derive(Serialize)]
struct ReduceOut {
    #[serde(flatten)]
    closed_form: ClosedFormView,
    gauge: String,
    order: Vec<usize>,
    trace: Vec<String>,
}

fn cmd_reduce(tri: &Triangulation, cli: &Cli) -> Result<Emit, Failure> {
    let opts = ReduceOptions {
        gauge: gauge_index(tri, &cli.gauge)?,
        delta_order: cli.order.clone(),
    };
    let r = reduce_with(tri, &opts).map_err(|e| match e {
        ReduceError::BadOption(m) => Failure::Input {
            kind: "option",
            message: m,
        },
        e => {
            let mut message = e.to_string();
            for line in e.trace() {
                message.push_str(&format!("\n  {line}"));
            }
            Failure::Check {
                kind: "reduction",
                message,
            }
        }
    })?;
    let view = r.closed.view();
    let gauge = opts.gauge.unwrap_or(tri.edge_count() - 1);
    let mut text = String::new();
    for line in r.trace() {
        text.push_str(line);
        text.push('\n');
    }
    text.push_str(&format!("prefactor: {}\n", view.prefactor_text));
    for s in &view.spurious {
        text.push_str(&format!("removed spurious factor: {s}\n"));
    }
    text.push_str(&format!("{}\n", view.apoly_presentation));
    text.push_str(&format!("delta: {}\n", view.delta));
    let out = ReduceOut {
        closed_form: view,
        gauge: tri.edge_names[gauge].clone(),
        order: opts.delta_order.unwrap_or_else(|| (0..tri.tet_count()).collect()),
        trace: r.trace().to_vec(),
    };
    Ok(Emit {
        text,
        json: json(&out),
        pass: true,
    })
}

fn verify_text(r: &VerifyReport) -> String {
    let mut text = format!("A-polynomial factor: {}\n", r.apoly.factor_text);
    text.push_str(&format!("closed form: {} delta({})\n", r.closed_form.prefactor_text, r.closed_form.delta));
    text.push_str(&format!("seed: {}\n", r.report.seed));
    for c in &r.report.checks {
        let tag = if c.pass { "PASS" } else { "FAIL" };
        text.push_str(&format!("[{tag}] {} (samples {}, value {:e})", c.name, c.samples, c.max_error));
        if !c.detail.is_empty() {
            text.push_str(&format!(": {}", c.detail));
        }
        text.push('\n');
    }
    text.push_str(if r.pass { "verify: pass\n" } else { "verify: FAIL\n" });
    text
}

fn cmd_verify(tri: &Triangulation, cli: &Cli) -> Result<Emit, Failure> {
    if cli.tol.is_nan() || cli.tol <= 0.0 || cli.samples == 0 {
        return Err(Failure::Input {
            kind: "option",
            message: "--samples must be positive and --tol > 0".into(),
        });
    }
    let cfg = VerifyConfig {
        samples: cli.samples,
        tol: cli.tol,
        seed: cli.seed,
        invert_negative: cli.invert_negative,
        ..VerifyConfig::default()
    };
    let r = verify(tri, &cfg).map_err(|message| Failure::Check {
        kind: "verify",
        message,
    })?;
    Ok(Emit {
        text: verify_text(&r),
        json: json(&r),
        pass: r.pass,
    })
}

fn run(cli: &Cli) -> Result<Emit, Failure> {
    let input = match &cli.command {
        Command::Parse { input }
        | Command::Nz { input }
        | Command::Apoly { input }
        | Command::Reduce { input }
        | Command::Verify { input } => input,
    };
    let tri = load(input)?;
    match &cli.command {
        Command::Parse { .. } => Ok(cmd_parse(&tri)),
        Command::Nz { .. } => Ok(cmd_nz(&tri)),
        Command::Apoly { .. } => cmd_apoly(&tri, cli),
        Command::Reduce { .. } => cmd_reduce(&tri, cli),
        Command::Verify { .. } => cmd_verify(&tri, cli),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(out) => {
            // a closed pipe (e.g. `| head`) is not an error worth a panic
            let mut stdout = std::io::stdout().lock();
            let _ = match cli.format {
                Format::Text => write!(stdout, "{}", out.text),
                Format::Json => writeln!(stdout, "{}", out.json),
            };
            ExitCode::from(if out.pass { 0 } else { 1 })
        }
        Err(f) => {
            let (code, kind, message) = match f {
                Failure::Input { kind, message } => (2, kind, message),
                Failure::Check { kind, message } => (1, kind, message),
            };
            match cli.format {
                Format::Text => eprintln!("error ({kind}): {message}"),
                Format::Json => println!("{}", json(&ErrorOut { error: kind, message: &message })),
            }
            ExitCode::from(code)
        }
    }
}
