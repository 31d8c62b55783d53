//! `twistlight`: command-line surface over the twisted-plate engine.
//!
//! Eight commands: `derive` and `apply` print symbolic objects and actions,
//! `phase` evaluates projection phases, `concurrence` and `cascade` walk the
//! antenna elements, `sweep` emits the concurrence-surface CSV, `audit` runs
//! the printed-line convention audit, and `selftest` runs the randomized
//! identity suite.  All output is deterministic for a fixed seed.

mod parse;
mod render;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use parse::{cli_context, convention, ket, numeric_expr, object, Object};
use twistlight::cascade::{array_factor, build_array, phase_args, propagate};
use twistlight::entangle::{
    closed_form_c, concurrence_report, i_concurrence, i_concurrence_from_spectrum, ElementTag,
};
use twistlight::geophase::pancharatnam;
use twistlight::jones::Convention;
use twistlight::oracle::{
    convention_audit, no_global_convention, run_identity_suite, DEFAULT_SAMPLES,
};
use twistlight::states::{apply, named_ket, oam_spectrum, state_report, KetName};
use twistlight::symphase::{AngleValues, SymbolicScalar};

/// Exact symbolic engine for polarized light through twisted birefringent
/// plates: derivations, geometric phases, concurrence surfaces, and the
/// printed-line convention audit.
#[derive(Parser)]
#[command(name = "twistlight", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Convention label: `default` or one of +1L,+1R,+iL,+iR,-1L,-1R,-iL,-iR.
    #[arg(long, global = true, default_value = "default", allow_hyphen_values = true)]
    convention: String,

    /// Birefringence model: `inv-sin` (η = 1/sin θ) or `const:<v>`.
    #[arg(long, global = true, default_value = "inv-sin")]
    eta_model: String,

    /// Seed for the sampled commands (audit, selftest).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format; each command has a natural default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Comma-separated rows (the `sweep` contract).
    Csv,
    /// Human-readable report.
    Text,
    /// JSON with exact rationals rendered as strings.
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Pretty-print a named symbolic object with its exact term serialization.
    Derive {
        /// Object name, e.g. `n`, `h(vartheta)`, `qhq(vartheta,alpha)`, `hprime`.
        object: String,
    },
    /// Apply a matrix object to a named ket and report the resulting state.
    Apply {
        /// Matrix object (same grammar as `derive`).
        op: String,
        /// Input ket: h, v, l, r.
        ket: String,
    },
    /// Projection phase ⟨ψ|U|ψ⟩ of a matrix object on a named ket.
    Phase {
        /// Matrix object (same grammar as `derive`).
        op: String,
        /// Input ket: h, v, l, r.
        ket: String,
        /// Numeric value for the `vartheta` symbol.
        #[arg(long, default_value = "pi/4", allow_hyphen_values = true)]
        vartheta: String,
        /// Numeric value for the `alpha` symbol.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        alpha: String,
        /// Numeric value for the `omega` symbol.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        omega: String,
        /// Numeric value for the `beta` symbol.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        beta: String,
        /// Numeric value for the `theta` symbol (drives η under inv-sin).
        #[arg(long, default_value = "pi/2", allow_hyphen_values = true)]
        theta: String,
        /// Numeric value for the `phi` symbol.
        #[arg(long, default_value = "pi/2", allow_hyphen_values = true)]
        phi: String,
    },
    /// Side-by-side concurrence strategies for one cascade element's output.
    Concurrence {
        /// 1-based element index (1 and 2 carry published closed forms).
        #[arg(long, default_value_t = 1)]
        element: usize,
        /// Twist angle at which the strategies are evaluated.
        #[arg(long, default_value = "pi/4", allow_hyphen_values = true)]
        vartheta: String,
        /// Polar angle driving η under inv-sin.
        #[arg(long, default_value = "pi/2", allow_hyphen_values = true)]
        theta: String,
    },
    /// Propagate |h⟩ through n cascade elements and report every step.
    Cascade {
        /// Number of elements.
        #[arg(long, default_value_t = 3)]
        elements: usize,
        /// Twist angle at which numeric columns are evaluated.
        #[arg(long, default_value = "pi/4", allow_hyphen_values = true)]
        vartheta: String,
        /// Polar angle driving η under inv-sin.
        #[arg(long, default_value = "pi/2", allow_hyphen_values = true)]
        theta: String,
        /// Element spacing d/λ; adds the array-factor table over ψ ∈ [−π/2, π/2].
        #[arg(long)]
        spacing_over_lambda: Option<f64>,
    },
    /// Emit the concurrence-surface CSV over a (θ, ϑ) grid.
    Sweep {
        /// Twist-angle grid start.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        vartheta_start: String,
        /// Twist-angle grid end (inclusive).
        #[arg(long, default_value = "pi", allow_hyphen_values = true)]
        vartheta_end: String,
        /// Twist-angle grid step.
        #[arg(long, default_value = "pi/180", allow_hyphen_values = true)]
        vartheta_step: String,
        /// Polar-angle grid start.
        #[arg(long, default_value = "0.05", allow_hyphen_values = true)]
        theta_start: String,
        /// Polar-angle grid end (inclusive); defaults to π − 0.05.
        #[arg(long, allow_hyphen_values = true)]
        theta_end: Option<String>,
        /// Polar-angle grid step.
        #[arg(long, default_value = "pi/180", allow_hyphen_values = true)]
        theta_step: String,
    },
    /// Audit every registered printed line against the engine; emit the ledger.
    Audit {
        /// Random sample points per comparison.
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
    },
    /// Run the randomized identity suite; nonzero exit if any check fails.
    Selftest {
        /// Random cases per identity.
        #[arg(long, default_value_t = 1000)]
        cases: usize,
    },
}

/// How η is produced from the polar angle θ.
enum EtaModel {
    /// η = 1/sin θ (the physical ellipticity model).
    InvSin,
    /// Fixed positive η for every row.
    Const(f64),
}

impl EtaModel {
    fn parse(s: &str) -> Result<Self, String> {
        if s == "inv-sin" {
            return Ok(EtaModel::InvSin);
        }
        if let Some(v) = s.strip_prefix("const:") {
            let v: f64 = v
                .parse()
                .map_err(|_| format!("bad η value in `{s}`"))?;
            if !(v > 0.0) {
                return Err(format!("η must be positive, got {v}"));
            }
            return Ok(EtaModel::Const(v));
        }
        Err(format!("unknown η model `{s}` (known: inv-sin, const:<v>)"))
    }

    fn eta(&self, theta: f64) -> Result<f64, String> {
        match self {
            EtaModel::Const(v) => Ok(*v),
            EtaModel::InvSin => {
                let s = theta.sin();
                if s <= 1e-9 {
                    return Err(format!(
                        "theta = {theta} leaves 1/sin(theta) singular or nonpositive"
                    ));
                }
                Ok(1.0 / s)
            }
        }
    }
}

const SWEEP_HEADER: &str = "theta,vartheta,eta,C_paper_h1,C_paper_h2_re,C_paper_h2_im,\
                            C_engine_sumalpha2_h1,C_engine_sumalpha2_h2,C_iconc_h1,C_iconc_h2";

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> Result<(), String> {
    let conv = convention(&cli.convention)?;
    let model = EtaModel::parse(&cli.eta_model)?;
    match &cli.command {
        Command::Derive { object } => cmd_derive(cli, conv, object),
        Command::Apply { op, ket } => cmd_apply(cli, conv, op, ket),
        Command::Phase {
            op,
            ket,
            vartheta,
            alpha,
            omega,
            beta,
            theta,
            phi,
        } => cmd_phase(
            cli,
            conv,
            &model,
            op,
            ket,
            [vartheta, alpha, omega, beta, theta, phi],
        ),
        Command::Concurrence {
            element,
            vartheta,
            theta,
        } => cmd_concurrence(cli, conv, &model, *element, vartheta, theta),
        Command::Cascade {
            elements,
            vartheta,
            theta,
            spacing_over_lambda,
        } => cmd_cascade(
            cli,
            conv,
            &model,
            *elements,
            vartheta,
            theta,
            *spacing_over_lambda,
        ),
        Command::Sweep {
            vartheta_start,
            vartheta_end,
            vartheta_step,
            theta_start,
            theta_end,
            theta_step,
        } => cmd_sweep(
            cli,
            conv,
            &model,
            [vartheta_start, vartheta_end, vartheta_step],
            [theta_start, theta_end.as_deref().unwrap_or(""), theta_step],
            theta_end.is_some(),
        ),
        Command::Audit { samples } => cmd_audit(cli, *samples),
        Command::Selftest { cases } => cmd_selftest(cli, *cases),
    }
}

// ---------------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------------

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn pretty_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("in-memory JSON serialization");
    s.push('\n');
    s
}

fn push_exact_block(out: &mut String, label: &str, s: &SymbolicScalar, names: &[String]) {
    let lines = render::exact_terms(s, names);
    if lines.is_empty() {
        let _ = writeln!(out, "  {label}: (zero)");
        return;
    }
    let _ = writeln!(out, "  {label}:");
    for line in lines {
        let _ = writeln!(out, "    {line}");
    }
}

/// Inclusive index-based grid: `start + i·step` while the value stays within
/// `end` (plus a relative guard so a step that lands on `end` is kept).
fn grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>, String> {
    if !(step > 0.0) {
        return Err(format!("grid step must be positive, got {step}"));
    }
    if end + 1e-12 < start {
        return Err(format!("empty grid range [{start}, {end}]"));
    }
    let n = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| start + i as f64 * step).collect())
}

fn lib_err(e: twistlight::Error) -> String {
    e.to_string()
}

// ---------------------------------------------------------------------------
// derive / apply / phase
// ---------------------------------------------------------------------------

fn cmd_derive(cli: &Cli, conv: Convention, object_name: &str) -> Result<(), String> {
    let ctx = cli_context();
    let names = ctx.names().to_vec();
    let obj = object(&ctx, object_name, conv)?;
    let format = cli.format.unwrap_or(Format::Text);
    let content = match (&obj, format) {
        (_, Format::Csv) => {
            return Err("`derive` has no CSV form; use --format text or structured".into())
        }
        (Object::Matrix(m), Format::Text) => {
            let mut out = String::new();
            let _ = writeln!(out, "object: {object_name}  (convention {})", conv.label());
            let _ = writeln!(out, "matrix entries (trig-grouped):");
            for r in 0..2 {
                for c in 0..2 {
                    let _ = writeln!(out, "  [{r}][{c}] = {}", m.entry(r, c));
                }
            }
            let _ = writeln!(out, "exact terms:");
            for r in 0..2 {
                for c in 0..2 {
                    push_exact_block(&mut out, &format!("[{r}][{c}]"), m.entry(r, c), &names);
                }
            }
            out
        }
        (Object::State(s), Format::Text) => {
            let mut out = String::new();
            let _ = writeln!(out, "object: {object_name}  (convention {})", conv.label());
            let sym = ctx.symbol("vartheta").map_err(lib_err)?;
            out.push_str(&state_report(s, &sym, conv).map_err(lib_err)?);
            let _ = writeln!(out, "exact terms:");
            push_exact_block(&mut out, "|h>", s.amp0(), &names);
            push_exact_block(&mut out, "|v>", s.amp1(), &names);
            out
        }
        (Object::Matrix(m), Format::Structured) => pretty_json(&json!({
            "object": object_name,
            "convention": conv.label(),
            "matrix": render::matrix_json(m, &names),
        })),
        (Object::State(s), Format::Structured) => pretty_json(&json!({
            "object": object_name,
            "convention": conv.label(),
            "state": render::state_json(s, &names),
        })),
    };
    emit(&cli.out, &content)
}

fn matrix_object(
    ctx: &std::sync::Arc<twistlight::SymbolContext>,
    name: &str,
    conv: Convention,
) -> Result<twistlight::Matrix2, String> {
    match object(ctx, name, conv)? {
        Object::Matrix(m) => Ok(m),
        Object::State(_) => Err(format!("`{name}` names a state, not an operator")),
    }
}

fn cmd_apply(cli: &Cli, conv: Convention, op: &str, ket_name: &str) -> Result<(), String> {
    let ctx = cli_context();
    let names = ctx.names().to_vec();
    let m = matrix_object(&ctx, op, conv)?;
    let k = ket(ket_name)?;
    let input = named_ket(&ctx, k, conv);
    let result = apply(&m, &input).map_err(lib_err)?;
    let sym = ctx.symbol("vartheta").map_err(lib_err)?;
    let content = match cli.format.unwrap_or(Format::Text) {
        Format::Csv => {
            return Err("`apply` has no CSV form; use --format text or structured".into())
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "apply {op} to |{k}>  (convention {})",
                conv.label()
            );
            out.push_str(&state_report(&result, &sym, conv).map_err(lib_err)?);
            let _ = writeln!(out, "exact terms:");
            push_exact_block(&mut out, "|h>", result.amp0(), &names);
            push_exact_block(&mut out, "|v>", result.amp1(), &names);
            out
        }
        Format::Structured => pretty_json(&json!({
            "op": op,
            "ket": k.to_string(),
            "convention": conv.label(),
            "state": render::state_json(&result, &names),
        })),
    };
    emit(&cli.out, &content)
}

fn cmd_phase(
    cli: &Cli,
    conv: Convention,
    model: &EtaModel,
    op: &str,
    ket_name: &str,
    angle_flags: [&String; 6],
) -> Result<(), String> {
    let ctx = cli_context();
    let names = ctx.names().to_vec();
    let m = matrix_object(&ctx, op, conv)?;
    let k = ket(ket_name)?;
    let input = named_ket(&ctx, k, conv);
    let pr = pancharatnam(&input, &m).map_err(lib_err)?;
    let values: Vec<f64> = angle_flags
        .iter()
        .map(|s| numeric_expr(s))
        .collect::<Result<_, _>>()?;
    let mut assign = AngleValues::new();
    for (name, v) in names.iter().zip(&values) {
        assign = assign.set(name, *v);
    }
    let theta_v = values[4];
    let eta = model.eta(theta_v)?;
    let z = pr.eval_numeric(&assign, eta).map_err(lib_err)?;
    let magnitude = pr.magnitude_numeric(&assign, eta).map_err(lib_err)?;
    let arg = pr.arg_numeric(&assign, eta).map_err(lib_err)?;
    let content = match cli.format.unwrap_or(Format::Text) {
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "projection phase of {op} on |{k}>  (convention {})",
                conv.label()
            );
            let _ = writeln!(out, "amplitude = {}", pr.amplitude());
            let _ = writeln!(out, "exact terms:");
            push_exact_block(&mut out, "amplitude", pr.amplitude(), &names);
            let _ = writeln!(
                out,
                "at vartheta={} alpha={} omega={} beta={} theta={} phi={} eta={eta}:",
                values[0], values[1], values[2], values[3], values[4], values[5]
            );
            let _ = writeln!(out, "  value     = {}", render::complex(z));
            let _ = writeln!(out, "  magnitude = {magnitude}");
            let _ = writeln!(out, "  arg       = {arg} rad");
            out
        }
        Format::Csv => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "vartheta,alpha,omega,beta,theta,phi,eta,amplitude_re,amplitude_im,magnitude,arg"
            );
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{eta},{},{},{magnitude},{arg}",
                values[0], values[1], values[2], values[3], values[4], values[5], z.re, z.im
            );
            out
        }
        Format::Structured => pretty_json(&json!({
            "op": op,
            "ket": k.to_string(),
            "convention": conv.label(),
            "amplitude": render::scalar_json(pr.amplitude(), &names),
            "assignment": names.iter().zip(&values).collect::<Vec<_>>(),
            "eta": eta,
            "value": { "re": z.re, "im": z.im },
            "magnitude": magnitude,
            "arg": arg,
        })),
    };
    emit(&cli.out, &content)
}

// ---------------------------------------------------------------------------
// concurrence / cascade
// ---------------------------------------------------------------------------

fn cmd_concurrence(
    cli: &Cli,
    conv: Convention,
    model: &EtaModel,
    element: usize,
    vartheta: &str,
    theta: &str,
) -> Result<(), String> {
    let ctx = cli_context();
    let vt_angle = ctx.angle("vartheta").map_err(lib_err)?;
    let sym = ctx.symbol("vartheta").map_err(lib_err)?;
    let elements = build_array(element, &vt_angle).map_err(lib_err)?;
    let input = named_ket(&ctx, KetName::H, conv);
    let trace = propagate(&input, &elements, &sym, conv).map_err(lib_err)?;
    let step = trace.steps.last().expect("nonempty trace");
    let vt = numeric_expr(vartheta)?;
    let th = numeric_expr(theta)?;
    let eta = model.eta(th)?;
    let assign = AngleValues::new().set("vartheta", vt);
    let report = concurrence_report(&step.output, &sym, &assign, vt, eta, conv, step.closed_tag())
        .map_err(lib_err)?;
    let gadget = &elements.last().expect("nonempty array").gadget;
    let content = match cli.format.unwrap_or(Format::Text) {
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "element {element} output of {gadget}  (convention {})",
                conv.label()
            );
            let _ = writeln!(out, "bell pairs (exact):");
            for p in &step.pairs {
                let _ = writeln!(
                    out,
                    "  a={:+}: alpha_plus = {}, alpha_minus = {}",
                    p.a, p.alpha_plus, p.alpha_minus
                );
            }
            let _ = writeln!(out, "sum-alpha-squared (printed strategy, exact) = {}", step.sum_alpha2);
            let _ = writeln!(out, "at vartheta={vt} theta={th} eta={eta}:");
            let _ = writeln!(
                out,
                "  (a) printed-coefficient sum = {}   modulus {}",
                render::complex(report.sum_alpha2_printed),
                report.sum_alpha2_printed_modulus
            );
            let _ = writeln!(
                out,
                "  (b) normalized-ket sum      = {}   modulus {}",
                render::complex(report.sum_alpha2_normalized),
                report.sum_alpha2_normalized_modulus
            );
            let _ = writeln!(out, "  (c) i-concurrence           = {}", report.iconc);
            match report.closed_form {
                Some(c) => {
                    let _ = writeln!(
                        out,
                        "  published closed form       = {}   (imag residual {})",
                        render::complex(c),
                        report.closed_form_imag_residual.unwrap_or(0.0)
                    );
                }
                None => {
                    let _ = writeln!(out, "  published closed form       = (none for this element)");
                }
            }
            out
        }
        Format::Csv => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "element,vartheta,theta,eta,sum_alpha2_printed_re,sum_alpha2_printed_im,\
                 sum_alpha2_printed_modulus,sum_alpha2_normalized_re,sum_alpha2_normalized_im,\
                 sum_alpha2_normalized_modulus,iconc,closed_form_re,closed_form_im"
            );
            let (cre, cim) = match report.closed_form {
                Some(c) => (c.re.to_string(), c.im.to_string()),
                None => (String::new(), String::new()),
            };
            let _ = writeln!(
                out,
                "{element},{vt},{th},{eta},{},{},{},{},{},{},{},{cre},{cim}",
                report.sum_alpha2_printed.re,
                report.sum_alpha2_printed.im,
                report.sum_alpha2_printed_modulus,
                report.sum_alpha2_normalized.re,
                report.sum_alpha2_normalized.im,
                report.sum_alpha2_normalized_modulus,
                report.iconc
            );
            out
        }
        Format::Structured => {
            let names = ctx.names().to_vec();
            let pairs: Vec<Value> = step
                .pairs
                .iter()
                .map(|p| {
                    json!({
                        "a": p.a,
                        "alpha_plus": render::scalar_json(&p.alpha_plus, &names),
                        "alpha_minus": render::scalar_json(&p.alpha_minus, &names),
                    })
                })
                .collect();
            pretty_json(&json!({
                "element": element,
                "gadget": gadget.to_string(),
                "convention": conv.label(),
                "vartheta": vt,
                "theta": th,
                "eta": eta,
                "bell_pairs": pairs,
                "sum_alpha2_exact": render::scalar_json(&step.sum_alpha2, &names),
                "strategies": {
                    "printed": { "re": report.sum_alpha2_printed.re, "im": report.sum_alpha2_printed.im, "modulus": report.sum_alpha2_printed_modulus },
                    "normalized": { "re": report.sum_alpha2_normalized.re, "im": report.sum_alpha2_normalized.im, "modulus": report.sum_alpha2_normalized_modulus },
                    "iconc": report.iconc,
                },
                "closed_form": report.closed_form.map(|c| json!({ "re": c.re, "im": c.im })),
            }))
        }
    };
    emit(&cli.out, &content)
}

fn cmd_cascade(
    cli: &Cli,
    conv: Convention,
    model: &EtaModel,
    n: usize,
    vartheta: &str,
    theta: &str,
    spacing: Option<f64>,
) -> Result<(), String> {
    let ctx = cli_context();
    let vt_angle = ctx.angle("vartheta").map_err(lib_err)?;
    let sym = ctx.symbol("vartheta").map_err(lib_err)?;
    let elements = build_array(n, &vt_angle).map_err(lib_err)?;
    let input = named_ket(&ctx, KetName::H, conv);
    let trace = propagate(&input, &elements, &sym, conv).map_err(lib_err)?;
    let vt = numeric_expr(vartheta)?;
    let th = numeric_expr(theta)?;
    let eta = model.eta(th)?;
    let assign = AngleValues::new().set("vartheta", vt);
    let phases = phase_args(&trace, &assign, eta).map_err(lib_err)?;
    let mut iconcs = Vec::with_capacity(trace.steps.len());
    let mut sums = Vec::with_capacity(trace.steps.len());
    for step in &trace.steps {
        iconcs.push(i_concurrence(&step.output, &sym, &assign, eta, conv).map_err(lib_err)?);
        sums.push(step.sum_alpha2.eval_numeric(&assign, eta).map_err(lib_err)?);
    }
    let steering: Option<Vec<(f64, f64)>> = match spacing {
        None => None,
        Some(d) => {
            let psi = grid(-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2, std::f64::consts::PI / 180.0)?;
            Some(array_factor(&phases, d, &psi).map_err(lib_err)?)
        }
    };
    let content = match cli.format.unwrap_or(Format::Text) {
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "cascade of {n} elements  (convention {}, vartheta={vt}, theta={th}, eta={eta})",
                conv.label()
            );
            for (i, step) in trace.steps.iter().enumerate() {
                let _ = writeln!(out, "element {}: {}", step.index, elements[i].gadget);
                let _ = writeln!(out, "  projection amplitude = {}", step.phase.amplitude());
                let _ = writeln!(out, "  projection arg = {} rad", phases[i]);
                let labels: Vec<String> = step.pairs.iter().map(|p| format!("{:+}", p.a)).collect();
                let _ = writeln!(out, "  pair labels a: [{}]", labels.join(", "));
                let _ = writeln!(
                    out,
                    "  sum-alpha-squared (printed strategy) = {}   value {} (modulus {})",
                    step.sum_alpha2,
                    render::complex(sums[i]),
                    sums[i].norm()
                );
                let _ = writeln!(out, "  i-concurrence = {}", iconcs[i]);
                if let Some(tag) = step.closed_tag() {
                    let c = closed_form_c(tag, vt, eta);
                    let _ = writeln!(out, "  published closed form = {}", render::complex(c));
                }
            }
            let _ = writeln!(out, "final state:");
            out.push_str(&state_report(trace.final_state(), &sym, conv).map_err(lib_err)?);
            if let Some(rows) = &steering {
                let _ = writeln!(out, "array factor (d/lambda = {}):", spacing.expect("guarded"));
                let _ = writeln!(out, "  psi,af_modulus");
                for (psi, af) in rows {
                    let _ = writeln!(out, "  {psi},{af}");
                }
            }
            out
        }
        Format::Csv => {
            if steering.is_some() {
                return Err(
                    "the array-factor table has no CSV form alongside the step table; \
                     use --format text or structured"
                        .into(),
                );
            }
            let mut out = String::new();
            let _ = writeln!(out, "element,projection_arg,sum_alpha2_re,sum_alpha2_im,iconc");
            for (i, step) in trace.steps.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    step.index, phases[i], sums[i].re, sums[i].im, iconcs[i]
                );
            }
            out
        }
        Format::Structured => {
            let names = ctx.names().to_vec();
            let steps: Vec<Value> = trace
                .steps
                .iter()
                .enumerate()
                .map(|(i, step)| {
                    json!({
                        "element": step.index,
                        "gadget": elements[i].gadget.to_string(),
                        "projection_amplitude": render::scalar_json(step.phase.amplitude(), &names),
                        "projection_arg": phases[i],
                        "pair_labels": step.pairs.iter().map(|p| p.a).collect::<Vec<_>>(),
                        "sum_alpha2": { "re": sums[i].re, "im": sums[i].im },
                        "iconc": iconcs[i],
                    })
                })
                .collect();
            pretty_json(&json!({
                "elements": n,
                "convention": conv.label(),
                "vartheta": vt,
                "theta": th,
                "eta": eta,
                "steps": steps,
                "final_state": render::state_json(trace.final_state(), &names),
                "array_factor": steering.map(|rows| {
                    rows.iter()
                        .map(|(psi, af)| json!({ "psi": psi, "af": af }))
                        .collect::<Vec<_>>()
                }),
            }))
        }
    };
    emit(&cli.out, &content)
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

fn cmd_sweep(
    cli: &Cli,
    conv: Convention,
    model: &EtaModel,
    vt_flags: [&String; 3],
    th_flags: [&str; 3],
    theta_end_given: bool,
) -> Result<(), String> {
    let vt_start = numeric_expr(vt_flags[0])?;
    let vt_end = numeric_expr(vt_flags[1])?;
    let vt_step = numeric_expr(vt_flags[2])?;
    let th_start = numeric_expr(th_flags[0])?;
    let th_end = if theta_end_given {
        numeric_expr(th_flags[1])?
    } else {
        std::f64::consts::PI - 0.05
    };
    let th_step = numeric_expr(th_flags[2])?;
    let varthetas = grid(vt_start, vt_end, vt_step)?;
    let thetas = grid(th_start, th_end, th_step)?;

    // Hoist every symbolic quantity out of the grid loop: the first two
    // element outputs, their exact pair sums, and their OAM spectra.
    let ctx = cli_context();
    let vt_angle = ctx.angle("vartheta").map_err(lib_err)?;
    let sym = ctx.symbol("vartheta").map_err(lib_err)?;
    let elements = build_array(2, &vt_angle).map_err(lib_err)?;
    let input = named_ket(&ctx, KetName::H, conv);
    let trace = propagate(&input, &elements, &sym, conv).map_err(lib_err)?;
    let (s1, s2) = (&trace.steps[0], &trace.steps[1]);
    let spec1 = oam_spectrum(&s1.output, &sym, conv).map_err(lib_err)?;
    let spec2 = oam_spectrum(&s2.output, &sym, conv).map_err(lib_err)?;

    let mut rows: Vec<[f64; 10]> = Vec::with_capacity(thetas.len() * varthetas.len());
    for &th in &thetas {
        let eta = model.eta(th)?;
        for &vt in &varthetas {
            let assign = AngleValues::new().set("vartheta", vt);
            let c1 = closed_form_c(ElementTag::First, vt, eta);
            let c2 = closed_form_c(ElementTag::Second, vt, eta);
            let e1 = s1.sum_alpha2.eval_numeric(&assign, eta).map_err(lib_err)?.norm();
            let e2 = s2.sum_alpha2.eval_numeric(&assign, eta).map_err(lib_err)?.norm();
            let i1 = i_concurrence_from_spectrum(&spec1, &assign, eta).map_err(lib_err)?;
            let i2 = i_concurrence_from_spectrum(&spec2, &assign, eta).map_err(lib_err)?;
            rows.push([th, vt, eta, c1.re, c2.re, c2.im, e1, e2, i1, i2]);
        }
    }

    let content = match cli.format.unwrap_or(Format::Csv) {
        Format::Csv | Format::Text => {
            let mut out = String::with_capacity(rows.len() * 96 + 128);
            out.push_str(SWEEP_HEADER);
            out.push('\n');
            for row in &rows {
                let mut first = true;
                for v in row {
                    if !first {
                        out.push(',');
                    }
                    let _ = write!(out, "{v}");
                    first = false;
                }
                out.push('\n');
            }
            out
        }
        Format::Structured => {
            let keys = SWEEP_HEADER.split(',').collect::<Vec<_>>();
            let rows_json: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let obj: serde_json::Map<String, Value> = keys
                        .iter()
                        .zip(row)
                        .map(|(k, v)| (k.to_string(), json!(v)))
                        .collect();
                    Value::Object(obj)
                })
                .collect();
            pretty_json(&json!({ "convention": conv.label(), "rows": rows_json }))
        }
    };
    emit(&cli.out, &content)
}

// ---------------------------------------------------------------------------
// audit / selftest
// ---------------------------------------------------------------------------

fn cmd_audit(cli: &Cli, samples: usize) -> Result<(), String> {
    let records = convention_audit(samples, cli.seed).map_err(lib_err)?;
    let no_shared = no_global_convention(&records);
    let content = match cli.format.unwrap_or(Format::Text) {
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "printed-line audit: {} targets, {samples} samples, seed {}",
                records.len(),
                cli.seed
            );
            for r in &records {
                let _ = writeln!(
                    out,
                    "{:<18} {:<21} resid(default) {:<11.3e} best {:<4} ({:.3e})",
                    r.target,
                    r.verdict.to_string(),
                    r.residual_default,
                    r.best_convention,
                    r.best_residual
                );
            }
            let _ = writeln!(out, "notes:");
            for r in &records {
                for note in &r.notes {
                    let _ = writeln!(out, "  {}: {note}", r.target);
                }
            }
            let _ = writeln!(
                out,
                "no single convention matches every non-structural target: {no_shared}"
            );
            out
        }
        Format::Csv => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "target,verdict,residual_default,best_convention,best_residual"
            );
            for r in &records {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.target, r.verdict, r.residual_default, r.best_convention, r.best_residual
                );
            }
            out
        }
        Format::Structured => {
            let rows: Vec<Value> = records
                .iter()
                .map(|r| {
                    let per: serde_json::Map<String, Value> = r
                        .per_convention
                        .iter()
                        .map(|(label, resid)| (label.clone(), json!(resid)))
                        .collect();
                    json!({
                        "target": r.target,
                        "verdict": r.verdict.to_string(),
                        "residual_default": r.residual_default,
                        "best_convention": r.best_convention,
                        "best_residual": r.best_residual,
                        "per_convention": per,
                        "notes": r.notes,
                    })
                })
                .collect();
            pretty_json(&json!({
                "samples": samples,
                "seed": cli.seed,
                "records": rows,
                "no_global_convention": no_shared,
            }))
        }
    };
    emit(&cli.out, &content)
}

fn cmd_selftest(cli: &Cli, cases: usize) -> Result<(), String> {
    let report = run_identity_suite(cases, cli.seed).map_err(lib_err)?;
    let content = match cli.format.unwrap_or(Format::Text) {
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "identity suite: {} cases per check, seed {}",
                report.cases, report.seed
            );
            for c in &report.checks {
                let _ = writeln!(
                    out,
                    "{:<34} max residual {:>10.3e}  tol {:>7.1e}  {}",
                    c.name,
                    c.max_residual,
                    c.tol,
                    if c.passed { "PASS" } else { "FAIL" }
                );
            }
            let passed = report.checks.iter().filter(|c| c.passed).count();
            let _ = writeln!(out, "{passed}/{} checks passed", report.checks.len());
            out
        }
        Format::Csv => {
            let mut out = String::new();
            let _ = writeln!(out, "check,max_residual,tol,passed");
            for c in &report.checks {
                let _ = writeln!(out, "{},{},{},{}", c.name, c.max_residual, c.tol, c.passed);
            }
            out
        }
        Format::Structured => {
            let rows: Vec<Value> = report
                .checks
                .iter()
                .map(|c| {
                    json!({
                        "check": c.name,
                        "max_residual": c.max_residual,
                        "tol": c.tol,
                        "passed": c.passed,
                    })
                })
                .collect();
            pretty_json(&json!({
                "cases": report.cases,
                "seed": report.seed,
                "checks": rows,
                "all_passed": report.all_passed,
            }))
        }
    };
    emit(&cli.out, &content)?;
    if !report.all_passed {
        let failed = report.checks.iter().filter(|c| !c.passed).count();
        return Err(format!(
            "identity suite failed: {failed} of {} checks exceeded tolerance",
            report.checks.len()
        ));
    }
    Ok(())
}
