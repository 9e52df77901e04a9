use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use topoeft::action::{assemble, check_quantization, eliminate_bf, renormalize, BfOutcome, EffectiveAction, ModelSpec};
use topoeft::algebra::{rational, BigRational, Symbol};
use topoeft::dsl::{parse_model, parse_monomial};
use topoeft::error::ActionError;
use topoeft::oracle;
use topoeft::render::{render, Form, Format};
use topoeft::Execution;

const EXIT_DIAGNOSTIC: u8 = 1;
const EXIT_RENORMALIZATION: u8 = 2;
const EXIT_ORACLE: u8 = 3;

#[derive(Parser)]
#[command(name = "topoeft", version, about = "One-loop effective actions of dipole-coupled neutral fermions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormArg {
    Fs,
    Potential,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Latex,
    Structured,
}

#[derive(clap::Args)]
struct Output {
    /// Write exact slots as field strengths or as derivatives of potentials.
    #[arg(long, value_enum, default_value = "fs")]
    form: FormArg,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    /// Substitute a declared constant, e.g. `--set CF=-e^2/8/pi`.
    #[arg(long = "set", value_name = "NAME=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble and renormalise the effective action of a model file.
    Compute {
        file: PathBuf,
        #[command(flatten)]
        output: Output,
        /// Print the action before renormalisation.
        #[arg(long)]
        keep_divergences: bool,
    },
    /// Compute, then integrate out the fundamental (BF) slots.
    ReduceBf {
        file: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Classify theta = q*pi for partons of charge e/N_f.
    CheckQuantization {
        /// Multiple of pi, e.g. `pi`, `pi/3`, `2pi`, `-3/2pi`.
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        #[arg(long, allow_hyphen_values = true)]
        nf: i64,
    },
    /// Run the numeric oracle suites.
    Selftest {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        count: usize,
        /// Disable data parallelism.
        #[arg(long)]
        sequential: bool,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

impl From<ActionError> for Failure {
    fn from(e: ActionError) -> Self {
        match e {
            ActionError::RenormalizationIncomplete(_) => fail(EXIT_RENORMALIZATION, e.to_string()),
            other => fail(EXIT_DIAGNOSTIC, other.to_string()),
        }
    }
}

fn load(path: &Path) -> Result<ModelSpec, Failure> {
    let text = fs::read_to_string(path).map_err(|e| fail(EXIT_DIAGNOSTIC, format!("{}: {e}", path.display())))?;
    parse_model(&text).map_err(|d| fail(EXIT_DIAGNOSTIC, format!("{}: {d}", path.display())))
}

fn apply_settings(act: EffectiveAction, model: &ModelSpec, set: &[String]) -> Result<EffectiveAction, Failure> {
    let mut act = act;
    for s in set {
        let (name, value) = s
            .split_once('=')
            .ok_or_else(|| fail(EXIT_DIAGNOSTIC, format!("`--set {s}`: expected NAME=VALUE")))?;
        let name = name.trim();
        if !model.constants.iter().any(|c| c.name == name) {
            return Err(fail(EXIT_DIAGNOSTIC, format!("`--set {s}`: `{name}` is not a declared constant")));
        }
        let value = parse_monomial(value, &model.constants, 0)
            .map_err(|d| fail(EXIT_DIAGNOSTIC, format!("`--set {s}`: {}", d.message)))?;
        act = act.substitute(&Symbol::named(name), &value)?;
    }
    Ok(act)
}

fn print_action(act: &EffectiveAction, output: &Output) -> Result<(), Failure> {
    let form = match output.form {
        FormArg::Fs => Form::FieldStrength,
        FormArg::Potential => Form::Potential,
    };
    let format = match output.format {
        FormatArg::Text => Format::Text,
        FormatArg::Latex => Format::Latex,
        FormatArg::Structured => Format::Structured,
    };
    let text = render(act, form, format).map_err(|e| fail(EXIT_DIAGNOSTIC, e.to_string()))?;
    print!("{text}");
    Ok(())
}

fn compute(path: &Path, keep_divergences: bool) -> Result<(ModelSpec, EffectiveAction), Failure> {
    let model = load(path)?;
    let act = assemble(&model)?;
    let act = if keep_divergences { act } else { renormalize(&act, &model.directives)? };
    Ok((model, act))
}

/// `pi`, `-pi`, `pi/3`, `2pi`, `2*pi`, `1/2pi`, `0`
fn parse_theta(s: &str) -> Result<(i64, i64), String> {
    let bad = || format!("cannot read theta `{s}`; expected a rational multiple of pi such as `pi/3` or `2pi`");
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let int = |x: &str| x.parse::<i64>().map_err(|_| bad());
    let ratio = |x: &str| -> Result<(i64, i64), String> {
        match x.split_once('/') {
            Some((n, d)) => Ok((int(n)?, int(d)?)),
            None => Ok((int(x)?, 1)),
        }
    };
    let (n, d) = match t.split_once("pi") {
        None if t == "0" => (0, 1),
        None => return Err(bad()),
        Some((before, after)) => {
            let before = before.strip_suffix('*').unwrap_or(before);
            let (n1, d1) = match before {
                "" | "+" => (1, 1),
                "-" => (-1, 1),
                b => ratio(b)?,
            };
            let d2 = match after {
                "" => 1,
                a => int(a.strip_prefix('/').ok_or_else(bad)?)?,
            };
            (n1, d1.checked_mul(d2).ok_or_else(bad)?)
        }
    };
    if d == 0 {
        return Err(bad());
    }
    Ok((n, d))
}

fn selftest(seed: u64, count: usize, exec: Execution) -> Result<(), Failure> {
    let mut ok = true;
    let mut line = |pass: bool, text: String| {
        ok &= pass;
        println!("[{}] {text}", if pass { "pass" } else { "FAIL" });
    };
    let v = oracle::GammaRep::dirac().invariant_violation();
    line(
        v < oracle::INVARIANT_TOLERANCE,
        format!("gamma-matrix invariants: max violation {v:.2e}"),
    );
    let suite = oracle::randomized_equivalence_suite(seed, count, exec);
    line(
        suite.passed(),
        format!(
            "random traces: seed {seed}, {count} words, max deviation {:.2e}",
            suite.max_deviation
        ),
    );
    for f in suite.failures.iter().take(10) {
        println!("       {f}");
    }
    match oracle::commutator_trace_identities(exec) {
        Ok(r) => line(
            r.passed(),
            format!(
                "trace identities over {} tuples: contracted {:.2e}, gamma5 {:.2e}, symbolic {:.2e}",
                r.tuples, r.contracted_commutator, r.gamma5_commutator, r.symbolic_mismatch
            ),
        ),
        Err(e) => line(false, format!("trace identities: {e}")),
    }
    match oracle::integral_grid(exec) {
        Ok(g) => line(
            g.passed(),
            format!(
                "scalar integral on {} grid points: max relative deviation {:.2e}",
                g.points.len(),
                g.max_relative_deviation
            ),
        ),
        Err(e) => line(false, format!("scalar integral grid: {e}")),
    }
    let expected = 1.0 / (8.0 * std::f64::consts::PI * std::f64::consts::PI);
    match oracle::log_cutoff_slope(1.0, exec) {
        Ok(s) => line(
            ((s - expected) / expected).abs() < 0.01,
            format!("ln(cutoff) slope {s:.6e}, expected {expected:.6e}"),
        ),
        Err(e) => line(false, format!("ln(cutoff) slope: {e}")),
    }
    if ok {
        Ok(())
    } else {
        Err(fail(EXIT_ORACLE, "oracle self-test failed"))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Compute {
            file,
            output,
            keep_divergences,
        } => {
            let (model, act) = compute(&file, keep_divergences)?;
            let act = apply_settings(act, &model, &output.set)?;
            print_action(&act, &output)
        }
        Command::ReduceBf { file, output } => {
            let (model, act) = compute(&file, false)?;
            let reduced = match eliminate_bf(&act)? {
                BfOutcome::Reduced(a) => a,
                BfOutcome::Unchanged(a) => {
                    eprintln!("note: no fundamental slot to integrate out; action unchanged");
                    a
                }
            };
            let reduced = apply_settings(reduced, &model, &output.set)?;
            print_action(&reduced, &output)
        }
        Command::CheckQuantization { theta, nf } => {
            let (n, d) = parse_theta(&theta).map_err(|m| fail(EXIT_DIAGNOSTIC, m))?;
            let r = check_quantization(&rational(n, d), nf)?;
            println!(
                "theta = {}, N_f = {}: charge quantum {}, theta N_f^2 = {} -> {}",
                pi_multiple(&r.theta_over_pi),
                r.nf,
                r.charge_quantum,
                pi_multiple(&r.effective_over_pi),
                r.class
            );
            Ok(())
        }
        Command::Selftest { seed, count, sequential } => {
            let exec = if sequential { Execution::Sequential } else { Execution::default() };
            selftest(seed, count, exec)
        }
    }
}

fn pi_multiple(q: &BigRational) -> String {
    match q.to_string().as_str() {
        "0" => "0".into(),
        "1" => "pi".into(),
        "-1" => "-pi".into(),
        other => format!("{other} pi"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_DIAGNOSTIC) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::parse_theta;

    #[test]
    fn theta_forms() {
        assert_eq!(parse_theta("pi"), Ok((1, 1)));
        assert_eq!(parse_theta("-pi"), Ok((-1, 1)));
        assert_eq!(parse_theta("pi/3"), Ok((1, 3)));
        assert_eq!(parse_theta("2pi"), Ok((2, 1)));
        assert_eq!(parse_theta("2*pi"), Ok((2, 1)));
        assert_eq!(parse_theta("1/2pi"), Ok((1, 2)));
        assert_eq!(parse_theta("-3/2 pi"), Ok((-3, 2)));
        assert_eq!(parse_theta("0"), Ok((0, 1)));
        assert!(parse_theta("tau").is_err());
        assert!(parse_theta("pi/0").is_err());
    }
}
