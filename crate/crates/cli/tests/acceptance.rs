//! One line per acceptance criterion; exits non-zero if any fails.

use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topoeft::action::{check_quantization, polarization_tensor, EffectiveAction, Structure, TriClass};
use topoeft::algebra::{rational, Coefficient, Expression, Index, LogAtom, Symbol, TensorFactor, Term};
use topoeft::dsl::{models, parse_model};
use topoeft::loops::{evaluate_dimreg, laurent_expand, LoopIntegral, Scheme};
use topoeft::oracle::{integral_grid, log_cutoff_slope, commutator_trace_identities, randomized_equivalence_suite};
use topoeft::render::{parse_structured, Form};
use topoeft::Execution;

const SUITE_SEED: u64 = 42;
const SUITE_COUNT: usize = 500;
const SUITE_TOLERANCE: f64 = 1e-10;
const GRID_TOLERANCE: f64 = 1e-8;
const GRID_POINTS: usize = 20;
const SLOPE_TOLERANCE: f64 = 0.01;
const PERIODICITY_SAMPLES: usize = 100;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok { Ok(()) } else { Err(msg()) }
}

fn sym(name: &str) -> Coefficient {
    Coefficient::symbol(Symbol::named(name))
}

fn pi_pow(p: i32) -> Coefficient {
    Coefficient::symbol_pow(Symbol::Pi, p)
}

fn model(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../models")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn cli(args: &[&str]) -> Result<String, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_topoeft"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!("`{}` failed: {}", args.join(" "), String::from_utf8_lossy(&o.stderr).trim()));
    }
    Ok(String::from_utf8_lossy(&o.stdout).into_owned())
}

fn structured(args: &[&str]) -> Result<(EffectiveAction, Form), String> {
    let mut all = args.to_vec();
    all.extend(["--format", "structured"]);
    parse_structured(&cli(&all)?).map_err(|e| e.to_string())
}

fn single_epsilon(act: &EffectiveAction, a: &str, b: &str) -> Result<Coefficient, String> {
    ensure(act.terms.len() == 1, || format!("expected one term, got {}", act.terms.len()))?;
    act.coefficient(Structure::Epsilon, a, b)
        .cloned()
        .ok_or_else(|| format!("no epsilon({a}, {b}) term"))
}

fn theta_term() -> Outcome {
    let path = model("theta_term.eft");
    let e2_theta = Coefficient::symbol_pow(Symbol::named("e"), 2) * sym("thetaF") * pi_pow(-2);

    let (fs, _) = structured(&["compute", &path])?;
    let c = single_epsilon(&fs, "F", "F")?;
    let want = Coefficient::rational(1, 32) * e2_theta.clone();
    ensure(c == want, || format!("field-strength coefficient {c}, want {want}"))?;

    let (pot, form) = structured(&["compute", &path, "--form", "potential"])?;
    ensure(form == Form::Potential, || "structured output lost the form".into())?;
    let weight = topoeft::render::form_weight(&pot, &pot.terms[0], Form::Potential);
    let c = pot.terms[0].coefficient.scale_rational(&weight);
    let want = Coefficient::rational(1, 8) * e2_theta;
    ensure(c == want, || format!("potential coefficient {c}, want {want}"))?;
    Ok(format!("F form {}, dA form {}", fs.terms[0].coefficient, c))
}

fn theta_flavor() -> Result<topoeft::action::FlavorSpec, String> {
    let m = parse_model(models::THETA_TERM).map_err(|d| d.to_string())?;
    Ok(m.flavors[0].clone())
}

fn lorentz() -> [Index; 4] {
    [Index::named("mu"), Index::named("nu"), Index::named("rho"), Index::named("sigma")]
}

fn metric_vanishes() -> Outcome {
    let p = polarization_tensor(&theta_flavor()?, &lorentz()).map_err(|e| e.to_string())?;
    ensure(p.metric_sector.is_zero(), || format!("metric sector at d=4: {}", p.metric_sector))?;
    let divergent = p
        .metric_sector_symbolic_d
        .terms()
        .iter()
        .any(|t| t.coeff.has_symbol(&Symbol::Cutoff) || t.coeff.has_logs());
    ensure(divergent, || "metric sector before d -> 4 carries no divergent integral".into())?;
    Ok(format!("{} symbolic-d terms, exact zero at d=4", p.metric_sector_symbolic_d.terms().len()))
}

fn epsilon_structure() -> Outcome {
    let p = polarization_tensor(&theta_flavor()?, &lorentz()).map_err(|e| e.to_string())?;
    let [mu, nu, rho, sigma] = lorentz();
    let c = Coefficient::symbol_pow(Symbol::named("e"), 2)
        * Coefficient::symbol_pow(Symbol::named("m"), 2)
        * Coefficient::symbol_pow(Symbol::named("alpha"), 2)
        * Coefficient::symbol(Symbol::I0);
    let want = Expression::from_term(Term::new(c, vec![TensorFactor::epsilon(mu, nu, rho, sigma)]))
        .canonicalize()
        .map_err(|e| e.to_string())?;
    ensure(p.epsilon_sector == want, || format!("epsilon sector {}", p.epsilon_sector))?;
    Ok(format!("{}", p.epsilon_sector))
}

fn dimreg_chain() -> Outcome {
    let l = LoopIntegral::at_zero_momentum((1, 1), 0, Symbol::named("m"), Scheme::DimReg);
    let g = evaluate_dimreg(&l).map_err(|e| e.to_string())?;
    let got = laurent_expand(&g);
    let want = Coefficient::rational(1, 16)
        * pi_pow(-2)
        * (Coefficient::integer(2) * Coefficient::eps_pole(-1)
            + Coefficient::log(LogAtom::MuSqOverMassSq)
            + Coefficient::log(LogAtom::FourPi)
            - Coefficient::symbol(Symbol::EulerGamma));
    ensure(got == want, || format!("got {got}, want {want}"))?;
    Ok(format!("{g} = {got}"))
}

fn bf_theory() -> Outcome {
    let path = model("bf_theory.eft");
    let (act, _) = structured(&["compute", &path, "--form", "potential"])?;
    ensure(act.terms.len() == 3, || format!("expected three terms, got {}", act.terms.len()))?;
    for (a, b) in [("F", "F"), ("f", "f"), ("b", "b")] {
        ensure(act.coefficient(Structure::Epsilon, a, b).is_none(), || format!("{a}{b} term survives"))?;
    }
    for (a, b, name) in [("F", "b", "LambdaF"), ("b", "f", "LambdaF"), ("F", "f", "CF")] {
        let t = act
            .terms
            .iter()
            .find(|t| t.structure == Structure::Epsilon && t.involves(a) && t.involves(b))
            .ok_or_else(|| format!("no {a}{b} term"))?;
        let c = t.coefficient.scale_rational(&topoeft::render::form_weight(&act, t, Form::Potential));
        ensure(c == sym(name), || format!("{a}{b} coefficient {c}, want {name}"))?;
    }

    let target = Coefficient::rational(1, 8) * Coefficient::symbol_pow(Symbol::named("e"), 2) * pi_pow(-1);
    let mut reduced = Vec::new();
    for cf in ["CF=e^2/8/pi", "CF=-e^2/8/pi"] {
        let (r, _) = structured(&["reduce-bf", &path, "--set", "LambdaF=1/2/pi", "--set", cf, "--form", "potential"])?;
        let c = single_epsilon(&r, "F", "F")?;
        let c = c.scale_rational(&topoeft::render::form_weight(&r, &r.terms[0], Form::Potential));
        reduced.push(c);
    }
    let signs_ok = (reduced[0] == -target.clone() && reduced[1] == target)
        || (reduced[0] == target && reduced[1] == -target.clone());
    ensure(signs_ok, || format!("reduced coefficients {} and {}", reduced[0], reduced[1]))?;
    Ok(format!("LambdaF, LambdaF, CF; reduced to {} and {}", reduced[0], reduced[1]))
}

fn trace_oracle() -> Outcome {
    let r = randomized_equivalence_suite(SUITE_SEED, SUITE_COUNT, Execution::default());
    ensure(r.passed() && r.max_deviation < SUITE_TOLERANCE, || r.to_string())?;
    let ids = commutator_trace_identities(Execution::default()).map_err(|e| e.to_string())?;
    ensure(ids.tuples == 256 && ids.passed(), || format!("{ids:?}"))?;
    Ok(format!("{SUITE_COUNT} words, max deviation {:.1e}; {} tuples", r.max_deviation, ids.tuples))
}

fn integral_oracle() -> Outcome {
    let g = integral_grid(Execution::default()).map_err(|e| e.to_string())?;
    ensure(g.points.len() == GRID_POINTS, || format!("{} grid points", g.points.len()))?;
    ensure(g.max_relative_deviation < GRID_TOLERANCE, || format!("grid deviation {:e}", g.max_relative_deviation))?;
    // the 2/ε̂ pole of I(0) pairs with ln Λ², so d I/d ln Λ is twice the pole residue
    let l = LoopIntegral::at_zero_momentum((1, 1), 0, Symbol::named("m"), Scheme::DimReg);
    let residue = laurent_expand(&evaluate_dimreg(&l).map_err(|e| e.to_string())?).eps_coefficient(-1);
    ensure(residue == Coefficient::rational(1, 8) * pi_pow(-2), || format!("pole residue {residue}"))?;
    let expected = 1.0 / (8.0 * std::f64::consts::PI.powi(2));
    let mut worst: f64 = 0.0;
    for m in [0.5, 1.0, 2.0] {
        let s = log_cutoff_slope(m, Execution::default()).map_err(|e| e.to_string())?;
        worst = worst.max((s / expected - 1.0).abs());
    }
    ensure(worst < SLOPE_TOLERANCE, || format!("slope off by {:.3}%", 100.0 * worst))?;
    Ok(format!("grid deviation {:.1e}, slope within {:.3}%", g.max_relative_deviation, 100.0 * worst))
}

fn quantization() -> Outcome {
    let cases = [
        ((1, 1), 1, TriClass::Nontrivial),
        ((1, 3), 3, TriClass::Nontrivial),
        ((2, 1), 1, TriClass::Trivial),
        ((1, 2), 1, TriClass::NotInvariant),
    ];
    for ((n, d), nf, want) in cases {
        let got = check_quantization(&rational(n, d), nf).map_err(|e| e.to_string())?.class;
        ensure(got == want, || format!("theta = {n}/{d} pi, N_f = {nf}: {got}, want {want}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
    for _ in 0..PERIODICITY_SAMPLES {
        let q = rational(rng.random_range(-40..=40), rng.random_range(1..=9));
        let nf = [1, 3, 5, 7][rng.random_range(0..4)];
        let a = check_quantization(&q, nf).map_err(|e| e.to_string())?.class;
        let b = check_quantization(&(&q + rational(2, 1)), nf).map_err(|e| e.to_string())?.class;
        ensure(a == b, || format!("theta = {q} pi and theta + 2 pi differ for N_f = {nf}"))?;
    }
    let _ = cli(&["check-quantization", "--theta", "pi/3", "--nf", "3"])?;
    Ok(format!("4 fixed cases, {PERIODICITY_SAMPLES} periodicity samples"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("theta-term reproduction", theta_term),
        ("metric sector vanishes at d=4", metric_vanishes),
        ("polarization epsilon structure", epsilon_structure),
        ("dimreg Laurent chain", dimreg_chain),
        ("BF reproduction and reduction", bf_theory),
        ("trace oracle equivalence", trace_oracle),
        ("integral oracle", integral_oracle),
        ("quantization classifier", quantization),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("[PASS] {} {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {} {name}: {why}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed in {:.1?}", criteria.len() - failed, criteria.len(), start.elapsed());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
