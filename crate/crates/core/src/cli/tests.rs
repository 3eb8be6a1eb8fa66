use super::*;
use crate::verify::{CheckKind, CheckParams};

fn checks(cfg: &RunConfig) -> &[crate::verify::CheckSpec] {
    match &cfg.job {
        Job::Checks(s) => s,
        Job::Simulate(_) => panic!("expected checks"),
    }
}

#[test]
fn minimal_envelope_echoes_derived_constants() {
    let cfg = parse_config("command = \"envelope\"\n[envelope]\nnu = 1.0\nn = 3\nalpha1 = 0.5\neps = 0.5\n").unwrap();
    let specs = checks(&cfg);
    assert_eq!(specs.len(), 1);
    let CheckParams::Envelope(env) = specs[0].params else {
        panic!("wrong params")
    };
    assert!((env.a1 - 1.0).abs() < 1e-15);
    assert_eq!((env.b1, env.b2), (2.0, 6.0));
    assert_eq!(specs[0].tolerance, 1e-3);
    let line = &cfg.describe()[0];
    assert!(line.contains("A1 = 1,") && line.contains("b1 = 2,") && line.contains("b2 = 6"), "{line}");
}

#[test]
fn empty_file_is_a_parse_error() {
    assert!(matches!(parse_config(""), Err(Error::Parse(_))));
}

#[test]
fn unknown_keys_are_rejected_with_location() {
    let err = parse_config("command = \"cone\"\n[cone]\namplitude = 0.5\n").unwrap_err();
    let Error::Parse(msg) = err else { panic!("{err:?}") };
    assert!(msg.contains("amplitude") && msg.contains("line 3"), "{msg}");
    assert!(matches!(parse_config("command = \"nope\""), Err(Error::Parse(_))));
    assert!(matches!(parse_config("command = \"decay\"\nextra = 1"), Err(Error::Parse(_))));
}

#[test]
fn inadmissible_cone_amplitude_states_the_condition() {
    let err = parse_config("command = \"cone\"\n[cone]\namp = 1.0\nn = 1\nnu = 1.0\n").unwrap_err();
    let Error::ConstraintViolation(msg) = &err else { panic!("{err:?}") };
    assert!(msg.contains("((1+nu)/(2n))^(1/(1+nu))"), "{msg}");
    assert_eq!(ExitCode::of(&err), ExitCode::Config);
}

#[test]
fn constraint_checked_before_running() {
    for src in [
        "command = \"envelope\"\n[envelope]\nalpha1 = 0.2\n",
        "command = \"decay\"\n[decay]\nbeta = 0.9\n",
        "command = \"simulate\"\n[simulate]\ncells = 2\n",
        "command = \"compare\"\n[compare]\npairs = 0\n",
        "command = \"envelope\"\n[envelope]\ntolerance = -1.0\n",
        "command = \"suite\"\n[suite]\nchecks = [\"simulate\"]\n",
    ] {
        assert!(matches!(parse_config(src), Err(Error::ConstraintViolation(_))), "{src}");
    }
}

#[test]
fn suite_default_has_one_spec_per_check() {
    let cfg = parse_config("command = \"suite\"").unwrap();
    let kinds: Vec<CheckKind> = checks(&cfg).iter().map(|s| s.kind()).collect();
    assert_eq!(kinds.len(), 6 + 5 + 5);
    assert_eq!(kinds.iter().filter(|k| **k == CheckKind::FdConsistency).count(), 5);
    assert_eq!(kinds.iter().filter(|k| **k == CheckKind::ResidualSigns).count(), 5);
}

#[test]
fn seed_and_tolerance_overrides() {
    let mut cfg = parse_config("command = \"compare\"\nseed = 5").unwrap();
    assert_eq!(cfg.seed, 5);
    let before = cfg.canonical();
    cfg.reseed(9);
    assert_ne!(cfg.canonical(), before);
    let CheckParams::Comparison { seed, .. } = checks(&cfg)[0].params else { panic!() };
    assert_eq!(seed, 9);
    cfg.scale_tolerances(10.0).unwrap();
    assert!((checks(&cfg)[0].tolerance - 1e-5).abs() < 1e-20);
    assert!(cfg.scale_tolerances(f64::NAN).is_err());
    assert_eq!(parse_config("command = \"compare\"").unwrap().seed, DEFAULT_SEED);
}

#[test]
fn simulate_table_resolves() {
    let cfg = parse_config(
        "command = \"simulate\"\n[simulate]\nt_end = 0.0\ninitial = \"lorentzian\"\nvalue = 2.0\nboundary = \"dirichlet\"\n",
    )
    .unwrap();
    let Job::Simulate(job) = &cfg.job else { panic!() };
    assert_eq!(job.u0.values[0], 2.0);
    assert_eq!(job.bc, crate::radial::BoundaryCondition::DirichletConstant(1.0));
    assert_eq!(job.cfg.t_end, 0.0);
}

#[test]
fn exit_codes_by_error() {
    assert_eq!(ExitCode::of(&Error::Parse("x".into())), ExitCode::Config);
    assert_eq!(ExitCode::of(&Error::LinearSolveFailure { row: 1 }), ExitCode::Simulation);
    assert_eq!(ExitCode::Verification as i32, 4);
}
