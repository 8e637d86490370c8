use std::path::PathBuf;
use std::process::Command;

use mlst_core::ilp::{emit, encode_solution, expected_counts, parse_lp, write_lp, IlpForm};
use mlst_core::netgen::{gen_micro, rng_from_seed, Tsm};
use mlst_core::oracle::oracle_mlst;
use mlst_core::{ExactInstance, Scalar};
use rand::Rng;

fn micro(seed: u64) -> ExactInstance {
    let mut rng = rng_from_seed(seed);
    let n = rng.gen_range(4..=8);
    let m = rng.gen_range(n - 1..=10.min(n * (n - 1) / 2));
    let ell = rng.gen_range(1..=3);
    let tsm = if ell == 3 && n < 8 || rng.gen_bool(0.5) { Tsm::Linear } else { Tsm::Exponential };
    gen_micro(n, m, ell, tsm, &mut rng).unwrap()
}

#[test]
fn counts_match_closed_forms() {
    for form in IlpForm::ALL {
        for seed in 0..100u64 {
            let inst = micro(seed);
            let g = inst.graph();
            let (n, e, ell) = (g.vertex_count(), g.edge_count(), inst.levels());
            let c = emit(form, &inst).unwrap().counts();
            assert_eq!(c, expected_counts(form, &inst), "{form} seed {seed}");
            // stated growth rates
            match form {
                IlpForm::Cut => {
                    assert_eq!(c.variables, ell * e);
                    assert!(c.constraints <= ell * ((1 << n) + e));
                }
                IlpForm::Mcf => {
                    assert!(c.variables <= ell * e * (1 + 2 * n));
                    assert!(c.constraints <= ell * (n + e) * n);
                }
                IlpForm::Scf => {
                    assert_eq!(c.variables, 3 * ell * e);
                    assert!(c.constraints <= 3 * ell * (n + e));
                }
                IlpForm::Reduced => {
                    assert_eq!(c.variables, 6 * e);
                    assert!(c.constraints <= 3 * n + 10 * e);
                }
            }
        }
    }
}

#[test]
fn files_round_trip_byte_stably() {
    for form in IlpForm::ALL {
        for seed in 0..100u64 {
            let model = emit(form, &micro(seed)).unwrap();
            let text = write_lp(&model);
            let back = parse_lp(&text).unwrap();
            assert_eq!(back, model, "{form} seed {seed}");
            assert_eq!(write_lp(&back), text);
        }
    }
}

#[test]
fn optimal_solutions_are_feasible_at_opt() {
    for seed in 0..60u64 {
        let inst = micro(200 + seed);
        let opt = oracle_mlst(&inst).unwrap();
        for form in IlpForm::ALL {
            let model = emit(form, &inst).unwrap();
            let values = encode_solution(form, &inst, &opt.solution).unwrap();
            let obj = model.evaluate(&values).unwrap_or_else(|e| panic!("{form} seed {seed}: {e}"));
            assert!((obj - opt.cost.to_f64_lossy()).abs() < 1e-9, "{form} seed {seed}");
        }
    }
}

/// `MLST_MIP_SOLVER` names a command taking an LP file and printing the
/// optimal objective. Without it, the bundled scipy script is used when
/// python3 with scipy is available.
fn solver() -> Option<Vec<String>> {
    if let Ok(cmd) = std::env::var("MLST_MIP_SOLVER") {
        return Some(cmd.split_whitespace().map(String::from).collect());
    }
    let script = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scripts/solve_lp.py");
    let ok = Command::new("python3")
        .args(["-c", "from scipy.optimize import milp"])
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false);
    (ok && script.exists()).then(|| vec!["python3".into(), script.to_string_lossy().into_owned()])
}

#[test]
fn reduced_flow_optimum_equals_oracle() {
    let Some(cmd) = solver() else {
        println!("skipped: no MIP solver (set MLST_MIP_SOLVER)");
        return;
    };
    let dir = std::env::temp_dir().join(format!("mlst-ilp-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for seed in 0..20u64 {
        let inst = micro(900 + seed);
        let opt = oracle_mlst(&inst).unwrap().cost.to_f64_lossy();
        let path = dir.join(format!("reduced_{seed}.lp"));
        std::fs::write(&path, write_lp(&emit(IlpForm::Reduced, &inst).unwrap())).unwrap();
        let out = Command::new(&cmd[0]).args(&cmd[1..]).arg(&path).output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let value: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
        assert!((value - opt).abs() < 1e-5, "seed {seed}: solver {value}, oracle {opt}");
    }
    let _ = std::fs::remove_dir_all(&dir);
}
