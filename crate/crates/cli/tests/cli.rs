//! End-to-end tests of the command surface: exit codes, artifact
//! round-trips, byte-level determinism, and the documented worked
//! examples. Most cases drive the command path in-process (same code the
//! binary runs); a few spawn the real binary to pin down stdout and
//! process-level exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use qpgames::games::classify;
use qpgames::numerics::{Rational, Scalar};
use qpgames_cli::cli::run;
use qpgames_cli::format::{parse_json, InstanceFile, PointFile, RunReport};
use tempfile::TempDir;

fn run_cli(args: &[&str]) -> i32 {
    let mut argv = vec!["qpgames"];
    argv.extend_from_slice(args);
    run(argv)
}

fn path_str(path: &Path) -> String {
    path.display().to_string()
}

fn write_worked_box_instance(dir: &Path) -> PathBuf {
    // One free variable, zero curvature, gradient identically −1: the
    // box minimizer is x = 1 and it is a 0-KKT point.
    let path = dir.join("unit.json");
    fs::write(
        &path,
        concat!(
            "{\n",
            "  \"kind\": \"box_qp\",\n",
            "  \"n\": 1,\n",
            "  \"A\": [[\"0\"]],\n",
            "  \"b\": [\"-1\"]\n",
            "}\n"
        ),
    )
    .unwrap();
    path
}

fn write_point(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn gen_is_byte_identical_and_round_trips() {
    let dir = TempDir::new().unwrap();
    let first = dir.path().join("a.json");
    let second = dir.path().join("b.json");
    for (out, seed) in [(&first, "7"), (&second, "7")] {
        assert_eq!(
            run_cli(&["gen", "box_qp", "--n", "3", "--seed", seed, "--out", &path_str(out)]),
            0
        );
    }
    let bytes = fs::read(&first).unwrap();
    assert_eq!(bytes, fs::read(&second).unwrap(), "same seed, same bytes");

    let text = String::from_utf8(bytes).unwrap();
    let parsed: InstanceFile = parse_json(&text, "instance").unwrap();
    assert_eq!(qpgames_cli::format::to_canonical_json(&parsed), text);
    parsed.to_box_qp::<Rational>().unwrap();

    // A different seed must change the content.
    let third = dir.path().join("c.json");
    assert_eq!(
        run_cli(&["gen", "box_qp", "--n", "3", "--seed", "8", "--out", &path_str(&third)]),
        0
    );
    assert_ne!(fs::read(&third).unwrap(), fs::read(&first).unwrap());
}

#[test]
fn gen_shape_flags_shape_the_game() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("game.json");
    assert_eq!(
        run_cli(&[
            "gen",
            "bimatrix_game",
            "--n",
            "3",
            "--common-payoff",
            "--seed",
            "1",
            "--out",
            &path_str(&out),
        ]),
        0
    );
    let file: InstanceFile = parse_json(&fs::read_to_string(&out).unwrap(), "instance").unwrap();
    let game = file.to_game::<Rational>().unwrap();
    assert!(classify(&game).common_payoff);

    // Shape flags are game-only.
    assert_eq!(
        run_cli(&["gen", "box_qp", "--n", "2", "--symmetric", "--out", &path_str(&out)]),
        2
    );
}

#[test]
fn generated_simplex_scale_normalizes_to_one() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sqp.json");
    assert_eq!(
        run_cli(&["gen", "simplex_qp", "--n", "2", "--seed", "2", "--out", &path_str(&out)]),
        0
    );
    let file: InstanceFile = parse_json(&fs::read_to_string(&out).unwrap(), "instance").unwrap();
    let qp = file.to_simplex_qp::<Rational>().unwrap();
    let (canonical, _) = qpgames::qp::normalize_scale(&qp);
    assert_eq!(canonical.scale().render(), "1");
}

#[test]
fn verify_exit_codes_cover_the_contract() {
    let dir = TempDir::new().unwrap();
    let instance = write_worked_box_instance(dir.path());
    let good = write_point(dir.path(), "good.json", "{\"point\": [\"1\"]}\n");
    let half = write_point(dir.path(), "half.json", "{\"point\": [\"1/2\"]}\n");
    let broken = write_point(dir.path(), "broken.json", "{\"point\": [\"one\"]}\n");

    // Exact KKT point at ε = 0.
    assert_eq!(
        run_cli(&["verify", &path_str(&instance), &path_str(&good), "--eps", "0"]),
        0
    );
    // Interior point with |gradient| = 1 > ε: verification failure.
    assert_eq!(
        run_cli(&["verify", &path_str(&instance), &path_str(&half), "--eps", "1/2"]),
        1
    );
    // Same point in float arithmetic.
    assert_eq!(
        run_cli(&["verify", &path_str(&instance), &path_str(&half), "--eps", "0.5", "--float"]),
        1
    );
    // Unparseable payloads and missing files are input errors.
    assert_eq!(
        run_cli(&["verify", &path_str(&instance), &path_str(&broken)]),
        2
    );
    assert_eq!(
        run_cli(&["verify", &path_str(&instance), &path_str(&dir.path().join("nope.json"))]),
        2
    );
}

#[test]
fn pipeline_recovers_the_worked_single_variable_answer() {
    let dir = TempDir::new().unwrap();
    let instance = write_worked_box_instance(dir.path());
    let out = dir.path().join("pulled.json");
    assert_eq!(
        run_cli(&[
            "pipeline",
            &path_str(&instance),
            "--eps",
            "2/25",
            "--out",
            &path_str(&out),
        ]),
        0
    );
    let point: PointFile = parse_json(&fs::read_to_string(&out).unwrap(), "point").unwrap();
    assert_eq!(point.point, vec!["1"]);

    // Identical invocation, byte-identical artifact.
    let again = dir.path().join("again.json");
    assert_eq!(
        run_cli(&[
            "pipeline",
            &path_str(&instance),
            "--eps",
            "2/25",
            "--out",
            &path_str(&again),
        ]),
        0
    );
    assert_eq!(fs::read(&out).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn reduce_writes_a_valid_certificate_and_forgeries_fail_the_audit() {
    let dir = TempDir::new().unwrap();
    let instance = write_worked_box_instance(dir.path());
    let reduced = dir.path().join("constructed.json");
    let cert = dir.path().join("cert.json");
    assert_eq!(
        run_cli(&[
            "reduce",
            &path_str(&instance),
            "--eps",
            "2/25",
            "--out-instance",
            &path_str(&reduced),
            "--out-cert",
            &path_str(&cert),
        ]),
        0
    );

    // The worked example's parameters: M = 1, δ = ε/(4+4M) = 1/100.
    let cert_text = fs::read_to_string(&cert).unwrap();
    let cert_file: qpgames_cli::format::CertificateFile =
        parse_json(&cert_text, "certificate").unwrap();
    let loaded = cert_file.to_certificate().unwrap();
    loaded.validate().unwrap();
    assert_eq!(loaded.big_m().render(), "1");
    assert_eq!(loaded.delta().render(), "1/100");
    assert_eq!(loaded.scale().render(), "2");

    // The constructed program parses and has dimension 2n+1 = 3.
    let file: InstanceFile = parse_json(&fs::read_to_string(&reduced).unwrap(), "instance").unwrap();
    assert_eq!(file.to_simplex_qp::<Rational>().unwrap().n(), 3);

    // A genuine certificate passes the pipeline audit; a forged δ fails
    // it with the audit stage named.
    assert_eq!(
        run_cli(&["pipeline", &path_str(&instance), "--eps", "2/25", "--cert", &path_str(&cert)]),
        0
    );
    let forged = dir.path().join("forged.json");
    fs::write(&forged, cert_text.replace("\"1/100\"", "\"1/50\"")).unwrap();
    assert_eq!(
        run_cli(&["pipeline", &path_str(&instance), "--eps", "2/25", "--cert", &path_str(&forged)]),
        1
    );
}

#[test]
fn solve_certifies_simplex_answers_exactly() {
    let dir = TempDir::new().unwrap();
    // Minimize ½xᵀ(−2I)x on the unit simplex: unique KKT point (1/2, 1/2)
    // with dual value −1.
    let instance = dir.path().join("sqp.json");
    fs::write(
        &instance,
        concat!(
            "{\n",
            "  \"kind\": \"simplex_qp\",\n",
            "  \"n\": 2,\n",
            "  \"A\": [[\"-2\", \"0\"], [\"0\", \"-2\"]],\n",
            "  \"b\": [\"0\", \"0\"],\n",
            "  \"scale\": \"1\"\n",
            "}\n"
        ),
    )
    .unwrap();
    let out = dir.path().join("answer.json");
    assert_eq!(
        run_cli(&["solve", &path_str(&instance), "--eps", "1/1000", "--out", &path_str(&out)]),
        0
    );
    let point: PointFile = parse_json(&fs::read_to_string(&out).unwrap(), "point").unwrap();
    assert_eq!(point.point, vec!["1/2", "1/2"]);
    assert_eq!(point.dual.as_deref(), Some("-1"));

    // The vertex method needs a simplex; box programs reject it.
    let box_instance = write_worked_box_instance(dir.path());
    assert_eq!(
        run_cli(&["solve", &path_str(&box_instance), "--solver", "frank-wolfe"]),
        2
    );
}

#[test]
fn batch_directories_run_every_instance() {
    let dir = TempDir::new().unwrap();
    let batch = dir.path().join("batch");
    fs::create_dir(&batch).unwrap();
    for seed in 0..4u64 {
        let out = batch.join(format!("inst{seed}.json"));
        assert_eq!(
            run_cli(&[
                "gen",
                "box_qp",
                "--n",
                "2",
                "--seed",
                &seed.to_string(),
                "--out",
                &path_str(&out),
            ]),
            0
        );
    }
    assert_eq!(
        run_cli(&["pipeline", &path_str(&batch), "--eps", "1/1000", "--jobs", "2"]),
        0
    );
    // A malformed file in the batch surfaces as an input error without
    // hiding the others.
    fs::write(batch.join("zz-bad.json"), "{not json").unwrap();
    assert_eq!(
        run_cli(&["pipeline", &path_str(&batch), "--eps", "1/1000"]),
        2
    );
    // An empty directory is an input error, not a silent pass.
    let empty = dir.path().join("empty");
    fs::create_dir(&empty).unwrap();
    assert_eq!(run_cli(&["pipeline", &path_str(&empty)]), 2);
}

#[test]
fn bridge_hypothesis_failures_exit_two() {
    let dir = TempDir::new().unwrap();
    // 2×2 identity matrix as a symmetric common-payoff game.
    let game = dir.path().join("ident.json");
    fs::write(
        &game,
        concat!(
            "{\n",
            "  \"kind\": \"bimatrix_game\",\n",
            "  \"n\": 2,\n",
            "  \"m\": 2,\n",
            "  \"A\": [[\"1\", \"0\"], [\"0\", \"1\"]],\n",
            "  \"B\": [[\"1\", \"0\"], [\"0\", \"1\"]]\n",
            "}\n"
        ),
    )
    .unwrap();
    let profile = write_point(
        dir.path(),
        "profile.json",
        "{\"point\": [\"1/2\", \"1/2\"], \"y\": [\"1/2\", \"1/2\"]}\n",
    );

    // ε = 3/5 ≥ 1/n = 1/2: the support argument's hypothesis fails.
    assert_eq!(
        run_cli(&[
            "bridge",
            "imitation-backward",
            &path_str(&game),
            "--point",
            &path_str(&profile),
            "--eps",
            "3/5",
        ]),
        2
    );
    // Below 1/n the same profile bridges fine.
    assert_eq!(
        run_cli(&[
            "bridge",
            "imitation-backward",
            &path_str(&game),
            "--point",
            &path_str(&profile),
            "--eps",
            "1/4",
            "--out-point",
            &path_str(&dir.path().join("y.json")),
        ]),
        0
    );
}

#[test]
fn bridge_verifies_both_sides_of_the_equivalence() {
    let dir = TempDir::new().unwrap();
    let game = dir.path().join("ident.json");
    fs::write(
        &game,
        concat!(
            "{\n",
            "  \"kind\": \"bimatrix_game\",\n",
            "  \"n\": 2,\n",
            "  \"m\": 2,\n",
            "  \"A\": [[\"1\", \"0\"], [\"0\", \"1\"]],\n",
            "  \"B\": [[\"1\", \"0\"], [\"0\", \"1\"]]\n",
            "}\n"
        ),
    )
    .unwrap();
    let mid = write_point(dir.path(), "mid.json", "{\"point\": [\"1/2\", \"1/2\"]}\n");
    let qp_out = dir.path().join("ident.qp.json");

    // (1/2, 1/2) is an exact symmetric equilibrium of the coordination
    // game and an exact KKT point of the derived program.
    assert_eq!(
        run_cli(&[
            "bridge",
            "game-to-qp",
            &path_str(&game),
            "--point",
            &path_str(&mid),
            "--eps",
            "0",
            "--out",
            &path_str(&qp_out),
        ]),
        0
    );
    assert_eq!(
        run_cli(&["verify", &path_str(&qp_out), &path_str(&mid), "--eps", "0"]),
        0
    );

    // The pure strategy (1, 0) is also an exact equilibrium here; a
    // genuinely non-equilibrium point must exit 1 on both sides.
    let off = write_point(dir.path(), "off.json", "{\"point\": [\"1/4\", \"3/4\"]}\n");
    assert_eq!(
        run_cli(&[
            "bridge",
            "game-to-qp",
            &path_str(&game),
            "--point",
            &path_str(&off),
            "--eps",
            "1/10",
        ]),
        1
    );

    // A game without the symmetric common-payoff structure violates the
    // equivalence hypothesis.
    let skew = dir.path().join("skew.json");
    fs::write(
        &skew,
        concat!(
            "{\n",
            "  \"kind\": \"bimatrix_game\",\n",
            "  \"n\": 2,\n",
            "  \"m\": 2,\n",
            "  \"A\": [[\"1\", \"0\"], [\"0\", \"1\"]],\n",
            "  \"B\": [[\"0\", \"1\"], [\"1\", \"0\"]]\n",
            "}\n"
        ),
    )
    .unwrap();
    assert_eq!(
        run_cli(&["bridge", "game-to-qp", &path_str(&skew), "--eps", "0"]),
        2
    );
}

#[test]
fn qp_to_game_maps_points_and_tolerances() {
    let dir = TempDir::new().unwrap();
    let sqp = dir.path().join("sqp.json");
    assert_eq!(
        run_cli(&["gen", "simplex_qp", "--n", "3", "--seed", "11", "--out", &path_str(&sqp)]),
        0
    );
    let game_out = dir.path().join("game.json");
    assert_eq!(
        run_cli(&[
            "bridge",
            "qp-to-game",
            &path_str(&sqp),
            "--prepare",
            "--eps",
            "1/100",
            "--out",
            &path_str(&game_out),
        ]),
        0
    );
    let file: InstanceFile =
        parse_json(&fs::read_to_string(&game_out).unwrap(), "instance").unwrap();
    let game = file.to_game::<Rational>().unwrap();
    let class = classify(&game);
    assert!(class.symmetric && class.common_payoff);

    // Without preparation a program with a linear term violates the
    // construction's hypothesis.
    assert_eq!(
        run_cli(&["bridge", "qp-to-game", &path_str(&sqp), "--eps", "1/100"]),
        2
    );
}

#[test]
fn binary_reports_are_valid_json_with_the_documented_fields() {
    let dir = TempDir::new().unwrap();
    let instance = write_worked_box_instance(dir.path());

    let output = Command::new(env!("CARGO_BIN_EXE_qpgames"))
        .args(["pipeline", &path_str(&instance), "--eps", "2/25"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let report: RunReport =
        parse_json(&String::from_utf8(output.stdout).unwrap(), "report").unwrap();
    assert_eq!(report.command, "pipeline");
    assert_eq!(report.stage, None);
    assert_eq!(report.parameters.get("delta").map(String::as_str), Some("1/100"));
    assert_eq!(report.parameters.get("M").map(String::as_str), Some("1"));
    assert!(report.verdicts.values().all(|v| *v));
    assert!(report.instance_digest.is_some());

    // The simplex verifier example: Q = −2I₂ at (1/2, 1/2), ε = 0 —
    // exit 0 with dual value −1.
    let sqp = dir.path().join("sqp.json");
    fs::write(
        &sqp,
        concat!(
            "{\n",
            "  \"kind\": \"simplex_qp\",\n",
            "  \"n\": 2,\n",
            "  \"A\": [[\"-2\", \"0\"], [\"0\", \"-2\"]],\n",
            "  \"b\": [\"0\", \"0\"],\n",
            "  \"scale\": \"1\"\n",
            "}\n"
        ),
    )
    .unwrap();
    let mid = write_point(dir.path(), "mid.json", "{\"point\": [\"1/2\", \"1/2\"]}\n");
    let output = Command::new(env!("CARGO_BIN_EXE_qpgames"))
        .args(["verify", &path_str(&sqp), &path_str(&mid), "--eps", "0"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let report: RunReport =
        parse_json(&String::from_utf8(output.stdout).unwrap(), "report").unwrap();
    assert_eq!(report.dual.as_deref(), Some("-1"));
    assert_eq!(report.residuals, Some(vec!["0".into(), "0".into()]));

    // Usage errors follow the exit contract.
    let status = Command::new(env!("CARGO_BIN_EXE_qpgames"))
        .args(["verify", "only-one-arg.json"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
}

#[test]
fn gen_without_out_prints_the_instance_itself() {
    let output = Command::new(env!("CARGO_BIN_EXE_qpgames"))
        .args(["gen", "box_qp", "--n", "2", "--seed", "7"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let file: InstanceFile =
        parse_json(&String::from_utf8(output.stdout).unwrap(), "instance").unwrap();
    assert_eq!(file.n, 2);
    file.to_box_qp::<Rational>().unwrap();
}
