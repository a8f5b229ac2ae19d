mod common;

use aksz_cli::report::CheckReport;
use common::{aksz, root};

fn tmp_model(name: &str, src: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("aksz-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, src).unwrap();
    p
}

#[test]
fn cs_su2_passes() {
    let r = aksz(&["check", "models/cs_su2.model"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(r.stdout.contains("5 passed, 0 failed"));
}

#[test]
fn broken_cs_fails_with_exit_one() {
    let r = aksz(&["check", "models/cs_su2_broken.model", "--format", "json"]);
    assert_eq!(r.code, 1);
    let rep = CheckReport::from_json(&r.stdout).unwrap();
    assert!(rep.summary.failed > 0);
    let verify = rep.checks.iter().find(|c| c.name == "verify(T)").unwrap();
    assert_eq!(verify.status.to_string(), "fail");
    // residual is the canonical rendering of the failing Q² component
    assert_eq!(verify.residual, "ψ2: -ψ1*ψ2*ψ3");
}

#[test]
fn empty_model_is_an_empty_pass() {
    let r = aksz(&["check", "models/empty.model", "--format", "json"]);
    assert_eq!(r.code, 0);
    let rep = CheckReport::from_json(&r.stdout).unwrap();
    assert!(rep.checks.is_empty());
    assert_eq!(rep.summary.failed, 0);
}

#[test]
fn input_errors_exit_two_with_position_and_hint() {
    let cases = [
        ("lex.model", "space M { x: 0 }\npoly p on M = x $ 2\n", "2:17", "hint"),
        ("syntax.model", "space M { x: 0 \n", "", "hint"),
        ("unknown.model", "space M { ψ1: 1 }\npoly p on M = ψ2\n", "2:15", "did you mean `ψ1`?"),
        (
            "degree.model",
            "space M { x: 1 }\npoly p on M : 2 = x\n",
            "2:1",
            "change the annotation to `: 1`",
        ),
        ("ctor.model", "algebra g = su3()\n", "1:13", "use one of"),
    ];
    for (name, src, pos, hint) in cases {
        let p = tmp_model(name, src);
        let r = aksz(&["check", p.to_str().unwrap()]);
        assert_eq!(r.code, 2, "{name}: {}", r.stderr);
        assert!(r.stderr.contains(pos), "{name}: {}", r.stderr);
        assert!(r.stderr.contains(hint), "{name}: {}", r.stderr);
    }
    assert_eq!(aksz(&["check", "no/such/file.model"]).code, 2);
    assert_eq!(aksz(&["check"]).code, 2);
    assert_eq!(aksz(&["frobnicate"]).code, 2);
}

#[test]
fn runtime_degeneracy_is_a_failure_not_an_input_error() {
    let src = "algebra g = su2()\ntarget T = poisson_sigma(g)\npre P = pre_observable(T, pairs=[[a, 1, ap], [b, -1, bp]], action=b*a)\ncheck pushforward(P, lagrangian=\"SF\")\n";
    let p = tmp_model("degenerate.model", src);
    let r = aksz(&["check", p.to_str().unwrap(), "--format", "json"]);
    assert_eq!(r.code, 1, "{}", r.stdout);
    let rep = CheckReport::from_json(&r.stdout).unwrap();
    assert!(rep.checks[0].residual.starts_with("error:"), "{}", rep.checks[0].residual);
}

#[test]
fn golden_reports() {
    for name in ["cs_su2", "cs_su2_broken", "loops_su2", "pushforward_psm"] {
        let r = aksz(&["check", &format!("models/{name}.model"), "--format", "json", "--no-timing"]);
        let path = root().join(format!("crates/aksz-cli/tests/golden/{name}.json"));
        if std::env::var_os("UPDATE_GOLDEN").is_some() {
            std::fs::write(&path, &r.stdout).unwrap();
        }
        let golden = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}; run with UPDATE_GOLDEN=1", path.display()));
        assert_eq!(r.stdout, golden, "{name}");
    }
}

#[test]
fn report_reloads_saved_json() {
    let r = aksz(&["check", "models/cs_su2_broken.model", "--format", "json", "--no-timing"]);
    let p = tmp_model("saved.json", &r.stdout);
    let again = aksz(&["report", p.to_str().unwrap(), "--format", "json"]);
    assert_eq!(again.code, 0);
    assert_eq!(again.stdout, r.stdout);
    let text = aksz(&["report", p.to_str().unwrap(), "--format", "text"]);
    assert!(text.stdout.contains("FAIL    verify(T)"));
    assert_eq!(aksz(&["report", "models/cs_su2_broken.model", "--format", "text"]).code, 0);
}

#[test]
fn pushforward_command() {
    let r = aksz(&["pushforward", "models/pushforward_psm.model", "--lagrangian", "SS", "--pre", "D"]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["observable"], "-i - i*x1^2 - i*x2^2 - i*x3^2");
    assert_eq!(v["gauge_residual"], "0");
    // two pre-observables and no --pre
    assert_eq!(aksz(&["pushforward", "models/pushforward_psm.model", "--lagrangian", "SS"]).code, 2);
    // wrong number of letters
    assert_eq!(
        aksz(&["pushforward", "models/pushforward_psm.model", "--lagrangian", "S", "--pre", "D"]).code,
        2
    );
    // degenerate gauge fixing is a failure
    assert_eq!(
        aksz(&["pushforward", "models/pushforward_psm.model", "--lagrangian", "SF", "--pre", "D"]).code,
        1
    );
}

#[test]
fn wilson_and_torsion_commands() {
    let r = aksz(&["wilson", "data/square.loop", "--rep", "data/spin_half.rep"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["mode"], "float");
    assert_eq!(v["edges"], 4);
    let t = aksz(&["torsion", "data/square.loop", "--rep", "data/spin_half.rep"]);
    let v: serde_json::Value = serde_json::from_str(&t.stdout).unwrap();
    assert_eq!(v["match"], true);
    let e = aksz(&["torsion", "data/rotation.loop", "--exact"]);
    let v: serde_json::Value = serde_json::from_str(&e.stdout).unwrap();
    assert_eq!(
        (v["mode"].as_str(), v["direct"].as_str(), v["match"].as_bool()),
        (Some("exact"), Some("1"), Some(true))
    );
    // exact mode needs group elements; algebra loops need a representation
    assert_eq!(aksz(&["wilson", "data/square.loop", "--rep", "data/spin_half.rep", "--exact"]).code, 2);
    assert_eq!(aksz(&["wilson", "data/square.loop"]).code, 2);
}

#[test]
fn exact_flag_rejects_floating_loops_in_models() {
    let r = aksz(&["check", "models/loops_su2.model", "--exact", "--format", "json"]);
    assert_eq!(r.code, 1);
    let rep = CheckReport::from_json(&r.stdout).unwrap();
    for c in &rep.checks {
        let group = c.name.starts_with("wilson(G") || c.name.starts_with("torsion(G");
        assert_eq!(c.status.to_string() == "pass", group, "{}", c.name);
    }
}

#[test]
fn fmt_prints_canonical_form() {
    let r = aksz(&["fmt", "models/hamiltonian_explicit.model"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("model \"hamiltonian_explicit\"\nspace M { ψ1: 1, ψ2: 1, ψ3: 1 }\n"));
}
