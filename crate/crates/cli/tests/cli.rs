use std::path::Path;
use std::process::{Command, Output};

use empeq::format::game_to_json;
use empeq::{corpus, Game};
use serde_json::Value;

fn empeq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_empeq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert_eq!(o.status.code(), Some(0), "{}", stderr(o));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn corpus_files_round_trip() {
    for (name, text) in [
        ("gamma1", corpus::GAMMA1_JSON),
        ("psi", corpus::PSI_JSON),
        ("phi", corpus::PHI_JSON),
    ] {
        let o = empeq(&["corpus", "emit", name]);
        assert_eq!(stdout(&o), text, "{}", name);
    }
    let dir = tempfile::tempdir().unwrap();
    for name in corpus::NAMES {
        let file = dir.path().join(format!("{}.json", name));
        let o = empeq(&["corpus", "emit", name, "--c1", "0.5", "--c2", "3", "--out", path_str(&file)]);
        assert_eq!(o.status.code(), Some(0));
        let first = std::fs::read_to_string(&file).unwrap();
        let g = empeq::format::game_from_json(&first).unwrap();
        assert_eq!(game_to_json(&g), first, "{}", name);
        let o = empeq(&["nash", "--game", path_str(&file)]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let list = stdout(&empeq(&["corpus", "list"]));
    assert_eq!(list.lines().count(), corpus::NAMES.len());
}

#[test]
fn nash_flags_on_gamma2c() {
    let v = json(&empeq(&["nash", "--game", "gamma2c", "--c1", "2", "--c2", "2"]));
    let eq = v["equilibria"].as_array().unwrap();
    assert_eq!(eq.len(), 3);
    let mut seen = Vec::new();
    for e in eq {
        let k = ["a1", "a2", "a3"]
            .iter()
            .position(|a| e["profile"]["P1"][*a] == 1)
            .unwrap();
        let flags = (
            e["undominated"].as_bool().unwrap(),
            e["perfect"]["status"].as_str().unwrap(),
            e["proper"]["status"].as_str().unwrap(),
        );
        seen.push((k, flags));
    }
    seen.sort();
    assert_eq!(
        seen,
        vec![
            (0, (true, "verified", "verified")),
            (1, (true, "verified", "refuted")),
            (2, (false, "refuted", "refuted")),
        ]
    );
}

#[test]
fn psi_region_area_is_a_quarter() {
    let o = empeq(&["region", "--game", "psi", "--resolution", "200"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("coord_1,coord_2,satisfied"));
    let flags: Vec<bool> = lines.map(|l| l.ends_with(",1")).collect();
    assert_eq!(flags.len(), 201 * 201);
    let area = flags.iter().filter(|&&f| f).count() as f64 / flags.len() as f64;
    assert!((area - 0.25).abs() <= 0.02, "{}", area);
}

#[test]
fn output_is_byte_identical() {
    let runs: [&[&str]; 4] = [
        &["nash", "--corpus", "phi"],
        &["empirical", "--corpus", "psi"],
        &["trace", "--corpus", "gamma1", "--lambda-max", "100"],
        &["region", "--corpus", "gamma1", "--resolution", "50", "--kind", "strict"],
    ];
    for args in runs {
        let a = empeq(args);
        let b = empeq(args);
        assert_eq!(a.status.code(), Some(0), "{:?}", args);
        assert_eq!(a.stdout, b.stdout, "{:?}", args);
    }
}

#[test]
fn spline_build_check_and_audit() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("splines.json");
    let profile = r#"{"P1": [0.8, 0.2], "P2": {"b1": 0.8, "b2": 0.2}}"#;
    let o = empeq(&["ccost", "build", "--game", "gamma1", "--profile", profile, "--epsilon", "0.05", "--out", path_str(&file)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&empeq(&["ccost", "check", "--game", "gamma1", "--splines", path_str(&file), "--profile", profile]));
    assert_eq!(v["equilibrium"], true);
    assert!(v["max_defect"].as_f64().unwrap() < 1e-12);
    let other = r#"{"P1": [0.5, 0.5], "P2": [0.8, 0.2]}"#;
    let v = json(&empeq(&["ccost", "check", "--game", "gamma1", "--splines", path_str(&file), "--profile", other]));
    assert_eq!(v["equilibrium"], false);
    let audit = ["ccost", "audit", "--splines", path_str(&file), "--samples", "200", "--seed", "7"];
    let a = empeq(&audit);
    assert_eq!(a.stdout, empeq(&audit).stdout);
    assert_eq!(json(&a)["P1"]["clean"], true);
    let shown = stdout(&empeq(&["ccost", "show", "--splines", path_str(&file), "--points", "10"]));
    assert_eq!(shown.lines().count(), 1 + 2 * 10);
    assert!(shown.lines().any(|l| l == "P1,1,0,0"));
}

#[test]
fn empirical_verdicts() {
    let member = json(&empeq(&["empirical", "--game", "gamma2c", "--profile", r#"{"P1":[0,1,0],"P2":[0,1,0]}"#]));
    assert_eq!(member["verdict"]["decision"], "member");
    assert_eq!(member["verdict"]["witnesses"].as_array().unwrap().len(), 4);
    let refuted = json(&empeq(&["empirical", "--game", "gamma1", "--profile", r#"{"P1":[0,1],"P2":[0,1]}"#]));
    assert_eq!(refuted["verdict"]["decision"], "non-member");
    assert_eq!(refuted["verdict"]["refutation"]["kind"], "dominance");
    let relaxed = json(&empeq(&["empirical", "--game", "gamma2c", "--m", "0", "--profile", r#"{"P1":[0,0,1],"P2":[0,0,1]}"#]));
    assert_eq!(relaxed["verdict"]["decision"], "member");
}

/// Γ_2^c with c = (0.5, 0.5) and a third player with one action.
fn three_player() -> Game {
    let g = corpus::gamma2c(0.5, 0.5).unwrap();
    let mut players = g.players().to_vec();
    players.push("P3".into());
    let mut actions: Vec<Vec<String>> = (0..2).map(|i| g.actions(i).to_vec()).collect();
    actions.push(vec!["c1".into()]);
    Game::from_fn(players, actions, |p| {
        let mut u = g.payoff_vector(&p[..2]).to_vec();
        u.push(0.0);
        u
    })
    .unwrap()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"players\": [\"A\"],\n  \"actions\": {\"A\": [\"x\"]},\n  \"payoffs\": [\n    {\"profile\": {\"A\": \"x\"}, \"u\": {\"A\": \"one\"}}\n  ]\n}\n").unwrap();
    let o = empeq(&["nash", "--game", path_str(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("$.payoffs[0].u.A"), "{}", stderr(&o));
    std::fs::write(&bad, "{\"players\": [\"A\"],\n  \"actions\": ").unwrap();
    let o = empeq(&["nash", "--game", path_str(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    assert_eq!(empeq(&["nash", "--game", "no/such/file.json"]).status.code(), Some(2));
    assert_eq!(empeq(&["nash", "--corpus", "gamma1", "--bogus"]).status.code(), Some(2));
    assert_eq!(empeq(&["nash", "--corpus", "gamma1", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(empeq(&["corpus", "emit", "gamma2c", "--c1", "-1"]).status.code(), Some(2));
    let not_nash = empeq(&["empirical", "--corpus", "gamma1", "--profile", r#"{"P1":[0.5,0.5],"P2":[1,0]}"#]);
    assert_eq!(not_nash.status.code(), Some(2));

    let three = dir.path().join("three.json");
    std::fs::write(&three, game_to_json(&three_player())).unwrap();
    let o = empeq(&["empirical", "--game", path_str(&three), "--profile", r#"{"P1":[0,1,0],"P2":[0,1,0],"P3":[1]}"#]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"]["decision"], "inconclusive");
}
