use std::fs;
use std::process::{Command, Output};

fn chatelet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chatelet"))
        .args(args)
        .env_remove("CHATELET_SHARDS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn classify_reports_verdicts_and_exit_codes() {
    let o = chatelet(&["classify", "1", "-2", "-1", "3"]);
    assert!(o.status.success());
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["verdict"]["kind"], "HasseFailure");
    assert_eq!(json["orbit"].as_array().unwrap().len(), 4);

    let o = chatelet(&["classify", "1", "1", "1", "2"]);
    assert!(stdout(&o).contains("SolubleNoObstruction"));

    let o = chatelet(&["classify", "1", "1", "1", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("determinant is 0"));
}

#[test]
fn census_smallest_box() {
    let o = chatelet(&["census", "--max-norm", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "2");
    assert_eq!(row[4], "4");
}

#[test]
fn census_files_do_not_depend_on_shards() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.csv");
    let eight = dir.path().join("eight.csv");
    for (path, shards) in [(&one, "1"), (&eight, "8")] {
        let o = chatelet(&[
            "census",
            "--max-norm",
            "120",
            "--checkpoints",
            "30,60",
            "--shards",
            shards,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    assert_eq!(fs::read(&one).unwrap(), fs::read(&eight).unwrap());
    assert_eq!(fs::read(one.with_extension("json")).unwrap(), fs::read(eight.with_extension("json")).unwrap());
    assert_eq!(fs::read_to_string(&one).unwrap().lines().count(), 4);
}

#[test]
fn shard_count_can_come_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_chatelet"))
        .args(["census", "--max-norm", "20"])
        .env("CHATELET_SHARDS", "3")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(stdout(&o), stdout(&chatelet(&["census", "--max-norm", "20"])));
}

#[test]
fn bad_flags_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("census.csv");
    let out_str = out.to_str().unwrap();
    for args in [
        vec!["census", "--max-norm", "ten", "--out", out_str],
        vec!["census", "--max-norm", "10", "--checkpoints", "8,4", "--out", out_str],
        vec!["census", "--max-norm", "10", "--shards", "0", "--out", out_str],
    ] {
        let o = chatelet(&args);
        assert!(!o.status.success(), "{args:?}");
        assert!(!out.exists());
    }
}

#[test]
fn verify_writes_claims_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("verify.json");
    let o = chatelet(&["verify", "--max-norm", "100", "--checkpoints", "50", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let claims: Vec<serde_json::Value> = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let find = |id: &str| claims.iter().find(|c| c["claim_id"] == id).unwrap_or_else(|| panic!("{id}"));
    let table_rows = claims
        .iter()
        .filter(|c| c["claim_id"].as_str().unwrap().starts_with("table1/("))
        .count();
    assert_eq!(table_rows, 22);
    assert_eq!(find("family/k=3mod4/k<=199")["verdict"], "match");
    assert_eq!(find("assembly/published-rows")["verdict"], "holds");
    assert_eq!(find("tau_loc_2")["paper_value"], "93/128");
    assert_eq!(find("sigma_loc_2")["paper_value"], "33/128");
    assert_eq!(find("sum/T")["computed_value"], "6144");
    assert!(claims.iter().all(|c| c["verdict"] != "violated"));
    // The summary has one line per claim plus a total.
    assert_eq!(stdout(&o).lines().count(), claims.len() + 1);
}
