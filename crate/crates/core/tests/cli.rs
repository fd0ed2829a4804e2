use gsp4_ssc::cli::{self, report_emit, CheckReport, Format, RunConfig};
use gsp4_ssc::Error;

fn cfg() -> RunConfig {
    RunConfig { no_timing: true, ..RunConfig::default() }
}

#[test]
fn empty_reports_are_valid_documents() {
    let json = report_emit(&[], Format::Json).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&json).unwrap();
    assert_eq!(v, serde_json::json!([]));
    let csv = String::from_utf8(report_emit(&[], Format::Csv).unwrap()).unwrap();
    assert_eq!(csv.trim(), "check,params,expected,computed,pass,seconds,terms");
    assert!(report_emit(&[], Format::Text).unwrap().is_empty());
}

#[test]
fn json_round_trips_with_schema_fields() {
    let reports = cli::run("dims", &cfg()).unwrap();
    let json = report_emit(&reports, Format::Json).unwrap();
    let back: Vec<CheckReport> = serde_json::from_slice(&json).unwrap();
    assert_eq!(back, reports);
    let v: serde_json::Value = serde_json::from_slice(&json).unwrap();
    let keys: Vec<&str> = v[0].as_object().unwrap().keys().map(String::as_str).collect();
    for k in ["check", "params", "expected", "computed", "pass", "seconds", "terms"] {
        assert!(keys.contains(&k), "{k}");
    }
}

#[test]
fn sampled_checks_are_deterministic() {
    let a = report_emit(&cli::run("characters", &cfg()).unwrap(), Format::Json).unwrap();
    let b = report_emit(&cli::run("characters", &cfg()).unwrap(), Format::Json).unwrap();
    assert_eq!(a, b);
}

#[test]
fn unknown_check_and_bad_config() {
    assert!(matches!(cli::run("nope", &cfg()), Err(Error::UnknownCheck(_))));
    let bad = RunConfig { t: 3, ..cfg() };
    assert!(matches!(cli::run("dims", &bad), Err(Error::BadConfig(_))));
    assert!(RunConfig::from_args(["x", "--p", "4"]).is_err());
    assert!(RunConfig::from_args(["x", "--sign", "2"]).is_err());
}

#[test]
fn exit_codes() {
    let dir = std::env::temp_dir().join(format!("gsp4-ssc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("r.csv");
    let args = ["gsp4-ssc", "--check", "dims", "--format", "csv", "--out", out.to_str().unwrap()];
    assert_eq!(cli::main_with_args(args), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("0,0,0,0,0,1,2,4,6,9,12,16,20"));
    assert_eq!(cli::main_with_args(["gsp4-ssc", "--check", "nope"]), 2);
    // an exhausted enumeration budget becomes a failed report, exit 1
    assert_eq!(cli::main_with_args(["gsp4-ssc", "--check", "formal-degree", "--bfs-cap", "10", "--out", out.to_str().unwrap()]), 1);
}

#[test]
fn config_file_fills_defaults_and_flags_win() {
    let dir = std::env::temp_dir().join(format!("gsp4-ssc-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("c.json");
    std::fs::write(&path, r#"{"t": 2, "c1": 1, "trials": 7}"#).unwrap();
    let c = RunConfig::from_args(["x", "--config", path.to_str().unwrap(), "--c1", "2"]).unwrap();
    assert_eq!((c.t, c.c1, c.trials), (2, 2, 7));
    std::fs::write(&path, r#"{"bogus": 1}"#).unwrap();
    assert!(RunConfig::from_args(["x", "--config", path.to_str().unwrap()]).is_err());
}
