//! Command-line behaviour: records, exit codes, round trips, determinism.

use spherical_mc::cli::{decode_table_csv, encode_table_csv, parse_args, run, OutputRecord, Status};

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("spherical-mc").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn single_record(args: &[&str]) -> OutputRecord {
    let (code, out, err) = invoke(args);
    assert_eq!(code, 0, "{err}");
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 1, "{out}");
    OutputRecord::decode(lines[0]).unwrap()
}

#[test]
fn wigner3j_record() {
    let r = single_record(&["wigner3j", "--l", "2", "2", "0", "--m", "1", "-1", "0"]);
    assert_eq!(r.status, Status::Ok);
    let exact = r.exact.unwrap();
    assert_eq!(exact.len(), 1);
    assert_eq!(exact[0].sign, -1);
    assert_eq!(exact[0].rational, "1/5");
    assert!(exact[0].sqrt);
    assert_eq!(r.value, Some(-1.0 / 5f64.sqrt()));
}

#[test]
fn wigner3j_selection_rule_zero() {
    let r = single_record(&["wigner3j", "--l", "3", "1", "1", "--m", "0", "0", "0"]);
    assert_eq!(r.status, Status::ZeroBySelectionRule);
    assert_eq!(r.value, Some(0.0));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["wigner3j", "--l", "2", "2", "x", "--m", "1", "-1", "0"][..],
        &["wigner3j", "--l", "2", "2", "0", "--m", "3", "-3", "0"],
        &["mc", "--a", "2", "3", "--b", "1", "0"],
        &["rhw", "--A", "1", "0", "--C", "1", "--wave", "3", "0", "--probe", "1", "1"],
        &["rhw", "--threshold", "3", "--wave", "3", "2"],
        &["nonsense"],
        &[],
    ] {
        let (code, out, _) = invoke(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(out.is_empty());
    }
}

#[test]
fn mc_records() {
    let r = single_record(&["mc", "--a", "3", "2", "--b", "2", "-2"]);
    assert!(r.value.unwrap() > 0.0);
    let r = single_record(&["mc", "--a", "4", "1", "--b", "1", "0"]);
    assert_eq!(r.value, Some(0.0));
    let r = single_record(&["mc", "--a", "3", "0", "--b", "2", "1", "--rotation", "5.0"]);
    assert!(r.value.unwrap() > 0.0);
    let r = single_record(&["mc", "--a", "3", "0", "--b", "2", "1", "--rotation", "2.9"]);
    assert!(r.value.unwrap() < 0.0);
    let verbose = single_record(&["mc", "--a", "3", "2", "--b", "2", "-2", "--verbose"]);
    assert!(verbose.detail.is_some());
}

#[test]
fn rhw_records() {
    let r = single_record(&["rhw", "--A", "1", "0", "--C", "1", "--wave", "3", "2", "--probe", "1", "1", "--K", "2"]);
    assert_eq!(r.value, Some(2.0));
    let r = single_record(&["rhw", "--A", "0", "0", "--C", "1", "--wave", "3", "2", "--probe", "4", "2"]);
    assert_eq!(r.value, Some(-72.0));
    let r = single_record(&["rhw", "--threshold", "2", "--wave", "3", "2", "--K", "0"]);
    let exact = r.exact.unwrap();
    assert_eq!(exact[0].rational, "8/5");
    assert_eq!(exact[0].pi_exp, 1.0);
    assert!((r.value.unwrap() - 8.0 * std::f64::consts::PI / 5.0).abs() < 1e-14);
}

#[test]
fn critical_table_csv() {
    let (code, out, _) = invoke(&["critical-table", "--l1", "3", "--l2-max", "5", "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("l2,m2,ratio,direction,status\n"));
    let rows = decode_table_csv(&out).unwrap();
    assert_eq!(rows.len(), 25);
    assert_eq!(rows.iter().filter(|r| r.status == Status::Ok).count(), 14);
    let cell = rows.iter().find(|r| r.l2 == 2 && r.m2 == 1).unwrap();
    assert!((cell.ratio.unwrap() - 2.983).abs() / 2.983 < 5e-3);
    let order: Vec<(u32, i32)> = rows.iter().map(|r| (r.l2, r.m2)).collect();
    let mut sorted = order.clone();
    sorted.sort();
    assert_eq!(order, sorted);
    assert_eq!(encode_table_csv(&rows), out);

    let (_, out, _) = invoke(&["critical-table", "--l1", "4"]);
    let rows = decode_table_csv(&out).unwrap();
    assert!(rows.iter().all(|r| r.status != Status::Ok));
    assert!(rows.iter().all(|r| r.ratio.is_none()));
}

#[test]
fn critical_table_json() {
    let (code, out, _) = invoke(&["critical-table", "--l1", "7", "--l2-max", "6", "--format", "json"]);
    assert_eq!(code, 0);
    for line in out.lines() {
        let r = OutputRecord::decode(line).unwrap();
        assert_eq!(r.to_json_line(), line);
        match r.status {
            Status::Ok => assert!(r.value.is_some()),
            _ => assert!(r.value.is_none()),
        }
    }
    assert_eq!(out.lines().count(), 36);
}

#[test]
fn json_round_trip_is_bit_exact() {
    for args in [
        &["wigner3j", "--l", "20", "15", "30", "--m", "-7", "7", "0"][..],
        &["mc", "--a", "7", "3", "--b", "5", "-2", "--rotation", "-1/3"],
        &["rhw", "--threshold", "3", "--wave", "5", "3", "--K", "1/7"],
    ] {
        let (_, out, _) = invoke(args);
        let line = out.trim_end();
        let r = OutputRecord::decode(line).unwrap();
        assert_eq!(r.to_json_line(), line);
        let v = r.value.unwrap();
        let total: f64 = r.exact.unwrap().iter().map(|t| t.to_f64().unwrap()).sum();
        assert!((total - v).abs() <= 1e-12 * v.abs().max(1.0));
    }
}

#[test]
fn decode_rejects_inconsistent_records() {
    assert!(OutputRecord::decode("{}").is_err());
    let bad = r#"{"command":"x","request":{},"status":"undefined","value":1.0}"#;
    assert!(OutputRecord::decode(bad).is_err());
    let extra = r#"{"command":"x","request":{},"status":"ok","surprise":1}"#;
    assert!(OutputRecord::decode(extra).is_err());
    assert!(decode_table_csv("a,b\n1,2\n").is_err());
    assert!(decode_table_csv("l2,m2,ratio,direction,status\n1,1,,,ok\n").is_err());
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["critical-table", "--l1", "7", "--l2-max", "6", "--format", "json"][..],
        &["verify", "--suite", "theorem", "--lmax", "8"],
        &["mc", "--a", "5", "3", "--b", "4", "-1", "--verbose"],
    ] {
        assert_eq!(invoke(args), invoke(args));
    }
}

#[test]
fn verify_suites_pass() {
    for args in [
        &["verify", "--suite", "theorem", "--lmax", "10"][..],
        &["verify", "--suite", "oracle", "--lmax", "5"],
        &["verify", "--suite", "table"],
        &["verify", "--suite", "wigner", "--lmax", "5"],
        &["verify", "--suite", "structure", "--lmax", "4"],
    ] {
        let (code, out, err) = invoke(args);
        assert_eq!(code, 0, "{args:?}: {out}{err}");
        let v: serde_json::Value = serde_json::from_str(out.lines().next().unwrap()).unwrap();
        assert_eq!(v["passed"], true);
    }
    let (_, out, _) = invoke(&["verify", "--suite", "oracle", "--lmax", "5"]);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert!(v["max_deviation"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn parse_only() {
    assert!(parse_args(["spherical-mc", "verify"]).is_ok());
    assert!(parse_args(["spherical-mc", "mc", "--a", "1"]).is_err());
    assert!(parse_args(["spherical-mc", "critical-table", "--l1", "3", "--format", "xml"]).is_err());
}
