use std::process::{Command, Output};

fn roughvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roughvar")).args(args).env_remove("ROUGHVAR_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_field(out: &str, column: &str) -> Vec<String> {
    let mut r = csv::Reader::from_reader(out.as_bytes());
    let idx = r.headers().unwrap().iter().position(|h| h == column).unwrap();
    r.records().map(|rec| rec.unwrap()[idx].to_string()).collect()
}

#[test]
fn hand_checked_values() {
    let m = stdout(&roughvar(&["--format", "csv", "mainterm", "--H", "3", "--y", "3"]));
    assert_eq!(csv_field(&m, "M"), ["1/3"]);
    let d = stdout(&roughvar(&["--format", "csv", "mainterm", "--H", "3", "--y", "3", "--method", "direct"]));
    assert_eq!(csv_field(&d, "M"), ["1/3"]);
    let v = stdout(&roughvar(&["--format", "csv", "vq", "--q", "6", "--H", "6"]));
    assert_eq!(csv_field(&v, "V_q"), ["0"]);
    let f = stdout(&roughvar(&["--format", "csv", "friable", "--X", "100", "--y", "3"]));
    assert_eq!(csv_field(&f, "psi"), ["20"]);
    let w = stdout(&roughvar(&["--format", "csv", "variance", "--X", "6", "--H", "3", "--y", "3"]));
    assert_eq!(csv_field(&w, "V"), ["1/3"]);
}

#[test]
fn refusal_exits_with_code_and_message() {
    let o = roughvar(&["--format", "csv", "converge", "--H", "1000", "--y", "3", "--X", "1000"]);
    assert_eq!(o.status.code(), Some(19));
    assert!(o.stdout.is_empty());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("E_RANGE_VIOLATED") && err.contains("--force"), "{err}");

    let forced = roughvar(&["--force", "--format", "csv", "converge", "--H", "1000", "--y", "3", "--X", "1000"]);
    assert_eq!(csv_field(&stdout(&forced), "stronger_ok"), ["false"]);
}

#[test]
fn library_errors_map_to_exit_codes() {
    let o = roughvar(&["vq", "--q", "12", "--H", "3"]);
    assert_eq!(o.status.code(), Some(13));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error[E_NOT_SQUAREFREE]"));
    // Malformed arguments are rejected by the parser before any work.
    let bad = roughvar(&["mainterm", "--H", "three", "--y", "3"]);
    assert!(!bad.status.success());
    assert!(bad.stdout.is_empty());
}

#[test]
fn output_is_byte_identical_across_runs_and_threads() {
    let grid = "256:16,1000:100,4096:64,3375:225";
    let base = roughvar(&["--threads", "1", "--format", "csv", "regimes", "--grid", grid]);
    let base = stdout(&base);
    for threads in ["1", "2", "4"] {
        let again = roughvar(&["--threads", threads, "--format", "csv", "regimes", "--grid", grid]);
        assert_eq!(stdout(&again), base, "threads = {threads}");
    }
    let v1 = stdout(&roughvar(&["--threads", "1", "--format", "json", "variance", "--X", "300000", "--H", "32", "--y", "7"]));
    let v3 = stdout(&roughvar(&["--threads", "3", "--format", "json", "variance", "--X", "300000", "--H", "32", "--y", "7"]));
    assert_eq!(v1, v3);
}

#[test]
fn csv_and_json_encode_the_same_rows() {
    let args = |f: &'static str| ["--format", f, "converge", "--H", "32", "--y", "7", "--X", "1e5,3e5,1e6"];
    let csv_out = stdout(&roughvar(&args("csv")));
    let json_out = stdout(&roughvar(&args("json")));
    let json: serde_json::Value = serde_json::from_str(&json_out).unwrap();
    assert_eq!(json["command"], "converge");
    let rows = json["rows"].as_array().unwrap();

    let mut r = csv::Reader::from_reader(csv_out.as_bytes());
    let headers: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    let records: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(records.len(), rows.len());
    for (rec, row) in records.iter().zip(rows) {
        let obj = row.as_object().unwrap();
        assert_eq!(obj.keys().cloned().collect::<Vec<_>>(), headers);
        for (h, field) in headers.iter().zip(rec.iter()) {
            match &obj[h] {
                serde_json::Value::String(s) => assert_eq!(s, field, "{h}"),
                serde_json::Value::Number(n) if n.is_f64() => {
                    assert_eq!(n.as_f64().unwrap(), field.parse::<f64>().unwrap(), "{h}")
                }
                other => assert_eq!(other.to_string(), field, "{h}"),
            }
        }
    }
    // Exact columns are "p/q" strings in JSON, never numbers.
    assert!(rows[0]["V"].is_string() && rows[0]["M"].is_string());
}

#[test]
fn thread_override_from_environment() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_roughvar"))
            .args(["--format", "csv", "variance", "--X", "100000", "--H", "32", "--y", "7"])
            .env("ROUGHVAR_THREADS", v)
            .output()
            .unwrap()
    };
    assert_eq!(stdout(&run("2")), stdout(&roughvar(&["--format", "csv", "variance", "--X", "100000", "--H", "32", "--y", "7"])));
    let bad = run("zero");
    assert_eq!(bad.status.code(), Some(21));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("ROUGHVAR_THREADS"));
}

#[test]
fn table_format_aligns_columns() {
    let out = stdout(&roughvar(&["mainterm", "--H", "3", "--y", "3"]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].split_whitespace().eq(["H", "y", "method", "M", "M_float", "H_pi_y", "ratio_M_over_H_pi_y"]));
    assert_eq!(lines[0].len(), lines[1].len());
    // Very wide exact cells must not break the layout.
    let wide = stdout(&roughvar(&["regimes", "--H", "16", "--y", "1000000"]));
    assert_eq!(wide.lines().count(), 2);
}
