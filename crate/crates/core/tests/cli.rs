use std::ffi::OsStr;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use ei_trace::exactla::Rational;
use ei_trace::fincat::{serialize_category, symmetric_group};

const PUSHOUT: &str = r#"{
  "objects": ["(1,1)", "(0,1)", "(1,0)"],
  "morphisms": [
    {"id": "id11", "src": "(1,1)", "tgt": "(1,1)"},
    {"id": "id01", "src": "(0,1)", "tgt": "(0,1)"},
    {"id": "id10", "src": "(1,0)", "tgt": "(1,0)"},
    {"id": "y", "src": "(0,1)", "tgt": "(1,1)"},
    {"id": "z", "src": "(1,0)", "tgt": "(1,1)"}
  ],
  "identities": {"(1,1)": "id11", "(0,1)": "id01", "(1,0)": "id10"},
  "compose": []
}"#;

// A(1,1) = ℚ²; both legs read its first coordinate.
const REP: &str = r#"{
  "dims": {"(1,1)": 2, "(0,1)": 1, "(1,0)": 1},
  "action": {"y": [["1", "0"]], "z": [["1", "0"]]}
}"#;

// f(1,1) = diag(3, 7); naturality forces f(0,1) = f(1,0) = 3.
const ENDO: &str = r#"{
  "dimS": 1, "dimT": 1,
  "components": {"(1,1)": [["3", "0"], ["0", "7"]], "(0,1)": [["3"]], "(1,0)": [["3"]]}
}"#;

const BAD_UNIT: &str = r#"{
  "objects": ["*"],
  "morphisms": [{"id": "id", "src": "*", "tgt": "*"}, {"id": "g", "src": "*", "tgt": "*"}],
  "identities": {"*": "id"},
  "compose": [["g", "g", "g"], ["g", "id", "id"], ["id", "g", "id"]]
}"#;

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let f = Fixture {
            dir: TempDir::new().unwrap(),
        };
        f.write("pushout.json", PUSHOUT);
        f.write("rep.json", REP);
        f.write("endo.json", ENDO);
        f.write("bad_unit.json", BAD_UNIT);
        f.write("s3.json", &serialize_category(&symmetric_group(3)));
        f.write("broken.json", "{\"objects\": [");
        f
    }

    fn write(&self, name: &str, text: &str) {
        std::fs::write(self.path(name), text).unwrap();
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn run(args: &[&dyn AsRef<OsStr>], env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ei-trace"));
    cmd.env_remove("EI_TRACE_SEED");
    if let Some(s) = env_seed {
        cmd.env("EI_TRACE_SEED", s);
    }
    for a in args {
        cmd.arg(a);
    }
    cmd.output().unwrap()
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(bytes)))
}

fn rational(v: &Value) -> Rational {
    v.as_str().unwrap().parse().unwrap()
}

fn p(f: &Fixture, name: &str) -> PathBuf {
    f.path(name)
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn inputs(f: &Fixture) -> [PathBuf; 3] {
    [p(f, "pushout.json"), p(f, "rep.json"), p(f, "endo.json")]
}

#[test]
fn validate_exit_codes() {
    let f = Fixture::new();
    let ok = run(&[&"validate", &p(&f, "pushout.json")], None);
    assert_eq!(code(&ok), 0);
    assert_eq!(json(&ok.stdout)["valid"], true);

    let bad = run(&[&"validate", &p(&f, "bad_unit.json")], None);
    assert_eq!(code(&bad), 1);
    let report = json(&bad.stdout);
    assert_eq!(report["valid"], false);
    assert!(!report["violations"].as_array().unwrap().is_empty());

    let broken = run(&[&"validate", &p(&f, "broken.json")], None);
    assert_eq!(code(&broken), 2);
    assert_eq!(json(&broken.stderr)["error"]["kind"], "category");

    let missing = run(&[&"validate", &p(&f, "absent.json")], None);
    assert_eq!(code(&missing), 2);
    assert_eq!(json(&missing.stderr)["error"]["kind"], "io");
}

#[test]
fn coweighting_of_the_pushout() {
    let f = Fixture::new();
    let out = run(&[&"coweighting", &p(&f, "pushout.json")], None);
    assert_eq!(code(&out), 0);
    let v = json(&out.stdout);
    assert_eq!(v["methodAgreement"], true);
    let lambda = |name: &str| {
        let e = v["entries"]
            .as_array()
            .unwrap()
            .iter()
            .find(|e| e["i"] == name)
            .unwrap();
        rational(&e["lambda"])
    };
    assert_eq!(lambda("(1,1)"), Rational::from_int(-1));
    assert_eq!(lambda("(0,1)"), Rational::from_int(1));
    assert_eq!(lambda("(1,0)"), Rational::from_int(1));
}

#[test]
fn verify_pushout_report() {
    let f = Fixture::new();
    let [c, r, e] = inputs(&f);
    let out = run(&[&"verify", &c, &r, &e], None);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out.stdout);
    assert_eq!(v["schemaVersion"], 1);
    assert_eq!(v["verdict"], true);
    // 3 + 3 - (3 + 7)
    assert_eq!(rational(&v["formula"][0][0]), Rational::from_int(-4));
    let oracles: Vec<&str> = v["oracles"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| o["oracle"].as_str().unwrap())
        .collect();
    assert_eq!(oracles, ["resolution", "bar"]);
}

#[test]
fn hocolim_trace_oracles_agree() {
    let f = Fixture::new();
    let [c, r, e] = inputs(&f);
    let mut traces = Vec::new();
    for oracle in ["resolution", "bar", "auto"] {
        let out = run(&[&"hocolim-trace", &c, &r, &e, &"--oracle", &oracle], None);
        assert_eq!(code(&out), 0);
        traces.push(rational(&json(&out.stdout)["trace"][0][0]));
    }
    assert!(traces.iter().all(|t| *t == Rational::from_int(-4)));
    let group = run(&[&"hocolim-trace", &c, &r, &e, &"--oracle", &"group"], None);
    assert_eq!(code(&group), 2);
    assert_eq!(json(&group.stderr)["error"]["kind"], "oracle");
}

#[test]
fn local_traces_and_index() {
    let f = Fixture::new();
    let [c, r, e] = inputs(&f);
    let out = run(&[&"local-traces", &c, &r, &e], None);
    assert_eq!(code(&out), 0);
    let v = json(&out.stdout);
    let top = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|x| x["i"] == "(1,1)")
        .unwrap();
    assert_eq!(rational(&top["trace"][0][0]), Rational::from_int(10));

    let index = run(&[&"construct", &"index", &p(&f, "s3.json")], None);
    assert_eq!(code(&index), 0);
    let sizes: Vec<u64> = json(&index.stdout)["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["classSize"].as_u64().unwrap())
        .collect();
    assert_eq!(sizes, [1, 3, 2]);
}

#[test]
fn invalid_endomorphism_is_an_input_error() {
    let f = Fixture::new();
    f.write("skew.json", r#"{"dimS": 1, "dimT": 1, "components": {"(1,1)": [["1","0"],["0","1"]], "(0,1)": [["2"]], "(1,0)": [["1"]]}}"#);
    let out = run(
        &[
            &"verify",
            &p(&f, "pushout.json"),
            &p(&f, "rep.json"),
            &p(&f, "skew.json"),
        ],
        None,
    );
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out.stderr)["error"]["kind"], "endomorphism");
}

#[test]
fn seed_from_environment_matches_flag() {
    let flag = run(&[&"fuzz", &"--cases", &"16", &"--seed", &"11"], None);
    let env = run(&[&"fuzz", &"--cases", &"16"], Some("11"));
    let again = run(&[&"fuzz", &"--cases", &"16", &"--seed", &"11"], None);
    assert_eq!(code(&flag), 0);
    assert_eq!(flag.stdout, env.stdout);
    assert_eq!(flag.stdout, again.stdout);
    let v = json(&flag.stdout);
    assert_eq!(v["passed"], 16);
    assert_eq!(v["failed"], 0);
}

#[test]
fn fuzz_rejects_unknown_kind() {
    let out = run(&[&"fuzz", &"--kinds", &"lattice"], None);
    assert_eq!(code(&out), 2);
}
