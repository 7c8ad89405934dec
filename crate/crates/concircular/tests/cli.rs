use std::path::PathBuf;
use std::process::Command as Process;

use concircular::io::*;
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::fmt::Debug;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data").join(name).to_string_lossy().into_owned()
}

fn job(command: Command) -> Job {
    Job::new(command)
}

fn roundtrip<T: Serialize + DeserializeOwned + PartialEq + Debug>(json: &str) -> T {
    let v: T = serde_json::from_str(json).unwrap();
    assert_eq!(to_json(&v), json, "re-serialization differs");
    v
}

fn bin() -> Process {
    Process::new(env!("CARGO_BIN_EXE_concircular"))
}

#[test]
fn classify_translated_central_reports_translation() {
    let mut j = job(Command::Classify);
    j.ct = Some(data("translated_central_e2.json"));
    let art = run(&j).unwrap();
    let out: ClassifyOutput = roundtrip(&art.json);
    assert_eq!(out.variant.as_deref(), Some("central"));
    assert_eq!(out.translation, Some(vec!["-2".to_string(), "-1".to_string()]));
    assert_eq!(out.class, "central[1,1]");
}

#[test]
fn charpoly_and_chart_documents() {
    let mut j = job(Command::Charpoly);
    j.ct = Some(data("elliptic_e2.json"));
    let out: CharpolyOutput = roundtrip(&run(&j).unwrap().json);
    assert!(out.matches_determinant);
    assert!(out.constant_eigenvalues.is_empty());

    let mut j = job(Command::Chart);
    j.ct = Some(data("elliptic_e2.json"));
    j.u = Some("1/2, 2".into());
    let out: ChartOutput = roundtrip(&run(&j).unwrap().json);
    assert!(out.verified);
    assert_eq!(out.x_squared, ["1", "1/2"]);

    j.command = Command::Metric;
    let out: MetricOutput = roundtrip(&run(&j).unwrap().json);
    assert!(out.relative_defect < 1e-8);
}

#[test]
fn warp_documents_for_flat_and_spherical() {
    let mut j = job(Command::Warp);
    j.ct = Some(data("cylindrical_e3.json"));
    j.base = Some("3,1,0".into());
    let out: WarpOutput = roundtrip(&run(&j).unwrap().json);
    assert_eq!(out.factors.len(), 1);
    assert_eq!(out.factors[0].kind, "non_null");

    j.ct = Some(data("sphere_s2.json"));
    j.base = Some("3/5,4/5,0".into());
    let out: WarpOutput = roundtrip(&run(&j).unwrap().json);
    assert_eq!(out.sphere_kappa.as_deref(), Some("1"));
}

#[test]
fn separate_bundled_calogero_moser() {
    let mut j = job(Command::Separate);
    j.potential = Some(data("calogero_moser3.json"));
    let art = run(&j).unwrap();
    let out: SeparateOutput = roundtrip(&art.json);
    assert_eq!(out.families, ["axial[2]", "cartesian[1,2]", "central[1,2]", "central[3]"]);
    assert_eq!(out.tree.solution_dim, 4);
    assert_eq!(out.tree.solutions.len(), 3);
    assert!(art.text.contains("prolate spheroidal"));
    // Determinism.
    assert_eq!(run(&j).unwrap(), art);
}

#[test]
fn enumerate_catalogue_and_spec() {
    let mut j = job(Command::Enumerate);
    j.spec = Some(data("e3_webs.json"));
    let out: EnumerateOutput = roundtrip(&run(&j).unwrap().json);
    assert_eq!(out.count, 11);
    j.spec = Some(data("minkowski4_one_double.json"));
    let out: EnumerateOutput = roundtrip(&run(&j).unwrap().json);
    assert_eq!(out.count, 9);
}

#[test]
fn input_schemas_roundtrip() {
    let doc: CtDocument = serde_json::from_str(&std::fs::read_to_string(data("cylindrical_e3.json")).unwrap()).unwrap();
    let again: CtDocument = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
    assert_eq!(doc, again);
    let pot: PotentialDocument = serde_json::from_str(&std::fs::read_to_string(data("calogero_moser3_weighted.json")).unwrap()).unwrap();
    let again: PotentialDocument = serde_json::from_str(&serde_json::to_string(&pot).unwrap()).unwrap();
    assert_eq!(pot, again);
    assert!(from_json::<PotentialDocument>(r#"{"dim": 2, "terms": [], "bogus": 1}"#).is_err());
}

#[test]
fn binary_exit_codes() {
    let ok = bin().args(["classify", "--ct", &data("elliptic_e2.json")]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));

    let dir = std::env::temp_dir();
    let bad = dir.join("concircular_bad_ct.json");
    std::fs::write(&bad, r#"{"type": "flat", "a": [["x"]]}"#).unwrap();
    let out = bin().args(["classify", "--ct", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err: ErrorOutput = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err.code, "schema");

    let out = bin().args(["chart", "--ct", &data("elliptic_e2.json"), "--u", "1/2,1/2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));

    let d3 = dir.join("concircular_d3.json");
    std::fs::write(&d3, r#"{"type": "flat", "a": [["1","0","0"],["0","2","0"],["0","0","3"]], "m": "1"}"#).unwrap();
    let out = bin().args(["classify", "--ct", d3.to_str().unwrap(), "--space", &data("signature2.json")]).output().unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn binary_output_is_byte_identical() {
    let args = ["separate", "--potential", &data("calogero_moser3_weighted.json"), "--seed", "7"];
    let a = bin().args(args).output().unwrap();
    let b = bin().args(args).output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
