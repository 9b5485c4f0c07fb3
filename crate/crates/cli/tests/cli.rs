use std::path::Path;
use std::process::{Command, Output};

use basmajian::config::{
    matrix_from_json, matrix_to_json, parse_complex, LanguageJson, LoopJson, RepJson, RootJson, RunConfig,
};
use basmajian::output::fmt_complex;
use basmajian_core::schottky::{torus_matrices, RootChoice};
use basmajian_core::symbolic::LanguageSpec;
use basmajian_core::Complex;
use proptest::prelude::*;
use tempfile::tempdir;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_basmajian")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Value of a `key = value` line.
fn value(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .to_string()
}

fn num(text: &str, key: &str) -> f64 {
    value(text, key).parse().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn diverging_julia_parameter_exits_with_2() {
    let o = bin(&["identity", "--c", "1.05i"]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn degenerate_input_exits_with_3() {
    assert_eq!(bin(&["identity", "--c", "0.25"]).status.code(), Some(3));
    assert_eq!(bin(&["identity", "--target", "similarity", "--c", "1.5"]).status.code(), Some(3));
    assert_eq!(bin(&["identity", "--c", "not-a-number"]).status.code(), Some(3));
    assert_eq!(bin(&["identity"]).status.code(), Some(3));
}

#[test]
fn failed_root_search_exits_with_3() {
    let o = bin(&["dim", "--target", "similarity", "--c", "1e-31"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_with_64() {
    assert_eq!(bin(&["bogus"]).status.code(), Some(64));
    assert_eq!(bin(&["identity", "--nope"]).status.code(), Some(64));
    assert_eq!(bin(&["dim", "--method", "guess", "--c", "-3"]).status.code(), Some(64));
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_basmajian"))
        .args(["dim", "--target", "similarity", "--c", "0.3"])
        .env("BASMAJIAN_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(64));
    let o = Command::new(env!("CARGO_BIN_EXE_basmajian"))
        .args(["dim", "--target", "similarity", "--c", "0.3"])
        .env("BASMAJIAN_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn missing_config_file_exits_with_1() {
    assert_eq!(bin(&["identity", "--config", "/nonexistent/run.json"]).status.code(), Some(1));
}

#[test]
fn invalid_config_values_exit_with_3() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"c": "-3", "eps": -1.0}"#).unwrap();
    assert_eq!(bin(&["identity", "--config", path_str(&cfg)]).status.code(), Some(3));
    std::fs::write(&cfg, r#"{"c": "-3", "unknown": 1}"#).unwrap();
    assert_eq!(bin(&["identity", "--config", path_str(&cfg)]).status.code(), Some(1));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"c": "0.25", "max_len": 10}"#).unwrap();
    let o = bin(&["identity", "--config", path_str(&cfg), "--c", "-3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(num(&stdout(&o), "depth"), 10.0);
}

#[test]
fn julia_term_and_gap_csv() {
    let dir = tempdir().unwrap();
    let terms = dir.path().join("terms.csv");
    let gaps = dir.path().join("gaps.csv");
    let o = bin(&[
        "identity",
        "--c",
        "-3",
        "--max-len",
        "10",
        "--out",
        path_str(&terms),
        "--gaps",
        path_str(&gaps),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lhs = value(&text, "lhs");
    assert!(lhs.starts_with("4.6055512754639"), "{lhs}");
    // Far from convergence the gap is the geometric tail itself.
    let (gap, tail) = (num(&text, "gap"), num(&text, "tail_bound"));
    assert!((gap - tail).abs() < 1e-4 * tail, "{gap} vs {tail}");

    let body = std::fs::read_to_string(&terms).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("length,word,re,im,abs"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), (1 << 11) - 1);
    assert!(rows[0].starts_with("0,,"));
    assert!(rows[1].starts_with("1,1,") || rows[1].starts_with("1,2,"));

    let body = std::fs::read_to_string(&gaps).unwrap();
    assert!(body.starts_with("length,word,endpoint1_re,endpoint1_im,endpoint2_re,endpoint2_im,abs_diff\n"));
    assert_eq!(body.lines().count(), 1 << 11);
}

#[test]
fn term_csv_sums_to_the_partial_sum() {
    let dir = tempdir().unwrap();
    let terms = dir.path().join("terms.csv");
    let o = bin(&["identity", "--c", "-2.5", "--max-len", "12", "--out", path_str(&terms)]);
    assert_eq!(o.status.code(), Some(0));
    let partial: f64 = value(&stdout(&o), "partial_sum").trim_end_matches("+0i").parse().unwrap();
    let mut r = csv::Reader::from_path(&terms).unwrap();
    let total: f64 = r.records().map(|rec| rec.unwrap()[2].parse::<f64>().unwrap()).sum();
    assert!((total - partial).abs() < 1e-10, "{total} vs {partial}");
}

#[test]
fn gaps_flag_rejected_for_other_targets() {
    let dir = tempdir().unwrap();
    let g = dir.path().join("g.csv");
    let o = bin(&["identity", "--target", "similarity", "--c", "0.3", "--gaps", path_str(&g)]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn identical_runs_give_identical_bytes() {
    let dir = tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = bin(&["identity", "--c", "-4+0.5i", "--max-len", "9", "--out", path_str(&p)]);
        assert_eq!(o.status.code(), Some(0));
        (o.stdout, std::fs::read(p).unwrap())
    };
    assert_eq!(run("a.csv"), run("b.csv"));
    let locus = |name: &str| {
        let p = dir.path().join(name);
        let o = bin(&["locus", "--rays", "6", "--depth", "8", "--tol", "0.01", "--out", path_str(&p)]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(p).unwrap()
    };
    assert_eq!(locus("l1.csv"), locus("l2.csv"));
}

#[test]
fn similarity_third_sums_to_one() {
    let o = bin(&["identity", "--target", "similarity", "--c", "0.3333333333333333"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(num(&text, "gap") < 1e-12);
    assert_eq!(value(&text, "lhs"), "1+0i");
}

#[test]
fn schottky_from_config_matches_preset() {
    let (x, y) = torus_matrices(Complex::new(5.0, 0.0), RootChoice::Larger).unwrap();
    let rep = RepJson {
        generators: vec![matrix_to_json(&x), matrix_to_json(&y)],
        boundary_words: vec!["abAB".into()],
        language: LanguageJson::torus(),
    };
    let cfg = RunConfig { rep: Some(rep), eps: Some(1e-3), ..RunConfig::default() };
    let dir = tempdir().unwrap();
    let path = dir.path().join("rep.json");
    std::fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let from_config = bin(&["identity", "--target", "schottky", "--config", path_str(&path)]);
    let from_preset = bin(&["identity", "--target", "schottky", "--preset", "gamma", "--eps", "1e-3"]);
    assert_eq!(from_config.status.code(), Some(0));
    let text = stdout(&from_config);
    let lhs: f64 = value(&text, "lhs").split('+').next().unwrap().parse().unwrap();
    assert!((lhs - 1351f64.acosh()).abs() < 1e-9);
    for key in ["partial_sum", "depth"] {
        assert_eq!(value(&text, key), value(&stdout(&from_preset), key));
    }
}

#[test]
fn monodromy_csv_for_gamma() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("m.csv");
    let o = bin(&["monodromy", "--loop", "gamma", "--max-len", "2", "--steps", "128", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(value(&stdout(&o), "total"), "12pi");
    let body = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = body.lines().collect();
    assert_eq!(rows[0], "word,winding_integer,monodromy");
    for row in ["a,1,2", "b,1,2", "A,1,2", "B,1,2", "ab,1,2", "AB,1,2", "aB,0,0", "Ab,0,0"] {
        assert!(rows.contains(&row), "{row}");
    }
    assert_eq!(*rows.last().unwrap(), "total,6,12");
}

#[test]
fn monodromy_from_loop_config_matches_preset() {
    let cfg = RunConfig {
        loop_: Some(LoopJson { generators: ["X".into(), "Y".into()], radius: 5.0, root: RootJson::Larger }),
        ..RunConfig::default()
    };
    let dir = tempdir().unwrap();
    let path = dir.path().join("loop.json");
    std::fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let args = ["--max-len", "2", "--steps", "128"];
    let a = bin(&[&["monodromy", "--loop", "config", "--config", path_str(&path)][..], &args].concat());
    let b = bin(&[&["monodromy", "--loop", "gamma"][..], &args].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let missing = bin(&["monodromy", "--loop", "config"]);
    assert_eq!(missing.status.code(), Some(3));
}

#[derive(serde::Deserialize)]
struct Dim {
    method: String,
    value: f64,
    bracket: (f64, f64),
    depth: usize,
}

fn dim(args: &[&str]) -> Dim {
    let o = bin(&[&["dim"][..], args].concat());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn dim_json_for_similarity_third() {
    let moran = 2f64.ln() / 3f64.ln();
    for method in ["pressure", "levelsum", "cutout"] {
        let d = dim(&["--target", "similarity", "--c", "0.3333333333333333", "--method", method]);
        assert_eq!(d.method, method);
        assert!(d.bracket.0 <= d.value && d.value <= d.bracket.1);
        let tol = if method == "cutout" { 0.05 } else { 1e-6 };
        assert!((d.value - moran).abs() < tol, "{method}: {}", d.value);
    }
    let d = dim(&["--target", "similarity", "--c", "0.3333333333333333", "--depth", "7"]);
    assert_eq!(d.depth, 7);
}

#[test]
fn dim_brackets_overlap_at_minus_three() {
    let p = dim(&["--c", "-3", "--method", "pressure"]);
    let c = dim(&["--c", "-3", "--method", "cutout"]);
    let l = dim(&["--c", "-3", "--method", "levelsum"]);
    assert!(c.bracket.0 <= p.bracket.1 && p.bracket.0 <= c.bracket.1);
    assert!((l.value - p.value).abs() < 1e-3);
}

#[test]
fn dim_below_one_near_the_cusp() {
    assert!(dim(&["--c", "-2.05"]).value < 1.0);
}

#[test]
fn pressure_curve_csv() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("p.csv");
    dim(&["--c", "-3", "--depth", "8", "--out", path_str(&out)]);
    let mut r = csv::Reader::from_path(&out).unwrap();
    assert_eq!(r.headers().unwrap(), vec!["t", "pressure", "depth"]);
    let rows: Vec<(f64, f64)> =
        r.records().map(|x| x.unwrap()).map(|x| (x[0].parse().unwrap(), x[1].parse().unwrap())).collect();
    assert_eq!(rows.len(), 41);
    assert!((rows[0].1 - 2f64.ln()).abs() < 1e-9);
    assert!(rows.windows(2).all(|w| w[1].1 < w[0].1));
}

#[test]
fn small_locus_with_svg() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("locus.csv");
    let svg = dir.path().join("locus.svg");
    let o = bin(&[
        "locus", "--rays", "4", "--depth", "8", "--tol", "0.01", "--out", path_str(&out), "--svg", path_str(&svg),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let mut r = csv::Reader::from_path(&out).unwrap();
    assert_eq!(r.headers().unwrap(), vec!["theta", "r_star", "r_lo", "r_hi", "lambda_low", "lambda_high"]);
    let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 4);
    let crossed = rows.iter().filter(|x| !x[1].is_empty()).count();
    assert_eq!(num(&stdout(&o), "points") as usize, crossed);
    for row in rows.iter().filter(|x| !x[1].is_empty()) {
        let lo: f64 = row[2].parse().unwrap();
        let hi: f64 = row[3].parse().unwrap();
        assert!(hi - lo <= 0.01 && lo < hi);
        assert!(row[4].parse::<f64>().unwrap() < 1.0);
    }
    let pi_row = &rows[2];
    assert!((pi_row[0].parse::<f64>().unwrap() - std::f64::consts::PI).abs() < 1e-12);
    assert!((pi_row[1].parse::<f64>().unwrap() - 2.0).abs() < 0.05);
    let body = std::fs::read_to_string(&svg).unwrap();
    assert!(body.starts_with("<svg"));
    assert_eq!(body.matches("fill=\"black\"").count(), crossed);
}

#[test]
fn locus_rejects_bad_ranges() {
    assert_eq!(bin(&["locus", "--r-min", "3", "--r-max", "2"]).status.code(), Some(3));
    assert_eq!(bin(&["locus", "--depth", "3"]).status.code(), Some(3));
    assert_eq!(bin(&["locus", "--rays", "0"]).status.code(), Some(3));
}

#[test]
fn plot_skips_no_crossing_rows() {
    let dir = tempdir().unwrap();
    let input = dir.path().join("in.csv");
    std::fs::write(
        &input,
        "theta,r_star,r_lo,r_hi,lambda_low,lambda_high\n0,1.5,1.49,1.51,0.99,1.01\n1,,,,,\n3.14159,2.0,1.99,2.01,0.99,\n",
    )
    .unwrap();
    let o = bin(&["plot", "--input", path_str(&input)]);
    assert_eq!(o.status.code(), Some(0));
    let svg = stdout(&o);
    assert!(svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("fill=\"black\"").count(), 2);
    assert_eq!(svg.matches("stroke-dasharray").count(), 2);
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x,y\n1,2\n").unwrap();
    assert_eq!(bin(&["plot", "--input", path_str(&bad)]).status.code(), Some(3));
}

#[test]
fn language_json_shape() {
    let text = r#"{"alphabet":"abAB","order":"a>b>A>B","reduced":true,"forbidden_prefixes":["abA","ba"],"forbidden_suffixes":["BA","bAB"]}"#;
    let lang: LanguageJson = serde_json::from_str(text).unwrap();
    assert_eq!(lang, LanguageJson::torus());
    assert_eq!(lang.to_spec().unwrap(), LanguageSpec::torus());
    let bad = LanguageJson { alphabet: "abAB".into(), order: Some("a>b>A>C>c".into()), ..LanguageJson::torus() };
    assert!(bad.to_spec().is_err());
}

#[test]
fn matrix_json_shape() {
    let m: [[[f64; 2]; 2]; 2] = serde_json::from_str("[[[2,0],[0,0]],[[0,0],[0.5,0]]]").unwrap();
    let map = matrix_from_json(&m).unwrap();
    assert_eq!(matrix_to_json(&map), m);
    let singular: [[[f64; 2]; 2]; 2] = [[[1.0, 0.0], [2.0, 0.0]], [[2.0, 0.0], [4.0, 0.0]]];
    assert!(matrix_from_json(&singular).is_err());
}

proptest! {
    #[test]
    fn complex_text_round_trip(re in -1e6..1e6f64, im in -1e6..1e6f64) {
        let z = Complex::new(re, im);
        prop_assert_eq!(parse_complex(&fmt_complex(z)).unwrap(), z);
    }

    #[test]
    fn matrix_json_round_trip(e in prop::array::uniform4((-3.0..3.0f64, -3.0..3.0f64))) {
        let m = [[[e[0].0, e[0].1], [e[1].0, e[1].1]], [[e[2].0, e[2].1], [e[3].0, e[3].1]]];
        if let Ok(map) = matrix_from_json(&m) {
            let again = matrix_from_json(&matrix_to_json(&map)).unwrap();
            prop_assert!(again.approx_eq(&map, 1e-12));
        }
    }
}
