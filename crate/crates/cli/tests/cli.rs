use std::path::PathBuf;
use std::process::{Command, Output};

use hyperfact::eqmodel::{example_third_order, Spectrum};
use hyperfact::mpfield::{parse_cplx, parse_real, Ctx};

fn equation() -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../equations/third_order.eq");
    p.to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperfact")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field<'a>(line: &'a str, key: &str) -> &'a str {
    line.split(key).nth(1).unwrap().split_whitespace().next().unwrap()
}

#[test]
fn analyze_reports_roots_and_exponents() {
    let e = equation();
    let o = run(&["analyze", "-e", &e, "--digits", "30"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let roots: Vec<&str> = text.lines().filter(|l| l.starts_with("root ")).collect();
    assert_eq!(roots.len(), 3);
    let want = [(2.0, 0.0), (0.0, 1.0), (0.0, -1.0)];
    for (line, (re, im)) in roots.iter().zip(want) {
        let lam = parse_cplx(field(line, "lambda = "), 200).unwrap().to_c64();
        let mu = parse_cplx(field(line, "mu = "), 200).unwrap().to_c64();
        assert!((lam.re - re).abs() < 1e-25 && (lam.im - im).abs() < 1e-25, "{line}");
        assert!((mu.re - 0.5).abs() < 1e-25 && mu.im.abs() < 1e-25, "{line}");
    }
    assert!(text.contains("eta = 0 admissible"));
}

#[test]
fn coeffs_count_zero_is_header_only() {
    let e = equation();
    let o = run(&["coeffs", "-e", &e, "--sol", "1", "--count", "0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "s,re,im\n");
}

#[test]
fn printed_coefficients_round_trip() {
    let e = equation();
    let o = run(&["coeffs", "-e", &e, "--sol", "2", "--count", "40", "--digits", "20"]);
    assert!(o.status.success());
    let ctx = Ctx::new(20).unwrap();
    let sp = Spectrum::compute(&example_third_order(), &ctx).unwrap();
    let want = sp.entries[1].coefficients(40);
    let rows: Vec<String> = stdout(&o).lines().skip(1).map(str::to_string).collect();
    assert_eq!(rows.len(), 40);
    for (row, w) in rows.iter().zip(&want) {
        let parts: Vec<&str> = row.split(',').collect();
        let re = parse_real(parts[1], ctx.bits()).unwrap();
        let im = parse_real(parts[2], ctx.bits()).unwrap();
        assert_eq!(re, w.re, "{row}");
        assert_eq!(im, w.im, "{row}");
    }
}

#[test]
fn repro_table1_is_deterministic_and_matches() {
    let a = run(&["repro-table1"]);
    let b = run(&["repro-table1"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let want = [("0 ", 68, -11), ("1 ", 85, -17), ("2 ", 86, -22)];
    for (prefix, mant, exp) in want {
        let line = text.lines().find(|l| l.starts_with(prefix)).unwrap();
        let rel: f64 = line.split_whitespace().last().unwrap().parse().unwrap();
        let e = rel.log10().floor() as i32;
        let m = (rel / 10f64.powi(e) * 10.0).round() as i64;
        assert_eq!(e, exp, "{line}");
        assert!((m - mant).abs() <= 1, "{line}");
    }
    assert!(text.contains("K21 = -5.4527032667963220005e-1+2.3807964635130112660e-1i"));
}

#[test]
fn connection_file_feeds_evaluate() {
    let e = equation();
    let dir = std::env::temp_dir().join(format!("hyperfact-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let kfile = dir.join("k.txt");
    let kf = kfile.to_str().unwrap();
    let common = ["-e", &e, "--digits", "30"];
    for sol in ["1", "2", "3"] {
        let mut args = vec!["connection", "--sol", sol, "--out", kf];
        args.extend(common);
        if sol != "1" {
            args.extend(["--k", kf]);
        }
        let o = run(&args);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let base = ["evaluate", "--sol", "1", "--level", "1", "--z", "30+i"];
    let with_file = run(&[&base[..], &common, &["--k", kf]].concat());
    let solved = run(&[&base[..], &common].concat());
    assert!(with_file.status.success() && solved.status.success());
    let value = |o: &Output| stdout(o).lines().next().unwrap().to_string();
    let (a, b) = (value(&with_file), value(&solved));
    let (va, vb) = (parse_cplx(&a[6..], 200).unwrap(), parse_cplx(&b[6..], 200).unwrap());
    assert!(va.rel_diff(&vb) < 1e-25, "{a} vs {b}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn ledger_csv_is_written() {
    let e = equation();
    let path = std::env::temp_dir().join(format!("hyperfact-ledger-{}.csv", std::process::id()));
    let p = path.to_str().unwrap();
    let o = run(&["evaluate", "-e", &e, "--sol", "1", "--z", "30+i", "--digits", "30", "--ledger", p]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("path,s,abs_term,normalized_abs_term\n"));
    assert_eq!(csv.lines().count(), 1 + 14);
    let _ = std::fs::remove_file(&path);
}

#[test]
fn hterm_routes_agree() {
    let args = ["hterm", "--z", "10", "--m", "0.5", "--m", "2", "--sigma", "1@0", "--sigma", "1@-2", "--digits", "30"];
    let a = run(&args);
    let b = run(&[&args[..], &["--route", "series"]].concat());
    assert!(a.status.success() && b.status.success());
    let v = |o: &Output| parse_cplx(stdout(o).trim().strip_prefix("H2 = ").unwrap(), 200).unwrap();
    assert!(v(&a).rel_diff(&v(&b)) < 1e-25);
}

#[test]
fn bound2f1_prints_positive_bound() {
    let o = run(&["bound2f1", "--a", "0.3", "--b", "0.4", "--c", "0.6", "--z", "-1.5", "--lambda", "25", "--N", "8", "--digits", "30"]);
    assert!(o.status.success());
    let line = stdout(&o).lines().next().unwrap().to_string();
    let b = parse_real(line.strip_prefix("bound ").unwrap(), 128).unwrap();
    assert!(b > 0);
}

#[test]
fn exit_codes() {
    let e = equation();
    let code = |args: &[&str]| run(args).status.code().unwrap();
    assert_eq!(code(&["plan", "-e", &e, "--sol", "1", "--z", "30+x"]), 2);
    assert_eq!(code(&["coeffs", "-e", "/nonexistent/eq", "--sol", "1", "--count", "1"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["coeffs", "-e", &e, "--sol", "4", "--count", "1"]), 3);
    assert_eq!(code(&["analyze", "-e", &e, "--digits", "5"]), 3);
    assert_eq!(code(&["bound2f1", "--a", "0.3", "--b", "0.4", "--c", "0.6", "--z", "2", "--lambda", "25", "--N", "8"]), 3);
    assert_eq!(code(&["connection", "-e", &e, "--sol", "1", "--anchors", "3,4", "--terms", "2", "--digits", "30"]), 4);
}
