use std::path::Path;
use std::process::{Command, Output};

use derange::catalog::L2_7_S4_GRP;
use serde_json::Value;

fn derange(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_derange"))
        .args(args)
        .env_remove("DERANGE_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn line_value(out: &Output, key: &str) -> String {
    let prefix = format!("{key} = ");
    stdout(out)
        .lines()
        .find_map(|l| l.strip_prefix(&prefix).map(str::to_string))
        .unwrap_or_else(|| panic!("no `{key}` line in {}", stdout(out)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn delta_m11_natural() {
    let out = derange(&["delta", "--group", "M11", "--action", "natural"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("delta = 23/66"));
}

#[test]
fn delta_float_is_secondary() {
    let out = derange(&["delta", "--group", "M11", "--float"]);
    assert_eq!(line_value(&out, "delta"), "23/66");
    assert!(stdout(&out).contains("0.348485"));
}

#[test]
fn delta_alt5_pairs_matches_enumeration() {
    let out = derange(&["delta", "--group", "alt:5", "--action", "ksubsets:2"]);
    assert!(out.status.success());
    // even permutations of 1..5 moving every 2-subset
    let mut moved = 0;
    let mut total = 0;
    let perms = permutations(5);
    for p in &perms {
        if parity(p) {
            continue;
        }
        total += 1;
        let fixes = (0..5).any(|a| (a + 1..5).any(|b| (p[a] == a && p[b] == b) || (p[a] == b && p[b] == a)));
        if !fixes {
            moved += 1;
        }
    }
    let g = gcd(moved, total);
    assert_eq!(line_value(&out, "delta"), format!("{}/{}", moved / g, total / g));
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// true for odd permutations
fn parity(p: &[usize]) -> bool {
    let inversions = (0..p.len()).flat_map(|i| (i + 1..p.len()).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
    inversions % 2 == 1
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn cosets_of_non_subgroup_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let foo = write(dir.path(), "foo.grp", "degree 5\n(1,2,3)\n(3,4,5)\n");
    let bar = write(dir.path(), "bar.grp", "degree 5\n(1,2)\n");
    let out = derange(&["delta", "--group", &format!("file:{foo}"), "--action", &format!("cosets:{bar}")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a subgroup"));
}

#[test]
fn width_l2_7_on_cosets_of_s4() {
    let dir = tempfile::tempdir().unwrap();
    let s4 = write(dir.path(), "s4.grp", L2_7_S4_GRP);
    let out = derange(&["width", "--group", "L2(7)", "--action", &format!("cosets:{s4}")]);
    assert!(out.status.success());
    assert_eq!(line_value(&out, "width"), "2");
    assert_eq!(line_value(&out, "decomposition"), "C2∪CD");
}

#[test]
fn width_m11_and_c2() {
    assert_eq!(line_value(&derange(&["width", "--group", "M11", "--action", "natural"]), "width"), "2");
    let c2 = derange(&["width", "--group", "C2", "--action", "natural"]);
    assert!(c2.status.success());
    assert_eq!(line_value(&c2, "width"), "Unbounded(8)");
}

#[test]
fn caps_exit_two() {
    let out = derange(&["delta", "--group", "M12", "--order-cap", "1000"]);
    assert_eq!(out.status.code(), Some(2));
    let out = derange(&["delta", "--group", "alt:9", "--action", "ksubsets:4", "--index-cap", "100"]);
    assert_eq!(out.status.code(), Some(2));
    let out = derange(&["width", "--group", "M11", "--product-cap", "100"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_one_and_help_zero() {
    assert_eq!(derange(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(derange(&["delta"]).status.code(), Some(1));
    assert_eq!(derange(&["delta", "--group", "nonsense"]).status.code(), Some(1));
    assert_eq!(derange(&["delta", "--group", "M11", "--action", "orbits"]).status.code(), Some(1));
    assert_eq!(derange(&["--help"]).status.code(), Some(0));
    assert_eq!(derange(&["verify", "nosuch"]).status.code(), Some(1));
}

#[test]
fn json_is_versioned_and_deterministic() {
    let a = derange(&["delta", "--group", "M11", "--json"]);
    let b = derange(&["delta", "--group", "M11", "--json", "--jobs", "1"]);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["delta"], "23/66");

    let p1 = derange(&["pair", "--group", "M11", "--json", "--seed", "3"]);
    let p2 = derange(&["pair", "--group", "M11", "--json", "--seed", "3", "--jobs", "2"]);
    assert!(p1.status.success());
    assert_eq!(p1.stdout, p2.stdout);
    let v: Value = serde_json::from_slice(&p1.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["checked_order"], "7920");
}

#[test]
fn pair_certificate_round_trips_through_check() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let cert = cert.to_str().unwrap();
    let out = derange(&["pair", "--group", "alt:7", "--action", "ksubsets:2", "--output", cert]);
    assert!(out.status.success());
    assert!(derange(&["check", cert]).status.success());

    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(cert).unwrap()).unwrap();
    v["checked_order"] = Value::from("5040");
    std::fs::write(cert, v.to_string()).unwrap();
    assert_eq!(derange(&["check", cert]).status.code(), Some(3));
}

#[test]
fn verify_alt_passes() {
    let out = derange(&["verify", "alt"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.starts_with("PASS")));
    assert!(!text.lines().any(|l| l.starts_with("FAIL")));
}

#[test]
fn families_sweep_tsv() {
    let out = derange(&["families", "--sweep", "16", "--crosscheck"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "family\tq\tdelta\tkind\tbrute_force\tstatus");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split('\t').collect()).collect();
    assert!(rows.iter().all(|r| r.len() == 6));
    let find = |f: &str, q: &str| rows.iter().find(|r| r[0] == f && r[1] == q).unwrap().clone();
    assert_eq!(find("suzuki-borel", "8")[2], "28/65");
    assert_eq!(find("psl2-borel", "8")[5], "match");
    assert_eq!(find("sp4-borel", "4")[3], "lower_bound");
}

#[test]
fn alt_tsv_rows() {
    let out = derange(&["alt", "--n-min", "5", "--n-max", "7"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().next().unwrap(), "n\tk\ta\tb\tc\tf\tbound");
    assert_eq!(text.lines().count(), 1 + 4 + 5 + 6);
    let row: Vec<&str> = text.lines().find(|l| l.starts_with("5\t2\t")).unwrap().split('\t').collect();
    assert_eq!(row[4], "3/5");
}

#[test]
fn cache_dir_memoises_class_tables() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_derange"))
            .args(["delta", "--group", "M12", "--json"])
            .env("DERANGE_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let first = run();
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    let second = run();
    assert_eq!(first.stdout, second.stdout);
    let v: Value = serde_json::from_slice(&second.stdout).unwrap();
    assert_eq!(v["delta"], "107/288");

    // a corrupt entry is recomputed rather than trusted
    let entry = files[0].as_ref().unwrap().path();
    std::fs::write(&entry, "garbage\n").unwrap();
    assert_eq!(run().stdout, first.stdout);
}
