mod common;

use common::{edgestat, strip_times};

#[test]
fn dist_prints_exact_and_decimal_point_mass() {
    let r = edgestat(&["dist", "--poly", "x1", "--p", "1/2", "--ell", "1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout.trim(), "1/2\t0.500000000000");
    let r = edgestat(&["dist", "--poly", "x2+x3+x4+x5+x1*x2+x1*x3+x1*x4+x1*x5", "--p", "1/3", "--ell", "2"]);
    assert_eq!(r.stdout.trim(), "80/243\t0.329218106996");
}

#[test]
fn dist_on_a_slice() {
    // K_5 edges among a uniform 3-subset of 5 vertices: always 3.
    let poly = (1..=5)
        .flat_map(|i| (i + 1..=5).map(move |j| format!("x{i}*x{j}")))
        .collect::<Vec<_>>()
        .join("+");
    let r = edgestat(&["dist", "--poly", &poly, "--slice", "5,3"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout.trim(), "3\t1/1\t1.000000000000");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(edgestat(&["dist", "--poly", "x1", "--p", "3/2"]).code, 2);
    assert_eq!(edgestat(&["dist", "--poly", "x1"]).code, 2);
    assert_eq!(edgestat(&["dist", "--poly", "x1 +* x2", "--p", "1/2"]).code, 2);
    assert_eq!(edgestat(&["enumerate", "--m", "0"]).code, 2);
    assert_eq!(edgestat(&["frobnicate"]).code, 2);
    assert_eq!(edgestat(&["verify", "table", "--max-m", "7"]).code, 2);
}

#[test]
fn numeric_flags_accept_exact_forms() {
    let a = edgestat(&["dist", "--poly", "x1+x2", "--p", "0.4", "--ell", "1"]);
    let b = edgestat(&["dist", "--poly", "x1+x2", "--p", "2/5", "--ell", "1"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout.trim(), "12/25\t0.480000000000");
}

#[test]
fn subset_cap_below_goodman_host_is_a_resource_error() {
    let r = edgestat(&["--subset-cap", "219", "construct", "--family", "two-cliques", "--k", "3", "--ell", "3", "--n", "12"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("resource limit"), "{}", r.stderr);
    let r = edgestat(&["--subset-cap", "220", "construct", "--family", "two-cliques", "--k", "3", "--ell", "1", "--n", "12"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("finite(n=12)\t9/11"));
    assert!(r.stdout.contains("limit\t3/4"));
}

#[test]
fn assignment_cap_is_enforced() {
    let r = edgestat(&["--assignment-cap", "8", "dist", "--poly", "x1+x2+x3+x4", "--p", "1/2"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("resource limit"));
}

#[test]
fn enumerate_reports_counts_and_per_s() {
    let r = edgestat(&["enumerate", "--m", "4", "--per-s"]);
    assert_eq!(r.code, 0);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert!(lines[1].starts_with("4,99,"));
    let per_s: u64 = lines[3..].iter().map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(per_s, 99);
}

#[test]
fn verify_single_targets() {
    for target in ["prop033", "prop027", "better34"] {
        let r = edgestat(&["verify", target]);
        assert_eq!(r.code, 0, "{target}: {}", r.stderr);
        assert!(r.stdout.ends_with("overall: PASS\n"));
    }
}

#[test]
fn construct_bipartite_prints_reference_constant() {
    let r = edgestat(&["construct", "--family", "bipartite", "--a", "1", "--k", "50", "--ell", "49"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("reference 1^1/(e^1 1!)\t0.367879441171"));
}

#[test]
fn json_output_is_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for workers in ["1", "3"] {
        let path = dir.path().join(format!("table{workers}.json"));
        let r = edgestat(&["--workers", workers, "--json", path.to_str().unwrap(), "verify", "table", "--max-m", "4"]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        strip_times(&mut v);
        outputs.push(serde_json::to_string(&v).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let mut members = Vec::new();
    for workers in ["1", "4"] {
        let path = dir.path().join(format!("m{workers}.jsonl"));
        edgestat(&["--workers", workers, "--json", path.to_str().unwrap(), "enumerate", "--m", "5"]);
        members.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(members[0], members[1]);
}

#[test]
fn recheck_accepts_honest_reports_and_flags_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("reports.json");
    let r = edgestat(&["--json", path.to_str().unwrap(), "verify", "table", "--max-m", "3"]);
    assert_eq!(r.code, 0);
    let r = edgestat(&["recheck", path.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    assert_eq!(r.stdout.lines().count(), 2);

    let single = dir.path().join("prop033.json");
    edgestat(&["--json", single.to_str().unwrap(), "verify", "prop033"]);
    let text = std::fs::read_to_string(&single).unwrap();
    assert_eq!(edgestat(&["recheck", single.to_str().unwrap()]).code, 0);
    let tampered = text.replace("\"80/243\"", "\"80/244\"");
    assert_ne!(tampered, text);
    std::fs::write(&single, tampered).unwrap();
    let r = edgestat(&["recheck", single.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.starts_with("prop033") && r.stdout.contains("recomputation differs"), "{}", r.stdout);
}

#[test]
fn recheck_of_missing_file_is_an_error() {
    assert_eq!(edgestat(&["recheck", "/nonexistent/reports.json"]).code, 2);
}
