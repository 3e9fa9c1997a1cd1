use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stokes-afem")).args(args).output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn example1_writes_one_record_per_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["example1", "--theta", "0.7", "--max-iter", "7", "--out", path(dir.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let records = read(&dir.path().join("records.csv"));
    assert_eq!(records.lines().count(), 1 + 8);
    for m in 0..=7 {
        assert!(dir.path().join(format!("meshes/m{m}.txt")).exists());
    }
    assert!(dir.path().join("pressure_m0.txt").exists());
    assert!(dir.path().join("pressure_m7.txt").exists());
    assert_eq!(read(&dir.path().join("table.csv")).lines().count(), 1 + 8);
    assert!(!dir.path().join("validation.csv").exists());
}

#[test]
fn bad_theta_exits_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["example1", "--theta", "1.5", "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("theta"), "{}", stderr(&o));
}

#[test]
fn zero_threads_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["example2", "--threads", "0", "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_run_file_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("mesh.txt");
    fs::write(&mesh, stokes_afem::mesh::Mesh::unit_square(2).unwrap().to_text()).unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "theta = 0.5\nboundary = cavity\n").unwrap();
    let o = run(&["solve", path(&mesh), path(&cfg), "--out", path(&dir.path().join("o"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("max_iter"), "{}", stderr(&o));
}

#[test]
fn malformed_mesh_line_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let text = stokes_afem::mesh::Mesh::unit_square(2).unwrap().to_text();
    let lines: Vec<&str> = text.lines().collect();
    let bad = lines.iter().position(|l| l.starts_with("t ")).unwrap();
    let mut broken: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
    broken[bad] = "t 0 1".into();
    let mesh = dir.path().join("mesh.txt");
    fs::write(&mesh, broken.join("\n")).unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "theta = 0.5\nmax_iter = 1\nboundary = cavity\n").unwrap();
    let o = run(&["solve", path(&mesh), path(&cfg), "--out", path(&dir.path().join("o"))]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains(&format!("line {}", bad + 1)), "{err}");
    assert!(err.contains("mesh.txt"), "{err}");
}

#[test]
fn solve_on_example_mesh_matches_example1() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let o = run(&["example1", "--theta", "0.6", "--max-iter", "4", "--no-timings", "--out", path(&a)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# same run from files\ntheta = 0.6\nmax_iter = 4\nboundary = example1\n").unwrap();
    let b = dir.path().join("b");
    let mesh = a.join("meshes/m0.txt");
    let o = run(&["solve", path(&mesh), path(&cfg), "--no-timings", "--out", path(&b)]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["records.csv", "table.csv", "pressure_m0.txt", "pressure_m4.txt", "meshes/m4.txt"] {
        assert_eq!(read(&a.join(f)), read(&b.join(f)), "{f} differs");
    }
}

#[test]
fn repeated_runs_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let outs: Vec<_> = ["x", "y"]
        .iter()
        .map(|n| {
            let out = dir.path().join(n);
            let o = run(&["example2", "--max-iter", "3", "--no-timings", "--out", path(&out)]);
            assert!(o.status.success(), "{}", stderr(&o));
            out
        })
        .collect();
    for f in ["records.csv", "table.csv", "pressure_m3.txt", "meshes/m3.txt"] {
        assert_eq!(read(&outs[0].join(f)), read(&outs[1].join(f)), "{f} differs");
    }
}

#[test]
fn cavity_pressure_and_estimate_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["example2", "--max-iter", "2", "--dump-estimates", "--out", path(dir.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let p0 = read(&dir.path().join("pressure_m0.txt"));
    let header: Vec<usize> = p0.lines().next().unwrap().split_whitespace().map(|t| t.parse().unwrap()).collect();
    assert_eq!(header, vec![81, 128]);
    assert!(dir.path().join("pressure_m2.txt").exists());
    for m in 0..=2 {
        let csv = read(&dir.path().join(format!("estimates/m{m}.csv")));
        let nt = read(&dir.path().join(format!("meshes/m{m}.txt")));
        let mesh = stokes_afem::mesh::Mesh::parse_text(&nt).unwrap();
        assert_eq!(csv.lines().count(), 1 + mesh.n_triangles());
    }
}

#[test]
fn validation_problem_writes_its_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["example1", "--max-iter", "2", "--error-problem", "first", "--out", path(dir.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = read(&dir.path().join("validation.csv"));
    let mut lines = v.lines();
    assert_eq!(lines.next().unwrap(), "m,nt,eta_g,eta_validation");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    for r in rows {
        let eta: f64 = r[2].parse().unwrap();
        let val: f64 = r[3].parse().unwrap();
        assert!(val > 0.0 && val / eta > 0.2 && val / eta < 5.0, "{eta} {val}");
    }
}

#[test]
fn tagged_boundary_run_file() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("sq.txt");
    fs::write(&mesh, stokes_afem::mesh::Mesh::unit_square(4).unwrap().to_text()).unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "theta = 0.5\nmax_iter = 2\nboundary = tags\nbc.3 = 1 0\n").unwrap();
    let o = run(&["solve", path(&mesh), path(&cfg), "--out", path(&dir.path().join("o"))]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rec = read(&dir.path().join("o/records.csv"));
    assert_eq!(rec.lines().count(), 4);
}
