mod support;

use std::fs;

use support::{evoipd, fixture, read_csv, run_dir, stderr, stdout};

fn write_set(dir: &std::path::Path, attitude: &str, bodies: &[&str]) {
    fs::create_dir_all(dir).unwrap();
    fs::write(
        dir.join("set.meta"),
        format!("model_label = fixture\nprompt_label = default\nattitude = {attitude}\nsize = {}\n", bodies.len()),
    )
    .unwrap();
    for (i, body) in bodies.iter().enumerate() {
        fs::write(dir.join(format!("s{i}.ipds")), format!("strategy s{i} {attitude} {{ {body} }}\n")).unwrap();
    }
}

/// AllD, AllC and TFT sets of one strategy each.
fn canonical_pair(root: &std::path::Path) -> std::path::PathBuf {
    let pair = root.join("canonical");
    write_set(&pair.join("aggressive"), "aggressive", &["start D; default -> D"]);
    write_set(&pair.join("cooperative"), "cooperative", &["start C; default -> C"]);
    write_set(&pair.join("neutral"), "neutral", &["start C; rule if opp_last == D -> D; default -> C"]);
    pair
}

#[test]
fn canonical_fixture_payoffs() {
    let tmp = tempfile::tempdir().unwrap();
    let pair = canonical_pair(tmp.path());
    let out = evoipd(
        &["tournament", "--strategies", pair.to_str().unwrap(), "--noise", "0", "--reps", "2", "--out", tmp.path().join("runs").to_str().unwrap()],
        None,
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = read_csv(&run_dir(&out).join("payoffs.csv"));
    assert_eq!(rows.len(), 9);
    let cell = |r: &str, c: &str| rows.iter().find(|x| x["row"] == r && x["col"] == c).unwrap()["mean_payoff"].clone();
    assert!(cell("cooperative", "cooperative").starts_with("3.000"));
    assert!(cell("aggressive", "cooperative").starts_with("5.000"));
    assert!(cell("cooperative", "aggressive").starts_with("0.000"));
    assert!(cell("neutral", "aggressive").starts_with("0.999"));

    for name in ["payoffs.csv", "cooperation.csv", "strategies.csv", "manifest.toml"] {
        let text = fs::read_to_string(run_dir(&out).join(name)).unwrap();
        assert!(text.starts_with("# manifest: "), "{name}");
    }
}

#[test]
fn missing_meta_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let pair = canonical_pair(tmp.path());
    fs::remove_file(pair.join("neutral/set.meta")).unwrap();
    let out = evoipd(&["tournament", "--strategies", pair.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("neutral"), "{}", stderr(&out));
}

#[test]
fn parse_errors_report_file_and_line() {
    let tmp = tempfile::tempdir().unwrap();
    let pair = canonical_pair(tmp.path());
    fs::write(pair.join("cooperative/s0.ipds"), "strategy s0 cooperative {\n  start C;\n  rule if round >> 3 -> D;\n  default -> C\n}\n").unwrap();
    for args in [vec!["validate", pair.to_str().unwrap()], vec!["tournament", "--strategies", pair.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]] {
        let out = evoipd(&args, None);
        assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
        assert!(stderr(&out).contains("s0.ipds:3:"), "{}", stderr(&out));
    }
}

#[test]
fn synth_is_deterministic_and_sized() {
    let tmp = tempfile::tempdir().unwrap();
    let dirs: Vec<_> = ["one", "two"].iter().map(|d| tmp.path().join(d)).collect();
    for d in &dirs {
        let out = evoipd(&["synth", "--attitude", "cooperative", "--seed", "1", "--size", "3", "--out", d.to_str().unwrap()], None);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let mut names: Vec<_> = fs::read_dir(&dirs[0]).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 4);
    for n in &names {
        assert_eq!(fs::read(dirs[0].join(n)).unwrap(), fs::read(dirs[1].join(n)).unwrap());
    }
    assert!(fs::read_to_string(dirs[0].join("set.meta")).unwrap().contains("size = 3"));

    let out = evoipd(&["validate", dirs[0].to_str().unwrap()], None);
    assert!(out.status.success());
    assert!(stdout(&out).contains("3 strategies"));
}

#[test]
fn invalid_attitude_lists_choices() {
    let tmp = tempfile::tempdir().unwrap();
    let out = evoipd(&["synth", "--attitude", "hostile", "--seed", "1", "--out", tmp.path().to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("aggressive") && err.contains("cooperative") && err.contains("neutral"), "{err}");
}

#[test]
fn unwritable_output_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = evoipd(&["synth", "--attitude", "neutral", "--seed", "1", "--out", blocker.join("sub").to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn empty_results_dir_is_a_schema_error() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let out = evoipd(&["metrics", "--results", empty.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("no result tables"));
}

#[test]
fn malformed_table_names_the_column() {
    let tmp = tempfile::tempdir().unwrap();
    let table = tmp.path().join("eq.csv");
    fs::write(&table, "model,prompt,composition,noise,pct_a,pct_c\nm,default,4:4:4,0,10,20\n").unwrap();
    let out = evoipd(&["metrics", "--from-paper", table.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("pct_n"), "{}", stderr(&out));

    fs::write(&table, "model,prompt,composition,noise,pct_a,pct_c,pct_n\nm,default,4:4:4,zero,10,20,70\n").unwrap();
    let out = evoipd(&["metrics", "--from-paper", table.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("noise"), "{}", stderr(&out));
}

#[test]
fn grid_with_missing_pair_names_the_cell_and_finishes_the_rest() {
    let tmp = tempfile::tempdir().unwrap();
    canonical_pair(tmp.path());
    let grid = tmp.path().join("grid.toml");
    fs::write(&grid, "pairs = [\"canonical\", \"absent\"]\niterations = 5\nfitness_rounds = 10\n").unwrap();
    let out = evoipd(&["moran", "--grid", grid.to_str().unwrap(), "--out", tmp.path().join("runs").to_str().unwrap()], Some(1));
    assert_ne!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("cell absent/4:4:4 clean"), "{}", stderr(&out));
    let rows = read_csv(&run_dir(&out).join("equilibria.csv"));
    assert_eq!(rows.len(), 4);
}

#[test]
fn drift_grid_prints_a_summary_table() {
    let tmp = tempfile::tempdir().unwrap();
    let pair = tmp.path().join("same");
    let out = evoipd(&["synth", "--attitude", "all", "--mirror", "cooperative", "--seed", "2", "--size", "4", "--out", pair.to_str().unwrap()], None);
    assert!(out.status.success());
    let grid = tmp.path().join("grid.toml");
    fs::write(&grid, "pairs = [\"same\"]\niterations = 30\nfitness_rounds = 10\n[[regime]]\ncomposition = \"4:4:4\"\nnoise = 0.0\n").unwrap();
    let out = evoipd(&["moran", "--grid", grid.to_str().unwrap(), "--out", tmp.path().join("runs").to_str().unwrap()], None);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("4:4:4 clean") && text.contains("synthetic/default"), "{text}");
}

#[test]
fn pipeline_composes() {
    let tmp = tempfile::tempdir().unwrap();
    let pair = canonical_pair(tmp.path());
    let runs = tmp.path().join("runs");
    let t = evoipd(&["tournament", "--strategies", pair.to_str().unwrap(), "--noise", "0", "--reps", "1", "--rounds", "50", "--out", runs.to_str().unwrap()], None);
    assert!(t.status.success());
    let grid = tmp.path().join("grid.toml");
    fs::write(&grid, "pairs = [\"canonical\"]\niterations = 10\nfitness_rounds = 10\n").unwrap();
    let m = evoipd(&["moran", "--grid", grid.to_str().unwrap(), "--out", runs.to_str().unwrap()], None);
    assert!(m.status.success(), "{}", stderr(&m));
    let x = evoipd(
        &["metrics", "--results", run_dir(&t).to_str().unwrap(), "--results", run_dir(&m).to_str().unwrap(), "--out", runs.to_str().unwrap()],
        None,
    );
    assert!(x.status.success(), "{}", stderr(&x));
    let rows = read_csv(&run_dir(&x).join("metrics.csv"));
    assert_eq!(rows.len(), 1);
    // AllD earns 5 against AllC, 1 against itself; AllC earns 0 and 3.
    let icd: f64 = rows[0]["icd"].parse().unwrap();
    assert!(icd > 0.0);
    assert!(!rows[0]["delta_noise_4:4:4"].is_empty());
    assert!(!rows[0]["separation"].is_empty());
    assert_eq!(rows[0]["separation"], "1.000000");

    let r = evoipd(&["report", "--results", run_dir(&m).to_str().unwrap(), "--from-paper", fixture("reference_payoffs.csv").to_str().unwrap(), "--out", runs.to_str().unwrap()], None);
    assert!(r.status.success(), "{}", stderr(&r));
    let bars = read_csv(&run_dir(&r).join("equilibria_bars.csv"));
    assert_eq!(bars.len(), 16);
    assert_eq!(read_csv(&run_dir(&r).join("icd_bars.csv")).len(), 12);
}
