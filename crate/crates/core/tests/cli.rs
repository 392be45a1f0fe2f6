mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

use common::{random_graph, rng};
use slgad::checkpoint::Checkpoint;
use slgad::cli::main_with_args;
use slgad::train::init_params;
use slgad::{Graph, RunConfig};

fn slgad(args: &[&str]) -> i32 {
    let mut full = vec!["slgad"];
    full.extend_from_slice(args);
    main_with_args(full)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_dataset(dir: &Path, n: usize, seed: u64) -> Graph {
    let g = random_graph(n, 6, 2 * n, &mut rng(seed));
    g.save(dir).unwrap();
    g
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

const FAST: &[&str] = &["--preset", "toy", "--epochs", "2", "--rounds", "3", "--d-hidden", "8"];

fn with_fast<'a>(args: &[&'a str]) -> Vec<&'a str> {
    let mut v = args.to_vec();
    v.extend_from_slice(FAST);
    v
}

#[test]
fn inject_default_protocol_labels_150_nodes() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    let run = tmp.path().join("run");
    write_dataset(&data, 400, 1);
    let before = snapshot(&data);
    assert_eq!(slgad(&["inject", "--in", p(&data), "--out", p(&run), "--seed", "1"]), 0);
    assert_eq!(snapshot(&data), before, "dataset directory must not change");
    let g = Graph::load(run.join("graph")).unwrap();
    assert_eq!(g.labels().unwrap().iter().filter(|&&l| l == 1).count(), 150);
    let manifest = fs::read_to_string(run.join("manifest.tsv")).unwrap();
    assert_eq!(manifest.lines().filter(|l| l.starts_with("STRUCT\t")).count(), 75);
    assert_eq!(manifest.lines().filter(|l| l.starts_with("ATTR\t")).count(), 75);
}

#[test]
fn inject_nothing_copies_the_graph() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    let run = tmp.path().join("run");
    let g = write_dataset(&data, 30, 2);
    assert_eq!(slgad(&["inject", "--in", p(&data), "--out", p(&run), "--cliques", "0", "--attr", "0"]), 0);
    let out = Graph::load(run.join("graph")).unwrap();
    assert_eq!(out.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
    assert_eq!(out.features(), g.features());
    assert!(out.labels().unwrap().iter().all(|&l| l == 0));
}

#[test]
fn missing_dataset_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let code = slgad(&["inject", "--in", p(&tmp.path().join("nope")), "--out", p(&tmp.path().join("run"))]);
    assert_eq!(code, 2);
    assert!(!tmp.path().join("run").exists());
}

#[test]
fn bad_flags_and_configs_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    assert_eq!(slgad(&["toy", "--out", p(&run), "--no-run"]), 0);
    assert_eq!(slgad(&["train", "--run", p(&run), "--alpha", "0", "--beta", "0"]), 2);
    assert!(!run.join("checkpoint").exists(), "validation must happen before any compute");
    assert_eq!(slgad(&["train", "--run", p(&run), "--mode", "sideways"]), 2);
    assert_eq!(slgad(&["train", "--run", p(&run), "--preset", "imagenet"]), 2);
    assert_eq!(slgad(&["train", "--run", p(&run), "--bogus-flag"]), 2);
    assert_eq!(slgad(&["score", "--run", p(&run)]), 2, "score before train");
    assert_eq!(slgad(&["train", "--run", p(&tmp.path().join("empty"))]), 2);
    assert_eq!(slgad(&["--help"]), 0);
}

#[test]
fn eval_without_labels_is_a_data_error() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    write_dataset(&run.join("graph"), 10, 3);
    fs::write(run.join("scores.tsv"), (0..10).map(|i| format!("{i}\t0.5\t0\t0\t0\t0\n")).collect::<String>()).unwrap();
    assert_eq!(slgad(&["eval", "--run", p(&run)]), 3);
}

#[test]
fn diverging_training_is_a_numeric_error() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    assert_eq!(slgad(&["toy", "--out", p(&run), "--no-run"]), 0);
    assert_eq!(slgad(&["train", "--run", p(&run), "--preset", "toy", "--lr", "1e308"]), 4);
}

#[test]
fn zero_epochs_writes_the_initialization() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    assert_eq!(slgad(&["toy", "--out", p(&run), "--no-run"]), 0);
    assert_eq!(slgad(&["train", "--run", p(&run), "--preset", "toy", "--epochs", "0"]), 0);
    let ck = Checkpoint::load(run.join("checkpoint")).unwrap();
    let cfg = RunConfig::from_text(&fs::read_to_string(run.join("config.resolved")).unwrap()).unwrap();
    assert_eq!(cfg.epochs, 0);
    let g = Graph::load(run.join("graph")).unwrap();
    assert_eq!(ck.params, init_params(&g, &cfg));
    assert_eq!(fs::read_to_string(run.join("loss.log")).unwrap(), "");
}

#[test]
fn train_writes_one_loss_line_per_epoch() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    assert_eq!(slgad(&["toy", "--out", p(&run), "--no-run"]), 0);
    assert_eq!(slgad(&["train", "--run", p(&run), "--preset", "toy", "--epochs", "7"]), 0);
    let log = fs::read_to_string(run.join("loss.log")).unwrap();
    let lines: Vec<&str> = log.lines().collect();
    assert_eq!(lines.len(), 7);
    for (i, line) in lines.iter().enumerate() {
        let fields: Vec<&str> = line.split('\t').collect();
        assert_eq!(fields.len(), 4);
        assert_eq!(fields[0], (i + 1).to_string());
        assert!(fields[1..].iter().all(|f| f.parse::<f64>().unwrap().is_finite()));
    }
}

#[test]
fn config_precedence_is_preset_then_file_then_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    let conf = tmp.path().join("my.conf");
    fs::write(&conf, "# overrides\nepochs = 3\nlr = 0.05\nrounds = 2\n").unwrap();
    assert_eq!(slgad(&["toy", "--out", p(&run), "--no-run"]), 0);
    let code = slgad(&["train", "--run", p(&run), "--preset", "toy", "--config", p(&conf), "--lr", "0.02"]);
    assert_eq!(code, 0);
    let cfg = RunConfig::from_text(&fs::read_to_string(run.join("config.resolved")).unwrap()).unwrap();
    let toy = RunConfig::preset("toy").unwrap();
    assert_eq!(cfg.epochs, 3);
    assert_eq!(cfg.lr, 0.02);
    assert_eq!(cfg.rounds, 2);
    assert_eq!(cfg.d_hidden, toy.d_hidden);
    assert_eq!(cfg.batch_size, toy.batch_size);
}

#[test]
fn cora_preset_resolves_to_published_settings() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    assert_eq!(slgad(&["toy", "--out", p(&run), "--no-run"]), 0);
    assert_eq!(slgad(&["train", "--run", p(&run), "--preset", "cora", "--epochs", "0"]), 0);
    let cfg = RunConfig::from_text(&fs::read_to_string(run.join("config.resolved")).unwrap()).unwrap();
    assert_eq!((cfg.lr, cfg.k, cfg.d_hidden, cfg.alpha, cfg.rounds), (0.001, 4, 64, 1.0, 256));
    assert_eq!(RunConfig::preset("cora").unwrap().epochs, 100);
}

#[test]
fn scoring_is_deterministic_per_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    assert_eq!(slgad(&["toy", "--out", p(&run), "--no-run"]), 0);
    assert_eq!(slgad(&with_fast(&["train", "--run", p(&run)])), 0);
    assert_eq!(slgad(&["score", "--run", p(&run), "--rounds", "1", "--seed", "5"]), 0);
    let first = fs::read(run.join("scores.tsv")).unwrap();
    assert_eq!(slgad(&["score", "--run", p(&run), "--rounds", "1", "--seed", "5"]), 0);
    assert_eq!(fs::read(run.join("scores.tsv")).unwrap(), first);
    assert_eq!(slgad(&["score", "--run", p(&run), "--rounds", "1", "--seed", "6"]), 0);
    assert_ne!(fs::read(run.join("scores.tsv")).unwrap(), first);
}

fn read_scores(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split('\t').map(|f| f.parse().unwrap()).collect())
        .collect()
}

#[test]
fn gen_only_scoring_uses_only_the_generative_column() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    assert_eq!(slgad(&["toy", "--out", p(&run), "--no-run"]), 0);
    assert_eq!(slgad(&with_fast(&["train", "--run", p(&run)])), 0);
    assert_eq!(slgad(&["score", "--run", p(&run), "--mode", "gen-only", "--beta", "0.8"]), 0);
    let rows = read_scores(&run.join("scores.tsv"));
    assert_eq!(rows.len(), 100);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0], i as f64);
        assert_eq!(row[1], 0.8 * row[2]);
    }
}

#[test]
fn default_rounds_are_256() {
    assert_eq!(RunConfig::default().rounds, 256);
}

#[test]
fn eval_prints_auc_and_writes_roc() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    let g = random_graph(8, 2, 4, &mut rng(9)).with_labels(vec![0, 0, 1, 0, 1, 0, 0, 1]).unwrap();
    g.save(run.join("graph")).unwrap();
    let scores: String = g
        .labels()
        .unwrap()
        .iter()
        .enumerate()
        .map(|(i, &l)| format!("{i}\t{}\t0\t0\t0\t0\n", l as f64 + i as f64 * 0.01))
        .collect();
    fs::write(run.join("scores.tsv"), scores).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_slgad")).args(["eval", "--run", p(&run)]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "AUC 1.0000");
    let roc = fs::read_to_string(run.join("roc.tsv")).unwrap();
    let last = roc.lines().last().unwrap();
    assert!(last.ends_with("\t1\t1"), "{last}");
}

#[test]
fn run_all_matches_the_manual_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    write_dataset(&data, 80, 4);
    let inj = ["--clique-size", "4", "--cliques", "2", "--attr", "8"];

    let manual = tmp.path().join("manual");
    let mut args = vec!["inject", "--in", p(&data), "--out", p(&manual), "--seed", "3"];
    args.extend_from_slice(&inj);
    assert_eq!(slgad(&args), 0);
    assert_eq!(slgad(&with_fast(&["train", "--run", p(&manual), "--seed", "11"])), 0);
    assert_eq!(slgad(&with_fast(&["score", "--run", p(&manual), "--seed", "11"])), 0);
    assert_eq!(slgad(&["eval", "--run", p(&manual)]), 0);

    let auto = tmp.path().join("auto");
    let mut args = vec!["run-all", "--in", p(&data), "--out", p(&auto), "--inject-seed", "3", "--seed", "11"];
    args.extend_from_slice(&inj);
    assert_eq!(slgad(&with_fast(&args)), 0);

    for file in ["manifest.tsv", "checkpoint", "loss.log", "scores.tsv", "roc.tsv", "config.resolved"] {
        assert_eq!(fs::read(manual.join(file)).unwrap(), fs::read(auto.join(file)).unwrap(), "{file}");
    }
}

#[test]
fn beta_sweep_writes_one_run_per_beta() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    write_dataset(&data, 60, 5);
    let out = tmp.path().join("sweep");
    let args = with_fast(&[
        "run-all", "--in", p(&data), "--out", p(&out), "--clique-size", "3", "--cliques", "2", "--attr", "6",
        "--beta-sweep", "--threads", "2",
    ]);
    assert_eq!(slgad(&args), 0);
    for beta in ["0.2", "0.4", "0.6", "0.8", "1"] {
        let sub = out.join(format!("beta-{beta}"));
        assert!(sub.join("roc.tsv").exists(), "{beta}");
        let cfg = RunConfig::from_text(&fs::read_to_string(sub.join("config.resolved")).unwrap()).unwrap();
        assert_eq!(cfg.beta.to_string(), beta);
    }
}

#[test]
fn toy_command_runs_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("toy");
    let out = Command::new(env!("CARGO_BIN_EXE_slgad"))
        .args(["toy", "--out", p(&run), "--epochs", "5", "--rounds", "4"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let auc: f64 = stdout.lines().last().unwrap().strip_prefix("AUC ").unwrap().parse().unwrap();
    assert!((0.0..=1.0).contains(&auc));
    for file in ["graph/edges.tsv", "manifest.tsv", "checkpoint", "loss.log", "scores.tsv", "roc.tsv", "config.resolved"] {
        assert!(run.join(file).exists(), "{file}");
    }
}
