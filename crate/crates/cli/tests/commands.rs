use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn fnbench(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fnbench"))
        .current_dir(dir)
        .env_remove("FNBENCH_SEED")
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn small_dataset(dir: &Path) {
    let o = fnbench(
        dir,
        &[
            "generate",
            "--graphs",
            "40",
            "--avg-nodes",
            "8",
            "--seed",
            "3",
            "--out",
            "d.jsonl",
            "--corpus-out",
            "c.csv",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn generate_summary_and_usage_errors() {
    let t = TempDir::new().unwrap();
    let o = fnbench(
        t.path(),
        &[
            "generate",
            "--graphs",
            "314",
            "--avg-nodes",
            "131",
            "--dim",
            "10",
            "--sep",
            "0.5",
            "--seed",
            "7",
            "--out",
            "p.jsonl",
        ],
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("graphs=314 fake=157"), "{}", stdout(&o));
    assert_eq!(
        fs::read_to_string(t.path().join("p.jsonl")).unwrap().lines().count(),
        314
    );
    assert!(t.path().join("p.jsonl.meta.json").exists());

    assert_eq!(
        code(&fnbench(t.path(), &["generate", "--graphs", "0", "--out", "x.jsonl"])),
        2
    );
    assert_eq!(
        code(&fnbench(
            t.path(),
            &["generate", "--avg-nodes", "1", "--out", "x.jsonl"]
        )),
        2
    );
    assert_eq!(
        code(&fnbench(t.path(), &["generate", "--out", "missing-dir/x.jsonl"])),
        2
    );
}

#[test]
fn train_gnn_outputs_and_exit_codes() {
    let t = TempDir::new().unwrap();
    small_dataset(t.path());
    let o = fnbench(
        t.path(),
        &[
            "train-gnn",
            "--data",
            "d.jsonl",
            "--layer",
            "sage",
            "--epochs",
            "1",
            "--out",
            "r.csv",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let line = stdout(&o);
    assert!(
        line.starts_with("layer=sage train_acc=") && line.contains(" test_acc="),
        "{line}"
    );
    let csv = fs::read_to_string(t.path().join("r.csv")).unwrap();
    assert_eq!(
        csv.lines()
            .filter(|l| l.starts_with(|c: char| c.is_ascii_digit()))
            .count(),
        1
    );
    assert!(csv.lines().last().unwrap().starts_with("# final,"));

    let o = fnbench(t.path(), &["train-gnn", "--data", "d.jsonl", "--layer", "bogus"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("gcn, gat, sage, gin"), "{}", stderr(&o));

    fs::write(
        t.path().join("bad.jsonl"),
        "{\"id\":\"x\",\"label\":0,\"n\":3,\"edges\":[[0,1],[0,2],[1,2]],\"x\":[[1],[2],[3]]}\n",
    )
    .unwrap();
    let o = fnbench(t.path(), &["train-gnn", "--data", "bad.jsonl", "--layer", "gcn"]);
    assert_eq!(code(&o), 3);
    assert!(
        stderr(&o).contains("|edges|") && stderr(&o).contains("2 parents"),
        "{}",
        stderr(&o)
    );

    let o = fnbench(
        t.path(),
        &[
            "train-gnn",
            "--data",
            "d.jsonl",
            "--layer",
            "gin",
            "--lr",
            "1e300",
            "--epochs",
            "3",
        ],
    );
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    assert_eq!(
        code(&fnbench(
            t.path(),
            &["train-gnn", "--data", "nope.jsonl", "--layer", "gcn"]
        )),
        2
    );
}

#[test]
fn seed_env_fallback_and_config_merge() {
    let t = TempDir::new().unwrap();
    small_dataset(t.path());
    let run = |extra: &[&str], env: Option<&str>, out: &str| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_fnbench"));
        cmd.current_dir(t.path()).env_remove("FNBENCH_SEED");
        if let Some(s) = env {
            cmd.env("FNBENCH_SEED", s);
        }
        let mut args = vec![
            "train-gnn",
            "--data",
            "d.jsonl",
            "--layer",
            "gcn",
            "--epochs",
            "2",
            "--out",
            out,
        ];
        args.extend_from_slice(extra);
        let o = cmd.args(&args).output().unwrap();
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        fs::read_to_string(t.path().join(out)).unwrap()
    };
    let flag = run(&["--seed", "5"], None, "a.csv");
    assert_eq!(run(&[], Some("5"), "b.csv"), flag);
    assert_eq!(run(&["--seed", "5"], Some("6"), "c.csv"), flag);
    assert_ne!(run(&[], Some("6"), "d.csv"), flag);

    fs::write(t.path().join("cfg.json"), r#"{"epochs": 3, "seed": 5, "hidden": 180}"#).unwrap();
    let merged = run(&["--config", "cfg.json"], None, "e.csv");
    assert_eq!(
        merged
            .lines()
            .filter(|l| l.starts_with(|c: char| c.is_ascii_digit()))
            .count(),
        2
    );
    assert_eq!(merged, flag);

    fs::write(t.path().join("bad.json"), r#"{"no_such_flag": 1}"#).unwrap();
    let o = fnbench(
        t.path(),
        &[
            "train-gnn",
            "--data",
            "d.jsonl",
            "--layer",
            "gcn",
            "--config",
            "bad.json",
        ],
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn baseline_and_report_commands() {
    let t = TempDir::new().unwrap();
    small_dataset(t.path());
    let mut reports = Vec::new();
    for model in ["logreg", "svm", "dtree", "rforest"] {
        let out = format!("{model}.csv");
        let o = fnbench(
            t.path(),
            &[
                "train-baseline",
                "--corpus",
                "c.csv",
                "--model",
                model,
                "--seed",
                "42",
                "--out",
                &out,
            ],
        );
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let accs: Vec<f64> = stdout(&o)
            .split_whitespace()
            .filter_map(|kv| {
                kv.split_once('=')
                    .filter(|(k, _)| k.ends_with("_acc"))
                    .map(|(_, v)| v.parse().unwrap())
            })
            .collect();
        assert_eq!(accs.len(), 2);
        assert!(accs.iter().all(|a| (0.0..=1.0).contains(a)));
        reports.push(out);
    }
    for layer in ["gcn", "gat", "sage", "gin"] {
        let out = format!("{layer}.csv");
        let o = fnbench(
            t.path(),
            &[
                "train-gnn",
                "--data",
                "d.jsonl",
                "--layer",
                layer,
                "--epochs",
                "2",
                "--out",
                &out,
            ],
        );
        assert_eq!(code(&o), 0);
        reports.push(out);
    }
    let mut args = vec!["report", "--out", "table.md", "--curves-out", "curves.csv"];
    args.extend(reports.iter().map(String::as_str));
    assert_eq!(code(&fnbench(t.path(), &args)), 0);
    let table = fs::read_to_string(t.path().join("table.md")).unwrap();
    assert!(table.starts_with("| Model |"));
    assert_eq!(
        table
            .lines()
            .filter(|l| l.starts_with("| ") && !l.starts_with("| Model"))
            .count(),
        8
    );
    let curves = fs::read_to_string(t.path().join("curves.csv")).unwrap();
    assert_eq!(curves.lines().count(), 1 + 4 * 2);

    assert_eq!(code(&fnbench(t.path(), &["report"])), 2);
    fs::write(
        t.path().join("junk.csv"),
        "epoch,train_loss,train_acc,test_acc\n1,x,0.5,0.5\n",
    )
    .unwrap();
    let o = fnbench(t.path(), &["report", "junk.csv"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    fs::write(t.path().join("broken.csv"), "id,label,text\na,0,fine\nb,9,bad\n").unwrap();
    let o = fnbench(
        t.path(),
        &["train-baseline", "--corpus", "broken.csv", "--model", "dtree"],
    );
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("row 2"), "{}", stderr(&o));
    assert_eq!(
        code(&fnbench(
            t.path(),
            &["train-baseline", "--corpus", "absent.csv", "--model", "dtree"]
        )),
        2
    );
}

#[test]
fn paired_split_between_graphs_and_text() {
    let t = TempDir::new().unwrap();
    small_dataset(t.path());
    let o = fnbench(
        t.path(),
        &[
            "train-gnn",
            "--data",
            "d.jsonl",
            "--layer",
            "gcn",
            "--epochs",
            "1",
            "--split-out",
            "s.json",
        ],
    );
    assert_eq!(code(&o), 0);
    let o = fnbench(
        t.path(),
        &[
            "train-baseline",
            "--corpus",
            "c.csv",
            "--model",
            "logreg",
            "--split",
            "s.json",
            "--split-out",
            "s2.json",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(
        fs::read(t.path().join("s.json")).unwrap(),
        fs::read(t.path().join("s2.json")).unwrap()
    );
}
