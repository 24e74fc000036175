use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use replikit::mdl::BUILDER_LISTING;
use tempfile::TempDir;

fn replikit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_replikit"))
        .args(args)
        .env_remove("REPLIKIT_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn parse_mdl_reports_planes_and_blocks() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "builder.mdl", BUILDER_LISTING);
    let o = replikit(&["parse-mdl", "--mdl", &f]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "OK: 5 planes, 11 blocks\n");
}

#[test]
fn invalid_token_exits_2_with_position() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.mdl", "b__b__\nb__x__\n");
    let o = replikit(&["parse-mdl", "--mdl", &f]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2, column 4"), "{err}");
}

#[test]
fn render_one_block() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "one.mdl", "b__\n");
    let o = replikit(&["render", "--mdl", &f]);
    assert_eq!(stdout(&o), "# tick=0\n# z=0\nb__\n");
}

#[test]
fn simulate_is_deterministic_and_zero_ticks_is_header_only() {
    let dir = TempDir::new().unwrap();
    let mdl = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/corpus/conveyor_n_1.mdl");
    let mdl = mdl.to_string_lossy();
    let a = dir.path().join("a.trace");
    let b = dir.path().join("b.trace");
    for out in [&a, &b] {
        let o = replikit(&[
            "simulate",
            "--mdl",
            &mdl,
            "--ticks",
            "20",
            "--seed",
            "3",
            "--payload",
            "1,0,0",
            "--trace",
            &out.to_string_lossy(),
        ]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert_eq!(text.matches("# tick=").count(), 20);
    assert!(text.contains("MoverExpanded"));
    let o = replikit(&["simulate", "--mdl", &mdl, "--ticks", "0", "--seed", "3"]);
    assert_eq!(
        stdout(&o),
        "# replikit trace mdl=conveyor_n_1.mdl ticks=0 seed=3\n"
    );
}

#[test]
fn simulate_over_budget_exits_3() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "one.mdl", "b__\n");
    let o = replikit(&[
        "simulate",
        "--mdl",
        &f,
        "--ticks",
        "11",
        "--max-ticks",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn build_aab_prints_the_a_shape() {
    let o = replikit(&["build", "--bdl", "AAB"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "component 1:\nb__ 1 0 0\nb__ 1 1 0\nb__ 0 2 0\nticks: 30\n"
    );
    assert_eq!(replikit(&["build", "--bdl", "AXB"]).status.code(), Some(2));
    assert_eq!(
        replikit(&["build", "--bdl", "AAB", "--budget", "5"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn copy_complements() {
    let o = replikit(&["copy", "--strand", "AAB", "--seed", "7"]);
    assert!(stdout(&o).starts_with("BBA\n"));
}

#[test]
fn assemble_reproduces_fragments() {
    for target in ["builder", "assembler"] {
        let o = replikit(&["assemble", "--target", target]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains(&format!("matches {target} fragment: yes")));
    }
    assert_eq!(
        replikit(&["assemble", "--target", "nothing"]).status.code(),
        Some(1)
    );
}

#[test]
fn turing_ref_and_run_agree_on_one_complement() {
    for mode in ["ref", "run"] {
        let o = replikit(&[
            "turing",
            mode,
            "--machine",
            "1complement",
            "--tape",
            "0110100",
        ]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).starts_with("1001011\n"), "{mode}");
    }
    let o = replikit(&[
        "turing",
        "ref",
        "--machine",
        "incrementer",
        "--tape",
        "#011#",
    ]);
    assert!(stdout(&o).starts_with("#100#\n"));
    let o = replikit(&[
        "turing",
        "run",
        "--machine",
        "loop",
        "--tape",
        "01",
        "--budget",
        "300",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn turing_machine_file() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "flip.tm",
        "symbols: 0 1\nstates: L:L\nrule: L 0 -> L 1\nrule: L 1 -> L 0\n",
    );
    let o = replikit(&["turing", "run", "--machine", &f, "--tape", "011"]);
    assert!(
        stdout(&o).starts_with("100\n"),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let bad = write(&dir, "bad.tm", "symbols: 0 1\nbogus\n");
    assert_eq!(
        replikit(&["turing", "ref", "--machine", &bad, "--tape", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn replicate_three_cycles_is_exact() {
    let o = replikit(&["replicate", "--cycles", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("generation 3 mRNA stack: identical to generation 0"));
    assert!(out.contains("generation 3 builder: identical to generation 0"));
    assert!(out.ends_with("replication exact over 3 cycles\n"));
}

#[test]
fn replicate_with_mutation_reports_a_diff() {
    let o = replikit(&["replicate", "--cycles", "1", "--mutate", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("diff: "));
}

#[test]
fn seed_falls_back_to_the_environment() {
    let run = |env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_replikit"));
        c.args(["replicate", "--cycles", "1", "--mutate"])
            .env_remove("REPLIKIT_SEED");
        if let Some(s) = env {
            c.env("REPLIKIT_SEED", s);
        }
        stdout(&c.output().unwrap())
    };
    let flag = stdout(&replikit(&[
        "replicate",
        "--cycles",
        "1",
        "--mutate",
        "--seed",
        "1",
    ]));
    assert_eq!(run(Some("1")), flag);
}

#[test]
fn info_bits_on_the_builder_listing_and_a_single_block() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "builder.mdl", BUILDER_LISTING);
    let o = replikit(&["info-bits", "--mdl", &f]);
    assert_eq!(
        stdout(&o),
        "tokens: 33\ndistinct: 5\nbits_per_token: 3\ntotal_bits: 99\n"
    );
    let f = write(&dir, "one.mdl", "b__\n");
    assert!(stdout(&replikit(&["info-bits", "--mdl", &f])).ends_with("total_bits: 1\n"));
}

#[test]
fn corpus_command_writes_the_shipped_corpus() {
    let dir = TempDir::new().unwrap();
    let o = replikit(&["corpus", "--out", &dir.path().to_string_lossy()]);
    assert_eq!(o.status.code(), Some(0));
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/corpus");
    let mut names: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 12);
    for name in names {
        assert_eq!(
            fs::read(dir.path().join(&name)).unwrap(),
            fs::read(shipped.join(&name)).unwrap()
        );
    }
}
