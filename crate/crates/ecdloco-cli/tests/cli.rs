//! End-to-end checks of the command-line interface: table fixtures, the
//! encode/decode round trip with and without channel errors, exit codes,
//! and the reporting commands.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ecdloco"))
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ecdloco-cli-{tag}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn tables_fixtures_and_modes() {
    let dir = tmpdir("tables");
    let strict = dir.join("t61-strict.txt");
    let out = run(&[
        "tables", "--m", "6", "--ell", "1", "--mode", "strict", "--out",
        strict.to_str().unwrap(),
    ]);
    assert_ok(&out);
    let text = fs::read_to_string(&strict).unwrap();
    assert!(text.starts_with("#ecdloco-table v1\nm=6 ell=1 R=127 "));

    // exact mode never needs a larger R than the relaxed superset mode
    let relaxed = dir.join("t82-relaxed.txt");
    let exact = dir.join("t82-exact.txt");
    assert_ok(&run(&[
        "tables", "--m", "8", "--ell", "2", "--mode", "relaxed", "--out",
        relaxed.to_str().unwrap(),
    ]));
    assert_ok(&run(&[
        "tables", "--m", "8", "--ell", "2", "--mode", "exact", "--out",
        exact.to_str().unwrap(),
    ]));
    let r_of = |p: &Path| -> u64 {
        let text = fs::read_to_string(p).unwrap();
        let line = text.lines().nth(1).unwrap();
        line.split_whitespace()
            .find_map(|f| f.strip_prefix("R="))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!(r_of(&exact) <= r_of(&relaxed));

    // invalid parameters exit nonzero with a message
    let out = run(&["tables", "--m", "1", "--ell", "2", "--out", "/dev/null"]);
    assert!(!out.status.success());

    // error-set dump
    let dump = dir.join("errors.txt");
    assert_ok(&run(&[
        "tables", "--m", "6", "--ell", "1", "--mode", "strict", "--out",
        strict.to_str().unwrap(), "--dump-errors", dump.to_str().unwrap(),
    ]));
    let dump_text = fs::read_to_string(&dump).unwrap();
    assert!(dump_text.lines().any(|l| l.starts_with("e=243 locs=")));
}

#[test]
fn encode_decode_round_trip_with_errors() {
    let dir = tmpdir("codec");
    let table = dir.join("t61.txt");
    assert_ok(&run(&[
        "tables", "--m", "6", "--ell", "1", "--mode", "strict", "--out",
        table.to_str().unwrap(),
    ]));

    // msg_bits = 3 at (6,1): 3 bytes = 24 bits = 8 messages
    let msg = dir.join("msg.bin");
    fs::write(&msg, [0b001_0000u8 << 1, 0xA5, 0x3C]).unwrap();
    let strand = dir.join("strand.txt");
    assert_ok(&run(&[
        "encode", "--table", table.to_str().unwrap(), "--input", msg.to_str().unwrap(),
        "--output", strand.to_str().unwrap(),
    ]));
    let dna = fs::read_to_string(&strand).unwrap();
    assert_eq!(dna.trim().len(), 8 * 9);
    assert!(dna.trim().chars().all(|c| "ATGC".contains(c)));

    // clean decode reproduces the bytes and reports error-free statuses
    let back = dir.join("back.bin");
    let status = dir.join("status.csv");
    let out = run(&[
        "decode", "--table", table.to_str().unwrap(), "--input", strand.to_str().unwrap(),
        "--output", back.to_str().unwrap(), "--status", status.to_str().unwrap(),
        "--seed", "5",
    ]);
    assert_ok(&out);
    assert!(String::from_utf8_lossy(&out.stdout).contains("effective seed: 5"));
    assert_eq!(fs::read(&back).unwrap(), fs::read(&msg).unwrap());
    let st = fs::read_to_string(&status).unwrap();
    assert!(st.starts_with("segment,status,list_size,index\n"));
    assert!(st
        .lines()
        .skip(1)
        .all(|l| l.contains("ErrorFree")));

    // flip one symbol per segment; decode must still return the messages
    let mut corrupted: Vec<char> = dna.trim().chars().collect();
    for seg in 0..8 {
        let pos = seg * 9 + (seg % 6);
        corrupted[pos] = match corrupted[pos] {
            'A' => 'T',
            'T' => 'G',
            'G' => 'C',
            _ => 'A',
        };
    }
    let corrupted_path = dir.join("corrupted.txt");
    fs::write(&corrupted_path, corrupted.iter().collect::<String>()).unwrap();
    assert_ok(&run(&[
        "decode", "--table", table.to_str().unwrap(), "--input",
        corrupted_path.to_str().unwrap(), "--output", back.to_str().unwrap(),
        "--status", status.to_str().unwrap(),
    ]));
    assert_eq!(fs::read(&back).unwrap(), fs::read(&msg).unwrap());

    // framing mismatch exits nonzero
    let bad = dir.join("bad.txt");
    fs::write(&bad, &dna.trim()[..10]).unwrap();
    let out = run(&[
        "decode", "--table", table.to_str().unwrap(), "--input", bad.to_str().unwrap(),
        "--output", back.to_str().unwrap(), "--status", status.to_str().unwrap(),
    ]);
    assert!(!out.status.success());

    // wrong message length exits nonzero
    let short = dir.join("short.bin");
    fs::write(&short, [0u8; 1]).unwrap();
    let out = run(&[
        "encode", "--table", table.to_str().unwrap(), "--input", short.to_str().unwrap(),
        "--output", strand.to_str().unwrap(),
    ]);
    assert!(!out.status.success());
}

#[test]
fn simulate_rates_fit_pipeline() {
    let dir = tmpdir("reports");
    // small double-substitution run through the CLI
    let report = dir.join("sim.csv");
    let out = run(&[
        "simulate", "--m", "8", "--ell", "2", "--errors", "2", "--trials", "200",
        "--seed", "3", "--out", report.to_str().unwrap(),
    ]);
    assert_ok(&out);
    assert!(String::from_utf8_lossy(&out.stdout).contains("effective seed: 3"));
    let csv = fs::read_to_string(&report).unwrap();
    assert!(csv.starts_with("m,ell,R,trials,seed,success_pre,success_post,p1p2,runtime_s\n"));
    assert!(csv.contains("\nlist_size,count\n"));

    // rates for a few lengths, then fit the quadratic model on them
    let rates = dir.join("rates.csv");
    assert_ok(&run(&[
        "rates", "--ell", "1", "--m", "6,8,10,12,14", "--out", rates.to_str().unwrap(),
    ]));
    let text = fs::read_to_string(&rates).unwrap();
    assert!(text.starts_with("m,ell,R,msg_bits,rate\n"));
    assert_eq!(text.lines().count(), 6);
    let out = run(&["fit", "--input", rates.to_str().unwrap()]);
    assert_ok(&out);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("nrmse"), "fit output: {stdout}");

    // malformed CSV exits nonzero
    let badcsv = dir.join("bad.csv");
    fs::write(&badcsv, "m,R\n5,hello\n").unwrap();
    assert!(!run(&["fit", "--input", badcsv.to_str().unwrap()]).status.success());
}

#[test]
fn allow_failures_gates_exit_code() {
    let dir = tmpdir("failures");
    let table = dir.join("t61.txt");
    assert_ok(&run(&[
        "tables", "--m", "6", "--ell", "1", "--mode", "strict", "--out",
        table.to_str().unwrap(),
    ]));
    let msg = dir.join("msg.bin");
    fs::write(&msg, [0x00u8, 0x00, 0x00]).unwrap();
    let strand = dir.join("strand.txt");
    assert_ok(&run(&[
        "encode", "--table", table.to_str().unwrap(), "--input", msg.to_str().unwrap(),
        "--output", strand.to_str().unwrap(),
    ]));
    let dna: Vec<char> = fs::read_to_string(&strand).unwrap().trim().chars().collect();
    let back = dir.join("back.bin");
    let status = dir.join("status.csv");
    // hunt for a triple corruption of segment 0 that defeats list decoding
    let rot = |c: char, k: usize| -> char {
        let order = ['A', 'T', 'G', 'C'];
        let i = order.iter().position(|&x| x == c).unwrap();
        order[(i + 1 + k) % 4]
    };
    let mut found = false;
    'hunt: for a in 0..4usize {
        for b in 0..4usize {
            let mut corrupted = dna.clone();
            corrupted[0] = rot(corrupted[0], a);
            corrupted[2] = rot(corrupted[2], b);
            corrupted[4] = rot(corrupted[4], (a + b) % 3);
            let bad = dir.join("bad.txt");
            fs::write(&bad, corrupted.iter().collect::<String>()).unwrap();
            let tolerant = run(&[
                "decode", "--table", table.to_str().unwrap(), "--input", bad.to_str().unwrap(),
                "--output", back.to_str().unwrap(), "--status", status.to_str().unwrap(),
                "--allow-failures",
            ]);
            assert_ok(&tolerant);
            if fs::read_to_string(&status).unwrap().contains("Failure") {
                // same input without the flag must exit nonzero
                let out = run(&[
                    "decode", "--table", table.to_str().unwrap(), "--input",
                    bad.to_str().unwrap(), "--output", back.to_str().unwrap(),
                    "--status", status.to_str().unwrap(),
                ]);
                assert!(!out.status.success());
                found = true;
                break 'hunt;
            }
        }
    }
    assert!(found, "no corruption pattern produced a Failure status");
}

#[test]
fn exhaustive_simulation_through_cli() {
    // --errors 1 without --trials runs the exhaustive sweep
    let out = run(&[
        "simulate", "--m", "6", "--ell", "1", "--errors", "1", "--seed", "2",
    ]);
    assert_ok(&out);
    let stdout = String::from_utf8_lossy(&out.stdout);
    let data_line = stdout
        .lines()
        .find(|l| l.starts_with("6,1,"))
        .expect("report row");
    assert!(
        data_line.contains(",1.000000,1.000000,"),
        "sweep row: {data_line}"
    );
}
