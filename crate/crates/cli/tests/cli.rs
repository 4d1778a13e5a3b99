use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use plastream::protocols::{decode_streams, encode_streams};
use plastream::synth::Generator;
use plastream::Protocol;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plastream"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_series(dir: &Path, name: &str, cols: usize, n: usize) -> PathBuf {
    let walks: Vec<_> = (0..cols)
        .map(|k| Generator::RandomWalk { step: 1.0 }.generate(n, k as u64))
        .collect();
    let mut text = String::new();
    for i in 0..n {
        text.push_str(&format!("{}", 0.5 * i as f64));
        for w in &walks {
            text.push_str(&format!(",{}", w[i].y));
        }
        text.push('\n');
    }
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn read_pairs(path: &Path) -> Vec<(f64, f64)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| {
            let (t, y) = l.split_once(',').unwrap();
            (t.parse().unwrap(), y.parse().unwrap())
        })
        .collect()
}

fn column(path: &Path, k: usize) -> Vec<f64> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').nth(k).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn round_trip_through_files_for_every_pairing() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_series(dir.path(), "walk.csv", 1, 1500);
    let ys = column(&input, 1);
    let ts = column(&input, 0);
    for (method, protocol) in Protocol::pairings() {
        let (m, p) = (method.to_string(), protocol.to_string());
        let base = dir.path().join(format!("{m}-{p}.pla"));
        let out = run(&[
            "compress",
            "--method",
            &m,
            "--protocol",
            &p,
            "--epsilon",
            "0.8",
            "--input",
            s(&input),
            "--output",
            s(&base),
        ]);
        assert_eq!(code(&out), 0, "{m} {p}: {}", String::from_utf8_lossy(&out.stderr));
        let decoded = dir.path().join(format!("{m}-{p}.csv"));
        let out = run(&[
            "decompress",
            "--input",
            s(&base),
            "--timestamps",
            s(&input),
            "--output",
            s(&decoded),
        ]);
        assert_eq!(code(&out), 0, "{m} {p}: {}", String::from_utf8_lossy(&out.stderr));
        let pairs = read_pairs(&decoded);
        assert_eq!(pairs.len(), ys.len());
        for ((t, y), (&t0, &y0)) in pairs.iter().zip(ts.iter().zip(&ys)) {
            assert_eq!(*t, t0);
            assert!((y - y0).abs() < 0.8, "{m} {p}: t = {t}");
        }
    }
}

#[test]
fn two_streams_writes_a_pair_of_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_series(dir.path(), "walk.csv", 1, 400);
    let base = dir.path().join("x");
    let out = run(&[
        "compress",
        "--method",
        "linear",
        "--protocol",
        "two-streams",
        "--epsilon",
        "0.5",
        "--input",
        s(&input),
        "--output",
        s(&base),
    ]);
    assert_eq!(code(&out), 0);
    let (seg, sgl) = (dir.path().join("x.seg"), dir.path().join("x.sgl"));
    assert_eq!(&fs::read(&seg).unwrap()[..5], b"PLA1\x01");
    assert_eq!(&fs::read(&sgl).unwrap()[..5], b"PLA1\x02");
    assert!(!base.exists());
    // Either order of the two files decodes the same values.
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert_eq!(
        code(&run(&[
            "decompress",
            "--input",
            s(&seg),
            s(&sgl),
            "--timestamps",
            s(&input),
            "--output",
            s(&a)
        ])),
        0
    );
    assert_eq!(
        code(&run(&[
            "decompress",
            "--input",
            s(&sgl),
            s(&seg),
            "--timestamps",
            s(&input),
            "--output",
            s(&b)
        ])),
        0
    );
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    // One file alone is not enough.
    assert_eq!(
        code(&run(&["decompress", "--input", s(&seg), "--timestamps", s(&input)])),
        2
    );
}

#[test]
fn each_value_column_becomes_its_own_stream() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_series(dir.path(), "multi.csv", 3, 300);
    let base = dir.path().join("m.pla");
    let out = run(&[
        "compress",
        "--method",
        "angle",
        "--protocol",
        "single-stream-v",
        "--epsilon",
        "0.5",
        "--input",
        s(&input),
        "--y-col",
        "1,2,3",
        "--output",
        s(&base),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for k in 0..3 {
        let file = dir.path().join(format!("m.pla.ch{k}"));
        let decoded = dir.path().join(format!("m{k}.csv"));
        assert_eq!(
            code(&run(&[
                "decompress",
                "--input",
                s(&file),
                "--timestamps",
                s(&input),
                "--output",
                s(&decoded)
            ])),
            0
        );
        let orig = column(&input, k + 1);
        for ((_, y), y0) in read_pairs(&decoded).iter().zip(&orig) {
            assert!((y - y0).abs() < 0.5);
        }
    }
    let two = [dir.path().join("p"), dir.path().join("q")];
    let out = run(&[
        "compress",
        "--method",
        "angle",
        "--protocol",
        "single-stream",
        "--epsilon",
        "0.5",
        "--input",
        s(&input),
        "--y-col",
        "1,2,3",
        "--output",
        s(&two[0]),
        s(&two[1]),
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn encoding_is_deterministic_and_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_series(dir.path(), "walk.csv", 1, 800);
    for (method, protocol) in Protocol::pairings() {
        let (m, p) = (method.to_string(), protocol.to_string());
        let bases = [dir.path().join("one"), dir.path().join("two")];
        for base in &bases {
            let out = run(&[
                "compress",
                "--method",
                &m,
                "--protocol",
                &p,
                "--epsilon",
                "0.3",
                "--input",
                s(&input),
                "--output",
                s(base),
            ]);
            assert_eq!(code(&out), 0);
        }
        let files = |base: &Path| -> Vec<Vec<u8>> {
            plastream_cli::stream_paths(base, protocol)
                .iter()
                .map(|f| fs::read(f).unwrap())
                .collect()
        };
        let (one, two) = (files(&bases[0]), files(&bases[1]));
        assert_eq!(one, two, "{m} {p}");
        let (proto, meth, eps, records) = decode_streams(&one[0], one.get(1).map(Vec::as_slice)).unwrap();
        let again = encode_streams(proto, meth, eps, &records).unwrap();
        assert_eq!(again.primary, one[0], "{m} {p}");
        assert_eq!(again.singletons.as_ref(), one.get(1), "{m} {p}");
    }
}

#[test]
fn generated_input_with_written_timestamps() {
    let dir = tempfile::tempdir().unwrap();
    let (base, ts, out_csv) = (
        dir.path().join("g.pla"),
        dir.path().join("t.csv"),
        dir.path().join("g.csv"),
    );
    let out = run(&[
        "compress",
        "--method",
        "swing",
        "--protocol",
        "implicit",
        "--epsilon",
        "1",
        "--generate",
        "ramp:500:0.2,0.3",
        "--seed",
        "9",
        "--output",
        s(&base),
        "--timestamps",
        s(&ts),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        code(&run(&[
            "decompress",
            "--input",
            s(&base),
            "--timestamps",
            s(&ts),
            "--output",
            s(&out_csv)
        ])),
        0
    );
    let orig = Generator::Ramp { slope: 0.2, noise: 0.3 }.generate(500, 9);
    let pairs = read_pairs(&out_csv);
    assert_eq!(pairs.len(), 500);
    for ((t, y), p) in pairs.iter().zip(&orig) {
        assert_eq!(*t, p.t);
        assert!((y - p.y).abs() < 1.0);
    }
}

#[test]
fn header_and_named_columns() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("h.csv");
    fs::write(&input, "time,speed\n-2,1\n-1,1.5\n0,2\n1,2.5\n2,9\n").unwrap();
    let base = dir.path().join("h.pla");
    let args = [
        "compress",
        "--method",
        "disjoint",
        "--protocol",
        "implicit",
        "--epsilon",
        "0.1",
        "--input",
        s(&input),
        "--header",
        "--t-col",
        "time",
        "--y-col",
        "speed",
        "--output",
        s(&base),
    ];
    // Negative times need an offset under the implicit protocol.
    assert_eq!(code(&run(&args)), 2);
    let mut with_offset = args.to_vec();
    with_offset.extend(["--t-offset", "5"]);
    assert_eq!(code(&run(&with_offset)), 0);
    let out = run(&[
        "decompress",
        "--input",
        s(&base),
        "--timestamps",
        s(&input),
        "--header",
        "--t-col",
        "time",
        "--t-offset",
        "5",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let ys: Vec<f64> = text
        .lines()
        .map(|l| l.split_once(',').unwrap().1.parse().unwrap())
        .collect();
    for (y, y0) in ys.iter().zip([1.0, 1.5, 2.0, 2.5, 9.0]) {
        assert!((y - y0).abs() < 0.1);
    }
}

#[test]
fn evaluate_disjoint_on_constant_csv() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("c.csv");
    fs::write(&input, (0..300).map(|i| format!("{i},5\n")).collect::<String>()).unwrap();
    let out = run(&[
        "evaluate",
        "--method",
        "disjoint",
        "--epsilon",
        "0.5",
        "--input",
        s(&input),
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    let errors: Vec<_> = rows.iter().filter(|r| &r[4] == "error").collect();
    assert_eq!(errors.len(), 4);
    for r in errors {
        assert_eq!(&r[1], "disjoint");
        for k in 5..11 {
            assert_eq!(r[k].parse::<f64>().unwrap(), 0.0);
        }
    }
}

#[test]
fn evaluate_matrix_reports_table_keys() {
    let out = run(&[
        "evaluate",
        "--matrix",
        "--epsilon",
        "1",
        "--generate",
        "random_walk:1000:1",
    ]);
    assert_eq!(code(&out), 0);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("C: optimal continuous PLA is not implemented"));
    assert!(stderr.contains("M: mixed PLA is not implemented"));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut keys: Vec<String> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().to_owned())
        .collect();
    keys.dedup();
    assert_eq!(keys, ["A1", "A2", "A3", "C1", "C2", "C3", "L1", "L2", "L3", "Sw", "Sl"]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "0,1\n1,2\n1,3\n").unwrap();
    let out_path = dir.path().join("o");
    let o = s(&out_path);

    // Usage: unknown option, illegal pairing, bad threshold, cap out of range.
    assert_eq!(code(&run(&["compress", "--bogus"])), 1);
    assert_eq!(
        code(&run(&[
            "evaluate",
            "--method",
            "swing",
            "--protocol",
            "single-stream",
            "--epsilon",
            "1",
            "--generate",
            "constant:5:1"
        ])),
        1
    );
    assert_eq!(
        code(&run(&[
            "compress",
            "--method",
            "angle",
            "--protocol",
            "implicit",
            "--epsilon",
            "0",
            "--generate",
            "constant:5:1",
            "--output",
            o
        ])),
        1
    );
    assert_eq!(
        code(&run(&[
            "compress",
            "--method",
            "angle",
            "--protocol",
            "single-stream-v",
            "--epsilon",
            "1",
            "--max-seg",
            "128",
            "--generate",
            "constant:5:1",
            "--output",
            o
        ])),
        1
    );

    // Data: repeated timestamp, reported with its line.
    let out = run(&[
        "compress",
        "--method",
        "angle",
        "--protocol",
        "implicit",
        "--epsilon",
        "1",
        "--input",
        s(&bad),
        "--output",
        o,
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    assert_eq!(
        code(&run(&[
            "decompress",
            "--input",
            s(&dir.path().join("missing")),
            "--timestamps",
            s(&bad)
        ])),
        2
    );

    // Round trip: an offset this large leaves too few bits for the values.
    let out = run(&[
        "evaluate",
        "--method",
        "swing",
        "--protocol",
        "implicit",
        "--epsilon",
        "0.01",
        "--t-offset",
        "1e15",
        "--generate",
        "random_walk:2000:1",
    ]);
    assert_eq!(code(&out), 3);
    let out = run(&[
        "compress",
        "--method",
        "swing",
        "--protocol",
        "implicit",
        "--epsilon",
        "0.01",
        "--t-offset",
        "1e15",
        "--generate",
        "random_walk:2000:1",
        "--output",
        o,
    ]);
    assert_eq!(code(&out), 3);

    assert_eq!(code(&run(&["--help"])), 0);
}
