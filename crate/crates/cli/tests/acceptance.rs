//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero if any criterion fails.
//!
//! Oracles are written out here independently of the library: lightcone
//! coordinates and boosts from their formulas, path counts by exhaustive
//! DFS, kinematics from closed forms, and quadrature by Gauss–Legendre.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use causet_core::bitmatrix::BitMatrix;
use causet_core::causal::{
    build_causal_matrix, build_link_matrix, transitive_closure, CausalMatrix, LinkMatrix,
};
use causet_core::geometry::{precedes, Event, LIGHTCONE_TOLERANCE};
use causet_core::kcalculus::contracted_length;
use causet_core::rng::CounterRng;
use causet_core::schwartz::{
    expectation, seminorm, SeminormIndex, TestFunction, DEFAULT_HALF_WIDTH, DEFAULT_STEP,
};
use causet_core::sprinkle::{sprinkle, SprinkleConfig};
use causet_core::worldline::{path_count_matrix, total_amplitude, AmplitudeModel};
use num_complex::Complex64;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn causet(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_causet"))
        .arg("--out-dir")
        .arg(dir)
        .arg("--quiet")
        .args(args)
        .output()
        .expect("binary runs")
}

fn expect_success(out: &Output, what: &str) -> Result<(), String> {
    ensure!(
        out.status.success(),
        "{what} exited with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    Ok(())
}

fn read_csv_rows(path: &Path) -> Result<Vec<Vec<String>>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect())
}

fn num(s: &str) -> f64 {
    s.parse().expect("numeric field")
}

// ---------------------------------------------------------------------------

fn sprinkle_in_diamond() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let out = causet(dir.path(), &["sprinkle", "-n", "1000", "-S", "1"]);
    let elapsed = start.elapsed();
    expect_success(&out, "sprinkle")?;
    let rows = read_csv_rows(&dir.path().join("sprinkle.csv"))?;
    ensure!(rows.len() == 1000, "{} events", rows.len());
    let events: Vec<(f64, f64)> = rows.iter().map(|r| (num(&r[0]), num(&r[1]))).collect();
    let bound = 2f64.sqrt() / 2.0 + 1e-12;
    let worst = events
        .iter()
        .map(|(t, x)| t.abs() + x.abs())
        .fold(0.0, f64::max);
    ensure!(worst <= bound, "max |t|+|x| = {worst}");
    ensure!(
        events.windows(2).all(|w| w[0].0 <= w[1].0),
        "events not sorted by t"
    );
    let svg = fs::read_to_string(dir.path().join("sprinkle.svg")).map_err(|e| e.to_string())?;
    let doc = roxmltree::Document::parse(&svg).map_err(|e| format!("SVG is not XML: {e}"))?;
    let circles = doc
        .descendants()
        .filter(|n| n.has_tag_name("circle"))
        .count();
    let polygons = doc
        .descendants()
        .filter(|n| n.has_tag_name("polygon"))
        .count();
    ensure!(
        circles == 1000 && polygons == 1,
        "{circles} circles, {polygons} outlines"
    );
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!(
        "1000 events, max |t|+|x| = {worst:.15}, {elapsed:.0?}"
    ))
}

fn order_axioms() -> Outcome {
    let start = Instant::now();
    for seed in 0..100 {
        let s = sprinkle(&SprinkleConfig::new(200, 1.0, seed)).map_err(|e| e.to_string())?;
        let c = build_causal_matrix(&s);
        let n = c.n();
        for i in 0..n {
            ensure!(!c.get(i, i), "seed {seed}: reflexive at {i}");
            for j in c.row_ones(i) {
                ensure!(!c.get(j, i), "seed {seed}: {i} and {j} precede each other");
                // transitivity: everything after j is after i
                ensure!(
                    c.row_subset(j, i),
                    "seed {seed}: not transitive through {i} < {j}"
                );
            }
        }
        let l = build_link_matrix(&c).map_err(|e| e.to_string())?;
        ensure!(l.is_subset_of(&c), "seed {seed}: L not contained in C");
        let closed = transitive_closure(&l);
        ensure!(closed == c, "seed {seed}: closure of L differs from C");
        ensure!(
            build_link_matrix(&closed).map_err(|e| e.to_string())? == l,
            "seed {seed}: reduction of closure differs from L"
        );
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!("100 sprinkles of 200 events, {elapsed:.0?}"))
}

fn lightcone_order() -> Outcome {
    let mut rng = CounterRng::new(20);
    let (mut tested, mut related, mut excluded) = (0, 0, 0);
    while tested < 10_000 {
        let mut coord = || 2.0 * rng.next_unit() - 1.0;
        let a = Event::new(coord(), coord());
        let b = Event::new(coord(), coord());
        let (dt, dx) = (b.t - a.t, b.x - a.x);
        if (dt * dt - dx * dx).abs() <= LIGHTCONE_TOLERANCE {
            excluded += 1;
            continue;
        }
        let du_minus = (dt - dx) / 2f64.sqrt();
        let du_plus = (dx + dt) / 2f64.sqrt();
        let oracle = du_minus >= 0.0 && du_plus >= 0.0;
        ensure!(precedes(a, b) == oracle, "counterexample {a:?} -> {b:?}");
        related += usize::from(oracle);
        tested += 1;
    }
    Ok(format!(
        "{tested} pairs, {related} related, {excluded} excluded"
    ))
}

fn boost_invariance() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let betas: Vec<String> = (0..20)
        .map(|k| format!("{}", -0.99 + 1.98 * k as f64 / 19.0))
        .collect();
    let out = causet(
        dir.path(),
        &["boostcheck", "-n", "500", "--betas", &betas.join(",")],
    );
    expect_success(&out, "boostcheck")?;
    let rows = read_csv_rows(&dir.path().join("boostcheck.csv"))?;
    ensure!(rows.len() == 20, "{} rows", rows.len());
    for r in &rows {
        let total: usize = r[1].parse::<usize>().unwrap() + r[2].parse::<usize>().unwrap();
        ensure!(total == 500 * 499 / 2, "beta {}: {total} pairs", r[0]);
        ensure!(r[3] == "0", "beta {}: {} differing bits", r[0], r[3]);
    }

    // Independent rebuild: boost by formula, resort, relate by interval sign.
    let s = sprinkle(&SprinkleConfig::new(500, 1.0, 0)).unwrap();
    let c = build_causal_matrix(&s);
    for b in &betas {
        let beta: f64 = b.parse().unwrap();
        let gamma = 1.0 / (1.0 - beta * beta).sqrt();
        let boosted: Vec<(f64, f64)> = s
            .events
            .iter()
            .map(|e| (gamma * (e.t - beta * e.x), gamma * (e.x - beta * e.t)))
            .collect();
        let mut order: Vec<usize> = (0..boosted.len()).collect();
        order.sort_by(|&i, &j| boosted[i].partial_cmp(&boosted[j]).unwrap());
        let mut position = vec![0; order.len()];
        for (pos, &i) in order.iter().enumerate() {
            position[i] = pos;
        }
        let n = order.len();
        let mut differing = 0;
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (s.events[i], s.events[j]);
                let (dt, dx) = (b.t - a.t, b.x - a.x);
                if (dt * dt - dx * dx).abs() <= LIGHTCONE_TOLERANCE {
                    continue;
                }
                // relation read back in the boosted, resorted frame
                let (p, q) = (position[i].min(position[j]), position[i].max(position[j]));
                let (t1, x1) = boosted[order[p]];
                let (t2, x2) = boosted[order[q]];
                let (bt, bx) = (t2 - t1, x2 - x1);
                let after = bt > 0.0 && bt * bt - bx * bx >= 0.0;
                let same = if position[i] < position[j] {
                    after == c.get(i, j)
                } else {
                    !after && !c.get(i, j)
                };
                differing += usize::from(!same);
            }
        }
        ensure!(
            differing == 0,
            "beta {beta}: {differing} pairs differ from the formula rebuild"
        );
    }
    Ok("20 boosts over [-0.99, 0.99] on 500 events, 0 differing bits".to_string())
}

fn random_poset(rng: &mut CounterRng, n: usize) -> LinkMatrix {
    let density = 0.2 + 0.6 * rng.next_unit();
    let mut dag = BitMatrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.next_unit() < density {
                dag.set(i, j, true);
            }
        }
    }
    let c: CausalMatrix = transitive_closure(&LinkMatrix::try_from_bits(dag).unwrap());
    build_link_matrix(&c).unwrap()
}

fn dfs_lengths(l: &BitMatrix, from: usize, to: usize, depth: usize, out: &mut Vec<usize>) {
    if from == to {
        out.push(depth);
        return;
    }
    for next in from + 1..l.n() {
        if l.get(from, next) {
            dfs_lengths(l, next, to, depth + 1, out);
        }
    }
}

fn path_count_oracle() -> Outcome {
    let mut rng = CounterRng::new(5);
    let z = Complex64::new(0.45, -0.8);
    let mut pairs = 0;
    for trial in 0..200 {
        let n = 1 + trial % 10;
        let l = random_poset(&mut rng, n);
        let counts = path_count_matrix(&l).map_err(|e| e.to_string())?;
        for i in 0..n {
            for j in i + 1..n {
                let mut lengths = Vec::new();
                dfs_lengths(&l, i, j, 0, &mut lengths);
                let count = lengths.len() as u64;
                ensure!(
                    counts.get_u64(i, j) == Some(count),
                    "poset {trial}: count ({i},{j})"
                );
                let at_one = total_amplitude(&l, AmplitudeModel::real(1.0), i, j).unwrap();
                ensure!(
                    at_one == Complex64::new(count as f64, 0.0),
                    "poset {trial}: hop=1 ({i},{j})"
                );
                let brute: Complex64 = lengths.iter().map(|&k| z.powu(k as u32)).sum();
                let series = total_amplitude(&l, AmplitudeModel::new(z), i, j).unwrap();
                ensure!(
                    (series - brute).norm() <= 1e-12,
                    "poset {trial}: |series - brute| at ({i},{j})"
                );
                pairs += 1;
            }
        }
    }
    Ok(format!("200 posets, {pairs} pairs"))
}

fn kinematics() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let out = causet(dir.path(), &["srcheck"]);
    expect_success(&out, "srcheck")?;
    let rows = read_csv_rows(&dir.path().join("srcheck.csv"))?;
    ensure!(rows.len() == 50, "{} rows", rows.len());
    let mut worst: f64 = 0.0;
    for r in &rows {
        let (beta, k, ratio, l) = (num(&r[0]), num(&r[1]), num(&r[2]), num(&r[4]));
        let gamma = 1.0 / (1.0 - beta * beta).sqrt();
        let dil = (ratio - gamma).abs();
        let k2 = (k * k - (1.0 + beta) / (1.0 - beta)).abs();
        let product = (l * gamma - 1.0).abs();
        ensure!(
            dil <= 1e-9 && k2 <= 1e-9 && product <= 1e-9,
            "beta {beta}: {dil:e} {k2:e} {product:e}"
        );
        worst = worst.max(dil).max(k2).max(product);
    }
    let ruler = contracted_length(1.0, 0.6, 1.0).map_err(|e| e.to_string())?;
    ensure!(
        (ruler.length - 0.8).abs() <= 1e-12,
        "L(0.6) = {}",
        ruler.length
    );
    // same law with c in SI units
    let c = 299_792_458.0;
    let si = contracted_length(2.5, 0.6 * c, c).map_err(|e| e.to_string())?;
    ensure!((si.length - 2.0).abs() <= 1e-9, "L(0.6c) = {}", si.length);
    Ok(format!(
        "50 speeds, max deviation {worst:e}, L(0.6) = {}",
        ruler.length
    ))
}

/// Composite three-point Gauss–Legendre on [-r, r].
fn gauss_legendre(f: impl Fn(f64) -> f64, r: f64, panels: usize) -> f64 {
    let s = (0.6f64).sqrt();
    let w = 2.0 * r / panels as f64;
    (0..panels)
        .map(|p| {
            let mid = -r + (p as f64 + 0.5) * w;
            let half = 0.5 * w;
            half * (5.0 * f(mid - half * s) + 8.0 * f(mid) + 5.0 * f(mid + half * s)) / 9.0
        })
        .sum()
}

fn test_function_numerics() -> Outcome {
    let want = 1.0 / (2.0 * std::f64::consts::E).sqrt();
    let err = |h: f64| {
        let f = TestFunction::gaussian(0.0, 1.0, DEFAULT_HALF_WIDTH, h).unwrap();
        (seminorm(&f, SeminormIndex::new(1, 0).unwrap()).unwrap() - want).abs()
    };
    let (e0, e2) = (err(DEFAULT_STEP), err(DEFAULT_STEP / 4.0));
    ensure!(e0 <= 1e-6, "seminorm error {e0:e} at the default grid");
    ensure!(
        e2 == 0.0 || e0 / e2 >= 16.0,
        "error {e0:e} -> {e2:e} after halving twice"
    );

    let dir = tempfile::tempdir().unwrap();
    let out = causet(
        dir.path(),
        &["qexp", "gaussian", "--center", "2", "--format", "json"],
    );
    expect_success(&out, "qexp")?;
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("qexp.json")).unwrap()).unwrap();
    let q = report["expectation"].as_f64().ok_or("no expectation")?;
    let panels = 4 * (2.0 * DEFAULT_HALF_WIDTH / DEFAULT_STEP) as usize;
    let density = |x: f64| (-2.0 * (x - 2.0) * (x - 2.0)).exp();
    let oracle = gauss_legendre(|x| x * density(x), DEFAULT_HALF_WIDTH, panels)
        / gauss_legendre(density, DEFAULT_HALF_WIDTH, panels);
    ensure!((oracle - 2.0).abs() <= 1e-8, "oracle {oracle}");
    ensure!(
        (q - oracle).abs() <= 1e-8,
        "expectation {q} vs oracle {oracle}"
    );

    let f = TestFunction::gaussian(2.0, 1.0, DEFAULT_HALF_WIDTH, DEFAULT_STEP).unwrap();
    let base = expectation(&f).unwrap();
    for c in [
        Complex64::new(1e-6, 0.0),
        Complex64::new(-3.0, 4.0),
        Complex64::new(0.0, 250.0),
    ] {
        let scaled = expectation(&f.scaled(c)).unwrap();
        ensure!(
            (scaled - base).abs() <= 1e-12,
            "c = {c}: {scaled} vs {base}"
        );
    }
    Ok(format!(
        "seminorm error {e0:.2e} -> {e2:.2e}, expectation {q} vs oracle {oracle}"
    ))
}

fn files_in(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let inputs = tempfile::tempdir().unwrap();
    let events = inputs.path().join("events.csv");
    let out = causet(inputs.path(), &["sprinkle", "-n", "60", "--seed", "3"]);
    expect_success(&out, "sprinkle")?;
    fs::rename(inputs.path().join("sprinkle.csv"), &events).unwrap();
    let function = inputs.path().join("function.csv");
    fs::write(
        &function,
        TestFunction::gaussian(0.5, 0.7, 8.0, 1.0 / 64.0)
            .unwrap()
            .to_csv(),
    )
    .unwrap();
    let ev = events.to_str().unwrap();
    let fun = function.to_str().unwrap();

    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("sprinkle", vec!["sprinkle", "-n", "500", "--seed", "11"]),
        (
            "sprinkle",
            vec![
                "sprinkle", "-n", "300", "--mode", "poisson", "--format", "json",
            ],
        ),
        ("relate", vec!["relate", "--input", ev]),
        (
            "chains",
            vec![
                "chains", "--input", ev, "--from", "0", "--to", "59", "--cap", "50",
            ],
        ),
        (
            "pathsum",
            vec![
                "pathsum", "--input", ev, "--from", "0", "--to", "59", "--hop-re", "0.3",
                "--hop-im", "-0.2", "--format", "json",
            ],
        ),
        (
            "boostcheck",
            vec!["boostcheck", "-n", "100", "--betas", "-0.5,0.5"],
        ),
        ("srcheck", vec!["srcheck", "--count", "7"]),
        (
            "qexp",
            vec![
                "qexp", "gaussian", "--center", "1", "--alpha", "2", "--beta", "1", "--window",
                "0,2",
            ],
        ),
        ("qexp", vec!["qexp", "--input", fun, "--format", "json"]),
    ];
    for (name, args) in &runs {
        let (a, b, c) = (
            tempfile::tempdir().unwrap(),
            tempfile::tempdir().unwrap(),
            tempfile::tempdir().unwrap(),
        );
        expect_success(&causet(a.path(), args), name)?;
        expect_success(&causet(b.path(), args), name)?;
        let first = files_in(a.path());
        ensure!(first.len() >= 2, "{name}: only {} files", first.len());
        ensure!(first == files_in(b.path()), "{name}: reruns differ");
        let manifest: PathBuf = a.path().join(format!("{name}.manifest.json"));
        let replay = Command::new(env!("CARGO_BIN_EXE_causet"))
            .args(["--quiet", "--out-dir"])
            .arg(c.path())
            .arg("replay")
            .arg(&manifest)
            .output()
            .unwrap();
        expect_success(&replay, &format!("replay of {name}"))?;
        ensure!(first == files_in(c.path()), "{name}: replay differs");
    }
    Ok(format!(
        "{} invocations reproduced twice and by replay",
        runs.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "sprinkle of 1000 events in the unit diamond",
            sprinkle_in_diamond,
        ),
        (
            "order axioms and closure/reduction round trip",
            order_axioms,
        ),
        (
            "precedence equals lightcone-coordinate order",
            lightcone_order,
        ),
        ("causal matrix invariant under boosts", boost_invariance),
        (
            "path counts and amplitude sums match enumeration",
            path_count_oracle,
        ),
        ("light-flash dilation, k factor and contraction", kinematics),
        (
            "seminorm convergence and position expectation",
            test_function_numerics,
        ),
        ("every command reproducible from its manifest", determinism),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(format!("panicked: {}", panic_message(&p))));
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn panic_message(payload: &Box<dyn std::any::Any + Send>) -> String {
    payload
        .downcast_ref::<String>()
        .cloned()
        .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_default()
}
