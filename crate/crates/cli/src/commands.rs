use crate::error::{CliError, CliResult};
use crate::input::{canonical_path, read_poset, Poset};
use crate::manifest::{digest_file, FileDigest, OutputSet, RunManifest, TOOL_VERSION};
use crate::svg;
use crate::{
    BoostcheckArgs, ChainsArgs, Cli, Command, Family, Format, GlobalArgs, ModeArg, NormArg,
    PathsumArgs, QexpArgs, RelateArgs, ReplayArgs, SprinkleArgs, SrcheckArgs,
};
use causet_core::bitmatrix::BitMatrix;
use causet_core::causal::{compare_under_boost, enumerate_paths};
use causet_core::geometry::write_events_csv;
use causet_core::kcalculus::{sweep, sweep_csv};
use causet_core::schwartz::{
    expectation, in_preimage, seminorm, OpenWindow, SeminormIndex, TestFunction,
};
use causet_core::sprinkle::{sprinkle, SprinkleConfig, SprinkleMode};
use causet_core::worldline::{
    build_ensemble, path_count, total_amplitude, AmplitudeModel, Normalization,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

/// Deviation allowed between the simulated and closed-form kinematics.
pub const SRCHECK_TOLERANCE: f64 = 1e-9;

/// Number of default boosts spread evenly over [-0.99, 0.99].
const DEFAULT_BOOST_COUNT: usize = 20;

/// Chains listed in the printed report; files always hold all of them.
const PRINT_LIMIT: usize = 20;

struct Report {
    outputs: OutputSet,
    inputs: Vec<FileDigest>,
    lines: Vec<String>,
    failure: Option<String>,
}

impl Report {
    fn new(out_dir: &Path) -> CliResult<Self> {
        Ok(Self {
            outputs: OutputSet::new(out_dir)?,
            inputs: Vec::new(),
            lines: Vec::new(),
            failure: None,
        })
    }

    fn say(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    fn read_input(&mut self, path: &Path) -> CliResult<()> {
        self.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: digest_file(path)?,
        });
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestConfig {
    seed: u64,
    format: Format,
    args: serde_json::Value,
}

fn invalid(e: impl Display) -> CliError {
    CliError::validation(e)
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Replay(args) => replay(&args, &cli.global),
        command => {
            let out_dir = cli
                .global
                .out_dir
                .clone()
                .unwrap_or_else(|| PathBuf::from("."));
            let (_, failure) = execute(&cli.global, command, &out_dir)?;
            failure.map_or(Ok(()), |f| Err(CliError::Tolerance(f)))
        }
    }
}

/// Runs one command, writes its outputs and manifest, and prints the report.
/// A tolerance failure is returned alongside the manifest so that the
/// outputs documenting it are still written.
fn execute(
    global: &GlobalArgs,
    command: Command,
    out_dir: &Path,
) -> CliResult<(RunManifest, Option<String>)> {
    let command = resolve(command)?;
    let name = command.name();
    let (args, report) = match &command {
        Command::Sprinkle(a) => (to_json(a), cmd_sprinkle(global, a, out_dir)?),
        Command::Relate(a) => (to_json(a), cmd_relate(global, a, out_dir)?),
        Command::Chains(a) => (to_json(a), cmd_chains(global, a, out_dir)?),
        Command::Pathsum(a) => (to_json(a), cmd_pathsum(global, a, out_dir)?),
        Command::Boostcheck(a) => (to_json(a), cmd_boostcheck(global, a, out_dir)?),
        Command::Srcheck(a) => (to_json(a), cmd_srcheck(global, a, out_dir)?),
        Command::Qexp(a) => (to_json(a), cmd_qexp(global, a, out_dir)?),
        Command::Replay(_) => return Err(invalid("a manifest cannot describe a replay")),
    };
    let config = ManifestConfig {
        seed: global.seed,
        format: global.format,
        args,
    };
    let manifest = RunManifest {
        command: name.to_string(),
        config: serde_json::to_value(&config).expect("config serializes"),
        tool_version: TOOL_VERSION.to_string(),
        inputs: report.inputs,
        outputs: report.outputs.into_digests(),
    };
    manifest.write(out_dir)?;
    if !global.quiet {
        for line in &report.lines {
            println!("{line}");
        }
    }
    Ok((manifest, report.failure))
}

fn to_json<T: Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).expect("arguments serialize")
}

/// Fills in defaults that depend on other flags and makes input paths
/// absolute, so the manifest records the complete invocation.
fn resolve(command: Command) -> CliResult<Command> {
    Ok(match command {
        Command::Relate(mut a) => {
            a.input = canonical_path(&a.input)?;
            Command::Relate(a)
        }
        Command::Chains(mut a) => {
            a.input = canonical_path(&a.input)?;
            Command::Chains(a)
        }
        Command::Pathsum(mut a) => {
            a.input = canonical_path(&a.input)?;
            Command::Pathsum(a)
        }
        Command::Qexp(mut a) => {
            if let Some(p) = &a.input {
                a.input = Some(canonical_path(p)?);
            }
            Command::Qexp(a)
        }
        Command::Boostcheck(mut a) => {
            if a.betas.is_empty() {
                a.betas = linspace(-0.99, 0.99, DEFAULT_BOOST_COUNT);
            }
            Command::Boostcheck(a)
        }
        Command::Srcheck(mut a) => {
            if a.betas.is_empty() {
                if a.count == 0 {
                    return Err(invalid("--count must be at least 1"));
                }
                a.betas = linspace(0.0, a.max_beta, a.count);
            }
            Command::Srcheck(a)
        }
        other => other,
    })
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
        .collect()
}

fn cmd_sprinkle(global: &GlobalArgs, a: &SprinkleArgs, out_dir: &Path) -> CliResult<Report> {
    let mode = match a.mode {
        ModeArg::Fixed => SprinkleMode::Fixed,
        ModeArg::Poisson => SprinkleMode::Poisson,
    };
    let config = SprinkleConfig::new(a.n, a.size, global.seed).with_mode(mode);
    let s = sprinkle(&config).map_err(invalid)?;
    let mut report = Report::new(out_dir)?;
    let data = match global.format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_events_csv(&mut buf, &s.events).expect("writing to memory");
            report.outputs.write("sprinkle.csv", &buf)?
        }
        Format::Json => {
            let mut text = s.to_json().map_err(invalid)?;
            text.push('\n');
            report.outputs.write("sprinkle.json", text.as_bytes())?
        }
    };
    let plot = report
        .outputs
        .write("sprinkle.svg", svg::scatter(&s.events, a.size).as_bytes())?;
    report.say(format!(
        "sprinkled {} events into the S = {} diamond (seed {})",
        s.len(),
        a.size,
        global.seed
    ));
    report.say(format!("events: {}", data.display()));
    report.say(format!("plot: {}", plot.display()));
    Ok(report)
}

fn load(report: &mut Report, path: &Path) -> CliResult<Poset> {
    report.read_input(path)?;
    read_poset(path)
}

fn cmd_relate(global: &GlobalArgs, a: &RelateArgs, out_dir: &Path) -> CliResult<Report> {
    let mut report = Report::new(out_dir)?;
    let poset = load(&mut report, &a.input)?;
    let sparse = |m: &BitMatrix| {
        let mut text = serde_json::to_string(&m.to_sparse()).expect("sparse matrix serializes");
        text.push('\n');
        text
    };
    report
        .outputs
        .write("causal.csv", poset.causal.to_dense_csv().as_bytes())?;
    report
        .outputs
        .write("causal.json", sparse(&poset.causal).as_bytes())?;
    report
        .outputs
        .write("links.csv", poset.links.to_dense_csv().as_bytes())?;
    report
        .outputs
        .write("links.json", sparse(&poset.links).as_bytes())?;

    let n = poset.n();
    let relations = poset.causal.relation_count();
    let links = poset.links.link_count();
    let longest = if n == 0 {
        0
    } else {
        poset.links.longest_chain_overall() + 1
    };
    match global.format {
        Format::Csv => {
            report.say(format!("events: {n}"));
            report.say(format!("relations: {relations}"));
            report.say(format!("links: {links}"));
            report.say(format!("longest chain: {longest} events"));
        }
        Format::Json => report.say(
            json!({"n": n, "relations": relations, "links": links, "longest_chain": longest})
                .to_string(),
        ),
    }
    Ok(report)
}

fn adjacency(poset: &Poset, relations: bool) -> &BitMatrix {
    if relations {
        &poset.causal
    } else {
        &poset.links
    }
}

fn check_pair(from: usize, to: usize, n: usize) -> CliResult<()> {
    if to <= from {
        return Err(invalid(format!(
            "--to ({to}) must be greater than --from ({from})"
        )));
    }
    if to >= n {
        return Err(invalid(format!(
            "--to ({to}) is out of range for {n} events"
        )));
    }
    Ok(())
}

fn format_chain(indices: &[usize]) -> String {
    indices
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_chains(global: &GlobalArgs, a: &ChainsArgs, out_dir: &Path) -> CliResult<Report> {
    let mut report = Report::new(out_dir)?;
    let poset = load(&mut report, &a.input)?;
    check_pair(a.from, a.to, poset.n())?;
    let result =
        enumerate_paths(adjacency(&poset, a.relations), a.from, a.to, a.cap).map_err(invalid)?;
    match global.format {
        Format::Csv => {
            let mut text = String::from("chain,links\n");
            for c in &result.chains {
                text.push_str(&format!("{},{}\n", format_chain(c.indices()), c.link_len()));
            }
            report.outputs.write("chains.csv", text.as_bytes())?;
        }
        Format::Json => {
            let value = json!({
                "source": a.from,
                "target": a.to,
                "chains": result.chains,
                "truncated": result.truncated,
            });
            report
                .outputs
                .write("chains.json", format!("{value}\n").as_bytes())?;
        }
    }
    report.say(format!(
        "{} chains from {} to {}{}",
        result.chains.len(),
        a.from,
        a.to,
        if result.truncated {
            " (truncated at cap)"
        } else {
            ""
        }
    ));
    for c in result.chains.iter().take(PRINT_LIMIT) {
        report.say(format!("  {}", format_chain(c.indices())));
    }
    if result.chains.len() > PRINT_LIMIT {
        report.say(format!("  ... {} more", result.chains.len() - PRINT_LIMIT));
    }
    Ok(report)
}

fn cmd_pathsum(global: &GlobalArgs, a: &PathsumArgs, out_dir: &Path) -> CliResult<Report> {
    let mut report = Report::new(out_dir)?;
    let poset = load(&mut report, &a.input)?;
    check_pair(a.from, a.to, poset.n())?;
    if !(a.hop_re.is_finite() && a.hop_im.is_finite()) {
        return Err(invalid("hop amplitude must be finite"));
    }
    let adj = adjacency(&poset, a.relations);
    let model = AmplitudeModel::new(Complex64::new(a.hop_re, a.hop_im));
    let norm = match a.norm {
        NormArg::Born => Normalization::Born,
        NormArg::Linear => Normalization::Linear,
    };
    let count = path_count(adj, a.from, a.to).map_err(invalid)?;
    let total = total_amplitude(adj, model, a.from, a.to).map_err(invalid)?;
    let ensemble = build_ensemble(adj, model, a.from, a.to, a.cap, norm).map_err(invalid)?;

    match global.format {
        Format::Csv => {
            let mut text = String::from("chain,links,amplitude_re,amplitude_im,weight\n");
            for ((c, amp), w) in ensemble
                .chains
                .iter()
                .zip(&ensemble.amplitudes)
                .zip(&ensemble.weights)
            {
                text.push_str(&format!(
                    "{},{},{:.16e},{:.16e},{:.16e}\n",
                    format_chain(c.indices()),
                    c.link_len(),
                    amp.re,
                    amp.im,
                    w
                ));
            }
            report.outputs.write("pathsum.csv", text.as_bytes())?;
        }
        Format::Json => {
            let value = ensemble.to_json_value();
            report
                .outputs
                .write("pathsum.json", format!("{value}\n").as_bytes())?;
        }
    }
    report.say(format!("paths: {count}"));
    report.say(format!("total amplitude: {} {:+}i", total.re, total.im));
    report.say(format!(
        "chains enumerated: {}{}",
        ensemble.chains.len(),
        if ensemble.truncated {
            " (truncated at cap; weights cover the enumerated chains only)"
        } else {
            ""
        }
    ));
    for (c, w) in ensemble
        .chains
        .iter()
        .zip(&ensemble.weights)
        .take(PRINT_LIMIT)
    {
        report.say(format!("  {}  weight {}", format_chain(c.indices()), w));
    }
    if ensemble.chains.len() > PRINT_LIMIT {
        report.say(format!(
            "  ... {} more",
            ensemble.chains.len() - PRINT_LIMIT
        ));
    }
    Ok(report)
}

fn cmd_boostcheck(global: &GlobalArgs, a: &BoostcheckArgs, out_dir: &Path) -> CliResult<Report> {
    if let Some(b) = a.betas.iter().find(|b| !(b.abs() < 1.0)) {
        return Err(invalid(format!("boost speed {b} must satisfy |beta| < 1")));
    }
    let s = sprinkle(&SprinkleConfig::new(a.n, a.size, global.seed)).map_err(invalid)?;
    let rows = a
        .betas
        .iter()
        .map(|&b| compare_under_boost(&s.events, b).map_err(invalid))
        .collect::<CliResult<Vec<_>>>()?;
    let mut report = Report::new(out_dir)?;
    match global.format {
        Format::Csv => {
            let mut text = String::from("beta,compared_pairs,guard_band_pairs,differing_bits\n");
            for r in &rows {
                text.push_str(&format!(
                    "{:.16e},{},{},{}\n",
                    r.beta, r.compared_pairs, r.guard_band_pairs, r.differing_bits
                ));
            }
            report.outputs.write("boostcheck.csv", text.as_bytes())?;
        }
        Format::Json => {
            let text = serde_json::to_string(&rows).expect("rows serialize");
            report
                .outputs
                .write("boostcheck.json", format!("{text}\n").as_bytes())?;
        }
    }
    for r in &rows {
        report.say(format!(
            "beta {:+.4}: {} pairs compared, {} in guard band, {} differing",
            r.beta, r.compared_pairs, r.guard_band_pairs, r.differing_bits
        ));
    }
    let failing = rows.iter().filter(|r| !r.is_identical()).count();
    if failing > 0 {
        report.failure = Some(format!("{failing} boosts changed the causal matrix"));
    } else {
        report.say(format!(
            "all {} boosts preserve the causal matrix",
            rows.len()
        ));
    }
    Ok(report)
}

fn cmd_srcheck(global: &GlobalArgs, a: &SrcheckArgs, out_dir: &Path) -> CliResult<Report> {
    if let Some(b) = a.betas.iter().find(|b| !(**b >= 0.0 && **b < 1.0)) {
        return Err(invalid(format!("speed {b} must satisfy 0 <= beta < 1")));
    }
    let rows = sweep(&a.betas).map_err(invalid)?;
    let mut report = Report::new(out_dir)?;
    report
        .outputs
        .write("srcheck.csv", sweep_csv(&rows).as_bytes())?;
    if global.format == Format::Json {
        let text = serde_json::to_string(&rows).expect("rows serialize");
        report
            .outputs
            .write("srcheck.json", format!("{text}\n").as_bytes())?;
    }
    let worst = rows.iter().map(|r| r.max_deviation()).fold(0.0, f64::max);
    for r in &rows {
        report.say(format!(
            "beta {:.4}: k {:.12}  t1/t2 {:.12}  gamma {:.12}  L/L0 {:.12}",
            r.beta, r.k, r.t1_over_t2, r.gamma_closed_form, r.l_over_l0
        ));
    }
    report.say(format!(
        "max deviation {worst:e} (tolerance {SRCHECK_TOLERANCE:e})"
    ));
    if !(worst <= SRCHECK_TOLERANCE) {
        report.failure = Some(format!("deviation {worst:e} exceeds {SRCHECK_TOLERANCE:e}"));
    }
    Ok(report)
}

fn cmd_qexp(global: &GlobalArgs, a: &QexpArgs, out_dir: &Path) -> CliResult<Report> {
    let mut report = Report::new(out_dir)?;
    let f = match (&a.input, a.family) {
        (Some(path), _) => {
            report.read_input(path)?;
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            TestFunction::from_csv(&text)
                .map_err(|e| invalid(format!("{}: {e}", path.display())))?
        }
        (None, Some(Family::Gaussian)) => {
            TestFunction::gaussian(a.center, a.width, a.half_width, a.step).map_err(invalid)?
        }
        (None, None) => return Err(invalid("give a function family (gaussian) or --input")),
    };
    let idx = SeminormIndex::new(a.alpha, a.beta).map_err(invalid)?;
    let window = match a.window.as_slice() {
        [] => None,
        [lo, hi] => Some(OpenWindow::new(*lo, *hi).map_err(invalid)?),
        _ => return Err(invalid("--window takes exactly two values LO,HI")),
    };
    let norm = seminorm(&f, idx).map_err(invalid)?;
    let q = expectation(&f).map_err(invalid)?;
    let member = window
        .map(|w| in_preimage(&f, w))
        .transpose()
        .map_err(invalid)?;

    match global.format {
        Format::Csv => {
            let (lo, hi, m) = match (window, member) {
                (Some(w), Some(m)) => (
                    format!("{:.16e}", w.lo()),
                    format!("{:.16e}", w.hi()),
                    m.to_string(),
                ),
                _ => (String::new(), String::new(), String::new()),
            };
            let text = format!(
                "alpha,beta,seminorm,expectation,window_lo,window_hi,in_preimage\n{},{},{:.16e},{:.16e},{lo},{hi},{m}\n",
                a.alpha, a.beta, norm, q
            );
            report.outputs.write("qexp.csv", text.as_bytes())?;
        }
        Format::Json => {
            let value = json!({
                "alpha": a.alpha,
                "beta": a.beta,
                "seminorm": norm,
                "expectation": q,
                "window": window.map(|w| [w.lo(), w.hi()]),
                "in_preimage": member,
            });
            report
                .outputs
                .write("qexp.json", format!("{value}\n").as_bytes())?;
        }
    }
    report.say(format!(
        "seminorm (alpha {}, beta {}): {norm}",
        a.alpha, a.beta
    ));
    report.say(format!("expectation: {q}"));
    if let (Some(w), Some(m)) = (window, member) {
        report.say(format!("in preimage of ({}, {}): {m}", w.lo(), w.hi()));
    }
    Ok(report)
}

fn replay(args: &ReplayArgs, global: &GlobalArgs) -> CliResult<()> {
    let recorded = RunManifest::read(&args.manifest)?;
    let config: ManifestConfig = serde_json::from_value(recorded.config.clone())
        .map_err(|e| invalid(format!("{}: invalid config: {e}", args.manifest.display())))?;
    let parse = |e: serde_json::Error| {
        invalid(format!(
            "{}: invalid arguments: {e}",
            args.manifest.display()
        ))
    };
    let command = match recorded.command.as_str() {
        "sprinkle" => Command::Sprinkle(serde_json::from_value(config.args).map_err(parse)?),
        "relate" => Command::Relate(serde_json::from_value(config.args).map_err(parse)?),
        "chains" => Command::Chains(serde_json::from_value(config.args).map_err(parse)?),
        "pathsum" => Command::Pathsum(serde_json::from_value(config.args).map_err(parse)?),
        "boostcheck" => Command::Boostcheck(serde_json::from_value(config.args).map_err(parse)?),
        "srcheck" => Command::Srcheck(serde_json::from_value(config.args).map_err(parse)?),
        "qexp" => Command::Qexp(serde_json::from_value(config.args).map_err(parse)?),
        other => return Err(invalid(format!("unknown command `{other}` in manifest"))),
    };
    for input in &recorded.inputs {
        let path = Path::new(&input.path);
        if digest_file(path)? != input.sha256 {
            return Err(CliError::Tolerance(format!(
                "input {} has changed since the recorded run",
                input.path
            )));
        }
    }
    let out_dir = match &global.out_dir {
        Some(dir) => dir.clone(),
        None => args
            .manifest
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from(".")),
    };
    let rerun_global = GlobalArgs {
        seed: config.seed,
        out_dir: None,
        format: config.format,
        quiet: global.quiet,
    };
    let (rerun, _) = execute(&rerun_global, command, &out_dir)?;
    if rerun.tool_version != recorded.tool_version && !global.quiet {
        println!(
            "note: recorded with {}, replayed with {}",
            recorded.tool_version, rerun.tool_version
        );
    }
    let mismatched: Vec<&str> = recorded
        .outputs
        .iter()
        .filter(|o| !rerun.outputs.contains(o))
        .map(|o| o.path.as_str())
        .collect();
    if !mismatched.is_empty() || rerun.outputs.len() != recorded.outputs.len() {
        return Err(CliError::Tolerance(format!(
            "replay of {} differs from the recorded outputs: {}",
            recorded.command,
            mismatched.join(", ")
        )));
    }
    if !global.quiet {
        println!(
            "replay {}: {} outputs reproduced",
            recorded.command,
            rerun.outputs.len()
        );
    }
    Ok(())
}
