use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use dgmspace::diagram::{Order, PersistenceDiagram};
use dgmspace::distance::{brute_force_distance, distance};
use dgmspace::embeddings::{
    bottleneck_space, build_knn, build_torus_grid, build_union_space, kuratowski_embed,
    verify_annulus, verify_union_conditions, Scale,
};
use dgmspace::homology::{persistence, realize};
use dgmspace::negtype::{
    distortion_envelope, gaussian_gram, gaussian_scan, knn_threshold, log_grid, neg_type_holds,
    neg_type_supremum,
};
use dgmspace::space::{line, three_point};
use dgmspace::FiniteMetricSpace;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::report::{digest, fmt12, nums, to_json, Num, SCHEMA};
use crate::{Cli, Command, Experiment, GlobalOpts, SpaceSource};

/// Runs a command and returns what it prints on stdout.
pub fn run(cli: &Cli) -> CliResult<String> {
    let g = &cli.global;
    match &cli.command {
        Command::Dist { a, b, p, oracle } => dist(g, a, b, p, *oracle),
        Command::Embed { source, c } => embed(g, source, *c),
        Command::Certify { source, qmax, qs } => certify(g, source, *qmax, qs),
        Command::ProbeKernel { dir, source, threshold, t_min, t_max, t_count } => {
            probe_kernel(g, dir.as_deref(), source, *threshold, log_grid(*t_min, *t_max, *t_count))
        }
        Command::Experiment { name, max_n, pairs, sizes, t } => match name {
            Experiment::RoundnessDecay => roundness_decay(g, *max_n),
            Experiment::UnionConditions => union_conditions(g, pairs),
            Experiment::Envelope => envelope(g, sizes, *t),
        },
        Command::Realize { diagram, verify } => realize_cmd(g, diagram, *verify),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn read_diagram(path: &Path) -> CliResult<(PersistenceDiagram, String)> {
    let text = read(path)?;
    let d = text
        .parse()
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    Ok((d, text))
}

// Emits the JSON report (stdout with --json, file with --out) or the text.
fn emit<T: Serialize>(g: &GlobalOpts, report: &T, text: String, write_out: bool) -> CliResult<String> {
    let json = to_json(report)?;
    if write_out {
        if let Some(out) = &g.out {
            fs::write(out, &json)?;
        }
    }
    Ok(if g.json { json } else { text })
}

/// A resolved space and a canonical description for the input digest.
struct LoadedSpace {
    space: FiniteMetricSpace,
    description: Vec<u8>,
    knn: Option<usize>,
}

fn load_space(source: &SpaceSource) -> CliResult<LoadedSpace> {
    let chosen = [
        source.matrix.is_some(),
        source.knn.is_some(),
        source.torus.is_some(),
        source.line.is_some(),
        source.three_point,
    ]
    .iter()
    .filter(|&&b| b)
    .count();
    if chosen != 1 {
        return Err(CliError::input(
            "give exactly one of: a matrix file, --knn, --torus, --line, --three-point",
        ));
    }
    let (space, description, knn) = if let Some(path) = &source.matrix {
        let text = read(path)?;
        let space = FiniteMetricSpace::parse_csv(&text)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        (space, text.into_bytes(), None)
    } else if let Some(n) = source.knn {
        (build_knn(n)?, format!("builtin:knn:{n}").into_bytes(), Some(n))
    } else if let Some(nm) = &source.torus {
        (build_torus_grid(nm[0], nm[1])?, format!("builtin:torus:{}:{}", nm[0], nm[1]).into_bytes(), None)
    } else if let Some(n) = source.line {
        (line(n), format!("builtin:line:{n}").into_bytes(), None)
    } else {
        (three_point(), b"builtin:three-point".to_vec(), None)
    };
    if source.strict {
        space.check_metric().map_err(|e| CliError::input(e.to_string()))?;
    }
    Ok(LoadedSpace { space, description, knn })
}

#[derive(Serialize)]
struct DistReport {
    schema: &'static str,
    operation: &'static str,
    inputs_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    p: String,
    distance: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_agrees: Option<bool>,
}

fn dist(g: &GlobalOpts, a: &Path, b: &Path, p: &str, oracle: bool) -> CliResult<String> {
    let order: Order = p.parse().map_err(|e: dgmspace::Error| CliError::input(e.to_string()))?;
    let (da, ta) = read_diagram(a)?;
    let (db, tb) = read_diagram(b)?;
    let value = distance(&da, &db, order)?;
    let oracle_value = if oracle { Some(brute_force_distance(&da, &db, order)?) } else { None };
    let agrees = oracle_value.map(|o| (o - value).abs() <= 1e-12);
    let report = DistReport {
        schema: SCHEMA,
        operation: "dist",
        inputs_digest: digest([ta.as_bytes(), tb.as_bytes()]),
        seed: g.seed,
        p: order.to_string(),
        distance: Num(value),
        oracle: oracle_value.map(Num),
        oracle_agrees: agrees,
    };
    let mut text = format!("{}\n", fmt12(value));
    if let (Some(o), Some(ok)) = (oracle_value, agrees) {
        let _ = writeln!(text, "oracle {} ({})", fmt12(o), if ok { "agrees" } else { "DISAGREES" });
    }
    emit(g, &report, text, true)
}

#[derive(Serialize)]
struct AnnulusRow {
    label: String,
    file: Option<String>,
    norm: Num,
    pass: bool,
}

#[derive(Serialize)]
struct EmbedReport {
    schema: &'static str,
    operation: &'static str,
    inputs_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    scale: Num,
    points: usize,
    max_abs_residual: Num,
    residuals: Vec<Vec<Num>>,
    annulus: Vec<AnnulusRow>,
    verdict: &'static str,
}

fn embed(g: &GlobalOpts, source: &SpaceSource, c: Option<f64>) -> CliResult<String> {
    let loaded = load_space(source)?;
    let scale = c.map_or(Scale::Auto, Scale::Fixed);
    let result = kuratowski_embed(&loaded.space, scale)?;
    let residuals = result.residuals();
    let max_abs = residuals.amax();
    let annulus = verify_annulus(&result);
    let n = loaded.space.len();
    let width = n.to_string().len();
    let files: Vec<Option<String>> = (1..=n)
        .map(|k| g.out.as_ref().map(|_| format!("point_{k:0width$}.dgm")))
        .collect();
    if let Some(dir) = &g.out {
        fs::create_dir_all(dir)?;
        for (img, file) in result.images().iter().zip(&files) {
            fs::write(dir.join(file.as_deref().expect("named when writing")), img.to_text())?;
        }
    }
    let pass = max_abs <= 1e-12 && annulus.pass();
    let report = EmbedReport {
        schema: SCHEMA,
        operation: "embed",
        inputs_digest: digest([loaded.description.as_slice()]),
        seed: g.seed,
        scale: Num(result.scale()),
        points: n,
        max_abs_residual: Num(max_abs),
        residuals: (0..n).map(|i| (0..n).map(|j| Num(residuals[(i, j)])).collect()).collect(),
        annulus: annulus
            .entries
            .iter()
            .zip(loaded.space.labels())
            .zip(&files)
            .map(|((e, label), file)| AnnulusRow {
                label: label.clone(),
                file: file.clone(),
                norm: Num(e.norm),
                pass: e.pass,
            })
            .collect(),
        verdict: if pass { "pass" } else { "fail" },
    };
    let json = to_json(&report)?;
    if let Some(dir) = &g.out {
        fs::write(dir.join("report.json"), &json)?;
    }
    if g.json {
        return Ok(json);
    }
    let mut text = format!(
        "embedded {n} points with c = {}\nmax |residual| = {}\nannulus [c, 3c/2): {}\n",
        fmt12(result.scale()),
        fmt12(max_abs),
        if annulus.pass() { "pass" } else { "fail" }
    );
    if let Some(dir) = &g.out {
        let _ = writeln!(text, "wrote {n} diagrams and report.json to {}", dir.display());
    }
    let _ = writeln!(text, "verdict: {}", report.verdict);
    Ok(text)
}

#[derive(Serialize)]
struct VerdictEntry {
    operation: &'static str,
    q: Num,
    verdict: dgmspace::negtype::Verdict,
    extremal_eigenvalue: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness_vector: Option<Vec<Num>>,
    tolerance: Num,
}

#[derive(Serialize)]
struct SupremumEntry {
    value: Num,
    at_least: bool,
    q_max: Num,
}

#[derive(Serialize)]
struct ClosedForm {
    n: usize,
    threshold: Num,
    abs_difference: Num,
    agrees: bool,
}

#[derive(Serialize)]
struct CertifyReport {
    schema: &'static str,
    operation: &'static str,
    inputs_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    tolerance: Num,
    supremum: SupremumEntry,
    verdicts: Vec<VerdictEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form: Option<ClosedForm>,
}

fn certify(g: &GlobalOpts, source: &SpaceSource, qmax: f64, qs: &[f64]) -> CliResult<String> {
    let loaded = load_space(source)?;
    let sup = neg_type_supremum(&loaded.space, qmax, g.tol)?;
    let verdicts = qs
        .iter()
        .map(|&q| {
            let cert = neg_type_holds(&loaded.space, q, g.tol)?;
            Ok(VerdictEntry {
                operation: "neg_type_holds",
                q: Num(q),
                verdict: cert.verdict,
                extremal_eigenvalue: Num(cert.max_eigenvalue),
                witness_vector: cert.witness.as_deref().map(nums),
                tolerance: Num(g.tol),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let closed_form = match loaded.knn {
        Some(n) => {
            let threshold = knn_threshold(n)?;
            let diff = (threshold - sup.value).abs();
            Some(ClosedForm { n, threshold: Num(threshold), abs_difference: Num(diff), agrees: diff <= 1e-6 })
        }
        None => None,
    };
    let mut text = format!(
        "negative-type supremum: {}{}\n",
        if sup.at_least { ">= " } else { "" },
        fmt12(sup.value)
    );
    for v in &verdicts {
        let _ = writeln!(
            text,
            "q = {}: {} (max eigenvalue {})",
            fmt12(v.q.0),
            if v.verdict == dgmspace::negtype::Verdict::Holds { "holds" } else { "fails" },
            fmt12(v.extremal_eigenvalue.0)
        );
    }
    if let Some(cf) = &closed_form {
        let _ = writeln!(
            text,
            "closed form log2(1 + 1/(n-1)) = {} ({})",
            fmt12(cf.threshold.0),
            if cf.agrees { "matches" } else { "MISMATCH" }
        );
    }
    let report = CertifyReport {
        schema: SCHEMA,
        operation: "certify",
        inputs_digest: digest([loaded.description.as_slice()]),
        seed: g.seed,
        tolerance: Num(g.tol),
        supremum: SupremumEntry { value: Num(sup.value), at_least: sup.at_least, q_max: Num(qmax) },
        verdicts,
        closed_form,
    };
    emit(g, &report, text, true)
}

#[derive(Serialize)]
struct ProbeReport {
    schema: &'static str,
    operation: &'static str,
    inputs_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    diagrams: Vec<String>,
    grid_size: usize,
    t: Num,
    verdict: &'static str,
    extremal_eigenvalue: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness_vector: Option<Vec<Num>>,
    tolerance: Num,
}

fn probe_kernel(
    g: &GlobalOpts,
    dir: Option<&Path>,
    source: &SpaceSource,
    threshold: f64,
    grid: Vec<f64>,
) -> CliResult<String> {
    let (labels, diagrams, description) = match dir {
        Some(dir) => {
            let mut paths: Vec<PathBuf> = fs::read_dir(dir)
                .map_err(|e| CliError::input(format!("{}: {e}", dir.display())))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|ext| ext == "dgm"))
                .collect();
            paths.sort();
            let mut labels = Vec::new();
            let mut diagrams = Vec::new();
            let mut description = Vec::new();
            for path in &paths {
                let (d, text) = read_diagram(path)?;
                labels.push(path.file_name().unwrap_or_default().to_string_lossy().into_owned());
                diagrams.push(d);
                description.extend_from_slice(&(text.len() as u64).to_le_bytes());
                description.extend_from_slice(text.as_bytes());
            }
            (labels, diagrams, description)
        }
        None => {
            let loaded = load_space(source)?;
            let images = kuratowski_embed(&loaded.space, Scale::Auto)?.into_images();
            (loaded.space.labels().to_vec(), images, loaded.description)
        }
    };
    if diagrams.len() < 2 {
        return Err(CliError::input(format!("need at least 2 diagrams, found {}", diagrams.len())));
    }
    if grid.is_empty() {
        return Err(CliError::input("empty t grid"));
    }
    let space = bottleneck_space(labels.clone(), &diagrams)?;
    let scan = gaussian_scan(&space, &grid, threshold)?;
    let verdict = if scan.witness_found { "witness" } else { "no witness" };
    let text = format!(
        "{verdict}: minimum eigenvalue {} at t = {} over {} diagrams\n",
        fmt12(scan.min_eigenvalue),
        fmt12(scan.t),
        diagrams.len()
    );
    let report = ProbeReport {
        schema: SCHEMA,
        operation: "probe-kernel",
        inputs_digest: digest([description.as_slice()]),
        seed: g.seed,
        diagrams: labels,
        grid_size: grid.len(),
        t: Num(scan.t),
        verdict,
        extremal_eigenvalue: Num(scan.min_eigenvalue),
        witness_vector: scan.witness_found.then(|| nums(&scan.eigenvector)),
        tolerance: Num(threshold),
    };
    emit(g, &report, text, true)
}

/// Aligned text table.
fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = headers
        .iter()
        .enumerate()
        .map(|(i, h)| rows.iter().map(|r| r[i].len()).chain([h.len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    out.push_str(&line(headers.to_vec()));
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

#[derive(Serialize)]
struct ExperimentReport<R: Serialize> {
    schema: &'static str,
    operation: &'static str,
    experiment: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    tolerance: Num,
    rows: Vec<R>,
    verdict: &'static str,
}

fn experiment_report<R: Serialize>(
    g: &GlobalOpts,
    name: &'static str,
    rows: Vec<R>,
    pass: bool,
    mut text: String,
) -> CliResult<String> {
    let verdict = if pass { "pass" } else { "fail" };
    let _ = writeln!(text, "verdict: {verdict}");
    let report = ExperimentReport {
        schema: SCHEMA,
        operation: "experiment",
        experiment: name,
        seed: g.seed,
        tolerance: Num(g.tol),
        rows,
        verdict,
    };
    emit(g, &report, text, true)
}

#[derive(Serialize)]
struct RoundnessRow {
    n: usize,
    closed_form: Num,
    supremum: Num,
    abs_difference: Num,
}

fn roundness_decay(g: &GlobalOpts, max_n: usize) -> CliResult<String> {
    if max_n < 2 {
        return Err(CliError::input("--max-n must be at least 2"));
    }
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    let mut pass = true;
    for n in 2..=max_n {
        let knn = build_knn(n)?;
        let images = kuratowski_embed(&knn, Scale::Auto)?.into_images();
        let embedded = bottleneck_space(knn.labels().to_vec(), &images)?;
        let sup = neg_type_supremum(&embedded, dgmspace::negtype::DEFAULT_Q_MAX, g.tol)?;
        let closed = knn_threshold(n)?;
        let diff = (sup.value - closed).abs();
        pass &= diff <= 1e-6 && !sup.at_least;
        cells.push(vec![n.to_string(), format!("{closed:.4}"), fmt12(sup.value), format!("{diff:.1e}")]);
        rows.push(RoundnessRow { n, closed_form: Num(closed), supremum: Num(sup.value), abs_difference: Num(diff) });
    }
    let text = table(&["n", "log2(1+1/(n-1))", "bisected supremum", "|diff|"], &cells);
    experiment_report(g, "roundness-decay", rows, pass, text)
}

fn parse_list<T: std::str::FromStr>(s: &str, sep: char, what: &str) -> CliResult<Vec<T>> {
    s.split(sep)
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse().map_err(|_| CliError::input(format!("invalid {what} {x:?}"))))
        .collect()
}

#[derive(Serialize)]
struct UnionRow {
    n: usize,
    m: usize,
    points: usize,
    constant: Num,
}

#[derive(Serialize)]
struct UnionSummary {
    blocks: Vec<UnionRow>,
    max_isometry_residual: Num,
    isometry_pass: bool,
    min_separation_margin: Option<Num>,
    separation_pass: bool,
    pairs_checked: usize,
}

fn union_conditions(g: &GlobalOpts, pairs: &str) -> CliResult<String> {
    let pairs: Vec<(usize, usize)> = pairs
        .split(';')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|p| {
            let nm: Vec<usize> = parse_list(p, ',', "pair")?;
            match nm.as_slice() {
                [n, m] => Ok((*n, *m)),
                _ => Err(CliError::input(format!("invalid pair {p:?}"))),
            }
        })
        .collect::<CliResult<_>>()?;
    let u = build_union_space(&pairs)?;
    let report = verify_union_conditions(&u);
    let blocks: Vec<UnionRow> = u
        .blocks()
        .iter()
        .map(|b| UnionRow { n: b.n, m: b.m, points: b.grid().len(), constant: Num(b.scale()) })
        .collect();
    let cells: Vec<Vec<String>> = blocks
        .iter()
        .enumerate()
        .map(|(i, b)| vec![(i + 1).to_string(), b.n.to_string(), b.m.to_string(), b.points.to_string(), fmt12(b.constant.0)])
        .collect();
    let mut text = table(&["i", "n", "m", "points", "c_i"], &cells);
    let _ = writeln!(
        text,
        "isometric restriction: {} (max residual {})",
        if report.isometry_pass { "pass" } else { "fail" },
        fmt12(report.max_isometry_residual)
    );
    let _ = writeln!(
        text,
        "cross-block separation: {} (min margin {})",
        if report.separation_pass { "pass" } else { "fail" },
        report.min_separation_margin.map_or("n/a".to_string(), fmt12)
    );
    let summary = UnionSummary {
        blocks,
        max_isometry_residual: Num(report.max_isometry_residual),
        isometry_pass: report.isometry_pass,
        min_separation_margin: report.min_separation_margin.map(Num),
        separation_pass: report.separation_pass,
        pairs_checked: report.pairs_checked,
    };
    experiment_report(g, "union-conditions", vec![summary], report.pass(), text)
}

#[derive(Serialize)]
struct EnvelopeRow {
    n: usize,
    input_diameter: Num,
    max_output: Num,
    lower_at_diameter: Num,
    lower_ratio_at_diameter: Num,
    lower_not_growing: bool,
}

fn envelope(g: &GlobalOpts, sizes: &str, t: f64) -> CliResult<String> {
    let sizes: Vec<usize> = parse_list(sizes, ',', "size")?;
    if sizes.is_empty() {
        return Err(CliError::input("no grid sizes given"));
    }
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    let mut pass = true;
    for &n in &sizes {
        let grid = build_torus_grid(n, 1)?;
        let images = kuratowski_embed(&grid, Scale::Auto)?.into_images();
        let embedded = bottleneck_space(grid.labels().to_vec(), &images)?;
        let env = distortion_envelope(&embedded, &gaussian_gram(&embedded, t), g.tol)?;
        let last = env.bins.last().copied();
        let diameter = last.map_or(0.0, |b| b.input_distance);
        let lower = last.map_or(0.0, |b| b.min_output);
        let ratio = env.lower_ratio_at_diameter.unwrap_or(f64::NAN);
        pass &= env.max_output < 2f64.sqrt();
        cells.push(vec![n.to_string(), fmt12(diameter), fmt12(env.max_output), fmt12(lower), fmt12(ratio)]);
        rows.push(EnvelopeRow {
            n,
            input_diameter: Num(diameter),
            max_output: Num(env.max_output),
            lower_at_diameter: Num(lower),
            lower_ratio_at_diameter: Num(ratio),
            lower_not_growing: env.lower_not_growing,
        });
    }
    let text = table(&["n", "diameter", "max feature dist", "lower envelope", "lower/diameter"], &cells);
    experiment_report(g, "envelope", rows, pass, text)
}

#[derive(Serialize)]
struct RealizeReport {
    schema: &'static str,
    operation: &'static str,
    inputs_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    points: usize,
    simplices: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    complex_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    roundtrip: Option<&'static str>,
}

fn realize_cmd(g: &GlobalOpts, path: &Path, verify: bool) -> CliResult<String> {
    let (diagram, text) = read_diagram(path)?;
    let complex = realize(&diagram);
    let complex_text = complex.to_text();
    if let Some(out) = &g.out {
        fs::write(out, &complex_text)?;
    }
    let roundtrip = verify.then(|| {
        if persistence(&complex).diagram(1) == diagram {
            "pass"
        } else {
            "fail"
        }
    });
    let report = RealizeReport {
        schema: SCHEMA,
        operation: "realize",
        inputs_digest: digest([text.as_bytes()]),
        seed: g.seed,
        points: diagram.len(),
        simplices: complex.len(),
        complex_path: g.out.as_ref().map(|p| p.display().to_string()),
        roundtrip,
    };
    if g.json {
        return Ok(to_json(&report)?);
    }
    let mut out = String::new();
    if g.out.is_none() {
        out.push_str(&complex_text);
    } else {
        let _ = writeln!(out, "wrote {} simplices", complex.len());
    }
    if let Some(r) = roundtrip {
        let _ = writeln!(out, "# roundtrip: {r}");
    }
    Ok(out)
}
