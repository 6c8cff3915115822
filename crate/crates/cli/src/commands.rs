use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use vrsuite_core::analysis::{self, leaderboard, residual_capability_matrix, CapabilityMatrix, PairRecord, PairwiseTable};
use vrsuite_core::evalkit::{self, aggregate, read_scores_csv, write_scores_csv, BenchmarkTable, ScoreRecord, ScoreReport};
use vrsuite_core::factory::{enqueue_plan, run_pool, EventSink, FaultPolicy, FsStore, GenerateExecutor, MemoryQueue, OutputFormat, WorkerConfig};
use vrsuite_core::generators::{family, family_codes, generate, GenerationPlan, PlanEntry};
use vrsuite_core::render::CodecConfig;
use vrsuite_core::sample::{list_sample_dirs, load_sample, read_manifest, validate_sample, write_sample, DuplicateRegistry, Faculty, Split};

use crate::config::{resolve, AnalyzeArgs, Cli, Command, FactoryArgs, Format, GenerateArgs, ReportArgs, RunConfig, ScoreArgs, ValidateArgs};

pub fn run(cli: Cli) -> Result<ExitCode> {
    let codec = CodecConfig::from_env();
    match cli.command {
        Command::Generate(a) => generate_cmd(a, &codec),
        Command::Validate(a) => validate_cmd(a, &codec),
        Command::Score(a) => score_cmd(a, &codec),
        Command::Report(a) => report_cmd(a, &codec),
        Command::Analyze(a) => analyze_cmd(a, &codec),
        Command::Factory(a) => factory_cmd(a, &codec),
    }
}

fn task_list(tasks: &[String]) -> Result<Vec<String>> {
    if tasks.is_empty() {
        return Ok(family_codes().into_iter().map(String::from).collect());
    }
    for t in tasks {
        family(t)?;
    }
    Ok(tasks.to_vec())
}

fn generate_cmd(mut a: GenerateArgs, codec: &CodecConfig) -> Result<ExitCode> {
    a.out = resolve(&a.out)?;
    let tasks = task_list(&a.tasks)?;
    if a.count == 0 {
        bail!("--count must be at least 1");
    }
    for t in &tasks {
        // One registry per family and run, so duplicates are caught across
        // the whole batch.
        let registry = DuplicateRegistry::new();
        for index in a.start..a.start + a.count {
            let sample = generate(family(t)?, a.split, index, &registry).with_context(|| format!("generating {t} {} {index}", a.split))?;
            let digest = write_sample(&sample, &a.out, codec)?;
            println!("{t}\t{}\t{index:06}\t{digest}", a.split);
        }
    }
    RunConfig::new("generate", &a, codec).write(&a.out)?;
    Ok(ExitCode::SUCCESS)
}

fn validate_cmd(mut a: ValidateArgs, codec: &CodecConfig) -> Result<ExitCode> {
    a.dataset = resolve(&a.dataset)?;
    let dirs = list_sample_dirs(&a.dataset)?;
    if dirs.is_empty() {
        bail!("no samples under {}", a.dataset.display());
    }
    let registry = DuplicateRegistry::new();
    let mut failed = 0usize;
    for dir in &dirs {
        let rel = dir.strip_prefix(&a.dataset).unwrap_or(dir).display().to_string();
        match load_sample(dir, codec) {
            Ok(sample) => {
                let report = validate_sample(&sample, &registry);
                if !report.passed() {
                    failed += 1;
                    println!("FAIL\t{rel}\t{}", report.summary());
                }
            }
            Err(e) => {
                failed += 1;
                println!("FAIL\t{rel}\tunreadable: {e}");
            }
        }
    }
    println!("{} samples, {} passed, {} failed", dirs.len(), dirs.len() - failed, failed);
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

/// `candidate.mp4`, else a `frames/` directory, inside the sample's candidate folder.
fn candidate_path(root: &Path, task: &str, split: Split, index: u64) -> Option<PathBuf> {
    let dir = root.join(task).join(split.as_str()).join(format!("{index:06}"));
    let video = dir.join("candidate.mp4");
    let frames = dir.join("frames");
    if video.is_file() {
        Some(video)
    } else if frames.is_dir() {
        Some(frames)
    } else {
        None
    }
}

#[derive(Serialize)]
struct DiagnosticLine<'a> {
    model: &'a str,
    task: &'a str,
    split: Split,
    index: u64,
    frame: Option<usize>,
    message: &'a str,
}

fn score_cmd(mut a: ScoreArgs, codec: &CodecConfig) -> Result<ExitCode> {
    a.dataset = resolve(&a.dataset)?;
    a.out = resolve(&a.out)?;
    a.candidates = a.candidates.iter().map(|p| resolve(p)).collect::<Result<_>>()?;
    if !a.models.is_empty() && a.models.len() != a.candidates.len() {
        bail!("{} --model names for {} --candidates directories", a.models.len(), a.candidates.len());
    }
    if a.models.is_empty() {
        a.models = a.candidates.iter().map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "model".into())).collect();
    }
    let mut manifests = Vec::new();
    for dir in list_sample_dirs(&a.dataset)? {
        let m = read_manifest(&dir)?;
        if m.split != Split::Train {
            manifests.push(m);
        }
    }
    if manifests.is_empty() {
        bail!("no test samples under {}", a.dataset.display());
    }
    manifests.sort_by(|x, y| (&x.task, x.split, x.index).cmp(&(&y.task, y.split, y.index)));

    fs::create_dir_all(&a.out)?;
    let mut diag = BufWriter::new(File::create(a.out.join("diagnostics.ndjson"))?);
    let mut records = Vec::new();
    for (model, root) in a.models.iter().zip(&a.candidates) {
        for m in &manifests {
            let report = match candidate_path(root, &m.task, m.split, m.index) {
                Some(p) => evalkit::score_video_file(m, &p, codec)?,
                None => ScoreReport::zero(m, "missing candidate")?,
            };
            for d in &report.diagnostics {
                let line = DiagnosticLine { model, task: &m.task, split: m.split, index: m.index, frame: d.frame, message: &d.message };
                serde_json::to_writer(&mut diag, &line)?;
                diag.write_all(b"\n")?;
            }
            records.push(ScoreRecord::from_report(model, m.faculty, &report));
        }
    }
    diag.flush()?;
    write_scores_csv(&records, File::create(a.out.join("scores.csv"))?)?;
    RunConfig::new("score", &a, codec).write(&a.out)?;
    println!("{} rows written to {}", records.len(), a.out.join("scores.csv").display());
    Ok(ExitCode::SUCCESS)
}

fn read_scores(path: &Path) -> Result<Vec<ScoreRecord>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(read_scores_csv(f)?)
}

fn report_cmd(mut a: ReportArgs, codec: &CodecConfig) -> Result<ExitCode> {
    a.scores = resolve(&a.scores)?;
    let out = match &a.out {
        Some(o) => resolve(o)?,
        None => a.scores.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    a.out = Some(out.clone());
    let table = aggregate(&read_scores(&a.scores)?)?;
    fs::create_dir_all(&out)?;
    table.write_csv(File::create(out.join("benchmark.csv"))?)?;
    fs::write(out.join("benchmark.txt"), table.to_text())?;
    RunConfig::new("report", &a, codec).write(&out)?;
    print!("{}", table.to_text());
    Ok(ExitCode::SUCCESS)
}

/// Per-model faculty scores with the two test splits averaged, and the
/// overall score as the general factor.
fn capability_inputs(table: &BenchmarkTable) -> Result<(Vec<String>, Vec<[f64; 5]>, Vec<f64>)> {
    let mut names = Vec::new();
    let mut scores = Vec::new();
    let mut general = Vec::new();
    for r in &table.rows {
        let mut row = [0.0; 5];
        for (i, f) in Faculty::ALL.iter().enumerate() {
            let v: Vec<f64> = [r.id.faculty(*f), r.ood.faculty(*f)].into_iter().flatten().collect();
            if v.is_empty() {
                bail!("model {} has no {} tasks", r.model, f);
            }
            row[i] = v.iter().sum::<f64>() / v.len() as f64;
        }
        names.push(r.model.clone());
        scores.push(row);
        general.push(r.overall);
    }
    Ok((names, scores, general))
}

#[derive(Serialize)]
struct CapabilityReport<'a> {
    source: &'a str,
    models: Vec<String>,
    matrix: &'a CapabilityMatrix,
    /// (faculty a, faculty b, computed, reported) for the reference leaderboard.
    reported: Vec<(Faculty, Faculty, f64, f64)>,
}

fn analyze_cmd(mut a: AnalyzeArgs, codec: &CodecConfig) -> Result<ExitCode> {
    a.out = resolve(&a.out)?;
    a.scores = a.scores.as_deref().map(resolve).transpose()?;
    a.annotations = a.annotations.as_deref().map(resolve).transpose()?;
    fs::create_dir_all(&a.out)?;
    let records = a.scores.as_deref().map(read_scores).transpose()?;

    if let Some(path) = &a.annotations {
        let table = analysis::read_annotations(File::open(path).with_context(|| format!("opening {}", path.display()))?)?;
        let table = PairwiseTable::new(table.records().iter().map(normalize_sample).collect())?;
        let mut w = csv::Writer::from_path(a.out.join("win_ratios.csv"))?;
        w.write_record(["split", "model", "win_ratio"])?;
        for (label, t) in [("all".to_string(), table.clone()), (Split::TestInDomain.to_string(), table.for_split(Split::TestInDomain)), (Split::TestOutOfDomain.to_string(), table.for_split(Split::TestOutOfDomain))] {
            if t.records().is_empty() {
                continue;
            }
            for (m, r) in analysis::win_ratios(&t)? {
                w.write_record([label.clone(), m, format!("{r:.6}")])?;
            }
        }
        w.flush()?;
        if let Some(records) = &records {
            let mut lines = String::new();
            for split in [Split::TestInDomain, Split::TestOutOfDomain] {
                if table.for_split(split).records().is_empty() {
                    continue;
                }
                let al = analysis::alignment(records, &table, split)?;
                match al.rho {
                    Some(rho) => println!("{split}: spearman rho {rho:.3} over {} models", al.pairs.len()),
                    None => println!("{split}: rho undefined over {} models", al.pairs.len()),
                }
                lines.push_str(&serde_json::to_string(&al)?);
                lines.push('\n');
            }
            fs::write(a.out.join("alignment.ndjson"), lines)?;
        }
    }

    let inputs = if a.leaderboard {
        let (s, g) = leaderboard::residualization_inputs();
        Ok(("leaderboard", leaderboard::MODELS.iter().map(|(n, _)| n.to_string()).collect(), s, g))
    } else {
        aggregate(records.as_deref().unwrap_or_default()).map_err(anyhow::Error::from).and_then(|t| capability_inputs(&t)).map(|(n, s, g)| ("scores", n, s, g))
    };
    match inputs.and_then(|(source, names, scores, general)| Ok((source, names, residual_capability_matrix(&scores, &general)?))) {
        Ok((source, names, matrix)) => {
            analysis::write_matrix_csv(&matrix, File::create(a.out.join("capability.csv"))?)?;
            let reported = if a.leaderboard { leaderboard::REPORTED_CORRELATIONS.iter().map(|&(x, y, r)| (x, y, matrix.get(x, y), r)).collect() } else { Vec::new() };
            for (x, y, c, r) in &reported {
                println!("{}-{}: {c:+.3} (reference {r:+.3})", x.short(), y.short());
            }
            let report = CapabilityReport { source, models: names, matrix: &matrix, reported };
            fs::write(a.out.join("capability.json"), serde_json::to_string_pretty(&report)? + "\n")?;
        }
        Err(e) => println!("capability matrix skipped: {e:#}"),
    }
    RunConfig::new("analyze", &a, codec).write(&a.out)?;
    Ok(ExitCode::SUCCESS)
}

/// Rewrites `task/split/index` ids with a zero-padded index so they match
/// the dataset layout regardless of how annotators wrote them.
fn normalize_sample(r: &PairRecord) -> PairRecord {
    let parts: Vec<&str> = r.sample.split('/').collect();
    let mut out = r.clone();
    if let [task, split, index] = parts[..] {
        if let Ok(i) = index.parse::<u64>() {
            out.sample = format!("{task}/{split}/{i:06}");
        }
    }
    out
}

fn load_plan(a: &FactoryArgs) -> Result<GenerationPlan> {
    if let Some(p) = &a.plan {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        return toml::from_str(&text).with_context(|| format!("parsing {}", p.display()));
    }
    let (split, count) = (a.split.expect("clap requires split"), a.count.expect("clap requires count"));
    Ok(GenerationPlan { entries: task_list(&a.tasks)?.into_iter().map(|family| PlanEntry { family, split, start: 0, count }).collect() })
}

fn factory_cmd(mut a: FactoryArgs, codec: &CodecConfig) -> Result<ExitCode> {
    a.out = resolve(&a.out)?;
    a.plan = a.plan.as_deref().map(resolve).transpose()?;
    for (name, rate) in [("--fault-rate", a.fault_rate), ("--persistent-fault-rate", a.persistent_fault_rate)] {
        if !(0.0..=1.0).contains(&rate) {
            bail!("{name} must lie in [0, 1]");
        }
    }
    let plan = load_plan(&a)?;
    let format = match a.format {
        Format::Files => OutputFormat::Files,
        Format::Archive => OutputFormat::Archive,
    };
    let messages = enqueue_plan(&plan, a.batch, format)?;
    let queue = MemoryQueue::new(Duration::from_secs(a.visibility_secs));
    queue.enqueue_all(messages)?;
    let exec = GenerateExecutor { store: FsStore::new(&a.out, codec.clone()) };
    let faults = FaultPolicy { transient_rate: a.fault_rate, persistent_rate: a.persistent_fault_rate, seed: a.fault_seed };
    let cfg = WorkerConfig { workers: a.workers, job_budget: Duration::from_secs(a.visibility_secs), ..WorkerConfig::default() };
    let sink = EventSink::new(std::io::stdout());
    let summary = run_pool(&queue, &exec, &faults, &cfg, Some(&sink))?;
    RunConfig::new("factory", &a, codec).write(&a.out)?;
    let dead = summary.dead_lettered();
    if !dead.is_empty() {
        eprintln!("{} job(s) dead-lettered: {:?}", dead.len(), dead);
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}
