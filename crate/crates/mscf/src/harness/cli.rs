//! Command-line interface: `track`, `eval`, `bench`, and `synth`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::config::MscfConfig;
use crate::error::{MscfError, Result};
use crate::eval::{self, SequenceResult};
use crate::features::CnTable;
use crate::geometry::BoundingBox;
use crate::harness::io::{save_curve_csv, save_png, Summary, TrackTrace};
use crate::harness::{self, SequenceSpec, SynthSpec};
use crate::tracker::{self, FrameReport};

#[derive(Parser)]
#[command(
    name = "mscf",
    version,
    about = "Mutation-sensitive correlation filter tracker"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the tracker over a frame directory and write a per-frame trace.
    Track(TrackArgs),
    /// Score a trace against ground truth; write curves and a summary.
    Eval(EvalArgs),
    /// Run every sequence under a dataset root and aggregate the metrics.
    Bench(BenchArgs),
    /// Materialize a synthetic sequence on disk.
    Synth(SynthArgs),
}

#[derive(Args)]
struct TrackArgs {
    /// Sequence directory (frames directly or under img/)
    #[arg(long)]
    seq: PathBuf,
    /// Ground-truth file; the first annotated box initializes the tracker
    #[arg(long)]
    gt: PathBuf,
    /// Config file (defaults when omitted); MSCF_* env vars override
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output trace JSON path
    #[arg(long)]
    out: PathBuf,
    /// Color-names table (little-endian f32, 32768x10)
    #[arg(long)]
    cn: Option<PathBuf>,
    /// Zero the elapsed fields for byte-reproducible output
    #[arg(long, default_value_t = false)]
    no_timing: bool,
}

#[derive(Args)]
struct EvalArgs {
    /// Trace JSON produced by `track`
    #[arg(long)]
    pred: PathBuf,
    /// Ground-truth file
    #[arg(long)]
    gt: PathBuf,
    /// Prefix for <prefix>_precision.csv, <prefix>_success.csv,
    /// <prefix>_summary.json
    #[arg(long = "out-csv")]
    out_csv: String,
}

#[derive(Args)]
struct BenchArgs {
    /// Dataset root: one directory per sequence with img/ and a
    /// groundtruth .txt file
    #[arg(long)]
    root: PathBuf,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    cn: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Synthetic spec file (built-in constant-velocity spec when omitted)
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Output directory (frames under img/, plus groundtruth.txt)
    #[arg(long)]
    out: PathBuf,
}

/// Parses and dispatches. Returns the process exit code; errors are printed
/// as a single machine-parsable line on stderr.
pub fn cli_run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own message (also covers --help/--version)
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.cmd {
        Cmd::Track(a) => cmd_track(&a),
        Cmd::Eval(a) => cmd_eval(&a),
        Cmd::Bench(a) => cmd_bench(&a),
        Cmd::Synth(a) => cmd_synth(&a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                MscfError::Io { .. } => 2,
                _ => 1,
            }
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<MscfConfig> {
    let mut cfg = match path {
        Some(p) => MscfConfig::load(p)?,
        None => MscfConfig::default(),
    };
    cfg.apply_env_overrides(std::env::vars())?;
    Ok(cfg)
}

fn load_cn(path: Option<&Path>) -> Result<Option<Arc<CnTable>>> {
    match path {
        Some(p) => Ok(Some(Arc::new(CnTable::load(p)?))),
        None => Ok(None),
    }
}

/// Runs OPE over one sequence: initialize from the first annotated box,
/// then track every following frame.
fn run_sequence(
    name: &str,
    frame_paths: &[PathBuf],
    truth: &[Option<BoundingBox>],
    cfg: &MscfConfig,
    cn: Option<Arc<CnTable>>,
    no_timing: bool,
) -> Result<TrackTrace> {
    let n = frame_paths.len().min(truth.len());
    let first = truth[..n]
        .iter()
        .position(|t| t.is_some())
        .ok_or_else(|| MscfError::invalid("ground truth has no annotated frames"))?;
    if first > 0 {
        log::warn!("{name}: first {first} frames lack annotations; starting after them");
    }
    let init_box = truth[first].expect("position of Some");

    let start = std::time::Instant::now();
    let frame0 = harness::load_image(&frame_paths[first])?;
    let mut state = tracker::init(&frame0, init_box, cfg.clone(), cn)?;
    let init_elapsed = start.elapsed().as_secs_f64();

    let mut frames = Vec::with_capacity(n - first);
    frames.push(FrameReport {
        bbox: init_box,
        response_max: 0.0,
        mtf: 0.0,
        trained: true,
        elapsed: if no_timing { 0.0 } else { init_elapsed },
    });
    for path in &frame_paths[first + 1..n] {
        let frame = harness::load_image(path)?;
        let mut report = tracker::track(&mut state, &frame)?;
        if no_timing {
            report.elapsed = 0.0;
        }
        frames.push(report);
    }
    Ok(TrackTrace::new(name, frames))
}

fn cmd_track(args: &TrackArgs) -> Result<()> {
    let cfg = load_config(args.config.as_deref())?;
    let cn = load_cn(args.cn.as_deref())?;
    let name = args
        .seq
        .file_name()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "sequence".to_string());
    let spec = SequenceSpec {
        frames_dir: args.seq.clone(),
        groundtruth: args.gt.clone(),
        name: name.clone(),
        attributes: Vec::new(),
    };
    let (stream, truth) = harness::load_sequence(&spec)?;
    let trace = run_sequence(&name, stream.paths(), &truth, &cfg, cn, args.no_timing)?;
    trace.save(&args.out)
}

fn finite_or_zero(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

fn evaluate_trace(trace: &TrackTrace, truth: &[Option<BoundingBox>]) -> Result<(SequenceResult, Summary)> {
    let n = trace.frames.len().min(truth.len());
    if n == 0 {
        return Err(MscfError::invalid("empty prediction/ground-truth overlap"));
    }
    if trace.frames.len() != truth.len() {
        log::warn!(
            "prediction count {} differs from ground-truth count {}; truncating to {n}",
            trace.frames.len(),
            truth.len()
        );
    }
    let predicted: Vec<BoundingBox> = trace.frames[..n].iter().map(|f| f.bbox).collect();
    let elapsed: Vec<f64> = trace.frames[..n].iter().map(|f| f.elapsed).collect();
    let res = SequenceResult::new(predicted, truth[..n].to_vec(), elapsed)?;
    let precision = eval::precision_curve(&res)?;
    let (_, auc) = eval::success_auc(&res)?;
    let summary = Summary {
        precision20: eval::precision_at_20(&precision),
        auc,
        fps: finite_or_zero(eval::fps(&res)),
    };
    Ok((res, summary))
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let trace = TrackTrace::load(&args.pred)?;
    let truth = harness::load_groundtruth(&args.gt)?;
    let (res, summary) = evaluate_trace(&trace, &truth)?;
    let precision = eval::precision_curve(&res)?;
    let (success, _) = eval::success_auc(&res)?;

    save_curve_csv(&precision, Path::new(&format!("{}_precision.csv", args.out_csv)))?;
    save_curve_csv(&success, Path::new(&format!("{}_success.csv", args.out_csv)))?;
    summary.save(Path::new(&format!("{}_summary.json", args.out_csv)))?;
    println!(
        "precision20 {:.4}  auc {:.4}  fps {:.1}  (excluded {} unannotated frames)",
        summary.precision20,
        summary.auc,
        summary.fps,
        res.excluded_frames()
    );
    Ok(())
}

/// Finds the ground-truth file of a sequence directory: a .txt whose name
/// contains "groundtruth", else a lone .txt file.
fn find_groundtruth(dir: &Path) -> Result<PathBuf> {
    let entries = std::fs::read_dir(dir).map_err(|e| MscfError::io(dir, e))?;
    let mut txt = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| MscfError::io(dir, e))?.path();
        if path.extension().is_some_and(|e| e == "txt") {
            txt.push(path);
        }
    }
    txt.sort();
    if let Some(named) = txt.iter().find(|p| {
        p.file_name()
            .map(|n| n.to_string_lossy().contains("groundtruth"))
            .unwrap_or(false)
    }) {
        return Ok(named.clone());
    }
    match txt.len() {
        1 => Ok(txt.pop().expect("one element")),
        0 => Err(MscfError::invalid(format!(
            "no ground-truth .txt found in {}",
            dir.display()
        ))),
        _ => Err(MscfError::invalid(format!(
            "ambiguous ground-truth files in {}",
            dir.display()
        ))),
    }
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let cfg = load_config(args.config.as_deref())?;
    let cn = load_cn(args.cn.as_deref())?;
    std::fs::create_dir_all(&args.out).map_err(|e| MscfError::io(&args.out, e))?;

    let mut seq_dirs: Vec<PathBuf> = std::fs::read_dir(&args.root)
        .map_err(|e| MscfError::io(&args.root, e))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_dir())
        .collect();
    seq_dirs.sort();
    if seq_dirs.is_empty() {
        return Err(MscfError::invalid(format!(
            "no sequence directories under {}",
            args.root.display()
        )));
    }

    let mut summaries: Vec<(String, Summary)> = Vec::new();
    for dir in &seq_dirs {
        let name = dir
            .file_name()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| "sequence".to_string());
        let gt_path = find_groundtruth(dir)?;
        let spec = SequenceSpec {
            frames_dir: dir.clone(),
            groundtruth: gt_path,
            name: name.clone(),
            attributes: harness::load_attributes(dir),
        };
        let (stream, truth) = harness::load_sequence(&spec)?;
        let trace = run_sequence(&name, stream.paths(), &truth, &cfg, cn.clone(), false)?;
        trace.save(&args.out.join(format!("{name}_trace.json")))?;

        let (res, summary) = evaluate_trace(&trace, &truth)?;
        let precision = eval::precision_curve(&res)?;
        let (success, _) = eval::success_auc(&res)?;
        save_curve_csv(&precision, &args.out.join(format!("{name}_precision.csv")))?;
        save_curve_csv(&success, &args.out.join(format!("{name}_success.csv")))?;
        summary.save(&args.out.join(format!("{name}_summary.json")))?;
        let tags = if spec.attributes.is_empty() {
            String::new()
        } else {
            format!("  [{}]", spec.attributes.join(","))
        };
        println!(
            "{name}: precision20 {:.4}  auc {:.4}  fps {:.1}{tags}",
            summary.precision20, summary.auc, summary.fps
        );
        summaries.push((name, summary));
    }

    // aggregate is the arithmetic mean over sequences
    let n = summaries.len() as f64;
    let aggregate = Summary {
        precision20: summaries.iter().map(|(_, s)| s.precision20).sum::<f64>() / n,
        auc: summaries.iter().map(|(_, s)| s.auc).sum::<f64>() / n,
        fps: summaries.iter().map(|(_, s)| s.fps).sum::<f64>() / n,
    };
    aggregate.save(&args.out.join("summary.json"))?;
    println!(
        "aggregate over {} sequences: precision20 {:.4}  auc {:.4}  fps {:.1}",
        summaries.len(),
        aggregate.precision20,
        aggregate.auc,
        aggregate.fps
    );
    Ok(())
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let spec = match &args.spec {
        Some(p) => SynthSpec::load(p)?,
        None => SynthSpec::default(),
    };
    let (frames, truth) = harness::generate_synthetic(&spec)?;
    let img_dir = args.out.join("img");
    std::fs::create_dir_all(&img_dir).map_err(|e| MscfError::io(&img_dir, e))?;
    for (i, frame) in frames.iter().enumerate() {
        save_png(frame, &img_dir.join(format!("{:04}.png", i + 1)))?;
    }
    let mut gt = String::new();
    for b in &truth {
        // stored 1-based, matching the loader's origin convention
        gt.push_str(&format!("{},{},{},{}\n", b.x + 1.0, b.y + 1.0, b.w, b.h));
    }
    let gt_path = args.out.join("groundtruth.txt");
    std::fs::write(&gt_path, gt).map_err(|e| MscfError::io(&gt_path, e))?;
    println!(
        "wrote {} frames and ground truth under {}",
        frames.len(),
        args.out.display()
    );
    Ok(())
}
