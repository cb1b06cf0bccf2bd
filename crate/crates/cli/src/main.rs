mod render;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{ensure, Context, Result};
use clap::{Args, Parser, Subcommand};
use ospa_pose::dataio::{
    compute_stats, convert_coco_scene, load_dataset, merge_views, save_annotations, DEFAULT_NMS_IOU,
};
use ospa_pose::oracle::{assignment_suite, ospa2_suite, ospa_suite};
use ospa_pose::{
    evaluate_pose, evaluate_track, synthetic, AnnotationKind, CameraLayout, EvalOptions,
    KeypointSchema, OksMode, SequenceSet, DEFAULT_OKS_THRESHOLD,
};

use render::Format;

/// Evaluation of multi-person pose estimation and tracking with OSPA-Pose,
/// OSPA²-Pose and OKS-matched AP, MOTA and IDF1.
#[derive(Debug, Parser)]
#[command(name = "ospa-pose", version)]
struct Cli {
    /// Worker threads for scene-level parallelism (default: available cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// OSPA-Pose with its visibility breakdown, AP and AR.
    EvalPose(EvalArgs),
    /// MOTA, IDF1, IDSW and OSPA²-Pose by visibility.
    EvalTrack(EvalArgs),
    /// Histograms and summary counts over ground-truth scenes.
    Stats(StatsArgs),
    /// Stitch per-camera annotations into panorama scenes.
    Merge(MergeArgs),
    /// Compare the fast solvers against exhaustive enumeration.
    OracleCheck(OracleArgs),
    /// Convert a COCO-style keypoint file into the annotation format.
    Convert(ConvertArgs),
    /// Write the synthetic fixture: `gt/` scenes and perfect `pred/` scenes.
    Fixture(FixtureArgs),
}

#[derive(Debug, Args)]
struct SchemaArgs {
    /// Keypoint schema file (joint names, sigmas, OKS mode).
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Overrides the schema's OKS mode: paper-mean or per-joint-average.
    #[arg(long)]
    oks_mode: Option<OksMode>,
}

impl SchemaArgs {
    fn load(&self) -> Result<KeypointSchema> {
        let schema = match &self.schema {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading schema {}", path.display()))?;
                KeypointSchema::parse(&text)
                    .with_context(|| format!("schema {}", path.display()))?
            }
            None => KeypointSchema::default(),
        };
        Ok(match self.oks_mode {
            Some(mode) => schema.with_mode(mode),
            None => schema,
        })
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "markdown")]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutputArgs {
    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => {
                fs::write(path, text).with_context(|| format!("writing {}", path.display()))
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                Ok(stdout.flush()?)
            }
        }
    }
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Ground-truth scene file or directory of scene files.
    #[arg(long)]
    gt: PathBuf,
    /// Prediction scene file or directory of scene files.
    #[arg(long)]
    pred: PathBuf,
    #[command(flatten)]
    schema: SchemaArgs,
    #[arg(long, default_value_t = DEFAULT_OKS_THRESHOLD)]
    oks_threshold: f64,
    /// Also report AP averaged over OKS thresholds 0.50 to 0.95.
    #[arg(long)]
    coco_map: bool,
    /// One row per scene instead of the dataset row.
    #[arg(long)]
    per_scene: bool,
    /// Label for the Method column.
    #[arg(long, default_value = "predictions")]
    method: String,
    /// Accepted for a uniform interface; evaluation itself is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// Stitched ground-truth scene file or directory.
    #[arg(long)]
    gt: PathBuf,
    #[command(flatten)]
    schema: SchemaArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct MergeArgs {
    /// Per-camera ground truth, one file or directory per camera.
    #[arg(long, conflicts_with = "pred", required_unless_present = "pred")]
    gt: Vec<PathBuf>,
    /// Per-camera predictions, one file or directory per camera.
    #[arg(long)]
    pred: Vec<PathBuf>,
    /// Camera layout file; the built-in five-camera layout when omitted.
    #[arg(long)]
    layout: Option<PathBuf>,
    /// Overlap above which a merged prediction is suppressed.
    #[arg(long, default_value_t = DEFAULT_NMS_IOU)]
    nms_iou: f64,
    #[command(flatten)]
    schema: SchemaArgs,
    /// Output file, or directory when the inputs are directories.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest side of the random assignment matrices.
    #[arg(long, default_value_t = 7)]
    max_dim: usize,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    #[command(flatten)]
    schema: SchemaArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ConvertArgs {
    /// COCO-style keypoint JSON for one scene.
    #[arg(long)]
    input: PathBuf,
    /// Scene name (default: the input file stem).
    #[arg(long)]
    scene: Option<String>,
    /// Write prediction records instead of ground truth.
    #[arg(long)]
    predictions: bool,
    #[command(flatten)]
    schema: SchemaArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct FixtureArgs {
    #[arg(long, default_value_t = 5)]
    scenes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory that receives `gt/` and `pred/`.
    #[arg(long)]
    out: PathBuf,
}

fn load(path: &Path, kind: AnnotationKind, schema: &KeypointSchema) -> Result<Vec<SequenceSet>> {
    ensure!(path.exists(), "{} does not exist", path.display());
    Ok(load_dataset(path, kind, schema)?)
}

fn eval_pose(args: &EvalArgs) -> Result<()> {
    let schema = args.schema.load()?;
    let options = EvalOptions {
        oks_threshold: args.oks_threshold,
        coco_map: args.coco_map,
    };
    options.validate()?;
    let gt = load(&args.gt, AnnotationKind::GroundTruth, &schema)?;
    let pred = load(&args.pred, AnnotationKind::Prediction, &schema)?;
    let report = evaluate_pose(&gt, &pred, &schema, &options)?;
    args.output.emit(&render::pose_report(
        &report,
        &args.method,
        args.output.format,
        args.per_scene,
    ))
}

fn eval_track(args: &EvalArgs) -> Result<()> {
    let schema = args.schema.load()?;
    let options = EvalOptions {
        oks_threshold: args.oks_threshold,
        coco_map: false,
    };
    options.validate()?;
    let gt = load(&args.gt, AnnotationKind::GroundTruth, &schema)?;
    let pred = load(&args.pred, AnnotationKind::Prediction, &schema)?;
    let report = evaluate_track(&gt, &pred, &schema, &options)?;
    args.output.emit(&render::track_report(
        &report,
        &args.method,
        args.output.format,
        args.per_scene,
    ))
}

fn stats(args: &StatsArgs) -> Result<()> {
    let schema = args.schema.load()?;
    let scenes = load(&args.gt, AnnotationKind::GroundTruth, &schema)?;
    let stats = compute_stats(&scenes)?;
    args.output
        .emit(&render::stats_report(&stats, args.output.format))
}

fn merge(args: &MergeArgs) -> Result<()> {
    let schema = args.schema.load()?;
    let (kind, inputs) = if args.gt.is_empty() {
        (AnnotationKind::Prediction, &args.pred)
    } else {
        (AnnotationKind::GroundTruth, &args.gt)
    };
    ensure!(
        (0.0..=1.0).contains(&args.nms_iou),
        "NMS IoU {} must lie in [0, 1]",
        args.nms_iou
    );
    let layout = match &args.layout {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading layout {}", path.display()))?;
            CameraLayout::parse(&text).with_context(|| format!("layout {}", path.display()))?
        }
        None => CameraLayout::default(),
    };
    let to_dir = inputs.iter().any(|p| p.is_dir());

    // Group the views of each scene, keeping camera order.
    let mut by_scene: BTreeMap<String, Vec<SequenceSet>> = BTreeMap::new();
    for path in inputs {
        for seq in load(path, kind, &schema)? {
            by_scene.entry(seq.scene.clone()).or_default().push(seq);
        }
    }
    if !to_dir {
        ensure!(
            by_scene.len() == 1,
            "per-camera files name {} different scenes; expected one",
            by_scene.len()
        );
    } else {
        fs::create_dir_all(&args.out)
            .with_context(|| format!("creating {}", args.out.display()))?;
    }
    for (scene, views) in &by_scene {
        let merged = merge_views(views, &layout, kind, args.nms_iou)
            .with_context(|| format!("scene `{scene}`"))?;
        let target = if to_dir {
            args.out.join(format!("{scene}.jsonl"))
        } else {
            args.out.clone()
        };
        save_annotations(&merged, kind, &schema, &target)?;
        log::info!("wrote {}", target.display());
    }
    Ok(())
}

fn oracle_check(args: &OracleArgs) -> Result<bool> {
    let schema = args.schema.load()?;
    ensure!(
        args.max_dim <= ospa_pose::assignment::BRUTE_FORCE_LIMIT,
        "--max-dim is limited to {}",
        ospa_pose::assignment::BRUTE_FORCE_LIMIT
    );
    let reports = [
        assignment_suite(args.trials, args.seed, args.max_dim)?,
        ospa_suite(args.trials, args.seed, &schema)?,
        ospa2_suite(args.trials, args.seed, &schema)?,
    ];
    args.output.emit(&render::oracle_report(
        &reports,
        args.tolerance,
        args.output.format,
    ))?;
    Ok(reports.iter().all(|r| r.passed(args.tolerance)))
}

fn convert(args: &ConvertArgs) -> Result<()> {
    let schema = args.schema.load()?;
    let file =
        fs::File::open(&args.input).with_context(|| format!("opening {}", args.input.display()))?;
    let scene = match &args.scene {
        Some(s) => s.clone(),
        None => args
            .input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "scene".into()),
    };
    let seq = convert_coco_scene(std::io::BufReader::new(file), &scene, &schema)
        .with_context(|| format!("converting {}", args.input.display()))?;
    let kind = if args.predictions {
        AnnotationKind::Prediction
    } else {
        AnnotationKind::GroundTruth
    };
    save_annotations(&seq, kind, &schema, &args.out)?;
    Ok(())
}

fn fixture(args: &FixtureArgs) -> Result<()> {
    let schema = KeypointSchema::default();
    let (gt_dir, pred_dir) = (args.out.join("gt"), args.out.join("pred"));
    for dir in [&gt_dir, &pred_dir] {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    for gt in synthetic::fixture(args.scenes, args.seed) {
        let name = format!("{}.jsonl", gt.scene);
        save_annotations(
            &gt,
            AnnotationKind::GroundTruth,
            &schema,
            &gt_dir.join(&name),
        )?;
        let pred = synthetic::perfect_predictions(&gt);
        save_annotations(
            &pred,
            AnnotationKind::Prediction,
            &schema,
            &pred_dir.join(&name),
        )?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match &cli.command {
        Command::EvalPose(a) => eval_pose(a)?,
        Command::EvalTrack(a) => eval_track(a)?,
        Command::Stats(a) => stats(a)?,
        Command::Merge(a) => merge(a)?,
        Command::OracleCheck(a) => return oracle_check(a),
        Command::Convert(a) => convert(a)?,
        Command::Fixture(a) => fixture(a)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let jobs = cli.jobs.unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::FAILURE;
        }
    };
    match pool.install(|| run(cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: oracle deviation above tolerance");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
