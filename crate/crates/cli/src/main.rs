//! Command-line interface: size-error sweeps, detection evaluation,
//! synthetic scene generation, dataset importers and box-plot rendering.
//!
//! Exit codes: 0 success, 1 validation/schema failure, 2 runtime
//! estimation failure affecting all fruits.

use clap::{Args, Parser, Subcommand};
use fruitsize::dataset::import::{import_amodal, import_openaccess, ImportIntrinsics, RipenessRule};
use fruitsize::dataset::{load_detections, load_manifest, Frame, Ripeness};
use fruitsize::estimators_2d::HoughConfig;
use fruitsize::estimators_3d::RansacConfig;
use fruitsize::eval::{
    detection_metrics, evaluation_frames, match_detections, render_boxplot_svg, run_size_sweep,
    size_errors_from_csv, size_errors_to_csv, summarize_records, Estimator, SceneSpec,
    SizeErrorRecord, SummaryDoc, SweepConfig,
};
use fruitsize::filtering::RetentionRange;
use fruitsize::AnnotatedFruit;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "fruitsize",
    version,
    about = "Fruit diameter estimation from RGB-D imagery and its evaluation harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the per-estimator size-error sweep over retention ranges.
    SizeSweep(SizeSweepArgs),
    /// Match detections to ground truth and compute detection metrics.
    DetectEval(DetectEvalArgs),
    /// Generate a synthetic RGB-D scene with exact ground truth.
    Synth(SynthArgs),
    /// Convert a planar-cordon orchard dataset layout (boxes only).
    ImportOpenaccess(ImportArgs),
    /// Convert a cropped-image dataset layout with modal masks.
    ImportAmodal(ImportArgs),
    /// Render a box-plot SVG from a size-error CSV.
    BoxplotSvg(BoxplotArgs),
}

#[derive(Args, Clone)]
struct SweepFlags {
    /// Comma-separated estimator list (default: all six).
    #[arg(long, value_delimiter = ',')]
    estimators: Vec<String>,
    /// Comma-separated retention ranges in percent, e.g. 10:90,20:80
    /// (default: the 0:100..40:60 grid in 5% steps).
    #[arg(long, value_delimiter = ',')]
    retention: Vec<String>,
    /// RANSAC inlier band half-width in mm.
    #[arg(long, default_value_t = 3.0)]
    ransac_delta: f64,
    #[arg(long, default_value_t = 500)]
    ransac_iters: usize,
    /// RANSAC early-exit inlier ratio, in (0, 1].
    #[arg(long, default_value_t = 0.9)]
    ransac_threshold: f64,
    /// Return the raw best circumsphere instead of refitting inliers.
    #[arg(long)]
    ransac_no_refit: bool,
    /// Hough radius search range as fractions of the mask extent, LO:HI.
    #[arg(long)]
    hough_radius_frac: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker thread count (default: all cores). Output is identical
    /// for any value.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct SizeSweepArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Also render OUT/boxplot.svg.
    #[arg(long)]
    svg: bool,
    #[command(flatten)]
    sweep: SweepFlags,
}

#[derive(Args)]
struct DetectEvalArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    detections: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// IoU threshold for detection-to-ground-truth matching.
    #[arg(long, default_value_t = 0.7)]
    iou_threshold: f64,
    /// Additionally run the size sweep on matched detections, reusing
    /// the matched fruit's mask and diameter with the detected box.
    #[arg(long)]
    with_size_sweep: bool,
    #[command(flatten)]
    sweep: SweepFlags,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 6)]
    n_fruits: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Image size as WxH.
    #[arg(long, default_value = "848x480")]
    image_size: String,
    #[arg(long, default_value_t = 610.0)]
    focal_length_px: f64,
    /// Millimetres per stored depth unit.
    #[arg(long, default_value_t = 0.1)]
    depth_scale: f64,
    /// Ground-truth diameter band in mm, LO:HI.
    #[arg(long, default_value = "40:95")]
    diameter_range: String,
    /// Sphere center depth band in mm, LO:HI.
    #[arg(long, default_value = "1200:2200")]
    depth_range: String,
    #[arg(long, default_value_t = 0.0)]
    noise_sigma: f64,
    /// Fraction of each sphere's surface removed by occlusion.
    #[arg(long, default_value_t = 0.0)]
    occlusion: f64,
    /// Fraction of in-mask depths replaced by uniform clutter.
    #[arg(long, default_value_t = 0.0)]
    outlier_fraction: f64,
    /// Depth of a flat background wall in mm (omit for invalid depth).
    #[arg(long)]
    background_depth: Option<f64>,
    /// Maximum radial view angle of fruit centers, as tan(angle).
    #[arg(long, default_value_t = 0.30)]
    max_eccentricity: f64,
    #[arg(long, default_value = "synth0000")]
    frame_id: String,
}

#[derive(Args)]
struct ImportArgs {
    #[arg(long)]
    src: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Focal length in pixels; intrinsics are never assumed.
    #[arg(long)]
    focal_length_px: f64,
    /// Principal point U:V (default: image center).
    #[arg(long)]
    principal_point: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    depth_scale: f64,
    /// Date-to-class rules, e.g. 2018-10-03=ripe,2020-07-16=unripe.
    #[arg(long, value_delimiter = ',')]
    date_ripeness: Vec<String>,
    /// Fallback class when no date rule matches.
    #[arg(long)]
    default_ripeness: Option<String>,
}

#[derive(Args)]
struct BoxplotArgs {
    #[arg(long)]
    csv: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

enum CliError {
    Validation(String),
    Runtime(String),
}

impl CliError {
    fn validation(e: impl std::fmt::Display) -> Self {
        CliError::Validation(e.to_string())
    }
}

type CliResult = Result<(), CliError>;

fn parse_pair(s: &str, what: &str) -> Result<(f64, f64), CliError> {
    let (a, b) = s
        .split_once([':', 'x'])
        .ok_or_else(|| CliError::Validation(format!("{what}: expected LO:HI, got '{s}'")))?;
    let lo: f64 = a
        .trim()
        .parse()
        .map_err(|_| CliError::Validation(format!("{what}: '{a}' is not a number")))?;
    let hi: f64 = b
        .trim()
        .parse()
        .map_err(|_| CliError::Validation(format!("{what}: '{b}' is not a number")))?;
    Ok((lo, hi))
}

fn build_sweep_config(flags: &SweepFlags) -> Result<SweepConfig, CliError> {
    let mut config = SweepConfig::new(flags.seed);
    if !flags.estimators.is_empty() {
        config.estimators = flags
            .estimators
            .iter()
            .map(|s| s.parse::<Estimator>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(CliError::Validation)?;
    }
    if !flags.retention.is_empty() {
        config.retention_grid = flags
            .retention
            .iter()
            .map(|s| s.parse::<RetentionRange>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(CliError::validation)?;
    }
    config.ransac = RansacConfig {
        delta: flags.ransac_delta,
        max_iterations: flags.ransac_iters,
        inlier_ratio_threshold: flags.ransac_threshold,
        seed: flags.seed,
        refit: !flags.ransac_no_refit,
    };
    config.ransac.validate().map_err(CliError::validation)?;
    if let Some(frac) = &flags.hough_radius_frac {
        let (lo, hi) = parse_pair(frac, "--hough-radius-frac")?;
        if !(lo > 0.0 && hi >= lo) {
            return Err(CliError::Validation(format!(
                "--hough-radius-frac: need 0 < LO <= HI, got {lo}:{hi}"
            )));
        }
        config.hough = HoughConfig {
            radius_frac: (lo, hi),
            ..HoughConfig::default()
        };
    }
    Ok(config)
}

fn write_out(path: &Path, contents: &str) -> CliResult {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

/// Writes CSV, summary JSON and optionally the SVG for sweep records.
fn write_sweep_outputs(
    out: &Path,
    prefix: &str,
    records: &[SizeErrorRecord],
    svg: bool,
) -> CliResult {
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", out.display())))?;
    write_out(
        &out.join(format!("{prefix}size_errors.csv")),
        &size_errors_to_csv(records),
    )?;
    let entries = summarize_records(records);
    let doc = SummaryDoc::from_entries(&entries);
    write_out(
        &out.join(format!("{prefix}quartile_summary.json")),
        &doc.to_json().map_err(|e| CliError::Runtime(e.to_string()))?,
    )?;
    if svg {
        write_out(
            &out.join(format!("{prefix}boxplot.svg")),
            &render_boxplot_svg(&entries),
        )?;
    }
    Ok(())
}

fn require_estimates(records: &[SizeErrorRecord]) -> CliResult {
    if !records.is_empty() && records.iter().all(|r| r.error_mm().is_none()) {
        return Err(CliError::Runtime(
            "estimation failed for every fruit; see skip_reason column".into(),
        ));
    }
    Ok(())
}

fn run_size_sweep_cmd(args: &SizeSweepArgs) -> CliResult {
    let frames = load_manifest(&args.manifest).map_err(CliError::validation)?;
    let config = build_sweep_config(&args.sweep)?;
    let records = run_size_sweep(&frames, &config, args.sweep.jobs);
    write_sweep_outputs(&args.out, "", &records, args.svg)?;
    require_estimates(&records)?;
    let estimated = records.iter().filter(|r| r.error_mm().is_some()).count();
    println!(
        "size-sweep: {} records ({} estimated, {} skipped) -> {}",
        records.len(),
        estimated,
        records.len() - estimated,
        args.out.display()
    );
    Ok(())
}

#[derive(serde::Serialize)]
struct DetectEvalReport {
    schema_version: u32,
    map50: f64,
    map75: f64,
    map50_95: f64,
    mar: f64,
    n_frames: usize,
    n_ground_truths: usize,
    n_detections: usize,
    iou_threshold: f64,
    n_matched: usize,
    n_unmatched_detections: usize,
    n_unmatched_ground_truths: usize,
}

fn run_detect_eval(args: &DetectEvalArgs) -> CliResult {
    let frames = load_manifest(&args.manifest).map_err(CliError::validation)?;
    let detections = load_detections(&args.detections, &frames).map_err(CliError::validation)?;
    let n_ground_truths: usize = frames.iter().map(|f| f.fruits.len()).sum();
    if n_ground_truths == 0 {
        return Err(CliError::Validation(
            "manifest carries no annotated fruits to evaluate against".into(),
        ));
    }
    if !(args.iou_threshold > 0.0 && args.iou_threshold < 1.0) {
        return Err(CliError::Validation(format!(
            "--iou-threshold must be in (0, 1), got {}",
            args.iou_threshold
        )));
    }

    let metrics = detection_metrics(&evaluation_frames(&frames, &detections));

    // Per-frame greedy matching at the requested threshold; matched
    // pairs feed the optional detected-box size sweep.
    let mut n_matched = 0;
    let mut n_unmatched_detections = 0;
    let mut n_unmatched_ground_truths = 0;
    let mut matched_frames: Vec<Frame> = Vec::new();
    for frame in &frames {
        let frame_dets: Vec<_> = detections
            .iter()
            .filter(|d| d.frame_id == frame.frame_id)
            .cloned()
            .collect();
        let result = match_detections(&frame_dets, &frame.fruits, args.iou_threshold);
        n_matched += result.pairs.len();
        n_unmatched_detections += result.unmatched_detections.len();
        n_unmatched_ground_truths += result.unmatched_ground_truths.len();
        if args.with_size_sweep {
            let fruits: Vec<AnnotatedFruit> = result
                .pairs
                .iter()
                .map(|pair| {
                    let gt = &frame.fruits[pair.ground_truth];
                    AnnotatedFruit {
                        fruit_id: gt.fruit_id.clone(),
                        bbox: frame_dets[pair.detection].bbox,
                        mask: gt.mask.clone(),
                        ripeness: frame_dets[pair.detection].class,
                        gt_diameter_mm: gt.gt_diameter_mm,
                    }
                })
                .collect();
            let mut synthetic = frame.clone();
            synthetic.fruits = fruits;
            matched_frames.push(synthetic);
        }
    }

    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", args.out.display())))?;
    let report = DetectEvalReport {
        schema_version: 1,
        map50: metrics.map50,
        map75: metrics.map75,
        map50_95: metrics.map50_95,
        mar: metrics.mar,
        n_frames: frames.len(),
        n_ground_truths,
        n_detections: detections.len(),
        iou_threshold: args.iou_threshold,
        n_matched,
        n_unmatched_detections,
        n_unmatched_ground_truths,
    };
    let mut json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    json.push('\n');
    write_out(&args.out.join("detection_metrics.json"), &json)?;
    println!(
        "detect-eval: mAP50 {:.1}, mAP75 {:.1}, mAP50:95 {:.1}, mAR {:.1}; {} matched at IoU>{}",
        report.map50, report.map75, report.map50_95, report.mar, n_matched, args.iou_threshold
    );

    if args.with_size_sweep {
        let config = build_sweep_config(&args.sweep)?;
        let records = run_size_sweep(&matched_frames, &config, args.sweep.jobs);
        write_sweep_outputs(&args.out, "detected_", &records, false)?;
        require_estimates(&records)?;
        println!(
            "detect-eval: detected-box sweep wrote {} records",
            records.len()
        );
    }
    Ok(())
}

fn run_synth(args: &SynthArgs) -> CliResult {
    let (w, h) = parse_pair(&args.image_size, "--image-size")?;
    let spec = SceneSpec {
        n_fruits: args.n_fruits,
        diameter_range_mm: parse_pair(&args.diameter_range, "--diameter-range")?,
        depth_range_mm: parse_pair(&args.depth_range, "--depth-range")?,
        noise_sigma_mm: args.noise_sigma,
        occlusion_fraction: args.occlusion,
        outlier_fraction: args.outlier_fraction,
        seed: args.seed,
        image_size: (w as u32, h as u32),
        focal_length_px: args.focal_length_px,
        depth_scale: args.depth_scale,
        background_depth_mm: args.background_depth,
        max_eccentricity: args.max_eccentricity,
        frame_id: args.frame_id.clone(),
    };
    let scene = fruitsize::eval::generate_synthetic_scene(&spec).map_err(CliError::validation)?;
    let manifest = scene
        .write(&args.out)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    println!(
        "synth: {} fruits -> {}",
        scene.frame.fruits.len(),
        manifest.display()
    );
    Ok(())
}

fn parse_ripeness_rule(args: &ImportArgs) -> Result<RipenessRule, CliError> {
    let mut by_date = BTreeMap::new();
    for rule in &args.date_ripeness {
        let (date, class) = rule.split_once('=').ok_or_else(|| {
            CliError::Validation(format!("--date-ripeness: expected DATE=CLASS, got '{rule}'"))
        })?;
        by_date.insert(
            date.trim().to_string(),
            class.trim().parse::<Ripeness>().map_err(CliError::Validation)?,
        );
    }
    let default = args
        .default_ripeness
        .as_deref()
        .map(|s| s.parse::<Ripeness>().map_err(CliError::Validation))
        .transpose()?;
    Ok(RipenessRule { by_date, default })
}

fn run_import(args: &ImportArgs, amodal: bool) -> CliResult {
    let principal_point = args
        .principal_point
        .as_deref()
        .map(|s| parse_pair(s, "--principal-point"))
        .transpose()?;
    let intrinsics = ImportIntrinsics {
        focal_length_px: args.focal_length_px,
        principal_point,
        depth_scale: args.depth_scale,
    };
    let rule = parse_ripeness_rule(args)?;
    let manifest = if amodal {
        import_amodal(&args.src, &args.out, intrinsics, &rule)
    } else {
        import_openaccess(&args.src, &args.out, intrinsics, &rule)
    }
    .map_err(CliError::validation)?;
    println!("import: wrote {}", manifest.display());
    Ok(())
}

fn run_boxplot(args: &BoxplotArgs) -> CliResult {
    let text = std::fs::read_to_string(&args.csv)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", args.csv.display())))?;
    let records = size_errors_from_csv(&text).map_err(CliError::Validation)?;
    let entries = summarize_records(&records);
    write_out(&args.out, &render_boxplot_svg(&entries))?;
    println!("boxplot-svg: wrote {}", args.out.display());
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    match &cli.command {
        Command::SizeSweep(args) => run_size_sweep_cmd(args),
        Command::DetectEval(args) => run_detect_eval(args),
        Command::Synth(args) => run_synth(args),
        Command::ImportOpenaccess(args) => run_import(args, false),
        Command::ImportAmodal(args) => run_import(args, true),
        Command::BoxplotSvg(args) => run_boxplot(args),
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprint!("{e}");
            std::process::exit(1);
        }
        Err(e) => {
            // --help / --version
            print!("{e}");
            std::process::exit(0);
        }
    };
    match run(cli) {
        Ok(()) => {}
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
    }
}
