//! The `lfsr` command line: scene generation, degradation, solving,
//! benchmarking, metric evaluation and weight-map dumps.
//!
//! Config precedence is CLI flag over `--config` file key over built-in
//! default. Every run writes a `run.json` provenance record (resolved
//! config, seed, tool version) sufficient to reproduce the outputs
//! byte for byte.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::color::{ColorImage, ColorSpace};
use crate::degrade::{degrade_lightfield, luma_of, DegradedStack, NoiseParams};
use crate::error::{Error, Result};
use crate::grid::ImageGrid;
use crate::io::{
    load_stack, read_pfm, read_pnm_auto, save_stack, write_pfm, write_pgm, write_ppm, PnmImage,
    StackDir,
};
use crate::lightfield::{DisparityMap, LightFieldStack, ViewPattern};
use crate::metrics;
use crate::operators::{
    apply_a, apply_a_adjoint, AdjointMode, BlurKernel, ModelOperator, OffsetSet,
};
use crate::resample::bicubic_resample;
use crate::scene::{gen_scene, SceneKind};
use crate::solver::{admm_solve, bicubic_init, gd_solve, ConvergenceTrace, SolverConfig};
use crate::weights::{assemble_weights, WeightParams};

#[derive(Parser, Debug)]
#[command(
    name = "lfsr",
    version,
    about = "Light-field / multi-frame super-resolution under mixed Gaussian-impulse noise",
    after_help = "Config precedence: CLI flags override --config file keys, which override built-in defaults."
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic HR ground-truth scene plus disparity map.
    GenScene(GenSceneArgs),
    /// Synthesize a degraded LR stack from an HR image and disparity map.
    Degrade(DegradeArgs),
    /// Super-resolve a stack (ADMM or gradient-descent baselines).
    Sr(SrArgs),
    /// PSNR/SSIM between two images (luma channel).
    Eval(EvalArgs),
    /// Run gd, gd-ls, admm-5 and admm-10 on one stack under a shared CU budget.
    Bench(BenchArgs),
    /// Dump the per-offset regularization weight maps.
    Weights(WeightsArgs),
}

#[derive(Args, Debug)]
struct GenSceneArgs {
    /// Square scene size in pixels.
    #[arg(long, default_value_t = 64)]
    size: usize,
    /// checker|ramps|disks|glyphs|mixed
    #[arg(long, default_value = "mixed")]
    kind: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory (gt.ppm, gt.pfm).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DegradeArgs {
    /// HR ground-truth image (.ppm or .pgm).
    #[arg(long)]
    input: PathBuf,
    /// HR ground-truth disparity (.pfm).
    #[arg(long)]
    disparity: PathBuf,
    /// Angular grid, e.g. 3x3 or 5x5.
    #[arg(long, default_value = "3x3")]
    grid: String,
    /// full|star|cross
    #[arg(long, default_value = "star")]
    pattern: String,
    /// Arm length of star/cross patterns; defaults to the grid radius.
    #[arg(long)]
    arm: Option<usize>,
    /// Integer downsampling factor.
    #[arg(long, default_value_t = 2)]
    scale: usize,
    /// Gaussian noise std on the 0-255 scale.
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    /// Impulse (salt & pepper) percentage.
    #[arg(long, default_value_t = 0.0)]
    nu: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Optional blur kernel file (first token: radius, then (2r+1)^2 taps);
    /// defaults to the Gaussian PSF for the scale.
    #[arg(long)]
    kernel: Option<PathBuf>,
    /// Output stack directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Clone)]
struct SolverFlags {
    /// admm|gd|gd-ls
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    iterations: Option<usize>,
    /// Max CG steps per ADMM x-step.
    #[arg(long)]
    cg_steps: Option<usize>,
    /// Absolute CG stop threshold on <r,r>; defaults to 1e-8 * HR pixels.
    #[arg(long)]
    cg_tol: Option<f64>,
    #[arg(long)]
    lambda1: Option<f64>,
    #[arg(long)]
    lambda2: Option<f64>,
    /// ADMM penalty.
    #[arg(long)]
    penalty: Option<f64>,
    /// Nonlocal window radius (2 = 5x5 window).
    #[arg(long)]
    window: Option<u32>,
    #[arg(long)]
    sigma_s: Option<f64>,
    #[arg(long)]
    sigma_e: Option<f64>,
    #[arg(long)]
    sigma_o1: Option<f64>,
    #[arg(long)]
    sigma_o2: Option<f64>,
    /// exact|paper warp adjoint.
    #[arg(long)]
    adjoint: Option<String>,
    /// Gradient-descent step size; defaults to a power-iteration 1/L estimate.
    #[arg(long)]
    step: Option<f64>,
    /// Assemble regularization weights once from x0 instead of per iteration.
    #[arg(long, default_value_t = false)]
    freeze_weights: bool,
    /// Flat key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SrArgs {
    /// Stack directory (see `degrade`).
    #[arg(long)]
    stack: PathBuf,
    /// Output image (.ppm for color, .pgm for luma only).
    #[arg(long)]
    out: PathBuf,
    /// Convergence trace CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Ground truth for PSNR reporting; defaults to the stack's gt when present.
    #[arg(long)]
    gt: Option<PathBuf>,
    /// Border crop for reported PSNR.
    #[arg(long, default_value_t = metrics::DEFAULT_CROP)]
    crop: usize,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long, default_value_t = metrics::DEFAULT_CROP)]
    crop: usize,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long)]
    stack: PathBuf,
    /// Output directory for the per-solver traces and convergence.csv.
    #[arg(long)]
    out: PathBuf,
    /// Shared computation-unit budget per solver.
    #[arg(long, default_value_t = 300)]
    cu_budget: u64,
    #[arg(long)]
    gt: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args, Debug)]
struct WeightsArgs {
    #[arg(long)]
    stack: PathBuf,
    /// HR estimate to compute weights from; defaults to the bicubic init.
    #[arg(long)]
    image: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    solver: SolverFlags,
}

/// Resolved solver configuration as recorded in run.json.
#[derive(Debug, Clone, Serialize)]
struct ResolvedSolver {
    solver: String,
    iterations: usize,
    cg_steps: usize,
    cg_tol: f64,
    lambda1: f64,
    lambda2: f64,
    penalty: f64,
    window: u32,
    sigma_s: f64,
    sigma_e: f64,
    sigma_o1: f64,
    sigma_o2: f64,
    adjoint: String,
    step: Option<f64>,
    freeze_weights: bool,
    scale: usize,
}

#[derive(Debug, Serialize)]
struct Provenance<'a, T: Serialize> {
    tool: &'a str,
    version: &'a str,
    command: &'a str,
    config: T,
}

fn write_run_json<T: Serialize>(path: &Path, command: &str, config: T) -> Result<()> {
    let record = Provenance {
        tool: "lfsr",
        version: env!("CARGO_PKG_VERSION"),
        command,
        config,
    };
    let text = serde_json::to_string_pretty(&record)
        .map_err(|e| Error::format("run.json", e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// Exit code for an error: 2 validation, 3 IO/format, 4 divergence.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Dimension(_) | Error::InvalidParam(_) => 2,
        Error::Io { .. } | Error::Format { .. } => 3,
        Error::Diverged { .. } => 4,
    }
}

/// Parse argv, run, and map errors to exit codes (clap usage errors exit 2
/// on their own).
pub fn run_main() -> i32 {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenScene(args) => cmd_gen_scene(args),
        Command::Degrade(args) => cmd_degrade(args),
        Command::Sr(args) => cmd_sr(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Weights(args) => cmd_weights(args),
    }
}

// ---------------------------------------------------------------------------
// config-file handling

#[derive(Default, Debug, Clone)]
struct FileOverrides {
    solver: Option<String>,
    iterations: Option<usize>,
    cg_steps: Option<usize>,
    cg_tol: Option<f64>,
    lambda1: Option<f64>,
    lambda2: Option<f64>,
    penalty: Option<f64>,
    window: Option<u32>,
    sigma_s: Option<f64>,
    sigma_e: Option<f64>,
    sigma_o1: Option<f64>,
    sigma_o2: Option<f64>,
    adjoint: Option<String>,
    step: Option<f64>,
    freeze_weights: Option<bool>,
}

fn parse_config_file(path: &Path) -> Result<FileOverrides> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = FileOverrides::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::invalid(format!("{}:{}: expected key = value", path.display(), lineno + 1))
        })?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |what: &str| {
            Error::invalid(format!(
                "{}:{}: bad {what} value `{value}`",
                path.display(),
                lineno + 1
            ))
        };
        match key {
            "solver" => out.solver = Some(value.to_string()),
            "iterations" => out.iterations = Some(value.parse().map_err(|_| bad("iterations"))?),
            "cg_steps" => out.cg_steps = Some(value.parse().map_err(|_| bad("cg_steps"))?),
            "cg_tol" => out.cg_tol = Some(value.parse().map_err(|_| bad("cg_tol"))?),
            "lambda1" => out.lambda1 = Some(value.parse().map_err(|_| bad("lambda1"))?),
            "lambda2" => out.lambda2 = Some(value.parse().map_err(|_| bad("lambda2"))?),
            "penalty" => out.penalty = Some(value.parse().map_err(|_| bad("penalty"))?),
            "window" => out.window = Some(value.parse().map_err(|_| bad("window"))?),
            "sigma_s" => out.sigma_s = Some(value.parse().map_err(|_| bad("sigma_s"))?),
            "sigma_e" => out.sigma_e = Some(value.parse().map_err(|_| bad("sigma_e"))?),
            "sigma_o1" => out.sigma_o1 = Some(value.parse().map_err(|_| bad("sigma_o1"))?),
            "sigma_o2" => out.sigma_o2 = Some(value.parse().map_err(|_| bad("sigma_o2"))?),
            "adjoint" => out.adjoint = Some(value.to_string()),
            "step" => out.step = Some(value.parse().map_err(|_| bad("step"))?),
            "freeze_weights" => {
                out.freeze_weights = Some(value.parse().map_err(|_| bad("freeze_weights"))?)
            }
            other => {
                return Err(Error::invalid(format!(
                    "{}:{}: unknown config key `{other}`",
                    path.display(),
                    lineno + 1
                )));
            }
        }
    }
    Ok(out)
}

struct ResolvedRun {
    cfg: SolverConfig,
    solver: String,
    step: Option<f64>,
}

/// CLI flag > config-file key > default.
fn resolve_solver(flags: &SolverFlags, scale: usize, p: usize) -> Result<ResolvedRun> {
    let file = match &flags.config {
        Some(path) => parse_config_file(path)?,
        None => FileOverrides::default(),
    };
    let defaults = SolverConfig::for_problem(scale, p);

    let solver = flags
        .solver
        .clone()
        .or(file.solver)
        .unwrap_or_else(|| "admm".to_string());
    if !["admm", "gd", "gd-ls"].contains(&solver.as_str()) {
        return Err(Error::invalid(format!("unknown solver `{solver}` (admm|gd|gd-ls)")));
    }
    let adjoint: AdjointMode = flags
        .adjoint
        .clone()
        .or(file.adjoint)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(AdjointMode::Exact);

    let cfg = SolverConfig {
        lambda1: flags.lambda1.or(file.lambda1).unwrap_or(defaults.lambda1),
        lambda2: flags.lambda2.or(file.lambda2).unwrap_or(defaults.lambda2),
        penalty: flags.penalty.or(file.penalty).unwrap_or(defaults.penalty),
        iterations: flags.iterations.or(file.iterations).unwrap_or(defaults.iterations),
        cg_steps: flags.cg_steps.or(file.cg_steps).unwrap_or(defaults.cg_steps),
        cg_tol: flags.cg_tol.or(file.cg_tol).unwrap_or(defaults.cg_tol),
        scale,
        adjoint_mode: adjoint,
        weight_params: WeightParams {
            sigma_s: flags.sigma_s.or(file.sigma_s).unwrap_or(defaults.weight_params.sigma_s),
            sigma_e: flags.sigma_e.or(file.sigma_e).unwrap_or(defaults.weight_params.sigma_e),
            sigma_o1: flags
                .sigma_o1
                .or(file.sigma_o1)
                .unwrap_or(defaults.weight_params.sigma_o1),
            sigma_o2: flags
                .sigma_o2
                .or(file.sigma_o2)
                .unwrap_or(defaults.weight_params.sigma_o2),
        },
        window_radius: flags.window.or(file.window).unwrap_or(defaults.window_radius),
        reweight: !(flags.freeze_weights || file.freeze_weights.unwrap_or(false)),
        cu_budget: None,
    };
    cfg.validate()?;
    Ok(ResolvedRun { cfg, solver, step: flags.step.or(file.step) })
}

fn resolved_record(run: &ResolvedRun) -> ResolvedSolver {
    ResolvedSolver {
        solver: run.solver.clone(),
        iterations: run.cfg.iterations,
        cg_steps: run.cfg.cg_steps,
        cg_tol: run.cfg.cg_tol,
        lambda1: run.cfg.lambda1,
        lambda2: run.cfg.lambda2,
        penalty: run.cfg.penalty,
        window: run.cfg.window_radius,
        sigma_s: run.cfg.weight_params.sigma_s,
        sigma_e: run.cfg.weight_params.sigma_e,
        sigma_o1: run.cfg.weight_params.sigma_o1,
        sigma_o2: run.cfg.weight_params.sigma_o2,
        adjoint: match run.cfg.adjoint_mode {
            AdjointMode::Exact => "exact".into(),
            AdjointMode::Paper => "paper".into(),
        },
        step: run.step,
        freeze_weights: !run.cfg.reweight,
        scale: run.cfg.scale,
    }
}

// ---------------------------------------------------------------------------
// subcommands

fn cmd_gen_scene(args: GenSceneArgs) -> Result<()> {
    let kind: SceneKind = args.kind.parse()?;
    let scene = gen_scene(args.size, args.size, kind, args.seed)?;
    std::fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let img = ColorImage::new(
        ColorSpace::Rgb,
        scene.channels[0].clone(),
        scene.channels[1].clone(),
        scene.channels[2].clone(),
    )?;
    write_ppm(&args.out.join("gt.ppm"), &img, 65535)?;
    write_pfm(&args.out.join("gt.pfm"), scene.disparity.as_grid())?;

    #[derive(Serialize)]
    struct Cfg {
        size: usize,
        kind: String,
        seed: u64,
    }
    write_run_json(
        &args.out.join("run.json"),
        "gen-scene",
        Cfg { size: args.size, kind: args.kind, seed: args.seed },
    )?;
    println!("wrote {}", args.out.join("gt.ppm").display());
    Ok(())
}

fn parse_grid(s: &str) -> Result<usize> {
    let (a, b) = s
        .split_once('x')
        .ok_or_else(|| Error::invalid(format!("--grid must look like 3x3, got `{s}`")))?;
    let a: usize = a.parse().map_err(|_| Error::invalid(format!("bad grid `{s}`")))?;
    let b: usize = b.parse().map_err(|_| Error::invalid(format!("bad grid `{s}`")))?;
    if a != b || a % 2 == 0 {
        return Err(Error::invalid(format!("grid must be odd-sided square, got `{s}`")));
    }
    Ok(a)
}

fn load_kernel(path: Option<&Path>, scale: usize) -> Result<BlurKernel> {
    match path {
        None => {
            if scale == 1 {
                Ok(BlurKernel::identity())
            } else {
                BlurKernel::gaussian_psf(scale)
            }
        }
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            let mut tokens = text.split_whitespace();
            let radius: usize = tokens
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::format("kernel file", "first token must be the radius"))?;
            let taps: Vec<f64> = tokens
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| Error::format("kernel file", format!("bad tap `{t}`")))
                })
                .collect::<Result<_>>()?;
            BlurKernel::new(radius, taps)
        }
    }
}

fn load_luma(path: &Path) -> Result<ImageGrid> {
    match read_pnm_auto(path)? {
        PnmImage::Gray(g) => Ok(g),
        PnmImage::Color(c) => Ok(c.luma()),
    }
}

fn cmd_degrade(args: DegradeArgs) -> Result<()> {
    let grid_n = parse_grid(&args.grid)?;
    let pattern: ViewPattern = args.pattern.parse()?;
    let arm = args.arm.unwrap_or(grid_n / 2);
    let kernel = load_kernel(args.kernel.as_deref(), args.scale)?;

    let channels: Vec<ImageGrid> = match read_pnm_auto(&args.input)? {
        PnmImage::Gray(g) => vec![g],
        PnmImage::Color(c) => c.into_channels().into(),
    };
    let disparity = DisparityMap::new(read_pfm(&args.disparity)?)?;
    let noise = NoiseParams { sigma: args.sigma, impulse_pct: args.nu, seed: args.seed };

    let stack: DegradedStack = degrade_lightfield(
        &channels, &disparity, grid_n, pattern, arm, args.scale, &kernel, &noise,
    )?;
    save_stack(&args.out, &stack)?;

    #[derive(Serialize)]
    struct Cfg {
        input: String,
        disparity: String,
        grid: String,
        pattern: String,
        arm: usize,
        scale: usize,
        sigma: f64,
        nu: f64,
        seed: u64,
        views: usize,
    }
    write_run_json(
        &args.out.join("run.json"),
        "degrade",
        Cfg {
            input: args.input.display().to_string(),
            disparity: args.disparity.display().to_string(),
            grid: args.grid.clone(),
            pattern: args.pattern.clone(),
            arm,
            scale: args.scale,
            sigma: args.sigma,
            nu: args.nu,
            seed: args.seed,
            views: stack.views.len(),
        },
    )?;
    println!("wrote {} views to {}", stack.views.len(), args.out.display());
    Ok(())
}

/// Power-iteration estimate of the Lipschitz constant of the smooth data
/// gradient `2 lambda2 A^T A`, used for default GD steps. Runs outside the
/// CU-counted solve.
fn estimate_gd_step(stack: &LightFieldStack, scale: usize, kernel: &BlurKernel, lambda2: f64) -> Result<f64> {
    let (hw, hh) = stack.hr_size();
    let mut v = ImageGrid::constant(hw, hh, 1.0);
    let mut lipschitz = 1.0;
    for _ in 0..20 {
        let av = apply_a(&v, stack, scale, kernel)?;
        let mut atav = apply_a_adjoint(&av, stack, scale, kernel, AdjointMode::Exact)?;
        atav.scale_in_place(2.0 * lambda2.max(1e-6));
        let norm = atav.norm_sq().sqrt();
        if norm == 0.0 {
            break;
        }
        lipschitz = norm / v.norm_sq().sqrt();
        atav.scale_in_place(1.0 / norm);
        v = atav;
    }
    Ok(1.0 / lipschitz)
}

struct SolveOutput {
    x: ImageGrid,
    trace: ConvergenceTrace,
}

fn run_solver(
    stack: &LightFieldStack,
    run: &ResolvedRun,
    kernel: &BlurKernel,
    x0: Option<ImageGrid>,
    gt: Option<&ImageGrid>,
) -> Result<SolveOutput> {
    let (x, trace) = match run.solver.as_str() {
        "admm" => admm_solve(stack, &run.cfg, kernel, x0, gt)?,
        "gd" | "gd-ls" => {
            let step = match run.step {
                Some(s) => s,
                None => estimate_gd_step(stack, run.cfg.scale, kernel, run.cfg.lambda2)?,
            };
            gd_solve(stack, &run.cfg, kernel, step, run.solver == "gd-ls", x0, gt)?
        }
        other => return Err(Error::invalid(format!("unknown solver `{other}`"))),
    };
    Ok(SolveOutput { x, trace })
}

fn cmd_sr(args: SrArgs) -> Result<()> {
    let stack_dir: StackDir = load_stack(&args.stack)?;
    let lf = stack_dir.to_lightfield()?;
    let (hw, hh) = lf.hr_size();
    let run = resolve_solver(&args.solver, stack_dir.scale, hw * hh)?;
    let kernel = load_kernel(None, stack_dir.scale)?;

    let gt_luma: Option<ImageGrid> = match &args.gt {
        Some(p) => Some(load_luma(p)?),
        None => stack_dir.gt_luma(),
    };

    let out = run_solver(&lf, &run, &kernel, None, gt_luma.as_ref())?;

    write_sr_output(&args.out, &out.x, &stack_dir)?;
    if let Some(trace_path) = &args.trace {
        out.trace.write_csv(trace_path)?;
    }
    write_run_json(&run_json_sibling(&args.out), "sr", resolved_record(&run))?;

    let final_cost = out.trace.final_cost().unwrap_or(f64::NAN);
    println!("final_cost = {final_cost:.6}");
    if let Some(gt) = &gt_luma {
        let psnr = metrics::psnr(&out.x.clamp01(), gt, args.crop)?;
        println!("psnr_db = {psnr:.4}");
    }
    Ok(())
}

fn run_json_sibling(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    out.with_file_name(format!("{stem}.run.json"))
}

/// Write the solved luma back out; color stacks get bicubic-upsampled
/// chroma from the reference view.
fn write_sr_output(path: &Path, x: &ImageGrid, stack_dir: &StackDir) -> Result<()> {
    let y = x.clamp01();
    let gray_requested = path.extension().map(|e| e == "pgm").unwrap_or(false);
    if gray_requested || !stack_dir.is_color() {
        return write_pgm(path, &y, 65535);
    }
    let reference = &stack_dir.views[stack_dir.reference];
    let lr_rgb = ColorImage::new(
        ColorSpace::Rgb,
        reference.channels[0].clone(),
        reference.channels[1].clone(),
        reference.channels[2].clone(),
    )?;
    let lr_ycbcr = crate::color::ycbcr_from_rgb(&lr_rgb)?;
    let cb = bicubic_resample(lr_ycbcr.channel(1), y.width(), y.height())?;
    let cr = bicubic_resample(lr_ycbcr.channel(2), y.width(), y.height())?;
    let hr = crate::color::rgb_from_ycbcr(&ColorImage::new(ColorSpace::YCbCr, y, cb, cr)?)?;
    write_ppm(path, &hr, 65535)
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let a = load_luma(&args.a)?;
    let b = load_luma(&args.b)?;
    let report = metrics::evaluate(&a, &b, args.crop)?;
    println!("psnr_db,ssim");
    let psnr = if report.psnr.is_infinite() { "inf".to_string() } else { format!("{:.6}", report.psnr) };
    println!("{psnr},{:.6}", report.ssim);
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let stack_dir = load_stack(&args.stack)?;
    let lf = stack_dir.to_lightfield()?;
    let (hw, hh) = lf.hr_size();
    let base = resolve_solver(&args.solver, stack_dir.scale, hw * hh)?;
    let kernel = load_kernel(None, stack_dir.scale)?;
    let gt_luma: Option<ImageGrid> = match &args.gt {
        Some(p) => Some(load_luma(p)?),
        None => stack_dir.gt_luma(),
    };

    std::fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let x0 = bicubic_init(&lf, stack_dir.scale)?;
    let step = match base.step {
        Some(s) => s,
        None => estimate_gd_step(&lf, stack_dir.scale, &kernel, base.cfg.lambda2)?,
    };

    // one fixed objective for all four solvers: weights frozen at x0,
    // iteration caps lifted, the shared CU budget decides the horizon
    let mut cfg = base.cfg.clone();
    cfg.reweight = false;
    cfg.cu_budget = Some(args.cu_budget);
    cfg.iterations = usize::MAX / 2;

    let gt = gt_luma.as_ref();
    let mut cfg5 = cfg.clone();
    cfg5.cg_steps = 5;
    let mut cfg10 = cfg.clone();
    cfg10.cg_steps = 10;
    let traces: Vec<(&str, ConvergenceTrace)> = vec![
        ("gd", gd_solve(&lf, &cfg, &kernel, step, false, Some(x0.clone()), gt)?.1),
        ("gd-ls", gd_solve(&lf, &cfg, &kernel, step * 8.0, true, Some(x0.clone()), gt)?.1),
        ("admm-5", admm_solve(&lf, &cfg5, &kernel, Some(x0.clone()), gt)?.1),
        ("admm-10", admm_solve(&lf, &cfg10, &kernel, Some(x0.clone()), gt)?.1),
    ];

    let mut merged: Vec<(String, u64, f64)> = Vec::new();
    let mut summary = Vec::new();
    for (name, trace) in &traces {
        trace.write_csv(&args.out.join(format!("{name}.csv")))?;
        for row in &trace.rows {
            merged.push((name.to_string(), row.cu, row.cost));
        }
        summary.push(format!("{name}: final J {:.4}", trace.final_cost().unwrap_or(f64::NAN)));
    }

    merged.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    let mut csv = String::from("solver,cu,cost\n");
    for (name, cu, cost) in &merged {
        csv.push_str(&format!("{name},{cu},{cost:.10e}\n"));
    }
    std::fs::write(args.out.join("convergence.csv"), csv)
        .map_err(|e| Error::io(args.out.join("convergence.csv"), e))?;

    #[derive(Serialize)]
    struct Cfg {
        cu_budget: u64,
        gd_step: f64,
        #[serde(flatten)]
        solver: ResolvedSolver,
    }
    write_run_json(
        &args.out.join("run.json"),
        "bench",
        Cfg { cu_budget: args.cu_budget, gd_step: step, solver: resolved_record(&base) },
    )?;
    for line in summary {
        println!("{line}");
    }
    Ok(())
}

fn cmd_weights(args: WeightsArgs) -> Result<()> {
    let stack_dir = load_stack(&args.stack)?;
    let lf = stack_dir.to_lightfield()?;
    let (hw, hh) = lf.hr_size();
    let run = resolve_solver(&args.solver, stack_dir.scale, hw * hh)?;

    let x = match &args.image {
        Some(p) => {
            let img = load_luma(p)?;
            if img.width() != hw || img.height() != hh {
                return Err(Error::dim(format!(
                    "--image is {}x{}, stack HR is {hw}x{hh}",
                    img.width(),
                    img.height()
                )));
            }
            img
        }
        None => bicubic_init(&lf, stack_dir.scale)?,
    };

    let offsets = OffsetSet::window(run.cfg.window_radius)?;
    let weights = assemble_weights(&x, &lf, &offsets, &run.cfg.weight_params)?;
    std::fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    for (i, &(dx, dy)) in offsets.offsets().iter().enumerate() {
        let map = weights.effective_map(i);
        write_pgm(&args.out.join(format!("weight_{dx}_{dy}.pgm")), &map, 255)?;
        write_pfm(&args.out.join(format!("weight_{dx}_{dy}.pfm")), &map)?;
    }
    write_run_json(&args.out.join("run.json"), "weights", resolved_record(&run))?;
    println!("wrote {} weight maps to {}", offsets.len(), args.out.display());
    Ok(())
}

// used by integration tests to drive the CLI in-process
pub fn run_from<I, T>(argv: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)
        .map_err(|e| Error::invalid(e.to_string()))?;
    run(cli)
}

// ModelOperator is exercised through the solvers; re-exported here so CLI
// users can reach the counter when embedding.
#[allow(unused_imports)]
pub(crate) use ModelOperator as _ModelOperatorReexportGuard;
