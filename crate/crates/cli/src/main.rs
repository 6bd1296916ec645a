//! `ssdl`: batch driver for the homotopy fixed point, Tate and homotopy
//! orbit spectral sequences of THH.

mod svg;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ssdl_core::presets::{preset, presets};
use ssdl_core::specfile::{table_listing, SpecFile, SpecKind};
use ssdl_core::ss::{run, vertical, Report, RunOptions, Variant, Verdict, Window};
use ssdl_core::universal::{replay_universal, UniversalInput};

use svg::Chart;

const DEFAULT_TMAX: i64 = 64;
const DEFAULT_SMIN: i64 = -40;

#[derive(Parser)]
#[command(name = "ssdl", version, about = "Spectral sequences for THH with Dyer-Lashof operations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute H_*(THH(B)) from H_*(B).
    Thh(Common),
    /// Homotopy fixed point spectral sequence.
    Hfp(Common),
    /// Tate spectral sequence.
    Tate(Common),
    /// Homotopy orbit spectral sequence.
    Orbit(Common),
    /// Replay the universal extended-power example.
    Universal(UniversalArgs),
    /// List the built-in inputs.
    Presets,
}

#[derive(Args)]
struct Output {
    /// Text report (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON twin of the report.
    #[arg(long)]
    json: Option<PathBuf>,
    /// SVG chart.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct Common {
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    input: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    /// Prime for presets (default 2).
    #[arg(long)]
    p: Option<u32>,
    /// m for the BPm preset (BP<m-1>).
    #[arg(long)]
    m: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    tmax: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    smin: Option<i64>,
    /// Treat this class as a permanent cycle (repeatable).
    #[arg(long = "assume-zero")]
    assume_zero: Vec<String>,
    /// Report the page E^N instead of running to the end.
    #[arg(long = "stop-at-r")]
    stop_at_r: Option<u32>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct UniversalArgs {
    #[arg(long)]
    p: u32,
    #[arg(long)]
    t: i64,
    #[arg(long)]
    r: u32,
    #[arg(long, default_value_t = DEFAULT_TMAX)]
    tmax: i64,
    #[command(flatten)]
    output: Output,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("SSDL_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().with_context(|| format!("SSDL_THREADS must be a positive integer, got `{v}`"))?;
    if n == 0 {
        bail!("SSDL_THREADS must be positive");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn dispatch(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Presets => {
            for p in presets() {
                println!("{:<8} p = {:<4} {}", p.name, p.primes, p.description);
            }
            Ok(0)
        }
        Command::Thh(c) => thh(c),
        Command::Hfp(c) => spectral(c, Variant::Hfp),
        Command::Tate(c) => spectral(c, Variant::Tate),
        Command::Orbit(c) => spectral(c, Variant::Orbit),
        Command::Universal(u) => universal(u),
    }
}

fn load(c: &Common) -> Result<(SpecFile, Vec<String>)> {
    match (&c.input, &c.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let spec = SpecFile::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
            Ok((spec, Vec::new()))
        }
        (None, Some(name)) => Ok(preset(name, c.p, c.m)?),
        (None, None) => bail!("one of --input or --preset is required"),
    }
}

fn window(c: &Common, spec: &SpecFile) -> Result<Window> {
    let t_max = c.tmax.or(spec.options.t_max).unwrap_or(DEFAULT_TMAX);
    let s_min = c.smin.or(spec.options.s_min).unwrap_or(DEFAULT_SMIN);
    Ok(Window::new(t_max, s_min)?)
}

fn write(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Option<PathBuf>, text: impl FnOnce() -> Result<String>) -> Result<()> {
    if let Some(p) = path {
        fs::write(p, text()?).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn thh(c: Common) -> Result<u8> {
    let (spec, warnings) = load(&c)?;
    let w = window(&c, &spec)?;
    let v = vertical(&spec, w.t_max)?;
    let mut text = format!("{} at p = {}: H_*(THH) through degree {}\n\n", v.name, spec.p, w.t_max);
    text.push_str(&v.presentation.to_string());
    text.push('\n');
    for (k, val) in table_listing(&v.presentation) {
        text.push_str(&format!("  {k} = {val}\n"));
    }
    for n in &v.notes {
        text.push_str(&format!("note: {n}\n"));
    }
    for m in warnings.iter().chain(&v.warnings) {
        text.push_str(&format!("warning: {m}\n"));
    }
    write(&c.output.out, &text)?;
    write_file(&c.output.json, || Ok(SpecFile::from_presentation(&v.presentation, SpecKind::Ring).to_json()))?;
    if c.output.svg.is_some() {
        bail!("--svg applies to the spectral sequence subcommands");
    }
    Ok(0)
}

fn spectral(c: Common, variant: Variant) -> Result<u8> {
    let (spec, warnings) = load(&c)?;
    let w = window(&c, &spec)?;
    let v = vertical(&spec, w.t_max + 1)?;
    let opts = RunOptions { assume_zero: c.assume_zero.clone(), stop_at_r: c.stop_at_r };
    let outcome = run(v, w, &opts)?;
    let mut report = Report::new(&outcome, variant);
    report.warnings.splice(0..0, warnings);
    write(&c.output.out, &report.to_text())?;
    write_file(&c.output.json, || Ok(report.to_json()))?;
    write_file(&c.output.svg, || {
        let title = format!("{}: E^2 ({}), p = {}", outcome.vertical.name, variant.name(), spec.p);
        let mut chart = Chart::of(&outcome.e2, variant, Some(&outcome.page), &title);
        for cert in &outcome.certificates {
            let t = cert.class.degree();
            if variant != Variant::Orbit && t <= chart.t_max {
                chart.certified.insert((0, t));
            }
        }
        chart.render().map_err(anyhow::Error::msg)
    })?;
    Ok(match outcome.verdict {
        Verdict::Open { .. } => 2,
        Verdict::Collapsed | Verdict::Truncated { .. } => 0,
    })
}

fn universal(a: UniversalArgs) -> Result<u8> {
    let u = UniversalInput::new(a.p, a.t, a.r, a.tmax)?;
    let rep = replay_universal(&u)?;
    let mut text = format!(
        "universal example: p = {}, |x| = {}, |δx| = {}, d^{} (t <= {})\n",
        a.p,
        a.t,
        u.delta_degree(),
        2 * a.r,
        a.tmax
    );
    text.push_str(&format!("verdict: {}\n\nE^{} survivors:\n", if rep.pass { "PASS" } else { "FAIL" }, 2 * a.r + 2));
    for s in &rep.survivors {
        let why = s.reason.map(|r| format!("{r:?}")).unwrap_or_else(|| "uncertified".into());
        let win = if s.in_window { "" } else { ", beyond window" };
        text.push_str(&format!("  {:<28} degree {:>4}  {why}{win}\n", s.class, s.degree));
    }
    for f in &rep.failures {
        text.push_str(&format!("failure: {f}\n"));
    }
    write(&a.output.out, &text)?;
    write_file(&a.output.json, || Ok(serde_json::to_string_pretty(&rep)?))?;
    write_file(&a.output.svg, || {
        let page = rep.e2r.as_ref().expect("replay keeps its pages");
        let title = format!("universal example, p = {}, t = {}: E^{}", a.p, a.t, 2 * a.r);
        Chart::of(page, Variant::Hfp, rep.next.as_ref(), &title).render().map_err(anyhow::Error::msg)
    })?;
    Ok(if rep.pass { 0 } else { 2 })
}
