//! Argument parsing and dispatch for the `stable-cluster` binary.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use stable_cluster_core::engine::{run, subsample, subsample_steps, Preset, RunSetup, DEFAULT_STEP_CAP};
use stable_cluster_core::pyramids::{
    enumerate_simple_partitions, limit_series_s, limit_series_t, partition_function, simple_partition_series,
    ColorScheme, PyramidShape, ShapeKind,
};
use stable_cluster_core::stabilize::{stable_series, StableOptions, TransformedTrace};
use stable_cluster_core::{Polynomial, Quiver, TwoCyclePolicy};

use crate::json::{shape_json, trace_json, PolynomialJson, QuiverJson, StableReportJson};
use crate::verify::verify_preset;

#[derive(Debug, Parser)]
#[command(name = "stable-cluster", version, about = "Cluster mutation runs, stable series and pyramid partitions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShapeArg {
    Row,
    Ad2,
    Ad4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LimitArg {
    #[value(name = "S")]
    S,
    #[value(name = "T")]
    T,
    #[value(name = "T4")]
    T4,
}

#[derive(Debug, Args, Clone, Default)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct Source {
    #[arg(long, conflicts_with = "quiver")]
    pub preset: Option<String>,
    /// JSON file with `n` and `arrows` (an n x n base or a 2n x 2n framed quiver).
    #[arg(long)]
    pub quiver: Option<PathBuf>,
    /// Comma separated mutable vertices, repeated cyclically.
    #[arg(long, value_delimiter = ',')]
    pub sequence: Option<Vec<usize>>,
    /// Keep 2-cycles between mutable vertices instead of cancelling them.
    #[arg(long)]
    pub keep_two_cycles: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the mutation sequence and print the F-polynomial and C-matrix of each step.
    Mutate {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        with_quivers: bool,
        /// Keep steps offset, offset+stride, ... and renumber them from 1.
        #[arg(long, value_parser = parse_subsample)]
        subsample: Option<(usize, usize)>,
        #[command(flatten)]
        output: Output,
    },
    /// Print the F-polynomial produced at one step.
    Fpoly {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        steps: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Report the transformed terms that have stopped changing.
    Stabilize {
        #[command(flatten)]
        source: Source,
        /// Number of (subsampled) steps to examine.
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        degree: i64,
        #[arg(long)]
        period: Option<usize>,
        #[arg(long, default_value_t = 3)]
        window: usize,
        #[arg(long, default_value_t = 0)]
        phase: usize,
        #[arg(long)]
        normalize_parity: bool,
        /// Defaults to the preset's own subsample, if any.
        #[arg(long, value_parser = parse_subsample)]
        subsample: Option<(usize, usize)>,
        /// Compute whole polynomials instead of truncated windows.
        #[arg(long)]
        full: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Partition functions and limit series of pyramid shapes.
    Pyramid {
        #[arg(long, value_enum)]
        shape: Option<ShapeArg>,
        #[arg(long)]
        k: Option<usize>,
        /// Only simple partitions, weighted by their limit exponent.
        #[arg(long)]
        simple: bool,
        #[arg(long, value_enum)]
        limit: Option<LimitArg>,
        #[arg(long)]
        degree: Option<i64>,
        #[arg(long)]
        dump_shape: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Run the named checks for a preset.
    Verify {
        #[arg(long)]
        preset: String,
        #[arg(long, default_value_t = 8)]
        max_k: usize,
        #[command(flatten)]
        output: Output,
    },
}

fn parse_subsample(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected offset:stride, got {s:?}"))?;
    let o = a.trim().parse::<usize>().map_err(|e| e.to_string())?;
    let st = b.trim().parse::<usize>().map_err(|e| e.to_string())?;
    if o == 0 || st == 0 {
        return Err("offset and stride must be positive".into());
    }
    Ok((o, st))
}

/// What a command produced: the text to emit and the process exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub body: String,
    pub status: i32,
    pub out: Option<PathBuf>,
}

impl Report {
    fn ok(body: String, out: &Output) -> Self {
        Report { body, status: 0, out: out.out.clone() }
    }
}

fn to_json<T: Serialize>(v: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

struct Resolved {
    preset: Option<Preset>,
    setup: RunSetup,
}

fn resolve(source: &Source) -> anyhow::Result<Resolved> {
    let (preset, mut setup) = match (&source.preset, &source.quiver) {
        (Some(name), None) => {
            let p = Preset::from_name(name).ok_or_else(|| anyhow!("unknown preset {name:?}"))?;
            (Some(p), p.setup())
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let j: QuiverJson = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            let q = if j.arrows.len() == j.n { Quiver::frame(&j.arrows)? } else { Quiver::try_from(&j)? };
            let seq = (0..q.n()).collect();
            (None, RunSetup::new(q, seq, TwoCyclePolicy::Cancel)?)
        }
        _ => bail!("exactly one of --preset or --quiver is required"),
    };
    if let Some(seq) = &source.sequence {
        setup = RunSetup::new(setup.quiver, seq.clone(), setup.policy)?;
    }
    if source.keep_two_cycles {
        setup.policy = TwoCyclePolicy::Keep;
    }
    Ok(Resolved { preset, setup })
}

fn check_steps(steps: usize) -> anyhow::Result<()> {
    if steps == 0 {
        bail!("--steps must be at least 1");
    }
    if steps > DEFAULT_STEP_CAP {
        bail!("--steps {steps} exceeds the cap of {DEFAULT_STEP_CAP}");
    }
    Ok(())
}

fn matrix_text(rows: &[Vec<i64>]) -> String {
    let inner: Vec<String> =
        rows.iter().map(|r| format!("[{}]", r.iter().map(i64::to_string).collect::<Vec<_>>().join(", "))).collect();
    format!("[{}]", inner.join(", "))
}

pub fn execute(cli: Cli) -> anyhow::Result<Report> {
    match cli.command {
        Command::Mutate { source, steps, with_quivers, subsample: sub, output } => {
            check_steps(steps)?;
            let r = resolve(&source)?;
            let mut trace = run(&r.setup, steps, DEFAULT_STEP_CAP, with_quivers)?;
            if let Some((o, s)) = sub {
                trace = subsample(&trace, o, s)?;
            }
            let body = match output.format {
                Format::Json => to_json(&trace_json(&trace))?,
                Format::Text => {
                    let mut s = String::new();
                    for rec in &trace.records {
                        writeln!(s, "k={} step={} vertex={}", rec.k, rec.source_step, rec.vertex)?;
                        writeln!(s, "  F = {}", rec.f)?;
                        writeln!(s, "  C = {}", matrix_text(&rec.c.rows()))?;
                        if let Some(q) = &rec.quiver {
                            writeln!(s, "  Q = {}", matrix_text(&q.signed_matrix()))?;
                        }
                    }
                    s
                }
            };
            Ok(Report::ok(body, &output))
        }
        Command::Fpoly { source, steps, output } => {
            check_steps(steps)?;
            let r = resolve(&source)?;
            let trace = run(&r.setup, steps, DEFAULT_STEP_CAP, false)?;
            let f = trace.f(steps).expect("run produced every step");
            let body = match output.format {
                Format::Json => to_json(&PolynomialJson::from(&f))?,
                Format::Text => format!("{f}\n"),
            };
            Ok(Report::ok(body, &output))
        }
        Command::Stabilize {
            source,
            steps,
            degree,
            period,
            window,
            phase,
            normalize_parity,
            subsample: sub,
            full,
            output,
        } => {
            check_steps(steps)?;
            if degree < 0 {
                bail!("--degree must be non-negative");
            }
            let r = resolve(&source)?;
            let sub = sub.or_else(|| r.preset.and_then(Preset::subsample)).unwrap_or((1, 1));
            let source_steps = subsample_steps(sub.0, sub.1, steps);
            let last = *source_steps.last().expect("steps >= 1");
            if last > DEFAULT_STEP_CAP {
                bail!("subsampled horizon reaches step {last}, beyond the cap of {DEFAULT_STEP_CAP}");
            }
            let norm = if normalize_parity {
                let p = r.preset.ok_or_else(|| anyhow!("--normalize-parity needs a preset"))?;
                Some(p.normalization())
            } else {
                None
            };
            let period = period.unwrap_or_else(|| r.preset.map_or(1, |p| p.period(norm.is_some())));
            let trace = if full {
                let t = run(&r.setup, last, DEFAULT_STEP_CAP, false)?;
                let t = if sub == (1, 1) { t } else { subsample(&t, sub.0, sub.1)? };
                TransformedTrace::from_trace(&t)?
            } else {
                TransformedTrace::windowed(&r.setup, &source_steps, degree)?
            };
            let mut opts = StableOptions::new(degree, period, window);
            opts.phase = phase;
            if let Some(n) = norm {
                opts = opts.normalized(n);
            }
            let rep = stable_series(&trace, &opts)?;
            let body = match output.format {
                Format::Json => to_json(&StableReportJson::from(&rep))?,
                Format::Text => {
                    let mut s = String::new();
                    writeln!(
                        s,
                        "degree_cap={} period={} window={} phase={} horizon={} terms={}",
                        rep.degree_cap,
                        rep.period,
                        rep.window,
                        rep.phase,
                        rep.horizon,
                        rep.terms.len()
                    )?;
                    writeln!(s, "series: {}", rep.series(trace.nvars))?;
                    for t in &rep.terms {
                        let mono = Polynomial::monomial(t.exp.clone(), t.coeff.clone());
                        writeln!(s, "  {}  first_stable_step={}", mono, t.first_stable_step)?;
                    }
                    s
                }
            };
            Ok(Report::ok(body, &output))
        }
        Command::Pyramid { shape, k, simple, limit, degree, dump_shape, output } => {
            if let Some(l) = limit {
                let d = degree.ok_or_else(|| anyhow!("--limit needs --degree"))?;
                if d < 0 {
                    bail!("--degree must be non-negative");
                }
                let p = match l {
                    LimitArg::S => limit_series_s(d),
                    LimitArg::T => limit_series_t(d, ColorScheme::TwoColor),
                    LimitArg::T4 => limit_series_t(d, ColorScheme::FourColor),
                };
                return Ok(Report::ok(poly_out(&p, output.format)?, &output));
            }
            let kind = match shape.ok_or_else(|| anyhow!("--shape or --limit is required"))? {
                ShapeArg::Row => ShapeKind::Row,
                ShapeArg::Ad2 => ShapeKind::Aztec2,
                ShapeArg::Ad4 => ShapeKind::Aztec4,
            };
            let k = k.ok_or_else(|| anyhow!("--shape needs --k"))?;
            let shape = PyramidShape::build(kind, k)?;
            let scheme = shape.default_scheme();
            if dump_shape {
                let j = shape_json(&shape, scheme);
                let body = match output.format {
                    Format::Json => to_json(&j)?,
                    Format::Text => {
                        let mut s = format!("{} k={} stones={}\n", j.kind, j.k, j.stones.len());
                        for (i, st) in j.stones.iter().enumerate() {
                            writeln!(s, "  {i}: j={} r={} p={} {} y{}", st.j, st.r, st.p, st.role, st.color)?;
                        }
                        for [lo, up] in &j.supports {
                            writeln!(s, "  {up} rests on {lo}")?;
                        }
                        s
                    }
                };
                return Ok(Report::ok(body, &output));
            }
            if simple {
                if kind == ShapeKind::Row {
                    bail!("--simple applies to ad2 and ad4");
                }
                let parts = enumerate_simple_partitions(&shape, degree)?;
                let series = simple_partition_series(&parts, scheme);
                let body = match output.format {
                    Format::Json => to_json(&serde_json::json!({
                        "count": parts.len(),
                        "series": PolynomialJson::from(&series),
                    }))?,
                    Format::Text => format!("count={}\n{}\n", parts.len(), series),
                };
                return Ok(Report::ok(body, &output));
            }
            let mut p = partition_function(&shape, scheme)?;
            if let Some(d) = degree {
                p = p.truncate(d);
            }
            Ok(Report::ok(poly_out(&p, output.format)?, &output))
        }
        Command::Verify { preset, max_k, output } => {
            let p = Preset::from_name(&preset).ok_or_else(|| anyhow!("unknown preset {preset:?}"))?;
            if max_k > DEFAULT_STEP_CAP {
                bail!("--max-k {max_k} exceeds the cap of {DEFAULT_STEP_CAP}");
            }
            let results = verify_preset(p, max_k);
            let failed = results.iter().filter(|r| !r.passed).count();
            let body = match output.format {
                Format::Json => to_json(&serde_json::json!({
                    "preset": p.name(),
                    "max_k": max_k,
                    "passed": results.len() - failed,
                    "failed": failed,
                    "checks": results.iter().map(|r| serde_json::json!({
                        "name": r.name,
                        "passed": r.passed,
                        "detail": r.detail,
                    })).collect::<Vec<_>>(),
                }))?,
                Format::Text => {
                    let mut s = String::new();
                    for r in &results {
                        let tag = if r.passed { "PASS" } else { "FAIL" };
                        writeln!(s, "{tag} {}: {}", r.name, r.detail)?;
                    }
                    writeln!(s, "{}: {} passed, {} failed", p.name(), results.len() - failed, failed)?;
                    s
                }
            };
            let mut rep = Report::ok(body, &output);
            rep.status = if failed == 0 { 0 } else { 1 };
            Ok(rep)
        }
    }
}

fn poly_out(p: &Polynomial, format: Format) -> anyhow::Result<String> {
    Ok(match format {
        Format::Json => to_json(&PolynomialJson::from(p))?,
        Format::Text => format!("{p}\n"),
    })
}
