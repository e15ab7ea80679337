use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use hpmf_core::hpmf::IterationRecord;
use hpmf_core::imaging::{make_observation, psnr, rse, ssim, ImageTensor, ImagingError, SamplingSpec};
use hpmf_core::{run_hpmf, HpmfConfig, HpmfError, Image};
use thiserror::Error;

use crate::args::{CompleteArgs, MetricsArgs, SweepArgs};
use crate::settings::{resolve, SettingsError};

pub const METRICS_HEADER: &str = "sr,psnr,rse,ssim,iterations,seconds";
pub const TRACE_HEADER: &str = "iteration,relative_change,objective,seconds";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Settings(#[from] SettingsError),
    #[error(transparent)]
    Imaging(#[from] ImagingError),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("solver failed: {0}")]
    Solver(#[from] HpmfError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Solver(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Shortest round-trip decimal; infinity prints as `inf`.
fn num(v: f64) -> String {
    format!("{v}")
}

struct Row {
    sr: f64,
    psnr: f64,
    rse: f64,
    ssim: f64,
    iterations: usize,
    seconds: f64,
}

impl Row {
    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            num(self.sr),
            num(self.psnr),
            num(self.rse),
            num(self.ssim),
            self.iterations,
            num(self.seconds)
        )
    }
}

// SSIM is undefined below the window size; report NaN rather than failing
fn ssim_or_nan(x: &Image, t: &Image) -> Result<f64, CliError> {
    match ssim(x, t) {
        Ok(v) => Ok(v),
        Err(ImagingError::ImageTooSmall { .. }) => {
            eprintln!("warning: image smaller than the SSIM window; reporting nan");
            Ok(f64::NAN)
        }
        Err(e) => Err(e.into()),
    }
}

struct Completed {
    image: Image,
    row: Row,
    trace: Vec<IterationRecord>,
}

fn complete_one(img: &Image, spec: &SamplingSpec, cfg: &HpmfConfig) -> Result<Completed, CliError> {
    let problem = make_observation(img, spec)?;
    let start = Instant::now();
    let report = run_hpmf(&problem, cfg)?;
    let seconds = if cfg.record_timing {
        start.elapsed().as_secs_f64()
    } else {
        0.0
    };
    let recovered = ImageTensor::new(report.recovered)?;
    let t = img.tensor();
    let row = Row {
        sr: match spec {
            SamplingSpec::UniformRandom { sr, .. } => *sr,
            SamplingSpec::MaskFile { .. } => problem.mask().sampling_ratio(),
        },
        psnr: psnr(recovered.tensor(), t)?,
        rse: rse(recovered.tensor(), t)?,
        ssim: ssim_or_nan(&recovered, img)?,
        iterations: report.iterations,
        seconds,
    };
    Ok(Completed {
        image: recovered,
        row,
        trace: report.trace,
    })
}

/// Output sink: a file, or stdout when no path is given.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(io_err(p))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_line(out: &mut dyn Write, line: &str, path: Option<&Path>) -> Result<(), CliError> {
    let fail = |source| CliError::Io {
        path: path.map_or("stdout".into(), |p| p.display().to_string()),
        source,
    };
    writeln!(out, "{line}").map_err(fail)?;
    out.flush().map_err(fail)
}

/// `<dir>/<stem>.trace.csv` beside `anchor`.
fn trace_path(anchor: &Path, suffix: Option<&str>) -> PathBuf {
    let stem = anchor.file_stem().map_or("hpmf".into(), |s| s.to_string_lossy().into_owned());
    let name = match suffix {
        Some(s) => format!("{stem}.{s}.trace.csv"),
        None => format!("{stem}.trace.csv"),
    };
    anchor.with_file_name(name)
}

fn write_trace(path: &Path, trace: &[IterationRecord]) -> Result<(), CliError> {
    let mut out = BufWriter::new(File::create(path).map_err(io_err(path))?);
    let mut text = String::from(TRACE_HEADER);
    text.push('\n');
    for r in trace {
        text.push_str(&format!(
            "{},{},{},{}\n",
            r.iteration,
            num(r.relative_change),
            num(r.objective),
            num(r.wall_seconds)
        ));
    }
    out.write_all(text.as_bytes()).map_err(io_err(path))?;
    out.flush().map_err(io_err(path))
}

pub fn complete(args: &CompleteArgs) -> Result<(), CliError> {
    let cfg = resolve(&args.solver)?;
    let img = Image::load(&args.input)?;
    let spec = match (&args.mask, args.sr) {
        (Some(path), _) => SamplingSpec::MaskFile { path: path.clone() },
        (None, Some(sr)) => SamplingSpec::uniform(sr, cfg.seed),
        (None, None) => return Err(CliError::Usage("one of --sr or --mask is required".into())),
    };
    let done = complete_one(&img, &spec, &cfg)?;
    done.image.save_png(&args.output)?;

    let metrics = args.metrics_out.as_deref();
    let mut out = sink(metrics)?;
    write_line(&mut *out, METRICS_HEADER, metrics)?;
    write_line(&mut *out, &done.row.csv(), metrics)?;
    if args.solver.trace {
        let anchor = metrics.unwrap_or(&args.output);
        write_trace(&trace_path(anchor, None), &done.trace)?;
    }
    Ok(())
}

pub fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    if args.sr.is_empty() {
        return Err(CliError::Usage("--sr needs at least one sampling ratio".into()));
    }
    let cfg = resolve(&args.solver)?;
    let img = Image::load(&args.input)?;
    let mut ratios = args.sr.clone();
    if let Some(bad) = ratios.iter().find(|s| !(**s > 0.0 && **s <= 1.0)) {
        return Err(CliError::Usage(format!("sampling ratio {bad} outside (0, 1]")));
    }
    ratios.sort_by(f64::total_cmp);

    let metrics = args.metrics_out.as_deref();
    let mut out = sink(metrics)?;
    write_line(&mut *out, METRICS_HEADER, metrics)?;
    for sr in ratios {
        let done = complete_one(&img, &SamplingSpec::uniform(sr, cfg.seed), &cfg)?;
        write_line(&mut *out, &done.row.csv(), metrics)?;
        if args.solver.trace {
            let anchor = metrics.unwrap_or(&args.input);
            write_trace(&trace_path(anchor, Some(&format!("sr{sr}"))), &done.trace)?;
        }
    }
    Ok(())
}

pub fn metrics(args: &MetricsArgs) -> Result<(), CliError> {
    let reference = Image::load(&args.reference)?;
    let estimate = Image::load(&args.estimate)?;
    let (x, t) = (estimate.tensor(), reference.tensor());
    let line = format!(
        "{},{},{}",
        num(psnr(x, t)?),
        num(rse(x, t)?),
        num(ssim_or_nan(&estimate, &reference)?)
    );
    println!("{line}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_are_plain_decimals() {
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(1e-7), "0.0000001");
        assert_eq!(num(0.0), "0");
    }

    #[test]
    fn trace_files_sit_beside_the_anchor() {
        assert_eq!(trace_path(Path::new("out/m.csv"), None), Path::new("out/m.trace.csv"));
        assert_eq!(
            trace_path(Path::new("m.csv"), Some("sr0.5")),
            Path::new("m.sr0.5.trace.csv")
        );
    }

    #[test]
    fn numerical_failures_exit_with_two() {
        let e = CliError::Solver(HpmfError::NonFiniteUpdate("U"));
        assert_eq!(e.exit_code(), 2);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
    }
}
