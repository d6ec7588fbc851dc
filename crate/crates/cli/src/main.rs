//! `multifract` — multifractal scaling-exponent estimation from the command
//! line: synthetic generation, MF-DFA, diffusion entropy analysis,
//! partition-function spectra, rolling Hurst traces, and spectrum
//! transforms/comparisons.
//!
//! Exit codes: 0 success (possibly with warnings), 1 usage error,
//! 2 data/validation error, 3 numerical failure.

mod error;
mod range;
mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use multifract::dea::{collect_fluctuations, delta_spectrum, BinRule};
use multifract::ingest::{load_series, to_increments, ColumnSelector, ColumnSpec, IncrementMode};
use multifract::mfdfa::{
    fluctuation_function, h_spectrum, rolling_hurst, tau_from_h, DfaConfig, RollingEstimator,
};
use multifract::partition::{
    generalized_dimensions, measure_from_series, partition_function, BoxMeasure,
};
use multifract::spectrum::{
    compare_spectra, legendre_pointwise, legendre_tau_to_f, normalize_to_tau,
};
use multifract::synth::{generate, GeneratorModel, GeneratorSpec};
use multifract::{SpectrumCurve, SpectrumKind, TimeSeries};

use error::CliError;
use report::{atomic_write, write_json, AnalysisReport, InputInfo, MeasureFile, MeasureLevel};

#[derive(Parser)]
#[command(
    name = "multifract",
    version,
    about = "Multifractal time-series analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic series with known scaling properties.
    Gen(GenArgs),
    /// MF-DFA: h(q), tau(q) and the singularity spectrum f(alpha).
    Dfa(DfaArgs),
    /// Diffusion entropy analysis: the delta(q) spectrum.
    Dea(DeaArgs),
    /// Rolling-window Hurst exponent trace.
    Hurst(HurstArgs),
    /// Partition-function analysis of box measures: tau(q) and D(q).
    Partition(PartitionArgs),
    /// Transform a report's tau(q) to f(alpha), or compare two reports.
    Spectrum(SpectrumArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Input delimited text file.
    #[arg(long)]
    input: PathBuf,
    /// Value column: zero-based index or header name.
    #[arg(long, default_value = "0")]
    column: String,
    /// Field delimiter.
    #[arg(long, default_value = ",")]
    delimiter: char,
    /// Treat the first row as data, not as a header.
    #[arg(long)]
    no_header: bool,
    /// Sampling interval as value:unit (e.g. 1:minute).
    #[arg(long, default_value = "1:tick")]
    tick_lag: String,
}

#[derive(Args)]
struct GenArgs {
    /// gaussian_white | brownian | fgn | binomial_cascade | levy
    #[arg(long)]
    model: String,
    /// Series length (power of two). For binomial_cascade this defaults to
    /// 2^depth.
    #[arg(long)]
    length: Option<usize>,
    #[arg(long)]
    seed: u64,
    /// Model parameters, repeatable: -p H=0.7, -p a=0.6, -p depth=12, -p mu=1.5.
    #[arg(long = "param", short = 'p')]
    params: Vec<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DfaArgs {
    #[command(flatten)]
    input: InputArgs,
    /// diff | log_return | demeaned_diff | raw
    #[arg(long)]
    mode: String,
    /// Moment orders, min:max:step.
    #[arg(long, allow_hyphen_values = true)]
    q: String,
    /// Scale grid, min:max:count (log-spaced).
    #[arg(long)]
    scales: String,
    /// Detrending polynomial order.
    #[arg(long, default_value_t = 1)]
    order: usize,
    /// Restrict the scaling fits to scales in a:b.
    #[arg(long)]
    fit_range: Option<String>,
    /// Analysis report (JSON).
    #[arg(long)]
    out: PathBuf,
    /// Plot-ready CSV: q, h, tau, alpha, f_alpha, r_squared.
    #[arg(long)]
    export_csv: Option<PathBuf>,
}

#[derive(Args)]
struct DeaArgs {
    #[command(flatten)]
    input: InputArgs,
    /// diff | log_return | demeaned_diff | raw
    #[arg(long)]
    mode: String,
    /// Moment orders, min:max:step.
    #[arg(long, allow_hyphen_values = true)]
    q: String,
    /// Window lengths, min:max:count (log-spaced).
    #[arg(long)]
    scales: String,
    /// sturges | scott | fd | count=k | width=w
    #[arg(long, default_value = "fd")]
    bins: String,
    /// Evaluate negative q despite the sparse-bin blow-up risk.
    #[arg(long)]
    allow_negative_q: bool,
    #[arg(long)]
    out: PathBuf,
    /// Plot-ready CSV: q, delta, intercept, r_squared.
    #[arg(long)]
    export_csv: Option<PathBuf>,
}

#[derive(Args)]
struct HurstArgs {
    #[command(flatten)]
    input: InputArgs,
    /// dfa (q = 2) | rs
    #[arg(long)]
    estimator: String,
    #[arg(long)]
    window: usize,
    #[arg(long, default_value_t = 1)]
    step: usize,
    /// Trace CSV: index, estimate.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PartitionArgs {
    /// Exact box-mass sidecar (from `gen --model binomial_cascade`).
    #[arg(long, conflicts_with = "input")]
    measure: Option<PathBuf>,
    /// Series file to box into a measure instead.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Value column for --input.
    #[arg(long, default_value = "0")]
    column: String,
    #[arg(long, default_value = ",")]
    delimiter: char,
    #[arg(long)]
    no_header: bool,
    /// Convert the series to absolute increments before boxing.
    #[arg(long)]
    abs_increments: bool,
    /// Dyadic levels to use, min:max.
    #[arg(long)]
    levels: Option<String>,
    /// Moment orders, min:max:step.
    #[arg(long, allow_hyphen_values = true)]
    q: String,
    #[arg(long)]
    out: PathBuf,
    /// Plot-ready CSV: q, tau, d, r_squared.
    #[arg(long)]
    export_csv: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Analysis report (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Second report: compare instead of transforming.
    #[arg(long)]
    input2: Option<PathBuf>,
    /// Emit the Legendre spectrum f(alpha) of the report's tau(q).
    #[arg(long)]
    legendre: bool,
    #[arg(long)]
    out: PathBuf,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Dfa(args) => cmd_dfa(args),
        Command::Dea(args) => cmd_dea(args),
        Command::Hurst(args) => cmd_hurst(args),
        Command::Partition(args) => cmd_partition(args),
        Command::Spectrum(args) => cmd_spectrum(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn parse_params(pairs: &[String]) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for pair in pairs {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--param: expected key=value, got `{pair}`")))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn param_f64(params: &BTreeMap<String, String>, key: &str) -> Result<f64, CliError> {
    params
        .get(key)
        .ok_or_else(|| CliError::Usage(format!("missing --param {key}=<value>")))?
        .parse()
        .map_err(|_| CliError::Usage(format!("--param {key}: not a number")))
}

fn cmd_gen(args: GenArgs) -> Result<(), CliError> {
    let params = parse_params(&args.params)?;
    let (model, default_len) = match args.model.as_str() {
        "gaussian_white" => (GeneratorModel::GaussianWhite, None),
        "brownian" => (GeneratorModel::Brownian, None),
        "fgn" => (
            GeneratorModel::Fgn {
                hurst: param_f64(&params, "H")?,
            },
            None,
        ),
        "binomial_cascade" => {
            let depth = param_f64(&params, "depth")?;
            if depth.fract() != 0.0 || !(1.0..=30.0).contains(&depth) {
                return Err(CliError::Usage(
                    "--param depth: need an integer in 1..=30".into(),
                ));
            }
            let depth = depth as u32;
            (
                GeneratorModel::BinomialCascade {
                    a: param_f64(&params, "a")?,
                    depth,
                },
                Some(1usize << depth),
            )
        }
        "levy" => (
            GeneratorModel::Levy {
                mu: param_f64(&params, "mu")?,
            },
            None,
        ),
        other => {
            return Err(CliError::Usage(format!(
                "unknown model `{other}` (expected gaussian_white, brownian, fgn, \
                 binomial_cascade or levy)"
            )))
        }
    };
    let length = match (args.length, default_len) {
        (Some(l), _) => l,
        (None, Some(l)) => l,
        (None, None) => {
            return Err(CliError::Usage(
                "--length is required for this model".into(),
            ))
        }
    };

    let spec = GeneratorSpec {
        model,
        length,
        seed: args.seed,
    };
    let generated = generate(&spec)?;

    let mut csv = String::with_capacity(generated.series.len() * 20 + 8);
    csv.push_str("value\n");
    for v in generated.series.values() {
        csv.push_str(&format!("{v}\n"));
    }
    atomic_write(&args.out, csv.as_bytes())?;

    if let Some(measures) = &generated.cascade_measures {
        let (a, depth) = match model {
            GeneratorModel::BinomialCascade { a, depth } => (a, depth),
            _ => unreachable!("only cascades emit measures"),
        };
        let file = MeasureFile {
            model: "binomial_cascade".to_string(),
            a,
            depth,
            seed: args.seed,
            levels: measures
                .iter()
                .map(|m| MeasureLevel {
                    level: m.level(),
                    weights: m.weights().to_vec(),
                })
                .collect(),
        };
        let sidecar = sidecar_path(&args.out);
        write_json(&sidecar, &file)?;
        println!("wrote {} and {}", args.out.display(), sidecar.display());
    } else {
        println!("wrote {}", args.out.display());
    }
    Ok(())
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".measure.json");
    PathBuf::from(s)
}

fn load_input(args: &InputArgs) -> Result<(TimeSeries, InputInfo), CliError> {
    let column = match args.column.parse::<usize>() {
        Ok(idx) => ColumnSelector::Index(idx),
        Err(_) => ColumnSelector::Name(args.column.clone()),
    };
    let spec = ColumnSpec {
        column,
        timestamp_column: None,
        delimiter: args.delimiter,
        has_header: !args.no_header,
    };
    let tick_lag = range::parse_tick_lag(&args.tick_lag)?;
    let loaded = load_series(&args.input, &spec, tick_lag.clone())?;
    let info = InputInfo {
        source: args.input.display().to_string(),
        label: loaded.series.label.clone(),
        mode: None,
        tick_lag: Some(tick_lag),
        dropped_rows: Some(loaded.dropped_rows),
    };
    Ok((loaded.series, info))
}

fn apply_mode(series: TimeSeries, mode: &str) -> Result<TimeSeries, CliError> {
    let mode = match mode {
        "raw" => return Ok(series),
        "diff" => IncrementMode::Diff,
        "log_return" => IncrementMode::LogReturn,
        "demeaned_diff" => IncrementMode::DemeanedDiff,
        other => {
            return Err(CliError::Usage(format!(
                "unknown mode `{other}` (expected diff, log_return, demeaned_diff or raw)"
            )))
        }
    };
    Ok(to_increments(&series, mode)?)
}

fn cmd_dfa(args: DfaArgs) -> Result<(), CliError> {
    let (raw, mut info) = load_input(&args.input)?;
    info.mode = Some(args.mode.clone());
    let series = apply_mode(raw, &args.mode)?;

    let q_grid = range::parse_q_grid(&args.q)?;
    let scale_grid = range::parse_scale_grid(&args.scales)?;
    let fit_range = args
        .fit_range
        .as_deref()
        .map(range::parse_fit_range)
        .transpose()?;
    let cfg = DfaConfig::new(args.order, q_grid, scale_grid);

    let mut warnings = Vec::new();
    let surface = fluctuation_function(&series, &cfg)?;
    warnings.extend(surface.warnings);
    let h = h_spectrum(&surface.value, fit_range)?;
    warnings.extend(h.warnings);
    let tau = tau_from_h(&h.value)?;
    // The Legendre step needs at least 5 tau samples; a sparser q grid still
    // yields valid h(q) and tau(q), so skip f(alpha) and say so.
    let f = if tau.len() >= 5 {
        let out = legendre_tau_to_f(&tau)?;
        warnings.extend(out.warnings);
        Some(out.value)
    } else {
        warnings.push(format!(
            "f(alpha) omitted: Legendre transform needs at least 5 q points, got {}",
            tau.len()
        ));
        None
    };

    let mut config = BTreeMap::new();
    config.insert("q".into(), args.q.clone());
    config.insert("scales".into(), args.scales.clone());
    config.insert("order".into(), args.order.to_string());
    config.insert("mode".into(), args.mode.clone());
    if let Some(fr) = &args.fit_range {
        config.insert("fit_range".into(), fr.clone());
    }

    let mut report = AnalysisReport::new("dfa", info, config);
    report.curves = vec![h.value.clone(), tau.clone()];
    if let Some(f) = f {
        report.curves.push(f);
    }
    report.warnings = warnings.clone();
    write_json(&args.out, &report)?;

    if let Some(csv_path) = &args.export_csv {
        let points = if tau.len() >= 5 {
            Some(legendre_pointwise(&tau).map_err(CliError::from)?)
        } else {
            None
        };
        let mut csv = String::from("q,h,tau,alpha,f_alpha,r_squared\n");
        for (i, &q) in h.value.abscissa().iter().enumerate() {
            let r2 = h.value.diagnostics()[i]
                .as_ref()
                .map(|d| d.r_squared)
                .unwrap_or(f64::NAN);
            let (alpha, f_alpha) = points
                .as_ref()
                .map(|p| (p[i].alpha, p[i].f))
                .unwrap_or((f64::NAN, f64::NAN));
            csv.push_str(&format!(
                "{q},{},{},{alpha},{f_alpha},{r2}\n",
                h.value.ordinate()[i],
                tau.ordinate()[i],
            ));
        }
        atomic_write(csv_path, csv.as_bytes())?;
    }

    for w in &warnings {
        eprintln!("warning: {w}");
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn parse_bins(s: &str) -> Result<BinRule, CliError> {
    match s {
        "sturges" => Ok(BinRule::Sturges),
        "scott" => Ok(BinRule::Scott),
        "fd" | "freedman_diaconis" => Ok(BinRule::FreedmanDiaconis),
        other => {
            if let Some(k) = other.strip_prefix("count=") {
                let k = k
                    .parse::<usize>()
                    .map_err(|_| CliError::Usage(format!("--bins count=: `{k}` not an integer")))?;
                Ok(BinRule::FixedCount(k))
            } else if let Some(w) = other.strip_prefix("width=") {
                let w = w
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("--bins width=: `{w}` not a number")))?;
                Ok(BinRule::FixedWidth(w))
            } else {
                Err(CliError::Usage(format!(
                    "unknown bin rule `{other}` (expected sturges, scott, fd, count=k or width=w)"
                )))
            }
        }
    }
}

fn cmd_dea(args: DeaArgs) -> Result<(), CliError> {
    let (raw, mut info) = load_input(&args.input)?;
    info.mode = Some(args.mode.clone());
    let increments = apply_mode(raw, &args.mode)?;

    let q_grid = range::parse_q_grid(&args.q)?;
    let scale_grid = range::parse_scale_grid(&args.scales)?;
    let rule = parse_bins(&args.bins)?;

    let ensemble = collect_fluctuations(&increments, &scale_grid)?;
    let out = delta_spectrum(&ensemble, &q_grid, &rule, args.allow_negative_q)?;

    let mut config = BTreeMap::new();
    config.insert("q".into(), args.q.clone());
    config.insert("scales".into(), args.scales.clone());
    config.insert("bins".into(), args.bins.clone());
    config.insert("mode".into(), args.mode.clone());
    config.insert("allow_negative_q".into(), args.allow_negative_q.to_string());

    let mut report = AnalysisReport::new("dea", info, config);
    report.curves = vec![out.value.curve.clone()];
    report.warnings = out.warnings.clone();
    write_json(&args.out, &report)?;

    if let Some(csv_path) = &args.export_csv {
        let mut csv = String::from("q,delta,b_q,r_squared\n");
        for scaling in &out.value.per_q {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                scaling.q, scaling.delta, scaling.intercept, scaling.fit.r_squared
            ));
        }
        atomic_write(csv_path, csv.as_bytes())?;
    }

    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_hurst(args: HurstArgs) -> Result<(), CliError> {
    let (series, _) = load_input(&args.input)?;
    let estimator = match args.estimator.as_str() {
        "dfa" => RollingEstimator::DfaH2,
        "rs" => RollingEstimator::Rs,
        other => {
            return Err(CliError::Usage(format!(
                "unknown estimator `{other}` (expected dfa or rs)"
            )))
        }
    };
    let trace = rolling_hurst(&series, args.window, args.step, estimator)?;

    let mut csv = String::from("index,estimate\n");
    for (index, estimate) in &trace {
        match estimate {
            Some(h) => csv.push_str(&format!("{index},{h}\n")),
            None => csv.push_str(&format!("{index},nan\n")),
        }
    }
    atomic_write(&args.out, csv.as_bytes())?;
    println!("wrote {} ({} windows)", args.out.display(), trace.len());
    Ok(())
}

fn load_measures(args: &PartitionArgs) -> Result<(Vec<BoxMeasure>, InputInfo), CliError> {
    if let Some(path) = &args.measure {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let file: MeasureFile = serde_json::from_str(&text)?;
        let measures = file
            .levels
            .iter()
            .map(|l| BoxMeasure::new(l.level, l.weights.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        let info = InputInfo {
            source: path.display().to_string(),
            label: format!(
                "{} (a={}, depth={}, seed={})",
                file.model, file.a, file.depth, file.seed
            ),
            mode: None,
            tick_lag: None,
            dropped_rows: None,
        };
        Ok((measures, info))
    } else if let Some(path) = &args.input {
        let column = match args.column.parse::<usize>() {
            Ok(idx) => ColumnSelector::Index(idx),
            Err(_) => ColumnSelector::Name(args.column.clone()),
        };
        let spec = ColumnSpec {
            column,
            timestamp_column: None,
            delimiter: args.delimiter,
            has_header: !args.no_header,
        };
        let loaded = load_series(path, &spec, multifract::TickLag::ticks())?;
        let series = if args.abs_increments {
            let inc = to_increments(&loaded.series, IncrementMode::Diff)?;
            TimeSeries::new(
                inc.values().iter().map(|v| v.abs()).collect(),
                inc.tick_lag.clone(),
                inc.label.clone(),
            )?
        } else {
            loaded.series
        };
        let (lo, hi) = match &args.levels {
            Some(s) => range::parse_level_range(s)?,
            None => {
                let max = (series.len() as f64).log2().floor() as u32;
                (max.saturating_sub(6).max(1), max)
            }
        };
        let measures = (lo..=hi)
            .map(|level| measure_from_series(&series, level))
            .collect::<Result<Vec<_>, _>>()?;
        let info = InputInfo {
            source: path.display().to_string(),
            label: series.label.clone(),
            mode: Some(if args.abs_increments {
                "abs_increments".into()
            } else {
                "raw".into()
            }),
            tick_lag: None,
            dropped_rows: Some(loaded.dropped_rows),
        };
        Ok((measures, info))
    } else {
        Err(CliError::Usage(
            "partition needs --measure <json> or --input <csv>".into(),
        ))
    }
}

fn cmd_partition(args: PartitionArgs) -> Result<(), CliError> {
    let (mut measures, info) = load_measures(&args)?;
    if args.measure.is_some() {
        if let Some(s) = &args.levels {
            let (lo, hi) = range::parse_level_range(s)?;
            measures.retain(|m| (lo..=hi).contains(&m.level()));
        }
    }
    let q_grid = range::parse_q_grid(&args.q)?;
    let tau = partition_function(&measures, &q_grid)?;
    let d = generalized_dimensions(&tau.value)?;

    let mut config = BTreeMap::new();
    config.insert("q".into(), args.q.clone());
    if let Some(levels) = &args.levels {
        config.insert("levels".into(), levels.clone());
    }
    config.insert(
        "levels_used".into(),
        measures
            .iter()
            .map(|m| m.level().to_string())
            .collect::<Vec<_>>()
            .join(","),
    );

    let mut report = AnalysisReport::new("partition", info, config);
    report.curves = vec![tau.value.clone(), d.clone()];
    report.warnings = tau.warnings.clone();
    write_json(&args.out, &report)?;

    if let Some(csv_path) = &args.export_csv {
        let mut csv = String::from("q,tau,d,r_squared\n");
        for (i, &q) in tau.value.abscissa().iter().enumerate() {
            let r2 = tau.value.diagnostics()[i]
                .as_ref()
                .map(|f| f.r_squared)
                .unwrap_or(f64::NAN);
            csv.push_str(&format!(
                "{q},{},{},{r2}\n",
                tau.value.ordinate()[i],
                d.ordinate()[i]
            ));
        }
        atomic_write(csv_path, csv.as_bytes())?;
    }

    for w in &tau.warnings {
        eprintln!("warning: {w}");
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

/// The report's exponent curve normalised to tau(q): a native tau curve if
/// present, otherwise h(q) or delta(q) mapped through tau = q v - 1.
fn tau_curve_of(report: &AnalysisReport, path: &Path) -> Result<SpectrumCurve, CliError> {
    if let Some(curve) = try_tau_curve(report) {
        return Ok(curve);
    }
    Err(CliError::Data(format!(
        "{}: report contains no q-indexed exponent curve",
        path.display()
    )))
}

fn try_tau_curve(report: &AnalysisReport) -> Option<SpectrumCurve> {
    if let Some(tau) = report.curve(SpectrumKind::TauOfQ) {
        return Some(tau.clone());
    }
    for kind in [
        SpectrumKind::HOfQ,
        SpectrumKind::DeltaOfQ,
        SpectrumKind::DOfQ,
    ] {
        if let Some(curve) = report.curve(kind) {
            return normalize_to_tau(curve).ok();
        }
    }
    None
}

/// Comparable curve pair: both tau-normalised when possible, otherwise both
/// f(alpha); anything else is a kind mismatch.
fn comparable_pair(
    a: &AnalysisReport,
    b: &AnalysisReport,
) -> Result<(SpectrumCurve, SpectrumCurve), CliError> {
    if let (Some(ta), Some(tb)) = (try_tau_curve(a), try_tau_curve(b)) {
        return Ok((ta, tb));
    }
    if let (Some(fa), Some(fb)) = (
        a.curve(SpectrumKind::FOfAlpha),
        b.curve(SpectrumKind::FOfAlpha),
    ) {
        return Ok((fa.clone(), fb.clone()));
    }
    Err(CliError::Data(
        "incompatible spectrum kinds: reports share neither a q-indexed exponent curve \
         nor an f(alpha) curve"
            .into(),
    ))
}

fn cmd_spectrum(args: SpectrumArgs) -> Result<(), CliError> {
    let report_a = AnalysisReport::load(&args.input)?;

    if let Some(second) = &args.input2 {
        let report_b = AnalysisReport::load(second)?;
        let (curve_a, curve_b) = comparable_pair(&report_a, &report_b)?;
        let cmp = compare_spectra(&curve_a, &curve_b)?;

        let mut csv = String::from("metric,value\n");
        csv.push_str(&format!("compared_kind,{}\n", cmp.compared_kind));
        csv.push_str(&format!("max_abs_deviation,{}\n", cmp.max_abs_deviation));
        csv.push_str(&format!("overlap_lo,{}\n", cmp.overlap.0));
        csv.push_str(&format!("overlap_hi,{}\n", cmp.overlap.1));
        csv.push_str(&format!("support_width_a,{}\n", cmp.support_width_a));
        csv.push_str(&format!("support_width_b,{}\n", cmp.support_width_b));
        csv.push_str(&format!("discontinuity_a,{}\n", cmp.discontinuity_a));
        csv.push_str(&format!("discontinuity_b,{}\n", cmp.discontinuity_b));
        atomic_write(&args.out, csv.as_bytes())?;

        if cmp.discontinuity_a || cmp.discontinuity_b {
            eprintln!("warning: discontinuity flagged in at least one spectrum");
        }
        println!(
            "wrote {} (max deviation {})",
            args.out.display(),
            cmp.max_abs_deviation
        );
        return Ok(());
    }

    if !args.legendre {
        return Err(CliError::Usage(
            "spectrum needs either --input2 (compare) or --legendre (transform)".into(),
        ));
    }
    let tau = tau_curve_of(&report_a, &args.input)?;
    let f = legendre_tau_to_f(&tau)?;
    let mut csv = String::from("alpha,f_alpha\n");
    for (a, fv) in f.value.abscissa().iter().zip(f.value.ordinate()) {
        csv.push_str(&format!("{a},{fv}\n"));
    }
    atomic_write(&args.out, csv.as_bytes())?;
    for w in &f.warnings {
        eprintln!("warning: {w}");
    }
    println!("wrote {}", args.out.display());
    Ok(())
}
