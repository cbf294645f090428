//! The `ncheck` command line: `check`, `gen` and `figure1`.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::criteria::{
    detect_oscillation_p, run_battery_with_moments, run_gamma_battery, TestConfig, TestKind, DEFAULT_PSD_TOL,
    DEFAULT_SATURATION_TOL,
};
use crate::error::Error;
use crate::generators::{
    cat_state, coherent, coherent_mixture, fock, photon_added, suggested_coherent_nmax,
    suggested_thermal_nmax, thermal, CatStateSpec, CoherentMixtureSpec, PhotonAddedSpec,
};
use crate::numeric::ln_factorial;
use crate::transforms::p_to_q;
use crate::types::{
    FactorialMomentSequence, MomentSequence, NormPolicy, PhotonDistribution, Verdict, WitnessReport,
    DEFAULT_ZERO_TOL,
};

pub const EXIT_NO_VIOLATION: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NONCLASSICAL: i32 = 2;

/// Last photon number written by `figure1`.
pub const FIGURE1_NMAX: usize = 200;

#[derive(Debug, Parser)]
#[command(
    name = "ncheck",
    version,
    about = "Test photon-number data for nonclassicality"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the test battery on a distribution file (JSON, or CSV `n,value`).
    Check(CheckArgs),
    /// Write the photon-number window of a model state as JSON.
    Gen(GenArgs),
    /// Write `n, p_n, q_n` for the five-component coherent mixture.
    Figure1 { output: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    P,
    Q,
    Gamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub input: PathBuf,
    /// Sequence kind; required for CSV, overrides the JSON field otherwise.
    #[arg(long, value_enum)]
    pub kind: Option<InputKind>,
    #[arg(long, default_value_t = DEFAULT_PSD_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub max_order: Option<usize>,
    /// Comma list: zeros, first_order, second_order, local_poissonian,
    /// oscillation_q, hankel_q, hankel_gamma.
    #[arg(long, value_delimiter = ',')]
    pub tests: Option<Vec<String>>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub report: ReportFormat,
    #[arg(long, default_value_t = DEFAULT_SATURATION_TOL)]
    pub saturation_tol: f64,
    #[arg(long)]
    pub zero_tol: Option<f64>,
    #[arg(long, value_enum)]
    pub norm_policy: Option<PolicyArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Exact,
    Truncated,
}

impl From<PolicyArg> for NormPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Exact => NormPolicy::Exact,
            PolicyArg::Truncated => NormPolicy::Truncated,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateArg {
    Coherent,
    Thermal,
    Fock,
    Mixture,
    Cat,
    PhotonAdded,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub state: StateArg,
    /// `|α|²` for coherent and cat states.
    #[arg(long)]
    pub intensity: Option<f64>,
    /// Mean photon number of a thermal state.
    #[arg(long)]
    pub mean: Option<f64>,
    /// Photon number of a Fock state.
    #[arg(long, alias = "m")]
    pub photons: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Named mixture (`fig1`).
    #[arg(long)]
    pub spec: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub intensities: Option<Vec<f64>>,
    /// State photons are added to; takes its parameters from the flags above.
    #[arg(long, value_enum)]
    pub base: Option<StateArg>,
    #[arg(long)]
    pub added: Option<usize>,
    /// Window of the base state before adding photons.
    #[arg(long)]
    pub base_nmax: Option<usize>,
    #[arg(long)]
    pub nmax: Option<usize>,
    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// On-disk distribution format shared by `check` and `gen`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputFile {
    pub kind: InputKind,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_policy: Option<NormPolicy>,
}

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Io(String),
    Library(Error),
    Usage(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Io(m) => write!(f, "{m}"),
            CliError::Library(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "usage error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Library(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses arguments and runs; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_ERROR
            } else {
                EXIT_NO_VIOLATION
            };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Check(a) => cmd_check(&a, out),
        Command::Gen(a) => cmd_gen(&a, out).map(|_| EXIT_NO_VIOLATION),
        Command::Figure1 { output } => cmd_figure1(&output).map(|_| EXIT_NO_VIOLATION),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "ncheck: {e}");
            EXIT_ERROR
        }
    }
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn looks_like_json(path: &Path, text: &str) -> bool {
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("json") => true,
        Some(e) if e.eq_ignore_ascii_case("csv") => false,
        _ => text.trim_start().starts_with('{'),
    }
}

/// JSON input; serde's messages carry line and column.
pub fn parse_json_input(text: &str) -> CliResult<InputFile> {
    serde_json::from_str(text)
        .map_err(|e| CliError::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))
}

/// Two-column `n,value` CSV with an optional header row. `n` must run
/// 0, 1, 2, ... without gaps.
pub fn parse_csv_input(text: &str) -> CliResult<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut values = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(row as u64 + 1);
            CliError::Parse(format!("line {line}: {e}"))
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(row as u64 + 1);
        if record.len() != 2 {
            return Err(CliError::Parse(format!(
                "line {line}: expected 2 fields (n,value), found {}",
                record.len()
            )));
        }
        let n_field = &record[0];
        if values.is_empty() && n_field.parse::<f64>().is_err() && record[1].parse::<f64>().is_err() {
            // header row
            continue;
        }
        let n: usize = n_field.parse().map_err(|_| {
            CliError::Parse(format!(
                "line {line}, field 1: '{n_field}' is not a photon number"
            ))
        })?;
        if n != values.len() {
            return Err(CliError::Parse(format!(
                "line {line}, field 1: expected n = {}, found {n}",
                values.len()
            )));
        }
        let v: f64 = record[1].parse().map_err(|_| {
            CliError::Parse(format!("line {line}, field 2: '{}' is not a number", &record[1]))
        })?;
        if !v.is_finite() {
            return Err(CliError::Parse(format!(
                "line {line}, field 2: value is not finite"
            )));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(CliError::Parse("no data rows".into()));
    }
    Ok(values)
}

/// Reads an input file in either format, applying command-line overrides.
pub fn load_input(args: &CheckArgs) -> CliResult<InputFile> {
    let text = read_file(&args.input)?;
    let mut input = if looks_like_json(&args.input, &text) {
        parse_json_input(&text)?
    } else {
        let kind = args
            .kind
            .ok_or_else(|| CliError::Usage("CSV input needs --kind p|q|gamma".into()))?;
        InputFile {
            kind,
            values: parse_csv_input(&text)?,
            zero_tol: None,
            norm_policy: None,
        }
    };
    if let Some(k) = args.kind {
        input.kind = k;
    }
    if args.zero_tol.is_some() {
        input.zero_tol = args.zero_tol;
    }
    if let Some(p) = args.norm_policy {
        input.norm_policy = Some(p.into());
    }
    Ok(input)
}

fn config_from(args: &CheckArgs) -> CliResult<TestConfig> {
    let mut cfg = TestConfig {
        psd_tol: args.tol,
        max_hankel_order: args.max_order,
        saturation_tol: args.saturation_tol,
        ..TestConfig::default()
    };
    if let Some(names) = &args.tests {
        let kinds = names
            .iter()
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.parse::<TestKind>())
            .collect::<crate::error::Result<Vec<_>>>()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        cfg = cfg.with_tests(kinds);
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

/// Runs the battery appropriate to the input kind.
pub fn check_input(input: &InputFile, cfg: &TestConfig) -> CliResult<WitnessReport> {
    let zero_tol = input.zero_tol.unwrap_or(DEFAULT_ZERO_TOL);
    let policy = input.norm_policy.unwrap_or_default();
    match input.kind {
        InputKind::P => {
            let dist = PhotonDistribution::new(input.values.clone(), policy, zero_tol)?;
            Ok(run_battery_with_moments(&p_to_q(&dist), Some(&dist), cfg)?)
        }
        InputKind::Q => {
            let p: Vec<f64> = input
                .values
                .iter()
                .enumerate()
                .map(|(n, q)| q / ln_factorial(n).exp())
                .collect();
            let dist = PhotonDistribution::new(p, policy, zero_tol)?;
            // keep the supplied q, masking only what validation called zero
            let ln_q = input
                .values
                .iter()
                .enumerate()
                .map(|(n, &q)| {
                    if dist.is_zero(n) {
                        f64::NEG_INFINITY
                    } else {
                        q.ln()
                    }
                })
                .collect();
            let q = MomentSequence::from_ln(ln_q)?;
            Ok(run_battery_with_moments(&q, Some(&dist), cfg)?)
        }
        InputKind::Gamma => {
            if let Some((n, &v)) = input
                .values
                .iter()
                .enumerate()
                .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
            {
                return Err(CliError::Library(Error::NegativeProbability { n, value: v }));
            }
            let g = FactorialMomentSequence::from_values(input.values.clone())?;
            Ok(run_gamma_battery(&g, cfg)?)
        }
    }
}

pub fn report_json(report: &WitnessReport) -> String {
    serde_json::to_string_pretty(report).expect("reports serialize") + "\n"
}

pub fn report_text(report: &WitnessReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "verdict: {}", report.verdict);
    let _ = writeln!(s, "tolerance: {:e}", report.tolerance);
    for t in &report.tests {
        match t.window {
            None => {
                let _ = writeln!(s, "{:<18} skipped (window too short)", t.name);
            }
            Some((a, b)) if t.witnesses.is_empty() => {
                let _ = writeln!(s, "{:<18} n={a}..{b}  ok", t.name);
            }
            Some((a, b)) => {
                let _ = writeln!(s, "{:<18} n={a}..{b}  {} violation(s)", t.name, t.witnesses.len());
                for w in &t.witnesses {
                    let idx: Vec<String> = w.indices.iter().map(|i| i.to_string()).collect();
                    let _ = writeln!(
                        s,
                        "    [{}] lhs={:.6e} rhs={:.6e} margin={:.6e}",
                        idx.join(","),
                        w.lhs,
                        w.rhs,
                        w.margin
                    );
                }
            }
        }
    }
    s
}

fn cmd_check(args: &CheckArgs, out: &mut dyn Write) -> CliResult<i32> {
    let cfg = config_from(args)?;
    let input = load_input(args)?;
    let report = check_input(&input, &cfg)?;
    let text = match args.report {
        ReportFormat::Json => report_json(&report),
        ReportFormat::Text => report_text(&report),
    };
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Io(e.to_string()))?;
    Ok(match report.verdict {
        Verdict::Nonclassical => EXIT_NONCLASSICAL,
        Verdict::NoViolationFound => EXIT_NO_VIOLATION,
    })
}

fn need<T: Copy>(v: Option<T>, flag: &str, state: StateArg) -> CliResult<T> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for {state:?}")))
}

fn mixture_spec(args: &GenArgs) -> CliResult<CoherentMixtureSpec> {
    match (&args.spec, &args.weights, &args.intensities) {
        (Some(name), None, None) if name.eq_ignore_ascii_case("fig1") => Ok(CoherentMixtureSpec::fig1()),
        (Some(name), None, None) => Err(CliError::Usage(format!("unknown mixture '{name}'"))),
        (None, Some(w), Some(i)) => Ok(CoherentMixtureSpec::new(w.clone(), i.clone())?),
        _ => Err(CliError::Usage(
            "mixture needs --spec fig1 or both --weights and --intensities".into(),
        )),
    }
}

fn default_nmax(args: &GenArgs, state: StateArg) -> CliResult<usize> {
    Ok(match state {
        StateArg::Coherent | StateArg::Cat => {
            suggested_coherent_nmax(need(args.intensity, "intensity", state)?)
        }
        StateArg::Thermal => suggested_thermal_nmax(need(args.mean, "mean", state)?),
        StateArg::Fock => need(args.photons, "photons", state)?.max(20),
        StateArg::Mixture => mixture_spec(args)?.suggested_nmax(),
        StateArg::PhotonAdded => return Err(CliError::Usage("photon-added cannot be nested".into())),
    })
}

fn generate_simple(args: &GenArgs, state: StateArg, nmax: usize) -> CliResult<PhotonDistribution> {
    Ok(match state {
        StateArg::Coherent => coherent(need(args.intensity, "intensity", state)?, nmax)?,
        StateArg::Thermal => thermal(need(args.mean, "mean", state)?, nmax)?,
        StateArg::Fock => fock(need(args.photons, "photons", state)?, nmax)?,
        StateArg::Mixture => coherent_mixture(&mixture_spec(args)?, nmax)?,
        StateArg::Cat => cat_state(
            &CatStateSpec {
                intensity: need(args.intensity, "intensity", state)?,
                theta: need(args.theta, "theta", state)?,
            },
            nmax,
        )?,
        StateArg::PhotonAdded => return Err(CliError::Usage("photon-added cannot be nested".into())),
    })
}

/// Builds the distribution a `gen` invocation describes.
pub fn generate(args: &GenArgs) -> CliResult<PhotonDistribution> {
    if args.state != StateArg::PhotonAdded {
        let nmax = match args.nmax {
            Some(n) => n,
            None => default_nmax(args, args.state)?,
        };
        return generate_simple(args, args.state, nmax);
    }
    let base_state = need(args.base, "base", args.state)?;
    let added = need(args.added, "added", args.state)?;
    let base_nmax = match args.base_nmax {
        Some(n) => n,
        None => default_nmax(args, base_state)?,
    };
    let base = generate_simple(args, base_state, base_nmax)?;
    let nmax = args.nmax.unwrap_or(base_nmax + added);
    Ok(photon_added(&PhotonAddedSpec { base, added }, nmax)?)
}

pub fn distribution_json(dist: &PhotonDistribution) -> String {
    let file = InputFile {
        kind: InputKind::P,
        values: dist.values().to_vec(),
        zero_tol: Some(dist.zero_tol()),
        norm_policy: Some(dist.norm_policy()),
    };
    serde_json::to_string(&file).expect("distributions serialize") + "\n"
}

fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> CliResult<()> {
    let text = distribution_json(&generate(args)?);
    match &args.out {
        Some(path) => write_file(path, &text),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

/// Text of the `figure1` data file.
pub fn figure1_data() -> CliResult<String> {
    let spec = CoherentMixtureSpec::fig1();
    let dist = coherent_mixture(&spec, FIGURE1_NMAX)?;
    let q = p_to_q(&dist);
    let ln_max = q.ln_values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let fmt_list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
    let p_max: Vec<usize> = detect_oscillation_p(&dist).iter().map(|m| m.start).collect();
    let mut s = String::new();
    let _ = writeln!(s, "# coherent mixture, sum_j lambda_j |alpha_j><alpha_j|");
    let _ = writeln!(s, "# lambda = [{}]", fmt_list(spec.weights()));
    let _ = writeln!(s, "# |alpha|^2 = [{}]", fmt_list(spec.intensities()));
    let _ = writeln!(
        s,
        "# n = 0..{FIGURE1_NMAX} (largest |alpha|^2 plus six standard deviations)"
    );
    let _ = writeln!(
        s,
        "# p_n: photon-number distribution on the window, unnormalized tail dropped"
    );
    let _ = writeln!(
        s,
        "# q_n = n! p_n divided by max_n q_n = {:.12e} (plot scaling only)",
        ln_max.exp()
    );
    let _ = writeln!(s, "# interior maxima of p_n at n = {p_max:?}");
    let _ = writeln!(s, "n,p_n,q_n_scaled");
    for n in 0..=FIGURE1_NMAX {
        let _ = writeln!(
            s,
            "{n},{:.17e},{:.17e}",
            dist.values()[n],
            (q.ln(n) - ln_max).exp()
        );
    }
    Ok(s)
}

fn cmd_figure1(output: &Path) -> CliResult<()> {
    write_file(output, &figure1_data()?)
}

/// Entry point for the binary.
pub fn main_exit_code() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_and_rows() {
        let v = parse_csv_input("n,value\n0,0.5\n1,0.25\n2,0.25\n").unwrap();
        assert_eq!(v, vec![0.5, 0.25, 0.25]);
        assert_eq!(parse_csv_input("0,1\n").unwrap(), vec![1.0]);
    }

    #[test]
    fn csv_diagnostics_name_line_and_field() {
        let e = parse_csv_input("n,value\n0,0.5\n1,abc\n")
            .unwrap_err()
            .to_string();
        assert!(e.contains("line 3") && e.contains("field 2"), "{e}");
        let e = parse_csv_input("0,0.5\n2,0.5\n").unwrap_err().to_string();
        assert!(e.contains("line 2") && e.contains("field 1"), "{e}");
        let e = parse_csv_input("0,0.5,1\n").unwrap_err().to_string();
        assert!(e.contains("line 1"), "{e}");
    }

    #[test]
    fn json_diagnostics_have_position() {
        let e = parse_json_input("{\"kind\": \"p\",\n \"values\": [1.0,]}")
            .unwrap_err()
            .to_string();
        assert!(e.contains("line 2"), "{e}");
        assert!(parse_json_input("{\"kind\": \"x\", \"values\": [1]}").is_err());
    }

    #[test]
    fn q_input_keeps_native_values() {
        let input = InputFile {
            kind: InputKind::Q,
            values: vec![0.44, 0.07, 0.26, 0.30, 1.44, 3.60, 28.80],
            zero_tol: None,
            norm_policy: None,
        };
        let r = check_input(&input, &TestConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Nonclassical);
        let w = &r.test("first_order").unwrap().witnesses[0];
        assert_eq!(w.indices, vec![1, 2, 3]);
        assert!((w.lhs - 0.021).abs() < 1e-12);
    }

    #[test]
    fn figure1_header_lists_spec() {
        let s = figure1_data().unwrap();
        assert!(s.contains("# lambda = [0.25, 0.25, 0.2, 0.18, 0.12]"));
        assert!(s.contains("# |alpha|^2 = [10, 30, 60, 90, 130]"));
        assert_eq!(
            s.lines().filter(|l| !l.starts_with('#')).count(),
            FIGURE1_NMAX + 2
        );
    }
}
