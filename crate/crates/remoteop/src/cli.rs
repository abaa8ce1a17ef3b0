//! Command-line front end: verification runs, table regeneration, and
//! step-by-step demo transcripts.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocol::{
    self, cbits_needed, Case, ResourceVector, run_remote_restricted_recorded,
};
use crate::resources::{self, TableFormat};
use crate::restricted::{self, build_matrix};
use crate::state::{MeasurePolicy, StateVector};

/// Default bound on d^{2N+M}, the largest register a run allocates.
pub const DEFAULT_CAP: u64 = 4096;
/// Environment variable overriding the amplitude cap.
pub const CAP_ENV: &str = "REMOTEOP_CAP";

#[derive(Parser, Debug)]
#[command(
    name = "remoteop",
    about = "Simulate remote implementation of block-permutation unitaries and reproduce their communication costs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run seeded random operations through the protocol and check them
    /// against the dense oracle and the predicted ledger.
    Verify(RunConfig),
    /// Print the four communication-cost tables.
    Tables(TablesArgs),
    /// Print a step-by-step transcript of one protocol run.
    Demo(DemoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    Split,
    BobHoldsAll,
    Mzero,
}

impl From<CaseArg> for Case {
    fn from(c: CaseArg) -> Case {
        match c {
            CaseArg::Split => Case::Split,
            CaseArg::BobHoldsAll => Case::BobHoldsAll,
            CaseArg::Mzero => Case::MZero,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Sample,
    Enumerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Text,
    Json,
    Csv,
}

impl From<FormatArg> for TableFormat {
    fn from(f: FormatArg) -> TableFormat {
        match f {
            FormatArg::Text => TableFormat::Text,
            FormatArg::Json => TableFormat::Json,
            FormatArg::Csv => TableFormat::Csv,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Qudit dimension.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Number of permuted qudits (Bob's register).
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Number of block qudits.
    #[arg(long, default_value_t = 0)]
    pub m: usize,
    /// Register layout.
    #[arg(long, value_enum, default_value_t = CaseArg::Split)]
    pub case: CaseArg,
    /// Seed for operations, input states, and sampled outcomes.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random operations to run.
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// Measurement branch policy.
    #[arg(long, value_enum, default_value_t = PolicyArg::Enumerate)]
    pub policy: PolicyArg,
    /// Max tolerated amplitude deviation from the oracle.
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
    /// Report format.
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    pub format: FormatArg,
}

#[derive(Args, Debug, Clone)]
pub struct TablesArgs {
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    pub format: FormatArg,
    /// Also evaluate every cell at concrete values, e.g. --eval N=2,M=1.
    #[arg(long, value_parser = parse_eval)]
    pub eval: Option<EvalPoint>,
}

#[derive(Debug, Clone, Copy)]
pub struct EvalPoint {
    pub n: i64,
    pub m: i64,
}

fn parse_eval(text: &str) -> std::result::Result<EvalPoint, String> {
    let mut n = None;
    let mut m = Some(0i64);
    for part in text.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| format!("expected KEY=VALUE, got '{part}'"))?;
        let value: i64 = value
            .trim()
            .parse()
            .map_err(|e| format!("bad value in '{part}': {e}"))?;
        match key.trim() {
            "N" | "n" => n = Some(value),
            "M" | "m" => m = Some(value),
            other => return Err(format!("unknown key '{other}' (expected N or M)")),
        }
    }
    Ok(EvalPoint {
        n: n.ok_or("missing N=..")?,
        m: m.unwrap(),
    })
}

#[derive(Args, Debug, Clone)]
pub struct DemoArgs {
    #[command(flatten)]
    pub config: RunConfig,
    /// Force the measurement outcome instead of sampling.
    #[arg(long)]
    pub forced: Option<u64>,
}

/// Amplitude cap: default 4096 registers, overridable via REMOTEOP_CAP.
pub fn amplitude_cap() -> u64 {
    std::env::var(CAP_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_CAP)
}

fn check_cap(config: &RunConfig) -> Result<()> {
    if config.d < 2 {
        return Err(Error::Config(format!("d must be >= 2, got {}", config.d)));
    }
    if config.n < 1 {
        return Err(Error::Config(format!("n must be >= 1, got {}", config.n)));
    }
    let cap = amplitude_cap();
    let exp = (2 * config.n + config.m) as u32;
    let size = (config.d as u64)
        .checked_pow(exp)
        .ok_or_else(|| Error::Config(format!("d^(2N+M) overflows for d={}", config.d)))?;
    if size > cap {
        return Err(Error::Config(format!(
            "d^(2N+M) = {size} exceeds the amplitude cap {cap} (override with {CAP_ENV})"
        )));
    }
    Ok(())
}

fn predicted_ledger(case: Case, d: usize, n: usize, m: usize) -> ResourceVector {
    let cbits = cbits_needed(d, n);
    match case {
        Case::Split | Case::MZero => ResourceVector {
            qudits_b_to_a: n as u64,
            cbits_a_to_b: cbits,
            ..Default::default()
        },
        Case::BobHoldsAll => ResourceVector {
            qudits_b_to_a: (n + m) as u64,
            qudits_a_to_b: m as u64,
            cbits_a_to_b: cbits,
            ..Default::default()
        },
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialReport {
    pub trial: usize,
    pub seed: u64,
    pub branches: usize,
    pub max_deviation: f64,
    pub ledger: ResourceVector,
    pub ledger_ok: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub version: u32,
    pub d: usize,
    pub n: usize,
    pub m: usize,
    pub case: String,
    pub seed: u64,
    pub policy: String,
    pub tolerance: f64,
    pub trials: Vec<TrialReport>,
    pub pass: bool,
}

impl VerifyReport {
    pub fn render(&self, format: FormatArg) -> String {
        match format {
            FormatArg::Json => {
                serde_json::to_string_pretty(self).expect("serialization cannot fail")
            }
            _ => {
                let mut out = format!(
                    "verify d={} N={} M={} case={} policy={} tolerance={:.1e}\n",
                    self.d, self.n, self.m, self.case, self.policy, self.tolerance
                );
                for t in &self.trials {
                    out.push_str(&format!(
                        "trial {:>3} seed={:<6} branches={:<3} max_dev={:.3e} ledger[{}] {}\n",
                        t.trial,
                        t.seed,
                        t.branches,
                        t.max_deviation,
                        t.ledger,
                        if t.pass { "ok" } else { "FAIL" }
                    ));
                }
                out.push_str(if self.pass { "PASS\n" } else { "FAIL\n" });
                out
            }
        }
    }
}

/// Run `trials` seeded random operations through the protocol and compare
/// every branch against the dense oracle.
pub fn cmd_verify(config: &RunConfig) -> Result<VerifyReport> {
    check_cap(config)?;
    let case: Case = config.case.into();
    if case == Case::MZero && config.m != 0 {
        return Err(Error::Config(format!(
            "case mzero requires m = 0, got {}",
            config.m
        )));
    }
    let expected_ledger = predicted_ledger(case, config.d, config.n, config.m);
    let mut trials = Vec::with_capacity(config.trials);
    let mut all_pass = true;
    for trial in 0..config.trials {
        let seed = config.seed.wrapping_add(trial as u64);
        let op = restricted::random_restricted(seed, config.d, config.n, config.m)?;
        let input = StateVector::random(seed ^ 0x5eed, config.d, config.n + config.m)?;
        let policy = match config.policy {
            PolicyArg::Enumerate => MeasurePolicy::EnumerateAll,
            PolicyArg::Sample => MeasurePolicy::Sample { seed },
        };
        let (branches, _transcript, ledger) =
            protocol::run_remote_restricted(&op, case, &input, policy)?;
        let expect_amps = build_matrix(&op).matvec(input.amplitudes());
        let expect =
            StateVector::from_amplitudes(config.d, config.n + config.m, expect_amps)?;
        let max_deviation = branches
            .iter()
            .map(|(_, st)| st.max_abs_diff(&expect))
            .fold(0.0f64, f64::max);
        let ledger_ok = ledger == expected_ledger;
        let pass = max_deviation < config.tolerance && ledger_ok;
        all_pass &= pass;
        trials.push(TrialReport {
            trial,
            seed,
            branches: branches.len(),
            max_deviation,
            ledger,
            ledger_ok,
            pass,
        });
    }
    Ok(VerifyReport {
        version: 1,
        d: config.d,
        n: config.n,
        m: config.m,
        case: format!("{:?}", config.case).to_lowercase(),
        seed: config.seed,
        policy: format!("{:?}", config.policy).to_lowercase(),
        tolerance: config.tolerance,
        trials,
        pass: all_pass,
    })
}

/// Render the four cost tables.
pub fn cmd_tables(args: &TablesArgs) -> String {
    let tables = resources::generate_tables();
    let eval = args.eval.map(|e| (e.n, e.m));
    resources::render_tables(&tables, args.format.into(), eval)
}

/// One protocol run printed step by step, ending with the oracle verdict.
pub fn cmd_demo(args: &DemoArgs) -> Result<String> {
    let config = &args.config;
    check_cap(config)?;
    let case: Case = config.case.into();
    let op = restricted::random_restricted(config.seed, config.d, config.n, config.m)?;
    let input = StateVector::random(config.seed ^ 0x5eed, config.d, config.n + config.m)?;
    let policy = match args.forced {
        Some(k) => MeasurePolicy::Forced(k),
        None => MeasurePolicy::Sample { seed: config.seed },
    };
    let (branches, transcript, ledger) =
        run_remote_restricted_recorded(&op, case, &input, policy, true)?;
    let expect_amps = build_matrix(&op).matvec(input.amplitudes());
    let expect = StateVector::from_amplitudes(config.d, config.n + config.m, expect_amps)?;
    let mut out = format!(
        "demo d={} N={} M={} case={:?} seed={}\n\n",
        config.d, config.n, config.m, case, config.seed
    );
    for e in &transcript.events {
        out.push_str(&e.to_string());
        out.push('\n');
        if let Some(s) = &e.state {
            out.push_str(&format!("    state: {s}\n"));
        }
    }
    let max_dev = branches
        .iter()
        .map(|(_, st)| st.max_abs_diff(&expect))
        .fold(0.0f64, f64::max);
    out.push_str(&format!("\nledger: {ledger}\n"));
    out.push_str(&format!(
        "final state vs oracle: max deviation {max_dev:.3e} -> {}\n",
        if max_dev < config.tolerance {
            "PASS"
        } else {
            "FAIL"
        }
    ));
    Ok(out)
}

/// Entry point used by the binary. Returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Verify(config) => match cmd_verify(&config) {
            Ok(report) => {
                print!("{}", report.render(config.format));
                if report.pass {
                    0
                } else {
                    1
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        },
        Command::Tables(args) => {
            print!("{}", cmd_tables(&args));
            0
        }
        Command::Demo(args) => match cmd_demo(&args) {
            Ok(text) => {
                print!("{text}");
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(d: usize, n: usize, m: usize, case: CaseArg) -> RunConfig {
        RunConfig {
            d,
            n,
            m,
            case,
            seed: 0,
            trials: 5,
            policy: PolicyArg::Enumerate,
            tolerance: 1e-10,
            format: FormatArg::Text,
        }
    }

    #[test]
    fn verify_small_split_passes() {
        let report = cmd_verify(&config(2, 2, 1, CaseArg::Split)).unwrap();
        assert!(report.pass);
        assert_eq!(report.trials.len(), 5);
        for t in &report.trials {
            assert_eq!(t.branches, 4);
        }
    }

    #[test]
    fn verify_qutrit_ledger() {
        let report = cmd_verify(&config(3, 2, 0, CaseArg::Mzero)).unwrap();
        assert!(report.pass);
        assert_eq!(report.trials[0].ledger.qudits_b_to_a, 2);
        assert_eq!(report.trials[0].ledger.cbits_a_to_b, 4);
    }

    #[test]
    fn verify_rejects_oversized_register() {
        let err = cmd_verify(&config(2, 6, 2, CaseArg::Split)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("16384"), "message should name d^(2N+M): {msg}");
    }

    #[test]
    fn verify_json_is_deterministic() {
        let c = config(2, 1, 0, CaseArg::Mzero);
        let a = cmd_verify(&c).unwrap().render(FormatArg::Json);
        let b = cmd_verify(&c).unwrap().render(FormatArg::Json);
        assert_eq!(a, b);
        assert!(a.contains("\"version\": 1"));
    }

    #[test]
    fn tables_text_contains_gap_cells() {
        let text = cmd_tables(&TablesArgs {
            format: FormatArg::Text,
            eval: None,
        });
        assert!(text.contains("N+4M"));
        assert!(text.contains("-N"));
    }

    #[test]
    fn tables_eval_parses_and_renders() {
        let args = TablesArgs {
            format: FormatArg::Text,
            eval: Some(parse_eval("N=1,M=0").unwrap()),
        };
        let text = cmd_tables(&args);
        assert!(text.contains("evaluated at N=1, M=0"));
    }

    #[test]
    fn demo_reports_pass() {
        let text = cmd_demo(&DemoArgs {
            config: config(2, 1, 0, CaseArg::Mzero),
            forced: Some(1),
        })
        .unwrap();
        assert!(text.contains("PASS"));
        assert!(text.contains("S^1"));
    }
}
