//! `noma-mec`: solve, sweep, verify, and map the two-user uplink
//! offloading schedules from the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 infeasible scenario input,
//! 3 I/O error, 4 verification failure.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use noma_mec_cli::sweep::{
    self, emit_csv, fmt_float, run_sweep, solve_record, SweepSpec, SweepVar,
};
use noma_mec_cli::verify::{run_campaign, CampaignConfig};
use noma_mec_core::closed_form::{lemma2_band, solve_lemma1, strategy_region};
use noma_mec_core::model::{feasibility_thresholds, ModelError, Scenario};
use noma_mec_core::oracle::OracleConfig;

#[derive(Parser)]
#[command(
    name = "noma-mec",
    version,
    about = "Energy-minimal transmit scheduling for two-user uplink offloading"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Scenario flags shared by the subcommands. Defaults reproduce the
/// reference setup: a 20-nat task, deadlines of 40 s and 80 s, unit powers
/// and gains.
#[derive(Args, Debug, Clone, Copy)]
struct ScenarioArgs {
    /// Task size to offload, in nats
    #[arg(long, default_value_t = 20.0)]
    nats: f64,
    /// Deadline of the delay-sensitive user, in seconds
    #[arg(long, default_value_t = 40.0)]
    dm: f64,
    /// Deadline of the offloading user, in seconds
    #[arg(long, default_value_t = 80.0)]
    dn: f64,
    /// Transmit power of the delay-sensitive user, in watts
    #[arg(long, default_value_t = 1.0)]
    pm: f64,
    /// Noise-normalized channel gain of the delay-sensitive user
    #[arg(long, default_value_t = 1.0)]
    gm: f64,
    /// Noise-normalized channel gain of the offloading user
    #[arg(long, default_value_t = 1.0)]
    gn: f64,
}

impl ScenarioArgs {
    fn build(&self) -> Result<Scenario, ModelError> {
        Scenario::from_parts(self.nats, self.dm, self.dn, self.pm, self.gm, self.gn)
    }

    /// Build the sweep base with the swept field replaced by a safe
    /// placeholder, since its flag value is ignored anyway. This keeps
    /// e.g. `sweep --var dn` usable regardless of the `--dn` flag.
    fn build_sweep_base(&self, var: SweepVar) -> Result<Scenario, ModelError> {
        let mut args = *self;
        match var {
            SweepVar::Pm => args.pm = 0.0,
            SweepVar::Dn => args.dn = args.dm * 2.0,
            SweepVar::Nats => args.nats = 1.0,
            SweepVar::Gm => args.gm = 1.0,
            SweepVar::Gn => args.gn = 1.0,
        }
        args.build()
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario: all branch energies and the chosen schedule
    Solve {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Emit one JSON record instead of text
        #[arg(long)]
        json: bool,
    },
    /// Sweep one scenario field and emit CSV
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Field to sweep: pm, dn, nats, gm or gn
        #[arg(long, value_parser = parse_var)]
        var: SweepVar,
        /// First swept value (inclusive)
        #[arg(long)]
        from: f64,
        /// Last swept value (inclusive)
        #[arg(long)]
        to: f64,
        /// Number of evenly spaced points
        #[arg(long, default_value_t = 40)]
        steps: usize,
        /// Output CSV path (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the closed forms against a brute-force minimizer
    Verify {
        /// Number of random scenarios to check
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Seed of the scenario generator
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Maximum acceptable relative energy gap
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// Print the threshold ladder and chosen strategy for a scenario
    Regions {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
}

fn parse_var(token: &str) -> Result<SweepVar, String> {
    SweepVar::parse(token)
        .ok_or_else(|| format!("unknown sweep variable `{token}` (use pm, dn, nats, gm or gn)"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = match cli.command {
        Command::Solve { scenario, json } => run_solve(&scenario, json),
        Command::Sweep {
            scenario,
            var,
            from,
            to,
            steps,
            out,
        } => run_sweep_cmd(&scenario, var, from, to, steps, out.as_deref()),
        Command::Verify { trials, seed, tol } => run_verify(trials, seed, tol),
        Command::Regions { scenario } => run_regions(&scenario),
    };
    ExitCode::from(code)
}

fn run_solve(scenario: &ScenarioArgs, json: bool) -> u8 {
    let s = match scenario.build() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("invalid scenario: {e}");
            return 2;
        }
    };
    let point = sweep::evaluate(&s);
    let rendered = if json {
        format!("{}\n", solve_record(&point))
    } else {
        render_solve_text(&s, &point)
    };
    if io::stdout().write_all(rendered.as_bytes()).is_err() {
        return 3;
    }
    0
}

fn render_solve_text(s: &Scenario, point: &sweep::SolvedPoint) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "scenario: nats={} dm={} dn={} pm={} gm={} gn={}\n",
        fmt_float(s.n_nats()),
        fmt_float(s.d_m()),
        fmt_float(s.d_n()),
        fmt_float(s.p_m()),
        fmt_float(s.g_m()),
        fmt_float(s.g_n()),
    ));
    let th = feasibility_thresholds(s);
    out.push_str(&format!(
        "thresholds: theta1={} theta2={} theta3={} theta4={}\n",
        fmt_float(th.theta1),
        fmt_float(th.theta2),
        fmt_float(th.theta3),
        fmt_float(th.theta4),
    ));
    out.push_str(&format!("e_oma: {}\n", fmt_float(point.e_oma)));
    out.push_str(&format!("e_existing: {}\n", fmt_float(point.e_existing)));
    if point.e_lemma1.is_finite() {
        out.push_str(&format!("e_lemma1: {}\n", fmt_float(point.e_lemma1)));
    } else {
        match solve_lemma1(s).infeasible_reason() {
            Some(reason) => out.push_str(&format!("e_lemma1: inf ({reason})\n")),
            None => out.push_str("e_lemma1: inf\n"),
        }
    }
    out.push_str(&format!("e_hybrid: {}\n", fmt_float(point.e_hybrid)));
    out.push_str(&format!(
        "chosen: kind={} order={} p_n1={} p_n2={} t_n={}\n",
        point.chosen.kind,
        point.chosen.order,
        fmt_float(point.chosen.p_n1),
        fmt_float(point.chosen.p_n2),
        fmt_float(point.chosen.t_n),
    ));
    out
}

fn run_sweep_cmd(
    scenario: &ScenarioArgs,
    var: SweepVar,
    from: f64,
    to: f64,
    steps: usize,
    out: Option<&std::path::Path>,
) -> u8 {
    let base = match scenario.build_sweep_base(var) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("invalid base scenario: {e}");
            return 2;
        }
    };
    let spec = match SweepSpec::new(var, from, to, steps, base) {
        Ok(spec) => spec,
        Err(e) => {
            eprintln!("{e}");
            return 1;
        }
    };
    let rows = run_sweep(&spec);
    let result = match out {
        Some(path) => File::create(path).and_then(|mut f| emit_csv(&mut f, var, &rows)),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            emit_csv(&mut lock, var, &rows)
        }
    };
    if let Err(e) = result {
        eprintln!("cannot write sweep output: {e}");
        return 3;
    }
    0
}

fn run_verify(trials: u64, seed: u64, tol: f64) -> u8 {
    if trials == 0 {
        eprintln!("--trials must be at least 1");
        return 1;
    }
    if !tol.is_finite() || tol < 0.0 {
        eprintln!("--tol must be finite and nonnegative");
        return 1;
    }
    let report = run_campaign(&CampaignConfig {
        trials,
        seed,
        tol,
        oracle: OracleConfig::default(),
    });
    if io::stdout().write_all(report.render().as_bytes()).is_err() {
        return 3;
    }
    if report.pass() {
        0
    } else {
        4
    }
}

fn run_regions(scenario: &ScenarioArgs) -> u8 {
    let s = match scenario.build() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("invalid scenario: {e}");
            return 2;
        }
    };
    let th = feasibility_thresholds(&s);
    let band = lemma2_band(&s);
    let (kind, order) = strategy_region(&s);
    let mut out = String::new();
    out.push_str(&format!(
        "task: nats={} dm={} dn={}\n",
        fmt_float(s.n_nats()),
        fmt_float(s.d_m()),
        fmt_float(s.d_n()),
    ));
    out.push_str(&format!(
        "channel: gm={} gn={}\n",
        fmt_float(s.g_m()),
        fmt_float(s.g_n()),
    ));
    out.push_str(&format!(
        "received-power thresholds: theta1={} theta2={} theta3={} theta4={}\n",
        fmt_float(th.theta1),
        fmt_float(th.theta2),
        fmt_float(th.theta3),
        fmt_float(th.theta4),
    ));
    out.push_str(&format!(
        "pm breakpoints: theta1/gm={} theta2/gm={} theta3/gm={} theta4/gm={}\n",
        fmt_float(th.theta1 / s.g_m()),
        fmt_float(th.theta2 / s.g_m()),
        fmt_float(th.theta3 / s.g_m()),
        fmt_float(th.theta4 / s.g_m()),
    ));
    if band.applicable {
        out.push_str(&format!(
            "certified equal-power band (pm): [{}, {}]\n",
            fmt_float(band.lower_pm),
            fmt_float(band.upper_pm),
        ));
    } else {
        out.push_str("certified equal-power band (pm): none\n");
    }
    out.push_str(&format!(
        "at pm={} (x={}): kind={kind} order={order}\n",
        fmt_float(s.p_m()),
        fmt_float(s.um_received_power()),
    ));
    if io::stdout().write_all(out.as_bytes()).is_err() {
        return 3;
    }
    0
}
