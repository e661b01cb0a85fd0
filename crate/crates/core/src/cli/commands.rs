//! Command-line surface.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::{ScenarioConfig, SHIPPED_SCENARIOS};
use super::run::{run_scenario, summary_csv, summary_rows, vstar_check, RunOverrides, ScenarioOutcome, SUMMARY_HEADER};
use crate::error::{Error, Result};
use crate::exec::{with_jobs, Execution};
use crate::mixing::{markov_phi_bound, phi_dependence, ChainLaw};
use crate::processes::MarkovArmSpec;
use crate::regret::{
    gaussian_plus_bounds, lemma1_bias_bound, prop2_bias_bound, prop3_gap_bound, prop4_bound, prop5_bound,
    theorem2_bound, Environment,
};

#[derive(Debug, Parser)]
#[command(
    name = "mixbandit",
    version,
    about = "Bandits on dependent pay-off processes: simulation, oracles and bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario and write trace.csv, summary.csv and manifest.json.
    Run(RunArgs),
    /// Run every shipped scenario and print each comparison.
    RunAllAcceptance(AllArgs),
    /// List the shipped scenarios, or print one of them.
    Scenarios { name: Option<String> },
    /// Exact single-coordinate φ of the two-state chain next to (1−2ε)^gap.
    MixingTable {
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        max_gap: usize,
    },
    /// Evaluate a closed-form bound.
    Bound {
        #[command(subcommand)]
        bound: BoundCommand,
    },
    /// Exhaustive optimal value on a micro instance.
    Vstar(VstarArgs),
}

#[derive(Debug, Args)]
pub struct ExecArgs {
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Run everything on the calling thread.
    #[arg(long)]
    pub sequential: bool,
}

impl ExecArgs {
    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Scenario file, or the name of a shipped scenario.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub exec: ExecArgs,
}

#[derive(Debug, Args)]
pub struct AllArgs {
    /// Each scenario writes into a subdirectory named after it.
    #[arg(long, default_value = "acceptance-out")]
    pub out: PathBuf,
    #[arg(long)]
    pub runs: Option<usize>,
    #[command(flatten)]
    pub exec: ExecArgs,
}

#[derive(Debug, Subcommand)]
pub enum BoundCommand {
    /// Σ 32(1+8ϑ) ln n/Δ_i + (1+2π²/3) ΣΔ_i + ϑ log₂ n
    Theorem2 {
        #[arg(long)]
        n: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        gaps: Vec<f64>,
        #[arg(long)]
        theta: f64,
    },
    /// 2cφ_ℓ
    Prop2 {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        phi: f64,
    },
    /// 2nφ₁
    Prop3 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        phi1: f64,
    },
    /// 2ϑ/m
    Lemma1 {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        theta: f64,
    },
    /// Σ Δ_j E T_j + 2k (Σ_{l=0}^n φ_l) log₂ n
    Prop4 {
        #[arg(long, value_delimiter = ',', required = true)]
        gaps: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        counts: Vec<f64>,
        #[arg(long)]
        phi_total: f64,
        #[arg(long)]
        n: usize,
    },
    /// Hindsight-regret bound of the Gaussian switching policy.
    Prop5 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m_star: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        alpha: f64,
    },
    /// Plus-part expectations of N(Δ, σ²) and their four inequalities.
    Gaussian {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        sigma: f64,
    },
}

#[derive(Debug, Args)]
pub struct VstarArgs {
    /// Take the arms from a scenario (file or shipped name) instead.
    #[arg(long, conflicts_with = "epsilon")]
    pub config: Option<PathBuf>,
    /// Flip probability shared by identical two-state arms with pay-offs (1, 0).
    #[arg(long, required_unless_present = "config")]
    pub epsilon: Option<f64>,
    #[arg(long, default_value_t = 2)]
    pub arms: usize,
    /// Horizon; defaults to the scenario's.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = crate::policies::VSTAR_DEFAULT_GUARD)]
    pub guard: u128,
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

/// Rounds to 12 decimals so exact oracle values print cleanly.
fn tidy(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

pub fn mixing_table(epsilon: f64, max_gap: usize) -> Result<String> {
    let law = ChainLaw::two_state(epsilon)?;
    let mut out = String::from("gap,exact,bound\n");
    for gap in 1..=max_gap {
        let exact = phi_dependence(&law.pair_distribution(gap)?)?;
        out.push_str(&format!(
            "{gap},{},{}\n",
            tidy(exact),
            tidy(markov_phi_bound(epsilon, gap))
        ));
    }
    Ok(out)
}

pub fn bound_report(cmd: &BoundCommand) -> Result<String> {
    let (name, inputs, value) = match cmd {
        BoundCommand::Theorem2 { n, gaps, theta } => (
            "theorem2",
            format!("n={n} gaps={} theta={theta}", join(gaps)),
            theorem2_bound(*n, gaps, *theta)?,
        ),
        BoundCommand::Prop2 { c, phi } => ("prop2", format!("c={c} phi={phi}"), prop2_bias_bound(*c, *phi)),
        BoundCommand::Prop3 { n, phi1 } => ("prop3", format!("n={n} phi1={phi1}"), prop3_gap_bound(*n, *phi1)),
        BoundCommand::Lemma1 { m, theta } => ("lemma1", format!("m={m} theta={theta}"), lemma1_bias_bound(*m, *theta)?),
        BoundCommand::Prop4 {
            gaps,
            counts,
            phi_total,
            n,
        } => (
            "prop4",
            format!(
                "gaps={} counts={} phi_total={phi_total} n={n}",
                join(gaps),
                join(counts)
            ),
            prop4_bound(gaps, counts, *phi_total, *n)?,
        ),
        BoundCommand::Prop5 {
            n,
            m_star,
            k,
            delta,
            c,
            alpha,
        } => (
            "prop5",
            format!("n={n} m_star={m_star} k={k} delta={delta} c={c} alpha={alpha}"),
            prop5_bound(*n, *m_star, *k, *delta, *c, *alpha)?,
        ),
        BoundCommand::Gaussian { delta, sigma } => {
            let r = gaussian_plus_bounds(*delta, *sigma)?;
            return Ok(format!(
                "bound: gaussian\ninputs: delta={delta} sigma={sigma}\nE(X-Y)+: {}\nE(Y-X)+: {}\nsigma*pdf: {}\nmin margin: {:e}\npass: {}\n",
                r.upper_plus,
                r.lower_plus,
                sigma * r.terms.phi_density,
                r.min_margin,
                r.passes(1e-12)
            ));
        }
    };
    Ok(format!("bound: {name}\ninputs: {inputs}\nvalue: {value}\n"))
}

pub fn vstar_report(args: &VstarArgs) -> Result<String> {
    let (specs, n) = match (&args.config, args.epsilon) {
        (Some(path), _) => {
            let (config, _) = ScenarioConfig::load(path)?;
            match config.environment()? {
                Environment::Markov(specs) => (specs, args.n.unwrap_or(config.horizon)),
                Environment::Gaussian(_) => {
                    return Err(Error::config("vstar needs a markov or deterministic environment"))
                }
            }
        }
        (None, Some(eps)) => {
            let n = args.n.ok_or_else(|| Error::config("--n is required with --epsilon"))?;
            (vec![MarkovArmSpec::two_state(eps, [1.0, 0.0])?; args.arms], n)
        }
        (None, None) => return Err(Error::config("give either --config or --epsilon")),
    };
    let check = vstar_check(&specs, n, args.guard)?;
    let mut out = format!(
        "n: {}\npolicies: {}\nvstar: {}\nn*mu_star: {}\nexcess: {}\njoint phi_1: {}\nbound 2*n*phi_1: {}\nholds: {}\n",
        check.horizon,
        check.policies,
        check.value,
        check.n_mu_star,
        check.excess,
        tidy(check.phi_1),
        tidy(check.bound),
        check.holds(1e-9)
    );
    if let Some(eps) = specs[0]
        .epsilon()
        .filter(|_| specs.iter().all(|s| s.epsilon() == specs[0].epsilon()))
    {
        let single = tidy(markov_phi_bound(eps, 1) / 2.0);
        out.push_str(&format!(
            "single-chain phi_1: {single}\nbound with single-chain phi_1: {}\n",
            tidy(prop3_gap_bound(n, single))
        ));
    }
    Ok(out)
}

fn check_line(label: &str, pass: bool, detail: String) -> String {
    format!("{} {label}: {detail}\n", if pass { "PASS" } else { "FAIL" })
}

/// Runs the shipped scenarios and renders the summary rows plus one verdict
/// per comparison.
pub fn run_all(args: &AllArgs) -> Result<String> {
    let mut outcomes: Vec<ScenarioOutcome> = Vec::new();
    for (name, text) in SHIPPED_SCENARIOS {
        let config = ScenarioConfig::parse(text, name)?;
        let overrides = RunOverrides {
            runs: args.runs,
            seed: None,
            out: Some(args.out.join(name)),
            execution: args.exec.execution(),
        };
        outcomes.push(run_scenario(&config, text, &overrides)?);
    }
    let mut out = format!("{SUMMARY_HEADER}\n");
    for o in &outcomes {
        for row in summary_rows(o) {
            out.push_str(&row);
            out.push('\n');
        }
    }
    for o in &outcomes {
        let r = &o.report;
        if let Some(v) = &o.vstar {
            out += &check_line(
                &r.scenario,
                v.holds(1e-9),
                format!("v* - n mu* = {} <= 2 n phi_1 = {}", v.excess, v.bound),
            );
        }
        if let Some(b) = r.bound("theorem2") {
            out += &check_line(
                &r.scenario,
                r.regret_bar.mean <= b + 3.0 * r.regret_bar.se,
                format!(
                    "regret_bar = {} (se {}) vs theorem2 = {b}",
                    r.regret_bar.mean, r.regret_bar.se
                ),
            );
        }
        if let Some(c) = &o.coupling {
            out += &check_line(
                &r.scenario,
                c.estimate.mean >= 0.8,
                format!(
                    "E(X_tau_{} | X_1 = 1) = {} (se {}, {} paths) vs 0.8",
                    c.sample_index, c.estimate.mean, c.estimate.se, c.estimate.count
                ),
            );
        }
    }
    let find = |name: &str| outcomes.iter().find(|o| o.report.scenario == name);
    if let (Some(gp), Some(best)) = (find("gp_switch_strong"), find("gp_best_arm_strong")) {
        let (a, b) = (gp.report.regret_plus, best.report.regret_plus);
        let se = a.combined_se(&b);
        out += &check_line(
            "gp_switch_vs_best_arm",
            b.mean - a.mean >= 3.0 * se,
            format!("regret_plus {} vs {} (combined se {se})", a.mean, b.mean),
        );
    }
    Ok(out)
}

/// Dispatches a parsed command line, writing human output to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let text = match cli.command {
        Command::Run(args) => {
            let (config, source) = ScenarioConfig::load(&args.config)?;
            let overrides = RunOverrides {
                runs: args.runs,
                seed: args.seed,
                out: args.out.clone(),
                execution: args.exec.execution(),
            };
            let outcome = with_jobs(args.exec.jobs, || run_scenario(&config, &source, &overrides))?;
            summary_csv(&outcome)
        }
        Command::RunAllAcceptance(args) => with_jobs(args.exec.jobs, || run_all(&args))?,
        Command::Scenarios { name: None } => SHIPPED_SCENARIOS.iter().map(|(n, _)| format!("{n}\n")).collect(),
        Command::Scenarios { name: Some(name) } => super::config::shipped_scenario(&name)
            .ok_or_else(|| Error::config(format!("no shipped scenario named `{name}`")))?
            .to_string(),
        Command::MixingTable { epsilon, max_gap } => mixing_table(epsilon, max_gap)?,
        Command::Bound { bound } => bound_report(&bound)?,
        Command::Vstar(args) => vstar_report(&args)?,
    };
    out.write_all(text.as_bytes())?;
    Ok(())
}
