use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gm_exponents::SolverPath;
use gm_exponents_cli::{emit, run, CliError, JobConfig, Mode, ScheduleConfig, WindowConfig};

#[derive(Parser, Debug)]
#[command(name = "gmexp", version, about = "Exact exponents of Gauss-Manin systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Test classes alpha for f in k[x, g^-1].
    ExponentTest {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: Option<String>,
        #[command(flatten)]
        alphas: AlphaArgs,
        #[command(flatten)]
        engine: EngineArgs,
        /// Write the first generic system as `row col num/den` triplets.
        #[arg(long)]
        dump_matrix: Option<PathBuf>,
    },
    /// Candidate sets, gcd check, determinant table and engine oracle for a weight tuple.
    Arrangement {
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<u32>,
        #[command(flatten)]
        alphas: AlphaArgs,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long, default_value_t = -3, allow_negative_numbers = true)]
        lmin: i64,
        #[arg(long, default_value_t = 3, allow_negative_numbers = true)]
        lmax: i64,
        #[arg(long, default_value_t = 0)]
        m: u64,
    },
    /// Family p - lambda^d q = 0 with denominators in r.
    Family {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        r: Option<String>,
        #[arg(long)]
        d: Option<u32>,
        #[command(flatten)]
        alphas: AlphaArgs,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Regular rank and rational exponents of sum t^i A_i(D).
    Univariate {
        /// `A0` in D, or the whole list `A0=...; A1=...`.
        #[arg(long = "A0")]
        a0: String,
        /// Higher coefficients as `i=EXPR`.
        #[arg(long, value_parser = parse_higher)]
        higher: Vec<(usize, String)>,
    },
    /// Invertibility and action of an operator expression on a window.
    OperatorCheck {
        #[arg(long)]
        operator: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        g: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        tmin: i64,
        #[arg(long, allow_negative_numbers = true)]
        tmax: i64,
        #[arg(long, default_value_t = 0)]
        xmax: u32,
        #[arg(long)]
        element: Option<String>,
    },
}

#[derive(Args, Debug)]
struct AlphaArgs {
    /// Classes to test, e.g. `1/2,1/3`.
    #[arg(long, alias = "alpha", value_delimiter = ',', allow_hyphen_values = true)]
    alphas: Vec<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PathArg {
    Auto,
    Generic,
    PerDegree,
}

#[derive(Args, Debug)]
struct EngineArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value_t = PathArg::Auto)]
    path: PathArg,
    /// Run without the rayon pool.
    #[arg(long)]
    sequential: bool,
    /// Also report interior Koszul cohomology on the last window used.
    #[arg(long)]
    koszul: bool,
    #[arg(long, default_value_t = 2)]
    t_start: i64,
    #[arg(long)]
    x_start: Option<u32>,
    #[arg(long, default_value_t = 2)]
    t_step: i64,
    #[arg(long, default_value_t = 3)]
    x_step: u32,
    #[arg(long, default_value_t = 4)]
    max_rounds: usize,
}

impl EngineArgs {
    fn apply(self, cfg: &mut JobConfig) {
        cfg.n = self.n;
        cfg.path = match self.path {
            PathArg::Auto => SolverPath::Auto,
            PathArg::Generic => SolverPath::Generic,
            PathArg::PerDegree => SolverPath::PerDegree,
        };
        cfg.sequential = self.sequential;
        cfg.koszul = self.koszul;
        cfg.schedule = ScheduleConfig {
            t_start: self.t_start,
            x_start: self.x_start,
            t_step: self.t_step,
            x_step: self.x_step,
            max_rounds: self.max_rounds,
        };
    }
}

fn parse_higher(s: &str) -> Result<(usize, String), String> {
    let (i, body) = s.split_once('=').ok_or("expected i=EXPR")?;
    let i: usize = i.trim().trim_start_matches('A').parse().map_err(|_| format!("bad index '{i}'"))?;
    Ok((i, body.to_string()))
}

fn config(cli: Cli) -> JobConfig {
    let mut cfg = match cli.command {
        Command::ExponentTest {
            f,
            g,
            alphas,
            engine,
            dump_matrix,
        } => {
            let mut cfg = JobConfig::new(Mode::ExponentTest);
            cfg.f = Some(f);
            cfg.g = g;
            cfg.alphas = alphas.alphas;
            cfg.dump_matrix = dump_matrix;
            engine.apply(&mut cfg);
            cfg
        }
        Command::Arrangement {
            weights,
            alphas,
            engine,
            lmin,
            lmax,
            m,
        } => {
            let mut cfg = JobConfig::new(Mode::Arrangement);
            cfg.weights = Some(weights);
            cfg.alphas = alphas.alphas;
            cfg.l_range = (lmin, lmax);
            cfg.m = m;
            engine.apply(&mut cfg);
            cfg
        }
        Command::Family {
            p,
            q,
            r,
            d,
            alphas,
            engine,
        } => {
            let mut cfg = JobConfig::new(Mode::Family);
            cfg.p = Some(p);
            cfg.q = q;
            cfg.r = r;
            cfg.d = d;
            cfg.alphas = alphas.alphas;
            engine.apply(&mut cfg);
            cfg
        }
        Command::Univariate { a0, higher } => {
            let mut cfg = JobConfig::new(Mode::Univariate);
            cfg.a0 = Some(a0);
            cfg.higher = higher.into_iter().collect();
            cfg
        }
        Command::OperatorCheck {
            operator,
            n,
            g,
            tmin,
            tmax,
            xmax,
            element,
        } => {
            let mut cfg = JobConfig::new(Mode::OperatorCheck);
            cfg.operator = Some(operator);
            cfg.n = n;
            cfg.g = g;
            cfg.window = Some(WindowConfig { tmin, tmax, xmax });
            cfg.element = element;
            cfg
        }
    };
    cfg.output = cli.output;
    cfg
}

fn main() -> ExitCode {
    let cfg = config(Cli::parse());
    let outcome = run(&cfg).and_then(|report| emit(&cfg, &report));
    match outcome {
        Ok(Some(text)) => {
            // a closed pipe (e.g. `| head`) is not an error worth reporting
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gmexp: {e}");
            ExitCode::from(exit_byte(&e))
        }
    }
}

fn exit_byte(e: &CliError) -> u8 {
    e.exit_code() as u8
}
