//! Command-line front end: prices, figure curves, Monte Carlo audits and
//! log-return bounds.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use relbs::io::{self, fmt_f64, max_log_return, run_curve, CurveKind, CurveParams, Format, Grid, PriceSeries};
use relbs::mc::McConfig;
use relbs::pricer::{self, bs_price, telegraph_price};
use relbs::quad::QuadConfig;
use relbs::{Error, MarketParams, OptionKind, OptionSpec};

#[derive(Parser)]
#[command(name = "relbs", version, about = "Option pricing with a bounded log-price speed")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Price one option by Black-Scholes, quadrature and the corrected closed form.
    Price {
        #[command(flatten)]
        market: MarketArgs,
        #[arg(long, allow_negative_numbers = true, default_value_t = 100.0)]
        strike: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Black-Scholes minus telegraph price across strikes.
    PriceDiff(CurveArgs),
    /// Put-call parity gap of telegraph prices across strikes.
    Parity(CurveArgs),
    /// Implied volatility of telegraph prices across strikes.
    Smile(CurveArgs),
    /// Continuous telegraph density across log-prices.
    Density {
        #[command(flatten)]
        market: MarketArgs,
        /// Log-price range LO:HI (default: 1.2 times the light cone).
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        x_range: Option<(f64, f64)>,
        #[arg(long, default_value_t = 241)]
        grid: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// First-order implied volatility across strikes.
    IvCorrection(CurveArgs),
    /// Monte Carlo price next to the quadrature price (JSON).
    Mc {
        #[command(flatten)]
        market: MarketArgs,
        #[arg(long, allow_negative_numbers = true, default_value_t = 100.0)]
        strike: f64,
        #[arg(long, default_value_t = 1_000_000)]
        paths: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        antithetic: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest absolute close-to-close log-return in a date,close CSV.
    Bounds {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Args)]
struct MarketArgs {
    #[arg(long, allow_negative_numbers = true, default_value_t = 100.0)]
    spot: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.05)]
    rate: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.15)]
    sigma: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.5)]
    tau: f64,
    /// Maximal log-price speed.
    #[arg(long, allow_negative_numbers = true, default_value_t = 10.0)]
    cm: f64,
    #[arg(long, value_enum, default_value_t = KindArg::Call)]
    kind: KindArg,
    /// Relative quadrature tolerance.
    #[arg(long, allow_negative_numbers = true, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    market: MarketArgs,
    /// Strike range LO:HI.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true, default_value = "50:150")]
    strike_range: (f64, f64),
    /// Number of grid points, ends included.
    #[arg(long, default_value_t = 101)]
    grid: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct OutArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum KindArg {
    Call,
    Put,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or("expected LO:HI")?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(format!("{s} is not an increasing finite range"));
    }
    Ok((lo, hi))
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { .. } | Error::Input(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl MarketArgs {
    fn market(&self) -> Result<MarketParams, Failure> {
        Ok(MarketParams::new(self.spot, self.rate, self.sigma, self.tau)?)
    }

    fn kind(&self) -> OptionKind {
        match self.kind {
            KindArg::Call => OptionKind::Call,
            KindArg::Put => OptionKind::Put,
        }
    }

    fn quad(&self) -> Result<QuadConfig, Failure> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Failure::Usage(format!("--tol {} must be positive", self.tol)));
        }
        Ok(QuadConfig {
            rel_tol: self.tol,
            ..QuadConfig::default()
        })
    }

    fn curve_params(&self) -> Result<CurveParams, Failure> {
        Ok(CurveParams {
            market: self.market()?,
            c_m: self.cm,
            kind: self.kind(),
            quad: self.quad()?,
        })
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn curve(kind: CurveKind, params: CurveParams, grid: Grid, out: &OutArgs) -> Result<(), Failure> {
    let c = run_curve(kind, &params, &grid)?;
    let text = match out.format {
        Format::Csv => c.to_csv(),
        Format::Json => c.to_json() + "\n",
    };
    emit(&text, &out.out)
}

fn strike_curve(kind: CurveKind, a: &CurveArgs) -> Result<(), Failure> {
    let grid = Grid::new(a.strike_range.0, a.strike_range.1, a.grid)?;
    curve(kind, a.market.curve_params()?, grid, &a.out)
}

fn price(market: &MarketArgs, strike: f64, out: &OutArgs) -> Result<(), Failure> {
    let m = market.market()?;
    let opt = OptionSpec::new(market.kind(), strike)?;
    let bs = bs_price(&m, &opt)?;
    let tele = telegraph_price(&m, &opt, market.cm, &market.quad()?)?;
    let corrected = pricer::corrected_price(&m, &opt, market.cm)?;
    let rows = [
        ("black_scholes", bs),
        ("telegraph", tele.total),
        ("telegraph_atoms", tele.atom_contribution),
        ("telegraph_continuous", tele.continuous_contribution),
        ("telegraph_quad_error", tele.quad_error),
        ("corrected", corrected),
    ];
    let text = match out.format {
        Format::Csv => {
            let mut s = String::from("quantity,value\n");
            for (k, v) in rows {
                s.push_str(&format!("{k},{}\n", fmt_f64(v)));
            }
            s
        }
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> =
                rows.iter().map(|(k, v)| (k.to_string(), serde_json::json!(v))).collect();
            serde_json::to_string_pretty(&map).expect("serialises") + "\n"
        }
    };
    emit(&text, &out.out)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Price { market, strike, out } => price(&market, strike, &out),
        Command::PriceDiff(a) => strike_curve(CurveKind::PriceDiff, &a),
        Command::Parity(a) => strike_curve(CurveKind::Parity, &a),
        Command::Smile(a) => strike_curve(CurveKind::Smile, &a),
        Command::IvCorrection(a) => strike_curve(CurveKind::IvCorrection, &a),
        Command::Density {
            market,
            x_range,
            grid,
            out,
        } => {
            let half = 1.2 * market.cm * market.tau;
            let (lo, hi) = x_range.unwrap_or((-half, half));
            curve(CurveKind::Density, market.curve_params()?, Grid::new(lo, hi, grid)?, &out)
        }
        Command::Mc {
            market,
            strike,
            paths,
            seed,
            antithetic,
            out,
        } => {
            let m = market.market()?;
            let opt = OptionSpec::new(market.kind(), strike)?;
            let cfg = McConfig {
                n_paths: paths,
                seed,
                antithetic,
            };
            let report = io::mc_report(&m, &opt, market.cm, &cfg, &market.quad()?)?;
            emit(&(report.to_json() + "\n"), &out)
        }
        Command::Bounds { input, out, format } => {
            let series = PriceSeries::from_path(&input)?;
            let r = max_log_return(&series)?;
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&r).expect("serialises") + "\n",
                Format::Csv => format!(
                    "at_date,move_from,move_to,log_return,max_abs_log_return\n{},{},{},{},{}\n",
                    r.at_date,
                    fmt_f64(r.move_from),
                    fmt_f64(r.move_to),
                    fmt_f64(r.log_return),
                    fmt_f64(r.max_abs_log_return)
                ),
            };
            emit(&text, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("RELBS_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                // Only fails if a pool already exists, which cannot happen here.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: RELBS_THREADS={v:?} is not a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
