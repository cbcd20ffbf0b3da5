//! Command-line surface for the code-chain library: one binary, four
//! subcommands, exit code 0 on success, 2 on usage or validation problems,
//! 3 when a decode gives up. Human tables go to stdout; machine CSV goes
//! behind `-o`.

pub mod tables;

use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use bchchain::bandwidth::{
    bandwidth_table, default_label, format_khz, parse_decimal_ratio, published_reference,
    LinkBudget, ModulationScheme,
};
use bchchain::binpoly::BinPolynomial;
use bchchain::chain::{embed_bch, project_bch, ChainCode, Rate};
use bchchain::codec::{ChainDecoder, SyndromeDecoder};
use bchchain::gf2m::PrimitivePolynomial;
use bchchain::interweave::{events_to_csv, metrics_to_text, run_simulation, SimConfig};
use bchchain::{BchCode, BitVector, CyclicCode, Error};

use tables::{Align, BandwidthLine, ChainRow};

#[derive(Parser)]
#[command(
    name = "bchchain",
    version,
    about = "Cyclic code chains grown from a BCH seed: construction, decoding, \
             bandwidth planning, and an interweave channel-sharing simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Print a seed code and its derived chain
    Chain(ChainArgs),
    /// Decode a received word, directly or through a derived level
    Decode(DecodeArgs),
    /// Occupied bandwidth per level under one or more modulation schemes
    Bandwidth(BandwidthArgs),
    /// Run the time-slotted channel-sharing scenario from a config file
    Simulate(SimulateArgs),
}

#[derive(Args)]
pub struct ChainArgs {
    /// Field degree; the seed length is 2^s - 1
    #[arg(short = 's', long = "degree")]
    pub s: usize,
    /// First exponent of the designed root run
    #[arg(short = 'c', long = "offset", default_value_t = 1)]
    pub c: usize,
    /// Designed distance of the seed
    #[arg(short = 'd', long = "delta")]
    pub delta: usize,
    /// Deepest derived level to list
    #[arg(short = 'j', long = "levels", default_value_t = 4)]
    pub levels: usize,
    /// Primitive polynomial as coefficient bits, decimal or 0x-hex
    #[arg(long)]
    pub prim: Option<String>,
    /// Add the exact rate column to the printed table
    #[arg(long)]
    pub rates: bool,
    /// Derived-length ceiling override, for construction-only use
    #[arg(long, value_name = "N")]
    pub length_bound: Option<usize>,
    /// Write the table as CSV to this path
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct DecodeArgs {
    /// Code selector like s=2,c=1,d=3 with an optional p= primitive
    #[arg(long)]
    pub bch: String,
    /// Lift to this derived level, decode there, project back
    #[arg(long, value_name = "LEVEL")]
    pub via_chain: Option<usize>,
    /// Cap the syndrome table at this leader weight
    #[arg(long, value_name = "WEIGHT")]
    pub max_weight: Option<usize>,
    /// Received word as a bit-string, coefficient 0 first
    pub word: String,
    /// Write the report as field,value CSV to this path
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct BandwidthArgs {
    /// Field degree; the seed length is 2^s - 1
    #[arg(short = 's', long = "degree")]
    pub s: usize,
    /// First exponent of the designed root run
    #[arg(short = 'c', long = "offset", default_value_t = 1)]
    pub c: usize,
    /// Designed distance of the seed
    #[arg(short = 'd', long = "delta")]
    pub delta: usize,
    /// Deepest derived level to tabulate
    #[arg(short = 'j', long = "levels", default_value_t = 4)]
    pub levels: usize,
    /// Source data rate in kbit/s, decimal
    #[arg(long, default_value = "64")]
    pub ru: String,
    /// Bandwidth expansion factor, decimal
    #[arg(long, default_value = "1")]
    pub w: String,
    /// Bits per symbol, comma-separated list
    #[arg(short = 'm', long = "m", default_value = "1")]
    pub m: String,
    /// Scheme labels overriding the defaults, one per m entry
    #[arg(long)]
    pub labels: Option<String>,
    /// Show previously reported figures beside the computed ones
    #[arg(long = "paper-values")]
    pub paper_values: bool,
    /// Write the table as CSV to this path
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Scenario file, flat key = value lines
    #[arg(long)]
    pub config: PathBuf,
    /// Override the rng_seed key; the run's only entropy source
    #[arg(long)]
    pub seed: Option<u64>,
    /// Print metrics as one JSON object instead of key=value lines
    #[arg(long)]
    pub json: bool,
    /// Write the slot event log as CSV to this path
    #[arg(short = 'o', long, value_name = "EVENTS")]
    pub output: Option<PathBuf>,
}

/// What to print on stderr and which code to exit with.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::UnknownSyndrome(_) | Error::NonEmbeddedSupport(_) => 3,
            _ => 2,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

/// Run one parsed invocation, returning what belongs on stdout.
pub fn run(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::Chain(args) => cmd_chain(args),
        Command::Decode(args) => cmd_decode(args),
        Command::Bandwidth(args) => cmd_bandwidth(args),
        Command::Simulate(args) => cmd_simulate(args),
    }
}

fn parse_prim_bits(text: &str) -> Result<u64, Failure> {
    let parsed = match text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => text.parse::<u64>(),
    };
    parsed.map_err(|_| {
        Failure::usage(format!(
            "bad primitive polynomial {:?}, want coefficient bits as decimal or 0x-hex",
            text
        ))
    })
}

fn prim_from_bits(bits: u64) -> Result<PrimitivePolynomial, Failure> {
    let exponents: Vec<usize> = (0..64).filter(|i| bits >> i & 1 == 1).collect();
    PrimitivePolynomial::new(BinPolynomial::from_exponents(&exponents)).map_err(Failure::from)
}

fn build_seed(
    s: usize,
    c: usize,
    delta: usize,
    prim: Option<PrimitivePolynomial>,
) -> Result<BchCode, Failure> {
    BchCode::new(s, c, delta, prim).map_err(|err| match err {
        Error::DeltaOutOfRange { .. } => Failure::usage(format!("delta out of range: {}", err)),
        other => Failure::from(other),
    })
}

fn write_machine_output(path: &PathBuf, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .map_err(|err| Failure::usage(format!("cannot write {}: {}", path.display(), err)))
}

fn fraction(value: Rate) -> String {
    if *value.denom() == 1 {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

fn cmd_chain(args: &ChainArgs) -> Result<String, Failure> {
    let prim = match args.prim.as_deref() {
        Some(text) => Some(prim_from_bits(parse_prim_bits(text)?)?),
        None => None,
    };
    let seed = build_seed(args.s, args.c, args.delta, prim)?;
    let mut rows = vec![ChainRow {
        level: 0,
        length: seed.n(),
        dimension: seed.k(),
        rate: (seed.k() as u64, seed.n() as u64),
        generator: seed.generator().to_string(),
    }];
    for level in 1..=args.levels {
        let chain = match args.length_bound {
            Some(bound) => ChainCode::derive_with_bound(&seed, level, Some(bound)),
            None => ChainCode::derive(&seed, level),
        }
        .map_err(Failure::from)?;
        let rate = chain.rate();
        rows.push(ChainRow {
            level,
            length: chain.length(),
            dimension: chain.dimension(),
            rate: (*rate.numer(), *rate.denom()),
            generator: chain.generator().to_string(),
        });
    }

    if let Some(path) = &args.output {
        write_machine_output(path, &tables::chain_csv(&rows))?;
    }

    let mut header = vec!["level", "length", "dimension"];
    let mut aligns = vec![Align::Right, Align::Right, Align::Right];
    if args.rates {
        header.push("rate");
        aligns.push(Align::Right);
    }
    header.push("generator");
    aligns.push(Align::Left);
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            let mut line = vec![
                row.level.to_string(),
                row.length.to_string(),
                row.dimension.to_string(),
            ];
            if args.rates {
                line.push(format!("{}/{}", row.rate.0, row.rate.1));
            }
            line.push(row.generator.clone());
            line
        })
        .collect();
    Ok(tables::render_aligned(&header, &aligns, &cells))
}

fn parse_selector(text: &str) -> Result<(usize, usize, usize, Option<u64>), Failure> {
    let mut s = None;
    let mut c = 1usize;
    let mut delta = None;
    let mut prim = None;
    for part in text.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("selector part {:?} is not key=value", part)))?;
        let value = value.trim();
        let number = |what: &str| {
            value
                .parse::<usize>()
                .map_err(|_| Failure::usage(format!("selector {}={:?} is not a number", what, value)))
        };
        match key.trim() {
            "s" => s = Some(number("s")?),
            "c" => c = number("c")?,
            "d" => delta = Some(number("d")?),
            "p" => prim = Some(parse_prim_bits(value)?),
            other => {
                return Err(Failure::usage(format!(
                    "unknown selector key {:?}, expected s, c, d, or p",
                    other
                )))
            }
        }
    }
    let s = s.ok_or_else(|| Failure::usage("selector is missing s="))?;
    let delta = delta.ok_or_else(|| Failure::usage("selector is missing d="))?;
    Ok((s, c, delta, prim))
}

fn cmd_decode(args: &DecodeArgs) -> Result<String, Failure> {
    let (s, c, delta, prim_bits) = parse_selector(&args.bch)?;
    let prim = prim_bits.map(prim_from_bits).transpose()?;
    let seed = build_seed(s, c, delta, prim)?;
    let word = BitVector::from_str(&args.word).map_err(Failure::from)?;

    let mut fields: Vec<(&str, String)> = vec![("received", word.to_string())];
    match args.via_chain {
        None => {
            let decoder = match args.max_weight {
                Some(weight) => SyndromeDecoder::with_max_weight(&seed, weight),
                None => SyndromeDecoder::build(&seed),
            }
            .map_err(Failure::from)?;
            let syndrome = decoder.syndrome(&word).map_err(Failure::from)?;
            let leader = decoder
                .table()
                .leader(&syndrome)
                .cloned()
                .ok_or_else(|| Failure::from(Error::UnknownSyndrome(syndrome.to_string())))?;
            let corrected = word.xor(&leader);
            fields.push(("syndrome", syndrome.to_string()));
            fields.push(("leader", leader.to_string()));
            fields.push(("corrected", corrected.to_string()));
            let message = seed.extract_message(&corrected).map_err(Failure::from)?;
            fields.push(("message", message.to_string()));
        }
        Some(level) => {
            let chain = seed.derive(level).map_err(Failure::from)?;
            let decoder = match args.max_weight {
                Some(weight) => ChainDecoder::with_max_weight(&chain, weight),
                None => ChainDecoder::new(&chain),
            }
            .map_err(Failure::from)?;
            let lifted = embed_bch(&word, &chain).map_err(Failure::from)?;
            let syndrome = decoder.decoder().syndrome(&lifted).map_err(Failure::from)?;
            let leader = decoder
                .decoder()
                .table()
                .leader(&syndrome)
                .cloned()
                .ok_or_else(|| Failure::from(Error::UnknownSyndrome(syndrome.to_string())))?;
            let corrected = lifted.xor(&leader);
            let projected = project_bch(&corrected, &chain).map_err(Failure::from)?;
            fields.push(("lifted", lifted.to_string()));
            fields.push(("syndrome", syndrome.to_string()));
            fields.push(("leader", leader.to_string()));
            fields.push(("corrected", corrected.to_string()));
            fields.push(("projected", projected.to_string()));
            let message = seed.extract_message(&projected).map_err(Failure::from)?;
            fields.push(("message", message.to_string()));
        }
    }

    if let Some(path) = &args.output {
        write_machine_output(path, &tables::report_csv(&fields))?;
    }
    Ok(tables::render_report(&fields))
}

fn cmd_bandwidth(args: &BandwidthArgs) -> Result<String, Failure> {
    let seed = build_seed(args.s, args.c, args.delta, None)?;
    let budget = LinkBudget::new(
        parse_decimal_ratio(&args.ru).map_err(Failure::from)?,
        parse_decimal_ratio(&args.w).map_err(Failure::from)?,
    )
    .map_err(Failure::from)?;

    let bits: Vec<u64> = args
        .m
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<u64>()
                .map_err(|_| Failure::usage(format!("bad bits-per-symbol entry {:?}", part)))
        })
        .collect::<Result<_, _>>()?;
    let labels: Option<Vec<String>> = args
        .labels
        .as_deref()
        .map(|text| text.split(',').map(|s| s.trim().to_string()).collect());
    if let Some(list) = &labels {
        if list.len() != bits.len() {
            return Err(Failure::usage(format!(
                "{} labels given for {} schemes",
                list.len(),
                bits.len()
            )));
        }
    }
    let schemes: Vec<ModulationScheme> = bits
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let label = match &labels {
                Some(list) => list[i].clone(),
                None => default_label(m),
            };
            ModulationScheme::new(m, label)
        })
        .collect::<Result<_, _>>()
        .map_err(Failure::from)?;

    let table = bandwidth_table(&seed, args.levels, &budget, &schemes).map_err(Failure::from)?;
    let saving = match table.get(1) {
        Some(row) => fraction(row.occupied_fraction),
        None => "1".to_string(),
    };
    let lines: Vec<BandwidthLine> = schemes
        .iter()
        .enumerate()
        .map(|(i, scheme)| BandwidthLine {
            label: scheme.label().to_string(),
            m: scheme.bits_per_symbol(),
            bands: table.iter().map(|row| format_khz(row.bands_khz[i])).collect(),
            saving: saving.clone(),
        })
        .collect();

    if let Some(path) = &args.output {
        write_machine_output(path, &tables::bandwidth_csv(args.levels, &lines))?;
    }

    let mut header: Vec<String> = vec!["label".into(), "m".into()];
    let mut aligns = vec![Align::Left, Align::Right];
    for level in 0..=args.levels {
        header.push(format!("W{}", level));
        aligns.push(Align::Right);
    }
    header.push("saving".into());
    aligns.push(Align::Right);
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let cells: Vec<Vec<String>> = lines
        .iter()
        .map(|line| {
            let mut row = vec![line.label.clone(), line.m.to_string()];
            row.extend(line.bands.iter().cloned());
            row.push(line.saving.clone());
            row
        })
        .collect();
    let mut out = tables::render_aligned(&header_refs, &aligns, &cells);

    if args.paper_values {
        let mut any = false;
        for scheme in &schemes {
            if let Some((own, chain)) = published_reference(&seed, &budget, scheme) {
                out.push_str(&format!(
                    "previously reported ({}): W0 {}, chain levels {}\n",
                    scheme.label(),
                    own,
                    chain
                ));
                any = true;
            }
        }
        if !any {
            out.push_str("no previously reported figures for this configuration\n");
        }
    }
    Ok(out)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<String, Failure> {
    let text = fs::read_to_string(&args.config).map_err(|err| {
        Failure::usage(format!("cannot read {}: {}", args.config.display(), err))
    })?;
    let mut config = SimConfig::from_text(&text, args.config.parent()).map_err(Failure::from)?;
    if let Some(seed) = args.seed {
        config.rng_seed = seed;
    }
    let (metrics, events) = run_simulation(&config).map_err(Failure::from)?;
    if let Some(path) = &args.output {
        write_machine_output(path, &events_to_csv(&events))?;
    }
    if args.json {
        let mut body = serde_json::to_string_pretty(&metrics).expect("metrics serialize");
        body.push('\n');
        Ok(body)
    } else {
        Ok(metrics_to_text(&metrics))
    }
}
