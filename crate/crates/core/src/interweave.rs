//! Time-slotted interweave spectrum-access simulator.
//!
//! `j0` licensed channels each carry one level of the derived chain; channel
//! `j` hosts primary user `j` whose codewords live in the level-`j` code. One
//! more user owns a wider private band and runs the seed code. Whenever
//! sensing reports a licensed channel vacant, that user plants its seed
//! codewords into the channel's code through the embedding and rides along
//! as a secondary at the narrower bandwidth; otherwise it falls back to its
//! own band. Every transmission crosses a binary symmetric channel and is
//! syndrome-decoded on arrival, and every slot is logged.
//!
//! Reproducibility contract: one ChaCha8 stream seeded from `rng_seed`, drawn
//! in a fixed order. First the whole occupancy matrix (slot-major, channels
//! ascending), then one sensing draw per slot and channel, then per slot one
//! traffic draw, the active primaries' message and noise bits (channels
//! ascending), and finally the fallback user's message and noise bits.

use std::collections::HashMap;
use std::path::Path;

use num_rational::Ratio;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bandwidth::{required_bandwidth, LinkBudget, ModulationScheme};
use crate::bch::BchCode;
use crate::binpoly::BinPolynomial;
use crate::bits::BitVector;
use crate::chain::{embed_bch, ChainCode};
use crate::code::CyclicCode;
use crate::codec::{
    encode_systematic, extract_message, parity_check_matrix, ChainDecoder, SyndromeDecoder,
    SyndromeTable,
};
use crate::gf2m::PrimitivePolynomial;
use crate::{Error, Result};

/// Syndrome tables are built to completion up to this many check bits;
/// larger codes get a bounded-weight table instead.
pub const COMPLETE_TABLE_REDUNDANCY: usize = 16;

/// Cap on error patterns enumerated while building a bounded table.
const ENUMERATION_BUDGET: u128 = 20_000_000;

/// Channel occupancy: per-channel activity probabilities, or explicit
/// per-slot traces indexed `[slot][channel - 1]`.
#[derive(Clone, Debug, PartialEq)]
pub enum Occupancy {
    Bernoulli(Vec<f64>),
    Trace(Vec<Vec<bool>>),
}

/// Sensing error model: `miss` is the chance an occupied channel reads
/// vacant, `false_alarm` the chance a vacant channel reads occupied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensingModel {
    pub miss: f64,
    pub false_alarm: f64,
}

/// Full description of one simulation scenario.
#[derive(Clone, Debug)]
pub struct SimConfig {
    pub seed_s: usize,
    pub seed_c: usize,
    pub seed_delta: usize,
    pub seed_prim: Option<u64>,
    pub channels: usize,
    pub slots: u64,
    pub occupancy: Occupancy,
    pub crossover: f64,
    pub sensing: SensingModel,
    pub budget: LinkBudget,
    pub modulation: ModulationScheme,
    pub rng_seed: u64,
    pub fallback_traffic: f64,
}

const CONFIG_KEYS: [&str; 17] = [
    "s",
    "c",
    "delta",
    "prim",
    "j0",
    "slots",
    "rho",
    "trace",
    "crossover",
    "sensing_miss",
    "sensing_false_alarm",
    "ru",
    "w",
    "m",
    "label",
    "rng_seed",
    "p0_traffic",
];

fn config_err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

impl SimConfig {
    /// Parse the flat `key = value` format. `#` starts a comment line. A
    /// `trace` key names a CSV file resolved against `trace_dir`.
    pub fn from_text(text: &str, trace_dir: Option<&Path>) -> Result<SimConfig> {
        let mut entries: HashMap<&str, (usize, &str)> = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(config_err(line_no, "expected key = value"));
            };
            let key = key.trim();
            let value = value.trim();
            let Some(&canonical) = CONFIG_KEYS.iter().find(|&&k| k == key) else {
                return Err(config_err(line_no, format!("unknown key {:?}", key)));
            };
            if entries.insert(canonical, (line_no, value)).is_some() {
                return Err(config_err(line_no, format!("duplicate key {:?}", key)));
            }
        }

        fn parse_num<T: std::str::FromStr>(
            entry: Option<&(usize, &str)>,
            key: &str,
            default: Option<T>,
        ) -> Result<T> {
            match entry {
                Some(&(line, value)) => value
                    .parse()
                    .map_err(|_| config_err(line, format!("bad value for {}: {:?}", key, value))),
                None => default
                    .ok_or_else(|| Error::InvalidParameter(format!("missing key {:?}", key))),
            }
        }

        let seed_s: usize = parse_num(entries.get("s"), "s", None)?;
        let seed_c: usize = parse_num(entries.get("c"), "c", Some(1))?;
        let seed_delta: usize = parse_num(entries.get("delta"), "delta", None)?;
        let seed_prim = match entries.get("prim") {
            Some(&(line, value)) => {
                let parsed = match value.strip_prefix("0x") {
                    Some(hex) => u64::from_str_radix(hex, 16),
                    None => value.parse(),
                };
                Some(parsed.map_err(|_| {
                    config_err(line, format!("bad value for prim: {:?}", value))
                })?)
            }
            None => None,
        };
        let channels: usize = parse_num(entries.get("j0"), "j0", None)?;
        let slots: u64 = parse_num(entries.get("slots"), "slots", None)?;

        let occupancy = match (entries.get("rho"), entries.get("trace")) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidParameter(
                    "give either rho or trace, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::InvalidParameter(
                    "occupancy missing: set rho or trace".into(),
                ))
            }
            (Some(&(line, value)), None) => {
                let rhos: Vec<f64> = value
                    .split(',')
                    .map(|part| {
                        part.trim().parse().map_err(|_| {
                            config_err(line, format!("bad activity value {:?}", part.trim()))
                        })
                    })
                    .collect::<Result<_>>()?;
                let rhos = if rhos.len() == 1 {
                    vec![rhos[0]; channels]
                } else {
                    rhos
                };
                if rhos.len() != channels {
                    return Err(config_err(
                        line,
                        format!("rho lists {} channels, j0 is {}", rhos.len(), channels),
                    ));
                }
                Occupancy::Bernoulli(rhos)
            }
            (None, Some(&(line, value))) => {
                let path = match trace_dir {
                    Some(dir) => dir.join(value),
                    None => Path::new(value).to_path_buf(),
                };
                let text = std::fs::read_to_string(&path).map_err(|e| {
                    config_err(line, format!("trace file {}: {}", path.display(), e))
                })?;
                Occupancy::Trace(parse_trace_csv(&text, channels, slots)?)
            }
        };

        let crossover: f64 = parse_num(entries.get("crossover"), "crossover", Some(0.0))?;
        let sensing = SensingModel {
            miss: parse_num(entries.get("sensing_miss"), "sensing_miss", Some(0.0))?,
            false_alarm: parse_num(
                entries.get("sensing_false_alarm"),
                "sensing_false_alarm",
                Some(0.0),
            )?,
        };

        let ratio_entry = |key: &str, default: &str| -> Result<Ratio<u64>> {
            match entries.get(key) {
                Some(&(line, value)) => crate::bandwidth::parse_decimal_ratio(value)
                    .map_err(|_| config_err(line, format!("bad value for {}: {:?}", key, value))),
                None => crate::bandwidth::parse_decimal_ratio(default),
            }
        };
        let budget = LinkBudget::new(ratio_entry("ru", "64")?, ratio_entry("w", "1")?)?;

        let m: u64 = parse_num(entries.get("m"), "m", Some(1))?;
        let label = match entries.get("label") {
            Some(&(_, value)) => value.to_string(),
            None => crate::bandwidth::default_label(m),
        };
        let modulation = ModulationScheme::new(m, label)?;

        let config = SimConfig {
            seed_s,
            seed_c,
            seed_delta,
            seed_prim,
            channels,
            slots,
            occupancy,
            crossover,
            sensing,
            budget,
            modulation,
            rng_seed: parse_num(entries.get("rng_seed"), "rng_seed", Some(0))?,
            fallback_traffic: parse_num(entries.get("p0_traffic"), "p0_traffic", Some(1.0))?,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.channels == 0 {
            return bad("at least one licensed channel is needed".into());
        }
        if self.slots == 0 {
            return bad("the horizon must cover at least one slot".into());
        }
        if !(0.0..0.5).contains(&self.crossover) {
            return bad(format!("crossover {} is outside [0, 0.5)", self.crossover));
        }
        let unit = |name: &str, value: f64| -> Result<()> {
            if (0.0..=1.0).contains(&value) {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{} {} is outside [0, 1]",
                    name, value
                )))
            }
        };
        unit("sensing_miss", self.sensing.miss)?;
        unit("sensing_false_alarm", self.sensing.false_alarm)?;
        unit("p0_traffic", self.fallback_traffic)?;
        match &self.occupancy {
            Occupancy::Bernoulli(rhos) => {
                if rhos.len() != self.channels {
                    return bad(format!(
                        "rho lists {} channels, j0 is {}",
                        rhos.len(),
                        self.channels
                    ));
                }
                for &rho in rhos {
                    unit("rho", rho)?;
                }
            }
            Occupancy::Trace(rows) => {
                if (rows.len() as u64) < self.slots {
                    return bad(format!(
                        "trace covers {} slots, horizon is {}",
                        rows.len(),
                        self.slots
                    ));
                }
                if rows.iter().any(|row| row.len() != self.channels) {
                    return bad("trace rows must list every channel".into());
                }
            }
        }
        Ok(())
    }

    fn seed_code(&self) -> Result<BchCode> {
        let prim = match self.seed_prim {
            Some(bits) => Some(PrimitivePolynomial::new(BinPolynomial::from_words(&[bits]))?),
            None => None,
        };
        BchCode::new(self.seed_s, self.seed_c, self.seed_delta, prim)
    }
}

/// Parse an occupancy trace CSV with columns `slot,channel,busy`. Channels
/// are 1-based; every cell in the `slots` by `channels` grid must be
/// present, and rows past the horizon are ignored.
pub fn parse_trace_csv(text: &str, channels: usize, slots: u64) -> Result<Vec<Vec<bool>>> {
    let mut grid: Vec<Vec<Option<bool>>> = vec![vec![None; channels]; slots as usize];
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if idx == 0 && line.chars().next().is_some_and(|ch| !ch.is_ascii_digit()) {
            continue; // header
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(config_err(line_no, "expected slot,channel,busy"));
        }
        let slot: u64 = fields[0]
            .parse()
            .map_err(|_| config_err(line_no, format!("bad slot {:?}", fields[0])))?;
        let channel: usize = fields[1]
            .parse()
            .map_err(|_| config_err(line_no, format!("bad channel {:?}", fields[1])))?;
        let busy = match fields[2] {
            "0" => false,
            "1" => true,
            other => return Err(config_err(line_no, format!("bad busy flag {:?}", other))),
        };
        if channel == 0 || channel > channels {
            return Err(config_err(
                line_no,
                format!("channel {} is outside 1..={}", channel, channels),
            ));
        }
        if slot >= slots {
            continue;
        }
        let cell = &mut grid[slot as usize][channel - 1];
        if cell.is_some() {
            return Err(config_err(
                line_no,
                format!("duplicate cell for slot {} channel {}", slot, channel),
            ));
        }
        *cell = Some(busy);
    }
    grid.into_iter()
        .enumerate()
        .map(|(slot, row)| {
            row.into_iter()
                .enumerate()
                .map(|(ch, cell)| {
                    cell.ok_or_else(|| {
                        Error::Parse(format!(
                            "trace is missing slot {} channel {}; it must cover the whole horizon",
                            slot,
                            ch + 1
                        ))
                    })
                })
                .collect()
        })
        .collect()
}

/// Where the fallback user transmits in one slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Assignment {
    OwnBand,
    Channel(usize),
}

/// Run sensing over realized occupancy and pick, per slot, the lowest-index
/// channel that reads vacant, falling back to the private band. One draw per
/// slot and channel regardless of outcome keeps the stream aligned.
pub fn opportunity_schedule<R: Rng>(
    occupancy: &[Vec<bool>],
    sensing: &SensingModel,
    rng: &mut R,
) -> Vec<Assignment> {
    occupancy
        .iter()
        .map(|row| {
            let mut pick = Assignment::OwnBand;
            for (idx, &busy) in row.iter().enumerate() {
                let u: f64 = rng.random();
                let sensed_busy = if busy {
                    u >= sensing.miss
                } else {
                    u < sensing.false_alarm
                };
                if !sensed_busy && pick == Assignment::OwnBand {
                    pick = Assignment::Channel(idx + 1);
                }
            }
            pick
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Actor {
    Primary,
    Secondary,
    Idle,
}

impl Actor {
    pub fn as_str(self) -> &'static str {
        match self {
            Actor::Primary => "primary",
            Actor::Secondary => "secondary",
            Actor::Idle => "idle",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "primary" => Ok(Actor::Primary),
            "secondary" => Ok(Actor::Secondary),
            "idle" => Ok(Actor::Idle),
            other => Err(Error::Parse(format!("unknown actor {:?}", other))),
        }
    }
}

/// How one transmission fared, judged against the sent message.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodeOutcome {
    /// Arrived clean and decoded to the sent message.
    Ok,
    /// Channel errors occurred and decoding removed all of them.
    Corrected,
    /// Decoding reported success but delivered the wrong message.
    Miscorrected,
    /// Decoding raised an error, or a collision destroyed the slot.
    Failed,
}

impl DecodeOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            DecodeOutcome::Ok => "ok",
            DecodeOutcome::Corrected => "corrected",
            DecodeOutcome::Miscorrected => "miscorrected",
            DecodeOutcome::Failed => "failed",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "ok" => Ok(DecodeOutcome::Ok),
            "corrected" => Ok(DecodeOutcome::Corrected),
            "miscorrected" => Ok(DecodeOutcome::Miscorrected),
            "failed" => Ok(DecodeOutcome::Failed),
            other => Err(Error::Parse(format!("unknown outcome {:?}", other))),
        }
    }

    /// True when the delivered message equals the sent one.
    pub fn delivered(self) -> bool {
        matches!(self, DecodeOutcome::Ok | DecodeOutcome::Corrected)
    }
}

/// One logged transmission opportunity. Channel 0 is the fallback user's own
/// band. Bit counts make the log self-contained for [`summarize`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotEvent {
    pub slot: u64,
    pub channel: usize,
    pub actor: Actor,
    pub codewords: u64,
    pub bits_sent: u64,
    pub info_bits: u64,
    pub channel_bit_errors: u64,
    pub info_bit_errors: u64,
    pub outcome: Option<DecodeOutcome>,
    pub collision: bool,
}

impl SlotEvent {
    fn idle(slot: u64, channel: usize) -> Self {
        SlotEvent {
            slot,
            channel,
            actor: Actor::Idle,
            codewords: 0,
            bits_sent: 0,
            info_bits: 0,
            channel_bit_errors: 0,
            info_bit_errors: 0,
            outcome: None,
            collision: false,
        }
    }
}

/// Aggregate outcomes of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimMetrics {
    pub slots: u64,
    pub channels: usize,
    /// Fraction of slots each licensed channel's own primary was active.
    pub channel_utilization: Vec<f64>,
    /// Slots where the fallback user actually rode a licensed channel.
    pub secondary_opportunities: u64,
    pub own_band_slots: u64,
    /// Correctly delivered secondary information bits per slot.
    pub secondary_throughput: f64,
    pub raw_ber: f64,
    pub post_decode_ber: f64,
    /// Secondary words not delivered intact, detected or not.
    pub secondary_word_error_rate: f64,
    /// Secondary words delivered wrong without any failure indication.
    pub secondary_undetected_word_error_rate: f64,
    pub collision_count: u64,
    pub own_band_khz: f64,
    pub secondary_band_khz: f64,
    pub bandwidth_saving: f64,
    /// Spectrum in use when every primary and the own band talk at once.
    pub spectrum_all_active_khz: f64,
}

/// The config-derived constants [`summarize`] cannot read off the log.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SummaryContext {
    pub slots: u64,
    pub channels: usize,
    pub own_band_khz: f64,
    pub secondary_band_khz: f64,
}

/// Recompute metrics from an event log. The log is the source of truth for
/// every statistical field; the context supplies the bandwidth constants.
pub fn summarize(events: &[SlotEvent], ctx: &SummaryContext) -> SimMetrics {
    let slots = ctx.slots.max(1);
    let mut busy = vec![0u64; ctx.channels];
    let mut own_band_slots = 0u64;
    let mut rides = 0u64;
    let mut delivered_bits = 0u64;
    let mut bits_sent = 0u64;
    let mut channel_errors = 0u64;
    let mut info_bits = 0u64;
    let mut info_errors = 0u64;
    let mut secondary_words = 0u64;
    let mut secondary_bad = 0u64;
    let mut secondary_undetected = 0u64;
    let mut collisions = 0u64;
    for event in events {
        bits_sent += event.bits_sent;
        channel_errors += event.channel_bit_errors;
        info_bits += event.info_bits;
        info_errors += event.info_bit_errors;
        match event.actor {
            Actor::Primary => {
                if event.channel == 0 {
                    own_band_slots += event.codewords;
                } else {
                    busy[event.channel - 1] += 1;
                }
            }
            Actor::Secondary => {
                rides += 1;
                secondary_words += event.codewords;
                if event.collision {
                    collisions += 1;
                }
                if let Some(outcome) = event.outcome {
                    if outcome.delivered() {
                        delivered_bits += event.info_bits;
                    } else {
                        secondary_bad += event.codewords;
                    }
                    if outcome == DecodeOutcome::Miscorrected {
                        secondary_undetected += event.codewords;
                    }
                }
            }
            Actor::Idle => {}
        }
    }
    let frac = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    SimMetrics {
        slots: ctx.slots,
        channels: ctx.channels,
        channel_utilization: busy.iter().map(|&b| frac(b, slots)).collect(),
        secondary_opportunities: rides,
        own_band_slots,
        secondary_throughput: delivered_bits as f64 / slots as f64,
        raw_ber: frac(channel_errors, bits_sent),
        post_decode_ber: frac(info_errors, info_bits),
        secondary_word_error_rate: frac(secondary_bad, secondary_words),
        secondary_undetected_word_error_rate: frac(secondary_undetected, secondary_words),
        collision_count: collisions,
        own_band_khz: ctx.own_band_khz,
        secondary_band_khz: ctx.secondary_band_khz,
        bandwidth_saving: 1.0 - ctx.secondary_band_khz / ctx.own_band_khz,
        spectrum_all_active_khz: ctx.channels as f64 * ctx.secondary_band_khz + ctx.own_band_khz,
    }
}

fn random_bits<R: Rng>(len: usize, rng: &mut R) -> BitVector {
    let mut v = BitVector::zeros(len);
    for i in 0..len {
        if rng.random::<bool>() {
            v.set(i, true);
        }
    }
    v
}

fn apply_bsc<R: Rng>(word: &mut BitVector, p: f64, rng: &mut R) -> u64 {
    let mut flips = 0;
    for i in 0..word.len() {
        if rng.random::<f64>() < p {
            word.flip(i);
            flips += 1;
        }
    }
    flips
}

fn classify(flips: u64, wrong_info_bits: u64) -> DecodeOutcome {
    if wrong_info_bits > 0 {
        DecodeOutcome::Miscorrected
    } else if flips > 0 {
        DecodeOutcome::Corrected
    } else {
        DecodeOutcome::Ok
    }
}

/// Largest pattern weight not above `want` whose cumulative enumeration
/// stays inside the build budget.
fn affordable_weight(length: usize, want: usize) -> usize {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for w in 1..=want {
        binom = binom.saturating_mul((length - w + 1) as u128) / w as u128;
        total = total.saturating_add(binom);
        if total > ENUMERATION_BUDGET {
            return w - 1;
        }
    }
    want
}

fn channel_decoder(chain: &ChainCode, seed_capability: usize) -> Result<ChainDecoder> {
    if chain.redundancy() <= COMPLETE_TABLE_REDUNDANCY {
        ChainDecoder::new(chain)
    } else {
        let weight = affordable_weight(chain.length(), seed_capability).max(1);
        ChainDecoder::with_forced_table(chain, weight)
    }
}

fn seed_decoder(seed: &BchCode) -> Result<SyndromeDecoder> {
    if seed.r() <= COMPLETE_TABLE_REDUNDANCY {
        SyndromeDecoder::build(seed)
    } else {
        let weight = affordable_weight(seed.n(), seed.correction_capability()).max(1);
        let h = parity_check_matrix(seed)?;
        let table = SyndromeTable::build_forced(&h, weight)?;
        Ok(SyndromeDecoder::from_parts(h, table))
    }
}

fn ratio_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Run the scenario. Returns the metrics and the full event log: per slot,
/// one event per licensed channel in ascending order, then one event for the
/// fallback user (channel 0 when on its own band or idle).
pub fn run_simulation(config: &SimConfig) -> Result<(SimMetrics, Vec<SlotEvent>)> {
    config.validate()?;
    let seed = config.seed_code()?;
    let chains: Vec<ChainCode> = (1..=config.channels)
        .map(|j| seed.derive(j))
        .collect::<Result<_>>()?;
    let own = seed_decoder(&seed)?;
    let riders: Vec<ChainDecoder> = chains
        .iter()
        .map(|chain| channel_decoder(chain, seed.correction_capability()))
        .collect::<Result<_>>()?;

    let seed_rate = Ratio::new(seed.k() as u64, seed.n() as u64);
    let own_band_khz = required_bandwidth(&config.budget, &config.modulation, seed_rate)?;
    let chain_band_khz =
        required_bandwidth(&config.budget, &config.modulation, chains[0].rate())?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let occupancy: Vec<Vec<bool>> = match &config.occupancy {
        Occupancy::Bernoulli(rhos) => (0..config.slots)
            .map(|_| rhos.iter().map(|&rho| rng.random::<f64>() < rho).collect())
            .collect(),
        Occupancy::Trace(rows) => rows[..config.slots as usize].to_vec(),
    };
    let schedule = opportunity_schedule(&occupancy, &config.sensing, &mut rng);

    let stride = config.channels + 1;
    let mut events: Vec<SlotEvent> = Vec::with_capacity(config.slots as usize * stride);
    for slot in 0..config.slots {
        let base = events.len();
        let fallback_active = rng.random::<f64>() < config.fallback_traffic;
        for (j, chain) in chains.iter().enumerate() {
            if !occupancy[slot as usize][j] {
                events.push(SlotEvent::idle(slot, j + 1));
                continue;
            }
            let message = random_bits(chain.dimension(), &mut rng);
            let mut word = encode_systematic(chain, &message)?;
            let flips = apply_bsc(&mut word, config.crossover, &mut rng);
            let (outcome, wrong) = match riders[j].decode_word(&word) {
                Ok(decoded) => {
                    let delivered = extract_message(chain, &decoded)?;
                    let wrong = delivered.xor(&message).weight() as u64;
                    (classify(flips, wrong), wrong)
                }
                Err(_) => (DecodeOutcome::Failed, chain.dimension() as u64),
            };
            events.push(SlotEvent {
                slot,
                channel: j + 1,
                actor: Actor::Primary,
                codewords: 1,
                bits_sent: chain.length() as u64,
                info_bits: chain.dimension() as u64,
                channel_bit_errors: flips,
                info_bit_errors: wrong,
                outcome: Some(outcome),
                collision: false,
            });
        }

        if !fallback_active {
            events.push(SlotEvent::idle(slot, 0));
            continue;
        }
        let message = random_bits(seed.k(), &mut rng);
        let codeword = seed.encode_systematic(&message)?;
        match schedule[slot as usize] {
            Assignment::OwnBand => {
                let mut word = codeword;
                let flips = apply_bsc(&mut word, config.crossover, &mut rng);
                let (outcome, wrong) = match own.decode(&word) {
                    Ok(decoded) => {
                        let delivered = seed.extract_message(&decoded)?;
                        let wrong = delivered.xor(&message).weight() as u64;
                        (classify(flips, wrong), wrong)
                    }
                    Err(_) => (DecodeOutcome::Failed, seed.k() as u64),
                };
                events.push(SlotEvent {
                    slot,
                    channel: 0,
                    actor: Actor::Primary,
                    codewords: 1,
                    bits_sent: seed.n() as u64,
                    info_bits: seed.k() as u64,
                    channel_bit_errors: flips,
                    info_bit_errors: wrong,
                    outcome: Some(outcome),
                    collision: false,
                });
            }
            Assignment::Channel(j) => {
                let mut lifted = embed_bch(&codeword, &chains[j - 1])?;
                let flips = apply_bsc(&mut lifted, config.crossover, &mut rng);
                let (outcome, wrong) = match riders[j - 1].correct_and_project(&lifted) {
                    Ok(projected) => {
                        let delivered = seed.extract_message(&projected)?;
                        let wrong = delivered.xor(&message).weight() as u64;
                        (classify(flips, wrong), wrong)
                    }
                    Err(_) => (DecodeOutcome::Failed, seed.k() as u64),
                };
                let collided = occupancy[slot as usize][j - 1];
                events.push(SlotEvent {
                    slot,
                    channel: j,
                    actor: Actor::Secondary,
                    codewords: 1,
                    bits_sent: chains[j - 1].length() as u64,
                    info_bits: seed.k() as u64,
                    channel_bit_errors: flips,
                    info_bit_errors: if collided { seed.k() as u64 } else { wrong },
                    outcome: Some(if collided { DecodeOutcome::Failed } else { outcome }),
                    collision: collided,
                });
                if collided {
                    let primary = &mut events[base + j - 1];
                    primary.collision = true;
                    primary.outcome = Some(DecodeOutcome::Failed);
                    primary.info_bit_errors = primary.info_bits;
                }
            }
        }
    }

    let ctx = SummaryContext {
        slots: config.slots,
        channels: config.channels,
        own_band_khz: ratio_f64(own_band_khz),
        secondary_band_khz: ratio_f64(chain_band_khz),
    };
    Ok((summarize(&events, &ctx), events))
}

/// Serialize a log to the `slot,channel,actor,outcome,collision` CSV form.
pub fn events_to_csv(events: &[SlotEvent]) -> String {
    let mut out = String::from("slot,channel,actor,outcome,collision\n");
    for event in events {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            event.slot,
            event.channel,
            event.actor.as_str(),
            event.outcome.map(DecodeOutcome::as_str).unwrap_or(""),
            event.collision as u8
        ));
    }
    out
}

/// Parse the CSV form back. The bit-count fields are not serialized, so the
/// returned events carry zeros there.
pub fn events_from_csv(text: &str) -> Result<Vec<SlotEvent>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "slot,channel,actor,outcome,collision" => {}
        _ => return Err(Error::Parse("missing event log header".into())),
    }
    let mut events = Vec::new();
    for (idx, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(config_err(idx + 1, "expected 5 event fields"));
        }
        let slot: u64 = fields[0]
            .parse()
            .map_err(|_| config_err(idx + 1, format!("bad slot {:?}", fields[0])))?;
        let channel: usize = fields[1]
            .parse()
            .map_err(|_| config_err(idx + 1, format!("bad channel {:?}", fields[1])))?;
        let actor = Actor::parse(fields[2])?;
        let outcome = if fields[3].is_empty() {
            None
        } else {
            Some(DecodeOutcome::parse(fields[3])?)
        };
        let collision = match fields[4] {
            "0" => false,
            "1" => true,
            other => return Err(config_err(idx + 1, format!("bad collision flag {:?}", other))),
        };
        let mut event = SlotEvent::idle(slot, channel);
        event.actor = actor;
        event.outcome = outcome;
        event.collision = collision;
        events.push(event);
    }
    Ok(events)
}

/// Metrics as stable `key=value` lines.
pub fn metrics_to_text(metrics: &SimMetrics) -> String {
    let mut out = String::new();
    out.push_str(&format!("slots={}\n", metrics.slots));
    out.push_str(&format!("channels={}\n", metrics.channels));
    for (idx, util) in metrics.channel_utilization.iter().enumerate() {
        out.push_str(&format!("utilization_{}={:.6}\n", idx + 1, util));
    }
    out.push_str(&format!(
        "secondary_opportunities={}\n",
        metrics.secondary_opportunities
    ));
    out.push_str(&format!("own_band_slots={}\n", metrics.own_band_slots));
    out.push_str(&format!(
        "secondary_throughput={:.6}\n",
        metrics.secondary_throughput
    ));
    out.push_str(&format!("raw_ber={:.6}\n", metrics.raw_ber));
    out.push_str(&format!("post_decode_ber={:.6}\n", metrics.post_decode_ber));
    out.push_str(&format!(
        "secondary_word_error_rate={:.6}\n",
        metrics.secondary_word_error_rate
    ));
    out.push_str(&format!(
        "secondary_undetected_word_error_rate={:.6}\n",
        metrics.secondary_undetected_word_error_rate
    ));
    out.push_str(&format!("collision_count={}\n", metrics.collision_count));
    out.push_str(&format!("own_band_khz={:.1}\n", metrics.own_band_khz));
    out.push_str(&format!(
        "secondary_band_khz={:.1}\n",
        metrics.secondary_band_khz
    ));
    out.push_str(&format!(
        "bandwidth_saving={:.6}\n",
        metrics.bandwidth_saving
    ));
    out.push_str(&format!(
        "spectrum_all_active_khz={:.1}\n",
        metrics.spectrum_all_active_khz
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config() -> SimConfig {
        SimConfig {
            seed_s: 2,
            seed_c: 1,
            seed_delta: 3,
            seed_prim: None,
            channels: 1,
            slots: 100,
            occupancy: Occupancy::Bernoulli(vec![0.0]),
            crossover: 0.0,
            sensing: SensingModel {
                miss: 0.0,
                false_alarm: 0.0,
            },
            budget: LinkBudget::new(Ratio::from_integer(64), Ratio::new(6, 5)).unwrap(),
            modulation: ModulationScheme::new(1, "BPSK").unwrap(),
            rng_seed: 7,
            fallback_traffic: 1.0,
        }
    }

    #[test]
    fn noiseless_vacant_channel_is_ridden_every_slot() {
        let config = base_config();
        let (metrics, events) = run_simulation(&config).unwrap();
        assert_eq!(metrics.secondary_opportunities, 100);
        assert_eq!(metrics.own_band_slots, 0);
        assert_eq!(metrics.collision_count, 0);
        assert_eq!(metrics.post_decode_ber, 0.0);
        assert_eq!(metrics.raw_ber, 0.0);
        assert_eq!(metrics.bandwidth_saving, 0.5);
        assert_eq!(metrics.secondary_throughput, 1.0);
        assert_eq!(events.len(), 200);
        assert!(events
            .iter()
            .filter(|e| e.actor == Actor::Secondary)
            .all(|e| e.outcome == Some(DecodeOutcome::Ok) && e.channel == 1));
    }

    #[test]
    fn saturated_channels_push_the_fallback_user_home() {
        let mut config = base_config();
        config.occupancy = Occupancy::Bernoulli(vec![1.0]);
        let (metrics, events) = run_simulation(&config).unwrap();
        assert_eq!(metrics.secondary_opportunities, 0);
        assert_eq!(metrics.own_band_slots, 100);
        assert_eq!(metrics.collision_count, 0);
        assert!((metrics.channel_utilization[0] - 1.0).abs() < 1e-12);
        assert!(events
            .iter()
            .filter(|e| e.channel == 0)
            .all(|e| e.actor == Actor::Primary));
    }

    #[test]
    fn forced_sensing_misses_log_collisions() {
        let mut config = base_config();
        config.occupancy = Occupancy::Bernoulli(vec![1.0]);
        config.sensing.miss = 1.0;
        let (metrics, events) = run_simulation(&config).unwrap();
        assert_eq!(metrics.collision_count, 100);
        assert_eq!(metrics.secondary_word_error_rate, 1.0);
        let slot0: Vec<&SlotEvent> = events.iter().filter(|e| e.slot == 0).collect();
        assert_eq!(slot0.len(), 2);
        assert!(slot0.iter().all(|e| e.collision
            && e.outcome == Some(DecodeOutcome::Failed)
            && e.channel == 1));
    }

    #[test]
    fn perfect_sensing_never_collides() {
        let mut config = base_config();
        config.channels = 2;
        config.occupancy = Occupancy::Bernoulli(vec![0.6, 0.4]);
        config.crossover = 0.02;
        config.slots = 400;
        let (metrics, events) = run_simulation(&config).unwrap();
        assert_eq!(metrics.collision_count, 0);
        assert!(events.iter().all(|e| !e.collision));
    }

    #[test]
    fn runs_are_reproducible_byte_for_byte() {
        let mut config = base_config();
        config.channels = 2;
        config.occupancy = Occupancy::Bernoulli(vec![0.5, 0.3]);
        config.crossover = 0.01;
        config.sensing.miss = 0.05;
        config.sensing.false_alarm = 0.02;
        config.fallback_traffic = 0.8;
        config.slots = 200;
        let (m1, e1) = run_simulation(&config).unwrap();
        let (m2, e2) = run_simulation(&config).unwrap();
        assert_eq!(e1, e2);
        assert_eq!(events_to_csv(&e1), events_to_csv(&e2));
        assert_eq!(metrics_to_text(&m1), metrics_to_text(&m2));
        let mut other = config.clone();
        other.rng_seed = 8;
        let (_, e3) = run_simulation(&other).unwrap();
        assert_ne!(e1, e3);
    }

    #[test]
    fn schedule_follows_the_trace_under_perfect_sensing() {
        let occupancy = vec![vec![true], vec![false], vec![true]];
        let sensing = SensingModel {
            miss: 0.0,
            false_alarm: 0.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let schedule = opportunity_schedule(&occupancy, &sensing, &mut rng);
        assert_eq!(
            schedule,
            vec![
                Assignment::OwnBand,
                Assignment::Channel(1),
                Assignment::OwnBand
            ]
        );
    }

    #[test]
    fn schedule_picks_the_lowest_vacant_channel() {
        let occupancy = vec![vec![true, false]];
        let sensing = SensingModel {
            miss: 0.0,
            false_alarm: 0.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let schedule = opportunity_schedule(&occupancy, &sensing, &mut rng);
        assert_eq!(schedule, vec![Assignment::Channel(2)]);
    }

    #[test]
    fn certain_misses_send_the_user_into_a_busy_channel() {
        let occupancy = vec![vec![true]];
        let sensing = SensingModel {
            miss: 1.0,
            false_alarm: 0.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let schedule = opportunity_schedule(&occupancy, &sensing, &mut rng);
        assert_eq!(schedule, vec![Assignment::Channel(1)]);
    }

    #[test]
    fn certain_false_alarms_waste_every_vacancy() {
        let occupancy = vec![vec![false], vec![false]];
        let sensing = SensingModel {
            miss: 0.0,
            false_alarm: 1.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let schedule = opportunity_schedule(&occupancy, &sensing, &mut rng);
        assert_eq!(schedule, vec![Assignment::OwnBand, Assignment::OwnBand]);
    }

    #[test]
    fn summarize_trusts_the_log() {
        let ctx = SummaryContext {
            slots: 50,
            channels: 1,
            own_band_khz: 230.4,
            secondary_band_khz: 115.2,
        };
        let empty = summarize(&[], &ctx);
        assert_eq!(empty.secondary_throughput, 0.0);
        assert_eq!(empty.raw_ber, 0.0);
        assert_eq!(empty.collision_count, 0);
        assert_eq!(empty.bandwidth_saving, 0.5);
        assert_eq!(empty.spectrum_all_active_khz, 345.6);

        let mut events = Vec::new();
        for slot in 0..3 {
            events.push(SlotEvent {
                slot,
                channel: 1,
                actor: Actor::Secondary,
                codewords: 1,
                bits_sent: 12,
                info_bits: 8,
                channel_bit_errors: 1,
                info_bit_errors: 0,
                outcome: Some(DecodeOutcome::Corrected),
                collision: false,
            });
        }
        let metrics = summarize(&events, &ctx);
        assert_eq!(metrics.secondary_throughput, 24.0 / 50.0);
        assert_eq!(metrics.secondary_word_error_rate, 0.0);
        assert_eq!(metrics.secondary_opportunities, 3);
    }

    #[test]
    fn primary_only_logs_report_zero_secondary_traffic() {
        let ctx = SummaryContext {
            slots: 10,
            channels: 1,
            own_band_khz: 230.4,
            secondary_band_khz: 115.2,
        };
        let events = vec![SlotEvent {
            slot: 0,
            channel: 1,
            actor: Actor::Primary,
            codewords: 1,
            bits_sent: 12,
            info_bits: 8,
            channel_bit_errors: 0,
            info_bit_errors: 0,
            outcome: Some(DecodeOutcome::Ok),
            collision: false,
        }];
        let metrics = summarize(&events, &ctx);
        assert_eq!(metrics.secondary_throughput, 0.0);
        assert_eq!(metrics.secondary_opportunities, 0);
        assert!((metrics.channel_utilization[0] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn event_csv_round_trips_its_columns() {
        let mut config = base_config();
        config.occupancy = Occupancy::Bernoulli(vec![0.5]);
        config.crossover = 0.03;
        config.slots = 40;
        let (_, events) = run_simulation(&config).unwrap();
        let csv = events_to_csv(&events);
        let parsed = events_from_csv(&csv).unwrap();
        assert_eq!(parsed.len(), events.len());
        for (a, b) in events.iter().zip(&parsed) {
            assert_eq!(a.slot, b.slot);
            assert_eq!(a.channel, b.channel);
            assert_eq!(a.actor, b.actor);
            assert_eq!(a.outcome, b.outcome);
            assert_eq!(a.collision, b.collision);
        }
        assert!(events_from_csv("nonsense\n1,2,3").is_err());
    }

    #[test]
    fn config_text_round_trips_the_scenario() {
        let text = "\
# two licensed channels
s = 2
delta = 3
j0 = 2
slots = 500
rho = 0.4, 0.7
crossover = 0.01
ru = 64
w = 1.2
m = 1
rng_seed = 42
p0_traffic = 0.9
";
        let config = SimConfig::from_text(text, None).unwrap();
        assert_eq!(config.seed_s, 2);
        assert_eq!(config.seed_c, 1);
        assert_eq!(config.channels, 2);
        assert_eq!(config.slots, 500);
        assert_eq!(config.occupancy, Occupancy::Bernoulli(vec![0.4, 0.7]));
        assert_eq!(config.crossover, 0.01);
        assert_eq!(config.rng_seed, 42);
        assert_eq!(config.fallback_traffic, 0.9);
        assert_eq!(config.budget.excess_factor, Ratio::new(6, 5));
        assert_eq!(config.modulation.label(), "BPSK");
        run_simulation(&config).unwrap();
    }

    #[test]
    fn config_parser_rejects_what_it_cannot_honor() {
        let ok = "s = 2\ndelta = 3\nj0 = 1\nslots = 10\nrho = 0.5\n";
        SimConfig::from_text(ok, None).unwrap();
        for (broken, hint) in [
            ("delta = 3\nj0 = 1\nslots = 10\nrho = 0.5\n", "missing s"),
            ("s = 2\ndelta = 3\nj0 = 1\nslots = 10\n", "no occupancy"),
            (
                "s = 2\ndelta = 3\nj0 = 1\nslots = 10\nrho = 0.5\ntrace = t.csv\n",
                "both occupancy forms",
            ),
            (
                "s = 2\ndelta = 3\nj0 = 1\nslots = 10\nrho = 1.5\n",
                "rho out of range",
            ),
            (
                "s = 2\ndelta = 3\nj0 = 1\nslots = 10\nrho = 0.5\ncrossover = 0.5\n",
                "crossover at the wall",
            ),
            (
                "s = 2\ndelta = 3\nj0 = 2\nslots = 10\nrho = 0.1, 0.2, 0.3\n",
                "rho arity",
            ),
            (
                "s = 2\ndelta = 3\nj0 = 1\nslots = 10\nrho = 0.5\nbogus = 1\n",
                "unknown key",
            ),
            (
                "s = 2\ns = 2\ndelta = 3\nj0 = 1\nslots = 10\nrho = 0.5\n",
                "duplicate key",
            ),
            ("s = 2\ndelta 3\nj0 = 1\nslots = 10\nrho = 0.5\n", "no equals"),
        ] {
            assert!(SimConfig::from_text(broken, None).is_err(), "{}", hint);
        }
    }

    #[test]
    fn trace_csv_fills_the_grid_and_rejects_holes() {
        let text = "\
slot,channel,busy
0,1,1
0,2,0
1,1,0
1,2,1
2,1,1
2,2,1
";
        let rows = parse_trace_csv(text, 2, 3).unwrap();
        assert_eq!(
            rows,
            vec![
                vec![true, false],
                vec![false, true],
                vec![true, true]
            ]
        );
        // short by one slot
        assert!(parse_trace_csv(text, 2, 4).is_err());
        assert!(parse_trace_csv("0,1,1\n0,1,0\n", 1, 1).is_err());
        assert!(parse_trace_csv("0,3,1\n", 2, 1).is_err());
        assert!(parse_trace_csv("0,1,2\n", 1, 1).is_err());
    }

    #[test]
    fn traced_occupancy_drives_the_run() {
        let mut config = base_config();
        config.slots = 3;
        config.occupancy = Occupancy::Trace(vec![vec![true], vec![false], vec![true]]);
        let (metrics, events) = run_simulation(&config).unwrap();
        assert_eq!(metrics.secondary_opportunities, 1);
        assert_eq!(metrics.own_band_slots, 2);
        let riders: Vec<u64> = events
            .iter()
            .filter(|e| e.actor == Actor::Secondary)
            .map(|e| e.slot)
            .collect();
        assert_eq!(riders, vec![1]);
    }

    #[test]
    fn noisy_run_accounting_stays_consistent() {
        let mut config = base_config();
        config.occupancy = Occupancy::Bernoulli(vec![0.5]);
        config.crossover = 0.05;
        config.slots = 300;
        let (metrics, events) = run_simulation(&config).unwrap();
        assert!(metrics.raw_ber > 0.0);
        assert!(events.iter().all(|e| !e.collision));
        let bad_words: u64 = events
            .iter()
            .filter(|e| {
                e.actor == Actor::Secondary
                    && matches!(
                        e.outcome,
                        Some(DecodeOutcome::Failed | DecodeOutcome::Miscorrected)
                    )
            })
            .count() as u64;
        let rides: u64 = events
            .iter()
            .filter(|e| e.actor == Actor::Secondary)
            .count() as u64;
        assert!(rides > 0);
        assert_eq!(
            metrics.secondary_word_error_rate,
            bad_words as f64 / rides as f64
        );
        assert_eq!(events.len() as u64, config.slots * 2);
    }

    #[test]
    fn metrics_text_is_stable_and_json_safe() {
        let config = base_config();
        let (metrics, _) = run_simulation(&config).unwrap();
        let text = metrics_to_text(&metrics);
        assert!(text.starts_with("slots=100\nchannels=1\nutilization_1=0.000000\n"));
        assert!(text.contains("bandwidth_saving=0.500000\n"));
        assert!(text.contains("own_band_khz=230.4\n"));
        assert!(text.contains("secondary_band_khz=115.2\n"));
        assert!(text.contains("spectrum_all_active_khz=345.6\n"));
        let json = serde_json::to_string(&metrics).unwrap();
        let back: SimMetrics = serde_json::from_str(&json).unwrap();
        assert_eq!(back, metrics);
    }
}
