//! Synthetic gait dataset generation and its binary on-disk codec.
//!
//! Subject parameters are drawn uniformly from configured ranges, simulated,
//! and rejected (with resampling) whenever the gait fails. Every record owns
//! an independent random stream derived from `(seed, index)`, so a dataset
//! is a pure function of its seed and configuration regardless of how the
//! records are scheduled.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{GaitParams, InvalidParam};
use crate::math;
use crate::sim::{simulate, InitialConditions, SimSettings, Trajectory};

/// Resampling budget per record before generation gives up.
pub const MAX_ATTEMPTS_PER_RECORD: u64 = 100;

/// Generation aborts once at least this many simulations ran with an
/// acceptance rate below [`MIN_ACCEPTANCE_RATE`].
pub const ACCEPTANCE_CHECK_ATTEMPTS: u64 = 1000;
pub const MIN_ACCEPTANCE_RATE: f64 = 0.01;

/// Initial horizontal speed: held fixed or drawn uniformly per record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VelocityDraw {
    Fixed(f64),
    Range(f64, f64),
}

/// Uniform sampling ranges for the subject parameters, plus the quantities
/// held fixed across a dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingRanges {
    /// Body mass range, kg.
    pub mass: (f64, f64),
    /// Leg stiffness range, N/m.
    pub stiffness: (f64, f64),
    /// Rest leg length range, m.
    pub rest_length: (f64, f64),
    /// Initial horizontal position range, m.
    pub x0: (f64, f64),
    /// Initial leg compression range, m.
    pub y_offset: (f64, f64),
    pub v0: VelocityDraw,
    /// Angle of attack shared by all records, rad.
    pub attack_angle: f64,
    /// Gravitational acceleration shared by all records, m/s².
    pub gravity: f64,
}

impl Default for SamplingRanges {
    fn default() -> Self {
        SamplingRanges {
            mass: (60.0, 75.0),
            stiffness: (8000.0, 10000.0),
            rest_length: (0.6, 0.8),
            x0: (0.0, 0.1),
            y_offset: (0.0, 0.1),
            // Highest measured acceptance across the box; the walking basin
            // at these stiffness-to-weight levels sits near 0.85 m/s.
            v0: VelocityDraw::Fixed(0.85),
            attack_angle: 69.0_f64.to_radians(),
            gravity: 10.0,
        }
    }
}

impl SamplingRanges {
    pub fn validate(&self) -> Result<(), InvalidParam> {
        let ordered = |name: &'static str, (lo, hi): (f64, f64)| {
            if lo.is_finite() && hi.is_finite() && lo < hi {
                Ok(())
            } else {
                Err(InvalidParam { name, value: lo })
            }
        };
        ordered("mass range", self.mass)?;
        ordered("stiffness range", self.stiffness)?;
        ordered("rest_length range", self.rest_length)?;
        ordered("x0 range", self.x0)?;
        ordered("y_offset range", self.y_offset)?;
        if self.mass.0 <= 0.0 {
            return Err(InvalidParam { name: "mass range", value: self.mass.0 });
        }
        if self.stiffness.0 <= 0.0 {
            return Err(InvalidParam { name: "stiffness range", value: self.stiffness.0 });
        }
        if self.rest_length.0 <= 0.0 {
            return Err(InvalidParam { name: "rest_length range", value: self.rest_length.0 });
        }
        if self.y_offset.0 < 0.0 || self.y_offset.1 >= self.rest_length.0 {
            return Err(InvalidParam { name: "y_offset range", value: self.y_offset.1 });
        }
        match self.v0 {
            VelocityDraw::Fixed(v) => {
                if !(v.is_finite() && v > 0.0) {
                    return Err(InvalidParam { name: "v0", value: v });
                }
            }
            VelocityDraw::Range(lo, hi) => {
                ordered("v0 range", (lo, hi))?;
                if lo <= 0.0 {
                    return Err(InvalidParam { name: "v0 range", value: lo });
                }
            }
        }
        let probe = GaitParams {
            mass: self.mass.0,
            stiffness: self.stiffness.0,
            rest_length: self.rest_length.0,
            attack_angle: self.attack_angle,
            gravity: self.gravity,
        };
        probe.validate()
    }
}

/// One accepted record: the drawn subject and its feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct GaitRecord {
    pub params: GaitParams,
    pub init: InitialConditions,
    /// `[x(t0)..x(tN), y(t0)..y(tN)]` with x shifted so the first entry is 0.
    pub features: Vec<f64>,
}

/// Dataset-level metadata; mirrors the binary file header.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetMeta {
    pub duration: f64,
    pub output_dt: f64,
    pub gravity: f64,
    pub attack_angle: f64,
    pub samples_per_channel: u32,
    pub rejection_count: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaitDataset {
    pub meta: DatasetMeta,
    pub records: Vec<GaitRecord>,
}

impl GaitDataset {
    pub fn feature_len(&self) -> usize {
        2 * self.meta.samples_per_channel as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GenerateError {
    InvalidRanges(InvalidParam),
    /// Acceptance fell below [`MIN_ACCEPTANCE_RATE`]: the configured regime
    /// does not walk.
    LowAcceptance { attempts: u64, accepted: u64 },
    /// A single record exhausted its resampling budget.
    RecordExhausted { index: u64 },
}

impl core::fmt::Display for GenerateError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GenerateError::InvalidRanges(e) => write!(f, "invalid sampling ranges: {e}"),
            GenerateError::LowAcceptance { attempts, accepted } => write!(
                f,
                "acceptance below {:.0}% after {attempts} attempts ({accepted} accepted); \
                 this parameter regime does not walk",
                MIN_ACCEPTANCE_RATE * 100.0
            ),
            GenerateError::RecordExhausted { index } => write!(
                f,
                "record {index} found no walking gait in {MAX_ATTEMPTS_PER_RECORD} attempts"
            ),
        }
    }
}

impl core::error::Error for GenerateError {}

impl From<InvalidParam> for GenerateError {
    fn from(e: InvalidParam) -> Self {
        GenerateError::InvalidRanges(e)
    }
}

/// Seed of record `index`'s private random stream: a SplitMix64-mixed
/// combination of the dataset seed and the record index.
pub fn record_seed(seed: u64, index: u64) -> u64 {
    math::derive_stream(seed, index)
}

/// Draws one subject. Fields are sampled independently and uniformly, in a
/// fixed documented order: mass, stiffness, rest length, x0, y_offset, v0.
pub fn sample_params<R: Rng + ?Sized>(
    rng: &mut R,
    ranges: &SamplingRanges,
) -> (GaitParams, InitialConditions) {
    let mass = rng.random_range(ranges.mass.0..ranges.mass.1);
    let stiffness = rng.random_range(ranges.stiffness.0..ranges.stiffness.1);
    let rest_length = rng.random_range(ranges.rest_length.0..ranges.rest_length.1);
    let x0 = rng.random_range(ranges.x0.0..ranges.x0.1);
    let y_offset = rng.random_range(ranges.y_offset.0..ranges.y_offset.1);
    let v0 = match ranges.v0 {
        VelocityDraw::Fixed(v) => v,
        VelocityDraw::Range(lo, hi) => rng.random_range(lo..hi),
    };
    (
        GaitParams {
            mass,
            stiffness,
            rest_length,
            attack_angle: ranges.attack_angle,
            gravity: ranges.gravity,
        },
        InitialConditions { x0, y_offset, v0 },
    )
}

/// Flattens a trajectory into the network input layout: all x samples, then
/// all y samples, with x translated so the series starts at zero.
pub fn to_features(traj: &Trajectory) -> Vec<f64> {
    let mut features = Vec::with_capacity(2 * traj.len());
    let x_origin = traj.xs.first().copied().unwrap_or(0.0);
    features.extend(traj.xs.iter().map(|x| x - x_origin));
    features.extend_from_slice(&traj.ys);
    features
}

fn attempt_record(
    rng: &mut ChaCha8Rng,
    ranges: &SamplingRanges,
    settings: &SimSettings,
) -> Option<GaitRecord> {
    let (params, init) = sample_params(rng, ranges);
    simulate(&params, &init, settings)
        .ok()
        .map(|traj| GaitRecord { params, init, features: to_features(&traj) })
}

/// Generates record `index` from its private stream, resampling parameters
/// until the simulated gait is valid. Returns the record and the number of
/// simulation attempts it consumed.
pub fn generate_record(
    seed: u64,
    index: u64,
    ranges: &SamplingRanges,
    settings: &SimSettings,
) -> Result<(GaitRecord, u64), GenerateError> {
    let mut rng = ChaCha8Rng::seed_from_u64(record_seed(seed, index));
    for attempt in 1..=MAX_ATTEMPTS_PER_RECORD {
        if let Some(record) = attempt_record(&mut rng, ranges, settings) {
            return Ok((record, attempt));
        }
    }
    Err(GenerateError::RecordExhausted { index })
}

/// Generates `n` records in index order.
///
/// Record `i` depends only on `(seed, i, ranges, settings)`, so any
/// execution order — including parallel generation over indices — must
/// produce this exact dataset. The global acceptance rule is evaluated
/// after every simulation attempt.
pub fn generate(
    n: u64,
    seed: u64,
    ranges: &SamplingRanges,
    settings: &SimSettings,
) -> Result<GaitDataset, GenerateError> {
    ranges.validate()?;
    settings.validate().map_err(GenerateError::InvalidRanges)?;

    let mut records = Vec::with_capacity(n as usize);
    let mut attempts_total = 0u64;
    for index in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(record_seed(seed, index));
        let mut accepted_here = false;
        for _ in 0..MAX_ATTEMPTS_PER_RECORD {
            attempts_total += 1;
            if let Some(record) = attempt_record(&mut rng, ranges, settings) {
                records.push(record);
                accepted_here = true;
            }
            let accepted = records.len() as u64;
            if attempts_total >= ACCEPTANCE_CHECK_ATTEMPTS
                && (accepted as f64) < MIN_ACCEPTANCE_RATE * attempts_total as f64
            {
                return Err(GenerateError::LowAcceptance { attempts: attempts_total, accepted });
            }
            if accepted_here {
                break;
            }
        }
        if !accepted_here {
            return Err(GenerateError::RecordExhausted { index });
        }
    }
    let rejection_count = attempts_total - n;
    let samples_per_channel =
        (math::floor(settings.duration / settings.output_dt) as u32) + 1;
    Ok(GaitDataset {
        meta: DatasetMeta {
            duration: settings.duration,
            output_dt: settings.output_dt,
            gravity: ranges.gravity,
            attack_angle: ranges.attack_angle,
            samples_per_channel,
            rejection_count,
            seed,
        },
        records,
    })
}

/// Replays the per-attempt acceptance rule over completed records' attempt
/// counts (the final attempt of each record is the accepting one); used to
/// keep parallel generation's abort decision identical to the sequential
/// one. Returns the total rejection count.
pub fn enforce_acceptance(attempt_counts: &[u64]) -> Result<u64, GenerateError> {
    let mut attempts_total = 0u64;
    let mut accepted = 0u64;
    for &attempts in attempt_counts {
        for attempt in 1..=attempts {
            attempts_total += 1;
            if attempt == attempts {
                accepted += 1;
            }
            if attempts_total >= ACCEPTANCE_CHECK_ATTEMPTS
                && (accepted as f64) < MIN_ACCEPTANCE_RATE * attempts_total as f64
            {
                return Err(GenerateError::LowAcceptance { attempts: attempts_total, accepted });
            }
        }
    }
    Ok(attempts_total - attempt_counts.len() as u64)
}

// --- binary codec -----------------------------------------------------------
//
// Little-endian layout:
//   magic "GAITDS01" | u32 version | f64 duration | f64 dt | f64 g
//   | f64 alpha0 | u32 samples_per_channel | u64 record_count
//   | u64 rejection_count | u64 seed
//   | records: (m, k, l0, x0, y_offset, v0) as 6 f64, then T x-features
//     and T y-features.

pub const DATASET_MAGIC: [u8; 8] = *b"GAITDS01";
pub const DATASET_VERSION: u32 = 1;

const HEADER_LEN: usize = 8 + 4 + 4 * 8 + 4 + 3 * 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormatError {
    /// Shorter than a full header.
    TruncatedHeader { len: usize },
    BadMagic,
    UnsupportedVersion { version: u32 },
    /// The byte stream ends inside this record.
    TruncatedRecord { index: u64 },
    /// Bytes remain after the last record.
    TrailingBytes { extra: usize },
}

impl core::fmt::Display for FormatError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            FormatError::TruncatedHeader { len } => {
                write!(f, "dataset header truncated ({len} bytes)")
            }
            FormatError::BadMagic => write!(f, "bad dataset magic"),
            FormatError::UnsupportedVersion { version } => {
                write!(f, "unsupported dataset format version {version}")
            }
            FormatError::TruncatedRecord { index } => {
                write!(f, "dataset truncated inside record {index}")
            }
            FormatError::TrailingBytes { extra } => {
                write!(f, "{extra} trailing bytes after the last record")
            }
        }
    }
}

impl core::error::Error for FormatError {}

/// Serializes a dataset to the binary format.
pub fn encode(dataset: &GaitDataset) -> Vec<u8> {
    let t = dataset.meta.samples_per_channel as usize;
    let record_len = 6 * 8 + 2 * t * 8;
    let mut out = Vec::with_capacity(HEADER_LEN + dataset.records.len() * record_len);
    out.extend_from_slice(&DATASET_MAGIC);
    out.extend_from_slice(&DATASET_VERSION.to_le_bytes());
    out.extend_from_slice(&dataset.meta.duration.to_le_bytes());
    out.extend_from_slice(&dataset.meta.output_dt.to_le_bytes());
    out.extend_from_slice(&dataset.meta.gravity.to_le_bytes());
    out.extend_from_slice(&dataset.meta.attack_angle.to_le_bytes());
    out.extend_from_slice(&dataset.meta.samples_per_channel.to_le_bytes());
    out.extend_from_slice(&(dataset.records.len() as u64).to_le_bytes());
    out.extend_from_slice(&dataset.meta.rejection_count.to_le_bytes());
    out.extend_from_slice(&dataset.meta.seed.to_le_bytes());
    for record in &dataset.records {
        debug_assert_eq!(record.features.len(), 2 * t);
        debug_assert_eq!(record.params.attack_angle, dataset.meta.attack_angle);
        debug_assert_eq!(record.params.gravity, dataset.meta.gravity);
        for v in [
            record.params.mass,
            record.params.stiffness,
            record.params.rest_length,
            record.init.x0,
            record.init.y_offset,
            record.init.v0,
        ] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for v in &record.features {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let slice = self.bytes.get(self.pos..self.pos + n)?;
        self.pos += n;
        Some(slice)
    }

    fn f64(&mut self) -> Option<f64> {
        self.take(8).map(|b| f64::from_le_bytes(b.try_into().unwrap()))
    }

    fn u64(&mut self) -> Option<u64> {
        self.take(8).map(|b| u64::from_le_bytes(b.try_into().unwrap()))
    }

    fn u32(&mut self) -> Option<u32> {
        self.take(4).map(|b| u32::from_le_bytes(b.try_into().unwrap()))
    }
}

/// Parses a dataset from the binary format.
pub fn decode(bytes: &[u8]) -> Result<GaitDataset, FormatError> {
    if bytes.len() < HEADER_LEN {
        return Err(FormatError::TruncatedHeader { len: bytes.len() });
    }
    let mut r = Reader { bytes, pos: 0 };
    if r.take(8).unwrap() != DATASET_MAGIC {
        return Err(FormatError::BadMagic);
    }
    let version = r.u32().unwrap();
    if version != DATASET_VERSION {
        return Err(FormatError::UnsupportedVersion { version });
    }
    let duration = r.f64().unwrap();
    let output_dt = r.f64().unwrap();
    let gravity = r.f64().unwrap();
    let attack_angle = r.f64().unwrap();
    let samples_per_channel = r.u32().unwrap();
    let record_count = r.u64().unwrap();
    let rejection_count = r.u64().unwrap();
    let seed = r.u64().unwrap();

    let t = samples_per_channel as usize;
    let mut records = Vec::with_capacity(record_count.min(1 << 20) as usize);
    for index in 0..record_count {
        let field = |r: &mut Reader| r.f64().ok_or(FormatError::TruncatedRecord { index });
        let mass = field(&mut r)?;
        let stiffness = field(&mut r)?;
        let rest_length = field(&mut r)?;
        let x0 = field(&mut r)?;
        let y_offset = field(&mut r)?;
        let v0 = field(&mut r)?;
        let mut features = Vec::with_capacity(2 * t);
        for _ in 0..2 * t {
            features.push(field(&mut r)?);
        }
        records.push(GaitRecord {
            params: GaitParams {
                mass,
                stiffness,
                rest_length,
                attack_angle,
                gravity,
            },
            init: InitialConditions { x0, y_offset, v0 },
            features,
        });
    }
    if r.pos != bytes.len() {
        return Err(FormatError::TrailingBytes { extra: bytes.len() - r.pos });
    }
    Ok(GaitDataset {
        meta: DatasetMeta {
            duration,
            output_dt,
            gravity,
            attack_angle,
            samples_per_channel,
            rejection_count,
            seed,
        },
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn quick_settings() -> SimSettings {
        SimSettings { duration: 2.0, output_dt: 0.1, internal_h: 1e-3 }
    }

    #[test]
    fn sampled_parameters_stay_in_ranges_with_uniform_mean() {
        let ranges = SamplingRanges::default();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let (p, _) = sample_params(&mut rng, &ranges);
            assert!(p.mass >= 60.0 && p.mass <= 75.0);
            assert!(p.stiffness >= 8000.0 && p.stiffness <= 10000.0);
            assert!(p.rest_length >= 0.6 && p.rest_length <= 0.8);
            sum += p.mass;
        }
        let mean = sum / n as f64;
        assert!((mean - 67.5).abs() < 0.05, "mass mean {mean}");
    }

    #[test]
    fn sampling_handles_degenerate_ranges() {
        let eps = 1e-12;
        let ranges = SamplingRanges {
            mass: (70.0, 70.0 + eps),
            ..SamplingRanges::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            let (p, _) = sample_params(&mut rng, &ranges);
            assert!((p.mass - 70.0).abs() <= eps);
        }
    }

    #[test]
    fn sampling_is_deterministic_for_a_seed() {
        let ranges = SamplingRanges::default();
        let draw = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..32).map(|_| sample_params(&mut rng, &ranges)).collect::<Vec<_>>()
        };
        assert_eq!(draw(7), draw(7));
        assert_ne!(draw(7), draw(8));
    }

    #[test]
    fn features_start_at_zero_with_expected_length() {
        let params = GaitParams {
            mass: 70.0,
            stiffness: 9000.0,
            rest_length: 0.7,
            attack_angle: 69.0_f64.to_radians(),
            gravity: 10.0,
        };
        let ic = InitialConditions { x0: 0.07, y_offset: 0.0, v0: 0.85 };
        let traj = simulate(&params, &ic, &SimSettings::default()).expect("walks");
        let features = to_features(&traj);
        assert_eq!(features.len(), 302);
        assert_eq!(features[0], 0.0);
        assert_eq!(features[151], traj.ys[0]);
    }

    #[test]
    fn generate_is_reproducible_and_order_independent() {
        let ranges = SamplingRanges::default();
        let settings = quick_settings();
        let a = generate(40, 7, &ranges, &settings).unwrap();
        let b = generate(40, 7, &ranges, &settings).unwrap();
        assert_eq!(a, b);
        // Record i is a pure function of (seed, i): rebuilding out of order
        // must agree with the sequential dataset.
        for index in [31u64, 5, 17] {
            let (record, _) = generate_record(7, index, &ranges, &settings).unwrap();
            assert_eq!(record, a.records[index as usize]);
        }
        assert!(a.records.iter().all(|r| r.features.iter().all(|f| f.is_finite())));
    }

    #[test]
    fn generate_reports_rejections() {
        let ds = generate(40, 3, &SamplingRanges::default(), &quick_settings()).unwrap();
        // Some draws fail under the default ranges; the count is metadata,
        // not a target, but it must be consistent with determinism.
        let again = generate(40, 3, &SamplingRanges::default(), &quick_settings()).unwrap();
        assert_eq!(ds.meta.rejection_count, again.meta.rejection_count);
    }

    #[test]
    fn generate_aborts_on_non_walking_regime() {
        // A tiny attack angle makes essentially every draw fail.
        let ranges = SamplingRanges {
            attack_angle: 0.05,
            ..SamplingRanges::default()
        };
        let err = generate(100, 1, &ranges, &quick_settings()).unwrap_err();
        assert!(matches!(
            err,
            GenerateError::RecordExhausted { .. } | GenerateError::LowAcceptance { .. }
        ));
    }

    #[test]
    fn enforce_acceptance_matches_sequential_rule() {
        // Eleven records at the attempt cap: acceptance dips below 1% at
        // attempt 1001 while the eleventh record is still resampling.
        let below: Vec<u64> = alloc::vec![MAX_ATTEMPTS_PER_RECORD; 11];
        assert!(matches!(
            enforce_acceptance(&below),
            Err(GenerateError::LowAcceptance { .. })
        ));
        // Exactly 1% acceptance never falls strictly below the threshold.
        let at_threshold: Vec<u64> = alloc::vec![MAX_ATTEMPTS_PER_RECORD; 10];
        assert!(enforce_acceptance(&at_threshold).is_ok());
        let healthy: Vec<u64> = alloc::vec![2; 600];
        assert_eq!(enforce_acceptance(&healthy).unwrap(), 600);
    }

    #[test]
    fn codec_round_trip_is_byte_identical() {
        let ds = generate(12, 99, &SamplingRanges::default(), &quick_settings()).unwrap();
        let bytes = encode(&ds);
        let back = decode(&bytes).unwrap();
        assert_eq!(back, ds);
        assert_eq!(encode(&back), bytes);
    }

    #[test]
    fn codec_round_trips_empty_dataset() {
        let ds = generate(0, 1, &SamplingRanges::default(), &quick_settings()).unwrap();
        let bytes = encode(&ds);
        assert_eq!(decode(&bytes).unwrap(), ds);
    }

    #[test]
    fn decode_rejects_bad_magic() {
        let ds = generate(2, 5, &SamplingRanges::default(), &quick_settings()).unwrap();
        let mut bytes = encode(&ds);
        bytes[0] ^= 0xFF;
        assert_eq!(decode(&bytes), Err(FormatError::BadMagic));
    }

    #[test]
    fn decode_rejects_bad_version() {
        let ds = generate(1, 5, &SamplingRanges::default(), &quick_settings()).unwrap();
        let mut bytes = encode(&ds);
        bytes[8] = 9;
        assert_eq!(
            decode(&bytes),
            Err(FormatError::UnsupportedVersion { version: 9 })
        );
    }

    #[test]
    fn decode_names_truncated_record() {
        let ds = generate(3, 5, &SamplingRanges::default(), &quick_settings()).unwrap();
        let bytes = encode(&ds);
        // Cut inside the last record.
        let cut = bytes.len() - 11;
        assert_eq!(
            decode(&bytes[..cut]),
            Err(FormatError::TruncatedRecord { index: 2 })
        );
        assert_eq!(
            decode(&bytes[..10]),
            Err(FormatError::TruncatedHeader { len: 10 })
        );
    }

    #[test]
    fn decode_rejects_trailing_bytes() {
        let ds = generate(1, 5, &SamplingRanges::default(), &quick_settings()).unwrap();
        let mut bytes = encode(&ds);
        bytes.push(0);
        assert_eq!(decode(&bytes), Err(FormatError::TrailingBytes { extra: 1 }));
    }

    #[test]
    fn record_seed_is_index_sensitive() {
        assert_ne!(record_seed(1, 0), record_seed(1, 1));
        assert_ne!(record_seed(1, 0), record_seed(2, 0));
    }
}
