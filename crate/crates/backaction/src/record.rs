//! Continuous measurement records and the quantum-jump analysis chain:
//! binomial smoothing, threshold jump detection, equilibrium population
//! and relaxation-time estimation.

use std::io::{BufRead, Read, Write};

use thiserror::Error;

use crate::fit::{exponential_fit, FitError, FitResult};
use crate::params::{QubitParams, StrengthParams};
use crate::rng::{normal, SeedPlan};
use crate::sampler::{sample_telegraph, sample_thermal_label, LabelPath, SamplerError};

/// A uniformly sampled measurement record in scaled units, with the
/// ground-truth trajectory kept for validation only. Detectors and
/// estimators never consult `truth`.
#[derive(Clone, Debug)]
pub struct Record {
    pub samples: Vec<f64>,
    pub dt: f64,
    /// Stream id that generated this record.
    pub seed: u64,
    pub truth: Option<LabelPath>,
}

impl Record {
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 * self.dt
    }
}

#[derive(Debug, Error)]
pub enum RecordError {
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error("filter width {width} shorter than the sample period {dt}")]
    FilterTooNarrow { width: f64, dt: f64 },
    #[error("filter width must be an even number of samples, got width/dt = {0}")]
    OddFilterWidth(f64),
    #[error("jump detection needs separated centers; strength is zero")]
    ZeroStrength,
    #[error("no downward transitions observed; statistics insufficient")]
    NoDownTransitions,
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error("record I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed record stream: {0}")]
    Malformed(String),
}

/// Per-sample displacement so that a window of `t_m / dt` samples averages
/// to the integrated strength `s`.
pub fn per_sample_strength(s: f64, t_m: f64, dt: f64) -> f64 {
    s / (t_m / dt).sqrt()
}

/// Synthesize one continuous record: a thermal-equilibrium telegraph
/// trajectory observed through unit Gaussian noise at each sample.
pub fn generate_record(
    sp: &StrengthParams,
    qp: &QubitParams,
    duration: f64,
    dt: f64,
    t_m: f64,
    plan: SeedPlan,
) -> Result<Record, RecordError> {
    let mut rng = plan.rng();
    let initial = sample_thermal_label(qp.p_eq, &mut rng);
    generate_record_from(sp, qp, initial, duration, dt, t_m, plan.stream_id, &mut rng)
}

/// Synthesize one record starting from a known label (e.g. prepared
/// excited for relaxation fits).
pub fn generate_record_prepared(
    sp: &StrengthParams,
    qp: &QubitParams,
    initial: i8,
    duration: f64,
    dt: f64,
    t_m: f64,
    plan: SeedPlan,
) -> Result<Record, RecordError> {
    let mut rng = plan.rng();
    generate_record_from(sp, qp, initial, duration, dt, t_m, plan.stream_id, &mut rng)
}

#[allow(clippy::too_many_arguments)]
fn generate_record_from(
    sp: &StrengthParams,
    qp: &QubitParams,
    initial: i8,
    duration: f64,
    dt: f64,
    t_m: f64,
    seed: u64,
    rng: &mut crate::rng::TrialRng,
) -> Result<Record, RecordError> {
    let path = sample_telegraph(qp, initial, duration, dt, rng)?;
    let s_inst = per_sample_strength(sp.s, t_m, dt);
    let samples = path
        .labels
        .iter()
        .map(|&l| s_inst * l as f64 + normal(rng))
        .collect();
    Ok(Record {
        samples,
        dt,
        seed,
        truth: Some(path),
    })
}

/// Normalized binomial filter taps `C(n, k) / 2^n`, k = 0..=n.
fn binomial_taps(n: usize) -> Vec<f64> {
    let mut taps = vec![0.0; n + 1];
    let mut c = 1.0f64;
    for (k, t) in taps.iter_mut().enumerate() {
        *t = c;
        c = c * (n - k) as f64 / (k + 1) as f64;
    }
    let norm = 2.0f64.powi(n as i32);
    taps.iter_mut().for_each(|t| *t /= norm);
    taps
}

/// Noise standard deviation after an (n+1)-tap binomial filter of unit
/// white noise: `sqrt(sum of squared taps)`.
pub fn binomial_noise_sigma(n: usize) -> f64 {
    binomial_taps(n).iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Mode center of a filtered record, in its rescaled units: the per-sample
/// strength carried through the unit-DC-gain filter and the noise rescale.
pub fn filtered_center(s: f64, t_m: f64, dt: f64) -> f64 {
    let n = (t_m / dt).round() as usize;
    per_sample_strength(s, t_m, dt) / binomial_noise_sigma(n)
}

/// Smooth a record with a binomial filter of the given width (seconds).
///
/// `width / dt` must be a non-negative even integer `n`; the filter has
/// `n + 1` taps. Interior samples use the full window; edges shrink to
/// symmetric sub-windows (radius `min(j, len-1-j, n/2)`), which preserves
/// DC gain but leaves the edge noise larger. The output is rescaled by the
/// interior noise sigma so the two state distributions have unit standard
/// deviation.
pub fn binomial_filter(record: &Record, width: f64) -> Result<Record, RecordError> {
    if width < record.dt {
        return Err(RecordError::FilterTooNarrow {
            width,
            dt: record.dt,
        });
    }
    let n_f = width / record.dt;
    let n = n_f.round() as usize;
    if (n_f - n as f64).abs() > 1e-9 * n_f.max(1.0) || n % 2 != 0 {
        return Err(RecordError::OddFilterWidth(n_f));
    }
    let half = n / 2;
    let taps = binomial_taps(n);
    let scale = 1.0 / binomial_noise_sigma(n);
    let x = &record.samples;
    let len = x.len();
    let mut out = vec![0.0; len];
    for (j, o) in out.iter_mut().enumerate() {
        let r = half.min(j).min(len - 1 - j);
        if r == half {
            let mut acc = 0.0;
            for (k, t) in taps.iter().enumerate() {
                acc += t * x[j - half + k];
            }
            *o = acc * scale;
        } else {
            let sub = binomial_taps(2 * r);
            let mut acc = 0.0;
            for (k, t) in sub.iter().enumerate() {
                acc += t * x[j - r + k];
            }
            *o = acc * scale;
        }
    }
    Ok(Record {
        samples: out,
        dt: record.dt,
        seed: record.seed,
        truth: record.truth.clone(),
    })
}

/// Direction of a detected transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JumpDirection {
    Up,
    Down,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jump {
    /// Detection time (s) from the start of the record.
    pub time: f64,
    pub direction: JumpDirection,
}

/// Segmentation of one record into alternating qubit states.
#[derive(Clone, Debug)]
pub struct JumpReport {
    pub jumps: Vec<Jump>,
    /// State assigned at t = 0.
    pub initial_state: i8,
    /// Total time spent assigned excited (s).
    pub dwell_excited: f64,
    /// Total time spent assigned ground (s).
    pub dwell_ground: f64,
    pub duration: f64,
}

impl JumpReport {
    pub fn downs(&self) -> usize {
        self.jumps
            .iter()
            .filter(|j| j.direction == JumpDirection::Down)
            .count()
    }

    pub fn ups(&self) -> usize {
        self.jumps
            .iter()
            .filter(|j| j.direction == JumpDirection::Up)
            .count()
    }

    /// Segments as (start, end, label); dwell times sum to the duration.
    pub fn segments(&self) -> Vec<(f64, f64, i8)> {
        let mut out = Vec::with_capacity(self.jumps.len() + 1);
        let mut state = self.initial_state;
        let mut start = 0.0;
        for j in &self.jumps {
            out.push((start, j.time, state));
            start = j.time;
            state = match j.direction {
                JumpDirection::Up => 1,
                JumpDirection::Down => -1,
            };
        }
        out.push((start, self.duration, state));
        out
    }
}

/// Hysteretic two-state jump detector on a filtered record.
///
/// The two state centers sit at `+-center` (filtered units); a jump is
/// declared at the first sample deviating at least `threshold` noise
/// sigmas from the current center toward the other state, and the new
/// state is the nearest center. Only full-filter-window samples are
/// scanned: the shrinking edge windows carry up to 2.5x the interior
/// noise and would otherwise fire spuriously. The initial state is the
/// nearest center to the first full-window sample, extended back to t=0.
pub fn detect_jumps(
    filtered: &Record,
    center: f64,
    threshold: f64,
    filter_width: f64,
) -> Result<JumpReport, RecordError> {
    if center <= 0.0 {
        return Err(RecordError::ZeroStrength);
    }
    let half = ((filter_width / filtered.dt).round() as usize) / 2;
    let len = filtered.samples.len();
    if len <= 2 * half {
        return Err(RecordError::FilterTooNarrow {
            width: filter_width,
            dt: filtered.duration(),
        });
    }
    let first = filtered.samples[half];
    let mut state: i8 = if first >= 0.0 { 1 } else { -1 };
    let initial_state = state;
    let mut jumps = Vec::new();
    for k in half..len - half {
        let v = filtered.samples[k];
        if state > 0 {
            if v <= center - threshold {
                state = -1;
                jumps.push(Jump {
                    time: k as f64 * filtered.dt,
                    direction: JumpDirection::Down,
                });
            }
        } else if v >= -center + threshold {
            state = 1;
            jumps.push(Jump {
                time: k as f64 * filtered.dt,
                direction: JumpDirection::Up,
            });
        }
    }
    let duration = filtered.duration();
    let mut dwell_excited = 0.0;
    let mut cur = initial_state;
    let mut start = 0.0;
    for j in &jumps {
        if cur > 0 {
            dwell_excited += j.time - start;
        }
        start = j.time;
        cur = match j.direction {
            JumpDirection::Up => 1,
            JumpDirection::Down => -1,
        };
    }
    if cur > 0 {
        dwell_excited += duration - start;
    }
    Ok(JumpReport {
        jumps,
        initial_state,
        dwell_excited,
        dwell_ground: duration - dwell_excited,
        duration,
    })
}

/// Transition-counting estimates from an ensemble of jump reports:
/// `t1_bound = total excited dwell / number of down transitions` (an
/// upper-bound-style estimator, since merged jump pairs go uncounted) and
/// `p_eq = excited dwell fraction`.
pub fn estimate_t1_counting(reports: &[JumpReport]) -> Result<(f64, f64), RecordError> {
    let excited: f64 = reports.iter().map(|r| r.dwell_excited).sum();
    let total: f64 = reports.iter().map(|r| r.duration).sum();
    let downs: usize = reports.iter().map(|r| r.downs()).sum();
    if downs == 0 {
        return Err(RecordError::NoDownTransitions);
    }
    Ok((excited / downs as f64, excited / total))
}

/// Relaxation time from the sample-wise average of filtered records
/// prepared excited, fitted to `a exp(-t/T) + b`.
pub fn estimate_t1_fit(filtered: &[Record]) -> Result<FitResult, RecordError> {
    let first = filtered.first().ok_or(FitError::TooFewPoints {
        needed: 1,
        got: 0,
    })?;
    let len = first.samples.len();
    let dt = first.dt;
    let mut avg = vec![0.0; len];
    for r in filtered {
        assert_eq!(r.samples.len(), len, "records must share a time base");
        for (a, s) in avg.iter_mut().zip(&r.samples) {
            *a += s;
        }
    }
    let n = filtered.len() as f64;
    let series: Vec<(f64, f64)> = avg
        .iter()
        .enumerate()
        .map(|(k, a)| (k as f64 * dt, a / n))
        .collect();
    Ok(exponential_fit(&series)?)
}

// --- Record import/export -------------------------------------------------

const BINARY_MAGIC: &[u8; 4] = b"BARC";
const BINARY_VERSION: u16 = 1;

#[derive(serde::Serialize, serde::Deserialize)]
struct RecordLine {
    seed: u64,
    dt: f64,
    samples: Vec<f64>,
}

/// Write records as NDJSON, one `{seed, dt, samples}` object per line.
/// Ground truth is intentionally not serialized.
pub fn write_ndjson(records: &[Record], mut w: impl Write) -> Result<(), RecordError> {
    for r in records {
        let line = RecordLine {
            seed: r.seed,
            dt: r.dt,
            samples: r.samples.clone(),
        };
        serde_json::to_writer(&mut w, &line).map_err(|e| RecordError::Malformed(e.to_string()))?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_ndjson(r: impl BufRead) -> Result<Vec<Record>, RecordError> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: RecordLine =
            serde_json::from_str(&line).map_err(|e| RecordError::Malformed(e.to_string()))?;
        out.push(Record {
            samples: parsed.samples,
            dt: parsed.dt,
            seed: parsed.seed,
            truth: None,
        });
    }
    Ok(out)
}

/// Write records in the packed little-endian format:
/// magic `BARC`, version (u16), dt (f64), record count (u32), then per
/// record: seed (u64), sample count (u32), samples (f64 each).
pub fn write_binary(records: &[Record], mut w: impl Write) -> Result<(), RecordError> {
    let dt = records.first().map(|r| r.dt).unwrap_or(0.0);
    w.write_all(BINARY_MAGIC)?;
    w.write_all(&BINARY_VERSION.to_le_bytes())?;
    w.write_all(&dt.to_le_bytes())?;
    w.write_all(&(records.len() as u32).to_le_bytes())?;
    for r in records {
        w.write_all(&r.seed.to_le_bytes())?;
        w.write_all(&(r.samples.len() as u32).to_le_bytes())?;
        for s in &r.samples {
            w.write_all(&s.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_binary(mut r: impl Read) -> Result<Vec<Record>, RecordError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(RecordError::Malformed("bad magic".into()));
    }
    let mut u16b = [0u8; 2];
    r.read_exact(&mut u16b)?;
    let version = u16::from_le_bytes(u16b);
    if version != BINARY_VERSION {
        return Err(RecordError::Malformed(format!(
            "unsupported version {version}"
        )));
    }
    let mut f64b = [0u8; 8];
    r.read_exact(&mut f64b)?;
    let dt = f64::from_le_bytes(f64b);
    let mut u32b = [0u8; 4];
    r.read_exact(&mut u32b)?;
    let count = u32::from_le_bytes(u32b);
    let mut out = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let mut u64b = [0u8; 8];
        r.read_exact(&mut u64b)?;
        let seed = u64::from_le_bytes(u64b);
        r.read_exact(&mut u32b)?;
        let n = u32::from_le_bytes(u32b) as usize;
        let mut samples = Vec::with_capacity(n);
        for _ in 0..n {
            r.read_exact(&mut f64b)?;
            samples.push(f64::from_le_bytes(f64b));
        }
        out.push(Record {
            samples,
            dt,
            seed,
            truth: None,
        });
    }
    Ok(out)
}
