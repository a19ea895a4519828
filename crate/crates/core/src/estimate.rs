//! Importance-sampling estimates of the number of open tours.
//!
//! Each sample is a random self-avoiding knight walk. The start square is
//! uniform; afterwards a free neighbour `m` is chosen with probability
//! proportional to `(d(m) + epsilon)^(-alpha)`, where `d(m)` counts the free
//! neighbours of `m`. Large `alpha` approaches the classic "fewest onward
//! moves first" heuristic, `alpha = 0` is a uniform walk. Because every legal
//! move keeps positive probability, every tour can be produced, and the
//! weight of a complete walk (its inverse probability, zero for a walk that
//! gets stuck) is an unbiased estimate of the number of directed tours.
//!
//! Samples are drawn in fixed-size streams. Stream `k` uses its own ChaCha8
//! keystream (`seed_from_u64(seed)` then `set_stream(k)`), so the multiset of
//! samples, and the merged report, do not depend on how many workers run.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::board::{AdjacencyTable, BoardSpec};
use crate::error::{Error, Result};
use crate::parallel::Executor;

/// Samples per random stream.
pub const STREAM_SAMPLES: u64 = 4096;

/// Identifies the random number generator and how it is keyed.
pub const GENERATOR: &str =
    "rand_chacha 0.3.1 ChaCha8Rng; seed_from_u64(seed), set_stream(stream index); 4096 samples per stream";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartMode {
    UniformOverSquares,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePolicy {
    pub alpha: f64,
    pub epsilon: f64,
    pub start_mode: StartMode,
}

impl Default for SamplePolicy {
    fn default() -> Self {
        SamplePolicy {
            alpha: 2.0,
            epsilon: 1.0,
            start_mode: StartMode::UniformOverSquares,
        }
    }
}

impl SamplePolicy {
    pub fn new(alpha: f64, epsilon: f64) -> Result<Self> {
        let p = SamplePolicy {
            alpha,
            epsilon,
            ..SamplePolicy::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be finite and non-negative, got {}",
                self.alpha
            )));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be finite and positive, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }

    /// Unnormalised selection weight of a move with `degree` onward moves.
    pub fn move_weight(&self, degree: usize) -> f64 {
        (degree as f64 + self.epsilon).powf(-self.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleOutcome {
    pub success: bool,
    /// `-sum(ln p)` over every choice made, the start included. On failure
    /// this covers the partial walk only.
    pub log_weight: f64,
    pub steps_reached: usize,
}

impl SampleOutcome {
    /// Importance weight: inverse path probability on success, else zero.
    pub fn weight(&self) -> f64 {
        if self.success {
            self.log_weight.exp()
        } else {
            0.0
        }
    }
}

/// Precomputed sampler for one board and policy.
#[derive(Debug, Clone)]
pub struct Sampler {
    adj: Vec<u64>,
    full: u64,
    squares: usize,
    bias: [f64; 9],
    policy: SamplePolicy,
}

impl Sampler {
    pub fn new(board: &BoardSpec, policy: SamplePolicy) -> Result<Self> {
        board.require_countable()?;
        policy.validate()?;
        let mut bias = [0.0; 9];
        for (d, b) in bias.iter_mut().enumerate() {
            *b = policy.move_weight(d);
        }
        Ok(Sampler {
            adj: AdjacencyTable::new(board).masks().to_vec(),
            full: board.full_mask(),
            squares: board.squares(),
            bias,
            policy,
        })
    }

    pub fn policy(&self) -> &SamplePolicy {
        &self.policy
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SampleOutcome {
        self.walk(rng, None)
    }

    /// Like [`Sampler::sample`], also recording the squares visited.
    pub fn sample_recorded<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        path: &mut Vec<usize>,
    ) -> SampleOutcome {
        path.clear();
        self.walk(rng, Some(path))
    }

    fn walk<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        mut path: Option<&mut Vec<usize>>,
    ) -> SampleOutcome {
        let mut cur = rng.gen_range(0..self.squares);
        let mut log_weight = (self.squares as f64).ln();
        let mut free = self.full & !(1u64 << cur);
        let mut steps = 1;
        if let Some(p) = path.as_deref_mut() {
            p.push(cur);
        }
        let mut moves = [0usize; 8];
        let mut weights = [0f64; 8];
        while free != 0 {
            let mut cand = self.adj[cur] & free;
            if cand == 0 {
                return SampleOutcome {
                    success: false,
                    log_weight,
                    steps_reached: steps,
                };
            }
            let mut k = 0;
            let mut total = 0.0;
            while cand != 0 {
                let m = cand.trailing_zeros() as usize;
                cand &= cand - 1;
                let w = self.bias[(self.adj[m] & free).count_ones() as usize];
                moves[k] = m;
                weights[k] = w;
                total += w;
                k += 1;
            }
            let pick = if k == 1 {
                0
            } else {
                let mut u = rng.gen::<f64>() * total;
                let mut i = 0;
                while i + 1 < k && u >= weights[i] {
                    u -= weights[i];
                    i += 1;
                }
                log_weight += (total / weights[i]).ln();
                i
            };
            cur = moves[pick];
            free &= !(1u64 << cur);
            steps += 1;
            if let Some(p) = path.as_deref_mut() {
                p.push(cur);
            }
        }
        SampleOutcome {
            success: true,
            log_weight,
            steps_reached: steps,
        }
    }
}

pub fn sample_path<R: Rng + ?Sized>(
    board: &BoardSpec,
    policy: SamplePolicy,
    rng: &mut R,
) -> Result<SampleOutcome> {
    Ok(Sampler::new(board, policy)?.sample(rng))
}

/// Running count, mean and sum of squared deviations (Welford), merged
/// across streams with Chan's pairwise update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Moments {
    n: u64,
    successes: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64, success: bool) {
        self.n += 1;
        self.successes += success as u64;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(&mut self, o: &Moments) {
        if o.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *o;
            return;
        }
        let n = self.n + o.n;
        let delta = o.mean - self.mean;
        self.mean += delta * o.n as f64 / n as f64;
        self.m2 += o.m2 + delta * delta * (self.n as f64 * o.n as f64 / n as f64);
        self.n = n;
        self.successes += o.successes;
    }

    fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    /// Directed open numberings.
    N,
    /// Geometrically distinct open tours.
    G,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub target: Target,
    pub board: BoardSpec,
    pub point_estimate: f64,
    pub sample_count: u64,
    pub successes: u64,
    pub sample_variance: f64,
    pub standard_error: f64,
    pub confidence_level: f64,
    pub z: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    pub policy: SamplePolicy,
    pub generator: String,
    /// Set when the figure was obtained by dividing a numbering estimate by
    /// twice the group order, which is exact only if no open diagram has a
    /// non-trivial symmetry.
    pub assumes_asymmetric_diagrams: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateRequest {
    pub samples: u64,
    pub policy: SamplePolicy,
    pub confidence: f64,
    pub seed: u64,
}

#[derive(Serialize)]
struct LogRecord {
    stream: u64,
    sample: u64,
    success: bool,
    log_weight: f64,
}

pub fn estimate_numberings(
    board: &BoardSpec,
    samples: u64,
    policy: SamplePolicy,
    confidence: f64,
    seed: u64,
) -> Result<EstimateReport> {
    let req = EstimateRequest {
        samples,
        policy,
        confidence,
        seed,
    };
    run_estimate(board, &req, &Executor::default(), None)
}

/// Estimates N, optionally writing one JSON line per sample to `log`
/// (stream, sample index within stream, success, log-weight), in stream
/// order.
pub fn run_estimate(
    board: &BoardSpec,
    req: &EstimateRequest,
    exec: &Executor,
    log: Option<&mut dyn Write>,
) -> Result<EstimateReport> {
    if req.samples < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 samples, got {}",
            req.samples
        )));
    }
    let z = z_value(req.confidence)?;
    let sampler = Sampler::new(board, req.policy)?;
    let streams: Vec<u64> = (0..req.samples.div_ceil(STREAM_SAMPLES)).collect();
    let keep = log.is_some();
    let parts = exec.map(&streams, |&k| {
        let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
        rng.set_stream(k);
        let len = STREAM_SAMPLES.min(req.samples - k * STREAM_SAMPLES);
        let mut m = Moments::default();
        let mut outcomes = Vec::new();
        for _ in 0..len {
            let o = sampler.sample(&mut rng);
            m.push(o.weight(), o.success);
            if keep {
                outcomes.push(o);
            }
        }
        (m, outcomes)
    });

    let mut total = Moments::default();
    for (m, _) in &parts {
        total.merge(m);
    }
    if let Some(out) = log {
        for (k, (_, outcomes)) in parts.iter().enumerate() {
            for (i, o) in outcomes.iter().enumerate() {
                let rec = LogRecord {
                    stream: k as u64,
                    sample: i as u64,
                    success: o.success,
                    log_weight: o.log_weight,
                };
                serde_json::to_writer(&mut *out, &rec)
                    .map_err(|e| Error::InvalidParameter(e.to_string()))?;
                out.write_all(b"\n")
                    .map_err(|e| Error::InvalidParameter(format!("sample log: {e}")))?;
            }
        }
    }

    let variance = total.variance();
    let (ci_low, ci_high) = confidence_interval(total.mean, variance, total.n, req.confidence)?;
    Ok(EstimateReport {
        target: Target::N,
        board: *board,
        point_estimate: total.mean,
        sample_count: total.n,
        successes: total.successes,
        sample_variance: variance,
        standard_error: (variance / total.n as f64).sqrt(),
        confidence_level: req.confidence,
        z,
        ci_low,
        ci_high,
        seed: req.seed,
        policy: req.policy,
        generator: GENERATOR.into(),
        assumes_asymmetric_diagrams: false,
    })
}

/// Rescales a numbering estimate to geometric classes by dividing by 16
/// (two numberings per diagram, eight symmetries per class).
pub fn derive_geometric_estimate(report: &EstimateReport) -> Result<EstimateReport> {
    if report.target != Target::N {
        return Err(Error::InvalidParameter(
            "report is not a numbering estimate".into(),
        ));
    }
    if !report.board.is_square() {
        return Err(Error::InvalidParameter(format!(
            "class estimate needs a square board, got {}",
            report.board
        )));
    }
    const SCALE: f64 = 16.0;
    Ok(EstimateReport {
        target: Target::G,
        point_estimate: report.point_estimate / SCALE,
        sample_variance: report.sample_variance / (SCALE * SCALE),
        standard_error: report.standard_error / SCALE,
        ci_low: report.ci_low / SCALE,
        ci_high: report.ci_high / SCALE,
        assumes_asymmetric_diagrams: true,
        ..report.clone()
    })
}

/// Two-sided standard normal quantile for `confidence`, from statrs's
/// inverse normal CDF.
pub fn z_value(confidence: f64) -> Result<f64> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "confidence must lie in (0, 1), got {confidence}"
        )));
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(normal.inverse_cdf(0.5 + confidence / 2.0))
}

/// Normal-approximation interval `mean ± z * sqrt(variance / n)`.
pub fn confidence_interval(
    mean: f64,
    variance: f64,
    n: u64,
    confidence: f64,
) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    if !(variance.is_finite() && variance >= 0.0) || !mean.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "mean and variance must be finite, variance non-negative (got {mean}, {variance})"
        )));
    }
    let half = z_value(confidence)? * (variance / n as f64).sqrt();
    Ok((mean - half, mean + half))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn board(r: usize, c: usize) -> BoardSpec {
        BoardSpec::new(r, c).unwrap()
    }

    #[test]
    fn z_table() {
        assert!((z_value(0.99).unwrap() - 2.5758).abs() < 1e-4);
        assert!((z_value(0.95).unwrap() - 1.9600).abs() < 1e-4);
        assert!((z_value(0.90).unwrap() - 1.6449).abs() < 1e-4);
        assert!(z_value(1.0).is_err() && z_value(0.0).is_err() && z_value(f64::NAN).is_err());
    }

    #[test]
    fn interval_examples() {
        assert_eq!(confidence_interval(3.0, 0.0, 10, 0.99).unwrap(), (3.0, 3.0));
        let (lo, hi) = confidence_interval(0.0, 1.0, 10_000, 0.99).unwrap();
        assert!((hi - 0.025758).abs() < 1e-6 && (lo + 0.025758).abs() < 1e-6);
        let mut last = 0.0;
        for c in [0.5, 0.8, 0.9, 0.95, 0.99, 0.999] {
            let (_, hi) = confidence_interval(0.0, 2.0, 50, c).unwrap();
            assert!(hi > last);
            last = hi;
        }
        assert!(confidence_interval(0.0, 1.0, 1, 0.99).is_err());
        assert!(confidence_interval(0.0, -1.0, 10, 0.99).is_err());
    }

    #[test]
    fn moments_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 1.5).collect();
        let mut whole = Moments::default();
        xs.iter().for_each(|&x| whole.push(x, true));
        let mut merged = Moments::default();
        for chunk in xs.chunks(97) {
            let mut m = Moments::default();
            chunk.iter().for_each(|&x| m.push(x, true));
            merged.merge(&m);
        }
        assert_eq!(merged.n, whole.n);
        assert!((merged.mean - whole.mean).abs() < 1e-9);
        assert!((merged.variance() - whole.variance()).abs() / whole.variance() < 1e-9);
    }

    #[test]
    fn impossible_board_never_succeeds() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            assert!(
                !sample_path(&board(3, 3), SamplePolicy::default(), &mut rng)
                    .unwrap()
                    .success
            );
        }
        let r = estimate_numberings(&board(4, 4), 5000, SamplePolicy::default(), 0.99, 7).unwrap();
        assert_eq!(r.point_estimate, 0.0);
        assert_eq!(r.sample_variance, 0.0);
        assert_eq!((r.ci_low, r.ci_high), (0.0, 0.0));
    }

    #[test]
    fn uniform_policy_at_alpha_zero() {
        let p = SamplePolicy::new(0.0, 1.0).unwrap();
        assert!((0..9).all(|d| p.move_weight(d) == 1.0));
    }

    #[test]
    fn invalid_parameters() {
        assert!(SamplePolicy::new(-1.0, 1.0).is_err());
        assert!(SamplePolicy::new(1.0, 0.0).is_err());
        let b = board(5, 5);
        assert!(estimate_numberings(&b, 1, SamplePolicy::default(), 0.99, 0).is_err());
        assert!(estimate_numberings(&b, 100, SamplePolicy::default(), 1.5, 0).is_err());
        assert!(estimate_numberings(&board(1, 1), 100, SamplePolicy::default(), 0.9, 0).is_err());
    }

    #[test]
    fn geometric_rescale() {
        let r =
            estimate_numberings(&board(5, 5), 20_000, SamplePolicy::default(), 0.99, 3).unwrap();
        let g = derive_geometric_estimate(&r).unwrap();
        assert_eq!(g.target, Target::G);
        assert_eq!(g.ci_low * 16.0, r.ci_low);
        assert_eq!(g.ci_high * 16.0, r.ci_high);
        assert_eq!(g.point_estimate * 16.0, r.point_estimate);
        assert!(g.assumes_asymmetric_diagrams);
        assert!(derive_geometric_estimate(&g).is_err());

        let zero =
            estimate_numberings(&board(4, 4), 100, SamplePolicy::default(), 0.99, 3).unwrap();
        assert_eq!(
            derive_geometric_estimate(&zero).unwrap().point_estimate,
            0.0
        );

        let rect =
            estimate_numberings(&board(3, 4), 100, SamplePolicy::default(), 0.99, 3).unwrap();
        assert!(derive_geometric_estimate(&rect).is_err());
    }
}
