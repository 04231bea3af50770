//! Exact small-blocklength simulation of channel synthesis.
//!
//! A random codebook of `M0` bins with `M` codewords each is drawn i.i.d. from
//! P_U. The encoder sees x^n and the common-randomness bin c, then picks an
//! index with the likelihood encoder. The decoder passes the chosen codeword
//! through P_{Y|U}. Every quantity below is computed by exact enumeration,
//! averaging over the bin instead of sampling it.

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info;
use crate::rng::stream_rng;

/// Largest number of joint outcomes |X|^n |Y|^n the simulator enumerates.
pub const JOINT_OUTCOME_CAP: u64 = 1 << 20;
/// Largest number of codewords M0 * M in one codebook.
pub const CODEWORD_CAP: u64 = 1 << 22;

const STOCHASTIC_TOL: f64 = 1e-12;
/// Rounding allowance when comparing rates with computed informations.
const REGION_SLACK: f64 = 1e-12;

#[derive(Deserialize)]
struct RawScheme {
    p_u: Vec<f64>,
    p_x_given_u: Vec<Vec<f64>>,
    p_y_given_u: Vec<Vec<f64>>,
}

/// A decomposition P_U P_{X|U} P_{Y|U} of a target joint Q_{XY}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScheme")]
pub struct CoordinationScheme {
    p_u: Vec<f64>,
    p_x_given_u: Vec<Vec<f64>>,
    p_y_given_u: Vec<Vec<f64>>,
}

impl TryFrom<RawScheme> for CoordinationScheme {
    type Error = Error;

    fn try_from(r: RawScheme) -> Result<Self> {
        CoordinationScheme::new(r.p_u, r.p_x_given_u, r.p_y_given_u)
    }
}

fn check_distribution(name: &str, p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::domain(format!("{name} is empty")));
    }
    if p.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::domain(format!("{name} has a negative or non-finite entry")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > STOCHASTIC_TOL {
        return Err(Error::domain(format!("{name} sums to {s}, not 1")));
    }
    Ok(())
}

fn check_channel(name: &str, rows: &[Vec<f64>], u_size: usize) -> Result<usize> {
    if rows.len() != u_size {
        return Err(Error::Dimension(format!("{name} has {} rows, |U| = {u_size}", rows.len())));
    }
    let width = rows[0].len();
    for (u, r) in rows.iter().enumerate() {
        if r.len() != width {
            return Err(Error::Dimension(format!("{name} row {u} has length {}, expected {width}", r.len())));
        }
        check_distribution(&format!("{name} row {u}"), r)?;
    }
    Ok(width)
}

impl CoordinationScheme {
    pub fn new(p_u: Vec<f64>, p_x_given_u: Vec<Vec<f64>>, p_y_given_u: Vec<Vec<f64>>) -> Result<Self> {
        check_distribution("p_u", &p_u)?;
        check_channel("p_x_given_u", &p_x_given_u, p_u.len())?;
        check_channel("p_y_given_u", &p_y_given_u, p_u.len())?;
        Ok(CoordinationScheme {
            p_u,
            p_x_given_u,
            p_y_given_u,
        })
    }

    /// U uniform on {0, 1}, X and Y each a BSC(`flip`) copy of U.
    pub fn binary_symmetric(flip: f64) -> Result<Self> {
        let bsc = vec![vec![1.0 - flip, flip], vec![flip, 1.0 - flip]];
        CoordinationScheme::new(vec![0.5, 0.5], bsc.clone(), bsc)
    }

    pub fn u_size(&self) -> usize {
        self.p_u.len()
    }

    pub fn x_size(&self) -> usize {
        self.p_x_given_u[0].len()
    }

    pub fn y_size(&self) -> usize {
        self.p_y_given_u[0].len()
    }

    pub fn p_u(&self) -> &[f64] {
        &self.p_u
    }

    pub fn p_x_given_u(&self) -> &[Vec<f64>] {
        &self.p_x_given_u
    }

    pub fn p_y_given_u(&self) -> &[Vec<f64>] {
        &self.p_y_given_u
    }

    /// Induced P_X.
    pub fn p_x(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.x_size()];
        for (pu, row) in self.p_u.iter().zip(&self.p_x_given_u) {
            for (o, v) in p.iter_mut().zip(row) {
                *o += pu * v;
            }
        }
        p
    }

    /// Target Q_{XY}(x, y) = sum_u P_U(u) P_{X|U}(x|u) P_{Y|U}(y|u), row-major in x.
    pub fn target_joint(&self) -> Vec<f64> {
        let (nx, ny) = (self.x_size(), self.y_size());
        let mut q = vec![0.0; nx * ny];
        for u in 0..self.u_size() {
            for x in 0..nx {
                let a = self.p_u[u] * self.p_x_given_u[u][x];
                for y in 0..ny {
                    q[x * ny + y] += a * self.p_y_given_u[u][y];
                }
            }
        }
        q
    }

    /// I(X;U) in nats.
    pub fn mutual_information_xu(&self) -> f64 {
        let nx = self.x_size();
        let q: Vec<f64> = (0..self.u_size())
            .flat_map(|u| (0..nx).map(move |x| (u, x)))
            .map(|(u, x)| self.p_u[u] * self.p_x_given_u[u][x])
            .collect();
        info::mutual_information(&q, self.u_size(), nx)
    }

    /// I(X,Y;U) in nats.
    pub fn mutual_information_xyu(&self) -> f64 {
        let (nx, ny) = (self.x_size(), self.y_size());
        let mut q = Vec::with_capacity(self.u_size() * nx * ny);
        for u in 0..self.u_size() {
            for x in 0..nx {
                for y in 0..ny {
                    q.push(self.p_u[u] * self.p_x_given_u[u][x] * self.p_y_given_u[u][y]);
                }
            }
        }
        info::mutual_information(&q, self.u_size(), nx * ny)
    }

    /// I(X;Y) of the target joint, in nats.
    pub fn mutual_information_xy(&self) -> f64 {
        info::mutual_information(&self.target_joint(), self.x_size(), self.y_size())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRegionCheck {
    /// R >= I(X;U)
    pub ok_r: bool,
    /// R + R0 >= I(X,Y;U)
    pub ok_sum: bool,
    pub i_xu: f64,
    pub i_xyu: f64,
}

/// Whether (R, R0) lies in the region achieved by this particular decomposition.
pub fn rate_region_check(scheme: &CoordinationScheme, rate_r: f64, rate_r0: f64) -> RateRegionCheck {
    let i_xu = scheme.mutual_information_xu();
    let i_xyu = scheme.mutual_information_xyu();
    RateRegionCheck {
        ok_r: rate_r >= i_xu - REGION_SLACK,
        ok_sum: rate_r + rate_r0 >= i_xyu - REGION_SLACK,
        i_xu,
        i_xyu,
    }
}

/// `m0` bins of `m` codewords, each a length-`n` sequence over U.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Codebook {
    pub n: usize,
    pub m: usize,
    pub m0: usize,
    /// Symbols laid out as `[bin][index][position]`.
    pub symbols: Vec<u32>,
}

impl Codebook {
    pub fn codeword(&self, bin: usize, index: usize) -> &[u32] {
        let start = (bin * self.m + index) * self.n;
        &self.symbols[start..start + self.n]
    }

    pub fn bin(&self, bin: usize) -> impl Iterator<Item = &[u32]> {
        (0..self.m).map(move |j| self.codeword(bin, j))
    }
}

/// Codebook size for a rate in nats: ceil(e^{n R}).
pub fn codebook_size(n: usize, rate: f64) -> Result<usize> {
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(Error::domain(format!("rate must be finite and non-negative, got {rate}")));
    }
    let m = (n as f64 * rate).exp().ceil();
    if m > CODEWORD_CAP as f64 {
        return Err(Error::Size(format!("e^(n R) = {m:.3e} codewords exceeds the cap {CODEWORD_CAP}")));
    }
    Ok((m as usize).max(1))
}

/// Draws every codeword symbol i.i.d. from P_U.
pub fn build_codebook<R: Rng + ?Sized>(
    scheme: &CoordinationScheme,
    n: usize,
    m: usize,
    m0: usize,
    rng: &mut R,
) -> Result<Codebook> {
    if n == 0 || m == 0 || m0 == 0 {
        return Err(Error::domain("n, M and M0 must all be at least 1"));
    }
    let words = (m as u64).saturating_mul(m0 as u64);
    if words > CODEWORD_CAP || words.saturating_mul(n as u64) > CODEWORD_CAP * 16 {
        return Err(Error::Size(format!("{m0} x {m} codewords of length {n} exceed the memory cap")));
    }
    let dist = WeightedIndex::new(scheme.p_u()).map_err(|e| Error::domain(format!("p_u: {e}")))?;
    let symbols = (0..m * m0 * n).map(|_| dist.sample(rng) as u32).collect();
    Ok(Codebook { n, m, m0, symbols })
}

/// Codebook built from its own stream of `seed`.
pub fn build_codebook_seeded(scheme: &CoordinationScheme, n: usize, m: usize, m0: usize, seed: u64) -> Result<Codebook> {
    build_codebook(scheme, n, m, m0, &mut stream_rng(seed, 0))
}

/// Probability of each index in `bin` under the likelihood encoder for `x`.
///
/// Falls back to uniform when every codeword has zero likelihood.
pub fn likelihood_encoder_distribution(x: &[usize], bin: &[&[u32]], scheme: &CoordinationScheme) -> Result<Vec<f64>> {
    if bin.is_empty() {
        return Err(Error::domain("likelihood encoder needs a non-empty bin"));
    }
    let lik: Vec<f64> = bin
        .iter()
        .map(|w| {
            if w.len() != x.len() {
                return Err(Error::Dimension(format!("codeword length {} vs source length {}", w.len(), x.len())));
            }
            Ok(w.iter()
                .zip(x)
                .map(|(&u, &xi)| scheme.p_x_given_u[u as usize][xi])
                .product())
        })
        .collect::<Result<_>>()?;
    Ok(normalize_or_uniform(lik))
}

fn normalize_or_uniform(mut w: Vec<f64>) -> Vec<f64> {
    let total: f64 = w.iter().sum();
    if total > 0.0 {
        w.iter_mut().for_each(|v| *v /= total);
    } else {
        let u = 1.0 / w.len() as f64;
        w.iter_mut().for_each(|v| *v = u);
    }
    w
}

/// Symbols of sequence `index` over an alphabet of `size`, first symbol least significant.
pub fn decode_sequence(mut index: usize, size: usize, n: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(index % size);
        index /= size;
    }
    out
}

fn sequence_count(size: usize, n: usize) -> Result<usize> {
    (size as u64)
        .checked_pow(n as u32)
        .filter(|&c| c <= JOINT_OUTCOME_CAP)
        .map(|c| c as usize)
        .ok_or_else(|| Error::Size(format!("{size}^{n} sequences exceed the cap {JOINT_OUTCOME_CAP}")))
}

fn check_joint_cap(scheme: &CoordinationScheme, n: usize) -> Result<(usize, usize)> {
    let nx = sequence_count(scheme.x_size(), n)?;
    let ny = sequence_count(scheme.y_size(), n)?;
    if (nx as u64) * (ny as u64) > JOINT_OUTCOME_CAP {
        return Err(Error::Size(format!(
            "|X|^n |Y|^n = {} exceeds the cap {JOINT_OUTCOME_CAP}",
            nx as u64 * ny as u64
        )));
    }
    Ok((nx, ny))
}

/// Product law over all length-n sequences of a per-letter pmf.
fn iid_law(p: &[f64], n: usize, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| decode_sequence(i, p.len(), n).iter().map(|&s| p[s]).product())
        .collect()
}

/// A distribution over (x^n, y^n), row-major in the x^n index.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceJoint {
    pub n: usize,
    pub x_size: usize,
    pub y_size: usize,
    pub x_count: usize,
    pub y_count: usize,
    pub probs: Vec<f64>,
}

impl SequenceJoint {
    pub fn x_marginal(&self) -> Vec<f64> {
        info::row_marginal(&self.probs, self.x_count, self.y_count)
    }

    /// Law of the first letter pair (x_1, y_1), row-major in x_1.
    pub fn first_letter(&self) -> Vec<f64> {
        let mut q = vec![0.0; self.x_size * self.y_size];
        for (xi, row) in self.probs.chunks(self.y_count).enumerate() {
            for (yi, p) in row.iter().enumerate() {
                q[(xi % self.x_size) * self.y_size + yi % self.y_size] += p;
            }
        }
        q
    }
}

/// The i.i.d. target law prod_i Q_{XY}(x_i, y_i).
pub fn target_product(scheme: &CoordinationScheme, n: usize) -> Result<SequenceJoint> {
    let (x_count, y_count) = check_joint_cap(scheme, n)?;
    let q = scheme.target_joint();
    let ny = scheme.y_size();
    let probs = (0..x_count)
        .into_par_iter()
        .flat_map_iter(|xi| {
            let xs = decode_sequence(xi, scheme.x_size(), n);
            let q = &q;
            (0..y_count).map(move |yi| {
                let ys = decode_sequence(yi, ny, n);
                xs.iter().zip(&ys).map(|(&x, &y)| q[x * ny + y]).product::<f64>()
            })
        })
        .collect();
    Ok(SequenceJoint {
        n,
        x_size: scheme.x_size(),
        y_size: ny,
        x_count,
        y_count,
        probs,
    })
}

/// The joint law of (X^n, Y^n) induced by the codebook, averaged over bins.
///
/// Repeated codewords are merged so the cost scales with the number of
/// distinct u^n rather than with M0 * M.
pub fn induced_joint_exact(codebook: &Codebook, scheme: &CoordinationScheme) -> Result<SequenceJoint> {
    let n = codebook.n;
    let (x_count, y_count) = check_joint_cap(scheme, n)?;
    if codebook.symbols.iter().any(|&u| u as usize >= scheme.u_size()) {
        return Err(Error::Dimension("codebook symbol outside the U alphabet".into()));
    }

    let mut distinct: Vec<&[u32]> = Vec::new();
    let mut slot: std::collections::HashMap<&[u32], usize> = std::collections::HashMap::new();
    let ids: Vec<usize> = (0..codebook.m0)
        .flat_map(|c| (0..codebook.m).map(move |j| (c, j)))
        .map(|(c, j)| {
            let w = codebook.codeword(c, j);
            *slot.entry(w).or_insert_with(|| {
                distinct.push(w);
                distinct.len() - 1
            })
        })
        .collect();

    let xs: Vec<Vec<usize>> = (0..x_count).map(|i| decode_sequence(i, scheme.x_size(), n)).collect();
    let ys: Vec<Vec<usize>> = (0..y_count).map(|i| decode_sequence(i, scheme.y_size(), n)).collect();
    let seq_prob = |w: &[u32], s: &[usize], ch: &[Vec<f64>]| -> f64 {
        w.iter().zip(s).map(|(&u, &v)| ch[u as usize][v]).product()
    };
    // Likelihoods P_{X|U}^n(x^n | w) and decoder outputs P_{Y|U}^n(. | w) per distinct word.
    let lik: Vec<Vec<f64>> = distinct
        .par_iter()
        .map(|w| xs.iter().map(|x| seq_prob(w, x, scheme.p_x_given_u())).collect())
        .collect();
    let out: Vec<Vec<f64>> = distinct
        .par_iter()
        .map(|w| ys.iter().map(|y| seq_prob(w, y, scheme.p_y_given_u())).collect())
        .collect();

    let px = iid_law(&scheme.p_x(), n, x_count);
    let m = codebook.m;
    let m0 = codebook.m0 as f64;
    let probs: Vec<f64> = (0..x_count)
        .into_par_iter()
        .flat_map_iter(|xi| {
            let mut weight = vec![0.0; distinct.len()];
            for bin in ids.chunks(m) {
                let total: f64 = bin.iter().map(|&d| lik[d][xi]).sum();
                for &d in bin {
                    weight[d] += if total > 0.0 { lik[d][xi] / total } else { 1.0 / m as f64 };
                }
            }
            let scale = px[xi] / m0;
            let mut row = vec![0.0; y_count];
            for (d, w) in weight.iter().enumerate() {
                if *w > 0.0 {
                    let a = scale * w;
                    for (r, o) in row.iter_mut().zip(&out[d]) {
                        *r += a * o;
                    }
                }
            }
            row
        })
        .collect();
    Ok(SequenceJoint {
        n,
        x_size: scheme.x_size(),
        y_size: scheme.y_size(),
        x_count,
        y_count,
        probs,
    })
}

/// Total variation distance 1/2 sum |P - Q|.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Dimension(format!("distributions of length {} and {}", p.len(), q.len())));
    }
    let s: f64 = p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum();
    Ok((0.5 * s).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisConfig {
    pub scheme: CoordinationScheme,
    pub n: usize,
    /// Message rate, nats per symbol.
    pub rate_r: f64,
    /// Common-randomness rate, nats per symbol.
    pub rate_r0: f64,
    pub trials: usize,
    pub seed: u64,
}

impl SynthesisConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::domain("blocklength n must be at least 1"));
        }
        if self.trials == 0 {
            return Err(Error::domain("trials must be at least 1"));
        }
        check_joint_cap(&self.scheme, self.n)?;
        let m = codebook_size(self.n, self.rate_r)?;
        let m0 = codebook_size(self.n, self.rate_r0)?;
        if (m as u64) * (m0 as u64) > CODEWORD_CAP {
            return Err(Error::Size(format!("{m0} x {m} codewords exceed the cap {CODEWORD_CAP}")));
        }
        Ok(())
    }

    /// (M, M0)
    pub fn codebook_sizes(&self) -> Result<(usize, usize)> {
        Ok((codebook_size(self.n, self.rate_r)?, codebook_size(self.n, self.rate_r0)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: usize,
    pub tv: f64,
    /// TV between the (x_1, y_1) marginal and Q_{XY}.
    pub first_letter_tv: f64,
    /// max |P_{X^n} - P_X^n| over x^n.
    pub x_marginal_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisOutcome {
    pub n: usize,
    pub rate_r: f64,
    pub rate_r0: f64,
    pub m: usize,
    pub m0: usize,
    pub trials: Vec<TrialResult>,
    pub median_tv: f64,
    pub mean_tv: f64,
}

impl SynthesisOutcome {
    pub fn tv_per_trial(&self) -> Vec<f64> {
        self.trials.iter().map(|t| t.tv).collect()
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k == 0 {
        f64::NAN
    } else if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// One trial: codebook from stream `trial` of `seed`, then exact TV.
pub fn run_trial(cfg: &SynthesisConfig, trial: usize, target: &SequenceJoint) -> Result<TrialResult> {
    let (m, m0) = cfg.codebook_sizes()?;
    let book = build_codebook(&cfg.scheme, cfg.n, m, m0, &mut stream_rng(cfg.seed, trial as u64))?;
    let induced = induced_joint_exact(&book, &cfg.scheme)?;
    let tv = tv_distance(&induced.probs, &target.probs)?;
    let first_letter_tv = tv_distance(&induced.first_letter(), &cfg.scheme.target_joint())?;
    let x_marginal_deviation = induced
        .x_marginal()
        .iter()
        .zip(target.x_marginal())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(TrialResult {
        trial,
        tv,
        first_letter_tv,
        x_marginal_deviation,
    })
}

/// Runs `cfg.trials` independent codebooks; trial t uses stream t of the seed.
pub fn synthesis_experiment(cfg: &SynthesisConfig) -> Result<SynthesisOutcome> {
    cfg.validate()?;
    let (m, m0) = cfg.codebook_sizes()?;
    let target = target_product(&cfg.scheme, cfg.n)?;
    let trials: Vec<TrialResult> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, t, &target))
        .collect::<Result<_>>()?;
    let tvs: Vec<f64> = trials.iter().map(|t| t.tv).collect();
    Ok(SynthesisOutcome {
        n: cfg.n,
        rate_r: cfg.rate_r,
        rate_r0: cfg.rate_r0,
        m,
        m0,
        median_tv: median(&tvs),
        mean_tv: tvs.iter().sum::<f64>() / tvs.len() as f64,
        trials,
    })
}
