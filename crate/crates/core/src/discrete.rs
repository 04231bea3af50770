//! Symmetric random-response joints built from mixtures of binary symmetric
//! channels, and the discrete corner-point calculators: entropies, mutual
//! information, maxitrace, Witsenhausen's f and the resulting WCI lower bound,
//! plus an (epsilon, delta)-LDP audit of the induced channel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info;

/// Largest k for which maxitrace enumerates all k! permutations.
pub const EXHAUSTIVE_CAP: usize = 12;

const SUM_TOL: f64 = 1e-12;

/// A k x k joint probability matrix, stored row-major.
///
/// Rows index the source alphabet, columns the output alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJointPmf")]
pub struct JointPmf {
    k: usize,
    q: Vec<f64>,
}

#[derive(Deserialize)]
struct RawJointPmf {
    k: usize,
    q: Vec<f64>,
}

impl TryFrom<RawJointPmf> for JointPmf {
    type Error = Error;

    fn try_from(raw: RawJointPmf) -> Result<Self> {
        JointPmf::new(raw.k, raw.q)
    }
}

impl JointPmf {
    pub fn new(k: usize, q: Vec<f64>) -> Result<Self> {
        if k < 2 {
            return Err(Error::domain(format!("alphabet size must be at least 2, got {k}")));
        }
        if q.len() != k * k {
            return Err(Error::Dimension(format!(
                "expected {} entries for k = {k}, got {}",
                k * k,
                q.len()
            )));
        }
        if let Some(bad) = q.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::domain(format!("pmf entries must be finite and non-negative, got {bad}")));
        }
        let total: f64 = q.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::domain(format!("pmf entries sum to {total}, not 1")));
        }
        Ok(JointPmf { k, q })
    }

    /// Builds from nested rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.len();
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::Dimension("joint pmf must be square".into()));
        }
        JointPmf::new(k, rows.concat())
    }

    /// Outer product of two marginals (an independent joint).
    pub fn product(px: &[f64], py: &[f64]) -> Result<Self> {
        if px.len() != py.len() {
            return Err(Error::Dimension("marginals must have the same length".into()));
        }
        let q = px.iter().flat_map(|a| py.iter().map(move |b| a * b)).collect();
        JointPmf::new(px.len(), q)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.q
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.k + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.q[i * self.k..(i + 1) * self.k]
    }

    pub fn x_marginal(&self) -> Vec<f64> {
        info::row_marginal(&self.q, self.k, self.k)
    }

    pub fn y_marginal(&self) -> Vec<f64> {
        info::col_marginal(&self.q, self.k, self.k)
    }

    /// Embeds the matrix into a larger one padded with zero rows and columns.
    pub fn pad_to(&self, k: usize) -> Result<JointPmf> {
        if k < self.k {
            return Err(Error::Dimension(format!("cannot pad size {} down to {k}", self.k)));
        }
        let mut q = vec![0.0; k * k];
        for i in 0..self.k {
            q[i * k..i * k + self.k].copy_from_slice(self.row(i));
        }
        JointPmf::new(k, q)
    }
}

/// Parameters of the two-BSC mixtures on either side of the hidden bit W.
///
/// `d`, `p1`, `p3` describe P(X1 X2 | W = 0); `c`, `p2`, `p4` describe P(Y1 Y2 | W = 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BscMixtureParams {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
    pub c: f64,
    pub d: f64,
}

impl BscMixtureParams {
    pub fn new(p1: f64, p2: f64, p3: f64, p4: f64, c: f64, d: f64) -> Self {
        BscMixtureParams { p1, p2, p3, p4, c, d }
    }

    /// Parameters in table order (p1, p2, p3, p4, c, d).
    pub fn from_array(a: [f64; 6]) -> Self {
        BscMixtureParams::new(a[0], a[1], a[2], a[3], a[4], a[5])
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("p1", self.p1),
            ("p2", self.p2),
            ("p3", self.p3),
            ("p4", self.p4),
            ("c", self.c),
            ("d", self.d),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::domain(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

/// Pair distribution given W = 0 over (00, 01, 10, 11): weight `w` on the
/// {00, 11} subchannel with crossover `p_same`, 1 - w on {01, 10} with `p_cross`.
fn side_given_w0(w: f64, p_same: f64, p_cross: f64) -> [f64; 4] {
    [
        w * (1.0 - p_same),
        (1.0 - w) * (1.0 - p_cross),
        (1.0 - w) * p_cross,
        w * p_same,
    ]
}

/// Joint pmf of the random-response model, 4 x 4 with rows (x1 x2) and columns
/// (y1 y2) both ordered 00, 01, 10, 11.
///
/// Q(x, y) = 1/2 [P(x | W=0) P(y | W=0) + P(x | W=1) P(y | W=1)], where the
/// W = 1 conditionals are the bit-complemented W = 0 conditionals.
pub fn bsc_mixture(params: &BscMixtureParams) -> Result<JointPmf> {
    params.validate()?;
    let px = side_given_w0(params.d, params.p1, params.p3);
    let py = side_given_w0(params.c, params.p2, params.p4);
    let mut q = vec![0.0; 16];
    for x in 0..4 {
        for y in 0..4 {
            // complementing both bits maps index i to 3 - i
            q[4 * x + y] = 0.5 * (px[x] * py[y] + px[3 - x] * py[3 - y]);
        }
    }
    JointPmf::new(4, q)
}

pub fn joint_entropy(q: &JointPmf) -> f64 {
    info::entropy(q.entries())
}

/// (H(X), H(Y)) in nats.
pub fn marginal_entropies(q: &JointPmf) -> (f64, f64) {
    (info::entropy(&q.x_marginal()), info::entropy(&q.y_marginal()))
}

pub fn mutual_information_discrete(q: &JointPmf) -> f64 {
    info::mutual_information(q.entries(), q.k(), q.k())
}

/// How maxitrace searches the permutation group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxtraceMode {
    /// Exhaustive search for k <= [`EXHAUSTIVE_CAP`], size error above.
    #[default]
    Exhaustive,
    /// Hungarian algorithm, any k. Ties are not broken lexicographically.
    Assignment,
    /// Exhaustive up to the cap, Hungarian above it.
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Maxtrace {
    pub value: f64,
    /// `perm[i]` is the column matched to row `i` (0-based).
    pub perm: Vec<usize>,
}

/// max over permutations pi of sum_i Q[i, pi(i)], exhaustive search.
pub fn maxtrace(q: &JointPmf) -> Result<Maxtrace> {
    maxtrace_with(q, MaxtraceMode::Exhaustive)
}

pub fn maxtrace_with(q: &JointPmf, mode: MaxtraceMode) -> Result<Maxtrace> {
    let k = q.k();
    match mode {
        MaxtraceMode::Exhaustive if k > EXHAUSTIVE_CAP => Err(Error::Size(format!(
            "exhaustive maxitrace supports k <= {EXHAUSTIVE_CAP}, got {k}; use the assignment mode"
        ))),
        MaxtraceMode::Exhaustive => Ok(maxtrace_exhaustive(q)),
        MaxtraceMode::Auto if k <= EXHAUSTIVE_CAP => Ok(maxtrace_exhaustive(q)),
        MaxtraceMode::Assignment | MaxtraceMode::Auto => Ok(maxtrace_assignment(q)),
    }
}

struct Search<'a> {
    q: &'a JointPmf,
    // suffix sums of row maxima, for pruning
    rest_bound: Vec<f64>,
    used: Vec<bool>,
    current: Vec<usize>,
    best: f64,
    best_perm: Vec<usize>,
}

impl Search<'_> {
    // Columns are tried in increasing order, so permutations are visited
    // lexicographically and only strict improvements replace the incumbent.
    fn descend(&mut self, row: usize, partial: f64) {
        let k = self.q.k();
        if row == k {
            let total: f64 = self.current.iter().enumerate().map(|(i, &j)| self.q.get(i, j)).sum();
            if total > self.best {
                self.best = total;
                self.best_perm.clone_from(&self.current);
            }
            return;
        }
        if partial + self.rest_bound[row] + 1e-12 < self.best {
            return;
        }
        for col in 0..k {
            if self.used[col] {
                continue;
            }
            self.used[col] = true;
            self.current.push(col);
            self.descend(row + 1, partial + self.q.get(row, col));
            self.current.pop();
            self.used[col] = false;
        }
    }
}

fn maxtrace_exhaustive(q: &JointPmf) -> Maxtrace {
    let k = q.k();
    let mut rest_bound = vec![0.0; k + 1];
    for i in (0..k).rev() {
        let m = q.row(i).iter().copied().fold(f64::NEG_INFINITY, f64::max);
        rest_bound[i] = rest_bound[i + 1] + m;
    }
    let mut s = Search {
        q,
        rest_bound,
        used: vec![false; k],
        current: Vec::with_capacity(k),
        best: f64::NEG_INFINITY,
        best_perm: Vec::new(),
    };
    s.descend(0, 0.0);
    Maxtrace {
        value: s.best,
        perm: s.best_perm,
    }
}

/// Hungarian algorithm (shortest augmenting paths with potentials) on cost -Q.
fn maxtrace_assignment(q: &JointPmf) -> Maxtrace {
    let n = q.k();
    let cost = |i: usize, j: usize| -q.get(i - 1, j - 1);
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut perm = vec![0; n];
    for j in 1..=n {
        perm[p[j] - 1] = j - 1;
    }
    let value = perm.iter().enumerate().map(|(i, &j)| q.get(i, j)).sum();
    Maxtrace { value, perm }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FBranch {
    /// Curved branch, x in [x_k*, 1].
    F1,
    /// Linear branch, x in [1/k, x_k*].
    F2,
}

/// Crossover point x_k* = (k^2 - 3k + 3) / (k (k - 1)).
pub fn witsenhausen_crossover(k: usize) -> f64 {
    let k = k as f64;
    (k * k - 3.0 * k + 3.0) / (k * (k - 1.0))
}

/// Curved branch f1(x) with alpha = sqrt((k x - 1) / (k - 1)).
pub fn witsenhausen_f1(k: usize, x: f64) -> f64 {
    let kf = k as f64;
    let alpha = ((kf * x - 1.0) / (kf - 1.0)).max(0.0).sqrt().min(1.0);
    let a = 1.0 + (kf - 1.0) * alpha;
    let b = 1.0 - alpha;
    let b_term = if b > 0.0 { (kf - 1.0) * b * b.ln() } else { 0.0 };
    -2.0 / kf * (a * a.ln() + b_term) + 2.0 * kf.ln()
}

/// Linear branch f2(x) = 2 ln k - 2 (k-1) ln(k-1) / (k-2) (x - 1/k).
pub fn witsenhausen_f2(k: usize, x: f64) -> f64 {
    let kf = k as f64;
    2.0 * kf.ln() - 2.0 * (kf - 1.0) * (kf - 1.0).ln() / (kf - 2.0) * (x - 1.0 / kf)
}

/// Witsenhausen's f on [1/k, 1] for k >= 3, with the branch that was used.
pub fn witsenhausen_f(k: usize, x: f64) -> Result<(f64, FBranch)> {
    if k < 3 {
        return Err(Error::domain(format!("Witsenhausen f requires k >= 3, got {k}")));
    }
    let lo = 1.0 / k as f64;
    if !(x >= lo - 1e-12 && x <= 1.0 + 1e-12) {
        return Err(Error::domain(format!("x = {x} outside [1/{k}, 1]")));
    }
    let x = x.clamp(lo, 1.0);
    if x >= witsenhausen_crossover(k) {
        Ok((witsenhausen_f1(k, x), FBranch::F1))
    } else {
        Ok((witsenhausen_f2(k, x), FBranch::F2))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitsenhausenResult {
    pub h_joint: f64,
    pub maxtr: f64,
    pub f_value: f64,
    /// max(0, raw)
    pub wci_lower: f64,
    /// H(X,Y) - f(maxtr) before clamping.
    pub raw: f64,
    pub branch: FBranch,
}

/// WCI lower bound H(X,Y) - f(maxtr(Q)), clamped at zero.
pub fn wci_lower_bound_discrete(q: &JointPmf) -> Result<WitsenhausenResult> {
    wci_lower_bound_discrete_with(q, MaxtraceMode::Auto)
}

pub fn wci_lower_bound_discrete_with(q: &JointPmf, mode: MaxtraceMode) -> Result<WitsenhausenResult> {
    let k = q.k();
    if k < 3 {
        return Err(Error::domain(format!(
            "the Witsenhausen bound needs k >= 3; pad the matrix with zero rows and columns (got k = {k})"
        )));
    }
    let h_joint = joint_entropy(q);
    let mt = maxtrace_with(q, mode)?;
    let (f_value, branch) = witsenhausen_f(k, mt.value)?;
    let raw = h_joint - f_value;
    Ok(WitsenhausenResult {
        h_joint,
        maxtr: mt.value,
        f_value,
        wci_lower: raw.max(0.0),
        raw,
        branch,
    })
}

/// Rows of P(Y | X) derived from the joint.
pub fn channel(q: &JointPmf) -> Result<Vec<Vec<f64>>> {
    q.x_marginal()
        .iter()
        .enumerate()
        .map(|(i, &px)| {
            if px <= 0.0 {
                Err(Error::Support(format!(
                    "row {i} has zero marginal; P(Y | X = {i}) is undefined"
                )))
            } else {
                Ok(q.row(i).iter().map(|v| v / px).collect())
            }
        })
        .collect()
}

/// Smallest delta for which the channel P(Y | X) induced by `q` is (epsilon, delta)-LDP.
///
/// For each ordered input pair the worst output set is
/// {y : P(y|x) > e^epsilon P(y|x')}, so
/// delta* = max_{x, x'} sum_y max(0, P(y|x) - e^epsilon P(y|x')).
pub fn ldp_audit(q: &JointPmf, epsilon: f64) -> Result<f64> {
    if !(epsilon >= 0.0) {
        return Err(Error::domain(format!("epsilon must be non-negative, got {epsilon}")));
    }
    let ch = channel(q)?;
    let scale = epsilon.exp();
    let mut worst: f64 = 0.0;
    for a in &ch {
        for b in &ch {
            let excess: f64 = a.iter().zip(b).map(|(pa, pb)| (pa - scale * pb).max(0.0)).sum();
            worst = worst.max(excess);
        }
    }
    Ok(worst)
}
