#![allow(dead_code)]

use rand::Rng;
use rdfc::discrete::JointPmf;
use rdfc::gaussian::GaussianLdpConfig;
use rdfc::synth::CoordinationScheme;

pub fn random_simplex<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..len).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

pub fn random_joint<R: Rng>(rng: &mut R, k: usize) -> JointPmf {
    loop {
        let q = random_simplex(rng, k * k);
        // renormalisation may leave the sum a few ulps from 1
        if let Ok(j) = JointPmf::new(k, q) {
            return j;
        }
    }
}

pub fn random_gaussian_config<R: Rng>(rng: &mut R) -> GaussianLdpConfig {
    GaussianLdpConfig::unit_clip(
        0.1 + 0.6 * rng.random::<f64>(),
        0.1 + 0.9 * rng.random::<f64>(),
        0.001 + 0.009 * rng.random::<f64>(),
    )
}

pub fn random_scheme<R: Rng>(rng: &mut R, u: usize, x: usize, y: usize) -> CoordinationScheme {
    let pu = random_simplex(rng, u);
    let px = (0..u).map(|_| random_simplex(rng, x)).collect();
    let py = (0..u).map(|_| random_simplex(rng, y)).collect();
    CoordinationScheme::new(pu, px, py).expect("random scheme is valid")
}

/// Exhaustive maximum of sum_i m[i][perm(i)] over all permutations.
pub fn brute_force_maxtrace(q: &JointPmf) -> f64 {
    fn go(q: &JointPmf, row: usize, used: &mut Vec<bool>, acc: f64, best: &mut f64) {
        let k = q.k();
        if row == k {
            *best = best.max(acc);
            return;
        }
        for col in 0..k {
            if !used[col] {
                used[col] = true;
                go(q, row + 1, used, acc + q.get(row, col), best);
                used[col] = false;
            }
        }
    }
    let mut best = f64::NEG_INFINITY;
    go(q, 0, &mut vec![false; q.k()], 0.0, &mut best);
    best
}

/// Longhand I_alpha: explicit expectations over P_X P_Y with no algebraic rewriting.
pub fn alpha_mi_longhand(q: &JointPmf, alpha: f64) -> f64 {
    let k = q.k();
    let px = q.x_marginal();
    let py = q.y_marginal();
    let mut outer = 0.0;
    for y in 0..k {
        let mut inner = 0.0;
        for x in 0..k {
            let joint = q.get(x, y);
            if joint > 0.0 {
                let density = joint / (px[x] * py[y]);
                inner += px[x] * density.powf(alpha);
            }
        }
        outer += py[y] * inner.powf(1.0 / alpha);
    }
    alpha / (alpha - 1.0) * outer.ln()
}

/// Least-squares slope of ys against xs.
pub fn fitted_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
