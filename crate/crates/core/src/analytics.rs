//! Closed-form error-rate and overhead bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `g_p(x) = 1 - (1 - p)^x`, the probability that at least one of `x`
/// independent locations of rate `p` fails.
pub fn g(p: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    -(x * (-p).ln_1p()).exp_m1()
}

/// `(1 - p)^{-m}`, evaluated in log space.
fn inv_survival(p: f64, m: f64) -> f64 {
    (-m * (-p).ln_1p()).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Clinr,
    Cznr,
}

/// Evaluated bounds together with their inputs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub scheme: Scheme,
    pub n: usize,
    pub s: usize,
    pub t: usize,
    pub r: usize,
    pub p: f64,
    /// Largest sub-circuit size, `⌈s/t⌉`.
    pub s0: usize,
    /// Operations before the teleportation of one sub-circuit with
    /// full-weight checks.
    pub m0: usize,
    /// Per-sub-circuit term surviving the checks, `g(·)·2^{-r}`.
    pub undetected_term: f64,
    /// Per-sub-circuit term from the unchecked tail.
    pub tail_term: f64,
    /// `(1 - p)^{-m0}`.
    pub restart_factor: f64,
    /// Unclamped bound on the logical error rate (may exceed 1).
    pub p_log_bound: f64,
    pub p_log_bound_clamped: f64,
    pub omega_q: f64,
    pub omega_g_bound: f64,
}

fn check_inputs(n: usize, s: usize, t: usize, p: f64) -> Result<()> {
    if n == 0 || s == 0 || t == 0 {
        return Err(Error::InvalidParameter("n, s and t must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} must lie in [0, 1)")));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn report(
    scheme: Scheme,
    n: usize,
    s: usize,
    t: usize,
    r: usize,
    p: f64,
    s0: usize,
    m0: usize,
    prep: usize,
    check: usize,
    tail: usize,
    omega_g_bound: f64,
    omega_q: f64,
) -> BoundReport {
    let undetected_term = g(p, prep as f64) * 0.5f64.powi(r as i32);
    let tail_term = 2.0 * g(p, check as f64) + g(p, tail as f64);
    let restart_factor = inv_survival(p, m0 as f64);
    let p_log_bound = t as f64 * (undetected_term + tail_term) * restart_factor;
    BoundReport {
        scheme,
        n,
        s,
        t,
        r,
        p,
        s0,
        m0,
        undetected_term,
        tail_term,
        restart_factor,
        p_log_bound,
        p_log_bound_clamped: p_log_bound.min(1.0),
        omega_q,
        omega_g_bound,
    }
}

/// Bounds for CliNR with `t` sub-circuits and `r` checks each.
pub fn clinr_bound(n: usize, s: usize, t: usize, r: usize, p: f64) -> Result<BoundReport> {
    check_inputs(n, s, t, p)?;
    let s0 = s.div_ceil(t);
    let m0 = 3 * n + s0 + (2 * n + 3) * r;
    let omega_g = 10.0 * n as f64 / s0 as f64
        + 2.0 * m0 as f64 * inv_survival(p, m0 as f64) / s0 as f64;
    Ok(report(
        Scheme::Clinr,
        n,
        s,
        t,
        r,
        p,
        s0,
        m0,
        3 * n + s0,
        2 * n + 3,
        5 * n,
        omega_g,
        3.0 + 1.0 / n as f64,
    ))
}

/// Single-sub-circuit bounds, with the sharper gate-overhead estimate
/// `5n/s + m/(s(1-p)^m)`.
pub fn single_block_bound(n: usize, s: usize, r: usize, p: f64) -> Result<BoundReport> {
    let mut rep = clinr_bound(n, s, 1, r, p)?;
    let m = rep.m0 as f64;
    rep.omega_g_bound = 5.0 * n as f64 / s as f64 + m * inv_survival(p, m) / s as f64;
    Ok(rep)
}

/// Bounds for CZNR with `t` CZ blocks and `r` checks each.
pub fn cznr_bound(n: usize, s: usize, t: usize, r: usize, p: f64) -> Result<BoundReport> {
    check_inputs(n, s, t, p)?;
    let s0 = s.div_ceil(t);
    let m0 = n + s0 + (n + 3) * r;
    let omega_g = 6.0 * n as f64 / s0 as f64
        + 2.0 * m0 as f64 * inv_survival(p, m0 as f64) / s0 as f64;
    Ok(report(
        Scheme::Cznr,
        n,
        s,
        t,
        r,
        p,
        s0,
        m0,
        n + s0,
        n + 3,
        3 * n,
        omega_g,
        2.0 + 1.0 / n as f64,
    ))
}

pub fn bound(scheme: Scheme, n: usize, s: usize, t: usize, r: usize, p: f64) -> Result<BoundReport> {
    match scheme {
        Scheme::Clinr => clinr_bound(n, s, t, r, p),
        Scheme::Cznr => cznr_bound(n, s, t, r, p),
    }
}

/// The constant-free asymptotic expression
/// `(t s0 2^{-r} p + 9 t n p) / (1 - s0 p)`. It omits the hidden constant of
/// the big-O statement it comes from and is only a diagnostic.
pub fn asymptotic_bound(n: usize, s0: usize, t: usize, r: usize, p: f64) -> Result<f64> {
    let denom = 1.0 - s0 as f64 * p;
    if denom <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "s0·p = {} must be below 1",
            s0 as f64 * p
        )));
    }
    let (t, n, s0) = (t as f64, n as f64, s0 as f64);
    Ok((t * s0 * 0.5f64.powi(r as i32) * p + 9.0 * t * n * p) / denom)
}

/// Logarithm used for the default number of checks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Two,
    Natural,
}

/// `t = ⌊√(s/n)⌋` and `r = ⌊log₂(s/n)⌋`, both at least 1.
pub fn default_params(n: usize, s: usize) -> (usize, usize) {
    default_params_with(n, s, LogBase::Two)
}

pub fn default_params_with(n: usize, s: usize, base: LogBase) -> (usize, usize) {
    let ratio = s as f64 / n.max(1) as f64;
    let t = if ratio >= 1.0 {
        // Integer square root avoids rounding below a perfect square.
        let q = s / n.max(1);
        let mut t = (q as f64).sqrt() as usize;
        while (t + 1) * (t + 1) * n <= s {
            t += 1;
        }
        while t * t * n > s {
            t -= 1;
        }
        t
    } else {
        0
    };
    let r = if ratio < 1.0 {
        0.0
    } else {
        match base {
            LogBase::Two => {
                // ⌊log₂(s/n)⌋ exactly: largest k with n·2^k ≤ s.
                let mut k = 0u32;
                while (n as u128) << (k + 1) <= s as u128 {
                    k += 1;
                }
                f64::from(k)
            }
            LogBase::Natural => ratio.ln().floor(),
        }
    };
    (t.max(1), (r as usize).max(1))
}

/// Smallest `t ∈ 1..=s` whose analytic gate-overhead bound is at most
/// `budget`, or `None` when there is none.
pub fn choose_t_for_budget(
    scheme: Scheme,
    n: usize,
    s: usize,
    r: usize,
    p: f64,
    budget: f64,
) -> Result<Option<usize>> {
    for t in 1..=s {
        if bound(scheme, n, s, t, r, p)?.omega_g_bound <= budget {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_edge_values() {
        assert_eq!(g(0.3, 0.0), 0.0);
        assert_eq!(g(1.0, 3.0), 1.0);
        assert_eq!(g(0.0, 10.0), 0.0);
        // Tiny p keeps full relative precision.
        assert!((g(1e-12, 1.0) / 1e-12 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn m_counts() {
        assert_eq!(clinr_bound(25, 625, 5, 4, 1e-3).unwrap().m0, 412);
        assert_eq!(single_block_bound(2, 4, 1, 1e-3).unwrap().m0, 17);
        assert_eq!(cznr_bound(2, 4, 1, 1, 1e-3).unwrap().m0, 11);
    }

    #[test]
    fn qubit_overheads() {
        assert!((clinr_bound(25, 625, 5, 4, 1e-3).unwrap().omega_q - 3.04).abs() < 1e-12);
        assert!((cznr_bound(2, 4, 1, 1, 1e-3).unwrap().omega_q - 2.5).abs() < 1e-12);
    }

    #[test]
    fn zero_noise() {
        let b = clinr_bound(4, 32, 2, 2, 0.0).unwrap();
        assert_eq!(b.p_log_bound, 0.0);
        let c = cznr_bound(3, 9, 1, 1, 0.0).unwrap();
        assert_eq!(c.p_log_bound, 0.0);
        let expect = 6.0 * 3.0 / 9.0 + 2.0 * c.m0 as f64 / 9.0;
        assert!((c.omega_g_bound - expect).abs() < 1e-12);
        assert_eq!(asymptotic_bound(3, 9, 1, 1, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn defaults() {
        assert_eq!(default_params(25, 625), (5, 4));
        assert_eq!(default_params(7, 7), (1, 1));
        assert_eq!(default_params(5, 20), (2, 2));
        assert_eq!(default_params_with(25, 625, LogBase::Natural), (5, 3));
    }

    #[test]
    fn asymptotic_requires_small_s0p() {
        assert!(asymptotic_bound(5, 1000, 1, 1, 1e-3).is_err());
    }

    #[test]
    fn budget_selection() {
        let big = clinr_bound(2, 400, 1, 3, 1e-6).unwrap().omega_g_bound;
        assert_eq!(choose_t_for_budget(Scheme::Clinr, 2, 400, 3, 1e-6, big + 0.1).unwrap(), Some(1));
        assert_eq!(choose_t_for_budget(Scheme::Clinr, 25, 781, 4, 1e-3, 2.0).unwrap(), None);
    }
}
