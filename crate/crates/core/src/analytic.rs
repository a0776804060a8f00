//! Closed-form limits of the rumour process: the limiting ignorant fraction,
//! the fluctuation variance, the fluid trajectory and its stopping time, and
//! the covariance of the limiting Gaussian process at that time.

use std::collections::BTreeMap;
use std::f64::consts::E;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::stifling::StiflingDistribution;

const PROPORTION_TOL: f64 = 1e-12;
/// Largest acceptable gap between the two root-finding routes.
pub const ROUTE_TOL: f64 = 1e-10;

/// Limiting initial proportions of the population.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialCondition {
    x0: f64,
    w0: f64,
    y0: Option<BTreeMap<u64, f64>>,
    z0: f64,
}

impl InitialCondition {
    /// One spreader among `N` ignorants: `x0 = 1`, `w0 = 0`.
    pub fn classical() -> Self {
        Self {
            x0: 1.0,
            w0: 0.0,
            y0: None,
            z0: 0.0,
        }
    }

    /// Proportions given only through `x0` and `w0`.
    ///
    /// The simulator needs spreader types; without them it seeds the run with
    /// type-1 spreaders of proportion `w0` (or a single spreader if `w0 = 0`).
    pub fn new(x0: f64, w0: f64) -> Result<Self> {
        check_x0(x0)?;
        if !(w0 >= 0.0 && w0.is_finite()) {
            return Err(Error::InitialCondition(format!(
                "w0 must be finite and nonnegative, got {w0}"
            )));
        }
        Ok(Self {
            x0,
            w0,
            y0: None,
            z0: 0.0,
        })
    }

    /// Proportions with explicit spreader types; `w0` and `z0` are derived.
    pub fn with_spreaders(x0: f64, y0: BTreeMap<u64, f64>) -> Result<Self> {
        check_x0(x0)?;
        let mut total = 0.0;
        let mut w0 = 0.0;
        for (&i, &y) in &y0 {
            if i == 0 {
                return Err(Error::InitialCondition(
                    "spreader types start at 1".into(),
                ));
            }
            if !(y >= 0.0 && y <= 1.0) {
                return Err(Error::InitialCondition(format!(
                    "spreader proportion for type {i} must lie in [0, 1], got {y}"
                )));
            }
            total += y;
            w0 += i as f64 * y;
        }
        let z0 = 1.0 - x0 - total;
        if z0 < -PROPORTION_TOL {
            return Err(Error::InitialCondition(format!(
                "x0 + sum of spreader proportions = {} exceeds 1",
                x0 + total
            )));
        }
        Ok(Self {
            x0,
            w0,
            y0: Some(y0),
            z0: z0.max(0.0),
        })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn w0(&self) -> f64 {
        self.w0
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn spreaders(&self) -> Option<&BTreeMap<u64, f64>> {
        self.y0.as_ref()
    }

    /// True when the limiting spreader mass is zero, so the process starts
    /// from a vanishing fraction of spreaders.
    pub fn is_degenerate(&self) -> bool {
        self.w0 == 0.0
    }

    pub fn is_classical(&self) -> bool {
        self.x0 == 1.0 && self.w0 == 0.0
    }
}

fn check_x0(x0: f64) -> Result<()> {
    if !(x0 > 0.0 && x0 <= 1.0) {
        return Err(Error::InitialCondition(format!(
            "x0 must lie in (0, 1], got {x0}"
        )));
    }
    Ok(())
}

/// Principal branch of the Lambert W function.
///
/// Halley iteration from a branch-aware starting point. Arguments within
/// 1e-15 below `-1/e` are treated as the branch point.
pub fn lambert_w0(v: f64) -> Result<f64> {
    let branch = -1.0 / E;
    if v.is_nan() || v < branch - 1e-15 {
        return Err(Error::Domain(format!(
            "lambert_w0 needs v >= -1/e, got {v}"
        )));
    }
    if v == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    if v == 0.0 {
        return Ok(0.0);
    }
    let q = E.mul_add(v, 1.0);
    // within rounding of the branch point
    if q <= 1e-15 {
        return Ok(-1.0);
    }
    let mut w = if v < -0.32 {
        // series in p = sqrt(2 (e v + 1)) around the branch point
        let p = (2.0 * q).sqrt();
        -1.0 + p * (1.0
            + p * (-1.0 / 3.0
                + p * (11.0 / 72.0
                    + p * (-43.0 / 540.0 + p * (769.0 / 17280.0 + p * (-221.0 / 8505.0))))))
    } else if v < 3.0 {
        v.ln_1p()
    } else {
        let l1 = v.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    for _ in 0..50 {
        let ew = w.exp();
        let r = w * ew - v;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * r / (2.0 * wp1);
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let step = r / denom;
        let next = (w - step).max(-1.0);
        let done = (next - w).abs() <= 1e-15 * w.abs().max(1.0);
        w = next;
        if done {
            break;
        }
    }
    Ok(w)
}

/// `f(x) = w0 + (1+mu)(x0 - x) + ln(x/x0)` on `(0, x0]`.
pub fn f_eval(x: f64, mu: f64, x0: f64, w0: f64) -> Result<f64> {
    if !(x > 0.0 && x <= x0) {
        return Err(Error::Domain(format!("f is defined on (0, x0], got x = {x}")));
    }
    Ok(f_unchecked(x, mu, x0, w0))
}

fn f_unchecked(x: f64, mu: f64, x0: f64, w0: f64) -> f64 {
    w0 + (1.0 + mu) * (x0 - x) + (x / x0).ln()
}

/// `f'(x) = 1/x - (1+mu)`.
pub fn f_prime(x: f64, mu: f64) -> f64 {
    1.0 / x - (1.0 + mu)
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu > 0.0) {
        return Err(Error::Domain(format!("mu must be positive, got {mu}")));
    }
    Ok(())
}

/// The root of `f` with `f' >= 0`, obtained two independent ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitFraction {
    /// Lambert W route; the reported value.
    pub value: f64,
    /// Bisection + Newton route.
    pub bracketed: f64,
    /// Set when `w0 = 0` and `x0 (1+mu)` is within 1e-8 of 1: both roots of
    /// `f` sit at the edge of the `f' >= 0` region and the smaller is chosen.
    pub near_double_root: bool,
}

impl LimitFraction {
    pub fn route_gap(&self) -> f64 {
        (self.value - self.bracketed).abs()
    }
}

/// Limiting fraction of ignorants `x_inf(mu, x0, w0)`.
pub fn limit_fraction(mu: f64, x0: f64, w0: f64) -> Result<f64> {
    limit_fraction_routes(mu, x0, w0).map(|r| r.value)
}

pub fn limit_fraction_routes(mu: f64, x0: f64, w0: f64) -> Result<LimitFraction> {
    check_mu(mu)?;
    check_x0(x0)?;
    if !(w0 >= 0.0 && w0.is_finite()) {
        return Err(Error::Domain(format!("w0 must be finite and nonnegative, got {w0}")));
    }
    if mu.is_infinite() {
        return Ok(LimitFraction {
            value: 0.0,
            bracketed: 0.0,
            near_double_root: false,
        });
    }
    let a = x0 * (1.0 + mu);
    let near_double_root = w0 == 0.0 && (a - 1.0).abs() < 1e-8;
    if w0 == 0.0 && a <= 1.0 {
        return Ok(LimitFraction {
            value: x0,
            bracketed: x0,
            near_double_root,
        });
    }
    let v = -a * (-a - w0).exp();
    let value = -lambert_w0(v)? / (1.0 + mu);
    let bracketed = bracketed_root(mu, x0, w0);
    Ok(LimitFraction {
        value,
        bracketed,
        near_double_root,
    })
}

/// Root of `f` on the increasing branch by bisection, then Newton polish.
fn bracketed_root(mu: f64, x0: f64, w0: f64) -> f64 {
    let f = |x: f64| f_unchecked(x, mu, x0, w0);
    let mut hi = x0.min(1.0 / (1.0 + mu));
    let mut lo = (x0 * 1e-12).max(1e-300);
    while f(lo) >= 0.0 {
        if lo <= 1e-300 {
            return lo;
        }
        lo = (lo * 1e-12).max(1e-300);
    }
    if f(hi) <= 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..4 {
        let d = f_prime(x, mu);
        if d <= 0.0 {
            break;
        }
        let next = x - f(x) / d;
        if !(next >= lo && next <= hi) {
            break;
        }
        x = next;
    }
    x
}

/// Fluctuation variance of `sqrt(N)(X/N - x_inf)`, or a marker when the
/// limit theorem does not apply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sigma2 {
    Value(f64),
    /// `w0 = 0` and `x0 <= 1/(1+mu)`.
    HypothesesViolated,
}

impl Sigma2 {
    pub fn value(self) -> Option<f64> {
        match self {
            Sigma2::Value(v) => Some(v),
            Sigma2::HypothesesViolated => None,
        }
    }
}

impl fmt::Display for Sigma2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sigma2::Value(v) => write!(f, "{v}"),
            Sigma2::HypothesesViolated => f.write_str("CLT-hypotheses-violated"),
        }
    }
}

impl Serialize for Sigma2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Sigma2::Value(v) => s.serialize_f64(*v),
            Sigma2::HypothesesViolated => s.serialize_str("CLT-hypotheses-violated"),
        }
    }
}

pub fn clt_hypotheses_hold(mu: f64, x0: f64, w0: f64) -> bool {
    w0 > 0.0 || x0 * (1.0 + mu) > 1.0
}

/// Closed-form CLT variance.
pub fn clt_variance(mu: f64, nu2: f64, x0: f64, w0: f64) -> Result<Sigma2> {
    if !nu2.is_finite() {
        return Err(Error::InfiniteVariance);
    }
    let x_inf = limit_fraction(mu, x0, w0)?;
    if !clt_hypotheses_hold(mu, x0, w0) {
        return Ok(Sigma2::HypothesesViolated);
    }
    let num = x_inf * (1.0 - (1.0 / x0 + w0 + (x0 - x_inf) * (1.0 + mu - nu2)) * x_inf);
    let den = (1.0 - (1.0 + mu) * x_inf).powi(2);
    Ok(Sigma2::Value(num / den))
}

/// Time at which the fluid limit of `W/N` reaches zero.
pub fn stop_time(mu: f64, x0: f64, w0: f64) -> Result<f64> {
    let x_inf = limit_fraction(mu, x0, w0)?;
    Ok(stop_time_from_root(mu, x0, w0, x_inf))
}

fn stop_time_from_root(mu: f64, x0: f64, w0: f64, x_inf: f64) -> f64 {
    w0 + (1.0 + mu) * (x0 - x_inf)
}

/// Fluid limit `(x(t), w(t))` of `(X/N, W/N)`.
pub fn trajectory(mu: f64, x0: f64, w0: f64, t: f64) -> Result<(f64, f64)> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be nonnegative, got {t}")));
    }
    let x = x0 * (-t).exp();
    Ok((x, w0 + (1.0 + mu) * (x0 - x) - t))
}

/// The `(U_x, U_w)` block of the limiting Gaussian covariance at the stop time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovarianceResult {
    pub var_ux: f64,
    pub var_uw: f64,
    pub cov_uxuw: f64,
}

impl CovarianceResult {
    pub fn determinant(&self) -> f64 {
        self.var_ux * self.var_uw - self.cov_uxuw * self.cov_uxuw
    }
}

/// Covariance entries at the stop time together with the variance of the
/// linear combination `U_x + c U_w`, `c = x_inf / ((mu+1) x_inf - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StopCovariance {
    pub covariance: CovarianceResult,
    pub assembled_sigma2: Sigma2,
}

pub fn covariance_at_stop(mu: f64, nu2: f64, x0: f64, w0: f64) -> Result<StopCovariance> {
    if !nu2.is_finite() {
        return Err(Error::InfiniteVariance);
    }
    let x_inf = limit_fraction(mu, x0, w0)?;
    let t_inf = stop_time_from_root(mu, x0, w0, x_inf);
    let m1 = mu + 1.0;
    let spread = (x0 - x_inf) * x_inf / x0;
    let covariance = CovarianceResult {
        var_ux: spread,
        var_uw: m1 * m1 * spread + nu2 * (x0 - x_inf) + (1.0 - 2.0 * m1 * x_inf) * t_inf,
        cov_uxuw: t_inf * x_inf - m1 * spread,
    };
    let assembled_sigma2 = if clt_hypotheses_hold(mu, x0, w0) {
        let c = x_inf / (m1 * x_inf - 1.0);
        Sigma2::Value(
            covariance.var_ux + 2.0 * c * covariance.cov_uxuw + c * c * covariance.var_uw,
        )
    } else {
        Sigma2::HypothesesViolated
    };
    Ok(StopCovariance {
        covariance,
        assembled_sigma2,
    })
}

/// Shape of `f` on `(0, x0]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RootCase {
    /// `w0 > 0`: `f(x0) > 0` and the root is interior.
    W0Positive,
    /// `w0 = 0`, `x0 > 1/(1+mu)`: `x0` is a spurious root, the limit is interior.
    W0ZeroSupercritical,
    /// `w0 = 0`, `x0 <= 1/(1+mu)`: the rumour does not spread, `x_inf = x0`.
    W0ZeroCriticalOrSub,
}

impl RootCase {
    pub fn label(self) -> &'static str {
        match self {
            RootCase::W0Positive => "W0_POSITIVE",
            RootCase::W0ZeroSupercritical => "W0_ZERO_SUPERCRITICAL",
            RootCase::W0ZeroCriticalOrSub => "W0_ZERO_CRITICAL_OR_SUB",
        }
    }
}

pub fn classify_case(mu: f64, x0: f64, w0: f64) -> RootCase {
    if w0 > 0.0 {
        RootCase::W0Positive
    } else if x0 * (1.0 + mu) > 1.0 {
        RootCase::W0ZeroSupercritical
    } else {
        RootCase::W0ZeroCriticalOrSub
    }
}

/// `points` evenly spaced samples `(x, f(x))` over `[x0 * 1e-4, x0]`.
pub fn f_profile(mu: f64, x0: f64, w0: f64, points: usize) -> Vec<(f64, f64)> {
    let lo = x0 * 1e-4;
    let n = points.max(2);
    (0..n)
        .map(|k| {
            let x = if k == n - 1 {
                x0
            } else {
                lo + (x0 - lo) * k as f64 / (n - 1) as f64
            };
            (x, f_unchecked(x, mu, x0, w0))
        })
        .collect()
}

/// Every closed-form quantity for one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticResult {
    pub mu: f64,
    /// `None` when the variance of R is infinite.
    pub nu2: Option<f64>,
    pub x0: f64,
    pub w0: f64,
    pub x_inf: f64,
    /// `None` when the variance of R is infinite.
    pub sigma2: Option<Sigma2>,
    /// `None` when the mean of R is infinite.
    pub t_inf: Option<f64>,
    pub case: Option<RootCase>,
    pub near_double_root: bool,
}

pub fn analyze_moments(mu: f64, nu2: f64, ic: &InitialCondition) -> Result<AnalyticResult> {
    let (x0, w0) = (ic.x0(), ic.w0());
    let root = limit_fraction_routes(mu, x0, w0)?;
    let finite_mean = mu.is_finite();
    let sigma2 = if finite_mean && nu2.is_finite() {
        Some(clt_variance(mu, nu2, x0, w0)?)
    } else {
        None
    };
    Ok(AnalyticResult {
        mu,
        nu2: nu2.is_finite().then_some(nu2),
        x0,
        w0,
        x_inf: root.value,
        sigma2,
        t_inf: finite_mean.then(|| stop_time_from_root(mu, x0, w0, root.value)),
        case: finite_mean.then(|| classify_case(mu, x0, w0)),
        near_double_root: root.near_double_root,
    })
}

pub fn analyze(dist: &StiflingDistribution, ic: &InitialCondition) -> Result<AnalyticResult> {
    analyze_moments(dist.mean(), dist.variance(), ic)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambert_examples() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert_eq!(lambert_w0(-1.0 / E).unwrap(), -1.0);
        assert!((lambert_w0(E).unwrap() - 1.0).abs() < 1e-15);
        assert!(lambert_w0(-1.0 / E - 1e-12).is_err());
        assert!(lambert_w0(f64::NAN).is_err());
    }

    #[test]
    fn lambert_inverts_on_wide_range() {
        let mut v = -1.0 / E + 1e-14;
        while v < 1e12 {
            let w = lambert_w0(v).unwrap();
            assert!(w >= -1.0);
            let back = w * w.exp();
            let tol = 1e-13 * v.abs().max(1e-300) + 1e-15;
            assert!((back - v).abs() <= tol.max(4e-16), "v={v} w={w} back={back}");
            v = if v < 0.0 { v * 0.9 + 1e-4 } else { v * 1.7 + 1e-3 };
        }
    }

    #[test]
    fn f_examples() {
        assert_eq!(f_eval(1.0, 1.0, 1.0, 0.3).unwrap(), 0.3);
        assert!(f_eval(0.203, 1.0, 1.0, 0.0).unwrap().abs() < 5e-3);
        let v = f_eval(0.5, 1.0, 1.0, 0.0).unwrap();
        assert!((v - (1.0 + 0.5f64.ln())).abs() < 1e-15);
        assert!((v - 0.3069).abs() < 1e-4);
        assert!(f_eval(0.0, 1.0, 1.0, 0.0).is_err());
        assert!(f_eval(1.1, 1.0, 1.0, 0.0).is_err());
        assert_eq!(f_prime(0.5, 1.0), 0.0);
    }

    #[test]
    fn limit_fraction_examples() {
        let r = |mu, x0, w0| limit_fraction(mu, x0, w0).unwrap();
        assert!((r(1.0, 1.0, 0.0) - 0.203).abs() < 5e-4);
        assert!((r(2.0, 1.0, 0.0) - 0.0595).abs() < 5e-5);
        assert_eq!(r(1.0, 0.4, 0.0), 0.4);
        assert!((r(0.1, 1.0, 0.0) - 0.824).abs() < 5e-4);
        assert_eq!(r(1.0, 0.5, 0.0), 0.5);
        assert_eq!(r(f64::INFINITY, 1.0, 0.0), 0.0);
        assert!(limit_fraction(0.0, 1.0, 0.0).is_err());
        assert!(limit_fraction(-1.0, 1.0, 0.0).is_err());
        assert!(limit_fraction(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn root_satisfies_definition() {
        for &(mu, x0, w0) in &[(1.0, 1.0, 0.0), (0.3, 0.9, 0.5), (5.0, 0.2, 2.0), (0.05, 1.0, 0.01)] {
            let x = limit_fraction(mu, x0, w0).unwrap();
            assert!(f_eval(x, mu, x0, w0).unwrap().abs() < 1e-10);
            assert!(f_prime(x, mu) >= 0.0);
            assert!(x <= x0.min(1.0 / (1.0 + mu)) + 1e-12);
        }
    }

    #[test]
    fn variance_examples() {
        let s = |mu, nu2, x0, w0| clt_variance(mu, nu2, x0, w0).unwrap();
        assert!((s(1.0, 0.0, 1.0, 0.0).value().unwrap() - 0.273).abs() < 5e-4);
        assert!((s(2.0, 2.0, 1.0, 0.0).value().unwrap() - 0.0780).abs() < 5e-5);
        assert_eq!(s(1.0, 7.0, 0.4, 0.0), Sigma2::HypothesesViolated);
        assert_eq!(
            clt_variance(1.0, f64::INFINITY, 1.0, 0.0),
            Err(Error::InfiniteVariance)
        );
    }

    #[test]
    fn stop_time_examples() {
        let t = stop_time(1.0, 1.0, 0.0).unwrap();
        assert!((t - 1.594).abs() < 1e-3);
        assert_eq!(stop_time(1.0, 0.4, 0.0).unwrap(), 0.0);
        assert!((stop_time(2.0, 1.0, 0.0).unwrap() - 2.8215).abs() < 2e-4);
        let x = limit_fraction(0.7, 0.8, 0.4).unwrap();
        let t = stop_time(0.7, 0.8, 0.4).unwrap();
        assert!((t + (x / 0.8).ln()).abs() < 1e-10);
    }

    #[test]
    fn trajectory_examples() {
        assert_eq!(trajectory(1.0, 0.7, 0.2, 0.0).unwrap(), (0.7, 0.2));
        let t = stop_time(1.0, 1.0, 0.0).unwrap();
        let (x, w) = trajectory(1.0, 1.0, 0.0, t).unwrap();
        assert!((x - 0.203).abs() < 5e-4);
        assert!(w.abs() < 1e-12);
        let (x, w) = trajectory(1.0, 1.0, 0.0, 2f64.ln()).unwrap();
        assert!((x - 0.5).abs() < 1e-15);
        assert!((w - (1.0 - 2f64.ln())).abs() < 1e-15);
        // w(t) = f(x(t))
        let (x, w) = trajectory(0.6, 0.9, 0.3, 0.8).unwrap();
        assert!((w - f_eval(x, 0.6, 0.9, 0.3).unwrap()).abs() < 1e-14);
        assert!(trajectory(1.0, 1.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn covariance_examples() {
        let c = covariance_at_stop(1.0, 0.0, 1.0, 0.0).unwrap();
        let x = limit_fraction(1.0, 1.0, 0.0).unwrap();
        assert!((c.covariance.var_ux - (1.0 - x) * x).abs() < 1e-15);
        assert!((c.covariance.var_ux - 0.1618).abs() < 5e-4);
        assert!((c.assembled_sigma2.value().unwrap() - 0.273).abs() < 5e-4);
        let z = covariance_at_stop(1.0, 0.5, 0.4, 0.0).unwrap();
        assert_eq!(
            z.covariance,
            CovarianceResult {
                var_ux: 0.0,
                var_uw: 0.0,
                cov_uxuw: 0.0
            }
        );
        assert_eq!(z.assembled_sigma2, Sigma2::HypothesesViolated);
    }

    #[test]
    fn case_examples() {
        assert_eq!(classify_case(1.0, 1.0, 0.0), RootCase::W0ZeroSupercritical);
        assert_eq!(classify_case(1.0, 0.4, 0.0), RootCase::W0ZeroCriticalOrSub);
        assert_eq!(classify_case(1.0, 1.0, 0.3), RootCase::W0Positive);
        let prof = f_profile(1.0, 1.0, 0.0, 11);
        assert_eq!(prof.len(), 11);
        assert_eq!(prof.last().unwrap(), &(1.0, 0.0));
        assert!((prof[0].0 - 1e-4).abs() < 1e-18);
    }

    #[test]
    fn initial_condition_validation() {
        assert!(InitialCondition::new(0.0, 0.0).is_err());
        assert!(InitialCondition::new(1.2, 0.0).is_err());
        assert!(InitialCondition::new(0.5, -1.0).is_err());
        let y: BTreeMap<u64, f64> = [(1, 0.2), (3, 0.1)].into_iter().collect();
        let ic = InitialCondition::with_spreaders(0.6, y).unwrap();
        assert!((ic.w0() - 0.5).abs() < 1e-15);
        assert!((ic.z0() - 0.1).abs() < 1e-12);
        let y: BTreeMap<u64, f64> = [(1, 0.6)].into_iter().collect();
        assert!(InitialCondition::with_spreaders(0.6, y).is_err());
        assert!(InitialCondition::classical().is_classical());
        assert!(InitialCondition::classical().is_degenerate());
    }

    #[test]
    fn analyze_infinite_mean() {
        let d = StiflingDistribution::zeta(1.5).unwrap();
        let r = analyze(&d, &InitialCondition::classical()).unwrap();
        assert_eq!(r.x_inf, 0.0);
        assert_eq!(r.sigma2, None);
        assert_eq!(r.t_inf, None);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"x_inf\":0.0"));
    }
}
