//! Closed-form constants and lower bounds for short intervals with a
//! prescribed number of primes.
//!
//! Every bound has the shape `exp(log_value)` with astronomically negative
//! `log_value`, so values are carried in log space and only exponentiated
//! for display.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::small_primes;

/// Largest `k` for which `C0(k)` uses the exact product over primes `<= k`.
/// Beyond it the product is replaced by Mertens' `exp(-gamma) / ln k`.
pub const EXACT_MERTENS_LIMIT: f64 = 1e7;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Unspecified constants of the theory, fixed to configurable defaults.
///
/// None of these values is derived from the sieve analysis; they are
/// placeholders that make every formula evaluable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundParams {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "C_prime")]
    pub c_prime: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub c1: f64,
    pub c2: f64,
    pub eps1: f64,
    pub eps2: f64,
}

impl Default for BoundParams {
    fn default() -> Self {
        BoundParams {
            c: 50.0,
            c_prime: 1.0,
            d: 1.0,
            c1: 1.0,
            c2: 1.0,
            eps1: 0.003,
            eps2: 0.5,
        }
    }
}

impl BoundParams {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("C", self.c),
            ("C_prime", self.c_prime),
            ("D", self.d),
            ("c1", self.c1),
            ("c2", self.c2),
            ("eps1", self.eps1),
            ("eps2", self.eps2),
        ];
        for (name, v) in named {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.eps2 >= 1.0 {
            return Err(Error::invalid(format!(
                "eps2 must be below 1, got {}",
                self.eps2
            )));
        }
        Ok(())
    }
}

/// `k(m) = ceil(C exp(49 m / C'))`, returned as an integer-valued float since
/// it leaves the `u64` range already at `m = 1` with the default constants.
pub fn k_of_m(m: u64, params: &BoundParams) -> Result<f64> {
    let k = (params.c * (49.0 * m as f64 / params.c_prime).exp()).ceil();
    if !k.is_finite() {
        return Err(Error::Domain(format!(
            "k(m) overflows a double for m = {m}"
        )));
    }
    Ok(k)
}

fn check_k(k: f64) -> Result<()> {
    if !(k >= 2.0 && k.is_finite()) {
        return Err(Error::invalid(format!("k must be at least 2, got {k}")));
    }
    Ok(())
}

/// `eps(k) = k^-4 (ln k)^-2`, the largest admissible `lambda`.
pub fn epsilon_of_k(k: f64) -> Result<f64> {
    check_k(k)?;
    let l = k.ln();
    Ok(1.0 / (k.powi(4) * l * l))
}

/// `prod_{p <= k} (1 - 1/p)`, exact up to [`EXACT_MERTENS_LIMIT`].
pub fn mertens_product(k: f64) -> f64 {
    if k < 2.0 {
        return 1.0;
    }
    if k <= EXACT_MERTENS_LIMIT {
        small_primes(k.floor() as u64)
            .iter()
            .map(|&p| 1.0 - 1.0 / p as f64)
            .product()
    } else {
        (-EULER_GAMMA).exp() / k.ln()
    }
}

/// Spacing divisor `C0(k) = 4k / prod_{p <= k} (1 - 1/p)`.
pub fn c0_of_k(k: f64) -> Result<f64> {
    check_k(k)?;
    Ok(4.0 * k / mertens_product(k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    /// `lambda^(k+1) e^(-D k^4 ln k)`, for all primes.
    #[serde(rename = "1.1")]
    AllPrimes,
    /// The all-primes bound divided by `q^(k+1)`, for primes `a (mod q)`.
    #[serde(rename = "1.2")]
    Progression,
    /// Same formula as 1.1 for a Chebotarev set; here a quadratic splitting
    /// class, evaluated with the shared default constants.
    #[serde(rename = "1.4")]
    Chebotarev,
    /// `lambda e^(-D k^4 ln k) / (ln x)^k`, valid for `lambda < 1/(k ln k)`.
    #[serde(rename = "1.5")]
    LargerLambda,
}

impl Theorem {
    pub const ALL: [Theorem; 4] = [
        Theorem::AllPrimes,
        Theorem::Progression,
        Theorem::Chebotarev,
        Theorem::LargerLambda,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Theorem::AllPrimes => "1.1",
            Theorem::Progression => "1.2",
            Theorem::Chebotarev => "1.4",
            Theorem::LargerLambda => "1.5",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub ln_value: f64,
    /// `exp(ln_value)`; zero when it underflows.
    pub value: f64,
}

impl BoundValue {
    fn from_ln(ln_value: f64) -> Self {
        BoundValue {
            ln_value,
            value: ln_value.exp(),
        }
    }
}

/// Inputs a theorem may need beyond `lambda` and `m`.
#[derive(Debug, Clone, Copy, Default)]
pub struct BoundInputs {
    pub q: Option<u64>,
    /// Natural logarithm of `x`.
    pub ln_x: Option<f64>,
}

/// Evaluates the lower bound of `theorem` with `k = k_of_m(m)`.
pub fn lower_bound(
    theorem: Theorem,
    lambda: f64,
    m: u64,
    inputs: BoundInputs,
    params: &BoundParams,
) -> Result<BoundValue> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let k = k_of_m(m, params)?;
    check_k(k)?;
    let ln_k = k.ln();
    let decay = params.d * k.powi(4) * ln_k;
    match theorem {
        Theorem::AllPrimes | Theorem::Progression | Theorem::Chebotarev => {
            let eps = epsilon_of_k(k)?;
            if lambda > eps {
                return Err(Error::Precondition(format!(
                    "lambda <= eps(k) = k^-4 (ln k)^-2 = {eps:e} with k = {k}, got lambda = {lambda:e}"
                )));
            }
            let mut ln_value = (k + 1.0) * lambda.ln() - decay;
            if theorem == Theorem::Progression {
                let q = inputs.q.filter(|&q| q >= 1).ok_or_else(|| {
                    Error::Precondition("theorem 1.2 needs a modulus q >= 1".into())
                })?;
                ln_value -= (k + 1.0) * (q as f64).ln();
            }
            Ok(BoundValue::from_ln(ln_value))
        }
        Theorem::LargerLambda => {
            let ln_x = inputs
                .ln_x
                .ok_or_else(|| Error::Precondition("theorem 1.5 needs x".into()))?;
            if ln_x.is_nan() || ln_x <= 0.0 {
                return Err(Error::Precondition(format!(
                    "theorem 1.5 needs x > 1, got ln x = {ln_x}"
                )));
            }
            let cap = 1.0 / (k * ln_k);
            if lambda >= cap {
                return Err(Error::Precondition(format!(
                    "lambda < 1/(k ln k) = {cap:e} with k = {k}, got lambda = {lambda:e}"
                )));
            }
            Ok(BoundValue::from_ln(lambda.ln() - decay - k * ln_x.ln()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    /// The inequality, e.g. `"m <= eps1 ln ln x"`.
    pub relation: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamCheck {
    pub ok: bool,
    pub k: f64,
    pub conditions: Vec<Condition>,
    pub violated: Vec<Condition>,
}

/// Checks the hypotheses under which the bound holds with `m` and `lambda`
/// varying with `x`. `ln_x` is the natural log of `x`, so that scales far
/// beyond `f64::MAX` can be checked. The `<< 1` relation is read as `<= 1`.
pub fn check_uniform_range(
    m: u64,
    lambda: f64,
    ln_x: f64,
    params: &BoundParams,
) -> Result<ParamCheck> {
    if ln_x.is_nan() || ln_x <= 1.0 {
        return Err(Error::invalid(format!("need ln x > 1, got {ln_x}")));
    }
    let k = k_of_m(m, params)?;
    check_k(k)?;
    let ln_k = k.ln();
    let mf = m as f64;
    let cond = |name: &str, relation: &str, lhs: f64, rhs: f64, holds: bool| Condition {
        name: name.into(),
        relation: relation.into(),
        lhs,
        rhs,
        holds,
    };
    let small_m = params.eps1 * ln_x.ln();
    let lambda_floor = ln_x.powf(params.eps2 - 1.0);
    let sieve_cap = k.powi(4) * ln_k * ln_k * lambda;
    let lambda_min = k * ln_k / ln_x;
    let relation_lhs = lambda * (49.0 * mf + params.c1).powi(2) * (196.0 * params.c2 * mf).exp();
    let conditions = vec![
        cond("m_small", "m <= eps1 ln ln x", mf, small_m, mf <= small_m),
        cond(
            "lambda_floor",
            "lambda >= (ln x)^(eps2 - 1)",
            lambda,
            lambda_floor,
            lambda >= lambda_floor,
        ),
        cond(
            "lambda_cap",
            "k^4 (ln k)^2 lambda <= 1",
            sieve_cap,
            1.0,
            sieve_cap <= 1.0,
        ),
        cond(
            "lambda_min",
            "lambda > k ln k / ln x",
            lambda,
            lambda_min,
            lambda > lambda_min,
        ),
        cond(
            "parameter_relation",
            "lambda (49m + c1)^2 exp(196 c2 m) <= 1",
            relation_lhs,
            1.0,
            relation_lhs <= 1.0,
        ),
    ];
    let violated: Vec<_> = conditions.iter().filter(|c| !c.holds).cloned().collect();
    Ok(ParamCheck {
        ok: violated.is_empty(),
        k,
        conditions,
        violated,
    })
}
