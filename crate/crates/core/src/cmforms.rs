//! Fourier coefficients of the CM newforms `f^k_alpha` attached to the twisted
//! Hecke characters
//!
//! `psi^k_alpha(P) = psi(P)^e * (eps/P)_w^e * (alpha/P)_w`, `e = (k-1)/h`,
//!
//! with `a_p = psi^k_alpha(P) + psi^k_alpha(P̄)` the trace at split `p`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{checked_pow_u128, inv_mod, mod_pow, mul_mod, residue, Rational};
use crate::quadfield::{
    hecke_psi, split_type, QuadError, QuadField, QuadInt, SplitPrime, SplitType,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CmError {
    #[error("weight {k} is not 1 modulo the class number {h}")]
    WeightIncompatible { k: u64, h: u64 },
    #[error("{p} is not a split prime of the field")]
    NotSplit { p: u64 },
    #[error("{p} divides the twist or the discriminant")]
    NotCoprime { p: u64 },
    #[error("no root of unity reduces to {value} modulo the prime over {p}")]
    LiftFailure { value: u64, p: u64 },
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// The newform `f^k_alpha` over `field`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CMFormSpec {
    field: QuadField,
    k: u64,
    alpha: Rational,
}

impl CMFormSpec {
    pub fn new(field: QuadField, k: u64, alpha: Rational) -> Result<Self, CmError> {
        if k < 2 || !(k - 1).is_multiple_of(field.h()) {
            return Err(CmError::WeightIncompatible { k, h: field.h() });
        }
        Ok(CMFormSpec { field, k, alpha })
    }

    pub fn field(&self) -> QuadField {
        self.field
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn alpha(&self) -> Rational {
        self.alpha
    }

    /// `(k - 1) / h`.
    pub fn exponent(&self) -> u64 {
        (self.k - 1) / self.field.h()
    }

    /// Same form, twist replaced.
    pub fn with_alpha(&self, alpha: Rational) -> Self {
        CMFormSpec { alpha, ..*self }
    }

    /// Whether `p` divides the numerator or denominator of `alpha`, or `D`.
    pub fn is_bad(&self, p: u64) -> bool {
        self.alpha.divisible_by(p) || self.field.disc().unsigned_abs().is_multiple_of(p)
    }
}

impl fmt::Display for CMFormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={},k={},alpha={}", self.field.d(), self.k, self.alpha)
    }
}

/// A coefficient, or the reason there is none to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmValue<T> {
    Value(T),
    /// `p` inert: the coefficient vanishes identically.
    Zero,
    /// `p` divides `alpha * D`, or `p = 2` splits.
    Skip,
}

/// `psi^k_alpha(P)` for the prime `P` selected by `sp`, as an exact integer.
pub fn psi_k_alpha(spec: &CMFormSpec, sp: &SplitPrime) -> Result<QuadInt, CmError> {
    let p = sp.p();
    if spec.is_bad(p) {
        return Err(CmError::NotCoprime { p });
    }
    let field = spec.field;
    let e = spec.exponent();
    let (s_eps, s_alpha) = twist_symbols(spec, p);
    let u_eps = lift_unit(sp, s_eps)?;
    let u_alpha = lift_unit(sp, s_alpha)?;
    let psi = hecke_psi(sp)?;
    let twisted = field.mul(psi, u_eps)?;
    let z = field.pow(twisted, e)?;
    Ok(field.mul(z, u_alpha)?)
}

/// `(eps/P)_w` and `(alpha/P)_w` as elements of `F_p = O/P`.
fn twist_symbols(spec: &CMFormSpec, p: u64) -> (u64, u64) {
    let w = spec.field.w() as u64;
    let eps = residue(spec.field.eps() as i128, p);
    let alpha = spec.alpha.residue_mod(p).expect("p does not divide alpha");
    (mod_pow(eps, (p - 1) / w, p), mod_pow(alpha, (p - 1) / w, p))
}

/// The root of unity of `O` congruent to `value` modulo `P`.
fn lift_unit(sp: &SplitPrime, value: u64) -> Result<QuadInt, CmError> {
    sp.field()
        .units()
        .into_iter()
        .find(|&u| sp.reduce_at_p(u) == value)
        .ok_or(CmError::LiftFailure { value, p: sp.p() })
}

/// `a_p(f^k_alpha)`, with the first prime above `p` chosen by the smaller root.
pub fn ap_cm(spec: &CMFormSpec, p: u64) -> Result<CmValue<i128>, CmError> {
    let sp = match classify(spec, p) {
        Ok(sp) => sp,
        Err(v) => return Ok(v),
    };
    ap_cm_at(spec, &sp).map(CmValue::Value)
}

/// `a_p` computed from an explicitly chosen prime above `p`.
pub fn ap_cm_at(spec: &CMFormSpec, sp: &SplitPrime) -> Result<i128, CmError> {
    let a = psi_k_alpha(spec, sp)?.trace();
    if let Some(bound) =
        checked_pow_u128(sp.p(), (spec.k - 1) as u32).and_then(|b| b.checked_mul(4))
    {
        let a2 = a.unsigned_abs().checked_mul(a.unsigned_abs());
        assert!(
            a2.is_none_or(|a2| a2 <= bound),
            "|a_{}| = {a} violates the Deligne bound",
            sp.p()
        );
    }
    Ok(a)
}

/// `a_p mod p`, computed in `F_p` only: the image of `psi^k_alpha(P)` in `O/P̄`.
pub fn ap_cm_mod_p(spec: &CMFormSpec, p: u64) -> Result<CmValue<u64>, CmError> {
    let sp = match classify(spec, p) {
        Ok(sp) => sp,
        Err(v) => return Ok(v),
    };
    ap_cm_mod_p_at(spec, &sp).map(CmValue::Value)
}

pub fn ap_cm_mod_p_at(spec: &CMFormSpec, sp: &SplitPrime) -> Result<u64, CmError> {
    let p = sp.p();
    if spec.is_bad(p) {
        return Err(CmError::NotCoprime { p });
    }
    let (s_eps, s_alpha) = twist_symbols(spec, p);
    // a root of unity u ≡ s (mod P) reduces to 1/s modulo P̄
    let inv = |s: u64| inv_mod(s, p).expect("root of unity is invertible");
    let psi_bar = sp.reduce_at_pbar(hecke_psi(sp)?);
    let base = mul_mod(psi_bar, inv(s_eps), p);
    Ok(mul_mod(mod_pow(base, spec.exponent(), p), inv(s_alpha), p))
}

fn classify<T>(spec: &CMFormSpec, p: u64) -> Result<SplitPrime, CmValue<T>> {
    match split_type(spec.field, p) {
        SplitType::Ramified | SplitType::SplitTwo => Err(CmValue::Skip),
        SplitType::Inert => Err(CmValue::Zero),
        SplitType::Split(_) if spec.alpha.divisible_by(p) => Err(CmValue::Skip),
        SplitType::Split(sp) => Ok(sp),
    }
}
