//! Continued fractions of ω and the fundamental unit of O_K.
//!
//! For a quadratic irrational ξ_i = (P_i + √d)/Q_i the expansion advances by
//!
//! ```text
//! a_i = ⌊(P_i + ⌊√d⌋)/Q_i⌋,   P_{i+1} = a_i·Q_i − P_i,   Q_{i+1} = (d − P_{i+1}²)/Q_i,
//! ```
//!
//! with (P_0, Q_0) = (0, 1) for ω = √d and (1, 2) for ω = (1+√d)/2. The tail
//! starting at index 1 is purely periodic; the period length ℓ is the first
//! return of (P, Q) to (P_1, Q_1). With convergents p_i/q_i of ω, the
//! fundamental unit of O_K is
//!
//! ```text
//! ε = p_{ℓ−1} − q_{ℓ−1}·ω̄ = (p_{ℓ−1} − tr(ω)·q_{ℓ−1}) + q_{ℓ−1}·ω,   N(ε) = (−1)^ℓ.
//! ```
//!
//! Everything is phrased in ω-coordinates (x, y) meaning x + y·ω; the
//! √d-coordinates (x', y') with ε = (x' + y'·√d)/2 are derived from them.
//! Powers of ε stay in O_K, and ε^k lies in the order O_f = Z + fωZ exactly
//! when f divides the ω-coordinate v of ε^k.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{FieldData, OmegaKind};
use crate::config;
use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Expansion state machine
// ---------------------------------------------------------------------------

/// Word-sized (P, Q) state of the expansion of ω. Valid for every supported
/// d since 0 ≤ P ≤ √d and 0 < Q ≤ 2√d + 1 throughout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct CfState {
    p: u64,
    q: u64,
}

struct CfEngine {
    d: u64,
    isqrt_d: u64,
    state: CfState,
}

impl CfEngine {
    fn new(fd: &FieldData) -> CfEngine {
        let state = match fd.omega_kind {
            OmegaKind::SqrtD => CfState { p: 0, q: 1 },
            OmegaKind::HalfOnePlusSqrtD => CfState { p: 1, q: 2 },
        };
        CfEngine { d: fd.d, isqrt_d: fd.d.isqrt(), state }
    }

    /// Emits a_i and advances (P_i, Q_i) to (P_{i+1}, Q_{i+1}).
    fn step(&mut self) -> u64 {
        let CfState { p, q } = self.state;
        let a = (p + self.isqrt_d) / q;
        let p_next = a * q - p;
        let q_next = (self.d - p_next * p_next) / q;
        debug_assert_eq!((self.d - p_next * p_next) % q, 0, "Q | d − P²");
        self.state = CfState { p: p_next, q: q_next };
        a
    }
}

/// Runs the expansion until the period closes, handing every partial
/// quotient a_0, a_1, …, a_{ℓ−1} to `emit`, and returns ℓ.
fn drive_period(fd: &FieldData, mut emit: impl FnMut(u64)) -> Result<u64> {
    let limit = config::cf_step_limit();
    let mut engine = CfEngine::new(fd);
    emit(engine.step());
    let target = engine.state;
    for i in 1..=limit {
        let a = engine.step();
        if engine.state == target {
            return Ok(i);
        }
        emit(a);
    }
    Err(Error::budget(format!(
        "continued fraction of ω for d = {} did not close within {limit} steps",
        fd.d
    )))
}

// ---------------------------------------------------------------------------
// Fundamental unit, exact
// ---------------------------------------------------------------------------

/// Serializes a big integer as its decimal string, the crate-wide JSON
/// convention for values that can exceed word size.
pub(crate) fn ser_biguint<S: serde::Serializer>(
    x: &BigUint,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// The fundamental unit ε > 1 of O_K in both coordinate systems.
#[derive(Clone, Debug, Serialize)]
pub struct FundamentalUnit {
    /// ω-coordinates: ε = u + v·ω.
    #[serde(serialize_with = "ser_biguint")]
    pub u: BigUint,
    #[serde(serialize_with = "ser_biguint")]
    pub v: BigUint,
    /// √d-coordinates: ε = (u_sqrt + v_sqrt·√d)/2.
    #[serde(serialize_with = "ser_biguint")]
    pub u_sqrt: BigUint,
    #[serde(serialize_with = "ser_biguint")]
    pub v_sqrt: BigUint,
    /// N(ε) ∈ {−1, +1}, equal to (−1)^period_length.
    pub norm: i8,
    /// Period length ℓ of the continued fraction of ω.
    pub period_length: u64,
}

/// Expands ω until the period closes and assembles ε exactly.
///
/// Errors with [`Error::BudgetExhausted`] when the period exceeds the
/// configured step limit (`QUADORDERS_CF_STEPS`).
pub fn fundamental_unit(fd: &FieldData) -> Result<FundamentalUnit> {
    // Convergent recurrence p_i = a_i·p_{i−1} + p_{i−2}, seeded with
    // (p_{−1}, q_{−1}) = (1, 0) and (p_{−2}, q_{−2}) = (0, 1) so the first
    // emitted quotient a_0 produces (p_0, q_0) = (a_0, 1).
    let (mut p_prev, mut q_prev) = (BigUint::zero(), BigUint::one());
    let (mut p_cur, mut q_cur) = (BigUint::one(), BigUint::zero());

    let ell = drive_period(fd, |a| {
        let a = BigUint::from(a);
        let p_next = &a * &p_cur + &p_prev;
        let q_next = &a * &q_cur + &q_prev;
        p_prev = std::mem::replace(&mut p_cur, p_next);
        q_prev = std::mem::replace(&mut q_cur, q_next);
    })?;

    // drive_period emitted exactly a_0 … a_{ℓ−1}, so the last update left
    // (p_cur, q_cur) = (p_{ℓ−1}, q_{ℓ−1}).
    let trace = fd.omega_kind.trace();
    let u = &p_cur - BigUint::from(trace) * &q_cur;
    let v = q_cur;
    let (u_sqrt, v_sqrt) = match fd.omega_kind {
        OmegaKind::SqrtD => (2u32 * &u, 2u32 * &v),
        OmegaKind::HalfOnePlusSqrtD => (2u32 * &u + &v, v.clone()),
    };
    let norm: i8 = if ell % 2 == 0 { 1 } else { -1 };

    // |u_sqrt² − d·v_sqrt²| = 4 with the sign matching (−1)^ℓ; failure here
    // would mean the engine itself is broken.
    let lhs = &u_sqrt * &u_sqrt;
    let rhs = BigUint::from(fd.d) * &v_sqrt * &v_sqrt;
    let four = BigUint::from(4u32);
    let norm_ok = match norm {
        1 => lhs == rhs.clone() + &four,
        _ => lhs + &four == rhs,
    };
    if !norm_ok {
        return Err(Error::Inconsistency(format!(
            "unit for d = {} fails |x² − dy²| = 4 with sign (−1)^ℓ",
            fd.d
        )));
    }

    Ok(FundamentalUnit { u, v, u_sqrt, v_sqrt, norm, period_length: ell })
}

// ---------------------------------------------------------------------------
// Modular variants
// ---------------------------------------------------------------------------

/// ω-coordinates of ε reduced mod m, with the exact norm and period length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct UnitResidues {
    pub u: u64,
    pub v: u64,
    pub norm: i8,
    pub period_length: u64,
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// ω-coordinates of ε mod m (m ≥ 2) without constructing the big integers.
pub fn unit_coords_mod(fd: &FieldData, m: u64) -> Result<UnitResidues> {
    if m < 2 {
        return Err(Error::invalid(format!("modulus m = {m} must be at least 2")));
    }
    let (mut p_prev, mut q_prev) = (0u64, 1 % m);
    let (mut p_cur, mut q_cur) = (1 % m, 0u64);
    let ell = drive_period(fd, |a| {
        let a = a % m;
        let p_next = (mul_mod(a, p_cur, m) + p_prev) % m;
        let q_next = (mul_mod(a, q_cur, m) + q_prev) % m;
        p_prev = std::mem::replace(&mut p_cur, p_next);
        q_prev = std::mem::replace(&mut q_cur, q_next);
    })?;
    let trace = fd.omega_kind.trace();
    let u = (p_cur + m - mul_mod(trace, q_cur, m)) % m;
    let norm: i8 = if ell % 2 == 0 { 1 } else { -1 };
    Ok(UnitResidues { u, v: q_cur, norm, period_length: ell })
}

/// Multiplication-by-(x + yω) matrix on the basis (1, ω), reduced mod m.
/// With ω² = t·ω + c (t = tr ω, c = −N(ω)) the product (x + yω)(x' + y'ω)
/// has coordinates (xx' + c·yy', xy' + yx' + t·yy').
#[derive(Clone, Copy)]
struct OmegaMulMod {
    c: u64,
    t: u64,
    m: u64,
}

impl OmegaMulMod {
    fn new(fd: &FieldData, m: u64) -> OmegaMulMod {
        OmegaMulMod {
            c: fd.omega_kind.omega_sq_const(fd.d) % m,
            t: fd.omega_kind.trace() % m,
            m,
        }
    }

    fn mul(&self, (x, y): (u64, u64), (x2, y2): (u64, u64)) -> (u64, u64) {
        let m = self.m;
        let xx = mul_mod(x, x2, m);
        let yy = mul_mod(y, y2, m);
        let cross = (mul_mod(x, y2, m) + mul_mod(y, x2, m)) % m;
        (
            (xx + mul_mod(self.c, yy, m)) % m,
            (cross + mul_mod(self.t, yy, m)) % m,
        )
    }
}

/// ω-coordinates of ε^k mod m (k ≥ 1, m ≥ 2) by binary powering.
pub fn unit_power_coords_mod(fd: &FieldData, k: u64, m: u64) -> Result<(u64, u64)> {
    if k == 0 {
        return Err(Error::invalid("exponent k must be at least 1"));
    }
    let eps = unit_coords_mod(fd, m)?;
    Ok(power_coords(fd, (eps.u, eps.v), k, m))
}

/// ε given by its ω-coordinates mod m, raised to the k-th power mod m.
pub(crate) fn power_coords(fd: &FieldData, eps: (u64, u64), k: u64, m: u64) -> (u64, u64) {
    let mul = OmegaMulMod::new(fd, m);
    let mut acc = (1 % m, 0u64);
    let mut base = eps;
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            acc = mul.mul(acc, base);
        }
        base = mul.mul(base, base);
        k >>= 1;
    }
    acc
}
