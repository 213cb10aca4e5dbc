//! Class numbers of O_K and Picard groups of the orders O_f.
//!
//! The narrow class number h⁺(d_K) is the number of ρ-cycles of reduced
//! forms of discriminant d_K; the wide class number is h = h⁺ when the
//! fundamental unit has norm −1 and h⁺/2 otherwise.
//!
//! For the non-maximal order O_f = Z + fωZ, the Picard group order follows
//! the exact-sequence formula
//!
//! ```text
//! |Pic(O_f)| = h · B_f / i_f,       B_f = ∏_{p^e ∥ f} p^{e−1}(p − χ(p)),
//! ```
//!
//! where χ(p) = (d_K/p) is the Kronecker symbol and i_f — the unit index —
//! is the least k ≥ 1 with ε^k ∈ O_f. Membership ε^k ∈ O_f is equivalent to
//! f dividing the ω-coordinate of ε^k, so i_f is the order of ε in
//! (O_K/fO_K)^× / (Z/fZ)^×, a group of order B_f; i_f always divides B_f
//! and is found by divisor reduction with modular powering.

use serde::Serialize;

use crate::arith::{kronecker, FieldData};
use crate::contfrac::{power_coords, unit_coords_mod};
use crate::error::{Error, Result};
use crate::forms;

/// A non-maximal order O_f together with its computed invariants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OrderRef {
    pub d: u64,
    pub f: u64,
    /// |Pic(O_f)|.
    pub pic: u64,
    /// Least k ≥ 1 with ε^k ∈ O_f.
    pub unit_index: u64,
}

/// B_f = ∏ p^{e−1}(p − χ(p)), the group order the unit index divides.
pub fn index_bound(fd: &FieldData, f: u64) -> Result<u64> {
    if f == 0 {
        return Err(Error::invalid("conductor f must be at least 1"));
    }
    let mut bound: u64 = 1;
    for (p, e) in crate::arith::factorize(f)? {
        let chi = kronecker(fd.d_k as i64, p as i64);
        let factor = match chi {
            1 => p - 1,
            0 => p,
            _ => p + 1,
        };
        for _ in 1..e {
            bound = bound
                .checked_mul(p)
                .ok_or_else(|| Error::invalid(format!("conductor {f} too large")))?;
        }
        bound = bound
            .checked_mul(factor)
            .ok_or_else(|| Error::invalid(format!("conductor {f} too large")))?;
    }
    Ok(bound)
}

/// Least k ≥ 1 with ε^k ∈ O_f, by divisor reduction from B_f.
pub fn unit_index(fd: &FieldData, f: u64) -> Result<u64> {
    if f == 0 {
        return Err(Error::invalid("conductor f must be at least 1"));
    }
    if f == 1 {
        return Ok(1);
    }
    let bound = index_bound(fd, f)?;
    let eps = unit_coords_mod(fd, f)?;
    let v_of = |k: u64| power_coords(fd, (eps.u, eps.v), k, f).1;
    if v_of(bound) != 0 {
        return Err(Error::Inconsistency(format!(
            "ε^B_f ∉ O_f for d = {}, f = {f}: the index must divide B_f = {bound}",
            fd.d
        )));
    }
    let mut k = bound;
    for (ell, _) in crate::arith::factorize(bound)? {
        while k % ell == 0 && v_of(k / ell) == 0 {
            k /= ell;
        }
    }
    Ok(k)
}

/// Narrow class number h⁺(d_K): the number of reduced-form ρ-cycles.
pub fn narrow_class_number(fd: &FieldData) -> Result<u64> {
    forms::cycle_count(fd.d_k as i128, None)
}

/// Wide class number h(d_K).
pub fn class_number(fd: &FieldData) -> Result<u64> {
    let h_plus = narrow_class_number(fd)?;
    divide_by_norm_sign(fd, h_plus)
}

/// Decides h(d_K) = target without counting past the implied cycle budget.
pub fn class_number_equals(fd: &FieldData, target: u64) -> Result<bool> {
    if target == 0 {
        return Ok(false);
    }
    let norm = unit_coords_mod(fd, 2)?.norm;
    let plus_target = if norm == 1 { 2 * target } else { target };
    let count = forms::cycle_count(fd.d_k as i128, Some(plus_target))?;
    Ok(count == plus_target)
}

fn divide_by_norm_sign(fd: &FieldData, h_plus: u64) -> Result<u64> {
    let norm = unit_coords_mod(fd, 2)?.norm;
    if norm == -1 {
        return Ok(h_plus);
    }
    if h_plus % 2 != 0 {
        return Err(Error::Inconsistency(format!(
            "d = {}: N(ε) = 1 forces an even narrow class number, got {h_plus}",
            fd.d
        )));
    }
    Ok(h_plus / 2)
}

/// Invariants of O_f: unit index and Picard group order.
pub fn picard_order(fd: &FieldData, f: u64) -> Result<OrderRef> {
    let h = class_number(fd)?;
    let bound = index_bound(fd, f)?;
    let idx = unit_index(fd, f)?;
    debug_assert_eq!(bound % idx, 0, "unit index divides B_f");
    let pic = h
        .checked_mul(bound / idx)
        .ok_or_else(|| Error::invalid(format!("Picard order overflows for f = {f}")))?;
    Ok(OrderRef { d: fd.d, f, pic, unit_index: idx })
}
