//! Deciding whether an order O_f has an unusual set of distances
//! (min Δ(O_f) > 1), enumerating all such conductors for a fixed field, and
//! classifying the field by the shape of that conductor set.
//!
//! Every route to the decision shares two conditions:
//!
//! * (a) |Pic(O_f)| = |Pic(O_K)| = 2, equivalently h = 2 together with
//!   (O_K^× : O_f^×) meeting its generic bound B_f;
//! * (b) f is squarefree, divisible by a ramified prime, and free of split
//!   primes.
//!
//! They differ in how they decide that no invertible ideal of norm p³ above
//! a ramified p | f is principal:
//!
//! * the default route settles it with Kronecker symbols alone — for both
//!   signs α, either p is odd with (α·(d/p) | p) = −1 or some odd ramified
//!   q has (−α·p | q) = −1 — which depends only on p, never on f;
//! * `is_unusual_thm29` demands |p·a² − (d_K/p)·b²| = 4 be unsolvable;
//! * `is_unusual_cor28` demands the conductor-scaled variant be unsolvable;
//! * `is_unusual_norm_minus_one` applies only when N(ε) = −1, where (a) and
//!   (b) suffice outright.
//!
//! All four agree; running them against each other is a library-level
//! consistency check.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::arith::{factorize, kronecker, FieldData, PrimeSplit};
use crate::class_numbers::{class_number_equals, index_bound, unit_index};
use crate::contfrac::unit_coords_mod;
use crate::diophantine::{solvable_abs, solvable_scaled, PellQuery};
use crate::error::{Error, Result};

/// Condition (b) data: the classified prime divisors of a conductor that is
/// squarefree, has a ramified divisor, and has no split divisor. `None`
/// when the condition fails.
fn conductor_shape(fd: &FieldData, f: u64) -> Result<Option<Vec<(u64, PrimeSplit)>>> {
    if f == 0 {
        return Err(Error::invalid("conductor f must be positive"));
    }
    let factors = factorize(f)?;
    if factors.iter().any(|&(_, e)| e > 1) {
        return Ok(None);
    }
    let mut classified = Vec::with_capacity(factors.len());
    let mut has_ramified = false;
    for &(p, _) in &factors {
        let class = fd.classify_prime(p)?;
        match class {
            PrimeSplit::Split => return Ok(None),
            PrimeSplit::Ramified => has_ramified = true,
            PrimeSplit::Inert => {}
        }
        classified.push((p, class));
    }
    Ok(has_ramified.then_some(classified))
}

/// Condition (a): |Pic(O_f)| = |Pic(O_K)| = 2. The Picard order of O_f is
/// h·B_f/(O_K^× : O_f^×), so with h = 2 the equality holds exactly when the
/// unit index reaches its bound.
fn picard_pair_is_two(fd: &FieldData, f: u64) -> Result<bool> {
    Ok(class_number_equals(fd, 2)? && unit_index(fd, f)? == index_bound(fd, f)?)
}

/// The Kronecker-symbol obstruction at a ramified prime p: for both signs
/// α ∈ {±1}, either p is odd and (α·(d/p) | p) = −1, or some odd ramified
/// prime q has (−α·p | q) = −1. When it holds, no invertible ideal of norm
/// p³ above p is principal in any O_f with p | f, independently of f.
pub fn ramified_obstruction(fd: &FieldData, p: u64) -> Result<bool> {
    if fd.classify_prime(p)? != PrimeSplit::Ramified {
        return Err(Error::invalid(format!("p = {p} is not ramified for d = {}", fd.d)));
    }
    let odd_ramified: Vec<u64> = fd.ramified_primes().into_iter().filter(|&q| q % 2 == 1).collect();
    for alpha in [1i64, -1] {
        let direct = p % 2 == 1 && kronecker(alpha * (fd.d / p) as i64, p as i64) == -1;
        let via_odd_ramified = odd_ramified
            .iter()
            .any(|&q| kronecker(-alpha * p as i64, q as i64) == -1);
        if !direct && !via_odd_ramified {
            return Ok(false);
        }
    }
    Ok(true)
}

/// N(ε) without computing ε exactly.
fn unit_norm(fd: &FieldData) -> Result<i8> {
    Ok(unit_coords_mod(fd, 2)?.norm)
}

/// Shared skeleton: (b), then the per-prime check on every ramified divisor
/// of f, then (a), which carries the expensive class-number walk.
fn decide<F>(fd: &FieldData, f: u64, mut blocks: F) -> Result<bool>
where
    F: FnMut(u64) -> Result<bool>,
{
    let Some(divisors) = conductor_shape(fd, f)? else {
        return Ok(false);
    };
    for &(p, class) in &divisors {
        if class == PrimeSplit::Ramified && !blocks(p)? {
            return Ok(false);
        }
    }
    picard_pair_is_two(fd, f)
}

/// Is min Δ(O_f) > 1? Default route: conditions (a), (b), and the
/// f-independent Kronecker obstruction at every ramified divisor of f.
pub fn is_unusual(fd: &FieldData, f: u64) -> Result<bool> {
    decide(fd, f, |p| ramified_obstruction(fd, p))
}

/// Same decision through the unscaled Pell conditions: (a), (b), and
/// |p·a² − (d_K/p)·b²| = 4 unsolvable for every ramified p | f.
pub fn is_unusual_thm29(fd: &FieldData, f: u64) -> Result<bool> {
    let Some(divisors) = conductor_shape(fd, f)? else {
        return Ok(false);
    };
    if !picard_pair_is_two(fd, f)? {
        return Ok(false);
    }
    for &(p, class) in &divisors {
        if class == PrimeSplit::Ramified
            && solvable_abs(&PellQuery::ramified(fd, p)?)?.is_solvable()
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Same decision through the conductor-scaled Pell conditions: (a), (b),
/// and per ramified p | f the scaled equation must be unsolvable.
pub fn is_unusual_cor28(fd: &FieldData, f: u64) -> Result<bool> {
    let Some(divisors) = conductor_shape(fd, f)? else {
        return Ok(false);
    };
    if !picard_pair_is_two(fd, f)? {
        return Ok(false);
    }
    let beta = ((f as u128 * fd.d_k as u128) % 2) as u8;
    for &(p, class) in &divisors {
        if class == PrimeSplit::Ramified && solvable_scaled(fd, f, p, beta)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Same decision for fields with N(ε) = −1, where conditions (a) and (b)
/// are already equivalent to min Δ(O_f) > 1. Rejects fields with N(ε) = 1.
pub fn is_unusual_norm_minus_one(fd: &FieldData, f: u64) -> Result<bool> {
    if unit_norm(fd)? != -1 {
        return Err(Error::invalid(format!(
            "d = {} has unit norm 1; this route requires N(ε) = −1",
            fd.d
        )));
    }
    let Some(_) = conductor_shape(fd, f)? else {
        return Ok(false);
    };
    picard_pair_is_two(fd, f)
}

/// All divisors of a squarefree integer given its prime list.
fn subset_products(primes: &[u64]) -> Vec<u64> {
    let mut out = vec![1u64];
    for &p in primes {
        for i in 0..out.len() {
            out.push(out[i] * p);
        }
    }
    out.sort_unstable();
    out
}

/// The reduced set D'_d: unusual conductors dividing lcm(2, d). It is empty
/// exactly when d has no unusual conductor at all.
pub fn reduced_unusual_conductors(fd: &FieldData) -> Result<Vec<u64>> {
    if !class_number_equals(fd, 2)? {
        return Ok(Vec::new());
    }
    let mut primes: Vec<u64> = fd.d_primes().to_vec();
    if fd.d % 2 == 1 {
        primes.push(2);
    }
    let mut out = Vec::new();
    for f in subset_products(&primes) {
        if f > 1 && is_unusual(fd, f)? {
            out.push(f);
        }
    }
    Ok(out)
}

/// The unusual conductors up to `bound`, in increasing order.
///
/// Candidates are r·g where r is a nonempty product of ramified primes that
/// each carry the Kronecker obstruction and g is an allowed inert part: the
/// inert part of an unusual conductor is 1, a single inert prime, or twice
/// an odd inert prime, and any odd prime in it forces N(ε) = −1 and is
/// ≡ 3 (mod 4). Each candidate is then settled by the unit-index test.
pub fn unusual_conductors(fd: &FieldData, bound: u64) -> Result<Vec<u64>> {
    if bound == 0 {
        return Err(Error::invalid("conductor bound must be positive"));
    }
    if !class_number_equals(fd, 2)? {
        return Ok(Vec::new());
    }
    let blocked = obstructed_ramified_primes(fd)?;
    if blocked.is_empty() {
        return Ok(Vec::new());
    }
    conductors_from_blocked(fd, &blocked, unit_norm(fd)?, bound)
}

/// The ramified primes of d_K that carry the Kronecker obstruction — the
/// only primes eligible for the ramified part of an unusual conductor.
pub(crate) fn obstructed_ramified_primes(fd: &FieldData) -> Result<Vec<u64>> {
    fd.ramified_primes()
        .into_iter()
        .filter_map(|p| match ramified_obstruction(fd, p) {
            Ok(true) => Some(Ok(p)),
            Ok(false) => None,
            Err(e) => Some(Err(e)),
        })
        .collect()
}

/// The r·g candidate sweep and unit-index filter behind
/// [`unusual_conductors`], with the field-level work (h = 2, obstruction
/// set, unit norm) already done by the caller.
pub(crate) fn conductors_from_blocked(
    fd: &FieldData,
    blocked: &[u64],
    norm: i8,
    bound: u64,
) -> Result<Vec<u64>> {
    let two_inert = fd.classify_prime(2)? == PrimeSplit::Inert;
    let mut odd_inert: Vec<u64> = Vec::new();
    if norm == -1 {
        for &q in crate::arith::primes_below(bound.saturating_add(1))? {
            if q % 4 == 3 && fd.classify_prime(q)? == PrimeSplit::Inert {
                odd_inert.push(q);
            }
        }
    }

    let mut inert_parts = vec![1u64];
    if two_inert {
        inert_parts.push(2);
    }
    for &q in &odd_inert {
        inert_parts.push(q);
        if two_inert {
            if let Some(g) = q.checked_mul(2) {
                inert_parts.push(g);
            }
        }
    }

    let mut out = Vec::new();
    for r in subset_products(blocked) {
        if r == 1 || r > bound {
            continue;
        }
        for &g in &inert_parts {
            let Some(f) = r.checked_mul(g) else { continue };
            if f > bound {
                continue;
            }
            if unit_index(fd, f)? == index_bound(fd, f)? {
                out.push(f);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// The taxonomy slot of a field whose unusual-conductor set is nonempty:
/// the type is determined by the splitting shape of d, the form by which
/// conductor set D'_d realizes among the finitely many possibilities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TypeForm {
    pub type_index: u8,
    pub form_index: u8,
}

/// Builds the candidate conductor sets for one type, in their fixed order.
/// The primed constructions double the marked primes.
mod form_sets {
    use std::collections::BTreeSet;

    pub fn single(a: u64) -> BTreeSet<u64> {
        BTreeSet::from([a])
    }

    pub fn primed(a: u64) -> BTreeSet<u64> {
        BTreeSet::from([a, 2 * a])
    }

    pub fn pair(a: u64, b: u64) -> BTreeSet<u64> {
        BTreeSet::from([a, b, a * b])
    }

    pub fn pair_first_primed(a: u64, b: u64) -> BTreeSet<u64> {
        BTreeSet::from([a, 2 * a, b, a * b])
    }

    pub fn pair_second_primed(a: u64, b: u64) -> BTreeSet<u64> {
        BTreeSet::from([a, b, 2 * b, a * b])
    }

    pub fn pair_both_primed(a: u64, b: u64) -> BTreeSet<u64> {
        BTreeSet::from([a, 2 * a, b, 2 * b, a * b, 2 * a * b])
    }

    pub fn triple(a: u64, b: u64, c: u64) -> BTreeSet<u64> {
        BTreeSet::from([a, b, c, a * b, a * c, b * c, a * b * c])
    }
}

/// The ordered candidate sets for each type. Types 2 and 3 take p < q both
/// ≡ 1 (mod 4); type 4 takes p ≡ 1, q ≡ 3 (mod 4); type 5 takes odd p < q;
/// types 6 and 7 take p ≡ 1 and q < r both ≡ 3 (mod 4).
fn candidate_sets(type_index: u8, p: u64, q: u64, r: u64) -> Vec<BTreeSet<u64>> {
    use form_sets::*;
    match type_index {
        1 => vec![single(2), pair(2, p)],
        2 => vec![single(p), single(q), pair(p, q)],
        3 => vec![
            single(p),
            single(q),
            primed(p),
            primed(q),
            pair(p, q),
            pair_both_primed(p, q),
        ],
        4 => vec![
            single(2),
            single(p),
            single(q),
            pair(2, p),
            pair(2, q),
            pair(p, q),
            triple(2, p, q),
        ],
        5 => vec![single(p), single(q), pair(p, q)],
        6 => vec![
            single(p),
            single(q),
            single(r),
            pair(p, q),
            pair(p, r),
            pair(q, r),
        ],
        7 => vec![
            single(p),
            single(q),
            single(r),
            primed(p),
            primed(q),
            primed(r),
            pair(p, q),
            pair_first_primed(p, q),
            pair_both_primed(p, q),
            pair(p, r),
            pair_both_primed(p, r),
            pair(q, r),
            pair_second_primed(q, r),
            pair_both_primed(q, r),
        ],
        _ => unreachable!("type index out of range"),
    }
}

/// Determines the type and the role primes (p, q, r) from the splitting
/// shape of d, given that some unusual conductor exists.
fn classify_shape(fd: &FieldData) -> Result<(u8, u64, u64, u64)> {
    let primes = fd.d_primes();
    let shape_error = || {
        Error::Inconsistency(format!(
            "d = {} has unusual conductors but none of the admissible splitting shapes",
            fd.d
        ))
    };
    match primes {
        [2, p] => {
            if p % 4 == 1 {
                Ok((1, *p, 0, 0))
            } else {
                Err(shape_error())
            }
        }
        [p, q] => match (p % 4, q % 4) {
            (1, 1) => Ok((if fd.d % 8 == 1 { 2 } else { 3 }, *p, *q, 0)),
            (1, 3) => Ok((4, *p, *q, 0)),
            (3, 1) => Ok((4, *q, *p, 0)),
            _ => Err(shape_error()),
        },
        [2, p, q] => Ok((5, *p, *q, 0)),
        [p, q, r] => {
            let (ones, threes): (Vec<u64>, Vec<u64>) =
                [*p, *q, *r].into_iter().partition(|x| x % 4 == 1);
            if ones.len() != 1 || threes.len() != 2 {
                return Err(shape_error());
            }
            let t = if fd.d % 8 == 1 { 6 } else { 7 };
            Ok((t, ones[0], threes[0], threes[1]))
        }
        _ => Err(shape_error()),
    }
}

/// Classifies d by its type (splitting shape) and form (which candidate set
/// D'_d equals). `None` when d has no unusual conductors; an inconsistency
/// error if D'_d is nonempty but matches no candidate.
pub fn type_form(fd: &FieldData) -> Result<Option<TypeForm>> {
    let reduced = reduced_unusual_conductors(fd)?;
    if reduced.is_empty() {
        return Ok(None);
    }
    let got: BTreeSet<u64> = reduced.iter().copied().collect();
    let (type_index, p, q, r) = classify_shape(fd)?;
    for (i, candidate) in candidate_sets(type_index, p, q, r).iter().enumerate() {
        if *candidate == got {
            return Ok(Some(TypeForm { type_index, form_index: (i + 1) as u8 }));
        }
    }
    Err(Error::Inconsistency(format!(
        "d = {} has D'_d = {reduced:?}, which matches no candidate set of type {type_index}",
        fd.d
    )))
}
