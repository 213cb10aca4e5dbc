//! Ideals of the order O_f = Z + fωZ in standard form, principality tests,
//! and the invertible atoms of norm p³ above a ramified prime.
//!
//! Every nonzero ideal is c·(AZ + (B₀ + θ)Z) with θ = fω, c | a, c | b, and
//! A | N(B₀ + θ); its norm is a·c = c²A. The primitive part corresponds to
//! the binary quadratic form
//!
//!   F_I = (A, 2B₀ + Tr(θ), N(B₀ + θ)/A)   of discriminant f²·d_K,
//!
//! because N(Ax + (B₀ + θ)y) = A·F_I(x, y). An invertible ideal — one whose
//! form is primitive — is principal exactly when F_I represents +1 or −1,
//! and a representing pair (x, y) yields the generator c·(Ax + (B₀ + θ)y).

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use crate::arith::{FieldData, PrimeSplit};
use crate::error::{Error, Result};
use crate::forms::{self, Form};

/// An ideal of O_f in Hermite standard form aZ + (b + c·fω)Z with
/// c | a, c | b, and 0 ≤ b < a.
#[derive(Clone, Debug, Serialize)]
pub struct QuadIdeal {
    fd: FieldData,
    f: u64,
    a: u64,
    b: u64,
    c: u64,
}

/// Trace and norm of θ = fω as signed words.
fn theta_invariants(fd: &FieldData, f: u64) -> (i128, i128) {
    let f = f as i128;
    let trace = f * fd.omega_kind.trace() as i128;
    let norm = -f * f * fd.omega_kind.omega_sq_const(fd.d) as i128;
    (trace, norm)
}

impl QuadIdeal {
    /// Validates the standard form: divisibility of the content, the range
    /// of b, and closure under multiplication by θ, which is exactly
    /// A | N(B₀ + θ) for the primitive part A = a/c, B₀ = b/c.
    pub fn new(fd: &FieldData, f: u64, a: u64, b: u64, c: u64) -> Result<QuadIdeal> {
        if f == 0 {
            return Err(Error::invalid("conductor f must be positive"));
        }
        if a == 0 || c == 0 {
            return Err(Error::invalid("ideal generators a and c must be positive"));
        }
        if a % c != 0 || b % c != 0 {
            return Err(Error::invalid(format!(
                "content c = {c} must divide both a = {a} and b = {b}"
            )));
        }
        if b >= a {
            return Err(Error::invalid(format!("require 0 ≤ b < a, got b = {b}, a = {a}")));
        }
        let ideal = QuadIdeal { fd: fd.clone(), f, a, b, c };
        let (big_a, b0) = (ideal.primitive_a() as i128, ideal.primitive_b0() as i128);
        let (trace, norm) = theta_invariants(fd, f);
        let gen_norm = b0 * b0 + b0 * trace + norm;
        if gen_norm % big_a != 0 {
            return Err(Error::invalid(format!(
                "aZ + (b + c·fω)Z is not an ideal: {big_a} ∤ N(B₀ + θ) = {gen_norm}"
            )));
        }
        Ok(ideal)
    }

    pub fn conductor(&self) -> u64 {
        self.f
    }

    /// The index [O_f : I] = a·c.
    pub fn norm(&self) -> u128 {
        self.a as u128 * self.c as u128
    }

    fn primitive_a(&self) -> u64 {
        self.a / self.c
    }

    fn primitive_b0(&self) -> u64 {
        self.b / self.c
    }

    /// The form of the primitive part, of discriminant f²·d_K.
    pub fn form(&self) -> Result<Form> {
        let (big_a, b0) = (self.primitive_a() as i128, self.primitive_b0() as i128);
        let (trace, norm) = theta_invariants(&self.fd, self.f);
        let gen_norm = b0 * b0 + b0 * trace + norm;
        let coeff = |v: i128, what: &str| {
            i64::try_from(v)
                .map_err(|_| Error::invalid(format!("ideal {what} coefficient exceeds the form engine range")))
        };
        let form = Form::new(
            coeff(big_a, "leading")?,
            coeff(2 * b0 + trace, "middle")?,
            coeff(gen_norm / big_a, "trailing")?,
        );
        debug_assert_eq!(
            form.disc(),
            self.f as i128 * self.f as i128 * self.fd.d_k as i128
        );
        Ok(form)
    }

    /// An ideal is invertible exactly when its multiplier ring is O_f
    /// itself, i.e. when the associated form is primitive.
    pub fn is_invertible(&self) -> Result<bool> {
        let form = self.form()?;
        Ok(form.a.gcd(&form.b).gcd(&form.c) == 1)
    }

    /// Decides principality of an invertible ideal by walking the ρ-cycle
    /// of its form: I is principal iff F_I represents ±1.
    pub fn is_principal(&self) -> Result<bool> {
        if !self.is_invertible()? {
            return Err(Error::invalid(
                "principality test requires an invertible ideal",
            ));
        }
        forms::cycle_has_lead(&self.form()?, |lead| lead.abs() == 1)
    }

    /// A generator of a principal ideal, as coordinates (x₀, y₀) in the
    /// basis (1, fω): α = x₀ + y₀·fω with |N(α)| = N(I). Returns None when
    /// the ideal is not principal.
    pub fn principal_generator(&self) -> Result<Option<(BigInt, BigInt)>> {
        if !self.is_principal()? {
            return Ok(None);
        }
        let rep = forms::find_representation(&self.form()?, |lead| lead.abs() == 1)?
            .ok_or_else(|| {
                Error::Inconsistency("principal ideal has no unit-lead representation".into())
            })?;
        let (big_a, b0) = (BigInt::from(self.primitive_a()), BigInt::from(self.primitive_b0()));
        let c = BigInt::from(self.c);
        let x0 = &c * (&big_a * &rep.x + &b0 * &rep.y);
        let y0 = &c * &rep.y;
        let (trace, norm) = theta_invariants(&self.fd, self.f);
        let gen_norm = &x0 * &x0 + &x0 * &y0 * BigInt::from(trace)
            + &y0 * &y0 * BigInt::from(norm);
        if gen_norm.magnitude() != &num_bigint::BigUint::from(self.norm()) {
            return Err(Error::Inconsistency(format!(
                "generator norm {gen_norm} does not match ideal norm {}",
                self.norm()
            )));
        }
        Ok(Some((x0, y0)))
    }
}

/// The invertible atoms of norm p³ above a ramified prime p with p ∥ f.
///
/// For odd p these are the p ideals p³Z + (p²k + (p²β + f√d_K)/2)Z for
/// k ∈ [0, p−1], where β = f·d_K mod 2; for p = 2 they are the two ideals
/// 8Z + (2k + f√d)Z with k ∈ [0, 3] and k ≡ d (mod 2).
pub fn atoms_norm_p3(fd: &FieldData, f: u64, p: u64) -> Result<Vec<QuadIdeal>> {
    if fd.classify_prime(p)? != PrimeSplit::Ramified {
        return Err(Error::invalid(format!("p = {p} is not ramified for d = {}", fd.d)));
    }
    if f % p != 0 || (f / p) % p == 0 {
        return Err(Error::invalid(format!("p = {p} must divide f = {f} exactly once")));
    }
    let p3 = p
        .checked_pow(3)
        .ok_or_else(|| Error::invalid(format!("p = {p} too large for an atom norm")))?;
    let mut atoms = Vec::new();
    if p == 2 {
        // 2 ramified forces d ≡ 2, 3 (mod 4), so ω = √d and f√d = fω.
        for k in [0u64, 1, 2, 3] {
            if k % 2 == fd.d % 2 {
                atoms.push(QuadIdeal::new(fd, f, p3, 2 * k, 1)?);
            }
        }
    } else {
        // (p²β + f√d_K)/2 = B + fω with B = (p²β − f)/2 for d ≡ 1 (mod 4)
        // and B = 0, β = 0 for d ≡ 2, 3 (mod 4).
        let base = match fd.d % 4 {
            1 => {
                let beta = (f % 2) as i128; // d_K = d is odd
                (p as i128 * p as i128 * beta - f as i128) / 2
            }
            _ => 0,
        };
        for k in 0..p {
            let b0 = (p as i128 * p as i128 * k as i128 + base).rem_euclid(p3 as i128) as u64;
            atoms.push(QuadIdeal::new(fd, f, p3, b0, 1)?);
        }
    }
    debug_assert!(atoms.iter().all(|a| a.norm() == p3 as u128));
    Ok(atoms)
}
