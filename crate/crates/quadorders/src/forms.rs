//! Integral binary quadratic forms of positive non-square discriminant.
//!
//! A form (a, b, c) stands for ax² + bxy + cy² with Δ = b² − 4ac > 0 and Δ
//! not a perfect square. The reduced forms of a fixed discriminant fall into
//! disjoint ρ-cycles; the number of cycles is the narrow class number h⁺(Δ),
//! and a target n with |n| < √Δ/2 is primitively represented by a form
//! exactly when n appears as the leading coefficient somewhere in its cycle.
//! Those two facts drive everything this module is used for: class-number
//! computation, ideal principality, and the solvability of the two-variable
//! Pell-type conditions.
//!
//! The ρ-step used everywhere is
//!
//! ```text
//! ρ(a, b, c) = (c, b', (b'² − Δ)/(4c)),   b' ≡ −b (mod 2|c|),  √Δ − 2|c| < b' ≤ √Δ,
//! ```
//!
//! realized by the change of variables (x, y) ↦ (−y, x + ty) with
//! t = (b + b')/(2c); tracking the product of these SL₂(Z) moves recovers an
//! explicit representation once a sought leading coefficient shows up.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;

use crate::arith;
use crate::config;
use crate::error::{Error, Result};

/// Binary quadratic form ax² + bxy + cy². Coefficients stay word-sized for
/// every reduced form (all of |a|, |b|, |c| ≤ √Δ); intermediate products are
/// computed in i128.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Form {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl Form {
    pub fn new(a: i64, b: i64, c: i64) -> Form {
        Form { a, b, c }
    }

    /// Discriminant b² − 4ac, exact in i128.
    pub fn disc(&self) -> i128 {
        self.b as i128 * self.b as i128 - 4 * self.a as i128 * self.c as i128
    }

    /// Value at (x, y), exact in i128.
    pub fn eval(&self, x: i64, y: i64) -> i128 {
        let (x, y) = (x as i128, y as i128);
        self.a as i128 * x * x + self.b as i128 * x * y + self.c as i128 * y * y
    }

    /// Reduced means 0 < b < √Δ and √Δ − b < 2|a| < √Δ + b, checked with
    /// exact integer arithmetic.
    pub fn is_reduced(&self) -> bool {
        let delta = self.disc();
        if self.b <= 0 {
            return false;
        }
        let b = self.b as i128;
        if b * b >= delta {
            return false;
        }
        let two_a = 2 * (self.a as i128).abs();
        // √Δ − b < 2|a|  ⟺  √Δ < 2|a| + b  ⟺  Δ < (2|a| + b)².
        // 2|a| < √Δ + b  ⟺  2|a| − b < √Δ  ⟺  2|a| ≤ b, or (2|a| − b)² < Δ.
        let upper = two_a + b;
        if upper * upper <= delta {
            return false;
        }
        let lower = two_a - b;
        lower <= 0 || lower * lower < delta
    }
}

/// ⌊√Δ⌋ for a positive i128 discriminant.
fn isqrt_disc(delta: i128) -> i64 {
    debug_assert!(delta > 0);
    (delta as u128).isqrt() as i64
}

/// One ρ-step. Requires c ≠ 0, which holds whenever Δ is not a square.
pub fn rho(f: &Form) -> Form {
    let delta = f.disc();
    let s = isqrt_disc(delta);
    let two_c = 2 * f.c.abs();
    let r = Integer::mod_floor(&-f.b, &two_c);
    let k = Integer::div_floor(&(s - r), &two_c);
    let b_next = r + k * two_c;
    let c_next = ((b_next as i128 * b_next as i128 - delta) / (4 * f.c as i128)) as i64;
    Form { a: f.c, b: b_next, c: c_next }
}

/// The SL₂(Z) move realizing one ρ-step: (x, y) ↦ (−y, x + ty) with
/// t = (b + b')/(2c). Returned as t; c here is the middle coefficient's
/// divisor, i.e. the `c` of the pre-step form.
fn rho_t(f: &Form, next: &Form) -> i64 {
    debug_assert_eq!(next.a, f.c);
    let sum = f.b as i128 + next.b as i128;
    let den = 2 * f.c as i128;
    debug_assert_eq!(sum % den, 0);
    (sum / den) as i64
}

/// Applies ρ until the form is reduced. Non-reduced coefficients shrink
/// geometrically, so this terminates in O(log max|coeff|) steps.
pub fn reduce(f: &Form) -> Result<Form> {
    let limit = config::form_step_limit();
    let mut g = *f;
    for _ in 0..limit {
        if g.is_reduced() {
            return Ok(g);
        }
        g = rho(&g);
    }
    Err(Error::budget(format!(
        "reduction of ({}, {}, {}) exceeded the form-step limit",
        f.a, f.b, f.c
    )))
}

/// Walks the ρ-cycle of `f` (reducing first) and reports whether any form in
/// the cycle has a leading coefficient accepted by `want`.
pub fn cycle_has_lead(f: &Form, mut want: impl FnMut(i64) -> bool) -> Result<bool> {
    let limit = config::form_step_limit();
    let start = reduce(f)?;
    if want(start.a) {
        return Ok(true);
    }
    let mut g = start;
    for _ in 0..limit {
        g = rho(&g);
        if want(g.a) {
            return Ok(true);
        }
        if g == start {
            return Ok(false);
        }
    }
    Err(Error::budget(format!(
        "cycle walk for ({}, {}, {}) exceeded the form-step limit",
        f.a, f.b, f.c
    )))
}

/// A representation F(x, y) = lead found by walking the cycle with tracked
/// transforms.
#[derive(Clone, Debug)]
pub struct Representation {
    pub lead: i64,
    pub x: BigInt,
    pub y: BigInt,
}

/// Walks the ρ-cycle of `f` with transform tracking and returns an explicit
/// (x, y) with F(x, y) = lead for the first accepted leading coefficient.
///
/// The entries of the cumulative transform grow like continued-fraction
/// convergents, hence the big-integer matrix; the walk shares the step
/// budget with [`cycle_has_lead`].
pub fn find_representation(
    f: &Form,
    mut want: impl FnMut(i64) -> bool,
) -> Result<Option<Representation>> {
    let limit = config::form_step_limit();
    // Cumulative transform T with F_original(T(x, y)) = F_current(x, y);
    // column-major entries (m00, m10, m01, m11).
    let (mut m00, mut m10, mut m01, mut m11) = (
        BigInt::from(1),
        BigInt::from(0),
        BigInt::from(0),
        BigInt::from(1),
    );
    let mut g = *f;
    let mut start: Option<Form> = None;
    for _ in 0..limit {
        if g.is_reduced() && start.is_none() {
            start = Some(g);
        }
        if want(g.a) {
            // F_original(m00, m10) = g(1, 0) = g.a.
            debug_assert_eq!(
                {
                    let fx = |x: &BigInt, y: &BigInt| {
                        BigInt::from(f.a) * x * x + BigInt::from(f.b) * x * y
                            + BigInt::from(f.c) * y * y
                    };
                    fx(&m00, &m10)
                },
                BigInt::from(g.a)
            );
            return Ok(Some(Representation { lead: g.a, x: m00, y: m10 }));
        }
        let next = rho(&g);
        let t = BigInt::from(rho_t(&g, &next));
        // Right-multiply T by [[0, −1], [1, t]].
        let n00 = m01.clone();
        let n10 = m11.clone();
        let n01 = &m01 * &t - &m00;
        let n11 = &m11 * &t - &m10;
        (m00, m10, m01, m11) = (n00, n10, n01, n11);
        g = next;
        if Some(g) == start {
            return Ok(None);
        }
    }
    Err(Error::budget(format!(
        "representation walk for ({}, {}, {}) exceeded the form-step limit",
        f.a, f.b, f.c
    )))
}

/// All reduced forms of discriminant Δ (> 0, non-square, ≡ 0 or 1 mod 4).
pub fn reduced_forms(delta: i128) -> Result<Vec<Form>> {
    validate_disc(delta)?;
    let s = isqrt_disc(delta);
    let mut out = Vec::new();
    let mut b = if delta % 2 == 0 { 2 } else { 1 };
    while b <= s {
        let n = ((delta - b as i128 * b as i128) / 4) as u64;
        // (e, b, −n/e) is reduced ⟺ √Δ − b < 2e < √Δ + b; enumerate the
        // divisors of n inside that window from the factorization of n.
        for e in divisors_in_window(n, b, delta) {
            let e = e as i64;
            let co = (n / e as u64) as i64;
            out.push(Form { a: e, b, c: -co });
            out.push(Form { a: -e, b, c: co });
        }
        b += 2;
    }
    Ok(out)
}

fn validate_disc(delta: i128) -> Result<()> {
    if delta <= 0 {
        return Err(Error::invalid(format!("discriminant {delta} must be positive")));
    }
    if delta.rem_euclid(4) > 1 {
        return Err(Error::invalid(format!("discriminant {delta} must be ≡ 0 or 1 (mod 4)")));
    }
    let s = isqrt_disc(delta) as i128;
    if s * s == delta {
        return Err(Error::invalid(format!("discriminant {delta} must not be a square")));
    }
    if delta > (1i128 << 62) {
        // Keeps (Δ − b²)/4 inside u64 and every coefficient product inside
        // i128; far beyond every supported search range anyway.
        return Err(Error::invalid(format!("discriminant {delta} out of supported range")));
    }
    Ok(())
}

/// Divisors e of n with √Δ − b < 2e < √Δ + b, via exact square comparisons.
fn divisors_in_window(n: u64, b: i64, delta: i128) -> Vec<u64> {
    let mut divisors = vec![1u64];
    for (p, e) in arith::factorize(n).expect("n ≥ 1") {
        let prior = divisors.len();
        let mut power = 1u64;
        for _ in 0..e {
            power *= p;
            for i in 0..prior {
                divisors.push(divisors[i] * power);
            }
        }
    }
    divisors.retain(|&e| {
        let two_e = 2 * e as i128;
        let b = b as i128;
        // 2e > √Δ − b ⟺ 2e + b > √Δ ⟺ (2e + b)² > Δ.
        if (two_e + b) * (two_e + b) <= delta {
            return false;
        }
        // 2e < √Δ + b ⟺ 2e − b < √Δ ⟺ 2e ≤ b or (2e − b)² < Δ.
        two_e <= b || (two_e - b) * (two_e - b) < delta
    });
    divisors
}

/// Number of ρ-cycles among the reduced forms of discriminant Δ, i.e. the
/// narrow class number h⁺(Δ). With `abort_above = Some(t)` the count stops
/// at t + 1 as soon as it is known to exceed t.
pub fn cycle_count(delta: i128, abort_above: Option<u64>) -> Result<u64> {
    let forms = reduced_forms(delta)?;
    let mut remaining: HashSet<Form> = forms.into_iter().collect();
    let mut cycles = 0u64;
    while let Some(&start) = remaining.iter().next() {
        cycles += 1;
        if let Some(t) = abort_above {
            if cycles > t {
                return Ok(t + 1);
            }
        }
        // Consume the whole cycle through `start`; every ρ-image of a
        // reduced form must be in the enumerated set.
        let mut g = start;
        loop {
            if !remaining.remove(&g) {
                return Err(Error::Inconsistency(format!(
                    "cycle through ({}, {}, {}) left the reduced-form set of Δ = {delta}",
                    g.a, g.b, g.c
                )));
            }
            g = rho(&g);
            if g == start {
                break;
            }
        }
    }
    Ok(cycles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reduced_forms_of_disc_40() {
        let mut forms = reduced_forms(40).unwrap();
        forms.sort_by_key(|f| (f.b, f.a));
        assert_eq!(forms.len(), 8);
        for f in &forms {
            assert_eq!(f.disc(), 40);
            assert!(f.is_reduced(), "{f:?}");
        }
        assert_eq!(cycle_count(40, None).unwrap(), 2);
    }

    #[test]
    fn cycle_counts_match_hand_calculations() {
        assert_eq!(cycle_count(5, None).unwrap(), 1);
        assert_eq!(cycle_count(8, None).unwrap(), 1);
        assert_eq!(cycle_count(40, None).unwrap(), 2); // d = 10
        assert_eq!(cycle_count(60, None).unwrap(), 4); // d = 15
        assert_eq!(cycle_count(136, None).unwrap(), 4); // d = 34
        assert_eq!(cycle_count(168, None).unwrap(), 4); // d = 42
        assert_eq!(cycle_count(365, None).unwrap(), 2); // d = 365
    }

    #[test]
    fn cycle_count_abort_is_a_strict_bound() {
        // Δ = 60 has 4 cycles; aborting above 2 must report 3, never less.
        assert_eq!(cycle_count(60, Some(2)).unwrap(), 3);
        assert_eq!(cycle_count(60, Some(4)).unwrap(), 4);
    }

    #[test]
    fn rho_preserves_discriminant_and_walks_cycles() {
        for delta in [5i128, 8, 13, 40, 60, 136, 168, 229, 365, 1020] {
            for f in reduced_forms(delta).unwrap() {
                let g = rho(&f);
                assert_eq!(g.disc(), delta);
                assert!(g.is_reduced(), "ρ{f:?} = {g:?} not reduced");
            }
        }
    }

    #[test]
    fn reduce_reaches_a_reduced_form() {
        let f = Form::new(125, 25, -4); // disc 2625
        let g = reduce(&f).unwrap();
        assert_eq!(g.disc(), 2625);
        assert!(g.is_reduced());
    }

    #[test]
    fn principal_cycle_of_disc_2625_contains_lead_minus_one() {
        // (125, 25, −4) is the scaled condition form for d = 105, p = f = 5;
        // it represents −1 at (x, y) = (17, 162).
        let f = Form::new(125, 25, -4);
        assert_eq!(f.eval(17, 162), -1);
        assert!(cycle_has_lead(&f, |a| a.abs() == 1).unwrap());
        let rep = find_representation(&f, |a| a.abs() == 1).unwrap().unwrap();
        assert_eq!(rep.lead.abs(), 1);
        let (x, y) = (rep.x.clone(), rep.y.clone());
        let val = BigInt::from(f.a) * &x * &x + BigInt::from(f.b) * &x * &y
            + BigInt::from(f.c) * &y * &y;
        assert_eq!(val, BigInt::from(rep.lead));
    }

    #[test]
    fn obstructed_form_has_no_unit_lead() {
        // (27, 0, −5) of disc 540: ±1 is a nonresidue obstruction mod 5.
        let f = Form::new(27, 0, -5);
        assert!(!cycle_has_lead(&f, |a| a.abs() == 1).unwrap());
        assert!(find_representation(&f, |a| a.abs() == 1).unwrap().is_none());
    }

    #[test]
    fn validate_disc_rejects_bad_input() {
        assert!(reduced_forms(-4).is_err());
        assert!(reduced_forms(7).is_err()); // 7 ≡ 3 mod 4
        assert!(reduced_forms(16).is_err()); // square
        assert!(reduced_forms(25).is_err()); // square
    }

    proptest! {
        #[test]
        fn rho_orbits_return_to_start(delta_seed in 3i128..900) {
            let delta = if delta_seed % 4 <= 1 { delta_seed } else { delta_seed + delta_seed % 4 - 1 };
            prop_assume!(delta > 0 && delta.rem_euclid(4) <= 1);
            let s = isqrt_disc(delta) as i128;
            prop_assume!(s * s != delta);
            let forms = reduced_forms(delta).unwrap();
            for f in &forms {
                let mut g = rho(f);
                let mut steps = 1;
                while g != *f {
                    g = rho(&g);
                    steps += 1;
                    prop_assert!(steps < 10_000);
                }
            }
        }

        #[test]
        fn representation_walk_agrees_with_decision_walk(
            a in 1i64..40,
            b in 1i64..40,
            c in -40i64..-1,
        ) {
            let f = Form::new(a, b, c);
            let delta = f.disc();
            prop_assume!(delta > 0);
            let s = isqrt_disc(delta) as i128;
            prop_assume!(s * s != delta);
            let dec = cycle_has_lead(&f, |l| l.abs() == 1).unwrap();
            let rep = find_representation(&f, |l| l.abs() == 1).unwrap();
            prop_assert_eq!(dec, rep.is_some());
            if let Some(r) = rep {
                let val = BigInt::from(f.a) * &r.x * &r.x
                    + BigInt::from(f.b) * &r.x * &r.y
                    + BigInt::from(f.c) * &r.y * &r.y;
                prop_assert_eq!(val, BigInt::from(r.lead));
            }
        }
    }
}
