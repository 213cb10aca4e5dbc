//! Bulk sweeps and per-field reports: a census of all unusual orders up to
//! a discriminant bound, a search for fields whose fundamental unit has
//! d | v, and the two field-level tables that explain what the sweeps find.
//!
//! The census walks fields in increasing d and keeps a chunked JSON-lines
//! log. Every chunk covers a fixed span of d values and ends with a
//! `range_done` marker, so a interrupted run can be resumed from the last
//! marker and a parallel run produces byte-identical output: records inside
//! a chunk are sorted, chunks are emitted in order, and the worker count
//! only changes how a chunk's fields are distributed across threads.

use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_squarefree, isqrt, FieldData};
use crate::class_numbers::{class_number, class_number_equals, picard_order};
use crate::contfrac::{fundamental_unit, unit_coords_mod, unit_power_coords_mod};
use crate::diophantine::{solvable_abs, PellQuery};
use crate::error::{Error, Result};
use crate::unusual::{
    conductors_from_blocked, is_unusual, obstructed_ramified_primes, type_form, TypeForm,
};

/// Span of d values per census chunk. One `range_done` marker is written
/// per chunk, so valid resume points are exactly 2 + k·span.
const CENSUS_CHUNK_SPAN: u64 = 4096;

/// One unusual order O_f found by the census.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusRecord {
    pub d: u64,
    pub f: u64,
    /// Discriminant f²·d_K of the order.
    pub disc: u64,
    /// Taxonomy slot of the field; total here, because a field with any
    /// unusual conductor has a nonempty reduced set.
    pub type_form: TypeForm,
    /// d mod 8.
    pub beta: u8,
    /// Number of ramified primes of d_K.
    pub t: u8,
    /// N(ε) for the field.
    pub unit_norm: i8,
    /// h = |Pic(O_K)|; always 2 on census rows.
    pub class_number: u64,
}

/// Wire format of one census log line. All numbers are decimal strings so
/// the log stays exact for consumers without 64-bit integers; `range_done`
/// markers carry only `kind` and `d` (the last d of the finished chunk).
#[derive(Debug, Serialize, Deserialize)]
struct LogLine {
    kind: String,
    d: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    f: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    disc: Option<String>,
    #[serde(default, rename = "type", skip_serializing_if = "Option::is_none")]
    type_index: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    form: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    unit_norm: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    class_number: Option<String>,
}

impl LogLine {
    fn from_record(r: &CensusRecord) -> Self {
        LogLine {
            kind: "order".to_string(),
            d: r.d.to_string(),
            f: Some(r.f.to_string()),
            disc: Some(r.disc.to_string()),
            type_index: Some(r.type_form.type_index.to_string()),
            form: Some(r.type_form.form_index.to_string()),
            beta: Some(r.beta.to_string()),
            t: Some(r.t.to_string()),
            unit_norm: Some(r.unit_norm.to_string()),
            class_number: Some(r.class_number.to_string()),
        }
    }

    fn marker(chunk_hi: u64) -> Self {
        LogLine {
            kind: "range_done".to_string(),
            d: chunk_hi.to_string(),
            f: None,
            disc: None,
            type_index: None,
            form: None,
            beta: None,
            t: None,
            unit_norm: None,
            class_number: None,
        }
    }

    fn into_record(self) -> Result<CensusRecord> {
        fn field<T: std::str::FromStr>(value: Option<&str>, name: &str) -> Result<T> {
            value
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::invalid(format!("census log field {name} missing or malformed")))
        }
        Ok(CensusRecord {
            d: field(Some(&self.d), "d")?,
            f: field(self.f.as_deref(), "f")?,
            disc: field(self.disc.as_deref(), "disc")?,
            type_form: TypeForm {
                type_index: field(self.type_index.as_deref(), "type")?,
                form_index: field(self.form.as_deref(), "form")?,
            },
            beta: field(self.beta.as_deref(), "beta")?,
            t: field(self.t.as_deref(), "t")?,
            unit_norm: field(self.unit_norm.as_deref(), "unit_norm")?,
            class_number: field(self.class_number.as_deref(), "class_number")?,
        })
    }
}

/// Renders one census record exactly as the census log would (no trailing
/// newline), for writers that stream records elsewhere.
pub fn census_record_line(record: &CensusRecord) -> String {
    serde_json::to_string(&LogLine::from_record(record)).expect("log line serializes")
}

/// A census log read back from disk: the records of every finished chunk,
/// where to resume, and how long the trustworthy prefix is in bytes.
#[derive(Debug, Default)]
pub struct CensusLog {
    /// Records from chunks that reached their `range_done` marker.
    pub records: Vec<CensusRecord>,
    /// d value of the last marker, if any chunk finished.
    pub last_marker: Option<u64>,
    /// Byte length of the log prefix ending at that marker's newline.
    /// Truncating the file to this length and appending a run started at
    /// `last_marker + 1` reproduces an uninterrupted log.
    pub committed_bytes: u64,
}

/// Parses a census log, keeping only chunks that completed. Reading stops
/// at the first malformed line: a torn tail from an interrupted run only
/// costs the records since the last marker, which the resumed run redoes.
pub fn read_census_log<R: BufRead>(mut reader: R) -> Result<CensusLog> {
    let mut log = CensusLog::default();
    let mut pending: Vec<CensusRecord> = Vec::new();
    let mut consumed: u64 = 0;
    let mut line = String::new();
    loop {
        line.clear();
        let n = reader.read_line(&mut line)?;
        if n == 0 {
            break;
        }
        let Ok(parsed) = serde_json::from_str::<LogLine>(line.trim_end()) else {
            break;
        };
        consumed += n as u64;
        match parsed.kind.as_str() {
            "order" => match parsed.into_record() {
                Ok(record) => pending.push(record),
                Err(_) => break,
            },
            "range_done" => {
                let Ok(hi) = parsed.d.parse::<u64>() else { break };
                log.records.append(&mut pending);
                log.last_marker = Some(hi);
                log.committed_bytes = consumed;
            }
            _ => break,
        }
    }
    Ok(log)
}

/// Enumerates every unusual order with discriminant f²·d_K ≤ `max_disc`,
/// ordered by (d, f). `start_d` resumes a previous run and must be a chunk
/// boundary (2 + k·span), which `last_marker + 1` always is; `jobs` caps
/// the worker threads without changing the output; `log` receives the
/// JSON-lines record of every finished chunk.
pub fn census(
    max_disc: u64,
    start_d: u64,
    jobs: Option<usize>,
    log: Option<&mut dyn Write>,
) -> Result<Vec<CensusRecord>> {
    census_with_span(max_disc, start_d, jobs, log, CENSUS_CHUNK_SPAN)
}

fn census_with_span(
    max_disc: u64,
    start_d: u64,
    jobs: Option<usize>,
    mut log: Option<&mut dyn Write>,
    span: u64,
) -> Result<Vec<CensusRecord>> {
    if start_d < 2 {
        return Err(Error::invalid("census must start at d ≥ 2"));
    }
    // f ≥ 2 and d_K ≥ d force d ≤ max_disc/4 for any record.
    let d_max = max_disc / 4;
    if start_d > d_max {
        return Ok(Vec::new());
    }
    if (start_d - 2) % span != 0 {
        return Err(Error::invalid(format!(
            "census resume point {start_d} is not a chunk boundary (2 + k·{span})"
        )));
    }

    let pool = build_pool(jobs)?;
    let mut all = Vec::new();
    let mut lo = start_d;
    while lo <= d_max {
        let hi = d_max.min(lo + (span - 1));
        let chunk: Vec<Vec<CensusRecord>> =
            par_map(lo..=hi, pool.as_ref(), |d| census_for_field(d, max_disc))?;
        let chunk: Vec<CensusRecord> = chunk.into_iter().flatten().collect();
        if let Some(w) = log.as_deref_mut() {
            for record in &chunk {
                writeln!(w, "{}", census_record_line(record))?;
            }
            let marker = serde_json::to_string(&LogLine::marker(hi)).expect("marker serializes");
            writeln!(w, "{marker}")?;
            w.flush()?;
        }
        all.extend(chunk);
        lo = hi + 1;
    }
    Ok(all)
}

/// All unusual conductors of Q(√d) whose order's discriminant stays within
/// the census bound, as finished records. Empty for almost every d: the
/// field must pass the shape, obstruction, unit-norm, and h = 2 gates
/// before any conductor is tried.
fn census_for_field(d: u64, max_disc: u64) -> Result<Vec<CensusRecord>> {
    if !is_squarefree(d)? {
        return Ok(Vec::new());
    }
    let fd = FieldData::new(d)?;
    if (fd.d_k as u128) * 4 > max_disc as u128 {
        return Ok(Vec::new());
    }
    if !census_shape_ok(&fd) {
        return Ok(Vec::new());
    }
    let blocked = obstructed_ramified_primes(&fd)?;
    if blocked.is_empty() {
        return Ok(Vec::new());
    }
    // The admissible shapes pair t = 2 with N(ε) = −1 and t = 3 with +1;
    // a field on the wrong side has no unusual conductor at all.
    let norm = unit_coords_mod(&fd, 2)?.norm;
    let required = if fd.t == 2 { -1 } else { 1 };
    if norm != required {
        return Ok(Vec::new());
    }
    if !class_number_equals(&fd, 2)? {
        return Ok(Vec::new());
    }
    let f_bound = isqrt(max_disc / fd.d_k);
    if f_bound < 2 {
        return Ok(Vec::new());
    }
    let conductors = conductors_from_blocked(&fd, &blocked, norm, f_bound)?;
    if conductors.is_empty() {
        return Ok(Vec::new());
    }
    let slot = type_form(&fd)?.ok_or_else(|| {
        Error::Inconsistency(format!("d = {d}: unusual conductors exist but no taxonomy slot"))
    })?;
    Ok(conductors
        .into_iter()
        .map(|f| CensusRecord {
            d,
            f,
            disc: f * f * fd.d_k,
            type_form: slot,
            beta: (d % 8) as u8,
            t: fd.t as u8,
            unit_norm: norm,
            class_number: 2,
        })
        .collect())
}

/// Whether d has one of the five splitting shapes that admit unusual
/// conductors: 2p with p ≡ 1, pq with p ≡ q ≡ 1, pq with p ≢ q (mod 4),
/// 2pq, or pqr with exactly one factor ≡ 1 (mod 4); p, q, r odd primes.
fn census_shape_ok(fd: &FieldData) -> bool {
    match *fd.d_primes() {
        [2, p] => p % 4 == 1,
        [p, q] if p % 2 == 1 => p % 4 == 1 || q % 4 == 1,
        [2, _, _] => true,
        [p, q, r] if p % 2 == 1 => {
            [p, q, r].into_iter().filter(|x| x % 4 == 1).count() == 1
        }
        _ => false,
    }
}

/// Fields d ≤ `max_d` whose fundamental unit ε = u + v·ω has d | v, in
/// increasing order. Candidates come from a single modular period drive;
/// each is then certified twice, by reducing the exact unit mod d and by
/// checking that ε³ inherits the divisibility.
pub fn search_unit_v_divisible(max_d: u64, jobs: Option<usize>) -> Result<Vec<u64>> {
    if max_d < 2 {
        return Ok(Vec::new());
    }
    let pool = build_pool(jobs)?;
    let hits = par_map(2..=max_d, pool.as_ref(), field_unit_v_divisible)?;
    Ok(hits.into_iter().flatten().collect())
}

fn field_unit_v_divisible(d: u64) -> Result<Option<u64>> {
    if !is_squarefree(d)? {
        return Ok(None);
    }
    let fd = FieldData::new(d)?;
    if unit_coords_mod(&fd, d)?.v != 0 {
        return Ok(None);
    }
    let unit = fundamental_unit(&fd)?;
    if (&unit.v % d) != num_bigint::BigUint::ZERO {
        return Err(Error::Inconsistency(format!(
            "d = {d}: v ≡ 0 (mod d) in the modular drive but not in the exact unit"
        )));
    }
    let (_, v_cubed) = unit_power_coords_mod(&fd, 3, d)?;
    if v_cubed != 0 {
        return Err(Error::Inconsistency(format!(
            "d = {d}: d | v but the v-coordinate of ε³ is {v_cubed} (mod d)"
        )));
    }
    Ok(Some(d))
}

/// Field-level attribute row: β = d mod 8, the ramified-prime count t,
/// N(ε), and h = |Pic(O_K)|.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AttributeRow {
    pub d: u64,
    pub beta: u8,
    pub t: u8,
    pub unit_norm: i8,
    pub class_number: u64,
}

/// Computes the attribute row of one field.
pub fn attribute_table(fd: &FieldData) -> Result<AttributeRow> {
    Ok(AttributeRow {
        d: fd.d,
        beta: (fd.d % 8) as u8,
        t: fd.t as u8,
        unit_norm: unit_coords_mod(fd, 2)?.norm,
        class_number: class_number(fd)?,
    })
}

/// One ramified prime's role in deciding whether the field has any unusual
/// conductor: p itself is one exactly when |Pic(O_p)| = |Pic(O_K)| = 2 and
/// |p·a² − (d_K/p)·b²| = 4 has no solution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RamifiedPicRow {
    pub p: u64,
    /// |Pic(O_p)| = |Pic(O_K)|.
    pub pic_equal: bool,
    /// |p·a² − (d_K/p)·b²| = 4 is solvable.
    pub pell_solvable: bool,
    /// p is an unusual conductor, decided independently of the two columns.
    pub unusual: bool,
}

/// Reports the membership criterion per ramified prime of d_K.
pub fn ramified_pic_check(fd: &FieldData) -> Result<Vec<RamifiedPicRow>> {
    let h = class_number(fd)?;
    let mut rows = Vec::new();
    for p in fd.ramified_primes() {
        let pic = picard_order(fd, p)?.pic;
        let pell_solvable = solvable_abs(&PellQuery::ramified(fd, p)?)?.is_solvable();
        let unusual = is_unusual(fd, p)?;
        debug_assert_eq!(unusual, pic == 2 && h == 2 && !pell_solvable);
        rows.push(RamifiedPicRow { p, pic_equal: pic == h, pell_solvable, unusual });
    }
    Ok(rows)
}

fn build_pool(jobs: Option<usize>) -> Result<Option<rayon::ThreadPool>> {
    match jobs {
        None => Ok(None),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map(Some)
            .map_err(|e| Error::invalid(format!("cannot build a {n}-thread worker pool: {e}"))),
    }
}

/// Applies `f` to every value of `range` in parallel, keeping range order
/// in the result. A caller-built pool overrides the global one so `jobs`
/// is honored without reconfiguring the process.
fn par_map<T: Send>(
    range: std::ops::RangeInclusive<u64>,
    pool: Option<&rayon::ThreadPool>,
    f: impl Fn(u64) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    let items: Vec<u64> = range.collect();
    let run = || items.par_iter().map(|&d| f(d)).collect::<Result<Vec<T>>>();
    match pool {
        Some(p) => p.install(run),
        None => run(),
    }
}
