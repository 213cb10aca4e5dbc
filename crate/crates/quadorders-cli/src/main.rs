//! Command-line front end for the quadorders library.
//!
//! Exit codes: 0 on success (for `classify`: the order is unusual), 1 when
//! `classify` answers no or on i/o failure, 2 on invalid arguments, 3 when
//! a configured budget ran out before an answer, 4 on an internal
//! inconsistency (a bug, not a property of the input).

use std::fs::OpenOptions;
use std::io::{BufReader, BufWriter, Seek, SeekFrom, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use quadorders::arith::{FieldData, OmegaKind};
use quadorders::class_numbers::class_number;
use quadorders::contfrac::unit_coords_mod;
use quadorders::surveys::{
    attribute_table, census, census_record_line, ramified_pic_check, read_census_log,
    search_unit_v_divisible, CensusRecord,
};
use quadorders::unusual::{
    is_unusual, is_unusual_cor28, is_unusual_norm_minus_one, is_unusual_thm29,
    reduced_unusual_conductors, type_form, unusual_conductors,
};
use quadorders::{Error, Result};

#[derive(Parser)]
#[command(name = "quadorders", version, about = "Unusual sets of distances in real quadratic orders")]
struct Cli {
    /// Emit JSON lines (all integers as decimal strings) instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Field-level invariants of Q(√d).
    Info { d: u64 },
    /// Decide whether the order of conductor f in Q(√d) has an unusual set
    /// of distances; exits 0 when it does, 1 when it does not.
    Classify {
        d: u64,
        f: u64,
        /// Decision route; all routes agree, `thm39` requires N(ε) = −1.
        #[arg(long, value_enum, default_value_t = Route::Thm44)]
        route: Route,
    },
    /// List the unusual conductors of Q(√d) up to a bound.
    Conductors {
        d: u64,
        /// Candidate bound; defaults to lcm(2,d), which is exhaustive when
        /// N(ε) = 1, and to 10·lcm(2,d) otherwise.
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Taxonomy slot (type and form) of Q(√d), with the reduced set D'_d.
    TypeForm { d: u64 },
    /// Enumerate every unusual order with discriminant at most the bound.
    Census {
        #[arg(long)]
        max_disc: u64,
        /// Worker threads; never changes the output, only the wall time.
        #[arg(long)]
        jobs: Option<usize>,
        /// Keep a JSON-lines log at this path and resume from its last
        /// complete chunk instead of starting over.
        #[arg(long, value_name = "LOG")]
        resume: Option<PathBuf>,
    },
    /// Search for fields whose fundamental unit ε = u + v·ω has d | v.
    SearchV {
        #[arg(long)]
        max_d: u64,
        /// Worker threads; never changes the output, only the wall time.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Attribute row of Q(√d) and the membership report per ramified prime.
    Attributes { d: u64 },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Route {
    Thm44,
    Thm29,
    Cor28,
    Thm39,
}

impl Route {
    fn name(self) -> &'static str {
        match self {
            Route::Thm44 => "thm44",
            Route::Thm29 => "thm29",
            Route::Cor28 => "cor28",
            Route::Thm39 => "thm39",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::InvalidInput(_) => 2,
                Error::BudgetExhausted(_) => 3,
                Error::Inconsistency(_) => 4,
                Error::Io(_) => 1,
            })
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Info { d } => cmd_info(d, cli.json),
        Command::Classify { d, f, route } => cmd_classify(d, f, route, cli.json),
        Command::Conductors { d, bound } => cmd_conductors(d, bound, cli.json),
        Command::TypeForm { d } => cmd_type_form(d, cli.json),
        Command::Census { max_disc, jobs, resume } => cmd_census(max_disc, jobs, resume, cli.json),
        Command::SearchV { max_d, jobs } => cmd_search_v(max_d, jobs, cli.json),
        Command::Attributes { d } => cmd_attributes(d, cli.json),
    }
}

fn decimal_list(values: &[u64]) -> Vec<String> {
    values.iter().map(u64::to_string).collect()
}

fn joined(values: &[u64]) -> String {
    if values.is_empty() {
        return "(none)".to_string();
    }
    decimal_list(values).join(" ")
}

fn cmd_info(d: u64, json: bool) -> Result<ExitCode> {
    let fd = FieldData::new(d)?;
    let residues = unit_coords_mod(&fd, 2)?;
    let h = class_number(&fd)?;
    let omega = match fd.omega_kind {
        OmegaKind::SqrtD => "sqrt(d)",
        OmegaKind::HalfOnePlusSqrtD => "(1+sqrt(d))/2",
    };
    let ramified = fd.ramified_primes();
    if json {
        println!(
            "{}",
            serde_json::json!({
                "kind": "info",
                "d": d.to_string(),
                "d_k": fd.d_k.to_string(),
                "omega": omega,
                "t": fd.t.to_string(),
                "ramified": decimal_list(&ramified),
                "unit_norm": residues.norm.to_string(),
                "cf_period": residues.period_length.to_string(),
                "class_number": h.to_string(),
            })
        );
    } else {
        println!("d            = {d}");
        println!("d_K          = {}", fd.d_k);
        println!("omega        = {omega}");
        println!("t            = {}", fd.t);
        println!("ramified     = {}", joined(&ramified));
        println!("N(eps)       = {}", residues.norm);
        println!("cf period    = {}", residues.period_length);
        println!("class number = {h}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_classify(d: u64, f: u64, route: Route, json: bool) -> Result<ExitCode> {
    let fd = FieldData::new(d)?;
    let unusual = match route {
        Route::Thm44 => is_unusual(&fd, f)?,
        Route::Thm29 => is_unusual_thm29(&fd, f)?,
        Route::Cor28 => is_unusual_cor28(&fd, f)?,
        Route::Thm39 => is_unusual_norm_minus_one(&fd, f)?,
    };
    if json {
        println!(
            "{}",
            serde_json::json!({
                "kind": "classify",
                "d": d.to_string(),
                "f": f.to_string(),
                "route": route.name(),
                "unusual": unusual,
            })
        );
    } else if unusual {
        println!("d = {d}, f = {f}: the set of distances is unusual (route {})", route.name());
    } else {
        println!("d = {d}, f = {f}: the set of distances is not unusual (route {})", route.name());
    }
    Ok(if unusual { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_conductors(d: u64, bound: Option<u64>, json: bool) -> Result<ExitCode> {
    let fd = FieldData::new(d)?;
    let norm = unit_coords_mod(&fd, 2)?.norm;
    let lcm2d = if d % 2 == 0 {
        d
    } else {
        d.checked_mul(2).ok_or_else(|| Error::InvalidInput(format!("lcm(2,{d}) overflows")))?
    };
    let bound = match bound {
        Some(b) => b,
        None if norm == 1 => lcm2d,
        None => lcm2d
            .checked_mul(10)
            .ok_or_else(|| Error::InvalidInput(format!("10·lcm(2,{d}) overflows")))?,
    };
    // With N(ε) = 1 every unusual conductor divides lcm(2,d), so reaching
    // that bound makes the list exhaustive.
    let complete = norm == 1 && bound >= lcm2d;
    let conductors = unusual_conductors(&fd, bound)?;
    if json {
        println!(
            "{}",
            serde_json::json!({
                "kind": "conductors",
                "d": d.to_string(),
                "bound": bound.to_string(),
                "complete": complete,
                "conductors": decimal_list(&conductors),
            })
        );
    } else {
        let tail = if complete { "exhaustive" } else { "may omit larger ones" };
        println!("unusual conductors of d = {d} up to {bound} ({tail}): {}", joined(&conductors));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_type_form(d: u64, json: bool) -> Result<ExitCode> {
    let fd = FieldData::new(d)?;
    let slot = type_form(&fd)?;
    let reduced = reduced_unusual_conductors(&fd)?;
    if json {
        let (type_index, form_index) = match slot {
            Some(s) => (Some(s.type_index.to_string()), Some(s.form_index.to_string())),
            None => (None, None),
        };
        println!(
            "{}",
            serde_json::json!({
                "kind": "type_form",
                "d": d.to_string(),
                "type": type_index,
                "form": form_index,
                "reduced_conductors": decimal_list(&reduced),
            })
        );
    } else {
        match slot {
            Some(s) => println!(
                "d = {d}: type {}, form {} (D' = {})",
                s.type_index,
                s.form_index,
                joined(&reduced)
            ),
            None => println!("d = {d}: no type (no unusual conductors)"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_census(
    max_disc: u64,
    jobs: Option<usize>,
    resume: Option<PathBuf>,
    json: bool,
) -> Result<ExitCode> {
    let records = match resume {
        None => census(max_disc, 2, jobs, None)?,
        Some(path) => {
            let mut file =
                OpenOptions::new().read(true).write(true).create(true).open(&path)?;
            let parsed = read_census_log(BufReader::new(&mut file))?;
            // Drop any torn tail so the appended chunks continue a clean log.
            file.set_len(parsed.committed_bytes)?;
            file.seek(SeekFrom::End(0))?;
            let mut writer = BufWriter::new(file);
            let start = parsed.last_marker.map_or(2, |m| m + 1);
            let fresh = census(max_disc, start, jobs, Some(&mut writer))?;
            writer.flush()?;
            let mut records = parsed.records;
            records.extend(fresh);
            records
        }
    };
    if json {
        for record in &records {
            println!("{}", census_record_line(record));
        }
    } else {
        println!("{:>12} {:>10} {:>12} {:>4} {:>4} {:>4} {:>2} {:>6} {:>2}", "disc", "d", "f", "type", "form", "beta", "t", "N(eps)", "h");
        for r in &records {
            print_census_row(r);
        }
        println!("{} unusual orders with discriminant <= {max_disc}", records.len());
    }
    Ok(ExitCode::SUCCESS)
}

fn print_census_row(r: &CensusRecord) {
    println!(
        "{:>12} {:>10} {:>12} {:>4} {:>4} {:>4} {:>2} {:>6} {:>2}",
        r.disc,
        r.d,
        r.f,
        r.type_form.type_index,
        r.type_form.form_index,
        r.beta,
        r.t,
        r.unit_norm,
        r.class_number
    );
}

fn cmd_search_v(max_d: u64, jobs: Option<usize>, json: bool) -> Result<ExitCode> {
    let hits = search_unit_v_divisible(max_d, jobs)?;
    if json {
        for d in &hits {
            println!("{}", serde_json::json!({ "kind": "unit_v_hit", "d": d.to_string() }));
        }
    } else {
        for d in &hits {
            println!("{d}");
        }
        println!("{} fields with d | v up to {max_d}", hits.len());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_attributes(d: u64, json: bool) -> Result<ExitCode> {
    let fd = FieldData::new(d)?;
    let row = attribute_table(&fd)?;
    let ramified = ramified_pic_check(&fd)?;
    if json {
        let rows: Vec<serde_json::Value> = ramified
            .iter()
            .map(|r| {
                serde_json::json!({
                    "p": r.p.to_string(),
                    "pic_equal": r.pic_equal,
                    "pell_solvable": r.pell_solvable,
                    "unusual": r.unusual,
                })
            })
            .collect();
        println!(
            "{}",
            serde_json::json!({
                "kind": "attributes",
                "d": d.to_string(),
                "beta": row.beta.to_string(),
                "t": row.t.to_string(),
                "unit_norm": row.unit_norm.to_string(),
                "class_number": row.class_number.to_string(),
                "ramified": rows,
            })
        );
    } else {
        println!(
            "d = {d}: beta = {}, t = {}, N(eps) = {}, h = {}",
            row.beta, row.t, row.unit_norm, row.class_number
        );
        println!("{:>10} {:>10} {:>14} {:>8}", "p", "pic_equal", "pell_solvable", "unusual");
        for r in &ramified {
            println!("{:>10} {:>10} {:>14} {:>8}", r.p, r.pic_equal, r.pell_solvable, r.unusual);
        }
    }
    Ok(ExitCode::SUCCESS)
}
