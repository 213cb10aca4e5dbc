//! Frozen taxonomy values: every known minimal example classifies as
//! recorded, and sweeping all smaller fields confirms the minimality of
//! the small ones.

mod common;

use std::collections::BTreeMap;

use common::TAXONOMY_EXAMPLES;
use quadorders::arith::{is_squarefree, FieldData};
use quadorders::unusual::{type_form, TypeForm};

#[test]
fn taxonomy_examples_classify_as_recorded() {
    for &(d, type_index, form_index) in &TAXONOMY_EXAMPLES {
        let fd = FieldData::new(d).unwrap();
        assert_eq!(
            type_form(&fd).unwrap(),
            Some(TypeForm { type_index, form_index }),
            "d = {d}"
        );
    }
}

#[test]
fn small_examples_are_minimal_for_their_slot() {
    let mut first_seen: BTreeMap<(u8, u8), u64> = BTreeMap::new();
    for d in 2..=500u64 {
        if !is_squarefree(d).unwrap() {
            continue;
        }
        let fd = FieldData::new(d).unwrap();
        if let Some(slot) = type_form(&fd).unwrap() {
            first_seen.entry((slot.type_index, slot.form_index)).or_insert(d);
        }
    }
    let expected: BTreeMap<(u8, u8), u64> = TAXONOMY_EXAMPLES
        .iter()
        .filter(|&&(d, _, _)| d <= 500)
        .map(|&(d, type_index, form_index)| ((type_index, form_index), d))
        .collect();
    assert_eq!(first_seen, expected);
}
