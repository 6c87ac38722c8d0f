//! Short educational facts keyed by trigger, handed out round-robin.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;
use thiserror::Error;

/// The facts file shipped with the crate.
pub const BUNDLED_FACTS: &str = include_str!("../facts.tsv");

pub const MAX_BODY_CHARS: usize = 280;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fact {
    pub id: String,
    pub trigger: String,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactsError {
    #[error("line {0}: expected `<trigger>\\t<id>\\t<body>`")]
    BadLine(usize),
    #[error("line {line}: duplicate fact id `{id}` for trigger `{trigger}`")]
    DuplicateId {
        line: usize,
        trigger: String,
        id: String,
    },
    #[error("line {0}: fact body is empty")]
    EmptyBody(usize),
    #[error("line {0}: fact body is longer than 280 characters")]
    BodyTooLong(usize),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct FactGroup {
    facts: Vec<Fact>,
    cursor: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FactStore {
    groups: BTreeMap<String, FactGroup>,
}

impl FactStore {
    pub fn bundled() -> FactStore {
        load_facts(BUNDLED_FACTS).expect("bundled facts file is valid")
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn triggers(&self) -> impl Iterator<Item = &str> {
        self.groups.keys().map(String::as_str)
    }

    pub fn group(&self, trigger: &str) -> &[Fact] {
        self.groups
            .get(trigger)
            .map_or(&[][..], |g| g.facts.as_slice())
    }

    pub fn has_trigger(&self, trigger: &str) -> bool {
        self.groups.contains_key(trigger)
    }

    /// Returns the fact under the trigger's cursor and advances it.
    pub fn next_fact(&mut self, trigger: &str) -> Option<Fact> {
        let group = self.groups.get_mut(trigger)?;
        let fact = group.facts[group.cursor].clone();
        group.cursor = (group.cursor + 1) % group.facts.len();
        Some(fact)
    }

    /// Rewinds every cursor to the first fact.
    pub fn rewind(&mut self) {
        for group in self.groups.values_mut() {
            group.cursor = 0;
        }
    }
}

/// Parses `<trigger>\t<id>\t<body>` lines; `#` lines and blank lines are skipped.
pub fn load_facts(text: &str) -> Result<FactStore, FactsError> {
    let mut store = FactStore::default();
    let mut ids = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [trigger, id, body] = fields[..] else {
            return Err(FactsError::BadLine(line_no));
        };
        if trigger.is_empty() || id.is_empty() {
            return Err(FactsError::BadLine(line_no));
        }
        if body.trim().is_empty() {
            return Err(FactsError::EmptyBody(line_no));
        }
        if body.chars().count() > MAX_BODY_CHARS {
            return Err(FactsError::BodyTooLong(line_no));
        }
        if !ids.insert((trigger.to_string(), id.to_string())) {
            return Err(FactsError::DuplicateId {
                line: line_no,
                trigger: trigger.to_string(),
                id: id.to_string(),
            });
        }
        store
            .groups
            .entry(trigger.to_string())
            .or_default()
            .facts
            .push(Fact {
                id: id.to_string(),
                trigger: trigger.to_string(),
                body: body.to_string(),
            });
    }
    Ok(store)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = "rocket.takeoff\tf1\tRockets push gas down to go up.\nrocket.takeoff\tf2\tThe first stage falls away.\n";

    #[test]
    fn groups_by_trigger() {
        let store = load_facts(TWO).unwrap();
        assert_eq!(store.triggers().collect::<Vec<_>>(), vec!["rocket.takeoff"]);
        assert_eq!(store.group("rocket.takeoff").len(), 2);
        assert!(load_facts("").unwrap().is_empty());
        assert!(load_facts("# only a comment\n\n").unwrap().is_empty());
    }

    #[test]
    fn bad_lines() {
        assert_eq!(load_facts("a\tb"), Err(FactsError::BadLine(1)));
        assert_eq!(load_facts("# c\na\tb\tc\td"), Err(FactsError::BadLine(2)));
        assert_eq!(load_facts("a\tb\t "), Err(FactsError::EmptyBody(1)));
        let long = format!("a\tb\t{}", "x".repeat(281));
        assert_eq!(load_facts(&long), Err(FactsError::BodyTooLong(1)));
        assert!(matches!(
            load_facts("a\tb\tone\na\tb\ttwo"),
            Err(FactsError::DuplicateId { line: 2, .. })
        ));
        // Same id under another trigger is fine.
        assert!(load_facts("a\tb\tone\nc\tb\ttwo").is_ok());
    }

    #[test]
    fn round_robin() {
        let mut store = load_facts(TWO).unwrap();
        let ids: Vec<String> = (0..3)
            .map(|_| store.next_fact("rocket.takeoff").unwrap().id)
            .collect();
        assert_eq!(ids, vec!["f1", "f2", "f1"]);
        assert_eq!(store.next_fact("maze.success"), None);
    }

    #[test]
    fn single_fact_repeats() {
        let mut store = load_facts("tree.full\tt1\tTrees make oxygen.").unwrap();
        for _ in 0..4 {
            assert_eq!(store.next_fact("tree.full").unwrap().id, "t1");
        }
    }

    #[test]
    fn bundled_file_loads() {
        let store = FactStore::bundled();
        for trigger in [
            "rocket.takeoff",
            "tree.full",
            "maze.success",
            "math.correct",
        ] {
            assert!(store.has_trigger(trigger), "{trigger}");
        }
    }
}
