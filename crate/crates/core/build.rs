use std::collections::HashSet;

use serde::Deserialize;

#[derive(Deserialize)]
struct Claim {
    id: String,
    topic: String,
    statement: String,
    expected: toml::Value,
    origin: String,
}

#[derive(Deserialize)]
struct ClaimFile {
    claim: Vec<Claim>,
}

fn main() {
    println!("cargo:rerun-if-changed=claims.toml");
    let text = std::fs::read_to_string("claims.toml").expect("claims.toml is readable");
    let file: ClaimFile = toml::from_str(&text).unwrap_or_else(|e| panic!("claims.toml: {e}"));
    let mut seen = HashSet::new();
    for c in &file.claim {
        assert!(seen.insert(c.id.as_str()), "duplicate claim id {}", c.id);
        assert!(
            ["S0.", "S1.", "S2.", "S3.", "S4."].iter().any(|p| c.id.starts_with(p)),
            "claim {} does not belong to a scenario",
            c.id
        );
        assert!(!c.topic.trim().is_empty(), "claim {} has an empty topic", c.id);
        assert!(!c.statement.trim().is_empty(), "claim {} has an empty statement", c.id);
        assert!(
            ["published", "derived", "trivial"].contains(&c.origin.as_str()),
            "claim {} has unknown origin {:?}",
            c.id,
            c.origin
        );
        let typed = match &c.expected {
            toml::Value::Boolean(_) | toml::Value::Integer(_) | toml::Value::String(_) => true,
            toml::Value::Array(items) => {
                items.iter().all(|v| v.is_integer()) || items.iter().all(|v| v.is_str())
            }
            _ => false,
        };
        assert!(typed, "claim {} has an untyped expected value", c.id);
    }
}
