//! Pass/fail verification reports with counterexample witnesses.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One named check: how many instances were examined and, on failure, the
/// first counterexample in deterministic order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub axiom: String,
    pub status: Status,
    pub instances: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
}

impl Check {
    pub fn new(axiom: impl Into<String>, instances: u64, witness: Option<String>) -> Self {
        Check {
            axiom: axiom.into(),
            status: if witness.is_some() { Status::Fail } else { Status::Pass },
            instances,
            witness,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), checks: Vec::new() }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn get(&self, axiom: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.title);
        for c in &self.checks {
            let tag = if c.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "  {tag} {} ({} instances)", c.axiom, c.instances);
            if let Some(w) = &c.witness {
                let _ = writeln!(out, "       witness: {w}");
            }
        }
        let verdict = if self.passed() { "all checks pass" } else { "FAILED" };
        let _ = writeln!(out, "  => {verdict}");
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Scans a list of per-chunk results in order and returns the total
/// instance count together with the first witness, if any.
pub fn merge(parts: Vec<(u64, Option<String>)>) -> (u64, Option<String>) {
    let mut total = 0;
    let mut first = None;
    for (n, w) in parts {
        total += n;
        if first.is_none() {
            first = w;
        }
    }
    (total, first)
}

/// Line number (1-based) where element `index` of the array under `key`
/// starts in a JSON source, or where `key` appears when `index` is `None`.
pub fn locate_json(src: &str, key: &str, index: Option<usize>) -> Option<usize> {
    let needle = format!("\"{key}\"");
    let mut start = src.find(&needle)?;
    start += needle.len();
    let rest = &src[start..];
    let colon = rest.find(':')?;
    let mut pos = start + colon + 1;
    let line_of = |p: usize| src[..p].matches('\n').count() + 1;
    let Some(target) = index else {
        return Some(line_of(pos));
    };
    let bytes = src.as_bytes();
    while pos < bytes.len() && bytes[pos] != b'[' {
        pos += 1;
    }
    let mut depth = 0usize;
    let mut element = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    let mut at_element_start = true;
    while pos < bytes.len() {
        let b = bytes[pos];
        if in_string {
            if escaped {
                escaped = false;
            } else if b == b'\\' {
                escaped = true;
            } else if b == b'"' {
                in_string = false;
            }
            pos += 1;
            continue;
        }
        match b {
            b'[' | b'{' => {
                depth += 1;
                if depth == 2 && at_element_start {
                    if element == target {
                        return Some(line_of(pos));
                    }
                    at_element_start = false;
                }
            }
            b']' | b'}' => {
                if depth == 1 {
                    return None;
                }
                depth -= 1;
            }
            b',' if depth == 1 => {
                element += 1;
                at_element_start = true;
            }
            b'"' => {
                in_string = true;
                if depth == 1 && at_element_start {
                    if element == target {
                        return Some(line_of(pos));
                    }
                    at_element_start = false;
                }
            }
            c if depth == 1 && at_element_start && !c.is_ascii_whitespace() => {
                if element == target {
                    return Some(line_of(pos));
                }
                at_element_start = false;
            }
            _ => {}
        }
        pos += 1;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locates_array_elements() {
        let src = "{\n \"a\": 1,\n \"mult\": [\n  [0,0,0,\"1\"],\n  [0,1,1,\"1\"]\n ]\n}";
        assert_eq!(locate_json(src, "mult", Some(0)), Some(4));
        assert_eq!(locate_json(src, "mult", Some(1)), Some(5));
        assert_eq!(locate_json(src, "mult", Some(2)), None);
        assert_eq!(locate_json(src, "a", None), Some(2));
    }

    #[test]
    fn report_status_follows_witnesses() {
        let mut r = Report::new("t");
        r.push(Check::new("x", 3, None));
        assert!(r.passed());
        r.push(Check::new("y", 1, Some("w".into())));
        assert!(!r.passed());
        assert!(r.to_text().contains("FAIL y"));
    }
}
