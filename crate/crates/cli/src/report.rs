use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde_json::{json, Map, Value};

pub const SCHEMA: u64 = 1;

/// Tag of the published result behind a rule name.
pub fn citation(rule: &str) -> Option<&'static str> {
    Some(match rule {
        "source_sum_of_cyclics" | "target_algebraically_compact" => "Thm 5.2(1)",
        "source_torsionfree" | "target_torsionfree" | "pext_divisible" => "Thm 5.2(2)",
        "pext_zero" | "jensen_sequence" => "Thm 1.1",
        "prufer_against_cyclic_sum" | "padic_completion" => "Example 5.3",
        "infinite_order" => "Example 5.3 footnote",
        "milnor_sequence" | "kl_hausdorff_quotient" => "Prop 4.1",
        "uct_split" => "Thm 4.5",
        "lim_of_uct" | "diagram_naturality" => "Thm 1.3",
        "pullback_square" => "Prop 5.1",
        "closure_of_zero_agrees" => "Thm 2.3",
        "topologies_coincide" => "Prop 4.4",
        "roos_surjectivity" => "Thm 4.2",
        "stable_stage" | "product_of_summands" | "sum_of_limits" | "hom_from_prufer" => "standard",
        _ => return None,
    })
}

const RULE_KEYS: [&str; 3] = ["rule", "rule_name", "reason"];

fn scan_rules(v: &Value, out: &mut BTreeSet<String>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                if RULE_KEYS.contains(&k.as_str()) {
                    if let Value::String(s) = x {
                        out.extend(s.split(", ").filter(|r| citation(r).is_some()).map(str::to_string));
                    }
                }
                if k == "infinite_order" && x == &Value::Bool(true) {
                    out.insert("infinite_order".into());
                }
                scan_rules(x, out);
            }
        }
        Value::Array(xs) => xs.iter().for_each(|x| scan_rules(x, out)),
        _ => {}
    }
}

/// Whether any verdict or certificate in `v` is inconclusive.
pub fn has_inconclusive(v: &Value) -> bool {
    match v {
        Value::String(s) => s == "inconclusive" || s == "inconclusive_window",
        Value::Object(m) => m.values().any(has_inconclusive),
        Value::Array(xs) => xs.iter().any(has_inconclusive),
        _ => false,
    }
}

/// One job's outcome: the JSON result and a few summary rows.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: &'static str,
    pub job: String,
    pub result: Value,
    pub summary: Vec<(String, String)>,
}

impl Report {
    pub fn citations(&self) -> Value {
        let mut rules = BTreeSet::new();
        scan_rules(&self.result, &mut rules);
        let mut m = Map::new();
        for r in rules {
            let tag = citation(&r).unwrap();
            m.insert(r, Value::String(tag.into()));
        }
        Value::Object(m)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "job": self.job,
            "result": self.result,
            "citations": self.citations(),
        })
    }

    pub fn is_inconclusive(&self) -> bool {
        has_inconclusive(&self.result)
    }

    pub fn render_summary(&self) -> String {
        let width = self.summary.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
        let mut s = format!("== {}\n", self.job);
        for (k, v) in &self.summary {
            let _ = writeln!(s, "  {k:<width$}  {v}");
        }
        s
    }
}

/// The JSON document for a batch of reports.
pub fn document(reports: &[Report]) -> Value {
    match reports {
        [one] => one.to_json(),
        many => json!({
            "schema": SCHEMA,
            "reports": many.iter().map(Report::to_json).collect::<Vec<_>>(),
        }),
    }
}

/// Pretty JSON with a trailing newline. `serde_json` maps keep keys sorted.
pub fn render(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("JSON values serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn citations_are_collected_and_sorted() {
        let r = Report {
            command: "pext",
            job: "pext".into(),
            result: json!({
                "a": {"rule": "target_torsionfree"},
                "b": [{"reason": "source_sum_of_cyclics, pext_zero"}, {"rule_name": "unlisted"}],
                "j": {"infinite_order": true},
            }),
            summary: vec![],
        };
        let c = r.citations();
        let keys: Vec<&String> = c.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["infinite_order", "pext_zero", "source_sum_of_cyclics", "target_torsionfree"]);
        assert_eq!(c["target_torsionfree"], "Thm 5.2(2)");
    }

    #[test]
    fn inconclusive_scan() {
        assert!(has_inconclusive(&json!({"x": [{"kind": "inconclusive_window"}]})));
        assert!(!has_inconclusive(&json!({"verdict": "zero"})));
    }
}
