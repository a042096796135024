//! Reports in text form and in a stable JSON schema.
//!
//! Every JSON report is an object with a `command` tag and a `status` of
//! `ok`, `no_admissible_repair` or `error`.

use std::fmt::Write as _;

use cqa_core::Value;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    NoAdmissibleRepair,
    Error,
}

impl From<cqa_core::cqa::Status> for Status {
    fn from(s: cqa_core::cqa::Status) -> Self {
        match s {
            cqa_core::cqa::Status::Ok => Status::Ok,
            cqa_core::cqa::Status::NoAdmissibleRepair => Status::NoAdmissibleRepair,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RepairEntry {
    pub facts: Vec<String>,
    pub inserted: Vec<String>,
    pub deleted: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RepairCounts {
    /// Answer sets before strong-constraint filtering.
    pub candidates: usize,
    /// Answer sets kept after strong and weak constraints.
    pub answer_sets: usize,
    pub repairs: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct QueryCounts {
    pub repairs: usize,
    pub answers: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Agreement {
    pub checked: usize,
    pub agreed: usize,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Report {
    Repair {
        status: Status,
        repairs: Vec<RepairEntry>,
        counts: RepairCounts,
    },
    Query {
        status: Status,
        variables: Vec<String>,
        answers: Vec<Vec<Value>>,
        certified_exact: bool,
        counts: QueryCounts,
    },
    Core {
        status: Status,
        core: Vec<String>,
        answer_sets: usize,
    },
    Wfs {
        status: Status,
        #[serde(rename = "true")]
        true_literals: Vec<String>,
        #[serde(rename = "false")]
        false_literals: Vec<String>,
        undefined: Vec<String>,
        rounds: usize,
    },
    Program {
        status: Status,
        rules: Vec<String>,
    },
    OracleCheck {
        status: Status,
        seed: u64,
        repairs: Agreement,
        answer_sets: Agreement,
        mismatches: Vec<String>,
    },
    Error {
        status: Status,
        kind: &'static str,
        message: String,
    },
}

fn tuple(t: &[Value]) -> String {
    let parts: Vec<String> = t.iter().map(Value::to_string).collect();
    format!("({})", parts.join(", "))
}

fn set(items: &[String]) -> String {
    format!("{{{}}}", items.join(", "))
}

fn status_line(out: &mut String, status: Status) {
    if status == Status::NoAdmissibleRepair {
        out.push_str("no admissible repair\n");
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self {
            Report::Repair {
                status,
                repairs,
                counts,
            } => {
                status_line(&mut out, *status);
                for (i, r) in repairs.iter().enumerate() {
                    let _ = writeln!(out, "repair {}: {}", i + 1, set(&r.facts));
                    for a in &r.inserted {
                        let _ = writeln!(out, "  + {a}");
                    }
                    for a in &r.deleted {
                        let _ = writeln!(out, "  - {a}");
                    }
                }
                let _ = writeln!(
                    out,
                    "{} repairs from {} answer sets ({} before strong constraints)",
                    counts.repairs, counts.answer_sets, counts.candidates
                );
            }
            Report::Query {
                status,
                variables,
                answers,
                certified_exact,
                counts,
            } => {
                status_line(&mut out, *status);
                if variables.is_empty() {
                    let _ = writeln!(out, "{}", if answers.is_empty() { "false" } else { "true" });
                } else {
                    let _ = writeln!(out, "({})", variables.join(", "));
                    for a in answers {
                        let _ = writeln!(out, "{}", tuple(a));
                    }
                }
                if counts.repairs > 0 {
                    let _ = writeln!(out, "{} answers over {} repairs", counts.answers, counts.repairs);
                } else {
                    let _ = writeln!(out, "{} answers", counts.answers);
                }
                let _ = writeln!(out, "certified exact: {certified_exact}");
            }
            Report::Core {
                status,
                core,
                answer_sets,
            } => {
                status_line(&mut out, *status);
                let _ = writeln!(out, "core: {}", set(core));
                let _ = writeln!(out, "{answer_sets} answer sets");
            }
            Report::Wfs {
                true_literals,
                false_literals,
                undefined,
                rounds,
                ..
            } => {
                let _ = writeln!(out, "true: {}", set(true_literals));
                let _ = writeln!(out, "false: {}", set(false_literals));
                let _ = writeln!(out, "undefined: {}", set(undefined));
                let _ = writeln!(out, "{rounds} rounds");
            }
            Report::Program { rules, .. } => {
                for r in rules {
                    let _ = writeln!(out, "{r}");
                }
            }
            Report::OracleCheck {
                seed,
                repairs,
                answer_sets,
                mismatches,
                ..
            } => {
                let _ = writeln!(out, "seed {seed}");
                let _ = writeln!(out, "repairs: {}/{} agree", repairs.agreed, repairs.checked);
                let _ = writeln!(out, "answer sets: {}/{} agree", answer_sets.agreed, answer_sets.checked);
                for m in mismatches {
                    let _ = writeln!(out, "mismatch: {m}");
                }
            }
            Report::Error { kind, message, .. } => {
                let _ = writeln!(out, "error ({kind}): {message}");
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_reports_carry_command_and_status() {
        let r = Report::Core {
            status: Status::NoAdmissibleRepair,
            core: vec![],
            answer_sets: 0,
        };
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["command"], "core");
        assert_eq!(v["status"], "no_admissible_repair");
    }

    #[test]
    fn closed_query_text_is_a_truth_value() {
        let r = Report::Query {
            status: Status::Ok,
            variables: vec![],
            answers: vec![vec![]],
            certified_exact: true,
            counts: QueryCounts { repairs: 2, answers: 1 },
        };
        assert!(r.to_text().starts_with("true\n"));
    }
}
