//! Set literals and the versioned report document.

use serde::{Deserialize, Serialize};

use crate::backend::{BackendInfo, BackendKind};
use crate::error::{Error, Result};
use crate::oracles::ConstructionSummary;
use crate::residue::{check_modulus, RepFn, ResidueSet};
use crate::search::{CollisionReport, SearchReport, VerificationReport};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_NAME: &str = "repclass";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// JSON Schema for [`ReportDocument`].
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with(|c: char| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some('-') {
            self.pos += 1;
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let digits = &self.text[start..self.pos];
        if digits.is_empty() || digits == "-" {
            self.pos = start;
            return Err(self.err("expected an integer"));
        }
        digits.parse().map_err(|_| Error::Parse {
            pos: start,
            msg: format!("integer {digits} out of range"),
        })
    }
}

/// Parses `m:{e1,e2,...}`. Elements are reduced mod `m` and may repeat.
pub fn parse_set_literal(text: &str) -> Result<ResidueSet> {
    let mut cur = Cursor { text, pos: 0 };
    let m_pos = {
        cur.skip_ws();
        cur.pos
    };
    let m = cur.integer()?;
    if m < 0 {
        return Err(Error::Parse {
            pos: m_pos,
            msg: "modulus must be positive".into(),
        });
    }
    let m = usize::try_from(m).map_err(|_| Error::Parse {
        pos: m_pos,
        msg: "modulus out of range".into(),
    })?;
    check_modulus(m)?;
    cur.expect(':')?;
    cur.expect('{')?;
    let mut elements = Vec::new();
    cur.skip_ws();
    if cur.peek() == Some('}') {
        cur.pos += 1;
    } else {
        loop {
            elements.push(cur.integer()?);
            cur.skip_ws();
            match cur.peek() {
                Some(',') => cur.pos += 1,
                Some('}') => {
                    cur.pos += 1;
                    break;
                }
                _ => return Err(cur.err("expected ',' or '}'")),
            }
        }
    }
    cur.skip_ws();
    if cur.pos != text.len() {
        return Err(cur.err("trailing characters"));
    }
    ResidueSet::new(m, elements)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Holds,
    Fails,
    HypothesisError,
}

/// Outcome of one oracle (or one family of oracle cases).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub input: String,
    pub status: CheckStatus,
    pub cases: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ReportResults {
    RepfnEval {
        set: ResidueSet,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cross_with: Option<ResidueSet>,
        backend: BackendKind,
        repfn: RepFn,
    },
    Construction(ConstructionSummary),
    Check {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        outcomes: Vec<CheckOutcome>,
    },
    Partitions(SearchReport),
    EqualRepfn(CollisionReport),
    Verification(VerificationReport),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub command: Vec<String>,
    pub results: ReportResults,
    pub timing_ms: u64,
    pub backend: BackendInfo,
    pub verdict: Verdict,
}

impl ReportDocument {
    pub fn new(command: Vec<String>, results: ReportResults, backend: BackendInfo, verdict: Verdict) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: TOOL_NAME.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            command,
            results,
            timing_ms: 0,
            backend,
            verdict,
        }
    }

    /// Zeroes every timing field so that reruns compare byte-for-byte.
    pub fn stabilize(&mut self) {
        self.timing_ms = 0;
        match &mut self.results {
            ReportResults::Partitions(r) => r.elapsed_ms = 0,
            ReportResults::EqualRepfn(r) => r.elapsed_ms = 0,
            ReportResults::Verification(r) => r.elapsed_ms = 0,
            _ => {}
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::Parse {
                pos: 0,
                msg: format!("unknown format {other:?}"),
            }),
        }
    }
}

fn residues(a: &ResidueSet) -> String {
    a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Serializes the document. CSV carries one row per witness pair.
pub fn emit_report(doc: &ReportDocument, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(doc)?;
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Csv => emit_csv(doc),
    }
}

fn emit_csv(doc: &ReportDocument) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["m", "s_or_k", "a", "b", "half_shift", "degenerate"])?;
    let mut row = |m: usize, size: usize, a: &ResidueSet, b: &ResidueSet, half: bool| {
        w.write_record([
            m.to_string(),
            size.to_string(),
            residues(a),
            residues(b),
            half.to_string(),
            (a == b).to_string(),
        ])
    };
    match &doc.results {
        ReportResults::Partitions(r) => {
            for x in &r.witnesses {
                row(r.spec.m, x.intersection_size, &x.a, &x.b, x.half_shift)?;
            }
        }
        ReportResults::EqualRepfn(r) => {
            for class in &r.classes {
                let (first, rest) = class.members.split_first().expect("classes have two members");
                for other in rest {
                    let half = r.spec.m % 2 == 0 && first.shift((r.spec.m / 2) as i64) == *other;
                    row(r.spec.m, first.cardinality(), first, other, half)?;
                }
            }
        }
        ReportResults::Verification(r) => {
            for run in &r.runs {
                for x in &run.counterexamples {
                    row(run.m, run.s, &x.a, &x.b, x.half_shift)?;
                }
                for p in &run.constructed_pairs {
                    row(run.m, run.s, &p.a, &p.b, false)?;
                }
            }
        }
        ReportResults::Construction(c) => {
            let m = c.m;
            let a = ResidueSet::new(m, c.a.iter().map(|&x| x as i64))?;
            let b = ResidueSet::new(m, c.b.iter().map(|&x| x as i64))?;
            row(m, c.intersection_size, &a, &b, c.half_shift)?;
        }
        ReportResults::RepfnEval { .. } | ReportResults::Check { .. } => {}
    }
    let bytes = w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn parse_report(text: &str) -> Result<ReportDocument> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::Backend;
    use crate::search::{find_equal_partitions, SearchSpec};

    #[test]
    fn literals() {
        assert_eq!(parse_set_literal("4:{0,2}").unwrap().elements(), vec![0, 2]);
        assert!(parse_set_literal("5:{}").unwrap().is_empty());
        assert_eq!(parse_set_literal("4:{0,6}").unwrap().elements(), vec![0, 2]);
        assert_eq!(parse_set_literal(" 6 : { 1 , -1 } ").unwrap().elements(), vec![1, 5]);
    }

    #[test]
    fn literal_errors_carry_positions() {
        assert!(matches!(parse_set_literal("0:{}"), Err(Error::ZeroModulus)));
        assert!(matches!(parse_set_literal("4{0}"), Err(Error::Parse { pos: 1, .. })));
        assert!(matches!(parse_set_literal("4:{0,}"), Err(Error::Parse { pos: 5, .. })));
        assert!(matches!(parse_set_literal("4:{0 2}"), Err(Error::Parse { pos: 5, .. })));
        assert!(matches!(parse_set_literal("4:{0}x"), Err(Error::Parse { pos: 5, .. })));
        assert!(matches!(parse_set_literal(":{0}"), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(parse_set_literal("-4:{0}"), Err(Error::Parse { pos: 0, .. })));
    }

    fn doc(results: ReportResults) -> ReportDocument {
        ReportDocument::new(
            vec!["search".into()],
            results,
            BackendInfo::new(Backend::Auto),
            Verdict::Pass,
        )
    }

    #[test]
    fn empty_witness_list_is_explicit() {
        let r = find_equal_partitions(&SearchSpec::partition(6, 3)).unwrap();
        let text = emit_report(&doc(ReportResults::Partitions(r)), ReportFormat::Json).unwrap();
        assert!(text.contains("\"witnesses\": []"));
    }

    #[test]
    fn json_round_trip() {
        let r = find_equal_partitions(&SearchSpec::partition(8, 4).up_to_symmetry(true)).unwrap();
        let d = doc(ReportResults::Partitions(r));
        let text = emit_report(&d, ReportFormat::Json).unwrap();
        assert_eq!(parse_report(&text).unwrap(), d);
    }

    #[test]
    fn csv_rows() {
        let r = find_equal_partitions(&SearchSpec::partition(4, 2)).unwrap();
        let n = r.witness_count;
        let text = emit_report(&doc(ReportResults::Partitions(r)), ReportFormat::Csv).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "m,s_or_k,a,b,half_shift,degenerate");
        assert_eq!(lines.len(), n + 1);
        assert!(lines[1..].iter().all(|l| l.starts_with("4,2,")));
    }
}
