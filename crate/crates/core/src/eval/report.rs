use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{EvalResult, DEFAULT_RANKS};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const REPORT_VERSION: u32 = 1;
const REPORT_MAGIC: &str = "#bir-report";
const MISSING: &str = "---";

/// One table row: mAP and CMC at ranks 1/5/10 as fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub label: String,
    pub map: f64,
    pub cmc: BTreeMap<usize, f64>,
}

impl ReportRow {
    pub fn from_result<T: Scalar>(label: impl Into<String>, result: &EvalResult<T>) -> Self {
        Self {
            label: label.into(),
            map: result.map.as_f64(),
            cmc: result.cmc.iter().map(|(&r, &v)| (r, v.as_f64())).collect(),
        }
    }
}

/// Result table with a human rendering and a tab-separated machine form.
///
/// Machine form: a header `#bir-report<TAB>version=1<TAB>ap=non-interpolated
/// <TAB>caption=...<TAB>rows=...`, then one `label<TAB>mAP<TAB>top1<TAB>top5
/// <TAB>top10` line per row with 4-decimal fractions; a rank without a value
/// is written `---`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub caption: String,
    /// Heading of the label column, e.g. `Method` or `k`.
    pub row_header: String,
    pub rows: Vec<ReportRow>,
}

fn check_field(what: &str, value: &str) -> Result<()> {
    if value.contains(['\t', '\n', '\r']) {
        return Err(Error::InvalidData(format!(
            "{what} {value:?} contains a tab or newline"
        )));
    }
    Ok(())
}

impl Report {
    pub fn new(caption: impl Into<String>, row_header: impl Into<String>) -> Self {
        Self {
            caption: caption.into(),
            row_header: row_header.into(),
            rows: Vec::new(),
        }
    }

    pub fn push<T: Scalar>(&mut self, label: impl Into<String>, result: &EvalResult<T>) {
        self.rows.push(ReportRow::from_result(label, result));
    }

    pub fn render_table(&self) -> String {
        let width = self
            .rows
            .iter()
            .map(|r| r.label.len())
            .chain([self.row_header.len(), 12])
            .max()
            .unwrap_or(12);
        let mut out = String::new();
        writeln!(out, "{}", self.caption).unwrap();
        writeln!(
            out,
            "(AP is non-interpolated: mean precision at each correct match)"
        )
        .unwrap();
        write!(out, "{:<width$}  {:>6}", self.row_header, "mAP").unwrap();
        for r in DEFAULT_RANKS {
            write!(out, " {:>6}", format!("top{r}")).unwrap();
        }
        out.push('\n');
        for row in &self.rows {
            write!(
                out,
                "{:<width$}  {:>6}",
                row.label,
                format!("{:.2}", row.map * 100.0)
            )
            .unwrap();
            for r in DEFAULT_RANKS {
                let cell = row
                    .cmc
                    .get(&r)
                    .map_or_else(|| MISSING.to_string(), |v| format!("{:.2}", v * 100.0));
                write!(out, " {cell:>6}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn to_machine(&self) -> Result<String> {
        check_field("caption", &self.caption)?;
        check_field("row header", &self.row_header)?;
        let mut out = format!(
            "{REPORT_MAGIC}\tversion={REPORT_VERSION}\tap=non-interpolated\tcaption={}\trows={}\n",
            self.caption, self.row_header
        );
        for row in &self.rows {
            check_field("label", &row.label)?;
            if row.label.is_empty() || row.label.starts_with('#') {
                return Err(Error::InvalidData(format!(
                    "invalid row label {:?}",
                    row.label
                )));
            }
            write!(out, "{}\t{:.4}", row.label, row.map).unwrap();
            for r in DEFAULT_RANKS {
                match row.cmc.get(&r) {
                    Some(v) => write!(out, "\t{v:.4}").unwrap(),
                    None => write!(out, "\t{MISSING}").unwrap(),
                }
            }
            out.push('\n');
        }
        Ok(out)
    }

    pub fn parse_machine(text: &str, origin: &str) -> Result<Self> {
        let err = |line: usize, reason: String| Error::Parse {
            path: origin.to_string(),
            line,
            reason,
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| err(1, "missing header".into()))?;
        let mut fields = header.split('\t');
        if fields.next() != Some(REPORT_MAGIC) {
            return Err(err(1, format!("expected `{REPORT_MAGIC}` header")));
        }
        let mut report = Report::default();
        for field in fields {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| err(1, format!("malformed header field `{field}`")))?;
            match key {
                "version" if value == REPORT_VERSION.to_string() => {}
                "version" => return Err(err(1, format!("unsupported report version {value}"))),
                "ap" => {}
                "caption" => report.caption = value.to_string(),
                "rows" => report.row_header = value.to_string(),
                other => return Err(err(1, format!("unknown header field `{other}`"))),
            }
        }
        for (i, line) in lines {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 2 + DEFAULT_RANKS.len() {
                return Err(err(
                    i + 1,
                    format!("expected 5 columns, found {}", cols.len()),
                ));
            }
            let number = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| err(i + 1, format!("`{s}`: {e}")))
            };
            let map = number(cols[1])?;
            let mut cmc = BTreeMap::new();
            for (&r, cell) in DEFAULT_RANKS.iter().zip(&cols[2..]) {
                if *cell != MISSING {
                    cmc.insert(r, number(cell)?);
                }
            }
            report.rows.push(ReportRow {
                label: cols[0].to_string(),
                map,
                cmc,
            });
        }
        Ok(report)
    }
}
