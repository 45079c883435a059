//! Long-format plot series "series,x,y,stderr" from JSON summaries.

use std::fs;
use std::path::Path;

use serde_json::Value;

use crate::config::ExperimentConfig;
use crate::error::CliError;

struct Row {
    series: &'static str,
    x: String,
    y: String,
    stderr: String,
}

fn malformed(path: &Path, what: &str) -> CliError {
    CliError::Config(format!("{}: malformed input, {what}", path.display()))
}

fn field<'v>(v: &'v Value, key: &str, path: &Path) -> Result<&'v Value, CliError> {
    v.get(key).ok_or_else(|| malformed(path, &format!("missing {key:?}")))
}

fn num(v: &Value, key: &str, path: &Path) -> Result<String, CliError> {
    field(v, key, path)?
        .as_f64()
        .map(|x| x.to_string())
        .ok_or_else(|| malformed(path, &format!("{key:?} is not a number")))
}

fn array<'v>(v: &'v Value, key: &str, path: &Path) -> Result<&'v Vec<Value>, CliError> {
    field(v, key, path)?
        .as_array()
        .ok_or_else(|| malformed(path, &format!("{key:?} is not an array")))
}

fn rows_for(path: &Path, doc: &Value) -> Result<Vec<Row>, CliError> {
    let kind = field(doc, "kind", path)?.as_str().unwrap_or_default();
    match kind {
        "bounds" => {
            let cert = field(doc, "certificate", path)?;
            let ms = array(cert, "depths", path)?;
            let bs = array(cert, "bound_values", path)?;
            if ms.len() != bs.len() {
                return Err(malformed(path, "depths and bound_values differ in length"));
            }
            ms.iter()
                .zip(bs)
                .map(|(m, b)| {
                    let (Some(m), Some(b)) = (m.as_f64(), b.as_f64()) else {
                        return Err(malformed(path, "non-numeric bound"));
                    };
                    Ok(Row {
                        series: "markov_bound",
                        x: m.to_string(),
                        y: b.to_string(),
                        stderr: String::new(),
                    })
                })
                .collect()
        }
        "consistency_gap" => {
            let table = field(doc, "table", path)?;
            let mut out = Vec::new();
            for r in array(table, "rows", path)? {
                if field(r, "gap", path)?.is_null() {
                    continue;
                }
                out.push(Row {
                    series: "gap",
                    x: num(r, "n", path)?,
                    y: num(r, "gap", path)?,
                    stderr: num(r, "stderr", path)?,
                });
            }
            Ok(out)
        }
        "simplicial" => {
            let s = field(doc, "summary", path)?;
            Ok(vec![Row {
                series: "fraction_zero",
                x: num(s, "k_max", path)?,
                y: num(s, "fraction_zero", path)?,
                stderr: num(s, "fraction_zero_stderr", path)?,
            }])
        }
        "empirical" => {
            let s = field(doc, "summary", path)?;
            Ok(vec![Row {
                series: "fraction_zero",
                x: num(doc, "K", path)?,
                y: num(s, "fraction_zero", path)?,
                stderr: num(s, "fraction_zero_stderr", path)?,
            }])
        }
        other => Err(malformed(path, &format!("unsupported kind {other:?}"))),
    }
}

pub fn run(cfg: &ExperimentConfig, dir: &Path) -> Result<(), CliError> {
    let inputs = cfg.plotdata.as_ref().and_then(|p| p.inputs.clone()).expect("resolved");
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Config(format!("csv: {e}"));
    w.write_record(["series", "x", "y", "stderr"]).map_err(csv_err)?;
    for path in &inputs {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let doc: Value = serde_json::from_str(&text).map_err(|e| malformed(path, &e.to_string()))?;
        for r in rows_for(path, &doc)? {
            w.write_record([r.series, &r.x, &r.y, &r.stderr]).map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Config(format!("csv: {e}")))?;
    let text = String::from_utf8(bytes).map_err(|e| CliError::Config(e.to_string()))?;
    fs::write(dir.join("plotdata.csv"), &text)?;
    print!("{text}");
    Ok(())
}
