use std::fs::File;
use std::io::Write;
use std::path::Path;

use super::{BenchConfig, BenchRow};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 9] = [
    "nodes",
    "method",
    "graph_seed",
    "run_seed",
    "cut_percent",
    "imbalance_percent",
    "cut_weight",
    "runtime_ms",
    "status",
];

fn comment(cfg: &BenchConfig) -> String {
    format!(
        "# {} graphs_per_size={} seeds_per_graph={}\n",
        cfg.family, cfg.graphs_per_size, cfg.seeds_per_graph
    )
}

fn write_rows<W: Write>(out: W, rows: &[BenchRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.nodes.to_string(),
            r.method.to_string(),
            r.graph_seed.to_string(),
            r.run_seed.to_string(),
            format!("{:.2}", r.cut_percent),
            format!("{:.2}", r.imbalance_percent),
            r.cut_weight.to_string(),
            format!("{:.3}", r.runtime_ms),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// The CSV text: one `#` comment line naming the graph family, the header,
/// then one line per row.
pub fn format_csv(cfg: &BenchConfig, rows: &[BenchRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::EmptyRows);
    }
    let mut buf = comment(cfg).into_bytes();
    write_rows(&mut buf, rows).expect("writing to memory cannot fail");
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn emit_csv(cfg: &BenchConfig, rows: &[BenchRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if rows.is_empty() {
        return Err(Error::EmptyRows);
    }
    let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(comment(cfg).as_bytes())
        .map_err(|e| Error::io(path, e))?;
    write_rows(file, rows).map_err(|source| Error::Csv {
        path: path.into(),
        source,
    })
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: usize) -> Result<T> {
    let raw = &rec[i];
    raw.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad {} `{raw}`", CSV_HEADER[i]),
    })
}

/// Parses text produced by [`format_csv`]; comment lines are skipped.
pub fn parse_csv(text: &str) -> Result<Vec<BenchRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let parse_err = |e: csv::Error| Error::Parse {
        line: e.position().map_or(0, |p| p.line() as usize),
        msg: e.to_string(),
    };
    let header = reader.headers().map_err(parse_err)?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unexpected header `{}`", header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(parse_err)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        rows.push(BenchRow {
            nodes: field(&rec, 0, line)?,
            method: rec[1].parse()?,
            graph_seed: field(&rec, 2, line)?,
            run_seed: field(&rec, 3, line)?,
            cut_percent: field(&rec, 4, line)?,
            imbalance_percent: field(&rec, 5, line)?,
            cut_weight: field(&rec, 6, line)?,
            runtime_ms: field(&rec, 7, line)?,
            status: rec[8].to_string(),
        });
    }
    Ok(rows)
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<BenchRow>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text)
}
