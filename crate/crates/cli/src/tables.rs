//! Aligned text tables and the CSV forms the subcommands emit. Every CSV
//! writer here has a matching parser, and emit(parse(emit(x))) == emit(x).

/// Column alignment for the human-readable tables.
#[derive(Clone, Copy)]
pub enum Align {
    Left,
    Right,
}

/// Pad every column to its widest cell, two spaces between columns.
pub fn render_aligned(header: &[&str], aligns: &[Align], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    let mut push_row = |cells: &[String]| {
        let mut line = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            let pad = widths[i] - cell.len();
            match aligns[i] {
                Align::Right => {
                    line.extend(std::iter::repeat(' ').take(pad));
                    line.push_str(cell);
                }
                Align::Left => {
                    line.push_str(cell);
                    line.extend(std::iter::repeat(' ').take(pad));
                }
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    };
    let header: Vec<String> = header.iter().map(|h| h.to_string()).collect();
    push_row(&header);
    for row in rows {
        push_row(row);
    }
    out
}

/// One line of the chain table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainRow {
    pub level: usize,
    pub length: usize,
    pub dimension: usize,
    pub rate: (u64, u64),
    pub generator: String,
}

const CHAIN_HEADER: &str = "level,length,dimension,rate,generator";

pub fn chain_csv(rows: &[ChainRow]) -> String {
    let mut out = String::from(CHAIN_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}/{},{}\n",
            row.level, row.length, row.dimension, row.rate.0, row.rate.1, row.generator
        ));
    }
    out
}

pub fn parse_chain_csv(text: &str) -> Result<Vec<ChainRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(CHAIN_HEADER) => {}
        other => return Err(format!("expected header {:?}, got {:?}", CHAIN_HEADER, other)),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(format!("row {}: want 5 fields, got {}", i + 1, fields.len()));
            }
            let int = |text: &str, what: &str| {
                text.parse::<usize>()
                    .map_err(|_| format!("row {}: bad {} {:?}", i + 1, what, text))
            };
            let (num, den) = fields[3]
                .split_once('/')
                .ok_or_else(|| format!("row {}: rate {:?} is not a fraction", i + 1, fields[3]))?;
            let ratio = |text: &str| {
                text.parse::<u64>()
                    .map_err(|_| format!("row {}: bad rate part {:?}", i + 1, text))
            };
            Ok(ChainRow {
                level: int(fields[0], "level")?,
                length: int(fields[1], "length")?,
                dimension: int(fields[2], "dimension")?,
                rate: (ratio(num)?, ratio(den)?),
                generator: fields[4].to_string(),
            })
        })
        .collect()
}

/// One scheme's line of the bandwidth table: a band figure per level plus the
/// fraction of the level-0 band that the chain levels still occupy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BandwidthLine {
    pub label: String,
    pub m: u64,
    pub bands: Vec<String>,
    pub saving: String,
}

pub fn bandwidth_header(j_max: usize) -> String {
    let mut out = String::from("m,label");
    for level in 0..=j_max {
        out.push_str(&format!(",W{}", level));
    }
    out.push_str(",saving_ratio");
    out
}

pub fn bandwidth_csv(j_max: usize, lines: &[BandwidthLine]) -> String {
    let mut out = bandwidth_header(j_max);
    out.push('\n');
    for line in lines {
        out.push_str(&format!("{},{}", line.m, line.label));
        for band in &line.bands {
            out.push(',');
            out.push_str(band);
        }
        out.push(',');
        out.push_str(&line.saving);
        out.push('\n');
    }
    out
}

pub fn parse_bandwidth_csv(text: &str) -> Result<(usize, Vec<BandwidthLine>), String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty input")?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.len() < 4
        || columns[0] != "m"
        || columns[1] != "label"
        || columns[columns.len() - 1] != "saving_ratio"
    {
        return Err(format!("unexpected header {:?}", header));
    }
    let j_max = columns.len() - 4;
    for (level, column) in columns[2..columns.len() - 1].iter().enumerate() {
        if *column != format!("W{}", level) {
            return Err(format!("band column {} named {:?}", level, column));
        }
    }
    let parsed = lines
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != columns.len() {
                return Err(format!(
                    "row {}: want {} fields, got {}",
                    i + 1,
                    columns.len(),
                    fields.len()
                ));
            }
            Ok(BandwidthLine {
                m: fields[0]
                    .parse::<u64>()
                    .map_err(|_| format!("row {}: bad m {:?}", i + 1, fields[0]))?,
                label: fields[1].to_string(),
                bands: fields[2..fields.len() - 1]
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
                saving: fields[fields.len() - 1].to_string(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((j_max, parsed))
}

/// Two-column field report, the decode output form.
pub fn render_report(fields: &[(&str, String)]) -> String {
    let width = fields.iter().map(|(name, _)| name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (name, value) in fields {
        out.push_str(&format!("{:width$}  {}\n", name, value, width = width));
    }
    out
}

pub fn report_csv(fields: &[(&str, String)]) -> String {
    let mut out = String::from("field,value\n");
    for (name, value) in fields {
        out.push_str(&format!("{},{}\n", name, value));
    }
    out
}

pub fn parse_report_csv(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some("field,value") => {}
        other => return Err(format!("expected header \"field,value\", got {:?}", other)),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            line.split_once(',')
                .map(|(name, value)| (name.to_string(), value.to_string()))
                .ok_or_else(|| format!("row {}: no comma in {:?}", i + 1, line))
        })
        .collect()
}
