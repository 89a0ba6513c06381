//! Plain-text group cache: header line `p L count`, one `a b c d` line per
//! element, and a trailing `sha256 <hex>` checksum of everything above it.

use super::{GroupElement, ModelParams};
use crate::error::{Error, Result};
use sha2::{Digest, Sha256};
use std::io::{BufWriter, Write};
use std::path::Path;

pub fn save_group(params: &ModelParams, group: &[GroupElement], path: &Path) -> Result<()> {
    let mut body = String::new();
    body.push_str(&format!(
        "{} {} {}\n",
        params.prime(),
        params.depth(),
        group.len()
    ));
    for g in group {
        body.push_str(&format!("{} {} {} {}\n", g.a, g.b, g.c, g.d));
    }
    let digest = Sha256::digest(body.as_bytes());
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    w.write_all(body.as_bytes())?;
    writeln!(w, "sha256 {}", hex_string(&digest))?;
    Ok(())
}

pub fn load_group(params: &ModelParams, path: &Path) -> Result<Vec<GroupElement>> {
    let text = std::fs::read_to_string(path)?;
    let Some((body, checksum_line)) = split_checksum(&text) else {
        return Err(Error::CacheCorrupt("missing checksum line".into()));
    };
    let digest = Sha256::digest(body.as_bytes());
    let expect = format!("sha256 {}", hex_string(&digest));
    if checksum_line.trim_end() != expect {
        return Err(Error::CacheCorrupt("checksum mismatch".into()));
    }

    let mut lines = body.lines();
    let header = lines.next().unwrap_or_default();
    let fields: Vec<&str> = header.split_whitespace().collect();
    let expected_header = format!("{} {}", params.prime(), params.depth());
    if fields.len() != 3 || format!("{} {}", fields[0], fields[1]) != expected_header {
        return Err(Error::CacheVersion {
            expected: expected_header,
            found: header.to_owned(),
        });
    }
    let count: usize = fields[2]
        .parse()
        .map_err(|_| Error::CacheCorrupt("bad count".into()))?;
    let mut out = Vec::with_capacity(count);
    for line in lines {
        let vals: Vec<u64> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::CacheCorrupt(format!("bad entry {t:?}"))))
            .collect::<Result<_>>()?;
        if vals.len() != 4 {
            return Err(Error::CacheCorrupt(format!("bad line {line:?}")));
        }
        let g = GroupElement {
            a: vals[0],
            b: vals[1],
            c: vals[2],
            d: vals[3],
        };
        if g.det(params) != 1 {
            return Err(Error::CacheCorrupt("non-unimodular entry".into()));
        }
        out.push(g);
    }
    if out.len() != count {
        return Err(Error::CacheCorrupt(format!(
            "expected {count} elements, found {}",
            out.len()
        )));
    }
    Ok(out)
}

fn split_checksum(text: &str) -> Option<(&str, &str)> {
    let trimmed = text.strip_suffix('\n').unwrap_or(text);
    let pos = trimmed.rfind('\n')?;
    let (body, last) = trimmed.split_at(pos + 1);
    last.starts_with("sha256 ").then_some((body, last))
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
