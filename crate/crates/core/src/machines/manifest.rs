//! Line-oriented `key: value` manifest for the machine corpus. One block per
//! machine, blocks separated by blank lines.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{Contract, Machine, MachineError, MachineKind, Port};
use crate::world::Cell;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub name: String,
    pub kind: MachineKind,
    pub file: String,
    pub cycle_length: u64,
    pub push_capacity: usize,
    pub contract: Contract,
    pub origin: Cell,
    pub ports: BTreeMap<String, Port>,
}

impl ManifestEntry {
    pub fn from_machine(m: &Machine) -> ManifestEntry {
        ManifestEntry {
            name: m.name.clone(),
            kind: m.kind,
            file: format!("{}.mdl", m.name),
            cycle_length: m.cycle_length,
            push_capacity: m.config.push_capacity,
            contract: m.contract,
            origin: m.origin,
            ports: m.ports.clone(),
        }
    }
}

pub fn write_manifest(entries: &[ManifestEntry]) -> String {
    let mut out = String::new();
    for (i, e) in entries.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "machine: {}", e.name);
        let _ = writeln!(out, "kind: {}", e.kind.kind_name());
        let params = e.kind.params();
        if !params.is_empty() {
            let _ = writeln!(out, "params: {params}");
        }
        let _ = writeln!(out, "file: {}", e.file);
        let _ = writeln!(out, "cycle_length: {}", e.cycle_length);
        let _ = writeln!(out, "push_capacity: {}", e.push_capacity);
        let _ = writeln!(out, "contract: {}", e.contract.name());
        let _ = writeln!(out, "origin: {} {} {}", e.origin.x, e.origin.y, e.origin.z);
        for (name, p) in &e.ports {
            let _ = writeln!(out, "port: {name} {p}");
        }
    }
    out
}

fn parse_range(s: &str, axis: &str) -> Option<(i32, i32)> {
    let (lo, hi) = s.strip_prefix(axis)?.strip_prefix('=')?.split_once("..")?;
    Some((lo.parse().ok()?, hi.parse().ok()?))
}

fn parse_port(s: &str) -> Option<(String, Port)> {
    let w: Vec<&str> = s.split_whitespace().collect();
    let [name, x, y, z] = w.as_slice() else {
        return None;
    };
    let (x, y, z) = (
        parse_range(x, "x")?,
        parse_range(y, "y")?,
        parse_range(z, "z")?,
    );
    Some((
        name.to_string(),
        Port::new(Cell::new(x.0, y.0, z.0), Cell::new(x.1, y.1, z.1)),
    ))
}

#[derive(Default)]
struct Partial {
    start: usize,
    fields: BTreeMap<String, String>,
    ports: BTreeMap<String, Port>,
}

impl Partial {
    fn finish(self) -> Result<ManifestEntry, MachineError> {
        let line = self.start;
        let err = |msg: String| MachineError::Manifest { line, msg };
        let get = |k: &str| {
            self.fields
                .get(k)
                .cloned()
                .ok_or_else(|| err(format!("missing {k}")))
        };
        let num = |k: &str| -> Result<u64, MachineError> {
            get(k)?
                .parse()
                .map_err(|_| err(format!("{k} is not a number")))
        };
        let kind = MachineKind::parse(
            &get("kind")?,
            self.fields.get("params").map_or("", String::as_str),
        )
        .map_err(|e| err(e.to_string()))?;
        let contract =
            Contract::from_name(&get("contract")?).ok_or_else(|| err("unknown contract".into()))?;
        let origin: Vec<i32> = get("origin")?
            .split_whitespace()
            .map(|v| {
                v.parse()
                    .map_err(|_| err("origin needs three integers".into()))
            })
            .collect::<Result<_, _>>()?;
        let [ox, oy, oz] = origin.as_slice() else {
            return Err(err("origin needs three integers".into()));
        };
        Ok(ManifestEntry {
            name: get("machine")?,
            kind,
            file: get("file")?,
            cycle_length: num("cycle_length")?,
            push_capacity: num("push_capacity")? as usize,
            contract,
            origin: Cell::new(*ox, *oy, *oz),
            ports: self.ports,
        })
    }
}

/// Parses a manifest; line numbers in errors are 1-based.
pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>, MachineError> {
    let mut entries = Vec::new();
    let mut current: Option<Partial> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.trim();
        if content.is_empty() {
            if let Some(p) = current.take() {
                entries.push(p.finish()?);
            }
            continue;
        }
        if content.starts_with('#') {
            continue;
        }
        let err = |msg: &str| MachineError::Manifest {
            line,
            msg: msg.to_string(),
        };
        let (key, value) = content
            .split_once(':')
            .ok_or_else(|| err("expected `key: value`"))?;
        let (key, value) = (key.trim(), value.trim());
        let p = current.get_or_insert_with(|| Partial {
            start: line,
            ..Partial::default()
        });
        match key {
            "port" => {
                let (name, port) =
                    parse_port(value).ok_or_else(|| err("port is `NAME x=a..b y=c..d z=e..f`"))?;
                p.ports.insert(name, port);
            }
            "machine" | "kind" | "params" | "file" | "cycle_length" | "push_capacity"
            | "contract" | "origin" => {
                if p.fields
                    .insert(key.to_string(), value.to_string())
                    .is_some()
                {
                    return Err(err(&format!("duplicate {key}")));
                }
            }
            other => return Err(err(&format!("unknown key {other:?}"))),
        }
    }
    if let Some(p) = current {
        entries.push(p.finish()?);
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::{corpus_kinds, make_machine};

    #[test]
    fn manifest_round_trips() {
        let entries: Vec<ManifestEntry> = corpus_kinds()
            .into_iter()
            .map(|k| ManifestEntry::from_machine(&make_machine(k).unwrap()))
            .collect();
        let text = write_manifest(&entries);
        assert_eq!(parse_manifest(&text).unwrap(), entries);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "machine: a\nkind: belt\nfile: a.mdl\ncycle_length: ten\n";
        assert!(matches!(
            parse_manifest(text),
            Err(MachineError::Manifest { line: 1, .. })
        ));
        let text = "machine: a\nbogus: 1\n";
        assert!(matches!(
            parse_manifest(text),
            Err(MachineError::Manifest { line: 2, .. })
        ));
        assert!(matches!(
            parse_manifest("port: X x=0..1\n"),
            Err(MachineError::Manifest { line: 1, .. })
        ));
    }
}
