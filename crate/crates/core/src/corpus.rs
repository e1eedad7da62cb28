//! The built-in benchmark pairs: a faulty implementation, a flat reference
//! of 2-input gates and a structured reference using 3-input gates.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::netlist::{parse_netlist, Netlist, NetlistError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RefStyle {
    Flat,
    Structured,
}

impl RefStyle {
    pub const ALL: [RefStyle; 2] = [RefStyle::Flat, RefStyle::Structured];

    pub fn name(self) -> &'static str {
        match self {
            RefStyle::Flat => "flat",
            RefStyle::Structured => "structured",
        }
    }
}

impl fmt::Display for RefStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RefStyle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "flat" => Ok(RefStyle::Flat),
            "structured" => Ok(RefStyle::Structured),
            _ => Err(format!("unknown reference style `{s}` (flat, structured)")),
        }
    }
}

/// Netlist sources of one benchmark.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Benchmark {
    pub name: String,
    pub faulty: String,
    pub reference: String,
    pub structured: String,
}

macro_rules! builtin {
    ($name:literal, $stem:literal) => {
        (
            $name,
            include_str!(concat!("../corpus/", $stem, "_faulty.net")),
            include_str!(concat!("../corpus/", $stem, "_ref.net")),
            include_str!(concat!("../corpus/", $stem, "_struct.net")),
        )
    };
}

const BUILTIN: [(&str, &str, &str, &str); 9] = [
    builtin!("AND", "and"),
    builtin!("NAND", "nand"),
    builtin!("OR", "or"),
    builtin!("NOR", "nor"),
    builtin!("XOR", "xor"),
    builtin!("XNOR", "xnor"),
    builtin!("MUX", "mux"),
    builtin!("CARRY", "carry"),
    builtin!("FA", "fa"),
];

/// The nine benchmarks in table order.
pub fn builtin() -> Vec<Benchmark> {
    BUILTIN
        .iter()
        .map(|&(name, f, r, s)| Benchmark {
            name: name.to_string(),
            faulty: f.to_string(),
            reference: r.to_string(),
            structured: s.to_string(),
        })
        .collect()
}

/// Case-insensitive lookup among the built-in benchmarks.
pub fn find(name: &str) -> Option<Benchmark> {
    builtin().into_iter().find(|b| b.name.eq_ignore_ascii_case(name))
}

/// Reads `<stem>_faulty.net`, `<stem>_ref.net` and `<stem>_struct.net` from
/// `dir` for every built-in benchmark name.
pub fn load_dir(dir: &Path) -> std::io::Result<Vec<Benchmark>> {
    BUILTIN
        .iter()
        .map(|&(name, ..)| {
            let stem = name.to_ascii_lowercase();
            let read = |kind: &str| std::fs::read_to_string(dir.join(format!("{stem}_{kind}.net")));
            Ok(Benchmark {
                name: name.to_string(),
                faulty: read("faulty")?,
                reference: read("ref")?,
                structured: read("struct")?,
            })
        })
        .collect()
}

impl Benchmark {
    pub fn implementation(&self) -> Result<Netlist, NetlistError> {
        parse_netlist(&self.faulty)
    }

    pub fn reference(&self, style: RefStyle) -> Result<Netlist, NetlistError> {
        parse_netlist(match style {
            RefStyle::Flat => &self.reference,
            RefStyle::Structured => &self.structured,
        })
    }

    /// `(implementation, reference)` for the given style.
    pub fn pair(&self, style: RefStyle) -> Result<(Netlist, Netlist), NetlistError> {
        Ok((self.implementation()?, self.reference(style)?))
    }
}
