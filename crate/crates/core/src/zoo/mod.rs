//! Concrete ontological models and a catalogue of the standard examples.

mod bb;
mod bell2;
pub mod fixtures;
mod ks;
mod ws;

pub use bb::{make_bb, BbModel};
pub use bell2::{is_canonical, make_bell2, Bell2Model};
pub use ks::{make_ks, CosineLaw, KsModel};
pub use ws::{make_ws, winner, WsModel};

use crate::error::{Error, Result};
use crate::framework::OntologicalModel;

/// One catalogued model with its claimed properties.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CatalogueEntry {
    pub row: usize,
    pub name: &'static str,
    pub kind: &'static str,
    pub reciprocity: bool,
    pub determinism: bool,
    pub contextual: bool,
    /// Registry spec of the implementation, if there is one.
    pub registry: Option<&'static str>,
}

const fn entry(
    row: usize,
    name: &'static str,
    kind: &'static str,
    [reciprocity, determinism, contextual]: [bool; 3],
    registry: Option<&'static str>,
) -> CatalogueEntry {
    CatalogueEntry {
        row,
        name,
        kind,
        reciprocity,
        determinism,
        contextual,
        registry,
    }
}

/// The standard examples. Rows without a registry spec are listed for
/// reference only.
pub const CATALOGUE: [CatalogueEntry; 7] = [
    entry(
        1,
        "B-B",
        "ontic-complete",
        [true, false, false],
        Some("bb:3"),
    ),
    entry(2, "K-S", "epistemic (d=2)", [true, true, false], Some("ks")),
    entry(3, "Aaronson", "ontic-supplem.", [true, false, true], None),
    entry(4, "Bell 1st", "ontic-supplem.", [false, true, true], None),
    entry(
        5,
        "Bell 2nd",
        "ontic-supplem. (d=2)",
        [false, true, false],
        Some("bell2"),
    ),
    entry(
        6,
        "Aerts",
        "ontic-complete (d=2)",
        [true, false, false],
        None,
    ),
    entry(
        7,
        "W-S",
        "ontic-supplem.",
        [false, true, true],
        Some("ws:3"),
    ),
];

/// Registry names of the implemented models.
pub const NAMES: [&str; 4] = ["bb", "ks", "bell2", "ws"];

/// Looks up a model by `name` or `name:dim`.
pub fn from_name(spec: &str) -> Result<Box<dyn OntologicalModel>> {
    let unknown = || Error::UnknownModel(spec.to_string());
    let (name, dim) = match spec.split_once(':') {
        Some((n, d)) => (n, Some(d.parse::<usize>().map_err(|_| unknown())?)),
        None => (spec, None),
    };
    let fixed = |model: &str, d: Option<usize>| match d {
        None | Some(2) => Ok(()),
        Some(dim) => Err(Error::UnsupportedDim {
            model: model.into(),
            dim,
        }),
    };
    let at_least_two = |model: &str, d: usize| {
        if d >= 2 {
            Ok(d)
        } else {
            Err(Error::UnsupportedDim {
                model: model.into(),
                dim: d,
            })
        }
    };
    match name {
        "bb" => Ok(Box::new(make_bb(at_least_two("bb", dim.unwrap_or(3))?))),
        "ks" => fixed("ks", dim).map(|_| Box::new(make_ks()) as Box<dyn OntologicalModel>),
        "bell2" => fixed("bell2", dim).map(|_| Box::new(make_bell2()) as Box<dyn OntologicalModel>),
        "ws" => Ok(Box::new(make_ws(at_least_two("ws", dim.unwrap_or(3))?))),
        "aaronson" | "bell1" | "aerts" => Err(Error::NotImplemented(name.into())),
        _ => Err(unknown()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names() {
        assert_eq!(from_name("bb").unwrap().name(), "bb:3");
        assert_eq!(from_name("bb:5").unwrap().dim(), 5);
        assert_eq!(from_name("ws:2").unwrap().name(), "ws:2");
        assert_eq!(from_name("ks:2").unwrap().dim(), 2);
        assert!(matches!(
            from_name("ks:3"),
            Err(Error::UnsupportedDim { .. })
        ));
        assert!(matches!(
            from_name("bb:1"),
            Err(Error::UnsupportedDim { .. })
        ));
        assert!(matches!(from_name("aerts"), Err(Error::NotImplemented(_))));
        assert!(matches!(from_name("nope"), Err(Error::UnknownModel(_))));
        assert!(matches!(from_name("bb:x"), Err(Error::UnknownModel(_))));
        for e in CATALOGUE.iter().filter_map(|e| e.registry) {
            from_name(e).unwrap();
        }
    }

    #[test]
    fn declared_rows_match_catalogue() {
        for e in &CATALOGUE {
            if let Some(spec) = e.registry {
                let d = from_name(spec).unwrap().declared();
                assert_eq!(
                    (
                        d.reciprocal,
                        d.outcome_deterministic,
                        d.measurement_contextual
                    ),
                    (e.reciprocity, e.determinism, e.contextual),
                    "{}",
                    e.name
                );
            }
        }
    }
}
