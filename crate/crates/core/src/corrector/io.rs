use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corrector::grid::{GridField, PeriodicGrid};
use crate::error::{invalid, Error, Result};
use crate::io::write_atomic;

/// JSON sidecar describing a flat little-endian `f64` array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSidecar {
    pub d: usize,
    #[serde(rename = "L")]
    pub side: f64,
    pub n: usize,
    pub origin: f64,
    pub components: usize,
    /// Always `row-major` (last axis fastest, components outermost).
    pub ordering: String,
    pub dtype: String,
}

fn paths(base: &Path) -> (PathBuf, PathBuf) {
    (base.with_extension("bin"), base.with_extension("json"))
}

/// Writes `base.bin` and `base.json`.
pub fn write_grid_field(field: &GridField, base: &Path) -> Result<()> {
    let (bin, json) = paths(base);
    let g = &field.grid;
    let side = GridSidecar {
        d: g.dim(),
        side: g.side(),
        n: g.nodes_per_axis(),
        origin: g.origin(),
        components: field.components,
        ordering: "row-major".into(),
        dtype: "f64-le".into(),
    };
    let bytes: Vec<u8> = field.values.iter().flat_map(|v| v.to_le_bytes()).collect();
    write_atomic(&bin, &bytes)?;
    let text = serde_json::to_string_pretty(&side).map_err(|e| Error::Parse(e.to_string()))?;
    write_atomic(&json, text.as_bytes())
}

/// Reads a field written by [`write_grid_field`].
pub fn read_grid_field(base: &Path) -> Result<GridField> {
    let (bin, json) = paths(base);
    let text = fs::read_to_string(&json).map_err(|source| Error::Read {
        path: json.clone(),
        source,
    })?;
    let side: GridSidecar = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    if side.ordering != "row-major" || side.dtype != "f64-le" {
        return Err(invalid("unsupported grid layout"));
    }
    let grid = PeriodicGrid::with_origin(side.d, side.side, side.n, side.origin)?;
    let bytes = fs::read(&bin).map_err(|source| Error::Read {
        path: bin.clone(),
        source,
    })?;
    if bytes.len() % 8 != 0 {
        return Err(invalid(
            "binary grid file is not a whole number of f64 values",
        ));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    GridField::new(&grid, side.components, values)
}
