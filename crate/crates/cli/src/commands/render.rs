//! `mansion render`: decode a stored label map and write PNG/SVG views.

use super::read_text;
use crate::CliError;
use mansion_core::geometry::io::{decode_rle, encode_png, map_to_svg};
use std::path::Path;

pub fn run(map_path: &Path, png: Option<&Path>, svg: Option<&Path>) -> Result<(), CliError> {
    let map = decode_rle(&read_text(map_path)?).map_err(|e| CliError::Parse(e.to_string()))?;
    if png.is_none() && svg.is_none() {
        return Err(CliError::Parse("nothing to do: pass --png and/or --svg".into()));
    }
    if let Some(path) = png {
        std::fs::write(path, encode_png(&map))?;
    }
    if let Some(path) = svg {
        std::fs::write(path, map_to_svg(&map, &[], &[]))?;
    }
    Ok(())
}
