//! Checkpoint files: one flat little-endian record per node.
//!
//! Binary layout:
//!
//! ```text
//! magic        8 bytes   "SYMEMB1\0"
//! space_len    u32 LE
//! space        space_len bytes, UTF-8 space descriptor string
//! node_count   u64 LE
//! payload      node_count * space.point_len() f64 LE values
//! ```
//!
//! Per node the payload is the coordinate vector (flat/ball spaces) or the
//! row-major real part followed by the row-major imaginary part (matrix
//! spaces); product components are concatenated. A JSON form with the same
//! per-node layout is available for interoperability.

use super::EmbeddingTable;
use crate::error::{Error, Result};
use crate::geometry::codec::{decode_point, encode_point};
use crate::geometry::SpaceDescriptor;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 8] = b"SYMEMB1\0";

pub fn save_checkpoint(table: &EmbeddingTable, path: impl AsRef<Path>) -> Result<()> {
    let mut out = fs::File::create(path)?;
    out.write_all(MAGIC)?;
    let space = table.space.to_string();
    out.write_all(&(space.len() as u32).to_le_bytes())?;
    out.write_all(space.as_bytes())?;
    out.write_all(&(table.node_count() as u64).to_le_bytes())?;
    let mut flat = Vec::with_capacity(table.space.point_len());
    for point in &table.points {
        flat.clear();
        encode_point(point, &mut flat);
        for v in &flat {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<EmbeddingTable> {
    let mut file = fs::File::open(path)?;
    let mut magic = [0u8; 8];
    file.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Data("not a checkpoint file (bad magic)".into()));
    }
    let mut len4 = [0u8; 4];
    file.read_exact(&mut len4)?;
    let space_len = u32::from_le_bytes(len4) as usize;
    let mut space_bytes = vec![0u8; space_len];
    file.read_exact(&mut space_bytes)?;
    let space: SpaceDescriptor = String::from_utf8(space_bytes)
        .map_err(|_| Error::Data("checkpoint space string is not UTF-8".into()))?
        .parse()?;
    let mut len8 = [0u8; 8];
    file.read_exact(&mut len8)?;
    let node_count = u64::from_le_bytes(len8) as usize;

    let per_node = space.point_len();
    let mut payload = vec![0u8; 8 * per_node];
    let mut values = vec![0.0f64; per_node];
    let mut points = Vec::with_capacity(node_count);
    for _ in 0..node_count {
        file.read_exact(&mut payload)?;
        for (i, chunk) in payload.chunks_exact(8).enumerate() {
            values[i] = f64::from_le_bytes(chunk.try_into().unwrap());
        }
        points.push(decode_point(&space, &values)?);
    }
    Ok(EmbeddingTable { space, points, epoch: 0 })
}

#[derive(Serialize, Deserialize)]
struct JsonCheckpoint {
    space: SpaceDescriptor,
    points: Vec<Vec<f64>>,
}

pub fn save_checkpoint_json(table: &EmbeddingTable, path: impl AsRef<Path>) -> Result<()> {
    let points = table
        .points
        .iter()
        .map(|p| {
            let mut flat = Vec::with_capacity(table.space.point_len());
            encode_point(p, &mut flat);
            flat
        })
        .collect();
    let doc = JsonCheckpoint { space: table.space.clone(), points };
    fs::write(path, serde_json::to_string_pretty(&doc)?)?;
    Ok(())
}

pub fn load_checkpoint_json(path: impl AsRef<Path>) -> Result<EmbeddingTable> {
    let doc: JsonCheckpoint = serde_json::from_str(&fs::read_to_string(path)?)?;
    let points: Result<Vec<_>> =
        doc.points.iter().map(|flat| decode_point(&doc.space, flat)).collect();
    Ok(EmbeddingTable { space: doc.space, points: points?, epoch: 0 })
}
