//! Raw field dumps.
//!
//! Layout: a 32-byte header (`b"DNLSFLD1"`, `N1`, `N2`, `N3` as little-endian
//! `u32`, the time as little-endian `f64`, 4 zero bytes) followed by the
//! field values as little-endian `(re, im)` pairs of `f64`, x-index fastest.
//! This is a debugging aid, not a stable format.

use std::io::{self, Read, Write};

use dnls_core::{Complex64, Field, Grid3};

pub const MAGIC: &[u8; 8] = b"DNLSFLD1";
pub const HEADER_LEN: usize = 32;

pub fn write_snapshot<W: Write>(mut w: W, field: &Field, time: f64) -> io::Result<()> {
    let mut header = [0u8; HEADER_LEN];
    header[..8].copy_from_slice(MAGIC);
    for (axis, &n) in field.grid().counts().iter().enumerate() {
        let n = u32::try_from(n).map_err(|_| io::Error::other("grid too large"))?;
        header[8 + 4 * axis..12 + 4 * axis].copy_from_slice(&n.to_le_bytes());
    }
    header[20..28].copy_from_slice(&time.to_le_bytes());
    w.write_all(&header)?;
    let mut buf = Vec::with_capacity(16 * field.len());
    for v in field.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    w.flush()
}

/// Read a dump back. The domain lengths are not stored, so the caller
/// supplies them.
pub fn read_snapshot<R: Read>(mut r: R, lengths: [f64; 3]) -> io::Result<(Field, f64)> {
    let invalid = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header)?;
    if &header[..8] != MAGIC {
        return Err(invalid("bad magic".into()));
    }
    let count = |axis: usize| {
        let bytes: [u8; 4] = header[8 + 4 * axis..12 + 4 * axis].try_into().unwrap();
        u32::from_le_bytes(bytes) as usize
    };
    let time = f64::from_le_bytes(header[20..28].try_into().unwrap());
    let grid =
        Grid3::new([count(0), count(1), count(2)], lengths).map_err(|e| invalid(e.to_string()))?;
    let mut data = vec![0u8; 16 * grid.len()];
    r.read_exact(&mut data)?;
    let values = data
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    let field = Field::new(grid, values).map_err(|e| invalid(e.to_string()))?;
    Ok((field, time))
}
