//! Binary dump of an assembled system `(B, c)`.
//!
//! Layout (little-endian): magic `"CSCB"`, version `u32`, `n: u32`,
//! `d: u32`, then the `N x N` matrix `B` row-major as `f64`, then the
//! right-hand side `c` as `N` further `f64`.

use std::io::{self, Read, Write};

use cscolloc::{CollocationSystem, Mat};

pub const MAGIC: &[u8; 4] = b"CSCB";
pub const VERSION: u32 = 1;

pub fn write_system<W: Write>(mut out: W, system: &CollocationSystem) -> io::Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(system.n as u32).to_le_bytes())?;
    out.write_all(&(system.d as u32).to_le_bytes())?;
    for i in 0..system.b.rows() {
        for &v in system.b.row(i) {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    for &v in &system.c {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

#[cfg_attr(not(test), allow(dead_code))] // reader half of the format, exercised by tests
pub fn read_system<R: Read>(mut input: R) -> io::Result<CollocationSystem> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "bad magic"));
    }
    let mut word = [0u8; 4];
    input.read_exact(&mut word)?;
    let version = u32::from_le_bytes(word);
    if version != VERSION {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("unsupported version {version}"),
        ));
    }
    input.read_exact(&mut word)?;
    let n = u32::from_le_bytes(word) as usize;
    input.read_exact(&mut word)?;
    let d = u32::from_le_bytes(word) as usize;
    let total = n
        .checked_pow(d as u32)
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "n^d overflows"))?;
    let mut buf = [0u8; 8];
    let mut data = Vec::with_capacity(total * total);
    for _ in 0..total * total {
        input.read_exact(&mut buf)?;
        data.push(f64::from_le_bytes(buf));
    }
    let b = Mat::from_rows(total, total, data);
    let mut c = Vec::with_capacity(total);
    for _ in 0..total {
        input.read_exact(&mut buf)?;
        c.push(f64::from_le_bytes(buf));
    }
    Ok(CollocationSystem { b, c, n, d })
}
