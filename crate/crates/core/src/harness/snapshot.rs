//! Binary field snapshots.
//!
//! Layout (all little-endian): the 4-byte magic `BSQ2`, a `u32` format
//! version, `nx` and `ny` as `u32`, then `Lx`, `Ly`, `epsilon` and the
//! snapshot time as `f64`, followed by the three physical fields
//! (surface, then the two velocity components) in row-major order as
//! `f64`. Writing and re-reading a snapshot is bit-exact.

use std::io::{Read as _, Write as _};
use std::path::Path;

use ndarray::Array2;

use crate::diag::PhysicalState;
use crate::error::{Error, Result};
use crate::spectral::{Grid2D, SpectralField};

pub const SNAPSHOT_MAGIC: [u8; 4] = *b"BSQ2";
pub const SNAPSHOT_VERSION: u32 = 1;

/// A snapshot decoupled from the spectral representation: the physical
/// samples plus the metadata needed to rebuild the state.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub state: PhysicalState,
    pub epsilon: f64,
    pub t: f64,
}

fn push_f64(buf: &mut Vec<u8>, v: f64) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn push_field(buf: &mut Vec<u8>, f: &SpectralField) {
    for v in f.to_physical().iter() {
        push_f64(buf, *v);
    }
}

/// Serialise `state` at time `t` to `path`.
pub fn write_snapshot(path: &Path, state: &PhysicalState, epsilon: f64, t: f64) -> Result<()> {
    let grid = state.grid();
    let mut buf = Vec::with_capacity(48 + 24 * grid.nx() * grid.ny());
    buf.extend_from_slice(&SNAPSHOT_MAGIC);
    buf.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(grid.nx() as u32).to_le_bytes());
    buf.extend_from_slice(&(grid.ny() as u32).to_le_bytes());
    push_f64(&mut buf, grid.lx());
    push_f64(&mut buf, grid.ly());
    push_f64(&mut buf, epsilon);
    push_f64(&mut buf, t);
    push_field(&mut buf, &state.eta);
    push_field(&mut buf, &state.v1);
    push_field(&mut buf, &state.v2);
    let mut file = std::fs::File::create(path)?;
    file.write_all(&buf)?;
    Ok(())
}

fn read_u32(bytes: &mut impl std::io::Read) -> Result<u32> {
    let mut b = [0u8; 4];
    bytes.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64(bytes: &mut impl std::io::Read) -> Result<f64> {
    let mut b = [0u8; 8];
    bytes.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// Read a snapshot back; validates the magic, version and payload size.
pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let mut file = std::fs::File::open(path)?;
    let mut magic = [0u8; 4];
    file.read_exact(&mut magic)?;
    if magic != SNAPSHOT_MAGIC {
        return Err(Error::SnapshotFormat(format!(
            "bad magic {magic:?}, expected {SNAPSHOT_MAGIC:?}"
        )));
    }
    let version = read_u32(&mut file)?;
    if version != SNAPSHOT_VERSION {
        return Err(Error::SnapshotFormat(format!(
            "unsupported version {version}, expected {SNAPSHOT_VERSION}"
        )));
    }
    let nx = read_u32(&mut file)? as usize;
    let ny = read_u32(&mut file)? as usize;
    let lx = read_f64(&mut file)?;
    let ly = read_f64(&mut file)?;
    let epsilon = read_f64(&mut file)?;
    let t = read_f64(&mut file)?;
    let grid = Grid2D::new(nx, ny, lx, ly)
        .map_err(|e| Error::SnapshotFormat(format!("invalid grid header: {e}")))?;
    let mut read_field = || -> Result<SpectralField> {
        let mut data = vec![0.0f64; nx * ny];
        for v in &mut data {
            *v = read_f64(&mut file)?;
        }
        let arr = Array2::from_shape_vec((nx, ny), data)
            .map_err(|e| Error::SnapshotFormat(e.to_string()))?;
        SpectralField::from_physical(grid.clone(), &arr)
    };
    let eta = read_field()?;
    let v1 = read_field()?;
    let v2 = read_field()?;
    let mut trailing = [0u8; 1];
    if file.read(&mut trailing)? != 0 {
        return Err(Error::SnapshotFormat("trailing bytes after payload".into()));
    }
    Ok(Snapshot {
        state: PhysicalState::new(eta, v1, v2)?,
        epsilon,
        t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{build_initial, InitialSpec};

    #[test]
    fn round_trip_is_bit_exact() {
        let grid = Grid2D::new(32, 48, 10.0, 14.0).unwrap();
        let u = build_initial(
            &grid,
            &InitialSpec::RandomBandlimited {
                band: 3.0,
                amplitude: 0.7,
            },
            11,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.bsq");
        write_snapshot(&path, &u, 0.25, 1.5).unwrap();
        let snap = read_snapshot(&path).unwrap();
        assert_eq!(snap.epsilon, 0.25);
        assert_eq!(snap.t, 1.5);
        assert!(snap.state.grid().same_as(&grid));
        // The payload encodes the physical samples bit for bit.
        let bytes = std::fs::read(&path).unwrap();
        let eta = u.eta.to_physical();
        for (i, v) in eta.iter().enumerate() {
            let off = 48 + 8 * i;
            let stored = f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
            assert_eq!(stored.to_bits(), v.to_bits());
        }
        // The reconstructed state matches to spectral round-trip accuracy.
        let diff = (&snap.state.eta - &u.eta).max_abs();
        assert!(diff < 1e-12, "round-trip error {diff:.3e}");
        // Writing twice from the same state is deterministic.
        let path2 = dir.path().join("state2.bsq");
        write_snapshot(&path2, &u, 0.25, 1.5).unwrap();
        assert_eq!(bytes, std::fs::read(&path2).unwrap());
    }

    #[test]
    fn corrupt_headers_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.bsq");
        std::fs::write(&path, b"NOPE").unwrap();
        assert!(read_snapshot(&path).is_err());

        let grid = Grid2D::new(8, 8, 4.0, 4.0).unwrap();
        let u = PhysicalState::zeros(grid);
        let good = dir.path().join("good.bsq");
        write_snapshot(&good, &u, 0.1, 0.0).unwrap();
        // Flip the version field.
        let mut bytes = std::fs::read(&good).unwrap();
        bytes[4] = 0xFF;
        std::fs::write(&good, &bytes).unwrap();
        assert!(read_snapshot(&good).is_err());

        // Truncated payload.
        let trunc = dir.path().join("trunc.bsq");
        write_snapshot(&trunc, &PhysicalState::zeros(Grid2D::new(8, 8, 4.0, 4.0).unwrap()), 0.1, 0.0)
            .unwrap();
        let bytes = std::fs::read(&trunc).unwrap();
        std::fs::write(&trunc, &bytes[..bytes.len() - 9]).unwrap();
        assert!(read_snapshot(&trunc).is_err());
    }
}
