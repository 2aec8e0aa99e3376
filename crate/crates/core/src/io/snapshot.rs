//! Snapshot layout (little endian): magic "GMHD2D\0" plus one zero byte, u32 version, u32 n,
//! u32 reserved, f64 time, then n² values of ω and n² values of j in real space, row-major
//! with x2 as the row index.

use std::fs;
use std::path::Path;

use thiserror::Error;

pub const MAGIC: [u8; 8] = *b"GMHD2D\0\0";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 28;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("corrupt snapshot: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub n: usize,
    pub t: f64,
    pub omega: Vec<f64>,
    pub j: Vec<f64>,
}

impl Snapshot {
    pub fn file_len(n: usize) -> usize {
        HEADER_LEN + 16 * n * n
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        assert_eq!(self.omega.len(), self.n * self.n);
        assert_eq!(self.j.len(), self.n * self.n);
        let mut b = Vec::with_capacity(Self::file_len(self.n));
        b.extend_from_slice(&MAGIC);
        b.extend_from_slice(&VERSION.to_le_bytes());
        b.extend_from_slice(&(self.n as u32).to_le_bytes());
        b.extend_from_slice(&0u32.to_le_bytes());
        b.extend_from_slice(&self.t.to_le_bytes());
        for v in self.omega.iter().chain(&self.j) {
            b.extend_from_slice(&v.to_le_bytes());
        }
        b
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self, SnapshotError> {
        let corrupt = |m: &str| SnapshotError::Corrupt(m.to_string());
        if b.len() < HEADER_LEN {
            return Err(corrupt("shorter than header"));
        }
        if b[..8] != MAGIC {
            return Err(corrupt("bad magic"));
        }
        let u32_at = |o: usize| u32::from_le_bytes(b[o..o + 4].try_into().unwrap());
        let version = u32_at(8);
        if version != VERSION {
            return Err(SnapshotError::Corrupt(format!("unsupported version {version}")));
        }
        let n = u32_at(12) as usize;
        if n == 0 || b.len() != Self::file_len(n) {
            return Err(SnapshotError::Corrupt(format!("size {} does not match n = {n}", b.len())));
        }
        let t = f64::from_le_bytes(b[20..28].try_into().unwrap());
        let vals: Vec<f64> =
            b[HEADER_LEN..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        let (omega, j) = vals.split_at(n * n);
        Ok(Self { n, t, omega: omega.to_vec(), j: j.to_vec() })
    }

    pub fn write(&self, path: &Path) -> Result<(), SnapshotError> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self, SnapshotError> {
        Self::from_bytes(&fs::read(path)?)
    }
}

pub fn snapshot_name(index: u64) -> String {
    format!("snap_{index:06}.bin")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Snapshot {
        Snapshot {
            n: 4,
            t: 0.5,
            omega: (0..16).map(|i| i as f64).collect(),
            j: (0..16).map(|i| -(i as f64) / 3.0).collect(),
        }
    }

    #[test]
    fn round_trip_and_size() {
        let s = sample();
        let b = s.to_bytes();
        assert_eq!(b.len(), 28 + 16 * 16);
        assert_eq!(&b[..8], b"GMHD2D\0\0");
        assert_eq!(Snapshot::from_bytes(&b).unwrap(), s);
    }

    #[test]
    fn corrupt_inputs() {
        let b = sample().to_bytes();
        assert!(matches!(Snapshot::from_bytes(&b[..b.len() - 1]), Err(SnapshotError::Corrupt(_))));
        assert!(matches!(Snapshot::from_bytes(&b[..10]), Err(SnapshotError::Corrupt(_))));
        let mut m = b.clone();
        m[0] = b'X';
        assert!(matches!(Snapshot::from_bytes(&m), Err(SnapshotError::Corrupt(_))));
        let mut v = b;
        v[8] = 9;
        assert!(matches!(Snapshot::from_bytes(&v), Err(SnapshotError::Corrupt(_))));
    }
}
