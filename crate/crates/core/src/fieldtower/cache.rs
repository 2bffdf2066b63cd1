//! Binary serialization of a tower so repeated runs can skip table building.
//!
//! Layout (little endian): magic `SFZT`, u16 version, u32 p, u32 h,
//! u32 n, n+1 modulus coefficients (u32), u32 generator, u32 order, then the
//! log table (order words), exp table (2(order-1) words) and Zech table
//! (order-1 words).

use std::fs;
use std::io::{Cursor, Read, Write};
use std::path::{Path, PathBuf};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::tower::{smallest_irreducible, validate_params, Fe, FieldTower, DEFAULT_ORDER_BOUND};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"SFZT";
const VERSION: u16 = 1;

fn bad(msg: impl Into<String>) -> Error {
    Error::Cache(msg.into())
}

impl FieldTower {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 * self.order as usize);
        out.write_all(MAGIC).unwrap();
        out.write_u16::<LittleEndian>(VERSION).unwrap();
        for v in [self.p, self.h, self.n] {
            out.write_u32::<LittleEndian>(v).unwrap();
        }
        for &c in &self.modulus {
            out.write_u32::<LittleEndian>(c).unwrap();
        }
        out.write_u32::<LittleEndian>(self.generator.0).unwrap();
        out.write_u32::<LittleEndian>(self.order).unwrap();
        for table in [&self.log, &self.exp, &self.zech] {
            for &v in table.iter() {
                out.write_u32::<LittleEndian>(v).unwrap();
            }
        }
        out
    }

    /// Parses a serialized tower and checks it against (p, h): the header
    /// must match, the modulus must be the one [`FieldTower::build`] would
    /// pick, and the tables must be mutually consistent.
    pub fn from_bytes(bytes: &[u8], p: u32, h: u32) -> Result<Self> {
        validate_params(p, h, u64::MAX)?;
        let mut cur = Cursor::new(bytes);
        let mut magic = [0u8; 4];
        cur.read_exact(&mut magic).map_err(|_| bad("truncated header"))?;
        if &magic != MAGIC {
            return Err(bad("bad magic"));
        }
        let rd = |c: &mut Cursor<&[u8]>| c.read_u32::<LittleEndian>().map_err(|_| bad("truncated"));
        let version = cur
            .read_u16::<LittleEndian>()
            .map_err(|_| bad("truncated header"))?;
        if version != VERSION {
            return Err(bad(format!("unsupported version {version}")));
        }
        let (fp, fh, n) = (rd(&mut cur)?, rd(&mut cur)?, rd(&mut cur)?);
        if fp != p || fh != h || n != 6 * h {
            return Err(bad(format!("file holds p={fp}, h={fh}; wanted p={p}, h={h}")));
        }
        let modulus: Vec<u32> = (0..=n).map(|_| rd(&mut cur)).collect::<Result<_>>()?;
        if modulus != smallest_irreducible(p, n) {
            return Err(bad("modulus mismatch"));
        }
        let generator = Fe(rd(&mut cur)?);
        let order = rd(&mut cur)?;
        if order != p.pow(n) {
            return Err(bad("order mismatch"));
        }
        let m = (order - 1) as usize;
        let mut read_table = |len: usize| -> Result<Vec<u32>> {
            (0..len).map(|_| rd(&mut cur)).collect()
        };
        let log = read_table(order as usize)?;
        let exp = read_table(2 * m)?;
        let zech = read_table(m)?;
        if cur.position() as usize != bytes.len() {
            return Err(bad("trailing bytes"));
        }
        if exp[0] != 1 || exp[1] != generator.0 {
            return Err(bad("exp table does not start at 1, g"));
        }
        for i in 0..m {
            let v = exp[i] as usize;
            if v == 0 || v >= order as usize || log[v] as usize != i || exp[i + m] != exp[i] {
                return Err(bad("log/exp tables inconsistent"));
            }
        }
        for (k, &z) in zech.iter().enumerate() {
            let x = exp[k];
            let c0 = x % p;
            let one_plus = (x - c0 + (c0 + 1) % p) as usize;
            if z != log[one_plus] {
                return Err(bad("Zech table inconsistent"));
            }
        }
        Ok(FieldTower::assemble(p, h, modulus, generator, log, exp, zech))
    }

    pub fn cache_file_name(p: u32, h: u32) -> String {
        format!("tower-p{p}-h{h}.sfzt")
    }

    pub fn save_to_dir(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(Self::cache_file_name(self.p, self.h));
        fs::write(&path, self.to_bytes())?;
        Ok(path)
    }

    /// Loads from `dir` when a valid cache file exists, otherwise builds and
    /// writes one. A corrupt file is rebuilt rather than trusted.
    pub fn load_or_build(dir: &Path, p: u32, h: u32, bound: u64) -> Result<Self> {
        validate_params(p, h, bound)?;
        let path = dir.join(Self::cache_file_name(p, h));
        if let Ok(bytes) = fs::read(&path) {
            if let Ok(t) = Self::from_bytes(&bytes, p, h) {
                return Ok(t);
            }
        }
        let t = Self::build_with_bound(p, h, bound)?;
        t.save_to_dir(dir)?;
        Ok(t)
    }

    pub fn load_or_build_default(dir: &Path, p: u32, h: u32) -> Result<Self> {
        Self::load_or_build(dir, p, h, DEFAULT_ORDER_BOUND)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let t = FieldTower::build(3, 1).unwrap();
        let bytes = t.to_bytes();
        assert_eq!(&bytes[..4], b"SFZT");
        let back = FieldTower::from_bytes(&bytes, 3, 1).unwrap();
        assert_eq!(back.to_bytes(), bytes);
        assert_eq!(back.mul(Fe(5), Fe(7)), t.mul(Fe(5), Fe(7)));
    }

    #[test]
    fn rejects_mismatch_and_corruption() {
        let t = FieldTower::build(3, 1).unwrap();
        let bytes = t.to_bytes();
        assert!(FieldTower::from_bytes(&bytes, 5, 1).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(FieldTower::from_bytes(&bad, 3, 1).is_err());
        let mut bad_zech = bytes.clone();
        let at = bad_zech.len() - 100;
        bad_zech[at] ^= 0x01;
        assert!(FieldTower::from_bytes(&bad_zech, 3, 1).is_err());
        let mut bad_log = bytes.clone();
        bad_log[60] ^= 0x01;
        assert!(FieldTower::from_bytes(&bad_log, 3, 1).is_err());
        assert!(FieldTower::from_bytes(&bytes[..bytes.len() - 4], 3, 1).is_err());
    }

    #[test]
    fn load_or_build_writes_and_reuses() {
        let dir = tempfile::tempdir().unwrap();
        let a = FieldTower::load_or_build_default(dir.path(), 5, 1).unwrap();
        let path = dir.path().join(FieldTower::cache_file_name(5, 1));
        assert!(path.exists());
        let b = FieldTower::load_or_build_default(dir.path(), 5, 1).unwrap();
        assert_eq!(a.to_bytes(), b.to_bytes());
    }
}
