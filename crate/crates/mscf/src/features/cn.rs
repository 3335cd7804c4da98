//! Color-names lookup table: 32768 quantized RGB bins, each mapped to a
//! 10-dimensional color-name probability row.
//!
//! File format: 32768 x 10 little-endian 32-bit floats (1,310,720 bytes),
//! row-major, row index = (r >> 3) | (g >> 3) << 5 | (b >> 3) << 10.

use std::path::Path;

use crate::error::{MscfError, Result};

pub const CN_ROWS: usize = 32768;
pub const CN_DIMS: usize = 10;

#[derive(Debug, Clone)]
pub struct CnTable {
    rows: Vec<[f64; CN_DIMS]>,
}

impl CnTable {
    pub fn from_rows(rows: Vec<[f64; CN_DIMS]>) -> Result<CnTable> {
        if rows.len() != CN_ROWS {
            return Err(MscfError::invalid(format!(
                "color-names table must have {CN_ROWS} rows, got {}",
                rows.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            if !row.iter().all(|v| (0.0..=1.0).contains(v)) || (sum - 1.0).abs() > 1e-3 {
                return Err(MscfError::invalid(format!(
                    "color-names row {i} is not a probability vector (sum {sum})"
                )));
            }
        }
        Ok(CnTable { rows })
    }

    pub fn load(path: &Path) -> Result<CnTable> {
        let bytes = std::fs::read(path).map_err(|e| MscfError::io(path, e))?;
        let expected = CN_ROWS * CN_DIMS * 4;
        if bytes.len() != expected {
            return Err(MscfError::invalid(format!(
                "color-names table {} has {} bytes, expected {expected}",
                path.display(),
                bytes.len()
            )));
        }
        let mut rows = Vec::with_capacity(CN_ROWS);
        for r in 0..CN_ROWS {
            let mut row = [0.0f64; CN_DIMS];
            for (d, slot) in row.iter_mut().enumerate() {
                let off = (r * CN_DIMS + d) * 4;
                let raw = [bytes[off], bytes[off + 1], bytes[off + 2], bytes[off + 3]];
                *slot = f32::from_le_bytes(raw) as f64;
            }
            rows.push(row);
        }
        CnTable::from_rows(rows)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut bytes = Vec::with_capacity(CN_ROWS * CN_DIMS * 4);
        for row in &self.rows {
            for &v in row {
                bytes.extend_from_slice(&(v as f32).to_le_bytes());
            }
        }
        std::fs::write(path, bytes).map_err(|e| MscfError::io(path, e))
    }

    #[inline]
    pub fn index(r: u8, g: u8, b: u8) -> usize {
        (r as usize >> 3) | ((g as usize >> 3) << 5) | ((b as usize >> 3) << 10)
    }

    #[inline]
    pub fn lookup(&self, r: u8, g: u8, b: u8) -> &[f64; CN_DIMS] {
        &self.rows[Self::index(r, g, b)]
    }

    /// Deterministic synthetic table for tests: each row is a smooth
    /// probability vector derived from the quantized color.
    pub fn test_table() -> CnTable {
        let mut rows = Vec::with_capacity(CN_ROWS);
        for i in 0..CN_ROWS {
            let mut row = [0.0f64; CN_DIMS];
            let mut sum = 0.0;
            for (d, slot) in row.iter_mut().enumerate() {
                let x = ((i * 31 + d * 97 + 13) % 101) as f64 + 1.0;
                *slot = x;
                sum += x;
            }
            for slot in row.iter_mut() {
                *slot /= sum;
            }
            rows.push(row);
        }
        CnTable { rows }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_packs_five_bits_per_channel() {
        assert_eq!(CnTable::index(0, 0, 0), 0);
        assert_eq!(CnTable::index(255, 0, 0), 31);
        assert_eq!(CnTable::index(0, 255, 0), 31 << 5);
        assert_eq!(CnTable::index(0, 0, 255), 31 << 10);
        assert_eq!(CnTable::index(255, 255, 255), CN_ROWS - 1);
    }

    #[test]
    fn file_round_trip_preserves_rows() {
        let table = CnTable::test_table();
        let dir = std::env::temp_dir().join("mscf_cn_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cn_table.bin");
        table.save(&path).unwrap();
        let back = CnTable::load(&path).unwrap();
        for (a, b) in table.rows.iter().zip(back.rows.iter()) {
            for (x, y) in a.iter().zip(b.iter()) {
                assert!((x - y).abs() < 1e-6); // f32 storage precision
            }
        }
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn malformed_size_is_rejected() {
        let dir = std::env::temp_dir().join("mscf_cn_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cn_bad.bin");
        std::fs::write(&path, [0u8; 100]).unwrap();
        assert!(CnTable::load(&path).is_err());
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn rows_must_be_probabilities() {
        let mut rows = vec![[0.1f64; CN_DIMS]; CN_ROWS];
        rows[5] = [0.5; CN_DIMS]; // sums to 5
        assert!(CnTable::from_rows(rows).is_err());
    }
}
