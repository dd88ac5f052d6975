//! Dataset exchange format, sidecar metadata and CSV import.
//!
//! A dataset file is a 32-byte little-endian header followed by the payload
//! in `series -> channel -> time` order:
//!
//! | offset | size | field                          |
//! |--------|------|--------------------------------|
//! | 0      | 4    | magic `NBTS`                   |
//! | 4      | 2    | version (`1`)                  |
//! | 6      | 1    | dtype (`0` = f32, `1` = f64)   |
//! | 7      | 4    | channels                       |
//! | 11     | 8    | n_series                       |
//! | 19     | 8    | series_len                     |
//! | 27     | 5    | reserved, zero                 |

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::TimeSeriesDataset;
use crate::error::{Error, Result};
use crate::noise::NoiseSpec;

pub const MAGIC: [u8; 4] = *b"NBTS";
pub const FORMAT_VERSION: u16 = 1;
pub const HEADER_LEN: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dtype {
    F32,
    F64,
}

impl Dtype {
    pub fn code(self) -> u8 {
        match self {
            Dtype::F32 => 0,
            Dtype::F64 => 1,
        }
    }

    pub fn size(self) -> usize {
        match self {
            Dtype::F32 => 4,
            Dtype::F64 => 8,
        }
    }

    fn from_code(code: u8) -> Option<Dtype> {
        match code {
            0 => Some(Dtype::F32),
            1 => Some(Dtype::F64),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetHeader {
    pub dtype: Dtype,
    pub channels: u32,
    pub n_series: u64,
    pub series_len: u64,
}

impl DatasetHeader {
    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut b = [0u8; HEADER_LEN];
        b[0..4].copy_from_slice(&MAGIC);
        b[4..6].copy_from_slice(&FORMAT_VERSION.to_le_bytes());
        b[6] = self.dtype.code();
        b[7..11].copy_from_slice(&self.channels.to_le_bytes());
        b[11..19].copy_from_slice(&self.n_series.to_le_bytes());
        b[19..27].copy_from_slice(&self.series_len.to_le_bytes());
        b
    }

    pub fn parse(b: &[u8]) -> Result<Self> {
        if b.len() < HEADER_LEN {
            return Err(Error::Corrupt(format!("file holds {} bytes, shorter than the header", b.len())));
        }
        if b[0..4] != MAGIC {
            return Err(Error::Format(format!("bad magic {:?}", String::from_utf8_lossy(&b[0..4]))));
        }
        let version = u16::from_le_bytes([b[4], b[5]]);
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let dtype = Dtype::from_code(b[6]).ok_or_else(|| Error::Format(format!("unknown dtype code {}", b[6])))?;
        if b[27..32].iter().any(|&v| v != 0) {
            return Err(Error::Format("reserved header bytes are not zero".into()));
        }
        Ok(DatasetHeader {
            dtype,
            channels: u32::from_le_bytes(b[7..11].try_into().unwrap()),
            n_series: u64::from_le_bytes(b[11..19].try_into().unwrap()),
            series_len: u64::from_le_bytes(b[19..27].try_into().unwrap()),
        })
    }

    /// Payload size in bytes, or `None` on overflow.
    pub fn payload_len(&self) -> Option<u64> {
        (self.channels as u64)
            .checked_mul(self.n_series)?
            .checked_mul(self.series_len)?
            .checked_mul(self.dtype.size() as u64)
    }
}

/// Writes `ds` in double precision.
pub fn write_dataset(ds: &TimeSeriesDataset, path: impl AsRef<Path>) -> Result<()> {
    write_dataset_as(ds, path, Dtype::F64)
}

pub fn write_dataset_as(ds: &TimeSeriesDataset, path: impl AsRef<Path>, dtype: Dtype) -> Result<()> {
    let header = DatasetHeader {
        dtype,
        channels: ds.channels() as u32,
        n_series: ds.n_series() as u64,
        series_len: ds.series_len() as u64,
    };
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&header.to_bytes())?;
    for chunk in ds.as_slice().chunks(8192) {
        let mut bytes = Vec::with_capacity(chunk.len() * dtype.size());
        match dtype {
            Dtype::F64 => chunk.iter().for_each(|v| bytes.extend_from_slice(&v.to_le_bytes())),
            Dtype::F32 => chunk.iter().for_each(|&v| bytes.extend_from_slice(&(v as f32).to_le_bytes())),
        }
        w.write_all(&bytes)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a dataset file block by block, for datasets too large to hold in
/// memory at once.
#[derive(Debug)]
pub struct DatasetWriter {
    w: BufWriter<File>,
    header: DatasetHeader,
    written: u64,
}

impl DatasetWriter {
    pub fn create(path: impl AsRef<Path>, channels: usize, n_series: usize, series_len: usize) -> Result<Self> {
        let header = DatasetHeader {
            dtype: Dtype::F64,
            channels: channels as u32,
            n_series: n_series as u64,
            series_len: series_len as u64,
        };
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(&header.to_bytes())?;
        Ok(DatasetWriter { w, header, written: 0 })
    }

    /// Appends the series of `block`, which must match the declared shape.
    pub fn append(&mut self, block: &TimeSeriesDataset) -> Result<()> {
        if block.channels() as u32 != self.header.channels || block.series_len() as u64 != self.header.series_len {
            return Err(Error::InvalidInput("block shape does not match the file header".into()));
        }
        if self.written + block.n_series() as u64 > self.header.n_series {
            return Err(Error::InvalidInput("more series than declared in the header".into()));
        }
        let mut bytes = Vec::with_capacity(block.as_slice().len() * 8);
        block.as_slice().iter().for_each(|v| bytes.extend_from_slice(&v.to_le_bytes()));
        self.w.write_all(&bytes)?;
        self.written += block.n_series() as u64;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        if self.written != self.header.n_series {
            return Err(Error::InvalidInput(format!(
                "wrote {} series, header declares {}",
                self.written, self.header.n_series
            )));
        }
        self.w.flush()?;
        Ok(())
    }
}

/// Parses a dataset from an in-memory file image.
pub fn decode_dataset(bytes: &[u8]) -> Result<TimeSeriesDataset> {
    let header = DatasetHeader::parse(bytes)?;
    if header.channels == 0 {
        return Err(Error::Format("header declares zero channels".into()));
    }
    let expected = header
        .payload_len()
        .ok_or_else(|| Error::Corrupt("header dimensions overflow".into()))?;
    let actual = (bytes.len() - HEADER_LEN) as u64;
    if actual != expected {
        return Err(Error::Corrupt(format!(
            "payload holds {actual} bytes, header implies {expected}"
        )));
    }
    let payload = &bytes[HEADER_LEN..];
    let data: Vec<f64> = match header.dtype {
        Dtype::F64 => payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect(),
        Dtype::F32 => payload
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
            .collect(),
    };
    TimeSeriesDataset::new(
        header.n_series as usize,
        header.channels as usize,
        header.series_len as usize,
        data,
    )
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<TimeSeriesDataset> {
    decode_dataset(&std::fs::read(path)?)
}

/// Reads a headerless numeric CSV with one single-channel series per row.
pub fn read_csv_dataset(path: impl AsRef<Path>) -> Result<TimeSeriesDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_error)?;
    let mut data = Vec::new();
    let mut width = None;
    let mut rows = 0;
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let row = r + 1;
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(Error::Parse {
                    row,
                    column: record.len().min(w) + 1,
                    message: format!("row has {} cells, expected {w}", record.len()),
                })
            }
            _ => {}
        }
        for (c, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                row,
                column: c + 1,
                message: format!("cannot parse {cell:?} as a number"),
            })?;
            data.push(v);
        }
        rows += 1;
    }
    let width = width.ok_or(Error::EmptyDataset)?;
    if width == 0 {
        return Err(Error::EmptyDataset);
    }
    TimeSeriesDataset::new(rows, 1, width, data)
}

fn csv_error(e: csv::Error) -> Error {
    let row = e.position().map_or(0, |p| p.record() as usize + 1);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse { row, column: 0, message: format!("{other:?}") },
    }
}

/// Sidecar metadata written next to a dataset file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub schema_version: u32,
    /// Generating model, for target datasets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<NoiseSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    pub generator: String,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
}

impl DatasetMeta {
    pub const SCHEMA_VERSION: u32 = 1;

    pub fn new(generator: impl Into<String>) -> Self {
        DatasetMeta {
            schema_version: Self::SCHEMA_VERSION,
            spec: None,
            master_seed: None,
            generator: generator.into(),
            params: BTreeMap::new(),
        }
    }
}

/// `<stem>.json` next to the dataset file.
pub fn sidecar_path(dataset_path: impl AsRef<Path>) -> PathBuf {
    dataset_path.as_ref().with_extension("json")
}

pub fn write_meta(meta: &DatasetMeta, path: impl AsRef<Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(meta)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_meta(path: impl AsRef<Path>) -> Result<DatasetMeta> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}
