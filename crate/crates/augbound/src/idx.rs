//! The IDX binary format: a big-endian magic word whose low byte is the number
//! of dimensions, the dimension sizes as big-endian `u32`, then unsigned bytes.

use std::path::Path;

use augbound_core::pipeline::{ImageDataset, Split};
use augbound_core::Matrix;

use crate::error::{read_file, write_file, AppError, AppResult};

pub const IMAGE_MAGIC: u32 = 2051;
pub const LABEL_MAGIC: u32 = 2049;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxArray {
    pub magic: u32,
    pub dims: Vec<usize>,
    pub data: Vec<u8>,
}

fn format(msg: impl Into<String>) -> AppError {
    AppError::Format(msg.into())
}

pub fn parse_idx(bytes: &[u8]) -> AppResult<IdxArray> {
    let word = |i: usize| -> AppResult<u32> {
        bytes
            .get(4 * i..4 * i + 4)
            .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
            .ok_or_else(|| format("truncated header"))
    };
    let magic = word(0)?;
    let ndims = match magic {
        IMAGE_MAGIC => 3,
        LABEL_MAGIC => 1,
        other => return Err(format(format!("unknown magic {other}"))),
    };
    let dims: Vec<usize> = (1..=ndims).map(|i| word(i).map(|d| d as usize)).collect::<AppResult<_>>()?;
    let header = 4 * (ndims + 1);
    let len = dims.iter().try_fold(1usize, |a, &d| a.checked_mul(d)).ok_or_else(|| format("dimension overflow"))?;
    let payload = &bytes[header..];
    if payload.len() < len {
        return Err(format(format!("truncated payload: {} of {len} bytes", payload.len())));
    }
    if payload.len() > len {
        return Err(format(format!("{} trailing bytes", payload.len() - len)));
    }
    Ok(IdxArray { magic, dims, data: payload.to_vec() })
}

pub fn encode_idx(arr: &IdxArray) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 * (arr.dims.len() + 1) + arr.data.len());
    out.extend_from_slice(&arr.magic.to_be_bytes());
    for &d in &arr.dims {
        out.extend_from_slice(&(d as u32).to_be_bytes());
    }
    out.extend_from_slice(&arr.data);
    out
}

pub fn load_idx(path: &Path) -> AppResult<IdxArray> {
    parse_idx(&read_file(path)?).map_err(|e| match e {
        AppError::Format(msg) => AppError::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_idx(path: &Path, arr: &IdxArray) -> AppResult<()> {
    write_file(path, &encode_idx(arr))
}

impl IdxArray {
    /// `(count, height, width)` and the pixels rescaled to `[0, 1]`, one image per row.
    pub fn images(&self) -> AppResult<(usize, usize, usize, Matrix)> {
        if self.magic != IMAGE_MAGIC {
            return Err(format("not an image file"));
        }
        let (n, h, w) = (self.dims[0], self.dims[1], self.dims[2]);
        let pixels = self.data.iter().map(|&b| f64::from(b) / 255.0).collect();
        Ok((n, h, w, Matrix::from_vec(n, h * w, pixels)?))
    }

    pub fn labels(&self) -> AppResult<Vec<usize>> {
        if self.magic != LABEL_MAGIC {
            return Err(format("not a label file"));
        }
        Ok(self.data.iter().map(|&b| usize::from(b)).collect())
    }
}

/// Images and labels from a pair of IDX files; classes are `0..=max label`.
pub fn load_image_dataset(images: &Path, labels: &Path, name: &str, split: Split) -> AppResult<ImageDataset> {
    let (n, h, w, pixels) = load_idx(images)?.images()?;
    let labels = load_idx(labels)?.labels()?;
    if labels.len() != n {
        return Err(format(format!("{n} images but {} labels", labels.len())));
    }
    let classes = labels.iter().max().map_or(1, |&m| m + 1);
    Ok(ImageDataset::new(name, split, h, w, pixels, labels, classes)?)
}

/// Quantizes a dataset to bytes, the inverse of [`load_image_dataset`] up to rounding.
pub fn dataset_to_idx(ds: &ImageDataset) -> AppResult<(IdxArray, IdxArray)> {
    if ds.labels.iter().any(|&l| l > 255) {
        return Err(format("labels above 255 do not fit the label format"));
    }
    let images = IdxArray {
        magic: IMAGE_MAGIC,
        dims: vec![ds.len(), ds.height, ds.width],
        data: ds.images.as_slice().iter().map(|&v| (v * 255.0).round() as u8).collect(),
    };
    let labels = IdxArray { magic: LABEL_MAGIC, dims: vec![ds.len()], data: ds.labels.iter().map(|&l| l as u8).collect() };
    Ok((images, labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let arr = IdxArray { magic: IMAGE_MAGIC, dims: vec![2, 3, 4], data: (0..24).collect() };
        let bytes = encode_idx(&arr);
        assert_eq!(bytes.len(), 24 + 16);
        assert_eq!(&bytes[..4], &[0, 0, 8, 3]);
        assert_eq!(parse_idx(&bytes).unwrap(), arr);
        let labels = IdxArray { magic: LABEL_MAGIC, dims: vec![3], data: vec![1, 0, 9] };
        let bytes = encode_idx(&labels);
        assert_eq!(&bytes[..4], &[0, 0, 8, 1]);
        assert_eq!(parse_idx(&bytes).unwrap().labels().unwrap(), vec![1, 0, 9]);
    }

    #[test]
    fn rejects_bad_files() {
        let mut bytes = encode_idx(&IdxArray { magic: LABEL_MAGIC, dims: vec![3], data: vec![1, 2, 3] });
        bytes[2] = 0x27;
        bytes[3] = 0x0f; // 9999
        assert!(matches!(parse_idx(&bytes), Err(AppError::Format(_))));
        let short = encode_idx(&IdxArray { magic: IMAGE_MAGIC, dims: vec![2, 2, 2], data: vec![0; 8] });
        assert!(matches!(parse_idx(&short[..short.len() - 1]), Err(AppError::Format(_))));
        assert!(matches!(parse_idx(&[0, 0]), Err(AppError::Format(_))));
    }
}
