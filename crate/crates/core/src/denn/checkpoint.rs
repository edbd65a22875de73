//! Binary checkpoints: magic, version, configuration, then every tensor as
//! little-endian `f32` in [`TENSOR_NAMES`](super::TENSOR_NAMES) order.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use thiserror::Error;

use super::{DennConfig, DennError, DennModel, TENSOR_NAMES};

pub const MAGIC: &[u8; 8] = b"DEFINNET";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("not a checkpoint (bad magic)")]
    Magic,
    #[error("checkpoint version {found}, expected {VERSION}")]
    Version { found: u32 },
    #[error("checkpoint truncated while reading {0}")]
    Truncated(&'static str),
    #[error("{0} unexpected trailing bytes")]
    Trailing(usize),
    #[error("bad configuration block: {0}")]
    Config(#[from] DennError),
    #[error("POS tag is not UTF-8")]
    Utf8,
}

fn truncated(what: &'static str) -> impl Fn(io::Error) -> CheckpointError {
    move |e| match e.kind() {
        io::ErrorKind::UnexpectedEof => CheckpointError::Truncated(what),
        _ => CheckpointError::Io(e),
    }
}

pub fn write_model<W: Write>(model: &DennModel, w: &mut W) -> io::Result<()> {
    let c = &model.config;
    w.write_all(MAGIC)?;
    w.write_u32::<LE>(VERSION)?;
    for n in [c.dim, c.pos_dim, c.hidden1, c.hidden2] {
        w.write_u32::<LE>(n as u32)?;
    }
    w.write_f64::<LE>(c.leaky_slope)?;
    w.write_f64::<LE>(c.dropout_p)?;
    w.write_u64::<LE>(c.seed)?;
    w.write_u32::<LE>(c.pos_vocab.len() as u32)?;
    for tag in &c.pos_vocab {
        w.write_u32::<LE>(tag.len() as u32)?;
        w.write_all(tag.as_bytes())?;
    }
    for t in model.tensors() {
        for &x in t {
            w.write_f32::<LE>(x)?;
        }
    }
    Ok(())
}

pub fn read_model<R: Read>(r: &mut R) -> Result<DennModel, CheckpointError> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(truncated("magic"))?;
    if &magic != MAGIC {
        return Err(CheckpointError::Magic);
    }
    let version = r.read_u32::<LE>().map_err(truncated("version"))?;
    if version != VERSION {
        return Err(CheckpointError::Version { found: version });
    }
    let cfg = truncated("configuration");
    let mut widths = [0usize; 4];
    for n in &mut widths {
        *n = r.read_u32::<LE>().map_err(&cfg)? as usize;
    }
    let leaky_slope = r.read_f64::<LE>().map_err(&cfg)?;
    let dropout_p = r.read_f64::<LE>().map_err(&cfg)?;
    let seed = r.read_u64::<LE>().map_err(&cfg)?;
    let n_tags = r.read_u32::<LE>().map_err(&cfg)?;
    let mut pos_vocab = Vec::new();
    for _ in 0..n_tags {
        let len = r.read_u32::<LE>().map_err(&cfg)? as usize;
        if len > 64 {
            return Err(DennError::Config(format!("POS tag of {len} bytes")).into());
        }
        let mut buf = vec![0u8; len];
        r.read_exact(&mut buf).map_err(&cfg)?;
        pos_vocab.push(String::from_utf8(buf).map_err(|_| CheckpointError::Utf8)?);
    }
    let [dim, pos_dim, hidden1, hidden2] = widths;
    let config = DennConfig {
        dim,
        pos_vocab,
        pos_dim,
        hidden1,
        hidden2,
        leaky_slope,
        dropout_p,
        seed,
    };
    let mut model = DennModel::zeros(config)?;
    for (t, name) in model.tensors_mut().into_iter().zip(TENSOR_NAMES) {
        r.read_f32_into::<LE>(t).map_err(truncated(name))?;
    }
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(CheckpointError::Trailing(rest.len()));
    }
    Ok(model)
}

pub fn save_model(model: &DennModel, path: impl AsRef<Path>) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_model(model, &mut w)?;
    w.flush()
}

pub fn load_model(path: impl AsRef<Path>) -> Result<DennModel, CheckpointError> {
    read_model(&mut BufReader::new(File::open(path)?))
}
