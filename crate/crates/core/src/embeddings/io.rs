//! Binary embedding file, little-endian:
//!
//! ```text
//! "WSDE" | version u32 | V u64 | D u64
//! V x (len u32 | utf-8 bytes | count u64)
//! V*D f32 input table
//! has_output u8 | [V*D f32 output table]
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::matrix::Embeddings;
use super::vocab::Vocabulary;
use crate::error::{Error, Result};

pub const EMBEDDINGS_MAGIC: &[u8; 4] = b"WSDE";
pub const EMBEDDINGS_VERSION: u32 = 1;

pub fn write_embeddings(
    out: &mut impl Write,
    m: &Embeddings<f32>,
    with_output: bool,
) -> std::io::Result<()> {
    out.write_all(EMBEDDINGS_MAGIC)?;
    out.write_all(&EMBEDDINGS_VERSION.to_le_bytes())?;
    out.write_all(&(m.vocab().len() as u64).to_le_bytes())?;
    out.write_all(&(m.dim() as u64).to_le_bytes())?;
    for (word, count) in m.vocab().words().iter().zip(m.vocab().counts()) {
        out.write_all(&(word.len() as u32).to_le_bytes())?;
        out.write_all(word.as_bytes())?;
        out.write_all(&count.to_le_bytes())?;
    }
    write_floats(out, m.input_table())?;
    out.write_all(&[with_output as u8])?;
    if with_output {
        write_floats(out, m.output_table())?;
    }
    Ok(())
}

fn write_floats(out: &mut impl Write, values: &[f32]) -> std::io::Result<()> {
    let mut buf = Vec::with_capacity(values.len() * 4);
    for v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)
}

pub fn save_embeddings(
    m: &Embeddings<f32>,
    path: impl AsRef<Path>,
    with_output: bool,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_embeddings(&mut out, m, with_output)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.data.len() - self.pos < n {
            return Err(Error::Format(format!(
                "truncated file while reading {what}"
            )));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn floats(&mut self, n: usize, what: &str) -> Result<Vec<f32>> {
        let bytes = self.take(
            n.checked_mul(4)
                .ok_or_else(|| Error::Format("table too large".into()))?,
            what,
        )?;
        Ok(bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

/// Parses an embedding file image. A missing output table loads as zeros.
pub fn read_embeddings(data: &[u8]) -> Result<Embeddings<f32>> {
    let mut cur = Cursor { data, pos: 0 };
    if cur.take(4, "magic")? != EMBEDDINGS_MAGIC {
        return Err(Error::Format("not an embedding file (bad magic)".into()));
    }
    let version = cur.u32("version")?;
    if version != EMBEDDINGS_VERSION {
        return Err(Error::Format(format!(
            "unsupported embedding file version {version}"
        )));
    }
    let v = cur.u64("vocabulary size")? as usize;
    let d = cur.u64("dimension")? as usize;
    let mut words = Vec::with_capacity(v.min(1 << 20));
    let mut counts = Vec::with_capacity(v.min(1 << 20));
    for _ in 0..v {
        let len = cur.u32("word length")? as usize;
        let word = std::str::from_utf8(cur.take(len, "word")?)
            .map_err(|_| Error::Format("word is not valid UTF-8".into()))?;
        words.push(word.to_string());
        counts.push(cur.u64("word count")?);
    }
    let n = v
        .checked_mul(d)
        .ok_or_else(|| Error::Format("table too large".into()))?;
    let input = cur.floats(n, "input table")?;
    let output = match cur.take(1, "output flag")?[0] {
        0 => vec![0.0; n],
        1 => cur.floats(n, "output table")?,
        f => return Err(Error::Format(format!("bad output flag {f}"))),
    };
    if cur.pos != data.len() {
        return Err(Error::Format(format!(
            "{} trailing bytes",
            data.len() - cur.pos
        )));
    }
    let min_count = counts.iter().copied().min().unwrap_or(0);
    let vocab = Vocabulary::from_parts(words, counts, min_count);
    if vocab.len() != v {
        return Err(Error::Format("duplicate word in vocabulary".into()));
    }
    Embeddings::from_tables(vocab, d, input, output)
}

pub fn load_embeddings(path: impl AsRef<Path>) -> Result<Embeddings<f32>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut data = Vec::new();
    BufReader::new(file)
        .read_to_end(&mut data)
        .map_err(|e| Error::io(path, e))?;
    read_embeddings(&data)
}
