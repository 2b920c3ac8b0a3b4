//! Little-endian binary encoding used by the index file format.

use crate::error::{Error, Result};

#[derive(Default)]
pub(crate) struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }

    pub fn bytes(&mut self, b: &[u8]) {
        self.buf.extend_from_slice(b);
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u16(&mut self, v: u16) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    /// Length-prefixed `u64` array.
    pub fn u64s(&mut self, v: &[u64]) {
        self.u64(v.len() as u64);
        for &x in v {
            self.u64(x);
        }
    }

    pub fn u16s(&mut self, v: &[u16]) {
        self.u64(v.len() as u64);
        for &x in v {
            self.u16(x);
        }
    }

    pub fn u8s(&mut self, v: &[u8]) {
        self.u64(v.len() as u64);
        self.bytes(v);
    }

    /// Writes a section whose body is produced by `f`, prefixed by its byte length.
    pub fn section(&mut self, f: impl FnOnce(&mut Writer)) {
        let mut inner = Writer::new();
        f(&mut inner);
        self.u64(inner.buf.len() as u64);
        self.buf.extend_from_slice(&inner.buf);
    }
}

pub(crate) struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Reader { data, pos: 0 }
    }

    pub fn is_empty(&self) -> bool {
        self.pos == self.data.len()
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.data.len() - self.pos < n {
            return Err(Error::format(format!(
                "truncated: need {n} bytes at offset {}, have {}",
                self.pos,
                self.data.len() - self.pos
            )));
        }
        let out = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::format("value exceeds address space"))
    }

    fn array_len(&mut self, elem: usize) -> Result<usize> {
        let n = self.usize()?;
        if n.checked_mul(elem).is_none_or(|bytes| bytes > self.data.len() - self.pos) {
            return Err(Error::format(format!("array of {n} elements exceeds remaining input")));
        }
        Ok(n)
    }

    pub fn u64s(&mut self) -> Result<Vec<u64>> {
        let n = self.array_len(8)?;
        (0..n).map(|_| self.u64()).collect()
    }

    pub fn u16s(&mut self) -> Result<Vec<u16>> {
        let n = self.array_len(2)?;
        (0..n).map(|_| self.u16()).collect()
    }

    pub fn u8s(&mut self) -> Result<Vec<u8>> {
        let n = self.array_len(1)?;
        Ok(self.take(n)?.to_vec())
    }

    /// Reads a length-prefixed section and checks that `f` consumes it exactly.
    pub fn section<T>(&mut self, name: &str, f: impl FnOnce(&mut Reader<'a>) -> Result<T>) -> Result<T> {
        let len = self.usize()?;
        let body = self
            .take(len)
            .map_err(|_| Error::format(format!("section {name}: declared length {len} exceeds file")))?;
        let mut inner = Reader::new(body);
        let out = f(&mut inner)?;
        if !inner.is_empty() {
            return Err(Error::format(format!(
                "section {name}: {} trailing bytes",
                body.len() - inner.pos
            )));
        }
        Ok(out)
    }
}
