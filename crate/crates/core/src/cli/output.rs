use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::Result;

/// A file to be written once the whole command has succeeded.
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn build(name: &str, fill: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<Self> {
        let mut bytes = Vec::new();
        fill(&mut bytes)?;
        Ok(Self {
            name: name.to_string(),
            bytes,
        })
    }
}

/// Writes each artifact to a temporary file in `dir` and renames it into place.
pub fn commit(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        let mut tmp = NamedTempFile::new_in(dir)?;
        {
            let mut w = BufWriter::new(tmp.as_file_mut());
            w.write_all(&a.bytes)?;
            w.flush()?;
        }
        tmp.as_file().sync_all()?;
        let path = dir.join(&a.name);
        tmp.persist(&path).map_err(|e| e.error)?;
        written.push(path);
    }
    Ok(written)
}

/// Six significant digits; fixed notation for exponents in [-4, 6).
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    // the exponent of the rounded value, so 9.9999995 becomes 10.0000
    let sci = format!("{x:.5e}");
    let exp: i32 = sci[sci.find('e').map_or(0, |i| i + 1)..].parse().unwrap_or(0);
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

pub fn opt6(v: Option<f64>) -> String {
    v.map(sig6).unwrap_or_else(|| "-".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_digits() {
        assert_eq!(sig6(0.069310045), "0.0693100");
        assert_eq!(sig6(2.8284271), "2.82843");
        assert_eq!(sig6(-123456.7), "-123457");
        assert_eq!(sig6(1234567.0), "1.23457e6");
        assert_eq!(sig6(1.5e-7), "1.50000e-7");
        assert_eq!(sig6(9.9999996), "10.0000");
        assert_eq!(sig6(0.0), "0");
    }

    #[test]
    fn commit_is_all_or_nothing_per_file() {
        let dir = tempfile::tempdir().unwrap();
        let a = Artifact::build("a.csv", |w| writeln!(w, "x")).unwrap();
        let paths = commit(dir.path(), &[a]).unwrap();
        assert_eq!(fs::read_to_string(&paths[0]).unwrap(), "x\n");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
