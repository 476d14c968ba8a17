use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// Directory receiving a command's artifacts.
pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(root).map_err(|source| CliError::Io {
            path: root.to_path_buf(),
            source,
        })?;
        Ok(Self {
            root: root.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Write `name` through `fill`, reporting failures against the file path.
    pub fn write<F>(&self, name: &str, fill: F) -> Result<PathBuf, CliError>
    where
        F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    {
        let path = self.path(name);
        let io = |source| CliError::Io {
            path: path.clone(),
            source,
        };
        let mut w = BufWriter::new(File::create(&path).map_err(io)?);
        fill(&mut w).and_then(|()| w.flush()).map_err(io)?;
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)
        })
    }
}

/// `x` rounded to four significant figures, without exponent notation for
/// magnitudes the tables use.
pub fn sig4(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-4..=8).contains(&magnitude) {
        return format!("{x:.3e}");
    }
    let scale = 10f64.powi(3 - magnitude);
    let rounded = (x * scale).round() / scale;
    // Rounding may carry into the next decade (9.9996 -> 10.00).
    let decimals = (3 - rounded.abs().log10().floor() as i32).max(0) as usize;
    format!("{rounded:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::sig4;

    #[test]
    fn four_significant_figures() {
        assert_eq!(sig4(256.6735), "256.7");
        assert_eq!(sig4(0.80123), "0.8012");
        assert_eq!(sig4(1139.04), "1139");
        assert_eq!(sig4(133848.2), "133800");
        assert_eq!(sig4(-0.0361108), "-0.03611");
        assert_eq!(sig4(0.0), "0");
        assert_eq!(sig4(9.99996), "10.00");
        assert_eq!(sig4(3.2e-7), "3.200e-7");
    }
}
