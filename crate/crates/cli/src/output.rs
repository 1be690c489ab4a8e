use crate::error::CliError;
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

/// `x` with 17 significant digits, so that it parses back to the same bits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes output files into one directory and remembers their names.
pub struct OutputDir {
    dir: PathBuf,
    files: Vec<String>,
}

impl OutputDir {
    pub fn create(dir: PathBuf) -> Result<Self, CliError> {
        fs::create_dir_all(&dir)
            .map_err(|e| CliError::io(&format!("creating {}", dir.display()), e))?;
        Ok(Self {
            dir,
            files: Vec::new(),
        })
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    fn write(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, body)
            .map_err(|e| CliError::io(&format!("writing {}", path.display()), e))?;
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
        Ok(())
    }

    pub fn csv(
        &mut self,
        name: &str,
        header: &[&str],
        rows: &[Vec<String>],
    ) -> Result<(), CliError> {
        let mut body = header.join(",");
        body.push('\n');
        for row in rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| {
                    if c.contains([',', '"', '\n']) {
                        format!("\"{}\"", c.replace('"', "\"\""))
                    } else {
                        c.clone()
                    }
                })
                .collect();
            let _ = writeln!(body, "{}", cells.join(","));
        }
        self.write(name, &body)
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut body = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::numerical(format!("serialising {name}: {e}")))?;
        body.push('\n');
        self.write(name, &body)
    }

    /// Written last and not listed in itself.
    pub fn manifest<T: Serialize>(&mut self, value: &T) -> Result<(), CliError> {
        let mut body = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::numerical(format!("serialising manifest: {e}")))?;
        body.push('\n');
        let path = self.dir.join("manifest.json");
        fs::write(&path, body).map_err(|e| CliError::io(&format!("writing {}", path.display()), e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_quotes_commas() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path().to_path_buf()).unwrap();
        out.csv("a.csv", &["x", "y"], &[vec!["1,2".into(), "b".into()]])
            .unwrap();
        let text = fs::read_to_string(dir.path().join("a.csv")).unwrap();
        assert_eq!(text, "x,y\n\"1,2\",b\n");
        assert_eq!(out.files(), ["a.csv"]);
    }
}
