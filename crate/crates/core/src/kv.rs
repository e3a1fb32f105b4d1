//! Typed access to section/key-value text files (INI dialect).

use std::fmt::Debug;
use std::path::Path;
use std::str::FromStr;

use ini::Ini;

use crate::error::{Error, Result};

/// Shortest decimal form that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

pub fn fmt_f64_list(values: &[f64]) -> String {
    values.iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>().join(" ")
}

/// Parsed document plus the origin used in error messages.
pub struct KvDoc {
    ini: Ini,
    origin: String,
}

impl KvDoc {
    pub fn parse(text: &str, origin: impl Into<String>) -> Result<Self> {
        let origin = origin.into();
        let ini = Ini::load_from_str(text).map_err(|e| Error::config(&origin, e.to_string()))?;
        Ok(KvDoc { ini, origin })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        KvDoc::parse(&text, path.display().to_string())
    }

    pub fn origin(&self) -> &str {
        &self.origin
    }

    pub fn err(&self, msg: impl Into<String>) -> Error {
        Error::config(&self.origin, msg)
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.ini.section(Some(section)).is_some()
    }

    pub fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.ini.get_from(Some(section), key).map(str::trim)
    }

    pub fn req_str(&self, section: &str, key: &str) -> Result<&str> {
        self.raw(section, key)
            .ok_or_else(|| self.err(format!("missing key `{key}` in [{section}]")))
    }

    pub fn req<T: FromStr>(&self, section: &str, key: &str) -> Result<T>
    where
        T::Err: Debug,
    {
        let raw = self.req_str(section, key)?;
        raw.parse()
            .map_err(|e| self.err(format!("[{section}] {key} = {raw:?}: {e:?}")))
    }

    pub fn opt<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>>
    where
        T::Err: Debug,
    {
        match self.raw(section, key) {
            None => Ok(None),
            Some(_) => self.req(section, key).map(Some),
        }
    }

    /// Whitespace- or comma-separated list.
    pub fn list<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: Debug,
    {
        let Some(raw) = self.raw(section, key) else {
            return Ok(None);
        };
        raw.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse()
                    .map_err(|e| self.err(format!("[{section}] {key}: bad element {s:?}: {e:?}")))
            })
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }

    pub fn req_list<T: FromStr>(&self, section: &str, key: &str) -> Result<Vec<T>>
    where
        T::Err: Debug,
    {
        self.list(section, key)?
            .ok_or_else(|| self.err(format!("missing key `{key}` in [{section}]")))
    }
}

/// Ordered writer for the same dialect.
#[derive(Default)]
pub struct KvWriter {
    ini: Ini,
}

impl KvWriter {
    pub fn new() -> Self {
        KvWriter { ini: Ini::new() }
    }

    pub fn set(&mut self, section: &str, key: &str, value: impl Into<String>) -> &mut Self {
        self.ini.with_section(Some(section)).set(key, value.into());
        self
    }

    pub fn set_f64(&mut self, section: &str, key: &str, value: f64) -> &mut Self {
        self.set(section, key, fmt_f64(value))
    }

    pub fn set_f64s(&mut self, section: &str, key: &str, values: &[f64]) -> &mut Self {
        self.set(section, key, fmt_f64_list(values))
    }

    pub fn render(&self) -> String {
        let mut buf = Vec::new();
        self.ini
            .write_to(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ini output is utf-8")
    }
}
