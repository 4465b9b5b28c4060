use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::lexical::read_resource;

/// Word vectors of one fixed dimension. Keys are lowercase.
#[derive(Debug, Clone)]
pub struct EmbeddingSpace {
    pub name: String,
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingSpace {
    pub fn new(name: impl Into<String>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("embedding dimension must be positive".into()));
        }
        Ok(EmbeddingSpace {
            name: name.into(),
            dim,
            vectors: HashMap::new(),
        })
    }

    pub fn insert(&mut self, word: &str, vector: Vec<f64>) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::data(format!(
                "vector for {word:?} has length {}, space {} has dimension {}",
                vector.len(),
                self.name,
                self.dim
            )));
        }
        self.vectors.insert(word.to_lowercase(), vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        match self.vectors.get(word) {
            Some(v) => Some(v),
            None => self.vectors.get(&word.to_lowercase()).map(Vec::as_slice),
        }
    }

    /// Parse the plain-text format: `word v1 ... vd` per line. A leading
    /// `count dim` header line is accepted and checked against `dim`.
    pub fn parse(name: &str, dim: usize, text: &str) -> Result<Self> {
        let mut space = EmbeddingSpace::new(name, dim)?;
        for (i, line) in text.lines().enumerate() {
            let mut parts = line.split_whitespace();
            let Some(word) = parts.next() else { continue };
            let values: Vec<&str> = parts.collect();
            if i == 0 && values.len() == 1 && word.parse::<usize>().is_ok() {
                if values[0].parse::<usize>().ok() != Some(dim) {
                    return Err(Error::data(format!("embedding header declares dimension {}, expected {dim}", values[0])));
                }
                continue;
            }
            let vector = values
                .iter()
                .map(|v| v.parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|_| Error::data(format!("embedding line {}: non-numeric component", i + 1)))?;
            if vector.iter().any(|x| !x.is_finite()) {
                return Err(Error::data(format!("embedding line {}: non-finite component", i + 1)));
            }
            space
                .insert(word, vector)
                .map_err(|e| Error::data(format!("embedding line {}: {e}", i + 1)))?;
        }
        Ok(space)
    }

    pub fn load(name: &str, dim: usize, path: &Path) -> Result<Self> {
        Self::parse(name, dim, &read_resource(path)?).map_err(|e| Error::resource(path, e.to_string()))
    }

    /// Component-wise mean of the in-vocabulary words, or `None` when no
    /// word is known.
    pub fn mean_vector<S: AsRef<str>>(&self, words: &[S]) -> Option<Vec<f64>> {
        let mut sum = vec![0.0; self.dim];
        let mut n = 0usize;
        for w in words {
            if let Some(v) = self.get(w.as_ref()) {
                for (s, x) in sum.iter_mut().zip(v) {
                    *s += x;
                }
                n += 1;
            }
        }
        if n == 0 {
            return None;
        }
        for s in &mut sum {
            *s /= n as f64;
        }
        Some(sum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_with_header() {
        let s = EmbeddingSpace::parse("t", 2, "2 2\nCat 1 0\ndog 0 1\n").unwrap();
        assert_eq!(s.get("cat"), Some(&[1.0, 0.0][..]));
        assert_eq!(s.mean_vector(&["cat", "dog", "emu"]), Some(vec![0.5, 0.5]));
        assert_eq!(s.mean_vector(&["emu"]), None);
    }

    #[test]
    fn wrong_length_rejected() {
        assert!(EmbeddingSpace::parse("t", 3, "cat 1 0\n").is_err());
        assert!(EmbeddingSpace::parse("t", 2, "5 3\ncat 1 0\n").is_err());
    }
}
