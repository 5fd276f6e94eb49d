use std::collections::HashSet;

use crate::error::{Result, TexError};
use crate::scalar::Real;

/// Named, ordered feature values produced by an extractor or by [`fuse`].
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector<T> {
    names: Vec<String>,
    values: Vec<T>,
}

impl<T: Real> FeatureVector<T> {
    pub fn new(names: Vec<String>, values: Vec<T>) -> Result<Self> {
        if names.len() != values.len() {
            return Err(TexError::Schema(format!("{} names for {} values", names.len(), values.len())));
        }
        let mut seen = HashSet::with_capacity(names.len());
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(TexError::NameCollision(name.clone()));
            }
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(TexError::Domain(format!("feature `{}` is not finite", names[i])));
        }
        Ok(Self { names, values })
    }

    pub fn empty() -> Self {
        Self { names: Vec::new(), values: Vec::new() }
    }

    pub fn single(name: impl Into<String>, value: T) -> Result<Self> {
        Self::new(vec![name.into()], vec![value])
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<T> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, T)> {
        self.names.iter().map(String::as_str).zip(self.values.iter().copied())
    }

    pub fn into_parts(self) -> (Vec<String>, Vec<T>) {
        (self.names, self.values)
    }
}

/// Concatenates feature vectors, keeping part order and each part's internal order.
pub fn fuse<T: Real>(parts: &[FeatureVector<T>]) -> Result<FeatureVector<T>> {
    let total = parts.iter().map(FeatureVector::len).sum();
    let mut names = Vec::with_capacity(total);
    let mut values = Vec::with_capacity(total);
    for part in parts {
        names.extend(part.names.iter().cloned());
        values.extend_from_slice(&part.values);
    }
    FeatureVector::new(names, values)
}
