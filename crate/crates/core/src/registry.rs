//! Name-keyed registries of strategy constructors.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};

type Factory<T> = Box<dyn Fn() -> Arc<T> + Send + Sync>;

/// Maps names to constructors of trait objects. Names iterate in sorted order.
pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: BTreeMap<&'static str, Factory<T>>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, name: &'static str, factory: impl Fn() -> Arc<T> + Send + Sync + 'static) {
        self.entries.insert(name, Box::new(factory));
    }

    pub fn create(&self, name: &str) -> Result<Arc<T>> {
        self.entries.get(name).map(|f| f()).ok_or_else(|| Error::UnknownName {
            kind: self.kind,
            name: name.to_string(),
        })
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }
}
