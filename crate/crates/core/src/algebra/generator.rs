use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type GenId = usize;

/// A graded generator: a coordinate `x` (form degree 0) or its
/// variational differential `δx` (form degree 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub ghost: i32,
    pub form_degree: u8,
    /// For a differential `δx`, the id of `x`.
    pub parent: Option<GenId>,
    /// For a coordinate `x`, the id of `δx` if one was registered.
    pub differential: Option<GenId>,
}

impl Generator {
    /// Total parity `(ghost + form degree) mod 2`.
    pub fn parity(&self) -> u8 {
        (self.ghost + self.form_degree as i32).rem_euclid(2) as u8
    }

    pub fn is_odd(&self) -> bool {
        self.parity() == 1
    }
}

#[derive(Debug)]
pub struct GeneratorTable {
    gens: Vec<Generator>,
    index: HashMap<String, GenId>,
}

impl GeneratorTable {
    pub fn builder() -> TableBuilder {
        TableBuilder::default()
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn get(&self, id: GenId) -> &Generator {
        &self.gens[id]
    }

    pub fn parity(&self, id: GenId) -> u8 {
        self.gens[id].parity()
    }

    pub fn name(&self, id: GenId) -> &str {
        &self.gens[id].name
    }

    pub fn lookup(&self, name: &str) -> Result<GenId> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = GenId> {
        0..self.gens.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (GenId, &Generator)> {
        self.gens.iter().enumerate()
    }

    pub fn differential(&self, id: GenId) -> Result<GenId> {
        self.gens[id].differential.ok_or_else(|| Error::MissingDifferential(self.gens[id].name.clone()))
    }

    pub fn count_odd(&self) -> usize {
        self.gens.iter().filter(|g| g.is_odd()).count()
    }
}

#[derive(Default)]
pub struct TableBuilder {
    gens: Vec<Generator>,
    index: HashMap<String, GenId>,
}

pub fn differential_name(name: &str) -> String {
    format!("δ{name}")
}

impl TableBuilder {
    fn push(&mut self, g: Generator) -> Result<GenId> {
        if self.index.contains_key(&g.name) {
            return Err(Error::Invalid(format!("duplicate generator name `{}`", g.name)));
        }
        let id = self.gens.len();
        self.index.insert(g.name.clone(), id);
        self.gens.push(g);
        Ok(id)
    }

    /// Registers a coordinate together with its differential `δname`.
    pub fn coordinate(&mut self, name: &str, ghost: i32) -> Result<GenId> {
        let id = self.push(Generator {
            name: name.to_string(),
            ghost,
            form_degree: 0,
            parent: None,
            differential: None,
        })?;
        let d = self.push(Generator {
            name: differential_name(name),
            ghost,
            form_degree: 1,
            parent: Some(id),
            differential: None,
        })?;
        self.gens[id].differential = Some(d);
        Ok(id)
    }

    /// Registers a coordinate with no differential.
    pub fn bare(&mut self, name: &str, ghost: i32) -> Result<GenId> {
        self.push(Generator {
            name: name.to_string(),
            ghost,
            form_degree: 0,
            parent: None,
            differential: None,
        })
    }

    pub fn build(self) -> Arc<GeneratorTable> {
        Arc::new(GeneratorTable { gens: self.gens, index: self.index })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn differentials_flip_parity() {
        let mut b = GeneratorTable::builder();
        let x = b.coordinate("x", 0).unwrap();
        let c = b.coordinate("c", 1).unwrap();
        let t = b.build();
        assert_eq!(t.parity(x), 0);
        assert_eq!(t.parity(t.differential(x).unwrap()), 1);
        assert_eq!(t.parity(c), 1);
        assert_eq!(t.parity(t.differential(c).unwrap()), 0);
        assert_eq!(t.get(t.differential(c).unwrap()).parent, Some(c));
        assert_eq!(t.lookup("δx").unwrap(), t.differential(x).unwrap());
    }

    #[test]
    fn duplicate_names_rejected() {
        let mut b = GeneratorTable::builder();
        b.bare("x", 0).unwrap();
        assert!(b.bare("x", 1).is_err());
    }
}
