use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{CoefficientMode, GrassmannError};

/// Largest number of generators a 64-bit monomial can address.
pub const MAX_GENERATORS: usize = 64;

/// Default magnitude below which float coefficients are dropped.
pub const DEFAULT_FLOAT_THRESHOLD: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorRole {
    Theta,
    ThetaBar,
    GhostC,
    GhostCBar,
    /// Bookkeeping generators, e.g. the nilpotent parameter of a variation.
    Auxiliary,
}

/// Ordered, immutable list of anticommuting generators.
///
/// The position of a generator in the table is its bit index in every
/// [`Monomial`](super::Monomial) and fixes the canonical ordering.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorTable {
    names: Vec<String>,
    roles: Vec<GeneratorRole>,
    capacity: usize,
    mode: CoefficientMode,
    zero_threshold: f64,
}

impl GeneratorTable {
    pub fn new<S: AsRef<str>>(
        mode: CoefficientMode,
        generators: &[(S, GeneratorRole)],
    ) -> Result<Arc<Self>, GrassmannError> {
        Self::with_capacity(mode, MAX_GENERATORS, generators)
    }

    pub fn with_capacity<S: AsRef<str>>(
        mode: CoefficientMode,
        capacity: usize,
        generators: &[(S, GeneratorRole)],
    ) -> Result<Arc<Self>, GrassmannError> {
        if capacity == 0 || capacity > MAX_GENERATORS {
            return Err(GrassmannError::InvalidCapacity(capacity));
        }
        if generators.is_empty() {
            return Err(GrassmannError::EmptyTable);
        }
        if generators.len() > capacity {
            return Err(GrassmannError::CapacityExceeded {
                requested: generators.len(),
                capacity,
            });
        }
        let mut seen = HashSet::new();
        for (name, _) in generators {
            if !seen.insert(name.as_ref()) {
                return Err(GrassmannError::DuplicateName(name.as_ref().to_string()));
            }
        }
        Ok(Arc::new(Self {
            names: generators.iter().map(|(n, _)| n.as_ref().to_string()).collect(),
            roles: generators.iter().map(|(_, r)| *r).collect(),
            capacity,
            mode,
            zero_threshold: DEFAULT_FLOAT_THRESHOLD,
        }))
    }

    /// Same table with a different float zero-threshold.
    pub fn with_zero_threshold(&self, threshold: f64) -> Arc<Self> {
        let mut t = self.clone();
        t.zero_threshold = threshold;
        Arc::new(t)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn mode(&self) -> CoefficientMode {
        self.mode
    }

    pub fn zero_threshold(&self) -> f64 {
        self.zero_threshold
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.names.get(index).map(String::as_str)
    }

    pub fn role(&self, index: usize) -> Option<GeneratorRole> {
        self.roles.get(index).copied()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, GrassmannError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| GrassmannError::UnknownGenerator(name.to_string()))
    }

    /// First generator carrying `role`, if any.
    pub fn find_role(&self, role: GeneratorRole) -> Option<usize> {
        self.roles.iter().position(|r| *r == role)
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<(), GrassmannError> {
        if index < self.len() {
            Ok(())
        } else {
            Err(GrassmannError::UnknownGenerator(format!("#{index}")))
        }
    }
}

/// Builds a generator table with the default capacity of 64.
pub fn create_algebra<S: AsRef<str>>(
    mode: CoefficientMode,
    generators: &[(S, GeneratorRole)],
) -> Result<Arc<GeneratorTable>, GrassmannError> {
    GeneratorTable::new(mode, generators)
}

#[cfg(test)]
mod tests {
    use super::*;
    use GeneratorRole::*;

    #[test]
    fn theta_pair() {
        let t = create_algebra(CoefficientMode::Exact, &[("θ", Theta), ("θ̄", ThetaBar)]).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.index_of("θ̄").unwrap(), 1);
    }

    #[test]
    fn one_dof_slice() {
        let gens = [
            ("θ", Theta),
            ("θ̄", ThetaBar),
            ("c_q", GhostC),
            ("c_p", GhostC),
            ("c̄_q", GhostCBar),
            ("c̄_p", GhostCBar),
        ];
        let t = create_algebra(CoefficientMode::Float, &gens).unwrap();
        assert_eq!(t.len(), 6);
        assert_eq!(t.find_role(GhostCBar), Some(4));
    }

    #[test]
    fn capacity_boundary() {
        let names: Vec<(String, GeneratorRole)> =
            (0..65).map(|i| (format!("c{i}"), GhostC)).collect();
        let err = create_algebra(CoefficientMode::Exact, &names).unwrap_err();
        assert_eq!(
            err,
            GrassmannError::CapacityExceeded {
                requested: 65,
                capacity: 64
            }
        );
        assert!(create_algebra(CoefficientMode::Exact, &names[..64]).is_ok());
    }

    #[test]
    fn small_capacity_is_enforced() {
        let err = GeneratorTable::with_capacity(
            CoefficientMode::Exact,
            2,
            &[("a", GhostC), ("b", GhostC), ("c", GhostC)],
        )
        .unwrap_err();
        assert!(matches!(err, GrassmannError::CapacityExceeded { .. }));
    }

    #[test]
    fn duplicate_names_rejected() {
        let err = create_algebra(CoefficientMode::Exact, &[("θ", Theta), ("θ", ThetaBar)]).unwrap_err();
        assert_eq!(err, GrassmannError::DuplicateName("θ".into()));
    }
}
