//! Agents, type spaces, profiles and allocation tables.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

/// Comparison tolerance used when none is configured.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("instance must have at least one agent")]
    NoAgents,
    #[error("instance must declare at least one bundle")]
    NoBundles,
    #[error("duplicate bundle id {0:?}")]
    DuplicateBundle(String),
    #[error("expected type spaces for {expected} agents, found {found}")]
    TypeSpaceCount { expected: usize, found: usize },
    #[error("agent {0} has an empty type space")]
    EmptyTypeSpace(usize),
    #[error("unknown bundle id {0:?}")]
    UnknownBundle(String),
    #[error("agent {agent} type {type_index}: no value for bundle {bundle:?}")]
    MissingValue {
        agent: usize,
        type_index: usize,
        bundle: String,
    },
    #[error("agent {agent} type {type_index}: bundle {bundle:?} valued twice")]
    RepeatedValue {
        agent: usize,
        type_index: usize,
        bundle: String,
    },
    #[error("agent {agent} type {type_index}: value for {bundle:?} is not finite")]
    NonFiniteValue {
        agent: usize,
        type_index: usize,
        bundle: String,
    },
    #[error("agent {agent}: types {first} and {second} are duplicates")]
    DuplicateType {
        agent: usize,
        first: usize,
        second: usize,
    },
    #[error("profile {profile:?} has the wrong length or an index out of range")]
    BadProfile { profile: Vec<usize> },
    #[error("allocation row for profile {profile:?} assigns {found} bundles, expected {expected}")]
    BadOutcome {
        profile: Vec<usize>,
        expected: usize,
        found: usize,
    },
    #[error("allocation row for profile {profile:?} appears twice")]
    DuplicateProfile { profile: Vec<usize> },
    #[error("incomplete allocation table: no row for profile {profile:?}")]
    IncompleteAllocation { profile: Vec<usize> },
    #[error("tolerance must be finite and non-negative, got {0}")]
    BadTolerance(f64),
}

/// One valuation type: a value per declared bundle, stored densely in bundle order.
///
/// The optional name distinguishes types whose value vectors coincide (the
/// same valuation reachable under two labels).
#[derive(Debug, Clone, PartialEq)]
pub struct ValuationType {
    pub name: Option<String>,
    pub values: Vec<f64>,
}

/// A type as written by a modeler: values keyed by bundle name.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeSpec {
    pub name: Option<String>,
    pub values: Vec<(String, f64)>,
}

impl TypeSpec {
    pub fn new<S: Into<String>>(values: impl IntoIterator<Item = (S, f64)>) -> Self {
        Self {
            name: None,
            values: values.into_iter().map(|(b, v)| (b.into(), v)).collect(),
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }
}

/// Unvalidated instance contents, keyed by names.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InstanceParts {
    pub agents: usize,
    pub bundles: Vec<String>,
    pub types: Vec<Vec<TypeSpec>>,
    /// `(profile, assigned bundle per agent)` rows, in any order.
    pub allocation: Vec<(Vec<usize>, Vec<String>)>,
}

/// A profile: one type index per agent.
pub type Profile = Vec<usize>;

/// Mixed-radix numbering of the profile product `T_1 x ... x T_m`.
///
/// Profiles are ranked lexicographically with agent 0 most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileSpace {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl ProfileSpace {
    pub fn new(sizes: Vec<usize>) -> Self {
        let mut strides = vec![0; sizes.len()];
        let mut acc = 1usize;
        for (i, &s) in sizes.iter().enumerate().rev() {
            strides[i] = acc;
            acc *= s;
        }
        Self {
            sizes,
            strides,
            len: acc,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Rank of `profile`, or `None` if its shape or any index is out of range.
    pub fn rank(&self, profile: &[usize]) -> Option<usize> {
        if profile.len() != self.sizes.len() {
            return None;
        }
        let mut r = 0;
        for ((&t, &s), &stride) in profile.iter().zip(&self.sizes).zip(&self.strides) {
            if t >= s {
                return None;
            }
            r += t * stride;
        }
        Some(r)
    }

    pub fn unrank(&self, mut rank: usize) -> Profile {
        debug_assert!(rank < self.len);
        self.strides
            .iter()
            .zip(&self.sizes)
            .map(|(&stride, &s)| {
                let t = rank / stride;
                rank -= t * stride;
                debug_assert!(t < s);
                t
            })
            .collect()
    }

    /// Type index of `agent` inside the profile of rank `rank`.
    pub fn coordinate(&self, rank: usize, agent: usize) -> usize {
        (rank / self.strides[agent]) % self.sizes[agent]
    }

    /// Rank of the profile obtained by setting `agent`'s coordinate to `t`.
    pub fn with_coordinate(&self, rank: usize, agent: usize, t: usize) -> usize {
        let cur = self.coordinate(rank, agent);
        rank - cur * self.strides[agent] + t * self.strides[agent]
    }

    pub fn iter(&self) -> impl Iterator<Item = Profile> + '_ {
        (0..self.len).map(move |r| self.unrank(r))
    }
}

/// A validated instance. Immutable once constructed.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    bundles: Vec<String>,
    bundle_index: BTreeMap<String, usize>,
    types: Vec<Vec<ValuationType>>,
    space: ProfileSpace,
    /// `outcomes[rank * m + i]` is the bundle index assigned to agent `i`.
    outcomes: Vec<usize>,
    tolerance: f64,
}

impl Instance {
    /// Validates `parts`, reporting the first violated invariant.
    pub fn from_parts(parts: InstanceParts) -> Result<Self, ModelError> {
        let m = parts.agents;
        if m == 0 {
            return Err(ModelError::NoAgents);
        }
        if parts.bundles.is_empty() {
            return Err(ModelError::NoBundles);
        }
        let mut bundle_index = BTreeMap::new();
        for (k, b) in parts.bundles.iter().enumerate() {
            if bundle_index.insert(b.clone(), k).is_some() {
                return Err(ModelError::DuplicateBundle(b.clone()));
            }
        }
        if parts.types.len() != m {
            return Err(ModelError::TypeSpaceCount {
                expected: m,
                found: parts.types.len(),
            });
        }

        let mut types = Vec::with_capacity(m);
        for (agent, specs) in parts.types.into_iter().enumerate() {
            if specs.is_empty() {
                return Err(ModelError::EmptyTypeSpace(agent));
            }
            let mut space: Vec<ValuationType> = Vec::with_capacity(specs.len());
            for (type_index, spec) in specs.into_iter().enumerate() {
                let mut values = vec![f64::NAN; parts.bundles.len()];
                let mut seen = vec![false; parts.bundles.len()];
                for (bundle, v) in spec.values {
                    let Some(&k) = bundle_index.get(&bundle) else {
                        return Err(ModelError::UnknownBundle(bundle));
                    };
                    if seen[k] {
                        return Err(ModelError::RepeatedValue {
                            agent,
                            type_index,
                            bundle,
                        });
                    }
                    if !v.is_finite() {
                        return Err(ModelError::NonFiniteValue {
                            agent,
                            type_index,
                            bundle,
                        });
                    }
                    seen[k] = true;
                    values[k] = v;
                }
                if let Some(k) = seen.iter().position(|s| !s) {
                    return Err(ModelError::MissingValue {
                        agent,
                        type_index,
                        bundle: parts.bundles[k].clone(),
                    });
                }
                let ty = ValuationType {
                    name: spec.name,
                    values,
                };
                if let Some(first) = space.iter().position(|other| *other == ty) {
                    return Err(ModelError::DuplicateType {
                        agent,
                        first,
                        second: type_index,
                    });
                }
                space.push(ty);
            }
            types.push(space);
        }

        let space = ProfileSpace::new(types.iter().map(Vec::len).collect());
        let mut outcomes = vec![usize::MAX; space.len() * m];
        let mut filled = vec![false; space.len()];
        for (profile, assigned) in parts.allocation {
            let Some(rank) = space.rank(&profile) else {
                return Err(ModelError::BadProfile { profile });
            };
            if assigned.len() != m {
                return Err(ModelError::BadOutcome {
                    profile,
                    expected: m,
                    found: assigned.len(),
                });
            }
            if filled[rank] {
                return Err(ModelError::DuplicateProfile { profile });
            }
            for (i, b) in assigned.into_iter().enumerate() {
                let Some(&k) = bundle_index.get(&b) else {
                    return Err(ModelError::UnknownBundle(b));
                };
                outcomes[rank * m + i] = k;
            }
            filled[rank] = true;
        }
        if let Some(rank) = filled.iter().position(|f| !f) {
            return Err(ModelError::IncompleteAllocation {
                profile: space.unrank(rank),
            });
        }

        Ok(Self {
            bundles: parts.bundles,
            bundle_index,
            types,
            space,
            outcomes,
            tolerance: DEFAULT_TOLERANCE,
        })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self, ModelError> {
        if !tolerance.is_finite() || tolerance < 0.0 {
            return Err(ModelError::BadTolerance(tolerance));
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    /// Inverse of [`Instance::from_parts`].
    pub fn to_parts(&self) -> InstanceParts {
        let m = self.num_agents();
        InstanceParts {
            agents: m,
            bundles: self.bundles.clone(),
            types: self
                .types
                .iter()
                .map(|space| {
                    space
                        .iter()
                        .map(|ty| TypeSpec {
                            name: ty.name.clone(),
                            values: self
                                .bundles
                                .iter()
                                .cloned()
                                .zip(ty.values.iter().copied())
                                .collect(),
                        })
                        .collect()
                })
                .collect(),
            allocation: (0..self.space.len())
                .map(|r| {
                    let assigned = self.outcomes[r * m..(r + 1) * m]
                        .iter()
                        .map(|&k| self.bundles[k].clone())
                        .collect();
                    (self.space.unrank(r), assigned)
                })
                .collect(),
        }
    }

    pub fn num_agents(&self) -> usize {
        self.types.len()
    }

    pub fn bundles(&self) -> &[String] {
        &self.bundles
    }

    pub fn bundle_index(&self, name: &str) -> Option<usize> {
        self.bundle_index.get(name).copied()
    }

    pub fn type_space(&self, agent: usize) -> &[ValuationType] {
        &self.types[agent]
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn profile_space(&self) -> &ProfileSpace {
        &self.space
    }

    /// Value of bundle `bundle` (by index) to `agent` under its type `type_index`.
    pub fn value(&self, agent: usize, type_index: usize, bundle: usize) -> f64 {
        self.types[agent][type_index].values[bundle]
    }

    /// Value of the named bundle, `None` if no such bundle is declared.
    pub fn value_of(&self, agent: usize, type_index: usize, bundle: &str) -> Option<f64> {
        self.bundle_index(bundle)
            .map(|k| self.value(agent, type_index, k))
    }

    /// Bundle index assigned to `agent` at the profile of rank `rank`.
    pub fn assigned(&self, rank: usize, agent: usize) -> usize {
        self.outcomes[rank * self.num_agents() + agent]
    }

    pub fn outcome(&self, rank: usize) -> &[usize] {
        let m = self.num_agents();
        &self.outcomes[rank * m..(rank + 1) * m]
    }

    /// `v_i(a_j(v))`: the value agent `i` (under its type in `rank`) puts on
    /// the bundle that agent `j` receives at that profile.
    pub fn value_of_share(&self, rank: usize, i: usize, j: usize) -> f64 {
        let t = self.space.coordinate(rank, i);
        self.value(i, t, self.assigned(rank, j))
    }
}
