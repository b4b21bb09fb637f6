use std::collections::HashMap;

use rand::Rng;

use crate::analysis::ByzantineSpec;
use crate::error::{QpmaError, Result};
use crate::field::PrimeField;
use crate::rng::{stream_rng, Stream};

/// How the parties' sets are obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum PartySets {
    /// One list of labels per party.
    Explicit(Vec<Vec<String>>),
    /// Each party holds each element independently with probability `q`,
    /// drawn from the scenario's set-generation stream.
    Bernoulli { q: f64 },
}

/// Everything needed for one aggregation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub parties: usize,
    pub universal_set: Vec<String>,
    pub party_sets: PartySets,
    pub leader: usize,
    pub prime_override: Option<u64>,
    pub master_seed: u64,
    /// When false the leader skips encoding and adds its own membership
    /// after measurement.
    pub leader_encodes: bool,
    pub byzantine: Option<ByzantineSpec>,
}

impl Scenario {
    pub fn new(
        universal_set: Vec<String>,
        party_sets: Vec<Vec<String>>,
        leader: usize,
        master_seed: u64,
    ) -> Self {
        Self {
            parties: party_sets.len(),
            universal_set,
            party_sets: PartySets::Explicit(party_sets),
            leader,
            prime_override: None,
            master_seed,
            leader_encodes: true,
            byzantine: None,
        }
    }

    pub fn elements(&self) -> usize {
        self.universal_set.len()
    }

    /// Field used by the run: the override if present, else the smallest
    /// prime at least the party count.
    pub fn field(&self) -> Result<PrimeField> {
        match self.prime_override {
            Some(p) => {
                let field = PrimeField::new(p)?;
                if (p as usize) < self.parties {
                    return Err(QpmaError::PrimeBelowParties {
                        prime: p,
                        parties: self.parties,
                    });
                }
                Ok(field)
            }
            None => Ok(PrimeField::for_parties(self.parties)),
        }
    }

    /// Checks every scenario invariant and returns the field.
    pub fn validate(&self) -> Result<PrimeField> {
        if self.parties < 2 {
            return Err(QpmaError::scenario(
                "parties_at_least_two",
                format!("got {} parties", self.parties),
            ));
        }
        if self.universal_set.is_empty() {
            return Err(QpmaError::scenario("universal_set_nonempty", "K must be at least 1"));
        }
        let ordering = CanonicalOrdering::new(&self.universal_set)?;
        if self.leader >= self.parties {
            return Err(QpmaError::scenario(
                "leader_in_range",
                format!("leader {} with {} parties", self.leader, self.parties),
            ));
        }
        match &self.party_sets {
            PartySets::Explicit(sets) => {
                if sets.len() != self.parties {
                    return Err(QpmaError::scenario(
                        "one_set_per_party",
                        format!("{} sets for {} parties", sets.len(), self.parties),
                    ));
                }
                for set in sets {
                    incidence(set, &ordering)?;
                }
            }
            PartySets::Bernoulli { q } => {
                if !(0.0..=1.0).contains(q) {
                    return Err(QpmaError::scenario("q_in_unit_interval", format!("q = {q}")));
                }
            }
        }
        let field = self.field()?;
        if let Some(spec) = &self.byzantine {
            spec.validate(self.parties, self.leader, self.elements())?;
        }
        Ok(field)
    }

    pub fn ordering(&self) -> Result<CanonicalOrdering> {
        CanonicalOrdering::new(&self.universal_set)
    }

    /// Concrete sets, generating them when the scenario asks for it.
    pub fn resolved_sets(&self) -> Result<Vec<Vec<String>>> {
        match &self.party_sets {
            PartySets::Explicit(sets) => Ok(sets.clone()),
            PartySets::Bernoulli { q } => {
                let mut rng = stream_rng(self.master_seed, Stream::PartySets);
                Ok((0..self.parties)
                    .map(|_| {
                        self.universal_set
                            .iter()
                            .filter(|_| rng.random_bool(*q))
                            .cloned()
                            .collect()
                    })
                    .collect())
            }
        }
    }

    pub fn incidence_vectors(&self) -> Result<Vec<IncidenceVector>> {
        let ordering = self.ordering()?;
        self.resolved_sets()?
            .iter()
            .map(|set| incidence(set, &ordering))
            .collect()
    }
}

/// Bijection between universal-set labels and `[K]`, in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalOrdering {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl CanonicalOrdering {
    pub fn new(universal_set: &[String]) -> Result<Self> {
        let mut index = HashMap::with_capacity(universal_set.len());
        for (i, label) in universal_set.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(QpmaError::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self {
            labels: universal_set.to_vec(),
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

pub fn canonical_ordering(universal_set: &[String]) -> Result<CanonicalOrdering> {
    CanonicalOrdering::new(universal_set)
}

/// 0/1 membership vector of one party over the ordered universal set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IncidenceVector(Vec<u32>);

impl IncidenceVector {
    pub fn from_bits(bits: Vec<u32>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        Self(bits)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, element: usize) -> u32 {
        self.0[element]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn incidence<S: AsRef<str>>(set: &[S], ordering: &CanonicalOrdering) -> Result<IncidenceVector> {
    let mut bits = vec![0u32; ordering.len()];
    for label in set {
        let label = label.as_ref();
        let i = ordering
            .index_of(label)
            .ok_or_else(|| QpmaError::UnknownLabel(label.to_string()))?;
        bits[i] = 1;
    }
    Ok(IncidenceVector(bits))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn ordering_follows_input_order() {
        let o = canonical_ordering(&labels(&["a", "b", "c", "d"])).unwrap();
        assert_eq!((0..4).map(|i| o.label(i)).collect::<Vec<_>>(), ["a", "b", "c", "d"]);
        let single = canonical_ordering(&labels(&["x"])).unwrap();
        assert_eq!(single.index_of("x"), Some(0));
        let permuted = canonical_ordering(&labels(&["d", "a", "c"])).unwrap();
        assert_eq!(permuted.index_of("d"), Some(0));
        assert_eq!(permuted.index_of("c"), Some(2));
        assert_eq!(
            canonical_ordering(&labels(&["a", "b", "a"])),
            Err(QpmaError::DuplicateLabel("a".into()))
        );
    }

    #[test]
    fn incidence_vectors_of_worked_example() {
        let o = canonical_ordering(&labels(&["a", "b", "c", "d"])).unwrap();
        assert_eq!(incidence(&["a", "c"], &o).unwrap().entries(), &[1, 0, 1, 0]);
        assert_eq!(incidence(&["a", "b", "c"], &o).unwrap().entries(), &[1, 1, 1, 0]);
        assert_eq!(incidence(&["c"], &o).unwrap().entries(), &[0, 0, 1, 0]);
        assert_eq!(incidence::<&str>(&[], &o).unwrap().entries(), &[0, 0, 0, 0]);
        assert_eq!(incidence(&["z"], &o), Err(QpmaError::UnknownLabel("z".into())));
    }

    #[test]
    fn validation_names_the_invariant() {
        let u = labels(&["a", "b"]);
        let mut s = Scenario::new(u.clone(), vec![labels(&["a"]), labels(&["b"])], 0, 1);
        assert_eq!(s.validate().unwrap().modulus(), 2);

        s.leader = 2;
        assert!(matches!(
            s.validate(),
            Err(QpmaError::InvalidScenario { invariant: "leader_in_range", .. })
        ));
        s.leader = 0;
        s.prime_override = Some(4);
        assert_eq!(s.validate(), Err(QpmaError::NotPrime(4)));
        s.prime_override = Some(7);
        assert_eq!(s.validate().unwrap().modulus(), 7);

        let mut three = Scenario::new(u.clone(), vec![vec![], vec![], vec![]], 0, 1);
        three.prime_override = Some(2);
        assert!(matches!(three.validate(), Err(QpmaError::PrimeBelowParties { .. })));

        let lone = Scenario::new(u.clone(), vec![vec![]], 0, 1);
        assert!(matches!(
            lone.validate(),
            Err(QpmaError::InvalidScenario { invariant: "parties_at_least_two", .. })
        ));

        let mut gen = Scenario::new(u, vec![vec![], vec![]], 0, 1);
        gen.party_sets = PartySets::Bernoulli { q: 1.5 };
        assert!(matches!(
            gen.validate(),
            Err(QpmaError::InvalidScenario { invariant: "q_in_unit_interval", .. })
        ));
    }

    #[test]
    fn generated_sets_are_seeded() {
        let u = labels(&["a", "b", "c", "d", "e"]);
        let mut s = Scenario::new(u, vec![vec![]; 4], 0, 99);
        s.party_sets = PartySets::Bernoulli { q: 0.5 };
        let first = s.resolved_sets().unwrap();
        assert_eq!(first, s.resolved_sets().unwrap());
        assert_eq!(first.len(), 4);
        s.party_sets = PartySets::Bernoulli { q: 1.0 };
        assert!(s.incidence_vectors().unwrap().iter().all(|e| e.entries() == [1; 5]));
    }
}
