//! Groundings: data domains, typed partitions over them, and predicate networks.
//!
//! A domain is a matrix of individuals (one row each), either fixed features
//! or trainable embeddings. A partition is a non-empty list of row indices
//! into one domain; quantifying over a variable ranges over the partition of
//! the same name. Linked partitions are quantified jointly: once one member
//! of a link group is bound to position `i`, quantifying another member
//! binds it to position `i` as well instead of ranging over all rows. This is
//! how lists of known pairs (e.g. friendships) are expressed.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::autodiff::{AutodiffError, DenseNetwork};

use super::ValidationError;

#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    rows: Vec<Vec<f64>>,
    dim: usize,
    trainable: bool,
}

impl Domain {
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_trainable(&self) -> bool {
        self.trainable
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub domain: String,
    pub indices: Vec<usize>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Predicate {
    pub arity: usize,
    pub network: DenseNetwork,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroundingTable {
    domains: BTreeMap<String, Domain>,
    partitions: BTreeMap<String, Partition>,
    links: Vec<Vec<String>>,
    predicates: BTreeMap<String, Predicate>,
}

impl GroundingTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_domain(
        &mut self,
        name: &str,
        rows: Vec<Vec<f64>>,
        trainable: bool,
    ) -> Result<(), ValidationError> {
        let dim = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() || dim == 0 {
            return Err(ValidationError::EmptyDomain(name.to_string()));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != dim) {
            return Err(ValidationError::RaggedDomain { domain: name.to_string(), row: bad });
        }
        self.domains.insert(name.to_string(), Domain { rows, dim, trainable });
        Ok(())
    }

    pub fn add_partition(
        &mut self,
        name: &str,
        domain: &str,
        indices: Vec<usize>,
    ) -> Result<(), ValidationError> {
        let partition = Partition { domain: domain.to_string(), indices };
        check_partition(name, &partition, &self.domains)?;
        self.partitions.insert(name.to_string(), partition);
        Ok(())
    }

    /// Adds `name` as the set union of existing partitions over one domain,
    /// keeping first-occurrence order.
    pub fn add_union(&mut self, name: &str, parts: &[&str]) -> Result<(), ValidationError> {
        let mut domain: Option<&str> = None;
        let mut indices = Vec::new();
        for part in parts {
            let p = self
                .partitions
                .get(*part)
                .ok_or_else(|| ValidationError::UnknownPartition { context: name.to_string(), partition: part.to_string() })?;
            match domain {
                None => domain = Some(&p.domain),
                Some(d) if d != p.domain => {
                    return Err(ValidationError::DomainMismatch {
                        context: name.to_string(),
                        expected: d.to_string(),
                        actual: p.domain.clone(),
                    })
                }
                _ => {}
            }
            for &i in &p.indices {
                if !indices.contains(&i) {
                    indices.push(i);
                }
            }
        }
        let domain = domain
            .ok_or_else(|| ValidationError::EmptyPartition(name.to_string()))?
            .to_string();
        self.add_partition(name, &domain, indices)
    }

    /// Declares partitions that are quantified jointly (zipped by position).
    pub fn link(&mut self, names: &[&str]) -> Result<(), ValidationError> {
        let group: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        check_link(&group, &self.partitions)?;
        self.links.push(group);
        Ok(())
    }

    pub fn add_predicate(&mut self, name: &str, arity: usize, network: DenseNetwork) {
        self.predicates.insert(name.to_string(), Predicate { arity, network });
    }

    pub fn domain(&self, name: &str) -> Option<&Domain> {
        self.domains.get(name)
    }

    pub fn domains(&self) -> impl Iterator<Item = (&str, &Domain)> {
        self.domains.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn partition(&self, name: &str) -> Option<&Partition> {
        self.partitions.get(name)
    }

    pub fn partitions(&self) -> impl Iterator<Item = (&str, &Partition)> {
        self.partitions.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn predicate(&self, name: &str) -> Option<&Predicate> {
        self.predicates.get(name)
    }

    pub fn predicate_mut(&mut self, name: &str) -> Option<&mut Predicate> {
        self.predicates.get_mut(name)
    }

    pub fn predicates(&self) -> impl Iterator<Item = (&str, &Predicate)> {
        self.predicates.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn links(&self) -> &[Vec<String>] {
        &self.links
    }

    /// Partitions sharing a link group with `name`, excluding `name`.
    pub fn linked_with<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.links
            .iter()
            .filter(move |g| g.iter().any(|p| p == name))
            .flat_map(|g| g.iter().map(String::as_str))
            .filter(move |p| *p != name)
    }

    /// Feature rows of a partition, in partition order.
    pub fn partition_rows(&self, name: &str) -> Option<Vec<Vec<f64>>> {
        let p = self.partitions.get(name)?;
        let d = self.domains.get(&p.domain)?;
        Some(p.indices.iter().map(|&i| d.rows[i].clone()).collect())
    }

    /// Keeps only the first `keep` individuals (at least one) of a partition.
    pub fn restrict_partition(&mut self, name: &str, keep: usize) -> Result<(), ValidationError> {
        let p = self
            .partitions
            .get_mut(name)
            .ok_or_else(|| ValidationError::UnknownPartition { context: "restrict".into(), partition: name.to_string() })?;
        p.indices.truncate(keep.max(1));
        Ok(())
    }

    /// Internal consistency: partitions reference existing domains and
    /// in-range rows, link groups have equal lengths.
    pub fn validate(&self) -> Vec<ValidationError> {
        let mut errors = Vec::new();
        for (name, p) in &self.partitions {
            if let Err(e) = check_partition(name, p, &self.domains) {
                errors.push(e);
            }
        }
        for group in &self.links {
            if let Err(e) = check_link(group, &self.partitions) {
                errors.push(e);
            }
        }
        errors
    }

    /// Number of trainable reals: every predicate network, then every
    /// trainable domain.
    pub fn param_count(&self) -> usize {
        self.predicates.values().map(|p| p.network.param_count()).sum::<usize>()
            + self
                .domains
                .values()
                .filter(|d| d.trainable)
                .map(|d| d.rows.len() * d.dim)
                .sum::<usize>()
    }

    /// Trainable parameters in canonical order (predicates by name, then
    /// trainable domains by name, row-major).
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for p in self.predicates.values() {
            out.extend(p.network.params());
        }
        for d in self.domains.values().filter(|d| d.trainable) {
            for row in &d.rows {
                out.extend_from_slice(row);
            }
        }
        out
    }

    pub fn set_params(&mut self, values: &[f64]) -> Result<(), AutodiffError> {
        if values.len() != self.param_count() {
            return Err(AutodiffError::LengthMismatch { expected: self.param_count(), actual: values.len() });
        }
        let mut rest = values;
        for p in self.predicates.values_mut() {
            let (head, tail) = rest.split_at(p.network.param_count());
            p.network.set_params(head)?;
            rest = tail;
        }
        for d in self.domains.values_mut().filter(|d| d.trainable) {
            for row in &mut d.rows {
                let (head, tail) = rest.split_at(row.len());
                row.copy_from_slice(head);
                rest = tail;
            }
        }
        Ok(())
    }

    /// Fresh Glorot weights for every network and N(0,1) rows for every
    /// trainable domain. Fixed feature domains are untouched.
    pub fn reinitialize<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for p in self.predicates.values_mut() {
            p.network.init_glorot(rng);
        }
        for d in self.domains.values_mut().filter(|d| d.trainable) {
            for row in &mut d.rows {
                for x in row.iter_mut() {
                    *x = StandardNormal.sample(rng);
                }
            }
        }
    }
}

fn check_partition(
    name: &str,
    p: &Partition,
    domains: &BTreeMap<String, Domain>,
) -> Result<(), ValidationError> {
    let d = domains.get(&p.domain).ok_or_else(|| ValidationError::UnknownDomain {
        partition: name.to_string(),
        domain: p.domain.clone(),
    })?;
    if p.indices.is_empty() {
        return Err(ValidationError::EmptyPartition(name.to_string()));
    }
    if let Some(&bad) = p.indices.iter().find(|&&i| i >= d.rows.len()) {
        return Err(ValidationError::RowOutOfRange {
            partition: name.to_string(),
            row: bad,
            len: d.rows.len(),
        });
    }
    Ok(())
}

fn check_link(group: &[String], partitions: &BTreeMap<String, Partition>) -> Result<(), ValidationError> {
    let mut len = None;
    for name in group {
        let p = partitions.get(name).ok_or_else(|| ValidationError::UnknownPartition {
            context: "link".into(),
            partition: name.clone(),
        })?;
        match len {
            None => len = Some(p.len()),
            Some(l) if l != p.len() => {
                return Err(ValidationError::LinkLengthMismatch { partitions: group.to_vec() })
            }
            _ => {}
        }
    }
    Ok(())
}
