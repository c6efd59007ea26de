//! Pullbacks and pushouts in the category of finite sets.

use serde::{Deserialize, Serialize};

use super::CatError;

/// A finite set of labeled elements; element identity is the index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct FinSet {
    labels: Vec<String>,
}

impl FinSet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Self {
        Self {
            labels: labels.into_iter().map(Into::into).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// A total function between finite sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinSetMap {
    domain: FinSet,
    codomain: FinSet,
    mapping: Vec<usize>,
}

impl FinSetMap {
    pub fn new(domain: FinSet, codomain: FinSet, mapping: Vec<usize>) -> Result<Self, CatError> {
        if mapping.len() != domain.len() {
            return Err(CatError::InvalidMap(format!(
                "mapping has {} entries for a domain of {}",
                mapping.len(),
                domain.len()
            )));
        }
        if let Some(&bad) = mapping.iter().find(|&&j| j >= codomain.len()) {
            return Err(CatError::InvalidMap(format!(
                "image {bad} outside codomain of size {}",
                codomain.len()
            )));
        }
        Ok(Self {
            domain,
            codomain,
            mapping,
        })
    }

    /// Builds a map from `(domain label, codomain label)` pairs.
    pub fn from_pairs(
        domain: FinSet,
        codomain: FinSet,
        pairs: &[(&str, &str)],
    ) -> Result<Self, CatError> {
        let mut mapping = vec![usize::MAX; domain.len()];
        for (x, y) in pairs {
            let i = domain
                .index_of(x)
                .ok_or_else(|| CatError::InvalidMap(format!("`{x}` not in domain")))?;
            let j = codomain
                .index_of(y)
                .ok_or_else(|| CatError::InvalidMap(format!("`{y}` not in codomain")))?;
            mapping[i] = j;
        }
        if let Some(i) = mapping.iter().position(|&j| j == usize::MAX) {
            return Err(CatError::InvalidMap(format!(
                "`{}` unmapped",
                domain.label(i)
            )));
        }
        Self::new(domain, codomain, mapping)
    }

    pub fn identity(set: FinSet) -> Self {
        let mapping = (0..set.len()).collect();
        Self {
            domain: set.clone(),
            codomain: set,
            mapping,
        }
    }

    pub fn domain(&self) -> &FinSet {
        &self.domain
    }

    pub fn codomain(&self) -> &FinSet {
        &self.codomain
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn apply(&self, i: usize) -> usize {
        self.mapping[i]
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &FinSetMap) -> Result<FinSetMap, CatError> {
        if self.codomain != then.domain {
            return Err(CatError::CodomainMismatch);
        }
        let mapping = self.mapping.iter().map(|&j| then.mapping[j]).collect();
        Ok(FinSetMap {
            domain: self.domain.clone(),
            codomain: then.codomain.clone(),
            mapping,
        })
    }
}

/// Result of a pullback: the apex set of matching pairs and its two projections.
#[derive(Debug, Clone, PartialEq)]
pub struct Pullback {
    pub pairs: Vec<(usize, usize)>,
    pub apex: FinSet,
    pub proj_a: FinSetMap,
    pub proj_b: FinSetMap,
}

/// `P = {(a, b) | f(a) = g(b)}`, ordered lexicographically by `(a, b)`.
pub fn finset_pullback(f: &FinSetMap, g: &FinSetMap) -> Result<Pullback, CatError> {
    if f.codomain != g.codomain {
        return Err(CatError::CodomainMismatch);
    }
    let (a_set, b_set) = (&f.domain, &g.domain);
    let pairs: Vec<(usize, usize)> = (0..a_set.len())
        .flat_map(|a| {
            (0..b_set.len())
                .filter(move |&b| f.apply(a) == g.apply(b))
                .map(move |b| (a, b))
        })
        .collect();
    let apex = FinSet::new(
        pairs
            .iter()
            .map(|&(a, b)| format!("({},{})", a_set.label(a), b_set.label(b))),
    );
    let proj_a = FinSetMap::new(
        apex.clone(),
        a_set.clone(),
        pairs.iter().map(|p| p.0).collect(),
    )?;
    let proj_b = FinSetMap::new(
        apex.clone(),
        b_set.clone(),
        pairs.iter().map(|p| p.1).collect(),
    )?;
    Ok(Pullback {
        pairs,
        apex,
        proj_a,
        proj_b,
    })
}

/// Element of the disjoint union `A ⊔ B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left(usize),
    Right(usize),
}

/// Result of a pushout: equivalence classes of `A ⊔ B` and the two injections.
#[derive(Debug, Clone, PartialEq)]
pub struct Pushout {
    pub classes: Vec<Vec<Side>>,
    pub apex: FinSet,
    pub inj_a: FinSetMap,
    pub inj_b: FinSetMap,
}

/// `P = (A ⊔ B) / ~` with `f(c) ~ g(c)`. Classes are ordered by their first
/// member in `A ⊔ B` order (all of `A`, then all of `B`).
pub fn finset_pushout(f: &FinSetMap, g: &FinSetMap) -> Result<Pushout, CatError> {
    if f.domain != g.domain {
        return Err(CatError::DomainMismatch);
    }
    let (a_set, b_set) = (&f.codomain, &g.codomain);
    let n_a = a_set.len();
    let mut parent: Vec<usize> = (0..n_a + b_set.len()).collect();

    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    for c in 0..f.domain.len() {
        let ra = find(&mut parent, f.apply(c));
        let rb = find(&mut parent, n_a + g.apply(c));
        if ra != rb {
            // Keep the smaller index as root so class order is stable.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            parent[hi] = lo;
        }
    }

    let mut class_of_root = vec![usize::MAX; parent.len()];
    let mut classes: Vec<Vec<Side>> = Vec::new();
    let mut assignment = vec![0usize; parent.len()];
    #[allow(clippy::needless_range_loop)]
    for x in 0..parent.len() {
        let r = find(&mut parent, x);
        if class_of_root[r] == usize::MAX {
            class_of_root[r] = classes.len();
            classes.push(Vec::new());
        }
        let k = class_of_root[r];
        classes[k].push(if x < n_a {
            Side::Left(x)
        } else {
            Side::Right(x - n_a)
        });
        assignment[x] = k;
    }

    let label = |s: &Side| match *s {
        Side::Left(i) => a_set.label(i).to_string(),
        Side::Right(j) => b_set.label(j).to_string(),
    };
    let apex = FinSet::new(classes.iter().map(|members| {
        if members.len() == 1 {
            label(&members[0])
        } else {
            format!(
                "[{}]",
                members.iter().map(label).collect::<Vec<_>>().join("=")
            )
        }
    }));
    let inj_a = FinSetMap::new(a_set.clone(), apex.clone(), assignment[..n_a].to_vec())?;
    let inj_b = FinSetMap::new(b_set.clone(), apex.clone(), assignment[n_a..].to_vec())?;
    Ok(Pushout {
        classes,
        apex,
        inj_a,
        inj_b,
    })
}
