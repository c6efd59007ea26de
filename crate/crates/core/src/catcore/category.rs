use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::CatError;
use crate::units::Unit;

/// Object handle. Ids are 1-based and dense in insertion order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ObjectId(pub usize);

/// Generator morphism handle. Ids are 1-based and dense in insertion order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MorphismId(pub usize);

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "o{}", self.0)
    }
}

impl fmt::Display for MorphismId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m{}", self.0)
    }
}

/// An amount tagged with its unit of account.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Payload {
    pub unit: Unit,
    pub amount: f64,
}

impl Payload {
    pub fn new(unit: Unit, amount: f64) -> Self {
        Self { unit, amount }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Object {
    pub id: ObjectId,
    pub name: String,
    pub payload: Option<Payload>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Morphism {
    pub id: MorphismId,
    pub src: ObjectId,
    pub dst: ObjectId,
    pub label: String,
    /// Booking amount carried by the arrow. Ignored by every law check.
    pub weight: f64,
}

/// How parallel composites are identified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CompositionMode {
    /// Free category on the generating graph: two composites are equal iff
    /// they are the same generator sequence.
    #[default]
    Free,
    /// Thin (preorder) category: any two parallel composites are equal.
    Thin,
}

/// A composite morphism, written as a generator path in diagrammatic order.
/// The empty path on `src == dst` is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub src: ObjectId,
    pub dst: ObjectId,
    pub steps: Vec<MorphismId>,
}

impl Path {
    pub fn identity(obj: ObjectId) -> Self {
        Self {
            src: obj,
            dst: obj,
            steps: Vec::new(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.steps.is_empty()
    }
}

/// A finitely presented category: named objects with optional payloads,
/// generator morphisms forming a multigraph, implicit identities, and
/// composition by path concatenation.
#[derive(Debug, Clone, Default)]
pub struct FiniteCategory {
    objects: Vec<Object>,
    morphisms: Vec<Morphism>,
    by_name: HashMap<String, ObjectId>,
    mode: CompositionMode,
}

impl PartialEq for FiniteCategory {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.morphisms == other.morphisms
            && self.mode == other.mode
    }
}

impl FiniteCategory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn thin() -> Self {
        Self {
            mode: CompositionMode::Thin,
            ..Self::default()
        }
    }

    pub fn mode(&self) -> CompositionMode {
        self.mode
    }

    pub fn add_object(
        &mut self,
        name: impl Into<String>,
        payload: Option<Payload>,
    ) -> Result<ObjectId, CatError> {
        let name = name.into();
        if self.by_name.contains_key(&name) {
            return Err(CatError::DuplicateName(name));
        }
        let id = ObjectId(self.objects.len() + 1);
        self.by_name.insert(name.clone(), id);
        self.objects.push(Object { id, name, payload });
        Ok(id)
    }

    pub fn get_object(&self, name: &str) -> Result<ObjectId, CatError> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| CatError::NotFound(name.to_string()))
    }

    pub fn add_morphism(
        &mut self,
        src: ObjectId,
        dst: ObjectId,
        weight: f64,
    ) -> Result<MorphismId, CatError> {
        self.add_labeled_morphism(src, dst, "", weight)
    }

    pub fn add_labeled_morphism(
        &mut self,
        src: ObjectId,
        dst: ObjectId,
        label: impl Into<String>,
        weight: f64,
    ) -> Result<MorphismId, CatError> {
        for end in [src, dst] {
            if !self.contains_object(end) {
                return Err(CatError::DanglingEndpoint(end));
            }
        }
        let id = MorphismId(self.morphisms.len() + 1);
        self.morphisms.push(Morphism {
            id,
            src,
            dst,
            label: label.into(),
            weight,
        });
        Ok(id)
    }

    /// Replaces the amount of a payload-carrying object.
    pub fn update_object(&mut self, name: &str, amount: f64) -> Result<(), CatError> {
        let id = self.get_object(name)?;
        let obj = &mut self.objects[id.0 - 1];
        match obj.payload.as_mut() {
            Some(p) => {
                p.amount = amount;
                Ok(())
            }
            None => Err(CatError::PayloadMismatch(name.to_string())),
        }
    }

    pub fn contains_object(&self, id: ObjectId) -> bool {
        id.0 >= 1 && id.0 <= self.objects.len()
    }

    pub fn contains_morphism(&self, id: MorphismId) -> bool {
        id.0 >= 1 && id.0 <= self.morphisms.len()
    }

    pub fn object(&self, id: ObjectId) -> Result<&Object, CatError> {
        self.objects
            .get(id.0.wrapping_sub(1))
            .ok_or(CatError::UnknownObject(id))
    }

    pub fn morphism(&self, id: MorphismId) -> Result<&Morphism, CatError> {
        self.morphisms
            .get(id.0.wrapping_sub(1))
            .ok_or(CatError::UnknownMorphism(id))
    }

    pub fn morphism_mut(&mut self, id: MorphismId) -> Result<&mut Morphism, CatError> {
        self.morphisms
            .get_mut(id.0.wrapping_sub(1))
            .ok_or(CatError::UnknownMorphism(id))
    }

    pub fn amount(&self, name: &str) -> Result<f64, CatError> {
        let id = self.get_object(name)?;
        self.objects[id.0 - 1]
            .payload
            .map(|p| p.amount)
            .ok_or_else(|| CatError::PayloadMismatch(name.to_string()))
    }

    pub fn objects(&self) -> &[Object] {
        &self.objects
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn generator(&self, id: MorphismId) -> Result<Path, CatError> {
        let m = self.morphism(id)?;
        Ok(Path {
            src: m.src,
            dst: m.dst,
            steps: vec![id],
        })
    }

    /// `first` followed by `then`, i.e. `then ∘ first`.
    pub fn compose(&self, first: &Path, then: &Path) -> Result<Path, CatError> {
        if first.dst != then.src {
            return Err(CatError::NotComposable {
                left_dst: first.dst,
                right_src: then.src,
            });
        }
        let mut steps = first.steps.clone();
        steps.extend_from_slice(&then.steps);
        Ok(Path {
            src: first.src,
            dst: then.dst,
            steps,
        })
    }

    /// Checks that a path is well formed in this category.
    pub fn validate_path(&self, path: &Path) -> Result<(), CatError> {
        for end in [path.src, path.dst] {
            if !self.contains_object(end) {
                return Err(CatError::UnknownObject(end));
            }
        }
        let mut at = path.src;
        for &step in &path.steps {
            let m = self.morphism(step)?;
            if m.src != at {
                return Err(CatError::NotComposable {
                    left_dst: at,
                    right_src: m.src,
                });
            }
            at = m.dst;
        }
        if at != path.dst {
            return Err(CatError::NotComposable {
                left_dst: at,
                right_src: path.dst,
            });
        }
        Ok(())
    }

    /// Equality of two composites under this category's presentation.
    pub fn paths_equal(&self, a: &Path, b: &Path) -> bool {
        if a.src != b.src || a.dst != b.dst {
            return false;
        }
        match self.mode {
            CompositionMode::Free => a.steps == b.steps,
            CompositionMode::Thin => true,
        }
    }

    /// Sum of the weights along a path.
    pub fn path_weight(&self, path: &Path) -> Result<f64, CatError> {
        self.fold_weights(0.0, path)
    }

    /// Left fold `start + w1 + w2 + ...` along a path.
    pub fn fold_weights(&self, start: f64, path: &Path) -> Result<f64, CatError> {
        path.steps
            .iter()
            .try_fold(start, |acc, &m| Ok(acc + self.morphism(m)?.weight))
    }

    /// All composable generator pairs `(f, g)` with `dst(f) == src(g)`.
    pub fn composable_pairs(&self) -> impl Iterator<Item = (MorphismId, MorphismId)> + '_ {
        self.morphisms.iter().flat_map(move |f| {
            self.morphisms
                .iter()
                .filter(move |g| g.src == f.dst)
                .map(move |g| (f.id, g.id))
        })
    }

    /// Checks `(h ∘ g) ∘ f == h ∘ (g ∘ f)` on every composable generator
    /// triple and returns the triples that fail.
    pub fn associativity_failures(&self) -> Vec<(MorphismId, MorphismId, MorphismId)> {
        let mut failures = Vec::new();
        for (f, g) in self.composable_pairs() {
            let g_dst = self.morphisms[g.0 - 1].dst;
            for h in self.morphisms.iter().filter(|h| h.src == g_dst) {
                let (pf, pg, ph) = (
                    self.generator(f).expect("listed"),
                    self.generator(g).expect("listed"),
                    self.generator(h.id).expect("listed"),
                );
                let left = self.compose(&self.compose(&pf, &pg).expect("composable"), &ph);
                let right = self.compose(&pf, &self.compose(&pg, &ph).expect("composable"));
                let ok = match (left, right) {
                    (Ok(l), Ok(r)) => self.paths_equal(&l, &r),
                    _ => false,
                };
                if !ok {
                    failures.push((f, g, h.id));
                }
            }
        }
        failures
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_object_gets_id_one() {
        let mut cat = FiniteCategory::new();
        let id = cat
            .add_object("AccLabBank", Some(Payload::new(Unit::Eu, 0.0)))
            .unwrap();
        assert_eq!(id, ObjectId(1));
        assert_eq!(cat.object_count(), 1);
    }

    #[test]
    fn duplicate_name_rejected() {
        let mut cat = FiniteCategory::new();
        cat.add_object("AccLabBank", None).unwrap();
        assert_eq!(
            cat.add_object("AccLabBank", None),
            Err(CatError::DuplicateName("AccLabBank".into()))
        );
    }

    #[test]
    fn get_object_round_trip_and_missing() {
        let mut cat = FiniteCategory::new();
        cat.add_object("AccComBank", None).unwrap();
        let id = cat
            .add_object("AccComLoan", Some(Payload::new(Unit::Eu, 0.0)))
            .unwrap();
        assert_eq!(cat.get_object("AccComLoan"), Ok(id));
        assert_eq!(
            cat.get_object("NoSuch"),
            Err(CatError::NotFound("NoSuch".into()))
        );
    }

    #[test]
    fn morphisms_form_a_multigraph() {
        let mut cat = FiniteCategory::new();
        let lab = cat.add_object("Lab", None).unwrap();
        let bank = cat.add_object("Bank", None).unwrap();
        let a = cat.add_morphism(lab, bank, 52.0).unwrap();
        let b = cat.add_morphism(lab, bank, 52.0).unwrap();
        assert_ne!(a, b);
        assert_eq!(cat.morphism(a).unwrap().weight, 52.0);
        assert_eq!(
            cat.add_morphism(lab, ObjectId(9), 1.0),
            Err(CatError::DanglingEndpoint(ObjectId(9)))
        );
    }

    #[test]
    fn update_object_replaces_amount_only() {
        let mut cat = FiniteCategory::new();
        cat.add_object("AccResBank", Some(Payload::new(Unit::Eu, 0.0)))
            .unwrap();
        cat.add_object("Tag", None).unwrap();
        cat.update_object("AccResBank", 208.0).unwrap();
        assert_eq!(cat.amount("AccResBank"), Ok(208.0));
        cat.update_object("AccResBank", 0.0).unwrap();
        assert_eq!(cat.amount("AccResBank"), Ok(0.0));
        assert_eq!(
            cat.object(ObjectId(1)).unwrap().payload.unwrap().unit,
            Unit::Eu
        );
        assert_eq!(
            cat.update_object("Missing", 1.0),
            Err(CatError::NotFound("Missing".into()))
        );
        assert_eq!(
            cat.update_object("Tag", 1.0),
            Err(CatError::PayloadMismatch("Tag".into()))
        );
    }

    #[test]
    fn composition_is_associative_on_a_chain() {
        let mut cat = FiniteCategory::new();
        let ids: Vec<_> = (0..4)
            .map(|i| cat.add_object(format!("o{i}"), None).unwrap())
            .collect();
        for w in ids.windows(2) {
            cat.add_morphism(w[0], w[1], 1.0).unwrap();
        }
        cat.add_morphism(ids[1], ids[1], 0.0).unwrap();
        assert!(cat.associativity_failures().is_empty());
        let f = cat.generator(MorphismId(1)).unwrap();
        let h = cat.generator(MorphismId(3)).unwrap();
        assert!(cat.compose(&f, &h).is_err());
    }

    #[test]
    fn fold_weights_is_left_to_right() {
        let mut cat = FiniteCategory::thin();
        let a = cat.add_object("a", None).unwrap();
        let b = cat.add_object("b", None).unwrap();
        let c = cat.add_object("c", None).unwrap();
        let f = cat.add_morphism(a, b, 208.0).unwrap();
        let g = cat.add_morphism(b, c, -8.0).unwrap();
        let p = cat
            .compose(&cat.generator(f).unwrap(), &cat.generator(g).unwrap())
            .unwrap();
        assert_eq!(cat.fold_weights(1.0, &p), Ok(1.0 + 208.0 - 8.0));
        let q = Path {
            src: a,
            dst: c,
            steps: vec![],
        };
        assert!(cat.paths_equal(&p, &q));
        assert!(cat.validate_path(&q).is_err());
    }
}
