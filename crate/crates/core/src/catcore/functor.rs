use std::collections::BTreeMap;

use super::category::{FiniteCategory, MorphismId, ObjectId, Path};
use super::{CatError, LawReport, LawViolation};

/// A functor between two presented categories, given on generators.
///
/// Morphisms map to composites in the target so that a generator may be
/// sent to an identity or to a longer path.
#[derive(Debug, Clone)]
pub struct Functor<'c> {
    pub source: &'c FiniteCategory,
    pub target: &'c FiniteCategory,
    object_map: BTreeMap<ObjectId, ObjectId>,
    morphism_map: BTreeMap<MorphismId, Path>,
}

impl<'c> Functor<'c> {
    pub fn new(source: &'c FiniteCategory, target: &'c FiniteCategory) -> Self {
        Self {
            source,
            target,
            object_map: BTreeMap::new(),
            morphism_map: BTreeMap::new(),
        }
    }

    pub fn identity(cat: &'c FiniteCategory) -> Self {
        let mut f = Self::new(cat, cat);
        for o in cat.objects() {
            f.object_map.insert(o.id, o.id);
        }
        for m in cat.morphisms() {
            f.morphism_map.insert(
                m.id,
                Path {
                    src: m.src,
                    dst: m.dst,
                    steps: vec![m.id],
                },
            );
        }
        f
    }

    pub fn map_object(&mut self, from: ObjectId, to: ObjectId) {
        self.object_map.insert(from, to);
    }

    /// Sends a source generator to a single target generator.
    pub fn add_mapping(&mut self, from: MorphismId, to: MorphismId) -> Result<(), CatError> {
        let path = self.target.generator(to)?;
        self.morphism_map.insert(from, path);
        Ok(())
    }

    pub fn map_morphism_to_path(&mut self, from: MorphismId, to: Path) {
        self.morphism_map.insert(from, to);
    }

    pub fn apply_object(&self, obj: ObjectId) -> Option<ObjectId> {
        self.object_map.get(&obj).copied()
    }

    pub fn apply_morphism(&self, m: MorphismId) -> Option<&Path> {
        self.morphism_map.get(&m)
    }

    /// Image of a composite: identities go to identities, paths to the
    /// concatenation of generator images.
    pub fn apply_path(&self, path: &Path) -> Result<Path, CatError> {
        let src = self
            .apply_object(path.src)
            .ok_or(CatError::UnknownObject(path.src))?;
        let mut image = Path::identity(src);
        for &step in &path.steps {
            let piece = self
                .apply_morphism(step)
                .ok_or(CatError::UnknownMorphism(step))?;
            image = self.target.compose(&image, piece)?;
        }
        Ok(image)
    }

    pub fn object_map(&self) -> &BTreeMap<ObjectId, ObjectId> {
        &self.object_map
    }

    pub fn morphism_map(&self) -> &BTreeMap<MorphismId, Path> {
        &self.morphism_map
    }

    pub(crate) fn same_ends(&self, other: &Functor<'_>) -> bool {
        (std::ptr::eq(self.source, other.source) || self.source == other.source)
            && (std::ptr::eq(self.target, other.target) || self.target == other.target)
    }
}

/// Checks totality, endpoint coherence, identity preservation and
/// composition preservation on every generator and composable generator pair.
/// Weights are not inspected.
pub fn check_functor_laws(functor: &Functor<'_>) -> LawReport {
    let mut report = LawReport::default();
    let (src_cat, tgt_cat) = (functor.source, functor.target);

    for obj in src_cat.objects() {
        report.checks += 1;
        match functor.apply_object(obj.id) {
            None => report.violations.push(LawViolation::UnmappedObject(obj.id)),
            Some(img) if !tgt_cat.contains_object(img) => report
                .violations
                .push(LawViolation::IdentityNotPreserved(obj.id)),
            Some(_) => {}
        }
    }

    for m in src_cat.morphisms() {
        report.checks += 1;
        let Some(img) = functor.apply_morphism(m.id) else {
            report.violations.push(LawViolation::UnmappedMorphism(m.id));
            continue;
        };
        if tgt_cat.validate_path(img).is_err() {
            report.violations.push(LawViolation::InvalidImage(m.id));
            continue;
        }
        let coherent = functor.apply_object(m.src) == Some(img.src)
            && functor.apply_object(m.dst) == Some(img.dst);
        if !coherent {
            report.violations.push(LawViolation::EndpointMismatch(m.id));
        }
    }

    for (f, g) in src_cat.composable_pairs() {
        report.checks += 1;
        let (Some(ff), Some(fg)) = (functor.apply_morphism(f), functor.apply_morphism(g)) else {
            continue;
        };
        // F(g ∘ f) is the image of the path [f, g]; it must equal F(g) ∘ F(f).
        let composite = src_cat
            .compose(
                &src_cat.generator(f).expect("listed"),
                &src_cat.generator(g).expect("listed"),
            )
            .expect("composable pair");
        let preserved = match (tgt_cat.compose(ff, fg), functor.apply_path(&composite)) {
            (Ok(lhs), Ok(rhs)) => tgt_cat.paths_equal(&lhs, &rhs),
            _ => false,
        };
        if !preserved {
            report
                .violations
                .push(LawViolation::CompositionNotPreserved {
                    first: f,
                    second: g,
                });
        }
    }
    report
}
