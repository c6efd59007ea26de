use std::collections::BTreeMap;

use super::category::{ObjectId, Path};
use super::functor::Functor;
use super::{LawReport, LawViolation};

/// A family of target composites `η_A : F(A) → G(A)` indexed by the
/// objects of the common source category.
#[derive(Debug, Clone)]
pub struct NaturalTransformation<'f, 'c> {
    pub from: &'f Functor<'c>,
    pub to: &'f Functor<'c>,
    components: BTreeMap<ObjectId, Path>,
}

impl<'f, 'c> NaturalTransformation<'f, 'c> {
    pub fn new(from: &'f Functor<'c>, to: &'f Functor<'c>) -> Self {
        Self {
            from,
            to,
            components: BTreeMap::new(),
        }
    }

    /// Identity components `F(A) → F(A)`; only lawful when `from` and `to`
    /// agree on objects.
    pub fn identity(functor: &'f Functor<'c>) -> Self {
        let mut eta = Self::new(functor, functor);
        for (&a, &fa) in functor.object_map() {
            eta.components.insert(a, Path::identity(fa));
        }
        eta
    }

    pub fn add_component(&mut self, obj: ObjectId, component: Path) {
        self.components.insert(obj, component);
    }

    pub fn component(&self, obj: ObjectId) -> Option<&Path> {
        self.components.get(&obj)
    }

    pub fn components(&self) -> &BTreeMap<ObjectId, Path> {
        &self.components
    }
}

/// Checks component typing and that every generator square
/// `G(f) ∘ η_A = η_B ∘ F(f)` commutes in the target.
pub fn check_naturality(eta: &NaturalTransformation<'_, '_>) -> LawReport {
    let mut report = LawReport::default();
    let (f, g) = (eta.from, eta.to);
    report.checks += 1;
    if !f.same_ends(g) {
        report.violations.push(LawViolation::MismatchedFunctors);
        return report;
    }
    let source = f.source;
    let target = f.target;

    for obj in source.objects() {
        report.checks += 1;
        let Some(c) = eta.component(obj.id) else {
            report
                .violations
                .push(LawViolation::ComponentMissing(obj.id));
            continue;
        };
        if target.validate_path(c).is_err() {
            report
                .violations
                .push(LawViolation::InvalidComponent(obj.id));
            continue;
        }
        if f.apply_object(obj.id) != Some(c.src) || g.apply_object(obj.id) != Some(c.dst) {
            report
                .violations
                .push(LawViolation::ComponentEndpoint(obj.id));
        }
    }

    for m in source.morphisms() {
        report.checks += 1;
        let commutes = (|| {
            let eta_a = eta.component(m.src)?;
            let eta_b = eta.component(m.dst)?;
            let fm = f.apply_morphism(m.id)?;
            let gm = g.apply_morphism(m.id)?;
            let upper = target.compose(eta_a, gm).ok()?;
            let lower = target.compose(fm, eta_b).ok()?;
            Some(target.paths_equal(&upper, &lower))
        })()
        .unwrap_or(false);
        if !commutes {
            report
                .violations
                .push(LawViolation::NaturalityFailure(m.id));
        }
    }
    report
}
