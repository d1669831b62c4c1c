use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::category::{FiniteCategory, MorId, ObjId};
use crate::error::{Error, Result};

/// A functor between two finite categories, stored as lookup tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctorMap {
    source: Arc<FiniteCategory>,
    target: Arc<FiniteCategory>,
    on_objects: Vec<ObjId>,
    on_morphisms: Vec<MorId>,
}

/// Functor file format: object and morphism tables keyed by source names.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctorDoc {
    pub objects: BTreeMap<String, String>,
    pub morphisms: BTreeMap<String, String>,
}

impl FunctorMap {
    /// Builds and checks a functor; all law violations are reported together.
    pub fn new(
        source: Arc<FiniteCategory>,
        target: Arc<FiniteCategory>,
        on_objects: Vec<ObjId>,
        on_morphisms: Vec<MorId>,
    ) -> Result<Self> {
        let f = FunctorMap { source, target, on_objects, on_morphisms };
        let report = f.violations();
        if report.is_empty() {
            Ok(f)
        } else {
            Err(Error::InvalidFunctor(report))
        }
    }

    pub fn from_doc(source: Arc<FiniteCategory>, target: Arc<FiniteCategory>, doc: &FunctorDoc) -> Result<Self> {
        let mut on_objects = Vec::with_capacity(source.object_count());
        for x in source.object_ids() {
            let name = source.object_name(x);
            let image = doc
                .objects
                .get(name)
                .ok_or_else(|| Error::InvalidFunctor(vec![format!("object `{name}` is not mapped")]))?;
            on_objects.push(target.object(image)?);
        }
        let mut on_morphisms = Vec::with_capacity(source.morphism_count());
        for f in source.morphism_ids() {
            let name = source.morphism_name(f);
            let image = doc
                .morphisms
                .get(name)
                .ok_or_else(|| Error::InvalidFunctor(vec![format!("morphism `{name}` is not mapped")]))?;
            on_morphisms.push(target.morphism(image)?);
        }
        Self::new(source, target, on_objects, on_morphisms)
    }

    pub fn to_doc(&self) -> FunctorDoc {
        FunctorDoc {
            objects: self
                .source
                .object_ids()
                .map(|x| (self.source.object_name(x).into(), self.target.object_name(self.obj(x)).into()))
                .collect(),
            morphisms: self
                .source
                .morphism_ids()
                .map(|f| (self.source.morphism_name(f).into(), self.target.morphism_name(self.mor(f)).into()))
                .collect(),
        }
    }

    pub fn identity(c: Arc<FiniteCategory>) -> Self {
        let on_objects = c.object_ids().collect();
        let on_morphisms = c.morphism_ids().collect();
        FunctorMap { source: c.clone(), target: c, on_objects, on_morphisms }
    }

    /// The functor sending everything to the object `y` of `target`.
    pub fn constant(source: Arc<FiniteCategory>, target: Arc<FiniteCategory>, y: ObjId) -> Self {
        let on_objects = vec![y; source.object_count()];
        let on_morphisms = vec![target.id(y); source.morphism_count()];
        FunctorMap { source, target, on_objects, on_morphisms }
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &FunctorMap) -> Result<FunctorMap> {
        if first.target != self.source {
            return Err(Error::BaseMismatch);
        }
        Ok(FunctorMap {
            source: first.source.clone(),
            target: self.target.clone(),
            on_objects: first.on_objects.iter().map(|&x| self.obj(x)).collect(),
            on_morphisms: first.on_morphisms.iter().map(|&f| self.mor(f)).collect(),
        })
    }

    pub fn source(&self) -> &Arc<FiniteCategory> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteCategory> {
        &self.target
    }

    pub fn obj(&self, x: ObjId) -> ObjId {
        self.on_objects[x.0]
    }

    pub fn mor(&self, f: MorId) -> MorId {
        self.on_morphisms[f.0]
    }

    pub fn violations(&self) -> Vec<String> {
        let (s, t) = (&*self.source, &*self.target);
        let mut report = Vec::new();
        if self.on_objects.len() != s.object_count() || self.on_morphisms.len() != s.morphism_count() {
            report.push("mapping tables do not match the source category".into());
            return report;
        }
        if self.on_objects.iter().any(|x| x.0 >= t.object_count())
            || self.on_morphisms.iter().any(|f| f.0 >= t.morphism_count())
        {
            report.push("mapping tables point outside the target category".into());
            return report;
        }
        for f in s.morphism_ids() {
            let image = self.mor(f);
            if t.dom(image) != self.obj(s.dom(f)) || t.cod(image) != self.obj(s.cod(f)) {
                report.push(format!("`{}` is not sent to a morphism between the images of its ends", s.morphism_name(f)));
            }
        }
        for x in s.object_ids() {
            if self.mor(s.id(x)) != t.id(self.obj(x)) {
                report.push(format!("identity of `{}` is not preserved", s.object_name(x)));
            }
        }
        if !report.is_empty() {
            return report;
        }
        for g in s.morphism_ids() {
            for &f in s.hom_into(s.dom(g)) {
                if self.mor(s.compose(g, f)) != t.compose(self.mor(g), self.mor(f)) {
                    report.push(format!(
                        "composite `{}` ∘ `{}` is not preserved",
                        s.morphism_name(g),
                        s.morphism_name(f)
                    ));
                }
            }
        }
        report
    }
}
