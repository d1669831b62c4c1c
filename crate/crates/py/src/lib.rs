//! Python bindings: categories, topologies, presheaves and theories, each
//! loaded from and dumped to the same JSON documents the CLI reads.

use std::collections::BTreeMap;
use std::sync::Arc;

use grotto::galois::finest_topology_for;
use grotto::geolog::{find_countermodel, ProofOutcome, TheoryDoc};
use grotto::lattice::{implication_topology, join_topologies, meet_topologies};
use grotto::presheaf::{is_sheaf, sheafify, PresheafDoc};
use grotto::topology::{all_topologies, check_topology, covers_generated, tree_covers, TopologyDoc, DEFAULT_GUARD};
use grotto::transport::{check_fibration, giraud_topology};
use grotto::{fixtures, validate_category, CategoryDoc, FunctorDoc, FunctorMap, SieveDoc};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: serde::de::DeserializeOwned>(text: &str) -> PyResult<T> {
    serde_json::from_str(text).map_err(err)
}

fn dump(v: &impl serde::Serialize) -> String {
    serde_json::to_string(v).expect("documents serialize")
}

#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct Category {
    inner: Arc<grotto::FiniteCategory>,
}

#[pymethods]
impl Category {
    #[new]
    fn new(json: &str) -> PyResult<Self> {
        let doc: CategoryDoc = parse(json)?;
        Ok(Category { inner: Arc::new(grotto::FiniteCategory::from_doc(&doc).map_err(err)?) })
    }

    /// One of the bundled sites: arrow, vee, square2, idem, elts.
    #[staticmethod]
    fn fixture(name: &str) -> PyResult<Self> {
        fixtures::by_name(name).map(|inner| Category { inner }).ok_or_else(|| err(format!("no fixture named `{name}`")))
    }

    #[getter]
    fn objects(&self) -> Vec<String> {
        self.inner.object_ids().map(|x| self.inner.object_name(x).to_string()).collect()
    }

    #[getter]
    fn morphisms(&self) -> Vec<String> {
        self.inner.morphism_ids().map(|f| self.inner.morphism_name(f).to_string()).collect()
    }

    fn to_json(&self) -> String {
        dump(&self.inner.to_doc())
    }

    /// Every topology on the site, guarded by the sieve count.
    #[pyo3(signature = (guard = DEFAULT_GUARD))]
    fn topologies(&self, guard: usize) -> PyResult<Vec<Topology>> {
        Ok(all_topologies(&self.inner, guard).map_err(err)?.into_iter().map(|inner| Topology { inner }).collect())
    }

    fn __repr__(&self) -> String {
        format!("Category({} objects, {} morphisms)", self.inner.object_count(), self.inner.morphism_count())
    }
}

/// Law violations of a category document, as messages.
#[pyfunction]
fn category_violations(json: &str) -> PyResult<Vec<String>> {
    let doc: CategoryDoc = parse(json)?;
    Ok(validate_category(&doc).iter().map(|v| v.to_string()).collect())
}

#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct Topology {
    inner: grotto::topology::Topology,
}

#[pymethods]
impl Topology {
    /// Generated by `(object, [morphisms])` presieves.
    #[staticmethod]
    fn generated(site: &Category, generators: Vec<(String, Vec<String>)>) -> PyResult<Self> {
        let gens = generators.into_iter().map(|(at, members)| SieveDoc { at, members }).collect();
        Self::from_json(site, &dump(&TopologyDoc { generators: Some(gens), covering: None }))
    }

    #[staticmethod]
    fn from_json(site: &Category, json: &str) -> PyResult<Self> {
        let doc: TopologyDoc = parse(json)?;
        Ok(Topology { inner: doc.to_topology(&site.inner).map_err(err)? })
    }

    #[staticmethod]
    fn minimal(site: &Category) -> Self {
        Topology { inner: grotto::topology::Topology::minimal(site.inner.clone()) }
    }

    fn covers(&self, at: &str, members: Vec<String>) -> PyResult<bool> {
        let sieve = SieveDoc { at: at.into(), members }.to_sieve(self.inner.base()).map_err(err)?;
        Ok(self.inner.covers(&sieve))
    }

    /// Covering sieves per object, as lists of member names.
    fn covering(&self) -> BTreeMap<String, Vec<Vec<String>>> {
        TopologyDoc::from_topology(&self.inner).covering.unwrap_or_default()
    }

    fn violations(&self) -> Vec<String> {
        check_topology(&self.inner).iter().map(|v| format!("{v:?}")).collect()
    }

    fn is_subset(&self, other: &Topology) -> bool {
        self.inner.is_subset(&other.inner)
    }

    fn meet(&self, other: &Topology) -> PyResult<Topology> {
        Ok(Topology { inner: meet_topologies(&[self.inner.clone(), other.inner.clone()]).map_err(err)? })
    }

    fn join(&self, other: &Topology) -> PyResult<Topology> {
        Ok(Topology { inner: join_topologies(&[self.inner.clone(), other.inner.clone()]).map_err(err)? })
    }

    fn implies(&self, other: &Topology) -> PyResult<Topology> {
        Ok(Topology { inner: implication_topology(&self.inner, &other.inner).map_err(err)? })
    }

    fn to_json(&self) -> String {
        dump(&TopologyDoc::from_topology(&self.inner))
    }

    fn __eq__(&self, other: &Topology) -> bool {
        self.inner == other.inner
    }

    fn __len__(&self) -> usize {
        self.inner.sieves().count()
    }
}

/// Decides coverage in the generated topology and returns the certificate
/// document when a covering tree within `depth` exists.
#[pyfunction]
#[pyo3(signature = (site, generators, at, members, depth = 6))]
fn covers(
    site: &Category,
    generators: Vec<(String, Vec<String>)>,
    at: &str,
    members: Vec<String>,
    depth: usize,
) -> PyResult<(bool, Option<String>)> {
    let c = &site.inner;
    let gens = generators.into_iter().map(|(at, members)| SieveDoc { at, members }).collect();
    let notion = TopologyDoc { generators: Some(gens), covering: None }.to_notion(c).map_err(err)?;
    let sieve = SieveDoc { at: at.into(), members }.to_sieve(c).map_err(err)?;
    let cert = match tree_covers(&notion, &sieve, depth) {
        grotto::topology::TreeOutcome::Covered(cert) => Some(dump(&cert)),
        _ => None,
    };
    Ok((covers_generated(&notion, &sieve), cert))
}

#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct Presheaf {
    inner: grotto::presheaf::Presheaf,
}

#[pymethods]
impl Presheaf {
    #[new]
    fn new(site: &Category, json: &str) -> PyResult<Self> {
        let doc: PresheafDoc = parse(json)?;
        Ok(Presheaf { inner: grotto::presheaf::Presheaf::from_doc(site.inner.clone(), &doc).map_err(err)? })
    }

    #[staticmethod]
    fn representable(site: &Category, object: &str) -> PyResult<Self> {
        let x = site.inner.object(object).map_err(err)?;
        Ok(Presheaf { inner: grotto::presheaf::Presheaf::representable(site.inner.clone(), x) })
    }

    fn sizes(&self) -> Vec<usize> {
        self.inner.sizes()
    }

    fn is_sheaf(&self, topology: &Topology) -> PyResult<bool> {
        is_sheaf(&self.inner, &topology.inner).map_err(err)
    }

    fn sheafify(&self, topology: &Topology) -> PyResult<Presheaf> {
        Ok(Presheaf { inner: sheafify(&self.inner, &topology.inner).map_err(err)?.presheaf })
    }

    fn to_json(&self) -> String {
        dump(&self.inner.to_doc())
    }
}

/// The finest topology for which every listed presheaf is a sheaf.
#[pyfunction]
#[pyo3(signature = (site, presheaves, guard = DEFAULT_GUARD))]
fn finest_topology(site: &Category, presheaves: Vec<Presheaf>, guard: usize) -> PyResult<Topology> {
    let ps: Vec<_> = presheaves.into_iter().map(|p| p.inner).collect();
    Ok(Topology { inner: finest_topology_for(&site.inner, &ps, guard).map_err(err)? })
}

/// Giraud topology on the total category of a fibration `source → target`.
#[pyfunction]
fn giraud(source: &Category, target: &Category, functor_json: &str, base: &Topology) -> PyResult<Topology> {
    let doc: FunctorDoc = parse(functor_json)?;
    let p = FunctorMap::from_doc(source.inner.clone(), target.inner.clone(), &doc).map_err(err)?;
    let w = check_fibration(&p).map_err(|e| err(grotto::Error::from(e)))?;
    Ok(Topology { inner: giraud_topology(&w, &base.inner) })
}

#[pyclass(frozen)]
struct Theory {
    inner: grotto::geolog::Theory,
}

#[pymethods]
impl Theory {
    #[new]
    fn new(json: &str) -> PyResult<Self> {
        let doc: TheoryDoc = parse(json)?;
        Ok(Theory { inner: grotto::geolog::Theory::from_doc(&doc).map_err(err)? })
    }

    /// Returns `("PROVED", certificates_json)` or `("UNKNOWN", None)`.
    #[pyo3(signature = (goal, depth = grotto::geolog::DEFAULT_DEPTH, context_bound = grotto::geolog::DEFAULT_CONTEXT_BOUND))]
    fn prove(&self, goal: &str, depth: usize, context_bound: usize) -> PyResult<(String, Option<String>)> {
        let goal = self.inner.sequent(goal).map_err(err)?;
        Ok(match self.inner.prove(&goal, depth, context_bound).map_err(err)? {
            ProofOutcome::Proved { certificates } => ("PROVED".into(), Some(dump(&certificates))),
            ProofOutcome::Unknown { .. } => ("UNKNOWN".into(), None),
        })
    }

    /// A finite model of the axioms refuting `goal`, as a model document.
    #[pyo3(signature = (goal, max_carrier = 3))]
    fn countermodel(&self, goal: &str, max_carrier: usize) -> PyResult<Option<String>> {
        let sig = self.inner.signature();
        let goal = self.inner.sequent(goal).map_err(err)?;
        Ok(find_countermodel(sig, &self.inner.axioms, &goal, max_carrier).map(|m| dump(&m.to_doc(sig))))
    }

    fn axioms(&self) -> Vec<String> {
        self.inner.axioms.iter().map(|a| a.describe(self.inner.signature())).collect()
    }
}

#[pymodule]
#[pyo3(name = "grotto")]
fn grotto_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Category>()?;
    m.add_class::<Topology>()?;
    m.add_class::<Presheaf>()?;
    m.add_class::<Theory>()?;
    m.add_function(wrap_pyfunction!(category_violations, m)?)?;
    m.add_function(wrap_pyfunction!(covers, m)?)?;
    m.add_function(wrap_pyfunction!(finest_topology, m)?)?;
    m.add_function(wrap_pyfunction!(giraud, m)?)?;
    Ok(())
}
