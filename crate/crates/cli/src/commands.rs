use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use grotto::constructions::comma_category;
use grotto::galois::{sieve_presheaf_relation, finest_topology_for, GALOIS_GUARD};
use grotto::geolog::{
    find_countermodel, sequent_presieves, validate_proof_certificate, GoalDoc, ProofCertificate, ProofOutcome, Theory, TheoryDoc,
    DEFAULT_CONTEXT_BOUND, DEFAULT_DEPTH,
};
use grotto::lattice::{implication_topology, join_topologies, meet_topologies};
use grotto::presheaf::{
    close_subpresheaf, is_separated, is_sheaf, plus_construction, sheaf_failure, sheafify, Presheaf, PresheafMorphism, SubPresheaf,
    WithUnit,
};
use grotto::topology::{
    all_topologies, check_topology, close_sieve, covers_generated, enumerate_topology, is_closed, tree_covers, validate_certificate,
    Certificate, StableNotion, Topology, TopologyDoc, TreeOutcome, DEFAULT_GUARD,
};
use grotto::transport::{
    check_fibration, comma_topology, direct_image_topology, extraordinary_image, giraud_topology, inverse_image_topology,
    FibrationWitness,
};
use grotto::{validate_category, CategoryDoc, FiniteCategory, FunctorMap, Sieve, SieveDoc};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::{Command, Inputs, LatticeOp, LogicOp, SheafOp, TransportOp};
use crate::input::{load_functor, load_site, missing, read_json, CliError, CliResult, PresheafFile};

/// Result document: the same shape for every verb.
#[derive(Serialize)]
pub struct Report {
    pub grotto: &'static str,
    pub schema: u32,
    pub command: String,
    pub verdict: Value,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
    /// Whether the verdict is a domain failure (exit status 1).
    #[serde(skip)]
    pub failed: bool,
}

pub const SCHEMA: u32 = 1;

/// A re-checkable certificate as emitted under `result.certificate`.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateDoc {
    Covering { generators: TopologyDoc, target: SieveDoc, certificate: Certificate },
    Proof { theory: TheoryDoc, goal: String, certificates: Vec<ProofCertificate> },
}

struct Outcome {
    verdict: Value,
    result: Value,
    failed: bool,
}

impl Outcome {
    fn ok(verdict: impl Into<Value>, result: Value) -> Self {
        Outcome { verdict: verdict.into(), result, failed: false }
    }
}

pub fn run(command: &Command, inputs: &Inputs) -> CliResult<Report> {
    let verb = command.name();
    let start = Instant::now();
    let ctx = Ctx { inputs, verb: &verb };
    let out = match command {
        Command::Validate => ctx.validate()?,
        Command::Covers => ctx.covers()?,
        Command::Enumerate => ctx.enumerate()?,
        Command::Lattice { op } => ctx.lattice(*op)?,
        Command::Transport { op } => ctx.transport(*op)?,
        Command::Sheaf { op } => ctx.sheaf(*op)?,
        Command::Closure => ctx.closure()?,
        Command::Galois => ctx.galois()?,
        Command::Logic { op } => ctx.logic(*op)?,
    };
    let timings = inputs.timings.then(|| BTreeMap::from([("total_seconds".to_string(), start.elapsed().as_secs_f64())]));
    Ok(Report {
        grotto: env!("CARGO_PKG_VERSION"),
        schema: SCHEMA,
        command: verb,
        verdict: out.verdict,
        result: out.result,
        timings,
        failed: out.failed,
    })
}

struct Ctx<'a> {
    inputs: &'a Inputs,
    verb: &'a str,
}

fn sieve_names(c: &FiniteCategory, s: &Sieve) -> Value {
    json!(s.to_doc(c))
}

fn topology_value(t: &Topology) -> Value {
    json!(TopologyDoc::from_topology(t))
}

fn presheaf_value(p: &Presheaf) -> Value {
    json!(p.to_doc())
}

fn morphism_value(m: &PresheafMorphism) -> Value {
    let c = m.source().base();
    let components: BTreeMap<&str, BTreeMap<&str, &str>> = c
        .object_ids()
        .map(|x| {
            let table = (0..m.source().size(x)).map(|e| (m.source().label(x, e), m.target().label(x, m.apply(x, e)))).collect();
            (c.object_name(x), table)
        })
        .collect();
    json!(components)
}

fn with_unit_value(w: &WithUnit) -> Value {
    json!({ "presheaf": presheaf_value(&w.presheaf), "unit": morphism_value(&w.unit) })
}

impl Ctx<'_> {
    fn site(&self) -> CliResult<Arc<FiniteCategory>> {
        load_site(self.inputs.site.as_deref().ok_or_else(|| missing("--site", self.verb))?)
    }

    fn topology_doc(&self, i: usize) -> CliResult<TopologyDoc> {
        let path = self.inputs.generators.get(i).ok_or_else(|| {
            missing(if i == 0 { "--generators" } else { "a second --generators" }, self.verb)
        })?;
        read_json(path)
    }

    fn topology(&self, c: &Arc<FiniteCategory>, i: usize) -> CliResult<Topology> {
        Ok(self.topology_doc(i)?.to_topology(c)?)
    }

    fn notion(&self, c: &Arc<FiniteCategory>) -> CliResult<StableNotion> {
        Ok(self.topology_doc(0)?.to_notion(c)?)
    }

    fn sieve(&self, c: &FiniteCategory) -> CliResult<Sieve> {
        let doc: SieveDoc = read_json(self.inputs.sieve.as_deref().ok_or_else(|| missing("--sieve", self.verb))?)?;
        Ok(doc.to_sieve(c)?)
    }

    fn presheaf_file(&self, path: &Path) -> CliResult<PresheafFile> {
        read_json(path)
    }

    fn presheaves(&self, c: &Arc<FiniteCategory>) -> CliResult<Vec<Presheaf>> {
        if self.inputs.presheaf.is_empty() {
            return Err(missing("--presheaf", self.verb));
        }
        self.inputs.presheaf.iter().map(|p| Ok(Presheaf::from_doc(c.clone(), &self.presheaf_file(p)?.presheaf)?)).collect()
    }

    fn functor(&self) -> CliResult<FunctorMap> {
        load_functor(self.inputs.functor.as_deref().ok_or_else(|| missing("--functor", self.verb))?)
    }

    fn fibration(&self) -> CliResult<FibrationWitness> {
        check_fibration(&self.functor()?).map_err(|e| CliError::Domain(e.into()))
    }

    fn guard(&self) -> usize {
        self.inputs.guard.unwrap_or(DEFAULT_GUARD)
    }

    fn depth(&self) -> usize {
        self.inputs.depth.unwrap_or(DEFAULT_DEPTH)
    }

    fn theory(&self) -> CliResult<(TheoryDoc, Theory)> {
        let doc: TheoryDoc = read_json(self.inputs.theory.as_deref().ok_or_else(|| missing("--theory", self.verb))?)?;
        let theory = Theory::from_doc(&doc)?;
        Ok((doc, theory))
    }

    fn goal(&self) -> CliResult<String> {
        let doc: GoalDoc = read_json(self.inputs.goal.as_deref().ok_or_else(|| missing("--goal", self.verb))?)?;
        Ok(doc.goal)
    }

    fn validate(&self) -> CliResult<Outcome> {
        if let Some(path) = &self.inputs.certificate {
            return self.validate_certificate(path);
        }
        if self.inputs.theory.is_some() {
            let (_, theory) = self.theory()?;
            let mut result = json!({
                "signature": theory.signature().to_doc(),
                "axioms": theory.axioms.iter().map(|a| a.describe(theory.signature())).collect::<Vec<_>>(),
            });
            if self.inputs.goal.is_some() {
                let goal = theory.sequent(&self.goal()?)?;
                result["goal"] = json!(goal.describe(theory.signature()));
            }
            return Ok(Outcome::ok(true, result));
        }
        if self.inputs.functor.is_some() && self.inputs.site.is_none() {
            let p = self.functor()?;
            let fibration = check_fibration(&p).err();
            return Ok(Outcome::ok(true, json!({ "functor": p.to_doc(), "fibration": fibration.is_none(), "missing_lift": fibration })));
        }
        let path = self.inputs.site.as_deref().ok_or_else(|| missing("--site, --functor, --theory or --certificate", self.verb))?;
        let doc: CategoryDoc = read_json(path)?;
        let violations = validate_category(&doc);
        if !violations.is_empty() {
            let messages: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            return Ok(Outcome {
                verdict: false.into(),
                result: json!({ "category": { "valid": false, "violations": violations, "messages": messages } }),
                failed: true,
            });
        }
        let c = Arc::new(FiniteCategory::from_doc(&doc)?);
        let mut result = json!({ "category": { "valid": true, "objects": c.object_count(), "morphisms": c.morphism_count() } });
        let mut valid = true;
        let mut topologies = Vec::new();
        for i in 0..self.inputs.generators.len() {
            let t = self.topology(&c, i)?;
            let report: Vec<String> = check_topology(&t).iter().map(|v| format!("{v:?}")).collect();
            valid &= report.is_empty();
            topologies.push(json!({ "valid": report.is_empty(), "violations": report, "covering_sieves": t.sieves().count() }));
        }
        if !topologies.is_empty() {
            result["topologies"] = json!(topologies);
        }
        let mut presheaves = Vec::new();
        for path in &self.inputs.presheaf {
            let file = self.presheaf_file(path)?;
            let entry = match Presheaf::from_doc(c.clone(), &file.presheaf) {
                Ok(p) => json!({ "valid": true, "sizes": p.sizes() }),
                Err(grotto::Error::InvalidPresheaf(report)) => {
                    valid = false;
                    json!({ "valid": false, "violations": report })
                }
                Err(e) => return Err(e.into()),
            };
            presheaves.push(entry);
        }
        if !presheaves.is_empty() {
            result["presheaves"] = json!(presheaves);
        }
        Ok(Outcome { verdict: valid.into(), result, failed: !valid })
    }

    fn validate_certificate(&self, path: &Path) -> CliResult<Outcome> {
        let raw: Value = read_json(path)?;
        let cert = raw.pointer("/result/certificate").cloned().unwrap_or(raw);
        let cert: CertificateDoc = serde_json::from_value(cert).map_err(|e| CliError::Syntax {
            path: PathBuf::from(path),
            line: 0,
            column: 0,
            message: format!("not a certificate: {e}"),
        })?;
        let problems = match &cert {
            CertificateDoc::Covering { generators, target, certificate } => {
                let c = self.site()?;
                let notion = generators.to_notion(&c)?;
                validate_certificate(&notion, &target.to_presieve(&c)?, certificate)
            }
            CertificateDoc::Proof { theory, goal, certificates } => {
                let theory = Theory::from_doc(theory)?;
                let sig = theory.signature();
                let goal = theory.sequent(goal)?;
                let wanted = sequent_presieves(sig, &goal);
                let notion = theory.notion();
                let mut problems = Vec::new();
                if certificates.len() != wanted.len() {
                    problems.push(format!("{} certificates for {} goal disjuncts", certificates.len(), wanted.len()));
                }
                for (cert, want) in certificates.iter().zip(&wanted) {
                    if cert.target != want.target || cert.members != want.members {
                        problems.push("certificate target differs from the goal".into());
                    }
                    problems.extend(validate_proof_certificate(&notion, cert));
                }
                problems
            }
        };
        let kind = match cert {
            CertificateDoc::Covering { .. } => "covering",
            CertificateDoc::Proof { .. } => "proof",
        };
        let ok = problems.is_empty();
        Ok(Outcome { verdict: ok.into(), result: json!({ "kind": kind, "problems": problems }), failed: !ok })
    }

    fn covers(&self) -> CliResult<Outcome> {
        let c = self.site()?;
        let notion = self.notion(&c)?;
        let s = self.sieve(&c)?;
        let covered = covers_generated(&notion, &s);
        let closure = close_sieve(&notion, &s);
        let mut result = json!({
            "sieve": sieve_names(&c, &s),
            "closure": sieve_names(&c, &closure),
            "closed": is_closed(&notion, &s),
        });
        match tree_covers(&notion, &s, self.depth()) {
            TreeOutcome::Covered(certificate) => {
                result["certificate"] = json!(CertificateDoc::Covering {
                    generators: TopologyDoc::from_generators(&c, notion.generators()),
                    target: s.to_doc(&c),
                    certificate,
                });
            }
            TreeOutcome::BoundExhausted { required_depth } => result["required_depth"] = json!(required_depth),
            TreeOutcome::NotCovered => {}
        }
        Ok(Outcome::ok(covered, result))
    }

    fn enumerate(&self) -> CliResult<Outcome> {
        let c = self.site()?;
        if self.inputs.generators.is_empty() {
            let all = all_topologies(&c, self.guard())?;
            let list: Vec<Value> = all.iter().map(topology_value).collect();
            return Ok(Outcome::ok(all.len(), json!({ "topologies": list })));
        }
        let t = enumerate_topology(&self.notion(&c)?);
        Ok(Outcome::ok(t.sieves().count(), json!({ "topology": topology_value(&t) })))
    }

    fn lattice(&self, op: LatticeOp) -> CliResult<Outcome> {
        let c = self.site()?;
        let ts = (0..self.inputs.generators.len().max(1)).map(|i| self.topology(&c, i)).collect::<CliResult<Vec<_>>>()?;
        let t = match op {
            LatticeOp::Meet => meet_topologies(&ts)?,
            LatticeOp::Join => join_topologies(&ts)?,
            LatticeOp::Implies => {
                if ts.len() != 2 {
                    return Err(CliError::Usage("`lattice implies` needs exactly two --generators".into()));
                }
                implication_topology(&ts[0], &ts[1])?
            }
        };
        Ok(Outcome::ok(t.sieves().count(), json!({ "topology": topology_value(&t) })))
    }

    fn transport(&self, op: TransportOp) -> CliResult<Outcome> {
        let topology_on = |c: &Arc<FiniteCategory>, i: usize| self.topology(c, i);
        let sieves_on = |c: &Arc<FiniteCategory>, i: usize| -> CliResult<Vec<Sieve>> {
            match self.inputs.generators.get(i) {
                Some(_) => Ok(self.topology_doc(i)?.generator_sieves(c)?),
                None => Ok(Vec::new()),
            }
        };
        let (t, extra) = match op {
            TransportOp::Giraud => {
                let w = self.fibration()?;
                (giraud_topology(&w, &topology_on(w.base(), 0)?), Value::Null)
            }
            TransportOp::Inverse => {
                let rho = self.functor()?;
                let k = topology_on(rho.target(), 0)?;
                (inverse_image_topology(&rho, &k, &sieves_on(rho.source(), 1)?)?, Value::Null)
            }
            TransportOp::Direct => {
                let rho = self.functor()?;
                let image = direct_image_topology(&rho, &topology_on(rho.source(), 0)?)?;
                let report: Vec<String> = image.report.iter().map(|v| format!("{v:?}")).collect();
                let ok = report.is_empty();
                let result = json!({ "topology": topology_value(&image.candidate), "violations": report });
                return Ok(Outcome { verdict: ok.into(), result, failed: false });
            }
            TransportOp::Extraordinary => {
                let w = self.fibration()?;
                let j = topology_on(w.base(), 0)?;
                (extraordinary_image(&w, &j, &sieves_on(w.total(), 1)?)?, Value::Null)
            }
            TransportOp::Comma => {
                let rho = self.functor()?;
                let k = topology_on(rho.target(), 0)?;
                let comma = comma_category(&rho)?;
                (comma_topology(&comma, &k)?, json!(comma.category.to_doc()))
            }
        };
        let mut result = json!({ "topology": topology_value(&t) });
        if !extra.is_null() {
            result["category"] = extra;
        }
        Ok(Outcome::ok(t.sieves().count(), result))
    }

    fn sheaf(&self, op: SheafOp) -> CliResult<Outcome> {
        let c = self.site()?;
        let j = self.topology(&c, 0)?;
        let p = self.presheaves(&c)?.swap_remove(0);
        Ok(match op {
            SheafOp::Check => {
                let failure = sheaf_failure(&p, &j)?.map(|s| sieve_names(&c, &s));
                Outcome::ok(is_sheaf(&p, &j)?, json!({ "separated": is_separated(&p, &j)?, "failing_sieve": failure }))
            }
            SheafOp::Plus => Outcome::ok(true, with_unit_value(&plus_construction(&p, &j)?)),
            SheafOp::Sheafify => {
                let s = sheafify(&p, &j)?;
                let iso = s.unit.is_iso();
                Outcome::ok(true, json!({ "sheaf": with_unit_value(&s), "already_sheaf": iso }))
            }
        })
    }

    fn closure(&self) -> CliResult<Outcome> {
        let c = self.site()?;
        let j = self.topology(&c, 0)?;
        if self.inputs.sieve.is_some() {
            let s = self.sieve(&c)?;
            let closed = close_sieve(&j, &s);
            return Ok(Outcome::ok(closed == s, json!({ "closure": sieve_names(&c, &closed) })));
        }
        let path = self.inputs.presheaf.first().ok_or_else(|| missing("--sieve or --presheaf", self.verb))?;
        let file = self.presheaf_file(path)?;
        let p = Presheaf::from_doc(c.clone(), &file.presheaf)?;
        let q = match &file.chosen {
            None => SubPresheaf::empty(p.clone()),
            Some(chosen) => {
                let mut sets = vec![BTreeSet::new(); c.object_count()];
                for (x, labels) in chosen {
                    let x = c.object(x)?;
                    for l in labels {
                        let e = p.element(x, l).ok_or_else(|| grotto::Error::UnknownObject(format!("{l} at {}", c.object_name(x))))?;
                        sets[x.0].insert(e);
                    }
                }
                SubPresheaf::new(p.clone(), sets)?
            }
        };
        let closed = close_subpresheaf(&q, &j)?;
        let table: BTreeMap<&str, Vec<&str>> =
            c.object_ids().map(|x| (c.object_name(x), closed.chosen(x).iter().map(|&e| p.label(x, e)).collect())).collect();
        Ok(Outcome::ok(closed.is_subset(&q), json!({ "closure": table })))
    }

    fn galois(&self) -> CliResult<Outcome> {
        let c = self.site()?;
        let ps = self.presheaves(&c)?;
        let guard = self.inputs.guard.unwrap_or(GALOIS_GUARD.max(DEFAULT_GUARD));
        let relation = sieve_presheaf_relation(&c, &ps, guard)?;
        let t = finest_topology_for(&c, &ps, guard)?;
        let ok = check_topology(&t).is_empty();
        Ok(Outcome::ok(
            t.sieves().count(),
            json!({ "topology": topology_value(&t), "is_topology": ok, "relation": relation.relation.dump() }),
        ))
    }

    fn logic(&self, op: LogicOp) -> CliResult<Outcome> {
        let (doc, theory) = self.theory()?;
        let goal_text = self.goal()?;
        let goal = theory.sequent(&goal_text)?;
        let sig = theory.signature();
        match op {
            LogicOp::Prove => {
                let ctx = self.inputs.context_bound.unwrap_or(DEFAULT_CONTEXT_BOUND);
                let outcome = theory.prove(&goal, self.depth(), ctx)?;
                let mut result = json!({ "goal": goal.describe(sig), "depth_bound": self.depth(), "context_bound": ctx });
                let verdict = match outcome {
                    ProofOutcome::Proved { certificates } => {
                        result["depth"] = json!(certificates.iter().map(|c| c.depth()).max().unwrap_or(0));
                        result["certificate"] = json!(CertificateDoc::Proof { theory: doc, goal: goal_text, certificates });
                        "PROVED"
                    }
                    ProofOutcome::Unknown { budget_exhausted } => {
                        result["budget_exhausted"] = json!(budget_exhausted);
                        "UNKNOWN"
                    }
                };
                Ok(Outcome::ok(verdict, result))
            }
            LogicOp::Countermodel => {
                let max = self.inputs.max_carrier.unwrap_or(3);
                let model = find_countermodel(sig, &theory.axioms, &goal, max);
                let found = model.is_some();
                let model = model.map(|m| m.to_doc(sig));
                Ok(Outcome::ok(found, json!({ "goal": goal.describe(sig), "max_carrier": max, "model": model })))
            }
        }
    }
}
