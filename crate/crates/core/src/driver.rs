//! Suite selection and execution over the catalog.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

use crate::catalog::{Catalog, CatalogError, Kind};
use crate::hopf::{self, HopfPresentation};
use crate::lattice::{self, LatticeParams};
use crate::ncalg::{EngineLimits, DEFAULT_DEGREE_CAP, DEFAULT_FUEL};
use crate::opalg::{self, Sample};
use crate::qseries::{rat, render_rational, Rational};
use crate::report::{Finding, Record, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Algebra,
    Hopf,
    RMatrix,
    Twist,
    Contraction,
    Embedding,
    Realization,
    Symmetry,
    Lattice,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Algebra,
        Suite::Hopf,
        Suite::RMatrix,
        Suite::Twist,
        Suite::Contraction,
        Suite::Embedding,
        Suite::Realization,
        Suite::Symmetry,
        Suite::Lattice,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Hopf => "hopf",
            Suite::RMatrix => "rmatrix",
            Suite::Twist => "twist",
            Suite::Contraction => "contraction",
            Suite::Embedding => "embedding",
            Suite::Realization => "realization",
            Suite::Symmetry => "symmetry",
            Suite::Lattice => "lattice",
        }
    }

    pub fn from_name(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    /// Truncation order N of the deformation-parameter series.
    pub order: usize,
    pub rmatrix_order: usize,
    pub degree_cap: usize,
    pub fuel: usize,
    /// (lattice step, m) pairs at which realizations are checked.
    pub samples: Vec<(Rational, Rational)>,
    pub lattice: LatticeParams,
    /// Float-mode tolerance of the lattice suite.
    pub tolerance: f64,
    pub allow_errata: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            order: 4,
            rmatrix_order: 3,
            degree_cap: DEFAULT_DEGREE_CAP,
            fuel: DEFAULT_FUEL,
            samples: vec![(rat(1, 2), rat(1, 2)), (rat(1, 3), rat(1, 1)), (rat(1, 5), rat(3, 2))],
            lattice: LatticeParams::default(),
            tolerance: 1e-10,
            allow_errata: false,
        }
    }
}

impl SuiteConfig {
    pub fn limits(&self) -> EngineLimits {
        EngineLimits {
            fuel: self.fuel,
            degree_cap: self.degree_cap,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let r = render_rational;
        json!({
            "order": self.order,
            "rmatrix_order": self.rmatrix_order,
            "degree_cap": self.degree_cap,
            "fuel": self.fuel,
            "samples": self.samples.iter().map(|(s, m)| json!([r(s), r(m)])).collect::<Vec<_>>(),
            "lattice": {
                "nx": self.lattice.grid.nx,
                "nt": self.lattice.grid.nt,
                "sigma": r(&self.lattice.grid.sigma),
                "tau": r(&self.lattice.grid.tau),
                "m": r(&self.lattice.m),
            },
            "tolerance": self.tolerance,
            "allow_errata": self.allow_errata,
        })
    }
}

type TaskFn<'a> = Box<dyn Fn(&Engine) -> Result<Vec<Finding>, String> + Send + Sync + 'a>;

struct Task<'a> {
    suite: Suite,
    ids: Vec<String>,
    run: TaskFn<'a>,
}

/// Catalog plus configuration, with built presentations shared between
/// tasks.
pub struct Engine<'c> {
    pub catalog: &'c Catalog,
    pub config: SuiteConfig,
    built: Mutex<HashMap<String, Arc<HopfPresentation>>>,
}

impl<'c> Engine<'c> {
    pub fn new(catalog: &'c Catalog, config: SuiteConfig) -> Self {
        Engine {
            catalog,
            config,
            built: Mutex::new(HashMap::new()),
        }
    }

    pub fn presentation(&self, id: &str) -> Result<Arc<HopfPresentation>, String> {
        if let Some(p) = self.built.lock().unwrap().get(id) {
            return Ok(p.clone());
        }
        let def = self.catalog.presentation(id).map_err(|e| e.to_string())?;
        let p = Arc::new(def.build(id, self.config.limits()).map_err(|e| e.to_string())?);
        Ok(self.built.lock().unwrap().entry(id.to_string()).or_insert(p).clone())
    }

    /// Runs the selected suites, restricted to checks touching `ids` when
    /// that list is non-empty.
    pub fn run(&self, suites: &[Suite], ids: &[String]) -> Result<Report, CatalogError> {
        for id in ids {
            self.catalog.load(id)?;
        }
        let tasks: Vec<Task> = suites
            .iter()
            .flat_map(|s| self.tasks(*s))
            .filter(|t| ids.is_empty() || t.ids.iter().any(|i| ids.contains(i)))
            .collect();
        let mut records: Vec<Record> = tasks
            .par_iter()
            .flat_map_iter(|t| {
                let start = Instant::now();
                let findings = (t.run)(self).unwrap_or_else(|e| vec![Finding::fail("engine_error", t.ids.join(","), e)]);
                let millis = start.elapsed().as_millis() as u64;
                findings.into_iter().map(move |f| Record {
                    suite: t.suite.name().to_string(),
                    catalog_ids: t.ids.clone(),
                    finding: f,
                    millis,
                })
            })
            .collect();
        records.extend(self.catalog.warnings.iter().map(|w| Record {
            suite: "catalog".into(),
            catalog_ids: Vec::new(),
            finding: Finding::pass("catalog_warning", w.clone()).informational(),
            millis: 0,
        }));
        let mut config = self.config.to_json();
        config["suites"] = json!(suites.iter().map(|s| s.name()).collect::<Vec<_>>());
        config["ids"] = json!(ids);
        Ok(Report::new(config, records))
    }

    fn ids(&self, kind: Kind) -> Vec<String> {
        self.catalog.list(Some(kind)).into_iter().map(String::from).collect()
    }

    fn tasks(&self, suite: Suite) -> Vec<Task<'c>> {
        let cat = self.catalog;
        let n = self.config.order;
        let mut out: Vec<Task<'c>> = Vec::new();
        let task = |ids: Vec<String>, run: TaskFn<'c>| Task { suite, ids, run };
        match suite {
            Suite::Algebra => {
                for id in self.ids(Kind::Presentation) {
                    let i = id.clone();
                    out.push(task(
                        vec![id.clone()],
                        Box::new(move |e| hopf::check_jacobi(&*e.presentation(&i)?, n).map_err(s)),
                    ));
                    if let Some(cl) = cat.presentation(&id).ok().and_then(|p| p.classical_limit.clone()) {
                        let i = id.clone();
                        out.push(task(
                            vec![id.clone(), cl.target.clone()],
                            Box::new(move |e| {
                                let d = e.presentation(&i)?;
                                let c = e.presentation(&cl.target)?;
                                hopf::check_classical_limit(&d, &c, &cl.rename).map_err(s)
                            }),
                        ));
                    }
                }
            }
            Suite::Hopf => {
                for id in self.ids(Kind::Presentation) {
                    let i = id.clone();
                    out.push(task(
                        vec![id.clone()],
                        Box::new(move |e| hopf::hopf_axioms(&*e.presentation(&i)?, n).map_err(s)),
                    ));
                    if let Some(u) = cat.presentation(&id).ok().and_then(|p| p.grouplike.clone()) {
                        let i = id.clone();
                        out.push(task(
                            vec![id.clone()],
                            Box::new(move |e| {
                                hopf::check_grouplike_powers(&*e.presentation(&i)?, &u, &[1, 0, -1, 2, -2], n)
                                    .map_err(s)
                            }),
                        ));
                    }
                }
            }
            Suite::RMatrix => {
                let order = self.config.rmatrix_order;
                for id in self.ids(Kind::Presentation) {
                    if cat.presentation(&id).is_ok_and(|p| p.rmatrix.is_some()) {
                        let i = id.clone();
                        out.push(task(
                            vec![id],
                            Box::new(move |e| hopf::check_rmatrix(&*e.presentation(&i)?, order).map_err(s)),
                        ));
                    }
                }
            }
            Suite::Twist => {
                let maps = self.ids(Kind::Twist);
                for id in &maps {
                    let t = cat.twist(id).unwrap().clone();
                    out.push(task(
                        vec![id.clone(), t.source.clone(), t.target.clone()],
                        Box::new(move |e| {
                            let src = e.presentation(&t.source)?;
                            let tgt = e.presentation(&t.target)?;
                            hopf::check_twist(&t.map, &src, &tgt, n).map_err(s)
                        }),
                    ));
                }
                for (k, a) in maps.iter().enumerate() {
                    for b in &maps[k + 1..] {
                        let (ta, tb) = (cat.twist(a).unwrap().clone(), cat.twist(b).unwrap().clone());
                        let comparable = ta.source == tb.source
                            && ta.target == tb.target
                            && ta.map.inverse.is_some()
                            && tb.map.inverse.is_some();
                        if comparable {
                            out.push(task(
                                vec![a.clone(), b.clone(), ta.target.clone()],
                                Box::new(move |e| {
                                    let src = e.presentation(&ta.source)?;
                                    let tgt = e.presentation(&ta.target)?;
                                    hopf::check_equivalent_twists(&ta.map, &tb.map, &src, &tgt, n).map_err(s)
                                }),
                            ));
                        }
                    }
                }
            }
            Suite::Contraction => {
                for id in self.ids(Kind::Contraction) {
                    let c = cat.contraction(&id).unwrap().clone();
                    out.push(task(
                        vec![id.clone(), c.source.clone(), c.target.clone()],
                        Box::new(move |e| {
                            let src = e.presentation(&c.source)?;
                            let tgt = e.presentation(&c.target)?;
                            hopf::contract_presentation(&c.spec, &src, &tgt, n).map_err(s)
                        }),
                    ));
                }
                for sq in self.squares() {
                    let Square { outer, first, second, contracted } = sq;
                    let c2 = cat.contraction(&outer).unwrap().clone();
                    let t2 = cat.twist(&second).unwrap().clone();
                    out.push(task(
                        vec![outer.clone(), first, second, contracted.clone(), c2.target.clone()],
                        Box::new(move |e| {
                            let twisted = e.presentation(&c2.source)?;
                            let quantum = e.presentation(&contracted)?;
                            let target = e.presentation(&c2.target)?;
                            hopf::check_diagram(&c2.spec, &twisted, &t2.map, &quantum, &target, n).map_err(s)
                        }),
                    ));
                }
            }
            Suite::Embedding => {
                for id in self.ids(Kind::Embedding) {
                    let m = cat.embedding(&id).unwrap().clone();
                    out.push(task(
                        vec![id.clone(), m.sub.clone(), m.big.clone()],
                        Box::new(move |e| {
                            let sub = e.presentation(&m.sub)?;
                            let big = e.presentation(&m.big)?;
                            hopf::check_embedding(&m.spec, &sub, &big, n).map_err(s)
                        }),
                    ));
                }
            }
            Suite::Realization => {
                for id in self.ids(Kind::Realization) {
                    let i = id.clone();
                    out.push(task(
                        vec![id.clone()],
                        Box::new(move |e| opalg::realization_suite(e.catalog, &i, &e.samples(), e.config.order).map_err(s)),
                    ));
                }
                for id in self.ids(Kind::Casimir) {
                    let i = id.clone();
                    out.push(task(
                        vec![id.clone()],
                        Box::new(move |e| opalg::casimir_suite(e.catalog, &i, &e.samples()).map_err(s)),
                    ));
                }
            }
            Suite::Symmetry => {
                for id in self.ids(Kind::SymmetryTable) {
                    let i = id.clone();
                    out.push(task(
                        vec![id.clone()],
                        Box::new(move |e| opalg::symmetry_suite(e.catalog, &i, &e.samples()).map_err(s)),
                    ));
                }
            }
            Suite::Lattice => {
                for id in self.ids(Kind::SymmetryTable) {
                    let i = id.clone();
                    out.push(task(
                        vec![id.clone()],
                        Box::new(move |e| {
                            lattice::symmetry_suite(e.catalog, &i, &e.config.lattice, e.config.tolerance).map_err(s)
                        }),
                    ));
                }
                out.push(task(
                    vec!["lattice".to_string()],
                    Box::new(move |e| Ok(lattice::equation_suite(&e.config.lattice, e.config.tolerance))),
                ));
            }
        }
        out
    }

    fn samples(&self) -> Vec<Sample> {
        self.config
            .samples
            .iter()
            .map(|(step, m)| Sample {
                step: step.clone(),
                m: m.clone(),
            })
            .collect()
    }

    /// Contraction squares: `first` twists a quantum algebra, `outer`
    /// contracts the twisted result, and `second` twists the contraction of
    /// the quantum algebra into the same target.
    fn squares(&self) -> Vec<Square> {
        let cat = self.catalog;
        let mut out = Vec::new();
        for outer in self.ids(Kind::Contraction) {
            let c2 = cat.contraction(&outer).unwrap();
            for first in self.ids(Kind::Twist) {
                let t1 = cat.twist(&first).unwrap();
                if t1.target != c2.source {
                    continue;
                }
                for inner in self.ids(Kind::Contraction) {
                    let c1 = cat.contraction(&inner).unwrap();
                    if c1.source != t1.source {
                        continue;
                    }
                    for second in self.ids(Kind::Twist) {
                        let t2 = cat.twist(&second).unwrap();
                        if t2.source == c1.target && t2.target == c2.target && t2.map.inverse.is_some() {
                            out.push(Square {
                                outer: outer.clone(),
                                first: first.clone(),
                                second,
                                contracted: c1.target.clone(),
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

struct Square {
    outer: String,
    first: String,
    second: String,
    contracted: String,
}

fn s(e: impl ToString) -> String {
    e.to_string()
}
