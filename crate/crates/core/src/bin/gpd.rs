//! Command-line front door: parses `.gpd` model files and runs the library
//! checks on the declared objects. Exit status: 0 = check passed,
//! 1 = check failed, 2 = error (parse, resolution, precondition, budget).

use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use groupoidal::dsl;
use groupoidal::error::{Budget, Error};
use groupoidal::fib::{is_bm_equivalence, is_univalent_fibration, univalent_complete};
use groupoidal::harness::{run_theorem_suite, GenConfig};
use groupoidal::segal::{
    completeness_profile, dk_classify, induced_nerve_map, is_reedy_fibrant, nerve,
    reedy_replace, univalence_witness, weighted_limit,
};
use groupoidal::simpset::{shape, Shape};

#[derive(Parser)]
#[command(name = "gpd", about = "finite-groupoid model checker", version)]
struct Cli {
    /// output format
    #[arg(long, global = true, value_enum, default_value_t = Emit::Text)]
    emit: Emit,
    /// cap on enumerated morphisms (objects are capped at a quarter of this)
    #[arg(long, global = true, default_value_t = 1 << 18)]
    budget: usize,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Verb {
    /// Parse a model file and run every structural validation
    Validate { file: String },
    /// Decide univalence of a declared fibration
    CheckUnivalent {
        file: String,
        /// fibration name
        fibration: String,
    },
    /// Decide completeness of the nerve of a declared fibration
    CheckComplete {
        file: String,
        /// fibration name
        fibration: String,
        /// Reedy-replace the nerve first if it is not already Reedy fibrant
        #[arg(long)]
        replace: bool,
    },
    /// Build the nerve of a declared fibration and print its level census
    Nerve {
        file: String,
        /// fibration name
        fibration: String,
        /// truncation level (2 or 3)
        #[arg(long, default_value_t = 3)]
        m: usize,
    },
    /// Weighted limit of the nerve of a declared fibration
    Wlim {
        file: String,
        /// fibration name
        fibration: String,
        /// weight shape: deltaN, boundaryN, hornN_K, spineN, J2, K
        #[arg(long)]
        weight: String,
        /// truncation level of the nerve
        #[arg(long, default_value_t = 3)]
        m: usize,
    },
    /// Nondegenerate-cell census of a shape from the weight library
    Shape {
        /// deltaN, boundaryN, hornN_K, spineN, J2, K
        name: String,
    },
    /// Decide whether a declared square is a Bousfield–Morita equivalence
    CheckBm {
        file: String,
        /// square name
        square: String,
    },
    /// Decide whether a declared square induces a DK-equivalence of nerves
    CheckDk {
        file: String,
        /// square name
        square: String,
        /// truncation level of the nerves
        #[arg(long, default_value_t = 2)]
        m: usize,
    },
    /// Univalent completion of a declared fibration against a universe
    Complete {
        file: String,
        /// fibration name
        fibration: String,
        /// universe name
        #[arg(long)]
        universe: String,
        /// functor name of a classifying base map; searched when omitted
        #[arg(long)]
        classifier: Option<String>,
    },
    /// Search for a classifying map of a declared fibration into a universe
    Classify {
        file: String,
        /// fibration name
        fibration: String,
        /// universe name
        #[arg(long)]
        universe: String,
    },
    /// Run the generated theorem suites and print the JSON report
    Harness {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// multiply every suite's instance count (1.0 = acceptance scale)
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// corrupt the univalence verdict on even instances (self-test)
        #[arg(long)]
        fault_injection: bool,
    },
}

fn parse_shape(s: &str) -> Result<Shape, Error> {
    let bad = || Error::Precondition(format!("unknown shape '{s}'"));
    match s {
        "J2" | "j2" => return Ok(Shape::J2),
        "K" | "k" => return Ok(Shape::K),
        _ => {}
    }
    if let Some(rest) = s.strip_prefix("delta") {
        return rest.parse().map(Shape::Simplex).map_err(|_| bad());
    }
    if let Some(rest) = s.strip_prefix("boundary") {
        return rest.parse().map(Shape::Boundary).map_err(|_| bad());
    }
    if let Some(rest) = s.strip_prefix("spine") {
        return rest.parse().map(Shape::Spine).map_err(|_| bad());
    }
    if let Some(rest) = s.strip_prefix("horn") {
        if let Some((n, k)) = rest.split_once('_') {
            if let (Ok(n), Ok(k)) = (n.parse(), k.parse()) {
                return Ok(Shape::Horn(n, k));
            }
        }
    }
    Err(bad())
}

/// pass/fail verdict plus a JSON payload and a human line
struct Report {
    pass: bool,
    human: String,
    payload: serde_json::Value,
}

fn load(file: &str) -> Result<dsl::ModelFile, Error> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| Error::Precondition(format!("cannot read {file}: {e}")))?;
    dsl::parse(&text)
}

fn run(cli: &Cli) -> Result<Report, Error> {
    let b = Budget::new((cli.budget / 4).max(1024), cli.budget);
    match &cli.verb {
        Verb::Validate { file } => {
            let model = load(file)?;
            let violations = model.validate();
            Ok(Report {
                pass: violations.is_empty(),
                human: if violations.is_empty() {
                    "all declarations valid".into()
                } else {
                    violations.join("\n")
                },
                payload: json!({ "violations": violations }),
            })
        }
        Verb::CheckUnivalent { file, fibration } => {
            let model = load(file)?;
            let p = model.fibration(fibration)?;
            let verdict = is_univalent_fibration(&p, &b)?;
            let witness = if verdict {
                None
            } else {
                let nd = nerve(&p, 2, &b)?;
                univalence_witness(&nd.x, &b)?
            };
            Ok(Report {
                pass: verdict,
                human: match &witness {
                    Some(w) => format!(
                        "{fibration}: not univalent; equivalence {w} is outside the unit's essential image"
                    ),
                    None if verdict => format!("{fibration}: univalent"),
                    None => format!(
                        "{fibration}: not univalent; the unit fails on hom-sets"
                    ),
                },
                payload: json!({ "univalent": verdict, "witness": witness }),
            })
        }
        Verb::CheckComplete {
            file,
            fibration,
            replace,
        } => {
            let model = load(file)?;
            let p = model.fibration(fibration)?;
            let nd = nerve(&p, 3, &b)?;
            let x = if is_reedy_fibrant(&nd.x, &b)? {
                nd.x
            } else if *replace {
                reedy_replace(&nd.x, false, &b)?.replaced
            } else {
                return Err(Error::Precondition(
                    "nerve is not Reedy fibrant; pass --replace to factor it first".into(),
                ));
            };
            let (profile, (ko, km)) = completeness_profile(&x, &b)?;
            let verdict = profile.is_trivial_fibration();
            Ok(Report {
                pass: verdict,
                human: format!(
                    "{fibration}: complete = {verdict} (K-limit {ko} objects / {km} morphisms; endpoint map: equivalence = {}, surjective on objects = {})",
                    profile.is_equivalence(),
                    profile.isofibration && profile.essentially_surjective,
                ),
                payload: json!({
                    "complete": verdict,
                    "endpoint_map": profile,
                    "k_limit_census": { "objects": ko, "morphisms": km },
                }),
            })
        }
        Verb::Nerve { file, fibration, m } => {
            let model = load(file)?;
            let p = model.fibration(fibration)?;
            let nd = nerve(&p, *m, &b)?;
            let levels: Vec<_> = nd
                .x
                .levels
                .iter()
                .map(|g| json!({ "objects": g.n_objects(), "morphisms": g.n_morphisms() }))
                .collect();
            let human = nd
                .x
                .levels
                .iter()
                .enumerate()
                .map(|(n, g)| format!("X_{n}: {} objects, {} morphisms", g.n_objects(), g.n_morphisms()))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Report {
                pass: true,
                human,
                payload: json!({ "m": m, "levels": levels }),
            })
        }
        Verb::Wlim {
            file,
            fibration,
            weight,
            m,
        } => {
            let model = load(file)?;
            let p = model.fibration(fibration)?;
            let nd = nerve(&p, *m, &b)?;
            let w = Arc::new(shape(&parse_shape(weight)?, *m)?);
            let wl = weighted_limit(&w, &nd.x, &b)?;
            Ok(Report {
                pass: true,
                human: format!(
                    "{weight}-weighted limit: {} objects, {} morphisms, {} legs",
                    wl.apex.n_objects(),
                    wl.apex.n_morphisms(),
                    wl.legs.len(),
                ),
                payload: json!({
                    "weight": weight,
                    "apex": { "objects": wl.apex.n_objects(), "morphisms": wl.apex.n_morphisms() },
                    "legs": wl.legs.len(),
                }),
            })
        }
        Verb::Shape { name } => {
            let kind = parse_shape(name)?;
            let s = shape(&kind, kind.declared_dim().max(3))?;
            s.validate()?;
            let census: Vec<usize> = (0..=s.trunc).map(|n| s.nondegenerate(n).len()).collect();
            Ok(Report {
                pass: true,
                human: format!("{name}: nondegenerate census {census:?} (valid)"),
                payload: json!({ "shape": name, "nondegenerate_census": census }),
            })
        }
        Verb::CheckBm { file, square } => {
            let model = load(file)?;
            let sq = model.square(square)?;
            let verdict = is_bm_equivalence(&sq)?;
            Ok(Report {
                pass: verdict,
                human: format!("{square}: BM-equivalence = {verdict}"),
                payload: json!({ "bm_equivalence": verdict }),
            })
        }
        Verb::CheckDk { file, square, m } => {
            let model = load(file)?;
            let sq = model.square(square)?;
            let (nmap, _, _) = induced_nerve_map(&sq, *m, &b)?;
            let r = dk_classify(&nmap, &b)?;
            Ok(Report {
                pass: r.dk,
                human: format!(
                    "{square}: DK-equivalence = {} (fully faithful = {}, essentially surjective = {})",
                    r.dk, r.fully_faithful, r.essentially_surjective
                ),
                payload: json!(r),
            })
        }
        Verb::Classify {
            file,
            fibration,
            universe,
        } => {
            let model = load(file)?;
            let p = model.fibration(fibration)?;
            let u = model.universe(universe)?;
            match groupoidal::fib::classify(&p, &u, &b)? {
                Some((bmap, _)) => {
                    let images: Vec<_> = p
                        .base()
                        .objects()
                        .map(|o| {
                            json!({
                                "object": p.base().obj_name(o),
                                "image": u.pi.base().obj_name(bmap.ob(o)),
                            })
                        })
                        .collect();
                    Ok(Report {
                        pass: true,
                        human: format!("{fibration}: classified over {universe}"),
                        payload: json!({ "classified": true, "base_map": images }),
                    })
                }
                None => Ok(Report {
                    pass: false,
                    human: format!("{fibration}: no classifying map into {universe}"),
                    payload: json!({ "classified": false }),
                }),
            }
        }
        Verb::Complete {
            file,
            fibration,
            universe,
            classifier,
        } => {
            let model = load(file)?;
            let p = model.fibration(fibration)?;
            let u = model.universe(universe)?;
            let bmap = match classifier {
                Some(name) => model.functor(name)?.clone(),
                None => {
                    groupoidal::fib::classify(&p, &u, &b)?
                        .ok_or_else(|| {
                            Error::Precondition(format!(
                                "no classifying map of {fibration} into {universe} was found"
                            ))
                        })?
                        .0
                }
            };
            let (up, sq) = univalent_complete(&p, &u, &bmap, &b)?;
            let univalent = is_univalent_fibration(&up, &b)?;
            let bm = is_bm_equivalence(&sq)?;
            Ok(Report {
                pass: univalent && bm,
                human: format!(
                    "{fibration}: completed over base with {} objects / {} morphisms; univalent = {univalent}, connecting square BM = {bm}",
                    up.base().n_objects(),
                    up.base().n_morphisms(),
                ),
                payload: json!({
                    "completed_base": {
                        "objects": up.base().n_objects(),
                        "morphisms": up.base().n_morphisms(),
                    },
                    "completed_total": {
                        "objects": up.total().n_objects(),
                        "morphisms": up.total().n_morphisms(),
                    },
                    "univalent": univalent,
                    "connecting_square_bm": bm,
                }),
            })
        }
        Verb::Harness {
            seed,
            scale,
            fault_injection,
        } => {
            let mut cfg = GenConfig {
                seed: *seed,
                fault_injection: *fault_injection,
                ..GenConfig::default()
            };
            let scale = |n: usize| ((n as f64 * scale).round() as usize).max(1);
            cfg.counts.univalence_completeness = scale(cfg.counts.univalence_completeness);
            cfg.counts.two_route_univalence = scale(cfg.counts.two_route_univalence);
            cfg.counts.pullback_univalence = scale(cfg.counts.pullback_univalence);
            cfg.counts.bm_levelwise = scale(cfg.counts.bm_levelwise);
            cfg.counts.completion_dk = scale(cfg.counts.completion_dk);
            cfg.counts.dk_levelwise = scale(cfg.counts.dk_levelwise);
            cfg.counts.homotopy_invariance = scale(cfg.counts.homotopy_invariance);
            let report = run_theorem_suite(&cfg);
            let human = report
                .suites
                .iter()
                .map(|s| {
                    format!(
                        "{}: {}/{} passed, {} budget-exhausted{}",
                        s.suite,
                        s.passes,
                        s.instances,
                        s.budget_exhausted.len(),
                        if s.failures.is_empty() {
                            String::new()
                        } else {
                            format!(", {} FAILED", s.failures.len())
                        },
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Report {
                pass: report.ok,
                human,
                payload: serde_json::to_value(&report).expect("report serializes"),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(r) => {
            match cli.emit {
                Emit::Text => println!("{}", r.human),
                Emit::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "pass": r.pass,
                        "report": r.payload,
                    }))
                    .expect("payload serializes")
                ),
            }
            if r.pass {
                ExitCode::from(0)
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            match cli.emit {
                Emit::Text => eprintln!("error: {e}"),
                Emit::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({ "error": e.to_string() }))
                        .expect("error serializes")
                ),
            }
            ExitCode::from(2)
        }
    }
}
