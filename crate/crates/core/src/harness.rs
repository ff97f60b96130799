//! Deterministic random generation of fibrations and squares, plus the
//! theorem property suites with a JSON report. Instances are checked in
//! parallel; aggregation preserves instance order, so a fixed configuration
//! yields a byte-identical report apart from the wall-clock field.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Budget, Error, Result};
use crate::fib::{
    classify, grothendieck, is_bm_equivalence, is_univalent_fibration, set_universe,
    univalent_complete, univalent_oracle, Fibration, FibrationSquare,
};
use crate::groupoid::{
    codiscrete, delooping, discrete, disjoint_union, GroupTable, Groupoid, MorId, ObjId,
};
use crate::map::{full_subgroupoid, functor_classify, GroupoidMap};
use crate::segal::{
    dk_classify, find_functor_over, induced_nerve_map, inv_object, is_complete,
    is_univalent_segal, iso_comma, nerve, reedy_replace,
};
use crate::limits::pullback;

// ---------------------------------------------------------------------------
// configuration and report

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub seed: u64,
    pub max_base_objects: usize,
    pub max_fiber_objects: usize,
    pub groups: Vec<GroupTable>,
    pub counts: SuiteCounts,
    /// deliberately corrupts the univalence verdict on a slice of the
    /// completeness suite, to demonstrate that violations are caught
    pub fault_injection: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteCounts {
    pub univalence_completeness: usize,
    pub two_route_univalence: usize,
    pub pullback_univalence: usize,
    pub bm_levelwise: usize,
    pub completion_dk: usize,
    pub dk_levelwise: usize,
    pub homotopy_invariance: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            max_base_objects: 4,
            max_fiber_objects: 2,
            // groups of order ≤ 2 only: one BZ3-based instance costs tens
            // of seconds before its replacement gets bucketed
            groups: vec![GroupTable::trivial(), GroupTable::cyclic(2)],
            counts: SuiteCounts {
                univalence_completeness: 200,
                two_route_univalence: 200,
                pullback_univalence: 100,
                bm_levelwise: 60,
                completion_dk: 50,
                dk_levelwise: 50,
                homotopy_invariance: 25,
            },
            fault_injection: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub instances: usize,
    pub passes: usize,
    pub failures: Vec<String>,
    pub budget_exhausted: Vec<String>,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub seed: u64,
    pub suites: Vec<SuiteReport>,
    pub ok: bool,
    pub wall_clock_ms: u128,
}

enum Outcome {
    Pass,
    Fail(String),
    Budget(String),
}

fn run_suite<F>(name: &str, n: usize, seed: u64, check: F) -> SuiteReport
where
    F: Fn(u64) -> Outcome + Sync,
{
    let t = Instant::now();
    let outcomes: Vec<Outcome> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let ti = Instant::now();
            let o = check(i);
            if std::env::var_os("HARNESS_TRACE").is_some() {
                eprintln!("[{name} {i}] {:?}", ti.elapsed());
            }
            o
        })
        .collect();
    if std::env::var_os("HARNESS_TRACE").is_some() {
        eprintln!("[{name}] total {:?}", t.elapsed());
    }
    let mut passes = 0;
    let mut failures = Vec::new();
    let mut budget_exhausted = Vec::new();
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Outcome::Pass => passes += 1,
            Outcome::Fail(msg) => failures.push(format!("instance {i}: {msg}")),
            Outcome::Budget(msg) => budget_exhausted.push(format!("instance {i}: {msg}")),
        }
    }
    SuiteReport {
        suite: name.to_string(),
        instances: n,
        passes,
        failures,
        budget_exhausted,
        seed,
    }
}

/// Folds an error into the instance outcome: budget aborts go to their own
/// bucket, anything else is a failure.
fn outcome_of(r: Result<Outcome>) -> Outcome {
    match r {
        Ok(o) => o,
        Err(Error::BudgetExceeded(m)) => Outcome::Budget(m),
        Err(e) => Outcome::Fail(format!("error: {e}")),
    }
}

// ---------------------------------------------------------------------------
// generators

fn rng_for(cfg: &GenConfig, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn sample_fiber(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Arc<Groupoid> {
    if rng.gen_bool(0.7) {
        Arc::new(discrete(rng.gen_range(1..=cfg.max_fiber_objects)))
    } else {
        let g = &cfg.groups[rng.gen_range(0..cfg.groups.len())];
        Arc::new(delooping(g))
    }
}

/// A permutation of 0..n as an automorphism of discrete(n).
fn perm_auto(f: &Arc<Groupoid>, perm: &[usize]) -> GroupoidMap {
    GroupoidMap::new_unchecked(
        f.clone(),
        f.clone(),
        perm.iter().map(|&i| i as ObjId).collect(),
        perm.iter().map(|&i| f.identity(i as ObjId)).collect(),
    )
}

/// One fibration piece via the Grothendieck construction over a connected
/// or discrete base.
fn gen_piece(cfg: &GenConfig, rng: &mut ChaCha8Rng, max_objs: usize) -> Result<(Fibration, String)> {
    match rng.gen_range(0..3u8) {
        0 => {
            // discrete base, independent fibers, no action
            let k = rng.gen_range(1..=max_objs);
            let base = Arc::new(discrete(k));
            let fibers: Vec<Arc<Groupoid>> = (0..k).map(|_| sample_fiber(cfg, rng)).collect();
            let (p, _) = grothendieck(&base, &fibers, &HashMap::new())?;
            Ok((p, format!("discrete({k}) base")))
        }
        1 => {
            // codiscrete base, a single discrete fiber, permutation cocycle;
            // capped at two base objects — codiscrete homs square the cost
            // of every downstream check
            let k = rng.gen_range(1..=max_objs.min(2));
            let n = rng.gen_range(1..=cfg.max_fiber_objects);
            let base = Arc::new(codiscrete(k));
            let fiber = Arc::new(discrete(n));
            let gs: Vec<Vec<usize>> = (0..k)
                .map(|_| {
                    let mut p: Vec<usize> = (0..n).collect();
                    p.shuffle(rng);
                    p
                })
                .collect();
            let mut action: HashMap<MorId, GroupoidMap> = HashMap::new();
            for m in base.morphisms() {
                let (a, c) = (base.src(m) as usize, base.tgt(m) as usize);
                // φ_c ∘ φ_a⁻¹, a coboundary, hence strictly functorial
                let mut perm = vec![0usize; n];
                for (x, v) in perm.iter_mut().enumerate() {
                    let pre = gs[a].iter().position(|&y| y == x).unwrap();
                    *v = gs[c][pre];
                }
                action.insert(m, perm_auto(&fiber, &perm));
            }
            let (p, _) = grothendieck(&base, &vec![fiber; k], &action)?;
            Ok((p, format!("codiscrete({k}) base, cocycle on discrete({n})")))
        }
        _ => {
            // delooping base: trivial action, or the Cayley action on the
            // underlying set of the group
            let g = &cfg.groups[rng.gen_range(0..cfg.groups.len())];
            let base = Arc::new(delooping(g));
            let n = g.elem_names.len();
            if rng.gen_bool(0.5) || n > cfg.max_fiber_objects {
                let fiber = sample_fiber(cfg, rng);
                let mut action = HashMap::new();
                for m in base.morphisms() {
                    action.insert(m, GroupoidMap::identity(fiber.clone()));
                }
                let (p, _) = grothendieck(&base, &[fiber], &action)?;
                Ok((p, format!("B{} base, trivial action", g.name)))
            } else {
                let fiber = Arc::new(discrete(n));
                let mut action = HashMap::new();
                for m in base.morphisms() {
                    let i = m as usize; // delooping morphisms are the elements
                    let perm: Vec<usize> = (0..n).map(|j| g.mul[i][j]).collect();
                    action.insert(m, perm_auto(&fiber, &perm));
                }
                let (p, _) = grothendieck(&base, &[fiber], &action)?;
                Ok((p, format!("B{} base, Cayley action", g.name)))
            }
        }
    }
}

/// Disjoint union of two fibrations, componentwise.
fn union_fibration(p1: &Fibration, p2: &Fibration) -> Result<Fibration> {
    let total = Arc::new(disjoint_union(&[p1.total().clone(), p2.total().clone()]));
    let base = Arc::new(disjoint_union(&[p1.base().clone(), p2.base().clone()]));
    let oo = p1.base().n_objects() as ObjId;
    let om = p1.base().n_morphisms() as MorId;
    let on_obj = p1
        .map
        .on_obj
        .iter()
        .copied()
        .chain(p2.map.on_obj.iter().map(|&o| o + oo))
        .collect();
    let on_mor = p1
        .map
        .on_mor
        .iter()
        .copied()
        .chain(p2.map.on_mor.iter().map(|&m| m + om))
        .collect();
    Fibration::new(GroupoidMap::new_unchecked(total, base, on_obj, on_mor))
}

/// Deterministic fibration generator: bases from discrete / codiscrete /
/// group deloopings / two-piece disjoint unions, totals via the
/// Grothendieck construction (always a valid isofibration).
pub fn gen_fibration(cfg: &GenConfig, index: u64) -> Result<(Fibration, String)> {
    let mut rng = rng_for(cfg, index);
    if cfg.max_base_objects >= 2 && rng.gen_bool(0.35) {
        let half = (cfg.max_base_objects / 2).max(1);
        let (p1, l1) = gen_piece(cfg, &mut rng, half)?;
        let (p2, l2) = gen_piece(cfg, &mut rng, half)?;
        let p = union_fibration(&p1, &p2)?;
        Ok((p, format!("union[{l1} | {l2}]")))
    } else {
        gen_piece(cfg, &mut rng, cfg.max_base_objects)
    }
}

/// Pulls p back along g: B′ → base(p); the square is homotopy-cartesian by
/// construction (strict pullback of an isofibration).
pub fn pullback_square(p: &Fibration, g: &GroupoidMap) -> Result<(Fibration, FibrationSquare)> {
    let span = pullback(g, &p.map)?;
    let p2 = Fibration::new(span.left.clone())?;
    let sq = FibrationSquare {
        p: p2.clone(),
        p_prime: p.clone(),
        top: span.right.clone(),
        bottom: g.clone(),
    };
    Ok((p2, sq))
}

/// Deterministic square generator: a pullback square of a generated
/// fibration along a generated base map, or (every seventh index) a
/// labelled broken square that must fail the homotopy-cartesian check.
pub fn gen_square(cfg: &GenConfig, index: u64) -> Result<(FibrationSquare, String)> {
    let mut rng = rng_for(cfg, index.wrapping_add(0x5157_5157));
    let (p, label) = gen_fibration(cfg, index)?;
    if index % 7 == 6 {
        // broken: a strictly commuting square whose comparison map to the
        // pullback collapses two fibers, so it is not homotopy-cartesian;
        // labelled so callers treat it as a negative instance
        let t = Arc::new(discrete(1));
        let tot = Arc::new(discrete(2));
        let fold = Fibration::new(GroupoidMap::to_terminal(tot.clone(), t.clone()))?;
        let sq = FibrationSquare {
            p: fold.clone(),
            p_prime: fold,
            top: GroupoidMap::constant(tot.clone(), tot, 0),
            bottom: GroupoidMap::identity(t),
        };
        return Ok((sq, "broken[collapsed-top]".to_string()));
    }
    let g = sample_base_map(&mut rng, p.base(), cfg)?;
    let (_, sq) = pullback_square(&p, &g)?;
    Ok((sq, format!("pullback[{label}]")))
}

/// Samples a functor into `cod` from a small domain, via bounded
/// enumeration; falls back to the identity.
fn sample_base_map(
    rng: &mut ChaCha8Rng,
    cod: &Arc<Groupoid>,
    cfg: &GenConfig,
) -> Result<GroupoidMap> {
    let dom: Arc<Groupoid> = match rng.gen_range(0..3u8) {
        0 => return Ok(GroupoidMap::identity(cod.clone())),
        1 => Arc::new(discrete(rng.gen_range(1..=cfg.max_base_objects))),
        _ => Arc::new(delooping(&cfg.groups[rng.gen_range(0..cfg.groups.len())])),
    };
    let budget = Budget::new(1 << 12, 1 << 14);
    match crate::homs::enumerate_functors(&dom, cod, &budget) {
        Ok(fs) if !fs.is_empty() => Ok(fs[rng.gen_range(0..fs.len())].clone()),
        _ => Ok(GroupoidMap::identity(cod.clone())),
    }
}

/// A univalent fibration: the universal set fibration restricted to a full
/// subgroupoid of the universe base (fully faithful pullbacks of a
/// univalent fibration are univalent).
fn gen_univalent(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Result<(Fibration, GroupoidMap)> {
    let u = set_universe(cfg.max_fiber_objects.min(2));
    let n = u.pi.base().n_objects();
    let mut objs: Vec<ObjId> = (0..n as ObjId).collect();
    objs.shuffle(rng);
    let keep = rng.gen_range(1..=n);
    let mut chosen: Vec<ObjId> = objs[..keep].to_vec();
    chosen.sort_unstable();
    let (sub, incl) = full_subgroupoid(u.pi.base(), &chosen);
    let _ = sub;
    let (p, _) = pullback_square(&u.pi, &incl)?;
    Ok((p, incl))
}

// ---------------------------------------------------------------------------
// suites

/// Per-instance budget: roomy on objects (nerve levels and matching
/// objects legitimately reach tens of thousands) but tight enough on
/// morphisms that genuinely exploding replacements abort in a few seconds.
fn wide() -> Budget {
    Budget::new(1 << 17, 1 << 18)
}

/// Tighter budget for the Reedy-replacement route, whose exploding
/// instances must be detected and bucketed quickly.
fn tight() -> Budget {
    Budget::new(1 << 17, 1 << 16)
}

/// A fibration is univalent exactly when the Reedy replacement
/// of its nerve is complete.
fn suite_univalence_completeness(cfg: &GenConfig) -> SuiteReport {
    run_suite(
        "univalence-iff-completeness",
        cfg.counts.univalence_completeness,
        cfg.seed,
        |i| {
            outcome_of((|| {
                let (p, label) = gen_fibration(cfg, i)?;
                let b = wide();
                let mut uv = is_univalent_fibration(&p, &b)?;
                if cfg.fault_injection && i % 2 == 0 {
                    uv = !uv;
                }
                let tb = tight();
                let nd = nerve(&p, 3, &tb)?;
                let rr = reedy_replace(&nd.x, false, &tb)?;
                let complete = is_complete(&rr.replaced, &tb)?;
                if uv == complete {
                    Ok(Outcome::Pass)
                } else {
                    Ok(Outcome::Fail(format!(
                        "{label}: univalent={uv} but complete={complete}"
                    )))
                }
            })())
        },
    )
}

/// The equivalence-bundle route on the nerve agrees with the
/// direct fiberwise oracle.
fn suite_two_route_univalence(cfg: &GenConfig) -> SuiteReport {
    run_suite(
        "two-route-univalence",
        cfg.counts.two_route_univalence,
        cfg.seed,
        |i| {
            outcome_of((|| {
                let (p, label) = gen_fibration(cfg, i)?;
                let b = wide();
                let direct = univalent_oracle(&p, &b)?;
                // the univalence reading only consumes levels 0..2
                let nd = nerve(&p, 2, &b)?;
                let via_nerve = is_univalent_segal(&nd.x, &b)?;
                if direct == via_nerve {
                    Ok(Outcome::Pass)
                } else {
                    Ok(Outcome::Fail(format!(
                        "{label}: oracle={direct} but nerve route={via_nerve}"
                    )))
                }
            })())
        },
    )
}

/// Pullback stability: the pullback of a univalent fibration along g is
/// univalent exactly when g is fully faithful. Returns the report plus the
/// number of instances on each side of the biconditional.
pub fn suite_pullback_univalence(cfg: &GenConfig) -> (SuiteReport, usize, usize) {
    let n = cfg.counts.pullback_univalence;
    let outcomes: Vec<(Outcome, Option<bool>)> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let r = (|| {
                let mut rng = rng_for(cfg, i.wrapping_add(0x58_0000));
                let (p, _) = gen_univalent(cfg, &mut rng)?;
                let b = wide();
                // alternate forced fully faithful / non-fully-faithful maps
                // with sampled ones so both sides are exercised
                let g = match i % 4 {
                    0 => GroupoidMap::identity(p.base().clone()),
                    1 => {
                        if p.base().n_objects() > 0 {
                            GroupoidMap::constant(
                                Arc::new(discrete(2)),
                                p.base().clone(),
                                (i as ObjId) % p.base().n_objects() as ObjId,
                            )
                        } else {
                            GroupoidMap::identity(p.base().clone())
                        }
                    }
                    _ => sample_base_map(&mut rng, p.base(), cfg)?,
                };
                let (pulled, _) = pullback_square(&p, &g)?;
                let ff = functor_classify(&g).fully_faithful();
                let uv = univalent_oracle(&pulled, &b)?;
                if uv == ff {
                    Ok((Outcome::Pass, Some(ff)))
                } else {
                    Ok((
                        Outcome::Fail(format!("ff={ff} but pullback univalent={uv}")),
                        Some(ff),
                    ))
                }
            })();
            match r {
                Ok(v) => v,
                Err(Error::BudgetExceeded(m)) => (Outcome::Budget(m), None),
                Err(e) => (Outcome::Fail(format!("error: {e}")), None),
            }
        })
        .collect();
    let ff_side = outcomes.iter().filter(|(_, s)| *s == Some(true)).count();
    let nff_side = outcomes.iter().filter(|(_, s)| *s == Some(false)).count();
    let mut passes = 0;
    let mut failures = Vec::new();
    let mut budget_exhausted = Vec::new();
    for (i, (o, _)) in outcomes.into_iter().enumerate() {
        match o {
            Outcome::Pass => passes += 1,
            Outcome::Fail(m) => failures.push(format!("instance {i}: {m}")),
            Outcome::Budget(m) => budget_exhausted.push(format!("instance {i}: {m}")),
        }
    }
    (
        SuiteReport {
            suite: "pullback-univalence-iff-ff".into(),
            instances: n,
            passes,
            failures,
            budget_exhausted,
            seed: cfg.seed,
        },
        ff_side,
        nff_side,
    )
}

/// Every generated BM-equivalence between univalent fibrations is a
/// levelwise equivalence; the fixed labelled control (a BM-equivalence
/// between non-univalent fibrations) must fail levelwise-ness.
fn suite_bm_levelwise(cfg: &GenConfig) -> SuiteReport {
    let mut report = run_suite("bm-levelwise", cfg.counts.bm_levelwise, cfg.seed, |i| {
        outcome_of((|| {
            let mut rng = rng_for(cfg, i.wrapping_add(0x59_0000));
            let (p, _) = gen_univalent(cfg, &mut rng)?;
            let b = wide();
            // an essentially surjective bottom map: identity or an
            // iso-comma fattening of the base
            let g = if i % 2 == 0 {
                GroupoidMap::identity(p.base().clone())
            } else {
                iso_comma(&GroupoidMap::identity(p.base().clone()), &b)?.second
            };
            let (pulled, sq) = pullback_square(&p, &g)?;
            if !is_bm_equivalence(&sq)? {
                return Ok(Outcome::Fail("constructed square is not a BM-equivalence".into()));
            }
            if !univalent_oracle(&pulled, &b)? {
                return Ok(Outcome::Fail("pullback along an equivalence lost univalence".into()));
            }
            let lw = functor_classify(&sq.top).is_equivalence()
                && functor_classify(&sq.bottom).is_equivalence();
            if lw {
                Ok(Outcome::Pass)
            } else {
                Ok(Outcome::Fail(
                    "BM-equivalence between univalent fibrations is not levelwise".into(),
                ))
            }
        })())
    });
    // negative control: BZ2 over the point pulled back along the eso (not
    // fully faithful) fold discrete(2) → point; BM, not levelwise, and not
    // between univalent fibrations
    report.instances += 1;
    let control = (|| -> Result<bool> {
        let b = wide();
        let t = Arc::new(discrete(1));
        let e = Arc::new(delooping(&GroupTable::cyclic(2)));
        let p1 = Fibration::new(GroupoidMap::to_terminal(e, t.clone()))?;
        let g = GroupoidMap::to_terminal(Arc::new(discrete(2)), t);
        let (pulled, sq) = pullback_square(&p1, &g)?;
        let bm = is_bm_equivalence(&sq)?;
        let lw = functor_classify(&sq.top).is_equivalence()
            && functor_classify(&sq.bottom).is_equivalence();
        let uv = univalent_oracle(&p1, &b)? || univalent_oracle(&pulled, &b)?;
        Ok(bm && !lw && !uv)
    })();
    match control {
        Ok(true) => report.passes += 1,
        Ok(false) => report
            .failures
            .push("negative control: expected BM ∧ ¬levelwise ∧ ¬univalent".into()),
        Err(e) => report.failures.push(format!("negative control: {e}")),
    }
    report
}

/// Completion squares: univalent completion of a generated discrete-fiber
/// fibration induces a DK-equivalence of nerves.
fn suite_completion_dk(cfg: &GenConfig) -> SuiteReport {
    run_suite("completion-dk", cfg.counts.completion_dk, cfg.seed, |i| {
        outcome_of((|| {
            let mut rng = rng_for(cfg, i.wrapping_add(0x516_0000));
            // discrete fibers only, so the set universe classifies them
            let k = rng.gen_range(1..=cfg.max_base_objects.min(2));
            let sizes: Vec<usize> = (0..k)
                .map(|_| rng.gen_range(1..=cfg.max_fiber_objects.min(2)))
                .collect();
            let base = Arc::new(discrete(k));
            let fibers: Vec<Arc<Groupoid>> =
                sizes.iter().map(|&s| Arc::new(discrete(s))).collect();
            let (p, _) = grothendieck(&base, &fibers, &HashMap::new())?;
            let u = set_universe(cfg.max_fiber_objects.min(2));
            let b = wide();
            let Some((bmap, _)) = classify(&p, &u, &b)? else {
                return Ok(Outcome::Fail("classification search found no map".into()));
            };
            let (_, sq) = univalent_complete(&p, &u, &bmap, &b)?;
            let (nmap, _, _) = induced_nerve_map(&sq, 3, &b)?;
            let r = dk_classify(&nmap, &b)?;
            if r.dk {
                Ok(Outcome::Pass)
            } else {
                Ok(Outcome::Fail(format!(
                    "completion square not DK: ff={} eso={}",
                    r.fully_faithful, r.essentially_surjective
                )))
            }
        })())
    })
}

/// Maps between univalent Segal objects: DK-equivalence coincides with
/// levelwise equivalence, in both directions.
fn suite_dk_levelwise(cfg: &GenConfig) -> SuiteReport {
    run_suite("dk-iff-levelwise", cfg.counts.dk_levelwise, cfg.seed, |i| {
        outcome_of((|| {
            let mut rng = rng_for(cfg, i.wrapping_add(0x52_0000));
            let (p, _) = gen_univalent(cfg, &mut rng)?;
            let b = wide();
            // fully faithful bottom maps with varied essential surjectivity
            let g = match i % 3 {
                0 => GroupoidMap::identity(p.base().clone()),
                1 => {
                    // a full subgroupoid inclusion, possibly missing a class
                    let n = p.base().n_objects();
                    let keep = rng.gen_range(1..=n);
                    let (_, incl) =
                        full_subgroupoid(p.base(), &(0..keep as ObjId).collect::<Vec<_>>());
                    incl
                }
                _ => iso_comma(&GroupoidMap::identity(p.base().clone()), &b)?.second,
            };
            if !functor_classify(&g).fully_faithful() {
                return Ok(Outcome::Fail("generator produced a non-ff base map".into()));
            }
            let (pulled, sq) = pullback_square(&p, &g)?;
            if !univalent_oracle(&pulled, &b)? {
                return Ok(Outcome::Fail("ff pullback lost univalence".into()));
            }
            // m = 2 suffices for both the DK and the levelwise reading and
            // keeps the fattened nerve tractable
            let (nmap, _, _) = induced_nerve_map(&sq, 2, &b)?;
            let r = dk_classify(&nmap, &b)?;
            let lw = nmap
                .levels
                .iter()
                .all(|l| functor_classify(l).is_equivalence());
            if r.dk == lw {
                Ok(Outcome::Pass)
            } else {
                Ok(Outcome::Fail(format!("dk={} but levelwise={lw}", r.dk)))
            }
        })())
    })
}

/// Homotopy invariance: pointwise-equivalent sufficiently fibrant objects
/// get the same univalence verdict, and an equivalence between their Inv
/// objects over the common edge groupoid exists.
fn suite_homotopy_invariance(cfg: &GenConfig) -> SuiteReport {
    run_suite(
        "homotopy-invariance",
        cfg.counts.homotopy_invariance,
        cfg.seed,
        |i| {
            outcome_of((|| {
                let b = wide();
                let (p, label) = gen_fibration(
                    &GenConfig {
                        max_base_objects: cfg.max_base_objects.min(2),
                        max_fiber_objects: cfg.max_fiber_objects.min(2),
                        ..cfg.clone()
                    },
                    i.wrapping_add(0x43_0000),
                )?;
                // fatten the base along an equivalence and pull back
                let g = iso_comma(&GroupoidMap::identity(p.base().clone()), &b)?.second;
                let (pulled, sq) = pullback_square(&p, &g)?;
                let _ = pulled;
                let (nmap, nd_fat, nd) = induced_nerve_map(&sq, 2, &b)?;
                for l in &nmap.levels {
                    if !functor_classify(l).is_equivalence() {
                        return Ok(Outcome::Fail(format!(
                            "{label}: comparison map is not a pointwise equivalence"
                        )));
                    }
                }
                let v1 = is_univalent_segal(&nd_fat.x, &b)?;
                let v2 = is_univalent_segal(&nd.x, &b)?;
                if v1 != v2 {
                    return Ok(Outcome::Fail(format!(
                        "{label}: verdicts differ across a pointwise equivalence"
                    )));
                }
                // Inv-level comparison over the common edge groupoid
                let bun_fat = inv_object(&nd_fat.x, &b)?;
                let bun = inv_object(&nd.x, &b)?;
                let qa = nmap.levels[1].compose(&bun_fat.linv.compose(
                    &GroupoidMap::identity(bun_fat.inv.clone()),
                ));
                let search_budget = Budget::new(1 << 12, 200_000);
                let found = find_functor_over(
                    &bun_fat.inv,
                    &bun.inv,
                    &qa,
                    &bun.linv,
                    true,
                    None,
                    &search_budget,
                )?;
                if found.is_some() {
                    Ok(Outcome::Pass)
                } else {
                    Ok(Outcome::Fail(format!(
                        "{label}: no Inv-level equivalence over the square"
                    )))
                }
            })())
        },
    )
}

/// Runs every suite; `ok` is false exactly when some suite has a failure.
/// Budget-exhausted instances live in their own bucket and never count as
/// passes.
pub fn run_theorem_suite(cfg: &GenConfig) -> Report {
    let start = Instant::now();
    let mut suites = Vec::new();
    suites.push(suite_univalence_completeness(cfg));
    suites.push(suite_two_route_univalence(cfg));
    let (s3, ff_side, nff_side) = suite_pullback_univalence(cfg);
    let mut s3 = s3;
    let side_quota = if s3.instances >= 40 { 10 } else { 1 };
    if s3.instances > 0 && (ff_side < side_quota || nff_side < side_quota) {
        s3.failures.push(format!(
            "biconditional sides under-exercised: ff={ff_side}, non-ff={nff_side}, quota={side_quota}"
        ));
    }
    suites.push(s3);
    suites.push(suite_bm_levelwise(cfg));
    suites.push(suite_completion_dk(cfg));
    suites.push(suite_dk_levelwise(cfg));
    suites.push(suite_homotopy_invariance(cfg));
    let ok = suites.iter().all(|s| s.failures.is_empty());
    Report {
        seed: cfg.seed,
        suites,
        ok,
        wall_clock_ms: start.elapsed().as_millis(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> GenConfig {
        GenConfig {
            counts: SuiteCounts {
                univalence_completeness: 12,
                two_route_univalence: 12,
                pullback_univalence: 12,
                bm_levelwise: 6,
                completion_dk: 6,
                dk_levelwise: 9,
                homotopy_invariance: 4,
            },
            ..GenConfig::default()
        }
    }

    #[test]
    fn generator_is_deterministic() {
        let cfg = small_cfg();
        for i in 0..8 {
            let (p1, l1) = gen_fibration(&cfg, i).unwrap();
            let (p2, l2) = gen_fibration(&cfg, i).unwrap();
            assert_eq!(l1, l2);
            assert_eq!(p1.map.on_obj, p2.map.on_obj);
            assert_eq!(p1.map.on_mor, p2.map.on_mor);
            assert!(p1.total().validate().is_empty());
            assert!(p1.profile.isofibration);
        }
    }

    #[test]
    fn broken_squares_fail_the_cartesian_check() {
        let cfg = small_cfg();
        let (sq, label) = gen_square(&cfg, 6).unwrap();
        assert!(label.starts_with("broken"));
        // either malformed or not homotopy-cartesian
        sq.validate().unwrap();
        assert!(!crate::fib::verify_homotopy_cartesian(&sq).unwrap());
    }

    #[test]
    fn small_run_passes_every_suite() {
        let report = run_theorem_suite(&small_cfg());
        for s in &report.suites {
            assert!(
                s.failures.is_empty(),
                "suite {} failed: {:?}",
                s.suite,
                s.failures
            );
            assert!(s.passes + s.budget_exhausted.len() >= s.instances.min(1));
        }
        assert!(report.ok);
    }

    #[test]
    fn fault_injection_is_caught() {
        let mut cfg = small_cfg();
        cfg.fault_injection = true;
        cfg.counts = SuiteCounts {
            univalence_completeness: 11,
            two_route_univalence: 0,
            pullback_univalence: 0,
            bm_levelwise: 0,
            completion_dk: 0,
            dk_levelwise: 0,
            homotopy_invariance: 0,
        };
        let report = run_theorem_suite(&cfg);
        let s = &report.suites[0];
        assert!(
            !s.failures.is_empty(),
            "fault injection must surface as certificates"
        );
        assert!(!report.ok);
    }

    #[test]
    fn report_is_reproducible() {
        let cfg = GenConfig {
            counts: SuiteCounts {
                univalence_completeness: 6,
                two_route_univalence: 6,
                pullback_univalence: 0,
                bm_levelwise: 0,
                completion_dk: 0,
                dk_levelwise: 0,
                homotopy_invariance: 0,
            },
            ..GenConfig::default()
        };
        let mut r1 = run_theorem_suite(&cfg);
        let mut r2 = run_theorem_suite(&cfg);
        r1.wall_clock_ms = 0;
        r2.wall_clock_ms = 0;
        assert_eq!(
            serde_json::to_string(&r1).unwrap(),
            serde_json::to_string(&r2).unwrap()
        );
    }
}
