//! Picks a construction for `(k, v)` and runs it.
//!
//! Routes are tried cheapest first: cyclic development, built-in MOLS,
//! special designs, the design database, then a seeded search for small `v`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::cyclic::{cyclic_pdp, factorization_condition, Factorization};
use crate::database::DesignDatabase;
use crate::design::Schedule;
use crate::gf::prime_power;
use crate::hosts::assign_hosts;
use crate::latin::{builtin_mols, pdp_via_mols};
use crate::search::{search_pdp, SearchConfig, SearchMode, SearchOutcome, SearchStats};
use crate::special::{buratti_pdp_5_30, pdp_4_24};
use crate::verify::{feasibility_check, verify, Feasibility, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Cyclic,
    Mols,
    Special,
    Database,
    Search,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Cyclic => "cyclic",
            Route::Mols => "mols",
            Route::Special => "special",
            Route::Database => "database",
            Route::Search => "search",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RouteAttempt {
    pub route: Route,
    pub accepted: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlanDecision {
    pub k: usize,
    pub v: usize,
    pub route: Route,
    pub rationale: String,
    /// Every route considered, in order, ending with the accepted one.
    pub chain: Vec<RouteAttempt>,
}

impl fmt::Display for PlanDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "({}, {}) -> {}: {}",
            self.k, self.v, self.route, self.rationale
        )?;
        for a in &self.chain {
            let mark = if a.accepted { "+" } else { "-" };
            writeln!(f, "  {mark} {}: {}", a.route, a.note)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("no design with k = {k}, v = {v}: {reason}")]
    Infeasible { k: usize, v: usize, reason: String },
    #[error("no construction available for k = {k}, v = {v}")]
    NoRoute {
        k: usize,
        v: usize,
        chain: Vec<RouteAttempt>,
    },
    #[error("search budget exhausted for k = {k}, v = {v} after {} nodes", .stats.nodes)]
    BudgetExceeded { k: usize, v: usize, stats: SearchStats },
    #[error("route {route} produced an invalid schedule: {detail}")]
    Invalid { route: Route, detail: String },
}

#[derive(Debug, Clone)]
pub struct PlanOptions {
    pub database: Option<DesignDatabase>,
    /// Largest `v` handed to the search route.
    pub search_max_v: usize,
    pub search_budget: u64,
    pub seed: u64,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            database: None,
            search_max_v: 30,
            search_budget: 2_000_000,
            seed: 0,
        }
    }
}

fn special_for(k: usize, v: usize) -> Option<&'static str> {
    match (k, v) {
        (5, 30) => Some("base block {0,1,8,12,14} developed mod 30"),
        (4, 24) => Some("four classes of the embedded resolvable 4-GDD of type 3^8"),
        (3, 12) => Some("the classic 12-couple schedule"),
        _ => None,
    }
}

/// Chooses the first applicable route. Deterministic in its inputs.
pub fn plan(k: usize, v: usize, options: &PlanOptions) -> Result<PlanDecision, PlanError> {
    if let Feasibility::Infeasible(reason) = feasibility_check(k, v) {
        return Err(PlanError::Infeasible { k, v, reason });
    }
    let w = v / k;
    let mut chain = Vec::new();
    let mut decide = |route: Route, ok: Option<String>, rejected: String| -> Option<PlanDecision> {
        let accepted = ok.is_some();
        chain.push(RouteAttempt {
            route,
            accepted,
            note: ok.clone().unwrap_or(rejected),
        });
        ok.map(|rationale| PlanDecision {
            k,
            v,
            route,
            rationale,
            chain: chain.clone(),
        })
    };

    let cyclic = match factorization_condition(k, w) {
        Factorization::Holds => Ok(format!(
            "w = {w} has no factorization into two factors in 2..={}",
            k - 1
        )),
        Factorization::Fails { s, t } => Err(format!("w = {w} = {s} * {t}")),
    };
    if let Some(d) = decide(
        Route::Cyclic,
        cyclic.clone().ok(),
        cyclic.err().unwrap_or_default(),
    ) {
        return Ok(d);
    }

    let mols = if k > w {
        Err(format!("need {k} transversals but order is {w}"))
    } else if builtin_mols(k - 1, w).is_some() {
        let source = if w == 4 && k == 3 {
            "the classic orthogonal pair of order 4".to_string()
        } else {
            format!("{} MOLS of order {w} from GF({w})", k - 1)
        };
        Ok(source)
    } else if prime_power(w as u32).is_none() {
        Err(format!("{w} is not a prime power"))
    } else {
        Err(format!("GF({w}) gives only {} MOLS", w - 1))
    };
    if let Some(d) = decide(Route::Mols, mols.clone().ok(), mols.err().unwrap_or_default()) {
        return Ok(d);
    }

    let special = special_for(k, v).map(str::to_string);
    if let Some(d) = decide(
        Route::Special,
        special,
        "no special design for these parameters".into(),
    ) {
        return Ok(d);
    }

    let db = match &options.database {
        None => Err("no database supplied".to_string()),
        Some(db) => match db.construct(k, v) {
            Some((name, _)) => Ok(format!("entry `{name}`")),
            None => Err("no matching database entry".to_string()),
        },
    };
    if let Some(d) = decide(Route::Database, db.clone().ok(), db.err().unwrap_or_default()) {
        return Ok(d);
    }

    let search = (v <= options.search_max_v).then(|| format!("v = {v} is small enough to search"));
    if let Some(d) = decide(
        Route::Search,
        search,
        format!("v = {v} exceeds the search bound {}", options.search_max_v),
    ) {
        return Ok(d);
    }

    Err(PlanError::NoRoute { k, v, chain })
}

#[derive(Debug, Clone, Default)]
pub struct GenerateOptions {
    pub plan: PlanOptions,
    /// Discard the construction's hosts and reassign them by matching.
    pub rehost: bool,
}

/// Plans, builds and verifies a design.
pub fn generate(
    k: usize,
    v: usize,
    options: &GenerateOptions,
) -> Result<(PlanDecision, Schedule), PlanError> {
    let decision = plan(k, v, &options.plan)?;
    let w = v / k;
    let invalid = |route: Route, detail: String| PlanError::Invalid { route, detail };
    let mut schedule = match decision.route {
        Route::Cyclic => cyclic_pdp(k, w).map_err(|e| invalid(Route::Cyclic, e.to_string()))?,
        Route::Mols => pdp_via_mols(k, w).map_err(|e| invalid(Route::Mols, e.to_string()))?,
        Route::Special => match (k, v) {
            (5, 30) => buratti_pdp_5_30(),
            (4, 24) => pdp_4_24().map_err(|e| invalid(Route::Special, e.to_string()))?,
            (3, 12) => crate::special::classic_pdp_12(),
            _ => unreachable!("special route only accepts tabulated parameters"),
        },
        Route::Database => {
            let db = options
                .plan
                .database
                .as_ref()
                .expect("database route implies a database");
            db.construct(k, v).expect("planner checked the entry").1
        }
        Route::Search => {
            let config = SearchConfig {
                mode: SearchMode::Find,
                budget: options.plan.search_budget,
                seed: options.plan.seed,
                ..SearchConfig::default()
            };
            let result = search_pdp(k, v, &config).map_err(|e| invalid(Route::Search, e.to_string()))?;
            match result.outcome {
                SearchOutcome::Found(s) => s,
                SearchOutcome::Exhausted => {
                    return Err(PlanError::Infeasible {
                        k,
                        v,
                        reason: "exhaustive search found no design".into(),
                    })
                }
                SearchOutcome::BudgetExceeded => {
                    return Err(PlanError::BudgetExceeded {
                        k,
                        v,
                        stats: result.stats,
                    })
                }
            }
        }
    };
    if options.rehost {
        schedule = assign_hosts(&schedule.without_hosts().classes)
            .map_err(|e| invalid(decision.route, e.to_string()))?;
    }
    let report = verify(&schedule).map_err(|e| invalid(decision.route, e.to_string()))?;
    if !report.is_valid() {
        let first = report
            .violations
            .first()
            .map(Violation::to_string)
            .unwrap_or_default();
        return Err(invalid(decision.route, first));
    }
    Ok((decision, schedule))
}
