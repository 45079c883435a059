//! One function per subcommand. Each reads a resolved config, writes its
//! CSV and JSON artifacts into the output directory and prints the JSON
//! summary.

use std::fs;
use std::path::Path;

use depthlab::admissibility::{positivity_decision, Assumptions};
use depthlab::analytic::{gaussian_sequence_depth, rademacher_classify, stable_depth, weighted_series};
use depthlab::bounds::{markov_zero_certificate, projection_lower_bound, pz_point_bound, tail_split_lower_bound};
use depthlab::empirical::{consistency_gap, empirical_depth_experiment, DirectionFamily};
use depthlab::models::Family;
use depthlab::simplicial::{simplicial_failure_experiment, SimplicialConfig};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{CommandName, ExperimentConfig};
use crate::error::CliError;
use crate::names::{parse_model, parse_point};
use crate::plotdata;

fn to_value(v: impl Serialize) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Config(format!("cannot serialize output: {e}")))
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    fs::write(dir.join(name), text)?;
    Ok(())
}

fn write_json(dir: &Path, name: &str, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    text.push('\n');
    write_text(dir, name, &text)?;
    print!("{text}");
    Ok(())
}

/// Either the serialized value or the error message, for optional bounds
/// that may not apply to the chosen model.
fn value_or_error<T: Serialize>(r: depthlab::Result<T>) -> Result<Value, CliError> {
    match r {
        Ok(v) => to_value(v),
        Err(e) => Ok(json!({ "error": e.to_string() })),
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let dir = cfg.out_dir();
    fs::create_dir_all(dir)?;
    write_text(dir, crate::config::RESOLVED_CONFIG, &cfg.to_toml()?)?;
    match cfg.command.expect("resolved config has a command") {
        CommandName::Analytic => analytic(cfg, dir),
        CommandName::Bounds => bounds(cfg, dir),
        CommandName::Admissible => admissible(cfg, dir),
        CommandName::Empirical => empirical(cfg, dir),
        CommandName::Simplicial => simplicial(cfg, dir),
        CommandName::Plotdata => plotdata::run(cfg, dir),
    }
}

fn problem(cfg: &ExperimentConfig) -> Result<(String, String), CliError> {
    let p = cfg.problem.as_ref().expect("resolved config has a problem");
    Ok((p.model.clone().expect("resolved"), p.point.clone().expect("resolved")))
}

fn analytic(cfg: &ExperimentConfig, dir: &Path) -> Result<(), CliError> {
    let (model_name, point_name) = problem(cfg)?;
    let model = parse_model(&model_name)?;
    let a = parse_point(&point_name)?;
    let series = weighted_series(&a, &model)?;
    let report = match model.common_family() {
        Some(Family::Gaussian) => to_value(gaussian_sequence_depth(&a, &model)?)?,
        Some(Family::SymmetricStable { .. }) => to_value(stable_depth(&a, &model)?)?,
        Some(Family::Rademacher) => to_value(rademacher_classify(&a)?)?,
        _ if series.is_divergent() => json!({
            "value": "ZERO-CERTIFIED",
            "certificate": { "kind": "divergence", "reason": "weighted series diverges" },
        }),
        _ => json!({
            "value": "UNDECIDED",
            "certificate": { "kind": "undecided", "reason": "no closed form for this model" },
        }),
    };
    let out = json!({
        "kind": "analytic",
        "model": model_name,
        "point": point_name,
        "weighted_series": to_value(&series)?,
        "report": report,
    });
    write_json(dir, "analytic.json", &out)
}

fn bounds(cfg: &ExperimentConfig, dir: &Path) -> Result<(), CliError> {
    let (model_name, point_name) = problem(cfg)?;
    let model = parse_model(&model_name)?;
    let a = parse_point(&point_name)?;
    let s = cfg.bounds.as_ref().expect("resolved");
    let depths = s.depths.clone().expect("resolved");
    let cert = markov_zero_certificate(&a, &model, &depths)?;
    write_text(dir, "markov.csv", &cert.to_csv()?)?;
    let tail_split = match model.common_family() {
        Some(Family::Rademacher) => value_or_error(tail_split_lower_bound(&a))?,
        _ => Value::Null,
    };
    let projection = match s.proj_d {
        Some(d) => value_or_error(projection_lower_bound(&a, d))?,
        None => Value::Null,
    };
    let out = json!({
        "kind": "bounds",
        "model": model_name,
        "point": point_name,
        "certificate": to_value(&cert)?,
        "paley_zygmund": value_or_error(pz_point_bound(&a, &model))?,
        "tail_split": tail_split,
        "projection": projection,
    });
    write_json(dir, "bounds.json", &out)
}

fn admissible(cfg: &ExperimentConfig, dir: &Path) -> Result<(), CliError> {
    let (model_name, point_name) = problem(cfg)?;
    let model = parse_model(&model_name)?;
    let a = parse_point(&point_name)?;
    let name = cfg.admissible.as_ref().and_then(|s| s.assumptions.clone()).expect("resolved");
    let assumptions = match name.to_ascii_uppercase().as_str() {
        "AI_AII" => Assumptions::MomentsAndDensity,
        "AIII" => Assumptions::FisherDensity,
        other => return Err(CliError::Config(format!("unknown assumptions {other:?}; expected AI_AII or AIII"))),
    };
    let decision = positivity_decision(&a, &model, assumptions)?;
    let out = json!({
        "kind": "admissible",
        "model": model_name,
        "point": point_name,
        "assumptions": assumptions,
        "decision": to_value(&decision)?,
    });
    write_json(dir, "admissible.json", &out)
}

fn empirical(cfg: &ExperimentConfig, dir: &Path) -> Result<(), CliError> {
    let (model_name, point_name) = problem(cfg)?;
    let model = parse_model(&model_name)?;
    let a = parse_point(&point_name)?;
    let s = cfg.empirical.as_ref().expect("resolved");
    let seed = cfg.seed.expect("resolved");
    let (n, seeds) = (s.n.expect("resolved"), s.seeds.expect("resolved"));
    let family = match s.family.as_deref().expect("resolved") {
        "coordinates" => DirectionFamily::Coordinates { k: s.k.expect("resolved") },
        "random-sparse" => DirectionFamily::RandomSparse {
            count: s.count.expect("resolved"),
            support_size: s.support_size.expect("resolved"),
            max_index: s.k.expect("resolved"),
            seed,
        },
        "markov" => DirectionFamily::MarkovWitnesses {
            depths: s.depths.clone().expect("resolved"),
        },
        other => return Err(CliError::Config(format!("unknown family {other:?}"))),
    };
    let result = empirical_depth_experiment(&model, &a, n, &family, seeds, seed)?;
    write_text(dir, "empirical.csv", &result.to_csv()?)?;
    if let Some(grid) = &s.n_grid {
        let table = consistency_gap(&a, &model, &family, grid, seeds, seed)?;
        write_text(dir, "gap.csv", &table.to_csv()?)?;
        let gap = json!({ "kind": "consistency_gap", "model": model_name, "point": point_name, "table": to_value(&table)? });
        let mut text = serde_json::to_string_pretty(&gap).map_err(|e| CliError::Config(e.to_string()))?;
        text.push('\n');
        write_text(dir, "gap.json", &text)?;
    }
    let out = json!({
        "kind": "empirical",
        "model": model_name,
        "point": point_name,
        "family": family.name(),
        "n": n,
        "K": result.records.first().map_or(0, |r| r.k),
        "summary": to_value(&result.summary)?,
    });
    write_json(dir, "empirical.json", &out)
}

fn simplicial(cfg: &ExperimentConfig, dir: &Path) -> Result<(), CliError> {
    let (model_name, point_name) = problem(cfg)?;
    let model = parse_model(&model_name)?;
    let a = parse_point(&point_name)?;
    let s = cfg.simplicial.as_ref().expect("resolved");
    let sc = SimplicialConfig {
        n: s.n.expect("resolved"),
        d: s.d.expect("resolved"),
        k_max: s.kmax.expect("resolved"),
        seeds: s.seeds.expect("resolved"),
        master_seed: cfg.seed.expect("resolved"),
        mc_draws: s.mc_draws.expect("resolved"),
        budget: s.budget.expect("resolved") as u128,
    };
    let result = simplicial_failure_experiment(&model, &a, sc)?;
    write_text(dir, "simplicial.csv", &result.to_csv()?)?;
    let out = json!({
        "kind": "simplicial",
        "model": model_name,
        "point": point_name,
        "config": to_value(sc)?,
        "summary": to_value(&result.summary)?,
    });
    write_json(dir, "simplicial.json", &out)
}
