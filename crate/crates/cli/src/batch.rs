//! Batch conversion driver.
//!
//! Walks an input directory (campaign subdirectories or loose files),
//! converts every road, and writes per-road artifacts plus a campaign
//! summary:
//!
//! ```text
//! <out>/<campaign>/<road_id>.spline.json
//! <out>/<campaign>/<road_id>.report.json
//! <out>/<campaign>/<road_id>.trace.csv      (with --resim)
//! <out>/<campaign>/<road_id>.svg
//! <out>/summary.csv
//! ```
//!
//! Conversion is road-parallel; every output byte is a pure function of the
//! inputs and configuration, so re-runs reproduce identical trees.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use roadspline::converter::{convert_roads, SplineConfig, SplineResult};
use roadspline::fidelity::{self, Pairing};
use roadspline::ingest::{self, SourceFormat};
use roadspline::resim::{simulate_with_trace, VehicleConfig};
use roadspline::validate::{check_validity, ValidityConfig};

use crate::out::{
    csv_field, to_json_file, trace_csv, FidelityJson, ReportJson, SimJson, SplineJson,
    ValidityJson, WarningsJson,
};
use crate::svg::{render_svg, Overlays};

/// Campaign name used for files that sit directly in the input directory.
pub const DEFAULT_CAMPAIGN: &str = "default";

#[derive(Debug, Clone)]
pub struct BatchConfig {
    pub spline: SplineConfig,
    pub json_pointer: String,
    pub pairing: Pairing,
    /// Include a validity report for every converted road.
    pub validate: bool,
    /// Re-drive every converted road and record the outcome and trace.
    pub resim: bool,
    pub vehicle: VehicleConfig,
    pub validity: ValidityConfig,
    /// Worker threads; `None` uses the rayon default.
    pub jobs: Option<usize>,
    pub strict: bool,
}

impl Default for BatchConfig {
    fn default() -> Self {
        Self {
            spline: SplineConfig::default(),
            json_pointer: ingest::DEFAULT_JSON_POINTER.to_string(),
            pairing: Pairing::Nearest,
            validate: false,
            resim: false,
            vehicle: VehicleConfig::default(),
            validity: ValidityConfig::default(),
            jobs: None,
            strict: false,
        }
    }
}

/// Per-campaign rollup, mirroring the pass/fail table layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignSummary {
    pub campaign_id: String,
    pub total: usize,
    pub converted: usize,
    pub conversion_errors: usize,
    pub valid: usize,
    pub sim_pass: usize,
    pub sim_fail: usize,
    /// 100 * sim_pass / (sim_pass + sim_fail); 0 when nothing was simulated.
    pub pass_percent: f64,
    /// Summed per-road processing time in seconds.
    pub wall_time: f64,
}

#[derive(Debug)]
pub struct BatchOutcome {
    pub summaries: Vec<CampaignSummary>,
    pub total_roads: usize,
    pub conversion_errors: usize,
}

struct Task {
    campaign: String,
    road_id_base: String,
    path: PathBuf,
}

/// One road's outcome, for summary aggregation.
struct RoadRecord {
    campaign: String,
    road_id: String,
    converted: bool,
    valid: Option<bool>,
    sim_passed: Option<bool>,
    seconds: f64,
}

/// Convert every scenario under `input` into `output`.
pub fn convert_batch(input: &Path, output: &Path, cfg: &BatchConfig) -> Result<BatchOutcome> {
    let tasks = discover_tasks(input)?;
    if tasks.is_empty() {
        eprintln!(
            "warning: no scenario files (.xodr/.xml/.json) found under {}",
            input.display()
        );
    }

    std::fs::create_dir_all(output)
        .with_context(|| format!("creating output directory {}", output.display()))?;
    let campaigns: BTreeSet<&str> = tasks.iter().map(|t| t.campaign.as_str()).collect();
    for campaign in &campaigns {
        std::fs::create_dir_all(output.join(campaign))?;
    }

    let run = || -> Result<Vec<RoadRecord>> {
        tasks
            .par_iter()
            .map(|task| process_task(task, output, cfg))
            .try_reduce(Vec::new, |mut acc, mut records| {
                acc.append(&mut records);
                Ok(acc)
            })
    };
    let mut records = match cfg.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .context("building worker pool")?
            .install(run),
        None => run(),
    }?;

    records.sort_by(|a, b| (&a.campaign, &a.road_id).cmp(&(&b.campaign, &b.road_id)));

    let summaries = summarize(&records);
    write_summary_csv(&output.join("summary.csv"), &summaries)?;

    let conversion_errors = records.iter().filter(|r| !r.converted).count();
    Ok(BatchOutcome {
        summaries,
        total_roads: records.len(),
        conversion_errors,
    })
}

fn is_scenario_file(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some(ext) if ["xodr", "xml", "json"].iter().any(|k| ext.eq_ignore_ascii_case(k))
    )
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    entries.sort();
    Ok(entries)
}

fn discover_tasks(input: &Path) -> Result<Vec<Task>> {
    let mut raw: Vec<(String, PathBuf)> = Vec::new();
    if input.is_file() {
        raw.push((DEFAULT_CAMPAIGN.to_string(), input.to_path_buf()));
    } else if input.is_dir() {
        for entry in sorted_entries(input)? {
            if entry.is_dir() {
                let campaign = entry
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_else(|| DEFAULT_CAMPAIGN.to_string());
                collect_files(&entry, &campaign, &mut raw)?;
            } else if is_scenario_file(&entry) {
                raw.push((DEFAULT_CAMPAIGN.to_string(), entry));
            }
        }
    } else {
        bail!("input {} does not exist", input.display());
    }

    // Unique ids per campaign even when stems collide across extensions.
    let mut used: BTreeSet<(String, String)> = BTreeSet::new();
    let mut tasks = Vec::with_capacity(raw.len());
    for (campaign, path) in raw {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "road".to_string());
        let mut id = stem.clone();
        let mut n = 1;
        while !used.insert((campaign.clone(), id.clone())) {
            n += 1;
            id = format!("{stem}_{n}");
        }
        tasks.push(Task {
            campaign,
            road_id_base: id,
            path,
        });
    }
    Ok(tasks)
}

fn collect_files(dir: &Path, campaign: &str, raw: &mut Vec<(String, PathBuf)>) -> Result<()> {
    for entry in sorted_entries(dir)? {
        if entry.is_dir() {
            collect_files(&entry, campaign, raw)?;
        } else if is_scenario_file(&entry) {
            raw.push((campaign.to_string(), entry));
        }
    }
    Ok(())
}

/// Road id for a scenario file: `/road_id` field for JSON when present,
/// otherwise the (uniqued) file stem.
fn json_road_id(path: &Path) -> Option<String> {
    if path.extension().and_then(|e| e.to_str())?.eq_ignore_ascii_case("json") {
        let bytes = std::fs::read(path).ok()?;
        let value: serde_json::Value = serde_json::from_slice(&bytes).ok()?;
        value.pointer("/road_id")?.as_str().map(|s| s.to_string())
    } else {
        None
    }
}

fn process_task(task: &Task, output: &Path, cfg: &BatchConfig) -> Result<Vec<RoadRecord>> {
    let started = Instant::now();
    let source = task.path.display().to_string();
    let base_id = json_road_id(&task.path).unwrap_or_else(|| task.road_id_base.clone());
    let dir = output.join(&task.campaign);

    let text = match ingest::load_scenario(&task.path, SourceFormat::Auto, &cfg.json_pointer) {
        Ok(text) => text,
        Err(err) => {
            return Ok(vec![write_error_record(
                &dir,
                task,
                &base_id,
                &source,
                &format!("load: {err}"),
                started,
            )?]);
        }
    };
    let parsed = match ingest::parse_xodr(&text, &base_id) {
        Ok(parsed) => parsed,
        Err(err) => {
            return Ok(vec![write_error_record(
                &dir,
                task,
                &base_id,
                &source,
                &format!("parse: {err}"),
                started,
            )?]);
        }
    };

    let multi_road = parsed.network.roads.len() > 1;
    let conversions = convert_roads(&parsed.network, &cfg.spline);
    let mut records = Vec::with_capacity(conversions.len());
    for conversion in conversions {
        let road_id = if multi_road {
            format!("{base_id}_{}", conversion.road_id)
        } else {
            base_id.clone()
        };
        let mut warnings = WarningsJson {
            parse_skipped_elements: parsed.warnings.skipped_elements,
            truncated_pairs: conversion.warnings.truncated_pairs,
            clamped_widths: conversion.warnings.clamped_widths,
            deduped_points: conversion.warnings.deduped_points,
            continuity_breaks: conversion.warnings.continuity_breaks,
        };

        let record = match conversion.outcome {
            Ok(mut result) => {
                result.source_road_id = road_id.clone();
                write_road_outputs(&dir, &task.campaign, &road_id, &source, result, cfg, &mut warnings, started)?
            }
            Err(err) => {
                let report = ReportJson {
                    road_id: road_id.clone(),
                    campaign: task.campaign.clone(),
                    source: source.clone(),
                    converted: false,
                    error: Some(format!("convert: {err}")),
                    fidelity: None,
                    validity: None,
                    sim: None,
                    warnings,
                };
                std::fs::write(
                    dir.join(format!("{road_id}.report.json")),
                    to_json_file(&report),
                )?;
                RoadRecord {
                    campaign: task.campaign.clone(),
                    road_id,
                    converted: false,
                    valid: None,
                    sim_passed: None,
                    seconds: started.elapsed().as_secs_f64(),
                }
            }
        };
        records.push(record);
    }
    Ok(records)
}

fn write_error_record(
    dir: &Path,
    task: &Task,
    road_id: &str,
    source: &str,
    error: &str,
    started: Instant,
) -> Result<RoadRecord> {
    let report = ReportJson {
        road_id: road_id.to_string(),
        campaign: task.campaign.clone(),
        source: source.to_string(),
        converted: false,
        error: Some(error.to_string()),
        fidelity: None,
        validity: None,
        sim: None,
        warnings: WarningsJson::default(),
    };
    std::fs::write(dir.join(format!("{road_id}.report.json")), to_json_file(&report))?;
    Ok(RoadRecord {
        campaign: task.campaign.clone(),
        road_id: road_id.to_string(),
        converted: false,
        valid: None,
        sim_passed: None,
        seconds: started.elapsed().as_secs_f64(),
    })
}

#[allow(clippy::too_many_arguments)]
fn write_road_outputs(
    dir: &Path,
    campaign: &str,
    road_id: &str,
    source: &str,
    result: SplineResult,
    cfg: &BatchConfig,
    warnings: &mut WarningsJson,
    started: Instant,
) -> Result<RoadRecord> {
    let fidelity_report = fidelity::evaluate(&result, cfg.pairing)
        .map(|r| FidelityJson::from_report(&r))
        .ok();

    let want_validity = cfg.validate || cfg.resim;
    let validity = if want_validity {
        check_validity(&result, &cfg.validity)
            .map(|r| ValidityJson::from_report(&r))
            .ok()
    } else {
        None
    };

    let (sim, trace) = if cfg.resim {
        let (outcome, trace) = simulate_with_trace(&result, &cfg.vehicle);
        (Some(outcome), Some(trace))
    } else {
        (None, None)
    };

    let overlays = Overlays {
        oob_position: sim.as_ref().and_then(|s| s.oob_position),
    };
    std::fs::write(
        dir.join(format!("{road_id}.spline.json")),
        to_json_file(&SplineJson::from_result(&result)),
    )?;
    if let Ok(svg) = render_svg(&result, &overlays) {
        std::fs::write(dir.join(format!("{road_id}.svg")), svg)?;
    }
    if let Some(trace) = &trace {
        std::fs::write(dir.join(format!("{road_id}.trace.csv")), trace_csv(trace))?;
    }

    let report = ReportJson {
        road_id: road_id.to_string(),
        campaign: campaign.to_string(),
        source: source.to_string(),
        converted: true,
        error: None,
        fidelity: fidelity_report,
        validity,
        sim: sim.as_ref().map(SimJson::from_outcome),
        warnings: std::mem::take(warnings),
    };
    let valid = report.validity.as_ref().map(|v| v.valid);
    let sim_passed = report.sim.as_ref().map(|s| s.passed);
    std::fs::write(dir.join(format!("{road_id}.report.json")), to_json_file(&report))?;

    Ok(RoadRecord {
        campaign: campaign.to_string(),
        road_id: road_id.to_string(),
        converted: true,
        valid,
        sim_passed,
        seconds: started.elapsed().as_secs_f64(),
    })
}

fn summarize(records: &[RoadRecord]) -> Vec<CampaignSummary> {
    let campaigns: BTreeSet<&String> = records.iter().map(|r| &r.campaign).collect();
    campaigns
        .into_iter()
        .map(|campaign| {
            let in_campaign: Vec<&RoadRecord> =
                records.iter().filter(|r| &r.campaign == campaign).collect();
            let total = in_campaign.len();
            let converted = in_campaign.iter().filter(|r| r.converted).count();
            let valid = in_campaign
                .iter()
                .filter(|r| r.valid == Some(true))
                .count();
            let sim_pass = in_campaign
                .iter()
                .filter(|r| r.sim_passed == Some(true))
                .count();
            let sim_fail = in_campaign
                .iter()
                .filter(|r| r.sim_passed == Some(false))
                .count();
            let simulated = sim_pass + sim_fail;
            let summary = CampaignSummary {
                campaign_id: campaign.clone(),
                total,
                converted,
                conversion_errors: total - converted,
                valid,
                sim_pass,
                sim_fail,
                pass_percent: if simulated > 0 {
                    100.0 * sim_pass as f64 / simulated as f64
                } else {
                    0.0
                },
                wall_time: in_campaign.iter().map(|r| r.seconds).sum(),
            };
            // Arithmetic invariants hold on every summary we emit.
            assert_eq!(summary.converted + summary.conversion_errors, summary.total);
            assert!(summary.sim_pass + summary.sim_fail <= summary.total);
            assert!((0.0..=100.0).contains(&summary.pass_percent));
            summary
        })
        .collect()
}

/// Hours/minutes rendering of a duration in seconds, `h/m`.
fn hours_minutes(seconds: f64) -> String {
    let minutes_total = (seconds / 60.0).floor() as u64;
    format!("{}/{}", minutes_total / 60, minutes_total % 60)
}

fn write_summary_csv(path: &Path, summaries: &[CampaignSummary]) -> Result<()> {
    let mut out = String::from("campaign,pass,fail,total,exe_time,pass_percent\n");
    for s in summaries {
        out.push_str(&format!(
            "{},{},{},{},{},{:.2}\n",
            csv_field(&s.campaign_id),
            s.sim_pass,
            s.sim_fail,
            s.total,
            hours_minutes(s.wall_time),
            s.pass_percent
        ));
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
