//! Text rendering of reports. Nothing here computes a metric; every number is
//! read from a report produced by the library.

use std::fmt::Write as _;

use clap::ValueEnum;
use ospa_pose::dataio::DatasetStats;
use ospa_pose::oracle::OracleReport;
use ospa_pose::report::{PoseRow, TrackRow};
use ospa_pose::{PoseEvalReport, TrackEvalReport, Visibility};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Markdown,
    #[value(name = "json-report", alias = "json")]
    JsonReport,
}

fn f3(v: f64) -> String {
    format!("{v:.3}")
}

fn markdown_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&format!("| {} |\n", header.join(" | ")));
    out.push_str(&format!("|{}\n", "---|".repeat(header.len())));
    for row in rows {
        out.push_str(&format!("| {} |\n", row.join(" | ")));
    }
    out
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = format!("{}\n", header.join(","));
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| csv_cell(c)).collect();
        out.push_str(&format!("{}\n", cells.join(",")));
    }
    out
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Full-precision JSON with the method label attached.
fn json_with_method(report: Value, method: &str) -> String {
    let mut map = serde_json::Map::new();
    map.insert("method".into(), Value::String(method.to_string()));
    if let Value::Object(fields) = report {
        map.extend(fields);
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(map)).expect("serializable report");
    text.push('\n');
    text
}

fn pose_rows(report: &PoseEvalReport, per_scene: bool) -> Vec<&PoseRow> {
    if per_scene {
        report.scenes.iter().collect()
    } else {
        vec![&report.overall]
    }
}

pub fn pose_report(
    report: &PoseEvalReport,
    method: &str,
    format: Format,
    per_scene: bool,
) -> String {
    if format == Format::JsonReport {
        return json_with_method(
            serde_json::to_value(report).expect("serializable report"),
            method,
        );
    }
    let with_map = report.overall.coco_map.is_some();
    let rows = pose_rows(report, per_scene);

    let mut header = vec!["Method", "Scene", "O_pose", "Loc", "Card", "AP", "AR"];
    if with_map {
        header.push("mAP");
    }
    let main: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut row = vec![
                method.to_string(),
                r.scene.clone(),
                f3(r.ospa),
                f3(r.loc),
                f3(r.card),
                f3(r.ap),
                f3(r.ar),
            ];
            if let Some(m) = r.coco_map {
                row.push(f3(m));
            }
            row
        })
        .collect();

    let vis_header = [
        "Method",
        "Scene",
        "Visibility",
        "Loc sum",
        "Per frame",
        "Per pose",
        "Per keypoint",
        "GT keypoints",
    ];
    let mut vis = Vec::new();
    for r in &rows {
        for level in Visibility::REPORT_ORDER {
            let v = r.visibility.get(level);
            vis.push(vec![
                method.to_string(),
                r.scene.clone(),
                level.short().to_string(),
                f3(v.sum),
                f3(v.per_frame),
                f3(v.per_pose),
                f3(v.per_keypoint),
                v.gt_keypoints.to_string(),
            ]);
        }
    }

    match format {
        Format::Markdown => format!(
            "{}\nLocalization by visibility\n\n{}",
            markdown_table(&header, &main),
            markdown_table(&vis_header, &vis)
        ),
        Format::Csv => {
            // One wide row per scene keeps the file a single table.
            let mut header: Vec<String> = header.iter().map(|h| h.to_lowercase()).collect();
            for level in Visibility::REPORT_ORDER {
                for col in [
                    "sum",
                    "per_frame",
                    "per_pose",
                    "per_keypoint",
                    "gt_keypoints",
                ] {
                    header.push(format!("loc_{}_{col}", level.short().to_lowercase()));
                }
            }
            let wide: Vec<Vec<String>> = main
                .into_iter()
                .zip(vis.chunks(3))
                .map(|(mut row, levels)| {
                    for l in levels {
                        row.extend_from_slice(&l[3..]);
                    }
                    row
                })
                .collect();
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            csv_table(&header, &wide)
        }
        Format::JsonReport => unreachable!(),
    }
}

fn track_row_cells(method: &str, r: &TrackRow) -> Vec<String> {
    let mut row = vec![
        method.to_string(),
        r.scene.clone(),
        f3(r.clear.mota),
        f3(r.clear.idf1),
        r.clear.idsw.to_string(),
        f3(r.ospa2.total),
        f3(r.ospa2.card),
        f3(r.ospa2.loc),
    ];
    for level in Visibility::REPORT_ORDER {
        row.push(f3(*r.ospa2.by_visibility.get(level)));
    }
    row
}

pub fn track_report(
    report: &TrackEvalReport,
    method: &str,
    format: Format,
    per_scene: bool,
) -> String {
    if format == Format::JsonReport {
        return json_with_method(
            serde_json::to_value(report).expect("serializable report"),
            method,
        );
    }
    let rows: Vec<&TrackRow> = if per_scene {
        report.scenes.iter().collect()
    } else {
        vec![&report.overall]
    };
    match format {
        Format::Markdown => {
            let header = [
                "Method", "Scene", "MOTA", "IDF1", "IDSW", "O2_pose", "Card", "Loc", "V", "O", "I",
            ];
            let cells: Vec<Vec<String>> = rows.iter().map(|r| track_row_cells(method, r)).collect();
            markdown_table(&header, &cells)
        }
        Format::Csv => {
            let header = [
                "method",
                "scene",
                "mota",
                "idf1",
                "idsw",
                "o2_pose",
                "card",
                "loc",
                "v",
                "o",
                "i",
                "idp",
                "idr",
                "fp",
                "fn",
                "gt",
                "pred",
                "gt_tracks",
                "pred_tracks",
            ];
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut row = track_row_cells(method, r);
                    row.extend([
                        f3(r.clear.idp),
                        f3(r.clear.idr),
                        r.clear.fp.to_string(),
                        r.clear.fn_count.to_string(),
                        r.clear.gt_count.to_string(),
                        r.clear.pred_count.to_string(),
                        r.gt_tracks.to_string(),
                        r.pred_tracks.to_string(),
                    ]);
                    row
                })
                .collect();
            csv_table(&header, &cells)
        }
        Format::JsonReport => unreachable!(),
    }
}

pub fn stats_report(stats: &DatasetStats, format: Format) -> String {
    let s = &stats.summary;
    let summary = [
        ("scenes", s.scene_count.to_string()),
        ("frames", s.frame_count.to_string()),
        ("tracks", s.track_count.to_string()),
        ("mean_track_length", f3(s.mean_track_length)),
        ("max_track_length", s.max_track_length.to_string()),
        ("poses", s.total_poses.to_string()),
        ("keypoints", s.total_keypoints.to_string()),
    ];
    let mut hist: Vec<Vec<String>> = Vec::new();
    let mut push = |table: &str, key: String, value: usize| {
        hist.push(vec![table.to_string(), key, value.to_string()])
    };
    for (k, v) in &stats.track_length_histogram {
        push("track_length", k.to_string(), *v);
    }
    for (k, v) in &stats.poses_per_frame_histogram {
        push("poses_per_frame", k.to_string(), *v);
    }
    for (k, v) in &stats.visible_keypoints_histogram {
        push("visible_keypoints", k.to_string(), *v);
    }
    for (k, v) in &stats.bbox_scale_histogram {
        push("bbox_scale", k.to_string(), *v);
    }
    for (scene, counts) in &stats.per_scene_visibility {
        for level in Visibility::REPORT_ORDER {
            push(
                "visibility",
                format!("{scene}/{}", level.short()),
                *counts.get(level),
            );
        }
    }
    match format {
        Format::JsonReport => {
            let mut text = serde_json::to_string_pretty(stats).expect("serializable stats");
            text.push('\n');
            text
        }
        Format::Csv => {
            let mut rows = hist;
            rows.extend(
                summary
                    .iter()
                    .map(|(k, v)| vec!["summary".to_string(), k.to_string(), v.clone()]),
            );
            csv_table(&["table", "key", "value"], &rows)
        }
        Format::Markdown => {
            let rows: Vec<Vec<String>> = summary
                .iter()
                .map(|(k, v)| vec![k.to_string(), v.clone()])
                .collect();
            format!(
                "{}\n{}",
                markdown_table(&["Summary", "Value"], &rows),
                markdown_table(&["Histogram", "Bin", "Count"], &hist)
            )
        }
    }
}

pub fn oracle_report(reports: &[OracleReport], tolerance: f64, format: Format) -> String {
    let status = |r: &OracleReport| if r.passed(tolerance) { "pass" } else { "FAIL" };
    match format {
        Format::JsonReport => {
            let items: Vec<Value> = reports
                .iter()
                .map(|r| {
                    let mut v = serde_json::to_value(r).expect("serializable");
                    v["passed"] = Value::Bool(r.passed(tolerance));
                    v
                })
                .collect();
            let mut text = serde_json::to_string_pretty(&serde_json::json!({
                "tolerance": tolerance,
                "suites": items,
            }))
            .expect("serializable");
            text.push('\n');
            text
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    vec![
                        r.suite.to_string(),
                        r.trials.to_string(),
                        format!("{:e}", r.max_deviation),
                        status(r).into(),
                    ]
                })
                .collect();
            csv_table(&["suite", "trials", "max_deviation", "status"], &rows)
        }
        Format::Markdown => {
            let mut out = String::new();
            for r in reports {
                let _ = writeln!(
                    out,
                    "{:<12} trials={:<5} max deviation {:e} ({})",
                    r.suite,
                    r.trials,
                    r.max_deviation,
                    status(r)
                );
            }
            out
        }
    }
}
