//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails.
//!
//! The dataset statistics check reads stitched ground-truth annotations from the
//! directory named by `OSPA_POSE_DATASET`; it is skipped when that is unset.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use ospa_pose::assignment::{brute_force_min_cost, CostMatrix};
use ospa_pose::dataio::{
    compute_stats, load_dataset, merge_views, save_annotations, suppress_duplicates,
};
use ospa_pose::oracle::assignment_suite;
use ospa_pose::ospa::distance_matrix;
use ospa_pose::ospa2::track_distance_matrix;
use ospa_pose::{
    evaluate_pose, evaluate_track, oks, ospa2_pose, ospa_pose, synthetic, track_distance,
    AnnotationKind, BBox, CameraLayout, EvalOptions, FrameAnnotations, Keypoint, KeypointSchema,
    OksMode, Pose, SequenceSet, Trajectory, Visibility, VisibilityFilter, NUM_KEYPOINTS,
};
use rand::Rng;

const SEED: u64 = 20240;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

/// OSPA value of a distance matrix by exhaustive assignment.
fn brute_ospa(m: &CostMatrix) -> f64 {
    let n = m.rows().max(m.cols());
    if n == 0 {
        return 0.0;
    }
    let best = brute_force_min_cost(m).expect("small matrix").total_cost;
    (best + (n - m.rows().min(m.cols())) as f64) / n as f64
}

fn assignment_oracle() -> Outcome {
    let start = Instant::now();
    let report = assignment_suite(200, SEED, 7).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    check(
        report.max_deviation < 1e-9,
        format!("max deviation {:e}", report.max_deviation),
    )?;
    check(elapsed < 10.0, format!("took {elapsed:.2} s"))?;
    Ok(format!(
        "200 matrices, max deviation {:e}, {elapsed:.3} s",
        report.max_deviation
    ))
}

fn ospa_oracle() -> Outcome {
    let schema = KeypointSchema::default();
    let mut rng = synthetic::rng(SEED);
    let (mut worst, mut worst_decomp) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let (a, b) = (rng.gen_range(0..=6), rng.gen_range(0..=6));
        let gt = synthetic::random_pose_set(&mut rng, a);
        let pred = synthetic::random_pose_set(&mut rng, b);
        let r = ospa_pose(&gt, &pred, &schema).map_err(|e| e.to_string())?;
        let m = distance_matrix(&gt, &pred, &schema, VisibilityFilter::All)
            .map_err(|e| e.to_string())?;
        worst = worst.max((r.total - brute_ospa(&m)).abs());
        worst_decomp = worst_decomp.max((r.total - (r.loc + r.card)).abs());
    }
    check(worst < 1e-9, format!("max deviation {worst:e}"))?;
    check(
        worst_decomp < 1e-12,
        format!("decomposition off by {worst_decomp:e}"),
    )?;
    Ok(format!(
        "100 pairs, max deviation {worst:e}, decomposition {worst_decomp:e}"
    ))
}

fn two_frame_track(id: u64, frames: [u64; 2], pose: &Pose) -> Trajectory {
    Trajectory::new(id, frames.iter().map(|&f| (f, pose.clone())).collect()).unwrap()
}

fn ospa2_oracle() -> Outcome {
    let schema = KeypointSchema::default();
    let mut rng = synthetic::rng(SEED + 1);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let gt = synthetic::random_track_set(&mut rng, 6, 10);
        let pred = synthetic::random_track_set(&mut rng, 6, 10);
        let r = ospa2_pose(&gt, &pred, &schema).map_err(|e| e.to_string())?;
        let m = track_distance_matrix(&gt, &pred, &schema, VisibilityFilter::All)
            .map_err(|e| e.to_string())?;
        worst = worst.max((r.total() - brute_ospa(&m)).abs());
    }
    check(worst < 1e-9, format!("max deviation {worst:e}"))?;
    let pose = synthetic::random_pose(&mut rng, 0.0, 0.0);
    let d = track_distance(
        &two_frame_track(1, [1, 2], &pose),
        &two_frame_track(2, [2, 3], &pose),
        &schema,
        VisibilityFilter::All,
    )
    .map_err(|e| e.to_string())?;
    check(d == 2.0 / 3.0, format!("worked track distance {d}"))?;
    Ok(format!(
        "50 pairs, max deviation {worst:e}, worked value {d}"
    ))
}

fn conventions() -> Outcome {
    let schema = KeypointSchema::default();
    let mut rng = synthetic::rng(SEED + 2);
    let unit = |v: f64| (0.0..=1.0).contains(&v);
    let mut instances = 0;
    for _ in 0..100 {
        let (a, b) = (rng.gen_range(0..=6), rng.gen_range(0..=6));
        let x = synthetic::random_pose_set(&mut rng, a);
        let y = synthetic::random_pose_set(&mut rng, b);
        let e = |r: ospa_pose::Result<ospa_pose::OspaResult>| {
            r.map(|r| r.total).map_err(|e| e.to_string())
        };
        let xy = e(ospa_pose(&x, &y, &schema))?;
        let yx = e(ospa_pose(&y, &x, &schema))?;
        check(
            e(ospa_pose(&[], &[], &schema))? == 0.0,
            "OSPA-Pose of two empty sets",
        )?;
        check(
            e(ospa_pose(&x, &x, &schema))? == 0.0,
            "OSPA-Pose of a set with itself",
        )?;
        if !x.is_empty() {
            check(
                e(ospa_pose(&x, &[], &schema))? == 1.0,
                "OSPA-Pose against the empty set",
            )?;
            check(
                e(ospa_pose(&[], &x, &schema))? == 1.0,
                "OSPA-Pose from the empty set",
            )?;
        }
        check(
            (xy - yx).abs() < 1e-12,
            format!("OSPA-Pose asymmetric: {xy} vs {yx}"),
        )?;
        check(unit(xy), format!("OSPA-Pose {xy} outside [0, 1]"))?;

        let tx = synthetic::random_track_set(&mut rng, 6, 10);
        let ty = synthetic::random_track_set(&mut rng, 6, 10);
        let e2 = |r: ospa_pose::Result<ospa_pose::Ospa2Result>| {
            r.map(|r| r.total()).map_err(|e| e.to_string())
        };
        let xy = e2(ospa2_pose(&tx, &ty, &schema))?;
        let yx = e2(ospa2_pose(&ty, &tx, &schema))?;
        check(
            e2(ospa2_pose(&[], &[], &schema))? == 0.0,
            "OSPA² of two empty sets",
        )?;
        check(
            e2(ospa2_pose(&tx, &tx, &schema))? == 0.0,
            "OSPA² of a set with itself",
        )?;
        if !tx.is_empty() {
            check(
                e2(ospa2_pose(&tx, &[], &schema))? == 1.0,
                "OSPA² against the empty set",
            )?;
            check(
                e2(ospa2_pose(&[], &tx, &schema))? == 1.0,
                "OSPA² from the empty set",
            )?;
        }
        check(
            (xy - yx).abs() < 1e-12,
            format!("OSPA² asymmetric: {xy} vs {yx}"),
        )?;
        check(unit(xy), format!("OSPA² {xy} outside [0, 1]"))?;
        instances += 2;
    }
    Ok(format!("{instances} generated instances"))
}

fn oks_anchor() -> Outcome {
    let mut rng = synthetic::rng(SEED + 3);
    let mean = KeypointSchema::default();
    let per_joint = mean.clone().with_mode(OksMode::PerJointAverage);
    let g = synthetic::random_pose(&mut rng, 100.0, 100.0);
    let b = g.bbox.unwrap();
    // Uniform offset with |offset|^2 = 2 s^2 k^2.
    let d = (2.0 * b.w * b.h).sqrt() * mean.scalar_k();
    let p = g.translated(d * 0.6, d * 0.8);
    let anchor = oks(&g, &p, &mean, VisibilityFilter::All).map_err(|e| e.to_string())?;
    check(
        (anchor - (-1.0f64).exp()).abs() < 1e-12,
        format!("anchor OKS {anchor}"),
    )?;

    for _ in 0..50 {
        let g = synthetic::random_pose(&mut rng, 100.0, 100.0);
        let p = synthetic::jitter(&mut rng, &g, 5.0);
        for schema in [&mean, &per_joint] {
            let mut prev = f64::INFINITY;
            for factor in [1.0, 1.5, 2.0, 3.0, 4.0] {
                let mut q = p.clone();
                for (kq, kg) in q.keypoints.iter_mut().zip(&g.keypoints) {
                    kq.x = kg.x + factor * (kq.x - kg.x);
                    kq.y = kg.y + factor * (kq.y - kg.y);
                }
                let v = oks(&g, &q, schema, VisibilityFilter::All).map_err(|e| e.to_string())?;
                check(
                    v < prev,
                    format!("OKS not strictly decreasing at factor {factor}: {v} >= {prev}"),
                )?;
                prev = v;
            }
        }
    }
    Ok(format!(
        "OKS = {anchor:.15}; 50 poses strictly decreasing in both modes"
    ))
}

fn perfect_fixture() -> Outcome {
    let schema = KeypointSchema::default();
    let gt = synthetic::fixture(5, SEED);
    let pred: Vec<SequenceSet> = gt.iter().map(synthetic::perfect_predictions).collect();
    let opts = EvalOptions::default();
    let pose = evaluate_pose(&gt, &pred, &schema, &opts).map_err(|e| e.to_string())?;
    let track = evaluate_track(&gt, &pred, &schema, &opts).map_err(|e| e.to_string())?;
    let p = &pose.overall;
    let t = &track.overall;
    check(
        p.ap == 1.0 && p.ar == 1.0,
        format!("AP {} AR {}", p.ap, p.ar),
    )?;
    check(p.ospa == 0.0, format!("O_pose {}", p.ospa))?;
    check(
        t.clear.mota == 1.0 && t.clear.idf1 == 1.0,
        format!("MOTA {} IDF1 {}", t.clear.mota, t.clear.idf1),
    )?;
    check(t.clear.idsw == 0, format!("IDSW {}", t.clear.idsw))?;
    check(t.ospa2.total == 0.0, format!("O2 {}", t.ospa2.total))?;
    Ok("AP 1, AR 1, MOTA 1, IDF1 1, IDSW 0, O_pose 0, O2 0 over 5 scenes".into())
}

fn replace_scene(pred: &[SequenceSet], index: usize, scene: SequenceSet) -> Vec<SequenceSet> {
    let mut out = pred.to_vec();
    out[index] = scene;
    out
}

fn map_poses(seq: &SequenceSet, mut f: impl FnMut(u64, &mut Vec<Pose>)) -> SequenceSet {
    let frames = seq
        .frames()
        .iter()
        .map(|fr| {
            let mut poses = fr.poses.clone();
            f(fr.frame_id, &mut poses);
            FrameAnnotations::new(fr.frame_id, poses)
        })
        .collect();
    SequenceSet::new(seq.scene.clone(), frames).unwrap()
}

fn perturbations() -> Outcome {
    let schema = KeypointSchema::default();
    let opts = EvalOptions::default();
    let gt = synthetic::fixture(5, SEED);
    let pred: Vec<SequenceSet> = gt.iter().map(synthetic::perfect_predictions).collect();
    let base = evaluate_track(&gt, &pred, &schema, &opts).map_err(|e| e.to_string())?;
    let mut rng = synthetic::rng(SEED + 4);

    // One extra false track, far from every person, in scene 1.
    let ghost = synthetic::random_pose(&mut rng, 3400.0, 150.0)
        .with_score(0.9)
        .with_track(999);
    let extra = map_poses(&pred[1], |f, poses| {
        if (5..15).contains(&f) {
            poses.push(ghost.translated(f as f64, 0.0));
        }
    });
    let r = evaluate_track(&gt, &replace_scene(&pred, 1, extra), &schema, &opts)
        .map_err(|e| e.to_string())?;
    let (b, x) = (&base.scenes[1].ospa2, &r.scenes[1].ospa2);
    check(
        x.card > b.card,
        format!("extra track: card {} -> {}", b.card, x.card),
    )?;
    check(
        x.loc == b.loc,
        format!("extra track: loc {} -> {}", b.loc, x.loc),
    )?;
    for level in Visibility::REPORT_ORDER {
        check(
            x.by_visibility.get(level) > b.by_visibility.get(level),
            format!("extra track: {level} total did not grow"),
        )?;
    }

    // Ids of tracks 1 and 2 exchanged from frame 12, where track 2 begins.
    let swap = map_poses(&pred[0], |f, poses| {
        if f >= 12 {
            for p in poses.iter_mut() {
                p.track_id = match p.track_id {
                    Some(1) => Some(2),
                    Some(2) => Some(1),
                    other => other,
                };
            }
        }
    });
    let r = evaluate_track(&gt, &replace_scene(&pred, 0, swap), &schema, &opts)
        .map_err(|e| e.to_string())?;
    let (b, s) = (&base.scenes[0].ospa2, &r.scenes[0].ospa2);
    check(s.loc > b.loc, format!("swap: loc {} -> {}", b.loc, s.loc))?;
    check(
        s.card == b.card,
        format!("swap: card {} -> {}", b.card, s.card),
    )?;
    check(
        r.scenes[0].clear.idsw == 1,
        format!("swap: IDSW {}", r.scenes[0].clear.idsw),
    )?;
    check(
        r.overall.clear.idsw == 1,
        format!("swap: overall IDSW {}", r.overall.clear.idsw),
    )?;
    Ok(format!(
        "extra track card {:.4} -> {:.4} with loc fixed; swap loc {:.4} -> {:.4} with card fixed, IDSW 1",
        base.scenes[1].ospa2.card, x.card, b.loc, s.loc
    ))
}

fn view_pose(x0: f64, v: Visibility) -> Pose {
    let mut kps = [Keypoint::new(0.0, 0.0, v); NUM_KEYPOINTS];
    for (j, kp) in kps.iter_mut().enumerate() {
        kp.x = x0 + 2.0 * j as f64;
        kp.y = 100.0 + 5.0 * j as f64;
    }
    Pose::new(kps).with_bbox(BBox::new(x0, 100.0, 40.0, 90.0))
}

fn one_frame_view(camera: u32, poses: Vec<Pose>) -> SequenceSet {
    let mut s = SequenceSet::new("two_view", vec![FrameAnnotations::new(0, poses)]).unwrap();
    s.camera_id = Some(camera);
    s
}

fn merging() -> Outcome {
    let layout =
        CameraLayout::new(1000.0, 480.0, vec![(0, 0.0), (1, 500.0)]).map_err(|e| e.to_string())?;
    // Same person seen by both cameras; each view sees a different half clearly.
    let mut a = view_pose(450.0, Visibility::Visible).with_track(5);
    let mut b = view_pose(-50.0, Visibility::Visible).with_track(5);
    for j in 0..NUM_KEYPOINTS {
        if j < 8 {
            b.keypoints[j].visibility = Visibility::Occluded;
            b.keypoints[j].x += 3.0;
        } else {
            a.keypoints[j].visibility = Visibility::Invisible;
            b.keypoints[j].x -= 3.0;
        }
    }
    let merged = merge_views(
        &[
            one_frame_view(0, vec![a.clone()]),
            one_frame_view(1, vec![b.clone()]),
        ],
        &layout,
        AnnotationKind::GroundTruth,
        0.5,
    )
    .map_err(|e| e.to_string())?;
    let fused = &merged.frames()[0].poses;
    check(fused.len() == 1, format!("{} fused poses", fused.len()))?;
    for j in 0..NUM_KEYPOINTS {
        let (winner, offset) = if j < 8 { (&a, 0.0) } else { (&b, 500.0) };
        let k = fused[0].keypoints[j];
        check(
            k.x == winner.keypoints[j].x + offset && k.visibility == winner.keypoints[j].visibility,
            format!("joint {j} took the lower-visibility view"),
        )?;
    }

    // Two detections of one person at IoU 0.9.
    let dx = 40.0 * 0.1 / 1.9;
    let p = view_pose(200.0, Visibility::Visible).with_score(0.8);
    let q = view_pose(200.0 + dx, Visibility::Visible).with_score(0.7);
    let iou = layout.circular_iou(&p.bbox.unwrap(), &q.bbox.unwrap());
    check((iou - 0.9).abs() < 1e-12, format!("constructed IoU {iou}"))?;
    let kept =
        suppress_duplicates(&layout, &[p.clone(), q.clone()], 0.5).map_err(|e| e.to_string())?;
    check(kept == vec![0], format!("survivors {kept:?}"))?;
    let merged = merge_views(
        &[
            one_frame_view(0, vec![p]),
            one_frame_view(1, vec![q.translated(-500.0, 0.0)]),
        ],
        &layout,
        AnnotationKind::Prediction,
        0.5,
    )
    .map_err(|e| e.to_string())?;
    let survivors = &merged.frames()[0].poses;
    check(
        survivors.len() == 1 && survivors[0].score == Some(0.8),
        format!("{} merged predictions", survivors.len()),
    )?;
    Ok("higher-visibility joint chosen per joint; IoU 0.9 duplicates reduced to one".into())
}

fn write_fixture(dir: &Path) -> (std::path::PathBuf, std::path::PathBuf) {
    let schema = KeypointSchema::default();
    let gt_dir = dir.join("gt");
    let pred_dir = dir.join("pred");
    std::fs::create_dir_all(&gt_dir).unwrap();
    std::fs::create_dir_all(&pred_dir).unwrap();
    let gt = synthetic::fixture(5, SEED);
    let mut rng = synthetic::rng(SEED + 5);
    for (i, g) in gt.iter().enumerate() {
        save_annotations(
            g,
            AnnotationKind::GroundTruth,
            &schema,
            &gt_dir.join(format!("{}.jsonl", g.scene)),
        )
        .unwrap();
        // Noisy, imperfect predictions so the reports carry non-trivial numbers.
        let p = map_poses(&synthetic::perfect_predictions(g), |f, poses| {
            for p in poses.iter_mut() {
                *p = synthetic::jitter(&mut rng, p, 6.0).with_score(rng.gen_range(0.1..1.0));
            }
            if (f + i as u64).is_multiple_of(7) && !poses.is_empty() {
                poses.remove(0);
            }
        });
        save_annotations(
            &p,
            AnnotationKind::Prediction,
            &schema,
            &pred_dir.join(format!("{}.jsonl", g.scene)),
        )
        .unwrap();
    }
    (gt_dir, pred_dir)
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_ospa-pose"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "{args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (gt, pred) = write_fixture(dir.path());
    let (gt, pred) = (gt.to_str().unwrap(), pred.to_str().unwrap());
    let mut runs = 0;
    for cmd in ["eval-pose", "eval-track"] {
        for format in ["json-report", "csv", "markdown"] {
            for per_scene in [false, true] {
                let mut args = vec![
                    cmd, "--gt", gt, "--pred", pred, "--format", format, "--seed", "7",
                ];
                if per_scene {
                    args.push("--per-scene");
                }
                let first = run_cli(&args)?;
                let mut with_jobs = args.clone();
                with_jobs.extend(["--jobs", "3"]);
                let second = run_cli(&with_jobs)?;
                check(!first.is_empty(), format!("{cmd} {format}: empty output"))?;
                check(first == second, format!("{cmd} {format}: outputs differ"))?;
                runs += 2;
            }
        }
    }
    Ok(format!("{runs} runs, byte-identical in pairs"))
}

/// The JSON report carries exactly the library's numbers.
fn cli_consistency() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (gt_dir, pred_dir) = write_fixture(dir.path());
    let schema = KeypointSchema::default();
    let gt =
        load_dataset(&gt_dir, AnnotationKind::GroundTruth, &schema).map_err(|e| e.to_string())?;
    let pred =
        load_dataset(&pred_dir, AnnotationKind::Prediction, &schema).map_err(|e| e.to_string())?;
    let opts = EvalOptions::default();
    let lib_pose =
        serde_json::to_value(evaluate_pose(&gt, &pred, &schema, &opts).map_err(|e| e.to_string())?)
            .unwrap();
    let lib_track = serde_json::to_value(
        evaluate_track(&gt, &pred, &schema, &opts).map_err(|e| e.to_string())?,
    )
    .unwrap();
    let (g, p) = (gt_dir.to_str().unwrap(), pred_dir.to_str().unwrap());
    for (cmd, lib) in [("eval-pose", lib_pose), ("eval-track", lib_track)] {
        let text = run_cli(&[cmd, "--gt", g, "--pred", p, "--format", "json-report"])?;
        let mut cli: serde_json::Value =
            serde_json::from_slice(&text).map_err(|e| e.to_string())?;
        cli.as_object_mut().unwrap().remove("method");
        check(
            cli == lib,
            format!("{cmd}: CLI report differs from library values"),
        )?;
    }

    // Empty predictions against a non-empty scene.
    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "").map_err(|e| e.to_string())?;
    let one = gt_dir.join("scene_00.jsonl");
    let text = run_cli(&[
        "eval-pose",
        "--gt",
        one.to_str().unwrap(),
        "--pred",
        empty.to_str().unwrap(),
        "--format",
        "csv",
    ])?;
    let line = String::from_utf8_lossy(&text)
        .lines()
        .nth(1)
        .unwrap_or_default()
        .to_string();
    check(
        line.split(',').nth(2) == Some("1.000"),
        format!("empty predictions row: {line}"),
    )?;

    // Errors go to standard error with a nonzero exit.
    let out = Command::new(env!("CARGO_BIN_EXE_ospa-pose"))
        .args([
            "eval-pose",
            "--gt",
            g,
            "--pred",
            dir.path().join("missing").to_str().unwrap(),
        ])
        .output()
        .map_err(|e| e.to_string())?;
    check(
        !out.status.success() && !out.stderr.is_empty(),
        "missing input accepted",
    )?;
    Ok("json-report equals library values; empty predictions give O_pose 1.000".into())
}

fn dataset_stats() -> Option<Outcome> {
    let path = std::env::var_os("OSPA_POSE_DATASET")?;
    let path = Path::new(&path);
    let run = || -> Outcome {
        let scenes = load_dataset(
            path,
            AnnotationKind::GroundTruth,
            &KeypointSchema::default(),
        )
        .map_err(|e| e.to_string())?;
        let s = compute_stats(&scenes).map_err(|e| e.to_string())?.summary;
        check(s.track_count == 5022, format!("{} tracks", s.track_count))?;
        check(
            (s.mean_track_length.round() - 124.0).abs() <= 1.0,
            format!("mean length {}", s.mean_track_length),
        )?;
        check(
            s.max_track_length >= 1700,
            format!("max length {}", s.max_track_length),
        )?;
        Ok(format!(
            "{} tracks, mean length {:.1}, max {}",
            s.track_count, s.mean_track_length, s.max_track_length
        ))
    };
    Some(run())
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("assignment oracle", assignment_oracle),
        ("OSPA-Pose oracle", ospa_oracle),
        ("OSPA² oracle", ospa2_oracle),
        ("conventions", conventions),
        ("OKS anchor", oks_anchor),
        ("perfect predictions", perfect_fixture),
        ("structured perturbations", perturbations),
        ("merging", merging),
        ("determinism", determinism),
        ("CLI consistency", cli_consistency),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    match dataset_stats() {
        None => println!("SKIP  dataset statistics: OSPA_POSE_DATASET not set"),
        Some(Ok(detail)) => println!("PASS  dataset statistics: {detail}"),
        Some(Err(why)) => {
            failed += 1;
            println!("FAIL  dataset statistics: {why}");
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
