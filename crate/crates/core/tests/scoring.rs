use vrsuite_core::evalkit::{extract_agent_track, perturb, reference_frames, registered_rubrics, score_sample, score_with_reference, Perturbation};
use vrsuite_core::generators::{family_codes, generate_by_code};
use vrsuite_core::render::Frame;
use vrsuite_core::sample::{Digests, DuplicateRegistry, Manifest, Sample, Split};

/// Dimension each family's rule-breaking trajectory must zero out.
pub const VIOLATED: [(&str, &str); 9] = [
    ("G-15", "obstacle_avoidance"),
    ("G-16", "target_coverage"),
    ("G-31", "direction_compliance"),
    ("G-45", "path_validity"),
    ("G-3", "ordering"),
    ("O-47", "move_legality"),
    ("O-49", "mirror_accuracy"),
    ("G-35", "physics"),
    ("O-85", "direction"),
];

fn manifest(s: &Sample) -> Manifest {
    Manifest::for_sample(s, Digests::default())
}

fn sample(code: &str, index: u64) -> Sample {
    generate_by_code(code, Split::TestInDomain, index, &DuplicateRegistry::new()).unwrap()
}

#[test]
fn ground_truth_extraction_recovers_solution_states() {
    for code in ["G-15", "G-16", "G-31", "G-45"] {
        for i in 0..3 {
            let s = sample(code, i);
            let t = extract_agent_track(s.gt_frames.frames(), &manifest(&s));
            assert!(t.absent.is_empty(), "{code} {i}");
            assert_eq!(t.states, s.solution.states, "{code} {i}");
        }
    }
}

#[test]
fn ground_truth_beats_every_perturbation() {
    for code in family_codes() {
        for i in 0..3 {
            let s = sample(code, i);
            let m = manifest(&s);
            let reference = reference_frames(&m).unwrap();
            assert_eq!(reference, s.gt_frames.frames());
            let gt = score_with_reference(&m, &reference, &reference).unwrap();
            let line: Vec<String> = gt.dimensions.iter().map(|d| format!("{}={:.3}", d.id, d.score)).collect();
            assert!(gt.total >= 0.95, "{code} {i}: ground truth {:.3} [{}] {:?}", gt.total, line.join(" "), gt.diagnostics);
            for p in Perturbation::ALL {
                let frames = perturb(&m, &reference, p).unwrap();
                let r = score_with_reference(&m, &reference, &frames).unwrap();
                let line: Vec<String> = r.dimensions.iter().map(|d| format!("{}={:.3}", d.id, d.score)).collect();
                assert!(r.total < gt.total, "{code} {i} {}: {:.3} [{}]", p.name(), r.total, line.join(" "));
                if p == Perturbation::Splice {
                    let dim = VIOLATED.iter().find(|(c, _)| *c == code).unwrap().1;
                    assert_eq!(r.dimension(dim), Some(0.0), "{code} {i}: [{}]", line.join(" "));
                }
            }
        }
    }
}

#[test]
fn obstacle_crossing_caps_the_total() {
    let s = sample("G-15", 1);
    let m = manifest(&s);
    let frames = perturb(&m, s.gt_frames.frames(), Perturbation::Splice).unwrap();
    let r = score_sample(&m, &frames).unwrap();
    assert_eq!(r.dimension("obstacle_avoidance"), Some(0.0));
    assert!(r.total <= 0.60 + 1e-12);
    assert!(r.diagnostics.iter().any(|d| d.frame.is_some()));
}

#[test]
fn frozen_candidate_never_completes() {
    let s = sample("G-15", 0);
    let m = manifest(&s);
    let frames = vec![s.first_frame.clone(); s.gt_frames.len()];
    assert_eq!(score_sample(&m, &frames).unwrap().dimension("task_completion"), Some(0.0));
}

#[test]
fn blank_and_empty_candidates_score_zero() {
    let s = sample("G-31", 0);
    let m = manifest(&s);
    assert_eq!(score_sample(&m, &[]).unwrap().total, 0.0);
    let blank = vec![Frame::filled(512, 512, vrsuite_core::render::Rgb::WHITE); 10];
    let r = score_sample(&m, &blank).unwrap();
    assert_eq!(r.dimension("shortest_path"), Some(0.0));
    assert!(!r.diagnostics.is_empty());
}

#[test]
fn scoring_is_deterministic() {
    let s = sample("G-3", 2);
    let m = manifest(&s);
    let shuffled = perturb(&m, s.gt_frames.frames(), Perturbation::Shuffle).unwrap();
    assert_eq!(score_sample(&m, &shuffled).unwrap(), score_sample(&m, &shuffled).unwrap());
}

#[test]
fn padded_candidate_scores_like_the_original() {
    let s = sample("O-49", 0);
    let m = manifest(&s);
    let padded: Vec<Frame> = s
        .gt_frames
        .frames()
        .iter()
        .map(|f| {
            let mut p = Frame::filled(640, 512, vrsuite_core::render::Rgb::BLACK);
            for y in 0..512 {
                for x in 0..512 {
                    p.set(x + 64, y, f.get(x, y));
                }
            }
            p
        })
        .collect();
    let a = score_sample(&m, s.gt_frames.frames()).unwrap();
    let b = score_sample(&m, &padded).unwrap();
    assert_eq!(a.total, b.total);
}

#[test]
fn rubric_weights() {
    let reference = [
        ("G-15", vec![0.40, 0.30, 0.20, 0.10]),
        ("G-16", vec![0.40, 0.30, 0.20, 0.10]),
        ("G-31", vec![0.40, 0.35, 0.15, 0.10]),
        ("G-45", vec![0.30, 0.30, 0.20, 0.20]),
        ("G-3", vec![0.30, 0.30, 0.30, 0.10]),
    ];
    let rubrics = registered_rubrics();
    assert_eq!(rubrics.len(), 9);
    for r in &rubrics {
        assert!((r.weight_sum() - 1.0).abs() <= 1e-9, "{}", r.task);
    }
    for (code, w) in reference {
        let r = rubrics.iter().find(|r| r.task == code).unwrap();
        assert_eq!(r.dimensions.iter().map(|d| d.weight).collect::<Vec<_>>(), w, "{code}");
    }
}
