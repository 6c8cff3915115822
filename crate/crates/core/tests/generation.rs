use vrsuite_core::generators::{families, generate};
use vrsuite_core::sample::{validate_sample, DuplicateRegistry, Split};

#[test]
fn every_family_generates_valid_samples_in_every_stratum() {
    let reg = DuplicateRegistry::new();
    for f in families() {
        for index in 0..6 {
            let s = generate(f, Split::Train, index, &reg).unwrap_or_else(|e| panic!("{} #{index}: {e}", f.spec().code));
            assert_eq!(s.params.stratum as u64, index % f.spec().strata.len() as u64);
            assert!(!s.prompt.contains('{'), "{}", s.prompt);
            assert_eq!(s.gt_frames.len() as u32, s.solution.frames_per_step * (s.solution.states.len() as u32 - 1) + f.spec().hold);
        }
    }
}

#[test]
fn regeneration_is_byte_identical() {
    for f in families() {
        let a = generate(f, Split::TestInDomain, 7, &DuplicateRegistry::new()).unwrap();
        let b = generate(f, Split::TestInDomain, 7, &DuplicateRegistry::new()).unwrap();
        assert_eq!(a.seed, b.seed);
        assert_eq!(a.params, b.params);
        assert_eq!(a.gt_frames, b.gt_frames, "{}", f.spec().code);
    }
}

#[test]
fn violating_trajectories_fail_the_solution_check() {
    for f in families() {
        let s = generate(f, Split::Train, 1, &DuplicateRegistry::new()).unwrap();
        let bad = f.violating_trajectory(&s.params, &s.solution).unwrap();
        assert!(f.check_solution(&s.params, &bad).is_err(), "{} accepted a rule-breaking trajectory", f.spec().code);
        assert!(f.check_solution(&s.params, &s.solution).is_ok());
    }
}

#[test]
fn duplicate_registration_is_detected() {
    let reg = DuplicateRegistry::new();
    let f = families().next().unwrap();
    let s = generate(f, Split::Train, 0, &reg).unwrap();
    let again = validate_sample(&s, &reg);
    assert!(!again.duplicate);
    // The retry draws fresh parameters under the next sub-seed.
    let retry = generate(f, Split::Train, 0, &reg).unwrap();
    assert_ne!(retry.seed, s.seed);
    assert_ne!(retry.params, s.params);
}

#[test]
fn drawn_parameters_pass_validation_first_time() {
    use vrsuite_core::generators::generate_counted;
    for f in families() {
        let reg = DuplicateRegistry::new();
        let rejected: u32 = (0..40).map(|i| generate_counted(f, Split::Train, i, &reg).unwrap().1).sum();
        assert!(rejected == 0, "{}: {rejected} of 40 draws failed validation", f.spec().code);
    }
}
