use std::collections::BTreeSet;
use std::time::Duration;

use vrsuite_core::factory::{enqueue_plan, run_pool, ArchiveWriter, FaultPolicy, FsStore, GenerateExecutor, JobStatus, MemoryQueue, MemoryStore, OutputFormat, ParamsExecutor, SampleStore, WorkerConfig, MAX_ATTEMPTS};
use vrsuite_core::generators::{GenerationPlan, PlanEntry};
use vrsuite_core::render::CodecConfig;
use vrsuite_core::sample::{list_sample_dirs, validate_sample, load_sample, DuplicateRegistry, Split};

fn entry(family: &str, split: Split, count: u64) -> PlanEntry {
    PlanEntry { family: family.into(), split, start: 0, count }
}

/// 8 entries of 625 indices in batches of 25: 200 jobs.
fn plan_200() -> GenerationPlan {
    let mut entries: Vec<PlanEntry> = ["G-15", "G-16", "G-31", "G-45", "G-3", "O-47", "O-49"].iter().map(|f| entry(f, Split::Train, 625)).collect();
    entries.push(entry("G-15", Split::TestInDomain, 625));
    GenerationPlan { entries }
}

fn plan_keys(plan: &GenerationPlan) -> BTreeSet<String> {
    plan.items().map(|(f, s, i)| vrsuite_core::factory::sample_key(f, s, i)).collect()
}

#[test]
fn enqueue_arithmetic() {
    let plan = GenerationPlan { entries: vec![entry("G-15", Split::Train, 1000)] };
    let ms = enqueue_plan(&plan, 50, OutputFormat::Files).unwrap();
    assert_eq!(ms.len(), 20);
    assert!(enqueue_plan(&plan, 10, OutputFormat::Files).is_err());
    assert!(enqueue_plan(&plan, 101, OutputFormat::Files).is_err());

    let plan = GenerationPlan { entries: vec![entry("G-16", Split::Train, 1013), entry("O-47", Split::TestInDomain, 7)] };
    let ms = enqueue_plan(&plan, 40, OutputFormat::Archive).unwrap();
    let mut covered = std::collections::BTreeMap::<(String, Split), Vec<u64>>::new();
    for m in &ms {
        m.validate().unwrap();
        assert!(m.count >= 1 && m.count <= 40);
        covered.entry((m.family.clone(), m.split)).or_default().extend(m.indices());
    }
    assert_eq!(covered[&("G-16".to_string(), Split::Train)], (0..1013).collect::<Vec<_>>());
    assert_eq!(covered[&("O-47".to_string(), Split::TestInDomain)], (0..7).collect::<Vec<_>>());
    let ids: BTreeSet<u64> = ms.iter().map(|m| m.id).collect();
    assert_eq!(ids.len(), ms.len());

    let bad = GenerationPlan { entries: vec![entry("Z-9", Split::Train, 30)] };
    assert!(enqueue_plan(&bad, 25, OutputFormat::Files).is_err());
}

#[test]
fn message_json_round_trip() {
    let plan = GenerationPlan { entries: vec![entry("G-31", Split::Train, 60)] };
    for m in enqueue_plan(&plan, 25, OutputFormat::Archive).unwrap() {
        let back = vrsuite_core::factory::JobMessage::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
    }
    assert!(vrsuite_core::factory::JobMessage::from_json(r#"{"id":0,"family":"G-31","count":0,"start_index":0,"split":"train","base_seed":0,"format":"files","attempt":0}"#).is_err());
}

/// Finds a seed whose policy plants exactly the wanted fault on message 0.
fn policy_for(transient: bool) -> FaultPolicy {
    (0..10_000)
        .map(|seed| if transient { FaultPolicy { transient_rate: 0.5, persistent_rate: 0.0, seed } } else { FaultPolicy { transient_rate: 0.0, persistent_rate: 0.5, seed } })
        .find(|p| p.planned(0).is_some())
        .unwrap()
}

fn single_job_run(faults: FaultPolicy) -> (vrsuite_core::factory::PoolSummary, MemoryStore) {
    let plan = GenerationPlan { entries: vec![entry("G-15", Split::Train, 25)] };
    let q = MemoryQueue::new(MemoryQueue::DEFAULT_VISIBILITY);
    q.enqueue_all(enqueue_plan(&plan, 25, OutputFormat::Files).unwrap()).unwrap();
    let exec = ParamsExecutor { store: MemoryStore::new() };
    let s = run_pool(&q, &exec, &faults, &WorkerConfig::default(), None).unwrap();
    (s, exec.store)
}

#[test]
fn transient_fault_succeeds_on_retry() {
    let (s, store) = single_job_run(policy_for(true));
    assert_eq!(s.results.len(), 2);
    assert_eq!(s.results[0].status, JobStatus::Retrying);
    assert_eq!((s.results[1].attempt, s.results[1].status), (1, JobStatus::Ok));
    assert_eq!(s.results[1].keys.len(), 25);
    assert_eq!((s.stats.retried, s.stats.succeeded, s.stats.dead_lettered), (1, 1, 0));
    assert_eq!(store.keys().unwrap().len(), 25);
}

#[test]
fn persistent_fault_dead_letters_after_two_attempts() {
    let (s, store) = single_job_run(policy_for(false));
    assert_eq!(s.results.len(), MAX_ATTEMPTS as usize);
    assert_eq!(s.results.last().unwrap().status, JobStatus::DeadLettered);
    assert_eq!(s.stats.dead_lettered, 1);
    assert_eq!(s.stats.succeeded, 0);
    assert!(store.keys().unwrap().is_empty());
    assert!(s.stats.conserved());
}

#[test]
fn expired_lease_is_redelivered_and_stale_ack_ignored() {
    let plan = GenerationPlan { entries: vec![entry("G-15", Split::Train, 25)] };
    let q = MemoryQueue::new(Duration::from_millis(0));
    q.enqueue_all(enqueue_plan(&plan, 25, OutputFormat::Files).unwrap()).unwrap();
    let first = q.lease(std::time::Instant::now()).unwrap();
    std::thread::sleep(Duration::from_millis(2));
    let second = q.lease(std::time::Instant::now()).unwrap();
    assert_eq!(second.message.attempt, 1);
    assert!(!q.ack(&first));
    assert!(q.ack(&second));
    assert!(q.drained(std::time::Instant::now()));
    assert!(q.monitor().conserved());
}

fn faulty_run(workers: usize) -> (vrsuite_core::factory::PoolSummary, std::collections::BTreeMap<String, String>) {
    let plan = plan_200();
    let q = MemoryQueue::new(MemoryQueue::DEFAULT_VISIBILITY);
    q.enqueue_all(enqueue_plan(&plan, 25, OutputFormat::Files).unwrap()).unwrap();
    let exec = ParamsExecutor { store: MemoryStore::new() };
    let faults = FaultPolicy { transient_rate: 0.05, persistent_rate: 0.01, seed: 7 };
    let s = run_pool(&q, &exec, &faults, &WorkerConfig { workers, ..WorkerConfig::default() }, None).unwrap();
    (s, exec.store.snapshot())
}

#[test]
fn two_hundred_jobs_with_faults() {
    let plan = plan_200();
    let ms = enqueue_plan(&plan, 25, OutputFormat::Files).unwrap();
    assert_eq!(ms.len(), 200);
    let faults = FaultPolicy { transient_rate: 0.05, persistent_rate: 0.01, seed: 7 };
    let persistent: BTreeSet<u64> = ms.iter().filter(|m| faults.planned(m.id) == Some(vrsuite_core::factory::Fault::Persistent)).map(|m| m.id).collect();
    let expected: BTreeSet<String> = ms
        .iter()
        .filter(|m| !persistent.contains(&m.id))
        .flat_map(|m| m.indices().map(|i| vrsuite_core::factory::sample_key(&m.family, m.split, i)))
        .collect();

    let (base, snapshot) = faulty_run(4);
    assert_eq!(base.stats.succeeded + base.stats.dead_lettered, 200);
    assert!(base.stats.conserved());
    assert_eq!(base.dead_lettered().into_iter().collect::<BTreeSet<_>>(), persistent);
    for id in &persistent {
        let attempts: Vec<u32> = base.results.iter().filter(|r| r.message == *id).map(|r| r.attempt).collect();
        assert_eq!(attempts, vec![0, 1]);
    }
    assert!(base.results.iter().all(|r| r.attempt < MAX_ATTEMPTS));
    assert_eq!(base.keys, expected);
    assert_eq!(snapshot.len(), expected.len());
    assert!(expected.is_subset(&plan_keys(&plan)));

    for workers in [1, 8] {
        let (other, snap) = faulty_run(workers);
        assert_eq!(snap, snapshot, "{workers} workers");
        let strip = |s: &vrsuite_core::factory::PoolSummary| s.results.iter().map(|r| (r.message, r.attempt, r.status, r.keys.clone())).collect::<Vec<_>>();
        assert_eq!(strip(&other), strip(&base));
    }
}

#[test]
fn files_and_archives_on_disk() {
    let codec = CodecConfig::from_env();
    let plan = GenerationPlan { entries: vec![entry("G-15", Split::Train, 30), entry("O-47", Split::TestInDomain, 25)] };
    let faults = FaultPolicy { transient_rate: 1.0, persistent_rate: 0.0, seed: 1 };
    let mut trees = Vec::new();
    for (format, workers) in [(OutputFormat::Files, 1), (OutputFormat::Files, 2), (OutputFormat::Archive, 2)] {
        let dir = tempfile::tempdir().unwrap();
        let q = MemoryQueue::new(MemoryQueue::DEFAULT_VISIBILITY);
        q.enqueue_all(enqueue_plan(&plan, 25, format).unwrap()).unwrap();
        let exec = GenerateExecutor { store: FsStore::new(dir.path(), codec.clone()) };
        let s = run_pool(&q, &exec, &faults, &WorkerConfig { workers, ..WorkerConfig::default() }, None).unwrap();
        assert_eq!(s.stats.retried, 3);
        assert_eq!(s.stats.succeeded, 3);
        assert_eq!(s.keys, plan_keys(&plan));
        assert!(s.stats.validation_failure_rate("G-15") < 0.01);
        assert!(!dir.path().join(".staging").exists() || std::fs::read_dir(dir.path().join(".staging")).unwrap().next().is_none());
        match format {
            OutputFormat::Files => {
                let dirs = list_sample_dirs(dir.path()).unwrap();
                assert_eq!(dirs.len(), 55);
                let registry = DuplicateRegistry::new();
                for d in dirs.iter().step_by(11) {
                    let sample = load_sample(d, &codec).unwrap();
                    assert!(validate_sample(&sample, &registry).passed());
                }
                trees.push(format!("{:?}", vrsuite_core::sample::directory_digest(dir.path()).unwrap()));
            }
            OutputFormat::Archive => {
                let tars = ArchiveWriter::list(&dir.path().join("archives")).unwrap();
                assert_eq!(tars.len(), 3);
                let mut bytes = Vec::new();
                for t in &tars {
                    bytes.push(std::fs::read(t).unwrap());
                }
                trees.push(format!("{:?}", bytes.iter().map(|b| b.len()).collect::<Vec<_>>()));
            }
        }
        drop(dir);
    }
    assert_eq!(trees[0], trees[1]);
}
